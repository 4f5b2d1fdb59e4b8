//! Operator norms for the `L^2` (Hilbert-Schmidt) structure: exact via the
//! dense materialization, or estimated by power iteration on `A* A`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::operator::{DenseMatrix, GridOperator};
use crate::ensemble::random_complex;
use crate::error::{Error, Result};
use crate::grid::{norm_hs, Container, ContainerKind, GridFunction, SpaceTag, CONTAINER_FORMAT};

/// Above this many coordinates a dense materialization is refused.
pub const MAX_DENSE_SIZE: usize = 4096;

/// The matrix of `op` on raw position-space coordinates.
pub fn materialize(op: &GridOperator) -> Result<DenseMatrix> {
    let grid = op.grid();
    let size = grid.len() * op.k() * op.k();
    if size > MAX_DENSE_SIZE {
        return Err(Error::InvalidArgument(format!(
            "dense materialization of {size} coordinates exceeds the limit of {MAX_DENSE_SIZE}"
        )));
    }
    let columns: Vec<Vec<Complex64>> = (0..size)
        .into_par_iter()
        .map(|j| {
            let mut data = vec![Complex64::new(0.0, 0.0); size];
            data[j] = Complex64::new(1.0, 0.0);
            let e = GridFunction::from_raw(grid, op.k(), SpaceTag::Position, data)?;
            Ok(op.apply(&e)?.data().to_vec())
        })
        .collect::<Result<_>>()?;
    let mut data = vec![Complex64::new(0.0, 0.0); size * size];
    for (j, col) in columns.iter().enumerate() {
        for (i, z) in col.iter().enumerate() {
            data[i * size + j] = *z;
        }
    }
    DenseMatrix::new(size, data)
}

/// Largest singular value of a dense matrix.
pub fn matrix_spectral_norm(m: &DenseMatrix) -> f64 {
    let a = DMatrix::from_row_slice(m.size(), m.size(), m.data());
    a.singular_values().max()
}

/// Exact operator norm through the dense materialization (small grids only).
pub fn dense_spectral_norm(op: &GridOperator) -> Result<f64> {
    Ok(matrix_spectral_norm(&materialize(op)?))
}

/// Power iteration on `A* A` from a seeded random start; a lower estimate of
/// the norm that converges from below.
pub fn power_iteration_norm(op: &GridOperator, iterations: usize, seed: u64) -> Result<f64> {
    let grid = op.grid();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data = (0..grid.len() * op.k() * op.k()).map(|_| random_complex(&mut rng)).collect();
    let mut x = GridFunction::from_raw(grid, op.k(), SpaceTag::Position, data)?;
    let adj = op.adjoint();
    let mut estimate = 0.0;
    for _ in 0..iterations.max(1) {
        let nx = norm_hs(&x);
        if nx == 0.0 {
            return Ok(0.0);
        }
        x = x.scale(Complex64::new(1.0 / nx, 0.0));
        let y = op.apply(&x)?;
        let next = norm_hs(&y);
        x = adj.apply(&y)?;
        if (next - estimate).abs() <= 1e-12 * next {
            return Ok(next);
        }
        estimate = next;
    }
    Ok(estimate)
}

/// Container holding the dense matrix of `op`.
pub fn dense_container(op: &GridOperator) -> Result<Container> {
    let m = materialize(op)?;
    let g = op.grid();
    Ok(Container {
        format: CONTAINER_FORMAT.to_string(),
        kind: ContainerKind::DenseOperator,
        dim: g.dim(),
        points: g.points(),
        length: g.length(),
        k: op.k(),
        space: SpaceTag::Position,
        rows: m.size(),
        cols: m.size(),
        entries: m.data().iter().map(|z| [z.re, z.im]).collect(),
    })
}

/// Rebuild a dense operator from its container.
pub fn operator_from_container(c: &Container) -> Result<GridOperator> {
    c.validate()?;
    if c.kind != ContainerKind::DenseOperator {
        return Err(Error::Container(format!("expected a dense operator, found {:?}", c.kind)));
    }
    GridOperator::dense(&c.grid()?, c.k, DenseMatrix::new(c.rows, c.complex_entries())?)
}
