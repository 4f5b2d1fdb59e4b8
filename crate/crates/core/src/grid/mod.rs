//! Periodic grids, sampled matrix-valued functions and their norms.
//!
//! `R^n` is replaced by the torus `[-L/2, L/2)^n` sampled with `N` points per
//! axis. Position samples sit at `x = (i - N/2) h` with `h = L/N`; the dual
//! frequency lattice is `xi = (j - N/2) * 2 pi / L`. Both representations use the
//! same centered index layout, so index `i` on an axis carries the signed label
//! `i - N/2`.

mod io;
mod seminorm;

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebra::{self, MatrixElement};
use crate::error::{Error, Result};

pub use io::{function_csv, read_container, write_atomic, write_container, Container, ContainerKind, CONTAINER_FORMAT};
pub use seminorm::{seminorm_p, seminorm_q, Seminorm, DEFAULT_MAX_DERIVATIVE_ORDER};

/// Largest spatial dimension accepted by [`TorusGrid::new`].
pub const MAX_DIM: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpaceTag {
    Position,
    Frequency,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TorusGrid {
    dim: usize,
    points: usize,
    length: f64,
}

impl TorusGrid {
    pub fn new(dim: usize, points: usize, length: f64) -> Result<Self> {
        if dim == 0 || dim > MAX_DIM {
            return Err(Error::InvalidGrid(format!("dimension {dim} outside 1..={MAX_DIM}")));
        }
        if points < 2 || !points.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "points per axis must be a power of two >= 2, got {points}"
            )));
        }
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::InvalidGrid(format!("box length must be positive, got {length}")));
        }
        Ok(Self {
            dim,
            points,
            length,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Samples per axis, `N`.
    pub fn points(&self) -> usize {
        self.points
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    /// Total number of grid points (and of frequency modes), `N^n`.
    pub fn len(&self) -> usize {
        self.points.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Spatial step `h = L / N`.
    pub fn spacing(&self) -> f64 {
        self.length / self.points as f64
    }

    /// Frequency step `2 pi / L`.
    pub fn frequency_spacing(&self) -> f64 {
        2.0 * PI / self.length
    }

    pub fn volume(&self) -> f64 {
        self.length.powi(self.dim as i32)
    }

    /// Quadrature weight of one cell: `h^n` in position space, `(2 pi / L)^n` in
    /// frequency space.
    pub fn cell_measure(&self, tag: SpaceTag) -> f64 {
        let step = match tag {
            SpaceTag::Position => self.spacing(),
            SpaceTag::Frequency => self.frequency_spacing(),
        };
        step.powi(self.dim as i32)
    }

    /// Signed label `i - N/2` of an axis index.
    #[inline]
    pub fn label(&self, axis_index: usize) -> i64 {
        axis_index as i64 - (self.points / 2) as i64
    }

    /// Axis index of a signed label, wrapped periodically into `[-N/2, N/2)`.
    #[inline]
    pub fn wrap_label(&self, label: i64) -> usize {
        let n = self.points as i64;
        (label + n / 2).rem_euclid(n) as usize
    }

    /// Per-axis indices of a flat index (axis 0 varies slowest).
    pub fn axis_indices(&self, index: usize) -> [usize; MAX_DIM] {
        let mut out = [0usize; MAX_DIM];
        let mut rest = index;
        for a in (0..self.dim).rev() {
            out[a] = rest % self.points;
            rest /= self.points;
        }
        out
    }

    pub fn labels(&self, index: usize) -> [i64; MAX_DIM] {
        let idx = self.axis_indices(index);
        let mut out = [0i64; MAX_DIM];
        for a in 0..self.dim {
            out[a] = self.label(idx[a]);
        }
        out
    }

    /// Flat index of per-axis signed labels, wrapping each periodically.
    pub fn index_of_labels(&self, labels: &[i64]) -> usize {
        labels[..self.dim]
            .iter()
            .fold(0usize, |acc, &l| acc * self.points + self.wrap_label(l))
    }

    /// Position of grid point `index`.
    pub fn point(&self, index: usize) -> Vec<f64> {
        let h = self.spacing();
        let l = self.labels(index);
        (0..self.dim).map(|a| l[a] as f64 * h).collect()
    }

    /// Frequency of mode `index`.
    pub fn frequency(&self, index: usize) -> Vec<f64> {
        let d = self.frequency_spacing();
        let l = self.labels(index);
        (0..self.dim).map(|a| l[a] as f64 * d).collect()
    }

    /// Flat index of the origin (`x = 0` or `xi = 0`).
    pub fn origin_index(&self) -> usize {
        self.index_of_labels(&[0; MAX_DIM])
    }

    pub(crate) fn check_same(&self, other: &TorusGrid) -> Result<()> {
        if self != other {
            return Err(Error::GridMismatch(format!("{self:?} vs {other:?}")));
        }
        Ok(())
    }
}

/// Real skew-symmetric `n x n` matrix `J` twisting the deformed product.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SkewForm {
    dim: usize,
    entries: Vec<f64>,
}

impl SkewForm {
    /// Tolerance on `|J + J^T|` accepted at construction; the stored matrix is
    /// then exactly antisymmetrized.
    pub const SKEW_TOLERANCE: f64 = 1e-12;

    pub fn new(dim: usize, entries: Vec<f64>) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::InvalidArgument(format!(
                "skew form of dimension {dim} needs {} entries, got {}",
                dim * dim,
                entries.len()
            )));
        }
        if entries.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("skew form has non-finite entries".into()));
        }
        let mut asym = 0.0f64;
        for i in 0..dim {
            for j in 0..dim {
                asym = asym.max((entries[i * dim + j] + entries[j * dim + i]).abs());
            }
        }
        let scale = entries.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        if asym > Self::SKEW_TOLERANCE * scale {
            return Err(Error::NotSkew { asymmetry: asym });
        }
        let mut e = vec![0.0; dim * dim];
        for i in 0..dim {
            for j in 0..dim {
                e[i * dim + j] = 0.5 * (entries[i * dim + j] - entries[j * dim + i]);
            }
        }
        Ok(Self { dim, entries: e })
    }

    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            entries: vec![0.0; dim * dim],
        }
    }

    /// `theta` times the standard symplectic block structure: pairs of axes
    /// `(2i, 2i+1)` carry `[[0, theta], [-theta, 0]]`. In odd dimension the last
    /// axis is left untwisted (in particular every form in dimension 1 is zero).
    pub fn symplectic(dim: usize, theta: f64) -> Self {
        let mut e = vec![0.0; dim * dim];
        let mut a = 0;
        while a + 1 < dim {
            e[a * dim + a + 1] = theta;
            e[(a + 1) * dim + a] = -theta;
            a += 2;
        }
        Self { dim, entries: e }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.dim + j]
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&v| v == 0.0)
    }

    /// `J v`.
    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self.get(i, j) * v[j]).sum())
            .collect()
    }

    /// `<a, J b>`.
    pub fn pairing(&self, a: &[f64], b: &[f64]) -> f64 {
        let jb = self.apply(b);
        a.iter().zip(&jb).map(|(x, y)| x * y).sum()
    }
}

/// A `M_k(C)`-valued function sampled on a [`TorusGrid`], either in position
/// space or on the frequency lattice.
#[derive(Clone, Debug, PartialEq)]
pub struct GridFunction {
    grid: TorusGrid,
    k: usize,
    tag: SpaceTag,
    /// `len * k * k` entries; the block of point `i` is row-major at `i * k * k`.
    data: Vec<Complex64>,
}

impl GridFunction {
    pub fn zeros(grid: &TorusGrid, k: usize, tag: SpaceTag) -> Self {
        assert!(k >= 1, "algebra dimension must be positive");
        Self {
            data: vec![Complex64::new(0.0, 0.0); grid.len() * k * k],
            grid: grid.clone(),
            k,
            tag,
        }
    }

    pub fn constant(grid: &TorusGrid, value: &MatrixElement, tag: SpaceTag) -> Self {
        let k = value.k();
        let mut data = Vec::with_capacity(grid.len() * k * k);
        for _ in 0..grid.len() {
            data.extend_from_slice(value.entries());
        }
        Self {
            grid: grid.clone(),
            k,
            tag,
            data,
        }
    }

    pub fn from_values(grid: &TorusGrid, values: &[MatrixElement], tag: SpaceTag) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidArgument(format!(
                "expected {} values, got {}",
                grid.len(),
                values.len()
            )));
        }
        let k = values.first().map(MatrixElement::k).unwrap_or(1);
        let mut data = Vec::with_capacity(grid.len() * k * k);
        for v in values {
            if v.k() != k {
                return Err(Error::AlgebraMismatch {
                    expected: k,
                    found: v.k(),
                });
            }
            data.extend_from_slice(v.entries());
        }
        Ok(Self {
            grid: grid.clone(),
            k,
            tag,
            data,
        })
    }

    /// Build from raw row-major blocks.
    pub fn from_raw(grid: &TorusGrid, k: usize, tag: SpaceTag, data: Vec<Complex64>) -> Result<Self> {
        if k == 0 || data.len() != grid.len() * k * k {
            return Err(Error::InvalidArgument(format!(
                "raw data of length {} does not fit {} points with k = {k}",
                data.len(),
                grid.len()
            )));
        }
        Ok(Self {
            grid: grid.clone(),
            k,
            tag,
            data,
        })
    }

    /// Scalar function `phi(x) * 1_C`.
    pub fn from_scalar(grid: &TorusGrid, k: usize, tag: SpaceTag, phi: &[Complex64]) -> Self {
        assert_eq!(phi.len(), grid.len());
        let mut out = Self::zeros(grid, k, tag);
        for (i, &z) in phi.iter().enumerate() {
            let b = out.block_mut(i);
            for d in 0..k {
                b[d * k + d] = z;
            }
        }
        out
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn tag(&self) -> SpaceTag {
        self.tag
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    #[cfg(test)]
    pub(crate) fn data_mut(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    #[cfg(test)]
    pub(crate) fn retag(mut self, tag: SpaceTag) -> Self {
        self.tag = tag;
        self
    }

    #[inline]
    pub fn block(&self, index: usize) -> &[Complex64] {
        let kk = self.k * self.k;
        &self.data[index * kk..(index + 1) * kk]
    }

    #[inline]
    pub(crate) fn block_mut(&mut self, index: usize) -> &mut [Complex64] {
        let kk = self.k * self.k;
        &mut self.data[index * kk..(index + 1) * kk]
    }

    pub fn value(&self, index: usize) -> MatrixElement {
        MatrixElement::from_slice(self.k, self.block(index))
    }

    pub fn values(&self) -> Vec<MatrixElement> {
        (0..self.len()).map(|i| self.value(i)).collect()
    }

    /// Whether every entry at point `index` is exactly zero.
    #[inline]
    pub(crate) fn is_zero_at(&self, index: usize) -> bool {
        self.block(index).iter().all(|z| z.re == 0.0 && z.im == 0.0)
    }

    /// Entry `(i, j)` as a scalar function.
    pub fn entry(&self, i: usize, j: usize) -> Vec<Complex64> {
        let k = self.k;
        (0..self.len()).map(|p| self.data[p * k * k + i * k + j]).collect()
    }

    pub(crate) fn check_compatible(&self, other: &GridFunction) -> Result<()> {
        self.grid.check_same(&other.grid)?;
        if self.k != other.k {
            return Err(Error::AlgebraMismatch {
                expected: self.k,
                found: other.k,
            });
        }
        if self.tag != other.tag {
            return Err(Error::WrongSpace {
                expected: self.tag,
                found: other.tag,
            });
        }
        Ok(())
    }

    pub(crate) fn expect_tag(&self, tag: SpaceTag) -> Result<()> {
        if self.tag != tag {
            return Err(Error::WrongSpace {
                expected: tag,
                found: self.tag,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &GridFunction) -> Result<GridFunction> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        out.data.iter_mut().zip(&other.data).for_each(|(a, b)| *a += b);
        Ok(out)
    }

    pub fn sub(&self, other: &GridFunction) -> Result<GridFunction> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        out.data.iter_mut().zip(&other.data).for_each(|(a, b)| *a -= b);
        Ok(out)
    }

    pub fn scale(&self, z: Complex64) -> GridFunction {
        let mut out = self.clone();
        out.data.iter_mut().for_each(|a| *a *= z);
        out
    }

    /// `self += z * other`.
    pub fn axpy(&mut self, z: Complex64, other: &GridFunction) -> Result<()> {
        self.check_compatible(other)?;
        self.data.iter_mut().zip(&other.data).for_each(|(a, b)| *a += z * b);
        Ok(())
    }

    /// Pointwise involution `x -> f(x)^*`.
    pub fn adjoint_pointwise(&self) -> GridFunction {
        let k = self.k;
        let mut out = self.clone();
        for p in 0..self.len() {
            let src = self.block(p);
            let dst = out.block_mut(p);
            for i in 0..k {
                for j in 0..k {
                    dst[i * k + j] = src[j * k + i].conj();
                }
            }
        }
        out
    }

    /// Pointwise (undeformed) product `f(x) g(x)`.
    pub fn pointwise_mul(&self, other: &GridFunction) -> Result<GridFunction> {
        self.check_compatible(other)?;
        let k = self.k;
        let mut out = GridFunction::zeros(&self.grid, k, self.tag);
        for p in 0..self.len() {
            let (a, b) = (self.block(p), other.block(p));
            algebra::mul_add_into(k, a, b, out.block_mut(p));
        }
        Ok(out)
    }

    /// Multiply every value on the right by a fixed matrix.
    pub fn right_mul(&self, m: &MatrixElement) -> Result<GridFunction> {
        if m.k() != self.k {
            return Err(Error::AlgebraMismatch {
                expected: self.k,
                found: m.k(),
            });
        }
        let k = self.k;
        let mut out = GridFunction::zeros(&self.grid, k, self.tag);
        for p in 0..self.len() {
            algebra::mul_add_into(k, self.block(p), m.entries(), out.block_mut(p));
        }
        Ok(out)
    }

    /// Multiply every value on the left by a fixed matrix.
    pub fn left_mul(&self, m: &MatrixElement) -> Result<GridFunction> {
        if m.k() != self.k {
            return Err(Error::AlgebraMismatch {
                expected: self.k,
                found: m.k(),
            });
        }
        let k = self.k;
        let mut out = GridFunction::zeros(&self.grid, k, self.tag);
        for p in 0..self.len() {
            algebra::mul_add_into(k, m.entries(), self.block(p), out.block_mut(p));
        }
        Ok(out)
    }

    /// Multiply point `i` by the scalar `w[i]`.
    pub fn scale_pointwise(&self, w: &[Complex64]) -> GridFunction {
        assert_eq!(w.len(), self.len());
        let mut out = self.clone();
        let kk = self.k * self.k;
        for (p, &z) in w.iter().enumerate() {
            out.data[p * kk..(p + 1) * kk].iter_mut().for_each(|a| *a *= z);
        }
        out
    }

    /// Largest C*-norm over all points.
    pub fn sup_norm(&self) -> f64 {
        (0..self.len())
            .map(|p| self.value(p).cstar_norm())
            .fold(0.0, f64::max)
    }

    /// Largest entrywise modulus over all points.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

/// Sample a closure at every grid point.
pub fn sample<F>(grid: &TorusGrid, f: F) -> Result<GridFunction>
where
    F: Fn(&[f64]) -> MatrixElement,
{
    let mut values = Vec::with_capacity(grid.len());
    let mut k = None;
    for p in 0..grid.len() {
        let x = grid.point(p);
        let v = f(&x);
        if !v.is_finite() {
            return Err(Error::NonFinite {
                index: p,
                coords: x,
            });
        }
        match k {
            None => k = Some(v.k()),
            Some(k0) if k0 != v.k() => {
                return Err(Error::AlgebraMismatch {
                    expected: k0,
                    found: v.k(),
                })
            }
            _ => {}
        }
        values.push(v);
    }
    GridFunction::from_values(grid, &values, SpaceTag::Position)
}

/// `C`-valued pairing `<f, g> = cell * sum f(x)^* g(x)`, conjugate-linear in `f`.
///
/// Both arguments must live in the same space; the quadrature weight is that
/// space's cell measure, which makes the Fourier transform exactly unitary.
pub fn inner_product(f: &GridFunction, g: &GridFunction) -> Result<MatrixElement> {
    f.check_compatible(g)?;
    let k = f.k;
    let mut acc = vec![Complex64::new(0.0, 0.0); k * k];
    for p in 0..f.len() {
        algebra::adjoint_mul_add_into(k, f.block(p), g.block(p), &mut acc);
    }
    let w = f.grid.cell_measure(f.tag);
    acc.iter_mut().for_each(|z| *z *= w);
    MatrixElement::new(k, acc)
}

/// Module norm `|| <f, f> ||_C^{1/2}`.
pub fn norm_e(f: &GridFunction) -> f64 {
    inner_product(f, f)
        .expect("a function is always compatible with itself")
        .cstar_norm()
        .sqrt()
}

/// `( cell * sum ||f(x)||_C^2 )^{1/2}`.
pub fn norm_l2(f: &GridFunction) -> f64 {
    let sum: f64 = (0..f.len())
        .map(|p| {
            let n = f.value(p).cstar_norm();
            n * n
        })
        .sum();
    (f.grid.cell_measure(f.tag) * sum).sqrt()
}

/// Hilbert-Schmidt norm `( cell * sum tr f(x)^* f(x) )^{1/2}`; the Euclidean
/// norm of the coordinate vector used by dense operators.
pub fn norm_hs(f: &GridFunction) -> f64 {
    let sum: f64 = f.data.iter().map(|z| z.norm_sqr()).sum();
    (f.grid.cell_measure(f.tag) * sum).sqrt()
}
