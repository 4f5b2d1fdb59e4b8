//! Symbols of grid operators and the commutant test.
//!
//! On the discrete torus every operator `A` has an exact Kohn-Nirenberg
//! symbol `a(x, xi) = e^{-i <xi, x>} A(e_xi 1_C)(x)`, and
//! `A g (x) = (2 pi)^{-n/2} dxi^n sum_xi a(x, xi) F(g)(xi) e^{i <xi, x>}`.

mod commutant;
mod cordes;

use std::f64::consts::PI;
use std::fmt::Write as _;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::algebra::{self, MatrixElement};
use crate::deform::GridOperator;
use crate::error::{Error, Result};
use crate::fourier::to_space;
use crate::grid::{GridFunction, SkewForm, SpaceTag, TorusGrid};
use crate::mollifier::MollifierFamily;

pub use commutant::{commutant_residual, verify_conjecture, ConjectureReport, ProbeSet, Verdict, DEFAULT_TOLERANCE};
pub use cordes::{cordes_bound, cordes_pairing, cordes_symbol_convergence, CordesRow, ProductProbe};

/// A matrix-valued function on the discrete phase space, stored as columns
/// `x -> a(x, xi)` for a set of frequency modes `xi`. A complete symbol holds
/// every mode.
#[derive(Clone, Debug, PartialEq)]
pub struct PhaseSpaceFunction {
    grid: TorusGrid,
    k: usize,
    modes: Vec<usize>,
    columns: Vec<GridFunction>,
}

impl PhaseSpaceFunction {
    /// Columns must be position-space functions on `grid`; `modes` are flat
    /// frequency indices.
    pub fn new(grid: &TorusGrid, k: usize, modes: Vec<usize>, columns: Vec<GridFunction>) -> Result<Self> {
        if modes.len() != columns.len() {
            return Err(Error::InvalidArgument(format!(
                "{} modes for {} columns",
                modes.len(),
                columns.len()
            )));
        }
        for (m, col) in modes.iter().zip(&columns) {
            if *m >= grid.len() {
                return Err(Error::InvalidArgument(format!("mode index {m} out of range")));
            }
            col.grid().check_same(grid)?;
            col.expect_tag(SpaceTag::Position)?;
            if col.k() != k {
                return Err(Error::AlgebraMismatch {
                    expected: k,
                    found: col.k(),
                });
            }
        }
        Ok(PhaseSpaceFunction {
            grid: grid.clone(),
            k,
            modes,
            columns,
        })
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn modes(&self) -> &[usize] {
        &self.modes
    }

    pub fn is_complete(&self) -> bool {
        self.modes.len() == self.grid.len()
    }

    /// The column `x -> a(x, xi)` for the mode `xi`, if present.
    pub fn column(&self, mode: usize) -> Option<&GridFunction> {
        self.modes.iter().position(|&m| m == mode).map(|i| &self.columns[i])
    }

    /// `a(x, xi)` for flat position index `x` and frequency index `xi`.
    pub fn value(&self, x: usize, xi: usize) -> Option<MatrixElement> {
        self.column(xi).map(|c| c.value(x))
    }

    pub fn sub(&self, other: &PhaseSpaceFunction) -> Result<PhaseSpaceFunction> {
        self.grid.check_same(&other.grid)?;
        if self.modes != other.modes {
            return Err(Error::InvalidArgument("phase-space functions sample different modes".into()));
        }
        let columns = self
            .columns
            .iter()
            .zip(&other.columns)
            .map(|(a, b)| a.sub(b))
            .collect::<Result<_>>()?;
        PhaseSpaceFunction::new(&self.grid, self.k, self.modes.clone(), columns)
    }

    /// `x0.., xi0.., re_ij, im_ij` rows, one per stored phase-space point.
    pub fn to_csv(&self) -> String {
        let dim = self.grid.dim();
        let mut out = String::new();
        let mut header: Vec<String> = (0..dim).map(|a| format!("x{a}")).collect();
        header.extend((0..dim).map(|a| format!("xi{a}")));
        for i in 0..self.k {
            for j in 0..self.k {
                header.push(format!("re_{i}{j}"));
                header.push(format!("im_{i}{j}"));
            }
        }
        out.push_str(&header.join(","));
        out.push('\n');
        for (&mode, col) in self.modes.iter().zip(&self.columns) {
            let xi = self.grid.frequency(mode);
            for p in 0..self.grid.len() {
                let mut fields: Vec<String> = self.grid.point(p).iter().map(|v| format!("{v:.17e}")).collect();
                fields.extend(xi.iter().map(|v| format!("{v:.17e}")));
                for z in col.block(p) {
                    fields.push(format!("{:.17e}", z.re));
                    fields.push(format!("{:.17e}", z.im));
                }
                writeln!(out, "{}", fields.join(",")).expect("writing to a String");
            }
        }
        out
    }
}

/// Unit spectral mass at one mode: the spectrum of `e_xi 1_C` divided by the
/// transform constant, so that the probe's position samples are `e^{i<xi,x>}`.
fn plane_wave_probe(grid: &TorusGrid, k: usize, mode: usize) -> GridFunction {
    let n = grid.dim() as f64;
    let weight = (2.0 * PI).powf(n / 2.0) / grid.cell_measure(SpaceTag::Frequency);
    let mut probe = GridFunction::zeros(grid, k, SpaceTag::Frequency);
    let block = probe.block_mut(mode);
    for i in 0..k {
        block[i * k + i] = Complex64::new(weight, 0.0);
    }
    probe
}

/// Symbol columns of `op` at the given frequency modes.
pub fn extract_symbol_columns(op: &GridOperator, modes: &[usize]) -> Result<PhaseSpaceFunction> {
    let grid = op.grid();
    let k = op.k();
    let columns = modes
        .par_iter()
        .map(|&mode| {
            if mode >= grid.len() {
                return Err(Error::InvalidArgument(format!("mode index {mode} out of range")));
            }
            let image = to_space(op.act(&plane_wave_probe(grid, k, mode))?, SpaceTag::Position)?;
            // demodulate by e^{-i <xi, x>}
            let l = grid.labels(mode);
            let unit = 2.0 * PI / grid.points() as f64;
            let weights: Vec<Complex64> = (0..grid.len())
                .map(|p| {
                    let x = grid.labels(p);
                    let t: i64 = (0..grid.dim()).map(|a| l[a] * x[a]).sum();
                    Complex64::from_polar(1.0, -unit * t as f64)
                })
                .collect();
            Ok(image.scale_pointwise(&weights))
        })
        .collect::<Result<Vec<_>>>()?;
    PhaseSpaceFunction::new(grid, k, modes.to_vec(), columns)
}

/// The full symbol of `op`.
pub fn extract_symbol(op: &GridOperator) -> Result<PhaseSpaceFunction> {
    let modes: Vec<usize> = (0..op.grid().len()).collect();
    extract_symbol_columns(op, &modes)
}

/// The slice `x -> a(x, 0)`.
pub fn restrict(a: &PhaseSpaceFunction) -> Result<GridFunction> {
    let zero = a.grid.origin_index();
    a.column(zero)
        .cloned()
        .ok_or_else(|| Error::InvalidArgument("phase-space function has no xi = 0 column".into()))
}

/// `Op(a) g (x) = (2 pi)^{-n/2} dxi^n sum_xi a(x, xi) F(g)(xi) e^{i <xi, x>}`.
pub fn apply_symbol(a: &PhaseSpaceFunction, g: &GridFunction) -> Result<GridFunction> {
    if !a.is_complete() {
        return Err(Error::InvalidArgument("reconstruction needs a complete symbol".into()));
    }
    g.grid().check_same(&a.grid)?;
    let grid = &a.grid;
    let k = a.k;
    let gh = to_space(g.clone(), SpaceTag::Frequency)?;
    let scale = (2.0 * PI).powf(-(grid.dim() as f64) / 2.0) * grid.cell_measure(SpaceTag::Frequency);
    let unit = 2.0 * PI / grid.points() as f64;
    let mut out = vec![Complex64::new(0.0, 0.0); grid.len() * k * k];
    out.par_chunks_mut(k * k).enumerate().for_each(|(p, acc)| {
        let x = grid.labels(p);
        for (&mode, col) in a.modes.iter().zip(&a.columns) {
            if gh.block(mode).iter().all(|z| *z == Complex64::new(0.0, 0.0)) {
                continue;
            }
            let l = grid.labels(mode);
            let t: i64 = (0..grid.dim()).map(|d| l[d] * x[d]).sum();
            let z = Complex64::from_polar(scale, unit * t as f64);
            algebra::scaled_mul_add_into(k, z, col.block(p), gh.block(mode), acc);
        }
    });
    GridFunction::from_raw(grid, k, SpaceTag::Position, out)
}

/// One row of a symbol convergence table.
#[derive(Clone, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SymbolConvergenceRow {
    pub m: usize,
    /// Max over the sample of `||symbol(A o L_{e_m})(x, xi) - symbol(A)(x, xi)||`.
    pub residual: f64,
}

/// For each `m`, the largest deviation over the sample points `(x, xi)` (flat
/// position and frequency indices) between the symbols of `A o L_{e_m}` and `A`.
pub fn symbol_convergence_test(
    op: &GridOperator,
    family: &MollifierFamily,
    sample: &[(usize, usize)],
    m_list: &[usize],
    form: &SkewForm,
) -> Result<Vec<SymbolConvergenceRow>> {
    op.grid().check_same(family.grid())?;
    let mut modes: Vec<usize> = sample.iter().map(|&(_, xi)| xi).collect();
    modes.sort_unstable();
    modes.dedup();
    let reference = extract_symbol_columns(op, &modes)?;
    m_list
        .iter()
        .map(|&m| {
            let composed = op.then_after(&family.left_mult(m, op.k(), form)?)?;
            let sym = extract_symbol_columns(&composed, &modes)?;
            let residual = sample
                .iter()
                .map(|&(x, xi)| {
                    let a = sym.value(x, xi).expect("mode was extracted");
                    let b = reference.value(x, xi).expect("mode was extracted");
                    (&a - &b).cstar_norm()
                })
                .fold(0.0, f64::max);
            Ok(SymbolConvergenceRow { m, residual })
        })
        .collect()
}
