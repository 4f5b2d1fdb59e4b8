//! Conjugation by the Heisenberg action and the derivations it generates.
//!
//! The `k`-th derivation is `d/dt ad_U(-t e_k)(A)` at `t = 0`, where `e_k` runs
//! over translations (`k <= n`) and then modulations. With this sign
//! `ad_U(a, b)(L_phi) = L_{phi(. - a + J b / 2pi)}` gives `d_k L_phi = L_{d_v phi}`
//! with `v = f_k` for translations and `v = -J f_k / 2pi` for modulations.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::heisenberg::{snap, HeisenbergElement};
use super::operator::{GridOperator, OperatorKind};
use crate::error::{Error, Result};
use crate::grid::{GridFunction, SkewForm, SpaceTag, TorusGrid};

/// `U_{a,b,0} A U_{a,b,0}^{-1}` as a composition. The central phase cancels.
pub fn ad_u(a: &[f64], b: &[f64], op: &GridOperator) -> Result<GridOperator> {
    let e = HeisenbergElement::new(a.to_vec(), b.to_vec(), 0.0)?;
    let u = GridOperator::heisenberg(op.grid(), op.k(), e.clone())?;
    let u_inv = GridOperator::heisenberg(op.grid(), op.k(), e.inverse())?;
    GridOperator::compose(vec![u, op.clone(), u_inv])
}

/// Lattice unit along generator `index` (1-based): `h` for translations,
/// `2 pi / L` for modulations.
pub fn generator_unit(grid: &TorusGrid, index: usize) -> Result<f64> {
    let n = grid.dim();
    if index == 0 || index > 2 * n {
        return Err(Error::DerivationIndex { index, max: 2 * n });
    }
    Ok(if index <= n { grid.spacing() } else { grid.frequency_spacing() })
}

/// Displacement `(a, b)` for moving `t` along generator `index`.
fn displacement(dim: usize, index: usize, t: f64) -> (Vec<f64>, Vec<f64>) {
    let mut a = vec![0.0; dim];
    let mut b = vec![0.0; dim];
    if index <= dim {
        a[index - 1] = t;
    } else {
        b[index - 1 - dim] = t;
    }
    (a, b)
}

/// Five-point first-derivative stencil at offsets `-2..=2`: the symmetric
/// quotient at steps `s` and `2s` combined by one Richardson level.
pub(crate) const FIRST_DERIVATIVE: [f64; 5] = [1.0, -8.0, 0.0, 8.0, -1.0];
pub(crate) const FIRST_DERIVATIVE_DENOM: f64 = 12.0;
/// Second derivative on the same offsets, over `12 s^2`.
pub(crate) const SECOND_DERIVATIVE: [f64; 5] = [-1.0, 16.0, -30.0, 16.0, -1.0];

/// Numerical `d_index A` with lattice step `step`.
pub fn derivation(index: usize, op: &GridOperator, step: f64) -> Result<GridOperator> {
    let grid = op.grid();
    let unit = generator_unit(grid, index)?;
    if !(step > 0.0) || step < unit * (1.0 - 1e-9) {
        return Err(Error::StepBelowResolution { step, resolution: unit });
    }
    snap("derivation step", &[step], unit)?;
    let mut terms = Vec::with_capacity(4);
    for (j, w) in FIRST_DERIVATIVE.iter().enumerate() {
        if *w == 0.0 {
            continue;
        }
        let t = (j as f64 - 2.0) * step;
        let (a, b) = displacement(grid.dim(), index, -t);
        let coeff = Complex64::new(w / (FIRST_DERIVATIVE_DENOM * step), 0.0);
        terms.push((coeff, ad_u(&a, &b, op)?));
    }
    GridOperator::combination(grid, op.k(), terms)
}

/// Direction `v` with `d_index L_phi = L_{d_v phi}`.
pub fn derivation_direction(form: &SkewForm, index: usize) -> Result<Vec<f64>> {
    let n = form.dim();
    if index == 0 || index > 2 * n {
        return Err(Error::DerivationIndex { index, max: 2 * n });
    }
    let mut e = vec![0.0; n];
    if index <= n {
        e[index - 1] = 1.0;
        return Ok(e);
    }
    e[index - 1 - n] = 1.0;
    Ok(form.apply(&e).into_iter().map(|x| -x / (2.0 * PI)).collect())
}

/// Spectrum of `d_v f`. The `-N/2` mode has no symmetric partner and is dropped
/// along every axis where `v` is nonzero.
pub fn directional_derivative_spectrum(spectrum: &GridFunction, v: &[f64]) -> Result<GridFunction> {
    spectrum.expect_tag(SpaceTag::Frequency)?;
    let grid = spectrum.grid();
    let nyquist = -((grid.points() / 2) as i64);
    let d = grid.frequency_spacing();
    let weights: Vec<Complex64> = (0..grid.len())
        .map(|c| {
            let l = grid.labels(c);
            if (0..grid.dim()).any(|a| l[a] == nyquist && v[a] != 0.0) {
                return Complex64::new(0.0, 0.0);
            }
            let s: f64 = (0..grid.dim()).map(|a| v[a] * l[a] as f64 * d).sum();
            Complex64::new(0.0, s)
        })
        .collect();
    Ok(spectrum.scale_pointwise(&weights))
}

/// Exact `d_index L_phi = L_{d_v phi}` for a left multiplication.
pub fn left_mult_derivation(index: usize, op: &GridOperator) -> Result<GridOperator> {
    match op.kind() {
        OperatorKind::LeftMult(m) => {
            let v = derivation_direction(&m.form, index)?;
            GridOperator::left_mult_spectral(directional_derivative_spectrum(&m.spectrum, &v)?, &m.form)
        }
        _ => Err(Error::InvalidArgument(
            "exact derivation rule applies to left multiplications only".into(),
        )),
    }
}
