//! Schwartz-seminorm diagnostics `p_{alpha,beta}` and `q_{N1,N2}`.

use log::warn;
use num_complex::Complex64;

use super::{norm_e, GridFunction, SpaceTag};
use crate::error::{Error, Result};
use crate::fourier::{fourier, high_band_energy_fraction, spectral_derivative};

/// Largest derivative order accepted per axis.
pub const DEFAULT_MAX_DERIVATIVE_ORDER: usize = 4;

/// Spectral energy fraction above `N/3` that makes derivatives unreliable.
pub const ALIASING_THRESHOLD: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Seminorm {
    pub value: f64,
    /// Energy fraction of `f` in the top third of the spectrum.
    pub high_band_energy: f64,
}

impl Seminorm {
    /// False when the top third of the spectrum carries more than
    /// [`ALIASING_THRESHOLD`] of the energy.
    pub fn is_reliable(&self) -> bool {
        self.high_band_energy <= ALIASING_THRESHOLD
    }
}

/// `sup_x || x^alpha d^beta f(x) ||_C` over the grid.
pub fn seminorm_p(f: &GridFunction, alpha: &[usize], beta: &[usize]) -> Result<Seminorm> {
    let high = check_inputs(f, alpha, beta)?;
    let weighted = moment_derivative(f, alpha, beta)?;
    Ok(Seminorm {
        value: weighted.sup_norm(),
        high_band_energy: high,
    })
}

/// `( sum_{|alpha| <= n1, |beta| <= n2} || x^alpha d^beta f ||_2^2 )^{1/2}`.
pub fn seminorm_q(f: &GridFunction, n1: usize, n2: usize) -> Result<Seminorm> {
    let dim = f.grid().dim();
    let alphas = multi_indices(dim, n1);
    let betas = multi_indices(dim, n2);
    let high = check_inputs(f, &vec![0; dim], &betas.last().cloned().unwrap_or_default())?;
    let mut sum = 0.0;
    for beta in &betas {
        let derivative = spectral_derivative(f, beta)?;
        for alpha in &alphas {
            let n = norm_e(&monomial_weight(&derivative, alpha));
            sum += n * n;
        }
    }
    Ok(Seminorm {
        value: sum.sqrt(),
        high_band_energy: high,
    })
}

/// All multi-indices in `dim` variables with total order at most `order`,
/// in graded lexicographic order.
pub fn multi_indices(dim: usize, order: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for total in 0..=order {
        let mut current = vec![0usize; dim];
        push_compositions(&mut out, &mut current, 0, total);
    }
    out
}

fn push_compositions(out: &mut Vec<Vec<usize>>, current: &mut Vec<usize>, axis: usize, rest: usize) {
    if axis + 1 == current.len() {
        current[axis] = rest;
        out.push(current.clone());
        return;
    }
    for v in (0..=rest).rev() {
        current[axis] = v;
        push_compositions(out, current, axis + 1, rest - v);
    }
}

fn check_inputs(f: &GridFunction, alpha: &[usize], beta: &[usize]) -> Result<f64> {
    f.expect_tag(SpaceTag::Position)?;
    let dim = f.grid().dim();
    if alpha.len() != dim || beta.len() != dim {
        return Err(Error::InvalidArgument(format!(
            "multi-indices must have {dim} components"
        )));
    }
    if let Some(b) = beta.iter().find(|&&b| b > DEFAULT_MAX_DERIVATIVE_ORDER) {
        return Err(Error::InvalidArgument(format!(
            "derivative order {b} exceeds the per-axis cap {DEFAULT_MAX_DERIVATIVE_ORDER}"
        )));
    }
    let high = high_band_energy_fraction(&fourier(f)?)?;
    if beta.iter().any(|&b| b > 0) && high > ALIASING_THRESHOLD {
        warn!("top third of the spectrum carries {high:.3e} of the energy; derivatives may alias");
    }
    Ok(high)
}

fn moment_derivative(f: &GridFunction, alpha: &[usize], beta: &[usize]) -> Result<GridFunction> {
    Ok(monomial_weight(&spectral_derivative(f, beta)?, alpha))
}

fn monomial_weight(f: &GridFunction, alpha: &[usize]) -> GridFunction {
    if alpha.iter().all(|&a| a == 0) {
        return f.clone();
    }
    let grid = f.grid();
    let w: Vec<Complex64> = (0..grid.len())
        .map(|p| {
            let x = grid.point(p);
            let v: f64 = x.iter().zip(alpha).map(|(xi, &a)| xi.powi(a as i32)).product();
            Complex64::new(v, 0.0)
        })
        .collect();
    f.scale_pointwise(&w)
}
