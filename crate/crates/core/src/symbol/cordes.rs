//! The pairing `S(A)(x, xi) = (2 pi)^{n/2} <u 1_C, ((D[ad(-x,-xi) A] o F^{-1}) (x) I) v 1_C>`
//! with `D = prod_j (1 + d_{x_j})^2 (1 + d_{xi_j})^2` and product probes
//! `u = u1 (x) u2`, `v = v1 (x) v2` on phase space, so that the tensor factor
//! reduces to `<u1, B F^{-1} v1> <u2, v2>`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::algebra::MatrixElement;
use crate::deform::{
    ad_u, dense_spectral_norm, derivation_direction, generator_unit, negligible_modes, GridOperator, OperatorKind,
    FIRST_DERIVATIVE, FIRST_DERIVATIVE_DENOM, SECOND_DERIVATIVE,
};
use crate::error::{Error, Result};
use crate::fourier::fourier_inv;
use crate::grid::{inner_product, norm_hs, GridFunction, SkewForm, SpaceTag, TorusGrid};
use crate::mollifier::MollifierFamily;

/// A scalar product function `first (x) second` on phase space. `first` is the
/// factor the braced operator sees; for the right-hand probe it lives on the
/// frequency lattice because it is fed through `F^{-1}`.
#[derive(Clone, Debug)]
pub struct ProductProbe {
    pub first: GridFunction,
    pub second: GridFunction,
}

impl ProductProbe {
    pub fn new(first: GridFunction, second: GridFunction) -> Result<Self> {
        if first.k() != 1 || second.k() != 1 {
            return Err(Error::InvalidArgument("phase-space probes are scalar".into()));
        }
        first.grid().check_same(second.grid())?;
        Ok(ProductProbe { first, second })
    }

    /// Unit-norm Gaussians of widths `sigma_first`, `sigma_second`; the first
    /// factor is sampled in `first_space`.
    pub fn gaussian(grid: &TorusGrid, sigma_first: f64, sigma_second: f64, first_space: SpaceTag) -> Self {
        let make = |sigma: f64, tag: SpaceTag| {
            let data: Vec<Complex64> = (0..grid.len())
                .map(|c| {
                    let p = match tag {
                        SpaceTag::Position => grid.point(c),
                        SpaceTag::Frequency => grid.frequency(c),
                    };
                    let r2: f64 = p.iter().map(|v| v * v).sum();
                    Complex64::new((-r2 / (2.0 * sigma * sigma)).exp(), 0.0)
                })
                .collect();
            let f = GridFunction::from_raw(grid, 1, tag, data).expect("sizes match");
            let n = norm_hs(&f);
            f.scale(Complex64::new(1.0 / n, 0.0))
        };
        ProductProbe {
            first: make(sigma_first, first_space),
            second: make(sigma_second, SpaceTag::Position),
        }
    }

    /// `L^2` norm on phase space.
    pub fn norm(&self) -> f64 {
        norm_hs(&self.first) * norm_hs(&self.second)
    }
}

/// Weights of `(1 - d/dp)^2` on the five-point offsets `-2..=2` with step `s`.
fn factor_weights(s: f64) -> [f64; 5] {
    let mut w = [0.0; 5];
    for t in 0..5 {
        let id = if t == 2 { 1.0 } else { 0.0 };
        w[t] = id - 2.0 * FIRST_DERIVATIVE[t] / (FIRST_DERIVATIVE_DENOM * s)
            + SECOND_DERIVATIVE[t] / (FIRST_DERIVATIVE_DENOM * s * s);
    }
    w
}

fn lattice_point(grid: &TorusGrid, x: usize, xi: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if x >= grid.len() || xi >= grid.len() {
        return Err(Error::InvalidArgument("phase-space point out of range".into()));
    }
    Ok((grid.point(x), grid.frequency(xi)))
}

/// `D[ad(-x, -xi) A]` for lattice `(x, xi)` given as flat indices.
pub(crate) fn braced_operator(op: &GridOperator, x: usize, xi: usize) -> Result<GridOperator> {
    let grid = op.grid();
    let dim = grid.dim();
    let (xv, xiv) = lattice_point(grid, x, xi)?;
    if let OperatorKind::Combination(parts) = op.kind() {
        // the braced map is linear, so it distributes over sums
        let terms = parts
            .iter()
            .map(|(z, part)| Ok((*z, braced_operator(part, x, xi)?)))
            .collect::<Result<_>>()?;
        return GridOperator::combination(grid, op.k(), terms);
    }
    if let OperatorKind::LeftMult(m) = op.kind() {
        // ad(-x, -xi) L_phi = L_{phi(. + x - J xi / 2pi)} and each derivation is d_v
        let jxi = m.form.apply(&xiv);
        let shift: Vec<f64> = (0..dim).map(|a| xv[a] - jxi[a] / (2.0 * PI)).collect();
        let dirs: Vec<Vec<f64>> = (1..=2 * dim)
            .map(|i| derivation_direction(&m.form, i))
            .collect::<Result<_>>()?;
        // the weights grow polynomially in xi and would lift roundoff modes
        // out of the support
        let skip = negligible_modes(&m.spectrum);
        let weights: Vec<Complex64> = (0..grid.len())
            .map(|c| {
                if skip[c] {
                    return Complex64::new(0.0, 0.0);
                }
                let w = grid.frequency(c);
                let phase: f64 = w.iter().zip(&shift).map(|(a, b)| a * b).sum();
                dirs.iter().fold(Complex64::from_polar(1.0, phase), |acc, v| {
                    let s: f64 = v.iter().zip(&w).map(|(a, b)| a * b).sum();
                    let f = Complex64::new(1.0, s);
                    acc * f * f
                })
            })
            .collect();
        return GridOperator::left_mult_spectral(m.spectrum.scale_pointwise(&weights), &m.form);
    }
    let units: Vec<f64> = (1..=2 * dim)
        .map(|i| generator_unit(grid, i))
        .collect::<Result<_>>()?;
    let factors: Vec<[f64; 5]> = units.iter().map(|&s| factor_weights(s)).collect();
    let base: Vec<f64> = xv.iter().chain(&xiv).map(|v| -v).collect();
    let count = 5usize.pow(2 * dim as u32);
    let mut terms = Vec::with_capacity(count);
    for code in 0..count {
        let mut rest = code;
        let mut weight = 1.0;
        let mut p = base.clone();
        for k in 0..2 * dim {
            let t = rest % 5;
            rest /= 5;
            weight *= factors[k][t];
            p[k] += (t as f64 - 2.0) * units[k];
        }
        if weight == 0.0 {
            continue;
        }
        terms.push((Complex64::new(weight, 0.0), ad_u(&p[..dim], &p[dim..], op)?));
    }
    GridOperator::combination(grid, op.k(), terms)
}

/// `S(A)(x, xi)` for flat lattice indices `x` (position) and `xi` (frequency).
pub fn cordes_pairing(
    op: &GridOperator,
    u: &ProductProbe,
    v: &ProductProbe,
    x: usize,
    xi: usize,
) -> Result<MatrixElement> {
    let grid = op.grid();
    for f in [&u.first, &u.second, &v.first, &v.second] {
        f.grid().check_same(grid)?;
    }
    u.first.expect_tag(SpaceTag::Position)?;
    v.first.expect_tag(SpaceTag::Frequency)?;
    let braced = braced_operator(op, x, xi)?;
    let input = fourier_inv(&v.first)?;
    let input = GridFunction::from_scalar(grid, op.k(), SpaceTag::Position, input.data());
    let image = braced.apply(&input)?;
    let u1 = GridFunction::from_scalar(grid, op.k(), SpaceTag::Position, u.first.data());
    let left = inner_product(&u1, &image)?;
    let right = inner_product(&u.second, &v.second)?.get(0, 0);
    let c = (2.0 * PI).powf(grid.dim() as f64 / 2.0);
    Ok(left.scale(right * c))
}

/// `(2 pi)^{n/2} ||u|| ||D[ad(-x,-xi) A]|| ||v||` with the operator norm taken
/// exactly from the dense materialization.
pub fn cordes_bound(op: &GridOperator, u: &ProductProbe, v: &ProductProbe, x: usize, xi: usize) -> Result<f64> {
    let norm = dense_spectral_norm(&braced_operator(op, x, xi)?)?;
    Ok((2.0 * PI).powf(op.grid().dim() as f64 / 2.0) * u.norm() * norm * v.norm())
}

/// One row of the pairing convergence report.
#[derive(Clone, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct CordesRow {
    pub m: usize,
    /// Max over the sample of `||S(A o L_{e_m}) - S(A)||`.
    pub residual: f64,
    /// Max over the sample of `||S(A o L_{e_m})||`.
    pub magnitude: f64,
}

/// The pairing analogue of the symbol convergence table.
pub fn cordes_symbol_convergence(
    op: &GridOperator,
    family: &MollifierFamily,
    u: &ProductProbe,
    v: &ProductProbe,
    sample: &[(usize, usize)],
    m_list: &[usize],
    form: &SkewForm,
) -> Result<Vec<CordesRow>> {
    let reference: Vec<MatrixElement> = sample
        .iter()
        .map(|&(x, xi)| cordes_pairing(op, u, v, x, xi))
        .collect::<Result<_>>()?;
    m_list
        .iter()
        .map(|&m| {
            let composed = op.then_after(&family.left_mult(m, op.k(), form)?)?;
            let mut residual = 0.0f64;
            let mut magnitude = 0.0f64;
            for (&(x, xi), r) in sample.iter().zip(&reference) {
                let s = cordes_pairing(&composed, u, v, x, xi)?;
                residual = residual.max((&s - r).cstar_norm());
                magnitude = magnitude.max(s.cstar_norm());
            }
            Ok(CordesRow { m, residual, magnitude })
        })
        .collect()
}
