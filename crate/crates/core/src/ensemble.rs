//! Seeded random ensembles of test functions and operators.

use num_complex::Complex64;
use rand::Rng;

use crate::algebra::MatrixElement;
use crate::fourier::fourier_inv;
use crate::grid::{norm_e, GridFunction, SpaceTag, TorusGrid};

pub fn random_complex<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

pub fn random_matrix<R: Rng + ?Sized>(rng: &mut R, k: usize) -> MatrixElement {
    MatrixElement::from_fn(k, |_, _| random_complex(rng))
}

/// Random spectrum supported on modes with `|label| <= band` on every axis,
/// normalized to unit module norm.
pub fn random_spectrum<R: Rng + ?Sized>(
    rng: &mut R,
    grid: &TorusGrid,
    k: usize,
    band: usize,
) -> GridFunction {
    let band = band.min(grid.points() / 2 - 1) as i64;
    let mut out = GridFunction::zeros(grid, k, SpaceTag::Frequency);
    for c in 0..grid.len() {
        let labels = grid.labels(c);
        if labels[..grid.dim()].iter().all(|l| l.abs() <= band) {
            for z in out.block_mut(c) {
                *z = random_complex(rng);
            }
        }
    }
    let n = norm_e(&out);
    out.scale(Complex64::new(1.0 / n, 0.0))
}

/// Random trigonometric polynomial with frequencies `|label| <= band`, unit module norm.
pub fn random_band_limited<R: Rng + ?Sized>(
    rng: &mut R,
    grid: &TorusGrid,
    k: usize,
    band: usize,
) -> GridFunction {
    fourier_inv(&random_spectrum(rng, grid, k, band)).expect("spectrum is frequency-tagged")
}

/// Scalar-valued (`phi * 1_C`) random trigonometric polynomial.
pub fn random_scalar_band_limited<R: Rng + ?Sized>(
    rng: &mut R,
    grid: &TorusGrid,
    k: usize,
    band: usize,
) -> GridFunction {
    let phi = random_band_limited(rng, grid, 1, band);
    let values: Vec<Complex64> = phi.data().to_vec();
    GridFunction::from_scalar(grid, k, SpaceTag::Position, &values)
}

/// `exp(-|x - center|^2 / (2 sigma^2))` times a fixed matrix.
pub fn gaussian(grid: &TorusGrid, sigma: f64, center: &[f64], coefficient: &MatrixElement) -> GridFunction {
    let k = coefficient.k();
    let mut out = GridFunction::zeros(grid, k, SpaceTag::Position);
    for p in 0..grid.len() {
        let x = grid.point(p);
        let r2: f64 = x.iter().zip(center).map(|(a, b)| (a - b) * (a - b)).sum();
        let w = (-r2 / (2.0 * sigma * sigma)).exp();
        for (d, s) in out.block_mut(p).iter_mut().zip(coefficient.entries()) {
            *d = s * w;
        }
    }
    out
}

/// Probe pairs `(g, h)` of random trigonometric polynomials.
pub fn random_probes<R: Rng + ?Sized>(
    rng: &mut R,
    grid: &TorusGrid,
    k: usize,
    count: usize,
    band: usize,
) -> Vec<(GridFunction, GridFunction)> {
    (0..count)
        .map(|_| {
            let g = random_band_limited(rng, grid, k, band);
            let h = random_band_limited(rng, grid, k, band);
            (g, h)
        })
        .collect()
}
