//! Fourier transform with the angular convention
//!
//! ```text
//! F(g)(xi) = (2 pi)^{-n/2} \int e^{-i <s, xi>} g(s) ds
//! ```
//!
//! discretized on the centered torus grid. With `x = (i - N/2) h` and
//! `xi = j * 2 pi / L` the kernel factors as `(-1)^j e^{-2 pi i i j / N}`, so the
//! transform is an unnormalized FFT over the position index followed by an
//! index shift and a sign. Matrix-valued functions are transformed entrywise.
//!
//! The discrete inverse uses the frequency cell `(2 pi / L)^n` as quadrature
//! weight, which makes `fourier_inv(fourier(f)) = f` exact and turns the
//! transform into a unitary map between the position and frequency pairings.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::Result;
use crate::grid::{GridFunction, SpaceTag, TorusGrid, MAX_DIM};

/// `F(f)` on the frequency lattice.
pub fn fourier(f: &GridFunction) -> Result<GridFunction> {
    f.expect_tag(SpaceTag::Position)?;
    let grid = f.grid().clone();
    let k = f.k();
    let mut data = f.data().to_vec();
    transform_axes(&grid, k, &mut data, Direction::Forward);

    let scale = (2.0 * PI).powf(-(grid.dim() as f64) / 2.0) * grid.cell_measure(SpaceTag::Position);
    let kk = k * k;
    let mut out = vec![Complex64::new(0.0, 0.0); data.len()];
    for c in 0..grid.len() {
        let (src, sign) = shifted_index(&grid, c);
        let z = if sign { -scale } else { scale };
        for e in 0..kk {
            out[c * kk + e] = data[src * kk + e] * z;
        }
    }
    GridFunction::from_raw(&grid, k, SpaceTag::Frequency, out)
}

/// `F^{-1}(g)` back on the position grid.
pub fn fourier_inv(g: &GridFunction) -> Result<GridFunction> {
    g.expect_tag(SpaceTag::Frequency)?;
    let grid = g.grid().clone();
    let k = g.k();
    let kk = k * k;
    let mut data = vec![Complex64::new(0.0, 0.0); g.data().len()];
    for c in 0..grid.len() {
        let (dst, sign) = shifted_index(&grid, c);
        let src = g.block(c);
        for e in 0..kk {
            data[dst * kk + e] = if sign { -src[e] } else { src[e] };
        }
    }
    transform_axes(&grid, k, &mut data, Direction::Inverse);
    let scale = (2.0 * PI).powf(-(grid.dim() as f64) / 2.0) * grid.cell_measure(SpaceTag::Frequency);
    data.iter_mut().for_each(|z| *z *= scale);
    GridFunction::from_raw(&grid, k, SpaceTag::Position, data)
}

/// Convert to the requested representation, transforming only if needed.
pub fn to_space(f: GridFunction, tag: SpaceTag) -> Result<GridFunction> {
    match (f.tag(), tag) {
        (a, b) if a == b => Ok(f),
        (SpaceTag::Position, SpaceTag::Frequency) => fourier(&f),
        _ => fourier_inv(&f),
    }
}

/// Partial derivative `d^beta f` computed spectrally as `(i xi)^beta F(f)`.
///
/// The unpaired `-N/2` mode has no symmetric partner; odd derivatives drop it.
pub fn spectral_derivative(f: &GridFunction, beta: &[usize]) -> Result<GridFunction> {
    f.expect_tag(SpaceTag::Position)?;
    if beta.iter().all(|&b| b == 0) {
        return Ok(f.clone());
    }
    let fh = fourier(f)?;
    let grid = f.grid();
    let weights: Vec<Complex64> = (0..grid.len())
        .map(|c| derivative_symbol(grid, c, beta))
        .collect();
    fourier_inv(&fh.scale_pointwise(&weights))
}

/// `(i xi)^beta` at frequency mode `c`, with odd powers vanishing on the `-N/2` mode.
pub(crate) fn derivative_symbol(grid: &TorusGrid, c: usize, beta: &[usize]) -> Complex64 {
    let labels = grid.labels(c);
    let nyq = -((grid.points() / 2) as i64);
    let d = grid.frequency_spacing();
    let mut z = Complex64::new(1.0, 0.0);
    for (a, &b) in beta.iter().enumerate().take(grid.dim()) {
        if b == 0 {
            continue;
        }
        if labels[a] == nyq && b % 2 == 1 {
            return Complex64::new(0.0, 0.0);
        }
        z *= Complex64::new(0.0, labels[a] as f64 * d).powu(b as u32);
    }
    z
}

/// Evaluate the trigonometric interpolant of a function, given by its transform,
/// at an arbitrary point `y`: `(2 pi)^{-n/2} cell * sum_xi F(f)(xi) e^{i <xi, y>}`.
pub fn evaluate_at(spectrum: &GridFunction, y: &[f64]) -> Result<crate::MatrixElement> {
    spectrum.expect_tag(SpaceTag::Frequency)?;
    let grid = spectrum.grid();
    let k = spectrum.k();
    let scale = (2.0 * PI).powf(-(grid.dim() as f64) / 2.0) * grid.cell_measure(SpaceTag::Frequency);
    let mut acc = vec![Complex64::new(0.0, 0.0); k * k];
    for c in 0..grid.len() {
        if spectrum.is_zero_at(c) {
            continue;
        }
        let xi = grid.frequency(c);
        let phase: f64 = xi.iter().zip(y).map(|(a, b)| a * b).sum();
        let w = Complex64::from_polar(scale, phase);
        for (a, s) in acc.iter_mut().zip(spectrum.block(c)) {
            *a += w * s;
        }
    }
    crate::MatrixElement::new(k, acc)
}

/// Fraction of spectral energy carried by modes whose label exceeds `N/3` in
/// magnitude on some axis.
pub fn high_band_energy_fraction(spectrum: &GridFunction) -> Result<f64> {
    spectrum.expect_tag(SpaceTag::Frequency)?;
    let grid = spectrum.grid();
    let cutoff = grid.points() as f64 / 3.0;
    let (mut high, mut total) = (0.0, 0.0);
    for c in 0..grid.len() {
        let e: f64 = spectrum.block(c).iter().map(|z| z.norm_sqr()).sum();
        total += e;
        let labels = grid.labels(c);
        if labels[..grid.dim()].iter().any(|&l| (l as f64).abs() > cutoff) {
            high += e;
        }
    }
    Ok(if total > 0.0 { high / total } else { 0.0 })
}

/// Index of the unshifted FFT slot feeding centered mode `c`, and whether
/// `(-1)^{sum of labels}` is negative.
fn shifted_index(grid: &TorusGrid, c: usize) -> (usize, bool) {
    let n = grid.points();
    let idx = grid.axis_indices(c);
    let mut flat = 0usize;
    let mut parity = 0i64;
    for &i in &idx[..grid.dim()] {
        flat = flat * n + (i + n / 2) % n;
        parity += grid.label(i);
    }
    (flat, parity.rem_euclid(2) == 1)
}

#[derive(Clone, Copy)]
enum Direction {
    Forward,
    Inverse,
}

fn transform_axes(grid: &TorusGrid, k: usize, data: &mut [Complex64], dir: Direction) {
    let n = grid.points();
    let dim = grid.dim();
    let kk = k * k;
    let mut planner = FftPlanner::<f64>::new();
    let fft: Arc<dyn Fft<f64>> = match dir {
        Direction::Forward => planner.plan_fft_forward(n),
        Direction::Inverse => planner.plan_fft_inverse(n),
    };
    let mut line = vec![Complex64::new(0.0, 0.0); n];
    let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
    let total = grid.len();
    for axis in 0..dim {
        let stride = n.pow((dim - 1 - axis) as u32);
        // every flat index whose coordinate along `axis` is zero starts a line
        for start in 0..total {
            if (start / stride) % n != 0 {
                continue;
            }
            for e in 0..kk {
                for (t, slot) in line.iter_mut().enumerate() {
                    *slot = data[(start + t * stride) * kk + e];
                }
                fft.process_with_scratch(&mut line, &mut scratch);
                for (t, v) in line.iter().enumerate() {
                    data[(start + t * stride) * kk + e] = *v;
                }
            }
        }
    }
}

/// Flat index of the reflected mode `xi -> -xi`; the `-N/2` label is its own
/// mirror image.
pub fn reflected_index(grid: &TorusGrid, c: usize) -> usize {
    let labels = grid.labels(c);
    let mut neg = [0i64; MAX_DIM];
    for a in 0..grid.dim() {
        neg[a] = -labels[a];
    }
    grid.index_of_labels(&neg)
}
