//! The deformed product as a twisted convolution on the frequency lattice:
//!
//! ```text
//! F(f x_J g)(xi) = (2 pi)^{-n/2} dxi^n  sum_w  F(f)(w) F(g)(xi - w) e^{i <xi, J w> / (2 pi)}
//! ```
//!
//! with `xi - w` wrapped periodically. The phase is evaluated on the centered
//! labels of `xi` and `w`, so the off-lattice shift `J w / (2 pi)` never touches
//! position space. Modes at roundoff level are skipped, which makes products
//! with plane waves or compactly supported spectra cost `O(N^n)` per nonzero mode.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::algebra;
use crate::error::{Error, Result};
use crate::fourier::{fourier, fourier_inv, to_space};
use crate::grid::{GridFunction, SkewForm, SpaceTag, TorusGrid, MAX_DIM};

/// `f x_J g` for position-space inputs.
pub fn deformed_product(f: &GridFunction, g: &GridFunction, form: &SkewForm) -> Result<GridFunction> {
    f.expect_tag(SpaceTag::Position)?;
    f.check_compatible(g)?;
    check_form(f.grid(), form)?;
    let product = twisted_convolution(&fourier(f)?, &fourier(g)?, form)?;
    fourier_inv(&product)
}

/// Same product, taking and returning whichever representation the inputs use.
pub fn deformed_product_any(f: &GridFunction, g: &GridFunction, form: &SkewForm) -> Result<GridFunction> {
    let fh = to_space(f.clone(), SpaceTag::Frequency)?;
    let gh = to_space(g.clone(), SpaceTag::Frequency)?;
    twisted_convolution(&fh, &gh, form)
}

pub(crate) fn check_form(grid: &TorusGrid, form: &SkewForm) -> Result<()> {
    if form.dim() != grid.dim() {
        return Err(Error::InvalidArgument(format!(
            "skew form has dimension {} but the grid has dimension {}",
            form.dim(),
            grid.dim()
        )));
    }
    Ok(())
}

struct Support {
    index: Vec<usize>,
    labels: Vec<[i64; MAX_DIM]>,
}

// Modes below this fraction of the largest entry are roundoff from a
// transform of a band-limited function and are skipped.
const SUPPORT_CUTOFF: f64 = 4.0 * f64::EPSILON;

/// Squared cutoff, compared against squared moduli to avoid `hypot`.
fn cutoff_sqr(f: &GridFunction) -> f64 {
    let peak = f.data().iter().map(|z| z.norm_sqr()).fold(0.0, f64::max);
    SUPPORT_CUTOFF * SUPPORT_CUTOFF * peak
}

/// Per mode, whether every entry of the block is at roundoff level.
pub(crate) fn negligible_modes(f: &GridFunction) -> Vec<bool> {
    let kk = f.k() * f.k();
    let cut = cutoff_sqr(f);
    f.data().chunks(kk).map(|b| b.iter().all(|z| z.norm_sqr() <= cut)).collect()
}

fn support(f: &GridFunction) -> Support {
    let grid = f.grid();
    let kk = f.k() * f.k();
    let cut = cutoff_sqr(f);
    let index: Vec<usize> = (0..grid.len())
        .filter(|&c| f.data()[c * kk..(c + 1) * kk].iter().any(|z| z.norm_sqr() > cut))
        .collect();
    let labels = index.iter().map(|&c| grid.labels(c)).collect();
    Support { index, labels }
}

/// Twisted convolution of two spectra; returns the spectrum of `f x_J g`.
pub fn twisted_convolution(fh: &GridFunction, gh: &GridFunction, form: &SkewForm) -> Result<GridFunction> {
    fh.expect_tag(SpaceTag::Frequency)?;
    fh.check_compatible(gh)?;
    let grid = fh.grid().clone();
    check_form(&grid, form)?;
    let dim = grid.dim();
    let n = grid.points() as i64;
    let k = fh.k();
    let kk = k * k;
    let dxi = grid.frequency_spacing();
    let scale = (2.0 * PI).powf(-(dim as f64) / 2.0) * grid.cell_measure(SpaceTag::Frequency);
    let kappa = dxi * dxi / (2.0 * PI);
    let twisted = !form.is_zero();

    let f_support = support(fh);
    let g_support = support(gh);
    // iterate over the sparser factor
    let iterate_g = g_support.index.len() <= f_support.index.len();

    let phases = PhaseTables::new(&grid, form, kappa);

    let mut out = vec![Complex64::new(0.0, 0.0); grid.len() * kk];
    out.par_chunks_mut(kk).enumerate().for_each(|(c, acc)| {
        let xi = grid.labels(c);
        let phase = |w: &[i64; MAX_DIM]| -> Complex64 {
            if !twisted {
                return Complex64::new(scale, 0.0);
            }
            phases.at(&xi, w) * scale
        };
        let mut other = [0i64; MAX_DIM];
        if iterate_g {
            for (&vi, v) in g_support.index.iter().zip(&g_support.labels) {
                let wi = difference(&xi, v, dim, n, &mut other);
                algebra::scaled_mul_add_into(k, phase(&other), fh.block(wi), gh.block(vi), acc);
            }
        } else {
            for (&wi, w) in f_support.index.iter().zip(&f_support.labels) {
                let vi = difference(&xi, w, dim, n, &mut other);
                algebra::scaled_mul_add_into(k, phase(w), fh.block(wi), gh.block(vi), acc);
            }
        }
    });
    GridFunction::from_raw(&grid, k, SpaceTag::Frequency, out)
}

/// `e^{i kappa J_ab t}` for every nonzero entry of `J` and every integer
/// `t = xi_a w_b` the lattice can produce, so the twist costs a few complex
/// products per term instead of a `sin`/`cos` pair.
struct PhaseTables {
    entries: Vec<(usize, usize, Vec<Complex64>)>,
    offset: i64,
}

impl PhaseTables {
    fn new(grid: &TorusGrid, form: &SkewForm, kappa: f64) -> Self {
        let half = grid.points() as i64 / 2;
        let offset = half * half;
        let dim = grid.dim();
        let mut entries = Vec::new();
        for a in 0..dim {
            for b in 0..dim {
                let j = form.get(a, b);
                if j != 0.0 {
                    let table = (-offset..=offset).map(|t| Complex64::from_polar(1.0, kappa * j * t as f64)).collect();
                    entries.push((a, b, table));
                }
            }
        }
        PhaseTables { entries, offset }
    }

    #[inline]
    fn at(&self, xi: &[i64; MAX_DIM], w: &[i64; MAX_DIM]) -> Complex64 {
        self.entries
            .iter()
            .fold(Complex64::new(1.0, 0.0), |acc, (a, b, table)| {
                acc * table[(xi[*a] * w[*b] + self.offset) as usize]
            })
    }
}

/// Wrapped labels of `a - b` written into `out`; returns their flat index.
/// Both inputs lie in `[-N/2, N/2)`, so one correction per axis suffices.
#[inline]
fn difference(a: &[i64; MAX_DIM], b: &[i64; MAX_DIM], dim: usize, n: i64, out: &mut [i64; MAX_DIM]) -> usize {
    let half = n / 2;
    let mut index = 0i64;
    for axis in 0..dim {
        let mut l = a[axis] - b[axis];
        if l < -half {
            l += n;
        } else if l >= half {
            l -= n;
        }
        out[axis] = l;
        index = index * n + l + half;
    }
    index as usize
}
