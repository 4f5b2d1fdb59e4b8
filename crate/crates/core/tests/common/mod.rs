#![allow(dead_code)]

pub mod quadrature;

use num_complex::Complex64;
use rieffel_core::grid::{norm_e, sample, GridFunction, TorusGrid};
use rieffel_core::MatrixElement;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// `||a - b||_E / ||b||_E`, or the absolute gap when `b` vanishes.
pub fn rel(a: &GridFunction, b: &GridFunction) -> f64 {
    let d = norm_e(&a.sub(b).unwrap());
    let n = norm_e(b);
    if n == 0.0 {
        d
    } else {
        d / n
    }
}

/// `e^{i <xi, x>}` for the lattice frequency with the given labels, times `1_C`.
pub fn plane_wave(grid: &TorusGrid, labels: &[i64], k: usize) -> GridFunction {
    let d = grid.frequency_spacing();
    sample(grid, |x| {
        let t: f64 = x.iter().zip(labels).map(|(xv, &l)| xv * l as f64 * d).sum();
        MatrixElement::scalar(k, Complex64::from_polar(1.0, t))
    })
    .unwrap()
}
