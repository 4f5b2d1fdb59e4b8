//! The coefficient algebra `M_k(C)`.
//!
//! Every sampled function in this crate takes values in the unital C*-algebra of
//! `k x k` complex matrices. The C*-norm is the spectral norm (largest singular
//! value) and the involution is the conjugate transpose. `k = 1` is the scalar
//! algebra and is treated exactly like any other `k`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// A `k x k` complex matrix, stored row-major.
#[derive(Clone, PartialEq)]
pub struct MatrixElement {
    k: usize,
    entries: Vec<Complex64>,
}

impl MatrixElement {
    pub fn new(k: usize, entries: Vec<Complex64>) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidArgument("algebra dimension k must be >= 1".into()));
        }
        if entries.len() != k * k {
            return Err(Error::InvalidArgument(format!(
                "expected {} entries for k = {k}, got {}",
                k * k,
                entries.len()
            )));
        }
        Ok(Self { k, entries })
    }

    pub fn zero(k: usize) -> Self {
        assert!(k >= 1, "algebra dimension must be positive");
        Self {
            k,
            entries: vec![Complex64::new(0.0, 0.0); k * k],
        }
    }

    pub fn identity(k: usize) -> Self {
        Self::scalar(k, Complex64::new(1.0, 0.0))
    }

    /// `z * 1_C`.
    pub fn scalar(k: usize, z: Complex64) -> Self {
        let mut m = Self::zero(k);
        for i in 0..k {
            m.entries[i * k + i] = z;
        }
        m
    }

    pub fn from_fn(k: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        assert!(k >= 1, "algebra dimension must be positive");
        let mut entries = Vec::with_capacity(k * k);
        for i in 0..k {
            for j in 0..k {
                entries.push(f(i, j));
            }
        }
        Self { k, entries }
    }

    pub(crate) fn from_slice(k: usize, entries: &[Complex64]) -> Self {
        debug_assert_eq!(entries.len(), k * k);
        Self {
            k,
            entries: entries.to_vec(),
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.entries[i * self.k + j]
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let k = self.k;
        Self::from_fn(k, |i, j| self.entries[j * k + i].conj())
    }

    /// Spectral norm, i.e. the largest singular value.
    ///
    /// Computed from the largest eigenvalue of the Hermitian matrix `M* M`.
    pub fn cstar_norm(&self) -> f64 {
        if self.k == 1 {
            return self.entries[0].norm();
        }
        let gram = self.adjoint().mul(self);
        largest_hermitian_eigenvalue(&gram).max(0.0).sqrt()
    }

    pub fn scale(&self, z: Complex64) -> Self {
        Self {
            k: self.k,
            entries: self.entries.iter().map(|e| e * z).collect(),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.entries.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Largest entrywise modulus; cheap stand-in for closeness checks.
    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Whether this is `z * 1_C` for some complex `z`, up to `tol` entrywise.
    pub fn is_scalar(&self, tol: f64) -> bool {
        let k = self.k;
        let d = self.entries[0];
        (0..k).all(|i| {
            (0..k).all(|j| {
                let target = if i == j { d } else { Complex64::new(0.0, 0.0) };
                (self.entries[i * k + j] - target).norm() <= tol
            })
        })
    }

    fn check_same_k(&self, other: &Self) {
        assert_eq!(
            self.k, other.k,
            "matrix elements from different algebras (k = {} vs k = {})",
            self.k, other.k
        );
    }
}

/// Largest eigenvalue of a Hermitian matrix given as a [`MatrixElement`].
pub(crate) fn largest_hermitian_eigenvalue(m: &MatrixElement) -> f64 {
    let k = m.k;
    let dm = DMatrix::from_row_slice(k, k, &m.entries);
    // symmetrize to remove rounding asymmetry before the Hermitian solver
    let herm = (&dm + dm.adjoint()).scale(0.5);
    herm.symmetric_eigenvalues()
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max)
}

/// `out += a * b` on raw row-major `k x k` blocks.
#[inline]
pub(crate) fn mul_add_into(k: usize, a: &[Complex64], b: &[Complex64], out: &mut [Complex64]) {
    if k == 1 {
        out[0] += a[0] * b[0];
        return;
    }
    for i in 0..k {
        for l in 0..k {
            let ail = a[i * k + l];
            if ail.re == 0.0 && ail.im == 0.0 {
                continue;
            }
            let row = &b[l * k..(l + 1) * k];
            let dst = &mut out[i * k..(i + 1) * k];
            for (d, bv) in dst.iter_mut().zip(row) {
                *d += ail * bv;
            }
        }
    }
}

/// `out += z * a * b` on raw blocks.
#[inline]
pub(crate) fn scaled_mul_add_into(
    k: usize,
    z: Complex64,
    a: &[Complex64],
    b: &[Complex64],
    out: &mut [Complex64],
) {
    if k == 1 {
        out[0] += z * a[0] * b[0];
        return;
    }
    for i in 0..k {
        for l in 0..k {
            let ail = z * a[i * k + l];
            let row = &b[l * k..(l + 1) * k];
            let dst = &mut out[i * k..(i + 1) * k];
            for (d, bv) in dst.iter_mut().zip(row) {
                *d += ail * bv;
            }
        }
    }
}

/// `out += a^* b` on raw blocks.
#[inline]
pub(crate) fn adjoint_mul_add_into(
    k: usize,
    a: &[Complex64],
    b: &[Complex64],
    out: &mut [Complex64],
) {
    for i in 0..k {
        for l in 0..k {
            let ali = a[l * k + i].conj();
            let row = &b[l * k..(l + 1) * k];
            let dst = &mut out[i * k..(i + 1) * k];
            for (d, bv) in dst.iter_mut().zip(row) {
                *d += ali * bv;
            }
        }
    }
}

impl Add for &MatrixElement {
    type Output = MatrixElement;
    fn add(self, rhs: &MatrixElement) -> MatrixElement {
        self.check_same_k(rhs);
        MatrixElement {
            k: self.k,
            entries: self.entries.iter().zip(&rhs.entries).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &MatrixElement {
    type Output = MatrixElement;
    fn sub(self, rhs: &MatrixElement) -> MatrixElement {
        self.check_same_k(rhs);
        MatrixElement {
            k: self.k,
            entries: self.entries.iter().zip(&rhs.entries).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &MatrixElement {
    type Output = MatrixElement;
    fn mul(self, rhs: &MatrixElement) -> MatrixElement {
        self.check_same_k(rhs);
        let mut out = MatrixElement::zero(self.k);
        mul_add_into(self.k, &self.entries, &rhs.entries, &mut out.entries);
        out
    }
}

impl Neg for &MatrixElement {
    type Output = MatrixElement;
    fn neg(self) -> MatrixElement {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}

impl fmt::Debug for MatrixElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MatrixElement(k={}, [", self.k)?;
        for i in 0..self.k {
            if i > 0 {
                write!(f, "; ")?;
            }
            for j in 0..self.k {
                if j > 0 {
                    write!(f, ", ")?;
                }
                let z = self.get(i, j);
                write!(f, "{:.6}{:+.6}i", z.re, z.im)?;
            }
        }
        write!(f, "])")
    }
}
