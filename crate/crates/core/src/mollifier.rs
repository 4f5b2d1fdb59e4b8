//! Bump functions on the frequency lattice and the approximate identity
//! `e_m = (2 pi)^{n/2} F^{-1}(psi_m) 1_C`.

use std::f64::consts::PI;
use std::fmt::Write as _;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::MatrixElement;
use crate::deform::{derivation_direction, GridOperator};
use crate::error::{Error, Result};
use crate::fourier::fourier_inv;
use crate::grid::{norm_e, norm_l2, GridFunction, SkewForm, SpaceTag, TorusGrid};

/// `exp(-1 / (1 - r^2))` for `r < 1`, zero otherwise.
pub fn bump(r2: f64) -> f64 {
    if r2 < 1.0 {
        (-1.0 / (1.0 - r2)).exp()
    } else {
        0.0
    }
}

/// The family `psi_m(xi) = m^n psi(m xi)` sampled on the frequency lattice of
/// a grid and renormalized to unit discrete mass.
#[derive(Clone, Debug)]
pub struct MollifierFamily {
    grid: TorusGrid,
}

impl MollifierFamily {
    pub fn new(grid: &TorusGrid) -> Self {
        MollifierFamily { grid: grid.clone() }
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    /// Largest `m` whose support ball `B(0, 1/m)` still holds three lattice
    /// modes per axis, i.e. `m dxi < 1`. Zero if none is admissible.
    pub fn max_admissible(&self) -> usize {
        let r = 1.0 / self.grid.frequency_spacing();
        let m = r.ceil() as usize;
        m.saturating_sub(1)
    }

    pub fn check_admissible(&self, m: usize) -> Result<()> {
        let max = self.max_admissible();
        if m == 0 || m > max {
            return Err(Error::InadmissibleMollifier { m, max });
        }
        Ok(())
    }

    /// All admissible indices `1..=max`.
    pub fn admissible_range(&self) -> Vec<usize> {
        (1..=self.max_admissible()).collect()
    }

    /// `psi_m` as a scalar frequency-space function with `dxi^n sum psi_m = 1`.
    pub fn psi(&self, m: usize) -> Result<GridFunction> {
        self.check_admissible(m)?;
        let grid = &self.grid;
        let mf = m as f64;
        let scale = mf.powi(grid.dim() as i32);
        let mut values: Vec<f64> = (0..grid.len())
            .map(|c| {
                let xi = grid.frequency(c);
                let r2: f64 = xi.iter().map(|v| (mf * v) * (mf * v)).sum();
                scale * bump(r2)
            })
            .collect();
        let mass: f64 = grid.cell_measure(SpaceTag::Frequency) * values.iter().sum::<f64>();
        values.iter_mut().for_each(|v| *v /= mass);
        let data = values.into_iter().map(|v| Complex64::new(v, 0.0)).collect();
        GridFunction::from_raw(grid, 1, SpaceTag::Frequency, data)
    }

    /// Spectrum of `e_m 1_C`: `(2 pi)^{n/2} psi_m 1_C`.
    pub fn e_m_spectrum(&self, m: usize, k: usize) -> Result<GridFunction> {
        let psi = self.psi(m)?;
        let c = (2.0 * PI).powf(self.grid.dim() as f64 / 2.0);
        let weights: Vec<Complex64> = psi.data().iter().map(|z| z * c).collect();
        let one = GridFunction::constant(&self.grid, &MatrixElement::identity(k), SpaceTag::Frequency);
        Ok(one.scale_pointwise(&weights))
    }

    /// `L_{e_m}` built directly from its spectrum.
    pub fn left_mult(&self, m: usize, k: usize, form: &SkewForm) -> Result<GridOperator> {
        GridOperator::left_mult_spectral(self.e_m_spectrum(m, k)?, form)
    }
}

/// `e_m 1_C` in position space.
pub fn make_e_m(family: &MollifierFamily, m: usize, k: usize) -> Result<GridFunction> {
    fourier_inv(&family.e_m_spectrum(m, k)?)
}

/// A constant-coefficient polynomial in the `2n` derivations, as a list of
/// `(coefficient, multi-index)` monomials.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct DiffPolynomial {
    pub terms: Vec<(Complex64, Vec<usize>)>,
}

impl DiffPolynomial {
    pub fn new(terms: Vec<(Complex64, Vec<usize>)>) -> Self {
        DiffPolynomial { terms }
    }

    /// The single monomial `d_index^power`.
    pub fn monomial(dim: usize, index: usize, power: usize) -> Result<Self> {
        if index == 0 || index > 2 * dim {
            return Err(Error::DerivationIndex { index, max: 2 * dim });
        }
        let mut beta = vec![0; 2 * dim];
        beta[index - 1] = power;
        Ok(DiffPolynomial::new(vec![(Complex64::new(1.0, 0.0), beta)]))
    }

    fn validate(&self, dim: usize) -> Result<()> {
        for (c, beta) in &self.terms {
            if beta.len() != 2 * dim {
                return Err(Error::InvalidArgument(format!(
                    "multi-index {beta:?} needs {} entries",
                    2 * dim
                )));
            }
            if *c != Complex64::new(0.0, 0.0) && beta.iter().all(|&b| b == 0) {
                return Err(Error::ZeroOrderTerm);
            }
        }
        Ok(())
    }

    /// Spectral multiplier of the polynomial acting on left multiplications:
    /// `sum c_beta prod_k (i <v_k, xi>)^{beta_k}`.
    fn multiplier(&self, grid: &TorusGrid, form: &SkewForm) -> Result<Vec<Complex64>> {
        let dim = grid.dim();
        let dirs: Vec<Vec<f64>> = (1..=2 * dim)
            .map(|i| derivation_direction(form, i))
            .collect::<Result<_>>()?;
        Ok((0..grid.len())
            .map(|c| {
                let xi = grid.frequency(c);
                let factors: Vec<Complex64> = dirs
                    .iter()
                    .map(|v| Complex64::new(0.0, v.iter().zip(&xi).map(|(a, b)| a * b).sum()))
                    .collect();
                self.terms
                    .iter()
                    .map(|(coef, beta)| {
                        beta.iter()
                            .zip(&factors)
                            .fold(*coef, |acc, (&p, f)| acc * f.powi(p as i32))
                    })
                    .sum()
            })
            .collect())
    }
}

/// One row of a convergence table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub m: usize,
    pub residual: f64,
    pub points: usize,
}

/// `||L_{e_m}(g) - g||_E` for each `m`.
pub fn approx_identity_test(
    g: &GridFunction,
    family: &MollifierFamily,
    m_list: &[usize],
    form: &SkewForm,
) -> Result<Vec<ConvergenceRow>> {
    g.expect_tag(SpaceTag::Position)?;
    g.grid().check_same(family.grid())?;
    for &m in m_list {
        family.check_admissible(m)?;
    }
    m_list
        .par_iter()
        .map(|&m| {
            let image = family.left_mult(m, g.k(), form)?.apply(g)?;
            Ok(ConvergenceRow {
                m,
                residual: norm_e(&image.sub(g)?),
                points: family.grid().points(),
            })
        })
        .collect()
}

/// `||D0(L_{e_m})(g)||_{L^2}` for each `m`, using the exact rule
/// `d^beta L_{e_m} = L_{d_v^beta e_m}`.
pub fn derivation_decay_test(
    d0: &DiffPolynomial,
    g: &GridFunction,
    family: &MollifierFamily,
    m_list: &[usize],
    form: &SkewForm,
) -> Result<Vec<ConvergenceRow>> {
    g.expect_tag(SpaceTag::Position)?;
    let grid = family.grid();
    g.grid().check_same(grid)?;
    d0.validate(grid.dim())?;
    for &m in m_list {
        family.check_admissible(m)?;
    }
    let weights = d0.multiplier(grid, form)?;
    m_list
        .par_iter()
        .map(|&m| {
            let spectrum = family.e_m_spectrum(m, g.k())?.scale_pointwise(&weights);
            let op = GridOperator::left_mult_spectral(spectrum, form)?;
            Ok(ConvergenceRow {
                m,
                residual: norm_l2(&op.apply(g)?),
                points: grid.points(),
            })
        })
        .collect()
}

/// True when each residual is at most the previous one plus `slack`.
pub fn is_non_increasing(rows: &[ConvergenceRow], slack: f64) -> bool {
    rows.windows(2).all(|w| w[1].residual <= w[0].residual + slack)
}

/// `m,residual,N` table.
pub fn convergence_csv(rows: &[ConvergenceRow]) -> String {
    let mut out = String::from("m,residual,N\n");
    for r in rows {
        writeln!(out, "{},{:.17e},{}", r.m, r.residual, r.points).expect("writing to a String");
    }
    out
}

/// Number of frequency modes where the spectrum of `e_m` is nonzero.
pub fn support_size(family: &MollifierFamily, m: usize) -> Result<usize> {
    let psi = family.psi(m)?;
    Ok(psi.data().iter().filter(|z| z.re != 0.0).count())
}

/// Labels of the modes strictly inside `B(0, 1/m)` along one axis.
pub fn axis_modes_inside(grid: &TorusGrid, m: usize) -> usize {
    let d = grid.frequency_spacing();
    let n = grid.points() as i64;
    (-(n / 2)..n / 2).filter(|&l| (l as f64 * d * m as f64).abs() < 1.0).count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fourier::fourier;

    fn family() -> MollifierFamily {
        MollifierFamily::new(&TorusGrid::new(1, 64, 2.0 * PI * 8.0).unwrap())
    }

    #[test]
    fn admissible_range_keeps_three_modes_per_axis() {
        for (n, l) in [(64usize, 2.0 * PI * 8.0), (32, 25.0), (128, 2.0 * PI * 16.0 + 0.3)] {
            let grid = TorusGrid::new(1, n, l).unwrap();
            let fam = MollifierFamily::new(&grid);
            let max = fam.max_admissible();
            assert!(max >= 1);
            assert!(axis_modes_inside(&grid, max) >= 3);
            assert!(axis_modes_inside(&grid, max + 1) < 3);
            assert!(fam.psi(max + 1).is_err());
        }
        assert_eq!(family().max_admissible(), 7);
    }

    #[test]
    fn psi_has_unit_mass_and_shrinking_support() {
        let fam = family();
        let grid = fam.grid().clone();
        let mut last = usize::MAX;
        for m in fam.admissible_range() {
            let psi = fam.psi(m).unwrap();
            let mass: f64 = grid.cell_measure(SpaceTag::Frequency) * psi.data().iter().map(|z| z.re).sum::<f64>();
            assert!((mass - 1.0).abs() < 1e-12);
            for c in 0..grid.len() {
                let xi = grid.frequency(c)[0];
                if xi.abs() >= 1.0 / m as f64 {
                    assert_eq!(psi.data()[c], Complex64::new(0.0, 0.0));
                } else {
                    assert!(psi.data()[c].re > 0.0);
                }
            }
            let s = support_size(&fam, m).unwrap();
            assert!(s <= last);
            last = s;
        }
    }

    #[test]
    fn e_m_roundtrips_to_its_spectrum() {
        let fam = family();
        for m in [1, 3, 7] {
            let e = make_e_m(&fam, m, 2).unwrap();
            let back = fourier(&e).unwrap();
            let expected = fam.e_m_spectrum(m, 2).unwrap();
            assert!(norm_e(&back.sub(&expected).unwrap()) < 1e-12 * norm_e(&expected));
        }
    }

    #[test]
    fn zero_order_term_rejected() {
        let fam = family();
        let g = GridFunction::zeros(fam.grid(), 1, SpaceTag::Position);
        let p = DiffPolynomial::new(vec![(Complex64::new(2.0, 0.0), vec![0, 0])]);
        let err = derivation_decay_test(&p, &g, &fam, &[1], &SkewForm::zero(1)).unwrap_err();
        assert!(matches!(err, Error::ZeroOrderTerm));
    }

    #[test]
    fn zero_inputs_give_zero_residuals() {
        let fam = family();
        let g = GridFunction::zeros(fam.grid(), 2, SpaceTag::Position);
        let rows = approx_identity_test(&g, &fam, &fam.admissible_range(), &SkewForm::zero(1)).unwrap();
        assert!(rows.iter().all(|r| r.residual == 0.0));
        let rows = derivation_decay_test(
            &DiffPolynomial::default(),
            &crate::ensemble::gaussian(fam.grid(), 2.0, &[0.0], &MatrixElement::identity(1)),
            &fam,
            &[1, 2],
            &SkewForm::zero(1),
        )
        .unwrap();
        assert!(rows.iter().all(|r| r.residual == 0.0));
    }

    #[test]
    fn inadmissible_m_rejected() {
        let fam = family();
        let g = GridFunction::zeros(fam.grid(), 1, SpaceTag::Position);
        assert!(matches!(
            approx_identity_test(&g, &fam, &[0], &SkewForm::zero(1)),
            Err(Error::InadmissibleMollifier { .. })
        ));
        assert!(matches!(
            approx_identity_test(&g, &fam, &[8], &SkewForm::zero(1)),
            Err(Error::InadmissibleMollifier { m: 8, max: 7 })
        ));
    }

    #[test]
    fn csv_has_header_and_rows() {
        let rows = vec![
            ConvergenceRow { m: 1, residual: 0.5, points: 64 },
            ConvergenceRow { m: 2, residual: 0.25, points: 64 },
        ];
        let csv = convergence_csv(&rows);
        assert_eq!(csv.lines().count(), 3);
        assert!(csv.starts_with("m,residual,N\n1,5.00000000000000000e-1,64"));
        assert!(is_non_increasing(&rows, 0.0));
    }
}
