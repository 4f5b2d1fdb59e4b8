mod common;

use common::quadrature::{damped_product, damped_product_2d, oracle_product, Scalar, CASES};
use num_complex::Complex64;
use rieffel_core::deform::deformed_product;
use rieffel_core::grid::{GridFunction, SkewForm, SpaceTag, TorusGrid};

fn lift(grid: &TorusGrid, f: Scalar) -> GridFunction {
    let values: Vec<Complex64> = (0..grid.len()).map(|p| Complex64::new(f(grid.point(p)[0]), 0.0)).collect();
    GridFunction::from_scalar(grid, 1, SpaceTag::Position, &values)
}

#[test]
fn closed_form_and_full_quadrature_agree() {
    let (f, g) = CASES[1];
    for x in [-1.3, 0.0, 0.4, 2.2] {
        let eps = 0.1;
        let one = damped_product(f, g, x, eps, 3.0, 600);
        let two = damped_product_2d(f, g, &[x], eps, (3.0, 600), (6.0 / eps.sqrt(), (120.0 / eps.sqrt()) as usize))[0];
        assert!((one - two).abs() < 1e-10, "{one} vs {two}");
    }
}

#[test]
fn extrapolation_removes_the_damping_bias() {
    let (f, g) = CASES[0];
    let x = 0.7;
    let biased = damped_product(f, g, x, 0.05, 3.0, 600);
    let exact = f(x) * g(x);
    assert!((biased - exact).abs() > 1e-5);
    assert!((oracle_product(f, g, &[x])[0] - exact).abs() < 1e-9);
}

#[test]
fn deformed_product_matches_the_oscillatory_integral() {
    let grid = TorusGrid::new(1, 64, 20.0).unwrap();
    let xs: Vec<f64> = (0..grid.len()).map(|p| grid.point(p)[0]).collect();
    for (f, g) in CASES {
        let p = deformed_product(&lift(&grid, f), &lift(&grid, g), &SkewForm::zero(1)).unwrap();
        let reference = oracle_product(f, g, &xs);
        let scale = reference.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        let err = (0..grid.len())
            .map(|i| (p.block(i)[0] - Complex64::new(reference[i], 0.0)).norm())
            .fold(0.0, f64::max);
        assert!(err <= 1e-6 * scale, "{err:e}");
    }
}
