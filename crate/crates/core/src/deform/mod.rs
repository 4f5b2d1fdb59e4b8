//! Deformed product, the operators it induces, and the Heisenberg action.

mod derivation;
mod heisenberg;
mod norm;
mod operator;
mod product;

pub use derivation::{
    ad_u, derivation, derivation_direction, directional_derivative_spectrum, generator_unit, left_mult_derivation,
};
pub(crate) use product::negligible_modes;
pub(crate) use derivation::{FIRST_DERIVATIVE, FIRST_DERIVATIVE_DENOM, SECOND_DERIVATIVE};
pub use heisenberg::HeisenbergElement;
pub use norm::{
    dense_container, dense_spectral_norm, materialize, matrix_spectral_norm, operator_from_container,
    power_iteration_norm, MAX_DENSE_SIZE,
};
pub use operator::{DenseMatrix, GridOperator, Multiplier, OperatorKind};
pub use product::{deformed_product, deformed_product_any, twisted_convolution};

use crate::error::Result;
use crate::grid::{GridFunction, SkewForm, TorusGrid};

/// `L_f`
pub fn op_l(f: &GridFunction, form: &SkewForm) -> Result<GridOperator> {
    GridOperator::left_mult(f, form)
}

/// `R_g`
pub fn op_r(g: &GridFunction, form: &SkewForm) -> Result<GridOperator> {
    GridOperator::right_mult(g, form)
}

/// `U_{a,b,c}` on `grid`.
pub fn heisenberg_u(a: &[f64], b: &[f64], c: f64, grid: &TorusGrid, k: usize) -> Result<GridOperator> {
    GridOperator::heisenberg(grid, k, HeisenbergElement::new(a.to_vec(), b.to_vec(), c)?)
}
