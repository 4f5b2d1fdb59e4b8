//! Numerical model of Rieffel's deformed product `x_J` on matrix-valued
//! functions, the operators `L_f`, `R_g` it induces on a periodic grid, and the
//! machinery used to check that smooth operators commuting with every `R_g`
//! are left multiplications.

mod error;

pub mod algebra;
pub mod deform;
pub mod ensemble;
pub mod fourier;
pub mod grid;
pub mod mollifier;
pub mod symbol;

pub use algebra::MatrixElement;
pub use error::{Error, Result};
