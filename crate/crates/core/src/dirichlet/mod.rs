//! First Dirichlet eigenvalues of raster domains, the resolvent `ψ_λ`, its
//! logarithm `φ_λ`, the functions `f_n`, and supersolution certificates.
//!
//! All operators are the 5-point Laplacian with Dirichlet-by-deletion: cells
//! outside the domain are removed from the system and their value is moved to
//! the right-hand side.

mod certificate;
mod eigen;
mod field;
mod operator;
mod psi;

pub use certificate::{certify_lower_bound, Certificate};
pub use eigen::{lambda1_grid, lambda1_stochastic, EigenResult, Method, DEFAULT_TOL};
pub use field::ScalarField;
pub use psi::{build_fn, phi_and_residual, solve_psi, solve_psi_with, FnResult, PhiReport, DEFAULT_MARGIN};
