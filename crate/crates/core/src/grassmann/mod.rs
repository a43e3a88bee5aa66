//! Finite Grassmann algebras Λ_N, graded matrices over them and evaluation
//! of smooth functions at Grassmann-valued arguments.

mod element;
mod expm;
mod matrix;
mod taylor;

pub use element::{gr_epsilon, gr_mul, Grassmann, Parity, Substitution, MAX_GENERATORS};
pub(crate) use element::reorder_sign;
pub use expm::mat_exp;
pub use matrix::{Dims, GradedMatrix};
pub use taylor::{derivative_of, gr_taylor_eval, Elementary, Partial, Polynomial, Product, Scaled, SmoothFn, Sum, TaylorFunction, Truncated};
