//! Flows of even and odd vector fields on R^{p|q}, integrated directly in
//! Grassmann arithmetic.

mod field;
mod integrate;

pub use field::SuperVectorField;
pub use integrate::{flow_even, flow_even_at, flow_odd, flow_odd_trajectory, odd_flow_residual, Trajectory};
pub(crate) use integrate::nilpotent_step_ok;
