//! Calculus on S×R^{1|1}: sampled θ-expansions, the derivations D, Q and ∂_t,
//! and the group structure of R^{1|1}(S).

mod field;
mod point;

pub use field::{dd_identity_check, Derivation, SuperField};
pub use point::{group_inv, group_mul, super_lt, SuperPoint};
