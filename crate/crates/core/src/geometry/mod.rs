//! Chart-level geometry: functions and matrix functions on R^{p|q},
//! superpaths, forms, (super)connections and their pullbacks along paths.

mod forms;
mod function;
mod path;
mod pullback;

pub use forms::{index_sets, Connection, DifferentialForm, Superconnection};
pub use function::{MatrixFunction, PolyTerm, SuperFunction};
pub use path::{glued_endpoint, Component, CoordJet, PathModel, PathValues, SuperPath};
pub use pullback::{
    chart_claim_check, connection_coeff_at, connection_coeff_d, lift_pullback, lift_pullback_at, pull_function,
    pull_matrix, superconnection_coefficient, superconnection_coefficient_at, Pair, Variant,
};
