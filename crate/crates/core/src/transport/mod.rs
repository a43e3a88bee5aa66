//! Super parallel transport: solving `(∂_D + 𝔄)ψ = 0` along superpaths.

mod api;
mod coefficient;
mod map;
mod recover;
mod solve;

pub use api::{
    adiabatic_sweep, glue, ps, pulled_back_end, reparametrize, rescale, rescaled_end, reverse, sp, sp_connection,
    transport, SweepEntry, DEFAULT_OVERLAP_FRACTION,
};
pub use coefficient::{CoefficientField, PathCoefficient, PolyField, Source};
pub use map::TransportMap;
pub use recover::{
    coefficient_at_start, default_probes, recover, PointCoefficients, Probe, RecoverOptions, TransportOracle,
};
pub use solve::{solve_d, SolverOptions};
