//! Closed-form stochastic bounds on `(n, k)` fork-join delay over homogeneous
//! M/M/1 links, and Monte Carlo oracles that sample the same models directly.

mod bounds;
mod config;
mod curve;
mod oracle;

pub(crate) use bounds::validate_grid;
pub use bounds::{
    bound_curve, ln_lower_bound_tail, ln_upper_bound_tail, lower_bound_tail, upper_bound_tail,
    BoundKind,
};
pub use config::ForkJoinConfig;
pub use curve::{CurveKind, CurveMetadata, CurvePoint, DelayCurve};
pub use oracle::{
    oracle_lower_bound_curve, oracle_lower_bound_mc, oracle_upper_bound_curve,
    oracle_upper_bound_mc, McEstimate,
};
