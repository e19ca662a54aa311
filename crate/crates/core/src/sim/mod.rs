//! Discrete-event simulation of erasure-coded multi-path fronthaul.

mod ccdf;
mod engine;
mod model;
mod replicate;
mod stats;

pub use ccdf::{empirical_ccdf, Exceedances, DEFAULT_Z};
pub use engine::{simulate, ClassOutcome, QueueStats, SimResult, SimSpec};
pub use model::{
    class_fork_join, plan_resources, AllocationPolicy, ClassPlan, FronthaulTopology, ResourcePlan,
    TrafficClass,
};
pub use replicate::{replicate, Replicated};
pub use stats::{BatchMeans, MeanEstimate};
