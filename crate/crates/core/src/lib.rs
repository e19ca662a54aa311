//! Latency analytics for erasure-coded multi-path fronthaul.
//!
//! * [`mm1`]: M/M/1 sojourn tail, queue-length distribution and conditional
//!   Erlang delay tail, all evaluated in log space.
//! * [`forkjoin`]: lower (independent links) and upper (equal queue length)
//!   bounds on `(n, k)` fork-join delay, with Monte Carlo oracles.
//! * [`sim`]: discrete-event simulation of the coded fronthaul under
//!   shared, bandwidth-partitioned and path-partitioned allocation.
//! * [`planner`]: reliability/latency inversion and functional-split advice.
//! * [`experiment`]: the config and commands behind the `fhlat` binary.

pub mod error;
pub mod experiment;
pub mod forkjoin;
pub mod mm1;
pub mod numeric;
pub mod planner;
pub mod rng;
pub mod sim;

pub use error::{Error, Result};
