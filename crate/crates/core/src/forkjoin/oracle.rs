//! Monte Carlo oracles for the two bound models.
//!
//! These sample the stochastic models the closed forms describe, not the
//! closed forms themselves: each trial draws `n` per-link delays, takes the
//! `k`-th smallest as the packet delay and counts exceedances. Sampling is
//! by inversion (exponential, geometric) and sums of exponential stages
//! (Erlang), driven by one seeded ChaCha8 stream.

use super::bounds::validate_grid;
use super::config::ForkJoinConfig;
use crate::error::{Error, Result};
use crate::rng::{exponential, geometric, stream_rng, StreamRng};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub estimate: f64,
    /// Binomial standard error `sqrt(p(1-p)/m)`.
    pub stderr: f64,
    pub samples: u64,
}

impl McEstimate {
    fn from_count(exceed: u64, samples: u64) -> Self {
        let p = exceed as f64 / samples as f64;
        Self {
            estimate: p,
            stderr: (p * (1.0 - p) / samples as f64).sqrt(),
            samples,
        }
    }

    /// Number of standard errors between the estimate and `value`
    /// (zero-width estimates only accept an exact match).
    pub fn z_score(&self, value: f64) -> f64 {
        let diff = (self.estimate - value).abs();
        if self.stderr > 0.0 {
            diff / self.stderr
        } else if diff == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    }
}

/// Runs `samples` trials of `draw_delay`, tallying `D > τ` for every grid point.
fn tally(
    grid: &[f64],
    samples: u64,
    seed: u64,
    mut draw_delay: impl FnMut(&mut StreamRng, &mut [f64]) -> f64,
    n: usize,
) -> Result<Vec<McEstimate>> {
    validate_grid(grid)?;
    if samples == 0 {
        return Err(Error::invalid("oracle needs at least one sample"));
    }
    let mut rng = stream_rng(seed, 0);
    let mut buf = vec![0.0; n];
    // hist[i] counts trials whose delay exceeds exactly grid[..i]
    let mut hist = vec![0u64; grid.len() + 1];
    for _ in 0..samples {
        let d = draw_delay(&mut rng, &mut buf);
        hist[grid.partition_point(|&t| t < d)] += 1;
    }
    let mut out = vec![McEstimate::from_count(0, samples); grid.len()];
    let mut exceed = 0u64;
    for i in (0..grid.len()).rev() {
        exceed += hist[i + 1];
        out[i] = McEstimate::from_count(exceed, samples);
    }
    Ok(out)
}

fn kth_smallest(buf: &mut [f64], k: usize) -> f64 {
    let (_, kth, _) = buf.select_nth_unstable_by(k - 1, f64::total_cmp);
    *kth
}

/// Oracle for the independent-links model on a whole latency grid.
pub fn oracle_lower_bound_curve(
    cfg: &ForkJoinConfig,
    arrival_rate: f64,
    grid: &[f64],
    samples: u64,
    seed: u64,
) -> Result<Vec<McEstimate>> {
    let queue = cfg.block_queue(arrival_rate)?;
    let rate = queue.service_rate() - queue.arrival_rate();
    let k = cfg.k();
    tally(
        grid,
        samples,
        seed,
        |rng, buf| {
            for d in buf.iter_mut() {
                *d = exponential(rng, rate);
            }
            kth_smallest(buf, k)
        },
        cfg.n(),
    )
}

/// Draws `n` iid sojourn times `Exp(μ - λ)` per trial; returns `P{D > τ}`.
pub fn oracle_lower_bound_mc(
    cfg: &ForkJoinConfig,
    arrival_rate: f64,
    tau: f64,
    samples: u64,
    seed: u64,
) -> Result<McEstimate> {
    Ok(oracle_lower_bound_curve(cfg, arrival_rate, &[tau], samples, seed)?[0])
}

/// Oracle for the equal-queue-length model on a whole latency grid.
pub fn oracle_upper_bound_curve(
    cfg: &ForkJoinConfig,
    arrival_rate: f64,
    grid: &[f64],
    samples: u64,
    seed: u64,
) -> Result<Vec<McEstimate>> {
    let queue = cfg.block_queue(arrival_rate)?;
    let mu = queue.service_rate();
    let rho = queue.utilization();
    let k = cfg.k();
    tally(
        grid,
        samples,
        seed,
        |rng, buf| {
            let stages = geometric(rng, rho) + 1;
            for d in buf.iter_mut() {
                *d = (0..stages).map(|_| exponential(rng, mu)).sum();
            }
            kth_smallest(buf, k)
        },
        cfg.n(),
    )
}

/// One shared queue length `L ~ Geom(ρ)` per trial, then `n` conditionally
/// independent `Erlang(L+1, μ)` delays; returns `P{D > τ}`.
pub fn oracle_upper_bound_mc(
    cfg: &ForkJoinConfig,
    arrival_rate: f64,
    tau: f64,
    samples: u64,
    seed: u64,
) -> Result<McEstimate> {
    Ok(oracle_upper_bound_curve(cfg, arrival_rate, &[tau], samples, seed)?[0])
}
