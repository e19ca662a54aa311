use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mm1::Mm1Params;

/// `(n, k)` coding over `n` identical paths: a packet of `packet_size_bits`
/// is cut into `k` blocks, coded into `n`, and done once any `k` arrive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawForkJoin")]
pub struct ForkJoinConfig {
    n: usize,
    k: usize,
    packet_size_bits: f64,
    path_capacity_bps: f64,
}

#[derive(Deserialize)]
struct RawForkJoin {
    n: usize,
    k: usize,
    packet_size_bits: f64,
    path_capacity_bps: f64,
}

impl TryFrom<RawForkJoin> for ForkJoinConfig {
    type Error = Error;

    fn try_from(raw: RawForkJoin) -> Result<Self> {
        ForkJoinConfig::new(raw.n, raw.k, raw.packet_size_bits, raw.path_capacity_bps)
    }
}

impl ForkJoinConfig {
    pub fn new(n: usize, k: usize, packet_size_bits: f64, path_capacity_bps: f64) -> Result<Self> {
        if k == 0 || k > n {
            return Err(Error::invalid(format!(
                "need 1 <= k <= n, got n={n}, k={k}"
            )));
        }
        if !(packet_size_bits.is_finite() && packet_size_bits > 0.0) {
            return Err(Error::invalid(format!(
                "packet size must be finite and > 0 bits, got {packet_size_bits}"
            )));
        }
        if !(path_capacity_bps.is_finite() && path_capacity_bps > 0.0) {
            return Err(Error::invalid(format!(
                "path capacity must be finite and > 0 bit/s, got {path_capacity_bps}"
            )));
        }
        Ok(Self {
            n,
            k,
            packet_size_bits,
            path_capacity_bps,
        })
    }

    /// Config whose per-block service rate is exactly `service_rate`
    /// (unit packet size, capacity scaled accordingly).
    pub fn with_service_rate(n: usize, k: usize, service_rate: f64) -> Result<Self> {
        Self::new(n, k, 1.0, service_rate / k as f64)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn packet_size_bits(&self) -> f64 {
        self.packet_size_bits
    }

    pub fn path_capacity_bps(&self) -> f64 {
        self.path_capacity_bps
    }

    /// Per-block service rate `k ψ / B`.
    pub fn service_rate(&self) -> f64 {
        self.k as f64 * self.path_capacity_bps / self.packet_size_bits
    }

    /// The M/M/1 queue each path forms under arrival rate `arrival_rate`.
    pub fn block_queue(&self, arrival_rate: f64) -> Result<Mm1Params> {
        Mm1Params::new(arrival_rate, self.service_rate()).map_err(|e| match e {
            Error::Unstable {
                arrival_rate,
                service_rate,
                ..
            } => Error::Unstable {
                context: format!("({}, {}) fork-join block queue", self.n, self.k),
                arrival_rate,
                service_rate,
            },
            other => other,
        })
    }
}
