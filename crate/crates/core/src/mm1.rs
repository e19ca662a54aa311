//! Stationary M/M/1 primitives: sojourn tail, queue-length distribution and
//! the delay tail conditioned on the number of jobs found at arrival.
//!
//! Everything here is evaluated in log space. A job that finds `l` jobs in
//! the system leaves after `l + 1` exponential stages, so its conditional
//! delay tail is the Erlang(l+1, μ) survival function, i.e. the Poisson
//! CDF `Σ_{m<=l} e^{-μτ} (μτ)^m / m!`.

use statrs::function::factorial::ln_factorial;

use crate::error::{Error, Result};
use crate::numeric::{ln_add_exp, ln_one_minus_exp};

/// Truncation budget for the queue-length series unless a caller overrides it.
pub const DEFAULT_EPS_TRUNC: f64 = 1e-12;

/// Relative size under which a series term no longer changes an f64 sum.
const SERIES_CUTOFF: f64 = 1e-18;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mm1Params {
    arrival_rate: f64,
    service_rate: f64,
}

impl Mm1Params {
    /// Rejects `λ >= μ`; `λ = 0` is an empty but valid queue.
    pub fn new(arrival_rate: f64, service_rate: f64) -> Result<Self> {
        if !(service_rate.is_finite() && service_rate > 0.0) {
            return Err(Error::invalid(format!(
                "service rate must be finite and > 0, got {service_rate}"
            )));
        }
        if !(arrival_rate.is_finite() && arrival_rate >= 0.0) {
            return Err(Error::invalid(format!(
                "arrival rate must be finite and >= 0, got {arrival_rate}"
            )));
        }
        if arrival_rate >= service_rate {
            return Err(Error::Unstable {
                context: "M/M/1 queue".into(),
                arrival_rate,
                service_rate,
            });
        }
        Ok(Self {
            arrival_rate,
            service_rate,
        })
    }

    pub fn arrival_rate(&self) -> f64 {
        self.arrival_rate
    }

    pub fn service_rate(&self) -> f64 {
        self.service_rate
    }

    pub fn utilization(&self) -> f64 {
        self.arrival_rate / self.service_rate
    }
}

fn check_tau(tau: f64) -> Result<()> {
    if tau.is_finite() && tau >= 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!(
            "latency must be finite and >= 0, got {tau}"
        )))
    }
}

/// `ln P{d > τ} = -(μ - λ) τ`.
pub fn ln_sojourn_tail(params: &Mm1Params, tau: f64) -> Result<f64> {
    check_tau(tau)?;
    Ok(-(params.service_rate - params.arrival_rate) * tau)
}

/// Sojourn-time tail `P{d > τ} = e^{-(μ-λ)τ}` of a stationary M/M/1 queue.
pub fn mm1_sojourn_tail(params: &Mm1Params, tau: f64) -> Result<f64> {
    ln_sojourn_tail(params, tau).map(f64::exp)
}

/// Geometric number-in-system distribution `(1-ρ) ρ^l`, truncated where the
/// remaining mass `ρ^{L+1}` drops to the requested budget.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QueueLengthPmf {
    rho: f64,
    max_index: usize,
    eps_trunc: f64,
}

impl QueueLengthPmf {
    pub fn utilization(&self) -> f64 {
        self.rho
    }

    /// Largest queue length kept (`L_max`).
    pub fn max_index(&self) -> usize {
        self.max_index
    }

    pub fn eps_trunc(&self) -> f64 {
        self.eps_trunc
    }

    pub fn term(&self, l: usize) -> f64 {
        (1.0 - self.rho) * self.rho.powi(l as i32)
    }

    pub fn ln_term(&self, l: usize) -> f64 {
        if self.rho == 0.0 {
            return if l == 0 { 0.0 } else { f64::NEG_INFINITY };
        }
        (-self.rho).ln_1p() + l as f64 * self.rho.ln()
    }

    /// Exact mass beyond `L_max`.
    pub fn tail_mass(&self) -> f64 {
        self.rho.powi(self.max_index as i32 + 1)
    }

    pub fn terms(&self) -> impl Iterator<Item = f64> + '_ {
        (0..=self.max_index).map(|l| self.term(l))
    }
}

pub fn queue_length_pmf(params: &Mm1Params, eps_trunc: f64) -> Result<QueueLengthPmf> {
    if !(eps_trunc > 0.0 && eps_trunc < 1.0) {
        return Err(Error::invalid(format!(
            "truncation error must lie in (0, 1), got {eps_trunc}"
        )));
    }
    let rho = params.utilization();
    let max_index = truncation_index(rho, eps_trunc);
    Ok(QueueLengthPmf {
        rho,
        max_index,
        eps_trunc,
    })
}

/// Smallest `L >= 0` with `ρ^{L+1} <= ε`.
fn truncation_index(rho: f64, eps: f64) -> usize {
    if rho == 0.0 {
        return 0;
    }
    let guess = (eps.ln() / rho.ln()).ceil() - 1.0;
    let mut l = if guess > 0.0 { guess as usize } else { 0 };
    // The logarithm can land one off either way; settle it on exact powers.
    while rho.powf(l as f64 + 1.0) > eps {
        l += 1;
    }
    while l > 0 && rho.powf(l as f64) <= eps {
        l -= 1;
    }
    l
}

/// `(ln P{Erlang(l+1, μ) > τ}, ln P{Erlang(l+1, μ) <= τ})` with `x = μτ`.
///
/// Whichever side is the smaller one is summed directly from its dominant
/// term outward, the other is taken as its complement.
pub(crate) fn ln_erlang_tail_pair(x: f64, l: usize) -> (f64, f64) {
    if x == 0.0 {
        return (0.0, f64::NEG_INFINITY);
    }
    let ln_x = x.ln();
    let shape = l as f64 + 1.0;
    if x < shape {
        // Lower tail Σ_{m>l} t_m: terms shrink by x/(m+1) < 1.
        let m0 = l + 1;
        let lead = -x + m0 as f64 * ln_x - ln_factorial(m0 as u64);
        let mut sum = 1.0;
        let mut term = 1.0;
        let mut m = m0;
        loop {
            m += 1;
            term *= x / m as f64;
            sum += term;
            if term < sum * SERIES_CUTOFF {
                break;
            }
        }
        let ln_lower = lead + sum.ln();
        (ln_one_minus_exp(ln_lower.min(0.0)), ln_lower)
    } else {
        // Upper tail Σ_{m<=l} t_m: walking down from m = l shrinks by m/x < 1.
        let lead = -x + l as f64 * ln_x - ln_factorial(l as u64);
        let mut sum = 1.0;
        let mut term = 1.0;
        let mut m = l;
        while m > 0 {
            term *= m as f64 / x;
            sum += term;
            m -= 1;
            if term < sum * SERIES_CUTOFF {
                break;
            }
        }
        let ln_upper = lead + sum.ln();
        (ln_upper, ln_one_minus_exp(ln_upper.min(0.0)))
    }
}

fn check_erlang_args(service_rate: f64, tau: f64) -> Result<()> {
    if !(service_rate.is_finite() && service_rate > 0.0) {
        return Err(Error::invalid(format!(
            "service rate must be finite and > 0, got {service_rate}"
        )));
    }
    check_tau(tau)
}

pub fn ln_erlang_delay_tail(service_rate: f64, l: usize, tau: f64) -> Result<f64> {
    check_erlang_args(service_rate, tau)?;
    Ok(ln_erlang_tail_pair(service_rate * tau, l).0)
}

/// Delay tail of a job that finds `l` jobs ahead of it in an M/M/1 queue
/// with service rate `μ`: `Σ_{m=0}^{l} (μτ)^m e^{-μτ} / m!`.
pub fn erlang_delay_tail(service_rate: f64, l: usize, tau: f64) -> Result<f64> {
    ln_erlang_delay_tail(service_rate, l, tau).map(f64::exp)
}

/// Conditional delay tails for every queue length `0..=max_index` at one `x = μτ`.
///
/// `ln_tail[l]` is `ln P{Erlang(l+1) > τ}` and `ln_done[l]` its complement;
/// both are built by adding positive terms only.
#[derive(Debug, Clone)]
pub(crate) struct ErlangTailTable {
    pub ln_tail: Vec<f64>,
    pub ln_done: Vec<f64>,
}

impl ErlangTailTable {
    pub fn new(x: f64, max_index: usize) -> Self {
        let len = max_index + 1;
        if x == 0.0 {
            return Self {
                ln_tail: vec![0.0; len],
                ln_done: vec![f64::NEG_INFINITY; len],
            };
        }
        let ln_x = x.ln();
        // ln t_m for m = 0..=max_index+1
        let mut ln_terms = Vec::with_capacity(len + 1);
        let mut cur = -x;
        ln_terms.push(cur);
        for m in 1..=len {
            cur += ln_x - (m as f64).ln();
            ln_terms.push(cur);
        }

        let mut ln_tail = Vec::with_capacity(len);
        let mut acc = f64::NEG_INFINITY;
        for &t in &ln_terms[..len] {
            acc = ln_add_exp(acc, t);
            ln_tail.push(acc);
        }

        let mut ln_done = vec![f64::NEG_INFINITY; len];
        ln_done[max_index] = ln_erlang_tail_pair(x, max_index).1;
        for l in (0..max_index).rev() {
            ln_done[l] = ln_add_exp(ln_done[l + 1], ln_terms[l + 1]);
        }
        Self { ln_tail, ln_done }
    }
}
