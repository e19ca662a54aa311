use serde::{Deserialize, Serialize};

use super::config::ForkJoinConfig;
use super::curve::{CurveKind, CurveMetadata, CurvePoint, DelayCurve};
use crate::error::{Error, Result};
use crate::mm1::{ln_sojourn_tail, queue_length_pmf, ErlangTailTable};
use crate::numeric::{ln_binomial_row, ln_one_minus_exp, ln_pow, LogSumExp};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    Lower,
    Upper,
}

impl BoundKind {
    pub fn curve_kind(self) -> CurveKind {
        match self {
            BoundKind::Lower => CurveKind::AnalyticLower,
            BoundKind::Upper => CurveKind::AnalyticUpper,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            BoundKind::Lower => "lower",
            BoundKind::Upper => "upper",
        }
    }
}

/// Adds `ln Σ_{j<k} C(n,j) done^j tail^{n-j}` terms, shifted by `offset`.
fn push_binomial_lower_tail(
    acc: &mut LogSumExp,
    ln_choose: &[f64],
    k: usize,
    ln_done: f64,
    ln_tail: f64,
    offset: f64,
) {
    let n = ln_choose.len() - 1;
    for (j, &ln_c) in ln_choose.iter().enumerate().take(k) {
        acc.push(offset + ln_c + ln_pow(ln_done, j) + ln_pow(ln_tail, n - j));
    }
}

/// Logarithm of [`lower_bound_tail`].
pub fn ln_lower_bound_tail(cfg: &ForkJoinConfig, arrival_rate: f64, tau: f64) -> Result<f64> {
    let queue = cfg.block_queue(arrival_rate)?;
    let ln_tail = ln_sojourn_tail(&queue, tau)?;
    let ln_done = ln_one_minus_exp(ln_tail);
    let ln_choose = ln_binomial_row(cfg.n());
    let mut acc = LogSumExp::new();
    push_binomial_lower_tail(&mut acc, &ln_choose, cfg.k(), ln_done, ln_tail, 0.0);
    Ok(acc.ln_value().min(0.0))
}

/// Fork-join delay tail when the `n` links are independent M/M/1 queues:
/// fewer than `k` of them finish by `τ`.
pub fn lower_bound_tail(cfg: &ForkJoinConfig, arrival_rate: f64, tau: f64) -> Result<f64> {
    ln_lower_bound_tail(cfg, arrival_rate, tau).map(f64::exp)
}

/// Largest queue length the upper-bound series will ever be extended to.
const MAX_SERIES_INDEX: usize = 1 << 24;

/// Upper-bound series over `l = 0..=last`. The conditional tail grows with
/// `l`, so its value at `last` is a floor for every dropped term: that term
/// carries the whole mass `P{L >= last}`.
fn ln_upper_series(cfg: &ForkJoinConfig, rho: f64, x: f64, last: usize) -> f64 {
    let ln_choose = ln_binomial_row(cfg.n());
    let table = ErlangTailTable::new(x, last);
    let (ln_rho, ln_idle) = (rho.ln(), (-rho).ln_1p());
    let mut acc = LogSumExp::new();
    for l in 0..=last {
        let ln_weight = if l < last {
            ln_idle + ln_pow(ln_rho, l)
        } else {
            ln_pow(ln_rho, l)
        };
        push_binomial_lower_tail(
            &mut acc,
            &ln_choose,
            cfg.k(),
            table.ln_done[l],
            table.ln_tail[l],
            ln_weight,
        );
    }
    acc.ln_value().min(0.0)
}

/// Logarithm of [`upper_bound_tail`].
pub fn ln_upper_bound_tail(
    cfg: &ForkJoinConfig,
    arrival_rate: f64,
    tau: f64,
    eps_trunc: f64,
) -> Result<f64> {
    let queue = cfg.block_queue(arrival_rate)?;
    // validates tau
    ln_sojourn_tail(&queue, tau)?;
    let pmf = queue_length_pmf(&queue, eps_trunc)?;
    let rho = pmf.utilization();
    let x = queue.service_rate() * tau;
    let mut last = pmf.max_index();
    let mut value = ln_upper_series(cfg, rho, x, last);
    // Deep in the tail the dropped mass can dominate the value itself:
    // extend until it is below eps relative to the value as well.
    for _ in 0..4 {
        if rho == 0.0 || value == f64::NEG_INFINITY {
            break;
        }
        let need = ((eps_trunc.ln() + value) / rho.ln()).ceil() - 1.0;
        if need <= last as f64 || need > MAX_SERIES_INDEX as f64 {
            break;
        }
        last = need as usize;
        value = ln_upper_series(cfg, rho, x, last);
    }
    Ok(value)
}

/// Fork-join delay tail when all `n` links hold the same number of blocks
/// `L ~ Geom(ρ)` and are otherwise independent.
///
/// The series over `L` stops at the smallest `L_max` with
/// `ρ^{L_max+1} <= ε · min(1, value)`. Terms beyond `L_max` are credited at
/// the `L_max` conditional tail, so the result never exceeds the
/// untruncated sum and falls short of it by at most `eps_trunc` in both
/// absolute and relative terms.
pub fn upper_bound_tail(
    cfg: &ForkJoinConfig,
    arrival_rate: f64,
    tau: f64,
    eps_trunc: f64,
) -> Result<f64> {
    ln_upper_bound_tail(cfg, arrival_rate, tau, eps_trunc).map(f64::exp)
}

pub(crate) fn validate_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::invalid("latency grid is empty"));
    }
    if let Some(t) = grid.iter().find(|t| !(t.is_finite() && **t >= 0.0)) {
        return Err(Error::invalid(format!(
            "latency grid point {t} is not finite and >= 0"
        )));
    }
    if let Some(w) = grid.windows(2).find(|w| w[1] <= w[0]) {
        return Err(Error::invalid(format!(
            "latency grid must be strictly increasing ({} then {})",
            w[0], w[1]
        )));
    }
    Ok(())
}

/// Evaluates one bound on every point of `grid`.
pub fn bound_curve(
    cfg: &ForkJoinConfig,
    arrival_rate: f64,
    grid: &[f64],
    which: BoundKind,
    eps_trunc: f64,
) -> Result<DelayCurve> {
    validate_grid(grid)?;
    let points = grid
        .iter()
        .map(|&tau| {
            let tail = match which {
                BoundKind::Lower => lower_bound_tail(cfg, arrival_rate, tau)?,
                BoundKind::Upper => upper_bound_tail(cfg, arrival_rate, tau, eps_trunc)?,
            };
            Ok(CurvePoint::analytic(tau, tail))
        })
        .collect::<Result<Vec<_>>>()?;
    let metadata = CurveMetadata {
        fork_join: Some(*cfg),
        arrival_rate: Some(arrival_rate),
        eps_trunc: (which == BoundKind::Upper).then_some(eps_trunc),
        ..CurveMetadata::default()
    };
    DelayCurve::new(which.curve_kind(), points, metadata)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mm1::{erlang_delay_tail, mm1_sojourn_tail, Mm1Params, DEFAULT_EPS_TRUNC};
    use proptest::prelude::*;

    const EPS: f64 = DEFAULT_EPS_TRUNC;

    fn fj(n: usize, k: usize, mu: f64) -> ForkJoinConfig {
        ForkJoinConfig::with_service_rate(n, k, mu).unwrap()
    }

    /// τ at which e^{-(μ-λ)τ} equals `p0`.
    fn tau_for(p0: f64, lambda: f64, mu: f64) -> f64 {
        -p0.ln() / (mu - lambda)
    }

    #[test]
    fn single_link_collapses_to_sojourn_tail() {
        let cfg = fj(1, 1, 2.0);
        for tau in [0.0, 0.3, 1.0, 5.0] {
            let exact = mm1_sojourn_tail(&Mm1Params::new(1.0, 2.0).unwrap(), tau).unwrap();
            assert_eq!(lower_bound_tail(&cfg, 1.0, tau).unwrap(), exact);
            let ub = upper_bound_tail(&cfg, 1.0, tau, EPS).unwrap();
            assert!((ub - exact).abs() <= 1e-9 * exact, "tau={tau}");
        }
        let ub = upper_bound_tail(&cfg, 1.0, 1.0, EPS).unwrap();
        assert!((ub - 0.3678794).abs() < 1e-7);
    }

    #[test]
    fn collapse_is_relative_deep_in_the_tail() {
        let cfg = fj(1, 1, 2.0);
        for (lambda, tau) in [(1.0, 200.0), (1.9, 3000.0), (0.2, 40.0)] {
            let exact = mm1_sojourn_tail(&Mm1Params::new(lambda, 2.0).unwrap(), tau).unwrap();
            let ub = upper_bound_tail(&cfg, lambda, tau, EPS).unwrap();
            assert!(
                (ub - exact).abs() <= 1e-9 * exact,
                "{lambda} {tau}: {ub} vs {exact}"
            );
        }
    }

    #[test]
    fn lower_bound_examples() {
        let tau = tau_for(0.5, 1.0, 3.0);
        let v = lower_bound_tail(&fj(2, 1, 3.0), 1.0, tau).unwrap();
        assert!((v - 0.25).abs() < 1e-14);
        let tau = tau_for(0.1, 1.0, 3.0);
        let v = lower_bound_tail(&fj(3, 2, 3.0), 1.0, tau).unwrap();
        assert!((v - 0.028).abs() < 1e-14);
        assert_eq!(lower_bound_tail(&fj(4, 3, 3.0), 1.0, 0.0).unwrap(), 1.0);
    }

    #[test]
    fn idle_queue_bounds_coincide() {
        let mu = 2.5;
        for (n, k) in [(1, 1), (3, 2), (10, 5), (10, 10)] {
            for tau in [0.0, 0.1, 1.0, 4.0] {
                let lb = lower_bound_tail(&fj(n, k, mu), 0.0, tau).unwrap();
                let ub = upper_bound_tail(&fj(n, k, mu), 0.0, tau, EPS).unwrap();
                assert!(
                    (lb - ub).abs() <= EPS + 1e-9 * lb.max(1e-300),
                    "n={n} k={k} tau={tau}"
                );
            }
        }
    }

    #[test]
    fn upper_bound_two_links_matches_direct_series() {
        // (n, k) = (2, 1), ρ = 0.5, μ = 1, τ = 1: Σ_l 2^{-(l+1)} q_l²
        let direct: f64 = (0..200)
            .map(|l| 0.5f64.powi(l as i32 + 1) * erlang_delay_tail(1.0, l, 1.0).unwrap().powi(2))
            .sum();
        let ub = upper_bound_tail(&fj(2, 1, 1.0), 0.5, 1.0, EPS).unwrap();
        assert!((ub - direct).abs() < 1e-12, "{ub} vs {direct}");
    }

    #[test]
    fn instability_and_bad_inputs() {
        let cfg = fj(3, 2, 2.0);
        assert!(matches!(
            lower_bound_tail(&cfg, 2.0, 1.0),
            Err(Error::Unstable { .. })
        ));
        assert!(matches!(
            upper_bound_tail(&cfg, 5.0, 1.0, EPS),
            Err(Error::Unstable { .. })
        ));
        assert!(matches!(
            lower_bound_tail(&cfg, 1.0, -1.0),
            Err(Error::InvalidParameters(_))
        ));
        assert!(matches!(
            upper_bound_tail(&cfg, 1.0, 1.0, 0.0),
            Err(Error::InvalidParameters(_))
        ));
    }

    #[test]
    fn deep_tail_keeps_precision() {
        // (10, 5) at p0 = 1e-4: dominant term C(10,4) p0^6 (1-p0)^4 ~ 2.1e-22.
        let (lambda, mu) = (1.0, 3.0);
        let tau = tau_for(1e-4, lambda, mu);
        let v = lower_bound_tail(&fj(10, 5, mu), lambda, tau).unwrap();
        let p0: f64 = 1e-4;
        let direct: f64 = (0..5)
            .map(|j| {
                let c = [1.0, 10.0, 45.0, 120.0, 210.0][j];
                c * (1.0 - p0).powi(j as i32) * p0.powi(10 - j as i32)
            })
            .sum();
        assert!(((v - direct) / direct).abs() < 1e-9, "{v} vs {direct}");
    }

    #[test]
    fn curve_matches_scalar_ops() {
        let cfg = fj(4, 2, 10.0);
        let grid = [0.0, 0.05, 0.1, 0.5, 1.0];
        let lower = bound_curve(&cfg, 4.0, &grid, BoundKind::Lower, EPS).unwrap();
        let upper = bound_curve(&cfg, 4.0, &grid, BoundKind::Upper, EPS).unwrap();
        assert_eq!(lower.kind(), CurveKind::AnalyticLower);
        assert_eq!(upper.kind(), CurveKind::AnalyticUpper);
        for (i, &tau) in grid.iter().enumerate() {
            assert_eq!(
                lower.points()[i].tail,
                lower_bound_tail(&cfg, 4.0, tau).unwrap()
            );
            assert_eq!(
                upper.points()[i].tail,
                upper_bound_tail(&cfg, 4.0, tau, EPS).unwrap()
            );
        }
        let origin = bound_curve(&cfg, 4.0, &[0.0], BoundKind::Upper, EPS).unwrap();
        assert_eq!(origin.points()[0].tail, 1.0);
        assert!(bound_curve(&cfg, 4.0, &[1.0, 1.0], BoundKind::Lower, EPS).is_err());
        assert!(bound_curve(&cfg, 4.0, &[], BoundKind::Lower, EPS).is_err());
    }

    fn arb_point() -> impl Strategy<Value = (usize, usize, f64, f64)> {
        (1usize..=12).prop_flat_map(|n| (Just(n), 1..=n, 0.0f64..0.95, 0.0f64..20.0))
    }

    #[test]
    fn ordering_reverses_when_all_blocks_are_needed() {
        // k = n: the tail is 1 - (1-q)^n, concave in q, so averaging q over
        // the shared queue length lands below the independent-links value.
        let cfg = fj(2, 2, 1.0);
        let (rho, x) = (0.13, 14.0);
        let lb = lower_bound_tail(&cfg, rho, x).unwrap();
        let ub = upper_bound_tail(&cfg, rho, x, EPS).unwrap();
        assert!(ub < lb - 1e-9, "lb={lb} ub={ub}");
    }

    #[test]
    fn truncation_brackets_the_full_series() {
        let cfg = fj(3, 2, 1.0);
        let rho = 0.9;
        for x in [0.0, 0.5, 5.0, 40.0] {
            let coarse = upper_bound_tail(&cfg, rho, x, 1e-3).unwrap();
            let fine = upper_bound_tail(&cfg, rho, x, 1e-15).unwrap();
            assert!(coarse <= fine + 1e-15 && fine - coarse <= 1e-3, "x={x}");
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(400))]

        // k = 1: the tail q^n is convex, so the equal-length mixture dominates.
        #[test]
        fn lower_never_exceeds_upper_single_block((n, _k, rho, x) in arb_point()) {
            let k = 1;
            let cfg = fj(n, k, 1.0);
            let lb = lower_bound_tail(&cfg, rho, x).unwrap();
            let ub = upper_bound_tail(&cfg, rho, x, EPS).unwrap();
            prop_assert!(lb <= ub + EPS, "lb={} ub={}", lb, ub);
            prop_assert!((0.0..=1.0).contains(&lb) && (0.0..=1.0).contains(&ub));
        }

        #[test]
        fn bounds_monotone((n, k, rho, x) in arb_point(), dx in 0.0f64..3.0) {
            let cfg = fj(n, k, 1.0);
            for which in [BoundKind::Lower, BoundKind::Upper] {
                let eval = |c: &ForkJoinConfig, t: f64| match which {
                    BoundKind::Lower => lower_bound_tail(c, rho, t).unwrap(),
                    BoundKind::Upper => upper_bound_tail(c, rho, t, EPS).unwrap(),
                };
                let here = eval(&cfg, x);
                let tol = 1e-12 * here + EPS;
                prop_assert!(eval(&cfg, x + dx) <= here + tol);
                if k < n {
                    prop_assert!(eval(&fj(n, k + 1, 1.0), x) + tol >= here);
                }
                prop_assert!(eval(&fj(n + 1, k, 1.0), x) <= here + tol);
            }
        }
    }
}
