//! Reliability/latency inversion and functional-split feasibility.
//!
//! All comparisons are fronthaul-only: the latency a curve achieves is
//! compared directly against split and scenario budgets, with no share
//! reserved for the air interface or the core.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forkjoin::{CurveKind, DelayCurve};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitOption {
    pub name: String,
    /// Largest tolerable one-way fronthaul latency.
    pub one_way_latency_budget_s: f64,
    /// Carried for reference only.
    #[serde(default)]
    pub dl_bandwidth_bps: Option<f64>,
    #[serde(default)]
    pub ul_bandwidth_bps: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioRequirement {
    pub name: String,
    pub end_to_end_latency_s: f64,
    pub reliability: f64,
    #[serde(default)]
    pub payload_note: String,
}

impl SplitOption {
    pub fn validate(&self) -> Result<()> {
        if !(self.one_way_latency_budget_s.is_finite() && self.one_way_latency_budget_s > 0.0) {
            return Err(Error::Config(format!(
                "split {}: latency budget must be > 0",
                self.name
            )));
        }
        Ok(())
    }
}

impl ScenarioRequirement {
    pub fn validate(&self) -> Result<()> {
        if !(self.reliability > 0.0 && self.reliability < 1.0) {
            return Err(Error::Config(format!(
                "scenario {}: reliability must lie in (0, 1)",
                self.name
            )));
        }
        if !(self.end_to_end_latency_s.is_finite() && self.end_to_end_latency_s > 0.0) {
            return Err(Error::Config(format!(
                "scenario {}: latency must be > 0",
                self.name
            )));
        }
        Ok(())
    }
}

/// PDCP-RLC (3GPP option 2) and MAC-PHY (option 6).
pub fn builtin_splits() -> Vec<SplitOption> {
    vec![
        SplitOption {
            name: "PDCP-RLC".into(),
            one_way_latency_budget_s: 10e-3,
            dl_bandwidth_bps: Some(4016e6),
            ul_bandwidth_bps: Some(3024e6),
            note: Some("3GPP option 2; one-way latency 1.5-10 ms, 10 ms maximum".into()),
        },
        SplitOption {
            name: "MAC-PHY".into(),
            one_way_latency_budget_s: 250e-6,
            dl_bandwidth_bps: Some(4133e6),
            ul_bandwidth_bps: Some(5640e6),
            note: Some("3GPP option 6".into()),
        },
    ]
}

pub fn builtin_scenarios() -> Vec<ScenarioRequirement> {
    let s = |name: &str, lat: f64, rel: f64, payload: &str| ScenarioRequirement {
        name: name.into(),
        end_to_end_latency_s: lat,
        reliability: rel,
        payload_note: payload.into(),
    };
    vec![
        s("Tactile interaction", 0.5e-3, 0.99999, "Small"),
        s(
            "Electricity distribution (high voltage)",
            5e-3,
            0.999999,
            "Small",
        ),
        s(
            "Electricity distribution (medium voltage)",
            25e-3,
            0.999,
            "Small to big",
        ),
        s("Discrete automation", 10e-3, 0.9999, "Small to big"),
        s(
            "Intelligent transport systems",
            10e-3,
            0.999999,
            "Small to big",
        ),
    ]
}

fn check_reliability(r: f64) -> Result<()> {
    if r > 0.0 && r < 1.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!(
            "reliability must lie in (0, 1), got {r}"
        )))
    }
}

/// Smallest latency whose tail probability is at most `1 - reliability`.
///
/// Between grid points the tail is interpolated linearly in `(τ, ln p)`.
/// Empirical curves are inverted on the upper edge of their confidence band.
pub fn achievable_latency(curve: &DelayCurve, reliability: f64) -> Result<f64> {
    check_reliability(reliability)?;
    let target = 1.0 - reliability;
    let tail = |i: usize| {
        let p = curve.points()[i];
        if curve.kind() == CurveKind::Empirical {
            p.upper_envelope()
        } else {
            p.tail
        }
    };
    let pts = curve.points();
    let Some(last_above) = (0..pts.len()).rev().find(|&i| tail(i) > target) else {
        return Ok(pts[0].tau);
    };
    if last_above + 1 == pts.len() {
        let min_tail = (0..pts.len()).map(tail).fold(f64::INFINITY, f64::min);
        return Err(Error::UnreachableReliability {
            reliability,
            min_tail,
        });
    }
    let (a, b) = (last_above, last_above + 1);
    let (pa, pb) = (tail(a), tail(b));
    let frac = if pb > 0.0 {
        (target.ln() - pa.ln()) / (pb.ln() - pa.ln())
    } else {
        (pa - target) / pa
    };
    Ok(pts[a].tau + frac.clamp(0.0, 1.0) * (pts[b].tau - pts[a].tau))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitAssessment {
    pub split: SplitOption,
    pub feasible: bool,
    /// Budget minus achievable latency; absent when the target is unreachable.
    pub margin_s: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitRecommendation {
    pub reliability: f64,
    pub achievable_latency_s: Option<f64>,
    /// Most centralized feasible split, if any.
    pub recommended: Option<String>,
    /// Feasible splits first, each group ordered from lowest split point
    /// (tightest budget) up.
    pub assessments: Vec<SplitAssessment>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

pub fn recommend_splits(
    curve: &DelayCurve,
    reliability: f64,
    splits: &[SplitOption],
) -> Result<SplitRecommendation> {
    for s in splits {
        s.validate()?;
    }
    let (latency, reason) = match achievable_latency(curve, reliability) {
        Ok(t) => (Some(t), None),
        Err(e @ Error::UnreachableReliability { .. }) => (None, Some(e.to_string())),
        Err(e) => return Err(e),
    };
    let mut assessments: Vec<SplitAssessment> = splits
        .iter()
        .map(|s| {
            let margin = latency.map(|t| s.one_way_latency_budget_s - t);
            SplitAssessment {
                split: s.clone(),
                feasible: margin.is_some_and(|m| m >= 0.0),
                margin_s: margin,
            }
        })
        .collect();
    assessments.sort_by(|a, b| {
        b.feasible.cmp(&a.feasible).then(
            a.split
                .one_way_latency_budget_s
                .total_cmp(&b.split.one_way_latency_budget_s),
        )
    });
    let recommended = assessments
        .first()
        .filter(|a| a.feasible)
        .map(|a| a.split.name.clone());
    Ok(SplitRecommendation {
        reliability,
        achievable_latency_s: latency,
        recommended,
        assessments,
        reason,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioMatch {
    pub scenario: ScenarioRequirement,
    pub supported: bool,
    pub achievable_latency_s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

/// A scenario is supported when the curve reaches its reliability within
/// its whole end-to-end budget.
pub fn match_scenarios(
    curve: &DelayCurve,
    scenarios: &[ScenarioRequirement],
) -> Result<Vec<ScenarioMatch>> {
    scenarios
        .iter()
        .map(|s| {
            s.validate()?;
            Ok(match achievable_latency(curve, s.reliability) {
                Ok(t) => ScenarioMatch {
                    scenario: s.clone(),
                    supported: t <= s.end_to_end_latency_s,
                    achievable_latency_s: Some(t),
                    reason: None,
                },
                Err(e @ Error::UnreachableReliability { .. }) => ScenarioMatch {
                    scenario: s.clone(),
                    supported: false,
                    achievable_latency_s: None,
                    reason: Some(e.to_string()),
                },
                Err(e) => return Err(e),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forkjoin::{CurveMetadata, CurvePoint};
    use proptest::prelude::*;

    fn analytic(points: &[(f64, f64)]) -> DelayCurve {
        DelayCurve::new(
            CurveKind::AnalyticUpper,
            points
                .iter()
                .map(|&(t, p)| CurvePoint::analytic(t, p))
                .collect(),
            CurveMetadata::default(),
        )
        .unwrap()
    }

    /// `e^{-τ/scale}` on a grid, so 1e-6 is crossed at `scale · ln 1e6`.
    fn exponential_curve(scale: f64, max: f64, points: usize) -> DelayCurve {
        let pts: Vec<(f64, f64)> = (0..points)
            .map(|i| {
                let t = max * i as f64 / (points - 1) as f64;
                (t, (-t / scale).exp())
            })
            .collect();
        analytic(&pts)
    }

    /// Curve whose 1e-6 crossing sits at `tau_star`.
    fn crossing_at(tau_star: f64) -> DelayCurve {
        exponential_curve(tau_star / 1e6f64.ln(), 3.0 * tau_star, 301)
    }

    #[test]
    fn inverts_exponential_tail() {
        let c = exponential_curve(1.0, 30.0, 301);
        let t = achievable_latency(&c, 1.0 - 1e-6).unwrap();
        assert!((t - 1e6f64.ln()).abs() < 1e-9, "{t}");
    }

    #[test]
    fn satisfied_at_origin() {
        let c = analytic(&[(0.0, 1e-9), (1.0, 1e-10)]);
        assert_eq!(achievable_latency(&c, 0.999999).unwrap(), 0.0);
    }

    #[test]
    fn unreachable_and_invalid() {
        let c = analytic(&[(0.0, 1.0), (1.0, 1e-3)]);
        assert!(matches!(
            achievable_latency(&c, 0.999999),
            Err(Error::UnreachableReliability { .. })
        ));
        assert!(achievable_latency(&c, 1.0).is_err());
        assert!(achievable_latency(&c, 0.0).is_err());
    }

    #[test]
    fn zero_tail_falls_back_to_linear() {
        let c = analytic(&[(0.0, 1.0), (1.0, 0.0)]);
        let t = achievable_latency(&c, 0.75).unwrap();
        assert!((t - 0.75).abs() < 1e-15);
    }

    #[test]
    fn empirical_uses_upper_envelope() {
        let pts = vec![
            CurvePoint {
                tau: 0.0,
                tail: 1.0,
                ci_half_width: Some(0.0),
            },
            CurvePoint {
                tau: 1.0,
                tail: 1e-3,
                ci_half_width: Some(1e-3),
            },
            CurvePoint {
                tau: 2.0,
                tail: 1e-5,
                ci_half_width: Some(1e-5),
            },
        ];
        let meta = CurveMetadata {
            sample_count: Some(100),
            ..Default::default()
        };
        let c = DelayCurve::new(CurveKind::Empirical, pts, meta).unwrap();
        // 1.5e-3 is crossed between 1.0 (env 2e-3) and 2.0 (env 2e-5)
        let t = achievable_latency(&c, 1.0 - 1.5e-3).unwrap();
        let expected = 1.0 + (1.5e-3f64 / 2e-3).ln() / (2e-5f64 / 2e-3).ln();
        assert!((t - expected).abs() < 1e-12);
    }

    #[test]
    fn split_fixtures() {
        let splits = builtin_splits();
        let rec = recommend_splits(&crossing_at(0.167e-3), 0.999999, &splits).unwrap();
        assert_eq!(rec.recommended.as_deref(), Some("MAC-PHY"));
        assert!(rec.assessments.iter().all(|a| a.feasible));
        let mac = &rec.assessments[0];
        assert_eq!(mac.split.name, "MAC-PHY");
        assert!((mac.margin_s.unwrap() - 0.083e-3).abs() < 1e-9);

        let rec = recommend_splits(&crossing_at(0.6e-3), 0.999999, &splits).unwrap();
        assert_eq!(rec.recommended.as_deref(), Some("PDCP-RLC"));
        let feasible: Vec<_> = rec.assessments.iter().filter(|a| a.feasible).collect();
        assert_eq!(feasible.len(), 1);
        assert_eq!(rec.assessments[1].split.name, "MAC-PHY");

        let rec = recommend_splits(&crossing_at(20e-3), 0.999999, &splits).unwrap();
        assert_eq!(rec.recommended, None);
        assert!(rec.assessments.iter().all(|a| !a.feasible));
    }

    #[test]
    fn unreachable_split_reports_reason() {
        let c = analytic(&[(0.0, 1.0), (1e-3, 1e-3)]);
        let rec = recommend_splits(&c, 0.999999, &builtin_splits()).unwrap();
        assert!(rec.recommended.is_none());
        assert!(rec.reason.unwrap().contains("unreachable"));
        assert!(rec
            .assessments
            .iter()
            .all(|a| !a.feasible && a.margin_s.is_none()));
    }

    #[test]
    fn scenario_fixtures() {
        let m = match_scenarios(&crossing_at(0.167e-3), &builtin_scenarios()).unwrap();
        assert_eq!(m[0].scenario.name, "Tactile interaction");
        assert!(m.iter().all(|s| s.supported));

        // reaches only 99.9%: tail floor of 1e-3
        let c = analytic(&[(0.0, 1.0), (1e-3, 1e-2), (2e-3, 1e-3)]);
        let m = match_scenarios(&c, &builtin_scenarios()).unwrap();
        let hv = m
            .iter()
            .find(|s| s.scenario.name.contains("high voltage"))
            .unwrap();
        assert!(!hv.supported);
        assert!(hv.reason.is_some());
        assert!(match_scenarios(&c, &[]).unwrap().is_empty());
    }

    #[test]
    fn data_files_round_trip() {
        let text = serde_json::to_string(&builtin_splits()).unwrap();
        let back: Vec<SplitOption> = serde_json::from_str(&text).unwrap();
        assert_eq!(back, builtin_splits());
        let bad = ScenarioRequirement {
            reliability: 1.0,
            ..builtin_scenarios()[0].clone()
        };
        assert!(match_scenarios(&crossing_at(1e-3), &[bad]).is_err());
    }

    proptest! {
        #[test]
        fn inversion_is_monotone(
            scale in 1e-5f64..1e-3,
            r1 in 0.5f64..0.9999999,
            r2 in 0.5f64..0.9999999,
            factor in 1.0f64..3.0,
        ) {
            let a = exponential_curve(scale, 40.0 * scale * factor, 200);
            let b = exponential_curve(scale * factor, 40.0 * scale * factor, 200);
            let (lo, hi) = if r1 <= r2 { (r1, r2) } else { (r2, r1) };
            let t_lo = achievable_latency(&a, lo).unwrap();
            let t_hi = achievable_latency(&a, hi).unwrap();
            prop_assert!(t_lo <= t_hi);
            // a dominates b pointwise
            prop_assert!(t_hi <= achievable_latency(&b, hi).unwrap() + 1e-15);
            // round trip in log space
            let tail_at = (-t_hi / scale).exp();
            prop_assert!(tail_at.ln() <= (1.0 - hi).ln() + 0.01 * (1.0 - hi).ln().abs());
        }

        #[test]
        fn feasibility_monotone_in_budget(tau in 1e-5f64..2e-2, b1 in 1e-5f64..2e-2, b2 in 1e-5f64..2e-2) {
            let splits = vec![
                SplitOption { name: "a".into(), one_way_latency_budget_s: b1, dl_bandwidth_bps: None, ul_bandwidth_bps: None, note: None },
                SplitOption { name: "b".into(), one_way_latency_budget_s: b2, dl_bandwidth_bps: None, ul_bandwidth_bps: None, note: None },
            ];
            let rec = recommend_splits(&crossing_at(tau), 0.999999, &splits).unwrap();
            for x in &rec.assessments {
                for y in &rec.assessments {
                    if x.feasible && y.split.one_way_latency_budget_s >= x.split.one_way_latency_budget_s {
                        prop_assert!(y.feasible);
                    }
                }
            }
        }
    }
}
