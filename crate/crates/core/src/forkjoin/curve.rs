//! Tail-probability curves and their on-disk forms.
//!
//! CSV layout:
//!
//! ```text
//! # kind: analytic_upper
//! # metadata: {"fork_join":{...},"arrival_rate":8000.0,...}
//! tau_seconds,tail_probability,ci_half_width
//! 1.0000000000000000e-6,9.9999999999999989e-1,
//! ```
//!
//! Numbers are written with 17 significant digits so every f64 reads back
//! bit-identical. `ci_half_width` is empty for analytic curves.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::config::ForkJoinConfig;
use crate::error::{Error, Result};

pub const CSV_HEADER: &str = "tau_seconds,tail_probability,ci_half_width";

/// Rounding slack allowed when checking that an analytic tail never rises.
const MONOTONE_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CurveKind {
    AnalyticLower,
    AnalyticUpper,
    Empirical,
}

impl CurveKind {
    pub fn as_str(self) -> &'static str {
        match self {
            CurveKind::AnalyticLower => "analytic_lower",
            CurveKind::AnalyticUpper => "analytic_upper",
            CurveKind::Empirical => "empirical",
        }
    }

    fn parse(s: &str) -> Result<Self> {
        match s {
            "analytic_lower" => Ok(CurveKind::AnalyticLower),
            "analytic_upper" => Ok(CurveKind::AnalyticUpper),
            "empirical" => Ok(CurveKind::Empirical),
            other => Err(Error::InvalidCurve(format!("unknown curve kind {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    /// Latency in seconds.
    pub tau: f64,
    /// `P{D > tau}`.
    pub tail: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ci_half_width: Option<f64>,
}

impl CurvePoint {
    pub fn analytic(tau: f64, tail: f64) -> Self {
        Self {
            tau,
            tail,
            ci_half_width: None,
        }
    }

    /// Upper end of the confidence band, clamped to 1.
    pub fn upper_envelope(&self) -> f64 {
        (self.tail + self.ci_half_width.unwrap_or(0.0)).min(1.0)
    }

    pub fn lower_envelope(&self) -> f64 {
        (self.tail - self.ci_half_width.unwrap_or(0.0)).max(0.0)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CurveMetadata {
    /// Traffic class the curve belongs to.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fork_join: Option<ForkJoinConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub arrival_rate: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps_trunc: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sample_count: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub replications: Option<u32>,
    /// Multiplier of the binomial standard error in `ci_half_width`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z: Option<f64>,
    /// Canonical experiment config that produced the curve.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config: Option<serde_json::Value>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DelayCurve {
    kind: CurveKind,
    points: Vec<CurvePoint>,
    metadata: CurveMetadata,
}

#[derive(Deserialize)]
struct RawCurve {
    kind: CurveKind,
    points: Vec<CurvePoint>,
    #[serde(default)]
    metadata: CurveMetadata,
}

impl<'de> Deserialize<'de> for DelayCurve {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RawCurve::deserialize(d)?;
        DelayCurve::new(raw.kind, raw.points, raw.metadata).map_err(serde::de::Error::custom)
    }
}

impl DelayCurve {
    pub fn new(kind: CurveKind, points: Vec<CurvePoint>, metadata: CurveMetadata) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidCurve("curve has no points".into()));
        }
        for (i, p) in points.iter().enumerate() {
            if !(p.tau.is_finite() && p.tau >= 0.0) {
                return Err(Error::InvalidCurve(format!(
                    "point {i}: latency {} invalid",
                    p.tau
                )));
            }
            if !(0.0..=1.0).contains(&p.tail) {
                return Err(Error::InvalidCurve(format!(
                    "point {i}: tail {} outside [0,1]",
                    p.tail
                )));
            }
            match (kind, p.ci_half_width) {
                (CurveKind::Empirical, Some(h)) if h.is_finite() && h >= 0.0 => {}
                (CurveKind::Empirical, _) => {
                    return Err(Error::InvalidCurve(format!(
                        "point {i}: empirical curves need a finite confidence half-width"
                    )))
                }
                (_, Some(_)) => {
                    return Err(Error::InvalidCurve(format!(
                        "point {i}: analytic curves carry no confidence half-width"
                    )))
                }
                (_, None) => {}
            }
        }
        for (i, w) in points.windows(2).enumerate() {
            if w[1].tau <= w[0].tau {
                return Err(Error::InvalidCurve(format!(
                    "latencies must strictly increase (point {})",
                    i + 1
                )));
            }
            if w[1].tail > w[0].tail * (1.0 + MONOTONE_SLACK) {
                return Err(Error::InvalidCurve(format!(
                    "tail rises from {:e} to {:e} at point {}",
                    w[0].tail,
                    w[1].tail,
                    i + 1
                )));
            }
        }
        if kind == CurveKind::Empirical && metadata.sample_count.is_none() {
            return Err(Error::InvalidCurve(
                "empirical curve without sample count".into(),
            ));
        }
        Ok(Self {
            kind,
            points,
            metadata,
        })
    }

    pub fn kind(&self) -> CurveKind {
        self.kind
    }

    pub fn points(&self) -> &[CurvePoint] {
        &self.points
    }

    pub fn metadata(&self) -> &CurveMetadata {
        &self.metadata
    }

    pub fn metadata_mut(&mut self) -> &mut CurveMetadata {
        &mut self.metadata
    }

    pub fn taus(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|p| p.tau)
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut out = String::new();
        writeln!(out, "# kind: {}", self.kind.as_str()).unwrap();
        writeln!(
            out,
            "# metadata: {}",
            serde_json::to_string(&self.metadata)?
        )
        .unwrap();
        writeln!(out, "{CSV_HEADER}").unwrap();
        for p in &self.points {
            write!(out, "{:.16e},{:.16e},", p.tau, p.tail).unwrap();
            if let Some(h) = p.ci_half_width {
                write!(out, "{h:.16e}").unwrap();
            }
            out.push('\n');
        }
        Ok(out)
    }

    pub fn from_csv_str(text: &str) -> Result<Self> {
        let mut kind = None;
        let mut metadata = CurveMetadata::default();
        for line in text.lines().take_while(|l| l.starts_with('#')) {
            let body = line.trim_start_matches('#').trim_start();
            if let Some(v) = body.strip_prefix("kind:") {
                kind = Some(CurveKind::parse(v.trim())?);
            } else if let Some(v) = body.strip_prefix("metadata:") {
                metadata = serde_json::from_str(v.trim())?;
            }
        }
        let kind = kind.ok_or_else(|| Error::InvalidCurve("missing '# kind:' line".into()))?;

        let mut reader = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .has_headers(true)
            .from_reader(text.as_bytes());
        let header: Vec<String> = reader.headers()?.iter().map(str::to_owned).collect();
        if header.join(",") != CSV_HEADER {
            return Err(Error::InvalidCurve(format!(
                "unexpected CSV header {header:?}"
            )));
        }
        let parse = |field: &str, row: usize| -> Result<f64> {
            field
                .trim()
                .parse()
                .map_err(|_| Error::InvalidCurve(format!("row {row}: bad number {field:?}")))
        };
        let mut points = Vec::new();
        for (row, record) in reader.records().enumerate() {
            let record = record?;
            let ci = record.get(2).filter(|s| !s.trim().is_empty());
            points.push(CurvePoint {
                tau: parse(&record[0], row)?,
                tail: parse(&record[1], row)?,
                ci_half_width: ci.map(|s| parse(s, row)).transpose()?,
            });
        }
        Self::new(kind, points, metadata)
    }

    pub fn to_json_string(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Reads either serialization, picking JSON when the text starts with `{`.
    pub fn parse_any(text: &str) -> Result<Self> {
        if text.trim_start().starts_with('{') {
            Self::from_json_str(text)
        } else {
            Self::from_csv_str(text)
        }
    }
}
