use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use crate::error::{Error, Result};
use crate::forkjoin::{bound_curve, BoundKind, CurveKind, DelayCurve};
use crate::planner::{
    achievable_latency, match_scenarios, recommend_splits, ScenarioMatch, ScenarioRequirement,
    SplitOption, SplitRecommendation,
};
use crate::sim::{
    class_fork_join, plan_resources, replicate, AllocationPolicy, MeanEstimate, DEFAULT_Z,
};

/// Tail level below which `compare` does not check the bracket.
pub const DEFAULT_MIN_TAIL: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl OutputFormat {
    pub fn extension(self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        }
    }
}

/// Replaces `path` in one step: the bytes go to a temporary file in the
/// same directory, which is then renamed over the target.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

pub fn write_curve(
    dir: &Path,
    stem: &str,
    curve: &DelayCurve,
    format: OutputFormat,
) -> Result<PathBuf> {
    let path = dir.join(format!("{stem}.{}", format.extension()));
    let text = match format {
        OutputFormat::Csv => curve.to_csv_string()?,
        OutputFormat::Json => curve.to_json_string()?,
    };
    write_atomic(&path, text.as_bytes())?;
    Ok(path)
}

pub fn read_curve(path: &Path) -> Result<DelayCurve> {
    let text = std::fs::read_to_string(path)?;
    DelayCurve::parse_any(&text)
        .map_err(|e| Error::InvalidCurve(format!("{}: {e}", path.display())))
}

fn to_json_bytes<T: Serialize>(value: &T) -> Result<Vec<u8>> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s.into_bytes())
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassBounds {
    pub class: String,
    pub lower: DelayCurve,
    pub upper: DelayCurve,
}

/// Lower and upper bound curves of every class, in class order.
pub fn bound_curves(cfg: &ExperimentConfig) -> Result<Vec<ClassBounds>> {
    if !cfg.policy.is_orthogonal() {
        return Err(Error::Config(
            "bounds: the analytic model covers one class on private resources; \
             non_orthogonal sharing can only be simulated"
                .into(),
        ));
    }
    let topology = cfg.topology.build();
    let classes = cfg.traffic_classes();
    let plan = plan_resources(&topology, &classes, &cfg.policy)?;
    let grid = cfg.grid();
    let config = cfg.canonical();
    classes
        .iter()
        .zip(&plan.classes)
        .map(|(class, cp)| {
            let fj = class_fork_join(class, cp, &cfg.policy)?;
            let make = |which| -> Result<DelayCurve> {
                let mut c = bound_curve(&fj, class.arrival_rate, &grid, which, cfg.eps_trunc)?;
                let meta = c.metadata_mut();
                meta.label = Some(class.name.clone());
                meta.config = Some(config.clone());
                Ok(c)
            };
            Ok(ClassBounds {
                class: class.name.clone(),
                lower: make(BoundKind::Lower)?,
                upper: make(BoundKind::Upper)?,
            })
        })
        .collect()
}

/// Writes `<class>_lower` and `<class>_upper` for every class.
pub fn cmd_bounds(
    cfg: &ExperimentConfig,
    dir: &Path,
    format: OutputFormat,
) -> Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    for b in bound_curves(cfg)? {
        files.push(write_curve(
            dir,
            &format!("{}_lower", b.class),
            &b.lower,
            format,
        )?);
        files.push(write_curve(
            dir,
            &format!("{}_upper", b.class),
            &b.upper,
            format,
        )?);
    }
    Ok(files)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatencyAtTarget {
    pub reliability: f64,
    /// Absent when the curve never drops to `1 - reliability`.
    pub latency_s: Option<f64>,
}

fn latencies(curve: &DelayCurve, targets: &[f64]) -> Vec<LatencyAtTarget> {
    targets
        .iter()
        .map(|&r| LatencyAtTarget {
            reliability: r,
            latency_s: achievable_latency(curve, r).ok(),
        })
        .collect()
}

/// Degenerate single-queue check against M/M/1 theory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mm1Check {
    pub service_rate: f64,
    pub expected_mean_delay: f64,
    pub delay_z: f64,
    pub expected_in_system: f64,
    pub in_system_z: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassSummary {
    pub name: String,
    pub samples: u64,
    pub mean_delay: MeanEstimate,
    pub in_system_at_arrival: MeanEstimate,
    /// `λ · mean delay`; equals the mean number in system by Little's law
    /// when the class owns its queues.
    pub arrival_rate_times_delay: f64,
    pub completion_mismatches: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mm1: Option<Mm1Check>,
    pub achievable_latency: Vec<LatencyAtTarget>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueueSummary {
    pub blocks: u64,
    /// Busy time over the last arrival time, averaged over replications.
    pub utilization: f64,
    pub fifo_violations: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationSummary {
    pub config: serde_json::Value,
    pub base_seed: u64,
    pub replications: u32,
    pub packets: u64,
    pub warmup: u64,
    pub classes: Vec<ClassSummary>,
    pub queues: Vec<QueueSummary>,
}

#[derive(Debug, Clone)]
pub struct SimulationOutput {
    pub summary: SimulationSummary,
    pub curves: Vec<DelayCurve>,
}

fn pool(estimates: impl Iterator<Item = MeanEstimate>) -> MeanEstimate {
    let all: Vec<MeanEstimate> = estimates.collect();
    let count: u64 = all.iter().map(|e| e.count).sum();
    let n = count as f64;
    let mean = all.iter().map(|e| e.mean * e.count as f64).sum::<f64>() / n;
    let var = all
        .iter()
        .map(|e| (e.count as f64 / n * e.stderr).powi(2))
        .sum::<f64>();
    MeanEstimate {
        mean,
        stderr: var.sqrt(),
        count,
    }
}

/// Runs every replication and pools the per-class results.
pub fn simulate_experiment(
    cfg: &ExperimentConfig,
) -> Result<(SimulationOutput, crate::sim::Replicated)> {
    let spec = cfg.sim_spec();
    let grid = cfg.grid();
    let rep = replicate(&spec, cfg.replications, cfg.base_seed, &grid, DEFAULT_Z)?;
    let plan = plan_resources(&spec.topology, &spec.classes, &spec.policy)?;
    let config = cfg.canonical();

    let mut curves = rep.pooled.clone();
    for c in &mut curves {
        c.metadata_mut().config = Some(config.clone());
    }
    let classes = spec
        .classes
        .iter()
        .enumerate()
        .map(|(ci, class)| {
            let delay = pool(rep.runs.iter().map(|r| r.classes[ci].delay));
            let in_system = pool(rep.runs.iter().map(|r| r.classes[ci].in_system_at_arrival));
            let cp = &plan.classes[ci];
            let private = spec.policy.is_orthogonal() || spec.classes.len() == 1;
            let mm1 = (private && class.n_alloc == 1 && class.k == 1).then(|| {
                let mu = cp.block_service_rate[0];
                let lambda = class.arrival_rate;
                let w = 1.0 / (mu - lambda);
                let l = lambda * w;
                Mm1Check {
                    service_rate: mu,
                    expected_mean_delay: w,
                    delay_z: delay.z_score(w),
                    expected_in_system: l,
                    in_system_z: in_system.z_score(l),
                }
            });
            ClassSummary {
                name: class.name.clone(),
                samples: curves[ci].metadata().sample_count.unwrap_or(0),
                mean_delay: delay,
                in_system_at_arrival: in_system,
                arrival_rate_times_delay: class.arrival_rate * delay.mean,
                completion_mismatches: rep
                    .runs
                    .iter()
                    .map(|r| r.classes[ci].completion_mismatches)
                    .sum(),
                mm1,
                achievable_latency: latencies(&curves[ci], &cfg.reliability_targets),
            }
        })
        .collect();
    let queues = (0..plan.n_queues)
        .map(|q| {
            let runs = rep.runs.len() as f64;
            QueueSummary {
                blocks: rep.runs.iter().map(|r| r.queues[q].blocks).sum(),
                utilization: rep
                    .runs
                    .iter()
                    .map(|r| r.queues[q].busy_time / r.horizon)
                    .sum::<f64>()
                    / runs,
                fifo_violations: rep.runs.iter().map(|r| r.queues[q].fifo_violations).sum(),
            }
        })
        .collect();
    let summary = SimulationSummary {
        config,
        base_seed: cfg.base_seed,
        replications: cfg.replications,
        packets: spec.packets,
        warmup: spec.warmup,
        classes,
        queues,
    };
    Ok((SimulationOutput { summary, curves }, rep))
}

/// Writes `<class>_sim` curves and `simulate_summary.json`; with
/// `raw_samples`, also `<class>_samples.f64` (little-endian delays of all
/// replications in order).
pub fn cmd_simulate(
    cfg: &ExperimentConfig,
    dir: &Path,
    format: OutputFormat,
    raw_samples: bool,
) -> Result<(SimulationOutput, Vec<PathBuf>)> {
    let (out, rep) = simulate_experiment(cfg)?;
    let mut files = Vec::new();
    for c in &out.curves {
        let name = c.metadata().label.clone().unwrap_or_default();
        files.push(write_curve(dir, &format!("{name}_sim"), c, format)?);
    }
    if raw_samples {
        for (ci, class) in out.summary.classes.iter().enumerate() {
            let bytes: Vec<u8> = rep
                .runs
                .iter()
                .flat_map(|r| r.classes[ci].samples.iter().flat_map(|s| s.to_le_bytes()))
                .collect();
            let path = dir.join(format!("{}_samples.f64", class.name));
            write_atomic(&path, &bytes)?;
            files.push(path);
        }
    }
    let path = dir.join("simulate_summary.json");
    write_atomic(&path, &to_json_bytes(&out.summary)?)?;
    files.push(path);
    Ok((out, files))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationSide {
    BelowLower,
    AboveUpper,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub tau: f64,
    pub empirical: f64,
    pub ci_half_width: f64,
    pub lower: f64,
    pub upper: f64,
    pub side: ViolationSide,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareReport {
    pub label: Option<String>,
    pub min_tail: f64,
    pub points_compared: usize,
    pub points_checked: usize,
    pub violations: Vec<Violation>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config: Option<serde_json::Value>,
}

impl CompareReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks `LB - hw <= p_sim <= UB + hw` at every latency the three curves
/// share where the simulated or lower-bound tail is at least `min_tail`;
/// `hw` is the simulated curve's confidence half-width.
pub fn compare_curves(
    lower: &DelayCurve,
    upper: &DelayCurve,
    sim: &DelayCurve,
    min_tail: f64,
) -> Result<CompareReport> {
    let expect = |c: &DelayCurve, kind: CurveKind, role: &str| {
        if c.kind() == kind {
            Ok(())
        } else {
            Err(Error::InvalidCurve(format!(
                "{role} curve has kind {}, expected {}",
                c.kind().as_str(),
                kind.as_str()
            )))
        }
    };
    expect(lower, CurveKind::AnalyticLower, "lower")?;
    expect(upper, CurveKind::AnalyticUpper, "upper")?;
    expect(sim, CurveKind::Empirical, "simulated")?;

    let find = |c: &DelayCurve, tau: f64| c.points().iter().find(|p| p.tau == tau).copied();
    let mut compared = 0;
    let mut checked = 0;
    let mut violations = Vec::new();
    for s in sim.points() {
        let (Some(lo), Some(up)) = (find(lower, s.tau), find(upper, s.tau)) else {
            continue;
        };
        compared += 1;
        if s.tail.max(lo.tail) < min_tail {
            continue;
        }
        checked += 1;
        let hw = s.ci_half_width.unwrap_or(0.0);
        let side = if s.tail < lo.tail - hw {
            Some(ViolationSide::BelowLower)
        } else if s.tail > up.tail + hw {
            Some(ViolationSide::AboveUpper)
        } else {
            None
        };
        if let Some(side) = side {
            violations.push(Violation {
                tau: s.tau,
                empirical: s.tail,
                ci_half_width: hw,
                lower: lo.tail,
                upper: up.tail,
                side,
            });
        }
    }
    if compared == 0 {
        return Err(Error::InvalidCurve(
            "the curves share no grid latency; regenerate them on one tau grid".into(),
        ));
    }
    Ok(CompareReport {
        label: sim.metadata().label.clone(),
        min_tail,
        points_compared: compared,
        points_checked: checked,
        violations,
        config: sim.metadata().config.clone(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParameter {
    K,
    BwU,
    NU,
}

impl SweepParameter {
    pub fn as_str(self) -> &'static str {
        match self {
            SweepParameter::K => "k",
            SweepParameter::BwU => "bw_u",
            SweepParameter::NU => "n_u",
        }
    }
}

impl std::str::FromStr for SweepParameter {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "k" => Ok(SweepParameter::K),
            "bw_u" => Ok(SweepParameter::BwU),
            "n_u" => Ok(SweepParameter::NU),
            _ => Err(Error::Config(format!(
                "unknown sweep parameter {s:?} (k, bw_u, n_u)"
            ))),
        }
    }
}

fn whole(value: f64, param: SweepParameter) -> Result<usize> {
    if value >= 1.0 && value.fract() == 0.0 && value <= u32::MAX as f64 {
        Ok(value as usize)
    } else {
        Err(Error::Config(format!(
            "{} values must be positive integers, got {value}",
            param.as_str()
        )))
    }
}

/// Config of one sweep point. Under an orthogonal policy the target class
/// runs alone on the resources the swept value grants it; under shared
/// queues every class stays and only the target's `k` changes.
pub fn sweep_point_config(
    cfg: &ExperimentConfig,
    param: SweepParameter,
    value: f64,
    class_index: usize,
) -> Result<ExperimentConfig> {
    let mut out = cfg.clone();
    let orthogonal = cfg.policy.is_orthogonal();
    if orthogonal {
        out.classes = vec![cfg.classes[class_index].clone()];
        out.policy = match &cfg.policy {
            AllocationPolicy::OrthogonalBandwidth { fractions } => {
                AllocationPolicy::OrthogonalBandwidth {
                    fractions: vec![fractions[class_index]],
                }
            }
            AllocationPolicy::OrthogonalPath { paths } => AllocationPolicy::OrthogonalPath {
                paths: vec![paths[class_index]],
            },
            AllocationPolicy::NonOrthogonal => unreachable!(),
        };
    }
    let target = if orthogonal { 0 } else { class_index };
    match (param, &mut out.policy) {
        (SweepParameter::K, _) => out.classes[target].k = whole(value, param)?,
        (SweepParameter::BwU, AllocationPolicy::OrthogonalBandwidth { fractions }) => {
            fractions[0] = value;
        }
        (SweepParameter::NU, AllocationPolicy::OrthogonalPath { paths }) => {
            let n = whole(value, param)?;
            paths[0] = n;
            out.classes[0].n_alloc = Some(n);
        }
        (SweepParameter::BwU, _) => {
            return Err(Error::Config(
                "bw_u sweeps need an orthogonal_bandwidth policy".into(),
            ))
        }
        (SweepParameter::NU, _) => {
            return Err(Error::Config(
                "n_u sweeps need an orthogonal_path policy".into(),
            ))
        }
    }
    out.resolve()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub value: f64,
    pub curve: String,
    pub reliability: f64,
    pub latency_s: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepReport {
    pub parameter: SweepParameter,
    pub class: String,
    pub rows: Vec<SweepRow>,
    pub files: Vec<PathBuf>,
}

impl SweepReport {
    /// Achievable latency of `curve` at `reliability` for each swept value.
    pub fn series(&self, curve: &str, reliability: f64) -> Vec<(f64, Option<f64>)> {
        self.rows
            .iter()
            .filter(|r| r.curve == curve && r.reliability == reliability)
            .map(|r| (r.value, r.latency_s))
            .collect()
    }
}

pub struct SweepRequest<'a> {
    pub parameter: SweepParameter,
    pub values: &'a [f64],
    /// Class to sweep; the first class when absent.
    pub class: Option<&'a str>,
    pub simulate: bool,
}

/// One run per value. Each point writes its curves under
/// `<parameter>_<value>/`; `sweep_summary.csv` lists the achievable
/// latency of every curve at every configured reliability target.
pub fn cmd_sweep(
    cfg: &ExperimentConfig,
    req: &SweepRequest,
    dir: &Path,
    format: OutputFormat,
) -> Result<SweepReport> {
    if req.values.is_empty() {
        return Err(Error::Config("sweep needs at least one value".into()));
    }
    let class_index = match req.class {
        None => 0,
        Some(name) => cfg
            .classes
            .iter()
            .position(|c| c.name == name)
            .ok_or_else(|| Error::Config(format!("no class named {name:?}")))?,
    };
    let class = cfg.classes[class_index].name.clone();
    if !cfg.policy.is_orthogonal() && !req.simulate {
        return Err(Error::Config(
            "a sweep under non_orthogonal sharing has no analytic bounds; pass --simulate".into(),
        ));
    }
    let points: Vec<ExperimentConfig> = req
        .values
        .iter()
        .map(|&v| sweep_point_config(cfg, req.parameter, v, class_index))
        .collect::<Result<_>>()?;

    let per_value: Vec<(Vec<SweepRow>, Vec<PathBuf>)> = req
        .values
        .par_iter()
        .zip(&points)
        .map(|(&value, point)| {
            let sub = dir.join(format!("{}_{value}", req.parameter.as_str()));
            let mut curves: Vec<(&str, DelayCurve)> = Vec::new();
            let mut files = Vec::new();
            if point.policy.is_orthogonal() {
                let b = bound_curves(point)?
                    .into_iter()
                    .find(|b| b.class == class)
                    .unwrap();
                files.push(write_curve(
                    &sub,
                    &format!("{class}_lower"),
                    &b.lower,
                    format,
                )?);
                files.push(write_curve(
                    &sub,
                    &format!("{class}_upper"),
                    &b.upper,
                    format,
                )?);
                curves.push(("lower", b.lower));
                curves.push(("upper", b.upper));
            }
            if req.simulate {
                let (out, _) = simulate_experiment(point)?;
                let c = out
                    .curves
                    .into_iter()
                    .find(|c| c.metadata().label.as_deref() == Some(&class))
                    .unwrap();
                files.push(write_curve(&sub, &format!("{class}_sim"), &c, format)?);
                curves.push(("sim", c));
            }
            let rows = curves
                .iter()
                .flat_map(|(name, c)| {
                    latencies(c, &point.reliability_targets)
                        .into_iter()
                        .map(|l| SweepRow {
                            value,
                            curve: name.to_string(),
                            reliability: l.reliability,
                            latency_s: l.latency_s,
                        })
                })
                .collect();
            Ok((rows, files))
        })
        .collect::<Result<_>>()?;

    let mut rows = Vec::new();
    let mut files = Vec::new();
    for (r, f) in per_value {
        rows.extend(r);
        files.extend(f);
    }

    let mut text = String::new();
    writeln!(
        text,
        "# config: {}",
        serde_json::to_string(&cfg.canonical())?
    )
    .unwrap();
    writeln!(
        text,
        "# sweep: {}",
        serde_json::json!({
            "parameter": req.parameter.as_str(),
            "class": class,
            "values": req.values,
            "simulate": req.simulate,
        })
    )
    .unwrap();
    writeln!(
        text,
        "parameter,value,curve,reliability,achievable_latency_s"
    )
    .unwrap();
    for r in &rows {
        let lat = r.latency_s.map(|t| format!("{t:.16e}")).unwrap_or_default();
        writeln!(
            text,
            "{},{},{},{},{}",
            req.parameter.as_str(),
            r.value,
            r.curve,
            r.reliability,
            lat
        )
        .unwrap();
    }
    let path = dir.join("sweep_summary.csv");
    write_atomic(&path, text.as_bytes())?;
    files.push(path);
    Ok(SweepReport {
        parameter: req.parameter,
        class,
        rows,
        files,
    })
}

pub fn load_splits(path: &Path) -> Result<Vec<SplitOption>> {
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

pub fn load_scenarios(path: &Path) -> Result<Vec<ScenarioRequirement>> {
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecommendReport {
    /// Budgets are compared against fronthaul latency alone.
    pub fronthaul_only: bool,
    pub curve_kind: CurveKind,
    pub label: Option<String>,
    pub recommendation: SplitRecommendation,
    pub scenarios: Vec<ScenarioMatch>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config: Option<serde_json::Value>,
}

pub fn cmd_recommend(
    curve: &DelayCurve,
    reliability: f64,
    splits: &[SplitOption],
    scenarios: &[ScenarioRequirement],
) -> Result<RecommendReport> {
    Ok(RecommendReport {
        fronthaul_only: true,
        curve_kind: curve.kind(),
        label: curve.metadata().label.clone(),
        recommendation: recommend_splits(curve, reliability, splits)?,
        scenarios: match_scenarios(curve, scenarios)?,
        config: curve.metadata().config.clone(),
    })
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    write_atomic(path, &to_json_bytes(value)?)
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.12e}")).unwrap_or_else(|| "-".into())
}

/// Plain-text tables of a recommendation.
pub fn render_recommendation(r: &RecommendReport) -> String {
    let rec = &r.recommendation;
    let mut s = String::new();
    writeln!(
        s,
        "fronthaul-only comparison (no air-interface or core budget subtracted)"
    )
    .unwrap();
    writeln!(
        s,
        "reliability {}  achievable latency {} s",
        rec.reliability,
        fmt_opt(rec.achievable_latency_s)
    )
    .unwrap();
    if let Some(reason) = &rec.reason {
        writeln!(s, "{reason}").unwrap();
    }
    writeln!(
        s,
        "\n{:<12} {:>20} {:>9} {:>20}",
        "split", "budget_s", "feasible", "margin_s"
    )
    .unwrap();
    for a in &rec.assessments {
        writeln!(
            s,
            "{:<12} {:>20} {:>9} {:>20}",
            a.split.name,
            format!("{:.12e}", a.split.one_way_latency_budget_s),
            if a.feasible { "yes" } else { "no" },
            fmt_opt(a.margin_s)
        )
        .unwrap();
    }
    writeln!(
        s,
        "recommended: {}",
        rec.recommended.as_deref().unwrap_or("none")
    )
    .unwrap();
    if !r.scenarios.is_empty() {
        writeln!(
            s,
            "\n{:<45} {:>10} {:>20} {:>10}",
            "scenario", "reliability", "budget_s", "supported"
        )
        .unwrap();
        for m in &r.scenarios {
            writeln!(
                s,
                "{:<45} {:>10} {:>20} {:>10}",
                m.scenario.name,
                m.scenario.reliability,
                format!("{:.12e}", m.scenario.end_to_end_latency_s),
                if m.supported { "yes" } else { "no" }
            )
            .unwrap();
        }
    }
    s
}
