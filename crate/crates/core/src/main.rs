use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use fronthaul_latency::experiment::{
    self, cmd_bounds, cmd_recommend, cmd_simulate, cmd_sweep, compare_curves, load_scenarios,
    load_splits, read_curve, render_recommendation, write_json, ExperimentConfig, OutputFormat,
    Overrides, SweepParameter, SweepRequest,
};
use fronthaul_latency::planner::{builtin_scenarios, builtin_splits};
use fronthaul_latency::{Error, Result};

#[derive(Parser)]
#[command(
    name = "fhlat",
    version,
    about = "Latency bounds, simulation and split planning for coded multi-path fronthaul"
)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Experiment config (JSON), or any output file with an embedded config
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Directory for output files [default: config output_dir, else "."]
    #[arg(long, global = true)]
    output_dir: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Packets per class and replication; warm-up resets to 10%
    #[arg(long, global = true)]
    packets: Option<u64>,
    #[arg(long, global = true)]
    replications: Option<u32>,
    #[arg(long, global = true)]
    tau_min: Option<f64>,
    #[arg(long, global = true)]
    tau_max: Option<f64>,
    #[arg(long, global = true)]
    tau_points: Option<usize>,
    #[arg(long, global = true)]
    eps_trunc: Option<f64>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Lower and upper bound curves per class (orthogonal policies only)
    Bounds,
    /// Simulate every replication and write pooled empirical curves
    Simulate {
        /// Also dump every delay sample as little-endian f64
        #[arg(long)]
        raw_samples: bool,
    },
    /// Check that a simulated curve lies between its bounds
    Compare {
        #[arg(long)]
        lower: PathBuf,
        #[arg(long)]
        upper: PathBuf,
        #[arg(long)]
        sim: PathBuf,
        /// Skip grid points where both simulated and lower tails are below this
        #[arg(long, default_value_t = experiment::DEFAULT_MIN_TAIL)]
        min_tail: f64,
    },
    /// One run per value of k, bw_u or n_u
    Sweep {
        #[arg(long, value_parser = parse_parameter)]
        parameter: SweepParameter,
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<f64>,
        /// Class to sweep [default: first class]
        #[arg(long)]
        class: Option<String>,
        /// Also simulate each point
        #[arg(long)]
        simulate: bool,
    },
    /// Functional-split recommendation and scenario check for one curve
    Recommend {
        #[arg(long)]
        curve: PathBuf,
        #[arg(long, default_value_t = 0.999999)]
        reliability: f64,
        /// JSON list of splits [default: PDCP-RLC and MAC-PHY]
        #[arg(long)]
        splits: Option<PathBuf>,
        /// JSON list of scenarios [default: built-in 5G scenarios]
        #[arg(long)]
        scenarios: Option<PathBuf>,
    },
}

fn parse_parameter(s: &str) -> std::result::Result<SweepParameter, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

impl Common {
    fn format(&self) -> OutputFormat {
        match self.format {
            Format::Csv => OutputFormat::Csv,
            Format::Json => OutputFormat::Json,
        }
    }

    fn load(&self) -> Result<ExperimentConfig> {
        let path = self
            .config
            .as_deref()
            .ok_or_else(|| Error::Config("--config is required for this command".into()))?;
        let overrides = Overrides {
            seed: self.seed,
            packets: self.packets,
            replications: self.replications,
            tau_min: self.tau_min,
            tau_max: self.tau_max,
            tau_points: self.tau_points,
            eps_trunc: self.eps_trunc,
        };
        let raw_dir = read_output_dir(path);
        let mut cfg = ExperimentConfig::load(path)?.apply(&overrides)?;
        cfg.output_dir = raw_dir;
        Ok(cfg)
    }

    fn output_dir(&self, cfg: Option<&ExperimentConfig>) -> PathBuf {
        self.output_dir
            .clone()
            .or_else(|| cfg.and_then(|c| c.output_dir.clone()))
            .unwrap_or_else(|| PathBuf::from("."))
    }
}

/// `output_dir` of a plain config file; output files never carry one.
fn read_output_dir(path: &Path) -> Option<PathBuf> {
    let text = std::fs::read_to_string(path).ok()?;
    let value: serde_json::Value = serde_json::from_str(&text).ok()?;
    value.get("output_dir")?.as_str().map(PathBuf::from)
}

fn print_files(files: &[PathBuf]) {
    for f in files {
        println!("wrote {}", f.display());
    }
}

fn run(cli: Cli) -> Result<i32> {
    let common = &cli.common;
    match cli.command {
        Command::Bounds => {
            let cfg = common.load()?;
            print_files(&cmd_bounds(
                &cfg,
                &common.output_dir(Some(&cfg)),
                common.format(),
            )?);
        }
        Command::Simulate { raw_samples } => {
            let cfg = common.load()?;
            let dir = common.output_dir(Some(&cfg));
            let (out, files) = cmd_simulate(&cfg, &dir, common.format(), raw_samples)?;
            print_files(&files);
            for c in &out.summary.classes {
                println!(
                    "{}: {} samples, mean delay {:.12e} s (stderr {:.3e})",
                    c.name, c.samples, c.mean_delay.mean, c.mean_delay.stderr
                );
            }
        }
        Command::Compare {
            lower,
            upper,
            sim,
            min_tail,
        } => {
            let report = compare_curves(
                &read_curve(&lower)?,
                &read_curve(&upper)?,
                &read_curve(&sim)?,
                min_tail,
            )?;
            if let Some(dir) = &common.output_dir {
                let path = dir.join("compare_report.json");
                write_json(&path, &report)?;
                println!("wrote {}", path.display());
            }
            println!(
                "{}: {} shared points, {} checked, {} violations",
                report.label.as_deref().unwrap_or("curve"),
                report.points_compared,
                report.points_checked,
                report.violations.len()
            );
            for v in &report.violations {
                println!(
                    "  tau {:.12e}: sim {:.12e} +/- {:.3e} outside [{:.12e}, {:.12e}] ({:?})",
                    v.tau, v.empirical, v.ci_half_width, v.lower, v.upper, v.side
                );
            }
            if !report.passed() {
                return Ok(experiment::EXIT_BRACKET);
            }
        }
        Command::Sweep {
            parameter,
            values,
            class,
            simulate,
        } => {
            let cfg = common.load()?;
            let req = SweepRequest {
                parameter,
                values: &values,
                class: class.as_deref(),
                simulate,
            };
            let report = cmd_sweep(&cfg, &req, &common.output_dir(Some(&cfg)), common.format())?;
            print_files(&report.files);
        }
        Command::Recommend {
            curve,
            reliability,
            splits,
            scenarios,
        } => {
            let curve = read_curve(&curve)?;
            let splits = match splits {
                Some(p) => load_splits(&p)?,
                None => builtin_splits(),
            };
            let scenarios = match scenarios {
                Some(p) => load_scenarios(&p)?,
                None => builtin_scenarios(),
            };
            let report = cmd_recommend(&curve, reliability, &splits, &scenarios)?;
            if let Some(dir) = &common.output_dir {
                let path = dir.join("recommendation.json");
                write_json(&path, &report)?;
                println!("wrote {}", path.display());
            }
            print!("{}", render_recommendation(&report));
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(experiment::exit_code(&e) as u8)
        }
    }
}
