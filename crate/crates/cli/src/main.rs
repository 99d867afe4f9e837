mod config;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::json;
use zic_dmt::closed_form::{nocsit_threshold_antennas, nocsit_threshold_symmetric};
use zic_dmt::curve::{compute_curve, format_sig};
use zic_dmt::error::DmtError;
use zic_dmt::model::Csit;
use zic_dmt::montecarlo::{simulate_outage, McConfig};
use zic_dmt::validate::{run_all, ValidateOptions};

use config::{FileConfig, Format, RunConfig};

const EXIT_ERROR: u8 = 1;
const EXIT_VALIDATION_FAILED: u8 = 2;
const EXIT_INCONCLUSIVE: u8 = 3;

/// Diversity-multiplexing tradeoff of the MIMO Z interference channel.
#[derive(Debug, Parser)]
#[command(name = "zic-dmt", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// F-CSIT and No-CSIT DMT over a grid of multiplexing gains.
    Curve(Common),
    /// No-CSIT optimality threshold for the configured channel.
    Threshold(Common),
    /// Run the self-check suites and report JSON verdicts.
    Validate(ValidateArgs),
    /// Monte-Carlo outage counts and diversity slope.
    Mc(Common),
}

#[derive(Debug, Args)]
struct Common {
    /// JSON run configuration; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Antenna counts M1,N1,M2,N2.
    #[arg(long, value_parser = parse_antennas)]
    antennas: Option<[usize; 4]>,
    /// Scaling exponents a11,a21,a22.
    #[arg(long, value_parser = parse_alphas)]
    alphas: Option<[f64; 3]>,
    #[arg(long)]
    r_start: Option<f64>,
    #[arg(long)]
    r_stop: Option<f64>,
    #[arg(long)]
    r_step: Option<f64>,
    /// Explicit gain pair r1,r2; repeat for several. Replaces the r grid.
    #[arg(long = "gains", value_parser = parse_pair)]
    gains: Vec<[f64; 2]>,
    #[arg(long, value_parser = ["full", "none"])]
    csit: Option<String>,
    /// SNR points in dB, comma separated.
    #[arg(long, value_delimiter = ',')]
    snr_grid: Option<Vec<f64>>,
    /// Channel draws per SNR point.
    #[arg(long)]
    samples: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Minimum outages for an SNR point to enter the slope fit.
    #[arg(long)]
    min_hits: Option<u64>,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Debug, Args)]
struct ValidateArgs {
    #[command(flatten)]
    common: Common,
    /// Randomized instances for the program-equivalence suite.
    #[arg(long)]
    instances: Option<usize>,
    /// Skip the Monte-Carlo suite.
    #[arg(long)]
    no_mc: bool,
    /// Test hook: added to every LP weight in the closed-form suite.
    #[arg(long, hide = true, default_value_t = 0.0)]
    perturb_weights: f64,
}

fn split_numbers<T: std::str::FromStr>(s: &str, n: usize) -> Result<Vec<T>, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != n {
        return Err(format!("expected {n} comma-separated values, got '{s}'"));
    }
    parts
        .iter()
        .map(|p| {
            p.parse::<T>()
                .map_err(|_| format!("'{p}' is not a valid number"))
        })
        .collect()
}

fn parse_antennas(s: &str) -> Result<[usize; 4], String> {
    let v = split_numbers::<usize>(s, 4)?;
    Ok([v[0], v[1], v[2], v[3]])
}

fn parse_alphas(s: &str) -> Result<[f64; 3], String> {
    let v = split_numbers::<f64>(s, 3)?;
    Ok([v[0], v[1], v[2]])
}

fn parse_pair(s: &str) -> Result<[f64; 2], String> {
    let v = split_numbers::<f64>(s, 2)?;
    Ok([v[0], v[1]])
}

impl Common {
    fn resolve(&self) -> Result<RunConfig> {
        let file = match &self.config {
            Some(path) => FileConfig::load(path)?,
            None => FileConfig::default(),
        };
        let flags = FileConfig {
            antennas: self.antennas,
            alphas: self.alphas,
            r_start: self.r_start,
            r_stop: self.r_stop,
            r_step: self.r_step,
            gains: (!self.gains.is_empty()).then(|| self.gains.clone()),
            csit: self.csit.as_deref().map(str::parse::<Csit>).transpose()?,
            snr_grid_db: self.snr_grid.clone(),
            samples: self.samples,
            seed: self.seed,
            min_hits: self.min_hits,
            out: self.out.clone(),
            format: self.format,
        };
        RunConfig::resolve(file.overlay(flags))
    }
}

fn emit(rc: &RunConfig, text: &str) -> Result<()> {
    match &rc.out {
        Some(path) => {
            std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
        }
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn pretty(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values serialize");
    s.push('\n');
    s
}

fn cmd_curve(rc: &RunConfig) -> Result<u8> {
    let curve = compute_curve(rc.antennas, rc.alphas, rc.sweep.clone())?;
    let text = match rc.format {
        Format::Csv => curve.to_csv(),
        Format::Json => pretty(&curve.to_json()),
    };
    emit(rc, &text)?;
    Ok(0)
}

fn cmd_threshold(rc: &RunConfig) -> Result<u8> {
    let c = rc.antennas;
    let a = rc.alphas;
    let (kind, threshold, actual, met) = if c.is_symmetric() {
        if a.alpha11 != 1.0 || a.alpha22 != 1.0 {
            bail!(DmtError::Hypothesis(
                "the symmetric threshold needs alpha11 = alpha22 = 1".into()
            ));
        }
        let t = nocsit_threshold_symmetric(c.m1)?;
        ("symmetric", t, a.alpha21, a.alpha21 >= t)
    } else {
        if c.m1 != c.m2 {
            bail!(DmtError::Hypothesis(format!(
                "no threshold applies to {c}: needs equal antennas everywhere or M1 = M2"
            )));
        }
        if (a.alpha11, a.alpha21, a.alpha22) != (1.0, 1.0, 1.0) {
            bail!(DmtError::Hypothesis(
                "the antenna threshold needs all exponents equal to 1".into()
            ));
        }
        let t = nocsit_threshold_antennas(c.m1, c.n1, c.n2)?;
        ("antennas", t.threshold, c.n1 as f64, t.met)
    };
    let text = match rc.format {
        Format::Csv => format!(
            "kind,threshold,actual,met\n{kind},{},{},{met}\n",
            format_sig(threshold, 9),
            format_sig(actual, 9)
        ),
        Format::Json => pretty(&json!({
            "antennas": c,
            "alphas": a,
            "kind": kind,
            "threshold": threshold,
            "actual": actual,
            "met": met,
        })),
    };
    emit(rc, &text)?;
    Ok(0)
}

fn cmd_mc(rc: &RunConfig) -> Result<u8> {
    let mc = McConfig {
        cfg: rc.antennas,
        alphas: rc.alphas,
        gains: rc.first_gains()?,
        csit: rc.csit,
        snr_grid_db: rc.snr_grid_db.clone(),
        samples_per_point: rc.samples,
        seed: rc.seed,
        min_hits: rc.min_hits,
    };
    let counts = simulate_outage(&mc)?;
    let estimate = counts.estimate(mc.min_hits);
    let text = match rc.format {
        Format::Csv => counts.to_csv(),
        Format::Json => pretty(&json!({
            "config": mc,
            "points": counts.points,
            "estimate": estimate.as_ref().ok(),
        })),
    };
    emit(rc, &text)?;
    match estimate {
        Ok(est) => {
            eprintln!(
                "composed slope {:.4} +/- {:.4} over {} points",
                est.composed.slope, est.composed.half_width, est.composed.points_used
            );
            Ok(0)
        }
        Err(e) => {
            eprintln!("inconclusive: {e}");
            Ok(EXIT_INCONCLUSIVE)
        }
    }
}

fn cmd_validate(args: &ValidateArgs) -> Result<u8> {
    let rc = args.common.resolve()?;
    let defaults = ValidateOptions::default();
    let c = &args.common;
    let opts = ValidateOptions {
        random_instances: args.instances.unwrap_or(defaults.random_instances),
        seed: c.seed.unwrap_or(defaults.seed),
        run_monte_carlo: !args.no_mc,
        mc_samples: c.samples.unwrap_or(defaults.mc_samples),
        mc_seed: c.seed.unwrap_or(defaults.mc_seed),
        mc_snr_grid_db: c
            .snr_grid
            .clone()
            .unwrap_or(defaults.mc_snr_grid_db.clone()),
        weight_perturbation: args.perturb_weights,
        ..defaults
    };
    let report = run_all(&opts)?;
    emit(&rc, &pretty(&serde_json::to_value(&report)?))?;
    Ok(if report.any_failed() {
        EXIT_VALIDATION_FAILED
    } else if report.any_inconclusive() {
        EXIT_INCONCLUSIVE
    } else {
        0
    })
}

fn run(cli: Cli) -> Result<u8> {
    match &cli.command {
        Command::Curve(c) => cmd_curve(&c.resolve()?),
        Command::Threshold(c) => cmd_threshold(&c.resolve()?),
        Command::Mc(c) => cmd_mc(&c.resolve()?),
        Command::Validate(v) => cmd_validate(v),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {:#}", anyhow!(e));
            ExitCode::from(EXIT_ERROR)
        }
    }
}
