//! Command-line front end: runs the modules and writes one JSON record plus
//! CSV curves per invocation.
//!
//! The CSV files are a pure function of the JSON record, so a record can be
//! re-parsed to regenerate them byte for byte.

use std::f64::consts::PI;
use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ext::{format_full, ExtReal};
use crate::fd::{self, FdConfig, FdEstimate};
use crate::galerkin::sine_mode;
use crate::heat::{self, HeatScenario, ScenarioOutcome, ScenarioResult};
use crate::kaplan::{self, KaplanInput};
use crate::picard::{self, HeatVerification, PicardReport};
use crate::sobolev::{self, AlgebraReport, RatioMaximum};
use crate::wave::{self, WaveCase, WaveDatum};

pub const SPEC_VERSION: &str = "1.0";
pub const TABLE_AMPLITUDES: [f64; 5] = [1.6, 2.0, 4.0, 10.0, 20.0];
pub const FD_AMPLITUDES: [f64; 4] = [2.0, 4.0, 10.0, 20.0];
const PROFILE_POINTS: usize = 129;
const CRITICAL_TOL: f64 = 1e-4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("numeric failure: {0}")]
    Numeric(String),
    #[error("property violation: {0}")]
    Property(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Numeric(_) => 3,
            CliError::Property(_) => 4,
        }
    }
}

fn numeric<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Numeric(e.to_string())
}

#[derive(Debug, Parser)]
#[command(name = "evocert", version, about = "Certified existence intervals for the 1-D nonlinear heat equation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Initial amplitude A of f0 = A s1 (repeatable)
    #[arg(long = "A", global = true, value_name = "A")]
    pub amplitudes: Vec<f64>,
    #[arg(long, global = true, default_value_t = 2)]
    pub p: usize,
    /// Galerkin modes, comma separated
    #[arg(long, global = true, value_delimiter = ',', default_value = "1,3")]
    pub modes: Vec<usize>,
    #[arg(long, global = true)]
    pub horizon: Option<f64>,
    #[arg(long, global = true)]
    pub rtol: Option<f64>,
    #[arg(long, global = true)]
    pub atol: Option<f64>,
    #[arg(long = "blowup-threshold", global = true)]
    pub blowup_threshold: Option<f64>,
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// t_N, t_G, t_K and eta for a list of amplitudes
    Table,
    /// Trajectory curves of the coupled Galerkin/control system
    Scenario,
    /// Critical amplitude by bisection
    Critical,
    /// Large-amplitude limit constants
    Limit,
    /// Kaplan blow-up times by three methods
    Kaplan,
    /// Multiplication constants of H1_0(0, pi)
    Sobolev {
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
    },
    /// Picard iteration inside the control tube
    Picard {
        #[arg(long = "k-max", default_value_t = 10)]
        k_max: usize,
        #[arg(long, default_value_t = picard::DEFAULT_GRID)]
        grid: usize,
    },
    /// Finite-difference reference blow-up times
    Fd {
        #[arg(long, default_value_t = fd::DEFAULT_POINTS)]
        points: usize,
    },
    /// First-order wave equation example
    Wave {
        #[arg(long = "sup-pos", default_value_t = 1.0)]
        sup_pos: f64,
        #[arg(long = "sup-abs", default_value_t = 1.0)]
        sup_abs: f64,
    },
}

/// Parsed and validated run parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub amplitudes: Vec<f64>,
    pub p: usize,
    pub modes: Vec<usize>,
    pub horizon: Option<f64>,
    pub rtol: Option<f64>,
    pub atol: Option<f64>,
    pub blowup_threshold: Option<f64>,
    pub out: PathBuf,
    pub seed: u64,
}

impl PartialEq for Command {
    fn eq(&self, other: &Self) -> bool {
        format!("{self:?}") == format!("{other:?}")
    }
}

impl RunConfig {
    pub fn from_cli(cli: Cli) -> Result<Self, CliError> {
        let c = cli.common;
        let amplitudes = if c.amplitudes.is_empty() {
            match cli.command {
                Command::Table | Command::Kaplan => TABLE_AMPLITUDES.to_vec(),
                Command::Fd { .. } => FD_AMPLITUDES.to_vec(),
                _ => vec![1.0],
            }
        } else {
            c.amplitudes
        };
        let config = Self {
            command: cli.command,
            amplitudes,
            p: c.p,
            modes: c.modes,
            horizon: c.horizon,
            rtol: c.rtol,
            atol: c.atol,
            blowup_threshold: c.blowup_threshold,
            out: c.out,
            seed: c.seed,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let usage = |m: String| Err(CliError::Usage(m));
        if self.amplitudes.is_empty() {
            return usage("the amplitude list is empty".into());
        }
        if let Some(a) = self.amplitudes.iter().find(|a| !(a.is_finite() && **a >= 0.0)) {
            return usage(format!("amplitudes must be finite and >= 0 (got {a})"));
        }
        if self.p < 2 {
            return usage(format!("p must be at least 2 (got {})", self.p));
        }
        for (name, v) in [("horizon", self.horizon), ("rtol", self.rtol), ("atol", self.atol)] {
            if let Some(v) = v {
                if !(v > 0.0 && v.is_finite()) {
                    return usage(format!("{name} must be positive (got {v})"));
                }
            }
        }
        if let Some(b) = self.blowup_threshold {
            if !(b > 1.0 && b.is_finite()) {
                return usage(format!("blowup threshold must exceed 1 (got {b})"));
            }
        }
        match &self.command {
            Command::Table | Command::Scenario | Command::Critical | Command::Limit | Command::Picard { .. } => {
                let mut s = HeatScenario::new(self.p, 1.0, &self.modes);
                if let Some(h) = self.horizon {
                    s.horizon = h;
                }
                s.validate().map_err(|e| CliError::Usage(e.to_string()))?;
                if let Command::Picard { grid, .. } = self.command {
                    if grid < 2 {
                        return usage("grid too coarse".into());
                    }
                }
            }
            Command::Fd { points } if *points < 64 => return usage(format!("need at least 64 points (got {points})")),
            Command::Wave { sup_pos, sup_abs } => {
                WaveDatum::new(*sup_pos, *sup_abs, self.p).map_err(|e| CliError::Usage(e.to_string()))?;
            }
            _ => {}
        }
        Ok(())
    }

    fn scenario(&self, amplitude: f64) -> HeatScenario {
        let mut s = HeatScenario::new(self.p, amplitude, &self.modes);
        if let Some(h) = self.horizon {
            s.horizon = h;
        }
        if let Some(r) = self.rtol {
            s.rtol = r;
        }
        if let Some(a) = self.atol {
            s.atol = a;
        }
        if let Some(b) = self.blowup_threshold {
            s.blowup_threshold = b;
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub amplitude: f64,
    pub t_n: ExtReal,
    pub t_g: ExtReal,
    pub t_k: Option<ExtReal>,
    pub eta: Option<f64>,
    pub outcome: ScenarioOutcome,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalRecord {
    pub p: usize,
    pub modes: Vec<usize>,
    pub horizon: f64,
    pub tolerance: f64,
    pub critical: f64,
    pub c_n: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitRecord {
    pub p: usize,
    pub modes: Vec<usize>,
    pub c_g: f64,
    pub c_k: f64,
    pub kaplan_limit: f64,
    pub eta_limit: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KaplanRow {
    pub amplitude: f64,
    pub q0: f64,
    pub t_k: Option<f64>,
    pub t_k_quadrature: Option<f64>,
    pub t_k_comparison: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvolutionRow {
    pub k: f64,
    pub value: f64,
    pub exact: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SobolevRecord {
    pub maximum: RatioMaximum,
    pub small_lambda_limit: f64,
    pub ratio_curve: Vec<(f64, f64)>,
    pub convolution: Vec<ConvolutionRow>,
    pub algebra: AlgebraReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaveRecord {
    pub datum: WaveDatum,
    pub case: WaveCase,
    pub t_n: ExtReal,
    pub theta: ExtReal,
    /// `(t, R(t))`.
    pub curve: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "snake_case")]
pub enum Record {
    Table { p: usize, modes: Vec<usize>, rows: Vec<TableRow> },
    Scenario { runs: Vec<ScenarioResult> },
    Critical(CriticalRecord),
    Limit(LimitRecord),
    Kaplan { p: usize, rows: Vec<KaplanRow> },
    Sobolev(SobolevRecord),
    Picard(PicardReport),
    Fd { estimates: Vec<FdEstimate> },
    Wave(WaveRecord),
}

impl Record {
    pub fn name(&self) -> &'static str {
        match self {
            Record::Table { .. } => "table",
            Record::Scenario { .. } => "scenario",
            Record::Critical(_) => "critical",
            Record::Limit(_) => "limit",
            Record::Kaplan { .. } => "kaplan",
            Record::Sobolev(_) => "sobolev",
            Record::Picard(_) => "picard",
            Record::Fd { .. } => "fd",
            Record::Wave(_) => "wave",
        }
    }

    /// A failed check carried by the record, if any.
    pub fn violation(&self) -> Option<String> {
        match self {
            Record::Critical(c) if c.critical <= c.c_n => {
                Some(format!("critical amplitude {} does not exceed C_N = {}", c.critical, c.c_n))
            }
            Record::Sobolev(s) if s.algebra.violations > 0 => {
                Some(format!("{} algebra-property violations", s.algebra.violations))
            }
            Record::Sobolev(s) if s.maximum.ratio > 1.0 => Some(format!("ratio {} exceeds 1", s.maximum.ratio)),
            Record::Picard(r) if !r.all_ok() => Some("Picard checks failed".into()),
            Record::Fd { estimates } => estimates
                .iter()
                .find(|e| !e.positivity_ok || !e.richardson_ok)
                .map(|e| format!("grid check failed at A = {}", e.amplitude)),
            _ => None,
        }
    }
}

/// The on-disk JSON envelope.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecordFile {
    pub spec_version: String,
    #[serde(flatten)]
    pub record: Record,
}

impl RecordFile {
    pub fn new(record: Record) -> Self {
        Self { spec_version: SPEC_VERSION.to_string(), record }
    }

    pub fn to_json(&self) -> Result<String, CliError> {
        serde_json::to_string_pretty(self).map_err(numeric)
    }

    pub fn from_json(s: &str) -> Result<Self, CliError> {
        let file: Self = serde_json::from_str(s).map_err(|e| CliError::Usage(format!("bad record: {e}")))?;
        if file.spec_version != SPEC_VERSION {
            return Err(CliError::Usage(format!("unsupported spec_version {}", file.spec_version)));
        }
        Ok(file)
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(format_full).unwrap_or_default()
}

fn opt_ext(v: Option<ExtReal>) -> String {
    v.map(ExtReal::to_csv_token).unwrap_or_default()
}

fn csv_string(header: &[String], rows: &[Vec<String>]) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).map_err(numeric)?;
    for r in rows {
        w.write_record(r).map_err(numeric)?;
    }
    let bytes = w.into_inner().map_err(numeric)?;
    String::from_utf8(bytes).map_err(numeric)
}

fn header(cols: &[&str]) -> Vec<String> {
    cols.iter().map(|s| s.to_string()).collect()
}

/// Trajectory samples nearest to the profile times: `1, 2, 3` for runs that
/// do not escape, `T/3, 2T/3, 0.95T` for an escape at `T`.
fn profile_samples(run: &ScenarioResult) -> Vec<usize> {
    let traj = &run.trajectory;
    let targets = match (run.outcome, run.t_g) {
        (ScenarioOutcome::BlowUp, ExtReal::Finite(t)) => vec![t / 3.0, 2.0 * t / 3.0, 0.95 * t],
        _ => vec![1.0, 2.0, 3.0],
    };
    let mut picked: Vec<usize> = targets
        .iter()
        .map(|&t| (0..traj.len()).min_by(|&i, &j| (traj[i].t - t).abs().total_cmp(&(traj[j].t - t).abs())).unwrap_or(0))
        .collect();
    picked.dedup();
    picked
}

fn scenario_csvs(run: &ScenarioResult) -> Result<Vec<(String, String)>, CliError> {
    let dir = format!("A{}", run.amplitude);
    let traj = &run.trajectory;
    let mut files = Vec::new();
    let alpha: Vec<Vec<String>> =
        traj.iter().map(|p| vec![format_full(p.t), format_full(p.a.first().copied().unwrap_or(0.0))]).collect();
    files.push(("fig_alpha.csv", csv_string(&header(&["t", &format!("a_{}", run.modes[0])]), &alpha)?));
    let mut gamma_head = vec!["t".to_string()];
    gamma_head.extend(run.modes[1..].iter().map(|k| format!("a_{k}")));
    let gamma: Vec<Vec<String>> = traj
        .iter()
        .map(|p| std::iter::once(format_full(p.t)).chain(p.a[1..].iter().map(|&v| format_full(v))).collect())
        .collect();
    files.push(("fig_gamma.csv", csv_string(&gamma_head, &gamma)?));
    let norm: Vec<Vec<String>> =
        traj.iter().map(|p| vec![format_full(p.t), format_full(p.norm_phi_ap), format_full(p.r)]).collect();
    files.push(("fig_norm_R.csv", csv_string(&header(&["t", "norm_phi_ap", "R"]), &norm)?));
    let ratio: Vec<Vec<String>> = traj.iter().map(|p| vec![format_full(p.t), p.ratio.to_csv_token()]).collect();
    files.push(("fig_ratio.csv", csv_string(&header(&["t", "ratio"]), &ratio)?));
    let picks = profile_samples(run);
    let mut prof_head = vec!["x".to_string()];
    prof_head.extend(picks.iter().map(|&i| format!("t={}", format_full(traj[i].t))));
    let prof: Vec<Vec<String>> = (0..PROFILE_POINTS)
        .map(|j| {
            let x = PI * j as f64 / (PROFILE_POINTS - 1) as f64;
            std::iter::once(format_full(x))
                .chain(picks.iter().map(|&i| {
                    let v: f64 = run.modes.iter().zip(&traj[i].a).map(|(&k, &c)| c * sine_mode(k, x)).sum();
                    format_full(v)
                }))
                .collect()
        })
        .collect();
    files.push(("fig_profile.csv", csv_string(&prof_head, &prof)?));
    Ok(files.into_iter().map(|(n, s)| (format!("{dir}/{n}"), s)).collect())
}

/// CSV files (relative path, contents) derived from a record.
pub fn csv_files(record: &Record) -> Result<Vec<(String, String)>, CliError> {
    let one = |name: &str, h: &[&str], rows: Vec<Vec<String>>| -> Result<Vec<(String, String)>, CliError> {
        Ok(vec![(name.to_string(), csv_string(&header(h), &rows)?)])
    };
    match record {
        Record::Table { rows, .. } => one(
            "table.csv",
            &["A", "t_N", "t_G", "t_K", "eta"],
            rows.iter()
                .map(|r| {
                    vec![
                        format_full(r.amplitude),
                        r.t_n.to_csv_token(),
                        r.t_g.to_csv_token(),
                        opt_ext(r.t_k),
                        opt(r.eta),
                    ]
                })
                .collect(),
        ),
        Record::Scenario { runs } => {
            let mut out = Vec::new();
            for run in runs {
                out.extend(scenario_csvs(run)?);
            }
            Ok(out)
        }
        Record::Critical(_) | Record::Limit(_) => Ok(Vec::new()),
        Record::Kaplan { rows, .. } => one(
            "kaplan.csv",
            &["A", "Q0", "t_K", "t_K_quadrature", "t_K_comparison"],
            rows.iter()
                .map(|r| {
                    vec![
                        format_full(r.amplitude),
                        format_full(r.q0),
                        opt(r.t_k),
                        opt(r.t_k_quadrature),
                        opt(r.t_k_comparison),
                    ]
                })
                .collect(),
        ),
        Record::Sobolev(s) => {
            let mut out = one(
                "sobolev_ratio.csv",
                &["lambda", "ratio"],
                s.ratio_curve.iter().map(|(l, r)| vec![format_full(*l), format_full(*r)]).collect(),
            )?;
            out.extend(one(
                "sobolev_convolution.csv",
                &["k", "C", "exact"],
                s.convolution
                    .iter()
                    .map(|c| vec![format_full(c.k), format_full(c.value), format_full(c.exact)])
                    .collect(),
            )?);
            Ok(out)
        }
        Record::Picard(r) => {
            let mut out = one(
                "picard_steps.csv",
                &["k", "sup_step", "factorial_bound", "ok"],
                r.steps
                    .iter()
                    .map(|s| {
                        vec![
                            s.k.to_string(),
                            format_full(s.sup_step),
                            format_full(s.factorial_bound),
                            s.bound_ok.to_string(),
                        ]
                    })
                    .collect(),
            )?;
            out.extend(one(
                "picard_tubes.csv",
                &["k", "min_margin", "ok"],
                r.tubes.iter().map(|t| vec![t.k.to_string(), format_full(t.min_margin), t.ok.to_string()]).collect(),
            )?);
            Ok(out)
        }
        Record::Fd { estimates } => {
            let mut out = one(
                "fd.csv",
                &["A", "theta", "theta_coarse", "grid_difference", "richardson_ok", "positivity_ok"],
                estimates
                    .iter()
                    .map(|e| {
                        vec![
                            format_full(e.amplitude),
                            e.theta.to_csv_token(),
                            e.coarse.theta.to_csv_token(),
                            opt(e.grid_difference),
                            e.richardson_ok.to_string(),
                            e.positivity_ok.to_string(),
                        ]
                    })
                    .collect(),
            )?;
            let mut curve = Vec::new();
            for e in estimates {
                for run in [&e.coarse, &e.fine] {
                    for (t, m) in &run.max_norm_curve {
                        curve.push(vec![
                            format_full(e.amplitude),
                            run.points.to_string(),
                            format_full(*t),
                            format_full(*m),
                        ]);
                    }
                }
            }
            out.extend(one("fd_max_norm.csv", &["A", "points", "t", "max_norm"], curve)?);
            Ok(out)
        }
        Record::Wave(w) => {
            one("wave.csv", &["t", "R"], w.curve.iter().map(|(t, r)| vec![format_full(*t), format_full(*r)]).collect())
        }
    }
}

/// Writes `contents` to a temporary sibling and renames it over `path`.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(format!(".tmp{}", std::process::id()));
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, contents)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

/// Writes the record and its CSVs under `out`; returns the written paths.
pub fn write_record(out: &Path, file: &RecordFile) -> Result<Vec<PathBuf>, CliError> {
    let mut written = Vec::new();
    let json = out.join(format!("{}.json", file.record.name()));
    write_atomic(&json, &file.to_json()?)?;
    written.push(json);
    for (name, body) in csv_files(&file.record)? {
        let path = out.join(name);
        write_atomic(&path, &body)?;
        written.push(path);
    }
    Ok(written)
}

/// Runs `f` on every amplitude in its own thread, keeping the input order.
fn fan_out<T: Send, F: Fn(f64) -> Result<T, CliError> + Sync>(amplitudes: &[f64], f: F) -> Result<Vec<T>, CliError> {
    std::thread::scope(|s| {
        let f = &f;
        let handles: Vec<_> = amplitudes.iter().map(|&a| s.spawn(move || f(a))).collect();
        handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
    })
}

pub fn cmd_table(config: &RunConfig) -> Result<Record, CliError> {
    config.validate()?;
    let rows = fan_out(&config.amplitudes, |a| {
        let r = heat::run_scenario(&config.scenario(a)).map_err(numeric)?;
        Ok(TableRow { amplitude: a, t_n: r.t_n, t_g: r.t_g, t_k: r.t_k, eta: r.eta, outcome: r.outcome })
    })?;
    Ok(Record::Table { p: config.p, modes: config.modes.clone(), rows })
}

pub fn cmd_scenario(config: &RunConfig) -> Result<Record, CliError> {
    config.validate()?;
    let runs = fan_out(&config.amplitudes, |a| heat::run_scenario(&config.scenario(a)).map_err(numeric))?;
    Ok(Record::Scenario { runs })
}

pub fn cmd_critical(config: &RunConfig) -> Result<Record, CliError> {
    config.validate()?;
    let horizon = config.horizon.unwrap_or(heat::DEFAULT_HORIZON);
    let critical =
        heat::critical_amplitude(config.p, &config.modes, horizon, heat::c_n(), 4.0, CRITICAL_TOL).map_err(numeric)?;
    Ok(Record::Critical(CriticalRecord {
        p: config.p,
        modes: config.modes.clone(),
        horizon,
        tolerance: CRITICAL_TOL,
        critical,
        c_n: heat::c_n(),
    }))
}

pub fn cmd_limit(config: &RunConfig) -> Result<Record, CliError> {
    config.validate()?;
    let lim = heat::rescaled_limit(config.p, &config.modes).map_err(numeric)?;
    Ok(Record::Limit(LimitRecord {
        p: config.p,
        modes: config.modes.clone(),
        c_g: lim.c_g,
        c_k: heat::c_k(),
        kaplan_limit: heat::kaplan_limit(config.p),
        eta_limit: heat::limit_eta(lim.c_g, config.p),
    }))
}

pub fn cmd_kaplan(config: &RunConfig) -> Result<Record, CliError> {
    config.validate()?;
    let rows = config
        .amplitudes
        .iter()
        .map(|&a| {
            let input = KaplanInput::new(a / heat::c_k(), config.p).map_err(numeric)?;
            if !(input.q0 > 1.0) {
                return Ok(KaplanRow {
                    amplitude: a,
                    q0: input.q0,
                    t_k: None,
                    t_k_quadrature: None,
                    t_k_comparison: None,
                });
            }
            Ok(KaplanRow {
                amplitude: a,
                q0: input.q0,
                t_k: Some(kaplan::kaplan_time(&input).map_err(numeric)?),
                t_k_quadrature: Some(kaplan::kaplan_time_by_quadrature(&input).map_err(numeric)?),
                t_k_comparison: kaplan::comparison_blowup_time(&input).map_err(numeric)?,
            })
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    Ok(Record::Kaplan { p: config.p, rows })
}

pub fn cmd_sobolev(config: &RunConfig, trials: usize) -> Result<Record, CliError> {
    config.validate()?;
    let ratio_curve = (1..=200).map(|i| 0.05 * i as f64).map(|l| (l, sobolev::ratio_lower_bound(l))).collect();
    let convolution = [0.0, 1.0, 3.0, 10.0]
        .iter()
        .map(|&k| {
            Ok(ConvolutionRow {
                k,
                value: sobolev::convolution_constant(k).map_err(numeric)?,
                exact: 1.0 / (4.0 + k * k),
            })
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    Ok(Record::Sobolev(SobolevRecord {
        maximum: sobolev::maximize_ratio(0.1, 10.0, sobolev::GOLDEN_TOL),
        small_lambda_limit: sobolev::ratio_small_lambda_limit(),
        ratio_curve,
        convolution,
        algebra: sobolev::algebra_property_test(config.seed, trials),
    }))
}

pub fn cmd_picard(config: &RunConfig, k_max: usize, grid: usize) -> Result<Record, CliError> {
    config.validate()?;
    let mut v = HeatVerification::new(config.amplitudes[0], config.horizon.unwrap_or(2.0), k_max);
    v.p = config.p;
    v.galerkin_modes = config.modes.clone();
    v.grid = grid;
    v.truncation = v.truncation.max(*config.modes.last().expect("validated"));
    Ok(Record::Picard(v.run().map_err(numeric)?))
}

pub fn cmd_fd(config: &RunConfig, points: usize) -> Result<Record, CliError> {
    config.validate()?;
    let estimates = fan_out(&config.amplitudes, |a| {
        let mut c = FdConfig::new(a, config.p);
        c.points = points;
        if let Some(h) = config.horizon {
            c.horizon = h;
        }
        if let Some(r) = config.rtol {
            c.rtol = r;
        }
        if let Some(t) = config.atol {
            c.atol = t;
        }
        if let Some(b) = config.blowup_threshold {
            c.blowup_threshold = b;
        }
        fd::fd_blowup_time(&c).map_err(numeric)
    })?;
    Ok(Record::Fd { estimates })
}

pub fn cmd_wave(config: &RunConfig, sup_pos: f64, sup_abs: f64) -> Result<Record, CliError> {
    config.validate()?;
    let datum = WaveDatum::new(sup_pos, sup_abs, config.p).map_err(|e| CliError::Usage(e.to_string()))?;
    let t_n = wave::wave_tn(&datum);
    let end = t_n.finite().map_or(1.0, |t| 0.95 * t);
    let curve = (0..64)
        .map(|i| {
            let t = end * i as f64 / 63.0;
            Ok((t, wave::wave_growth_bound(&datum, t).map_err(numeric)?))
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    Ok(Record::Wave(WaveRecord { datum, case: datum.case(), t_n, theta: wave::wave_theta(&datum), curve }))
}

pub fn execute(config: &RunConfig) -> Result<Record, CliError> {
    match config.command {
        Command::Table => cmd_table(config),
        Command::Scenario => cmd_scenario(config),
        Command::Critical => cmd_critical(config),
        Command::Limit => cmd_limit(config),
        Command::Kaplan => cmd_kaplan(config),
        Command::Sobolev { trials } => cmd_sobolev(config, trials),
        Command::Picard { k_max, grid } => cmd_picard(config, k_max, grid),
        Command::Fd { points } => cmd_fd(config, points),
        Command::Wave { sup_pos, sup_abs } => cmd_wave(config, sup_pos, sup_abs),
    }
}

fn show<T: std::fmt::Display>(v: Option<T>) -> String {
    v.map_or_else(|| "-".to_string(), |v| v.to_string())
}

fn summary(record: &Record) -> String {
    match record {
        Record::Table { rows, .. } => rows
            .iter()
            .map(|r| format!("A={} t_N={} t_G={} t_K={} eta={}", r.amplitude, r.t_n, r.t_g, show(r.t_k), show(r.eta)))
            .collect::<Vec<_>>()
            .join("\n"),
        Record::Critical(c) => format!("critical amplitude {:.4} (C_N = {:.5})", c.critical, c.c_n),
        Record::Limit(l) => format!("C_G = {:.6}, C_K = {:.6}, limit eta = {:.6}", l.c_g, l.c_k, l.eta_limit),
        Record::Sobolev(s) => format!(
            "lambda* = {:.4}, ratio* = {:.6}, violations = {}/{}",
            s.maximum.lambda, s.maximum.ratio, s.algebra.violations, s.algebra.trials
        ),
        Record::Picard(r) => format!("Picard checks: {}", if r.all_ok() { "ok" } else { "failed" }),
        Record::Fd { estimates } => {
            estimates.iter().map(|e| format!("A={} theta_fd={}", e.amplitude, e.theta)).collect::<Vec<_>>().join("\n")
        }
        Record::Wave(w) => format!("case {}: t_N = {}, theta = {}", w.case.roman(), w.t_n, w.theta),
        Record::Scenario { runs } => runs
            .iter()
            .map(|r| format!("A={} t_G={} ({:?})", r.amplitude, r.t_g, r.outcome))
            .collect::<Vec<_>>()
            .join("\n"),
        Record::Kaplan { rows, .. } => {
            rows.iter().map(|r| format!("A={} t_K={}", r.amplitude, show(r.t_k))).collect::<Vec<_>>().join("\n")
        }
    }
}

/// Parses `args`, runs, writes the outputs and returns the exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run_config(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn run_config(cli: Cli) -> Result<(), CliError> {
    let config = RunConfig::from_cli(cli)?;
    let record = execute(&config)?;
    let file = RecordFile::new(record);
    let written = write_record(&config.out, &file)?;
    println!("{}", summary(&file.record));
    for p in written {
        println!("wrote {}", p.display());
    }
    match file.record.violation() {
        Some(v) => Err(CliError::Property(v)),
        None => Ok(()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(args: &[&str]) -> RunConfig {
        let mut full = vec!["evocert"];
        full.extend_from_slice(args);
        RunConfig::from_cli(Cli::try_parse_from(full).unwrap()).unwrap()
    }

    fn round_trip(record: Record) {
        let file = RecordFile::new(record);
        let json = file.to_json().unwrap();
        let back = RecordFile::from_json(&json).unwrap();
        assert_eq!(back, file);
        assert_eq!(csv_files(&back.record).unwrap(), csv_files(&file.record).unwrap());
        assert!(json.contains("\"spec_version\""));
    }

    #[test]
    fn defaults_per_command() {
        assert_eq!(config(&["table"]).amplitudes, TABLE_AMPLITUDES.to_vec());
        assert_eq!(config(&["fd"]).amplitudes, FD_AMPLITUDES.to_vec());
        let c = config(&["scenario", "--A", "1", "--A", "4", "--modes", "1,2,3"]);
        assert_eq!(c.amplitudes, vec![1.0, 4.0]);
        assert_eq!(c.modes, vec![1, 2, 3]);
    }

    #[test]
    fn usage_errors() {
        let mut c = config(&["table"]);
        c.amplitudes.clear();
        assert_eq!(cmd_table(&c).unwrap_err().exit_code(), 2);
        let bad = |args: &[&str]| {
            let mut full = vec!["evocert"];
            full.extend_from_slice(args);
            RunConfig::from_cli(Cli::try_parse_from(full).unwrap()).unwrap_err().exit_code()
        };
        assert_eq!(bad(&["table", "--p", "1"]), 2);
        assert_eq!(bad(&["table", "--modes", "3,1"]), 2);
        assert_eq!(bad(&["table", "--horizon=-1"]), 2);
        assert_eq!(bad(&["wave", "--sup-pos", "2", "--sup-abs", "1"]), 2);
        assert_eq!(run(["evocert", "bogus"]), 2);
    }

    #[test]
    fn table_row_with_infinite_t_g() {
        let rec = cmd_table(&config(&["table", "--A", "0.5", "--A", "4"])).unwrap();
        let csv = &csv_files(&rec).unwrap()[0].1;
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "A,t_N,t_G,t_K,eta");
        assert!(lines[1].split(',').nth(2) == Some("inf"));
        assert!(lines[1].ends_with(",,"));
        assert!(lines[2].starts_with("4.0000000000000000e0,"));
        round_trip(rec);
    }

    #[test]
    fn scenario_and_wave_round_trip() {
        round_trip(cmd_scenario(&config(&["scenario", "--A", "1", "--A", "4"])).unwrap());
        round_trip(cmd_wave(&config(&["wave", "--sup-pos", "0.5"]), 0.5, 1.0).unwrap());
        round_trip(cmd_kaplan(&config(&["kaplan", "--A", "1", "--A", "2"])).unwrap());
        round_trip(cmd_limit(&config(&["limit"])).unwrap());
    }

    #[test]
    fn scenario_profile_columns() {
        let rec = cmd_scenario(&config(&["scenario", "--A", "4"])).unwrap();
        let files = csv_files(&rec).unwrap();
        let names: Vec<&str> = files.iter().map(|f| f.0.as_str()).collect();
        for n in ["fig_alpha", "fig_gamma", "fig_norm_R", "fig_ratio", "fig_profile"] {
            assert!(names.contains(&format!("A4/{n}.csv").as_str()), "{n}");
        }
        let profile = &files.iter().find(|f| f.0.ends_with("fig_profile.csv")).unwrap().1;
        assert_eq!(profile.lines().count(), PROFILE_POINTS + 1);
        assert_eq!(profile.lines().next().unwrap().split(',').count(), 4);
    }

    #[test]
    fn atomic_writes_leave_no_temporaries() {
        let dir = tempfile::tempdir().unwrap();
        let rec = cmd_wave(&config(&["wave"]), 1.0, 1.0).unwrap();
        let written = write_record(dir.path(), &RecordFile::new(rec)).unwrap();
        assert_eq!(written.len(), 2);
        let names: Vec<String> =
            fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().file_name().into_string().unwrap()).collect();
        assert!(names.iter().all(|n| !n.contains(".tmp")), "{names:?}");
        let back = RecordFile::from_json(&fs::read_to_string(dir.path().join("wave.json")).unwrap()).unwrap();
        let csv = &csv_files(&back.record).unwrap()[0].1;
        assert_eq!(&fs::read_to_string(dir.path().join("wave.csv")).unwrap(), csv);
    }

    #[test]
    fn wrong_spec_version_is_rejected() {
        let mut file = RecordFile::new(cmd_wave(&config(&["wave"]), 1.0, 1.0).unwrap());
        file.spec_version = "0.0".into();
        assert!(RecordFile::from_json(&file.to_json().unwrap()).is_err());
    }
}
