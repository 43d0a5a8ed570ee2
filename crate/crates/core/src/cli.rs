//! Command-line front end. Commands render into a byte buffer first, so a
//! failing command never leaves a partial output file behind.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::angle::{parse_angle, parse_angle_grid};
use crate::closed_forms::{
    coupling_angle, mo_benchmark, mo_benchmark_asymptotic, mo_optimal_angle, optimal_fidelity,
    optimal_fidelity_asymptotic, spin_k_fidelity_asymptotic, spin_k_mo_asymptotic, spin_k_worst_case_asymptotic,
    worst_case_asymptotic,
};
use crate::covariant::{maximize_covariant_fidelity_with, CovariantSearch};
use crate::protocols::{
    simulate_mo_strategy, simulate_optimal_qubit_strategy_with, simulate_spin_k_mo, simulate_spin_k_with,
};
use crate::recycling::{advantage_longevity_with, recycling_curve_with, KernelWeight, PerMMode};
use crate::report::{classify, json_document, write_csv, ExperimentRecord, FidelityReport, Method, EXPERIMENT_HEADER};
use crate::spin::{Direction, HalfInteger};

/// Largest accepted `|heisenberg_sim − opt_exact|` before a run is flagged.
pub const SIM_TOL: f64 = 1e-8;
/// Largest accepted `|mo_sim − mo_exact|`.
pub const MO_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PerMArg {
    Exact,
    Asymptotic,
}

#[derive(Debug, Parser)]
#[command(name = "spinbench", version, about = "Fidelity benchmarks for programmable spin rotations")]
pub struct Cli {
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads (default: all cores). Output does not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Closed forms and simulations at one point.
    Fidelity {
        #[arg(long)]
        two_j: i64,
        /// Radians; accepts `pi`, `pi/2`, `3*pi/4`, ...
        #[arg(long, allow_hyphen_values = true)]
        theta: String,
        /// Gauss-Legendre order of the MO simulation.
        #[arg(long)]
        mo_order: Option<usize>,
    },
    /// Grid of points and methods.
    Sweep {
        /// `a..b`, `a..b:step` or `a,b,c` (doubled spins).
        #[arg(long)]
        two_j: String,
        /// `start:stop:count` or `a,b,c`.
        #[arg(long, allow_hyphen_values = true)]
        theta: String,
        #[arg(long, default_value = "opt_exact")]
        methods: String,
        #[arg(long)]
        mo_order: Option<usize>,
        #[arg(long, default_value_t = 16)]
        worst_grid: usize,
    },
    /// Fidelity under repeated reuse of one program.
    Longevity {
        #[arg(long)]
        two_j: i64,
        #[arg(long, allow_hyphen_values = true)]
        theta: String,
        #[arg(long)]
        n_max: Option<usize>,
        /// Per-m fidelities; exact up to j = 60 by default.
        #[arg(long, value_enum)]
        per_m: Option<PerMArg>,
    },
    /// Heisenberg and MO protocols on a spin-k target.
    SpinK {
        #[arg(long)]
        two_j: i64,
        #[arg(long)]
        two_k: i64,
        #[arg(long, allow_hyphen_values = true)]
        theta: String,
        #[arg(long)]
        mo_order: Option<usize>,
        #[arg(long, default_value_t = 16)]
        worst_grid: usize,
        #[arg(long)]
        no_worst_case: bool,
    },
    /// Classify measured fidelities against the quantum and MO bounds.
    Certify {
        /// CSV with header `label,two_j,theta_rad,measured_avg_fidelity,std_err`.
        #[arg(long)]
        input: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Usage,
    Data,
    Numerical,
}

#[derive(Debug, Clone)]
pub struct CliError {
    pub kind: ErrorKind,
    pub message: String,
}

impl CliError {
    pub fn usage(m: impl Into<String>) -> Self {
        CliError { kind: ErrorKind::Usage, message: m.into() }
    }
    pub fn data(m: impl Into<String>) -> Self {
        CliError { kind: ErrorKind::Data, message: m.into() }
    }
    pub fn numerical(m: impl Into<String>) -> Self {
        CliError { kind: ErrorKind::Numerical, message: m.into() }
    }
    pub fn exit_code(&self) -> i32 {
        match self.kind {
            ErrorKind::Usage => 1,
            ErrorKind::Data => 2,
            ErrorKind::Numerical => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<crate::Error> for CliError {
    fn from(e: crate::Error) -> Self {
        CliError::usage(e.to_string())
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Rendered command output plus the exit status to report after writing it.
#[derive(Debug, Clone)]
pub struct Rendered {
    pub bytes: Vec<u8>,
    pub status: i32,
}

/// Parses, runs and writes; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match execute(&cli).and_then(|r| emit(&cli, &r).map(|_| r.status)) {
        Ok(status) => status,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn emit(cli: &Cli, r: &Rendered) -> CliResult<()> {
    match &cli.out {
        Some(path) => write_file(path, &r.bytes),
        None => std::io::stdout()
            .lock()
            .write_all(&r.bytes)
            .map_err(|e| CliError::data(format!("cannot write output: {e}"))),
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> CliResult<()> {
    fs::write(path, bytes).map_err(|e| CliError::data(format!("cannot write {}: {e}", path.display())))
}

/// Runs the command on the requested thread pool and renders its output.
pub fn execute(cli: &Cli) -> CliResult<Rendered> {
    match cli.threads {
        Some(0) => Err(CliError::usage("--threads must be at least 1")),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| CliError::numerical(e.to_string()))?;
            pool.install(|| dispatch(cli))
        }
        None => dispatch(cli),
    }
}

fn dispatch(cli: &Cli) -> CliResult<Rendered> {
    match &cli.command {
        Command::Fidelity { two_j, theta, mo_order } => {
            let theta = parse_angle(theta)?;
            let rows = cmd_fidelity(*two_j, theta, *mo_order, cli.seed)?;
            render(cli.format, "fidelity", json!({ "seed": cli.seed }), &rows, 0)
        }
        Command::Sweep { two_j, theta, methods, mo_order, worst_grid } => {
            let spins = parse_two_j_list(two_j)?;
            let thetas = parse_angle_grid(theta)?;
            let methods = parse_methods(methods)?;
            let rows = cmd_sweep(&spins, &thetas, &methods, *mo_order, *worst_grid)?;
            render(cli.format, "sweep", json!({ "seed": cli.seed }), &rows, 0)
        }
        Command::Longevity { two_j, theta, n_max, per_m } => {
            let theta = parse_angle(theta)?;
            let mode = per_m.map(|m| match m {
                PerMArg::Exact => PerMMode::Exact,
                PerMArg::Asymptotic => PerMMode::Asymptotic,
            });
            let out = cmd_longevity(*two_j, theta, *n_max, mode)?;
            let meta = json!({
                "seed": cli.seed,
                "crossing": out.crossing,
                "asymptotic_longevity": out.asymptotic,
                "mode": out.mode.as_str(),
                "n_max": out.n_max,
            });
            render(cli.format, "longevity", meta, &out.rows, 0)
        }
        Command::SpinK { two_j, two_k, theta, mo_order, worst_grid, no_worst_case } => {
            let theta = parse_angle(theta)?;
            let grid = if *no_worst_case { None } else { Some(*worst_grid) };
            let rows = cmd_spin_k(*two_j, *two_k, theta, *mo_order, grid)?;
            render(cli.format, "spin-k", json!({ "seed": cli.seed }), &rows, 0)
        }
        Command::Certify { input } => {
            let text = fs::read_to_string(input)
                .map_err(|e| CliError::data(format!("cannot read {}: {e}", input.display())))?;
            let report = cmd_certify(&text)?;
            let status = if report.results.is_empty() { 2 } else { 0 };
            let mut bytes = serde_json::to_vec_pretty(&report).map_err(|e| CliError::numerical(e.to_string()))?;
            bytes.push(b'\n');
            Ok(Rendered { bytes, status })
        }
    }
}

fn render(format: Format, command: &str, meta: serde_json::Value, rows: &[FidelityReport], status: i32) -> CliResult<Rendered> {
    for r in rows {
        r.validate().map_err(|e| CliError::numerical(e.to_string()))?;
    }
    let mut bytes = Vec::new();
    match format {
        Format::Csv => write_csv(rows, &mut bytes).map_err(|e| CliError::numerical(e.to_string()))?,
        Format::Json => {
            bytes = serde_json::to_vec_pretty(&json_document(command, meta, rows))
                .map_err(|e| CliError::numerical(e.to_string()))?;
            bytes.push(b'\n');
        }
    }
    Ok(Rendered { bytes, status })
}

fn spin_from_doubled(two_j: i64, name: &str) -> CliResult<HalfInteger> {
    if two_j < 1 {
        return Err(CliError::usage(format!("{name} must be a positive doubled spin, got {two_j}")));
    }
    Ok(HalfInteger::spin(two_j)?)
}

/// `a..b` (inclusive), `a..b:step`, or a comma list.
pub fn parse_two_j_list(text: &str) -> CliResult<Vec<i64>> {
    let s = text.trim();
    let int = |x: &str| x.trim().parse::<i64>().map_err(|_| CliError::usage(format!("bad two_j list '{s}'")));
    let list = if let Some((a, rest)) = s.split_once("..") {
        let (b, step) = match rest.split_once(':') {
            Some((b, st)) => (int(b)?, int(st)?),
            None => (int(rest)?, 1),
        };
        if step < 1 {
            return Err(CliError::usage("two_j step must be positive"));
        }
        (int(a)?..=b).step_by(step as usize).collect()
    } else {
        s.split(',').map(int).collect::<CliResult<Vec<i64>>>()?
    };
    if list.is_empty() {
        return Err(CliError::usage(format!("two_j list '{s}' is empty")));
    }
    for &d in &list {
        spin_from_doubled(d, "two_j")?;
    }
    Ok(list)
}

pub fn parse_methods(text: &str) -> CliResult<Vec<Method>> {
    let mut out = Vec::new();
    for part in text.split(',') {
        let m: Method = part.parse()?;
        if matches!(m, Method::Recycling | Method::SpinKSim) {
            return Err(CliError::usage(format!("method {m} is produced by its own subcommand")));
        }
        if !out.contains(&m) {
            out.push(m);
        }
    }
    if out.is_empty() {
        return Err(CliError::usage("no methods given"));
    }
    Ok(out)
}

fn default_mo_order(two_j: i64, two_k: i64) -> usize {
    (two_j + 2 * two_k + 16).max(64) as usize
}

fn point_rows(
    two_j: i64,
    theta: f64,
    methods: &[Method],
    mo_order: Option<usize>,
    worst_grid: usize,
) -> CliResult<Vec<FidelityReport>> {
    let j = spin_from_doubled(two_j, "two_j")?;
    let opt = optimal_fidelity(j, theta)?.value;
    let mo = mo_benchmark(j, theta)?.value;
    let row = |m: Method, v: f64| FidelityReport::new(two_j, 1, theta, m, v);
    let mut rows = Vec::with_capacity(methods.len());
    for &m in methods {
        rows.push(match m {
            Method::OptExact => row(m, opt),
            Method::OptAsymptotic => row(m, optimal_fidelity_asymptotic(j, theta)?.value).with_notes("asymptotic"),
            Method::MoExact => row(m, mo),
            Method::MoAsymptotic => row(m, mo_benchmark_asymptotic(j, theta)?.value).with_notes("asymptotic"),
            Method::HeisenbergSim => {
                let sim = simulate_optimal_qubit_strategy_with(j, theta, &Direction::z(), None)?.average;
                let gap = (sim - opt).abs();
                if two_j >= 3 && gap > SIM_TOL {
                    return Err(CliError::numerical(format!(
                        "heisenberg_sim deviates from opt_exact by {gap:e} at two_j={two_j}, theta={theta}"
                    )));
                }
                let notes = if two_j >= 3 { "f=f(theta)" } else { "f=f(theta); coherent program, not optimal on every branch" };
                row(m, sim).with_uncertainty(gap).with_notes(notes)
            }
            Method::MoSim => {
                let order = mo_order.unwrap_or_else(|| default_mo_order(two_j, 1));
                let sim = simulate_mo_strategy(j, theta, order, None)?;
                let gap = (sim - mo).abs();
                if gap > MO_TOL {
                    return Err(CliError::numerical(format!(
                        "mo_sim deviates from mo_exact by {gap:e} at two_j={two_j}, theta={theta} (order {order})"
                    )));
                }
                row(m, sim).with_uncertainty(gap).with_notes(format!("quadrature_order={order}"))
            }
            Method::WorstCase => {
                let w = simulate_optimal_qubit_strategy_with(j, theta, &Direction::z(), Some(worst_grid))?.worst_case;
                let asym = worst_case_asymptotic(j, theta)?.value;
                row(m, w).with_notes(format!("grid={worst_grid}; asymptotic={asym}"))
            }
            Method::Recycling | Method::SpinKSim => unreachable!("rejected by parse_methods"),
        });
    }
    Ok(rows)
}

/// Closed forms, asymptotics and both simulations at one point. For
/// `j ≤ 1` the covariant optimizer is run as well and its distance to the
/// closed form is reported as the `opt_exact` uncertainty.
pub fn cmd_fidelity(two_j: i64, theta: f64, mo_order: Option<usize>, seed: u64) -> CliResult<Vec<FidelityReport>> {
    let methods = [
        Method::OptExact,
        Method::OptAsymptotic,
        Method::MoExact,
        Method::MoAsymptotic,
        Method::HeisenbergSim,
        Method::MoSim,
    ];
    let mut rows = point_rows(two_j, theta, &methods, mo_order, 16)?;
    if two_j <= 2 {
        let j = spin_from_doubled(two_j, "two_j")?;
        let search = CovariantSearch { seed, ..CovariantSearch::default() };
        let cov = maximize_covariant_fidelity_with(j, theta, search)?.average_fidelity();
        let closed = rows[0].value;
        let mut notes = format!("covariant_opt={cov}");
        if two_j == 2 {
            notes.push_str("; closed form uses sin^2(theta/2) and 2*sqrt(10+6cos(theta)), checked against the optimizer");
        }
        rows[0] = rows[0].clone().with_uncertainty((cov - closed).abs()).with_notes(notes);
    }
    Ok(rows)
}

/// Rows ordered by two_j, then θ, then method, independent of scheduling.
pub fn cmd_sweep(
    spins: &[i64],
    thetas: &[f64],
    methods: &[Method],
    mo_order: Option<usize>,
    worst_grid: usize,
) -> CliResult<Vec<FidelityReport>> {
    if thetas.is_empty() {
        return Err(CliError::usage("empty theta grid"));
    }
    if spins.is_empty() || methods.is_empty() {
        return Err(CliError::usage("nothing to sweep"));
    }
    let points: Vec<(i64, f64)> = spins.iter().flat_map(|&d| thetas.iter().map(move |&t| (d, t))).collect();
    let blocks: CliResult<Vec<Vec<FidelityReport>>> =
        points.par_iter().map(|&(d, t)| point_rows(d, t, methods, mo_order, worst_grid)).collect();
    Ok(blocks?.into_iter().flatten().collect())
}

#[derive(Debug, Clone)]
pub struct LongevityOutput {
    pub rows: Vec<FidelityReport>,
    pub crossing: Option<usize>,
    pub asymptotic: f64,
    pub mode: PerMMode,
    pub n_max: usize,
}

/// One `recycling` row per use `n` plus an `mo_exact` row carrying the
/// benchmark, the crossing step and the asymptotic longevity.
pub fn cmd_longevity(
    two_j: i64,
    theta: f64,
    n_max: Option<usize>,
    mode: Option<PerMMode>,
) -> CliResult<LongevityOutput> {
    let j = spin_from_doubled(two_j, "two_j")?;
    if n_max == Some(0) {
        return Err(CliError::usage("n_max must be at least 1"));
    }
    let mode = mode.unwrap_or(PerMMode::default_for(j));
    let asymptotic = j.value() / (1.0 - theta.cos());
    let n_max = n_max.unwrap_or_else(|| {
        if asymptotic.is_finite() {
            ((4.0 * asymptotic).ceil() as usize + 16).min(1_000_000)
        } else {
            16
        }
    });
    let curve = recycling_curve_with(j, theta, n_max, mode, KernelWeight::Exact)?;
    let longevity = advantage_longevity_with(j, theta, n_max, mode, KernelWeight::Exact)?;
    let bench = mo_benchmark(j, theta)?.value;
    let mut rows: Vec<FidelityReport> = curve
        .points
        .iter()
        .map(|&(n, f)| {
            FidelityReport::new(two_j, 1, theta, Method::Recycling, f)
                .with_step(n as u64)
                .with_notes(format!("mode={}", mode.as_str()))
        })
        .collect();
    let crossing = match longevity.crossing {
        Some(n) => n.to_string(),
        None => format!("none within n_max={n_max}"),
    };
    rows.insert(
        0,
        FidelityReport::new(two_j, 1, theta, Method::MoExact, bench).with_notes(format!(
            "crossing={crossing}; asymptotic_longevity={asymptotic}; mode={}",
            mode.as_str()
        )),
    );
    Ok(LongevityOutput { rows, crossing: longevity.crossing, asymptotic, mode, n_max })
}

/// Spin-`k` protocol rows. For `two_k = 1` the coupling and MO angles are
/// the qubit optima, so the values coincide with `cmd_fidelity`; otherwise
/// both equal θ.
pub fn cmd_spin_k(
    two_j: i64,
    two_k: i64,
    theta: f64,
    mo_order: Option<usize>,
    worst_grid: Option<usize>,
) -> CliResult<Vec<FidelityReport>> {
    let j = spin_from_doubled(two_j, "two_j")?;
    let k = spin_from_doubled(two_k, "two_k")?;
    let (f, tau) = if two_k == 1 {
        (coupling_angle(j, theta)?, mo_optimal_angle(j, theta)?)
    } else {
        (theta, theta)
    };
    let order = mo_order.unwrap_or_else(|| default_mo_order(two_j, two_k));
    let sim = simulate_spin_k_with(j, k, theta, Some(f), worst_grid)?;
    let mo_sim = simulate_spin_k_mo(j, k, theta, order, Some(tau))?;
    let avg_asym = spin_k_fidelity_asymptotic(j, k, theta)?.value;
    let mo_asym = spin_k_mo_asymptotic(j, k, theta)?.value;
    let worst_asym = spin_k_worst_case_asymptotic(j, k, theta)?.value;
    let scale = j.value() / (1.0 - theta.cos());
    let slope = |v: f64| if scale.is_finite() { format!("; error_slope={}", (1.0 - v) * scale) } else { String::new() };
    let row = |m: Method, v: f64| FidelityReport::new(two_j, two_k, theta, m, v);
    let mut rows = vec![
        row(Method::SpinKSim, sim.average)
            .with_uncertainty((sim.average - avg_asym).abs())
            .with_notes(format!("f={f}; entanglement={}{}", sim.entanglement, slope(sim.average))),
        row(Method::OptAsymptotic, avg_asym).with_notes("asymptotic"),
        row(Method::MoSim, mo_sim)
            .with_uncertainty((mo_sim - mo_asym).abs())
            .with_notes(format!("tau={tau}; quadrature_order={order}{}", slope(mo_sim))),
        row(Method::MoAsymptotic, mo_asym).with_notes("asymptotic"),
    ];
    match worst_grid {
        Some(g) => rows.push(
            row(Method::WorstCase, sim.worst_case)
                .with_uncertainty((sim.worst_case - worst_asym).abs())
                .with_notes(format!("grid={g}; asymptotic={worst_asym}{}", slope(sim.worst_case))),
        ),
        None => rows.push(
            row(Method::WorstCase, worst_asym).with_notes("asymptotic; simulation skipped"),
        ),
    }
    Ok(rows)
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct CertifyResult {
    pub label: String,
    pub two_j: i64,
    pub theta_rad: f64,
    pub measured_avg_fidelity: f64,
    pub std_err: f64,
    pub mo_benchmark: f64,
    pub optimal_fidelity: f64,
    pub z: f64,
    pub verdict: String,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct RowError {
    /// 1-based line in the input file.
    pub line: u64,
    pub message: String,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct CertifyReport {
    pub schema: String,
    pub command: String,
    pub results: Vec<CertifyResult>,
    pub errors: Vec<RowError>,
}

#[derive(Deserialize)]
struct RawExperiment {
    label: String,
    two_j: i64,
    theta_rad: String,
    measured_avg_fidelity: f64,
    std_err: f64,
}

pub fn certify_record(rec: &ExperimentRecord) -> crate::Result<CertifyResult> {
    rec.validate()?;
    let j = HalfInteger::spin(rec.two_j)?;
    let mo = mo_benchmark(j, rec.theta_rad)?.value;
    let opt = optimal_fidelity(j, rec.theta_rad)?.value;
    let (verdict, z) = classify(rec.measured_avg_fidelity, rec.std_err, mo, opt);
    Ok(CertifyResult {
        label: rec.label.clone(),
        two_j: rec.two_j,
        theta_rad: rec.theta_rad,
        measured_avg_fidelity: rec.measured_avg_fidelity,
        std_err: rec.std_err,
        mo_benchmark: mo,
        optimal_fidelity: opt,
        z,
        verdict: verdict.as_str().to_string(),
    })
}

/// Row-level failures are collected; the header must match exactly.
pub fn cmd_certify(csv_text: &str) -> CliResult<CertifyReport> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(csv_text.as_bytes());
    let header = reader.headers().map_err(|e| CliError::data(e.to_string()))?.clone();
    if header.iter().ne(EXPERIMENT_HEADER) {
        return Err(CliError::data(format!(
            "expected header '{}', got '{}'",
            EXPERIMENT_HEADER.join(","),
            header.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut results = Vec::new();
    let mut errors = Vec::new();
    for (i, row) in reader.deserialize::<RawExperiment>().enumerate() {
        let line = i as u64 + 2;
        let outcome = row
            .map_err(|e| e.to_string())
            .and_then(|raw| {
                let theta_rad = parse_angle(&raw.theta_rad).map_err(|e| e.to_string())?;
                Ok(ExperimentRecord {
                    label: raw.label,
                    two_j: raw.two_j,
                    theta_rad,
                    measured_avg_fidelity: raw.measured_avg_fidelity,
                    std_err: raw.std_err,
                })
            })
            .and_then(|rec| certify_record(&rec).map_err(|e| e.to_string()));
        match outcome {
            Ok(r) => results.push(r),
            Err(message) => errors.push(RowError { line, message }),
        }
    }
    Ok(CertifyReport { schema: crate::report::SCHEMA.into(), command: "certify".into(), results, errors })
}
