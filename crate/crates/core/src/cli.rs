//! Command-line front end.
//!
//! Every command writes a header block (`# ` lines for CSV, a `header`
//! object for JSON) echoing the tool version, the run configuration and the
//! column schema, so an output file is enough to reproduce itself.
//! Scientific verdicts always exit 0; see [`exit_code`] for the rest.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channels::{noisy_report, NoiseParameter};
use crate::error::{Error, Result};
use crate::fock::{AnyState, Mixture, Mode};
use crate::oracles::{
    oracle_number_sup, oracle_polarization_sup, sector_product_max, verify_appendix_chain, ChainLink, OracleResult,
    ProductAnsatz,
};
use crate::sectors::SectorSet;
use crate::states::estimate_squeezing;
use crate::stokes::observables;
use crate::witness::{bound_number, bound_polarization, dominant_number_sector, evaluate_witness, WitnessReport};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Fixed CSV schema shared by every tabular command.
pub const COLUMNS: [&str; 9] = [
    "r",
    "bound_number",
    "bound_polarization",
    "threshold",
    "argmax_sector",
    "fidelity",
    "witness_value",
    "conditioning_probability",
    "tail_weight",
];

/// Extra columns appended by `noise-sweep`.
pub const NOISE_COLUMNS: [&str; 2] = ["noise_parameter", "noise_value"];

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const MALFORMED: i32 = 2;
    pub const EMPTY_SUBSPACE: i32 = 3;
    pub const UNSOUND: i32 = 4;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "hybrid-witness", version, about = "Hybrid number-polarization entanglement witness toolkit")]
pub struct Cli {
    #[command(flatten)]
    pub config: RunConfig,
    #[command(subcommand)]
    pub command: Command,
}

/// Options shared by every command.
#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct RunConfig {
    /// Per-mode photon cutoff.
    #[arg(long, global = true, default_value_t = 10)]
    pub n_max: u32,
    /// "full", "nonvacuum", or a sector list such as "1-4,6".
    #[arg(long, global = true, default_value = "nonvacuum")]
    pub subspace: SectorSet,
    /// Seed for every random draw.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Random restarts of the product-state optimizer.
    #[arg(long, global = true, default_value_t = crate::oracles::DEFAULT_RESTARTS)]
    pub restarts: u32,
    /// Output file (stdout if absent).
    #[arg(long, global = true)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
    /// csv for sweeps, json otherwise, unless given.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            n_max: crate::fock::DEFAULT_N_MAX,
            subspace: SectorSet::nonvacuum(),
            seed: 0,
            restarts: crate::oracles::DEFAULT_RESTARTS,
            out: None,
            format: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OracleKind {
    Number,
    Polarization,
    Sector,
    Chain,
}

#[derive(Debug, Clone, PartialEq, Subcommand, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Separability bounds and threshold over a squeezing grid.
    Fig2 {
        #[arg(long, default_value_t = 0.0)]
        r_min: f64,
        #[arg(long, default_value_t = 2.0)]
        r_max: f64,
        #[arg(long, default_value_t = 201)]
        steps: u32,
    },
    /// Witness report for a state file.
    Witness {
        state_file: PathBuf,
        /// Squeezing of the reference; estimated from the mean photon number if absent.
        #[arg(long)]
        r: Option<f64>,
    },
    /// Brute-force check of a separability bound.
    Oracle {
        #[arg(value_enum)]
        kind: OracleKind,
        #[arg(long, default_value_t = 0.5)]
        r: f64,
        /// Photon-number sector for `sector`.
        #[arg(long, default_value_t = 2)]
        sector: u32,
        /// Random ansatz for `chain`.
        #[arg(long, default_value_t = 200)]
        samples: u32,
    },
    /// Witness of the noisy singlet over a noise grid from 0 to 1.
    NoiseSweep {
        #[arg(long, value_parser = parse_noise)]
        parameter: NoiseParameter,
        #[arg(long, default_value_t = 0.5)]
        r: f64,
        #[arg(long, default_value_t = 21)]
        steps: u32,
    },
    /// Total Stokes vector, S² and variances of a state file.
    Observables { state_file: PathBuf },
}

fn parse_noise(s: &str) -> std::result::Result<NoiseParameter, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// One CSV line; absent fields print empty.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub r: f64,
    pub bound_number: Option<f64>,
    pub bound_polarization: Option<f64>,
    pub threshold: Option<f64>,
    pub argmax_sector: Option<u32>,
    pub fidelity: Option<f64>,
    pub witness_value: Option<f64>,
    pub conditioning_probability: Option<f64>,
    pub tail_weight: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise_parameter: Option<NoiseParameter>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise_value: Option<f64>,
}

impl Row {
    fn from_report(report: &WitnessReport, argmax: u32) -> Self {
        Self {
            r: report.r,
            bound_number: Some(report.bound_number),
            bound_polarization: Some(report.bound_polarization),
            threshold: Some(report.threshold),
            argmax_sector: Some(argmax),
            fidelity: Some(report.fidelity),
            witness_value: Some(report.witness_value),
            conditioning_probability: Some(report.conditioning_probability),
            tail_weight: Some(report.tail_weight),
            ..Self::default()
        }
    }

    fn cells(&self) -> Vec<String> {
        let f = |x: Option<f64>| x.map(format_float).unwrap_or_default();
        let mut cells = vec![
            format_float(self.r),
            f(self.bound_number),
            f(self.bound_polarization),
            f(self.threshold),
            self.argmax_sector.map(|n| n.to_string()).unwrap_or_default(),
            f(self.fidelity),
            f(self.witness_value),
            f(self.conditioning_probability),
            f(self.tail_weight),
        ];
        if let Some(p) = self.noise_parameter {
            cells.push(format!("{p:?}").to_lowercase());
            cells.push(f(self.noise_value));
        }
        cells
    }
}

/// `%.12g`: 12 significant digits, trailing zeros dropped.
pub fn format_float(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        format!("{}e{exp}", trim_zeros(mantissa.to_string()))
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

/// Uniform grid of `steps` points including both ends.
fn grid(lo: f64, hi: f64, steps: u32) -> Vec<f64> {
    let last = f64::from(steps - 1);
    (0..steps).map(|i| lo + (hi - lo) * f64::from(i) / last).collect()
}

/// Bounds, threshold and dominant number sector along a squeezing grid.
pub fn fig2_rows(r_min: f64, r_max: f64, steps: u32, subspace: &SectorSet) -> Result<Vec<Row>> {
    if !(r_min >= 0.0 && r_min < r_max && r_max.is_finite()) {
        return Err(Error::InvalidParameter(format!("need 0 ≤ r_min < r_max, got [{r_min}, {r_max}]")));
    }
    if steps < 2 {
        return Err(Error::InvalidParameter(format!("need at least 2 steps, got {steps}")));
    }
    grid(r_min, r_max, steps)
        .into_par_iter()
        .map(|r| {
            let number = bound_number(r, subspace)?;
            let polarization = bound_polarization(r, subspace)?;
            Ok(Row {
                r,
                bound_number: Some(number),
                bound_polarization: Some(polarization),
                threshold: Some(number.max(polarization)),
                argmax_sector: Some(dominant_number_sector(r, subspace)?),
                ..Row::default()
            })
        })
        .collect()
}

/// Witness of the noisy singlet at `steps` noise values in `[0, 1]`.
///
/// Points where nothing survives in the subspace keep only the noise value
/// and a zero conditioning probability.
pub fn noise_rows(parameter: NoiseParameter, r: f64, steps: u32, subspace: &SectorSet, n_max: u32) -> Result<Vec<Row>> {
    if steps < 2 {
        return Err(Error::InvalidParameter(format!("need at least 2 steps, got {steps}")));
    }
    let argmax = dominant_number_sector(r, subspace)?;
    grid(0.0, 1.0, steps)
        .into_par_iter()
        .map(|value| {
            let mut row = match noisy_report(parameter, value, r, subspace, n_max) {
                Ok(report) => Row::from_report(&report, argmax),
                Err(Error::EmptySubspace(_)) => Row { r, conditioning_probability: Some(0.0), ..Row::default() },
                Err(e) => return Err(e),
            };
            row.noise_parameter = Some(parameter);
            row.noise_value = Some(value);
            Ok(row)
        })
        .collect()
}

/// Mean photon number per mode, each branch normalized first.
pub fn mean_photons_per_mode<M: Mixture + ?Sized>(state: &M) -> f64 {
    state
        .weighted_branches()
        .into_iter()
        .map(|(w, psi)| {
            let norm = psi.norm_sqr();
            let total: f64 = Mode::ALL.iter().map(|&m| psi.mean_photons(m)).sum();
            if norm > 0.0 {
                w * total / norm
            } else {
                0.0
            }
        })
        .sum::<f64>()
        / Mode::ALL.len() as f64
}

pub fn read_state(path: &Path) -> Result<AnyState> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

/// Witness report for a state file; `r` defaults to the squeezing estimated
/// from the mean photon number.
pub fn witness_from_file(path: &Path, r: Option<f64>, subspace: &SectorSet) -> Result<WitnessReport> {
    let state = read_state(path)?;
    let r = match r {
        Some(r) => r,
        None => estimate_squeezing(mean_photons_per_mode(&state))?,
    };
    evaluate_witness(&state, r, subspace)
}

/// Summary of the appendix chain over random product ansatz.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainSummary {
    pub r: f64,
    pub samples: u32,
    pub violations: u32,
    /// Smallest `rhs − lhs` over all links and samples.
    pub min_margin: f64,
    pub first_violation: Option<ChainLink>,
}

pub fn chain_summary(r: f64, subspace: &SectorSet, n_max: u32, samples: u32, seed: u64) -> Result<ChainSummary> {
    let sectors = subspace.members_up_to(n_max);
    if sectors.is_empty() {
        return Err(Error::EmptySubspace(subspace.to_string()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut summary = ChainSummary { r, samples, violations: 0, min_margin: f64::INFINITY, first_violation: None };
    for _ in 0..samples {
        let report = verify_appendix_chain(&ProductAnsatz::random(&sectors, &mut rng), r)?;
        for link in &report.links {
            summary.min_margin = summary.min_margin.min(link.rhs - link.lhs);
        }
        if let Some(link) = report.first_violation() {
            summary.violations += 1;
            summary.first_violation.get_or_insert_with(|| link.clone());
        }
    }
    Ok(summary)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OracleOutput {
    Bound(OracleResult),
    Chain(ChainSummary),
}

impl OracleOutput {
    pub fn is_sound(&self) -> bool {
        match self {
            OracleOutput::Bound(result) => result.is_sound(),
            OracleOutput::Chain(summary) => summary.violations == 0,
        }
    }
}

pub fn run_oracle(kind: OracleKind, r: f64, sector: u32, samples: u32, config: &RunConfig) -> Result<OracleOutput> {
    Ok(match kind {
        OracleKind::Number => OracleOutput::Bound(oracle_number_sup(r, &config.subspace, config.n_max)?),
        OracleKind::Polarization => OracleOutput::Bound(oracle_polarization_sup(
            r,
            &config.subspace,
            config.n_max,
            config.restarts,
            config.seed,
        )?),
        OracleKind::Sector => OracleOutput::Bound(sector_product_max(sector, config.restarts, config.seed)?),
        OracleKind::Chain => {
            OracleOutput::Chain(chain_summary(r, &config.subspace, config.n_max, samples, config.seed)?)
        }
    })
}

fn header_lines(config: &RunConfig, command: &Command, columns: &[&str]) -> Vec<(&'static str, String)> {
    let json = |v: serde_json::Result<String>| v.expect("plain data serializes");
    vec![
        ("artifact", format!("hybrid-witness {VERSION}")),
        ("command", json(serde_json::to_string(command))),
        ("config", json(serde_json::to_string(config))),
        ("columns", columns.join(",")),
    ]
}

pub fn render_csv(config: &RunConfig, command: &Command, rows: &[Row]) -> String {
    let mut columns: Vec<&str> = COLUMNS.to_vec();
    if rows.iter().any(|r| r.noise_parameter.is_some()) {
        columns.extend(NOISE_COLUMNS);
    }
    let mut out = String::new();
    for (key, value) in header_lines(config, command, &columns) {
        writeln!(out, "# {key}: {value}").expect("writing to a String");
    }
    writeln!(out, "{}", columns.join(",")).expect("writing to a String");
    for row in rows {
        writeln!(out, "{}", row.cells().join(",")).expect("writing to a String");
    }
    out
}

pub fn render_json<T: Serialize>(
    config: &RunConfig,
    command: &Command,
    columns: &[&str],
    result: &T,
) -> Result<String> {
    let header: serde_json::Map<String, serde_json::Value> = [
        ("artifact".to_string(), serde_json::Value::from("hybrid-witness")),
        ("version".to_string(), VERSION.into()),
        ("command".to_string(), serde_json::to_value(command)?),
        ("config".to_string(), serde_json::to_value(config)?),
        ("columns".to_string(), columns.to_vec().into()),
    ]
    .into_iter()
    .collect();
    let doc = serde_json::json!({ "header": header, "result": result });
    Ok(serde_json::to_string_pretty(&doc)? + "\n")
}

/// Runs one command and writes its output; returns the exit code.
pub fn run(cli: &Cli) -> Result<i32> {
    let config = &cli.config;
    let command = &cli.command;
    let (text, code) = match command {
        Command::Fig2 { r_min, r_max, steps } => {
            let rows = fig2_rows(*r_min, *r_max, *steps, &config.subspace)?;
            (tabular(config, command, &rows)?, exit::OK)
        }
        Command::NoiseSweep { parameter, r, steps } => {
            let rows = noise_rows(*parameter, *r, *steps, &config.subspace, config.n_max)?;
            (tabular(config, command, &rows)?, exit::OK)
        }
        Command::Witness { state_file, r } => {
            let report = witness_from_file(state_file, *r, &config.subspace)?;
            let text = match config.format.unwrap_or(Format::Json) {
                Format::Json => render_json(config, command, &[], &report)?,
                Format::Csv => {
                    let argmax = dominant_number_sector(report.r, &config.subspace)?;
                    render_csv(config, command, &[Row::from_report(&report, argmax)])
                }
            };
            (text, exit::OK)
        }
        Command::Oracle { kind, r, sector, samples } => {
            json_only(config)?;
            let output = run_oracle(*kind, *r, *sector, *samples, config)?;
            match &output {
                OracleOutput::Bound(o) => {
                    eprintln!("achieved {:.12} bound {:.12} gap {:.3e}", o.achieved, o.bound, o.gap)
                }
                OracleOutput::Chain(c) => {
                    eprintln!("{} of {} samples violate the chain", c.violations, c.samples)
                }
            }
            let code = if output.is_sound() { exit::OK } else { exit::UNSOUND };
            (render_json(config, command, &[], &output)?, code)
        }
        Command::Observables { state_file } => {
            json_only(config)?;
            let state = read_state(state_file)?;
            (render_json(config, command, &[], &observables(&state)?)?, exit::OK)
        }
    };
    match &config.out {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(code)
}

fn tabular(config: &RunConfig, command: &Command, rows: &[Row]) -> Result<String> {
    match config.format.unwrap_or(Format::Csv) {
        Format::Csv => Ok(render_csv(config, command, rows)),
        Format::Json => {
            let mut columns = COLUMNS.to_vec();
            if rows.iter().any(|r| r.noise_parameter.is_some()) {
                columns.extend(NOISE_COLUMNS);
            }
            render_json(config, command, &columns, &rows)
        }
    }
}

fn json_only(config: &RunConfig) -> Result<()> {
    match config.format {
        Some(Format::Csv) => Err(Error::InvalidParameter("this command only emits JSON".into())),
        _ => Ok(()),
    }
}

/// Exit code for an operational error.
pub fn exit_code(error: &Error) -> i32 {
    match error {
        Error::EmptySubspace(_) => exit::EMPTY_SUBSPACE,
        _ => exit::MALFORMED,
    }
}

pub fn main() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { exit::MALFORMED } else { exit::OK };
        }
    };
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
