//! Config-driven experiment runner behind the `qite-mpemba` binary.
//!
//! `qite-mpemba <mode> --config <path> [--out <path>] [--format csv|json] [--seed N]`
//!
//! Exit status is 0 on success (an empty crossing list is a success), 1 for
//! configuration or I/O problems, 2 when the requested analysis does not apply
//! to the given states.

mod config;
mod output;
pub mod presets;

use std::io::Write as _;
use std::path::PathBuf;

use clap::Parser;
use serde_json::{json, Value};

pub use config::{ChainSection, ExperimentConfig, Format, Mode};
pub use presets::{write_preset, PRESETS};

use crate::analysis::{
    check_mpemba, estimate_crossing, find_crossings, find_crossings_on, general_certificate,
    infidelity_certificate, max_acceleration_time,
};
use crate::collinear::{isochrone_csv, isochrone_sweep, simultaneous_crossing, CollinearFamily};
use crate::dynamics::{evolve_slice, fmt_num, hitting_time, sample_trajectory};
use crate::error::Error;
use crate::spectrum::DistanceFunction;
use crate::spin_chain::run_protocol;
use output::{comment_block, labelled_points_csv, record_csv};

#[derive(Debug, Parser)]
#[command(
    name = "qite-mpemba",
    version,
    about = "Mpemba effect in imaginary-time relaxation"
)]
pub struct Cli {
    #[arg(value_enum)]
    pub mode: Mode,
    /// Preset name (preset mode only).
    pub preset: Option<String>,
    /// JSON experiment config.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output file; a directory in preset mode. Defaults to stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Recorded in output headers.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Overrides `tau_max` in the config.
    #[arg(long)]
    pub tau_max: Option<f64>,
    /// Overrides `epsilon` in the config.
    #[arg(long)]
    pub epsilon: Option<f64>,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error in `{field}`: {message}")]
    Config { field: String, message: String },
    #[error("{0}")]
    Io(String),
    #[error("analysis inapplicable: {0}")]
    Inapplicable(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config { .. } | CliError::Io(_) => 1,
            CliError::Inapplicable(_) => 2,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let config = |field: &str| CliError::Config {
            field: field.into(),
            message: e.to_string(),
        };
        match &e {
            Error::InvalidGrid(_) => config("grid"),
            Error::InvalidChain(_) => config("chain"),
            Error::InvalidParameter { name, .. } => config(name),
            Error::InvalidFamily(_) | Error::InvalidMember { .. } => config("lambdas"),
            _ => CliError::Inapplicable(e.to_string()),
        }
    }
}

/// Result of one mode.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub csv: String,
    pub json: Value,
    /// Extra `# key: value` lines for the CSV form.
    pub notes: Vec<(&'static str, String)>,
    /// Set when the analysis ran but its preconditions failed.
    pub inapplicable: Option<String>,
}

impl RunOutput {
    fn plain(csv: String, json: Value) -> Self {
        Self {
            csv,
            json,
            notes: Vec::new(),
            inapplicable: None,
        }
    }

    fn record(json: Value) -> Self {
        Self::plain(record_csv(&json), json)
    }
}

/// Runs a single non-preset mode.
pub fn run_mode(mode: Mode, cfg: &ExperimentConfig) -> Result<RunOutput, CliError> {
    let mut cfg = cfg.clone();
    cfg.mode = Some(mode);
    let cfg = &cfg;
    match mode {
        Mode::Evolve => {
            let spectrum = cfg.spectrum()?;
            let initial = cfg.populations(&cfg.initial, "initial")?;
            let df = cfg.distance_function()?;
            let tau_max = cfg.positive(&cfg.tau_max, "tau_max")?;
            let tr = sample_trajectory(&initial, spectrum, &df, tau_max, cfg.grid())?;
            Ok(RunOutput::plain(tr.to_csv(), tr.to_json()))
        }
        Mode::Crossing => {
            let spectrum = cfg.spectrum()?;
            let hot = cfg.populations(&cfg.hot, "hot")?;
            let cold = cfg.populations(&cfg.cold, "cold")?;
            let df = cfg.distance_function()?;
            let tau_max = cfg.positive(&cfg.tau_max, "tau_max")?;
            let epsilon = match cfg.epsilon {
                Some(_) => Some(cfg.positive(&cfg.epsilon, "epsilon")?),
                None => None,
            };
            let report =
                find_crossings_on(&hot, &cold, spectrum, &df, tau_max, epsilon, cfg.grid())?;
            let mut rows: Vec<(&str, f64, f64)> = report
                .crossings
                .iter()
                .map(|c| ("crossing", c.tau, c.value))
                .collect();
            if let (Some(t), Some(eps)) = (report.truncated_at, epsilon) {
                rows.push(("threshold", t, eps));
            }
            rows.extend(
                report
                    .past_threshold
                    .iter()
                    .map(|c| ("past-threshold", c.tau, c.value)),
            );
            rows.sort_by(|a, b| a.1.total_cmp(&b.1));
            let mut out = RunOutput::plain(labelled_points_csv(&rows), json!(report));
            out.notes.push(("marginal", report.marginal.to_string()));
            Ok(out)
        }
        Mode::CheckMpemba => {
            let spectrum = cfg.spectrum()?;
            let hot = cfg.populations(&cfg.hot, "hot")?;
            let cold = cfg.populations(&cfg.cold, "cold")?;
            let df = cfg.distance_function()?;
            let verdict = check_mpemba(&hot, &cold, spectrum, &df)?;
            Ok(RunOutput::record(json!(verdict)))
        }
        Mode::Certificate => {
            let spectrum = cfg.spectrum()?;
            let hot = cfg.populations(&cfg.hot, "hot")?;
            let cold = cfg.populations(&cfg.cold, "cold")?;
            let epsilon = cfg.positive(&cfg.epsilon, "epsilon")?;
            let cert = infidelity_certificate(&hot, &cold, spectrum)?;
            let certified = cert.epsilon_bound.is_some_and(|b| epsilon < b);
            let reason = cert.reason.clone();
            let mut value = json!(cert);
            value["epsilon"] = json!(epsilon);
            value["certified"] = json!(certified);
            let mut out = RunOutput::record(value);
            out.inapplicable = reason;
            Ok(out)
        }
        Mode::GeneralF => {
            let spectrum = cfg.spectrum()?;
            let hot = cfg.populations(&cfg.hot, "hot")?;
            let cold = cfg.populations(&cfg.cold, "cold")?;
            let df = cfg.distance_function()?;
            let cert = general_certificate(&hot, &cold, spectrum, &df, cfg.a)?;
            let reason = cert.reason.clone();
            let mut value = json!(cert);
            if cfg.epsilon.is_some() {
                let epsilon = cfg.positive(&cfg.epsilon, "epsilon")?;
                value["epsilon"] = json!(epsilon);
                value["certified"] = json!(cert.epsilon_bound.is_some_and(|b| epsilon < b));
            }
            let mut out = RunOutput::record(value);
            out.inapplicable = reason;
            Ok(out)
        }
        Mode::Estimate => {
            let spectrum = cfg.spectrum()?;
            let hot = cfg.populations(&cfg.hot, "hot")?;
            let cold = cfg.populations(&cfg.cold, "cold")?;
            let est = estimate_crossing(&hot, &cold, spectrum)?;
            let mut value = json!(est);
            if cfg.tau_max.is_some() {
                let tau_max = cfg.positive(&cfg.tau_max, "tau_max")?;
                let df = DistanceFunction::average_energy(spectrum);
                let report = find_crossings(&hot, &cold, spectrum, &df, tau_max, None)?;
                // The estimate targets the last crossing, after which the order is final.
                if let Some(c) = report.crossings.last() {
                    value["exact_tau"] = json!(c.tau);
                    value["relative_error"] = json!((est.tau - c.tau).abs() / c.tau);
                }
            }
            Ok(RunOutput::record(value))
        }
        Mode::MaxAccel => {
            let spectrum = cfg.spectrum()?;
            let hot = cfg.populations(&cfg.hot, "hot")?;
            let cold = cfg.populations(&cfg.cold, "cold")?;
            let df = cfg.distance_function()?;
            let epsilon = cfg.positive(&cfg.epsilon, "epsilon")?;
            let est = max_acceleration_time(&cold, &hot, spectrum, &df, epsilon)?;
            let exact = hitting_time(&cold, spectrum, &df, epsilon)?
                - hitting_time(&hot, spectrum, &df, epsilon)?;
            let mut value = json!(est);
            value["exact_delta_tau"] = json!(exact);
            value["relative_error"] = json!((est.delta_tau - exact).abs() / exact.abs());
            Ok(RunOutput::record(value))
        }
        Mode::Collinear => {
            let spectrum = cfg.spectrum()?;
            let a = cfg.populations(&cfg.anchor_a, "anchor_a")?;
            let b = cfg.populations(&cfg.anchor_b, "anchor_b")?;
            let lambdas = cfg.require(&cfg.lambdas, "lambdas")?.clone();
            let df = cfg.distance_function()?;
            let tau_max = cfg.positive(&cfg.tau_max, "tau_max")?;
            let family = CollinearFamily::new(a, b, lambdas)?;
            let crossing = simultaneous_crossing(&family, spectrum, &df, tau_max)?;
            let taus = cfg.grid().times(tau_max)?;
            let sweep = isochrone_sweep(&family, spectrum, &df, &taus)?;
            let mut out = RunOutput::plain(
                isochrone_csv(&sweep),
                json!({"simultaneous_crossing": crossing, "isochrones": sweep}),
            );
            out.notes.push((
                "simultaneous_crossing",
                crossing.map_or("none".into(), |c| {
                    format!("tau={} value={}", fmt_num(c.tau), fmt_num(c.value))
                }),
            ));
            Ok(out)
        }
        Mode::SpinChain => {
            let chain = cfg.require(&cfg.chain, "chain")?;
            let tau_max = cfg.positive(&cfg.tau_max, "tau_max")?;
            spin_chain_output(chain, tau_max, cfg)
        }
        Mode::Preset => Err(CliError::Config {
            field: "mode".into(),
            message: "preset mode writes a directory; use write_preset".into(),
        }),
    }
}

fn spin_chain_output(
    chain: &ChainSection,
    tau_max: f64,
    cfg: &ExperimentConfig,
) -> Result<RunOutput, CliError> {
    let run = run_protocol(&chain.target(), chain.gamma0)?;
    let e = run.spectrum.energies();
    let taus = cfg.grid().times(tau_max)?;
    let mean = |p: &[f64], t: f64| -> f64 {
        evolve_slice(p, e, t)
            .iter()
            .zip(e)
            .map(|(a, b)| a * b)
            .sum()
    };
    let mut csv = String::from("tau,energy_cold,energy_hot\n");
    let mut rows = Vec::with_capacity(taus.len());
    for &t in &taus {
        let (c, h) = (mean(run.cold.as_slice(), t), mean(run.hot.as_slice(), t));
        csv.push_str(&format!("{},{},{}\n", fmt_num(t), fmt_num(c), fmt_num(h)));
        rows.push(json!({"tau": t, "energy_cold": c, "energy_hot": h}));
    }
    let df = DistanceFunction::average_energy(&run.spectrum);
    let report = find_crossings(&run.hot, &run.cold, &run.spectrum, &df, tau_max, None)?;
    let summary = json!({
        "levels": run.spectrum.level_count(),
        "ground_energy": run.system.ground_energy(),
        "ratio_cold": run.cold.ratio(1),
        "ratio_hot": run.hot.ratio(1),
        "initial_energy_cold": mean(run.cold.as_slice(), 0.0),
        "initial_energy_hot": mean(run.hot.as_slice(), 0.0),
        "crossings": report.crossings,
    });
    let mut out = RunOutput::plain(csv, json!({"summary": summary, "curves": rows}));
    for key in ["levels", "ground_energy", "ratio_cold", "ratio_hot"] {
        out.notes.push((key, summary[key].to_string()));
    }
    out.notes.push((
        "crossings",
        report
            .crossings
            .iter()
            .map(|c| fmt_num(c.tau))
            .collect::<Vec<_>>()
            .join(";"),
    ));
    Ok(out)
}

/// Renders a run in the requested format. JSON output embeds the config so it
/// can be re-run as is.
pub fn render(
    mode: Mode,
    cfg: &ExperimentConfig,
    out: &RunOutput,
    format: Format,
    seed: Option<u64>,
) -> String {
    match format {
        Format::Csv => {
            let mut entries = vec![("mode", mode.name().to_string())];
            if let Some(s) = seed {
                entries.push(("seed", s.to_string()));
            }
            entries.extend(out.notes.iter().map(|(k, v)| (*k, v.clone())));
            format!("{}{}", comment_block(&entries), out.csv)
        }
        Format::Json => {
            let mut cfg = cfg.clone();
            cfg.mode = Some(mode);
            cfg.seed = seed.or(cfg.seed);
            let mut value = serde_json::to_value(&cfg).expect("config serializes");
            value["result"] = out.json.clone();
            let mut text = serde_json::to_string_pretty(&value).expect("json serializes");
            text.push('\n');
            text
        }
    }
}

fn write_text(path: Option<&PathBuf>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", p.display()))),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Io(e.to_string())),
    }
}

/// Executes a parsed command line.
pub fn execute(cli: &Cli) -> Result<(), CliError> {
    let mut cfg = match &cli.config {
        Some(path) => ExperimentConfig::load(path)?,
        None if cli.mode == Mode::Preset => ExperimentConfig::default(),
        None => {
            return Err(CliError::Config {
                field: "config".into(),
                message: format!("{} mode needs --config <path>", cli.mode.name()),
            })
        }
    };
    if let Some(m) = cfg.mode {
        if m != cli.mode {
            return Err(CliError::Config {
                field: "mode".into(),
                message: format!(
                    "config is for {} mode but {} was requested",
                    m.name(),
                    cli.mode.name()
                ),
            });
        }
    }
    if cli.tau_max.is_some() {
        cfg.tau_max = cli.tau_max;
    }
    if cli.epsilon.is_some() {
        cfg.epsilon = cli.epsilon;
    }
    let seed = cli.seed.or(cfg.seed);

    if cli.mode == Mode::Preset {
        let name = cli
            .preset
            .clone()
            .or_else(|| cfg.preset.clone())
            .ok_or_else(|| CliError::Config {
                field: "preset".into(),
                message: format!("preset mode needs a name, one of {}", PRESETS.join(", ")),
            })?;
        let dir = cli.out.clone().ok_or_else(|| CliError::Config {
            field: "out".into(),
            message: "preset mode needs --out <directory>".into(),
        })?;
        let written = write_preset(&name, &dir, seed)?;
        let listing: String = written
            .iter()
            .map(|p| format!("{}\n", p.display()))
            .collect();
        return write_text(None, &listing);
    }
    if cli.preset.is_some() {
        return Err(CliError::Config {
            field: "preset".into(),
            message: "a preset name is only accepted in preset mode".into(),
        });
    }

    let out = run_mode(cli.mode, &cfg)?;
    let format = cli.format.or(cfg.format).unwrap_or_default();
    write_text(
        cli.out.as_ref(),
        &render(cli.mode, &cfg, &out, format, seed),
    )?;
    match out.inapplicable {
        Some(reason) => Err(CliError::Inapplicable(reason)),
        None => Ok(()),
    }
}

/// Parses `std::env::args`, runs, reports errors on stderr and returns the
/// process exit code.
pub fn main_entry() -> i32 {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("qite-mpemba: {e}");
            e.exit_code()
        }
    }
}
