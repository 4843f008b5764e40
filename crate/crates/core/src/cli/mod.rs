//! Command-line front end: `gkdv <command> [flags]`.
//!
//! Exit status: 0 success, 2 configuration or I/O error, 3 computation
//! error, 4 failed validation.

pub mod config;
pub mod report;
pub mod validate;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use config::{Format, Grid, RunConfig, Settings};

pub const SCHEMA_ID: &str = "gkdv.stability_report.v1";

#[derive(Parser, Debug)]
#[command(name = "gkdv", version, about = "Periodic gKdV waves and their spectral stability near the origin")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: Opts,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    /// Turning points, conserved quantities and the sampled profile.
    Wave,
    /// Full stability report at one parameter point.
    Indices,
    /// Spectral curves leaving the origin.
    BandTrace,
    /// Real periodic and antiperiodic eigenvalues.
    RealScan,
    /// Hill's-method eigenvalues nearest the origin.
    Hill,
    /// Stability map over the (a, E, c) grid.
    Sweep,
    /// Invariant suite with pass/fail per check.
    Validate,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Wave => "wave",
            Command::Indices => "indices",
            Command::BandTrace => "band-trace",
            Command::RealScan => "real-scan",
            Command::Hill => "hill",
            Command::Sweep => "sweep",
            Command::Validate => "validate",
        }
    }
}

#[derive(Args, Debug, Default)]
pub struct Opts {
    /// JSON run configuration; flags override it.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// kdv, mkdv or p5-near-solitary.
    #[arg(long, global = true)]
    pub preset: Option<String>,
    /// Power-law exponent, f(u) = u^(p+1).
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub p: Option<f64>,
    /// Value, list x,y,z or range start:stop:count.
    #[arg(long, global = true, allow_hyphen_values = true, value_parser = Grid::parse)]
    pub a: Option<Grid>,
    #[arg(long = "E", global = true, allow_hyphen_values = true, value_parser = Grid::parse)]
    pub energy: Option<Grid>,
    #[arg(long, global = true, allow_hyphen_values = true, value_parser = Grid::parse)]
    pub c: Option<Grid>,
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[arg(long = "kappa-max", global = true)]
    pub kappa_max: Option<f64>,
    #[arg(long = "kappa-steps", global = true)]
    pub kappa_steps: Option<usize>,
    #[arg(long = "hill-N", global = true)]
    pub hill_n: Option<usize>,
    /// Floquet exponents for `hill` and `validate`, comma separated.
    #[arg(long, global = true, allow_hyphen_values = true, value_delimiter = ',')]
    pub gamma: Option<Vec<f64>>,
    #[arg(long = "mu-max", global = true)]
    pub mu_max: Option<f64>,
    #[arg(long = "scan-nodes", global = true)]
    pub scan_nodes: Option<usize>,
    #[arg(long = "profile-nodes", global = true)]
    pub profile_nodes: Option<usize>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

impl Opts {
    fn to_config(&self) -> RunConfig {
        RunConfig {
            preset: self.preset.clone(),
            p: self.p,
            a: self.a.clone(),
            energy: self.energy.clone(),
            c: self.c.clone(),
            tol: self.tol,
            kappa_max: self.kappa_max,
            kappa_steps: self.kappa_steps,
            hill_n: self.hill_n,
            gamma: self.gamma.clone(),
            mu_max: self.mu_max,
            scan_nodes: self.scan_nodes,
            profile_nodes: self.profile_nodes,
            format: self.format,
            out: self.out.clone(),
        }
    }
}

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Computation(crate::Error),
    Validation(usize),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Computation(_) => 3,
            CliError::Validation(_) => 4,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Computation(e) => write!(f, "computation error [{}]: {e}", e.kind()),
            CliError::Validation(n) => write!(f, "validation failed: {n} check(s) did not pass"),
        }
    }
}

impl From<crate::Error> for CliError {
    fn from(e: crate::Error) -> Self {
        CliError::Computation(e)
    }
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize + ?Sized> {
    schema: &'static str,
    command: &'static str,
    version: &'static str,
    config_hash: String,
    config: &'a Settings,
    result: &'a T,
}

/// Canonical JSON: keys sorted, two-space indent, trailing newline.
pub fn to_canonical_json<T: Serialize>(value: &T) -> Result<String, CliError> {
    let v = serde_json::to_value(value).map_err(|e| CliError::Config(format!("serialization: {e}")))?;
    let mut s = serde_json::to_string_pretty(&v).map_err(|e| CliError::Config(format!("serialization: {e}")))?;
    s.push('\n');
    Ok(s)
}

/// CSV with a header row even when `rows` is empty.
pub fn to_csv<T: Serialize>(header: &[&str], rows: &[T]) -> Result<String, CliError> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    let err = |e: csv::Error| CliError::Config(format!("csv: {e}"));
    w.write_record(header).map_err(err)?;
    for r in rows {
        w.serialize(r).map_err(err)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Config(format!("csv: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

#[derive(Serialize)]
struct ProfileRow {
    x: f64,
    u: f64,
    u_x: f64,
}

#[derive(Serialize)]
struct ScanRow {
    kind: &'static str,
    mu: f64,
}

#[derive(Serialize)]
struct HillRow {
    gamma: f64,
    rank: usize,
    re: f64,
    im: f64,
    truncation_drift: f64,
}

#[derive(Serialize)]
struct IndicesRow {
    p: f64,
    a: f64,
    #[serde(rename = "E")]
    energy: f64,
    c: f64,
    period: f64,
    tr2: f64,
    tr3: f64,
    orientation_jacobian: f64,
    delta: f64,
    modulational: String,
    real_axis: String,
    cross_check_tr2: f64,
    cross_check_tr3: f64,
}

/// Rendered output; a failed validation still produces its report.
#[derive(Debug)]
pub struct Rendered {
    pub text: String,
    pub failed_checks: usize,
}

fn envelope<T: Serialize>(command: Command, s: &Settings, result: &T) -> Result<String, CliError> {
    to_canonical_json(&Envelope {
        schema: SCHEMA_ID,
        command: command.name(),
        version: env!("CARGO_PKG_VERSION"),
        config_hash: s.hash(),
        config: s,
        result,
    })
}

/// Runs one command and returns the rendered output.
pub fn execute(command: Command, s: &Settings) -> Result<Rendered, CliError> {
    if command == Command::Validate {
        let params = report::parameters(s, s.point())?;
        let r = validate::validate_point(&params, s)?;
        let text = match s.format {
            Format::Json => envelope(command, s, &r)?,
            Format::Csv => to_csv(&["name", "value", "threshold", "pass"], &r.checks)?,
        };
        return Ok(Rendered { text, failed_checks: r.failed });
    }
    render(command, s).map(|text| Rendered { text, failed_checks: 0 })
}

fn render(command: Command, s: &Settings) -> Result<String, CliError> {
    let json = s.format == Format::Json;
    let wrap = |r: &dyn erased_json::ToValue| envelope(command, s, &erased_json::Wrap(r));
    match command {
        Command::Wave => {
            let r = report::wave_report(s)?;
            if json {
                return wrap(&r);
            }
            let rows: Vec<ProfileRow> =
                (0..r.x.len()).map(|i| ProfileRow { x: r.x[i], u: r.u[i], u_x: r.u_x[i] }).collect();
            to_csv(&["x", "u", "u_x"], &rows)
        }
        Command::Indices => {
            let params = report::parameters(s, s.point())?;
            let r = report::stability_report(&params, s)?;
            if json {
                return wrap(&r);
            }
            let cc = r.indices.cross_check.as_ref();
            let row = IndicesRow {
                p: s.p,
                a: params.a,
                energy: params.energy,
                c: params.c,
                period: r.conserved.period.value,
                tr2: r.indices.tr2,
                tr3: r.indices.tr3,
                orientation_jacobian: r.indices.orientation_jacobian,
                delta: r.indices.delta,
                modulational: format!("{:?}", r.classification.modulational),
                real_axis: format!("{:?}", r.classification.real_axis),
                cross_check_tr2: cc.map_or(f64::NAN, |c| c.tr2_relative),
                cross_check_tr3: cc.map_or(f64::NAN, |c| c.tr3_relative),
            };
            to_csv(
                &[
                    "p", "a", "E", "c", "period", "tr2", "tr3", "orientation_jacobian", "delta", "modulational",
                    "real_axis", "cross_check_tr2", "cross_check_tr3",
                ],
                &[row],
            )
        }
        Command::BandTrace => {
            let r = report::band_report(s)?;
            if json {
                return wrap(&r);
            }
            to_csv(&["branch", "kappa", "re_mu", "im_mu", "residual"], &r.rows())
        }
        Command::RealScan => {
            let r = report::real_scan_report(s)?;
            if json {
                return wrap(&r);
            }
            let mut rows: Vec<ScanRow> = r.scan.periodic.iter().map(|&mu| ScanRow { kind: "periodic", mu }).collect();
            rows.extend(r.scan.antiperiodic.iter().map(|&mu| ScanRow { kind: "antiperiodic", mu }));
            to_csv(&["kind", "mu"], &rows)
        }
        Command::Hill => {
            let r = report::hill_report(s)?;
            if json {
                return wrap(&r);
            }
            let rows: Vec<HillRow> = r
                .spectra
                .iter()
                .flat_map(|h| {
                    h.near_origin.iter().enumerate().map(|(rank, z)| HillRow {
                        gamma: h.gamma,
                        rank,
                        re: z.re,
                        im: z.im,
                        truncation_drift: h.truncation_drift,
                    })
                })
                .collect();
            to_csv(&["gamma", "rank", "re", "im", "truncation_drift"], &rows)
        }
        Command::Sweep => {
            let rows = report::sweep_rows(s);
            if json {
                return wrap(&rows);
            }
            to_csv(
                &[
                    "index", "a", "E", "c", "status", "error", "period", "tr2", "tr3", "orientation_jacobian", "delta",
                    "modulational", "real_axis", "cross_check_tr2", "cross_check_tr3",
                ],
                &rows,
            )
        }
        Command::Validate => unreachable!("handled in execute"),
    }
}

/// Lets one closure wrap reports of different types.
mod erased_json {
    pub trait ToValue {
        fn value(&self) -> serde_json::Result<serde_json::Value>;
    }
    impl<T: serde::Serialize> ToValue for T {
        fn value(&self) -> serde_json::Result<serde_json::Value> {
            serde_json::to_value(self)
        }
    }
    pub struct Wrap<'a>(pub &'a dyn ToValue);
    impl serde::Serialize for Wrap<'_> {
        fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
            self.0.value().map_err(serde::ser::Error::custom)?.serialize(s)
        }
    }
}

fn write_output(text: &str, out: Option<&PathBuf>) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes()).map_err(|e| CliError::Config(format!("stdout: {e}")))
        }
    }
}

/// Parses `args`, runs, writes output and returns the exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let result = (|| -> Result<(Rendered, Option<PathBuf>), CliError> {
        let file = match &cli.opts.config {
            Some(path) => RunConfig::from_file(path).map_err(CliError::Config)?,
            None => RunConfig::default(),
        };
        let cfg = file.overlay(cli.opts.to_config());
        let settings = Settings::resolve(&cfg, cli.command == Command::Sweep).map_err(CliError::Config)?;
        Ok((execute(cli.command, &settings)?, cfg.out))
    })();
    let outcome = result.and_then(|(r, out)| {
        write_output(&r.text, out.as_ref())?;
        match r.failed_checks {
            0 => Ok(()),
            n => Err(CliError::Validation(n)),
        }
    });
    match outcome {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("gkdv: {e}");
            e.exit_code()
        }
    }
}
