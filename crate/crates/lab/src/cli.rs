//! Command-line definitions and the commands behind them.

use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use entropy_lab_core::scaling::{
    cantor_depth_for_accuracy, geometric_grid, predicted_alpha, FitWindow, ScanMode, ScanOutcome, DEFAULT_EIGEN_CAP, GAP_TOLERANCE,
};
use entropy_lab_core::{CantorSpec, SymbolFunction};

use crate::csv_io::{self, CsvOptions, EntropyUnit};
use crate::fit_report::{self, FitOptions, DEFAULT_ALPHA_TOLERANCE, DEFAULT_R2_MIN};
use crate::runner::{parallel_scan, threads_from_env, ScanConfig};
use crate::spec_file::{intervals_spec, resolve_cantor, CantorFileSpec, Depth, Metadata, SetSpec};
use crate::verify;

/// Failure classes, mapped to process exit codes.
#[derive(Debug, thiserror::Error)]
pub enum LabError {
    #[error("{0:#}")]
    Input(#[from] anyhow::Error),
    #[error("verification failed: {0}")]
    Verification(String),
}

impl LabError {
    pub fn exit_code(&self) -> i32 {
        match self {
            LabError::Input(_) => 1,
            LabError::Verification(_) => 2,
        }
    }
}

impl From<crate::spec_file::SpecError> for LabError {
    fn from(e: crate::spec_file::SpecError) -> Self {
        LabError::Input(e.into())
    }
}

#[derive(Debug, Parser)]
#[command(name = "entropy-lab", version, about = "Entanglement entropy of translation-invariant quasi-free fermion states")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute S_N and/or P_N over a geometric N grid and write CSV.
    Scan(ScanArgs),
    /// Fit growth models to a scan CSV and write a JSON report.
    Fit(FitArgs),
    /// Run the self-check suites and write a JSON report.
    Verify(VerifyArgs),
    /// Write an interval spec for a truncated Cantor-like set.
    Cantor(CantorArgs),
    /// Turn a dispersion spec into an interval spec (its Fermi sea).
    Fermi(FermiArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Entropy,
    Proxy,
    Both,
}

impl From<ModeArg> for ScanMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Entropy => ScanMode::Entropy,
            ModeArg::Proxy => ScanMode::Proxy,
            ModeArg::Both => ScanMode::Both,
        }
    }
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    /// JSON set spec.
    #[arg(long)]
    pub set: PathBuf,
    #[arg(long, default_value_t = 1)]
    pub nmin: usize,
    #[arg(long, default_value_t = 2048)]
    pub nmax: usize,
    /// Grid ratio; points are rounded and deduplicated.
    #[arg(long, default_value_t = std::f64::consts::SQRT_2)]
    pub ratio: f64,
    #[arg(long, value_enum, default_value_t = ModeArg::Both)]
    pub mode: ModeArg,
    /// Largest N diagonalised; above it `both` reports P_N only.
    #[arg(long = "eig-cap", default_value_t = DEFAULT_EIGEN_CAP)]
    pub eig_cap: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Report S_N in bits instead of nats.
    #[arg(long)]
    pub bits: bool,
    /// Leave wall_ms empty so output is byte-for-byte reproducible.
    #[arg(long = "no-timing")]
    pub no_timing: bool,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    /// Scan CSV to fit.
    #[arg(long)]
    pub csv: PathBuf,
    /// Set spec the scan came from; supplies the predicted Cantor exponent.
    #[arg(long)]
    pub set: Option<PathBuf>,
    /// Fit window `N_min:N_max`; either side may be empty.
    #[arg(long, default_value = "16:", value_parser = parse_window)]
    pub window: FitWindow,
    #[arg(long = "alpha-tol", default_value_t = DEFAULT_ALPHA_TOLERANCE)]
    pub alpha_tol: f64,
    #[arg(long = "r2-min", default_value_t = DEFAULT_R2_MIN)]
    pub r2_min: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Run only these suites (repeatable).
    #[arg(long = "suite")]
    pub suites: Vec<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CantorArgs {
    #[arg(long)]
    pub q: f64,
    #[arg(long, default_value_t = 1.0)]
    pub a: f64,
    /// Generation depth, or `auto` to resolve holes down to 1/(2 N_max).
    #[arg(long, default_value = "auto")]
    pub depth: Depth,
    #[arg(long, default_value_t = 1 << 14)]
    pub nmax: usize,
    /// With `--depth auto`: go deep enough that the omitted holes change
    /// P_{N_max} by roughly this fraction, instead of stopping at 1/(2 N_max).
    #[arg(long = "truncation-error")]
    pub truncation_error: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FermiArgs {
    /// Spec of type "fermi".
    #[arg(long)]
    pub set: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn parse_window(s: &str) -> Result<FitWindow, String> {
    let (lo, hi) = s.split_once(':').ok_or_else(|| format!("expected N_min:N_max, got {s:?}"))?;
    let side = |x: &str, default: usize| -> Result<usize, String> {
        if x.trim().is_empty() {
            Ok(default)
        } else {
            x.trim().parse().map_err(|e| format!("bad window bound {x:?}: {e}"))
        }
    };
    let window = FitWindow::new(side(lo, 1)?, side(hi, usize::MAX)?);
    if window.n_min > window.n_max {
        return Err(format!("empty window {s:?}"));
    }
    Ok(window)
}

fn emit(out: Option<&Path>, text: &str, stdout: &mut dyn Write) -> anyhow::Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => stdout.write_all(text.as_bytes()).context("writing to stdout"),
    }
}

fn load_spec(path: &Path) -> Result<SetSpec, LabError> {
    SetSpec::load(path).map_err(|e| LabError::Input(anyhow!("{}: {e}", path.display())))
}

/// The CSV text of a scan plus the outcome it came from.
pub fn scan_csv(symbol: &SymbolFunction, cfg: &ScanConfig, opts: CsvOptions) -> anyhow::Result<(String, ScanOutcome)> {
    let outcome = parallel_scan(symbol, cfg)?;
    Ok((csv_io::scan_to_string(&outcome.records, opts), outcome))
}

pub fn cmd_scan(args: &ScanArgs, stdout: &mut dyn Write) -> Result<(), LabError> {
    let mode = ScanMode::from(args.mode);
    if mode == ScanMode::Entropy && args.nmax > args.eig_cap {
        return Err(anyhow!("--mode entropy needs --nmax ({}) <= --eig-cap ({})", args.nmax, args.eig_cap).into());
    }
    let grid = geometric_grid(args.nmin, args.nmax, args.ratio).map_err(|e| anyhow!("grid: {e}"))?;
    let resolved = load_spec(&args.set)?.resolve(Some(args.nmax))?;
    let cfg = ScanConfig { grid, mode, eigen_cap: args.eig_cap, threads: threads_from_env()? };
    let opts = CsvOptions { unit: if args.bits { EntropyUnit::Bits } else { EntropyUnit::Nats }, timing: !args.no_timing };
    let (text, outcome) = scan_csv(&resolved.symbol(), &cfg, opts)?;
    emit(args.out.as_deref(), &text, stdout)?;

    let mut problems: Vec<String> = outcome.failures.iter().map(|f| format!("N={}: {}", f.n, f.error)).collect();
    for r in &outcome.records {
        if let Some(s) = r.entropy {
            if r.proxy > s + GAP_TOLERANCE {
                problems.push(format!("N={}: P_N = {} exceeds S_N = {}", r.n, r.proxy, s));
            }
        }
    }
    if problems.is_empty() {
        Ok(())
    } else {
        Err(LabError::Verification(problems.join("; ")))
    }
}

fn spec_predicted_alpha(spec: &SetSpec) -> Result<Option<f64>, LabError> {
    Ok(match spec {
        SetSpec::Cantor(c) => Some(predicted_alpha(&CantorSpec::new(c.q, c.a, 0).map_err(|e| anyhow!("{e}"))?)),
        SetSpec::Intervals(i) => i.metadata.as_ref().and_then(|m| m.predicted_alpha),
        SetSpec::Fermi(_) => None,
    })
}

pub fn cmd_fit(args: &FitArgs, stdout: &mut dyn Write) -> Result<(), LabError> {
    let file = std::fs::File::open(&args.csv).with_context(|| format!("opening {}", args.csv.display()))?;
    let table = csv_io::read_scan(file).with_context(|| format!("reading {}", args.csv.display()))?;
    let predicted = match &args.set {
        Some(path) => spec_predicted_alpha(&load_spec(path)?)?,
        None => None,
    };
    let opts = FitOptions { window: args.window, alpha_tolerance: args.alpha_tol, r2_min: args.r2_min, predicted_alpha: predicted };
    let report = fit_report::build(&table.records, &opts);
    if !report.usable {
        return Err(anyhow!("no quantity has enough positive rows in window {:?}", args.window).into());
    }
    let mut text = serde_json::to_string_pretty(&report.json).context("serialising report")?;
    text.push('\n');
    emit(args.out.as_deref(), &text, stdout)?;
    if report.passed() {
        Ok(())
    } else {
        let failed: Vec<&str> = report.checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
        Err(LabError::Verification(failed.join(", ")))
    }
}

pub fn cmd_verify(args: &VerifyArgs, stdout: &mut dyn Write) -> Result<(), LabError> {
    let report = verify::run(args.seed, &args.suites).map_err(|e| anyhow!(e))?;
    let mut text = serde_json::to_string_pretty(&report).context("serialising report")?;
    text.push('\n');
    emit(args.out.as_deref(), &text, stdout)?;
    if report.passed {
        Ok(())
    } else {
        let failed: Vec<&str> = report.suites.iter().filter(|s| !s.passed).map(|s| s.name).collect();
        Err(LabError::Verification(format!("suites {}", failed.join(", "))))
    }
}

/// The interval spec written by `cantor`.
pub fn cantor_spec_file(
    q: f64,
    a: f64,
    depth: Depth,
    n_max: usize,
    truncation_error: Option<f64>,
) -> Result<SetSpec, LabError> {
    let cantor = match (depth, truncation_error) {
        (Depth::Auto, Some(eps)) => {
            let base = CantorSpec::new(q, a, 0).map_err(|e| anyhow!("{e}"))?;
            let d = cantor_depth_for_accuracy(&base, n_max, eps).map_err(|e| anyhow!("{e}"))?;
            base.with_depth(d)
        }
        (Depth::Fixed(_), Some(_)) => return Err(anyhow!("--truncation-error needs --depth auto").into()),
        (_, None) => resolve_cantor(&CantorFileSpec { q, a, depth }, Some(n_max))?,
    };
    let set = cantor.generate().map_err(|e| anyhow!("{e}"))?;
    let meta = Metadata {
        source: Some("cantor".into()),
        q: Some(q),
        a: Some(a),
        depth: Some(cantor.depth()),
        n_max: matches!(depth, Depth::Auto).then_some(n_max),
        truncation_error,
        predicted_alpha: Some(predicted_alpha(&cantor)),
        truncated_measure: Some(cantor.truncated_measure()),
        ..Default::default()
    };
    Ok(intervals_spec(&set, Some(meta)))
}

pub fn cmd_cantor(args: &CantorArgs, stdout: &mut dyn Write) -> Result<(), LabError> {
    let spec = cantor_spec_file(args.q, args.a, args.depth, args.nmax, args.truncation_error)?;
    emit(args.out.as_deref(), &spec.to_json(), stdout)?;
    Ok(())
}

pub fn cmd_fermi(args: &FermiArgs, stdout: &mut dyn Write) -> Result<(), LabError> {
    let spec = load_spec(&args.set)?;
    let SetSpec::Fermi(fermi) = &spec else {
        return Err(anyhow!("{}: expected a spec of type \"fermi\", got {:?}", args.set.display(), spec.kind()).into());
    };
    let resolved = spec.resolve(None)?;
    let meta = Metadata {
        source: Some("fermi".into()),
        fermi_energy: resolved.fermi_energy,
        filling: Some(fermi.filling),
        ..Default::default()
    };
    emit(args.out.as_deref(), &intervals_spec(&resolved.set, Some(meta)).to_json(), stdout)?;
    Ok(())
}

pub fn run(cli: &Cli, stdout: &mut dyn Write) -> Result<(), LabError> {
    match &cli.command {
        Command::Scan(a) => cmd_scan(a, stdout),
        Command::Fit(a) => cmd_fit(a, stdout),
        Command::Verify(a) => cmd_verify(a, stdout),
        Command::Cantor(a) => cmd_cantor(a, stdout),
        Command::Fermi(a) => cmd_fermi(a, stdout),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn window_parsing() {
        assert_eq!(parse_window("16:2048").unwrap(), FitWindow::new(16, 2048));
        assert_eq!(parse_window("128:").unwrap(), FitWindow::new(128, usize::MAX));
        assert_eq!(parse_window(":64").unwrap(), FitWindow::new(1, 64));
        assert!(parse_window("64").is_err());
        assert!(parse_window("64:8").is_err());
        assert!(parse_window("a:8").is_err());
    }

    #[test]
    fn cantor_spec_examples() {
        let SetSpec::Intervals(spec) = cantor_spec_file(0.25, 1.0, Depth::Fixed(1), 16, None).unwrap() else { panic!() };
        assert_eq!(spec.intervals, vec![[0.0, 0.375], [0.625, 1.0]]);
        let meta = spec.metadata.unwrap();
        assert_eq!(meta.predicted_alpha, Some(0.5));
        assert_eq!(meta.n_max, None);
        assert!(cantor_spec_file(0.6, 1.0, Depth::Auto, 16, None).is_err());
        let SetSpec::Intervals(auto) = cantor_spec_file(0.25, 1.0, Depth::Auto, 1 << 14, None).unwrap() else { panic!() };
        assert_eq!(auto.metadata.unwrap().depth, Some(7));
        let SetSpec::Intervals(fine) = cantor_spec_file(0.25, 1.0, Depth::Auto, 1 << 14, Some(0.1)).unwrap() else { panic!() };
        let meta = fine.metadata.unwrap();
        assert_eq!((meta.depth, meta.truncation_error), (Some(10), Some(0.1)));
        assert!(cantor_spec_file(0.25, 1.0, Depth::Fixed(3), 16, Some(0.1)).is_err());
    }

    #[test]
    fn exit_codes() {
        assert_eq!(LabError::Input(anyhow!("x")).exit_code(), 1);
        assert_eq!(LabError::Verification("x".into()).exit_code(), 2);
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
