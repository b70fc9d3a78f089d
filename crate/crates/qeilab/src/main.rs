//! Command-line front end: configuration ingestion, experiment
//! orchestration, and report emission.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use qeilab::config::RunConfig;
use qeilab::criteria::{
    admissible_alpha_bound, attach_witness_state, classify_degree, negativity_scan,
};
use qeilab::isingbound::{export_q_table, ising_bound};
use qeilab::kernel::f_p;
use qeilab::optimizer::best_constant;
use qeilab::report::{summarize_dir, write_report, Meta};
use qeilab::testfn::{Convention, TestFunction};
use qeilab::{Error, Result};

const EXIT_VALIDATION: u8 = 1;
const EXIT_VERIFICATION: u8 = 2;
const EXIT_NONCONVERGENCE: u8 = 3;

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ConventionArg {
    Plain,
    Normalized,
}

impl From<ConventionArg> for Convention {
    fn from(c: ConventionArg) -> Self {
        match c {
            ConventionArg::Plain => Convention::Plain,
            ConventionArg::Normalized => Convention::Normalized,
        }
    }
}

#[derive(Parser)]
#[command(name = "qeilab", version, about = "Energy inequalities in 1+1d integrable models")]
struct Cli {
    /// JSON run configuration
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (overrides config; default ".")
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Override the Fourier transform convention
    #[arg(long, global = true)]
    convention: Option<ConventionArg>,
    /// Override the scan/classification rapidity range
    #[arg(long, global = true)]
    theta_max: Option<f64>,
    /// Override the convergence tolerance
    #[arg(long, global = true)]
    tolerance: Option<f64>,
    /// Treat numerical non-convergence as fatal (exit code 3)
    #[arg(long, global = true)]
    strict: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Scan |F_P| for a negativity witness
    Scan,
    /// Classify the QEI verdict of (model, P)
    Classify,
    /// Minimize the energy-density form over one-particle states
    Minimize,
    /// Evaluate the closed-form Ising bound for the configured test function
    Bound,
    /// Cross-check minimized bounds against the closed form
    Verify,
    /// Summarize the reports in an output directory
    Report,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            let code = exit_code_for(&e, cli.strict);
            let doc = serde_json::json!({"error": e.to_string(), "exit_code": code});
            eprintln!("{doc}");
            ExitCode::from(code)
        }
    }
}

fn exit_code_for(e: &Error, strict: bool) -> u8 {
    match e {
        Error::QuadratureNonConvergence { .. } | Error::EigenFailure { .. } if strict => {
            EXIT_NONCONVERGENCE
        }
        _ => EXIT_VALIDATION,
    }
}

fn load_config(cli: &Cli) -> Result<RunConfig> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| Error::InvalidParameter("--config is required for this command".into()))?;
    let mut cfg = RunConfig::from_path(path)?;
    if let Some(c) = cli.convention {
        cfg.convention = c.into();
    }
    if let Some(t) = cli.theta_max {
        cfg.theta_max = t;
    }
    if let Some(t) = cli.tolerance {
        cfg.tolerance = t;
    }
    Ok(cfg)
}

fn out_dir(cli: &Cli, cfg: Option<&RunConfig>) -> Result<PathBuf> {
    let dir = cli
        .out
        .clone()
        .or_else(|| cfg.and_then(|c| c.output_dir.clone()))
        .unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&dir)?;
    Ok(dir)
}

fn run(cli: &Cli) -> Result<u8> {
    if matches!(cli.command, Command::Report) {
        return cmd_report(cli);
    }
    let cfg = load_config(cli)?;
    let dir = out_dir(cli, Some(&cfg))?;
    let meta = Meta::from_config(&cfg)?;
    match cli.command {
        Command::Scan => cmd_scan(cli, &cfg, &dir, &meta),
        Command::Classify => cmd_classify(&cfg, &dir, &meta),
        Command::Minimize => cmd_minimize(cli, &cfg, &dir, &meta),
        Command::Bound => cmd_bound(&cfg, &dir, &meta),
        Command::Verify => cmd_verify(&cfg, &dir, &meta),
        Command::Report => unreachable!(),
    }
}

#[derive(Serialize)]
struct ScanResult {
    model: String,
    mass: f64,
    polynomial: Vec<f64>,
    witness_found: bool,
    theta_p: Option<f64>,
    fp_abs: Option<f64>,
    witness_energy: Option<f64>,
}

fn cmd_scan(cli: &Cli, cfg: &RunConfig, dir: &Path, meta: &Meta) -> Result<u8> {
    let v = cfg.validate()?;
    let mut witness =
        negativity_scan(&v.model, &v.polynomial, cfg.theta_max, cfg.samples, cfg.epsilon)?;
    if let Some(w) = witness.as_mut() {
        attach_witness_state(&v.model, &v.polynomial, cfg.convention, w)?;
    }

    // plottable profile of |F_P| and its cosh ratio
    let mut csvw = csv::Writer::from_path(dir.join("fp_scan.csv"))?;
    csvw.write_record(["theta", "abs_fp", "ratio"])?;
    let n = 1001;
    for i in 0..n {
        let th = cfg.theta_max * i as f64 / (n - 1) as f64;
        let a = f_p(&v.model, &v.polynomial, th)?.norm();
        csvw.write_record([th.to_string(), format!("{a:e}"), format!("{:e}", a / th.cosh())])?;
    }
    csvw.flush()?;

    let result = ScanResult {
        model: v.model.name().to_string(),
        mass: v.model.mass(),
        polynomial: v.polynomial.coeffs().to_vec(),
        witness_found: witness.is_some(),
        theta_p: witness.as_ref().map(|w| w.theta_p),
        fp_abs: witness.as_ref().map(|w| w.fp_abs),
        witness_energy: witness.as_ref().and_then(|w| w.witness_energy),
    };
    write_report(dir.join("scan.json"), "scan", meta, &result)?;
    let _ = cli;
    Ok(0)
}

#[derive(Serialize)]
struct ClassifyResult {
    model: String,
    mass: f64,
    polynomial: Vec<f64>,
    verdict: qeilab::criteria::QEIVerdict,
    /// |alpha| range of the admissible linear family; None when only P = 1
    /// is admissible
    admissible_alpha_bound: Option<f64>,
}

fn cmd_classify(cfg: &RunConfig, dir: &Path, meta: &Meta) -> Result<u8> {
    let v = cfg.validate()?;
    let verdict = classify_degree(&v.model, &v.polynomial, cfg.theta_max, cfg.margin)?;
    let alpha = admissible_alpha_bound(&v.model)?;
    let result = ClassifyResult {
        model: v.model.name().to_string(),
        mass: v.model.mass(),
        polynomial: v.polynomial.coeffs().to_vec(),
        verdict,
        admissible_alpha_bound: alpha,
    };
    write_report(dir.join("classify.json"), "classify", meta, &result)?;
    Ok(0)
}

#[derive(Serialize)]
struct MinimizeResult {
    model: String,
    mass: f64,
    polynomial: Vec<f64>,
    #[serde(flatten)]
    bound: qeilab::optimizer::ConvergedBound,
}

fn cmd_minimize(cli: &Cli, cfg: &RunConfig, dir: &Path, meta: &Meta) -> Result<u8> {
    let v = cfg.validate()?;
    let bound = best_constant(
        &v.model,
        &v.polynomial,
        &v.test_function,
        cfg.convention,
        cfg.tolerance,
        &cfg.grid_ladder,
    )?;
    bound.export_witness_csv(dir.join("witness.csv"))?;
    let converged = bound.converged;
    let result = MinimizeResult {
        model: v.model.name().to_string(),
        mass: v.model.mass(),
        polynomial: v.polynomial.coeffs().to_vec(),
        bound,
    };
    write_report(dir.join("minimize.json"), "minimize", meta, &result)?;
    if !converged && cli.strict {
        return Ok(EXIT_NONCONVERGENCE);
    }
    Ok(0)
}

#[derive(Serialize)]
struct BoundReport {
    mass: f64,
    #[serde(flatten)]
    bound: qeilab::isingbound::BoundResult,
    /// true when the test function is not compactly supported, so the
    /// closed form is evaluated outside its stated hypothesis
    extrapolation: bool,
}

fn cmd_bound(cfg: &RunConfig, dir: &Path, meta: &Meta) -> Result<u8> {
    let v = cfg.validate()?;
    let bound = ising_bound(&v.test_function, v.model.mass(), cfg.convention)?;
    export_q_table(dir.join("q_table.csv"), 10.0, 512)?;
    let result = BoundReport {
        mass: v.model.mass(),
        bound,
        extrapolation: !cfg.test_function.is_compactly_supported(),
    };
    write_report(dir.join("bound.json"), "bound", meta, &result)?;
    Ok(0)
}

#[derive(Serialize)]
struct VerifyRow {
    sigma: f64,
    lambda_min: f64,
    closed_form: Option<f64>,
    converged: bool,
    pass: bool,
}

#[derive(Serialize)]
struct VerifyResult {
    model: String,
    mass: f64,
    convention: Convention,
    rows: Vec<VerifyRow>,
    all_pass: bool,
    /// whether the alternate convention also satisfies all rows
    alternate_convention_all_pass: bool,
}

fn verify_rows(cfg: &RunConfig, conv: Convention) -> Result<(Vec<VerifyRow>, bool)> {
    let v = cfg.validate()?;
    let mu = v.model.mass();
    let is_ising = v.model.name() == "ising";
    let mut rows = Vec::new();
    for sigma in [0.5, 1.0, 2.0] {
        let g = TestFunction::gaussian(sigma / mu, 0.0)?;
        let b = best_constant(&v.model, &v.polynomial, &g, conv, cfg.tolerance, &cfg.grid_ladder)?;
        let (closed_form, pass) = if is_ising {
            let cf = ising_bound(&g, mu, conv)?.value;
            (Some(cf), b.lambda_min >= cf - 1e-6 * cf.abs())
        } else {
            (None, b.lambda_min >= -cfg.tolerance)
        };
        rows.push(VerifyRow {
            sigma: sigma / mu,
            lambda_min: b.lambda_min,
            closed_form,
            converged: b.converged,
            pass,
        });
    }
    let all = rows.iter().all(|r| r.pass);
    Ok((rows, all))
}

fn cmd_verify(cfg: &RunConfig, dir: &Path, meta: &Meta) -> Result<u8> {
    let v = cfg.validate()?;
    let (rows, all_pass) = verify_rows(cfg, cfg.convention)?;
    let alternate = match cfg.convention {
        Convention::Plain => Convention::Normalized,
        Convention::Normalized => Convention::Plain,
    };
    let (_, alt_pass) = verify_rows(cfg, alternate)?;

    let mut csvw = csv::Writer::from_path(dir.join("verify.csv"))?;
    csvw.write_record(["sigma", "lambda_min", "closed_form", "converged", "pass"])?;
    for r in &rows {
        csvw.write_record([
            r.sigma.to_string(),
            format!("{:e}", r.lambda_min),
            r.closed_form.map(|c| format!("{c:e}")).unwrap_or_default(),
            r.converged.to_string(),
            r.pass.to_string(),
        ])?;
    }
    csvw.flush()?;

    let result = VerifyResult {
        model: v.model.name().to_string(),
        mass: v.model.mass(),
        convention: cfg.convention,
        rows,
        all_pass,
        alternate_convention_all_pass: alt_pass,
    };
    write_report(dir.join("verify.json"), "verify", meta, &result)?;
    if !all_pass {
        return Ok(EXIT_VERIFICATION);
    }
    Ok(0)
}

fn cmd_report(cli: &Cli) -> Result<u8> {
    let cfg = cli.config.as_ref().map(RunConfig::from_path).transpose()?;
    let dir = out_dir(cli, cfg.as_ref())?;
    let summaries = summarize_dir(&dir)?;
    println!("{}", serde_json::to_string_pretty(&summaries)?);
    Ok(0)
}
