//! `dspp` — survival probabilities of the n-th jump of a doubly stochastic
//! Poisson process, computed by up to three independent routes and emitted
//! as CSV.
//!
//! Exit codes: 0 on success, 2 for input/validation errors, 3 for numerical
//! failures (non-convergence, branch problems, failed cross-checks).

mod catalogue;
mod config;
mod run;

use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use dspp::bell::complete_bell_det;
use dspp::hazard_models::HazardModelSpec;
use dspp::mc_oracle::McConfig;

use config::{Route, RunConfig};
use run::{compute_row, csv_escape, fmt_prob, format_row, SURVIVAL_HEADER};

/// Relative tolerance for agreement between the two analytic routes.
const ANALYTIC_RTOL: f64 = 1e-6;
/// Monte Carlo gate in standard errors.
const MC_SIGMA: f64 = 3.0;
/// Warning attached to every row when the config sets `assert_alive: false`.
const ALIVE_NOTE: &str =
    "analytic factor only; multiply by the indicator that the n-th jump has not occurred by t";

#[derive(Parser)]
#[command(
    name = "dspp",
    version,
    about = "Conditional survival probabilities of Cox-process jump times"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate P(tau_n > T | F_t) on the config grid; one CSV row per (T, n, route)
    Survival(RunArgs),
    /// Cross-check the analytic routes against each other and Monte Carlo
    Validate(ValidateArgs),
    /// Print the complete Bell polynomial B_n(x_1, ..., x_n)
    Bell(BellArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Path to a JSON run configuration
    #[arg(long)]
    config: PathBuf,
    /// Override mc.seed from the config
    #[arg(long)]
    seed: Option<u64>,
    /// Override mc.n_paths from the config
    #[arg(long)]
    paths: Option<usize>,
    /// Comma-separated routes to run instead of the config's list
    #[arg(long)]
    routes: Option<String>,
}

#[derive(Args)]
struct ValidateArgs {
    /// Optional run configuration; defaults to the built-in cross-model suite
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override mc.seed
    #[arg(long)]
    seed: Option<u64>,
    /// Override mc.n_paths
    #[arg(long)]
    paths: Option<usize>,
    /// Restrict checks to these routes (comma-separated)
    #[arg(long)]
    routes: Option<String>,
}

#[derive(Args)]
struct BellArgs {
    /// Polynomial order n >= 0
    n: usize,
    /// Comma-separated arguments x_1, ..., x_n (at least n values)
    xs: Option<String>,
}

/// An error carrying the process exit code it maps to.
struct CliError {
    code: i32,
    message: String,
}

impl CliError {
    fn input(message: impl Into<String>) -> Self {
        CliError { code: 2, message: message.into() }
    }

    fn numerical(message: impl Into<String>) -> Self {
        CliError { code: 3, message: message.into() }
    }
}

impl From<dspp::Error> for CliError {
    fn from(e: dspp::Error) -> Self {
        let code = match &e {
            dspp::Error::InvalidModel(_)
            | dspp::Error::InvalidArgument(_)
            | dspp::Error::Config(_)
            | dspp::Error::UnsupportedRoute { .. } => 2,
            _ => 3,
        };
        CliError { code, message: e.to_string() }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        if e.kind() == io::ErrorKind::BrokenPipe {
            // The consumer (e.g. `head`) closed the pipe: not our failure.
            CliError { code: 0, message: String::new() }
        } else {
            CliError::numerical(format!("i/o failure: {e}"))
        }
    }
}

fn main() {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Survival(args) => cmd_survival(args),
        Command::Validate(args) => cmd_validate(args),
        Command::Bell(args) => cmd_bell(args),
    };
    match outcome {
        Ok(()) => {}
        Err(e) => {
            if !e.message.is_empty() {
                eprintln!("error: {}", e.message);
            }
            std::process::exit(e.code);
        }
    }
}

fn load_config(path: &Path) -> Result<RunConfig, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::input(format!("cannot read {}: {e}", path.display())))?;
    RunConfig::from_json(&text).map_err(CliError::input)
}

fn parse_routes_arg(text: &str) -> Result<Vec<Route>, CliError> {
    let mut routes = Vec::new();
    for piece in text.split(',') {
        let piece = piece.trim();
        if piece.is_empty() {
            continue;
        }
        let route = Route::parse(piece).map_err(CliError::input)?;
        if !routes.contains(&route) {
            routes.push(route);
        }
    }
    if routes.is_empty() {
        return Err(CliError::input("--routes must name at least one route"));
    }
    Ok(routes)
}

fn cmd_survival(args: RunArgs) -> Result<(), CliError> {
    let mut cfg = load_config(&args.config)?;
    if let Some(seed) = args.seed {
        cfg.mc.seed = seed;
    }
    if let Some(paths) = args.paths {
        cfg.mc.n_paths = paths;
    }
    if let Some(routes) = &args.routes {
        cfg.routes = parse_routes_arg(routes)?;
    }
    let model = cfg.validate().map_err(CliError::input)?;
    let mc = cfg.mc.to_mc_config();
    let routes = cfg.ordered_routes();

    let stdout = io::stdout();
    let mut out = stdout.lock();
    writeln!(out, "{SURVIVAL_HEADER}")?;
    for &horizon in &cfg.horizons {
        for &n in &cfg.jump_indices {
            for &route in &routes {
                let mut row = compute_row(&model, cfg.t, horizon, n, route, &mc)?;
                if !cfg.assert_alive {
                    row.warnings.push(ALIVE_NOTE.to_string());
                }
                writeln!(out, "{}", format_row(&row))?;
            }
        }
    }
    Ok(())
}

/// Extra slack for analytic-vs-MC comparisons: the CIR simulation carries an
/// O(time_step) Euler bias that the exact-in-law samplers don't have.
fn mc_allowance(model: &HazardModelSpec, mc: &McConfig) -> f64 {
    match model {
        HazardModelSpec::Cir { theta, kappa, lambda_t, .. } => {
            2.0 * mc.time_step * theta * (kappa + lambda_t)
        }
        _ => 0.0,
    }
}

fn cmd_validate(args: ValidateArgs) -> Result<(), CliError> {
    let requested = match &args.routes {
        Some(text) => Some(parse_routes_arg(text)?),
        None => None,
    };
    let entries = match &args.config {
        Some(path) => {
            let mut cfg = load_config(path)?;
            if let Some(seed) = args.seed {
                cfg.mc.seed = seed;
            }
            if let Some(paths) = args.paths {
                cfg.mc.n_paths = paths;
            }
            let model = cfg.validate().map_err(CliError::input)?;
            vec![catalogue::SuiteEntry { label: model.name().to_string(), cfg }]
        }
        None => catalogue::builtin(args.seed, args.paths),
    };

    // Effective route set per entry: the entry's own list, narrowed by --routes.
    let effective: Vec<Vec<Route>> = entries
        .iter()
        .map(|entry| {
            entry
                .cfg
                .ordered_routes()
                .into_iter()
                .filter(|r| requested.as_ref().is_none_or(|req| req.contains(r)))
                .collect()
        })
        .collect();
    let mc_on = effective.iter().any(|routes| routes.contains(&Route::MonteCarlo));

    let stdout = io::stdout();
    let mut out = stdout.lock();
    if mc_on {
        writeln!(
            out,
            "model,T,n,bell,malliavin,monte_carlo,mc_std_error,analytic_rel_dev,mc_dev_over_se,status"
        )?;
    } else {
        writeln!(out, "model,T,n,bell,malliavin,analytic_rel_dev,status")?;
    }

    let mut passed = 0usize;
    let mut failed = 0usize;
    for (entry, routes) in entries.iter().zip(&effective) {
        if routes.is_empty() {
            continue;
        }
        let model = entry.cfg.model.to_model();
        let mc = entry.cfg.mc.to_mc_config();
        let allowance = mc_allowance(&model, &mc);
        for &horizon in &entry.cfg.horizons {
            for &n in &entry.cfg.jump_indices {
                let mut bell = None;
                let mut malliavin = None;
                let mut monte_carlo = None;
                for &route in routes {
                    let row = compute_row(&model, entry.cfg.t, horizon, n, route, &mc)?;
                    match route {
                        Route::Bell => bell = Some(row.probability),
                        Route::Malliavin => malliavin = Some(row.probability),
                        Route::MonteCarlo => {
                            monte_carlo = Some((row.probability, row.std_error.unwrap_or(0.0)))
                        }
                    }
                }

                let mut pass = true;
                let analytic_rel_dev = match (bell, malliavin) {
                    (Some(b), Some(m)) => {
                        let denom = b.abs().max(m.abs());
                        let rel = if denom == 0.0 { 0.0 } else { (b - m).abs() / denom };
                        if rel > ANALYTIC_RTOL {
                            pass = false;
                        }
                        Some(rel)
                    }
                    _ => None,
                };
                let reference = bell.or(malliavin);
                let mc_dev_over_se = match (reference, monte_carlo) {
                    (Some(a), Some((mean, se))) => {
                        let dev = (a - mean).abs();
                        if dev > MC_SIGMA * se + allowance {
                            pass = false;
                        }
                        Some(dev / se.max(f64::MIN_POSITIVE))
                    }
                    _ => None,
                };

                let mut line = String::new();
                let _ = write!(line, "{},{},{}", csv_escape(&entry.label), horizon, n);
                let opt = |v: Option<f64>| v.map(fmt_prob).unwrap_or_default();
                let _ = write!(line, ",{},{}", opt(bell), opt(malliavin));
                if mc_on {
                    match monte_carlo {
                        Some((mean, se)) => {
                            let _ = write!(line, ",{},{}", fmt_prob(mean), fmt_prob(se));
                        }
                        None => line.push_str(",,"),
                    }
                }
                let _ = write!(
                    line,
                    ",{}",
                    analytic_rel_dev.map(|r| format!("{r:.3e}")).unwrap_or_default()
                );
                if mc_on {
                    let _ = write!(
                        line,
                        ",{}",
                        mc_dev_over_se.map(|r| format!("{r:.2}")).unwrap_or_default()
                    );
                }
                let _ = write!(line, ",{}", if pass { "pass" } else { "fail" });
                writeln!(out, "{line}")?;

                if pass {
                    passed += 1;
                } else {
                    failed += 1;
                }
            }
        }
    }

    writeln!(out, "summary: {passed} passed / {failed} failed / {} total", passed + failed)?;
    if failed > 0 {
        return Err(CliError::numerical(format!("{failed} validation row(s) failed")));
    }
    Ok(())
}

fn cmd_bell(args: BellArgs) -> Result<(), CliError> {
    let text = args.xs.unwrap_or_default();
    let mut xs = Vec::new();
    for piece in text.split(',') {
        let piece = piece.trim();
        if piece.is_empty() {
            continue;
        }
        let x: f64 = piece
            .parse()
            .map_err(|e| CliError::input(format!("bad Bell argument {piece:?}: {e}")))?;
        xs.push(x);
    }
    if xs.len() < args.n {
        return Err(CliError::input(format!(
            "B_{} needs at least {} arguments, got {}",
            args.n,
            args.n,
            xs.len()
        )));
    }
    let value = complete_bell_det(args.n, &xs)?;
    println!("{value:.14e}");
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dspp_errors_map_to_documented_exit_codes() {
        let cases: Vec<(dspp::Error, i32)> = vec![
            (dspp::Error::InvalidModel("x".into()), 2),
            (dspp::Error::InvalidArgument("x".into()), 2),
            (dspp::Error::Config("x".into()), 2),
            (dspp::Error::UnsupportedRoute { route: "malliavin", model: "CIR" }, 2),
            (dspp::Error::NonFinite { context: "x".into() }, 3),
            (dspp::Error::CauchyNoConverge { detail: "x".into() }, 3),
            (dspp::Error::GammaPole { x: -1.0 }, 3),
        ];
        for (err, expected) in cases {
            let text = err.to_string();
            assert_eq!(CliError::from(err).code, expected, "misclassified: {text}");
        }
    }

    #[test]
    fn alive_note_needs_no_csv_quoting() {
        assert_eq!(csv_escape(ALIVE_NOTE), ALIVE_NOTE);
    }
}
