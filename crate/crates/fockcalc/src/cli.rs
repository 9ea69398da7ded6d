//! Command-line front end: `verify` runs the named check suite, `report`
//! aggregates every suite into one JSON document, `symbol` evaluates an
//! operator symbol against its closed form.
//!
//! Complex scalars are entered as `re,im` pairs (`0.5,-1` or plain `0.5`);
//! vectors as semicolon-separated pairs (`0.1,0;0.2,0.3`); real grids as
//! comma-separated lists. Grid flags may repeat; an empty-string occurrence
//! empties the grid. Exit code 0 means every reported check passed.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;

use crate::fockop::{self, FockOperator, OperatorError};
use crate::suites::{run_report, ConfigError, Report, RunConfig, Suite};
use crate::symtensor::SymTensor;
use crate::transforms;

type C = Complex64;

#[derive(Parser)]
#[command(
    name = "fockcalc",
    about = "Verification suites and operator symbols for truncated Fock-space calculus",
    version
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a verification suite and print one line per check.
    Verify {
        /// Suite name: tensor, chaos, algebra, transforms, mehler, regularity or all.
        suite: Option<String>,
        /// Alternative to the positional suite name.
        #[arg(long = "suite", value_name = "NAME")]
        suite_flag: Option<String>,
        #[command(flatten)]
        config: ConfigArgs,
        /// Also write the machine-readable report to this path.
        #[arg(long, value_name = "PATH")]
        json: Option<PathBuf>,
    },
    /// Run every suite and emit the aggregate JSON report.
    Report {
        #[command(flatten)]
        config: ConfigArgs,
        /// Write the report here instead of standard output.
        #[arg(long, value_name = "PATH")]
        json: Option<PathBuf>,
    },
    /// Evaluate an operator symbol at (xi, eta) and compare to its closed form.
    Symbol {
        /// Operator: identity, number, laplacian, scaling, translation,
        /// fourier, fourier-gauss, fourier-mehler-adjoint or group-p.
        op: String,
        /// First argument vector, e.g. "0.1,0;0.2,0".
        #[arg(long, allow_hyphen_values = true)]
        xi: String,
        /// Second argument vector.
        #[arg(long, allow_hyphen_values = true)]
        eta: String,
        /// Squared amplitude for fourier-gauss.
        #[arg(long, value_name = "RE,IM", allow_hyphen_values = true)]
        a2: Option<String>,
        /// Scaling factor for the scaling operator.
        #[arg(long, value_name = "RE,IM", allow_hyphen_values = true)]
        lambda: Option<String>,
        /// Translation direction, same format as --xi.
        #[arg(long, value_name = "VEC", allow_hyphen_values = true)]
        y: Option<String>,
        #[command(flatten)]
        config: ConfigArgs,
    },
}

#[derive(Args)]
struct ConfigArgs {
    /// Base-space dimension.
    #[arg(long, default_value_t = 2)]
    dim: usize,
    /// Top chaos degree kept by the truncation.
    #[arg(long, default_value_t = 10)]
    nmax: usize,
    /// Gauss-Hermite nodes per axis.
    #[arg(long = "quad-order", default_value_t = 16)]
    quad_order: usize,
    /// Tolerance for degreewise-exact identities.
    #[arg(long = "tol-exact", default_value_t = 1e-11)]
    tol_exact: f64,
    /// Tolerance for cross-implementation and quadrature comparisons.
    #[arg(long = "tol-oracle", default_value_t = 1e-9)]
    tol_oracle: f64,
    /// Seed for all randomized checks; reruns are byte-identical.
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Generator coefficient a as "re,im"; repeat to form a grid.
    #[arg(long = "a", value_name = "RE,IM", allow_hyphen_values = true)]
    a_grid: Vec<String>,
    /// Generator coefficient b, paired with --a by position.
    #[arg(long = "b", value_name = "RE,IM", allow_hyphen_values = true)]
    b_grid: Vec<String>,
    /// Comma-separated group times.
    #[arg(long = "t", value_name = "LIST", allow_hyphen_values = true)]
    t_grid: Option<String>,
    /// Comma-separated rotation angles.
    #[arg(long = "theta", value_name = "LIST", allow_hyphen_values = true)]
    theta_grid: Option<String>,
}

#[derive(Debug)]
enum CliError {
    Parse(String),
    Config(ConfigError),
    Symbol(OperatorError),
    Io(std::io::Error),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Parse(msg) => write!(f, "{msg}"),
            CliError::Config(e) => write!(f, "{e}"),
            CliError::Symbol(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "{e}"),
        }
    }
}

fn parse_complex(text: &str) -> Result<C, CliError> {
    let parts: Vec<&str> = text.split(',').collect();
    let bad = || CliError::Parse(format!("cannot parse '{text}' as a complex 're,im' pair"));
    match parts.as_slice() {
        [re] => Ok(C::new(re.trim().parse().map_err(|_| bad())?, 0.0)),
        [re, im] => Ok(C::new(
            re.trim().parse().map_err(|_| bad())?,
            im.trim().parse().map_err(|_| bad())?,
        )),
        _ => Err(bad()),
    }
}

fn parse_cvec(text: &str) -> Result<Vec<C>, CliError> {
    text.split(';').map(parse_complex).collect()
}

fn parse_f64_list(text: &str) -> Result<Vec<f64>, CliError> {
    if text.trim().is_empty() {
        return Ok(Vec::new());
    }
    text.split(',')
        .map(|p| {
            p.trim()
                .parse()
                .map_err(|_| CliError::Parse(format!("cannot parse '{p}' as a real number")))
        })
        .collect()
}

fn parse_complex_grid(entries: &[String], default: &[C]) -> Result<Vec<C>, CliError> {
    if entries.is_empty() {
        return Ok(default.to_vec());
    }
    if entries.iter().any(|e| e.trim().is_empty()) {
        return Ok(Vec::new());
    }
    entries.iter().map(|e| parse_complex(e)).collect()
}

impl ConfigArgs {
    fn build(&self) -> Result<RunConfig, CliError> {
        let cfg = self.assemble()?;
        cfg.validate().map_err(CliError::Config)?;
        Ok(cfg)
    }

    /// The symbol command reads single parameters, not sweep grids, so the
    /// grid-pairing rule does not apply.
    fn build_single(&self) -> Result<RunConfig, CliError> {
        let cfg = self.assemble()?;
        if cfg.dim < 1 {
            return Err(CliError::Config(ConfigError::DimTooSmall));
        }
        if cfg.nmax < 2 {
            return Err(CliError::Config(ConfigError::NmaxTooSmall));
        }
        Ok(cfg)
    }

    fn assemble(&self) -> Result<RunConfig, CliError> {
        let defaults = RunConfig::default();
        let cfg = RunConfig {
            dim: self.dim,
            nmax: self.nmax,
            quad_order: self.quad_order,
            tol_exact: self.tol_exact,
            tol_oracle: self.tol_oracle,
            seed: self.seed,
            a_grid: parse_complex_grid(&self.a_grid, &defaults.a_grid)?,
            b_grid: parse_complex_grid(&self.b_grid, &defaults.b_grid)?,
            t_grid: match &self.t_grid {
                Some(text) => parse_f64_list(text)?,
                None => defaults.t_grid,
            },
            theta_grid: match &self.theta_grid {
                Some(text) => parse_f64_list(text)?,
                None => defaults.theta_grid,
            },
        };
        Ok(cfg)
    }
}

pub fn run() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(all_pass) => {
            if all_pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(cli: Cli) -> Result<bool, CliError> {
    match cli.command {
        Command::Verify { suite, suite_flag, config, json } => {
            let name = match (suite, suite_flag) {
                (Some(a), Some(b)) if a != b => {
                    return Err(CliError::Parse(format!(
                        "conflicting suite names '{a}' and '{b}'"
                    )));
                }
                (Some(a), _) => a,
                (None, Some(b)) => b,
                (None, None) => "all".to_string(),
            };
            let suites = Suite::parse(&name).map_err(CliError::Config)?;
            let cfg = config.build()?;
            let report = run_report(&suites, &cfg);
            print!("{}", format_report_text(&report));
            if let Some(path) = json {
                write_json(&report, &path)?;
            }
            Ok(report.all_pass)
        }
        Command::Report { config, json } => {
            let cfg = config.build()?;
            let report = run_report(&Suite::ALL, &cfg);
            let text = serde_json::to_string_pretty(&report)
                .expect("report serialization is infallible");
            match json {
                Some(path) => std::fs::write(path, text + "\n").map_err(CliError::Io)?,
                None => println!("{text}"),
            }
            Ok(report.all_pass)
        }
        Command::Symbol { op, xi, eta, a2, lambda, y, config } => {
            let cfg = config.build_single()?;
            let xi = parse_cvec(&xi)?;
            let eta = parse_cvec(&eta)?;
            if xi.len() != cfg.dim || eta.len() != cfg.dim {
                return Err(CliError::Parse(format!(
                    "xi and eta must have {} coordinates",
                    cfg.dim
                )));
            }
            run_symbol(&op, &xi, &eta, a2.as_deref(), lambda.as_deref(), y.as_deref(), &cfg)
        }
    }
}

fn format_report_text(report: &Report) -> String {
    let mut out = String::new();
    for check in &report.results {
        let mark = if check.pass { "PASS" } else { "FAIL" };
        writeln!(
            out,
            "[{mark}] {}/{}  residual {:.3e}  tol {:.1e}  ({})",
            check.suite, check.invariant, check.max_residual, check.tolerance, check.identity
        )
        .expect("string formatting");
    }
    let passed = report.results.iter().filter(|c| c.pass).count();
    let failed = report.results.len() - passed;
    writeln!(out, "{} checks: {passed} passed, {failed} failed", report.results.len())
        .expect("string formatting");
    out
}

fn write_json(report: &Report, path: &PathBuf) -> Result<(), CliError> {
    let text =
        serde_json::to_string_pretty(report).expect("report serialization is infallible");
    std::fs::write(path, text + "\n").map_err(CliError::Io)
}

struct SymbolCase {
    operator: FockOperator<C>,
    closed_form: Option<C>,
    description: String,
}

fn build_symbol_case(
    op: &str,
    xi: &[C],
    eta: &[C],
    a2: Option<&str>,
    lambda: Option<&str>,
    y: Option<&str>,
    cfg: &RunConfig,
) -> Result<SymbolCase, CliError> {
    let d = cfg.dim;
    let nmax = cfg.nmax;
    let dotp = |a: &[C], b: &[C]| -> C { a.iter().zip(b).map(|(&x, &y)| x * y).sum() };
    let missing = |flag: &str| CliError::Parse(format!("operator '{op}' needs {flag}"));
    match op {
        "identity" => Ok(SymbolCase {
            operator: FockOperator::identity(d, nmax),
            closed_form: Some(dotp(xi, eta).exp()),
            description: "exp(<xi,eta>)".into(),
        }),
        "number" => Ok(SymbolCase {
            operator: fockop::number_operator(d, nmax),
            closed_form: Some(dotp(xi, eta) * dotp(xi, eta).exp()),
            description: "<xi,eta> exp(<xi,eta>)".into(),
        }),
        "laplacian" | "gross-laplacian" => Ok(SymbolCase {
            operator: fockop::gross_laplacian(d, nmax),
            closed_form: Some(dotp(xi, xi) * dotp(xi, eta).exp()),
            description: "<xi,xi> exp(<xi,eta>)".into(),
        }),
        "scaling" => {
            let lam = parse_complex(lambda.ok_or_else(|| missing("--lambda"))?)?;
            Ok(SymbolCase {
                operator: transforms::scaling(lam, d, nmax),
                closed_form: Some(transforms::fourier_gauss_symbol(
                    C::new(0.0, 0.0),
                    lam,
                    xi,
                    eta,
                )),
                description: "exp((lambda^2-1)/2 <xi,xi> + lambda <xi,eta>)".into(),
            })
        }
        "translation" => {
            let y = parse_cvec(y.ok_or_else(|| missing("--y"))?)?;
            if y.len() != d {
                return Err(CliError::Parse(format!("--y must have {d} coordinates")));
            }
            let direction = SymTensor::power(&y, 1);
            Ok(SymbolCase {
                operator: fockop::translation(&direction, nmax)
                    .map_err(CliError::Symbol)?,
                closed_form: Some((dotp(&y, xi) + dotp(xi, eta)).exp()),
                description: "exp(<y,xi> + <xi,eta>)".into(),
            })
        }
        "fourier" => Ok(SymbolCase {
            operator: transforms::fourier_transform(d, nmax),
            closed_form: Some(transforms::fourier_symbol(xi, eta)),
            description: "exp(-i <xi,eta> - <eta,eta>/2)".into(),
        }),
        "fourier-gauss" => {
            let a2 = parse_complex(a2.ok_or_else(|| missing("--a2"))?)?;
            let b = *cfg
                .b_grid
                .first()
                .ok_or_else(|| missing("--b"))?;
            Ok(SymbolCase {
                operator: transforms::fourier_gauss(a2, b, d, nmax),
                closed_form: Some(transforms::fourier_gauss_symbol(a2, b, xi, eta)),
                description: "exp((a^2+b^2-1)/2 <xi,xi> + b <xi,eta>)".into(),
            })
        }
        "fourier-mehler-adjoint" => {
            let theta = *cfg
                .theta_grid
                .first()
                .ok_or_else(|| missing("--theta"))?;
            Ok(SymbolCase {
                operator: transforms::fourier_mehler_adjoint(theta, d, nmax),
                closed_form: Some(transforms::fourier_mehler_adjoint_symbol(theta, xi, eta)),
                description: "exp(e^(i theta) <xi,eta> + i/2 e^(i theta) sin(theta) <xi,xi>)"
                    .into(),
            })
        }
        "group-p" => {
            let a = *cfg.a_grid.first().ok_or_else(|| missing("--a"))?;
            let b = *cfg.b_grid.first().ok_or_else(|| missing("--b"))?;
            let t = *cfg.t_grid.first().ok_or_else(|| missing("--t"))?;
            let params = transforms::GroupParams::new(a, b, t);
            Ok(SymbolCase {
                operator: transforms::mehler_group(&params, d, nmax),
                closed_form: Some(transforms::fourier_gauss_symbol(
                    params.scale_squared(),
                    params.multiplier(),
                    xi,
                    eta,
                )),
                description: "Fourier-Gauss symbol at the group parameters".into(),
            })
        }
        other => Err(CliError::Parse(format!("unknown operator '{other}'"))),
    }
}

fn run_symbol(
    op: &str,
    xi: &[C],
    eta: &[C],
    a2: Option<&str>,
    lambda: Option<&str>,
    y: Option<&str>,
    cfg: &RunConfig,
) -> Result<bool, CliError> {
    let case = build_symbol_case(op, xi, eta, a2, lambda, y, cfg)?;
    let sym = fockop::operator_symbol(&case.operator, xi, eta, cfg.tol_oracle)
        .map_err(CliError::Symbol)?;
    println!("operator:    {op}");
    println!("symbol:      {:+.15e} {:+.15e}i", sym.value.re, sym.value.im);
    println!("tail bound:  {:.3e}", sym.tail_bound);
    let mut pass = true;
    if let Some(want) = case.closed_form {
        let residual = (sym.value - want).norm();
        println!("closed form: {:+.15e} {:+.15e}i   [{}]", want.re, want.im, case.description);
        println!("residual:    {residual:.3e}");
        pass = residual <= sym.tail_bound.max(cfg.tol_oracle);
    }
    Ok(pass)
}
