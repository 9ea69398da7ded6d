//! Verification suites: every identity the crate implements, run as a named
//! check that returns its worst residual. The CLI, the examples and the
//! acceptance tests all drive these.
//!
//! Determinism contract: a run is a pure function of `(RunConfig, suite)`.
//! Cases execute in a worker pool, but each case owns an RNG seeded from the
//! config seed and the case's position, so reports are byte-identical across
//! reruns and thread schedules.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::chaos::{ChaosVector, Rep};
use crate::linalg::Mat;
use crate::symtensor::{factorial, SymTensor};

mod algebra;
mod chaos_suite;
mod mehler;
mod regularity;
mod tensor;
mod transforms_suite;

type C = Complex64;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("dimension must be at least 1")]
    DimTooSmall,
    #[error("truncation degree must be at least 2")]
    NmaxTooSmall,
    #[error("tolerances must be positive")]
    NonPositiveTolerance,
    #[error("the a-grid and b-grid must pair up (got {a} and {b} entries)")]
    UnevenParameterGrids { a: usize, b: usize },
    #[error("unknown suite '{0}'; expected tensor, chaos, algebra, transforms, mehler, regularity or all")]
    UnknownSuite(String),
}

/// Configuration of a verification run.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub dim: usize,
    pub nmax: usize,
    pub quad_order: usize,
    pub tol_exact: f64,
    pub tol_oracle: f64,
    pub seed: u64,
    /// Generator coefficients, paired entrywise with `b_grid`.
    pub a_grid: Vec<C>,
    pub b_grid: Vec<C>,
    pub t_grid: Vec<f64>,
    pub theta_grid: Vec<f64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            dim: 2,
            nmax: 10,
            quad_order: 16,
            tol_exact: 1e-11,
            tol_oracle: 1e-9,
            seed: 7,
            a_grid: vec![
                C::new(0.0, 0.0),
                C::new(1.0, 0.0),
                C::new(0.3, -0.2),
                C::new(0.5, 0.0),
                C::new(-0.4, 0.1),
                C::new(0.8, 0.5),
            ],
            b_grid: vec![
                C::new(-1.0, 0.0),
                C::new(0.0, 0.0),
                C::new(0.4, 0.3),
                C::new(0.25, 0.0),
                C::new(0.0, -0.6),
                C::new(0.0, 0.0),
            ],
            t_grid: vec![-0.3, -0.1, 0.05, 0.2, 0.35],
            theta_grid: vec![-0.7, -0.2, 0.1, 0.3, 0.6],
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.dim < 1 {
            return Err(ConfigError::DimTooSmall);
        }
        if self.nmax < 2 {
            return Err(ConfigError::NmaxTooSmall);
        }
        if self.tol_exact <= 0.0 || self.tol_oracle <= 0.0 {
            return Err(ConfigError::NonPositiveTolerance);
        }
        if self.a_grid.len() != self.b_grid.len() {
            return Err(ConfigError::UnevenParameterGrids {
                a: self.a_grid.len(),
                b: self.b_grid.len(),
            });
        }
        Ok(())
    }

    /// Generator-coefficient pairs for the group sweeps.
    pub fn ab_pairs(&self) -> Vec<(C, C)> {
        self.a_grid.iter().copied().zip(self.b_grid.iter().copied()).collect()
    }

    pub fn all_grids_empty(&self) -> bool {
        self.a_grid.is_empty()
            && self.b_grid.is_empty()
            && self.t_grid.is_empty()
            && self.theta_grid.is_empty()
    }
}

/// How a check's tolerance is resolved against the configuration.
#[derive(Clone, Copy, Debug)]
pub enum TolKind {
    /// Degreewise-exact identity: `tol_exact`.
    Exact,
    /// Cross-implementation or quadrature comparison: `tol_oracle`.
    Oracle,
    /// Pinned value independent of the configuration.
    Fixed(f64),
}

impl TolKind {
    fn resolve(self, cfg: &RunConfig) -> f64 {
        match self {
            TolKind::Exact => cfg.tol_exact,
            TolKind::Oracle => cfg.tol_oracle,
            TolKind::Fixed(v) => v,
        }
    }
}

/// A named check: runs against the config and returns its worst residual.
pub struct CheckCase {
    pub name: &'static str,
    /// Human-readable statement of the identity being checked.
    pub identity: &'static str,
    pub tol: TolKind,
    pub run: fn(&RunConfig, &mut ChaCha8Rng) -> f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Tensor,
    Chaos,
    Algebra,
    Transforms,
    Mehler,
    Regularity,
}

impl Suite {
    pub const ALL: [Suite; 6] = [
        Suite::Tensor,
        Suite::Chaos,
        Suite::Algebra,
        Suite::Transforms,
        Suite::Mehler,
        Suite::Regularity,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Tensor => "tensor",
            Suite::Chaos => "chaos",
            Suite::Algebra => "algebra",
            Suite::Transforms => "transforms",
            Suite::Mehler => "mehler",
            Suite::Regularity => "regularity",
        }
    }

    pub fn parse(name: &str) -> Result<Vec<Suite>, ConfigError> {
        match name {
            "all" => Ok(Self::ALL.to_vec()),
            "tensor" => Ok(vec![Suite::Tensor]),
            "chaos" => Ok(vec![Suite::Chaos]),
            "algebra" => Ok(vec![Suite::Algebra]),
            "transforms" => Ok(vec![Suite::Transforms]),
            "mehler" => Ok(vec![Suite::Mehler]),
            "regularity" => Ok(vec![Suite::Regularity]),
            other => Err(ConfigError::UnknownSuite(other.to_string())),
        }
    }

    pub fn cases(self) -> Vec<CheckCase> {
        match self {
            Suite::Tensor => tensor::cases(),
            Suite::Chaos => chaos_suite::cases(),
            Suite::Algebra => algebra::cases(),
            Suite::Transforms => transforms_suite::cases(),
            Suite::Mehler => mehler::cases(),
            Suite::Regularity => regularity::cases(),
        }
    }
}

/// Result of one check, in the stable report field order.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CheckResult {
    pub suite: String,
    pub invariant: String,
    pub identity: String,
    pub max_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub checks: Vec<CheckResult>,
    pub pass: bool,
}

/// Run one suite. Cases evaluate in parallel; the result order and every
/// residual are functions of the config alone.
pub fn run_suite(suite: Suite, cfg: &RunConfig) -> SuiteReport {
    let cases = if cfg.all_grids_empty() { Vec::new() } else { suite.cases() };
    let checks: Vec<CheckResult> = cases
        .par_iter()
        .enumerate()
        .map(|(idx, case)| {
            let mut rng = case_rng(cfg.seed, suite, idx);
            // a check that errors out is a failed check, not a crashed run
            let residual = std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| {
                (case.run)(cfg, &mut rng)
            }))
            .unwrap_or(f64::INFINITY);
            let tolerance = case.tol.resolve(cfg);
            CheckResult {
                suite: suite.name().to_string(),
                invariant: case.name.to_string(),
                identity: case.identity.to_string(),
                max_residual: residual,
                tolerance,
                pass: residual <= tolerance,
            }
        })
        .collect();
    let pass = checks.iter().all(|c| c.pass);
    SuiteReport { suite: suite.name().to_string(), checks, pass }
}

fn case_rng(seed: u64, suite: Suite, idx: usize) -> ChaCha8Rng {
    let salt = (suite as u64 + 1)
        .wrapping_mul(0x9E37_79B9_7F4A_7C15)
        .wrapping_add((idx as u64 + 1).wrapping_mul(0xD1B5_4A32_D192_ED03));
    ChaCha8Rng::seed_from_u64(seed ^ salt)
}

// ---------------------------------------------------------------------------
// aggregated report (the CLI's JSON document)
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub dim: usize,
    pub nmax: usize,
    pub quad_order: usize,
    pub tol_exact: f64,
    pub tol_oracle: f64,
    pub seed: u64,
    pub a: Vec<(f64, f64)>,
    pub b: Vec<(f64, f64)>,
    pub t: Vec<f64>,
    pub theta: Vec<f64>,
}

impl From<&RunConfig> for ConfigEcho {
    fn from(cfg: &RunConfig) -> Self {
        Self {
            dim: cfg.dim,
            nmax: cfg.nmax,
            quad_order: cfg.quad_order,
            tol_exact: cfg.tol_exact,
            tol_oracle: cfg.tol_oracle,
            seed: cfg.seed,
            a: cfg.a_grid.iter().map(|z| (z.re, z.im)).collect(),
            b: cfg.b_grid.iter().map(|z| (z.re, z.im)).collect(),
            t: cfg.t_grid.clone(),
            theta: cfg.theta_grid.clone(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Report {
    pub config: ConfigEcho,
    pub results: Vec<CheckResult>,
    pub all_pass: bool,
}

/// Run the given suites and assemble the aggregate report.
pub fn run_report(suites: &[Suite], cfg: &RunConfig) -> Report {
    let mut results = Vec::new();
    for &suite in suites {
        results.extend(run_suite(suite, cfg).checks);
    }
    let all_pass = results.iter().all(|c| c.pass);
    Report { config: ConfigEcho::from(cfg), results, all_pass }
}

// ---------------------------------------------------------------------------
// shared random input builders
// ---------------------------------------------------------------------------

pub(crate) fn rand_complex(rng: &mut ChaCha8Rng, scale: f64) -> C {
    C::new(rng.gen_range(-scale..scale), rng.gen_range(-scale..scale))
}

pub(crate) fn rand_cvec(rng: &mut ChaCha8Rng, d: usize, scale: f64) -> Vec<C> {
    (0..d).map(|_| rand_complex(rng, scale)).collect()
}

pub(crate) fn rand_tensor(rng: &mut ChaCha8Rng, d: usize, n: usize, scale: f64) -> SymTensor<C> {
    SymTensor::from_fn(d, n, |_| rand_complex(rng, scale))
}

/// Random chaos vector with `1/n!`-damped coefficients up to `top`,
/// the profile of an honest test function.
pub(crate) fn rand_chaos(
    rng: &mut ChaCha8Rng,
    d: usize,
    nmax: usize,
    top: usize,
    rep: Rep,
) -> ChaosVector {
    let coeffs = (0..=nmax)
        .map(|n| {
            if n <= top {
                rand_tensor(rng, d, n, 1.0).scale(1.0 / factorial(n))
            } else {
                SymTensor::zero(d, n)
            }
        })
        .collect();
    ChaosVector::from_coeffs(coeffs, rep)
}

pub(crate) fn rand_matrix(rng: &mut ChaCha8Rng, d: usize, scale: f64) -> Mat<C> {
    Mat::from_fn(d, d, |_, _| rand_complex(rng, scale))
}

pub(crate) fn rel_scalar(a: C, b: C) -> f64 {
    (a - b).norm() / a.norm().max(b.norm()).max(1.0)
}

pub(crate) fn dot(a: &[C], b: &[C]) -> C {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}
