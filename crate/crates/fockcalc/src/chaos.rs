//! Truncated chaos expansions and their three coefficient representations.
//!
//! A [`ChaosVector`] is a list of symmetric tensors `f_0 .. f_nmax` together
//! with a representation tag saying which basis of functionals the
//! coefficients refer to:
//!
//! * `Wick` — the normally ordered powers `:x^(x)n:` (Hermite basis),
//! * `Monomial` — the plain powers `x^(x)n`,
//! * `Kappa(kernel)` — the renormalized powers `:x^(x)n:_kappa` built from an
//!   arbitrary symmetric kernel in place of the trace.
//!
//! The same function has different coefficients in each representation; the
//! tag prevents silent mixing and all conversions are explicit. Conversions
//! are compositions of exact exponentials of degree-lowering operators, hence
//! exact inverses of one another even at truncation.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fockop::{self, FockOperator, KernelSpec};
use crate::symtensor::{
    basis, factorial, falling_ratio, sym_power, MultiIndex, SymTensor, TensorError,
};

type C = Complex64;

#[derive(Debug, Error)]
pub enum ChaosError {
    #[error("representation mismatch: operation requires {expected}, got {got}")]
    RepresentationMismatch { expected: &'static str, got: &'static str },
    #[error("dimension mismatch between chaos vectors")]
    DimensionMismatch,
    #[error("beta must lie in [0, 1), got {0}")]
    BetaOutOfRange(f64),
    #[error("renormalization kernels must have order at least 1")]
    KernelOrderZero,
    #[error("seminorm spectrum must satisfy lambda_i > 1 for every i")]
    SpectrumNotAboveOne,
    #[error("seminorm spectrum has {got} entries, expected the dimension {expected}")]
    SpectrumLength { expected: usize, got: usize },
    #[error(transparent)]
    Tensor(#[from] TensorError),
    #[error("operator step failed during a representation conversion: {0}")]
    Conversion(String),
}

pub type Result<T, E = ChaosError> = std::result::Result<T, E>;

/// Which family of tensor powers the coefficients multiply.
#[derive(Clone, Debug, PartialEq)]
pub enum Rep {
    Wick,
    Monomial,
    /// Renormalized powers built from this kernel (order `>= 1`).
    Kappa(SymTensor<C>),
}

impl Rep {
    fn name(&self) -> &'static str {
        match self {
            Rep::Wick => "wick",
            Rep::Monomial => "monomial",
            Rep::Kappa(_) => "kappa",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ChaosVector {
    dim: usize,
    nmax: usize,
    coeffs: Vec<SymTensor<C>>,
    rep: Rep,
}

impl ChaosVector {
    pub fn zero(dim: usize, nmax: usize, rep: Rep) -> Self {
        let coeffs = (0..=nmax).map(|n| SymTensor::zero(dim, n)).collect();
        Self { dim, nmax, coeffs, rep }
    }

    pub fn constant(value: C, dim: usize, nmax: usize) -> Self {
        let mut v = Self::zero(dim, nmax, Rep::Wick);
        v.coeffs[0] = SymTensor::scalar(dim, value);
        v
    }

    pub fn from_coeffs(coeffs: Vec<SymTensor<C>>, rep: Rep) -> Self {
        assert!(!coeffs.is_empty());
        let dim = coeffs[0].dim();
        for (n, f) in coeffs.iter().enumerate() {
            assert_eq!(f.order(), n, "coefficient {n} has wrong order");
            assert_eq!(f.dim(), dim, "coefficient {n} has wrong dimension");
        }
        let nmax = coeffs.len() - 1;
        Self { dim, nmax, coeffs, rep }
    }

    /// Exponential vector: Wick coefficients `xi^(x)n / n!`.
    pub fn exp_vector(xi: &[C], nmax: usize) -> Self {
        let coeffs = (0..=nmax)
            .map(|n| SymTensor::power(xi, n).scale(1.0 / factorial(n)))
            .collect();
        Self { dim: xi.len(), nmax, coeffs, rep: Rep::Wick }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nmax(&self) -> usize {
        self.nmax
    }

    pub fn rep(&self) -> &Rep {
        &self.rep
    }

    pub fn coeffs(&self) -> &[SymTensor<C>] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [SymTensor<C>] {
        &mut self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(SymTensor::is_zero)
    }

    /// Highest degree carrying a nonzero coefficient; `None` for the zero vector.
    pub fn top_degree(&self) -> Option<usize> {
        (0..=self.nmax).rev().find(|&n| !self.coeffs[n].is_zero())
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.rep, other.rep, "explicit conversion required before adding");
        assert_eq!((self.dim, self.nmax), (other.dim, other.nmax));
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a.add(b)).collect();
        Self { dim: self.dim, nmax: self.nmax, coeffs, rep: self.rep.clone() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-1.0))
    }

    pub fn scale(&self, k: f64) -> Self {
        let coeffs = self.coeffs.iter().map(|f| f.scale(k)).collect();
        Self { dim: self.dim, nmax: self.nmax, coeffs, rep: self.rep.clone() }
    }

    pub fn scale_t(&self, k: C) -> Self {
        let coeffs = self.coeffs.iter().map(|f| f.scale_t(k)).collect();
        Self { dim: self.dim, nmax: self.nmax, coeffs, rep: self.rep.clone() }
    }

    /// Coefficient norm `sqrt(sum_n |f_n|_0^2)`.
    pub fn norm(&self) -> f64 {
        self.coeffs.iter().map(|f| f.norm().powi(2)).sum::<f64>().sqrt()
    }

    /// Blockwise relative distance, mirroring the operator equality metric.
    pub fn max_rel_residual(&self, other: &Self) -> f64 {
        assert_eq!((self.dim, self.rep.name()), (other.dim, other.rep.name()));
        let top = self.nmax.min(other.nmax);
        let mut worst = 0.0f64;
        for n in 0..=top {
            let (a, b) = (&self.coeffs[n], &other.coeffs[n]);
            let diff = a.sub(b).norm();
            worst = worst.max(diff / a.norm().max(b.norm()).max(1.0));
        }
        worst
    }

    /// Factorial-weighted bilinear duality `sum_n n! pair(F_n, f_n)`.
    /// Different truncations are allowed; the shorter side is zero-padded.
    pub fn dual_pair(&self, other: &Self) -> Result<C> {
        self.require_rep(&Rep::Wick)?;
        other.require_rep(&Rep::Wick)?;
        if self.dim != other.dim {
            return Err(ChaosError::DimensionMismatch);
        }
        let top = self.nmax.min(other.nmax);
        let mut acc = C::new(0.0, 0.0);
        for n in 0..=top {
            acc += self.coeffs[n].pair(&other.coeffs[n])? * factorial(n);
        }
        Ok(acc)
    }

    /// `S(self)(xi) = <<Phi_xi, self>> = sum_n pair(f_n, xi^(x)n)`.
    pub fn s_transform(&self, xi: &[C]) -> Result<C> {
        self.require_rep(&Rep::Wick)?;
        let mut acc = C::new(0.0, 0.0);
        for n in 0..=self.nmax {
            if self.coeffs[n].is_zero() {
                continue;
            }
            acc += self.coeffs[n].pair(&SymTensor::power(xi, n))?;
        }
        Ok(acc)
    }

    /// Pointwise evaluation `sum_n sum_alpha (n!/alpha!) m_alpha x^alpha`
    /// of the underlying polynomial; any representation, complex arguments.
    pub fn eval_at(&self, x: &[C]) -> Result<C> {
        let mono = self.to_monomial()?;
        let mut acc = C::new(0.0, 0.0);
        for n in 0..=mono.nmax {
            if mono.coeffs[n].is_zero() {
                continue;
            }
            acc += mono.coeffs[n].pair(&SymTensor::power(x, n))?;
        }
        Ok(acc)
    }

    fn require_rep(&self, expected: &Rep) -> Result<()> {
        if self.rep.name() != expected.name() {
            return Err(ChaosError::RepresentationMismatch {
                expected: expected.name(),
                got: self.rep.name(),
            });
        }
        Ok(())
    }

    fn apply_seq(&self, op: &FockOperator<C>, rep: Rep) -> Self {
        Self { dim: self.dim, nmax: self.nmax, coeffs: op.apply_coeffs(&self.coeffs), rep }
    }

    /// Convert to the Wick representation (identity when already there).
    ///
    /// From monomial coefficients this applies the exact sequence exponential
    /// `exp(+1/2 Laplacian)`; from a kappa representation additionally
    /// `exp(-1/2 Xi_{0,r}(kappa))`. Both factors are nilpotent lowering
    /// operators, so the conversions are exact and invertible at truncation.
    pub fn to_wick(&self) -> Result<Self> {
        match &self.rep {
            Rep::Wick => Ok(self.clone()),
            Rep::Monomial => {
                let half_lap = half_laplacian(self.dim, self.nmax, 0.5)?;
                Ok(self.apply_seq(&half_lap, Rep::Wick))
            }
            Rep::Kappa(kernel) => {
                let half_lap = half_laplacian(self.dim, self.nmax, 0.5)?;
                let kappa_half = half_kernel_exp(kernel, self.nmax, -0.5)?;
                Ok(self.apply_seq(&half_lap, Rep::Wick).apply_seq(&kappa_half, Rep::Wick))
            }
        }
    }

    pub fn to_monomial(&self) -> Result<Self> {
        match &self.rep {
            Rep::Monomial => Ok(self.clone()),
            Rep::Wick => {
                let half_lap = half_laplacian(self.dim, self.nmax, -0.5)?;
                Ok(self.apply_seq(&half_lap, Rep::Monomial))
            }
            Rep::Kappa(kernel) => {
                let kappa_half = half_kernel_exp(kernel, self.nmax, -0.5)?;
                Ok(self.apply_seq(&kappa_half, Rep::Monomial))
            }
        }
    }

    /// Convert to the representation by renormalized powers of `kernel`.
    pub fn to_kappa(&self, kernel: &SymTensor<C>) -> Result<Self> {
        if kernel.order() == 0 {
            return Err(ChaosError::KernelOrderZero);
        }
        let wick = self.to_wick()?;
        let half_lap = half_laplacian(self.dim, self.nmax, -0.5)?;
        let kappa_half = half_kernel_exp(kernel, self.nmax, 0.5)?;
        Ok(wick
            .apply_seq(&kappa_half, Rep::Wick)
            .apply_seq(&half_lap, Rep::Kappa(kernel.clone())))
    }

    /// Combinatorial route out of a kappa representation: expand each
    /// renormalized power by [`renormalized_power_terms`] and contract, landing
    /// in monomial coefficients, then normal-order. Independent of the
    /// operator-exponential route in [`Self::to_wick`] up to the shared final
    /// normal-ordering step.
    pub fn to_wick_by_expansion(&self) -> Result<Self> {
        let Rep::Kappa(kernel) = &self.rep else {
            return Err(ChaosError::RepresentationMismatch {
                expected: "kappa",
                got: self.rep.name(),
            });
        };
        let r = kernel.order();
        let mut mono = Self::zero(self.dim, self.nmax, Rep::Monomial);
        for n in 0..=self.nmax {
            if self.coeffs[n].is_zero() {
                continue;
            }
            for term in renormalized_power_terms(kernel, n)? {
                let contracted = SymTensor::right_contract(
                    &sym_power(kernel, (n - term.degree) / r),
                    &self.coeffs[n],
                )?;
                mono.coeffs[term.degree] =
                    mono.coeffs[term.degree].add(&contracted.scale(term.weight));
            }
        }
        mono.to_wick()
    }

    /// Seminorm `(sum_n (n!)^(1+beta) |A^p f_n|_0^2)^(1/2)` for a diagonal
    /// one-particle weight `A`.
    pub fn seminorm(&self, p: f64, beta: f64, cfg: &SeminormConfig) -> Result<f64> {
        self.require_rep(&Rep::Wick)?;
        if !(0.0..1.0).contains(&beta) {
            return Err(ChaosError::BetaOutOfRange(beta));
        }
        if cfg.lambda.len() != self.dim {
            return Err(ChaosError::SpectrumLength { expected: self.dim, got: cfg.lambda.len() });
        }
        let mut acc = 0.0;
        for n in 0..=self.nmax {
            let weight = factorial(n).powf(1.0 + beta);
            let mut block = 0.0;
            for (alpha, coeff) in basis(self.dim, n).iter().zip(self.coeffs[n].coeffs()) {
                let lam: f64 = alpha
                    .entries()
                    .iter()
                    .zip(&cfg.lambda)
                    .map(|(&a, &l)| l.powf(p * a as f64))
                    .product();
                block += alpha.multinomial_weight() * (lam * coeff.norm()).powi(2);
            }
            acc += weight * block;
        }
        Ok(acc.sqrt())
    }
}

fn half_laplacian(dim: usize, nmax: usize, c: f64) -> Result<FockOperator<C>> {
    let lap = fockop::gross_laplacian::<C>(dim, nmax);
    fockop::exp_lowering(&lap, C::new(c, 0.0)).map_err(|e| ChaosError::Conversion(e.to_string()))
}

fn half_kernel_exp(kernel: &SymTensor<C>, nmax: usize, c: f64) -> Result<FockOperator<C>> {
    if kernel.order() == 0 {
        return Err(ChaosError::KernelOrderZero);
    }
    let spec = KernelSpec::new(0, kernel.order(), kernel.clone())
        .map_err(|e| ChaosError::Conversion(e.to_string()))?;
    let op = fockop::integral_kernel(&spec, nmax);
    fockop::exp_lowering(&op, C::new(c, 0.0)).map_err(|e| ChaosError::Conversion(e.to_string()))
}

/// One term of the expansion of a renormalized power into plain powers.
#[derive(Clone, Debug)]
pub struct RenormalizedPowerTerm {
    /// Degree `n - m*k` of the surviving plain power.
    pub degree: usize,
    /// `n! / ((n - m k)! k!) * (-1/2)^k`.
    pub weight: f64,
    /// `kernel^(x,sym)k`.
    pub kernel_power: SymTensor<C>,
}

/// Expansion of the renormalized power `:x^(x)n:_kappa` over plain powers:
/// the term list `(degree, weight, kernel^(x,sym)k)` for `k = 0 ..= n/m`.
/// Kernels of order zero are rejected.
pub fn renormalized_power_terms(
    kernel: &SymTensor<C>,
    n: usize,
) -> Result<Vec<RenormalizedPowerTerm>> {
    let m = kernel.order();
    if m == 0 {
        return Err(ChaosError::KernelOrderZero);
    }
    let mut terms = Vec::with_capacity(n / m + 1);
    for k in 0..=(n / m) {
        let degree = n - m * k;
        let weight = falling_ratio(n, degree) / factorial(k) * (-0.5f64).powi(k as i32);
        terms.push(RenormalizedPowerTerm { degree, weight, kernel_power: sym_power(kernel, k) });
    }
    Ok(terms)
}

// ---------------------------------------------------------------------------
// seminorm configuration
// ---------------------------------------------------------------------------

/// Diagonal model of the one-particle weight operator `A`; its spectrum must
/// sit strictly above 1.
#[derive(Clone, Debug)]
pub struct SeminormConfig {
    lambda: Vec<f64>,
}

impl SeminormConfig {
    pub fn new(lambda: Vec<f64>) -> Result<Self> {
        if lambda.iter().any(|&l| l <= 1.0) {
            return Err(ChaosError::SpectrumNotAboveOne);
        }
        Ok(Self { lambda })
    }

    /// Default spectrum `2, 3, ..., d+1`.
    pub fn default_for_dim(dim: usize) -> Self {
        Self { lambda: (0..dim).map(|i| (i + 2) as f64).collect() }
    }

    pub fn lambda(&self) -> &[f64] {
        &self.lambda
    }

    /// Operator norm of `A^-1`.
    pub fn rho(&self) -> f64 {
        self.lambda.iter().map(|l| 1.0 / l).fold(0.0, f64::max)
    }

    /// Hilbert-Schmidt norm of `A^-1`. Derivable bookkeeping; no identity in
    /// this crate consumes it.
    pub fn hs_norm_of_inverse(&self) -> f64 {
        self.lambda.iter().map(|l| l.powi(-2)).sum::<f64>().sqrt()
    }
}

// ---------------------------------------------------------------------------
// canonical JSON layout
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct EntryJson {
    alpha: Vec<usize>,
    re: f64,
    im: f64,
}

#[derive(Serialize, Deserialize)]
struct DegreeJson {
    degree: usize,
    entries: Vec<EntryJson>,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "tag", rename_all = "lowercase")]
enum RepJson {
    Wick,
    Monomial,
    Kappa { order: usize, entries: Vec<EntryJson> },
}

/// `{dim, nmax, rep, coeffs: [{degree, entries: [{alpha, re, im}]}]}` —
/// the stable on-disk layout for fixtures and reports. Zero entries are
/// omitted; entries follow the canonical basis order.
#[derive(Serialize, Deserialize)]
pub struct ChaosVectorJson {
    dim: usize,
    nmax: usize,
    rep: RepJson,
    coeffs: Vec<DegreeJson>,
}

fn tensor_entries(t: &SymTensor<C>) -> Vec<EntryJson> {
    basis(t.dim(), t.order())
        .iter()
        .zip(t.coeffs())
        .filter(|(_, c)| c.norm() != 0.0)
        .map(|(alpha, c)| EntryJson { alpha: alpha.entries().to_vec(), re: c.re, im: c.im })
        .collect()
}

fn tensor_from_entries(dim: usize, order: usize, entries: &[EntryJson]) -> SymTensor<C> {
    let mut t = SymTensor::zero(dim, order);
    for e in entries {
        t.set(&MultiIndex::new(e.alpha.clone()), C::new(e.re, e.im));
    }
    t
}

impl ChaosVector {
    pub fn to_json(&self) -> ChaosVectorJson {
        let rep = match &self.rep {
            Rep::Wick => RepJson::Wick,
            Rep::Monomial => RepJson::Monomial,
            Rep::Kappa(kernel) => {
                RepJson::Kappa { order: kernel.order(), entries: tensor_entries(kernel) }
            }
        };
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, f)| !f.is_zero())
            .map(|(degree, f)| DegreeJson { degree, entries: tensor_entries(f) })
            .collect();
        ChaosVectorJson { dim: self.dim, nmax: self.nmax, rep, coeffs }
    }

    pub fn from_json(json: &ChaosVectorJson) -> Self {
        let rep = match &json.rep {
            RepJson::Wick => Rep::Wick,
            RepJson::Monomial => Rep::Monomial,
            RepJson::Kappa { order, entries } => {
                Rep::Kappa(tensor_from_entries(json.dim, *order, entries))
            }
        };
        let mut v = Self::zero(json.dim, json.nmax, rep);
        for block in &json.coeffs {
            v.coeffs[block.degree] = tensor_from_entries(json.dim, block.degree, &block.entries);
        }
        v
    }
}

/// Probabilists' Hermite polynomial `He_n` by the three-term recursion.
/// Test oracle for Wick-basis evaluation; kept here so examples and the
/// verification suites share one implementation.
pub fn hermite_he(n: usize, x: C) -> C {
    let mut prev = C::new(1.0, 0.0);
    if n == 0 {
        return prev;
    }
    let mut cur = x;
    for k in 1..n {
        let next = x * cur - prev.scale(k as f64);
        prev = cur;
        cur = next;
    }
    cur
}
