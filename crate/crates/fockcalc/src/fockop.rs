//! Degree-graded linear operators on truncated chaos expansions.
//!
//! A [`FockOperator`] stores, for each pair `(out_degree, in_degree)` with a
//! nonzero action, a dense linear map between the corresponding symmetric
//! coefficient spaces. Every operator here is the compression `P_N T P_N` of
//! its infinite-dimensional counterpart to degrees `0..=nmax`; identities that
//! involve degree-raising blocks therefore hold exactly only on inputs whose
//! degree keeps all intermediate results below the cutoff ("overflow-safe"
//! inputs), which the degree-shift metadata makes easy to compute.
//!
//! Conventions: operators act on Wick-representation coefficient sequences.
//! Adjoints are with respect to the bilinear factorial-weighted duality
//! `<<F, f>> = sum_n n! pair(F_n, f_n)` (no conjugation).

use std::collections::BTreeMap;

use num_complex::Complex64;
use thiserror::Error;

use crate::chaos::{ChaosVector, Rep};
use crate::linalg::Mat;
use crate::scalar::Scalar;
use crate::symtensor::{self, basis, basis_size, falling_ratio, SymTensor, TensorError};

#[derive(Debug, Error)]
pub enum OperatorError {
    #[error("kernel order {kernel_order} does not match l + m = {expected}")]
    KernelOrder { kernel_order: usize, expected: usize },
    #[error("operator does not strictly lower the degree; exact exponential unavailable")]
    NotDegreeLowering,
    #[error("operator acts on Wick-representation vectors; convert explicitly first")]
    RepresentationMismatch,
    #[error("operator and vector shapes disagree: {0}")]
    ShapeMismatch(String),
    #[error("symbol truncation tail bound {bound:.3e} exceeds the tolerance {tol:.3e}")]
    TailBoundExceeded { bound: f64, tol: f64 },
    #[error(transparent)]
    Tensor(#[from] TensorError),
}

pub type Result<T, E = OperatorError> = std::result::Result<T, E>;

/// Integral-kernel operator data: `l` creation slots, `m` annihilation slots
/// and a fully symmetric order-`(l+m)` kernel.
#[derive(Clone, Debug)]
pub struct KernelSpec<T> {
    pub raising: usize,
    pub lowering: usize,
    pub kernel: SymTensor<T>,
}

impl<T: Scalar> KernelSpec<T> {
    pub fn new(raising: usize, lowering: usize, kernel: SymTensor<T>) -> Result<Self> {
        if kernel.order() != raising + lowering {
            return Err(OperatorError::KernelOrder {
                kernel_order: kernel.order(),
                expected: raising + lowering,
            });
        }
        Ok(Self { raising, lowering, kernel })
    }
}

#[derive(Clone, Debug)]
pub struct FockOperator<T = Complex64> {
    dim: usize,
    nmax: usize,
    blocks: BTreeMap<(usize, usize), Mat<T>>,
}

impl<T: Scalar> FockOperator<T> {
    pub fn zero(dim: usize, nmax: usize) -> Self {
        Self { dim, nmax, blocks: BTreeMap::new() }
    }

    pub fn identity(dim: usize, nmax: usize) -> Self {
        let mut op = Self::zero(dim, nmax);
        for n in 0..=nmax {
            op.blocks.insert((n, n), Mat::identity(basis_size(dim, n)));
        }
        op
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nmax(&self) -> usize {
        self.nmax
    }

    pub fn block(&self, out_degree: usize, in_degree: usize) -> Option<&Mat<T>> {
        self.blocks.get(&(out_degree, in_degree))
    }

    pub fn blocks(&self) -> impl Iterator<Item = (&(usize, usize), &Mat<T>)> {
        self.blocks.iter()
    }

    pub fn insert_block(&mut self, out_degree: usize, in_degree: usize, block: Mat<T>) {
        assert!(out_degree <= self.nmax && in_degree <= self.nmax, "degree beyond truncation");
        assert_eq!(block.nrows(), basis_size(self.dim, out_degree), "block rows");
        assert_eq!(block.ncols(), basis_size(self.dim, in_degree), "block cols");
        if block.is_zero() {
            self.blocks.remove(&(out_degree, in_degree));
        } else {
            self.blocks.insert((out_degree, in_degree), block);
        }
    }

    pub fn add_to_block(&mut self, out_degree: usize, in_degree: usize, block: &Mat<T>) {
        match self.blocks.get(&(out_degree, in_degree)) {
            Some(existing) => self.insert_block(out_degree, in_degree, existing.add(block)),
            None => self.insert_block(out_degree, in_degree, block.clone()),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.dim, self.nmax), (other.dim, other.nmax));
        let mut out = self.clone();
        for (&(o, i), b) in &other.blocks {
            out.add_to_block(o, i, b);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-1.0))
    }

    pub fn scale(&self, k: f64) -> Self {
        let blocks = self.blocks.iter().map(|(&key, b)| (key, b.scale(k))).collect();
        Self { dim: self.dim, nmax: self.nmax, blocks }
    }

    pub fn scale_t(&self, k: T) -> Self {
        let blocks = self.blocks.iter().map(|(&key, b)| (key, b.scale_t(k))).collect();
        Self { dim: self.dim, nmax: self.nmax, blocks }
    }

    /// `self . rhs` (apply `rhs` first).
    pub fn compose(&self, rhs: &Self) -> Self {
        assert_eq!((self.dim, self.nmax), (rhs.dim, rhs.nmax));
        let mut out = Self::zero(self.dim, self.nmax);
        for (&(o, mid), a) in &self.blocks {
            for (&(mid2, i), b) in &rhs.blocks {
                if mid == mid2 {
                    out.add_to_block(o, i, &a.matmul(b));
                }
            }
        }
        out
    }

    /// `(min, max)` of `out_degree - in_degree` over the stored blocks.
    pub fn degree_shift_range(&self) -> Option<(isize, isize)> {
        let mut range: Option<(isize, isize)> = None;
        for &(o, i) in self.blocks.keys() {
            let s = o as isize - i as isize;
            range = Some(match range {
                None => (s, s),
                Some((lo, hi)) => (lo.min(s), hi.max(s)),
            });
        }
        range
    }

    pub fn is_strictly_lowering(&self) -> bool {
        match self.degree_shift_range() {
            None => true,
            Some((_, hi)) => hi < 0,
        }
    }

    /// Largest degree raise; inputs of degree `<= nmax - max_raise` are
    /// overflow-safe for a single application.
    pub fn max_raise(&self) -> usize {
        self.degree_shift_range().map_or(0, |(_, hi)| hi.max(0) as usize)
    }

    pub fn apply_coeffs(&self, coeffs: &[SymTensor<T>]) -> Vec<SymTensor<T>> {
        assert_eq!(coeffs.len(), self.nmax + 1, "coefficient list length");
        let mut out: Vec<SymTensor<T>> =
            (0..=self.nmax).map(|n| SymTensor::zero(self.dim, n)).collect();
        for (&(o, i), b) in &self.blocks {
            let v = b.apply(coeffs[i].coeffs());
            for (acc, inc) in out[o].coeffs_mut().iter_mut().zip(&v) {
                *acc += *inc;
            }
        }
        out
    }

    /// Transpose with respect to the factorial-weighted bilinear duality:
    /// `<<adjoint(A) F, f>> = <<F, A f>>`.
    pub fn adjoint(&self) -> Self {
        let mut out = Self::zero(self.dim, self.nmax);
        for (&(o, i), b) in &self.blocks {
            let d_out = duality_weights(self.dim, o);
            let d_in = duality_weights(self.dim, i);
            let adj = Mat::from_fn(b.ncols(), b.nrows(), |r, c| {
                b[(c, r)].scale(d_out[c] / d_in[r])
            });
            out.insert_block(i, o, adj);
        }
        out
    }

    pub fn map_scalars<U: Scalar>(&self, f: impl Fn(T) -> U) -> FockOperator<U> {
        let blocks = self.blocks.iter().map(|(&key, b)| (key, b.map(&f))).collect();
        FockOperator { dim: self.dim, nmax: self.nmax, blocks }
    }

    /// Blockwise relative Frobenius distance, the operator-equality metric.
    pub fn max_rel_residual(&self, other: &Self) -> f64 {
        assert_eq!((self.dim, self.nmax), (other.dim, other.nmax));
        let keys: std::collections::BTreeSet<_> =
            self.blocks.keys().chain(other.blocks.keys()).copied().collect();
        let mut worst = 0.0f64;
        for key in keys {
            let (na, nb, nd) = match (self.blocks.get(&key), other.blocks.get(&key)) {
                (Some(a), Some(b)) => (a.frob_norm(), b.frob_norm(), a.sub(b).frob_norm()),
                (Some(a), None) => (a.frob_norm(), 0.0, a.frob_norm()),
                (None, Some(b)) => (0.0, b.frob_norm(), b.frob_norm()),
                (None, None) => continue,
            };
            worst = worst.max(nd / na.max(nb).max(1.0));
        }
        worst
    }

    /// Upper bound for the block as a map between `|.|_0`-normed coefficient
    /// spaces (Frobenius norm of the weight-conjugated matrix).
    pub fn weighted_block_norm(&self, out_degree: usize, in_degree: usize) -> f64 {
        let Some(b) = self.blocks.get(&(out_degree, in_degree)) else { return 0.0 };
        let w_out: Vec<f64> = basis(self.dim, out_degree)
            .iter()
            .map(|a| a.multinomial_weight().sqrt())
            .collect();
        let w_in: Vec<f64> = basis(self.dim, in_degree)
            .iter()
            .map(|a| a.multinomial_weight().sqrt())
            .collect();
        let mut sum = 0.0;
        for r in 0..b.nrows() {
            for c in 0..b.ncols() {
                sum += (b[(r, c)].modulus() * w_out[r] / w_in[c]).powi(2);
            }
        }
        sum.sqrt()
    }
}

/// `n! * (n!/alpha!)` per basis entry: the diagonal of the full duality form.
fn duality_weights(dim: usize, order: usize) -> Vec<f64> {
    let nfac = symtensor::factorial(order);
    basis(dim, order).iter().map(|a| nfac * a.multinomial_weight()).collect()
}

// ---------------------------------------------------------------------------
// constructors
// ---------------------------------------------------------------------------

/// The integral kernel operator with `l` creation and `m` annihilation slots:
/// degreewise, `f_(n+m) -> ((n+m)!/n!) * contract_m(kernel, f_(n+m))` placed at
/// degree `l+n`. Output degrees above the cutoff are projected away.
pub fn integral_kernel<T: Scalar>(spec: &KernelSpec<T>, nmax: usize) -> FockOperator<T> {
    let (l, m, kappa) = (spec.raising, spec.lowering, &spec.kernel);
    let d = kappa.dim();
    let mut op = FockOperator::zero(d, nmax);
    if kappa.is_zero() {
        return op;
    }
    let mut n = 0;
    while n + m <= nmax && n + l <= nmax {
        let in_deg = n + m;
        let out_deg = n + l;
        let factor = falling_ratio(n + m, n);
        let in_basis = basis(d, in_deg);
        let mut block = Mat::zeros(basis_size(d, out_deg), basis_size(d, in_deg));
        for (col, alpha) in in_basis.iter().enumerate() {
            let mut unit = SymTensor::zero(d, in_deg);
            unit.set(alpha, T::one());
            let image = SymTensor::partial_contract(kappa, l, m, &unit)
                .expect("kernel order matches by construction");
            for (row, &v) in image.coeffs().iter().enumerate() {
                block[(row, col)] = v.scale(factor);
            }
        }
        op.insert_block(out_deg, in_deg, block);
        n += 1;
    }
    op
}

/// Degree-lowering Laplacian: the kernel operator of the trace with two
/// annihilation slots. Sends degree `n+2` to degree `n`.
pub fn gross_laplacian<T: Scalar>(dim: usize, nmax: usize) -> FockOperator<T> {
    let spec = KernelSpec::new(0, 2, symtensor::trace_tensor(dim)).expect("trace has order 2");
    integral_kernel(&spec, nmax)
}

/// Multiplies the degree-`n` component by `n`.
pub fn number_operator<T: Scalar>(dim: usize, nmax: usize) -> FockOperator<T> {
    let mut op = FockOperator::zero(dim, nmax);
    for n in 1..=nmax {
        op.insert_block(n, n, Mat::identity(basis_size(dim, n)).scale(n as f64));
    }
    op
}

/// Second quantization: degree-`n` block is `T^(x)n`.
pub fn second_quantization<T: Scalar>(t: &Mat<T>, nmax: usize) -> FockOperator<T> {
    let d = t.nrows();
    assert!(t.is_square());
    let mut op = FockOperator::zero(d, nmax);
    for n in 0..=nmax {
        let b = basis(d, n);
        let mut block = Mat::zeros(b.len(), b.len());
        for (col, alpha) in b.iter().enumerate() {
            let mut unit = SymTensor::zero(d, n);
            unit.set(alpha, T::one());
            let image = SymTensor::map_pow(t, &unit);
            for (row, &v) in image.coeffs().iter().enumerate() {
                block[(row, col)] = v;
            }
        }
        op.insert_block(n, n, block);
    }
    op
}

/// Differential second quantization: degree-`n` block is the derivation lift.
pub fn diff_second_quantization<T: Scalar>(t: &Mat<T>, nmax: usize) -> FockOperator<T> {
    let d = t.nrows();
    assert!(t.is_square());
    let mut op = FockOperator::zero(d, nmax);
    for n in 1..=nmax {
        let b = basis(d, n);
        let mut block = Mat::zeros(b.len(), b.len());
        for (col, alpha) in b.iter().enumerate() {
            let mut unit = SymTensor::zero(d, n);
            unit.set(alpha, T::one());
            let image = SymTensor::derivation_pow(t, &unit);
            for (row, &v) in image.coeffs().iter().enumerate() {
                block[(row, col)] = v;
            }
        }
        op.insert_block(n, n, block);
    }
    op
}

/// Exact exponential `exp(c * op)` of a strictly degree-lowering operator.
/// Nilpotent at truncation, so the series is a finite sum.
pub fn exp_lowering<T: Scalar>(op: &FockOperator<T>, c: T) -> Result<FockOperator<T>> {
    if !op.is_strictly_lowering() {
        return Err(OperatorError::NotDegreeLowering);
    }
    let mut acc = FockOperator::identity(op.dim, op.nmax);
    if c.is_zero() {
        return Ok(acc);
    }
    let scaled = op.scale_t(c);
    let mut term = FockOperator::identity(op.dim, op.nmax);
    for k in 1..=(op.nmax + 1) {
        term = scaled.compose(&term).scale(1.0 / k as f64);
        if term.blocks.is_empty() {
            break;
        }
        acc = acc.add(&term);
    }
    Ok(acc)
}

/// Directional annihilation operator `D_y`: lowers the degree by one.
pub fn annihilation<T: Scalar>(y: &SymTensor<T>, nmax: usize) -> Result<FockOperator<T>> {
    let spec = KernelSpec::new(0, 1, y.clone())?;
    Ok(integral_kernel(&spec, nmax))
}

/// Translation by `y`: the exact exponential of `D_y`. Acts on polynomials
/// as the argument shift `x -> x + y`.
pub fn translation<T: Scalar>(y: &SymTensor<T>, nmax: usize) -> Result<FockOperator<T>> {
    exp_lowering(&annihilation(y, nmax)?, T::one())
}

// ---------------------------------------------------------------------------
// Wick algebra on chaos vectors (concrete scalar)
// ---------------------------------------------------------------------------

impl FockOperator<Complex64> {
    /// Apply to a Wick-representation vector.
    pub fn apply(&self, phi: &ChaosVector) -> Result<ChaosVector> {
        if phi.rep() != &Rep::Wick {
            return Err(OperatorError::RepresentationMismatch);
        }
        if phi.dim() != self.dim || phi.nmax() != self.nmax {
            return Err(OperatorError::ShapeMismatch(format!(
                "operator is ({}, {}), vector is ({}, {})",
                self.dim,
                self.nmax,
                phi.dim(),
                phi.nmax()
            )));
        }
        Ok(ChaosVector::from_coeffs(self.apply_coeffs(phi.coeffs()), Rep::Wick))
    }
}

/// Degreewise Wick product: symmetric-tensor convolution of the coefficients.
/// Exact at truncation (degree `n` of the output needs input degrees `<= n`).
pub fn wick_product(phi: &ChaosVector, psi: &ChaosVector) -> Result<ChaosVector> {
    if phi.rep() != &Rep::Wick || psi.rep() != &Rep::Wick {
        return Err(OperatorError::RepresentationMismatch);
    }
    if phi.dim() != psi.dim() || phi.nmax() != psi.nmax() {
        return Err(OperatorError::ShapeMismatch("wick product operands".into()));
    }
    let nmax = phi.nmax();
    let mut coeffs: Vec<SymTensor<Complex64>> =
        (0..=nmax).map(|n| SymTensor::zero(phi.dim(), n)).collect();
    for n in 0..=nmax {
        for k in 0..=n {
            let f = &phi.coeffs()[k];
            let g = &psi.coeffs()[n - k];
            if f.is_zero() || g.is_zero() {
                continue;
            }
            coeffs[n] = coeffs[n].add(&f.sym_product(g)?);
        }
    }
    Ok(ChaosVector::from_coeffs(coeffs, Rep::Wick))
}

/// Wick exponential `sum_k phi^(<>k) / k!`, degreewise finite. The scalar
/// component contributes an `exp(phi_0)` prefactor.
pub fn wick_exp(phi: &ChaosVector) -> Result<ChaosVector> {
    if phi.rep() != &Rep::Wick {
        return Err(OperatorError::RepresentationMismatch);
    }
    let scalar_part = phi.coeffs()[0].coeffs()[0];
    let mut rest = phi.clone();
    rest.coeffs_mut()[0] = SymTensor::zero(phi.dim(), 0);
    let mut acc = ChaosVector::constant(Complex64::new(1.0, 0.0), phi.dim(), phi.nmax());
    let mut term = acc.clone();
    for k in 1..=phi.nmax() {
        term = wick_product(&term, &rest)?.scale(1.0 / k as f64);
        if term.is_zero() {
            break;
        }
        acc = acc.add(&term);
    }
    Ok(acc.scale_t(scalar_part.exp()))
}

/// Wick multiplication operator `psi -> phi <> psi`: a sum of pure creation
/// kernel operators, one per chaos component of `phi`.
pub fn wick_mult_operator(phi: &ChaosVector) -> Result<FockOperator<Complex64>> {
    if phi.rep() != &Rep::Wick {
        return Err(OperatorError::RepresentationMismatch);
    }
    let mut op = FockOperator::zero(phi.dim(), phi.nmax());
    for (l, f) in phi.coeffs().iter().enumerate() {
        if f.is_zero() {
            continue;
        }
        let spec = KernelSpec::new(l, 0, f.clone())?;
        op = op.add(&integral_kernel(&spec, phi.nmax()));
    }
    Ok(op)
}

/// Convolution operator: the duality adjoint of Wick multiplication by `phi`,
/// a sum of pure annihilation kernel operators. Every exponential vector is an
/// eigenvector with eigenvalue `S(phi)(xi)`.
pub fn convolution_operator(phi: &ChaosVector) -> Result<FockOperator<Complex64>> {
    if phi.rep() != &Rep::Wick {
        return Err(OperatorError::RepresentationMismatch);
    }
    let mut op = FockOperator::zero(phi.dim(), phi.nmax());
    for (m, f) in phi.coeffs().iter().enumerate() {
        if f.is_zero() {
            continue;
        }
        let spec = KernelSpec::new(0, m, f.clone())?;
        op = op.add(&integral_kernel(&spec, phi.nmax()));
    }
    Ok(op)
}

/// `exp(C_phi)` split into the scalar factor `e^(phi_0)` times the exact
/// exponential of the strictly lowering remainder.
pub fn exp_convolution(phi: &ChaosVector) -> Result<FockOperator<Complex64>> {
    if phi.rep() != &Rep::Wick {
        return Err(OperatorError::RepresentationMismatch);
    }
    let scalar_part = phi.coeffs()[0].coeffs()[0];
    let mut rest = phi.clone();
    rest.coeffs_mut()[0] = SymTensor::zero(phi.dim(), 0);
    let lowering = convolution_operator(&rest)?;
    Ok(exp_lowering(&lowering, Complex64::new(1.0, 0.0))?.scale_t(scalar_part.exp()))
}

// ---------------------------------------------------------------------------
// operator symbols
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug)]
pub struct SymbolValue {
    pub value: Complex64,
    /// Estimated truncation remainder of the symbol.
    pub tail_bound: f64,
}

/// Symbol `(xi, eta) -> <<A Phi_xi, Phi_eta>>` of the compressed operator,
/// together with a truncation-tail estimate. Refuses when the estimate exceeds
/// `tol`: a silently degraded symbol would poison downstream comparisons.
pub fn operator_symbol(
    op: &FockOperator<Complex64>,
    xi: &[Complex64],
    eta: &[Complex64],
    tol: f64,
) -> Result<SymbolValue> {
    let value = symbol_unchecked(op, xi, eta)?;
    let bound = symbol_tail_bound(op, xi, eta);
    if !(bound <= tol) {
        return Err(OperatorError::TailBoundExceeded { bound, tol });
    }
    Ok(SymbolValue { value, tail_bound: bound })
}

fn symbol_unchecked(
    op: &FockOperator<Complex64>,
    xi: &[Complex64],
    eta: &[Complex64],
) -> Result<Complex64> {
    let phi_xi = ChaosVector::exp_vector(xi, op.nmax);
    let phi_eta = ChaosVector::exp_vector(eta, op.nmax);
    let image = op.apply(&phi_xi)?;
    Ok(phi_eta.dual_pair(&image).map_err(OperatorError::from_chaos)?)
}

impl OperatorError {
    fn from_chaos(e: crate::chaos::ChaosError) -> Self {
        OperatorError::ShapeMismatch(e.to_string())
    }
}

/// Truncation-tail estimate for the symbol. A missing block `(n <- m)`
/// contributes at most `|B| |xi|^m |eta|^n / m!`. Per degree shift, block
/// norms beyond the cutoff extend the observed sequence geometrically at its
/// last growth ratio (with a safety factor); for the at-most-geometric norm
/// growth of the operators this crate builds, that extrapolation is
/// conservative near the cutoff, which is where the estimate matters.
fn symbol_tail_bound(op: &FockOperator<Complex64>, xi: &[Complex64], eta: &[Complex64]) -> f64 {
    const SAFETY: f64 = 2.0;
    let Some((lo, hi)) = op.degree_shift_range() else { return 0.0 };
    let xi_norm = xi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let eta_norm = eta.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    // fallback growth rate from the global block-norm profile
    let mut global_growth: f64 = 1.0;
    for (&(o, i), _) in op.blocks.iter() {
        let w = op.weighted_block_norm(o, i);
        let deg = o.max(i);
        if deg > 0 && w > 0.0 {
            global_growth = global_growth.max(w.powf(1.0 / deg as f64));
        }
    }
    let mut tail = 0.0;
    for s in lo..=hi {
        // missing input degrees for this shift: m > nmax or m + s > nmax
        let m_edge = if s > 0 { op.nmax - (s as usize).min(op.nmax) } else { op.nmax };
        let norm_at = |m: usize| -> f64 {
            let n = m as isize + s;
            if n < 0 { 0.0 } else { op.weighted_block_norm(n as usize, m) }
        };
        let w_edge = norm_at(m_edge);
        let (base, growth) = if w_edge > 0.0 {
            let prev = if m_edge > 0 { norm_at(m_edge - 1) } else { 0.0 };
            let ratio = if prev > 0.0 { (w_edge / prev).max(1.0) } else { global_growth };
            (w_edge, ratio)
        } else {
            (global_growth.powi(m_edge.max(1) as i32), global_growth)
        };
        let mut m = m_edge + 1;
        let mut converged = false;
        let mut partial = 0.0;
        let mut last = f64::INFINITY;
        for _ in 0..200 {
            let n = m as isize + s;
            if n >= 0 {
                let n = n as usize;
                let term = base
                    * growth.powi((m - m_edge) as i32)
                    * xi_norm.powi(m as i32)
                    * eta_norm.powi(n as i32)
                    / symtensor::factorial(m);
                partial += term;
                last = term;
                if term < 1e-300 || term < partial * 1e-18 {
                    converged = true;
                    break;
                }
            }
            m += 1;
        }
        if !converged {
            partial += last * 2.0;
        }
        tail += partial;
    }
    tail * SAFETY
}
