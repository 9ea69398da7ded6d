//! Symmetric tensor algebra over `C^d` in occupation (multi-index) coordinates.
//!
//! An order-`n` symmetric tensor is stored as one coefficient per multi-index
//! `alpha` with `|alpha| = n`: the tensor's value on any index tuple whose
//! occupation pattern is `alpha`. Under this convention the canonical bilinear
//! pairing of two order-`n` tensors is
//!
//! ```text
//! pair(f, g) = sum_alpha (n!/alpha!) f_alpha g_alpha
//! ```
//!
//! (no conjugation), which makes `pair(power(xi,n), power(eta,n)) = <xi,eta>^n`
//! by the multinomial theorem. Every contraction below is characterized by its
//! action on the powers `xi^(x)n` — those span each symmetric space, so the
//! characterizations double as test oracles for the coordinate formulas.

use thiserror::Error;

use crate::scalar::Scalar;
use crate::linalg::Mat;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TensorError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("order mismatch: expected {expected}, got {got}")]
    OrderMismatch { expected: usize, got: usize },
    #[error("cannot contract an order-{kernel} kernel against an order-{tensor} tensor")]
    ContractionOverflow { kernel: usize, tensor: usize },
}

pub type Result<T, E = TensorError> = std::result::Result<T, E>;

// ---------------------------------------------------------------------------
// combinatorics
// ---------------------------------------------------------------------------

/// `n!` as a double. Exact for every factorial this crate touches.
pub fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

/// `hi! / lo!` for `hi >= lo`, computed without forming either factorial.
pub fn falling_ratio(hi: usize, lo: usize) -> f64 {
    assert!(hi >= lo);
    ((lo + 1)..=hi).fold(1.0, |acc, k| acc * k as f64)
}

pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc.round()
}

// ---------------------------------------------------------------------------
// multi-indices
// ---------------------------------------------------------------------------

/// Occupation vector over `d` coordinates; indexes symmetric tensor entries.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MultiIndex(Vec<usize>);

impl MultiIndex {
    pub fn new(entries: Vec<usize>) -> Self {
        Self(entries)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn order(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn entries(&self) -> &[usize] {
        &self.0
    }

    /// `alpha! = prod_i alpha_i!`
    pub fn index_factorial(&self) -> f64 {
        self.0.iter().map(|&a| factorial(a)).product()
    }

    /// The pairing weight `|alpha|! / alpha!` (a multinomial coefficient).
    pub fn multinomial_weight(&self) -> f64 {
        factorial(self.order()) / self.index_factorial()
    }

    pub fn add(&self, other: &Self) -> Self {
        debug_assert_eq!(self.dim(), other.dim());
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn checked_sub(&self, other: &Self) -> Option<Self> {
        debug_assert_eq!(self.dim(), other.dim());
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.checked_sub(*b))
            .collect::<Option<Vec<_>>>()
            .map(Self)
    }
}

/// Number of multi-indices of order `n` in `d` slots: `C(n+d-1, d-1)`.
pub fn basis_size(dim: usize, order: usize) -> usize {
    binomial(order + dim - 1, dim - 1) as usize
}

/// All multi-indices of the given order, first coordinate decreasing.
pub fn basis(dim: usize, order: usize) -> Vec<MultiIndex> {
    assert!(dim >= 1, "dimension must be at least 1");
    let mut out = Vec::with_capacity(basis_size(dim, order));
    let mut prefix = Vec::with_capacity(dim);
    fn go(slots: usize, order: usize, prefix: &mut Vec<usize>, out: &mut Vec<MultiIndex>) {
        if slots == 1 {
            prefix.push(order);
            out.push(MultiIndex::new(prefix.clone()));
            prefix.pop();
            return;
        }
        for v in (0..=order).rev() {
            prefix.push(v);
            go(slots - 1, order - v, prefix, out);
            prefix.pop();
        }
    }
    go(dim, order, &mut prefix, &mut out);
    out
}

/// Position of `alpha` in the canonical enumeration of its (dim, order) basis.
pub fn rank(alpha: &MultiIndex) -> usize {
    let d = alpha.dim();
    let mut remaining = alpha.order();
    let mut r = 0;
    for i in 0..d.saturating_sub(1) {
        for v in (alpha.0[i] + 1)..=remaining {
            r += basis_size(d - 1 - i, remaining - v);
        }
        remaining -= alpha.0[i];
    }
    r
}

// ---------------------------------------------------------------------------
// symmetric tensors
// ---------------------------------------------------------------------------

/// Order-`n` symmetric tensor over `C^d` in occupation coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct SymTensor<T> {
    dim: usize,
    order: usize,
    coeffs: Vec<T>,
}

impl<T: Scalar> SymTensor<T> {
    pub fn zero(dim: usize, order: usize) -> Self {
        Self { dim, order, coeffs: vec![T::zero(); basis_size(dim, order)] }
    }

    /// Order-0 tensor holding a single scalar.
    pub fn scalar(dim: usize, value: T) -> Self {
        Self { dim, order: 0, coeffs: vec![value] }
    }

    pub fn from_coeffs(dim: usize, order: usize, coeffs: Vec<T>) -> Self {
        assert_eq!(coeffs.len(), basis_size(dim, order), "coefficient block size");
        Self { dim, order, coeffs }
    }

    pub fn from_fn(dim: usize, order: usize, mut f: impl FnMut(&MultiIndex) -> T) -> Self {
        let coeffs = basis(dim, order).iter().map(|a| f(a)).collect();
        Self { dim, order, coeffs }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [T] {
        &mut self.coeffs
    }

    pub fn get(&self, alpha: &MultiIndex) -> T {
        debug_assert_eq!(alpha.dim(), self.dim);
        debug_assert_eq!(alpha.order(), self.order);
        self.coeffs[rank(alpha)]
    }

    pub fn set(&mut self, alpha: &MultiIndex, value: T) {
        debug_assert_eq!(alpha.dim(), self.dim);
        debug_assert_eq!(alpha.order(), self.order);
        self.coeffs[rank(alpha)] = value;
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.dim, self.order), (other.dim, other.order));
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(&a, &b)| a + b).collect();
        Self { dim: self.dim, order: self.order, coeffs }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.dim, self.order), (other.dim, other.order));
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(&a, &b)| a - b).collect();
        Self { dim: self.dim, order: self.order, coeffs }
    }

    pub fn scale_t(&self, k: T) -> Self {
        Self { dim: self.dim, order: self.order, coeffs: self.coeffs.iter().map(|&c| c * k).collect() }
    }

    pub fn scale(&self, k: f64) -> Self {
        Self { dim: self.dim, order: self.order, coeffs: self.coeffs.iter().map(|&c| c.scale(k)).collect() }
    }

    /// Hilbert norm `|f|_0 = sqrt(sum_alpha (n!/alpha!) |f_alpha|^2)`.
    pub fn norm(&self) -> f64 {
        basis(self.dim, self.order)
            .iter()
            .zip(&self.coeffs)
            .map(|(a, c)| a.multinomial_weight() * c.modulus().powi(2))
            .sum::<f64>()
            .sqrt()
    }

    /// `xi^(x)n`: coefficient at `alpha` is `prod_i xi_i^(alpha_i)`.
    pub fn power(xi: &[T], n: usize) -> Self {
        let dim = xi.len();
        Self::from_fn(dim, n, |alpha| {
            let mut acc = T::one();
            for (i, &a) in alpha.entries().iter().enumerate() {
                for _ in 0..a {
                    acc *= xi[i];
                }
            }
            acc
        })
    }

    /// The canonical bilinear pairing of two tensors of equal dimension and order.
    pub fn pair(&self, other: &Self) -> Result<T> {
        if self.dim != other.dim {
            return Err(TensorError::DimensionMismatch { expected: self.dim, got: other.dim });
        }
        if self.order != other.order {
            return Err(TensorError::OrderMismatch { expected: self.order, got: other.order });
        }
        let mut acc = T::zero();
        for (alpha, (&a, &b)) in basis(self.dim, self.order)
            .iter()
            .zip(self.coeffs.iter().zip(&other.coeffs))
        {
            acc += (a * b).scale(alpha.multinomial_weight());
        }
        Ok(acc)
    }

    /// Symmetrized tensor product. Characterized by
    /// `pair(f (x) g, xi^(n+m)) = pair(f, xi^n) * pair(g, xi^m)`.
    pub fn sym_product(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(TensorError::DimensionMismatch { expected: self.dim, got: other.dim });
        }
        let (n, m) = (self.order, other.order);
        let norm = factorial(n) * factorial(m) / factorial(n + m);
        let basis_f = basis(self.dim, n);
        let mut out = Self::zero(self.dim, n + m);
        let out_basis = basis(self.dim, n + m);
        for (gi, gamma) in out_basis.iter().enumerate() {
            let mut acc = T::zero();
            for alpha in &basis_f {
                let Some(beta) = gamma.checked_sub(alpha) else { continue };
                let f_a = self.coeffs[rank(alpha)];
                if f_a.is_zero() {
                    continue;
                }
                let g_b = other.coeffs[rank(&beta)];
                if g_b.is_zero() {
                    continue;
                }
                // prod_i C(gamma_i, alpha_i) = gamma! / (alpha! beta!)
                let split = gamma.index_factorial() / (alpha.index_factorial() * beta.index_factorial());
                acc += (f_a * g_b).scale(split);
            }
            out.coeffs[gi] = acc.scale(norm);
        }
        Ok(out)
    }

    /// Right contraction of the full kernel against `m` slots of `f`.
    /// Characterized by `contract(kappa, xi^(n+m)) = pair(kappa, xi^m) * xi^n`.
    pub fn right_contract(kappa: &Self, f: &Self) -> Result<Self> {
        if kappa.dim != f.dim {
            return Err(TensorError::DimensionMismatch { expected: kappa.dim, got: f.dim });
        }
        if f.order < kappa.order {
            return Err(TensorError::ContractionOverflow { kernel: kappa.order, tensor: f.order });
        }
        let m = kappa.order;
        let n = f.order - m;
        let kappa_basis = basis(kappa.dim, m);
        let mut out = Self::zero(f.dim, n);
        for (ai, alpha) in basis(f.dim, n).iter().enumerate() {
            let mut acc = T::zero();
            for beta in &kappa_basis {
                let k = kappa.coeffs[rank(beta)];
                if k.is_zero() {
                    continue;
                }
                acc += (k * f.coeffs[rank(&alpha.add(beta))]).scale(beta.multinomial_weight());
            }
            out.coeffs[ai] = acc;
        }
        Ok(out)
    }

    /// Contraction of `m` slots of an order-`(l+m)` kernel against `m` slots of
    /// `f`, everything resymmetrized. With `l = 0` this is [`Self::right_contract`];
    /// with `m = 0` it is [`Self::sym_product`].
    pub fn partial_contract(kappa: &Self, l: usize, m: usize, f: &Self) -> Result<Self> {
        if kappa.dim != f.dim {
            return Err(TensorError::DimensionMismatch { expected: kappa.dim, got: f.dim });
        }
        if kappa.order != l + m {
            return Err(TensorError::OrderMismatch { expected: l + m, got: kappa.order });
        }
        if f.order < m {
            return Err(TensorError::ContractionOverflow { kernel: m, tensor: f.order });
        }
        let n = f.order - m;
        let d = f.dim;
        let norm = factorial(l) * factorial(n) / factorial(l + n);
        let left_basis = basis(d, l);
        let mid_basis = basis(d, m);
        let mut out = Self::zero(d, l + n);
        for (gi, gamma) in basis(d, l + n).iter().enumerate() {
            let mut acc = T::zero();
            for gp in &left_basis {
                let Some(gpp) = gamma.checked_sub(gp) else { continue };
                let split = gamma.index_factorial() / (gp.index_factorial() * gpp.index_factorial());
                let mut inner = T::zero();
                for beta in &mid_basis {
                    let k = kappa.coeffs[rank(&gp.add(beta))];
                    if k.is_zero() {
                        continue;
                    }
                    inner += (k * f.coeffs[rank(&gpp.add(beta))]).scale(beta.multinomial_weight());
                }
                acc += inner.scale(split);
            }
            out.coeffs[gi] = acc.scale(norm);
        }
        Ok(out)
    }

    /// Slotwise application of a one-particle map: `T^(x)n f`.
    /// Characterized by `map_pow(T, xi^(x)n) = (T xi)^(x)n`.
    pub fn map_pow(t: &Mat<T>, f: &Self) -> Self {
        let d = f.dim;
        assert_eq!(t.nrows(), d);
        assert_eq!(t.ncols(), d);
        let n = f.order;
        let f_basis = basis(d, n);
        let mut out = Self::zero(d, n);
        // substitute xi -> T^t xi in the generating polynomial of f; the
        // in/out pairing weights combine to the single exact ratio
        // gamma!/alpha! (exactly 1.0 on diagonal paths, so identity-like maps
        // introduce no roundoff)
        for (alpha, &fa) in f_basis.iter().zip(&f.coeffs) {
            if fa.is_zero() {
                continue;
            }
            let mut poly = vec![T::one()]; // degree-0 block
            let mut deg = 0usize;
            for (i, &ai) in alpha.entries().iter().enumerate() {
                for _ in 0..ai {
                    poly = raise_by_linear_form(d, deg, &poly, |j| t[(j, i)]);
                    deg += 1;
                }
            }
            let alpha_fac = alpha.index_factorial();
            for ((gamma, acc), &p) in f_basis.iter().zip(out.coeffs.iter_mut()).zip(&poly) {
                if p.is_zero() {
                    continue;
                }
                *acc += (fa * p).scale(gamma.index_factorial() / alpha_fac);
            }
        }
        out
    }

    /// The derivation lift `sum_k Id^(x)k (x) T (x) Id^(x)(n-1-k)` restricted to
    /// symmetric tensors. Zero on order 0; `n * f` for `T = Id`.
    pub fn derivation_pow(t: &Mat<T>, f: &Self) -> Self {
        let d = f.dim;
        assert_eq!(t.nrows(), d);
        assert_eq!(t.ncols(), d);
        let n = f.order;
        if n == 0 {
            return Self::zero(d, 0);
        }
        let f_basis = basis(d, n);
        let mut out = Self::zero(d, n);
        for (gi, gamma) in f_basis.iter().enumerate() {
            let mut acc = T::zero();
            // coefficient of xi^gamma in sum_{i,j} T_{ji} xi_j d/d xi_i of the
            // generating polynomial; weights combine to the exact ratio
            // delta_i * gamma!/delta!
            for j in 0..d {
                if gamma.entries()[j] == 0 {
                    continue;
                }
                for i in 0..d {
                    let tji = t[(j, i)];
                    if tji.is_zero() {
                        continue;
                    }
                    let mut delta = gamma.entries().to_vec();
                    delta[j] -= 1;
                    delta[i] += 1;
                    let delta = MultiIndex::new(delta);
                    let mult = delta.entries()[i] as f64;
                    let ratio = gamma.index_factorial() / delta.index_factorial();
                    acc += (tji * f.coeffs[rank(&delta)]).scale(mult * ratio);
                }
            }
            out.coeffs[gi] = acc;
        }
        out
    }

    /// Pullback `(T^(x)r)^* kappa`, i.e. `pair(pullback, xi^r) = pair(kappa, (T xi)^r)`.
    pub fn pullback_pow(t: &Mat<T>, kappa: &Self) -> Self {
        Self::map_pow(&t.transpose(), kappa)
    }
}

fn raise_by_linear_form<T: Scalar>(
    dim: usize,
    deg: usize,
    poly: &[T],
    weight: impl Fn(usize) -> T,
) -> Vec<T> {
    let mut out = vec![T::zero(); basis_size(dim, deg + 1)];
    for (delta, &c) in basis(dim, deg).iter().zip(poly) {
        if c.is_zero() {
            continue;
        }
        for j in 0..dim {
            let w = weight(j);
            if w.is_zero() {
                continue;
            }
            let mut up = delta.entries().to_vec();
            up[j] += 1;
            out[rank(&MultiIndex::new(up))] += c * w;
        }
    }
    out
}

/// The symmetric order-2 trace kernel: `pair(tau, xi^(x)2) = <xi,xi>`.
pub fn trace_tensor<T: Scalar>(dim: usize) -> SymTensor<T> {
    SymTensor::from_fn(dim, 2, |alpha| {
        if alpha.entries().iter().any(|&a| a == 2) {
            T::one()
        } else {
            T::zero()
        }
    })
}

/// `kappa^(x,sym)k`, iterated symmetric product; order 0 scalar 1 for `k = 0`.
pub fn sym_power<T: Scalar>(kappa: &SymTensor<T>, k: usize) -> SymTensor<T> {
    let mut acc = SymTensor::scalar(kappa.dim(), T::one());
    for _ in 0..k {
        acc = acc.sym_product(kappa).expect("dimensions agree");
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    type C = Complex64;
    type St = SymTensor<C>;

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    fn rand_vec(rng: &mut StdRng, d: usize) -> Vec<C> {
        (0..d).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect()
    }

    fn rand_tensor(rng: &mut StdRng, d: usize, n: usize) -> St {
        St::from_fn(d, n, |_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
    }

    fn rand_mat(rng: &mut StdRng, d: usize) -> Mat<C> {
        Mat::from_fn(d, d, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
    }

    fn dot(a: &[C], b: &[C]) -> C {
        a.iter().zip(b).map(|(&x, &y)| x * y).sum()
    }

    #[test]
    fn basis_enumeration_and_rank_agree() {
        for d in 1..=4 {
            for n in 0..=6 {
                let b = basis(d, n);
                assert_eq!(b.len(), basis_size(d, n));
                for (i, alpha) in b.iter().enumerate() {
                    assert_eq!(rank(alpha), i);
                    assert_eq!(alpha.order(), n);
                }
            }
        }
    }

    #[test]
    fn pairing_of_unit_powers() {
        // d=1: pair(e^(x)2, e^(x)2) = 1
        let e2 = St::power(&[c(1.0, 0.0)], 2);
        assert_eq!(e2.pair(&e2).unwrap(), c(1.0, 0.0));
    }

    #[test]
    fn pairing_matches_hand_expansion_d2() {
        // xi=(1,2), eta=(3,1): pair(xi^(x)2, eta^(x)2) = (<xi,eta>)^2 = 25
        let xi = [c(1.0, 0.0), c(2.0, 0.0)];
        let eta = [c(3.0, 0.0), c(1.0, 0.0)];
        let p = St::power(&xi, 2).pair(&St::power(&eta, 2)).unwrap();
        assert!((p - c(25.0, 0.0)).norm() < 1e-13);
    }

    #[test]
    fn pairing_with_zero_tensor() {
        let f = St::power(&[c(0.3, 0.1), c(-1.0, 0.5)], 3);
        let z = St::zero(2, 3);
        assert_eq!(f.pair(&z).unwrap(), c(0.0, 0.0));
    }

    #[test]
    fn pairing_rejects_mismatched_shapes() {
        let f = St::zero(2, 3);
        assert_eq!(
            f.pair(&St::zero(3, 3)).unwrap_err(),
            TensorError::DimensionMismatch { expected: 2, got: 3 }
        );
        assert_eq!(
            f.pair(&St::zero(2, 4)).unwrap_err(),
            TensorError::OrderMismatch { expected: 3, got: 4 }
        );
    }

    #[test]
    fn power_basics() {
        let p0 = St::power(&[c(5.0, 0.0)], 0);
        assert_eq!(p0.coeffs(), &[c(1.0, 0.0)]);
        let p3 = St::power(&[c(2.0, 0.0)], 3);
        assert_eq!(p3.coeffs(), &[c(8.0, 0.0)]);
    }

    #[test]
    fn pairing_power_law_random() {
        let mut rng = StdRng::seed_from_u64(1);
        for _ in 0..50 {
            let d = rng.gen_range(1..=3);
            let n = rng.gen_range(0..=6);
            let xi = rand_vec(&mut rng, d);
            let eta = rand_vec(&mut rng, d);
            let lhs = St::power(&xi, n).pair(&St::power(&eta, n)).unwrap();
            let rhs = dot(&xi, &eta).powu(n as u32);
            assert!((lhs - rhs).norm() < 1e-12 * (1.0 + rhs.norm()));
        }
    }

    #[test]
    fn trace_tensor_characterization() {
        let mut rng = StdRng::seed_from_u64(2);
        let tau = trace_tensor::<C>(3);
        let xi = rand_vec(&mut rng, 3);
        let lhs = tau.pair(&St::power(&xi, 2)).unwrap();
        assert!((lhs - dot(&xi, &xi)).norm() < 1e-13);
        // pair(tau, tau) = d
        let tau2 = trace_tensor::<C>(2);
        assert!((tau2.pair(&tau2).unwrap() - c(2.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn sym_product_unit_and_powers() {
        let mut rng = StdRng::seed_from_u64(3);
        let f = rand_tensor(&mut rng, 2, 3);
        let one = St::scalar(2, c(1.0, 0.0));
        assert_eq!(f.sym_product(&one).unwrap(), f);
        assert_eq!(one.sym_product(&f).unwrap(), f);

        let xi = rand_vec(&mut rng, 2);
        let merged = St::power(&xi, 2).sym_product(&St::power(&xi, 3)).unwrap();
        let direct = St::power(&xi, 5);
        assert!(merged.sub(&direct).norm() < 1e-12);
    }

    #[test]
    fn sym_product_pairing_contract() {
        let mut rng = StdRng::seed_from_u64(4);
        let e1 = St::from_fn(2, 1, |a| if a.entries()[0] == 1 { c(1.0, 0.0) } else { c(0.0, 0.0) });
        let e2 = St::from_fn(2, 1, |a| if a.entries()[1] == 1 { c(1.0, 0.0) } else { c(0.0, 0.0) });
        let prod = e1.sym_product(&e2).unwrap();
        for _ in 0..20 {
            let xi = rand_vec(&mut rng, 2);
            let lhs = prod.pair(&St::power(&xi, 2)).unwrap();
            let rhs = e1.pair(&St::power(&xi, 1)).unwrap() * e2.pair(&St::power(&xi, 1)).unwrap();
            assert!((lhs - rhs).norm() < 1e-12);
        }
    }

    #[test]
    fn right_contract_characterization() {
        let mut rng = StdRng::seed_from_u64(5);
        let d = 3;
        let tau = trace_tensor::<C>(d);
        let xi = rand_vec(&mut rng, d);
        let lhs = St::right_contract(&tau, &St::power(&xi, 4)).unwrap();
        let rhs = St::power(&xi, 2).scale_t(dot(&xi, &xi));
        assert!(lhs.sub(&rhs).norm() < 1e-12);

        // full contraction equals the pairing
        let f = rand_tensor(&mut rng, d, 2);
        let full = St::right_contract(&tau, &f).unwrap();
        assert_eq!(full.order(), 0);
        assert!((full.coeffs()[0] - tau.pair(&f).unwrap()).norm() < 1e-13);

        // contraction by the order-0 unit is the identity
        let one = St::scalar(d, c(1.0, 0.0));
        assert_eq!(St::right_contract(&one, &f).unwrap(), f);

        assert!(St::right_contract(&f, &one).is_err());
    }

    #[test]
    fn right_contract_adjoint_to_sym_product() {
        let mut rng = StdRng::seed_from_u64(6);
        for _ in 0..10 {
            let d = 2;
            let kappa = rand_tensor(&mut rng, d, 2);
            let f = rand_tensor(&mut rng, d, 5);
            let g = rand_tensor(&mut rng, d, 3);
            let lhs = St::right_contract(&kappa, &f).unwrap().pair(&g).unwrap();
            let rhs = f.pair(&g.sym_product(&kappa).unwrap()).unwrap();
            assert!((lhs - rhs).norm() < 1e-11 * (1.0 + rhs.norm()));
        }
    }

    #[test]
    fn partial_contract_specializes() {
        let mut rng = StdRng::seed_from_u64(7);
        let d = 2;
        let kappa = rand_tensor(&mut rng, d, 2);
        let f = rand_tensor(&mut rng, d, 4);
        let rc = St::partial_contract(&kappa, 0, 2, &f).unwrap();
        assert!(rc.sub(&St::right_contract(&kappa, &f).unwrap()).norm() < 1e-13);
        let sp = St::partial_contract(&kappa, 2, 0, &f).unwrap();
        assert!(sp.sub(&kappa.sym_product(&f).unwrap()).norm() < 1e-13);
    }

    #[test]
    fn partial_contract_characterization_on_powers() {
        // pair(contract_m(kappa, eta^(n+m)), zeta^(l+n))
        //   = pair(kappa, zeta^l (x) eta^m) * <eta, zeta>^n
        let mut rng = StdRng::seed_from_u64(8);
        let d = 2;
        let (l, m, n) = (1, 2, 2);
        let kappa = rand_tensor(&mut rng, d, l + m);
        let eta = rand_vec(&mut rng, d);
        let zeta = rand_vec(&mut rng, d);
        let contracted = St::partial_contract(&kappa, l, m, &St::power(&eta, n + m)).unwrap();
        let lhs = contracted.pair(&St::power(&zeta, l + n)).unwrap();
        let mixed = St::power(&zeta, l).sym_product(&St::power(&eta, m)).unwrap();
        let rhs = kappa.pair(&mixed).unwrap() * dot(&eta, &zeta).powu(n as u32);
        assert!((lhs - rhs).norm() < 1e-12 * (1.0 + rhs.norm()));
    }

    #[test]
    fn map_pow_characterization() {
        let mut rng = StdRng::seed_from_u64(9);
        let d = 2;
        for n in 0..=6 {
            let t = rand_mat(&mut rng, d);
            let xi = rand_vec(&mut rng, d);
            let lhs = St::map_pow(&t, &St::power(&xi, n));
            let t_xi: Vec<C> = (0..d).map(|r| (0..d).map(|k| t[(r, k)] * xi[k]).sum()).collect();
            let rhs = St::power(&t_xi, n);
            assert!(lhs.sub(&rhs).norm() < 1e-12 * (1.0 + rhs.norm()));
        }
    }

    #[test]
    fn map_pow_identity_and_scaling() {
        let mut rng = StdRng::seed_from_u64(10);
        let f = rand_tensor(&mut rng, 3, 4);
        assert!(St::map_pow(&Mat::identity(3), &f).sub(&f).norm() < 1e-14);
        let b = c(0.7, -0.2);
        let scaled = St::map_pow(&Mat::identity(3).scale_t(b), &f);
        assert!(scaled.sub(&f.scale_t(b.powu(4))).norm() < 1e-12);
    }

    #[test]
    fn derivation_pow_identity_and_order_zero() {
        let mut rng = StdRng::seed_from_u64(11);
        let f = rand_tensor(&mut rng, 2, 5);
        let lifted = St::derivation_pow(&Mat::identity(2), &f);
        assert!(lifted.sub(&f.scale(5.0)).norm() < 1e-13);
        let f0 = St::scalar(2, c(3.0, 1.0));
        assert!(St::derivation_pow(&rand_mat(&mut rng, 2), &f0).is_zero());
    }

    #[test]
    fn derivation_pow_characterization() {
        // derivation_pow(T) xi^(x)n = n * (T xi) (x,sym) xi^(x)(n-1)
        let mut rng = StdRng::seed_from_u64(12);
        let d = 2;
        for n in 1..=6 {
            let t = rand_mat(&mut rng, d);
            let xi = rand_vec(&mut rng, d);
            let lhs = St::derivation_pow(&t, &St::power(&xi, n));
            let t_xi: Vec<C> = (0..d).map(|r| (0..d).map(|k| t[(r, k)] * xi[k]).sum()).collect();
            let rhs = St::power(&t_xi, 1)
                .sym_product(&St::power(&xi, n - 1))
                .unwrap()
                .scale(n as f64);
            assert!(lhs.sub(&rhs).norm() < 1e-12 * (1.0 + rhs.norm()));
        }
    }

    #[test]
    fn pullback_characterization() {
        let mut rng = StdRng::seed_from_u64(13);
        let d = 2;
        let r = 3;
        let t = rand_mat(&mut rng, d);
        let kappa = rand_tensor(&mut rng, d, r);
        let xi = rand_vec(&mut rng, d);
        let lhs = St::pullback_pow(&t, &kappa).pair(&St::power(&xi, r)).unwrap();
        let t_xi: Vec<C> = (0..d).map(|row| (0..d).map(|k| t[(row, k)] * xi[k]).sum()).collect();
        let rhs = kappa.pair(&St::power(&t_xi, r)).unwrap();
        assert!((lhs - rhs).norm() < 1e-12 * (1.0 + rhs.norm()));
    }
}
