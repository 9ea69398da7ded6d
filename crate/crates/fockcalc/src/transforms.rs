//! Named transforms and one-parameter groups on the truncated chaos space:
//! normal ordering, Fourier-Gauss, scaling, Fourier, renormalized operators,
//! the Fourier-Mehler adjoint family and the Mehler-type group generated by
//! `a * Laplacian + b * Number`, together with derivative and regularity
//! checkers for such families.
//!
//! Group parameters stay generic over the scalar ring so a whole family can be
//! evaluated at a bicomplex point; that is what makes the complex-step
//! generator checks machine-precision instead of finite-difference-precision.

use num_complex::Complex64;

use crate::chaos::SeminormConfig;
use crate::fockop::{
    exp_lowering, gross_laplacian, integral_kernel,
    number_operator, second_quantization, FockOperator, KernelSpec, OperatorError,
};
use crate::linalg::Mat;
use crate::scalar::{Bicomplex, Scalar};
use crate::symtensor::{basis, factorial, trace_tensor, SymTensor};

type C = Complex64;

pub type Result<T, E = OperatorError> = std::result::Result<T, E>;

// ---------------------------------------------------------------------------
// normal ordering
// ---------------------------------------------------------------------------

/// Normal-ordering operator `exp(-1/2 Laplacian)`; maps the function with
/// monomial coefficients `(f_n)` to the one with Wick coefficients `(f_n)`.
pub fn renormalization<T: Scalar>(dim: usize, nmax: usize) -> FockOperator<T> {
    exp_lowering(&gross_laplacian(dim, nmax), T::from_f64(-0.5))
        .expect("the Laplacian lowers the degree")
}

pub fn renormalization_inv<T: Scalar>(dim: usize, nmax: usize) -> FockOperator<T> {
    exp_lowering(&gross_laplacian(dim, nmax), T::from_f64(0.5))
        .expect("the Laplacian lowers the degree")
}

// ---------------------------------------------------------------------------
// Fourier-Gauss, scaling, Fourier
// ---------------------------------------------------------------------------

/// Fourier-Gauss transform, parameterized by the *square* of the mixing
/// amplitude: `Gamma(b Id) . exp(1/2 (a^2 + b^2 - 1) Laplacian)`. No square
/// root is ever taken; the transform depends on the amplitude only through
/// its square.
pub fn fourier_gauss_generic<T: Scalar>(
    a_squared: T,
    b: T,
    dim: usize,
    nmax: usize,
) -> FockOperator<T> {
    let gamma = second_quantization(&Mat::identity(dim).scale_t(b), nmax);
    let coeff = (a_squared + b * b - T::one()).scale(0.5);
    let heat = exp_lowering(&gross_laplacian(dim, nmax), coeff)
        .expect("the Laplacian lowers the degree");
    gamma.compose(&heat)
}

pub fn fourier_gauss(a_squared: C, b: C, dim: usize, nmax: usize) -> FockOperator<C> {
    fourier_gauss_generic(a_squared, b, dim, nmax)
}

/// Closed-form symbol of the Fourier-Gauss transform:
/// `exp(1/2 (a^2 + b^2 - 1) <xi,xi> + b <xi,eta>)`.
pub fn fourier_gauss_symbol(a_squared: C, b: C, xi: &[C], eta: &[C]) -> C {
    let xx: C = xi.iter().map(|&z| z * z).sum();
    let xe: C = xi.iter().zip(eta).map(|(&x, &e)| x * e).sum();
    ((a_squared + b * b - C::new(1.0, 0.0)).scale(0.5) * xx + b * xe).exp()
}

/// Scaling operator: `Gamma(lambda Id) . exp((lambda^2 - 1)/2 Laplacian)`;
/// in the monomial representation it multiplies degree `n` by `lambda^n`.
pub fn scaling_generic<T: Scalar>(lambda: T, dim: usize, nmax: usize) -> FockOperator<T> {
    fourier_gauss_generic(T::zero(), lambda, dim, nmax)
}

pub fn scaling(lambda: C, dim: usize, nmax: usize) -> FockOperator<C> {
    scaling_generic(lambda, dim, nmax)
}

/// Fourier transform `exp(-1/2 Laplacian)^* . Gamma(-i Id)`, with symbol
/// `exp(-i <xi,eta> - 1/2 <eta,eta>)`.
pub fn fourier_transform(dim: usize, nmax: usize) -> FockOperator<C> {
    let half: FockOperator<C> = renormalization(dim, nmax);
    let gamma = second_quantization(&Mat::identity(dim).scale_t(C::new(0.0, -1.0)), nmax);
    half.adjoint().compose(&gamma)
}

pub fn fourier_symbol(xi: &[C], eta: &[C]) -> C {
    let xe: C = xi.iter().zip(eta).map(|(&x, &e)| x * e).sum();
    let ee: C = eta.iter().map(|&z| z * z).sum();
    (-C::new(0.0, 1.0) * xe - ee.scale(0.5)).exp()
}

// ---------------------------------------------------------------------------
// renormalized operators
// ---------------------------------------------------------------------------

fn kernel_exp<T: Scalar>(kernel: &SymTensor<T>, c: T, nmax: usize) -> Result<FockOperator<T>> {
    let spec = KernelSpec::new(0, kernel.order(), kernel.clone())?;
    exp_lowering(&integral_kernel(&spec, nmax), c)
}

/// Conjugation of `op` by the change between the Wick representation and the
/// representation by renormalized powers of `kernel`:
/// `exp(1/2 (Lap - Xi(kernel))) . op . exp(-1/2 (Lap - Xi(kernel)))`.
/// The two exponential factors commute (both are sums of pure annihilation
/// operators), so each side splits into a product of exact exponentials.
pub fn renormalize<T: Scalar>(
    op: &FockOperator<T>,
    kernel: &SymTensor<T>,
) -> Result<FockOperator<T>> {
    let nmax = op.nmax();
    let half = T::from_f64(0.5);
    let fwd = renormalization_inv::<T>(kernel.dim(), nmax).compose(&kernel_exp(kernel, -half, nmax)?);
    let bwd = renormalization::<T>(kernel.dim(), nmax).compose(&kernel_exp(kernel, half, nmax)?);
    Ok(fwd.compose(op).compose(&bwd))
}

/// Renormalized second quantization in closed form:
/// `Gamma(T) . exp(1/2 Xi((T^(x)2 - Id)^* tau)) . exp(-1/2 Xi((T^(x)r - Id)^* kernel))`.
/// Blockwise equal to `renormalize(Gamma(T), kernel)`.
pub fn renormalized_second_quantization<T: Scalar>(
    t: &Mat<T>,
    kernel: &SymTensor<T>,
    nmax: usize,
) -> Result<FockOperator<T>> {
    let dim = kernel.dim();
    let tau = trace_tensor::<T>(dim);
    let tau_moved = SymTensor::pullback_pow(t, &tau).sub(&tau);
    let kernel_moved = SymTensor::pullback_pow(t, kernel).sub(kernel);
    let gamma = second_quantization(t, nmax);
    let first = kernel_exp(&tau_moved, T::from_f64(0.5), nmax)?;
    let second = kernel_exp(&kernel_moved, T::from_f64(-0.5), nmax)?;
    Ok(gamma.compose(&first).compose(&second))
}

/// Adjoint of the Fourier-Mehler transform:
/// `Gamma(e^(i theta) Id) . exp(i/2 e^(i theta) sin(theta) Laplacian)`,
/// the renormalized second quantization of `e^(i theta) Id` for the kernel
/// `tau / 2`.
pub fn fourier_mehler_adjoint(theta: f64, dim: usize, nmax: usize) -> FockOperator<C> {
    fourier_mehler_adjoint_generic(C::new(theta, 0.0), dim, nmax)
}

pub fn fourier_mehler_adjoint_generic<T: Scalar>(
    theta: T,
    dim: usize,
    nmax: usize,
) -> FockOperator<T> {
    let i = T::lift(C::new(0.0, 1.0));
    let rot = (i * theta).exp();
    let gamma = second_quantization(&Mat::identity(dim).scale_t(rot), nmax);
    // sin(theta) = (e^(i theta) - e^(-i theta)) / (2i)
    let sin = (rot - (-(i * theta)).exp()).scale(0.5) * (-i);
    let heat = exp_lowering(&gross_laplacian(dim, nmax), i.scale(0.5) * rot * sin)
        .expect("the Laplacian lowers the degree");
    gamma.compose(&heat)
}

pub fn fourier_mehler_adjoint_symbol(theta: f64, xi: &[C], eta: &[C]) -> C {
    let rot = C::new(0.0, theta).exp();
    let xx: C = xi.iter().map(|&z| z * z).sum();
    let xe: C = xi.iter().zip(eta).map(|(&x, &e)| x * e).sum();
    (rot * xe + C::new(0.0, 0.5) * rot * xx.scale(theta.sin())).exp()
}

/// Renormalized number operator
/// `N + Laplacian - (r/2) Xi(kernel)`, the generator of
/// `theta -> renormalized_second_quantization(e^theta Id, kernel)` at zero.
pub fn renormalized_number<T: Scalar>(
    kernel: &SymTensor<T>,
    nmax: usize,
) -> Result<FockOperator<T>> {
    let dim = kernel.dim();
    let r = kernel.order();
    let spec = KernelSpec::new(0, r, kernel.clone())?;
    let xi_term = integral_kernel(&spec, nmax).scale(-(r as f64) / 2.0);
    Ok(number_operator(dim, nmax).add(&gross_laplacian(dim, nmax)).add(&xi_term))
}

// ---------------------------------------------------------------------------
// the Mehler-type group
// ---------------------------------------------------------------------------

/// Parameters of the one-parameter group generated by
/// `a * Laplacian + b * Number`. Only squares of the derived Gaussian
/// amplitude are ever formed; `b = 0` switches to the limiting branch.
#[derive(Clone, Copy, Debug)]
pub struct GroupParams {
    pub a: C,
    pub b: C,
    pub t: f64,
}

impl GroupParams {
    pub fn new(a: C, b: C, t: f64) -> Self {
        Self { a, b, t }
    }

    /// Squared Gaussian amplitude of the equivalent Fourier-Gauss transform:
    /// `(1 - a/b)(1 - e^(2bt))`, or its `b -> 0` limit `2at`.
    pub fn scale_squared(&self) -> C {
        if self.b == C::new(0.0, 0.0) {
            self.a.scale(2.0 * self.t)
        } else {
            (C::new(1.0, 0.0) - self.a / self.b)
                * (C::new(1.0, 0.0) - (self.b.scale(2.0 * self.t)).exp())
        }
    }

    /// Coherent-coordinate multiplier `e^(bt)`.
    pub fn multiplier(&self) -> C {
        (self.b.scale(self.t)).exp()
    }
}

/// The transformation group element `P_(a,b,t)` as a Fourier-Gauss transform
/// with the parameters of [`GroupParams`]. `t = 0` gives the identity.
pub fn mehler_group(params: &GroupParams, dim: usize, nmax: usize) -> FockOperator<C> {
    mehler_group_generic(
        params.a,
        params.b,
        C::new(params.t, 0.0),
        dim,
        nmax,
    )
}

/// Same construction over any scalar ring; `t` may be a bicomplex step point.
pub fn mehler_group_generic<T: Scalar>(a: C, b: C, t: T, dim: usize, nmax: usize) -> FockOperator<T> {
    let one = T::one();
    if b == C::new(0.0, 0.0) {
        let scale_sq = T::lift(a).scale(2.0) * t;
        fourier_gauss_generic(scale_sq, one, dim, nmax)
    } else {
        let q = T::lift(C::new(1.0, 0.0) - a / b);
        let ebt2 = (T::lift(b.scale(2.0)) * t).exp();
        let scale_sq = q * (one - ebt2);
        let mult = (T::lift(b) * t).exp();
        fourier_gauss_generic(scale_sq, mult, dim, nmax)
    }
}

/// The group's infinitesimal generator `a * Laplacian + b * Number`.
pub fn group_generator(a: C, b: C, dim: usize, nmax: usize) -> FockOperator<C> {
    gross_laplacian(dim, nmax).scale_t(a).add(&number_operator(dim, nmax).scale_t(b))
}

// ---------------------------------------------------------------------------
// derivatives of operator families
// ---------------------------------------------------------------------------

/// Step size of the complex-step derivative. The entries of every family here
/// are entire in the parameter, so the step can sit far below the rounding
/// threshold and the quotient is still exact to machine precision.
pub const COMPLEX_STEP: f64 = 1e-100;

/// Derivative at `t0` of an operator family, evaluated by a bicomplex step:
/// the family is built once at `t0 + j*h` and the `j`-component is divided by
/// `h`. No subtractive cancellation occurs.
pub fn complex_step_derivative(
    family: impl Fn(Bicomplex) -> FockOperator<Bicomplex>,
    t0: f64,
) -> FockOperator<C> {
    let op = family(Bicomplex::step_point(t0, COMPLEX_STEP));
    op.map_scalars(|z| z.jpart / COMPLEX_STEP)
}

/// Central finite difference with one Richardson extrapolation level,
/// an implementation-independent secondary check of the same derivatives.
pub fn richardson_fd_derivative(
    family: impl Fn(f64) -> FockOperator<C>,
    t0: f64,
    h: f64,
) -> FockOperator<C> {
    let central = |h: f64| family(t0 + h).sub(&family(t0 - h)).scale(0.5 / h);
    let coarse = central(h);
    let fine = central(h / 2.0);
    fine.scale(4.0 / 3.0).sub(&coarse.scale(1.0 / 3.0))
}

// ---------------------------------------------------------------------------
// regularity proxy
// ---------------------------------------------------------------------------

/// Difference-quotient residuals of a family against its claimed generator.
#[derive(Clone, Debug)]
pub struct RegularityReport {
    /// `(t, residual)` pairs, `t` decreasing.
    pub residuals: Vec<(f64, f64)>,
    /// `residual(t) / residual(t/2)` for consecutive steps.
    pub ratios: Vec<f64>,
    /// Every ratio within 20 percent of exact halving.
    pub linear_decay: bool,
}

/// Finite-model regularity check: the seminorm-to-seminorm operator norm of
/// `(F(t) - Id)/t - G` must decay linearly in `t`. The norm used is the
/// Frobenius norm of the seminorm-conjugated full matrix, which dominates the
/// unit-ball supremum and decays at the identical rate.
pub fn regularity_check(
    family: impl Fn(f64) -> FockOperator<C>,
    generator: &FockOperator<C>,
    steps: &[f64],
    p: f64,
    beta: f64,
    cfg: &SeminormConfig,
) -> RegularityReport {
    let id = FockOperator::identity(generator.dim(), generator.nmax());
    let mut residuals = Vec::with_capacity(steps.len());
    for &t in steps {
        let quotient = family(t).sub(&id).scale(1.0 / t);
        let defect = quotient.sub(generator);
        residuals.push((t, seminorm_operator_norm(&defect, p, beta, cfg)));
    }
    let mut ratios = Vec::new();
    for w in residuals.windows(2) {
        let (t0, r0) = w[0];
        let (t1, r1) = w[1];
        debug_assert!(t1 < t0);
        ratios.push(r0 / r1);
    }
    let linear_decay = !ratios.is_empty() && ratios.iter().all(|r| (1.6..=2.4).contains(r));
    RegularityReport { residuals, ratios, linear_decay }
}

/// Frobenius norm of `W . op . W^-1` where `W` carries the seminorm weights
/// `sqrt((n!)^(1+beta) n!/alpha!) * prod_i lambda_i^(p alpha_i)` per entry.
fn seminorm_operator_norm(op: &FockOperator<C>, p: f64, beta: f64, cfg: &SeminormConfig) -> f64 {
    let weights: Vec<Vec<f64>> = (0..=op.nmax())
        .map(|n| {
            basis(op.dim(), n)
                .iter()
                .map(|alpha| {
                    let lam: f64 = alpha
                        .entries()
                        .iter()
                        .zip(cfg.lambda())
                        .map(|(&a, &l)| l.powf(p * a as f64))
                        .product();
                    (factorial(n).powf(1.0 + beta) * alpha.multinomial_weight()).sqrt() * lam
                })
                .collect()
        })
        .collect();
    let mut sum = 0.0;
    for (&(o, i), block) in op.blocks() {
        for r in 0..block.nrows() {
            for c in 0..block.ncols() {
                sum += (block[(r, c)].norm() * weights[o][r] / weights[i][c]).powi(2);
            }
        }
    }
    sum.sqrt()
}

// ---------------------------------------------------------------------------
// convenient bicomplex family builders
// ---------------------------------------------------------------------------

/// `t -> Gamma(exp(t B))` over any scalar ring.
pub fn second_quantization_flow<T: Scalar>(b: &Mat<C>, t: T, nmax: usize) -> FockOperator<T> {
    let lifted = b.map(|z| T::lift(z)).scale_t(t);
    second_quantization(&lifted.expm(), nmax)
}

/// `theta -> renormalized second quantization of e^(c theta) Id` over any ring.
pub fn renormalized_scaling_flow<T: Scalar>(
    c_coeff: C,
    theta: T,
    kernel: &SymTensor<C>,
    nmax: usize,
) -> FockOperator<T> {
    let rot = (T::lift(c_coeff) * theta).exp();
    let kernel_t: SymTensor<T> = map_tensor(kernel);
    renormalized_second_quantization(&Mat::identity(kernel.dim()).scale_t(rot), &kernel_t, nmax)
        .expect("kernel order fixed")
}

fn map_tensor<T: Scalar>(t: &SymTensor<C>) -> SymTensor<T> {
    let mut out = SymTensor::zero(t.dim(), t.order());
    for (dst, &src) in out.coeffs_mut().iter_mut().zip(t.coeffs()) {
        *dst = T::lift(src);
    }
    out
}

/// Lift a complex tensor into any scalar ring.
pub fn lift_tensor<T: Scalar>(t: &SymTensor<C>) -> SymTensor<T> {
    map_tensor(t)
}

/// Lift a complex matrix into any scalar ring.
pub fn lift_matrix<T: Scalar>(m: &Mat<C>) -> Mat<T> {
    m.map(|z| T::lift(z))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chaos::{ChaosVector, Rep};
    use crate::fockop::{
        self, convolution_operator, diff_second_quantization, exp_convolution,
        wick_mult_operator,
    };
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    fn rand_vec(rng: &mut StdRng, d: usize) -> Vec<C> {
        (0..d).map(|_| c(rng.gen_range(-0.4..0.4), rng.gen_range(-0.4..0.4))).collect()
    }

    fn rand_tensor(rng: &mut StdRng, d: usize, n: usize) -> SymTensor<C> {
        SymTensor::from_fn(d, n, |_| c(rng.gen_range(-0.7..0.7), rng.gen_range(-0.7..0.7)))
    }

    fn rand_chaos(rng: &mut StdRng, d: usize, nmax: usize, top: usize) -> ChaosVector {
        let coeffs = (0..=nmax)
            .map(|n| {
                if n <= top {
                    rand_tensor(rng, d, n).scale(1.0 / factorial(n))
                } else {
                    SymTensor::zero(d, n)
                }
            })
            .collect();
        ChaosVector::from_coeffs(coeffs, Rep::Wick)
    }

    #[test]
    fn normal_ordering_operator_matches_representation_change() {
        // applied to the function x^2 (wick coefficients (1, 0, e(x)e)), the
        // normal-ordering operator produces :x^2: (wick coefficients (0,0,e(x)e))
        let mut wick = ChaosVector::zero(1, 4, Rep::Wick);
        wick.coeffs_mut()[0] = SymTensor::scalar(1, c(1.0, 0.0));
        wick.coeffs_mut()[2] = SymTensor::power(&[c(1.0, 0.0)], 2);
        let theta: FockOperator<C> = renormalization(1, 4);
        let out = theta.apply(&wick).unwrap();
        assert!(out.coeffs()[0].is_zero());
        assert_eq!(out.coeffs()[2], wick.coeffs()[2]);
        // constants are fixed
        let one = ChaosVector::constant(c(2.0, 1.0), 1, 4);
        assert!(theta.apply(&one).unwrap().max_rel_residual(&one) < 1e-15);
        // inverse pair
        let prod = theta.compose(&renormalization_inv(1, 4));
        assert!(prod.max_rel_residual(&FockOperator::identity(1, 4)) < 1e-13);
    }

    #[test]
    fn normal_ordering_sends_truncated_exponential_to_coherent_state() {
        let mut rng = StdRng::seed_from_u64(50);
        let d = 2;
        let nmax = 10;
        let xi = rand_vec(&mut rng, d);
        // e^<., xi> has monomial coefficients xi^(x)n / n!
        let mono = ChaosVector::from_coeffs(
            (0..=nmax).map(|n| SymTensor::power(&xi, n).scale(1.0 / factorial(n))).collect(),
            Rep::Monomial,
        );
        let wick = mono.to_wick().unwrap();
        let theta: FockOperator<C> = renormalization(d, nmax);
        let out = theta.apply(&wick).unwrap();
        let target = ChaosVector::exp_vector(&xi, nmax);
        assert!(out.max_rel_residual(&target) < 1e-13);
    }

    #[test]
    fn fourier_gauss_degenerate_parameters_give_identity() {
        let op = fourier_gauss(c(0.0, 0.0), c(1.0, 0.0), 2, 8);
        assert!(op.max_rel_residual(&FockOperator::identity(2, 8)) < 1e-14);
    }

    #[test]
    fn fourier_gauss_symbol_matches_closed_form() {
        let mut rng = StdRng::seed_from_u64(51);
        let d = 2;
        let nmax = 12;
        for _ in 0..5 {
            let a2 = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            let b = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            let op = fourier_gauss(a2, b, d, nmax);
            let xi = rand_vec(&mut rng, d);
            let eta = rand_vec(&mut rng, d);
            let sym = fockop::operator_symbol(&op, &xi, &eta, 1e-6).unwrap();
            let want = fourier_gauss_symbol(a2, b, &xi, &eta);
            assert!((sym.value - want).norm() < sym.tail_bound.max(1e-11));
        }
    }

    #[test]
    fn scaling_acts_on_monomials_and_points() {
        let mut rng = StdRng::seed_from_u64(52);
        let d = 2;
        let nmax = 8;
        let lambda = c(0.8, 0.3);
        let op = scaling(lambda, d, nmax);
        assert!(scaling(c(1.0, 0.0), d, nmax)
            .max_rel_residual(&FockOperator::identity(d, nmax))
            < 1e-14);
        // monomial representation: degree n scales by lambda^n
        let phi = rand_chaos(&mut rng, d, nmax, nmax);
        let scaled = op.apply(&phi).unwrap().to_monomial().unwrap();
        let mono = phi.to_monomial().unwrap();
        for n in 0..=nmax {
            let want = mono.coeffs()[n].scale_t(lambda.powu(n as u32));
            assert!(scaled.coeffs()[n].sub(&want).norm() < 1e-12 * (1.0 + want.norm()));
        }
        // pointwise: (S_lambda phi)(y) = phi(lambda y)
        let y = rand_vec(&mut rng, d);
        let ly: Vec<C> = y.iter().map(|&v| v * lambda).collect();
        let lhs = op.apply(&phi).unwrap().eval_at(&y).unwrap();
        let rhs = phi.eval_at(&ly).unwrap();
        assert!((lhs - rhs).norm() < 1e-11 * (1.0 + rhs.norm()));
    }

    #[test]
    fn fourier_symbol_matches_closed_form() {
        let mut rng = StdRng::seed_from_u64(53);
        let d = 2;
        let nmax = 12;
        let op = fourier_transform(d, nmax);
        let xi0: Vec<C> = vec![c(0.0, 0.0); d];
        let sym0 = fockop::operator_symbol(&op, &xi0, &xi0, 1e-9).unwrap();
        assert!((sym0.value - c(1.0, 0.0)).norm() < 1e-13);
        for _ in 0..5 {
            let xi: Vec<C> = rand_vec(&mut rng, d).iter().map(|&z| z.scale(0.5)).collect();
            let eta: Vec<C> = rand_vec(&mut rng, d).iter().map(|&z| z.scale(0.5)).collect();
            let sym = fockop::operator_symbol(&op, &xi, &eta, 1e-3).unwrap();
            let want = fourier_symbol(&xi, &eta);
            assert!((sym.value - want).norm() < sym.tail_bound.max(1e-9));
        }
    }

    #[test]
    fn renormalize_with_trace_kernel_is_identity_conjugation() {
        let mut rng = StdRng::seed_from_u64(54);
        let d = 2;
        let nmax = 8;
        let phi = rand_chaos(&mut rng, d, nmax, 2);
        let op = convolution_operator(&phi).unwrap();
        let tau = trace_tensor::<C>(d);
        let conj = renormalize(&op, &tau).unwrap();
        assert!(conj.max_rel_residual(&op) < 1e-12);
        // identity is a fixed point for any kernel
        let kernel = rand_tensor(&mut rng, d, 3);
        let id = FockOperator::identity(d, nmax);
        assert!(renormalize(&id, &kernel).unwrap().max_rel_residual(&id) < 1e-11);
    }

    #[test]
    fn renormalized_operator_acts_on_kappa_coefficients_like_the_original() {
        let mut rng = StdRng::seed_from_u64(55);
        let d = 2;
        let nmax = 8;
        for r in 2..=3 {
            let kernel = rand_tensor(&mut rng, d, r);
            // a degree-preserving test operator with full blocks
            let m = Mat::from_fn(d, d, |_, _| c(rng.gen_range(-0.8..0.8), rng.gen_range(-0.8..0.8)));
            let op = second_quantization(&m, nmax);
            let conj = renormalize(&op, &kernel).unwrap();
            // T_kernel in the kappa representation = T on wick coefficients
            let psi = rand_chaos(&mut rng, d, nmax, nmax);
            let psi_kappa = ChaosVector::from_coeffs(psi.coeffs().to_vec(), Rep::Kappa(kernel.clone()));
            let lhs = conj.apply(&psi_kappa.to_wick().unwrap()).unwrap();
            let transported = op.apply(&psi).unwrap();
            let rhs = ChaosVector::from_coeffs(transported.coeffs().to_vec(), Rep::Kappa(kernel.clone()))
                .to_wick()
                .unwrap();
            assert!(lhs.max_rel_residual(&rhs) < 1e-11);
        }
    }

    #[test]
    fn renormalized_second_quantization_matches_conjugation() {
        let mut rng = StdRng::seed_from_u64(56);
        let d = 2;
        let nmax = 8;
        for r in 2..=3 {
            let kernel = rand_tensor(&mut rng, d, r);
            let m = Mat::from_fn(d, d, |i, j| {
                if i == j { c(rng.gen_range(0.5..1.2), 0.0) } else { c(rng.gen_range(-0.3..0.3), 0.1) }
            });
            let closed = renormalized_second_quantization(&m, &kernel, nmax).unwrap();
            let conj = renormalize(&second_quantization(&m, nmax), &kernel).unwrap();
            assert!(closed.max_rel_residual(&conj) < 1e-11);
        }
    }

    #[test]
    fn renormalized_second_quantization_special_cases() {
        let d = 2;
        let nmax = 8;
        let tau = trace_tensor::<C>(d);
        // kernel = sigma^2 tau reproduces the Fourier-Gauss factorization when
        // sigma^2 = a^2 / (1 - b^2)
        let a2 = c(0.3, -0.4);
        let b = c(0.7, 0.2);
        let sigma2 = a2 / (c(1.0, 0.0) - b * b);
        let viagamma = renormalized_second_quantization(
            &Mat::identity(d).scale_t(b),
            &tau.scale_t(sigma2),
            nmax,
        )
        .unwrap();
        let direct = fourier_gauss(a2, b, d, nmax);
        assert!(viagamma.max_rel_residual(&direct) < 1e-12);
        // zero kernel gives the scaling operator
        let viazero =
            renormalized_second_quantization(&Mat::identity(d).scale_t(b), &tau.scale_t(c(0.0, 0.0)), nmax)
                .unwrap();
        assert!(viazero.max_rel_residual(&scaling(b, d, nmax)) < 1e-12);
        // kernel = tau/2 with a rotation gives the Fourier-Mehler adjoint
        let theta = 0.37;
        let rot = c(0.0, theta).exp();
        let viahalf = renormalized_second_quantization(
            &Mat::identity(d).scale_t(rot),
            &tau.scale(0.5),
            nmax,
        )
        .unwrap();
        assert!(viahalf.max_rel_residual(&fourier_mehler_adjoint(theta, d, nmax)) < 1e-12);
    }

    #[test]
    fn fourier_mehler_adjoint_group_law_and_generator() {
        let d = 2;
        let nmax = 8;
        assert!(fourier_mehler_adjoint(0.0, d, nmax)
            .max_rel_residual(&FockOperator::identity(d, nmax))
            < 1e-14);
        let (t1, t2) = (0.31, -0.52);
        let lhs = fourier_mehler_adjoint(t1, d, nmax).compose(&fourier_mehler_adjoint(t2, d, nmax));
        let rhs = fourier_mehler_adjoint(t1 + t2, d, nmax);
        assert!(lhs.max_rel_residual(&rhs) < 1e-10);
        // derivative at zero: i (N + Laplacian/2)
        let deriv = complex_step_derivative(|th| fourier_mehler_adjoint_generic(th, d, nmax), 0.0);
        let want = number_operator::<C>(d, nmax)
            .add(&gross_laplacian(d, nmax).scale(0.5))
            .scale_t(c(0.0, 1.0));
        assert!(deriv.max_rel_residual(&want) < 1e-12);
    }

    #[test]
    fn renormalized_number_identities() {
        let mut rng = StdRng::seed_from_u64(57);
        let d = 2;
        let nmax = 8;
        // trace kernel: N_tau = N exactly
        let tau = trace_tensor::<C>(d);
        let n_tau = renormalized_number(&tau, nmax).unwrap();
        assert!(n_tau.max_rel_residual(&number_operator(d, nmax)) < 1e-14);
        // b N_((1 - a/b) tau) = a Laplacian + b N
        let a = c(0.4, 0.7);
        let b = c(-0.8, 0.2);
        let kernel = tau.scale_t(c(1.0, 0.0) - a / b);
        let lhs = renormalized_number(&kernel, nmax).unwrap().scale_t(b);
        assert!(lhs.max_rel_residual(&group_generator(a, b, d, nmax)) < 1e-13);
        // complex-step derivative of the associated flow; kernels of modest
        // size keep the exactly cancelling conjugation factors well conditioned
        for r in 2..=3 {
            let kernel = rand_tensor(&mut rng, d, r).scale(0.4);
            let deriv = complex_step_derivative(
                |th| renormalized_scaling_flow(c(1.0, 0.0), th, &kernel, nmax),
                0.0,
            );
            let want = renormalized_number(&kernel, nmax).unwrap();
            assert!(deriv.max_rel_residual(&want) < 1e-12);
        }
    }

    #[test]
    fn second_quantization_flow_derivative() {
        let mut rng = StdRng::seed_from_u64(58);
        let d = 2;
        let nmax = 7;
        let b = Mat::from_fn(d, d, |_, _| c(rng.gen_range(-0.6..0.6), rng.gen_range(-0.6..0.6)));
        let deriv = complex_step_derivative(|t| second_quantization_flow(&b, t, nmax), 0.0);
        let want = diff_second_quantization(&b, nmax);
        assert!(deriv.max_rel_residual(&want) < 1e-12);
        // secondary finite-difference route agrees at its own accuracy
        let fd = richardson_fd_derivative(
            |t| second_quantization_flow(&b, C::new(t, 0.0), nmax).map_scalars(|z| z),
            0.0,
            1e-2,
        );
        assert!(fd.max_rel_residual(&want) < 1e-7);
    }

    #[test]
    fn renormalized_flow_derivative_closed_form() {
        // d/d theta at 0 of Gamma_kernel(e^(theta B)) =
        //   dGamma(B) + 1/2 Xi(gamma_2(B)^* tau) - 1/2 Xi(gamma_r(B)^* kernel)
        let mut rng = StdRng::seed_from_u64(59);
        let d = 2;
        let nmax = 7;
        for r in 2..=3 {
            let kernel = rand_tensor(&mut rng, d, r);
            let bmat = Mat::from_fn(d, d, |_, _| c(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5)));
            let deriv = complex_step_derivative(
                |t| {
                    let flow = lift_matrix::<Bicomplex>(&bmat).scale_t(t).expm();
                    renormalized_second_quantization(&flow, &lift_tensor(&kernel), nmax).unwrap()
                },
                0.0,
            );
            let tau = trace_tensor::<C>(d);
            let gamma2 = derivation_pullback(&bmat, &tau);
            let gammar = derivation_pullback(&bmat, &kernel);
            let want = diff_second_quantization(&bmat, nmax)
                .add(&integral_kernel(&KernelSpec::new(0, 2, gamma2).unwrap(), nmax).scale(0.5))
                .add(&integral_kernel(&KernelSpec::new(0, r, gammar).unwrap(), nmax).scale(-0.5));
            assert!(deriv.max_rel_residual(&want) < 1e-11);
        }
    }

    // (gamma_r(B))^* kappa: adjoint of the derivation lift on an order-r kernel
    fn derivation_pullback(b: &Mat<C>, kappa: &SymTensor<C>) -> SymTensor<C> {
        SymTensor::derivation_pow(&b.transpose(), kappa)
    }

    #[test]
    fn mehler_group_identity_component_and_law() {
        let d = 2;
        let nmax = 8;
        let pairs = [
            (c(0.0, 0.0), c(-1.0, 0.0)),
            (c(1.0, 0.0), c(0.0, 0.0)),
            (c(0.3, -0.2), c(0.4, 0.3)),
        ];
        for (a, b) in pairs {
            let p0 = mehler_group(&GroupParams::new(a, b, 0.0), d, nmax);
            assert!(p0.max_rel_residual(&FockOperator::identity(d, nmax)) < 1e-13);
            for (s, t) in [(0.2, 0.3), (-0.4, 0.15)] {
                let ps = mehler_group(&GroupParams::new(a, b, s), d, nmax);
                let pt = mehler_group(&GroupParams::new(a, b, t), d, nmax);
                let pst = mehler_group(&GroupParams::new(a, b, s + t), d, nmax);
                assert!(ps.compose(&pt).max_rel_residual(&pst) < 1e-10);
            }
        }
    }

    #[test]
    fn mehler_group_ornstein_uhlenbeck_closed_form() {
        // a = 0, b = -1, phi = x^2: P_t phi at y is e^(-2t) y^2 + (1 - e^(-2t))
        let nmax = 6;
        let mut mono = ChaosVector::zero(1, nmax, Rep::Monomial);
        mono.coeffs_mut()[2] = SymTensor::power(&[c(1.0, 0.0)], 2);
        let phi = mono.to_wick().unwrap();
        for t in [0.0, 0.1, 0.7, 2.0] {
            let p = mehler_group(&GroupParams::new(c(0.0, 0.0), c(-1.0, 0.0), t), 1, nmax);
            let out = p.apply(&phi).unwrap();
            for y in [-1.3, 0.0, 0.4, 2.2] {
                let got = out.eval_at(&[c(y, 0.0)]).unwrap();
                let decay = (-2.0 * t).exp();
                let want = c(decay * y * y + (1.0 - decay), 0.0);
                assert!((got - want).norm() < 1e-12 * (1.0 + want.norm()));
            }
        }
    }

    #[test]
    fn mehler_group_generator_via_complex_step() {
        let d = 2;
        let nmax = 8;
        for (a, b) in [
            (c(0.0, 0.0), c(-1.0, 0.0)),
            (c(0.8, 0.0), c(0.0, 0.0)),
            (c(0.3, -0.5), c(0.2, 0.6)),
        ] {
            let deriv = complex_step_derivative(|t| mehler_group_generic(a, b, t, d, nmax), 0.0);
            let want = group_generator(a, b, d, nmax);
            assert!(deriv.max_rel_residual(&want) < 1e-12);
        }
    }

    #[test]
    fn mehler_group_small_b_limit() {
        // || P_(a,b,t) - P_(a,0,t) || is O(b): the defect shrinks tenfold
        // between b = 1e-3 and b = 1e-4
        let d = 1;
        let nmax = 6;
        let a = c(0.6, 0.2);
        let t = 0.4;
        let base = mehler_group(&GroupParams::new(a, c(0.0, 0.0), t), d, nmax);
        let defect = |b: f64| {
            mehler_group(&GroupParams::new(a, c(b, 0.0), t), d, nmax)
                .sub(&base)
                .max_rel_residual(&FockOperator::zero(d, nmax))
        };
        let ratio = defect(1e-3) / defect(1e-4);
        assert!((8.0..=12.0).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn regularity_of_three_families() {
        let mut rng = StdRng::seed_from_u64(60);
        let d = 2;
        let nmax = 6;
        let cfg = SeminormConfig::default_for_dim(d);
        let steps = [1e-2, 5e-3, 2.5e-3];

        let bmat = Mat::from_fn(d, d, |_, _| c(rng.gen_range(-0.6..0.6), rng.gen_range(-0.6..0.6)));
        let report = regularity_check(
            |t| second_quantization_flow(&bmat, C::new(t, 0.0), nmax),
            &diff_second_quantization(&bmat, nmax),
            &steps,
            1.0,
            0.0,
            &cfg,
        );
        assert!(report.linear_decay, "{:?}", report);

        let phi = rand_chaos(&mut rng, d, nmax, 3);
        let conv = convolution_operator(&phi).unwrap();
        let report = regularity_check(
            |t| exp_convolution(&phi.scale(t)).unwrap(),
            &conv,
            &steps,
            1.0,
            0.0,
            &cfg,
        );
        assert!(report.linear_decay, "{:?}", report);

        let (a, b) = (c(0.4, -0.3), c(-0.7, 0.2));
        let report = regularity_check(
            |t| mehler_group(&GroupParams::new(a, b, t), d, nmax),
            &group_generator(a, b, d, nmax),
            &steps,
            1.0,
            0.0,
            &cfg,
        );
        assert!(report.linear_decay, "{:?}", report);

        // a family that is not differentiable at zero is flagged
        let bad = regularity_check(
            |t| FockOperator::identity(d, nmax).scale(1.0 + t.abs().sqrt()),
            &FockOperator::zero(d, nmax),
            &steps,
            1.0,
            0.0,
            &cfg,
        );
        assert!(!bad.linear_decay);
    }

    #[test]
    fn wick_algebra_and_group_exponentials_commute() {
        // exp(C_phi) exp(C_psi) = exp(C_(phi+psi)): commuting one-parameter flows
        let mut rng = StdRng::seed_from_u64(61);
        let d = 2;
        let nmax = 8;
        let phi = rand_chaos(&mut rng, d, nmax, 3);
        let psi = rand_chaos(&mut rng, d, nmax, 2);
        let lhs = exp_convolution(&phi).unwrap().compose(&exp_convolution(&psi).unwrap());
        let rhs = exp_convolution(&phi.add(&psi)).unwrap();
        assert!(lhs.max_rel_residual(&rhs) < 1e-11);
        let _ = wick_mult_operator(&phi).unwrap();
    }
}
