//! Transform checks: the Fourier-Gauss consistency triangle, renormalized
//! second quantization against conjugation, the named symbols, and the
//! generator identities of the standard one-parameter families.

use rand_chacha::ChaCha8Rng;

use super::{
    rand_chaos, rand_complex, rand_cvec, rand_matrix, rand_tensor, rel_scalar, CheckCase,
    RunConfig, TolKind,
};
use crate::chaos::{ChaosVector, Rep};
use crate::fockop::{
    self, diff_second_quantization, gross_laplacian, integral_kernel, number_operator,
    second_quantization, FockOperator, KernelSpec,
};
use crate::linalg::Mat;
use crate::quadrature::{fourier_gauss_oracle, gh_grid};
use crate::scalar::{Bicomplex, Scalar};
use crate::symtensor::{trace_tensor, SymTensor};
use crate::transforms::{
    complex_step_derivative, fourier_gauss, fourier_gauss_symbol, fourier_mehler_adjoint,
    fourier_mehler_adjoint_generic, fourier_mehler_adjoint_symbol, fourier_symbol,
    fourier_transform, group_generator, lift_matrix, lift_tensor, renormalization,
    renormalization_inv, renormalize, renormalized_number, renormalized_scaling_flow,
    renormalized_second_quantization, scaling, second_quantization_flow,
};
use num_complex::Complex64 as C;

type St = SymTensor<C>;

pub fn cases() -> Vec<CheckCase> {
    vec![
        CheckCase {
            name: "fourier-gauss-triangle",
            identity: "factorized transform, renormalized second quantization and quadrature agree pairwise",
            tol: TolKind::Oracle,
            run: fourier_gauss_triangle,
        },
        CheckCase {
            name: "fourier-gauss-symbol",
            identity: "symbol equals exp((a^2+b^2-1)/2 dot(xi,xi) + b dot(xi,eta)) within the tail bound",
            tol: TolKind::Oracle,
            run: fourier_gauss_symbol_check,
        },
        CheckCase {
            name: "renormalized-quantization-conjugation",
            identity: "closed-form renormalized second quantization equals the conjugated operator",
            tol: TolKind::Fixed(1e-11),
            run: renormalized_quantization_conjugation,
        },
        CheckCase {
            name: "renormalized-representation-property",
            identity: "a renormalized operator acts on kappa coefficients as the original acts on wick coefficients",
            tol: TolKind::Fixed(1e-11),
            run: renormalized_representation_property,
        },
        CheckCase {
            name: "scaling-monomial-law",
            identity: "scaling multiplies monomial degree n by lambda^n and points by lambda",
            tol: TolKind::Exact,
            run: scaling_monomial_law,
        },
        CheckCase {
            name: "scaling-is-zero-kernel-quantization",
            identity: "renormalized second quantization with zero kernel is the scaling operator",
            tol: TolKind::Fixed(1e-11),
            run: scaling_zero_kernel,
        },
        CheckCase {
            name: "fourier-symbol",
            identity: "fourier symbol equals exp(-i dot(xi,eta) - dot(eta,eta)/2) within the tail bound",
            tol: TolKind::Oracle,
            run: fourier_symbol_check,
        },
        CheckCase {
            name: "normal-ordering-operator",
            identity: "the normal-ordering exponential maps plain powers to wick powers and is invertible",
            tol: TolKind::Exact,
            run: normal_ordering_operator,
        },
        CheckCase {
            name: "mehler-adjoint-group-law",
            identity: "the Fourier-Mehler adjoint family composes additively in theta",
            tol: TolKind::Fixed(1e-10),
            run: mehler_adjoint_group_law,
        },
        CheckCase {
            name: "mehler-adjoint-closed-form",
            identity: "the half-trace renormalized quantization matches its rotation-heat factorization and symbol",
            tol: TolKind::Oracle,
            run: mehler_adjoint_closed_form,
        },
        CheckCase {
            name: "mehler-adjoint-generator",
            identity: "d/dtheta at 0 equals i (N + Laplacian/2)",
            tol: TolKind::Fixed(1e-12),
            run: mehler_adjoint_generator,
        },
        CheckCase {
            name: "renormalized-number-identity",
            identity: "N_kernel = N + Laplacian - (r/2) Xi(kernel), and it generates the associated flow",
            tol: TolKind::Fixed(1e-12),
            run: renormalized_number_identity,
        },
        CheckCase {
            name: "renormalized-flow-derivative",
            identity: "d/dtheta of Gamma_kernel(e^(theta B)) matches the derivation-pullback closed form",
            tol: TolKind::Fixed(1e-11),
            run: renormalized_flow_derivative,
        },
        CheckCase {
            name: "quantization-flow-generators",
            identity: "Gamma(e^(tB)) has generator dGamma(B); scaling flow has generator c (N + Laplacian)",
            tol: TolKind::Fixed(1e-12),
            run: quantization_flow_generators,
        },
        CheckCase {
            name: "quadrature-exactness",
            identity: "tensorized Gauss-Hermite integrates random polynomials to their moment values",
            tol: TolKind::Fixed(1e-11),
            run: quadrature_exactness,
        },
        CheckCase {
            name: "quadrature-root-independence",
            identity: "the mixing integral depends on the amplitude only through its square",
            tol: TolKind::Oracle,
            run: quadrature_root_independence,
        },
    ]
}

fn fourier_gauss_triangle(cfg: &RunConfig, rng: &mut ChaCha8Rng) -> f64 {
    let d = cfg.dim;
    let nmax = cfg.nmax;
    let grid = gh_grid(cfg.quad_order, d).unwrap();
    let tau = trace_tensor::<C>(d);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let a2 = rand_complex(rng, 0.8);
        let b = rand_complex(rng, 0.8);
        let phi = rand_chaos(rng, d, nmax, 6, Rep::Wick);
        let factorized = fourier_gauss(a2, b, d, nmax);
        // leg 2: renormalized second quantization with kernel sigma^2 tau
        let sigma2 = a2 / (C::new(1.0, 0.0) - b * b);
        let quantized = renormalized_second_quantization(
            &Mat::identity(d).scale_t(b),
            &tau.scale_t(sigma2),
            nmax,
        )
        .unwrap();
        worst = worst.max(factorized.max_rel_residual(&quantized));
        // leg 3: quadrature at random evaluation points
        let image = factorized.apply(&phi).unwrap();
        for _ in 0..3 {
            let y = rand_cvec(rng, d, 0.8);
            let via_op = image.eval_at(&y).unwrap();
            let via_quad = fourier_gauss_oracle(&phi, a2.sqrt(), b, &y, &grid).unwrap();
            worst = worst.max(rel_scalar(via_op, via_quad));
        }
    }
    worst
}

fn fourier_gauss_symbol_check(cfg: &RunConfig, rng: &mut ChaCha8Rng) -> f64 {
    // the criterion is agreement within the computed tail bound; draws the
    // evaluator refuses verify nothing and are skipped, but at least one must
    // go through
    let mut worst = 0.0f64;
    let mut verified = 0usize;
    for _ in 0..10 {
        let a2 = rand_complex(rng, 0.8);
        let b = rand_complex(rng, 0.8);
        let op = fourier_gauss(a2, b, cfg.dim, cfg.nmax);
        let xi = rand_cvec(rng, cfg.dim, 0.2);
        let eta = rand_cvec(rng, cfg.dim, 0.2);
        let Ok(sym) = fockop::operator_symbol(&op, &xi, &eta, 1e-3) else { continue };
        verified += 1;
        let want = fourier_gauss_symbol(a2, b, &xi, &eta);
        worst = worst.max(((sym.value - want).norm() - sym.tail_bound).max(0.0));
    }
    if verified == 0 {
        return f64::INFINITY;
    }
    worst
}

fn renormalized_quantization_conjugation(cfg: &RunConfig, rng: &mut ChaCha8Rng) -> f64 {
    let mut worst = 0.0f64;
    for r in 2..=3 {
        for _ in 0..5 {
            let kernel = rand_tensor(rng, cfg.dim, r, 0.6);
            let t = rand_matrix(rng, cfg.dim, 0.8);
            let closed = renormalized_second_quantization(&t, &kernel, cfg.nmax).unwrap();
            let conjugated = renormalize(&second_quantization(&t, cfg.nmax), &kernel).unwrap();
            worst = worst.max(closed.max_rel_residual(&conjugated));
        }
    }
    worst
}

fn renormalized_representation_property(cfg: &RunConfig, rng: &mut ChaCha8Rng) -> f64 {
    let mut worst = 0.0f64;
    for r in 2..=3 {
        let kernel = rand_tensor(rng, cfg.dim, r, 0.6);
        let t = second_quantization(&rand_matrix(rng, cfg.dim, 0.8), cfg.nmax);
        let conj = renormalize(&t, &kernel).unwrap();
        let psi = rand_chaos(rng, cfg.dim, cfg.nmax, cfg.nmax, Rep::Kappa(kernel.clone()));
        let lhs = conj.apply(&psi.to_wick().unwrap()).unwrap();
        let transported = t
            .apply(&ChaosVector::from_coeffs(psi.coeffs().to_vec(), Rep::Wick))
            .unwrap();
        let rhs = ChaosVector::from_coeffs(transported.coeffs().to_vec(), Rep::Kappa(kernel))
            .to_wick()
            .unwrap();
        worst = worst.max(lhs.max_rel_residual(&rhs));
    }
    worst
}

fn scaling_monomial_law(cfg: &RunConfig, rng: &mut ChaCha8Rng) -> f64 {
    let mut worst = 0.0f64;
    let lambda = rand_complex(rng, 0.9);
    let op = scaling(lambda, cfg.dim, cfg.nmax);
    let phi = rand_chaos(rng, cfg.dim, cfg.nmax, cfg.nmax, Rep::Wick);
    let scaled = op.apply(&phi).unwrap().to_monomial().unwrap();
    let mono = phi.to_monomial().unwrap();
    for n in 0..=cfg.nmax {
        let want = mono.coeffs()[n].scale_t(lambda.powu(n as u32));
        worst = worst.max(scaled.coeffs()[n].sub(&want).norm() / want.norm().max(1.0));
    }
    for _ in 0..5 {
        let y = rand_cvec(rng, cfg.dim, 0.8);
        let ly: Vec<C> = y.iter().map(|&v| v * lambda).collect();
        let lhs = op.apply(&phi).unwrap().eval_at(&y).unwrap();
        let rhs = phi.eval_at(&ly).unwrap();
        worst = worst.max(rel_scalar(lhs, rhs));
    }
    worst
}

fn scaling_zero_kernel(cfg: &RunConfig, rng: &mut ChaCha8Rng) -> f64 {
    let b = rand_complex(rng, 0.9);
    let zero_kernel = St::zero(cfg.dim, 2);
    let via_quantization = renormalized_second_quantization(
        &Mat::identity(cfg.dim).scale_t(b),
        &zero_kernel,
        cfg.nmax,
    )
    .unwrap();
    via_quantization.max_rel_residual(&scaling(b, cfg.dim, cfg.nmax))
}

fn fourier_symbol_check(cfg: &RunConfig, rng: &mut ChaCha8Rng) -> f64 {
    let op = fourier_transform(cfg.dim, cfg.nmax);
    let mut worst = 0.0f64;
    let mut verified = 0usize;
    for _ in 0..10 {
        let xi = rand_cvec(rng, cfg.dim, 0.2);
        let eta = rand_cvec(rng, cfg.dim, 0.2);
        // the adjoint factor raises degrees, so the extrapolated tail estimate
        // is generous; refuse only above an absolute guard
        let Ok(sym) = fockop::operator_symbol(&op, &xi, &eta, 1e-2) else { continue };
        verified += 1;
        let want = fourier_symbol(&xi, &eta);
        worst = worst.max(((sym.value - want).norm() - sym.tail_bound).max(0.0));
    }
    if verified == 0 {
        return f64::INFINITY;
    }
    worst
}

fn normal_ordering_operator(cfg: &RunConfig, rng: &mut ChaCha8Rng) -> f64 {
    let d = cfg.dim;
    let nmax = cfg.nmax;
    let theta: FockOperator<C> = renormalization(d, nmax);
    let theta_inv: FockOperator<C> = renormalization_inv(d, nmax);
    let mut worst =
        theta.compose(&theta_inv).max_rel_residual(&FockOperator::identity(d, nmax));
    // on a function given by monomial coefficients, the operator relabels them
    // as wick coefficients
    let mono = rand_chaos(rng, d, nmax, nmax, Rep::Monomial);
    let wick_in = mono.to_wick().unwrap();
    let out = theta.apply(&wick_in).unwrap();
    let relabeled = ChaosVector::from_coeffs(mono.coeffs().to_vec(), Rep::Wick);
    worst = worst.max(out.max_rel_residual(&relabeled));
    // truncated plain exponential goes to the coherent state
    let xi = rand_cvec(rng, d, 0.8);
    let expo = ChaosVector::from_coeffs(
        (0..=nmax)
            .map(|n| St::power(&xi, n).scale(1.0 / crate::symtensor::factorial(n)))
            .collect(),
        Rep::Monomial,
    );
    let out = theta.apply(&expo.to_wick().unwrap()).unwrap();
    worst = worst.max(out.max_rel_residual(&ChaosVector::exp_vector(&xi, nmax)));
    worst
}

fn mehler_adjoint_group_law(cfg: &RunConfig, _rng: &mut ChaCha8Rng) -> f64 {
    let d = cfg.dim;
    let nmax = cfg.nmax;
    let mut worst = fourier_mehler_adjoint(0.0, d, nmax)
        .max_rel_residual(&FockOperator::identity(d, nmax));
    for &t1 in &cfg.theta_grid {
        for &t2 in &cfg.theta_grid {
            let lhs = fourier_mehler_adjoint(t1, d, nmax)
                .compose(&fourier_mehler_adjoint(t2, d, nmax));
            let rhs = fourier_mehler_adjoint(t1 + t2, d, nmax);
            worst = worst.max(lhs.max_rel_residual(&rhs));
        }
    }
    worst
}

fn mehler_adjoint_closed_form(cfg: &RunConfig, rng: &mut ChaCha8Rng) -> f64 {
    let d = cfg.dim;
    let nmax = cfg.nmax;
    let tau = trace_tensor::<C>(d);
    let mut worst = 0.0f64;
    for &theta in &cfg.theta_grid {
        let rot = C::new(0.0, theta).exp();
        let via_quantization = renormalized_second_quantization(
            &Mat::identity(d).scale_t(rot),
            &tau.scale(0.5),
            nmax,
        )
        .unwrap();
        let direct = fourier_mehler_adjoint(theta, d, nmax);
        worst = worst.max(via_quantization.max_rel_residual(&direct));
        // symbol against the closed form
        let xi = rand_cvec(rng, d, 0.25);
        let eta = rand_cvec(rng, d, 0.25);
        if let Ok(sym) = fockop::operator_symbol(&direct, &xi, &eta, 1e-3) {
            let want = fourier_mehler_adjoint_symbol(theta, &xi, &eta);
            worst = worst.max(((sym.value - want).norm() - sym.tail_bound).max(0.0));
        }
    }
    worst
}

fn mehler_adjoint_generator(cfg: &RunConfig, _rng: &mut ChaCha8Rng) -> f64 {
    let d = cfg.dim;
    let nmax = cfg.nmax;
    let deriv = complex_step_derivative(|th| fourier_mehler_adjoint_generic(th, d, nmax), 0.0);
    let want = number_operator::<C>(d, nmax)
        .add(&gross_laplacian(d, nmax).scale(0.5))
        .scale_t(C::new(0.0, 1.0));
    deriv.max_rel_residual(&want)
}

fn renormalized_number_identity(cfg: &RunConfig, rng: &mut ChaCha8Rng) -> f64 {
    let d = cfg.dim;
    let nmax = cfg.nmax;
    // trace kernel collapses to the number operator
    let tau = trace_tensor::<C>(d);
    let mut worst = renormalized_number(&tau, nmax)
        .unwrap()
        .max_rel_residual(&number_operator(d, nmax));
    // b N_((1-a/b) tau) = a Laplacian + b N on every configured pair
    for (a, b) in cfg.ab_pairs() {
        if b == C::new(0.0, 0.0) {
            continue;
        }
        let kernel = tau.scale_t(C::new(1.0, 0.0) - a / b);
        let lhs = renormalized_number(&kernel, nmax).unwrap().scale_t(b);
        worst = worst.max(lhs.max_rel_residual(&group_generator(a, b, d, nmax)));
    }
    // the formula generates the associated scaling flow
    for r in 2..=3 {
        let kernel = rand_tensor(rng, d, r, 0.4);
        let deriv = complex_step_derivative(
            |th| renormalized_scaling_flow(C::new(1.0, 0.0), th, &kernel, nmax),
            0.0,
        );
        worst = worst.max(deriv.max_rel_residual(&renormalized_number(&kernel, nmax).unwrap()));
    }
    worst
}

fn renormalized_flow_derivative(cfg: &RunConfig, rng: &mut ChaCha8Rng) -> f64 {
    let d = cfg.dim;
    let nmax = cfg.nmax;
    let mut worst = 0.0f64;
    for r in 2..=3 {
        let kernel = rand_tensor(rng, d, r, 0.5);
        let bmat = rand_matrix(rng, d, 0.5);
        let deriv = complex_step_derivative(
            |t| {
                let flow = lift_matrix::<Bicomplex>(&bmat).scale_t(t).expm();
                renormalized_second_quantization(&flow, &lift_tensor(&kernel), nmax).unwrap()
            },
            0.0,
        );
        let tau = trace_tensor::<C>(d);
        let gamma2 = St::derivation_pow(&bmat.transpose(), &tau);
        let gammar = St::derivation_pow(&bmat.transpose(), &kernel);
        let want = diff_second_quantization(&bmat, nmax)
            .add(&integral_kernel(&KernelSpec::new(0, 2, gamma2).unwrap(), nmax).scale(0.5))
            .add(&integral_kernel(&KernelSpec::new(0, r, gammar).unwrap(), nmax).scale(-0.5));
        worst = worst.max(deriv.max_rel_residual(&want));
    }
    worst
}

fn quantization_flow_generators(cfg: &RunConfig, rng: &mut ChaCha8Rng) -> f64 {
    let d = cfg.dim;
    let nmax = cfg.nmax;
    let bmat = rand_matrix(rng, d, 0.6);
    let deriv = complex_step_derivative(|t| second_quantization_flow(&bmat, t, nmax), 0.0);
    let mut worst = deriv.max_rel_residual(&diff_second_quantization(&bmat, nmax));
    // scaling flow lambda(t) = e^(ct): generator c (N + Laplacian), the
    // zero-kernel case of the renormalized number identity
    let c_coeff = rand_complex(rng, 0.8);
    let deriv = complex_step_derivative(
        |t| {
            let lam = (Bicomplex::lift(c_coeff) * t).exp();
            crate::transforms::scaling_generic(lam, d, nmax)
        },
        0.0,
    );
    let want = number_operator::<C>(d, nmax)
        .add(&gross_laplacian(d, nmax))
        .scale_t(c_coeff);
    worst = worst.max(deriv.max_rel_residual(&want));
    worst
}

fn quadrature_exactness(cfg: &RunConfig, rng: &mut ChaCha8Rng) -> f64 {
    // random polynomial (monomial coefficients) against the closed-form
    // Gaussian moments: E[x^alpha] = prod (alpha_i - 1)!! for even alpha
    let d = cfg.dim.min(2);
    let grid = gh_grid(cfg.quad_order, d).unwrap();
    let mut worst = 0.0f64;
    for _ in 0..5 {
        let top = (2 * cfg.quad_order - 1).min(10);
        let mono = rand_chaos(rng, d, top, top, Rep::Monomial);
        let got = grid.integrate(|x| {
            let arg: Vec<C> = x.iter().map(|&v| C::new(v, 0.0)).collect();
            mono.eval_at(&arg).unwrap()
        });
        let mut want = C::new(0.0, 0.0);
        for n in 0..=top {
            for (alpha, coeff) in crate::symtensor::basis(d, n)
                .iter()
                .zip(mono.coeffs()[n].coeffs())
            {
                if alpha.entries().iter().any(|&a| a % 2 == 1) {
                    continue;
                }
                let moment: f64 = alpha
                    .entries()
                    .iter()
                    .map(|&a| (1..a).step_by(2).map(|k| k as f64).product::<f64>())
                    .product();
                want += coeff.scale(alpha.multinomial_weight() * moment);
            }
        }
        worst = worst.max(rel_scalar(got, want));
    }
    worst
}

fn quadrature_root_independence(cfg: &RunConfig, rng: &mut ChaCha8Rng) -> f64 {
    let d = cfg.dim;
    let grid = gh_grid(cfg.quad_order, d).unwrap();
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let phi = rand_chaos(rng, d, 6, 6, Rep::Wick);
        let a = rand_complex(rng, 1.0);
        let b = rand_complex(rng, 1.0);
        let y = rand_cvec(rng, d, 0.8);
        let plus = fourier_gauss_oracle(&phi, a, b, &y, &grid).unwrap();
        let minus = fourier_gauss_oracle(&phi, -a, b, &y, &grid).unwrap();
        worst = worst.max(rel_scalar(plus, minus));
    }
    worst
}
