//! Operator-algebra checks: the convolution homomorphism, Wick multiplication
//! duality, kernel uniqueness, adjoints, translations and the Laplacian
//! against a finite-difference oracle.

use nalgebra::DMatrix;
use rand_chacha::ChaCha8Rng;

use super::{
    dot, rand_chaos, rand_complex, rand_cvec, rand_matrix, rand_tensor, rel_scalar, CheckCase,
    RunConfig, TolKind,
};
use crate::chaos::{ChaosVector, Rep};
use crate::fockop::{
    self, convolution_operator, exp_convolution, integral_kernel, number_operator,
    second_quantization, translation, wick_exp, wick_mult_operator, wick_product, FockOperator,
    KernelSpec,
};
use crate::symtensor::{basis, basis_size, factorial, trace_tensor, SymTensor};
use num_complex::Complex64 as C;

type St = SymTensor<C>;

pub fn cases() -> Vec<CheckCase> {
    vec![
        CheckCase {
            name: "convolution-homomorphism",
            identity: "C_(phi <> psi) = C_phi . C_psi",
            tol: TolKind::Fixed(1e-11),
            run: convolution_homomorphism,
        },
        CheckCase {
            name: "exp-convolution-exponential",
            identity: "exp(C_phi) = C_(wick_exp(phi))",
            tol: TolKind::Fixed(1e-11),
            run: exp_convolution_exponential,
        },
        CheckCase {
            name: "convolution-eigen-relation",
            identity: "C_phi exp_vector(xi) = S(phi)(xi) exp_vector(xi) on safe degrees",
            tol: TolKind::Fixed(1e-11),
            run: convolution_eigen_relation,
        },
        CheckCase {
            name: "wick-mult-two-routes",
            identity: "wick_mult_operator(phi) psi = wick_product(phi, psi)",
            tol: TolKind::Fixed(1e-12),
            run: wick_mult_two_routes,
        },
        CheckCase {
            name: "mult-convolution-duality",
            identity: "adjoint(M_phi) = C_phi and adjoint(Xi_(0,m)) = Xi_(m,0)",
            tol: TolKind::Exact,
            run: mult_convolution_duality,
        },
        CheckCase {
            name: "adjoint-involution",
            identity: "adjoint is an involution, reverses composition and transposes the duality",
            tol: TolKind::Exact,
            run: adjoint_involution,
        },
        CheckCase {
            name: "number-operator-three-ways",
            identity: "N = dGamma(Id) = Xi_(1,1)(tau) blockwise",
            tol: TolKind::Fixed(1e-14),
            run: number_three_ways,
        },
        CheckCase {
            name: "second-quantization-functor",
            identity: "Gamma(S) Gamma(T) = Gamma(S T); Gamma(b Id) scales degree n by b^n",
            tol: TolKind::Exact,
            run: second_quantization_functor,
        },
        CheckCase {
            name: "convolution-injectivity",
            identity: "adjoint(C_phi) applied to the vacuum recovers phi",
            tol: TolKind::Exact,
            run: convolution_injectivity,
        },
        CheckCase {
            name: "kernel-recovery",
            identity: "the kernel of an integral kernel operator is recoverable from its blocks",
            tol: TolKind::Oracle,
            run: kernel_recovery,
        },
        CheckCase {
            name: "translation-shift",
            identity: "(translation(y) phi)(x) = phi(x + y) on polynomials",
            tol: TolKind::Fixed(1e-10),
            run: translation_shift,
        },
        CheckCase {
            name: "translation-eigen-relation",
            identity: "translation(y) exp_vector(xi) = truncated exp(dot(y,xi)) exp_vector(xi)",
            tol: TolKind::Exact,
            run: translation_eigen,
        },
        CheckCase {
            name: "laplacian-finite-difference",
            identity: "the degree-lowering Laplacian matches the pointwise second-derivative sum",
            tol: TolKind::Fixed(1e-6),
            run: laplacian_finite_difference,
        },
        CheckCase {
            name: "wick-exp-homomorphism",
            identity: "wick_exp(phi + psi) = wick_exp(phi) <> wick_exp(psi)",
            tol: TolKind::Fixed(1e-11),
            run: wick_exp_homomorphism,
        },
        CheckCase {
            name: "s-transform-product",
            identity: "S(phi <> psi) = S(phi) S(psi) on overflow-safe degrees",
            tol: TolKind::Fixed(1e-11),
            run: s_transform_product,
        },
        CheckCase {
            name: "exp-convolution-group",
            identity: "exp(C_phi) exp(C_psi) = exp(C_(phi+psi))",
            tol: TolKind::Fixed(1e-11),
            run: exp_convolution_group,
        },
        CheckCase {
            name: "symbol-closed-forms",
            identity: "symbols of Id and Gamma(T) match exp(dot(xi,eta)) and exp(dot(T xi, eta))",
            tol: TolKind::Oracle,
            run: symbol_closed_forms,
        },
    ]
}

fn convolution_homomorphism(cfg: &RunConfig, rng: &mut ChaCha8Rng) -> f64 {
    let mut worst = 0.0f64;
    for _ in 0..5 {
        let phi = rand_chaos(rng, cfg.dim, cfg.nmax, 3, Rep::Wick);
        let psi = rand_chaos(rng, cfg.dim, cfg.nmax, 3, Rep::Wick);
        let prod = wick_product(&phi, &psi).unwrap();
        let lhs = convolution_operator(&prod).unwrap();
        let rhs =
            convolution_operator(&phi).unwrap().compose(&convolution_operator(&psi).unwrap());
        worst = worst.max(lhs.max_rel_residual(&rhs));
    }
    worst
}

fn exp_convolution_exponential(cfg: &RunConfig, rng: &mut ChaCha8Rng) -> f64 {
    let mut worst = 0.0f64;
    for _ in 0..5 {
        let phi = rand_chaos(rng, cfg.dim, cfg.nmax, 3, Rep::Wick);
        let lhs = exp_convolution(&phi).unwrap();
        let rhs = convolution_operator(&wick_exp(&phi).unwrap()).unwrap();
        worst = worst.max(lhs.max_rel_residual(&rhs));
    }
    worst
}

fn convolution_eigen_relation(cfg: &RunConfig, rng: &mut ChaCha8Rng) -> f64 {
    let mut worst = 0.0f64;
    let top = 3;
    for _ in 0..10 {
        let phi = rand_chaos(rng, cfg.dim, cfg.nmax, top, Rep::Wick);
        let op = convolution_operator(&phi).unwrap();
        let xi = rand_cvec(rng, cfg.dim, 0.8);
        let ev = ChaosVector::exp_vector(&xi, cfg.nmax);
        let out = op.apply(&ev).unwrap();
        let s = phi.s_transform(&xi).unwrap();
        for n in 0..=(cfg.nmax - top) {
            let want = ev.coeffs()[n].scale_t(s);
            worst = worst
                .max(out.coeffs()[n].sub(&want).norm() / want.norm().max(1.0));
        }
    }
    worst
}

fn wick_mult_two_routes(cfg: &RunConfig, rng: &mut ChaCha8Rng) -> f64 {
    let mut worst = 0.0f64;
    for _ in 0..5 {
        let phi = rand_chaos(rng, cfg.dim, cfg.nmax, 3, Rep::Wick);
        let psi = rand_chaos(rng, cfg.dim, cfg.nmax, cfg.nmax, Rep::Wick);
        let lhs = wick_mult_operator(&phi).unwrap().apply(&psi).unwrap();
        let rhs = wick_product(&phi, &psi).unwrap();
        worst = worst.max(lhs.max_rel_residual(&rhs));
    }
    worst
}

fn mult_convolution_duality(cfg: &RunConfig, rng: &mut ChaCha8Rng) -> f64 {
    let mut worst = 0.0f64;
    for _ in 0..5 {
        let phi = rand_chaos(rng, cfg.dim, cfg.nmax, 3, Rep::Wick);
        let m_op = wick_mult_operator(&phi).unwrap();
        let c_op = convolution_operator(&phi).unwrap();
        worst = worst.max(m_op.adjoint().max_rel_residual(&c_op));
    }
    for m in 1..=3 {
        let kappa = rand_tensor(rng, cfg.dim, m, 1.0);
        let lower = integral_kernel(&KernelSpec::new(0, m, kappa.clone()).unwrap(), cfg.nmax);
        let raise = integral_kernel(&KernelSpec::new(m, 0, kappa).unwrap(), cfg.nmax);
        worst = worst.max(lower.adjoint().max_rel_residual(&raise));
    }
    worst
}

fn adjoint_involution(cfg: &RunConfig, rng: &mut ChaCha8Rng) -> f64 {
    let mut worst = 0.0f64;
    for _ in 0..3 {
        let phi = rand_chaos(rng, cfg.dim, cfg.nmax, 2, Rep::Wick);
        let a = wick_mult_operator(&phi).unwrap();
        let b = second_quantization(&rand_matrix(rng, cfg.dim, 1.0), cfg.nmax);
        worst = worst.max(a.adjoint().adjoint().max_rel_residual(&a));
        // composition reversal
        let lhs = a.compose(&b).adjoint();
        let rhs = b.adjoint().compose(&a.adjoint());
        worst = worst.max(lhs.max_rel_residual(&rhs));
        // duality transposition on random pairs
        let f = rand_chaos(rng, cfg.dim, cfg.nmax, cfg.nmax, Rep::Wick);
        let g = rand_chaos(rng, cfg.dim, cfg.nmax, cfg.nmax, Rep::Wick);
        let lhs = g.dual_pair(&a.adjoint().apply(&f).unwrap()).unwrap();
        let rhs = f.dual_pair(&a.apply(&g).unwrap()).unwrap();
        worst = worst.max(rel_scalar(lhs, rhs));
    }
    worst
}

fn number_three_ways(cfg: &RunConfig, _rng: &mut ChaCha8Rng) -> f64 {
    let direct = number_operator::<C>(cfg.dim, cfg.nmax);
    let lifted = fockop::diff_second_quantization(
        &crate::linalg::Mat::identity(cfg.dim),
        cfg.nmax,
    );
    let spec = KernelSpec::new(1, 1, trace_tensor::<C>(cfg.dim)).unwrap();
    let kernel = integral_kernel(&spec, cfg.nmax);
    direct.max_rel_residual(&lifted).max(direct.max_rel_residual(&kernel))
}

fn second_quantization_functor(cfg: &RunConfig, rng: &mut ChaCha8Rng) -> f64 {
    let mut worst = 0.0f64;
    for _ in 0..5 {
        let s = rand_matrix(rng, cfg.dim, 1.0);
        let t = rand_matrix(rng, cfg.dim, 1.0);
        let lhs = second_quantization(&s, cfg.nmax).compose(&second_quantization(&t, cfg.nmax));
        let rhs = second_quantization(&s.matmul(&t), cfg.nmax);
        worst = worst.max(lhs.max_rel_residual(&rhs));
    }
    // scalar second quantization multiplies degree n by b^n
    let b = rand_complex(rng, 1.0);
    let op = second_quantization(
        &crate::linalg::Mat::identity(cfg.dim).scale_t(b),
        cfg.nmax,
    );
    let phi = rand_chaos(rng, cfg.dim, cfg.nmax, cfg.nmax, Rep::Wick);
    let out = op.apply(&phi).unwrap();
    for n in 0..=cfg.nmax {
        let want = phi.coeffs()[n].scale_t(b.powu(n as u32));
        worst = worst.max(out.coeffs()[n].sub(&want).norm() / want.norm().max(1.0));
    }
    worst
}

fn convolution_injectivity(cfg: &RunConfig, rng: &mut ChaCha8Rng) -> f64 {
    let mut worst = 0.0f64;
    for _ in 0..5 {
        let phi = rand_chaos(rng, cfg.dim, cfg.nmax, cfg.nmax, Rep::Wick);
        let vacuum = ChaosVector::exp_vector(&vec![C::new(0.0, 0.0); cfg.dim], cfg.nmax);
        let recovered =
            convolution_operator(&phi).unwrap().adjoint().apply(&vacuum).unwrap();
        worst = worst.max(recovered.max_rel_residual(&phi));
    }
    worst
}

/// Reconstruct a random fully symmetric kernel from the lowest block of its
/// integral kernel operator by solving the linear probe system
/// `pair(kappa, power(eta,l) (x) power(xi,m)) = probes`, and compare.
fn kernel_recovery(cfg: &RunConfig, rng: &mut ChaCha8Rng) -> f64 {
    let d = cfg.dim;
    let mut worst = 0.0f64;
    for (l, m) in [(0usize, 2usize), (1, 1), (2, 1)] {
        let kappa = rand_tensor(rng, d, l + m, 1.0);
        let op = integral_kernel(&KernelSpec::new(l, m, kappa.clone()).unwrap(), cfg.nmax);
        let block = op.block(l, m).expect("lowest block present");
        let size = basis_size(d, l + m);
        let probes = size + 4;
        let mut mat = DMatrix::<C>::zeros(probes, size);
        let mut rhs = nalgebra::DVector::<C>::zeros(probes);
        let kernel_basis = basis(d, l + m);
        for row in 0..probes {
            let xi = rand_cvec(rng, d, 1.0);
            let eta = rand_cvec(rng, d, 1.0);
            // block applied to power(xi, m), paired with power(eta, l), equals
            // m! * pair(kappa, power(eta,l) (x) power(xi,m))
            let image = St::from_coeffs(d, l, block.apply(St::power(&xi, m).coeffs()));
            rhs[row] = image.pair(&St::power(&eta, l)).unwrap().scale(1.0 / factorial(m));
            let mixed = St::power(&eta, l).sym_product(&St::power(&xi, m)).unwrap();
            for (col, alpha) in kernel_basis.iter().enumerate() {
                mat[(row, col)] =
                    mixed.get(alpha).scale(alpha.multinomial_weight());
            }
        }
        let solved = mat
            .clone()
            .svd(true, true)
            .solve(&rhs, 1e-12)
            .expect("probe system is overdetermined and well conditioned");
        let recovered = St::from_coeffs(d, l + m, solved.iter().copied().collect());
        worst = worst.max(recovered.sub(&kappa).norm() / kappa.norm().max(1.0));
    }
    worst
}

fn translation_shift(cfg: &RunConfig, rng: &mut ChaCha8Rng) -> f64 {
    let mut worst = 0.0f64;
    for _ in 0..5 {
        let y = rand_cvec(rng, cfg.dim, 0.8);
        let op = translation(&St::power(&y, 1), cfg.nmax).unwrap();
        let phi = rand_chaos(rng, cfg.dim, cfg.nmax, cfg.nmax, Rep::Wick);
        let shifted = op.apply(&phi).unwrap();
        for _ in 0..5 {
            let x = rand_cvec(rng, cfg.dim, 0.8);
            let xy: Vec<C> = x.iter().zip(&y).map(|(&a, &b)| a + b).collect();
            let lhs = shifted.eval_at(&x).unwrap();
            let rhs = phi.eval_at(&xy).unwrap();
            worst = worst.max(rel_scalar(lhs, rhs));
        }
    }
    worst
}

fn translation_eigen(cfg: &RunConfig, rng: &mut ChaCha8Rng) -> f64 {
    let mut worst = 0.0f64;
    for _ in 0..10 {
        let y = rand_cvec(rng, cfg.dim, 0.8);
        let xi = rand_cvec(rng, cfg.dim, 0.8);
        let op = translation(&St::power(&y, 1), cfg.nmax).unwrap();
        let ev = ChaosVector::exp_vector(&xi, cfg.nmax);
        let out = op.apply(&ev).unwrap();
        let z = dot(&y, &xi);
        // the compressed operator sees only the first nmax - n powers of D_y
        // at degree n, so the eigenvalue is the matching truncated exponential
        for n in 0..=cfg.nmax {
            let mut lam = C::new(0.0, 0.0);
            for k in 0..=(cfg.nmax - n) {
                lam += z.powu(k as u32).scale(1.0 / factorial(k));
            }
            let want = ev.coeffs()[n].scale_t(lam);
            worst = worst.max(out.coeffs()[n].sub(&want).norm() / want.norm().max(1.0));
        }
    }
    worst
}

fn laplacian_finite_difference(cfg: &RunConfig, rng: &mut ChaCha8Rng) -> f64 {
    let lap = fockop::gross_laplacian::<C>(cfg.dim, cfg.nmax);
    let mut worst = 0.0f64;
    let h = 1e-4;
    for _ in 0..5 {
        let phi = rand_chaos(rng, cfg.dim, cfg.nmax, 6, Rep::Wick);
        let image = lap.apply(&phi).unwrap();
        for _ in 0..4 {
            let x = rand_cvec(rng, cfg.dim, 0.8);
            let lhs = image.eval_at(&x).unwrap();
            let mut rhs = C::new(0.0, 0.0);
            for i in 0..cfg.dim {
                let mut plus = x.clone();
                let mut minus = x.clone();
                plus[i] += C::new(h, 0.0);
                minus[i] -= C::new(h, 0.0);
                rhs += (phi.eval_at(&plus).unwrap() - phi.eval_at(&x).unwrap().scale(2.0)
                    + phi.eval_at(&minus).unwrap())
                .scale(1.0 / (h * h));
            }
            worst = worst.max(rel_scalar(lhs, rhs));
        }
    }
    worst
}

fn wick_exp_homomorphism(cfg: &RunConfig, rng: &mut ChaCha8Rng) -> f64 {
    let mut worst = 0.0f64;
    for _ in 0..5 {
        let phi = rand_chaos(rng, cfg.dim, cfg.nmax, 3, Rep::Wick);
        let psi = rand_chaos(rng, cfg.dim, cfg.nmax, 2, Rep::Wick);
        let lhs = wick_exp(&phi.add(&psi)).unwrap();
        let rhs = wick_product(&wick_exp(&phi).unwrap(), &wick_exp(&psi).unwrap()).unwrap();
        worst = worst.max(lhs.max_rel_residual(&rhs));
    }
    worst
}

fn s_transform_product(cfg: &RunConfig, rng: &mut ChaCha8Rng) -> f64 {
    let mut worst = 0.0f64;
    for _ in 0..10 {
        let top = cfg.nmax / 2;
        let phi = rand_chaos(rng, cfg.dim, cfg.nmax, top, Rep::Wick);
        let psi = rand_chaos(rng, cfg.dim, cfg.nmax, cfg.nmax - top, Rep::Wick);
        let xi = rand_cvec(rng, cfg.dim, 0.8);
        let lhs = wick_product(&phi, &psi).unwrap().s_transform(&xi).unwrap();
        let rhs = phi.s_transform(&xi).unwrap() * psi.s_transform(&xi).unwrap();
        worst = worst.max(rel_scalar(lhs, rhs));
    }
    worst
}

fn exp_convolution_group(cfg: &RunConfig, rng: &mut ChaCha8Rng) -> f64 {
    let mut worst = 0.0f64;
    for _ in 0..5 {
        let phi = rand_chaos(rng, cfg.dim, cfg.nmax, 3, Rep::Wick);
        let psi = rand_chaos(rng, cfg.dim, cfg.nmax, 2, Rep::Wick);
        let lhs = exp_convolution(&phi).unwrap().compose(&exp_convolution(&psi).unwrap());
        let rhs = exp_convolution(&phi.add(&psi)).unwrap();
        worst = worst.max(lhs.max_rel_residual(&rhs));
    }
    worst
}

fn symbol_closed_forms(cfg: &RunConfig, rng: &mut ChaCha8Rng) -> f64 {
    // residual: how far the symbol strays beyond its own tail bound;
    // refused evaluations verify nothing and are skipped
    let mut worst = 0.0f64;
    let mut verified = 0usize;
    for _ in 0..5 {
        let xi = rand_cvec(rng, cfg.dim, 0.3);
        let eta = rand_cvec(rng, cfg.dim, 0.3);
        let id = FockOperator::identity(cfg.dim, cfg.nmax);
        if let Ok(sym) = fockop::operator_symbol(&id, &xi, &eta, 1e-3) {
            verified += 1;
            let want = dot(&xi, &eta).exp();
            worst = worst.max((sym.value - want).norm() - sym.tail_bound);
        }

        let t = rand_matrix(rng, cfg.dim, 0.8);
        let gamma = second_quantization(&t, cfg.nmax);
        if let Ok(sym) = fockop::operator_symbol(&gamma, &xi, &eta, 1e-3) {
            verified += 1;
            let want = dot(&t.apply(&xi), &eta).exp();
            worst = worst.max((sym.value - want).norm() - sym.tail_bound);
        }
    }
    if verified == 0 {
        return f64::INFINITY;
    }
    worst.max(0.0)
}
