//! Chaos-expansion checks: Hermite consistency, normal ordering against the
//! combinatorial expansion, kappa-representation round trips and seminorms.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{dot, rand_chaos, rand_cvec, rand_tensor, rel_scalar, CheckCase, RunConfig, TolKind};
use crate::chaos::{
    hermite_he, renormalized_power_terms, ChaosVector, Rep, SeminormConfig,
};
use crate::symtensor::{basis, factorial, falling_ratio, sym_power, trace_tensor, SymTensor};
use num_complex::Complex64 as C;

type St = SymTensor<C>;

pub fn cases() -> Vec<CheckCase> {
    vec![
        CheckCase {
            name: "hermite-evaluation",
            identity: "wick basis vectors evaluate to probabilists' Hermite polynomials",
            tol: TolKind::Fixed(1e-9),
            run: hermite_evaluation,
        },
        CheckCase {
            name: "hermite-product-evaluation",
            identity: "multivariate wick components evaluate to products of Hermite polynomials",
            tol: TolKind::Fixed(1e-9),
            run: hermite_product_evaluation,
        },
        CheckCase {
            name: "normal-ordering-ksum",
            identity: "operator-exponential normal ordering equals the combinatorial k-sum over trace powers",
            tol: TolKind::Fixed(1e-12),
            run: normal_ordering_ksum,
        },
        CheckCase {
            name: "generalized-ordering-two-routes",
            identity: "kernel-exponential route equals the renormalized-power expansion route",
            tol: TolKind::Fixed(1e-12),
            run: generalized_ordering_two_routes,
        },
        CheckCase {
            name: "kappa-round-trip",
            identity: "to_kappa . to_wick = id and to_wick . to_kappa = id",
            tol: TolKind::Fixed(1e-12),
            run: kappa_round_trip,
        },
        CheckCase {
            name: "kappa-special-kernels",
            identity: "trace kernel fixes coefficients, zero kernel relabels monomials",
            tol: TolKind::Exact,
            run: kappa_special_kernels,
        },
        CheckCase {
            name: "exp-vector-duality",
            identity: "dual_pair(exp_vector(xi), exp_vector(eta)) is the truncated exponential series",
            tol: TolKind::Exact,
            run: exp_vector_duality,
        },
        CheckCase {
            name: "base-point-duality",
            identity: "dual_pair(exp_vector(y), psi) = sum_n pair(power(y,n), f_n)",
            tol: TolKind::Exact,
            run: base_point_duality,
        },
        CheckCase {
            name: "duality-bilinear",
            identity: "dual_pair is bilinear",
            tol: TolKind::Exact,
            run: duality_bilinear,
        },
        CheckCase {
            name: "seminorm-triangle",
            identity: "seminorm(phi + psi) <= seminorm(phi) + seminorm(psi)",
            tol: TolKind::Exact,
            run: seminorm_triangle,
        },
        CheckCase {
            name: "seminorm-monotone",
            identity: "seminorm is monotone in the weight exponent p",
            tol: TolKind::Exact,
            run: seminorm_monotone,
        },
    ]
}

fn hermite_evaluation(_cfg: &RunConfig, rng: &mut ChaCha8Rng) -> f64 {
    let mut worst = 0.0f64;
    for n in 0..=8usize {
        let mut v = ChaosVector::zero(1, n.max(1), Rep::Wick);
        v.coeffs_mut()[n] = St::power(&[C::new(1.0, 0.0)], n);
        for _ in 0..20 {
            let x = C::new(rng.gen_range(-2.0..2.0), 0.0);
            let got = v.eval_at(&[x]).unwrap();
            let want = hermite_he(n, x);
            worst = worst.max((got - want).norm() / want.norm().max(1.0));
        }
    }
    worst
}

fn hermite_product_evaluation(_cfg: &RunConfig, rng: &mut ChaCha8Rng) -> f64 {
    let mut worst = 0.0f64;
    for d in 1..=3usize {
        for n in 0..=(if d == 3 { 6 } else { 8 }) {
            let f = rand_tensor(rng, d, n, 1.0);
            let mut v = ChaosVector::zero(d, n.max(1), Rep::Wick);
            v.coeffs_mut()[n] = f.clone();
            let x = rand_cvec(rng, d, 1.5);
            let got = v.eval_at(&x).unwrap();
            let mut want = C::new(0.0, 0.0);
            for (alpha, coeff) in basis(d, n).iter().zip(f.coeffs()) {
                let prod: C = alpha
                    .entries()
                    .iter()
                    .zip(&x)
                    .map(|(&a, &xi)| hermite_he(a, xi))
                    .product();
                want += coeff.scale(alpha.multinomial_weight()) * prod;
            }
            worst = worst.max((got - want).norm() / want.norm().max(1.0));
        }
    }
    worst
}

/// Wick coefficients of a monomial vector, assembled purely from the
/// combinatorial expansion of plain powers over normally ordered ones
/// (weights `n!/((n-2k)! k!) (1/2)^k` on trace powers); and the reverse
/// direction with the alternating weights. No operator exponential involved.
fn ksum_monomial_to_wick(mono: &ChaosVector) -> ChaosVector {
    let d = mono.dim();
    let tau = trace_tensor::<C>(d);
    let mut out = ChaosVector::zero(d, mono.nmax(), Rep::Wick);
    for n in 0..=mono.nmax() {
        if mono.coeffs()[n].is_zero() {
            continue;
        }
        for k in 0..=(n / 2) {
            let j = n - 2 * k;
            let weight = falling_ratio(n, j) / factorial(k) * 0.5f64.powi(k as i32);
            let contracted =
                St::right_contract(&sym_power(&tau, k), &mono.coeffs()[n]).unwrap();
            out.coeffs_mut()[j] = out.coeffs()[j].add(&contracted.scale(weight));
        }
    }
    out
}

fn ksum_wick_to_monomial(wick: &ChaosVector) -> ChaosVector {
    let d = wick.dim();
    let tau = trace_tensor::<C>(d);
    let mut out = ChaosVector::zero(d, wick.nmax(), Rep::Monomial);
    for n in 0..=wick.nmax() {
        if wick.coeffs()[n].is_zero() {
            continue;
        }
        for term in renormalized_power_terms(&tau, n).unwrap() {
            let contracted =
                St::right_contract(&term.kernel_power, &wick.coeffs()[n]).unwrap();
            out.coeffs_mut()[term.degree] =
                out.coeffs()[term.degree].add(&contracted.scale(term.weight));
        }
    }
    out
}

fn normal_ordering_ksum(_cfg: &RunConfig, rng: &mut ChaCha8Rng) -> f64 {
    let mut worst = 0.0f64;
    for d in 1..=3usize {
        let nmax = 8;
        let mono = rand_chaos(rng, d, nmax, nmax, Rep::Monomial);
        let via_op = mono.to_wick().unwrap();
        let via_ksum = ksum_monomial_to_wick(&mono);
        worst = worst.max(via_op.max_rel_residual(&via_ksum));

        let wick = rand_chaos(rng, d, nmax, nmax, Rep::Wick);
        let back_op = wick.to_monomial().unwrap();
        let back_ksum = ksum_wick_to_monomial(&wick);
        worst = worst.max(back_op.max_rel_residual(&back_ksum));
    }
    worst
}

fn generalized_ordering_two_routes(cfg: &RunConfig, rng: &mut ChaCha8Rng) -> f64 {
    let mut worst = 0.0f64;
    let nmax = cfg.nmax.min(8);
    for r in 1..=3usize {
        for _ in 0..20 {
            let kernel = rand_tensor(rng, cfg.dim, r, 0.7);
            let psi = rand_chaos(rng, cfg.dim, nmax, nmax, Rep::Kappa(kernel));
            let via_ops = psi.to_wick().unwrap();
            let via_expansion = psi.to_wick_by_expansion().unwrap();
            worst = worst.max(via_ops.max_rel_residual(&via_expansion));
        }
    }
    worst
}

fn kappa_round_trip(cfg: &RunConfig, rng: &mut ChaCha8Rng) -> f64 {
    let mut worst = 0.0f64;
    let nmax = cfg.nmax.min(8);
    for r in 1..=3usize {
        for _ in 0..5 {
            let kernel = rand_tensor(rng, cfg.dim, r, 0.7);
            let psi = rand_chaos(rng, cfg.dim, nmax, nmax, Rep::Kappa(kernel.clone()));
            let round = psi.to_wick().unwrap().to_kappa(&kernel).unwrap();
            worst = worst.max(round.max_rel_residual(&psi));
            let phi = rand_chaos(rng, cfg.dim, nmax, nmax, Rep::Wick);
            let round = phi.to_kappa(&kernel).unwrap().to_wick().unwrap();
            worst = worst.max(round.max_rel_residual(&phi));
        }
    }
    worst
}

fn kappa_special_kernels(cfg: &RunConfig, rng: &mut ChaCha8Rng) -> f64 {
    let d = cfg.dim;
    let nmax = cfg.nmax.min(8);
    let mut worst = 0.0f64;
    // trace kernel: coefficients already are wick coefficients
    let tau = trace_tensor::<C>(d);
    let psi = rand_chaos(rng, d, nmax, nmax, Rep::Kappa(tau));
    let wick = psi.to_wick().unwrap();
    let relabeled = ChaosVector::from_coeffs(psi.coeffs().to_vec(), Rep::Wick);
    worst = worst.max(wick.max_rel_residual(&relabeled));
    // zero kernel: coefficients are monomial coefficients
    let zero_kernel = St::zero(d, 2);
    let psi = rand_chaos(rng, d, nmax, nmax, Rep::Kappa(zero_kernel));
    let wick = psi.to_wick().unwrap();
    let relabeled = ChaosVector::from_coeffs(psi.coeffs().to_vec(), Rep::Monomial);
    worst = worst.max(wick.max_rel_residual(&relabeled.to_wick().unwrap()));
    worst
}

fn exp_vector_duality(cfg: &RunConfig, rng: &mut ChaCha8Rng) -> f64 {
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let xi = rand_cvec(rng, cfg.dim, 0.8);
        let eta = rand_cvec(rng, cfg.dim, 0.8);
        let lhs = ChaosVector::exp_vector(&xi, cfg.nmax)
            .dual_pair(&ChaosVector::exp_vector(&eta, cfg.nmax))
            .unwrap();
        let z = dot(&xi, &eta);
        let mut series = C::new(0.0, 0.0);
        for n in 0..=cfg.nmax {
            series += z.powu(n as u32).scale(1.0 / factorial(n));
        }
        worst = worst.max(rel_scalar(lhs, series));
        // S-transform of an exponential vector is the same series
        let s = ChaosVector::exp_vector(&eta, cfg.nmax).s_transform(&xi).unwrap();
        worst = worst.max(rel_scalar(s, series));
    }
    worst
}

fn base_point_duality(cfg: &RunConfig, rng: &mut ChaCha8Rng) -> f64 {
    let mut worst = 0.0f64;
    for _ in 0..10 {
        let y = rand_cvec(rng, cfg.dim, 0.8);
        let psi = rand_chaos(rng, cfg.dim, cfg.nmax, cfg.nmax, Rep::Wick);
        let lhs = ChaosVector::exp_vector(&y, cfg.nmax).dual_pair(&psi).unwrap();
        let mut rhs = C::new(0.0, 0.0);
        for n in 0..=cfg.nmax {
            rhs += St::power(&y, n).pair(&psi.coeffs()[n]).unwrap();
        }
        worst = worst.max(rel_scalar(lhs, rhs));
    }
    worst
}

fn duality_bilinear(cfg: &RunConfig, rng: &mut ChaCha8Rng) -> f64 {
    let mut worst = 0.0f64;
    for _ in 0..10 {
        let a = rand_chaos(rng, cfg.dim, cfg.nmax, cfg.nmax, Rep::Wick);
        let b = rand_chaos(rng, cfg.dim, cfg.nmax, cfg.nmax, Rep::Wick);
        let g = rand_chaos(rng, cfg.dim, cfg.nmax, cfg.nmax, Rep::Wick);
        let s = super::rand_complex(rng, 1.0);
        let lhs = a.scale_t(s).add(&b).dual_pair(&g).unwrap();
        let rhs = s * a.dual_pair(&g).unwrap() + b.dual_pair(&g).unwrap();
        worst = worst.max(rel_scalar(lhs, rhs));
    }
    worst
}

fn seminorm_triangle(cfg: &RunConfig, rng: &mut ChaCha8Rng) -> f64 {
    let cfg_sem = SeminormConfig::default_for_dim(cfg.dim);
    let mut worst = 0.0f64;
    for _ in 0..10 {
        let a = rand_chaos(rng, cfg.dim, cfg.nmax, cfg.nmax, Rep::Wick);
        let b = rand_chaos(rng, cfg.dim, cfg.nmax, cfg.nmax, Rep::Wick);
        let (p, beta) = (1.0, 0.5);
        let sum = a.add(&b).seminorm(p, beta, &cfg_sem).unwrap();
        let parts =
            a.seminorm(p, beta, &cfg_sem).unwrap() + b.seminorm(p, beta, &cfg_sem).unwrap();
        worst = worst.max((sum - parts).max(0.0) / parts.max(1.0));
    }
    worst
}

fn seminorm_monotone(cfg: &RunConfig, rng: &mut ChaCha8Rng) -> f64 {
    let cfg_sem = SeminormConfig::default_for_dim(cfg.dim);
    let mut worst = 0.0f64;
    for _ in 0..10 {
        let a = rand_chaos(rng, cfg.dim, cfg.nmax, cfg.nmax, Rep::Wick);
        let lo = a.seminorm(0.5, 0.25, &cfg_sem).unwrap();
        let hi = a.seminorm(1.5, 0.25, &cfg_sem).unwrap();
        worst = worst.max((lo - hi).max(0.0) / hi.max(1.0));
    }
    worst
}
