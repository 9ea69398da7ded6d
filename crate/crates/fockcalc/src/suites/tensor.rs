//! Symmetric-tensor algebra checks: pairing laws, product structure,
//! contraction characterizations and the one-particle lifts.

use rand_chacha::ChaCha8Rng;

use super::{dot, rand_cvec, rand_matrix, rand_tensor, rel_scalar, CheckCase, RunConfig, TolKind};
use crate::symtensor::{trace_tensor, SymTensor};
use num_complex::Complex64 as C;

type St = SymTensor<C>;

pub fn cases() -> Vec<CheckCase> {
    vec![
        CheckCase {
            name: "pairing-power-law",
            identity: "pair(power(xi,n), power(eta,n)) = dot(xi,eta)^n",
            tol: TolKind::Exact,
            run: pairing_power_law,
        },
        CheckCase {
            name: "sym-product-commutative",
            identity: "f (x) g = g (x) f",
            tol: TolKind::Exact,
            run: sym_product_commutative,
        },
        CheckCase {
            name: "sym-product-associative",
            identity: "(f (x) g) (x) h = f (x) (g (x) h)",
            tol: TolKind::Exact,
            run: sym_product_associative,
        },
        CheckCase {
            name: "sym-product-pairing-contract",
            identity: "pair(f (x) g, power(xi, n+m)) = pair(f, power(xi,n)) pair(g, power(xi,m))",
            tol: TolKind::Exact,
            run: sym_product_pairing_contract,
        },
        CheckCase {
            name: "trace-kernel-pairings",
            identity: "pair(tau, power(xi,2)) = dot(xi,xi) and pair(tau,tau) = dim",
            tol: TolKind::Exact,
            run: trace_kernel_pairings,
        },
        CheckCase {
            name: "right-contract-powers",
            identity: "contract(kappa, power(xi,n+m)) = pair(kappa, power(xi,m)) power(xi,n)",
            tol: TolKind::Exact,
            run: right_contract_powers,
        },
        CheckCase {
            name: "right-contract-adjoint",
            identity: "pair(contract(kappa,f), g) = pair(f, g (x) kappa)",
            tol: TolKind::Exact,
            run: right_contract_adjoint,
        },
        CheckCase {
            name: "map-pow-powers",
            identity: "map_pow(T, power(xi,n)) = power(T xi, n)",
            tol: TolKind::Exact,
            run: map_pow_powers,
        },
        CheckCase {
            name: "map-pow-multiplicative",
            identity: "map_pow(S T, f) = map_pow(S, map_pow(T, f))",
            tol: TolKind::Exact,
            run: map_pow_multiplicative,
        },
        CheckCase {
            name: "derivation-additive",
            identity: "derivation_pow(S + T) = derivation_pow(S) + derivation_pow(T)",
            tol: TolKind::Exact,
            run: derivation_additive,
        },
        CheckCase {
            name: "derivation-powers",
            identity: "derivation_pow(T, power(xi,n)) = n (T xi) (x) power(xi, n-1)",
            tol: TolKind::Exact,
            run: derivation_powers,
        },
        CheckCase {
            name: "pullback-powers",
            identity: "pair(pullback(T, kappa), power(xi,r)) = pair(kappa, power(T xi, r))",
            tol: TolKind::Exact,
            run: pullback_powers,
        },
    ]
}

fn pairing_power_law(cfg: &RunConfig, rng: &mut ChaCha8Rng) -> f64 {
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let d = cfg.dim;
        for n in 0..=cfg.nmax.min(8) {
            let xi = rand_cvec(rng, d, 1.0);
            let eta = rand_cvec(rng, d, 1.0);
            let lhs = St::power(&xi, n).pair(&St::power(&eta, n)).unwrap();
            let rhs = dot(&xi, &eta).powu(n as u32);
            worst = worst.max(rel_scalar(lhs, rhs));
        }
    }
    worst
}

fn sym_product_commutative(cfg: &RunConfig, rng: &mut ChaCha8Rng) -> f64 {
    let mut worst = 0.0f64;
    for _ in 0..10 {
        let f = rand_tensor(rng, cfg.dim, 3, 1.0);
        let g = rand_tensor(rng, cfg.dim, 2, 1.0);
        let fg = f.sym_product(&g).unwrap();
        let gf = g.sym_product(&f).unwrap();
        worst = worst.max(fg.sub(&gf).norm() / fg.norm().max(1.0));
    }
    worst
}

fn sym_product_associative(cfg: &RunConfig, rng: &mut ChaCha8Rng) -> f64 {
    let mut worst = 0.0f64;
    for _ in 0..10 {
        let f = rand_tensor(rng, cfg.dim, 2, 1.0);
        let g = rand_tensor(rng, cfg.dim, 1, 1.0);
        let h = rand_tensor(rng, cfg.dim, 2, 1.0);
        let lhs = f.sym_product(&g).unwrap().sym_product(&h).unwrap();
        let rhs = f.sym_product(&g.sym_product(&h).unwrap()).unwrap();
        worst = worst.max(lhs.sub(&rhs).norm() / lhs.norm().max(1.0));
    }
    worst
}

fn sym_product_pairing_contract(cfg: &RunConfig, rng: &mut ChaCha8Rng) -> f64 {
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let (n, m) = (2, 3);
        let f = rand_tensor(rng, cfg.dim, n, 1.0);
        let g = rand_tensor(rng, cfg.dim, m, 1.0);
        let xi = rand_cvec(rng, cfg.dim, 1.0);
        let lhs = f.sym_product(&g).unwrap().pair(&St::power(&xi, n + m)).unwrap();
        let rhs =
            f.pair(&St::power(&xi, n)).unwrap() * g.pair(&St::power(&xi, m)).unwrap();
        worst = worst.max(rel_scalar(lhs, rhs));
    }
    worst
}

fn trace_kernel_pairings(cfg: &RunConfig, rng: &mut ChaCha8Rng) -> f64 {
    let tau = trace_tensor::<C>(cfg.dim);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let xi = rand_cvec(rng, cfg.dim, 1.0);
        let lhs = tau.pair(&St::power(&xi, 2)).unwrap();
        worst = worst.max(rel_scalar(lhs, dot(&xi, &xi)));
    }
    let self_pair = tau.pair(&tau).unwrap();
    worst.max(rel_scalar(self_pair, C::new(cfg.dim as f64, 0.0)))
}

fn right_contract_powers(cfg: &RunConfig, rng: &mut ChaCha8Rng) -> f64 {
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let m = 2;
        let n = 3;
        let kappa = rand_tensor(rng, cfg.dim, m, 1.0);
        let xi = rand_cvec(rng, cfg.dim, 1.0);
        let lhs = St::right_contract(&kappa, &St::power(&xi, n + m)).unwrap();
        let rhs = St::power(&xi, n).scale_t(kappa.pair(&St::power(&xi, m)).unwrap());
        worst = worst.max(lhs.sub(&rhs).norm() / rhs.norm().max(1.0));
        // full contraction collapses to the pairing
        let f = rand_tensor(rng, cfg.dim, m, 1.0);
        let full = St::right_contract(&kappa, &f).unwrap();
        worst = worst.max(rel_scalar(full.coeffs()[0], kappa.pair(&f).unwrap()));
    }
    worst
}

fn right_contract_adjoint(cfg: &RunConfig, rng: &mut ChaCha8Rng) -> f64 {
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let kappa = rand_tensor(rng, cfg.dim, 2, 1.0);
        let f = rand_tensor(rng, cfg.dim, 5, 1.0);
        let g = rand_tensor(rng, cfg.dim, 3, 1.0);
        let lhs = St::right_contract(&kappa, &f).unwrap().pair(&g).unwrap();
        let rhs = f.pair(&g.sym_product(&kappa).unwrap()).unwrap();
        worst = worst.max(rel_scalar(lhs, rhs));
    }
    worst
}

fn map_pow_powers(cfg: &RunConfig, rng: &mut ChaCha8Rng) -> f64 {
    let mut worst = 0.0f64;
    for n in 0..=6 {
        let t = rand_matrix(rng, cfg.dim, 1.0);
        let xi = rand_cvec(rng, cfg.dim, 1.0);
        let lhs = St::map_pow(&t, &St::power(&xi, n));
        let rhs = St::power(&t.apply(&xi), n);
        worst = worst.max(lhs.sub(&rhs).norm() / rhs.norm().max(1.0));
    }
    worst
}

fn map_pow_multiplicative(cfg: &RunConfig, rng: &mut ChaCha8Rng) -> f64 {
    let mut worst = 0.0f64;
    for _ in 0..10 {
        let s = rand_matrix(rng, cfg.dim, 1.0);
        let t = rand_matrix(rng, cfg.dim, 1.0);
        let f = rand_tensor(rng, cfg.dim, 4, 1.0);
        let lhs = St::map_pow(&s.matmul(&t), &f);
        let rhs = St::map_pow(&s, &St::map_pow(&t, &f));
        worst = worst.max(lhs.sub(&rhs).norm() / lhs.norm().max(1.0));
    }
    worst
}

fn derivation_additive(cfg: &RunConfig, rng: &mut ChaCha8Rng) -> f64 {
    let mut worst = 0.0f64;
    for _ in 0..10 {
        let s = rand_matrix(rng, cfg.dim, 1.0);
        let t = rand_matrix(rng, cfg.dim, 1.0);
        let f = rand_tensor(rng, cfg.dim, 4, 1.0);
        let lhs = St::derivation_pow(&s.add(&t), &f);
        let rhs = St::derivation_pow(&s, &f).add(&St::derivation_pow(&t, &f));
        worst = worst.max(lhs.sub(&rhs).norm() / lhs.norm().max(1.0));
    }
    worst
}

fn derivation_powers(cfg: &RunConfig, rng: &mut ChaCha8Rng) -> f64 {
    let mut worst = 0.0f64;
    for n in 1..=6 {
        let t = rand_matrix(rng, cfg.dim, 1.0);
        let xi = rand_cvec(rng, cfg.dim, 1.0);
        let lhs = St::derivation_pow(&t, &St::power(&xi, n));
        let rhs = St::power(&t.apply(&xi), 1)
            .sym_product(&St::power(&xi, n - 1))
            .unwrap()
            .scale(n as f64);
        worst = worst.max(lhs.sub(&rhs).norm() / rhs.norm().max(1.0));
    }
    worst
}

fn pullback_powers(cfg: &RunConfig, rng: &mut ChaCha8Rng) -> f64 {
    let mut worst = 0.0f64;
    for r in 1..=3 {
        let t = rand_matrix(rng, cfg.dim, 1.0);
        let kappa = rand_tensor(rng, cfg.dim, r, 1.0);
        let xi = rand_cvec(rng, cfg.dim, 1.0);
        let lhs = St::pullback_pow(&t, &kappa).pair(&St::power(&xi, r)).unwrap();
        let rhs = kappa.pair(&St::power(&t.apply(&xi), r)).unwrap();
        worst = worst.max(rel_scalar(lhs, rhs));
    }
    worst
}
