//! The Mehler-type group: composition law over the parameter grids, the
//! classical Ornstein-Uhlenbeck closed form, generator identities by complex
//! step and finite differences, the limiting branch, and the quadrature
//! cross-check.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{rand_chaos, rand_complex, rand_cvec, rel_scalar, CheckCase, RunConfig, TolKind};
use crate::chaos::{ChaosVector, Rep};
use crate::fockop::FockOperator;
use crate::quadrature::{gh_grid, mehler_oracle};
use crate::symtensor::SymTensor;
use crate::transforms::{
    complex_step_derivative, group_generator, mehler_group, mehler_group_generic,
    richardson_fd_derivative, GroupParams,
};
use num_complex::Complex64 as C;

pub fn cases() -> Vec<CheckCase> {
    vec![
        CheckCase {
            name: "group-law",
            identity: "P_(a,b,s) P_(a,b,t) = P_(a,b,s+t) over the parameter grid",
            tol: TolKind::Fixed(1e-10),
            run: group_law,
        },
        CheckCase {
            name: "identity-at-zero",
            identity: "P_(a,b,0) = Id",
            tol: TolKind::Exact,
            run: identity_at_zero,
        },
        CheckCase {
            name: "ornstein-uhlenbeck-closed-form",
            identity: "a=0, b=-1 on x^2 gives e^(-2t) y^2 + (1 - e^(-2t))",
            tol: TolKind::Fixed(1e-12),
            run: ornstein_uhlenbeck_closed_form,
        },
        CheckCase {
            name: "generator-complex-step",
            identity: "d/dt P_(a,b,t) at 0 = a Laplacian + b N",
            tol: TolKind::Fixed(1e-12),
            run: generator_complex_step,
        },
        CheckCase {
            name: "generator-finite-difference",
            identity: "Richardson-extrapolated central differences confirm the generator",
            tol: TolKind::Fixed(1e-5),
            run: generator_finite_difference,
        },
        CheckCase {
            name: "limit-branch-ratio",
            identity: "the defect against the b=0 branch scales linearly in b (tenfold per decade)",
            tol: TolKind::Fixed(2.0),
            run: limit_branch_ratio,
        },
        CheckCase {
            name: "quadrature-cross-check",
            identity: "operator route and mixing-integral route agree pointwise",
            tol: TolKind::Oracle,
            run: quadrature_cross_check,
        },
    ]
}

fn group_law(cfg: &RunConfig, _rng: &mut ChaCha8Rng) -> f64 {
    let d = cfg.dim;
    let nmax = cfg.nmax;
    let mut worst = 0.0f64;
    for (a, b) in cfg.ab_pairs() {
        for &s in &cfg.t_grid {
            for &t in &cfg.t_grid {
                let ps = mehler_group(&GroupParams::new(a, b, s), d, nmax);
                let pt = mehler_group(&GroupParams::new(a, b, t), d, nmax);
                let pst = mehler_group(&GroupParams::new(a, b, s + t), d, nmax);
                worst = worst.max(ps.compose(&pt).max_rel_residual(&pst));
            }
        }
    }
    worst
}

fn identity_at_zero(cfg: &RunConfig, _rng: &mut ChaCha8Rng) -> f64 {
    let d = cfg.dim;
    let nmax = cfg.nmax;
    let id = FockOperator::identity(d, nmax);
    let mut worst = 0.0f64;
    for (a, b) in cfg.ab_pairs() {
        let p0 = mehler_group(&GroupParams::new(a, b, 0.0), d, nmax);
        worst = worst.max(p0.max_rel_residual(&id));
    }
    worst
}

fn ornstein_uhlenbeck_closed_form(_cfg: &RunConfig, _rng: &mut ChaCha8Rng) -> f64 {
    let nmax = 6;
    let mut mono = ChaosVector::zero(1, nmax, Rep::Monomial);
    mono.coeffs_mut()[2] = SymTensor::power(&[C::new(1.0, 0.0)], 2);
    let phi = mono.to_wick().unwrap();
    let mut worst = 0.0f64;
    for t in [0.0, 0.05, 0.3, 0.8, 1.5] {
        let p = mehler_group(&GroupParams::new(C::new(0.0, 0.0), C::new(-1.0, 0.0), t), 1, nmax);
        let out = p.apply(&phi).unwrap();
        for y in [-2.0, -0.7, 0.0, 0.5, 1.9] {
            let got = out.eval_at(&[C::new(y, 0.0)]).unwrap();
            let decay = (-2.0 * t).exp();
            let want = C::new(decay * y * y + (1.0 - decay), 0.0);
            worst = worst.max(rel_scalar(got, want));
        }
    }
    worst
}

fn generator_complex_step(cfg: &RunConfig, _rng: &mut ChaCha8Rng) -> f64 {
    let d = cfg.dim;
    let nmax = cfg.nmax;
    let mut worst = 0.0f64;
    for (a, b) in cfg.ab_pairs() {
        let deriv = complex_step_derivative(|t| mehler_group_generic(a, b, t, d, nmax), 0.0);
        worst = worst.max(deriv.max_rel_residual(&group_generator(a, b, d, nmax)));
    }
    worst
}

fn generator_finite_difference(cfg: &RunConfig, _rng: &mut ChaCha8Rng) -> f64 {
    let d = cfg.dim;
    let nmax = cfg.nmax;
    let mut worst = 0.0f64;
    for (a, b) in cfg.ab_pairs().into_iter().take(3) {
        // fourth-order accuracy: with degree-n blocks the fifth derivative
        // grows like n^5, so the step must stay near 1e-3 for 1e-6 accuracy
        let deriv = richardson_fd_derivative(
            |t| mehler_group(&GroupParams::new(a, b, t), d, nmax),
            0.0,
            1e-3,
        );
        worst = worst.max(deriv.max_rel_residual(&group_generator(a, b, d, nmax)));
    }
    worst
}

fn limit_branch_ratio(cfg: &RunConfig, rng: &mut ChaCha8Rng) -> f64 {
    // residual = worst deviation of the decade ratio from 10
    let d = cfg.dim;
    let nmax = cfg.nmax;
    let mut worst = 0.0f64;
    for _ in 0..5 {
        let a = rand_complex(rng, 1.0);
        let t = {
            let magnitude = rng.gen_range(0.1..0.5);
            if rng.gen_bool(0.5) {
                magnitude
            } else {
                -magnitude
            }
        };
        let phi = rand_chaos(rng, d, nmax, nmax, Rep::Wick);
        let base = mehler_group(&GroupParams::new(a, C::new(0.0, 0.0), t), d, nmax)
            .apply(&phi)
            .unwrap();
        let defect = |b: f64| {
            mehler_group(&GroupParams::new(a, C::new(b, 0.0), t), d, nmax)
                .apply(&phi)
                .unwrap()
                .sub(&base)
                .norm()
        };
        let ratio = defect(1e-3) / defect(1e-4);
        worst = worst.max((ratio - 10.0).abs());
    }
    worst
}

fn quadrature_cross_check(cfg: &RunConfig, rng: &mut ChaCha8Rng) -> f64 {
    let d = cfg.dim;
    let nmax = cfg.nmax;
    let grid = gh_grid(cfg.quad_order, d).unwrap();
    let mut worst = 0.0f64;
    for (a, b) in cfg.ab_pairs() {
        for &t in &cfg.t_grid {
            let phi = rand_chaos(rng, d, nmax, 6, Rep::Wick);
            let p = mehler_group(&GroupParams::new(a, b, t), d, nmax);
            let image = p.apply(&phi).unwrap();
            let y = rand_cvec(rng, d, 0.8);
            let via_op = image.eval_at(&y).unwrap();
            let via_quad = mehler_oracle(&phi, a, b, t, &y, &grid).unwrap();
            worst = worst.max(rel_scalar(via_op, via_quad));
        }
    }
    worst
}
