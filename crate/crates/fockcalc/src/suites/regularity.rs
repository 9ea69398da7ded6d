//! Regularity proxies: for each standard one-parameter family the unit-ball
//! difference-quotient residual against the generator must halve when the
//! step halves. The residual reported is the worst deviation of the observed
//! decay ratios from exact halving; the tolerance is the 20 percent window.

use rand_chacha::ChaCha8Rng;

use super::{rand_chaos, rand_matrix, CheckCase, RunConfig, TolKind};
use crate::chaos::{Rep, SeminormConfig};
use crate::fockop::{convolution_operator, diff_second_quantization, exp_convolution};
use crate::transforms::{
    group_generator, mehler_group, regularity_check, second_quantization_flow, GroupParams,
    RegularityReport,
};
use num_complex::Complex64 as C;

const STEPS: [f64; 3] = [1e-2, 5e-3, 2.5e-3];

pub fn cases() -> Vec<CheckCase> {
    vec![
        CheckCase {
            name: "second-quantization-flow",
            identity: "Gamma(e^(tB)) difference quotients converge linearly to dGamma(B)",
            tol: TolKind::Fixed(0.4),
            run: second_quantization_flow_decay,
        },
        CheckCase {
            name: "convolution-flow",
            identity: "exp(t C_phi) difference quotients converge linearly to C_phi",
            tol: TolKind::Fixed(0.4),
            run: convolution_flow_decay,
        },
        CheckCase {
            name: "mehler-flow",
            identity: "P_(a,b,t) difference quotients converge linearly to a Laplacian + b N",
            tol: TolKind::Fixed(0.4),
            run: mehler_flow_decay,
        },
    ]
}

fn ratio_residual(report: &RegularityReport) -> f64 {
    report
        .ratios
        .iter()
        .map(|r| (r - 2.0).abs())
        .fold(0.0, f64::max)
}

fn second_quantization_flow_decay(cfg: &RunConfig, rng: &mut ChaCha8Rng) -> f64 {
    let sem = SeminormConfig::default_for_dim(cfg.dim);
    let bmat = rand_matrix(rng, cfg.dim, 0.6);
    let report = regularity_check(
        |t| second_quantization_flow(&bmat, C::new(t, 0.0), cfg.nmax),
        &diff_second_quantization(&bmat, cfg.nmax),
        &STEPS,
        1.0,
        0.0,
        &sem,
    );
    ratio_residual(&report)
}

fn convolution_flow_decay(cfg: &RunConfig, rng: &mut ChaCha8Rng) -> f64 {
    let sem = SeminormConfig::default_for_dim(cfg.dim);
    let phi = rand_chaos(rng, cfg.dim, cfg.nmax, 3, Rep::Wick);
    let generator = convolution_operator(&phi).unwrap();
    let report = regularity_check(
        |t| exp_convolution(&phi.scale(t)).unwrap(),
        &generator,
        &STEPS,
        1.0,
        0.0,
        &sem,
    );
    ratio_residual(&report)
}

fn mehler_flow_decay(cfg: &RunConfig, _rng: &mut ChaCha8Rng) -> f64 {
    let sem = SeminormConfig::default_for_dim(cfg.dim);
    let mut worst = 0.0f64;
    for (a, b) in cfg.ab_pairs().into_iter().take(3) {
        let report = regularity_check(
            |t| mehler_group(&GroupParams::new(a, b, t), cfg.dim, cfg.nmax),
            &group_generator(a, b, cfg.dim, cfg.nmax),
            &STEPS,
            1.0,
            0.0,
            &sem,
        );
        worst = worst.max(ratio_residual(&report));
    }
    worst
}
