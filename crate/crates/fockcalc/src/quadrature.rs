//! Gauss-Hermite quadrature for the standard Gaussian measure on `R^d`.
//!
//! This is the measure-theoretic oracle: it evaluates Gaussian mixing
//! integrals `int phi(a x + b y) dmu(x)` by tensorized quadrature without
//! touching the operator algebra, so agreement with the operator route is a
//! genuine cross-check rather than a tautology.
//!
//! Nodes and weights come from the Golub-Welsch eigenproblem of the Jacobi
//! matrix of the probabilists' Hermite recursion (off-diagonal `sqrt(k)`),
//! which targets the weight `e^(-x^2/2)/sqrt(2 pi)` directly: weights sum to
//! one and the rule is exact for polynomials of per-axis degree `<= 2q - 1`.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use thiserror::Error;

use crate::chaos::ChaosVector;

type C = Complex64;

#[derive(Debug, Error)]
pub enum QuadratureError {
    #[error("need at least one node per axis")]
    EmptyRule,
    #[error("rule with {nodes} nodes per axis is exact only to degree {exact}, integrand has degree {needed}")]
    InsufficientOrder { nodes: usize, exact: usize, needed: usize },
    #[error("grid dimension {grid} does not match the integrand dimension {integrand}")]
    DimensionMismatch { grid: usize, integrand: usize },
    #[error("evaluation failed: {0}")]
    Evaluation(String),
}

pub type Result<T, E = QuadratureError> = std::result::Result<T, E>;

/// Tensorized Gauss-Hermite rule for the standard Gaussian on `R^d`.
#[derive(Clone, Debug)]
pub struct QuadGrid {
    dim: usize,
    points_per_axis: usize,
    axis_nodes: Vec<f64>,
    axis_weights: Vec<f64>,
}

impl QuadGrid {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points_per_axis(&self) -> usize {
        self.points_per_axis
    }

    /// Highest per-axis polynomial degree integrated exactly.
    pub fn exact_degree(&self) -> usize {
        2 * self.points_per_axis - 1
    }

    pub fn axis_nodes(&self) -> &[f64] {
        &self.axis_nodes
    }

    pub fn axis_weights(&self) -> &[f64] {
        &self.axis_weights
    }

    /// Integrate a function over `R^d` against the standard Gaussian.
    pub fn integrate(&self, mut f: impl FnMut(&[f64]) -> C) -> C {
        let q = self.points_per_axis;
        let total = q.pow(self.dim as u32);
        let mut point = vec![0.0; self.dim];
        let mut acc = C::new(0.0, 0.0);
        for flat in 0..total {
            let mut rest = flat;
            let mut weight = 1.0;
            for axis in 0..self.dim {
                let idx = rest % q;
                rest /= q;
                point[axis] = self.axis_nodes[idx];
                weight *= self.axis_weights[idx];
            }
            acc += f(&point).scale(weight);
        }
        acc
    }
}

/// Build the rule: `q` nodes per axis in `d` dimensions.
pub fn gh_grid(q: usize, d: usize) -> Result<QuadGrid> {
    if q == 0 || d == 0 {
        return Err(QuadratureError::EmptyRule);
    }
    let mut jacobi = DMatrix::<f64>::zeros(q, q);
    for k in 1..q {
        let b = (k as f64).sqrt();
        jacobi[(k - 1, k)] = b;
        jacobi[(k, k - 1)] = b;
    }
    let eig = SymmetricEigen::new(jacobi);
    let mut pairs: Vec<(f64, f64)> = (0..q)
        .map(|i| {
            let node = eig.eigenvalues[i];
            let first = eig.eigenvectors[(0, i)];
            (node, first * first)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite nodes"));
    let (axis_nodes, axis_weights) = pairs.into_iter().unzip();
    Ok(QuadGrid { dim: d, points_per_axis: q, axis_nodes, axis_weights })
}

fn check_degree(grid: &QuadGrid, phi: &ChaosVector) -> Result<()> {
    if grid.dim != phi.dim() {
        return Err(QuadratureError::DimensionMismatch { grid: grid.dim, integrand: phi.dim() });
    }
    let needed = phi
        .to_monomial()
        .map_err(|e| QuadratureError::Evaluation(e.to_string()))?
        .top_degree()
        .unwrap_or(0);
    if needed > grid.exact_degree() {
        return Err(QuadratureError::InsufficientOrder {
            nodes: grid.points_per_axis,
            exact: grid.exact_degree(),
            needed,
        });
    }
    Ok(())
}

/// Gaussian mixing integral `int phi(a x + b y) dmu(x)`. Complex `a`, `b`
/// only move the (entire) polynomial to complex arguments; the dependence on
/// `a` is through `a^2` alone because the measure is symmetric.
pub fn fourier_gauss_oracle(
    phi: &ChaosVector,
    a: C,
    b: C,
    y: &[C],
    grid: &QuadGrid,
) -> Result<C> {
    check_degree(grid, phi)?;
    let mono = phi.to_monomial().map_err(|e| QuadratureError::Evaluation(e.to_string()))?;
    let mut arg = vec![C::new(0.0, 0.0); grid.dim];
    let mut failure = None;
    let value = grid.integrate(|x| {
        for i in 0..grid.dim {
            arg[i] = a.scale(x[i]) + b * y[i];
        }
        match mono.eval_at(&arg) {
            Ok(v) => v,
            Err(e) => {
                failure.get_or_insert(e.to_string());
                C::new(0.0, 0.0)
            }
        }
    });
    match failure {
        Some(msg) => Err(QuadratureError::Evaluation(msg)),
        None => Ok(value),
    }
}

/// The group action `P_(a,b,t) phi` at the point `y`, evaluated purely by
/// quadrature: a Gaussian mixing integral with amplitude-squared
/// `(1 - a/b)(1 - e^(2bt))` (or `2at` when `b = 0`) and multiplier `e^(bt)`.
/// Any square root of the amplitude may be used; only its square matters.
pub fn mehler_oracle(
    phi: &ChaosVector,
    a: C,
    b: C,
    t: f64,
    y: &[C],
    grid: &QuadGrid,
) -> Result<C> {
    let params = crate::transforms::GroupParams::new(a, b, t);
    let amplitude = params.scale_squared().sqrt();
    fourier_gauss_oracle(phi, amplitude, params.multiplier(), y, grid)
}
