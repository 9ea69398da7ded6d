//! Minimal dense matrices over a [`Scalar`] ring.
//!
//! Operator blocks and one-particle maps are tiny here (dimension bounded by
//! the symmetric-space sizes, a few hundred at most), so a plain row-major
//! `Vec` beats pulling a full linear-algebra stack through the generic scalar
//! trait. Decompositions are not needed; the quadrature module uses nalgebra
//! for its one eigenproblem.

use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub struct Mat<T> {
    nrows: usize,
    ncols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Mat<T> {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Self { nrows, ncols, data: vec![T::zero(); nrows * ncols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_fn(nrows: usize, ncols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut m = Self::zeros(nrows, ncols);
        for r in 0..nrows {
            for c in 0..ncols {
                m[(r, c)] = f(r, c);
            }
        }
        m
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn is_square(&self) -> bool {
        self.nrows == self.ncols
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.ncols, rhs.nrows, "matmul shape mismatch");
        let mut out = Self::zeros(self.nrows, rhs.ncols);
        for r in 0..self.nrows {
            for k in 0..self.ncols {
                let a = self[(r, k)];
                if a.is_zero() {
                    continue;
                }
                for c in 0..rhs.ncols {
                    out[(r, c)] += a * rhs[(k, c)];
                }
            }
        }
        out
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!((self.nrows, self.ncols), (rhs.nrows, rhs.ncols));
        let data = self.data.iter().zip(&rhs.data).map(|(&a, &b)| a + b).collect();
        Self { nrows: self.nrows, ncols: self.ncols, data }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        assert_eq!((self.nrows, self.ncols), (rhs.nrows, rhs.ncols));
        let data = self.data.iter().zip(&rhs.data).map(|(&a, &b)| a - b).collect();
        Self { nrows: self.nrows, ncols: self.ncols, data }
    }

    pub fn scale_t(&self, k: T) -> Self {
        let data = self.data.iter().map(|&a| a * k).collect();
        Self { nrows: self.nrows, ncols: self.ncols, data }
    }

    pub fn scale(&self, k: f64) -> Self {
        let data = self.data.iter().map(|&a| a.scale(k)).collect();
        Self { nrows: self.nrows, ncols: self.ncols, data }
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.ncols, self.nrows, |r, c| self[(c, r)])
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(T) -> U) -> Mat<U> {
        Mat { nrows: self.nrows, ncols: self.ncols, data: self.data.iter().map(|&a| f(a)).collect() }
    }

    pub fn apply(&self, v: &[T]) -> Vec<T> {
        assert_eq!(self.ncols, v.len(), "matrix-vector shape mismatch");
        (0..self.nrows)
            .map(|r| (0..self.ncols).map(|c| self[(r, c)] * v[c]).sum())
            .collect()
    }

    pub fn max_modulus(&self) -> f64 {
        self.data.iter().map(|a| a.modulus()).fold(0.0, f64::max)
    }

    pub fn frob_norm(&self) -> f64 {
        self.data.iter().map(|a| a.modulus().powi(2)).sum::<f64>().sqrt()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|a| a.is_zero())
    }

    /// Matrix exponential by scaling, Taylor series and repeated squaring.
    /// Ample for the small one-particle matrices this crate handles.
    pub fn expm(&self) -> Self {
        assert!(self.is_square(), "expm needs a square matrix");
        let norm = self.max_modulus() * self.nrows as f64;
        let squarings = if norm > 0.5 { (norm / 0.5).log2().ceil() as u32 } else { 0 };
        let scaled = self.scale(0.5f64.powi(squarings as i32));
        let mut acc = Self::identity(self.nrows);
        let mut term = Self::identity(self.nrows);
        for k in 1..=30 {
            term = term.matmul(&scaled).scale(1.0 / k as f64);
            acc = acc.add(&term);
            if term.max_modulus() < 1e-20 {
                break;
            }
        }
        for _ in 0..squarings {
            acc = acc.matmul(&acc);
        }
        acc
    }
}

impl<T> std::ops::Index<(usize, usize)> for Mat<T> {
    type Output = T;
    fn index(&self, (r, c): (usize, usize)) -> &T {
        &self.data[r * self.ncols + c]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for Mat<T> {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut T {
        &mut self.data[r * self.ncols + c]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn expm_of_diagonal_matches_scalar_exponentials() {
        let mut m = Mat::<Complex64>::zeros(2, 2);
        m[(0, 0)] = c(0.3, -0.2);
        m[(1, 1)] = c(-1.1, 0.8);
        let e = m.expm();
        assert!((e[(0, 0)] - m[(0, 0)].exp()).norm() < 1e-14);
        assert!((e[(1, 1)] - m[(1, 1)].exp()).norm() < 1e-14);
        assert!(e[(0, 1)].norm() < 1e-16);
    }

    #[test]
    fn expm_group_property() {
        let m = Mat::<Complex64>::from_fn(3, 3, |r, cix| {
            c(0.1 * (r as f64 - cix as f64), 0.05 * (r + cix) as f64)
        });
        let e1 = m.expm();
        let e2 = m.scale(2.0).expm();
        let diff = e1.matmul(&e1).sub(&e2);
        assert!(diff.max_modulus() < 1e-13);
    }
}
