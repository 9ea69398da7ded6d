//! Scalar rings the tensor and operator algebra is generic over.
//!
//! Two instances matter: plain `Complex64` for all ordinary computation, and
//! [`Bicomplex`] for complex-step differentiation of one-parameter operator
//! families. A bicomplex number carries a second imaginary unit `j` (with
//! `j^2 = -1`, commuting with `i`), so a family evaluated at `t0 + j*h` keeps
//! the derivative in the `j`-component, where no O(1) term can absorb it.
//! A plain imaginary step does not work here: the matrix entries are already
//! complex, and the step would land on top of them and round away.

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use num_complex::Complex64;

/// Ring operations needed by symmetric tensors, operator blocks and the
/// one-parameter group constructions.
pub trait Scalar:
    Copy
    + PartialEq
    + fmt::Debug
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
    + Sum
{
    fn zero() -> Self;
    fn one() -> Self;
    fn from_f64(x: f64) -> Self;
    /// Embed an ordinary complex number.
    fn lift(c: Complex64) -> Self;
    /// Multiply by a real factor.
    fn scale(self, k: f64) -> Self;
    fn exp(self) -> Self;
    /// A norm; zero exactly for the zero element.
    fn modulus(self) -> f64;

    fn is_zero(self) -> bool {
        self.modulus() == 0.0
    }
}

impl Scalar for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }

    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }

    fn from_f64(x: f64) -> Self {
        Complex64::new(x, 0.0)
    }

    fn lift(c: Complex64) -> Self {
        c
    }

    fn scale(self, k: f64) -> Self {
        self * k
    }

    fn exp(self) -> Self {
        Complex64::exp(self)
    }

    fn modulus(self) -> f64 {
        self.norm()
    }
}

/// `value + j * jpart` with `j^2 = -1` and `ij = ji`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bicomplex {
    pub value: Complex64,
    pub jpart: Complex64,
}

impl Bicomplex {
    pub fn new(value: Complex64, jpart: Complex64) -> Self {
        Self { value, jpart }
    }

    /// A real point `t0` perturbed by `j*h`, the complex-step evaluation point.
    pub fn step_point(t0: f64, h: f64) -> Self {
        Self::new(Complex64::new(t0, 0.0), Complex64::new(h, 0.0))
    }
}

impl Add for Bicomplex {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.value + rhs.value, self.jpart + rhs.jpart)
    }
}

impl Sub for Bicomplex {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.value - rhs.value, self.jpart - rhs.jpart)
    }
}

impl Mul for Bicomplex {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Self::new(
            self.value * rhs.value - self.jpart * rhs.jpart,
            self.value * rhs.jpart + self.jpart * rhs.value,
        )
    }
}

impl Neg for Bicomplex {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.value, -self.jpart)
    }
}

impl AddAssign for Bicomplex {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

impl SubAssign for Bicomplex {
    fn sub_assign(&mut self, rhs: Self) {
        *self = *self - rhs;
    }
}

impl MulAssign for Bicomplex {
    fn mul_assign(&mut self, rhs: Self) {
        *self = *self * rhs;
    }
}

impl Sum for Bicomplex {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Scalar::zero(), |a, b| a + b)
    }
}

impl Scalar for Bicomplex {
    fn zero() -> Self {
        Self::new(Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0))
    }

    fn one() -> Self {
        Self::new(Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0))
    }

    fn from_f64(x: f64) -> Self {
        Self::new(Complex64::new(x, 0.0), Complex64::new(0.0, 0.0))
    }

    fn lift(c: Complex64) -> Self {
        Self::new(c, Complex64::new(0.0, 0.0))
    }

    fn scale(self, k: f64) -> Self {
        Self::new(self.value * k, self.jpart * k)
    }

    // exp(v + j*d) = exp(v) * (cos d + j sin d); sin and cos of a tiny complex
    // argument are relatively accurate, so the j-component never cancels.
    fn exp(self) -> Self {
        let ev = self.value.exp();
        Self::new(ev * self.jpart.cos(), ev * self.jpart.sin())
    }

    fn modulus(self) -> f64 {
        self.value.norm() + self.jpart.norm()
    }
}
