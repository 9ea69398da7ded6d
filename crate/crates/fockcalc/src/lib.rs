//! Operator calculus of Gaussian analysis on a degree-truncated Fock space.
//!
//! Functionals of a `d`-dimensional standard Gaussian are stored as chaos
//! expansions: lists of symmetric tensor coefficients against normally
//! ordered powers, cut off at a fixed top degree. On this finite model the
//! classical operator identities - the Wick/convolution algebra and its
//! homomorphism into annihilation operators, second quantization, generalized
//! normal ordering and kernel representations, Fourier-Gauss and
//! Fourier-Mehler factorizations, and the one-parameter group generated by
//! `a * Laplacian + b * Number` - hold degree by degree, which turns each of
//! them into a machine-checkable property. An independent Gauss-Hermite
//! quadrature oracle pins the operator routes to actual Gaussian integrals.
//!
//! Start with the runnable examples (`cargo run --example hermite_chaos` and
//! friends) or the [`suites`] module, which names every identity the crate
//! verifies. The `fockcalc` binary drives the suites from the command line.

pub mod chaos;
pub mod cli;
pub mod fockop;
pub mod linalg;
pub mod quadrature;
pub mod scalar;
pub mod suites;
pub mod symtensor;
pub mod transforms;
