//! Numerical laboratory for the confined quantum time-of-arrival (CTOA)
//! operators of a free particle on `[-l, l]`.
//!
//! The crate builds the integral kernels of the operators `T_γ`, solves their
//! eigenproblem twice (Nystrom discretization on a Gauss-Legendre grid and the
//! closed-form Bessel-function route), evolves eigenfunctions with the
//! plane-wave eigenbasis of the boundary-condition Hamiltonian `H_γ`, and
//! measures when the position variance of each eigenfunction is minimal.
//!
//! Module map:
//!
//! * [`quadrature`]: Gauss-Legendre rules and sampled wavefunctions.
//! * [`specfun`]: quarter-order Bessel functions and bracketed root finding.
//! * [`kernel`]: physical parameters and the operator kernels.
//! * [`nystrom`]: discretized operators and the numeric spectrum.
//! * [`analytic`]: characteristic equations and closed-form eigenfunctions.
//! * [`evolution`]: unitary evolution and position moments.
//! * [`algebra`]: canonical commutation checks `[H, T] = iħ`.
//! * [`tables`]: reference tables and their reproduction protocols.
//! * [`cli`]: the `ctoa` command-line front end.

pub mod algebra;
pub mod analytic;
pub mod cli;
pub mod error;
pub mod evolution;
pub mod kernel;
pub mod nystrom;
pub mod quadrature;
pub mod specfun;
pub mod tables;

pub use error::{Error, Result};
pub use kernel::PhysicalParams;
pub use num_complex::Complex64;
pub use quadrature::{GridFunction, QuadratureRule};
