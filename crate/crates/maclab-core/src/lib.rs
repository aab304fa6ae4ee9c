//! Exact verification kernel for Macdonald symmetric functions and the
//! identities of Macdonald measures and processes.
//!
//! Everything in this crate is computed over arbitrary-precision rationals:
//! Macdonald polynomials `P_λ`, `Q_λ` and their skew variants, formal
//! Macdonald measures/processes as truncated multi-alphabet power series,
//! the observables `O_r` and `Ô₁`, iterated-residue evaluation of the
//! nested contour integrals, Macdonald difference operators, the Noumi
//! q-integral operator and both Fredholm determinant expansions.
//!
//! The crate is `no_std` (with `alloc`); IO, configuration and the numeric
//! quadrature cross-check live in the companion `maclab` crate.
//!
//! Module map:
//! - [`scalar`], [`params`], [`partition`], [`qfunc`] — exact scalars,
//!   the (q,t) parameter pair, partitions and q-Pochhammer primitives
//! - [`poly`], [`monomial`], [`symfunc`], [`macdonald`] — power-sum algebra,
//!   monomial/power-sum transition matrices and Gram–Schmidt construction
//!   of `P_λ`, `Q_λ`, skew functions
//! - [`alphabet`], [`kernels`] — multi-alphabet truncated series, the
//!   kernels Π/H/W, coproduct and the Macdonald pairing
//! - [`process`] — formal Macdonald measures/processes and observables
//! - [`contour`], [`integrands`] — exact iterated-residue engine and the
//!   per-identity integrand builders
//! - [`ascending`] — ascending processes, difference/Noumi operators,
//!   Fredholm coefficients and certified tail bounds

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;
#[cfg(any(test, feature = "std"))]
extern crate std;

pub mod alphabet;
pub mod ascending;
pub mod contour;
pub mod error;
pub mod integrands;
pub mod kernels;
pub mod macdonald;
pub mod monomial;
pub mod params;
pub mod partition;
pub mod poly;
pub mod process;
pub mod qfunc;
pub mod scalar;
pub mod symfunc;

pub use error::{Error, Result};
pub use params::Params;
pub use partition::Partition;
pub use scalar::Scalar;
