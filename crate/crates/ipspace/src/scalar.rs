//! Scalar abstraction shared by every numeric routine in the crate.
//!
//! All algorithms are written against [`Real`], which any IEEE float implements.
//! The crate root exposes f64 aliases for the common case; the CLI and the JSON
//! layer are f64-only.

use nalgebra::RealField;
use num_traits::{FromPrimitive, ToPrimitive};

/// Floating-point scalar usable in every routine of this crate.
///
/// `RealField` brings the matrix backend (eigen, Cholesky, SVD); the num-traits
/// bounds carry tolerance constants in and diagnostics out.
pub trait Real: RealField + FromPrimitive + ToPrimitive + Copy {}

impl Real for f32 {}
impl Real for f64 {}

/// Converts an f64 constant into `T`. Panics on NaN; constants in this crate are
/// always finite literals.
#[inline]
pub fn real<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("finite literal")
}

/// Tunable tolerances threaded through searches and rank decisions.
///
/// `residual_tol` is the default absolute tolerance for consistency checks where no
/// natural scale exists (also the Cayley-Menger dependence threshold). `rank_tol` is
/// relative: eigenvalues or pivot diagonals below `rank_tol * max` count as zero.
/// `locus_tol` bounds |phi| at accepted equidistant-locus points. A condition search
/// only reports a witness whose residual exceeds `violation_threshold`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances<T> {
    pub residual_tol: T,
    pub rank_tol: T,
    pub locus_tol: T,
    pub violation_threshold: T,
}

impl<T: Real> Default for Tolerances<T> {
    fn default() -> Self {
        Tolerances {
            residual_tol: real(1e-9),
            rank_tol: real(1e-9),
            locus_tol: real(1e-10),
            violation_threshold: real(1e-6),
        }
    }
}

impl<T: Real> Tolerances<T> {
    /// Fails on non-positive or non-finite entries.
    pub fn validate(&self) -> Result<(), String> {
        let entries = [
            ("residual_tol", self.residual_tol),
            ("rank_tol", self.rank_tol),
            ("locus_tol", self.locus_tol),
            ("violation_threshold", self.violation_threshold),
        ];
        for (name, v) in entries {
            if !(v > T::zero()) || !v.is_finite() {
                return Err(format!("{name} must be positive and finite"));
            }
        }
        Ok(())
    }
}
