//! Numerical tests for inner-product structure in finite-dimensional normed
//! spaces, with certified counterexamples and isometry extension.
//!
//! The crate answers four kinds of question about a concrete norm:
//!
//! * does it satisfy the classical inner-product characterizations (parallelogram
//!   law, norm-swap identities, Birkhoff-James symmetry, ...), and if not, which
//!   vectors witness the failure;
//! * do squared distances of a point set behave Euclidean-ly (Cayley-Menger
//!   determinants, affine dependence, trilateration from anchor distances);
//! * does a distance-preserving correspondence between two finite point sets
//!   extend to an orthogonal affine map of the whole space;
//! * how do equidistant sets and isosceles configurations look in a given norm
//!   (locus tracing, strict-convexity probes).
//!
//! Everything is generic over the scalar type via [`scalar::Real`]; the f64
//! aliases below cover the common case. All searches are seeded and
//! deterministic: the same inputs and seed produce the same outputs.

pub mod characterizations;
pub mod distance_geometry;
pub mod extension;
pub mod json;
pub mod linalg;
pub mod locus;
pub mod polarization;
pub mod scalar;
pub mod spaces;

pub use scalar::{real, Real, Tolerances};
pub use spaces::{
    deterministic_unit_family, sample_unit_vectors, ComplexStructure, NormKind, NormedSpace,
    PointConfig, QuadraticNorm, ScalarField, SpaceError,
};

/// Lossy diagnostic conversion used in error payloads and reports.
pub fn scalar_to_f64<T: num_traits::ToPrimitive>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Concrete aliases for the default binary64 instantiation.
pub type Vector64 = nalgebra::DVector<f64>;
pub type Matrix64 = nalgebra::DMatrix<f64>;
pub type NormedSpace64 = spaces::NormedSpace<f64>;
pub type PointConfig64 = spaces::PointConfig<f64>;
pub type Tolerances64 = scalar::Tolerances<f64>;
