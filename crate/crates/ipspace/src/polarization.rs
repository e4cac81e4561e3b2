//! Polarization: the candidate inner product recovered from a norm, Gram
//! matrices of point configurations, and the complex variant built from the
//! real one.
//!
//! For a true inner-product norm the polarization form reproduces the inner
//! product exactly; for any other norm it is still well defined but loses
//! bilinearity, which is what several characterization tests measure.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;
use thiserror::Error;

use crate::linalg;
use crate::scalar::Real;
use crate::spaces::{NormedSpace, PointConfig, ScalarField, SpaceError};

/// `(||u - base||^2 + ||v - base||^2 - ||u - v||^2) / 2`.
///
/// Complex spaces are accepted and treated through their realification, which
/// has the same norm on the same storage.
pub fn polarize_real<T: Real>(
    space: &NormedSpace<T>,
    u: &DVector<T>,
    v: &DVector<T>,
    base: &DVector<T>,
) -> Result<T, PolarizationError> {
    let nu = space.norm(&(u - base))?;
    let nv = space.norm(&(v - base))?;
    let nuv = space.norm(&(u - v))?;
    let two = T::one() + T::one();
    Ok((nu * nu + nv * nv - nuv * nuv) / two)
}

/// Signed parallelogram defect `||f+g||^2 + ||f-g||^2 - 2||f||^2 - 2||g||^2`;
/// zero exactly when the norm is induced by an inner product.
pub fn parallelogram_residual<T: Real>(
    space: &NormedSpace<T>,
    f: &DVector<T>,
    g: &DVector<T>,
) -> Result<T, PolarizationError> {
    let a = space.norm(&(f + g))?;
    let b = space.norm(&(f - g))?;
    let nf = space.norm(f)?;
    let ng = space.norm(g)?;
    let two = T::one() + T::one();
    Ok(a * a + b * b - two * (nf * nf + ng * ng))
}

/// Polarization Gram matrix of the non-base points of a configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct GramMatrix<T> {
    pub entries: DMatrix<T>,
    pub basepoint_index: usize,
}

impl<T: Real> GramMatrix<T> {
    /// Rank with eigenvalues below `rel_tol * max(lambda_max, 1e-12)` treated as
    /// zero.
    pub fn numerical_rank(&self, rel_tol: T) -> usize {
        linalg::numerical_rank_psd(&self.entries, rel_tol)
    }
}

/// Gram matrix `G[i][j] = polarize(y_i, y_j; base)` over the points other than
/// the base, in their original order. Symmetric by construction.
pub fn gram_matrix<T: Real>(
    config: &PointConfig<T>,
    base_index: usize,
) -> Result<GramMatrix<T>, PolarizationError> {
    let n = config.points.len();
    if base_index >= n {
        return Err(PolarizationError::BaseIndexOutOfRange { index: base_index, len: n });
    }
    let base = &config.points[base_index];
    let others: Vec<&DVector<T>> =
        config.points.iter().enumerate().filter(|(i, _)| *i != base_index).map(|(_, p)| p).collect();
    let m = others.len();
    let mut entries = DMatrix::<T>::zeros(m, m);
    for i in 0..m {
        for j in i..m {
            let v = polarize_real(&config.space, others[i], others[j], base)?;
            entries[(i, j)] = v;
            entries[(j, i)] = v;
        }
    }
    Ok(GramMatrix { entries, basepoint_index: base_index })
}

/// Complex polarization `<f, g> = <f, g>_R - i <Jf, g>_R` with base 0, linear in
/// the first argument and conjugate-linear in the second. Matches the Hermitian
/// inner product on complex l2 spaces.
pub fn polarize_complex<T: Real>(
    space: &NormedSpace<T>,
    f: &DVector<T>,
    g: &DVector<T>,
) -> Result<Complex<T>, PolarizationError> {
    if space.field() != ScalarField::Complex {
        return Err(PolarizationError::Space(SpaceError::NotComplex));
    }
    let (_, j) = space.realify()?;
    let zero = DVector::<T>::zeros(space.real_dim());
    let re = polarize_real(space, f, g, &zero)?;
    let jf = j.apply(f)?;
    let im = -polarize_real(space, &jf, g, &zero)?;
    Ok(Complex::new(re, im))
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum PolarizationError {
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error("base index {index} out of range for {len} points")]
    BaseIndexOutOfRange { index: usize, len: usize },
}

impl PolarizationError {
    pub fn name(&self) -> &'static str {
        match self {
            PolarizationError::Space(e) => e.name(),
            PolarizationError::BaseIndexOutOfRange { .. } => "BaseIndexOutOfRange",
        }
    }
}
