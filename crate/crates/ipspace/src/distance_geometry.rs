//! Distance matrices, the bordered squared-distance determinant test for
//! affine dependence, and trilateration within the span of anchor points.

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::linalg::pivoted_gram_cholesky;
use crate::polarization::{gram_matrix, PolarizationError};
use crate::scalar::{real, Real, Tolerances};
use crate::spaces::{NormKind, NormedSpace, PointConfig, ScalarField, SpaceError};

/// Pairwise distances of a point list; index 0 is the base point.
///
/// Valid instances are symmetric, zero on the diagonal, nonnegative, and
/// satisfy the triangle inequality within `1e-9 * (1 + max entry)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix<T> {
    entries: DMatrix<T>,
}

impl<T: Real> DistanceMatrix<T> {
    pub fn new(entries: DMatrix<T>) -> Result<Self, DistanceGeometryError> {
        if entries.nrows() != entries.ncols() || entries.nrows() == 0 {
            return Err(DistanceGeometryError::InvalidDistanceMatrix(format!(
                "expected a nonempty square matrix, got {}x{}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        let n = entries.nrows();
        let mut scale = T::zero();
        for i in 0..n {
            for j in 0..n {
                let e = entries[(i, j)];
                if !e.is_finite() {
                    return Err(DistanceGeometryError::InvalidDistanceMatrix(
                        "entries must be finite".into(),
                    ));
                }
                if e < T::zero() {
                    return Err(DistanceGeometryError::InvalidDistanceMatrix(format!(
                        "negative distance at ({i}, {j})"
                    )));
                }
                scale = scale.max(e);
            }
        }
        let sym_tol = real::<T>(1e-12) * (T::one() + scale);
        let tri_tol = real::<T>(1e-9) * (T::one() + scale);
        for i in 0..n {
            if entries[(i, i)].abs() > sym_tol {
                return Err(DistanceGeometryError::InvalidDistanceMatrix(format!(
                    "nonzero diagonal at ({i}, {i})"
                )));
            }
            for j in (i + 1)..n {
                if (entries[(i, j)] - entries[(j, i)]).abs() > sym_tol {
                    return Err(DistanceGeometryError::InvalidDistanceMatrix(format!(
                        "asymmetric at ({i}, {j})"
                    )));
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if entries[(i, j)] > entries[(i, k)] + entries[(k, j)] + tri_tol {
                        return Err(DistanceGeometryError::InvalidDistanceMatrix(format!(
                            "triangle inequality fails on ({i}, {j}, {k})"
                        )));
                    }
                }
            }
        }
        Ok(DistanceMatrix { entries })
    }

    pub fn entries(&self) -> &DMatrix<T> {
        &self.entries
    }

    /// Number of points.
    pub fn len(&self) -> usize {
        self.entries.nrows()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Largest entry.
    pub fn max_distance(&self) -> T {
        self.entries.iter().fold(T::zero(), |a, &b| a.max(b))
    }
}

/// Bordered matrix of squared distances: top-left block `d_ij^2`, a final row
/// and column of ones, and a zero corner.
#[derive(Debug, Clone, PartialEq)]
pub struct CayleyMengerMatrix<T> {
    entries: DMatrix<T>,
}

impl<T: Real> CayleyMengerMatrix<T> {
    pub fn entries(&self) -> &DMatrix<T> {
        &self.entries
    }
}

/// Determinant of the bordered matrix, computed on distance entries divided by
/// `scale` (a similarity transform, so the sign and vanishing are preserved)
/// and mapped back. `raw` overflows to infinity for large well-spread
/// configurations; `normalized` is the decision quantity.
#[derive(Debug, Clone, PartialEq)]
pub struct CmDeterminant<T> {
    pub normalized: T,
    pub raw: T,
    pub scale: T,
}

/// Verdict and diagnostics of the affine-dependence test.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineDependence<T> {
    pub dependent: bool,
    pub determinant: CmDeterminant<T>,
    /// Smallest eigenvalue of the base-point Gram built from the distances;
    /// certifies Euclidean realizability when nonnegative within tolerance.
    pub gram_min_eigenvalue: T,
}

/// Recovered point and span diagnostics from trilateration.
#[derive(Debug, Clone, PartialEq)]
pub struct Trilateration<T> {
    /// In-span solution in the ambient coordinates of the anchor space.
    pub point: DVector<T>,
    /// `d_0^2 - ||point||^2`: squared distance from the target to the anchor
    /// span. Zero (within tolerance) certifies unique recovery.
    pub out_of_span_residual: T,
    pub unique: bool,
    /// Worst defect of the recovered point against the linear system.
    pub system_residual: T,
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum DistanceGeometryError {
    #[error("invalid distance matrix: {0}")]
    InvalidDistanceMatrix(String),
    #[error("distance {index} is negative")]
    NegativeDistance { index: usize },
    #[error("first anchor must be the origin (norm {norm:.3e})")]
    FirstAnchorNotOrigin { norm: f64 },
    #[error("operation requires a Euclidean-compatible space, got {kind}")]
    UnsupportedSpace { kind: String },
    #[error("expected {expected} distances, got {got}")]
    DistanceCountMismatch { expected: usize, got: usize },
    #[error("distances are mutually inconsistent (residual {residual:.3e})")]
    InconsistentDistances { residual: f64 },
    #[error("distances are not Euclidean-realizable (min Gram eigenvalue {min_eigenvalue:.3e})")]
    NotEuclideanRealizable { min_eigenvalue: f64 },
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error(transparent)]
    Polarization(#[from] PolarizationError),
}

impl DistanceGeometryError {
    pub fn name(&self) -> &'static str {
        match self {
            DistanceGeometryError::InvalidDistanceMatrix(_) => "InvalidDistanceMatrix",
            DistanceGeometryError::NegativeDistance { .. } => "NegativeDistance",
            DistanceGeometryError::FirstAnchorNotOrigin { .. } => "FirstAnchorNotOrigin",
            DistanceGeometryError::UnsupportedSpace { .. } => "UnsupportedSpace",
            DistanceGeometryError::DistanceCountMismatch { .. } => "DistanceCountMismatch",
            DistanceGeometryError::InconsistentDistances { .. } => "InconsistentDistances",
            DistanceGeometryError::NotEuclideanRealizable { .. } => "NotEuclideanRealizable",
            DistanceGeometryError::Space(e) => e.name(),
            DistanceGeometryError::Polarization(e) => e.name(),
        }
    }
}

/// Pairwise distances of a configuration in its own norm.
pub fn distance_matrix<T: Real>(
    config: &PointConfig<T>,
) -> Result<DistanceMatrix<T>, DistanceGeometryError> {
    let n = config.len();
    let mut entries = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in (i + 1)..n {
            let d = config.space.distance(&config.points[i], &config.points[j])?;
            entries[(i, j)] = d;
            entries[(j, i)] = d;
        }
    }
    DistanceMatrix::new(entries)
}

/// Builds the bordered squared-distance matrix in the standard layout.
pub fn cayley_menger<T: Real>(dm: &DistanceMatrix<T>) -> CayleyMengerMatrix<T> {
    let n = dm.len();
    let mut m = DMatrix::zeros(n + 1, n + 1);
    for i in 0..n {
        for j in 0..n {
            let d = dm.entries()[(i, j)];
            m[(i, j)] = d * d;
        }
        m[(i, n)] = T::one();
        m[(n, i)] = T::one();
    }
    CayleyMengerMatrix { entries: m }
}

/// Determinant of the bordered matrix with scale normalization.
pub fn cm_determinant<T: Real>(dm: &DistanceMatrix<T>) -> CmDeterminant<T> {
    let n = dm.len();
    let s = {
        let m = dm.max_distance();
        if m > T::zero() {
            m
        } else {
            T::one()
        }
    };
    let mut m = DMatrix::zeros(n + 1, n + 1);
    for i in 0..n {
        for j in 0..n {
            let d = dm.entries()[(i, j)] / s;
            m[(i, j)] = d * d;
        }
        m[(i, n)] = T::one();
        m[(n, i)] = T::one();
    }
    let normalized = m.determinant();
    // The normalization is conjugation by diag(1/s, ..., 1/s, s), whose
    // squared determinant is s^(-2(n-1)).
    let raw = normalized * s.powi(2 * (n as i32 - 1));
    CmDeterminant { normalized, raw, scale: s }
}

/// Gram matrix of `x_i - x_0` reconstructed from distances alone:
/// `G_ij = (d_0i^2 + d_0j^2 - d_ij^2) / 2`.
fn gram_from_distances<T: Real>(dm: &DistanceMatrix<T>) -> DMatrix<T> {
    let n = dm.len() - 1;
    let half = real::<T>(0.5);
    let d = dm.entries();
    let mut g = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let a = d[(0, i + 1)];
            let b = d[(0, j + 1)];
            let c = d[(i + 1, j + 1)];
            g[(i, j)] = (a * a + b * b - c * c) * half;
        }
    }
    g
}

/// Whether the points realizing `dm` lie in an affine subspace of dimension
/// less than `len - 1`. Refuses distance data with no Euclidean realization,
/// detected by a significantly negative eigenvalue of the base-point Gram.
pub fn is_affinely_dependent<T: Real>(
    dm: &DistanceMatrix<T>,
    tolerances: &Tolerances<T>,
) -> Result<AffineDependence<T>, DistanceGeometryError> {
    let n = dm.len();
    let mut gram_min = T::zero();
    if n > 1 {
        let g = gram_from_distances(dm);
        let eigs = crate::linalg::symmetric_eigenvalues(&g);
        let max_eig = eigs.first().copied().unwrap_or(T::zero()).max(T::one());
        gram_min = eigs.last().copied().unwrap_or(T::zero());
        if gram_min < -real::<T>(1e-9) * max_eig {
            return Err(DistanceGeometryError::NotEuclideanRealizable {
                min_eigenvalue: crate::scalar_to_f64(gram_min),
            });
        }
    }
    let determinant = cm_determinant(dm);
    let dependent = determinant.normalized.abs() <= tolerances.residual_tol;
    Ok(AffineDependence { dependent, determinant, gram_min_eigenvalue: gram_min })
}

fn require_euclidean<T: Real>(space: &NormedSpace<T>) -> Result<(), DistanceGeometryError> {
    let ok = space.field() == ScalarField::Real
        && match space.kind() {
            NormKind::P(p) => *p == real::<T>(2.0),
            NormKind::WeightedP { p, .. } => *p == real::<T>(2.0),
            NormKind::Quadratic(_) => true,
            NormKind::Sup => false,
        };
    if ok {
        Ok(())
    } else {
        Err(DistanceGeometryError::UnsupportedSpace { kind: format!("{:?}", space.kind()) })
    }
}

/// Recovers a point from its distances to anchors whose first element is the
/// origin. Solves `<y, y_j> = (||y_j||^2 + d_0^2 - d_j^2) / 2` by forward
/// substitution on a pivoted factorization of the anchor Gram; the remaining
/// equations are checked rather than fitted, so mutually impossible distances
/// surface as an error instead of a silently bad fit.
pub fn trilaterate<T: Real>(
    anchors: &PointConfig<T>,
    dists: &[T],
    tolerances: &Tolerances<T>,
) -> Result<Trilateration<T>, DistanceGeometryError> {
    let space = &anchors.space;
    require_euclidean(space)?;
    if dists.len() != anchors.len() {
        return Err(DistanceGeometryError::DistanceCountMismatch {
            expected: anchors.len(),
            got: dists.len(),
        });
    }
    for (index, d) in dists.iter().enumerate() {
        if !d.is_finite() || *d < T::zero() {
            return Err(DistanceGeometryError::NegativeDistance { index });
        }
    }
    let base_norm = space.norm(&anchors.points[0])?;
    if base_norm > real::<T>(1e-12) {
        return Err(DistanceGeometryError::FirstAnchorNotOrigin {
            norm: crate::scalar_to_f64(base_norm),
        });
    }

    let n = anchors.len() - 1;
    let d0 = dists[0];
    let half = real::<T>(0.5);
    let mut scale = T::one() + d0 * d0;
    let mut b = DVector::zeros(n);
    let mut anchor_norms = Vec::with_capacity(n);
    for j in 0..n {
        let nj = space.norm(&anchors.points[j + 1])?;
        anchor_norms.push(nj);
        scale = scale.max(T::one() + nj * nj);
        let dj = dists[j + 1];
        b[j] = (nj * nj + d0 * d0 - dj * dj) * half;
    }

    let tol = tolerances.residual_tol * scale;
    let mut point = DVector::zeros(space.real_dim());
    let mut system_residual = T::zero();
    if n > 0 {
        let gram = gram_matrix(anchors, 0)?;
        let g = DMatrix::from_fn(n, n, |i, j| gram.entries[(i, j)]);
        let piv = pivoted_gram_cholesky(&g, tolerances.rank_tol);
        let r = piv.rank();
        // Forward substitution on the pivot rows of the factor: row p_i of
        // `coeffs` is lower-triangular over the pivot sequence.
        let mut z = DVector::zeros(r);
        for i in 0..r {
            let row = piv.pivots[i];
            let mut acc = b[row];
            for l in 0..i {
                acc -= piv.coeffs[(row, l)] * z[l];
            }
            z[i] = acc / piv.coeffs[(row, i)];
        }
        // Coefficients against the pivot anchors themselves.
        let mut c = DVector::zeros(r);
        for i in (0..r).rev() {
            let mut acc = z[i];
            for l in (i + 1)..r {
                acc -= piv.coeffs[(piv.pivots[l], i)] * c[l];
            }
            c[i] = acc / piv.coeffs[(piv.pivots[i], i)];
        }
        for i in 0..r {
            point.axpy(c[i], &anchors.points[piv.pivots[i] + 1], T::one());
        }
        // Non-pivot equations must already be satisfied.
        for j in 0..n {
            let mut lhs = T::zero();
            for i in 0..r {
                lhs += g[(j, piv.pivots[i])] * c[i];
            }
            system_residual = system_residual.max((lhs - b[j]).abs());
        }
        if system_residual > tol {
            return Err(DistanceGeometryError::InconsistentDistances {
                residual: crate::scalar_to_f64(system_residual),
            });
        }
    }

    let point_norm = space.norm(&point)?;
    let mut out = d0 * d0 - point_norm * point_norm;
    if out < T::zero() {
        if out < -tol {
            return Err(DistanceGeometryError::InconsistentDistances {
                residual: crate::scalar_to_f64(-out),
            });
        }
        out = T::zero();
    }
    Ok(Trilateration { point, out_of_span_residual: out, unique: out <= tol, system_residual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::{NormKind, NormedSpace, QuadraticNorm};
    use approx::assert_relative_eq;

    fn config(space: NormedSpace<f64>, pts: &[[f64; 2]]) -> PointConfig<f64> {
        let points = pts.iter().map(|p| DVector::from_vec(p.to_vec())).collect();
        PointConfig::new(space, points).unwrap()
    }

    fn dm_from(rows: &[&[f64]]) -> DistanceMatrix<f64> {
        let n = rows.len();
        DistanceMatrix::new(DMatrix::from_fn(n, n, |i, j| rows[i][j])).unwrap()
    }

    #[test]
    fn distances_in_l2_and_l1() {
        let e2 = NormedSpace::<f64>::euclidean(2);
        let dm = distance_matrix(&config(e2, &[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])).unwrap();
        let r2 = 2f64.sqrt();
        assert_relative_eq!(dm.entries()[(0, 1)], 1.0);
        assert_relative_eq!(dm.entries()[(1, 2)], r2);
        let l1 = NormedSpace::new_real(2, NormKind::P(1.0)).unwrap();
        let dm = distance_matrix(&config(l1, &[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])).unwrap();
        assert_relative_eq!(dm.entries()[(1, 2)], 2.0);
    }

    #[test]
    fn single_point_distance_matrix() {
        let e2 = NormedSpace::<f64>::euclidean(2);
        let dm = distance_matrix(&config(e2, &[[3.0, 4.0]])).unwrap();
        assert_eq!(dm.len(), 1);
        assert_eq!(dm.entries()[(0, 0)], 0.0);
    }

    #[test]
    fn invalid_matrices_are_rejected() {
        let asym = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 2.0, 0.0]);
        assert!(DistanceMatrix::new(asym).is_err());
        let diag = DMatrix::from_row_slice(2, 2, &[0.5, 1.0, 1.0, 0.0]);
        assert!(DistanceMatrix::new(diag).is_err());
        let neg = DMatrix::from_row_slice(2, 2, &[0.0, -1.0, -1.0, 0.0]);
        assert!(DistanceMatrix::new(neg).is_err());
        let tri =
            DMatrix::from_row_slice(3, 3, &[0.0, 1.0, 3.0, 1.0, 0.0, 1.0, 3.0, 1.0, 0.0]);
        assert!(DistanceMatrix::new(tri).is_err());
    }

    #[test]
    fn bordered_matrix_layout() {
        let dm = dm_from(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let cm = cayley_menger(&dm);
        let expect = DMatrix::from_row_slice(3, 3, &[0.0, 1.0, 1.0, 1.0, 0.0, 1.0, 1.0, 1.0, 0.0]);
        assert_eq!(cm.entries(), &expect);
    }

    #[test]
    fn equilateral_triangle_determinant() {
        let dm = dm_from(&[&[0.0, 1.0, 1.0], &[1.0, 0.0, 1.0], &[1.0, 1.0, 0.0]]);
        let det = cm_determinant(&dm);
        assert_relative_eq!(det.raw, -3.0, epsilon = 1e-9);
        let dep = is_affinely_dependent(&dm, &Tolerances::default()).unwrap();
        assert!(!dep.dependent);
    }

    #[test]
    fn collinear_points_are_dependent() {
        let dm = dm_from(&[&[0.0, 1.0, 2.0], &[1.0, 0.0, 1.0], &[2.0, 1.0, 0.0]]);
        let dep = is_affinely_dependent(&dm, &Tolerances::default()).unwrap();
        assert!(dep.dependent);
        assert!(dep.determinant.normalized.abs() <= 1e-9);
    }

    #[test]
    fn two_points_determinant_scales_as_distance_squared() {
        let d = 3.0;
        let dm = dm_from(&[&[0.0, d], &[d, 0.0]]);
        let det = cm_determinant(&dm);
        assert_relative_eq!(det.raw, 2.0 * d * d, epsilon = 1e-12);
        assert_relative_eq!(det.normalized, 2.0, epsilon = 1e-12);
    }

    #[test]
    fn l1_square_distances_are_not_realizable() {
        // Unit square corners in the 1-norm: all four side distances are 1 and
        // both diagonals are 2, which no Euclidean configuration matches.
        let l1 = NormedSpace::new_real(2, NormKind::P(1.0)).unwrap();
        let cfg = config(l1, &[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]]);
        let dm = distance_matrix(&cfg).unwrap();
        let err = is_affinely_dependent(&dm, &Tolerances::default()).unwrap_err();
        match err {
            DistanceGeometryError::NotEuclideanRealizable { min_eigenvalue } => {
                assert_relative_eq!(min_eigenvalue, 2.0 - 2.0 * 3f64.sqrt(), epsilon = 1e-9);
            }
            other => panic!("expected NotEuclideanRealizable, got {other:?}"),
        }
    }

    #[test]
    fn trilateration_recovers_in_span_point() {
        let e2 = NormedSpace::<f64>::euclidean(2);
        let anchors = config(e2, &[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]);
        let dists = [1.0, 0.8f64.sqrt(), 0.4f64.sqrt()];
        let t = trilaterate(&anchors, &dists, &Tolerances::default()).unwrap();
        assert_relative_eq!(t.point[0], 0.6, epsilon = 1e-10);
        assert_relative_eq!(t.point[1], 0.8, epsilon = 1e-10);
        assert!(t.unique);
        assert!(t.out_of_span_residual <= 1e-12);
    }

    #[test]
    fn trilateration_flags_out_of_span_target() {
        let e2 = NormedSpace::<f64>::euclidean(2);
        let anchors = config(e2, &[[0.0, 0.0], [1.0, 0.0]]);
        let d = 1.25f64.sqrt();
        let t = trilaterate(&anchors, &[d, d], &Tolerances::default()).unwrap();
        assert_relative_eq!(t.point[0], 0.5, epsilon = 1e-12);
        assert_relative_eq!(t.point[1], 0.0, epsilon = 1e-12);
        assert_relative_eq!(t.out_of_span_residual, 1.0, epsilon = 1e-8);
        assert!(!t.unique);
    }

    #[test]
    fn trilateration_from_origin_alone() {
        let e2 = NormedSpace::<f64>::euclidean(2);
        let anchors = config(e2, &[[0.0, 0.0]]);
        let t = trilaterate(&anchors, &[0.0], &Tolerances::default()).unwrap();
        assert_eq!(t.point, DVector::from_vec(vec![0.0, 0.0]));
        assert!(t.unique);
    }

    #[test]
    fn trilateration_rejects_bad_inputs() {
        let e2 = NormedSpace::<f64>::euclidean(2);
        let anchors = config(e2.clone(), &[[0.0, 0.0], [1.0, 0.0]]);
        let t = Tolerances::default();
        let e = trilaterate(&anchors, &[1.0], &t).unwrap_err();
        assert_eq!(e.name(), "DistanceCountMismatch");
        let e = trilaterate(&anchors, &[1.0, -1.0], &t).unwrap_err();
        assert_eq!(e.name(), "NegativeDistance");
        let shifted = config(e2, &[[1.0, 0.0], [0.0, 0.0]]);
        let e = trilaterate(&shifted, &[1.0, 1.0], &t).unwrap_err();
        assert_eq!(e.name(), "FirstAnchorNotOrigin");
        let l1 = NormedSpace::new_real(2, NormKind::P(1.0)).unwrap();
        let anchors1 = config(l1, &[[0.0, 0.0], [1.0, 0.0]]);
        let e = trilaterate(&anchors1, &[1.0, 1.0], &t).unwrap_err();
        assert_eq!(e.name(), "UnsupportedSpace");
    }

    #[test]
    fn trilateration_detects_inconsistent_distances() {
        // Collinear anchors 0, e1, 2 e1: the two equations force
        // <y, 2 e1> = 2 <y, e1>, which these distances contradict.
        let e2 = NormedSpace::<f64>::euclidean(2);
        let anchors = config(e2, &[[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]]);
        let e = trilaterate(&anchors, &[1.0, 1.0, 1.0], &Tolerances::default()).unwrap_err();
        assert_eq!(e.name(), "InconsistentDistances");
    }

    #[test]
    fn trilateration_in_quadratic_space() {
        let q = DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 1.0]);
        let space =
            NormedSpace::new_real(2, NormKind::Quadratic(QuadraticNorm::new(q).unwrap())).unwrap();
        let y = DVector::from_vec(vec![0.5, 0.25]);
        let pts = vec![
            DVector::from_vec(vec![0.0, 0.0]),
            DVector::from_vec(vec![1.0, 0.0]),
            DVector::from_vec(vec![0.0, 1.0]),
        ];
        let dists: Vec<f64> =
            pts.iter().map(|p| space.distance(&y, p).unwrap()).collect();
        let anchors = PointConfig::new(space, pts).unwrap();
        let t = trilaterate(&anchors, &dists, &Tolerances::default()).unwrap();
        assert_relative_eq!(t.point[0], y[0], epsilon = 1e-10);
        assert_relative_eq!(t.point[1], y[1], epsilon = 1e-10);
        assert!(t.unique);
    }

    #[test]
    fn rank_deficient_anchors_still_solve_consistently() {
        // Duplicate anchor directions: consistent distances solve fine.
        let e2 = NormedSpace::<f64>::euclidean(2);
        let y = DVector::from_vec(vec![0.3, 0.0]);
        let pts = vec![
            DVector::from_vec(vec![0.0, 0.0]),
            DVector::from_vec(vec![1.0, 0.0]),
            DVector::from_vec(vec![2.0, 0.0]),
        ];
        let dists: Vec<f64> = pts.iter().map(|p| e2.distance(&y, p).unwrap()).collect();
        let anchors = PointConfig::new(e2, pts).unwrap();
        let t = trilaterate(&anchors, &dists, &Tolerances::default()).unwrap();
        assert_relative_eq!(t.point[0], 0.3, epsilon = 1e-10);
        assert!(t.unique);
    }
}
