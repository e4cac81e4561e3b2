//! Extending finite-point isometries of Euclidean-compatible spaces to full
//! orthogonal maps, certifying when no extension can exist, and checking
//! complex linearity of real extensions.

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::characterizations::{search_violation, CharacterizationError, Condition, Witness};
use crate::linalg::{complete_frame, max_abs, orthonormal_frame, pivoted_gram_cholesky, symmetric_eigenvalues};
use crate::polarization::{gram_matrix, PolarizationError};
use crate::scalar::{real, Real, Tolerances};
use crate::spaces::{ComplexStructure, NormKind, NormedSpace, PointConfig, ScalarField, SpaceError};

/// A pairing of two point configurations in the same space: source point `i`
/// corresponds to target point `pairing[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Correspondence<T> {
    pub source: PointConfig<T>,
    pub target: PointConfig<T>,
    pub pairing: Vec<usize>,
}

impl<T: Real> Correspondence<T> {
    pub fn new(
        source: PointConfig<T>,
        target: PointConfig<T>,
        pairing: Vec<usize>,
    ) -> Result<Self, ExtensionError> {
        if source.space != target.space {
            return Err(ExtensionError::SpaceMismatch);
        }
        if source.len() != target.len() || pairing.len() != source.len() {
            return Err(ExtensionError::InvalidCorrespondence(format!(
                "sizes disagree: {} source, {} target, {} pairing entries",
                source.len(),
                target.len(),
                pairing.len()
            )));
        }
        let mut seen = vec![false; pairing.len()];
        for &p in &pairing {
            if p >= pairing.len() || seen[p] {
                return Err(ExtensionError::InvalidCorrespondence(
                    "pairing is not a bijection on indices".into(),
                ));
            }
            seen[p] = true;
        }
        Ok(Correspondence { source, target, pairing })
    }

    /// Pairs points in list order.
    pub fn in_order(source: PointConfig<T>, target: PointConfig<T>) -> Result<Self, ExtensionError> {
        let pairing = (0..source.len()).collect();
        Correspondence::new(source, target, pairing)
    }

    pub fn len(&self) -> usize {
        self.source.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    fn image(&self, i: usize) -> &DVector<T> {
        &self.target.points[self.pairing[i]]
    }
}

/// Distance-preservation report for a correspondence.
#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport<T> {
    pub is_isometry: bool,
    /// Largest discrepancy between source and image distances.
    pub max_defect: T,
}

/// An affine orthogonal map `x -> Q (x + pre_translation) + post_translation`
/// agreeing with a correspondence on every paired point.
#[derive(Debug, Clone, PartialEq)]
pub struct OrthogonalExtension<T> {
    /// Linear part in the original coordinates of the space.
    pub q: DMatrix<T>,
    /// The same map in the Euclidean working coordinates of the space's
    /// quadratic form; orthogonal in the literal `Q^T Q = I` sense. Equals `q`
    /// for plain 2-norms.
    pub euclidean_factor: DMatrix<T>,
    /// `-y_0`, the shift taking the base source point to the origin.
    pub pre_translation: DVector<T>,
    /// `T(y_0)`, the shift placing the image of the base point.
    pub post_translation: DVector<T>,
    /// Largest distance between a mapped source point and its target.
    pub max_defect: T,
}

impl<T: Real> OrthogonalExtension<T> {
    pub fn apply(&self, x: &DVector<T>) -> Result<DVector<T>, ExtensionError> {
        if x.len() != self.q.ncols() {
            return Err(ExtensionError::Space(SpaceError::DimensionMismatch {
                expected: self.q.ncols(),
                got: x.len(),
            }));
        }
        Ok(&self.q * (x + &self.pre_translation) + &self.post_translation)
    }
}

/// Residuals of `Q` against the complex structure `J`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexLinearity<T> {
    /// `max |QJ - JQ|`; zero means the real map is complex-linear.
    pub commutator_max: T,
    /// `max |QJ + JQ|`; zero means the real map is conjugate-linear.
    pub anticommutator_max: T,
}

/// Proof object that a two-point flip admits no isometric extension of the
/// whole space: extending it would force a scaled-swap identity the space
/// measurably violates.
#[derive(Debug, Clone, PartialEq)]
pub struct FlipCertificate<T> {
    pub f_prime: DVector<T>,
    pub g_prime: DVector<T>,
    pub gamma_prime: T,
    /// Measured defect `| ||f' + c g'|| - ||g' + c f'|| |` at `c = gamma'`.
    pub residual: T,
    /// `| ||f'|| - ||g'|| |`; the flip hypothesis.
    pub norm_gap: T,
    /// Distance defect of swapping f' and g' in the triangle {0, f', g'}.
    pub flip_defect: T,
    pub triangle: PointConfig<T>,
    pub witness: Witness<T>,
    pub explanation: String,
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum ExtensionError {
    #[error("invalid correspondence: {0}")]
    InvalidCorrespondence(String),
    #[error("source and target configurations live in different spaces")]
    SpaceMismatch,
    #[error("correspondence is not an isometry (max defect {defect:.3e})")]
    NotAnIsometry { defect: f64 },
    #[error("Gram matrices of source and target disagree (max defect {defect:.3e})")]
    GramMismatch { defect: f64 },
    #[error("pivot Gram is too ill-conditioned to extend (condition {condition:.3e})")]
    RankDeficiencyUnstable { condition: f64 },
    #[error("operation requires a Euclidean-compatible space, got {kind}")]
    UnsupportedSpace { kind: String },
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error(transparent)]
    Polarization(#[from] PolarizationError),
    #[error(transparent)]
    Characterization(#[from] CharacterizationError),
}

impl ExtensionError {
    pub fn name(&self) -> &'static str {
        match self {
            ExtensionError::InvalidCorrespondence(_) => "InvalidCorrespondence",
            ExtensionError::SpaceMismatch => "SpaceMismatch",
            ExtensionError::NotAnIsometry { .. } => "NotAnIsometry",
            ExtensionError::GramMismatch { .. } => "GramMismatch",
            ExtensionError::RankDeficiencyUnstable { .. } => "RankDeficiencyUnstable",
            ExtensionError::UnsupportedSpace { .. } => "UnsupportedSpace",
            ExtensionError::InvalidParameters(_) => "InvalidParameters",
            ExtensionError::Space(e) => e.name(),
            ExtensionError::Polarization(e) => e.name(),
            ExtensionError::Characterization(e) => e.name(),
        }
    }
}

/// Checks that paired points have pairwise-equal distances on both sides.
pub fn verify_isometry<T: Real>(
    corr: &Correspondence<T>,
    tolerances: &Tolerances<T>,
) -> Result<VerifyReport<T>, ExtensionError> {
    let space = &corr.source.space;
    let mut max_defect = T::zero();
    let mut max_dist = T::zero();
    for i in 0..corr.len() {
        for j in (i + 1)..corr.len() {
            let d_src = space.distance(&corr.source.points[i], &corr.source.points[j])?;
            let d_tgt = space.distance(corr.image(i), corr.image(j))?;
            max_defect = max_defect.max((d_src - d_tgt).abs());
            max_dist = max_dist.max(d_src);
        }
    }
    let is_isometry = max_defect <= tolerances.residual_tol * (T::one() + max_dist);
    Ok(VerifyReport { is_isometry, max_defect })
}

/// Change of coordinates taking the space's norm to the plain 2-norm.
enum WorkingCoords<T> {
    Identity,
    /// Per-coordinate positive scalings (square roots of the weights).
    Diagonal(DVector<T>),
    /// Lower-triangular `L` with `Q = L L^T`; working coordinates are `L^T x`.
    Cholesky(DMatrix<T>),
}

impl<T: Real> WorkingCoords<T> {
    fn for_space(space: &NormedSpace<T>) -> Result<Self, ExtensionError> {
        let two = real::<T>(2.0);
        if space.field() != ScalarField::Real {
            return Err(ExtensionError::UnsupportedSpace { kind: "complex scalars (realify first)".into() });
        }
        match space.kind() {
            NormKind::P(p) if *p == two => Ok(WorkingCoords::Identity),
            NormKind::WeightedP { p, weights } if *p == two => {
                let mut scales = DVector::zeros(space.real_dim());
                for i in 0..space.real_dim() {
                    let entity = if space.is_paired() { i / 2 } else { i };
                    scales[i] = weights[entity].sqrt();
                }
                Ok(WorkingCoords::Diagonal(scales))
            }
            NormKind::Quadratic(qn) => Ok(WorkingCoords::Cholesky(qn.cholesky_l().clone())),
            other => Err(ExtensionError::UnsupportedSpace { kind: format!("{other:?}") }),
        }
    }

    fn to_working(&self, x: &DVector<T>) -> DVector<T> {
        match self {
            WorkingCoords::Identity => x.clone(),
            WorkingCoords::Diagonal(s) => x.component_mul(s),
            WorkingCoords::Cholesky(l) => l.transpose() * x,
        }
    }

    /// Conjugates a working-coordinates linear map back to the original ones.
    fn map_to_original(&self, q: &DMatrix<T>) -> DMatrix<T> {
        match self {
            WorkingCoords::Identity => q.clone(),
            WorkingCoords::Diagonal(s) => {
                DMatrix::from_fn(q.nrows(), q.ncols(), |i, j| q[(i, j)] * s[j] / s[i])
            }
            WorkingCoords::Cholesky(l) => {
                let rhs = q * l.transpose();
                l.tr_solve_lower_triangular(&rhs)
                    .expect("cached Cholesky factor is invertible")
            }
        }
    }
}

/// Extends an isometric correspondence in a Euclidean-compatible space to an
/// affine orthogonal map of the whole space.
///
/// After translating the base points to the origin and switching to Euclidean
/// working coordinates, the source and target Gram matrices must agree; a
/// pivoted factorization picks a maximal independent subset, orthonormal
/// frames are built over the pivots on both sides, completed by standard basis
/// vectors in index order, and the frames are matched index by index. The
/// result reproduces every paired point, not only the pivots, because equal
/// Grams force equal coefficients.
pub fn extend_isometry<T: Real>(
    corr: &Correspondence<T>,
    tolerances: &Tolerances<T>,
) -> Result<OrthogonalExtension<T>, ExtensionError> {
    let space = &corr.source.space;
    let coords = WorkingCoords::for_space(space)?;
    let verify = verify_isometry(corr, tolerances)?;
    if !verify.is_isometry {
        return Err(ExtensionError::NotAnIsometry { defect: crate::scalar_to_f64(verify.max_defect) });
    }

    let k = space.real_dim();
    let m = corr.len();
    let y0 = corr.source.points[0].clone();
    let ty0 = corr.image(0).clone();

    // Translated points in working coordinates; index 0 is the origin.
    let working = NormedSpace::<T>::euclidean(k);
    let mut u = Vec::with_capacity(m);
    let mut v = Vec::with_capacity(m);
    for i in 0..m {
        u.push(coords.to_working(&(&corr.source.points[i] - &y0)));
        v.push(coords.to_working(&(corr.image(i) - &ty0)));
    }
    let cfg_u = PointConfig::new(working.clone(), u.clone())?;
    let cfg_v = PointConfig::new(working, v.clone())?;
    let gram_u = gram_matrix(&cfg_u, 0)?;
    let gram_v = gram_matrix(&cfg_v, 0)?;
    let gram_scale = T::one() + max_abs(&gram_u.entries).max(max_abs(&gram_v.entries));
    let gram_defect = max_abs(&(&gram_u.entries - &gram_v.entries));
    if gram_defect > tolerances.residual_tol * gram_scale {
        return Err(ExtensionError::GramMismatch { defect: crate::scalar_to_f64(gram_defect) });
    }

    let piv = pivoted_gram_cholesky(&gram_u.entries, tolerances.rank_tol);
    let r = piv.rank();
    if r > 0 {
        let sub = DMatrix::from_fn(r, r, |a, b| gram_u.entries[(piv.pivots[a], piv.pivots[b])]);
        let eigs = symmetric_eigenvalues(&sub);
        let lo = eigs.last().copied().unwrap_or(T::zero());
        let hi = eigs.first().copied().unwrap_or(T::zero());
        if lo <= T::zero() || hi / lo > real(1e12) {
            let condition = if lo > T::zero() { hi / lo } else { T::max_value().unwrap() };
            return Err(ExtensionError::RankDeficiencyUnstable {
                condition: crate::scalar_to_f64(condition),
            });
        }
    }

    // Orthonormal frames over the pivot vectors on both sides, completed by
    // standard basis vectors in index order.
    let pivot_u: Vec<DVector<T>> = piv.pivots.iter().map(|&i| u[i + 1].clone()).collect();
    let pivot_v: Vec<DVector<T>> = piv.pivots.iter().map(|&i| v[i + 1].clone()).collect();
    let frame_u = orthonormal_frame(&pivot_u, tolerances.rank_tol);
    let frame_v = orthonormal_frame(&pivot_v, tolerances.rank_tol);
    if frame_u.len() != r || frame_v.len() != r {
        return Err(ExtensionError::RankDeficiencyUnstable {
            condition: f64::INFINITY,
        });
    }
    let mut basis_u = frame_u;
    let mut basis_v = frame_v;
    basis_u.extend(complete_frame(&basis_u, k, tolerances.rank_tol));
    basis_v.extend(complete_frame(&basis_v, k, tolerances.rank_tol));
    debug_assert_eq!(basis_u.len(), k);
    debug_assert_eq!(basis_v.len(), k);

    let mut euclidean_factor = DMatrix::zeros(k, k);
    for (bu, bv) in basis_u.iter().zip(&basis_v) {
        euclidean_factor += bv * bu.transpose();
    }
    let q = coords.map_to_original(&euclidean_factor);

    let pre_translation = -&y0;
    let post_translation = ty0;
    let ext = OrthogonalExtension {
        q,
        euclidean_factor,
        pre_translation,
        post_translation,
        max_defect: T::zero(),
    };
    let mut max_defect = T::zero();
    let mut scale = T::one();
    for i in 0..m {
        let mapped = ext.apply(&corr.source.points[i])?;
        max_defect = max_defect.max(space.distance(&mapped, corr.image(i))?);
        scale = scale.max(space.norm(&(&corr.source.points[i] - &y0))?);
    }
    if max_defect > real::<T>(10.0) * tolerances.residual_tol * scale {
        // Matching Grams force matching coefficients, so a large defect here
        // means the input data was inconsistent beyond what the entrywise
        // check caught.
        return Err(ExtensionError::GramMismatch { defect: crate::scalar_to_f64(max_defect) });
    }
    Ok(OrthogonalExtension { max_defect, ..ext })
}

/// Commutator and anticommutator of an extension's working-coordinates factor
/// with a complex structure.
pub fn check_complex_linearity<T: Real>(
    ext: &OrthogonalExtension<T>,
    j: &ComplexStructure<T>,
) -> Result<ComplexLinearity<T>, ExtensionError> {
    let q = &ext.q;
    if q.nrows() != j.real_dim() {
        return Err(ExtensionError::Space(SpaceError::DimensionMismatch {
            expected: j.real_dim(),
            got: q.nrows(),
        }));
    }
    let qj = q * j.matrix();
    let jq = j.matrix() * q;
    Ok(ComplexLinearity {
        commutator_max: max_abs(&(&qj - &jq)),
        anticommutator_max: max_abs(&(&qj + &jq)),
    })
}

/// Searches for an isosceles pair whose flip cannot extend to any isometry of
/// the whole space. Euclidean-compatible spaces return `None` immediately
/// (their flips always extend); complex spaces are searched through their
/// realification.
pub fn certify_nonextendable_flip<T: Real>(
    space: &NormedSpace<T>,
    gamma_prime: T,
    budget: usize,
    seed: u64,
    tolerances: &Tolerances<T>,
) -> Result<Option<FlipCertificate<T>>, ExtensionError> {
    let cond = Condition::ScaledSwap { gamma: gamma_prime };
    cond.validate()?;
    let search_space = match space.field() {
        ScalarField::Real => space.clone(),
        ScalarField::Complex => space.realify()?.0,
    };
    if WorkingCoords::for_space(&search_space).is_ok() {
        return Ok(None);
    }
    let witness = match search_violation(&search_space, &cond, budget, seed, tolerances)? {
        Some(w) => w,
        None => return Ok(None),
    };
    let f_prime = witness.vectors[0].clone();
    let g_prime = witness.vectors[1].clone();
    let norm_gap = (search_space.norm(&f_prime)? - search_space.norm(&g_prime)?).abs();
    let zero = DVector::zeros(search_space.real_dim());
    let triangle =
        PointConfig::new(search_space, vec![zero, f_prime.clone(), g_prime.clone()])?;
    let flip = Correspondence::new(triangle.clone(), triangle.clone(), vec![0, 2, 1])?;
    let flip_defect = verify_isometry(&flip, tolerances)?.max_defect;
    let residual = witness.residual;
    let explanation = format!(
        "Swapping f' and g' is an isometry of the triangle {{0, f', g'}}: both have norm \
         distance {:.6} from 0 and their mutual distance is symmetric. Any isometry of the \
         whole space extending the flip (fixing 0) would be affine-linear by the Mazur-Ulam \
         theorem, hence linear, and linearity forces ||f' + c g'|| = ||g' + c f'|| for every \
         scalar c. At c = {:.6} the measured gap is {:.6e}, so no such extension exists.",
        crate::scalar_to_f64(triangle.space.norm(&f_prime)?),
        crate::scalar_to_f64(gamma_prime),
        crate::scalar_to_f64(residual),
    );
    Ok(Some(FlipCertificate {
        f_prime,
        g_prime,
        gamma_prime,
        residual,
        norm_gap,
        flip_defect,
        triangle,
        witness,
        explanation,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::random_orthogonal;
    use approx::assert_relative_eq;
    use nalgebra::DMatrix;
    use rand::rngs::StdRng;
    use rand::SeedableRng;

    fn vecn(xs: &[f64]) -> DVector<f64> {
        DVector::from_vec(xs.to_vec())
    }

    fn config(space: &NormedSpace<f64>, pts: &[&[f64]]) -> PointConfig<f64> {
        PointConfig::new(space.clone(), pts.iter().map(|p| vecn(p)).collect()).unwrap()
    }

    #[test]
    fn swap_of_isosceles_triangle_verifies() {
        let e2 = NormedSpace::<f64>::euclidean(2);
        let y = config(&e2, &[&[0.0, 0.0], &[1.0, 0.0], &[0.0, 1.0]]);
        let yp = config(&e2, &[&[0.0, 0.0], &[0.0, 1.0], &[1.0, 0.0]]);
        let corr = Correspondence::new(y, yp, vec![0, 1, 2]).unwrap();
        let rep = verify_isometry(&corr, &Tolerances::default()).unwrap();
        assert!(rep.is_isometry);
        assert_eq!(rep.max_defect, 0.0);
    }

    #[test]
    fn non_isometry_reports_its_defect() {
        let e2 = NormedSpace::<f64>::euclidean(2);
        let s = 1.0 / 2f64.sqrt();
        let y = config(&e2, &[&[0.0, 0.0], &[1.0, 0.0], &[0.0, 1.0]]);
        let yp = config(&e2, &[&[0.0, 0.0], &[1.0, 0.0], &[s, s]]);
        let corr = Correspondence::in_order(y, yp).unwrap();
        let rep = verify_isometry(&corr, &Tolerances::default()).unwrap();
        assert!(!rep.is_isometry);
        let expected = (2f64.sqrt() - (vecn(&[1.0, 0.0]) - vecn(&[s, s])).norm()).abs();
        assert_relative_eq!(rep.max_defect, expected, epsilon = 1e-12);
        assert!((rep.max_defect - 0.649).abs() < 1e-3);
    }

    #[test]
    fn bad_pairings_are_rejected() {
        let e2 = NormedSpace::<f64>::euclidean(2);
        let y = config(&e2, &[&[0.0, 0.0], &[1.0, 0.0]]);
        let e = Correspondence::new(y.clone(), y.clone(), vec![0, 0]).unwrap_err();
        assert_eq!(e.name(), "InvalidCorrespondence");
        let e = Correspondence::new(y.clone(), y, vec![0]).unwrap_err();
        assert_eq!(e.name(), "InvalidCorrespondence");
    }

    #[test]
    fn extends_single_segment_to_coordinate_swap() {
        let e2 = NormedSpace::<f64>::euclidean(2);
        let y = config(&e2, &[&[0.0, 0.0], &[1.0, 0.0]]);
        let yp = config(&e2, &[&[0.0, 0.0], &[0.0, 1.0]]);
        let corr = Correspondence::in_order(y, yp).unwrap();
        let ext = extend_isometry(&corr, &Tolerances::default()).unwrap();
        let swap = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        assert_eq!(ext.q, swap);
        assert!(ext.max_defect <= 1e-12);
    }

    #[test]
    fn extends_axis_flip_to_coordinate_swap() {
        let e2 = NormedSpace::<f64>::euclidean(2);
        let y = config(&e2, &[&[0.0, 0.0], &[1.0, 0.0], &[0.0, 1.0]]);
        let corr = Correspondence::new(y.clone(), y, vec![0, 2, 1]).unwrap();
        let ext = extend_isometry(&corr, &Tolerances::default()).unwrap();
        let swap = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        assert_eq!(ext.q, swap);
        let qtq = ext.euclidean_factor.transpose() * &ext.euclidean_factor;
        assert!(max_abs(&(&qtq - DMatrix::identity(2, 2))) <= 1e-12);
    }

    #[test]
    fn recovers_random_rigid_motions() {
        let t = Tolerances::default();
        for seed in 0..20u64 {
            let mut rng = StdRng::seed_from_u64(seed);
            let dim = 2 + (seed as usize % 5);
            let count = 1 + (seed as usize % 9);
            let space = NormedSpace::<f64>::euclidean(dim);
            let m = random_orthogonal::<f64>(dim, &mut rng);
            let shift = DVector::from_fn(dim, |i, _| ((i + 1) as f64) * 0.3 - 0.8);
            let mut pts = Vec::new();
            // Half the seeds confine the points to a proper subspace.
            let sub = if seed % 2 == 0 { dim } else { 1 + dim / 2 };
            for p in 0..count {
                let mut v = DVector::zeros(dim);
                for d in 0..sub {
                    v[d] = ((p * 7 + d * 3 + seed as usize) % 11) as f64 / 3.0 - 1.5;
                }
                pts.push(v);
            }
            let images: Vec<DVector<f64>> = pts.iter().map(|p| &m * p + &shift).collect();
            let y = PointConfig::new(space.clone(), pts).unwrap();
            let yp = PointConfig::new(space, images).unwrap();
            let corr = Correspondence::in_order(y, yp).unwrap();
            let ext = extend_isometry(&corr, &t).unwrap();
            assert!(ext.max_defect <= 1e-8, "seed {seed}: defect {}", ext.max_defect);
            let qtq = ext.euclidean_factor.transpose() * &ext.euclidean_factor;
            let dim_m = qtq.nrows();
            assert!(max_abs(&(&qtq - DMatrix::identity(dim_m, dim_m))) <= 1e-9);
            assert_relative_eq!(ext.euclidean_factor.determinant().abs(), 1.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn extension_is_deterministic() {
        let e3 = NormedSpace::<f64>::euclidean(3);
        let y = config(&e3, &[&[0.0, 0.0, 0.0], &[1.0, 1.0, 0.0]]);
        let yp = config(&e3, &[&[1.0, 0.0, 0.0], &[1.0, 2f64.sqrt(), 0.0]]);
        let corr = Correspondence::in_order(y, yp).unwrap();
        let a = extend_isometry(&corr, &Tolerances::default()).unwrap();
        let b = extend_isometry(&corr, &Tolerances::default()).unwrap();
        assert_eq!(a.q, b.q);
    }

    #[test]
    fn quadratic_norm_extension_round_trips() {
        let qm = DMatrix::from_row_slice(2, 2, &[2.0, 0.5, 0.5, 1.0]);
        let space = NormedSpace::new_real(
            2,
            NormKind::Quadratic(crate::spaces::QuadraticNorm::new(qm).unwrap()),
        )
        .unwrap();
        // An isometry of the quadratic norm, built from an orthogonal map in
        // working coordinates.
        let l = match space.kind() {
            NormKind::Quadratic(qn) => qn.cholesky_l().clone(),
            _ => unreachable!(),
        };
        let theta = 0.7f64;
        let rot = DMatrix::from_row_slice(2, 2, &[theta.cos(), -theta.sin(), theta.sin(), theta.cos()]);
        let m = l.transpose().try_inverse().unwrap() * &rot * l.transpose();
        let pts = vec![vecn(&[0.2, -0.4]), vecn(&[1.0, 0.3]), vecn(&[-0.7, 0.9])];
        let shift = vecn(&[0.5, -1.0]);
        let images: Vec<DVector<f64>> = pts.iter().map(|p| &m * p + &shift).collect();
        let y = PointConfig::new(space.clone(), pts).unwrap();
        let yp = PointConfig::new(space.clone(), images).unwrap();
        let corr = Correspondence::in_order(y, yp).unwrap();
        let ext = extend_isometry(&corr, &Tolerances::default()).unwrap();
        assert!(ext.max_defect <= 1e-9, "defect {}", ext.max_defect);
        // Orthogonality holds for the working-coordinates factor.
        let qtq = ext.euclidean_factor.transpose() * &ext.euclidean_factor;
        assert!(max_abs(&(&qtq - DMatrix::identity(2, 2))) <= 1e-9);
        // And the original-coordinates map preserves the quadratic norm.
        let z = vecn(&[0.31, -0.77]);
        let nz = space.norm(&z).unwrap();
        let nqz = space.norm(&(&ext.q * &z)).unwrap();
        assert_relative_eq!(nz, nqz, epsilon = 1e-10);
    }

    #[test]
    fn rejects_unsupported_spaces_and_non_isometries() {
        let l1 = NormedSpace::new_real(2, NormKind::P(1.0)).unwrap();
        let y = config(&l1, &[&[0.0, 0.0], &[1.0, 0.0]]);
        let corr = Correspondence::in_order(y.clone(), y).unwrap();
        let e = extend_isometry(&corr, &Tolerances::default()).unwrap_err();
        assert_eq!(e.name(), "UnsupportedSpace");

        let e2 = NormedSpace::<f64>::euclidean(2);
        let y = config(&e2, &[&[0.0, 0.0], &[1.0, 0.0]]);
        let yp = config(&e2, &[&[0.0, 0.0], &[2.0, 0.0]]);
        let corr = Correspondence::in_order(y, yp).unwrap();
        let e = extend_isometry(&corr, &Tolerances::default()).unwrap_err();
        assert_eq!(e.name(), "NotAnIsometry");
    }

    #[test]
    fn complex_point_rotation_needs_no_complex_linear_map() {
        // In complex coordinates: fix 0 and (1, 0), send (i, 0) to (0, 1).
        let c2 = NormedSpace::new_complex(2, NormKind::P(2.0)).unwrap();
        let (realified, j) = c2.realify().unwrap();
        let y = config(
            &realified,
            &[&[0.0, 0.0, 0.0, 0.0], &[1.0, 0.0, 0.0, 0.0], &[0.0, 1.0, 0.0, 0.0]],
        );
        let yp = config(
            &realified,
            &[&[0.0, 0.0, 0.0, 0.0], &[1.0, 0.0, 0.0, 0.0], &[0.0, 0.0, 1.0, 0.0]],
        );
        let corr = Correspondence::in_order(y, yp).unwrap();
        let ext = extend_isometry(&corr, &Tolerances::default()).unwrap();
        assert!(ext.max_defect <= 1e-12);
        let lin = check_complex_linearity(&ext, &j).unwrap();
        assert_relative_eq!(lin.commutator_max, 1.0, epsilon = 1e-12);
        assert!(lin.commutator_max >= 1.0 - 1e-12);
    }

    #[test]
    fn identity_and_j_are_complex_linear() {
        let c2 = NormedSpace::new_complex(2, NormKind::P(2.0)).unwrap();
        let (_, j) = c2.realify().unwrap();
        let id_ext = OrthogonalExtension {
            q: DMatrix::identity(4, 4),
            euclidean_factor: DMatrix::identity(4, 4),
            pre_translation: DVector::zeros(4),
            post_translation: DVector::zeros(4),
            max_defect: 0.0,
        };
        let lin = check_complex_linearity(&id_ext, &j).unwrap();
        assert_eq!(lin.commutator_max, 0.0);
        let j_ext = OrthogonalExtension {
            q: j.matrix().clone(),
            euclidean_factor: j.matrix().clone(),
            pre_translation: DVector::zeros(4),
            post_translation: DVector::zeros(4),
            max_defect: 0.0,
        };
        let lin = check_complex_linearity(&j_ext, &j).unwrap();
        assert_eq!(lin.commutator_max, 0.0);
    }

    #[test]
    fn l1_flip_certificate_matches_frozen_witness() {
        let l1 = NormedSpace::new_real(2, NormKind::P(1.0)).unwrap();
        let cert = certify_nonextendable_flip(&l1, 2.0, 64, 0, &Tolerances::default())
            .unwrap()
            .unwrap();
        assert!(cert.residual >= 1.0 - 1e-12, "residual {}", cert.residual);
        assert!(cert.norm_gap <= 1e-10);
        assert!(cert.flip_defect <= 1e-12);
        assert_eq!(cert.triangle.len(), 3);
        assert!(cert.explanation.contains("Mazur-Ulam"));
    }

    #[test]
    fn euclidean_spaces_get_no_flip_certificate() {
        let e3 = NormedSpace::<f64>::euclidean(3);
        let cert = certify_nonextendable_flip(&e3, 2.0, 1000, 0, &Tolerances::default()).unwrap();
        assert!(cert.is_none());
    }

    #[test]
    fn sup_norm_flip_certificate_exists() {
        let sup = NormedSpace::new_real(2, NormKind::Sup).unwrap();
        let cert = certify_nonextendable_flip(&sup, 2.0, 2000, 0, &Tolerances::default())
            .unwrap()
            .unwrap();
        assert!(cert.residual > 1e-3, "residual {}", cert.residual);
    }

    #[test]
    fn invalid_gamma_is_rejected() {
        let l1 = NormedSpace::new_real(2, NormKind::P(1.0)).unwrap();
        let e = certify_nonextendable_flip(&l1, 1.0, 10, 0, &Tolerances::default()).unwrap_err();
        assert_eq!(e.name(), "InvalidParameters");
    }
}
