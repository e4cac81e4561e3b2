//! Equidistant loci between two points, isosceles configurations whose flip
//! is an isometry, and a probe for strict-convexity failures.

use nalgebra::{DMatrix, DVector};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use thiserror::Error;

use crate::extension::{verify_isometry, Correspondence, ExtensionError};
use crate::linalg::orthonormal_frame;
use crate::scalar::{real, Real, Tolerances};
use crate::spaces::{deterministic_unit_family, NormedSpace, PointConfig, SpaceError, UnitSampler};

const BISECTION_MAX_STEPS: usize = 200;
/// Minimum pairwise separation of reported locus points.
const MIN_SEPARATION: f64 = 1e-6;

/// A point of the equidistant locus between `f'` and `g'`, in ambient
/// coordinates, with its re-evaluated sign function value.
#[derive(Debug, Clone, PartialEq)]
pub struct LocusPoint<T> {
    pub h: DVector<T>,
    pub phi_value: T,
}

/// `{0, f', g', h_1, ..., h_{n-3}}` with all `h_i` equidistant from `f'` and
/// `g'`, so that swapping `f'` and `g'` while fixing the rest is an isometry
/// of the configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct IsoscelesConfig<T> {
    pub config: PointConfig<T>,
    /// Swap of indices 1 and 2, identity elsewhere.
    pub flip_pairing: Vec<usize>,
    /// Distance defect of the flip on the configuration.
    pub flip_defect: T,
    /// Sign function values of the `h_i`, in order.
    pub locus_values: Vec<T>,
}

impl<T: Real> IsoscelesConfig<T> {
    pub fn n(&self) -> usize {
        self.config.len()
    }
}

/// A unit pair witnessing failure of strict convexity: norm additivity with
/// genuinely independent directions.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexityWitness<T> {
    pub a: DVector<T>,
    pub b: DVector<T>,
    /// `| ||a+b|| - ||a|| - ||b|| |`.
    pub defect: T,
    /// Smallest singular value of the 2-column matrix `[a b]`.
    pub independence: T,
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum LocusError {
    #[error("f' and g' must be linearly independent")]
    DependentInputs,
    #[error("locus search exhausted its budget: found {found} of {requested} points")]
    LocusSearchExhausted { found: usize, requested: usize },
    #[error("not a valid isosceles input: {0}")]
    NotIsosceles(String),
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error(transparent)]
    Extension(#[from] ExtensionError),
}

impl LocusError {
    pub fn name(&self) -> &'static str {
        match self {
            LocusError::DependentInputs => "DependentInputs",
            LocusError::LocusSearchExhausted { .. } => "LocusSearchExhausted",
            LocusError::NotIsosceles(_) => "NotIsosceles",
            LocusError::InvalidParameters(_) => "InvalidParameters",
            LocusError::Space(e) => e.name(),
            LocusError::Extension(e) => e.name(),
        }
    }
}

/// Sign function of the equidistant locus: `||h - f'|| - ||h - g'||`.
/// Negative at `f'`, positive at `g'`, zero exactly on the locus.
pub fn phi<T: Real>(
    space: &NormedSpace<T>,
    f_prime: &DVector<T>,
    g_prime: &DVector<T>,
    h: &DVector<T>,
) -> Result<T, LocusError> {
    Ok(space.distance(h, f_prime)? - space.distance(h, g_prime)?)
}

/// Bisection along circles around the midpoint of `f'` and `g'`.
///
/// Reflection through the midpoint swaps the distances to `f'` and `g'`, so
/// `phi` flips sign exactly between antipodal points of any such circle. The
/// bracket is bisected along the circle arc rather than the chord: every
/// chord's own midpoint is the circle center, where `phi` vanishes
/// identically, so chord bisection would collapse every bracket to that one
/// point. Points found on the arc stay at the circle's radius, which keeps
/// points from different radii apart.
struct ArcBisection<'a, T> {
    space: &'a NormedSpace<T>,
    f: &'a DVector<T>,
    g: &'a DVector<T>,
    center: DVector<T>,
    frame: [DVector<T>; 2],
    tol: T,
}

impl<'a, T: Real> ArcBisection<'a, T> {
    fn phi(&self, h: &DVector<T>) -> T {
        self.space.distance(h, self.f).unwrap_or_else(|_| T::zero())
            - self.space.distance(h, self.g).unwrap_or_else(|_| T::zero())
    }

    fn point_at(&self, rho: T, theta: f64) -> DVector<T> {
        let c = rho * real::<T>(theta.cos());
        let s = rho * real::<T>(theta.sin());
        &self.center + &self.frame[0] * c + &self.frame[1] * s
    }

    /// Finds a locus point on the circle of radius `rho`, starting the sign
    /// bracket at `theta0`.
    fn run(&self, rho: T, theta0: f64) -> Option<(DVector<T>, T)> {
        let p0 = self.point_at(rho, theta0);
        let v0 = self.phi(&p0);
        if v0.abs() <= self.tol {
            return Some((p0, v0));
        }
        let mut lo = theta0;
        let mut sign_lo = v0 < T::zero();
        let mut hi = theta0 + std::f64::consts::PI;
        for _ in 0..BISECTION_MAX_STEPS {
            let mid = 0.5 * (lo + hi);
            let p = self.point_at(rho, mid);
            let v = self.phi(&p);
            if v.abs() <= self.tol {
                return Some((p, v));
            }
            if (v < T::zero()) == sign_lo {
                lo = mid;
                sign_lo = v < T::zero();
            } else {
                hi = mid;
            }
        }
        None
    }
}

fn well_separated<T: Real>(
    space: &NormedSpace<T>,
    candidate: &DVector<T>,
    accepted: &[LocusPoint<T>],
    exclusions: &[DVector<T>],
) -> bool {
    let sep = real::<T>(MIN_SEPARATION);
    accepted
        .iter()
        .all(|p| space.distance(candidate, &p.h).map(|d| d > sep).unwrap_or(false))
        && exclusions
            .iter()
            .all(|p| space.distance(candidate, p).map(|d| d > sep).unwrap_or(false))
}

/// Shared driver: 64 deterministic circle samples (4 radii, 16 start angles)
/// first, then seeded radii and angles, deduplicating against accepted points
/// and exclusions.
fn arc_locus_search<T: Real>(
    bis: &ArcBisection<'_, T>,
    scale: T,
    count: usize,
    seed: u64,
    exclusions: &[DVector<T>],
) -> Result<Vec<LocusPoint<T>>, LocusError> {
    let radii = [0.5, 1.0, 2.0, 4.0];
    let mut rng = StdRng::seed_from_u64(seed);
    let mut accepted: Vec<LocusPoint<T>> = Vec::new();
    let max_attempts = 64 + 512 + 64 * count;
    for attempt in 0..max_attempts {
        let (r, theta0) = if attempt < 64 {
            (radii[attempt / 16], (attempt % 16) as f64 / 16.0 * std::f64::consts::TAU)
        } else {
            (
                0.5 * 8f64.powf(rng.random::<f64>()),
                rng.random::<f64>() * std::f64::consts::TAU,
            )
        };
        if let Some((point, value)) = bis.run(real::<T>(r) * scale, theta0) {
            if well_separated(bis.space, &point, &accepted, exclusions) {
                accepted.push(LocusPoint { h: point, phi_value: value });
                if accepted.len() == count {
                    return Ok(accepted);
                }
            }
        }
    }
    Err(LocusError::LocusSearchExhausted { found: accepted.len(), requested: count })
}

fn locus_points<T: Real>(
    space: &NormedSpace<T>,
    f_prime: &DVector<T>,
    g_prime: &DVector<T>,
    count: usize,
    seed: u64,
    exclusions: &[DVector<T>],
    tolerances: &Tolerances<T>,
) -> Result<Vec<LocusPoint<T>>, LocusError> {
    space.norm(f_prime)?;
    space.norm(g_prime)?;
    let frame = orthonormal_frame(&[f_prime.clone(), g_prime.clone()], tolerances.rank_tol);
    if frame.len() < 2 {
        return Err(LocusError::DependentInputs);
    }
    if count == 0 {
        return Ok(Vec::new());
    }
    let scale = space.distance(f_prime, g_prime)?;
    let bis = ArcBisection {
        space,
        f: f_prime,
        g: g_prime,
        center: (f_prime + g_prime) * real::<T>(0.5),
        frame: [frame[0].clone(), frame[1].clone()],
        tol: tolerances.locus_tol,
    };
    arc_locus_search(&bis, scale, count, seed, exclusions)
}

/// Finds `count` well-separated points equidistant from `f'` and `g'` in
/// their span. Candidates live on circles around the midpoint in the plane of
/// `f'` and `g'`; antipodal circle points carry opposite signs, and bisection
/// along the arc pins a zero on each circle.
pub fn trace_locus<T: Real>(
    space: &NormedSpace<T>,
    f_prime: &DVector<T>,
    g_prime: &DVector<T>,
    count: usize,
    seed: u64,
    tolerances: &Tolerances<T>,
) -> Result<Vec<LocusPoint<T>>, LocusError> {
    locus_points(space, f_prime, g_prime, count, seed, &[], tolerances)
}

/// Locus points for the antipodal case `g' = -f'`: the span of the pair is a
/// line, so the circle plane is spanned by `f'` and the standard basis vector
/// most independent of it, centered on the origin (the midpoint).
fn antipodal_locus_points<T: Real>(
    space: &NormedSpace<T>,
    f_prime: &DVector<T>,
    count: usize,
    seed: u64,
    exclusions: &[DVector<T>],
    tolerances: &Tolerances<T>,
) -> Result<Vec<LocusPoint<T>>, LocusError> {
    let k = space.real_dim();
    if k < 2 {
        return Err(LocusError::LocusSearchExhausted { found: 0, requested: count });
    }
    let mut candidates: Vec<DVector<T>> = Vec::with_capacity(2);
    candidates.push(f_prime.clone());
    let u1 = f_prime / f_prime.norm();
    let mut best = 0usize;
    let mut best_res = T::zero();
    for i in 0..k {
        let mut e = DVector::zeros(k);
        e[i] = T::one();
        let res = (&e - &u1 * u1[i]).norm();
        if res > best_res {
            best_res = res;
            best = i;
        }
    }
    let mut e = DVector::zeros(k);
    e[best] = T::one();
    candidates.push(e);
    let frame = orthonormal_frame(&candidates, tolerances.rank_tol);
    if frame.len() < 2 {
        return Err(LocusError::DependentInputs);
    }

    let g_prime = -f_prime;
    let scale = space.norm(f_prime)?;
    let bis = ArcBisection {
        space,
        f: f_prime,
        g: &g_prime,
        center: DVector::zeros(k),
        frame: [frame[0].clone(), frame[1].clone()],
        tol: tolerances.locus_tol,
    };
    arc_locus_search(&bis, scale, count, seed, exclusions)
}

/// Builds `{0, f', g', h_1, ..., h_{n-3}}` with every `h_i` on the equidistant
/// locus, and verifies that swapping `f'` with `g'` is an isometry of the
/// configuration. For `g' = -f'` the flip extends to the whole space as `-id`;
/// the configuration is still built, with a borrowed plane direction since
/// the pair spans only a line.
pub fn build_isosceles_config<T: Real>(
    space: &NormedSpace<T>,
    f_prime: &DVector<T>,
    g_prime: &DVector<T>,
    n: usize,
    seed: u64,
    tolerances: &Tolerances<T>,
) -> Result<IsoscelesConfig<T>, LocusError> {
    if n < 3 {
        return Err(LocusError::InvalidParameters("n must be at least 3".into()));
    }
    let nf = space.norm(f_prime)?;
    let ng = space.norm(g_prime)?;
    if (nf - ng).abs() > real::<T>(1e-10) * (T::one() + nf.max(ng)) {
        return Err(LocusError::NotIsosceles(format!(
            "norms differ: {} vs {}",
            crate::scalar_to_f64(nf),
            crate::scalar_to_f64(ng)
        )));
    }
    let gap = space.distance(f_prime, g_prime)?;
    if gap <= real::<T>(MIN_SEPARATION) {
        return Err(LocusError::NotIsosceles("f' and g' coincide".into()));
    }

    let zero = DVector::zeros(space.real_dim());
    let antipodal = space.norm(&(f_prime + g_prime))? <= real::<T>(1e-12) * (T::one() + nf);
    let needed = n - 3;
    let exclusions = [zero.clone(), f_prime.clone(), g_prime.clone()];
    let points = if needed == 0 {
        Vec::new()
    } else if antipodal {
        antipodal_locus_points(space, f_prime, needed, seed, &exclusions, tolerances)?
    } else {
        locus_points(space, f_prime, g_prime, needed, seed, &exclusions, tolerances)?
    };

    let mut all = vec![zero, f_prime.clone(), g_prime.clone()];
    let locus_values: Vec<T> = points.iter().map(|p| p.phi_value).collect();
    all.extend(points.into_iter().map(|p| p.h));
    let config = PointConfig::new(space.clone(), all)?;
    let mut flip_pairing: Vec<usize> = (0..n).collect();
    flip_pairing.swap(1, 2);
    let corr = Correspondence::new(config.clone(), config.clone(), flip_pairing.clone())?;
    let flip_defect = verify_isometry(&corr, tolerances)?.max_defect;
    if flip_defect > real::<T>(10.0) * tolerances.locus_tol * (T::one() + nf) {
        return Err(LocusError::NotIsosceles(format!(
            "flip defect {} exceeds tolerance",
            crate::scalar_to_f64(flip_defect)
        )));
    }
    Ok(IsoscelesConfig { config, flip_pairing, flip_defect, locus_values })
}

/// Looks for a unit pair with `||a + b|| = ||a|| + ||b||` and genuinely
/// independent directions (smallest singular value of `[a b]` at least 1e-3).
/// Walks all ordered pairs of the deterministic axis family first, then
/// seeded unit draws; returns the accepted pair with the largest independence
/// measure, or `None`.
pub fn strict_convexity_search<T: Real>(
    space: &NormedSpace<T>,
    budget: usize,
    seed: u64,
    tolerances: &Tolerances<T>,
) -> Result<Option<ConvexityWitness<T>>, LocusError> {
    if budget == 0 {
        return Err(LocusError::InvalidParameters("budget must be at least 1".into()));
    }
    let family = deterministic_unit_family(space);
    let det_total = family.len() * family.len();
    let mut sampler = UnitSampler::new(space.clone(), seed);
    let k = space.real_dim();
    let mut best: Option<ConvexityWitness<T>> = None;
    for i in 0..budget {
        let (a, b) = if i < det_total {
            (family[i / family.len()].clone(), family[i % family.len()].clone())
        } else {
            (sampler.next_unit(), sampler.next_unit())
        };
        let defect = (space.norm(&(&a + &b))? - space.norm(&a)? - space.norm(&b)?).abs();
        if defect > tolerances.residual_tol {
            continue;
        }
        let mut m = DMatrix::zeros(k, 2);
        m.column_mut(0).copy_from(&a);
        m.column_mut(1).copy_from(&b);
        let svals = m.singular_values();
        let independence = svals[svals.len() - 1];
        if independence < real(1e-3) {
            continue;
        }
        let better = best.as_ref().map(|w| independence > w.independence).unwrap_or(true);
        if better {
            best = Some(ConvexityWitness { a, b, defect, independence });
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::NormKind;
    use approx::assert_relative_eq;

    fn vec2(x: f64, y: f64) -> DVector<f64> {
        DVector::from_vec(vec![x, y])
    }

    fn l1() -> NormedSpace<f64> {
        NormedSpace::new_real(2, NormKind::P(1.0)).unwrap()
    }

    #[test]
    fn phi_fixtures() {
        let e2 = NormedSpace::<f64>::euclidean(2);
        let f = vec2(1.0, 0.0);
        let g = vec2(0.0, 1.0);
        for t in [-2.0, 0.0, 0.7, 3.5] {
            assert_relative_eq!(phi(&e2, &f, &g, &vec2(t, t)).unwrap(), 0.0, epsilon = 1e-15);
        }
        assert_relative_eq!(phi(&l1(), &f, &g, &vec2(0.0, 0.0)).unwrap(), 0.0);
        let d = e2.distance(&f, &g).unwrap();
        assert_relative_eq!(phi(&e2, &f, &g, &f).unwrap(), -d, epsilon = 1e-15);
        assert_relative_eq!(phi(&e2, &f, &g, &g).unwrap(), d, epsilon = 1e-15);
    }

    #[test]
    fn euclidean_locus_lies_on_diagonal() {
        let e2 = NormedSpace::<f64>::euclidean(2);
        let pts =
            trace_locus(&e2, &vec2(1.0, 0.0), &vec2(0.0, 1.0), 3, 0, &Tolerances::default()).unwrap();
        assert_eq!(pts.len(), 3);
        for p in &pts {
            assert!(p.phi_value.abs() <= 1e-10);
            assert!((p.h[0] - p.h[1]).abs() <= 1e-8, "point {:?} off the diagonal", p.h);
        }
        for i in 0..3 {
            for j in (i + 1)..3 {
                assert!(e2.distance(&pts[i].h, &pts[j].h).unwrap() > 1e-6);
            }
        }
    }

    #[test]
    fn sup_norm_locus_points_are_valid() {
        let sup = NormedSpace::new_real(2, NormKind::Sup).unwrap();
        let f = vec2(1.0, 0.0);
        let g = vec2(0.0, 1.0);
        let pts = trace_locus(&sup, &f, &g, 2, 0, &Tolerances::default()).unwrap();
        for p in &pts {
            let v = phi(&sup, &f, &g, &p.h).unwrap();
            assert!(v.abs() <= 1e-10, "phi {v}");
        }
    }

    #[test]
    fn l1_locus_points_are_valid() {
        let f = vec2(1.0, 0.0);
        let g = vec2(0.0, 1.0);
        let pts = trace_locus(&l1(), &f, &g, 4, 7, &Tolerances::default()).unwrap();
        assert_eq!(pts.len(), 4);
        for p in &pts {
            assert!(phi(&l1(), &f, &g, &p.h).unwrap().abs() <= 1e-10);
        }
    }

    #[test]
    fn dependent_inputs_are_rejected() {
        let e2 = NormedSpace::<f64>::euclidean(2);
        let e = trace_locus(&e2, &vec2(1.0, 0.0), &vec2(2.0, 0.0), 1, 0, &Tolerances::default())
            .unwrap_err();
        assert_eq!(e.name(), "DependentInputs");
    }

    #[test]
    fn trace_is_deterministic() {
        let f = vec2(1.0, 0.0);
        let g = vec2(-0.5, 0.5);
        let t = Tolerances::default();
        let a = trace_locus(&l1(), &f, &g, 3, 11, &t).unwrap();
        let b = trace_locus(&l1(), &f, &g, 3, 11, &t).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.h, y.h);
        }
    }

    #[test]
    fn base_isosceles_triangle() {
        let cfg = build_isosceles_config(
            &l1(),
            &vec2(1.0, 0.0),
            &vec2(-0.5, 0.5),
            3,
            0,
            &Tolerances::default(),
        )
        .unwrap();
        assert_eq!(cfg.n(), 3);
        assert_eq!(cfg.flip_defect, 0.0);
        assert_eq!(cfg.flip_pairing, vec![0, 2, 1]);
    }

    #[test]
    fn five_point_l1_isosceles_config() {
        let cfg = build_isosceles_config(
            &l1(),
            &vec2(1.0, 0.0),
            &vec2(-0.5, 0.5),
            5,
            0,
            &Tolerances::default(),
        )
        .unwrap();
        assert_eq!(cfg.n(), 5);
        assert_eq!(cfg.locus_values.len(), 2);
        for v in &cfg.locus_values {
            assert!(v.abs() <= 1e-10);
        }
        assert!(cfg.flip_defect <= 1e-9, "flip defect {}", cfg.flip_defect);
        // h points distinct from 0 and each other.
        let pts = &cfg.config.points;
        for i in 3..5 {
            assert!(l1().norm(&pts[i]).unwrap() > 1e-6);
            for j in (i + 1)..5 {
                assert!(l1().distance(&pts[i], &pts[j]).unwrap() > 1e-6);
            }
        }
    }

    #[test]
    fn euclidean_four_point_config_uses_diagonal() {
        let e2 = NormedSpace::<f64>::euclidean(2);
        let cfg = build_isosceles_config(
            &e2,
            &vec2(1.0, 0.0),
            &vec2(0.0, 1.0),
            4,
            0,
            &Tolerances::default(),
        )
        .unwrap();
        let h = &cfg.config.points[3];
        assert!((h[0] - h[1]).abs() <= 1e-8);
        assert!(e2.norm(h).unwrap() > 1e-6);
    }

    #[test]
    fn antipodal_pair_still_builds() {
        let f = vec2(1.0, 0.0);
        let g = vec2(-1.0, 0.0);
        let cfg =
            build_isosceles_config(&l1(), &f, &g, 5, 0, &Tolerances::default()).unwrap();
        assert_eq!(cfg.n(), 5);
        for (i, v) in cfg.locus_values.iter().enumerate() {
            assert!(v.abs() <= 1e-10, "h_{i} has phi {v}");
        }
        assert!(cfg.flip_defect <= 1e-9);
        for i in 3..5 {
            assert!(l1().norm(&cfg.config.points[i]).unwrap() > 1e-6);
        }
    }

    #[test]
    fn invalid_isosceles_inputs_are_rejected() {
        let t = Tolerances::default();
        let e = build_isosceles_config(&l1(), &vec2(1.0, 0.0), &vec2(0.5, 0.5), 2, 0, &t)
            .unwrap_err();
        assert_eq!(e.name(), "InvalidParameters");
        let e = build_isosceles_config(&l1(), &vec2(1.0, 0.0), &vec2(2.0, 0.0), 3, 0, &t)
            .unwrap_err();
        assert_eq!(e.name(), "NotIsosceles");
        let e = build_isosceles_config(&l1(), &vec2(1.0, 0.0), &vec2(1.0, 0.0), 3, 0, &t)
            .unwrap_err();
        assert_eq!(e.name(), "NotIsosceles");
    }

    #[test]
    fn l1_and_sup_norms_fail_strict_convexity() {
        let t = Tolerances::default();
        let w = strict_convexity_search(&l1(), 100, 0, &t).unwrap().unwrap();
        assert!(w.defect <= 1e-9);
        assert!(w.independence >= 0.9, "independence {}", w.independence);
        let sup = NormedSpace::new_real(2, NormKind::Sup).unwrap();
        let w = strict_convexity_search(&sup, 100, 0, &t).unwrap().unwrap();
        assert!(w.defect <= 1e-9);
        assert!(w.independence >= 1e-3);
    }

    #[test]
    fn strictly_convex_norms_produce_no_witness() {
        let t = Tolerances::default();
        let e3 = NormedSpace::<f64>::euclidean(3);
        assert!(strict_convexity_search(&e3, 2000, 0, &t).unwrap().is_none());
        let p15 = NormedSpace::new_real(2, NormKind::P(1.5)).unwrap();
        assert!(strict_convexity_search(&p15, 2000, 1, &t).unwrap().is_none());
    }
}
