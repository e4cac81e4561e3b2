//! Norm identities that hold exactly in inner-product spaces, residual
//! functionals quantifying their failure, and seeded searches for witnesses.
//!
//! Each [`Condition`] carries its own hypothesis constraints (equal norms, unit
//! norms, zero sum, ...). Evaluation checks the hypothesis first and then
//! returns a nonnegative residual which is zero (up to floating point) whenever
//! the norm comes from an inner product. Searches construct candidates that
//! satisfy the hypothesis exactly or project them onto it by bisection, walk
//! the deterministic axis family before any seeded draw, and keep the largest
//! residual with lexicographic tie-breaking, so results are reproducible and
//! independent of evaluation order.

use nalgebra::DVector;
use thiserror::Error;

use crate::linalg::golden_min;
use crate::polarization::{polarize_complex, PolarizationError};
use crate::scalar::{real, Real, Tolerances};
use crate::spaces::{
    deterministic_unit_family, sample_unit_vectors, NormedSpace, ScalarField, SpaceError,
    UnitSampler,
};

/// Hypothesis residuals must stay below `1e-10 * (1 + scale)`.
const HYPOTHESIS_TOL: f64 = 1e-10;
/// Bisection targets for hypothesis projection.
const PROJECTION_TOL: f64 = 1e-12;
const PROJECTION_MAX_STEPS: usize = 80;

/// Search grid for the Birkhoff-James minimization.
#[derive(Debug, Clone, PartialEq)]
pub struct BjParams<T> {
    /// Half-width of the coarse grid on the line parameter.
    pub grid_limit: T,
    pub grid_points: usize,
    /// Golden-section interval target.
    pub refine_tol: T,
}

impl<T: Real> Default for BjParams<T> {
    fn default() -> Self {
        BjParams { grid_limit: real(8.0), grid_points: 65, refine_tol: real(1e-10) }
    }
}

/// A norm identity to test, with its parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum Condition<T> {
    /// IP1: parallelogram law.
    Parallelogram,
    /// IP2: norm-swap symmetry `||a f + b g|| = ||b f + a g||` for equal-norm
    /// pairs, over a grid of `(a, b)` coefficients.
    NormSwap { pairs: Vec<(T, T)> },
    /// IP3: rhombus identity `||f+g||^2 + ||f-g||^2 = 4` on unit pairs.
    Rhombus,
    /// IP4: symmetry of Birkhoff-James orthogonality on unit pairs. Violations
    /// disprove inner-product structure in any dimension; the absence of a
    /// violation is informative only in real dimension >= 3.
    BirkhoffJamesSymmetry(BjParams<T>),
    /// IP5: `||f + c g|| = ||g + c f||` for equal-norm pairs, `c` outside
    /// `{0, 1, -1}`.
    ScaledSwap { gamma: T },
    /// IP6: `||f + c g|| = ||f - c g||` whenever `||f + g|| = ||f - g||`,
    /// `c` outside `{0, 1, -1}`.
    SignFlip { gamma: T },
    /// I2: `||f - h|| = ||g - h||` under `f + g + h = 0` and `||f|| = ||g||`.
    Isosceles,
    /// I3: equality of opposite diagonal pairs under `f + g + h + k = 0`,
    /// `||f|| = ||g||`, `||h|| = ||k||`.
    Quadrilateral,
    /// I4: independence of
    /// `phi(g) = ||f1+f2+g||^2 + ||f1+f2-g||^2 - ||f1-f2-g||^2 - ||f1-f2+g||^2`
    /// from the probe `g`; evaluated as `|phi(g_b) - phi(g_a)|`.
    CrossTerm,
    /// I5: `||a f + g/a|| >= ||f + g||` for equal-norm pairs over a grid of
    /// positive `a`.
    ProductScaling { alphas: Vec<T> },
    /// I6: `sum_{i<j} ||f_i - f_j||^2 = n * sum_i ||f_i||^2` under
    /// `sum_i f_i = 0`. The same identity over ordered pairs doubles the
    /// constant; reports carry both.
    DistanceSum { n: usize },
}

impl<T: Real> Condition<T> {
    /// Short stable identifier used in reports.
    pub fn tag(&self) -> &'static str {
        match self {
            Condition::Parallelogram => "IP1",
            Condition::NormSwap { .. } => "IP2",
            Condition::Rhombus => "IP3",
            Condition::BirkhoffJamesSymmetry(_) => "IP4",
            Condition::ScaledSwap { .. } => "IP5",
            Condition::SignFlip { .. } => "IP6",
            Condition::Isosceles => "I2",
            Condition::Quadrilateral => "I3",
            Condition::CrossTerm => "I4",
            Condition::ProductScaling { .. } => "I5",
            Condition::DistanceSum { .. } => "I6",
        }
    }

    /// Number of witness vectors the condition takes.
    pub fn arity(&self) -> usize {
        match self {
            Condition::Isosceles => 3,
            Condition::Quadrilateral | Condition::CrossTerm => 4,
            Condition::DistanceSum { n } => *n,
            _ => 2,
        }
    }

    /// Constants of the squared-distance identity: `(n, 2n)` for the unordered
    /// and ordered pair sums. Only meaningful for `DistanceSum`.
    pub fn distance_sum_constants(&self) -> Option<(usize, usize)> {
        match self {
            Condition::DistanceSum { n } => Some((*n, 2 * n)),
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<(), CharacterizationError> {
        let check_gamma = |g: T| -> Result<(), CharacterizationError> {
            if !g.is_finite() || g == T::zero() || g == T::one() || g == -T::one() {
                return Err(CharacterizationError::InvalidParameters(
                    "coefficient must be finite and outside {0, 1, -1}".into(),
                ));
            }
            Ok(())
        };
        match self {
            Condition::NormSwap { pairs } => {
                if pairs.is_empty() || pairs.iter().any(|(a, b)| !a.is_finite() || !b.is_finite()) {
                    return Err(CharacterizationError::InvalidParameters(
                        "coefficient grid must be nonempty and finite".into(),
                    ));
                }
            }
            Condition::BirkhoffJamesSymmetry(p) => {
                if p.grid_points < 3 || !(p.grid_limit > T::zero()) || !(p.refine_tol > T::zero()) {
                    return Err(CharacterizationError::InvalidParameters(
                        "grid needs >= 3 points, positive limit and tolerance".into(),
                    ));
                }
            }
            Condition::ScaledSwap { gamma } | Condition::SignFlip { gamma } => check_gamma(*gamma)?,
            Condition::ProductScaling { alphas } => {
                if alphas.is_empty() || alphas.iter().any(|a| !a.is_finite() || *a == T::zero()) {
                    return Err(CharacterizationError::InvalidParameters(
                        "scaling grid must be nonempty, finite and nonzero".into(),
                    ));
                }
            }
            Condition::DistanceSum { n } => {
                if *n < 2 {
                    return Err(CharacterizationError::InvalidParameters(
                        "distance sum needs at least 2 vectors".into(),
                    ));
                }
            }
            _ => {}
        }
        Ok(())
    }

    /// Default coefficient grids.
    pub fn norm_swap_default() -> Self {
        Condition::NormSwap {
            pairs: vec![
                (T::one(), real(2.0)),
                (T::one(), real(3.0)),
                (real(2.0), real(3.0)),
            ],
        }
    }

    /// 33 log-spaced scalings in [1/8, 8].
    pub fn product_scaling_default() -> Self {
        let mut alphas = Vec::with_capacity(33);
        for k in 0..33 {
            let e = (k as f64) / 16.0 - 1.0;
            alphas.push(real(8f64.powf(e)));
        }
        Condition::ProductScaling { alphas }
    }

    /// The full default battery: IP1-IP6 (gamma = 2) and I2-I6 (n = 4).
    pub fn default_set() -> Vec<Condition<T>> {
        vec![
            Condition::Parallelogram,
            Self::norm_swap_default(),
            Condition::Rhombus,
            Condition::BirkhoffJamesSymmetry(BjParams::default()),
            Condition::ScaledSwap { gamma: real(2.0) },
            Condition::SignFlip { gamma: real(2.0) },
            Condition::Isosceles,
            Condition::Quadrilateral,
            Condition::CrossTerm,
            Self::product_scaling_default(),
            Condition::DistanceSum { n: 4 },
        ]
    }
}

/// A concrete violation of a condition.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness<T> {
    pub condition: Condition<T>,
    pub vectors: Vec<DVector<T>>,
    /// Condition-specific scalars realizing the residual (e.g. the norm-swap
    /// coefficients or the scaling that maximizes the defect).
    pub scalars: Vec<T>,
    pub residual: T,
    /// Signed defect whose absolute value (clamped for one-sided conditions)
    /// is the residual.
    pub signed_defect: T,
}

/// Residual plus diagnostics from a single evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionEvaluation<T> {
    pub residual: T,
    pub signed_defect: T,
    pub scalars: Vec<T>,
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum CharacterizationError {
    #[error("invalid condition parameters: {0}")]
    InvalidParameters(String),
    #[error("witness does not satisfy the condition hypothesis (residual {residual:.3e})")]
    HypothesisViolated { residual: f64 },
    #[error("zero vector where a nonzero vector is required")]
    ZeroVector,
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error(transparent)]
    Polarization(#[from] PolarizationError),
}

impl CharacterizationError {
    pub fn name(&self) -> &'static str {
        match self {
            CharacterizationError::InvalidParameters(_) => "InvalidParameters",
            CharacterizationError::HypothesisViolated { .. } => "HypothesisViolated",
            CharacterizationError::ZeroVector => "ZeroVector",
            CharacterizationError::Space(e) => e.name(),
            CharacterizationError::Polarization(e) => e.name(),
        }
    }
}

/// Scratch buffers for norm evaluations of linear combinations.
struct Evaluator<'a, T> {
    space: &'a NormedSpace<T>,
    buf: Vec<T>,
}

impl<'a, T: Real> Evaluator<'a, T> {
    fn new(space: &'a NormedSpace<T>) -> Self {
        Evaluator { space, buf: vec![T::zero(); space.real_dim()] }
    }

    fn norm2(&mut self, a: T, x: &DVector<T>, b: T, y: &DVector<T>) -> T {
        for i in 0..self.buf.len() {
            self.buf[i] = a * x[i] + b * y[i];
        }
        self.space.norm_slice(&self.buf)
    }

    fn norm3(&mut self, a: T, x: &DVector<T>, b: T, y: &DVector<T>, c: T, z: &DVector<T>) -> T {
        for i in 0..self.buf.len() {
            self.buf[i] = a * x[i] + b * y[i] + c * z[i];
        }
        self.space.norm_slice(&self.buf)
    }

    fn norm_of(&mut self, x: &DVector<T>) -> T {
        self.space.norm_slice(x.as_slice())
    }
}

/// `max(0, ||f|| - min_a ||f + a g||)`: zero exactly when `f` is Birkhoff-James
/// orthogonal to `g`. The minimization runs a coarse grid (widened when
/// `||f|| >> ||g||`) followed by golden-section refinement; the objective is
/// convex, so the bracket around the grid argmin contains the minimum.
pub fn bj_orthogonality_gap<T: Real>(
    space: &NormedSpace<T>,
    f: &DVector<T>,
    g: &DVector<T>,
    params: &BjParams<T>,
) -> Result<T, CharacterizationError> {
    let nf = space.norm(f)?;
    let ng = space.norm(g)?;
    if nf == T::zero() || ng == T::zero() {
        return Err(CharacterizationError::ZeroVector);
    }
    let mut ev = Evaluator::new(space);
    Ok(bj_gap_inner(&mut ev, f, nf, g, ng, params))
}

fn bj_gap_inner<T: Real>(
    ev: &mut Evaluator<'_, T>,
    f: &DVector<T>,
    norm_f: T,
    g: &DVector<T>,
    norm_g: T,
    params: &BjParams<T>,
) -> T {
    // The minimizer satisfies |a| <= 2 ||f|| / ||g||.
    let limit = params.grid_limit * (norm_f / norm_g).max(T::one());
    let n = params.grid_points;
    let step = (limit + limit) / real::<T>((n - 1) as f64);
    let mut best_i = 0usize;
    let mut best_v = T::max_value().unwrap();
    for i in 0..n {
        let a = -limit + step * real::<T>(i as f64);
        let v = ev.norm2(T::one(), f, a, g);
        if v < best_v {
            best_v = v;
            best_i = i;
        }
    }
    let lo = -limit + step * real::<T>(best_i.saturating_sub(1) as f64);
    let hi = -limit + step * real::<T>(best_i.min(n - 2).saturating_add(1) as f64);
    let (_, min_v) = golden_min(|a| ev.norm2(T::one(), f, a, g), lo, hi, params.refine_tol);
    (norm_f - min_v.min(best_v)).max(T::zero())
}

/// Hypothesis residual of a witness; zero means the constraints hold exactly.
fn hypothesis_residual<T: Real>(
    ev: &mut Evaluator<'_, T>,
    cond: &Condition<T>,
    vs: &[DVector<T>],
) -> T {
    let one = T::one();
    match cond {
        Condition::Parallelogram | Condition::CrossTerm => T::zero(),
        Condition::NormSwap { .. } | Condition::ScaledSwap { .. } | Condition::ProductScaling { .. } => {
            (ev.norm_of(&vs[0]) - ev.norm_of(&vs[1])).abs()
        }
        Condition::Rhombus | Condition::BirkhoffJamesSymmetry(_) => {
            let a = (ev.norm_of(&vs[0]) - one).abs();
            let b = (ev.norm_of(&vs[1]) - one).abs();
            a.max(b)
        }
        Condition::SignFlip { .. } => {
            (ev.norm2(one, &vs[0], one, &vs[1]) - ev.norm2(one, &vs[0], -one, &vs[1])).abs()
        }
        Condition::Isosceles => {
            let sum = ev.norm3(one, &vs[0], one, &vs[1], one, &vs[2]);
            sum.max((ev.norm_of(&vs[0]) - ev.norm_of(&vs[1])).abs())
        }
        Condition::Quadrilateral => {
            let mut buf = vs[0].clone();
            buf += &vs[1];
            buf += &vs[2];
            buf += &vs[3];
            let sum = ev.norm_of(&buf);
            let eq1 = (ev.norm_of(&vs[0]) - ev.norm_of(&vs[1])).abs();
            let eq2 = (ev.norm_of(&vs[2]) - ev.norm_of(&vs[3])).abs();
            sum.max(eq1).max(eq2)
        }
        Condition::DistanceSum { .. } => {
            let mut buf = vs[0].clone();
            for v in &vs[1..] {
                buf += v;
            }
            ev.norm_of(&buf)
        }
    }
}

/// Residual, signed defect and realized scalars; hypothesis not checked here.
fn raw_evaluation<T: Real>(
    ev: &mut Evaluator<'_, T>,
    cond: &Condition<T>,
    vs: &[DVector<T>],
    scalars: &[T],
) -> ConditionEvaluation<T> {
    let one = T::one();
    let two = one + one;
    match cond {
        Condition::Parallelogram => {
            let s = ev.norm2(one, &vs[0], one, &vs[1]);
            let d = ev.norm2(one, &vs[0], -one, &vs[1]);
            let nf = ev.norm_of(&vs[0]);
            let ng = ev.norm_of(&vs[1]);
            let signed = s * s + d * d - two * (nf * nf + ng * ng);
            ConditionEvaluation { residual: signed.abs(), signed_defect: signed, scalars: vec![] }
        }
        Condition::NormSwap { pairs } => {
            let eval_pair = |ev: &mut Evaluator<'_, T>, a: T, b: T| {
                ev.norm2(a, &vs[0], b, &vs[1]) - ev.norm2(b, &vs[0], a, &vs[1])
            };
            if scalars.len() == 2 {
                let signed = eval_pair(ev, scalars[0], scalars[1]);
                return ConditionEvaluation {
                    residual: signed.abs(),
                    signed_defect: signed,
                    scalars: scalars.to_vec(),
                };
            }
            let mut best_signed = T::zero();
            let mut best_pair = pairs[0];
            for &(a, b) in pairs {
                let signed = eval_pair(ev, a, b);
                if signed.abs() > best_signed.abs() {
                    best_signed = signed;
                    best_pair = (a, b);
                }
            }
            ConditionEvaluation {
                residual: best_signed.abs(),
                signed_defect: best_signed,
                scalars: vec![best_pair.0, best_pair.1],
            }
        }
        Condition::Rhombus => {
            let s = ev.norm2(one, &vs[0], one, &vs[1]);
            let d = ev.norm2(one, &vs[0], -one, &vs[1]);
            let signed = s * s + d * d - two * two;
            ConditionEvaluation { residual: signed.abs(), signed_defect: signed, scalars: vec![] }
        }
        Condition::BirkhoffJamesSymmetry(p) => {
            let nf = ev.norm_of(&vs[0]);
            let ng = ev.norm_of(&vs[1]);
            let g1 = bj_gap_inner(ev, &vs[0], nf, &vs[1], ng, p);
            let g2 = bj_gap_inner(ev, &vs[1], ng, &vs[0], nf, p);
            let signed = g1 - g2;
            ConditionEvaluation { residual: signed.abs(), signed_defect: signed, scalars: vec![] }
        }
        Condition::ScaledSwap { gamma } => {
            let signed = ev.norm2(one, &vs[0], *gamma, &vs[1]) - ev.norm2(one, &vs[1], *gamma, &vs[0]);
            ConditionEvaluation { residual: signed.abs(), signed_defect: signed, scalars: vec![] }
        }
        Condition::SignFlip { gamma } => {
            let signed = ev.norm2(one, &vs[0], *gamma, &vs[1]) - ev.norm2(one, &vs[0], -*gamma, &vs[1]);
            ConditionEvaluation { residual: signed.abs(), signed_defect: signed, scalars: vec![] }
        }
        Condition::Isosceles => {
            let signed = ev.norm2(one, &vs[0], -one, &vs[2]) - ev.norm2(one, &vs[1], -one, &vs[2]);
            ConditionEvaluation { residual: signed.abs(), signed_defect: signed, scalars: vec![] }
        }
        Condition::Quadrilateral => {
            let d1 = ev.norm2(one, &vs[0], -one, &vs[2]) - ev.norm2(one, &vs[1], -one, &vs[3]);
            let d2 = ev.norm2(one, &vs[1], -one, &vs[2]) - ev.norm2(one, &vs[0], -one, &vs[3]);
            let signed = if d1.abs() >= d2.abs() { d1 } else { d2 };
            ConditionEvaluation { residual: signed.abs(), signed_defect: signed, scalars: vec![] }
        }
        Condition::CrossTerm => {
            let phi = |ev: &mut Evaluator<'_, T>, g: &DVector<T>| {
                let a = ev.norm3(one, &vs[0], one, &vs[1], one, g);
                let b = ev.norm3(one, &vs[0], one, &vs[1], -one, g);
                let c = ev.norm3(one, &vs[0], -one, &vs[1], -one, g);
                let d = ev.norm3(one, &vs[0], -one, &vs[1], one, g);
                a * a + b * b - c * c - d * d
            };
            let signed = phi(ev, &vs[3]) - phi(ev, &vs[2]);
            ConditionEvaluation { residual: signed.abs(), signed_defect: signed, scalars: vec![] }
        }
        Condition::ProductScaling { alphas } => {
            let base = ev.norm2(one, &vs[0], one, &vs[1]);
            let eval_alpha = |ev: &mut Evaluator<'_, T>, a: T| base - ev.norm2(a, &vs[0], one / a, &vs[1]);
            if scalars.len() == 1 {
                let signed = eval_alpha(ev, scalars[0]);
                return ConditionEvaluation {
                    residual: signed.max(T::zero()),
                    signed_defect: signed,
                    scalars: scalars.to_vec(),
                };
            }
            let mut best_signed = eval_alpha(ev, alphas[0]);
            let mut best_alpha = alphas[0];
            for &a in &alphas[1..] {
                let signed = eval_alpha(ev, a);
                if signed > best_signed {
                    best_signed = signed;
                    best_alpha = a;
                }
            }
            ConditionEvaluation {
                residual: best_signed.max(T::zero()),
                signed_defect: best_signed,
                scalars: vec![best_alpha],
            }
        }
        Condition::DistanceSum { n } => {
            let mut pair_sum = T::zero();
            for i in 0..*n {
                for j in (i + 1)..*n {
                    let d = ev.norm2(one, &vs[i], -one, &vs[j]);
                    pair_sum += d * d;
                }
            }
            let mut norm_sum = T::zero();
            for v in vs {
                let nv = ev.norm_of(v);
                norm_sum += nv * nv;
            }
            let signed = pair_sum - real::<T>(*n as f64) * norm_sum;
            ConditionEvaluation { residual: signed.abs(), signed_defect: signed, scalars: vec![] }
        }
    }
}

fn check_inputs<T: Real>(
    space: &NormedSpace<T>,
    cond: &Condition<T>,
    vectors: &[DVector<T>],
) -> Result<(), CharacterizationError> {
    cond.validate()?;
    if vectors.len() != cond.arity() {
        return Err(CharacterizationError::InvalidParameters(format!(
            "{} takes {} vectors, got {}",
            cond.tag(),
            cond.arity(),
            vectors.len()
        )));
    }
    for v in vectors {
        // Norm performs the dimension and finiteness checks.
        space.norm(v)?;
    }
    Ok(())
}

/// Evaluates a condition on a witness: hypothesis first (error if it fails
/// beyond `1e-10 * (1 + scale)`), then the residual. `scalars` may pin
/// condition coefficients (norm-swap pair, product scaling); empty means
/// maximize over the condition's own grid.
pub fn eval_condition<T: Real>(
    space: &NormedSpace<T>,
    cond: &Condition<T>,
    vectors: &[DVector<T>],
    scalars: &[T],
) -> Result<T, CharacterizationError> {
    Ok(eval_condition_detailed(space, cond, vectors, scalars)?.residual)
}

/// As [`eval_condition`], returning the signed defect and realized scalars too.
pub fn eval_condition_detailed<T: Real>(
    space: &NormedSpace<T>,
    cond: &Condition<T>,
    vectors: &[DVector<T>],
    scalars: &[T],
) -> Result<ConditionEvaluation<T>, CharacterizationError> {
    check_inputs(space, cond, vectors)?;
    let mut ev = Evaluator::new(space);
    let scale = vectors.iter().map(|v| ev.norm_of(v)).fold(T::zero(), |a, b| a.max(b));
    let hyp = hypothesis_residual(&mut ev, cond, vectors);
    if hyp > real::<T>(HYPOTHESIS_TOL) * (T::one() + scale) {
        return Err(CharacterizationError::HypothesisViolated {
            residual: crate::scalar_to_f64(hyp),
        });
    }
    Ok(raw_evaluation(&mut ev, cond, vectors, scalars))
}

/// Moves `w` along `w0 + t * dir` until `||a + w|| = ||a - w||` within the
/// bisection target. The endpoint grid looks for a sign change of the defect;
/// `None` when no bracket exists along this path.
fn project_equal_norm<T: Real>(
    ev: &mut Evaluator<'_, T>,
    a: &DVector<T>,
    w0: &DVector<T>,
    dir: &DVector<T>,
) -> Option<DVector<T>> {
    let one = T::one();
    let psi = |ev: &mut Evaluator<'_, T>, t: T| {
        let mut w = w0.clone();
        w.axpy(t, dir, one);
        let plus = ev.norm2(one, a, one, &w);
        let minus = ev.norm2(one, a, -one, &w);
        (plus - minus, w)
    };
    let target = real::<T>(PROJECTION_TOL) * (one + ev.norm_of(a));
    let grid = [-8.0, -4.0, -2.0, -1.0, 0.0, 1.0, 2.0, 4.0, 8.0];
    let mut vals: Vec<(T, T)> = Vec::with_capacity(grid.len());
    for &t in &grid {
        let t = real::<T>(t);
        let (v, w) = psi(ev, t);
        if v.abs() <= target {
            return Some(w);
        }
        vals.push((t, v));
    }
    let mut bracket = None;
    for k in 0..vals.len() - 1 {
        if (vals[k].1 < T::zero()) != (vals[k + 1].1 < T::zero()) {
            bracket = Some((vals[k].0, vals[k].1, vals[k + 1].0));
            break;
        }
    }
    let (mut lo, mut flo, mut hi) = bracket?;
    for _ in 0..PROJECTION_MAX_STEPS {
        let mid = (lo + hi) / real(2.0);
        let (v, w) = psi(ev, mid);
        if v.abs() <= target {
            return Some(w);
        }
        if (v < T::zero()) == (flo < T::zero()) {
            lo = mid;
            flo = v;
        } else {
            hi = mid;
        }
    }
    None
}

/// Rotate coordinates by one slot and flip the wrapped sign; deterministic
/// companion direction that is never a positive multiple of its input.
fn shifted_direction<T: Real>(v: &DVector<T>) -> DVector<T> {
    let k = v.len();
    let mut out = DVector::zeros(k);
    out[0] = -v[k - 1];
    for i in 1..k {
        out[i] = v[i - 1];
    }
    out
}

/// Candidate tuples: lexicographic walk of the deterministic axis family first,
/// then fresh seeded unit draws.
struct TupleStream<T> {
    family: Vec<DVector<T>>,
    arity: usize,
    det_total: usize,
    index: usize,
    sampler: UnitSampler<T>,
}

impl<T: Real> TupleStream<T> {
    fn new(space: &NormedSpace<T>, arity: usize, seed: u64) -> Self {
        let family = deterministic_unit_family(space);
        let det_total = family.len().checked_pow(arity as u32).unwrap_or(usize::MAX);
        TupleStream { family, arity, det_total, index: 0, sampler: UnitSampler::new(space.clone(), seed) }
    }

    fn next_tuple(&mut self) -> Vec<DVector<T>> {
        if self.index < self.det_total {
            let mut rest = self.index;
            self.index += 1;
            let base = self.family.len();
            let mut digits = vec![0usize; self.arity];
            for d in (0..self.arity).rev() {
                digits[d] = rest % base;
                rest /= base;
            }
            digits.iter().map(|&i| self.family[i].clone()).collect()
        } else {
            (0..self.arity).map(|_| self.sampler.next_unit()).collect()
        }
    }
}

/// Outcome of a bounded search: the best candidate seen, violating or not.
#[derive(Debug, Clone)]
pub struct SearchOutcome<T> {
    pub best: Option<ConditionEvaluation<T>>,
    pub best_vectors: Vec<DVector<T>>,
    pub samples_evaluated: usize,
}

fn lex_less<T: Real>(a: &[DVector<T>], b: &[DVector<T>]) -> bool {
    for (x, y) in a.iter().zip(b) {
        for (u, v) in x.iter().zip(y.iter()) {
            if u < v {
                return true;
            }
            if u > v {
                return false;
            }
        }
    }
    false
}

/// Bounded candidate search keeping the max-residual candidate (lexicographic
/// tie-break on the witness coordinates, so any evaluation order agrees).
pub fn search_condition_max<T: Real>(
    space: &NormedSpace<T>,
    cond: &Condition<T>,
    budget: usize,
    seed: u64,
) -> Result<SearchOutcome<T>, CharacterizationError> {
    cond.validate()?;
    if budget == 0 {
        return Err(CharacterizationError::InvalidParameters("budget must be at least 1".into()));
    }
    let mut ev = Evaluator::new(space);
    let mut best: Option<ConditionEvaluation<T>> = None;
    let mut best_vectors: Vec<DVector<T>> = Vec::new();
    let mut samples = 0usize;

    let consider =
        |ev: &mut Evaluator<'_, T>, vectors: Vec<DVector<T>>, samples: &mut usize, best: &mut Option<ConditionEvaluation<T>>, best_vectors: &mut Vec<DVector<T>>| {
            let evaluation = raw_evaluation(ev, cond, &vectors, &[]);
            *samples += 1;
            let better = match best {
                None => true,
                Some(b) => {
                    evaluation.residual > b.residual
                        || (evaluation.residual == b.residual && lex_less(&vectors, best_vectors))
                }
            };
            if better {
                *best = Some(evaluation);
                *best_vectors = vectors;
            }
        };

    match cond {
        // Unit pairs satisfy these hypotheses by construction.
        Condition::Parallelogram
        | Condition::NormSwap { .. }
        | Condition::Rhombus
        | Condition::BirkhoffJamesSymmetry(_)
        | Condition::ScaledSwap { .. }
        | Condition::ProductScaling { .. }
        | Condition::CrossTerm => {
            let draw_arity = match cond {
                Condition::CrossTerm => 3,
                _ => 2,
            };
            let mut stream = TupleStream::new(space, draw_arity, seed);
            for _ in 0..budget {
                let mut vs = stream.next_tuple();
                if let Condition::CrossTerm = cond {
                    // Probe pair: the zero vector and the drawn third vector.
                    let gb = vs.pop().expect("arity 3");
                    vs.push(DVector::zeros(space.real_dim()));
                    vs.push(gb);
                }
                consider(&mut ev, vs, &mut samples, &mut best, &mut best_vectors);
            }
        }
        Condition::SignFlip { .. } => {
            let mut stream = TupleStream::new(space, 2, seed);
            for _ in 0..budget {
                let vs = stream.next_tuple();
                let dir = shifted_direction(&vs[1]);
                if let Some(g) = project_equal_norm(&mut ev, &vs[0], &vs[1], &dir) {
                    consider(&mut ev, vec![vs[0].clone(), g], &mut samples, &mut best, &mut best_vectors);
                }
            }
        }
        Condition::Isosceles => {
            let mut stream = TupleStream::new(space, 2, seed);
            for _ in 0..budget {
                let vs = stream.next_tuple();
                let h = -(&vs[0] + &vs[1]);
                consider(&mut ev, vec![vs[0].clone(), vs[1].clone(), h], &mut samples, &mut best, &mut best_vectors);
            }
        }
        Condition::Quadrilateral => {
            // Deterministic phase: h = k = -(f+g)/2 satisfies the hypothesis
            // exactly. Seeded phase: bisect w so that ||w - s/2|| = ||w + s/2||
            // and split h = -s/2 + w, k = -s/2 - w.
            let family_pairs = {
                let fam = deterministic_unit_family(space);
                fam.len() * fam.len()
            };
            let half = real::<T>(0.5);
            let mut stream = TupleStream::new(space, 3, seed);
            let mut det_stream = TupleStream::new(space, 2, seed);
            for n in 0..budget {
                if n < family_pairs {
                    let vs = det_stream.next_tuple();
                    let a = (&vs[0] + &vs[1]) * -half;
                    consider(
                        &mut ev,
                        vec![vs[0].clone(), vs[1].clone(), a.clone(), a],
                        &mut samples,
                        &mut best,
                        &mut best_vectors,
                    );
                } else {
                    let vs = stream.next_tuple();
                    let a = (&vs[0] + &vs[1]) * -half;
                    let dir = shifted_direction(&vs[2]);
                    if let Some(w) = project_equal_norm(&mut ev, &a, &vs[2], &dir) {
                        let h = &a + &w;
                        let k = &a - &w;
                        consider(
                            &mut ev,
                            vec![vs[0].clone(), vs[1].clone(), h, k],
                            &mut samples,
                            &mut best,
                            &mut best_vectors,
                        );
                    }
                }
            }
        }
        Condition::DistanceSum { n } => {
            let mut stream = TupleStream::new(space, n - 1, seed);
            for _ in 0..budget {
                let mut vs = stream.next_tuple();
                let mut last = DVector::zeros(space.real_dim());
                for v in &vs {
                    last -= v;
                }
                vs.push(last);
                consider(&mut ev, vs, &mut samples, &mut best, &mut best_vectors);
            }
        }
    }

    Ok(SearchOutcome { best, best_vectors, samples_evaluated: samples })
}

/// Seeded search for a hypothesis-satisfying witness whose residual exceeds
/// `tolerances.violation_threshold`. `None` means no candidate crossed the
/// threshold within the budget; it is not a proof that the condition holds.
pub fn search_violation<T: Real>(
    space: &NormedSpace<T>,
    cond: &Condition<T>,
    budget: usize,
    seed: u64,
    tolerances: &Tolerances<T>,
) -> Result<Option<Witness<T>>, CharacterizationError> {
    let outcome = search_condition_max(space, cond, budget, seed)?;
    Ok(outcome.best.and_then(|evaluation| {
        if evaluation.residual > tolerances.violation_threshold {
            Some(Witness {
                condition: cond.clone(),
                vectors: outcome.best_vectors,
                scalars: evaluation.scalars,
                residual: evaluation.residual,
                signed_defect: evaluation.signed_defect,
            })
        } else {
            None
        }
    }))
}

/// Overall verdict of a classification run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    /// No condition produced a violation above the threshold.
    InnerProductLike,
    NotInnerProduct,
}

/// Result of one condition inside a classification.
#[derive(Debug, Clone)]
pub struct ConditionOutcome<T> {
    pub condition: Condition<T>,
    pub max_residual: T,
    pub signed_defect: T,
    pub witness: Option<Witness<T>>,
    pub samples_evaluated: usize,
    /// True when a clean result would not certify inner-product structure
    /// (Birkhoff-James symmetry below real dimension 3).
    pub informative_only: bool,
}

/// Residual checks specific to complex spaces: conjugate symmetry and
/// i-linearity of the complex polarization form over seeded unit pairs.
#[derive(Debug, Clone)]
pub struct ComplexChecks<T> {
    pub conjugate_symmetry_max: T,
    pub i_linearity_max: T,
    pub samples: usize,
}

#[derive(Debug, Clone)]
pub struct ClassificationReport<T> {
    pub verdict: Verdict,
    pub outcomes: Vec<ConditionOutcome<T>>,
    pub complex_checks: Option<ComplexChecks<T>>,
}

/// Runs the default condition battery. Complex spaces are classified through
/// their realification (with real coefficients), witnesses therefore live in
/// interleaved real coordinates; the complex polarization checks run on the
/// original space.
pub fn classify_space<T: Real>(
    space: &NormedSpace<T>,
    budget: usize,
    seed: u64,
    tolerances: &Tolerances<T>,
) -> Result<ClassificationReport<T>, CharacterizationError> {
    tolerances
        .validate()
        .map_err(CharacterizationError::InvalidParameters)?;
    let (work_space, complex_checks) = match space.field() {
        ScalarField::Real => (space.clone(), None),
        ScalarField::Complex => {
            let (realified, j) = space.realify()?;
            let samples = budget.min(1000).max(1);
            let pool = sample_unit_vectors(space, 2 * samples, seed.wrapping_mul(0x9E37_79B9).wrapping_add(1));
            let mut conj_max = T::zero();
            let mut ilin_max = T::zero();
            for c in 0..samples {
                let f = &pool[2 * c];
                let g = &pool[2 * c + 1];
                let fg = polarize_complex(space, f, g)?;
                let gf = polarize_complex(space, g, f)?;
                let conj = ((fg.re - gf.re).powi(2) + (fg.im + gf.im).powi(2)).sqrt();
                let jf = j.apply(f)?;
                let jfg = polarize_complex(space, &jf, g)?;
                // i * <f, g> = (-im, re).
                let ilin = ((jfg.re + fg.im).powi(2) + (jfg.im - fg.re).powi(2)).sqrt();
                conj_max = conj_max.max(conj);
                ilin_max = ilin_max.max(ilin);
            }
            (
                realified,
                Some(ComplexChecks { conjugate_symmetry_max: conj_max, i_linearity_max: ilin_max, samples }),
            )
        }
    };

    let mut outcomes = Vec::new();
    let mut any_violation = false;
    for (idx, cond) in Condition::<T>::default_set().into_iter().enumerate() {
        let informative_only =
            matches!(cond, Condition::BirkhoffJamesSymmetry(_)) && work_space.real_dim() < 3;
        let outcome = search_condition_max(&work_space, &cond, budget, seed.wrapping_add(idx as u64))?;
        let (max_residual, signed_defect) = outcome
            .best
            .as_ref()
            .map(|b| (b.residual, b.signed_defect))
            .unwrap_or((T::zero(), T::zero()));
        let witness = outcome.best.as_ref().and_then(|b| {
            if b.residual > tolerances.violation_threshold {
                Some(Witness {
                    condition: cond.clone(),
                    vectors: outcome.best_vectors.clone(),
                    scalars: b.scalars.clone(),
                    residual: b.residual,
                    signed_defect: b.signed_defect,
                })
            } else {
                None
            }
        });
        any_violation |= witness.is_some();
        outcomes.push(ConditionOutcome {
            condition: cond,
            max_residual,
            signed_defect,
            witness,
            samples_evaluated: outcome.samples_evaluated,
            informative_only,
        });
    }

    Ok(ClassificationReport {
        verdict: if any_violation { Verdict::NotInnerProduct } else { Verdict::InnerProductLike },
        outcomes,
        complex_checks,
    })
}
