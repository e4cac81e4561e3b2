//! Normed-space descriptions and the operations every other module builds on:
//! norm evaluation, realification of complex spaces, and seeded unit-vector
//! sampling.
//!
//! Complex vectors are stored as interleaved real coordinates
//! `(re_1, im_1, re_2, im_2, ...)`, so realification is a relabelling: the returned
//! real space keeps consuming coordinate pairs as complex moduli and its norm agrees
//! with the complex one on the same storage.

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::scalar::{real, Real};

/// Scalar field a space is defined over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScalarField {
    Real,
    Complex,
}

/// Norm recipe. For spaces that consume coordinate pairs as complex moduli, the
/// p/sup/weighted recipes apply to the moduli; a quadratic form always acts on the
/// raw real coordinates.
#[derive(Debug, Clone, PartialEq)]
pub enum NormKind<T> {
    /// `(sum |x_i|^p)^(1/p)`, `p >= 1`.
    P(T),
    /// `max |x_i|`.
    Sup,
    /// `(sum w_i |x_i|^p)^(1/p)`, all `w_i > 0`.
    WeightedP { p: T, weights: Vec<T> },
    /// `sqrt(v^T Q v)` for symmetric positive-definite `Q`.
    Quadratic(QuadraticNorm<T>),
}

/// Validated symmetric positive-definite form with its Cholesky factor.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticNorm<T> {
    q: DMatrix<T>,
    /// Lower-triangular `L` with `Q = L L^T`.
    l: DMatrix<T>,
}

impl<T: Real> QuadraticNorm<T> {
    /// Symmetry is required within 1e-12 relative to the largest entry; the smallest
    /// eigenvalue must exceed `1e-10 * lambda_max`.
    pub fn new(q: DMatrix<T>) -> Result<Self, SpaceError> {
        if q.nrows() != q.ncols() || q.nrows() == 0 {
            return Err(SpaceError::InvalidSpec("quadratic form must be square and nonempty".into()));
        }
        let mut max_abs = T::zero();
        for v in q.iter() {
            if !v.is_finite() {
                return Err(SpaceError::NonFiniteInput);
            }
            max_abs = max_abs.max(v.abs());
        }
        let sym_tol = real::<T>(1e-12) * max_abs.max(T::one());
        for i in 0..q.nrows() {
            for j in (i + 1)..q.ncols() {
                if (q[(i, j)] - q[(j, i)]).abs() > sym_tol {
                    return Err(SpaceError::InvalidSpec("quadratic form must be symmetric".into()));
                }
            }
        }
        let eigen = q.clone().symmetric_eigen();
        let lambda_max = eigen.eigenvalues.iter().fold(T::zero(), |a, &l| a.max(l));
        let lambda_min = eigen.eigenvalues.iter().fold(lambda_max, |a, &l| a.min(l));
        if lambda_min <= real::<T>(1e-10) * lambda_max || lambda_max <= T::zero() {
            return Err(SpaceError::NotPositiveDefinite {
                min_eigenvalue: crate::scalar_to_f64(lambda_min),
            });
        }
        let l = nalgebra::Cholesky::new(q.clone())
            .ok_or(SpaceError::NotPositiveDefinite {
                min_eigenvalue: crate::scalar_to_f64(lambda_min),
            })?
            .l();
        Ok(QuadraticNorm { q, l })
    }

    pub fn matrix(&self) -> &DMatrix<T> {
        &self.q
    }

    /// Cholesky factor `L` (lower triangular, `Q = L L^T`).
    pub fn cholesky_l(&self) -> &DMatrix<T> {
        &self.l
    }
}

/// A finite-dimensional real or complex normed space.
#[derive(Debug, Clone, PartialEq)]
pub struct NormedSpace<T> {
    field: ScalarField,
    /// Dimension over `field`.
    dim: usize,
    kind: NormKind<T>,
    /// Norm consumes consecutive coordinate pairs as complex moduli.
    paired: bool,
}

impl<T: Real> NormedSpace<T> {
    pub fn new_real(dim: usize, kind: NormKind<T>) -> Result<Self, SpaceError> {
        Self::build(ScalarField::Real, dim, kind, false)
    }

    pub fn new_complex(dim: usize, kind: NormKind<T>) -> Result<Self, SpaceError> {
        Self::build(ScalarField::Complex, dim, kind, true)
    }

    /// Euclidean space, the reference case.
    pub fn euclidean(dim: usize) -> Self {
        Self::new_real(dim, NormKind::P(real(2.0))).expect("euclidean space is valid")
    }

    fn build(field: ScalarField, dim: usize, kind: NormKind<T>, paired: bool) -> Result<Self, SpaceError> {
        if dim == 0 {
            return Err(SpaceError::InvalidSpec("dimension must be at least 1".into()));
        }
        let real_dim = if field == ScalarField::Complex { 2 * dim } else { dim };
        let entities = if paired { real_dim / 2 } else { real_dim };
        match &kind {
            NormKind::P(p) => {
                if !p.is_finite() || *p < T::one() {
                    return Err(SpaceError::InvalidSpec("p must be finite and >= 1".into()));
                }
            }
            NormKind::Sup => {}
            NormKind::WeightedP { p, weights } => {
                if !p.is_finite() || *p < T::one() {
                    return Err(SpaceError::InvalidSpec("p must be finite and >= 1".into()));
                }
                if weights.len() != entities {
                    return Err(SpaceError::DimensionMismatch { expected: entities, got: weights.len() });
                }
                if weights.iter().any(|w| !w.is_finite() || *w <= T::zero()) {
                    return Err(SpaceError::InvalidSpec("weights must be positive and finite".into()));
                }
            }
            NormKind::Quadratic(form) => {
                if form.matrix().nrows() != real_dim {
                    return Err(SpaceError::DimensionMismatch {
                        expected: real_dim,
                        got: form.matrix().nrows(),
                    });
                }
                if paired {
                    // Multiplication by i must be an isometry: J^T Q J = Q.
                    let j = complex_structure_matrix::<T>(real_dim / 2);
                    let q = form.matrix();
                    let rotated = j.transpose() * q * &j;
                    let mut max_abs = T::one();
                    for v in q.iter() {
                        max_abs = max_abs.max(v.abs());
                    }
                    let tol = real::<T>(1e-12) * max_abs;
                    if (&rotated - q).iter().any(|d| d.abs() > tol) {
                        return Err(SpaceError::InvalidSpec(
                            "quadratic form on a complex space must commute with multiplication by i".into(),
                        ));
                    }
                }
            }
        }
        Ok(NormedSpace { field, dim, kind, paired })
    }

    pub fn field(&self) -> ScalarField {
        self.field
    }

    /// Dimension over the scalar field.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of real coordinates a vector carries.
    pub fn real_dim(&self) -> usize {
        match self.field {
            ScalarField::Real => self.dim,
            ScalarField::Complex => 2 * self.dim,
        }
    }

    pub fn kind(&self) -> &NormKind<T> {
        &self.kind
    }

    /// True when the norm consumes coordinate pairs as complex moduli.
    pub fn is_paired(&self) -> bool {
        self.paired
    }

    /// Number of modulus entities the p/sup/weighted recipes see.
    pub fn entity_count(&self) -> usize {
        if self.paired {
            self.real_dim() / 2
        } else {
            self.real_dim()
        }
    }

    /// Norm of `v`. Errors on length mismatch or non-finite entries.
    pub fn norm(&self, v: &DVector<T>) -> Result<T, SpaceError> {
        if v.len() != self.real_dim() {
            return Err(SpaceError::DimensionMismatch { expected: self.real_dim(), got: v.len() });
        }
        if v.iter().any(|x| !x.is_finite()) {
            return Err(SpaceError::NonFiniteInput);
        }
        Ok(self.norm_slice(v.as_slice()))
    }

    /// Distance `||u - v||`.
    pub fn distance(&self, u: &DVector<T>, v: &DVector<T>) -> Result<T, SpaceError> {
        if u.len() != v.len() {
            return Err(SpaceError::DimensionMismatch { expected: u.len(), got: v.len() });
        }
        self.norm(&(u - v))
    }

    /// Unchecked norm kernel used by search loops; callers guarantee the length.
    pub(crate) fn norm_slice(&self, v: &[T]) -> T {
        debug_assert_eq!(v.len(), self.real_dim());
        match &self.kind {
            NormKind::P(p) => {
                if self.paired {
                    self.p_norm_of(v.chunks_exact(2).map(|c| modulus(c[0], c[1])), *p)
                } else {
                    self.p_norm_of(v.iter().copied(), *p)
                }
            }
            NormKind::Sup => {
                let m = if self.paired {
                    v.chunks_exact(2).map(|c| modulus(c[0], c[1])).fold(T::zero(), |a, m| a.max(m))
                } else {
                    v.iter().fold(T::zero(), |a, x| a.max(x.abs()))
                };
                m
            }
            NormKind::WeightedP { p, weights } => {
                if self.paired {
                    self.weighted_p_norm_of(v.chunks_exact(2).map(|c| modulus(c[0], c[1])), weights, *p)
                } else {
                    self.weighted_p_norm_of(v.iter().copied(), weights, *p)
                }
            }
            NormKind::Quadratic(form) => {
                let q = form.matrix();
                let n = v.len();
                let mut acc = T::zero();
                for i in 0..n {
                    let mut row = T::zero();
                    for j in 0..n {
                        row += q[(i, j)] * v[j];
                    }
                    acc += v[i] * row;
                }
                acc.max(T::zero()).sqrt()
            }
        }
    }

    fn p_norm_of(&self, xs: impl Iterator<Item = T>, p: T) -> T {
        let one = T::one();
        let two = one + one;
        if p == one {
            xs.fold(T::zero(), |a, x| a + x.abs())
        } else if p == two {
            xs.fold(T::zero(), |a, x| a + x * x).sqrt()
        } else {
            let s = xs.fold(T::zero(), |a, x| a + x.abs().powf(p));
            s.powf(one / p)
        }
    }

    fn weighted_p_norm_of(&self, xs: impl Iterator<Item = T>, w: &[T], p: T) -> T {
        let one = T::one();
        let two = one + one;
        if p == two {
            xs.zip(w).fold(T::zero(), |a, (x, &wi)| a + wi * x * x).sqrt()
        } else if p == one {
            xs.zip(w).fold(T::zero(), |a, (x, &wi)| a + wi * x.abs())
        } else {
            let s = xs.zip(w).fold(T::zero(), |a, (x, &wi)| a + wi * x.abs().powf(p));
            s.powf(one / p)
        }
    }

    /// Views a complex space as a real one (same storage, same norm values) and
    /// returns the matrix of multiplication by i.
    pub fn realify(&self) -> Result<(NormedSpace<T>, ComplexStructure<T>), SpaceError> {
        if self.field != ScalarField::Complex {
            return Err(SpaceError::NotComplex);
        }
        let space = NormedSpace {
            field: ScalarField::Real,
            dim: 2 * self.dim,
            kind: self.kind.clone(),
            paired: true,
        };
        Ok((space, ComplexStructure::new(self.dim)))
    }
}

#[inline]
fn modulus<T: Real>(re: T, im: T) -> T {
    (re * re + im * im).sqrt()
}

fn complex_structure_matrix<T: Real>(complex_dim: usize) -> DMatrix<T> {
    let k = 2 * complex_dim;
    let mut j = DMatrix::zeros(k, k);
    for b in 0..complex_dim {
        j[(2 * b, 2 * b + 1)] = -T::one();
        j[(2 * b + 1, 2 * b)] = T::one();
    }
    j
}

/// Multiplication by i on interleaved storage: `(re, im) -> (-im, re)` per pair.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexStructure<T> {
    complex_dim: usize,
    j: DMatrix<T>,
}

impl<T: Real> ComplexStructure<T> {
    pub fn new(complex_dim: usize) -> Self {
        ComplexStructure { complex_dim, j: complex_structure_matrix(complex_dim) }
    }

    pub fn matrix(&self) -> &DMatrix<T> {
        &self.j
    }

    pub fn real_dim(&self) -> usize {
        2 * self.complex_dim
    }

    pub fn apply(&self, v: &DVector<T>) -> Result<DVector<T>, SpaceError> {
        if v.len() != self.real_dim() {
            return Err(SpaceError::DimensionMismatch { expected: self.real_dim(), got: v.len() });
        }
        let mut out = DVector::zeros(v.len());
        for b in 0..self.complex_dim {
            out[2 * b] = -v[2 * b + 1];
            out[2 * b + 1] = v[2 * b];
        }
        Ok(out)
    }
}

/// Labelled points in a common space.
#[derive(Debug, Clone, PartialEq)]
pub struct PointConfig<T> {
    pub space: NormedSpace<T>,
    pub points: Vec<DVector<T>>,
    pub labels: Option<Vec<String>>,
}

impl<T: Real> PointConfig<T> {
    pub fn new(space: NormedSpace<T>, points: Vec<DVector<T>>) -> Result<Self, SpaceError> {
        if points.is_empty() {
            return Err(SpaceError::InvalidSpec("point configuration must be nonempty".into()));
        }
        for p in &points {
            if p.len() != space.real_dim() {
                return Err(SpaceError::DimensionMismatch { expected: space.real_dim(), got: p.len() });
            }
            if p.iter().any(|x| !x.is_finite()) {
                return Err(SpaceError::NonFiniteInput);
            }
        }
        Ok(PointConfig { space, points, labels: None })
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self, SpaceError> {
        if labels.len() != self.points.len() {
            return Err(SpaceError::DimensionMismatch { expected: self.points.len(), got: labels.len() });
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// The axis-aligned unit directions every search visits before any random draw:
/// `+e_i`, `-e_i`, then for each i < j the four normalized combinations
/// `+-e_i +- e_j`. On polytope norms these hit facets and edge midpoints.
pub fn deterministic_unit_family<T: Real>(space: &NormedSpace<T>) -> Vec<DVector<T>> {
    let k = space.real_dim();
    let mut raw: Vec<DVector<T>> = Vec::new();
    for i in 0..k {
        let mut v = DVector::zeros(k);
        v[i] = T::one();
        raw.push(v);
    }
    for i in 0..k {
        let mut v = DVector::zeros(k);
        v[i] = -T::one();
        raw.push(v);
    }
    for i in 0..k {
        for j in (i + 1)..k {
            for (si, sj) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
                let mut v = DVector::zeros(k);
                v[i] = real(si);
                v[j] = real(sj);
                raw.push(v);
            }
        }
    }
    for v in &mut raw {
        let n = space.norm_slice(v.as_slice());
        *v /= n;
    }
    raw
}

/// Deterministic unit sample: the axis family first (truncated if `count` is
/// small), then seeded Gaussian directions rescaled to unit norm.
pub fn sample_unit_vectors<T: Real>(space: &NormedSpace<T>, count: usize, seed: u64) -> Vec<DVector<T>> {
    let family = deterministic_unit_family(space);
    let mut out: Vec<DVector<T>> = family.into_iter().take(count).collect();
    if out.len() < count {
        let mut sampler = UnitSampler::new(space.clone(), seed);
        while out.len() < count {
            out.push(sampler.next_unit());
        }
    }
    out
}

/// Stream of seeded unit vectors (Gaussian directions normalized in the space's
/// norm). Used by searches that interleave deterministic and random candidates.
pub(crate) struct UnitSampler<T> {
    space: NormedSpace<T>,
    rng: rand::rngs::StdRng,
}

impl<T: Real> UnitSampler<T> {
    pub fn new(space: NormedSpace<T>, seed: u64) -> Self {
        use rand::SeedableRng;
        UnitSampler { space, rng: rand::rngs::StdRng::seed_from_u64(seed) }
    }

    pub fn next_unit(&mut self) -> DVector<T> {
        let k = self.space.real_dim();
        loop {
            let mut v = DVector::zeros(k);
            for i in 0..k {
                let g: f64 = rand::Rng::sample(&mut self.rng, rand_distr::StandardNormal);
                v[i] = real(g);
            }
            let n = self.space.norm_slice(v.as_slice());
            if n > real(1e-9) {
                v /= n;
                return v;
            }
        }
    }
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum SpaceError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("input contains non-finite entries")]
    NonFiniteInput,
    #[error("invalid space description: {0}")]
    InvalidSpec(String),
    #[error("matrix is not positive definite (min eigenvalue {min_eigenvalue:.3e})")]
    NotPositiveDefinite { min_eigenvalue: f64 },
    #[error("operation requires a complex space")]
    NotComplex,
}

impl SpaceError {
    pub fn name(&self) -> &'static str {
        match self {
            SpaceError::DimensionMismatch { .. } => "DimensionMismatch",
            SpaceError::NonFiniteInput => "NonFiniteInput",
            SpaceError::InvalidSpec(_) => "InvalidSpec",
            SpaceError::NotPositiveDefinite { .. } => "NotPositiveDefinite",
            SpaceError::NotComplex => "NotComplex",
        }
    }
}
