//! Dense linear-algebra helpers shared by the higher modules: greedy pivoted
//! factorization of Gram matrices, deterministic orthonormal completion, seeded
//! orthogonal matrices, and a golden-section minimizer for convex line searches.

use nalgebra::{DMatrix, DVector};
use rand::rngs::StdRng;

use crate::scalar::{real, Real};

/// Eigenvalues of a symmetric matrix, descending.
pub fn symmetric_eigenvalues<T: Real>(m: &DMatrix<T>) -> Vec<T> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    let mut ev: Vec<T> = m.clone().symmetric_eigen().eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| b.partial_cmp(a).expect("finite eigenvalues"));
    ev
}

/// Rank of a positive-semidefinite matrix: eigenvalues at or below
/// `rel_tol * max(lambda_max, 1e-12)` count as zero.
pub fn numerical_rank_psd<T: Real>(m: &DMatrix<T>, rel_tol: T) -> usize {
    let ev = symmetric_eigenvalues(m);
    if ev.is_empty() {
        return 0;
    }
    let thr = rel_tol * ev[0].max(real(1e-12));
    ev.iter().filter(|&&l| l > thr).count()
}

/// Result of diagonal-pivoted Cholesky on a PSD Gram matrix.
///
/// `pivots` lists the chosen indices in greedy order (largest remaining residual
/// norm first, ties to the lowest index); they index a maximal well-conditioned
/// independent subset of the vectors behind the Gram.
#[derive(Debug, Clone)]
pub struct PivotedGram<T> {
    pub pivots: Vec<usize>,
    pub initial_max_diag: T,
    /// Row i holds the coefficients of vector i against the pivot sequence.
    pub coeffs: DMatrix<T>,
}

impl<T: Real> PivotedGram<T> {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }
}

/// Greedy pivoted Cholesky. Stops when every remaining diagonal entry (squared
/// residual norm) is at most `rel_tol * max(initial max diagonal, 1e-12)`.
pub fn pivoted_gram_cholesky<T: Real>(gram: &DMatrix<T>, rel_tol: T) -> PivotedGram<T> {
    let m = gram.nrows();
    assert_eq!(m, gram.ncols(), "gram matrix must be square");
    let mut diag: Vec<T> = (0..m).map(|i| gram[(i, i)]).collect();
    let initial_max_diag = diag.iter().fold(T::zero(), |a, &d| a.max(d));
    let thr = rel_tol * initial_max_diag.max(real(1e-12));
    let mut coeffs = DMatrix::<T>::zeros(m, m);
    let mut pivots: Vec<usize> = Vec::new();
    let mut used = vec![false; m];
    for t in 0..m {
        let mut best = None;
        for i in 0..m {
            if used[i] {
                continue;
            }
            match best {
                None => best = Some(i),
                Some(b) => {
                    if diag[i] > diag[b] {
                        best = Some(i);
                    }
                }
            }
        }
        let j = match best {
            Some(j) if diag[j] > thr => j,
            _ => break,
        };
        used[j] = true;
        let s = diag[j].sqrt();
        coeffs[(j, t)] = s;
        for i in 0..m {
            if used[i] {
                continue;
            }
            let mut v = gram[(i, j)];
            for u in 0..t {
                v -= coeffs[(i, u)] * coeffs[(j, u)];
            }
            let v = v / s;
            coeffs[(i, t)] = v;
            diag[i] = (diag[i] - v * v).max(T::zero());
        }
        pivots.push(j);
    }
    let rank = pivots.len();
    PivotedGram { pivots, initial_max_diag, coeffs: coeffs.columns(0, rank).into_owned() }
}

/// Modified Gram-Schmidt with a re-orthogonalization pass. Columns whose residual
/// drops below `drop_tol` times their original norm are skipped; the caller gets
/// the surviving orthonormal columns in input order.
pub fn orthonormal_frame<T: Real>(vectors: &[DVector<T>], drop_tol: T) -> Vec<DVector<T>> {
    let mut frame: Vec<DVector<T>> = Vec::with_capacity(vectors.len());
    for v in vectors {
        let scale = v.norm();
        if scale == T::zero() {
            continue;
        }
        let mut w = v.clone();
        for _ in 0..2 {
            for q in &frame {
                let c = q.dot(&w);
                w.axpy(-c, q, T::one());
            }
        }
        let r = w.norm();
        if r > drop_tol * scale {
            w /= r;
            frame.push(w);
        }
    }
    frame
}

/// Extends an orthonormal frame to a full basis of `R^dim` by orthonormalizing
/// the standard basis vectors in index order, dropping those with residual below
/// `drop_tol`. Deterministic; returns only the appended vectors.
pub fn complete_frame<T: Real>(frame: &[DVector<T>], dim: usize, drop_tol: T) -> Vec<DVector<T>> {
    let mut all: Vec<DVector<T>> = frame.to_vec();
    let mut added: Vec<DVector<T>> = Vec::new();
    for i in 0..dim {
        if all.len() == dim {
            break;
        }
        let mut w = DVector::<T>::zeros(dim);
        w[i] = T::one();
        for _ in 0..2 {
            for q in &all {
                let c = q.dot(&w);
                w.axpy(-c, q, T::one());
            }
        }
        let r = w.norm();
        if r > drop_tol {
            w /= r;
            all.push(w.clone());
            added.push(w);
        }
    }
    debug_assert_eq!(all.len(), dim, "standard basis always completes a frame");
    added
}

/// Haar-ish random orthogonal matrix: QR of a Gaussian matrix with the signs of
/// the R diagonal folded into Q.
pub fn random_orthogonal<T: Real>(dim: usize, rng: &mut StdRng) -> DMatrix<T> {
    let g = DMatrix::<T>::from_fn(dim, dim, |_, _| {
        real(rand::Rng::sample::<f64, _>(rng, rand_distr::StandardNormal))
    });
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..dim {
        if r[(j, j)] < T::zero() {
            for i in 0..dim {
                q[(i, j)] = -q[(i, j)];
            }
        }
    }
    q
}

/// Golden-section minimization of a convex function on [a, b] down to an interval
/// of length `tol`. Returns (argmin, min).
pub fn golden_min<T: Real, F: FnMut(T) -> T>(mut f: F, mut a: T, mut b: T, tol: T) -> (T, T) {
    let phi = (real::<T>(5.0).sqrt() - T::one()) / real(2.0);
    let mut c = b - phi * (b - a);
    let mut d = a + phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while b - a > tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = f(d);
        }
    }
    if fc <= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Largest absolute entry.
pub fn max_abs<T: Real>(m: &DMatrix<T>) -> T {
    m.iter().fold(T::zero(), |a, v| a.max(v.abs()))
}
