//! Symmetric eigensolvers backing the spectral pipeline: a dense
//! decomposition at small sizes, and a Lanczos iteration with full
//! reorthogonalization and kernel deflation above that.

use nalgebra::{DMatrix, DVector};
use ndarray::{Array1, Array2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Sizes up to this are solved densely outright; above it Lanczos runs first.
pub(crate) const DENSE_LIMIT: usize = 128;
/// Largest size the dense fallback accepts when Lanczos stalls.
pub(crate) const DENSE_FALLBACK_LIMIT: usize = 2048;
/// Residual acceptance threshold, scaled by max(1, Frobenius norm).
pub const RESIDUAL_TOL: f64 = 1e-10;
/// Iteration cap for the Lanczos loop.
const MAX_LANCZOS: usize = 400;
/// Ritz extraction cadence, in iterations.
const CHECK_EVERY: usize = 10;
/// Start-vector seed; fixed so repeated solves are bitwise identical.
const LANCZOS_SEED: u64 = 0x5eed_f1ed;

/// The `k` smallest eigenpairs of a symmetric matrix, ascending.
#[derive(Debug)]
pub(crate) struct EigenPairs {
    pub values: Vec<f64>,
    pub vectors: Vec<Array1<f64>>,
}

/// Computes the `min(k, n)` smallest eigenpairs of a symmetric matrix.
///
/// `kernel` is a known unit eigenvector for eigenvalue zero (a Laplacian
/// kernel, simple once connectivity has been checked). When present and the
/// matrix is large, Lanczos runs on its orthogonal complement and the kernel
/// pair is reattached; without it only the dense path is available, capped at
/// [`DENSE_FALLBACK_LIMIT`].
pub(crate) fn smallest_eigenpairs(
    a: &Array2<f64>,
    k: usize,
    kernel: Option<&Array1<f64>>,
) -> Result<EigenPairs> {
    let n = a.nrows();
    debug_assert_eq!(n, a.ncols());
    debug_assert!(k >= 1);
    let kernel = match kernel {
        Some(v) if n > DENSE_LIMIT => v,
        _ => {
            if n > DENSE_FALLBACK_LIMIT {
                return Err(Error::InvalidParameter {
                    name: "n",
                    value: n as f64,
                    reason: "dense eigensolve capped; a kernel vector is required for the iterative path",
                });
            }
            return Ok(dense_smallest(a, k));
        }
    };
    match lanczos_smallest(a, k, kernel) {
        Ok(pairs) => Ok(pairs),
        Err(_) if n <= DENSE_FALLBACK_LIMIT => Ok(dense_smallest(a, k)),
        Err(residual) => Err(Error::Convergence {
            method: "lanczos",
            iterations: MAX_LANCZOS,
            residual,
        }),
    }
}

/// Full dense decomposition; returns the `min(k, n)` smallest pairs.
///
/// The QR pass of the dense solver can return vectors mixed by a rotation
/// inside tightly grouped eigenvalues, so every returned pair is checked
/// against the explicit residual and polished by shifted inverse iteration
/// when necessary.
fn dense_smallest(a: &Array2<f64>, k: usize) -> EigenPairs {
    let n = a.nrows();
    let m = DMatrix::from_fn(n, n, |i, j| a[[i, j]]);
    let decomp = m.clone().symmetric_eigen();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&i, &j| decomp.eigenvalues[i].total_cmp(&decomp.eigenvalues[j]));
    let take = k.min(n);
    let tol = RESIDUAL_TOL * frobenius(a).max(1.0);
    let mut values = Vec::with_capacity(take);
    let mut accepted: Vec<DVector<f64>> = Vec::with_capacity(take);
    for &i in idx.iter().take(take) {
        let lambda = decomp.eigenvalues[i];
        let mut v: DVector<f64> = decomp.eigenvectors.column(i).into_owned();
        for round in 0..4 {
            // Project out already accepted vectors; a no-op across distinct
            // eigenvalues, but it keeps clustered pairs from collapsing onto
            // the same direction.
            for q in &accepted {
                let p = q.dot(&v);
                v.axpy(-p, q, 1.0);
            }
            let norm = v.norm();
            if norm < 1e-8 {
                // Collapsed into the accepted span; restart from a basis
                // direction and let the iteration rebuild the component.
                v = DVector::zeros(n);
                v[(i + round) % n] = 1.0;
                continue;
            }
            v /= norm;
            let r = &m * &v - lambda * &v;
            if r.norm() <= tol {
                break;
            }
            let mut shifted = m.clone();
            for d in 0..n {
                shifted[(d, d)] -= lambda;
            }
            match shifted.lu().solve(&v) {
                Some(y) if y.norm().is_finite() && y.norm() > 0.0 => v = y,
                // An exactly singular shift: the QR vector is kept as-is.
                _ => break,
            }
        }
        values.push(lambda);
        accepted.push(v);
    }
    let vectors = accepted
        .into_iter()
        .map(|v| Array1::from_iter(v.iter().copied()))
        .collect();
    EigenPairs { values, vectors }
}

/// Lanczos with full reorthogonalization on the shifted operator
/// `B = sigma*I - A`, restricted to the complement of `kernel`, so the
/// smallest eigenvalues of `A` become the dominant ones of `B`. On failure
/// returns the best residual reached so the caller can report it.
fn lanczos_smallest(
    a: &Array2<f64>,
    k: usize,
    kernel: &Array1<f64>,
) -> std::result::Result<EigenPairs, f64> {
    let n = a.nrows();
    let want = k - 1;
    let scale = frobenius(a).max(1.0);
    let tol = RESIDUAL_TOL * scale;
    let sigma = gershgorin_bound(a);
    let max_iter = MAX_LANCZOS.min(n - 1);

    let mut rng = ChaCha8Rng::seed_from_u64(LANCZOS_SEED);
    let mut v = Array1::from_shape_fn(n, |_| rng.gen_range(-1.0..1.0));
    v.scaled_add(-kernel.dot(&v), kernel);
    let norm = v.dot(&v).sqrt();
    if norm == 0.0 {
        return Err(f64::INFINITY);
    }
    v /= norm;

    let mut basis: Vec<Array1<f64>> = Vec::new();
    let mut alphas: Vec<f64> = Vec::new();
    let mut betas: Vec<f64> = Vec::new();
    let mut best_residual = f64::INFINITY;

    for j in 0..max_iter {
        let mut w = sigma * &v - a.dot(&v);
        if j > 0 {
            w.scaled_add(-betas[j - 1], &basis[j - 1]);
        }
        let alpha = v.dot(&w);
        w.scaled_add(-alpha, &v);
        alphas.push(alpha);
        basis.push(v);
        // Two classical Gram-Schmidt passes against the kernel and the whole
        // basis keep the recurrence orthogonal at machine precision.
        for _ in 0..2 {
            w.scaled_add(-kernel.dot(&w), kernel);
            for q in &basis {
                w.scaled_add(-q.dot(&w), q);
            }
        }
        let beta = w.dot(&w).sqrt();
        let exhausted = beta <= 1e-13 * sigma.max(1.0);
        let at_end = j + 1 == max_iter;
        if basis.len() >= want && ((j + 1) % CHECK_EVERY == 0 || exhausted || at_end) {
            match extract_ritz(a, &alphas, &betas, &basis, sigma, want, tol) {
                Ok(non_kernel) => return Ok(attach_kernel(a, kernel, non_kernel)),
                Err(residual) => best_residual = best_residual.min(residual),
            }
        }
        if exhausted {
            break;
        }
        betas.push(beta);
        v = w / beta;
    }
    Err(best_residual)
}

/// Solves the current tridiagonal problem and accepts the top `want` Ritz
/// pairs of `B` if every explicit residual against `A` is within `tol`.
fn extract_ritz(
    a: &Array2<f64>,
    alphas: &[f64],
    betas: &[f64],
    basis: &[Array1<f64>],
    sigma: f64,
    want: usize,
    tol: f64,
) -> std::result::Result<EigenPairs, f64> {
    let m = alphas.len();
    let mut t = DMatrix::zeros(m, m);
    for i in 0..m {
        t[(i, i)] = alphas[i];
        if i + 1 < m {
            t[(i, i + 1)] = betas[i];
            t[(i + 1, i)] = betas[i];
        }
    }
    let decomp = t.symmetric_eigen();
    let mut idx: Vec<usize> = (0..m).collect();
    // Descending in B corresponds to ascending in A.
    idx.sort_by(|&i, &j| decomp.eigenvalues[j].total_cmp(&decomp.eigenvalues[i]));

    let n = a.nrows();
    let mut values = Vec::with_capacity(want);
    let mut vectors = Vec::with_capacity(want);
    let mut worst = 0.0f64;
    for &i in idx.iter().take(want) {
        let s = decomp.eigenvectors.column(i);
        let mut x = Array1::zeros(n);
        for (step, q) in basis.iter().enumerate() {
            x.scaled_add(s[step], q);
        }
        let norm = x.dot(&x).sqrt();
        if norm == 0.0 {
            return Err(f64::INFINITY);
        }
        x /= norm;
        let lambda = sigma - decomp.eigenvalues[i];
        let mut r = a.dot(&x);
        r.scaled_add(-lambda, &x);
        worst = worst.max(r.dot(&r).sqrt());
        values.push(lambda);
        vectors.push(x);
    }
    if worst <= tol {
        Ok(EigenPairs { values, vectors })
    } else {
        Err(worst)
    }
}

/// Prepends the known kernel pair (Rayleigh quotient, vector) to the
/// deflated solution.
fn attach_kernel(a: &Array2<f64>, kernel: &Array1<f64>, rest: EigenPairs) -> EigenPairs {
    let lambda0 = kernel.dot(&a.dot(kernel));
    let mut values = vec![lambda0];
    let mut vectors = vec![kernel.clone()];
    values.extend(rest.values);
    vectors.extend(rest.vectors);
    EigenPairs { values, vectors }
}

pub(crate) fn frobenius(a: &Array2<f64>) -> f64 {
    a.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Upper bound on the spectral radius: max over rows of sum of |entries|.
fn gershgorin_bound(a: &Array2<f64>) -> f64 {
    let mut best = 0.0f64;
    for row in a.rows() {
        best = best.max(row.iter().map(|x| x.abs()).sum());
    }
    best
}
