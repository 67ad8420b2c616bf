//! Dense complex linear algebra helpers.
//!
//! Everything downstream works with complex Hermitian matrices of modest
//! dimension (atomic systems up to ~16 states; occupation-truncated field
//! Hamiltonians up to a few thousand).  This module wraps `nalgebra` with the
//! conventions used throughout the crate: eigenvalues sorted ascending,
//! ground-state phase fixed, spectral norms for Hermitian operators, and a
//! Lanczos iteration with full reorthogonalization for sizes where a dense
//! solve is wasteful.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMat = DMatrix<Complex64>;
pub type CVec = DVector<Complex64>;
pub type RMat = DMatrix<f64>;
pub type RVec = DVector<f64>;

/// Largest absolute entry of `A - A^H`.
pub fn hermiticity_defect(a: &CMat) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            let d = (a[(i, j)] - a[(j, i)].conj()).norm();
            if d > worst {
                worst = d;
            }
        }
    }
    worst
}

/// Checks `A = A^H` up to `tol` (absolute, relative to the largest entry).
pub fn require_hermitian(a: &CMat, tol: f64, what: &str) -> Result<()> {
    let scale = a.iter().map(|z| z.norm()).fold(1.0f64, f64::max);
    let defect = hermiticity_defect(a);
    if defect > tol * scale {
        return Err(Error::InvalidModel(format!(
            "{what} is not Hermitian: max |A - A^H| entry = {defect:.3e} (scale {scale:.3e})"
        )));
    }
    Ok(())
}

/// Eigendecomposition of a complex Hermitian matrix with eigenvalues sorted
/// ascending.  Returns `(eigenvalues, eigenvectors)` where column `k` of the
/// eigenvector matrix belongs to eigenvalue `k`.
pub fn hermitian_eigen(a: &CMat) -> Result<(Vec<f64>, CMat)> {
    if a.nrows() != a.ncols() {
        return Err(Error::Eigensolver(format!(
            "matrix is {}x{}, not square",
            a.nrows(),
            a.ncols()
        )));
    }
    let n = a.nrows();
    if n == 0 {
        return Err(Error::Eigensolver("empty matrix".into()));
    }
    let se = a.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| se.eigenvalues[i].total_cmp(&se.eigenvalues[j]));
    let values: Vec<f64> = order.iter().map(|&i| se.eigenvalues[i]).collect();
    let mut vectors = CMat::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &se.eigenvectors.column(src));
    }
    // Guard against a silently wrong backend: verify the reconstruction.
    let recon = &vectors
        * CMat::from_diagonal(&CVec::from_iterator(
            n,
            values.iter().map(|&v| Complex64::new(v, 0.0)),
        ))
        * vectors.adjoint();
    let scale = values.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let err = (&recon - a).iter().map(|z| z.norm()).fold(0.0f64, f64::max);
    if err > 1e-10 * scale.max(1.0) * (n as f64) {
        return Err(Error::Eigensolver(format!(
            "eigendecomposition residual {err:.3e} exceeds tolerance (scale {scale:.3e})"
        )));
    }
    Ok((values, vectors))
}

/// Fixes the global phase of a vector so that its largest-magnitude component
/// is real and positive.  Makes eigenvectors reproducible across runs.
pub fn fix_phase(v: &CVec) -> CVec {
    let mut idx = 0;
    let mut best = 0.0f64;
    for (i, z) in v.iter().enumerate() {
        if z.norm() > best {
            best = z.norm();
            idx = i;
        }
    }
    if best == 0.0 {
        return v.clone();
    }
    let phase = v[idx] / Complex64::new(v[idx].norm(), 0.0);
    v.map(|z| z / phase)
}

/// Spectral norm of a Hermitian matrix (largest |eigenvalue|).
pub fn hermitian_norm(a: &CMat) -> Result<f64> {
    let (vals, _) = hermitian_eigen(a)?;
    Ok(vals.iter().fold(0.0f64, |m, v| m.max(v.abs())))
}

/// Frobenius-style max-entry distance between two matrices.
pub fn max_entry_diff(a: &CMat, b: &CMat) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0f64, f64::max)
}

/// Largest imaginary part in absolute value over all entries.
pub fn max_imag(a: &CMat) -> f64 {
    a.iter().map(|z| z.im.abs()).fold(0.0f64, f64::max)
}

/// Ground eigenpair of a Hermitian operator given through its matrix-vector
/// product, via Lanczos with full reorthogonalization.  `dim` is the operator
/// dimension, `norm_estimate` an upper bound on the spectral norm used for the
/// residual target `residual <= tol * norm_estimate`.
pub fn lanczos_ground<F>(
    dim: usize,
    matvec: F,
    norm_estimate: f64,
    tol: f64,
    max_iter: usize,
) -> Result<(f64, CVec)>
where
    F: Fn(&CVec) -> CVec,
{
    if dim == 0 {
        return Err(Error::Eigensolver("empty operator".into()));
    }
    // Deterministic, structureless start vector.
    let mut v = CVec::from_iterator(
        dim,
        (0..dim).map(|i| {
            let x = ((i as f64) * 0.7390851332151607).sin() + 0.5;
            Complex64::new(x, 0.0)
        }),
    );
    let nv = v.norm();
    v /= Complex64::new(nv, 0.0);

    let mut basis: Vec<CVec> = vec![v.clone()];
    let mut alphas: Vec<f64> = Vec::new();
    let mut betas: Vec<f64> = Vec::new();
    let steps = max_iter.min(dim);

    for k in 0..steps {
        let mut w = matvec(&basis[k]);
        let alpha = basis[k].dotc(&w).re;
        alphas.push(alpha);
        // Full reorthogonalization, twice for stability.
        for _ in 0..2 {
            for b in &basis {
                let c = b.dotc(&w);
                w -= b * c;
            }
        }
        let beta = w.norm();
        // Check convergence of the lowest Ritz pair.
        let m = alphas.len();
        let mut t = RMat::zeros(m, m);
        for i in 0..m {
            t[(i, i)] = alphas[i];
            if i + 1 < m {
                t[(i, i + 1)] = betas[i];
                t[(i + 1, i)] = betas[i];
            }
        }
        let te = t.symmetric_eigen();
        let mut low = 0;
        for i in 0..m {
            if te.eigenvalues[i] < te.eigenvalues[low] {
                low = i;
            }
        }
        let theta = te.eigenvalues[low];
        let y = te.eigenvectors.column(low);
        let residual = beta * y[m - 1].abs();
        if residual <= tol * norm_estimate.max(1.0) || beta <= 1e-14 * norm_estimate.max(1.0) {
            let mut ritz = CVec::zeros(dim);
            for (i, b) in basis.iter().enumerate() {
                ritz += b * Complex64::new(y[i], 0.0);
            }
            let nr = ritz.norm();
            ritz /= Complex64::new(nr, 0.0);
            return Ok((theta, fix_phase(&ritz)));
        }
        if k + 1 < steps {
            betas.push(beta);
            basis.push(w / Complex64::new(beta, 0.0));
        }
    }
    Err(Error::Eigensolver(format!(
        "Lanczos did not converge in {steps} iterations (dim {dim})"
    )))
}
