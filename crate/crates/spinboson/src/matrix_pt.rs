//! Rayleigh–Schrödinger perturbation theory for finite Hermitian pencils.
//!
//! Given Hermitian `H₀` and `V` with a simple isolated ground eigenvalue of
//! `H₀`, the ground eigenvalue of `H₀ + λV` has an asymptotic expansion
//! `E(λ) = Σ E_k λ^k` whose coefficients this module computes two independent
//! ways: by the inductive recursion for the (unnormalized) eigenvector
//! corrections, and by the resolvent-kernel recursion `K_m`.  Both are exact
//! up to floating point, so they cross-validate each other and serve as the
//! ground truth for the field-theoretic expansion engines.
//!
//! Normalization convention: `⟨ψ₀, ψ(λ)⟩ = 1`, i.e. the corrections `ψ_m`
//! live in the orthogonal complement of `ψ₀` and are never renormalized.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, CMat, CVec};
use crate::model::DEFAULT_GAP_MIN;

/// A finite Hermitian perturbation problem `(H₀, V)` with cached spectral
/// data of `H₀`.
#[derive(Debug, Clone)]
pub struct FiniteProblem {
    h0: CMat,
    v: CMat,
    eigenvalues: Vec<f64>,
    eigenvectors: CMat,
    e0: f64,
    psi0: CVec,
    p0_bar: CMat,
    gap: f64,
}

impl FiniteProblem {
    pub fn new(h0: CMat, v: CMat) -> Result<Self> {
        Self::with_gap_min(h0, v, DEFAULT_GAP_MIN)
    }

    pub fn with_gap_min(h0: CMat, v: CMat, gap_min: f64) -> Result<Self> {
        linalg::require_hermitian(&h0, 1e-12, "unperturbed Hamiltonian")?;
        linalg::require_hermitian(&v, 1e-12, "perturbation")?;
        if h0.nrows() != v.nrows() {
            return Err(Error::InvalidModel(format!(
                "H0 is {}x{} but V is {}x{}",
                h0.nrows(),
                h0.ncols(),
                v.nrows(),
                v.ncols()
            )));
        }
        if h0.nrows() < 2 {
            return Err(Error::InvalidModel(
                "perturbation problems need dimension at least 2".into(),
            ));
        }
        let (eigenvalues, mut eigenvectors) = linalg::hermitian_eigen(&h0)?;
        let e0 = eigenvalues[0];
        let gap = eigenvalues[1] - e0;
        if gap < gap_min {
            return Err(Error::InvalidModel(format!(
                "ground state not isolated: lowest eigenvalues {e0} and {} differ by {gap:.3e} < gap_min {gap_min:.3e}",
                eigenvalues[1]
            )));
        }
        let psi0 = linalg::fix_phase(&eigenvectors.column(0).into_owned());
        eigenvectors.set_column(0, &psi0);
        let d = h0.nrows();
        let p0_bar = CMat::identity(d, d) - &psi0 * psi0.adjoint();
        Ok(Self { h0, v, eigenvalues, eigenvectors, e0, psi0, p0_bar, gap })
    }

    pub fn dimension(&self) -> usize {
        self.h0.nrows()
    }

    pub fn h0(&self) -> &CMat {
        &self.h0
    }

    pub fn v(&self) -> &CMat {
        &self.v
    }

    pub fn ground_energy(&self) -> f64 {
        self.e0
    }

    pub fn ground_state(&self) -> &CVec {
        &self.psi0
    }

    pub fn excited_projection(&self) -> &CMat {
        &self.p0_bar
    }

    pub fn gap(&self) -> f64 {
        self.gap
    }

    /// `K₀ = P̄₀ (H₀ − E₀)^{-1} P̄₀`: the reduced resolvent on the orthogonal
    /// complement of the ground state, assembled spectrally so the excluded
    /// direction is exactly annihilated.
    pub fn reduced_resolvent(&self) -> CMat {
        let d = self.dimension();
        let mut k0 = CMat::zeros(d, d);
        for k in 1..d {
            let c = 1.0 / (self.eigenvalues[k] - self.e0);
            let col = self.eigenvectors.column(k);
            k0 += (col * col.adjoint()).scale(c);
        }
        k0
    }

    /// Ground eigenpair of `H₀ + λ V`.
    pub fn perturbed_ground(&self, lambda: f64) -> Result<(f64, CVec)> {
        let h = &self.h0 + self.v.scale(lambda);
        let (vals, vecs) = linalg::hermitian_eigen(&h)?;
        Ok((vals[0], vecs.column(0).into_owned()))
    }
}

/// Which recursion produced an expansion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Method {
    /// Vector recursion `ψ_{m}` from the inductive formula.
    Inductive,
    /// Kernel recursion `K_m` (Feshbach-map form).
    Feshbach,
}

/// Expansion coefficients `E₀…E_n` with the vector corrections `ψ₀…ψ_n`.
#[derive(Debug, Clone)]
pub struct ExpansionResult {
    pub energies: Vec<f64>,
    pub vectors: Vec<CVec>,
    pub method: Method,
    /// Largest imaginary residue seen while extracting the (mathematically
    /// real) energies; diagnostic for Hermiticity of the inputs.
    pub imag_residue: f64,
}

impl ExpansionResult {
    pub fn order(&self) -> usize {
        self.energies.len().saturating_sub(1)
    }

    /// `Σ_{k≤m} E_k λ^k` over the stored coefficients.
    pub fn partial_sum(&self, lambda: f64) -> f64 {
        let mut acc = 0.0;
        for &e in self.energies.iter().rev() {
            acc = acc * lambda + e;
        }
        acc
    }
}

/// Energy and vector corrections by the inductive recursion:
/// `E_{m+1} = ⟨ψ₀, V ψ_m⟩`,
/// `ψ_{m} = (H₀ − E₀)^{-1} P̄₀ (Σ_{k=1}^{m} E_k ψ_{m−k} − V ψ_{m−1})`.
pub fn rs_coefficients(problem: &FiniteProblem, n: usize) -> Result<ExpansionResult> {
    if n < 1 {
        return Err(Error::Config("expansion order must be at least 1".into()));
    }
    let k0 = problem.reduced_resolvent();
    let psi0 = problem.ground_state().clone();
    let v = problem.v();

    let mut energies_c: Vec<Complex64> = vec![Complex64::new(problem.ground_energy(), 0.0)];
    let mut vectors: Vec<CVec> = vec![psi0.clone()];
    let mut imag_residue = 0.0f64;

    // E₁ = ⟨ψ₀, V ψ₀⟩.
    let e1 = (psi0.adjoint() * v * &psi0)[(0, 0)];
    energies_c.push(e1);
    imag_residue = imag_residue.max(e1.im.abs());

    for m in 1..=n {
        // ψ_m from E_1…E_m and ψ_0…ψ_{m−1}.
        let mut rhs = -(v * &vectors[m - 1]);
        for k in 1..=m {
            rhs += &vectors[m - k] * energies_c[k];
        }
        let psi_m = &k0 * rhs;
        vectors.push(psi_m);
        if m < n {
            let e_next = (psi0.adjoint() * v * &vectors[m])[(0, 0)];
            energies_c.push(e_next);
            imag_residue = imag_residue.max(e_next.im.abs());
        }
    }

    Ok(ExpansionResult {
        energies: energies_c.iter().map(|z| z.re).collect(),
        vectors,
        method: Method::Inductive,
        imag_residue,
    })
}

/// Energy coefficients by the kernel recursion:
/// `K₀ = P̄₀/(H₀ − E₀)`,
/// `K_m = Σ_{j=1}^{m} K_{j−1} (E_{m+1−j} − δ_{jm} V) K₀`,
/// `E_{m+1} = −⟨ψ₀, V K_{m−1} V ψ₀⟩`, with vectors `ψ_m = −K_{m−1} V ψ₀`.
pub fn feshbach_coefficients(problem: &FiniteProblem, n: usize) -> Result<ExpansionResult> {
    if n < 1 {
        return Err(Error::Config("expansion order must be at least 1".into()));
    }
    let d = problem.dimension();
    let k0 = problem.reduced_resolvent();
    let psi0 = problem.ground_state().clone();
    let v = problem.v();
    let v_psi0 = v * &psi0;

    let mut energies_c: Vec<Complex64> = vec![Complex64::new(problem.ground_energy(), 0.0)];
    let mut vectors: Vec<CVec> = vec![psi0.clone()];
    let mut imag_residue = 0.0f64;

    let e1 = (psi0.adjoint() * &v_psi0)[(0, 0)];
    energies_c.push(e1);
    imag_residue = imag_residue.max(e1.im.abs());

    // kernels[m] = K_m.
    let mut kernels: Vec<CMat> = vec![k0.clone()];
    for m in 1..=n {
        // E_{m+1} = −⟨ψ₀, V K_{m−1} V ψ₀⟩ and ψ_m = −K_{m−1} V ψ₀.
        let km1_v_psi0 = &kernels[m - 1] * &v_psi0;
        vectors.push(-&km1_v_psi0);
        if m < n {
            let e_next = -(v_psi0.adjoint() * &km1_v_psi0)[(0, 0)];
            energies_c.push(e_next);
            imag_residue = imag_residue.max(e_next.im.abs());
        }
        if m < n {
            // K_m = Σ_{j=1}^{m} K_{j−1}(E_{m+1−j} − δ_{jm} V) K₀.
            let mut km = CMat::zeros(d, d);
            for j in 1..=m {
                let mut middle = CMat::identity(d, d) * energies_c[m + 1 - j];
                if j == m {
                    middle -= v;
                }
                km += &kernels[j - 1] * middle * &k0;
            }
            kernels.push(km);
        }
    }

    Ok(ExpansionResult {
        energies: energies_c.iter().map(|z| z.re).collect(),
        vectors,
        method: Method::Feshbach,
        imag_residue,
    })
}

/// One row of the asymptotic-remainder diagnostic.
#[derive(Debug, Clone, Serialize)]
pub struct ResidualRow {
    pub lambda: f64,
    /// Exact ground energy `E(λ)` of `H₀ + λV`.
    pub energy: f64,
    /// `Σ_{k≤m} E_k λ^k`.
    pub partial_sum: f64,
    /// `λ^{−m} (E(λ) − Σ)`; zero at `λ = 0`.
    pub scaled_remainder: f64,
    /// `|⟨ψ₀, ψ(λ)⟩|` for the exact normalized ground vector.
    pub overlap: f64,
    /// Set when the overlap drops below 0.1: the `⟨ψ₀, ψ(λ)⟩ = 1`
    /// normalization is then untrustworthy at this `λ`.
    pub normalization_suspect: bool,
    /// Eigensolver failure for this row, if any (row excluded from the fit).
    pub solver_error: Option<String>,
}

/// Remainder table plus the fitted decay rate.
#[derive(Debug, Clone, Serialize)]
pub struct ResidualTable {
    pub order: usize,
    pub rows: Vec<ResidualRow>,
    /// Slope of `log |E(λ) − Σ|` against `log λ` over the usable rows;
    /// `None` when fewer than two rows are usable.
    pub fitted_slope: Option<f64>,
}

/// Evaluates the remainder `E(λ) − Σ_{k≤m} E_k λ^k` on a decreasing λ-grid
/// and fits its log-log decay rate.  The expected slope is `m + 1` (or
/// steeper when the next coefficients vanish).
pub fn asymptotic_residuals(
    problem: &FiniteProblem,
    energies: &[f64],
    lambdas: &[f64],
) -> Result<ResidualTable> {
    if energies.is_empty() {
        return Err(Error::Config("need at least E0 to form partial sums".into()));
    }
    if lambdas.is_empty() {
        return Err(Error::Config("empty lambda grid".into()));
    }
    for w in lambdas.windows(2) {
        if !(w[1] < w[0]) {
            return Err(Error::Config(format!(
                "lambda grid must be strictly decreasing, got {} before {}",
                w[0], w[1]
            )));
        }
    }
    if lambdas.iter().any(|&l| l < 0.0) {
        return Err(Error::Config("lambda grid must be non-negative".into()));
    }
    let m = energies.len() - 1;
    let mut rows = Vec::with_capacity(lambdas.len());
    for &lambda in lambdas {
        let partial = horner(energies, lambda);
        match problem.perturbed_ground(lambda) {
            Ok((e, vec)) => {
                let overlap = problem.ground_state().dotc(&vec).norm();
                let remainder = e - partial;
                let scaled = if lambda == 0.0 { 0.0 } else { remainder / lambda.powi(m as i32) };
                rows.push(ResidualRow {
                    lambda,
                    energy: e,
                    partial_sum: partial,
                    scaled_remainder: scaled,
                    overlap,
                    normalization_suspect: overlap < 0.1,
                    solver_error: None,
                });
            }
            Err(err) => rows.push(ResidualRow {
                lambda,
                energy: f64::NAN,
                partial_sum: partial,
                scaled_remainder: f64::NAN,
                overlap: f64::NAN,
                normalization_suspect: true,
                solver_error: Some(err.to_string()),
            }),
        }
    }
    // Log-log fit over usable rows (positive λ, clean solve, remainder above
    // the eigensolver noise floor).
    let scale = rows
        .iter()
        .filter(|r| r.solver_error.is_none())
        .map(|r| r.energy.abs())
        .fold(1.0f64, f64::max);
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| {
            r.solver_error.is_none()
                && r.lambda > 0.0
                && (r.energy - r.partial_sum).abs() > 1e-13 * scale
        })
        .map(|r| (r.lambda.ln(), (r.energy - r.partial_sum).abs().ln()))
        .collect();
    let fitted_slope = fit_slope(&pts);
    Ok(ResidualTable { order: m, rows, fitted_slope })
}

pub(crate) fn horner(coeffs: &[f64], x: f64) -> f64 {
    let mut acc = 0.0;
    for &c in coeffs.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

/// Ordinary least-squares slope of `y` against `x` for `(x, y)` points.
pub(crate) fn fit_slope(pts: &[(f64, f64)]) -> Option<f64> {
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let denom = n * sxx - sx * sx;
    if denom.abs() < 1e-300 {
        return None;
    }
    Some((n * sxy - sx * sy) / denom)
}

/// Independent check of expansion coefficients: fits a polynomial of degree
/// `max_order` to the exact ground energy on Chebyshev points of
/// `[-a, a]` with `a = min(0.05·gap, 0.05)`, in the scaled variable `λ/a`
/// for conditioning, and rescales the coefficients back.
pub fn polynomial_fit_coefficients(problem: &FiniteProblem, max_order: usize) -> Result<Vec<f64>> {
    let degree = max_order.max(4) + 4;
    let n_pts = 2 * degree + 1;
    let a = (0.05 * problem.gap()).min(0.05);
    // Chebyshev points of [-1, 1].
    let xs: Vec<f64> = (0..n_pts)
        .map(|j| (std::f64::consts::PI * (2.0 * j as f64 + 1.0) / (2.0 * n_pts as f64)).cos())
        .collect();
    let mut ys = Vec::with_capacity(n_pts);
    for &x in &xs {
        let (e, _) = problem.perturbed_ground(a * x)?;
        ys.push(e);
    }
    // Least-squares Vandermonde solve in the scaled variable.
    let mut vm = nalgebra::DMatrix::<f64>::zeros(n_pts, degree + 1);
    for (i, &x) in xs.iter().enumerate() {
        let mut p = 1.0;
        for k in 0..=degree {
            vm[(i, k)] = p;
            p *= x;
        }
    }
    let rhs = nalgebra::DVector::<f64>::from_vec(ys);
    let svd = vm.svd(true, true);
    let sol = svd
        .solve(&rhs, 1e-14)
        .map_err(|e| Error::Eigensolver(format!("polynomial fit failed: {e}")))?;
    Ok((0..=max_order).map(|k| sol[k] / a.powi(k as i32)).collect())
}

/// Reproducible random Hermitian problem: `H₀` with eigenvalue spread scaled
/// by `spread` and ground gap at least 0.3·spread, `V` Hermitian with unit
/// spectral norm.
pub fn seeded_problem(dimension: usize, seed: u64, spread: f64) -> Result<FiniteProblem> {
    if dimension < 2 {
        return Err(Error::Config("seeded problems need dimension >= 2".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let random_hermitian = |rng: &mut ChaCha8Rng| {
        let raw = CMat::from_fn(dimension, dimension, |_, _| {
            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        (&raw + raw.adjoint()).scale(0.5)
    };
    let h_raw = random_hermitian(&mut rng);
    let (mut vals, vecs) = linalg::hermitian_eigen(&h_raw)?;
    // Enforce an isolated ground state by lifting the excited spectrum.
    let min_gap = 0.3;
    if vals.len() > 1 {
        let deficit = min_gap - (vals[1] - vals[0]);
        if deficit > 0.0 {
            for v in vals.iter_mut().skip(1) {
                *v += deficit;
            }
        }
    }
    let lam = CMat::from_diagonal(&CVec::from_iterator(
        dimension,
        vals.iter().map(|&v| Complex64::new(v * spread, 0.0)),
    ));
    let h0 = &vecs * lam * vecs.adjoint();
    let h0 = (&h0 + h0.adjoint()).scale(0.5);

    let v_raw = random_hermitian(&mut rng);
    let v_norm = linalg::hermitian_norm(&v_raw)?;
    let v = v_raw.scale(1.0 / v_norm.max(1e-12));
    FiniteProblem::with_gap_min(h0, v, 0.25 * spread)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_level_finite() -> FiniteProblem {
        let h0 = CMat::from_row_slice(
            2,
            2,
            &[
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(1.0, 0.0),
            ],
        );
        let v = CMat::from_row_slice(
            2,
            2,
            &[
                Complex64::new(0.0, 0.0),
                Complex64::new(1.0, 0.0),
                Complex64::new(1.0, 0.0),
                Complex64::new(0.0, 0.0),
            ],
        );
        FiniteProblem::new(h0, v).unwrap()
    }

    #[test]
    fn zero_perturbation_gives_zero_coefficients() {
        let h0 = CMat::from_diagonal(&CVec::from_vec(vec![
            Complex64::new(-1.0, 0.0),
            Complex64::new(0.5, 0.0),
            Complex64::new(2.0, 0.0),
        ]));
        let v = CMat::zeros(3, 3);
        let p = FiniteProblem::new(h0, v).unwrap();
        let r = rs_coefficients(&p, 5).unwrap();
        assert_eq!(r.energies[0], -1.0);
        for k in 1..=5 {
            assert_eq!(r.energies[k], 0.0);
            assert!(r.vectors[k].norm() == 0.0);
        }
    }

    #[test]
    fn two_level_closed_form_series() {
        // Ground eigenvalue (1 − √(1 + 4λ²))/2 = −λ² + λ⁴ − 2λ⁶ + …
        let p = two_level_finite();
        let r = rs_coefficients(&p, 6).unwrap();
        let expected = [0.0, 0.0, -1.0, 0.0, 1.0, 0.0, -2.0];
        for (k, &e) in expected.iter().enumerate() {
            assert!(
                (r.energies[k] - e).abs() < 1e-12,
                "E_{k} = {} expected {e}",
                r.energies[k]
            );
        }
        let f = feshbach_coefficients(&p, 6).unwrap();
        for k in 0..=6 {
            assert!((f.energies[k] - r.energies[k]).abs() < 1e-12);
        }
    }

    #[test]
    fn recursion_residual_and_complement_constraint() {
        let p = seeded_problem(6, 42, 1.0).unwrap();
        let r = rs_coefficients(&p, 5).unwrap();
        let scale = linalg::hermitian_norm(p.h0()).unwrap() + linalg::hermitian_norm(p.v()).unwrap();
        for m in 1..=5 {
            // ‖H₀ψ_m + Vψ_{m−1} − Σ_{k=0}^{m} E_k ψ_{m−k}‖ small.
            let mut lhs = p.h0() * &r.vectors[m] + p.v() * &r.vectors[m - 1];
            for k in 0..=m {
                lhs -= &r.vectors[m - k] * Complex64::new(r.energies[k], 0.0);
            }
            assert!(lhs.norm() <= 1e-10 * scale, "m = {m}: residual {}", lhs.norm());
            // P̄₀ ψ_m = ψ_m.
            let proj = p.excited_projection() * &r.vectors[m];
            assert!((proj - &r.vectors[m]).norm() < 1e-12);
        }
        assert!(r.imag_residue < 1e-12);
    }

    #[test]
    fn methods_agree_on_seeded_ensemble() {
        for seed in 0..25u64 {
            let dim = 2 + (seed % 7) as usize;
            let p = seeded_problem(dim, 1000 + seed, 1.0).unwrap();
            let a = rs_coefficients(&p, 5).unwrap();
            let b = feshbach_coefficients(&p, 5).unwrap();
            for k in 0..=5 {
                let scale = a.energies[k].abs().max(1.0);
                assert!(
                    (a.energies[k] - b.energies[k]).abs() <= 1e-10 * scale,
                    "seed {seed} k {k}: {} vs {}",
                    a.energies[k],
                    b.energies[k]
                );
            }
            // Vector corrections agree as well.
            for m in 1..a.vectors.len().min(b.vectors.len()) {
                let d = (&a.vectors[m] - &b.vectors[m]).norm();
                assert!(d < 1e-9 * a.vectors[m].norm().max(1.0), "seed {seed} m {m}: {d}");
            }
        }
    }

    #[test]
    fn gauge_shift_moves_only_first_order() {
        let p = seeded_problem(5, 7, 1.0).unwrap();
        let c = 0.37;
        let shifted = FiniteProblem::new(
            p.h0().clone(),
            p.v() + CMat::identity(5, 5).scale(c),
        )
        .unwrap();
        let a = rs_coefficients(&p, 5).unwrap();
        let b = rs_coefficients(&shifted, 5).unwrap();
        assert!((b.energies[1] - a.energies[1] - c).abs() < 1e-10);
        for k in 2..=5 {
            assert!((b.energies[k] - a.energies[k]).abs() < 1e-10 * a.energies[k].abs().max(1.0));
        }
        for m in 1..=5 {
            assert!((&b.vectors[m] - &a.vectors[m]).norm() < 1e-10 * a.vectors[m].norm().max(1.0));
        }
    }

    #[test]
    fn residual_table_slope_matches_two_level() {
        let p = two_level_finite();
        let r = rs_coefficients(&p, 2).unwrap();
        let lambdas: Vec<f64> = (0..9).map(|k| 0.1 * 0.5_f64.powi(k)).collect();
        let table = asymptotic_residuals(&p, &r.energies, &lambdas).unwrap();
        let slope = table.fitted_slope.unwrap();
        assert!((3.8..=4.2).contains(&slope), "slope {slope}");
        for row in &table.rows {
            assert!(!row.normalization_suspect);
            assert!(row.scaled_remainder.is_finite());
        }
    }

    #[test]
    fn residual_table_handles_zero_lambda_row() {
        let p = two_level_finite();
        let r = rs_coefficients(&p, 2).unwrap();
        let table = asymptotic_residuals(&p, &r.energies, &[0.1, 0.0]).unwrap();
        let last = table.rows.last().unwrap();
        assert_eq!(last.scaled_remainder, 0.0);
        assert!((last.energy - last.partial_sum).abs() < 1e-14);
    }

    #[test]
    fn polynomial_fit_recovers_two_level_series() {
        let p = two_level_finite();
        let fit = polynomial_fit_coefficients(&p, 4).unwrap();
        let expected = [0.0, 0.0, -1.0, 0.0, 1.0];
        for (k, &e) in expected.iter().enumerate() {
            assert!(
                (fit[k] - e).abs() < 1e-6,
                "k = {k}: fit {} expected {e}",
                fit[k]
            );
        }
    }

    #[test]
    fn order_must_be_positive() {
        let p = two_level_finite();
        assert!(rs_coefficients(&p, 0).is_err());
        assert!(feshbach_coefficients(&p, 0).is_err());
    }
}
