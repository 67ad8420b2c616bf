//! Atomic systems, radial couplings and propagators.
//!
//! The Hamiltonian family under study is `H(λ) = H_at ⊗ 1 + 1 ⊗ H_f + λ V`
//! with a finite Hermitian `H_at` whose lowest eigenvalue is simple and
//! isolated, a radiation field `H_f`, and an interaction built from a
//! matrix-valued coupling `G(k) = Σ_j f_j(|k|) B_j` that depends on momentum
//! only through its modulus.  Because of that radial structure every field
//! integral collapses to one radial variable per contracted pair, with weight
//! `4π s²`; this module provides the atomic spectral data, the coupling
//! profiles, the (regularized) propagators and the admissibility checks that
//! the expansion engines build on.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMat, CVec};
use crate::quadrature::{pairwise_sum, QuadratureConfig, RadialMap};

/// `4π`, the angular volume absorbed into radial integrals.
pub const FOUR_PI: f64 = 4.0 * std::f64::consts::PI;

/// Default isolation threshold for the atomic ground state, in model energy
/// units.
pub const DEFAULT_GAP_MIN: f64 = 1e-6;

/// A radial scalar profile `f(s) = c · s^α · e^{−s/Λ}`.
///
/// The family is closed under the operations used in tests (products have
/// closed-form Gamma integrals) and is infrared-admissible exactly when
/// `α > −1/2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialProfile {
    /// Overall amplitude `c`.
    pub amplitude: f64,
    /// Infrared exponent `α`.
    pub power: f64,
    /// Decay scale `Λ` of the exponential ultraviolet falloff.
    pub cutoff: f64,
}

impl RadialProfile {
    pub fn new(amplitude: f64, power: f64, cutoff: f64) -> Self {
        Self { amplitude, power, cutoff }
    }

    /// `e^{−s}` profile with unit amplitude.
    pub fn exponential() -> Self {
        Self { amplitude: 1.0, power: 0.0, cutoff: 1.0 }
    }

    pub fn eval(&self, s: f64) -> f64 {
        debug_assert!(s > 0.0, "profiles are evaluated at positive radii");
        let p = if self.power == 0.0 { 1.0 } else { s.powf(self.power) };
        self.amplitude * p * (-s / self.cutoff).exp()
    }

    /// Parameter-range problems, if any.
    fn parameter_issue(&self) -> Option<String> {
        if !self.amplitude.is_finite() {
            return Some(format!("amplitude {} is not finite", self.amplitude));
        }
        if !(self.cutoff.is_finite() && self.cutoff > 0.0) {
            return Some(format!("cutoff scale {} must be positive", self.cutoff));
        }
        if !self.power.is_finite() {
            return Some(format!("power {} is not finite", self.power));
        }
        None
    }
}

/// One coupling term `f_j(|k|) · B_j`.
#[derive(Debug, Clone)]
pub struct CouplingTerm {
    pub profile: RadialProfile,
    pub operator: CMat,
}

/// Radial matrix-valued coupling `G(s) = Σ_j f_j(s) B_j` with an optional
/// hard ultraviolet truncation.
#[derive(Debug, Clone)]
pub struct RadialCoupling {
    pub terms: Vec<CouplingTerm>,
    /// If set, `G(s) = 0` for `s > uv_cutoff`.
    pub uv_cutoff: Option<f64>,
}

impl RadialCoupling {
    pub fn new(terms: Vec<CouplingTerm>) -> Self {
        Self { terms, uv_cutoff: None }
    }

    /// Single-term coupling `f(s) · B`.
    pub fn single(profile: RadialProfile, operator: CMat) -> Self {
        Self::new(vec![CouplingTerm { profile, operator }])
    }

    pub fn dimension(&self) -> usize {
        self.terms.first().map_or(0, |t| t.operator.nrows())
    }

    /// `G(s)`: the matrix entering the annihilation slot of the interaction.
    pub fn g(&self, s: f64) -> CMat {
        let d = self.dimension();
        let mut out = CMat::zeros(d, d);
        if let Some(cut) = self.uv_cutoff {
            if s > cut {
                return out;
            }
        }
        for t in &self.terms {
            out += t.operator.scale(t.profile.eval(s));
        }
        out
    }

    /// `G*(s)`: the adjoint slot (profiles are real, so this is the matrix
    /// adjoint of `g(s)`).
    pub fn g_star(&self, s: f64) -> CMat {
        self.g(s).adjoint()
    }

    /// Squared operator norm `‖G(s)‖²` (largest singular value squared).
    pub fn norm_sq(&self, s: f64) -> f64 {
        let g = self.g(s);
        let gram = g.adjoint() * &g;
        linalg::hermitian_eigen(&gram)
            .map(|(vals, _)| vals.last().copied().unwrap_or(0.0).max(0.0))
            .unwrap_or(f64::NAN)
    }

    /// `‖G(s)‖² / s^{2 α_min}` evaluated without cancellation: the smallest
    /// radial exponent is factored out of every term, so the result is finite
    /// and continuous down to `s = 0`.  Used by integrals that absorb the
    /// `s^{2 α_min}` weight analytically.
    pub fn reduced_norm_sq(&self, s: f64) -> f64 {
        let d = self.dimension();
        let alpha_min = self.min_power();
        if !alpha_min.is_finite() {
            return 0.0;
        }
        if let Some(cut) = self.uv_cutoff {
            if s > cut {
                return 0.0;
            }
        }
        let mut g = CMat::zeros(d, d);
        for t in &self.terms {
            let rel = t.profile.power - alpha_min;
            // 0^0 = 1 makes the dominant term survive at s = 0.
            let p = if rel == 0.0 { 1.0 } else { s.powf(rel) };
            g += t
                .operator
                .scale(t.profile.amplitude * p * (-s / t.profile.cutoff).exp());
        }
        let gram = g.adjoint() * &g;
        linalg::hermitian_eigen(&gram)
            .map(|(vals, _)| vals.last().copied().unwrap_or(0.0).max(0.0))
            .unwrap_or(f64::NAN)
    }

    /// Smallest infrared exponent over the terms; governs admissibility.
    pub fn min_power(&self) -> f64 {
        self.terms
            .iter()
            .filter(|t| t.profile.amplitude != 0.0 && t.operator.iter().any(|z| z.norm() > 0.0))
            .map(|t| t.profile.power)
            .fold(f64::INFINITY, f64::min)
    }

    /// Largest decay scale over the terms; the natural radial quadrature scale.
    pub fn radial_scale(&self) -> f64 {
        let s = self
            .terms
            .iter()
            .map(|t| t.profile.cutoff)
            .fold(0.0f64, f64::max);
        if s > 0.0 {
            s
        } else {
            1.0
        }
    }

    fn parameter_issues(&self) -> Vec<String> {
        let mut issues = Vec::new();
        if self.terms.is_empty() {
            issues.push("coupling has no terms".into());
        }
        let d = self.dimension();
        for (j, t) in self.terms.iter().enumerate() {
            if let Some(msg) = t.profile.parameter_issue() {
                issues.push(format!("term {j}: {msg}"));
            }
            if t.operator.nrows() != d || t.operator.ncols() != d {
                issues.push(format!(
                    "term {j}: operator is {}x{}, expected {d}x{d}",
                    t.operator.nrows(),
                    t.operator.ncols()
                ));
            }
        }
        if let Some(cut) = self.uv_cutoff {
            if !(cut.is_finite() && cut > 0.0) {
                issues.push(format!("uv_cutoff {cut} must be positive"));
            }
        }
        issues
    }
}

/// Spectral data of the atomic Hamiltonian.
#[derive(Debug, Clone)]
pub struct AtomicModel {
    h_at: CMat,
    eigenvalues: Vec<f64>,
    eigenvectors: CMat,
    e_at: f64,
    phi_at: CVec,
    p_at: CMat,
    gap: Option<f64>,
}

impl AtomicModel {
    /// Builds the spectral data, requiring a Hermitian matrix with a simple
    /// ground state isolated by at least `gap_min`.
    pub fn with_gap_min(h_at: CMat, gap_min: f64) -> Result<Self> {
        linalg::require_hermitian(&h_at, 1e-12, "atomic Hamiltonian")?;
        let (eigenvalues, mut eigenvectors) = linalg::hermitian_eigen(&h_at)?;
        let e_at = eigenvalues[0];
        let gap = if eigenvalues.len() > 1 {
            let g = eigenvalues[1] - e_at;
            if g < gap_min {
                return Err(Error::InvalidModel(format!(
                    "ground state not isolated: lowest eigenvalues {e_at} and {} differ by {g:.3e} < gap_min {gap_min:.3e}",
                    eigenvalues[1]
                )));
            }
            Some(g)
        } else {
            None
        };
        let phi_at = linalg::fix_phase(&eigenvectors.column(0).into_owned());
        eigenvectors.set_column(0, &phi_at);
        let p_at = &phi_at * phi_at.adjoint();
        Ok(Self { h_at, eigenvalues, eigenvectors, e_at, phi_at, p_at, gap })
    }

    pub fn new(h_at: CMat) -> Result<Self> {
        Self::with_gap_min(h_at, DEFAULT_GAP_MIN)
    }

    pub fn dimension(&self) -> usize {
        self.h_at.nrows()
    }

    pub fn hamiltonian(&self) -> &CMat {
        &self.h_at
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Lowest eigenvalue `E_at`.
    pub fn ground_energy(&self) -> f64 {
        self.e_at
    }

    /// Unit ground eigenvector `φ_at` (phase-fixed).
    pub fn ground_state(&self) -> &CVec {
        &self.phi_at
    }

    /// Rank-one projection onto the ground state.
    pub fn ground_projection(&self) -> &CMat {
        &self.p_at
    }

    /// Distance from the ground eigenvalue to the rest of the spectrum;
    /// `None` for one-dimensional systems (no excited spectrum).
    pub fn gap(&self) -> Option<f64> {
        self.gap
    }

    /// `⟨φ_at, A φ_at⟩`.
    pub fn ground_expectation(&self, a: &CMat) -> Complex64 {
        (self.phi_at.adjoint() * a * &self.phi_at)[(0, 0)]
    }
}

/// Energy shift and regularization at which a propagator is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PropagatorQuery {
    /// Field-energy shift `r ≥ 0`.
    pub r: f64,
    /// Regularization `η ≥ 0`.
    pub eta: f64,
}

impl PropagatorQuery {
    pub fn new(r: f64, eta: f64) -> Self {
        Self { r, eta }
    }

    fn check_signs(&self) -> Result<()> {
        if self.r < 0.0 || self.eta < 0.0 || !self.r.is_finite() || !self.eta.is_finite() {
            return Err(Error::Domain(format!(
                "propagator arguments must be finite and non-negative, got r = {}, eta = {}",
                self.r, self.eta
            )));
        }
        Ok(())
    }
}

/// The full model: atomic data plus radial coupling.
#[derive(Debug, Clone)]
pub struct SpinBosonModel {
    pub atom: AtomicModel,
    pub coupling: RadialCoupling,
}

impl SpinBosonModel {
    pub fn new(atom: AtomicModel, coupling: RadialCoupling) -> Result<Self> {
        let issues = coupling.parameter_issues();
        if !issues.is_empty() {
            return Err(Error::InvalidModel(issues.join("; ")));
        }
        if coupling.dimension() != atom.dimension() {
            return Err(Error::InvalidModel(format!(
                "coupling acts on dimension {}, atom has dimension {}",
                coupling.dimension(),
                atom.dimension()
            )));
        }
        if coupling.min_power() <= -0.5 {
            return Err(Error::InvalidModel(format!(
                "infrared-inadmissible coupling: smallest radial exponent {} is not > -1/2",
                coupling.min_power()
            )));
        }
        Ok(Self { atom, coupling })
    }

    /// Natural radial quadrature scale of the coupling.
    pub fn radial_scale(&self) -> f64 {
        self.coupling.radial_scale()
    }

    pub fn dimension(&self) -> usize {
        self.atom.dimension()
    }

    /// Regularized resolvent
    /// `R(r, η) = (1 − P_at·[r = 0]) (E_at − H_at − r − η)^{-1}`.
    ///
    /// At `r = 0` the ground component is removed exactly; the evaluation
    /// point `(0, 0)` is outside the domain because the inverse is unbounded
    /// on `φ_at` there.
    pub fn resolvent(&self, q: PropagatorQuery) -> Result<CMat> {
        self.resolvent_pow(q, 1)
    }

    /// `R(r, η)^power`, assembled in the atomic eigenbasis.
    pub fn resolvent_pow(&self, q: PropagatorQuery, power: u32) -> Result<CMat> {
        q.check_signs()?;
        if q.r == 0.0 && q.eta == 0.0 {
            return Err(Error::Domain(
                "full resolvent is undefined at r = 0, eta = 0 (unbounded inverse on the ground state)"
                    .into(),
            ));
        }
        Ok(self.assemble_propagator(q, power, q.r > 0.0, true))
    }

    /// `R⊥ = (1 − P_at) R`: the part orthogonal to the ground state.
    /// Defined for all `r, η ≥ 0`, including `(0, 0)`.
    pub fn resolvent_perp(&self, q: PropagatorQuery) -> Result<CMat> {
        self.resolvent_perp_pow(q, 1)
    }

    pub fn resolvent_perp_pow(&self, q: PropagatorQuery, power: u32) -> Result<CMat> {
        q.check_signs()?;
        Ok(self.assemble_propagator(q, power, false, true))
    }

    /// `R∥ = P_at R`: `−P_at/(r + η)` for `r > 0` and the zero matrix at
    /// `r = 0` with `η > 0`; undefined at `(0, 0)`.
    pub fn resolvent_par(&self, q: PropagatorQuery) -> Result<CMat> {
        self.resolvent_par_pow(q, 1)
    }

    pub fn resolvent_par_pow(&self, q: PropagatorQuery, power: u32) -> Result<CMat> {
        q.check_signs()?;
        if q.r == 0.0 && q.eta == 0.0 {
            return Err(Error::Domain(
                "parallel resolvent is undefined at r = 0, eta = 0".into(),
            ));
        }
        Ok(self.assemble_propagator(q, power, q.r > 0.0, false))
    }

    /// Shared assembly: `Σ_k c_k^power |v_k⟩⟨v_k|` over the selected spectral
    /// components, with `c_k = 1/(E_at − ε_k − r − η)`.
    fn assemble_propagator(
        &self,
        q: PropagatorQuery,
        power: u32,
        include_ground: bool,
        include_excited: bool,
    ) -> CMat {
        let d = self.atom.dimension();
        let mut out = CMat::zeros(d, d);
        for (k, &eps) in self.atom.eigenvalues.iter().enumerate() {
            let is_ground = k == 0;
            if (is_ground && !include_ground) || (!is_ground && !include_excited) {
                continue;
            }
            let denom = self.atom.e_at - eps - q.r - q.eta;
            let c = (1.0 / denom).powi(power as i32);
            let v = self.atom.eigenvectors.column(k);
            out += (v * v.adjoint()).scale(c);
        }
        out
    }
}

/// Outcome of one admissibility check.
#[derive(Debug, Clone, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    /// Human-readable account of what was measured.
    pub detail: String,
    /// Principal measured quantity, when one exists.
    pub value: Option<f64>,
}

impl CheckOutcome {
    fn pass(name: &str, detail: String, value: Option<f64>) -> Self {
        Self { name: name.into(), passed: true, detail, value }
    }
    fn fail(name: &str, detail: String, value: Option<f64>) -> Self {
        Self { name: name.into(), passed: false, detail, value }
    }
}

/// Full admissibility report for a candidate model.
#[derive(Debug, Clone, Serialize)]
pub struct AdmissibilityReport {
    pub checks: Vec<CheckOutcome>,
}

impl AdmissibilityReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&CheckOutcome> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Options for [`validate_model`].
#[derive(Debug, Clone, Copy)]
pub struct ValidationOptions {
    /// Minimal admissible distance between the two lowest atomic eigenvalues.
    pub gap_min: f64,
    /// Node count used for the numeric infrared integral.
    pub quadrature_nodes: usize,
}

impl Default for ValidationOptions {
    fn default() -> Self {
        Self { gap_min: DEFAULT_GAP_MIN, quadrature_nodes: 64 }
    }
}

/// Validates a candidate atomic Hamiltonian and coupling, measuring each
/// admissibility condition: hermiticity, simple isolated ground state,
/// parameter ranges, and the infrared integral
/// `∫ s² ‖G(s)‖² (1 + s^{-2}) ds < ∞`.
///
/// The report is always produced in full; the caller decides what to do with
/// failures.
pub fn validate_model(
    h_at: &CMat,
    coupling: &RadialCoupling,
    opts: &ValidationOptions,
) -> AdmissibilityReport {
    let mut checks = Vec::new();

    // Hermiticity, with the measured defect.
    let defect = linalg::hermiticity_defect(h_at);
    let scale = h_at.iter().map(|z| z.norm()).fold(1.0f64, f64::max);
    if h_at.nrows() != h_at.ncols() {
        checks.push(CheckOutcome::fail(
            "hermiticity",
            format!("matrix is {}x{}, not square", h_at.nrows(), h_at.ncols()),
            None,
        ));
    } else if defect > 1e-12 * scale {
        checks.push(CheckOutcome::fail(
            "hermiticity",
            format!("max |H - H^H| entry = {defect:.6e} exceeds tolerance {:.1e}", 1e-12 * scale),
            Some(defect),
        ));
    } else {
        checks.push(CheckOutcome::pass(
            "hermiticity",
            format!("max |H - H^H| entry = {defect:.6e}"),
            Some(defect),
        ));
    }

    // Simple isolated ground state, naming both eigenvalues on failure.
    let ground = if checks[0].passed {
        match linalg::hermitian_eigen(h_at) {
            Ok((vals, _)) => {
                if vals.len() == 1 {
                    CheckOutcome::pass(
                        "ground-state isolation",
                        format!("one-dimensional atom, ground energy {}", vals[0]),
                        None,
                    )
                } else {
                    let gap = vals[1] - vals[0];
                    if gap < opts.gap_min {
                        CheckOutcome::fail(
                            "ground-state isolation",
                            format!(
                                "ground state not simple/isolated: lowest eigenvalues {} and {} differ by {gap:.6e} < gap_min {:.1e}",
                                vals[0], vals[1], opts.gap_min
                            ),
                            Some(gap),
                        )
                    } else {
                        CheckOutcome::pass(
                            "ground-state isolation",
                            format!("gap = {gap:.6e} between eigenvalues {} and {}", vals[0], vals[1]),
                            Some(gap),
                        )
                    }
                }
            }
            Err(e) => CheckOutcome::fail("ground-state isolation", format!("eigensolver failed: {e}"), None),
        }
    } else {
        CheckOutcome::fail(
            "ground-state isolation",
            "skipped: matrix is not Hermitian".into(),
            None,
        )
    };
    checks.push(ground);

    // Parameter ranges, including the infrared exponent bound α > −1/2.
    let mut issues = coupling.parameter_issues();
    if coupling.dimension() != h_at.nrows() {
        issues.push(format!(
            "coupling dimension {} does not match atom dimension {}",
            coupling.dimension(),
            h_at.nrows()
        ));
    }
    for (j, t) in coupling.terms.iter().enumerate() {
        if t.profile.power <= -0.5 {
            issues.push(format!(
                "term {j}: radial exponent {} is not > -1/2",
                t.profile.power
            ));
        }
    }
    checks.push(if issues.is_empty() {
        CheckOutcome::pass(
            "parameter ranges",
            format!(
                "{} coupling term(s); smallest radial exponent {:.3}",
                coupling.terms.len(),
                coupling.min_power()
            ),
            Some(coupling.min_power()),
        )
    } else {
        CheckOutcome::fail("parameter ranges", issues.join("; "), None)
    });

    // Infrared integral, computed numerically.  For admissible exponents the
    // near-origin singularity is absorbed by a power substitution so the
    // value is a genuine measurement; otherwise a plain refinement exposes
    // the divergence in its trace.
    checks.push(infrared_check(coupling, opts.quadrature_nodes));

    AdmissibilityReport { checks }
}

/// `∫_0^∞ s^μ ψ(s) ds` for `μ > −1` and `ψ` smooth, bounded near the origin
/// and exponentially decaying.  The integral is split at `lam`; on `[0, lam]`
/// the substitution `s = lam·x^κ` with the **integer** `κ = ⌈2/(μ+1)⌉` turns
/// the weight into `x^{κ(μ+1)−1}` with exponent ≥ 1, so the transformed
/// integrand is bounded and at worst mildly kinked; the tail uses a shifted
/// rational map.  The weight factor is assembled in the transformed variable,
/// so the singular power `s^μ` itself is never evaluated near zero.
fn weighted_radial_integral<F: Fn(f64) -> f64>(mu: f64, lam: f64, n: usize, psi: F) -> f64 {
    let kappa = (2.0 / (mu + 1.0)).ceil().max(1.0);
    let (t, w) = crate::quadrature::gauss_legendre(n);
    let near: Vec<f64> = t
        .iter()
        .zip(&w)
        .map(|(&ti, &wi)| {
            let x = 0.5 * (1.0 + ti);
            let s = lam * x.powf(kappa);
            wi * 0.5 * kappa * lam.powf(mu + 1.0) * x.powf(kappa * (mu + 1.0) - 1.0) * psi(s)
        })
        .collect();
    let far: Vec<f64> = t
        .iter()
        .zip(&w)
        .map(|(&ti, &wi)| {
            let s = lam + lam * (1.0 + ti) / (1.0 - ti);
            wi * 2.0 * lam / ((1.0 - ti) * (1.0 - ti)) * s.powf(mu) * psi(s)
        })
        .collect();
    pairwise_sum(&near) + pairwise_sum(&far)
}

/// Exhibits a divergent radial integral by refining a plain rational-map rule
/// and returning the growing trace.
fn divergence_trace<F: Fn(f64) -> f64 + Sync>(coupling: &RadialCoupling, nodes: usize, integrand: F) -> Vec<f64> {
    let mut trace = Vec::new();
    let mut n = nodes.max(8);
    for _ in 0..5 {
        let cfg = QuadratureConfig {
            nodes_per_dim: n,
            map: RadialMap::Rational { scale: coupling.radial_scale() },
        };
        trace.push(cfg.rule().integrate(&integrand));
        n *= 2;
    }
    trace
}

/// Numeric infrared check: measures `∫ s²‖G(s)‖²(1 + s⁻²) ds` with the
/// `s^{2α_min}` origin weight absorbed analytically, refining until two node
/// counts agree.  For inadmissible exponents the divergence is exhibited with
/// a plain refinement trace instead.
fn infrared_check(coupling: &RadialCoupling, nodes: usize) -> CheckOutcome {
    let name = "infrared integral";
    if coupling.terms.is_empty() {
        return CheckOutcome::fail(name, "no coupling terms".into(), None);
    }
    let alpha = coupling.min_power();
    if !alpha.is_finite() {
        return CheckOutcome::pass(name, "coupling vanishes identically; integral = 0".into(), Some(0.0));
    }
    if !(alpha > -0.5) {
        let trace = divergence_trace(coupling, nodes, |s| {
            coupling.norm_sq(s) * (s * s + 1.0)
        });
        return CheckOutcome::fail(
            name,
            format!(
                "diverges at the origin (integrand ~ s^{:.2}); refinement trace grows: {trace:?}",
                2.0 * alpha
            ),
            trace.last().copied(),
        );
    }
    let lam = coupling.radial_scale();
    let psi = |s: f64| coupling.reduced_norm_sq(s) * (s * s + 1.0);
    let mut trace = Vec::new();
    let mut n = nodes.max(8);
    let mut prev: Option<f64> = None;
    for _ in 0..6 {
        let v = weighted_radial_integral(2.0 * alpha, lam, n, psi);
        trace.push(v);
        if let Some(p) = prev {
            if (v - p).abs() <= 1e-8 * v.abs().max(p.abs()).max(1e-300) {
                return CheckOutcome::pass(
                    name,
                    format!("∫ s²‖G(s)‖²(1 + s⁻²) ds = {v:.9e} (stable under refinement)"),
                    Some(v),
                );
            }
        }
        prev = Some(v);
        n *= 2;
    }
    CheckOutcome::fail(
        name,
        format!("did not stabilize under refinement: trace {trace:?}"),
        trace.last().copied(),
    )
}

/// The constant `C_p = (4π ∫ s² (s^{-1} + 1)^{p+1} ‖G(s)‖² ds)^{1/2}` used in
/// diagnostic bounds.  Reports divergence (with the refinement trace) when
/// the infrared side does not converge for the requested `p`.
pub fn coupling_constant_cp(coupling: &RadialCoupling, p: u32, nodes: usize) -> Result<f64> {
    let alpha = coupling.min_power();
    if !alpha.is_finite() {
        return Ok(0.0);
    }
    // Near the origin the integrand behaves like s^{2α + 1 - p}; the integral
    // converges iff 2α + 1 - p > -1.
    let mu = 2.0 * alpha + 1.0 - p as f64;
    if mu <= -1.0 {
        let trace = divergence_trace(coupling, nodes, |s| {
            s * s * (1.0 / s + 1.0).powi(p as i32 + 1) * coupling.norm_sq(s) * FOUR_PI
        });
        return Err(Error::QuadratureDivergence {
            context: format!("C_{p}: integrand ~ s^{mu:.2} at the origin diverges"),
            trace,
        });
    }
    let lam = coupling.radial_scale();
    let psi = |s: f64| FOUR_PI * (1.0 + s).powi(p as i32 + 1) * coupling.reduced_norm_sq(s);
    let mut trace = Vec::new();
    let mut n = nodes.max(8);
    let mut prev: Option<f64> = None;
    for _ in 0..6 {
        let v = weighted_radial_integral(mu, lam, n, psi);
        trace.push(v);
        if let Some(pv) = prev {
            if (v - pv).abs() <= 1e-9 * v.abs().max(pv.abs()).max(1e-300) {
                return Ok(v.max(0.0).sqrt());
            }
        }
        prev = Some(v);
        n *= 2;
    }
    Err(Error::QuadratureDivergence { context: format!("C_{p} refinement"), trace })
}

/// Two-level atom `diag(0, 1)` coupled through `σ_x` with profile `e^{−s}`.
pub fn two_level_exp() -> SpinBosonModel {
    let h = CMat::from_row_slice(
        2,
        2,
        &[
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 0.0),
        ],
    );
    let b = CMat::from_row_slice(
        2,
        2,
        &[
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 0.0),
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.0),
        ],
    );
    let atom = AtomicModel::new(h).expect("two-level atom is admissible");
    SpinBosonModel::new(atom, RadialCoupling::single(RadialProfile::exponential(), b))
        .expect("two-level coupling is admissible")
}

/// One-dimensional atom (`H_at = 0`) with scalar coupling `e^{−s}`; exactly
/// solvable, so higher expansion coefficients vanish identically.
pub fn scalar_exp() -> SpinBosonModel {
    let h = CMat::zeros(1, 1);
    let b = CMat::identity(1, 1);
    let atom = AtomicModel::new(h).expect("scalar atom is admissible");
    SpinBosonModel::new(atom, RadialCoupling::single(RadialProfile::exponential(), b))
        .expect("scalar coupling is admissible")
}
