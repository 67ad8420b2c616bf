//! Radial quadrature on `(0, ∞)` and deterministic summation.
//!
//! All field integrals in this crate reduce to radial integrals
//! `∫_0^∞ h(s) ds` of smooth, exponentially decaying integrands (one radial
//! variable per contracted pair).  They are evaluated with Gauss–Legendre
//! rules transplanted to the half line by the rational map
//! `s = Λ (1 + t) / (1 - t)`, which needs no truncation and converges
//! spectrally for the coupling profiles used here.
//!
//! Sums over quadrature grids are reduced **deterministically**: terms are
//! produced in lexicographic grid order (optionally in parallel) and combined
//! by sequential pairwise summation, so results are bit-identical regardless
//! of the number of worker threads.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::CMat;

/// Gauss–Legendre nodes and weights on `[-1, 1]`, computed by Newton
/// iteration on the Legendre recurrence.  Exact to machine precision for
/// polynomials of degree `2n - 1`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "need at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Tricomi initial guess for the i-th root (descending order).
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // Legendre recurrence: p0 = 1, p1 = x.
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = (n as f64) * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

/// How `[-1, 1]` nodes are transplanted to the radial half line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum RadialMap {
    /// `s = scale (1 + t) / (1 - t)`; covers all of `(0, ∞)`.
    Rational { scale: f64 },
    /// Plain affine map to `[0, s_max]`; discards the tail beyond `s_max`.
    Truncated { s_max: f64 },
}

/// Configuration for radial quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    /// Gauss–Legendre nodes per radial dimension (at least 8).
    pub nodes_per_dim: usize,
    /// Transplantation of the reference interval to `(0, ∞)`.
    pub map: RadialMap,
}

impl QuadratureConfig {
    pub fn new(nodes_per_dim: usize, map: RadialMap) -> Result<Self> {
        if nodes_per_dim < 8 {
            return Err(Error::Config(format!(
                "nodes_per_dim = {nodes_per_dim}; at least 8 nodes are required"
            )));
        }
        match map {
            RadialMap::Rational { scale } if !(scale.is_finite() && scale > 0.0) => {
                return Err(Error::Config(format!("rational map scale {scale} must be positive")))
            }
            RadialMap::Truncated { s_max } if !(s_max.is_finite() && s_max > 0.0) => {
                return Err(Error::Config(format!("truncation radius {s_max} must be positive")))
            }
            _ => {}
        }
        Ok(Self { nodes_per_dim, map })
    }

    /// Default rule: 64 nodes, rational map at the given radial scale.
    pub fn default_with_scale(scale: f64) -> Self {
        Self { nodes_per_dim: 64, map: RadialMap::Rational { scale } }
    }

    pub fn rule(&self) -> RadialRule {
        RadialRule::new(self)
    }

    /// Same configuration with a different node count.
    pub fn with_nodes(&self, nodes_per_dim: usize) -> Self {
        Self { nodes_per_dim, map: self.map }
    }
}

/// A concrete radial rule: `∫_0^∞ h(s) ds ≈ Σ_i w_i h(s_i)`.
#[derive(Debug, Clone)]
pub struct RadialRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl RadialRule {
    pub fn new(config: &QuadratureConfig) -> Self {
        let (t, w) = gauss_legendre(config.nodes_per_dim);
        let mut nodes = Vec::with_capacity(t.len());
        let mut weights = Vec::with_capacity(t.len());
        match config.map {
            RadialMap::Rational { scale } => {
                for (&ti, &wi) in t.iter().zip(&w) {
                    nodes.push(scale * (1.0 + ti) / (1.0 - ti));
                    weights.push(wi * 2.0 * scale / ((1.0 - ti) * (1.0 - ti)));
                }
            }
            RadialMap::Truncated { s_max } => {
                for (&ti, &wi) in t.iter().zip(&w) {
                    nodes.push(0.5 * s_max * (1.0 + ti));
                    weights.push(wi * 0.5 * s_max);
                }
            }
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Deterministic scalar integral of `h`.
    pub fn integrate<F: Fn(f64) -> f64 + Sync>(&self, h: F) -> f64 {
        let terms: Vec<f64> = self
            .nodes
            .iter()
            .zip(&self.weights)
            .map(|(&s, &w)| w * h(s))
            .collect();
        pairwise_sum(&terms)
    }
}

/// Sequential pairwise summation: deterministic and accurate to
/// `O(log n)` rounding steps.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    match xs.len() {
        0 => 0.0,
        1 => xs[0],
        2 => xs[0] + xs[1],
        n => {
            let (a, b) = xs.split_at(n / 2);
            pairwise_sum(a) + pairwise_sum(b)
        }
    }
}

/// Pairwise summation of matrices; zero matrix of the given dimension for an
/// empty slice.
pub fn pairwise_sum_mat(xs: &[CMat], dim: usize) -> CMat {
    match xs.len() {
        0 => CMat::zeros(dim, dim),
        1 => xs[0].clone(),
        n => {
            let (a, b) = xs.split_at(n / 2);
            pairwise_sum_mat(a, dim) + pairwise_sum_mat(b, dim)
        }
    }
}

/// Evaluates `term(i)` for `i` in `0..n` (in parallel when a rayon pool is
/// active), then reduces in index order by pairwise summation.  The result is
/// bit-identical for any worker count because rayon's indexed `collect`
/// preserves order and the reduction itself is sequential.
pub fn sum_indexed_mat<F>(n: usize, dim: usize, term: F) -> CMat
where
    F: Fn(usize) -> CMat + Sync + Send,
{
    if n == 0 {
        return CMat::zeros(dim, dim);
    }
    let terms: Vec<CMat> = (0..n).into_par_iter().map(term).collect();
    pairwise_sum_mat(&terms, dim)
}

/// Scalar variant of [`sum_indexed_mat`].
pub fn sum_indexed<F>(n: usize, term: F) -> f64
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    let terms: Vec<f64> = (0..n).into_par_iter().map(term).collect();
    pairwise_sum(&terms)
}

/// Fallible variant of [`sum_indexed_mat`]: evaluates every term, returns the
/// error of the smallest failing index (deterministic), otherwise the pairwise
/// sum in index order.
pub fn try_sum_indexed_mat<F>(n: usize, dim: usize, term: F) -> Result<CMat>
where
    F: Fn(usize) -> Result<CMat> + Sync + Send,
{
    if n == 0 {
        return Ok(CMat::zeros(dim, dim));
    }
    let terms: Vec<Result<CMat>> = (0..n).into_par_iter().map(term).collect();
    let mut values = Vec::with_capacity(n);
    for t in terms {
        values.push(t?);
    }
    Ok(pairwise_sum_mat(&values, dim))
}

/// Refines a quantity over doubling node counts until two successive levels
/// agree to `rel_tol` (relative to the final scale), returning the refined
/// value and the full refinement trace.  Errors with the trace attached when
/// the sequence fails to stabilize.
pub fn refine_scalar<F>(
    config: &QuadratureConfig,
    levels: usize,
    rel_tol: f64,
    context: &str,
    eval: F,
) -> Result<(f64, Vec<f64>)>
where
    F: Fn(&QuadratureConfig) -> f64,
{
    let mut trace = Vec::with_capacity(levels);
    let mut nodes = config.nodes_per_dim;
    let mut prev: Option<f64> = None;
    for _ in 0..levels {
        let value = eval(&config.with_nodes(nodes));
        trace.push(value);
        if let Some(p) = prev {
            let scale = value.abs().max(p.abs()).max(1e-300);
            if (value - p).abs() <= rel_tol * scale {
                return Ok((value, trace));
            }
        }
        prev = Some(value);
        nodes *= 2;
    }
    Err(Error::QuadratureDivergence { context: context.to_string(), trace })
}
