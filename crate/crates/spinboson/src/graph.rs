//! Graph functions with external lines, subgraph substitution, and numerical
//! contraction against a pairing.
//!
//! A graph function assigns a matrix-valued propagator handle to every
//! nearest-neighbor edge of an integer carrier (plus two external handles at
//! the ends).  Contracting it with a pair partition collapses each pair's two
//! momentum deltas to a single radial variable, threads each edge with the sum
//! of the radial variables of the pairs spanning it, and integrates with the
//! configured radial rule.  All reductions are deterministic (lexicographic
//! node order, pairwise summation), so results are bit-identical across
//! worker counts.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_complex::Complex64;
use serde_json::json;

use crate::error::{Error, Result};
use crate::linalg::CMat;
use crate::model::{PropagatorQuery, SpinBosonModel, FOUR_PI};
use crate::pairings::{carrier_mn, carrier_n, Pair, Pairing};
use crate::quadrature::{pairwise_sum_mat, try_sum_indexed_mat, QuadratureConfig, RadialRule};

/// A matrix-valued function of one radial argument, used for handles that are
/// not expressible by the built-in variants (e.g. renormalized insertion
/// kernels).  Implementations must be pure: same argument, same matrix.
pub trait MatrixFn: Send + Sync {
    fn eval(&self, x: f64) -> Result<CMat>;
    /// Short human-readable form for symbolic traces.
    fn describe(&self) -> String;
}

/// A propagator handle: a matrix-valued function of one scalar argument
/// `x ≥ 0`, attached to a graph edge and evaluated at the accumulated photon
/// energy of that edge.
#[derive(Clone)]
pub enum PropagatorHandle {
    /// The identity matrix, independent of the argument.
    Identity,
    /// A real scalar times the identity.
    Scalar(f64),
    /// A constant matrix.
    Const(CMat),
    /// `x ↦ R(x, η)^power`, the full resolvent of the atomic problem.
    Resolvent { eta: f64, power: u32 },
    /// `x ↦ R⊥(x, η)^power`, the ground-state-orthogonal part (bounded).
    ResolventPerp { eta: f64, power: u32 },
    /// An arbitrary matrix-valued function (insertion kernels live here).
    Map(Arc<dyn MatrixFn>),
    /// Pointwise matrix product, left to right.
    Product(Vec<PropagatorHandle>),
    /// Pointwise linear combination `Σ cᵢ·Fᵢ(x)`.
    Sum(Vec<(f64, PropagatorHandle)>),
}

impl PropagatorHandle {
    /// Pointwise product of handles, flattening nested products and dropping
    /// identity factors; an empty product is the identity.
    pub fn product_of(handles: Vec<PropagatorHandle>) -> PropagatorHandle {
        let mut flat = Vec::new();
        fn push(h: PropagatorHandle, flat: &mut Vec<PropagatorHandle>) {
            match h {
                PropagatorHandle::Identity => {}
                PropagatorHandle::Product(hs) => {
                    for inner in hs {
                        push(inner, flat);
                    }
                }
                other => flat.push(other),
            }
        }
        for h in handles {
            push(h, &mut flat);
        }
        match flat.len() {
            0 => PropagatorHandle::Identity,
            1 => flat.pop().unwrap(),
            _ => PropagatorHandle::Product(flat),
        }
    }

    /// Evaluates the handle at argument `x` for the given model's atom.
    pub fn eval(&self, x: f64, model: &SpinBosonModel) -> Result<CMat> {
        let dim = model.dimension();
        match self {
            Self::Identity => Ok(CMat::identity(dim, dim)),
            Self::Scalar(c) => Ok(CMat::identity(dim, dim) * Complex64::new(*c, 0.0)),
            Self::Const(m) => Ok(m.clone()),
            Self::Resolvent { eta, power } => {
                model.resolvent_pow(PropagatorQuery::new(x, *eta), *power)
            }
            Self::ResolventPerp { eta, power } => {
                model.resolvent_perp_pow(PropagatorQuery::new(x, *eta), *power)
            }
            Self::Map(f) => f.eval(x),
            Self::Product(hs) => {
                let mut acc = CMat::identity(dim, dim);
                for h in hs {
                    acc *= h.eval(x, model)?;
                }
                Ok(acc)
            }
            Self::Sum(terms) => {
                let mut acc = CMat::zeros(dim, dim);
                for (c, h) in terms {
                    acc += h.eval(x, model)? * Complex64::new(*c, 0.0);
                }
                Ok(acc)
            }
        }
    }

    /// Short structural description for symbolic traces.
    pub fn describe(&self) -> String {
        match self {
            Self::Identity => "1".into(),
            Self::Scalar(c) => format!("{c}·1"),
            Self::Const(m) => format!("const[{}x{}]", m.nrows(), m.ncols()),
            Self::Resolvent { eta, power } => {
                if *power == 1 {
                    format!("R(eta={eta})")
                } else {
                    format!("R(eta={eta})^{power}")
                }
            }
            Self::ResolventPerp { eta, power } => {
                if *power == 1 {
                    format!("Rperp(eta={eta})")
                } else {
                    format!("Rperp(eta={eta})^{power}")
                }
            }
            Self::Map(f) => f.describe(),
            Self::Product(hs) => {
                hs.iter().map(|h| h.describe()).collect::<Vec<_>>().join("·")
            }
            Self::Sum(terms) => terms
                .iter()
                .map(|(c, h)| format!("{c}·({})", h.describe()))
                .collect::<Vec<_>>()
                .join(" + "),
        }
    }
}

impl std::fmt::Debug for PropagatorHandle {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.describe())
    }
}

/// A graph function with external lines: a carrier of interaction vertices,
/// one propagator handle per nearest-neighbor edge, and handles for the two
/// half-infinite external edges.
#[derive(Debug, Clone)]
pub struct GraphFunction {
    carrier: Vec<i64>,
    edges: BTreeMap<Pair, PropagatorHandle>,
    left_external: PropagatorHandle,
    right_external: PropagatorHandle,
}

impl GraphFunction {
    /// Builds a graph function, checking that `edges` labels exactly the
    /// nearest-neighbor pairs of the carrier.
    pub fn new(
        carrier: Vec<i64>,
        edges: BTreeMap<Pair, PropagatorHandle>,
        left_external: PropagatorHandle,
        right_external: PropagatorHandle,
    ) -> Result<Self> {
        if carrier.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config("carrier must be strictly increasing".into()));
        }
        let expected: Vec<Pair> = carrier.windows(2).map(|w| (w[0], w[1])).collect();
        let got: Vec<Pair> = edges.keys().copied().collect();
        if expected != got {
            return Err(Error::Config(format!(
                "edges must be exactly the nearest-neighbor pairs of the carrier \
                 (expected {expected:?}, got {got:?})"
            )));
        }
        Ok(Self { carrier, edges, left_external, right_external })
    }

    /// All internal edges carry the same handle; identity external lines.
    pub fn uniform(carrier: Vec<i64>, handle: PropagatorHandle) -> Result<Self> {
        let edges = carrier
            .windows(2)
            .map(|w| ((w[0], w[1]), handle.clone()))
            .collect();
        Self::new(carrier, edges, PropagatorHandle::Identity, PropagatorHandle::Identity)
    }

    /// The order-`n` energy graph: carrier `{1, …, n}`, every edge the full
    /// resolvent at regularization `eta`, identity external lines.  The
    /// energy-shift argument is supplied at contraction time.
    pub fn energy_graph(n: usize, eta: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Config("energy graph needs at least one vertex".into()));
        }
        Self::uniform(carrier_n(n), PropagatorHandle::Resolvent { eta, power: 1 })
    }

    /// The two-sided norm graph on `[m, n] ∩ Z ∖ {0}`: the `{−1, 1}` edge
    /// carries the squared resolvent, all other edges the plain resolvent.
    pub fn norm_graph(m: i64, n: i64, eta: f64) -> Result<Self> {
        if !(m <= -1 && 1 <= n) {
            return Err(Error::Config(format!(
                "norm graph needs m ≤ −1 ≤ 1 ≤ n, got m = {m}, n = {n}"
            )));
        }
        let carrier = carrier_mn(m, n);
        let edges = carrier
            .windows(2)
            .map(|w| {
                let power = if (w[0], w[1]) == (-1, 1) { 2 } else { 1 };
                ((w[0], w[1]), PropagatorHandle::Resolvent { eta, power })
            })
            .collect();
        Self::new(carrier, edges, PropagatorHandle::Identity, PropagatorHandle::Identity)
    }

    pub fn carrier(&self) -> &[i64] {
        &self.carrier
    }

    pub fn edges(&self) -> &BTreeMap<Pair, PropagatorHandle> {
        &self.edges
    }

    pub fn edge(&self, e: Pair) -> Option<&PropagatorHandle> {
        self.edges.get(&e)
    }

    pub fn left_external(&self) -> &PropagatorHandle {
        &self.left_external
    }

    pub fn right_external(&self) -> &PropagatorHandle {
        &self.right_external
    }

    /// Replaces the subgraph on the carrier interval `interval` by the kernel
    /// `k`: the interval's vertices disappear and the two edges that bounded
    /// it merge with `k` into one bridging handle (pointwise product
    /// `F_left · k · F_right`).  At a carrier end the bridge is absorbed into
    /// the external handle on that side.
    pub fn substitute(&self, interval: &[i64], k: PropagatorHandle) -> Result<Self> {
        if interval.is_empty() {
            return Err(Error::Config("substitution interval is empty".into()));
        }
        let start = self
            .carrier
            .iter()
            .position(|&x| x == interval[0])
            .ok_or_else(|| {
                Error::Config(format!("interval start {} not in carrier", interval[0]))
            })?;
        let end = start + interval.len();
        if end > self.carrier.len() || self.carrier[start..end] != *interval {
            return Err(Error::Config(format!(
                "{interval:?} is not an interval of the carrier {:?}",
                self.carrier
            )));
        }
        let left_neighbor = (start > 0).then(|| self.carrier[start - 1]);
        let right_neighbor = (end < self.carrier.len()).then(|| self.carrier[end]);
        let f_left = match left_neighbor {
            Some(l) => self.edges[&(l, interval[0])].clone(),
            None => self.left_external.clone(),
        };
        let f_right = match right_neighbor {
            Some(r) => self.edges[&(*interval.last().unwrap(), r)].clone(),
            None => self.right_external.clone(),
        };
        let bridge = PropagatorHandle::product_of(vec![f_left, k, f_right]);

        let new_carrier: Vec<i64> = self
            .carrier
            .iter()
            .copied()
            .filter(|x| !interval.contains(x))
            .collect();
        let mut new_edges: BTreeMap<Pair, PropagatorHandle> = self
            .edges
            .iter()
            .filter(|((a, b), _)| !interval.contains(a) && !interval.contains(b))
            .map(|(&e, h)| (e, h.clone()))
            .collect();
        let mut left_external = self.left_external.clone();
        let mut right_external = self.right_external.clone();
        match (left_neighbor, right_neighbor) {
            (Some(l), Some(r)) => {
                new_edges.insert((l, r), bridge);
            }
            (None, Some(_)) => left_external = bridge,
            (Some(_), None) => right_external = bridge,
            (None, None) => {
                left_external = bridge;
                right_external = PropagatorHandle::Identity;
            }
        }
        Self::new(new_carrier, new_edges, left_external, right_external)
    }
}

/// The pairs of `p` spanning the edge `e`: those with
/// `min p ≤ min e` and `max e ≤ max p`.  The edge's accumulated photon
/// energy is the sum of the radial variables of exactly these pairs.
pub fn kmod(e: Pair, p: &Pairing) -> Vec<Pair> {
    let e = if e.0 <= e.1 { e } else { (e.1, e.0) };
    p.pairs().iter().copied().filter(|&(a, b)| a <= e.0 && e.1 <= b).collect()
}

/// Contracts `phi` against the pairing `p` at external energy shift `r`.
///
/// Returns the exact zero matrix when `p` is not a pair partition of the
/// carrier.  Otherwise evaluates one radial integral per pair: the vertex at
/// a pair's smaller index contributes `G*(s)`, the larger one `G(s)`, each
/// edge is evaluated at `r` plus the radial variables of the pairs spanning
/// it, the per-pair measure is `4π s² ds`, and matrix factors multiply in
/// carrier order with the external handles (evaluated at `r`) outermost.
pub fn contract(
    p: &Pairing,
    phi: &GraphFunction,
    r: f64,
    model: &SpinBosonModel,
    rule: &RadialRule,
) -> Result<CMat> {
    let dim = model.dimension();
    let left = phi.left_external.eval(r, model)?;
    let right = phi.right_external.eval(r, model)?;
    if phi.carrier.is_empty() {
        return Ok(left * right);
    }
    if !p.is_pair_partition_of(&phi.carrier) {
        return Ok(CMat::zeros(dim, dim));
    }

    let pairs = p.pairs();
    let m = pairs.len();
    // Vertex roles: for each carrier position, the index of its pair and
    // whether it sits at the pair's minimum (creation slot `G*`).
    let roles: Vec<(usize, bool)> = phi
        .carrier
        .iter()
        .map(|&x| {
            let (idx, &(a, _)) = pairs
                .iter()
                .enumerate()
                .find(|(_, &(a, b))| a == x || b == x)
                .expect("pair partition covers the carrier");
            (idx, a == x)
        })
        .collect();
    // For each internal edge, the indices of the pairs spanning it.
    let edge_info: Vec<(Vec<usize>, &PropagatorHandle)> = phi
        .carrier
        .windows(2)
        .map(|w| {
            let e = (w[0], w[1]);
            let spanning: Vec<usize> = kmod(e, p)
                .into_iter()
                .map(|q| pairs.iter().position(|&pp| pp == q).unwrap())
                .collect();
            (spanning, &phi.edges[&e])
        })
        .collect();

    let n_nodes = rule.len();
    let total = n_nodes.pow(m as u32);
    let inner = try_sum_indexed_mat(total, dim, |flat| {
        // Decode the lexicographic multi-index (last pair fastest).
        let mut idx = vec![0usize; m];
        let mut rem = flat;
        for k in (0..m).rev() {
            idx[k] = rem % n_nodes;
            rem /= n_nodes;
        }
        let s: Vec<f64> = idx.iter().map(|&i| rule.nodes[i]).collect();
        let mut weight = 1.0;
        for k in 0..m {
            weight *= FOUR_PI * s[k] * s[k] * rule.weights[idx[k]];
        }
        let vertex = |pos: usize| -> CMat {
            let (pair_idx, is_min) = roles[pos];
            if is_min {
                model.coupling.g_star(s[pair_idx])
            } else {
                model.coupling.g(s[pair_idx])
            }
        };
        let mut acc = vertex(0);
        for (i, (spanning, handle)) in edge_info.iter().enumerate() {
            let arg = r + spanning.iter().map(|&k| s[k]).sum::<f64>();
            acc *= handle.eval(arg, model)?;
            acc *= vertex(i + 1);
        }
        Ok(acc * Complex64::new(weight, 0.0))
    })?;
    Ok(left * inner * right)
}

/// Contracts with node doubling until two successive levels agree to
/// `rel_tol` on every entry (relative to the final scale), returning the
/// finest value and the trace of successive differences.  Errors with the
/// trace when the sequence fails to stabilize within `max_doublings`.
pub fn contract_converged(
    p: &Pairing,
    phi: &GraphFunction,
    r: f64,
    model: &SpinBosonModel,
    config: &QuadratureConfig,
    rel_tol: f64,
    max_doublings: usize,
) -> Result<(CMat, Vec<f64>)> {
    let mut nodes = config.nodes_per_dim;
    let mut prev: Option<CMat> = None;
    let mut diffs = Vec::new();
    for _ in 0..=max_doublings {
        let rule = config.with_nodes(nodes).rule();
        let value = contract(p, phi, r, model, &rule)?;
        if let Some(ref pv) = prev {
            let scale = value.iter().map(|z| z.norm()).fold(1.0f64, f64::max);
            let diff = crate::linalg::max_entry_diff(&value, pv);
            diffs.push(diff);
            if diff <= rel_tol * scale {
                return Ok((value, diffs));
            }
        }
        prev = Some(value);
        nodes *= 2;
    }
    Err(Error::QuadratureDivergence {
        context: format!("contraction of {} pairs did not stabilize", p.len()),
        trace: diffs,
    })
}

/// Sums [`contract`] over every pair partition of the carrier (the full Wick
/// sum of the graph function).  The empty carrier contributes the external
/// handles evaluated at `r`.
pub fn contract_all_partitions(
    phi: &GraphFunction,
    r: f64,
    model: &SpinBosonModel,
    rule: &RadialRule,
) -> Result<CMat> {
    let dim = model.dimension();
    let partitions = crate::pairings::enumerate_pair_partitions(phi.carrier());
    if phi.carrier().is_empty() {
        return contract(&Pairing::empty(), phi, r, model, rule);
    }
    let mut terms = Vec::with_capacity(partitions.len());
    for p in &partitions {
        terms.push(contract(p, phi, r, model, rule)?);
    }
    Ok(pairwise_sum_mat(&terms, dim))
}

/// A contraction packaged as a reusable handle: evaluating at `x` contracts
/// the stored pairing and graph at external shift `x`.  This is the building
/// block for insertion kernels.
pub struct ContractionKernel {
    pub pairing: Pairing,
    pub graph: GraphFunction,
    pub model: Arc<SpinBosonModel>,
    pub rule: RadialRule,
    pub label: String,
}

impl MatrixFn for ContractionKernel {
    fn eval(&self, x: f64) -> Result<CMat> {
        contract(&self.pairing, &self.graph, x, &self.model, &self.rule)
    }

    fn describe(&self) -> String {
        self.label.clone()
    }
}

/// Symbolic description of the integrand `contract(p, phi, ·)`: each pair gets a
/// radial variable `s{i}`; vertices list their slot (`g_star` at the pair
/// minimum, `g` at the maximum) and variable; edges list the variables of the
/// pairs spanning them plus the external shift `r`.
pub fn symbolic_trace(p: &Pairing, phi: &GraphFunction) -> serde_json::Value {
    let pairs = p.pairs();
    let var_of = |x: i64| pairs.iter().position(|&(a, b)| a == x || b == x);
    let vertices: Vec<serde_json::Value> = phi
        .carrier
        .iter()
        .map(|&x| match var_of(x) {
            Some(i) => json!({
                "index": x,
                "slot": if pairs[i].0 == x { "g_star" } else { "g" },
                "variable": format!("s{i}"),
            }),
            None => json!({ "index": x, "slot": "unpaired" }),
        })
        .collect();
    let edges: Vec<serde_json::Value> = phi
        .carrier
        .windows(2)
        .map(|w| {
            let e = (w[0], w[1]);
            let vars: Vec<String> = kmod(e, p)
                .into_iter()
                .map(|q| format!("s{}", pairs.iter().position(|&pp| pp == q).unwrap()))
                .collect();
            json!({
                "edge": [e.0, e.1],
                "argument": vars.iter().cloned().chain(["r".to_string()]).collect::<Vec<_>>(),
                "handle": phi.edges[&e].describe(),
            })
        })
        .collect();
    json!({
        "carrier": phi.carrier,
        "pairs": pairs.iter().map(|&(a, b)| vec![a, b]).collect::<Vec<_>>(),
        "vertices": vertices,
        "edges": edges,
        "external": {
            "left": phi.left_external.describe(),
            "right": phi.right_external.describe(),
        },
    })
}
