//! Chord-diagram combinatorics: pair partitions, pairings, linked and
//! connected decompositions, interval collections, and the pair-removal
//! lemma.
//!
//! Carriers are sorted sets of (possibly negative) integers; the two families
//! in use are `{1, …, n}` and `[m, n] ∩ Z ∖ {0}`.  All enumerations are
//! deterministic: pairs are stored sorted by minimum element and generated by
//! recursively pairing the smallest unpaired element, so two runs (and any
//! parallel split over the output) always see the same sequence.

use serde::Serialize;

use crate::error::{Error, Result};

/// A pair of carrier elements, stored as `(min, max)`.
pub type Pair = (i64, i64);

/// A pairing: disjoint two-element subsets of a carrier, sorted by minimum
/// element.  A pairing that exhausts its carrier is a pair partition.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Pairing {
    pairs: Vec<Pair>,
}

impl Pairing {
    pub fn new(mut pairs: Vec<Pair>) -> Result<Self> {
        for p in pairs.iter_mut() {
            if p.0 == p.1 {
                return Err(Error::Config(format!("degenerate pair ({}, {})", p.0, p.1)));
            }
            if p.0 > p.1 {
                *p = (p.1, p.0);
            }
        }
        pairs.sort_unstable();
        let mut seen = std::collections::BTreeSet::new();
        for &(a, b) in &pairs {
            if !seen.insert(a) || !seen.insert(b) {
                return Err(Error::Config("pairs are not disjoint".into()));
            }
        }
        Ok(Self { pairs })
    }

    pub fn empty() -> Self {
        Self { pairs: Vec::new() }
    }

    pub fn pairs(&self) -> &[Pair] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Sorted union of all pairs (the paired elements).
    pub fn support(&self) -> Vec<i64> {
        let mut s: Vec<i64> = self.pairs.iter().flat_map(|&(a, b)| [a, b]).collect();
        s.sort_unstable();
        s
    }

    /// True when the pairing exhausts the carrier exactly.
    pub fn is_pair_partition_of(&self, carrier: &[i64]) -> bool {
        self.support() == carrier
    }

    /// The pairing restricted to all pairs except `q`.
    pub fn without(&self, q: Pair) -> Self {
        Self { pairs: self.pairs.iter().copied().filter(|&p| p != q).collect() }
    }

    /// Whether two pairs cross: each has exactly one endpoint strictly inside
    /// the other's span.
    pub fn crossing(p: Pair, q: Pair) -> bool {
        let p_in_q = (q.0 < p.0 && p.0 < q.1) || (q.0 < p.1 && p.1 < q.1);
        let q_in_p = (p.0 < q.0 && q.0 < p.1) || (p.0 < q.1 && q.1 < p.1);
        p_in_q && q_in_p
    }

    /// Whether two spans `[min, max]` overlap.
    pub fn span_overlap(p: Pair, q: Pair) -> bool {
        p.0 <= q.1 && q.0 <= p.1
    }
}

/// Union-find over pair indices.
struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        Self((0..n).collect())
    }
    fn find(&mut self, i: usize) -> usize {
        if self.0[i] != i {
            let root = self.find(self.0[i]);
            self.0[i] = root;
        }
        self.0[i]
    }
    fn union(&mut self, i: usize, j: usize) {
        let (ri, rj) = (self.find(i), self.find(j));
        if ri != rj {
            self.0[ri.max(rj)] = ri.min(rj);
        }
    }
    /// Groups of original indices, each group sorted, groups ordered by
    /// smallest member.
    fn groups(&mut self, n: usize) -> Vec<Vec<usize>> {
        let mut map = std::collections::BTreeMap::<usize, Vec<usize>>::new();
        for i in 0..n {
            let r = self.find(i);
            map.entry(r).or_default().push(i);
        }
        map.into_values().collect()
    }
}

fn components_by<R: Fn(Pair, Pair) -> bool>(p: &Pairing, related: R) -> Vec<Pairing> {
    let n = p.len();
    let mut uf = UnionFind::new(n);
    for i in 0..n {
        for j in (i + 1)..n {
            if related(p.pairs[i], p.pairs[j]) {
                uf.union(i, j);
            }
        }
    }
    uf.groups(n)
        .into_iter()
        .map(|g| Pairing { pairs: g.into_iter().map(|i| p.pairs[i]).collect() })
        .collect()
}

/// Equivalence classes of the transitive closure of the crossing relation.
pub fn linked_components(p: &Pairing) -> Vec<Pairing> {
    components_by(p, Pairing::crossing)
}

/// Equivalence classes of the transitive closure of span overlap.
pub fn connected_components(p: &Pairing) -> Vec<Pairing> {
    components_by(p, Pairing::span_overlap)
}

/// True iff `p` is nonempty and forms a single linked class.
pub fn is_linked(p: &Pairing) -> bool {
    !p.is_empty() && linked_components(p).len() == 1
}

/// True iff some linked component's union contains both `x` and `y`.
pub fn links(p: &Pairing, x: i64, y: i64) -> bool {
    linked_components(p).iter().any(|c| {
        let s = c.support();
        s.binary_search(&x).is_ok() && s.binary_search(&y).is_ok()
    })
}

/// Every pair partition of `carrier`, in lexicographic order of the sorted
/// pair lists; empty for odd carriers (no pair partition exists).  The count
/// for `2m` elements is `(2m − 1)!!`.
pub fn enumerate_pair_partitions(carrier: &[i64]) -> Vec<Pairing> {
    debug_assert!(carrier.windows(2).all(|w| w[0] < w[1]), "carrier must be sorted");
    if carrier.len() % 2 != 0 {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut current = Vec::new();
    let mut rest: Vec<i64> = carrier.to_vec();
    fn recurse(rest: &mut Vec<i64>, current: &mut Vec<Pair>, out: &mut Vec<Pairing>) {
        if rest.is_empty() {
            out.push(Pairing { pairs: current.clone() });
            return;
        }
        let first = rest[0];
        // Pair the smallest remaining element with each later one in order;
        // this yields lexicographic order of the sorted pair lists.
        for idx in 1..rest.len() {
            let partner = rest[idx];
            let mut next: Vec<i64> = rest[1..].to_vec();
            next.remove(idx - 1);
            current.push((first, partner));
            recurse(&mut next, current, out);
            current.pop();
        }
    }
    recurse(&mut rest, &mut current, &mut out);
    out
}

/// Every pairing of every even-size subset of `carrier`, including the empty
/// pairing, in a deterministic order (the smallest element is either left
/// unpaired or paired with each later element in turn).
pub fn enumerate_pairings(carrier: &[i64]) -> Vec<Pairing> {
    debug_assert!(carrier.windows(2).all(|w| w[0] < w[1]), "carrier must be sorted");
    let mut out = Vec::new();
    let mut current = Vec::new();
    fn recurse(rest: &[i64], current: &mut Vec<Pair>, out: &mut Vec<Pairing>) {
        match rest.first() {
            None => out.push(Pairing { pairs: { let mut c = current.clone(); c.sort_unstable(); c } }),
            Some(&first) => {
                // Leave `first` unpaired…
                recurse(&rest[1..], current, out);
                // …or pair it with each later element.
                for idx in 1..rest.len() {
                    let partner = rest[idx];
                    let mut next: Vec<i64> = rest[1..].to_vec();
                    next.remove(idx - 1);
                    current.push((first, partner));
                    recurse(&next, current, out);
                    current.pop();
                }
            }
        }
    }
    recurse(carrier, &mut current, &mut out);
    out
}

/// The coarsest partition of `carrier ∖ ∪P` into intervals of the carrier:
/// maximal runs of carrier-consecutive unpaired elements, in increasing
/// order.
pub fn unpaired_intervals(p: &Pairing, carrier: &[i64]) -> Vec<Vec<i64>> {
    let support = p.support();
    let mut out: Vec<Vec<i64>> = Vec::new();
    let mut run: Vec<i64> = Vec::new();
    for (idx, &x) in carrier.iter().enumerate() {
        let unpaired = support.binary_search(&x).is_err();
        if unpaired {
            // Extend the run only when x directly follows the previous
            // carrier element of the run.
            if let Some(&last) = run.last() {
                let prev_carrier = carrier[idx - 1];
                if last == prev_carrier {
                    run.push(x);
                } else {
                    out.push(std::mem::take(&mut run));
                    run.push(x);
                }
            } else {
                run.push(x);
            }
        } else if !run.is_empty() {
            out.push(std::mem::take(&mut run));
        }
    }
    if !run.is_empty() {
        out.push(run);
    }
    out
}

/// Distances from `p` in the crossing graph of the pairing (pairs as nodes,
/// crossings as edges); `usize::MAX` marks unreachable pairs.
fn crossing_distances(pairing: &Pairing, from: usize) -> Vec<usize> {
    let n = pairing.len();
    let mut dist = vec![usize::MAX; n];
    let mut queue = std::collections::VecDeque::new();
    dist[from] = 0;
    queue.push_back(from);
    while let Some(i) = queue.pop_front() {
        for j in 0..n {
            if dist[j] == usize::MAX && Pairing::crossing(pairing.pairs[i], pairing.pairs[j]) {
                dist[j] = dist[i] + 1;
                queue.push_back(j);
            }
        }
    }
    dist
}

/// For a linked pair partition `P` (carrier ≥ 4 elements) and `p ∈ P`,
/// returns a pair `q ≠ p` whose removal leaves a linked pair partition,
/// choosing the candidate farthest from `p` in the crossing graph (ties
/// broken by canonical pair order) and re-verifying linkedness of the result.
pub fn removal_witness(pairing: &Pairing, p: Pair) -> Result<Pair> {
    let p = if p.0 <= p.1 { p } else { (p.1, p.0) };
    let idx = pairing
        .pairs
        .iter()
        .position(|&q| q == p)
        .ok_or_else(|| Error::Config(format!("pair ({}, {}) not in pairing", p.0, p.1)))?;
    if pairing.len() < 2 {
        return Err(Error::Config("removal needs at least two pairs".into()));
    }
    if !is_linked(pairing) {
        return Err(Error::Config("removal lemma applies to linked pair partitions".into()));
    }
    let dist = crossing_distances(pairing, idx);
    // Candidates sorted by decreasing distance, then canonical pair order.
    let mut order: Vec<usize> = (0..pairing.len()).filter(|&j| j != idx).collect();
    order.sort_by(|&a, &b| dist[b].cmp(&dist[a]).then(pairing.pairs[a].cmp(&pairing.pairs[b])));
    for j in order {
        let q = pairing.pairs[j];
        if is_linked(&pairing.without(q)) {
            return Ok(q);
        }
    }
    Err(Error::Config("no removable pair keeps the partition linked".into()))
}

/// Which family of interval collections to enumerate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IntervalVariant {
    /// All collections of disjoint nonempty carrier intervals.
    Plain,
    /// Only collections whose members never bracket zero
    /// (`0 ∉ [min I, max I]` for every member).
    ZeroAvoiding,
}

/// Optional restrictions on enumerated collections.
#[derive(Debug, Clone, Copy, Default)]
pub struct CollectionConstraints {
    /// Drop the collection consisting of the full carrier as one interval.
    pub exclude_full_carrier: bool,
}

/// All collections of disjoint nonempty intervals of `carrier` (an interval
/// means a run of consecutive carrier elements), in a deterministic order.
/// The empty collection comes first.
pub fn enumerate_interval_collections(
    carrier: &[i64],
    variant: IntervalVariant,
    constraints: CollectionConstraints,
) -> Vec<Vec<Vec<i64>>> {
    debug_assert!(carrier.windows(2).all(|w| w[0] < w[1]), "carrier must be sorted");
    let n = carrier.len();
    let mut out = Vec::new();
    let mut current: Vec<Vec<i64>> = Vec::new();
    fn recurse(
        carrier: &[i64],
        start: usize,
        variant: IntervalVariant,
        current: &mut Vec<Vec<i64>>,
        out: &mut Vec<Vec<Vec<i64>>>,
    ) {
        if start == carrier.len() {
            out.push(current.clone());
            return;
        }
        // Element `start` not covered by any interval.
        recurse(carrier, start + 1, variant, current, out);
        // Or an interval starting at `start` and ending at each j ≥ start.
        for end in start..carrier.len() {
            let interval: Vec<i64> = carrier[start..=end].to_vec();
            if variant == IntervalVariant::ZeroAvoiding {
                let (lo, hi) = (interval[0], *interval.last().unwrap());
                if lo < 0 && hi > 0 {
                    continue;
                }
            }
            current.push(interval);
            recurse(carrier, end + 1, variant, current, out);
            current.pop();
        }
    }
    recurse(carrier, 0, variant, &mut current, &mut out);
    if constraints.exclude_full_carrier {
        out.retain(|c| !(c.len() == 1 && c[0].len() == n));
    }
    out
}

/// `{1, …, n}`.
pub fn carrier_n(n: usize) -> Vec<i64> {
    (1..=n as i64).collect()
}

/// `[m, n] ∩ Z ∖ {0}`.
pub fn carrier_mn(m: i64, n: i64) -> Vec<i64> {
    (m..=n).filter(|&x| x != 0).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pairing(pairs: &[(i64, i64)]) -> Pairing {
        Pairing::new(pairs.to_vec()).unwrap()
    }

    fn double_factorial(n: usize) -> usize {
        if n <= 1 {
            1
        } else {
            n * double_factorial(n - 2)
        }
    }

    #[test]
    fn pair_partition_counts_match_double_factorials() {
        for m in 1..=6usize {
            let carrier = carrier_n(2 * m);
            let parts = enumerate_pair_partitions(&carrier);
            assert_eq!(parts.len(), double_factorial(2 * m - 1), "2m = {}", 2 * m);
            for p in &parts {
                assert!(p.is_pair_partition_of(&carrier));
            }
        }
        assert!(enumerate_pair_partitions(&carrier_n(3)).is_empty());
        assert_eq!(
            enumerate_pair_partitions(&[1, 2]),
            vec![pairing(&[(1, 2)])]
        );
    }

    #[test]
    fn pair_partitions_are_lexicographic_and_deterministic() {
        let a = enumerate_pair_partitions(&carrier_n(6));
        let b = enumerate_pair_partitions(&carrier_n(6));
        assert_eq!(a, b);
        let mut sorted = a.clone();
        sorted.sort_by(|x, y| x.pairs().cmp(y.pairs()));
        assert_eq!(a, sorted, "enumeration must already be lexicographic");
    }

    #[test]
    fn pairing_counts_include_empty_and_subsets() {
        assert_eq!(enumerate_pairings(&[1]).len(), 1); // only empty
        assert_eq!(enumerate_pairings(&[1, 2]).len(), 2);
        // |X| = 4: 1 empty + 6 single-pair + 3 full = 10.
        let all = enumerate_pairings(&carrier_n(4));
        assert_eq!(all.len(), 10);
        assert_eq!(all.iter().filter(|p| p.is_empty()).count(), 1);
        assert_eq!(all.iter().filter(|p| p.len() == 1).count(), 6);
        assert_eq!(all.iter().filter(|p| p.len() == 2).count(), 3);
    }

    #[test]
    fn linked_classes_of_reference_five_pair_example() {
        let q = pairing(&[(1, 5), (4, 13), (6, 8), (7, 11), (12, 14)]);
        let classes = linked_components(&q);
        assert_eq!(classes.len(), 2);
        assert_eq!(classes[0], pairing(&[(1, 5), (4, 13), (12, 14)]));
        assert_eq!(classes[1], pairing(&[(6, 8), (7, 11)]));
        assert!(is_linked(&classes[0]));
        assert!(links(&q, 1, 14));
        assert!(!links(&q, 1, 6));
    }

    #[test]
    fn disjoint_spans_are_not_linked() {
        let p = pairing(&[(1, 2), (3, 4)]);
        assert_eq!(linked_components(&p).len(), 2);
        assert!(!is_linked(&p));
        assert!(!is_linked(&Pairing::empty()));
        assert!(is_linked(&pairing(&[(1, 2)])));
    }

    #[test]
    fn connected_components_of_reference_28_point_example() {
        let p = pairing(&[
            (1, 2),
            (3, 5),
            (4, 6),
            (9, 16),
            (10, 12),
            (11, 13),
            (17, 18),
            (26, 27),
            (25, 28),
        ]);
        let comps = connected_components(&p);
        let expected = [
            pairing(&[(1, 2)]),
            pairing(&[(3, 5), (4, 6)]),
            pairing(&[(9, 16), (10, 12), (11, 13)]),
            pairing(&[(17, 18)]),
            pairing(&[(25, 28), (26, 27)]),
        ];
        assert_eq!(comps.len(), expected.len());
        for (c, e) in comps.iter().zip(&expected) {
            assert_eq!(c, e);
        }
    }

    #[test]
    fn linked_refines_connected_exhaustively() {
        for n in [4usize, 6, 8] {
            for p in enumerate_pairings(&carrier_n(n)) {
                let linked = linked_components(&p);
                let connected = connected_components(&p);
                for lc in &linked {
                    let ls = lc.support();
                    assert!(
                        connected.iter().any(|cc| {
                            let cs = cc.support();
                            ls.iter().all(|x| cs.binary_search(x).is_ok())
                        }),
                        "linked class {lc:?} not inside any connected class of {p:?}"
                    );
                }
            }
        }
    }

    #[test]
    fn unpaired_intervals_reference_examples() {
        // N₁₄ with the linked 3-pair example leaves {2,3} and {6..11}.
        let p = pairing(&[(1, 5), (4, 13), (12, 14)]);
        let iv = unpaired_intervals(&p, &carrier_n(14));
        assert_eq!(iv, vec![vec![2, 3], vec![6, 7, 8, 9, 10, 11]]);
        // N₆ with {{2,5}} leaves {1}, {3,4}, {6}.
        let p2 = pairing(&[(2, 5)]);
        assert_eq!(
            unpaired_intervals(&p2, &carrier_n(6)),
            vec![vec![1], vec![3, 4], vec![6]]
        );
        // A pair partition leaves nothing.
        let p3 = pairing(&[(1, 3), (2, 4)]);
        assert!(unpaired_intervals(&p3, &carrier_n(4)).is_empty());
        // Carrier gaps break runs: on [−2,2]∖{0}, unpaired {−1, 1} IS a run
        // (carrier-adjacent), but {−2, 1} is not.
        let carrier = carrier_mn(-2, 2);
        let p4 = pairing(&[(-2, 2)]);
        assert_eq!(unpaired_intervals(&p4, &carrier), vec![vec![-1, 1]]);
    }

    #[test]
    fn removal_witness_reference_example() {
        // Ten points x₁ < … < x₁₀ (use 1..10): the valid removals are exactly
        // {x₁,x₃}, {x₆,x₉}, {x₇,x₁₀}.
        let p = pairing(&[(1, 3), (2, 5), (4, 8), (6, 9), (7, 10)]);
        assert!(is_linked(&p));
        let valid: Vec<Pair> = p
            .pairs()
            .iter()
            .copied()
            .filter(|&q| is_linked(&p.without(q)))
            .collect();
        assert_eq!(valid, vec![(1, 3), (6, 9), (7, 10)]);
        for &pair in p.pairs() {
            let w = removal_witness(&p, pair).unwrap();
            assert!(valid.contains(&w), "witness {w:?} for {pair:?} not valid");
            assert_ne!(w, pair);
        }
    }

    #[test]
    fn removal_witness_trivial_and_exhaustive() {
        let p = pairing(&[(1, 3), (2, 4)]);
        assert_eq!(removal_witness(&p, (1, 3)).unwrap(), (2, 4));
        // Every linked pair partition on ≤ 8 points admits a witness for
        // every member pair.
        for n in [4usize, 6, 8] {
            for p in enumerate_pair_partitions(&carrier_n(n)) {
                if !is_linked(&p) {
                    continue;
                }
                for &pair in p.pairs() {
                    let w = removal_witness(&p, pair).unwrap();
                    assert!(is_linked(&p.without(w)));
                }
            }
        }
    }

    #[test]
    fn interval_collection_counts() {
        let c12 = enumerate_interval_collections(
            &[1, 2],
            IntervalVariant::Plain,
            CollectionConstraints::default(),
        );
        assert_eq!(c12.len(), 5);
        assert!(c12.contains(&vec![]));
        assert!(c12.contains(&vec![vec![1]]));
        assert!(c12.contains(&vec![vec![2]]));
        assert!(c12.contains(&vec![vec![1], vec![2]]));
        assert!(c12.contains(&vec![vec![1, 2]]));

        let c1 = enumerate_interval_collections(
            &[1],
            IntervalVariant::Plain,
            CollectionConstraints::default(),
        );
        assert_eq!(c1.len(), 2);

        // Excluding the full carrier drops exactly one collection.
        let c12x = enumerate_interval_collections(
            &[1, 2],
            IntervalVariant::Plain,
            CollectionConstraints { exclude_full_carrier: true },
        );
        assert_eq!(c12x.len(), 4);
        assert!(!c12x.contains(&vec![vec![1, 2]]));
    }

    #[test]
    fn zero_avoiding_collections_drop_bracketing_intervals() {
        // Carrier {−1, 1}: the interval {−1, 1} brackets zero and is
        // excluded; singletons remain.
        let c = enumerate_interval_collections(
            &carrier_mn(-1, 1),
            IntervalVariant::ZeroAvoiding,
            CollectionConstraints::default(),
        );
        assert_eq!(c.len(), 4);
        assert!(!c.contains(&vec![vec![-1, 1]]));
        let plain = enumerate_interval_collections(
            &carrier_mn(-1, 1),
            IntervalVariant::Plain,
            CollectionConstraints::default(),
        );
        assert_eq!(plain.len(), 5);
    }

    #[test]
    fn enumerations_are_deterministic() {
        let a = enumerate_pairings(&carrier_n(6));
        let b = enumerate_pairings(&carrier_n(6));
        assert_eq!(a, b);
        let ca = enumerate_interval_collections(
            &carrier_n(4),
            IntervalVariant::Plain,
            CollectionConstraints::default(),
        );
        let cb = enumerate_interval_collections(
            &carrier_n(4),
            IntervalVariant::Plain,
            CollectionConstraints::default(),
        );
        assert_eq!(ca, cb);
    }
}
