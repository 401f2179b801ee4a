//! k-subset search: find k positions of a hidden value sequence whose
//! values satisfy a family-specific predicate.
//!
//! A problem couples an arity `k`, a hidden sequence, and a verification
//! predicate over claimed `(values, indices)` pairs. The predicate never
//! touches the hidden sequence, so it transfers unchanged to any restricted
//! index set; that closure under restriction is what the canonicalizer in
//! [`crate::psd`] exploits. Four families are provided: k-sum, k-equal
//! values, labeled edge collision, and triangle finding over edge slots.
//!
//! Solutions order index tuples ascending; comparing two solutions compares
//! index vectors lexicographically, so the maximum is the tuple maximizing
//! its smallest index, then its second smallest, and so on.

use std::collections::BTreeSet;

use itertools::Itertools;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::grover;
use crate::oracle::{CountedOracle, IndexSet, OracleError, ValueSeq};
use crate::qsim::{apply_diffusion, apply_phase_predicate, measure, StateVector};

/// The predicate family of a [`SubsetProblem`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProblemKind {
    /// k values summing to `target`.
    KSum { target: u64 },
    /// k positions holding one common value.
    KDistinct,
    /// An edge of the graph whose two endpoints are both labeled 1;
    /// edges are stored normalized with the smaller endpoint first.
    GraphCollision { edges: BTreeSet<(usize, usize)> },
    /// Three edge slots of a `vertices`-vertex graph forming a triangle,
    /// all present in the hidden adjacency sequence.
    Triangle { vertices: usize },
}

/// A verified `(values, indices)` pair; indices ascending, values aligned.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct SubsetSolution {
    pub indices: Vec<usize>,
    pub values: Vec<u64>,
}

/// A k-subset search problem over a hidden sequence.
#[derive(Debug, Clone)]
pub struct SubsetProblem {
    k: usize,
    values: ValueSeq,
    kind: ProblemKind,
}

/// Slot number (1-based) of the vertex pair `u < v` among all pairs of
/// `[m]` in lexicographic order.
#[must_use]
pub fn pair_slot(m: usize, u: usize, v: usize) -> usize {
    assert!(1 <= u && u < v && v <= m, "need 1 <= u < v <= m");
    (u - 1) * m - u * (u - 1) / 2 + (v - u)
}

/// Inverse of [`pair_slot`].
#[must_use]
pub fn slot_pair(m: usize, slot: usize) -> (usize, usize) {
    assert!(slot >= 1 && slot <= m * (m - 1) / 2, "slot out of range");
    let mut s = slot;
    for u in 1..m {
        let block = m - u;
        if s <= block {
            return (u, u + s);
        }
        s -= block;
    }
    unreachable!("slot bounds checked above")
}

impl SubsetProblem {
    /// k positions summing to `target`.
    pub fn ksum(values: Vec<u64>, k: usize, target: u64) -> Result<Self, OracleError> {
        Self::build(values, k, ProblemKind::KSum { target })
    }

    /// k positions holding equal values.
    pub fn kdistinct(values: Vec<u64>, k: usize) -> Result<Self, OracleError> {
        Self::build(values, k, ProblemKind::KDistinct)
    }

    /// Edge with both endpoints labeled 1. Ground set = vertices, hidden
    /// sequence = the 0/1 labels, `k = 2`; the edge list is part of the
    /// predicate, not of the hidden input.
    pub fn graph_collision(
        vertices: usize,
        edges: &[(usize, usize)],
        labels: Vec<u64>,
    ) -> Result<Self, OracleError> {
        if labels.len() != vertices {
            return Err(OracleError::LengthMismatch {
                left: labels.len(),
                right: vertices,
            });
        }
        if let Some(&bad) = labels.iter().find(|&&v| v > 1) {
            return Err(OracleError::InvalidEncoding(format!(
                "label {bad} is not a bit"
            )));
        }
        let mut normalized = BTreeSet::new();
        for &(a, b) in edges {
            if a == b || a == 0 || b == 0 || a > vertices || b > vertices {
                return Err(OracleError::InvalidEncoding(format!(
                    "edge ({a},{b}) invalid for {vertices} vertices"
                )));
            }
            normalized.insert((a.min(b), a.max(b)));
        }
        Self::build(labels, 2, ProblemKind::GraphCollision { edges: normalized })
    }

    /// Triangle over the edge slots of a `vertices`-vertex graph: the
    /// hidden sequence holds one presence bit per unordered pair, in the
    /// [`pair_slot`] order, and a solution is three present slots whose
    /// pairs share three vertices.
    pub fn triangle(vertices: usize, adjacency: Vec<u64>) -> Result<Self, OracleError> {
        let slots = vertices * (vertices - 1) / 2;
        if vertices < 3 {
            return Err(OracleError::InvalidEncoding(
                "triangle search needs at least 3 vertices".to_string(),
            ));
        }
        if adjacency.len() != slots {
            return Err(OracleError::LengthMismatch {
                left: adjacency.len(),
                right: slots,
            });
        }
        if let Some(&bad) = adjacency.iter().find(|&&v| v > 1) {
            return Err(OracleError::InvalidEncoding(format!(
                "adjacency entry {bad} is not a bit"
            )));
        }
        Self::build(adjacency, 3, ProblemKind::Triangle { vertices })
    }

    fn build(values: Vec<u64>, k: usize, kind: ProblemKind) -> Result<Self, OracleError> {
        if k == 0 {
            return Err(OracleError::InvalidEncoding("arity 0".to_string()));
        }
        Ok(Self {
            k,
            values: ValueSeq::new(values),
            kind,
        })
    }

    #[must_use]
    pub fn k(&self) -> usize {
        self.k
    }

    #[must_use]
    pub fn ground_size(&self) -> usize {
        self.values.len()
    }

    #[must_use]
    pub fn kind(&self) -> &ProblemKind {
        &self.kind
    }

    /// Generator-side view of the hidden sequence.
    #[must_use]
    pub fn values(&self) -> &ValueSeq {
        &self.values
    }

    /// Fresh counted oracle over the hidden sequence.
    #[must_use]
    pub fn oracle(&self) -> CountedOracle<ValueSeq> {
        CountedOracle::new(self.values.clone())
    }

    /// Does the claimed pair satisfy the predicate? Depends only on the
    /// arguments: `values` are the claimed symbols at `indices`, which must
    /// be ascending, distinct, and inside the ground set.
    #[must_use]
    pub fn verify(&self, values: &[u64], indices: &[usize]) -> bool {
        if indices.len() != self.k || values.len() != self.k {
            return false;
        }
        let ascending = indices.windows(2).all(|w| w[0] < w[1]);
        let in_range = indices
            .iter()
            .all(|&i| i >= 1 && i <= self.ground_size());
        if !ascending || !in_range {
            return false;
        }
        match &self.kind {
            ProblemKind::KSum { target } => {
                values.iter().map(|&v| u128::from(v)).sum::<u128>() == u128::from(*target)
            }
            ProblemKind::KDistinct => values.iter().all(|&v| v == values[0]),
            ProblemKind::GraphCollision { edges } => {
                values == [1, 1] && edges.contains(&(indices[0], indices[1]))
            }
            ProblemKind::Triangle { vertices } => {
                if values != [1, 1, 1] {
                    return false;
                }
                let mut endpoints = BTreeSet::new();
                for &slot in indices {
                    let (u, v) = slot_pair(*vertices, slot);
                    endpoints.insert(u);
                    endpoints.insert(v);
                }
                // three pairwise-adjacent slots cover exactly 3 vertices
                endpoints.len() == 3
            }
        }
    }

    /// All solutions within `domain`, ascending. Generator-side: reads the
    /// hidden sequence directly, no oracle accounting.
    #[must_use]
    pub fn brute_force_all(&self, domain: &IndexSet) -> Vec<SubsetSolution> {
        domain
            .as_slice()
            .iter()
            .copied()
            .combinations(self.k)
            .filter_map(|indices| {
                let values: Vec<u64> = indices
                    .iter()
                    .map(|&i| self.values.get(i).expect("domain inside ground set"))
                    .collect();
                self.verify(&values, &indices)
                    .then_some(SubsetSolution { indices, values })
            })
            .collect()
    }

    /// The canonical solution within `domain`: the index tuple maximizing
    /// its smallest index, then the next, and so on; none if unsolvable.
    #[must_use]
    pub fn brute_force_canonical(&self, domain: &IndexSet) -> Option<SubsetSolution> {
        self.brute_force_all(domain).into_iter().max()
    }
}

/// Bounded-error tuple search over `domain`: Grover over all k-subsets of
/// the domain, with the escalating iteration-cap schedule of
/// [`grover::grover_search`].
///
/// One phase-gate application evaluates the hidden sequence at the k
/// positions of each tuple, so it is charged k quantum queries; each
/// measured candidate is checked with k classical queries, making the
/// result one-sided. If solutions exist in the domain, one is returned
/// with probability at least 2/3; otherwise none, always. Query usage is
/// at most `k * `[`grover::search_budget`]`(C(|domain|, k))`.
pub fn grover_subset_solver(
    problem: &SubsetProblem,
    oracle: &CountedOracle<ValueSeq>,
    domain: &IndexSet,
    rng: &mut impl Rng,
) -> Option<SubsetSolution> {
    let k = problem.k();
    let tuples: Vec<Vec<usize>> = domain
        .as_slice()
        .iter()
        .copied()
        .combinations(k)
        .collect();
    if tuples.is_empty() {
        return None;
    }
    let before = oracle.total_queries();
    let d = tuples.len();
    // the marked set is fixed for the whole call; evaluate it on first use
    // and charge every later gate application without re-evaluating
    let mut marked: Option<Vec<bool>> = None;
    let mut result = None;
    'rounds: for m in grover::schedule(d) {
        let t = rng.gen_range(0..m);
        let mut state = StateVector::uniform(d);
        for _ in 0..t {
            let values = oracle.quantum_payload_charged(k as u64);
            let mask = marked.get_or_insert_with(|| {
                tuples
                    .iter()
                    .map(|tuple| {
                        let vals: Vec<u64> = tuple
                            .iter()
                            .map(|&i| values.get(i).expect("tuple inside ground set"))
                            .collect();
                        problem.verify(&vals, tuple)
                    })
                    .collect()
            });
            apply_phase_predicate(&mut state, |pos| mask[pos]);
            apply_diffusion(&mut state, 0);
        }
        let pos = measure(&mut state, 0, rng);
        let tuple = &tuples[pos];
        let vals: Vec<u64> = tuple
            .iter()
            .map(|&i| oracle.query(i).expect("tuple inside ground set"))
            .collect();
        if problem.verify(&vals, tuple) {
            result = Some(SubsetSolution {
                indices: tuple.clone(),
                values: vals,
            });
            break 'rounds;
        }
    }
    let used = oracle.total_queries() - before;
    debug_assert!(
        used <= k as u64 * grover::search_budget(d),
        "tuple search exceeded its budget: {used}"
    );
    result
}

/// Random k-sum instance: uniform values in `[0, max_value]`; when `plant`
/// is set the target is the sum of a random k-subset, otherwise a uniform
/// target that may leave the instance unsolvable.
pub fn random_ksum(
    n: usize,
    k: usize,
    max_value: u64,
    plant: bool,
    rng: &mut impl Rng,
) -> SubsetProblem {
    assert!(k >= 1 && k <= n);
    let values: Vec<u64> = (0..n).map(|_| rng.gen_range(0..=max_value)).collect();
    let target = if plant {
        let mut positions: Vec<usize> = (0..n).collect();
        positions.shuffle(rng);
        positions[..k].iter().map(|&p| values[p]).sum()
    } else {
        rng.gen_range(0..=max_value * k as u64)
    };
    SubsetProblem::ksum(values, k, target).expect("arity validated")
}

/// Random k-equal-values instance over an alphabet of `alphabet` symbols;
/// when `plant` is set, k positions are overwritten with one shared value.
pub fn random_kdistinct(
    n: usize,
    k: usize,
    alphabet: u64,
    plant: bool,
    rng: &mut impl Rng,
) -> SubsetProblem {
    assert!(k >= 1 && k <= n && alphabet >= 1);
    let mut values: Vec<u64> = (0..n).map(|_| rng.gen_range(0..alphabet)).collect();
    if plant {
        let shared = rng.gen_range(0..alphabet);
        let mut positions: Vec<usize> = (0..n).collect();
        positions.shuffle(rng);
        for &p in &positions[..k] {
            values[p] = shared;
        }
    }
    SubsetProblem::kdistinct(values, k).expect("arity validated")
}

/// Random edge-collision instance: each edge present with probability
/// `edge_prob`, labels uniform; when `plant` is set one edge is forced in
/// with both endpoints labeled 1.
pub fn random_graph_collision(
    vertices: usize,
    edge_prob: f64,
    plant: bool,
    rng: &mut impl Rng,
) -> SubsetProblem {
    assert!(vertices >= 2);
    let mut edges = Vec::new();
    for u in 1..=vertices {
        for v in (u + 1)..=vertices {
            if rng.gen_bool(edge_prob) {
                edges.push((u, v));
            }
        }
    }
    let mut labels: Vec<u64> = (0..vertices).map(|_| u64::from(rng.gen_bool(0.5))).collect();
    if plant {
        let u = rng.gen_range(1..=vertices - 1);
        let v = rng.gen_range(u + 1..=vertices);
        edges.push((u, v));
        labels[u - 1] = 1;
        labels[v - 1] = 1;
    }
    SubsetProblem::graph_collision(vertices, &edges, labels).expect("edges constructed in range")
}

/// Random triangle instance: each edge present with probability
/// `edge_prob`; when `plant` is set three random vertices are wired into a
/// triangle.
pub fn random_triangle(
    vertices: usize,
    edge_prob: f64,
    plant: bool,
    rng: &mut impl Rng,
) -> SubsetProblem {
    assert!(vertices >= 3);
    let slots = vertices * (vertices - 1) / 2;
    let mut adjacency: Vec<u64> = (0..slots).map(|_| u64::from(rng.gen_bool(edge_prob))).collect();
    if plant {
        let mut picks: Vec<usize> = (1..=vertices).collect();
        picks.shuffle(rng);
        let (a, b, c) = (picks[0], picks[1], picks[2]);
        for (u, v) in [(a, b), (a, c), (b, c)] {
            let (u, v) = (u.min(v), u.max(v));
            adjacency[pair_slot(vertices, u, v) - 1] = 1;
        }
    }
    SubsetProblem::triangle(vertices, adjacency).expect("slot count matches")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seeds::trial_rng;

    #[test]
    fn pair_slots_enumerate_lexicographically() {
        // m = 4: (1,2) (1,3) (1,4) (2,3) (2,4) (3,4)
        let pairs = [(1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)];
        for (i, &(u, v)) in pairs.iter().enumerate() {
            assert_eq!(pair_slot(4, u, v), i + 1);
            assert_eq!(slot_pair(4, i + 1), (u, v));
        }
        for m in 2..=9 {
            for slot in 1..=m * (m - 1) / 2 {
                let (u, v) = slot_pair(m, slot);
                assert_eq!(pair_slot(m, u, v), slot);
            }
        }
    }

    #[test]
    fn ksum_worked_examples() {
        let p = SubsetProblem::ksum(vec![1, 2, 3], 2, 5).unwrap();
        let all = p.brute_force_all(&IndexSet::full(3));
        assert_eq!(all.len(), 1);
        assert_eq!(all[0].indices, vec![2, 3]);
        assert_eq!(all[0].values, vec![2, 3]);

        // no subset reaches the target
        let p = SubsetProblem::ksum(vec![1, 2, 3], 2, 50).unwrap();
        assert!(p.brute_force_canonical(&IndexSet::full(3)).is_none());

        // restriction removes the only solution
        let p = SubsetProblem::ksum(vec![1, 2, 3], 2, 5).unwrap();
        assert!(p
            .brute_force_canonical(&IndexSet::new(vec![1, 2]).unwrap())
            .is_none());
    }

    #[test]
    fn canonical_solution_maximizes_indices_in_order() {
        // two solutions {2,3} and {3,4}; canonical is {3,4}
        let p = SubsetProblem::ksum(vec![1, 2, 3, 2], 2, 5).unwrap();
        let all = p.brute_force_all(&IndexSet::full(4));
        let tuples: Vec<&[usize]> = all.iter().map(|s| s.indices.as_slice()).collect();
        assert_eq!(tuples, vec![&[2, 3][..], &[3, 4][..]]);
        let canonical = p.brute_force_canonical(&IndexSet::full(4)).unwrap();
        assert_eq!(canonical.indices, vec![3, 4]);
        assert_eq!(canonical.values, vec![3, 2]);
    }

    #[test]
    fn kdistinct_extremes() {
        let p = SubsetProblem::kdistinct(vec![7, 7, 7, 7], 2).unwrap();
        assert_eq!(p.brute_force_all(&IndexSet::full(4)).len(), 6); // C(4,2)
        let p = SubsetProblem::kdistinct(vec![1, 2, 3, 4], 2).unwrap();
        assert!(p.brute_force_all(&IndexSet::full(4)).is_empty());
        // element distinctness at k=2: pairs of equal entries
        let p = SubsetProblem::kdistinct(vec![1, 2, 1, 3], 2).unwrap();
        let all = p.brute_force_all(&IndexSet::full(4));
        assert_eq!(all.len(), 1);
        assert_eq!(all[0].indices, vec![1, 3]);
    }

    #[test]
    fn graph_collision_examples() {
        // all labels 0: unsolvable even on a complete graph
        let edges = [(1, 2), (1, 3), (2, 3)];
        let p = SubsetProblem::graph_collision(3, &edges, vec![0, 0, 0]).unwrap();
        assert!(p.brute_force_all(&IndexSet::full(3)).is_empty());
        // two labeled endpoints of an existing edge
        let p = SubsetProblem::graph_collision(3, &edges, vec![1, 0, 1]).unwrap();
        let all = p.brute_force_all(&IndexSet::full(3));
        assert_eq!(all.len(), 1);
        assert_eq!(all[0].indices, vec![1, 3]);
        // labeled pair without an edge between them is no solution
        let p = SubsetProblem::graph_collision(3, &[(1, 2)], vec![1, 0, 1]).unwrap();
        assert!(p.brute_force_all(&IndexSet::full(3)).is_empty());
    }

    #[test]
    fn triangle_examples() {
        // K3: all three slots present, unique solution {1,2,3}
        let p = SubsetProblem::triangle(3, vec![1, 1, 1]).unwrap();
        let all = p.brute_force_all(&IndexSet::full(3));
        assert_eq!(all.len(), 1);
        assert_eq!(all[0].indices, vec![1, 2, 3]);

        // path 1-2-3-4 has no triangle
        let mut adj = vec![0u64; 6];
        adj[pair_slot(4, 1, 2) - 1] = 1;
        adj[pair_slot(4, 2, 3) - 1] = 1;
        adj[pair_slot(4, 3, 4) - 1] = 1;
        let p = SubsetProblem::triangle(4, adj).unwrap();
        assert!(p.brute_force_all(&IndexSet::full(6)).is_empty());

        // triangle on {2,3,4} inside a 4-vertex graph
        let mut adj = vec![0u64; 6];
        for (u, v) in [(2, 3), (2, 4), (3, 4)] {
            adj[pair_slot(4, u, v) - 1] = 1;
        }
        let p = SubsetProblem::triangle(4, adj).unwrap();
        let sol = p.brute_force_canonical(&IndexSet::full(6)).unwrap();
        let verts: BTreeSet<usize> = sol
            .indices
            .iter()
            .flat_map(|&s| {
                let (u, v) = slot_pair(4, s);
                [u, v]
            })
            .collect();
        assert_eq!(verts, BTreeSet::from([2, 3, 4]));
    }

    #[test]
    fn three_slots_sharing_vertices_without_a_triangle_fail_verify() {
        // star slots (1,2) (1,3) (1,4) cover 4 vertices, not a triangle
        let slots = [
            pair_slot(4, 1, 2),
            pair_slot(4, 1, 3),
            pair_slot(4, 1, 4),
        ];
        let p = SubsetProblem::triangle(4, vec![1; 6]).unwrap();
        let mut idx = slots.to_vec();
        idx.sort_unstable();
        assert!(!p.verify(&[1, 1, 1], &idx));
    }

    #[test]
    fn verify_rejects_malformed_claims() {
        let p = SubsetProblem::ksum(vec![1, 2, 3], 2, 5).unwrap();
        assert!(p.verify(&[2, 3], &[2, 3]));
        assert!(!p.verify(&[3, 2], &[3, 2])); // indices must ascend
        assert!(!p.verify(&[2, 3], &[2, 2])); // distinct
        assert!(!p.verify(&[2, 3], &[2, 4])); // in range
        assert!(!p.verify(&[2, 3, 0], &[1, 2, 3])); // arity
        assert!(!p.verify(&[2, 2], &[2, 3])); // wrong sum
    }

    #[test]
    fn restriction_solutions_are_the_filtered_full_solutions() {
        let mut rng = trial_rng(60, 0, 0);
        for t in 0..60 {
            let problem = match t % 4 {
                0 => random_ksum(8, 2, 6, t % 8 < 6, &mut rng),
                1 => random_kdistinct(8, 3, 4, true, &mut rng),
                2 => random_graph_collision(7, 0.4, true, &mut rng),
                _ => random_triangle(5, 0.5, true, &mut rng),
            };
            let n = problem.ground_size();
            let full: Vec<SubsetSolution> = problem.brute_force_all(&IndexSet::full(n));
            for _ in 0..6 {
                let members: Vec<usize> =
                    (1..=n).filter(|_| rand::Rng::gen_bool(&mut rng, 0.6)).collect();
                let domain = IndexSet::new(members).unwrap();
                let restricted = problem.brute_force_all(&domain);
                let filtered: Vec<&SubsetSolution> = full
                    .iter()
                    .filter(|s| s.indices.iter().all(|&i| domain.contains(i)))
                    .collect();
                assert_eq!(restricted.len(), filtered.len());
                for (a, b) in restricted.iter().zip(filtered) {
                    assert_eq!(a, b);
                }
            }
        }
    }

    #[test]
    fn planted_generators_always_have_solutions() {
        let mut rng = trial_rng(61, 0, 0);
        for t in 0..200u64 {
            let problem = match t % 4 {
                0 => random_ksum(10, 2, 9, true, &mut rng),
                1 => random_kdistinct(10, 3, 6, true, &mut rng),
                2 => random_graph_collision(8, 0.3, true, &mut rng),
                _ => random_triangle(6, 0.3, true, &mut rng),
            };
            let n = problem.ground_size();
            assert!(
                problem.brute_force_canonical(&IndexSet::full(n)).is_some(),
                "unplanted at trial {t}"
            );
        }
    }

    #[test]
    fn tuple_search_finds_a_unique_pair() {
        // |I| = 8, k = 2, one solution; success well above 2/3
        let p = SubsetProblem::ksum(vec![9, 1, 9, 9, 9, 4, 9, 9], 2, 5).unwrap();
        let domain = IndexSet::full(8);
        let mut hits = 0u64;
        let trials = 400u64;
        for t in 0..trials {
            let mut rng = trial_rng(62, 0, t);
            let oracle = p.oracle();
            if let Some(sol) = grover_subset_solver(&p, &oracle, &domain, &mut rng) {
                assert_eq!(sol.indices, vec![2, 6]);
                assert_eq!(sol.values, vec![1, 4]);
                hits += 1;
            }
            assert_eq!(oracle.quantum_queries() % 2, 0);
            assert!(oracle.total_queries() <= 2 * grover::search_budget(28));
        }
        assert!(3 * hits >= 2 * trials, "hits {hits}/{trials}");
    }

    #[test]
    fn tuple_search_is_one_sided() {
        let mut rng = trial_rng(63, 0, 0);
        for t in 0..150u64 {
            let problem = match t % 4 {
                0 => random_ksum(9, 2, 5, t % 2 == 0, &mut rng),
                1 => random_kdistinct(9, 2, 9, false, &mut rng),
                2 => random_graph_collision(7, 0.3, false, &mut rng),
                _ => random_triangle(5, 0.4, false, &mut rng),
            };
            let n = problem.ground_size();
            let members: Vec<usize> = (1..=n).filter(|_| rand::Rng::gen_bool(&mut rng, 0.7)).collect();
            if members.len() < problem.k() {
                continue;
            }
            let domain = IndexSet::new(members).unwrap();
            let oracle = problem.oracle();
            if let Some(sol) = grover_subset_solver(&problem, &oracle, &domain, &mut rng) {
                assert!(problem.verify(&sol.values, &sol.indices));
                assert!(sol.indices.iter().all(|&i| domain.contains(i)));
                // claimed values match the hidden sequence
                for (&i, &v) in sol.indices.iter().zip(&sol.values) {
                    assert_eq!(problem.values().get(i).unwrap(), v);
                }
            }
        }
    }

    #[test]
    fn tuple_search_on_empty_restriction_returns_none() {
        let p = SubsetProblem::ksum(vec![1, 2, 3, 4], 2, 100).unwrap();
        let domain = IndexSet::full(4);
        for t in 0..120u64 {
            let mut rng = trial_rng(64, 0, t);
            let oracle = p.oracle();
            assert!(grover_subset_solver(&p, &oracle, &domain, &mut rng).is_none());
        }
        // domain smaller than the arity: no tuples at all
        let mut rng = trial_rng(64, 1, 0);
        let oracle = p.oracle();
        let tiny = IndexSet::new(vec![2]).unwrap();
        assert!(grover_subset_solver(&p, &oracle, &tiny, &mut rng).is_none());
        assert_eq!(oracle.total_queries(), 0);
    }

    #[test]
    fn tuple_search_success_rate_with_scattered_solutions() {
        // several solutions: success rate should be high
        let mut rng = trial_rng(65, 0, 0);
        let p = random_kdistinct(10, 2, 3, true, &mut rng);
        let domain = IndexSet::full(10);
        let expected = p.brute_force_all(&domain);
        assert!(!expected.is_empty());
        let trials = 300u64;
        let mut hits = 0u64;
        for t in 0..trials {
            let mut rng = trial_rng(65, 1, t);
            let oracle = p.oracle();
            if grover_subset_solver(&p, &oracle, &domain, &mut rng).is_some() {
                hits += 1;
            }
        }
        assert!(3 * hits >= 2 * trials, "hits {hits}/{trials}");
    }
}
