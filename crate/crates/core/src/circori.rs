//! Circulating orientations of edge-weighted graphs: the source problem of the
//! reduction.
//!
//! An orientation is circulating when at every vertex the weight on outgoing
//! arcs equals the weight on incoming arcs. Since in- and out-weight add up to
//! `W_v`, both must equal `W_v / 2`; this forces every `W_v` to be even and
//! drives the pruning of the exhaustive solver.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::{Arc, Edge, Graph, GraphError, Orientation, VertexId};

/// Default cap on the total weight. Weights are unary-encoded in the problem
/// statement, so the sum bounds the input size.
pub const DEFAULT_WEIGHT_CAP: u64 = 10_000;
/// Default cap on the number of edges for [`solve_circori_brute`].
pub const DEFAULT_EDGE_CAP: usize = 24;

const GENERATOR_RETRIES: usize = 200;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CircOriError {
    #[error("edge {0} has weight 0")]
    ZeroWeight(Edge),
    #[error("edge {0} has no weight")]
    MissingWeight(Edge),
    #[error("weight given for non-edge {0}")]
    UnknownEdge(Edge),
    #[error("total weight {total} exceeds cap {cap}")]
    WeightCapExceeded { total: u64, cap: u64 },
    #[error("{m} edges exceeds solver cap {cap}")]
    EdgeCapExceeded { m: usize, cap: usize },
    #[error("infeasible generator parameters: {0}")]
    Infeasible(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CircOriInstance {
    graph: Graph,
    weights: BTreeMap<Edge, u64>,
}

impl CircOriInstance {
    pub fn new(graph: Graph, weights: BTreeMap<Edge, u64>) -> Result<Self, CircOriError> {
        Self::with_cap(graph, weights, DEFAULT_WEIGHT_CAP)
    }

    pub fn with_cap(
        graph: Graph,
        weights: BTreeMap<Edge, u64>,
        cap: u64,
    ) -> Result<Self, CircOriError> {
        if let Some(&e) = weights.keys().find(|e| !graph.has_edge(e.lo(), e.hi())) {
            return Err(CircOriError::UnknownEdge(e));
        }
        for e in graph.edges() {
            match weights.get(&e) {
                None => return Err(CircOriError::MissingWeight(e)),
                Some(0) => return Err(CircOriError::ZeroWeight(e)),
                Some(_) => {}
            }
        }
        let total: u64 = weights.values().sum();
        if total > cap {
            return Err(CircOriError::WeightCapExceeded { total, cap });
        }
        Ok(CircOriInstance { graph, weights })
    }

    /// Builds an instance from `(u, v, weight)` triples over the given vertices.
    pub fn from_weighted_edges(
        vertices: impl IntoIterator<Item = VertexId>,
        edges: impl IntoIterator<Item = (VertexId, VertexId, u64)>,
    ) -> Result<Self, CircOriError> {
        let mut graph = Graph::new();
        for v in vertices {
            graph.add_vertex(v)?;
        }
        let mut weights = BTreeMap::new();
        for (u, v, w) in edges {
            graph.add_edge(u, v)?;
            weights.insert(Edge::new(u, v), w);
        }
        Self::new(graph, weights)
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn weight(&self, e: Edge) -> Option<u64> {
        self.weights.get(&e).copied()
    }

    /// `(edge, weight)` pairs in ascending edge order.
    pub fn weighted_edges(&self) -> impl Iterator<Item = (Edge, u64)> + '_ {
        self.weights.iter().map(|(&e, &w)| (e, w))
    }

    /// `W_v`: total weight of the edges at `v`.
    pub fn vertex_weight(&self, v: VertexId) -> Result<u64, CircOriError> {
        let n = self.graph.neighbors(v)?;
        Ok(n.iter().map(|&u| self.weights[&Edge::new(u, v)]).sum())
    }

    /// `W`: total edge weight.
    pub fn total_weight(&self) -> u64 {
        self.weights.values().sum()
    }

    pub fn is_circulating(&self, o: &Orientation) -> Result<bool, CircOriError> {
        if !o.matches(&self.graph) {
            return Err(GraphError::OrientationMismatch("orientation/edge-set mismatch".into()).into());
        }
        let mut balance: BTreeMap<VertexId, i64> = BTreeMap::new();
        for a in o.arcs() {
            let w = self.weights[&a.edge()] as i64;
            *balance.entry(a.tail).or_default() += w;
            *balance.entry(a.head).or_default() -= w;
        }
        Ok(balance.values().all(|&b| b == 0))
    }

    /// Necessary condition for a circulating orientation: every `W_v` is even.
    pub fn parity_feasible(&self) -> bool {
        self.graph
            .vertices()
            .all(|v| self.vertex_weight(v).unwrap() % 2 == 0)
    }
}

pub fn solve_circori_brute(inst: &CircOriInstance) -> Result<Option<Orientation>, CircOriError> {
    solve_circori_brute_with_cap(inst, DEFAULT_EDGE_CAP)
}

/// Depth-first search over the edges in ascending order, trying `lo -> hi`
/// before `hi -> lo`. A branch dies as soon as some vertex has committed more
/// than `W_v / 2` of out- or in-weight.
pub fn solve_circori_brute_with_cap(
    inst: &CircOriInstance,
    cap: usize,
) -> Result<Option<Orientation>, CircOriError> {
    let m = inst.graph.edge_count();
    if m > cap {
        return Err(CircOriError::EdgeCapExceeded { m, cap });
    }
    if !inst.parity_feasible() {
        return Ok(None);
    }
    let index: BTreeMap<VertexId, usize> = inst.graph.vertices().zip(0..).collect();
    let half: Vec<u64> = inst
        .graph
        .vertices()
        .map(|v| inst.vertex_weight(v).unwrap() / 2)
        .collect();
    let edges: Vec<(usize, usize, u64)> = inst
        .weighted_edges()
        .map(|(e, w)| (index[&e.lo()], index[&e.hi()], w))
        .collect();

    struct Search<'a> {
        edges: &'a [(usize, usize, u64)],
        half: &'a [u64],
        out: Vec<u64>,
        inw: Vec<u64>,
        forward: Vec<bool>,
    }

    impl Search<'_> {
        fn run(&mut self, i: usize) -> bool {
            let Some(&(lo, hi, w)) = self.edges.get(i) else {
                return true;
            };
            for (forward, tail, head) in [(true, lo, hi), (false, hi, lo)] {
                if self.out[tail] + w <= self.half[tail] && self.inw[head] + w <= self.half[head] {
                    self.out[tail] += w;
                    self.inw[head] += w;
                    self.forward[i] = forward;
                    if self.run(i + 1) {
                        return true;
                    }
                    self.out[tail] -= w;
                    self.inw[head] -= w;
                }
            }
            false
        }
    }

    let n = index.len();
    let mut search = Search {
        edges: &edges,
        half: &half,
        out: vec![0; n],
        inw: vec![0; n],
        forward: vec![false; m],
    };
    if !search.run(0) {
        return Ok(None);
    }
    let arcs = inst
        .weighted_edges()
        .zip(&search.forward)
        .map(|((e, _), &fwd)| {
            let a = Arc::new(e.lo(), e.hi());
            (e, if fwd { a } else { a.reversed() })
        })
        .collect();
    Ok(Some(Orientation::from_map_unchecked(arcs)))
}

/// Instance with a planted circulating orientation.
///
/// Superposes `cycle_count` directed cycles with random flow in
/// `1..=wmax`; the first cycle is Hamiltonian so every vertex is covered.
/// Opposite flows on the same pair cancel, and pairs with nonzero net flow
/// become edges weighted by the net flow and oriented along it. A sum of
/// cycle flows is balanced everywhere, so the returned orientation circulates.
/// Draws that come out disconnected after cancellation are redrawn.
pub fn gen_yes_instance(
    seed: u64,
    n: usize,
    cycle_count: usize,
    wmax: u64,
) -> Result<(CircOriInstance, Orientation), CircOriError> {
    if n < 3 || cycle_count < 1 || wmax < 1 {
        return Err(CircOriError::Infeasible(format!(
            "need n >= 3, cycles >= 1, wmax >= 1; got n={n} cycles={cycle_count} wmax={wmax}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let all: Vec<VertexId> = (1..=n as VertexId).collect();
    for _ in 0..GENERATOR_RETRIES {
        let mut flow: BTreeMap<(VertexId, VertexId), i64> = BTreeMap::new();
        for c in 0..cycle_count {
            let mut cycle = all.clone();
            cycle.shuffle(&mut rng);
            if c > 0 {
                cycle.truncate(rng.gen_range(3..=n));
            }
            let w = rng.gen_range(1..=wmax) as i64;
            for i in 0..cycle.len() {
                let (a, b) = (cycle[i], cycle[(i + 1) % cycle.len()]);
                let sign = if a < b { 1 } else { -1 };
                *flow.entry((a.min(b), a.max(b))).or_default() += sign * w;
            }
        }
        let mut graph = Graph::with_vertices(n as u32);
        let mut weights = BTreeMap::new();
        let mut arcs = Vec::new();
        for (&(lo, hi), &f) in flow.iter().filter(|(_, &f)| f != 0) {
            graph.add_edge(lo, hi)?;
            weights.insert(Edge::new(lo, hi), f.unsigned_abs());
            arcs.push(if f > 0 { Arc::new(lo, hi) } else { Arc::new(hi, lo) });
        }
        if !graph.is_connected() {
            continue;
        }
        let orientation = Orientation::new(&graph, arcs)?;
        return Ok((CircOriInstance::new(graph, weights)?, orientation));
    }
    Err(CircOriError::Infeasible(format!(
        "no connected draw after {GENERATOR_RETRIES} retries"
    )))
}

/// Connected instance on `1..=n` with `m` edges and weights uniform in
/// `1..=wmax`: a random spanning tree plus uniformly chosen extra edges.
pub fn gen_random_instance(
    seed: u64,
    n: usize,
    m: usize,
    wmax: u64,
) -> Result<CircOriInstance, CircOriError> {
    let max_m = n * n.saturating_sub(1) / 2;
    if n == 0 || wmax < 1 || m + 1 < n || m > max_m {
        return Err(CircOriError::Infeasible(format!(
            "need n >= 1, wmax >= 1, n-1 <= m <= {max_m}; got n={n} m={m} wmax={wmax}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<VertexId> = (1..=n as VertexId).collect();
    order.shuffle(&mut rng);
    let mut graph = Graph::with_vertices(n as u32);
    for i in 1..n {
        let parent = order[rng.gen_range(0..i)];
        graph.add_edge(order[i], parent)?;
    }
    let mut rest: Vec<(VertexId, VertexId)> = (1..=n as VertexId)
        .flat_map(|u| (u + 1..=n as VertexId).map(move |v| (u, v)))
        .filter(|&(u, v)| !graph.has_edge(u, v))
        .collect();
    rest.shuffle(&mut rng);
    for &(u, v) in rest.iter().take(m - (n - 1)) {
        graph.add_edge(u, v)?;
    }
    let weights = graph.edges().map(|e| (e, rng.gen_range(1..=wmax))).collect();
    CircOriInstance::new(graph, weights)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle(w: [u64; 3]) -> CircOriInstance {
        CircOriInstance::from_weighted_edges(1..=3, [(1, 2, w[0]), (2, 3, w[1]), (1, 3, w[2])])
            .unwrap()
    }

    fn single_edge(w: u64) -> CircOriInstance {
        CircOriInstance::from_weighted_edges(1..=2, [(1, 2, w)]).unwrap()
    }

    fn orient(inst: &CircOriInstance, arcs: &[(VertexId, VertexId)]) -> Orientation {
        Orientation::new(inst.graph(), arcs.iter().map(|&(t, h)| Arc::new(t, h))).unwrap()
    }

    #[test]
    fn weights() {
        let t = triangle([2, 2, 2]);
        assert_eq!(t.vertex_weight(1), Ok(4));
        assert_eq!(t.total_weight(), 6);
        let e = single_edge(3);
        assert_eq!(e.vertex_weight(1), Ok(3));
        assert_eq!(e.vertex_weight(2), Ok(3));
        let iso = CircOriInstance::from_weighted_edges([1], []).unwrap();
        assert_eq!(iso.vertex_weight(1), Ok(0));
        assert_eq!(iso.total_weight(), 0);
        assert_eq!(single_edge(1).total_weight(), 1);
        assert!(t.vertex_weight(4).is_err());
    }

    #[test]
    fn rejects_bad_weights() {
        let g = Graph::from_edges(1..=2, [(1, 2)]).unwrap();
        let zero = BTreeMap::from([(Edge::new(1, 2), 0)]);
        assert_eq!(
            CircOriInstance::new(g.clone(), zero),
            Err(CircOriError::ZeroWeight(Edge::new(1, 2)))
        );
        assert!(matches!(
            CircOriInstance::new(g.clone(), BTreeMap::new()),
            Err(CircOriError::MissingWeight(_))
        ));
        let big = BTreeMap::from([(Edge::new(1, 2), 50)]);
        assert_eq!(
            CircOriInstance::with_cap(g, big, 10),
            Err(CircOriError::WeightCapExceeded { total: 50, cap: 10 })
        );
    }

    #[test]
    fn circulation_check() {
        let t = triangle([2, 2, 2]);
        assert_eq!(t.is_circulating(&orient(&t, &[(1, 2), (2, 3), (3, 1)])), Ok(true));
        assert_eq!(t.is_circulating(&orient(&t, &[(1, 2), (3, 2), (1, 3)])), Ok(false));
        let e = single_edge(2);
        assert_eq!(e.is_circulating(&orient(&e, &[(1, 2)])), Ok(false));
        assert_eq!(e.is_circulating(&orient(&e, &[(2, 1)])), Ok(false));
        let other = Orientation::new(t.graph(), [Arc::new(1, 2), Arc::new(2, 3), Arc::new(3, 1)]).unwrap();
        assert!(e.is_circulating(&other).is_err());
    }

    #[test]
    fn parity() {
        assert!(triangle([2, 2, 2]).parity_feasible());
        assert!(!triangle([1, 1, 2]).parity_feasible());
        assert!(single_edge(2).parity_feasible());
        assert_eq!(solve_circori_brute(&single_edge(2)), Ok(None));
    }

    #[test]
    fn brute_solver_examples() {
        let t = triangle([2, 2, 2]);
        let o = solve_circori_brute(&t).unwrap().unwrap();
        let arcs: Vec<_> = o.arcs().collect();
        assert_eq!(arcs, vec![Arc::new(1, 2), Arc::new(3, 1), Arc::new(2, 3)]);
        assert_eq!(t.is_circulating(&o), Ok(true));
        assert_eq!(solve_circori_brute(&single_edge(1)), Ok(None));
        assert_eq!(solve_circori_brute(&triangle([1, 1, 2])), Ok(None));
    }

    #[test]
    fn brute_solver_cap() {
        let inst = gen_random_instance(3, 8, 25, 2).unwrap();
        assert_eq!(
            solve_circori_brute(&inst),
            Err(CircOriError::EdgeCapExceeded { m: 25, cap: DEFAULT_EDGE_CAP })
        );
    }

    #[test]
    fn yes_generator() {
        let (inst, o) = gen_yes_instance(5, 3, 1, 2).unwrap();
        assert_eq!(inst.graph().edge_count(), 3);
        let ws: Vec<_> = inst.weighted_edges().map(|(_, w)| w).collect();
        assert!(ws.iter().all(|&w| w == ws[0]));
        assert_eq!(inst.is_circulating(&o), Ok(true));
        for seed in 0..30 {
            let (inst, o) = gen_yes_instance(seed, 3 + seed as usize % 5, 3, 2).unwrap();
            assert!(inst.graph().is_connected());
            assert!(inst.parity_feasible());
            assert_eq!(inst.is_circulating(&o), Ok(true));
            assert!(inst.weighted_edges().all(|(_, w)| (1..=6).contains(&w)));
            assert!(solve_circori_brute(&inst).unwrap().is_some());
        }
        assert!(gen_yes_instance(0, 2, 1, 1).is_err());
    }

    #[test]
    fn random_generator() {
        let inst = gen_random_instance(9, 4, 4, 3).unwrap();
        assert!(inst.graph().is_connected());
        assert_eq!(inst.graph().edge_count(), 4);
        assert!(inst.weighted_edges().all(|(_, w)| (1..=3).contains(&w)));
        // A tree has leaves, which have odd degree.
        let tree = gen_random_instance(1, 6, 5, 1).unwrap();
        assert!(!tree.parity_feasible());
        assert!(gen_random_instance(0, 4, 2, 1).is_err());
        assert!(gen_random_instance(0, 4, 7, 1).is_err());
        assert_eq!(gen_random_instance(4, 7, 10, 3), gen_random_instance(4, 7, 10, 3));
    }
}
