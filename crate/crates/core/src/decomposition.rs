//! Path decompositions, linear vertex orders and module-width.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::{Edge, Graph, VertexId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecompositionError {
    #[error("decomposition has no bags")]
    Empty,
    #[error("invalid decomposition: {0}")]
    Invalid(PdViolation),
    #[error("order is not a permutation of the vertex set: {0}")]
    MalformedOrder(String),
    #[error("prefix length {index} out of range 1..={n}")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("infeasible generator parameters: {0}")]
    InfeasibleParameters(String),
}

/// First violated axiom found by [`validate_pd`]. Bag indices are 1-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PdViolation {
    UnknownVertex { bag: usize, vertex: VertexId },
    VertexUncovered { vertex: VertexId },
    EdgeUncovered { edge: Edge },
    /// `vertex` occurs in bags `before` and `after` but not in `gap`.
    NotContiguous { vertex: VertexId, before: usize, gap: usize, after: usize },
}

impl fmt::Display for PdViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PdViolation::UnknownVertex { bag, vertex } => {
                write!(f, "bag {bag} contains unknown vertex {vertex}")
            }
            PdViolation::VertexUncovered { vertex } => write!(f, "vertex {vertex} uncovered"),
            PdViolation::EdgeUncovered { edge } => write!(f, "edge {edge} uncovered"),
            PdViolation::NotContiguous { vertex, before, gap, after } => write!(
                f,
                "vertex {vertex} in bags {before} and {after} but absent from bag {gap}"
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PathDecomposition {
    bags: Vec<BTreeSet<VertexId>>,
}

impl PathDecomposition {
    pub fn new(bags: Vec<BTreeSet<VertexId>>) -> Self {
        PathDecomposition { bags }
    }

    pub fn from_slices(bags: &[&[VertexId]]) -> Self {
        Self::new(bags.iter().map(|b| b.iter().copied().collect()).collect())
    }

    pub fn bags(&self) -> &[BTreeSet<VertexId>] {
        &self.bags
    }

    pub fn len(&self) -> usize {
        self.bags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bags.is_empty()
    }

    pub fn max_bag_size(&self) -> usize {
        self.bags.iter().map(BTreeSet::len).max().unwrap_or(0)
    }

    /// 0-based index of the leftmost bag containing each vertex.
    pub fn leftmost_bags(&self) -> BTreeMap<VertexId, usize> {
        let mut first = BTreeMap::new();
        for (i, bag) in self.bags.iter().enumerate() {
            for &v in bag {
                first.entry(v).or_insert(i);
            }
        }
        first
    }

    /// 0-based index of the leftmost bag containing both endpoints.
    pub fn leftmost_bag_with_edge(&self, e: Edge) -> Option<usize> {
        self.bags
            .iter()
            .position(|b| b.contains(&e.lo()) && b.contains(&e.hi()))
    }
}

pub fn validate_pd(g: &Graph, pd: &PathDecomposition) -> Result<(), PdViolation> {
    for (i, bag) in pd.bags.iter().enumerate() {
        if let Some(&v) = bag.iter().find(|&&v| !g.contains_vertex(v)) {
            return Err(PdViolation::UnknownVertex { bag: i + 1, vertex: v });
        }
    }
    let first = pd.leftmost_bags();
    if let Some(v) = g.vertices().find(|v| !first.contains_key(v)) {
        return Err(PdViolation::VertexUncovered { vertex: v });
    }
    for e in g.edges() {
        if pd.leftmost_bag_with_edge(e).is_none() {
            return Err(PdViolation::EdgeUncovered { edge: e });
        }
    }
    // Each vertex must occupy one run of consecutive bags.
    let mut last_seen: BTreeMap<VertexId, usize> = BTreeMap::new();
    for (i, bag) in pd.bags.iter().enumerate() {
        for &v in bag {
            if let Some(&prev) = last_seen.get(&v) {
                if prev + 1 != i {
                    return Err(PdViolation::NotContiguous {
                        vertex: v,
                        before: prev + 1,
                        gap: prev + 2,
                        after: i + 1,
                    });
                }
            }
            last_seen.insert(v, i);
        }
    }
    Ok(())
}

/// Largest bag size minus one. A decomposition whose bags are all empty has
/// width 0.
pub fn pd_width(pd: &PathDecomposition) -> Result<usize, DecompositionError> {
    if pd.is_empty() {
        return Err(DecompositionError::Empty);
    }
    Ok(pd.max_bag_size().saturating_sub(1))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearOrder {
    seq: Vec<VertexId>,
    position: BTreeMap<VertexId, usize>,
}

impl LinearOrder {
    pub fn new(g: &Graph, seq: Vec<VertexId>) -> Result<Self, DecompositionError> {
        let mut position = BTreeMap::new();
        for (i, &v) in seq.iter().enumerate() {
            if !g.contains_vertex(v) {
                return Err(DecompositionError::MalformedOrder(format!("unknown vertex {v}")));
            }
            if position.insert(v, i).is_some() {
                return Err(DecompositionError::MalformedOrder(format!("vertex {v} repeated")));
            }
        }
        if seq.len() != g.vertex_count() {
            let missing = g.vertices().find(|v| !position.contains_key(v)).unwrap();
            return Err(DecompositionError::MalformedOrder(format!("vertex {missing} missing")));
        }
        Ok(LinearOrder { seq, position })
    }

    pub fn as_slice(&self) -> &[VertexId] {
        &self.seq
    }

    pub fn len(&self) -> usize {
        self.seq.len()
    }

    pub fn is_empty(&self) -> bool {
        self.seq.is_empty()
    }

    fn position(&self, v: VertexId) -> usize {
        self.position[&v]
    }
}

/// Orders vertices by the index of their leftmost bag, breaking ties by id.
/// The resulting order has module-width at most `pd_width(pd) + 2`.
pub fn pd_to_linear_order(
    g: &Graph,
    pd: &PathDecomposition,
) -> Result<LinearOrder, DecompositionError> {
    validate_pd(g, pd).map_err(DecompositionError::Invalid)?;
    let first = pd.leftmost_bags();
    let mut seq: Vec<VertexId> = g.vertices().collect();
    seq.sort_by_key(|v| (first[v], *v));
    LinearOrder::new(g, seq)
}

/// Number of classes of the prefix `{v_1..v_i}` under "same neighbors
/// outside the prefix".
pub fn module_number(g: &Graph, order: &LinearOrder, i: usize) -> Result<usize, DecompositionError> {
    let n = order.len();
    if i == 0 || i > n {
        return Err(DecompositionError::IndexOutOfRange { index: i, n });
    }
    let signatures: BTreeSet<Vec<VertexId>> = order.seq[..i]
        .iter()
        .map(|&v| {
            g.neighbors(v)
                .expect("order vertices belong to g")
                .iter()
                .copied()
                .filter(|&w| order.position(w) >= i)
                .collect()
        })
        .collect();
    Ok(signatures.len())
}

pub fn module_width(g: &Graph, order: &LinearOrder) -> Result<usize, DecompositionError> {
    if order.len() != g.vertex_count() || g.vertices().any(|v| !order.position.contains_key(&v)) {
        return Err(DecompositionError::MalformedOrder("order does not match graph".into()));
    }
    let mut best = 0;
    for i in 1..=order.len() {
        best = best.max(module_number(g, order, i)?);
    }
    Ok(best)
}

/// Vertex-separation decomposition of an order: bag `i` holds `v_i` and every
/// earlier vertex with a neighbor at position `i` or later.
pub fn pd_from_order(g: &Graph, order: &LinearOrder) -> PathDecomposition {
    let last_nbr: Vec<usize> = order
        .seq
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            g.neighbors(v)
                .expect("order vertices belong to g")
                .iter()
                .map(|&w| order.position(w))
                .fold(i, usize::max)
        })
        .collect();
    let bags = (0..order.len())
        .map(|i| {
            (0..=i)
                .filter(|&j| j == i || last_nbr[j] >= i)
                .map(|j| order.seq[j])
                .collect()
        })
        .collect();
    PathDecomposition::new(bags)
}

/// Samples a connected graph on `1..=n` together with a path decomposition of
/// width at most `w`. Bags are the windows of `w + 1` consecutive vertices of a
/// random vertex sequence; consecutive vertices of the sequence are always
/// joined, and every other pair sharing a window is joined with probability
/// `density`.
pub fn gen_pd_graph(
    seed: u64,
    n: usize,
    w: usize,
    density: f64,
) -> Result<(Graph, PathDecomposition), DecompositionError> {
    if w < 1 || w >= n {
        return Err(DecompositionError::InfeasibleParameters(format!(
            "need 1 <= w < n, got n={n} w={w}"
        )));
    }
    if !(0.0..=1.0).contains(&density) {
        return Err(DecompositionError::InfeasibleParameters(format!(
            "density {density} outside [0, 1]"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seq: Vec<VertexId> = (1..=n as VertexId).collect();
    seq.shuffle(&mut rng);

    let mut g = Graph::with_vertices(n as u32);
    for pair in seq.windows(2) {
        g.add_edge(pair[0], pair[1]).expect("path edges are distinct");
    }
    for i in 0..n {
        for j in i + 2..=(i + w).min(n - 1) {
            if rng.gen_bool(density) {
                g.add_edge(seq[i], seq[j]).expect("window pairs are distinct");
            }
        }
    }
    let bags = seq.windows(w + 1).map(|win| win.iter().copied().collect()).collect();
    Ok((g, PathDecomposition::new(bags)))
}

#[cfg(test)]
mod tests {
    use super::*;

    const A: VertexId = 1;
    const B: VertexId = 2;
    const C: VertexId = 3;

    fn p3() -> Graph {
        Graph::from_edges([A, B, C], [(A, B), (B, C)]).unwrap()
    }

    #[test]
    fn validates_p3() {
        let g = p3();
        assert_eq!(validate_pd(&g, &PathDecomposition::from_slices(&[&[A, B], &[B, C]])), Ok(()));
        let bad = PathDecomposition::from_slices(&[&[A, B], &[C]]);
        let err = validate_pd(&g, &bad).unwrap_err();
        assert_eq!(err, PdViolation::EdgeUncovered { edge: Edge::new(B, C) });
        assert_eq!(err.to_string(), "edge {2,3} uncovered");
    }

    #[test]
    fn detects_interval_gap() {
        let g = Graph::from_edges([A, B, C], [(A, B), (A, C)]).unwrap();
        let pd = PathDecomposition::from_slices(&[&[A, B], &[B], &[A, C]]);
        assert_eq!(
            validate_pd(&g, &pd),
            Err(PdViolation::NotContiguous { vertex: A, before: 1, gap: 2, after: 3 })
        );
    }

    #[test]
    fn detects_uncovered_and_unknown_vertices() {
        let g = p3();
        let pd = PathDecomposition::from_slices(&[&[A, B]]);
        assert_eq!(validate_pd(&g, &pd), Err(PdViolation::VertexUncovered { vertex: C }));
        let pd = PathDecomposition::from_slices(&[&[A, B, C, 9]]);
        assert_eq!(validate_pd(&g, &pd), Err(PdViolation::UnknownVertex { bag: 1, vertex: 9 }));
    }

    #[test]
    fn widths() {
        assert_eq!(pd_width(&PathDecomposition::from_slices(&[&[A, B], &[B, C]])), Ok(1));
        assert_eq!(pd_width(&PathDecomposition::from_slices(&[&[A, B, C]])), Ok(2));
        assert_eq!(pd_width(&PathDecomposition::from_slices(&[&[A]])), Ok(0));
        assert_eq!(pd_width(&PathDecomposition::default()), Err(DecompositionError::Empty));
    }

    #[test]
    fn linear_order_from_pd() {
        let g = p3();
        let pd = PathDecomposition::from_slices(&[&[A, B], &[B, C]]);
        let order = pd_to_linear_order(&g, &pd).unwrap();
        assert_eq!(order.as_slice(), &[A, B, C]);
        assert_eq!(module_width(&g, &order), Ok(2));

        let single = PathDecomposition::from_slices(&[&[C, A, B]]);
        assert_eq!(pd_to_linear_order(&g, &single).unwrap().as_slice(), &[A, B, C]);

        let bad = PathDecomposition::from_slices(&[&[A, B], &[C]]);
        assert!(matches!(pd_to_linear_order(&g, &bad), Err(DecompositionError::Invalid(_))));
    }

    #[test]
    fn module_numbers_of_p3() {
        let g = p3();
        let order = LinearOrder::new(&g, vec![A, B, C]).unwrap();
        assert_eq!(module_number(&g, &order, 1), Ok(1));
        assert_eq!(module_number(&g, &order, 2), Ok(2));
        assert_eq!(module_number(&g, &order, 3), Ok(1));
        assert_eq!(
            module_number(&g, &order, 4),
            Err(DecompositionError::IndexOutOfRange { index: 4, n: 3 })
        );
        assert!(module_number(&g, &order, 0).is_err());
    }

    #[test]
    fn module_width_simple_families() {
        let edgeless = Graph::with_vertices(5);
        let order = LinearOrder::new(&edgeless, vec![3, 1, 5, 2, 4]).unwrap();
        assert_eq!(module_width(&edgeless, &order), Ok(1));

        let k4 = Graph::from_edges(1..=4, [(1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)]).unwrap();
        let order = LinearOrder::new(&k4, vec![2, 4, 1, 3]).unwrap();
        assert_eq!(module_width(&k4, &order), Ok(1));
    }

    #[test]
    fn malformed_orders() {
        let g = p3();
        assert!(LinearOrder::new(&g, vec![A, B]).is_err());
        assert!(LinearOrder::new(&g, vec![A, B, B]).is_err());
        assert!(LinearOrder::new(&g, vec![A, B, 7]).is_err());
    }

    #[test]
    fn generator_shapes() {
        let (g, pd) = gen_pd_graph(1, 5, 1, 1.0).unwrap();
        assert_eq!(validate_pd(&g, &pd), Ok(()));
        assert_eq!(g.edge_count(), 4);
        assert!(g.vertices().all(|v| g.degree(v).unwrap() <= 2));

        for seed in 0..5 {
            let (g, pd) = gen_pd_graph(seed, 6, 5, 1.0).unwrap();
            assert_eq!(pd.len(), 1);
            assert_eq!(g.edge_count(), 15);
        }
        assert!(gen_pd_graph(0, 4, 4, 0.5).is_err());
        assert!(gen_pd_graph(0, 4, 0, 0.5).is_err());
        assert!(gen_pd_graph(0, 4, 2, 1.5).is_err());
    }

    #[test]
    fn generator_is_deterministic() {
        assert_eq!(gen_pd_graph(7, 12, 3, 0.4), gen_pd_graph(7, 12, 3, 0.4));
    }

    #[test]
    fn order_decomposition_is_valid() {
        let g = p3();
        let order = LinearOrder::new(&g, vec![A, C, B]).unwrap();
        let pd = pd_from_order(&g, &order);
        assert_eq!(pd, PathDecomposition::from_slices(&[&[A], &[A, C], &[A, B, C]]));
        for seed in 0..10 {
            let (g, pd) = gen_pd_graph(seed, 10, 3, 0.5).unwrap();
            let order = pd_to_linear_order(&g, &pd).unwrap();
            let lifted = pd_from_order(&g, &order);
            assert_eq!(validate_pd(&g, &lifted), Ok(()));
        }
    }
}
