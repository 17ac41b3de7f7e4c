//! b-colorings: verification, b-vertex identification and an exhaustive
//! solver for small graphs.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::graph::{Edge, Graph, VertexId};

pub type Color = u32;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ColoringError {
    #[error("color count must be at least 1")]
    ZeroColors,
    #[error("vertex {0} has no color")]
    Missing(VertexId),
    #[error("vertex {vertex} has color {color}, outside 0..{k}")]
    OutOfRange { vertex: VertexId, color: Color, k: u32 },
    #[error("coloring mentions unknown vertex {0}")]
    UnknownVertex(VertexId),
    #[error("coloring is not proper: edge {0} is monochromatic")]
    Improper(Edge),
    #[error("instance exceeds solver budget (n={n}, k={k}; limits n<={max_n}, k<={max_k})")]
    BudgetExceeded { n: usize, k: u32, max_n: usize, max_k: u32 },
}

/// Reason a coloring fails to be a b-coloring.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BColDefect {
    Malformed(ColoringError),
    Monochromatic(Edge),
    NoBVertex(Color),
}

impl fmt::Display for BColDefect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BColDefect::Malformed(e) => write!(f, "malformed coloring: {e}"),
            BColDefect::Monochromatic(e) => write!(f, "edge {e} is monochromatic"),
            BColDefect::NoBVertex(c) => write!(f, "color {c} has no b-vertex"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BColInstance {
    pub graph: Graph,
    pub k: u32,
}

impl BColInstance {
    pub fn new(graph: Graph, k: u32) -> Result<Self, ColoringError> {
        if k == 0 {
            return Err(ColoringError::ZeroColors);
        }
        Ok(BColInstance { graph, k })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Coloring {
    colors: BTreeMap<VertexId, Color>,
}

impl Coloring {
    pub fn new(colors: BTreeMap<VertexId, Color>) -> Self {
        Coloring { colors }
    }

    pub fn get(&self, v: VertexId) -> Option<Color> {
        self.colors.get(&v).copied()
    }

    pub fn set(&mut self, v: VertexId, c: Color) {
        self.colors.insert(v, c);
    }

    pub fn iter(&self) -> impl Iterator<Item = (VertexId, Color)> + '_ {
        self.colors.iter().map(|(&v, &c)| (v, c))
    }

    pub fn len(&self) -> usize {
        self.colors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.colors.is_empty()
    }

    /// Applies `f` to every color.
    pub fn map_colors(&self, f: impl Fn(Color) -> Color) -> Coloring {
        Coloring::new(self.colors.iter().map(|(&v, &c)| (v, f(c))).collect())
    }

    /// Checks totality over `g` and the color range.
    pub fn check_total(&self, g: &Graph, k: u32) -> Result<(), ColoringError> {
        // Fast path: both key sets are sorted, so walk them in step.
        if self.colors.len() == g.vertex_count()
            && self.colors.iter().zip(g.vertices()).all(|((&u, &q), v)| u == v && q < k)
        {
            return Ok(());
        }
        for v in g.vertices() {
            match self.get(v) {
                None => return Err(ColoringError::Missing(v)),
                Some(c) if c >= k => return Err(ColoringError::OutOfRange { vertex: v, color: c, k }),
                Some(_) => {}
            }
        }
        if let Some(&v) = self.colors.keys().find(|&&v| !g.contains_vertex(v)) {
            return Err(ColoringError::UnknownVertex(v));
        }
        Ok(())
    }
}

impl FromIterator<(VertexId, Color)> for Coloring {
    fn from_iter<T: IntoIterator<Item = (VertexId, Color)>>(iter: T) -> Self {
        Coloring::new(iter.into_iter().collect())
    }
}

fn first_monochromatic(g: &Graph, c: &Coloring) -> Option<Edge> {
    g.edges().find(|e| c.get(e.lo()) == c.get(e.hi()))
}

pub fn is_proper(inst: &BColInstance, c: &Coloring) -> Result<bool, ColoringError> {
    c.check_total(&inst.graph, inst.k)?;
    Ok(first_monochromatic(&inst.graph, c).is_none())
}

/// Marks the colors seen around one vertex. Reused across vertices with a
/// generation stamp so no per-vertex allocation is needed.
pub(crate) struct ColorScratch {
    stamp: Vec<u32>,
    generation: u32,
}

impl ColorScratch {
    pub(crate) fn new(k: u32) -> Self {
        ColorScratch { stamp: vec![0; k as usize], generation: 0 }
    }

    /// Number of distinct colors on the neighbors of `v`, excluding `own`.
    pub(crate) fn foreign_colors(&mut self, g: &Graph, c: &Coloring, v: VertexId, own: Color) -> usize {
        self.generation += 1;
        let mut count = 0;
        for &w in g.neighbors(v).expect("vertex of g") {
            let cw = c.get(w).expect("total coloring");
            let slot = &mut self.stamp[cw as usize];
            if cw != own && *slot != self.generation {
                *slot = self.generation;
                count += 1;
            }
        }
        count
    }
}

/// Whether `v` sees every color other than its own. Assumes a total coloring.
pub(crate) fn is_b_vertex_with(
    scratch: &mut ColorScratch,
    inst: &BColInstance,
    c: &Coloring,
    v: VertexId,
) -> bool {
    let own = c.get(v).expect("total coloring");
    inst.graph.degree(v).unwrap() + 1 >= inst.k as usize
        && scratch.foreign_colors(&inst.graph, c, v, own) == inst.k as usize - 1
}

/// For every color, the vertices of that color adjacent to all other colors.
pub fn b_vertices(
    inst: &BColInstance,
    c: &Coloring,
) -> Result<BTreeMap<Color, BTreeSet<VertexId>>, ColoringError> {
    c.check_total(&inst.graph, inst.k)?;
    if let Some(e) = first_monochromatic(&inst.graph, c) {
        return Err(ColoringError::Improper(e));
    }
    let mut out: BTreeMap<Color, BTreeSet<VertexId>> = (0..inst.k).map(|q| (q, BTreeSet::new())).collect();
    let mut scratch = ColorScratch::new(inst.k);
    for v in inst.graph.vertices() {
        if is_b_vertex_with(&mut scratch, inst, c, v) {
            out.get_mut(&c.get(v).unwrap()).unwrap().insert(v);
        }
    }
    Ok(out)
}

pub fn check_b_coloring(inst: &BColInstance, c: &Coloring) -> Result<(), BColDefect> {
    c.check_total(&inst.graph, inst.k).map_err(BColDefect::Malformed)?;
    let g = &inst.graph;
    // Compact ids (always the case for generated and parsed graphs) get a
    // flat lookup table; this check runs in tight loops during testing.
    let max_id = g.vertices().next_back().unwrap_or(0) as usize;
    if max_id > 4 * g.vertex_count() + 64 {
        return check_b_coloring_sparse(inst, c);
    }
    let mut lut = vec![0; max_id + 1];
    for (v, q) in c.iter() {
        lut[v as usize] = q;
    }
    if let Some(e) = g.edges().find(|e| lut[e.lo() as usize] == lut[e.hi() as usize]) {
        return Err(BColDefect::Monochromatic(e));
    }
    let k = inst.k as usize;
    let mut covered = vec![false; k];
    let mut stamp = vec![0u32; k];
    let mut generation = 0;
    for v in g.vertices() {
        let own = lut[v as usize];
        let nbrs = g.neighbors(v).unwrap();
        if covered[own as usize] || nbrs.len() + 1 < k {
            continue;
        }
        generation += 1;
        let mut count = 0;
        for &w in nbrs {
            let q = lut[w as usize];
            if stamp[q as usize] != generation {
                stamp[q as usize] = generation;
                count += 1;
            }
        }
        if count == k - 1 {
            covered[own as usize] = true;
        }
    }
    match covered.iter().position(|&b| !b) {
        Some(q) => Err(BColDefect::NoBVertex(q as Color)),
        None => Ok(()),
    }
}

fn check_b_coloring_sparse(inst: &BColInstance, c: &Coloring) -> Result<(), BColDefect> {
    if let Some(e) = first_monochromatic(&inst.graph, c) {
        return Err(BColDefect::Monochromatic(e));
    }
    let mut covered = vec![false; inst.k as usize];
    let mut scratch = ColorScratch::new(inst.k);
    for v in inst.graph.vertices() {
        let own = c.get(v).unwrap() as usize;
        if !covered[own] && is_b_vertex_with(&mut scratch, inst, c, v) {
            covered[own] = true;
        }
    }
    match covered.iter().position(|&b| !b) {
        Some(q) => Err(BColDefect::NoBVertex(q as Color)),
        None => Ok(()),
    }
}

pub fn is_b_coloring(inst: &BColInstance, c: &Coloring) -> bool {
    check_b_coloring(inst, c).is_ok()
}

/// Limits for [`solve_bcol_brute`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    pub max_n: usize,
    pub max_k: u32,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { max_n: 12, max_k: 5 }
    }
}

pub fn solve_bcol_brute(inst: &BColInstance) -> Result<Option<Coloring>, ColoringError> {
    solve_bcol_brute_with_budget(inst, Budget::default())
}

/// Exhaustive search over colorings, vertices in ascending id, colors
/// ascending. A vertex may only use colors up to one more than the largest
/// color used so far, which removes color-permutation symmetry. Before
/// searching, gives up when fewer than `k` vertices have degree at least
/// `k - 1`, since every b-vertex needs that degree.
pub fn solve_bcol_brute_with_budget(
    inst: &BColInstance,
    budget: Budget,
) -> Result<Option<Coloring>, ColoringError> {
    let n = inst.graph.vertex_count();
    let k = inst.k;
    if n > budget.max_n || k > budget.max_k {
        return Err(ColoringError::BudgetExceeded { n, k, max_n: budget.max_n, max_k: budget.max_k });
    }
    if k as usize > n {
        return Ok(None);
    }
    let high_degree = inst
        .graph
        .vertices()
        .filter(|&v| inst.graph.degree(v).unwrap() + 1 >= k as usize)
        .count();
    if high_degree < k as usize {
        return Ok(None);
    }

    let ids: Vec<VertexId> = inst.graph.vertices().collect();
    let index: BTreeMap<VertexId, usize> = ids.iter().copied().zip(0..).collect();
    // Neighbors with a smaller index, the only ones colored when a vertex is reached.
    let earlier: Vec<Vec<usize>> = ids
        .iter()
        .map(|&v| {
            inst.graph.neighbors(v).unwrap().iter().map(|w| index[w]).filter(|&j| j < index[&v]).collect()
        })
        .collect();

    struct Search<'a> {
        inst: &'a BColInstance,
        ids: &'a [VertexId],
        earlier: &'a [Vec<usize>],
        colors: Vec<Color>,
    }

    impl Search<'_> {
        fn run(&mut self, i: usize, max_used: Option<Color>) -> Option<Coloring> {
            let k = self.inst.k;
            if i == self.ids.len() {
                if max_used != Some(k - 1) {
                    return None;
                }
                let c: Coloring = self.ids.iter().copied().zip(self.colors.iter().copied()).collect();
                return is_b_coloring(self.inst, &c).then_some(c);
            }
            let limit = max_used.map_or(0, |m| (m + 1).min(k - 1));
            for color in 0..=limit {
                if self.earlier[i].iter().any(|&j| self.colors[j] == color) {
                    continue;
                }
                self.colors[i] = color;
                let next_max = Some(max_used.map_or(color, |m| m.max(color)));
                if let Some(c) = self.run(i + 1, next_max) {
                    return Some(c);
                }
            }
            None
        }
    }

    let mut search = Search { inst, ids: &ids, earlier: &earlier, colors: vec![0; n] };
    Ok(search.run(0, None))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inst(n: u32, edges: &[(VertexId, VertexId)], k: u32) -> BColInstance {
        BColInstance::new(Graph::from_edges(1..=n, edges.iter().copied()).unwrap(), k).unwrap()
    }

    fn coloring(colors: &[Color]) -> Coloring {
        (1..).zip(colors.iter().copied()).collect()
    }

    fn k3(k: u32) -> BColInstance {
        inst(3, &[(1, 2), (2, 3), (1, 3)], k)
    }

    fn claw(k: u32) -> BColInstance {
        inst(4, &[(1, 2), (1, 3), (1, 4)], k)
    }

    fn c5(k: u32) -> BColInstance {
        inst(5, &[(1, 2), (2, 3), (3, 4), (4, 5), (1, 5)], k)
    }

    #[test]
    fn properness() {
        assert_eq!(is_proper(&k3(3), &coloring(&[0, 1, 2])), Ok(true));
        assert_eq!(is_proper(&k3(3), &coloring(&[0, 0, 1])), Ok(false));
        assert_eq!(is_proper(&inst(4, &[], 1), &coloring(&[0, 0, 0, 0])), Ok(true));
        assert_eq!(is_proper(&k3(3), &coloring(&[0, 1])), Err(ColoringError::Missing(3)));
        assert_eq!(
            is_proper(&k3(3), &coloring(&[0, 1, 3])),
            Err(ColoringError::OutOfRange { vertex: 3, color: 3, k: 3 })
        );
        assert_eq!(is_proper(&k3(3), &coloring(&[0, 1, 2, 0])), Err(ColoringError::UnknownVertex(4)));
    }

    #[test]
    fn b_vertex_sets() {
        let p4 = inst(4, &[(1, 2), (2, 3), (3, 4)], 2);
        let b = b_vertices(&p4, &coloring(&[0, 1, 0, 1])).unwrap();
        assert_eq!(b[&0], BTreeSet::from([1, 3]));
        assert_eq!(b[&1], BTreeSet::from([2, 4]));

        let b = b_vertices(&claw(2), &coloring(&[0, 1, 1, 1])).unwrap();
        assert_eq!(b[&0], BTreeSet::from([1]));
        assert_eq!(b[&1], BTreeSet::from([2, 3, 4]));

        let b = b_vertices(&k3(3), &coloring(&[0, 1, 2])).unwrap();
        assert!((0..3).all(|q| b[&q] == BTreeSet::from([q + 1])));

        assert_eq!(
            b_vertices(&k3(3), &coloring(&[0, 0, 1])),
            Err(ColoringError::Improper(Edge::new(1, 2)))
        );
    }

    #[test]
    fn b_coloring_checks() {
        let p4 = inst(4, &[(1, 2), (2, 3), (3, 4)], 2);
        assert!(is_b_coloring(&p4, &coloring(&[0, 1, 0, 1])));
        assert!(is_b_coloring(&k3(3), &coloring(&[0, 1, 2])));
        assert_eq!(check_b_coloring(&k3(3), &coloring(&[0, 0, 1])), Err(BColDefect::Monochromatic(Edge::new(1, 2))));
        assert!(matches!(check_b_coloring(&k3(3), &coloring(&[0, 1])), Err(BColDefect::Malformed(_))));
        // With k = 3 a vertex of degree 1 can never be a b-vertex.
        assert_eq!(check_b_coloring(&inst(2, &[(1, 2)], 3), &coloring(&[0, 1])), Err(BColDefect::NoBVertex(0)));
    }

    #[test]
    fn sparse_ids_take_the_same_verdicts() {
        // Ids spread far apart force the map-based path.
        let spread = |v: u32| v * 1000;
        let edges = [(1, 2), (2, 3), (3, 4), (4, 5), (1, 5)];
        let g = Graph::from_edges((1..=5).map(spread), edges.map(|(a, b)| (spread(a), spread(b)))).unwrap();
        let sparse = BColInstance::new(g, 3).unwrap();
        for code in 0..243u32 {
            let dense_c = coloring(&(0..5).map(|i| code / 3u32.pow(i) % 3).collect::<Vec<_>>());
            let sparse_c: Coloring = dense_c.iter().map(|(v, q)| (spread(v), q)).collect();
            let a = check_b_coloring(&c5(3), &dense_c);
            let b = check_b_coloring(&sparse, &sparse_c);
            match (a, b) {
                (Ok(()), Ok(())) => {}
                (Err(BColDefect::NoBVertex(x)), Err(BColDefect::NoBVertex(y))) => assert_eq!(x, y),
                (Err(BColDefect::Monochromatic(e)), Err(BColDefect::Monochromatic(f))) => {
                    assert_eq!(Edge::new(spread(e.lo()), spread(e.hi())), f)
                }
                other => panic!("paths disagree on {code}: {other:?}"),
            }
        }
    }

    #[test]
    fn claw_has_no_three_b_coloring() {
        // Every 3-coloring of the claw, exhaustively.
        for code in 0..81u32 {
            let c: Vec<Color> = (0..4).map(|i| code / 3u32.pow(i) % 3).collect();
            assert!(!is_b_coloring(&claw(3), &coloring(&c)), "{c:?}");
        }
        assert_eq!(solve_bcol_brute(&claw(3)), Ok(None));
    }

    #[test]
    fn solver_examples() {
        assert_eq!(solve_bcol_brute(&k3(3)), Ok(Some(coloring(&[0, 1, 2]))));
        let c = solve_bcol_brute(&c5(3)).unwrap().unwrap();
        assert_eq!(c, coloring(&[0, 1, 0, 1, 2]));
        assert!(is_b_coloring(&c5(3), &c));
        assert_eq!(solve_bcol_brute(&inst(2, &[(1, 2)], 3)), Ok(None));
    }

    #[test]
    fn solver_budget() {
        let big = inst(13, &[], 2);
        assert!(matches!(solve_bcol_brute(&big), Err(ColoringError::BudgetExceeded { .. })));
        assert!(matches!(solve_bcol_brute(&k3(6)), Err(ColoringError::BudgetExceeded { .. })));
        assert_eq!(BColInstance::new(Graph::new(), 0), Err(ColoringError::ZeroColors));
    }

    #[test]
    fn color_permutation_preserves_b_coloring() {
        let c = coloring(&[0, 1, 0, 1, 2]);
        assert!(is_b_coloring(&c5(3), &c.map_colors(|q| (q + 1) % 3)));
        assert!(is_b_coloring(&c5(3), &c.map_colors(|q| 2 - q)));
    }
}
