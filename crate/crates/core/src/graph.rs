//! Simple undirected graphs and edge orientations.
//!
//! Vertex ids are arbitrary positive integers. Adjacency is kept in ordered
//! sets so that every iteration (vertices, neighbors, edges) is ascending and
//! therefore reproducible.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

pub type VertexId = u32;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("vertex id 0 is reserved")]
    ZeroId,
    #[error("unknown vertex {0}")]
    UnknownVertex(VertexId),
    #[error("self-loop at vertex {0}")]
    SelfLoop(VertexId),
    #[error("parallel edge {0}")]
    ParallelEdge(Edge),
    #[error("duplicate vertex {0}")]
    DuplicateVertex(VertexId),
    #[error("orientation does not match the edge set: {0}")]
    OrientationMismatch(String),
}

/// Unordered vertex pair, stored with the smaller id first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Edge(VertexId, VertexId);

impl Edge {
    pub fn new(a: VertexId, b: VertexId) -> Self {
        if a <= b {
            Edge(a, b)
        } else {
            Edge(b, a)
        }
    }

    pub fn lo(self) -> VertexId {
        self.0
    }

    pub fn hi(self) -> VertexId {
        self.1
    }

    pub fn contains(self, v: VertexId) -> bool {
        self.0 == v || self.1 == v
    }

    /// The endpoint that is not `v`. Panics if `v` is not an endpoint.
    pub fn other(self, v: VertexId) -> VertexId {
        if v == self.0 {
            self.1
        } else {
            assert_eq!(v, self.1, "{v} is not an endpoint of {self}");
            self.0
        }
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{},{}}}", self.0, self.1)
    }
}

/// Directed edge `tail -> head`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Arc {
    pub tail: VertexId,
    pub head: VertexId,
}

impl Arc {
    pub fn new(tail: VertexId, head: VertexId) -> Self {
        Arc { tail, head }
    }

    pub fn edge(self) -> Edge {
        Edge::new(self.tail, self.head)
    }

    pub fn reversed(self) -> Self {
        Arc::new(self.head, self.tail)
    }
}

impl fmt::Display for Arc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}->{}", self.tail, self.head)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Graph {
    adj: BTreeMap<VertexId, BTreeSet<VertexId>>,
    edge_count: usize,
}

impl Graph {
    pub fn new() -> Self {
        Self::default()
    }

    /// Edgeless graph on vertices `1..=n`.
    pub fn with_vertices(n: u32) -> Self {
        let mut g = Graph::new();
        for v in 1..=n {
            g.adj.insert(v, BTreeSet::new());
        }
        g
    }

    pub fn from_edges(
        vertices: impl IntoIterator<Item = VertexId>,
        edges: impl IntoIterator<Item = (VertexId, VertexId)>,
    ) -> Result<Self, GraphError> {
        let mut g = Graph::new();
        for v in vertices {
            g.add_vertex(v)?;
        }
        for (u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    pub fn add_vertex(&mut self, v: VertexId) -> Result<(), GraphError> {
        if v == 0 {
            return Err(GraphError::ZeroId);
        }
        if self.adj.insert(v, BTreeSet::new()).is_some() {
            return Err(GraphError::DuplicateVertex(v));
        }
        Ok(())
    }

    pub fn add_edge(&mut self, u: VertexId, v: VertexId) -> Result<(), GraphError> {
        if u == v {
            return Err(GraphError::SelfLoop(u));
        }
        for w in [u, v] {
            if !self.adj.contains_key(&w) {
                return Err(GraphError::UnknownVertex(w));
            }
        }
        if !self.adj.get_mut(&u).unwrap().insert(v) {
            return Err(GraphError::ParallelEdge(Edge::new(u, v)));
        }
        self.adj.get_mut(&v).unwrap().insert(u);
        self.edge_count += 1;
        Ok(())
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn contains_vertex(&self, v: VertexId) -> bool {
        self.adj.contains_key(&v)
    }

    pub fn has_edge(&self, u: VertexId, v: VertexId) -> bool {
        self.adj.get(&u).is_some_and(|n| n.contains(&v))
    }

    pub fn vertices(&self) -> impl DoubleEndedIterator<Item = VertexId> + '_ {
        self.adj.keys().copied()
    }

    /// Edges in ascending `(lo, hi)` order.
    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.adj
            .iter()
            .flat_map(|(&u, n)| n.range(u + 1..).map(move |&v| Edge(u, v)))
    }

    pub fn neighbors(&self, v: VertexId) -> Result<&BTreeSet<VertexId>, GraphError> {
        self.adj.get(&v).ok_or(GraphError::UnknownVertex(v))
    }

    pub fn degree(&self, v: VertexId) -> Result<usize, GraphError> {
        self.neighbors(v).map(BTreeSet::len)
    }

    /// The empty graph counts as connected.
    pub fn is_connected(&self) -> bool {
        let Some(&start) = self.adj.keys().next() else {
            return true;
        };
        let mut seen = BTreeSet::from([start]);
        let mut queue = VecDeque::from([start]);
        while let Some(u) = queue.pop_front() {
            for &w in &self.adj[&u] {
                if seen.insert(w) {
                    queue.push_back(w);
                }
            }
        }
        seen.len() == self.adj.len()
    }

    pub fn is_independent_set(&self, set: &BTreeSet<VertexId>) -> Result<bool, GraphError> {
        for &v in set {
            let n = self.neighbors(v)?;
            if n.iter().any(|w| set.contains(w)) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Relabels the vertices to `1..=n` preserving their order. Returns the
    /// relabeled graph and the old-to-new map.
    pub fn canonical_relabel(&self) -> (Graph, BTreeMap<VertexId, VertexId>) {
        let map: BTreeMap<_, _> = self.vertices().zip(1..).collect();
        let mut g = Graph::with_vertices(self.vertex_count() as u32);
        for e in self.edges() {
            g.add_edge(map[&e.lo()], map[&e.hi()]).expect("relabel keeps graph simple");
        }
        (g, map)
    }
}

/// One arc per edge of a base graph, keyed by the underlying edge.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Orientation {
    arcs: BTreeMap<Edge, Arc>,
}

impl Orientation {
    /// Checks that `arcs` orients every edge of `g` exactly once.
    pub fn new(g: &Graph, arcs: impl IntoIterator<Item = Arc>) -> Result<Self, GraphError> {
        let mut map = BTreeMap::new();
        for a in arcs {
            let e = a.edge();
            if !g.has_edge(e.lo(), e.hi()) {
                return Err(GraphError::OrientationMismatch(format!("{e} is not an edge")));
            }
            if map.insert(e, a).is_some() {
                return Err(GraphError::OrientationMismatch(format!("{e} oriented twice")));
            }
        }
        if map.len() != g.edge_count() {
            let missing = g.edges().find(|e| !map.contains_key(e)).unwrap();
            return Err(GraphError::OrientationMismatch(format!("{missing} not oriented")));
        }
        Ok(Orientation { arcs: map })
    }

    pub(crate) fn from_map_unchecked(arcs: BTreeMap<Edge, Arc>) -> Self {
        Orientation { arcs }
    }

    pub fn arc(&self, e: Edge) -> Option<Arc> {
        self.arcs.get(&e).copied()
    }

    /// Arcs in ascending order of their underlying edge.
    pub fn arcs(&self) -> impl Iterator<Item = Arc> + '_ {
        self.arcs.values().copied()
    }

    pub fn len(&self) -> usize {
        self.arcs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arcs.is_empty()
    }

    pub fn reversed(&self) -> Self {
        Orientation {
            arcs: self.arcs.iter().map(|(&e, a)| (e, a.reversed())).collect(),
        }
    }

    /// Whether the arcs project onto exactly the edge set of `g`.
    pub fn matches(&self, g: &Graph) -> bool {
        self.arcs.len() == g.edge_count() && g.edges().all(|e| self.arcs.contains_key(&e))
    }
}
