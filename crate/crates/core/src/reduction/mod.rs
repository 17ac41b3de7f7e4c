//! Reduction from circulating orientation to b-coloring.
//!
//! From a weighted graph `(G, weight)` with `n` vertices, `m` edges and total
//! weight `W` we build `(H, k)` with `k = 2W + 3m + n + 2`:
//!
//! * `2W + 2` disjoint stars with `k - 1` leaves each. One of them is the
//!   superstar `s*`; the first `2W` of its leaves are split into blocks
//!   `L_{e,v}` of size `weight(e)`, one per edge end.
//! * For each vertex `v`, the vertex itself plus `k - 3W_v/2 - 1` pendant
//!   vertices `P_v`; `v` is also joined to every `L_{e,v}`.
//! * For each edge `e = uv`, vertices `x_{e,u}`, `x_{e,v}`, an independent set
//!   `Y_e` of size `weight(e)` joined to `x_{e,u}`, `x_{e,v}`, `u`, `v`, an
//!   independent set `Z_e` of size `k - 2 weight(e) - 3` joined to both `x`s,
//!   and an adjacent pair `q_{e,1}`, `q_{e,2}`, each joined to
//!   `Z_e ∪ L_{e,u} ∪ L_{e,v} ∪ {x_{e,u}, x_{e,v}}`. Finally `x_{e,u}` sees
//!   `L_{e,u}` and `x_{e,v}` sees `L_{e,v}`.
//!
//! `H` has a b-coloring with `k` colors iff `(G, weight)` has a circulating
//! orientation. Vertices of `G` are taken in ascending id order and edges in
//! ascending `(lo, hi)` order; both orders fix indices and colors below.

mod audit;
mod pd;
mod witness;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::bcoloring::BColInstance;
use crate::circori::{CircOriError, CircOriInstance};
use crate::decomposition::PdViolation;
use crate::graph::{Edge, Graph, VertexId};

pub use audit::{audit_coloring, audit_coloring_unchecked, AuditReport, CheckOutcome};
pub use pd::{build_pd_for_h, PdReport};
pub use witness::{extract_orientation, forward_witness, ExtractError};

/// 1-based position of an edge in ascending edge order.
pub type EdgeIndex = u32;

/// Where an `H`-vertex comes from. Indices are 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum VertexRole {
    SuperstarCenter,
    /// Superstar leaf `i` outside every `L` block (`2W < i <= k - 1`).
    SuperstarLeaf(u32),
    AnonCenter(u32),
    /// Leaf `i` of anonymous star `j`.
    AnonLeaf(u32, u32),
    Orig(VertexId),
    /// `i`-th member of `P_v`.
    Pad(VertexId, u32),
    X(EdgeIndex, VertexId),
    Y(EdgeIndex, u32),
    Z(EdgeIndex, u32),
    Q(EdgeIndex, u8),
    /// `i`-th member of `L_{e,v}`. These are also superstar leaves.
    L(EdgeIndex, VertexId, u32),
}

impl fmt::Display for VertexRole {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            VertexRole::SuperstarCenter => write!(f, "S"),
            VertexRole::SuperstarLeaf(i) => write!(f, "SL {i}"),
            VertexRole::AnonCenter(j) => write!(f, "AC {j}"),
            VertexRole::AnonLeaf(j, i) => write!(f, "AL {j} {i}"),
            VertexRole::Orig(v) => write!(f, "O {v}"),
            VertexRole::Pad(v, i) => write!(f, "P {v} {i}"),
            VertexRole::X(e, v) => write!(f, "X {e} {v}"),
            VertexRole::Y(e, i) => write!(f, "Y {e} {i}"),
            VertexRole::Z(e, i) => write!(f, "Z {e} {i}"),
            VertexRole::Q(e, h) => write!(f, "Q {e} {h}"),
            VertexRole::L(e, v, i) => write!(f, "L {e} {v} {i}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReductionError {
    #[error("source graph is disconnected")]
    Disconnected,
    #[error("edge {0} has weight 0")]
    ZeroWeight(Edge),
    #[error("W_{0} is odd; the source instance is trivially a NO instance")]
    ParityInfeasible(VertexId),
    #[error("invalid source decomposition: {0}")]
    InvalidDecomposition(PdViolation),
    #[error("role map does not describe a reduced instance: {0}")]
    RoleMapMismatch(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

/// The gadget of one source edge `e = uv` with `u < v`. Arrays are indexed
/// by endpoint: `[u, v]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeGadget {
    pub edge: Edge,
    pub weight: u64,
    pub x: [VertexId; 2],
    pub q: [VertexId; 2],
    pub y: Vec<VertexId>,
    pub z: Vec<VertexId>,
    pub l: [Vec<VertexId>; 2],
}

impl EdgeGadget {
    /// 0 for the smaller endpoint, 1 for the larger.
    pub fn side(&self, v: VertexId) -> usize {
        usize::from(v == self.edge.hi())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReducedInstance {
    source: CircOriInstance,
    target: BColInstance,
    roles: BTreeMap<VertexId, VertexRole>,
    superstar: VertexId,
    superstar_leaves: Vec<VertexId>,
    anon: Vec<(VertexId, Vec<VertexId>)>,
    orig: BTreeMap<VertexId, VertexId>,
    pads: BTreeMap<VertexId, Vec<VertexId>>,
    gadgets: Vec<EdgeGadget>,
}

/// `2W + 3m + n + 2`.
pub fn compute_k(inst: &CircOriInstance) -> u64 {
    let g = inst.graph();
    2 * inst.total_weight() + 3 * g.edge_count() as u64 + g.vertex_count() as u64 + 2
}

/// `k(2W + 2 + n + m) - 4W + m`.
pub fn expected_vertex_count(inst: &CircOriInstance) -> u64 {
    let (n, m, w) = (
        inst.graph().vertex_count() as u64,
        inst.graph().edge_count() as u64,
        inst.total_weight(),
    );
    compute_k(inst) * (2 * w + 2 + n + m) - 4 * w + m
}

/// A fixed NO instance of b-coloring (one edge, three colors), used in place
/// of the construction when the source fails the parity test.
pub fn trivial_no_instance() -> BColInstance {
    let g = Graph::from_edges([1, 2], [(1, 2)]).expect("single edge");
    BColInstance::new(g, 3).expect("k = 3")
}

struct Builder {
    h: Graph,
    roles: BTreeMap<VertexId, VertexRole>,
    next: VertexId,
}

impl Builder {
    fn vertex(&mut self, role: VertexRole) -> VertexId {
        let id = self.next;
        self.next += 1;
        self.h.add_vertex(id).expect("fresh id");
        self.roles.insert(id, role);
        id
    }

    fn join(&mut self, a: VertexId, b: VertexId) {
        self.h.add_edge(a, b).expect("gadget edges are simple");
    }

    fn join_all(&mut self, a: VertexId, bs: &[VertexId]) {
        for &b in bs {
            self.join(a, b);
        }
    }
}

pub fn build_instance(inst: &CircOriInstance) -> Result<ReducedInstance, ReductionError> {
    let g = inst.graph();
    if !g.is_connected() {
        return Err(ReductionError::Disconnected);
    }
    if let Some((e, _)) = inst.weighted_edges().find(|&(_, w)| w == 0) {
        return Err(ReductionError::ZeroWeight(e));
    }
    if let Some(v) = g.vertices().find(|&v| inst.vertex_weight(v).unwrap() % 2 == 1) {
        return Err(ReductionError::ParityInfeasible(v));
    }

    let k = compute_k(inst);
    let total = inst.total_weight();
    let k32 = u32::try_from(k).map_err(|_| ReductionError::Internal(format!("k = {k} too large")))?;
    let mut b = Builder { h: Graph::new(), roles: BTreeMap::new(), next: 1 };

    // Superstar: leaves 1..=2W become the L blocks, in (edge, endpoint) order.
    let superstar = b.vertex(VertexRole::SuperstarCenter);
    let mut block_roles = Vec::with_capacity(2 * total as usize);
    for (idx, (e, w)) in (1..).zip(inst.weighted_edges()) {
        for end in [e.lo(), e.hi()] {
            block_roles.extend((1..=w as u32).map(|i| VertexRole::L(idx, end, i)));
        }
    }
    let mut superstar_leaves = Vec::with_capacity(k as usize - 1);
    for i in 1..k32 {
        let role = block_roles
            .get(i as usize - 1)
            .copied()
            .unwrap_or(VertexRole::SuperstarLeaf(i));
        let leaf = b.vertex(role);
        b.join(superstar, leaf);
        superstar_leaves.push(leaf);
    }

    let mut anon = Vec::with_capacity(2 * total as usize + 1);
    for j in 1..=(2 * total + 1) as u32 {
        let center = b.vertex(VertexRole::AnonCenter(j));
        let leaves: Vec<_> = (1..k32).map(|i| b.vertex(VertexRole::AnonLeaf(j, i))).collect();
        b.join_all(center, &leaves);
        anon.push((center, leaves));
    }

    let mut orig = BTreeMap::new();
    let mut pads = BTreeMap::new();
    for v in g.vertices() {
        let hv = b.vertex(VertexRole::Orig(v));
        let wv = inst.vertex_weight(v).unwrap();
        let pad_count = k - 3 * wv / 2 - 1;
        let p: Vec<_> = (1..=pad_count as u32).map(|i| b.vertex(VertexRole::Pad(v, i))).collect();
        b.join_all(hv, &p);
        orig.insert(v, hv);
        pads.insert(v, p);
    }

    let mut gadgets = Vec::with_capacity(g.edge_count());
    let mut cursor = 0usize;
    for (idx, (e, w)) in (1..).zip(inst.weighted_edges()) {
        let ends = [e.lo(), e.hi()];
        let mut l: [Vec<VertexId>; 2] = Default::default();
        for block in &mut l {
            *block = superstar_leaves[cursor..cursor + w as usize].to_vec();
            cursor += w as usize;
        }
        let x = ends.map(|v| b.vertex(VertexRole::X(idx, v)));
        let y: Vec<_> = (1..=w as u32).map(|i| b.vertex(VertexRole::Y(idx, i))).collect();
        let z_count = k - 2 * w - 3;
        let z: Vec<_> = (1..=z_count as u32).map(|i| b.vertex(VertexRole::Z(idx, i))).collect();
        let q = [1, 2].map(|h| b.vertex(VertexRole::Q(idx, h)));

        for side in 0..2 {
            let (v, block) = (orig[&ends[side]], &l[side]);
            b.join_all(v, block);
            b.join_all(v, &y);
            b.join_all(x[side], &y);
            b.join_all(x[side], &z);
            b.join_all(x[side], block);
        }
        b.join(q[0], q[1]);
        for h in q {
            b.join_all(h, &z);
            b.join_all(h, &l[0]);
            b.join_all(h, &l[1]);
            b.join_all(h, &x);
        }
        gadgets.push(EdgeGadget { edge: e, weight: w, x, q, y, z, l });
    }

    let red = ReducedInstance {
        source: inst.clone(),
        target: BColInstance::new(b.h, k32).expect("k >= 2"),
        roles: b.roles,
        superstar,
        superstar_leaves,
        anon,
        orig,
        pads,
        gadgets,
    };
    red.check_structure()?;
    Ok(red)
}

impl ReducedInstance {
    pub fn source(&self) -> &CircOriInstance {
        &self.source
    }

    pub fn target(&self) -> &BColInstance {
        &self.target
    }

    pub fn h(&self) -> &Graph {
        &self.target.graph
    }

    pub fn k(&self) -> u32 {
        self.target.k
    }

    pub fn roles(&self) -> &BTreeMap<VertexId, VertexRole> {
        &self.roles
    }

    pub fn role(&self, v: VertexId) -> Option<VertexRole> {
        self.roles.get(&v).copied()
    }

    pub fn superstar(&self) -> VertexId {
        self.superstar
    }

    /// All `k - 1` superstar leaves; the first `2W` form the `L` blocks.
    pub fn superstar_leaves(&self) -> &[VertexId] {
        &self.superstar_leaves
    }

    /// Centers and leaves of the `2W + 1` anonymous stars.
    pub fn anonymous_stars(&self) -> &[(VertexId, Vec<VertexId>)] {
        &self.anon
    }

    /// The `H`-vertex standing for source vertex `v`.
    pub fn orig(&self, v: VertexId) -> Option<VertexId> {
        self.orig.get(&v).copied()
    }

    pub fn pads(&self, v: VertexId) -> &[VertexId] {
        self.pads.get(&v).map_or(&[], Vec::as_slice)
    }

    /// Edge gadgets in ascending edge order; gadget `i` belongs to edge `i + 1`.
    pub fn gadgets(&self) -> &[EdgeGadget] {
        &self.gadgets
    }

    /// Vertices that must be the b-vertices of any b-coloring with `k` colors,
    /// apart from the one `x` per edge.
    pub fn forced_b_vertices(&self) -> BTreeSet<VertexId> {
        let mut s = BTreeSet::from([self.superstar]);
        s.extend(self.orig.values());
        s.extend(self.anon.iter().map(|(c, _)| *c));
        s.extend(self.gadgets.iter().flat_map(|gd| gd.q));
        s
    }

    /// Degree each vertex must have given its role.
    pub fn expected_degree(&self, role: VertexRole) -> u64 {
        let k = self.k() as u64;
        match role {
            VertexRole::SuperstarCenter | VertexRole::AnonCenter(_) | VertexRole::X(..) => k - 1,
            VertexRole::Q(..) => k,
            VertexRole::Orig(v) => k + self.source.vertex_weight(v).unwrap() / 2 - 1,
            VertexRole::Y(..) | VertexRole::Z(..) => 4,
            VertexRole::L(..) => 5,
            VertexRole::SuperstarLeaf(_) | VertexRole::AnonLeaf(..) | VertexRole::Pad(..) => 1,
        }
    }

    /// Checks the vertex count formula and the degree of every vertex.
    pub fn check_structure(&self) -> Result<(), ReductionError> {
        let expected = expected_vertex_count(&self.source);
        let actual = self.h().vertex_count() as u64;
        if actual != expected {
            return Err(ReductionError::Internal(format!(
                "|V(H)| = {actual}, expected {expected}"
            )));
        }
        if self.roles.len() as u64 != actual {
            return Err(ReductionError::Internal("role map is not total".into()));
        }
        for (&v, &role) in &self.roles {
            let deg = self.h().degree(v).unwrap() as u64;
            let want = self.expected_degree(role);
            if deg != want {
                return Err(ReductionError::Internal(format!(
                    "vertex {v} ({role}) has degree {deg}, expected {want}"
                )));
            }
        }
        Ok(())
    }

    /// Recovers the reduced instance from `H`, `k` and a role map alone. The
    /// source instance is read off the roles (`O` vertices, `X` endpoints,
    /// `|Y_e|` as weight), rebuilt, and required to match exactly.
    pub fn from_roles(
        h: &Graph,
        k: u32,
        roles: &BTreeMap<VertexId, VertexRole>,
    ) -> Result<ReducedInstance, ReductionError> {
        let mismatch = |msg: String| ReductionError::RoleMapMismatch(msg);
        let mut vertices = BTreeSet::new();
        let mut ends: BTreeMap<EdgeIndex, BTreeSet<VertexId>> = BTreeMap::new();
        let mut weights: BTreeMap<EdgeIndex, u64> = BTreeMap::new();
        for role in roles.values() {
            match *role {
                VertexRole::Orig(v) => {
                    vertices.insert(v);
                }
                VertexRole::X(e, v) => {
                    ends.entry(e).or_default().insert(v);
                }
                VertexRole::Y(e, _) => *weights.entry(e).or_default() += 1,
                _ => {}
            }
        }
        let mut edges = Vec::new();
        for (e, vs) in &ends {
            let vs: Vec<_> = vs.iter().copied().collect();
            let [u, v] = vs[..] else {
                return Err(mismatch(format!("edge {e} has {} x-vertices", vs.len())));
            };
            let w = weights.get(e).copied().unwrap_or(0);
            edges.push((u, v, w));
        }
        let source = CircOriInstance::from_weighted_edges(vertices, edges).map_err(|err| match err {
            CircOriError::ZeroWeight(e) => ReductionError::ZeroWeight(e),
            other => mismatch(other.to_string()),
        })?;
        let red = build_instance(&source)?;
        if red.k() != k {
            return Err(mismatch(format!("k = {k}, but roles imply k = {}", red.k())));
        }
        if &red.roles != roles {
            return Err(mismatch("roles differ from the rebuilt instance".into()));
        }
        if red.h() != h {
            return Err(mismatch("graph differs from the rebuilt instance".into()));
        }
        Ok(red)
    }
}
