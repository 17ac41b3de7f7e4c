//! Path decomposition of `H` from a path decomposition of the source graph.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::{ReducedInstance, ReductionError};
use crate::decomposition::{pd_width, validate_pd, PathDecomposition};
use crate::graph::VertexId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PdReport {
    pub source_width: usize,
    pub target_width: usize,
}

impl PdReport {
    pub fn increment(&self) -> usize {
        self.target_width - self.source_width
    }
}

/// Lifts `pd_g` to a path decomposition of `H`.
///
/// Every source bag is mapped to `H` and extended by `s*`. Right after the
/// leftmost bag holding `v`, one bag per member of `P_v` is inserted (the bag,
/// `s*` and that member). Right after the leftmost bag holding both ends of
/// `e = uv`, one bag per member of `L_{e,u} ∪ L_{e,v} ∪ Y_e ∪ Z_e` is inserted,
/// each also holding `s*`, both `x`s and both `q`s. The superstar leaves outside
/// the `L` blocks follow as bags `{s*, leaf}`, and the anonymous stars close the
/// sequence with bags `{center, leaf}`. The width grows by at most 6.
pub fn build_pd_for_h(
    red: &ReducedInstance,
    pd_g: &PathDecomposition,
) -> Result<(PathDecomposition, PdReport), ReductionError> {
    let g = red.source().graph();
    validate_pd(g, pd_g).map_err(ReductionError::InvalidDecomposition)?;
    let s = red.superstar();

    let mut pads_at: BTreeMap<usize, Vec<VertexId>> = BTreeMap::new();
    for (v, bag) in pd_g.leftmost_bags() {
        pads_at.entry(bag).or_default().push(v);
    }
    let mut edges_at: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, gd) in red.gadgets().iter().enumerate() {
        let bag = pd_g.leftmost_bag_with_edge(gd.edge).expect("validated");
        edges_at.entry(bag).or_default().push(i);
    }

    let mut bags: Vec<BTreeSet<VertexId>> = Vec::new();
    for (idx, bag) in pd_g.bags().iter().enumerate() {
        let mut base: BTreeSet<VertexId> = bag.iter().map(|&v| red.orig(v).unwrap()).collect();
        base.insert(s);
        bags.push(base.clone());
        for &v in pads_at.get(&idx).into_iter().flatten() {
            for &p in red.pads(v) {
                let mut b = base.clone();
                b.insert(p);
                bags.push(b);
            }
        }
        for &i in edges_at.get(&idx).into_iter().flatten() {
            let gd = &red.gadgets()[i];
            let mut core = base.clone();
            core.extend(gd.x);
            core.extend(gd.q);
            let members = gd.l[0].iter().chain(&gd.l[1]).chain(&gd.y).chain(&gd.z);
            for &u in members {
                let mut b = core.clone();
                b.insert(u);
                bags.push(b);
            }
        }
    }
    let block_len = 2 * red.source().total_weight() as usize;
    for &leaf in &red.superstar_leaves()[block_len..] {
        bags.push(BTreeSet::from([s, leaf]));
    }
    for (center, leaves) in red.anonymous_stars() {
        for &leaf in leaves {
            bags.push(BTreeSet::from([*center, leaf]));
        }
    }

    let pd_h = PathDecomposition::new(bags);
    if let Err(v) = validate_pd(red.h(), &pd_h) {
        return Err(ReductionError::Internal(format!("lifted decomposition is invalid: {v}")));
    }
    let source_width = pd_width(pd_g).unwrap_or(0);
    let target_width = pd_width(&pd_h).map_err(|e| ReductionError::Internal(e.to_string()))?;
    Ok((pd_h, PdReport { source_width, target_width }))
}
