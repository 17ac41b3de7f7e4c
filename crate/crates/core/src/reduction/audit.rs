//! Structural audit of a coloring of `H` against what every b-coloring with
//! `k` colors must look like.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::ReducedInstance;
use crate::bcoloring::{check_b_coloring, BColDefect, Color, ColorScratch, Coloring};
use crate::graph::VertexId;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckOutcome {
    pub check: &'static str,
    pub violations: Vec<String>,
}

impl CheckOutcome {
    fn new(check: &'static str) -> Self {
        CheckOutcome { check, violations: Vec::new() }
    }

    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AuditReport {
    pub colors_with_b_vertex: usize,
    pub b_vertex_count: usize,
    /// b-vertices are exactly `s*`, the source vertices, the `q`s, the
    /// anonymous centers and one `x` per edge.
    pub b_vertex_location: CheckOutcome,
    /// Every color has exactly one b-vertex.
    pub one_per_color: CheckOutcome,
    /// The `k - 1` superstar leaves carry pairwise distinct colors.
    pub superstar_leaves_distinct: CheckOutcome,
    /// Color sets of distinct `L` blocks are disjoint.
    pub block_disjointness: CheckOutcome,
    /// `Y_e` carries `C_{e,u}` when `x_{e,v}` is the b-vertex, and `C_{e,v}`
    /// when `x_{e,u}` is.
    pub y_content: CheckOutcome,
}

impl AuditReport {
    pub fn passed(&self) -> bool {
        self.checks().iter().all(|c| c.passed())
    }

    pub fn checks(&self) -> [&CheckOutcome; 5] {
        [
            &self.b_vertex_location,
            &self.one_per_color,
            &self.superstar_leaves_distinct,
            &self.block_disjointness,
            &self.y_content,
        ]
    }

    /// The failed checks with their violations, one line each.
    pub fn failures(&self) -> Vec<String> {
        self.checks()
            .iter()
            .flat_map(|c| c.violations.iter().map(move |v| format!("{}: {v}", c.check)))
            .collect()
    }
}

/// Audits a b-coloring of `H`. Fails with the defect when `c` is not one.
pub fn audit_coloring(red: &ReducedInstance, c: &Coloring) -> Result<AuditReport, BColDefect> {
    check_b_coloring(red.target(), c)?;
    Ok(audit_coloring_unchecked(red, c))
}

/// Runs the audit on any total coloring with colors below `k`, proper or not.
/// A vertex counts as a b-vertex when its neighborhood shows every other color.
pub fn audit_coloring_unchecked(red: &ReducedInstance, c: &Coloring) -> AuditReport {
    let k = red.k();
    let h = red.h();
    let mut scratch = ColorScratch::new(k);
    let mut b_set = BTreeSet::new();
    let mut by_color: BTreeMap<Color, Vec<VertexId>> = BTreeMap::new();
    for v in h.vertices() {
        let own = c.get(v).expect("total coloring");
        if scratch.foreign_colors(h, c, v, own) == k as usize - 1 {
            b_set.insert(v);
            by_color.entry(own).or_default().push(v);
        }
    }
    let describe = |v: VertexId| format!("{v} ({})", red.role(v).unwrap());

    let mut location = CheckOutcome::new("b-vertex location");
    for v in red.forced_b_vertices() {
        if !b_set.contains(&v) {
            location.violations.push(format!("{} is not a b-vertex", describe(v)));
        }
    }
    let mut allowed = red.forced_b_vertices();
    for gd in red.gadgets() {
        allowed.extend(gd.x);
        let count = gd.x.iter().filter(|x| b_set.contains(x)).count();
        if count != 1 {
            location.violations.push(format!("edge {}: {count} x-vertices are b-vertices", gd.edge));
        }
    }
    for &v in b_set.difference(&allowed) {
        location.violations.push(format!("unexpected b-vertex {}", describe(v)));
    }

    let mut one_per_color = CheckOutcome::new("one b-vertex per color");
    for q in 0..k {
        match by_color.get(&q).map_or(0, Vec::len) {
            1 => {}
            0 => one_per_color.violations.push(format!("color {q} has no b-vertex")),
            cnt => one_per_color.violations.push(format!(
                "color {q} has {cnt} b-vertices: {}",
                by_color[&q].iter().map(|&v| describe(v)).collect::<Vec<_>>().join(", ")
            )),
        }
    }

    let mut distinct = CheckOutcome::new("superstar leaves distinct");
    let mut first_leaf: BTreeMap<Color, VertexId> = BTreeMap::new();
    for &leaf in red.superstar_leaves() {
        let q = c.get(leaf).unwrap();
        if let Some(&prev) = first_leaf.get(&q) {
            distinct
                .violations
                .push(format!("{} and {} share color {q}", describe(prev), describe(leaf)));
        } else {
            first_leaf.insert(q, leaf);
        }
    }

    let colors_of = |vs: &[VertexId]| -> BTreeSet<Color> { vs.iter().map(|&v| c.get(v).unwrap()).collect() };
    let mut disjoint = CheckOutcome::new("L blocks disjoint");
    let blocks: Vec<(String, BTreeSet<Color>)> = red
        .gadgets()
        .iter()
        .enumerate()
        .flat_map(|(i, gd)| {
            [gd.edge.lo(), gd.edge.hi()]
                .into_iter()
                .zip(&gd.l)
                .map(move |(v, block)| (format!("L[{}, {v}]", i + 1), block))
        })
        .map(|(name, block)| (name, colors_of(block)))
        .collect();
    for (a, (name_a, set_a)) in blocks.iter().enumerate() {
        for (name_b, set_b) in &blocks[a + 1..] {
            let common: Vec<_> = set_a.intersection(set_b).collect();
            if !common.is_empty() {
                disjoint.violations.push(format!("{name_a} and {name_b} share colors {common:?}"));
            }
        }
    }

    let mut y_content = CheckOutcome::new("Y content");
    for (i, gd) in red.gadgets().iter().enumerate() {
        let y = colors_of(&gd.y);
        let block = [colors_of(&gd.l[0]), colors_of(&gd.l[1])];
        let is_b = gd.x.map(|x| b_set.contains(&x));
        // The b-vertex side's x needs the other block's colors from Y.
        let expected_side = match is_b {
            [false, true] => Some(0),
            [true, false] => Some(1),
            _ => None,
        };
        match expected_side {
            Some(side) if y == block[side] => {}
            Some(side) => y_content.violations.push(format!(
                "edge {} ({}): Y colors {y:?}, expected {:?}",
                i + 1,
                gd.edge,
                block[side]
            )),
            None if y == block[0] || y == block[1] => {}
            None => y_content.violations.push(format!(
                "edge {} ({}): Y colors {y:?} match neither block",
                i + 1,
                gd.edge
            )),
        }
    }

    AuditReport {
        colors_with_b_vertex: by_color.len(),
        b_vertex_count: b_set.len(),
        b_vertex_location: location,
        one_per_color,
        superstar_leaves_distinct: distinct,
        block_disjointness: disjoint,
        y_content,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circori::{gen_yes_instance, CircOriInstance};
    use crate::graph::{Arc, Orientation};
    use crate::reduction::{build_instance, forward_witness};

    #[test]
    fn forward_witnesses_pass() {
        for seed in 0..5 {
            let (inst, o) = gen_yes_instance(seed, 4, 2, 2).unwrap();
            let red = build_instance(&inst).unwrap();
            let c = forward_witness(&red, &o).unwrap();
            let report = audit_coloring(&red, &c).unwrap();
            assert!(report.passed(), "{:?}", report.failures());
            assert_eq!(report.colors_with_b_vertex, red.k() as usize);
            assert_eq!(report.b_vertex_count, red.k() as usize);
        }
    }

    #[test]
    fn repeated_superstar_leaf_color() {
        let inst = CircOriInstance::from_weighted_edges(1..=3, [(1, 2, 2), (2, 3, 2), (1, 3, 2)]).unwrap();
        let o = Orientation::new(inst.graph(), [Arc::new(1, 2), Arc::new(2, 3), Arc::new(3, 1)]).unwrap();
        let red = build_instance(&inst).unwrap();
        let mut c = forward_witness(&red, &o).unwrap();
        let leaves = red.superstar_leaves();
        c.set(leaves[2], c.get(leaves[0]).unwrap());
        assert!(audit_coloring(&red, &c).is_err());
        let report = audit_coloring_unchecked(&red, &c);
        assert!(!report.block_disjointness.passed());
        assert!(!report.superstar_leaves_distinct.passed());
        assert!(!report.b_vertex_location.passed());
    }

    #[test]
    fn proper_but_not_b_coloring_is_rejected() {
        let inst = CircOriInstance::from_weighted_edges(1..=3, [(1, 2, 1), (2, 3, 1), (1, 3, 1)]).unwrap();
        let red = build_instance(&inst).unwrap();
        // First-fit greedy is proper but uses only a handful of colors.
        let h = red.h();
        let mut c = Coloring::default();
        for v in h.vertices() {
            let used: BTreeSet<_> = h.neighbors(v).unwrap().iter().filter_map(|&w| c.get(w)).collect();
            c.set(v, (0..).find(|q| !used.contains(q)).unwrap());
        }
        assert!(matches!(audit_coloring(&red, &c), Err(BColDefect::NoBVertex(_))));
    }
}
