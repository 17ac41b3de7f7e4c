use std::collections::BTreeSet;

use thiserror::Error;

use super::{ReducedInstance, ReductionError};
use crate::bcoloring::{check_b_coloring, is_b_vertex_with, BColDefect, Color, ColorScratch, Coloring};
use crate::graph::{Arc, Orientation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExtractError {
    #[error("not a b-coloring of H: {0}")]
    NotBColoring(BColDefect),
    #[error("edge {edge}: {count} of its two x-vertices are b-vertices")]
    MalformedColoring { edge: crate::graph::Edge, count: usize },
    #[error("extracted orientation is not circulating")]
    BalanceViolation,
}

/// Builds a b-coloring of `H` with `k` colors from a circulating orientation.
///
/// With `v_i` the `i`-th source vertex and `e_i` the `i`-th edge:
/// `s*` gets 0, `v_i` gets `i`, `q_{e_i,1}` and `q_{e_i,2}` get `n + i` and
/// `m + n + i`, both `x`-vertices of `e_i` get `2m + n + i`, and anonymous
/// center `j` gets `3m + n + j`. The `L` blocks carry `3m + n + 1 ..= 3m + n + 2W`
/// in block order. If `e` is directed `u -> v`, `Y_e` repeats the colors of
/// `L_{e,u}`, which makes `x_{e,v}` the b-vertex of its color. Every other
/// set takes the colors its b-vertex neighbors are missing, ascending.
pub fn forward_witness(red: &ReducedInstance, o: &Orientation) -> Result<Coloring, ReductionError> {
    let src = red.source();
    let g = src.graph();
    if !o.matches(g) {
        return Err(ReductionError::Internal("orientation does not match the source instance".into()));
    }
    if !src.is_circulating(o).expect("orientation matches") {
        return Err(ReductionError::Internal("orientation is not circulating".into()));
    }
    let k = red.k();
    let n = g.vertex_count() as Color;
    let m = g.edge_count() as Color;
    let base = 3 * m + n;
    let mut c = Coloring::default();

    for (j, (center, leaves)) in (1..).zip(red.anonymous_stars()) {
        let own = base + j;
        c.set(*center, own);
        for (&leaf, color) in leaves.iter().zip((0..k).filter(|&q| q != own)) {
            c.set(leaf, color);
        }
    }

    c.set(red.superstar(), 0);
    let leaves = red.superstar_leaves();
    let block_len = 2 * src.total_weight() as usize;
    for (t, &leaf) in (1..).zip(&leaves[..block_len]) {
        c.set(leaf, base + t);
    }
    let block_colors = base + 1..=base + block_len as Color;
    let rest = (1..k).filter(|q| !block_colors.contains(q));
    for (&leaf, color) in leaves[block_len..].iter().zip(rest) {
        c.set(leaf, color);
    }

    for (i, v) in (1..).zip(g.vertices()) {
        c.set(red.orig(v).unwrap(), i);
    }

    for (i, gd) in (1..).zip(red.gadgets()) {
        let (q1, q2, xc) = (n + i, m + n + i, 2 * m + n + i);
        c.set(gd.q[0], q1);
        c.set(gd.q[1], q2);
        for x in gd.x {
            c.set(x, xc);
        }
        let block_colors = gd.l.clone().map(|b| b.iter().map(|&v| c.get(v).unwrap()).collect::<Vec<_>>());
        let mut used: BTreeSet<Color> = block_colors.iter().flatten().copied().collect();
        used.extend([q1, q2, xc]);
        for (&z, color) in gd.z.iter().zip((0..k).filter(|q| !used.contains(q))) {
            c.set(z, color);
        }
        let tail = o.arc(gd.edge).unwrap().tail;
        for (&y, &color) in gd.y.iter().zip(&block_colors[gd.side(tail)]) {
            c.set(y, color);
        }
    }

    let h = red.h();
    for v in g.vertices() {
        let hv = red.orig(v).unwrap();
        let pads = red.pads(v);
        let seen: BTreeSet<Color> = h
            .neighbors(hv)
            .unwrap()
            .iter()
            .filter_map(|&w| c.get(w))
            .chain([c.get(hv).unwrap()])
            .collect();
        let missing: Vec<Color> = (0..k).filter(|q| !seen.contains(q)).collect();
        if missing.len() != pads.len() {
            return Err(ReductionError::Internal(format!(
                "vertex {v} misses {} colors but has {} pad vertices",
                missing.len(),
                pads.len()
            )));
        }
        for (&p, &color) in pads.iter().zip(&missing) {
            c.set(p, color);
        }
    }
    Ok(c)
}

/// Reads an orientation off a b-coloring of `H`: each edge points toward the
/// endpoint whose `x`-vertex is a b-vertex.
pub fn extract_orientation(red: &ReducedInstance, c: &Coloring) -> Result<Orientation, ExtractError> {
    // Malformed or improper input is rejected up front; a missing b-vertex is
    // reported only after the per-edge check, which names the offending edge.
    let verdict = check_b_coloring(red.target(), c);
    if let Err(d @ (BColDefect::Malformed(_) | BColDefect::Monochromatic(_))) = verdict {
        return Err(ExtractError::NotBColoring(d));
    }
    let mut scratch = ColorScratch::new(red.k());
    let mut arcs = Vec::with_capacity(red.gadgets().len());
    for gd in red.gadgets() {
        let b = gd.x.map(|x| is_b_vertex_with(&mut scratch, red.target(), c, x));
        let head = match b {
            [true, false] => gd.edge.lo(),
            [false, true] => gd.edge.hi(),
            _ => {
                let count = b.iter().filter(|&&x| x).count();
                return Err(ExtractError::MalformedColoring { edge: gd.edge, count });
            }
        };
        arcs.push(Arc::new(gd.edge.other(head), head));
    }
    verdict.map_err(ExtractError::NotBColoring)?;
    let o = Orientation::new(red.source().graph(), arcs).expect("one arc per edge");
    if !red.source().is_circulating(&o).expect("orientation matches") {
        return Err(ExtractError::BalanceViolation);
    }
    Ok(o)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bcoloring::{b_vertices, is_b_coloring};
    use crate::circori::CircOriInstance;
    use crate::graph::Edge;
    use crate::reduction::build_instance;

    fn triangle() -> (ReducedInstance, Orientation) {
        let inst = CircOriInstance::from_weighted_edges(1..=3, [(1, 2, 2), (2, 3, 2), (1, 3, 2)]).unwrap();
        let o = Orientation::new(inst.graph(), [Arc::new(1, 2), Arc::new(2, 3), Arc::new(3, 1)]).unwrap();
        (build_instance(&inst).unwrap(), o)
    }

    #[test]
    fn triangle_witness_is_b_coloring() {
        let (red, o) = triangle();
        let c = forward_witness(&red, &o).unwrap();
        assert!(is_b_coloring(red.target(), &c));
        assert_eq!(c.get(red.superstar()), Some(0));
        assert_eq!(c.get(red.orig(1).unwrap()), Some(1));
        let b = b_vertices(red.target(), &c).unwrap();
        assert_eq!(b.len(), 26);
        assert!(b.values().all(|s| s.len() == 1));
    }

    #[test]
    fn y_repeats_tail_block() {
        let (red, o) = triangle();
        let c = forward_witness(&red, &o).unwrap();
        let gd = &red.gadgets()[0];
        assert_eq!(gd.edge, Edge::new(1, 2));
        let colors = |vs: &[u32]| -> Vec<Color> {
            let mut v: Vec<_> = vs.iter().map(|&x| c.get(x).unwrap()).collect();
            v.sort();
            v
        };
        assert_eq!(colors(&gd.y), colors(&gd.l[0]));
    }

    #[test]
    fn extraction_roundtrip() {
        let (red, o) = triangle();
        let c = forward_witness(&red, &o).unwrap();
        let back = extract_orientation(&red, &c).unwrap();
        assert_eq!(back, o);
        for v in 1..=3 {
            let inw: u64 = back
                .arcs()
                .filter(|a| a.head == v)
                .map(|a| red.source().weight(a.edge()).unwrap())
                .sum();
            assert_eq!(inw, 2);
        }
    }

    #[test]
    fn rejects_non_circulating() {
        let (red, _) = triangle();
        let bad = Orientation::new(red.source().graph(), [Arc::new(1, 2), Arc::new(3, 2), Arc::new(1, 3)]).unwrap();
        assert!(forward_witness(&red, &bad).is_err());
    }

    #[test]
    fn both_x_b_vertices_is_malformed() {
        // Triangle with unit weights; recolor two vertices of the first gadget
        // so that both of its x-vertices see every color.
        let inst = CircOriInstance::from_weighted_edges(1..=3, [(1, 2, 1), (2, 3, 1), (1, 3, 1)]).unwrap();
        let red = build_instance(&inst).unwrap();
        let o = solve(&inst);
        let mut c = forward_witness(&red, &o).unwrap();
        let gd = &red.gadgets()[0];
        // Give L_{e,v} the colors of L_{e,u}; then a single Y color serves both x's.
        let lu = c.get(gd.l[0][0]).unwrap();
        let lv = c.get(gd.l[1][0]).unwrap();
        c.set(gd.l[1][0], lu);
        c.set(gd.y[0], lv);
        assert!(!is_b_coloring(red.target(), &c));
        assert_eq!(
            extract_orientation(&red, &c),
            Err(ExtractError::MalformedColoring { edge: Edge::new(1, 2), count: 2 })
        );
    }

    fn solve(inst: &CircOriInstance) -> Orientation {
        crate::circori::solve_circori_brute(inst).unwrap().unwrap()
    }
}
