//! Line-oriented text formats.
//!
//! Every format is LF-terminated with space-separated tokens; lines starting
//! with `c` are comments and blank lines are ignored on input. Vertices are
//! 1-indexed on disk.
//!
//! | format      | header                        | body lines               |
//! |-------------|-------------------------------|--------------------------|
//! | circori     | `p circori <n> <m>`           | `e <u> <v> <w>`, `w >= 1` |
//! | bcol        | `p bcol <n> <m> <k>`          | `e <u> <v>`              |
//! | pd          | `s pd <d> <maxbagsize> <n>`   | `b <idx> <v...>`         |
//! | orientation | none                          | `a <tail> <head>`        |
//! | coloring    | none                          | `v <vertex> <color>`     |
//! | rolemap     | none                          | `n <id> <role-tokens>`   |
//! | order       | none                          | `o <vertex>`             |
//!
//! Graph writers relabel vertices to `1..=n` in ascending order. The other
//! writers emit ids unchanged and expect them to be those of a graph that
//! was written or read in this form.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::str::FromStr;

use thiserror::Error;

use crate::bcoloring::{BColInstance, Color, Coloring};
use crate::circori::CircOriInstance;
use crate::decomposition::PathDecomposition;
use crate::graph::{Arc, Edge, Graph, VertexId};
use crate::reduction::{ReducedInstance, VertexRole};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {msg}")]
pub struct ParseError {
    pub line: usize,
    pub msg: String,
}

fn err<T>(line: usize, msg: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError { line, msg: msg.into() })
}

/// Non-comment, non-blank lines with their 1-based line numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split_ascii_whitespace().collect::<Vec<_>>()))
        .filter(|(_, toks)| !toks.is_empty() && toks[0] != "c")
}

fn num<T: FromStr>(line: usize, tok: Option<&&str>, what: &str) -> Result<T, ParseError> {
    match tok {
        None => err(line, format!("missing {what}")),
        Some(t) => t.parse().or_else(|_| err(line, format!("bad {what} '{t}'"))),
    }
}

fn expect_len(line: usize, toks: &[&str], n: usize) -> Result<(), ParseError> {
    if toks.len() != n {
        return err(line, format!("expected {n} tokens, found {}", toks.len()));
    }
    Ok(())
}

fn vertex_in(line: usize, tok: Option<&&str>, n: usize) -> Result<VertexId, ParseError> {
    let v: VertexId = num(line, tok, "vertex")?;
    if v == 0 || v as usize > n {
        return err(line, format!("vertex {v} outside 1..={n}"));
    }
    Ok(v)
}

/// An edge line: line number, endpoints, trailing values.
type EdgeLine = (usize, VertexId, VertexId, Vec<u64>);

/// Parses a header `p <kind> <fields...>` followed by edge lines with
/// `extra` trailing integers each.
fn parse_edge_file(
    text: &str,
    kind: &str,
    header_fields: usize,
    extra: usize,
) -> Result<(Vec<u64>, Vec<EdgeLine>), ParseError> {
    let mut lines = content_lines(text);
    let Some((hl, head)) = lines.next() else {
        return err(1, "empty input");
    };
    if head.first() != Some(&"p") || head.get(1) != Some(&kind) {
        return err(hl, format!("expected header 'p {kind} ...'"));
    }
    expect_len(hl, &head, 2 + header_fields)?;
    let fields = (0..header_fields)
        .map(|i| num(hl, head.get(2 + i), "header field"))
        .collect::<Result<Vec<u64>, _>>()?;
    let n = fields[0] as usize;
    let mut edges = Vec::new();
    for (ln, toks) in lines {
        if toks[0] != "e" {
            return err(ln, format!("unexpected line type '{}'", toks[0]));
        }
        expect_len(ln, &toks, 3 + extra)?;
        let u = vertex_in(ln, toks.get(1), n)?;
        let v = vertex_in(ln, toks.get(2), n)?;
        let rest = (0..extra)
            .map(|i| num(ln, toks.get(3 + i), "value"))
            .collect::<Result<Vec<u64>, _>>()?;
        edges.push((ln, u, v, rest));
    }
    if edges.len() as u64 != fields[1] {
        return err(hl, format!("header declares {} edges, found {}", fields[1], edges.len()));
    }
    Ok((fields, edges))
}

fn build_graph(n: usize, edges: &[EdgeLine]) -> Result<Graph, ParseError> {
    let mut g = Graph::with_vertices(n as u32);
    for (ln, u, v, _) in edges {
        if let Err(e) = g.add_edge(*u, *v) {
            return err(*ln, e.to_string());
        }
    }
    Ok(g)
}

pub fn parse_circori(text: &str) -> Result<CircOriInstance, ParseError> {
    let (fields, edges) = parse_edge_file(text, "circori", 2, 1)?;
    let g = build_graph(fields[0] as usize, &edges)?;
    let mut weights = BTreeMap::new();
    for (ln, u, v, w) in &edges {
        if w[0] == 0 {
            return err(*ln, format!("edge {} has weight 0", Edge::new(*u, *v)));
        }
        weights.insert(Edge::new(*u, *v), w[0]);
    }
    CircOriInstance::new(g, weights).or_else(|e| err(1, e.to_string()))
}

pub fn write_circori(inst: &CircOriInstance) -> String {
    let g = inst.graph();
    let (_, map) = g.canonical_relabel();
    let mut out = format!("p circori {} {}\n", g.vertex_count(), g.edge_count());
    for (e, w) in inst.weighted_edges() {
        writeln!(out, "e {} {} {w}", map[&e.lo()], map[&e.hi()]).unwrap();
    }
    out
}

pub fn parse_bcol(text: &str) -> Result<BColInstance, ParseError> {
    let (fields, edges) = parse_edge_file(text, "bcol", 3, 0)?;
    let g = build_graph(fields[0] as usize, &edges)?;
    let k = u32::try_from(fields[2]).or_else(|_| err(1, "k too large"))?;
    BColInstance::new(g, k).or_else(|e| err(1, e.to_string()))
}

pub fn write_bcol(inst: &BColInstance) -> String {
    let (g, _) = inst.graph.canonical_relabel();
    let mut out = format!("p bcol {} {} {}\n", g.vertex_count(), g.edge_count(), inst.k);
    for e in g.edges() {
        writeln!(out, "e {} {}", e.lo(), e.hi()).unwrap();
    }
    out
}

/// Reads either a `circori` or a `bcol` file and returns the bare graph.
pub fn parse_any_graph(text: &str) -> Result<Graph, ParseError> {
    let kind = content_lines(text).next().and_then(|(_, t)| t.get(1).map(|s| s.to_string()));
    match kind.as_deref() {
        Some("circori") => parse_circori(text).map(|i| i.graph().clone()),
        Some("bcol") => parse_bcol(text).map(|i| i.graph),
        _ => err(1, "expected a 'p circori' or 'p bcol' header"),
    }
}

pub fn parse_pd(text: &str) -> Result<PathDecomposition, ParseError> {
    let mut lines = content_lines(text);
    let Some((hl, head)) = lines.next() else {
        return err(1, "empty input");
    };
    if head.first() != Some(&"s") || head.get(1) != Some(&"pd") {
        return err(hl, "expected header 's pd <d> <maxbagsize> <n>'");
    }
    expect_len(hl, &head, 5)?;
    let d: usize = num(hl, head.get(2), "bag count")?;
    let max_bag: usize = num(hl, head.get(3), "max bag size")?;
    let n: usize = num(hl, head.get(4), "vertex count")?;
    let mut bags = Vec::with_capacity(d);
    for (ln, toks) in lines {
        if toks[0] != "b" {
            return err(ln, format!("unexpected line type '{}'", toks[0]));
        }
        let idx: usize = num(ln, toks.get(1), "bag index")?;
        if idx != bags.len() + 1 {
            return err(ln, format!("bag index {idx}, expected {}", bags.len() + 1));
        }
        let mut bag = BTreeSet::new();
        for t in &toks[2..] {
            let v = vertex_in(ln, Some(t), n)?;
            if !bag.insert(v) {
                return err(ln, format!("vertex {v} repeated in bag"));
            }
        }
        bags.push(bag);
    }
    if bags.len() != d {
        return err(hl, format!("header declares {d} bags, found {}", bags.len()));
    }
    let pd = PathDecomposition::new(bags);
    if pd.max_bag_size() != max_bag {
        return err(hl, format!("header declares max bag size {max_bag}, found {}", pd.max_bag_size()));
    }
    Ok(pd)
}

/// `n` is the vertex count of the decomposed graph.
pub fn write_pd(pd: &PathDecomposition, n: usize) -> String {
    let mut out = format!("s pd {} {} {n}\n", pd.len(), pd.max_bag_size());
    for (i, bag) in pd.bags().iter().enumerate() {
        write!(out, "b {}", i + 1).unwrap();
        for v in bag {
            write!(out, " {v}").unwrap();
        }
        out.push('\n');
    }
    out
}

pub fn parse_orientation(text: &str) -> Result<Vec<Arc>, ParseError> {
    content_lines(text)
        .map(|(ln, toks)| {
            if toks[0] != "a" {
                return err(ln, format!("unexpected line type '{}'", toks[0]));
            }
            expect_len(ln, &toks, 3)?;
            Ok(Arc::new(num(ln, toks.get(1), "tail")?, num(ln, toks.get(2), "head")?))
        })
        .collect()
}

pub fn write_orientation(arcs: impl IntoIterator<Item = Arc>) -> String {
    arcs.into_iter().map(|a| format!("a {} {}\n", a.tail, a.head)).collect()
}

pub fn parse_coloring(text: &str) -> Result<Coloring, ParseError> {
    let mut c = BTreeMap::new();
    for (ln, toks) in content_lines(text) {
        if toks[0] != "v" {
            return err(ln, format!("unexpected line type '{}'", toks[0]));
        }
        expect_len(ln, &toks, 3)?;
        let v: VertexId = num(ln, toks.get(1), "vertex")?;
        let color: Color = num(ln, toks.get(2), "color")?;
        if c.insert(v, color).is_some() {
            return err(ln, format!("vertex {v} colored twice"));
        }
    }
    Ok(Coloring::new(c))
}

pub fn write_coloring(c: &Coloring) -> String {
    c.iter().map(|(v, q)| format!("v {v} {q}\n")).collect()
}

pub fn parse_order(text: &str) -> Result<Vec<VertexId>, ParseError> {
    content_lines(text)
        .map(|(ln, toks)| {
            if toks[0] != "o" {
                return err(ln, format!("unexpected line type '{}'", toks[0]));
            }
            expect_len(ln, &toks, 2)?;
            num(ln, toks.get(1), "vertex")
        })
        .collect()
}

pub fn write_order(order: &[VertexId]) -> String {
    order.iter().map(|v| format!("o {v}\n")).collect()
}

fn parse_role(ln: usize, toks: &[&str]) -> Result<VertexRole, ParseError> {
    let arity = match toks.first() {
        Some(&"S") => 0,
        Some(&"SL" | &"AC" | &"O") => 1,
        Some(&"AL" | &"P" | &"X" | &"Y" | &"Z" | &"Q") => 2,
        Some(&"L") => 3,
        Some(t) => return err(ln, format!("unknown role '{t}'")),
        None => return err(ln, "missing role"),
    };
    expect_len(ln, toks, 1 + arity)?;
    let a = |i: usize| num::<u32>(ln, toks.get(i), "role index");
    Ok(match toks[0] {
        "S" => VertexRole::SuperstarCenter,
        "SL" => VertexRole::SuperstarLeaf(a(1)?),
        "AC" => VertexRole::AnonCenter(a(1)?),
        "O" => VertexRole::Orig(a(1)?),
        "AL" => VertexRole::AnonLeaf(a(1)?, a(2)?),
        "P" => VertexRole::Pad(a(1)?, a(2)?),
        "X" => VertexRole::X(a(1)?, a(2)?),
        "Y" => VertexRole::Y(a(1)?, a(2)?),
        "Z" => VertexRole::Z(a(1)?, a(2)?),
        "Q" => {
            let h = a(2)?;
            if h != 1 && h != 2 {
                return err(ln, format!("q index {h} is not 1 or 2"));
            }
            VertexRole::Q(a(1)?, h as u8)
        }
        _ => VertexRole::L(a(1)?, a(2)?, a(3)?),
    })
}

pub fn parse_rolemap(text: &str) -> Result<BTreeMap<VertexId, VertexRole>, ParseError> {
    let mut roles = BTreeMap::new();
    for (ln, toks) in content_lines(text) {
        if toks[0] != "n" {
            return err(ln, format!("unexpected line type '{}'", toks[0]));
        }
        let id: VertexId = num(ln, toks.get(1), "vertex")?;
        let role = parse_role(ln, &toks[2..])?;
        if roles.insert(id, role).is_some() {
            return err(ln, format!("vertex {id} listed twice"));
        }
    }
    Ok(roles)
}

pub fn write_rolemap(red: &ReducedInstance) -> String {
    red.roles().iter().map(|(id, role)| format!("n {id} {role}\n")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reduction::build_instance;

    const TRIANGLE: &str = "c triangle, all weights 2\np circori 3 3\ne 1 2 2\ne 2 3 2\ne 1 3 2\n";

    #[test]
    fn circori_parse_and_write() {
        let inst = parse_circori(TRIANGLE).unwrap();
        assert_eq!(inst.total_weight(), 6);
        assert_eq!(write_circori(&inst), "p circori 3 3\ne 1 2 2\ne 1 3 2\ne 2 3 2\n");
        assert_eq!(parse_circori(&write_circori(&inst)).unwrap(), inst);
    }

    #[test]
    fn circori_errors() {
        let zero = parse_circori("p circori 2 1\ne 1 2 0\n").unwrap_err();
        assert_eq!(zero.line, 2);
        assert!(zero.msg.contains("weight 0"));
        assert!(parse_circori("p circori 2 2\ne 1 2 1\n").is_err());
        assert!(parse_circori("p circori 2 1\ne 1 3 1\n").is_err());
        assert!(parse_circori("p circori 2 1\ne 1 1 1\n").is_err());
        assert!(parse_circori("p bcol 2 1 2\ne 1 2\n").is_err());
        assert!(parse_circori("").is_err());
        assert!(parse_circori("p circori 2 1\ne 1 2 x\n").is_err());
    }

    #[test]
    fn relabels_sparse_ids() {
        let inst = CircOriInstance::from_weighted_edges([4, 9], [(9, 4, 3)]).unwrap();
        assert_eq!(write_circori(&inst), "p circori 2 1\ne 1 2 3\n");
    }

    #[test]
    fn bcol_parse_and_write() {
        let text = "p bcol 5 5 3\ne 1 2\ne 2 3\ne 3 4\ne 4 5\ne 1 5\n";
        let inst = parse_bcol(text).unwrap();
        assert_eq!(inst.k, 3);
        assert_eq!(inst.graph.edge_count(), 5);
        assert_eq!(write_bcol(&inst), "p bcol 5 5 3\ne 1 2\ne 1 5\ne 2 3\ne 3 4\ne 4 5\n");
        assert!(parse_bcol("p bcol 2 1 0\ne 1 2\n").is_err());
    }

    #[test]
    fn pd_parse_and_write() {
        let text = "s pd 2 2 3\nb 1 1 2\nb 2 2 3\n";
        let pd = parse_pd(text).unwrap();
        assert_eq!(pd, PathDecomposition::from_slices(&[&[1, 2], &[2, 3]]));
        assert_eq!(write_pd(&pd, 3), text);
        assert!(parse_pd("s pd 2 2 3\nb 2 1 2\nb 1 2 3\n").is_err());
        assert!(parse_pd("s pd 1 3 3\nb 1 1 2\n").is_err());
        assert!(parse_pd("s pd 2 2 3\nb 1 1 2\n").is_err());
        assert!(parse_pd("s pd 1 1 3\nb 1 4\n").is_err());
        assert_eq!(parse_pd("s pd 1 0 0\nb 1\n").unwrap().len(), 1);
    }

    #[test]
    fn small_formats() {
        let arcs = vec![Arc::new(1, 2), Arc::new(3, 1)];
        assert_eq!(parse_orientation(&write_orientation(arcs.clone())).unwrap(), arcs);
        assert!(parse_orientation("a 1\n").is_err());

        let c: Coloring = [(1, 0), (2, 2)].into_iter().collect();
        assert_eq!(write_coloring(&c), "v 1 0\nv 2 2\n");
        assert_eq!(parse_coloring(&write_coloring(&c)).unwrap(), c);
        assert!(parse_coloring("v 1 0\nv 1 1\n").is_err());

        assert_eq!(parse_order("o 3\nc mid\no 1\n").unwrap(), vec![3, 1]);
        assert_eq!(write_order(&[2, 1]), "o 2\no 1\n");
    }

    #[test]
    fn rolemap_roundtrip() {
        let red = build_instance(&parse_circori(TRIANGLE).unwrap()).unwrap();
        let text = write_rolemap(&red);
        assert!(text.starts_with("n 1 S\nn 2 L 1 1 1\n"));
        let roles = parse_rolemap(&text).unwrap();
        assert_eq!(&roles, red.roles());
        let h = parse_bcol(&write_bcol(red.target())).unwrap();
        let back = ReducedInstance::from_roles(&h.graph, h.k, &roles).unwrap();
        assert_eq!(back, red);
        assert_eq!(parse_rolemap("n 17 L 2 1 3\n").unwrap()[&17], VertexRole::L(2, 1, 3));
        assert!(parse_rolemap("n 1 Q 1 3\n").is_err());
        assert!(parse_rolemap("n 1 W\n").is_err());
        assert!(parse_rolemap("n 1 L 1 1\n").is_err());
    }
}
