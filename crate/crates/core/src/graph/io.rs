//! Line-oriented graph text format:
//!
//! ```text
//! # comment
//! vertices 3
//! 0 1 1/2
//! 1 2 3/1 rail
//! ```
//!
//! Vertices are `0..n`; each edge line is `<u> <v> <num>/<den> [label]`
//! and edges are numbered in file order.

use std::fmt::Write;

use num_rational::BigRational;

use super::{Multigraph, VertexId};
use crate::algebra::{parse_rational, ratio_string};
use crate::error::{Error, Result};

pub fn parse_graph(text: &str) -> Result<Multigraph<BigRational>> {
    let mut graph: Option<Multigraph<BigRational>> = None;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let err = |message: String| Error::Parse { line: line_no, message };
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let Some(g) = graph.as_mut() else {
            match fields.as_slice() {
                ["vertices", n] => {
                    let n: usize = n.parse().map_err(|_| err(format!("bad vertex count {n:?}")))?;
                    graph = Some(Multigraph::new(n));
                    continue;
                }
                _ => return Err(err("expected header `vertices <n>`".into())),
            }
        };
        if !(3..=4).contains(&fields.len()) {
            return Err(err("expected `<u> <v> <num>/<den> [label]`".into()));
        }
        let vertex = |s: &str| -> Result<VertexId> {
            let v: u32 = s.parse().map_err(|_| err(format!("bad vertex {s:?}")))?;
            if (v as usize) < g.num_vertices() {
                Ok(VertexId(v))
            } else {
                Err(err(format!("vertex {v} out of range")))
            }
        };
        let u = vertex(fields[0])?;
        let v = vertex(fields[1])?;
        let w = parse_rational(fields[2]).ok_or_else(|| err(format!("bad weight {:?}", fields[2])))?;
        let label = fields.get(3).map(|s| s.to_string());
        g.add_labeled_edge(u, v, w, label)
            .map_err(|e| err(e.to_string()))?;
    }
    graph.ok_or(Error::Parse {
        line: text.lines().count().max(1),
        message: "missing header `vertices <n>`".into(),
    })
}

/// Writes the graph in text format. Vertices are renumbered by position,
/// and edges appear in id order.
pub fn write_graph(g: &Multigraph<BigRational>) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "vertices {}", g.num_vertices());
    for e in g.edges() {
        let _ = write!(out, "{} {} {}", g.idx(e.u), g.idx(e.v), ratio_string(&e.weight));
        if let Some(label) = &e.label {
            let _ = write!(out, " {label}");
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational;
    use crate::graph::EdgeId;
    use proptest::prelude::*;

    #[test]
    fn parses_with_comments_and_labels() {
        let g = parse_graph("# triangle\nvertices 3\n0 1 1/2\n1 2 3 # integer weight\n2 0 2/4 chord\n").unwrap();
        assert_eq!(g.num_edges(), 3);
        assert_eq!(g.weight(EdgeId(1)).unwrap(), &rational(3, 1));
        assert_eq!(g.weight(EdgeId(2)).unwrap(), &rational(1, 2));
        assert_eq!(g.edge(EdgeId(2)).unwrap().label.as_deref(), Some("chord"));
    }

    #[test]
    fn errors_carry_line_numbers() {
        let cases = [
            ("vertices 2\n0 1 1/2\n0 5 1/1\n", 3),
            ("0 1 1/1\n", 1),
            ("vertices 2\n\n0 1 x\n", 3),
            ("vertices 2\n0 1 -1/2\n", 2),
            ("vertices 2\n0 1\n", 2),
        ];
        for (text, line) in cases {
            match parse_graph(text) {
                Err(Error::Parse { line: l, .. }) => assert_eq!(l, line, "{text:?}"),
                other => panic!("expected parse error for {text:?}, got {other:?}"),
            }
        }
        assert!(matches!(parse_graph("# nothing\n"), Err(Error::Parse { .. })));
    }

    proptest! {
        #[test]
        fn write_then_parse_is_identity(
            n in 1usize..6,
            raw in proptest::collection::vec((0u32..6, 0u32..6, 1i64..20, 1i64..20), 0..10),
        ) {
            let mut g = Multigraph::new(n);
            for (u, v, a, b) in raw {
                g.add_edge(VertexId(u % n as u32), VertexId(v % n as u32), rational(a, b)).unwrap();
            }
            prop_assert_eq!(parse_graph(&write_graph(&g)).unwrap(), g);
        }
    }
}
