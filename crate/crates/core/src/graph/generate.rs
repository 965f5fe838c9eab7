use std::fmt;
use std::str::FromStr;

use super::{Multigraph, VertexId};
use crate::algebra::Scalar;
use crate::error::{Error, Result};

/// Named graph families.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GraphKind {
    Complete(usize),
    /// `n` vertices in a line.
    Path(usize),
    Cycle(usize),
    /// `{1..d} x {0,1}`: `d` rungs and `2(d-1)` rails.
    Ladder(usize),
    CompleteBipartite(usize, usize),
    /// Two triangles sharing one vertex.
    Bowtie,
}

impl FromStr for GraphKind {
    type Err = Error;

    /// Parses generator specs such as `complete:4`, `ladder:3`,
    /// `bipartite:2,3` and `bowtie`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("unknown generator spec {s:?}"));
        let (name, args) = s.split_once(':').unwrap_or((s, ""));
        let nums: Vec<usize> = if args.is_empty() {
            Vec::new()
        } else {
            args.split(',')
                .map(|a| a.trim().parse().map_err(|_| bad()))
                .collect::<Result<_>>()?
        };
        let kind = match (name.trim(), nums.as_slice()) {
            ("complete", [n]) => GraphKind::Complete(*n),
            ("path", [n]) => GraphKind::Path(*n),
            ("cycle", [n]) => GraphKind::Cycle(*n),
            ("ladder", [d]) => GraphKind::Ladder(*d),
            ("bipartite" | "complete_bipartite", [a, b]) => GraphKind::CompleteBipartite(*a, *b),
            ("bowtie", []) => GraphKind::Bowtie,
            _ => return Err(bad()),
        };
        Ok(kind)
    }
}

impl fmt::Display for GraphKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphKind::Complete(n) => write!(f, "complete:{n}"),
            GraphKind::Path(n) => write!(f, "path:{n}"),
            GraphKind::Cycle(n) => write!(f, "cycle:{n}"),
            GraphKind::Ladder(d) => write!(f, "ladder:{d}"),
            GraphKind::CompleteBipartite(a, b) => write!(f, "bipartite:{a},{b}"),
            GraphKind::Bowtie => write!(f, "bowtie"),
        }
    }
}

/// Builds the named graph with every edge weighted `weight`. Edges are
/// numbered in a fixed order: lexicographic endpoint pairs for complete
/// graphs, consecutive pairs along paths and cycles, and rung-then-rails
/// per ladder level.
pub fn generate<W: Scalar>(kind: GraphKind, weight: W) -> Result<Multigraph<W>> {
    let size_ok = match kind {
        GraphKind::Complete(n) | GraphKind::Path(n) | GraphKind::Cycle(n) | GraphKind::Ladder(n) => n >= 1,
        GraphKind::CompleteBipartite(a, b) => a >= 1 && b >= 1,
        GraphKind::Bowtie => true,
    };
    if !size_ok {
        return Err(Error::InvalidArgument(format!("{kind}: size parameters must be >= 1")));
    }
    let mut pairs: Vec<(u32, u32)> = Vec::new();
    let n = match kind {
        GraphKind::Complete(n) => {
            for i in 0..n as u32 {
                for j in i + 1..n as u32 {
                    pairs.push((i, j));
                }
            }
            n
        }
        GraphKind::Path(n) => {
            pairs.extend((1..n as u32).map(|i| (i - 1, i)));
            n
        }
        GraphKind::Cycle(n) => {
            pairs.extend((1..n as u32).map(|i| (i - 1, i)));
            pairs.push((n as u32 - 1, 0));
            n
        }
        GraphKind::Ladder(d) => {
            // Level i holds vertices 2i (side 0) and 2i+1 (side 1).
            for i in 0..d as u32 {
                pairs.push((2 * i, 2 * i + 1));
                if i + 1 < d as u32 {
                    pairs.push((2 * i, 2 * i + 2));
                    pairs.push((2 * i + 1, 2 * i + 3));
                }
            }
            2 * d
        }
        GraphKind::CompleteBipartite(a, b) => {
            for i in 0..a as u32 {
                for j in 0..b as u32 {
                    pairs.push((i, a as u32 + j));
                }
            }
            a + b
        }
        GraphKind::Bowtie => {
            pairs.extend([(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 2)]);
            5
        }
    };
    let mut g = Multigraph::new(n);
    for (u, v) in pairs {
        g.add_edge(VertexId(u), VertexId(v), weight.clone())?;
    }
    Ok(g)
}
