//! Graph sources, β arguments and edge/vertex addressing.

use std::path::PathBuf;

use arboreal::algebra::{parse_rational, ratio_string};
use arboreal::forest::Mode;
use arboreal::graph::{generate, parse_graph, GraphKind};
use arboreal::{EdgeId, Error, Graph, Rational, Result, VertexId};
use clap::Args;
use num_traits::{One, Signed};
use serde_json::{json, Value};

#[derive(Args, Clone, Debug)]
#[group(required = true, multiple = false)]
pub struct Source {
    /// Graph file: `vertices <n>` then `<u> <v> <num>/<den> [label]` per edge
    #[arg(long, value_name = "PATH")]
    pub input: Option<PathBuf>,
    /// Named graph: complete:N, path:N, cycle:N, ladder:D, bipartite:A,B, bowtie
    #[arg(long = "gen", value_name = "SPEC")]
    pub generator: Option<String>,
}

#[derive(Args, Clone, Debug)]
pub struct GraphArgs {
    #[command(flatten)]
    pub source: Source,
    /// Uniform edge weight `p/q` replacing the graph's weights, or `symbolic`
    #[arg(long)]
    pub beta: Option<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Beta {
    Symbolic,
    Value(Rational),
}

pub fn parse_positive(text: &str) -> Result<Rational> {
    let x = parse_rational(text).ok_or_else(|| Error::InvalidArgument(format!("bad rational {text:?}")))?;
    if !x.is_positive() {
        return Err(Error::InvalidArgument(format!("beta must be positive, got {}", ratio_string(&x))));
    }
    Ok(x)
}

pub fn parse_beta(text: &str) -> Result<Beta> {
    if text.trim() == "symbolic" {
        Ok(Beta::Symbolic)
    } else {
        parse_positive(text).map(Beta::Value)
    }
}

/// Comma-separated positive rationals.
pub fn parse_grid(text: &str) -> Result<Vec<Rational>> {
    let grid: Vec<Rational> = text.split(',').map(parse_positive).collect::<Result<_>>()?;
    if grid.is_empty() {
        return Err(Error::InvalidArgument("empty beta grid".into()));
    }
    Ok(grid)
}

/// Comma-separated edge indices.
pub fn parse_indices(text: &str) -> Result<Vec<usize>> {
    text.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| {
            s.trim()
                .parse()
                .map_err(|_| Error::InvalidArgument(format!("bad edge index {s:?}")))
        })
        .collect()
}

pub struct Loaded {
    pub graph: Graph,
    pub source: String,
    pub mode: Mode,
}

impl Loaded {
    pub fn load(args: &GraphArgs) -> Result<Self> {
        let beta = args.beta.as_deref().map(parse_beta).transpose()?;
        let (graph, source) = match (&args.source.input, &args.source.generator) {
            (Some(path), _) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| Error::InvalidArgument(format!("cannot read {}: {e}", path.display())))?;
                (parse_graph(&text)?, path.display().to_string())
            }
            (None, Some(spec)) => {
                let kind: GraphKind = spec.parse()?;
                (generate(kind, Rational::one())?, format!("gen:{kind}"))
            }
            (None, None) => return Err(Error::InvalidArgument("give --input or --gen".into())),
        };
        let (graph, mode) = match beta {
            None => (graph, Mode::Weighted),
            Some(Beta::Value(b)) => (graph.with_uniform_weight(&b), Mode::Weighted),
            Some(Beta::Symbolic) => {
                if !graph.has_uniform_weights() {
                    return Err(Error::ModeMismatch);
                }
                (graph, Mode::Symbolic)
            }
        };
        Ok(Loaded { graph, source, mode })
    }

    pub fn edge(&self, index: usize) -> Result<EdgeId> {
        edge_at(&self.graph, index)
    }

    pub fn edges(&self, indices: &[usize]) -> Result<Vec<EdgeId>> {
        indices.iter().map(|&i| self.edge(i)).collect()
    }

    pub fn vertex(&self, v: u32) -> Result<VertexId> {
        let v = VertexId(v);
        if self.graph.contains_vertex(v) {
            Ok(v)
        } else {
            Err(Error::UnknownVertex(v))
        }
    }

    /// Index of an edge id in file order.
    pub fn index_of(&self, e: EdgeId) -> Option<usize> {
        self.graph.edges().iter().position(|x| x.id == e)
    }

    pub fn echo(&self) -> Value {
        json!({
            "source": self.source,
            "mode": mode_name(self.mode),
            "vertices": self.graph.num_vertices(),
            "edges": edges_json(&self.graph),
        })
    }
}

pub fn edge_at(g: &Graph, index: usize) -> Result<EdgeId> {
    g.edges().get(index).map(|e| e.id).ok_or_else(|| {
        Error::InvalidArgument(format!("edge index {index} out of range (graph has {} edges)", g.num_edges()))
    })
}

pub fn mode_name(mode: Mode) -> &'static str {
    match mode {
        Mode::Weighted => "weighted",
        Mode::Symbolic => "symbolic",
    }
}

pub fn edges_json(g: &Graph) -> Value {
    g.edges()
        .iter()
        .enumerate()
        .map(|(i, e)| {
            json!({
                "index": i,
                "id": e.id.0,
                "u": e.u.0,
                "v": e.v.0,
                "weight": ratio_string(&e.weight),
                "label": e.label,
            })
        })
        .collect()
}
