//! Exhaustive pair-margin scan over small connected graphs.

use std::path::{Path, PathBuf};

use arboreal::algebra::{parse_rational, ratio_string};
use arboreal::correlation::MeasureContext;
use arboreal::forest::{EventSpec, Mode};
use arboreal::graph::{enumerate_small_graphs, parse_graph, write_graph};
use arboreal::{Error, Graph, Rational, Result};
use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::input::{edge_at, parse_grid};
use crate::report::{exact, Report, Table, EXIT_VIOLATION};

/// Largest vertex count the scan accepts.
pub const MAX_SCAN_VERTICES: usize = 7;

/// One evaluated pair: probability margin `ℙ[e1]ℙ[e2] − ℙ[e1e2]`.
#[derive(Clone, Debug, PartialEq)]
pub struct PairMargin {
    pub graph: usize,
    pub beta: usize,
    pub e1: usize,
    pub e2: usize,
    pub margin: Rational,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScanSummary {
    pub graphs: Vec<Graph>,
    pub grid: Vec<Rational>,
    pub margins: Vec<PairMargin>,
}

impl ScanSummary {
    pub fn violations(&self) -> impl Iterator<Item = &PairMargin> {
        self.margins.iter().filter(|m| m.margin.is_negative())
    }

    pub fn min(&self) -> Option<&PairMargin> {
        self.margins.iter().min_by(|a, b| a.margin.cmp(&b.margin))
    }

    pub fn graph_min(&self, graph: usize) -> Option<&Rational> {
        self.margins.iter().filter(|m| m.graph == graph).map(|m| &m.margin).min()
    }

    /// Minimum, quartiles and maximum, read off the sorted margins.
    pub fn quantiles(&self) -> Option<[Rational; 5]> {
        if self.margins.is_empty() {
            return None;
        }
        let mut sorted: Vec<&Rational> = self.margins.iter().map(|m| &m.margin).collect();
        sorted.sort();
        let at = |q: usize| sorted[q * (sorted.len() - 1) / 4].clone();
        Some([at(0), at(1), at(2), at(3), at(4)])
    }

    pub fn witness_text(&self, m: &PairMargin) -> String {
        format!(
            "# witness e1 {} e2 {} beta {} margin {}\n{}",
            m.e1,
            m.e2,
            ratio_string(&self.grid[m.beta]),
            ratio_string(&m.margin),
            write_graph(&self.graphs[m.graph].with_uniform_weight(&self.grid[m.beta]))
        )
    }
}

fn graph_margins(g: &Graph, beta: &Rational, graph: usize, b: usize, cache: usize) -> Result<Vec<PairMargin>> {
    let gb = g.with_uniform_weight(beta);
    let mut ctx = MeasureContext::with_capacity(&gb, Mode::Weighted, cache)?;
    let z = ctx.mu_rational(&EventSpec::empty())?;
    let scale = beta * beta / (&z * &z);
    let ids = gb.edge_ids();
    let mut out = Vec::new();
    for a in 0..ids.len() {
        for c in a + 1..ids.len() {
            let m = ctx.nc_pair(ids[a], ids[c])?;
            let margin = m.margin.as_rational().expect("weighted mode") * &scale;
            out.push(PairMargin { graph, beta: b, e1: a, e2: c, margin });
        }
    }
    Ok(out)
}

/// Every connected simple graph on `2..=n_max` vertices (up to
/// isomorphism), every edge pair, every β in the grid.
pub fn scan(n_max: usize, grid: &[Rational], workers: usize, cache: usize) -> Result<ScanSummary> {
    if n_max > MAX_SCAN_VERTICES {
        return Err(Error::SizeLimit { what: "scan vertex count", limit: MAX_SCAN_VERTICES, actual: n_max });
    }
    let graphs: Vec<Graph> = enumerate_small_graphs(n_max, true)?.collect();
    let tasks: Vec<(usize, usize)> = (0..graphs.len()).flat_map(|g| (0..grid.len()).map(move |b| (g, b))).collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let parts: Vec<Vec<PairMargin>> = pool.install(|| {
        tasks
            .par_iter()
            .map(|&(g, b)| graph_margins(&graphs[g], &grid[b], g, b, cache))
            .collect::<Result<_>>()
    })?;
    Ok(ScanSummary { graphs, grid: grid.to_vec(), margins: parts.into_iter().flatten().collect() })
}

/// Re-reads a witness and recomputes its pair margin exactly.
pub fn replay_witness(text: &str) -> Result<Rational> {
    let header = text
        .lines()
        .find_map(|l| l.strip_prefix("# witness "))
        .ok_or_else(|| Error::Parse { line: 1, message: "missing `# witness` header".into() })?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    let field = |name: &str| {
        fields
            .iter()
            .position(|f| *f == name)
            .and_then(|i| fields.get(i + 1))
            .copied()
            .ok_or_else(|| Error::Parse { line: 1, message: format!("witness header lacks {name}") })
    };
    let index = |name: &str| -> Result<usize> {
        field(name)?.parse().map_err(|_| Error::Parse { line: 1, message: format!("bad {name}") })
    };
    let beta = parse_rational(field("beta")?).ok_or_else(|| Error::Parse { line: 1, message: "bad beta".into() })?;
    let g = parse_graph(text)?.with_uniform_weight(&beta);
    let (e1, e2) = (edge_at(&g, index("e1")?)?, edge_at(&g, index("e2")?)?);
    let mut ctx = MeasureContext::new(&g, Mode::Weighted)?;
    let z = ctx.mu_rational(&EventSpec::empty())?;
    let m = ctx.nc_pair(e1, e2)?;
    Ok(m.margin.as_rational().expect("weighted mode") * &beta * &beta / (&z * &z))
}

fn default_workers() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

pub fn scan_command(
    n_max: usize,
    beta: &str,
    workers: Option<usize>,
    witness_dir: Option<&Path>,
    cache: usize,
) -> Result<Report> {
    let grid = parse_grid(beta)?;
    let workers = workers.unwrap_or_else(default_workers);
    let s = scan(n_max, &grid, workers, cache)?;
    let mut r = Report::new("scan", json!({ "n_max": n_max, "graphs": s.graphs.len() }));
    r.param("beta", grid.iter().map(ratio_string).collect::<Vec<_>>());
    r.param("workers", workers);

    let mut witnesses = Vec::new();
    let mut confirmed = 0;
    for (k, v) in s.violations().enumerate() {
        let text = s.witness_text(v);
        let file: Option<PathBuf> = match witness_dir {
            Some(dir) => {
                std::fs::create_dir_all(dir).map_err(|e| Error::InvalidArgument(format!("{}: {e}", dir.display())))?;
                let path = dir.join(format!("witness-{k:04}.graph"));
                std::fs::write(&path, &text).map_err(|e| Error::InvalidArgument(format!("{}: {e}", path.display())))?;
                Some(path)
            }
            None => None,
        };
        let replayed = replay_witness(&text)?;
        let real = replayed.is_negative();
        confirmed += real as usize;
        witnesses.push(json!({
            "file": file.map(|p| p.display().to_string()),
            "graph_text": text,
            "e1": v.e1,
            "e2": v.e2,
            "beta": exact(&s.grid[v.beta]),
            "margin": exact(&v.margin),
            "replayed_margin": exact(&replayed),
            "confirmed": real,
        }));
    }

    let per_beta: Vec<Value> = grid
        .iter()
        .enumerate()
        .map(|(b, beta)| {
            let ms: Vec<&Rational> = s.margins.iter().filter(|m| m.beta == b).map(|m| &m.margin).collect();
            json!({
                "beta": exact(beta),
                "pairs": ms.len(),
                "min_margin": ms.iter().min().map(|x| exact(x)),
                "zero": ms.iter().filter(|x| x.is_zero()).count(),
                "negative": ms.iter().filter(|x| x.is_negative()).count(),
            })
        })
        .collect();
    let per_graph: Vec<Value> = s
        .graphs
        .iter()
        .enumerate()
        .map(|(i, g)| {
            json!({
                "index": i,
                "vertices": g.num_vertices(),
                "edges": g.num_edges(),
                "min_margin": s.graph_min(i).map(exact),
            })
        })
        .collect();
    let q = s.quantiles();
    let zero = s.margins.iter().filter(|m| m.margin.is_zero()).count();
    let negative = s.violations().count();
    r.results = json!({
        "graphs": s.graphs.len(),
        "evaluations": s.margins.len(),
        "distribution": {
            "min": q.as_ref().map(|q| exact(&q[0])),
            "q1": q.as_ref().map(|q| exact(&q[1])),
            "median": q.as_ref().map(|q| exact(&q[2])),
            "q3": q.as_ref().map(|q| exact(&q[3])),
            "max": q.as_ref().map(|q| exact(&q[4])),
            "zero": zero,
            "positive": s.margins.len() - zero - negative,
            "negative": negative,
        },
        "min_location": s.min().map(|m| json!({
            "graph": m.graph,
            "graph_text": write_graph(&s.graphs[m.graph]),
            "e1": m.e1,
            "e2": m.e2,
            "beta": exact(&s.grid[m.beta]),
            "margin": exact(&m.margin),
        })),
        "per_beta": per_beta,
        "per_graph": per_graph,
    });
    r.verdicts = json!({
        "violations": negative,
        "confirmed_violations": confirmed,
        "conjecture": if confirmed == 0 { "no_violation" } else { "violation_confirmed" },
    });
    r.witnesses = Value::Array(witnesses);
    r.table = Some(Table {
        header: vec!["graph", "vertices", "edges", "min_margin"],
        rows: s
            .graphs
            .iter()
            .enumerate()
            .map(|(i, g)| {
                vec![
                    i.to_string(),
                    g.num_vertices().to_string(),
                    g.num_edges().to_string(),
                    s.graph_min(i).map(ratio_string).unwrap_or_default(),
                ]
            })
            .collect(),
    });
    if confirmed > 0 {
        r.code = EXIT_VIOLATION;
    }
    Ok(r)
}
