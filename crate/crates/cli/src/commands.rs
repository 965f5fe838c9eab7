//! One function per subcommand, each producing a [`Report`].

use std::collections::BTreeSet;

use arboreal::algebra::ratio_string;
use arboreal::correlation::{
    beta_threshold, i_k_sum, kn_closed_forms, leading_coeff_analysis, second_coeff, MeasureContext, NCMargin,
    Verdict,
};
use arboreal::electrical::{effective_resistance, tree_count, unit_current_flow, Conductances};
use arboreal::forest::{forest_polynomial, mu_symbolic, prob, EventSpec, Mode};
use arboreal::graph::{generate, write_graph, GraphKind};
use arboreal::reduction::{nc_via_reduction, reduce_with, Moves};
use arboreal::sampling::{arboreal_rejection, mc_nc_probe, ust_report, SampleReport};
use arboreal::{EdgeId, Error, Graph, Rational, Result};
use clap::ValueEnum;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde_json::{json, Map, Value};

use crate::input::{edges_json, mode_name, parse_indices, Loaded};
use crate::report::{cell, exact, measure, polynomial, Report, Table, EXIT_VIOLATION};
use crate::Command;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Sampler {
    /// Bernoulli percolation conditioned on acyclicity
    Forest,
    /// Wilson's algorithm, weights as conductances
    Ust,
}

pub fn execute(command: &Command) -> Result<Report> {
    match command {
        Command::Gen { graph, .. } => gen(&Loaded::load(graph)?),
        Command::NcPair { graph, e1, e2, common } => nc_pair(&Loaded::load(graph)?, *e1, *e2, common.cache_size),
        Command::NcAll { graph, common } => nc_all(&Loaded::load(graph)?, common.cache_size),
        Command::NcSets { graph, s1, s2, common } => nc_sets(&Loaded::load(graph)?, s1, s2, common.cache_size),
        Command::Poly { graph, require, forbid, .. } => poly(&Loaded::load(graph)?, require, forbid),
        Command::Trees { graph, require, forbid, .. } => trees(&Loaded::load(graph)?, require, forbid),
        Command::Resistance { graph, u, v, .. } => resistance(&Loaded::load(graph)?, *u, *v),
        Command::Flow { graph, u, v, .. } => flow(&Loaded::load(graph)?, *u, *v),
        Command::Reduce { graph, explain, fixpoint, e1, e2, .. } => {
            let pair = e1.zip(*e2);
            reduce(&Loaded::load(graph)?, *explain, *fixpoint, pair)
        }
        Command::Kn { n, direct, ik_upto, .. } => kn(*n, *direct, *ik_upto),
        Command::Sample { graph, sampler, seed, samples, chains, e1, e2, .. } => {
            sample(&Loaded::load(graph)?, *sampler, *seed, *samples, *chains, e1.zip(*e2))
        }
        Command::Scan { n_max, beta, workers, witness_dir, common } => {
            crate::scan::scan_command(*n_max, beta, *workers, witness_dir.as_deref(), common.cache_size)
        }
    }
}

fn gen(g: &Loaded) -> Result<Report> {
    let mut r = Report::new("gen", json!({ "source": g.source }));
    let text = write_graph(&g.graph);
    r.results = json!({
        "vertices": g.graph.num_vertices(),
        "edges": edges_json(&g.graph),
        "graph_text": text,
    });
    r.text = Some(text);
    Ok(r)
}

fn pair_json(g: &Loaded, e: EdgeId) -> Value {
    let edge = g.graph.edge(e).expect("edge from the graph");
    json!({ "index": g.index_of(e), "u": edge.u.0, "v": edge.v.0 })
}

fn margin_json(m: &NCMargin) -> Value {
    let witnesses: Map<String, Value> = m.witnesses.iter().map(|(k, v)| (k.clone(), measure(v))).collect();
    json!({
        "margin": measure(&m.margin),
        "verdict": m.verdict.to_string(),
        "alternate": m.alternate.as_ref().map(measure),
        "forms_agree": m.forms_agree(),
        "measures": witnesses,
    })
}

fn nc_pair(g: &Loaded, i1: usize, i2: usize, cache: usize) -> Result<Report> {
    let (e1, e2) = (g.edge(i1)?, g.edge(i2)?);
    let mut ctx = MeasureContext::with_capacity(&g.graph, g.mode, cache)?;
    let m = ctx.nc_pair(e1, e2)?;
    let mut r = Report::new("nc-pair", g.echo());
    r.param("e1", pair_json(g, e1));
    r.param("e2", pair_json(g, e2));
    let mut results = margin_json(&m);
    match g.mode {
        Mode::Weighted => {
            let mut p = |s: &[EdgeId]| ctx.prob_requiring(&s.iter().copied().collect());
            results["probabilities"] = json!({
                "e1": exact(&p(&[e1])?),
                "e2": exact(&p(&[e2])?),
                "e1e2": exact(&p(&[e1, e2])?),
            });
            r.table = Some(Table {
                header: vec!["e1", "e2", "margin", "verdict"],
                rows: vec![vec![i1.to_string(), i2.to_string(), cell(&m.margin), m.verdict.to_string()]],
            });
        }
        Mode::Symbolic => {
            if g.graph.is_connected() {
                let lead = leading_coeff_analysis(&g.graph, e1, e2)?;
                let second = second_coeff(&g.graph, e1, e2)?;
                results["leading_coefficient"] = json!({
                    "degree": lead.degree,
                    "value": exact(&lead.lead),
                    "from_polynomial": exact(&lead.from_polynomial),
                    "agrees": lead.agrees(),
                    "interpretation": format!("{:?}", lead.interpretation),
                });
                results["second_coefficient"] = json!({
                    "degree": second.degree,
                    "value": exact(&second.from_polynomial),
                    "from_two_tree_forests": exact(&second.from_two_tree_forests),
                    "agrees": second.agrees(),
                });
            }
            let t = beta_threshold(&g.graph, e1, e2)?;
            results["threshold"] = json!({
                "side": format!("{:?}", t.side),
                "beta_star": t.beta_star.as_ref().map(|b| json!({ "lo": exact(&b.lo), "hi": exact(&b.hi) })),
                "positive_roots": t.roots.len(),
            });
        }
    }
    r.results = results;
    r.verdicts = json!({ "pair": m.verdict.to_string() });
    if m.verdict == Verdict::Violated {
        r.code = EXIT_VIOLATION;
        r.witnesses = json!([{ "e1": i1, "e2": i2, "margin": measure(&m.margin) }]);
    }
    Ok(r)
}

fn nc_all(g: &Loaded, cache: usize) -> Result<Report> {
    let mut ctx = MeasureContext::with_capacity(&g.graph, g.mode, cache)?;
    let ids = g.graph.edge_ids();
    let mut rows = Vec::new();
    let mut pairs = Vec::new();
    let mut witnesses = Vec::new();
    let (mut holds, mut violated, mut zero) = (0usize, 0usize, 0usize);
    for (a, &e1) in ids.iter().enumerate() {
        for (b, &e2) in ids.iter().enumerate().skip(a + 1) {
            let m = ctx.nc_pair(e1, e2)?;
            match m.verdict {
                Verdict::Holds => holds += 1,
                Verdict::Violated => violated += 1,
                Verdict::IdenticallyZero => zero += 1,
            }
            if m.verdict == Verdict::Violated {
                witnesses.push(json!({ "e1": a, "e2": b, "margin": measure(&m.margin) }));
            }
            rows.push(vec![a.to_string(), b.to_string(), cell(&m.margin), m.verdict.to_string()]);
            pairs.push(json!({ "e1": a, "e2": b, "margin": measure(&m.margin), "verdict": m.verdict.to_string() }));
        }
    }
    let mut r = Report::new("nc-all", g.echo());
    r.results = json!({ "pairs": pairs });
    r.verdicts = json!({
        "holds": holds,
        "violated": violated,
        "identically_zero": zero,
        "all": if violated == 0 { "holds" } else { "violated" },
    });
    r.witnesses = Value::Array(witnesses);
    r.table = Some(Table { header: vec!["e1", "e2", "margin", "verdict"], rows });
    if violated > 0 {
        r.code = EXIT_VIOLATION;
    }
    Ok(r)
}

fn edge_set(g: &Loaded, text: &str) -> Result<BTreeSet<EdgeId>> {
    Ok(g.edges(&parse_indices(text)?)?.into_iter().collect())
}

fn nc_sets(g: &Loaded, s1: &str, s2: &str, cache: usize) -> Result<Report> {
    if g.mode == Mode::Symbolic {
        return Err(Error::InvalidArgument("nc-sets works with numeric weights; pass --beta p/q".into()));
    }
    let (a, b) = (edge_set(g, s1)?, edge_set(g, s2)?);
    let m = MeasureContext::with_capacity(&g.graph, Mode::Weighted, cache)?.nc_sets(&a, &b)?;
    let mut r = Report::new("nc-sets", g.echo());
    r.param("s1", parse_indices(s1)?);
    r.param("s2", parse_indices(s2)?);
    r.results = margin_json(&m);
    r.verdicts = json!({ "sets": m.verdict.to_string() });
    r.table = Some(Table {
        header: vec!["s1", "s2", "margin", "verdict"],
        rows: vec![vec![s1.to_string(), s2.to_string(), cell(&m.margin), m.verdict.to_string()]],
    });
    if m.verdict == Verdict::Violated {
        r.code = EXIT_VIOLATION;
        r.witnesses = json!([{ "s1": s1, "s2": s2, "margin": measure(&m.margin) }]);
    }
    Ok(r)
}

fn event(g: &Loaded, require: &str, forbid: &str) -> Result<EventSpec> {
    EventSpec::new(edge_set(g, require)?, edge_set(g, forbid)?)
}

fn poly(g: &Loaded, require: &str, forbid: &str) -> Result<Report> {
    if !g.graph.has_uniform_weights() {
        return Err(Error::ModeMismatch);
    }
    let ev = event(g, require, forbid)?;
    let p = if ev.is_empty() { forest_polynomial(&g.graph)? } else { mu_symbolic(&g.graph, &ev)? };
    let mut r = Report::new("poly", g.echo());
    r.param("require", parse_indices(require)?);
    r.param("forbid", parse_indices(forbid)?);
    r.results = json!({ "polynomial": polynomial(&p) });
    r.text = Some(format!("{p}\n"));
    Ok(r)
}

fn trees(g: &Loaded, require: &str, forbid: &str) -> Result<Report> {
    let ev = event(g, require, forbid)?;
    let count = tree_count(&g.graph, &Conductances::from_weights(&g.graph), &ev.require, &ev.forbid)?;
    let mut r = Report::new("trees", g.echo());
    r.param("require", parse_indices(require)?);
    r.param("forbid", parse_indices(forbid)?);
    r.results = json!({ "tree_count": exact(&count) });
    r.table = Some(Table { header: vec!["tree_count"], rows: vec![vec![ratio_string(&count)]] });
    Ok(r)
}

fn resistance(g: &Loaded, u: u32, v: u32) -> Result<Report> {
    let (a, b) = (g.vertex(u)?, g.vertex(v)?);
    let reff = effective_resistance(&g.graph, &Conductances::from_weights(&g.graph), a, b)?;
    let mut r = Report::new("resistance", g.echo());
    r.param("u", u);
    r.param("v", v);
    r.results = json!({ "effective_resistance": exact(&reff) });
    r.table = Some(Table {
        header: vec!["u", "v", "effective_resistance"],
        rows: vec![vec![u.to_string(), v.to_string(), ratio_string(&reff)]],
    });
    Ok(r)
}

fn flow(g: &Loaded, u: u32, v: u32) -> Result<Report> {
    let (a, b) = (g.vertex(u)?, g.vertex(v)?);
    let c = Conductances::from_weights(&g.graph);
    let f = unit_current_flow(&g.graph, &c, a, b)?;
    let residuals = f.residuals(&g.graph, &c)?;
    let mut r = Report::new("flow", g.echo());
    r.param("u", u);
    r.param("v", v);
    let potential: Map<String, Value> = f.potential.iter().map(|(v, p)| (v.0.to_string(), exact(p))).collect();
    let current: Vec<Value> = f
        .current
        .iter()
        .map(|(e, i)| json!({ "index": g.index_of(*e), "current": exact(i) }))
        .collect();
    r.results = json!({
        "effective_resistance": exact(f.resistance()),
        "energy": exact(&f.energy(&c)?),
        "potential": potential,
        "current": current,
    });
    r.verdicts = json!({ "kirchhoff_residuals_zero": residuals.is_zero() });
    Ok(r)
}

fn reduce(g: &Loaded, explain: bool, fixpoint: bool, pair: Option<(usize, usize)>) -> Result<Report> {
    let moves = Moves { fixpoint, ..Moves::PIPELINE };
    let red = reduce_with(&g.graph, moves)?;
    let map = red.trace.composed();
    let images: Vec<Value> = g
        .graph
        .edges()
        .iter()
        .enumerate()
        .map(|(i, e)| json!({ "index": i, "id": e.id.0, "image": map.get(e.id).map(|x| x.0) }))
        .collect();
    let log = red.trace.explain();
    let reduced = write_graph(&red.graph);
    let mut r = Report::new("reduce", g.echo());
    r.param("fixpoint", fixpoint);
    r.results = json!({
        "steps": log.lines().collect::<Vec<_>>(),
        "constant_c": exact(&red.trace.constant_c()),
        "bridge_factor": exact(&red.trace.bridge_factor()),
        "reduced_edges": edges_json(&red.graph),
        "reduced_graph_text": reduced,
        "components": red.components.iter().map(write_graph).collect::<Vec<_>>(),
        "edge_images": images,
    });
    let mut text = log;
    text += &format!("# reduced graph, {} component(s)\n{reduced}", red.components.len());
    if let Some((i1, i2)) = pair {
        let via = nc_via_reduction(&g.graph, g.edge(i1)?, g.edge(i2)?)?;
        r.param("e1", i1);
        r.param("e2", i2);
        r.verdicts = json!({
            "pair": via.verdict.to_string(),
            "reason": format!("{:?}", via.reason),
            "deferred": via.deferred.as_ref().map(|(a, b, m)| json!({ "e1": a.0, "e2": b.0, "margin": measure(&m.margin) })),
        });
        text += &format!("# pair {i1},{i2}: {} ({:?})\n", via.verdict, via.reason);
        if via.verdict == Verdict::Violated {
            r.code = EXIT_VIOLATION;
        }
    }
    if explain {
        r.text = Some(text);
    }
    Ok(r)
}

const MAX_DIRECT_KN: usize = 8;

fn kn(n: usize, direct: bool, ik_upto: Option<usize>) -> Result<Report> {
    let a = kn_closed_forms(n)?;
    let mut r = Report::new("kn", json!({ "n": n }));
    r.param("direct", direct);
    r.param("ik_upto", ik_upto);
    let cases: Vec<Value> = a
        .cases
        .iter()
        .map(|c| json!({ "k": c.k, "values": c.values.iter().map(exact).collect::<Vec<_>>(), "total": exact(&c.total()) }))
        .collect();
    let mut results = json!({
        "tree_counts": { "all": exact(&a.t1), "one_edge": exact(&a.te), "two_disjoint_edges": exact(&a.tee) },
        "a_k": a.a_k.iter().map(exact).collect::<Vec<_>>(),
        "cases": cases,
        "i_k": a.i_k.iter().map(exact).collect::<Vec<_>>(),
        "sum_i": exact(&a.sum_i),
        "second_coeff_plain_sum": exact(&a.second_coeff_from_cases),
        "second_coeff_half_weighted": exact(&a.second_coeff_half_weighted),
        "second_coeff_factored": exact(&a.factored_second_coeff()),
    });
    let mut verdicts = json!({
        "cases_match_closed_form": a.cases_match_closed_form(),
        "sum_i_below_one": a.sum_i_below_one,
    });
    if direct {
        if n > MAX_DIRECT_KN {
            return Err(Error::SizeLimit { what: "n for direct K_n coefficients", limit: MAX_DIRECT_KN, actual: n });
        }
        let g: Graph = generate(GraphKind::Complete(n), Rational::one())?;
        let (e1, e2) = disjoint_pair(&g);
        let lead = leading_coeff_analysis(&g, e1, e2)?;
        let second = second_coeff(&g, e1, e2)?;
        results["direct"] = json!({
            "leading_degree": lead.degree,
            "leading": exact(&lead.from_polynomial),
            "second_degree": second.degree,
            "second": exact(&second.from_polynomial),
        });
        verdicts["leading_vanishes"] = json!(lead.from_polynomial.is_zero());
        verdicts["plain_sum_matches_direct"] = json!(a.second_coeff_from_cases == second.from_polynomial);
        verdicts["half_weighted_matches_direct"] = json!(a.second_coeff_half_weighted == second.from_polynomial);
    }
    if let Some(m) = ik_upto {
        let scan = ik_scan(m)?;
        results["ik_scan"] = json!({
            "upto": m,
            "n0": scan.0,
            "max_sum": scan.1.as_ref().map(|(n, s)| json!({ "n": n, "sum": exact(s) })),
        });
        verdicts["ik_bound_from_n0"] = json!(scan.0.is_some());
    }
    r.results = results;
    r.verdicts = verdicts;
    Ok(r)
}

pub(crate) fn disjoint_pair(g: &Graph) -> (EdgeId, EdgeId) {
    let e1 = g.edges()[0].clone();
    let e2 = g.edges().iter().find(|e| !e.shares_endpoint(&e1)).expect("n >= 4");
    (e1.id, e2.id)
}

type IkScan = (Option<usize>, Option<(usize, Rational)>);

/// Smallest `N₀ ≥ 5` with `Σ I_k < 1` for all `n ∈ [N₀, m]`, and the
/// largest sum seen from `N₀` on.
pub fn ik_scan(m: usize) -> Result<IkScan> {
    let sums: Vec<(usize, Rational)> = (5..=m)
        .into_par_iter()
        .map(|n| Ok((n, i_k_sum(n)?)))
        .collect::<Result<_>>()?;
    let one = Rational::one();
    let n0 = sums.iter().rev().take_while(|(_, s)| *s < one).last().map(|(n, _)| *n);
    let max = n0.and_then(|n0| sums.iter().filter(|(n, _)| *n >= n0).max_by(|a, b| a.1.cmp(&b.1)).cloned());
    Ok((n0, max))
}

fn sample(
    g: &Loaded,
    sampler: Sampler,
    seed: u64,
    samples: u64,
    chains: u64,
    pair: Option<(usize, usize)>,
) -> Result<Report> {
    if chains == 0 {
        return Err(Error::InvalidArgument("--chains must be at least 1".into()));
    }
    let beta = match sampler {
        Sampler::Forest => {
            if !g.graph.has_uniform_weights() {
                return Err(Error::InvalidArgument("the forest sampler needs a uniform beta".into()));
            }
            g.graph.edges().first().map(|e| e.weight.clone()).unwrap_or_else(Rational::one)
        }
        Sampler::Ust => Rational::one(),
    };
    let c = Conductances::from_weights(&g.graph);
    let run = |s: u64| match sampler {
        Sampler::Forest => arboreal_rejection(&g.graph, &beta, s, samples),
        Sampler::Ust => ust_report(&g.graph, &c, s, samples),
    };
    let reports: Vec<SampleReport> = (0..chains).into_par_iter().map(|i| run(seed + i)).collect::<Result<_>>()?;
    let mut merged = reports[0].clone();
    for other in &reports[1..] {
        merged.merge(other)?;
    }
    let exact_prob = |e: EdgeId| -> Result<Rational> {
        match sampler {
            Sampler::Forest => prob(&g.graph, &EventSpec::requiring([e])),
            Sampler::Ust => arboreal::electrical::ust_edge_probability(&g.graph, &c, e),
        }
    };
    let mut edges = Vec::new();
    let mut rows = Vec::new();
    for (i, e) in g.graph.edges().iter().enumerate() {
        let freq = merged.frequency(e.id)?;
        let p = exact_prob(e.id)?;
        edges.push(json!({
            "index": i,
            "count": merged.count(e.id)?,
            "frequency": freq,
            "exact": exact(&p),
        }));
        rows.push(vec![i.to_string(), merged.count(e.id)?.to_string(), freq.to_string(), ratio_string(&p)]);
    }
    let mut r = Report::new("sample", g.echo());
    r.param("sampler", format!("{sampler:?}").to_lowercase());
    r.param("seed", seed);
    r.param("samples", samples);
    r.param("chains", chains);
    r.param("mode", mode_name(g.mode));
    let mut results = json!({
        "n_samples": merged.n_samples,
        "attempts": merged.attempts,
        "acceptance_rate": merged.acceptance_rate(),
        "seeds": merged.seeds,
        "edges": edges,
    });
    if let Some((i1, i2)) = pair {
        if sampler != Sampler::Forest {
            return Err(Error::InvalidArgument("--e1/--e2 probe needs the forest sampler".into()));
        }
        let probe = mc_nc_probe(&g.graph, &beta, g.edge(i1)?, g.edge(i2)?, seed, samples)?;
        results["probe"] = json!({
            "e1": i1,
            "e2": i2,
            "estimate": probe.estimate,
            "stderr": probe.stderr,
            "note": "advisory estimate, not a verdict",
        });
    }
    r.results = results;
    r.table = Some(Table { header: vec!["edge", "count", "frequency", "exact"], rows });
    Ok(r)
}
