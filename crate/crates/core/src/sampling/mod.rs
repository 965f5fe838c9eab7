//! Monte Carlo cross-checks: Wilson's algorithm for weighted spanning trees
//! and rejection sampling of the forest measure from Bernoulli percolation.
//!
//! Samplers run on ChaCha8 seeded from a `u64`, so a seed reproduces a
//! report on every platform. Floats only appear in the sampling step and
//! in the summary statistics.

use std::collections::BTreeSet;

use num_rational::BigRational;
use num_traits::Signed;
use rand::distributions::{Bernoulli, Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::Scalar;
use crate::electrical::Conductances;
use crate::error::{Error, Result};
use crate::graph::{EdgeId, Multigraph, UnionFind};

pub type SamplerRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> SamplerRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Spanning tree drawn with probability proportional to `Π c(e)`, rooted
/// at the lowest vertex id.
pub fn wilson_ust<W: Scalar>(g: &Multigraph<W>, c: &Conductances<W>, seed: u64) -> Result<BTreeSet<EdgeId>> {
    Wilson::new(g, c)?.sample(&mut rng_from_seed(seed))
}

/// Prepared walk tables for repeated Wilson draws on one graph.
pub struct Wilson {
    ids: Vec<EdgeId>,
    // per vertex: (edge index, neighbour index) and a sampler over them
    steps: Vec<Vec<(usize, usize)>>,
    pick: Vec<Option<WeightedIndex<f64>>>,
}

impl Wilson {
    pub fn new<W: Scalar>(g: &Multigraph<W>, c: &Conductances<W>) -> Result<Self> {
        if !g.is_connected() {
            return Err(Error::NotConnected);
        }
        let n = g.num_vertices();
        let mut steps = vec![Vec::new(); n];
        let mut weights = vec![Vec::new(); n];
        for (i, e) in g.edges().iter().enumerate() {
            if e.is_loop() {
                continue;
            }
            let w = c.get(e.id)?.to_f64();
            let (u, v) = (g.idx(e.u), g.idx(e.v));
            steps[u].push((i, v));
            weights[u].push(w);
            steps[v].push((i, u));
            weights[v].push(w);
        }
        let pick = weights
            .iter()
            .map(|w| if w.is_empty() { None } else { WeightedIndex::new(w).ok() })
            .collect();
        Ok(Wilson {
            ids: g.edge_ids(),
            steps,
            pick,
        })
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> Result<BTreeSet<EdgeId>> {
        let n = self.steps.len();
        let mut in_tree = vec![false; n];
        let mut next: Vec<Option<(usize, usize)>> = vec![None; n];
        let mut tree = BTreeSet::new();
        if n == 0 {
            return Ok(tree);
        }
        in_tree[0] = true;
        for start in 1..n {
            let mut u = start;
            while !in_tree[u] {
                let pick = self.pick[u].as_ref().ok_or(Error::NotConnected)?;
                let step = self.steps[u][pick.sample(rng)];
                next[u] = Some(step);
                u = step.1;
            }
            // following the last exit from each vertex erases the loops
            let mut u = start;
            while !in_tree[u] {
                let (e, v) = next[u].expect("walk left this vertex");
                in_tree[u] = true;
                tree.insert(self.ids[e]);
                u = v;
            }
        }
        Ok(tree)
    }
}

/// Counts from a batch of sampled edge sets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SampleReport {
    pub seeds: Vec<u64>,
    pub edges: Vec<EdgeId>,
    pub n_samples: u64,
    /// Configurations drawn, accepted or not. Equals `n_samples` for
    /// samplers without rejection.
    pub attempts: u64,
    pub edge_counts: Vec<u64>,
    /// Upper-triangular joint counts, `pair_index(i, j)` with `i < j`.
    pub pair_counts: Vec<u64>,
}

impl SampleReport {
    pub fn new(edges: Vec<EdgeId>, seed: u64) -> Self {
        let m = edges.len();
        SampleReport {
            seeds: vec![seed],
            edges,
            n_samples: 0,
            attempts: 0,
            edge_counts: vec![0; m],
            pair_counts: vec![0; m * m.saturating_sub(1) / 2],
        }
    }

    fn pair_index(&self, i: usize, j: usize) -> usize {
        let (i, j) = if i < j { (i, j) } else { (j, i) };
        let m = self.edges.len();
        i * (2 * m - i - 1) / 2 + (j - i - 1)
    }

    fn position(&self, e: EdgeId) -> Result<usize> {
        self.edges.binary_search(&e).map_err(|_| Error::UnknownEdge(e))
    }

    /// Records one accepted configuration given by edge positions.
    fn record(&mut self, present: &[usize]) {
        self.n_samples += 1;
        for (a, &i) in present.iter().enumerate() {
            self.edge_counts[i] += 1;
            for &j in &present[a + 1..] {
                let k = self.pair_index(i, j);
                self.pair_counts[k] += 1;
            }
        }
    }

    pub fn count(&self, e: EdgeId) -> Result<u64> {
        Ok(self.edge_counts[self.position(e)?])
    }

    pub fn joint_count(&self, e1: EdgeId, e2: EdgeId) -> Result<u64> {
        let (i, j) = (self.position(e1)?, self.position(e2)?);
        if i == j {
            return Ok(self.edge_counts[i]);
        }
        Ok(self.pair_counts[self.pair_index(i, j)])
    }

    pub fn frequency(&self, e: EdgeId) -> Result<f64> {
        Ok(self.count(e)? as f64 / self.n_samples.max(1) as f64)
    }

    pub fn joint_frequency(&self, e1: EdgeId, e2: EdgeId) -> Result<f64> {
        Ok(self.joint_count(e1, e2)? as f64 / self.n_samples.max(1) as f64)
    }

    pub fn acceptance_rate(&self) -> f64 {
        if self.attempts == 0 {
            return 1.0;
        }
        self.n_samples as f64 / self.attempts as f64
    }

    /// Adds the counts of an independent chain on the same edge set.
    pub fn merge(&mut self, other: &SampleReport) -> Result<()> {
        if self.edges != other.edges {
            return Err(Error::InvalidArgument("reports cover different edge sets".into()));
        }
        self.seeds.extend(&other.seeds);
        self.n_samples += other.n_samples;
        self.attempts += other.attempts;
        for (a, b) in self.edge_counts.iter_mut().zip(&other.edge_counts) {
            *a += b;
        }
        for (a, b) in self.pair_counts.iter_mut().zip(&other.pair_counts) {
            *a += b;
        }
        Ok(())
    }
}

/// `n` Wilson draws on one seed.
pub fn ust_report<W: Scalar>(g: &Multigraph<W>, c: &Conductances<W>, seed: u64, n: u64) -> Result<SampleReport> {
    let wilson = Wilson::new(g, c)?;
    let mut rng = rng_from_seed(seed);
    let mut ids = g.edge_ids();
    ids.sort();
    let mut report = SampleReport::new(ids, seed);
    for _ in 0..n {
        let tree = wilson.sample(&mut rng)?;
        let present: Vec<usize> = tree.iter().map(|e| report.position(*e)).collect::<Result<_>>()?;
        report.attempts += 1;
        report.record(&present);
    }
    Ok(report)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RejectionConfig {
    /// Lowest acceptable acceptance rate.
    pub floor: f64,
    /// Attempts between acceptance-rate checks.
    pub window: u64,
}

impl Default for RejectionConfig {
    fn default() -> Self {
        RejectionConfig {
            floor: 1e-4,
            window: 100_000,
        }
    }
}

/// `n` forests of the measure with uniform weight `beta`, drawn as
/// Bernoulli(β/(1+β)) percolation conditioned on being acyclic.
pub fn arboreal_rejection<W: Scalar>(g: &Multigraph<W>, beta: &BigRational, seed: u64, n: u64) -> Result<SampleReport> {
    arboreal_rejection_with(g, beta, seed, n, &RejectionConfig::default())
}

pub fn arboreal_rejection_with<W: Scalar>(
    g: &Multigraph<W>,
    beta: &BigRational,
    seed: u64,
    n: u64,
    config: &RejectionConfig,
) -> Result<SampleReport> {
    if !beta.is_positive() {
        return Err(Error::InvalidArgument(format!("beta must be positive, got {beta}")));
    }
    let b = beta.to_f64();
    let coin = Bernoulli::new(b / (1.0 + b)).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let mut sorted: Vec<_> = g.edges().iter().collect();
    sorted.sort_by_key(|e| e.id);
    let ends: Vec<(usize, usize)> = sorted.iter().map(|e| (g.idx(e.u), g.idx(e.v))).collect();
    let mut report = SampleReport::new(sorted.iter().map(|e| e.id).collect(), seed);
    let mut rng = rng_from_seed(seed);
    let mut present = Vec::with_capacity(ends.len());
    while report.n_samples < n {
        report.attempts += 1;
        present.clear();
        let mut uf = UnionFind::new(g.num_vertices());
        let mut acyclic = true;
        for (i, &(u, v)) in ends.iter().enumerate() {
            // draw every coin so the stream position does not depend on the outcome
            if coin.sample(&mut rng) {
                present.push(i);
                acyclic &= uf.union(u, v);
            }
        }
        if acyclic {
            report.record(&present);
        }
        if report.attempts.is_multiple_of(config.window) && report.acceptance_rate() < config.floor {
            return Err(Error::TooDense {
                rate: report.acceptance_rate(),
                floor: config.floor,
            });
        }
    }
    Ok(report)
}

/// Monte Carlo estimate of `ℙ[e1]ℙ[e2] − ℙ[e1e2]` with a delta-method
/// standard error. Advisory only.
#[derive(Clone, Debug, PartialEq)]
pub struct McProbe {
    pub estimate: f64,
    pub stderr: f64,
    pub report: SampleReport,
}

pub fn mc_nc_probe<W: Scalar>(
    g: &Multigraph<W>,
    beta: &BigRational,
    e1: EdgeId,
    e2: EdgeId,
    seed: u64,
    n: u64,
) -> Result<McProbe> {
    g.check_edges([&e1, &e2])?;
    let report = arboreal_rejection(g, beta, seed, n)?;
    let (p1, p2, p12) = (
        report.frequency(e1)?,
        report.frequency(e2)?,
        report.joint_frequency(e1, e2)?,
    );
    let (estimate, stderr) = margin_estimate(p1, p2, p12, report.n_samples);
    Ok(McProbe {
        estimate,
        stderr,
        report,
    })
}

/// Delta method for `p1 p2 − p12` with gradient `(p2, p1, −1)` against the
/// covariance of the indicators `(X1, X2, X1 X2)`.
fn margin_estimate(p1: f64, p2: f64, p12: f64, n: u64) -> (f64, f64) {
    let g = [p2, p1, -1.0];
    let cov = [
        [p1 * (1.0 - p1), p12 - p1 * p2, p12 * (1.0 - p1)],
        [p12 - p1 * p2, p2 * (1.0 - p2), p12 * (1.0 - p2)],
        [p12 * (1.0 - p1), p12 * (1.0 - p2), p12 * (1.0 - p12)],
    ];
    let mut var = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            var += g[i] * cov[i][j] * g[j];
        }
    }
    (p1 * p2 - p12, (var.max(0.0) / n.max(1) as f64).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational;
    use crate::forest::{prob, EventSpec};
    use crate::graph::{generate, GraphKind, VertexId};
    use crate::Graph;
    use std::collections::BTreeMap;

    // upper 10^-3 point of chi-square with 15 degrees of freedom
    const CHI2_15_0001: f64 = 37.697;

    fn within(est: f64, exact: f64, se: f64) -> bool {
        (est - exact).abs() <= 3.0 * se
    }

    #[test]
    fn single_edge_tree() {
        let g: Graph = generate(GraphKind::Path(2), rational(1, 1)).unwrap();
        for seed in 0..5 {
            assert_eq!(wilson_ust(&g, &Conductances::unit(&g), seed).unwrap(), BTreeSet::from([EdgeId(0)]));
        }
    }

    #[test]
    fn wilson_uniform_on_k4() {
        let g: Graph = generate(GraphKind::Complete(4), rational(1, 1)).unwrap();
        let wilson = Wilson::new(&g, &Conductances::unit(&g)).unwrap();
        for seed in [1, 2, 3] {
            let mut rng = rng_from_seed(seed);
            let mut counts: BTreeMap<BTreeSet<EdgeId>, u64> = BTreeMap::new();
            for _ in 0..16000 {
                let t = wilson.sample(&mut rng).unwrap();
                assert_eq!(t.len(), 3);
                assert!(!g.has_cycle_in(&t));
                *counts.entry(t).or_default() += 1;
            }
            assert_eq!(counts.len(), 16);
            let chi2: f64 = counts.values().map(|&c| (c as f64 - 1000.0).powi(2) / 1000.0).sum();
            assert!(chi2 < CHI2_15_0001, "seed {seed}: chi2 = {chi2}");
        }
    }

    #[test]
    fn wilson_respects_conductances() {
        // a double edge with conductances 1 and 3 picks the heavy edge 3/4 of the time
        let mut g = Graph::new(2);
        let a = g.add_edge(VertexId(0), VertexId(1), rational(1, 1)).unwrap();
        let b = g.add_edge(VertexId(0), VertexId(1), rational(3, 1)).unwrap();
        let r = ust_report(&g, &Conductances::from_weights(&g), 7, 20000).unwrap();
        let se = (0.75f64 * 0.25 / 20000.0).sqrt();
        assert!(within(r.frequency(b).unwrap(), 0.75, se));
        assert_eq!(r.count(a).unwrap() + r.count(b).unwrap(), 20000);
    }

    #[test]
    fn ust_marginal_on_k5() {
        let g: Graph = generate(GraphKind::Complete(5), rational(1, 1)).unwrap();
        let r = ust_report(&g, &Conductances::unit(&g), 11, 20000).unwrap();
        let se = (0.4f64 * 0.6 / 20000.0).sqrt();
        for e in g.edge_ids() {
            assert!(within(r.frequency(e).unwrap(), 0.4, se * 1.5), "{e}");
        }
    }

    #[test]
    fn disconnected_graph_rejected() {
        let g = Graph::from_edges(4, &[(0, 1), (2, 3)], rational(1, 1)).unwrap();
        assert_eq!(wilson_ust(&g, &Conductances::unit(&g), 0), Err(Error::NotConnected));
    }

    #[test]
    fn rejection_marginals_match_exact() {
        let graphs: Vec<Graph> = vec![
            generate(GraphKind::Cycle(3), rational(1, 1)).unwrap(),
            generate(GraphKind::Cycle(4), rational(1, 1)).unwrap(),
            generate(GraphKind::Complete(4), rational(1, 1)).unwrap(),
        ];
        for g in &graphs {
            for beta in [rational(1, 2), rational(1, 1), rational(2, 1)] {
                let gb = g.with_uniform_weight(&beta);
                let r = arboreal_rejection(g, &beta, 5, 20000).unwrap();
                for e in g.edge_ids() {
                    let exact = prob(&gb, &EventSpec::requiring([e])).unwrap().to_f64();
                    let se = (exact * (1.0 - exact) / r.n_samples as f64).sqrt();
                    assert!(within(r.frequency(e).unwrap(), exact, se), "{e} at {beta}");
                }
            }
        }
    }

    #[test]
    fn triangle_marginal_three_sevenths() {
        let g: Graph = generate(GraphKind::Cycle(3), rational(1, 1)).unwrap();
        let r = arboreal_rejection(&g, &rational(1, 1), 42, 50000).unwrap();
        let p: f64 = 3.0 / 7.0;
        let se = (p * (1.0 - p) / 50000.0).sqrt();
        assert!(within(r.frequency(EdgeId(0)).unwrap(), p, se));
    }

    #[test]
    fn acceptance_rates() {
        let tree: Graph = generate(GraphKind::Path(5), rational(1, 1)).unwrap();
        assert_eq!(arboreal_rejection(&tree, &rational(1, 1), 0, 1000).unwrap().acceptance_rate(), 1.0);
        let c4: Graph = generate(GraphKind::Cycle(4), rational(1, 1)).unwrap();
        let r = arboreal_rejection(&c4, &rational(1, 1), 0, 20000).unwrap();
        let p: f64 = 15.0 / 16.0;
        let se = (p * (1.0 - p) / r.attempts as f64).sqrt();
        assert!(within(r.acceptance_rate(), p, se));
    }

    #[test]
    fn too_dense_reported() {
        let g: Graph = generate(GraphKind::Complete(8), rational(1, 1)).unwrap();
        let config = RejectionConfig {
            floor: 0.5,
            window: 100,
        };
        assert!(matches!(
            arboreal_rejection_with(&g, &rational(10, 1), 0, 10, &config),
            Err(Error::TooDense { .. })
        ));
    }

    #[test]
    fn deterministic_and_mergeable() {
        let g: Graph = generate(GraphKind::Complete(4), rational(1, 1)).unwrap();
        let a = arboreal_rejection(&g, &rational(1, 1), 9, 500).unwrap();
        assert_eq!(a, arboreal_rejection(&g, &rational(1, 1), 9, 500).unwrap());
        assert_ne!(a, arboreal_rejection(&g, &rational(1, 1), 10, 500).unwrap());
        let mut m = a.clone();
        m.merge(&arboreal_rejection(&g, &rational(1, 1), 10, 300).unwrap()).unwrap();
        assert_eq!(m.n_samples, 800);
        assert_eq!(m.seeds, vec![9, 10]);
        assert_eq!(
            m.joint_count(EdgeId(0), EdgeId(5)).unwrap(),
            a.joint_count(EdgeId(0), EdgeId(5)).unwrap()
                + arboreal_rejection(&g, &rational(1, 1), 10, 300).unwrap().joint_count(EdgeId(5), EdgeId(0)).unwrap()
        );
    }

    #[test]
    fn pair_counts_match_direct_tally() {
        let g: Graph = generate(GraphKind::Complete(4), rational(1, 1)).unwrap();
        let r = ust_report(&g, &Conductances::unit(&g), 3, 300).unwrap();
        let wilson = Wilson::new(&g, &Conductances::unit(&g)).unwrap();
        let mut rng = rng_from_seed(3);
        let trees: Vec<_> = (0..300).map(|_| wilson.sample(&mut rng).unwrap()).collect();
        for e1 in g.edge_ids() {
            for e2 in g.edge_ids() {
                let direct = trees.iter().filter(|t| t.contains(&e1) && t.contains(&e2)).count() as u64;
                assert_eq!(r.joint_count(e1, e2).unwrap(), direct);
            }
        }
    }

    #[test]
    fn probe_estimates() {
        let tri: Graph = generate(GraphKind::Cycle(3), rational(1, 1)).unwrap();
        let p = mc_nc_probe(&tri, &rational(1, 1), EdgeId(0), EdgeId(1), 1, 50000).unwrap();
        assert!(within(p.estimate, 2.0 / 49.0, p.stderr), "{p:?}");

        let path: Graph = generate(GraphKind::Path(4), rational(1, 1)).unwrap();
        let p = mc_nc_probe(&path, &rational(1, 1), EdgeId(0), EdgeId(2), 1, 20000).unwrap();
        assert!(within(p.estimate, 0.0, p.stderr), "{p:?}");

        let k5: Graph = generate(GraphKind::Complete(5), rational(1, 1)).unwrap();
        let marginal = |ev: EventSpec| prob(&k5, &ev).unwrap();
        let exact = marginal(EventSpec::requiring([EdgeId(0)])) * marginal(EventSpec::requiring([EdgeId(1)]))
            - marginal(EventSpec::requiring([EdgeId(0), EdgeId(1)]));
        let exact = exact.to_f64();
        assert!(exact > 0.0);
        let p = mc_nc_probe(&k5, &rational(1, 1), EdgeId(0), EdgeId(1), 2, 40000).unwrap();
        assert!(within(p.estimate, exact, p.stderr), "{p:?} vs {exact}");
    }

    #[test]
    fn delta_method_matches_spread_across_seeds() {
        let tri: Graph = generate(GraphKind::Cycle(3), rational(1, 1)).unwrap();
        let runs: Vec<McProbe> = (0..60)
            .map(|seed| mc_nc_probe(&tri, &rational(1, 1), EdgeId(0), EdgeId(1), seed, 2000).unwrap())
            .collect();
        let mean = runs.iter().map(|r| r.estimate).sum::<f64>() / runs.len() as f64;
        let spread = (runs.iter().map(|r| (r.estimate - mean).powi(2)).sum::<f64>() / (runs.len() - 1) as f64).sqrt();
        let predicted = runs.iter().map(|r| r.stderr).sum::<f64>() / runs.len() as f64;
        assert!((spread / predicted - 1.0).abs() < 0.3, "spread {spread}, predicted {predicted}");
    }
}
