//! Reductions that preserve negative correlation: deleting bridges,
//! suppressing degree-2 vertices (series edges) and merging parallel edges.
//!
//! A series class `{e_1..e_m}` becomes one edge with
//! `β̃ = Πβ / (Π(1+β) − Πβ)`, i.e. `p̃ = Πp` for `p = β/(1+β)`. A parallel
//! class becomes one edge with `β' = Σβ`.

mod check;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::algebra::{ratio_string, Scalar};
use crate::error::{Error, Result};
use crate::graph::{EdgeId, EdgeMap, Multigraph, VertexId};

pub use check::{
    component_factorization, nc_via_reduction, pushforward_check, series_forest_correspondence, Reason, ViaReduction,
};

/// `Πβ / (Π(1+β) − Πβ)`.
pub fn beta_series<W: Scalar>(betas: &[W]) -> Result<W> {
    if betas.is_empty() {
        return Err(Error::InvalidArgument("series class is empty".into()));
    }
    if betas.iter().any(|b| *b <= W::zero()) {
        return Err(Error::InvalidArgument("series weights must be positive".into()));
    }
    let prod = betas.iter().fold(W::one(), |a, b| a * b.clone());
    let shifted = betas.iter().fold(W::one(), |a, b| a * (W::one() + b.clone()));
    Ok(prod.clone() / (shifted - prod))
}

/// `Π(1+β) − Πβ`: the weight of the configurations of a series class
/// that leave the reduced edge absent.
fn series_constant<W: Scalar>(betas: &[W]) -> W {
    let prod = betas.iter().fold(W::one(), |a, b| a * b.clone());
    let shifted = betas.iter().fold(W::one(), |a, b| a * (W::one() + b.clone()));
    shifted - prod
}

#[derive(Clone, Debug, PartialEq)]
pub enum Step<W> {
    DeleteBridge {
        edge: EdgeId,
        beta: W,
    },
    SuppressVertex {
        vertex: VertexId,
        in_edges: [EdgeId; 2],
        out_edge: EdgeId,
        beta_tilde: W,
    },
    MergeParallel {
        edges: Vec<EdgeId>,
        merged: EdgeId,
        beta_sum: W,
    },
    DropLoop {
        edge: EdgeId,
    },
}

fn show<W: Scalar>(w: &W) -> String {
    // Rationals print as p/q; floats fall back to their own format.
    let s = w.to_string();
    if W::EXACT && !s.contains('/') {
        format!("{s}/1")
    } else {
        s
    }
}

impl<W: Scalar> fmt::Display for Step<W> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Step::DeleteBridge { edge, beta } => write!(f, "delete-bridge {edge} beta={}", show(beta)),
            Step::SuppressVertex {
                vertex,
                in_edges,
                out_edge,
                beta_tilde,
            } => write!(
                f,
                "suppress {vertex} {}+{} -> {out_edge} beta~={}",
                in_edges[0],
                in_edges[1],
                show(beta_tilde)
            ),
            Step::MergeParallel { edges, merged, beta_sum } => {
                let list: Vec<String> = edges.iter().map(|e| e.to_string()).collect();
                write!(f, "merge {} -> {merged} beta={}", list.join(","), show(beta_sum))
            }
            Step::DropLoop { edge } => write!(f, "drop-loop {edge}"),
        }
    }
}

/// One bridges → suppression → merge pass.
#[derive(Clone, Debug, PartialEq)]
pub struct Round<W> {
    pub bridges: Vec<(EdgeId, W)>,
    /// Edges of the bridgeless graph to edges of the suppressed graph.
    pub f_map: EdgeMap,
    /// Suppressed edges built from two or more edges, with those edges'
    /// weights.
    pub series: BTreeMap<EdgeId, Vec<(EdgeId, W)>>,
    /// Edges of the suppressed graph to edges of the merged graph.
    pub g_map: EdgeMap,
}

impl<W: Scalar> Round<W> {
    /// The reduced configuration seen by this round: a suppressed edge is
    /// present iff its whole class is; a merged edge iff any part is.
    fn image_of(&self, present: &BTreeSet<EdgeId>) -> BTreeSet<EdgeId> {
        let mut classes: BTreeMap<EdgeId, Vec<EdgeId>> = BTreeMap::new();
        for (s, t) in self.f_map.pairs() {
            classes.entry(t).or_default().push(s);
        }
        classes
            .into_iter()
            .filter(|(_, srcs)| srcs.iter().all(|s| present.contains(s)))
            .filter_map(|(t, _)| self.g_map.get(t))
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReductionTrace<W> {
    pub steps: Vec<Step<W>>,
    pub rounds: Vec<Round<W>>,
}

impl<W: Scalar> ReductionTrace<W> {
    /// The suppression map of the first round.
    pub fn f_map(&self) -> Option<&EdgeMap> {
        self.rounds.first().map(|r| &r.f_map)
    }

    pub fn g_map(&self) -> Option<&EdgeMap> {
        self.rounds.first().map(|r| &r.g_map)
    }

    /// Original edges to final edges; bridges and loops are dropped.
    pub fn composed(&self) -> EdgeMap {
        let mut map: Option<EdgeMap> = None;
        for r in &self.rounds {
            let mut m = EdgeMap::default();
            for (e, _) in &r.bridges {
                m.drop(*e);
            }
            for (s, t) in r.f_map.pairs() {
                match r.g_map.get(t) {
                    Some(u) => m.insert(s, u),
                    None => m.drop(s),
                }
            }
            map = Some(match map {
                None => m,
                Some(prev) => prev.then(&m),
            });
        }
        map.unwrap_or_default()
    }

    /// Image of an original edge in the final graph.
    pub fn image(&self, e: EdgeId) -> Option<EdgeId> {
        self.composed().get(e)
    }

    /// Image of a configuration of original edges in the final graph.
    pub fn image_of(&self, present: &BTreeSet<EdgeId>) -> BTreeSet<EdgeId> {
        self.rounds.iter().fold(present.clone(), |acc, r| r.image_of(&acc))
    }

    /// `Π` over series classes of `Π(1+β) − Πβ`.
    pub fn constant_c(&self) -> W {
        let mut c = W::one();
        for r in &self.rounds {
            for class in r.series.values() {
                let betas: Vec<W> = class.iter().map(|(_, b)| b.clone()).collect();
                c = c * series_constant(&betas);
            }
        }
        c
    }

    /// `Π (1 + β_b)` over deleted bridges.
    pub fn bridge_factor(&self) -> W {
        self.rounds
            .iter()
            .flat_map(|r| &r.bridges)
            .fold(W::one(), |acc, (_, b)| acc * (W::one() + b.clone()))
    }

    /// One step per line.
    pub fn explain(&self) -> String {
        let mut out = String::new();
        for s in &self.steps {
            out.push_str(&s.to_string());
            out.push('\n');
        }
        out
    }
}

/// Removes every bridge. Bridges lie on no cycle, so removing them all at
/// once exposes no new ones.
pub fn delete_pivotal<W: Scalar>(g: &Multigraph<W>) -> (Multigraph<W>, BTreeSet<EdgeId>) {
    let bridges = g.bridges();
    let h = g.without_edges(&bridges);
    debug_assert!(h.bridges().is_empty());
    (h, bridges)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Suppression<W> {
    pub graph: Multigraph<W>,
    pub f_map: EdgeMap,
    pub series: BTreeMap<EdgeId, Vec<(EdgeId, W)>>,
    pub steps: Vec<Step<W>>,
}

/// Repeatedly replaces a degree-2 vertex and its two edges by one edge
/// between its neighbours.
///
/// Vertices are visited in sweeps of increasing id; a vertex touching an
/// edge created earlier in the same sweep waits for the next sweep.
/// Suppression that would create a loop (both edges to the same
/// neighbour) is skipped, so a cycle stops at a double edge.
pub fn suppress_degree_two<W: Scalar>(g: &Multigraph<W>) -> Result<Suppression<W>> {
    let mut h = g.clone();
    let mut class: BTreeMap<EdgeId, Vec<(EdgeId, W)>> =
        g.edges().iter().map(|e| (e.id, vec![(e.id, e.weight.clone())])).collect();
    let mut steps = Vec::new();
    loop {
        let mut fresh = BTreeSet::new();
        for v in h.vertices().to_vec() {
            let inc: Vec<_> = h.incident(v).cloned().collect();
            if inc.len() != 2 || inc.iter().any(|e| e.is_loop() || fresh.contains(&e.id)) {
                continue;
            }
            let (x, y) = (inc[0].other(v), inc[1].other(v));
            if x == y {
                continue;
            }
            let mut originals = class.remove(&inc[0].id).expect("tracked");
            originals.extend(class.remove(&inc[1].id).expect("tracked"));
            let betas: Vec<W> = originals.iter().map(|(_, b)| b.clone()).collect();
            let beta_tilde = beta_series(&betas)?;
            h = h.without_vertex(v);
            let out = h.add_edge(x.min(y), x.max(y), beta_tilde.clone())?;
            class.insert(out, originals);
            fresh.insert(out);
            steps.push(Step::SuppressVertex {
                vertex: v,
                in_edges: [inc[0].id, inc[1].id],
                out_edge: out,
                beta_tilde,
            });
        }
        if fresh.is_empty() {
            break;
        }
    }
    let mut f_map = EdgeMap::default();
    let mut series = BTreeMap::new();
    for (target, originals) in class {
        for (o, _) in &originals {
            f_map.insert(*o, target);
        }
        if originals.len() > 1 {
            series.insert(target, originals);
        }
    }
    Ok(Suppression {
        graph: h,
        f_map,
        series,
        steps,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct Merge<W> {
    pub graph: Multigraph<W>,
    pub g_map: EdgeMap,
    pub steps: Vec<Step<W>>,
}

/// Collapses each class of parallel edges into one edge carrying the sum
/// of their weights, and drops loops. Single edges keep their ids.
pub fn merge_parallel<W: Scalar>(g: &Multigraph<W>) -> Result<Merge<W>> {
    let mut groups: BTreeMap<(VertexId, VertexId), Vec<EdgeId>> = BTreeMap::new();
    let mut removed = BTreeSet::new();
    let mut g_map = EdgeMap::default();
    let mut steps = Vec::new();
    for e in g.edges() {
        if e.is_loop() {
            removed.insert(e.id);
            g_map.drop(e.id);
            steps.push(Step::DropLoop { edge: e.id });
        } else {
            groups.entry((e.u.min(e.v), e.u.max(e.v))).or_default().push(e.id);
        }
    }
    for ids in groups.values() {
        if ids.len() > 1 {
            removed.extend(ids.iter().copied());
        } else {
            g_map.insert(ids[0], ids[0]);
        }
    }
    let mut h = g.without_edges(&removed);
    for ((u, v), ids) in groups {
        if ids.len() < 2 {
            continue;
        }
        let mut sum = W::zero();
        for e in &ids {
            sum = sum + g.weight(*e)?.clone();
        }
        let merged = h.add_edge(u, v, sum.clone())?;
        for e in &ids {
            g_map.insert(*e, merged);
        }
        steps.push(Step::MergeParallel {
            edges: ids,
            merged,
            beta_sum: sum,
        });
    }
    Ok(Merge { graph: h, g_map, steps })
}

/// Which moves a reduction applies.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Moves {
    pub bridges: bool,
    pub series: bool,
    pub parallel: bool,
    /// Repeat the pass until nothing changes.
    pub fixpoint: bool,
}

impl Moves {
    /// Bridges, then suppression, then merging, once.
    pub const PIPELINE: Moves = Moves {
        bridges: true,
        series: true,
        parallel: true,
        fixpoint: false,
    };
    pub const BRIDGES: Moves = Moves {
        bridges: true,
        series: false,
        parallel: false,
        fixpoint: false,
    };
    pub const SERIES: Moves = Moves {
        bridges: false,
        series: true,
        parallel: false,
        fixpoint: false,
    };
    pub const PARALLEL: Moves = Moves {
        bridges: false,
        series: false,
        parallel: true,
        fixpoint: false,
    };
}

#[derive(Clone, Debug, PartialEq)]
pub struct Reduction<W> {
    /// The reduced graph, all components together.
    pub graph: Multigraph<W>,
    /// Its connected components (isolated vertices included).
    pub components: Vec<Multigraph<W>>,
    pub trace: ReductionTrace<W>,
}

impl<W: Scalar> Reduction<W> {
    /// The component holding `e`, if any.
    pub fn component_of(&self, e: EdgeId) -> Option<&Multigraph<W>> {
        self.components.iter().find(|c| c.contains_edge(e))
    }
}

fn round<W: Scalar>(g: &Multigraph<W>, moves: Moves, trace: &mut ReductionTrace<W>) -> Result<Multigraph<W>> {
    let (h, bridges) = if moves.bridges {
        delete_pivotal(g)
    } else {
        (g.clone(), BTreeSet::new())
    };
    let bridges: Vec<(EdgeId, W)> = bridges
        .into_iter()
        .map(|e| Ok((e, g.weight(e)?.clone())))
        .collect::<Result<_>>()?;
    for (edge, beta) in &bridges {
        trace.steps.push(Step::DeleteBridge {
            edge: *edge,
            beta: beta.clone(),
        });
    }
    let sup = if moves.series {
        suppress_degree_two(&h)?
    } else {
        Suppression {
            f_map: EdgeMap::identity(h.edge_ids()),
            graph: h,
            series: BTreeMap::new(),
            steps: Vec::new(),
        }
    };
    trace.steps.extend(sup.steps);
    let merged = if moves.parallel {
        merge_parallel(&sup.graph)?
    } else {
        Merge {
            g_map: EdgeMap::identity(sup.graph.edge_ids()),
            graph: sup.graph,
            steps: Vec::new(),
        }
    };
    trace.steps.extend(merged.steps);
    trace.rounds.push(Round {
        bridges,
        f_map: sup.f_map,
        series: sup.series,
        g_map: merged.g_map,
    });
    Ok(merged.graph)
}

/// Applies the selected moves and splits the result into components.
pub fn reduce_with<W: Scalar>(g: &Multigraph<W>, moves: Moves) -> Result<Reduction<W>> {
    let mut trace = ReductionTrace { steps: Vec::new(), rounds: Vec::new() };
    let mut graph = round(g, moves, &mut trace)?;
    if moves.fixpoint {
        loop {
            let before = trace.steps.len();
            let next = round(&graph, moves, &mut trace)?;
            if trace.steps.len() == before {
                trace.rounds.pop();
                break;
            }
            graph = next;
        }
    }
    let components = graph.components().iter().map(|c| graph.induced(c)).collect();
    Ok(Reduction {
        graph,
        components,
        trace,
    })
}

/// Bridges, then suppression, then merging, then components; one pass.
pub fn reduce_pipeline<W: Scalar>(g: &Multigraph<W>) -> Result<Reduction<W>> {
    reduce_with(g, Moves::PIPELINE)
}

/// Formats a rational weight the way traces do.
pub fn weight_string(w: &num_rational::BigRational) -> String {
    ratio_string(w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational;
    use crate::graph::{generate, is_isomorphic, GraphKind};
    use crate::Graph;

    #[test]
    fn beta_series_values() {
        assert_eq!(beta_series(&[rational(1, 1), rational(1, 1)]).unwrap(), rational(1, 3));
        assert_eq!(beta_series(&[rational(5, 7)]).unwrap(), rational(5, 7));
        assert_eq!(beta_series(&[rational(1, 2), rational(1, 3)]).unwrap(), rational(1, 11));
        assert!(beta_series::<num_rational::BigRational>(&[]).is_err());
    }

    #[test]
    fn series_is_product_of_open_probabilities() {
        let p = |b: num_rational::BigRational| b.clone() / (rational(1, 1) + b);
        let betas = [rational(2, 3), rational(5, 1), rational(1, 7)];
        let whole = beta_series(&betas).unwrap();
        let staged = beta_series(&[beta_series(&betas[..2]).unwrap(), betas[2].clone()]).unwrap();
        assert_eq!(whole, staged);
        assert_eq!(p(whole), betas.iter().cloned().map(p).fold(rational(1, 1), |a, b| a * b));
    }

    #[test]
    fn pivotal_deletion() {
        let tree: Graph = generate(GraphKind::Path(4), rational(1, 1)).unwrap();
        let (h, removed) = delete_pivotal(&tree);
        assert_eq!((h.num_edges(), removed.len()), (0, 3));
        let joined = Graph::from_edges(6, &[(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 5), (5, 3)], rational(1, 1)).unwrap();
        let (h, removed) = delete_pivotal(&joined);
        assert_eq!(removed, [EdgeId(3)].into());
        assert_eq!(h.num_components(), 2);
        let c5: Graph = generate(GraphKind::Cycle(5), rational(1, 1)).unwrap();
        assert_eq!(delete_pivotal(&c5).0, c5);
    }

    #[test]
    fn cycle_suppression_stops_at_double_edge() {
        let c4: Graph = generate(GraphKind::Cycle(4), rational(1, 1)).unwrap();
        let s = suppress_degree_two(&c4).unwrap();
        assert_eq!((s.graph.num_vertices(), s.graph.num_edges()), (2, 2));
        assert!(!s.graph.has_loops());
        for e in s.graph.edges() {
            assert_eq!(e.weight, rational(1, 3));
        }
        let m = merge_parallel(&s.graph).unwrap();
        assert_eq!(m.graph.num_edges(), 1);
        assert_eq!(m.graph.edges()[0].weight, rational(2, 3));
        let k4: Graph = generate(GraphKind::Complete(4), rational(1, 1)).unwrap();
        assert_eq!(suppress_degree_two(&k4).unwrap().graph, k4);
    }

    #[test]
    fn merge_examples() {
        let double = Graph::from_edges(2, &[(0, 1), (1, 0)], rational(1, 1)).unwrap();
        let double = double.with_weight(EdgeId(1), rational(2, 1)).unwrap();
        let m = merge_parallel(&double).unwrap();
        assert_eq!(m.graph.num_edges(), 1);
        assert_eq!(m.graph.edges()[0].weight, rational(3, 1));
        assert_eq!(m.g_map.get(EdgeId(0)), m.g_map.get(EdgeId(1)));
        let k4: Graph = generate(GraphKind::Complete(4), rational(1, 1)).unwrap();
        let m = merge_parallel(&k4).unwrap();
        assert_eq!(m.graph, k4);
        assert_eq!(m.g_map, EdgeMap::identity(k4.edge_ids()));
    }

    #[test]
    fn ladders_shrink_by_two() {
        for d in 3..=6 {
            let l: Graph = generate(GraphKind::Ladder(d), rational(1, 1)).unwrap();
            let r = reduce_pipeline(&l).unwrap();
            assert_eq!(r.components.len(), 1);
            let expect: Graph = generate(GraphKind::Ladder(d - 2), rational(1, 1)).unwrap();
            let got = r.graph.with_uniform_weight(&rational(1, 1));
            assert_eq!(is_isomorphic(&got, &expect), Some(true), "d = {d}");
        }
    }

    #[test]
    fn pipeline_on_trees_and_bowtie() {
        let tree: Graph = generate(GraphKind::Path(4), rational(1, 1)).unwrap();
        let r = reduce_pipeline(&tree).unwrap();
        assert_eq!(r.components.len(), 4);
        assert!(r.components.iter().all(|c| c.num_vertices() == 1));
        let bowtie: Graph = generate(GraphKind::Bowtie, rational(1, 1)).unwrap();
        let r = reduce_pipeline(&bowtie).unwrap();
        // the cut vertex is not split; each triangle folds to an edge of weight 1/3 + 1
        assert_eq!(r.components.len(), 1);
        assert_eq!(r.graph.num_edges(), 2);
        assert!(r.graph.edges().iter().all(|e| e.weight == rational(4, 3)));
        assert_eq!(r.graph.bridges().len(), 2);
    }

    #[test]
    fn composed_map_and_explain() {
        let c4: Graph = generate(GraphKind::Cycle(4), rational(1, 1)).unwrap();
        let r = reduce_pipeline(&c4).unwrap();
        let images: BTreeSet<EdgeId> = c4.edge_ids().into_iter().filter_map(|e| r.trace.image(e)).collect();
        assert_eq!(images.len(), 1);
        assert_eq!(r.trace.constant_c(), rational(9, 1));
        let text = r.trace.explain();
        assert_eq!(text.lines().count(), r.trace.steps.len());
        assert!(text.lines().next().unwrap().starts_with("suppress v0"));
        assert!(text.contains("beta~=1/3"));

        let joined = Graph::from_edges(6, &[(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 5), (5, 3)], rational(1, 1)).unwrap();
        let r = reduce_pipeline(&joined).unwrap();
        assert_eq!(r.trace.image(EdgeId(3)), None);
        assert_eq!(r.trace.bridge_factor(), rational(2, 1));
        assert!(r.trace.explain().starts_with("delete-bridge e3 beta=1/1"));
    }

    #[test]
    fn fixpoint_mode_goes_further() {
        // A 4-cycle with a pendant triangle: one pass leaves degree-2 vertices behind.
        let g = Graph::from_edges(5, &[(0, 1), (1, 2), (2, 3), (3, 0), (0, 2), (2, 4), (4, 0)], rational(1, 1)).unwrap();
        let once = reduce_pipeline(&g).unwrap();
        let fix = reduce_with(&g, Moves { fixpoint: true, ..Moves::PIPELINE }).unwrap();
        assert!(fix.graph.num_edges() <= once.graph.num_edges());
        assert!(fix.trace.rounds.len() >= once.trace.rounds.len());
    }
}
