//! Exact checks that reductions transport the forest measure, and the
//! pair verdict obtained through a reduction.

use std::collections::BTreeSet;

use num_rational::BigRational;

use super::{reduce_pipeline, suppress_degree_two, Reduction};
use crate::algebra::Scalar;
use crate::correlation::{nc_pair, NCMargin, Verdict};
use crate::error::{Error, Result};
use crate::forest::{mu, EventSpec, Mode, MAX_ENUMERATION_EDGES};
use crate::graph::{EdgeId, Multigraph, UnionFind};

fn subsets<W: Scalar>(g: &Multigraph<W>) -> Result<impl Iterator<Item = (BTreeSet<EdgeId>, bool, W)> + '_> {
    if g.num_edges() > MAX_ENUMERATION_EDGES {
        return Err(Error::SizeLimit {
            what: "edge count for subset enumeration",
            limit: MAX_ENUMERATION_EDGES,
            actual: g.num_edges(),
        });
    }
    Ok((0u32..1 << g.num_edges()).map(move |mask| {
        let mut uf = UnionFind::new(g.num_vertices());
        let mut set = BTreeSet::new();
        let mut acyclic = true;
        let mut weight = W::one();
        for (i, e) in g.edges().iter().enumerate() {
            if mask >> i & 1 == 1 {
                set.insert(e.id);
                acyclic &= uf.union(g.idx(e.u), g.idx(e.v));
                weight = weight * e.weight.clone();
            }
        }
        (set, acyclic, weight)
    }))
}

/// `(lhs, rhs)` where `lhs` is the total weight `ΣΠβ` of forests of `g`
/// whose reduced image lies in `ev`, by enumeration, and `rhs` is
/// `C · Π(1+β_bridge) · Π_{ev.require} β̃ · μ̃[ev]` on the reduced graph.
pub fn pushforward_check<W: Scalar>(g: &Multigraph<W>, reduction: &Reduction<W>, ev: &EventSpec) -> Result<(W, W)> {
    ev.validate(&reduction.graph)?;
    let trace = &reduction.trace;
    let mut lhs = W::zero();
    for (set, acyclic, weight) in subsets(g)? {
        if !acyclic {
            continue;
        }
        let image = trace.image_of(&set);
        if ev.require.is_subset(&image) && ev.forbid.is_disjoint(&image) {
            lhs = lhs + weight;
        }
    }
    let mut rhs = trace.constant_c() * trace.bridge_factor() * mu(&reduction.graph, ev)?;
    for e in &ev.require {
        rhs = rhs * reduction.graph.weight(*e)?.clone();
    }
    Ok((lhs, rhs))
}

/// `(Z_G, Π_components Z)` for the given graph.
pub fn component_factorization<W: Scalar>(g: &Multigraph<W>) -> Result<(W, W)> {
    let whole = mu(g, &EventSpec::empty())?;
    let mut product = W::one();
    for c in g.components() {
        product = product * mu(&g.induced(&c), &EventSpec::empty())?;
    }
    Ok((whole, product))
}

/// Whether, for every edge subset `F` of `g`, `F` is acyclic exactly when
/// its image under degree-2 suppression is.
pub fn series_forest_correspondence<W: Scalar>(g: &Multigraph<W>) -> Result<bool> {
    let s = suppress_degree_two(g)?;
    let mut classes: std::collections::BTreeMap<EdgeId, Vec<EdgeId>> = Default::default();
    for (src, t) in s.f_map.pairs() {
        classes.entry(t).or_default().push(src);
    }
    for (set, acyclic, _) in subsets(g)? {
        let image: BTreeSet<EdgeId> = classes
            .iter()
            .filter(|(_, srcs)| srcs.iter().all(|e| set.contains(e)))
            .map(|(t, _)| *t)
            .collect();
        if acyclic == s.graph.has_cycle_in(&image) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Reason {
    /// One of the edges is a bridge.
    Pivotal,
    /// One of the edges is a loop and never lies in a forest.
    NeverInForest,
    /// The images lie in different components of the reduced graph.
    DifferentComponents,
    /// Both edges map to the same reduced edge.
    SameReducedEdge,
    /// No shortcut applies; the margin was computed on the reduced component.
    Deferred,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ViaReduction {
    pub reason: Reason,
    pub verdict: Verdict,
    /// Reduced edges and their margin when the verdict was deferred.
    pub deferred: Option<(EdgeId, EdgeId, NCMargin)>,
    pub reduction: Reduction<BigRational>,
}

/// Pair verdict through the reduction pipeline: shortcuts when an edge is
/// pivotal, when the images coincide or lie in different components, and
/// otherwise the weighted margin on the reduced component.
pub fn nc_via_reduction(g: &Multigraph<BigRational>, e1: EdgeId, e2: EdgeId) -> Result<ViaReduction> {
    if e1 == e2 {
        return Err(Error::InvalidArgument(format!("edge pair must be distinct, got {e1} twice")));
    }
    g.check_edges([&e1, &e2])?;
    let reduction = reduce_pipeline(g)?;
    let done = |reason, reduction| {
        Ok(ViaReduction {
            reason,
            verdict: Verdict::Holds,
            deferred: None,
            reduction,
        })
    };
    if g.edge(e1)?.is_loop() || g.edge(e2)?.is_loop() {
        return done(Reason::NeverInForest, reduction);
    }
    let bridges = g.bridges();
    if bridges.contains(&e1) || bridges.contains(&e2) {
        return done(Reason::Pivotal, reduction);
    }
    let map = reduction.trace.composed();
    let (r1, r2) = match (map.get(e1), map.get(e2)) {
        (Some(a), Some(b)) => (a, b),
        _ => return done(Reason::Pivotal, reduction),
    };
    if r1 == r2 {
        return done(Reason::SameReducedEdge, reduction);
    }
    let component = reduction.component_of(r1).expect("image edge lies in a component");
    if !component.contains_edge(r2) {
        return done(Reason::DifferentComponents, reduction);
    }
    let margin = nc_pair(component, r1, r2, Mode::Weighted)?;
    Ok(ViaReduction {
        reason: Reason::Deferred,
        verdict: margin.verdict,
        deferred: Some((r1, r2, margin)),
        reduction,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational;
    use crate::graph::{generate, GraphKind, VertexId};
    use crate::reduction::{reduce_with, Moves};
    use crate::Graph;
    use num_traits::Zero;
    use proptest::prelude::*;

    #[test]
    fn cycle_partition_function_transported() {
        let c4: Graph = generate(GraphKind::Cycle(4), rational(1, 1)).unwrap();
        let r = reduce_pipeline(&c4).unwrap();
        assert_eq!(r.graph.edges()[0].weight, rational(2, 3));
        let (lhs, rhs) = pushforward_check(&c4, &r, &EventSpec::empty()).unwrap();
        assert_eq!((lhs.clone(), rhs), (rational(15, 1), rational(15, 1)));
        let e = r.graph.edge_ids()[0];
        let (lhs, rhs) = pushforward_check(&c4, &r, &EventSpec::requiring([e])).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn identity_reduction_has_unit_constant() {
        let k4: Graph = generate(GraphKind::Complete(4), rational(3, 2)).unwrap();
        let r = reduce_pipeline(&k4).unwrap();
        assert_eq!(r.trace.constant_c(), rational(1, 1));
        let ev = EventSpec::new([EdgeId(0)], [EdgeId(5)]).unwrap();
        let (lhs, rhs) = pushforward_check(&k4, &r, &ev).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn pair_verdicts_through_reduction() {
        let joined = Graph::from_edges(6, &[(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 5), (5, 3)], rational(1, 1)).unwrap();
        assert_eq!(nc_via_reduction(&joined, EdgeId(3), EdgeId(0)).unwrap().reason, Reason::Pivotal);
        let c4: Graph = generate(GraphKind::Cycle(4), rational(1, 1)).unwrap();
        assert_eq!(nc_via_reduction(&c4, EdgeId(0), EdgeId(2)).unwrap().reason, Reason::SameReducedEdge);
        let k4: Graph = generate(GraphKind::Complete(4), rational(1, 1)).unwrap();
        let v = nc_via_reduction(&k4, EdgeId(0), EdgeId(5)).unwrap();
        assert_eq!(v.reason, Reason::Deferred);
        let direct = nc_pair(&k4, EdgeId(0), EdgeId(5), Mode::Weighted).unwrap();
        assert_eq!(v.verdict, direct.verdict);
    }

    fn arb_graph() -> impl Strategy<Value = Graph> {
        (2usize..6).prop_flat_map(|n| {
            let edge = (0..n as u32, 0..n as u32, 1i64..6, 1i64..4);
            proptest::collection::vec(edge, 1..10).prop_map(move |edges| {
                let mut g = Graph::new(n);
                for (u, v, p, q) in edges {
                    g.add_edge(VertexId(u), VertexId(v), rational(p, q)).unwrap();
                }
                g
            })
        })
    }

    fn arb_event(g: &Graph, picks: &[u8]) -> EventSpec {
        let mut ev = EventSpec::empty();
        for (e, &p) in g.edge_ids().iter().zip(picks) {
            match p % 3 {
                0 => {
                    ev.require.insert(*e);
                }
                1 => {
                    ev.forbid.insert(*e);
                }
                _ => {}
            }
        }
        ev
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn every_move_transports_the_measure(g in arb_graph(), picks in proptest::collection::vec(any::<u8>(), 10)) {
            for moves in [Moves::BRIDGES, Moves::SERIES, Moves::PARALLEL, Moves::PIPELINE, Moves { fixpoint: true, ..Moves::PIPELINE }] {
                let r = reduce_with(&g, moves).unwrap();
                let ev = arb_event(&r.graph, &picks);
                let (lhs, rhs) = pushforward_check(&g, &r, &ev).unwrap();
                prop_assert_eq!(lhs, rhs, "{:?}", moves);
            }
        }

        #[test]
        fn reduced_verdict_matches_direct(g in arb_graph(), i in 0usize..10, j in 0usize..10) {
            let ids = g.edge_ids();
            let (e1, e2) = (ids[i % ids.len()], ids[j % ids.len()]);
            prop_assume!(e1 != e2);
            let via = nc_via_reduction(&g, e1, e2).unwrap();
            let direct = nc_pair(&g, e1, e2, Mode::Weighted).unwrap();
            let direct_holds = direct.verdict != Verdict::Violated;
            prop_assert_eq!(via.verdict != Verdict::Violated, direct_holds);
            if let Some((_, _, m)) = &via.deferred {
                let (a, b) = (m.margin.as_rational().unwrap(), direct.margin.as_rational().unwrap());
                prop_assert_eq!(a.is_zero(), b.is_zero());
            }
        }

        #[test]
        fn components_factorize(g in arb_graph()) {
            let r = reduce_pipeline(&g).unwrap();
            let (whole, product) = component_factorization(&r.graph).unwrap();
            prop_assert_eq!(whole, product);
        }

        #[test]
        fn suppression_preserves_forests(g in arb_graph()) {
            prop_assert!(series_forest_correspondence(&g).unwrap());
        }
    }
}
