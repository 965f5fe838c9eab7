use std::collections::BTreeSet;

use arboreal::algebra::{rational, Scalar};
use arboreal::correlation::{nc_pair, Verdict};
use arboreal::electrical::{effective_resistance, ust_edge_probability, Conductances};
use arboreal::forest::{partition_function, prob, EventSpec, ForestTable, Mode};
use arboreal::graph::{generate, parse_graph, write_graph, GraphKind};
use arboreal::reduction::{pushforward_check, reduce_pipeline};
use arboreal::{EdgeId, Graph, GraphF64, Rational, VertexId};

/// Forest weights of a small graph by brute force over edge subsets,
/// detecting cycles with a plain depth-first search.
fn brute_force(g: &Graph) -> Vec<(BTreeSet<EdgeId>, Rational)> {
    let edges = g.edges();
    let mut out = Vec::new();
    for mask in 0u32..1 << edges.len() {
        let chosen: Vec<_> = (0..edges.len()).filter(|i| mask >> i & 1 == 1).map(|i| &edges[i]).collect();
        let n = g.num_vertices();
        let mut adj = vec![Vec::new(); n];
        let mut cyclic = false;
        for e in &chosen {
            let (u, v) = (e.u.0 as usize, e.v.0 as usize);
            cyclic |= u == v;
            adj[u].push(v);
            adj[v].push(u);
        }
        let mut seen = vec![false; n];
        for s in 0..n {
            if seen[s] {
                continue;
            }
            let (mut nodes, mut degree_sum, mut stack) = (0, 0, vec![s]);
            seen[s] = true;
            while let Some(x) = stack.pop() {
                nodes += 1;
                degree_sum += adj[x].len();
                for &y in &adj[x] {
                    if !seen[y] {
                        seen[y] = true;
                        stack.push(y);
                    }
                }
            }
            // a component is a tree iff it has nodes − 1 edges
            cyclic |= degree_sum / 2 != nodes - 1;
        }
        if !cyclic {
            let w = chosen.iter().fold(rational(1, 1), |acc, e| acc * &e.weight);
            out.push((chosen.iter().map(|e| e.id).collect(), w));
        }
    }
    out
}

fn brute_prob(g: &Graph, require: &[EdgeId]) -> Rational {
    let forests = brute_force(g);
    let z: Rational = forests.iter().map(|(_, w)| w.clone()).sum();
    let hit: Rational = forests
        .iter()
        .filter(|(f, _)| require.iter().all(|e| f.contains(e)))
        .map(|(_, w)| w.clone())
        .sum();
    hit / z
}

#[test]
fn triangle_values() {
    let g: Graph = generate(GraphKind::Cycle(3), rational(1, 1)).unwrap();
    assert_eq!(partition_function(&g).unwrap(), rational(7, 1));
    assert_eq!(prob(&g, &EventSpec::requiring([EdgeId(0)])).unwrap(), rational(3, 7));
    let m = nc_pair(&g, EdgeId(0), EdgeId(1), Mode::Weighted).unwrap();
    assert_eq!(m.verdict, Verdict::Holds);
}

#[test]
fn probabilities_agree_with_brute_force() {
    let text = "vertices 5\n0 1 1/2\n1 2 3/1\n2 0 2/3\n2 3 1/1\n3 4 5/2\n4 2 1/3\n1 3 2/1\n";
    let g = parse_graph(text).unwrap();
    let table = ForestTable::new(&g).unwrap();
    for e in g.edge_ids() {
        let expect = brute_prob(&g, &[e]);
        assert_eq!(prob(&g, &EventSpec::requiring([e])).unwrap(), expect);
        assert_eq!(table.prob(&EventSpec::requiring([e])).unwrap(), expect);
    }
    assert_eq!(
        prob(&g, &EventSpec::requiring([EdgeId(0), EdgeId(4)])).unwrap(),
        brute_prob(&g, &[EdgeId(0), EdgeId(4)])
    );
    assert_eq!(parse_graph(&write_graph(&g)).unwrap(), g);
}

#[test]
fn complete_graph_ust_marginals() {
    for n in 3..=7 {
        let g: Graph = generate(GraphKind::Complete(n), rational(1, 1)).unwrap();
        let c = Conductances::unit(&g);
        assert_eq!(ust_edge_probability(&g, &c, EdgeId(0)).unwrap(), rational(2, n as i64));
        assert_eq!(effective_resistance(&g, &c, VertexId(0), VertexId(1)).unwrap(), rational(2, n as i64));
    }
}

#[test]
fn cycle_reduction_keeps_partition_function() {
    let c4: Graph = generate(GraphKind::Cycle(4), rational(1, 1)).unwrap();
    let r = reduce_pipeline(&c4).unwrap();
    let (lhs, rhs) = pushforward_check(&c4, &r, &EventSpec::empty()).unwrap();
    assert_eq!(lhs, rational(15, 1));
    assert_eq!(rhs, lhs);
    assert_eq!(r.trace.constant_c() * (rational(1, 1) + rational(2, 3)), rational(15, 1));
}

#[test]
fn float_instantiation_tracks_exact_values() {
    let exact: Graph = generate(GraphKind::Ladder(3), rational(3, 2)).unwrap();
    let approx: GraphF64 = generate(GraphKind::Ladder(3), 1.5).unwrap();
    for e in exact.edge_ids() {
        let p = prob(&exact, &EventSpec::requiring([e])).unwrap().to_f64();
        let q = prob(&approx, &EventSpec::requiring([e])).unwrap();
        assert!((p - q).abs() < 1e-12, "{e}: {p} vs {q}");
    }
}
