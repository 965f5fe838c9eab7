//! Small connected simple graphs and brute-force canonical labelling.

use std::collections::BTreeSet;

use super::{Multigraph, VertexId};
use crate::algebra::Scalar;
use crate::error::{Error, Result};

pub const MAX_ENUMERATION_VERTICES: usize = 8;

/// Largest vertex count `canonical_code` accepts (the code must fit in 64 bits).
const MAX_CANONICAL_VERTICES: usize = 11;

type Adjacency = Vec<u16>;

fn pair_index(i: usize, j: usize) -> usize {
    debug_assert!(i < j);
    j * (j - 1) / 2 + i
}

fn adjacency_of<W: Scalar>(g: &Multigraph<W>) -> Option<Adjacency> {
    let n = g.num_vertices();
    if n > MAX_CANONICAL_VERTICES || !g.is_simple() {
        return None;
    }
    let mut adj = vec![0u16; n];
    for e in g.edges() {
        let (a, b) = (g.idx(e.u), g.idx(e.v));
        adj[a] |= 1 << b;
        adj[b] |= 1 << a;
    }
    Some(adj)
}

/// Colour refinement: start from degrees and split classes by the
/// multiset of neighbour colours until stable. Colours depend only on the
/// isomorphism class, so restricting labellings to colour order keeps the
/// minimum code canonical.
fn refined_colors(adj: &[u16]) -> Vec<usize> {
    let n = adj.len();
    let mut colors: Vec<usize> = adj.iter().map(|a| a.count_ones() as usize).collect();
    loop {
        let signatures: Vec<(usize, Vec<usize>)> = (0..n)
            .map(|v| {
                let mut nb: Vec<usize> = (0..n).filter(|&w| adj[v] >> w & 1 == 1).map(|w| colors[w]).collect();
                nb.sort_unstable();
                (colors[v], nb)
            })
            .collect();
        let distinct: BTreeSet<&(usize, Vec<usize>)> = signatures.iter().collect();
        let rank: Vec<&(usize, Vec<usize>)> = distinct.into_iter().collect();
        let next: Vec<usize> = signatures
            .iter()
            .map(|s| rank.binary_search(&s).expect("present"))
            .collect();
        let before = colors.iter().collect::<BTreeSet<_>>().len();
        let after = rank.len();
        colors = next;
        if after == before {
            return colors;
        }
    }
}

fn code_for(adj: &[u16], order: &[usize]) -> u64 {
    let n = order.len();
    let mut code = 0u64;
    for j in 1..n {
        let row = adj[order[j]];
        for (i, &oi) in order[..j].iter().enumerate() {
            if row >> oi & 1 == 1 {
                code |= 1 << pair_index(i, j);
            }
        }
    }
    code
}

fn min_code(adj: &[u16]) -> u64 {
    let colors = refined_colors(adj);
    let mut classes: Vec<Vec<usize>> = Vec::new();
    let max = colors.iter().copied().max().map_or(0, |m| m + 1);
    for c in 0..max {
        let class: Vec<usize> = (0..adj.len()).filter(|&v| colors[v] == c).collect();
        if !class.is_empty() {
            classes.push(class);
        }
    }
    let mut best = u64::MAX;
    let mut order = Vec::with_capacity(adj.len());
    permute_classes(adj, &mut classes, 0, &mut order, &mut best);
    best
}

fn permute_classes(adj: &[u16], classes: &mut [Vec<usize>], k: usize, order: &mut Vec<usize>, best: &mut u64) {
    if k == classes.len() {
        *best = (*best).min(code_for(adj, order));
        return;
    }
    let len = classes[k].len();
    heap_permutations(&mut classes[k].clone(), len, &mut |perm| {
        let mark = order.len();
        order.extend_from_slice(perm);
        permute_classes(adj, classes, k + 1, order, best);
        order.truncate(mark);
    });
}

fn heap_permutations(items: &mut [usize], k: usize, visit: &mut dyn FnMut(&[usize])) {
    if k <= 1 {
        visit(items);
        return;
    }
    for i in 0..k - 1 {
        heap_permutations(items, k - 1, visit);
        if k.is_multiple_of(2) {
            items.swap(i, k - 1);
        } else {
            items.swap(0, k - 1);
        }
    }
    heap_permutations(items, k - 1, visit);
}

/// Canonical code of a simple graph: the minimum upper-triangle adjacency
/// bitstring over all vertex orderings compatible with refined colours.
/// Two simple graphs are isomorphic iff their codes (and vertex counts)
/// agree. Returns `None` for non-simple graphs or more than 11 vertices.
pub fn canonical_code<W: Scalar>(g: &Multigraph<W>) -> Option<u64> {
    adjacency_of(g).map(|adj| min_code(&adj))
}

/// Isomorphism test for simple graphs.
pub fn is_isomorphic<W: Scalar>(a: &Multigraph<W>, b: &Multigraph<W>) -> Option<bool> {
    if a.num_vertices() != b.num_vertices() || a.num_edges() != b.num_edges() {
        return Some(false);
    }
    Some(canonical_code(a)? == canonical_code(b)?)
}

fn decode(n: usize, code: u64) -> Adjacency {
    let mut adj = vec![0u16; n];
    for j in 1..n {
        for i in 0..j {
            if code >> pair_index(i, j) & 1 == 1 {
                adj[i] |= 1 << j;
                adj[j] |= 1 << i;
            }
        }
    }
    adj
}

fn to_graph<W: Scalar>(adj: &[u16]) -> Multigraph<W> {
    let n = adj.len();
    let mut g = Multigraph::new(n);
    for (i, row) in adj.iter().enumerate() {
        for j in i + 1..n {
            if row >> j & 1 == 1 {
                g.add_edge(VertexId(i as u32), VertexId(j as u32), W::one())
                    .expect("vertices exist");
            }
        }
    }
    g
}

/// Canonical representatives of connected graphs on exactly `n` vertices.
///
/// Every connected graph has a vertex whose removal leaves it connected
/// (a leaf of any spanning tree), so level `n` is reached by attaching a
/// new vertex to a nonempty subset of each level-`n-1` representative.
fn connected_representatives(n_max: usize) -> Vec<Vec<u64>> {
    let mut levels: Vec<Vec<u64>> = vec![Vec::new(), vec![0]];
    for n in 2..=n_max {
        let mut next = BTreeSet::new();
        for &code in &levels[n - 1] {
            let base = decode(n - 1, code);
            for subset in 1u16..(1 << (n - 1)) {
                let mut adj = base.clone();
                adj.push(subset);
                for (v, row) in adj.iter_mut().enumerate().take(n - 1) {
                    if subset >> v & 1 == 1 {
                        *row |= 1 << (n - 1);
                    }
                }
                next.insert(min_code(&adj));
            }
        }
        levels.push(next.into_iter().collect());
    }
    levels
}

/// Every connected simple graph on `n = 2..=n_max` vertices with unit
/// weights.
///
/// With `dedup` set, one representative per isomorphism class (in order of
/// vertex count, then canonical code). Without it, every connected edge
/// subset of `K_n` is produced lazily in subset order.
pub fn enumerate_small_graphs<W: Scalar>(
    n_max: usize,
    dedup: bool,
) -> Result<Box<dyn Iterator<Item = Multigraph<W>> + Send>> {
    if n_max > MAX_ENUMERATION_VERTICES {
        return Err(Error::SizeLimit {
            what: "vertex count for enumeration",
            limit: MAX_ENUMERATION_VERTICES,
            actual: n_max,
        });
    }
    if dedup {
        let levels = connected_representatives(n_max);
        let graphs: Vec<Multigraph<W>> = (2..=n_max)
            .flat_map(|n| levels[n].iter().map(move |&c| to_graph(&decode(n, c))))
            .collect();
        return Ok(Box::new(graphs.into_iter()));
    }
    Ok(Box::new((2..=n_max).flat_map(|n| {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        (0u64..1 << pairs.len()).filter_map(move |mask| {
            let mut adj = vec![0u16; n];
            for (k, &(i, j)) in pairs.iter().enumerate() {
                if mask >> k & 1 == 1 {
                    adj[i] |= 1 << j;
                    adj[j] |= 1 << i;
                }
            }
            is_connected(&adj).then(|| to_graph(&adj))
        })
    })))
}

fn is_connected(adj: &[u16]) -> bool {
    let full: u16 = if adj.len() >= 16 { u16::MAX } else { (1 << adj.len()) - 1 };
    let mut seen: u16 = 1;
    let mut frontier: u16 = 1;
    while frontier != 0 {
        let v = frontier.trailing_zeros() as usize;
        frontier &= frontier - 1;
        let new = adj[v] & !seen;
        seen |= new;
        frontier |= new;
    }
    seen == full
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational;
    use crate::graph::{generate, GraphKind};
    use num_rational::BigRational;
    use std::collections::HashSet;

    type G = Multigraph<BigRational>;

    /// Oracle: minimum code over every permutation, no refinement.
    fn full_min_code(adj: &[u16]) -> u64 {
        let mut items: Vec<usize> = (0..adj.len()).collect();
        let mut best = u64::MAX;
        let k = items.len();
        heap_permutations(&mut items, k, &mut |p| best = best.min(code_for(adj, p)));
        best
    }

    #[test]
    fn dedup_counts() {
        let count = |n: usize| enumerate_small_graphs::<BigRational>(n, true).unwrap().count();
        assert_eq!(count(2), 1);
        assert_eq!(count(3), 1 + 2);
        assert_eq!(count(4), 1 + 2 + 6);
        let per_level: Vec<usize> = connected_representatives(7)[2..].iter().map(Vec::len).collect();
        assert_eq!(per_level, vec![1, 2, 6, 21, 112, 853]);
    }

    #[test]
    fn labelled_counts_match_subset_filter() {
        let per_n: Vec<usize> = (2..=5)
            .map(|n| {
                enumerate_small_graphs::<BigRational>(n, false)
                    .unwrap()
                    .filter(|g| g.num_vertices() == n)
                    .count()
            })
            .collect();
        assert_eq!(per_n, vec![1, 4, 38, 728]);
    }

    #[test]
    fn dedup_agrees_with_full_permutation_oracle() {
        for n in 2..=5 {
            let mut classes = HashSet::new();
            for g in enumerate_small_graphs::<BigRational>(n, false).unwrap() {
                if g.num_vertices() == n {
                    classes.insert(full_min_code(&adjacency_of(&g).unwrap()));
                }
            }
            let reps = connected_representatives(n)[n].len();
            assert_eq!(classes.len(), reps, "n = {n}");
        }
    }

    #[test]
    fn refined_code_is_isomorphism_invariant() {
        let ladder: G = generate(GraphKind::Ladder(3), rational(1, 1)).unwrap();
        let relabelled = G::from_edges(6, &[(5, 2), (5, 4), (4, 1), (2, 3), (3, 0), (1, 0), (0, 2)], rational(1, 1));
        // The second graph is a relabelled ladder only if edge structure matches; check both ways.
        let relabelled = relabelled.unwrap();
        assert_eq!(
            is_isomorphic(&ladder, &relabelled),
            Some(full_min_code(&adjacency_of(&ladder).unwrap()) == full_min_code(&adjacency_of(&relabelled).unwrap()))
        );
        let c6: G = generate(GraphKind::Cycle(6), rational(1, 1)).unwrap();
        let shuffled = G::from_edges(6, &[(0, 3), (3, 1), (1, 5), (5, 2), (2, 4), (4, 0)], rational(1, 1)).unwrap();
        assert_eq!(is_isomorphic(&c6, &shuffled), Some(true));
        let p6: G = generate(GraphKind::Path(6), rational(1, 1)).unwrap();
        assert_eq!(is_isomorphic(&c6, &p6), Some(false));
    }

    #[test]
    fn size_limit() {
        assert!(matches!(
            enumerate_small_graphs::<BigRational>(9, true),
            Err(Error::SizeLimit { .. })
        ));
    }
}
