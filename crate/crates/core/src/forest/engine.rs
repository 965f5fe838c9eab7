//! Weighted deletion–contraction for the forest partition function.

use std::collections::{BTreeMap, HashMap};
use std::fmt::{Display, Write as _};

use num_traits::{One, Zero};

/// Weight ring for forest sums: rationals, floats, or polynomials in β.
pub trait MeasureRing: Clone + Zero + One + Display + Send + Sync {}
impl<T: Clone + Zero + One + Display + Send + Sync> MeasureRing for T {}

pub const DEFAULT_CACHE_CAPACITY: usize = 1 << 16;

/// A loopless simple graph on `0..n` with merged edge weights.
#[derive(Clone, Debug)]
pub(crate) struct Net<R> {
    n: usize,
    edges: Vec<(usize, usize, R)>,
}

impl<R: MeasureRing> Net<R> {
    /// Drops loops, sums parallel edges and renumbers the non-isolated
    /// vertices in increasing order.
    pub(crate) fn normalized(n: usize, edges: impl IntoIterator<Item = (usize, usize, R)>) -> Self {
        let mut merged: BTreeMap<(usize, usize), R> = BTreeMap::new();
        for (a, b, w) in edges {
            if a == b {
                continue;
            }
            let key = (a.min(b), a.max(b));
            match merged.get_mut(&key) {
                Some(acc) => *acc = acc.clone() + w,
                None => {
                    merged.insert(key, w);
                }
            }
        }
        let mut used = vec![false; n];
        for &(a, b) in merged.keys() {
            used[a] = true;
            used[b] = true;
        }
        let mut relabel = vec![usize::MAX; n];
        let mut next = 0;
        for (v, &u) in used.iter().enumerate() {
            if u {
                relabel[v] = next;
                next += 1;
            }
        }
        let edges = merged
            .into_iter()
            .map(|((a, b), w)| (relabel[a], relabel[b], w))
            .collect();
        Net { n: next, edges }
    }

    fn key(&self) -> String {
        let mut s = String::new();
        let _ = write!(s, "{}|", self.n);
        for (a, b, w) in &self.edges {
            let _ = write!(s, "{a}-{b}:{w};");
        }
        s
    }

    fn adjacency(&self) -> Vec<Vec<(usize, usize)>> {
        let mut adj = vec![Vec::new(); self.n];
        for (i, &(a, b, _)) in self.edges.iter().enumerate() {
            adj[a].push((b, i));
            adj[b].push((a, i));
        }
        adj
    }

    fn components(&self) -> Vec<usize> {
        let adj = self.adjacency();
        let mut comp = vec![usize::MAX; self.n];
        let mut count = 0;
        for s in 0..self.n {
            if comp[s] != usize::MAX {
                continue;
            }
            comp[s] = count;
            let mut stack = vec![s];
            while let Some(v) = stack.pop() {
                for &(w, _) in &adj[v] {
                    if comp[w] == usize::MAX {
                        comp[w] = count;
                        stack.push(w);
                    }
                }
            }
            count += 1;
        }
        comp
    }

    /// Bridge edge indices (the graph is simple, so no parallel subtleties).
    fn bridges(&self) -> Vec<usize> {
        fn visit(
            v: usize,
            parent_edge: usize,
            adj: &[Vec<(usize, usize)>],
            time: &mut usize,
            disc: &mut [usize],
            low: &mut [usize],
            out: &mut Vec<usize>,
        ) {
            *time += 1;
            disc[v] = *time;
            low[v] = *time;
            for &(w, e) in &adj[v] {
                if e == parent_edge {
                    continue;
                }
                if disc[w] == 0 {
                    visit(w, e, adj, time, disc, low, out);
                    low[v] = low[v].min(low[w]);
                    if low[w] > disc[v] {
                        out.push(e);
                    }
                } else {
                    low[v] = low[v].min(disc[w]);
                }
            }
        }
        let adj = self.adjacency();
        let mut disc = vec![0; self.n];
        let mut low = vec![0; self.n];
        let mut time = 0;
        let mut out = Vec::new();
        for s in 0..self.n {
            if disc[s] == 0 {
                visit(s, usize::MAX, &adj, &mut time, &mut disc, &mut low, &mut out);
            }
        }
        out
    }
}

/// Memoised forest partition function. The cache is bounded: once full,
/// new minors are computed but not stored.
#[derive(Debug)]
pub struct MuEngine<R> {
    cache: HashMap<String, R>,
    capacity: usize,
    hits: u64,
}

impl<R: MeasureRing> Default for MuEngine<R> {
    fn default() -> Self {
        Self::new(DEFAULT_CACHE_CAPACITY)
    }
}

impl<R: MeasureRing> MuEngine<R> {
    pub fn new(capacity: usize) -> Self {
        MuEngine {
            cache: HashMap::new(),
            capacity,
            hits: 0,
        }
    }

    pub fn cached(&self) -> usize {
        self.cache.len()
    }

    pub fn hits(&self) -> u64 {
        self.hits
    }

    pub(crate) fn partition(&mut self, net: Net<R>) -> R {
        if net.edges.is_empty() {
            return R::one();
        }
        let key = net.key();
        if let Some(v) = self.cache.get(&key) {
            self.hits += 1;
            return v.clone();
        }
        let value = self.partition_uncached(net);
        if self.cache.len() < self.capacity {
            self.cache.insert(key, value.clone());
        }
        value
    }

    fn partition_uncached(&mut self, net: Net<R>) -> R {
        let comp = net.components();
        let count = comp.iter().copied().max().map_or(0, |m| m + 1);
        if count > 1 {
            let mut parts: Vec<Vec<(usize, usize, R)>> = vec![Vec::new(); count];
            for (a, b, w) in &net.edges {
                parts[comp[*a]].push((*a, *b, w.clone()));
            }
            let mut total = R::one();
            for part in parts {
                total = total * self.partition(Net::normalized(net.n, part));
            }
            return total;
        }

        let bridges = net.bridges();
        if !bridges.is_empty() {
            // A bridge can always be added to a forest of the rest.
            let mut factor = R::one();
            let mut is_bridge = vec![false; net.edges.len()];
            for &e in &bridges {
                is_bridge[e] = true;
                factor = factor * (R::one() + net.edges[e].2.clone());
            }
            let rest = net
                .edges
                .iter()
                .enumerate()
                .filter(|(i, _)| !is_bridge[*i])
                .map(|(_, e)| e.clone());
            return factor * self.partition(Net::normalized(net.n, rest));
        }

        let pick = self.pick_edge(&net);
        let (a, b, w) = net.edges[pick].clone();
        let deleted = net
            .edges
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != pick)
            .map(|(_, e)| e.clone());
        let deleted = Net::normalized(net.n, deleted);
        let contracted = net
            .edges
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != pick)
            .map(|(_, (x, y, w))| {
                let m = |v: usize| if v == b { a } else { v };
                (m(*x), m(*y), w.clone())
            });
        let contracted = Net::normalized(net.n, contracted);
        self.partition(deleted) + w * self.partition(contracted)
    }

    /// An edge at a minimum-degree vertex, towards its highest-degree neighbour.
    fn pick_edge(&self, net: &Net<R>) -> usize {
        let adj = net.adjacency();
        let v = (0..net.n).min_by_key(|&v| adj[v].len()).expect("nonempty");
        adj[v]
            .iter()
            .max_by_key(|&&(w, _)| adj[w].len())
            .map(|&(_, e)| e)
            .expect("vertex has an edge")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{rational, Polynomial};
    use num_rational::BigRational;

    fn complete(n: usize) -> Vec<(usize, usize, Polynomial<BigRational>)> {
        let mut e = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                e.push((i, j, Polynomial::var()));
            }
        }
        e
    }

    #[test]
    fn normalization_merges_and_relabels() {
        let net = Net::normalized(5, vec![(4, 2, rational(1, 1)), (2, 4, rational(2, 1)), (1, 1, rational(5, 1))]);
        assert_eq!(net.n, 2);
        assert_eq!(net.edges, vec![(0, 1, rational(3, 1))]);
    }

    #[test]
    fn complete_graph_forest_counts() {
        let mut engine = MuEngine::default();
        let z3 = engine.partition(Net::normalized(3, complete(3)));
        assert_eq!(z3, Polynomial::from_ints(&[1, 3, 3]));
        // Forests of K4 by size: 1, 6, 15, 16.
        let z4 = engine.partition(Net::normalized(4, complete(4)));
        assert_eq!(z4, Polynomial::from_ints(&[1, 6, 15, 16]));
        // Top coefficient of K6 is Cayley's 6^4.
        let z6 = engine.partition(Net::normalized(6, complete(6)));
        assert_eq!(z6.coeff(5), rational(1296, 1));
        assert!(engine.hits() > 0);
    }

    #[test]
    fn zero_capacity_still_correct() {
        let mut engine = MuEngine::new(0);
        let z4 = engine.partition(Net::normalized(4, complete(4)));
        assert_eq!(z4, Polynomial::from_ints(&[1, 6, 15, 16]));
        assert_eq!(engine.cached(), 0);
    }
}
