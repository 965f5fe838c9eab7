//! Multigraphs with stable edge identities.
//!
//! Edge ids are never reused: every edit returns a new graph whose fresh
//! edges draw ids from a counter that only grows, so maps between a graph
//! and its reductions can always refer to ids rather than positions.

mod edge_map;
mod enumerate;
mod generate;
mod io;
mod union_find;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

pub use edge_map::EdgeMap;
pub use enumerate::{canonical_code, enumerate_small_graphs, is_isomorphic, MAX_ENUMERATION_VERTICES};
pub use generate::{generate, GraphKind};
pub use io::{parse_graph, write_graph};
pub use union_find::{RollbackUnionFind, UnionFind};

use crate::algebra::Scalar;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexId(pub u32);

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeId(pub u32);

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}", self.0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge<W> {
    pub id: EdgeId,
    pub u: VertexId,
    pub v: VertexId,
    pub weight: W,
    pub label: Option<String>,
}

impl<W> Edge<W> {
    pub fn is_loop(&self) -> bool {
        self.u == self.v
    }

    pub fn touches(&self, x: VertexId) -> bool {
        self.u == x || self.v == x
    }

    /// The endpoint opposite `x` (or `x` itself for a loop).
    pub fn other(&self, x: VertexId) -> VertexId {
        if self.u == x {
            self.v
        } else {
            self.u
        }
    }

    pub fn shares_endpoint(&self, other: &Edge<W>) -> bool {
        self.touches(other.u) || self.touches(other.v)
    }
}

/// Finite undirected multigraph. Parallel edges and self-loops are allowed;
/// forests never contain a loop, so loop edges are inert for every measure
/// computed on the graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Multigraph<W> {
    vertices: Vec<VertexId>,
    edges: Vec<Edge<W>>,
    next_edge: u32,
}

impl<W: Scalar> Multigraph<W> {
    /// Graph on vertices `0..n` with no edges.
    pub fn new(n: usize) -> Self {
        Self::with_vertices((0..n as u32).map(VertexId))
    }

    pub fn with_vertices(vertices: impl IntoIterator<Item = VertexId>) -> Self {
        let mut vertices: Vec<VertexId> = vertices.into_iter().collect();
        vertices.sort();
        vertices.dedup();
        Multigraph {
            vertices,
            edges: Vec::new(),
            next_edge: 0,
        }
    }

    /// Adds a vertex with the next unused id.
    pub fn add_vertex(&mut self) -> VertexId {
        let v = VertexId(self.vertices.last().map_or(0, |v| v.0 + 1));
        self.vertices.push(v);
        v
    }

    pub fn add_edge(&mut self, u: VertexId, v: VertexId, weight: W) -> Result<EdgeId> {
        self.add_labeled_edge(u, v, weight, None)
    }

    pub fn add_labeled_edge(
        &mut self,
        u: VertexId,
        v: VertexId,
        weight: W,
        label: Option<String>,
    ) -> Result<EdgeId> {
        for x in [u, v] {
            if !self.contains_vertex(x) {
                return Err(Error::UnknownVertex(x));
            }
        }
        let id = EdgeId(self.next_edge);
        if weight <= W::zero() {
            return Err(Error::NonPositiveWeight(id));
        }
        self.next_edge += 1;
        self.edges.push(Edge {
            id,
            u,
            v,
            weight,
            label,
        });
        Ok(id)
    }

    /// Convenience for building graphs from vertex indices.
    pub fn from_edges(n: usize, edges: &[(u32, u32)], weight: W) -> Result<Self> {
        let mut g = Self::new(n);
        for &(u, v) in edges {
            g.add_edge(VertexId(u), VertexId(v), weight.clone())?;
        }
        Ok(g)
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge<W>] {
        &self.edges
    }

    pub fn edge_ids(&self) -> Vec<EdgeId> {
        self.edges.iter().map(|e| e.id).collect()
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// Lowest id not yet used by any edge of this graph or its ancestors.
    pub fn next_edge_id(&self) -> EdgeId {
        EdgeId(self.next_edge)
    }

    pub fn contains_vertex(&self, v: VertexId) -> bool {
        self.vertices.binary_search(&v).is_ok()
    }

    pub fn contains_edge(&self, e: EdgeId) -> bool {
        self.edge_index(e).is_some()
    }

    /// Position of a vertex in `vertices()`.
    pub fn vertex_index(&self, v: VertexId) -> Option<usize> {
        self.vertices.binary_search(&v).ok()
    }

    fn edge_index(&self, e: EdgeId) -> Option<usize> {
        self.edges.binary_search_by_key(&e, |x| x.id).ok()
    }

    pub fn edge(&self, e: EdgeId) -> Result<&Edge<W>> {
        self.edge_index(e)
            .map(|i| &self.edges[i])
            .ok_or(Error::UnknownEdge(e))
    }

    pub fn weight(&self, e: EdgeId) -> Result<&W> {
        self.edge(e).map(|x| &x.weight)
    }

    /// Degree with loops counted twice.
    pub fn degree(&self, v: VertexId) -> usize {
        self.edges
            .iter()
            .map(|e| (e.u == v) as usize + (e.v == v) as usize)
            .sum()
    }

    pub fn incident(&self, v: VertexId) -> impl Iterator<Item = &Edge<W>> {
        self.edges.iter().filter(move |e| e.touches(v))
    }

    pub fn has_loops(&self) -> bool {
        self.edges.iter().any(Edge::is_loop)
    }

    /// No loops and no parallel edges.
    pub fn is_simple(&self) -> bool {
        let mut seen = BTreeSet::new();
        self.edges
            .iter()
            .all(|e| !e.is_loop() && seen.insert((e.u.min(e.v), e.u.max(e.v))))
    }

    /// Whether every edge carries the same weight.
    pub fn has_uniform_weights(&self) -> bool {
        self.edges.windows(2).all(|w| w[0].weight == w[1].weight)
    }

    pub fn check_edges<'a>(&self, edges: impl IntoIterator<Item = &'a EdgeId>) -> Result<()> {
        for &e in edges {
            self.edge(e)?;
        }
        Ok(())
    }

    // ---- edits ----

    pub fn without_edges(&self, removed: &BTreeSet<EdgeId>) -> Self {
        Multigraph {
            vertices: self.vertices.clone(),
            edges: self
                .edges
                .iter()
                .filter(|e| !removed.contains(&e.id))
                .cloned()
                .collect(),
            next_edge: self.next_edge,
        }
    }

    pub fn without_edge(&self, e: EdgeId) -> Self {
        self.without_edges(&BTreeSet::from([e]))
    }

    /// Removes `v` and every edge touching it.
    pub fn without_vertex(&self, v: VertexId) -> Self {
        Multigraph {
            vertices: self.vertices.iter().copied().filter(|&x| x != v).collect(),
            edges: self.edges.iter().filter(|e| !e.touches(v)).cloned().collect(),
            next_edge: self.next_edge,
        }
    }

    pub fn without_loops(&self) -> Self {
        let loops = self.edges.iter().filter(|e| e.is_loop()).map(|e| e.id).collect();
        self.without_edges(&loops)
    }

    /// Subgraph induced by `keep`; surviving edges keep their ids.
    pub fn induced(&self, keep: &[VertexId]) -> Self {
        let set: BTreeSet<VertexId> = keep.iter().copied().collect();
        Multigraph {
            vertices: set.iter().copied().collect(),
            edges: self
                .edges
                .iter()
                .filter(|e| set.contains(&e.u) && set.contains(&e.v))
                .cloned()
                .collect(),
            next_edge: self.next_edge,
        }
    }

    /// Identifies the endpoints of `e` (the lower vertex id survives).
    ///
    /// Parallel edges are kept. Edges that become loops are deleted and
    /// listed as dropped when `drop_loops` is set; `e` itself is always
    /// dropped.
    pub fn contract(&self, e: EdgeId, drop_loops: bool) -> Result<(Self, EdgeMap)> {
        let edge = self.edge(e)?;
        if edge.is_loop() {
            return Err(Error::ContractLoop(e));
        }
        let keep = edge.u.min(edge.v);
        let gone = edge.u.max(edge.v);
        let relabel = |x: VertexId| if x == gone { keep } else { x };
        let mut map = EdgeMap::default();
        map.drop(e);
        let mut edges = Vec::with_capacity(self.edges.len());
        for x in &self.edges {
            if x.id == e {
                continue;
            }
            let (u, v) = (relabel(x.u), relabel(x.v));
            if u == v && drop_loops {
                map.drop(x.id);
                continue;
            }
            map.insert(x.id, x.id);
            edges.push(Edge { u, v, ..x.clone() });
        }
        let g = Multigraph {
            vertices: self.vertices.iter().copied().filter(|&v| v != gone).collect(),
            edges,
            next_edge: self.next_edge,
        };
        Ok((g, map))
    }

    /// Contracts every edge of `set` in turn, dropping loops created along
    /// the way. Fails with `InvalidEvent` when `set` contains a cycle.
    pub fn contract_all(&self, set: &BTreeSet<EdgeId>) -> Result<Self> {
        let mut g = self.clone();
        for &e in set {
            let edge = g
                .edge(e)
                .map_err(|_| Error::InvalidEvent(format!("required edges contain a cycle (at {e})")))?;
            if edge.is_loop() {
                return Err(Error::InvalidEvent(format!("required edges contain a cycle (at {e})")));
            }
            g = g.contract(e, true)?.0;
        }
        Ok(g)
    }

    pub fn map_weights<U: Scalar>(&self, mut f: impl FnMut(&Edge<W>) -> U) -> Multigraph<U> {
        Multigraph {
            vertices: self.vertices.clone(),
            edges: self
                .edges
                .iter()
                .map(|e| Edge {
                    id: e.id,
                    u: e.u,
                    v: e.v,
                    weight: f(e),
                    label: e.label.clone(),
                })
                .collect(),
            next_edge: self.next_edge,
        }
    }

    pub fn with_uniform_weight(&self, w: &W) -> Self {
        self.map_weights(|_| w.clone())
    }

    pub fn with_weight(&self, e: EdgeId, w: W) -> Result<Self> {
        let i = self.edge_index(e).ok_or(Error::UnknownEdge(e))?;
        if w <= W::zero() {
            return Err(Error::NonPositiveWeight(e));
        }
        let mut g = self.clone();
        g.edges[i].weight = w;
        Ok(g)
    }

    // ---- connectivity ----

    fn union_find(&self) -> UnionFind {
        let mut uf = UnionFind::new(self.vertices.len());
        for e in &self.edges {
            uf.union(self.idx(e.u), self.idx(e.v));
        }
        uf
    }

    pub(crate) fn idx(&self, v: VertexId) -> usize {
        self.vertex_index(v).expect("endpoint of an edge is a vertex")
    }

    /// Connected components, each sorted, ordered by smallest vertex.
    pub fn components(&self) -> Vec<Vec<VertexId>> {
        let mut uf = self.union_find();
        let mut classes: BTreeMap<usize, Vec<VertexId>> = BTreeMap::new();
        for (i, &v) in self.vertices.iter().enumerate() {
            classes.entry(uf.find(i)).or_default().push(v);
        }
        let mut out: Vec<Vec<VertexId>> = classes.into_values().collect();
        out.sort();
        out
    }

    pub fn num_components(&self) -> usize {
        self.union_find().num_classes()
    }

    pub fn is_connected(&self) -> bool {
        self.num_components() <= 1
    }

    pub fn connected(&self, a: VertexId, b: VertexId) -> bool {
        let mut uf = self.union_find();
        match (self.vertex_index(a), self.vertex_index(b)) {
            (Some(i), Some(j)) => uf.same(i, j),
            _ => false,
        }
    }

    /// Whether `set` (ignoring unknown ids) contains a cycle. Loops count.
    pub fn has_cycle_in(&self, set: &BTreeSet<EdgeId>) -> bool {
        let mut uf = UnionFind::new(self.vertices.len());
        self.edges
            .iter()
            .filter(|e| set.contains(&e.id))
            .any(|e| !uf.union(self.idx(e.u), self.idx(e.v)))
    }

    /// Pivotal edges: those whose removal disconnects their endpoints.
    /// A loop or an edge with a parallel partner is never pivotal.
    pub fn bridges(&self) -> BTreeSet<EdgeId> {
        let n = self.vertices.len();
        let mut adj: Vec<Vec<(usize, EdgeId)>> = vec![Vec::new(); n];
        for e in self.edges.iter().filter(|e| !e.is_loop()) {
            let (a, b) = (self.idx(e.u), self.idx(e.v));
            adj[a].push((b, e.id));
            adj[b].push((a, e.id));
        }
        let mut disc = vec![usize::MAX; n];
        let mut low = vec![0; n];
        let mut timer = 0;
        let mut out = BTreeSet::new();
        for root in 0..n {
            if disc[root] != usize::MAX {
                continue;
            }
            // Iterative DFS: (vertex, edge used to enter, next adjacency slot)
            let mut stack: Vec<(usize, Option<EdgeId>, usize)> = vec![(root, None, 0)];
            disc[root] = timer;
            low[root] = timer;
            timer += 1;
            while let Some(&mut (v, via, ref mut slot)) = stack.last_mut() {
                if *slot < adj[v].len() {
                    let (w, id) = adj[v][*slot];
                    *slot += 1;
                    if Some(id) == via {
                        continue;
                    }
                    if disc[w] == usize::MAX {
                        disc[w] = timer;
                        low[w] = timer;
                        timer += 1;
                        stack.push((w, Some(id), 0));
                    } else {
                        low[v] = low[v].min(disc[w]);
                    }
                } else {
                    stack.pop();
                    if let Some(&(parent, _, _)) = stack.last() {
                        low[parent] = low[parent].min(low[v]);
                        if low[v] > disc[parent] {
                            out.insert(via.expect("non-root has an entry edge"));
                        }
                    }
                }
            }
        }
        out
    }
}
