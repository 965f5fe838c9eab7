//! Electrical networks: Laplacians, weighted spanning-tree counts,
//! effective resistance and unit current flows.
//!
//! Ohm's law is taken as `i(e) = c(e)·(φ(u) − φ(v))`.

mod flow;

use std::collections::{BTreeMap, BTreeSet};

use crate::algebra::{Matrix, Scalar};
use crate::error::{Error, Result};
use crate::graph::{EdgeId, Multigraph, UnionFind, VertexId};

pub use flow::{rayleigh_check, shared_cycle_current, unit_current_flow, CurrentFlow, KirchhoffResiduals, RayleighReport};

/// Per-edge conductances, strictly positive.
#[derive(Clone, Debug, PartialEq)]
pub struct Conductances<W> {
    values: BTreeMap<EdgeId, W>,
}

impl<W: Scalar> Conductances<W> {
    /// Uses the graph's edge weights.
    pub fn from_weights(g: &Multigraph<W>) -> Self {
        Conductances {
            values: g.edges().iter().map(|e| (e.id, e.weight.clone())).collect(),
        }
    }

    pub fn unit(g: &Multigraph<W>) -> Self {
        Conductances {
            values: g.edge_ids().into_iter().map(|e| (e, W::one())).collect(),
        }
    }

    pub fn from_map(g: &Multigraph<W>, values: BTreeMap<EdgeId, W>) -> Result<Self> {
        for e in g.edge_ids() {
            match values.get(&e) {
                None => return Err(Error::UnknownEdge(e)),
                Some(c) if *c <= W::zero() => return Err(Error::NonPositiveWeight(e)),
                Some(_) => {}
            }
        }
        Ok(Conductances { values })
    }

    pub fn get(&self, e: EdgeId) -> Result<&W> {
        self.values.get(&e).ok_or(Error::UnknownEdge(e))
    }

    pub fn with(&self, e: EdgeId, c: W) -> Result<Self> {
        if c <= W::zero() {
            return Err(Error::NonPositiveWeight(e));
        }
        let mut values = self.values.clone();
        match values.get_mut(&e) {
            Some(slot) => *slot = c,
            None => return Err(Error::UnknownEdge(e)),
        }
        Ok(Conductances { values })
    }
}

fn quotient_laplacian<W: Scalar>(n: usize, edges: impl IntoIterator<Item = (usize, usize, W)>) -> Matrix<W> {
    let mut l: Matrix<W> = Matrix::zeros(n, n);
    for (a, b, c) in edges {
        if a == b {
            continue;
        }
        l[(a, a)] = l[(a, a)].clone() + c.clone();
        l[(b, b)] = l[(b, b)].clone() + c.clone();
        l[(a, b)] = l[(a, b)].clone() - c.clone();
        l[(b, a)] = l[(b, a)].clone() - c;
    }
    l
}

/// Weighted Laplacian indexed by vertex position; parallel edges add,
/// loops are ignored.
pub fn laplacian<W: Scalar>(g: &Multigraph<W>, c: &Conductances<W>) -> Result<Matrix<W>> {
    let mut edges = Vec::with_capacity(g.num_edges());
    for e in g.edges() {
        edges.push((g.idx(e.u), g.idx(e.v), c.get(e.id)?.clone()));
    }
    Ok(quotient_laplacian(g.num_vertices(), edges))
}

/// Weighted count of spanning trees containing `require` and avoiding
/// `forbid`, with the weights of `require` divided out. Computed as one
/// Laplacian minor of `G/require ∖ forbid`; zero when that is disconnected.
pub fn tree_count<W: Scalar>(
    g: &Multigraph<W>,
    c: &Conductances<W>,
    require: &BTreeSet<EdgeId>,
    forbid: &BTreeSet<EdgeId>,
) -> Result<W> {
    g.check_edges(require.iter().chain(forbid))?;
    if let Some(e) = require.intersection(forbid).next() {
        return Err(Error::InvalidEvent(format!("{e} both required and forbidden")));
    }
    let mut uf = UnionFind::new(g.num_vertices());
    for &e in require {
        let edge = g.edge(e)?;
        if !uf.union(g.idx(edge.u), g.idx(edge.v)) {
            return Err(Error::InvalidEvent("required edges contain a cycle".into()));
        }
    }
    let mut class = vec![usize::MAX; g.num_vertices()];
    let mut k = 0;
    for v in 0..g.num_vertices() {
        let r = uf.find(v);
        if class[r] == usize::MAX {
            class[r] = k;
            k += 1;
        }
        class[v] = class[r];
    }
    if k <= 1 {
        return Ok(W::one());
    }
    let mut edges = Vec::new();
    for e in g.edges() {
        if require.contains(&e.id) || forbid.contains(&e.id) {
            continue;
        }
        edges.push((class[g.idx(e.u)], class[g.idx(e.v)], c.get(e.id)?.clone()));
    }
    quotient_laplacian(k, edges).minor(k - 1).determinant()
}

/// Unweighted-event shorthand: `tree_count` with nothing forbidden.
pub fn tree_count_requiring<W: Scalar>(g: &Multigraph<W>, c: &Conductances<W>, require: &[EdgeId]) -> Result<W> {
    tree_count(g, c, &require.iter().copied().collect(), &BTreeSet::new())
}

/// Effective resistance between `u` and `v`.
pub fn effective_resistance<W: Scalar>(g: &Multigraph<W>, c: &Conductances<W>, u: VertexId, v: VertexId) -> Result<W> {
    Ok(unit_current_flow(g, c, u, v)?.resistance().clone())
}

/// `ℙ_UST[e ∈ T]` under the conductance-weighted spanning tree measure.
pub fn ust_edge_probability<W: Scalar>(g: &Multigraph<W>, c: &Conductances<W>, e: EdgeId) -> Result<W> {
    let all = tree_count_requiring(g, c, &[])?;
    if all.is_zero() {
        return Err(Error::NotConnected);
    }
    let edge = g.edge(e)?;
    if edge.is_loop() {
        return Ok(W::zero());
    }
    Ok(tree_count_requiring(g, c, &[e])? * c.get(e)?.clone() / all)
}
