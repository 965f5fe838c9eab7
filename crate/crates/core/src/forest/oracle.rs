//! Direct sums over edge subsets. Slow, obviously correct, and used to
//! cross-check the deletion–contraction engine.


use super::EventSpec;
use crate::algebra::{Polynomial, Scalar};
use crate::error::{Error, Result};
use crate::graph::{EdgeId, Multigraph, RollbackUnionFind, UnionFind};

pub const MAX_ENUMERATION_EDGES: usize = 22;

fn check_size<W: Scalar>(g: &Multigraph<W>) -> Result<()> {
    if g.num_edges() > MAX_ENUMERATION_EDGES {
        return Err(Error::SizeLimit {
            what: "edge count for subset enumeration",
            limit: MAX_ENUMERATION_EDGES,
            actual: g.num_edges(),
        });
    }
    Ok(())
}

fn is_forest<W: Scalar>(g: &Multigraph<W>, mask: u32) -> bool {
    let mut uf = UnionFind::new(g.num_vertices());
    g.edges()
        .iter()
        .enumerate()
        .filter(|(i, _)| mask >> i & 1 == 1)
        .all(|(_, e)| uf.union(g.idx(e.u), g.idx(e.v)))
}

fn event_masks<W: Scalar>(g: &Multigraph<W>, ev: &EventSpec) -> Result<(u32, u32)> {
    ev.validate(g)?;
    let mut require = 0u32;
    let mut forbid = 0u32;
    for (i, e) in g.edges().iter().enumerate() {
        if ev.require.contains(&e.id) {
            require |= 1 << i;
        }
        if ev.forbid.contains(&e.id) {
            forbid |= 1 << i;
        }
    }
    Ok((require, forbid))
}

/// Visits every forest in the event, passing the mask of its edges.
fn for_each_forest<W: Scalar>(g: &Multigraph<W>, ev: &EventSpec, mut visit: impl FnMut(u32)) -> Result<()> {
    check_size(g)?;
    let (require, forbid) = event_masks(g, ev)?;
    for mask in 0u32..(1u32 << g.num_edges()) {
        if mask & require == require && mask & forbid == 0 && is_forest(g, mask) {
            visit(mask);
        }
    }
    Ok(())
}

/// `μ[S1 S̄2]` by scanning all `2^|E|` subsets.
pub fn enumerate_mu<W: Scalar>(g: &Multigraph<W>, ev: &EventSpec) -> Result<W> {
    let (require, _) = event_masks(g, ev)?;
    let mut total = W::zero();
    for_each_forest(g, ev, |mask| {
        let mut w = W::one();
        for (i, e) in g.edges().iter().enumerate() {
            if mask >> i & 1 == 1 && require >> i & 1 == 0 {
                w = w * e.weight.clone();
            }
        }
        total = total.clone() + w;
    })?;
    Ok(total)
}

/// Symbolic counterpart of [`enumerate_mu`]: coefficient `k` counts the
/// forests in the event with `k` edges beyond the required ones.
pub fn enumerate_mu_symbolic<W: Scalar>(g: &Multigraph<W>, ev: &EventSpec) -> Result<Polynomial<W>> {
    if !g.has_uniform_weights() {
        return Err(Error::ModeMismatch);
    }
    let free = ev.require.len() as u32;
    let mut counts = vec![0i64; g.num_edges() + 1];
    for_each_forest(g, ev, |mask| counts[(mask.count_ones() - free) as usize] += 1)?;
    Ok(Polynomial::from_ints(&counts))
}

/// Bernoulli(`β/(1+β)`) bond percolation conditioned on acyclicity,
/// against the Arboreal Gas probability. Returns `(percolation, gas)`.
pub fn percolation_check<W: Scalar>(g: &Multigraph<W>, beta: &W, ev: &EventSpec) -> Result<(W, W)> {
    let g = g.with_uniform_weight(beta);
    check_size(&g)?;
    let (require, forbid) = event_masks(&g, ev)?;
    let p = beta.clone() / (W::one() + beta.clone());
    let q = W::one() - p.clone();
    let m = g.num_edges() as u32;
    let mut acyclic = W::zero();
    let mut inside = W::zero();
    for mask in 0u32..(1u32 << m) {
        if !is_forest(&g, mask) {
            continue;
        }
        let open = mask.count_ones();
        let w = pow(&p, open) * pow(&q, m - open);
        if mask & require == require && mask & forbid == 0 {
            inside = inside + w.clone();
        }
        acyclic = acyclic + w;
    }
    Ok((inside / acyclic, super::prob(&g, ev)?))
}

fn pow<W: Scalar>(x: &W, k: u32) -> W {
    (0..k).fold(W::one(), |acc, _| acc * x.clone())
}

/// Every forest of a small graph with its weight, for answering many
/// event queries on one graph.
#[derive(Clone, Debug)]
pub struct ForestTable<W> {
    edges: Vec<EdgeId>,
    weights: Vec<W>,
    forests: Vec<(u32, W)>,
    z: W,
}

impl<W: Scalar> ForestTable<W> {
    pub fn new(g: &Multigraph<W>) -> Result<Self> {
        check_size(g)?;
        let ends: Vec<(usize, usize)> = g.edges().iter().map(|e| (g.idx(e.u), g.idx(e.v))).collect();
        let weights: Vec<W> = g.edges().iter().map(|e| e.weight.clone()).collect();
        let mut forests = Vec::new();
        let mut uf = RollbackUnionFind::new(g.num_vertices());
        grow(&ends, &weights, 0, 0, W::one(), &mut uf, &mut forests);
        let z = forests.iter().fold(W::zero(), |acc, (_, w)| acc + w.clone());
        Ok(ForestTable {
            edges: g.edge_ids(),
            weights,
            forests,
            z,
        })
    }

    pub fn len(&self) -> usize {
        self.forests.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forests.is_empty()
    }

    pub fn partition_function(&self) -> &W {
        &self.z
    }

    fn mask(&self, edges: &std::collections::BTreeSet<EdgeId>) -> Result<u32> {
        let mut mask = 0;
        for e in edges {
            let i = self.edges.binary_search(e).map_err(|_| Error::UnknownEdge(*e))?;
            mask |= 1 << i;
        }
        Ok(mask)
    }

    fn weight_sum(&self, ev: &EventSpec) -> Result<W> {
        let require = self.mask(&ev.require)?;
        let forbid = self.mask(&ev.forbid)?;
        Ok(self
            .forests
            .iter()
            .filter(|(m, _)| m & require == require && m & forbid == 0)
            .fold(W::zero(), |acc, (_, w)| acc + w.clone()))
    }

    pub fn prob(&self, ev: &EventSpec) -> Result<W> {
        Ok(self.weight_sum(ev)? / self.z.clone())
    }

    pub fn mu(&self, ev: &EventSpec) -> Result<W> {
        let require = self.mask(&ev.require)?;
        let divisor = (0..self.edges.len())
            .filter(|i| require >> i & 1 == 1)
            .fold(W::one(), |acc, i| acc * self.weights[i].clone());
        Ok(self.weight_sum(ev)? / divisor)
    }
}

fn grow<W: Scalar>(
    ends: &[(usize, usize)],
    weights: &[W],
    i: usize,
    mask: u32,
    weight: W,
    uf: &mut RollbackUnionFind,
    out: &mut Vec<(u32, W)>,
) {
    if i == ends.len() {
        out.push((mask, weight));
        return;
    }
    grow(ends, weights, i + 1, mask, weight.clone(), uf, out);
    let (a, b) = ends[i];
    if uf.union(a, b) {
        grow(ends, weights, i + 1, mask | 1 << i, weight * weights[i].clone(), uf, out);
        uf.rollback();
    }
}
