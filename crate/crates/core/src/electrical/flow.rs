//! Unit current flows, Kirchhoff checks and the Rayleigh principle.

use std::collections::{BTreeMap, VecDeque};

use super::Conductances;
use crate::algebra::{Matrix, Scalar};
use crate::error::{Error, Result};
use crate::graph::{EdgeId, Multigraph, VertexId};

/// A flow from `source` to `sink` with the sink grounded at potential 0.
/// Edge currents are oriented from each edge's `u` endpoint to its `v`.
#[derive(Clone, Debug, PartialEq)]
pub struct CurrentFlow<W> {
    pub source: VertexId,
    pub sink: VertexId,
    pub potential: BTreeMap<VertexId, W>,
    pub current: BTreeMap<EdgeId, W>,
}

/// Exact residuals of the three circuit laws; all zero for a true flow.
#[derive(Clone, Debug, PartialEq)]
pub struct KirchhoffResiduals<W> {
    /// Net out-flow minus the prescribed injection, per vertex.
    pub node: Vec<(VertexId, W)>,
    /// `i(e) − c(e)·Δφ(e)`, per edge.
    pub ohm: Vec<(EdgeId, W)>,
    /// `Σ i(e)/c(e)` around each fundamental cycle, keyed by its closing edge.
    pub cycle: Vec<(EdgeId, W)>,
}

impl<W: Scalar> KirchhoffResiduals<W> {
    pub fn is_zero(&self) -> bool {
        self.node.iter().all(|(_, r)| r.is_zero())
            && self.ohm.iter().all(|(_, r)| r.is_zero())
            && self.cycle.iter().all(|(_, r)| r.is_zero())
    }
}

impl<W: Scalar> CurrentFlow<W> {
    pub fn resistance(&self) -> &W {
        &self.potential[&self.source]
    }

    pub fn edge_current(&self, e: EdgeId) -> Result<&W> {
        self.current.get(&e).ok_or(Error::UnknownEdge(e))
    }

    /// Net flow from `a` to `b` over all edges joining them; antisymmetric.
    pub fn flow(&self, g: &Multigraph<W>, a: VertexId, b: VertexId) -> W {
        let mut total = W::zero();
        for e in g.edges() {
            let i = self.current.get(&e.id).cloned().unwrap_or_else(W::zero);
            if e.u == a && e.v == b {
                total = total + i;
            } else if e.u == b && e.v == a {
                total = total - i;
            }
        }
        total
    }

    pub fn net_outflow(&self, g: &Multigraph<W>, v: VertexId) -> W {
        let mut total = W::zero();
        for e in g.incident(v) {
            if e.is_loop() {
                continue;
            }
            let i = self.current[&e.id].clone();
            total = if e.u == v { total + i } else { total - i };
        }
        total
    }

    /// `½ Σ_{oriented e} i²/c`, i.e. `Σ_e i(e)²/c(e)`.
    pub fn energy(&self, c: &Conductances<W>) -> Result<W> {
        let mut total = W::zero();
        for (&e, i) in &self.current {
            total = total + i.clone() * i.clone() / c.get(e)?.clone();
        }
        Ok(total)
    }

    pub fn residuals(&self, g: &Multigraph<W>, c: &Conductances<W>) -> Result<KirchhoffResiduals<W>> {
        let node = g
            .vertices()
            .iter()
            .map(|&v| {
                let target = if v == self.source {
                    W::one()
                } else if v == self.sink {
                    -W::one()
                } else {
                    W::zero()
                };
                (v, self.net_outflow(g, v) - target)
            })
            .collect();
        let mut ohm = Vec::new();
        for e in g.edges() {
            let drop = self.potential[&e.u].clone() - self.potential[&e.v].clone();
            ohm.push((e.id, self.current[&e.id].clone() - c.get(e.id)?.clone() * drop));
        }
        let cycle = fundamental_cycles(g)
            .into_iter()
            .map(|(closing, path)| {
                let mut sum = W::zero();
                for (e, forward) in path {
                    let r = self.current[&e].clone() / c.get(e)?.clone();
                    sum = if forward { sum + r } else { sum - r };
                }
                Ok((closing, sum))
            })
            .collect::<Result<_>>()?;
        Ok(KirchhoffResiduals { node, ohm, cycle })
    }
}

/// For each non-tree edge of a BFS forest, the cycle it closes as a list
/// of `(edge, traversed u→v)`.
fn fundamental_cycles<W: Scalar>(g: &Multigraph<W>) -> Vec<(EdgeId, Vec<(EdgeId, bool)>)> {
    let n = g.num_vertices();
    let mut parent: Vec<Option<(usize, EdgeId, bool)>> = vec![None; n];
    let mut depth = vec![usize::MAX; n];
    let mut tree = std::collections::BTreeSet::new();
    for s in 0..n {
        if depth[s] != usize::MAX {
            continue;
        }
        depth[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(x) = queue.pop_front() {
            let vx = g.vertices()[x];
            for e in g.incident(vx) {
                if e.is_loop() {
                    continue;
                }
                let y = g.idx(e.other(vx));
                if depth[y] == usize::MAX {
                    depth[y] = depth[x] + 1;
                    // Stepping parent→child along e; forward if e.u is the parent.
                    parent[y] = Some((x, e.id, e.u == vx));
                    tree.insert(e.id);
                    queue.push_back(y);
                }
            }
        }
    }
    let mut out = Vec::new();
    for e in g.edges() {
        if tree.contains(&e.id) {
            continue;
        }
        // Walk u → v along e, then v back to u through the tree.
        let mut path = vec![(e.id, true)];
        if !e.is_loop() {
            let (mut a, mut b) = (g.idx(e.v), g.idx(e.u));
            let mut up = Vec::new();
            let mut down = Vec::new();
            while a != b {
                if depth[a] >= depth[b] {
                    let (p, id, fwd) = parent[a].expect("non-root");
                    up.push((id, !fwd));
                    a = p;
                } else {
                    let (p, id, fwd) = parent[b].expect("non-root");
                    down.push((id, fwd));
                    b = p;
                }
            }
            down.reverse();
            path.extend(up);
            path.extend(down);
        }
        out.push((e.id, path));
    }
    out
}

/// The unit current flow from `u` to `v` by an exact grounded-Laplacian solve.
pub fn unit_current_flow<W: Scalar>(
    g: &Multigraph<W>,
    c: &Conductances<W>,
    u: VertexId,
    v: VertexId,
) -> Result<CurrentFlow<W>> {
    for x in [u, v] {
        if !g.contains_vertex(x) {
            return Err(Error::UnknownVertex(x));
        }
    }
    if u == v {
        return Err(Error::InvalidArgument("source and sink coincide".into()));
    }
    if !g.connected(u, v) {
        return Err(Error::Disconnected(u, v));
    }
    let component: Vec<VertexId> = g
        .components()
        .into_iter()
        .find(|comp| comp.contains(&u))
        .expect("u lies in some component");
    let sub = g.induced(&component);
    let lap = super::laplacian(&sub, c)?;
    let sink = sub.idx(v);
    let keep: Vec<usize> = (0..sub.num_vertices()).filter(|&i| i != sink).collect();
    let k = keep.len();
    let grounded = Matrix::from_vec(
        k,
        k,
        keep.iter()
            .flat_map(|&i| keep.iter().map(move |&j| (i, j)))
            .map(|(i, j)| lap[(i, j)].clone())
            .collect(),
    )?;
    let rhs: Vec<W> = keep
        .iter()
        .map(|&i| if i == sub.idx(u) { W::one() } else { W::zero() })
        .collect();
    let phi = grounded.solve(&rhs)?;

    let mut potential: BTreeMap<VertexId, W> = g.vertices().iter().map(|&x| (x, W::zero())).collect();
    for (slot, &i) in keep.iter().enumerate() {
        potential.insert(sub.vertices()[i], phi[slot].clone());
    }
    let mut current = BTreeMap::new();
    for e in g.edges() {
        let drop = potential[&e.u].clone() - potential[&e.v].clone();
        current.insert(e.id, c.get(e.id)?.clone() * drop);
    }
    Ok(CurrentFlow {
        source: u,
        sink: v,
        potential,
        current,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct RayleighReport<W> {
    /// `(c(e0), R_eff)` for each bump.
    pub values: Vec<(W, W)>,
    pub current_through_e0: W,
    pub strictly_decreasing: bool,
    pub constant: bool,
}

impl<W: Scalar> RayleighReport<W> {
    /// Strict decrease when current flows through `e0`, constancy otherwise.
    pub fn consistent(&self) -> bool {
        if self.current_through_e0.is_zero() {
            self.constant
        } else {
            self.strictly_decreasing
        }
    }
}

/// Effective resistance between `u` and `v` as `c(e0)` takes each value
/// in `bumps`.
pub fn rayleigh_check<W: Scalar>(
    g: &Multigraph<W>,
    c: &Conductances<W>,
    u: VertexId,
    v: VertexId,
    e0: EdgeId,
    bumps: &[W],
) -> Result<RayleighReport<W>> {
    if bumps.iter().any(|b| *b <= W::zero()) || bumps.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument("bumps must be positive and increasing".into()));
    }
    let first = c.with(e0, bumps.first().cloned().unwrap_or_else(|| c.get(e0).cloned().unwrap_or_else(|_| W::one())))?;
    let current_through_e0 = unit_current_flow(g, &first, u, v)?.edge_current(e0)?.clone();
    let mut values = Vec::with_capacity(bumps.len());
    for b in bumps {
        let r = super::effective_resistance(g, &c.with(e0, b.clone())?, u, v)?;
        values.push((b.clone(), r));
    }
    let strictly_decreasing = values.windows(2).all(|w| w[1].1 < w[0].1);
    let constant = values.windows(2).all(|w| w[1].1 == w[0].1);
    Ok(RayleighReport {
        values,
        current_through_e0,
        strictly_decreasing,
        constant,
    })
}

/// Whether some simple cycle uses both adjacent edges, and the current
/// through `e2` under the unit flow across `e1` (conductances = weights).
///
/// For `e1 = {a, x}` and `e2 = {a, y}` a shared cycle exists iff `x = y`
/// (parallel edges) or `x` and `y` are connected in `G − a`.
pub fn shared_cycle_current<W: Scalar>(g: &Multigraph<W>, e1: EdgeId, e2: EdgeId) -> Result<(bool, W)> {
    let a1 = g.edge(e1)?.clone();
    let a2 = g.edge(e2)?.clone();
    if e1 == e2 || !a1.shares_endpoint(&a2) {
        return Err(Error::NotAdjacent(e1, e2));
    }
    let c = Conductances::from_weights(g);
    let current = if a1.is_loop() {
        W::zero()
    } else {
        unit_current_flow(g, &c, a1.u, a1.v)?.edge_current(e2)?.clone()
    };
    if a1.is_loop() || a2.is_loop() {
        return Ok((false, current));
    }
    let shared = if (a1.u == a2.u && a1.v == a2.v) || (a1.u == a2.v && a1.v == a2.u) {
        true
    } else {
        let a = if a2.touches(a1.u) { a1.u } else { a1.v };
        let x = a1.other(a);
        let y = a2.other(a);
        let rest: Vec<VertexId> = g.vertices().iter().copied().filter(|&w| w != a).collect();
        g.induced(&rest).connected(x, y)
    };
    Ok((shared, current))
}
