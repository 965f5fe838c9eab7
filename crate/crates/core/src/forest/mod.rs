//! Arboreal Gas measures: the partition function, μ values of forest
//! events, probabilities and conditional probabilities.
//!
//! Convention: `μ[S1 S̄2]` sums `Π β_e` over forests `F ⊇ S1` with
//! `F ∩ S2 = ∅`, taking the product over `F ∖ S1` only. It is the partition
//! function of `G/S1` (loops dropped) with `S2` deleted, and vanishes when
//! `S1` contains a cycle.

mod engine;
mod oracle;

use std::collections::BTreeSet;
use std::fmt;

use num_rational::BigRational;
use num_traits::Zero;

use crate::algebra::{ratio_string, Polynomial, Scalar};
use crate::error::{Error, Result};
use crate::graph::{EdgeId, Multigraph, UnionFind};

pub use engine::{MeasureRing, MuEngine, DEFAULT_CACHE_CAPACITY};
pub(crate) use engine::Net;
pub use oracle::{enumerate_mu, enumerate_mu_symbolic, percolation_check, ForestTable, MAX_ENUMERATION_EDGES};

/// A forest event: every edge of `require` present, every edge of `forbid` absent.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct EventSpec {
    pub require: BTreeSet<EdgeId>,
    pub forbid: BTreeSet<EdgeId>,
}

impl EventSpec {
    pub fn new(
        require: impl IntoIterator<Item = EdgeId>,
        forbid: impl IntoIterator<Item = EdgeId>,
    ) -> Result<Self> {
        let ev = EventSpec {
            require: require.into_iter().collect(),
            forbid: forbid.into_iter().collect(),
        };
        if let Some(e) = ev.require.intersection(&ev.forbid).next() {
            return Err(Error::InvalidEvent(format!("{e} both required and forbidden")));
        }
        Ok(ev)
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn requiring(edges: impl IntoIterator<Item = EdgeId>) -> Self {
        EventSpec {
            require: edges.into_iter().collect(),
            forbid: BTreeSet::new(),
        }
    }

    pub fn forbidding(edges: impl IntoIterator<Item = EdgeId>) -> Self {
        EventSpec {
            require: BTreeSet::new(),
            forbid: edges.into_iter().collect(),
        }
    }

    /// Checks disjointness and that every edge exists in `g`.
    pub fn validate<W: Scalar>(&self, g: &Multigraph<W>) -> Result<()> {
        if let Some(e) = self.require.intersection(&self.forbid).next() {
            return Err(Error::InvalidEvent(format!("{e} both required and forbidden")));
        }
        g.check_edges(self.require.iter().chain(&self.forbid))
    }

    pub fn is_empty(&self) -> bool {
        self.require.is_empty() && self.forbid.is_empty()
    }
}

impl fmt::Display for EventSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |s: &BTreeSet<EdgeId>| s.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(",");
        write!(f, "require {{{}}} forbid {{{}}}", list(&self.require), list(&self.forbid))
    }
}

/// Numeric weights per edge, or one formal β shared by every edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Weighted,
    Symbolic,
}

#[derive(Clone, Debug, PartialEq)]
pub enum MeasureValue {
    Rational(BigRational),
    Polynomial(Polynomial<BigRational>),
}

impl MeasureValue {
    pub fn mode(&self) -> Mode {
        match self {
            MeasureValue::Rational(_) => Mode::Weighted,
            MeasureValue::Polynomial(_) => Mode::Symbolic,
        }
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            MeasureValue::Rational(r) => Some(r),
            MeasureValue::Polynomial(_) => None,
        }
    }

    pub fn as_polynomial(&self) -> Option<&Polynomial<BigRational>> {
        match self {
            MeasureValue::Polynomial(p) => Some(p),
            MeasureValue::Rational(_) => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            MeasureValue::Rational(r) => r.is_zero(),
            MeasureValue::Polynomial(p) => p.is_zero(),
        }
    }
}

impl fmt::Display for MeasureValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MeasureValue::Rational(r) => f.write_str(&ratio_string(r)),
            MeasureValue::Polynomial(p) => write!(f, "{p}"),
        }
    }
}

/// Builds the contracted-and-deleted net for an event, or `None` when the
/// required edges contain a cycle.
pub(crate) fn event_net<W: Scalar, R: MeasureRing>(
    g: &Multigraph<W>,
    ev: &EventSpec,
    weight: impl Fn(&W) -> R,
) -> Result<Option<Net<R>>> {
    ev.validate(g)?;
    let mut uf = UnionFind::new(g.num_vertices());
    for &e in &ev.require {
        let edge = g.edge(e)?;
        if !uf.union(g.idx(edge.u), g.idx(edge.v)) {
            return Ok(None);
        }
    }
    let edges: Vec<(usize, usize, R)> = g
        .edges()
        .iter()
        .filter(|e| !ev.require.contains(&e.id) && !ev.forbid.contains(&e.id))
        .map(|e| (uf.find(g.idx(e.u)), uf.find(g.idx(e.v)), weight(&e.weight)))
        .collect();
    Ok(Some(Net::normalized(g.num_vertices(), edges)))
}

fn require_uniform<W: Scalar>(g: &Multigraph<W>) -> Result<()> {
    if g.has_uniform_weights() {
        Ok(())
    } else {
        Err(Error::ModeMismatch)
    }
}

/// `μ[S1 S̄2]` with the graph's numeric weights.
pub fn mu<W: Scalar>(g: &Multigraph<W>, ev: &EventSpec) -> Result<W> {
    mu_with(&mut MuEngine::default(), g, ev)
}

pub fn mu_with<W: Scalar>(engine: &mut MuEngine<W>, g: &Multigraph<W>, ev: &EventSpec) -> Result<W> {
    Ok(match event_net(g, ev, W::clone)? {
        Some(net) => engine.partition(net),
        None => W::zero(),
    })
}

/// `μ[S1 S̄2]` as a polynomial in a uniform formal β. The numeric weights
/// are ignored but must all be equal.
pub fn mu_symbolic<W: Scalar>(g: &Multigraph<W>, ev: &EventSpec) -> Result<Polynomial<W>> {
    mu_symbolic_with(&mut MuEngine::default(), g, ev)
}

pub fn mu_symbolic_with<W: Scalar>(
    engine: &mut MuEngine<Polynomial<W>>,
    g: &Multigraph<W>,
    ev: &EventSpec,
) -> Result<Polynomial<W>> {
    require_uniform(g)?;
    Ok(match event_net(g, ev, |_| Polynomial::var())? {
        Some(net) => engine.partition(net),
        None => Polynomial::zero(),
    })
}

/// `μ[S1 S̄2]` in the requested mode.
pub fn measure(g: &Multigraph<BigRational>, ev: &EventSpec, mode: Mode) -> Result<MeasureValue> {
    Ok(match mode {
        Mode::Weighted => MeasureValue::Rational(mu(g, ev)?),
        Mode::Symbolic => MeasureValue::Polynomial(mu_symbolic(g, ev)?),
    })
}

/// Partition function `Z_β`.
pub fn partition_function<W: Scalar>(g: &Multigraph<W>) -> Result<W> {
    mu(g, &EventSpec::empty())
}

/// Uniform-β forest polynomial `Σ_k (#forests with k edges) β^k`.
pub fn forest_polynomial<W: Scalar>(g: &Multigraph<W>) -> Result<Polynomial<W>> {
    mu_symbolic(g, &EventSpec::empty())
}

fn product_of_weights<'a, W: Scalar>(g: &Multigraph<W>, edges: impl IntoIterator<Item = &'a EdgeId>) -> Result<W> {
    let mut p = W::one();
    for e in edges {
        p = p * g.weight(*e)?.clone();
    }
    Ok(p)
}

/// `ℙ_β[S1 ⊆ F, S2 ∩ F = ∅]`.
pub fn prob<W: Scalar>(g: &Multigraph<W>, ev: &EventSpec) -> Result<W> {
    prob_with(&mut MuEngine::default(), g, ev)
}

pub fn prob_with<W: Scalar>(engine: &mut MuEngine<W>, g: &Multigraph<W>, ev: &EventSpec) -> Result<W> {
    let m = mu_with(engine, g, ev)?;
    if m.is_zero() {
        return Ok(m);
    }
    let z = mu_with(engine, g, &EventSpec::empty())?;
    Ok(m * product_of_weights(g, &ev.require)? / z)
}

/// `ℙ_β[ev | S ⊆ F]`.
pub fn conditional_prob<W: Scalar>(g: &Multigraph<W>, ev: &EventSpec, given: &BTreeSet<EdgeId>) -> Result<W> {
    ev.validate(g)?;
    g.check_edges(given)?;
    if g.has_cycle_in(given) {
        return Err(Error::CyclicConditioning);
    }
    if given.iter().any(|e| ev.forbid.contains(e)) {
        return Ok(W::zero());
    }
    let mut engine = MuEngine::default();
    let joint = EventSpec {
        require: ev.require.union(given).copied().collect(),
        forbid: ev.forbid.clone(),
    };
    let num = mu_with(&mut engine, g, &joint)?;
    if num.is_zero() {
        return Ok(num);
    }
    let den = mu_with(&mut engine, g, &EventSpec::requiring(given.iter().copied()))?;
    Ok(num * product_of_weights(g, ev.require.difference(given))? / den)
}

/// `ℙ[e]` for every edge, sharing one engine.
pub fn edge_marginals<W: Scalar>(g: &Multigraph<W>) -> Result<Vec<(EdgeId, W)>> {
    let mut engine = MuEngine::default();
    g.edge_ids()
        .into_iter()
        .map(|e| Ok((e, prob_with(&mut engine, g, &EventSpec::requiring([e]))?)))
        .collect()
}

/// `true` when `x` lies in `[0, 1]`.
pub fn is_probability<W: Scalar>(x: &W) -> bool {
    *x >= W::zero() && *x <= W::one()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational;
    use crate::graph::{generate, GraphKind};
    use crate::Graph;

    fn e(i: u32) -> EdgeId {
        EdgeId(i)
    }

    fn triangle(beta: BigRational) -> Graph {
        generate(GraphKind::Cycle(3), beta).unwrap()
    }

    #[test]
    fn triangle_values() {
        let g = triangle(rational(1, 1));
        assert_eq!(forest_polynomial(&g).unwrap(), Polynomial::from_ints(&[1, 3, 3]));
        assert_eq!(mu_symbolic(&g, &EventSpec::requiring([e(0)])).unwrap(), Polynomial::from_ints(&[1, 2]));
        assert_eq!(prob(&g, &EventSpec::requiring([e(0)])).unwrap(), rational(3, 7));
        assert_eq!(prob(&g, &EventSpec::requiring([e(0), e(1)])).unwrap(), rational(1, 7));
        assert_eq!(prob(&g, &EventSpec::requiring([e(0), e(1), e(2)])).unwrap(), rational(0, 1));
        assert_eq!(prob(&g, &EventSpec::empty()).unwrap(), rational(1, 1));
    }

    #[test]
    fn k4_and_single_edge() {
        let k4: Graph = generate(GraphKind::Complete(4), rational(1, 1)).unwrap();
        let p = forest_polynomial(&k4).unwrap();
        assert_eq!(p.degree(), Some(3));
        assert_eq!(p.coeff(3), rational(16, 1));
        let edge: Graph = generate(GraphKind::Path(2), rational(2, 3)).unwrap();
        assert_eq!(partition_function(&edge).unwrap(), rational(5, 3));
    }

    #[test]
    fn tree_with_everything_required() {
        let tree: Graph = generate(GraphKind::Path(5), rational(7, 2)).unwrap();
        let all = EventSpec::requiring(tree.edge_ids());
        assert_eq!(mu(&tree, &all).unwrap(), rational(1, 1));
    }

    #[test]
    fn conditional_probabilities() {
        let g = triangle(rational(1, 1));
        let given: BTreeSet<EdgeId> = [e(0)].into();
        assert_eq!(conditional_prob(&g, &EventSpec::requiring([e(1)]), &given).unwrap(), rational(1, 3));
        let ev = EventSpec::requiring([e(1)]);
        assert_eq!(conditional_prob(&g, &ev, &BTreeSet::new()).unwrap(), prob(&g, &ev).unwrap());
        assert_eq!(conditional_prob(&g, &EventSpec::requiring([e(0)]), &given).unwrap(), rational(1, 1));
        let cyclic: BTreeSet<EdgeId> = [e(0), e(1), e(2)].into();
        assert_eq!(conditional_prob(&g, &ev, &cyclic), Err(Error::CyclicConditioning));
    }

    #[test]
    fn symbolic_mode_requires_uniform_weights() {
        let g = triangle(rational(1, 1)).with_weight(e(0), rational(2, 1)).unwrap();
        assert_eq!(mu_symbolic(&g, &EventSpec::empty()), Err(Error::ModeMismatch));
        assert!(measure(&g, &EventSpec::empty(), Mode::Weighted).is_ok());
    }

    #[test]
    fn invalid_events_rejected() {
        let g = triangle(rational(1, 1));
        assert!(EventSpec::new([e(0)], [e(0)]).is_err());
        assert!(matches!(mu(&g, &EventSpec::requiring([e(9)])), Err(Error::UnknownEdge(_))));
    }

    #[test]
    fn float_weights_work() {
        let g: Multigraph<f64> = generate(GraphKind::Cycle(3), 1.0).unwrap();
        let p = prob(&g, &EventSpec::requiring([e(0)])).unwrap();
        assert!((p - 3.0 / 7.0).abs() < 1e-12);
    }
}
