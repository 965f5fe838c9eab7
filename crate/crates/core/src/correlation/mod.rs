//! Negative-correlation margins for edge pairs and edge sets.
//!
//! The pair margin is `μ[e1]μ[e2] − μ[e1e2]μ[1]`, which has the sign of
//! `ℙ[e1]ℙ[e2] − ℙ[e1e2]`. It is identically equal to
//! `μ[e1ē2]μ[ē1e2] − μ[e1e2]μ[ē1ē2]`; both forms are computed and compared.

mod coefficients;
mod threshold;

use std::collections::BTreeSet;
use std::fmt;

use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::algebra::Polynomial;
use crate::error::{Error, Result};
use crate::forest::{mu_symbolic_with, mu_with, EventSpec, MeasureValue, Mode, MuEngine, DEFAULT_CACHE_CAPACITY};
use crate::graph::{EdgeId, Multigraph};

pub use coefficients::{
    i_k_sum, i_k_values, kn_closed_forms, leading_coeff_analysis, second_coeff, two_tree_forest_count, Interpretation, KnAnalysis,
    LeadingCoefficient, NineCases, SecondCoefficient,
};
pub use threshold::{
    beta_threshold, monotonicity_check, small_beta_probe, MonotonicityReport, Side, SmallBetaProbe, Threshold,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Verdict {
    Holds,
    Violated,
    IdenticallyZero,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Holds => "holds",
            Verdict::Violated => "violated",
            Verdict::IdenticallyZero => "identically_zero",
        })
    }
}

/// A negative-correlation margin with its verdict and the values it was
/// built from.
#[derive(Clone, Debug, PartialEq)]
pub struct NCMargin {
    pub margin: MeasureValue,
    pub verdict: Verdict,
    pub witnesses: Vec<(String, MeasureValue)>,
    /// `μ[e1ē2]μ[ē1e2] − μ[e1e2]μ[ē1ē2]` for pair margins.
    pub alternate: Option<MeasureValue>,
}

impl NCMargin {
    /// Whether the alternate form (when present) equals the margin.
    pub fn forms_agree(&self) -> bool {
        self.alternate.as_ref().is_none_or(|a| *a == self.margin)
    }
}

fn rational_verdict(m: &BigRational) -> Verdict {
    if m.is_negative() {
        Verdict::Violated
    } else {
        Verdict::Holds
    }
}

fn polynomial_verdict(m: &Polynomial<BigRational>) -> Verdict {
    if m.is_zero() {
        Verdict::IdenticallyZero
    } else if m.min_sign_on_positive_axis() < 0 {
        Verdict::Violated
    } else {
        Verdict::Holds
    }
}

/// μ values in either mode with one shared memo table.
pub struct MeasureContext<'g> {
    graph: &'g Multigraph<BigRational>,
    mode: Mode,
    weighted: MuEngine<BigRational>,
    symbolic: MuEngine<Polynomial<BigRational>>,
}

impl<'g> MeasureContext<'g> {
    pub fn new(graph: &'g Multigraph<BigRational>, mode: Mode) -> Result<Self> {
        Self::with_capacity(graph, mode, DEFAULT_CACHE_CAPACITY)
    }

    /// As [`MeasureContext::new`] with `capacity` memo entries per mode.
    pub fn with_capacity(graph: &'g Multigraph<BigRational>, mode: Mode, capacity: usize) -> Result<Self> {
        if mode == Mode::Symbolic && !graph.has_uniform_weights() {
            return Err(Error::ModeMismatch);
        }
        Ok(MeasureContext {
            graph,
            mode,
            weighted: MuEngine::new(capacity),
            symbolic: MuEngine::new(capacity),
        })
    }

    pub fn graph(&self) -> &Multigraph<BigRational> {
        self.graph
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn mu(&mut self, ev: &EventSpec) -> Result<MeasureValue> {
        Ok(match self.mode {
            Mode::Weighted => MeasureValue::Rational(mu_with(&mut self.weighted, self.graph, ev)?),
            Mode::Symbolic => MeasureValue::Polynomial(mu_symbolic_with(&mut self.symbolic, self.graph, ev)?),
        })
    }

    pub fn mu_rational(&mut self, ev: &EventSpec) -> Result<BigRational> {
        mu_with(&mut self.weighted, self.graph, ev)
    }

    pub fn mu_polynomial(&mut self, ev: &EventSpec) -> Result<Polynomial<BigRational>> {
        mu_symbolic_with(&mut self.symbolic, self.graph, ev)
    }

    /// `ℙ[S ⊆ F]` with the numeric weights.
    pub fn prob_requiring(&mut self, s: &BTreeSet<EdgeId>) -> Result<BigRational> {
        let m = self.mu_rational(&EventSpec::requiring(s.iter().copied()))?;
        if m.is_zero() {
            return Ok(m);
        }
        let z = self.mu_rational(&EventSpec::empty())?;
        let mut w = BigRational::from_integer(1.into());
        for e in s {
            w *= self.graph.weight(*e)?;
        }
        Ok(m * w / z)
    }

    pub fn nc_pair(&mut self, e1: EdgeId, e2: EdgeId) -> Result<NCMargin> {
        if e1 == e2 {
            return Err(Error::InvalidArgument(format!("edge pair must be distinct, got {e1} twice")));
        }
        self.graph.check_edges([&e1, &e2])?;
        let ev = |req: &[EdgeId], forb: &[EdgeId]| EventSpec::new(req.iter().copied(), forb.iter().copied());
        let m1 = self.mu(&ev(&[e1], &[])?)?;
        let m2 = self.mu(&ev(&[e2], &[])?)?;
        let m12 = self.mu(&ev(&[e1, e2], &[])?)?;
        let z = self.mu(&EventSpec::empty())?;
        let m1n2 = self.mu(&ev(&[e1], &[e2])?)?;
        let n1m2 = self.mu(&ev(&[e2], &[e1])?)?;
        let n1n2 = self.mu(&ev(&[], &[e1, e2])?)?;

        let (margin, alternate, verdict) = match (&m1, &m2, &m12, &z, &m1n2, &n1m2, &n1n2) {
            (
                MeasureValue::Rational(a),
                MeasureValue::Rational(b),
                MeasureValue::Rational(ab),
                MeasureValue::Rational(z),
                MeasureValue::Rational(x),
                MeasureValue::Rational(y),
                MeasureValue::Rational(w),
            ) => {
                let m = a * b - ab * z;
                let alt = x * y - ab * w;
                let v = rational_verdict(&m);
                (MeasureValue::Rational(m), MeasureValue::Rational(alt), v)
            }
            (
                MeasureValue::Polynomial(a),
                MeasureValue::Polynomial(b),
                MeasureValue::Polynomial(ab),
                MeasureValue::Polynomial(z),
                MeasureValue::Polynomial(x),
                MeasureValue::Polynomial(y),
                MeasureValue::Polynomial(w),
            ) => {
                let m = &(a * b) - &(ab * z);
                let alt = &(x * y) - &(ab * w);
                let v = polynomial_verdict(&m);
                (MeasureValue::Polynomial(m), MeasureValue::Polynomial(alt), v)
            }
            _ => unreachable!("a context evaluates in one mode"),
        };
        Ok(NCMargin {
            margin,
            verdict,
            witnesses: vec![
                ("mu[e1]".into(), m1),
                ("mu[e2]".into(), m2),
                ("mu[e1e2]".into(), m12),
                ("mu[1]".into(), z),
                ("mu[e1 !e2]".into(), m1n2),
                ("mu[!e1 e2]".into(), n1m2),
                ("mu[!e1 !e2]".into(), n1n2),
            ],
            alternate: Some(alternate),
        })
    }

    pub fn nc_sets(&mut self, s1: &BTreeSet<EdgeId>, s2: &BTreeSet<EdgeId>) -> Result<NCMargin> {
        if let Some(e) = s1.intersection(s2).next() {
            return Err(Error::InvalidEvent(format!("{e} lies in both sets")));
        }
        self.graph.check_edges(s1.iter().chain(s2))?;
        let p1 = self.prob_requiring(s1)?;
        let p2 = self.prob_requiring(s2)?;
        let p12 = self.prob_requiring(&s1.union(s2).copied().collect())?;
        let m = &p1 * &p2 - &p12;
        Ok(NCMargin {
            verdict: rational_verdict(&m),
            margin: MeasureValue::Rational(m),
            witnesses: vec![
                ("P[S1]".into(), MeasureValue::Rational(p1)),
                ("P[S2]".into(), MeasureValue::Rational(p2)),
                ("P[S1S2]".into(), MeasureValue::Rational(p12)),
            ],
            alternate: None,
        })
    }
}

/// Margin for one edge pair.
pub fn nc_pair(g: &Multigraph<BigRational>, e1: EdgeId, e2: EdgeId, mode: Mode) -> Result<NCMargin> {
    MeasureContext::new(g, mode)?.nc_pair(e1, e2)
}

/// Margins for every unordered pair of distinct edges, in id order.
pub fn nc_all(g: &Multigraph<BigRational>, mode: Mode) -> Result<Vec<(EdgeId, EdgeId, NCMargin)>> {
    let mut ctx = MeasureContext::new(g, mode)?;
    let ids = g.edge_ids();
    let mut out = Vec::new();
    for (i, &a) in ids.iter().enumerate() {
        for &b in &ids[i + 1..] {
            out.push((a, b, ctx.nc_pair(a, b)?));
        }
    }
    Ok(out)
}

/// `ℙ[S1]ℙ[S2] − ℙ[S1 ∪ S2]` with the numeric weights.
pub fn nc_sets(g: &Multigraph<BigRational>, s1: &BTreeSet<EdgeId>, s2: &BTreeSet<EdgeId>) -> Result<NCMargin> {
    MeasureContext::new(g, Mode::Weighted)?.nc_sets(s1, s2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational;
    use crate::graph::{enumerate_small_graphs, generate, GraphKind};
    use crate::Graph;

    fn e(i: u32) -> EdgeId {
        EdgeId(i)
    }

    #[test]
    fn triangle_margin() {
        let g: Graph = generate(GraphKind::Cycle(3), rational(1, 1)).unwrap();
        let m = nc_pair(&g, e(0), e(1), Mode::Symbolic).unwrap();
        assert_eq!(m.margin, MeasureValue::Polynomial(Polynomial::from_ints(&[0, 1, 1])));
        assert_eq!(m.verdict, Verdict::Holds);
        assert!(m.forms_agree());
        let s: BTreeSet<EdgeId> = [e(0)].into();
        let t: BTreeSet<EdgeId> = [e(1)].into();
        assert_eq!(nc_sets(&g, &s, &t).unwrap().margin, MeasureValue::Rational(rational(2, 49)));
        assert_eq!(nc_sets(&g, &BTreeSet::new(), &BTreeSet::new()).unwrap().margin, MeasureValue::Rational(rational(0, 1)));
    }

    #[test]
    fn trees_are_independent() {
        let g: Graph = generate(GraphKind::Path(5), rational(1, 1)).unwrap();
        for (_, _, m) in nc_all(&g, Mode::Symbolic).unwrap() {
            assert_eq!(m.verdict, Verdict::IdenticallyZero);
        }
        let g = g.with_weight(e(1), rational(7, 3)).unwrap();
        for (_, _, m) in nc_all(&g, Mode::Weighted).unwrap() {
            assert!(m.margin.is_zero());
        }
    }

    #[test]
    fn k4_disjoint_pair_top_coefficient_vanishes() {
        let g: Graph = generate(GraphKind::Complete(4), rational(1, 1)).unwrap();
        let m = nc_pair(&g, e(0), e(5), Mode::Symbolic).unwrap();
        let p = m.margin.as_polynomial().unwrap();
        assert!(p.degree().unwrap() < 4);
        assert_eq!(p.coeff(4), rational(0, 1));
        assert_eq!(p.coeff(6), rational(0, 1));
        assert_eq!(m.verdict, Verdict::Holds);
    }

    #[test]
    fn bad_pairs_rejected() {
        let g: Graph = generate(GraphKind::Cycle(3), rational(1, 1)).unwrap();
        assert!(nc_pair(&g, e(0), e(0), Mode::Weighted).is_err());
        let s: BTreeSet<EdgeId> = [e(0)].into();
        assert!(nc_sets(&g, &s, &s).is_err());
    }

    #[test]
    fn both_forms_equal_on_small_graphs() {
        for g in enumerate_small_graphs::<BigRational>(5, true).unwrap() {
            for beta in [rational(1, 10), rational(1, 1), rational(10, 1)] {
                let g = g.with_uniform_weight(&beta);
                for (_, _, m) in nc_all(&g, Mode::Weighted).unwrap() {
                    assert!(m.forms_agree());
                    assert_eq!(m.verdict, Verdict::Holds);
                }
            }
        }
    }
}
