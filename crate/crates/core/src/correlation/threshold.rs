//! β-threshold search, weight-monotonicity sweeps and the small-β probe.

use num_rational::BigRational;
use num_traits::Signed;

use super::{MeasureContext, Verdict};
use crate::algebra::{rational, RootBracket};
use crate::error::{Error, Result};
use crate::forest::{prob, EventSpec, Mode};
use crate::graph::{EdgeId, Multigraph};
use crate::BetaPolynomial;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    /// The margin is nonnegative beyond `beta_star`.
    LargeBeta,
    /// The margin is nonnegative for every β > 0.
    AllBeta,
    /// Neither: the margin is negative for arbitrarily large β.
    Unknown,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Threshold {
    pub margin: BetaPolynomial,
    /// Bracket around the largest positive root of the margin when the
    /// margin is negative somewhere but positive for large β.
    pub beta_star: Option<RootBracket>,
    pub side: Side,
    /// Every positive root, in increasing order.
    pub roots: Vec<RootBracket>,
}

/// Bracket width for reported roots.
fn root_width() -> BigRational {
    rational(1, 1 << 20)
}

/// Locates where the pair margin becomes nonnegative, by exact Sturm
/// root isolation on `(0, ∞)`. Requires uniform weights.
pub fn beta_threshold(g: &Multigraph<BigRational>, e1: EdgeId, e2: EdgeId) -> Result<Threshold> {
    let nc = MeasureContext::new(g, Mode::Symbolic)?.nc_pair(e1, e2)?;
    let margin = nc.margin.as_polynomial().expect("symbolic mode").clone();
    let roots = margin.positive_root_brackets(&root_width());
    let (beta_star, side) = if nc.verdict != Verdict::Violated {
        (None, Side::AllBeta)
    } else if margin.leading_coeff().is_some_and(|c| c.is_positive()) {
        (roots.last().cloned(), Side::LargeBeta)
    } else {
        (None, Side::Unknown)
    };
    Ok(Threshold {
        margin,
        beta_star,
        side,
        roots,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct MonotonicityReport {
    /// `(β_e, ℙ[e0])` along the grid.
    pub values: Vec<(BigRational, BigRational)>,
    pub non_increasing: bool,
    /// First grid index where `ℙ[e0]` strictly increases.
    pub violation_at: Option<usize>,
}

/// `ℙ[e0]` as `β_e` sweeps `grid`, other weights fixed. Negative
/// correlation is equivalent to this being non-increasing.
pub fn monotonicity_check(
    g: &Multigraph<BigRational>,
    e0: EdgeId,
    e: EdgeId,
    grid: &[BigRational],
) -> Result<MonotonicityReport> {
    if e0 == e {
        return Err(Error::InvalidArgument(format!("edges must differ, got {e0} twice")));
    }
    g.check_edges([&e0, &e])?;
    let mut values = Vec::with_capacity(grid.len());
    for beta in grid {
        let h = g.with_weight(e, beta.clone())?;
        values.push((beta.clone(), prob(&h, &EventSpec::requiring([e0]))?));
    }
    let violation_at = values.windows(2).position(|w| w[1].1 > w[0].1).map(|i| i + 1);
    Ok(MonotonicityReport {
        non_increasing: violation_at.is_none(),
        values,
        violation_at,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct SmallBetaProbe {
    /// `(β, margin)` at `β = 10^{-1}, …, 10^{-4}`.
    pub values: Vec<(BigRational, BigRational)>,
    pub all_nonnegative: bool,
}

/// Evaluates the pair margin at small uniform β. Empirical only: there is
/// no general small-β result this could confirm.
pub fn small_beta_probe(g: &Multigraph<BigRational>, e1: EdgeId, e2: EdgeId) -> Result<SmallBetaProbe> {
    let margin = MeasureContext::new(g, Mode::Symbolic)?.nc_pair(e1, e2)?.margin;
    let p = margin.as_polynomial().expect("symbolic mode");
    let values: Vec<(BigRational, BigRational)> = (1..=4)
        .map(|k| {
            let beta = rational(1, 10i64.pow(k));
            let v = p.eval(&beta);
            (beta, v)
        })
        .collect();
    Ok(SmallBetaProbe {
        all_nonnegative: values.iter().all(|(_, v)| !v.is_negative()),
        values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate, GraphKind};
    use crate::Graph;

    fn grid(xs: &[(i64, i64)]) -> Vec<BigRational> {
        xs.iter().map(|&(p, q)| rational(p, q)).collect()
    }

    #[test]
    fn thresholds() {
        let tri: Graph = generate(GraphKind::Cycle(3), rational(1, 1)).unwrap();
        let t = beta_threshold(&tri, EdgeId(0), EdgeId(1)).unwrap();
        assert_eq!((t.beta_star.clone(), t.side), (None, Side::AllBeta));
        assert!(t.roots.is_empty());
        let path: Graph = generate(GraphKind::Path(4), rational(1, 1)).unwrap();
        let t = beta_threshold(&path, EdgeId(0), EdgeId(2)).unwrap();
        assert_eq!((t.beta_star, t.side), (None, Side::AllBeta));
        assert!(t.margin.is_zero());
    }

    #[test]
    fn k4_pairs_have_no_threshold_or_a_verified_one() {
        let k4: Graph = generate(GraphKind::Complete(4), rational(1, 1)).unwrap();
        for (a, b) in [(0, 1), (0, 5)] {
            let t = beta_threshold(&k4, EdgeId(a), EdgeId(b)).unwrap();
            match &t.beta_star {
                None => assert_eq!(t.side, Side::AllBeta),
                Some(br) => {
                    let probe = br.hi.clone() * rational(2, 1);
                    assert!(t.margin.eval(&probe).is_positive());
                }
            }
        }
    }

    #[test]
    fn synthetic_threshold_found() {
        // A margin negative near zero: use the polynomial machinery directly.
        let p = BetaPolynomial::from_ints(&[-2, 0, 1]);
        let roots = p.positive_root_brackets(&root_width());
        assert_eq!(roots.len(), 1);
        let r = &roots[0];
        assert!(r.lo < rational(1415, 1000) && r.hi > rational(1414, 1000));
    }

    #[test]
    fn monotonicity_examples() {
        let tri: Graph = generate(GraphKind::Cycle(3), rational(1, 1)).unwrap();
        let r = monotonicity_check(&tri, EdgeId(0), EdgeId(1), &grid(&[(1, 2), (1, 1), (2, 1), (10, 1)])).unwrap();
        assert!(r.non_increasing);
        assert!(r.values.windows(2).all(|w| w[1].1 < w[0].1));
        let path: Graph = generate(GraphKind::Path(3), rational(1, 1)).unwrap();
        let r = monotonicity_check(&path, EdgeId(0), EdgeId(1), &grid(&[(1, 2), (1, 1), (2, 1)])).unwrap();
        assert!(r.values.windows(2).all(|w| w[1].1 == w[0].1));
        let k4: Graph = generate(GraphKind::Complete(4), rational(1, 1)).unwrap();
        let g8 = grid(&[(1, 10), (1, 4), (1, 2), (1, 1), (2, 1), (4, 1), (10, 1), (100, 1)]);
        assert!(monotonicity_check(&k4, EdgeId(0), EdgeId(5), &g8).unwrap().non_increasing);
    }

    #[test]
    fn small_beta_on_k4() {
        let k4: Graph = generate(GraphKind::Complete(4), rational(1, 1)).unwrap();
        let probe = small_beta_probe(&k4, EdgeId(0), EdgeId(5)).unwrap();
        assert_eq!(probe.values.len(), 4);
        assert!(probe.all_nonnegative);
    }
}
