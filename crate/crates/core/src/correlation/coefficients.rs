//! Large-β coefficients of the pair margin, and the complete-graph
//! closed forms for the second coefficient.
//!
//! With `n = |V|`, `μ[S]` has degree `n − 1 − |S|` in β, with top
//! coefficient `T[S]` (spanning trees containing `S`) and next coefficient
//! `F[S]` (two-tree spanning forests containing `S`). The pair margin thus
//! has degree at most `2n − 4`; its coefficients there and at `2n − 5` are
//! the "leading" and "second" coefficients below.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, Zero};

use super::MeasureContext;
use crate::electrical::{tree_count, Conductances};
use crate::error::{Error, Result};
use crate::forest::Mode;
use crate::graph::{EdgeId, Multigraph, VertexId};

/// Largest vertex count for the bipartition sum in [`two_tree_forest_count`].
const MAX_BIPARTITION_VERTICES: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Interpretation {
    /// Positive: the pair is negatively correlated for all large β.
    NcForLargeBeta,
    /// Zero: the sign for large β is decided by lower coefficients.
    InspectNextCoefficient,
    /// Negative: the pair is positively correlated for all large β.
    ViolatedForLargeBeta,
}

impl Interpretation {
    fn of(x: &BigRational) -> Self {
        if x.is_positive() {
            Interpretation::NcForLargeBeta
        } else if x.is_zero() {
            Interpretation::InspectNextCoefficient
        } else {
            Interpretation::ViolatedForLargeBeta
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LeadingCoefficient {
    /// Exponent of β the coefficient belongs to (`2|V| − 4`).
    pub degree: usize,
    /// `T[e1]T[e2] − T[e1e2]T[1]` from spanning-tree counts.
    pub lead: BigRational,
    /// The same coefficient read off the margin polynomial.
    pub from_polynomial: BigRational,
    pub interpretation: Interpretation,
}

impl LeadingCoefficient {
    pub fn agrees(&self) -> bool {
        self.lead == self.from_polynomial
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SecondCoefficient {
    /// Exponent of β (`2|V| − 5`), `None` when the graph has fewer than 3 vertices.
    pub degree: Option<usize>,
    pub from_polynomial: BigRational,
    /// `T(e1)F(e2) + T(e2)F(e1) − T(e1e2)F(1) − T(1)F(e1e2)`.
    pub from_two_tree_forests: BigRational,
}

impl SecondCoefficient {
    pub fn agrees(&self) -> bool {
        self.from_polynomial == self.from_two_tree_forests
    }
}

fn set(edges: &[EdgeId]) -> BTreeSet<EdgeId> {
    edges.iter().copied().collect()
}

/// Unweighted spanning trees containing `s`; zero when `s` has a cycle.
fn trees_containing(g: &Multigraph<BigRational>, s: &BTreeSet<EdgeId>) -> Result<BigRational> {
    if g.has_cycle_in(s) {
        return Ok(BigRational::zero());
    }
    tree_count(g, &Conductances::unit(g), s, &BTreeSet::new())
}

fn check_pair(g: &Multigraph<BigRational>, e1: EdgeId, e2: EdgeId) -> Result<()> {
    if e1 == e2 {
        return Err(Error::InvalidArgument(format!("edge pair must be distinct, got {e1} twice")));
    }
    g.check_edges([&e1, &e2])?;
    if !g.is_connected() {
        return Err(Error::NotConnected);
    }
    Ok(())
}

fn margin_polynomial(g: &Multigraph<BigRational>, e1: EdgeId, e2: EdgeId) -> Result<crate::BetaPolynomial> {
    let m = MeasureContext::new(g, Mode::Symbolic)?.nc_pair(e1, e2)?;
    Ok(m.margin.as_polynomial().expect("symbolic mode").clone())
}

/// The coefficient of `β^{2|V|−4}` in the pair margin, from tree counts,
/// cross-checked against the margin polynomial. Uses a uniform β.
pub fn leading_coeff_analysis(g: &Multigraph<BigRational>, e1: EdgeId, e2: EdgeId) -> Result<LeadingCoefficient> {
    check_pair(g, e1, e2)?;
    let lead = trees_containing(g, &set(&[e1]))? * trees_containing(g, &set(&[e2]))?
        - trees_containing(g, &set(&[e1, e2]))? * trees_containing(g, &set(&[]))?;
    let degree = (2 * g.num_vertices()).saturating_sub(4);
    let from_polynomial = margin_polynomial(g, e1, e2)?.coeff(degree);
    Ok(LeadingCoefficient {
        degree,
        interpretation: Interpretation::of(&lead),
        lead,
        from_polynomial,
    })
}

/// Two-tree spanning forests containing `s`, summed over unordered vertex
/// bipartitions `{V', V ∖ V'}` as `τ(G[V'] ⊇ s) · τ(G[V∖V'] ⊇ s)`.
pub fn two_tree_forest_count(g: &Multigraph<BigRational>, s: &BTreeSet<EdgeId>) -> Result<BigRational> {
    g.check_edges(s)?;
    let n = g.num_vertices();
    if n > MAX_BIPARTITION_VERTICES {
        return Err(Error::SizeLimit {
            what: "vertex count for bipartition sums",
            limit: MAX_BIPARTITION_VERTICES,
            actual: n,
        });
    }
    if n < 2 || g.has_cycle_in(s) {
        return Ok(BigRational::zero());
    }
    let verts = g.vertices();
    let mut total = BigRational::zero();
    // Vertex 0 always sits in V', so each bipartition is visited once.
    for mask in 0u32..(1u32 << (n - 1)) {
        let side = |i: usize| i == 0 || mask >> (i - 1) & 1 == 1;
        if (0..n).all(side) {
            continue;
        }
        let crosses = s.iter().any(|e| {
            let edge = g.edge(*e).expect("checked");
            side(g.idx(edge.u)) != side(g.idx(edge.v))
        });
        if crosses {
            continue;
        }
        let a: Vec<VertexId> = (0..n).filter(|&i| side(i)).map(|i| verts[i]).collect();
        let b: Vec<VertexId> = (0..n).filter(|&i| !side(i)).map(|i| verts[i]).collect();
        let (ga, gb) = (g.induced(&a), g.induced(&b));
        let sa: BTreeSet<EdgeId> = s.iter().copied().filter(|e| ga.contains_edge(*e)).collect();
        let sb: BTreeSet<EdgeId> = s.iter().copied().filter(|e| gb.contains_edge(*e)).collect();
        let ta = trees_containing(&ga, &sa)?;
        if ta.is_zero() {
            continue;
        }
        total += ta * trees_containing(&gb, &sb)?;
    }
    Ok(total)
}

/// The coefficient of `β^{2|V|−5}` in the pair margin, by two routes.
pub fn second_coeff(g: &Multigraph<BigRational>, e1: EdgeId, e2: EdgeId) -> Result<SecondCoefficient> {
    check_pair(g, e1, e2)?;
    let n = g.num_vertices();
    if n < 3 {
        return Ok(SecondCoefficient {
            degree: None,
            from_polynomial: BigRational::zero(),
            from_two_tree_forests: BigRational::zero(),
        });
    }
    let degree = 2 * n - 5;
    let from_polynomial = margin_polynomial(g, e1, e2)?.coeff(degree);
    let (s1, s2, s12, s0) = (set(&[e1]), set(&[e2]), set(&[e1, e2]), set(&[]));
    let t = |s: &BTreeSet<EdgeId>| trees_containing(g, s);
    let f = |s: &BTreeSet<EdgeId>| two_tree_forest_count(g, s);
    let from_two_tree_forests =
        t(&s1)? * f(&s2)? + t(&s2)? * f(&s1)? - t(&s12)? * f(&s0)? - t(&s0)? * f(&s12)?;
    Ok(SecondCoefficient {
        degree: Some(degree),
        from_polynomial,
        from_two_tree_forests,
    })
}

fn int(x: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

/// `base^exp` for possibly negative `exp`.
fn power(base: i64, exp: i64) -> BigRational {
    let b = int(base);
    if exp >= 0 {
        Pow::pow(b, exp as u64)
    } else {
        BigRational::one() / Pow::pow(b, (-exp) as u64)
    }
}

fn binomial(n: i64, k: i64) -> BigRational {
    if k < 0 || k > n {
        return BigRational::zero();
    }
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    BigRational::from_integer(acc)
}

fn factorial(n: i64) -> BigInt {
    (2..=n).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

/// Per-`k` contributions of the nine endpoint placements of a disjoint
/// pair `e1, e2` relative to `V'` (`|V'| = k`) on `K_n`, in the order:
/// all four endpoints inside; none inside; `e1` and one end of `e2`;
/// `e2` and one end of `e1`; one end of `e1` only; one end of `e2` only;
/// `e1` only; `e2` only; one end of each.
#[derive(Clone, Debug, PartialEq)]
pub struct NineCases {
    pub k: usize,
    pub values: [BigRational; 9],
}

impl NineCases {
    pub fn total(&self) -> BigRational {
        self.values.iter().fold(BigRational::zero(), |a, b| a + b)
    }

    fn of(n: i64, k: i64) -> Self {
        let m = power(n, n - 4);
        let term = |coef: i64, bk: i64, ek: i64, ec: i64| -> BigRational {
            let b = binomial(n - 4, bk);
            if b.is_zero() {
                return b;
            }
            int(coef) * b * &m * power(k, ek) * power(n - k, ec)
        };
        let values = [
            term(-4, k - 4, k - 4, n - k),
            term(-4, k, k, n - k - 4),
            term(8, k - 3, k - 3, n - k - 1),
            term(8, k - 3, k - 3, n - k - 1),
            term(8, k - 1, k - 1, n - k - 3),
            term(8, k - 1, k - 1, n - k - 3),
            term(-4, k - 2, k - 2, n - k - 2),
            term(-4, k - 2, k - 2, n - k - 2),
            term(-16, k - 2, k - 2, n - k - 2),
        ];
        NineCases { k: k as usize, values }
    }
}

/// Closed forms for the disjoint-pair second coefficient on `K_n`.
#[derive(Clone, Debug, PartialEq)]
pub struct KnAnalysis {
    pub n: usize,
    /// `n^{n−2}`, `2n^{n−3}`, `4n^{n−4}`.
    pub t1: BigRational,
    pub te: BigRational,
    pub tee: BigRational,
    /// `a_k` for `k = 1..=⌊n/2⌋` (index `k − 1`).
    pub a_k: Vec<BigRational>,
    /// The nine per-placement sums for each `k`.
    pub cases: Vec<NineCases>,
    /// `I_k` for `k = 2..=⌊n/2⌋` (index `k − 2`).
    pub i_k: Vec<BigRational>,
    pub sum_i: BigRational,
    pub sum_i_below_one: bool,
    /// `Σ_{k=1}^{⌊n/2⌋} a_k`, summed as written.
    pub second_coeff_from_cases: BigRational,
    /// The bipartition sum with `|V'| = n/2` weighted by one half, since
    /// for even `n` each such unordered split appears twice in `a_{n/2}`.
    pub second_coeff_half_weighted: BigRational,
}

impl KnAnalysis {
    /// Whether every `a_k` equals the sum of its nine case values.
    pub fn cases_match_closed_form(&self) -> bool {
        self.cases.iter().zip(&self.a_k).all(|(c, a)| c.total() == *a)
    }

    /// `a_1 · (1 − Σ I_k)`, the factored form of the plain sum.
    pub fn factored_second_coeff(&self) -> BigRational {
        &self.a_k[0] * (BigRational::one() - &self.sum_i)
    }
}

fn a_k(n: i64, k: i64) -> BigRational {
    if k == 1 {
        return int(12) * power(n, n - 3) * power(n - 1, n - 5);
    }
    int(12)
        * power(n, n - 3)
        * binomial(n - 4, k - 1)
        * power(k, k - 4)
        * power(n - k, n - k - 4)
        * int(-k * (n + 6) * (n - k) + 2 * n * n)
        / int((n - k - 1) * (n - k - 2))
}

/// `I_k` for `k = 2..=⌊n/2⌋`.
pub fn i_k_values(n: usize) -> Result<Vec<BigRational>> {
    if n < 5 {
        return Err(Error::InvalidArgument(format!("closed forms need n >= 5, got {n}")));
    }
    let n = n as i64;
    let scale = power(n - 1, n - 5);
    Ok((2..=n / 2)
        .map(|k| {
            BigRational::new(factorial(n - 4), factorial(k - 1) * factorial(n - k - 1))
                * power(k, k - 4)
                * power(n - k, n - k - 4)
                * int(k * (n + 6) * (n - k) - 2 * n * n)
                / &scale
        })
        .collect())
}

/// `Σ_{k=2}^{⌊n/2⌋} I_k` over one integer denominator. Equal to summing
/// [`i_k_values`], but avoids normalising every term for large `n`.
pub fn i_k_sum(n: usize) -> Result<BigRational> {
    if n < 8 {
        return Ok(i_k_values(n)?.into_iter().fold(BigRational::zero(), |s, x| s + x));
    }
    let n = n as i64;
    // (n−4)!/((k−1)!(n−k−1)!) = C(n−2, k−1)/((n−2)(n−3)); 12·k^{k−4} is an
    // integer for k ≥ 2; n − k − 4 ≥ 0 once n ≥ 8.
    let mut numerator = BigInt::zero();
    let mut choose = BigInt::from(n - 2); // C(n−2, 1)
    for k in 2..=n / 2 {
        let twelve_k = match k {
            2 => BigInt::from(3),
            3 => BigInt::from(4),
            _ => BigInt::from(12) * Pow::pow(BigInt::from(k), (k - 4) as u64),
        };
        let tail = Pow::pow(BigInt::from(n - k), (n - k - 4) as u64);
        numerator += &choose * twelve_k * tail * BigInt::from(k * (n + 6) * (n - k) - 2 * n * n);
        choose = choose * BigInt::from(n - 1 - k) / BigInt::from(k);
    }
    let denominator = BigInt::from(12 * (n - 2) * (n - 3)) * Pow::pow(BigInt::from(n - 1), (n - 5) as u64);
    Ok(BigRational::new(numerator, denominator))
}

pub fn kn_closed_forms(n: usize) -> Result<KnAnalysis> {
    let i_k = i_k_values(n)?;
    let ni = n as i64;
    let half = ni / 2;
    let a: Vec<BigRational> = (1..=half).map(|k| a_k(ni, k)).collect();
    let cases: Vec<NineCases> = (1..=half).map(|k| NineCases::of(ni, k)).collect();
    let sum_i = i_k.iter().fold(BigRational::zero(), |s, x| s + x);
    let plain = a.iter().fold(BigRational::zero(), |s, x| s + x);
    let half_weighted = if ni % 2 == 0 {
        &plain - a.last().expect("n >= 5") / int(2)
    } else {
        plain.clone()
    };
    Ok(KnAnalysis {
        n,
        t1: power(ni, ni - 2),
        te: int(2) * power(ni, ni - 3),
        tee: int(4) * power(ni, ni - 4),
        a_k: a,
        cases,
        sum_i_below_one: sum_i < BigRational::one(),
        sum_i,
        i_k,
        second_coeff_from_cases: plain,
        second_coeff_half_weighted: half_weighted,
    })
}
