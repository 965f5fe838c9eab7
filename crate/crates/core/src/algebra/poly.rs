//! Dense univariate polynomials in a formal variable `b` (the uniform edge
//! weight), with exact real-root isolation for rational coefficients.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::Scalar;

/// Polynomial with coefficients in ascending degree order.
///
/// The coefficient vector is empty for the zero polynomial and otherwise
/// ends in a nonzero entry.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Polynomial<T> {
    coeffs: Vec<T>,
}

impl<T: Scalar> Polynomial<T> {
    pub fn zero() -> Self {
        Polynomial { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(T::one())
    }

    pub fn constant(c: T) -> Self {
        Self::from_coeffs(vec![c])
    }

    /// The indeterminate itself.
    pub fn var() -> Self {
        Self::monomial(T::one(), 1)
    }

    pub fn monomial(c: T, degree: usize) -> Self {
        let mut coeffs = vec![T::zero(); degree + 1];
        coeffs[degree] = c;
        Self::from_coeffs(coeffs)
    }

    pub fn from_coeffs(coeffs: Vec<T>) -> Self {
        let mut p = Polynomial { coeffs };
        p.trim();
        p
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Self::from_coeffs(coeffs.iter().map(|&c| T::from_int(c)).collect())
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(Zero::is_zero) {
            self.coeffs.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    /// Coefficient of `b^i` (zero past the degree).
    pub fn coeff(&self, i: usize) -> T {
        self.coeffs.get(i).cloned().unwrap_or_else(T::zero)
    }

    pub fn leading_coeff(&self) -> Option<&T> {
        self.coeffs.last()
    }

    /// Horner evaluation.
    pub fn eval(&self, x: &T) -> T {
        self.coeffs
            .iter()
            .rev()
            .fold(T::zero(), |acc, c| acc * x.clone() + c.clone())
    }

    pub fn scale(&self, k: &T) -> Self {
        Self::from_coeffs(self.coeffs.iter().map(|c| c.clone() * k.clone()).collect())
    }

    pub fn derivative(&self) -> Self {
        Self::from_coeffs(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c.clone() * T::from_int(i as i64))
                .collect(),
        )
    }

    /// Multiplicity of the root at zero.
    pub fn zero_order(&self) -> usize {
        self.coeffs.iter().take_while(|c| c.is_zero()).count()
    }

    /// Divides out `b^k`; the low coefficients must be zero.
    pub fn shift_down(&self, k: usize) -> Self {
        debug_assert!(self.coeffs.iter().take(k).all(Zero::is_zero));
        Self::from_coeffs(self.coeffs.iter().skip(k).cloned().collect())
    }

    /// Euclidean division over a field.
    pub fn div_rem(&self, divisor: &Self) -> (Self, Self) {
        assert!(!divisor.is_zero(), "polynomial division by zero");
        let dd = divisor.coeffs.len() - 1;
        let lead = divisor.coeffs[dd].clone();
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (Self::zero(), self.clone());
        }
        let mut quot = vec![T::zero(); rem.len() - dd];
        for i in (dd..rem.len()).rev() {
            let c = rem[i].clone() / lead.clone();
            if c.is_zero() {
                continue;
            }
            for (j, d) in divisor.coeffs.iter().enumerate() {
                let v = c.clone() * d.clone();
                rem[i - dd + j] = rem[i - dd + j].clone() - v;
            }
            quot[i - dd] = c;
        }
        (Self::from_coeffs(quot), Self::from_coeffs(rem))
    }

    fn terms(&self) -> impl Iterator<Item = (usize, &T)> {
        self.coeffs.iter().enumerate().filter(|(_, c)| !c.is_zero())
    }
}

impl<T: Scalar> Default for Polynomial<T> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<T: Scalar> Add for &Polynomial<T> {
    type Output = Polynomial<T>;
    fn add(self, rhs: &Polynomial<T>) -> Polynomial<T> {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Polynomial::from_coeffs((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl<T: Scalar> Sub for &Polynomial<T> {
    type Output = Polynomial<T>;
    fn sub(self, rhs: &Polynomial<T>) -> Polynomial<T> {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Polynomial::from_coeffs((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl<T: Scalar> Mul for &Polynomial<T> {
    type Output = Polynomial<T>;
    fn mul(self, rhs: &Polynomial<T>) -> Polynomial<T> {
        if self.is_zero() || rhs.is_zero() {
            return Polynomial::zero();
        }
        let mut out = vec![T::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.terms() {
            for (j, b) in rhs.terms() {
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        Polynomial::from_coeffs(out)
    }
}

impl<T: Scalar> Neg for &Polynomial<T> {
    type Output = Polynomial<T>;
    fn neg(self) -> Polynomial<T> {
        Polynomial::from_coeffs(self.coeffs.iter().map(|c| -c.clone()).collect())
    }
}

macro_rules! owned_ops {
    ($($tr:ident $m:ident),*) => {$(
        impl<T: Scalar> $tr for Polynomial<T> {
            type Output = Polynomial<T>;
            fn $m(self, rhs: Polynomial<T>) -> Polynomial<T> {
                (&self).$m(&rhs)
            }
        }
        impl<T: Scalar> $tr<&Polynomial<T>> for Polynomial<T> {
            type Output = Polynomial<T>;
            fn $m(self, rhs: &Polynomial<T>) -> Polynomial<T> {
                (&self).$m(rhs)
            }
        }
    )*};
}
owned_ops!(Add add, Sub sub, Mul mul);

impl<T: Scalar> Neg for Polynomial<T> {
    type Output = Polynomial<T>;
    fn neg(self) -> Polynomial<T> {
        -&self
    }
}

impl<T: Scalar> Zero for Polynomial<T> {
    fn zero() -> Self {
        Polynomial::zero()
    }
    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
}

impl<T: Scalar> One for Polynomial<T> {
    fn one() -> Self {
        Polynomial::one()
    }
}

impl<T: Scalar> fmt::Display for Polynomial<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.terms() {
            let (sign, mag) = if c.is_negative() { ("-", c.abs()) } else { ("+", c.clone()) };
            if first {
                if sign == "-" {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            match (i, mag.is_one()) {
                (0, _) => write!(f, "{mag}")?,
                (1, true) => write!(f, "b")?,
                (1, false) => write!(f, "{mag}*b")?,
                (_, true) => write!(f, "b^{i}")?,
                (_, false) => write!(f, "{mag}*b^{i}")?,
            }
        }
        Ok(())
    }
}

impl<T: Scalar> fmt::Debug for Polynomial<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Polynomial({self})")
    }
}

/// Half-open interval `(lo, hi]` containing exactly one real root.
/// Neither endpoint is a root.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootBracket {
    pub lo: BigRational,
    pub hi: BigRational,
}

impl Polynomial<BigRational> {
    /// Sign of the polynomial at `x` (-1, 0 or 1).
    pub fn sign_at(&self, x: &BigRational) -> i32 {
        let v = self.eval(x);
        if v.is_zero() {
            0
        } else if v.is_positive() {
            1
        } else {
            -1
        }
    }

    /// Sturm sequence `p, p', -rem(p, p'), ...`.
    pub fn sturm_sequence(&self) -> Vec<Self> {
        let mut seq = vec![self.clone()];
        if self.is_zero() {
            return seq;
        }
        let mut next = self.derivative();
        while !next.is_zero() {
            let prev = seq.last().expect("nonempty");
            let (_, r) = prev.div_rem(&next);
            seq.push(next);
            next = -r;
        }
        seq
    }

    fn sign_changes(seq: &[Self], x: &BigRational) -> usize {
        let signs: Vec<i32> = seq.iter().map(|p| p.sign_at(x)).filter(|&s| s != 0).collect();
        signs.windows(2).filter(|w| w[0] != w[1]).count()
    }

    /// Cauchy bound: every real root has absolute value below it.
    pub fn root_bound(&self) -> BigRational {
        let lead = self.leading_coeff().expect("nonzero polynomial").abs();
        let max = self.coeffs[..self.coeffs.len() - 1]
            .iter()
            .map(|c| c.abs() / lead.clone())
            .fold(BigRational::zero(), |a, b| if b > a { b } else { a });
        max + BigRational::one()
    }

    /// Isolates the distinct roots in `(0, inf)`, each bracket narrowed to
    /// width at most `width`. Brackets come back in increasing order.
    pub fn positive_root_brackets(&self, width: &BigRational) -> Vec<RootBracket> {
        if self.is_zero() || self.degree() == Some(0) {
            return Vec::new();
        }
        let p = self.shift_down(self.zero_order());
        if p.degree() == Some(0) {
            return Vec::new();
        }
        let seq = p.sturm_sequence();
        let mut out = Vec::new();
        let lo = BigRational::zero();
        let hi = p.root_bound();
        let count = Self::sign_changes(&seq, &lo) - Self::sign_changes(&seq, &hi);
        Self::bisect(&p, &seq, lo, hi, count, width, &mut out);
        out
    }

    fn bisect(
        p: &Self,
        seq: &[Self],
        lo: BigRational,
        hi: BigRational,
        count: usize,
        width: &BigRational,
        out: &mut Vec<RootBracket>,
    ) {
        if count == 0 {
            return;
        }
        if count == 1 && &(&hi - &lo) <= width {
            out.push(RootBracket { lo, hi });
            return;
        }
        let mid = Self::split_point(p, &lo, &hi);
        let left = Self::sign_changes(seq, &lo) - Self::sign_changes(seq, &mid);
        Self::bisect(p, seq, lo, mid.clone(), left, width, out);
        Self::bisect(p, seq, mid, hi, count - left, width, out);
    }

    /// A point strictly inside `(lo, hi)` that is not a root.
    fn split_point(p: &Self, lo: &BigRational, hi: &BigRational) -> BigRational {
        let span = hi - lo;
        let mut den = 2i64;
        loop {
            for num in 1..den {
                let t = lo + &span * BigRational::new(BigInt::from(num), BigInt::from(den));
                if p.sign_at(&t) != 0 {
                    return t;
                }
            }
            den += 1;
        }
    }

    /// Minimum sign attained on `(0, inf)`: 1 if strictly positive there,
    /// 0 if nonnegative with zeros, -1 if negative somewhere. The zero
    /// polynomial reports 0.
    pub fn min_sign_on_positive_axis(&self) -> i32 {
        if self.is_zero() {
            return 0;
        }
        let p = self.shift_down(self.zero_order());
        let brackets = p.positive_root_brackets(&BigRational::one());
        // One probe per gap between consecutive roots.
        let mut probes = Vec::with_capacity(brackets.len() + 1);
        match brackets.first() {
            Some(b) if b.lo.is_positive() => probes.push(b.lo.clone()),
            Some(_) => probes.push(BigRational::zero()),
            None => probes.push(BigRational::one()),
        }
        probes.extend(brackets.iter().map(|b| b.hi.clone()));
        let gap_min = probes.iter().map(|x| p.sign_at(x)).min().unwrap_or(1);
        if gap_min < 0 {
            -1
        } else if brackets.is_empty() {
            1
        } else {
            0
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational;
    use proptest::prelude::*;

    type P = Polynomial<BigRational>;

    #[test]
    fn arithmetic_examples() {
        let one_plus = P::from_ints(&[1, 1]);
        assert_eq!(&one_plus * &one_plus, P::from_ints(&[1, 2, 1]));
        let sq = P::from_ints(&[1, 2]);
        let triangle = &(&sq * &sq) - &P::from_ints(&[1, 3, 3]);
        assert_eq!(triangle, P::from_ints(&[0, 1, 1]));
        assert!((&one_plus * &P::zero()).is_zero());
        assert_eq!(P::zero().degree(), None);
        assert_eq!((&one_plus - &one_plus).degree(), None);
    }

    #[test]
    fn display_is_readable() {
        assert_eq!(P::from_ints(&[1, 3, 3]).to_string(), "1 + 3*b + 3*b^2");
        assert_eq!(P::from_ints(&[0, -1, 0, 2]).to_string(), "-b + 2*b^3");
        assert_eq!(P::zero().to_string(), "0");
    }

    #[test]
    fn division_reconstructs() {
        let a = P::from_ints(&[3, 0, -2, 5, 1]);
        let b = P::from_ints(&[1, 2]);
        let (q, r) = a.div_rem(&b);
        assert_eq!(&(&q * &b) + &r, a);
        assert!(r.degree().unwrap_or(0) < 1);
    }

    #[test]
    fn isolates_known_roots() {
        // (b - 1/2)(b - 3)(b + 2)
        let p = &(&P::from_coeffs(vec![rational(-1, 2), rational(1, 1)]) * &P::from_ints(&[-3, 1]))
            * &P::from_ints(&[2, 1]);
        let br = p.positive_root_brackets(&rational(1, 1000));
        assert_eq!(br.len(), 2);
        assert!(br[0].lo < rational(1, 2) && rational(1, 2) <= br[0].hi);
        assert!(br[1].lo < rational(3, 1) && rational(3, 1) <= br[1].hi);
        assert!(br.iter().all(|b| &b.hi - &b.lo <= rational(1, 1000)));
        assert_eq!(p.min_sign_on_positive_axis(), -1);
    }

    #[test]
    fn sign_classification() {
        assert_eq!(P::from_ints(&[0, 1, 1]).min_sign_on_positive_axis(), 1);
        // (b - 1)^2 touches zero without changing sign.
        assert_eq!(P::from_ints(&[1, -2, 1]).min_sign_on_positive_axis(), 0);
        assert_eq!(P::from_ints(&[-1, 0, 1]).min_sign_on_positive_axis(), -1);
        assert_eq!(P::zero().min_sign_on_positive_axis(), 0);
        assert!(P::from_ints(&[0, 0, 5]).positive_root_brackets(&rational(1, 10)).is_empty());
    }

    fn poly() -> impl Strategy<Value = P> {
        proptest::collection::vec(-5i64..=5, 0..6).prop_map(|v| P::from_ints(&v))
    }

    proptest! {
        #[test]
        fn multiplication_commutes_and_distributes(a in poly(), b in poly(), c in poly()) {
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            if let (Some(da), Some(db)) = (a.degree(), b.degree()) {
                prop_assert_eq!((&a * &b).degree(), Some(da + db));
            }
        }

        #[test]
        fn evaluation_is_a_ring_map(a in poly(), b in poly(), x in -4i64..=4) {
            let x = rational(x, 3);
            prop_assert_eq!((&a * &b).eval(&x), a.eval(&x) * b.eval(&x));
            prop_assert_eq!((&a - &b).eval(&x), a.eval(&x) - b.eval(&x));
        }

        #[test]
        fn brackets_contain_sign_changes_or_roots(roots in proptest::collection::vec(1i64..=12, 1..4)) {
            let p = roots.iter().fold(P::one(), |acc, &r| &acc * &P::from_coeffs(vec![rational(-r, 4), rational(1, 1)]));
            let mut distinct = roots.clone();
            distinct.sort();
            distinct.dedup();
            let br = p.positive_root_brackets(&rational(1, 64));
            prop_assert_eq!(br.len(), distinct.len());
            for (b, r) in br.iter().zip(&distinct) {
                let r = rational(*r, 4);
                prop_assert!(b.lo < r && r <= b.hi);
            }
        }
    }
}
