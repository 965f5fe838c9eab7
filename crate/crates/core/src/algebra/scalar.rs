use std::fmt::{Debug, Display};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, One, Signed, ToPrimitive, Zero};

use super::matrix::{bareiss_determinant, lu_determinant, Matrix};

/// Field element usable as an edge weight, conductance or probability.
///
/// Exact types (`BigRational`) give exact answers everywhere; floating
/// types are supported for quick numeric passes and compare against zero
/// directly, so they inherit the usual rounding caveats.
pub trait Scalar:
    Clone + Debug + Display + PartialOrd + Num + Signed + Send + Sync + 'static
{
    /// Whether arithmetic is exact (zero tests are meaningful).
    const EXACT: bool;

    fn from_int(v: i64) -> Self;

    fn from_ratio(num: i64, den: i64) -> Self {
        Self::from_int(num) / Self::from_int(den)
    }

    fn to_f64(&self) -> f64;

    /// Determinant of a square matrix. The default is fraction-free
    /// elimination, which is exact for exact types.
    fn determinant(m: &Matrix<Self>) -> Self {
        bareiss_determinant(m)
    }
}

impl Scalar for BigRational {
    const EXACT: bool = true;

    fn from_int(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or_else(|| {
            // Ratio::to_f64 gives up on huge operands; fall back to a
            // digit-length estimate.
            let num = self.numer().to_string();
            let den = self.denom().to_string();
            let shift = num.trim_start_matches('-').len() as i32 - den.len() as i32;
            let head = |s: &str| -> f64 {
                let d: String = s.trim_start_matches('-').chars().take(17).collect();
                let mut v: f64 = d.parse().unwrap_or(0.0);
                v /= 10f64.powi(d.len() as i32 - 1);
                v
            };
            let sign = if self.is_negative() { -1.0 } else { 1.0 };
            sign * head(&num) / head(&den) * 10f64.powi(shift)
        })
    }

    /// Clears denominators row by row and runs Bareiss elimination over
    /// the integers, so no intermediate rational is ever formed.
    fn determinant(m: &Matrix<Self>) -> Self {
        let n = m.rows();
        let mut scale = BigInt::one();
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            let lcm = m
                .row(i)
                .iter()
                .fold(BigInt::one(), |acc, x| num_integer::Integer::lcm(&acc, x.denom()));
            for x in m.row(i) {
                data.push(x.numer() * (&lcm / x.denom()));
            }
            scale *= lcm;
        }
        let int_matrix = Matrix::from_vec(n, n, data).expect("square by construction");
        BigRational::new(bareiss_determinant(&int_matrix), scale)
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_int(v: i64) -> Self {
        v as f64
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn determinant(m: &Matrix<Self>) -> Self {
        lu_determinant(m)
    }
}

impl Scalar for f32 {
    const EXACT: bool = false;

    fn from_int(v: i64) -> Self {
        v as f32
    }

    fn to_f64(&self) -> f64 {
        *self as f64
    }

    fn determinant(m: &Matrix<Self>) -> Self {
        lu_determinant(m)
    }
}

/// Shorthand for the exact rational `num/den`.
pub fn rational(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Parses `p/q` or a bare integer `p` into an exact rational.
pub fn parse_rational(text: &str) -> Option<BigRational> {
    let text = text.trim();
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text, "1"),
    };
    let num = BigInt::from_str(num).ok()?;
    let den = BigInt::from_str(den).ok()?;
    if den.is_zero() {
        return None;
    }
    Some(BigRational::new(num, den))
}

/// Integer-ratio form used in reports (`16/1`, `-3/7`).
pub fn ratio_string(x: &BigRational) -> String {
    format!("{}/{}", x.numer(), x.denom())
}
