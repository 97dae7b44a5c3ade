//! Exact rational linear algebra and strict-inequality LP feasibility.
//!
//! Nothing in this crate touches floating point. Coefficients are
//! [`Rational`] (arbitrary precision, always reduced); matrices come in two
//! flavors sharing the [`ExactMatrix`] trait: [`QMatrix`] for general rational
//! data and [`ZMatrix`] for the small integer matrices the Čech engine builds.

mod complex;
mod lp;
mod matrix;
mod rank;

pub use complex::{cohomology_dims, ChainComplex};
pub use lp::{
    lp_feasible_strict, maximize, polyhedron_bounded, LpOutcome, StrictSystem,
};
pub use matrix::{ExactMatrix, QMatrix, ZMatrix};
pub use rank::{rank_integer_rows, rank_integer_rows_big};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Arbitrary-precision rational, kept in lowest terms with positive denominator.
pub type Rational = BigRational;

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `"p/q"`, `"p"`, or `"-p/q"`.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                return None;
            }
            Some(Rational::new(n, d))
        }
        None => s.parse::<BigInt>().ok().map(Rational::from_integer),
    }
}

/// `"p/q"`, or `"p"` when the denominator is one.
pub fn format_rational(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn floor_i64(q: &Rational) -> Option<i64> {
    i64::try_from(q.floor().to_integer()).ok()
}

pub fn ceil_i64(q: &Rational) -> Option<i64> {
    i64::try_from(q.ceil().to_integer()).ok()
}

pub fn to_i64(q: &Rational) -> Option<i64> {
    if q.is_integer() {
        i64::try_from(q.to_integer()).ok()
    } else {
        None
    }
}

/// Least common multiple of the denominators.
pub fn common_denominator<'a>(qs: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    qs.into_iter()
        .fold(BigInt::one(), |acc, q| acc.lcm(q.denom()))
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).fold(Rational::zero(), |acc, (x, y)| acc + x * y)
}

pub fn is_positive(q: &Rational) -> bool {
    q.is_positive()
}

/// Solves the square system `m * x = rhs` exactly; `None` when singular.
pub fn solve(m: &QMatrix, rhs: &[Rational]) -> Option<Vec<Rational>> {
    let n = m.rows();
    assert_eq!(n, m.cols(), "solve needs a square matrix");
    assert_eq!(n, rhs.len());
    let mut a: Vec<Vec<Rational>> = (0..n)
        .map(|i| {
            let mut row = m.row(i).to_vec();
            row.push(rhs[i].clone());
            row
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        let inv = a[col][col].recip();
        for v in a[col].iter_mut() {
            *v = &*v * &inv;
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for c in col..=n {
                    let delta = &f * &a[col][c];
                    a[r][c] -= delta;
                }
            }
        }
    }
    Some(a.into_iter().map(|mut row| row.pop().unwrap()).collect())
}

/// Inverse of a square rational matrix; `None` when singular.
pub fn inverse(m: &QMatrix) -> Option<QMatrix> {
    let n = m.rows();
    let mut cols = Vec::with_capacity(n);
    for j in 0..n {
        let mut e = vec![Rational::zero(); n];
        e[j] = Rational::one();
        cols.push(solve(m, &e)?);
    }
    let mut out = QMatrix::zeros(n, n);
    for (j, col) in cols.into_iter().enumerate() {
        for (i, v) in col.into_iter().enumerate() {
            out.set(i, j, v);
        }
    }
    Some(out)
}

/// Determinant of a small integer matrix by exact elimination.
pub fn det_i64(rows: &[Vec<i64>]) -> BigInt {
    let n = rows.len();
    if n == 0 {
        return BigInt::one();
    }
    let q = QMatrix::from_i64_rows(rows);
    let mut a: Vec<Vec<Rational>> = (0..n).map(|i| q.row(i).to_vec()).collect();
    let mut det = Rational::one();
    for col in 0..n {
        let Some(pivot) = (col..n).find(|&r| !a[r][col].is_zero()) else {
            return BigInt::zero();
        };
        if pivot != col {
            a.swap(col, pivot);
            det = -det;
        }
        det *= &a[col][col];
        for r in col + 1..n {
            if !a[r][col].is_zero() {
                let f = &a[r][col] / &a[col][col];
                for c in col..n {
                    let delta = &f * &a[col][c];
                    a[r][c] -= delta;
                }
            }
        }
    }
    det.to_integer()
}

/// Serde helpers for rationals encoded as `"p/q"` strings or plain integers.
pub mod serde_rational {
    use super::{format_rational, parse_rational, Rational};
    use serde::{Deserialize, Deserializer, Serializer};

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Int(i64),
        Text(String),
    }

    fn decode<E: serde::de::Error>(r: Repr) -> Result<Rational, E> {
        match r {
            Repr::Int(n) => Ok(super::rat(n)),
            Repr::Text(s) => {
                parse_rational(&s).ok_or_else(|| E::custom(format!("bad rational `{s}`")))
            }
        }
    }

    pub fn serialize<S: Serializer>(q: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(q))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        decode(Repr::deserialize(d)?)
    }

    pub mod vec {
        use super::*;
        use serde::ser::SerializeSeq;

        pub fn serialize<S: Serializer>(qs: &[Rational], s: S) -> Result<S::Ok, S::Error> {
            let mut seq = s.serialize_seq(Some(qs.len()))?;
            for q in qs {
                seq.serialize_element(&format_rational(q))?;
            }
            seq.end()
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
            let raw = Vec::<Repr>::deserialize(d)?;
            raw.into_iter().map(decode::<D::Error>).collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_rational("6/4"), Some(ratio(3, 2)));
        assert_eq!(parse_rational("-2"), Some(rat(-2)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(format_rational(&ratio(-3, 6)), "-1/2");
        assert_eq!(format_rational(&rat(7)), "7");
    }

    #[test]
    fn solve_and_inverse() {
        let m = QMatrix::from_i64_rows(&[vec![2, 1], vec![1, 1]]);
        let x = solve(&m, &[rat(3), rat(2)]).unwrap();
        assert_eq!(x, vec![rat(1), rat(1)]);
        let inv = inverse(&m).unwrap();
        assert_eq!(inv, QMatrix::from_i64_rows(&[vec![1, -1], vec![-1, 2]]));
        let singular = QMatrix::from_i64_rows(&[vec![1, 2], vec![2, 4]]);
        assert!(inverse(&singular).is_none());
    }

    #[test]
    fn determinants() {
        assert_eq!(det_i64(&[vec![1, 0], vec![1, 2]]), BigInt::from(2));
        assert_eq!(det_i64(&[vec![0, 1], vec![1, 0]]), BigInt::from(-1));
        assert_eq!(det_i64(&[]), BigInt::from(1));
    }
}
