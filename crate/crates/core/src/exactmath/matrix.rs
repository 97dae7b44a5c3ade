use std::fmt;

use num_bigint::BigInt;
use num_traits::Zero;

use super::rank::{rank_integer_rows, rank_integer_rows_big};
use super::{common_denominator, Rational};

/// Operations a chain complex needs from its differentials.
pub trait ExactMatrix {
    fn rows(&self) -> usize;
    fn cols(&self) -> usize;
    fn rank(&self) -> usize;
    /// `true` iff `self * rhs` is the zero matrix.
    fn product_is_zero(&self, rhs: &Self) -> bool;
    fn is_zero(&self) -> bool;
}

/// Dense row-major rational matrix.
#[derive(Clone, PartialEq, Eq)]
pub struct QMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Rational>,
}

impl QMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        QMatrix {
            rows,
            cols,
            entries: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, super::rat(1));
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == cols), "ragged matrix rows");
        QMatrix {
            rows: rows.len(),
            cols,
            entries: rows.into_iter().flatten().collect(),
        }
    }

    /// Builds a matrix with an explicit column count, so `0 x n` shapes survive.
    pub fn from_rows_with_cols(rows: Vec<Vec<Rational>>, cols: usize) -> Self {
        assert!(rows.iter().all(|r| r.len() == cols), "ragged matrix rows");
        QMatrix {
            rows: rows.len(),
            cols,
            entries: rows.into_iter().flatten().collect(),
        }
    }

    pub fn from_i64_rows(rows: &[Vec<i64>]) -> Self {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&v| super::rat(v)).collect())
                .collect(),
        )
    }

    pub fn get(&self, r: usize, c: usize) -> &Rational {
        &self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Rational) {
        self.entries[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[Rational] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c).clone());
            }
        }
        t
    }

    pub fn mul(&self, rhs: &QMatrix) -> QMatrix {
        assert_eq!(self.cols, rhs.rows, "dimension mismatch in product");
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = rhs.get(k, j);
                    if !b.is_zero() {
                        let cur = &out.entries[i * rhs.cols + j] + a * b;
                        out.entries[i * rhs.cols + j] = cur;
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Vec<Rational> {
        (0..self.rows).map(|r| super::dot(self.row(r), v)).collect()
    }

    /// Each row scaled by the lcm of its denominators.
    fn integer_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows)
            .map(|r| {
                let row = self.row(r);
                let den = common_denominator(row);
                row.iter()
                    .map(|q| (q * Rational::from_integer(den.clone())).to_integer())
                    .collect()
            })
            .collect()
    }
}

impl ExactMatrix for QMatrix {
    fn rows(&self) -> usize {
        self.rows
    }

    fn cols(&self) -> usize {
        self.cols
    }

    fn rank(&self) -> usize {
        rank_integer_rows_big(self.integer_rows(), self.cols)
    }

    fn product_is_zero(&self, rhs: &Self) -> bool {
        self.mul(rhs).is_zero()
    }

    fn is_zero(&self) -> bool {
        self.entries.iter().all(Zero::is_zero)
    }
}

impl fmt::Debug for QMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "QMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            let cells: Vec<String> = self.row(r).iter().map(super::format_rational).collect();
            writeln!(f, "  [{}]", cells.join(", "))?;
        }
        write!(f, "]")
    }
}

/// Dense row-major integer matrix with machine-word entries.
///
/// Rank and products go through `i128` and fall back to big integers on
/// overflow, so results are exact regardless of entry growth.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<i64>,
}

impl ZMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ZMatrix {
            rows,
            cols,
            entries: vec![0; rows * cols],
        }
    }

    pub fn get(&self, r: usize, c: usize) -> i64 {
        self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: i64) {
        self.entries[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[i64] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    pub fn to_qmatrix(&self) -> QMatrix {
        let rows = (0..self.rows)
            .map(|r| self.row(r).iter().map(|&v| super::rat(v)).collect())
            .collect();
        QMatrix::from_rows_with_cols(rows, self.cols)
    }
}

impl ExactMatrix for ZMatrix {
    fn rows(&self) -> usize {
        self.rows
    }

    fn cols(&self) -> usize {
        self.cols
    }

    fn rank(&self) -> usize {
        let rows: Vec<Vec<i128>> = (0..self.rows)
            .map(|r| self.row(r).iter().map(|&v| v as i128).collect())
            .collect();
        rank_integer_rows(rows, self.cols)
    }

    fn product_is_zero(&self, rhs: &Self) -> bool {
        assert_eq!(self.cols, rhs.rows, "dimension mismatch in product");
        for i in 0..self.rows {
            for j in 0..rhs.cols {
                let mut acc: i128 = 0;
                let mut overflow = false;
                for k in 0..self.cols {
                    let term = (self.get(i, k) as i128).checked_mul(rhs.get(k, j) as i128);
                    match term.and_then(|t| acc.checked_add(t)) {
                        Some(v) => acc = v,
                        None => {
                            overflow = true;
                            break;
                        }
                    }
                }
                if overflow {
                    let big: BigInt = (0..self.cols)
                        .map(|k| BigInt::from(self.get(i, k)) * BigInt::from(rhs.get(k, j)))
                        .sum();
                    if !big.is_zero() {
                        return false;
                    }
                } else if acc != 0 {
                    return false;
                }
            }
        }
        true
    }

    fn is_zero(&self) -> bool {
        self.entries.iter().all(|&v| v == 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmath::ratio;

    #[test]
    fn rank_examples() {
        assert_eq!(QMatrix::identity(3).rank(), 3);
        assert_eq!(QMatrix::zeros(2, 2).rank(), 0);
        assert_eq!(QMatrix::from_i64_rows(&[vec![1, 2], vec![2, 4]]).rank(), 1);
    }

    #[test]
    fn rank_with_fractions() {
        let m = QMatrix::from_rows(vec![
            vec![ratio(1, 2), ratio(1, 3)],
            vec![ratio(3, 2), rat1()],
        ]);
        assert_eq!(m.rank(), 1);
    }

    fn rat1() -> Rational {
        crate::exactmath::rat(1)
    }

    #[test]
    fn zmatrix_matches_qmatrix() {
        let mut z = ZMatrix::zeros(3, 3);
        for (i, v) in [2, 4, 6, 1, 1, 1, 3, 5, 7].into_iter().enumerate() {
            z.set(i / 3, i % 3, v);
        }
        assert_eq!(z.rank(), z.to_qmatrix().rank());
        assert_eq!(z.rank(), 2);
    }

    #[test]
    fn product_zero_detection() {
        let a = QMatrix::from_i64_rows(&[vec![1, -1]]);
        let b = QMatrix::from_i64_rows(&[vec![1], vec![1]]);
        assert!(a.product_is_zero(&b));
        assert!(!b.product_is_zero(&a));
    }
}
