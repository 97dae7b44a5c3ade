//! Dense two-phase simplex over exact rationals.
//!
//! Bland's rule picks both the entering column and the leaving row, so the
//! method terminates without any perturbation.

use num_traits::{One, Signed, Zero};

use super::matrix::{ExactMatrix, QMatrix};
use super::Rational;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LpOutcome {
    Optimal { x: Vec<Rational>, value: Rational },
    Infeasible,
    Unbounded,
}

struct Tableau {
    // m rows of (ncols coefficients, rhs)
    rows: Vec<Vec<Rational>>,
    basis: Vec<usize>,
    ncols: usize,
}

enum Phase {
    Optimal,
    Unbounded,
}

impl Tableau {
    fn rhs(&self, i: usize) -> &Rational {
        &self.rows[i][self.ncols]
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let inv = self.rows[row][col].recip();
        for v in self.rows[row].iter_mut() {
            *v = &*v * &inv;
        }
        let pivot_row = self.rows[row].clone();
        for (i, r) in self.rows.iter_mut().enumerate() {
            if i == row || r[col].is_zero() {
                continue;
            }
            let f = r[col].clone();
            for (v, p) in r.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *v -= &f * p;
                }
            }
        }
        self.basis[row] = col;
    }

    fn objective_value(&self, obj: &[Rational]) -> Rational {
        self.basis
            .iter()
            .enumerate()
            .fold(Rational::zero(), |acc, (i, &b)| acc + &obj[b] * self.rhs(i))
    }

    fn run(&mut self, obj: &[Rational], allowed: &[bool]) -> Phase {
        loop {
            let mut entering = None;
            for j in 0..self.ncols {
                if !allowed[j] || self.basis.contains(&j) {
                    continue;
                }
                let mut reduced = obj[j].clone();
                for (i, &b) in self.basis.iter().enumerate() {
                    if !obj[b].is_zero() && !self.rows[i][j].is_zero() {
                        reduced -= &obj[b] * &self.rows[i][j];
                    }
                }
                if reduced.is_positive() {
                    entering = Some(j);
                    break;
                }
            }
            let Some(col) = entering else {
                return Phase::Optimal;
            };
            let mut leave: Option<(usize, Rational)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][col];
                if !a.is_positive() {
                    continue;
                }
                let ratio = self.rhs(i) / a;
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => {
                        ratio < *lr || (ratio == *lr && self.basis[i] < self.basis[*li])
                    }
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            match leave {
                Some((row, _)) => self.pivot(row, col),
                None => return Phase::Unbounded,
            }
        }
    }

    fn solution(&self, n: usize) -> Vec<Rational> {
        let mut x = vec![Rational::zero(); n];
        for (i, &b) in self.basis.iter().enumerate() {
            if b < n {
                x[b] = self.rhs(i).clone();
            }
        }
        x
    }
}

/// Maximizes `c . y` over `{a y <= b, y >= 0}`.
fn maximize_nonneg(c: &[Rational], a: &QMatrix, b: &[Rational]) -> LpOutcome {
    let m = a.rows();
    let n = a.cols();
    assert_eq!(c.len(), n);
    assert_eq!(b.len(), m);
    let negated: Vec<bool> = b.iter().map(Signed::is_negative).collect();
    let n_art = negated.iter().filter(|&&x| x).count();
    let ncols = n + m + n_art;
    let mut rows = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    let mut art = 0;
    for i in 0..m {
        let sign = if negated[i] { -Rational::one() } else { Rational::one() };
        let mut row = vec![Rational::zero(); ncols + 1];
        for j in 0..n {
            row[j] = &sign * a.get(i, j);
        }
        row[n + i] = sign.clone();
        row[ncols] = &sign * &b[i];
        if negated[i] {
            row[n + m + art] = Rational::one();
            basis.push(n + m + art);
            art += 1;
        } else {
            basis.push(n + i);
        }
        rows.push(row);
    }
    let mut t = Tableau { rows, basis, ncols };

    if n_art > 0 {
        let mut phase1 = vec![Rational::zero(); ncols];
        for v in phase1.iter_mut().skip(n + m) {
            *v = -Rational::one();
        }
        let all = vec![true; ncols];
        if let Phase::Unbounded = t.run(&phase1, &all) {
            unreachable!("phase one objective is bounded by zero");
        }
        if t.objective_value(&phase1).is_negative() {
            return LpOutcome::Infeasible;
        }
        // Drive zero-level artificials out of the basis; drop redundant rows.
        let mut i = 0;
        while i < t.rows.len() {
            if t.basis[i] >= n + m {
                match (0..n + m).find(|&j| !t.rows[i][j].is_zero()) {
                    Some(j) => {
                        t.pivot(i, j);
                        i += 1;
                    }
                    None => {
                        t.rows.remove(i);
                        t.basis.remove(i);
                    }
                }
            } else {
                i += 1;
            }
        }
    }

    let mut obj = vec![Rational::zero(); ncols];
    obj[..n].clone_from_slice(c);
    let allowed: Vec<bool> = (0..ncols).map(|j| j < n + m).collect();
    match t.run(&obj, &allowed) {
        Phase::Unbounded => LpOutcome::Unbounded,
        Phase::Optimal => LpOutcome::Optimal {
            x: t.solution(n),
            value: t.objective_value(&obj),
        },
    }
}

/// Maximizes `c . x` subject to `a x <= b`.
///
/// With `free_vars` the variables are unrestricted in sign (split internally
/// as `x+ - x-`); otherwise `x >= 0` is implied.
pub fn maximize(c: &[Rational], a: &QMatrix, b: &[Rational], free_vars: bool) -> LpOutcome {
    if !free_vars {
        return maximize_nonneg(c, a, b);
    }
    let n = a.cols();
    let split_rows = (0..a.rows())
        .map(|i| {
            let row = a.row(i);
            row.iter().cloned().chain(row.iter().map(|v| -v)).collect()
        })
        .collect();
    let split = QMatrix::from_rows_with_cols(split_rows, 2 * n);
    let split_c: Vec<Rational> = c.iter().cloned().chain(c.iter().map(|v| -v)).collect();
    match maximize_nonneg(&split_c, &split, b) {
        LpOutcome::Optimal { x, value } => LpOutcome::Optimal {
            x: (0..n).map(|j| &x[j] - &x[n + j]).collect(),
            value,
        },
        other => other,
    }
}

/// A system mixing strict rows `a_i x < b_i` and non-strict rows `a_i x <= b_i`.
#[derive(Clone, Debug)]
pub struct StrictSystem {
    pub a: QMatrix,
    pub b: Vec<Rational>,
    pub strict: Vec<bool>,
}

impl StrictSystem {
    pub fn new(nvars: usize) -> Self {
        StrictSystem {
            a: QMatrix::zeros(0, nvars),
            b: Vec::new(),
            strict: Vec::new(),
        }
    }

    fn push(&mut self, row: Vec<Rational>, rhs: Rational, strict: bool) {
        let nvars = self.a.cols();
        assert_eq!(row.len(), nvars);
        let mut rows: Vec<Vec<Rational>> = (0..self.a.rows()).map(|i| self.a.row(i).to_vec()).collect();
        rows.push(row);
        self.a = QMatrix::from_rows_with_cols(rows, nvars);
        self.b.push(rhs);
        self.strict.push(strict);
    }

    pub fn less(&mut self, row: Vec<Rational>, rhs: Rational) {
        self.push(row, rhs, true);
    }

    pub fn less_eq(&mut self, row: Vec<Rational>, rhs: Rational) {
        self.push(row, rhs, false);
    }

    pub fn feasible_point(&self) -> Option<Vec<Rational>> {
        lp_feasible_strict(&self.a, &self.b, &self.strict)
    }

    /// Exact check of every row at `x`.
    pub fn satisfied_by(&self, x: &[Rational]) -> bool {
        (0..self.a.rows()).all(|i| {
            let lhs = super::dot(self.a.row(i), x);
            if self.strict[i] {
                lhs < self.b[i]
            } else {
                lhs <= self.b[i]
            }
        })
    }
}

/// Finds `x` with `a_i x < b_i` on strict rows and `a_i x <= b_i` elsewhere.
///
/// Maximizes a slack `eps <= 1` added to every strict row; the system is
/// feasible iff the optimum is positive, and the optimizer is returned as the
/// witness.
pub fn lp_feasible_strict(a: &QMatrix, b: &[Rational], strict: &[bool]) -> Option<Vec<Rational>> {
    let m = a.rows();
    let n = a.cols();
    assert_eq!(b.len(), m);
    assert_eq!(strict.len(), m);
    let mut rows = Vec::with_capacity(m + 1);
    let mut rhs = Vec::with_capacity(m + 1);
    for i in 0..m {
        let mut row = a.row(i).to_vec();
        row.push(if strict[i] { Rational::one() } else { Rational::zero() });
        rows.push(row);
        rhs.push(b[i].clone());
    }
    let mut cap = vec![Rational::zero(); n + 1];
    cap[n] = Rational::one();
    rows.push(cap);
    rhs.push(Rational::one());
    let a_eps = QMatrix::from_rows_with_cols(rows, n + 1);
    let mut c = vec![Rational::zero(); n + 1];
    c[n] = Rational::one();
    match maximize(&c, &a_eps, &rhs, true) {
        LpOutcome::Optimal { mut x, value } if value.is_positive() => {
            x.truncate(n);
            Some(x)
        }
        LpOutcome::Optimal { .. } | LpOutcome::Infeasible => None,
        LpOutcome::Unbounded => unreachable!("slack is capped at one"),
    }
}

/// `true` iff the nonempty polyhedron `{x : a x <= b}` is bounded.
///
/// Boundedness is read off the recession cone `{a x <= 0}`: it is `{0}` iff
/// every coordinate direction `+-e_i` has a finite maximum there.
pub fn polyhedron_bounded(a: &QMatrix, b: &[Rational]) -> Result<bool> {
    let n = a.cols();
    if let LpOutcome::Infeasible = maximize(&vec![Rational::zero(); n], a, b, true) {
        return Err(Error::EmptyInput);
    }
    let zeros = vec![Rational::zero(); a.rows()];
    for i in 0..n {
        for sign in [1, -1] {
            let mut c = vec![Rational::zero(); n];
            c[i] = super::rat(sign);
            if let LpOutcome::Unbounded = maximize(&c, a, &zeros, true) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmath::{rat, ratio};

    fn q(rows: &[Vec<i64>]) -> QMatrix {
        QMatrix::from_i64_rows(rows)
    }

    #[test]
    fn open_interval_has_interior_witness() {
        let a = q(&[vec![1], vec![-1]]);
        let x = lp_feasible_strict(&a, &[rat(1), rat(0)], &[true, true]).unwrap();
        assert_eq!(x, vec![ratio(1, 2)]);
    }

    #[test]
    fn empty_open_set() {
        let a = q(&[vec![1], vec![-1]]);
        assert!(lp_feasible_strict(&a, &[rat(0), rat(0)], &[true, true]).is_none());
    }

    #[test]
    fn mixed_strict_and_box_rows() {
        let a = q(&[vec![1, 1], vec![-1, 0], vec![0, -1]]);
        let b = [rat(1), rat(0), rat(0)];
        let strict = [true, false, false];
        let x = lp_feasible_strict(&a, &b, &strict).unwrap();
        let sys = StrictSystem { a, b: b.to_vec(), strict: strict.to_vec() };
        assert!(sys.satisfied_by(&x));
    }

    #[test]
    fn closed_point_is_not_strictly_feasible() {
        // x <= 0 and x >= 0 only as strict rows would need an interior.
        let a = q(&[vec![1], vec![-1]]);
        assert!(lp_feasible_strict(&a, &[rat(0), rat(0)], &[false, true]).is_none());
        assert!(lp_feasible_strict(&a, &[rat(0), rat(0)], &[false, false]).is_some());
    }

    #[test]
    fn maximize_simple() {
        // max x + y, x + 2y <= 4, 3x + y <= 6, x,y >= 0  ->  (8/5, 6/5), value 14/5
        let a = q(&[vec![1, 2], vec![3, 1]]);
        match maximize(&[rat(1), rat(1)], &a, &[rat(4), rat(6)], false) {
            LpOutcome::Optimal { x, value } => {
                assert_eq!(x, vec![ratio(8, 5), ratio(6, 5)]);
                assert_eq!(value, ratio(14, 5));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn maximize_needs_phase_one() {
        // max -x s.t. x >= 2 (as -x <= -2), x <= 5
        let a = q(&[vec![-1], vec![1]]);
        match maximize(&[rat(-1)], &a, &[rat(-2), rat(5)], false) {
            LpOutcome::Optimal { x, .. } => assert_eq!(x, vec![rat(2)]),
            other => panic!("{other:?}"),
        }
        assert_eq!(
            maximize(&[rat(1)], &q(&[vec![1], vec![-1]]), &[rat(1), rat(-2)], false),
            LpOutcome::Infeasible
        );
        assert_eq!(
            maximize(&[rat(1)], &q(&[vec![-1]]), &[rat(0)], true),
            LpOutcome::Unbounded
        );
    }

    #[test]
    fn boundedness() {
        let square = q(&[vec![1, 0], vec![-1, 0], vec![0, 1], vec![0, -1]]);
        let ones = [rat(1), rat(0), rat(1), rat(0)];
        assert!(polyhedron_bounded(&square, &ones).unwrap());

        let half = q(&[vec![-1, 0]]);
        assert!(!polyhedron_bounded(&half, &[rat(0)]).unwrap());

        let simplex = q(&[vec![-1, 0], vec![0, -1], vec![1, 1]]);
        assert!(polyhedron_bounded(&simplex, &[rat(0), rat(0), rat(5)]).unwrap());

        let empty = q(&[vec![1], vec![-1]]);
        assert!(matches!(
            polyhedron_bounded(&empty, &[rat(0), rat(-1)]),
            Err(Error::EmptyInput)
        ));
    }
}
