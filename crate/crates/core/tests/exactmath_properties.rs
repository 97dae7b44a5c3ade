use proptest::prelude::*;
use toric_bott::exactmath::{
    cohomology_dims, lp_feasible_strict, rat, ChainComplex, ExactMatrix, QMatrix, Rational,
};

fn small_matrix(max_rows: usize, max_cols: usize) -> impl Strategy<Value = Vec<Vec<i64>>> {
    (1..=max_rows, 1..=max_cols).prop_flat_map(|(r, c)| prop::collection::vec(prop::collection::vec(-4i64..=4, c), r))
}

/// Unimodular `U` and its inverse from a list of elementary row operations.
fn unimodular(n: usize, ops: &[(usize, usize, i64)]) -> (QMatrix, QMatrix) {
    let mut u = QMatrix::identity(n);
    let mut v = QMatrix::identity(n);
    for &(i, j, k) in ops {
        let (i, j) = (i % n, j % n);
        if i == j {
            continue;
        }
        let mut e = QMatrix::identity(n);
        e.set(i, j, rat(k));
        let mut e_inv = QMatrix::identity(n);
        e_inv.set(i, j, rat(-k));
        u = e.mul(&u);
        v = v.mul(&e_inv);
    }
    (u, v)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn rank_is_transpose_invariant(rows in small_matrix(5, 5)) {
        let m = QMatrix::from_i64_rows(&rows);
        prop_assert_eq!(m.rank(), m.transpose().rank());
        prop_assert!(m.rank() <= rows.len().min(rows[0].len()));
    }

    #[test]
    fn zero_differentials_keep_every_term(dims in prop::collection::vec(0usize..5, 2..5)) {
        let ds: Vec<QMatrix> = dims.windows(2).map(|w| QMatrix::zeros(w[1], w[0])).collect();
        let c = ChainComplex::with_terms(dims.clone(), ds).unwrap();
        prop_assert_eq!(cohomology_dims(&c).unwrap(), dims);
    }

    /// `C^0 -> C^1 -> C^2` with `d1 = [A; 0]`, `d2 = [0 | B]`, then conjugated
    /// on `C^1` by a unimodular change of basis.
    #[test]
    fn euler_characteristic_matches_cohomology(
        a in small_matrix(3, 3),
        b in small_matrix(3, 3),
        ops in prop::collection::vec((0usize..6, 0usize..6, -2i64..=2), 0..8),
    ) {
        let (ka, n0) = (a.len(), a[0].len());
        let (n2, kb) = (b.len(), b[0].len());
        let n1 = ka + kb;
        let mut d1 = QMatrix::zeros(n1, n0);
        for i in 0..ka { for j in 0..n0 { d1.set(i, j, rat(a[i][j])); } }
        let mut d2 = QMatrix::zeros(n2, n1);
        for i in 0..n2 { for j in 0..kb { d2.set(i, ka + j, rat(b[i][j])); } }
        let (u, v) = unimodular(n1, &ops);
        let c = ChainComplex::new(vec![u.mul(&d1), d2.mul(&v)]).unwrap();
        c.check_composites().unwrap();
        let h = cohomology_dims(&c).unwrap();
        let alt: i64 = h.iter().enumerate().map(|(i, &x)| if i % 2 == 0 { x as i64 } else { -(x as i64) }).sum();
        prop_assert_eq!(alt, c.euler_characteristic());
        prop_assert_eq!(h[0], n0 - QMatrix::from_i64_rows(&a).rank());
    }

    #[test]
    fn strict_lp_witness_satisfies_every_row(
        rows in small_matrix(5, 3),
        rhs in prop::collection::vec(-4i64..=4, 5),
        strict in prop::collection::vec(any::<bool>(), 5),
    ) {
        let n = rows.len();
        let a = QMatrix::from_i64_rows(&rows);
        let b: Vec<Rational> = rhs[..n].iter().map(|&x| rat(x)).collect();
        if let Some(x) = lp_feasible_strict(&a, &b, &strict[..n]) {
            for i in 0..n {
                let lhs: Rational = a.row(i).iter().zip(&x).map(|(p, q)| p * q).sum();
                if strict[i] { prop_assert!(lhs < b[i]); } else { prop_assert!(lhs <= b[i]); }
            }
        }
    }

    #[test]
    fn systems_with_an_interior_point_are_feasible(
        rows in small_matrix(5, 3),
        x0 in prop::collection::vec(-3i64..=3, 3),
        slack in prop::collection::vec(1i64..=3, 5),
    ) {
        let n = rows.len();
        let a = QMatrix::from_i64_rows(&rows);
        let x0: Vec<Rational> = x0[..rows[0].len()].iter().map(|&v| rat(v)).collect();
        let b: Vec<Rational> = (0..n)
            .map(|i| a.row(i).iter().zip(&x0).map(|(p, q)| p * q).sum::<Rational>() + rat(slack[i]))
            .collect();
        prop_assert!(lp_feasible_strict(&a, &b, &vec![true; n]).is_some());
    }
}
