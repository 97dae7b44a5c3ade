use super::*;
use crate::divisors::InvariantDivisor;
use crate::exactmath::{cohomology_dims, ExactMatrix};
use crate::fan::builtin::{hirzebruch, projective_space};

fn h(f: &Fan, p: usize, logset: &[usize], twist: &[i64]) -> Vec<usize> {
    cech_cohomology(f, &LogFormSheafSpec::new(p, logset, twist)).unwrap().dims
}

#[test]
fn projective_plane_reference_values() {
    let p2 = projective_space(2);
    assert_eq!(h(&p2, 0, &[], &[2, 0, 0]), vec![6, 0, 0]);
    assert_eq!(h(&p2, 1, &[], &[0, 0, 0]), vec![0, 1, 0]);
    assert_eq!(h(&p2, 2, &[], &[0, 0, 0]), vec![0, 0, 1]);
    assert_eq!(h(&p2, 0, &[], &[0, 0, 0]), vec![1, 0, 0]);
    assert_eq!(h(&p2, 0, &[], &[-1, -1, -1]), vec![0, 0, 1]);
    // Euler sequence: h^0(Ω^1(2)) = 3
    assert_eq!(h(&p2, 1, &[], &[2, 0, 0]), vec![3, 0, 0]);
}

#[test]
fn projective_line_reference_values() {
    let p1 = projective_space(1);
    assert_eq!(h(&p1, 0, &[], &[-2, 0]), vec![0, 1]);
    assert_eq!(h(&p1, 0, &[], &[-1, -1]), vec![0, 1]);
    assert_eq!(h(&p1, 0, &[], &[3, 0]), vec![4, 0]);
    assert_eq!(h(&p1, 1, &[], &[0, 0]), vec![0, 1]);
    // the 𝔸¹ model: Ω^1(log 0) ≅ O(-1), Ω^1(log both) ≅ O
    assert_eq!(h(&p1, 1, &[0], &[0, 0]), vec![0, 0]);
    assert_eq!(h(&p1, 1, &[0, 1], &[0, 0]), vec![1, 0]);
}

#[test]
fn weight_sections_on_the_affine_plane_chart() {
    let p2 = projective_space(2);
    let chart = p2.max_cones().iter().position(|c| c == &vec![0, 1]).unwrap();
    let spec = LogFormSheafSpec::new(1, &[], &[0, 0, 0]);
    let at = |m: &[i64]| weight_sections_in(&p2, &spec, &[0, 1], m, chart).unwrap().dim();
    assert_eq!(at(&[0, 0]), 0);
    assert_eq!(at(&[1, 0]), 1);
    assert_eq!(at(&[1, 1]), 2);
    assert_eq!(at(&[-1, 3]), 0);
    let all = LogFormSheafSpec::new(1, &[0, 1, 2], &[0, 0, 0]);
    for tau in [vec![0, 1], vec![1, 2], vec![0, 2]] {
        assert_eq!(weight_sections(&p2, &all, &tau, &[0, 0]).unwrap().dim(), 2);
    }
    assert!(matches!(
        weight_sections(&p2, &spec, &[0, 1, 2], &[0, 0]),
        Err(Error::NotACone(_))
    ));
}

#[test]
fn section_space_does_not_depend_on_the_chart() {
    let f1 = hirzebruch(1);
    let spec = LogFormSheafSpec::new(1, &[1], &[1, 0, 2, -1]);
    for tau in [vec![0], vec![1], vec![2], vec![3]] {
        let charts: Vec<usize> = (0..f1.max_cones().len())
            .filter(|&s| tau.iter().all(|t| f1.max_cones()[s].contains(t)))
            .collect();
        assert_eq!(charts.len(), 2);
        for m in [[0, 0], [1, 0], [-1, 1], [2, -1], [0, 1], [1, 1]] {
            let a = weight_sections_in(&f1, &spec, &tau, &m, charts[0]).unwrap();
            let b = weight_sections_in(&f1, &spec, &tau, &m, charts[1]).unwrap();
            assert_eq!(a.dim(), b.dim());
            let sa = section_span(&f1, 1, &a);
            let sb = section_span(&f1, 1, &b);
            let mut rows: Vec<Vec<_>> = (0..sa.rows()).map(|i| sa.row(i).to_vec()).collect();
            rows.extend((0..sb.rows()).map(|i| sb.row(i).to_vec()));
            let joint = QMatrix::from_rows_with_cols(rows, sa.cols());
            assert_eq!(joint.rank(), a.dim(), "tau {tau:?} m {m:?}");
        }
    }
}

#[test]
fn pattern_complexes_compose_to_zero() {
    let f = hirzebruch(2);
    let engine = CohomologyEngine::new(&f).unwrap();
    for p in 0..=2 {
        for neg in 0..16u64 {
            for blocked in 0..16u64 {
                let c = engine.pattern_complex(p, neg, blocked & !neg).unwrap();
                c.check_composites().unwrap();
                let dims = cohomology_dims(&c).unwrap();
                assert_eq!(
                    dims.iter().enumerate().map(|(k, &x)| if k % 2 == 0 { x as i64 } else { -(x as i64) }).sum::<i64>(),
                    c.euler_characteristic()
                );
            }
        }
    }
}

#[test]
fn chamber_and_box_agree_on_small_instances() {
    let f = hirzebruch(1);
    let engine = CohomologyEngine::new(&f).unwrap();
    for twist in [[1, 1, 0, 0], [-2, 0, 1, -1], [0, 0, 0, 0], [2, -3, 1, 1]] {
        for p in 0..=2 {
            let s = LogFormSheafSpec::new(p, &[2], &twist);
            let bound = engine.lp_box_bound(&s).unwrap();
            let a = engine.cohomology(&s).unwrap();
            let b = engine.cohomology_with(&s, WeightMode::BruteBox { bound }).unwrap();
            assert_eq!(a, b);
        }
    }
}

#[test]
fn point_and_degenerate_fans() {
    let pt = Fan::new(0, vec![], vec![vec![]]).unwrap();
    assert_eq!(h(&pt, 0, &[], &[]), vec![1]);
    assert_eq!(h(&pt, 1, &[], &[]), vec![0]);
}

#[test]
fn malformed_specs_are_rejected() {
    let p2 = projective_space(2);
    assert!(matches!(
        cech_cohomology(&p2, &LogFormSheafSpec::new(0, &[], &[1, 0])),
        Err(Error::MalformedInput(_))
    ));
    assert!(matches!(
        cech_cohomology(&p2, &LogFormSheafSpec::new(0, &[5], &[1, 0, 0])),
        Err(Error::MalformedInput(_))
    ));
}

#[test]
fn result_json_round_trip() {
    let p2 = projective_space(2);
    let r = cech_cohomology(&p2, &LogFormSheafSpec::new(0, &[], &[1, 0, 0])).unwrap();
    assert_eq!(r.weight_support.len(), 3);
    let json = serde_json::to_string(&r).unwrap();
    let back: CohomologyResult = serde_json::from_str(&json).unwrap();
    assert_eq!(back, r);
    let spec = LogFormSheafSpec::from_json(r#"{"p":1,"logset":[2,0],"twist":[0,0,-1]}"#).unwrap();
    assert_eq!(spec.logset, vec![0, 2]);
}

#[test]
fn vanishing_examples() {
    let p2 = projective_space(2);
    let rep = verify_vanishing(&p2, &[], &InvariantDivisor::from_ints(&[1, 0, 0]), false).unwrap();
    assert!(rep.pass);
    let rep = verify_vanishing(&p2, &[0, 1, 2], &InvariantDivisor::from_ints(&[1, 0, 0]), false).unwrap();
    assert!(rep.pass);
    let zero = InvariantDivisor::from_ints(&[0, 0, 0]);
    assert!(matches!(verify_vanishing(&p2, &[], &zero, false), Err(Error::HypothesisNotVerified)));
    let rep = verify_vanishing(&p2, &[], &zero, true).unwrap();
    assert!(!rep.pass);
    assert_eq!(rep.violations, vec![(1, 1, 1), (2, 2, 1)]);
}

#[test]
fn hodge_count_examples() {
    let p2 = projective_space(2);
    let all = hodge_count_check(&p2, &[0, 1, 2]).unwrap();
    assert!(all.pass);
    assert_eq!((all.s, all.totals[1]), (2, 2));
    let one = hodge_count_check(&p2, &[2]).unwrap();
    assert!(one.pass);
    assert_eq!(one.s, 0);
    assert_eq!(&one.totals[1..], &[0, 0, 0, 0]);
    let two = hodge_count_check(&p2, &[1, 2]).unwrap();
    assert!(two.pass);
    assert_eq!((two.s, two.totals[1]), (1, 1));
    assert!(matches!(hodge_count_check(&p2, &[]), Err(Error::ChartConditionFails)));
    let p1 = projective_space(1);
    assert_eq!(hodge_count_check(&p1, &[0, 1]).unwrap().totals[1], 1);
}

#[test]
fn euler_additivity_examples() {
    let p2 = projective_space(2);
    let d0 = InvariantDivisor::from_ints(&[1, 0, 0]);
    assert!(euler_additivity_check(&p2, &[], 0, &d0).unwrap().pass);
    let zero = InvariantDivisor::from_ints(&[0, 0, 0]);
    assert!(euler_additivity_check(&p2, &[1], 0, &zero).unwrap().pass);
    assert!(euler_additivity_check(&p2, &[1], 1, &zero).is_err());
}
