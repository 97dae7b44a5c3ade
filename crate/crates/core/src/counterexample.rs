//! Degree bookkeeping for the failure of relative Bott vanishing on a
//! two-step blowup of affine 3-space.
//!
//! `Y -> A^3` blows up the origin with exceptional plane `P`; `X -> Y` blows up
//! a smooth plane curve `F ⊂ P` of degree `d` with exceptional divisor `E`.
//! Every quantity below is an exact integer function of `d`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScenarioReport {
    pub d: i64,
    /// Invariant `e` of the ruled surface `E = P(N*_{F/Y})`.
    pub e_invariant: i128,
    /// Degree of `∧² N*_{F/Y}`.
    pub deg_det_conormal: i128,
    pub genus: i128,
    pub deg_l: i128,
    pub degree_a: i128,
    pub a_dot_d: i128,
    pub b_dot_d: i128,
    /// Lower bound for `h^1(F, L)` after dropping `h^0(F, L) >= 0`.
    pub rr_lower_bound: i128,
    pub bott_fails: bool,
}

/// Intersection numbers of `E` and `f^*P` with the contracted curve classes
/// `a` (fibre of `E -> F`) and `b` (line in the strict transform of `P`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurveIntersections {
    pub e_dot_a: i128,
    pub fp_dot_a: i128,
    pub e_dot_b: i128,
    pub fp_dot_b: i128,
}

fn check_degree(d: i64) -> Result<i128> {
    if d < 1 {
        return Err(Error::DomainError(d));
    }
    Ok(i128::from(d))
}

pub fn curve_intersections(d: i64) -> Result<CurveIntersections> {
    let d = check_degree(d)?;
    Ok(CurveIntersections {
        e_dot_a: -1,
        fp_dot_a: 0,
        e_dot_b: d,
        fp_dot_b: -1,
    })
}

/// Plane-curve genus `(d-1)(d-2)/2`.
pub fn genus(d: i64) -> Result<i128> {
    let d = check_degree(d)?;
    Ok((d - 1) * (d - 2) / 2)
}

pub fn scenario(d: i64) -> Result<ScenarioReport> {
    let dd = check_degree(d)?;
    // N*_{P/Y}|_F = O_P(1)|_F has degree d; N*_{F/P} = O_P(-d)|_F has degree -d^2
    let deg_conormal_p = dd;
    let deg_conormal_f = -dd * dd;
    let deg_det_conormal = deg_conormal_p + deg_conormal_f;
    // twisting the rank-2 conormal bundle by (N*_{P/Y}|_F)^{-1} shifts its degree by -2d
    let e_invariant = -(deg_det_conormal - 2 * deg_conormal_p);
    let g = genus(d)?;
    let degree_a = dd * (dd + 1);
    let deg_l = deg_det_conormal + degree_a;
    // D = -E - (d+1) f^*P
    let c = curve_intersections(d)?;
    let a_dot_d = -c.e_dot_a - (dd + 1) * c.fp_dot_a;
    let b_dot_d = -c.e_dot_b - (dd + 1) * c.fp_dot_b;
    // h^0(ω ⊗ L^{-1}) = h^0(L) - (deg L - g + 1) >= -deg L + g - 1
    let rr_lower_bound = -deg_l + g - 1;
    Ok(ScenarioReport {
        d,
        e_invariant,
        deg_det_conormal,
        genus: g,
        deg_l,
        degree_a,
        a_dot_d,
        b_dot_d,
        rr_lower_bound,
        bott_fails: rr_lower_bound > 0,
    })
}

/// Smallest `d` whose lower bound is positive.
pub fn minimal_failing_degree() -> i64 {
    (1..)
        .find(|&d| scenario(d).expect("d >= 1").bott_fails)
        .expect("the bound grows quadratically")
}

/// `a.D = b.D = 1`, which makes `D` ample relative to both contractions.
pub fn relative_ample_check(d: i64) -> Result<bool> {
    let s = scenario(d)?;
    Ok(s.a_dot_d == 1 && s.b_dot_d == 1)
}

/// Riemann-Roch and Serre duality bookkeeping on `F`:
/// `χ(ω ⊗ L^{-1}) = -χ(L)` and both agree with `g - 1 - deg L`, the bound.
pub fn riemann_roch_consistency(d: i64) -> Result<bool> {
    let s = scenario(d)?;
    let g = s.genus;
    let chi_l = s.deg_l + 1 - g;
    let deg_dual = (2 * g - 2) - s.deg_l;
    let chi_dual = deg_dual + 1 - g;
    Ok(chi_dual == -chi_l && chi_dual == g - 1 - s.deg_l && s.rr_lower_bound == chi_dual)
}

/// Reports for `lo..=hi`.
pub fn scan(lo: i64, hi: i64) -> Result<Vec<ScenarioReport>> {
    if lo < 1 {
        return Err(Error::DomainError(lo));
    }
    (lo..=hi).map(scenario).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_degrees() {
        let s8 = scenario(8).unwrap();
        assert_eq!((s8.genus, s8.rr_lower_bound, s8.bott_fails), (21, 4, true));
        let s7 = scenario(7).unwrap();
        assert_eq!((s7.genus, s7.rr_lower_bound, s7.bott_fails), (15, 0, false));
        let s1 = scenario(1).unwrap();
        assert_eq!((s1.genus, s1.deg_det_conormal, s1.rr_lower_bound), (0, 0, -3));
        assert!(!s1.bott_fails);
    }

    #[test]
    fn closed_forms() {
        for d in 1..=200i64 {
            let s = scenario(d).unwrap();
            let dd = i128::from(d);
            assert_eq!(s.e_invariant, dd * dd + dd);
            assert_eq!(s.deg_det_conormal, dd - dd * dd);
            assert_eq!(s.degree_a, dd * (dd + 1));
            assert_eq!(s.deg_l, 2 * dd);
            assert_eq!(2 * s.rr_lower_bound, dd * dd - 7 * dd);
            assert_eq!(s.e_invariant - (-s.deg_det_conormal), 2 * dd);
            assert!(relative_ample_check(d).unwrap());
            assert!(riemann_roch_consistency(d).unwrap());
        }
    }

    #[test]
    fn threshold() {
        assert_eq!(minimal_failing_degree(), 8);
        assert!((1..8).all(|d| !scenario(d).unwrap().bott_fails));
        assert!((8..300).all(|d| scenario(d).unwrap().bott_fails));
    }

    #[test]
    fn domain() {
        assert!(matches!(scenario(0), Err(Error::DomainError(0))));
        assert!(matches!(scenario(-3), Err(Error::DomainError(-3))));
        assert_eq!(scan(1, 10).unwrap().len(), 10);
        assert!(scan(0, 3).is_err());
        assert!(riemann_roch_consistency(3).unwrap());
        assert_eq!(scenario(3).unwrap().rr_lower_bound, -6);
    }
}
