//! Torus-invariant divisors, intersection numbers with invariant curves, and
//! the ampleness tests built on them.

use std::ops::{Add, Neg, Sub};

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactmath::{
    self, common_denominator, rat, serde_rational, solve, to_i64, QMatrix, Rational, StrictSystem,
};
use crate::fan::{Fan, StratumId, Wall};

/// `sum_rho a_rho D_rho` with rational coefficients, one per ray.
///
/// Integral divisors model line bundles `O(D)`; rational ones model the
/// R-divisors whose ampleness is tested (an open condition, so rational
/// witnesses suffice).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct InvariantDivisor {
    #[serde(with = "serde_rational::vec")]
    coeffs: Vec<Rational>,
}

impl InvariantDivisor {
    pub fn new(coeffs: Vec<Rational>) -> Self {
        InvariantDivisor { coeffs }
    }

    pub fn zero(n: usize) -> Self {
        InvariantDivisor {
            coeffs: vec![Rational::zero(); n],
        }
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        InvariantDivisor {
            coeffs: coeffs.iter().map(|&a| rat(a)).collect(),
        }
    }

    /// The prime divisor `D_i` among `n` rays.
    pub fn ray(n: usize, i: usize) -> Self {
        let mut d = Self::zero(n);
        d.coeffs[i] = rat(1);
        d
    }

    /// `sum_{i in set} D_i`.
    pub fn sum_of_rays(n: usize, set: &[usize]) -> Self {
        let mut d = Self::zero(n);
        for &i in set {
            d.coeffs[i] += rat(1);
        }
        d
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_integral(&self) -> bool {
        self.coeffs.iter().all(|a| a.is_integer())
    }

    pub fn to_ints(&self) -> Option<Vec<i64>> {
        self.coeffs.iter().map(to_i64).collect()
    }

    pub fn scale(&self, k: &Rational) -> Self {
        InvariantDivisor {
            coeffs: self.coeffs.iter().map(|a| a * k).collect(),
        }
    }

    /// Componentwise order `self <= other`.
    pub fn le(&self, other: &Self) -> bool {
        self.coeffs.len() == other.coeffs.len()
            && self.coeffs.iter().zip(&other.coeffs).all(|(a, b)| a <= b)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("divisor serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

impl Add for &InvariantDivisor {
    type Output = InvariantDivisor;

    fn add(self, rhs: &InvariantDivisor) -> InvariantDivisor {
        assert_eq!(self.len(), rhs.len(), "divisors on different fans");
        InvariantDivisor {
            coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &InvariantDivisor {
    type Output = InvariantDivisor;

    fn sub(self, rhs: &InvariantDivisor) -> InvariantDivisor {
        self + &(-rhs)
    }
}

impl Neg for &InvariantDivisor {
    type Output = InvariantDivisor;

    fn neg(self) -> InvariantDivisor {
        InvariantDivisor {
            coeffs: self.coeffs.iter().map(|a| -a).collect(),
        }
    }
}

/// Local trivializations: `<m_sigma, u_rho> = -a_rho` for every ray of `sigma`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CartierData {
    pub m_sigma: Vec<Vec<Rational>>,
}

fn check_len(f: &Fan, d: &InvariantDivisor) -> Result<()> {
    if d.len() != f.n_rays() {
        return Err(Error::MalformedInput(format!(
            "divisor has {} coefficients, fan has {} rays",
            d.len(),
            f.n_rays()
        )));
    }
    Ok(())
}

fn cone_covector(f: &Fan, d: &InvariantDivisor, sigma: usize) -> Vec<Rational> {
    let rows = QMatrix::from_i64_rows(&f.cone_matrix(sigma));
    let rhs: Vec<Rational> = f.max_cones()[sigma].iter().map(|&j| -&d.coeffs[j]).collect();
    if f.dim() == 0 {
        return Vec::new();
    }
    solve(&rows, &rhs).expect("maximal cones of a smooth fan are unimodular")
}

pub fn cartier_data(f: &Fan, d: &InvariantDivisor) -> Result<CartierData> {
    check_len(f, d)?;
    f.require_smooth()?;
    Ok(CartierData {
        m_sigma: (0..f.max_cones().len()).map(|s| cone_covector(f, d, s)).collect(),
    })
}

/// `K_X = -sum_rho D_rho`.
pub fn canonical_divisor(f: &Fan) -> InvariantDivisor {
    InvariantDivisor::from_ints(&vec![-1; f.n_rays()])
}

/// `div(chi^m) = sum_rho <m, u_rho> D_rho`.
pub fn principal_divisor(f: &Fan, m: &[i64]) -> InvariantDivisor {
    InvariantDivisor::from_ints(
        &f.rays()
            .iter()
            .map(|u| u.iter().zip(m).map(|(a, b)| a * b).sum())
            .collect::<Vec<i64>>(),
    )
}

fn pair(m: &[Rational], u: &[i64]) -> Rational {
    m.iter().zip(u).fold(Rational::zero(), |acc, (a, &b)| acc + a * rat(b))
}

/// `D . C_tau = <m_sigma - m_sigma', u_extra'>`.
pub fn intersect_wall(f: &Fan, d: &InvariantDivisor, w: &Wall) -> Result<Rational> {
    check_len(f, d)?;
    let m = cone_covector(f, d, w.sigma);
    let m_prime = cone_covector(f, d, w.sigma_prime);
    let diff: Vec<Rational> = m.iter().zip(&m_prime).map(|(a, b)| a - b).collect();
    Ok(pair(&diff, f.ray(w.u_extra_prime)))
}

/// Intersection numbers `D_rho . C_w`, one row per wall, one column per ray.
pub fn intersection_matrix(f: &Fan) -> Result<Vec<Vec<i64>>> {
    f.require_smooth()?;
    let walls = f.walls()?;
    let n = f.n_rays();
    walls
        .iter()
        .map(|w| {
            (0..n)
                .map(|j| {
                    let v = intersect_wall(f, &InvariantDivisor::ray(n, j), w)?;
                    to_i64(&v).ok_or_else(|| {
                        Error::Internal(format!("non-integral intersection number {v}"))
                    })
                })
                .collect()
        })
        .collect()
}

/// Intersection numbers of `d` with every wall curve, in [`Fan::walls`] order.
pub fn wall_numbers(f: &Fan, d: &InvariantDivisor) -> Result<Vec<Rational>> {
    check_len(f, d)?;
    let m = intersection_matrix(f)?;
    Ok(m.iter()
        .map(|row| {
            row.iter()
                .zip(d.coeffs())
                .fold(Rational::zero(), |acc, (&x, a)| acc + a * rat(x))
        })
        .collect())
}

pub fn is_ample(f: &Fan, d: &InvariantDivisor) -> Result<bool> {
    Ok(wall_numbers(f, d)?.iter().all(Signed::is_positive))
}

pub fn is_nef(f: &Fan, d: &InvariantDivisor) -> Result<bool> {
    Ok(wall_numbers(f, d)?.iter().all(|x| !x.is_negative()))
}

/// Searches `0 <= d <= 1` (indexed like `dprime`) with `l - sum d_j D_j` ample.
///
/// Wall rows are strict, box rows non-strict; solved exactly by
/// [`exactmath::lp_feasible_strict`].
pub fn hypothesis_feasible(
    f: &Fan,
    l: &InvariantDivisor,
    dprime: &[usize],
) -> Result<Option<Vec<Rational>>> {
    check_len(f, l)?;
    if let Some(&j) = dprime.iter().find(|&&j| j >= f.n_rays()) {
        return Err(Error::MalformedInput(format!("log set refers to missing ray {j}")));
    }
    let m = intersection_matrix(f)?;
    let k = dprime.len();
    let mut sys = StrictSystem::new(k);
    for row in &m {
        let lhs: Vec<Rational> = dprime.iter().map(|&j| rat(row[j])).collect();
        let l_dot = row
            .iter()
            .zip(l.coeffs())
            .fold(Rational::zero(), |acc, (&x, a)| acc + a * rat(x));
        sys.less(lhs, l_dot);
    }
    for j in 0..k {
        let mut lo = vec![Rational::zero(); k];
        lo[j] = rat(-1);
        sys.less_eq(lo, Rational::zero());
        let mut hi = vec![Rational::zero(); k];
        hi[j] = rat(1);
        sys.less_eq(hi, rat(1));
    }
    Ok(sys.feasible_point())
}

/// An integral ample divisor, if the fan is projective.
pub fn ample_witness(f: &Fan) -> Result<Option<InvariantDivisor>> {
    let m = intersection_matrix(f)?;
    let n = f.n_rays();
    let mut sys = StrictSystem::new(n);
    for row in &m {
        sys.less(row.iter().map(|&x| rat(-x)).collect(), Rational::zero());
    }
    Ok(sys.feasible_point().map(|x| {
        let den = Rational::from_integer(common_denominator(&x));
        InvariantDivisor::new(x.iter().map(|a| a * &den).collect())
    }))
}

/// Restriction of a divisor to `V(tau)`, using the Cartier data of the
/// lowest-index maximal cone containing `tau`. Integral input gives integral
/// output.
///
/// The result is indexed by the stratum rays of [`Fan::stratum_fan`].
pub fn restrict_to_stratum(f: &Fan, d: &InvariantDivisor, tau: &StratumId) -> Result<InvariantDivisor> {
    if tau.rays().is_empty() {
        check_len(f, d)?;
        return Ok(d.clone());
    }
    let sigma = f
        .lowest_cone_containing(tau.rays())
        .ok_or_else(|| Error::NotACone(tau.rays().to_vec()))?;
    restrict_to_stratum_via(f, d, tau, sigma)
}

/// Same as [`restrict_to_stratum`] with an explicit maximal cone `sigma ⊇ tau`
/// supplying the Cartier representative. Different choices give linearly
/// equivalent results.
pub fn restrict_to_stratum_via(
    f: &Fan,
    d: &InvariantDivisor,
    tau: &StratumId,
    sigma: usize,
) -> Result<InvariantDivisor> {
    check_len(f, d)?;
    let cone = f
        .max_cones()
        .get(sigma)
        .ok_or_else(|| Error::MalformedInput(format!("no maximal cone {sigma}")))?;
    if !tau.rays().iter().all(|t| cone.contains(t)) {
        return Err(Error::NotACone(tau.rays().to_vec()));
    }
    f.require_smooth()?;
    let m = cone_covector(f, d, sigma);
    let coeffs = f
        .adjacent_rays(tau.rays())
        .into_iter()
        .map(|j| &d.coeffs[j] + pair(&m, f.ray(j)))
        .collect();
    Ok(InvariantDivisor::new(coeffs))
}

/// Pins the wall-formula sign: `O(1) . line = 1` on `P^2`.
pub fn check_sign_convention() -> Result<()> {
    let p2 = crate::fan::builtin::projective_space(2);
    let d = InvariantDivisor::ray(3, 0);
    for w in p2.walls()? {
        let v = intersect_wall(&p2, &d, &w)?;
        if v != rat(1) {
            return Err(Error::Internal(format!(
                "wall formula gives O(1).line = {} on wall {:?}",
                exactmath::format_rational(&v),
                w.tau
            )));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmath::ratio;
    use crate::fan::builtin::*;

    #[test]
    fn sign_convention_holds() {
        check_sign_convention().unwrap();
    }

    #[test]
    fn cartier_examples() {
        let p2 = projective_space(2);
        let c = cartier_data(&p2, &InvariantDivisor::ray(3, 0)).unwrap();
        let cone01 = p2.max_cones().iter().position(|c| c == &vec![0, 1]).unwrap();
        assert_eq!(c.m_sigma[cone01], vec![rat(-1), rat(0)]);
        let zero = cartier_data(&p2, &InvariantDivisor::zero(3)).unwrap();
        assert!(zero.m_sigma.iter().flatten().all(Zero::is_zero));

        let p1 = projective_space(1);
        let c = cartier_data(&p1, &InvariantDivisor::ray(2, 0)).unwrap();
        let cone_of = |ray: usize| p1.max_cones().iter().position(|c| c == &vec![ray]).unwrap();
        assert_eq!(c.m_sigma[cone_of(0)], vec![rat(-1)]);
        assert_eq!(c.m_sigma[cone_of(1)], vec![rat(0)]);
    }

    #[test]
    fn canonical_divisors() {
        assert_eq!(canonical_divisor(&projective_space(2)), InvariantDivisor::from_ints(&[-1, -1, -1]));
        assert_eq!(canonical_divisor(&projective_space(1)), InvariantDivisor::from_ints(&[-1, -1]));
        assert_eq!(canonical_divisor(&hirzebruch(0)).len(), 4);
    }

    #[test]
    fn line_on_p2() {
        let p2 = projective_space(2);
        let d = InvariantDivisor::ray(3, 0);
        for w in p2.walls().unwrap() {
            assert_eq!(intersect_wall(&p2, &d, &w).unwrap(), rat(1));
            assert_eq!(intersect_wall(&p2, &InvariantDivisor::zero(3), &w).unwrap(), rat(0));
        }
    }

    fn self_intersection(f: &Fan, ray: usize) -> Rational {
        let w = f.walls().unwrap().into_iter().find(|w| w.tau == vec![ray]).unwrap();
        intersect_wall(f, &InvariantDivisor::ray(f.n_rays(), ray), &w).unwrap()
    }

    #[test]
    fn hirzebruch_self_intersections() {
        // F_a with rays (1,0),(0,1),(-1,a),(0,-1): D_1^2 = -a, D_3^2 = a, fibers square to 0
        for a in 0..4 {
            let f = hirzebruch(a);
            assert_eq!(self_intersection(&f, 1), rat(-a));
            assert_eq!(self_intersection(&f, 3), rat(a));
            assert_eq!(self_intersection(&f, 0), rat(0));
            assert_eq!(self_intersection(&f, 2), rat(0));
        }
        // exceptional curve of the blown-up plane
        let bl = projective_space(2).star_subdivision(&StratumId::new(vec![0, 1])).unwrap();
        assert_eq!(self_intersection(&bl, 3), rat(-1));
    }

    #[test]
    fn ampleness_on_p2() {
        let p2 = projective_space(2);
        assert!(is_ample(&p2, &InvariantDivisor::ray(3, 0)).unwrap());
        let zero = InvariantDivisor::zero(3);
        assert!(is_nef(&p2, &zero).unwrap() && !is_ample(&p2, &zero).unwrap());
        let neg = -&InvariantDivisor::ray(3, 0);
        assert!(!is_nef(&p2, &neg).unwrap());
        assert!(wall_numbers(&p2, &neg).unwrap().iter().all(|v| *v == rat(-1)));
    }

    #[test]
    fn hypothesis_examples() {
        let p2 = projective_space(2);
        let l = InvariantDivisor::ray(3, 0);
        assert!(hypothesis_feasible(&p2, &l, &[1]).unwrap().is_some());

        let zero = InvariantDivisor::zero(3);
        assert!(hypothesis_feasible(&p2, &zero, &[0]).unwrap().is_none());

        let two = InvariantDivisor::from_ints(&[2, 0, 0]);
        let d = hypothesis_feasible(&p2, &two, &[0, 1, 2]).unwrap().unwrap();
        let residual = &two - &InvariantDivisor::new(d.clone());
        assert!(is_ample(&p2, &residual).unwrap());
        assert!(d.iter().all(|x| *x >= rat(0) && *x <= rat(1)));
        // the advertised witness (1/2,1/2,1/2) also works
        let half = InvariantDivisor::new(vec![ratio(1, 2); 3]);
        assert!(is_ample(&p2, &(&two - &half)).unwrap());
    }

    #[test]
    fn projectivity_witness_is_ample() {
        for f in [projective_space(2), hirzebruch(2), projective_space(3)] {
            let a = ample_witness(&f).unwrap().unwrap();
            assert!(a.is_integral());
            assert!(is_ample(&f, &a).unwrap());
        }
    }

    #[test]
    fn restriction_examples() {
        let p2 = projective_space(2);
        let tau = StratumId::new(vec![1]);
        let r = restrict_to_stratum(&p2, &InvariantDivisor::ray(3, 0), &tau).unwrap();
        let degree: Rational = r.coeffs().iter().sum();
        assert_eq!(degree, rat(1));
        let r0 = restrict_to_stratum(&p2, &InvariantDivisor::zero(3), &tau).unwrap();
        assert!(r0.coeffs().iter().all(Zero::is_zero));

        // fiber class of P1 x P1 meets a section once
        let f = hirzebruch(0);
        let fiber = InvariantDivisor::ray(4, 0);
        let r = restrict_to_stratum(&f, &fiber, &StratumId::new(vec![1])).unwrap();
        let degree: Rational = r.coeffs().iter().sum();
        assert_eq!(degree, rat(1));
    }

    #[test]
    fn restriction_rejects_non_cones() {
        let f = hirzebruch(0);
        assert!(matches!(
            restrict_to_stratum(&f, &InvariantDivisor::zero(4), &StratumId::new(vec![0, 2])),
            Err(Error::NotACone(_))
        ));
    }

    #[test]
    fn json_round_trip() {
        let d = InvariantDivisor::new(vec![ratio(1, 2), rat(-3), rat(0)]);
        let back = InvariantDivisor::from_json(&d.to_json()).unwrap();
        assert_eq!(back, d);
        let mixed = InvariantDivisor::from_json(r#"{"coeffs":[1,"2/4",-3]}"#).unwrap();
        assert_eq!(mixed.coeffs()[1], ratio(1, 2));
    }
}
