//! Vanishing verification and the consistency checks built on the engine.

use serde::{Deserialize, Serialize};

use super::{CohomologyEngine, LogFormSheafSpec, WeightMode};
use crate::divisors::{hypothesis_feasible, restrict_to_stratum, InvariantDivisor};
use crate::error::{Error, Result};
use crate::exactmath::{serde_rational, Rational};
use crate::fan::{Fan, StratumId};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VanishingReport {
    pub dprime: Vec<usize>,
    pub l: Vec<i64>,
    /// `None` when run unchecked on an instance without a witness.
    #[serde(with = "opt_rationals")]
    pub witness: Option<Vec<Rational>>,
    /// `h^0..h^r` for each `p = 0..r`.
    pub dims: Vec<Vec<usize>>,
    /// `(p, k, h^k)` with `k >= 1` and `h^k != 0`.
    pub violations: Vec<(usize, usize, usize)>,
    pub pass: bool,
}

mod opt_rationals {
    use super::*;
    use serde::{Deserializer, Serializer};

    #[derive(Serialize, Deserialize)]
    struct Wrap(#[serde(with = "serde_rational::vec")] Vec<Rational>);

    pub fn serialize<S: Serializer>(v: &Option<Vec<Rational>>, s: S) -> std::result::Result<S::Ok, S::Error> {
        v.as_ref().map(|x| Wrap(x.clone())).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Option<Vec<Rational>>, D::Error> {
        Ok(Option::<Wrap>::deserialize(d)?.map(|w| w.0))
    }
}

fn normalized(dprime: &[usize], n: usize) -> Result<Vec<usize>> {
    let mut d = dprime.to_vec();
    d.sort_unstable();
    d.dedup();
    if let Some(&j) = d.iter().find(|&&j| j >= n) {
        return Err(Error::MalformedInput(format!("log set refers to missing ray {j}")));
    }
    Ok(d)
}

fn integral(l: &InvariantDivisor) -> Result<Vec<i64>> {
    l.to_ints()
        .ok_or_else(|| Error::MalformedInput("line bundle needs integral coefficients".into()))
}

/// `H^k(Ω^p(log D')(-D') ⊗ L)` for all `p`, `k >= 1`.
///
/// Without a hypothesis witness this refuses to run unless `unchecked` is set.
pub fn verify_vanishing(f: &Fan, dprime: &[usize], l: &InvariantDivisor, unchecked: bool) -> Result<VanishingReport> {
    let engine = CohomologyEngine::shared(f)?;
    verify_vanishing_with(&engine, dprime, l, unchecked)
}

pub fn verify_vanishing_with(
    engine: &CohomologyEngine,
    dprime: &[usize],
    l: &InvariantDivisor,
    unchecked: bool,
) -> Result<VanishingReport> {
    verify_vanishing_in(engine, dprime, l, unchecked, WeightMode::Chamber)
}

pub fn verify_vanishing_in(
    engine: &CohomologyEngine,
    dprime: &[usize],
    l: &InvariantDivisor,
    unchecked: bool,
    mode: WeightMode,
) -> Result<VanishingReport> {
    let f = engine.fan();
    let dprime = normalized(dprime, f.n_rays())?;
    let l_int = integral(l)?;
    let witness = hypothesis_feasible(f, l, &dprime)?;
    if witness.is_none() && !unchecked {
        return Err(Error::HypothesisNotVerified);
    }
    let mut twist = l_int.clone();
    for &j in &dprime {
        twist[j] -= 1;
    }
    let mut dims = Vec::new();
    let mut violations = Vec::new();
    for p in 0..=f.dim() {
        let h = engine.cohomology_with(&LogFormSheafSpec::new(p, &dprime, &twist), mode)?;
        for (k, &hk) in h.dims.iter().enumerate().skip(1) {
            if hk != 0 {
                violations.push((p, k, hk));
            }
        }
        dims.push(h.dims);
    }
    Ok(VanishingReport {
        dprime,
        l: l_int,
        witness,
        dims,
        pass: violations.is_empty(),
        violations,
    })
}

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HodgeCountReport {
    pub dprime: Vec<usize>,
    /// Chart whose complement condition holds.
    pub sigma: usize,
    pub s: usize,
    /// `h^q(Ω^p(log D'))`, indexed `[p][q]`.
    pub dims: Vec<Vec<usize>>,
    /// `sum_{p+q=k} h^q(Ω^p(log D'))` for `k = 0..=2r`.
    pub totals: Vec<usize>,
    /// `C(s, k)` for `k = 0..=2r`.
    pub expected: Vec<usize>,
    pub higher_vanish: bool,
    pub pass: bool,
}

/// Complement `X \ D'` inside one chart: total log-form cohomology by degree
/// must be `C(s, k)`, all of it in `H^0`.
pub fn hodge_count_check(f: &Fan, dprime: &[usize]) -> Result<HodgeCountReport> {
    let engine = CohomologyEngine::shared(f)?;
    let dprime = normalized(dprime, f.n_rays())?;
    let sigma = (0..f.max_cones().len())
        .find(|&i| {
            let cone = &f.max_cones()[i];
            (0..f.n_rays()).all(|j| cone.contains(&j) || dprime.contains(&j))
        })
        .ok_or(Error::ChartConditionFails)?;
    let s = dprime.iter().filter(|j| f.max_cones()[sigma].contains(j)).count();
    let r = f.dim();
    let zero = vec![0i64; f.n_rays()];
    let mut dims = Vec::new();
    for p in 0..=r {
        dims.push(engine.cohomology(&LogFormSheafSpec::new(p, &dprime, &zero))?.dims);
    }
    let mut totals = vec![0usize; 2 * r + 1];
    for (p, row) in dims.iter().enumerate() {
        for (q, &h) in row.iter().enumerate() {
            totals[p + q] += h;
        }
    }
    let expected: Vec<usize> = (0..=2 * r).map(|k| binomial(s, k)).collect();
    let higher_vanish = dims.iter().all(|row| row.iter().skip(1).all(|&h| h == 0));
    Ok(HodgeCountReport {
        pass: higher_vanish && totals == expected,
        dprime,
        sigma,
        s,
        dims,
        totals,
        expected,
        higher_vanish,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EulerAdditivityReport {
    pub dprime: Vec<usize>,
    pub h: usize,
    pub l: Vec<i64>,
    /// `(middle, sub, quotient)` Euler characteristics for each `p`.
    pub euler: Vec<(i64, i64, i64)>,
    pub pass: bool,
}

/// Euler characteristics across
/// `0 -> Ω^p(log D'+H)(-D'-H)⊗L -> Ω^p(log D')(-D')⊗L -> Ω^p_H(log D'|_H)(-D'|_H)⊗L|_H -> 0`.
pub fn euler_additivity_check(f: &Fan, dprime: &[usize], h: usize, l: &InvariantDivisor) -> Result<EulerAdditivityReport> {
    let engine = CohomologyEngine::shared(f)?;
    let n = f.n_rays();
    let dprime = normalized(dprime, n)?;
    if h >= n || dprime.contains(&h) {
        return Err(Error::MalformedInput(format!("ray {h} must be a ray outside the log set")));
    }
    let l_int = integral(l)?;
    let mut twist = l_int.clone();
    for &j in &dprime {
        twist[j] -= 1;
    }
    let mut sub_twist = twist.clone();
    sub_twist[h] -= 1;
    let mut sub_log = dprime.clone();
    sub_log.push(h);

    let tau = StratumId::new(vec![h]);
    let stratum = f.stratum_fan(&tau)?;
    let h_engine = CohomologyEngine::shared(&stratum.fan)?;
    let q_twist = restrict_to_stratum(f, &InvariantDivisor::from_ints(&twist), &tau)?
        .to_ints()
        .expect("restriction of an integral divisor is integral");
    let q_log: Vec<usize> = dprime.iter().filter_map(|&j| stratum.local_index(j)).collect();

    let mut euler = Vec::new();
    for p in 0..=f.dim() {
        let middle = engine.cohomology(&LogFormSheafSpec::new(p, &dprime, &twist))?.euler;
        let sub = engine.cohomology(&LogFormSheafSpec::new(p, &sub_log, &sub_twist))?.euler;
        let quotient = h_engine.cohomology(&LogFormSheafSpec::new(p, &q_log, &q_twist))?.euler;
        euler.push((middle, sub, quotient));
    }
    Ok(EulerAdditivityReport {
        pass: euler.iter().all(|&(m, s, q)| m == s + q),
        dprime,
        h,
        l: l_int,
        euler,
    })
}
