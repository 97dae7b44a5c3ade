//! Cohomology of `Ω^p_X(log D') ⊗ O(T)` on a smooth complete toric variety,
//! computed weight by weight from graded Čech complexes.

mod checks;
mod engine;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub use checks::{
    euler_additivity_check, hodge_count_check, verify_vanishing, verify_vanishing_in, verify_vanishing_with,
    EulerAdditivityReport, HodgeCountReport, VanishingReport,
};
pub use engine::{CohomologyEngine, MarginPattern};

use crate::error::{Error, Result};
use crate::exactmath::QMatrix;
use crate::fan::Fan;

/// `Ω^p(log logset) ⊗ O(twist)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LogFormSheafSpec {
    pub p: usize,
    pub logset: Vec<usize>,
    pub twist: Vec<i64>,
}

impl LogFormSheafSpec {
    pub fn new(p: usize, logset: &[usize], twist: &[i64]) -> Self {
        let mut logset = logset.to_vec();
        logset.sort_unstable();
        logset.dedup();
        LogFormSheafSpec {
            p,
            logset,
            twist: twist.to_vec(),
        }
    }

    /// The line bundle `O(twist)`.
    pub fn line_bundle(twist: &[i64]) -> Self {
        Self::new(0, &[], twist)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("spec serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let spec: LogFormSheafSpec = serde_json::from_str(s)?;
        Ok(Self::new(spec.p, &spec.logset, &spec.twist))
    }
}

/// A weight together with its margins `c_rho = <m, u_rho> + t_rho`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightConditions {
    pub weight: Vec<i64>,
    pub margins: Vec<i64>,
}

impl WeightConditions {
    pub fn new(f: &Fan, twist: &[i64], m: &[i64]) -> Self {
        WeightConditions {
            weight: m.to_vec(),
            margins: margins(f, twist, m),
        }
    }

    pub fn is_consistent(&self, f: &Fan, twist: &[i64]) -> bool {
        margins(f, twist, &self.weight) == self.margins
    }
}

fn margins(f: &Fan, twist: &[i64], m: &[i64]) -> Vec<i64> {
    f.rays()
        .iter()
        .zip(twist)
        .map(|(u, &t)| u.iter().zip(m).map(|(a, b)| a * b).sum::<i64>() + t)
        .collect()
}

/// How contributing weights are enumerated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WeightMode {
    /// One lattice-point sweep per bounded chamber with nonzero cohomology.
    Chamber,
    /// Every weight in `[-bound, bound]^r`.
    BruteBox { bound: i64 },
}

/// `h^0..h^r`, with the contributing weights.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CohomologyResult {
    pub dims: Vec<usize>,
    pub weight_support: BTreeMap<Vec<i64>, Vec<usize>>,
    pub euler: i64,
}

impl CohomologyResult {
    pub fn from_support(r: usize, weight_support: BTreeMap<Vec<i64>, Vec<usize>>) -> Self {
        let mut dims = vec![0usize; r + 1];
        for per_weight in weight_support.values() {
            for (k, &h) in per_weight.iter().enumerate() {
                dims[k] += h;
            }
        }
        let euler = dims
            .iter()
            .enumerate()
            .map(|(k, &h)| if k % 2 == 0 { h as i64 } else { -(h as i64) })
            .sum();
        CohomologyResult {
            dims,
            weight_support,
            euler,
        }
    }

    /// `h^k` for `k >= 1`.
    pub fn higher(&self) -> &[usize] {
        self.dims.get(1..).unwrap_or(&[])
    }

    pub fn higher_vanishes(&self) -> bool {
        self.higher().iter().all(|&h| h == 0)
    }
}

#[derive(Serialize, Deserialize)]
struct WeightEntry {
    weight: Vec<i64>,
    dims: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct CohomologyRecord {
    dims: Vec<usize>,
    euler: i64,
    weight_support: Vec<WeightEntry>,
}

impl Serialize for CohomologyResult {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        CohomologyRecord {
            dims: self.dims.clone(),
            euler: self.euler,
            weight_support: self
                .weight_support
                .iter()
                .map(|(w, d)| WeightEntry {
                    weight: w.clone(),
                    dims: d.clone(),
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for CohomologyResult {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rec = CohomologyRecord::deserialize(d)?;
        let support = rec
            .weight_support
            .into_iter()
            .map(|e| (e.weight, e.dims))
            .collect();
        let out = CohomologyResult::from_support(rec.dims.len().saturating_sub(1), support);
        if out.dims != rec.dims || out.euler != rec.euler {
            return Err(serde::de::Error::custom(
                "dims and euler disagree with the weight support",
            ));
        }
        Ok(out)
    }
}

/// Basis of the weight-`m` sections over `U_tau`: index sets `I` of rays of
/// the chart `sigma`, standing for `dlog x_I` in the dual basis of `sigma`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SectionBasis {
    pub sigma: usize,
    pub index_sets: Vec<Vec<usize>>,
}

impl SectionBasis {
    pub fn dim(&self) -> usize {
        self.index_sets.len()
    }
}

fn subsets_of(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    if items.len() < k {
        return Vec::new();
    }
    let mut out: Vec<Vec<usize>> = subsets_of(&items[1..], k - 1)
        .into_iter()
        .map(|mut s| {
            s.insert(0, items[0]);
            s
        })
        .collect();
    out.extend(subsets_of(&items[1..], k));
    out
}

fn check_spec(f: &Fan, s: &LogFormSheafSpec) -> Result<()> {
    if s.twist.len() != f.n_rays() {
        return Err(Error::MalformedInput(format!(
            "twist has {} coefficients, fan has {} rays",
            s.twist.len(),
            f.n_rays()
        )));
    }
    if let Some(&j) = s.logset.iter().find(|&&j| j >= f.n_rays()) {
        return Err(Error::MalformedInput(format!("log set refers to missing ray {j}")));
    }
    Ok(())
}

/// Sections at weight `m` over `U_tau`, in the chart of the lowest maximal cone
/// containing `tau`.
pub fn weight_sections(f: &Fan, s: &LogFormSheafSpec, tau: &[usize], m: &[i64]) -> Result<SectionBasis> {
    let sigma = f
        .lowest_cone_containing(tau)
        .ok_or_else(|| Error::NotACone(tau.to_vec()))?;
    weight_sections_in(f, s, tau, m, sigma)
}

/// [`weight_sections`] in an explicitly chosen chart `sigma ⊇ tau`.
pub fn weight_sections_in(
    f: &Fan,
    s: &LogFormSheafSpec,
    tau: &[usize],
    m: &[i64],
    sigma: usize,
) -> Result<SectionBasis> {
    check_spec(f, s)?;
    let cone = f
        .max_cones()
        .get(sigma)
        .ok_or_else(|| Error::MalformedInput(format!("no maximal cone {sigma}")))?;
    if !tau.iter().all(|t| cone.contains(t)) {
        return Err(Error::NotACone(tau.to_vec()));
    }
    let c = margins(f, &s.twist, m);
    let index_sets = if tau.iter().any(|&rho| c[rho] < 0) {
        Vec::new()
    } else {
        subsets_of(cone, s.p)
            .into_iter()
            .filter(|set| {
                tau.iter().all(|&rho| {
                    let need = if set.contains(&rho) && !s.logset.contains(&rho) { 1 } else { 0 };
                    c[rho] >= need
                })
            })
            .collect()
    };
    Ok(SectionBasis { sigma, index_sets })
}

/// The span of a [`SectionBasis`] inside `∧^p M_Q`, one row per basis vector,
/// in the basis `e*_J` (`J` ranging over `p`-subsets of `0..r` in lexicographic
/// order). Charts differ by the basis they use, the span does not.
pub fn section_span(f: &Fan, p: usize, basis: &SectionBasis) -> QMatrix {
    let r = f.dim();
    let u = f.cone_matrix(basis.sigma);
    let inv = crate::exactmath::inverse(&QMatrix::from_i64_rows(&u)).expect("unimodular cone");
    let cone = &f.max_cones()[basis.sigma];
    let coords: Vec<usize> = (0..r).collect();
    let js = subsets_of(&coords, p);
    let rows = basis
        .index_sets
        .iter()
        .map(|set| {
            // dual vector of ray `cone[k]` is column `k` of the inverse
            let cols: Vec<usize> = set
                .iter()
                .map(|rho| cone.iter().position(|x| x == rho).expect("ray of the chart"))
                .collect();
            js.iter()
                .map(|j| {
                    let sub: Vec<Vec<crate::exactmath::Rational>> = j
                        .iter()
                        .map(|&a| cols.iter().map(|&b| inv.get(a, b).clone()).collect())
                        .collect();
                    rational_det(sub)
                })
                .collect()
        })
        .collect();
    QMatrix::from_rows_with_cols(rows, js.len())
}

fn rational_det(mut a: Vec<Vec<crate::exactmath::Rational>>) -> crate::exactmath::Rational {
    use num_traits::{One, Zero};
    let n = a.len();
    let mut det = crate::exactmath::Rational::one();
    for col in 0..n {
        let Some(piv) = (col..n).find(|&r| !a[r][col].is_zero()) else {
            return crate::exactmath::Rational::zero();
        };
        if piv != col {
            a.swap(piv, col);
            det = -det;
        }
        det *= &a[col][col];
        for r in col + 1..n {
            let f = &a[r][col] / &a[col][col];
            for c in col..n {
                let delta = &f * &a[col][c];
                a[r][c] -= delta;
            }
        }
    }
    det
}

/// `H^*(X, Ω^p(log D') ⊗ O(T))` by chamber enumeration.
pub fn cech_cohomology(f: &Fan, s: &LogFormSheafSpec) -> Result<CohomologyResult> {
    CohomologyEngine::shared(f)?.cohomology(s)
}

pub fn cech_cohomology_with(f: &Fan, s: &LogFormSheafSpec, mode: WeightMode) -> Result<CohomologyResult> {
    CohomologyEngine::shared(f)?.cohomology_with(s, mode)
}

#[cfg(test)]
mod tests;
