//! Certificates replaying the residue-sequence induction.
//!
//! A node claims `h^k(V(tau), Ω^p(log L) ⊗ O(T)) = 0` for `k >= 1`. Internal
//! nodes add one boundary ray `h` to `L` and split along
//!
//! `0 -> Ω^p(log L+H)(T-H) -> Ω^p(log L)(T) -> Ω^p_H(log L|_H)(T|_H) -> 0`,
//!
//! so the claim follows from the claims for the two outer terms. Leaves have
//! every boundary ray in `L`, where the sheaf is a sum of `C(dim, p)` copies of
//! `O(T)` and the claim is checked by direct computation.

use std::collections::{BTreeSet, HashMap};
use std::sync::{Arc, Mutex};

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::danilov::{verify_vanishing_with, CohomologyEngine, LogFormSheafSpec};
use crate::divisors::{hypothesis_feasible, is_ample, restrict_to_stratum, InvariantDivisor};
use crate::error::{Error, Result};
use crate::exactmath::{serde_rational, Rational};
use crate::fan::{Fan, StratumId};

/// `h^k(V(stratum), Ω^p(log logset) ⊗ O(twist)) = 0` for all `k >= 1`.
///
/// `logset` holds ambient ray indices; `twist` is indexed by the stratum's
/// rays (adjacent rays of `stratum`, ascending).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct VanishingClaim {
    pub stratum: Vec<usize>,
    pub p: usize,
    pub logset: Vec<usize>,
    pub twist: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "rule")]
pub enum Rule {
    LeafTrivialLog,
    ResidueStep {
        added_ray: usize,
        sub: Box<CertificateNode>,
        quotient: Box<CertificateNode>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateNode {
    pub claim: VanishingClaim,
    #[serde(flatten)]
    pub rule: Rule,
}

impl CertificateNode {
    pub fn leaves(&self) -> usize {
        match &self.rule {
            Rule::LeafTrivialLog => 1,
            Rule::ResidueStep { sub, quotient, .. } => sub.leaves() + quotient.leaves(),
        }
    }

    pub fn nodes(&self) -> usize {
        match &self.rule {
            Rule::LeafTrivialLog => 1,
            Rule::ResidueStep { sub, quotient, .. } => 1 + sub.nodes() + quotient.nodes(),
        }
    }

    pub fn depth(&self) -> usize {
        match &self.rule {
            Rule::LeafTrivialLog => 1,
            Rule::ResidueStep { sub, quotient, .. } => 1 + sub.depth().max(quotient.depth()),
        }
    }

    /// Strata carrying at least one claim.
    pub fn strata(&self, out: &mut BTreeSet<Vec<usize>>) {
        out.insert(self.claim.stratum.clone());
        if let Rule::ResidueStep { sub, quotient, .. } = &self.rule {
            sub.strata(out);
            quotient.strata(out);
        }
    }
}

/// One proof tree per form degree `p = 0..r`, with the data it was built from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub fan_hash: String,
    pub dprime: Vec<usize>,
    pub l: Vec<i64>,
    #[serde(with = "serde_rational::vec")]
    pub hypothesis_witness: Vec<Rational>,
    pub roots: Vec<CertificateNode>,
}

impl Certificate {
    pub fn leaves(&self) -> usize {
        self.roots.iter().map(CertificateNode::leaves).sum()
    }

    pub fn nodes(&self) -> usize {
        self.roots.iter().map(CertificateNode::nodes).sum()
    }

    pub fn depth(&self) -> usize {
        self.roots.iter().map(CertificateNode::depth).max().unwrap_or(0)
    }

    pub fn visited_strata(&self) -> BTreeSet<Vec<usize>> {
        let mut out = BTreeSet::new();
        for r in &self.roots {
            r.strata(&mut out);
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

struct Stratum {
    fan: Fan,
    /// Ambient index of each stratum ray.
    origin: Vec<usize>,
    engine: Arc<CohomologyEngine>,
}

/// Builds and checks certificates on one fan, caching strata and leaf
/// computations between calls.
pub struct Certifier {
    fan: Fan,
    hash: String,
    strata: Mutex<HashMap<Vec<usize>, Arc<Stratum>>>,
    leaf_cache: Mutex<HashMap<LeafKey, Arc<Vec<usize>>>>,
}

/// `(stratum, twist)` of a leaf line bundle.
type LeafKey = (Vec<usize>, Vec<i64>);

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

fn sorted_union(a: &[usize], b: usize) -> Vec<usize> {
    let mut v = a.to_vec();
    v.push(b);
    v.sort_unstable();
    v.dedup();
    v
}

impl Certifier {
    pub fn new(f: &Fan) -> Result<Self> {
        f.require_smooth_complete()?;
        Ok(Certifier {
            fan: f.clone(),
            hash: f.content_hash(),
            strata: Mutex::new(HashMap::new()),
            leaf_cache: Mutex::new(HashMap::new()),
        })
    }

    pub fn fan(&self) -> &Fan {
        &self.fan
    }

    fn stratum(&self, tau: &[usize]) -> Result<Arc<Stratum>> {
        if let Some(s) = self.strata.lock().unwrap().get(tau) {
            return Ok(s.clone());
        }
        let sf = self.fan.stratum_fan(&StratumId::new(tau.to_vec()))?;
        let engine = CohomologyEngine::shared(&sf.fan)?;
        let s = Arc::new(Stratum {
            fan: sf.fan,
            origin: sf.origin,
            engine,
        });
        self.strata.lock().unwrap().insert(tau.to_vec(), s.clone());
        Ok(s)
    }

    /// Restriction of a divisor on `V(tau)` to `V(tau + h)`.
    fn restrict(&self, s: &Stratum, d: &InvariantDivisor, h: usize) -> Result<InvariantDivisor> {
        let local = s
            .origin
            .iter()
            .position(|&o| o == h)
            .ok_or_else(|| Error::Internal(format!("ray {h} does not meet the stratum")))?;
        restrict_to_stratum(&s.fan, d, &StratumId::new(vec![local]))
    }

    fn leaf_dims(&self, tau: &[usize], twist: &[i64]) -> Result<Arc<Vec<usize>>> {
        let key = (tau.to_vec(), twist.to_vec());
        if let Some(d) = self.leaf_cache.lock().unwrap().get(&key) {
            return Ok(d.clone());
        }
        let s = self.stratum(tau)?;
        let dims = Arc::new(s.engine.cohomology(&LogFormSheafSpec::line_bundle(twist))?.dims);
        self.leaf_cache.lock().unwrap().insert(key, dims.clone());
        Ok(dims)
    }

    pub fn build(&self, dprime: &[usize], l: &InvariantDivisor) -> Result<Certificate> {
        let order: Vec<usize> = (0..self.fan.n_rays()).collect();
        self.build_with_order(dprime, l, &order)
    }

    /// Builds a certificate adding missing boundary rays in the given order
    /// (a permutation of all rays).
    pub fn build_with_order(&self, dprime: &[usize], l: &InvariantDivisor, order: &[usize]) -> Result<Certificate> {
        let n = self.fan.n_rays();
        let mut check = order.to_vec();
        check.sort_unstable();
        if check != (0..n).collect::<Vec<_>>() {
            return Err(Error::MalformedInput("addition order must list every ray once".into()));
        }
        let mut dprime = dprime.to_vec();
        dprime.sort_unstable();
        dprime.dedup();
        let l_int = l
            .to_ints()
            .ok_or_else(|| Error::MalformedInput("line bundle needs integral coefficients".into()))?;
        if l_int.len() != n {
            return Err(Error::MalformedInput(format!("divisor has {} coefficients, fan has {n} rays", l_int.len())));
        }
        let witness = hypothesis_feasible(&self.fan, l, &dprime)?.ok_or(Error::HypothesisInfeasible)?;
        let mut residual = l.clone();
        for (j, d) in dprime.iter().zip(&witness) {
            residual = &residual - &InvariantDivisor::ray(n, *j).scale(d);
        }
        let mut twist = l_int.clone();
        for &j in &dprime {
            twist[j] -= 1;
        }
        let roots = (0..=self.fan.dim())
            .map(|p| {
                let claim = VanishingClaim {
                    stratum: Vec::new(),
                    p,
                    logset: dprime.clone(),
                    twist: twist.clone(),
                };
                self.grow(claim, &residual, order)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Certificate {
            fan_hash: self.hash.clone(),
            dprime,
            l: l_int,
            hypothesis_witness: witness,
            roots,
        })
    }

    fn grow(&self, claim: VanishingClaim, residual: &InvariantDivisor, order: &[usize]) -> Result<CertificateNode> {
        let s = self.stratum(&claim.stratum)?;
        let Some(&h) = order
            .iter()
            .find(|&&j| s.origin.contains(&j) && !claim.logset.contains(&j))
        else {
            return Ok(CertificateNode {
                claim,
                rule: Rule::LeafTrivialLog,
            });
        };
        let local_h = s.origin.iter().position(|&o| o == h).expect("stratum ray");
        let mut sub_twist = claim.twist.clone();
        sub_twist[local_h] -= 1;
        let sub = VanishingClaim {
            stratum: claim.stratum.clone(),
            p: claim.p,
            logset: sorted_union(&claim.logset, h),
            twist: sub_twist,
        };
        let tau = sorted_union(&claim.stratum, h);
        let q_residual = self.restrict(&s, residual, h)?;
        let qs = self.stratum(&tau)?;
        if !is_ample(&qs.fan, &q_residual)? {
            return Err(Error::StratumHypothesisFails(tau));
        }
        let quotient = self.quotient_claim(&s, &claim, h)?;
        let sub = self.grow(sub, residual, order)?;
        let quotient = self.grow(quotient, &q_residual, order)?;
        Ok(CertificateNode {
            claim,
            rule: Rule::ResidueStep {
                added_ray: h,
                sub: Box::new(sub),
                quotient: Box::new(quotient),
            },
        })
    }

    fn quotient_claim(&self, s: &Stratum, claim: &VanishingClaim, h: usize) -> Result<VanishingClaim> {
        let tau = sorted_union(&claim.stratum, h);
        let qs = self.stratum(&tau)?;
        let twist = self
            .restrict(s, &InvariantDivisor::from_ints(&claim.twist), h)?
            .to_ints()
            .ok_or_else(|| Error::Internal("restriction lost integrality".into()))?;
        Ok(VanishingClaim {
            stratum: tau,
            p: claim.p,
            logset: claim
                .logset
                .iter()
                .copied()
                .filter(|j| qs.origin.contains(j))
                .collect(),
            twist,
        })
    }

    /// Checks a certificate against this fan. `Ok(true)` when every rule
    /// applies and every leaf vanishes; structural problems and nonvanishing
    /// leaves are errors.
    pub fn check(&self, c: &Certificate) -> Result<bool> {
        let n = self.fan.n_rays();
        if c.fan_hash != self.hash {
            return Err(Error::MalformedNode("certificate was built for a different fan".into()));
        }
        if c.l.len() != n || c.dprime.iter().any(|&j| j >= n) || c.hypothesis_witness.len() != c.dprime.len() {
            return Err(Error::MalformedNode("divisor data does not fit the fan".into()));
        }
        let in_box = c
            .hypothesis_witness
            .iter()
            .all(|d| *d >= Rational::zero() && *d <= Rational::one());
        let mut residual = InvariantDivisor::from_ints(&c.l);
        for (j, d) in c.dprime.iter().zip(&c.hypothesis_witness) {
            residual = &residual - &InvariantDivisor::ray(n, *j).scale(d);
        }
        if !in_box || !is_ample(&self.fan, &residual)? {
            return Err(Error::MalformedNode("hypothesis witness does not certify ampleness".into()));
        }
        if c.roots.len() != self.fan.dim() + 1 {
            return Err(Error::MalformedNode(format!("expected {} roots", self.fan.dim() + 1)));
        }
        let mut twist = c.l.clone();
        for &j in &c.dprime {
            twist[j] -= 1;
        }
        for (p, root) in c.roots.iter().enumerate() {
            let expected = VanishingClaim {
                stratum: Vec::new(),
                p,
                logset: c.dprime.clone(),
                twist: twist.clone(),
            };
            if root.claim != expected {
                return Err(Error::MalformedNode(format!("root {p} does not match the instance")));
            }
            self.check_node(root)?;
        }
        Ok(true)
    }

    fn check_node(&self, node: &CertificateNode) -> Result<()> {
        let claim = &node.claim;
        let bad = |msg: String| Err(Error::MalformedNode(msg));
        if !self.fan.is_cone(&claim.stratum) {
            return bad(format!("stratum {:?} is not a cone", claim.stratum));
        }
        let s = self.stratum(&claim.stratum)?;
        if claim.twist.len() != s.origin.len() {
            return bad(format!("twist on stratum {:?} has the wrong length", claim.stratum));
        }
        if claim.logset.iter().any(|j| !s.origin.contains(j)) || claim.logset.windows(2).any(|w| w[0] >= w[1]) {
            return bad(format!("log set {:?} is not a sorted set of stratum rays", claim.logset));
        }
        match &node.rule {
            Rule::LeafTrivialLog => {
                if claim.logset != s.origin {
                    return bad(format!("leaf on {:?} misses boundary rays", claim.stratum));
                }
                if binomial(s.fan.dim(), claim.p) == 0 {
                    return Ok(());
                }
                let dims = self.leaf_dims(&claim.stratum, &claim.twist)?;
                if dims.iter().skip(1).any(|&h| h != 0) {
                    return Err(Error::LeafNonzero(format!(
                        "stratum {:?}, p = {}, twist {:?}: h = {:?}",
                        claim.stratum, claim.p, claim.twist, dims
                    )));
                }
                Ok(())
            }
            Rule::ResidueStep { added_ray, sub, quotient } => {
                // children first, so a falsified leaf is reported as such
                self.check_node(sub)?;
                self.check_node(quotient)?;
                let h = *added_ray;
                if !s.origin.contains(&h) || claim.logset.contains(&h) {
                    return bad(format!("ray {h} cannot be added on stratum {:?}", claim.stratum));
                }
                let local_h = s.origin.iter().position(|&o| o == h).expect("stratum ray");
                let mut sub_twist = claim.twist.clone();
                sub_twist[local_h] -= 1;
                let expected_sub = VanishingClaim {
                    stratum: claim.stratum.clone(),
                    p: claim.p,
                    logset: sorted_union(&claim.logset, h),
                    twist: sub_twist,
                };
                if sub.claim != expected_sub {
                    return bad(format!("sub-claim after adding {h} does not match"));
                }
                if quotient.claim != self.quotient_claim(&s, claim, h)? {
                    return bad(format!("quotient claim after adding {h} does not match"));
                }
                Ok(())
            }
        }
    }

    /// Builds and checks a certificate, runs the direct engine, and compares.
    pub fn cross_validate(&self, dprime: &[usize], l: &InvariantDivisor) -> Result<CrossValidation> {
        let cert = self.build(dprime, l)?;
        let certificate_pass = match self.check(&cert) {
            Ok(ok) => ok,
            Err(Error::LeafNonzero(_)) => false,
            Err(e) => return Err(e),
        };
        let engine = CohomologyEngine::shared(&self.fan)?;
        let direct = verify_vanishing_with(&engine, dprime, l, false)?;
        Ok(CrossValidation {
            certificate_pass,
            direct_pass: direct.pass,
            agree: certificate_pass == direct.pass,
            leaves: cert.leaves(),
            nodes: cert.nodes(),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrossValidation {
    pub certificate_pass: bool,
    pub direct_pass: bool,
    pub agree: bool,
    pub leaves: usize,
    pub nodes: usize,
}

pub fn build_certificate(f: &Fan, dprime: &[usize], l: &InvariantDivisor) -> Result<Certificate> {
    Certifier::new(f)?.build(dprime, l)
}

pub fn check_certificate(f: &Fan, c: &Certificate) -> Result<bool> {
    Certifier::new(f)?.check(c)
}

pub fn cross_validate(f: &Fan, dprime: &[usize], l: &InvariantDivisor) -> Result<CrossValidation> {
    Certifier::new(f)?.cross_validate(dprime, l)
}

/// Shifts every leaf twist by `delta` on each stratum ray; used to build
/// falsified certificates in tests and demos.
pub fn tamper_leaves(node: &mut CertificateNode, delta: i64) {
    match &mut node.rule {
        Rule::LeafTrivialLog => node.claim.twist.iter_mut().for_each(|t| *t += delta),
        Rule::ResidueStep { sub, quotient, .. } => {
            tamper_leaves(sub, delta);
            tamper_leaves(quotient, delta);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fan::builtin::{hirzebruch, product, projective_space};

    fn div(v: &[i64]) -> InvariantDivisor {
        InvariantDivisor::from_ints(v)
    }

    #[test]
    fn full_log_set_is_a_single_leaf() {
        let p2 = projective_space(2);
        let c = build_certificate(&p2, &[0, 1, 2], &div(&[1, 0, 0])).unwrap();
        assert!(c.roots.iter().all(|r| r.rule == Rule::LeafTrivialLog));
        assert!(check_certificate(&p2, &c).unwrap());
    }

    #[test]
    fn classical_bott_on_the_plane_adds_three_rays() {
        let p2 = projective_space(2);
        let c = build_certificate(&p2, &[], &div(&[1, 0, 0])).unwrap();
        let root = &c.roots[1];
        let mut spine = 0;
        let mut node = root;
        while let Rule::ResidueStep { sub, quotient, added_ray } = &node.rule {
            assert_eq!(*added_ray, spine);
            assert_eq!(quotient.claim.stratum, vec![spine]);
            spine += 1;
            node = sub;
        }
        assert_eq!(spine, 3);
        let strata = c.visited_strata();
        assert!(strata.contains(&vec![0, 1]), "{strata:?}");
        assert!(check_certificate(&p2, &c).unwrap());
    }

    #[test]
    fn projective_line_trace() {
        let p1 = projective_space(1);
        let c = build_certificate(&p1, &[], &div(&[1, 0])).unwrap();
        let Rule::ResidueStep { added_ray: 0, sub, quotient } = &c.roots[0].rule else {
            panic!("expected a residue step");
        };
        assert_eq!(quotient.claim.stratum, vec![0]);
        assert_eq!(quotient.rule, Rule::LeafTrivialLog);
        let Rule::ResidueStep { added_ray: 1, sub: leaf, quotient: point } = &sub.rule else {
            panic!("expected a second residue step");
        };
        assert_eq!(leaf.claim.logset, vec![0, 1]);
        assert_eq!(point.claim.stratum, vec![1]);
        assert!(check_certificate(&p1, &c).unwrap());
    }

    #[test]
    fn infeasible_instances_are_refused() {
        let p2 = projective_space(2);
        assert!(matches!(
            build_certificate(&p2, &[0], &div(&[0, 0, 0])),
            Err(Error::HypothesisInfeasible)
        ));
    }

    #[test]
    fn tampering_is_detected() {
        let p2 = projective_space(2);
        let c = build_certificate(&p2, &[], &div(&[1, 0, 0])).unwrap();
        let mut bad = c.clone();
        for r in &mut bad.roots {
            tamper_leaves(r, -5);
        }
        assert!(matches!(check_certificate(&p2, &bad), Err(Error::LeafNonzero(_))));

        let mut bad = c.clone();
        if let Rule::ResidueStep { added_ray, .. } = &mut bad.roots[0].rule {
            *added_ray = 2;
        }
        assert!(matches!(check_certificate(&p2, &bad), Err(Error::MalformedNode(_))));

        let mut bad = c.clone();
        bad.fan_hash = "0".repeat(64);
        assert!(matches!(check_certificate(&p2, &bad), Err(Error::MalformedNode(_))));
    }

    #[test]
    fn json_round_trip_is_stable() {
        let f1 = hirzebruch(1);
        let c = build_certificate(&f1, &[1], &div(&[1, 1, 1, 1])).unwrap();
        let json = c.to_json();
        let back = Certificate::from_json(&json).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.to_json(), json);
        assert!(json.contains("\"rule\": \"ResidueStep\""));
        assert!(check_certificate(&f1, &back).unwrap());
    }

    #[test]
    fn cross_validation_examples() {
        let p2 = projective_space(2);
        let cv = cross_validate(&p2, &[1], &div(&[2, 0, 0])).unwrap();
        assert!(cv.certificate_pass && cv.direct_pass && cv.agree);
        let p1 = projective_space(1);
        let q = product(&p1, &p1);
        // rays 0, 1 form one ruling; (1,1)-class is D_0 + D_2
        let cv = cross_validate(&q, &[0, 1], &div(&[1, 0, 1, 0])).unwrap();
        assert!(cv.agree && cv.direct_pass);
        let f1 = hirzebruch(1);
        let ample = crate::divisors::ample_witness(&f1).unwrap().unwrap();
        let cv = cross_validate(&f1, &[], &ample).unwrap();
        assert!(cv.agree && cv.direct_pass);
    }

    #[test]
    fn addition_order_changes_the_tree_not_the_verdict() {
        let f = hirzebruch(2);
        let cert = Certifier::new(&f).unwrap();
        let l = crate::divisors::ample_witness(&f).unwrap().unwrap();
        let a = cert.build(&[], &l).unwrap();
        let b = cert.build_with_order(&[], &l, &[3, 1, 2, 0]).unwrap();
        assert_ne!(a.roots, b.roots);
        assert_eq!(cert.check(&a).unwrap(), cert.check(&b).unwrap());
        assert!(cert.build_with_order(&[], &l, &[0, 1]).is_err());
    }
}
