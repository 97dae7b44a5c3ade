//! The fixed collection of test varieties and the instance sweeps over them.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::certifier::Certifier;
use crate::danilov::{
    euler_additivity_check, hodge_count_check, verify_vanishing_with, CohomologyEngine,
    LogFormSheafSpec, WeightMode,
};
use crate::divisors::{canonical_divisor, hypothesis_feasible, InvariantDivisor};
use crate::error::{Error, Result, EXIT_FAILED, EXIT_OK};
use crate::fan::builtin::{blown_up_plane, hirzebruch, product, projective_space};
use crate::fan::Fan;

/// `P^1, P^2, P^3, P^1 x P^1, F_1, F_2` and `P^2` blown up at one to three
/// fixed points.
pub fn suite_fans() -> Result<Vec<(String, Fan)>> {
    let p1 = projective_space(1);
    let mut out = vec![
        ("P1".to_string(), p1.clone()),
        ("P2".to_string(), projective_space(2)),
        ("P3".to_string(), projective_space(3)),
        ("P1xP1".to_string(), product(&p1, &p1)),
        ("F1".to_string(), hirzebruch(1)),
        ("F2".to_string(), hirzebruch(2)),
    ];
    for k in 1..=3 {
        out.push((format!("Bl{k}P2"), blown_up_plane(k)?));
    }
    Ok(out)
}

/// Looks up a suite fan by its short name.
pub fn suite_fan(name: &str) -> Result<Fan> {
    suite_fans()?
        .into_iter()
        .find(|(n, _)| n == name)
        .map(|(_, f)| f)
        .ok_or_else(|| crate::Error::UnknownFamily(name.to_string()))
}

/// All ray subsets of `0..n`, in order of their bitmask.
pub fn ray_subsets(n: usize) -> impl Iterator<Item = Vec<usize>> {
    (0u64..1 << n).map(move |mask| (0..n).filter(|&i| mask >> i & 1 == 1).collect())
}

/// All integer vectors of length `n` with entries in `lo..=hi`.
pub fn coefficient_grid(n: usize, lo: i64, hi: i64) -> impl Iterator<Item = Vec<i64>> {
    let width = (hi - lo + 1).max(0) as u64;
    let total = if width == 0 { 0 } else { width.pow(n as u32) };
    (0..total).map(move |mut code| {
        (0..n)
            .map(|_| {
                let v = lo + (code % width) as i64;
                code /= width;
                v
            })
            .collect()
    })
}

/// One `(D', L)` pair of the sweep.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SweepInstance {
    pub dprime: Vec<usize>,
    pub l: Vec<i64>,
}

impl SweepInstance {
    pub fn divisor(&self) -> InvariantDivisor {
        InvariantDivisor::from_ints(&self.l)
    }
}

/// Every ray subset `D'` against every `L` with coefficients in `0..=2`.
pub fn sweep_instances(f: &Fan) -> Vec<SweepInstance> {
    let n = f.n_rays();
    let mut out = Vec::new();
    for dprime in ray_subsets(n) {
        for l in coefficient_grid(n, 0, 2) {
            out.push(SweepInstance {
                dprime: dprime.clone(),
                l,
            });
        }
    }
    out
}

/// How many instances ended with a given exit code.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeCount {
    pub code: i32,
    pub count: usize,
}

/// Tally of one suite run.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepStats {
    pub name: String,
    /// Instances enumerated.
    pub instances: usize,
    /// Instances the check applied to; the rest were out of scope.
    pub checked: usize,
    /// Per-instance exit codes, ascending by code.
    pub exit_codes: Vec<CodeCount>,
    /// One line per failing instance.
    pub failures: Vec<String>,
    /// 0 when every checked instance passed, otherwise the largest code
    /// among the failing ones.
    pub exit_code: i32,
}

/// `Ok(None)` passed, `Ok(Some(msg))` failed; errors that only say the
/// instance is out of scope count as skipped.
type Outcome = Result<Option<String>>;

fn out_of_scope(e: &Error) -> bool {
    matches!(
        e,
        Error::HypothesisInfeasible | Error::HypothesisNotVerified | Error::ChartConditionFails
    )
}

impl SweepStats {
    pub fn new(name: &str) -> Self {
        SweepStats {
            name: name.to_string(),
            ..Default::default()
        }
    }

    pub fn pass(&self) -> bool {
        self.failures.is_empty()
    }

    fn bump(&mut self, code: i32) {
        match self.exit_codes.binary_search_by_key(&code, |c| c.code) {
            Ok(i) => self.exit_codes[i].count += 1,
            Err(i) => self.exit_codes.insert(i, CodeCount { code, count: 1 }),
        }
    }

    fn absorb(&mut self, outcome: Outcome, label: impl FnOnce() -> String) {
        self.instances += 1;
        match outcome {
            Ok(None) => {
                self.checked += 1;
                self.bump(EXIT_OK);
            }
            Ok(Some(msg)) => {
                self.checked += 1;
                self.bump(EXIT_FAILED);
                self.exit_code = self.exit_code.max(EXIT_FAILED);
                self.failures.push(format!("{}: {msg}", label()));
            }
            Err(e) if out_of_scope(&e) => self.bump(e.exit_code()),
            Err(e) => {
                self.checked += 1;
                self.bump(e.exit_code());
                self.exit_code = self.exit_code.max(e.exit_code());
                self.failures.push(format!("{}: error: {e}", label()));
            }
        }
    }
}

fn merge(name: &str, parts: Vec<(String, Outcome)>) -> SweepStats {
    let mut stats = SweepStats::new(name);
    for (label, outcome) in parts {
        stats.absorb(outcome, || label);
    }
    stats
}

fn twist_of(inst: &SweepInstance) -> Vec<i64> {
    let mut t = inst.l.clone();
    for &j in &inst.dprime {
        t[j] -= 1;
    }
    t
}

fn require_feasible(f: &Fan, inst: &SweepInstance) -> Result<()> {
    match hypothesis_feasible(f, &inst.divisor(), &inst.dprime)? {
        Some(_) => Ok(()),
        None => Err(Error::HypothesisInfeasible),
    }
}

/// Direct verification of every hypothesis-feasible sweep instance.
pub fn vanishing_sweep(name: &str, f: &Fan) -> Result<SweepStats> {
    let engine = CohomologyEngine::shared(f)?;
    let parts = sweep_instances(f)
        .into_par_iter()
        .map(|inst| {
            let outcome = (|| {
                require_feasible(f, &inst)?;
                let rep = verify_vanishing_with(&engine, &inst.dprime, &inst.divisor(), false)?;
                Ok((!rep.pass).then(|| format!("nonzero {:?}", rep.violations)))
            })();
            (format!("{name} D'={:?} L={:?}", inst.dprime, inst.l), outcome)
        })
        .collect();
    Ok(merge(name, parts))
}

/// Build, check and cross-validate a certificate for every feasible instance.
pub fn certificate_sweep(name: &str, f: &Fan) -> Result<SweepStats> {
    let certifier = Certifier::new(f)?;
    let parts = sweep_instances(f)
        .into_par_iter()
        .map(|inst| {
            let outcome = (|| {
                require_feasible(f, &inst)?;
                let cv = certifier.cross_validate(&inst.dprime, &inst.divisor())?;
                Ok(if !cv.agree {
                    Some(format!("certificate {} but direct {}", cv.certificate_pass, cv.direct_pass))
                } else if !cv.certificate_pass {
                    Some("certificate rejected".to_string())
                } else {
                    None
                })
            })();
            (format!("{name} D'={:?} L={:?}", inst.dprime, inst.l), outcome)
        })
        .collect();
    Ok(merge(name, parts))
}

/// `h^q(O(D)) = h^{r-q}(O(K-D))` for every `D` with coefficients in `-bound..=bound`.
pub fn serre_duality_sweep(name: &str, f: &Fan, bound: i64) -> Result<SweepStats> {
    let engine = CohomologyEngine::shared(f)?;
    let k = canonical_divisor(f).to_ints().expect("integral");
    let r = f.dim();
    let parts = coefficient_grid(f.n_rays(), -bound, bound)
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|d| {
            let outcome = (|| {
                let dual: Vec<i64> = k.iter().zip(&d).map(|(a, b)| a - b).collect();
                let h = engine.cohomology(&LogFormSheafSpec::line_bundle(&d))?.dims;
                let hd = engine.cohomology(&LogFormSheafSpec::line_bundle(&dual))?.dims;
                let flipped: Vec<usize> = (0..=r).map(|q| hd[r - q]).collect();
                Ok((h != flipped).then(|| format!("{h:?} vs dual {hd:?}")))
            })();
            (format!("{name} D={d:?}"), outcome)
        })
        .collect();
    Ok(merge(name, parts))
}

/// `h^q(Ω^p(log D')(L-D')) = h^{r-q}(Ω^{r-p}(log D')(-L))` on random instances.
pub fn log_serre_sample(name: &str, f: &Fan, count: usize, seed: u64) -> Result<SweepStats> {
    let engine = CohomologyEngine::shared(f)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = f.n_rays();
    let r = f.dim();
    let mut stats = SweepStats::new(name);
    for _ in 0..count {
        let dprime: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.5)).collect();
        let l: Vec<i64> = (0..n).map(|_| rng.gen_range(-2..=2)).collect();
        let p = rng.gen_range(0..=r);
        let outcome = (|| {
            let mut t = l.clone();
            for &j in &dprime {
                t[j] -= 1;
            }
            let neg: Vec<i64> = l.iter().map(|x| -x).collect();
            let a = engine.cohomology(&LogFormSheafSpec::new(p, &dprime, &t))?.dims;
            let b = engine.cohomology(&LogFormSheafSpec::new(r - p, &dprime, &neg))?.dims;
            let flipped: Vec<usize> = (0..=r).map(|q| b[r - q]).collect();
            Ok((a != flipped).then(|| format!("{a:?} vs dual {b:?}")))
        })();
        stats.absorb(outcome, || format!("{name} p={p} D'={dprime:?} L={l:?}"));
    }
    Ok(stats)
}

/// Euler additivity on `count` random `(fan, D', h, L)` drawn from `fans`.
pub fn euler_sample(fans: &[(String, Fan)], count: usize, seed: u64) -> Result<SweepStats> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut stats = SweepStats::new("all");
    while stats.instances < count {
        let (name, f) = fans.choose(&mut rng).ok_or(Error::EmptyInput)?;
        let n = f.n_rays();
        let dprime: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.4)).collect();
        let outside: Vec<usize> = (0..n).filter(|j| !dprime.contains(j)).collect();
        let Some(&h) = outside.choose(&mut rng) else {
            continue;
        };
        let l: Vec<i64> = (0..n).map(|_| rng.gen_range(-2..=2)).collect();
        let outcome = euler_additivity_check(f, &dprime, h, &InvariantDivisor::from_ints(&l))
            .map(|rep| (!rep.pass).then(|| format!("{:?}", rep.euler)));
        stats.absorb(outcome, || format!("{name} D'={dprime:?} h={h} L={l:?}"));
    }
    Ok(stats)
}

/// Hodge count for every `D'` meeting the chart condition.
pub fn hodge_sweep(name: &str, f: &Fan) -> Result<SweepStats> {
    let mut stats = SweepStats::new(name);
    for dprime in ray_subsets(f.n_rays()) {
        let outcome = hodge_count_check(f, &dprime).map(|rep| {
            (!rep.pass).then(|| format!("s={} totals {:?} expected {:?}", rep.s, rep.totals, rep.expected))
        });
        stats.absorb(outcome, || format!("{name} D'={dprime:?}"));
    }
    Ok(stats)
}

/// Chamber enumeration against brute force over `[-B, B]^r`, with `B` the
/// linear-programming bound on every nonzero chamber. Runs every `p` on
/// `count` seeded `(D', L)` pairs.
pub fn method_agreement(name: &str, f: &Fan, count: usize, seed: u64) -> Result<SweepStats> {
    let engine = CohomologyEngine::shared(f)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut all = sweep_instances(f);
    all.shuffle(&mut rng);
    all.truncate(count);
    let mut stats = SweepStats::new(name);
    for inst in all {
        let twist = twist_of(&inst);
        for p in 0..=f.dim() {
            let spec = LogFormSheafSpec::new(p, &inst.dprime, &twist);
            let outcome = (|| {
                let bound = engine.lp_box_bound(&spec)?;
                let a = engine.cohomology(&spec)?;
                let b = engine.cohomology_with(&spec, WeightMode::BruteBox { bound })?;
                Ok((a != b).then(|| format!("chamber {:?} box {:?} (B = {bound})", a.dims, b.dims)))
            })();
            stats.absorb(outcome, || format!("{name} p={p} D'={:?} T={twist:?}", inst.dprime));
        }
    }
    Ok(stats)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_is_smooth_and_complete() {
        let fans = suite_fans().unwrap();
        assert_eq!(fans.len(), 9);
        for (name, f) in &fans {
            let d = f.validate().unwrap();
            assert!(d.smooth && d.complete && d.fan_axioms, "{name}");
        }
        assert_eq!(suite_fan("Bl3P2").unwrap().n_rays(), 6);
        assert!(suite_fan("P4").is_err());
    }

    #[test]
    fn grids_have_the_right_size() {
        assert_eq!(ray_subsets(3).count(), 8);
        assert_eq!(coefficient_grid(3, 0, 2).count(), 27);
        assert_eq!(coefficient_grid(2, -3, 3).count(), 49);
        assert_eq!(coefficient_grid(0, 0, 2).collect::<Vec<_>>(), vec![Vec::<i64>::new()]);
        let p2 = projective_space(2);
        assert_eq!(sweep_instances(&p2).len(), 216);
    }

    #[test]
    fn tallies_record_exit_codes() {
        let mut s = SweepStats::new("t");
        s.absorb(Ok(None), String::new);
        s.absorb(Err(Error::HypothesisInfeasible), String::new);
        s.absorb(Err(Error::HypothesisInfeasible), String::new);
        assert_eq!((s.instances, s.checked, s.exit_code), (3, 1, 0));
        assert_eq!(
            s.exit_codes,
            vec![CodeCount { code: 0, count: 1 }, CodeCount { code: 3, count: 2 }]
        );
        s.absorb(Ok(Some("bad".into())), || "x".into());
        assert_eq!((s.exit_code, s.failures.clone()), (1, vec!["x: bad".to_string()]));
        s.absorb(Err(Error::MalformedInput("m".into())), || "y".into());
        assert_eq!(s.exit_code, 2);
    }

    #[test]
    fn small_sweeps_pass() {
        let p2 = projective_space(2);
        let v = vanishing_sweep("P2", &p2).unwrap();
        assert!(v.pass());
        assert_eq!((v.instances, v.checked), (216, 208));
        assert!(hodge_sweep("P2", &p2).unwrap().pass());
        assert!(method_agreement("P2", &p2, 10, 1).unwrap().pass());
    }
}
