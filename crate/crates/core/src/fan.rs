//! Smooth complete fans: the combinatorial model of a smooth projective toric
//! variety.
//!
//! A [`Fan`] stores primitive rays in `N = Z^r` and its maximal cones as
//! sorted ray-index sets of size `r`. Only simplicial cones are representable;
//! [`Fan::validate`] decides smoothness (unimodular cones), completeness and
//! the fan axioms.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use num_integer::Integer;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::exactmath::{det_i64, rat, solve, QMatrix, Rational, StrictSystem};

const POINT_LOCATION_SAMPLES: usize = 12;
const POINT_LOCATION_SEED: u64 = 0x5eed_fa17;

/// On-disk representation: `{"dim", "rays", "max_cones"}`, 0-based indices.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FanFile {
    pub dim: usize,
    pub rays: Vec<Vec<i64>>,
    pub max_cones: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "FanFile", into = "FanFile")]
pub struct Fan {
    dim: usize,
    rays: Vec<Vec<i64>>,
    max_cones: Vec<Vec<usize>>,
}

impl TryFrom<FanFile> for Fan {
    type Error = Error;

    fn try_from(f: FanFile) -> Result<Fan> {
        Fan::new(f.dim, f.rays, f.max_cones)
    }
}

impl From<Fan> for FanFile {
    fn from(f: Fan) -> FanFile {
        FanFile {
            dim: f.dim,
            rays: f.rays,
            max_cones: f.max_cones,
        }
    }
}

/// A codimension-one cone shared by two maximal cones; indexes the invariant
/// curve `C_tau`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Wall {
    pub tau: Vec<usize>,
    pub sigma: usize,
    pub sigma_prime: usize,
    /// Ray of `sigma` not in `tau`.
    pub u_extra: usize,
    /// Ray of `sigma_prime` not in `tau`.
    pub u_extra_prime: usize,
}

/// A cone of the fan, given by its (sorted) ray indices; indexes the orbit
/// closure `V(tau)`, an intersection of `|tau|` boundary divisors.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct StratumId(pub Vec<usize>);

impl StratumId {
    pub fn new(mut rays: Vec<usize>) -> Self {
        rays.sort_unstable();
        rays.dedup();
        StratumId(rays)
    }

    pub fn whole() -> Self {
        StratumId(Vec::new())
    }

    pub fn rays(&self) -> &[usize] {
        &self.0
    }

    pub fn codim(&self) -> usize {
        self.0.len()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub smooth: bool,
    pub complete: bool,
    pub fan_axioms: bool,
}

/// The fan of an orbit closure `V(tau)` together with how it sits in the
/// ambient fan.
///
/// Stratum rays are the rays `rho` of the ambient fan with `tau + rho` a cone,
/// listed in ascending ambient index and projected to `N / <tau>`.
#[derive(Clone, Debug)]
pub struct StratumFan {
    pub fan: Fan,
    pub tau: Vec<usize>,
    /// Ambient ray index for each stratum ray.
    pub origin: Vec<usize>,
}

impl StratumFan {
    /// Stratum index of an ambient ray, if that ray meets the stratum.
    pub fn local_index(&self, ambient: usize) -> Option<usize> {
        self.origin.iter().position(|&o| o == ambient)
    }
}

fn gcd_all(v: &[i64]) -> i64 {
    v.iter().fold(0i64, |g, &x| g.gcd(&x))
}

fn bitmask(indices: &[usize]) -> u64 {
    indices.iter().fold(0u64, |m, &i| m | (1u64 << i))
}

impl Fan {
    /// Builds a fan after structural checks: rays of length `dim`, primitive and
    /// distinct; maximal cones of size `dim` with valid, distinct indices.
    pub fn new(dim: usize, rays: Vec<Vec<i64>>, max_cones: Vec<Vec<usize>>) -> Result<Fan> {
        let bad = |msg: String| Err(Error::MalformedInput(msg));
        if rays.len() > 64 {
            return bad(format!("at most 64 rays are supported, got {}", rays.len()));
        }
        for (i, r) in rays.iter().enumerate() {
            if r.len() != dim {
                return bad(format!("ray {i} has length {}, expected {dim}", r.len()));
            }
            if gcd_all(r) != 1 {
                return bad(format!("ray {i} = {r:?} is not primitive"));
            }
        }
        let distinct: BTreeSet<&Vec<i64>> = rays.iter().collect();
        if distinct.len() != rays.len() {
            return bad("duplicate rays".into());
        }
        if max_cones.is_empty() {
            return bad("a fan needs at least one maximal cone".into());
        }
        let mut cones = Vec::with_capacity(max_cones.len());
        for (i, c) in max_cones.into_iter().enumerate() {
            let mut c = c;
            c.sort_unstable();
            c.dedup();
            if c.len() != dim {
                return bad(format!("cone {i} has {} distinct rays, expected {dim}", c.len()));
            }
            if let Some(&j) = c.iter().find(|&&j| j >= rays.len()) {
                return bad(format!("cone {i} refers to missing ray {j}"));
            }
            cones.push(c);
        }
        let distinct: BTreeSet<&Vec<usize>> = cones.iter().collect();
        if distinct.len() != cones.len() {
            return bad("duplicate maximal cones".into());
        }
        Ok(Fan {
            dim,
            rays,
            max_cones: cones,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rays(&self) -> &[Vec<i64>] {
        &self.rays
    }

    pub fn ray(&self, i: usize) -> &[i64] {
        &self.rays[i]
    }

    pub fn n_rays(&self) -> usize {
        self.rays.len()
    }

    pub fn max_cones(&self) -> &[Vec<usize>] {
        &self.max_cones
    }

    pub fn cone_mask(&self, i: usize) -> u64 {
        bitmask(&self.max_cones[i])
    }

    pub fn all_rays_mask(&self) -> u64 {
        if self.rays.len() == 64 {
            u64::MAX
        } else {
            (1u64 << self.rays.len()) - 1
        }
    }

    /// Lowest-index maximal cone containing every ray of `tau`.
    pub fn lowest_cone_containing(&self, tau: &[usize]) -> Option<usize> {
        if tau.iter().any(|&i| i >= self.rays.len()) {
            return None;
        }
        let m = bitmask(tau);
        (0..self.max_cones.len()).find(|&i| self.cone_mask(i) & m == m)
    }

    pub fn is_cone(&self, tau: &[usize]) -> bool {
        self.lowest_cone_containing(tau).is_some()
    }

    /// Rays `rho` outside `tau` such that `tau + rho` is again a cone.
    pub fn adjacent_rays(&self, tau: &[usize]) -> Vec<usize> {
        let m = bitmask(tau);
        let mut adj = 0u64;
        for i in 0..self.max_cones.len() {
            let c = self.cone_mask(i);
            if c & m == m {
                adj |= c & !m;
            }
        }
        (0..self.rays.len()).filter(|&i| adj >> i & 1 == 1).collect()
    }

    /// Ray matrix of maximal cone `i`, one ray per row in cone order.
    pub fn cone_matrix(&self, i: usize) -> Vec<Vec<i64>> {
        self.max_cones[i].iter().map(|&j| self.rays[j].clone()).collect()
    }

    fn non_smooth_cone(&self) -> Option<usize> {
        (0..self.max_cones.len()).find(|&i| {
            let d = det_i64(&self.cone_matrix(i));
            d.abs() != 1.into()
        })
    }

    pub fn is_smooth(&self) -> bool {
        self.non_smooth_cone().is_none()
    }

    pub fn require_smooth(&self) -> Result<()> {
        match self.non_smooth_cone() {
            Some(i) => Err(Error::NotSmooth(i)),
            None => Ok(()),
        }
    }

    /// Every `(r-1)`-face of a maximal cone with its incident maximal cones.
    fn facet_incidence(&self) -> BTreeMap<Vec<usize>, Vec<usize>> {
        let mut map: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
        for (i, c) in self.max_cones.iter().enumerate() {
            for skip in 0..c.len() {
                let facet: Vec<usize> = c
                    .iter()
                    .enumerate()
                    .filter(|&(k, _)| k != skip)
                    .map(|(_, &j)| j)
                    .collect();
                map.entry(facet).or_default().push(i);
            }
        }
        map
    }

    /// Two-incidence plus wall-graph connectivity.
    fn combinatorially_complete(&self) -> std::result::Result<(), String> {
        if self.dim == 0 {
            return if self.max_cones.len() == 1 {
                Ok(())
            } else {
                Err("a zero-dimensional fan has exactly one cone".into())
            };
        }
        let incidence = self.facet_incidence();
        let mut adjacency = vec![Vec::new(); self.max_cones.len()];
        for (facet, cones) in &incidence {
            if cones.len() != 2 {
                return Err(format!(
                    "facet {facet:?} lies in {} maximal cones",
                    cones.len()
                ));
            }
            adjacency[cones[0]].push(cones[1]);
            adjacency[cones[1]].push(cones[0]);
        }
        let mut seen = vec![false; self.max_cones.len()];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        while let Some(i) = queue.pop_front() {
            for &j in &adjacency[i] {
                if !seen[j] {
                    seen[j] = true;
                    queue.push_back(j);
                }
            }
        }
        if seen.iter().all(|&s| s) {
            Ok(())
        } else {
            Err("wall-adjacency graph is disconnected".into())
        }
    }

    pub fn is_complete(&self) -> bool {
        self.combinatorially_complete().is_ok()
    }

    pub fn require_smooth_complete(&self) -> Result<()> {
        self.require_smooth()?;
        self.combinatorially_complete().map_err(Error::NotComplete)
    }

    /// Index of a maximal cone containing `v`, if any.
    pub fn locate(&self, v: &[i64]) -> Option<usize> {
        let target: Vec<Rational> = v.iter().map(|&x| rat(x)).collect();
        (0..self.max_cones.len()).find(|&i| {
            let basis = QMatrix::from_i64_rows(&self.cone_matrix(i)).transpose();
            solve(&basis, &target).is_some_and(|coef| coef.iter().all(|c| !c.is_negative()))
        })
    }

    /// Seeded random directions must each land in some maximal cone.
    fn point_location_oracle(&self) -> bool {
        if self.dim == 0 {
            return true;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(POINT_LOCATION_SEED);
        (0..POINT_LOCATION_SAMPLES).all(|_| {
            let v: Vec<i64> = loop {
                let v: Vec<i64> = (0..self.dim).map(|_| rng.gen_range(-97..=97)).collect();
                if v.iter().any(|&x| x != 0) {
                    break v;
                }
            };
            self.locate(&v).is_some()
        })
    }

    /// `true` iff the interiors of the two maximal cones meet.
    fn interiors_meet(&self, i: usize, j: usize) -> bool {
        let r = self.dim;
        let (ci, cj) = (&self.max_cones[i], &self.max_cones[j]);
        // variables: lambda (r), mu (r); sum lambda u - sum mu u' = 0, lambda, mu > 0
        let mut sys = StrictSystem::new(2 * r);
        for coord in 0..r {
            let row: Vec<Rational> = ci
                .iter()
                .map(|&k| rat(self.rays[k][coord]))
                .chain(cj.iter().map(|&k| rat(-self.rays[k][coord])))
                .collect();
            let neg: Vec<Rational> = row.iter().map(|v| -v).collect();
            sys.less_eq(row, Rational::zero());
            sys.less_eq(neg, Rational::zero());
        }
        for k in 0..2 * r {
            let mut row = vec![Rational::zero(); 2 * r];
            row[k] = rat(-1);
            sys.less(row, Rational::zero());
        }
        sys.feasible_point().is_some()
    }

    pub fn validate(&self) -> Result<Diagnostics> {
        let smooth = self.is_smooth();
        let complete = self.is_complete();
        let n = self.max_cones.len();
        let fan_axioms = (0..n).all(|i| (i + 1..n).all(|j| !self.interiors_meet(i, j)));
        if complete && fan_axioms && !self.point_location_oracle() {
            return Err(Error::Internal(
                "completeness criterion holds but a sample direction lies in no cone".into(),
            ));
        }
        Ok(Diagnostics {
            smooth,
            complete,
            fan_axioms,
        })
    }

    /// One wall per shared `(r-1)`-face.
    pub fn walls(&self) -> Result<Vec<Wall>> {
        if self.dim == 0 {
            return Ok(Vec::new());
        }
        let mut walls = Vec::new();
        for (tau, cones) in self.facet_incidence() {
            if cones.len() != 2 {
                return Err(Error::NotComplete(format!(
                    "facet {tau:?} lies in {} maximal cones",
                    cones.len()
                )));
            }
            let extra = |c: usize| {
                *self.max_cones[c]
                    .iter()
                    .find(|j| !tau.contains(j))
                    .expect("maximal cone has one ray beyond its facet")
            };
            walls.push(Wall {
                sigma: cones[0],
                sigma_prime: cones[1],
                u_extra: extra(cones[0]),
                u_extra_prime: extra(cones[1]),
                tau,
            });
        }
        Ok(walls)
    }

    /// Star subdivision at the cone `tau` (the toric blowup of `V(tau)`).
    pub fn star_subdivision(&self, tau: &StratumId) -> Result<Fan> {
        let tau = tau.rays();
        if !self.is_cone(tau) {
            return Err(Error::NotACone(tau.to_vec()));
        }
        if tau.len() < 2 {
            return Err(Error::DegenerateSubdivision(tau.to_vec()));
        }
        self.require_smooth()?;
        let mut u = vec![0i64; self.dim];
        for &i in tau {
            for (a, b) in u.iter_mut().zip(&self.rays[i]) {
                *a += b;
            }
        }
        let g = gcd_all(&u);
        u.iter_mut().for_each(|x| *x /= g);
        let new = self.rays.len();
        let mut rays = self.rays.clone();
        rays.push(u);
        let mut cones = Vec::new();
        for c in &self.max_cones {
            if tau.iter().all(|t| c.contains(t)) {
                for &drop in tau {
                    let mut nc: Vec<usize> = c.iter().copied().filter(|&j| j != drop).collect();
                    nc.push(new);
                    cones.push(nc);
                }
            } else {
                cones.push(c.clone());
            }
        }
        Fan::new(self.dim, rays, cones)
    }

    /// Fan of the orbit closure `V(tau)`: the star of `tau` in `N / <tau>`.
    pub fn stratum_fan(&self, tau: &StratumId) -> Result<StratumFan> {
        let tau = tau.rays().to_vec();
        if tau.is_empty() {
            return Ok(StratumFan {
                fan: self.clone(),
                tau,
                origin: (0..self.rays.len()).collect(),
            });
        }
        let Some(s0) = self.lowest_cone_containing(&tau) else {
            return Err(Error::NotACone(tau));
        };
        let basis_rows = self.cone_matrix(s0);
        if det_i64(&basis_rows).abs() != 1.into() {
            return Err(Error::NotSmooth(s0));
        }
        let basis = QMatrix::from_i64_rows(&basis_rows).transpose();
        let keep: Vec<usize> = self.max_cones[s0]
            .iter()
            .enumerate()
            .filter(|(_, j)| !tau.contains(j))
            .map(|(k, _)| k)
            .collect();
        let project = |v: &[i64]| -> Vec<i64> {
            let target: Vec<Rational> = v.iter().map(|&x| rat(x)).collect();
            let coords = solve(&basis, &target).expect("unimodular basis");
            keep.iter()
                .map(|&k| {
                    let c = &coords[k];
                    debug_assert!(c.is_integer());
                    i64::try_from(c.to_integer()).expect("coordinate fits in i64")
                })
                .collect()
        };
        let origin = self.adjacent_rays(&tau);
        let rays: Vec<Vec<i64>> = origin.iter().map(|&j| project(&self.rays[j])).collect();
        let tau_mask = bitmask(&tau);
        let cones: Vec<Vec<usize>> = (0..self.max_cones.len())
            .filter(|&i| self.cone_mask(i) & tau_mask == tau_mask)
            .map(|i| {
                self.max_cones[i]
                    .iter()
                    .filter(|j| !tau.contains(j))
                    .map(|j| origin.iter().position(|o| o == j).expect("adjacent ray"))
                    .collect()
            })
            .collect();
        let fan = Fan::new(self.dim - tau.len(), rays, cones)?;
        Ok(StratumFan { fan, tau, origin })
    }

    /// Hex SHA-256 of the canonical JSON encoding.
    pub fn content_hash(&self) -> String {
        let json = serde_json::to_string(self).expect("fan serializes");
        Sha256::digest(json.as_bytes())
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("fan serializes")
    }

    pub fn from_json(s: &str) -> Result<Fan> {
        Ok(serde_json::from_str(s)?)
    }
}

/// Standard families of smooth complete fans.
pub mod builtin {
    use super::*;

    /// `P^r`: rays `e_1..e_r` and `-(e_1+...+e_r)`.
    pub fn projective_space(r: usize) -> Fan {
        let mut rays: Vec<Vec<i64>> = (0..r)
            .map(|i| (0..r).map(|j| i64::from(i == j)).collect())
            .collect();
        rays.push(vec![-1; r]);
        let cones = (0..=r)
            .map(|skip| (0..=r).filter(|&j| j != skip).collect())
            .collect();
        Fan::new(r, rays, cones).expect("projective space fan is well formed")
    }

    /// Hirzebruch surface `F_a`: rays `(1,0), (0,1), (-1,a), (0,-1)`.
    pub fn hirzebruch(a: i64) -> Fan {
        let rays = vec![vec![1, 0], vec![0, 1], vec![-1, a], vec![0, -1]];
        let cones = vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![3, 0]];
        Fan::new(2, rays, cones).expect("Hirzebruch fan is well formed")
    }

    /// Product fan: rays of `f1` padded with zeros, then rays of `f2`.
    pub fn product(f1: &Fan, f2: &Fan) -> Fan {
        let (r1, r2) = (f1.dim(), f2.dim());
        let mut rays: Vec<Vec<i64>> = f1
            .rays()
            .iter()
            .map(|r| r.iter().copied().chain(std::iter::repeat_n(0, r2)).collect())
            .collect();
        rays.extend(
            f2.rays()
                .iter()
                .map(|r| std::iter::repeat_n(0, r1).chain(r.iter().copied()).collect()),
        );
        let shift = f1.n_rays();
        let mut cones = Vec::new();
        for c1 in f1.max_cones() {
            for c2 in f2.max_cones() {
                cones.push(c1.iter().copied().chain(c2.iter().map(|j| j + shift)).collect());
            }
        }
        Fan::new(r1 + r2, rays, cones).expect("product of fans is well formed")
    }

    /// `P^2` blown up at `k <= 3` torus-fixed points.
    pub fn blown_up_plane(k: usize) -> Result<Fan> {
        let centers = [[0usize, 1], [1, 2], [0, 2]];
        if k > centers.len() {
            return Err(Error::UnknownFamily(format!("blown_up_plane({k})")));
        }
        let mut f = projective_space(2);
        for c in &centers[..k] {
            f = f.star_subdivision(&StratumId::new(c.to_vec()))?;
        }
        Ok(f)
    }

    /// Resolves a family name and its parameters.
    pub fn by_name(name: &str, params: &[i64]) -> Result<Fan> {
        let need = |n: usize| {
            if params.len() == n {
                Ok(())
            } else {
                Err(Error::MalformedInput(format!(
                    "{name} takes {n} parameter(s), got {}",
                    params.len()
                )))
            }
        };
        match name {
            "projective_space" => {
                need(1)?;
                let r = usize::try_from(params[0])
                    .map_err(|_| Error::MalformedInput("dimension must be nonnegative".into()))?;
                Ok(projective_space(r))
            }
            "hirzebruch" => {
                need(1)?;
                Ok(hirzebruch(params[0]))
            }
            "blown_up_plane" => {
                need(1)?;
                let k = usize::try_from(params[0])
                    .map_err(|_| Error::MalformedInput("point count must be nonnegative".into()))?;
                blown_up_plane(k)
            }
            other => Err(Error::UnknownFamily(other.to_string())),
        }
    }
}
