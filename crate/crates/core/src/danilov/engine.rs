//! Graded Čech complexes on the maximal-cone cover.
//!
//! All sections of `Ω^p(log D') ⊗ O(T)` over a chart `U_tau` at weight `m` live
//! in the constant space `∧^p M_Q` (via the global dlog frame). The space only
//! depends on which margins `c_rho = <m, u_rho> + t_rho` are negative, and which
//! non-log rays have margin exactly zero, so complexes are cached per such
//! pattern and reused across twists.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use num_integer::Integer;

use super::{CohomologyResult, LogFormSheafSpec, WeightMode};
use crate::error::{Error, Result};
use crate::exactmath::{
    cohomology_dims, maximize, polyhedron_bounded, rat, ChainComplex, ExactMatrix, LpOutcome,
    QMatrix, Rational, ZMatrix,
};
use crate::fan::Fan;

/// Per-ray state of a weight: margin `< 0`, `= 0`, or `>= 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct MarginPattern {
    pub negative: u64,
    pub zero: u64,
}

impl MarginPattern {
    pub fn of_margins(margins: &[i64]) -> Self {
        let mut p = MarginPattern { negative: 0, zero: 0 };
        for (i, &c) in margins.iter().enumerate() {
            if c < 0 {
                p.negative |= 1 << i;
            } else if c == 0 {
                p.zero |= 1 << i;
            }
        }
        p
    }

    pub fn describe(&self, n: usize) -> String {
        (0..n)
            .map(|i| {
                if self.negative >> i & 1 == 1 {
                    '-'
                } else if self.zero >> i & 1 == 1 {
                    '0'
                } else {
                    '+'
                }
            })
            .collect()
    }
}

/// `(p, negative rays, zero-margin rays outside the log set)`.
type ComplexKey = (usize, u64, u64);

struct ChartData {
    mask: u64,
    rays: Vec<usize>,
    /// `inverse[j][b]`: column `b` is the dual vector `m_b` of the cone basis.
    inverse: Vec<Vec<i64>>,
}

struct CoverTerm {
    cones: u64,
    tau: u64,
    chart: usize,
}

/// Adjugate data for an `r`-subset of rays with nonzero determinant.
struct VertexSystem {
    rays: Vec<usize>,
    adjugate: Vec<Vec<i128>>,
    det: i128,
}

/// Reusable cohomology engine for one smooth complete fan.
pub struct CohomologyEngine {
    fan: Fan,
    charts: Vec<ChartData>,
    /// Čech index sets grouped by degree (`terms[j]` has `j + 1` cones).
    terms: Vec<Vec<CoverTerm>>,
    term_index: Vec<HashMap<u64, usize>>,
    /// `transition[s][t] = U_t * U_s^{-1}`: `[a][b] = <m_b^s, u_a^t>`.
    transition: Vec<Vec<Vec<Vec<i64>>>>,
    combos: Vec<Vec<Vec<usize>>>,
    vertex_systems: Vec<VertexSystem>,
    complex_cache: Mutex<HashMap<ComplexKey, Arc<Vec<usize>>>>,
    recession_cache: Mutex<HashMap<(u64, u64), bool>>,
    nonzero_cache: Mutex<HashMap<(usize, u64), Arc<NonzeroPatterns>>>,
}

/// Patterns with nonzero cohomology, each with its dims.
type NonzeroPatterns = Vec<(MarginPattern, Arc<Vec<usize>>)>;

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// Exact determinant of a small integer matrix (fraction-free Bareiss).
fn det_i128(mut a: Vec<Vec<i128>>) -> i128 {
    let n = a.len();
    if n == 0 {
        return 1;
    }
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if a[k][k] == 0 {
            match (k + 1..n).find(|&r| a[r][k] != 0) {
                Some(r) => {
                    a.swap(k, r);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
            }
        }
        prev = a[k][k];
    }
    sign * a[n - 1][n - 1]
}

fn minor(m: &[Vec<i64>], rows: &[usize], cols: &[usize]) -> i64 {
    let sub: Vec<Vec<i128>> = rows
        .iter()
        .map(|&r| cols.iter().map(|&c| m[r][c] as i128).collect())
        .collect();
    i64::try_from(det_i128(sub)).expect("minor fits in i64")
}

fn adjugate(u: &[Vec<i64>]) -> Vec<Vec<i128>> {
    let n = u.len();
    let all: Vec<usize> = (0..n).collect();
    let mut adj = vec![vec![0i128; n]; n];
    for i in 0..n {
        for j in 0..n {
            let rows: Vec<usize> = all.iter().copied().filter(|&x| x != j).collect();
            let cols: Vec<usize> = all.iter().copied().filter(|&x| x != i).collect();
            let sign = if (i + j) % 2 == 0 { 1 } else { -1 };
            adj[i][j] = sign * minor(u, &rows, &cols) as i128;
        }
    }
    adj
}

impl CohomologyEngine {
    pub fn new(fan: &Fan) -> Result<Self> {
        fan.require_smooth_complete()?;
        let r = fan.dim();
        let n = fan.n_rays();
        let k = fan.max_cones().len();
        if k > 20 {
            return Err(Error::MalformedInput(format!(
                "{k} maximal cones is beyond the Čech engine's cover size"
            )));
        }

        let charts: Vec<ChartData> = (0..k)
            .map(|s| {
                let u = fan.cone_matrix(s);
                let adj = adjugate(&u);
                let det = det_i128(u.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect());
                let inverse = adj
                    .iter()
                    .map(|row| row.iter().map(|&x| (x * det) as i64).collect())
                    .collect();
                ChartData {
                    mask: fan.cone_mask(s),
                    rays: fan.max_cones()[s].clone(),
                    inverse,
                }
            })
            .collect();

        let transition = (0..k)
            .map(|s| {
                (0..k)
                    .map(|t| {
                        let ut = fan.cone_matrix(t);
                        (0..r)
                            .map(|a| {
                                (0..r)
                                    .map(|b| (0..r).map(|c| ut[a][c] * charts[s].inverse[c][b]).sum())
                                    .collect()
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect();

        let mut terms: Vec<Vec<CoverTerm>> = (0..k).map(|_| Vec::new()).collect();
        for set in 1u64..(1u64 << k) {
            let degree = set.count_ones() as usize - 1;
            let tau = (0..k)
                .filter(|&i| set >> i & 1 == 1)
                .fold(u64::MAX, |acc, i| acc & charts[i].mask);
            let chart = (0..k)
                .find(|&i| charts[i].mask & tau == tau)
                .expect("intersection lies in its first cone");
            terms[degree].push(CoverTerm { cones: set, tau, chart });
        }
        let term_index = terms
            .iter()
            .map(|ts| ts.iter().enumerate().map(|(i, t)| (t.cones, i)).collect())
            .collect();

        let combos = (0..=r).map(|p| subsets(r, p)).collect();

        let vertex_systems = subsets(n, r)
            .into_iter()
            .filter_map(|rays| {
                let u: Vec<Vec<i64>> = rays.iter().map(|&j| fan.ray(j).to_vec()).collect();
                let det = det_i128(u.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect());
                (det != 0).then(|| VertexSystem {
                    adjugate: adjugate(&u),
                    rays,
                    det,
                })
            })
            .collect();

        Ok(CohomologyEngine {
            fan: fan.clone(),
            charts,
            terms,
            term_index,
            transition,
            combos,
            vertex_systems,
            complex_cache: Mutex::new(HashMap::new()),
            recession_cache: Mutex::new(HashMap::new()),
            nonzero_cache: Mutex::new(HashMap::new()),
        })
    }

    /// Process-wide engine for `fan`, so pattern caches survive across calls.
    pub fn shared(fan: &Fan) -> Result<Arc<Self>> {
        static ENGINES: OnceLock<Mutex<HashMap<String, Arc<CohomologyEngine>>>> = OnceLock::new();
        let key = serde_json::to_string(fan)?;
        let engines = ENGINES.get_or_init(Default::default);
        if let Some(e) = engines.lock().unwrap().get(&key) {
            return Ok(e.clone());
        }
        let e = Arc::new(CohomologyEngine::new(fan)?);
        Ok(engines.lock().unwrap().entry(key).or_insert(e).clone())
    }

    pub fn fan(&self) -> &Fan {
        &self.fan
    }

    fn ray_set_mask(&self, rays: &[usize]) -> u64 {
        rays.iter().fold(0u64, |m, &i| m | 1 << i)
    }

    /// Allowed index sets (positions in the chart's cone) for the section space
    /// over `U_tau`.
    fn allowed_sets(&self, p: usize, chart: usize, tau: u64, negative: u64, blocked: u64) -> Vec<&[usize]> {
        if tau & negative != 0 || p > self.fan.dim() {
            return Vec::new();
        }
        let rays = &self.charts[chart].rays;
        let forbidden = tau & blocked;
        self.combos[p]
            .iter()
            .filter(|set| set.iter().all(|&pos| forbidden >> rays[pos] & 1 == 0))
            .map(Vec::as_slice)
            .collect()
    }

    /// The Čech complex for one margin pattern.
    pub fn pattern_complex(&self, p: usize, negative: u64, blocked: u64) -> Result<ChainComplex<ZMatrix>> {
        let bases: Vec<Vec<Vec<&[usize]>>> = self
            .terms
            .iter()
            .map(|ts| {
                ts.iter()
                    .map(|t| self.allowed_sets(p, t.chart, t.tau, negative, blocked))
                    .collect()
            })
            .collect();
        let offsets: Vec<Vec<usize>> = bases
            .iter()
            .map(|bs| {
                let mut acc = 0;
                bs.iter()
                    .map(|b| {
                        let o = acc;
                        acc += b.len();
                        o
                    })
                    .collect()
            })
            .collect();
        let term_dims: Vec<usize> = bases.iter().map(|bs| bs.iter().map(Vec::len).sum()).collect();

        let mut differentials = Vec::with_capacity(self.terms.len().saturating_sub(1));
        for j in 0..self.terms.len().saturating_sub(1) {
            let mut d = ZMatrix::zeros(term_dims[j + 1], term_dims[j]);
            for (ti, target) in self.terms[j + 1].iter().enumerate() {
                let target_basis = &bases[j + 1][ti];
                if target_basis.is_empty() {
                    continue;
                }
                let members: Vec<usize> = (0..64).filter(|&i| target.cones >> i & 1 == 1).collect();
                for (pos, &drop) in members.iter().enumerate() {
                    let source_set = target.cones & !(1u64 << drop);
                    let si = self.term_index[j][&source_set];
                    let source_basis = &bases[j][si];
                    if source_basis.is_empty() {
                        continue;
                    }
                    let sign = if pos % 2 == 0 { 1 } else { -1 };
                    let g = &self.transition[self.terms[j][si].chart][target.chart];
                    for (a, rows) in target_basis.iter().enumerate() {
                        for (b, cols) in source_basis.iter().enumerate() {
                            let v = minor(g, rows, cols);
                            if v != 0 {
                                let (row, col) = (offsets[j + 1][ti] + a, offsets[j][si] + b);
                                d.set(row, col, d.get(row, col) + sign * v);
                            }
                        }
                    }
                }
            }
            differentials.push(d);
        }
        ChainComplex::with_terms(term_dims, differentials)
    }

    /// Per-degree dimensions `h^0..h^r` of one pattern complex (cached).
    pub fn pattern_dims(&self, p: usize, negative: u64, blocked: u64) -> Result<Arc<Vec<usize>>> {
        let key = (p, negative, blocked & !negative);
        if let Some(d) = self.complex_cache.lock().unwrap().get(&key) {
            return Ok(d.clone());
        }
        let complex = self.pattern_complex(p, key.1, key.2)?;
        let mut dims = cohomology_dims(&complex)?;
        let r = self.fan.dim();
        if dims.iter().skip(r + 1).any(|&h| h != 0) {
            return Err(Error::Internal(format!(
                "Čech cohomology above degree {r} for pattern {key:?}: {dims:?}"
            )));
        }
        dims.resize(r + 1, 0);
        let dims = Arc::new(dims);
        self.complex_cache.lock().unwrap().insert(key, dims.clone());
        Ok(dims)
    }

    fn dims_for(&self, spec_p: usize, logset: u64, pat: MarginPattern) -> Result<Arc<Vec<usize>>> {
        self.pattern_dims(spec_p, pat.negative, pat.zero & !logset)
    }

    /// Rows of the pattern's recession cone `{<m,u> <= 0 | = 0 | >= 0}` as `a m <= 0`.
    fn recession_rows(&self, pat: MarginPattern) -> QMatrix {
        let r = self.fan.dim();
        let mut rows = Vec::new();
        for (i, u) in self.fan.rays().iter().enumerate() {
            let up: Vec<Rational> = u.iter().map(|&x| rat(x)).collect();
            let down: Vec<Rational> = u.iter().map(|&x| rat(-x)).collect();
            if pat.negative >> i & 1 == 1 {
                rows.push(up);
            } else if pat.zero >> i & 1 == 1 {
                rows.push(up);
                rows.push(down);
            } else {
                rows.push(down);
            }
        }
        QMatrix::from_rows_with_cols(rows, r)
    }

    fn chamber_bounded(&self, pat: MarginPattern) -> Result<bool> {
        let key = (pat.negative, pat.zero);
        if let Some(&b) = self.recession_cache.lock().unwrap().get(&key) {
            return Ok(b);
        }
        let a = self.recession_rows(pat);
        let zeros = vec![rat(0); a.rows()];
        let bounded = polyhedron_bounded(&a, &zeros)?;
        self.recession_cache.lock().unwrap().insert(key, bounded);
        Ok(bounded)
    }

    /// Patterns with nonzero cohomology for `(p, logset)`, twist-independent.
    fn nonzero_patterns(&self, p: usize, logset: u64) -> Result<Arc<NonzeroPatterns>> {
        if let Some(v) = self.nonzero_cache.lock().unwrap().get(&(p, logset)) {
            return Ok(v.clone());
        }
        let n = self.fan.n_rays();
        let mut out = Vec::new();
        let mut digits = vec![0u8; n];
        loop {
            let mut pat = MarginPattern { negative: 0, zero: 0 };
            for (i, &d) in digits.iter().enumerate() {
                match d {
                    0 => pat.negative |= 1 << i,
                    1 => pat.zero |= 1 << i,
                    _ => {}
                }
            }
            let dims = self.dims_for(p, logset, pat)?;
            if dims.iter().any(|&h| h != 0) {
                if !self.chamber_bounded(pat)? {
                    return Err(Error::UnboundedCohomologyChamber(pat.describe(n)));
                }
                out.push((pat, dims));
            }
            // base-3 increment
            let mut i = 0;
            while i < n && digits[i] == 2 {
                digits[i] = 0;
                i += 1;
            }
            if i == n {
                break;
            }
            digits[i] += 1;
        }
        let out = Arc::new(out);
        self.nonzero_cache.lock().unwrap().insert((p, logset), out.clone());
        Ok(out)
    }

    /// Bound `b_rho` of the hyperplane delimiting ray `rho` in the pattern
    /// (`<m,u> <= b`, `= b`, or `>= b`).
    fn bounds(pat: MarginPattern, twist: &[i64]) -> Vec<i64> {
        twist
            .iter()
            .enumerate()
            .map(|(i, &t)| {
                if pat.negative >> i & 1 == 1 {
                    -1 - t
                } else if pat.zero >> i & 1 == 1 {
                    -t
                } else {
                    1 - t
                }
            })
            .collect()
    }

    fn in_chamber(&self, pat: MarginPattern, twist: &[i64], m: &[i64]) -> bool {
        MarginPattern::of_margins(&self.margins(twist, m)) == pat
    }

    pub fn margins(&self, twist: &[i64], m: &[i64]) -> Vec<i64> {
        self.fan
            .rays()
            .iter()
            .zip(twist)
            .map(|(u, &t)| u.iter().zip(m).map(|(a, b)| a * b).sum::<i64>() + t)
            .collect()
    }

    /// Integer bounding box of the chamber from its vertices; `None` if empty.
    fn chamber_box(&self, pat: MarginPattern, twist: &[i64]) -> Option<Vec<(i64, i64)>> {
        let r = self.fan.dim();
        let b = Self::bounds(pat, twist);
        let mut bbox: Option<Vec<(i64, i64)>> = None;
        for sys in &self.vertex_systems {
            let (sign, den) = if sys.det < 0 { (-1, -sys.det) } else { (1, sys.det) };
            let z: Vec<i128> = (0..r)
                .map(|i| {
                    sign * sys
                        .rays
                        .iter()
                        .enumerate()
                        .map(|(k, &j)| sys.adjugate[i][k] * b[j] as i128)
                        .sum::<i128>()
                })
                .collect();
            let feasible = self.fan.rays().iter().enumerate().all(|(j, u)| {
                let val: i128 = u.iter().zip(&z).map(|(&a, &x)| a as i128 * x).sum();
                let bound = b[j] as i128 * den;
                if pat.negative >> j & 1 == 1 {
                    val <= bound
                } else if pat.zero >> j & 1 == 1 {
                    val == bound
                } else {
                    val >= bound
                }
            });
            if !feasible {
                continue;
            }
            let cell: Vec<(i64, i64)> = z
                .iter()
                .map(|&x| (Integer::div_floor(&x, &den) as i64, -Integer::div_floor(&-x, &den) as i64))
                .collect();
            bbox = Some(match bbox {
                None => cell,
                Some(bb) => bb
                    .into_iter()
                    .zip(cell)
                    .map(|((lo, hi), (l, h))| (lo.min(l), hi.max(h)))
                    .collect(),
            });
        }
        bbox
    }

    fn check_spec(&self, s: &LogFormSheafSpec) -> Result<u64> {
        let n = self.fan.n_rays();
        if s.twist.len() != n {
            return Err(Error::MalformedInput(format!(
                "twist has {} coefficients, fan has {n} rays",
                s.twist.len()
            )));
        }
        if let Some(&j) = s.logset.iter().find(|&&j| j >= n) {
            return Err(Error::MalformedInput(format!("log set refers to missing ray {j}")));
        }
        Ok(self.ray_set_mask(&s.logset))
    }

    pub fn cohomology(&self, s: &LogFormSheafSpec) -> Result<CohomologyResult> {
        self.cohomology_with(s, WeightMode::Chamber)
    }

    pub fn cohomology_with(&self, s: &LogFormSheafSpec, mode: WeightMode) -> Result<CohomologyResult> {
        let logset = self.check_spec(s)?;
        let r = self.fan.dim();
        let mut support: BTreeMap<Vec<i64>, Vec<usize>> = BTreeMap::new();
        match mode {
            WeightMode::Chamber => {
                for (pat, dims) in self.nonzero_patterns(s.p, logset)?.iter() {
                    let Some(bbox) = self.chamber_box(*pat, &s.twist) else {
                        continue;
                    };
                    for_each_point(&bbox, |m| {
                        if self.in_chamber(*pat, &s.twist, m) {
                            support.insert(m.to_vec(), dims.to_vec());
                        }
                    });
                }
            }
            WeightMode::BruteBox { bound } => {
                let bbox = vec![(-bound, bound); r];
                let mut err = None;
                for_each_point(&bbox, |m| {
                    if err.is_some() {
                        return;
                    }
                    let pat = MarginPattern::of_margins(&self.margins(&s.twist, m));
                    match self.dims_for(s.p, logset, pat) {
                        Ok(dims) if dims.iter().any(|&h| h != 0) => {
                            support.insert(m.to_vec(), dims.to_vec());
                        }
                        Ok(_) => {}
                        Err(e) => err = Some(e),
                    }
                });
                if let Some(e) = err {
                    return Err(e);
                }
            }
        }
        Ok(CohomologyResult::from_support(r, support))
    }

    /// Smallest `B` such that `[-B, B]^r` contains every chamber with nonzero
    /// cohomology, found by linear programming over each chamber (a route
    /// independent of the vertex enumeration used by the chamber method).
    pub fn lp_box_bound(&self, s: &LogFormSheafSpec) -> Result<i64> {
        let logset = self.check_spec(s)?;
        let r = self.fan.dim();
        let mut bound = 0i64;
        for (pat, _) in self.nonzero_patterns(s.p, logset)?.iter() {
            let b = Self::bounds(*pat, &s.twist);
            // recession rows have the same left-hand sides as the chamber rows
            let a = self.recession_rows(*pat);
            let mut rhs = Vec::with_capacity(a.rows());
            for (i, &bi) in b.iter().enumerate() {
                if pat.negative >> i & 1 == 1 {
                    rhs.push(rat(bi));
                } else if pat.zero >> i & 1 == 1 {
                    rhs.push(rat(bi));
                    rhs.push(rat(-bi));
                } else {
                    rhs.push(rat(-bi));
                }
            }
            for i in 0..r {
                for sign in [1i64, -1] {
                    let mut c = vec![rat(0); r];
                    c[i] = rat(sign);
                    match maximize(&c, &a, &rhs, true) {
                        LpOutcome::Infeasible => break,
                        LpOutcome::Unbounded => {
                            return Err(Error::UnboundedCohomologyChamber(pat.describe(b.len())))
                        }
                        LpOutcome::Optimal { value, .. } => {
                            let v = crate::exactmath::ceil_i64(&value).unwrap_or(i64::MAX);
                            bound = bound.max(v);
                        }
                    }
                }
            }
        }
        Ok(bound)
    }
}

fn for_each_point(bbox: &[(i64, i64)], mut f: impl FnMut(&[i64])) {
    if bbox.iter().any(|&(lo, hi)| lo > hi) {
        return;
    }
    let mut m: Vec<i64> = bbox.iter().map(|&(lo, _)| lo).collect();
    loop {
        f(&m);
        let mut i = 0;
        loop {
            if i == m.len() {
                return;
            }
            if m[i] < bbox[i].1 {
                m[i] += 1;
                break;
            }
            m[i] = bbox[i].0;
            i += 1;
        }
    }
}
