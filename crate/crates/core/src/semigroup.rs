//! The semigroup `Z x N^k` with an absorbing point at infinity, measures on
//! it, and the convolution projection onto sequences determined by
//! generator images.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Serialize, Serializer};
use serde_json::json;

use crate::error::{Error, Result};
use crate::power::{power_bounded_probe, PowerProbeReport};
use crate::report::{Report, Status, ToReport};
use crate::scalar::Scalar;
use crate::seq::{check_index, Discrepancy, FinSeq};
use crate::sparse::{hausdorff_condition_check, HausdorffReport, SparseFamily};
use crate::xzero::FLOAT_TOL;

/// Largest total count `sum (gamma_i - beta_i)` searched for neighborhood witnesses.
pub const MAX_NEIGHBORHOOD_COUNT: u32 = 6;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SemiElem {
    Finite { t: i64, g: Vec<u32> },
    Infinity,
}

impl SemiElem {
    pub fn finite(t: i64, g: Vec<u32>) -> Self {
        SemiElem::Finite { t, g }
    }

    /// `n -> (n, 0, ..., 0)`.
    pub fn embed(n: i64, k: usize) -> Self {
        SemiElem::Finite { t: n, g: vec![0; k] }
    }

    pub fn zero(k: usize) -> Self {
        SemiElem::embed(0, k)
    }

    /// `e_i` for `i` in `1..=k`.
    pub fn generator(i: usize, k: usize) -> Result<Self> {
        if i == 0 || i > k {
            return Err(Error::Precondition(format!("generator index {i} outside 1..={k}")));
        }
        let mut g = vec![0; k];
        g[i - 1] = 1;
        Ok(SemiElem::Finite { t: 0, g })
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, SemiElem::Infinity)
    }

    pub fn k(&self) -> Option<usize> {
        match self {
            SemiElem::Finite { g, .. } => Some(g.len()),
            SemiElem::Infinity => None,
        }
    }

    pub fn add(&self, other: &SemiElem) -> Result<SemiElem> {
        match (self, other) {
            (SemiElem::Finite { t: s, g: a }, SemiElem::Finite { t, g: b }) => {
                if a.len() != b.len() {
                    return Err(Error::DimensionMismatch {
                        expected: a.len(),
                        got: b.len(),
                    });
                }
                let t = check_index(*s as i128 + *t as i128)?;
                let g = a
                    .iter()
                    .zip(b)
                    .map(|(x, y)| {
                        x.checked_add(*y)
                            .ok_or_else(|| Error::GuardExceeded("exponent overflow".into()))
                    })
                    .collect::<Result<Vec<u32>>>()?;
                Ok(SemiElem::Finite { t, g })
            }
            _ => Ok(SemiElem::Infinity),
        }
    }

    /// Adds the integer `alpha` to the first coordinate.
    pub fn shift(&self, alpha: i64) -> Result<SemiElem> {
        match self {
            SemiElem::Finite { t, g } => Ok(SemiElem::Finite {
                t: check_index(*t as i128 + alpha as i128)?,
                g: g.clone(),
            }),
            SemiElem::Infinity => Ok(SemiElem::Infinity),
        }
    }

    /// `(t, g) -> (-t, g)`, fixing infinity.
    pub fn reflect(&self) -> SemiElem {
        match self {
            SemiElem::Finite { t, g } => SemiElem::Finite { t: -t, g: g.clone() },
            SemiElem::Infinity => SemiElem::Infinity,
        }
    }
}

impl fmt::Display for SemiElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SemiElem::Infinity => write!(f, "inf"),
            SemiElem::Finite { t, g } => {
                write!(f, "({t}")?;
                for x in g {
                    write!(f, ",{x}")?;
                }
                write!(f, ")")
            }
        }
    }
}

impl Serialize for SemiElem {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Finitely supported measure on the semigroup, no zero entries.
#[derive(Clone, Debug, Default)]
pub struct SemiMeasure {
    entries: BTreeMap<SemiElem, Scalar>,
}

impl SemiMeasure {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn delta(g: SemiElem) -> Self {
        Self::single(g, Scalar::one())
    }

    pub fn single(g: SemiElem, c: Scalar) -> Self {
        let mut m = Self::zero();
        m.push(g, c);
        m
    }

    pub fn from_terms<I: IntoIterator<Item = (SemiElem, Scalar)>>(terms: I) -> Self {
        let mut m = Self::zero();
        for (g, c) in terms {
            m.push(g, c);
        }
        m
    }

    fn push(&mut self, g: SemiElem, c: Scalar) {
        let e = self.entries.entry(g.clone()).or_default();
        *e += &c;
        if e.is_zero() {
            self.entries.remove(&g);
        }
    }

    /// `sum_n a(n) delta_(n, 0, ..., 0)`.
    pub fn embed(a: &FinSeq, k: usize) -> Self {
        Self::from_terms(a.iter().map(|(n, v)| (SemiElem::embed(n, k), v.clone())))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&SemiElem, &Scalar)> + '_ {
        self.entries.iter()
    }

    pub fn get(&self, g: &SemiElem) -> Scalar {
        self.entries.get(g).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn infinity_mass(&self) -> Scalar {
        self.get(&SemiElem::Infinity)
    }

    /// Finite part of the decomposition `mu_inf delta_inf + sum mu_g delta_g`.
    pub fn finite_part(&self) -> impl Iterator<Item = (&SemiElem, &Scalar)> + '_ {
        self.entries.iter().filter(|(g, _)| !g.is_infinity())
    }

    pub fn add(&self, other: &SemiMeasure) -> SemiMeasure {
        let mut m = self.clone();
        for (g, c) in other.iter() {
            m.push(g.clone(), c.clone());
        }
        m
    }

    pub fn scale(&self, c: &Scalar) -> SemiMeasure {
        Self::from_terms(self.iter().map(|(g, v)| (g.clone(), v * c)))
    }

    pub fn l1_norm(&self) -> f64 {
        self.entries.values().map(Scalar::abs).sum()
    }

    /// `sum conj(c_g) delta_reflect(g)`.
    pub fn involution(&self) -> SemiMeasure {
        Self::from_terms(self.iter().map(|(g, c)| (g.reflect(), c.conj())))
    }

    pub fn is_exact(&self) -> bool {
        self.entries.values().all(Scalar::is_exact)
    }

    pub fn exactly_equals(&self, other: &SemiMeasure) -> bool {
        self.entries.len() == other.entries.len()
            && self
                .iter()
                .zip(other.iter())
                .all(|((g, a), (h, b))| g == h && a.exactly_equals(b))
    }
}

pub fn convolve_measures(mu: &SemiMeasure, nu: &SemiMeasure) -> Result<SemiMeasure> {
    let mut out = SemiMeasure::zero();
    for (g, a) in mu.iter() {
        for (h, b) in nu.iter() {
            out.push(g.add(h)?, a * b);
        }
    }
    Ok(out)
}

/// Generator images `a_i`, the sparse family `J^(i)` and probe settings.
#[derive(Clone, Debug, Serialize)]
pub struct ProjectionSpec {
    pub images: Vec<FinSeq>,
    pub family: SparseFamily,
    pub probe_depth: u32,
    pub power_bound: f64,
    pub search_bound: u64,
}

impl ProjectionSpec {
    pub fn new(images: Vec<FinSeq>, family: SparseFamily) -> Result<Self> {
        if images.is_empty() {
            return Err(Error::Precondition("k must be positive".into()));
        }
        if family.k() != images.len() {
            return Err(Error::DimensionMismatch {
                expected: images.len(),
                got: family.k(),
            });
        }
        Ok(ProjectionSpec {
            images,
            family,
            probe_depth: 128,
            power_bound: 2.0,
            search_bound: 1 << 16,
        })
    }

    pub fn with_probe(mut self, depth: u32, bound: f64) -> Self {
        self.probe_depth = depth;
        self.power_bound = bound;
        self
    }

    pub fn with_search_bound(mut self, bound: u64) -> Self {
        self.search_bound = bound;
        self
    }

    pub fn k(&self) -> usize {
        self.images.len()
    }

    pub fn is_exact(&self) -> bool {
        self.images.iter().all(FinSeq::is_exact)
    }

    /// Power-boundedness probes for every image plus the family condition.
    pub fn validate(&self) -> Result<SpecValidation> {
        let probes = self
            .images
            .iter()
            .map(|a| power_bounded_probe(a, self.probe_depth, self.power_bound))
            .collect::<Result<Vec<_>>>()?;
        let family = hausdorff_condition_check(&self.family, 16, 4, self.search_bound, None)?;
        Ok(SpecValidation { probes, family })
    }

    /// `K = max_{i, m <= M} ||a_i^m||_1` from the probes.
    pub fn probed_constant(&self) -> Result<f64> {
        Ok(self
            .validate()?
            .probes
            .iter()
            .map(|p| p.max_l1)
            .fold(0.0, f64::max))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SpecValidation {
    pub probes: Vec<PowerProbeReport>,
    pub family: HausdorffReport,
}

impl SpecValidation {
    pub fn holds(&self) -> bool {
        self.probes.iter().all(PowerProbeReport::holds) && self.family.certified()
    }

    pub fn constant(&self) -> f64 {
        self.probes.iter().map(|p| p.max_l1).fold(0.0, f64::max)
    }
}

impl ToReport for SpecValidation {
    fn to_report(&self) -> Report {
        let mut r = Report::new("projection-spec", Status::evidence(self.holds()))
            .param("k", self.probes.len())
            .detail("probed_constant", self.constant())
            .detail("family_threshold", self.family.threshold)
            .detail("note", "power bounds and family separation are finite evidence");
        for (i, p) in self.probes.iter().enumerate() {
            if let Some(m) = p.first_violation {
                r = r.witness(json!({ "image": i + 1, "m": m, "bound": p.bound }));
            }
        }
        if let Some((x, i, j)) = self.family.overlap {
            r = r.witness(json!({ "shared_member": x, "sets": [i, j] }));
        } else if !self.family.certified() {
            r = r.witness(&self.family.threshold_witness);
        }
        r.finalize()
    }
}

/// Memoized products `prod_j a_j^{g_j}`.
struct ImageCache<'a> {
    images: &'a [FinSeq],
    powers: HashMap<(usize, u32), FinSeq>,
}

impl<'a> ImageCache<'a> {
    fn new(images: &'a [FinSeq]) -> Self {
        ImageCache {
            images,
            powers: HashMap::new(),
        }
    }

    fn power(&mut self, j: usize, e: u32) -> Result<FinSeq> {
        if let Some(p) = self.powers.get(&(j, e)) {
            return Ok(p.clone());
        }
        let p = self.images[j].power(e)?;
        self.powers.insert((j, e), p.clone());
        Ok(p)
    }

    fn image(&mut self, g: &SemiElem) -> Result<FinSeq> {
        match g {
            SemiElem::Infinity => Ok(FinSeq::zero()),
            SemiElem::Finite { t, g } => {
                if g.len() != self.images.len() {
                    return Err(Error::DimensionMismatch {
                        expected: self.images.len(),
                        got: g.len(),
                    });
                }
                let mut acc = FinSeq::delta(*t);
                for (j, e) in g.iter().enumerate() {
                    if *e > 0 {
                        acc = acc.convolve(&self.power(j, *e)?)?;
                    }
                }
                Ok(acc)
            }
        }
    }
}

/// `sum_g mu_g shift(prod_j a_j^{g_j}, g_0)`; the mass at infinity is dropped.
pub fn theta(mu: &SemiMeasure, spec: &ProjectionSpec) -> Result<FinSeq> {
    let mut cache = ImageCache::new(&spec.images);
    theta_cached(mu, &mut cache)
}

fn theta_cached(mu: &SemiMeasure, cache: &mut ImageCache<'_>) -> Result<FinSeq> {
    let mut acc = FinSeq::zero();
    for (g, c) in mu.finite_part() {
        acc = acc.add(&cache.image(g)?.scale(c));
    }
    Ok(acc)
}

pub fn theta_delta(g: &SemiElem, spec: &ProjectionSpec) -> Result<FinSeq> {
    ImageCache::new(&spec.images).image(g)
}

fn agree(a: &FinSeq, b: &FinSeq) -> Discrepancy {
    a.distance(b)
}

/// Random measure with at most `max_support` atoms, rational coefficients.
pub fn random_measure<R: Rng>(rng: &mut R, k: usize, max_support: usize) -> SemiMeasure {
    let n = rng.gen_range(1..=max_support);
    SemiMeasure::from_terms((0..n).map(|_| {
        let g = if rng.gen_ratio(1, 8) {
            SemiElem::Infinity
        } else {
            SemiElem::finite(rng.gen_range(-8..=8), (0..k).map(|_| rng.gen_range(0..=3)).collect())
        };
        let mut p: i64 = rng.gen_range(-9..=9);
        if p == 0 {
            p = 1;
        }
        (g, Scalar::ratio(p, rng.gen_range(1..=8)))
    }))
}

fn random_finseq<R: Rng>(rng: &mut R, max_support: usize) -> FinSeq {
    let n = rng.gen_range(1..=max_support);
    FinSeq::from_entries((0..n).map(|_| {
        (
            rng.gen_range(-12..=12),
            Scalar::ratio(rng.gen_range(-9..=9), rng.gen_range(1..=8)),
        )
    }))
    .expect("small indices")
}

#[derive(Clone, Debug, Serialize)]
pub struct ThetaReport {
    pub k: usize,
    pub trials: usize,
    pub seed: u64,
    pub exact_mode: bool,
    pub homomorphism: Discrepancy,
    pub projection: Discrepancy,
    pub infinity_killed: bool,
    /// Worst homomorphism trial as `(mu, nu)` in display form.
    pub worst_trial: Option<(String, String)>,
}

impl ThetaReport {
    pub fn passed(&self) -> bool {
        self.homomorphism.within(self.exact_mode, FLOAT_TOL)
            && self.projection.within(self.exact_mode, FLOAT_TOL)
            && self.infinity_killed
    }
}

impl ToReport for ThetaReport {
    fn to_report(&self) -> Report {
        let mut r = Report::new("theta-homomorphism", Status::from_pass(self.passed()))
            .param("k", self.k)
            .param("trials", self.trials)
            .param("seed", self.seed)
            .max_error(self.homomorphism.max_abs.max(self.projection.max_abs))
            .detail("exact_mode", self.exact_mode)
            .detail("homomorphism", self.homomorphism)
            .detail("projection", self.projection)
            .detail("infinity_killed", self.infinity_killed);
        if !self.passed() {
            if let Some((mu, nu)) = &self.worst_trial {
                r = r.witness(json!({ "mu": mu, "nu": nu }));
            }
        }
        r.finalize()
    }
}

fn measure_string(mu: &SemiMeasure) -> String {
    let parts: Vec<String> = mu.iter().map(|(g, c)| format!("{c}*{g}")).collect();
    parts.join(" + ")
}

/// Random trials of `theta(mu * nu) = theta(mu) * theta(nu)` and
/// `theta(embed(a)) = a`, plus the fixed cases `e_1 * e_1` and `delta_inf`.
pub fn theta_homomorphism_check(spec: &ProjectionSpec, trials: usize, seed: u64) -> Result<ThetaReport> {
    let k = spec.k();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cache = ImageCache::new(&spec.images);
    let mut homomorphism = Discrepancy::zero();
    let mut projection = Discrepancy::zero();
    let mut worst_trial = None;
    let mut worst = -1.0;
    let mut pairs = vec![
        (
            SemiMeasure::delta(SemiElem::generator(1, k)?),
            SemiMeasure::delta(SemiElem::generator(1, k)?),
        ),
        (SemiMeasure::delta(SemiElem::Infinity), random_measure(&mut rng, k, 6)),
    ];
    for _ in 0..trials {
        pairs.push((random_measure(&mut rng, k, 6), random_measure(&mut rng, k, 6)));
    }
    for (mu, nu) in &pairs {
        let lhs = theta_cached(&convolve_measures(mu, nu)?, &mut cache)?;
        let rhs = theta_cached(mu, &mut cache)?.convolve(&theta_cached(nu, &mut cache)?)?;
        let d = agree(&lhs, &rhs);
        if d.max_abs > worst || (!d.exact && worst_trial.is_none()) {
            worst = d.max_abs;
            worst_trial = Some((measure_string(mu), measure_string(nu)));
        }
        homomorphism.merge(&d);
    }
    let mut samples: Vec<FinSeq> = spec.images.clone();
    for _ in 0..trials {
        samples.push(random_finseq(&mut rng, 6));
    }
    for a in &samples {
        projection.merge(&agree(&theta_cached(&SemiMeasure::embed(a, k), &mut cache)?, a));
    }
    let infinity_killed = theta_cached(&SemiMeasure::delta(SemiElem::Infinity), &mut cache)?.is_zero();
    Ok(ThetaReport {
        k,
        trials,
        seed,
        exact_mode: spec.is_exact(),
        homomorphism,
        projection,
        infinity_killed,
        worst_trial,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct KernelGenerator {
    pub gamma: SemiElem,
    #[serde(serialize_with = "serialize_measure")]
    pub measure: SemiMeasure,
    pub residual: FinSeq,
}

fn serialize_measure<S: Serializer>(mu: &SemiMeasure, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&measure_string(mu))
}

impl KernelGenerator {
    pub fn killed(&self) -> bool {
        self.residual.is_zero()
    }
}

/// `delta_g - embed(theta(delta_g))` for each `g`, with `theta` of the result.
pub fn kernel_generators(spec: &ProjectionSpec, gammas: &[SemiElem]) -> Result<Vec<KernelGenerator>> {
    let k = spec.k();
    let mut cache = ImageCache::new(&spec.images);
    gammas
        .iter()
        .map(|g| {
            if g.is_infinity() {
                return Err(Error::Precondition("kernel generators need finite elements".into()));
            }
            let image = cache.image(g)?;
            let measure = SemiMeasure::delta(g.clone()).add(&SemiMeasure::embed(&image, k).scale(&Scalar::int(-1)));
            let residual = theta_cached(&measure, &mut cache)?;
            Ok(KernelGenerator {
                gamma: g.clone(),
                measure,
                residual,
            })
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct KernelReport {
    pub generators: Vec<KernelGenerator>,
}

impl KernelReport {
    pub fn all_killed(&self) -> bool {
        self.generators.iter().all(KernelGenerator::killed)
    }
}

impl ToReport for KernelReport {
    fn to_report(&self) -> Report {
        let mut r = Report::new("kernel-generators", Status::from_pass(self.all_killed()))
            .param("count", self.generators.len())
            .max_error(self.generators.iter().map(|g| g.residual.sup_norm()).fold(0.0, f64::max));
        for g in self.generators.iter().filter(|g| !g.killed()) {
            r = r.witness(json!({ "gamma": g.gamma, "residual": g.residual }));
        }
        r.finalize()
    }
}

/// `k eps K^k (K^k + 1)` with `K^k` standing in for the projection norm.
pub fn kernel_tail_bound(k: usize, constant: f64, eps: f64) -> f64 {
    let norm = constant.powi(k as i32);
    k as f64 * eps * norm * (norm + 1.0)
}

#[derive(Clone, Debug, Serialize)]
pub struct NeighborhoodSpec {
    pub gamma: SemiElem,
    pub n: u64,
    pub bound: u64,
}

impl NeighborhoodSpec {
    pub fn new(gamma: SemiElem, n: u64, bound: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Precondition("neighborhood index n must be at least 1".into()));
        }
        if gamma.is_infinity() {
            return Err(Error::Precondition("neighborhood center must be finite".into()));
        }
        Ok(NeighborhoodSpec { gamma, n, bound })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Membership {
    pub member: bool,
    /// `j^(i)` lists, increasing absolute values, when a member.
    pub witness: Option<Vec<Vec<i64>>>,
}

impl Membership {
    fn no() -> Self {
        Membership {
            member: false,
            witness: None,
        }
    }
}

/// Searches for `j^(i)` in `J^(i)` with `n < |j_1^(i)| < |j_2^(i)| < ...`,
/// `gamma_i - beta_i` entries each, and `beta_0 = gamma_0 + sum j`.
pub fn neighborhood_member(beta: &SemiElem, nb: &NeighborhoodSpec, family: &SparseFamily) -> Result<Membership> {
    let (SemiElem::Finite { t: g0, g: gs }, k) = (&nb.gamma, family.k()) else {
        return Err(Error::Precondition("neighborhood center must be finite".into()));
    };
    if gs.len() != k {
        return Err(Error::DimensionMismatch {
            expected: k,
            got: gs.len(),
        });
    }
    let SemiElem::Finite { t: b0, g: bs } = beta else {
        return Ok(Membership::no());
    };
    if bs.len() != k {
        return Err(Error::DimensionMismatch {
            expected: k,
            got: bs.len(),
        });
    }
    if bs.iter().zip(gs).any(|(b, g)| b > g) {
        return Ok(Membership::no());
    }
    let counts: Vec<usize> = gs.iter().zip(bs).map(|(g, b)| (g - b) as usize).collect();
    let total: usize = counts.iter().sum();
    if total > MAX_NEIGHBORHOOD_COUNT as usize {
        return Err(Error::GuardExceeded(format!(
            "sum of gamma_i - beta_i is {total}, limit {MAX_NEIGHBORHOOD_COUNT}"
        )));
    }
    let target = *b0 as i128 - *g0 as i128;
    let pools: Vec<Vec<i64>> = family
        .sets
        .iter()
        .map(|s| {
            let mut v: Vec<i64> = s
                .members(nb.bound)
                .into_iter()
                .map(|(_, x)| x)
                .filter(|x| x.unsigned_abs() > nb.n)
                .collect();
            v.sort_by_key(|x| (x.unsigned_abs(), *x));
            v
        })
        .collect();
    let mut chosen: Vec<Vec<i64>> = vec![Vec::new(); k];
    if search(&pools, &counts, 0, 0, target, &mut chosen) {
        Ok(Membership {
            member: true,
            witness: Some(chosen),
        })
    } else {
        Ok(Membership::no())
    }
}

fn search(
    pools: &[Vec<i64>],
    counts: &[usize],
    i: usize,
    start: usize,
    remaining: i128,
    chosen: &mut Vec<Vec<i64>>,
) -> bool {
    if i == pools.len() {
        return remaining == 0;
    }
    let need = counts[i] - chosen[i].len();
    if need == 0 {
        return search(pools, counts, i + 1, 0, remaining, chosen);
    }
    let pool = &pools[i];
    for idx in start..pool.len() {
        let v = pool[idx];
        if let Some(last) = chosen[i].last() {
            if last.unsigned_abs() >= v.unsigned_abs() {
                continue;
            }
        }
        if pool.len() - idx < need {
            break;
        }
        chosen[i].push(v);
        if search(pools, counts, i, idx + 1, remaining - v as i128, chosen) {
            return true;
        }
        chosen[i].pop();
    }
    false
}

#[derive(Clone, Debug, Serialize)]
pub struct TopologyReport {
    pub cells: usize,
    pub members: usize,
    pub seed: u64,
    pub shift_failures: Vec<String>,
    pub monotone_failures: Vec<String>,
}

impl TopologyReport {
    pub fn passed(&self) -> bool {
        self.shift_failures.is_empty() && self.monotone_failures.is_empty()
    }
}

impl ToReport for TopologyReport {
    fn to_report(&self) -> Report {
        let mut r = Report::new("neighborhood-topology", Status::from_pass(self.passed()))
            .param("cells", self.cells)
            .param("seed", self.seed)
            .detail("members", self.members);
        for w in self.shift_failures.iter().chain(&self.monotone_failures).take(8) {
            r = r.witness(w);
        }
        r.finalize()
    }
}

/// Samples `(beta, gamma, n)` cells, about half constructed as members, and
/// checks shift-equivariance `V_(g,n) + a = V_(g+a,n)` and monotonicity in `n`.
pub fn topology_check(spec: &ProjectionSpec, cells: usize, seed: u64) -> Result<TopologyReport> {
    let k = spec.k();
    let family = &spec.family;
    let bound = spec.search_bound;
    let pools: Vec<Vec<i64>> = family.sets.iter().map(|s| s.enumerate(bound)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = TopologyReport {
        cells,
        members: 0,
        seed,
        shift_failures: Vec::new(),
        monotone_failures: Vec::new(),
    };
    for _ in 0..cells {
        let g: Vec<u32> = (0..k).map(|_| rng.gen_range(0..=2)).collect();
        let g0: i64 = rng.gen_range(-20..=20);
        let mut b: Vec<u32> = g.clone();
        let mut b0 = g0;
        for i in 0..k {
            let d = rng.gen_range(0..=g[i]);
            b[i] -= d;
            let mut picked: Vec<u64> = Vec::new();
            for _ in 0..d {
                if pools[i].is_empty() {
                    break;
                }
                let x = pools[i][rng.gen_range(0..pools[i].len())];
                if !picked.contains(&x.unsigned_abs()) {
                    picked.push(x.unsigned_abs());
                    b0 += x;
                }
            }
        }
        if rng.gen_bool(0.25) {
            b0 += rng.gen_range(-3..=3);
        }
        let n: u64 = 1 << rng.gen_range(0..10);
        let gamma = SemiElem::finite(g0, g);
        let beta = SemiElem::finite(b0, b);
        let alpha: i64 = rng.gen_range(-1000..=1000);
        let base = neighborhood_member(&beta, &NeighborhoodSpec::new(gamma.clone(), n, bound)?, family)?;
        let shifted = neighborhood_member(
            &beta.shift(alpha)?,
            &NeighborhoodSpec::new(gamma.shift(alpha)?, n, bound)?,
            family,
        )?;
        if base.member {
            report.members += 1;
        }
        if base.member != shifted.member {
            report
                .shift_failures
                .push(format!("beta={beta} gamma={gamma} n={n} alpha={alpha}"));
        }
        let finer = neighborhood_member(&beta, &NeighborhoodSpec::new(gamma.clone(), 2 * n, bound)?, family)?;
        if finer.member && !base.member {
            report.monotone_failures.push(format!("beta={beta} gamma={gamma} n={n}"));
        }
    }
    Ok(report)
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct LimitParams {
    /// Number of doubling thresholds `base, 2 base, ...`.
    pub depth: u32,
    pub base: u64,
    /// Trailing members required inside each neighborhood.
    pub min_tail: usize,
    pub max_count: u32,
}

impl Default for LimitParams {
    fn default() -> Self {
        LimitParams {
            depth: 10,
            base: 1,
            min_tail: 3,
            max_count: MAX_NEIGHBORHOOD_COUNT,
        }
    }
}

impl LimitParams {
    pub fn thresholds(&self) -> Vec<u64> {
        (0..self.depth).map(|d| self.base << d).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "kind", content = "value")]
pub enum Limit {
    Converges(SemiElem),
    Divergent,
}

#[derive(Clone, Debug, Serialize)]
pub struct LimitPrediction {
    pub limit: Limit,
    pub predicted: Option<FinSeq>,
    /// Per threshold, the first index from which every member lies in the neighborhood.
    pub tail_starts: Vec<(u64, Option<usize>)>,
    /// Largest `n` keeping the trailing members in `V_(limit, n)`.
    pub separation: u64,
    pub runner_up: Option<(SemiElem, u64)>,
    pub candidates: usize,
}

impl ToReport for LimitPrediction {
    fn to_report(&self) -> Report {
        let ok = matches!(self.limit, Limit::Converges(_));
        let mut r = Report::new("limit-predict", Status::evidence(ok))
            .detail("limit", &self.limit)
            .detail("predicted", &self.predicted)
            .detail("tail_starts", &self.tail_starts)
            .detail("separation", self.separation)
            .detail("candidates", self.candidates);
        if let Some((g, s)) = &self.runner_up {
            r = r.detail("runner_up", json!({ "gamma": g, "separation": s }));
        }
        r.finalize()
    }
}

fn member_at(beta: &SemiElem, gamma: &SemiElem, n: u64, bound: u64, family: &SparseFamily) -> Result<bool> {
    Ok(neighborhood_member(beta, &NeighborhoodSpec::new(gamma.clone(), n.max(1), bound)?, family)?.member)
}

/// Largest `n <= bound` with every member of `tail` in `V_(gamma, n)`, zero if none.
fn separation(tail: &[SemiElem], gamma: &SemiElem, bound: u64, family: &SparseFamily) -> Result<u64> {
    for b in tail {
        if !member_at(b, gamma, 1, bound, family)? {
            return Ok(0);
        }
    }
    let (mut lo, mut hi) = (1u64, bound);
    while lo < hi {
        let mid = lo + (hi - lo).div_ceil(2);
        let mut all = true;
        for b in tail {
            if !member_at(b, gamma, mid, bound, family)? {
                all = false;
                break;
            }
        }
        if all {
            lo = mid;
        } else {
            hi = mid - 1;
        }
    }
    Ok(lo)
}

/// Candidate limits `(beta_0 - sum j, beta_i + d_i)` for decompositions of
/// the last member using `|j| > n_min`.
fn candidates(last: &SemiElem, family: &SparseFamily, n_min: u64, bound: u64, max_count: u32) -> Vec<SemiElem> {
    let SemiElem::Finite { t, g } = last else {
        return vec![SemiElem::Infinity];
    };
    let pools: Vec<Vec<i64>> = family
        .sets
        .iter()
        .map(|s| {
            let mut v: Vec<i64> = s
                .members(bound)
                .into_iter()
                .map(|(_, x)| x)
                .filter(|x| x.unsigned_abs() > n_min)
                .collect();
            v.sort_by_key(|x| (x.unsigned_abs(), *x));
            v
        })
        .collect();
    let mut out = Vec::new();
    #[allow(clippy::too_many_arguments)]
    fn rec(
        pools: &[Vec<i64>],
        i: usize,
        start: usize,
        left: u32,
        t: i128,
        g: &mut Vec<u32>,
        last_abs: u64,
        out: &mut Vec<SemiElem>,
    ) {
        if i == pools.len() {
            if let Ok(t) = check_index(t) {
                out.push(SemiElem::finite(t, g.clone()));
            }
            return;
        }
        rec(pools, i + 1, 0, left, t, g, 0, out);
        if left == 0 {
            return;
        }
        for idx in start..pools[i].len() {
            let v = pools[i][idx];
            if v.unsigned_abs() <= last_abs {
                continue;
            }
            g[i] += 1;
            rec(pools, i, idx + 1, left - 1, t - v as i128, g, v.unsigned_abs(), out);
            g[i] -= 1;
        }
    }
    let mut gv = g.clone();
    rec(&pools, 0, 0, max_count, *t as i128, &mut gv, 0, &mut out);
    out.sort();
    out.dedup();
    out
}

/// Identifies the limit of `seq` in the semigroup topology and returns
/// `theta(delta_limit)`. The limit must keep the last `min_tail` members in
/// `V_(limit, n)` at every threshold and separate strictly better than any
/// other candidate, ties broken by the depths of the latest members. Its
/// offset must stay below the depth reached by the last member.
pub fn limit_predict(seq: &[SemiElem], spec: &ProjectionSpec, params: &LimitParams) -> Result<LimitPrediction> {
    let thresholds = params.thresholds();
    let n_top = *thresholds.last().unwrap_or(&1);
    let bound = spec.search_bound;
    let divergent = |cands: usize| LimitPrediction {
        limit: Limit::Divergent,
        predicted: None,
        tail_starts: thresholds.iter().map(|n| (*n, None)).collect(),
        separation: 0,
        runner_up: None,
        candidates: cands,
    };
    if seq.len() < params.min_tail {
        return Ok(divergent(0));
    }
    let tail = &seq[seq.len() - params.min_tail..];
    let last = tail.last().expect("nonempty");
    if last.is_infinity() {
        return Ok(divergent(0));
    }
    let cands = candidates(last, &spec.family, n_top, bound, params.max_count);
    // Per-member depths, latest first. A candidate built on a fixed large
    // member can match the true limit on the earliest depths but not on the
    // latest ones, where the depth of a convergent sequence keeps growing.
    let mut scored: Vec<(SemiElem, u64, Vec<u64>)> = Vec::new();
    for c in &cands {
        let s = separation(tail, c, bound, &spec.family)?;
        if s >= n_top {
            let mut depths = Vec::with_capacity(tail.len());
            for b in tail.iter().rev() {
                depths.push(separation(std::slice::from_ref(b), c, bound, &spec.family)?);
            }
            // An offset at or beyond the latest depth cannot be told apart
            // from a member pinned inside every decomposition.
            if offset(c).unsigned_abs() < depths[0] {
                scored.push((c.clone(), s, depths));
            }
        }
    }
    scored.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| b.2.cmp(&a.2)).then_with(|| a.0.cmp(&b.0)));
    let Some((best, sep, depths)) = scored.first().cloned() else {
        return Ok(divergent(cands.len()));
    };
    let runner_up = scored.get(1).map(|r| (r.0.clone(), r.1));
    if scored.get(1).is_some_and(|r| r.1 == sep && r.2 == depths) {
        let mut d = divergent(cands.len());
        d.runner_up = runner_up;
        return Ok(d);
    }
    let mut tail_starts = Vec::new();
    for &n in &thresholds {
        let mut start = None;
        for idx in (0..seq.len()).rev() {
            if member_at(&seq[idx], &best, n, bound, &spec.family)? {
                start = Some(idx);
            } else {
                break;
            }
        }
        tail_starts.push((n, start));
    }
    let predicted = theta_delta(&best, spec)?;
    Ok(LimitPrediction {
        limit: Limit::Converges(best),
        predicted: Some(predicted),
        tail_starts,
        separation: sep,
        runner_up,
        candidates: cands.len(),
    })
}

fn offset(g: &SemiElem) -> i64 {
    match g {
        SemiElem::Finite { t, .. } => *t,
        SemiElem::Infinity => 0,
    }
}

pub fn embed_sequence(values: &[i64], k: usize) -> Vec<SemiElem> {
    values.iter().map(|n| SemiElem::embed(*n, k)).collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct InvolutionReport {
    pub trials: usize,
    pub seed: u64,
    pub exact_mode: bool,
    pub discrepancy: Discrepancy,
}

impl InvolutionReport {
    pub fn passed(&self) -> bool {
        self.discrepancy.within(self.exact_mode, FLOAT_TOL)
    }
}

impl ToReport for InvolutionReport {
    fn to_report(&self) -> Report {
        Report::new("theta-involution", Status::from_pass(self.passed()))
            .param("trials", self.trials)
            .param("seed", self.seed)
            .max_error(self.discrepancy.max_abs)
            .detail("exact_mode", self.exact_mode)
            .detail("discrepancy", self.discrepancy)
            .finalize()
    }
}

/// Random trials of `theta(mu*) = theta(mu)*`; needs symmetric sets and
/// self-adjoint images.
pub fn involution_check(spec: &ProjectionSpec, trials: usize, seed: u64) -> Result<InvolutionReport> {
    for (i, s) in spec.family.sets.iter().enumerate() {
        if let Some(x) = s.asymmetric_member(spec.search_bound) {
            return Err(Error::Precondition(format!(
                "set {} ({s}) is not symmetric: {x} present without {}",
                i + 1,
                -x
            )));
        }
    }
    for (i, a) in spec.images.iter().enumerate() {
        let d = a.distance(&a.involution());
        if !d.within(a.is_exact(), FLOAT_TOL) {
            return Err(Error::Precondition(format!("image a_{} is not self-adjoint: {a}", i + 1)));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cache = ImageCache::new(&spec.images);
    let mut discrepancy = Discrepancy::zero();
    for _ in 0..trials {
        let mu = random_measure(&mut rng, spec.k(), 6);
        let lhs = theta_cached(&mu.involution(), &mut cache)?;
        let rhs = theta_cached(&mu, &mut cache)?.involution();
        discrepancy.merge(&lhs.distance(&rhs));
    }
    Ok(InvolutionReport {
        trials,
        seed,
        exact_mode: spec.is_exact(),
        discrepancy,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct IdempotentRow {
    pub gamma: SemiElem,
    pub idempotent: bool,
    pub expected: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct IdempotentReport {
    pub rows: Vec<IdempotentRow>,
    /// Sampled pairs with equal images.
    pub collisions: Vec<(SemiElem, SemiElem)>,
}

impl IdempotentReport {
    pub fn violations(&self) -> Vec<&IdempotentRow> {
        self.rows.iter().filter(|r| r.idempotent != r.expected).collect()
    }

    pub fn passed(&self) -> bool {
        self.violations().is_empty()
    }
}

impl ToReport for IdempotentReport {
    fn to_report(&self) -> Report {
        let mut r = Report::new("idempotent-scan", Status::from_pass(self.passed()))
            .param("samples", self.rows.len())
            .detail("idempotents", self.rows.iter().filter(|r| r.idempotent).count())
            .detail("injective_on_samples", self.collisions.is_empty())
            .detail("collisions", &self.collisions);
        for v in self.violations() {
            r = r.witness(v);
        }
        r.finalize()
    }
}

/// Tests `theta(delta_g)^2 = theta(delta_g)`; only zero and infinity are expected.
pub fn idempotent_scan(spec: &ProjectionSpec, samples: &[SemiElem]) -> Result<IdempotentReport> {
    let mut cache = ImageCache::new(&spec.images);
    let exact = spec.is_exact();
    let zero = SemiElem::zero(spec.k());
    let mut rows = Vec::new();
    let mut images: Vec<(SemiElem, FinSeq)> = Vec::new();
    for g in samples {
        let v = cache.image(g)?;
        let sq = v.convolve(&v)?;
        let idempotent = sq.distance(&v).within(exact, FLOAT_TOL);
        rows.push(IdempotentRow {
            gamma: g.clone(),
            idempotent,
            expected: g.is_infinity() || *g == zero,
        });
        images.push((g.clone(), v));
    }
    let mut collisions = Vec::new();
    for i in 0..images.len() {
        for j in i + 1..images.len() {
            if images[i].0 != images[j].0 && images[i].1.distance(&images[j].1).within(exact, FLOAT_TOL) {
                collisions.push((images[i].0.clone(), images[j].0.clone()));
            }
        }
    }
    Ok(IdempotentReport { rows, collisions })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::power::binomial_element;
    use crate::sparse::{disjoint_family, SparseSet};
    use crate::xzero::LambdaParam;

    fn fin(t: i64, g: &[u32]) -> SemiElem {
        SemiElem::finite(t, g.to_vec())
    }

    fn binomial_spec() -> ProjectionSpec {
        let fam = disjoint_family(&SparseSet::powers(2).unwrap(), 1).unwrap();
        ProjectionSpec::new(vec![binomial_element()], fam).unwrap()
    }

    fn example_spec() -> ProjectionSpec {
        let lambda = LambdaParam::int(2);
        let fam = disjoint_family(&SparseSet::powers(2).unwrap(), 1).unwrap();
        ProjectionSpec::new(vec![FinSeq::single(0, lambda.inv().clone())], fam).unwrap()
    }

    #[test]
    fn arithmetic() {
        assert_eq!(fin(1, &[2]).add(&fin(3, &[0])).unwrap(), fin(4, &[2]));
        assert_eq!(SemiElem::Infinity.add(&fin(5, &[1])).unwrap(), SemiElem::Infinity);
        let e1 = SemiElem::generator(1, 1).unwrap();
        assert_eq!(e1.add(&e1).unwrap(), fin(0, &[2]));
        assert!(fin(0, &[1]).add(&fin(0, &[1, 1])).is_err());
    }

    #[test]
    fn measure_convolution() {
        let c = convolve_measures(
            &SemiMeasure::delta(fin(1, &[0])),
            &SemiMeasure::delta(fin(2, &[3])),
        )
        .unwrap();
        assert!(c.exactly_equals(&SemiMeasure::delta(fin(3, &[3]))));
        let c = convolve_measures(
            &SemiMeasure::delta(SemiElem::Infinity),
            &SemiMeasure::delta(fin(2, &[3])),
        )
        .unwrap();
        assert!(c.exactly_equals(&SemiMeasure::delta(SemiElem::Infinity)));
        let a = binomial_element();
        let b = FinSeq::from_entries([(-1, Scalar::int(3)), (4, Scalar::ratio(1, 3))]).unwrap();
        let c = convolve_measures(&SemiMeasure::embed(&a, 2), &SemiMeasure::embed(&b, 2)).unwrap();
        assert!(c.exactly_equals(&SemiMeasure::embed(&a.convolve(&b).unwrap(), 2)));
    }

    #[test]
    fn theta_examples() {
        let spec = example_spec();
        let out = theta(&SemiMeasure::delta(fin(0, &[1])), &spec).unwrap();
        assert_eq!(out, FinSeq::single(0, Scalar::ratio(1, 2)));
        assert!(theta(&SemiMeasure::delta(SemiElem::Infinity), &spec).unwrap().is_zero());
        let spec = binomial_spec();
        let out = theta(&SemiMeasure::delta(fin(1, &[2])), &spec).unwrap();
        let expect = FinSeq::from_entries([
            (1, Scalar::ratio(1, 4)),
            (2, Scalar::ratio(1, 2)),
            (3, Scalar::ratio(1, 4)),
        ])
        .unwrap();
        assert_eq!(out, expect);
    }

    #[test]
    fn homomorphism_exact() {
        let r = theta_homomorphism_check(&binomial_spec(), 100, 0).unwrap();
        assert!(r.passed(), "{r:?}");
        assert!(r.homomorphism.exact && r.projection.exact);
    }

    #[test]
    fn kernel() {
        let spec = binomial_spec();
        let gens = kernel_generators(&spec, &[fin(0, &[1]), fin(3, &[0]), fin(1, &[2])]).unwrap();
        assert!(gens.iter().all(KernelGenerator::killed));
        assert!(gens[1].measure.is_zero());
        assert_eq!(kernel_tail_bound(1, 1.0, 0.01), 0.02);
        assert_eq!(kernel_tail_bound(2, 1.0, 0.01), 0.04);
        assert_eq!(kernel_tail_bound(1, 1.0, 0.0), 0.0);
    }

    #[test]
    fn neighborhoods() {
        let fam = disjoint_family(&SparseSet::powers(2).unwrap(), 1).unwrap();
        let nb = NeighborhoodSpec::new(fin(0, &[1]), 4, 1 << 16).unwrap();
        let m = neighborhood_member(&fin(32, &[0]), &nb, &fam).unwrap();
        assert_eq!(m.witness, Some(vec![vec![32]]));
        let m = neighborhood_member(&fin(0, &[1]), &nb, &fam).unwrap();
        assert_eq!(m.witness, Some(vec![vec![]]));
        assert!(!neighborhood_member(&fin(0, &[2]), &nb, &fam).unwrap().member);
        assert!(!neighborhood_member(&fin(4, &[0]), &nb, &fam).unwrap().member);
        let nb = NeighborhoodSpec::new(fin(0, &[7]), 4, 1 << 16).unwrap();
        assert!(matches!(
            neighborhood_member(&fin(0, &[0]), &nb, &fam),
            Err(Error::GuardExceeded(_))
        ));
    }

    #[test]
    fn limits() {
        let spec = binomial_spec();
        let params = LimitParams::default();
        let seq = embed_sequence(&(1..=16).map(|n| 1i64 << n).collect::<Vec<_>>(), 1);
        let p = limit_predict(&seq, &spec, &params).unwrap();
        assert_eq!(p.limit, Limit::Converges(fin(0, &[1])));
        assert_eq!(p.predicted.unwrap(), binomial_element());
        let seq = embed_sequence(&(1..=15).map(|n| (1i64 << n) + (1 << (n + 1))).collect::<Vec<_>>(), 1);
        let p = limit_predict(&seq, &spec, &params).unwrap();
        assert_eq!(p.limit, Limit::Converges(fin(0, &[2])));
        let seq = embed_sequence(&(1..=16).map(|n| 3 + (1i64 << n)).collect::<Vec<_>>(), 1);
        let p = limit_predict(&seq, &spec, &params).unwrap();
        assert_eq!(p.limit, Limit::Converges(fin(3, &[1])));
        assert_eq!(p.predicted.unwrap(), binomial_element().shift(3).unwrap());
        let seq = embed_sequence(&[5, -7, 5, -7, 5, -7], 1);
        assert_eq!(limit_predict(&seq, &spec, &params).unwrap().limit, Limit::Divergent);
    }

    #[test]
    fn involution() {
        let fam = disjoint_family(&SparseSet::factorials(), 1).unwrap();
        let a = FinSeq::from_entries([(-1, Scalar::ratio(1, 2)), (1, Scalar::ratio(1, 2))]).unwrap();
        let spec = ProjectionSpec::new(vec![a], fam).unwrap().with_search_bound(3_628_800);
        let r = involution_check(&spec, 100, 0).unwrap();
        assert!(r.passed() && r.discrepancy.exact);
        assert!(matches!(involution_check(&binomial_spec(), 10, 0), Err(Error::Precondition(_))));
    }

    #[test]
    fn idempotents() {
        let spec = binomial_spec();
        let r = idempotent_scan(&spec, &[fin(0, &[0]), SemiElem::Infinity, fin(0, &[1]), fin(2, &[3])]).unwrap();
        assert!(r.passed(), "{r:?}");
        assert_eq!(r.rows.iter().filter(|r| r.idempotent).count(), 2);
    }

    #[test]
    fn topology() {
        let r = topology_check(&binomial_spec(), 200, 1).unwrap();
        assert!(r.passed(), "{r:?}");
        assert!(r.members > 20);
    }
}
