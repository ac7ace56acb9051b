//! Additively sparse subsets of the integers and the multi-family
//! separation condition used to build Hausdorff topologies.

use std::collections::HashMap;
use std::fmt;

use serde::{Serialize, Serializer};
use serde_json::json;

use crate::error::{Error, Result};
use crate::report::{Report, Status, ToReport};

/// Largest tuple length accepted by the sparseness search.
pub const MAX_SPARSE_ARITY: usize = 5;
/// Largest total count per side in the multi-family search.
pub const MAX_FAMILY_TOTAL: usize = 6;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Generator {
    PowersOf(u64),
    SignedFactorials,
    /// Distinct integers ordered by absolute value, negative first on ties.
    Explicit(Vec<i64>),
}

/// Keep members whose generation index `g` satisfies `(g - 1) mod modulus == residue`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Residue {
    pub residue: u64,
    pub modulus: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseSet {
    generator: Generator,
    residue: Option<Residue>,
}

fn abs_order(a: &i64, b: &i64) -> std::cmp::Ordering {
    a.unsigned_abs().cmp(&b.unsigned_abs()).then(a.cmp(b))
}

impl SparseSet {
    pub fn powers(base: u64) -> Result<Self> {
        if base < 2 {
            return Err(Error::Precondition(format!("power base must be at least 2, got {base}")));
        }
        Ok(SparseSet {
            generator: Generator::PowersOf(base),
            residue: None,
        })
    }

    pub fn factorials() -> Self {
        SparseSet {
            generator: Generator::SignedFactorials,
            residue: None,
        }
    }

    pub fn explicit(values: Vec<i64>) -> Self {
        let mut v = values;
        v.sort_by(abs_order);
        v.dedup();
        SparseSet {
            generator: Generator::Explicit(v),
            residue: None,
        }
    }

    pub fn generator(&self) -> &Generator {
        &self.generator
    }

    pub fn residue(&self) -> Option<Residue> {
        self.residue
    }

    pub fn with_residue(&self, residue: u64, modulus: u64) -> Result<Self> {
        if modulus == 0 || residue >= modulus {
            return Err(Error::Precondition(format!(
                "residue {residue} is not a class modulo {modulus}"
            )));
        }
        Ok(SparseSet {
            generator: self.generator.clone(),
            residue: Some(Residue { residue, modulus }),
        })
    }

    pub fn is_infinite(&self) -> bool {
        !matches!(self.generator, Generator::Explicit(_))
    }

    fn keeps(&self, g: u64) -> bool {
        match self.residue {
            None => true,
            Some(r) => (g - 1) % r.modulus == r.residue,
        }
    }

    /// Members with `|j| <= bound`, paired with their generation index
    /// (`n` for `m^n`, `m` for `+-m!`, position for explicit lists), in order
    /// of absolute value.
    pub fn members(&self, bound: u64) -> Vec<(u64, i64)> {
        let mut out = Vec::new();
        match &self.generator {
            Generator::PowersOf(m) => {
                let mut p: u64 = *m;
                let mut n = 1;
                while p <= bound && p <= i64::MAX as u64 {
                    if self.keeps(n) {
                        out.push((n, p as i64));
                    }
                    match p.checked_mul(*m) {
                        Some(q) => p = q,
                        None => break,
                    }
                    n += 1;
                }
            }
            Generator::SignedFactorials => {
                let mut f: u64 = 1;
                let mut m = 1;
                while f <= bound && f <= i64::MAX as u64 {
                    if self.keeps(m) {
                        out.push((m, -(f as i64)));
                        out.push((m, f as i64));
                    }
                    m += 1;
                    match f.checked_mul(m) {
                        Some(q) => f = q,
                        None => break,
                    }
                }
            }
            Generator::Explicit(v) => {
                for (i, x) in v.iter().enumerate() {
                    let g = i as u64 + 1;
                    if x.unsigned_abs() <= bound && self.keeps(g) {
                        out.push((g, *x));
                    }
                }
            }
        }
        out
    }

    /// Members with `|j| <= bound`, sorted by value.
    pub fn enumerate(&self, bound: u64) -> Vec<i64> {
        let mut v: Vec<i64> = self.members(bound).into_iter().map(|(_, x)| x).collect();
        v.sort_unstable();
        v
    }

    pub fn contains(&self, x: i64, bound: u64) -> bool {
        self.members(bound.max(x.unsigned_abs())).iter().any(|(_, y)| *y == x)
    }

    /// `j` in the set iff `-j` is, within the bound.
    pub fn asymmetric_member(&self, bound: u64) -> Option<i64> {
        let v = self.enumerate(bound);
        v.iter().copied().find(|x| v.binary_search(&-x).is_err())
    }

    /// Parses `powers:M`, `factorials`, `explicit:a,b,...`, optionally followed
    /// by `/residue:R/mod:K`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut parts = text.trim().split('/');
        let head = parts.next().unwrap_or("");
        let mut set = match head.split_once(':') {
            None if head == "factorials" => SparseSet::factorials(),
            Some(("powers", m)) => SparseSet::powers(
                m.trim()
                    .parse()
                    .map_err(|e| Error::Parse(format!("power base `{m}`: {e}")))?,
            )?,
            Some(("explicit", list)) => {
                let mut v = Vec::new();
                for item in list.split(',').filter(|s| !s.trim().is_empty()) {
                    v.push(
                        item.trim()
                            .parse()
                            .map_err(|e| Error::Parse(format!("set member `{item}`: {e}")))?,
                    );
                }
                SparseSet::explicit(v)
            }
            _ => return Err(Error::Parse(format!("unknown set `{text}`"))),
        };
        let rest: Vec<&str> = parts.collect();
        if !rest.is_empty() {
            let field = |key: &str, s: &str| -> Result<u64> {
                s.strip_prefix(key)
                    .ok_or_else(|| Error::Parse(format!("expected `{key}` in `{text}`")))?
                    .parse()
                    .map_err(|e| Error::Parse(format!("`{s}`: {e}")))
            };
            if rest.len() != 2 {
                return Err(Error::Parse(format!("malformed residue filter in `{text}`")));
            }
            let r = field("residue:", rest[0])?;
            let k = field("mod:", rest[1])?;
            set = set.with_residue(r, k)?;
        }
        Ok(set)
    }
}

impl fmt::Display for SparseSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.generator {
            Generator::PowersOf(m) => write!(f, "powers:{m}")?,
            Generator::SignedFactorials => write!(f, "factorials")?,
            Generator::Explicit(v) => {
                let items: Vec<String> = v.iter().map(|x| x.to_string()).collect();
                write!(f, "explicit:{}", items.join(","))?
            }
        }
        if let Some(r) = self.residue {
            write!(f, "/residue:{}/mod:{}", r.residue, r.modulus)?;
        }
        Ok(())
    }
}

impl Serialize for SparseSet {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SparseFamily {
    pub sets: Vec<SparseSet>,
}

impl SparseFamily {
    pub fn new(sets: Vec<SparseSet>) -> Self {
        SparseFamily { sets }
    }

    pub fn k(&self) -> usize {
        self.sets.len()
    }

    /// A value lying in two different sets within the bound.
    pub fn overlap(&self, bound: u64) -> Option<(i64, usize, usize)> {
        let mut seen: HashMap<i64, usize> = HashMap::new();
        for (i, s) in self.sets.iter().enumerate() {
            for x in s.enumerate(bound) {
                if let Some(&j) = seen.get(&x) {
                    if j != i {
                        return Some((x, j, i));
                    }
                }
                seen.insert(x, i);
            }
        }
        None
    }
}

/// Splits `set` into `k` pieces by generation index modulo `k`.
pub fn disjoint_family(set: &SparseSet, k: usize) -> Result<SparseFamily> {
    if k == 0 {
        return Err(Error::Precondition("k must be positive".into()));
    }
    if set.residue.is_some() {
        return Err(Error::Precondition("set is already a residue piece".into()));
    }
    if let Generator::Explicit(v) = &set.generator {
        if v.len() < k {
            return Err(Error::InsufficientElements(format!(
                "{} explicit members cannot fill {k} infinite pieces",
                v.len()
            )));
        }
    }
    if k == 1 {
        return Ok(SparseFamily::new(vec![set.clone()]));
    }
    let sets = (0..k as u64)
        .map(|r| set.with_residue(r, k as u64))
        .collect::<Result<Vec<_>>>()?;
    Ok(SparseFamily::new(sets))
}

/// A choice of members with pairwise distinct absolute values.
#[derive(Clone, Debug)]
struct Subset {
    sum: i128,
    values: Vec<i64>,
    counts: Vec<u8>,
    min_abs: u64,
}

/// All subsets of `pool` of size at most `max_size` with distinct absolute
/// values; `pool` holds `(label, value)` sorted by absolute value.
fn distinct_abs_subsets(pool: &[(usize, i64)], k: usize, max_size: usize) -> Vec<Subset> {
    fn rec(
        pool: &[(usize, i64)],
        start: usize,
        max_size: usize,
        cur: &mut Subset,
        out: &mut Vec<Subset>,
    ) {
        out.push(cur.clone());
        if cur.values.len() == max_size {
            return;
        }
        for i in start..pool.len() {
            let (label, v) = pool[i];
            if let Some(last) = cur.values.last() {
                if last.unsigned_abs() >= v.unsigned_abs() {
                    continue;
                }
            }
            cur.sum += v as i128;
            cur.values.push(v);
            cur.counts[label] += 1;
            let prev_min = cur.min_abs;
            cur.min_abs = cur.min_abs.min(v.unsigned_abs());
            rec(pool, i + 1, max_size, cur, out);
            cur.min_abs = prev_min;
            cur.counts[label] -= 1;
            cur.values.pop();
            cur.sum -= v as i128;
        }
    }
    let mut out = Vec::new();
    let mut cur = Subset {
        sum: 0,
        values: Vec::new(),
        counts: vec![0; k],
        min_abs: u64::MAX,
    };
    rec(pool, 0, max_size, &mut cur, &mut out);
    out
}

/// A nontrivial solution of `sum j = sum l + t`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SumWitness {
    pub t: i64,
    pub j: Vec<i64>,
    pub l: Vec<i64>,
    /// Smallest absolute value among the entries; thresholds at or above it exclude the solution.
    pub min_abs: u64,
}

impl SumWitness {
    fn key(&self) -> (u64, Vec<i64>, Vec<i64>, i64) {
        let max = self
            .j
            .iter()
            .chain(&self.l)
            .map(|x| x.unsigned_abs())
            .max()
            .unwrap_or(0);
        (max, self.j.clone(), self.l.clone(), self.t)
    }
}

impl fmt::Display for SumWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let side = |v: &[i64]| {
            if v.is_empty() {
                "0".to_string()
            } else {
                v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("+")
            }
        };
        write!(f, "{}={}", side(&self.j), side(&self.l))?;
        if self.t != 0 {
            write!(f, "{:+}", self.t)?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SparseParams {
    pub t_min: i64,
    pub t_max: i64,
    pub r_max: usize,
    pub s_max: usize,
    pub bound: u64,
    /// Largest threshold accepted as a certificate; defaults to `isqrt(bound)`.
    pub cap: Option<u64>,
}

impl SparseParams {
    pub fn new(t_abs: i64, r_max: usize, s_max: usize, bound: u64) -> Self {
        SparseParams {
            t_min: -t_abs,
            t_max: t_abs,
            r_max,
            s_max,
            bound,
            cap: None,
        }
    }

    pub fn cap(&self) -> u64 {
        self.cap.unwrap_or_else(|| self.bound.isqrt())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CellThreshold {
    pub t: i64,
    pub r: usize,
    pub s: usize,
    pub threshold: u64,
    pub solutions: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SparseReport {
    pub set: SparseSet,
    pub params: SparseParams,
    pub members: usize,
    /// Cells with at least one nontrivial solution.
    pub cells: Vec<CellThreshold>,
    pub threshold: u64,
    pub nontrivial: u64,
    pub first_witness: Option<SumWitness>,
    pub threshold_witness: Option<SumWitness>,
}

impl SparseReport {
    pub fn certified(&self) -> bool {
        self.threshold <= self.params.cap()
    }
}

impl ToReport for SparseReport {
    fn to_report(&self) -> Report {
        let mut r = Report::new("additive-sparseness", Status::evidence(self.certified()))
            .param("set", &self.set)
            .param("bound", self.params.bound)
            .param("t_min", self.params.t_min)
            .param("t_max", self.params.t_max)
            .param("r_max", self.params.r_max)
            .param("s_max", self.params.s_max)
            .param("cap", self.params.cap())
            .detail("threshold", self.threshold)
            .detail("members", self.members)
            .detail("nontrivial_solutions", self.nontrivial)
            .detail("cells_with_solutions", self.cells.len());
        if let Some(w) = &self.first_witness {
            r = r.detail("first_witness", w.to_string());
        }
        if !self.certified() {
            if let Some(w) = &self.first_witness {
                r = r.witness(w);
            }
            if let Some(w) = &self.threshold_witness {
                r = r.witness(w);
            }
        }
        r.finalize()
    }
}

/// Exhaustive search of `j_1 + ... + j_r = l_1 + ... + l_s + t` over members
/// with `|j| <= bound`, strictly increasing absolute values on each side,
/// `0 <= r <= r_max`, `0 <= s <= s_max` and `t` in range. The certified
/// threshold is the least `n` excluding every nontrivial solution.
pub fn additively_sparse_check(set: &SparseSet, params: &SparseParams) -> Result<SparseReport> {
    if params.r_max > MAX_SPARSE_ARITY || params.s_max > MAX_SPARSE_ARITY {
        return Err(Error::GuardExceeded(format!(
            "r, s <= {MAX_SPARSE_ARITY} required (got r_max = {}, s_max = {})",
            params.r_max, params.s_max
        )));
    }
    if params.t_min > params.t_max {
        return Err(Error::Precondition("empty t range".into()));
    }
    let pool: Vec<(usize, i64)> = set.members(params.bound).into_iter().map(|(_, x)| (0, x)).collect();
    let max_size = params.r_max.max(params.s_max);
    let subsets = distinct_abs_subsets(&pool, 1, max_size);
    let mut by_size_sum: HashMap<(usize, i128), Vec<usize>> = HashMap::new();
    for (i, s) in subsets.iter().enumerate() {
        if s.values.len() <= params.r_max {
            by_size_sum.entry((s.values.len(), s.sum)).or_default().push(i);
        }
    }
    let mut cells: Vec<CellThreshold> = Vec::new();
    let mut cell_index: HashMap<(i64, usize, usize), usize> = HashMap::new();
    let mut threshold = 0u64;
    let mut nontrivial = 0u64;
    let mut first_witness: Option<SumWitness> = None;
    let mut threshold_witness: Option<SumWitness> = None;
    for l in subsets.iter().filter(|s| s.values.len() <= params.s_max) {
        for t in params.t_min..=params.t_max {
            for r in 0..=params.r_max {
                let Some(hits) = by_size_sum.get(&(r, l.sum + t as i128)) else {
                    continue;
                };
                for &ji in hits {
                    let j = &subsets[ji];
                    if t == 0 && j.values == l.values {
                        continue;
                    }
                    let min_abs = j.min_abs.min(l.min_abs);
                    let w = SumWitness {
                        t,
                        j: j.values.clone(),
                        l: l.values.clone(),
                        min_abs,
                    };
                    nontrivial += 1;
                    let key = (t, r, l.values.len());
                    let idx = *cell_index.entry(key).or_insert_with(|| {
                        cells.push(CellThreshold {
                            t,
                            r,
                            s: l.values.len(),
                            threshold: 0,
                            solutions: 0,
                        });
                        cells.len() - 1
                    });
                    cells[idx].solutions += 1;
                    cells[idx].threshold = cells[idx].threshold.max(min_abs);
                    let better_threshold = match &threshold_witness {
                        None => true,
                        Some(b) => min_abs > b.min_abs || (min_abs == b.min_abs && w.key() < b.key()),
                    };
                    if better_threshold {
                        threshold = min_abs;
                        threshold_witness = Some(w.clone());
                    }
                    if first_witness.as_ref().is_none_or(|f| w.key() < f.key()) {
                        first_witness = Some(w);
                    }
                }
            }
        }
    }
    cells.sort_by_key(|c| (c.t, c.r, c.s));
    Ok(SparseReport {
        set: set.clone(),
        params: params.clone(),
        members: pool.len(),
        cells,
        threshold,
        nontrivial,
        first_witness,
        threshold_witness,
    })
}

/// A nontrivial solution of the multi-family equation.
#[derive(Clone, Debug, Serialize)]
pub struct FamilyWitness {
    pub t: i64,
    pub j: Vec<i64>,
    pub l: Vec<i64>,
    pub a: Vec<u8>,
    pub b: Vec<u8>,
    pub min_abs: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct HausdorffReport {
    pub family: SparseFamily,
    pub bound: u64,
    pub t_abs: i64,
    pub a_max: usize,
    pub cap: u64,
    pub overlap: Option<(i64, usize, usize)>,
    pub threshold: u64,
    pub nontrivial: u64,
    pub threshold_witness: Option<FamilyWitness>,
}

impl HausdorffReport {
    pub fn certified(&self) -> bool {
        self.overlap.is_none() && self.threshold <= self.cap
    }
}

impl ToReport for HausdorffReport {
    fn to_report(&self) -> Report {
        let mut r = Report::new("hausdorff-condition", Status::evidence(self.certified()))
            .param("family", &self.family.sets)
            .param("bound", self.bound)
            .param("t_abs", self.t_abs)
            .param("a_max", self.a_max)
            .param("cap", self.cap)
            .detail("threshold", self.threshold)
            .detail("nontrivial_solutions", self.nontrivial);
        if let Some((x, i, j)) = self.overlap {
            r = r.witness(json!({ "shared_member": x, "sets": [i, j] }));
        }
        if !self.certified() {
            if let Some(w) = &self.threshold_witness {
                r = r.witness(w);
            }
        }
        r.finalize()
    }
}

/// Exhaustive search of `sum_i sum_{r <= a_i} j_r^(i) = t + sum_i sum_{s <= b_i} l_s^(i)`
/// over members of the family within `bound`, each side with distinct
/// absolute values and at most `a_max` entries. Solutions are nontrivial when
/// `t != 0` or the count vectors differ.
pub fn hausdorff_condition_check(
    family: &SparseFamily,
    t_abs: i64,
    a_max: usize,
    bound: u64,
    cap: Option<u64>,
) -> Result<HausdorffReport> {
    if a_max > MAX_FAMILY_TOTAL {
        return Err(Error::GuardExceeded(format!(
            "sum of counts per side must be at most {MAX_FAMILY_TOTAL}, got {a_max}"
        )));
    }
    let k = family.k();
    let cap = cap.unwrap_or_else(|| bound.isqrt());
    let mut report = HausdorffReport {
        family: family.clone(),
        bound,
        t_abs,
        a_max,
        cap,
        overlap: family.overlap(bound),
        threshold: 0,
        nontrivial: 0,
        threshold_witness: None,
    };
    if report.overlap.is_some() {
        return Ok(report);
    }
    let mut pool: Vec<(usize, i64)> = family
        .sets
        .iter()
        .enumerate()
        .flat_map(|(i, s)| s.members(bound).into_iter().map(move |(_, x)| (i, x)))
        .collect();
    pool.sort_by(|a, b| abs_order(&a.1, &b.1));
    let subsets = distinct_abs_subsets(&pool, k, a_max);
    let mut by_sum: HashMap<i128, Vec<usize>> = HashMap::new();
    for (i, s) in subsets.iter().enumerate() {
        by_sum.entry(s.sum).or_default().push(i);
    }
    for l in &subsets {
        for t in -t_abs..=t_abs {
            let Some(hits) = by_sum.get(&(l.sum + t as i128)) else {
                continue;
            };
            for &ji in hits {
                let j = &subsets[ji];
                if t == 0 && j.counts == l.counts {
                    continue;
                }
                report.nontrivial += 1;
                let min_abs = j.min_abs.min(l.min_abs);
                if report.threshold_witness.is_none() || min_abs > report.threshold {
                    report.threshold = min_abs;
                    report.threshold_witness = Some(FamilyWitness {
                        t,
                        j: j.values.clone(),
                        l: l.values.clone(),
                        a: j.counts.clone(),
                        b: l.counts.clone(),
                        min_abs,
                    });
                }
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enumerations() {
        assert_eq!(SparseSet::powers(2).unwrap().enumerate(20), vec![2, 4, 8, 16]);
        assert_eq!(
            SparseSet::factorials().enumerate(30),
            vec![-24, -6, -2, -1, 1, 2, 6, 24]
        );
        assert_eq!(SparseSet::explicit(vec![5, -3]).enumerate(4), vec![-3]);
        assert!(SparseSet::powers(1).is_err());
        assert_eq!(SparseSet::powers(3).unwrap().enumerate(u64::MAX).len(), 39);
    }

    #[test]
    fn parse_round_trip() {
        for text in ["powers:2", "factorials", "explicit:-3,5", "powers:2/residue:1/mod:2"] {
            let s = SparseSet::parse(text).unwrap();
            assert_eq!(s.to_string(), text);
        }
        assert!(SparseSet::parse("cubes").is_err());
        assert!(SparseSet::parse("powers:2/residue:3/mod:2").is_err());
    }

    #[test]
    fn family_split() {
        let f = disjoint_family(&SparseSet::powers(2).unwrap(), 2).unwrap();
        assert_eq!(f.sets[0].enumerate(100), vec![2, 8, 32]);
        assert_eq!(f.sets[1].enumerate(100), vec![4, 16, 64]);
        assert!(f.overlap(1 << 20).is_none());
        let f = disjoint_family(&SparseSet::factorials(), 1).unwrap();
        assert_eq!(f.sets[0], SparseSet::factorials());
        assert!(matches!(
            disjoint_family(&SparseSet::explicit(vec![1, 2]), 3),
            Err(Error::InsufficientElements(_))
        ));
    }

    #[test]
    fn dense_counterexample() {
        let set = SparseSet::explicit((1..=100).collect());
        let params = SparseParams {
            t_min: 0,
            t_max: 0,
            r_max: 2,
            s_max: 1,
            bound: 100,
            cap: None,
        };
        let r = additively_sparse_check(&set, &params).unwrap();
        assert!(!r.certified());
        let w = r.first_witness.unwrap();
        assert_eq!(w.to_string(), "1+2=3");
    }

    #[test]
    fn trivial_cell_is_clean() {
        let set = SparseSet::explicit((1..=30).collect());
        let params = SparseParams {
            t_min: 0,
            t_max: 0,
            r_max: 1,
            s_max: 1,
            bound: 100,
            cap: None,
        };
        let r = additively_sparse_check(&set, &params).unwrap();
        assert!(r.cells.iter().all(|c| !(c.r == 1 && c.s == 1)));
    }

    #[test]
    fn powers_of_two_small() {
        let r = additively_sparse_check(
            &SparseSet::powers(2).unwrap(),
            &SparseParams::new(20, 3, 3, 1 << 12),
        )
        .unwrap();
        assert!(r.certified(), "{r:?}");
        assert!(r.cells.iter().all(|c| c.t != 0));
    }

    #[test]
    fn guard() {
        assert!(matches!(
            additively_sparse_check(&SparseSet::factorials(), &SparseParams::new(1, 6, 1, 100)),
            Err(Error::GuardExceeded(_))
        ));
    }

    #[test]
    fn hausdorff_parity_split() {
        let f = disjoint_family(&SparseSet::powers(2).unwrap(), 2).unwrap();
        let r = hausdorff_condition_check(&f, 10, 4, 1 << 12, None).unwrap();
        assert!(r.certified(), "{r:?}");
    }

    #[test]
    fn hausdorff_overlap_reported() {
        let f = SparseFamily::new(vec![
            SparseSet::powers(2).unwrap(),
            SparseSet::powers(4).unwrap(),
        ]);
        let r = hausdorff_condition_check(&f, 1, 2, 1000, None).unwrap();
        assert_eq!(r.overlap.map(|o| o.0), Some(4));
        assert!(r.to_report().is_fail());
    }

    #[test]
    fn symmetry() {
        assert_eq!(SparseSet::factorials().asymmetric_member(1000), None);
        assert_eq!(SparseSet::powers(2).unwrap().asymmetric_member(1000), Some(2));
    }
}
