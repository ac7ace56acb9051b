//! Finite-stage probes of the ball-shrink estimate for weak*-convergent
//! sequences and of the norm-separated witness chains for power-bounded
//! generators.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;
use serde::Serialize;
use serde_json::json;

use crate::error::{Error, Result};
use crate::report::{Report, Status, ToReport};
use crate::scalar::{rational_to_f64, Scalar};
use crate::semigroup::ProjectionSpec;
use crate::seq::{FinSeq, Window};
use crate::xzero::{extend, GeneratorBattery, LambdaParam};

/// Weak*-convergence tolerance against the generator battery.
pub const WEAK_STAR_TOL: f64 = 1e-8;
/// Slack for each inequality of the shrink chain.
pub const CHAIN_TOL: f64 = 1e-9;
/// Below this `eps` the iteration bound is reported as unbounded.
pub const EPS_FLOOR: f64 = 1e-9;

#[derive(Clone, Debug, Serialize)]
pub struct ShrinkParams {
    pub lambda: LambdaParam,
    pub eps: f64,
    pub r: f64,
    pub delta: f64,
    /// Truncation index; derived from the supports when absent.
    pub n_trunc: Option<u64>,
}

impl ShrinkParams {
    pub fn new(lambda: LambdaParam, eps: f64, r: f64) -> Result<Self> {
        if !(eps > 0.0 && eps < 2.0) {
            return Err(Error::Precondition(format!("eps must lie in (0, 2), got {eps}")));
        }
        if r <= 0.0 {
            return Err(Error::Precondition(format!("r must be positive, got {r}")));
        }
        Ok(ShrinkParams {
            lambda,
            eps,
            r,
            delta: eps / 100.0,
            n_trunc: None,
        })
    }
}

fn inv_modulus_exact(lambda: &LambdaParam) -> Option<BigRational> {
    lambda.value().abs_exact().map(|q| q.recip())
}

/// `(1 - u) / (1 + u)` with `u = |lambda|^{-1}`.
pub fn shrink_factor(lambda: &LambdaParam) -> f64 {
    let u = 1.0 / lambda.modulus();
    (1.0 - u) / (1.0 + u)
}

pub fn shrink_factor_exact(lambda: &LambdaParam) -> Option<BigRational> {
    let u = inv_modulus_exact(lambda)?;
    let one = BigRational::one();
    Some((&one - &u) / (&one + &u))
}

/// `r' = r - (eps / 3) (1 - u) / (1 + u)`.
pub fn shrink_radius(params: &ShrinkParams) -> f64 {
    params.r - params.eps / 3.0 * shrink_factor(&params.lambda)
}

pub fn shrink_radius_exact(lambda: &LambdaParam, eps: &BigRational, r: &BigRational) -> Option<BigRational> {
    let f = shrink_factor_exact(lambda)?;
    Some(r - eps / BigRational::from_integer(BigInt::from(3)) * f)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "kind", content = "value")]
pub enum IterationBound {
    Finite(u64),
    Unbounded,
}

/// Least `alpha` with `1 - alpha (eps / 3) (|lambda| - 1) / (|lambda| + 1) < 0`.
pub fn shrink_iteration_bound(lambda: &LambdaParam, eps: f64) -> Result<IterationBound> {
    if !(eps > 0.0 && eps < 2.0) {
        return Err(Error::Precondition(format!("eps must lie in (0, 2), got {eps}")));
    }
    if eps < EPS_FLOOR {
        return Ok(IterationBound::Unbounded);
    }
    let exact = shrink_factor_exact(lambda).zip(BigRational::from_float(eps));
    let alpha = match exact {
        Some((f, e)) => {
            let q = BigRational::from_integer(BigInt::from(3)) / (e * f);
            (q.floor().to_integer() + BigInt::one()).to_u64()
        }
        None => {
            let q = 3.0 / (eps * shrink_factor(lambda));
            if q.is_finite() && q < u64::MAX as f64 {
                Some(q.floor() as u64 + 1)
            } else {
                None
            }
        }
    };
    Ok(alpha.map_or(IterationBound::Unbounded, IterationBound::Finite))
}

/// A sequence `a^(n)` with weak* limit `a` and coordinatewise limit `b`.
#[derive(Clone, Debug, Serialize)]
pub struct WitnessFamily {
    pub limit: FinSeq,
    pub approximants: Vec<FinSeq>,
    pub coordinate_limit: FinSeq,
    /// Window on which coordinatewise convergence is declared.
    pub window: Window,
}

impl WitnessFamily {
    /// `a^(n) = delta_{2^n}` for `n` in `1..=n_max`, converging to `lambda^{-1} delta_0`.
    pub fn canonical(lambda: &LambdaParam, n_max: u32) -> Result<Self> {
        if !(1..=61).contains(&n_max) {
            return Err(Error::Precondition(format!("n_max must lie in 1..=61, got {n_max}")));
        }
        Ok(WitnessFamily {
            limit: FinSeq::single(0, lambda.inv().clone()),
            approximants: (1..=n_max).map(|n| FinSeq::delta(1i64 << n)).collect(),
            coordinate_limit: FinSeq::zero(),
            window: Window::radius(1 << 14)?,
        })
    }
}

fn pair_battery(battery: &GeneratorBattery, lambda: &LambdaParam, a: &FinSeq) -> Vec<Scalar> {
    (0..battery.len())
        .map(|g| a.pair_with(|n| battery.eval(lambda, g, n)))
        .collect()
}

fn tail_mass(a: &FinSeq, n: u64) -> f64 {
    a.iter().filter(|(k, _)| k.unsigned_abs() > n).map(|(_, v)| v.abs()).sum()
}

fn head(a: &FinSeq, n: u64) -> FinSeq {
    FinSeq::from_entries(a.iter().filter(|(k, _)| k.unsigned_abs() <= n).map(|(k, v)| (k, v.clone())))
        .expect("indices already valid")
}

/// Every intermediate quantity of the chain, evaluated at the last approximant.
#[derive(Clone, Debug, Serialize)]
pub struct ShrinkChain {
    pub n_trunc: u64,
    pub delta: f64,
    pub b_norm: f64,
    pub sup_approx_norm: f64,
    pub min_gap: f64,
    pub weak_star_gap: f64,
    pub coordinate_gap: f64,
    pub tail_a: f64,
    pub tail_b: f64,
    /// Tail mass of the last approximant beyond the truncation index.
    pub tail_approx: f64,
    pub head_diff: f64,
    pub head_b: f64,
    pub extension_pairing_gap: f64,
    /// `sum_{|k| <= N} |a_k - b_k| - sum_{|k| > N} |a_k|`.
    pub q1: f64,
    /// `|<x, a> - sum_{|k| <= N} x_k b_k|`.
    pub q2: f64,
    /// `|sum_{|k| > N} x_k a^(n)_k|`.
    pub q3: f64,
    /// `|lambda|^{-1}` times the approximant tail.
    pub q4: f64,
    pub eps_third: f64,
    pub approx_gap: f64,
    pub rhs_48: f64,
    pub lhs_49: f64,
    pub a_norm: f64,
    pub split_norm: f64,
    pub mid_50: f64,
    pub rhs_50: f64,
    pub r_prime: f64,
    pub tolerance: f64,
    pub failed: Vec<String>,
}

impl ShrinkChain {
    pub fn holds(&self) -> bool {
        self.failed.is_empty()
    }
}

impl ToReport for ShrinkChain {
    fn to_report(&self) -> Report {
        let mut r = Report::new("shrink-witness", Status::from_pass(self.holds()))
            .param("n_trunc", self.n_trunc)
            .param("delta", self.delta)
            .max_error((self.a_norm - self.rhs_50).max(0.0))
            .detail("chain", serde_json::to_value(self).unwrap_or_default());
        for f in &self.failed {
            r = r.witness(json!({ "inequality": f }));
        }
        r.finalize()
    }
}

/// Checks the family invariants, then evaluates the chain from the
/// coordinatewise limit bound through the final radius estimate.
pub fn shrink_witness_check(w: &WitnessFamily, params: &ShrinkParams) -> Result<ShrinkChain> {
    let lambda = &params.lambda;
    let u = 1.0 / lambda.modulus();
    let a = &w.limit;
    let b = &w.coordinate_limit;
    let Some(last) = w.approximants.last() else {
        return Err(Error::InvariantViolation("family has no approximants".into()));
    };
    let sup_approx_norm = w.approximants.iter().map(FinSeq::l1_norm).fold(0.0, f64::max);
    if sup_approx_norm > params.r + CHAIN_TOL {
        return Err(Error::InvariantViolation(format!(
            "approximant norm {sup_approx_norm} exceeds r = {}",
            params.r
        )));
    }
    let gaps: Vec<f64> = w.approximants.iter().map(|x| x.sub(a).l1_norm()).collect();
    let min_gap = gaps.iter().copied().fold(f64::INFINITY, f64::min);
    if min_gap < params.eps / 3.0 - CHAIN_TOL {
        let n = gaps.iter().position(|g| *g == min_gap).unwrap_or(0);
        return Err(Error::InvariantViolation(format!(
            "approximant {n} lies within {min_gap} < eps/3 of the limit"
        )));
    }
    let mut coordinate_gap = 0.0f64;
    for (k, v) in last.sub(b).iter() {
        if w.window.contains(k) {
            coordinate_gap = coordinate_gap.max(v.abs());
        }
    }
    if coordinate_gap > WEAK_STAR_TOL {
        return Err(Error::InvariantViolation(format!(
            "coordinatewise gap {coordinate_gap} on the declared window"
        )));
    }
    let battery = GeneratorBattery::default_battery();
    let pa = pair_battery(&battery, lambda, a);
    let pn = pair_battery(&battery, lambda, last);
    let weak_star_gap = pa.iter().zip(&pn).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    if weak_star_gap > WEAK_STAR_TOL {
        return Err(Error::InvariantViolation(format!(
            "battery pairings differ from the limit by {weak_star_gap}"
        )));
    }

    let b_norm = b.l1_norm();
    let n_trunc = params.n_trunc.unwrap_or_else(|| {
        a.iter()
            .chain(b.iter())
            .map(|(k, _)| k.unsigned_abs())
            .max()
            .unwrap_or(0)
    });
    let tail_a = tail_mass(a, n_trunc);
    let tail_b = tail_mass(b, n_trunc);
    if tail_a >= params.delta || tail_b >= params.delta {
        return Err(Error::Precondition(format!(
            "truncation index {n_trunc} leaves tails {tail_a}, {tail_b} above delta"
        )));
    }
    let head_a = head(a, n_trunc);
    let head_bs = head(b, n_trunc);
    let diff = head_a.sub(&head_bs);
    let y = FinSeq::from_entries(diff.iter().map(|(k, v)| (k, v.phase_conj())))?;
    let x = extend(&y, lambda)?;
    let pair_x = |s: &FinSeq| -> Scalar {
        let mut acc = Scalar::zero();
        for (k, v) in s.iter() {
            acc += &(v * &x.at(k));
        }
        acc
    };
    let tail_approx = tail_mass(last, n_trunc);
    let head_diff = diff.l1_norm();
    let head_b = head_bs.l1_norm();
    let x_a = pair_x(a);
    let x_b = pair_x(&head_bs);
    let x_tail: Scalar = {
        let tail = FinSeq::from_entries(
            last.iter()
                .filter(|(k, _)| k.unsigned_abs() > n_trunc)
                .map(|(k, v)| (k, v.clone())),
        )?;
        pair_x(&tail)
    };
    let x_head_last = pair_x(&head(last, n_trunc));
    let extension_pairing_gap = (&(&x_a - &x_head_last) - &x_tail).abs();

    let q1 = head_diff - tail_a;
    let q2 = (&x_a - &x_b).abs();
    let q3 = x_tail.abs();
    let q4 = u * tail_approx;
    let eps_third = params.eps / 3.0;
    let approx_gap = last.sub(a).l1_norm();
    let rhs_48 = 2.0 * params.delta + (1.0 + u) * tail_approx;
    let lhs_49 = tail_approx + head_b;
    let a_norm = a.l1_norm();
    let split_norm = head_diff + head_b + tail_a;
    let mid_50 = 2.0 * params.delta + params.r - (1.0 - u) * tail_approx;
    let f = shrink_factor(lambda);
    let rhs_50 = 2.0 * params.delta + params.r - f * (eps_third - 2.0 * params.delta);
    let tolerance = CHAIN_TOL + coordinate_gap + extension_pairing_gap;

    let mut failed = Vec::new();
    let mut check = |name: &str, lhs: f64, rhs: f64| {
        if lhs > rhs + tolerance {
            failed.push(format!("{name}: {lhs} > {rhs}"));
        }
    };
    check("coordinate limit norm <= r", b_norm, params.r);
    check("head difference minus tail <= pairing gap", q1, q2);
    check("pairing gap equals approximant tail pairing", (q2 - q3).abs(), 0.0);
    check("approximant tail pairing <= |lambda|^-1 tail", q3, q4);
    check("eps/3 <= approximant distance", eps_third, approx_gap);
    check("approximant distance <= 2 delta + (1 + u) tail", approx_gap, rhs_48);
    check("tail plus head of b <= r", lhs_49, params.r);
    check("norm of limit <= split norm", a_norm, split_norm);
    check("split norm <= 2 delta + r - (1 - u) tail", split_norm, mid_50);
    check("2 delta + r - (1 - u) tail <= radius bound", mid_50, rhs_50);
    check("norm of limit <= radius bound", a_norm, rhs_50);

    Ok(ShrinkChain {
        n_trunc,
        delta: params.delta,
        b_norm,
        sup_approx_norm,
        min_gap,
        weak_star_gap,
        coordinate_gap,
        tail_a,
        tail_b,
        tail_approx,
        head_diff,
        head_b,
        extension_pairing_gap,
        q1,
        q2,
        q3,
        q4,
        eps_third,
        approx_gap,
        rhs_48,
        lhs_49,
        a_norm,
        split_norm,
        mid_50,
        rhs_50,
        r_prime: shrink_radius(params),
        tolerance,
        failed,
    })
}

/// Random family `b + sum c_i delta_{t_i + 2^n}` with weak* limit
/// `b + lambda^{-1} sum c_i delta_{t_i}`; `r` and `eps` are set to the
/// tightest admissible values. Needs `|lambda| >= 2` for the escape depth used.
pub fn random_admissible_family<R: Rng>(rng: &mut R, lambda: &LambdaParam) -> Result<(WitnessFamily, ShrinkParams)> {
    if lambda.modulus() < 2.0 {
        return Err(Error::Precondition("random families need |lambda| >= 2".into()));
    }
    let b_len = rng.gen_range(0..=8);
    let b = FinSeq::from_entries(
        (0..b_len).map(|_| (rng.gen_range(-8..=8), Scalar::ratio(rng.gen_range(-9..=9), rng.gen_range(1..=9)))),
    )?;
    let atoms = rng.gen_range(1..=8);
    let mut ts: Vec<i64> = (-8..=8).collect();
    let mut escaping = Vec::new();
    for _ in 0..atoms {
        let t = ts.remove(rng.gen_range(0..ts.len()));
        let mut p: i64 = rng.gen_range(-9..=9);
        if p == 0 {
            p = 1;
        }
        escaping.push((t, Scalar::ratio(p, rng.gen_range(1..=9))));
    }
    let limit = b.add(&FinSeq::from_entries(
        escaping.iter().map(|(t, c)| (*t, c * lambda.inv())),
    )?);
    let approximants = (45..=60)
        .map(|n| {
            Ok(b.add(&FinSeq::from_entries(
                escaping.iter().map(|(t, c)| (t + (1i64 << n), c.clone())),
            )?))
        })
        .collect::<Result<Vec<_>>>()?;
    let family = WitnessFamily {
        limit,
        approximants,
        coordinate_limit: b,
        window: Window::radius(1 << 14)?,
    };
    let r = family.approximants.iter().map(FinSeq::l1_norm).fold(0.0, f64::max);
    let gap = family
        .approximants
        .iter()
        .map(|x| x.sub(&family.limit).l1_norm())
        .fold(f64::INFINITY, f64::min);
    let eps = (3.0 * gap).min(1.99);
    let params = ShrinkParams::new(lambda.clone(), eps, r)?;
    Ok((family, params))
}

#[derive(Clone, Debug, Serialize)]
pub struct ChainStage {
    pub m: u32,
    pub t: i64,
    pub shift: i64,
    pub value: Scalar,
    pub expected: Scalar,
    pub certified: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct WitnessChainReport {
    pub eps: f64,
    pub depth: u32,
    pub t_range: i64,
    pub stages: Vec<ChainStage>,
    /// Largest minimal shift over the stages of each `m`.
    pub max_shift_per_m: Vec<(u32, i64)>,
    pub min_value: f64,
}

impl WitnessChainReport {
    pub fn passed(&self) -> bool {
        self.stages.iter().all(|s| s.certified)
    }
}

impl ToReport for WitnessChainReport {
    fn to_report(&self) -> Report {
        let mut r = Report::new("witness-chain", Status::evidence(self.passed()))
            .param("eps", self.eps)
            .param("depth", self.depth)
            .param("t_range", self.t_range)
            .detail("stages", self.stages.len())
            .detail("min_separation", self.min_value)
            .detail("max_shift_per_m", &self.max_shift_per_m);
        for s in self.stages.iter().filter(|s| !s.certified).take(8) {
            r = r.witness(s);
        }
        r.finalize()
    }
}

/// `||a^m * delta_{t+s} - a^{m+1} * delta_t||_1`.
pub fn separation_value(a: &FinSeq, m: u32, t: i64, s: i64) -> Result<Scalar> {
    let lhs = a.power(m)?.shift(t + s)?;
    let rhs = a.power(m + 1)?.shift(t)?;
    Ok(l1_scalar(&lhs.sub(&rhs)))
}

fn l1_scalar(a: &FinSeq) -> Scalar {
    match a.l1_norm_exact() {
        Some(q) => Scalar::Exact(q),
        None => Scalar::real(a.l1_norm()),
    }
}

fn supports_disjoint(p: &[i64], q: &[i64], offset: i64) -> bool {
    let (mut i, mut j) = (0, 0);
    while i < p.len() && j < q.len() {
        let x = p[i] + offset;
        match x.cmp(&q[j]) {
            std::cmp::Ordering::Equal => return false,
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
        }
    }
    true
}

/// For each `m <= depth` and `|t| <= t_range`, finds the shift `s` of least
/// modulus making the two supports disjoint and verifies the separation
/// equals `||a^m|| + ||a^{m+1}|| >= 2 > eps`.
pub fn witness_chain_check(spec: &ProjectionSpec, eps: f64, depth: u32, t_range: i64) -> Result<WitnessChainReport> {
    if spec.k() != 1 {
        return Err(Error::Precondition(format!("witness chains need k = 1, got {}", spec.k())));
    }
    if !(eps > 0.0 && eps < 2.0) {
        return Err(Error::Precondition(format!("eps must lie in (0, 2), got {eps}")));
    }
    let a = &spec.images[0];
    let powers: Vec<FinSeq> = (0..=depth + 1).map(|m| a.power(m)).collect::<Result<_>>()?;
    let norms: Vec<Scalar> = powers.iter().map(l1_scalar).collect();
    for (m, nm) in norms.iter().enumerate().skip(1) {
        let below = match nm.as_exact() {
            Some(q) => *q < BigRational::one(),
            None => nm.abs() < 1.0,
        };
        if below {
            return Err(Error::Precondition(format!(
                "||a^{m}||_1 = {} dips below 1",
                rational_or_float(nm)
            )));
        }
    }
    let mut stages = Vec::new();
    let mut max_shift_per_m = Vec::new();
    let mut min_value = f64::INFINITY;
    for m in 1..=depth {
        let p = powers[m as usize].support();
        let q = powers[m as usize + 1].support();
        let expected = &norms[m as usize] + &norms[m as usize + 1];
        let mut worst_shift = 0i64;
        for t in -t_range..=t_range {
            let mut s = 0i64;
            let mut step = 0i64;
            while !supports_disjoint(&p, &q, s) {
                step += 1;
                s = if step % 2 == 1 { (step + 1) / 2 } else { -(step / 2) };
            }
            let lhs = powers[m as usize].shift(t + s)?;
            let rhs = powers[m as usize + 1].shift(t)?;
            let value = l1_scalar(&lhs.sub(&rhs));
            let exact_match = match (value.as_exact(), expected.as_exact()) {
                (Some(v), Some(e)) => v == e,
                _ => (value.abs() - expected.abs()).abs() <= 1e-12,
            };
            let certified = exact_match && value.abs() >= 2.0 - 1e-12 && value.abs() > eps;
            min_value = min_value.min(value.abs());
            worst_shift = worst_shift.max(s.abs());
            stages.push(ChainStage {
                m,
                t,
                shift: s,
                value,
                expected: expected.clone(),
                certified,
            });
        }
        max_shift_per_m.push((m, worst_shift));
    }
    Ok(WitnessChainReport {
        eps,
        depth,
        t_range,
        stages,
        max_shift_per_m,
        min_value,
    })
}

fn rational_or_float(s: &Scalar) -> String {
    match s.as_exact() {
        Some(q) if !q.is_zero() && q.denom().bits() > 64 => format!("{:.6e}", rational_to_f64(q)),
        _ => s.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::power::binomial_element;
    use crate::sparse::{disjoint_family, SparseSet};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn radius() {
        let two = LambdaParam::int(2);
        assert_eq!(shrink_radius_exact(&two, &q(1, 1), &q(1, 1)), Some(q(8, 9)));
        assert_eq!(shrink_radius_exact(&two, &q(0, 1), &q(1, 1)), Some(q(1, 1)));
        let big = LambdaParam::int(1_000_000);
        let p = ShrinkParams::new(big, 1.5, 1.0).unwrap();
        assert!((shrink_radius(&p) - 0.5).abs() < 1e-5);
    }

    #[test]
    fn iteration_bound() {
        let two = LambdaParam::int(2);
        assert_eq!(shrink_iteration_bound(&two, 1.0).unwrap(), IterationBound::Finite(10));
        let big = LambdaParam::int(1000);
        assert_eq!(shrink_iteration_bound(&big, 1.99).unwrap(), IterationBound::Finite(2));
        assert_eq!(shrink_iteration_bound(&two, 1e-12).unwrap(), IterationBound::Unbounded);
        assert!(shrink_iteration_bound(&two, 2.0).is_err());
    }

    #[test]
    fn canonical_chain() {
        for lambda in [LambdaParam::int(2), LambdaParam::int(3), LambdaParam::complex(1.5, 2.0).unwrap()] {
            let u = 1.0 / lambda.modulus();
            let fam = WitnessFamily::canonical(&lambda, 60).unwrap();
            let params = ShrinkParams::new(lambda.clone(), 1.0 + u, 1.0).unwrap();
            let chain = shrink_witness_check(&fam, &params).unwrap();
            assert!(chain.holds(), "{:?}", chain.failed);
            assert!((chain.a_norm - u).abs() < 1e-15);
        }
    }

    #[test]
    fn constant_family_rejected() {
        let lambda = LambdaParam::int(2);
        let a = FinSeq::single(0, Scalar::ratio(1, 2));
        let fam = WitnessFamily {
            limit: a.clone(),
            approximants: vec![a.clone(); 4],
            coordinate_limit: a,
            window: Window::radius(16).unwrap(),
        };
        let params = ShrinkParams::new(lambda, 1.0, 1.0).unwrap();
        assert!(matches!(
            shrink_witness_check(&fam, &params),
            Err(Error::InvariantViolation(_))
        ));
    }

    #[test]
    fn random_families() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for lambda in [LambdaParam::int(2), LambdaParam::int(3)] {
            for _ in 0..20 {
                let (fam, params) = random_admissible_family(&mut rng, &lambda).unwrap();
                let chain = shrink_witness_check(&fam, &params).unwrap();
                assert!(chain.holds(), "{:?}", chain.failed);
            }
        }
    }

    #[test]
    fn chains() {
        let fam = disjoint_family(&SparseSet::powers(2).unwrap(), 1).unwrap();
        let spec = ProjectionSpec::new(vec![binomial_element()], fam.clone()).unwrap();
        let r = witness_chain_check(&spec, 1.0, 20, 2).unwrap();
        assert!(r.passed());
        assert!(r.stages.iter().all(|s| s.value.exactly_equals(&Scalar::int(2))));
        let a = binomial_element();
        assert_eq!(separation_value(&a, 1, 0, 100).unwrap().abs(), 2.0);
        assert!(separation_value(&a, 1, 0, 1).unwrap().abs() < 2.0);
        let decaying = ProjectionSpec::new(vec![FinSeq::single(0, Scalar::ratio(1, 2))], fam).unwrap();
        assert!(matches!(
            witness_chain_check(&decaying, 1.0, 5, 0),
            Err(Error::Precondition(_))
        ));
    }
}
