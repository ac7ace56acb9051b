//! The binary-digit generator x0 and its operator identities, the extension
//! construction, class limit laws and the measure reconstruction.

use std::collections::{BTreeMap, HashMap};

use num_traits::Signed;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Serialize, Serializer};
use serde_json::json;

use crate::error::{Error, Result};
use crate::report::{Report, Status, ToReport};
use crate::scalar::{parse_complex, Scalar};
use crate::seq::{check_index, Discrepancy, FinSeq, Window, WindowedSeq, MAX_WINDOW_LEN};

/// Absolute tolerance for float-mode identity checks.
pub const FLOAT_TOL: f64 = 1e-10;

/// Cached inverse powers cover every bit count of an `i128`.
const POW_TABLE: usize = 130;

/// A parameter with modulus strictly greater than one.
#[derive(Clone)]
pub struct LambdaParam {
    value: Scalar,
    inv_pows: Vec<Scalar>,
    modulus: f64,
}

impl LambdaParam {
    pub fn new(value: Scalar) -> Result<Self> {
        let modulus = value.abs();
        let ok = match value.as_exact() {
            Some(q) => q.abs() > num_rational::BigRational::from_integer(1.into()),
            None => modulus.is_finite() && modulus > 1.0,
        };
        if !ok {
            return Err(Error::InvalidLambda(modulus));
        }
        let inv = &Scalar::one() / &value;
        let mut inv_pows = Vec::with_capacity(POW_TABLE);
        let mut p = Scalar::one();
        for _ in 0..POW_TABLE {
            inv_pows.push(p.clone());
            p = &p * &inv;
        }
        Ok(LambdaParam {
            value,
            inv_pows,
            modulus,
        })
    }

    /// Parses `RE[,IM]`.
    pub fn parse(text: &str) -> Result<Self> {
        Self::new(parse_complex(text)?)
    }

    pub fn int(n: i64) -> Self {
        Self::new(Scalar::int(n)).expect("|n| > 1")
    }

    pub fn complex(re: f64, im: f64) -> Result<Self> {
        Self::new(Scalar::complex(re, im))
    }

    pub fn value(&self) -> &Scalar {
        &self.value
    }

    pub fn inv(&self) -> &Scalar {
        &self.inv_pows[1]
    }

    pub fn modulus(&self) -> f64 {
        self.modulus
    }

    pub fn is_exact(&self) -> bool {
        self.value.is_exact()
    }

    /// `lambda^{-k}`.
    pub fn inv_pow(&self, k: u32) -> Scalar {
        match self.inv_pows.get(k as usize) {
            Some(p) => p.clone(),
            None => self.inv().powi(k as i32),
        }
    }

    /// `|lambda|^{-k}` in floating point, for envelopes.
    pub fn inv_modulus_pow(&self, k: f64) -> f64 {
        self.modulus.powf(-k)
    }
}

impl std::fmt::Debug for LambdaParam {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "LambdaParam({})", self.value)
    }
}

impl Serialize for LambdaParam {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.value.serialize(s)
    }
}

/// Number of ones in the binary expansion, or the sentinel for negative integers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum BitCount {
    Finite(u32),
    NegInfinity,
}

pub fn bit_count(n: i64) -> BitCount {
    bit_count_wide(n as i128)
}

pub fn bit_count_wide(n: i128) -> BitCount {
    if n < 0 {
        BitCount::NegInfinity
    } else {
        BitCount::Finite(n.count_ones())
    }
}

/// `x0(n) = lambda^{-b(n)}`, zero for negative `n`.
pub fn x0_eval(lambda: &LambdaParam, n: i64) -> Scalar {
    x0_eval_wide(lambda, n as i128)
}

pub fn x0_eval_wide(lambda: &LambdaParam, n: i128) -> Scalar {
    match bit_count_wide(n) {
        BitCount::NegInfinity => Scalar::zero(),
        BitCount::Finite(b) => lambda.inv_pow(b),
    }
}

/// An x0 value together with a flag raised when a nonzero float value
/// underflowed to the canonical zero.
#[derive(Clone, Debug, Serialize)]
pub struct X0Value {
    pub value: Scalar,
    pub underflow: bool,
}

pub fn x0_eval_flagged(lambda: &LambdaParam, n: i64) -> X0Value {
    let value = x0_eval(lambda, n);
    if n >= 0 && value.is_zero() {
        X0Value {
            value: Scalar::zero(),
            underflow: true,
        }
    } else {
        X0Value {
            value,
            underflow: false,
        }
    }
}

pub fn x0_window(lambda: &LambdaParam, w: Window) -> Result<WindowedSeq> {
    WindowedSeq::from_fn(w, |n| x0_eval(lambda, n))
}

/// `tau^k(x0)(n)`: `x0(n / 2^k)` when `2^k` divides `n`, else zero.
pub fn tau_pow_x0(lambda: &LambdaParam, k: u32, n: i128) -> Scalar {
    if k >= 127 {
        return if n == 0 { Scalar::one() } else { Scalar::zero() };
    }
    let m = 1i128 << k;
    if n.rem_euclid(m) == 0 {
        x0_eval_wide(lambda, n.div_euclid(m))
    } else {
        Scalar::zero()
    }
}

pub fn tau_apply(x: &WindowedSeq, w: Window) -> Result<WindowedSeq> {
    x.tau(w)
}

fn ceil_half(n: i64) -> i64 {
    (n + 1).div_euclid(2)
}

fn random_scalar(rng: &mut ChaCha8Rng, exact: bool) -> Scalar {
    if exact {
        Scalar::ratio(rng.gen_range(-20..=20), rng.gen_range(1..=6))
    } else {
        Scalar::complex(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    }
}

/// Input window needed to evaluate both sides of the intertwining relation on `w`.
pub fn intertwine_input_window(w: Window) -> Result<Window> {
    let lo = ceil_half(w.lo) - 1;
    let hi = w.hi.div_euclid(2).max(lo);
    Window::new(lo, hi)
}

/// `tau(sigma x)` against `sigma^2(tau x)` on `w`.
pub fn intertwine_discrepancy(x: &WindowedSeq, w: Window) -> Result<Discrepancy> {
    let mid = Window::new(ceil_half(w.lo), w.hi.div_euclid(2).max(ceil_half(w.lo)))?;
    let lhs = x.shift(1, mid)?.tau(w)?;
    let rhs = x.tau(w.shifted(-2)?)?.shift(2, w)?;
    lhs.discrepancy(&rhs, w)
}

#[derive(Clone, Debug, Serialize)]
pub struct IntertwineReport {
    pub lambda: LambdaParam,
    pub window: Window,
    pub exact_mode: bool,
    pub on_x0: Discrepancy,
    pub on_random: Vec<Discrepancy>,
}

impl IntertwineReport {
    pub fn worst(&self) -> Discrepancy {
        let mut d = self.on_x0;
        for r in &self.on_random {
            d.merge(r);
        }
        d
    }

    pub fn passed(&self) -> bool {
        self.worst().within(self.exact_mode, 1e-12)
    }
}

impl ToReport for IntertwineReport {
    fn to_report(&self) -> Report {
        let worst = self.worst();
        let mut r = Report::new("intertwine", Status::from_pass(self.passed()))
            .param("lambda", &self.lambda)
            .param("window", self.window)
            .max_error(worst.max_abs)
            .detail("exact_mode", self.exact_mode)
            .detail("on_x0", self.on_x0)
            .detail("random_trials", self.on_random.len());
        if !self.passed() {
            r = r.witness(json!({ "index": worst.worst_index, "error": worst.max_abs }));
        }
        r.finalize()
    }
}

/// Checks `tau sigma = sigma^2 tau` on x0 and on `trials` random inputs.
pub fn verify_intertwine(
    lambda: &LambdaParam,
    w: Window,
    trials: usize,
    seed: u64,
) -> Result<IntertwineReport> {
    let input = intertwine_input_window(w)?;
    let exact = lambda.is_exact();
    let on_x0 = intertwine_discrepancy(&x0_window(lambda, input)?, w)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut on_random = Vec::with_capacity(trials);
    for _ in 0..trials {
        let x = WindowedSeq::from_fn(input, |_| random_scalar(&mut rng, exact))?;
        on_random.push(intertwine_discrepancy(&x, w)?);
    }
    Ok(IntertwineReport {
        lambda: lambda.clone(),
        window: w,
        exact_mode: exact,
        on_x0,
        on_random,
    })
}

/// Number of series terms after which the spreading series for
/// `(id - lambda^{-1} sigma) x0` stops contributing on `w`, apart from index 0.
pub fn truncation_terms(w: Window) -> u32 {
    let reach = w.reach().max(1);
    let ceil_log = 64 - (reach - 1).leading_zeros();
    let ceil_log = if reach == 1 { 0 } else { ceil_log };
    ceil_log + 1
}

/// Right side of the spreading series at `n`, truncated after `terms` terms,
/// with the closed-form geometric remainder added at index 0.
pub fn spreading_series(lambda: &LambdaParam, n: i64, terms: u32) -> Scalar {
    let lm1 = lambda.value() - &Scalar::one();
    let mut acc = Scalar::zero();
    if n == 0 {
        for j in 1..=terms {
            acc += &lambda.inv_pow(j);
        }
        return &(&lm1 * &acc) + &lambda.inv_pow(terms);
    }
    if n < 0 {
        return Scalar::zero();
    }
    let v = (n.trailing_zeros()).min(terms);
    for j in 1..=v {
        acc += &(&lambda.inv_pow(j) * &x0_eval(lambda, n >> j));
    }
    &lm1 * &acc
}

/// `((id - lambda^{-1} sigma) x0)(n)`.
pub fn difference_x0(lambda: &LambdaParam, n: i64) -> Scalar {
    &x0_eval(lambda, n) - &(lambda.inv() * &x0_eval(lambda, n - 1))
}

fn tau_x0(lambda: &LambdaParam, n: i64) -> Scalar {
    tau_pow_x0(lambda, 1, n as i128)
}

#[derive(Clone, Debug, Serialize)]
pub struct IdentityReport {
    pub lambda: LambdaParam,
    pub window: Window,
    pub exact_mode: bool,
    pub truncation_terms: u32,
    pub series_terms: u32,
    /// Difference operator against the truncated spreading series.
    pub series_identity: Discrepancy,
    /// `(id - lambda^{-1} tau)(id - lambda^{-1} sigma) x0 = ((lambda-1)/lambda) tau x0`.
    pub factored_identity: Discrepancy,
    /// `tau x0` against its partial power series.
    pub power_series: Discrepancy,
    pub power_series_bound: f64,
    /// `(id - lambda^{-2} sigma^2) tau x0 = (id - lambda^{-1} sigma) x0`.
    pub spread_difference: Discrepancy,
}

impl IdentityReport {
    /// Whether the partial power series is long enough to be exact on the window.
    pub fn series_saturated(&self) -> bool {
        2 * self.series_terms as i64 > self.window.hi
    }

    pub fn passed(&self) -> bool {
        let e = self.exact_mode;
        let series_ok = if e && self.series_saturated() {
            self.power_series.exact
        } else {
            self.power_series.max_abs <= self.power_series_bound + if e { 0.0 } else { FLOAT_TOL }
        };
        self.series_identity.within(e, FLOAT_TOL)
            && self.factored_identity.within(e, FLOAT_TOL)
            && self.spread_difference.within(e, FLOAT_TOL)
            && series_ok
    }

    pub fn max_error(&self) -> f64 {
        self.series_identity
            .max_abs
            .max(self.factored_identity.max_abs)
            .max(self.power_series.max_abs)
            .max(self.spread_difference.max_abs)
    }
}

impl ToReport for IdentityReport {
    fn to_report(&self) -> Report {
        let mut r = Report::new("x0-identities", Status::from_pass(self.passed()))
            .param("lambda", &self.lambda)
            .param("window", self.window)
            .param("series_terms", self.series_terms)
            .max_error(self.max_error())
            .detail("exact_mode", self.exact_mode)
            .detail("truncation_terms", self.truncation_terms)
            .detail("series_identity", self.series_identity)
            .detail("factored_identity", self.factored_identity)
            .detail("power_series", self.power_series)
            .detail("power_series_bound", self.power_series_bound)
            .detail("spread_difference", self.spread_difference);
        for (name, d) in [
            ("series_identity", &self.series_identity),
            ("factored_identity", &self.factored_identity),
            ("power_series", &self.power_series),
            ("spread_difference", &self.spread_difference),
        ] {
            if !d.within(self.exact_mode, FLOAT_TOL) && name != "power_series" {
                r = r.witness(json!({ "identity": name, "index": d.worst_index, "error": d.max_abs }));
            }
        }
        r.finalize()
    }
}

/// Sup-norm remainder bound for the partial power series of `tau x0` after `t` terms.
pub fn power_series_tail_bound(lambda: &LambdaParam, t: u32) -> f64 {
    let u = 1.0 / lambda.modulus();
    (1.0 + u) / (1.0 - u * u) * lambda.inv_modulus_pow(2.0 * t as f64)
}

/// Evaluates the operator identities for x0 pointwise on `w`.
pub fn verify_identities(lambda: &LambdaParam, w: Window, series_terms: u32) -> Result<IdentityReport> {
    if series_terms == 0 {
        return Err(Error::Precondition("series_terms must be at least 1".into()));
    }
    if w.len() > MAX_WINDOW_LEN {
        return Err(Error::WindowTooLarge { len: w.len() });
    }
    let exact = lambda.is_exact();
    let j_terms = truncation_terms(w);
    let linv = lambda.inv();
    let factor = &(lambda.value() - &Scalar::one()) / lambda.value();

    let mut series_identity = Discrepancy::zero();
    let mut factored_identity = Discrepancy::zero();
    let mut spread_difference = Discrepancy::zero();
    for n in w.indices() {
        let g = difference_x0(lambda, n);
        series_identity.record(n, &(&g - &spreading_series(lambda, n, j_terms)));

        let g_half = if n.rem_euclid(2) == 0 {
            difference_x0(lambda, n.div_euclid(2))
        } else {
            Scalar::zero()
        };
        let lhs = &g - &(linv * &g_half);
        let rhs = &factor * &tau_x0(lambda, n);
        factored_identity.record(n, &(&lhs - &rhs));

        let spread = &tau_x0(lambda, n) - &(&lambda.inv_pow(2) * &tau_x0(lambda, n - 2));
        spread_difference.record(n, &(&spread - &g));
    }

    // Partial sums S(n) = sum_{j<T} lambda^{-2j} g(n-2j) by the two-step recurrence.
    let t = series_terms as i64;
    let l2 = lambda.inv_pow(2);
    let cut = if 2 * t <= w.hi.max(0) {
        Some(lambda.inv_pow(2 * series_terms))
    } else {
        None
    };
    let mut power_series = Discrepancy::zero();
    for n in w.lo..=w.hi.min(-1) {
        power_series.record(n, &tau_x0(lambda, n));
    }
    let mut prev = [Scalar::zero(), Scalar::zero()];
    for n in 0..=w.hi.max(-1) {
        let slot = (n & 1) as usize;
        let mut s = &difference_x0(lambda, n) + &(&l2 * &prev[slot]);
        if let Some(c) = &cut {
            let back = n - 2 * t;
            if back >= 0 {
                s = &s - &(c * &difference_x0(lambda, back));
            }
        }
        if n >= w.lo {
            power_series.record(n, &(&tau_x0(lambda, n) - &s));
        }
        prev[slot] = s;
    }

    Ok(IdentityReport {
        lambda: lambda.clone(),
        window: w,
        exact_mode: exact,
        truncation_terms: j_terms,
        series_terms,
        series_identity,
        factored_identity,
        power_series,
        power_series_bound: power_series_tail_bound(lambda, series_terms),
        spread_difference,
    })
}

/// The extension of a finitely supported `y` to `sum_n y(n) sigma^n tau^k x0`.
#[derive(Clone, Debug)]
pub struct Extension {
    y: FinSeq,
    lambda: LambdaParam,
    pre_shift: i64,
    k: u32,
}

/// Builds the extension with the minimal `k` such that the support of `y`
/// shifted by `pre_shift` fits inside `[1, 2^k]`.
pub fn extend(y: &FinSeq, lambda: &LambdaParam) -> Result<Extension> {
    let (pre_shift, k) = match (y.min_index(), y.max_index()) {
        (Some(lo), Some(_)) => {
            let width = y.width();
            let k = 64 - (width - 1).leading_zeros();
            let k = if width == 1 { 0 } else { k };
            if k > 62 {
                return Err(Error::IndexOverflow(width as i128));
            }
            (check_index(1 - lo as i128)?, k)
        }
        _ => (0, 0),
    };
    Ok(Extension {
        y: y.clone(),
        lambda: lambda.clone(),
        pre_shift,
        k,
    })
}

impl Extension {
    pub fn pre_shift(&self) -> i64 {
        self.pre_shift
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn source(&self) -> &FinSeq {
        &self.y
    }

    /// `x(m) = y(r - p) x0(s)` where `m + p = 2^k s + r` with `1 <= r <= 2^k`.
    pub fn at(&self, m: i64) -> Scalar {
        if self.y.is_zero() {
            return Scalar::zero();
        }
        let q = m as i128 + self.pre_shift as i128;
        let span = 1i128 << self.k;
        let r = (q - 1).rem_euclid(span) + 1;
        let s = (q - r) / span;
        let coeff = self.y.get((r - self.pre_shift as i128) as i64);
        if coeff.is_zero() {
            return Scalar::zero();
        }
        &coeff * &x0_eval_wide(&self.lambda, s)
    }

    pub fn evaluate(&self, w: Window) -> Result<WindowedSeq> {
        WindowedSeq::from_fn(w, |n| self.at(n))
    }

    pub fn certificate(&self, w: Window) -> Result<ExtensionCertificate> {
        if let (Some(lo), Some(hi)) = (self.y.min_index(), self.y.max_index()) {
            if !w.contains(lo) || !w.contains(hi) {
                return Err(Error::InsufficientWindow {
                    lo: w.lo,
                    hi: w.hi,
                    index: if w.contains(lo) { hi } else { lo },
                });
            }
        }
        if w.len() > MAX_WINDOW_LEN {
            return Err(Error::WindowTooLarge { len: w.len() });
        }
        let mut on_support = Discrepancy::zero();
        for (n, v) in self.y.iter() {
            on_support.record(n, &(&self.at(n) - v));
        }
        let mut max_off = 0.0f64;
        let mut worst = None;
        for n in w.indices() {
            if !self.y.get(n).is_zero() {
                continue;
            }
            let a = self.at(n).abs();
            if a > max_off {
                max_off = a;
                worst = Some(n);
            }
        }
        let bound = self.y.sup_norm() / self.lambda.modulus();
        Ok(ExtensionCertificate {
            window: w,
            pre_shift: self.pre_shift,
            k: self.k,
            on_support,
            max_off_support: max_off,
            worst_off_support: worst,
            bound,
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ExtensionCertificate {
    pub window: Window,
    pub pre_shift: i64,
    pub k: u32,
    pub on_support: Discrepancy,
    pub max_off_support: f64,
    pub worst_off_support: Option<i64>,
    /// `|lambda|^{-1} ||y||_inf`.
    pub bound: f64,
}

impl ExtensionCertificate {
    /// Agreement on the support (exact or to `FLOAT_TOL`) and the off-support
    /// bound within `slack`.
    pub fn holds(&self, exact_mode: bool, slack: f64) -> bool {
        self.on_support.within(exact_mode, FLOAT_TOL) && self.max_off_support <= self.bound + slack
    }
}

/// Extension evaluated on `w` together with its certificate.
pub fn extend_on(
    y: &FinSeq,
    lambda: &LambdaParam,
    w: Window,
) -> Result<(WindowedSeq, ExtensionCertificate)> {
    let ext = extend(y, lambda)?;
    Ok((ext.evaluate(w)?, ext.certificate(w)?))
}

/// Reference evaluation of `sum_n y(n) sigma^n tau^k x0` term by term.
pub fn extend_direct(y: &FinSeq, lambda: &LambdaParam, k: u32, w: Window) -> Result<WindowedSeq> {
    WindowedSeq::from_fn(w, |m| {
        let mut acc = Scalar::zero();
        for (n, v) in y.iter() {
            acc += &(v * &tau_pow_x0(lambda, k, m as i128 - n as i128));
        }
        acc
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct LimitRow {
    pub n: u32,
    pub index: i128,
    pub value: Scalar,
    /// Predicted value for `t >= 0`, envelope for `t < 0`.
    pub reference: f64,
    pub ok: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct LimitLawReport {
    pub lambda: LambdaParam,
    pub t: i64,
    pub n_max: u32,
    pub rows: Vec<LimitRow>,
    /// For `t >= 0`: least `n` from which equality holds through `n_max`.
    pub onset: Option<u32>,
    /// Least `n` with `2^n > |t|`.
    pub expected_onset: u32,
}

impl LimitLawReport {
    pub fn passed(&self) -> bool {
        self.rows
            .iter()
            .filter(|r| r.n >= self.expected_onset)
            .all(|r| r.ok)
    }
}

impl ToReport for LimitLawReport {
    fn to_report(&self) -> Report {
        let mut r = Report::new("limit-law", Status::from_pass(self.passed()))
            .param("lambda", &self.lambda)
            .param("t", self.t)
            .param("n_max", self.n_max)
            .detail("onset", self.onset)
            .detail("expected_onset", self.expected_onset)
            .detail("rows", self.rows.len());
        for row in self.rows.iter().filter(|r| r.n >= self.expected_onset && !r.ok) {
            r = r.witness(row);
        }
        r.finalize()
    }
}

fn least_exceeding_power(t: i64) -> u32 {
    let a = t.unsigned_abs();
    if a == 0 {
        0
    } else {
        64 - a.leading_zeros()
    }
}

/// Index of the top set bit of `|t|`.
pub fn top_bit(t: i64) -> u32 {
    63 - t.unsigned_abs().max(1).leading_zeros()
}

/// The limit `x0(2^n + t) -> lambda^{-1} x0(t)` along `n`, or the decay
/// envelope `|lambda|^{-(n - k_t)}` for negative `t`.
pub fn limit_law_check(lambda: &LambdaParam, t: i64, n_max: u32) -> Result<LimitLawReport> {
    let expected_onset = least_exceeding_power(t);
    if n_max < expected_onset || n_max > 120 {
        return Err(Error::Precondition(format!(
            "n_max must satisfy 2^n_max > |t| and n_max <= 120 (t = {t}, n_max = {n_max})"
        )));
    }
    let target = lambda.inv() * &x0_eval(lambda, t);
    let kt = top_bit(t) as f64;
    let mut rows = Vec::new();
    for n in 0..=n_max {
        let index = (1i128 << n) + t as i128;
        let value = x0_eval_wide(lambda, index);
        let (reference, ok) = if t >= 0 {
            let ok = if lambda.is_exact() {
                value == target
            } else {
                (&value - &target).abs() <= 1e-12
            };
            (target.abs(), ok)
        } else {
            let env = lambda.inv_modulus_pow(n as f64 - kt);
            (env, value.abs() <= env * (1.0 + 1e-12))
        };
        rows.push(LimitRow {
            n,
            index,
            value,
            reference,
            ok,
        });
    }
    let onset = if t >= 0 {
        let mut first = None;
        for row in rows.iter().rev() {
            if row.ok {
                first = Some(row.n);
            } else {
                break;
            }
        }
        first
    } else {
        None
    };
    Ok(LimitLawReport {
        lambda: lambda.clone(),
        t,
        n_max,
        rows,
        onset,
        expected_onset,
    })
}

/// Classes of non-principal limits along dyadic sequences.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum ClassLabel {
    Point(i64),
    Class { t: i64, k: u32 },
    Infinity,
}

impl ClassLabel {
    pub fn class(t: i64, k: u32) -> Result<Self> {
        if k == 0 {
            return Err(Error::Precondition("class level k must be positive".into()));
        }
        Ok(ClassLabel::Class { t, k })
    }
}

/// `lambda^{-k} x0(t)` on a class, `x0(t)` at a point, zero at infinity.
pub fn predicted_limit(label: ClassLabel, lambda: &LambdaParam) -> Result<Scalar> {
    match label {
        ClassLabel::Point(t) => Ok(x0_eval(lambda, t)),
        ClassLabel::Class { t, k } => {
            ClassLabel::class(t, k)?;
            Ok(&lambda.inv_pow(k) * &x0_eval(lambda, t))
        }
        ClassLabel::Infinity => Ok(Scalar::zero()),
    }
}

/// Exponents `depth < n_1 < ... < n_k` of the `j`-th member of a class sequence.
fn class_exponents(depth: u32, k: u32, j: u32) -> Vec<u32> {
    let mut out = Vec::with_capacity(k as usize);
    let mut e = depth + 1 + j;
    for _ in 0..k {
        out.push(e);
        e += 1 + j;
    }
    out
}

/// Number of ones in the `j`-th member of the infinity sequence.
fn infinity_bits(depth: u32, j: u32) -> u32 {
    depth / 2 + 1 + j
}

/// Members `t + 2^{n_1} + ... + 2^{n_k}` with `depth < n_1 < ... < n_k` and
/// gaps growing along the sequence. The infinity sequence uses isolated ones
/// above bit `depth` with a growing count, so no fixed `(t, k)` describes it.
pub fn class_sequence(label: ClassLabel, depth: u32, len: u32) -> Result<Vec<i128>> {
    if depth == 0 {
        return Err(Error::Precondition("depth must be at least 1".into()));
    }
    let mut out = Vec::with_capacity(len as usize);
    for j in 0..len {
        let v = match label {
            ClassLabel::Point(t) => t as i128,
            ClassLabel::Class { t, k } => {
                ClassLabel::class(t, k)?;
                let exps = class_exponents(depth, k, j);
                if *exps.last().unwrap() > 126 {
                    return Err(Error::GuardExceeded(format!(
                        "class sequence exponent {} exceeds 126",
                        exps.last().unwrap()
                    )));
                }
                exps.iter().fold(t as i128, |acc, e| acc + (1i128 << e))
            }
            ClassLabel::Infinity => {
                let c = infinity_bits(depth, j);
                let top = depth + 2 * c - 1;
                if top > 126 {
                    return Err(Error::GuardExceeded(format!("exponent {top} exceeds 126")));
                }
                (0..c).fold(0i128, |acc, i| acc + (1i128 << (depth + 1 + 2 * i)))
            }
        };
        out.push(v);
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassLimitReport {
    pub label: ClassLabel,
    pub lambda: LambdaParam,
    pub depth: u32,
    pub prediction: Scalar,
    pub exact_mode: bool,
    pub max_error: f64,
    /// Largest ratio of observed deviation to its allowance.
    pub worst_ratio: f64,
    pub failures: Vec<(i128, f64, f64)>,
}

impl ClassLimitReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

impl ToReport for ClassLimitReport {
    fn to_report(&self) -> Report {
        let mut r = Report::new("class-limit", Status::from_pass(self.passed()))
            .param("label", self.label)
            .param("lambda", &self.lambda)
            .param("depth", self.depth)
            .max_error(self.max_error)
            .detail("prediction", &self.prediction)
            .detail("worst_ratio", self.worst_ratio);
        for (idx, err, allow) in &self.failures {
            r = r.witness(json!({ "index": idx.to_string(), "error": err, "allowance": allow }));
        }
        r.finalize()
    }
}

/// Compares x0 along `class_sequence(label, depth, len)` with the predicted limit.
///
/// Nonnegative offsets must match exactly in exact mode (within `1e-9`
/// otherwise); negative offsets and the infinity class must stay within the
/// decay envelope.
pub fn class_limit_check(
    label: ClassLabel,
    lambda: &LambdaParam,
    depth: u32,
    len: u32,
) -> Result<ClassLimitReport> {
    let prediction = predicted_limit(label, lambda)?;
    let seq = class_sequence(label, depth, len)?;
    let exact = lambda.is_exact();
    let mut max_error = 0.0f64;
    let mut worst_ratio = 0.0f64;
    let mut failures = Vec::new();
    for (j, &idx) in seq.iter().enumerate() {
        let value = x0_eval_wide(lambda, idx);
        let diff = &value - &prediction;
        let err = diff.abs();
        max_error = max_error.max(err);
        let (ok, allow) = match label {
            ClassLabel::Class { t, .. } | ClassLabel::Point(t) if t >= 0 => {
                if exact {
                    (diff.is_exact_zero(), 0.0)
                } else {
                    (err <= 1e-9, 1e-9)
                }
            }
            ClassLabel::Point(_) => (diff.is_zero(), 0.0),
            ClassLabel::Class { t, k } => {
                let n1 = class_exponents(depth, k, j as u32)[0] as f64;
                let env = lambda.inv_modulus_pow(n1 - top_bit(t) as f64);
                (err <= env * (1.0 + 1e-12), env)
            }
            ClassLabel::Infinity => {
                let env = lambda.inv_modulus_pow(infinity_bits(depth, j as u32) as f64);
                (err <= env * (1.0 + 1e-12), env)
            }
        };
        if allow > 0.0 {
            worst_ratio = worst_ratio.max(err / allow);
        }
        if !ok {
            failures.push((idx, err, allow));
        }
    }
    Ok(ClassLimitReport {
        label,
        lambda: lambda.clone(),
        depth,
        prediction,
        exact_mode: exact,
        max_error,
        worst_ratio,
        failures,
    })
}

/// Witness that x0 for `lambda` violates the dyadic limit law of `mu`:
/// `x0(2^n) = lambda^{-1}` for every `n`, while the law of `mu` predicts `mu^{-1}`.
pub fn cross_lambda_gap(lambda: &LambdaParam, mu: &LambdaParam, n: u32) -> f64 {
    let observed = x0_eval_wide(lambda, 1i128 << n.min(120));
    let predicted = mu.inv() * &x0_eval(lambda, 0);
    (&observed - &predicted).abs()
}

/// Exhaustive search limits for the dyadic representation check.
pub const MAX_DISJOINT_ARITY: u32 = 4;
pub const MAX_DISJOINT_BOUND: u32 = 16;

#[derive(Clone, Debug, Serialize)]
pub struct DisjointnessReport {
    pub s: i64,
    pub t: i64,
    pub k: u32,
    pub l: u32,
    pub threshold: u32,
    pub bound: u32,
    pub solutions: u64,
    pub trivial: u64,
    pub nontrivial: Vec<(Vec<u32>, Vec<u32>)>,
}

impl DisjointnessReport {
    pub fn passed(&self) -> bool {
        self.nontrivial.is_empty()
    }
}

impl ToReport for DisjointnessReport {
    fn to_report(&self) -> Report {
        let mut r = Report::new("class-disjointness", Status::from_pass(self.passed()))
            .param("s", self.s)
            .param("t", self.t)
            .param("k", self.k)
            .param("l", self.l)
            .param("threshold", self.threshold)
            .param("bound", self.bound)
            .detail("solutions", self.solutions)
            .detail("trivial", self.trivial);
        for (n, m) in self.nontrivial.iter().take(16) {
            r = r.witness(json!({ "n": n, "m": m }));
        }
        r.finalize()
    }
}

fn increasing_tuples(k: u32, lo: u32, hi: u32) -> Vec<Vec<u32>> {
    fn rec(k: u32, start: u32, hi: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if k == 0 {
            out.push(cur.clone());
            return;
        }
        let mut e = start;
        while e + k - 1 <= hi {
            cur.push(e);
            rec(k - 1, e + 1, hi, cur, out);
            cur.pop();
            e += 1;
        }
    }
    let mut out = Vec::new();
    rec(k, lo, hi, &mut Vec::new(), &mut out);
    out
}

/// Searches `s + 2^{n_1} + ... + 2^{n_k} = t + 2^{m_1} + ... + 2^{m_l}` over
/// strictly increasing exponents in `[threshold, bound]`.
pub fn class_disjointness_check(
    s: i64,
    t: i64,
    k: u32,
    l: u32,
    threshold: u32,
    bound: u32,
) -> Result<DisjointnessReport> {
    if k == 0 || l == 0 {
        return Err(Error::Precondition("k and l must be positive".into()));
    }
    if k > MAX_DISJOINT_ARITY || l > MAX_DISJOINT_ARITY || bound > MAX_DISJOINT_BOUND {
        return Err(Error::GuardExceeded(format!(
            "k, l <= {MAX_DISJOINT_ARITY} and bound <= {MAX_DISJOINT_BOUND} required"
        )));
    }
    let gap = (s as i128 - t as i128).unsigned_abs();
    if threshold >= 100 || (1u128 << threshold) <= gap {
        return Err(Error::Precondition(format!(
            "2^threshold must exceed |s - t| = {gap}"
        )));
    }
    let left = increasing_tuples(k, threshold, bound);
    let mut table: HashMap<i128, Vec<usize>> = HashMap::new();
    for (i, tup) in left.iter().enumerate() {
        let v = tup.iter().fold(s as i128, |a, e| a + (1i128 << e));
        table.entry(v).or_default().push(i);
    }
    let mut solutions = 0;
    let mut trivial = 0;
    let mut nontrivial = Vec::new();
    for m in increasing_tuples(l, threshold, bound) {
        let v = m.iter().fold(t as i128, |a, e| a + (1i128 << e));
        if let Some(hits) = table.get(&v) {
            for &i in hits {
                solutions += 1;
                if s == t && left[i] == m {
                    trivial += 1;
                } else {
                    nontrivial.push((left[i].clone(), m.clone()));
                }
            }
        }
    }
    Ok(DisjointnessReport {
        s,
        t,
        k,
        l,
        threshold,
        bound,
        solutions,
        trivial,
        nontrivial,
    })
}

/// Least threshold with `2^threshold > |s - t|`.
pub fn minimal_threshold(s: i64, t: i64) -> u32 {
    let gap = (s as i128 - t as i128).unsigned_abs();
    if gap == 0 {
        0
    } else {
        128 - gap.leading_zeros()
    }
}

/// A measure on finitely many points and dyadic classes.
#[derive(Clone, Debug, Default, Serialize)]
pub struct ClassMeasure {
    pub point_mass: FinSeq,
    pub class_mass: BTreeMap<(i64, u32), Scalar>,
    pub infinity_mass: Scalar,
}

impl ClassMeasure {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn unit(label: ClassLabel) -> Result<Self> {
        Self::new().with(label, Scalar::one())
    }

    /// Adds mass `c` at `label`.
    pub fn with(mut self, label: ClassLabel, c: Scalar) -> Result<Self> {
        match label {
            ClassLabel::Point(t) => self.point_mass = self.point_mass.add(&FinSeq::single(t, c)),
            ClassLabel::Class { t, k } => {
                ClassLabel::class(t, k)?;
                let e = self.class_mass.entry((t, k)).or_default();
                *e += &c;
                if e.is_zero() {
                    self.class_mass.remove(&(t, k));
                }
            }
            ClassLabel::Infinity => self.infinity_mass += &c,
        }
        Ok(self)
    }

    pub fn labels(&self) -> Vec<(ClassLabel, Scalar)> {
        let mut out: Vec<(ClassLabel, Scalar)> = self
            .point_mass
            .iter()
            .map(|(t, c)| (ClassLabel::Point(t), c.clone()))
            .collect();
        for ((t, k), c) in &self.class_mass {
            out.push((ClassLabel::Class { t: *t, k: *k }, c.clone()));
        }
        if !self.infinity_mass.is_zero() {
            out.push((ClassLabel::Infinity, self.infinity_mass.clone()));
        }
        out
    }
}

/// `a_t = mu({t}) + sum_k lambda^{-k} mu(X_t^k)`.
pub fn measure_to_l1(mu: &ClassMeasure, lambda: &LambdaParam) -> Result<FinSeq> {
    let mut entries: Vec<(i64, Scalar)> = mu.point_mass.iter().map(|(t, c)| (t, c.clone())).collect();
    for ((t, k), c) in &mu.class_mass {
        entries.push((*t, &lambda.inv_pow(*k) * c));
    }
    FinSeq::from_entries(entries)
}

/// Test functionals `sigma^m tau^k x0` evaluated on a window.
#[derive(Clone, Debug, Serialize)]
pub struct GeneratorBattery {
    pub generators: Vec<(i64, u32)>,
    pub window: Window,
}

impl GeneratorBattery {
    pub fn new(generators: Vec<(i64, u32)>, window: Window) -> Result<Self> {
        for &(m, _) in &generators {
            if !window.contains(m) {
                return Err(Error::InsufficientWindow {
                    lo: window.lo,
                    hi: window.hi,
                    index: m,
                });
            }
        }
        Ok(GeneratorBattery { generators, window })
    }

    /// `sigma^m tau^k x0` for `|m| <= 8`, `k <= 4` on radius `2^14`.
    pub fn default_battery() -> Self {
        let mut g = Vec::new();
        for m in -8..=8 {
            for k in 0..=4 {
                g.push((m, k));
            }
        }
        GeneratorBattery::new(g, Window::radius(1 << 14).expect("valid")).expect("covers shifts")
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn eval(&self, lambda: &LambdaParam, g: usize, n: i64) -> Scalar {
        let (m, k) = self.generators[g];
        tau_pow_x0(lambda, k, n as i128 - m as i128)
    }

    /// Value on a class by the limit rule: `lambda^{-k} x(t)` on `X_t^k`, zero at infinity.
    pub fn eval_class(&self, lambda: &LambdaParam, g: usize, label: ClassLabel) -> Scalar {
        match label {
            ClassLabel::Point(t) => self.eval(lambda, g, t),
            ClassLabel::Class { t, k } => &lambda.inv_pow(k) * &self.eval(lambda, g, t),
            ClassLabel::Infinity => Scalar::zero(),
        }
    }

    /// Value sampled far out along the class sequence, as an independent
    /// estimate of the class value.
    pub fn sample_class(
        &self,
        lambda: &LambdaParam,
        g: usize,
        label: ClassLabel,
        depth: u32,
    ) -> Result<Scalar> {
        let (m, k) = self.generators[g];
        let idx = *class_sequence(label, depth, 1)?.first().expect("one member");
        Ok(tau_pow_x0(lambda, k, idx - m as i128))
    }

    /// `<x_g, a>` for every generator; the support of `a` must lie in the window.
    pub fn pair(&self, lambda: &LambdaParam, a: &FinSeq) -> Result<Vec<Scalar>> {
        for n in a.support() {
            if !self.window.contains(n) {
                return Err(Error::InsufficientWindow {
                    lo: self.window.lo,
                    hi: self.window.hi,
                    index: n,
                });
            }
        }
        Ok((0..self.len())
            .map(|g| a.pair_with(|n| self.eval(lambda, g, n)))
            .collect())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PairingReport {
    pub lambda: LambdaParam,
    pub generators: usize,
    pub reconstructed: FinSeq,
    pub pairing: Discrepancy,
    /// Rule values against deep samples along the class sequences.
    pub sampled: Discrepancy,
    pub sample_depth: u32,
    pub exact_mode: bool,
}

impl PairingReport {
    pub fn passed(&self) -> bool {
        self.pairing.within(self.exact_mode, FLOAT_TOL)
            && self.sampled.max_abs <= self.lambda.inv_modulus_pow(self.sample_depth as f64 / 2.0 - 4.0)
    }
}

impl ToReport for PairingReport {
    fn to_report(&self) -> Report {
        Report::new("pairing", Status::from_pass(self.passed()))
            .param("lambda", &self.lambda)
            .param("generators", self.generators)
            .max_error(self.pairing.max_abs)
            .detail("reconstructed", &self.reconstructed)
            .detail("pairing", self.pairing)
            .detail("sampled", self.sampled)
            .finalize()
    }
}

/// Compares `<mu, x>` (class values by the limit rule) with `<x, a>` where
/// `a = measure_to_l1(mu)`, for each battery element.
pub fn pairing_check(
    mu: &ClassMeasure,
    battery: &GeneratorBattery,
    lambda: &LambdaParam,
) -> Result<PairingReport> {
    const SAMPLE_DEPTH: u32 = 40;
    let a = measure_to_l1(mu, lambda)?;
    let rhs = battery.pair(lambda, &a)?;
    let labels = mu.labels();
    let mut pairing = Discrepancy::zero();
    let mut sampled = Discrepancy::zero();
    for (g, r) in rhs.iter().enumerate() {
        let mut lhs = Scalar::zero();
        for (label, c) in &labels {
            let rule = battery.eval_class(lambda, g, *label);
            let deep = battery.sample_class(lambda, g, *label, SAMPLE_DEPTH)?;
            sampled.record(g as i64, &(&rule - &deep));
            lhs += &(c * &rule);
        }
        pairing.record(g as i64, &(&lhs - r));
    }
    Ok(PairingReport {
        lambda: lambda.clone(),
        generators: battery.len(),
        reconstructed: a,
        pairing,
        sampled,
        sample_depth: SAMPLE_DEPTH,
        exact_mode: lambda.is_exact() && mu.labels().iter().all(|(_, c)| c.is_exact()),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct IsometryReport {
    pub lambda: LambdaParam,
    pub delta: f64,
    pub l1_norm: f64,
    pub pairing: Scalar,
    pub witness_sup: f64,
    pub window: Window,
}

impl IsometryReport {
    pub fn passed(&self) -> bool {
        self.pairing.abs() >= self.l1_norm - self.delta && self.witness_sup <= 1.0 + 1e-12
    }
}

impl ToReport for IsometryReport {
    fn to_report(&self) -> Report {
        Report::new("isometry-witness", Status::from_pass(self.passed()))
            .param("lambda", &self.lambda)
            .param("delta", self.delta)
            .max_error((self.l1_norm - self.pairing.abs()).max(0.0))
            .detail("l1_norm", self.l1_norm)
            .detail("pairing", &self.pairing)
            .detail("witness_sup", self.witness_sup)
            .detail("window", self.window)
            .finalize()
    }
}

/// Norming functional for `a`: unimodular phases on the support, extended.
pub fn isometry_witness(a: &FinSeq, lambda: &LambdaParam, delta: f64) -> Result<IsometryReport> {
    if a.is_zero() {
        return Err(Error::Precondition("a must be nonzero".into()));
    }
    if delta.is_nan() || delta <= 0.0 {
        return Err(Error::Precondition("delta must be positive".into()));
    }
    let y = FinSeq::from_entries(a.iter().map(|(n, v)| (n, v.phase_conj())))?;
    let ext = extend(&y, lambda)?;
    let pairing = a.pair_with(|n| ext.at(n));
    let lo = a.min_index().expect("nonzero");
    let hi = a.max_index().expect("nonzero");
    let margin = (4i128 << ext.k()).min(1 << 20) as i64;
    let window = Window::new(
        check_index(lo as i128 - margin as i128)?,
        check_index(hi as i128 + margin as i128)?,
    )?;
    let witness_sup = ext.evaluate(window)?.sup_norm();
    Ok(IsometryReport {
        lambda: lambda.clone(),
        delta,
        l1_norm: a.l1_norm(),
        pairing,
        witness_sup,
        window,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two() -> LambdaParam {
        LambdaParam::int(2)
    }

    #[test]
    fn lambda_validation() {
        assert!(LambdaParam::new(Scalar::int(1)).is_err());
        assert!(LambdaParam::new(Scalar::ratio(-1, 2)).is_err());
        assert!(LambdaParam::new(Scalar::ratio(3, 2)).is_ok());
        assert!(LambdaParam::complex(0.6, 0.6).is_err());
        assert!(LambdaParam::complex(1.5, 0.5).is_ok());
        assert!(LambdaParam::parse("2").unwrap().is_exact());
    }

    #[test]
    fn bit_counts() {
        assert_eq!(bit_count(3), BitCount::Finite(2));
        assert_eq!(bit_count(4), BitCount::Finite(1));
        assert_eq!(bit_count(-7), BitCount::NegInfinity);
    }

    #[test]
    fn x0_first_values() {
        let l = two();
        let expected = [(1, 1), (1, 2), (1, 2), (1, 4), (1, 2), (1, 4), (1, 4), (1, 8), (1, 2)];
        for (n, (p, q)) in expected.iter().enumerate() {
            assert_eq!(x0_eval(&l, n as i64), Scalar::ratio(*p, *q));
        }
        assert_eq!(x0_eval(&l, -5), Scalar::zero());
        assert_eq!(x0_eval(&l, 1 << 10), Scalar::ratio(1, 2));
    }

    #[test]
    fn x0_underflow_flag() {
        let l = LambdaParam::new(Scalar::real(1e200)).unwrap();
        let v = x0_eval_flagged(&l, 7);
        assert!(v.underflow);
        assert!(v.value.is_exact_zero());
        assert!(!x0_eval_flagged(&l, 0).underflow);
    }

    #[test]
    fn tau_display() {
        let l = two();
        let x = x0_window(&l, Window::new(0, 8).unwrap()).unwrap();
        let t = tau_apply(&x, Window::new(0, 16).unwrap()).unwrap();
        let expected = [(1, 1), (0, 1), (1, 2), (0, 1), (1, 2), (0, 1), (1, 4), (0, 1), (1, 2)];
        for (n, (p, q)) in expected.iter().enumerate() {
            assert_eq!(t.at(n as i64).unwrap(), &Scalar::ratio(*p, *q));
        }
        let tt = tau_apply(&t, Window::new(0, 32).unwrap()).unwrap();
        assert_eq!(tt.at(4).unwrap(), &Scalar::ratio(1, 2));
    }

    #[test]
    fn intertwine_exact() {
        let r = verify_intertwine(&two(), Window::radius(64).unwrap(), 3, 0).unwrap();
        assert!(r.passed());
        assert!(r.worst().exact);
    }

    #[test]
    fn intertwine_tiny_windows() {
        for (lo, hi) in [(1, 1), (-1, -1), (0, 0), (3, 3), (-3, 2)] {
            let r = verify_intertwine(&two(), Window::new(lo, hi).unwrap(), 2, 1).unwrap();
            assert!(r.passed(), "{lo}..{hi}");
        }
    }

    #[test]
    fn identities_exact_small() {
        let r = verify_identities(&two(), Window::radius(1 << 10).unwrap(), 600).unwrap();
        assert!(r.passed(), "{r:?}");
        assert!(r.series_identity.exact && r.power_series.exact);
    }

    #[test]
    fn series_at_zero_and_negative() {
        let l = two();
        let j = truncation_terms(Window::radius(1024).unwrap());
        assert_eq!(spreading_series(&l, 0, j), Scalar::one());
        assert_eq!(difference_x0(&l, 0), Scalar::one());
        assert_eq!(spreading_series(&l, -3, j), Scalar::zero());
        assert_eq!(difference_x0(&l, -3), Scalar::zero());
    }

    #[test]
    fn short_power_series_within_tail() {
        let l = two();
        let r = verify_identities(&l, Window::radius(200).unwrap(), 5).unwrap();
        assert!(!r.power_series.exact);
        assert!(r.power_series.max_abs <= r.power_series_bound);
        assert!(r.passed());
    }

    #[test]
    fn identities_complex() {
        let l = LambdaParam::complex(1.5, 0.5).unwrap();
        let r = verify_identities(&l, Window::radius(256).unwrap(), 200).unwrap();
        assert!(r.passed(), "{r:?}");
    }

    #[test]
    fn extension_of_point_mass() {
        let l = two();
        let ext = extend(&FinSeq::delta(1), &l).unwrap();
        assert_eq!(ext.k(), 0);
        assert_eq!(ext.pre_shift(), 0);
        for n in -10..40 {
            assert_eq!(ext.at(n), x0_eval(&l, n - 1));
        }
        let cert = ext.certificate(Window::radius(64).unwrap()).unwrap();
        assert!(cert.holds(true, 0.0));
        assert_eq!(cert.max_off_support, 0.5);
    }

    #[test]
    fn extension_of_zero() {
        let ext = extend(&FinSeq::zero(), &two()).unwrap();
        assert!(ext.evaluate(Window::radius(10).unwrap()).unwrap().to_finseq().is_zero());
    }

    #[test]
    fn extension_matches_direct_sum() {
        let l = LambdaParam::int(3);
        let y = FinSeq::from_entries([(-3, Scalar::int(2)), (0, Scalar::ratio(-1, 2)), (2, Scalar::int(5))])
            .unwrap();
        let ext = extend(&y, &l).unwrap();
        assert_eq!(ext.k(), 3);
        let w = Window::radius(300).unwrap();
        let direct = extend_direct(&y, &l, ext.k(), w).unwrap();
        assert!(ext.evaluate(w).unwrap().discrepancy(&direct, w).unwrap().exact);
    }

    #[test]
    fn extension_window_must_cover_support() {
        let ext = extend(&FinSeq::delta(50), &two()).unwrap();
        assert!(ext.certificate(Window::radius(10).unwrap()).is_err());
    }

    #[test]
    fn limit_laws() {
        let l = two();
        let r = limit_law_check(&l, 3, 10).unwrap();
        assert!(r.passed());
        assert_eq!(r.onset, Some(2));
        assert_eq!(r.rows[5].value, Scalar::ratio(1, 8));
        let r = limit_law_check(&l, 0, 10).unwrap();
        assert_eq!(r.onset, Some(0));
        let r = limit_law_check(&l, -1, 20).unwrap();
        assert!(r.passed());
        assert_eq!(r.rows[20].value, Scalar::Exact(num_rational::BigRational::new(1.into(), (1i64 << 20).into())));
        assert!(limit_law_check(&l, 100, 3).is_err());
    }

    #[test]
    fn class_predictions() {
        let l = two();
        assert_eq!(predicted_limit(ClassLabel::Class { t: 0, k: 2 }, &l).unwrap(), Scalar::ratio(1, 4));
        assert_eq!(predicted_limit(ClassLabel::Point(5), &l).unwrap(), Scalar::ratio(1, 4));
        assert_eq!(predicted_limit(ClassLabel::Infinity, &l).unwrap(), Scalar::zero());
        assert!(predicted_limit(ClassLabel::Class { t: 0, k: 0 }, &l).is_err());
        for label in [
            ClassLabel::Class { t: 0, k: 2 },
            ClassLabel::Class { t: -37, k: 3 },
            ClassLabel::Class { t: 50, k: 4 },
        ] {
            let r = class_limit_check(label, &l, 60, 6).unwrap();
            assert!(r.passed(), "{label:?}");
        }
        let r = class_limit_check(ClassLabel::Infinity, &l, 40, 6).unwrap();
        assert!(r.passed());
        assert!(class_limit_check(ClassLabel::Infinity, &l, 60, 6).is_err());
    }

    #[test]
    fn disjointness_examples() {
        let r = class_disjointness_check(0, 0, 2, 2, 1, 12).unwrap();
        assert!(r.passed());
        assert_eq!(r.trivial, 66);
        let r = class_disjointness_check(0, 1, 1, 1, 1, 12).unwrap();
        assert_eq!(r.solutions, 0);
        let r = class_disjointness_check(0, 0, 1, 2, 1, 12).unwrap();
        assert_eq!(r.solutions, 0);
        assert!(class_disjointness_check(0, 5, 1, 1, 2, 12).is_err());
    }

    #[test]
    fn disjointness_detects_low_thresholds() {
        let r = class_disjointness_check(1, 0, 1, 1, 3, 8).unwrap();
        assert!(r.passed());
        let n = increasing_tuples(2, 0, 3);
        assert_eq!(n.len(), 6);
    }

    #[test]
    fn measures_to_sequences() {
        let l = two();
        let a = measure_to_l1(&ClassMeasure::unit(ClassLabel::Point(3)).unwrap(), &l).unwrap();
        assert_eq!(a, FinSeq::delta(3));
        let a = measure_to_l1(&ClassMeasure::unit(ClassLabel::Class { t: 0, k: 1 }).unwrap(), &l).unwrap();
        assert_eq!(a, FinSeq::single(0, Scalar::ratio(1, 2)));
        let a = measure_to_l1(&ClassMeasure::unit(ClassLabel::Infinity).unwrap(), &l).unwrap();
        assert!(a.is_zero());
    }

    #[test]
    fn pairing_consistency() {
        let l = two();
        let mu = ClassMeasure::new()
            .with(ClassLabel::Point(3), Scalar::ratio(2, 3))
            .unwrap()
            .with(ClassLabel::Class { t: 5, k: 2 }, Scalar::int(-1))
            .unwrap()
            .with(ClassLabel::Class { t: -4, k: 1 }, Scalar::int(7))
            .unwrap()
            .with(ClassLabel::Infinity, Scalar::int(4))
            .unwrap();
        let r = pairing_check(&mu, &GeneratorBattery::default_battery(), &l).unwrap();
        assert!(r.passed(), "{r:?}");
        assert!(r.pairing.exact);
    }

    #[test]
    fn isometry_witnesses() {
        let l = two();
        let a = FinSeq::from_entries([(0, Scalar::one()), (1, Scalar::int(-1))]).unwrap();
        let r = isometry_witness(&a, &l, 1e-9).unwrap();
        assert!(r.passed());
        assert_eq!(r.pairing, Scalar::int(2));
        let r = isometry_witness(&FinSeq::delta(17), &l, 1e-9).unwrap();
        assert_eq!(r.pairing, Scalar::one());
    }

    #[test]
    fn other_lambda_breaks_limit_law() {
        assert!(cross_lambda_gap(&two(), &LambdaParam::int(3), 30) > 0.1);
        assert_eq!(cross_lambda_gap(&two(), &two(), 30), 0.0);
    }
}
