//! Convolution powers: norm tables, the central binomial element, Newman's
//! element and finite power-boundedness probes.

use std::f64::consts::PI;
use std::io::Write;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use serde::Serialize;
use serde_json::json;

use crate::error::{Error, Result};
use crate::report::{Report, Status, ToReport};
use crate::scalar::{rational_to_f64, Scalar};
use crate::seq::{FinSeq, INDEX_LIMIT};
use crate::xzero::LambdaParam;

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct PowerRow {
    pub m: u32,
    pub l1: f64,
    pub sup: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct PowerTable {
    pub element: FinSeq,
    pub rows: Vec<PowerRow>,
}

impl PowerTable {
    /// Pairs `(m, n)` with `m + n` in the table where `||a^{m+n}|| > ||a^m|| ||a^n||`
    /// beyond a relative slack of `1e-12`.
    pub fn submultiplicative_violations(&self) -> Vec<(u32, u32)> {
        let mut out = Vec::new();
        let l1: Vec<f64> = self.rows.iter().map(|r| r.l1).collect();
        let len = l1.len();
        for m in 1..=len {
            for n in 1..=len - m {
                if m + n > len {
                    break;
                }
                let lhs = l1[m + n - 1];
                let rhs = l1[m - 1] * l1[n - 1];
                if lhs > rhs * (1.0 + 1e-12) {
                    out.push((m as u32, n as u32));
                }
            }
        }
        out
    }

    pub fn max_l1(&self) -> Option<&PowerRow> {
        self.rows.iter().max_by(|a, b| a.l1.total_cmp(&b.l1))
    }

    /// Writes the `m,l1,sup` table.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        for row in &self.rows {
            wr.serialize(row)?;
        }
        wr.flush()?;
        Ok(())
    }
}

fn check_growth(a: &FinSeq, m: u32) -> Result<()> {
    let reach = a
        .min_index()
        .unwrap_or(0)
        .unsigned_abs()
        .max(a.max_index().unwrap_or(0).unsigned_abs()) as u128;
    if reach * m as u128 > INDEX_LIMIT as u128 {
        return Err(Error::IndexOverflow((reach * m as u128) as i128));
    }
    Ok(())
}

/// Norms of `a^m` for `m = 1..=max_m`, by repeated convolution.
pub fn power_norm_table(a: &FinSeq, max_m: u32) -> Result<PowerTable> {
    if max_m == 0 {
        return Err(Error::Precondition("M must be at least 1".into()));
    }
    check_growth(a, max_m)?;
    let mut rows = Vec::with_capacity(max_m as usize);
    let mut p = a.clone();
    for m in 1..=max_m {
        if m > 1 {
            p = p.convolve(a)?;
        }
        rows.push(PowerRow {
            m,
            l1: p.l1_norm(),
            sup: p.sup_norm(),
        });
    }
    Ok(PowerTable {
        element: a.clone(),
        rows,
    })
}

/// `(delta_0 + delta_1) / 2`.
pub fn binomial_element() -> FinSeq {
    FinSeq::from_entries([(0, Scalar::ratio(1, 2)), (1, Scalar::ratio(1, 2))]).expect("small")
}

/// `5^{-1/2} (delta_0 + delta_1 - delta_2)`.
pub fn newman_element() -> FinSeq {
    let c = 5f64.sqrt().recip();
    FinSeq::from_entries([(0, Scalar::real(c)), (1, Scalar::real(c)), (2, Scalar::real(-c))])
        .expect("small")
}

/// Integer polynomial `1 + z - z^2` underlying Newman's element.
fn newman_integer() -> FinSeq {
    FinSeq::from_entries([(0, Scalar::int(1)), (1, Scalar::int(1)), (2, Scalar::int(-1))])
        .expect("small")
}

/// Elements addressable by name: `newman`, `binomial`, `delta1`, `scalar`
/// (`lambda^{-1} delta_0`) and `double` (`2 delta_0`).
pub fn named_element(name: &str, lambda: Option<&LambdaParam>) -> Result<FinSeq> {
    match name {
        "newman" => Ok(newman_element()),
        "binomial" => Ok(binomial_element()),
        "delta1" => Ok(FinSeq::delta(1)),
        "double" => Ok(FinSeq::single(0, Scalar::int(2))),
        "scalar" => {
            let l = lambda.ok_or_else(|| Error::Parse("element `scalar` needs --lambda".into()))?;
            Ok(FinSeq::single(0, l.inv().clone()))
        }
        other => Err(Error::Parse(format!("unknown element `{other}`"))),
    }
}

fn binomial(n: u32, k: u32) -> BigInt {
    let mut c = BigInt::one();
    for i in 0..k {
        c = c * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    c
}

#[derive(Clone, Debug, Serialize)]
pub struct CentralBinomialReport {
    pub max_m: u32,
    /// `m` where `||a^m||_1 != 1`.
    pub l1_failures: Vec<u32>,
    /// `m` where `||a^m||_inf != 2^{-m} C(m, floor(m/2))`.
    pub sup_failures: Vec<u32>,
    /// `(n, ||a^{2n}||_inf sqrt(pi n))`.
    pub ratios: Vec<(u32, f64)>,
    /// Ratios increase monotonically towards 1 from below.
    pub ratios_converge: bool,
}

impl CentralBinomialReport {
    pub fn ratio_at(&self, n: u32) -> Option<f64> {
        self.ratios.iter().find(|(k, _)| *k == n).map(|(_, r)| *r)
    }

    pub fn passed(&self) -> bool {
        self.l1_failures.is_empty() && self.sup_failures.is_empty() && self.ratios_converge
    }
}

impl ToReport for CentralBinomialReport {
    fn to_report(&self) -> Report {
        let last = self.ratios.last().copied();
        let mut r = Report::new("central-binomial", Status::from_pass(self.passed()))
            .param("max_m", self.max_m)
            .max_error(last.map(|(_, x)| (1.0 - x).abs()).unwrap_or(0.0))
            .detail("last_ratio", last)
            .detail("ratio_at_64", self.ratio_at(64))
            .detail("ratios_converge", self.ratios_converge);
        for m in &self.l1_failures {
            r = r.witness(json!({ "m": m, "clause": "l1" }));
        }
        for m in &self.sup_failures {
            r = r.witness(json!({ "m": m, "clause": "sup" }));
        }
        r.finalize()
    }
}

/// Exact check of `||a^m||_1 = 1` and `||a^m||_inf = 2^{-m} C(m, floor(m/2))`
/// for `a = (delta_0 + delta_1)/2`, with the ratio of `||a^{2n}||_inf` to
/// `1/sqrt(pi n)`.
pub fn central_binomial_check(max_m: u32) -> Result<CentralBinomialReport> {
    if max_m < 2 {
        return Err(Error::Precondition("M must be at least 2".into()));
    }
    let a = binomial_element();
    let one = BigRational::one();
    let mut p = a.clone();
    let mut l1_failures = Vec::new();
    let mut sup_failures = Vec::new();
    let mut ratios = Vec::new();
    for m in 1..=max_m {
        if m > 1 {
            p = p.convolve(&a)?;
        }
        if p.l1_norm_exact() != Some(one.clone()) {
            l1_failures.push(m);
        }
        let expected = BigRational::new(binomial(m, m / 2), BigInt::one() << m as usize);
        let sup = p.sup_norm_exact();
        if sup.as_ref() != Some(&expected) {
            sup_failures.push(m);
        }
        if m % 2 == 0 {
            let n = m / 2;
            let s = sup.map(|q| rational_to_f64(&q)).unwrap_or(f64::NAN);
            ratios.push((n, s * (PI * n as f64).sqrt()));
        }
    }
    let ratios_converge = ratios.windows(2).all(|w| w[0].1 < w[1].1) && ratios.iter().all(|r| r.1 < 1.0);
    Ok(CentralBinomialReport {
        max_m,
        l1_failures,
        sup_failures,
        ratios,
        ratios_converge,
    })
}

/// Midpoint-rule estimate of `(1/2pi) int |f(e^{i theta})|^m d theta`, which
/// dominates `||a^m||_inf`. Requires `samples >= 4 m width(a)`.
pub fn fourier_sup_bound(a: &FinSeq, m: u32, samples: usize) -> Result<f64> {
    let required = (4 * m as u64 * a.width().max(1)) as usize;
    if samples < required || samples == 0 {
        return Err(Error::Resolution { samples, required });
    }
    let n = samples as f64;
    let total: f64 = (0..samples)
        .map(|i| {
            let theta = 2.0 * PI * (i as f64 + 0.5) / n;
            a.fourier_eval(theta).norm().powi(m as i32)
        })
        .sum();
    Ok(total / n)
}

/// Tolerance for comparing quadrature bounds with exact sup norms.
pub const QUADRATURE_TOL: f64 = 1e-6;

#[derive(Clone, Debug, Serialize)]
pub struct QuadratureRow {
    pub m: u32,
    pub exact_sup: f64,
    pub bound: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct QuadratureReport {
    pub rows: Vec<QuadratureRow>,
    pub oversampling: usize,
}

impl QuadratureReport {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.exact_sup <= r.bound + QUADRATURE_TOL)
    }
}

impl ToReport for QuadratureReport {
    fn to_report(&self) -> Report {
        let worst = self
            .rows
            .iter()
            .map(|r| (r.exact_sup - r.bound).max(0.0))
            .fold(0.0, f64::max);
        let mut r = Report::new("fourier-bound", Status::from_pass(self.passed()))
            .param("oversampling", self.oversampling)
            .max_error(worst)
            .detail("rows", &self.rows);
        for row in self.rows.iter().filter(|r| r.exact_sup > r.bound + QUADRATURE_TOL) {
            r = r.witness(row);
        }
        r.finalize()
    }
}

/// Exact `||a^m||_inf` against the quadrature bound at `oversampling` times the
/// minimal resolution, for `m = 1..=max_m`.
pub fn fourier_cross_check(a: &FinSeq, max_m: u32, oversampling: usize) -> Result<QuadratureReport> {
    let table = power_norm_table(a, max_m)?;
    let mut rows = Vec::new();
    for row in &table.rows {
        let samples = oversampling.max(1) * 4 * row.m as usize * a.width().max(1) as usize;
        rows.push(QuadratureRow {
            m: row.m,
            exact_sup: row.sup,
            bound: fourier_sup_bound(a, row.m, samples)?,
        });
    }
    Ok(QuadratureReport { rows, oversampling })
}

#[derive(Clone, Debug, Serialize)]
pub struct ModulusReport {
    pub samples: usize,
    pub max_error: f64,
    pub l1_norm: f64,
    pub l1_error: f64,
}

impl ModulusReport {
    pub fn passed(&self) -> bool {
        self.max_error <= 1e-12 && self.l1_error <= 1e-12
    }
}

impl ToReport for ModulusReport {
    fn to_report(&self) -> Report {
        Report::new("newman-modulus", Status::from_pass(self.passed()))
            .param("samples", self.samples)
            .max_error(self.max_error.max(self.l1_error))
            .detail("l1_norm", self.l1_norm)
            .finalize()
    }
}

/// `|f(e^{i theta})|^2 = 1 - (4/5) cos^2 theta` on a uniform grid, and
/// `||a||_1 = 3/sqrt 5`.
pub fn newman_modulus_check(samples: usize) -> ModulusReport {
    let a = newman_element();
    let mut max_error = 0.0f64;
    for i in 0..samples {
        let theta = 2.0 * PI * i as f64 / samples as f64;
        let lhs = a.fourier_eval(theta).norm_sqr();
        let c = theta.cos();
        let rhs = 1.0 - 0.8 * c * c;
        max_error = max_error.max((lhs - rhs).abs());
    }
    let l1_norm = a.l1_norm();
    ModulusReport {
        samples,
        max_error,
        l1_norm,
        l1_error: (l1_norm - 3.0 / 5f64.sqrt()).abs(),
    }
}

/// Newman power norms from exact integer powers of `1 + z - z^2`, scaled by
/// `5^{-m/2}`. Rows are `(m, l1, sup)` together with the integer sup.
fn newman_powers(max_m: u32) -> Result<(Vec<PowerRow>, Vec<BigInt>)> {
    let base = newman_integer();
    let mut p = base.clone();
    let mut rows = Vec::with_capacity(max_m as usize);
    let mut sups = Vec::with_capacity(max_m as usize);
    let mut five_pow = BigInt::one();
    for m in 1..=max_m {
        if m > 1 {
            p = p.convolve(&base)?;
        }
        five_pow *= 5;
        let l1 = p.l1_norm_exact().expect("integer coefficients");
        let sup = p.sup_norm_exact().expect("integer coefficients");
        let scaled = |q: &BigRational| {
            let sq = q * q / BigRational::from_integer(five_pow.clone());
            rational_to_f64(&sq).sqrt()
        };
        rows.push(PowerRow {
            m,
            l1: scaled(&l1),
            sup: scaled(&sup),
        });
        sups.push(sup.to_integer());
    }
    Ok((rows, sups))
}

/// Newman power table computed through exact integer powers.
pub fn newman_power_table(max_m: u32) -> Result<PowerTable> {
    if max_m == 0 {
        return Err(Error::Precondition("M must be at least 1".into()));
    }
    Ok(PowerTable {
        element: newman_element(),
        rows: newman_powers(max_m)?.0,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct NewmanDecayReport {
    pub max_m: u32,
    pub threshold: f64,
    /// First `m` with `||a^m||_inf < threshold`.
    pub first_below: Option<u32>,
    /// Onset from which strict decrease is demanded.
    pub onset: u32,
    /// `m > onset` with `||a^m||_inf >= ||a^{m-1}||_inf` (exact comparison).
    pub non_decreases: Vec<u32>,
    /// `m > onset` with `||a^m||_inf >= threshold` after the first crossing.
    pub rebounds: Vec<u32>,
    pub sup_at: Vec<(u32, f64)>,
}

impl NewmanDecayReport {
    pub fn crossing_ok(&self) -> bool {
        self.first_below.is_some()
    }

    pub fn strictly_decreasing(&self) -> bool {
        self.non_decreases.is_empty()
    }

    pub fn passed(&self) -> bool {
        self.crossing_ok() && self.strictly_decreasing() && self.rebounds.is_empty()
    }
}

impl ToReport for NewmanDecayReport {
    fn to_report(&self) -> Report {
        let mut r = Report::new("newman-decay", Status::evidence(self.passed()))
            .param("max_m", self.max_m)
            .param("threshold", self.threshold)
            .param("onset", self.onset)
            .detail("first_below", self.first_below)
            .detail("non_decrease_count", self.non_decreases.len())
            .detail("rebound_count", self.rebounds.len())
            .detail("sup_at", &self.sup_at);
        for m in self.non_decreases.iter().take(16) {
            r = r.witness(json!({ "m": m, "clause": "strict-decrease" }));
        }
        for m in self.rebounds.iter().take(16) {
            r = r.witness(json!({ "m": m, "clause": "stays-below-threshold" }));
        }
        r.finalize()
    }
}

/// Sup-norm decay of Newman's powers up to `max_m`: the first crossing below
/// `threshold`, and strict decrease for every `m > onset`.
///
/// Comparisons are exact: `||a^m|| < ||a^{m-1}||` iff `c_m^2 < 5 c_{m-1}^2`
/// for the integer sups `c_m`.
pub fn newman_decay_check(max_m: u32, threshold: f64, onset: u32) -> Result<NewmanDecayReport> {
    if max_m < 2 {
        return Err(Error::Precondition("M must be at least 2".into()));
    }
    let (rows, sups) = newman_powers(max_m)?;
    let first_below = rows.iter().find(|r| r.sup < threshold).map(|r| r.m);
    let mut non_decreases = Vec::new();
    for m in (onset.max(1) + 1)..=max_m {
        let cur = &sups[m as usize - 1];
        let prev = &sups[m as usize - 2];
        if cur * cur >= prev * prev * 5 {
            non_decreases.push(m);
        }
    }
    let rebounds = match first_below {
        Some(f) => rows
            .iter()
            .filter(|r| r.m > f.max(onset) && r.sup >= threshold)
            .map(|r| r.m)
            .collect(),
        None => Vec::new(),
    };
    let sup_at = rows
        .iter()
        .filter(|r| r.m.is_power_of_two() || r.m == max_m || Some(r.m) == first_below)
        .map(|r| (r.m, r.sup))
        .collect();
    Ok(NewmanDecayReport {
        max_m,
        threshold,
        first_below,
        onset,
        non_decreases,
        rebounds,
        sup_at,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct PowerProbeReport {
    pub max_m: u32,
    pub bound: f64,
    pub max_l1: f64,
    pub argmax: u32,
    pub first_violation: Option<u32>,
}

impl PowerProbeReport {
    pub fn holds(&self) -> bool {
        self.first_violation.is_none()
    }
}

impl ToReport for PowerProbeReport {
    fn to_report(&self) -> Report {
        let mut r = Report::new("power-bounded-probe", Status::evidence(self.holds()))
            .param("max_m", self.max_m)
            .param("bound", self.bound)
            .max_error((self.max_l1 - self.bound).max(0.0))
            .detail("max_l1", self.max_l1)
            .detail("argmax", self.argmax)
            .detail("note", "finite evidence, not a proof");
        if let Some(m) = self.first_violation {
            r = r.witness(json!({ "m": m }));
        }
        r.finalize()
    }
}

/// `max_{m <= M} ||a^m||_1` against `K`; finite evidence only.
pub fn power_bounded_probe(a: &FinSeq, max_m: u32, bound: f64) -> Result<PowerProbeReport> {
    let table = power_norm_table(a, max_m)?;
    Ok(probe_from_table(&table, bound))
}

pub fn probe_from_table(table: &PowerTable, bound: f64) -> PowerProbeReport {
    let best = table.max_l1().expect("at least one row");
    PowerProbeReport {
        max_m: table.rows.len() as u32,
        bound,
        max_l1: best.l1,
        argmax: best.m,
        first_violation: table.rows.iter().find(|r| r.l1 > bound).map(|r| r.m),
    }
}

/// `C(2n, n) / 4^n` as an exact rational.
pub fn central_binomial_ratio(n: u32) -> BigRational {
    BigRational::new(binomial(2 * n, n), BigInt::one() << (2 * n) as usize)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomial_rows() {
        let t = power_norm_table(&binomial_element(), 3).unwrap();
        let l1: Vec<f64> = t.rows.iter().map(|r| r.l1).collect();
        let sup: Vec<f64> = t.rows.iter().map(|r| r.sup).collect();
        assert_eq!(l1, vec![1.0, 1.0, 1.0]);
        assert_eq!(sup, vec![0.5, 0.5, 0.375]);
    }

    #[test]
    fn point_mass_and_scalar_rows() {
        let t = power_norm_table(&FinSeq::delta(1), 5).unwrap();
        assert!(t.rows.iter().all(|r| r.l1 == 1.0 && r.sup == 1.0));
        let a = named_element("scalar", Some(&LambdaParam::int(2))).unwrap();
        let t = power_norm_table(&a, 6).unwrap();
        for r in &t.rows {
            assert_eq!(r.l1, 0.5f64.powi(r.m as i32));
            assert_eq!(r.sup, r.l1);
        }
    }

    #[test]
    fn central_binomial_small() {
        let r = central_binomial_check(8).unwrap();
        assert!(r.passed(), "{r:?}");
        assert!(central_binomial_check(1).is_err());
    }

    #[test]
    fn central_binomial_ratio_64() {
        let r = central_binomial_check(128).unwrap();
        let x = r.ratio_at(64).unwrap();
        assert!((x - 1.0).abs() < 0.01, "{x}");
    }

    #[test]
    fn quadrature_guard_and_bound() {
        assert!(matches!(
            fourier_sup_bound(&newman_element(), 4, 10),
            Err(Error::Resolution { .. })
        ));
        let b = fourier_sup_bound(&FinSeq::delta(0), 7, 64).unwrap();
        assert!((b - 1.0).abs() < 1e-14);
        let r = fourier_cross_check(&newman_element(), 16, 2).unwrap();
        assert!(r.passed());
    }

    #[test]
    fn newman_values() {
        let r = newman_modulus_check(1000);
        assert!(r.passed());
        let t = newman_power_table(2).unwrap();
        assert!((t.rows[0].l1 - 1.3416407864998738).abs() < 1e-14);
        assert!((t.rows[0].sup - 0.4472135954999579).abs() < 1e-14);
        assert!((t.rows[1].l1 - 1.4).abs() < 1e-14);
        assert!((t.rows[1].sup - 0.4).abs() < 1e-14);
        let z = newman_element().fourier_eval(PI / 2.0).norm();
        assert!((z - 1.0).abs() < 1e-14);
        let z = newman_element().fourier_eval(0.0).norm();
        assert!((z - 5f64.sqrt().recip()).abs() < 1e-14);
    }

    #[test]
    fn newman_float_and_integer_tables_agree() {
        let a = power_norm_table(&newman_element(), 40).unwrap();
        let b = newman_power_table(40).unwrap();
        for (x, y) in a.rows.iter().zip(&b.rows) {
            assert!((x.l1 - y.l1).abs() < 1e-12 && (x.sup - y.sup).abs() < 1e-12);
        }
    }

    #[test]
    fn probes() {
        let r = power_bounded_probe(&binomial_element(), 20, 1.0).unwrap();
        assert!(r.holds());
        assert_eq!(r.max_l1, 1.0);
        let r = power_bounded_probe(&named_element("double", None).unwrap(), 10, 1.0).unwrap();
        assert_eq!(r.first_violation, Some(1));
        assert!(r.to_report().is_fail());
    }

    #[test]
    fn csv_has_header_and_rows() {
        let t = power_norm_table(&binomial_element(), 4).unwrap();
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert!(s.starts_with("m,l1,sup\n"));
        assert_eq!(s.lines().count(), 5);
    }

    #[test]
    fn submultiplicative_rows() {
        let t = newman_power_table(30).unwrap();
        assert!(t.submultiplicative_violations().is_empty());
    }
}
