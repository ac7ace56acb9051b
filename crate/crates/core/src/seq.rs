//! The convolution algebra l1(Z) at finite support, plus windowed views of
//! bounded sequences.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Indices must stay within +/- this bound.
pub const INDEX_LIMIT: i64 = 1 << 62;

/// Largest window that may be materialized entry by entry.
pub const MAX_WINDOW_LEN: u128 = 1 << 24;

pub fn check_index(n: i128) -> Result<i64> {
    if n.abs() > INDEX_LIMIT as i128 {
        Err(Error::IndexOverflow(n))
    } else {
        Ok(n as i64)
    }
}

/// Finitely supported bilateral sequence, stored sparsely in canonical form
/// (no zero entries).
#[derive(Clone, Debug, Default)]
pub struct FinSeq {
    entries: BTreeMap<i64, Scalar>,
}

impl FinSeq {
    pub fn zero() -> Self {
        Self::default()
    }

    /// Point mass at `n`.
    pub fn delta(n: i64) -> Self {
        Self::single(n, Scalar::one())
    }

    pub fn single(n: i64, value: Scalar) -> Self {
        let mut s = Self::zero();
        s.insert(n, value);
        s
    }

    /// Builds from `(index, value)` pairs, summing repeated indices.
    pub fn from_entries<I>(entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (i64, Scalar)>,
    {
        let mut acc: BTreeMap<i64, Scalar> = BTreeMap::new();
        for (n, v) in entries {
            check_index(n as i128)?;
            *acc.entry(n).or_default() += &v;
        }
        Ok(Self::canonical(acc))
    }

    fn canonical(mut entries: BTreeMap<i64, Scalar>) -> Self {
        entries.retain(|_, v| !v.is_zero());
        FinSeq { entries }
    }

    fn insert(&mut self, n: i64, value: Scalar) {
        if value.is_zero() {
            self.entries.remove(&n);
        } else {
            self.entries.insert(n, value);
        }
    }

    pub fn get(&self, n: i64) -> Scalar {
        self.entries.get(&n).cloned().unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, &Scalar)> + '_ {
        self.entries.iter().map(|(n, v)| (*n, v))
    }

    pub fn support(&self) -> Vec<i64> {
        self.entries.keys().copied().collect()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    /// True when every entry is an exact rational.
    pub fn is_exact(&self) -> bool {
        self.entries.values().all(Scalar::is_exact)
    }

    pub fn min_index(&self) -> Option<i64> {
        self.entries.keys().next().copied()
    }

    pub fn max_index(&self) -> Option<i64> {
        self.entries.keys().next_back().copied()
    }

    /// Number of slots in the support hull; 0 for the zero sequence.
    pub fn width(&self) -> u64 {
        match (self.min_index(), self.max_index()) {
            (Some(lo), Some(hi)) => (hi - lo) as u64 + 1,
            _ => 0,
        }
    }

    pub fn scale(&self, c: &Scalar) -> FinSeq {
        Self::canonical(self.entries.iter().map(|(n, v)| (*n, v * c)).collect())
    }

    pub fn add(&self, other: &FinSeq) -> FinSeq {
        let mut acc = self.entries.clone();
        for (n, v) in &other.entries {
            *acc.entry(*n).or_default() += v;
        }
        Self::canonical(acc)
    }

    pub fn sub(&self, other: &FinSeq) -> FinSeq {
        self.add(&other.scale(&Scalar::int(-1)))
    }

    /// `result(n) = sum_k a(k) b(n - k)`.
    pub fn convolve(&self, other: &FinSeq) -> Result<FinSeq> {
        let mut acc: BTreeMap<i64, Scalar> = BTreeMap::new();
        for (i, x) in &self.entries {
            for (j, y) in &other.entries {
                let n = check_index(*i as i128 + *j as i128)?;
                *acc.entry(n).or_default() += &(x * y);
            }
        }
        Ok(Self::canonical(acc))
    }

    /// m-fold convolution power; `power(0)` is the unit `delta(0)`.
    pub fn power(&self, m: u32) -> Result<FinSeq> {
        let mut result = FinSeq::delta(0);
        let mut base = self.clone();
        let mut e = m;
        while e > 0 {
            if e & 1 == 1 {
                result = result.convolve(&base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.convolve(&base)?;
            }
        }
        Ok(result)
    }

    /// Bilateral shift by `m`: `result(n) = a(n - m)`.
    pub fn shift(&self, m: i64) -> Result<FinSeq> {
        let mut out = BTreeMap::new();
        for (n, v) in &self.entries {
            out.insert(check_index(*n as i128 + m as i128)?, v.clone());
        }
        Ok(FinSeq { entries: out })
    }

    /// `result(n) = conj(a(-n))`.
    pub fn involution(&self) -> FinSeq {
        FinSeq {
            entries: self.entries.iter().map(|(n, v)| (-n, v.conj())).collect(),
        }
    }

    pub fn l1_norm(&self) -> f64 {
        self.entries.values().map(Scalar::abs).sum()
    }

    pub fn sup_norm(&self) -> f64 {
        self.entries.values().map(Scalar::abs).fold(0.0, f64::max)
    }

    /// Exact l1 norm when every entry is rational.
    pub fn l1_norm_exact(&self) -> Option<BigRational> {
        self.entries
            .values()
            .try_fold(BigRational::zero(), |acc, v| v.as_exact().map(|q| acc + q.abs()))
    }

    pub fn sup_norm_exact(&self) -> Option<BigRational> {
        self.entries.values().try_fold(BigRational::zero(), |acc, v| {
            v.as_exact().map(|q| {
                let a = q.abs();
                if a > acc {
                    a
                } else {
                    acc
                }
            })
        })
    }

    /// `sum_n a_n e^{i n theta}`.
    pub fn fourier_eval(&self, theta: f64) -> Complex64 {
        self.entries
            .iter()
            .map(|(n, v)| v.to_complex() * Complex64::from_polar(1.0, *n as f64 * theta))
            .sum()
    }

    /// `sum_n x(n) a_n` against a pointwise-defined bounded sequence.
    pub fn pair_with<F>(&self, mut x: F) -> Scalar
    where
        F: FnMut(i64) -> Scalar,
    {
        let mut acc = Scalar::zero();
        for (n, v) in &self.entries {
            acc += &(&x(*n) * v);
        }
        acc
    }

    /// Exact equality in exact mode; value equality for floats.
    pub fn exactly_equals(&self, other: &FinSeq) -> bool {
        self.entries.len() == other.entries.len()
            && self
                .entries
                .iter()
                .zip(other.entries.iter())
                .all(|((n, a), (m, b))| n == m && a.exactly_equals(b))
    }

    pub fn max_abs_diff(&self, other: &FinSeq) -> f64 {
        self.sub(other).sup_norm()
    }

    pub fn distance(&self, other: &FinSeq) -> Discrepancy {
        let mut d = Discrepancy::zero();
        let diff = self.sub(other);
        for (n, v) in diff.iter() {
            d.record(n, v);
        }
        d
    }
}

impl PartialEq for FinSeq {
    fn eq(&self, other: &Self) -> bool {
        self.exactly_equals(other)
    }
}

impl fmt::Display for FinSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.entries.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .entries
            .iter()
            .map(|(n, v)| format!("({v})d[{n}]"))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl Serialize for FinSeq {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let v: Vec<(i64, &Scalar)> = self.iter().collect();
        v.serialize(s)
    }
}

/// Inclusive integer interval.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Window {
    pub lo: i64,
    pub hi: i64,
}

impl Window {
    pub fn new(lo: i64, hi: i64) -> Result<Self> {
        if lo > hi {
            return Err(Error::InvalidWindow { lo, hi });
        }
        check_index(lo as i128)?;
        check_index(hi as i128)?;
        Ok(Window { lo, hi })
    }

    /// `[-r, r]`.
    pub fn radius(r: i64) -> Result<Self> {
        Self::new(-r, r)
    }

    pub fn contains(&self, n: i64) -> bool {
        self.lo <= n && n <= self.hi
    }

    pub fn covers(&self, other: &Window) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn len(&self) -> u128 {
        (self.hi as i128 - self.lo as i128 + 1) as u128
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn indices(&self) -> impl Iterator<Item = i64> {
        self.lo..=self.hi
    }

    pub fn shifted(&self, m: i64) -> Result<Window> {
        Window::new(
            check_index(self.lo as i128 + m as i128)?,
            check_index(self.hi as i128 + m as i128)?,
        )
    }

    /// Largest modulus of an index in the window.
    pub fn reach(&self) -> u64 {
        self.lo.unsigned_abs().max(self.hi.unsigned_abs())
    }
}

impl fmt::Display for Window {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

/// A bounded sequence known only on a window.
#[derive(Clone, Debug)]
pub struct WindowedSeq {
    window: Window,
    values: Vec<Scalar>,
}

impl WindowedSeq {
    pub fn from_fn<F>(window: Window, mut f: F) -> Result<Self>
    where
        F: FnMut(i64) -> Scalar,
    {
        if window.len() > MAX_WINDOW_LEN {
            return Err(Error::WindowTooLarge { len: window.len() });
        }
        Ok(WindowedSeq {
            window,
            values: window.indices().map(&mut f).collect(),
        })
    }

    pub fn try_from_fn<F>(window: Window, mut f: F) -> Result<Self>
    where
        F: FnMut(i64) -> Result<Scalar>,
    {
        if window.len() > MAX_WINDOW_LEN {
            return Err(Error::WindowTooLarge { len: window.len() });
        }
        let values = window.indices().map(&mut f).collect::<Result<Vec<_>>>()?;
        Ok(WindowedSeq { window, values })
    }

    pub fn window(&self) -> Window {
        self.window
    }

    pub fn get(&self, n: i64) -> Option<&Scalar> {
        if self.window.contains(n) {
            Some(&self.values[(n - self.window.lo) as usize])
        } else {
            None
        }
    }

    pub fn at(&self, n: i64) -> Result<&Scalar> {
        self.get(n).ok_or(Error::InsufficientWindow {
            lo: self.window.lo,
            hi: self.window.hi,
            index: n,
        })
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, &Scalar)> + '_ {
        self.window.indices().zip(self.values.iter())
    }

    /// Restriction to a sub-window.
    pub fn restrict(&self, w: Window) -> Result<WindowedSeq> {
        self.require(w.lo)?;
        self.require(w.hi)?;
        WindowedSeq::try_from_fn(w, |n| self.at(n).cloned())
    }

    fn require(&self, n: i64) -> Result<()> {
        self.at(n).map(|_| ())
    }

    /// Bilateral shift `sigma^m` evaluated on `target`.
    pub fn shift(&self, m: i64, target: Window) -> Result<WindowedSeq> {
        let src = target.shifted(-m)?;
        self.require(src.lo)?;
        self.require(src.hi)?;
        WindowedSeq::try_from_fn(target, |n| self.at(n - m).cloned())
    }

    /// The spreading operator: `x(n/2)` at even `n`, zero at odd `n`, on `target`.
    pub fn tau(&self, target: Window) -> Result<WindowedSeq> {
        let need_lo = (target.lo + 1).div_euclid(2);
        let need_hi = target.hi.div_euclid(2);
        if need_lo <= need_hi {
            self.require(need_lo)?;
            self.require(need_hi)?;
        }
        WindowedSeq::try_from_fn(target, |n| {
            if n.rem_euclid(2) == 0 {
                self.at(n.div_euclid(2)).cloned()
            } else {
                Ok(Scalar::zero())
            }
        })
    }

    pub fn scale(&self, c: &Scalar) -> WindowedSeq {
        WindowedSeq {
            window: self.window,
            values: self.values.iter().map(|v| v * c).collect(),
        }
    }

    /// Pointwise `self + other` on `target`; both must cover it.
    pub fn add(&self, other: &WindowedSeq, target: Window) -> Result<WindowedSeq> {
        WindowedSeq::try_from_fn(target, |n| Ok(self.at(n)? + other.at(n)?))
    }

    pub fn sub(&self, other: &WindowedSeq, target: Window) -> Result<WindowedSeq> {
        WindowedSeq::try_from_fn(target, |n| Ok(self.at(n)? - other.at(n)?))
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(Scalar::abs).fold(0.0, f64::max)
    }

    /// Pointwise discrepancy against another sequence on `target`.
    pub fn discrepancy(&self, other: &WindowedSeq, target: Window) -> Result<Discrepancy> {
        let mut d = Discrepancy::zero();
        for n in target.indices() {
            let diff = self.at(n)? - other.at(n)?;
            d.record(n, &diff);
        }
        Ok(d)
    }

    /// Nonzero entries as a finitely supported sequence.
    pub fn to_finseq(&self) -> FinSeq {
        FinSeq::from_entries(self.iter().map(|(n, v)| (n, v.clone())))
            .expect("window indices are within the guard")
    }
}

/// Largest pointwise deviation between two evaluations.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Discrepancy {
    /// Largest modulus of a difference.
    pub max_abs: f64,
    /// Every difference was an exact zero.
    pub exact: bool,
    /// Index attaining `max_abs`.
    pub worst_index: Option<i64>,
}

impl Discrepancy {
    pub fn zero() -> Self {
        Discrepancy {
            max_abs: 0.0,
            exact: true,
            worst_index: None,
        }
    }

    pub fn record(&mut self, n: i64, diff: &Scalar) {
        if !diff.is_exact_zero() {
            self.exact = false;
        }
        let a = diff.abs();
        if a > self.max_abs || (self.worst_index.is_none() && !diff.is_exact_zero()) {
            self.max_abs = self.max_abs.max(a);
            self.worst_index = Some(n);
        }
    }

    pub fn merge(&mut self, other: &Discrepancy) {
        self.exact &= other.exact;
        if other.max_abs > self.max_abs {
            self.max_abs = other.max_abs;
            self.worst_index = other.worst_index;
        } else if self.worst_index.is_none() {
            self.worst_index = other.worst_index;
        }
    }

    /// Exactly zero when `exact_mode`, else within `tol`.
    pub fn within(&self, exact_mode: bool, tol: f64) -> bool {
        if exact_mode {
            self.exact
        } else {
            self.max_abs <= tol
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn half_sum() -> FinSeq {
        FinSeq::from_entries([(0, Scalar::ratio(1, 2)), (1, Scalar::ratio(1, 2))]).unwrap()
    }

    #[test]
    fn point_masses_convolve_by_adding_indices() {
        assert_eq!(FinSeq::delta(2).convolve(&FinSeq::delta(3)).unwrap(), FinSeq::delta(5));
    }

    #[test]
    fn half_sum_squared() {
        let expected = FinSeq::from_entries([
            (0, Scalar::ratio(1, 4)),
            (1, Scalar::ratio(1, 2)),
            (2, Scalar::ratio(1, 4)),
        ])
        .unwrap();
        let a = half_sum();
        assert_eq!(a.convolve(&a).unwrap(), expected);
        assert_eq!(a.power(2).unwrap(), expected);
        assert_eq!(expected.sup_norm(), 0.5);
    }

    #[test]
    fn unit_and_zero_power() {
        let a = half_sum();
        assert_eq!(FinSeq::delta(0).convolve(&a).unwrap(), a);
        assert_eq!(a.power(0).unwrap(), FinSeq::delta(0));
        assert_eq!(FinSeq::delta(1).power(5).unwrap(), FinSeq::delta(5));
    }

    #[test]
    fn canonical_form_drops_zeros() {
        let s = FinSeq::from_entries([(0, Scalar::one()), (0, Scalar::int(-1)), (3, Scalar::zero())])
            .unwrap();
        assert!(s.is_zero());
        assert_eq!(s.l1_norm(), 0.0);
        assert_eq!(s.sup_norm(), 0.0);
    }

    #[test]
    fn newman_l1_norm() {
        let c = 5f64.sqrt().recip();
        let a = FinSeq::from_entries([
            (0, Scalar::real(c)),
            (1, Scalar::real(c)),
            (2, Scalar::real(-c)),
        ])
        .unwrap();
        assert!((a.l1_norm() - 3.0 / 5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn shifts() {
        assert_eq!(FinSeq::delta(0).shift(3).unwrap(), FinSeq::delta(3));
        let a = half_sum();
        assert_eq!(a.shift(2).unwrap().shift(-2).unwrap(), a);
        assert_eq!(FinSeq::delta(1).convolve(&a).unwrap(), a.shift(1).unwrap());
        assert!(FinSeq::delta(INDEX_LIMIT).shift(1).is_err());
    }

    #[test]
    fn involution_examples() {
        assert_eq!(FinSeq::delta(3).involution(), FinSeq::delta(-3));
        let a = FinSeq::single(1, Scalar::complex(0.0, 1.0));
        let expected = FinSeq::single(-1, Scalar::complex(0.0, -1.0));
        assert_eq!(a.involution(), expected);
        assert_eq!(a.involution().involution(), a);
    }

    #[test]
    fn fourier_of_point_mass_is_one() {
        for k in 0..8 {
            let z = FinSeq::delta(0).fourier_eval(k as f64 * 0.7);
            assert!((z - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn windowed_tau_and_shift() {
        let w = Window::new(-4, 4).unwrap();
        let x = WindowedSeq::from_fn(w, Scalar::int).unwrap();
        let t = x.tau(Window::new(-8, 8).unwrap()).unwrap();
        assert_eq!(t.at(6).unwrap(), &Scalar::int(3));
        assert_eq!(t.at(-5).unwrap(), &Scalar::zero());
        assert!(x.tau(Window::new(-10, 8).unwrap()).is_err());
        let s = x.shift(2, Window::new(-2, 6).unwrap()).unwrap();
        assert_eq!(s.at(6).unwrap(), &Scalar::int(4));
        assert!(x.shift(2, Window::new(-3, 6).unwrap()).is_err());
    }

    #[test]
    fn window_validation() {
        assert!(Window::new(3, 2).is_err());
        assert!(Window::new(0, i64::MAX).is_err());
        assert_eq!(Window::radius(3).unwrap().len(), 7);
    }
}
