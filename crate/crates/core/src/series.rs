//! Truncated Laurent series with exact rational coefficients, in one variable
//! (`PowerSeries`) and in two variables (`BiSeries`, box truncation).
//!
//! A univariate series with truncation `N` knows its coefficients at every
//! exponent `< N`. A bivariate series knows its coefficients on the box
//! `a < N_q, b < N_p`; either bound may be absent, meaning the series is exact
//! in that variable.

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rat::{qi, Q};

/// Internal stand-in for an absent truncation bound.
const INF: i64 = i64::MAX / 8;

fn badd(a: i64, b: i64) -> i64 {
    if a >= INF || b >= INF {
        INF
    } else {
        a + b
    }
}

fn opt(n: i64) -> Option<i64> {
    if n >= INF {
        None
    } else {
        Some(n)
    }
}

fn all_integral<'a, I: IntoIterator<Item = &'a Q>>(it: I) -> bool {
    it.into_iter().all(|c| c.denom().is_one())
}

fn unopt(n: Option<i64>) -> i64 {
    n.unwrap_or(INF).min(INF)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Var {
    Q,
    P,
}

// ---------------------------------------------------------------------------
// univariate

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PowerSeries {
    truncation: i64,
    coeffs: BTreeMap<i64, Q>,
}

impl PowerSeries {
    pub fn zero(truncation: i64) -> Self {
        PowerSeries { truncation, coeffs: BTreeMap::new() }
    }

    pub fn one(truncation: i64) -> Self {
        Self::monomial(qi(1), 0, truncation)
    }

    pub fn monomial(c: Q, e: i64, truncation: i64) -> Self {
        Self::from_coeffs([(e, c)], truncation)
    }

    /// Builds a series from (exponent, coefficient) pairs; entries at or past
    /// the truncation and zero entries are dropped. Repeated exponents add up.
    pub fn from_coeffs<I: IntoIterator<Item = (i64, Q)>>(it: I, truncation: i64) -> Self {
        let mut coeffs: BTreeMap<i64, Q> = BTreeMap::new();
        for (e, c) in it {
            if e < truncation && !c.is_zero() {
                let slot = coeffs.entry(e).or_insert_with(Q::zero);
                *slot += c;
                if slot.is_zero() {
                    coeffs.remove(&e);
                }
            }
        }
        PowerSeries { truncation, coeffs }
    }

    /// Coefficients `c[0], c[1], ...` at exponents `start, start+1, ...`.
    pub fn from_dense(start: i64, c: &[Q], truncation: i64) -> Self {
        Self::from_coeffs(c.iter().cloned().enumerate().map(|(i, x)| (start + i as i64, x)), truncation)
    }

    pub fn truncation(&self) -> i64 {
        self.truncation
    }

    /// Lowest exponent with a nonzero coefficient; the truncation for the zero series.
    pub fn valuation(&self) -> i64 {
        self.coeffs.keys().next().copied().unwrap_or(self.truncation)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, e: i64) -> Q {
        assert!(e < self.truncation, "coefficient q^{e} is beyond the truncation {}", self.truncation);
        self.coeffs.get(&e).cloned().unwrap_or_else(Q::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &Q)> {
        self.coeffs.iter().map(|(e, c)| (*e, c))
    }

    /// Dense coefficients from exponent `start` up to the truncation.
    pub fn dense_from(&self, start: i64) -> Vec<Q> {
        (start..self.truncation).map(|e| self.coeffs.get(&e).cloned().unwrap_or_else(Q::zero)).collect()
    }

    pub fn truncate(&self, n: i64) -> Self {
        let n = n.min(self.truncation);
        PowerSeries { truncation: n, coeffs: self.coeffs.range(..n).map(|(e, c)| (*e, c.clone())).collect() }
    }

    /// Claims the series is known below q^n without checking. Only for
    /// exercising the precision certification with deliberately bad input.
    pub fn relabel_truncation(&self, n: i64) -> Self {
        PowerSeries { truncation: n, coeffs: self.coeffs.range(..n).map(|(e, c)| (*e, c.clone())).collect() }
    }

    pub fn scale(&self, c: &Q) -> Self {
        if c.is_zero() {
            return Self::zero(self.truncation);
        }
        PowerSeries { truncation: self.truncation, coeffs: self.coeffs.iter().map(|(e, x)| (*e, x * c)).collect() }
    }

    /// Multiplication by q^k.
    pub fn shift(&self, k: i64) -> Self {
        PowerSeries { truncation: self.truncation + k, coeffs: self.coeffs.iter().map(|(e, x)| (e + k, x.clone())).collect() }
    }

    pub fn pow(&self, e: u32) -> Self {
        if e == 0 {
            return Self::one(self.truncation - self.valuation());
        }
        let mut acc: Option<Self> = None;
        let mut base = self.clone();
        let mut e = e;
        loop {
            if e & 1 == 1 {
                acc = Some(match acc {
                    None => base.clone(),
                    Some(a) => &a * &base,
                });
            }
            e >>= 1;
            if e == 0 {
                break;
            }
            base = &base * &base;
        }
        acc.unwrap()
    }

    /// Multiplicative inverse of a series whose leading coefficient is nonzero.
    pub fn invert_unit(&self) -> Result<Self> {
        let v = self.valuation();
        if self.is_zero() {
            return Err(Error::ZeroLeadingCoefficient);
        }
        let n = self.truncation - v; // relative precision
        let a: Vec<Q> = self.dense_from(v);
        if a[0].is_one() && all_integral(a.iter()) {
            let a: Vec<BigInt> = a.iter().map(|c| c.numer().clone()).collect();
            let mut r: Vec<BigInt> = Vec::with_capacity(n as usize);
            r.push(BigInt::one());
            for i in 1..n as usize {
                let mut s = BigInt::zero();
                for k in 1..=i {
                    if !a[k].is_zero() {
                        s += &a[k] * &r[i - k];
                    }
                }
                r.push(-s);
            }
            let r: Vec<Q> = r.into_iter().map(Q::from_integer).collect();
            return Ok(Self::from_dense(-v, &r, n - v));
        }
        let a0inv = a[0].recip();
        let mut r: Vec<Q> = Vec::with_capacity(n as usize);
        r.push(a0inv.clone());
        for i in 1..n as usize {
            let mut s = Q::zero();
            for k in 1..=i {
                if !a[k].is_zero() {
                    s += &a[k] * &r[i - k];
                }
            }
            r.push(-s * &a0inv);
        }
        Ok(Self::from_dense(-v, &r, n - v))
    }

    /// f(q) -> f(q^k), as a univariate series.
    pub fn substitute_power_uni(&self, k: i64) -> Self {
        assert!(k >= 1);
        PowerSeries { truncation: k * self.truncation, coeffs: self.coeffs.iter().map(|(e, c)| (k * e, c.clone())).collect() }
    }

    /// Places f(v^k) into a bivariate series as a function of `target` alone.
    pub fn substitute_power(&self, k: i64, target: Var) -> BiSeries {
        assert!(k >= 1);
        let s = self.substitute_power_uni(k);
        BiSeries::from_univariate(&s, target)
    }

    /// The operator q d/dq.
    pub fn theta(&self) -> Self {
        PowerSeries {
            truncation: self.truncation,
            coeffs: self.coeffs.iter().filter(|(e, _)| **e != 0).map(|(e, c)| (*e, c * qi(*e))).collect(),
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "valuation": self.valuation(),
            "truncation": self.truncation,
            "coeffs": self.coeffs.iter().map(|(e, c)| serde_json::json!([e, c.to_string()])).collect::<Vec<_>>(),
        })
    }

    /// Human readable rendering, e.g. `q^-1 + 744 + 196884q + O(q^2)`.
    pub fn render(&self, var: &str) -> String {
        let mut out = String::new();
        for (e, c) in &self.coeffs {
            let neg = c < &Q::zero();
            let mag = if neg { -c.clone() } else { c.clone() };
            if out.is_empty() {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mono = match *e {
                0 => String::new(),
                1 => var.to_string(),
                e => format!("{var}^{e}"),
            };
            if mono.is_empty() {
                out.push_str(&mag.to_string());
            } else if mag.is_one() {
                out.push_str(&mono);
            } else {
                out.push_str(&format!("{mag}{mono}"));
            }
        }
        if out.is_empty() {
            out.push('0');
        }
        out.push_str(&format!(" + O({var}^{})", self.truncation));
        out
    }
}

impl Add for &PowerSeries {
    type Output = PowerSeries;
    fn add(self, o: &PowerSeries) -> PowerSeries {
        let n = self.truncation.min(o.truncation);
        PowerSeries::from_coeffs(self.terms().chain(o.terms()).map(|(e, c)| (e, c.clone())), n)
    }
}

impl Sub for &PowerSeries {
    type Output = PowerSeries;
    fn sub(self, o: &PowerSeries) -> PowerSeries {
        self + &(-o)
    }
}

impl Neg for &PowerSeries {
    type Output = PowerSeries;
    fn neg(self) -> PowerSeries {
        PowerSeries { truncation: self.truncation, coeffs: self.coeffs.iter().map(|(e, c)| (*e, -c)).collect() }
    }
}

impl Mul for &PowerSeries {
    type Output = PowerSeries;
    fn mul(self, o: &PowerSeries) -> PowerSeries {
        let n = (self.truncation + o.valuation()).min(o.truncation + self.valuation());
        if all_integral(self.coeffs.values()) && all_integral(o.coeffs.values()) {
            let a: Vec<(i64, BigInt)> = self.coeffs.iter().map(|(e, c)| (*e, c.numer().clone())).collect();
            let b: Vec<(i64, BigInt)> = o.coeffs.iter().map(|(e, c)| (*e, c.numer().clone())).collect();
            let mut acc: BTreeMap<i64, BigInt> = BTreeMap::new();
            for (ea, ca) in &a {
                for (eb, cb) in &b {
                    let e = ea + eb;
                    if e >= n {
                        break;
                    }
                    *acc.entry(e).or_insert_with(BigInt::zero) += ca * cb;
                }
            }
            return PowerSeries::from_coeffs(acc.into_iter().map(|(e, c)| (e, Q::from_integer(c))), n);
        }
        let mut acc: BTreeMap<i64, Q> = BTreeMap::new();
        for (ea, ca) in &self.coeffs {
            for (eb, cb) in &o.coeffs {
                let e = ea + eb;
                if e >= n {
                    break;
                }
                *acc.entry(e).or_insert_with(Q::zero) += ca * cb;
            }
        }
        PowerSeries::from_coeffs(acc, n)
    }
}

// ---------------------------------------------------------------------------
// bivariate

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BiSeries {
    nq: i64,
    np: i64,
    coeffs: BTreeMap<(i64, i64), Q>,
}

impl BiSeries {
    pub fn zero(nq: Option<i64>, np: Option<i64>) -> Self {
        BiSeries { nq: unopt(nq), np: unopt(np), coeffs: BTreeMap::new() }
    }

    /// The exact constant 1.
    pub fn one() -> Self {
        Self::monomial(qi(1), 0, 0)
    }

    /// Exact monomial c q^a p^b.
    pub fn monomial(c: Q, a: i64, b: i64) -> Self {
        Self::from_coeffs([((a, b), c)], None, None)
    }

    pub fn from_coeffs<I: IntoIterator<Item = ((i64, i64), Q)>>(it: I, nq: Option<i64>, np: Option<i64>) -> Self {
        let (nq, np) = (unopt(nq), unopt(np));
        let mut coeffs: BTreeMap<(i64, i64), Q> = BTreeMap::new();
        for (k, c) in it {
            if k.0 < nq && k.1 < np && !c.is_zero() {
                let slot = coeffs.entry(k).or_insert_with(Q::zero);
                *slot += c;
                if slot.is_zero() {
                    coeffs.remove(&k);
                }
            }
        }
        BiSeries { nq, np, coeffs }
    }

    /// A univariate series viewed as a function of one variable, exact in the other.
    pub fn from_univariate(s: &PowerSeries, var: Var) -> Self {
        match var {
            Var::Q => Self::from_coeffs(s.terms().map(|(e, c)| ((e, 0), c.clone())), Some(s.truncation()), None),
            Var::P => Self::from_coeffs(s.terms().map(|(e, c)| ((0, e), c.clone())), None, Some(s.truncation())),
        }
    }

    /// f(q) g(p).
    pub fn tensor(f: &PowerSeries, g: &PowerSeries) -> Self {
        &Self::from_univariate(f, Var::Q) * &Self::from_univariate(g, Var::P)
    }

    pub fn truncation(&self) -> (Option<i64>, Option<i64>) {
        (opt(self.nq), opt(self.np))
    }

    /// Lowest exponents present in each variable (independently); `None` for the zero series.
    pub fn valuations(&self) -> Option<(i64, i64)> {
        if self.coeffs.is_empty() {
            return None;
        }
        let vq = self.coeffs.keys().map(|k| k.0).min().unwrap();
        let vp = self.coeffs.keys().map(|k| k.1).min().unwrap();
        Some((vq, vp))
    }

    // valuation used for precision bookkeeping: the bound itself for a zero series
    fn vq(&self) -> i64 {
        self.valuations().map(|v| v.0).unwrap_or(self.nq)
    }
    fn vp(&self) -> i64 {
        self.valuations().map(|v| v.1).unwrap_or(self.np)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_exact(&self) -> bool {
        self.nq >= INF && self.np >= INF
    }

    pub fn coeff(&self, a: i64, b: i64) -> Q {
        assert!(a < self.nq && b < self.np, "coefficient ({a},{b}) is outside the box");
        self.coeffs.get(&(a, b)).cloned().unwrap_or_else(Q::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = ((i64, i64), &Q)> {
        self.coeffs.iter().map(|(k, c)| (*k, c))
    }

    pub fn num_terms(&self) -> usize {
        self.coeffs.len()
    }

    pub fn truncate(&self, nq: Option<i64>, np: Option<i64>) -> Self {
        let nq = unopt(nq).min(self.nq);
        let np = unopt(np).min(self.np);
        BiSeries {
            nq,
            np,
            coeffs: self.coeffs.iter().filter(|(k, _)| k.0 < nq && k.1 < np).map(|(k, c)| (*k, c.clone())).collect(),
        }
    }

    pub fn scale(&self, c: &Q) -> Self {
        if c.is_zero() {
            return BiSeries { nq: self.nq, np: self.np, coeffs: BTreeMap::new() };
        }
        BiSeries { nq: self.nq, np: self.np, coeffs: self.coeffs.iter().map(|(k, x)| (*k, x * c)).collect() }
    }

    /// Multiplication by q^dq p^dp.
    pub fn shift(&self, dq: i64, dp: i64) -> Self {
        BiSeries {
            nq: badd(self.nq, dq),
            np: badd(self.np, dp),
            coeffs: self.coeffs.iter().map(|(k, x)| ((k.0 + dq, k.1 + dp), x.clone())).collect(),
        }
    }

    /// Exchanges q and p.
    pub fn swap(&self) -> Self {
        BiSeries { nq: self.np, np: self.nq, coeffs: self.coeffs.iter().map(|(k, x)| ((k.1, k.0), x.clone())).collect() }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = BiSeries::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    fn common_square(&self) -> i64 {
        self.nq.min(self.np)
    }

    fn mirror_check(&self, sign: i64) -> std::result::Result<(), (i64, i64)> {
        let n = self.common_square();
        for ((a, b), c) in &self.coeffs {
            if *a >= n || *b >= n {
                continue;
            }
            let m = self.coeffs.get(&(*b, *a)).cloned().unwrap_or_else(Q::zero);
            if m != c * qi(sign) {
                return Err((*a, *b));
            }
        }
        Ok(())
    }

    /// coeff(a,b) = coeff(b,a) on the common square of the box.
    pub fn is_symmetric(&self) -> bool {
        self.mirror_check(1).is_ok()
    }

    /// coeff(a,b) = -coeff(b,a) on the common square of the box.
    pub fn is_antisymmetric(&self) -> bool {
        self.mirror_check(-1).is_ok()
    }

    /// For antisymmetric s, returns t with (q - p) t = s on the shrunken box.
    ///
    /// Uses q^a p^b - q^b p^a = (q - p) q^b p^b Σ_{i<a-b} q^i p^{a-b-1-i} for a > b.
    /// The output is exact on the square of side floor((N + v)/2).
    pub fn divide_antisym_by_diff(&self) -> Result<Self> {
        let n = self.common_square();
        let s = self.truncate(opt(n), opt(n));
        if let Err((a, b)) = s.mirror_check(-1) {
            return Err(Error::NotAntisymmetric(a, b));
        }
        let v = s.vq().min(s.vp());
        let n2 = if n >= INF { INF } else { (n + v).div_euclid(2) };
        let mut acc: BTreeMap<(i64, i64), Q> = BTreeMap::new();
        for ((a, b), c) in &s.coeffs {
            if a <= b {
                continue;
            }
            for i in 0..(a - b) {
                let key = (b + i, a - 1 - i);
                if key.0 < n2 && key.1 < n2 {
                    *acc.entry(key).or_insert_with(Q::zero) += c;
                }
            }
        }
        Ok(Self::from_coeffs(acc, opt(n2), opt(n2)))
    }

    /// Returns t with (q^k - p^l) t = s, expanding 1/(q^k - p^l) in powers of
    /// q^k/p^l, and checks the identity on the resulting box.
    pub fn divide_by_binomial(&self, k: i64, l: i64) -> Result<Self> {
        assert!(k >= 1 && l >= 1);
        if self.is_zero() {
            return Ok(self.clone());
        }
        let (vq, vp) = self.valuations().unwrap();
        let maxq = self.coeffs.keys().map(|x| x.0).max().unwrap();
        let maxp = self.coeffs.keys().map(|x| x.1).max().unwrap();
        let exact = self.is_exact();
        // effective box for the recurrence
        let nq = if self.nq >= INF { maxq + 1 } else { self.nq };
        let np = if self.np >= INF { maxp + l * ((nq - vq) / k + 2) + 1 } else { self.np };
        // pick the q-bound so that the p-bound stays balanced
        let pbound = |tq: i64| np - l * ((tq - 1 - vq).div_euclid(k) + 1);
        let mut tq = if exact { (maxq - k + 1).max(vq) } else { nq };
        if !exact {
            while tq > vq && pbound(tq) - vp < tq - vq {
                tq -= 1;
            }
        }
        let tp = if exact { maxp - l + 1 } else { pbound(tq) };
        let mut t: BTreeMap<(i64, i64), Q> = BTreeMap::new();
        for a in vq..tq {
            for b in vp..tp.max(vp) {
                let mut acc = Q::zero();
                let mut i = 0;
                while a - i * k >= vq {
                    if let Some(c) = self.coeffs.get(&(a - i * k, b + l * (i + 1))) {
                        acc -= c;
                    }
                    i += 1;
                }
                if !acc.is_zero() {
                    t.insert((a, b), acc);
                }
            }
        }
        let (oq, op) = if exact { (None, None) } else { (opt(tq), opt(tp)) };
        let t = Self::from_coeffs(t, oq, op);
        let binom = BiSeries::from_coeffs([((k, 0), qi(1)), ((0, l), qi(-1))], None, None);
        let back = &binom * &t;
        let (bq, bp) = back.truncation();
        let s = self.truncate(bq, bp);
        let back = back.truncate(s.truncation().0, s.truncation().1);
        if back != s {
            return Err(Error::NotDivisible { k, l });
        }
        Ok(t)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "valuation": self.valuations().map(|v| vec![v.0, v.1]),
            "truncation": [opt(self.nq), opt(self.np)],
            "coeffs": self.coeffs.iter().map(|(k, c)| serde_json::json!([[k.0, k.1], c.to_string()])).collect::<Vec<_>>(),
        })
    }

    fn rows_int(&self) -> BTreeMap<i64, Vec<(i64, BigInt)>> {
        let mut rows: BTreeMap<i64, Vec<(i64, BigInt)>> = BTreeMap::new();
        for ((a, b), c) in &self.coeffs {
            rows.entry(*a).or_default().push((*b, c.numer().clone()));
        }
        rows
    }

    fn rows(&self) -> BTreeMap<i64, Vec<(i64, Q)>> {
        let mut rows: BTreeMap<i64, Vec<(i64, Q)>> = BTreeMap::new();
        for ((a, b), c) in &self.coeffs {
            rows.entry(*a).or_default().push((*b, c.clone()));
        }
        rows
    }
}

fn mul_rows_int(
    r1: &BTreeMap<i64, Vec<(i64, BigInt)>>,
    r2: &BTreeMap<i64, Vec<(i64, BigInt)>>,
    nq: i64,
    np: i64,
) -> BTreeMap<(i64, i64), Q> {
    let lo = r1.keys().next().unwrap() + r2.keys().next().unwrap();
    let hi = (r1.keys().last().unwrap() + r2.keys().last().unwrap()).min(nq - 1);
    let out: Vec<(i64, BTreeMap<i64, BigInt>)> = (lo..=hi)
        .into_par_iter()
        .map(|a| {
            let mut row: BTreeMap<i64, BigInt> = BTreeMap::new();
            for (a1, x) in r1 {
                let Some(y) = r2.get(&(a - a1)) else { continue };
                for (b1, c1) in x {
                    for (b2, c2) in y {
                        let b = b1 + b2;
                        if b < np {
                            *row.entry(b).or_insert_with(BigInt::zero) += c1 * c2;
                        }
                    }
                }
            }
            (a, row)
        })
        .collect();
    let mut coeffs = BTreeMap::new();
    for (a, row) in out {
        for (b, c) in row {
            if !c.is_zero() {
                coeffs.insert((a, b), Q::from_integer(c));
            }
        }
    }
    coeffs
}

impl Add for &BiSeries {
    type Output = BiSeries;
    fn add(self, o: &BiSeries) -> BiSeries {
        let (nq, np) = (self.nq.min(o.nq), self.np.min(o.np));
        BiSeries::from_coeffs(self.terms().chain(o.terms()).map(|(k, c)| (k, c.clone())), opt(nq), opt(np))
    }
}

impl Sub for &BiSeries {
    type Output = BiSeries;
    fn sub(self, o: &BiSeries) -> BiSeries {
        self + &(-o)
    }
}

impl Neg for &BiSeries {
    type Output = BiSeries;
    fn neg(self) -> BiSeries {
        BiSeries { nq: self.nq, np: self.np, coeffs: self.coeffs.iter().map(|(k, c)| (*k, -c)).collect() }
    }
}

impl Mul for &BiSeries {
    type Output = BiSeries;
    fn mul(self, o: &BiSeries) -> BiSeries {
        let nq = badd(self.nq, o.vq()).min(badd(o.nq, self.vq()));
        let np = badd(self.np, o.vp()).min(badd(o.np, self.vp()));
        if self.is_zero() || o.is_zero() {
            return BiSeries::zero(opt(nq), opt(np));
        }
        if all_integral(self.coeffs.values()) && all_integral(o.coeffs.values()) {
            return BiSeries { nq, np, coeffs: mul_rows_int(&self.rows_int(), &o.rows_int(), nq, np) };
        }
        let r1 = self.rows();
        let r2 = o.rows();
        let lo = r1.keys().next().unwrap() + r2.keys().next().unwrap();
        let hi = (r1.keys().last().unwrap() + r2.keys().last().unwrap()).min(nq - 1);
        let out: Vec<(i64, BTreeMap<i64, Q>)> = (lo..=hi)
            .into_par_iter()
            .map(|a| {
                let mut row: BTreeMap<i64, Q> = BTreeMap::new();
                for (a1, x) in &r1 {
                    let Some(y) = r2.get(&(a - a1)) else { continue };
                    for (b1, c1) in x {
                        for (b2, c2) in y {
                            let b = b1 + b2;
                            if b < np {
                                *row.entry(b).or_insert_with(Q::zero) += c1 * c2;
                            }
                        }
                    }
                }
                (a, row)
            })
            .collect();
        let mut coeffs = BTreeMap::new();
        for (a, row) in out {
            for (b, c) in row {
                if !c.is_zero() {
                    coeffs.insert((a, b), c);
                }
            }
        }
        BiSeries { nq, np, coeffs }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::qr;

    fn poly(c: &[(i64, i64)], n: i64) -> PowerSeries {
        PowerSeries::from_coeffs(c.iter().map(|&(e, x)| (e, qi(x))), n)
    }

    #[test]
    fn product_of_binomials() {
        let a = poly(&[(0, 1), (1, 1)], 10);
        let b = poly(&[(0, 1), (1, -1)], 10);
        assert_eq!(&a * &b, poly(&[(0, 1), (2, -1)], 10));
    }

    #[test]
    fn laurent_unit() {
        let a = poly(&[(-1, 1)], 5);
        let b = poly(&[(1, 1)], 5);
        let c = &a * &b;
        assert_eq!(c.coeff(0), qi(1));
        assert_eq!(c.truncation(), 4);
    }

    #[test]
    fn geometric_inverse() {
        let s = poly(&[(0, 1), (1, -1)], 4);
        let inv = s.invert_unit().unwrap();
        assert_eq!(inv, poly(&[(0, 1), (1, 1), (2, 1), (3, 1)], 4));
        assert_eq!(&inv * &s, PowerSeries::one(4));
        let q = poly(&[(1, 1)], 6);
        assert_eq!(q.invert_unit().unwrap(), poly(&[(-1, 1)], 4));
        assert_eq!(PowerSeries::zero(3).invert_unit(), Err(Error::ZeroLeadingCoefficient));
    }

    #[test]
    fn substitution() {
        let s = poly(&[(0, 1), (1, 1)], 3);
        let t = s.substitute_power_uni(2);
        assert_eq!(t, poly(&[(0, 1), (2, 1)], 6));
        let u = poly(&[(-1, 1)], 2).substitute_power(3, Var::P);
        assert_eq!(u.coeff(0, -3), qi(1));
        assert_eq!(u.truncation(), (None, Some(6)));
    }

    #[test]
    fn antisymmetric_division() {
        let d = BiSeries::from_coeffs([((1, 0), qi(1)), ((0, 1), qi(-1))], None, None);
        assert_eq!(d.divide_antisym_by_diff().unwrap(), BiSeries::one());
        let d2 = BiSeries::from_coeffs([((2, 0), qi(1)), ((0, 2), qi(-1))], None, None);
        let want = BiSeries::from_coeffs([((1, 0), qi(1)), ((0, 1), qi(1))], None, None);
        assert_eq!(d2.divide_antisym_by_diff().unwrap(), want);
        let inv = BiSeries::from_coeffs([((-1, 0), qi(1)), ((0, -1), qi(-1))], None, None);
        assert_eq!(inv.divide_antisym_by_diff().unwrap(), BiSeries::monomial(qi(-1), -1, -1));
        let sym = BiSeries::from_coeffs([((1, 0), qi(1)), ((0, 1), qi(1))], None, None);
        assert!(matches!(sym.divide_antisym_by_diff(), Err(Error::NotAntisymmetric(_, _))));
    }

    #[test]
    fn binomial_division() {
        let g = BiSeries::from_coeffs([((0, 0), qi(3)), ((1, 2), qr(1, 2)), ((2, 0), qi(-1))], Some(8), Some(8));
        let b = BiSeries::from_coeffs([((1, 0), qi(1)), ((0, 2), qi(-1))], None, None);
        let s = &b * &g;
        let t = s.divide_by_binomial(1, 2).unwrap();
        let (tq, tp) = t.truncation();
        assert_eq!(t, g.truncate(tq, tp));
        assert!(tq.unwrap() >= 2 && tp.unwrap() >= 2);
        let bad = BiSeries::from_coeffs([((0, 0), qi(1))], Some(8), Some(8));
        assert!(bad.divide_by_binomial(1, 1).is_err());
    }

    #[test]
    fn exact_polynomial_division() {
        let g = BiSeries::from_coeffs([((0, 1), qi(2)), ((3, 0), qi(1))], None, None);
        let b = BiSeries::from_coeffs([((2, 0), qi(1)), ((0, 1), qi(-1))], None, None);
        let s = &b * &g;
        assert_eq!(s.divide_by_binomial(2, 1).unwrap(), g);
    }

    #[test]
    fn bivariate_box_rule() {
        let f = BiSeries::from_coeffs([((-1, 0), qi(1)), ((2, 0), qi(1))], Some(5), None);
        let g = BiSeries::from_coeffs([((1, 1), qi(1))], Some(7), Some(4));
        let h = &f * &g;
        assert_eq!(h.truncation(), (Some(6), Some(4)));
    }

    #[test]
    fn render_series() {
        let s = poly(&[(-1, 1), (0, 744), (1, -3)], 2);
        assert_eq!(s.render("q"), "q^-1 + 744 - 3q + O(q^2)");
    }
}
