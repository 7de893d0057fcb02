//! Level one modular forms as q-expansions: Eisenstein series, Δ, j, bases of
//! M_k, weakly holomorphic forms with a given principal part and modular
//! polynomials read from data files.

use std::collections::{BTreeMap, HashMap};
use std::path::Path;
use std::sync::{OnceLock, RwLock};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::linalg;
use crate::rat::{binom, qbig, qi, sigma, Q};
use crate::series::{BiSeries, PowerSeries};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModularFormSeries {
    pub weight: i64,
    pub series: PowerSeries,
}

impl ModularFormSeries {
    /// c_n, the coefficient of q^n.
    pub fn c(&self, n: i64) -> Q {
        if n < self.series.valuation() {
            Q::zero()
        } else {
            self.series.coeff(n)
        }
    }

    /// Principal part as d -> c_{-d}.
    pub fn principal_part(&self) -> BTreeMap<i64, Q> {
        self.series.terms().filter(|(e, _)| *e < 0).map(|(e, c)| (-e, c.clone())).collect()
    }
}

/// Bernoulli numbers B_0..=B_n (B_1 = -1/2).
pub fn bernoulli(n: usize) -> Vec<Q> {
    let mut b: Vec<Q> = vec![qi(1)];
    for m in 1..=n {
        let mut s = Q::zero();
        for (k, bk) in b.iter().enumerate() {
            s += qbig(binom(m as i64 + 1, k as i64)) * bk;
        }
        b.push(-s / qi(m as i64 + 1));
    }
    b
}

// ---------------------------------------------------------------------------
// memoised building blocks

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
enum Kind {
    Eis(i64),
    Delta,
    J,
}

fn cache() -> &'static RwLock<HashMap<Kind, PowerSeries>> {
    static C: OnceLock<RwLock<HashMap<Kind, PowerSeries>>> = OnceLock::new();
    C.get_or_init(|| RwLock::new(HashMap::new()))
}

fn memo(kind: Kind, n: i64, make: impl FnOnce(i64) -> PowerSeries) -> PowerSeries {
    if let Some(s) = cache().read().unwrap().get(&kind) {
        if s.truncation() >= n {
            return s.truncate(n);
        }
    }
    let s = make(n);
    let mut w = cache().write().unwrap();
    let keep = w.get(&kind).map(|old| old.truncation() < s.truncation()).unwrap_or(true);
    if keep {
        w.insert(kind, s.clone());
    }
    s
}

fn eisenstein_raw(k: i64, n: i64) -> PowerSeries {
    let b = bernoulli(k as usize);
    let c = -qi(2 * k) / &b[k as usize];
    let mut terms = vec![(0, qi(1))];
    for m in 1..n.max(1) {
        terms.push((m, &c * qbig(sigma(m as u64, (k - 1) as u32))));
    }
    PowerSeries::from_coeffs(terms, n)
}

/// Π(1 - q^n)^24 via n a_n = -24 Σ σ(k) a_{n-k}.
fn eta24(n: i64) -> Vec<BigInt> {
    let n = n.max(0) as usize;
    let sg: Vec<BigInt> = (0..n).map(|k| if k == 0 { BigInt::zero() } else { sigma(k as u64, 1) }).collect();
    let mut a: Vec<BigInt> = Vec::with_capacity(n);
    for i in 0..n {
        if i == 0 {
            a.push(BigInt::one());
            continue;
        }
        let mut s = BigInt::zero();
        for k in 1..=i {
            s += &sg[k] * &a[i - k];
        }
        a.push(-24 * s / BigInt::from(i));
    }
    a
}

// ---------------------------------------------------------------------------
// public forms

/// E_k = 1 - (2k/B_k) Σ σ_{k-1}(n) q^n, truncated at q^n.
pub fn eisenstein(k: i64, n: i64) -> Result<ModularFormSeries> {
    if k < 4 || k % 2 != 0 {
        return Err(Error::InvalidWeight(k));
    }
    Ok(ModularFormSeries { weight: k, series: memo(Kind::Eis(k), n, |n| eisenstein_raw(k, n)) })
}

pub fn delta(n: i64) -> ModularFormSeries {
    let s = memo(Kind::Delta, n, |n| {
        let a = eta24(n - 1);
        PowerSeries::from_coeffs(a.into_iter().enumerate().map(|(i, c)| (i as i64 + 1, qbig(c))), n)
    });
    ModularFormSeries { weight: 12, series: s }
}

/// j = E_4^3 / Δ, truncated at q^n.
pub fn j_invariant(n: i64) -> ModularFormSeries {
    let s = memo(Kind::J, n, |n| {
        let e4 = eisenstein(4, n + 1).unwrap().series;
        let inv = delta(n + 2).series.invert_unit().unwrap();
        &e4.pow(3) * &inv
    });
    ModularFormSeries { weight: 0, series: s.truncate(n) }
}

/// dim M_k for level one.
pub fn dim_mk(k: i64) -> usize {
    if k < 0 || k % 2 != 0 {
        return 0;
    }
    if k % 12 == 2 {
        (k / 12) as usize
    } else {
        (k / 12) as usize + 1
    }
}

/// E_4^α E_6^β with 4α + 6β = k and β ∈ {0, 1}.
fn e4e6(k: i64, n: i64) -> PowerSeries {
    let (a, b) = if k % 4 == 0 { (k / 4, 0) } else { ((k - 6) / 4, 1) };
    let mut s = PowerSeries::one(n);
    if a > 0 {
        s = &s * &eisenstein(4, n).unwrap().series.pow(a as u32);
    }
    if b > 0 {
        s = &s * &eisenstein(6, n).unwrap().series;
    }
    s.truncate(n)
}

/// The ladder F_r = E_4^α E_6^β Δ^r, r = 0..dim M_k, with F_r = q^r + O(q^{r+1}).
/// For k = 40 this is F_r = E_4^{10-3r} Δ^r.
pub fn tensor_basis(k: i64, n: i64) -> Result<Vec<PowerSeries>> {
    if k < 0 || k % 2 != 0 || k == 2 {
        return Err(Error::InvalidWeight(k));
    }
    let d = delta(n).series;
    Ok((0..dim_mk(k) as i64)
        .map(|r| if r == 0 { e4e6(k, n) } else { (&e4e6(k - 12 * r, n) * &d.pow(r as u32)).truncate(n) })
        .collect())
}

/// Echelonised basis of M_k: f_i = q^i + O(q^{dim}).
pub fn miller_basis(k: i64, n: i64) -> Result<Vec<PowerSeries>> {
    if k < 0 || k % 2 != 0 {
        return Err(Error::InvalidWeight(k));
    }
    if dim_mk(k) == 0 {
        return Ok(vec![]);
    }
    let mut b = tensor_basis(k, n)?;
    let d = b.len();
    for i in (0..d).rev() {
        for j in (i + 1)..d {
            let c = b[i].coeff(j as i64);
            if !c.is_zero() {
                b[i] = &b[i] - &b[j].scale(&c);
            }
        }
    }
    Ok(b)
}

/// The weakly holomorphic form of weight `weight` with principal part
/// Σ principal[d] q^{-d}, truncated at q^n.
///
/// Built as g / Δ^t with g in M_{weight+12t}, t the pole order; left-over
/// freedom is fixed by making c_0, c_1, ... of the result vanish.
pub fn weakly_holomorphic(weight: i64, principal: &BTreeMap<i64, Q>, n: i64) -> Result<ModularFormSeries> {
    if weight > 0 || weight % 2 != 0 {
        return Err(Error::InvalidWeight(weight));
    }
    let principal: BTreeMap<i64, Q> = principal.iter().filter(|(_, c)| !c.is_zero()).map(|(d, c)| (*d, c.clone())).collect();
    if principal.is_empty() {
        return Err(Error::Unsolvable("empty principal part".into()));
    }
    if let Some((d, _)) = principal.iter().find(|(d, _)| **d <= 0) {
        return Err(Error::Unsolvable(format!("principal part index {d} is not positive")));
    }
    let t = *principal.keys().last().unwrap();
    let k = weight + 12 * t;
    // g and f = g/Δ^t; f known below q^n needs g below q^{n+t}
    let basis = miller_basis(k, n + t + 1)?;
    let dim = basis.len();
    let dinv = delta(n + 3 * t + 2).series.pow(t as u32).invert_unit()?;
    let quot: Vec<PowerSeries> = basis.iter().map(|g| (g * &dinv).truncate(n)).collect();
    // f's coefficient at exponent e as a row in the unknowns
    let row = |e: i64| -> Vec<Q> { quot.iter().map(|f| if e < f.valuation() { Q::zero() } else { f.coeff(e) }).collect() };
    let mut a: Vec<Vec<Q>> = Vec::new();
    let mut y: Vec<Q> = Vec::new();
    for e in -t..0 {
        a.push(row(e));
        y.push(principal.get(&-e).cloned().unwrap_or_else(Q::zero));
    }
    let r0 = linalg::rank(&a, dim);
    if linalg::solve(&a, &y, dim).is_none() {
        let mut aug: Vec<Vec<Q>> = a.iter().zip(&y).map(|(r, v)| r.iter().cloned().chain([v.clone()]).collect()).collect();
        let r1 = linalg::rref(&mut aug, dim + 1).len();
        return Err(Error::Unsolvable(format!("rank {r0} of {} equations in {dim} unknowns, augmented rank {r1}", t)));
    }
    let mut e = 0;
    while linalg::rank(&a, dim) < dim && e < n {
        let r = row(e);
        let mut trial = a.clone();
        trial.push(r.clone());
        if linalg::rank(&trial, dim) > linalg::rank(&a, dim) {
            a.push(r);
            y.push(Q::zero());
        }
        e += 1;
    }
    let x = linalg::solve(&a, &y, dim).expect("consistent system stays consistent");
    let mut f = PowerSeries::zero(n);
    for (c, q) in x.iter().zip(&quot) {
        if !c.is_zero() {
            f = &f + &q.scale(c);
        }
    }
    Ok(ModularFormSeries { weight, series: f })
}

// ---------------------------------------------------------------------------
// modular polynomials

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModularPolynomial {
    pub d: i64,
    /// (i, j) -> coefficient of X^i Y^j
    pub coeffs: BTreeMap<(i64, i64), BigInt>,
}

/// ψ(d) = d Π_{p | d} (1 + 1/p), the X-degree of Φ_d.
pub fn psi(d: i64) -> i64 {
    let mut n = d;
    let mut r = d;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            r = r / p * (p + 1);
            while n % p == 0 {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        r = r / n * (n + 1);
    }
    r
}

impl ModularPolynomial {
    /// Φ_1 = X - Y.
    pub fn phi1() -> Self {
        let mut coeffs = BTreeMap::new();
        coeffs.insert((1, 0), BigInt::one());
        coeffs.insert((0, 1), -BigInt::one());
        ModularPolynomial { d: 1, coeffs }
    }

    pub fn parse(d: i64, text: &str) -> Result<Self> {
        let mut coeffs: BTreeMap<(i64, i64), BigInt> = BTreeMap::new();
        for (no, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let parts: Vec<&str> = line.split_whitespace().collect();
            let bad = || Error::MalformedCoefficients(format!("line {}: {line:?}", no + 1));
            if parts.len() != 3 {
                return Err(bad());
            }
            let i: i64 = parts[0].parse().map_err(|_| bad())?;
            let j: i64 = parts[1].parse().map_err(|_| bad())?;
            let c: BigInt = parts[2].parse().map_err(|_| bad())?;
            if i < 0 || j < 0 {
                return Err(bad());
            }
            *coeffs.entry((i, j)).or_insert_with(BigInt::zero) += c;
        }
        coeffs.retain(|_, c| !c.is_zero());
        let p = ModularPolynomial { d, coeffs };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.d > 1 {
            for ((i, j), c) in &self.coeffs {
                if self.coeffs.get(&(*j, *i)) != Some(c) {
                    return Err(Error::SymmetryViolation(*i, *j));
                }
            }
        }
        let deg = self.coeffs.keys().map(|k| k.0).max().unwrap_or(0);
        if deg != psi(self.d) {
            return Err(Error::DegreeBound { found: deg, expected: psi(self.d) });
        }
        Ok(())
    }

    /// Φ_d(j(q), j(p)) on the box [-ψ, n)^2 (up to the pole shifts).
    pub fn eval_j(&self, n: i64) -> BiSeries {
        let deg = psi(self.d) as u32;
        let j = j_invariant(n + deg as i64).series;
        let mut pw = vec![PowerSeries::one(n + 2 * deg as i64)];
        for i in 1..=deg {
            pw.push(&pw[i as usize - 1] * &j);
        }
        let mut tot: Option<BiSeries> = None;
        for i in 0..=deg as i64 {
            let mut inner: Option<PowerSeries> = None;
            for jj in 0..=deg as i64 {
                if let Some(c) = self.coeffs.get(&(i, jj)) {
                    let t = pw[jj as usize].scale(&qbig(c.clone()));
                    inner = Some(match inner {
                        None => t,
                        Some(s) => &s + &t,
                    });
                }
            }
            if let Some(inner) = inner {
                let term = BiSeries::tensor(&pw[i as usize], &inner);
                tot = Some(match tot {
                    None => term,
                    Some(s) => &s + &term,
                });
            }
        }
        tot.unwrap_or_else(|| BiSeries::zero(Some(n), Some(n)))
    }
}

/// Φ_1 built in; Φ_d for d > 1 read from `source`.
pub fn load_modular_polynomial(d: i64, source: Option<&Path>) -> Result<ModularPolynomial> {
    if d == 1 {
        return Ok(ModularPolynomial::phi1());
    }
    let path = source.ok_or_else(|| Error::FileMissing(format!("no data file given for d = {d}")))?;
    let text = std::fs::read_to_string(path).map_err(|e| Error::FileMissing(format!("{}: {e}", path.display())))?;
    ModularPolynomial::parse(d, &text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::qr;

    #[test]
    fn bernoulli_values() {
        let b = bernoulli(12);
        assert_eq!(b[1], qr(-1, 2));
        assert_eq!(b[4], qr(-1, 30));
        assert_eq!(b[10], qr(5, 66));
        assert_eq!(b[12], qr(-691, 2730));
        assert_eq!(b[7], qi(0));
    }

    #[test]
    fn eisenstein_leading() {
        let e4 = eisenstein(4, 4).unwrap();
        assert_eq!(e4.series.dense_from(0), vec![qi(1), qi(240), qi(2160), qi(6720)]);
        assert_eq!(eisenstein(6, 3).unwrap().c(1), qi(-504));
        assert_eq!(eisenstein(10, 3).unwrap().c(1), qi(-264));
        assert_eq!(eisenstein(3, 3), Err(Error::InvalidWeight(3)));
        assert_eq!(eisenstein(2, 3), Err(Error::InvalidWeight(2)));
    }

    #[test]
    fn delta_and_j() {
        let d = delta(6);
        assert_eq!(d.series.dense_from(1), vec![qi(1), qi(-24), qi(252), qi(-1472), qi(4830)]);
        let j = j_invariant(3);
        assert_eq!(j.series.dense_from(-1), vec![qi(1), qi(744), qi(196884), qi(21493760)]);
        let inv = delta(5).series.invert_unit().unwrap();
        assert_eq!(inv.dense_from(-1), vec![qi(1), qi(24), qi(324), qi(3200)]);
    }

    #[test]
    fn dimensions_and_basis() {
        assert_eq!(dim_mk(2), 0);
        assert_eq!(dim_mk(12), 2);
        assert_eq!(dim_mk(14), 1);
        assert_eq!(dim_mk(40), 4);
        let b = miller_basis(24, 6).unwrap();
        assert_eq!(b.len(), 3);
        for (i, f) in b.iter().enumerate() {
            for j in 0..3 {
                assert_eq!(f.coeff(j), qi((i as i64 == j) as i64));
            }
        }
    }

    #[test]
    fn weight_minus_two() {
        let mut pp = BTreeMap::new();
        pp.insert(1, qi(1));
        let f = weakly_holomorphic(-2, &pp, 5).unwrap();
        assert_eq!(f.c(-1), qi(1));
        assert_eq!(f.c(0), qi(-240));
        let e10 = eisenstein(10, 8).unwrap().series;
        let want = &e10 * &delta(9).series.invert_unit().unwrap();
        assert_eq!(f.series, want.truncate(5));
    }

    #[test]
    fn weight_zero_fixes_constant() {
        let mut pp = BTreeMap::new();
        pp.insert(1, qi(1));
        let f = weakly_holomorphic(0, &pp, 4).unwrap();
        let j = j_invariant(4).series;
        assert_eq!(f.series, &j - &PowerSeries::monomial(qi(744), 0, 4));
        assert!(weakly_holomorphic(-2, &BTreeMap::new(), 4).is_err());
        assert_eq!(weakly_holomorphic(4, &pp, 4).unwrap_err(), Error::InvalidWeight(4));
    }

    #[test]
    fn obstruction_is_reported() {
        // a simple pole in weight -10 would need a nonzero form in M_2
        let mut pp = BTreeMap::new();
        pp.insert(1, qi(1));
        assert!(matches!(weakly_holomorphic(-10, &pp, 4), Err(Error::Unsolvable(_))));
        assert!(weakly_holomorphic(-12, &pp, 4).is_ok());
    }

    #[test]
    fn modular_polynomials() {
        let p1 = load_modular_polynomial(1, None).unwrap();
        assert_eq!(p1, ModularPolynomial::phi1());
        let text = include_str!("../data/phi2.txt");
        let p2 = ModularPolynomial::parse(2, text).unwrap();
        assert_eq!(p2.coeffs.len(), 11);
        let broken = text.replace("2 1 1488", "2 1 1489");
        assert_eq!(ModularPolynomial::parse(2, &broken), Err(Error::SymmetryViolation(1, 2)));
        assert!(matches!(ModularPolynomial::parse(2, "1 x 3"), Err(Error::MalformedCoefficients(_))));
        assert!(matches!(load_modular_polynomial(2, Some(Path::new("/nonexistent/phi2.txt"))), Err(Error::FileMissing(_))));
        assert_eq!(psi(2), 3);
        assert_eq!(psi(6), 12);
    }
}
