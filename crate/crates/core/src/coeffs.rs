//! Scalar coefficient formulas: extended binomials, the coefficient table of
//! powers of the raising operator, C_{k,0} of raised Fourier terms, the
//! singular coefficients a_k and the expansion of powers of δ_k.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::rat::{qfact, qi, qr, Q};
use crate::series::PowerSeries;

/// binom(x, n) = (1/n!) Π_{j<n} (x - j), for rational x.
pub fn ext_binom(x: &Q, n: u64) -> Q {
    let mut p = qi(1);
    for j in 0..n {
        p *= x - qi(j as i64);
    }
    p / qfact(n)
}

fn falling(l: i64, r: i64) -> Q {
    // l!/(l-r)!
    let mut p = qi(1);
    for j in 0..r {
        p *= qi(l - j);
    }
    p
}

/// A^{(l)}_{a,c}, stored for 0 ≤ a ≤ c ≤ l.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RaisingCoeffTable {
    pub m: i64,
    pub b: i64,
    pub l: usize,
    a: Vec<Vec<Q>>, // a[c][a]
}

impl RaisingCoeffTable {
    /// Zero outside 0 ≤ a ≤ c ≤ l.
    pub fn get(&self, a: i64, c: i64) -> Q {
        if a < 0 || c < 0 || a > c || c > self.l as i64 {
            return Q::zero();
        }
        self.a[c as usize][a as usize].clone()
    }
}

/// Closed form A^{(l)}_{0,c} = l! 2^c/(l-c)! · binom(m + l - b/2, c).
pub fn raising_row0(m: i64, b: i64, l: usize, c: usize) -> Q {
    if c > l {
        return Q::zero();
    }
    falling(l as i64, c as i64) * qi(1 << c) * ext_binom(&(qi(m + l as i64) - qr(b, 2)), c as u64)
}

fn raising_step(t: &RaisingCoeffTable) -> RaisingCoeffTable {
    let (m, b, l) = (t.m, t.b, t.l as i64);
    let mut next = Vec::new();
    for c in 0..=(l + 1) {
        let mut row = Vec::new();
        for a in 0..=c {
            let mut v = Q::zero();
            for s in 0..=a {
                let g = t.get(s, c);
                if !g.is_zero() {
                    v += qi(crate::rat::binom(c - s, a - s).try_into().unwrap()) * g;
                }
            }
            let f = qi(2 * m + 4 * l - 2 * c + 4 - b);
            v += f * (t.get(a, c - 1) + qr(m + 2 * l - c + 1, 2) * t.get(a - 1, c - 1));
            row.push(v);
        }
        next.push(row);
    }
    RaisingCoeffTable { m, b, l: t.l + 1, a: next }
}

/// The table A^{(l)} for (R_m)^l = Σ_{c≤l} Σ_{a≤c} A_{a,c} (iD*)^{c-a} (Δ^h)^{l-c} / (-Y²)^c,
/// checked against the closed form of row a = 0.
pub fn raising_table(m: i64, b: i64, l: usize) -> Result<RaisingCoeffTable> {
    let mut t = RaisingCoeffTable { m, b, l: 0, a: vec![vec![qi(1)]] };
    for _ in 0..l {
        t = raising_step(&t);
    }
    for c in 0..=l {
        if t.get(0, c as i64) != raising_row0(m, b, l, c) {
            return Err(Error::ClosedFormMismatch(c as i64));
        }
    }
    Ok(t)
}

/// C_{k,0} = Σ_r l!/(l-r)! (-1)^r binom(m + l + r - b/2 - k, r) B_{k-r,0}.
pub fn c_k0(m: i64, b: i64, l: usize, bcoef: &BTreeMap<i64, Q>) -> BTreeMap<i64, Q> {
    let top = bcoef.keys().last().copied().unwrap_or(0) + l as i64;
    let mut out = BTreeMap::new();
    for k in 0..=top {
        let mut v = Q::zero();
        for r in 0..=(l as i64) {
            let Some(bk) = bcoef.get(&(k - r)) else { continue };
            let x = qi(m + l as i64 + r - k) - qr(b, 2);
            let sign = if r % 2 == 0 { qi(1) } else { qi(-1) };
            v += falling(l as i64, r) * sign * ext_binom(&x, r as u64) * bk;
        }
        if !v.is_zero() {
            out.insert(k, v);
        }
    }
    out
}

/// a_k = Π_{r<k} (2r(2n-2r-b) - λ) · (n-k-1)!/(4^k (n-1)! k!) · a_0, for 0 ≤ k < n.
pub fn singular_coeffs(n: i64, b: i64, lambda: &Q, a0: &Q) -> Vec<Q> {
    assert!(n >= 1);
    (0..n)
        .map(|k| {
            let mut p = qi(1);
            for r in 0..k {
                p *= qi(2 * r * (2 * n - 2 * r - b)) - lambda;
            }
            p * qfact((n - k - 1) as u64) / (qi(4).pow(k as i32) * qfact((n - 1) as u64) * qfact(k as u64)) * a0
        })
        .collect()
}

/// Checks (2k(2n-2k-b) - λ) a_k = 4(k+1)(n-k-1) a_{k+1} for 0 ≤ k ≤ n-2.
pub fn singular_recurrence_holds(n: i64, b: i64, lambda: &Q, a: &[Q]) -> bool {
    (0..n - 1).all(|k| {
        let ku = k as usize;
        (qi(2 * k * (2 * n - 2 * k - b)) - lambda) * &a[ku] == qi(4 * (k + 1) * (n - k - 1)) * &a[ku + 1]
    })
}

/// Coefficients of δ_k^l = Σ_r l!/(l-r)! binom(k+l-1, r) ∂_τ^{l-r} (2iy)^{-r}, indexed by r.
pub fn maass_power_coeffs(k: &Q, l: usize) -> Vec<Q> {
    (0..=l).map(|r| falling(l as i64, r as i64) * ext_binom(&(k + qi(l as i64 - 1)), r as u64)).collect()
}

/// δ_k^l applied to a q-expansion, as terms (r, coefficient, θ^{l-r} f) standing for
/// coefficient · (2πi)^{l-r} θ^{l-r} f / (2iy)^r, where θ = q d/dq.
pub fn maass_power_apply(f: &PowerSeries, k: &Q, l: usize) -> Vec<(usize, Q, PowerSeries)> {
    let c = maass_power_coeffs(k, l);
    (0..=l)
        .map(|r| {
            let mut g = f.clone();
            for _ in 0..(l - r) {
                g = g.theta();
            }
            (r, c[r].clone(), g)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomials() {
        assert_eq!(ext_binom(&qi(5), 2), qi(10));
        assert_eq!(ext_binom(&qr(-1, 2), 2), qr(3, 8));
        assert_eq!(ext_binom(&qi(3), 0), qi(1));
        assert_eq!(ext_binom(&qi(3), 5), qi(0));
    }

    #[test]
    fn small_tables() {
        let t0 = raising_table(3, 2, 0).unwrap();
        assert_eq!(t0.get(0, 0), qi(1));
        for (m, b) in [(0, 2), (3, 3), (-2, 4)] {
            let t1 = raising_table(m, b, 1).unwrap();
            assert_eq!(t1.get(0, 1), qi(2 * m + 2 - b));
            assert_eq!(t1.get(1, 1), qi(2 * m + 2 - b) * qr(m, 2));
            assert_eq!(t1.get(0, 0), qi(1));
        }
        let t2 = raising_table(1, 3, 2).unwrap();
        for c in 0..=2 {
            assert_eq!(t2.get(0, c), raising_row0(1, 3, 2, c as usize));
        }
        assert_eq!(t2.get(2, 1), qi(0));
        assert_eq!(t2.get(0, 3), qi(0));
    }

    #[test]
    fn c_k0_cases() {
        let mut b = BTreeMap::new();
        b.insert(0, qi(1));
        b.insert(1, qi(2));
        assert_eq!(c_k0(2, 2, 0, &b), b);
        let mut b0 = BTreeMap::new();
        b0.insert(0, qi(1));
        let c = c_k0(2, 2, 1, &b0);
        assert_eq!(c.get(&0), Some(&qi(1)));
        // k = 1, r = 1: -binom(m + 1 + 1 - 1 - 1, 1) = -(m)
        assert_eq!(c.get(&1), Some(&qi(-2)));
    }

    #[test]
    fn singular_values() {
        let a = singular_coeffs(2, 2, &qi(-8), &qi(1));
        assert_eq!(a, vec![qi(1), qi(2)]);
        let z = singular_coeffs(4, 2, &qi(0), &qi(3));
        assert_eq!(z, vec![qi(3), qi(0), qi(0), qi(0)]);
        assert!(singular_recurrence_holds(4, 2, &qi(-8), &singular_coeffs(4, 2, &qi(-8), &qi(1))));
    }

    #[test]
    fn maass_lists() {
        let k = qr(7, 3);
        assert_eq!(maass_power_coeffs(&k, 0), vec![qi(1)]);
        assert_eq!(maass_power_coeffs(&k, 1), vec![qi(1), k.clone()]);
        assert_eq!(maass_power_coeffs(&k, 2), vec![qi(1), qi(2) * (&k + qi(1)), (&k + qi(1)) * &k]);
        let f = PowerSeries::from_coeffs([(1, qi(1)), (2, qi(3))], 4);
        let t = maass_power_apply(&f, &k, 1);
        assert_eq!(t[0].2.coeff(2), qi(6));
    }
}
