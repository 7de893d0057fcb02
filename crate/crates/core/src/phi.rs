//! The symmetric homogeneous polynomials φ_r with
//! Σ_{n≥1} n^r w^n + δ_{r0}/2 = φ_r(w,1)/(1-w)^{r+1}.

use num_traits::{One, Zero};

use crate::rat::{binom, qbig, qi, qr, Q};
use crate::series::{BiSeries, PowerSeries};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhiPolynomial {
    pub r: usize,
    /// c[i] is the coefficient of w^i u^{r+1-i}
    pub coeffs: Vec<Q>,
}

/// φ_0 = (w+u)/2, φ_{r+1} = wu(∂_w + ∂_u)φ_r.
pub fn phi(r: usize) -> PhiPolynomial {
    let mut c = vec![qr(1, 2), qr(1, 2)];
    for _ in 0..r {
        let d = c.len() - 1;
        let mut next = vec![Q::zero(); d + 2];
        for (i, x) in c.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            next[i] += x * qi(i as i64);
            next[i + 1] += x * qi((d - i) as i64);
        }
        c = next;
    }
    PhiPolynomial { r, coeffs: c }
}

impl PhiPolynomial {
    pub fn degree(&self) -> usize {
        self.r + 1
    }

    pub fn is_symmetric(&self) -> bool {
        self.coeffs.iter().eq(self.coeffs.iter().rev())
    }

    /// φ_r(w, 1) as a coefficient list in w.
    pub fn dehomogenised(&self) -> Vec<Q> {
        self.coeffs.clone()
    }

    pub fn eval(&self, w: &Q, u: &Q) -> Q {
        let d = self.degree() as i64;
        self.coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| c * crate::rat::qpow(w, i as i64) * crate::rat::qpow(u, d - i as i64))
            .sum()
    }

    /// φ_r(q^k, p^l) as an exact bivariate polynomial.
    pub fn substitute(&self, k: i64, l: i64) -> BiSeries {
        let d = self.degree() as i64;
        BiSeries::from_coeffs(self.coeffs.iter().enumerate().map(|(i, c)| ((k * i as i64, l * (d - i as i64)), c.clone())), None, None)
    }

    pub fn render(&self) -> String {
        let d = self.degree();
        let mut parts = Vec::new();
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mono = |v: &str, e: usize| match e {
                0 => String::new(),
                1 => v.to_string(),
                e => format!("{v}^{e}"),
            };
            let m = format!("{}{}", mono("w", i), mono("u", d - i));
            parts.push(if c.is_one() { m } else { format!("{c}{m}") });
        }
        parts.join(" + ")
    }
}

/// φ_r(w,1)/(1-w)^{r+1} expanded below w^n.
pub fn h_series(r: usize, n: i64) -> PowerSeries {
    let p = phi(r);
    let geo = PowerSeries::from_coeffs((0..n).map(|k| (k, qbig(binom(k + r as i64, r as i64)))), n);
    let num = PowerSeries::from_dense(0, &p.dehomogenised(), n);
    &num * &geo
}

/// The power sum δ_{r0}/2 + Σ_{1≤k<n} k^r w^k, computed directly.
pub fn power_sum(r: usize, n: i64) -> PowerSeries {
    let mut terms: Vec<(i64, Q)> = (1..n).map(|k| (k, qbig(num_traits::pow(num_bigint::BigInt::from(k), r)))).collect();
    if r == 0 {
        terms.push((0, qr(1, 2)));
    }
    PowerSeries::from_coeffs(terms, n)
}

fn pmul(a: &[Q], b: &[Q]) -> Vec<Q> {
    let mut out = vec![Q::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn ppow(a: &[Q], e: usize) -> Vec<Q> {
    (0..e).fold(vec![qi(1)], |acc, _| pmul(&acc, a))
}

fn trim(mut a: Vec<Q>) -> Vec<Q> {
    while a.len() > 1 && a.last().map(|x| x.is_zero()).unwrap_or(false) {
        a.pop();
    }
    a
}

/// Checks h_r(1/w) = (-1)^{r+1} h_r(w) as rational functions of w by
/// clearing denominators.
pub fn verify_inversion(r: usize) -> bool {
    let p = phi(r).dehomogenised();
    let d = r + 1;
    // φ_r(1/w, 1) w^d: monomial w^i goes to w^{d-i}
    let mut n1 = vec![Q::zero(); d + 1];
    for (i, c) in p.iter().enumerate() {
        n1[d - i] += c;
    }
    // (1 - 1/w)^d w^d = (w - 1)^d
    let d1 = ppow(&[qi(-1), qi(1)], d);
    let sign = if d % 2 == 0 { qi(1) } else { qi(-1) };
    let n2: Vec<Q> = p.iter().map(|c| c * &sign).collect();
    let d2 = ppow(&[qi(1), qi(-1)], d);
    trim(pmul(&n1, &d2)) == trim(pmul(&n2, &d1))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_polynomials() {
        assert_eq!(phi(0).coeffs, vec![qr(1, 2), qr(1, 2)]);
        assert_eq!(phi(1).coeffs, vec![qi(0), qi(1), qi(0)]);
        assert_eq!(phi(3).coeffs, vec![qi(0), qi(1), qi(4), qi(1), qi(0)]);
        assert_eq!(phi(3).render(), "w^3u + 4w^2u^2 + wu^3");
    }

    #[test]
    fn generating_function() {
        let h0 = h_series(0, 5);
        assert_eq!(h0.dense_from(0), vec![qr(1, 2), qi(1), qi(1), qi(1), qi(1)]);
        assert_eq!(h_series(1, 5).dense_from(0), vec![qi(0), qi(1), qi(2), qi(3), qi(4)]);
        assert_eq!(h_series(3, 6).coeff(4), qi(64));
    }

    #[test]
    fn inversion() {
        for r in [0, 1, 3] {
            assert!(verify_inversion(r));
        }
        assert_eq!(phi(2).eval(&qi(1), &qi(1)), qi(2));
    }
}
