//! Small helpers around arbitrary-precision rationals.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Q = BigRational;

/// Integer as a rational.
pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// n/d as a rational. Panics on d = 0.
pub fn qr(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn qbig(n: BigInt) -> Q {
    Q::from_integer(n)
}

/// Parses "n", "-n" or "n/d".
pub fn parse_q(s: &str) -> Option<Q> {
    let s = s.trim();
    if let Some((a, b)) = s.split_once('/') {
        let n: BigInt = a.trim().parse().ok()?;
        let d: BigInt = b.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        Some(Q::new(n, d))
    } else {
        let n: BigInt = s.parse().ok()?;
        Some(Q::from_integer(n))
    }
}

/// x^e for a possibly negative exponent. Panics on 0^negative.
pub fn qpow(x: &Q, e: i64) -> Q {
    if e >= 0 {
        num_traits::pow(x.clone(), e as usize)
    } else {
        num_traits::pow(x.recip(), (-e) as usize)
    }
}

pub fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

pub fn qfact(n: u64) -> Q {
    Q::from_integer(factorial(n))
}

/// Ordinary binomial coefficient, zero outside 0 <= k <= n.
pub fn binom(n: i64, k: i64) -> BigInt {
    if k < 0 || n < 0 || k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut r = BigInt::one();
    for i in 0..k {
        r = r * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    r
}

pub fn is_integer(x: &Q) -> bool {
    x.denom().is_one()
}

pub fn to_i64(x: &Q) -> Option<i64> {
    if is_integer(x) {
        x.numer().to_i64()
    } else {
        None
    }
}

pub fn to_f64(x: &Q) -> f64 {
    // ratio of big integers; fine for the magnitudes used in numeric checks
    let n = x.numer().to_f64().unwrap_or(f64::NAN);
    let d = x.denom().to_f64().unwrap_or(f64::NAN);
    if n.is_finite() && d.is_finite() {
        n / d
    } else {
        let (n, d) = (x.numer().abs(), x.denom().clone());
        let shift = (n.bits() as i64 - d.bits() as i64 - 60).max(0);
        let val = (&n >> shift as usize).to_f64().unwrap() / d.to_f64().unwrap() * 2f64.powi(shift as i32);
        if x.is_negative() { -val } else { val }
    }
}

pub fn divisors(n: u64) -> Vec<u64> {
    let mut v: Vec<u64> = (1..=n).take_while(|d| d * d <= n).filter(|d| n % d == 0).collect();
    let big: Vec<u64> = v.iter().rev().filter(|&&d| d * d != n).map(|d| n / d).collect();
    v.extend(big);
    v
}

pub fn sigma(n: u64, k: u32) -> BigInt {
    divisors(n).into_iter().map(|d| num_traits::pow(BigInt::from(d), k as usize)).sum()
}

pub fn gcd(a: i64, b: i64) -> i64 {
    num_integer::gcd(a, b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_print() {
        assert_eq!(parse_q("-3/6"), Some(qr(-1, 2)));
        assert_eq!(parse_q("17"), Some(qi(17)));
        assert_eq!(parse_q("1/0"), None);
        assert_eq!(qr(6, -4).to_string(), "-3/2");
    }

    #[test]
    fn divisor_helpers() {
        assert_eq!(divisors(12), vec![1, 2, 3, 4, 6, 12]);
        assert_eq!(divisors(9), vec![1, 3, 9]);
        assert_eq!(sigma(6, 1), BigInt::from(12));
        assert_eq!(binom(7, 3), BigInt::from(35));
        assert_eq!(binom(3, 5), BigInt::zero());
    }

    #[test]
    fn powers() {
        assert_eq!(qpow(&qr(2, 3), -2), qr(9, 4));
        assert_eq!(qpow(&qi(5), 0), qi(1));
        assert!((to_f64(&qr(1, 3)) - 1.0 / 3.0).abs() < 1e-15);
    }
}
