//! Gaussian rationals Q(i). Components are kept as machine-sized fractions
//! while they fit and fall back to big rationals otherwise.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use crate::rat::Q;

/// A rational in canonical form: `S(n, d)` with d > 0 and gcd 1 whenever
/// both fit in i64, `B` only otherwise. Equality and hashing rely on this.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
enum R {
    S(i64, i64),
    B(Q),
}

impl R {
    const ZERO: R = R::S(0, 1);

    fn from_i128(n: i128, d: i128) -> R {
        let g = n.gcd(&d);
        let (mut n, mut d) = if g > 1 { (n / g, d / g) } else { (n, d) };
        if d < 0 {
            n = -n;
            d = -d;
        }
        match (i64::try_from(n), i64::try_from(d)) {
            (Ok(n), Ok(d)) => R::S(n, d),
            _ => R::B(Q::new(BigInt::from(n), BigInt::from(d))),
        }
    }

    fn from_q(q: Q) -> R {
        match (q.numer().to_i64(), q.denom().to_i64()) {
            (Some(n), Some(d)) => R::S(n, d),
            _ => R::B(q),
        }
    }

    fn to_q(&self) -> Q {
        match self {
            R::S(n, d) => Q::new_raw(BigInt::from(*n), BigInt::from(*d)),
            R::B(q) => q.clone(),
        }
    }

    fn is_zero(&self) -> bool {
        matches!(self, R::S(0, _))
    }

    fn is_one(&self) -> bool {
        matches!(self, R::S(1, 1))
    }

    fn add(&self, o: &R) -> R {
        match (self, o) {
            (R::S(a, b), R::S(c, d)) => {
                let (a, b, c, d) = (*a as i128, *b as i128, *c as i128, *d as i128);
                if b == d {
                    R::from_i128(a + c, b)
                } else {
                    R::from_i128(a * d + c * b, b * d)
                }
            }
            _ => R::from_q(self.to_q() + o.to_q()),
        }
    }

    fn mul(&self, o: &R) -> R {
        match (self, o) {
            (R::S(a, b), R::S(c, d)) => R::from_i128(*a as i128 * *c as i128, *b as i128 * *d as i128),
            _ => R::from_q(self.to_q() * o.to_q()),
        }
    }

    fn neg(&self) -> R {
        match self {
            R::S(n, d) if *n != i64::MIN => R::S(-n, *d),
            _ => R::from_q(-self.to_q()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Gq {
    re: R,
    im: R,
}

impl Gq {
    pub fn new(re: Q, im: Q) -> Self {
        Gq { re: R::from_q(re), im: R::from_q(im) }
    }

    pub fn real(re: Q) -> Self {
        Gq { re: R::from_q(re), im: R::ZERO }
    }

    pub fn int(n: i64) -> Self {
        Gq { re: R::S(n, 1), im: R::ZERO }
    }

    pub fn i() -> Self {
        Gq { re: R::ZERO, im: R::S(1, 1) }
    }

    pub fn zero() -> Self {
        Gq::int(0)
    }

    pub fn one() -> Self {
        Gq::int(1)
    }

    pub fn re(&self) -> Q {
        self.re.to_q()
    }

    pub fn im(&self) -> Q {
        self.im.to_q()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Gq { re: self.re.clone(), im: self.im.neg() }
    }

    pub fn inv(&self) -> Self {
        let (re, im) = (self.re(), self.im());
        let n = &re * &re + &im * &im;
        assert!(!n.is_zero(), "inverse of zero");
        Gq::new(&re / &n, -im / &n)
    }

    pub fn pow(&self, e: i64) -> Self {
        let b = if e < 0 { self.inv() } else { self.clone() };
        (0..e.abs()).fold(Gq::one(), |acc, _| &acc * &b)
    }

    pub fn scale(&self, q: &Q) -> Self {
        let q = R::from_q(q.clone());
        Gq { re: self.re.mul(&q), im: self.im.mul(&q) }
    }

    pub fn to_c64(&self) -> num_complex::Complex64 {
        let f = |r: &R| match r {
            R::S(n, d) => *n as f64 / *d as f64,
            R::B(q) => crate::rat::to_f64(q),
        };
        num_complex::Complex64::new(f(&self.re), f(&self.im))
    }
}

impl From<Q> for Gq {
    fn from(q: Q) -> Self {
        Gq::real(q)
    }
}

impl From<i64> for Gq {
    fn from(n: i64) -> Self {
        Gq::int(n)
    }
}

impl fmt::Display for Gq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.re.is_zero(), self.im.is_zero()) {
            (_, true) => write!(f, "{}", self.re()),
            (true, false) => write!(f, "{}i", self.im()),
            _ => write!(f, "({} + {}i)", self.re(), self.im()),
        }
    }
}

impl Add for &Gq {
    type Output = Gq;
    fn add(self, o: &Gq) -> Gq {
        Gq { re: self.re.add(&o.re), im: self.im.add(&o.im) }
    }
}

impl Sub for &Gq {
    type Output = Gq;
    fn sub(self, o: &Gq) -> Gq {
        Gq { re: self.re.add(&o.re.neg()), im: self.im.add(&o.im.neg()) }
    }
}

impl Mul for &Gq {
    type Output = Gq;
    fn mul(self, o: &Gq) -> Gq {
        if self.im.is_zero() && o.im.is_zero() {
            return Gq { re: self.re.mul(&o.re), im: R::ZERO };
        }
        Gq {
            re: self.re.mul(&o.re).add(&self.im.mul(&o.im).neg()),
            im: self.re.mul(&o.im).add(&self.im.mul(&o.re)),
        }
    }
}

impl Neg for &Gq {
    type Output = Gq;
    fn neg(self) -> Gq {
        Gq { re: self.re.neg(), im: self.im.neg() }
    }
}

impl AddAssign<&Gq> for Gq {
    fn add_assign(&mut self, o: &Gq) {
        self.re = self.re.add(&o.re);
        self.im = self.im.add(&o.im);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{qi, qr};
    use num_traits::One;

    #[test]
    fn arithmetic() {
        let i = Gq::i();
        assert_eq!(&i * &i, Gq::int(-1));
        let z = Gq::new(qi(3), qi(4));
        assert_eq!(&z * &z.inv(), Gq::one());
        assert_eq!(z.conj().im(), qi(-4));
        assert_eq!(Gq::new(qr(1, 2), qi(0)).pow(-2), Gq::int(4));
        assert_eq!(i.pow(3), -&i);
    }

    #[test]
    fn overflow_promotes_and_demotes() {
        let big = Gq::int(i64::MAX);
        let sq = &big * &big;
        assert_eq!(sq.re(), qi(i64::MAX) * qi(i64::MAX));
        let back = &sq * &Gq::real(Q::one() / (qi(i64::MAX) * qi(i64::MAX)));
        assert_eq!(back, Gq::one());
        assert_eq!(&Gq::new(qr(1, 3), qi(0)) + &Gq::new(qr(2, 3), qi(0)), Gq::one());
        assert_eq!(&Gq::int(i64::MIN) - &Gq::int(i64::MIN), Gq::zero());
    }
}
