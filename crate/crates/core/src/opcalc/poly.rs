//! Sparse polynomials over Q(i) in a fixed set of variables: the
//! coordinates z_k, z̄_k and the parameters μ, μ_z, (μ,ζ), ζ², ρ, ξ.

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use super::gauss::Gq;

/// Largest supported b.
pub const MAXB: usize = 4;
pub const NV: usize = 24;

pub type Mono = [u8; NV];

pub mod var {
    use super::MAXB;
    pub fn z(k: usize) -> usize {
        k
    }
    pub fn zb(k: usize) -> usize {
        MAXB + k
    }
    pub fn mu(k: usize) -> usize {
        2 * MAXB + k
    }
    pub const MU_Z: usize = 3 * MAXB;
    pub const MU_ZETA: usize = 3 * MAXB + 1;
    pub const ZETA2: usize = 3 * MAXB + 2;
    pub fn rho(k: usize) -> usize {
        3 * MAXB + 3 + k
    }
    pub fn xi(k: usize) -> usize {
        4 * MAXB + 3 + k
    }

    pub fn name(v: usize) -> String {
        match v {
            v if v < MAXB => format!("z{}", v + 1),
            v if v < 2 * MAXB => format!("zb{}", v - MAXB + 1),
            v if v < 3 * MAXB => format!("mu{}", v - 2 * MAXB + 1),
            MU_Z => "mu_z".into(),
            MU_ZETA => "mu_zeta".into(),
            ZETA2 => "zeta2".into(),
            v if v < 4 * MAXB + 3 => format!("rho{}", v - 3 * MAXB - 3 + 1),
            v => format!("xi{}", v - 4 * MAXB - 3 + 1),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Poly {
    terms: BTreeMap<Mono, Gq>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn constant(c: Gq) -> Self {
        let mut p = Poly::zero();
        if !c.is_zero() {
            p.terms.insert([0; NV], c);
        }
        p
    }

    pub fn one() -> Self {
        Poly::constant(Gq::one())
    }

    pub fn int(n: i64) -> Self {
        Poly::constant(Gq::int(n))
    }

    pub fn var(v: usize) -> Self {
        let mut m = [0; NV];
        m[v] = 1;
        let mut p = Poly::zero();
        p.terms.insert(m, Gq::one());
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Mono, &Gq)> {
        self.terms.iter()
    }

    pub fn as_constant(&self) -> Option<Gq> {
        match self.terms.len() {
            0 => Some(Gq::zero()),
            1 => self.terms.get(&[0; NV]).cloned(),
            _ => None,
        }
    }

    pub fn degree_in(&self, v: usize) -> u32 {
        self.terms.keys().map(|m| m[v] as u32).max().unwrap_or(0)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|m| m.iter().map(|e| *e as u32).sum()).max().unwrap_or(0)
    }

    pub fn involves(&self, v: usize) -> bool {
        self.terms.keys().any(|m| m[v] > 0)
    }

    pub fn monomial(m: Mono, c: Gq) -> Self {
        let mut p = Poly::zero();
        p.push(m, c);
        p
    }

    fn push(&mut self, m: Mono, c: Gq) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(x) => {
                *x += &c;
                if x.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn scale(&self, c: &Gq) -> Self {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly { terms: self.terms.iter().map(|(m, x)| (*m, x * c)).collect() }
    }

    pub fn pow(&self, e: u32) -> Self {
        (0..e).fold(Poly::one(), |acc, _| &acc * self)
    }

    pub fn deriv(&self, v: usize) -> Self {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            if m[v] == 0 {
                continue;
            }
            let mut m2 = *m;
            m2[v] -= 1;
            out.push(m2, c * &Gq::int(m[v] as i64));
        }
        out
    }

    /// Replaces each variable v with images[v] when present.
    pub fn substitute(&self, images: &BTreeMap<usize, Poly>) -> Self {
        let mut cache: BTreeMap<(usize, u8), Poly> = BTreeMap::new();
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let mut rest = [0u8; NV];
            let mut t = Poly::constant(c.clone());
            for (v, e) in m.iter().enumerate() {
                if *e == 0 {
                    continue;
                }
                match images.get(&v) {
                    Some(img) => {
                        let p = cache.entry((v, *e)).or_insert_with(|| img.pow(*e as u32)).clone();
                        t = &t * &p;
                    }
                    None => rest[v] = *e,
                }
            }
            let mut mono = Poly::zero();
            mono.terms.insert(rest, Gq::one());
            out = &out + &(&t * &mono);
        }
        out
    }

    /// Complex conjugation of coefficients together with z_k <-> z̄_k.
    /// Parameters are real.
    pub fn conj(&self) -> Self {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let mut m2 = *m;
            for k in 0..MAXB {
                m2.swap(var::z(k), var::zb(k));
            }
            out.push(m2, c.conj());
        }
        out
    }

    pub fn eval(&self, point: &[Complex64; NV]) -> Complex64 {
        let mut s = Complex64::new(0.0, 0.0);
        for (m, c) in &self.terms {
            let mut t = c.to_c64();
            for (v, e) in m.iter().enumerate() {
                if *e > 0 {
                    t *= point[v].powu(*e as u32);
                }
            }
            s += t;
        }
        s
    }

    /// Exact quotient by d, where d = x_v + (terms free of x_v).
    pub fn div_monic_linear(&self, d: &Poly, v: usize) -> Option<Poly> {
        let mut unit = [0u8; NV];
        unit[v] = 1;
        debug_assert!(d.terms.get(&unit).map(|c| c.is_one()).unwrap_or(false) && d.degree_in(v) == 1);
        let root = -&(d - &Poly::var(v));
        let n = self.degree_in(v) as usize;
        let mut coeffs = vec![Poly::zero(); n + 1];
        for (m, c) in &self.terms {
            let mut m2 = *m;
            m2[v] = 0;
            coeffs[m[v] as usize].push(m2, c.clone());
        }
        if n == 0 {
            return if coeffs[0].is_zero() { Some(Poly::zero()) } else { None };
        }
        let mut q = vec![Poly::zero(); n];
        q[n - 1] = coeffs[n].clone();
        for j in (1..n).rev() {
            q[j - 1] = &coeffs[j] + &(&root * &q[j]);
        }
        let rem = &coeffs[0] + &(&root * &q[0]);
        if !rem.is_zero() {
            return None;
        }
        let mut out = Poly::zero();
        for (j, qj) in q.into_iter().enumerate() {
            for (m, c) in qj.terms {
                let mut m2 = m;
                m2[v] += j as u8;
                out.push(m2, c);
            }
        }
        Some(out)
    }

    pub fn render(&self) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut parts = Vec::new();
        for (m, c) in &self.terms {
            let mut s = c.to_string();
            for (v, e) in m.iter().enumerate() {
                match e {
                    0 => {}
                    1 => s.push_str(&format!("*{}", var::name(v))),
                    e => s.push_str(&format!("*{}^{}", var::name(v), e)),
                }
            }
            parts.push(s);
        }
        parts.join(" + ")
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, o: &Poly) -> Poly {
        let (big, small) = if self.terms.len() >= o.terms.len() { (self, o) } else { (o, self) };
        let mut out = big.clone();
        for (m, c) in &small.terms {
            out.push(*m, c.clone());
        }
        out
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, o: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &o.terms {
            out.push(*m, -c);
        }
        out
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly { terms: self.terms.iter().map(|(m, c)| (*m, -c)).collect() }
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, o: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &o.terms {
                out.push(add_mono(m1, m2), c1 * c2);
            }
        }
        out
    }
}

fn add_mono(a: &Mono, b: &Mono) -> Mono {
    let mut m = *a;
    for v in 0..NV {
        m[v] += b[v];
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ring_ops() {
        let x = Poly::var(var::z(0));
        let y = Poly::var(var::zb(0));
        let p = &(&x + &y) * &(&x - &y);
        assert_eq!(p, &(&x * &x) - &(&y * &y));
        assert_eq!(p.deriv(var::z(0)), x.scale(&Gq::int(2)));
        assert_eq!(p.conj(), -&p);
        let d = &Poly::var(var::MU_ZETA) + &x;
        let q = &p * &d;
        assert_eq!(q.div_monic_linear(&d, var::MU_ZETA), Some(p.clone()));
        assert_eq!((&q + &Poly::one()).div_monic_linear(&d, var::MU_ZETA), None);
        let mut img = BTreeMap::new();
        img.insert(var::zb(0), x.clone());
        assert!(p.substitute(&img).is_zero());
    }
}
