//! Elements of the differential algebra: finite sums of
//! polynomial × Y^{e} (μ,Z_V)^a (μ,Z̄_V)^ā (Z²)^c (Z̄²)^c̄ π^p × logs × twists.
//!
//! Coordinates are orthonormal: Y² = y₁² - Σ_{k≥2} y_k², y_k = (z_k - z̄_k)/2i.
//! V = K × R × R with (α,a,b)² = α² + 2ab + a²ζ², μ = (μ_K, μ_z, (μ,ζ) - μ_z ζ²).

use std::collections::BTreeMap;

use num_complex::Complex64;

use super::gauss::Gq;
use super::poly::{var, Poly, MAXB, NV};
use crate::error::{Error, Result};
use crate::rat::qr;

pub const NB: usize = 5;

/// Bases that may carry negative exponents.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Base {
    /// Y², exponent counted in halves
    S = 0,
    /// (μ, Z_{V,Z})
    A = 1,
    /// (μ, conj Z_{V,Z})
    Ab = 2,
    /// Z²
    Q = 3,
    /// conj(Z)²
    Qb = 4,
}

pub const LOG_BASES: [Base; 3] = [Base::S, Base::A, Base::Ab];

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Key {
    /// exps[0] is the exponent of Y² in halves.
    pub exps: [i32; NB],
    pub pi: i32,
    /// multiplicities of log Y², log(μ,Z_V), log(μ,Z̄_V)
    pub logs: [u8; 3],
    /// multiplicities of e((ρ,Z)) and e((ρ,Z̄))
    pub twist: [u8; 2],
}

impl Key {
    fn mul(&self, o: &Key) -> Key {
        let mut k = self.clone();
        for i in 0..NB {
            k.exps[i] += o.exps[i];
        }
        k.pi += o.pi;
        for i in 0..3 {
            k.logs[i] += o.logs[i];
        }
        for i in 0..2 {
            k.twist[i] += o.twist[i];
        }
        k
    }

    fn class(&self) -> (i32, i32, [u8; 3], [u8; 2]) {
        (self.exps[0].rem_euclid(2), self.pi, self.logs, self.twist)
    }

    pub fn is_rational(&self) -> bool {
        self.exps[0] % 2 == 0 && self.logs == [0; 3] && self.twist == [0; 2]
    }

    fn describe(&self) -> String {
        let mut s = String::new();
        let names = ["Y2", "A", "Ab", "Z2", "Zb2"];
        for (i, e) in self.exps.iter().enumerate() {
            if *e != 0 {
                if i == 0 {
                    s.push_str(&format!(" Y2^({}/2)", e));
                } else {
                    s.push_str(&format!(" {}^{}", names[i], e));
                }
            }
        }
        if self.pi != 0 {
            s.push_str(&format!(" pi^{}", self.pi));
        }
        for (i, n) in self.logs.iter().enumerate() {
            if *n > 0 {
                s.push_str(&format!(" log({})^{}", ["Y2", "A", "Ab"][i], n));
            }
        }
        if self.twist[0] > 0 {
            s.push_str(&format!(" e(rho,Z)^{}", self.twist[0]));
        }
        if self.twist[1] > 0 {
            s.push_str(&format!(" e(rho,Zb)^{}", self.twist[1]));
        }
        s
    }
}

/// Base polynomials and their first derivatives for a given b.
#[derive(Debug, Clone)]
pub struct Space {
    pub b: usize,
    pub eta: Vec<i64>,
    pub base: [Poly; NB],
    /// dbase[β][v]: ∂ base_β / ∂ x_v for the coordinate variables
    dbase: Vec<BTreeMap<usize, Poly>>,
    pub mu2: Poly,
    /// values fixed for some parameter variables
    params: BTreeMap<usize, Poly>,
}

/// Points of V written as (α ∈ K, a, b).
#[derive(Debug, Clone)]
pub struct VVec {
    pub k: Vec<Poly>,
    pub a: Poly,
    pub b: Poly,
}

impl Space {
    pub fn new(b: usize) -> Result<Self> {
        if b == 0 || b > MAXB {
            return Err(Error::DimensionMismatch(format!("b = {b} outside 1..={MAXB}")));
        }
        let eta: Vec<i64> = (0..b).map(|k| if k == 0 { 1 } else { -1 }).collect();
        let mut s = Poly::zero();
        for k in 0..b {
            let y = y_poly(k);
            s = &s + &(&y * &y).scale(&Gq::int(eta[k]));
        }
        let zv = z_v(b, &eta, false);
        let mu = mu_v(b);
        let a = pair(&eta, &mu, &zv);
        let ab = a.conj();
        let zs = k_pair(&eta, &zv.k, &zv.k);
        let base = [s, a, ab, zs.clone(), zs.conj()];
        let mut dbase = Vec::new();
        for p in &base {
            let mut m = BTreeMap::new();
            for k in 0..b {
                m.insert(var::z(k), p.deriv(var::z(k)));
                m.insert(var::zb(k), p.deriv(var::zb(k)));
            }
            dbase.push(m);
        }
        let mu2 = pair(&eta, &mu, &mu);
        Ok(Space { b, eta, base, dbase, mu2, params: BTreeMap::new() })
    }

    /// The same space with some parameter variables (μ, ζ², ...) fixed.
    /// Coordinates z, z̄ cannot be fixed, and (μ,ζ) must stay free since
    /// reduction divides in it.
    pub fn with_parameters(b: usize, params: BTreeMap<usize, Poly>) -> Result<Self> {
        if params.keys().any(|v| *v < 2 * MAXB || *v == var::MU_ZETA) {
            return Err(Error::DimensionMismatch("only parameters other than (μ,ζ) can be fixed".into()));
        }
        let mut sp = Space::new(b)?;
        for p in sp.base.iter_mut() {
            *p = p.substitute(&params);
        }
        for m in sp.dbase.iter_mut() {
            for p in m.values_mut() {
                *p = p.substitute(&params);
            }
        }
        sp.mu2 = sp.mu2.substitute(&params);
        sp.params = params;
        Ok(sp)
    }

    pub fn zv(&self, conj: bool) -> VVec {
        let z = z_v(self.b, &self.eta, conj);
        VVec { k: z.k, a: z.a, b: z.b.substitute(&self.params) }
    }

    pub fn mu(&self) -> VVec {
        let m = mu_v(self.b);
        VVec { k: m.k.iter().map(|p| p.substitute(&self.params)).collect(), a: m.a.substitute(&self.params), b: m.b.substitute(&self.params) }
    }

    pub fn param(&self, v: usize) -> Poly {
        self.params.get(&v).cloned().unwrap_or_else(|| Poly::var(v))
    }

    pub fn pair(&self, x: &VVec, y: &VVec) -> Poly {
        pair(&self.eta, x, y)
    }

    pub fn k_pair(&self, x: &[Poly], y: &[Poly]) -> Poly {
        k_pair(&self.eta, x, y)
    }

    /// (ρ, Y)
    pub fn rho_y(&self) -> Poly {
        let y: Vec<Poly> = (0..self.b).map(y_poly).collect();
        let r: Vec<Poly> = (0..self.b).map(|k| Poly::var(var::rho(k))).collect();
        self.k_pair(&r, &y)
    }

    pub fn rho2(&self) -> Poly {
        let r: Vec<Poly> = (0..self.b).map(|k| Poly::var(var::rho(k))).collect();
        self.k_pair(&r, &r)
    }

    pub fn y(&self, k: usize) -> Poly {
        y_poly(k)
    }

    pub fn coordinate_vars(&self) -> Vec<usize> {
        (0..self.b).flat_map(|k| [var::z(k), var::zb(k)]).collect()
    }
}

fn y_poly(k: usize) -> Poly {
    // (z - z̄)/(2i) = -i/2 (z - z̄)
    (&Poly::var(var::z(k)) - &Poly::var(var::zb(k))).scale(&Gq::new(qr(0, 1), qr(-1, 2)))
}

fn k_pair(eta: &[i64], x: &[Poly], y: &[Poly]) -> Poly {
    let mut s = Poly::zero();
    for k in 0..eta.len() {
        s = &s + &(&x[k] * &y[k]).scale(&Gq::int(eta[k]));
    }
    s
}

fn pair(eta: &[i64], x: &VVec, y: &VVec) -> Poly {
    let z2 = Poly::var(var::ZETA2);
    let mut s = k_pair(eta, &x.k, &y.k);
    s = &s + &(&x.a * &y.b);
    s = &s + &(&y.a * &x.b);
    &s + &(&(&x.a * &y.a) * &z2)
}

fn z_v(b: usize, eta: &[i64], conj: bool) -> VVec {
    let zs: Vec<Poly> = (0..b).map(|k| Poly::var(if conj { var::zb(k) } else { var::z(k) })).collect();
    let z2 = k_pair(eta, &zs, &zs);
    let last = (&(-&z2) - &Poly::var(var::ZETA2)).scale(&Gq::real(qr(1, 2)));
    VVec { k: zs, a: Poly::one(), b: last }
}

fn mu_v(b: usize) -> VVec {
    VVec {
        k: (0..b).map(|k| Poly::var(var::mu(k))).collect(),
        a: Poly::var(var::MU_Z),
        b: &Poly::var(var::MU_ZETA) - &(&Poly::var(var::MU_Z) * &Poly::var(var::ZETA2)),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DiffElement {
    pub b: usize,
    terms: BTreeMap<Key, Poly>,
}

impl DiffElement {
    pub fn zero(b: usize) -> Self {
        DiffElement { b, terms: BTreeMap::new() }
    }

    pub fn from_poly(b: usize, p: Poly) -> Self {
        DiffElement::atom(b, Key::default(), p)
    }

    pub fn constant(b: usize, c: Gq) -> Self {
        DiffElement::from_poly(b, Poly::constant(c))
    }

    pub fn int(b: usize, n: i64) -> Self {
        DiffElement::constant(b, Gq::int(n))
    }

    pub fn atom(b: usize, key: Key, p: Poly) -> Self {
        let mut e = DiffElement::zero(b);
        e.push(key, p);
        e
    }

    /// base^e; for S the exponent is counted in halves.
    pub fn base(b: usize, base: Base, e: i32) -> Self {
        let mut k = Key::default();
        k.exps[base as usize] = e;
        DiffElement::atom(b, k, Poly::one())
    }

    /// (Y²)^t
    pub fn y2(b: usize, t: i32) -> Self {
        DiffElement::base(b, Base::S, 2 * t)
    }

    pub fn pi(b: usize, e: i32) -> Self {
        DiffElement::atom(b, Key { pi: e, ..Key::default() }, Poly::one())
    }

    pub fn log(b: usize, base: Base) -> Self {
        let i = LOG_BASES.iter().position(|x| *x == base).expect("log of an unsupported base");
        let mut k = Key::default();
        k.logs[i] = 1;
        DiffElement::atom(b, k, Poly::one())
    }

    /// e((ρ,Z)) for holomorphic, e((ρ,Z̄)) otherwise.
    pub fn twist(b: usize, holomorphic: bool) -> Self {
        let mut k = Key::default();
        k.twist[if holomorphic { 0 } else { 1 }] = 1;
        DiffElement::atom(b, k, Poly::one())
    }

    fn push(&mut self, k: Key, p: Poly) {
        if p.is_zero() {
            return;
        }
        match self.terms.remove(&k) {
            Some(x) => {
                let s = &x + &p;
                if !s.is_zero() {
                    self.terms.insert(k, s);
                }
            }
            None => {
                self.terms.insert(k, p);
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Key, &Poly)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_structurally_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, o: &DiffElement) -> DiffElement {
        assert_eq!(self.b, o.b);
        let mut out = self.clone();
        for (k, p) in &o.terms {
            out.push(k.clone(), p.clone());
        }
        out
    }

    pub fn sub(&self, o: &DiffElement) -> DiffElement {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> DiffElement {
        self.scale(&Gq::int(-1))
    }

    pub fn scale(&self, c: &Gq) -> DiffElement {
        if c.is_zero() {
            return DiffElement::zero(self.b);
        }
        DiffElement { b: self.b, terms: self.terms.iter().map(|(k, p)| (k.clone(), p.scale(c))).collect() }
    }

    pub fn mul_poly(&self, q: &Poly) -> DiffElement {
        let mut out = DiffElement::zero(self.b);
        for (k, p) in &self.terms {
            out.push(k.clone(), p * q);
        }
        out
    }

    pub fn mul(&self, o: &DiffElement) -> DiffElement {
        assert_eq!(self.b, o.b);
        let mut out = DiffElement::zero(self.b);
        for (k1, p1) in &self.terms {
            for (k2, p2) in &o.terms {
                out.push(k1.mul(k2), p1 * p2);
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> DiffElement {
        (0..e).fold(DiffElement::int(self.b, 1), |acc, _| acc.mul(self))
    }

    pub fn is_rational(&self) -> bool {
        self.terms.keys().all(|k| k.is_rational())
    }

    /// ∂/∂x_v for a coordinate variable x_v (z_k or z̄_k).
    pub fn deriv(&self, sp: &Space, v: usize) -> DiffElement {
        let mut out = DiffElement::zero(self.b);
        let holo = v < MAXB;
        let k_index = if holo { v } else { v - MAXB };
        for (key, c) in &self.terms {
            out.push(key.clone(), c.deriv(v));
            for beta in 0..NB {
                let e = key.exps[beta];
                if e == 0 {
                    continue;
                }
                let d = &sp.dbase[beta][&v];
                if d.is_zero() {
                    continue;
                }
                let mut k2 = key.clone();
                let f = if beta == 0 {
                    k2.exps[0] -= 2;
                    Gq::real(qr(e as i64, 2))
                } else {
                    k2.exps[beta] -= 1;
                    Gq::int(e as i64)
                };
                out.push(k2, (c * d).scale(&f));
            }
            for (li, base) in LOG_BASES.iter().enumerate() {
                let n = key.logs[li];
                if n == 0 {
                    continue;
                }
                let beta = *base as usize;
                let d = &sp.dbase[beta][&v];
                if d.is_zero() {
                    continue;
                }
                let mut k2 = key.clone();
                k2.logs[li] -= 1;
                k2.exps[beta] -= if beta == 0 { 2 } else { 1 };
                out.push(k2, (c * d).scale(&Gq::int(n as i64)));
            }
            let t = key.twist[if holo { 0 } else { 1 }];
            if t > 0 {
                // ∂ e((ρ,Z)) = 2πi η_k ρ_k e((ρ,Z))
                let mut k2 = key.clone();
                k2.pi += 1;
                let f = Gq::new(qr(0, 1), qr(2 * t as i64 * sp.eta[k_index], 1));
                out.push(k2, (c * &Poly::var(var::rho(k_index))).scale(&f));
            }
        }
        out
    }

    /// Exact zero test: terms of the same class are put over a common
    /// denominator and the numerator is expanded.
    /// Exact zero test. Terms are split by their (μ,Z_V) exponent and
    /// combined one level at a time: the lowest level must be divisible by
    /// (μ,Z_V), which is coprime to every other denominator, and its
    /// quotient moves up a level. This avoids expanding powers of (μ,Z_V).
    pub fn is_zero(&self, sp: &Space) -> bool {
        let a = Base::A as usize;
        let mut levels: BTreeMap<i32, DiffElement> = BTreeMap::new();
        for (k, p) in &self.terms {
            let mut k2 = k.clone();
            k2.exps[a] = 0;
            levels.entry(k.exps[a]).or_insert_with(|| DiffElement::zero(self.b)).push(k2, p.clone());
        }
        while let Some(e) = levels.keys().next().copied() {
            let g = levels.remove(&e).unwrap();
            let last = levels.is_empty();
            for (key, num) in g.classes(sp) {
                if num.is_zero() {
                    continue;
                }
                if last {
                    return false;
                }
                match num.div_monic_linear(&sp.base[a], var::MU_ZETA) {
                    Some(q) => levels.entry(e + 1).or_insert_with(|| DiffElement::zero(self.b)).push(key, q),
                    None => return false,
                }
            }
        }
        true
    }

    /// One (key, numerator) per class, over the smallest common exponents.
    pub fn classes(&self, sp: &Space) -> Vec<(Key, Poly)> {
        let mut groups: BTreeMap<(i32, i32, [u8; 3], [u8; 2]), Vec<(&Key, &Poly)>> = BTreeMap::new();
        for (k, p) in &self.terms {
            groups.entry(k.class()).or_default().push((k, p));
        }
        let mut cache: BTreeMap<(usize, i32), Poly> = BTreeMap::new();
        let mut out = Vec::new();
        for (_, ts) in groups {
            let mut lo = ts[0].0.exps;
            for (k, _) in &ts {
                for i in 0..NB {
                    lo[i] = lo[i].min(k.exps[i]);
                }
            }
            let mut num = Poly::zero();
            for (k, p) in &ts {
                let mut t = (*p).clone();
                for i in 0..NB {
                    let d = if i == 0 { (k.exps[i] - lo[i]) / 2 } else { k.exps[i] - lo[i] };
                    if d > 0 {
                        let bp = cache.entry((i, d)).or_insert_with(|| sp.base[i].pow(d as u32)).clone();
                        t = &t * &bp;
                    }
                }
                num = &num + &t;
            }
            let mut key = ts[0].0.clone();
            key.exps = lo;
            out.push((key, num));
        }
        out
    }

    /// Rewrites each class in lowest terms with respect to (μ,Z_V) and
    /// (μ,Z̄_V), both monic in (μ,ζ).
    pub fn reduce(&self, sp: &Space) -> DiffElement {
        let mut out = DiffElement::zero(self.b);
        for (mut key, mut num) in self.classes(sp) {
            for beta in [Base::A as usize, Base::Ab as usize] {
                while key.exps[beta] < 0 {
                    match num.div_monic_linear(&sp.base[beta], var::MU_ZETA) {
                        Some(q) => {
                            num = q;
                            key.exps[beta] += 1;
                        }
                        None => break,
                    }
                }
            }
            out.push(key, num);
        }
        out
    }

    /// Smallest exponent of a base after reduction (0 if absent).
    pub fn pole_order(&self, sp: &Space, base: Base) -> i32 {
        self.reduce(sp).terms.keys().map(|k| k.exps[base as usize]).min().unwrap_or(0).min(0)
    }

    pub fn eval(&self, sp: &Space, pt: &Point) -> Complex64 {
        self.eval_parts(sp, pt).0
    }

    /// Value together with Σ |term|, the scale for relative comparisons.
    pub fn eval_parts(&self, sp: &Space, pt: &Point) -> (Complex64, f64) {
        let bases: Vec<Complex64> = sp.base.iter().map(|p| p.eval(&pt.vals)).collect();
        let rho_z = {
            let mut s = Complex64::new(0.0, 0.0);
            for k in 0..sp.b {
                s += pt.vals[var::rho(k)] * pt.vals[var::z(k)] * sp.eta[k] as f64;
            }
            s
        };
        let rho_zb = {
            let mut s = Complex64::new(0.0, 0.0);
            for k in 0..sp.b {
                s += pt.vals[var::rho(k)] * pt.vals[var::zb(k)] * sp.eta[k] as f64;
            }
            s
        };
        let two_pi_i = Complex64::new(0.0, 2.0 * std::f64::consts::PI);
        let mut s = Complex64::new(0.0, 0.0);
        let mut mag = 0.0;
        for (k, p) in &self.terms {
            let mut t = p.eval(&pt.vals);
            let y2 = bases[0].re;
            t *= Complex64::new(y2.powf(k.exps[0] as f64 / 2.0), 0.0);
            for i in 1..NB {
                if k.exps[i] != 0 {
                    t *= bases[i].powi(k.exps[i]);
                }
            }
            t *= Complex64::new(std::f64::consts::PI.powi(k.pi), 0.0);
            for (li, base) in LOG_BASES.iter().enumerate() {
                for _ in 0..k.logs[li] {
                    t *= bases[*base as usize].ln();
                }
            }
            for _ in 0..k.twist[0] {
                t *= (two_pi_i * rho_z).exp();
            }
            for _ in 0..k.twist[1] {
                t *= (two_pi_i * rho_zb).exp();
            }
            s += t;
            mag += t.norm();
        }
        (s, mag)
    }

    pub fn render(&self) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        self.terms.iter().map(|(k, p)| format!("({}){}", p.render(), k.describe())).collect::<Vec<_>>().join(" + ")
    }
}

/// A numeric evaluation point: z̄ = conj(z) and real parameters.
#[derive(Debug, Clone)]
pub struct Point {
    pub vals: [Complex64; NV],
}

impl Point {
    /// Random point of the tube domain (y₁ > |y_rest|) with random real parameters.
    pub fn random<R: rand::Rng>(b: usize, rng: &mut R) -> Self {
        let mut vals = [Complex64::new(0.0, 0.0); NV];
        for v in 0..NV {
            vals[v] = Complex64::new(rng.gen_range(-1.0..1.0), 0.0);
        }
        for k in 0..b {
            let x = rng.gen_range(-1.0..1.0);
            let y = if k == 0 { rng.gen_range(1.5..2.5) } else { rng.gen_range(-0.4..0.4) };
            vals[var::z(k)] = Complex64::new(x, y);
            vals[var::zb(k)] = Complex64::new(x, -y);
        }
        for k in b..MAXB {
            vals[var::z(k)] = Complex64::new(0.0, 0.0);
            vals[var::zb(k)] = Complex64::new(0.0, 0.0);
        }
        Point { vals }
    }

    pub fn z(&self, k: usize) -> Complex64 {
        self.vals[var::z(k)]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn y2_and_derivatives() {
        let sp = Space::new(2).unwrap();
        let y = |k| DiffElement::from_poly(2, sp.y(k));
        let s = y(0).mul(&y(0)).sub(&y(1).mul(&y(1)));
        assert!(s.sub(&DiffElement::y2(2, 1)).is_zero(&sp));
        // ∂₁ y₁ = 1/2i
        let d = y(0).deriv(&sp, var::z(0));
        assert!(d.sub(&DiffElement::constant(2, Gq::new(qr(0, 1), qr(-1, 2)))).is_zero(&sp));
        // ∂ of S^{-1/2}·S^{1/2} is zero
        let h = DiffElement::base(2, Base::S, -1).mul(&DiffElement::base(2, Base::S, 1));
        assert!(h.deriv(&sp, var::z(1)).is_zero(&sp));
        let f = DiffElement::log(2, Base::A);
        let g = f.deriv(&sp, var::zb(0));
        assert!(g.is_zero(&sp));
    }

    #[test]
    fn reduction_removes_fake_poles() {
        let sp = Space::new(3).unwrap();
        let a = DiffElement::from_poly(3, sp.base[1].clone());
        let e = a.mul(&a).mul(&DiffElement::base(3, Base::A, -3));
        assert_eq!(e.pole_order(&sp, Base::A), -1);
        let t = DiffElement::twist(3, true).mul(&DiffElement::twist(3, false));
        assert_eq!(t.pole_order(&sp, Base::A), 0);
    }

    #[test]
    fn fixed_parameters() {
        let mut fixed = BTreeMap::new();
        fixed.insert(var::mu(0), Poly::int(1));
        fixed.insert(var::mu(1), Poly::int(0));
        fixed.insert(var::MU_Z, Poly::int(0));
        let sp = Space::with_parameters(2, fixed).unwrap();
        // μ = (1, 0; 0, (μ,ζ)): (μ,Z_V) = z1 + (μ,ζ), μ² = 1
        assert_eq!(sp.base[Base::A as usize], &Poly::var(var::z(0)) + &Poly::var(var::MU_ZETA));
        assert_eq!(sp.mu2, Poly::int(1));
        let mut bad = BTreeMap::new();
        bad.insert(var::z(0), Poly::int(1));
        assert!(Space::with_parameters(2, bad).is_err());
    }
}
