//! Differential operators as composable expression trees.
//!
//! Coefficients always multiply from the left: `R_m = Δ^h - i(2m+2-b)/Y² D* - ...`
//! means first differentiate, then multiply.

use super::element::{DiffElement, Space};
use super::gauss::Gq;
use super::poly::{var, Poly};
use crate::coeffs::raising_table;
use crate::error::{Error, Result};
use crate::rat::{qi, qr};

#[derive(Debug, Clone)]
pub enum Op {
    Id,
    /// ∂_k
    D(usize),
    /// ∂_{k̄}
    Db(usize),
    Mul(DiffElement),
    /// multiplication by (Y²)^t
    Y2Pow(i32),
    /// Σ x_k ∂_{x_k}
    Euler,
    /// D = Σ z_k ∂_k
    DHol,
    DStar,
    DStarBar,
    /// Σ y_k y_l ∂_k ∂_{l̄}
    AbsDStar2,
    /// Σ y_k y_l ∂_k ∂_l
    DStar2,
    LapH,
    LapHb,
    LapR,
    /// Laplacian of the real space, ∂_{x_1}² - Σ ∂_{x_k}²
    LapK,
    Raise(i64),
    Lower,
    Laplace(i64, i64),
    Xi(i64),
    /// R_{m+2l-2} ∘ ... ∘ R_m
    RaisePow(i64, usize),
    /// the same operator expanded through the coefficient table
    RaisePowTable(i64, usize),
    /// (a ∘ b) f = a(b(f))
    Compose(Box<Op>, Box<Op>),
    Sum(Vec<(Gq, Op)>),
}

impl Op {
    pub fn then(self, outer: Op) -> Op {
        Op::Compose(Box::new(outer), Box::new(self))
    }

    pub fn compose(outer: Op, inner: Op) -> Op {
        Op::Compose(Box::new(outer), Box::new(inner))
    }

    pub fn scaled(c: Gq, op: Op) -> Op {
        Op::Sum(vec![(c, op)])
    }

    pub fn minus(a: Op, b: Op) -> Op {
        Op::Sum(vec![(Gq::one(), a), (Gq::int(-1), b)])
    }

    pub fn scalar(c: Gq) -> Op {
        Op::Sum(vec![(c, Op::Id)])
    }

    /// Differential order, used to size test sets.
    pub fn order(&self) -> usize {
        match self {
            Op::Id | Op::Mul(_) | Op::Y2Pow(_) => 0,
            Op::D(_) | Op::Db(_) | Op::Euler | Op::DHol | Op::DStar | Op::DStarBar => 1,
            Op::AbsDStar2 | Op::DStar2 | Op::LapH | Op::LapHb | Op::LapR | Op::LapK => 2,
            Op::Raise(_) | Op::Lower | Op::Laplace(..) => 2,
            Op::Xi(_) => 4,
            Op::RaisePow(_, l) | Op::RaisePowTable(_, l) => 2 * l,
            Op::Compose(a, b) => a.order() + b.order(),
            Op::Sum(v) => v.iter().map(|(_, o)| o.order()).max().unwrap_or(0),
        }
    }

    /// True if only holomorphic derivatives occur.
    pub fn is_holomorphic(&self) -> bool {
        match self {
            Op::Db(_) | Op::Euler | Op::DStarBar | Op::AbsDStar2 | Op::LapHb | Op::LapR | Op::LapK => false,
            Op::Lower | Op::Laplace(..) | Op::Xi(_) => false,
            Op::Compose(a, b) => a.is_holomorphic() && b.is_holomorphic(),
            Op::Sum(v) => v.iter().all(|(_, o)| o.is_holomorphic()),
            _ => true,
        }
    }
}

fn b_i(sp: &Space) -> i64 {
    sp.b as i64
}

fn lincomb(b: usize, parts: Vec<(Gq, DiffElement)>) -> DiffElement {
    parts.into_iter().fold(DiffElement::zero(b), |acc, (c, e)| acc.add(&e.scale(&c)))
}

fn x_poly(k: usize) -> Poly {
    (&Poly::var(var::z(k)) + &Poly::var(var::zb(k))).scale(&Gq::real(qr(1, 2)))
}

fn eta(sp: &Space, k: usize) -> Gq {
    Gq::int(sp.eta[k])
}

/// Applies an operator; the element and the space must agree on b.
pub fn apply(sp: &Space, op: &Op, f: &DiffElement) -> Result<DiffElement> {
    if f.b != sp.b {
        return Err(Error::DimensionMismatch(format!("element has b = {}, operator b = {}", f.b, sp.b)));
    }
    Ok(run(sp, op, f))
}

fn run(sp: &Space, op: &Op, f: &DiffElement) -> DiffElement {
    let b = sp.b;
    let bi = b_i(sp);
    let i = Gq::i();
    match op {
        Op::Id => f.clone(),
        Op::D(k) => f.deriv(sp, var::z(*k)),
        Op::Db(k) => f.deriv(sp, var::zb(*k)),
        Op::Mul(g) => g.mul(f),
        Op::Y2Pow(t) => DiffElement::y2(b, *t).mul(f),
        Op::Euler => {
            let mut out = DiffElement::zero(b);
            for k in 0..b {
                let d = f.deriv(sp, var::z(k)).add(&f.deriv(sp, var::zb(k)));
                out = out.add(&d.mul_poly(&x_poly(k)));
            }
            out
        }
        Op::DHol => {
            let mut out = DiffElement::zero(b);
            for k in 0..b {
                out = out.add(&f.deriv(sp, var::z(k)).mul_poly(&Poly::var(var::z(k))));
            }
            out
        }
        Op::DStar | Op::DStarBar => {
            let hol = matches!(op, Op::DStar);
            let mut out = DiffElement::zero(b);
            for k in 0..b {
                let v = if hol { var::z(k) } else { var::zb(k) };
                out = out.add(&f.deriv(sp, v).mul_poly(&sp.y(k)));
            }
            out
        }
        Op::AbsDStar2 | Op::DStar2 => {
            let mixed = matches!(op, Op::AbsDStar2);
            let mut out = DiffElement::zero(b);
            for l in 0..b {
                let g = f.deriv(sp, if mixed { var::zb(l) } else { var::z(l) });
                for k in 0..b {
                    let h = g.deriv(sp, var::z(k));
                    out = out.add(&h.mul_poly(&(&sp.y(k) * &sp.y(l))));
                }
            }
            out
        }
        Op::LapH | Op::LapHb | Op::LapR => {
            let mut out = DiffElement::zero(b);
            for k in 0..b {
                let (v1, v2) = match op {
                    Op::LapH => (var::z(k), var::z(k)),
                    Op::LapHb => (var::zb(k), var::zb(k)),
                    _ => (var::z(k), var::zb(k)),
                };
                out = out.add(&f.deriv(sp, v2).deriv(sp, v1).scale(&eta(sp, k)));
            }
            out
        }
        Op::LapK => {
            let mut out = DiffElement::zero(b);
            for k in 0..b {
                let g = f.deriv(sp, var::z(k)).add(&f.deriv(sp, var::zb(k)));
                let h = g.deriv(sp, var::z(k)).add(&g.deriv(sp, var::zb(k)));
                out = out.add(&h.scale(&eta(sp, k)));
            }
            out
        }
        Op::Raise(m) => {
            let c = 2 * m + 2 - bi;
            let inv = DiffElement::y2(b, -1);
            lincomb(
                b,
                vec![
                    (Gq::one(), run(sp, &Op::LapH, f)),
                    (&i * &Gq::int(-c), inv.mul(&run(sp, &Op::DStar, f))),
                    (Gq::real(qr(-m * c, 2)), inv.mul(f)),
                ],
            )
        }
        Op::Lower => lincomb(
            b,
            vec![
                (Gq::one(), DiffElement::y2(b, 2).mul(&run(sp, &Op::LapHb, f))),
                (&i * &Gq::int(2 - bi), DiffElement::y2(b, 1).mul(&run(sp, &Op::DStarBar, f))),
            ],
        ),
        Op::Laplace(m, n) => {
            let s = DiffElement::y2(b, 1);
            lincomb(
                b,
                vec![
                    (Gq::int(8), run(sp, &Op::AbsDStar2, f)),
                    (Gq::int(-4), s.mul(&run(sp, &Op::LapR, f))),
                    (&i * &Gq::int(-4 * m), run(sp, &Op::DStarBar, f)),
                    (&i * &Gq::int(4 * n), run(sp, &Op::DStar, f)),
                    (Gq::int(2 * n * (2 * m - bi)), f.clone()),
                ],
            )
        }
        Op::Xi(m) => {
            let c = 2 * m + 2 - bi;
            let s = DiffElement::y2(b, 1);
            let s2 = DiffElement::y2(b, 2);
            let hb = run(sp, &Op::LapHb, f);
            let h = run(sp, &Op::LapH, f);
            lincomb(
                b,
                vec![
                    (Gq::one(), s2.mul(&run(sp, &Op::LapH, &hb))),
                    (&i * &Gq::int(-c), s.mul(&run(sp, &Op::DStar, &hb))),
                    (&i * &Gq::int(2 - bi), s.mul(&run(sp, &Op::DStarBar, &h))),
                    (Gq::real(qr((2 - bi) * c, 2)), s.mul(&run(sp, &Op::LapR, f))),
                    (Gq::real(qr(-m * c, 2)), s.mul(&hb)),
                ],
            )
        }
        Op::RaisePow(m, l) => {
            let mut g = f.clone();
            for r in 0..*l {
                g = run(sp, &Op::Raise(m + 2 * r as i64), &g);
            }
            g
        }
        Op::RaisePowTable(m, l) => {
            let t = raising_table(*m, bi, *l).expect("raising table closed form");
            let mut lap = vec![f.clone()];
            for _ in 0..*l {
                let next = run(sp, &Op::LapH, lap.last().unwrap());
                lap.push(next);
            }
            let mut out = DiffElement::zero(b);
            for c in 0..=*l {
                for a in 0..=c {
                    let coef = t.get(a as i64, c as i64);
                    if coef == qi(0) {
                        continue;
                    }
                    let mut g = lap[*l - c].clone();
                    for _ in 0..(c - a) {
                        g = run(sp, &Op::DStar, &g).scale(&i);
                    }
                    let sign = if c % 2 == 0 { 1 } else { -1 };
                    let g = DiffElement::y2(b, -(c as i32)).mul(&g).scale(&Gq::real(coef * qi(sign)));
                    out = out.add(&g);
                }
            }
            out
        }
        Op::Compose(a, bb) => {
            let g = run(sp, bb, f);
            run(sp, a, &g)
        }
        Op::Sum(v) => {
            let mut out = DiffElement::zero(b);
            for (c, o) in v {
                out = out.add(&run(sp, o, f).scale(c));
            }
            out
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn el(b: usize, p: Poly) -> DiffElement {
        DiffElement::from_poly(b, p)
    }

    #[test]
    fn holomorphic_laplacian_of_square() {
        let sp = Space::new(2).unwrap();
        let f = el(2, Poly::var(var::z(0)).pow(2));
        let g = apply(&sp, &Op::LapH, &f).unwrap();
        assert!(g.sub(&DiffElement::int(2, 2)).is_zero(&sp));
    }

    #[test]
    fn dstar_pair_kills_functions_of_y() {
        let sp = Space::new(3).unwrap();
        let f = DiffElement::y2(3, -2).mul(&el(3, sp.y(1))).add(&DiffElement::base(3, super::super::element::Base::S, 3));
        let g = apply(&sp, &Op::Sum(vec![(Gq::one(), Op::DStar), (Gq::one(), Op::DStarBar)]), &f).unwrap();
        assert!(g.is_zero(&sp));
    }

    #[test]
    fn b_mismatch_is_reported() {
        let sp = Space::new(2).unwrap();
        assert!(matches!(apply(&sp, &Op::LapH, &DiffElement::int(3, 1)), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn power_table_matches_composition() {
        let sp = Space::new(3).unwrap();
        let f = el(3, &Poly::var(var::z(0)).pow(2) * &Poly::var(var::z(1)).pow(2));
        for m in [-1, 0, 2] {
            let a = apply(&sp, &Op::RaisePow(m, 2), &f).unwrap();
            let t = apply(&sp, &Op::RaisePowTable(m, 2), &f).unwrap();
            assert!(a.sub(&t).is_zero(&sp));
        }
    }
}
