//! Generators of O⁺(V) acting on the tube domain, the slash operators they
//! induce on rational elements, and an exact check of the cocycle relation.
//!
//! Coordinates on V are (α, a, b) = aζ + bz + α. For the cocycle check we
//! take ζ² = 0, which keeps every matrix entry polynomial.

use std::collections::BTreeMap;

use num_complex::Complex64;
use num_traits::{Signed, Zero};

use super::element::{Base, DiffElement, Key, Point, Space};
use super::gauss::Gq;
use super::poly::{var, Poly, MAXB};
use crate::error::{Error, Result};
use crate::rat::{qi, to_f64, Q};

#[derive(Debug, Clone, PartialEq)]
pub enum GroupElement {
    /// Z ↦ Z + ξ
    P(Vec<Poly>),
    /// Z ↦ aAZ
    K { a: Q, mat: Vec<Vec<Q>> },
    /// Z ↦ 2(Z - 2(Z,u₁)u₁)/Z²
    W,
    /// g₁g₂…: applied to Z right to left
    Word(Vec<GroupElement>),
}

fn eta(b: usize) -> Vec<i64> {
    (0..b).map(|k| if k == 0 { 1 } else { -1 }).collect()
}

impl GroupElement {
    pub fn p_rational(xi: &[Q]) -> Self {
        GroupElement::P(xi.iter().map(|x| Poly::constant(Gq::real(x.clone()))).collect())
    }

    /// Translation by the symbolic vector (ξ₁, …, ξ_b).
    pub fn p_symbolic(b: usize) -> Self {
        GroupElement::P((0..b).map(|k| Poly::var(var::xi(k))).collect())
    }

    /// k_{a,A}; A must preserve the form and sign(a) must say whether A
    /// preserves the cone.
    pub fn k(a: Q, mat: Vec<Vec<Q>>) -> Result<Self> {
        let b = mat.len();
        if b == 0 || b > MAXB || mat.iter().any(|r| r.len() != b) {
            return Err(Error::InvalidGroupElement("matrix must be square of size 1..=4".into()));
        }
        if a.is_zero() {
            return Err(Error::InvalidGroupElement("a = 0".into()));
        }
        let e = eta(b);
        for i in 0..b {
            for j in 0..b {
                let mut s = Q::zero();
                for k in 0..b {
                    s += &mat[k][i] * &mat[k][j] * qi(e[k]);
                }
                if s != qi(if i == j { e[i] } else { 0 }) {
                    return Err(Error::InvalidGroupElement("matrix is not orthogonal for the form".into()));
                }
            }
        }
        let keeps_cone = mat[0][0].is_positive();
        if keeps_cone != a.is_positive() {
            return Err(Error::InvalidGroupElement(format!(
                "a = {a} has the wrong sign: the matrix {} the positive cone",
                if keeps_cone { "preserves" } else { "swaps" }
            )));
        }
        Ok(GroupElement::K { a, mat })
    }

    pub fn k_scalar(a: Q, b: usize) -> Result<Self> {
        let sign = if a.is_positive() { 1 } else { -1 };
        let mat = (0..b).map(|i| (0..b).map(|j| qi(if i == j { sign } else { 0 })).collect()).collect();
        GroupElement::k(a, mat)
    }

    fn generators(&self) -> Vec<&GroupElement> {
        match self {
            GroupElement::Word(v) => v.iter().flat_map(|g| g.generators()).collect(),
            g => vec![g],
        }
    }

    pub fn describe(&self) -> String {
        match self {
            GroupElement::P(x) => format!("p[{}]", x.iter().map(|p| p.render()).collect::<Vec<_>>().join(",")),
            GroupElement::K { a, mat } => format!(
                "k[a={a};{}]",
                mat.iter().map(|r| r.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")).collect::<Vec<_>>().join("|")
            ),
            GroupElement::W => "w".into(),
            GroupElement::Word(v) => v.iter().map(|g| g.describe()).collect::<Vec<_>>().join("*"),
        }
    }

    fn check_b(&self, b: usize) -> Result<()> {
        for g in self.generators() {
            let n = match g {
                GroupElement::P(x) => x.len(),
                GroupElement::K { mat, .. } => mat.len(),
                _ => b,
            };
            if n != b {
                return Err(Error::DimensionMismatch(format!("group element acts on b = {n}, element has b = {b}")));
            }
        }
        Ok(())
    }
}

/// F[M]_{m,n} = J(M,Z)^{-m} conj(J(M,Z))^{-n} F(MZ) for a rational element F.
/// Words act one generator at a time, F[g₁g₂] = (F[g₁])[g₂].
pub fn slash(sp: &Space, g: &GroupElement, weights: (i64, i64), f: &DiffElement) -> Result<DiffElement> {
    g.check_b(f.b)?;
    let mut out = f.clone();
    for h in g.generators() {
        out = slash_generator(sp, h, weights, &out)?;
    }
    Ok(out)
}

fn holo_image(sp: &Space, g: &GroupElement, conj: bool) -> BTreeMap<usize, Poly> {
    let v = |k: usize| if conj { var::zb(k) } else { var::z(k) };
    let mut m = BTreeMap::new();
    match g {
        GroupElement::P(xi) => {
            for k in 0..sp.b {
                m.insert(v(k), &Poly::var(v(k)) + &xi[k]);
            }
        }
        GroupElement::K { a, mat } => {
            for k in 0..sp.b {
                let mut s = Poly::zero();
                for j in 0..sp.b {
                    s = &s + &Poly::var(v(j)).scale(&Gq::real(a * &mat[k][j]));
                }
                m.insert(v(k), s);
            }
        }
        _ => unreachable!(),
    }
    m
}

fn unsupported(what: &str, g: &GroupElement) -> Error {
    Error::UnsupportedAtomForSubstitution(format!("{what} under {}", g.describe()))
}

fn slash_generator(sp: &Space, g: &GroupElement, (m, n): (i64, i64), f: &DiffElement) -> Result<DiffElement> {
    let b = f.b;
    let mut out = DiffElement::zero(b);
    let images = match g {
        GroupElement::W => None,
        _ => {
            let mut im = holo_image(sp, g, false);
            im.extend(holo_image(sp, g, true));
            Some(im)
        }
    };
    for (key, c) in f.terms() {
        if key.logs != [0; 3] || key.twist != [0; 2] {
            return Err(unsupported("logarithm or exponential twist", g));
        }
        if key.exps[Base::A as usize] != 0 || key.exps[Base::Ab as usize] != 0 {
            return Err(unsupported("power of (mu,Z_V)", g));
        }
        if key.exps[0] % 2 != 0 {
            return Err(unsupported("half-integral power of Y^2", g));
        }
        let k2 = Key { pi: key.pi, ..Key::default() };
        let mut term = match &images {
            Some(im) => DiffElement::atom(b, k2, c.substitute(im)),
            None => w_substitute(b, c, key.pi),
        };
        let t = key.exps[0] / 2;
        let s_img = match g {
            GroupElement::P(_) => DiffElement::y2(b, t),
            GroupElement::K { a, .. } => DiffElement::y2(b, t).scale(&Gq::real(a.clone()).pow(2 * t as i64)),
            GroupElement::W => DiffElement::y2(b, t)
                .mul(&DiffElement::base(b, Base::Q, -t))
                .mul(&DiffElement::base(b, Base::Qb, -t))
                .scale(&Gq::int(4).pow(t as i64)),
            GroupElement::Word(_) => unreachable!(),
        };
        term = term.mul(&s_img);
        for (beta, conj) in [(Base::Q, false), (Base::Qb, true)] {
            let e = key.exps[beta as usize];
            if e == 0 {
                continue;
            }
            let img = match g {
                GroupElement::P(_) => {
                    if e < 0 {
                        return Err(unsupported("negative power of Z^2", g));
                    }
                    let im = holo_image(sp, g, conj);
                    DiffElement::from_poly(b, sp.base[beta as usize].substitute(&im).pow(e as u32))
                }
                GroupElement::K { a, .. } => DiffElement::base(b, beta, e).scale(&Gq::real(a.clone()).pow(2 * e as i64)),
                GroupElement::W => DiffElement::base(b, beta, -e).scale(&Gq::int(4).pow(e as i64)),
                GroupElement::Word(_) => unreachable!(),
            };
            term = term.mul(&img);
        }
        out = out.add(&term);
    }
    let jf = match g {
        GroupElement::P(_) => DiffElement::int(b, 1),
        GroupElement::K { a, .. } => DiffElement::constant(b, Gq::real(a.clone()).pow(m + n)),
        GroupElement::W => DiffElement::base(b, Base::Q, -(m as i32))
            .mul(&DiffElement::base(b, Base::Qb, -(n as i32)))
            .scale(&Gq::int(2).pow(m + n)),
        GroupElement::Word(_) => unreachable!(),
    };
    Ok(out.mul(&jf))
}

/// z_k ↦ 2ε_k z_k / Z² with ε = (-1, 1, …, 1), and likewise for z̄.
fn w_substitute(b: usize, c: &Poly, pi: i32) -> DiffElement {
    let mut out = DiffElement::zero(b);
    for (mono, coef) in c.terms() {
        let mut d = 0i32;
        let mut db = 0i32;
        let mut sign = 1i64;
        for k in 0..MAXB {
            d += mono[var::z(k)] as i32;
            db += mono[var::zb(k)] as i32;
        }
        if (mono[var::z(0)] + mono[var::zb(0)]) % 2 == 1 {
            sign = -1;
        }
        let mut key = Key { pi, ..Key::default() };
        key.exps[Base::Q as usize] = -d;
        key.exps[Base::Qb as usize] = -db;
        let f = coef * &Gq::int(sign * (1i64 << (d + db)));
        out = out.add(&DiffElement::atom(b, key, Poly::monomial(*mono, f)));
    }
    out
}

/// Numeric action of a generator word on a point of the tube domain,
/// together with the accumulated factor J(M, Z).
/// Floating action on Z with the automorphy factor; symbolic translation
/// vectors are evaluated at `params`.
pub fn act_numeric(g: &GroupElement, z: &[Complex64], params: &[Complex64; super::poly::NV]) -> (Vec<Complex64>, Complex64) {
    let b = z.len();
    let e = eta(b);
    let mut w = z.to_vec();
    let mut j = Complex64::new(1.0, 0.0);
    for h in g.generators().into_iter().rev() {
        match h {
            GroupElement::P(xi) => {
                for k in 0..b {
                    w[k] += xi[k].eval(params);
                }
            }
            GroupElement::K { a, mat } => {
                let a = to_f64(a);
                let old = w.clone();
                for k in 0..b {
                    w[k] = (0..b).map(|l| old[l] * to_f64(&mat[k][l]) * a).sum();
                }
                j /= a;
            }
            GroupElement::W => {
                let q: Complex64 = (0..b).map(|k| w[k] * w[k] * e[k] as f64).sum();
                for k in 0..b {
                    let s = if k == 0 { -2.0 } else { 2.0 };
                    w[k] = w[k] * s / q;
                }
                j *= q / 2.0;
            }
            GroupElement::Word(_) => unreachable!(),
        }
    }
    (w, j)
}

/// Independent floating evaluation of F[M]_{m,n}(Z) = J^{-m} J̄^{-n} F(MZ).
pub fn slash_numeric(sp: &Space, g: &GroupElement, (m, n): (i64, i64), f: &DiffElement, pt: &Point) -> Complex64 {
    // F[g₁g₂] = (F[g₁])[g₂] means the word acts on Z as g₂ first.
    let seq: Vec<GroupElement> = g.generators().into_iter().cloned().collect();
    let rev = GroupElement::Word(seq.into_iter().rev().collect());
    let z: Vec<Complex64> = (0..sp.b).map(|k| pt.z(k)).collect();
    let (w, j) = act_numeric(&rev, &z, &pt.vals);
    let mut p2 = pt.clone();
    for k in 0..sp.b {
        p2.vals[var::z(k)] = w[k];
        p2.vals[var::zb(k)] = w[k].conj();
    }
    f.eval(sp, &p2) * j.powi(-(m as i32)) * j.conj().powi(-(n as i32))
}

/// Vectors of V with ζ² = 0, entries polynomial in z.
#[derive(Debug, Clone)]
struct V3 {
    k: Vec<Poly>,
    a: Poly,
    b: Poly,
}

fn kdot(e: &[i64], x: &[Poly], y: &[Poly]) -> Poly {
    let mut s = Poly::zero();
    for i in 0..e.len() {
        s = &s + &(&x[i] * &y[i]).scale(&Gq::int(e[i]));
    }
    s
}

fn matrix_act(e: &[i64], g: &GroupElement, v: &V3) -> V3 {
    let b = e.len();
    match g {
        GroupElement::P(xi) => {
            let k = (0..b).map(|i| &v.k[i] + &(&v.a * &xi[i])).collect();
            let bb = &(&v.b - &kdot(e, &v.k, xi)) - &(&v.a * &kdot(e, xi, xi)).scale(&Gq::real(crate::rat::qr(1, 2)));
            V3 { k, a: v.a.clone(), b: bb }
        }
        GroupElement::K { a, mat } => {
            let k = (0..b)
                .map(|i| (0..b).fold(Poly::zero(), |s, j| &s + &v.k[j].scale(&Gq::real(mat[i][j].clone()))))
                .collect();
            V3 { k, a: v.a.scale(&Gq::real(a.clone()).inv()), b: v.b.scale(&Gq::real(a.clone())) }
        }
        GroupElement::W => {
            let k = (0..b).map(|i| if i == 0 { -&v.k[i] } else { v.k[i].clone() }).collect();
            V3 { k, a: -&v.b, b: -&v.a }
        }
        GroupElement::Word(_) => unreachable!(),
    }
}

/// Checks J(MN,Z) = J(M,NZ)J(N,Z) along the word, exactly: the factor of the
/// product read off the linear action on Z_V is compared with the product of
/// the generator factors at the successive image points, and so are the points.
pub fn check_cocycle(b: usize, g: &GroupElement) -> Result<bool> {
    g.check_b(b)?;
    let e = eta(b);
    let zs: Vec<Poly> = (0..b).map(|k| Poly::var(var::z(k))).collect();
    let zv = V3 { k: zs.clone(), a: Poly::one(), b: kdot(&e, &zs, &zs).scale(&Gq::real(crate::rat::qr(-1, 2))) };
    let gens = g.generators();
    let mut v = zv;
    for h in gens.iter().rev() {
        v = matrix_act(&e, h, &v);
    }
    // chain: W = U/D, J = jn/jd
    let mut u = zs;
    let mut d = Poly::one();
    let mut jn = Poly::one();
    let mut jd = Poly::one();
    for h in gens.iter().rev() {
        match h {
            GroupElement::P(xi) => {
                u = (0..b).map(|k| &u[k] + &(&xi[k] * &d)).collect();
            }
            GroupElement::K { a, mat } => {
                u = (0..b)
                    .map(|i| (0..b).fold(Poly::zero(), |s, j| &s + &u[j].scale(&Gq::real(a * &mat[i][j]))))
                    .collect();
                jd = jd.scale(&Gq::real(a.clone()));
            }
            GroupElement::W => {
                let u2 = kdot(&e, &u, &u);
                let nu: Vec<Poly> = (0..b)
                    .map(|k| (&d * &u[k]).scale(&Gq::int(if k == 0 { -2 } else { 2 })))
                    .collect();
                jn = &jn * &u2;
                jd = (&jd * &(&d * &d)).scale(&Gq::int(2));
                u = nu;
                d = u2;
            }
            GroupElement::Word(_) => unreachable!(),
        }
    }
    let j_ok = &v.a * &jd == jn;
    let pts_ok = (0..b).all(|k| &v.k[k] * &d == &u[k] * &v.a);
    Ok(j_ok && pts_ok)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::qr;

    #[test]
    fn translation_and_scaling() {
        let sp = Space::new(2).unwrap();
        let f = DiffElement::from_poly(2, Poly::var(var::z(0)));
        let g = slash(&sp, &GroupElement::p_symbolic(2), (3, 1), &f).unwrap();
        let want = DiffElement::from_poly(2, &Poly::var(var::z(0)) + &Poly::var(var::xi(0)));
        assert!(g.sub(&want).is_zero(&sp));
        let k = GroupElement::k_scalar(qi(3), 2).unwrap();
        let one = slash(&sp, &k, (2, 0), &DiffElement::int(2, 1)).unwrap();
        assert!(one.sub(&DiffElement::int(2, 9)).is_zero(&sp));
    }

    #[test]
    fn involution_on_norm() {
        let sp = Space::new(3).unwrap();
        let q = DiffElement::from_poly(3, sp.base[Base::Q as usize].clone());
        let g = slash(&sp, &GroupElement::W, (0, 0), &q).unwrap();
        let want = DiffElement::base(3, Base::Q, -1).scale(&Gq::int(4));
        assert!(g.sub(&want).is_zero(&sp));
    }

    #[test]
    fn sign_rule() {
        assert!(GroupElement::k_scalar(qi(-2), 2).is_ok());
        let id = vec![vec![qi(1), qi(0)], vec![qi(0), qi(1)]];
        assert!(matches!(GroupElement::k(qi(-2), id), Err(Error::InvalidGroupElement(_))));
        let bad = vec![vec![qi(1), qi(1)], vec![qi(0), qi(1)]];
        assert!(GroupElement::k(qi(1), bad).is_err());
        let boost = vec![vec![qr(5, 4), qr(3, 4)], vec![qr(3, 4), qr(5, 4)]];
        assert!(GroupElement::k(qr(1, 2), boost).is_ok());
    }

    #[test]
    fn cocycle_on_words() {
        let boost = vec![vec![qr(5, 4), qr(3, 4)], vec![qr(3, 4), qr(5, 4)]];
        let k = GroupElement::k(qr(1, 2), boost).unwrap();
        let p = GroupElement::p_rational(&[qr(1, 3), qi(-1)]);
        let word = GroupElement::Word(vec![GroupElement::W, p.clone(), k, GroupElement::W]);
        assert!(check_cocycle(2, &word).unwrap());
        assert!(check_cocycle(2, &GroupElement::Word(vec![p, GroupElement::W])).unwrap());
    }

    #[test]
    fn logs_are_rejected() {
        let sp = Space::new(2).unwrap();
        let f = DiffElement::log(2, Base::S);
        assert!(matches!(slash(&sp, &GroupElement::W, (0, 0), &f), Err(Error::UnsupportedAtomForSubstitution(_))));
    }
}
