//! Pole clearing for the unimodular lift and decomposition of the cleared
//! product in M_k ⊗ M_k.
//!
//! Ψ has poles of order m+2 along q^k = p^l and, after multiplying by
//! Φ_d(j(q), j(p)) powers, poles at the cusps. Both are removed here with
//! exact series arithmetic. The d = 1 factor is cancelled symbolically:
//! (j(q) - j(p))/(q - p) is an honest power series and its (m+2)-th power
//! meets φ_{m+1}(q,p) without any division of truncated data.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde_json::json;

use crate::classical::{delta, dim_mk, j_invariant, tensor_basis, weakly_holomorphic, ModularPolynomial};
use crate::error::{Error, Result};
use crate::lift::{lift_scale, lift_unimodular, LiftExpansion};
use crate::phi::phi;
use crate::rat::{qbig, Q};
use crate::series::{BiSeries, PowerSeries, Var};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TensorDecomposition {
    pub weight: i64,
    /// lambda[r][s] multiplies F_r(q) F_s(p).
    pub lambda: Vec<Vec<Q>>,
    /// The decomposed series equals scale · Σ λ_{rs} F_r ⊗ F_s.
    pub scale: Q,
    /// Reconstruction was checked on [0, nq) x [0, np).
    pub verified_box: (i64, i64),
}

impl TensorDecomposition {
    pub fn nonzero(&self) -> Vec<(usize, usize, &Q)> {
        let mut v = Vec::new();
        for (r, row) in self.lambda.iter().enumerate() {
            for (s, c) in row.iter().enumerate() {
                if !c.is_zero() {
                    v.push((r, s, c));
                }
            }
        }
        v
    }

    pub fn is_symmetric(&self) -> bool {
        let n = self.lambda.len();
        (0..n).all(|r| (0..n).all(|s| self.lambda[r][s] == self.lambda[s][r]))
    }

    /// "-F20 - 4F11 - F02 + 984F30 + ...", ordered by r+s, then by r descending.
    pub fn render(&self) -> String {
        let mut terms = self.nonzero();
        terms.sort_by_key(|(r, s, _)| (r + s, std::cmp::Reverse(*r)));
        if terms.is_empty() {
            return "0".into();
        }
        let mut out = String::new();
        for (i, (r, s, c)) in terms.iter().enumerate() {
            let neg = c < &&Q::zero();
            let a = if neg { -(*c).clone() } else { (*c).clone() };
            let mag = if a.is_one() {
                String::new()
            } else if a.is_integer() {
                a.to_string()
            } else {
                format!("({a})")
            };
            let sign = match (i, neg) {
                (0, true) => "-".to_string(),
                (0, false) => String::new(),
                (_, true) => " - ".to_string(),
                (_, false) => " + ".to_string(),
            };
            out.push_str(&format!("{sign}{mag}F{r}{s}"));
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        let lambda: Vec<Vec<String>> = self.lambda.iter().map(|r| r.iter().map(|c| c.to_string()).collect()).collect();
        json!({
            "weight": self.weight,
            "scale": self.scale.to_string(),
            "lambda": lambda,
            "verified_box": [self.verified_box.0, self.verified_box.1],
            "table": self.render(),
        })
    }
}

type Poly2 = BTreeMap<(i64, i64), BigInt>;

fn pmul2(a: &Poly2, b: &Poly2) -> Poly2 {
    let mut out = Poly2::new();
    for ((i1, j1), c1) in a {
        for ((i2, j2), c2) in b {
            *out.entry((i1 + i2, j1 + j2)).or_insert_with(BigInt::zero) += c1 * c2;
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

fn ppow2(a: &Poly2, e: u32) -> Poly2 {
    let mut one = Poly2::new();
    one.insert((0, 0), BigInt::one());
    (0..e).fold(one, |acc, _| pmul2(&acc, a))
}

/// s · P(j(q), j(p)), where jp[i] = j^i.
fn mul_poly_in_j(s: &BiSeries, poly: &Poly2, jp: &[PowerSeries]) -> BiSeries {
    if poly.len() == 1 && poly.get(&(0, 0)).map(|c| c.is_one()).unwrap_or(false) {
        return s.clone();
    }
    let mut by_i: BTreeMap<i64, PowerSeries> = BTreeMap::new();
    for ((i, j), c) in poly {
        let t = jp[*j as usize].scale(&qbig(c.clone()));
        let e = by_i.remove(i);
        by_i.insert(*i, match e {
            None => t,
            Some(x) => &x + &t,
        });
    }
    let mut tot: Option<BiSeries> = None;
    for (i, inner) in by_i {
        let a = s * &BiSeries::from_univariate(&jp[i as usize], Var::Q);
        let term = &a * &BiSeries::from_univariate(&inner, Var::P);
        tot = Some(match tot {
            None => term,
            Some(x) => &x + &term,
        });
    }
    let (nq, np) = s.truncation();
    tot.unwrap_or_else(|| BiSeries::zero(nq, np))
}

fn poly_map(p: &ModularPolynomial) -> Poly2 {
    p.coeffs.clone()
}

/// (j(q) - j(p))/(q - p) with j known below q^n.
fn j_difference_quotient(n: i64) -> Result<BiSeries> {
    let j = j_invariant(n).series;
    let diff = &BiSeries::from_univariate(&j, Var::Q) - &BiSeries::from_univariate(&j, Var::P);
    diff.divide_antisym_by_diff()
}

/// Ψ · Π Φ_d(j(q), j(p))^{mult} · Δ(q)^n Δ(p)^n, certified on at least
/// [0, nq) x [0, np). The returned series carries its full certified box.
pub fn clear_denominators(
    psi_exp: &LiftExpansion,
    m: i64,
    delta_power: u32,
    polys: &[(ModularPolynomial, u32)],
    nq: i64,
    np: i64,
) -> Result<BiSeries> {
    if psi_exp.m != m {
        return Err(Error::WeightMismatch { found: -psi_exp.m, expected: -m });
    }
    let mut mult: BTreeMap<i64, (ModularPolynomial, u32)> = BTreeMap::new();
    for (p, e) in polys {
        p.validate()?;
        mult.entry(p.d).and_modify(|x| x.1 += e).or_insert((p.clone(), *e));
    }
    let need = (m + 2) as u32;
    let mut sing: BTreeMap<(i64, i64, i64), Q> = BTreeMap::new();
    for t in &psi_exp.singular_terms {
        if t.coefficient.is_zero() {
            continue;
        }
        match mult.get(&t.d) {
            Some((_, e)) if *e >= need => {}
            _ => return Err(Error::UnmatchedSingularTerm { d: t.d, k: t.k, l: t.l }),
        }
        *sing.entry((t.d, t.k, t.l)).or_insert_with(Q::zero) += &t.coefficient;
    }
    let full = mult.values().fold(ppow2(&Poly2::new(), 0), |acc, (p, e)| pmul2(&acc, &ppow2(&poly_map(p), *e)));
    let deg = full.keys().map(|k| k.0.max(k.1)).max().unwrap_or(0);

    let (rq, rp) = psi_exp.regular.truncation();
    let r = rq.unwrap_or(nq).max(rp.unwrap_or(np));
    let target = nq.max(np);
    let nt = target + m + 2 + deg + 4;
    let jn = (2 * nt + 2).max(r + 2 * deg + 4);
    let j = j_invariant(jn).series;
    let mut jp = vec![PowerSeries::one(jn + 2 * deg + 2)];
    for i in 1..=deg as usize {
        let next = &jp[i - 1] * &j;
        jp.push(next);
    }

    let mut total = mul_poly_in_j(&psi_exp.regular, &full, &jp);
    let phi_m = phi((m + 1) as usize);
    let mut t1: Option<BiSeries> = None;
    for ((d, k, l), c) in sing {
        let (p, e) = &mult[&d];
        let u = if d == 1 {
            if t1.is_none() {
                t1 = Some(j_difference_quotient(jn)?);
            }
            t1.clone().unwrap()
        } else {
            p.eval_j(2 * nt * k.max(l) + 4).divide_by_binomial(k, l)?
        };
        let mut rest = ppow2(&poly_map(p), e - need);
        for (d2, (p2, e2)) in &mult {
            if *d2 != d {
                rest = pmul2(&rest, &ppow2(&poly_map(p2), *e2));
            }
        }
        let term = (&phi_m.substitute(k, l) * &u.pow(need)).scale(&c);
        let term = mul_poly_in_j(&term, &rest, &jp);
        total = &total + &term;
    }

    if delta_power > 0 {
        let dn = (delta(target + 2 * deg + m + 8).series).pow(delta_power);
        total = &(&total * &BiSeries::from_univariate(&dn, Var::Q)) * &BiSeries::from_univariate(&dn, Var::P);
    }

    let (tq, tp) = total.truncation();
    if tq.map(|x| x < nq).unwrap_or(false) || tp.map(|x| x < np).unwrap_or(false) {
        return Err(Error::BoxTooSmall(format!(
            "cleared product known on {:?}x{:?}, {nq}x{np} requested",
            tq, tp
        )));
    }
    if let Some(((a, b), _)) = total.terms().find(|((a, b), _)| *a < 0 || *b < 0) {
        return Err(Error::NegativeValuationResidue(a, b));
    }
    Ok(total)
}

/// Writes g = Σ λ_{rs} F_r(q) F_s(p) in the ladder basis of M_k, then checks
/// the reconstruction on the whole known box of g.
pub fn decompose_tensor(g: &BiSeries, k: i64) -> Result<TensorDecomposition> {
    let dim = dim_mk(k);
    let (tq, tp) = g.truncation();
    let (Some(nq), Some(np)) = (tq, tp) else {
        return Err(Error::BoxTooSmall("exact input has no box to verify on".into()));
    };
    if nq <= dim as i64 || np <= dim as i64 {
        return Err(Error::BoxTooSmall(format!("box {nq}x{np} leaves no guard rows over dim {dim}")));
    }
    if let Some(((a, b), _)) = g.terms().find(|((a, b), _)| *a < 0 || *b < 0) {
        return Err(Error::NegativeValuationResidue(a, b));
    }
    let basis = tensor_basis(k, nq.max(np) + 2)?;
    let mut res = g.clone();
    let mut lambda = vec![vec![Q::zero(); dim]; dim];
    for r in 0..dim {
        for s in 0..dim {
            let c = res.coeff(r as i64, s as i64);
            if c.is_zero() {
                continue;
            }
            let t = BiSeries::tensor(&basis[r], &basis[s]).scale(&c);
            res = &res - &t;
            lambda[r][s] = c;
        }
    }
    if res.truncation() != (Some(nq), Some(np)) {
        return Err(Error::BoxTooSmall(format!("basis lost precision on {nq}x{np}")));
    }
    if let Some(((a, b), _)) = res.terms().next() {
        return Err(Error::ReconstructionMismatch(a, b));
    }
    Ok(TensorDecomposition { weight: k, lambda, scale: Q::one(), verified_box: (nq, np) })
}

#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub m: i64,
    pub principal: BTreeMap<i64, Q>,
    pub delta_power: u32,
    /// Φ_d factors with multiplicities. Empty means (Φ_1, m+2).
    pub polys: Vec<(ModularPolynomial, u32)>,
    /// Side of the final certified box; default dim M_k + 2.
    pub box_size: Option<i64>,
    /// Default (m+2) + 12 n.
    pub guard: Option<i64>,
    /// Debug: truncate the input form to what a lift box k smaller on each
    /// side would need, while claiming full precision.
    pub input_deficit: Option<i64>,
}

impl PipelineConfig {
    pub fn new(m: i64, principal: BTreeMap<i64, Q>, delta_power: u32) -> Self {
        PipelineConfig { m, principal, delta_power, polys: vec![], box_size: None, guard: None, input_deficit: None }
    }

    pub fn weight(&self) -> i64 {
        self.m + 2 + 12 * self.delta_power as i64
    }

    pub fn default_guard(&self) -> i64 {
        self.m + 2 + 12 * self.delta_power as i64
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CertifiedDecomposition {
    pub decomposition: TensorDecomposition,
    pub guards: (i64, i64),
    pub final_box: i64,
}

impl CertifiedDecomposition {
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "decomposition": self.decomposition.to_json(),
            "guards": [self.guards.0, self.guards.1],
            "final_box": self.final_box,
        })
    }
}

fn run_once(cfg: &PipelineConfig, f_full: &PowerSeries, a: i64, guard: i64) -> Result<TensorDecomposition> {
    let r = a + guard;
    let need = (r - 1) * (r - 1) + 1;
    let series = match cfg.input_deficit {
        Some(k) => {
            let short = (r - 1 - k).max(0);
            f_full.truncate(short * short + 1).relabel_truncation(need)
        }
        None => f_full.truncate(need),
    };
    let f = crate::classical::ModularFormSeries { weight: -cfg.m, series };
    let psi_exp = lift_unimodular(&f, cfg.m, r, r)?;
    let polys = if cfg.polys.is_empty() { vec![(ModularPolynomial::phi1(), (cfg.m + 2) as u32)] } else { cfg.polys.clone() };
    let g = clear_denominators(&psi_exp, cfg.m, cfg.delta_power, &polys, a, a)?;
    let scale = lift_scale(cfg.m);
    let mut dec = decompose_tensor(&g.scale(&scale.recip()), cfg.weight())?;
    dec.scale = scale;
    Ok(dec)
}

/// Weakly holomorphic input, lift, pole clearing and decomposition, run at
/// guards G and G+2; the two runs must agree.
pub fn decompose_lift(cfg: &PipelineConfig) -> Result<CertifiedDecomposition> {
    let k = cfg.weight();
    let a = cfg.box_size.unwrap_or(dim_mk(k) as i64 + 2);
    let g0 = cfg.guard.unwrap_or_else(|| cfg.default_guard());
    let g1 = g0 + 2;
    let top = a + g1;
    let f_full = weakly_holomorphic(-cfg.m, &cfg.principal, (top - 1) * (top - 1) + 1)?.series;
    let (r0, r1) = rayon::join(|| run_once(cfg, &f_full, a, g0), || run_once(cfg, &f_full, a, g1));
    match (r0, r1) {
        (Ok(d0), Ok(d1)) if d0.lambda == d1.lambda => Ok(CertifiedDecomposition { decomposition: d1, guards: (g0, g1), final_box: a }),
        (Ok(_), Ok(_)) => Err(Error::CertificationMismatch(format!("coefficients differ between guard {g0} and guard {g1}"))),
        (Err(e0), Err(e1)) if e0 == e1 => Err(e0),
        (a0, a1) => Err(Error::CertificationMismatch(format!(
            "guard {g0}: {}; guard {g1}: {}",
            a0.map(|_| "ok".to_string()).unwrap_or_else(|e| e.to_string()),
            a1.map(|_| "ok".to_string()).unwrap_or_else(|e| e.to_string())
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::qi;

    #[test]
    fn basis_elements_decompose() {
        let b = tensor_basis(16, 8).unwrap();
        let g = BiSeries::tensor(&b[0], &b[0]);
        let d = decompose_tensor(&g, 16).unwrap();
        assert_eq!(d.nonzero(), vec![(0, 0, &qi(1))]);
        let g = &BiSeries::tensor(&b[1], &b[0]) + &BiSeries::tensor(&b[0], &b[1]).scale(&qi(3));
        let d = decompose_tensor(&g, 16).unwrap();
        assert_eq!(d.nonzero().len(), 2);
        assert_eq!(d.render(), "F10 + 3F01");
    }

    #[test]
    fn stray_term_is_caught() {
        let b = tensor_basis(12, 6).unwrap();
        let g = &BiSeries::tensor(&b[0], &b[0]) + &BiSeries::monomial(qi(1), 4, 3).truncate(Some(6), Some(6));
        assert_eq!(decompose_tensor(&g, 12), Err(Error::ReconstructionMismatch(4, 3)));
    }

    #[test]
    fn zero_lift_clears_to_zero() {
        let e = LiftExpansion { m: 2, regular: BiSeries::zero(Some(8), Some(8)), singular_terms: vec![] };
        let g = clear_denominators(&e, 2, 1, &[(ModularPolynomial::phi1(), 4)], 4, 4).unwrap();
        assert!(g.is_zero());
    }

    #[test]
    fn missing_factor() {
        let mut pr = BTreeMap::new();
        pr.insert(1, qi(1));
        let f = weakly_holomorphic(-2, &pr, 50).unwrap();
        let e = lift_unimodular(&f, 2, 6, 6).unwrap();
        assert_eq!(
            clear_denominators(&e, 2, 3, &[], 3, 3),
            Err(Error::UnmatchedSingularTerm { d: 1, k: 1, l: 1 })
        );
        assert_eq!(
            clear_denominators(&e, 2, 3, &[(ModularPolynomial::phi1(), 3)], 3, 3),
            Err(Error::UnmatchedSingularTerm { d: 1, k: 1, l: 1 })
        );
    }
}
