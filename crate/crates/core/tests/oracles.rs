//! Hand-derived and brute-force oracle values, frozen.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use singlift::classical::{delta, eisenstein, j_invariant, load_modular_polynomial, weakly_holomorphic, ModularPolynomial};
use singlift::coeffs::{c_k0, ext_binom, maass_power_coeffs, raising_table, singular_coeffs, singular_recurrence_holds};
use singlift::lift::{lift_general, lift_unimodular, singularity_residue, unimodular_residue_check, LatticeInput};
use singlift::opcalc::group::slash_numeric;
use singlift::opcalc::poly::var;
use singlift::opcalc::{apply, eigen_kernel, slash, DiffElement, GroupElement, Gq, Op, Point, Poly, Sign, Space};
use singlift::phi::{h_series, phi, verify_inversion};
use singlift::rat::{qi, qr, Q};
use singlift::{BiSeries, Error, PowerSeries, Var};

fn principal(pairs: &[(i64, i64)]) -> BTreeMap<i64, Q> {
    pairs.iter().map(|(d, c)| (*d, qi(*c))).collect()
}

fn ints(v: &[i64]) -> Vec<Q> {
    v.iter().map(|x| qi(*x)).collect()
}

// ---------------------------------------------------------------- series

#[test]
fn inverse_of_delta() {
    let inv = delta(5).series.invert_unit().unwrap();
    assert_eq!(inv.valuation(), -1);
    assert_eq!(inv.dense_from(-1), ints(&[1, 24, 324, 3200]));
}

#[test]
fn delta_in_q_squared() {
    let d2 = delta(4).series.substitute_power_uni(2);
    assert_eq!(d2.coeff(2), qi(1));
    assert_eq!(d2.coeff(3), qi(0));
    assert_eq!(d2.coeff(4), qi(-24));
}

#[test]
fn antisymmetric_division_examples() {
    let q_minus_p = &BiSeries::monomial(qi(1), 1, 0) - &BiSeries::monomial(qi(1), 0, 1);
    assert_eq!(q_minus_p.divide_antisym_by_diff().unwrap(), BiSeries::one());
    let sq = &BiSeries::monomial(qi(1), 2, 0) - &BiSeries::monomial(qi(1), 0, 2);
    let want = &BiSeries::monomial(qi(1), 1, 0) + &BiSeries::monomial(qi(1), 0, 1);
    assert_eq!(sq.divide_antisym_by_diff().unwrap(), want);
    let inv = &BiSeries::monomial(qi(1), -1, 0) - &BiSeries::monomial(qi(1), 0, -1);
    assert_eq!(inv.divide_antisym_by_diff().unwrap(), BiSeries::monomial(qi(-1), -1, -1));
    let sym = &BiSeries::monomial(qi(1), 1, 0) + &BiSeries::monomial(qi(1), 0, 1);
    assert!(matches!(sym.divide_antisym_by_diff(), Err(Error::NotAntisymmetric(..))));
}

#[test]
fn substitution_into_one_variable() {
    let s = PowerSeries::from_coeffs([(0, qi(1)), (1, qi(1))], 4);
    let b = s.substitute_power(2, Var::Q);
    assert_eq!(b.coeff(2, 0), qi(1));
    assert_eq!(b.coeff(0, 0), qi(1));
    assert_eq!(b.coeff(1, 0), qi(0));
}

// ------------------------------------------------------------- classical

#[test]
fn eisenstein_leading_terms() {
    assert_eq!(eisenstein(4, 3).unwrap().series.dense_from(0), ints(&[1, 240, 2160]));
    assert_eq!(eisenstein(6, 2).unwrap().c(1), qi(-504));
    assert_eq!(eisenstein(10, 2).unwrap().c(1), qi(-264));
}

#[test]
fn delta_and_j_expansions() {
    assert_eq!(delta(4).series.dense_from(1), ints(&[1, -24, 252]));
    assert_eq!(j_invariant(2).series.dense_from(-1), ints(&[1, 744, 196884]));
}

#[test]
fn eisenstein_delta_identity() {
    let n = 30;
    let e4 = eisenstein(4, n).unwrap().series;
    let e6 = eisenstein(6, n).unwrap().series;
    let lhs = &e4.pow(3) - &e6.pow(2);
    assert_eq!(lhs, delta(n).series.scale(&qi(1728)));
}

#[test]
fn weakly_holomorphic_weight_minus_two() {
    let f = weakly_holomorphic(-2, &principal(&[(1, 1)]), 6).unwrap();
    assert_eq!(f.c(-1), qi(1));
    assert_eq!(f.c(0), qi(-240));
    assert_eq!(f.c(1), qi(-141444));
}

#[test]
fn weakly_holomorphic_weight_zero_is_j_minus_744() {
    let f = weakly_holomorphic(0, &principal(&[(1, 1)]), 5).unwrap();
    let j = j_invariant(5).series;
    assert_eq!(f.series, &j - &PowerSeries::monomial(qi(744), 0, 5));
}

#[test]
fn phi2_from_data_is_symmetric() {
    let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("data/phi2.txt");
    let p2 = load_modular_polynomial(2, Some(&path)).unwrap();
    assert!(p2.validate().is_ok());
    let text = std::fs::read_to_string(&path).unwrap();
    let broken = text.replace("2 1 1488", "2 1 1489");
    assert!(matches!(ModularPolynomial::parse(2, &broken), Err(Error::SymmetryViolation(..))));
}

// ------------------------------------------------------------------- phi

#[test]
fn phi_recursion_values() {
    assert_eq!(phi(1).coeffs, ints(&[0, 1, 0]));
    // wu(w² + 4wu + u²)
    assert_eq!(phi(3).coeffs, ints(&[0, 1, 4, 1, 0]));
    assert_eq!(h_series(1, 5).dense_from(0), ints(&[0, 1, 2, 3, 4]));
    assert_eq!(h_series(3, 6).coeff(4), qi(64));
    assert!(verify_inversion(1) && verify_inversion(3));
}

// ------------------------------------------------------------------ lift

#[test]
fn lift_coefficients_for_e10_over_delta() {
    let f = weakly_holomorphic(-2, &principal(&[(1, 1)]), 40).unwrap();
    let e = lift_unimodular(&f, 2, 6, 6).unwrap();
    assert_eq!(e.regular.coeff(1, 1), qi(32) * f.c(1));
    assert_eq!(e.regular.coeff(1, 2), qi(32) * f.c(2) * qi(8));
    assert_eq!(e.regular.coeff(2, 2), qi(32) * (f.c(4) * qi(64) + f.c(1) * qi(8)));
    assert_eq!(e.singular_terms.len(), 1);
    let t = &e.singular_terms[0];
    assert_eq!((t.d, t.k, t.l, t.coefficient.clone()), (1, 1, 1, qi(-32)));
}

#[test]
fn general_lift_agrees_with_unimodular() {
    let f = weakly_holomorphic(-2, &principal(&[(1, 1)]), 20).unwrap();
    let oracle = |_: &[Q], n: &Q| -> Result<Q, String> {
        let k = singlift::rat::to_i64(n).ok_or("non-integral norm")?;
        Ok(f.c(k))
    };
    let inp = LatticeInput { gram: vec![ints(&[0, 1]), ints(&[1, 0])], witness: ints(&[1, 1]), m: 2, bound: 4, oracle: &oracle };
    let e = lift_unimodular(&f, 2, 5, 5).unwrap();
    let out = lift_general(&inp).unwrap();
    for (rho, c) in &out {
        let (a, b) = (singlift::rat::to_i64(&rho[0]).unwrap(), singlift::rat::to_i64(&rho[1]).unwrap());
        if a == 0 || b == 0 {
            // isotropic vectors are killed by the power of ρ²
            assert_eq!(c, &qi(0));
        } else if a > 0 && b > 0 {
            assert_eq!(c, &e.regular.coeff(a, b));
        }
    }
}

#[test]
fn residue_plug_in() {
    // 3!·2³/2⁷ with sign (-i)^2 i^{-2} = +1 folded into r·(i/π)^{m+b}
    let r = singularity_residue(2, 2, &qi(1), &qi(-2)).unwrap();
    assert_eq!(r.theorem, qr(-3, 8));
    for m in [0, 2, 4, 6] {
        assert!(unimodular_residue_check(m, 1, &qi(1)).unwrap().matches);
    }
}

// ---------------------------------------------------------------- coeffs

#[test]
fn scalar_coefficients() {
    assert_eq!(ext_binom(&qr(-1, 2), 2), qr(3, 8));
    for (m, b) in [(0, 2), (2, 3), (-1, 4)] {
        assert_eq!(raising_table(m, b, 1).unwrap().get(0, 1), qi(2 * m + 2 - b));
    }
    assert_eq!(singular_coeffs(2, 2, &qi(-8), &qi(1)), ints(&[1, 2]));
    let a = singular_coeffs(5, 4, &qr(-7, 3), &qi(2));
    assert!(singular_recurrence_holds(5, 4, &qr(-7, 3), &a));
    let k = qr(5, 2);
    assert_eq!(maass_power_coeffs(&k, 1), vec![qi(1), k.clone()]);
    assert_eq!(maass_power_coeffs(&k, 2), vec![qi(1), qi(2) * (&k + qi(1)), (&k + qi(1)) * &k]);
}

#[test]
fn raised_h0_coefficients_vanish_above_m() {
    for b in [2, 4] {
        for m in 0..=4 {
            let bcoef: BTreeMap<i64, Q> = (0..=m).map(|k| (k, qi(k + 1))).collect();
            let c = c_k0(m, b, (b / 2) as usize, &bcoef);
            assert!(c.keys().all(|k| *k <= m), "b={b} m={m}: {c:?}");
        }
    }
}

// ---------------------------------------------------------------- opcalc

fn z(k: usize) -> Poly {
    Poly::var(var::z(k))
}

#[test]
fn holomorphic_laplacian_of_z1_squared() {
    let sp = Space::new(2).unwrap();
    let f = DiffElement::from_poly(2, z(0).pow(2));
    let r = apply(&sp, &Op::LapH, &f).unwrap();
    assert!(r.sub(&DiffElement::int(2, 2)).is_zero(&sp));
}

#[test]
fn dstar_plus_conjugate_kills_functions_of_y() {
    let sp = Space::new(3).unwrap();
    let f = DiffElement::y2(3, 2).add(&DiffElement::y2(3, -1).scale(&Gq::int(5)));
    let s = apply(&sp, &Op::Sum(vec![(Gq::one(), Op::DStar), (Gq::one(), Op::DStarBar)]), &f).unwrap();
    assert!(s.is_zero(&sp));
}

#[test]
fn slash_examples() {
    let sp = Space::new(2).unwrap();
    // p_ξ: z₁ ↦ z₁ + ξ₁
    let p = GroupElement::p_symbolic(2);
    let f = DiffElement::from_poly(2, z(0));
    let want = DiffElement::from_poly(2, &z(0) + &Poly::var(var::xi(0)));
    assert!(slash(&sp, &p, (3, 1), &f).unwrap().sub(&want).is_zero(&sp));
    // k_{a,id}, weight (m,0), f = 1 gives a^m
    let a = qr(3, 2);
    let k = GroupElement::k_scalar(a.clone(), 2).unwrap();
    let one = DiffElement::int(2, 1);
    for m in [-2i64, 0, 3] {
        let want = DiffElement::constant(2, Gq::real(a.clone()).pow(m));
        assert!(slash(&sp, &k, (m, 0), &one).unwrap().sub(&want).is_zero(&sp));
    }
}

#[test]
fn w_on_z_squared_matches_numerics() {
    let sp = Space::new(2).unwrap();
    let zsq = &z(0).pow(2) - &z(1).pow(2);
    let f = DiffElement::from_poly(2, zsq);
    let s = slash(&sp, &GroupElement::W, (0, 0), &f).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..5 {
        let pt = Point::random(2, &mut rng);
        let sym = s.eval(&sp, &pt);
        let num = slash_numeric(&sp, &GroupElement::W, (0, 0), &f, &pt);
        // (wZ)² = 4/Z²
        let z2 = pt.z(0) * pt.z(0) - pt.z(1) * pt.z(1);
        let direct = Complex64::new(4.0, 0.0) / z2;
        assert!((sym - num).norm() <= 1e-9 * num.norm());
        assert!((sym - direct).norm() <= 1e-9 * direct.norm());
    }
}

#[test]
fn eigen_kernels_by_hand() {
    let k = eigen_kernel(1, 1, &qi(-4), Sign::Minus, 2, None);
    assert_eq!((k.dim, k.support), (1, vec![(1, 1)]));
    let k = eigen_kernel(2, 2, &qi(-16), Sign::Minus, 4, None);
    assert_eq!((k.dim, k.support), (1, vec![(2, 2)]));
}
