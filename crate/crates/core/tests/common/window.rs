//! The defining identity of the window matrices, checked by direct expansion.

use mahler_core::fields::Field;
use mahler_core::linalg::Mat;
use mahler_core::newton::{build_companion, MahlerEquation, MahlerSystem};
use mahler_core::poly::Poly;
use mahler_core::series::{LaurentPoly, RationalFunction};
use mahler_core::window::{build_ml, window_params, window_vector, WindowParams};
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;

fn rf(f: &Field, c: &[i64]) -> RationalFunction {
    RationalFunction::from_poly(Poly::from_ints(f, c))
}

pub fn rudin_shapiro() -> MahlerSystem {
    let f = Field::rationals();
    build_companion(
        &MahlerEquation::new(
            2,
            &f,
            vec![rf(&f, &[1]), rf(&f, &[-1, 1]), rf(&f, &[0, -2])],
        )
        .unwrap(),
    )
}

/// A system with a denominator and `p = 3`.
pub fn rational_system() -> MahlerSystem {
    let f = Field::rationals();
    let a0 =
        RationalFunction::from_parts(Poly::from_ints(&f, &[2, 1]), Poly::from_ints(&f, &[1, -1]))
            .unwrap();
    let a1 = RationalFunction::from_parts(Poly::from_ints(&f, &[0, 0, 1]), Poly::one(&f))
        .unwrap()
        .mul(&RationalFunction::z_pow(&f, -3));
    build_companion(&MahlerEquation::new(3, &f, vec![a0, a1, rf(&f, &[-1, 0, 3])]).unwrap())
}

/// `π(z^l A⁻¹ f(z^p))` by expanding the rational functions directly.
fn image(
    sys: &MahlerSystem,
    w: &WindowParams,
    l: i64,
    fv: &[LaurentPoly],
) -> Vec<mahler_core::fields::Elem> {
    let f = sys.field();
    let ainv = sys.inverse();
    let zl = RationalFunction::z_pow(f, l);
    let fp: Vec<RationalFunction> = fv
        .iter()
        .map(|x| x.substitute_power(sys.p() as i64).to_rational())
        .collect();
    let comps: Vec<LaurentPoly> = (0..sys.dim())
        .map(|i| {
            let mut r = RationalFunction::zero(f);
            for (j, fj) in fp.iter().enumerate() {
                r = r.add(&ainv[(i, j)].mul(fj));
            }
            let t = r.mul(&zl).expand(w.mu + 1);
            LaurentPoly::from_terms(f, (w.nu..=w.mu).map(|k| (k, t.coeff_num(k))))
        })
        .collect();
    window_vector(w, &comps)
}

pub fn check(sys: &MahlerSystem, coeffs: &[Vec<i64>]) -> Result<(), TestCaseError> {
    let f = sys.field();
    let w = window_params(sys).unwrap();
    let fv: Vec<LaurentPoly> = coeffs
        .iter()
        .map(|c| {
            LaurentPoly::from_terms(
                f,
                c.iter()
                    .enumerate()
                    .map(|(k, x)| (w.nu_p + k as i64, f.from_int(*x))),
            )
        })
        .collect();
    prop_assert!(fv.iter().all(|x| x.degree().unwrap_or(w.nu_p) <= w.mu));
    let pi = window_vector(&w, &fv);
    for l in w.support() {
        let ml: Mat = build_ml(sys, &w, l).unwrap();
        prop_assert_eq!(ml.mul_vec(&pi), image(sys, &w, l, &fv), "l = {}", l);
    }
    Ok(())
}

pub fn vectors(m: usize, len: usize) -> impl Strategy<Value = Vec<Vec<i64>>> {
    prop::collection::vec(prop::collection::vec(-5i64..=5, len), m)
}
