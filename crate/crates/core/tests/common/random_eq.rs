//! Random small equations and the invariants every produced basis must satisfy.

use mahler_core::error::Error;
use mahler_core::fields::Field;
use mahler_core::newton::{build_companion, newton_slopes, ramification_index, MahlerEquation};
use mahler_core::series::{LaurentPoly, RationalFunction};
use mahler_core::solver::{solve_equation, verify_basis};
use mahler_core::window::{check_admissible, window_matrix, window_params};
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;

/// Coefficients `(val, [c_val, c_val+1, …])` of a Laurent polynomial.
fn laurent() -> impl Strategy<Value = (i64, Vec<i64>)> {
    (-2i64..=0, prop::collection::vec(-3i64..=3, 1..=3))
}

pub fn equation() -> impl Strategy<Value = (u64, Vec<(i64, Vec<i64>)>)> {
    (prop::sample::select(vec![2u64, 3]), 1usize..=3)
        .prop_flat_map(|(p, m)| (Just(p), prop::collection::vec(laurent(), m + 1)))
}

fn build(p: u64, shape: &[(i64, Vec<i64>)]) -> Option<MahlerEquation> {
    let f = Field::rationals();
    let coeffs: Vec<RationalFunction> = shape
        .iter()
        .map(|(v, c)| {
            LaurentPoly::from_terms(
                &f,
                c.iter()
                    .enumerate()
                    .map(|(i, x)| (v + i as i64, f.from_int(*x))),
            )
            .to_rational()
        })
        .collect();
    if coeffs[0].is_zero() || coeffs.last().unwrap().is_zero() {
        return None;
    }
    MahlerEquation::new(p, &f, coeffs).ok()
}

/// Solve to order 14 and check the basis, the pair and the window rank.
pub fn check_equation(p: u64, shape: &[(i64, Vec<i64>)]) -> Result<(), TestCaseError> {
    let eq = build(p, shape);
    prop_assume!(eq.is_some());
    let eq = eq.unwrap();
    // residuals lose up to the coefficient valuations, so solve a little past 10
    let res = match solve_equation(&eq, 14) {
        Err(Error::UnsupportedFactorDegree(_)) => {
            prop_assume!(false);
            unreachable!()
        }
        r => r.unwrap_or_else(|e| panic!("{e} for p={p} {shape:?}")),
    };
    let rep = verify_basis(&eq, &res).unwrap();
    prop_assert!(rep.ok(), "{rep:?}");
    prop_assert!(
        rep.verified_order().unwrap() >= num_rational::BigRational::from_integer(10.into())
    );
    prop_assert_eq!(res.solutions.len(), eq.order());

    let d = ramification_index(&newton_slopes(&eq), p);
    let sys = build_companion(&eq.substitute_power(d as usize));
    let pair = mahler_core::window::admissible_pair(&sys).unwrap();
    let rep = check_admissible(&sys, &pair.p, &pair.theta, pair.p.order());
    prop_assert!(rep.ok(), "{rep:?}");
    let params = window_params(&sys).unwrap();
    prop_assert_eq!(window_matrix(&params, &pair.p).rank(), params.m);
    prop_assert!(!pair
        .theta
        .to_rational()
        .det()
        .as_constant()
        .unwrap()
        .is_zero());
    Ok(())
}
