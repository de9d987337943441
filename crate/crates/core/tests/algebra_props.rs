use mahler_core::fields::{adjoin_root, Elem, Field};
use mahler_core::linalg::{Mat, Subspace};
use mahler_core::poly::Poly;
use mahler_core::series::{LaurentPoly, RationalFunction};
use proptest::prelude::*;
use proptest::test_runner::Config;

fn gaussian() -> (Field, Elem) {
    let q = Field::rationals();
    adjoin_root(&q, &Poly::from_ints(&q, &[1, 0, 1]), "i", false).unwrap()
}

fn rational(f: &Field, (n, d): (i64, i64)) -> Elem {
    &f.from_int(n) / &f.from_int(d)
}

fn rat_pair() -> impl Strategy<Value = (i64, i64)> {
    (-20i64..=20, 1i64..=9)
}

fn q_elem() -> impl Strategy<Value = Elem> {
    rat_pair().prop_map(|r| rational(&Field::rationals(), r))
}

fn gauss_elem() -> impl Strategy<Value = Elem> {
    (rat_pair(), rat_pair()).prop_map(|(a, b)| {
        let (f, i) = gaussian();
        let q = Field::rationals();
        &f.embed(&rational(&q, a)).unwrap() + &(&f.embed(&rational(&q, b)).unwrap() * &i)
    })
}

fn fp_elem() -> impl Strategy<Value = Elem> {
    (
        prop::collection::vec(0u64..3, 0..4),
        prop::collection::vec(0u64..3, 0..3),
    )
        .prop_map(|(num, mut den)| {
            let f = Field::fp_function(3, "theta").unwrap();
            den.push(1);
            f.fp_frac(num, den).unwrap()
        })
}

fn axioms(a: &Elem, b: &Elem, c: &Elem) -> Result<(), TestCaseError> {
    let f = a.field();
    prop_assert_eq!(a + b, b + a);
    prop_assert_eq!(a * b, b * a);
    prop_assert_eq!(&(a + b) + c, a + &(b + c));
    prop_assert_eq!(&(a * b) * c, a * &(b * c));
    prop_assert_eq!(a * &(b + c), &(a * b) + &(a * c));
    prop_assert_eq!(a + &f.zero(), a.clone());
    prop_assert_eq!(a * &f.one(), a.clone());
    prop_assert!((a + &-a).is_zero());
    prop_assert_eq!(&(a - b) + b, a.clone());
    if a.is_zero() {
        prop_assert!(a.inv().is_err());
    } else {
        prop_assert!((a * &a.inv().unwrap()).is_one());
        prop_assert_eq!(&(b / a) * a, b.clone());
        prop_assert_eq!(a.pow(-2).unwrap(), (a * a).inv().unwrap());
    }
    Ok(())
}

proptest! {
    #![proptest_config(Config { cases: 200, failure_persistence: None, ..Config::default() })]

    #[test]
    fn rationals_form_a_field(a in q_elem(), b in q_elem(), c in q_elem()) {
        axioms(&a, &b, &c)?;
    }

    #[test]
    fn gaussian_rationals_form_a_field(a in gauss_elem(), b in gauss_elem(), c in gauss_elem()) {
        axioms(&a, &b, &c)?;
        let (_, i) = gaussian();
        prop_assert_eq!(&i * &i, -a.field().one());
    }

    #[test]
    fn function_field_forms_a_field(a in fp_elem(), b in fp_elem(), c in fp_elem()) {
        axioms(&a, &b, &c)?;
        let three = a.field().from_int(3);
        prop_assert!(three.is_zero());
        // Frobenius is additive in characteristic 3
        prop_assert_eq!((&a + &b).pow(3).unwrap(), &a.pow(3).unwrap() + &b.pow(3).unwrap());
    }
}

fn q_matrix(n: usize, m: usize) -> impl Strategy<Value = Mat> {
    prop::collection::vec(-3i64..=3, n * m).prop_map(move |v| {
        let f = Field::rationals();
        Mat::from_fn(&f, n, m, |i, j| f.from_int(v[i * m + j]))
    })
}

/// Low-rank columns make intersections nontrivial.
fn q_subspace(n: usize) -> impl Strategy<Value = Subspace> {
    (q_matrix(n, 2), q_matrix(2, 3)).prop_map(move |(a, b)| Subspace::column_space(&a.mul(&b)))
}

proptest! {
    #![proptest_config(Config { cases: 100, failure_persistence: None, ..Config::default() })]

    #[test]
    fn subspace_dimension_formula(u in q_subspace(4), v in q_subspace(4)) {
        let s = u.sum(&v).unwrap();
        let i = u.intersect(&v).unwrap();
        prop_assert_eq!(s.dim() + i.dim(), u.dim() + v.dim());
        prop_assert!(s.contains_space(&u) && s.contains_space(&v));
        prop_assert!(u.contains_space(&i) && v.contains_space(&i));
        let c = Subspace::complement(&i, &u).unwrap();
        prop_assert_eq!(c.dim() + i.dim(), u.dim());
        prop_assert_eq!(c.intersect(&i).unwrap().dim(), 0);
    }

    #[test]
    fn cayley_hamilton(a in q_matrix(4, 4)) {
        let f = Field::rationals();
        let chi = a.charpoly();
        prop_assert_eq!(chi.degree(), Some(4));
        let mut acc: Mat = Mat::zeros(&f, 4, 4);
        let mut pw: Mat = Mat::identity(&f, 4);
        for c in chi.coeffs() {
            acc = acc.add(&pw.scale(c));
            pw = pw.mul(&a);
        }
        prop_assert!(acc.is_zero());
        prop_assert_eq!(chi.coeff(0), if a.rows() % 2 == 0 { a.det() } else { -a.det() });
    }

    #[test]
    fn determinant_and_inverse(a in q_matrix(3, 3), b in q_matrix(3, 3)) {
        let f = Field::rationals();
        prop_assert_eq!(a.mul(&b).det(), &a.det() * &b.det());
        prop_assert_eq!(a.rank() + a.kernel_vectors().len(), 3);
        match a.inverse() {
            Ok(inv) => prop_assert_eq!(a.mul(&inv), Mat::identity(&f, 3)),
            Err(_) => prop_assert!(a.det().is_zero()),
        }
    }
}

fn laurent() -> impl Strategy<Value = LaurentPoly> {
    (-3i64..=1, prop::collection::vec(-4i64..=4, 0..5)).prop_map(|(v, c)| {
        let f = Field::rationals();
        LaurentPoly::from_terms(
            &f,
            c.iter()
                .enumerate()
                .map(|(k, x)| (v + k as i64, f.from_int(*x))),
        )
    })
}

/// A rational function whose denominator does not vanish at 0.
fn rational_fn() -> impl Strategy<Value = RationalFunction> {
    (laurent(), prop::collection::vec(-3i64..=3, 0..3)).prop_map(|(n, d)| {
        let f = Field::rationals();
        let mut den = vec![1];
        den.extend(d);
        n.to_rational()
            .div(&RationalFunction::from_poly(Poly::from_ints(&f, &den)))
            .unwrap()
    })
}

proptest! {
    #![proptest_config(Config { cases: 100, failure_persistence: None, ..Config::default() })]

    #[test]
    fn laurent_ring_laws(a in laurent(), b in laurent(), c in laurent()) {
        prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        prop_assert_eq!(a.substitute_power(3).mul(&b.substitute_power(3)), a.mul(&b).substitute_power(3));
        if let (Some(x), Some(y)) = (a.valuation(), b.valuation()) {
            prop_assert_eq!(a.mul(&b).valuation(), Some(x + y));
        }
    }

    #[test]
    fn expansion_is_a_ring_map(r in rational_fn(), s in rational_fn()) {
        let n = 8;
        let (er, es) = (r.expand(n), s.expand(n));
        let prod = r.mul(&s).expand(n);
        let lhs = er.mul(&es);
        let top = lhs.order_num().min(prod.order_num());
        prop_assert!(lhs.sub(&prod).vanishes_through(top - 1));
        prop_assert!(r.add(&s).expand(n).sub(&er.add(&es)).vanishes_through(n - 1));
        // z ↦ z^2 commutes with expansion
        let sq = r.substitute_power(2).expand(2 * n);
        prop_assert!(sq.sub(&er.substitute_power(2)).vanishes_through(2 * n - 1));
    }
}
