//! Square roots, adjoining roots and root finding.
//!
//! Root finding extracts roots lying in the current field (rational-root
//! theorem over Q, divisor enumeration over F_p(θ)) and then splits the
//! remaining squarefree quadratic factors, extending the field when needed.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;

use num_traits::{One, Signed, Zero};

use super::fp;
use super::{Elem, Field, FieldKind, Rational, Repr};
use crate::error::{Error, Result};
use crate::poly::Poly;

/// Largest search space tolerated by divisor enumeration over F_p(θ).
const FP_DIVISOR_CAP: u64 = 200_000;
/// Trial division bound for factoring integers.
const TRIAL_BOUND: u64 = 1 << 20;

/// Square root in the field: `Ok(None)` when `x` is not a square,
/// an error when the field gives no way to decide.
pub fn sqrt(x: &Elem) -> Result<Option<Elem>> {
    let field = x.field().clone();
    if x.is_zero() {
        return Ok(Some(x.clone()));
    }
    match (&*field.0, &x.repr) {
        (FieldKind::Rationals, Repr::Q(q)) => {
            if q.is_negative() {
                return Ok(None);
            }
            let (n, d) = (q.numer(), q.denom());
            let (rn, rd) = (n.sqrt(), d.sqrt());
            if &(&rn * &rn) == n && &(&rd * &rd) == d {
                Ok(Some(field.from_rational(&Rational::new(rn, rd))?))
            } else {
                Ok(None)
            }
        }
        (FieldKind::FpFunction { p, .. }, Repr::Fp(f)) => {
            if *p == 2 {
                return Err(Error::Characteristic(2, String::from("square roots")));
            }
            let nd = fp::mul(&f.num, &f.den, *p);
            match fp::sqrt(&nd, *p) {
                Some(r) => Ok(Some(field.fp_frac(r, f.den.clone())?)),
                None => Ok(None),
            }
        }
        (FieldKind::Extension { base, minpoly, .. }, Repr::Ext(c)) => {
            if minpoly.len() != 3 {
                return Err(Error::UnsupportedFactorDegree(minpoly.len() - 1));
            }
            if field.characteristic() == 2 {
                return Err(Error::Characteristic(2, String::from("square roots")));
            }
            // w = 2g + c1 satisfies w² = D; write x = a + b·w.
            let two = base.from_int(2);
            let (c0, c1) = (&minpoly[0], &minpoly[1]);
            let disc = &(c1 * c1) - &(&base.from_int(4) * c0);
            let b = &c[1] / &two;
            let a = &c[0] - &(&b * c1);
            let from_uv = |u: &Elem, v: &Elem| -> Result<Elem> {
                field.from_coords(vec![u + &(v * c1), &two * v])
            };
            let candidates: Vec<(Elem, Elem)> = if b.is_zero() {
                let mut out = Vec::new();
                if let Some(u) = sqrt(&a)? {
                    out.push((u, base.zero()));
                }
                if let Some(v) = sqrt(&(&a / &disc))? {
                    out.push((base.zero(), v));
                }
                out
            } else {
                let Some(n) = sqrt(&(&(&a * &a) - &(&disc * &(&b * &b))))? else {
                    return Ok(None);
                };
                let mut out = Vec::new();
                for s in [n.clone(), n.neg()] {
                    if let Some(u) = sqrt(&(&(&a + &s) / &two))? {
                        if !u.is_zero() {
                            let v = &b / &(&two * &u);
                            out.push((u, v));
                        }
                    }
                }
                out
            };
            for (u, v) in candidates {
                let y = from_uv(&u, &v)?;
                if &y * &y == *x {
                    return Ok(Some(y));
                }
            }
            Ok(None)
        }
        _ => Err(Error::FieldMismatch),
    }
}

/// Adjoin a root of `minpoly`. Degree 1 returns the base field and the root.
/// Irreducibility is verified for degree 2 and must be asserted above that.
pub fn adjoin_root(
    field: &Field,
    minpoly: &Poly,
    name: &str,
    assume_irreducible: bool,
) -> Result<(Field, Elem)> {
    if minpoly.field() != field {
        return Err(Error::FieldMismatch);
    }
    let m = minpoly.monic();
    match m.degree() {
        None | Some(0) => Err(Error::Malformed(String::from(
            "minimal polynomial of degree < 1",
        ))),
        Some(1) => Ok((field.clone(), m.coeff(0).neg())),
        Some(d) => {
            if d == 2 {
                if field.characteristic() == 2 {
                    if !assume_irreducible {
                        return Err(Error::UnverifiedIrreducibility(2));
                    }
                } else {
                    let disc = &(&m.coeff(1) * &m.coeff(1)) - &(&field.from_int(4) * &m.coeff(0));
                    match sqrt(&disc) {
                        Ok(Some(_)) => return Err(Error::Reducible),
                        Ok(None) => {}
                        Err(e) if !assume_irreducible => return Err(e),
                        Err(_) => {}
                    }
                }
            } else if !assume_irreducible {
                return Err(Error::UnverifiedIrreducibility(d));
            }
            let ext = Field::extension_unchecked(field, &m, name);
            let g = ext.generator().unwrap();
            Ok((ext, g))
        }
    }
}

/// Roots found with multiplicities, in `field`, and the unsplit remainder
/// (`poly = Π (x − r)^m · rest` once embedded in `field`).
#[derive(Clone, Debug)]
pub struct Roots {
    pub field: Field,
    pub roots: Vec<(Elem, usize)>,
    pub rest: Poly,
}

/// All roots of `poly`, extending the field for quadratic factors.
pub fn find_roots(poly: &Poly) -> Result<Roots> {
    find_roots_with_hints(poly, &[])
}

/// Like [`find_roots`], additionally trying caller-supplied candidate roots
/// (e.g. the generator of an extension adjoined by the caller).
pub fn find_roots_with_hints(poly: &Poly, hints: &[Elem]) -> Result<Roots> {
    let r = find_roots_partial(poly, hints)?;
    match r.rest.degree() {
        Some(d) if d >= 1 => Err(Error::UnsupportedFactorDegree(d)),
        _ => Ok(r),
    }
}

/// Root extraction that leaves irreducible factors of degree ≥ 3 in `rest`.
pub fn find_roots_partial(poly: &Poly, hints: &[Elem]) -> Result<Roots> {
    if poly.is_zero() {
        return Err(Error::Malformed(String::from(
            "zero polynomial has no finite root set",
        )));
    }
    let mut field = poly.field().clone();
    let mut rest = poly.clone();
    let mut roots: Vec<(Elem, usize)> = Vec::new();
    let mut cands = roots_in_field(&rest)?;
    for h in hints {
        if let Ok(e) = field.embed(h) {
            cands.push(e);
        }
    }
    cands.sort();
    cands.dedup();
    for r in cands {
        let lin = Poly::new(&field, vec![r.neg(), field.one()]);
        let mut mult = 0;
        loop {
            let (q, rem) = rest.divrem(&lin)?;
            if !rem.is_zero() {
                break;
            }
            rest = q;
            mult += 1;
        }
        if mult > 0 {
            roots.push((r, mult));
        }
    }
    if rest.degree().unwrap_or(0) == 0 {
        return Ok(Roots { field, roots, rest });
    }
    let lead = rest.lead().unwrap().clone();
    let factors = if field.characteristic() == 0 {
        squarefree(&rest.monic())
    } else {
        vec![(rest.monic(), 1)]
    };
    let mut leftover = Poly::constant(lead);
    for (g, k) in factors {
        let g = g.embed(&field)?;
        match g.degree() {
            Some(2) => {
                if field.characteristic() == 2 {
                    return Err(Error::Characteristic(2, String::from("quadratic factors")));
                }
                let (b, c) = (g.coeff(1), g.coeff(0));
                let disc = &(&b * &b) - &(&field.from_int(4) * &c);
                let (r1, r2) = match sqrt(&disc)? {
                    Some(s) => {
                        let two = field.from_int(2);
                        (&(&b.neg() + &s) / &two, &(&b.neg() - &s) / &two)
                    }
                    None => {
                        let name = extension_name(&field, &g);
                        let (ext, w) = adjoin_root(&field, &g, &name, true)?;
                        roots = roots
                            .into_iter()
                            .map(|(r, m)| Ok((ext.embed(&r)?, m)))
                            .collect::<Result<_>>()?;
                        leftover = leftover.embed(&ext)?;
                        let b = ext.embed(&b)?;
                        field = ext;
                        (w.clone(), &b.neg() - &w)
                    }
                };
                roots.push((r1, k));
                roots.push((r2, k));
            }
            _ => leftover = leftover.mul(&g.pow(k as u32)),
        }
    }
    let rest = leftover.embed(&field)?;
    Ok(Roots { field, roots, rest })
}

fn extension_name(field: &Field, g: &Poly) -> String {
    if field.characteristic() == 0 && g == &Poly::from_ints(field, &[1, 0, 1]) && field.depth() == 0
    {
        String::from("i")
    } else {
        format!("r{}", field.depth() + 1)
    }
}

/// Yun's squarefree decomposition of a monic polynomial (characteristic 0).
fn squarefree(f: &Poly) -> Vec<(Poly, usize)> {
    let mut out = Vec::new();
    let df = f.derivative();
    let a = f.gcd(&df);
    let mut b = f.exact_div(&a).unwrap();
    let c = df.exact_div(&a).unwrap();
    let mut d = c.sub(&b.derivative());
    let mut i = 1;
    while b.degree().unwrap_or(0) > 0 {
        let a = b.gcd(&d);
        if a.degree().unwrap_or(0) > 0 {
            out.push((a.clone(), i));
        }
        b = b.exact_div(&a).unwrap();
        let c = d.exact_div(&a).unwrap();
        d = c.sub(&b.derivative());
        i += 1;
    }
    out
}

/// Candidate roots lying in the coefficient field itself.
fn roots_in_field(poly: &Poly) -> Result<Vec<Elem>> {
    let field = poly.field().clone();
    let mut out = Vec::new();
    let v = poly.valuation().unwrap_or(0);
    if v > 0 {
        out.push(field.zero());
    }
    let core = poly.unshift(v);
    if core.degree().unwrap_or(0) == 0 {
        return Ok(out);
    }
    match &*field.0 {
        FieldKind::Rationals => {
            let lcm = core.coeffs().iter().fold(BigInt::one(), |l, c| {
                l.lcm(c.as_rational().unwrap().denom())
            });
            let ints: Vec<BigInt> = core
                .coeffs()
                .iter()
                .map(|c| {
                    (c.as_rational().unwrap() * Rational::from_integer(lcm.clone())).to_integer()
                })
                .collect();
            let num_divs = divisors(&ints[0].abs())?;
            let den_divs = divisors(&ints[ints.len() - 1].abs())?;
            for u in &num_divs {
                for w in &den_divs {
                    for s in [1i32, -1] {
                        let q =
                            Rational::new(if s > 0 { u.clone() } else { -u.clone() }, w.clone());
                        if int_poly_root(&ints, &q) {
                            out.push(field.from_rational(&q)?);
                        }
                    }
                }
            }
        }
        FieldKind::Extension { base, .. } => {
            let in_base: Option<Vec<Elem>> = core.coeffs().iter().map(Elem::in_base).collect();
            if let Some(cs) = in_base {
                for r in roots_in_field(&Poly::new(base, cs))? {
                    out.push(field.embed(&r)?);
                }
            }
        }
        FieldKind::FpFunction { p, .. } => {
            let p = *p;
            let mut lcm: Vec<u64> = vec![1];
            for c in core.coeffs() {
                let (_, d) = c.fp_parts().unwrap();
                let g = fp::gcd(&lcm, d, p);
                lcm = fp::divrem(&fp::mul(&lcm, d, p), &g, p).0;
            }
            let ints: Vec<Vec<u64>> = core
                .coeffs()
                .iter()
                .map(|c| {
                    let (n, d) = c.fp_parts().unwrap();
                    fp::mul(n, &fp::divrem(&lcm, d, p).0, p)
                })
                .collect();
            let tail = fp::monic_divisors(&ints[0], p, FP_DIVISOR_CAP);
            let head = fp::monic_divisors(&ints[ints.len() - 1], p, FP_DIVISOR_CAP);
            let (Some(tail), Some(head)) = (tail, head) else {
                return Err(Error::Characteristic(
                    p,
                    String::from("root search space too large"),
                ));
            };
            if (tail.len() as u64) * (head.len() as u64) * (p - 1) > FP_DIVISOR_CAP {
                return Err(Error::Characteristic(
                    p,
                    String::from("root search space too large"),
                ));
            }
            for a in &tail {
                for b in &head {
                    for u in 1..p {
                        let cand = field.fp_frac(fp::scale(a, u, p), b.clone())?;
                        if core.eval(&cand).is_zero() {
                            out.push(cand);
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

fn int_poly_root(c: &[BigInt], q: &Rational) -> bool {
    // Evaluate the homogenised polynomial Σ c_k u^k w^{n-k} at q = u/w.
    let (u, w) = (q.numer(), q.denom());
    let n = c.len() - 1;
    let mut acc = BigInt::zero();
    let mut wpow = BigInt::one();
    let mut terms = vec![BigInt::zero(); n + 1];
    for k in (0..=n).rev() {
        terms[k] = wpow.clone();
        wpow *= w;
    }
    let mut upow = BigInt::one();
    for k in 0..=n {
        acc += &c[k] * &upow * &terms[k];
        upow *= u;
    }
    acc.is_zero()
}

/// Positive divisors of a nonzero integer by trial division.
fn divisors(n: &BigInt) -> Result<Vec<BigInt>> {
    let mut m = n.clone();
    let mut primes: Vec<(BigInt, u32)> = Vec::new();
    let mut d = 2u64;
    while d <= TRIAL_BOUND && BigInt::from(d) * BigInt::from(d) <= m {
        let bd = BigInt::from(d);
        let mut e = 0;
        while (&m % &bd).is_zero() {
            m /= &bd;
            e += 1;
        }
        if e > 0 {
            primes.push((bd, e));
        }
        d += 1;
    }
    if m > BigInt::one() {
        let bound = BigInt::from(TRIAL_BOUND) * BigInt::from(TRIAL_BOUND);
        if m.sign() == Sign::Plus && m >= bound {
            return Err(Error::Malformed(format!(
                "cannot factor {n} for rational root search"
            )));
        }
        primes.push((m, 1));
    }
    let mut out = vec![BigInt::one()];
    for (pr, e) in primes {
        let mut next = Vec::new();
        for x in &out {
            let mut pw = BigInt::one();
            for _ in 0..=e {
                next.push(x * &pw);
                pw *= &pr;
            }
        }
        out = next;
    }
    out.sort();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::rat;

    fn q() -> Field {
        Field::rationals()
    }

    #[test]
    fn rational_roots_of_split_quadratic() {
        let f = q();
        // (x − 1)(x + 1/2) = x² − x/2 − 1/2
        let p = Poly::new(
            &f,
            vec![
                f.from_rational(&rat(-1, 2)).unwrap(),
                f.from_rational(&rat(-1, 2)).unwrap(),
                f.one(),
            ],
        );
        let r = find_roots(&p).unwrap();
        assert_eq!(r.field, f);
        let mut roots: Vec<_> = r.roots.iter().map(|(x, m)| (x.clone(), *m)).collect();
        roots.sort();
        assert_eq!(
            roots,
            vec![(f.from_rational(&rat(-1, 2)).unwrap(), 1), (f.one(), 1)]
        );
    }

    #[test]
    fn gaussian_roots() {
        let f = q();
        let r = find_roots(&Poly::from_ints(&f, &[1, 0, 1])).unwrap();
        assert_eq!(r.field.degree(), 2);
        for (x, m) in &r.roots {
            assert_eq!(*m, 1);
            assert!((&(x * x) + &r.field.one()).is_zero());
        }
        assert_ne!(r.roots[0].0, r.roots[1].0);
    }

    #[test]
    fn cubic_is_unsupported() {
        let f = q();
        assert_eq!(
            find_roots(&Poly::from_ints(&f, &[-2, 0, 0, 1])).unwrap_err(),
            Error::UnsupportedFactorDegree(3)
        );
    }

    #[test]
    fn adjoin_cases() {
        let f = q();
        let (k, r) = adjoin_root(&f, &Poly::from_ints(&f, &[-3, 1]), "g", false).unwrap();
        assert_eq!(k, f);
        assert_eq!(r, f.from_int(3));
        assert_eq!(
            adjoin_root(&f, &Poly::from_ints(&f, &[-1, 0, 1]), "g", false).unwrap_err(),
            Error::Reducible
        );
        assert_eq!(
            adjoin_root(&f, &Poly::from_ints(&f, &[-2, 0, 0, 1]), "g", false).unwrap_err(),
            Error::UnverifiedIrreducibility(3)
        );
        let (k, g) = adjoin_root(&f, &Poly::from_ints(&f, &[-2, 0, 0, 1]), "g", true).unwrap();
        assert_eq!(&(&g * &g) * &g, k.from_int(2));
    }

    #[test]
    fn repeated_quadratic_factor() {
        let f = q();
        let p = Poly::from_ints(&f, &[1, 0, 1])
            .pow(2)
            .mul(&Poly::from_ints(&f, &[-3, 1]));
        let r = find_roots(&p).unwrap();
        let mut total = 0;
        for (x, m) in &r.roots {
            total += m;
            assert!(p.embed(&r.field).unwrap().eval(x).is_zero());
        }
        assert_eq!(total, 5);
    }

    #[test]
    fn sqrt_in_quadratic_extension() {
        let f = q();
        let (k, i) = adjoin_root(&f, &Poly::from_ints(&f, &[1, 0, 1]), "i", false).unwrap();
        let x = k.from_int(-4);
        let s = sqrt(&x).unwrap().unwrap();
        assert_eq!(&s * &s, x);
        let y = &(&i + &k.from_int(3)) * &(&i + &k.from_int(3));
        let s = sqrt(&y).unwrap().unwrap();
        assert_eq!(&s * &s, y);
        assert!(sqrt(&i).unwrap().is_none());
    }

    #[test]
    fn function_field_roots() {
        let f = Field::fp_function(3, "theta").unwrap();
        let t = f.generator().unwrap();
        // (x − 1)(x − θ)
        let p = Poly::new(&f, vec![t.clone(), (&t + &f.one()).neg(), f.one()]);
        let r = find_roots(&p).unwrap();
        let mut roots: Vec<_> = r.roots.iter().map(|(x, _)| x.clone()).collect();
        roots.sort();
        let mut want = vec![f.one(), t];
        want.sort();
        assert_eq!(roots, want);
    }
}
