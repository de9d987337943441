//! Effective fields: the rationals, simple algebraic extensions (towers
//! allowed) and rational function fields F_p(θ) over a prime field.
//!
//! Elements carry their field, so arithmetic checks that both operands
//! live in the same field. Base-field elements can be moved into an
//! extension with [`Field::embed`].

mod fp;
mod roots;

pub use fp::FpFrac;
pub use roots::{adjoin_root, find_roots, find_roots_partial, find_roots_with_hints, sqrt, Roots};

use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use core::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::poly::Poly;

pub use num_rational::BigRational as Rational;

/// Shared, immutable field descriptor.
#[derive(Clone)]
pub struct Field(Arc<FieldKind>);

#[derive(Debug, PartialEq, Eq)]
pub enum FieldKind {
    Rationals,
    /// `base[g] / (minpoly(g))`; `minpoly` is monic, low to high.
    Extension {
        base: Field,
        minpoly: Vec<Elem>,
        name: String,
    },
    FpFunction {
        p: u64,
        var: String,
    },
}

impl PartialEq for Field {
    fn eq(&self, other: &Field) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || *self.0 == *other.0
    }
}
impl Eq for Field {}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &*self.0 {
            FieldKind::Rationals => write!(f, "Q"),
            FieldKind::Extension { base, name, .. } => write!(f, "{base}({name})"),
            FieldKind::FpFunction { p, var } => write!(f, "F_{p}({var})"),
        }
    }
}

impl Field {
    pub fn rationals() -> Field {
        Field(Arc::new(FieldKind::Rationals))
    }

    pub fn fp_function(p: u64, var: &str) -> Result<Field> {
        if !fp::is_prime(p) || p >= 1 << 32 {
            return Err(Error::InvalidField(alloc::format!(
                "characteristic {p} is not a supported prime"
            )));
        }
        Ok(Field(Arc::new(FieldKind::FpFunction {
            p,
            var: var.to_string(),
        })))
    }

    /// Extension without any irreducibility check; see [`adjoin_root`].
    pub(crate) fn extension_unchecked(base: &Field, minpoly: &Poly, name: &str) -> Field {
        Field(Arc::new(FieldKind::Extension {
            base: base.clone(),
            minpoly: minpoly.coeffs().to_vec(),
            name: name.to_string(),
        }))
    }

    pub fn kind(&self) -> &FieldKind {
        &self.0
    }

    pub fn characteristic(&self) -> u64 {
        match &*self.0 {
            FieldKind::Rationals => 0,
            FieldKind::Extension { base, .. } => base.characteristic(),
            FieldKind::FpFunction { p, .. } => *p,
        }
    }

    /// Degree over the immediate base (1 for the prime-level fields).
    pub fn degree(&self) -> usize {
        match &*self.0 {
            FieldKind::Extension { minpoly, .. } => minpoly.len() - 1,
            _ => 1,
        }
    }

    pub fn base(&self) -> Option<&Field> {
        match &*self.0 {
            FieldKind::Extension { base, .. } => Some(base),
            _ => None,
        }
    }

    /// Tower depth: 0 for Q and F_p(θ).
    pub fn depth(&self) -> usize {
        self.base().map_or(0, |b| 1 + b.depth())
    }

    pub fn generator_name(&self) -> Option<&str> {
        match &*self.0 {
            FieldKind::Extension { name, .. } => Some(name),
            FieldKind::FpFunction { var, .. } => Some(var),
            FieldKind::Rationals => None,
        }
    }

    pub fn minpoly(&self) -> Option<Poly> {
        match &*self.0 {
            FieldKind::Extension { base, minpoly, .. } => Some(Poly::new(base, minpoly.clone())),
            _ => None,
        }
    }

    pub fn zero(&self) -> Elem {
        let repr = match &*self.0 {
            FieldKind::Rationals => Repr::Q(Rational::zero()),
            FieldKind::Extension { base, minpoly, .. } => {
                Repr::Ext(vec![base.zero(); minpoly.len() - 1])
            }
            FieldKind::FpFunction { p, .. } => Repr::Fp(FpFrac::constant(0, *p)),
        };
        Elem {
            field: self.clone(),
            repr,
        }
    }

    pub fn one(&self) -> Elem {
        self.from_int(1)
    }

    pub fn from_int(&self, n: i64) -> Elem {
        self.from_bigint(&BigInt::from(n))
    }

    pub fn from_bigint(&self, n: &BigInt) -> Elem {
        let repr = match &*self.0 {
            FieldKind::Rationals => Repr::Q(Rational::from_integer(n.clone())),
            FieldKind::Extension { base, minpoly, .. } => {
                let mut c = vec![base.zero(); minpoly.len() - 1];
                c[0] = base.from_bigint(n);
                Repr::Ext(c)
            }
            FieldKind::FpFunction { p, .. } => {
                let r = n.mod_floor(&BigInt::from(*p)).to_u64().unwrap();
                Repr::Fp(FpFrac::constant(r, *p))
            }
        };
        Elem {
            field: self.clone(),
            repr,
        }
    }

    /// The image of a rational number; fails in characteristic p when the
    /// denominator vanishes.
    pub fn from_rational(&self, q: &Rational) -> Result<Elem> {
        let n = self.from_bigint(q.numer());
        let d = self.from_bigint(q.denom());
        n.checked_div(&d)
    }

    /// The extension generator or the indeterminate θ.
    pub fn generator(&self) -> Option<Elem> {
        match &*self.0 {
            FieldKind::Rationals => None,
            FieldKind::Extension { base, minpoly, .. } => {
                let n = minpoly.len() - 1;
                let mut c = vec![base.zero(); n];
                if n == 1 {
                    c[0] = -&minpoly[0];
                } else {
                    c[1] = base.one();
                }
                Some(Elem {
                    field: self.clone(),
                    repr: Repr::Ext(c),
                })
            }
            FieldKind::FpFunction { .. } => Some(Elem {
                field: self.clone(),
                repr: Repr::Fp(FpFrac {
                    num: vec![0, 1],
                    den: vec![1],
                }),
            }),
        }
    }

    /// Element of F_p(θ) from coefficient vectors (low to high).
    pub fn fp_frac(&self, num: Vec<u64>, den: Vec<u64>) -> Result<Elem> {
        match &*self.0 {
            FieldKind::FpFunction { p, .. } => {
                let norm = |v: Vec<u64>| {
                    let mut v: Vec<u64> = v.into_iter().map(|c| c % p).collect();
                    fp::trim(&mut v);
                    v
                };
                let f = FpFrac::new(norm(num), norm(den), *p).ok_or(Error::DivisionByZero)?;
                Ok(Elem {
                    field: self.clone(),
                    repr: Repr::Fp(f),
                })
            }
            _ => Err(Error::FieldMismatch),
        }
    }

    /// Extension element from coordinates in the immediate base.
    pub fn from_coords(&self, coords: Vec<Elem>) -> Result<Elem> {
        match &*self.0 {
            FieldKind::Extension { base, minpoly, .. } => {
                if coords.iter().any(|c| c.field != *base) {
                    return Err(Error::FieldMismatch);
                }
                let poly = Poly::new(base, coords);
                let red = poly.rem(&Poly::new(base, minpoly.clone()))?;
                Ok(Elem {
                    field: self.clone(),
                    repr: Repr::Ext(pad(red.coeffs().to_vec(), base, minpoly.len() - 1)),
                })
            }
            _ => Err(Error::FieldMismatch),
        }
    }

    /// Does `self` contain `other` as a (possibly equal) subfield of its tower?
    pub fn contains_field(&self, other: &Field) -> bool {
        self == other || self.base().is_some_and(|b| b.contains_field(other))
    }

    /// Move an element of a subfield of the tower into `self`.
    pub fn embed(&self, e: &Elem) -> Result<Elem> {
        if e.field == *self {
            return Ok(e.clone());
        }
        match &*self.0 {
            FieldKind::Extension { base, minpoly, .. } => {
                let inner = base.embed(e)?;
                let mut c = vec![base.zero(); minpoly.len() - 1];
                c[0] = inner;
                Ok(Elem {
                    field: self.clone(),
                    repr: Repr::Ext(c),
                })
            }
            _ => Err(Error::FieldMismatch),
        }
    }

    /// Smallest field of the two towers containing both, if one contains the other.
    pub fn join(&self, other: &Field) -> Result<Field> {
        if self.contains_field(other) {
            Ok(self.clone())
        } else if other.contains_field(self) {
            Ok(other.clone())
        } else {
            Err(Error::FieldMismatch)
        }
    }
}

fn pad(mut v: Vec<Elem>, base: &Field, n: usize) -> Vec<Elem> {
    v.resize(n, base.zero());
    v
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Repr {
    Q(Rational),
    Ext(Vec<Elem>),
    Fp(FpFrac),
}

/// An element of a [`Field`], always in canonical form.
///
/// Equality and ordering compare canonical representations and are only
/// meaningful between elements of the same field.
#[derive(Clone)]
pub struct Elem {
    field: Field,
    repr: Repr,
}

impl PartialEq for Elem {
    fn eq(&self, other: &Elem) -> bool {
        self.repr == other.repr
    }
}
impl Eq for Elem {}
impl PartialOrd for Elem {
    fn partial_cmp(&self, other: &Elem) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Elem {
    fn cmp(&self, other: &Elem) -> Ordering {
        self.repr.cmp(&other.repr)
    }
}

impl fmt::Debug for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Elem {
    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn is_zero(&self) -> bool {
        match &self.repr {
            Repr::Q(q) => q.is_zero(),
            Repr::Ext(c) => c.iter().all(Elem::is_zero),
            Repr::Fp(f) => f.is_zero(),
        }
    }

    pub fn is_one(&self) -> bool {
        *self == self.field.one()
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        match &self.repr {
            Repr::Q(q) => Some(q),
            _ => None,
        }
    }

    /// Coordinates over the immediate base of an extension.
    pub fn coords(&self) -> Option<&[Elem]> {
        match &self.repr {
            Repr::Ext(c) => Some(c),
            _ => None,
        }
    }

    /// Numerator and denominator coefficient vectors in F_p(θ).
    pub fn fp_parts(&self) -> Option<(&[u64], &[u64])> {
        match &self.repr {
            Repr::Fp(f) => Some((&f.num, &f.den)),
            _ => None,
        }
    }

    /// If this extension element lies in the immediate base, return it there.
    pub fn in_base(&self) -> Option<Elem> {
        match &self.repr {
            Repr::Ext(c) if c[1..].iter().all(Elem::is_zero) => Some(c[0].clone()),
            _ => None,
        }
    }

    /// Lowest field of the tower that contains this element.
    pub fn descend(&self) -> Elem {
        match self.in_base() {
            Some(b) => b.descend(),
            None => self.clone(),
        }
    }

    fn same(&self, o: &Elem) -> Result<()> {
        if self.field == o.field {
            Ok(())
        } else {
            Err(Error::FieldMismatch)
        }
    }

    pub fn checked_add(&self, o: &Elem) -> Result<Elem> {
        self.same(o)?;
        let repr = match (&self.repr, &o.repr) {
            (Repr::Q(a), Repr::Q(b)) => Repr::Q(a + b),
            (Repr::Ext(a), Repr::Ext(b)) => {
                Repr::Ext(a.iter().zip(b).map(|(x, y)| x + y).collect())
            }
            (Repr::Fp(a), Repr::Fp(b)) => Repr::Fp(a.add(b, self.field.characteristic())),
            _ => return Err(Error::FieldMismatch),
        };
        Ok(Elem {
            field: self.field.clone(),
            repr,
        })
    }

    pub fn checked_sub(&self, o: &Elem) -> Result<Elem> {
        self.checked_add(&o.neg())
    }

    pub fn neg(&self) -> Elem {
        let repr = match &self.repr {
            Repr::Q(a) => Repr::Q(-a),
            Repr::Ext(a) => Repr::Ext(a.iter().map(Elem::neg).collect()),
            Repr::Fp(a) => Repr::Fp(a.neg(self.field.characteristic())),
        };
        Elem {
            field: self.field.clone(),
            repr,
        }
    }

    pub fn checked_mul(&self, o: &Elem) -> Result<Elem> {
        self.same(o)?;
        let repr = match (&self.repr, &o.repr) {
            (Repr::Q(a), Repr::Q(b)) => Repr::Q(a * b),
            (Repr::Ext(a), Repr::Ext(b)) => {
                let FieldKind::Extension { base, minpoly, .. } = &*self.field.0 else {
                    unreachable!()
                };
                let n = minpoly.len() - 1;
                let mut prod = vec![base.zero(); 2 * n - 1];
                for (i, x) in a.iter().enumerate() {
                    if x.is_zero() {
                        continue;
                    }
                    for (j, y) in b.iter().enumerate() {
                        prod[i + j] = &prod[i + j] + &(x * y);
                    }
                }
                for k in (n..prod.len()).rev() {
                    let c = prod[k].clone();
                    if c.is_zero() {
                        continue;
                    }
                    for (j, mc) in minpoly.iter().enumerate().take(n) {
                        prod[k - n + j] = &prod[k - n + j] - &(&c * mc);
                    }
                }
                prod.truncate(n);
                Repr::Ext(prod)
            }
            (Repr::Fp(a), Repr::Fp(b)) => Repr::Fp(a.mul(b, self.field.characteristic())),
            _ => return Err(Error::FieldMismatch),
        };
        Ok(Elem {
            field: self.field.clone(),
            repr,
        })
    }

    pub fn inv(&self) -> Result<Elem> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let repr = match &self.repr {
            Repr::Q(a) => Repr::Q(a.recip()),
            Repr::Ext(a) => {
                let FieldKind::Extension { base, minpoly, .. } = &*self.field.0 else {
                    unreachable!()
                };
                let m = Poly::new(base, minpoly.clone());
                let x = Poly::new(base, a.clone());
                let (g, s, _) = x.ext_gcd(&m)?;
                if g.degree() != Some(0) {
                    return Err(Error::Reducible);
                }
                let s = s.scale(&g.coeff(0).inv()?).rem(&m)?;
                Repr::Ext(pad(s.coeffs().to_vec(), base, minpoly.len() - 1))
            }
            Repr::Fp(a) => Repr::Fp(
                a.inv(self.field.characteristic())
                    .ok_or(Error::DivisionByZero)?,
            ),
        };
        Ok(Elem {
            field: self.field.clone(),
            repr,
        })
    }

    pub fn checked_div(&self, o: &Elem) -> Result<Elem> {
        self.checked_mul(&o.inv()?)
    }

    /// Integer power; negative exponents invert.
    pub fn pow(&self, e: i64) -> Result<Elem> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut k = e.unsigned_abs();
        let mut acc = self.field.one();
        let mut sq = base;
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &sq;
            }
            sq = &sq * &sq;
            k >>= 1;
        }
        Ok(acc)
    }

    /// Does the element have an obviously negative sign (for display)?
    pub fn looks_negative(&self) -> bool {
        match &self.repr {
            Repr::Q(q) => q.is_negative(),
            Repr::Ext(c) => c
                .iter()
                .rev()
                .find(|x| !x.is_zero())
                .is_some_and(Elem::looks_negative),
            Repr::Fp(_) => false,
        }
    }

    /// Whether the display form is a single atom needing no parentheses.
    pub fn is_atomic(&self) -> bool {
        match &self.repr {
            Repr::Q(q) => q.is_integer() && !q.is_negative(),
            Repr::Ext(c) => {
                let nz: Vec<_> = c.iter().enumerate().filter(|(_, x)| !x.is_zero()).collect();
                nz.len() <= 1
                    && nz
                        .iter()
                        .all(|(i, x)| (*i == 0 && x.is_atomic()) || (*i > 0 && x.is_one()))
            }
            Repr::Fp(f) => f.den.len() == 1 && f.num.iter().filter(|&&c| c != 0).count() <= 1,
        }
    }
}

fn fmt_fp_poly(f: &mut fmt::Formatter<'_>, c: &[u64], var: &str) -> fmt::Result {
    if c.is_empty() {
        return write!(f, "0");
    }
    let mut first = true;
    for (k, &a) in c.iter().enumerate().rev() {
        if a == 0 {
            continue;
        }
        if !first {
            write!(f, "+")?;
        }
        first = false;
        match (k, a) {
            (0, _) => write!(f, "{a}")?,
            (1, 1) => write!(f, "{var}")?,
            (1, _) => write!(f, "{a}*{var}")?,
            (_, 1) => write!(f, "{var}^{k}")?,
            _ => write!(f, "{a}*{var}^{k}")?,
        }
    }
    Ok(())
}

impl fmt::Display for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.repr {
            Repr::Q(q) => write!(f, "{q}"),
            Repr::Fp(fr) => {
                let var = self.field.generator_name().unwrap_or("theta");
                if fr.den.len() == 1 {
                    fmt_fp_poly(f, &fr.num, var)
                } else {
                    write!(f, "(")?;
                    fmt_fp_poly(f, &fr.num, var)?;
                    write!(f, ")/(")?;
                    fmt_fp_poly(f, &fr.den, var)?;
                    write!(f, ")")
                }
            }
            Repr::Ext(c) => {
                let name = self.field.generator_name().unwrap_or("g");
                let mut first = true;
                for (k, a) in c.iter().enumerate().rev() {
                    if a.is_zero() {
                        continue;
                    }
                    let neg = a.looks_negative();
                    let abs = if neg { a.neg() } else { a.clone() };
                    if first {
                        if neg {
                            write!(f, "-")?;
                        }
                    } else {
                        write!(f, "{}", if neg { " - " } else { " + " })?;
                    }
                    first = false;
                    let coef = if abs.is_atomic() {
                        alloc::format!("{abs}")
                    } else {
                        alloc::format!("({abs})")
                    };
                    match k {
                        0 => write!(f, "{abs}")?,
                        _ => {
                            if !abs.is_one() {
                                write!(f, "{coef}*")?;
                            }
                            write!(f, "{name}")?;
                            if k > 1 {
                                write!(f, "^{k}")?;
                            }
                        }
                    }
                }
                if first {
                    write!(f, "0")?;
                }
                Ok(())
            }
        }
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $checked:ident) => {
        impl $tr<&Elem> for &Elem {
            type Output = Elem;
            fn $m(self, o: &Elem) -> Elem {
                match self.$checked(o) {
                    Ok(v) => v,
                    Err(e) => panic!("{e}"),
                }
            }
        }
        impl $tr<Elem> for Elem {
            type Output = Elem;
            fn $m(self, o: Elem) -> Elem {
                (&self).$m(&o)
            }
        }
        impl $tr<&Elem> for Elem {
            type Output = Elem;
            fn $m(self, o: &Elem) -> Elem {
                (&self).$m(o)
            }
        }
    };
}

binop!(Add, add, checked_add);
binop!(Sub, sub, checked_sub);
binop!(Mul, mul, checked_mul);
binop!(Div, div, checked_div);

impl Neg for &Elem {
    type Output = Elem;
    fn neg(self) -> Elem {
        Elem::neg(self)
    }
}
impl Neg for Elem {
    type Output = Elem;
    fn neg(self) -> Elem {
        Elem::neg(&self)
    }
}

/// Rational number from a pair of integers.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_sum() {
        let q = Field::rationals();
        let a = q.from_rational(&rat(1, 2)).unwrap();
        let b = q.from_rational(&rat(1, 3)).unwrap();
        assert_eq!(&a + &b, q.from_rational(&rat(5, 6)).unwrap());
    }

    #[test]
    fn gaussian_square() {
        let (k, i) = adjoin_root(
            &Field::rationals(),
            &Poly::from_ints(&Field::rationals(), &[1, 0, 1]),
            "i",
            false,
        )
        .unwrap();
        assert_eq!(&i * &i, k.from_int(-1));
        assert_eq!(
            format!(
                "{}",
                k.from_coords(vec![rat_e(1, 2), rat_e(-3, 1)]).unwrap()
            ),
            "-3*i + 1/2"
        );
    }

    fn rat_e(n: i64, d: i64) -> Elem {
        Field::rationals().from_rational(&rat(n, d)).unwrap()
    }

    #[test]
    fn function_field_cancellation() {
        let f = Field::fp_function(3, "theta").unwrap();
        let t = f.generator().unwrap();
        let x = &(&t + &f.one()) / &t;
        assert_eq!(&x * &t, &t + &f.one());
        assert_eq!(format!("{x}"), "(theta+1)/(theta)");
    }

    #[test]
    fn mismatch_is_an_error() {
        let a = Field::rationals().one();
        let b = Field::fp_function(5, "t").unwrap().one();
        assert_eq!(a.checked_add(&b), Err(Error::FieldMismatch));
        assert_eq!(
            a.checked_div(&Field::rationals().zero()),
            Err(Error::DivisionByZero)
        );
    }

    #[test]
    fn embedding_into_tower() {
        let q = Field::rationals();
        let (k, i) = adjoin_root(&q, &Poly::from_ints(&q, &[1, 0, 1]), "i", false).unwrap();
        let (k2, s) = adjoin_root(&k, &Poly::from_ints(&k, &[-2, 0, 1]), "s", false).unwrap();
        let half = k2.embed(&rat_e(1, 2)).unwrap();
        let i2 = k2.embed(&i).unwrap();
        assert_eq!(&(&s * &s) * &half, k2.one());
        assert_eq!(&i2 * &i2, k2.from_int(-1));
        assert_eq!(k2.from_int(-1).descend(), q.from_int(-1));
    }
}
