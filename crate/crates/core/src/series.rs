//! Laurent polynomials, rational functions and truncated Puiseux series in `z`.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_integer::Integer;

use crate::error::{Error, Result};
use crate::fields::{Elem, Field, Rational};
use crate::linalg::Mat;
use crate::poly::Poly;

/// Finitely supported `Σ c_k z^k`, `k ∈ Z`; zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq)]
pub struct LaurentPoly {
    field: Field,
    terms: BTreeMap<i64, Elem>,
}

impl fmt::Debug for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl LaurentPoly {
    pub fn zero(field: &Field) -> LaurentPoly {
        LaurentPoly {
            field: field.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn monomial(c: Elem, k: i64) -> LaurentPoly {
        let mut p = LaurentPoly::zero(&c.field().clone());
        p.add_term(k, c);
        p
    }

    pub fn constant(c: Elem) -> LaurentPoly {
        LaurentPoly::monomial(c, 0)
    }

    pub fn from_terms(field: &Field, terms: impl IntoIterator<Item = (i64, Elem)>) -> LaurentPoly {
        let mut p = LaurentPoly::zero(field);
        for (k, c) in terms {
            p.add_term(k, c);
        }
        p
    }

    pub fn from_poly(p: &Poly) -> LaurentPoly {
        LaurentPoly::from_terms(
            p.field(),
            p.coeffs()
                .iter()
                .enumerate()
                .map(|(k, c)| (k as i64, c.clone())),
        )
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn terms(&self) -> &BTreeMap<i64, Elem> {
        &self.terms
    }

    pub fn add_term(&mut self, k: i64, c: Elem) {
        if c.is_zero() {
            return;
        }
        let v = match self.terms.remove(&k) {
            Some(old) => &old + &c,
            None => c,
        };
        if !v.is_zero() {
            self.terms.insert(k, v);
        }
    }

    pub fn coeff(&self, k: i64) -> Elem {
        self.terms
            .get(&k)
            .cloned()
            .unwrap_or_else(|| self.field.zero())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn valuation(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    pub fn degree(&self) -> Option<i64> {
        self.terms.keys().next_back().copied()
    }

    /// Constant term if the polynomial is a constant.
    pub fn as_constant(&self) -> Option<Elem> {
        match self.terms.len() {
            0 => Some(self.field.zero()),
            1 if self.terms.contains_key(&0) => Some(self.coeff(0)),
            _ => None,
        }
    }

    pub fn add(&self, o: &LaurentPoly) -> LaurentPoly {
        let mut r = self.clone();
        for (k, c) in &o.terms {
            r.add_term(*k, c.clone());
        }
        r
    }

    pub fn neg(&self) -> LaurentPoly {
        LaurentPoly {
            field: self.field.clone(),
            terms: self.terms.iter().map(|(k, c)| (*k, -c)).collect(),
        }
    }

    pub fn sub(&self, o: &LaurentPoly) -> LaurentPoly {
        self.add(&o.neg())
    }

    pub fn scale(&self, c: &Elem) -> LaurentPoly {
        LaurentPoly::from_terms(&self.field, self.terms.iter().map(|(k, x)| (*k, x * c)))
    }

    pub fn mul(&self, o: &LaurentPoly) -> LaurentPoly {
        let mut r = LaurentPoly::zero(&self.field);
        for (i, a) in &self.terms {
            for (j, b) in &o.terms {
                r.add_term(i + j, a * b);
            }
        }
        r
    }

    /// Multiply by `z^k`.
    pub fn shift(&self, k: i64) -> LaurentPoly {
        LaurentPoly {
            field: self.field.clone(),
            terms: self.terms.iter().map(|(e, c)| (e + k, c.clone())).collect(),
        }
    }

    /// `f(z^e)`.
    pub fn substitute_power(&self, e: i64) -> LaurentPoly {
        LaurentPoly {
            field: self.field.clone(),
            terms: self.terms.iter().map(|(k, c)| (k * e, c.clone())).collect(),
        }
    }

    pub fn to_rational(&self) -> RationalFunction {
        match self.valuation() {
            None => RationalFunction::zero(&self.field),
            Some(v) => {
                let shift = v.min(0);
                let num = Poly::new(&self.field, {
                    let deg = (self.degree().unwrap() - shift) as usize;
                    let mut c = vec![self.field.zero(); deg + 1];
                    for (k, x) in &self.terms {
                        c[(k - shift) as usize] = x.clone();
                    }
                    c
                });
                RationalFunction::from_parts(
                    num,
                    Poly::monomial(self.field.one(), (-shift) as usize),
                )
                .unwrap()
            }
        }
    }

    pub fn embed(&self, to: &Field) -> Result<LaurentPoly> {
        let mut terms = BTreeMap::new();
        for (k, c) in &self.terms {
            terms.insert(*k, to.embed(c)?);
        }
        Ok(LaurentPoly {
            field: to.clone(),
            terms,
        })
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_terms(
            f,
            self.terms
                .iter()
                .map(|(k, c)| (Rational::from_integer(BigInt::from(*k)), c)),
        )
    }
}

/// Render `Σ c z^e` with exponents in increasing order.
pub(crate) fn write_terms<'a>(
    f: &mut fmt::Formatter<'_>,
    terms: impl Iterator<Item = (Rational, &'a Elem)>,
) -> fmt::Result {
    let mut first = true;
    for (e, c) in terms {
        if c.is_zero() {
            continue;
        }
        let neg = c.looks_negative();
        let a = if neg { c.neg() } else { c.clone() };
        if first {
            if neg {
                write!(f, "-")?;
            }
        } else {
            write!(f, "{}", if neg { " - " } else { " + " })?;
        }
        first = false;
        let zero_exp = e == Rational::from_integer(BigInt::from(0));
        if zero_exp {
            write!(f, "{a}")?;
            continue;
        }
        if !a.is_one() {
            if a.is_atomic() {
                write!(f, "{a}*")?;
            } else {
                write!(f, "({a})*")?;
            }
        }
        if e == Rational::from_integer(BigInt::from(1)) {
            write!(f, "z")?;
        } else if e.is_integer() && e > Rational::from_integer(BigInt::from(0)) {
            write!(f, "z^{e}")?;
        } else {
            write!(f, "z^({e})")?;
        }
    }
    if first {
        write!(f, "0")?;
    }
    Ok(())
}

/// `num/den` in lowest terms with monic denominator.
#[derive(Clone, PartialEq, Eq)]
pub struct RationalFunction {
    num: Poly,
    den: Poly,
}

impl fmt::Debug for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.degree() == Some(0) {
            write!(f, "{}", self.num.display("z"))
        } else {
            write!(f, "({})/({})", self.num.display("z"), self.den.display("z"))
        }
    }
}

impl RationalFunction {
    pub fn from_parts(num: Poly, den: Poly) -> Result<RationalFunction> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if num.field() != den.field() {
            return Err(Error::FieldMismatch);
        }
        if num.is_zero() {
            return Ok(RationalFunction::zero(num.field()));
        }
        let g = num.gcd(&den);
        let mut n = num.exact_div(&g)?;
        let mut d = den.exact_div(&g)?;
        let l = d.lead().unwrap().inv()?;
        n = n.scale(&l);
        d = d.scale(&l);
        Ok(RationalFunction { num: n, den: d })
    }

    pub fn zero(field: &Field) -> RationalFunction {
        RationalFunction {
            num: Poly::zero(field),
            den: Poly::one(field),
        }
    }

    pub fn one(field: &Field) -> RationalFunction {
        RationalFunction::constant(field.one())
    }

    pub fn constant(c: Elem) -> RationalFunction {
        let f = c.field().clone();
        RationalFunction {
            num: Poly::constant(c),
            den: Poly::one(&f),
        }
    }

    pub fn from_poly(p: Poly) -> RationalFunction {
        let f = p.field().clone();
        RationalFunction {
            num: p,
            den: Poly::one(&f),
        }
    }

    /// `z^k` for any integer `k`.
    pub fn z_pow(field: &Field, k: i64) -> RationalFunction {
        if k >= 0 {
            RationalFunction::from_poly(Poly::monomial(field.one(), k as usize))
        } else {
            RationalFunction {
                num: Poly::one(field),
                den: Poly::monomial(field.one(), (-k) as usize),
            }
        }
    }

    pub fn field(&self) -> &Field {
        self.num.field()
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.degree() == Some(0)
    }

    /// Order of vanishing at `z = 0`; `None` for zero.
    pub fn valuation(&self) -> Option<i64> {
        let vn = self.num.valuation()? as i64;
        Some(vn - self.den.valuation().unwrap() as i64)
    }

    /// The Laurent polynomial this equals, if the denominator is a power of `z`.
    pub fn as_laurent(&self) -> Option<LaurentPoly> {
        let dv = self.den.valuation().unwrap();
        if self.den.degree() != Some(dv) {
            return None;
        }
        let lp = LaurentPoly::from_poly(&self.num).shift(-(dv as i64));
        Some(lp.scale(&self.den.lead().unwrap().inv().unwrap()))
    }

    /// Constant value if the function is constant.
    pub fn as_constant(&self) -> Option<Elem> {
        if self.is_zero() {
            return Some(self.field().zero());
        }
        if self.num.degree() == Some(0) && self.den.degree() == Some(0) {
            Some(self.num.coeff(0))
        } else {
            None
        }
    }

    pub fn add(&self, o: &RationalFunction) -> RationalFunction {
        RationalFunction::from_parts(
            self.num.mul(&o.den).add(&o.num.mul(&self.den)),
            self.den.mul(&o.den),
        )
        .unwrap()
    }

    pub fn neg(&self) -> RationalFunction {
        RationalFunction {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn sub(&self, o: &RationalFunction) -> RationalFunction {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &RationalFunction) -> RationalFunction {
        RationalFunction::from_parts(self.num.mul(&o.num), self.den.mul(&o.den)).unwrap()
    }

    pub fn scale(&self, c: &Elem) -> RationalFunction {
        RationalFunction::from_parts(self.num.scale(c), self.den.clone()).unwrap()
    }

    pub fn inv(&self) -> Result<RationalFunction> {
        RationalFunction::from_parts(self.den.clone(), self.num.clone())
    }

    pub fn div(&self, o: &RationalFunction) -> Result<RationalFunction> {
        Ok(self.mul(&o.inv()?))
    }

    pub fn pow(&self, e: i64) -> Result<RationalFunction> {
        let b = if e < 0 { self.inv()? } else { self.clone() };
        let n = e.unsigned_abs() as u32;
        Ok(RationalFunction {
            num: b.num.pow(n),
            den: b.den.pow(n),
        })
    }

    /// `r(z^e)`.
    pub fn substitute_power(&self, e: usize) -> RationalFunction {
        RationalFunction {
            num: self.num.compose_power(e),
            den: self.den.compose_power(e),
        }
    }

    pub fn embed(&self, to: &Field) -> Result<RationalFunction> {
        RationalFunction::from_parts(self.num.embed(to)?, self.den.embed(to)?)
    }

    /// Laurent expansion at 0 through `z^order` inclusive, as a dense vector
    /// starting at the valuation.
    pub fn expand_dense(&self, order: i64) -> (i64, Vec<Elem>) {
        let f = self.field().clone();
        let Some(v) = self.valuation() else {
            return (order + 1, Vec::new());
        };
        let vn = self.num.valuation().unwrap();
        let vd = self.den.valuation().unwrap();
        let n = self.num.unshift(vn);
        let d = self.den.unshift(vd);
        if order < v {
            return (v, Vec::new());
        }
        let len = (order - v + 1) as usize;
        let inv0 = d.coeff(0).inv().unwrap();
        let dc = d.coeffs();
        let mut s: Vec<Elem> = Vec::with_capacity(len);
        for k in 0..len {
            let mut acc = n.coeff(k);
            for j in 1..dc.len().min(k + 1) {
                if !dc[j].is_zero() {
                    acc = &acc - &(&dc[j] * &s[k - j]);
                }
            }
            s.push(if acc.is_zero() {
                f.zero()
            } else {
                &acc * &inv0
            });
        }
        (v, s)
    }

    /// Laurent expansion as a truncation with `d = 1`.
    pub fn expand(&self, order: i64) -> PuiseuxTruncation {
        let (v, s) = self.expand_dense(order);
        let mut t = PuiseuxTruncation::zero(self.field(), 1, order);
        for (k, c) in s.into_iter().enumerate() {
            t.set(v + k as i64, c);
        }
        t.source = Some(Source {
            r: self.clone(),
            power: 1,
        });
        t
    }
}

/// Exact generator for coefficients: `r(z^power)`, exponents counted in
/// units of `1/d` of the owning truncation.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Source {
    r: RationalFunction,
    power: i64,
}

/// `Σ c_k z^{k/d}` known for all exponents up to `order/d` inclusive.
///
/// Exponents and the order are stored as numerators over `d`. Equality
/// ignores the lazy source.
#[derive(Clone)]
pub struct PuiseuxTruncation {
    field: Field,
    d: u64,
    coeffs: BTreeMap<i64, Elem>,
    order: i64,
    source: Option<Source>,
}

impl PartialEq for PuiseuxTruncation {
    fn eq(&self, o: &PuiseuxTruncation) -> bool {
        self.d == o.d && self.order == o.order && self.coeffs == o.coeffs
    }
}
impl Eq for PuiseuxTruncation {}

impl fmt::Debug for PuiseuxTruncation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for PuiseuxTruncation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = self.d as i64;
        write_terms(
            f,
            self.coeffs
                .iter()
                .map(|(k, c)| (Rational::new(BigInt::from(*k), BigInt::from(d)), c)),
        )?;
        let o = Rational::new(BigInt::from(self.order + 1), BigInt::from(d));
        if o.is_integer() {
            write!(f, " + O(z^{o})")
        } else {
            write!(f, " + O(z^({o}))")
        }
    }
}

impl PuiseuxTruncation {
    /// Zero known through exponent `order/d`.
    pub fn zero(field: &Field, d: u64, order: i64) -> PuiseuxTruncation {
        PuiseuxTruncation {
            field: field.clone(),
            d,
            coeffs: BTreeMap::new(),
            order,
            source: None,
        }
    }

    /// Build from explicit numerators; terms beyond `order` are dropped.
    pub fn from_terms(
        field: &Field,
        d: u64,
        order: i64,
        terms: impl IntoIterator<Item = (i64, Elem)>,
    ) -> PuiseuxTruncation {
        let mut t = PuiseuxTruncation::zero(field, d, order);
        for (k, c) in terms {
            if k <= order {
                let v = &t.coeff_num(k) + &c;
                t.set(k, v);
            }
        }
        t
    }

    pub fn from_laurent(p: &LaurentPoly, order: i64) -> PuiseuxTruncation {
        PuiseuxTruncation::from_terms(
            p.field(),
            1,
            order,
            p.terms().iter().map(|(k, c)| (*k, c.clone())),
        )
    }

    fn set(&mut self, k: i64, c: Elem) {
        if c.is_zero() {
            self.coeffs.remove(&k);
        } else {
            self.coeffs.insert(k, c);
        }
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn ramification(&self) -> u64 {
        self.d
    }

    /// Inclusive order numerator (over `d`).
    pub fn order_num(&self) -> i64 {
        self.order
    }

    pub fn order(&self) -> Rational {
        Rational::new(BigInt::from(self.order), BigInt::from(self.d))
    }

    /// Nonzero coefficients keyed by exponent numerator.
    pub fn coeffs(&self) -> &BTreeMap<i64, Elem> {
        &self.coeffs
    }

    /// Coefficient at exponent `k/d`, zero when absent; callers must stay
    /// within the order.
    pub fn coeff_num(&self, k: i64) -> Elem {
        self.coeffs
            .get(&k)
            .cloned()
            .unwrap_or_else(|| self.field.zero())
    }

    /// Coefficient at a rational exponent, `None` beyond the order.
    pub fn coeff(&self, e: &Rational) -> Option<Elem> {
        let k = e * Rational::from_integer(BigInt::from(self.d));
        if !k.is_integer() {
            return if *e > self.order() {
                None
            } else {
                Some(self.field.zero())
            };
        }
        let k: i64 = i64::try_from(k.to_integer()).ok()?;
        if k > self.order {
            None
        } else {
            Some(self.coeff_num(k))
        }
    }

    /// Numerator of the valuation; for a zero truncation, `order + 1`.
    pub fn val_num(&self) -> i64 {
        self.coeffs.keys().next().copied().unwrap_or(self.order + 1)
    }

    pub fn valuation(&self) -> Option<Rational> {
        self.coeffs
            .keys()
            .next()
            .map(|k| Rational::new(BigInt::from(*k), BigInt::from(self.d)))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Re-express over `z^{1/(d·k)}`.
    pub fn refine(&self, k: u64) -> PuiseuxTruncation {
        if k == 1 {
            return self.clone();
        }
        let ki = k as i64;
        PuiseuxTruncation {
            field: self.field.clone(),
            d: self.d * k,
            coeffs: self
                .coeffs
                .iter()
                .map(|(e, c)| (e * ki, c.clone()))
                .collect(),
            order: self.order * ki + ki - 1,
            source: self.source.clone(),
        }
    }

    fn common(&self, o: &PuiseuxTruncation) -> (PuiseuxTruncation, PuiseuxTruncation) {
        let l = self.d.lcm(&o.d);
        (self.refine(l / self.d), o.refine(l / o.d))
    }

    /// `f(z^e)`; the order scales by `e`.
    pub fn substitute_power(&self, e: u64) -> PuiseuxTruncation {
        let ei = e as i64;
        PuiseuxTruncation {
            field: self.field.clone(),
            d: self.d,
            coeffs: self
                .coeffs
                .iter()
                .map(|(k, c)| (k * ei, c.clone()))
                .collect(),
            order: self.order * ei,
            source: self.source.as_ref().map(|s| Source {
                r: s.r.clone(),
                power: s.power * ei,
            }),
        }
    }

    /// `f(z^{1/d'})`.
    pub fn ramify(&self, d: u64) -> PuiseuxTruncation {
        PuiseuxTruncation {
            d: self.d * d,
            ..self.clone()
        }
    }

    /// Multiply by `z^{k/d}`.
    pub fn shift_num(&self, k: i64) -> PuiseuxTruncation {
        PuiseuxTruncation {
            field: self.field.clone(),
            d: self.d,
            coeffs: self
                .coeffs
                .iter()
                .map(|(e, c)| (e + k, c.clone()))
                .collect(),
            order: self.order + k,
            source: None,
        }
    }

    /// Drop everything above `order/d`.
    pub fn truncate(&self, order: i64) -> PuiseuxTruncation {
        let order = order.min(self.order);
        PuiseuxTruncation {
            field: self.field.clone(),
            d: self.d,
            coeffs: self
                .coeffs
                .range(..=order)
                .map(|(k, c)| (*k, c.clone()))
                .collect(),
            order,
            source: self.source.clone(),
        }
    }

    /// Recompute through a higher order from the lazy source, if any.
    pub fn extend(&self, order: i64) -> Result<PuiseuxTruncation> {
        if order <= self.order {
            return Ok(self.clone());
        }
        let Some(s) = &self.source else {
            return Err(Error::Malformed(String::from(
                "truncation has no lazy source",
            )));
        };
        let z_order = Integer::div_floor(&order, &s.power);
        let (v, dense) = s.r.expand_dense(z_order);
        let mut t = PuiseuxTruncation::zero(&self.field, self.d, order);
        for (k, c) in dense.into_iter().enumerate() {
            t.set((v + k as i64) * s.power, c);
        }
        t.source = Some(s.clone());
        Ok(t)
    }

    pub fn neg(&self) -> PuiseuxTruncation {
        PuiseuxTruncation {
            field: self.field.clone(),
            d: self.d,
            coeffs: self.coeffs.iter().map(|(k, c)| (*k, -c)).collect(),
            order: self.order,
            source: None,
        }
    }

    pub fn scale(&self, c: &Elem) -> PuiseuxTruncation {
        let mut t = PuiseuxTruncation::zero(&self.field, self.d, self.order);
        for (k, x) in &self.coeffs {
            t.set(*k, x * c);
        }
        t
    }

    pub fn add(&self, o: &PuiseuxTruncation) -> PuiseuxTruncation {
        let (a, b) = self.common(o);
        let order = a.order.min(b.order);
        let mut t = a.truncate(order);
        t.source = None;
        for (k, c) in b.coeffs.range(..=order) {
            let v = &t.coeff_num(*k) + c;
            t.set(*k, v);
        }
        t
    }

    pub fn sub(&self, o: &PuiseuxTruncation) -> PuiseuxTruncation {
        self.add(&o.neg())
    }

    /// Product; known through `min(ord f + val g, ord g + val f)`.
    pub fn mul(&self, o: &PuiseuxTruncation) -> PuiseuxTruncation {
        let (a, b) = self.common(o);
        let order = (a.order + b.val_num()).min(b.order + a.val_num());
        let mut t = PuiseuxTruncation::zero(&a.field, a.d, order);
        for (i, x) in &a.coeffs {
            for (j, y) in b.coeffs.range(..=(order - i)) {
                let v = &t.coeff_num(i + j) + &(x * y);
                t.set(i + j, v);
            }
        }
        t
    }

    /// Product with an exact Laurent polynomial in `z`.
    pub fn mul_laurent(&self, p: &LaurentPoly) -> PuiseuxTruncation {
        let d = self.d as i64;
        let Some(vp) = p.valuation() else {
            return PuiseuxTruncation::zero(&self.field, self.d, i64::MAX / 4);
        };
        let order = self.order + vp * d;
        let mut t = PuiseuxTruncation::zero(&self.field, self.d, order);
        for (i, x) in &self.coeffs {
            for (j, y) in p.terms() {
                let k = i + j * d;
                if k <= order {
                    let v = &t.coeff_num(k) + &(x * y);
                    t.set(k, v);
                }
            }
        }
        t
    }

    /// Product with an exact rational function, expanded as far as needed.
    pub fn mul_rational(&self, r: &RationalFunction) -> PuiseuxTruncation {
        let d = self.d as i64;
        let Some(vr) = r.valuation() else {
            return PuiseuxTruncation::zero(&self.field, self.d, i64::MAX / 4);
        };
        let need = Integer::div_floor(&(self.order - self.val_num()), &d) + vr + 1;
        let rt = r.expand(need).refine(self.d);
        self.mul(&rt).truncate(self.order + vr * d)
    }

    /// All coefficients with exponent at most `order/d` vanish.
    pub fn vanishes_through(&self, order: i64) -> bool {
        self.coeffs.range(..=order).next().is_none()
    }

    pub fn embed(&self, to: &Field) -> Result<PuiseuxTruncation> {
        let mut coeffs = BTreeMap::new();
        for (k, c) in &self.coeffs {
            coeffs.insert(*k, to.embed(c)?);
        }
        let source = match &self.source {
            Some(s) => Some(Source {
                r: s.r.embed(to)?,
                power: s.power,
            }),
            None => None,
        };
        Ok(PuiseuxTruncation {
            field: to.clone(),
            d: self.d,
            coeffs,
            order: self.order,
            source,
        })
    }
}

/// Laurent expansion of `r` through `z^order`.
pub fn expand_rational(r: &RationalFunction, order: i64) -> PuiseuxTruncation {
    r.expand(order)
}

/// `Σ_{n=val}^{order} C_n z^n` with constant matrix coefficients, optionally
/// backed by an exact rational matrix for further expansion.
#[derive(Clone, Debug, PartialEq)]
pub struct SeriesMatrix {
    field: Field,
    rows: usize,
    cols: usize,
    val: i64,
    coeffs: Vec<Mat<Elem>>,
    source: Option<Mat<RationalFunction>>,
}

impl SeriesMatrix {
    /// Coefficients `C_val, C_{val+1}, …`.
    pub fn new(
        field: &Field,
        rows: usize,
        cols: usize,
        val: i64,
        coeffs: Vec<Mat<Elem>>,
    ) -> SeriesMatrix {
        SeriesMatrix {
            field: field.clone(),
            rows,
            cols,
            val,
            coeffs,
            source: None,
        }
    }

    /// Expansion of a rational matrix through `z^order`.
    pub fn from_rational(a: &Mat<RationalFunction>, order: i64) -> SeriesMatrix {
        let val = a
            .entries()
            .iter()
            .filter_map(RationalFunction::valuation)
            .min()
            .unwrap_or(0);
        let mut s = SeriesMatrix::new(a.field(), a.rows(), a.cols(), val, Vec::new());
        s.source = Some(a.clone());
        s.extend(order);
        s
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Lower bound on the valuation (exact when built from a rational matrix).
    pub fn val(&self) -> i64 {
        self.val
    }

    /// Last known exponent.
    pub fn order(&self) -> i64 {
        self.val + self.coeffs.len() as i64 - 1
    }

    /// `C_n`; zero below the valuation. Panics beyond the known order.
    pub fn coeff(&self, n: i64) -> Mat<Elem> {
        if n < self.val {
            return Mat::zeros(&self.field, self.rows, self.cols);
        }
        assert!(
            n <= self.order(),
            "coefficient {n} beyond known order {}",
            self.order()
        );
        self.coeffs[(n - self.val) as usize].clone()
    }

    pub fn coeff_ref(&self, n: i64) -> Option<&Mat<Elem>> {
        if n < self.val {
            return None;
        }
        self.coeffs.get((n - self.val) as usize)
    }

    /// Append `C_{order+1}`.
    pub fn push(&mut self, c: Mat<Elem>) {
        self.coeffs.push(c);
    }

    /// Expand the backing rational matrix through `order`; no-op without one.
    pub fn extend(&mut self, order: i64) {
        if order <= self.order() {
            return;
        }
        let Some(a) = &self.source else {
            return;
        };
        let len = (order - self.val + 1) as usize;
        let mut out = vec![Mat::zeros(&self.field, self.rows, self.cols); len];
        for i in 0..self.rows {
            for j in 0..self.cols {
                let (v, dense) = a[(i, j)].expand_dense(order);
                for (k, c) in dense.into_iter().enumerate() {
                    out[(v - self.val) as usize + k][(i, j)] = c;
                }
            }
        }
        self.coeffs = out;
    }

    /// Least exponent with a nonzero coefficient among the known ones.
    pub fn valuation(&self) -> Option<i64> {
        self.coeffs
            .iter()
            .position(|c| !c.is_zero())
            .map(|k| self.val + k as i64)
    }

    /// Entry `(i, j)` as a truncation with `d = 1`.
    pub fn entry(&self, i: usize, j: usize) -> PuiseuxTruncation {
        PuiseuxTruncation::from_terms(
            &self.field,
            1,
            self.order(),
            self.coeffs
                .iter()
                .enumerate()
                .map(|(k, c)| (self.val + k as i64, c[(i, j)].clone())),
        )
    }

    /// `S·C` for a constant matrix `C`.
    pub fn mul_const_right(&self, c: &Mat<Elem>) -> SeriesMatrix {
        SeriesMatrix::new(
            &self.field,
            self.rows,
            c.cols(),
            self.val,
            self.coeffs.iter().map(|x| x.mul(c)).collect(),
        )
    }

    pub fn embed(&self, to: &Field) -> Result<SeriesMatrix> {
        Ok(SeriesMatrix {
            field: to.clone(),
            rows: self.rows,
            cols: self.cols,
            val: self.val,
            coeffs: self
                .coeffs
                .iter()
                .map(|c| c.embed(to))
                .collect::<Result<_>>()?,
            source: match &self.source {
                Some(a) => Some(a.map(to, |r| r.embed(to))?),
                None => None,
            },
        })
    }
}

/// `Σ_l T_l z^l` with finitely many nonzero constant matrices.
#[derive(Clone, Debug, PartialEq)]
pub struct LaurentMatrix {
    field: Field,
    rows: usize,
    cols: usize,
    coeffs: BTreeMap<i64, Mat<Elem>>,
}

impl LaurentMatrix {
    pub fn new(
        field: &Field,
        rows: usize,
        cols: usize,
        coeffs: impl IntoIterator<Item = (i64, Mat<Elem>)>,
    ) -> LaurentMatrix {
        LaurentMatrix {
            field: field.clone(),
            rows,
            cols,
            coeffs: coeffs.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
        }
    }

    pub fn constant(c: &Mat<Elem>) -> LaurentMatrix {
        LaurentMatrix::new(c.field(), c.rows(), c.cols(), [(0, c.clone())])
    }

    /// Build from Laurent polynomial entries.
    pub fn from_entries(
        field: &Field,
        rows: usize,
        cols: usize,
        e: impl Fn(usize, usize) -> LaurentPoly,
    ) -> LaurentMatrix {
        let mut coeffs: BTreeMap<i64, Mat<Elem>> = BTreeMap::new();
        for i in 0..rows {
            for j in 0..cols {
                for (k, c) in e(i, j).terms() {
                    coeffs
                        .entry(*k)
                        .or_insert_with(|| Mat::zeros(field, rows, cols))[(i, j)] = c.clone();
                }
            }
        }
        LaurentMatrix {
            field: field.clone(),
            rows,
            cols,
            coeffs,
        }
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn coeffs(&self) -> &BTreeMap<i64, Mat<Elem>> {
        &self.coeffs
    }

    pub fn coeff(&self, l: i64) -> Mat<Elem> {
        self.coeffs
            .get(&l)
            .cloned()
            .unwrap_or_else(|| Mat::zeros(&self.field, self.rows, self.cols))
    }

    /// Exponents carrying a nonzero coefficient, ascending.
    pub fn support(&self) -> Vec<i64> {
        self.coeffs.keys().copied().collect()
    }

    pub fn valuation(&self) -> Option<i64> {
        self.coeffs.keys().next().copied()
    }

    pub fn entry(&self, i: usize, j: usize) -> LaurentPoly {
        LaurentPoly::from_terms(
            &self.field,
            self.coeffs.iter().map(|(k, c)| (*k, c[(i, j)].clone())),
        )
    }

    pub fn to_rational(&self) -> Mat<RationalFunction> {
        Mat::from_fn(&self.field, self.rows, self.cols, |i, j| {
            self.entry(i, j).to_rational()
        })
    }

    /// `L·T·R` for constant `L`, `R`.
    pub fn conjugate(&self, l: &Mat<Elem>, r: &Mat<Elem>) -> LaurentMatrix {
        LaurentMatrix::new(
            &self.field,
            l.rows(),
            r.cols(),
            self.coeffs.iter().map(|(k, c)| (*k, l.mul(c).mul(r))),
        )
    }

    pub fn embed(&self, to: &Field) -> Result<LaurentMatrix> {
        Ok(LaurentMatrix {
            field: to.clone(),
            rows: self.rows,
            cols: self.cols,
            coeffs: self
                .coeffs
                .iter()
                .map(|(k, c)| Ok((*k, c.embed(to)?)))
                .collect::<Result<_>>()?,
        })
    }
}
