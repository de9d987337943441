//! Hahn series `z^e ξ_ω` built from exponential-polynomial multi-sequences,
//! the inhomogeneous solvers of the Mahler Hahn layer and the matrix `H`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_traits::{One, Pow, Signed, Zero};

use crate::error::{Error, Result};
use crate::fields::{Elem, Field, Rational};
use crate::series::{LaurentMatrix, LaurentPoly};

fn binomial(n: u32, k: u32) -> BigInt {
    num_integer::binomial(BigInt::from(n), BigInt::from(k))
}

fn p_pow(p: u64, k: i64) -> Rational {
    let b = BigInt::from(p).pow(k.unsigned_abs() as u32);
    if k >= 0 {
        Rational::from_integer(b)
    } else {
        Rational::new(BigInt::one(), b)
    }
}

/// One basis sequence `k_1^{α_1}⋯k_s^{α_s} λ_1^{k_1}⋯λ_s^{k_s}`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct SeqTerm {
    pub alpha: Vec<u32>,
    pub lambda: Vec<Elem>,
}

impl SeqTerm {
    pub fn eval(&self, field: &Field, k: &[i64]) -> Elem {
        let mut acc: Option<Elem> = None;
        for ((a, l), &ki) in self.alpha.iter().zip(&self.lambda).zip(k) {
            let mono = l.field().from_bigint(&BigInt::from(ki).pow(*a));
            let x = &mono * &l.pow(ki).expect("λ is nonzero");
            acc = Some(match acc {
                None => x,
                Some(y) => &y * &x,
            });
        }
        acc.unwrap_or_else(|| field.one())
    }
}

/// `Σ c · k^α λ^k` over multi-indices of a fixed arity.
#[derive(Clone, PartialEq, Eq)]
pub struct ExpPolySeq {
    field: Field,
    arity: usize,
    terms: BTreeMap<SeqTerm, Elem>,
}

impl fmt::Debug for ExpPolySeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl ExpPolySeq {
    pub fn zero(field: &Field, arity: usize) -> ExpPolySeq {
        ExpPolySeq {
            field: field.clone(),
            arity,
            terms: BTreeMap::new(),
        }
    }

    /// The arity-0 sequence `c`.
    pub fn constant(c: Elem) -> ExpPolySeq {
        let f = c.field().clone();
        ExpPolySeq::monomial(&f, c, Vec::new(), Vec::new())
    }

    pub fn monomial(field: &Field, c: Elem, alpha: Vec<u32>, lambda: Vec<Elem>) -> ExpPolySeq {
        assert_eq!(alpha.len(), lambda.len());
        let mut s = ExpPolySeq::zero(field, alpha.len());
        s.add_term(SeqTerm { alpha, lambda }, c);
        s
    }

    /// `c · λ^k`.
    pub fn geometric(c: Elem, lambda: Elem) -> ExpPolySeq {
        let f = c.field().clone();
        ExpPolySeq::monomial(&f, c, vec![0], vec![lambda])
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn terms(&self) -> &BTreeMap<SeqTerm, Elem> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, t: SeqTerm, c: Elem) {
        assert_eq!(t.alpha.len(), self.arity, "sequence arity mismatch");
        assert!(t.lambda.iter().all(|l| !l.is_zero()), "λ must be nonzero");
        if c.is_zero() {
            return;
        }
        match self.terms.get(&t) {
            Some(x) => {
                let s = x + &c;
                if s.is_zero() {
                    self.terms.remove(&t);
                } else {
                    self.terms.insert(t, s);
                }
            }
            None => {
                self.terms.insert(t, c);
            }
        }
    }

    pub fn add(&self, o: &ExpPolySeq) -> ExpPolySeq {
        let mut r = self.clone();
        for (t, c) in &o.terms {
            r.add_term(t.clone(), c.clone());
        }
        r
    }

    pub fn neg(&self) -> ExpPolySeq {
        self.scale(&-&self.field.one())
    }

    pub fn sub(&self, o: &ExpPolySeq) -> ExpPolySeq {
        self.add(&o.neg())
    }

    pub fn scale(&self, c: &Elem) -> ExpPolySeq {
        let mut r = ExpPolySeq::zero(&self.field, self.arity);
        for (t, x) in &self.terms {
            r.add_term(t.clone(), x * c);
        }
        r
    }

    pub fn eval(&self, k: &[i64]) -> Elem {
        assert_eq!(k.len(), self.arity);
        self.terms.iter().fold(self.field.zero(), |acc, (t, c)| {
            &acc + &(c * &t.eval(&self.field, k))
        })
    }

    /// Fix index `i` to `v`, lowering the arity by one.
    pub fn slice_at(&self, i: usize, v: i64) -> ExpPolySeq {
        let mut r = ExpPolySeq::zero(&self.field, self.arity - 1);
        for (t, c) in &self.terms {
            let f = &self.field;
            let factor =
                &f.from_bigint(&BigInt::from(v).pow(t.alpha[i])) * &t.lambda[i].pow(v).unwrap();
            let mut alpha = t.alpha.clone();
            let mut lambda = t.lambda.clone();
            alpha.remove(i);
            lambda.remove(i);
            r.add_term(SeqTerm { alpha, lambda }, c * &factor);
        }
        r
    }

    /// `k_i ↦ k_i + δ`.
    pub fn shift_at(&self, i: usize, delta: i64) -> ExpPolySeq {
        let f = &self.field;
        let mut r = ExpPolySeq::zero(f, self.arity);
        for (t, c) in &self.terms {
            let a = t.alpha[i];
            let scale = c * &t.lambda[i].pow(delta).unwrap();
            for j in 0..=a {
                let coeff = f.from_bigint(&(binomial(a, j) * BigInt::from(delta).pow(a - j)));
                let mut alpha = t.alpha.clone();
                alpha[i] = j;
                r.add_term(
                    SeqTerm {
                        alpha,
                        lambda: t.lambda.clone(),
                    },
                    &scale * &coeff,
                );
            }
        }
        r
    }

    /// `v_{k_0,k_1,…} = λ_0^{k_0} u_{k_1,…}`.
    pub fn prepend(&self, lambda0: &Elem) -> ExpPolySeq {
        let mut r = ExpPolySeq::zero(&self.field, self.arity + 1);
        for (t, c) in &self.terms {
            let mut alpha = vec![0];
            alpha.extend(&t.alpha);
            let mut lambda = vec![lambda0.clone()];
            lambda.extend(t.lambda.iter().cloned());
            r.add_term(SeqTerm { alpha, lambda }, c.clone());
        }
        r
    }

    /// `u^{[θ]}_{l,k_2,…} = Σ_{k_1=1}^{l−1} u_{k_1,k_2,…} θ^{l−k_1}`.
    pub fn partial_sum(&self, theta: &Elem) -> Result<ExpPolySeq> {
        assert!(self.arity >= 1);
        let f = &self.field;
        let mut r = ExpPolySeq::zero(f, self.arity);
        for (t, c) in &self.terms {
            let a = t.alpha[0];
            let rho = t.lambda[0].checked_div(theta)?;
            let with_first = |alpha0: u32, lambda0: Elem| {
                let mut alpha = t.alpha.clone();
                let mut lambda = t.lambda.clone();
                alpha[0] = alpha0;
                lambda[0] = lambda0;
                SeqTerm { alpha, lambda }
            };
            if rho.is_one() {
                // θ^l Q(l) with Q(x+1) − Q(x) = x^α and Q(1) = 0.
                let q = faulhaber(f, a)?;
                for (j, qj) in q.iter().enumerate() {
                    r.add_term(with_first(j as u32, theta.clone()), c * qj);
                }
            } else {
                // Σ_{k<l} k^α ρ^k = P(l) ρ^l − ρ P(1) with ρP(x+1) − P(x) = x^α.
                let pp = geometric_antidifference(f, a, &rho)?;
                let p1 = pp.iter().fold(f.zero(), |s, x| &s + x);
                for (j, pj) in pp.iter().enumerate() {
                    r.add_term(with_first(j as u32, t.lambda[0].clone()), c * pj);
                }
                r.add_term(with_first(0, theta.clone()), -&(c * &(&rho * &p1)));
            }
        }
        Ok(r)
    }

    pub fn embed(&self, to: &Field) -> Result<ExpPolySeq> {
        let mut r = ExpPolySeq::zero(to, self.arity);
        for (t, c) in &self.terms {
            let lambda = t
                .lambda
                .iter()
                .map(|l| to.embed(l))
                .collect::<Result<Vec<_>>>()?;
            r.add_term(
                SeqTerm {
                    alpha: t.alpha.clone(),
                    lambda,
                },
                to.embed(c)?,
            );
        }
        Ok(r)
    }
}

/// Coefficients of `Q` (low to high) with `Q(x+1) − Q(x) = x^a`, `Q(1) = 0`.
fn faulhaber(f: &Field, a: u32) -> Result<Vec<Elem>> {
    let n = a as usize + 1;
    let mut q = vec![f.zero(); n + 1];
    // Coefficient of x^i in Q(x+1) − Q(x) is Σ_{j>i} q_j C(j, i).
    for i in (0..n).rev() {
        let mut rhs = if i == a as usize { f.one() } else { f.zero() };
        for (j, qj) in q.iter().enumerate().skip(i + 2) {
            rhs = &rhs - &(qj * &f.from_bigint(&binomial(j as u32, i as u32)));
        }
        let lead = f.from_int(i as i64 + 1);
        if lead.is_zero() {
            return Err(Error::Characteristic(
                f.characteristic(),
                format!("Faulhaber sum of degree {a}"),
            ));
        }
        q[i + 1] = rhs.checked_div(&lead)?;
    }
    let q1 = q.iter().fold(f.zero(), |s, x| &s + x);
    q[0] = -&q1;
    Ok(q)
}

/// Coefficients of `P` with `ρ P(x+1) − P(x) = x^a`, `ρ ≠ 1`.
fn geometric_antidifference(f: &Field, a: u32, rho: &Elem) -> Result<Vec<Elem>> {
    let n = a as usize + 1;
    let mut p = vec![f.zero(); n];
    let denom = rho - &f.one();
    for i in (0..n).rev() {
        let mut rhs = if i == a as usize { f.one() } else { f.zero() };
        for (j, pj) in p.iter().enumerate().skip(i + 1) {
            rhs = &rhs - &(&(rho * pj) * &f.from_bigint(&binomial(j as u32, i as u32)));
        }
        p[i] = rhs.checked_div(&denom)?;
    }
    Ok(p)
}

fn write_elem_factor(f: &mut fmt::Formatter<'_>, c: &Elem) -> fmt::Result {
    if c.is_atomic() && !c.looks_negative() {
        write!(f, "{c}")
    } else {
        write!(f, "({c})")
    }
}

impl fmt::Display for ExpPolySeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (n, (t, c)) in self.terms.iter().enumerate() {
            let neg = c.looks_negative();
            let a = if neg { -c } else { c.clone() };
            match (n, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let mut factors: Vec<String> = Vec::new();
            for (i, (al, l)) in t.alpha.iter().zip(&t.lambda).enumerate() {
                match al {
                    0 => {}
                    1 => factors.push(format!("k{}", i + 1)),
                    _ => factors.push(format!("k{}^{al}", i + 1)),
                }
                if !l.is_one() {
                    if l.is_atomic() && !l.looks_negative() {
                        factors.push(format!("{l}^k{}", i + 1));
                    } else {
                        factors.push(format!("({l})^k{}", i + 1));
                    }
                }
            }
            if factors.is_empty() {
                write!(f, "{a}")?;
            } else {
                if !a.is_one() {
                    write_elem_factor(f, &a)?;
                    write!(f, "*")?;
                }
                write!(f, "{}", factors.join("*"))?;
            }
        }
        Ok(())
    }
}

/// `(e, a)`: the monomial exponent of `z^e` and the tuple of `ξ_{(u,a)}`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Key {
    pub exp: Rational,
    pub a: Vec<Rational>,
}

/// A standard basis element `ξ_{(k^α λ^k, a)}`; the empty tuple stands for 1.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct XiKey {
    pub a: Vec<Rational>,
    pub term: SeqTerm,
}

impl XiKey {
    pub fn one() -> XiKey {
        XiKey {
            a: Vec::new(),
            term: SeqTerm {
                alpha: Vec::new(),
                lambda: Vec::new(),
            },
        }
    }

    pub fn is_one(&self) -> bool {
        self.a.is_empty()
    }

    pub fn embed(&self, to: &Field) -> Result<XiKey> {
        let lambda = self
            .term
            .lambda
            .iter()
            .map(|l| to.embed(l))
            .collect::<Result<Vec<_>>>()?;
        Ok(XiKey {
            a: self.a.clone(),
            term: SeqTerm {
                alpha: self.term.alpha.clone(),
                lambda,
            },
        })
    }
}

impl fmt::Display for XiKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            return write!(f, "1");
        }
        let seq = ExpPolySeq::monomial(
            self.term.lambda[0].field(),
            self.term.lambda[0].field().one(),
            self.term.alpha.clone(),
            self.term.lambda.clone(),
        );
        let a: Vec<String> = self.a.iter().map(|x| format!("{x}")).collect();
        write!(f, "ξ[{seq}; {}]", a.join(", "))
    }
}

/// Finite sum of `z^e ξ_{(u,a)}`, merged on `(e, a)`.
#[derive(Clone, PartialEq, Eq)]
pub struct HahnExpression {
    field: Field,
    terms: BTreeMap<Key, ExpPolySeq>,
}

impl fmt::Debug for HahnExpression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl HahnExpression {
    pub fn zero(field: &Field) -> HahnExpression {
        HahnExpression {
            field: field.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(c: Elem) -> HahnExpression {
        let f = c.field().clone();
        let mut h = HahnExpression::zero(&f);
        h.add_term(
            Key {
                exp: Rational::zero(),
                a: Vec::new(),
            },
            ExpPolySeq::constant(c),
        );
        h
    }

    pub fn one(field: &Field) -> HahnExpression {
        HahnExpression::constant(field.one())
    }

    /// `z^exp ξ_{(u,a)}`.
    pub fn term(exp: Rational, a: Vec<Rational>, u: ExpPolySeq) -> HahnExpression {
        let f = u.field().clone();
        let mut h = HahnExpression::zero(&f);
        h.add_term(Key { exp, a }, u);
        h
    }

    pub fn from_laurent(l: &LaurentPoly) -> HahnExpression {
        let mut h = HahnExpression::zero(l.field());
        for (k, c) in l.terms() {
            h.add_term(
                Key {
                    exp: Rational::from_integer(BigInt::from(*k)),
                    a: Vec::new(),
                },
                ExpPolySeq::constant(c.clone()),
            );
        }
        h
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn terms(&self) -> &BTreeMap<Key, ExpPolySeq> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, k: Key, u: ExpPolySeq) {
        assert_eq!(
            k.a.len(),
            u.arity(),
            "tuple length differs from sequence arity"
        );
        assert!(
            k.a.iter().all(|x| x.is_positive()),
            "ξ exponents must be positive"
        );
        let s = match self.terms.remove(&k) {
            Some(x) => x.add(&u),
            None => u,
        };
        if !s.is_zero() {
            self.terms.insert(k, s);
        }
    }

    pub fn add(&self, o: &HahnExpression) -> HahnExpression {
        let mut r = self.clone();
        for (k, u) in &o.terms {
            r.add_term(k.clone(), u.clone());
        }
        r
    }

    pub fn neg(&self) -> HahnExpression {
        self.scale(&-&self.field.one())
    }

    pub fn sub(&self, o: &HahnExpression) -> HahnExpression {
        self.add(&o.neg())
    }

    pub fn scale(&self, c: &Elem) -> HahnExpression {
        let mut r = HahnExpression::zero(&self.field);
        for (k, u) in &self.terms {
            r.add_term(k.clone(), u.scale(c));
        }
        r
    }

    /// Multiply by `z^e`.
    pub fn shift(&self, e: &Rational) -> HahnExpression {
        let mut r = HahnExpression::zero(&self.field);
        for (k, u) in &self.terms {
            r.add_term(
                Key {
                    exp: &k.exp + e,
                    a: k.a.clone(),
                },
                u.clone(),
            );
        }
        r
    }

    pub fn mul_laurent(&self, l: &LaurentPoly) -> HahnExpression {
        let mut r = HahnExpression::zero(&self.field);
        for (e, c) in l.terms() {
            r = r.add(
                &self
                    .shift(&Rational::from_integer(BigInt::from(*e)))
                    .scale(c),
            );
        }
        r
    }

    /// `h(z^{1/d})`: exponents and tuples divided by `d`.
    pub fn ramify(&self, d: u64) -> HahnExpression {
        let d = Rational::from_integer(BigInt::from(d));
        let mut r = HahnExpression::zero(&self.field);
        for (k, u) in &self.terms {
            r.add_term(
                Key {
                    exp: &k.exp / &d,
                    a: k.a.iter().map(|x| x / &d).collect(),
                },
                u.clone(),
            );
        }
        r
    }

    /// Split into standard basis elements: `ξ-key ↦ {e ↦ coefficient of z^e}`.
    pub fn decompose(&self) -> BTreeMap<XiKey, BTreeMap<Rational, Elem>> {
        let mut out: BTreeMap<XiKey, BTreeMap<Rational, Elem>> = BTreeMap::new();
        for (k, u) in &self.terms {
            for (t, c) in u.terms() {
                let key = XiKey {
                    a: k.a.clone(),
                    term: t.clone(),
                };
                let slot = out.entry(key).or_default();
                let v = match slot.remove(&k.exp) {
                    Some(x) => &x + c,
                    None => c.clone(),
                };
                if !v.is_zero() {
                    slot.insert(k.exp.clone(), v);
                }
            }
        }
        out.retain(|_, m| !m.is_empty());
        out
    }

    pub fn embed(&self, to: &Field) -> Result<HahnExpression> {
        let mut r = HahnExpression::zero(to);
        for (k, u) in &self.terms {
            r.add_term(k.clone(), u.embed(to)?);
        }
        Ok(r)
    }
}

impl fmt::Display for HahnExpression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (n, (k, u)) in self.terms.iter().enumerate() {
            if n > 0 {
                write!(f, " + ")?;
            }
            let mono = if k.exp.is_zero() {
                None
            } else if k.exp.is_integer() && !k.exp.is_negative() {
                Some(format!("z^{}", k.exp))
            } else {
                Some(format!("z^({})", k.exp))
            };
            if k.a.is_empty() {
                match mono {
                    None => write!(f, "{u}")?,
                    Some(m) => write!(f, "({u})*{m}")?,
                }
            } else {
                if let Some(m) = mono {
                    write!(f, "{m}*")?;
                }
                let a: Vec<String> = k.a.iter().map(|x| format!("{x}")).collect();
                write!(f, "ξ[{u}; {}]", a.join(", "))?;
            }
        }
        Ok(())
    }
}

/// Fix `k_i = v`: the tuple entries after `i` are divided by `p^v` and, for
/// `i > 0`, `a_i/p^v` is absorbed into `a_{i−1}`; for `i = 0` it becomes the
/// monomial `z^{−a_1/p^v}`.
fn slice(p: u64, k: &Key, u: &ExpPolySeq, i: usize, v: i64) -> (Key, ExpPolySeq) {
    let pv = p_pow(p, v);
    let mut exp = k.exp.clone();
    let mut a: Vec<Rational> = Vec::with_capacity(k.a.len() - 1);
    for (r, x) in k.a.iter().enumerate() {
        if r < i {
            a.push(x.clone());
        } else if r == i {
            if i == 0 {
                exp = &exp - &(x / &pv);
            } else {
                let last = a.last_mut().unwrap();
                *last = &*last + &(x / &pv);
            }
        } else {
            a.push(x / &pv);
        }
    }
    (Key { exp, a }, u.slice_at(i, v))
}

/// `k_i ↦ k_i + δ`, dividing `a_i, a_{i+1}, …` by `p^δ`.
fn shift(p: u64, k: &Key, u: &ExpPolySeq, i: usize, delta: i64) -> (Key, ExpPolySeq) {
    let pd = p_pow(p, delta);
    let a =
        k.a.iter()
            .enumerate()
            .map(|(r, x)| if r < i { x.clone() } else { x / &pd })
            .collect();
    (
        Key {
            exp: k.exp.clone(),
            a,
        },
        u.shift_at(i, delta),
    )
}

/// `φ_p`, using `ξ_{(u,a)}(z^p) = z^{−a_1} ξ_{(u_{1,·}, a_{2..})} + ξ_{(u_{·+1}, a)}`.
pub fn xi_phi(e: &HahnExpression, p: u64) -> HahnExpression {
    let pr = Rational::from_integer(BigInt::from(p));
    let mut r = HahnExpression::zero(&e.field);
    for (k, u) in &e.terms {
        let k = Key {
            exp: &k.exp * &pr,
            a: k.a.iter().map(|x| x * &pr).collect(),
        };
        if k.a.is_empty() {
            r.add_term(k, u.clone());
            continue;
        }
        let (ks, us) = slice(p, &k, u, 0, 1);
        r.add_term(ks, us);
        let (kt, ut) = shift(p, &k, u, 0, 1);
        r.add_term(kt, ut);
    }
    r
}

/// `a = p^t a'` with `a'` standard: denominator coprime to `p`, numerator
/// not divisible by `p`.
pub fn standard_exponent(a: &Rational, p: u64) -> (i64, Rational) {
    let pb = BigInt::from(p);
    let pr = Rational::from_integer(pb.clone());
    let mut t = 0;
    let mut x = a.clone();
    loop {
        if !num_integer::Integer::gcd(x.denom(), &pb).is_one() {
            x = &x * &pr;
            t -= 1;
        } else if (x.numer() % &pb).is_zero() {
            x = &x / &pr;
            t += 1;
        } else {
            return (t, x);
        }
    }
}

/// Bring every tuple to standard form (characteristic 0) and merge terms.
/// In positive characteristic only merging happens.
pub fn normalize_xi(e: &HahnExpression, p: u64) -> HahnExpression {
    if e.field.characteristic() != 0 {
        let mut r = HahnExpression::zero(&e.field);
        for (k, u) in &e.terms {
            r.add_term(k.clone(), u.clone());
        }
        return r;
    }
    let mut out = HahnExpression::zero(&e.field);
    let mut work: Vec<(Key, ExpPolySeq, i64)> = e
        .terms
        .iter()
        .map(|(k, u)| (k.clone(), u.clone(), 1))
        .collect();
    while let Some((k, u, sign)) = work.pop() {
        let found = k.a.iter().enumerate().find_map(|(i, x)| {
            let (t, _) = standard_exponent(x, p);
            (t != 0).then_some((i, t))
        });
        let Some((i, t)) = found else {
            out.add_term(k, if sign > 0 { u } else { u.neg() });
            continue;
        };
        let (k2, u2) = shift(p, &k, &u, i, t);
        if t > 0 {
            for v in 1..=t {
                let (ks, us) = slice(p, &k, &u, i, v);
                work.push((ks, us, sign));
            }
        } else {
            for v in 1..=-t {
                let (ks, us) = slice(p, &k2, &u2, i, v);
                work.push((ks, us, -sign));
            }
        }
        work.push((k2, u2, sign));
    }
    out
}

/// Coefficient of `z^γ`, by enumerating index tuples.
pub fn coefficient_at(e: &HahnExpression, p: u64, gamma: &Rational) -> Elem {
    let mut acc = e.field.zero();
    for (k, u) in &e.terms {
        let target = &k.exp - gamma;
        if k.a.is_empty() {
            if target.is_zero() {
                acc = &acc + &u.eval(&[]);
            }
            continue;
        }
        if !target.is_positive() {
            continue;
        }
        let mut idx = Vec::new();
        enumerate(p, &k.a, &target, &mut idx, &mut |ix| {
            acc = &acc + &u.eval(ix)
        });
    }
    acc
}

/// Visit all `(k_1,…,k_s)`, `k_i ≥ 1`, with `Σ a_i / p^{k_1+⋯+k_i} = t`.
fn enumerate(
    p: u64,
    a: &[Rational],
    t: &Rational,
    idx: &mut Vec<i64>,
    visit: &mut dyn FnMut(&[i64]),
) {
    let total: Rational = a.iter().fold(Rational::zero(), |s, x| s + x);
    let a1 = &a[0];
    let mut k = 1;
    loop {
        let pk = p_pow(p, k);
        if &pk * t > total {
            break;
        }
        let head = a1 / &pk;
        if a.len() == 1 {
            if &head == t {
                idx.push(k);
                visit(idx);
                idx.pop();
                break;
            }
        } else if &head < t {
            let rest: Vec<Rational> = a[1..].iter().map(|x| x / &pk).collect();
            idx.push(k);
            enumerate(p, &rest, &(t - &head), idx, visit);
            idx.pop();
        }
        k += 1;
    }
}

/// A solution `h` of `κ h(z^p) − η h(z) = z^e ξ_{(u,a)}` for the three
/// admissible right-hand sides: `e < 0, s = 0`; `e < 0, s ≥ 1`; `e = 0, s ≥ 1`.
pub fn solve_basic(kappa: &Elem, eta: &Elem, key: &Key, u: &ExpPolySeq) -> Result<HahnExpression> {
    let rho = eta.checked_div(kappa)?;
    let inv_eta = eta.inv()?;
    let s = key.a.len();
    let zero = Rational::zero();
    if key.exp.is_positive() || (key.exp.is_zero() && s == 0) {
        return Err(Error::NonNegativeSupport(format!(
            "z^({}) with {s} nested sums",
            key.exp
        )));
    }
    if key.exp < zero {
        let mut a = vec![-&key.exp];
        a.extend(key.a.iter().cloned());
        let v = if s == 0 {
            ExpPolySeq::geometric(&u.eval(&[]) * &inv_eta, rho)
        } else {
            u.prepend(&rho).scale(&inv_eta)
        };
        return Ok(HahnExpression::term(zero, a, v));
    }
    Ok(HahnExpression::term(
        zero,
        key.a.clone(),
        u.partial_sum(&rho)?.scale(&inv_eta),
    ))
}

/// Solve `κ h(z^p) − η h(z) = rhs` termwise.
pub fn solve_expression(kappa: &Elem, eta: &Elem, rhs: &HahnExpression) -> Result<HahnExpression> {
    let mut h = HahnExpression::zero(&rhs.field);
    for (k, u) in &rhs.terms {
        h = h.add(&solve_basic(kappa, eta, k, u)?);
    }
    Ok(h)
}

/// Square matrix of Hahn expressions.
pub type HahnMatrix = Vec<Vec<HahnExpression>>;

/// Unitriangular `H` with `φ_p(H) C = Θ H`, `C` the constant term of the
/// upper triangular `Θ`.
pub fn compute_h(theta: &LaurentMatrix, p: u64) -> Result<HahnMatrix> {
    let m = theta.rows();
    let f = theta.field();
    let c = theta.coeff(0);
    for i in 0..m {
        for j in 0..i {
            if !theta.entry(i, j).is_zero() {
                return Err(Error::NotAdmissible(String::from(
                    "Θ is not upper triangular",
                )));
            }
        }
        if !theta
            .entry(i, i)
            .as_constant()
            .is_some_and(|x| !x.is_zero())
        {
            return Err(Error::NotAdmissible(String::from(
                "Θ has a non-constant or zero diagonal entry",
            )));
        }
    }
    let mut h: HahnMatrix = (0..m)
        .map(|i| {
            (0..m)
                .map(|j| {
                    if i == j {
                        HahnExpression::one(f)
                    } else {
                        HahnExpression::zero(f)
                    }
                })
                .collect()
        })
        .collect();
    for j in 1..m {
        for i in (0..j).rev() {
            let mut rhs = HahnExpression::from_laurent(
                &theta
                    .entry(i, j)
                    .sub(&LaurentPoly::constant(c[(i, j)].clone())),
            );
            for (k, hk) in h.iter().enumerate().take(j).skip(i + 1) {
                rhs = rhs.add(&hk[j].mul_laurent(&theta.entry(i, k)));
            }
            for l in i + 1..j {
                rhs = rhs.sub(&xi_phi(&h[i][l], p).scale(&c[(l, j)]));
            }
            let rhs = normalize_xi(&rhs, p);
            h[i][j] = normalize_xi(&solve_expression(&c[(j, j)], &c[(i, i)], &rhs)?, p);
        }
    }
    Ok(h)
}

/// `φ_p(H) C − Θ H`, normalized; zero exactly when `H` is correct.
pub fn h_residual(h: &HahnMatrix, theta: &LaurentMatrix, p: u64) -> HahnMatrix {
    let m = h.len();
    let f = theta.field();
    let c = theta.coeff(0);
    let ph: HahnMatrix = h
        .iter()
        .map(|row| row.iter().map(|x| xi_phi(x, p)).collect())
        .collect();
    (0..m)
        .map(|i| {
            (0..m)
                .map(|j| {
                    let mut r = HahnExpression::zero(f);
                    for k in 0..m {
                        r = r.add(&ph[i][k].scale(&c[(k, j)]));
                        r = r.sub(&h[k][j].mul_laurent(&theta.entry(i, k)));
                    }
                    normalize_xi(&r, p)
                })
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::rat;
    use crate::linalg::Mat;

    fn q() -> Field {
        Field::rationals()
    }

    fn r(n: i64, d: i64) -> Rational {
        rat(n, d)
    }

    #[test]
    fn partial_sums() {
        let f = q();
        let one = ExpPolySeq::geometric(f.one(), f.one());
        let s = one.partial_sum(&f.one()).unwrap();
        for l in 1..8 {
            assert_eq!(s.eval(&[l]), f.from_int(l - 1));
        }
        let k = ExpPolySeq::monomial(&f, f.one(), vec![1], vec![f.one()]);
        let s = k.partial_sum(&f.one()).unwrap();
        for l in 1..8 {
            assert_eq!(s.eval(&[l]), f.from_int(l * (l - 1) / 2));
        }
        let lam = f.from_int(3);
        let th = f.from_int(-2);
        let g = ExpPolySeq::geometric(f.one(), lam.clone());
        let s = g.partial_sum(&th).unwrap();
        for l in 1..7 {
            let direct = (1..l).fold(f.zero(), |acc, k| {
                &acc + &(&lam.pow(k).unwrap() * &th.pow(l - k).unwrap())
            });
            assert_eq!(s.eval(&[l]), direct);
        }
    }

    #[test]
    fn rudin_shapiro_h() {
        let f = q();
        let rhs = HahnExpression::from_laurent(&LaurentPoly::monomial(f.one(), -1));
        let (k, u) = rhs.terms().iter().next().unwrap();
        let h = solve_basic(&f.from_rational(&r(-1, 2)).unwrap(), &f.one(), k, u).unwrap();
        assert_eq!(format!("{h}"), "ξ[(-2)^k1; 1]");
        assert_eq!(coefficient_at(&h, 2, &r(-1, 4)), f.from_int(4));
        assert!(coefficient_at(&h, 2, &r(-1, 3)).is_zero());
        let check = xi_phi(&h, 2)
            .scale(&f.from_rational(&r(-1, 2)).unwrap())
            .sub(&h);
        assert_eq!(normalize_xi(&check, 2), rhs);
    }

    #[test]
    fn phi_of_plain_sum() {
        let f = q();
        let h = HahnExpression::term(
            Rational::zero(),
            vec![r(1, 1)],
            ExpPolySeq::geometric(f.one(), f.one()),
        );
        let d = xi_phi(&h, 2).sub(&h);
        assert_eq!(
            d,
            HahnExpression::from_laurent(&LaurentPoly::monomial(f.one(), -1))
        );
    }

    #[test]
    fn standardization_preserves_coefficients() {
        let f = q();
        let u = ExpPolySeq::monomial(&f, f.one(), vec![1, 0], vec![f.from_int(2), f.from_int(-1)]);
        let h = HahnExpression::term(r(-1, 1), vec![r(4, 3), r(1, 2)], u);
        let n = normalize_xi(&h, 2);
        for k in n.terms().keys() {
            assert!(k.a.iter().all(|x| standard_exponent(x, 2).0 == 0));
        }
        for num in 1..60 {
            let g = r(-num, 24);
            assert_eq!(
                coefficient_at(&h, 2, &g),
                coefficient_at(&n, 2, &g),
                "at {g}"
            );
        }
    }

    #[test]
    fn coefficient_of_double_sum() {
        let f = q();
        let u = ExpPolySeq::monomial(&f, f.one(), vec![1, 1], vec![f.one(), f.one()]);
        let h = HahnExpression::term(
            Rational::zero(),
            vec![r(1, 1), r(1, 1)],
            u.add(&ExpPolySeq::monomial(
                &f,
                f.from_int(3),
                vec![0, 0],
                vec![f.one(), f.one()],
            )),
        );
        assert_eq!(coefficient_at(&h, 2, &r(-3, 4)), f.from_int(4));
    }

    #[test]
    fn h_of_rudin_shapiro_theta() {
        let f = q();
        let t = LaurentMatrix::new(
            &f,
            2,
            2,
            [
                (
                    0,
                    Mat::from_rows(
                        &f,
                        vec![
                            vec![f.one(), f.from_int(-1)],
                            vec![f.zero(), f.from_rational(&r(-1, 2)).unwrap()],
                        ],
                    )
                    .unwrap(),
                ),
                (-1, Mat::from_ints(&f, &[&[0, 1], &[0, 0]])),
            ],
        );
        let h = compute_h(&t, 2).unwrap();
        assert_eq!(format!("{}", h[0][1]), "ξ[(-2)^k1; 1]");
        assert!(h_residual(&h, &t, 2)
            .iter()
            .flatten()
            .all(HahnExpression::is_zero));
    }
}
