//! Dense univariate polynomials over a [`Field`].

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::fields::{Elem, Field};

/// Coefficients low to high with no trailing zeros.
#[derive(Clone, PartialEq, Eq)]
pub struct Poly {
    field: Field,
    coeffs: Vec<Elem>,
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.display("x"))
    }
}

impl Poly {
    pub fn new(field: &Field, mut coeffs: Vec<Elem>) -> Poly {
        while coeffs.last().is_some_and(Elem::is_zero) {
            coeffs.pop();
        }
        Poly {
            field: field.clone(),
            coeffs,
        }
    }

    pub fn from_ints(field: &Field, c: &[i64]) -> Poly {
        Poly::new(field, c.iter().map(|&x| field.from_int(x)).collect())
    }

    pub fn zero(field: &Field) -> Poly {
        Poly {
            field: field.clone(),
            coeffs: Vec::new(),
        }
    }

    pub fn constant(c: Elem) -> Poly {
        let f = c.field().clone();
        Poly::new(&f, vec![c])
    }

    pub fn one(field: &Field) -> Poly {
        Poly::constant(field.one())
    }

    /// `c · x^k`.
    pub fn monomial(c: Elem, k: usize) -> Poly {
        let f = c.field().clone();
        let mut v = vec![f.zero(); k];
        v.push(c);
        Poly::new(&f, v)
    }

    pub fn x(field: &Field) -> Poly {
        Poly::monomial(field.one(), 1)
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn coeffs(&self) -> &[Elem] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Elem {
        self.coeffs
            .get(k)
            .cloned()
            .unwrap_or_else(|| self.field.zero())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn lead(&self) -> Option<&Elem> {
        self.coeffs.last()
    }

    /// Index of the lowest nonzero coefficient.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn add(&self, o: &Poly) -> Poly {
        let n = self.coeffs.len().max(o.coeffs.len());
        Poly::new(
            &self.field,
            (0..n).map(|i| &self.coeff(i) + &o.coeff(i)).collect(),
        )
    }

    pub fn sub(&self, o: &Poly) -> Poly {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Poly {
        Poly {
            field: self.field.clone(),
            coeffs: self.coeffs.iter().map(Elem::neg).collect(),
        }
    }

    pub fn scale(&self, c: &Elem) -> Poly {
        Poly::new(&self.field, self.coeffs.iter().map(|x| x * c).collect())
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::zero(&self.field);
        }
        let mut r = vec![self.field.zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                r[i + j] = &r[i + j] + &(a * b);
            }
        }
        Poly::new(&self.field, r)
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut acc = Poly::one(&self.field);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Multiply by `x^k`.
    pub fn shift(&self, k: usize) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        let mut v = vec![self.field.zero(); k];
        v.extend(self.coeffs.iter().cloned());
        Poly {
            field: self.field.clone(),
            coeffs: v,
        }
    }

    /// Divide by `x^k`, dropping the low coefficients.
    pub fn unshift(&self, k: usize) -> Poly {
        Poly::new(&self.field, self.coeffs.iter().skip(k).cloned().collect())
    }

    pub fn divrem(&self, d: &Poly) -> Result<(Poly, Poly)> {
        let dd = d.degree().ok_or(Error::DivisionByZero)?;
        let inv = d.coeffs[dd].inv()?;
        let mut r = self.coeffs.clone();
        if r.len() <= dd {
            return Ok((Poly::zero(&self.field), self.clone()));
        }
        let mut q = vec![self.field.zero(); r.len() - dd];
        for k in (0..q.len()).rev() {
            let c = &r[k + dd] * &inv;
            if !c.is_zero() {
                for (j, y) in d.coeffs.iter().enumerate() {
                    r[k + j] = &r[k + j] - &(&c * y);
                }
            }
            q[k] = c;
        }
        r.truncate(dd);
        Ok((Poly::new(&self.field, q), Poly::new(&self.field, r)))
    }

    pub fn rem(&self, d: &Poly) -> Result<Poly> {
        Ok(self.divrem(d)?.1)
    }

    /// Exact quotient; errors when the division leaves a remainder.
    pub fn exact_div(&self, d: &Poly) -> Result<Poly> {
        let (q, r) = self.divrem(d)?;
        if r.is_zero() {
            Ok(q)
        } else {
            Err(Error::Malformed(alloc::string::String::from(
                "inexact polynomial division",
            )))
        }
    }

    pub fn monic(&self) -> Poly {
        match self.lead() {
            None => self.clone(),
            Some(l) => self.scale(&l.inv().unwrap()),
        }
    }

    /// Monic gcd (zero when both are zero).
    pub fn gcd(&self, o: &Poly) -> Poly {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.rem(&b).unwrap();
            a = b;
            b = r;
        }
        a.monic()
    }

    /// `(g, s, t)` with `s·self + t·o = g` and `g` the (non-normalized) gcd.
    pub fn ext_gcd(&self, o: &Poly) -> Result<(Poly, Poly, Poly)> {
        let f = &self.field;
        let (mut r0, mut r1) = (self.clone(), o.clone());
        let (mut s0, mut s1) = (Poly::one(f), Poly::zero(f));
        let (mut t0, mut t1) = (Poly::zero(f), Poly::one(f));
        while !r1.is_zero() {
            let (q, r) = r0.divrem(&r1)?;
            let s = s0.sub(&q.mul(&s1));
            let t = t0.sub(&q.mul(&t1));
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s;
            t0 = t1;
            t1 = t;
        }
        Ok((r0, s0, t0))
    }

    pub fn eval(&self, x: &Elem) -> Elem {
        self.coeffs
            .iter()
            .rev()
            .fold(self.field.zero(), |acc, c| &(&acc * x) + c)
    }

    pub fn derivative(&self) -> Poly {
        Poly::new(
            &self.field,
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * &self.field.from_int(k as i64))
                .collect(),
        )
    }

    /// `p(x^e)`.
    pub fn compose_power(&self, e: usize) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        let mut v = vec![self.field.zero(); (self.coeffs.len() - 1) * e + 1];
        for (k, c) in self.coeffs.iter().enumerate() {
            v[k * e] = c.clone();
        }
        Poly::new(&self.field, v)
    }

    /// `p(x + c)`.
    pub fn taylor_shift(&self, c: &Elem) -> Poly {
        let lin = Poly::new(&self.field, vec![c.clone(), self.field.one()]);
        self.coeffs
            .iter()
            .rev()
            .fold(Poly::zero(&self.field), |acc, a| {
                acc.mul(&lin).add(&Poly::constant(a.clone()))
            })
    }

    /// Apply `g` coefficientwise, landing in field `to`.
    pub fn map(&self, to: &Field, g: impl Fn(&Elem) -> Result<Elem>) -> Result<Poly> {
        Ok(Poly::new(
            to,
            self.coeffs.iter().map(g).collect::<Result<Vec<_>>>()?,
        ))
    }

    /// Move into an extension of the coefficient field.
    pub fn embed(&self, to: &Field) -> Result<Poly> {
        self.map(to, |c| to.embed(c))
    }

    pub fn display(&self, var: &str) -> alloc::string::String {
        use alloc::string::String;
        use core::fmt::Write;
        if self.is_zero() {
            return String::from("0");
        }
        let mut s = String::new();
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.looks_negative();
            let a = if neg { c.neg() } else { c.clone() };
            if s.is_empty() {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            let coef = if a.is_atomic() {
                alloc::format!("{a}")
            } else {
                alloc::format!("({a})")
            };
            match k {
                0 => {
                    let _ = write!(s, "{coef}");
                }
                _ => {
                    if !a.is_one() {
                        let _ = write!(s, "{coef}*");
                    }
                    let _ = write!(s, "{var}");
                    if k > 1 {
                        let _ = write!(s, "^{k}");
                    }
                }
            }
        }
        s
    }
}
