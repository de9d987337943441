//! The constant algebra spanned by `e_c ℓ^{[k]}` with
//! `φ_p(e_c ℓ^{[k]}) = c e_c (ℓ^{[k]} + ℓ^{[k−1]})`, `e_1 = 1`, and the
//! matrix `e_C` with `φ_p(e_C) = e_C C`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::fields::{find_roots, Elem, Field};
use crate::linalg::Mat;
use crate::poly::Poly;

/// Finite combination of `e_c ℓ^{[k]}`.
#[derive(Clone, PartialEq, Eq)]
pub struct ConstElem {
    field: Field,
    terms: BTreeMap<(Elem, usize), Elem>,
}

impl fmt::Debug for ConstElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl ConstElem {
    pub fn zero(field: &Field) -> ConstElem {
        ConstElem {
            field: field.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn scalar(c: Elem) -> ConstElem {
        let f = c.field().clone();
        ConstElem::basis(&f, f.one(), 0).scale(&c)
    }

    pub fn one(field: &Field) -> ConstElem {
        ConstElem::basis(field, field.one(), 0)
    }

    /// `e_c ℓ^{[k]}`.
    pub fn basis(field: &Field, c: Elem, k: usize) -> ConstElem {
        let mut r = ConstElem::zero(field);
        r.add_term(c, k, field.one());
        r
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    /// `(c, k) ↦ coefficient`.
    pub fn terms(&self) -> &BTreeMap<(Elem, usize), Elem> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, c: Elem, k: usize, x: Elem) {
        assert!(!c.is_zero(), "e_0 is not a basis element");
        if x.is_zero() {
            return;
        }
        let key = (c, k);
        let v = match self.terms.remove(&key) {
            Some(y) => &y + &x,
            None => x,
        };
        if !v.is_zero() {
            self.terms.insert(key, v);
        }
    }

    pub fn add(&self, o: &ConstElem) -> ConstElem {
        let mut r = self.clone();
        for ((c, k), x) in &o.terms {
            r.add_term(c.clone(), *k, x.clone());
        }
        r
    }

    pub fn sub(&self, o: &ConstElem) -> ConstElem {
        self.add(&o.scale(&-&self.field.one()))
    }

    pub fn scale(&self, s: &Elem) -> ConstElem {
        let mut r = ConstElem::zero(&self.field);
        for ((c, k), x) in &self.terms {
            r.add_term(c.clone(), *k, x * s);
        }
        r
    }

    /// Product, defined when every pair of terms has a trivial exponential or
    /// a trivial logarithmic factor on one side.
    pub fn mul(&self, o: &ConstElem) -> Result<ConstElem> {
        let mut r = ConstElem::zero(&self.field);
        for ((c1, k1), x1) in &self.terms {
            for ((c2, k2), x2) in &o.terms {
                if !(c1.is_one() || c2.is_one()) || (*k1 > 0 && *k2 > 0) {
                    return Err(Error::ConstantProduct);
                }
                r.add_term(c1 * c2, k1 + k2, x1 * x2);
            }
        }
        Ok(r)
    }

    pub fn phi(&self) -> ConstElem {
        let mut r = ConstElem::zero(&self.field);
        for ((c, k), x) in &self.terms {
            let y = x * c;
            r.add_term(c.clone(), *k, y.clone());
            if *k > 0 {
                r.add_term(c.clone(), k - 1, y);
            }
        }
        r
    }

    pub fn embed(&self, to: &Field) -> Result<ConstElem> {
        let mut r = ConstElem::zero(to);
        for ((c, k), x) in &self.terms {
            r.add_term(to.embed(c)?, *k, to.embed(x)?);
        }
        Ok(r)
    }
}

/// Display name of `e_c ℓ^{[k]}`, empty for `e_1 ℓ^{[0]}`.
pub fn basis_name(c: &Elem, k: usize) -> String {
    let mut parts: Vec<String> = Vec::new();
    if !c.is_one() {
        if c.is_atomic() && !c.looks_negative() {
            parts.push(format!("e_{c}"));
        } else {
            parts.push(format!("e_({c})"));
        }
    }
    if k > 0 {
        parts.push(format!("l^[{k}]"));
    }
    parts.join("*")
}

impl fmt::Display for ConstElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        // Pure constants last, matching the usual reading order.
        let mut items: Vec<(&(Elem, usize), &Elem)> = self.terms.iter().collect();
        items.sort_by_key(|((c, k), _)| (c.is_one() && *k == 0, k.wrapping_neg()));
        for (n, ((c, k), x)) in items.into_iter().enumerate() {
            let neg = x.looks_negative();
            let a = if neg { -x } else { x.clone() };
            match (n, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let name = basis_name(c, *k);
            if name.is_empty() {
                write!(f, "{a}")?;
            } else if a.is_one() {
                write!(f, "{name}")?;
            } else if a.is_atomic() {
                write!(f, "{a}*{name}")?;
            } else {
                write!(f, "({a})*{name}")?;
            }
        }
        Ok(())
    }
}

/// Square matrix of constants.
pub type ConstMatrix = Vec<Vec<ConstElem>>;

pub fn const_matrix_mul(a: &ConstMatrix, b: &ConstMatrix, field: &Field) -> Result<ConstMatrix> {
    let n = a.len();
    let m = b.first().map_or(0, Vec::len);
    let mut r = vec![vec![ConstElem::zero(field); m]; n];
    for i in 0..n {
        for j in 0..m {
            for (k, bk) in b.iter().enumerate() {
                r[i][j] = r[i][j].add(&a[i][k].mul(&bk[j])?);
            }
        }
    }
    Ok(r)
}

pub fn const_matrix_phi(a: &ConstMatrix) -> ConstMatrix {
    a.iter()
        .map(|row| row.iter().map(ConstElem::phi).collect())
        .collect()
}

/// `e_C C` for a scalar matrix `C`.
pub fn const_matrix_mul_scalar(a: &ConstMatrix, c: &Mat<Elem>) -> ConstMatrix {
    let f = c.field();
    (0..a.len())
        .map(|i| {
            (0..c.cols())
                .map(|j| {
                    (0..c.rows()).fold(ConstElem::zero(f), |acc, k| {
                        acc.add(&a[i][k].scale(&c[(k, j)]))
                    })
                })
                .collect()
        })
        .collect()
}

/// Multiplicative Dunford decomposition `C = D U`, `D` diagonalizable, `U`
/// unipotent, with the spectral projectors of `D`.
#[derive(Clone, Debug)]
pub struct Dunford {
    pub field: Field,
    pub eigen: Vec<(Elem, Mat<Elem>)>,
    pub d: Mat<Elem>,
    pub u: Mat<Elem>,
}

fn eval_matrix_poly(q: &Poly, c: &Mat<Elem>) -> Mat<Elem> {
    let f = c.field();
    let n = c.rows();
    q.coeffs().iter().rev().fold(Mat::zeros(f, n, n), |acc, x| {
        acc.mul(c).add(&Mat::identity(f, n).scale(x))
    })
}

pub fn dunford(c: &Mat<Elem>) -> Result<Dunford> {
    if !c.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "constant matrix is {}×{}",
            c.rows(),
            c.cols()
        )));
    }
    let n = c.rows();
    let (field, spectrum) = if c.is_upper_triangular() {
        let mut s: Vec<(Elem, usize)> = Vec::new();
        for i in 0..n {
            let x = &c[(i, i)];
            match s.iter_mut().find(|(y, _)| y == x) {
                Some(e) => e.1 += 1,
                None => s.push((x.clone(), 1)),
            }
        }
        (c.field().clone(), s)
    } else {
        let r = find_roots(&c.charpoly())?;
        (r.field, r.roots)
    };
    let c = c.embed(&field)?;
    if spectrum.iter().any(|(x, _)| x.is_zero()) {
        return Err(Error::Singular);
    }
    let x = Poly::x(&field);
    let factor = |l: &Elem, m: usize| x.sub(&Poly::constant(l.clone())).pow(m as u32);
    let mut eigen = Vec::new();
    for (i, (l, m)) in spectrum.iter().enumerate() {
        let others = spectrum
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .fold(Poly::one(&field), |acc, (_, (l2, m2))| {
                acc.mul(&factor(l2, *m2))
            });
        let (g, s, _) = others.ext_gcd(&factor(l, *m))?;
        let g0 = g.coeff(0);
        let e = s.mul(&others).scale(&g0.inv()?);
        eigen.push((l.clone(), eval_matrix_poly(&e, &c)));
    }
    let d = eigen.iter().fold(Mat::zeros(&field, n, n), |acc, (l, pi)| {
        acc.add(&pi.scale(l))
    });
    let u = d.inverse()?.mul(&c);
    Ok(Dunford { field, eigen, d, u })
}

/// `e_C = e_D e_U` with `e_D = Σ e_λ π_λ` and `e_U = Σ_k ℓ^{[k]} (U − I)^k`.
/// Returns the field the entries live in.
pub fn exp_constant(c: &Mat<Elem>) -> Result<(Field, ConstMatrix)> {
    let dn = dunford(c)?;
    let f = &dn.field;
    let n = c.rows();
    let mut ed = vec![vec![ConstElem::zero(f); n]; n];
    for (l, pi) in &dn.eigen {
        for i in 0..n {
            for j in 0..n {
                ed[i][j].add_term(l.clone(), 0, pi[(i, j)].clone());
            }
        }
    }
    let nil = dn.u.sub(&Mat::identity(f, n));
    let mut eu = vec![vec![ConstElem::zero(f); n]; n];
    let mut pw: Mat<Elem> = Mat::identity(f, n);
    for k in 0..n {
        if pw.is_zero() {
            break;
        }
        for i in 0..n {
            for j in 0..n {
                eu[i][j].add_term(f.one(), k, pw[(i, j)].clone());
            }
        }
        pw = pw.mul(&nil);
    }
    Ok((f.clone(), const_matrix_mul(&ed, &eu, f)?))
}
