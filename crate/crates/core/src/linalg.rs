//! Dense exact linear algebra and the lattice of subspaces of `K^N`.
//!
//! Vectors of a [`Subspace`] are rows; matrices act on column vectors, so
//! the image of a subspace under `M` is spanned by the rows of `B·Mᵀ`.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed};

use crate::error::{Error, Result};
use crate::fields::{Elem, Field};
use crate::poly::Poly;
use crate::series::RationalFunction;

/// Entries of a [`Mat`]: field elements or rational functions over a field.
pub trait Scalar: Clone + PartialEq + fmt::Debug {
    fn zero_in(field: &Field) -> Self;
    fn one_in(field: &Field) -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn inv(&self) -> Result<Self>;
}

impl Scalar for Elem {
    fn zero_in(field: &Field) -> Self {
        field.zero()
    }
    fn one_in(field: &Field) -> Self {
        field.one()
    }
    fn is_zero(&self) -> bool {
        Elem::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        Elem::neg(self)
    }
    fn inv(&self) -> Result<Self> {
        Elem::inv(self)
    }
}

impl Scalar for RationalFunction {
    fn zero_in(field: &Field) -> Self {
        RationalFunction::zero(field)
    }
    fn one_in(field: &Field) -> Self {
        RationalFunction::one(field)
    }
    fn is_zero(&self) -> bool {
        RationalFunction::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        RationalFunction::add(self, o)
    }
    fn sub(&self, o: &Self) -> Self {
        RationalFunction::sub(self, o)
    }
    fn mul(&self, o: &Self) -> Self {
        RationalFunction::mul(self, o)
    }
    fn neg(&self) -> Self {
        RationalFunction::neg(self)
    }
    fn inv(&self) -> Result<Self> {
        RationalFunction::inv(self)
    }
}

/// Row-major dense matrix.
#[derive(Clone, PartialEq)]
pub struct Mat<T: Scalar = Elem> {
    field: Field,
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> fmt::Debug for Mat<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{:?}", self[(i, j)])?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

impl<T: Scalar> core::ops::Index<(usize, usize)> for Mat<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T: Scalar> core::ops::IndexMut<(usize, usize)> for Mat<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

fn dims(msg: &str) -> Error {
    Error::DimensionMismatch(String::from(msg))
}

impl<T: Scalar> Mat<T> {
    pub fn zeros(field: &Field, rows: usize, cols: usize) -> Mat<T> {
        Mat {
            field: field.clone(),
            rows,
            cols,
            data: vec![T::zero_in(field); rows * cols],
        }
    }

    pub fn identity(field: &Field, n: usize) -> Mat<T> {
        let mut m = Mat::zeros(field, n, n);
        for i in 0..n {
            m[(i, i)] = T::one_in(field);
        }
        m
    }

    pub fn from_rows(field: &Field, rows: Vec<Vec<T>>) -> Result<Mat<T>> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(dims("ragged rows"));
        }
        Ok(Mat {
            field: field.clone(),
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn from_fn(
        field: &Field,
        rows: usize,
        cols: usize,
        f: impl Fn(usize, usize) -> T,
    ) -> Mat<T> {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Mat {
            field: field.clone(),
            rows,
            cols,
            data,
        }
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_cols(field: &Field, n: usize, cols: &[Vec<T>]) -> Mat<T> {
        Mat::from_fn(field, n, cols.len(), |i, j| cols[j][i].clone())
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

    pub fn row(&self, i: usize) -> Vec<T> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn col(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(T::is_zero)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn transpose(&self) -> Mat<T> {
        Mat::from_fn(&self.field, self.cols, self.rows, |i, j| {
            self[(j, i)].clone()
        })
    }

    pub fn add(&self, o: &Mat<T>) -> Mat<T> {
        assert!(
            self.rows == o.rows && self.cols == o.cols,
            "matrix sum dimension mismatch"
        );
        Mat {
            field: self.field.clone(),
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&o.data)
                .map(|(a, b)| a.add(b))
                .collect(),
        }
    }

    pub fn sub(&self, o: &Mat<T>) -> Mat<T> {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Mat<T> {
        Mat {
            field: self.field.clone(),
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(T::neg).collect(),
        }
    }

    pub fn scale(&self, c: &T) -> Mat<T> {
        Mat {
            field: self.field.clone(),
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x.mul(c)).collect(),
        }
    }

    pub fn mul(&self, o: &Mat<T>) -> Mat<T> {
        assert_eq!(self.cols, o.rows, "matrix product dimension mismatch");
        let mut r: Mat<T> = Mat::zeros(&self.field, self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let b = &o[(k, j)];
                    if !b.is_zero() {
                        r[(i, j)] = r[(i, j)].add(&a.mul(b));
                    }
                }
            }
        }
        r
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        (0..self.rows)
            .map(|i| {
                (0..self.cols).fold(T::zero_in(&self.field), |acc, j| {
                    if v[j].is_zero() {
                        acc
                    } else {
                        acc.add(&self[(i, j)].mul(&v[j]))
                    }
                })
            })
            .collect()
    }

    pub fn hstack(&self, o: &Mat<T>) -> Mat<T> {
        assert_eq!(self.rows, o.rows, "hstack dimension mismatch");
        Mat::from_fn(&self.field, self.rows, self.cols + o.cols, |i, j| {
            if j < self.cols {
                self[(i, j)].clone()
            } else {
                o[(i, j - self.cols)].clone()
            }
        })
    }

    pub fn vstack(&self, o: &Mat<T>) -> Mat<T> {
        assert_eq!(self.cols, o.cols, "vstack dimension mismatch");
        let mut data = self.data.clone();
        data.extend(o.data.iter().cloned());
        Mat {
            field: self.field.clone(),
            rows: self.rows + o.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn submatrix(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> Mat<T> {
        Mat::from_fn(&self.field, r1 - r0, c1 - c0, |i, j| {
            self[(r0 + i, c0 + j)].clone()
        })
    }

    pub fn set_block(&mut self, r0: usize, c0: usize, b: &Mat<T>) {
        for i in 0..b.rows {
            for j in 0..b.cols {
                self[(r0 + i, c0 + j)] = b[(i, j)].clone();
            }
        }
    }

    pub fn map<U: Scalar>(&self, to: &Field, f: impl Fn(&T) -> Result<U>) -> Result<Mat<U>> {
        Ok(Mat {
            field: to.clone(),
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect::<Result<_>>()?,
        })
    }

    pub fn entries(&self) -> &[T] {
        &self.data
    }

    /// Reduced row echelon form without zero rows, and the pivot columns.
    pub fn rref(&self) -> (Mat<T>, Vec<usize>) {
        let mut a = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..a.cols {
            if r == a.rows {
                break;
            }
            let Some(p) = (r..a.rows).find(|&i| !a[(i, c)].is_zero()) else {
                continue;
            };
            a.swap_rows(r, p);
            let inv = a[(r, c)].inv().unwrap();
            for j in c..a.cols {
                a[(r, j)] = a[(r, j)].mul(&inv);
            }
            for i in 0..a.rows {
                if i != r && !a[(i, c)].is_zero() {
                    let f = a[(i, c)].clone();
                    for j in c..a.cols {
                        let t = a[(r, j)].mul(&f);
                        if !t.is_zero() {
                            a[(i, j)] = a[(i, j)].sub(&t);
                        }
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        a.data.truncate(r * a.cols);
        a.rows = r;
        (a, pivots)
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        if i != j {
            for c in 0..self.cols {
                self.data.swap(i * self.cols + c, j * self.cols + c);
            }
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of `{v : M v = 0}` as vectors, one per free column in increasing order.
    pub fn kernel_vectors(&self) -> Vec<Vec<T>> {
        let (r, pivots) = self.rref();
        let mut out = Vec::new();
        let mut pi = 0;
        for f in 0..self.cols {
            if pi < pivots.len() && pivots[pi] == f {
                pi += 1;
                continue;
            }
            let mut v = vec![T::zero_in(&self.field); self.cols];
            v[f] = T::one_in(&self.field);
            for (i, &pc) in pivots.iter().enumerate() {
                v[pc] = r[(i, f)].neg();
            }
            out.push(v);
        }
        out
    }

    pub fn inverse(&self) -> Result<Mat<T>> {
        if !self.is_square() {
            return Err(dims("inverse of a non-square matrix"));
        }
        let n = self.rows;
        let aug = self.hstack(&Mat::identity(&self.field, n));
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return Err(Error::Singular);
        }
        Ok(r.submatrix(0, n, n, 2 * n))
    }

    pub fn det(&self) -> T {
        assert!(self.is_square(), "determinant of a non-square matrix");
        let mut a = self.clone();
        let n = self.rows;
        let mut det = T::one_in(&self.field);
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| !a[(i, c)].is_zero()) else {
                return T::zero_in(&self.field);
            };
            if p != c {
                a.swap_rows(p, c);
                det = det.neg();
            }
            let piv = a[(c, c)].clone();
            det = det.mul(&piv);
            let inv = piv.inv().unwrap();
            for i in c + 1..n {
                if a[(i, c)].is_zero() {
                    continue;
                }
                let f = a[(i, c)].mul(&inv);
                for j in c..n {
                    let t = a[(c, j)].mul(&f);
                    a[(i, j)] = a[(i, j)].sub(&t);
                }
            }
        }
        det
    }
}

impl Mat<Elem> {
    pub fn from_ints(field: &Field, rows: &[&[i64]]) -> Mat<Elem> {
        Mat::from_rows(
            field,
            rows.iter()
                .map(|r| r.iter().map(|&x| field.from_int(x)).collect())
                .collect(),
        )
        .unwrap()
    }

    pub fn embed(&self, to: &Field) -> Result<Mat<Elem>> {
        self.map(to, |x| to.embed(x))
    }

    /// Is the matrix upper triangular?
    pub fn is_upper_triangular(&self) -> bool {
        (0..self.rows).all(|i| (0..i.min(self.cols)).all(|j| self[(i, j)].is_zero()))
    }

    /// Characteristic polynomial `det(x I − M)` via Hessenberg reduction.
    pub fn charpoly(&self) -> Poly {
        assert!(
            self.is_square(),
            "characteristic polynomial of a non-square matrix"
        );
        let n = self.rows;
        let f = self.field.clone();
        let mut h = self.clone();
        for j in 0..n.saturating_sub(2) {
            let Some(i) = (j + 1..n).find(|&i| !h[(i, j)].is_zero()) else {
                continue;
            };
            if i != j + 1 {
                h.swap_rows(i, j + 1);
                for r in 0..n {
                    h.data.swap(r * n + i, r * n + j + 1);
                }
            }
            let inv = h[(j + 1, j)].inv().unwrap();
            for k in j + 2..n {
                if h[(k, j)].is_zero() {
                    continue;
                }
                let t = &h[(k, j)] * &inv;
                for c in 0..n {
                    let v = &h[(k, c)] - &(&t * &h[(j + 1, c)]);
                    h[(k, c)] = v;
                }
                for r in 0..n {
                    let v = &h[(r, j + 1)] + &(&t * &h[(r, k)]);
                    h[(r, j + 1)] = v;
                }
            }
        }
        let x = Poly::x(&f);
        let mut p: Vec<Poly> = vec![Poly::one(&f)];
        for k in 0..n {
            let mut pk = x.sub(&Poly::constant(h[(k, k)].clone())).mul(&p[k]);
            let mut prod = f.one();
            for i in (0..k).rev() {
                prod = &prod * &h[(i + 1, i)];
                if prod.is_zero() {
                    break;
                }
                pk = pk.sub(&p[i].scale(&(&prod * &h[(i, k)])));
            }
            p.push(pk);
        }
        p.pop().unwrap()
    }
}

/// Subspace of `K^N` held as a canonical RREF basis (rows).
#[derive(Clone, PartialEq)]
pub struct Subspace {
    ambient: usize,
    basis: Mat<Elem>,
    pivots: Vec<usize>,
}

impl fmt::Debug for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "span{:?}", self.basis)
    }
}

impl Subspace {
    pub fn zero(field: &Field, n: usize) -> Subspace {
        Subspace {
            ambient: n,
            basis: Mat::zeros(field, 0, n),
            pivots: Vec::new(),
        }
    }

    pub fn full(field: &Field, n: usize) -> Subspace {
        Subspace {
            ambient: n,
            basis: Mat::identity(field, n),
            pivots: (0..n).collect(),
        }
    }

    /// Row space of `m`.
    pub fn row_space(m: &Mat<Elem>) -> Subspace {
        let (basis, pivots) = m.rref();
        Subspace {
            ambient: m.cols(),
            basis,
            pivots,
        }
    }

    /// Column space of `m`.
    pub fn column_space(m: &Mat<Elem>) -> Subspace {
        Subspace::row_space(&m.transpose())
    }

    pub fn span(field: &Field, n: usize, vectors: &[Vec<Elem>]) -> Subspace {
        Subspace::row_space(&Mat::from_fn(field, vectors.len(), n, |i, j| {
            vectors[i][j].clone()
        }))
    }

    /// Span of the standard basis vectors with the given indices.
    pub fn coordinate(field: &Field, n: usize, idx: impl IntoIterator<Item = usize>) -> Subspace {
        let vs: Vec<Vec<Elem>> = idx
            .into_iter()
            .map(|i| {
                let mut v = vec![field.zero(); n];
                v[i] = field.one();
                v
            })
            .collect();
        Subspace::span(field, n, &vs)
    }

    /// `{v : M v = 0}`.
    pub fn kernel(m: &Mat<Elem>) -> Subspace {
        Subspace::span(m.field(), m.cols(), &m.kernel_vectors())
    }

    pub fn field(&self) -> &Field {
        self.basis.field()
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.rows()
    }

    pub fn basis(&self) -> &Mat<Elem> {
        &self.basis
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn vectors(&self) -> Vec<Vec<Elem>> {
        (0..self.dim()).map(|i| self.basis.row(i)).collect()
    }

    /// Basis vectors as the columns of an `N × dim` matrix.
    pub fn as_columns(&self) -> Mat<Elem> {
        self.basis.transpose()
    }

    fn check(&self, o: &Subspace) -> Result<()> {
        if self.ambient == o.ambient {
            Ok(())
        } else {
            Err(dims("subspaces of different ambient spaces"))
        }
    }

    pub fn sum(&self, o: &Subspace) -> Result<Subspace> {
        self.check(o)?;
        Ok(Subspace::row_space(&self.basis.vstack(&o.basis)))
    }

    /// Functionals vanishing on the subspace, as rows.
    pub fn annihilator(&self) -> Mat<Elem> {
        if self.dim() == 0 {
            return Mat::identity(self.field(), self.ambient);
        }
        let ks = self.basis.kernel_vectors();
        Mat::from_fn(self.field(), ks.len(), self.ambient, |i, j| {
            ks[i][j].clone()
        })
    }

    pub fn intersect(&self, o: &Subspace) -> Result<Subspace> {
        self.check(o)?;
        Ok(Subspace::kernel(
            &self.annihilator().vstack(&o.annihilator()),
        ))
    }

    pub fn contains(&self, v: &[Elem]) -> bool {
        let row = Mat::from_fn(self.field(), 1, self.ambient, |_, j| v[j].clone());
        self.basis.vstack(&row).rank() == self.dim()
    }

    pub fn contains_space(&self, o: &Subspace) -> bool {
        self.ambient == o.ambient && self.basis.vstack(&o.basis).rank() == self.dim()
    }

    /// `M W = {M w : w ∈ W}`.
    pub fn image(&self, m: &Mat<Elem>) -> Result<Subspace> {
        if m.cols() != self.ambient {
            return Err(dims("image under a matrix of the wrong width"));
        }
        Ok(Subspace::row_space(&self.basis.mul(&m.transpose())))
    }

    /// `M⁻¹ W = {v : M v ∈ W}`.
    pub fn preimage(&self, m: &Mat<Elem>) -> Result<Subspace> {
        if m.rows() != self.ambient {
            return Err(dims("preimage under a matrix of the wrong height"));
        }
        let ann = self.annihilator();
        if ann.rows() == 0 {
            return Ok(Subspace::full(self.field(), m.cols()));
        }
        Ok(Subspace::kernel(&ann.mul(m)))
    }

    /// A supplement `S` of `inner` in `outer`: the RREF rows of `outer` whose
    /// pivots are not pivots of `inner`, re-reduced.
    pub fn complement(inner: &Subspace, outer: &Subspace) -> Result<Subspace> {
        inner.check(outer)?;
        if !outer.contains_space(inner) {
            return Err(Error::NotContained);
        }
        let rows: Vec<Vec<Elem>> = (0..outer.dim())
            .filter(|&i| !inner.pivots.contains(&outer.pivots[i]))
            .map(|i| outer.basis.row(i))
            .collect();
        Ok(Subspace::span(outer.field(), outer.ambient, &rows))
    }

    pub fn embed(&self, to: &Field) -> Result<Subspace> {
        Ok(Subspace::row_space(&self.basis.embed(to)?))
    }
}

/// Coefficients `X` with `generators · X = targets` (free variables zero), or
/// `None` when some target column is outside the column span.
pub fn solve_in_span(targets: &Mat<Elem>, generators: &Mat<Elem>) -> Option<Mat<Elem>> {
    assert_eq!(
        targets.rows(),
        generators.rows(),
        "solve_in_span dimension mismatch"
    );
    let g = generators.cols();
    let t = targets.cols();
    let (r, pivots) = generators.hstack(targets).rref();
    if pivots.iter().any(|&c| c >= g) {
        return None;
    }
    let f = targets.field();
    let mut x = Mat::zeros(f, g, t);
    for (i, &c) in pivots.iter().enumerate() {
        for j in 0..t {
            x[(c, j)] = r[(i, g + j)].clone();
        }
    }
    Some(x)
}

/// A nonzero `v` with `v M = 0`, cleared to polynomial entries without
/// common content, or `None` when the rows are independent.
///
/// Over Q the entries are primitive integer polynomials and the first
/// nonzero entry has a positive leading coefficient; over other fields the
/// first nonzero entry is monic.
pub fn left_kernel_rational(m: &Mat<RationalFunction>) -> Option<Vec<Poly>> {
    let v = m.transpose().kernel_vectors().into_iter().next()?;
    Some(normalize_poly_vector(&v))
}

/// Clear denominators and content of a nonzero rational-function vector.
pub fn normalize_poly_vector(v: &[RationalFunction]) -> Vec<Poly> {
    let field = v[0].field().clone();
    let mut den = Poly::one(&field);
    for r in v {
        let g = den.gcd(r.den());
        den = den.mul(r.den()).exact_div(&g).unwrap();
    }
    let mut polys: Vec<Poly> = v
        .iter()
        .map(|r| r.num().mul(&den.exact_div(r.den()).unwrap()))
        .collect();
    let g = polys.iter().fold(Poly::zero(&field), |g, p| g.gcd(p));
    polys = polys.iter().map(|p| p.exact_div(&g).unwrap()).collect();
    let first = polys.iter().find(|p| !p.is_zero()).unwrap().clone();
    if field.characteristic() == 0 && field.depth() == 0 {
        let mut l = BigInt::one();
        for p in &polys {
            for c in p.coeffs() {
                l = l.lcm(c.as_rational().unwrap().denom());
            }
        }
        let mut content = BigInt::from(0);
        for p in &polys {
            for c in p.coeffs() {
                let n = (c.as_rational().unwrap()
                    * crate::fields::Rational::from_integer(l.clone()))
                .to_integer();
                content = content.gcd(&n);
            }
        }
        let mut s = crate::fields::Rational::new(l, content);
        if first.lead().unwrap().as_rational().unwrap().is_negative() {
            s = -s;
        }
        let s = field.from_rational(&s).unwrap();
        polys.iter().map(|p| p.scale(&s)).collect()
    } else {
        let s = first.lead().unwrap().inv().unwrap();
        polys.iter().map(|p| p.scale(&s)).collect()
    }
}
