//! Bases of solutions `y = P̄(z^{1/d}) H(z^{1/d}) e_C` of Mahler equations,
//! their symbolic verification and equations for the entries of `P`.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use crate::constants::{basis_name, exp_constant, ConstElem, ConstMatrix};
use crate::error::{Error, Result};
use crate::fields::{find_roots, Elem, Field, Rational};
use crate::hahn::{compute_h, normalize_xi, xi_phi, ExpPolySeq, HahnExpression, HahnMatrix, XiKey};
use crate::linalg::{left_kernel_rational, Mat, Subspace};
use crate::newton::{
    build_companion, check_ramification, newton_slopes, ramification_index, MahlerEquation,
    MahlerSystem,
};
use crate::series::{LaurentMatrix, PuiseuxTruncation, RationalFunction};
use crate::window::{admissible_pair, extend_p, infer_blocks, AdmissiblePair};

/// Ordering key preferring "simple" eigenvalues: small heights over Q,
/// small degrees over F_p(θ), few generator terms in extensions.
fn simplicity(e: &Elem) -> (usize, BigInt) {
    if let Some(q) = e.as_rational() {
        return (0, q.numer().abs().max(q.denom().clone()));
    }
    if let Some((n, d)) = e.fp_parts() {
        return (0, BigInt::from(n.len() + d.len()));
    }
    let coords = e.coords().expect("extension element");
    let mut level = 0;
    let mut h = BigInt::zero();
    for (i, c) in coords.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let (l, x) = simplicity(c);
        level = level.max(l + usize::from(i > 0));
        h += x;
    }
    (level, h)
}

fn normalize_first(v: &[Elem]) -> Vec<Elem> {
    let lead = v
        .iter()
        .find(|x| !x.is_zero())
        .expect("nonzero vector")
        .inv()
        .unwrap();
    v.iter().map(|x| x * &lead).collect()
}

/// Columns spanning flags of generalized eigenspaces of `b`, eigenvalues in
/// simplicity order, each vector scaled to have first nonzero entry 1.
fn flag_basis(b: &Mat<Elem>) -> Result<(Field, Mat<Elem>)> {
    let roots = find_roots(&b.charpoly())?;
    let f = roots.field.clone();
    let b = b.embed(&f)?;
    let k = b.rows();
    let mut eig = roots.roots.clone();
    eig.sort_by(|x, y| (simplicity(&x.0), &x.0).cmp(&(simplicity(&y.0), &y.0)));
    let mut cols: Vec<Vec<Elem>> = Vec::new();
    for (l, mult) in &eig {
        let n = b.sub(&Mat::identity(&f, k).scale(l));
        let mut prev = Subspace::zero(&f, k);
        let mut pw = n.clone();
        while prev.dim() < *mult {
            let ker = Subspace::kernel(&pw);
            for v in Subspace::complement(&prev, &ker)?.vectors() {
                cols.push(normalize_first(&v));
            }
            prev = ker;
            pw = pw.mul(&n);
        }
    }
    Ok((f.clone(), Mat::from_cols(&f, k, &cols)))
}

/// A constant gauge `Q` with `Θ' = Q Θ Q⁻¹` upper triangular.
#[derive(Clone, Debug, PartialEq)]
pub struct Gauge {
    pub field: Field,
    pub q: Mat<Elem>,
    pub q_inv: Mat<Elem>,
    pub theta: LaurentMatrix,
}

/// Triangularize the constant diagonal blocks of `Θ`; blocks that are
/// already upper triangular are left alone.
pub fn triangularize_theta(theta: &LaurentMatrix, blocks: &[usize]) -> Result<Gauge> {
    let mut field = theta.field().clone();
    let c = theta.coeff(0);
    let mut parts: Vec<(usize, Mat<Elem>)> = Vec::new();
    let mut s = 0;
    for &k in blocks {
        let b = c.submatrix(s, s + k, s, s + k).embed(&field)?;
        if k > 1 && !b.is_upper_triangular() {
            let (f2, sb) = flag_basis(&b)?;
            field = f2;
            parts.push((s, sb));
        }
        s += k;
    }
    let m = theta.rows();
    let mut q_inv = Mat::identity(&field, m);
    for (s, sb) in &parts {
        q_inv.set_block(*s, *s, &sb.embed(&field)?);
    }
    let q = q_inv.inverse()?;
    let theta = theta.embed(&field)?.conjugate(&q, &q_inv);
    Ok(Gauge {
        field,
        q,
        q_inv,
        theta,
    })
}

/// Key of a basis element `ξ_ω e_c ℓ^{[j]}`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct SolKey {
    pub c: Elem,
    pub j: usize,
    pub xi: XiKey,
}

impl SolKey {
    pub fn name(&self) -> String {
        let mut parts = Vec::new();
        if !self.xi.is_one() {
            parts.push(format!("{}", self.xi));
        }
        let e = basis_name(&self.c, self.j);
        if !e.is_empty() {
            parts.push(e);
        }
        parts.join("*")
    }
}

/// `Σ f_{c,j,ω}(z) ξ_ω e_c ℓ^{[j]}`.
#[derive(Clone, PartialEq)]
pub struct SolutionExpression {
    field: Field,
    terms: BTreeMap<SolKey, PuiseuxTruncation>,
}

impl fmt::Debug for SolutionExpression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// `f · z^e`, refining the ramification when `e` needs it.
pub fn mul_monomial(f: &PuiseuxTruncation, e: &Rational) -> PuiseuxTruncation {
    let d = f.ramification();
    let need = e.denom().clone() * BigInt::from(d);
    let g = need.lcm(&BigInt::from(d));
    let k = u64::try_from(&g / BigInt::from(d)).expect("ramification fits in u64");
    let r = f.refine(k);
    let num = e * Rational::from_integer(BigInt::from(r.ramification()));
    r.shift_num(i64::try_from(num.to_integer()).expect("exponent fits in i64"))
}

impl SolutionExpression {
    pub fn zero(field: &Field) -> SolutionExpression {
        SolutionExpression {
            field: field.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    /// All keys, including those whose truncation vanishes to its order.
    pub fn terms(&self) -> &BTreeMap<SolKey, PuiseuxTruncation> {
        &self.terms
    }

    /// Keys with a nonzero truncation.
    pub fn support(&self) -> impl Iterator<Item = (&SolKey, &PuiseuxTruncation)> {
        self.terms.iter().filter(|(_, f)| !f.is_zero())
    }

    pub fn add_term(&mut self, k: SolKey, f: PuiseuxTruncation) {
        let v = match self.terms.remove(&k) {
            Some(g) => g.add(&f),
            None => f,
        };
        self.terms.insert(k, v);
    }

    pub fn add(&self, o: &SolutionExpression) -> SolutionExpression {
        let mut r = self.clone();
        for (k, f) in &o.terms {
            r.add_term(k.clone(), f.clone());
        }
        r
    }

    pub fn mul_rational(&self, a: &RationalFunction) -> SolutionExpression {
        let mut r = SolutionExpression::zero(&self.field);
        for (k, f) in &self.terms {
            r.add_term(k.clone(), f.mul_rational(a));
        }
        r
    }

    /// `φ_p`, regrouped on standard keys.
    pub fn phi(&self, p: u64) -> SolutionExpression {
        let f = &self.field;
        let mut r = SolutionExpression::zero(f);
        for (k, g) in &self.terms {
            let g = g.substitute_power(p);
            let seq = ExpPolySeq::monomial(
                f,
                f.one(),
                k.xi.term.alpha.clone(),
                k.xi.term.lambda.clone(),
            );
            let xi = normalize_xi(
                &xi_phi(
                    &HahnExpression::term(Rational::zero(), k.xi.a.clone(), seq),
                    p,
                ),
                p,
            );
            let consts = ConstElem::basis(f, k.c.clone(), k.j).phi();
            for (xk, mono) in xi.decompose() {
                for (e, x) in &mono {
                    let h = mul_monomial(&g, e).scale(x);
                    for ((c, j), y) in consts.terms() {
                        r.add_term(
                            SolKey {
                                c: c.clone(),
                                j: *j,
                                xi: xk.clone(),
                            },
                            h.scale(y),
                        );
                    }
                }
            }
        }
        r
    }

    /// Least guaranteed order over all keys.
    pub fn order(&self) -> Option<Rational> {
        self.terms.values().map(PuiseuxTruncation::order).min()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.values().all(PuiseuxTruncation::is_zero)
    }

    pub fn embed(&self, to: &Field) -> Result<SolutionExpression> {
        let mut r = SolutionExpression::zero(to);
        for (k, f) in &self.terms {
            let k = SolKey {
                c: to.embed(&k.c)?,
                j: k.j,
                xi: k.xi.embed(to)?,
            };
            r.add_term(k, f.embed(to)?);
        }
        Ok(r)
    }
}

impl fmt::Display for SolutionExpression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items: Vec<_> = self.support().collect();
        if items.is_empty() {
            return write!(f, "0");
        }
        for (n, (k, g)) in items.into_iter().enumerate() {
            if n > 0 {
                write!(f, " + ")?;
            }
            let name = k.name();
            if name.is_empty() {
                write!(f, "({g})")?;
            } else {
                write!(f, "({g})*{name}")?;
            }
        }
        Ok(())
    }
}

/// A basis of solutions together with the data it was assembled from.
#[derive(Clone, Debug)]
pub struct BasisResult {
    pub p: u64,
    pub field: Field,
    pub order: i64,
    pub solutions: Vec<SolutionExpression>,
    pub k0: Vec<Elem>,
    pub j0: usize,
    pub omega1: Vec<XiKey>,
    pub d: u64,
    /// Every coefficient lies in `z^{−v} K[[z^{1/d}]]`.
    pub v: i64,
    /// Admissible pair of the ramified system after the gauge.
    pub pair: AdmissiblePair,
    pub gauge: Gauge,
    pub h: HahnMatrix,
    pub e_c: ConstMatrix,
}

/// Solve `eq` with Puiseux coefficients through `z^n`.
pub fn solve_equation(eq: &MahlerEquation, n: i64) -> Result<BasisResult> {
    let p = eq.p();
    let m = eq.order();
    let d = ramification_index(&newton_slopes(eq), p);
    check_ramification(d, p, m)?;
    let sys = build_companion(&eq.substitute_power(d as usize));
    let pair = admissible_pair(&sys)?;
    let pair = extend_p(&pair, &sys, d as i64 * n)?;
    let gauge = triangularize_theta(&pair.theta, &pair.blocks)?;
    let field = gauge.field.clone();
    let pbar = pair.p.embed(&field)?.mul_const_right(&gauge.q_inv);
    let theta = gauge.theta.clone();
    let h = compute_h(&theta, p)?;
    let (cf, e_c) = exp_constant(&theta.coeff(0))?;
    if cf != field {
        return Err(Error::FieldMismatch);
    }

    let hr: Vec<Vec<BTreeMap<XiKey, BTreeMap<Rational, Elem>>>> = h
        .iter()
        .map(|row| {
            row.iter()
                .map(|x| normalize_xi(&x.ramify(d), p).decompose())
                .collect()
        })
        .collect();
    let first_row: Vec<PuiseuxTruncation> = (0..m).map(|j| pbar.entry(0, j).ramify(d)).collect();
    let mut solutions = Vec::new();
    #[allow(clippy::needless_range_loop)]
    for i in 0..m {
        let mut y = SolutionExpression::zero(&field);
        for (jp, fp) in first_row.iter().enumerate() {
            for (k, hjk) in hr[jp].iter().enumerate() {
                for (xk, mono) in hjk {
                    for (e, x) in mono {
                        let g = mul_monomial(fp, e).scale(x);
                        for ((c, j), w) in e_c[k][i].terms() {
                            y.add_term(
                                SolKey {
                                    c: c.clone(),
                                    j: *j,
                                    xi: xk.clone(),
                                },
                                g.scale(w),
                            );
                        }
                    }
                }
            }
        }
        solutions.push(y);
    }

    let mut k0 = BTreeSet::new();
    let mut omega1 = BTreeSet::new();
    let mut j0 = 0;
    for y in &solutions {
        for (k, _) in y.support() {
            k0.insert(k.c.clone());
            omega1.insert(k.xi.clone());
            j0 = j0.max(k.j);
        }
    }
    // A priori bound valid for the full series: val P ≥ ν_P before the
    // ramification, shifted by the monomials of H.
    let min_e = hr
        .iter()
        .flatten()
        .flat_map(|x| x.values().flat_map(|mono| mono.keys().cloned()))
        .min()
        .unwrap_or_else(Rational::zero);
    let nu_p = Rational::new(BigInt::from(pair.params.nu_p), BigInt::from(d));
    let v = ceil_rational(&-(nu_p + min_e));
    let blocks = infer_blocks(&theta).unwrap_or_else(|| vec![1; m]);
    let gauged = AdmissiblePair {
        params: pair.params.clone(),
        blocks,
        theta,
        p: pbar,
    };
    Ok(BasisResult {
        p,
        field,
        order: n,
        solutions,
        k0: k0.into_iter().collect(),
        j0,
        omega1: omega1.into_iter().collect(),
        d,
        v,
        pair: gauged,
        gauge,
        h,
        e_c,
    })
}

/// Outcome of substituting a basis into its equation.
#[derive(Clone, Debug, PartialEq)]
pub struct VerifyReport {
    /// Per solution: the order through which the residual is known, and
    /// the first key with a nonzero residual coefficient, if any.
    pub solutions: Vec<(Rational, Option<String>)>,
}

impl VerifyReport {
    pub fn ok(&self) -> bool {
        self.solutions.iter().all(|(_, bad)| bad.is_none())
    }

    /// Least verified order over all solutions.
    pub fn verified_order(&self) -> Option<Rational> {
        self.solutions.iter().map(|(o, _)| o.clone()).min()
    }
}

/// Apply `Σ a_k φ_p^k` symbolically to one solution.
pub fn residual(eq: &MahlerEquation, y: &SolutionExpression) -> Result<SolutionExpression> {
    let f = y.field();
    let mut acc = SolutionExpression::zero(f);
    let mut g = y.clone();
    for a in eq.coeffs() {
        acc = acc.add(&g.mul_rational(&a.embed(f)?));
        g = g.phi(eq.p());
    }
    Ok(acc)
}

pub fn verify_basis(eq: &MahlerEquation, res: &BasisResult) -> Result<VerifyReport> {
    verify_solutions(eq, &res.solutions, res.order)
}

/// Residual check of any list of solutions; `order` is reported when a
/// residual carries no truncation at all.
pub fn verify_solutions(
    eq: &MahlerEquation,
    solutions: &[SolutionExpression],
    order: i64,
) -> Result<VerifyReport> {
    let mut out = Vec::new();
    for y in solutions {
        let r = residual(eq, y)?;
        let known = r
            .order()
            .unwrap_or_else(|| Rational::from_integer(BigInt::from(order)));
        let bad = r.support().next().map(|(k, t)| {
            let name = k.name();
            format!(
                "component {} has residual {t}",
                if name.is_empty() { "1" } else { &name }
            )
        });
        out.push((known, bad));
    }
    Ok(VerifyReport { solutions: out })
}

/// A Mahler equation annihilating the entry `(i, j)` of `P`, from the
/// first linear dependency among the expressions of `f_{ij}(z^{p^k})` in the
/// entries of `P`.
pub fn entry_equation(
    pair: &AdmissiblePair,
    sys: &MahlerSystem,
    i: usize,
    j: usize,
) -> Result<MahlerEquation> {
    let m = sys.dim();
    if i >= m || j >= m {
        return Err(Error::DimensionMismatch(format!(
            "entry ({i}, {j}) of a {m}×{m} matrix"
        )));
    }
    let f = sys.field();
    let p = sys.p();
    let a = sys.matrix();
    let theta_inv = pair.theta.to_rational().inverse()?;
    let mut l: Mat<RationalFunction> = Mat::identity(f, m);
    let mut r: Mat<RationalFunction> = Mat::identity(f, m);
    let mut rows: Vec<Vec<RationalFunction>> = Vec::new();
    let mut pk: usize = 1;
    for _ in 0..=m * m {
        rows.push(
            (0..m * m)
                .map(|ab| l[(i, ab / m)].mul(&r[(ab % m, j)]))
                .collect(),
        );
        let stacked = Mat::from_rows(f, rows.clone())?;
        if let Some(c) = left_kernel_rational(&stacked) {
            let coeffs: Vec<RationalFunction> =
                c.into_iter().map(RationalFunction::from_poly).collect();
            return MahlerEquation::new(p, f, coeffs);
        }
        let phi_a = a.map(f, |x| Ok(x.substitute_power(pk)))?;
        let phi_t = theta_inv.map(f, |x| Ok(x.substitute_power(pk)))?;
        l = phi_a.mul(&l);
        r = r.mul(&phi_t);
        pk *= p as usize;
    }
    Err(Error::NotAdmissible(String::from(
        "no linear dependency among the iterates",
    )))
}

/// Integer ceiling of a rational, as used for valuation bounds.
pub fn ceil_rational(q: &Rational) -> i64 {
    let n = q.numer();
    let d = q.denom();
    i64::try_from(-Integer::div_floor(&-n, d)).expect("fits in i64")
}
