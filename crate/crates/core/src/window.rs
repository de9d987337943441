//! Window parameters, the matrices `M_l`, the fixpoint construction of an
//! admissible pair `(P, Θ)` and its coefficient recurrence.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_integer::Integer;

use crate::error::{Error, Result};
use crate::fields::{Elem, Field};
use crate::linalg::{solve_in_span, Mat, Subspace};
use crate::newton::{matrix_valuation, MahlerSystem};
use crate::series::{LaurentMatrix, LaurentPoly, RationalFunction, SeriesMatrix};

fn ceil_div(a: i64, b: i64) -> i64 {
    -Integer::div_floor(&-a, &b)
}

/// `s ∈ S_p`, i.e. `s = 0` or `s < 0` with `p ∤ s`.
pub fn in_support(s: i64, p: u64) -> bool {
    s == 0 || (s < 0 && s % p as i64 != 0)
}

#[derive(Clone, Debug, PartialEq)]
pub struct WindowParams {
    pub p: u64,
    pub m: usize,
    pub nu_p: i64,
    pub nu_theta: i64,
    pub nu: i64,
    pub mu: i64,
    pub val_a: i64,
    pub val_ainv: i64,
    pub val_det: i64,
    pub v0: Subspace,
}

impl WindowParams {
    /// `N = m(μ − ν + 1)`.
    pub fn dim(&self) -> usize {
        self.m * (self.mu - self.nu + 1) as usize
    }

    /// Coordinate of component `r` of the coefficient of `z^n`.
    pub fn index(&self, n: i64, r: usize) -> usize {
        (n - self.nu) as usize * self.m + r
    }

    /// `S'_p = S_p ∩ [ν_Θ, 0]`, ascending.
    pub fn support(&self) -> Vec<i64> {
        (self.nu_theta..=0)
            .filter(|&s| in_support(s, self.p))
            .collect()
    }

    /// `(ν_P, ν_Θ, ν, μ)`.
    pub fn tuple(&self) -> (i64, i64, i64, i64) {
        (self.nu_p, self.nu_theta, self.nu, self.mu)
    }
}

pub fn window_params(sys: &MahlerSystem) -> Result<WindowParams> {
    let a = sys.matrix();
    let f = sys.field();
    let p = sys.p() as i64;
    let m = sys.dim();
    let ainv = a.inverse()?;
    let val_a = matrix_valuation(a);
    let val_ainv = matrix_valuation(&ainv);
    let val_det = a.det().valuation().ok_or(Error::Singular)?;
    let nu_p = ceil_div(val_a, p - 1);
    let v = ceil_div(p * m as i64 * val_a - p * val_det, p - 1);
    let nu_theta = match v {
        v if v >= 0 => 0,
        v if v % p == 0 => v + 1,
        v => v,
    };
    let nu = nu_p.min(p * nu_p + val_ainv) + nu_theta;
    if val_det % (p - 1) != 0 {
        return Err(Error::NonIntegralWindow(format!(
            "val det A = {val_det} is not divisible by {}",
            p - 1
        )));
    }
    let mu = ceil_div(-(val_ainv + nu_theta), p - 1).max(val_det / (p - 1) - (m as i64 - 1) * nu_p);
    let n = m * (mu - nu + 1) as usize;
    let lo = m * (nu_p - nu) as usize;
    let v0 = Subspace::coordinate(f, n, lo..n);
    Ok(WindowParams {
        p: sys.p(),
        m,
        nu_p,
        nu_theta,
        nu,
        mu,
        val_a,
        val_ainv,
        val_det,
        v0,
    })
}

/// Coefficients `B_k` of `A⁻¹` through the largest index any `M_l` needs.
pub fn inverse_series(sys: &MahlerSystem, params: &WindowParams) -> SeriesMatrix {
    let order = params.mu - params.nu_theta - params.p as i64 * params.nu_p;
    SeriesMatrix::from_rational(&sys.inverse(), order)
}

fn ml_from_series(b: &SeriesMatrix, params: &WindowParams, l: i64) -> Mat<Elem> {
    let f = b.field();
    let m = params.m;
    let p = params.p as i64;
    let blocks = (params.mu - params.nu + 1) as usize;
    let mut out = Mat::zeros(f, params.dim(), params.dim());
    for j in 1..=blocks as i64 {
        if j <= params.nu_p - params.nu {
            continue;
        }
        for i in 1..=blocks as i64 {
            let k = i + params.nu - l - 1 - p * (j + params.nu - 1);
            if let Some(bk) = b.coeff_ref(k) {
                out.set_block((i as usize - 1) * m, (j as usize - 1) * m, bk);
            }
        }
    }
    out
}

/// `M_l`, the matrix of `f ↦ z^l A⁻¹ f(z^p)` on the window.
pub fn build_ml(sys: &MahlerSystem, params: &WindowParams, l: i64) -> Result<Mat<Elem>> {
    if !(params.nu_theta..=0).contains(&l) || !in_support(l, params.p) {
        return Err(Error::OutsideSupport(l));
    }
    Ok(ml_from_series(&inverse_series(sys, params), params, l))
}

/// `π(f)`: the coefficients of `z^ν, …, z^μ` of a vector of Laurent
/// polynomials.
pub fn window_vector(params: &WindowParams, f: &[LaurentPoly]) -> Vec<Elem> {
    let field = f[0].field();
    let mut v = alloc::vec![field.zero(); params.dim()];
    for (r, fr) in f.iter().enumerate() {
        for (k, c) in fr.terms().range(params.nu..=params.mu) {
            v[params.index(*k, r)] = c.clone();
        }
    }
    v
}

/// `π(P)`, one column per column of `P`; needs `P` through `z^μ`.
pub fn window_matrix(params: &WindowParams, p: &SeriesMatrix) -> Mat<Elem> {
    let mut out = Mat::zeros(p.field(), params.dim(), p.cols());
    for n in params.nu..=params.mu {
        let c = p.coeff(n);
        for r in 0..p.rows() {
            for j in 0..p.cols() {
                out[(params.index(n, r), j)] = c[(r, j)].clone();
            }
        }
    }
    out
}

/// `Θ` block upper triangular with constant diagonal blocks of sizes
/// `blocks`, and `P` known through `z^μ` (or further after [`extend_p`]).
#[derive(Clone, Debug, PartialEq)]
pub struct AdmissiblePair {
    pub params: WindowParams,
    pub blocks: Vec<usize>,
    pub theta: LaurentMatrix,
    pub p: SeriesMatrix,
}

impl AdmissiblePair {
    pub fn field(&self) -> &Field {
        self.theta.field()
    }

    /// `P̄` entry as a truncation.
    pub fn p_entry(&self, i: usize, j: usize) -> crate::series::PuiseuxTruncation {
        self.p.entry(i, j)
    }

    pub fn theta_entry(&self, i: usize, j: usize) -> LaurentPoly {
        self.theta.entry(i, j)
    }
}

/// Intermediate spaces of the fixpoint construction: `x[j]` is `X_{j+1}`,
/// `u[j]` is `U_j` (spanned by `M_k X_j`), `e[j]` is `E_{j+1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct Trace {
    pub x: Vec<Subspace>,
    pub u: Vec<Subspace>,
    pub e: Vec<Mat<Elem>>,
    pub y_dims: Vec<usize>,
    pub iterations: Vec<usize>,
}

pub fn admissible_pair(sys: &MahlerSystem) -> Result<AdmissiblePair> {
    Ok(admissible_pair_traced(sys)?.0)
}

pub fn admissible_pair_traced(sys: &MahlerSystem) -> Result<(AdmissiblePair, Trace)> {
    let params = window_params(sys)?;
    let f = sys.field().clone();
    let m = params.m;
    let n = params.dim();
    let b = inverse_series(sys, &params);
    let ms: Vec<(i64, Mat<Elem>)> = params
        .support()
        .into_iter()
        .map(|l| (l, ml_from_series(&b, &params, l)))
        .collect();
    let mm = ms.iter().find(|(l, _)| *l == 0).unwrap().1.clone();
    let cap = m * (params.mu - params.nu_p + 1) as usize;

    let mut trace = Trace {
        x: Vec::new(),
        u: Vec::new(),
        e: Vec::new(),
        y_dims: Vec::new(),
        iterations: Vec::new(),
    };
    let mut x = Subspace::zero(&f, n);
    while x.dim() < m {
        let mut u = Subspace::zero(&f, n);
        for (_, mk) in &ms {
            u = u.sum(&x.image(mk)?)?;
        }
        let mut fs = params.v0.clone();
        let mut steps = 0;
        loop {
            let g = fs
                .intersect(&fs.sum(&u)?.preimage(&mm)?)?
                .intersect(&fs.image(&mm)?.sum(&u)?)?;
            if g == fs {
                break;
            }
            fs = g;
            steps += 1;
            if steps > cap {
                return Err(Error::NotAdmissible(format!(
                    "fixpoint iteration exceeded {cap} steps"
                )));
            }
        }
        if fs.dim() > m {
            return Err(Error::DimensionOverflow { dim: fs.dim(), m });
        }
        if fs == x {
            return Err(Error::RamificationInsufficient { dim: x.dim(), m });
        }
        let uf = u.intersect(&fs)?;
        let y = Subspace::complement(&x, &uf)?;
        let z = Subspace::complement(&uf, &fs)?;
        trace.e.push(y.as_columns().hstack(&z.as_columns()));
        trace.y_dims.push(y.dim());
        trace.u.push(u);
        trace.x.push(fs.clone());
        trace.iterations.push(steps);
        x = fs;
    }

    let r = trace.e.len();
    let sizes: Vec<usize> = trace.e.iter().map(Mat::cols).collect();
    let offsets: Vec<usize> = sizes
        .iter()
        .scan(0, |acc, &s| {
            let o = *acc;
            *acc += s;
            Some(o)
        })
        .collect();
    let mut theta: BTreeMap<i64, Mat<Elem>> = BTreeMap::new();
    let mut put = |l: i64, r0: usize, c0: usize, blk: &Mat<Elem>| {
        theta
            .entry(l)
            .or_insert_with(|| Mat::zeros(&f, m, m))
            .set_block(r0, c0, blk);
    };
    for j in 0..r {
        let e = &trace.e[j];
        let s = trace.y_dims[j];
        let bj = e.cols();
        let me = mm.mul(e);
        let ez = e.submatrix(0, n, s, bj);
        let gens = ez.hstack(&trace.u[j].as_columns());
        let sol = solve_in_span(&me, &gens)
            .ok_or_else(|| Error::NotAdmissible(String::from("M E_j leaves E_Z + U")))?;
        let rm = sol.submatrix(0, bj - s, 0, bj);
        let (_, pivots) = rm.rref();
        let mut vrows: Vec<Vec<Elem>> = (0..bj)
            .filter(|c| !pivots.contains(c))
            .map(|c| {
                (0..bj)
                    .map(|k| if k == c { f.one() } else { f.zero() })
                    .collect()
            })
            .collect();
        vrows.extend((0..rm.rows()).map(|i| rm.row(i)));
        let v = Mat::from_rows(&f, vrows)?;
        let tj = v.inverse()?;
        put(0, offsets[j], offsets[j], &tj);
        let target = e.sub(&me.mul(&tj));
        if j == 0 {
            if !target.is_zero() {
                return Err(Error::NotAdmissible(String::from(
                    "E_1 - M E_1 Θ_1 is not zero",
                )));
            }
            continue;
        }
        let mut gens = Mat::zeros(&f, n, 0);
        let mut keys: Vec<(usize, i64)> = Vec::new();
        for i in 0..j {
            for (l, mk) in &ms {
                gens = gens.hstack(&mk.mul(&trace.e[i]));
                keys.push((i, *l));
            }
        }
        let sol = solve_in_span(&target, &gens)
            .ok_or_else(|| Error::NotAdmissible(String::from("E_j - M E_j Θ_j leaves U")))?;
        let mut row = 0;
        for (i, l) in keys {
            let blk = sol.submatrix(row, row + sizes[i], 0, bj);
            row += sizes[i];
            put(l, offsets[i], offsets[j], &blk);
        }
    }
    let theta = LaurentMatrix::new(&f, m, m, theta);

    let mut e_all = Mat::zeros(&f, n, 0);
    for e in &trace.e {
        e_all = e_all.hstack(e);
    }
    let coeffs: Vec<Mat<Elem>> = (params.nu_p..=params.mu)
        .map(|k| Mat::from_fn(&f, m, m, |rr, c| e_all[(params.index(k, rr), c)].clone()))
        .collect();
    let p = SeriesMatrix::new(&f, m, m, params.nu_p, coeffs);
    Ok((
        AdmissiblePair {
            params,
            blocks: sizes,
            theta,
            p,
        },
        trace,
    ))
}

/// Continue `P` through `z^order` with `P = A⁻¹ φ_p(P) Θ`.
pub fn extend_p(pair: &AdmissiblePair, sys: &MahlerSystem, order: i64) -> Result<AdmissiblePair> {
    let p = sys.p() as i64;
    let mut out = pair.clone();
    if order <= out.p.order() {
        return Ok(out);
    }
    let lmin = pair.theta.valuation().unwrap_or(0);
    let pv = pair.p.val();
    let b = SeriesMatrix::from_rational(&sys.inverse(), order - lmin - p * pv);
    let bv = b.val();
    for n in out.p.order() + 1..=order {
        let mut acc = Mat::zeros(out.field(), out.p.rows(), out.p.cols());
        for (l, tl) in pair.theta.coeffs() {
            let top = Integer::div_floor(&(n - l - bv), &p);
            for t in pv..=top {
                let pt = out.p.coeff_ref(t).ok_or_else(|| {
                    Error::NotAdmissible(format!(
                        "coefficient {n} of P depends on unknown coefficient {t}"
                    ))
                })?;
                if pt.is_zero() {
                    continue;
                }
                let k = n - l - p * t;
                acc = acc.add(&b.coeff(k).mul(pt).mul(tl));
            }
        }
        out.p.push(acc);
    }
    Ok(out)
}

/// Finest block sizes for which `Θ` is block upper triangular with constant
/// diagonal blocks.
pub fn infer_blocks(theta: &LaurentMatrix) -> Option<Vec<usize>> {
    let m = theta.rows();
    let mut blocks = Vec::new();
    let mut s = 0;
    while s < m {
        let e = (s + 1..=m).find(|&e| {
            theta.coeffs().iter().all(|(l, c)| {
                (e..m).all(|i| (s..e).all(|j| c[(i, j)].is_zero()))
                    && (*l == 0 || (s..e).all(|i| (s..e).all(|j| c[(i, j)].is_zero())))
            })
        })?;
        blocks.push(e - s);
        s = e;
    }
    Some(blocks)
}

#[derive(Clone, Debug, PartialEq)]
pub struct AdmissibilityReport {
    /// First violated invariant, if any.
    pub violation: Option<String>,
    /// Highest exponent through which `φ_p(P)Θ = AP` was checked.
    pub verified_order: i64,
    pub blocks: Vec<usize>,
}

impl AdmissibilityReport {
    pub fn ok(&self) -> bool {
        self.violation.is_none()
    }
}

/// Check every admissibility invariant of `(P, Θ)` through `z^order` at most.
pub fn check_admissible(
    sys: &MahlerSystem,
    p: &SeriesMatrix,
    theta: &LaurentMatrix,
    order: i64,
) -> AdmissibilityReport {
    let mut rep = AdmissibilityReport {
        violation: None,
        verified_order: i64::MIN,
        blocks: Vec::new(),
    };
    let fail = |mut rep: AdmissibilityReport, msg: String| {
        rep.violation = Some(msg);
        rep
    };
    let pp = sys.p();
    if let Some(l) = theta.support().into_iter().find(|&l| !in_support(l, pp)) {
        return fail(rep, format!("support ∉ S_p: exponent {l}"));
    }
    let Some(blocks) = infer_blocks(theta) else {
        return fail(
            rep,
            String::from("Θ is not block upper triangular with constant diagonal blocks"),
        );
    };
    rep.blocks = blocks;
    let det = theta.to_rational().det();
    if det.is_zero() || det.as_constant().is_none() {
        return fail(rep, format!("det Θ = {det} is not a nonzero constant"));
    }
    let params = match window_params(sys) {
        Ok(w) => w,
        Err(e) => return fail(rep, format!("{e}")),
    };
    if let Some(v) = p.valuation() {
        if v < params.nu_p {
            return fail(rep, format!("val P = {v} < ν_P = {}", params.nu_p));
        }
    }
    if let Some(v) = theta.valuation() {
        if v < params.nu_theta {
            return fail(rep, format!("val Θ = {v} < ν_Θ = {}", params.nu_theta));
        }
    }
    if p.order() < params.mu {
        return fail(
            rep,
            format!(
                "P is known through z^{} only, below μ = {}",
                p.order(),
                params.mu
            ),
        );
    }

    let pi = pp as i64;
    let lmin = theta.valuation().unwrap_or(0);
    let (pv, po) = (p.val(), p.order());
    let a = SeriesMatrix::from_rational(sys.matrix(), po - pv);
    let va = a.val();
    let hi = order.min(po + va).min(pi * (po + 1) + lmin - 1);
    let lo = (va + pv).min(pi * pv + lmin);
    let f = p.field();
    for n in lo..=hi {
        let mut lhs = Mat::zeros(f, p.rows(), p.cols());
        for (l, tl) in theta.coeffs() {
            if (n - l) % pi == 0 && (n - l) / pi >= pv {
                lhs = lhs.add(&p.coeff((n - l) / pi).mul(tl));
            }
        }
        let mut rhs = Mat::zeros(f, p.rows(), p.cols());
        for t in pv..=n - va {
            rhs = rhs.add(&a.coeff(n - t).mul(&p.coeff(t)));
        }
        if lhs != rhs {
            rep.verified_order = n - 1;
            return fail(rep, format!("φ_p(P)Θ ≠ AP at z^{n}"));
        }
    }
    rep.verified_order = hi;

    if window_matrix(&params, p).rank() < params.m {
        return fail(rep, String::from("columns of π(P) are dependent"));
    }
    if let Err(msg) = check_det_valuation(&params, p) {
        return fail(rep, msg);
    }
    rep
}

/// `det P` has its lowest term exactly at `z^{val det A/(p−1)}`.
pub fn check_det_valuation(
    params: &WindowParams,
    p: &SeriesMatrix,
) -> core::result::Result<(), String> {
    let m = params.m;
    let f = p.field();
    let pr = Mat::from_fn(f, m, m, |i, j| {
        let t = p.entry(i, j);
        LaurentPoly::from_terms(f, t.coeffs().iter().map(|(k, c)| (*k, c.clone()))).to_rational()
    });
    let det: RationalFunction = pr.det();
    let e = params.val_det / (params.p as i64 - 1);
    if e > p.order() + (m as i64 - 1) * params.nu_p {
        return Ok(());
    }
    match det.valuation() {
        Some(v) if v == e => Ok(()),
        v => Err(format!("val det P = {v:?}, expected {e}")),
    }
}
