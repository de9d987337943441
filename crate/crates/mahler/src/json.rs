//! JSON encodings. Rationals are `"num/den"` strings (`"n"` for integers),
//! extension elements are coordinate arrays over the immediate base and
//! elements of F_p(θ) are `{"num", "den"}` polynomial strings.

use mahler_core::constants::{ConstElem, ConstMatrix};
use mahler_core::fields::{adjoin_root, Elem, Field, FieldKind, Rational};
use mahler_core::hahn::{ExpPolySeq, HahnExpression, HahnMatrix, SeqTerm, XiKey};
use mahler_core::newton::MahlerEquation;
use mahler_core::poly::Poly;
use mahler_core::series::{LaurentMatrix, LaurentPoly, PuiseuxTruncation, RationalFunction};
use mahler_core::solver::{BasisResult, SolKey, SolutionExpression};
use serde_json::{json, Map, Value};

use crate::error::CliError;
use crate::parse::{parse_element, parse_rational_function};

type Res<T> = Result<T, CliError>;

fn bad(msg: impl Into<String>) -> CliError {
    CliError::Input(msg.into())
}

fn get<'a>(v: &'a Value, key: &str) -> Res<&'a Value> {
    v.get(key)
        .ok_or_else(|| bad(format!("missing field \"{key}\"")))
}

fn array<'a>(v: &'a Value, what: &str) -> Res<&'a Vec<Value>> {
    v.as_array()
        .ok_or_else(|| bad(format!("{what} must be an array")))
}

fn uint(v: &Value, what: &str) -> Res<u64> {
    v.as_u64()
        .ok_or_else(|| bad(format!("{what} must be a nonnegative integer")))
}

fn int(v: &Value, what: &str) -> Res<i64> {
    v.as_i64()
        .ok_or_else(|| bad(format!("{what} must be an integer")))
}

pub fn encode_rational(q: &Rational) -> Value {
    Value::String(q.to_string())
}

pub fn decode_rational(v: &Value) -> Res<Rational> {
    match v {
        Value::String(s) => s
            .trim()
            .parse::<Rational>()
            .map_err(|_| bad(format!("\"{s}\" is not a rational"))),
        Value::Number(n) => n
            .as_i64()
            .map(|k| Rational::from_integer(k.into()))
            .ok_or_else(|| bad(format!("{n} is not an integer"))),
        _ => Err(bad("a rational must be a \"num/den\" string")),
    }
}

pub fn encode_field(f: &Field) -> Value {
    match f.kind() {
        FieldKind::Rationals => json!({"kind": "rationals"}),
        FieldKind::FpFunction { p, var } => json!({"kind": "fp_function", "char": p, "var": var}),
        FieldKind::Extension {
            base,
            minpoly,
            name,
        } => json!({
            "kind": "extension",
            "base": encode_field(base),
            "minpoly": minpoly.iter().map(encode_elem).collect::<Vec<_>>(),
            "var": name,
        }),
    }
}

/// Build a field from its descriptor. `trusted` descriptors come from our
/// own output and skip the irreducibility check of extensions.
pub fn decode_field(v: &Value, trusted: bool) -> Res<Field> {
    match get(v, "kind")?.as_str() {
        Some("rationals") => Ok(Field::rationals()),
        Some("fp_function") => {
            let p = uint(get(v, "char")?, "char")?;
            let var = v.get("var").and_then(Value::as_str).unwrap_or("theta");
            Ok(Field::fp_function(p, var)?)
        }
        Some("extension") => {
            let base = match v.get("base") {
                Some(b) => decode_field(b, trusted)?,
                None => Field::rationals(),
            };
            let coeffs = array(get(v, "minpoly")?, "minpoly")?
                .iter()
                .map(|c| decode_elem(c, &base))
                .collect::<Res<Vec<_>>>()?;
            let var = v.get("var").and_then(Value::as_str).unwrap_or("a");
            let assume = trusted
                || v.get("assume_irreducible")
                    .and_then(Value::as_bool)
                    .unwrap_or(false);
            let (f, _) = adjoin_root(&base, &Poly::new(&base, coeffs), var, assume)?;
            Ok(f)
        }
        _ => Err(bad(
            "field kind must be \"rationals\", \"extension\" or \"fp_function\"",
        )),
    }
}

pub fn encode_elem(e: &Elem) -> Value {
    if let Some(q) = e.as_rational() {
        return encode_rational(q);
    }
    if let Some(c) = e.coords() {
        return Value::Array(c.iter().map(encode_elem).collect());
    }
    let (num, den) = e.fp_parts().expect("element of a known field kind");
    let f = e.field();
    let show = |c: &[u64]| {
        format!(
            "{}",
            f.fp_frac(c.to_vec(), vec![1]).expect("nonzero denominator")
        )
    };
    json!({"num": show(num), "den": show(den)})
}

pub fn decode_elem(v: &Value, f: &Field) -> Res<Elem> {
    match f.kind() {
        FieldKind::Rationals => Ok(f.from_rational(&decode_rational(v)?)?),
        FieldKind::Extension { base, .. } => match v {
            Value::Array(c) => {
                if c.len() > f.degree() {
                    return Err(bad(format!(
                        "extension element has {} coordinates, degree is {}",
                        c.len(),
                        f.degree()
                    )));
                }
                let coords = c
                    .iter()
                    .map(|x| decode_elem(x, base))
                    .collect::<Res<Vec<_>>>()?;
                Ok(f.from_coords(coords)?)
            }
            other => Ok(f.embed(&decode_elem(other, base)?)?),
        },
        FieldKind::FpFunction { .. } => {
            let part = |key: &str| -> Res<Elem> {
                let s = get(v, key)?
                    .as_str()
                    .ok_or_else(|| bad(format!("\"{key}\" must be a string")))?;
                parse_element(s, f).map_err(|e| bad(format!("{key} \"{s}\": {e}")))
            };
            match v {
                Value::Object(_) => Ok(part("num")?.checked_div(&part("den")?)?),
                Value::String(s) => parse_element(s, f).map_err(|e| bad(format!("\"{s}\": {e}"))),
                Value::Number(n) => {
                    Ok(f.from_int(n.as_i64().ok_or_else(|| bad("integer out of range"))?))
                }
                _ => Err(bad("malformed element of F_p(θ)")),
            }
        }
    }
}

pub fn encode_truncation(t: &PuiseuxTruncation) -> Value {
    let coeffs: Map<String, Value> = t
        .coeffs()
        .iter()
        .map(|(k, c)| (k.to_string(), encode_elem(c)))
        .collect();
    json!({"d": t.ramification(), "val": t.val_num(), "order": t.order_num(), "coeffs": coeffs})
}

fn decode_map(v: &Value, f: &Field) -> Res<Vec<(i64, Elem)>> {
    let m = v
        .as_object()
        .ok_or_else(|| bad("coefficients must be an object keyed by exponent"))?;
    m.iter()
        .map(|(k, c)| {
            Ok((
                k.parse::<i64>()
                    .map_err(|_| bad(format!("exponent key \"{k}\" is not an integer")))?,
                decode_elem(c, f)?,
            ))
        })
        .collect()
}

pub fn decode_truncation(v: &Value, f: &Field) -> Res<PuiseuxTruncation> {
    let d = uint(get(v, "d")?, "d")?;
    if d == 0 {
        return Err(bad("ramification d must be positive"));
    }
    let order = int(get(v, "order")?, "order")?;
    let terms = decode_map(get(v, "coeffs")?, f)?;
    if let Some((k, _)) = terms.iter().find(|(k, _)| *k > order) {
        return Err(bad(format!("coefficient at {k} beyond the order {order}")));
    }
    let t = PuiseuxTruncation::from_terms(f, d, order, terms);
    if let Some(val) = v.get("val") {
        if int(val, "val")? != t.val_num() {
            return Err(bad("\"val\" disagrees with the coefficients"));
        }
    }
    Ok(t)
}

pub fn encode_laurent(l: &LaurentPoly) -> Value {
    Value::Object(
        l.terms()
            .iter()
            .map(|(k, c)| (k.to_string(), encode_elem(c)))
            .collect(),
    )
}

pub fn decode_laurent(v: &Value, f: &Field) -> Res<LaurentPoly> {
    Ok(LaurentPoly::from_terms(f, decode_map(v, f)?))
}

pub fn encode_const(c: &ConstElem) -> Value {
    Value::Array(
        c.terms()
            .iter()
            .map(|((e, k), x)| json!({"c": encode_elem(e), "k": k, "coeff": encode_elem(x)}))
            .collect(),
    )
}

pub fn decode_const(v: &Value, f: &Field) -> Res<ConstElem> {
    let mut c = ConstElem::zero(f);
    for t in array(v, "constant")? {
        let e = decode_elem(get(t, "c")?, f)?;
        if e.is_zero() {
            return Err(bad("e_0 is not a constant"));
        }
        c.add_term(
            e,
            uint(get(t, "k")?, "k")? as usize,
            decode_elem(get(t, "coeff")?, f)?,
        );
    }
    Ok(c)
}

pub fn encode_seq(u: &ExpPolySeq) -> Value {
    Value::Array(
        u.terms()
            .iter()
            .map(|(t, c)| json!({"c": encode_elem(c), "alpha": t.alpha, "lambda": t.lambda.iter().map(encode_elem).collect::<Vec<_>>()}))
            .collect(),
    )
}

fn decode_term(t: &Value, f: &Field, arity: usize) -> Res<SeqTerm> {
    let alpha = array(get(t, "alpha")?, "alpha")?
        .iter()
        .map(|a| Ok(uint(a, "alpha")? as u32))
        .collect::<Res<Vec<_>>>()?;
    let lambda = array(get(t, "lambda")?, "lambda")?
        .iter()
        .map(|l| decode_elem(l, f))
        .collect::<Res<Vec<_>>>()?;
    if alpha.len() != arity || lambda.len() != arity {
        return Err(bad(format!("sequence term must have {arity} indices")));
    }
    if lambda.iter().any(Elem::is_zero) {
        return Err(bad("λ must be nonzero"));
    }
    Ok(SeqTerm { alpha, lambda })
}

pub fn decode_seq(v: &Value, f: &Field, arity: usize) -> Res<ExpPolySeq> {
    let mut u = ExpPolySeq::zero(f, arity);
    for t in array(v, "seq")? {
        let term = decode_term(t, f, arity)?;
        u = u.add(&ExpPolySeq::monomial(
            f,
            decode_elem(get(t, "c")?, f)?,
            term.alpha,
            term.lambda,
        ));
    }
    Ok(u)
}

fn decode_tuple(v: &Value) -> Res<Vec<Rational>> {
    let a = array(v, "a")?
        .iter()
        .map(decode_rational)
        .collect::<Res<Vec<_>>>()?;
    if a.iter().any(|x| *x <= Rational::from_integer(0.into())) {
        return Err(bad("ξ tuples must be positive"));
    }
    Ok(a)
}

/// A Hahn expression as a list of `z^γ ξ_{(u,a)}` terms.
pub fn encode_hahn(h: &HahnExpression) -> Value {
    Value::Array(
        h.terms()
            .iter()
            .map(|(k, u)| json!({"gamma": encode_rational(&k.exp), "a": k.a.iter().map(encode_rational).collect::<Vec<_>>(), "seq": encode_seq(u)}))
            .collect(),
    )
}

pub fn decode_hahn(v: &Value, f: &Field) -> Res<HahnExpression> {
    let mut h = HahnExpression::zero(f);
    for t in array(v, "Hahn expression")? {
        let a = decode_tuple(get(t, "a")?)?;
        let u = decode_seq(get(t, "seq")?, f, a.len())?;
        h = h.add(&HahnExpression::term(
            decode_rational(get(t, "gamma")?)?,
            a,
            u,
        ));
    }
    Ok(h)
}

pub fn encode_xikey(k: &XiKey) -> Value {
    json!({"a": k.a.iter().map(encode_rational).collect::<Vec<_>>(), "alpha": k.term.alpha, "lambda": k.term.lambda.iter().map(encode_elem).collect::<Vec<_>>()})
}

pub fn decode_xikey(v: &Value, f: &Field) -> Res<XiKey> {
    let a = decode_tuple(get(v, "a")?)?;
    let term = decode_term(v, f, a.len())?;
    Ok(XiKey { a, term })
}

pub fn encode_solution(y: &SolutionExpression) -> Value {
    Value::Array(
        y.terms()
            .iter()
            .map(|(k, t)| json!({"xi": encode_xikey(&k.xi), "c": encode_elem(&k.c), "j": k.j, "f": encode_truncation(t)}))
            .collect(),
    )
}

pub fn decode_solution(v: &Value, f: &Field) -> Res<SolutionExpression> {
    let mut y = SolutionExpression::zero(f);
    for t in array(v, "solution")? {
        let c = decode_elem(get(t, "c")?, f)?;
        if c.is_zero() {
            return Err(bad("e_0 is not a constant"));
        }
        let key = SolKey {
            c,
            j: uint(get(t, "j")?, "j")? as usize,
            xi: decode_xikey(get(t, "xi")?, f)?,
        };
        if y.terms().contains_key(&key) {
            return Err(bad(format!("duplicate solution key {}", key.name())));
        }
        y.add_term(key, decode_truncation(get(t, "f")?, f)?);
    }
    Ok(y)
}

fn encode_matrix<T>(m: &[Vec<T>], enc: impl Fn(&T) -> Value) -> Value {
    Value::Array(
        m.iter()
            .map(|r| Value::Array(r.iter().map(&enc).collect()))
            .collect(),
    )
}

fn decode_matrix<T>(
    v: &Value,
    what: &str,
    n: usize,
    dec: impl Fn(&Value) -> Res<T>,
) -> Res<Vec<Vec<T>>> {
    let rows = array(v, what)?;
    if rows.len() != n {
        return Err(bad(format!("{what} must have {n} rows")));
    }
    rows.iter()
        .map(|r| {
            let r = array(r, what)?;
            if r.len() != n {
                return Err(bad(format!("{what} must have {n} columns")));
            }
            r.iter().map(&dec).collect()
        })
        .collect()
}

/// Everything a `solve` run reports, in decoded form.
#[derive(Clone, Debug, PartialEq)]
pub struct BasisPayload {
    pub p: u64,
    pub field: Field,
    pub order: i64,
    pub d: u64,
    pub v: i64,
    pub j0: usize,
    pub k0: Vec<Elem>,
    pub omega1: Vec<XiKey>,
    pub solutions: Vec<SolutionExpression>,
    /// Θ of the ramified system after the gauge.
    pub theta: LaurentMatrix,
    /// `P̄` of the ramified system after the gauge.
    pub pbar: Vec<Vec<PuiseuxTruncation>>,
    pub h: HahnMatrix,
    pub e_c: ConstMatrix,
}

impl From<&BasisResult> for BasisPayload {
    fn from(r: &BasisResult) -> BasisPayload {
        let m = r.solutions.len();
        BasisPayload {
            p: r.p,
            field: r.field.clone(),
            order: r.order,
            d: r.d,
            v: r.v,
            j0: r.j0,
            k0: r.k0.clone(),
            omega1: r.omega1.clone(),
            solutions: r.solutions.clone(),
            theta: r.pair.theta.clone(),
            pbar: (0..m)
                .map(|i| (0..m).map(|j| r.pair.p.entry(i, j)).collect())
                .collect(),
            h: r.h.clone(),
            e_c: r.e_c.clone(),
        }
    }
}

pub fn encode_basis(b: &BasisPayload) -> Value {
    let m = b.solutions.len();
    let theta: Vec<Vec<LaurentPoly>> = (0..m)
        .map(|i| (0..m).map(|j| b.theta.entry(i, j)).collect())
        .collect();
    json!({
        "p": b.p,
        "field": encode_field(&b.field),
        "order": b.order,
        "d": b.d,
        "v": b.v,
        "j0": b.j0,
        "K0": b.k0.iter().map(encode_elem).collect::<Vec<_>>(),
        "Omega1": b.omega1.iter().map(encode_xikey).collect::<Vec<_>>(),
        "solutions": b.solutions.iter().map(encode_solution).collect::<Vec<_>>(),
        "Theta": encode_matrix(&theta, encode_laurent),
        "P": encode_matrix(&b.pbar, encode_truncation),
        "H": encode_matrix(&b.h, encode_hahn),
        "e_C": encode_matrix(&b.e_c, encode_const),
    })
}

pub fn decode_basis(v: &Value) -> Res<BasisPayload> {
    let field = decode_field(get(v, "field")?, true)?;
    let f = &field;
    let solutions = array(get(v, "solutions")?, "solutions")?
        .iter()
        .map(|y| decode_solution(y, f))
        .collect::<Res<Vec<_>>>()?;
    let m = solutions.len();
    let theta = decode_matrix(get(v, "Theta")?, "Theta", m, |x| decode_laurent(x, f))?;
    Ok(BasisPayload {
        p: uint(get(v, "p")?, "p")?,
        order: int(get(v, "order")?, "order")?,
        d: uint(get(v, "d")?, "d")?,
        v: int(get(v, "v")?, "v")?,
        j0: uint(get(v, "j0")?, "j0")? as usize,
        k0: array(get(v, "K0")?, "K0")?
            .iter()
            .map(|c| decode_elem(c, f))
            .collect::<Res<Vec<_>>>()?,
        omega1: array(get(v, "Omega1")?, "Omega1")?
            .iter()
            .map(|k| decode_xikey(k, f))
            .collect::<Res<Vec<_>>>()?,
        theta: LaurentMatrix::from_entries(f, m, m, |i, j| theta[i][j].clone()),
        pbar: decode_matrix(get(v, "P")?, "P", m, |x| decode_truncation(x, f))?,
        h: decode_matrix(get(v, "H")?, "H", m, |x| decode_hahn(x, f))?,
        e_c: decode_matrix(get(v, "e_C")?, "e_C", m, |x| decode_const(x, f))?,
        solutions,
        field,
    })
}

/// A solve request: `{"p", "field", "coeffs", "order"}`.
#[derive(Clone, Debug)]
pub struct Job {
    pub equation: MahlerEquation,
    pub order: i64,
}

pub fn parse_json(text: &str) -> Res<Value> {
    serde_json::from_str(text).map_err(|e| {
        bad(format!(
            "malformed JSON at line {} column {}: {e}",
            e.line(),
            e.column()
        ))
    })
}

pub fn decode_job(v: &Value) -> Res<Job> {
    let p = uint(get(v, "p")?, "p")?;
    if p < 2 {
        return Err(bad(format!("radix p = {p} < 2")));
    }
    let field = decode_field(get(v, "field")?, false)?;
    let coeffs = array(get(v, "coeffs")?, "coeffs")?
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let s = c
                .as_str()
                .ok_or_else(|| bad(format!("a_{i} must be a string")))?;
            parse_rational_function(s, &field).map_err(|e| bad(format!("a_{i}: {e}")))
        })
        .collect::<Res<Vec<RationalFunction>>>()?;
    if coeffs.len() < 2 {
        return Err(bad("an equation needs at least two coefficients"));
    }
    if coeffs[0].is_zero() {
        return Err(bad("a_0 = 0"));
    }
    if coeffs[coeffs.len() - 1].is_zero() {
        return Err(bad(format!("a_{} = 0", coeffs.len() - 1)));
    }
    let order = match v.get("order") {
        Some(o) => int(o, "order")?,
        None => 10,
    };
    if order < 0 {
        return Err(bad("order must be nonnegative"));
    }
    Ok(Job {
        equation: MahlerEquation::new(p, &field, coeffs)?,
        order,
    })
}

/// `{"p", "field", "d", "i", "j", "coeffs"}` with coefficients as expression strings.
pub fn encode_entry_equation(eq: &MahlerEquation, d: u64, i: usize, j: usize) -> Value {
    json!({
        "p": eq.p(),
        "field": encode_field(eq.field()),
        "d": d,
        "i": i,
        "j": j,
        "coeffs": eq.coeffs().iter().map(|c| c.to_string()).collect::<Vec<_>>(),
    })
}
