//! Mahler equations and systems, companion matrices, Newton polygons and the
//! ramification index.

use alloc::format;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::fields::{Field, Rational};
use crate::linalg::Mat;
use crate::series::{PuiseuxTruncation, RationalFunction};

/// `a_0 y + a_1 φ_p(y) + … + a_m φ_p^m(y) = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct MahlerEquation {
    p: u64,
    field: Field,
    coeffs: Vec<RationalFunction>,
}

impl MahlerEquation {
    pub fn new(p: u64, field: &Field, coeffs: Vec<RationalFunction>) -> Result<MahlerEquation> {
        if p < 2 {
            return Err(Error::InvalidEquation(format!("radix {p} < 2")));
        }
        if coeffs.len() < 2 {
            return Err(Error::InvalidEquation(format!(
                "order {} < 1",
                coeffs.len().saturating_sub(1)
            )));
        }
        if coeffs.iter().any(|c| c.field() != field) {
            return Err(Error::FieldMismatch);
        }
        if coeffs[0].is_zero() || coeffs[coeffs.len() - 1].is_zero() {
            return Err(Error::InvalidEquation("a_0 a_m = 0".into()));
        }
        Ok(MahlerEquation {
            p,
            field: field.clone(),
            coeffs,
        })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    /// Order `m`.
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[RationalFunction] {
        &self.coeffs
    }

    /// `Σ a_i f(z^{p^i})` as a truncation.
    pub fn apply(&self, f: &PuiseuxTruncation) -> PuiseuxTruncation {
        let mut acc: Option<PuiseuxTruncation> = None;
        let mut g = f.clone();
        for a in &self.coeffs {
            let t = g.mul_rational(a);
            acc = Some(match acc {
                None => t,
                Some(x) => x.add(&t),
            });
            g = g.substitute_power(self.p);
        }
        acc.expect("order ≥ 1")
    }

    /// The equation satisfied by `y(z^d)`: coefficients `a_i(z^d)`.
    pub fn substitute_power(&self, d: usize) -> MahlerEquation {
        MahlerEquation {
            p: self.p,
            field: self.field.clone(),
            coeffs: self.coeffs.iter().map(|c| c.substitute_power(d)).collect(),
        }
    }
}

/// `φ_p(Y) = A Y`.
#[derive(Clone, Debug, PartialEq)]
pub struct MahlerSystem {
    p: u64,
    a: Mat<RationalFunction>,
    companion: bool,
}

impl MahlerSystem {
    pub fn new(p: u64, a: Mat<RationalFunction>) -> Result<MahlerSystem> {
        if p < 2 {
            return Err(Error::InvalidEquation(format!("radix {p} < 2")));
        }
        if !a.is_square() || a.rows() == 0 {
            return Err(Error::DimensionMismatch(format!(
                "system matrix is {}×{}",
                a.rows(),
                a.cols()
            )));
        }
        if a.det().is_zero() {
            return Err(Error::Singular);
        }
        Ok(MahlerSystem {
            p,
            a,
            companion: false,
        })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn field(&self) -> &Field {
        self.a.field()
    }

    pub fn dim(&self) -> usize {
        self.a.rows()
    }

    pub fn matrix(&self) -> &Mat<RationalFunction> {
        &self.a
    }

    pub fn is_companion(&self) -> bool {
        self.companion
    }

    /// `A(z^d)`.
    pub fn substitute_power(&self, d: usize) -> MahlerSystem {
        let a = self
            .a
            .map(self.field(), |r| Ok(r.substitute_power(d)))
            .unwrap();
        MahlerSystem {
            p: self.p,
            a,
            companion: self.companion,
        }
    }

    pub fn embed(&self, to: &Field) -> Result<MahlerSystem> {
        Ok(MahlerSystem {
            p: self.p,
            a: self.a.map(to, |r| r.embed(to))?,
            companion: self.companion,
        })
    }

    pub fn inverse(&self) -> Mat<RationalFunction> {
        self.a.inverse().expect("system matrix is invertible")
    }
}

/// Least valuation among the nonzero entries (0 for the zero matrix).
pub fn matrix_valuation(a: &Mat<RationalFunction>) -> i64 {
    a.entries()
        .iter()
        .filter_map(RationalFunction::valuation)
        .min()
        .unwrap_or(0)
}

/// Companion matrix: sub-identity above, last row `−a_i/a_m`.
pub fn build_companion(eq: &MahlerEquation) -> MahlerSystem {
    let m = eq.order();
    let f = eq.field();
    let am = &eq.coeffs[m];
    let a = Mat::from_fn(f, m, m, |i, j| {
        if i + 1 < m {
            if j == i + 1 {
                RationalFunction::one(f)
            } else {
                RationalFunction::zero(f)
            }
        } else {
            eq.coeffs[j].div(am).unwrap().neg()
        }
    });
    MahlerSystem {
        p: eq.p,
        a,
        companion: true,
    }
}

/// Slopes of the lower convex hull of `{(p^i, val a_i)}`, ascending, distinct.
pub fn newton_slopes(eq: &MahlerEquation) -> Vec<Rational> {
    let p = BigInt::from(eq.p);
    let mut pts: Vec<(BigInt, BigInt)> = Vec::new();
    let mut x = BigInt::one();
    for c in &eq.coeffs {
        if let Some(v) = c.valuation() {
            pts.push((x.clone(), BigInt::from(v)));
        }
        x *= &p;
    }
    // Monotone chain: keep points making counter-clockwise turns.
    let mut hull: Vec<(BigInt, BigInt)> = Vec::new();
    for pt in pts {
        while hull.len() >= 2 {
            let (a, b) = (&hull[hull.len() - 2], &hull[hull.len() - 1]);
            let cross = (&b.0 - &a.0) * (&pt.1 - &a.1) - (&b.1 - &a.1) * (&pt.0 - &a.0);
            if cross <= BigInt::zero() {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(pt);
    }
    let mut slopes: Vec<Rational> = hull
        .windows(2)
        .map(|w| Rational::new(&w[1].1 - &w[0].1, &w[1].0 - &w[0].0))
        .collect();
    slopes.dedup();
    slopes
}

/// Least `d` coprime to `p` with every slope in `d⁻¹ Z[p⁻¹]`.
pub fn ramification_index(slopes: &[Rational], p: u64) -> u64 {
    let p = BigInt::from(p);
    let mut d = BigInt::one();
    for s in slopes {
        let mut b = s.denom().clone();
        loop {
            let g = b.gcd(&p);
            if g.is_one() {
                break;
            }
            b /= g;
        }
        d = d.lcm(&b);
    }
    u64::try_from(d).expect("ramification index fits in u64")
}

/// Check `d | lcm(p − 1, p² − 1, …, p^m − 1)`: each slope denominator, with
/// its `p`-part removed, divides `p^k − 1` for the length `k ≤ m` of its edge.
pub fn check_ramification(d: u64, p: u64, m: usize) -> Result<()> {
    let pb = BigInt::from(p);
    let l = (1..=m as u32).fold(BigInt::one(), |l, k| l.lcm(&(pb.pow(k) - BigInt::one())));
    if (l % BigInt::from(d)).is_zero() {
        Ok(())
    } else {
        Err(Error::InvalidEquation(format!(
            "ramification index {d} does not divide lcm(p^k - 1, k ≤ {m}) for p = {p}"
        )))
    }
}
