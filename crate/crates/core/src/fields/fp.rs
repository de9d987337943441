//! Dense polynomials over a prime field F_p and reduced fractions of them.

use alloc::vec;
use alloc::vec::Vec;

/// Coefficients low to high, no trailing zeros. The zero polynomial is empty.
pub type FpPoly = Vec<u64>;

pub(crate) fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

pub(crate) fn powmod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1 % p;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, a, p);
        }
        a = mulmod(a, a, p);
        e >>= 1;
    }
    r
}

pub(crate) fn invmod(a: u64, p: u64) -> u64 {
    powmod(a, p - 2, p)
}

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

pub(crate) fn trim(a: &mut FpPoly) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

pub(crate) fn deg(a: &[u64]) -> Option<usize> {
    a.len().checked_sub(1)
}

pub(crate) fn add(a: &[u64], b: &[u64], p: u64) -> FpPoly {
    let n = a.len().max(b.len());
    let mut r: FpPoly = (0..n)
        .map(|i| (a.get(i).copied().unwrap_or(0) + b.get(i).copied().unwrap_or(0)) % p)
        .collect();
    trim(&mut r);
    r
}

pub(crate) fn neg(a: &[u64], p: u64) -> FpPoly {
    a.iter().map(|&c| (p - c) % p).collect()
}

pub(crate) fn scale(a: &[u64], c: u64, p: u64) -> FpPoly {
    let mut r: FpPoly = a.iter().map(|&x| mulmod(x, c, p)).collect();
    trim(&mut r);
    r
}

pub(crate) fn mul(a: &[u64], b: &[u64], p: u64) -> FpPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut r = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            r[i + j] = (r[i + j] + mulmod(x, y, p)) % p;
        }
    }
    trim(&mut r);
    r
}

/// Quotient and remainder; `b` must be nonzero.
pub(crate) fn divrem(a: &[u64], b: &[u64], p: u64) -> (FpPoly, FpPoly) {
    let db = b.len() - 1;
    let inv_lead = invmod(b[db], p);
    let mut r = a.to_vec();
    if r.len() <= db {
        return (Vec::new(), r);
    }
    let mut q = vec![0u64; r.len() - db];
    for k in (0..q.len()).rev() {
        let c = mulmod(r[k + db], inv_lead, p);
        q[k] = c;
        if c != 0 {
            for (j, &y) in b.iter().enumerate() {
                r[k + j] = (r[k + j] + p - mulmod(c, y, p)) % p;
            }
        }
    }
    trim(&mut q);
    trim(&mut r);
    (q, r)
}

pub(crate) fn monic(a: &[u64], p: u64) -> FpPoly {
    match a.last() {
        None => Vec::new(),
        Some(&l) => scale(a, invmod(l, p), p),
    }
}

pub(crate) fn gcd(a: &[u64], b: &[u64], p: u64) -> FpPoly {
    let (mut x, mut y) = (a.to_vec(), b.to_vec());
    while !y.is_empty() {
        let (_, r) = divrem(&x, &y, p);
        x = y;
        y = r;
    }
    monic(&x, p)
}

/// Square root of a polynomial over F_p (p odd), if it is a perfect square.
pub(crate) fn sqrt(a: &[u64], p: u64) -> Option<FpPoly> {
    if a.is_empty() {
        return Some(Vec::new());
    }
    let n = a.len() - 1;
    if n % 2 == 1 {
        return None;
    }
    let lead = sqrt_mod(a[n], p)?;
    let h = n / 2;
    // Determine coefficients from the top down: r = Σ r_k x^k with r_h = lead.
    let mut r = vec![0u64; h + 1];
    r[h] = lead;
    let inv2l = invmod(mulmod(2, lead, p), p);
    for k in (0..h).rev() {
        // Coefficient of x^{h+k} in r² must match a[h+k].
        let mut s = 0u64;
        for i in (k + 1)..=h {
            let j = h + k - i;
            if j > k && j <= h {
                s = (s + mulmod(r[i], r[j], p)) % p;
            }
        }
        let target = (a[h + k] + p - s) % p;
        r[k] = mulmod(target, inv2l, p);
    }
    let mut rr = r;
    trim(&mut rr);
    if mul(&rr, &rr, p) == a {
        Some(rr)
    } else {
        None
    }
}

pub(crate) fn sqrt_mod(a: u64, p: u64) -> Option<u64> {
    let a = a % p;
    (0..p).find(|&x| mulmod(x, x, p) == a)
}

/// All monic divisors of `a` of degree at most `deg(a)`, by enumeration.
/// Returns `None` when the search space exceeds `cap`.
pub(crate) fn monic_divisors(a: &[u64], p: u64, cap: u64) -> Option<Vec<FpPoly>> {
    let d = deg(a)?;
    let mut total: u64 = 0;
    let mut pk: u64 = 1;
    for _ in 0..=d {
        total = total.checked_add(pk)?;
        pk = pk.checked_mul(p)?;
    }
    if total > cap {
        return None;
    }
    let mut out = Vec::new();
    for k in 0..=d {
        let count = p.checked_pow(k as u32)?;
        for idx in 0..count {
            let mut q = Vec::with_capacity(k + 1);
            let mut t = idx;
            for _ in 0..k {
                q.push(t % p);
                t /= p;
            }
            q.push(1);
            if divrem(a, &q, p).1.is_empty() {
                out.push(q);
            }
        }
    }
    Some(out)
}

/// Reduced fraction with monic denominator; zero is `0/1`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FpFrac {
    pub num: FpPoly,
    pub den: FpPoly,
}

impl FpFrac {
    pub fn new(num: FpPoly, den: FpPoly, p: u64) -> Option<FpFrac> {
        if den.is_empty() {
            return None;
        }
        if num.is_empty() {
            return Some(FpFrac { num, den: vec![1] });
        }
        let g = gcd(&num, &den, p);
        let n = divrem(&num, &g, p).0;
        let d = divrem(&den, &g, p).0;
        let l = invmod(*d.last().unwrap(), p);
        Some(FpFrac {
            num: scale(&n, l, p),
            den: scale(&d, l, p),
        })
    }

    pub fn constant(c: u64, p: u64) -> FpFrac {
        let mut num = vec![c % p];
        trim(&mut num);
        FpFrac { num, den: vec![1] }
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_empty()
    }

    pub fn add(&self, o: &FpFrac, p: u64) -> FpFrac {
        let n = add(&mul(&self.num, &o.den, p), &mul(&o.num, &self.den, p), p);
        FpFrac::new(n, mul(&self.den, &o.den, p), p).unwrap()
    }

    pub fn neg(&self, p: u64) -> FpFrac {
        FpFrac {
            num: neg(&self.num, p),
            den: self.den.clone(),
        }
    }

    pub fn mul(&self, o: &FpFrac, p: u64) -> FpFrac {
        FpFrac::new(mul(&self.num, &o.num, p), mul(&self.den, &o.den, p), p).unwrap()
    }

    pub fn inv(&self, p: u64) -> Option<FpFrac> {
        if self.is_zero() {
            return None;
        }
        FpFrac::new(self.den.clone(), self.num.clone(), p)
    }
}
