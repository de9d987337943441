//! Plain-text reports.

use std::fmt::Write;

use mahler_core::newton::MahlerEquation;
use mahler_core::solver::VerifyReport;

use crate::json::BasisPayload;

fn list<T: ToString>(items: &[T]) -> String {
    items
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(", ")
}

pub fn render_basis(b: &BasisPayload) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "p = {}, field = {}, order = {}", b.p, b.field, b.order);
    let _ = writeln!(s, "d = {}, v = {}, j0 = {}", b.d, b.v, b.j0);
    let _ = writeln!(s, "K0 = {{{}}}", list(&b.k0));
    let _ = writeln!(s, "Omega1 = {{{}}}", list(&b.omega1));
    for (i, y) in b.solutions.iter().enumerate() {
        let _ = writeln!(s, "y_{} = {y}", i + 1);
    }
    s
}

pub fn render_verify(r: &VerifyReport) -> String {
    let mut s = String::new();
    for (i, (order, bad)) in r.solutions.iter().enumerate() {
        match bad {
            None => {
                let _ = writeln!(s, "y_{}: residual 0 through order {order}", i + 1);
            }
            Some(msg) => {
                let _ = writeln!(s, "y_{}: {msg}", i + 1);
            }
        }
    }
    s
}

/// `a_0 y(z) + a_1 y(z^p) + ⋯ = 0`, one coefficient per line.
pub fn render_equation(eq: &MahlerEquation, d: u64) -> String {
    let mut s = String::new();
    if d > 1 {
        let _ = writeln!(s, "in the variable z^(1/{d}):");
    }
    for (k, c) in eq.coeffs().iter().enumerate() {
        let _ = writeln!(s, "a_{k} = {c}");
    }
    s
}
