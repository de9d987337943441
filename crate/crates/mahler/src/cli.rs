//! The three commands, independent of argument parsing.

use std::fs;
use std::path::Path;

use clap::ValueEnum;
use mahler_core::newton::{build_companion, newton_slopes, ramification_index, MahlerEquation};
use mahler_core::solver::{entry_equation, solve_equation, verify_solutions, VerifyReport};
use mahler_core::window::admissible_pair;

use crate::error::CliError;
use crate::json::{
    decode_basis, decode_job, encode_basis, encode_entry_equation, parse_json, BasisPayload, Job,
};
use crate::render::{render_basis, render_equation, render_verify};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

pub fn load_job(path: &Path) -> Result<Job, CliError> {
    decode_job(&parse_json(&read(path)?)?)
}

fn pretty(v: &serde_json::Value) -> String {
    serde_json::to_string_pretty(v).expect("JSON values serialize") + "\n"
}

/// Solve the job; the JSON result goes to `out` when given, and the report
/// in `format` is returned for standard output.
pub fn solve(input: &Path, out: Option<&Path>, format: Format) -> Result<String, CliError> {
    let job = load_job(input)?;
    let res = solve_equation(&job.equation, job.order)?;
    let payload = BasisPayload::from(&res);
    let json = pretty(&encode_basis(&payload));
    if let Some(out) = out {
        fs::write(out, &json).map_err(|e| CliError::Input(format!("{}: {e}", out.display())))?;
    }
    Ok(match format {
        Format::Text => render_basis(&payload),
        Format::Json => json,
    })
}

/// The equation of entry `(i, j)` (1-based) of `P` for the ramified companion system.
pub fn entry_eq(input: &Path, i: usize, j: usize, format: Format) -> Result<String, CliError> {
    let job = load_job(input)?;
    let (d, eq) = compute_entry_equation(&job.equation, i, j)?;
    Ok(match format {
        Format::Text => render_equation(&eq, d),
        Format::Json => pretty(&encode_entry_equation(&eq, d, i, j)),
    })
}

pub fn compute_entry_equation(
    eq: &MahlerEquation,
    i: usize,
    j: usize,
) -> Result<(u64, MahlerEquation), CliError> {
    let m = eq.order();
    if !(1..=m).contains(&i) || !(1..=m).contains(&j) {
        return Err(CliError::Input(format!("entry ({i}, {j}) outside 1..={m}")));
    }
    let d = ramification_index(&newton_slopes(eq), eq.p());
    let sys = build_companion(&eq.substitute_power(d as usize));
    let pair = admissible_pair(&sys)?;
    Ok((d, entry_equation(&pair, &sys, i - 1, j - 1)?))
}

/// Substitute a stored basis into the job's equation.
pub fn verify(input: &Path, basis: &Path) -> Result<String, CliError> {
    let job = load_job(input)?;
    let payload = decode_basis(&parse_json(&read(basis)?)?)?;
    let report = check(&job.equation, &payload)?;
    let text = render_verify(&report);
    if report.ok() {
        Ok(text)
    } else {
        Err(CliError::Verification(text.trim_end().to_string()))
    }
}

pub fn check(eq: &MahlerEquation, b: &BasisPayload) -> Result<VerifyReport, CliError> {
    if b.p != eq.p() {
        return Err(CliError::Input(format!(
            "basis is for p = {}, equation has p = {}",
            b.p,
            eq.p()
        )));
    }
    if b.solutions.len() != eq.order() {
        return Err(CliError::Input(format!(
            "{} solutions for an equation of order {}",
            b.solutions.len(),
            eq.order()
        )));
    }
    if !b.field.contains_field(eq.field()) {
        return Err(CliError::Input(format!(
            "basis field {} does not contain {}",
            b.field,
            eq.field()
        )));
    }
    Ok(verify_solutions(eq, &b.solutions, b.order)?)
}
