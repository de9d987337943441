use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use mahler::cli::{self, Format};

/// Exact bases of solutions of linear Mahler equations.
#[derive(Parser)]
#[command(version)]
struct Args {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Compute a basis of solutions.
    Solve {
        #[arg(long)]
        input: PathBuf,
        /// Write the JSON result here.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Mahler equation satisfied by one entry of the fundamental matrix.
    EntryEq {
        #[arg(long)]
        input: PathBuf,
        /// Row, from 1.
        #[arg(long)]
        i: usize,
        /// Column, from 1.
        #[arg(long)]
        j: usize,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Check a stored basis against the job's equation.
    Verify {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        basis: PathBuf,
    },
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let out = match args.cmd {
        Cmd::Solve { input, out, format } => cli::solve(&input, out.as_deref(), format),
        Cmd::EntryEq {
            input,
            i,
            j,
            format,
        } => cli::entry_eq(&input, i, j, format),
        Cmd::Verify { input, basis } => cli::verify(&input, &basis),
    };
    match out {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code())
        }
    }
}
