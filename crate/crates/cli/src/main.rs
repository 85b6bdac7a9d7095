//! `conc-bounds`: compute, compare, and empirically certify sub-Gaussian
//! norm-concentration bounds.
//!
//! Records go to stdout (JSON lines by default, CSV with `--format csv`),
//! logs to stderr.  Exit codes: 0 success, 1 verification failure, 2
//! usage error, 3 numerical failure.

mod args;
mod cmds;
mod output;

use clap::Parser;

use args::{BoundKind, Cli, Command, FormatArg};
use cmds::CmdError;
use output::{Emitter, Format};

fn main() {
    let cli = Cli::parse();
    let format = match cli.format {
        FormatArg::Json => Format::Json,
        FormatArg::Csv => Format::Csv,
    };
    let mut em = Emitter::new(format);
    let seed = cli.seed.unwrap_or(0);
    let result = match &cli.command {
        Command::Phi(a) => cmds::cmd_phi(a, &mut em),
        Command::Bound(a) => match &a.kind {
            BoundKind::Vector(v) => cmds::cmd_bound_vector(v, &mut em),
            BoundKind::Matrix(m) => cmds::cmd_bound_matrix(m, &mut em),
        },
        Command::Compare(a) => cmds::cmd_compare(a, &mut em),
        Command::Table(a) => cmds::cmd_table(a),
        Command::Verify(a) => cmds::cmd_verify(&a.suite, seed, cli.strict, &mut em),
    };
    let code = match result {
        Ok(code) => code,
        Err(CmdError::Usage(msg)) => {
            eprintln!("error: {msg}");
            2
        }
        Err(CmdError::Numerical(e)) => {
            eprintln!("error: {e}");
            3
        }
    };
    std::process::exit(code);
}
