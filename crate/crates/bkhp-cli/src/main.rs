use std::path::PathBuf;
use std::process::ExitCode;

use bkhp_cli::{parse_problem, run, Format, Options, EXIT_INPUT};
use clap::{Parser, ValueEnum};
use num_rational::BigRational;

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FormatArg {
    Text,
    Structured,
}

/// Finite-precision Breuil–Kisin and Hodge-Pink computations.
#[derive(Parser, Debug)]
#[command(name = "bkhp", version)]
struct Cli {
    /// One of: info, tn-th, wa-check, hp-from-filtered, crosscheck-14, diso,
    /// xi, recon-verify, gamma, verdict, ext-build, theta-solve, polygon-check.
    command: String,
    /// Problem document.
    #[arg(long)]
    input: PathBuf,
    /// Largest Frobenius index n examined.
    #[arg(long = "n-max")]
    n_max: Option<u32>,
    /// Cut-off constant, an integer or a fraction a/b.
    #[arg(long = "c-cut")]
    c_cut: Option<String>,
    #[arg(long, value_enum, default_value = "text")]
    format: FormatArg,
    /// Jet depth of the scalar-line analysis.
    #[arg(long)]
    depth: Option<i64>,
}

fn fail(code: i32, msg: &str) -> ExitCode {
    eprintln!("bkhp: {msg}");
    ExitCode::from(code as u8)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_INPUT as u8 } else { 0 });
        }
    };
    let text = match std::fs::read_to_string(&cli.input) {
        Ok(t) => t,
        Err(e) => {
            return fail(
                EXIT_INPUT,
                &format!("cannot read {}: {e}", cli.input.display()),
            )
        }
    };
    let c_cut = match cli.c_cut.as_deref().map(str::parse::<BigRational>) {
        None => None,
        Some(Ok(c)) => Some(c),
        Some(Err(_)) => return fail(EXIT_INPUT, "--c-cut expects an integer or a fraction a/b"),
    };
    let doc = match parse_problem(&text) {
        Ok(d) => d,
        Err(e) => return fail(EXIT_INPUT, &format!("{}:{e}", cli.input.display())),
    };
    let opts = Options {
        n_max: cli.n_max,
        c_cut,
        depth: cli.depth,
    };
    match run(&cli.command, &doc, &opts) {
        Ok(out) => {
            let format = match cli.format {
                FormatArg::Text => Format::Text,
                FormatArg::Structured => Format::Structured,
            };
            print!("{}", out.report.emit(format));
            ExitCode::from(out.exit_code() as u8)
        }
        Err(f) => fail(f.code, &f.msg),
    }
}
