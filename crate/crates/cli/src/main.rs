use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use cattlim::ast::{Decl, DeclKind, JName};
use cattlim::runner::{run, RunOptions};
use cattlim::{parser, Report};

#[derive(Parser)]
#[command(name = "cattlim", about = "Checker for omega-categories with lax limits", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check every declaration in a file.
    Check {
        file: PathBuf,
        /// Write the derivation trees of all declarations as JSON.
        #[arg(long, value_name = "PATH")]
        json_derivations: Option<PathBuf>,
        /// Echo elaborated contexts and heads in the report.
        #[arg(long)]
        print_elaborated: bool,
        /// Stop at the first failed assertion.
        #[arg(long)]
        strict_asserts: bool,
        /// Print per-declaration timings to stderr.
        #[arg(long)]
        timings: bool,
    },
    /// Check a file, then synthesize and print the cone over a context.
    Cone { file: PathBuf, name: String },
    /// Check a file, then synthesize and print the interval Gray product.
    Gray { file: PathBuf, name: String },
    /// Check a file, then build and print the universal cone.
    Limit { file: PathBuf, name: String },
    /// Check a file, then apply one universal-property rule.
    Apply {
        rule: String,
        file: PathBuf,
        session: String,
        whisk: String,
    },
}

fn load(file: &PathBuf) -> Result<Vec<Decl>, ExitCode> {
    let src = match std::fs::read_to_string(file) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", file.display());
            return Err(ExitCode::from(2));
        }
    };
    parser::parse_file(&src).map_err(|e| {
        eprintln!("parse error: {}: {e}", file.display());
        ExitCode::from(2)
    })
}

fn finish(report: &Report) -> ExitCode {
    print!("{}", report.text());
    ExitCode::from(report.exit_code() as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Check { file, json_derivations, print_elaborated, strict_asserts, timings } => {
            let decls = match load(&file) {
                Ok(d) => d,
                Err(code) => return code,
            };
            let opts = RunOptions { print_elaborated, strict_asserts, timings };
            let (_, report) = run(&decls, opts);
            if let Some(path) = json_derivations {
                let json = serde_json::to_string_pretty(&report.derivations)
                    .expect("derivations always serialize");
                if let Err(e) = std::fs::write(&path, json) {
                    eprintln!("error: cannot write {}: {e}", path.display());
                    return ExitCode::from(2);
                }
            }
            finish(&report)
        }
        Command::Cone { file, name } => directive(file, "cone", &name),
        Command::Gray { file, name } => directive(file, "gray", &name),
        Command::Limit { file, name } => directive(file, "limit", &name),
        Command::Apply { rule, file, session, whisk } => {
            let mut decls = match load(&file) {
                Ok(d) => d,
                Err(code) => return code,
            };
            let jname = match rule.as_str() {
                "J1" => JName::J1,
                "J2" => JName::J2,
                "J3" => JName::J3,
                "J4" => JName::J4,
                other => {
                    eprintln!("error: unknown rule `{other}`");
                    return ExitCode::from(2);
                }
            };
            decls.push(Decl {
                name: format!("{rule}@cli"),
                kind: DeclKind::Apply {
                    rule: jname,
                    session,
                    whisk,
                    cut: None,
                    bind: None,
                },
                pos: cattlim::lexer::Pos { line: 0, col: 0 },
            });
            let (_, report) = run(&decls, RunOptions::default());
            finish(&report)
        }
    }
}

/// Append a synthesized directive over a named context and run.
fn directive(file: PathBuf, kind: &str, name: &str) -> ExitCode {
    let mut decls = match load(&file) {
        Ok(d) => d,
        Err(code) => return code,
    };
    let of = name.to_string();
    let kind_ast = match kind {
        "cone" => DeclKind::Cone { of },
        "gray" => DeclKind::Gray { of },
        _ => DeclKind::Limit { of },
    };
    decls.push(Decl {
        name: format!("{kind}@cli"),
        kind: kind_ast,
        pos: cattlim::lexer::Pos { line: 0, col: 0 },
    });
    let (_, report) = run(&decls, RunOptions::default());
    finish(&report)
}
