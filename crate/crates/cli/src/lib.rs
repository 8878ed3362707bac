//! Surface language, declaration pipeline and reporting.

pub mod ast;
pub mod lexer;
pub mod parser;
pub mod runner;

pub use lexer::ParseError;
pub use runner::{run, Development, Entity, Report, RunError, RunOptions};

/// Parse and run a whole source file.
pub fn check_source(src: &str, opts: RunOptions) -> Result<(Development, Report), ParseError> {
    let decls = parser::parse_file(src)?;
    Ok(runner::run(&decls, opts))
}
