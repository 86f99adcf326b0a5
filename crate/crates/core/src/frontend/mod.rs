//! The TSL host language: lexer, parser, name resolution, pretty-printer
//! and control-flow graphs.

pub mod ast;
pub mod cfg;
pub mod check;
pub mod lexer;
pub mod parser;
pub mod pretty;

pub use ast::{AccessPath, Block, CallStmt, ClassDecl, FunctionDecl, MethodDecl, Program, Span, Stmt};
pub use cfg::{build_cfg, Cfg, Node, NodeKind};
pub use check::{class_kind, ClassKind};
pub use pretty::pretty_print;

use crate::error::FrontendError;

/// Parses and resolves a single source.
pub fn parse_program(source: &str) -> Result<Program, FrontendError> {
    check::resolve(parser::parse_syntax(source)?)
}

/// Parses several named sources as one program. Spans record the index of
/// the source they came from.
pub fn parse_sources(sources: &[(String, String)]) -> Result<Program, FrontendError> {
    let mut merged = parser::parse_syntax("")?;
    merged.files.clear();
    for (i, (name, text)) in sources.iter().enumerate() {
        let part = parser::parse_syntax_file(text, i)?;
        merged.files.push(name.clone());
        merged.classes.extend(part.classes);
        merged.functions.extend(part.functions);
    }
    check::resolve(merged)
}
