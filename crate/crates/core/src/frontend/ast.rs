use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::contracts::{Annotation, ContractMap};

/// 1-based source position; `file` indexes [`Program::files`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Span {
    pub file: usize,
    pub line: usize,
    pub col: usize,
}

impl Span {
    pub fn new(line: usize, col: usize) -> Self {
        Self { file: 0, line, col }
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

pub const THIS: &str = "this";

/// A root variable followed by field selections, e.g. `foo.lu`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct AccessPath {
    pub root: String,
    pub fields: Vec<String>,
}

impl AccessPath {
    pub fn new(root: impl Into<String>, fields: &[&str]) -> Self {
        Self {
            root: root.into(),
            fields: fields.iter().map(|f| f.to_string()).collect(),
        }
    }

    pub fn var(root: impl Into<String>) -> Self {
        Self {
            root: root.into(),
            fields: Vec::new(),
        }
    }

    pub fn child(&self, field: &str) -> Self {
        let mut p = self.clone();
        p.fields.push(field.to_string());
        p
    }

    /// True if `self` equals `other` or selects a field inside it.
    pub fn starts_with(&self, other: &AccessPath) -> bool {
        self.root == other.root && self.fields.starts_with(&other.fields)
    }

    /// Replaces the prefix `from` with `to`; `None` if `from` is not a prefix.
    pub fn rebase(&self, from: &AccessPath, to: &AccessPath) -> Option<AccessPath> {
        if !self.starts_with(from) {
            return None;
        }
        let mut fields = to.fields.clone();
        fields.extend_from_slice(&self.fields[from.fields.len()..]);
        Some(AccessPath {
            root: to.root.clone(),
            fields,
        })
    }
}

impl fmt::Display for AccessPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.root)?;
        for field in &self.fields {
            write!(f, ".{field}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Program {
    /// Source names, indexed by `Span::file`.
    pub files: Vec<String>,
    pub classes: Vec<ClassDecl>,
    pub functions: Vec<FunctionDecl>,
    /// Contracts of the base classes, filled in by name resolution.
    pub contracts: BTreeMap<String, ContractMap>,
}

impl Program {
    pub fn class(&self, name: &str) -> Option<&ClassDecl> {
        self.classes.iter().find(|c| c.name == name)
    }

    pub fn function(&self, name: &str) -> Option<&FunctionDecl> {
        self.functions.iter().find(|f| f.name == name)
    }

    pub fn is_base(&self, class: &str) -> bool {
        self.contracts.contains_key(class)
    }

    /// Copy with every span zeroed, for comparisons that ignore layout.
    pub fn without_spans(&self) -> Program {
        let mut p = self.clone();
        for c in &mut p.classes {
            c.span = Span::default();
            for f in &mut c.fields {
                f.span = Span::default();
            }
            for m in &mut c.methods {
                m.span = Span::default();
                for prm in &mut m.params {
                    prm.span = Span::default();
                }
                if let Some(b) = &mut m.body {
                    strip_block(b);
                }
            }
        }
        for f in &mut p.functions {
            f.span = Span::default();
            strip_block(&mut f.body);
        }
        p
    }
}

fn strip_block(block: &mut [Stmt]) {
    for s in block {
        match s {
            Stmt::Decl { span, .. } => *span = Span::default(),
            Stmt::Call(c) => c.span = Span::default(),
            Stmt::If {
                then_block,
                else_block,
                span,
            } => {
                *span = Span::default();
                strip_block(then_block);
                if let Some(e) = else_block {
                    strip_block(e);
                }
            }
            Stmt::Loop { body, span } => {
                *span = Span::default();
                strip_block(body);
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassDecl {
    pub name: String,
    pub fields: Vec<FieldDecl>,
    pub methods: Vec<MethodDecl>,
    pub span: Span,
}

impl ClassDecl {
    pub fn field(&self, name: &str) -> Option<&FieldDecl> {
        self.fields.iter().find(|f| f.name == name)
    }

    pub fn method(&self, name: &str) -> Option<&MethodDecl> {
        self.methods.iter().find(|m| m.name == name)
    }

    pub fn constructor(&self) -> Option<&MethodDecl> {
        self.method(&self.name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldDecl {
    pub ty: String,
    pub name: String,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Param {
    pub ty: String,
    pub name: String,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MethodDecl {
    pub annotations: Vec<Annotation>,
    pub name: String,
    pub params: Vec<Param>,
    pub body: Option<Block>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FunctionDecl {
    pub name: String,
    pub body: Block,
    pub span: Span,
}

pub type Block = Vec<Stmt>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Stmt {
    /// `Type name;` declares a local and runs its constructor.
    Decl { ty: String, name: String, span: Span },
    Call(CallStmt),
    If {
        then_block: Block,
        else_block: Option<Block>,
        span: Span,
    },
    Loop { body: Block, span: Span },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CallStmt {
    pub receiver: AccessPath,
    pub method: String,
    pub args: Vec<AccessPath>,
    pub span: Span,
    /// Class of the receiver; empty until names are resolved.
    pub class: String,
}
