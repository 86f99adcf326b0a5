//! Recursive-descent parser producing an unresolved [`Program`].

use std::collections::BTreeMap;

use crate::contracts::{Annotation, AnnotationKind};
use crate::error::FrontendError;
use crate::frontend::ast::*;
use crate::frontend::lexer::{tokenize_file, Tok, Token};

pub fn parse_syntax(source: &str) -> Result<Program, FrontendError> {
    parse_syntax_file(source, 0)
}

/// Parses one source whose spans are tagged with file index `file`.
pub fn parse_syntax_file(source: &str, file: usize) -> Result<Program, FrontendError> {
    let tokens = tokenize_file(source, file)?;
    let mut p = Parser { tokens, pos: 0 };
    let mut program = Program {
        files: vec!["<input>".to_string()],
        classes: Vec::new(),
        functions: Vec::new(),
        contracts: BTreeMap::new(),
    };
    loop {
        match p.peek() {
            Tok::Eof => break,
            Tok::Keyword("class") => program.classes.push(p.class()?),
            Tok::Keyword("void") => program.functions.push(p.function()?),
            _ => return Err(p.unexpected("`class` or `void`")),
        }
    }
    Ok(program)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.tokens[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        let i = (self.pos + k).min(self.tokens.len() - 1);
        &self.tokens[i].tok
    }

    fn span(&self) -> Span {
        self.tokens[self.pos].span
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn unexpected(&self, expected: &str) -> FrontendError {
        let span = self.span();
        FrontendError::SyntaxError {
            line: span.line,
            col: span.col,
            expected: expected.to_string(),
            found: self.peek().to_string(),
        }
    }

    fn punct(&mut self, c: char) -> Result<Span, FrontendError> {
        if *self.peek() == Tok::Punct(c) {
            Ok(self.bump().span)
        } else {
            Err(self.unexpected(&format!("`{c}`")))
        }
    }

    fn keyword(&mut self, k: &str) -> Result<Span, FrontendError> {
        if *self.peek() == Tok::Keyword(kw(k)) {
            Ok(self.bump().span)
        } else {
            Err(self.unexpected(&format!("`{k}`")))
        }
    }

    fn eat_punct(&mut self, c: char) -> bool {
        if *self.peek() == Tok::Punct(c) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn ident(&mut self) -> Result<(String, Span), FrontendError> {
        match self.peek().clone() {
            Tok::Ident(s) => Ok((s, self.bump().span)),
            _ => Err(self.unexpected("identifier")),
        }
    }

    fn class(&mut self) -> Result<ClassDecl, FrontendError> {
        self.keyword("class")?;
        let (name, span) = self.ident()?;
        self.punct('{')?;
        let mut fields = Vec::new();
        while matches!(self.peek(), Tok::Ident(_)) {
            let (ty, span) = self.ident()?;
            let (fname, _) = self.ident()?;
            self.punct(';')?;
            fields.push(FieldDecl {
                ty,
                name: fname,
                span,
            });
        }
        let mut methods = Vec::new();
        while *self.peek() != Tok::Punct('}') {
            methods.push(self.method()?);
        }
        self.punct('}')?;
        Ok(ClassDecl {
            name,
            fields,
            methods,
            span,
        })
    }

    fn annotation(&mut self) -> Result<Annotation, FrontendError> {
        self.punct('@')?;
        let at = self.span();
        let (word, _) = self.ident()?;
        let kind = AnnotationKind::from_keyword(&word).ok_or(FrontendError::SyntaxError {
            line: at.line,
            col: at.col,
            expected: "annotation kind".into(),
            found: format!("`{word}`"),
        })?;
        let mut names = Vec::new();
        if kind.takes_names() {
            self.punct('(')?;
            loop {
                names.push(self.ident()?.0);
                if !self.eat_punct(',') {
                    break;
                }
            }
            self.punct(')')?;
        }
        Ok(Annotation { kind, names })
    }

    fn method(&mut self) -> Result<MethodDecl, FrontendError> {
        let mut annotations = Vec::new();
        while *self.peek() == Tok::Punct('@') {
            annotations.push(self.annotation()?);
        }
        self.keyword("void")?;
        let (name, span) = self.ident()?;
        self.punct('(')?;
        let mut params = Vec::new();
        if *self.peek() != Tok::Punct(')') {
            loop {
                let (ty, span) = self.ident()?;
                let (pname, _) = self.ident()?;
                params.push(Param {
                    ty,
                    name: pname,
                    span,
                });
                if !self.eat_punct(',') {
                    break;
                }
            }
        }
        self.punct(')')?;
        let body = if self.eat_punct(';') {
            None
        } else if *self.peek() == Tok::Punct('{') {
            Some(self.block()?)
        } else {
            return Err(self.unexpected("`;` or `{`"));
        };
        Ok(MethodDecl {
            annotations,
            name,
            params,
            body,
            span,
        })
    }

    fn function(&mut self) -> Result<FunctionDecl, FrontendError> {
        self.keyword("void")?;
        let (name, span) = self.ident()?;
        self.punct('(')?;
        self.punct(')')?;
        let body = self.block()?;
        Ok(FunctionDecl { name, body, span })
    }

    fn block(&mut self) -> Result<Block, FrontendError> {
        self.punct('{')?;
        let mut stmts = Vec::new();
        while *self.peek() != Tok::Punct('}') {
            stmts.push(self.stmt()?);
        }
        self.punct('}')?;
        Ok(stmts)
    }

    fn stmt(&mut self) -> Result<Stmt, FrontendError> {
        let span = self.span();
        match self.peek().clone() {
            Tok::Keyword("if") => {
                self.bump();
                self.punct('(')?;
                self.punct('?')?;
                self.punct(')')?;
                let then_block = self.block()?;
                let else_block = if *self.peek() == Tok::Keyword("else") {
                    self.bump();
                    Some(self.block()?)
                } else {
                    None
                };
                Ok(Stmt::If {
                    then_block,
                    else_block,
                    span,
                })
            }
            Tok::Keyword("loop") => {
                self.bump();
                Ok(Stmt::Loop {
                    body: self.block()?,
                    span,
                })
            }
            Tok::Ident(ty) if matches!(self.peek_at(1), Tok::Ident(_)) => {
                self.bump();
                let (name, _) = self.ident()?;
                self.punct(';')?;
                Ok(Stmt::Decl { ty, name, span })
            }
            Tok::Ident(_) | Tok::Keyword("this") => {
                let mut names = self.path_segments()?;
                if names.len() < 2 || *self.peek() != Tok::Punct('(') {
                    return Err(self.unexpected("`(`"));
                }
                let method = names.pop().unwrap();
                let receiver = to_path(names);
                self.punct('(')?;
                let mut args = Vec::new();
                if *self.peek() != Tok::Punct(')') {
                    loop {
                        args.push(self.path()?);
                        if !self.eat_punct(',') {
                            break;
                        }
                    }
                }
                self.punct(')')?;
                self.punct(';')?;
                Ok(Stmt::Call(CallStmt {
                    receiver,
                    method,
                    args,
                    span,
                    class: String::new(),
                }))
            }
            _ => Err(self.unexpected("statement")),
        }
    }

    fn path_segments(&mut self) -> Result<Vec<String>, FrontendError> {
        let root = match self.peek().clone() {
            Tok::Keyword("this") => {
                self.bump();
                THIS.to_string()
            }
            Tok::Ident(s) => {
                self.bump();
                s
            }
            _ => return Err(self.unexpected("`this` or identifier")),
        };
        let mut names = vec![root];
        while self.eat_punct('.') {
            names.push(self.ident()?.0);
        }
        Ok(names)
    }

    fn path(&mut self) -> Result<AccessPath, FrontendError> {
        Ok(to_path(self.path_segments()?))
    }
}

fn to_path(mut names: Vec<String>) -> AccessPath {
    let root = names.remove(0);
    AccessPath {
        root,
        fields: names,
    }
}

/// Keyword tokens carry `&'static str`; map a literal to the interned one.
fn kw(k: &str) -> &'static str {
    crate::frontend::lexer::KEYWORDS
        .iter()
        .find(|w| **w == k)
        .expect("known keyword")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_input() {
        let p = parse_syntax("").unwrap();
        assert!(p.classes.is_empty() && p.functions.is_empty());
    }

    #[test]
    fn class_with_annotations() {
        let p = parse_syntax(
            "class S {\n  @EnableOnly(b, c)\n  @EnableAll\n  void a(Matrix m);\n  void b();\n}",
        )
        .unwrap();
        let c = &p.classes[0];
        assert_eq!(c.methods.len(), 2);
        assert_eq!(c.methods[0].annotations.len(), 2);
        assert_eq!(c.methods[0].annotations[0].names, vec!["b", "c"]);
        assert_eq!(c.methods[0].params[0].ty, "Matrix");
        assert_eq!(c.methods[0].span, Span::new(4, 8));
        assert!(c.methods[0].body.is_none());
    }

    #[test]
    fn statements() {
        let p = parse_syntax(
            "void f() {\n Foo foo;\n foo.a.m(x, this.y);\n if (?) { foo.n(); } else { }\n loop { }\n}",
        )
        .unwrap();
        let body = &p.functions[0].body;
        assert!(matches!(body[0], Stmt::Decl { .. }));
        let Stmt::Call(c) = &body[1] else { panic!() };
        assert_eq!(c.receiver, AccessPath::new("foo", &["a"]));
        assert_eq!(c.method, "m");
        assert_eq!(c.args[1], AccessPath::new("this", &["y"]));
        assert_eq!(c.span, Span::new(3, 2));
        assert!(matches!(&body[2], Stmt::If { else_block: Some(_), .. }));
        assert!(matches!(&body[3], Stmt::Loop { .. }));
    }

    #[test]
    fn syntax_errors_carry_positions() {
        let err = parse_syntax("void f() {\n  foo.m()\n}").unwrap_err();
        assert!(matches!(err, FrontendError::SyntaxError { line: 3, col: 1, .. }));
        assert!(parse_syntax("class A { @Bogus void m(); }").is_err());
        assert!(parse_syntax("class A { @EnableAll(m) void m(); }").is_err());
        assert!(parse_syntax("void f() { foo(); }").is_err());
        assert!(parse_syntax("void f() { if (x) { } }").is_err());
        assert!(parse_syntax("void f(A a) { }").is_err());
    }
}
