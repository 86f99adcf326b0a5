//! Name resolution and type checks. Fills in receiver classes on calls and
//! builds the contracts of base classes.

use std::collections::{BTreeMap, HashMap, HashSet};

use crate::contracts::{build_contract, ClassContractDecl};
use crate::error::FrontendError;
use crate::frontend::ast::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClassKind {
    /// Body-less methods; the contract comes from the annotations.
    Base,
    /// Methods with bodies; the contract is implied by the members.
    Composed,
}

fn name_error(span: Span, message: String) -> FrontendError {
    FrontendError::NameResolutionError {
        line: span.line,
        col: span.col,
        message,
    }
}

fn type_error(span: Span, message: String) -> FrontendError {
    FrontendError::TypeError {
        line: span.line,
        col: span.col,
        message,
    }
}

pub fn class_kind(class: &ClassDecl) -> Result<ClassKind, FrontendError> {
    let with_body = class.methods.iter().filter(|m| m.body.is_some()).count();
    if with_body == 0 && !class.methods.is_empty() {
        if let Some(f) = class.fields.first() {
            return Err(type_error(
                f.span,
                format!("base class `{}` cannot declare fields", class.name),
            ));
        }
        return Ok(ClassKind::Base);
    }
    for m in &class.methods {
        if m.body.is_none() {
            return Err(type_error(
                m.span,
                format!(
                    "`{}.{}` has no body but other methods of the class do",
                    class.name, m.name
                ),
            ));
        }
        if !m.annotations.is_empty() {
            return Err(type_error(
                m.span,
                format!(
                    "`{}.{}`: annotations are only allowed on body-less methods",
                    class.name, m.name
                ),
            ));
        }
    }
    Ok(ClassKind::Composed)
}

pub fn resolve(mut program: Program) -> Result<Program, FrontendError> {
    let mut seen = HashSet::new();
    for c in &program.classes {
        if !seen.insert(c.name.as_str()) {
            return Err(name_error(c.span, format!("duplicate class `{}`", c.name)));
        }
    }
    let mut seen = HashSet::new();
    for f in &program.functions {
        if !seen.insert(f.name.as_str()) {
            return Err(name_error(f.span, format!("duplicate function `{}`", f.name)));
        }
    }

    let mut contracts = BTreeMap::new();
    for c in &program.classes {
        check_members(c)?;
        if class_kind(c)? == ClassKind::Base {
            let decl = ClassContractDecl {
                class_name: c.name.clone(),
                methods: c
                    .methods
                    .iter()
                    .map(|m| (m.name.clone(), m.annotations.clone()))
                    .collect(),
            };
            contracts.insert(c.name.clone(), build_contract(&decl)?);
        }
    }
    program.contracts = contracts;
    check_containment(&program)?;

    let classes: HashMap<String, ClassDecl> = program
        .classes
        .iter()
        .map(|c| (c.name.clone(), c.clone()))
        .collect();
    for class in &mut program.classes {
        for m in &mut class.methods {
            let Some(body) = &mut m.body else { continue };
            let mut env = Env::new(&classes, Some(class.name.clone()));
            for p in &m.params {
                env.declare(&p.name, &p.ty, p.span)?;
            }
            env.block(body)?;
        }
    }
    for f in &mut program.functions {
        let mut env = Env::new(&classes, None);
        env.block(&mut f.body)?;
    }
    Ok(program)
}

fn check_members(c: &ClassDecl) -> Result<(), FrontendError> {
    let mut names = HashSet::new();
    for f in &c.fields {
        if !names.insert(f.name.as_str()) {
            return Err(name_error(
                f.span,
                format!("duplicate field `{}.{}`", c.name, f.name),
            ));
        }
    }
    let mut names = HashSet::new();
    for m in &c.methods {
        if !names.insert(m.name.as_str()) {
            return Err(name_error(
                m.span,
                format!("duplicate method `{}.{}`", c.name, m.name),
            ));
        }
        if m.name == c.name && !m.params.is_empty() {
            return Err(type_error(
                m.span,
                format!("constructor `{}` cannot take parameters", c.name),
            ));
        }
        let mut params = HashSet::new();
        for p in &m.params {
            if p.name == THIS || !params.insert(p.name.as_str()) {
                return Err(name_error(
                    p.span,
                    format!("duplicate parameter `{}` in `{}.{}`", p.name, c.name, m.name),
                ));
            }
        }
    }
    Ok(())
}

/// Rejects composed classes that contain themselves through fields, which
/// would give an object infinitely many access paths.
fn check_containment(program: &Program) -> Result<(), FrontendError> {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        Open,
        Done,
    }
    fn visit<'a>(
        program: &'a Program,
        class: &'a ClassDecl,
        marks: &mut HashMap<&'a str, Mark>,
    ) -> Result<(), FrontendError> {
        marks.insert(&class.name, Mark::Open);
        for f in &class.fields {
            let Some(inner) = program.class(&f.ty) else { continue };
            match marks.get(inner.name.as_str()) {
                Some(Mark::Open) => {
                    return Err(type_error(
                        f.span,
                        format!("class `{}` contains itself through field `{}`", inner.name, f.name),
                    ))
                }
                Some(Mark::Done) => {}
                None => visit(program, inner, marks)?,
            }
        }
        marks.insert(&class.name, Mark::Done);
        Ok(())
    }
    let mut marks = HashMap::new();
    for c in &program.classes {
        if !marks.contains_key(c.name.as_str()) {
            visit(program, c, &mut marks)?;
        }
    }
    Ok(())
}

struct Env<'a> {
    classes: &'a HashMap<String, ClassDecl>,
    this_class: Option<String>,
    scopes: Vec<HashMap<String, String>>,
    /// Every name declared anywhere in the body; locals may not be reused.
    used: HashSet<String>,
}

impl<'a> Env<'a> {
    fn new(classes: &'a HashMap<String, ClassDecl>, this_class: Option<String>) -> Self {
        Self {
            classes,
            this_class,
            scopes: vec![HashMap::new()],
            used: HashSet::new(),
        }
    }

    fn declare(&mut self, name: &str, ty: &str, span: Span) -> Result<(), FrontendError> {
        if name == THIS || !self.used.insert(name.to_string()) {
            return Err(name_error(span, format!("`{name}` is already declared")));
        }
        self.scopes
            .last_mut()
            .expect("scope")
            .insert(name.to_string(), ty.to_string());
        Ok(())
    }

    fn lookup(&self, name: &str) -> Option<&str> {
        self.scopes
            .iter()
            .rev()
            .find_map(|s| s.get(name))
            .map(String::as_str)
    }

    fn path_type(&self, path: &AccessPath, span: Span) -> Result<String, FrontendError> {
        let mut ty = if path.root == THIS {
            self.this_class
                .clone()
                .ok_or_else(|| name_error(span, "`this` outside a method".into()))?
        } else {
            self.lookup(&path.root)
                .ok_or_else(|| name_error(span, format!("unknown variable `{}`", path.root)))?
                .to_string()
        };
        for f in &path.fields {
            let field = self
                .classes
                .get(&ty)
                .and_then(|c| c.field(f))
                .ok_or_else(|| name_error(span, format!("type `{ty}` has no field `{f}`")))?;
            ty = field.ty.clone();
        }
        Ok(ty)
    }

    fn block(&mut self, block: &mut Block) -> Result<(), FrontendError> {
        self.scopes.push(HashMap::new());
        for stmt in block.iter_mut() {
            match stmt {
                Stmt::Decl { ty, name, span } => self.declare(name, ty, *span)?,
                Stmt::Call(call) => self.call(call)?,
                Stmt::If {
                    then_block,
                    else_block,
                    ..
                } => {
                    self.block(then_block)?;
                    if let Some(e) = else_block {
                        self.block(e)?;
                    }
                }
                Stmt::Loop { body, .. } => self.block(body)?,
            }
        }
        self.scopes.pop();
        Ok(())
    }

    fn call(&mut self, call: &mut CallStmt) -> Result<(), FrontendError> {
        let span = call.span;
        let ty = self.path_type(&call.receiver, span)?;
        let class = self
            .classes
            .get(&ty)
            .ok_or_else(|| type_error(span, format!("type `{ty}` declares no methods")))?;
        let method = class
            .method(&call.method)
            .filter(|m| m.name != class.name)
            .ok_or_else(|| {
                type_error(
                    span,
                    format!("class `{ty}` has no callable method `{}`", call.method),
                )
            })?;
        if method.params.len() != call.args.len() {
            return Err(type_error(
                span,
                format!(
                    "`{ty}.{}` takes {} argument(s), {} given",
                    call.method,
                    method.params.len(),
                    call.args.len()
                ),
            ));
        }
        let mut tracked = vec![call.receiver.clone()];
        for (arg, param) in call.args.iter().zip(&method.params) {
            let arg_ty = self.path_type(arg, span)?;
            if self.classes.contains_key(&param.ty) && arg_ty != param.ty {
                return Err(type_error(
                    span,
                    format!(
                        "argument `{arg}` has type `{arg_ty}`, `{ty}.{}` expects `{}`",
                        call.method, param.ty
                    ),
                ));
            }
            if self.classes.contains_key(&arg_ty) {
                tracked.push(arg.clone());
            }
        }
        // Summaries assume distinct objects for the receiver and arguments.
        let composed = method.body.is_some();
        if composed {
            for (i, a) in tracked.iter().enumerate() {
                for b in &tracked[i + 1..] {
                    if a.starts_with(b) || b.starts_with(a) {
                        return Err(type_error(
                            span,
                            format!("`{a}` and `{b}` may alias in call to `{ty}.{}`", call.method),
                        ));
                    }
                }
            }
        }
        call.class = ty;
        Ok(())
    }
}
