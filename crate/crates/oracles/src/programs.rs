//! Source-level rewrites whose analysis must agree with the original:
//! loop unrolling and inlining of composed calls.

use std::collections::HashMap;

use tsa_core::frontend::ast::THIS;
use tsa_core::frontend::check::resolve;
use tsa_core::frontend::{AccessPath, Block, CallStmt, Program, Stmt};
use tsa_core::FrontendError;

/// Renames declared locals with a fresh suffix per copy.
struct Fresh {
    next: usize,
}

impl Fresh {
    fn suffix(&mut self) -> String {
        self.next += 1;
        format!("__{}", self.next)
    }
}

/// Copies `block`, renaming the locals it declares and substituting paths
/// through `subst` (root name → replacement path).
fn copy_block(block: &[Stmt], subst: &mut HashMap<String, AccessPath>, suffix: &str) -> Block {
    block
        .iter()
        .map(|s| match s {
            Stmt::Decl { ty, name, span } => {
                let renamed = format!("{name}{suffix}");
                subst.insert(name.clone(), AccessPath::var(&renamed));
                Stmt::Decl {
                    ty: ty.clone(),
                    name: renamed,
                    span: *span,
                }
            }
            Stmt::Call(c) => Stmt::Call(CallStmt {
                receiver: substitute(&c.receiver, subst),
                args: c.args.iter().map(|a| substitute(a, subst)).collect(),
                ..c.clone()
            }),
            Stmt::If {
                then_block,
                else_block,
                span,
            } => Stmt::If {
                then_block: copy_block(then_block, subst, suffix),
                else_block: else_block.as_ref().map(|e| copy_block(e, subst, suffix)),
                span: *span,
            },
            Stmt::Loop { body, span } => Stmt::Loop {
                body: copy_block(body, subst, suffix),
                span: *span,
            },
        })
        .collect()
}

fn substitute(path: &AccessPath, subst: &HashMap<String, AccessPath>) -> AccessPath {
    match subst.get(&path.root) {
        Some(to) => path.rebase(&AccessPath::var(&path.root), to).expect("same root"),
        None => path.clone(),
    }
}

fn unroll_block(block: &[Stmt], k: usize, fresh: &mut Fresh) -> Block {
    let mut out = Vec::new();
    for s in block {
        match s {
            Stmt::Loop { body, span } => {
                let body = unroll_block(body, k, fresh);
                let mut nest: Block = Vec::new();
                for _ in 0..k {
                    let suffix = fresh.suffix();
                    let mut then_block = copy_block(&body, &mut HashMap::new(), &suffix);
                    then_block.extend(nest);
                    nest = vec![Stmt::If {
                        then_block,
                        else_block: None,
                        span: *span,
                    }];
                }
                out.extend(nest);
            }
            Stmt::If {
                then_block,
                else_block,
                span,
            } => out.push(Stmt::If {
                then_block: unroll_block(then_block, k, fresh),
                else_block: else_block.as_ref().map(|e| unroll_block(e, k, fresh)),
                span: *span,
            }),
            other => out.push(other.clone()),
        }
    }
    out
}

/// Replaces every `loop { A }` by `k` nested optional copies of `A`.
/// Statements keep their source positions, so warnings map back.
pub fn unroll_loops(program: &Program, k: usize) -> Result<Program, FrontendError> {
    let mut p = program.clone();
    let mut fresh = Fresh { next: 0 };
    for c in &mut p.classes {
        for m in &mut c.methods {
            if let Some(body) = &m.body {
                m.body = Some(unroll_block(body, k, &mut fresh));
            }
        }
    }
    for f in &mut p.functions {
        f.body = unroll_block(&f.body, k, &mut fresh);
    }
    resolve(p)
}

fn inline_block(program: &Program, block: &[Stmt], fresh: &mut Fresh) -> Block {
    let mut out = Vec::new();
    for s in block {
        match s {
            Stmt::Call(c) if !program.contracts.contains_key(&c.class) && program.class(&c.class).is_some() => {
                let decl = program
                    .class(&c.class)
                    .and_then(|cls| cls.method(&c.method))
                    .expect("resolved call");
                let body = inline_block(program, decl.body.as_deref().unwrap_or(&[]), fresh);
                let mut subst: HashMap<String, AccessPath> = decl
                    .params
                    .iter()
                    .zip(&c.args)
                    .map(|(p, a)| (p.name.clone(), a.clone()))
                    .collect();
                subst.insert(THIS.to_string(), c.receiver.clone());
                let suffix = fresh.suffix();
                out.extend(copy_block(&body, &mut subst, &suffix));
            }
            Stmt::If {
                then_block,
                else_block,
                span,
            } => out.push(Stmt::If {
                then_block: inline_block(program, then_block, fresh),
                else_block: else_block.as_ref().map(|e| inline_block(program, e, fresh)),
                span: *span,
            }),
            Stmt::Loop { body, span } => out.push(Stmt::Loop {
                body: inline_block(program, body, fresh),
                span: *span,
            }),
            other => out.push(other.clone()),
        }
    }
    out
}

/// Replaces calls of composed methods in top-level functions by the
/// callee's body, with `this` and the formals substituted by the actuals.
/// Constructors applied at declarations are left as they are.
pub fn inline_calls(program: &Program) -> Result<Program, FrontendError> {
    let mut p = program.clone();
    let mut fresh = Fresh { next: 0 };
    for f in &mut p.functions {
        f.body = inline_block(program, &f.body, &mut fresh);
    }
    resolve(p)
}
