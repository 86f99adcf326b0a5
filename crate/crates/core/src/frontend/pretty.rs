//! Canonical source rendering. Parsing the output yields the same program.

use std::fmt::Write as _;

use crate::frontend::ast::*;

pub fn pretty_print(program: &Program) -> String {
    let mut out = String::new();
    for (i, c) in program.classes.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        class(&mut out, c);
    }
    for f in &program.functions {
        if !out.is_empty() {
            out.push('\n');
        }
        let _ = writeln!(out, "void {}() {{", f.name);
        block_body(&mut out, &f.body, 1);
        out.push_str("}\n");
    }
    out
}

fn indent(out: &mut String, depth: usize) {
    for _ in 0..depth {
        out.push_str("    ");
    }
}

fn class(out: &mut String, c: &ClassDecl) {
    let _ = writeln!(out, "class {} {{", c.name);
    for f in &c.fields {
        let _ = writeln!(out, "    {} {};", f.ty, f.name);
    }
    for m in &c.methods {
        for a in &m.annotations {
            let _ = writeln!(out, "    {a}");
        }
        let params: Vec<String> = m.params.iter().map(|p| format!("{} {}", p.ty, p.name)).collect();
        let _ = write!(out, "    void {}({})", m.name, params.join(", "));
        match &m.body {
            None => out.push_str(";\n"),
            Some(body) => {
                out.push_str(" {\n");
                block_body(out, body, 2);
                out.push_str("    }\n");
            }
        }
    }
    out.push_str("}\n");
}

fn block_body(out: &mut String, block: &[Stmt], depth: usize) {
    for s in block {
        indent(out, depth);
        match s {
            Stmt::Decl { ty, name, .. } => {
                let _ = writeln!(out, "{ty} {name};");
            }
            Stmt::Call(c) => {
                let args: Vec<String> = c.args.iter().map(|a| a.to_string()).collect();
                let _ = writeln!(out, "{}.{}({});", c.receiver, c.method, args.join(", "));
            }
            Stmt::If {
                then_block,
                else_block,
                ..
            } => {
                out.push_str("if (?) {\n");
                block_body(out, then_block, depth + 1);
                indent(out, depth);
                out.push('}');
                if let Some(e) = else_block {
                    out.push_str(" else {\n");
                    block_body(out, e, depth + 1);
                    indent(out, depth);
                    out.push('}');
                }
                out.push('\n');
            }
            Stmt::Loop { body, .. } => {
                out.push_str("loop {\n");
                block_body(out, body, depth + 1);
                indent(out, depth);
                out.push_str("}\n");
            }
        }
    }
}
