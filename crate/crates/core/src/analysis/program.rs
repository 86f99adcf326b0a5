//! Analysis-ready view of a resolved program: CFGs, tracked paths, call
//! bindings and a bottom-up method order. Shared by both analyzers.

use std::collections::{BTreeMap, HashMap};

use crate::bitset::MethodId;
use crate::error::AnalysisError;
use crate::frontend::ast::{AccessPath, Program, Span, Stmt, THIS};
use crate::frontend::cfg::{build_cfg, Cfg, NodeKind};

/// `(class, method)`
pub type MethodKey = (String, String);

/// A summary key of the callee and the caller path it stands for.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Binding {
    pub key: AccessPath,
    pub actual: AccessPath,
    pub class: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Op {
    /// A freshly declared base object enters its post-constructor state.
    Seed { path: AccessPath, class: String },
    /// Call of an annotated method.
    Base {
        path: AccessPath,
        class: String,
        method: MethodId,
        callee: String,
    },
    /// Call of a composed method, applied through its summary.
    Composed {
        method: MethodKey,
        callee: String,
        bindings: Vec<Binding>,
    },
}

#[derive(Debug, Clone)]
pub struct BodyInfo {
    /// `Class.method` or the function name.
    pub name: String,
    pub cfg: Cfg,
    /// Tracked paths rooted at `this` or a formal, with their base class.
    pub keys: Vec<(AccessPath, String)>,
    /// Per CFG node: the effects in order, and the node's source position.
    pub ops: Vec<Vec<Op>>,
    pub spans: Vec<Span>,
}

#[derive(Debug)]
pub struct ProgramInfo<'p> {
    pub program: &'p Program,
    pub methods: BTreeMap<MethodKey, BodyInfo>,
    pub functions: Vec<BodyInfo>,
    /// Composed methods, callees before callers.
    pub order: Vec<MethodKey>,
}

impl<'p> ProgramInfo<'p> {
    pub fn new(program: &'p Program) -> Result<Self, AnalysisError> {
        let mut keys = BTreeMap::new();
        for c in &program.classes {
            if program.is_base(&c.name) {
                continue;
            }
            for m in &c.methods {
                let mut k = leaves(program, &c.name, &AccessPath::var(THIS));
                for p in &m.params {
                    k.extend(leaves(program, &p.ty, &AccessPath::var(&p.name)));
                }
                keys.insert((c.name.clone(), m.name.clone()), k);
            }
        }

        let mut methods = BTreeMap::new();
        for c in &program.classes {
            if program.is_base(&c.name) {
                continue;
            }
            for m in &c.methods {
                let mut vars: HashMap<String, String> =
                    m.params.iter().map(|p| (p.name.clone(), p.ty.clone())).collect();
                vars.insert(THIS.to_string(), c.name.clone());
                let body = m.body.as_deref().unwrap_or(&[]);
                collect_locals(body, &mut vars);
                let key = (c.name.clone(), m.name.clone());
                let info = body_info(
                    program,
                    &keys,
                    format!("{}.{}", c.name, m.name),
                    body,
                    &vars,
                    keys[&key].clone(),
                );
                methods.insert(key, info);
            }
        }
        let functions = program
            .functions
            .iter()
            .map(|f| {
                let mut vars = HashMap::new();
                collect_locals(&f.body, &mut vars);
                body_info(program, &keys, f.name.clone(), &f.body, &vars, Vec::new())
            })
            .collect();
        let order = bottom_up(&methods)?;
        Ok(Self {
            program,
            methods,
            functions,
            order,
        })
    }

    pub fn file_name(&self, span: Span) -> &str {
        self.program
            .files
            .get(span.file)
            .map(String::as_str)
            .unwrap_or("<input>")
    }
}

/// Base-class paths reachable from `prefix` of type `ty` through fields.
pub fn leaves(program: &Program, ty: &str, prefix: &AccessPath) -> Vec<(AccessPath, String)> {
    if program.is_base(ty) {
        return vec![(prefix.clone(), ty.to_string())];
    }
    let Some(class) = program.class(ty) else {
        return Vec::new();
    };
    class
        .fields
        .iter()
        .flat_map(|f| leaves(program, &f.ty, &prefix.child(&f.name)))
        .collect()
}

fn collect_locals(block: &[Stmt], vars: &mut HashMap<String, String>) {
    for s in block {
        match s {
            Stmt::Decl { ty, name, .. } => {
                vars.insert(name.clone(), ty.clone());
            }
            Stmt::Call(_) => {}
            Stmt::If {
                then_block,
                else_block,
                ..
            } => {
                collect_locals(then_block, vars);
                if let Some(e) = else_block {
                    collect_locals(e, vars);
                }
            }
            Stmt::Loop { body, .. } => collect_locals(body, vars),
        }
    }
}

fn path_type(program: &Program, vars: &HashMap<String, String>, path: &AccessPath) -> Option<String> {
    let mut ty = vars.get(&path.root)?.clone();
    for f in &path.fields {
        ty = program.class(&ty)?.field(f)?.ty.clone();
    }
    Some(ty)
}

fn body_info(
    program: &Program,
    keys: &BTreeMap<MethodKey, Vec<(AccessPath, String)>>,
    name: String,
    body: &[Stmt],
    vars: &HashMap<String, String>,
    own_keys: Vec<(AccessPath, String)>,
) -> BodyInfo {
    let cfg = build_cfg(body);
    let mut ops = Vec::with_capacity(cfg.nodes.len());
    let mut spans = Vec::with_capacity(cfg.nodes.len());
    let composed = |class: &str, method: &str, receiver: &AccessPath, args: &[AccessPath]| {
        let decl = program.class(class).and_then(|c| c.method(method)).expect("resolved");
        let mk = (class.to_string(), method.to_string());
        let bindings = keys[&mk]
            .iter()
            .filter_map(|(key, cls)| {
                let actual = if key.root == THIS {
                    key.rebase(&AccessPath::var(THIS), receiver)
                } else {
                    let i = decl.params.iter().position(|p| p.name == key.root)?;
                    key.rebase(&AccessPath::var(&key.root), &args[i])
                }?;
                Some(Binding {
                    key: key.clone(),
                    actual,
                    class: cls.clone(),
                })
            })
            .collect();
        Op::Composed {
            method: mk,
            callee: format!("{class}.{method}"),
            bindings,
        }
    };
    for node in &cfg.nodes {
        let (node_ops, span) = match &node.kind {
            NodeKind::Decl { ty, name, span } => {
                let local = AccessPath::var(name);
                let mut v: Vec<Op> = leaves(program, ty, &local)
                    .into_iter()
                    .map(|(path, class)| Op::Seed { path, class })
                    .collect();
                let ctor = program
                    .class(ty)
                    .filter(|c| !program.is_base(&c.name))
                    .and_then(|c| c.constructor());
                if ctor.is_some() {
                    v.push(composed(ty, ty, &local, &[]));
                }
                (v, *span)
            }
            NodeKind::Call(call) => {
                let op = if let Some(contract) = program.contracts.get(&call.class) {
                    Op::Base {
                        path: call.receiver.clone(),
                        class: call.class.clone(),
                        method: contract.method(&call.method).expect("resolved"),
                        callee: format!("{}.{}", call.class, call.method),
                    }
                } else {
                    composed(&call.class, &call.method, &call.receiver, &call.args)
                };
                debug_assert_eq!(
                    path_type(program, vars, &call.receiver).as_deref(),
                    Some(call.class.as_str())
                );
                (vec![op], call.span)
            }
            _ => (Vec::new(), Span::default()),
        };
        ops.push(node_ops);
        spans.push(span);
    }
    BodyInfo {
        name,
        cfg,
        keys: own_keys,
        ops,
        spans,
    }
}

fn bottom_up(methods: &BTreeMap<MethodKey, BodyInfo>) -> Result<Vec<MethodKey>, AnalysisError> {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        Open,
        Done,
    }
    fn callees(info: &BodyInfo) -> Vec<MethodKey> {
        let mut out: Vec<MethodKey> = info
            .ops
            .iter()
            .flatten()
            .filter_map(|op| match op {
                Op::Composed { method, .. } => Some(method.clone()),
                _ => None,
            })
            .collect();
        out.sort();
        out.dedup();
        out
    }
    fn visit(
        m: &MethodKey,
        methods: &BTreeMap<MethodKey, BodyInfo>,
        marks: &mut HashMap<MethodKey, Mark>,
        stack: &mut Vec<MethodKey>,
        order: &mut Vec<MethodKey>,
    ) -> Result<(), AnalysisError> {
        marks.insert(m.clone(), Mark::Open);
        stack.push(m.clone());
        for c in callees(&methods[m]) {
            match marks.get(&c) {
                Some(Mark::Done) => {}
                Some(Mark::Open) => {
                    let start = stack.iter().position(|s| *s == c).unwrap_or(0);
                    let mut cycle: Vec<String> =
                        stack[start..].iter().map(|(c, m)| format!("{c}.{m}")).collect();
                    cycle.push(format!("{}.{}", c.0, c.1));
                    return Err(AnalysisError::RecursionUnsupported { cycle });
                }
                None => visit(&c, methods, marks, stack, order)?,
            }
        }
        stack.pop();
        marks.insert(m.clone(), Mark::Done);
        order.push(m.clone());
        Ok(())
    }
    let mut marks = HashMap::new();
    let mut order = Vec::new();
    for m in methods.keys() {
        if !marks.contains_key(m) {
            visit(m, methods, &mut marks, &mut Vec::new(), &mut order)?;
        }
    }
    Ok(order)
}
