//! Control-flow graphs of method and function bodies.

use crate::frontend::ast::*;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NodeKind {
    Entry,
    Exit,
    /// Local declaration; seeds the new object and runs its constructor.
    Decl { ty: String, name: String, span: Span },
    Call(CallStmt),
    BranchSplit,
    Merge,
    /// Loop header; its predecessors are the loop entry and the back-edge.
    LoopHead,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Node {
    pub kind: NodeKind,
    pub succs: Vec<usize>,
    pub preds: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cfg {
    pub nodes: Vec<Node>,
    pub entry: usize,
    pub exit: usize,
}

impl Cfg {
    fn add(&mut self, kind: NodeKind) -> usize {
        self.nodes.push(Node {
            kind,
            succs: Vec::new(),
            preds: Vec::new(),
        });
        self.nodes.len() - 1
    }

    fn edge(&mut self, from: usize, to: usize) {
        self.nodes[from].succs.push(to);
        self.nodes[to].preds.push(from);
    }

    /// Reverse post-order from the entry; back-edge sources come after
    /// their loop heads.
    pub fn reverse_postorder(&self) -> Vec<usize> {
        let mut visited = vec![false; self.nodes.len()];
        let mut order = Vec::with_capacity(self.nodes.len());
        // iterative DFS: (node, next successor index)
        let mut stack = vec![(self.entry, 0usize)];
        visited[self.entry] = true;
        while let Some((n, i)) = stack.last_mut() {
            let n = *n;
            if let Some(&s) = self.nodes[n].succs.get(*i) {
                *i += 1;
                if !visited[s] {
                    visited[s] = true;
                    stack.push((s, 0));
                }
            } else {
                order.push(n);
                stack.pop();
            }
        }
        order.reverse();
        order
    }

    pub fn calls(&self) -> impl Iterator<Item = (usize, &CallStmt)> {
        self.nodes.iter().enumerate().filter_map(|(i, n)| match &n.kind {
            NodeKind::Call(c) => Some((i, c)),
            _ => None,
        })
    }
}

pub fn build_cfg(body: &[Stmt]) -> Cfg {
    let mut cfg = Cfg {
        nodes: Vec::new(),
        entry: 0,
        exit: 0,
    };
    let entry = cfg.add(NodeKind::Entry);
    let last = lower(&mut cfg, body, entry);
    let exit = cfg.add(NodeKind::Exit);
    cfg.edge(last, exit);
    cfg.entry = entry;
    cfg.exit = exit;
    cfg
}

/// Appends `block` after node `from`; returns the block's last node.
fn lower(cfg: &mut Cfg, block: &[Stmt], from: usize) -> usize {
    let mut cur = from;
    for s in block {
        cur = match s {
            Stmt::Decl { ty, name, span } => {
                let n = cfg.add(NodeKind::Decl {
                    ty: ty.clone(),
                    name: name.clone(),
                    span: *span,
                });
                cfg.edge(cur, n);
                n
            }
            Stmt::Call(c) => {
                let n = cfg.add(NodeKind::Call(c.clone()));
                cfg.edge(cur, n);
                n
            }
            Stmt::If {
                then_block,
                else_block,
                ..
            } => {
                let split = cfg.add(NodeKind::BranchSplit);
                cfg.edge(cur, split);
                let then_end = lower(cfg, then_block, split);
                let else_end = lower(cfg, else_block.as_deref().unwrap_or(&[]), split);
                let merge = cfg.add(NodeKind::Merge);
                cfg.edge(then_end, merge);
                cfg.edge(else_end, merge);
                merge
            }
            Stmt::Loop { body, .. } => {
                let head = cfg.add(NodeKind::LoopHead);
                cfg.edge(cur, head);
                let body_end = lower(cfg, body, head);
                cfg.edge(body_end, head);
                head
            }
        };
    }
    cur
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::parser::parse_syntax;

    fn body(src: &str) -> Block {
        parse_syntax(&format!("void f() {{ {src} }}"))
            .unwrap()
            .functions
            .remove(0)
            .body
    }

    fn kinds(cfg: &Cfg) -> Vec<&'static str> {
        cfg.nodes
            .iter()
            .map(|n| match n.kind {
                NodeKind::Entry => "entry",
                NodeKind::Exit => "exit",
                NodeKind::Decl { .. } => "decl",
                NodeKind::Call(_) => "call",
                NodeKind::BranchSplit => "split",
                NodeKind::Merge => "merge",
                NodeKind::LoopHead => "head",
            })
            .collect()
    }

    #[test]
    fn empty_body() {
        let cfg = build_cfg(&[]);
        assert_eq!(kinds(&cfg), ["entry", "exit"]);
        assert_eq!(cfg.nodes[cfg.entry].succs, vec![cfg.exit]);
    }

    #[test]
    fn branch_with_empty_else() {
        let cfg = build_cfg(&body("a.x(); if (?) { a.y(); }"));
        assert_eq!(kinds(&cfg), ["entry", "call", "split", "call", "merge", "exit"]);
        assert_eq!(cfg.nodes[4].preds, vec![3, 2]);
        assert_eq!(cfg.reverse_postorder().first(), Some(&0));
    }

    #[test]
    fn loop_back_edge() {
        let cfg = build_cfg(&body("loop { a.x(); }"));
        assert_eq!(kinds(&cfg), ["entry", "head", "call", "exit"]);
        assert_eq!(cfg.nodes[1].preds, vec![0, 2]);
        assert_eq!(cfg.nodes[1].succs, vec![2, 3]);
        let rpo = cfg.reverse_postorder();
        let pos = |n| rpo.iter().position(|x| *x == n).unwrap();
        assert!(pos(1) < pos(2));
        assert_eq!(rpo.len(), 4);
    }

    #[test]
    fn nested_nodes_are_linear_in_statements() {
        let cfg = build_cfg(&body("if (?) { loop { a.x(); a.y(); } } else { B b; } a.z();"));
        // entry, split, head, 2 calls, decl, merge, call, exit
        assert_eq!(cfg.nodes.len(), 9);
    }
}
