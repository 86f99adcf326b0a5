//! Forward fixpoint over a CFG in reverse post-order.

use crate::frontend::cfg::{Cfg, NodeKind};

/// Per-node states at the fixpoint.
#[derive(Debug, Clone)]
pub struct Solution<S> {
    /// Joined state on entry to each node; `None` if unreachable.
    pub inputs: Vec<Option<S>>,
    /// State after the node's effects.
    pub outputs: Vec<Option<S>>,
}

/// Iterates until no node input changes. At loop heads the new input is
/// joined with the previous one, so the head states form an ascending chain
/// and the iteration terminates for any transfer function.
pub fn solve<S, J, T>(cfg: &Cfg, entry: S, mut join: J, mut transfer: T) -> Solution<S>
where
    S: Clone + PartialEq,
    J: FnMut(&S, &S) -> S,
    T: FnMut(usize, &S) -> S,
{
    let rpo = cfg.reverse_postorder();
    let n = cfg.nodes.len();
    let mut inputs: Vec<Option<S>> = vec![None; n];
    let mut outputs: Vec<Option<S>> = vec![None; n];
    loop {
        let mut changed = false;
        for &v in &rpo {
            let joined = if v == cfg.entry {
                Some(entry.clone())
            } else {
                let mut acc: Option<S> = None;
                for &p in &cfg.nodes[v].preds {
                    if let Some(o) = &outputs[p] {
                        acc = Some(match acc {
                            None => o.clone(),
                            Some(a) => join(&a, o),
                        });
                    }
                }
                acc
            };
            let Some(mut new_in) = joined else { continue };
            if matches!(cfg.nodes[v].kind, NodeKind::LoopHead) {
                if let Some(old) = &inputs[v] {
                    new_in = join(old, &new_in);
                }
            }
            if inputs[v].as_ref() != Some(&new_in) {
                outputs[v] = Some(transfer(v, &new_in));
                inputs[v] = Some(new_in);
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    Solution { inputs, outputs }
}
