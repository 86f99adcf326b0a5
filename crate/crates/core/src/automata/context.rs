//! Exhaustive check of the context-independency property: the effect of a
//! call `m` on whether a following call `m'` is accepted must not depend on
//! the calls that preceded `m`.

use std::collections::VecDeque;

use crate::automata::dfa::ExplicitDfa;
use crate::bitset::MethodId;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContextCounterexample {
    /// Which of the two properties failed: 1 (enabling) or 2 (disabling).
    pub item: u8,
    pub method: MethodId,
    pub next: MethodId,
    /// Context in which `method` changes the verdict for `next`.
    pub witness: Vec<MethodId>,
    /// Context in which it does not.
    pub context: Vec<MethodId>,
}

/// Tests both items over every context of length at most `max_len`.
pub fn context_independency_check(
    dfa: &ExplicitDfa,
    max_len: usize,
) -> Result<(), ContextCounterexample> {
    // Shortest accepted word reaching each state within max_len steps.
    let n = dfa.num_states();
    let symbols = dfa.alphabet().len();
    let mut parent: Vec<Option<(usize, MethodId)>> = vec![None; n];
    let mut depth = vec![usize::MAX; n];
    depth[dfa.initial()] = 0;
    let mut queue = VecDeque::from([dfa.initial()]);
    let mut reached = vec![dfa.initial()];
    while let Some(q) = queue.pop_front() {
        if depth[q] == max_len {
            continue;
        }
        for c in 0..symbols {
            if let Some(t) = dfa.step(q, MethodId(c)) {
                if depth[t] == usize::MAX {
                    depth[t] = depth[q] + 1;
                    parent[t] = Some((q, MethodId(c)));
                    reached.push(t);
                    queue.push_back(t);
                }
            }
        }
    }
    let word = |mut q: usize| {
        let mut w = Vec::new();
        while let Some((p, m)) = parent[q] {
            w.push(m);
            q = p;
        }
        w.reverse();
        w
    };

    for m in (0..symbols).map(MethodId) {
        for next in (0..symbols).map(MethodId) {
            let direct = |q: usize| dfa.step(q, next).is_some();
            // None: `m` itself is rejected in q
            let after = |q: usize| dfa.step(q, m).map(|t| dfa.step(t, next).is_some());
            let contexts: Vec<usize> = reached
                .iter()
                .copied()
                .filter(|q| after(*q).is_some())
                .collect();
            let enables = contexts
                .iter()
                .find(|q| !direct(**q) && after(**q) == Some(true));
            if let Some(&p) = enables {
                if let Some(&w) = contexts.iter().find(|q| after(**q) == Some(false)) {
                    return Err(ContextCounterexample {
                        item: 1,
                        method: m,
                        next,
                        witness: word(p),
                        context: word(w),
                    });
                }
            }
            let disables = contexts
                .iter()
                .find(|q| direct(**q) && after(**q) == Some(false));
            if let Some(&p) = disables {
                if let Some(&w) = contexts.iter().find(|q| after(**q) == Some(true)) {
                    return Err(ContextCounterexample {
                        item: 2,
                        method: m,
                        next,
                        witness: word(p),
                        context: word(w),
                    });
                }
            }
        }
    }
    Ok(())
}

/// The collection/iterator protocol where `remove` disables `hasNext` only
/// while an iteration is in progress. Not expressible as a BFA.
pub fn iterator_dfa() -> ExplicitDfa {
    let names = ["Iterator", "hasNext", "next", "remove"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    // 0 --ctor--> 1 (fresh), 2 (checked), 3 (advanced), 4 (modified)
    ExplicitDfa::from_table(
        names,
        5,
        0,
        &[
            (0, 0, 1),
            (1, 1, 2),
            (1, 3, 1),
            (2, 1, 2),
            (2, 2, 3),
            (3, 1, 2),
            (3, 3, 4),
            (4, 3, 4),
        ],
    )
}
