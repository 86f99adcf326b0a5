use std::collections::{BTreeSet, HashMap};

use tsa_core::automata::ExplicitDfa;
use tsa_core::MethodId;

/// Every accepted word of length at most `max_len`, by depth-first search
/// over the defined transitions.
pub fn accepted_words(dfa: &ExplicitDfa, max_len: usize) -> BTreeSet<Vec<usize>> {
    fn go(dfa: &ExplicitDfa, q: usize, word: &mut Vec<usize>, max_len: usize, out: &mut BTreeSet<Vec<usize>>) {
        out.insert(word.clone());
        if word.len() == max_len {
            return;
        }
        for m in 0..dfa.alphabet().len() {
            if let Some(t) = dfa.step(q, MethodId(m)) {
                word.push(m);
                go(dfa, t, word, max_len, out);
                word.pop();
            }
        }
    }
    let mut out = BTreeSet::new();
    go(dfa, dfa.initial(), &mut Vec::new(), max_len, &mut out);
    out
}

/// Number of states of the minimal automaton, by Moore's naive refinement
/// on the machine completed with a rejecting sink. The sink is not counted.
pub fn moore_state_count(dfa: &ExplicitDfa) -> usize {
    let n = dfa.num_states();
    let sink = n;
    let width = dfa.alphabet().len();
    let succ = |q: usize, m: usize| {
        if q == sink {
            sink
        } else {
            dfa.step(q, MethodId(m)).unwrap_or(sink)
        }
    };
    let mut class: Vec<usize> = (0..=n).map(|q| usize::from(q == sink)).collect();
    let mut count = 0;
    loop {
        let mut ids: HashMap<Vec<usize>, usize> = HashMap::new();
        let next: Vec<usize> = (0..=n)
            .map(|q| {
                let mut sig = vec![class[q]];
                sig.extend((0..width).map(|m| class[succ(q, m)]));
                let fresh = ids.len();
                *ids.entry(sig).or_insert(fresh)
            })
            .collect();
        let new_count = ids.len();
        class = next;
        if new_count == count {
            break;
        }
        count = new_count;
    }
    let sink_class = class[sink];
    let live: BTreeSet<usize> = (0..n).map(|q| class[q]).filter(|c| *c != sink_class).collect();
    live.len()
}
