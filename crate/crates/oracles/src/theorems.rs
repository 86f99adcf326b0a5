//! Exhaustive checks of the semantic properties of contracts. Each returns
//! a description of the first counterexample found.
//!
//! States are handled here as plain `u32` masks with the transition written
//! out directly, independently of the bit-set type of the library.

use std::collections::{HashSet, VecDeque};

use tsa_core::automata::{
    context_independency_check, dtransfer, expand_dfa, join_triple, ExplicitDfa, DEFAULT_STATE_LIMIT,
};
use tsa_core::contracts::{BfaTriple, ContractMap};
use tsa_core::{MethodId, MethodSet};

pub fn mask(s: &MethodSet) -> u32 {
    s.iter().fold(0, |acc, m| acc | 1 << m.0)
}

pub fn set(width: usize, bits: u32) -> MethodSet {
    MethodSet::from_indices(width, (0..width).filter(|i| bits >> i & 1 == 1))
}

/// `(E, D, P)` as masks.
fn masks(t: &BfaTriple) -> (u32, u32, u32) {
    (mask(&t.enable), mask(&t.disable), mask(&t.pre))
}

/// The transition of a triple on a state, written out on masks.
fn step((e, d, p): (u32, u32, u32), b: u32) -> Option<u32> {
    (p & !b == 0).then_some((b | e) & !d)
}

fn all_states(width: usize) -> impl Iterator<Item = u32> {
    0..1u32 << width
}

/// ⦅φ₁⦆(b) ∩ ⦅φ₂⦆(b) = ⦅φ₁ ⊔ φ₂⦆(b) for every `b` where all three are
/// defined.
pub fn join_soundness(width: usize, phi1: &BfaTriple, phi2: &BfaTriple) -> Result<(), String> {
    let joined = join_triple(phi1, phi2).map_err(|e| e.to_string())?;
    let (a, b, j) = (masks(phi1), masks(phi2), masks(&joined));
    for s in all_states(width) {
        if let (Some(x), Some(y), Some(z)) = (step(a, s), step(b, s), step(j, s)) {
            if x & y != z {
                return Err(format!("b={s:b}: {x:b} ∩ {y:b} ≠ {z:b} for {phi1:?} ⊔ {phi2:?}"));
            }
        }
    }
    Ok(())
}

/// Every triple `dtransfer_seq` produces from ⟨∅,∅,∅⟩ on sequences of at
/// most `max_len` calls. Sequences reaching the same triple are explored
/// once; this is exact because the checks below establish that a triple
/// determines the run from every state.
pub fn reachable_triples(contract: &ContractMap, max_len: usize) -> Vec<(BfaTriple, Vec<MethodId>)> {
    let start = BfaTriple::identity(contract.width());
    let mut seen = HashSet::from([start.clone()]);
    let mut out = vec![(start.clone(), Vec::new())];
    let mut queue = VecDeque::from([(start, Vec::new())]);
    while let Some((t, word)) = queue.pop_front() {
        if word.len() == max_len {
            continue;
        }
        for m in contract.alphabet.ids() {
            if let Some(next) = dtransfer(contract, m, &t) {
                if seen.insert(next.clone()) {
                    let mut w: Vec<MethodId> = word.clone();
                    w.push(m);
                    out.push((next.clone(), w.clone()));
                    queue.push_back((next, w));
                }
            }
        }
    }
    out
}

/// For all sequences up to `max_len` and all states `b`: δ̂(q_b, s) is
/// defined iff `dtransfer_seq` is defined with P ⊆ b, and then both agree.
pub fn dtransfer_correctness(contract: &ContractMap, max_len: usize) -> Result<(), String> {
    let width = contract.width();
    let entries: Vec<(u32, u32, u32)> = contract.entries.iter().map(masks).collect();
    for (t, word) in reachable_triples(contract, max_len) {
        let tm = masks(&t);
        for m in contract.alphabet.ids() {
            let next = dtransfer(contract, m, &t).map(|n| masks(&n));
            for b in all_states(width) {
                let expected = step(tm, b).and_then(|x| step(entries[m.0], x));
                let got = next.and_then(|n| step(n, b));
                if expected != got {
                    return Err(format!(
                        "sequence {:?}·{} from b={b:b}: δ̂ gives {expected:?}, dtransfer gives {got:?}",
                        word.iter().map(|x| x.0).collect::<Vec<_>>(),
                        m.0
                    ));
                }
            }
        }
    }
    Ok(())
}

/// For every method and every non-empty multiset of at most `max_size`
/// states of `dfa`: δ is defined on all of them iff it is defined on their
/// intersection, and the images intersect to the image of the
/// intersection. Distinct (intersection, image-intersection) pairs are
/// enumerated, which covers every subset.
pub fn intersection_property(contract: &ContractMap, dfa: &ExplicitDfa, max_size: usize) -> Result<(), String> {
    let states: Vec<u32> = dfa.states().iter().map(mask).collect();
    for m in contract.alphabet.ids() {
        let t = masks(contract.entry(m));
        // (∩P, ∩ of images over defined members, all defined)
        let image = |q: usize| dfa.step(q, m).map(|x| mask(&dfa.states()[x]));
        let mut layer: HashSet<(u32, u32, bool)> = (0..states.len())
            .map(|q| (states[q], image(q).unwrap_or(u32::MAX), image(q).is_some()))
            .collect();
        let mut all = layer.clone();
        for _ in 1..max_size {
            let mut next = HashSet::new();
            for &(x, y, def) in &layer {
                for q in 0..states.len() {
                    let item = (
                        x & states[q],
                        y & image(q).unwrap_or(u32::MAX),
                        def && image(q).is_some(),
                    );
                    if all.insert(item) {
                        next.insert(item);
                    }
                }
            }
            layer = next;
        }
        for (x, y, def) in all {
            let at_meet = step(t, x);
            if def != at_meet.is_some() {
                return Err(format!("method {}: defined on all = {def}, on ∩={x:b}: {at_meet:?}", m.0));
            }
            if def && at_meet != Some(y) {
                return Err(format!("method {}: ∩ images {y:b} ≠ image of ∩ {at_meet:?}", m.0));
            }
        }
    }
    Ok(())
}

/// Expands `contract` and runs the context-independency check on it.
pub fn context_independent(contract: &ContractMap, max_len: usize) -> Result<(), String> {
    let dfa = expand_dfa(contract, DEFAULT_STATE_LIMIT).map_err(|e| e.to_string())?;
    context_independency_check(&dfa, max_len).map_err(|c| format!("{c:?}"))
}

/// `expand_dfa`'s transitions coincide with the triple semantics.
pub fn delta_agrees_with_apply(contract: &ContractMap, dfa: &ExplicitDfa) -> Result<(), String> {
    for (q, b) in dfa.states().iter().enumerate() {
        for m in contract.alphabet.ids() {
            let expected = step(masks(contract.entry(m)), mask(b));
            let got = dfa.step(q, m).map(|t| mask(&dfa.states()[t]));
            if expected != got {
                return Err(format!("state {:b} method {}: {got:?} vs {expected:?}", mask(b), m.0));
            }
        }
    }
    Ok(())
}
