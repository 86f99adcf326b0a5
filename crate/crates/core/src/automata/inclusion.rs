use std::collections::{HashSet, VecDeque};

use crate::automata::dfa::ExplicitDfa;
use crate::bitset::MethodId;
use crate::error::AutomatonError;

/// Symbol 0 is the constructor and is matched by position, so automata of
/// differently named classes with the same methods are comparable.
fn same_alphabet(a: &ExplicitDfa, b: &ExplicitDfa) -> bool {
    a.alphabet().len() == b.alphabet().len() && a.alphabet()[1..] == b.alphabet()[1..]
}

/// L(a) ⊆ L(b), by exploring the product of the sink-completed machines.
pub fn language_included(a: &ExplicitDfa, b: &ExplicitDfa) -> Result<bool, AutomatonError> {
    if !same_alphabet(a, b) {
        return Err(AutomatonError::AlphabetMismatch {
            left: a.alphabet().to_vec(),
            right: b.alphabet().to_vec(),
        });
    }
    let symbols = a.alphabet().len();
    let start = (a.initial(), Some(b.initial()));
    let mut seen = HashSet::from([start]);
    let mut queue = VecDeque::from([start]);
    while let Some((qa, qb)) = queue.pop_front() {
        for c in 0..symbols {
            let Some(na) = a.step(qa, MethodId(c)) else {
                continue;
            };
            let nb = qb.and_then(|q| b.step(q, MethodId(c)));
            if nb.is_none() {
                // a accepts a word that drives b into its sink
                return Ok(false);
            }
            if seen.insert((na, nb)) {
                queue.push_back((na, nb));
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names() -> Vec<String> {
        vec!["c".into(), "x".into(), "y".into()]
    }

    #[test]
    fn reflexive() {
        let d = ExplicitDfa::from_table(names(), 2, 0, &[(0, 0, 1), (1, 1, 1)]);
        assert!(language_included(&d, &d).unwrap());
    }

    #[test]
    fn strict_inclusion() {
        let small = ExplicitDfa::from_table(names(), 2, 0, &[(0, 0, 1), (1, 1, 1)]);
        let big = ExplicitDfa::from_table(names(), 2, 0, &[(0, 0, 1), (1, 1, 1), (1, 2, 1)]);
        assert!(language_included(&small, &big).unwrap());
        assert!(!language_included(&big, &small).unwrap());
    }

    #[test]
    fn alphabet_mismatch() {
        let a = ExplicitDfa::from_table(names(), 1, 0, &[]);
        let b = ExplicitDfa::from_table(vec!["c".into(), "x".into(), "z".into()], 1, 0, &[]);
        assert!(language_included(&a, &b).is_err());
    }
}
