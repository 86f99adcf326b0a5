//! Explicit-state automata expanded from contracts.

use std::collections::{HashMap, VecDeque};
use std::fmt::Write as _;

use crate::automata::semantics::{apply_triple, StateVector};
use crate::bitset::{MethodId, MethodSet};
use crate::contracts::ContractMap;
use crate::error::AutomatonError;

pub const DEFAULT_STATE_LIMIT: usize = 1 << 22;

/// A partial DFA whose states are labelled with bit-vectors. Every state is
/// accepting and reachable from `initial`; missing transitions are `None`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExplicitDfa {
    alphabet: Vec<String>,
    states: Vec<StateVector>,
    index: HashMap<StateVector, usize>,
    initial: usize,
    /// `delta[state][method]`
    delta: Vec<Vec<Option<usize>>>,
}

impl ExplicitDfa {
    /// Builds an automaton from an explicit table. Used for hand-written
    /// machines that are not derived from a contract; state `i` is labelled
    /// with the binary encoding of `i` at the alphabet's width.
    pub fn from_table(
        alphabet: Vec<String>,
        num_states: usize,
        initial: usize,
        transitions: &[(usize, usize, usize)],
    ) -> Self {
        let width = alphabet.len();
        assert!(
            width >= usize::BITS as usize || num_states <= 1 << width,
            "{num_states} states do not fit {width}-bit labels"
        );
        let states: Vec<StateVector> = (0..num_states)
            .map(|i| MethodSet::from_indices(width, (0..width).filter(|b| i >> b & 1 == 1)))
            .collect();
        let mut delta = vec![vec![None; width]; num_states];
        for &(from, m, to) in transitions {
            delta[from][m] = Some(to);
        }
        let dfa = Self::from_parts(alphabet, states, initial, delta);
        dfa.restrict_to_reachable()
    }

    pub(crate) fn from_parts(
        alphabet: Vec<String>,
        states: Vec<StateVector>,
        initial: usize,
        delta: Vec<Vec<Option<usize>>>,
    ) -> Self {
        let index = states
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), i))
            .collect();
        Self {
            alphabet,
            states,
            index,
            initial,
            delta,
        }
    }

    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    pub fn states(&self) -> &[StateVector] {
        &self.states
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn initial_state(&self) -> &StateVector {
        &self.states[self.initial]
    }

    pub fn state_index(&self, b: &StateVector) -> Option<usize> {
        self.index.get(b).copied()
    }

    pub fn step(&self, q: usize, m: MethodId) -> Option<usize> {
        self.delta[q][m.0]
    }

    pub fn transitions(&self) -> impl Iterator<Item = (usize, MethodId, usize)> + '_ {
        self.delta.iter().enumerate().flat_map(|(q, row)| {
            row.iter()
                .enumerate()
                .filter_map(move |(m, t)| t.map(|to| (q, MethodId(m), to)))
        })
    }

    pub fn num_transitions(&self) -> usize {
        self.transitions().count()
    }

    /// δ̂ from a state given by its bit pattern.
    pub fn delta_hat(
        &self,
        b: &StateVector,
        seq: &[MethodId],
    ) -> Result<Option<StateVector>, AutomatonError> {
        let start = self
            .state_index(b)
            .ok_or_else(|| AutomatonError::UnknownState(b.to_bit_string()))?;
        Ok(self.run_from(start, seq).map(|q| self.states[q].clone()))
    }

    pub fn run_from(&self, start: usize, seq: &[MethodId]) -> Option<usize> {
        seq.iter().try_fold(start, |q, m| self.step(q, *m))
    }

    pub fn accepts(&self, seq: &[MethodId]) -> bool {
        self.run_from(self.initial, seq).is_some()
    }

    /// The same machine started in `δ(initial, m)`, restricted to what is
    /// reachable from there.
    pub fn rooted_at(&self, start: usize) -> ExplicitDfa {
        let mut dfa = self.clone();
        dfa.initial = start;
        dfa.restrict_to_reachable()
    }

    /// The object automaton: the machine after the constructor has run.
    /// Returns `None` if the constructor transition is undefined.
    pub fn after_constructor(&self) -> Option<ExplicitDfa> {
        self.step(self.initial, MethodId::CONSTRUCTOR)
            .map(|q| self.rooted_at(q))
    }

    fn restrict_to_reachable(&self) -> ExplicitDfa {
        let mut order = vec![usize::MAX; self.states.len()];
        let mut kept = Vec::new();
        let mut queue = VecDeque::from([self.initial]);
        order[self.initial] = 0;
        kept.push(self.initial);
        while let Some(q) = queue.pop_front() {
            for to in self.delta[q].iter().flatten() {
                if order[*to] == usize::MAX {
                    order[*to] = kept.len();
                    kept.push(*to);
                    queue.push_back(*to);
                }
            }
        }
        let states = kept.iter().map(|q| self.states[*q].clone()).collect();
        let delta = kept
            .iter()
            .map(|q| {
                self.delta[*q]
                    .iter()
                    .map(|t| t.map(|to| order[to]))
                    .collect()
            })
            .collect();
        Self::from_parts(self.alphabet.clone(), states, 0, delta)
    }

    /// Text dump: `# alphabet:` and `# states:` headers, then one
    /// `from<TAB>method<TAB>to` line per transition, lines sorted.
    pub fn dump(&self) -> String {
        let mut lines: Vec<String> = self
            .transitions()
            .map(|(q, m, to)| {
                format!(
                    "{}\t{}\t{}",
                    self.states[q].to_bit_string(),
                    self.alphabet[m.0],
                    self.states[to].to_bit_string()
                )
            })
            .collect();
        lines.sort();
        let mut out = String::new();
        let _ = writeln!(out, "# alphabet: {}", self.alphabet.join(","));
        let _ = writeln!(out, "# states: {}", self.num_states());
        for l in lines {
            out.push_str(&l);
            out.push('\n');
        }
        out
    }
}

/// Breadth-first expansion of the reachable part of the BFA denoted by a
/// contract. Methods are tried in alphabet order and states are numbered in
/// discovery order.
pub fn expand_dfa(contract: &ContractMap, limit: usize) -> Result<ExplicitDfa, AutomatonError> {
    let width = contract.width();
    let initial = MethodSet::singleton(width, MethodId::CONSTRUCTOR);
    let mut states = vec![initial.clone()];
    let mut index = HashMap::from([(initial, 0usize)]);
    let mut delta: Vec<Vec<Option<usize>>> = Vec::new();
    let mut next = 0;
    while next < states.len() {
        let b = states[next].clone();
        let mut row = vec![None; width];
        for m in contract.alphabet.ids() {
            if let Some(target) = apply_triple(contract.entry(m), &b)? {
                let id = match index.get(&target) {
                    Some(id) => *id,
                    None => {
                        if states.len() >= limit {
                            return Err(AutomatonError::StateExplosionLimit { limit });
                        }
                        let id = states.len();
                        index.insert(target.clone(), id);
                        states.push(target);
                        id
                    }
                };
                row[m.0] = Some(id);
            }
        }
        delta.push(row);
        next += 1;
    }
    Ok(ExplicitDfa {
        alphabet: contract.alphabet.names().to_vec(),
        states,
        index,
        initial: 0,
        delta,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contracts::{build_contract, Annotation, AnnotationKind, ClassContractDecl};

    fn sparse_lu() -> ContractMap {
        use AnnotationKind::*;
        build_contract(&ClassContractDecl {
            class_name: "SparseLU".into(),
            methods: vec![
                (
                    "analyzePattern".into(),
                    vec![Annotation::new(EnableOnly, &["factorize"])],
                ),
                ("factorize".into(), vec![Annotation::new(EnableOnly, &["solve"])]),
                ("compute".into(), vec![Annotation::new(EnableOnly, &["solve"])]),
                ("solve".into(), vec![Annotation::new(EnableAll, &[])]),
            ],
        })
        .unwrap()
    }

    fn seq(ids: &[usize]) -> Vec<MethodId> {
        ids.iter().map(|i| MethodId(*i)).collect()
    }

    #[test]
    fn sparse_lu_shape() {
        let dfa = expand_dfa(&sparse_lu(), DEFAULT_STATE_LIMIT).unwrap();
        assert_eq!(dfa.num_states(), 5);
        assert_eq!(dfa.num_transitions(), 9);
        let obj = dfa.after_constructor().unwrap();
        assert_eq!(obj.num_states(), 4);
        assert_eq!(obj.initial_state().to_bit_string(), "01100");
    }

    #[test]
    fn delta_hat_and_accepts() {
        let dfa = expand_dfa(&sparse_lu(), DEFAULT_STATE_LIMIT).unwrap();
        let init = dfa.initial_state().clone();
        let out = dfa.delta_hat(&init, &seq(&[0, 2, 4])).unwrap().unwrap();
        assert_eq!(out.to_bit_string(), "01111");
        assert_eq!(dfa.delta_hat(&init, &[]).unwrap(), Some(init.clone()));
        assert_eq!(dfa.delta_hat(&init, &seq(&[0, 4])).unwrap(), None);
        assert!(dfa
            .delta_hat(&MethodSet::from_bit_string("11111").unwrap(), &[])
            .is_err());

        assert!(dfa.accepts(&seq(&[0, 1, 3, 4])));
        assert!(dfa.accepts(&[]));
        assert!(!dfa.accepts(&seq(&[0, 3])));
    }

    #[test]
    fn state_limit() {
        let err = expand_dfa(&sparse_lu(), 3).unwrap_err();
        assert_eq!(err, AutomatonError::StateExplosionLimit { limit: 3 });
    }

    #[test]
    fn one_method_class() {
        let c = build_contract(&ClassContractDecl {
            class_name: "C".into(),
            methods: vec![("m".into(), vec![])],
        })
        .unwrap();
        let dfa = expand_dfa(&c, DEFAULT_STATE_LIMIT).unwrap();
        assert_eq!(dfa.num_states(), 2);
        assert_eq!(
            dfa.dump(),
            "# alphabet: C,m\n# states: 2\n01\tm\t01\n10\tC\t01\n"
        );
    }
}
