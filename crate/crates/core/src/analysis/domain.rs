use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::automata::semantics::join_triple;
use crate::contracts::BfaTriple;
use crate::frontend::ast::{AccessPath, Span};

/// The abstract domain: access paths to accumulated ⟨E, D, P⟩ effects.
pub type AbstractState = BTreeMap<AccessPath, BfaTriple>;

/// Pointwise join on shared paths; unmatched entries are copied through.
pub fn join_state(a: &AbstractState, b: &AbstractState) -> AbstractState {
    let mut out = a.clone();
    for (path, t) in b {
        let joined = match a.get(path) {
            Some(u) => join_triple(u, t).expect("one class per path"),
            None => t.clone(),
        };
        out.insert(path.clone(), joined);
    }
    out
}

/// Effect of a composed method on the objects it can reach: paths rooted
/// at `this` or at a formal parameter.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Summary {
    /// `Class.method`
    pub method: String,
    pub exit_state: AbstractState,
    /// Base class of every key in `exit_state`.
    pub classes: BTreeMap<AccessPath, String>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Warning {
    pub file: String,
    pub line: usize,
    pub col: usize,
    /// `Class.method` of the call that fails.
    pub callee: String,
    /// The object whose state rules the call out.
    pub path: String,
    /// Methods the call needs that are disabled at this point.
    pub required: Vec<String>,
    pub reason: String,
}

impl Warning {
    pub fn new(file: &str, span: Span, callee: String, path: &AccessPath, required: Vec<String>) -> Self {
        let reason = format!("requires {{{}}} but disabled here", required.join(","));
        Self {
            file: file.to_string(),
            line: span.line,
            col: span.col,
            callee,
            path: path.to_string(),
            required,
            reason,
        }
    }

    pub fn location(&self) -> (String, usize, usize) {
        (self.file.clone(), self.line, self.col)
    }
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "WARN {}:{}:{} call to {} on {}: {}",
            self.file, self.line, self.col, self.callee, self.path, self.reason
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(e: &[usize], d: &[usize], p: &[usize]) -> BfaTriple {
        BfaTriple::from_indices(5, e.iter().copied(), d.iter().copied(), p.iter().copied())
    }

    #[test]
    fn join_state_cases() {
        let p = AccessPath::new("this", &["lu"]);
        let q = AccessPath::var("x");
        let s2 = AbstractState::from([(p.clone(), t(&[4], &[1, 2, 3], &[2]))]);
        let s3 = AbstractState::from([(p.clone(), t(&[1, 2, 3, 4], &[], &[2]))]);
        assert_eq!(join_state(&s2, &s3), s2);
        let only = AbstractState::from([(q.clone(), t(&[1], &[], &[]))]);
        assert_eq!(join_state(&AbstractState::new(), &only), only);
        let both = join_state(&s2, &only);
        assert_eq!(both.len(), 2);
        assert_eq!(join_state(&only, &s2), both);
    }

    #[test]
    fn warning_line() {
        let w = Warning::new(
            "a.tsl",
            Span::new(3, 5),
            "Foo.setupLU2".into(),
            &AccessPath::new("foo", &["lu"]),
            vec!["analyzePattern".into()],
        );
        assert_eq!(
            w.to_string(),
            "WARN a.tsl:3:5 call to Foo.setupLU2 on foo.lu: requires {analyzePattern} but disabled here"
        );
    }
}
