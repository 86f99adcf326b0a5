pub mod context;
pub mod dfa;
pub mod inclusion;
pub mod minimize;
pub mod semantics;

pub use context::{context_independency_check, ContextCounterexample};
pub use dfa::{expand_dfa, ExplicitDfa, DEFAULT_STATE_LIMIT};
pub use inclusion::language_included;
pub use minimize::minimize_dfa;
pub use semantics::{apply_triple, compose, dtransfer, dtransfer_seq, force_triple, join_triple, StateVector};
