//! Client-program analyses: the compositional triple-based checker and the
//! explicit-state baseline it is compared against.

pub mod bfa;
pub mod dataflow;
pub mod dfa;
pub mod domain;
pub mod program;

pub use bfa::{analyze_program, BfaAnalysis, Trace};
pub use dfa::{dfa_analyze_program, dfa_analyze_program_with_stats, DfaStats};
pub use domain::{join_state, AbstractState, Summary, Warning};
pub use program::{MethodKey, ProgramInfo};
