//! Typestate contracts expressed as bit-vector automata, with a
//! compositional checker for client programs and an explicit-state baseline.

pub mod analysis;
pub mod automata;
pub mod bitset;
pub mod contracts;
pub mod frontend;
pub mod error;

pub use bitset::{MethodId, MethodSet};
pub use error::{AnalysisError, AutomatonError, ContractError, FrontendError, WidthMismatch};
