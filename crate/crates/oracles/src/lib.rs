//! Slow, obviously-correct reference implementations. Each one recomputes a
//! result of the analyzer crate from first principles so tests can compare
//! the two.

pub mod language;
pub mod programs;
pub mod strategies;
pub mod theorems;
pub mod validity;

pub use language::{accepted_words, moore_state_count};
pub use programs::{inline_calls, unroll_loops};
pub use validity::substring_violations;
