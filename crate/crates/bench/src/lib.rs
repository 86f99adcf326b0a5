//! Generators for CR-style contracts and valid client programs, and the
//! harness that times both analyzers over a matrix of them.

pub mod client_gen;
pub mod contract_gen;
pub mod random;
pub mod run;
pub mod spec;

pub use client_gen::{gen_client, GeneratedClient};
pub use contract_gen::{gen_contract, GeneratedContract};
pub use spec::{parse_matrix, ClientSpec, ContractSpec, KeyValues, MatrixCell, SpecError};
pub use random::{random_program, RandomShape};
pub use run::{geomean_speedup, run_bench, Analyzer, BenchError, BenchReport, BenchRow, UsabilityRow};
