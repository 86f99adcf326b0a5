use std::collections::BTreeSet;

use tsa_bench::{random_program, RandomShape};
use tsa_core::analysis::{analyze_program, dfa_analyze_program, Warning};
use tsa_core::automata::DEFAULT_STATE_LIMIT;
use tsa_core::frontend::{parse_program, Program};
use tsa_oracles::{inline_calls, unroll_loops};

const SEEDS: u64 = 400;

fn sites(ws: &[Warning]) -> BTreeSet<(usize, usize, String)> {
    ws.iter().map(|w| (w.line, w.col, w.callee.clone())).collect()
}

fn program(seed: u64) -> (String, Program) {
    let src = random_program(seed, &RandomShape::default());
    let p = parse_program(&src).unwrap_or_else(|e| panic!("seed {seed}: {e}\n{src}"));
    (src, p)
}

#[test]
fn bfa_and_dfa_report_the_same_sites() {
    for seed in 0..SEEDS {
        let (src, p) = program(seed);
        let bfa = analyze_program(&p).unwrap();
        let dfa = dfa_analyze_program(&p, DEFAULT_STATE_LIMIT).unwrap();
        assert_eq!(sites(&bfa), sites(&dfa), "seed {seed}\n{src}");
    }
}

#[test]
fn two_unrolled_iterations_match_the_fixpoint() {
    for seed in 0..SEEDS {
        let (src, p) = program(seed);
        let unrolled = unroll_loops(&p, 2).unwrap();
        let fixpoint = analyze_program(&p).unwrap();
        let straight = analyze_program(&unrolled).unwrap();
        assert_eq!(sites(&fixpoint), sites(&straight), "seed {seed}\n{src}");
    }
}

#[test]
fn inlining_keeps_the_verdict() {
    for seed in 0..SEEDS {
        let (src, p) = program(seed);
        let inlined = inline_calls(&p).unwrap();
        let summarized = analyze_program(&p).unwrap();
        let expanded = analyze_program(&inlined).unwrap();
        assert_eq!(summarized.is_empty(), expanded.is_empty(), "seed {seed}\n{src}");
    }
}
