#![no_main]

use std::collections::BTreeSet;

use libfuzzer_sys::fuzz_target;
use tsa_core::analysis::{analyze_program, dfa_analyze_program, Warning};
use tsa_core::frontend::{parse_program, pretty_print};

fn sites(ws: &[Warning]) -> BTreeSet<(usize, usize, String)> {
    ws.iter().map(|w| (w.line, w.col, w.callee.clone())).collect()
}

fuzz_target!(|data: &[u8]| {
    let Ok(src) = std::str::from_utf8(data) else { return };
    let Ok(p) = parse_program(src) else { return };
    let again = parse_program(&pretty_print(&p)).expect("printed programs parse");
    assert_eq!(again.without_spans(), p.without_spans());
    // Small cap: the fuzzer should not stall on wide contracts.
    if let (Ok(b), Ok(d)) = (analyze_program(&p), dfa_analyze_program(&p, 1 << 12)) {
        assert_eq!(sites(&b), sites(&d));
    }
});
