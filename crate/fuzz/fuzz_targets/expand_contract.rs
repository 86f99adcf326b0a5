#![no_main]

use libfuzzer_sys::fuzz_target;
use tsa_core::automata::{expand_dfa, minimize_dfa};
use tsa_core::frontend::parse_program;

fuzz_target!(|data: &[u8]| {
    let Ok(src) = std::str::from_utf8(data) else { return };
    let Ok(p) = parse_program(src) else { return };
    for contract in p.contracts.values() {
        let Ok(dfa) = expand_dfa(contract, 1 << 12) else { continue };
        let min = minimize_dfa(&dfa);
        assert!(min.num_states() <= dfa.num_states());
        let _ = dfa.dump();
    }
});
