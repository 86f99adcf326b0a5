#![no_main]

use libfuzzer_sys::fuzz_target;
use tsa_bench::spec::{parse_matrix, ClientSpec, ContractSpec, KeyValues};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(cells) = parse_matrix(text) {
        for c in cells {
            assert!(c.runs > 0);
            c.contract.validate().expect("parsed cells are valid");
        }
    }
    if let Ok(kv) = KeyValues::parse_line(text, 1) {
        let _ = ContractSpec::from_kv(&kv);
        let _ = ClientSpec::from_kv(&kv);
    }
});
