use tsa_core::contracts::ContractMap;
use tsa_core::MethodId;

/// Positions in `calls` (the methods invoked after construction) where a
/// call ends a violating substring: some earlier call, the constructor
/// included, disabled it and nothing strictly in between re-enabled it.
pub fn substring_violations(contract: &ContractMap, calls: &[MethodId]) -> Vec<usize> {
    let mut seq = vec![MethodId::CONSTRUCTOR];
    seq.extend_from_slice(calls);
    let mut out = Vec::new();
    for k in 1..seq.len() {
        let x = seq[k];
        let violated = (0..k).any(|i| {
            contract.entry(seq[i]).disable.contains(x)
                && (i + 1..k).all(|j| !contract.entry(seq[j]).enable.contains(x))
        });
        if violated {
            out.push(k - 1);
        }
    }
    out
}
