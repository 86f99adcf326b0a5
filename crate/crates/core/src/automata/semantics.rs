//! Triple application, declarative transfer and join.

use crate::bitset::{MethodId, MethodSet};
use crate::contracts::{BfaTriple, ContractMap};
use crate::error::WidthMismatch;

/// A state of a BFA: the set of currently enabled methods.
pub type StateVector = MethodSet;

/// ⦅⟨E, D, P⟩⦆(b) = (b ∪ E) ∖ D when P ⊆ b, `None` otherwise.
pub fn apply_triple(t: &BfaTriple, b: &StateVector) -> Result<Option<StateVector>, WidthMismatch> {
    if !t.pre.try_is_subset(b)? {
        return Ok(None);
    }
    Ok(Some(force_triple(t, b)?))
}

/// (b ∪ E) ∖ D regardless of the pre-condition.
pub fn force_triple(t: &BfaTriple, b: &StateVector) -> Result<StateVector, WidthMismatch> {
    b.try_union(&t.enable)?.try_difference(&t.disable)
}

/// Composes the effect of calling `m` after the effect summarized by `t`.
/// Undefined when `m`'s pre-condition was disabled by `t`.
pub fn dtransfer(contract: &ContractMap, m: MethodId, t: &BfaTriple) -> Option<BfaTriple> {
    compose(t, contract.entry(m))
}

/// Sequential composition of two triples: first `t`, then `step`.
pub fn compose(t: &BfaTriple, step: &BfaTriple) -> Option<BfaTriple> {
    if !step.pre.is_disjoint(&t.disable) {
        return None;
    }
    Some(BfaTriple {
        enable: t.enable.union(&step.enable).difference(&step.disable),
        disable: t.disable.union(&step.disable).difference(&step.enable),
        pre: t.pre.union(&step.pre.difference(&t.enable)),
    })
}

pub fn dtransfer_seq(contract: &ContractMap, seq: &[MethodId], t: &BfaTriple) -> Option<BfaTriple> {
    seq.iter()
        .try_fold(t.clone(), |acc, m| dtransfer(contract, *m, &acc))
}

/// ⟨E₁ ∩ E₂ ∖ (D₁ ∪ D₂), D₁ ∪ D₂, P₁ ∪ P₂⟩
pub fn join_triple(a: &BfaTriple, b: &BfaTriple) -> Result<BfaTriple, WidthMismatch> {
    let disable = a.disable.try_union(&b.disable)?;
    Ok(BfaTriple {
        enable: a.enable.try_intersection(&b.enable)?.try_difference(&disable)?,
        disable,
        pre: a.pre.try_union(&b.pre)?,
    })
}
