//! CR-style base contracts built from toggle pairs and a guarded chain.
//!
//! A toggle pair `tKa`/`tKb` flips between its two methods, so k pairs
//! give 2^k reachable states. The chain head `c0` unlocks the tails
//! `c1..`, which then keep each other enabled. Remaining methods `fK`
//! are unannotated.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use tsa_core::automata::{expand_dfa, minimize_dfa, DEFAULT_STATE_LIMIT};
use tsa_core::contracts::{build_contract, Annotation, AnnotationKind, ClassContractDecl, ContractMap};
use tsa_core::MethodId;

use crate::spec::{ContractSpec, SpecError};

#[derive(Debug, Clone)]
pub struct GeneratedContract {
    pub class_name: String,
    pub text: String,
    pub contract: ContractMap,
    pub methods: usize,
    pub annotation_terms: usize,
    /// Minimized object automaton (after the constructor); `None` when
    /// expansion hits the state limit.
    pub states_min: Option<usize>,
    pub transitions_min: Option<usize>,
    /// Methods whose behavior depends only on the chain length, the number
    /// of free methods and whether toggles exist. A client that sticks to
    /// these stays valid across contracts of different sizes.
    pub client_methods: Vec<MethodId>,
}

impl GeneratedContract {
    /// Two atomic terms (@Pre and @Post) per minimized transition.
    pub fn dfa_terms(&self) -> Option<usize> {
        self.transitions_min.map(|t| 2 * t)
    }
}

fn ann(kind: AnnotationKind, names: Vec<String>) -> Annotation {
    Annotation { kind, names }
}

pub fn contract_decl(spec: &ContractSpec, class_name: &str) -> Result<ClassContractDecl, SpecError> {
    spec.validate()?;
    let k = spec.toggle_pairs;
    let l = spec.chain_length;
    let free = spec.methods - 2 * k - l;
    let chain: Vec<String> = (0..l).map(|i| format!("c{i}")).collect();
    let frees: Vec<String> = (0..free).map(|i| format!("f{i}")).collect();

    let mut methods: Vec<(String, Vec<Annotation>)> = Vec::new();
    for i in 0..k {
        let (a, b) = (format!("t{i}a"), format!("t{i}b"));
        methods.push((
            a.clone(),
            vec![ann(AnnotationKind::Enable, vec![b.clone()]), ann(AnnotationKind::Disable, vec![a.clone()])],
        ));
        methods.push((b.clone(), vec![ann(AnnotationKind::Enable, vec![a]), ann(AnnotationKind::Disable, vec![b])]));
    }
    for (i, c) in chain.iter().enumerate() {
        let anns = if i == 0 {
            if l > 1 {
                vec![ann(AnnotationKind::Enable, chain[1..].to_vec())]
            } else {
                Vec::new()
            }
        } else {
            let next = if i + 1 < l { i + 1 } else { 1 };
            if next == i {
                Vec::new()
            } else {
                vec![ann(AnnotationKind::Enable, vec![chain[next].clone()])]
            }
        };
        methods.push((c.clone(), anns));
    }
    for f in &frees {
        methods.push((f.clone(), Vec::new()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    methods.shuffle(&mut rng);
    if k > 0 {
        let mut on: Vec<String> = chain.iter().take(1).cloned().collect();
        on.extend((0..k).map(|i| format!("t{i}a")));
        on.extend(frees.iter().cloned());
        methods.insert(0, (class_name.to_string(), vec![ann(AnnotationKind::EnableOnly, on)]));
    }
    Ok(ClassContractDecl {
        class_name: class_name.to_string(),
        methods,
    })
}

pub fn class_text(decl: &ClassContractDecl) -> String {
    let mut out = format!("class {} {{\n", decl.class_name);
    for (name, anns) in &decl.methods {
        for a in anns {
            out.push_str(&format!("    {a}\n"));
        }
        out.push_str(&format!("    void {name}();\n"));
    }
    out.push_str("}\n");
    out
}

pub fn gen_contract(spec: &ContractSpec, class_name: &str) -> Result<GeneratedContract, SpecError> {
    let decl = contract_decl(spec, class_name)?;
    let contract = build_contract(&decl).map_err(|e| SpecError::SpecInvalid(e.to_string()))?;
    let (states_min, transitions_min) = match expand_dfa(&contract, DEFAULT_STATE_LIMIT) {
        Ok(dfa) => {
            let object = dfa.after_constructor().expect("the constructor is always callable");
            let min = minimize_dfa(&object);
            (Some(min.num_states()), Some(min.num_transitions()))
        }
        Err(_) => (None, None),
    };
    let mut client_methods: Vec<MethodId> = contract
        .alphabet
        .ids()
        .filter(|m| {
            let name = contract.alphabet.name(*m);
            !m.is_constructor() && (name.starts_with('c') || name.starts_with('f') || name.starts_with("t0"))
        })
        .collect();
    client_methods.sort();
    Ok(GeneratedContract {
        class_name: class_name.to_string(),
        text: class_text(&decl),
        methods: spec.methods,
        annotation_terms: contract.annotation_terms,
        contract,
        states_min,
        transitions_min,
        client_methods,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(methods: usize, toggle_pairs: usize, chain_length: usize) -> ContractSpec {
        ContractSpec {
            methods,
            toggle_pairs,
            chain_length,
            seed: 7,
        }
    }

    #[test]
    fn cr1_shape() {
        let g = gen_contract(&spec(3, 0, 3), "CR1").unwrap();
        assert_eq!(g.methods, 3);
        assert_eq!(g.annotation_terms, 3);
        assert_eq!(g.states_min, Some(2));
    }

    #[test]
    fn text_round_trips() {
        let g = gen_contract(&spec(9, 2, 3), "B0").unwrap();
        let p = tsa_core::frontend::parse_program(&g.text).unwrap();
        assert_eq!(p.classes[0].name, "B0");
    }

    #[test]
    fn toggles_double_the_states() {
        for k in 0..=6 {
            let g = gen_contract(&spec(2 * k + 1, k, 0), "T").unwrap();
            assert_eq!(g.states_min, Some(1 << k), "k = {k}");
        }
    }

    #[test]
    fn single_method() {
        let g = gen_contract(&spec(1, 0, 0), "One").unwrap();
        assert_eq!(g.annotation_terms, 0);
        assert_eq!(g.states_min, Some(1));
    }

    #[test]
    fn deterministic() {
        let a = gen_contract(&spec(12, 3, 4), "B").unwrap();
        let b = gen_contract(&spec(12, 3, 4), "B").unwrap();
        assert_eq!(a.text, b.text);
    }

    #[test]
    fn invalid() {
        assert!(gen_contract(&spec(3, 2, 0), "B").is_err());
        assert!(gen_contract(&spec(0, 0, 0), "B").is_err());
    }
}
