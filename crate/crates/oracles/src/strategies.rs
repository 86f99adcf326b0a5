//! Random well-formed contracts for property tests.

use proptest::prelude::*;
use tsa_core::contracts::{build_contract, Annotation, AnnotationKind, ClassContractDecl, ContractMap};

pub const CLASS: &str = "C";

fn method_name(i: usize) -> String {
    format!("m{i}")
}

/// What one method does to each other method: 0 nothing, 1 enable,
/// 2 disable.
fn effects(n: usize) -> impl Strategy<Value = Vec<u8>> {
    prop::collection::vec(0u8..3, n)
}

/// A class with `1..=max_methods` methods, plain @Enable/@Disable
/// annotations with the occasional sugar, and an explicit constructor
/// about a third of the time.
pub fn contract_decl(max_methods: usize) -> impl Strategy<Value = ClassContractDecl> {
    (1..=max_methods).prop_flat_map(contract_decl_exact)
}

/// As [`contract_decl`] with exactly `n` methods besides the constructor.
pub fn contract_decl_exact(n: usize) -> impl Strategy<Value = ClassContractDecl> {
    (
        prop::collection::vec((effects(n), 0u8..8), n),
        prop::option::weighted(0.35, prop::collection::vec(any::<bool>(), n)),
    )
        .prop_map(|(rows, ctor)| {
            let n = rows.len();
            let mut methods = Vec::new();
            if let Some(on) = ctor {
                let names: Vec<String> = (0..n).filter(|i| on[*i]).map(method_name).collect();
                let a = if names.is_empty() {
                    Annotation {
                        kind: AnnotationKind::DisableAll,
                        names: Vec::new(),
                    }
                } else {
                    Annotation {
                        kind: AnnotationKind::EnableOnly,
                        names,
                    }
                };
                methods.push((CLASS.to_string(), vec![a]));
            }
            for (i, (row, sugar)) in rows.into_iter().enumerate() {
                let pick = |v: u8| -> Vec<String> {
                    (0..n).filter(|j| row[*j] == v).map(method_name).collect()
                };
                let mut anns = Vec::new();
                match sugar {
                    0 => anns.push(Annotation {
                        kind: AnnotationKind::EnableAll,
                        names: Vec::new(),
                    }),
                    1 => anns.push(Annotation {
                        kind: AnnotationKind::DisableAll,
                        names: Vec::new(),
                    }),
                    2 if !pick(1).is_empty() => anns.push(Annotation {
                        kind: AnnotationKind::EnableOnly,
                        names: pick(1),
                    }),
                    _ => {
                        for (kind, v) in [(AnnotationKind::Enable, 1), (AnnotationKind::Disable, 2)] {
                            let names = pick(v);
                            if !names.is_empty() {
                                anns.push(Annotation { kind, names });
                            }
                        }
                    }
                }
                methods.push((method_name(i), anns));
            }
            ClassContractDecl {
                class_name: CLASS.to_string(),
                methods,
            }
        })
}

pub fn contract(max_methods: usize) -> impl Strategy<Value = ContractMap> {
    contract_decl(max_methods).prop_map(|d| build_contract(&d).expect("generated contracts are well formed"))
}

/// TSL text of a base class.
pub fn tsl_class(decl: &ClassContractDecl) -> String {
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
