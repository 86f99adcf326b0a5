//! BFA contracts: the per-class mapping from methods to ⟨E, D, P⟩ triples.
//!
//! Contracts are built from a parse-independent description of an annotated
//! class ([`ClassContractDecl`]). The alphabet puts the constructor at index
//! 0 and the remaining methods in name order, so bit patterns are stable no
//! matter how the methods were declared.

use std::collections::HashMap;
use std::fmt;

use crate::bitset::{MethodId, MethodSet};
use crate::error::ContractError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AnnotationKind {
    Enable,
    Disable,
    EnableOnly,
    DisableOnly,
    EnableAll,
    DisableAll,
}

impl AnnotationKind {
    pub fn keyword(self) -> &'static str {
        match self {
            AnnotationKind::Enable => "Enable",
            AnnotationKind::Disable => "Disable",
            AnnotationKind::EnableOnly => "EnableOnly",
            AnnotationKind::DisableOnly => "DisableOnly",
            AnnotationKind::EnableAll => "EnableAll",
            AnnotationKind::DisableAll => "DisableAll",
        }
    }

    pub fn from_keyword(word: &str) -> Option<Self> {
        Some(match word {
            "Enable" => AnnotationKind::Enable,
            "Disable" => AnnotationKind::Disable,
            "EnableOnly" => AnnotationKind::EnableOnly,
            "DisableOnly" => AnnotationKind::DisableOnly,
            "EnableAll" => AnnotationKind::EnableAll,
            "DisableAll" => AnnotationKind::DisableAll,
            _ => return None,
        })
    }

    /// `@EnableAll` and `@DisableAll` take no argument list.
    pub fn takes_names(self) -> bool {
        !matches!(self, AnnotationKind::EnableAll | AnnotationKind::DisableAll)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Annotation {
    pub kind: AnnotationKind,
    pub names: Vec<String>,
}

impl Annotation {
    pub fn new(kind: AnnotationKind, names: &[&str]) -> Self {
        Self {
            kind,
            names: names.iter().map(|s| s.to_string()).collect(),
        }
    }
}

impl fmt::Display for Annotation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "@{}", self.kind.keyword())?;
        if self.kind.takes_names() {
            write!(f, "({})", self.names.join(", "))?;
        }
        Ok(())
    }
}

/// A class as far as contract construction is concerned.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassContractDecl {
    pub class_name: String,
    /// Methods in declaration order, constructor included if declared.
    pub methods: Vec<(String, Vec<Annotation>)>,
}

/// Ordered method names of a class; index 0 is the constructor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alphabet {
    names: Vec<String>,
    index: HashMap<String, usize>,
}

impl Alphabet {
    pub fn new(names: Vec<String>) -> Self {
        let index = names
            .iter()
            .enumerate()
            .map(|(i, n)| (n.clone(), i))
            .collect();
        Self { names, index }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, m: MethodId) -> &str {
        &self.names[m.0]
    }

    pub fn lookup(&self, name: &str) -> Option<MethodId> {
        self.index.get(name).copied().map(MethodId)
    }

    pub fn ids(&self) -> impl Iterator<Item = MethodId> {
        (0..self.names.len()).map(MethodId)
    }

    /// Every method except the constructor.
    pub fn callable(&self) -> MethodSet {
        let mut set = MethodSet::full(self.len());
        set.remove(MethodId::CONSTRUCTOR);
        set
    }

    pub fn format_set(&self, set: &MethodSet) -> String {
        let names: Vec<&str> = set.iter().map(|m| self.name(m)).collect();
        format!("{{{}}}", names.join(","))
    }
}

/// ⟨E, D, P⟩: enabled, disabled and pre-condition method sets.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BfaTriple {
    pub enable: MethodSet,
    pub disable: MethodSet,
    pub pre: MethodSet,
}

impl BfaTriple {
    pub fn new(enable: MethodSet, disable: MethodSet, pre: MethodSet) -> Self {
        Self {
            enable,
            disable,
            pre,
        }
    }

    /// ⟨∅, ∅, ∅⟩
    pub fn identity(width: usize) -> Self {
        Self::new(
            MethodSet::empty(width),
            MethodSet::empty(width),
            MethodSet::empty(width),
        )
    }

    pub fn from_indices(
        width: usize,
        enable: impl IntoIterator<Item = usize>,
        disable: impl IntoIterator<Item = usize>,
        pre: impl IntoIterator<Item = usize>,
    ) -> Self {
        Self::new(
            MethodSet::from_indices(width, enable),
            MethodSet::from_indices(width, disable),
            MethodSet::from_indices(width, pre),
        )
    }

    pub fn width(&self) -> usize {
        self.enable.width()
    }

    pub fn display<'a>(&'a self, alphabet: &'a Alphabet) -> impl fmt::Display + 'a {
        struct Show<'a>(&'a BfaTriple, &'a Alphabet);
        impl fmt::Display for Show<'_> {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(
                    f,
                    "({}, {}, {})",
                    self.1.format_set(&self.0.enable),
                    self.1.format_set(&self.0.disable),
                    self.1.format_set(&self.0.pre)
                )
            }
        }
        Show(self, alphabet)
    }
}

impl fmt::Debug for BfaTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "⟨{:?}, {:?}, {:?}⟩", self.enable, self.disable, self.pre)
    }
}

/// The mapping L_c for one class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContractMap {
    pub class_name: String,
    pub alphabet: Alphabet,
    pub entries: Vec<BfaTriple>,
    /// Number of atomic annotation terms the contract was written with.
    pub annotation_terms: usize,
}

impl ContractMap {
    pub fn width(&self) -> usize {
        self.alphabet.len()
    }

    pub fn entry(&self, m: MethodId) -> &BfaTriple {
        &self.entries[m.0]
    }

    pub fn constructor(&self) -> &BfaTriple {
        &self.entries[0]
    }

    pub fn method(&self, name: &str) -> Option<MethodId> {
        self.alphabet.lookup(name)
    }
}

/// Expands one annotation into its ⟨E, D⟩ pair.
pub fn desugar_one(
    annotation: &Annotation,
    alphabet: &Alphabet,
    class: &str,
    method: &str,
) -> Result<(MethodSet, MethodSet), ContractError> {
    let width = alphabet.len();
    let callable = alphabet.callable();
    let mut named = MethodSet::empty(width);
    for name in &annotation.names {
        match alphabet.lookup(name) {
            Some(id) if !id.is_constructor() => {
                named.insert(id);
            }
            _ => {
                return Err(ContractError::UnknownMethodName {
                    class: class.to_string(),
                    method: method.to_string(),
                    name: name.clone(),
                })
            }
        }
    }
    let empty = MethodSet::empty(width);
    Ok(match annotation.kind {
        AnnotationKind::Enable => (named, empty),
        AnnotationKind::Disable => (empty, named),
        AnnotationKind::EnableOnly => {
            let rest = callable.difference(&named);
            (named, rest)
        }
        AnnotationKind::DisableOnly => {
            let rest = callable.difference(&named);
            (rest, named)
        }
        AnnotationKind::EnableAll => (callable, empty),
        AnnotationKind::DisableAll => (empty, callable),
    })
}

/// Expands and unions all annotations on one method.
pub fn desugar(
    annotations: &[Annotation],
    alphabet: &Alphabet,
    class: &str,
    method: &str,
) -> Result<(MethodSet, MethodSet), ContractError> {
    let width = alphabet.len();
    let mut enable = MethodSet::empty(width);
    let mut disable = MethodSet::empty(width);
    for a in annotations {
        let (e, d) = desugar_one(a, alphabet, class, method)?;
        enable.union_with(&e);
        disable.union_with(&d);
    }
    let overlap = enable.intersection(&disable);
    if !overlap.is_empty() {
        return Err(ContractError::OverlappingEnableDisable {
            class: class.to_string(),
            method: method.to_string(),
            overlap: overlap.iter().map(|m| alphabet.name(m).to_string()).collect(),
        });
    }
    Ok((enable, disable))
}

/// Alphabet for a class: constructor first, other methods in name order.
pub fn alphabet_for(class_name: &str, methods: &[&str]) -> Alphabet {
    let mut names: Vec<String> = methods
        .iter()
        .filter(|m| **m != class_name)
        .map(|m| m.to_string())
        .collect();
    names.sort();
    names.insert(0, class_name.to_string());
    Alphabet::new(names)
}

pub fn build_contract(decl: &ClassContractDecl) -> Result<ContractMap, ContractError> {
    let class = decl.class_name.as_str();
    let mut seen = HashMap::new();
    for (name, _) in &decl.methods {
        if seen.insert(name.as_str(), ()).is_some() {
            return Err(ContractError::DuplicateMethod {
                class: class.to_string(),
                name: name.clone(),
            });
        }
    }
    let names: Vec<&str> = decl.methods.iter().map(|(n, _)| n.as_str()).collect();
    let alphabet = alphabet_for(class, &names);
    if alphabet.len() < 2 {
        return Err(ContractError::NoMethods {
            class: class.to_string(),
        });
    }
    let width = alphabet.len();
    let mut entries = vec![BfaTriple::identity(width); width];
    let mut ctor_annotations: &[Annotation] = &[];
    let mut terms = 0;
    // Methods that another method names in an @Enable or @EnableOnly.
    let mut guarded = MethodSet::empty(width);
    for (name, annotations) in &decl.methods {
        terms += annotations.len();
        if name == class {
            ctor_annotations = annotations;
            continue;
        }
        let id = alphabet.lookup(name).expect("method in alphabet");
        for a in annotations {
            if matches!(a.kind, AnnotationKind::Enable | AnnotationKind::EnableOnly) {
                for target in a.names.iter().filter(|n| *n != name) {
                    if let Some(t) = alphabet.lookup(target) {
                        guarded.insert(t);
                    }
                }
            }
        }
        let (enable, disable) = desugar(annotations, &alphabet, class, name)?;
        entries[id.0] = BfaTriple::new(enable, disable, MethodSet::singleton(width, id));
    }

    let (enable0, disable0) = if ctor_annotations.is_empty() {
        // Sugar such as @EnableAll does not guard a method; only an explicit
        // mention by another method does.
        let enable0 = alphabet.callable().difference(&guarded);
        let disable0 = enable0.complement();
        (enable0, disable0)
    } else {
        let (e, mut d) = desugar(ctor_annotations, &alphabet, class, class)?;
        d.insert(MethodId::CONSTRUCTOR);
        (e, d)
    };
    entries[0] = BfaTriple::new(
        enable0,
        disable0,
        MethodSet::singleton(width, MethodId::CONSTRUCTOR),
    );

    let contract = ContractMap {
        class_name: class.to_string(),
        alphabet,
        entries,
        annotation_terms: terms,
    };
    let report = check_well_formed(&contract);
    if let Some(v) = report.violations.first() {
        return Err(match v {
            Violation::Overlap { method, overlap } => ContractError::OverlappingEnableDisable {
                class: class.to_string(),
                method: method.clone(),
                overlap: overlap.clone(),
            },
            Violation::ConstructorNotPartition { missing } => {
                ContractError::WellFormednessViolation {
                    class: class.to_string(),
                    detail: format!("unassigned {{{}}}", missing.join(",")),
                }
            }
        });
    }
    Ok(contract)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    Overlap { method: String, overlap: Vec<String> },
    ConstructorNotPartition { missing: Vec<String> },
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct WellFormedReport {
    pub violations: Vec<Violation>,
}

impl WellFormedReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn check_well_formed(contract: &ContractMap) -> WellFormedReport {
    let alphabet = &contract.alphabet;
    let mut violations = Vec::new();
    let ctor = contract.constructor();
    let covered = ctor.enable.union(&ctor.disable);
    if covered != MethodSet::full(contract.width()) {
        violations.push(Violation::ConstructorNotPartition {
            missing: covered
                .complement()
                .iter()
                .map(|m| alphabet.name(m).to_string())
                .collect(),
        });
    }
    for m in alphabet.ids() {
        let t = contract.entry(m);
        let overlap = t.enable.intersection(&t.disable);
        if !overlap.is_empty() {
            violations.push(Violation::Overlap {
                method: alphabet.name(m).to_string(),
                overlap: overlap.iter().map(|x| alphabet.name(x).to_string()).collect(),
            });
        }
    }
    WellFormedReport { violations }
}

/// Which method-wise inclusion to test in [`subsumes`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Polarity {
    /// `sub` accepts every sequence `super` accepts: E_super ⊆ E_sub,
    /// D_sub ⊆ D_super, P_sub ⊆ P_super.
    #[default]
    Refinement,
    /// E_sub ⊆ E_super, D_sub ⊇ D_super, P_sub ⊆ P_super, which orders the
    /// languages the other way round.
    Restriction,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SubsumptionVerdict {
    Subsumes,
    DoesNotSubsume { first_failing: String },
}

impl SubsumptionVerdict {
    pub fn holds(&self) -> bool {
        matches!(self, SubsumptionVerdict::Subsumes)
    }
}

pub fn subsumes(
    sub: &ContractMap,
    sup: &ContractMap,
    polarity: Polarity,
) -> Result<SubsumptionVerdict, ContractError> {
    if sub.alphabet.names()[1..] != sup.alphabet.names()[1..] {
        return Err(ContractError::AlphabetMismatch {
            left: sub.alphabet.names().to_vec(),
            right: sup.alphabet.names().to_vec(),
        });
    }
    for m in sub.alphabet.ids() {
        let a = sub.entry(m);
        let b = sup.entry(m);
        let ok = match polarity {
            Polarity::Refinement => {
                b.enable.is_subset(&a.enable)
                    && a.disable.is_subset(&b.disable)
                    && a.pre.is_subset(&b.pre)
            }
            Polarity::Restriction => {
                a.enable.is_subset(&b.enable)
                    && b.disable.is_subset(&a.disable)
                    && a.pre.is_subset(&b.pre)
            }
        };
        if !ok {
            return Ok(SubsumptionVerdict::DoesNotSubsume {
                first_failing: sub.alphabet.name(m).to_string(),
            });
        }
    }
    Ok(SubsumptionVerdict::Subsumes)
}
