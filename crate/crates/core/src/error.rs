use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("method set width mismatch: {left} vs {right}")]
pub struct WidthMismatch {
    pub left: usize,
    pub right: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ContractError {
    #[error("class {class}: unknown method name `{name}` in annotation on `{method}`")]
    UnknownMethodName {
        class: String,
        method: String,
        name: String,
    },
    #[error("class {class}: method `{method}` both enables and disables {{{}}}", overlap.join(","))]
    OverlappingEnableDisable {
        class: String,
        method: String,
        overlap: Vec<String>,
    },
    #[error("class {class}: constructor does not partition the alphabet ({detail})")]
    WellFormednessViolation { class: String, detail: String },
    #[error("class {class}: duplicate method `{name}`")]
    DuplicateMethod { class: String, name: String },
    #[error("class {class}: a contract needs at least one method besides the constructor")]
    NoMethods { class: String },
    #[error("alphabet mismatch: [{}] vs [{}]", left.join(","), right.join(","))]
    AlphabetMismatch { left: Vec<String>, right: Vec<String> },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AutomatonError {
    #[error(transparent)]
    Width(#[from] WidthMismatch),
    #[error("state explosion: more than {limit} states")]
    StateExplosionLimit { limit: usize },
    #[error("state {0} is not a state of this automaton")]
    UnknownState(String),
    #[error("alphabet mismatch: [{}] vs [{}]", left.join(","), right.join(","))]
    AlphabetMismatch { left: Vec<String>, right: Vec<String> },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FrontendError {
    #[error("{line}:{col}: syntax error: expected {expected}, found {found}")]
    SyntaxError {
        line: usize,
        col: usize,
        expected: String,
        found: String,
    },
    #[error("{line}:{col}: name resolution error: {message}")]
    NameResolutionError {
        line: usize,
        col: usize,
        message: String,
    },
    #[error("{line}:{col}: type error: {message}")]
    TypeError {
        line: usize,
        col: usize,
        message: String,
    },
    #[error(transparent)]
    Contract(#[from] ContractError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnalysisError {
    #[error("recursion is not supported: {}", cycle.join(" -> "))]
    RecursionUnsupported { cycle: Vec<String> },
    #[error("no summary for {0}")]
    MissingSummary(String),
    #[error(transparent)]
    Automaton(#[from] AutomatonError),
    #[error(transparent)]
    Contract(#[from] ContractError),
}
