//! `key=value` specifications for generated contracts, clients and
//! benchmark matrices.

use std::collections::BTreeMap;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpecError {
    #[error("line {line}: expected key=value, found `{token}`")]
    Syntax { line: usize, token: String },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: key `{key}` given twice")]
    DuplicateKey { line: usize, key: String },
    #[error("line {line}: bad value `{value}` for `{key}`")]
    BadValue { line: usize, key: String, value: String },
    #[error("invalid spec: {0}")]
    SpecInvalid(String),
}

/// Parsed `key=value` pairs of one line.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct KeyValues {
    line: usize,
    pairs: BTreeMap<String, String>,
}

impl KeyValues {
    pub fn parse_tokens<'a>(tokens: impl IntoIterator<Item = &'a str>, line: usize) -> Result<Self, SpecError> {
        let mut pairs = BTreeMap::new();
        for tok in tokens {
            let Some((k, v)) = tok.split_once('=') else {
                return Err(SpecError::Syntax {
                    line,
                    token: tok.to_string(),
                });
            };
            if k.is_empty() || v.is_empty() {
                return Err(SpecError::Syntax {
                    line,
                    token: tok.to_string(),
                });
            }
            if pairs.insert(k.to_string(), v.to_string()).is_some() {
                return Err(SpecError::DuplicateKey {
                    line,
                    key: k.to_string(),
                });
            }
        }
        Ok(Self { line, pairs })
    }

    pub fn parse_line(text: &str, line: usize) -> Result<Self, SpecError> {
        Self::parse_tokens(text.split_whitespace(), line)
    }

    /// Fails on any key outside `known`.
    pub fn check_keys(&self, known: &[&str]) -> Result<(), SpecError> {
        match self.pairs.keys().find(|k| !known.contains(&k.as_str())) {
            Some(k) => Err(SpecError::UnknownKey {
                line: self.line,
                key: k.clone(),
            }),
            None => Ok(()),
        }
    }

    pub fn get<T: FromStr>(&self, key: &str, default: T) -> Result<T, SpecError> {
        match self.pairs.get(key) {
            None => Ok(default),
            Some(v) => v.parse().map_err(|_| SpecError::BadValue {
                line: self.line,
                key: key.to_string(),
                value: v.clone(),
            }),
        }
    }

    pub fn get_str(&self, key: &str) -> Option<&str> {
        self.pairs.get(key).map(String::as_str)
    }
}

pub const CONTRACT_KEYS: &[&str] = &["methods", "toggle_pairs", "chain_length", "seed"];
pub const CLIENT_KEYS: &[&str] = &["loc", "base_classes", "depth", "branch", "loop", "seed", "inject_bug"];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContractSpec {
    pub methods: usize,
    pub toggle_pairs: usize,
    pub chain_length: usize,
    pub seed: u64,
}

impl ContractSpec {
    pub fn validate(&self) -> Result<(), SpecError> {
        if self.methods == 0 {
            return Err(SpecError::SpecInvalid("a contract needs at least one method".into()));
        }
        if self.toggle_pairs * 2 + self.chain_length > self.methods {
            return Err(SpecError::SpecInvalid(format!(
                "toggle_pairs*2 + chain_length = {} exceeds methods = {}",
                self.toggle_pairs * 2 + self.chain_length,
                self.methods
            )));
        }
        if self.methods > 63 {
            return Err(SpecError::SpecInvalid("at most 63 methods".into()));
        }
        Ok(())
    }

    pub fn from_kv(kv: &KeyValues) -> Result<Self, SpecError> {
        let spec = Self {
            methods: kv.get("methods", 3)?,
            toggle_pairs: kv.get("toggle_pairs", 0)?,
            chain_length: kv.get("chain_length", 0)?,
            seed: kv.get("seed", 0)?,
        };
        spec.validate()?;
        Ok(spec)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClientSpec {
    pub loc_target: usize,
    pub num_base_classes: usize,
    pub composition_depth: usize,
    pub branch_density: f64,
    pub loop_density: f64,
    pub seed: u64,
    pub inject_bug: bool,
}

impl ClientSpec {
    pub fn validate(&self) -> Result<(), SpecError> {
        for (name, v) in [("branch", self.branch_density), ("loop", self.loop_density)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(SpecError::SpecInvalid(format!("{name} density {v} is not in [0,1]")));
            }
        }
        if self.loc_target < 10 {
            return Err(SpecError::SpecInvalid("loc must be at least 10".into()));
        }
        if self.num_base_classes == 0 {
            return Err(SpecError::SpecInvalid("at least one base class".into()));
        }
        if self.composition_depth > 8 {
            return Err(SpecError::SpecInvalid("composition depth above 8".into()));
        }
        Ok(())
    }

    pub fn from_kv(kv: &KeyValues) -> Result<Self, SpecError> {
        let spec = Self {
            loc_target: kv.get("loc", 100)?,
            num_base_classes: kv.get("base_classes", 1)?,
            composition_depth: kv.get("depth", 1)?,
            branch_density: kv.get("branch", 0.1)?,
            loop_density: kv.get("loop", 0.05)?,
            seed: kv.get("seed", 0)?,
            inject_bug: kv.get("inject_bug", false)?,
        };
        spec.validate()?;
        Ok(spec)
    }
}

/// One benchmark cell: a contract shape shared by every base class, a
/// client, and how often to time each analyzer.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixCell {
    pub contract_id: String,
    pub contract: ContractSpec,
    pub client: ClientSpec,
    pub runs: usize,
}

/// A matrix file: one cell per line, `#` comments and blank lines ignored.
/// Contract and client keys share the line; `seed` seeds both.
pub fn parse_matrix(text: &str) -> Result<Vec<MatrixCell>, SpecError> {
    let mut cells = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let kv = KeyValues::parse_line(line, i + 1)?;
        let mut known: Vec<&str> = CONTRACT_KEYS.iter().chain(CLIENT_KEYS).copied().collect();
        known.extend(["id", "runs"]);
        kv.check_keys(&known)?;
        let runs: usize = kv.get("runs", 5)?;
        if runs == 0 {
            return Err(SpecError::SpecInvalid(format!("line {}: runs must be positive", i + 1)));
        }
        cells.push(MatrixCell {
            contract_id: kv.get_str("id").map(str::to_string).unwrap_or_else(|| format!("cell{}", cells.len() + 1)),
            contract: ContractSpec::from_kv(&kv)?,
            client: ClientSpec::from_kv(&kv)?,
            runs,
        });
    }
    Ok(cells)
}
