//! The compositional analyzer over ⟨E, D, P⟩ triples.
//!
//! Composed methods are summarized bottom-up; a summary maps the paths a
//! method can reach to the accumulated effect of its body. A call is
//! flagged when the callee's pre-condition meets the caller's disable set.

use std::collections::BTreeMap;

use crate::analysis::dataflow::{solve, Solution};
use crate::analysis::domain::{join_state, AbstractState, Summary, Warning};
use crate::analysis::program::{BodyInfo, MethodKey, Op, ProgramInfo};
use crate::bitset::MethodSet;
use crate::contracts::{BfaTriple, ContractMap};
use crate::error::AnalysisError;
use crate::frontend::ast::{AccessPath, Program};

/// Combines the effect `w` into the current triple of a path. Applied
/// whether or not the guard passed, so analysis continues after a warning.
pub fn apply_effect(cur: &BfaTriple, w: &BfaTriple) -> BfaTriple {
    BfaTriple {
        enable: cur.enable.union(&w.enable).difference(&w.disable),
        disable: cur.disable.union(&w.disable).difference(&w.enable),
        pre: cur.pre.union(&w.pre.difference(&cur.enable)),
    }
}

/// The methods `w` needs that `cur` has disabled. Empty means the call is
/// allowed.
pub fn guard(cur: Option<&BfaTriple>, w: &BfaTriple) -> MethodSet {
    match cur {
        Some(t) => w.pre.intersection(&t.disable),
        None => MethodSet::empty(w.width()),
    }
}

/// Per-node states of one body at the fixpoint, plus its warnings.
#[derive(Debug, Clone)]
pub struct Trace {
    pub states: Solution<AbstractState>,
    pub warnings: Vec<Warning>,
}

pub struct BfaAnalysis<'p> {
    pub info: ProgramInfo<'p>,
    pub summaries: BTreeMap<MethodKey, Summary>,
    traces: BTreeMap<MethodKey, Trace>,
}

impl<'p> BfaAnalysis<'p> {
    pub fn new(program: &'p Program) -> Result<Self, AnalysisError> {
        let info = ProgramInfo::new(program)?;
        let mut this = Self {
            info,
            summaries: BTreeMap::new(),
            traces: BTreeMap::new(),
        };
        for m in this.info.order.clone() {
            let body = &this.info.methods[&m];
            let trace = this.run(body);
            let exit = trace.states.inputs[body.cfg.exit].clone().unwrap_or_default();
            let mut exit_state = AbstractState::new();
            let mut classes = BTreeMap::new();
            for (key, class) in &body.keys {
                if let Some(t) = exit.get(key) {
                    if !(t.enable.is_empty() && t.disable.is_empty() && t.pre.is_empty()) {
                        exit_state.insert(key.clone(), t.clone());
                        classes.insert(key.clone(), class.clone());
                    }
                }
            }
            let summary = Summary {
                method: body.name.clone(),
                exit_state,
                classes,
            };
            this.summaries.insert(m.clone(), summary);
            this.traces.insert(m, trace);
        }
        Ok(this)
    }

    fn contract(&self, class: &str) -> &ContractMap {
        &self.info.program.contracts[class]
    }

    /// Applies one node effect; records violations when `warnings` is given.
    fn step(
        &self,
        sigma: &mut AbstractState,
        op: &Op,
        at: Option<(&BodyInfo, usize, &mut Vec<Warning>)>,
    ) {
        let report = |path: &AccessPath, class: &str, callee: &str, required: &MethodSet| {
            if required.is_empty() {
                return None;
            }
            let names = required
                .iter()
                .map(|m| self.contract(class).alphabet.name(m).to_string())
                .collect();
            Some((path.clone(), callee.to_string(), names))
        };
        let mut found = Vec::new();
        match op {
            Op::Seed { path, class } => {
                let c = self.contract(class).constructor();
                let seeded = BfaTriple::new(
                    c.enable.clone(),
                    c.disable.clone(),
                    MethodSet::empty(c.width()),
                );
                sigma.insert(path.clone(), seeded);
            }
            Op::Base {
                path,
                class,
                method,
                callee,
            } => {
                let w = self.contract(class).entry(*method);
                found.extend(report(path, class, callee, &guard(sigma.get(path), w)));
                let cur = sigma
                    .get(path)
                    .cloned()
                    .unwrap_or_else(|| BfaTriple::identity(w.width()));
                sigma.insert(path.clone(), apply_effect(&cur, w));
            }
            Op::Composed {
                method,
                callee,
                bindings,
            } => {
                let summary = &self.summaries[method];
                for b in bindings {
                    let Some(w) = summary.exit_state.get(&b.key) else {
                        continue;
                    };
                    found.extend(report(&b.actual, &b.class, callee, &guard(sigma.get(&b.actual), w)));
                    let cur = sigma
                        .get(&b.actual)
                        .cloned()
                        .unwrap_or_else(|| BfaTriple::identity(w.width()));
                    sigma.insert(b.actual.clone(), apply_effect(&cur, w));
                }
            }
        }
        if let Some((body, node, out)) = at {
            let span = body.spans[node];
            let file = self.info.file_name(span);
            for (path, callee, names) in found {
                out.push(Warning::new(file, span, callee, &path, names));
            }
        }
    }

    fn run(&self, body: &BodyInfo) -> Trace {
        let entry: AbstractState = body
            .keys
            .iter()
            .map(|(k, class)| (k.clone(), BfaTriple::identity(self.contract(class).width())))
            .collect();
        let states = solve(&body.cfg, entry, join_state, |v, s| {
            let mut sigma = s.clone();
            for op in &body.ops[v] {
                self.step(&mut sigma, op, None);
            }
            sigma
        });
        let mut warnings = Vec::new();
        for (v, ops) in body.ops.iter().enumerate() {
            let Some(input) = &states.inputs[v] else { continue };
            let mut sigma = input.clone();
            for op in ops {
                self.step(&mut sigma, op, Some((body, v, &mut warnings)));
            }
        }
        Trace { states, warnings }
    }

    pub fn method_trace(&self, class: &str, method: &str) -> Option<&Trace> {
        self.traces.get(&(class.to_string(), method.to_string()))
    }

    pub fn function_trace(&self, name: &str) -> Option<Trace> {
        self.info
            .functions
            .iter()
            .find(|f| f.name == name)
            .map(|f| self.run(f))
    }

    pub fn summary(&self, class: &str, method: &str) -> Option<&Summary> {
        self.summaries.get(&(class.to_string(), method.to_string()))
    }

    /// Warnings from every method body and every function, sorted.
    pub fn warnings(&self) -> Vec<Warning> {
        let mut all: Vec<Warning> = self
            .traces
            .values()
            .flat_map(|t| t.warnings.iter().cloned())
            .collect();
        for f in &self.info.functions {
            all.extend(self.run(f).warnings);
        }
        all.sort();
        all.dedup();
        all
    }
}

pub fn analyze_program(program: &Program) -> Result<Vec<Warning>, AnalysisError> {
    Ok(BfaAnalysis::new(program)?.warnings())
}
