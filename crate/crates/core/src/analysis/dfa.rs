//! Explicit-state baseline: the domain maps each path to a set of automaton
//! states, and composed methods are summarized by per-state tables.
//!
//! After a violation the run continues along the forced successor
//! `(s ∪ E) ∖ D`, the same recovery the triple analyzer uses, so the two
//! report the same calls. A call that fails from the all-enabled state is
//! reported inside the callee. Running the callee from the state with
//! nothing enabled gives what it needs from its caller; the part a caller
//! state lacks is charged to the call site.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::rc::Rc;

use crate::analysis::dataflow::solve;
use crate::analysis::domain::Warning;
use crate::analysis::program::{BodyInfo, MethodKey, Op, ProgramInfo};
use crate::automata::dfa::expand_dfa;
use crate::bitset::{MethodId, MethodSet};
use crate::contracts::{BfaTriple, ContractMap};
use crate::error::AnalysisError;
use crate::frontend::ast::{AccessPath, Program, Span};

type State = u32;

/// States of one contract, interned on demand, with the transition row of
/// each state filled the first time it is needed.
struct Automaton {
    entries: Vec<BfaTriple>,
    states: Vec<MethodSet>,
    index: HashMap<MethodSet, State>,
    /// `rows[q][m] = (target, defined)`
    rows: Vec<Option<Vec<(State, bool)>>>,
    init: State,
    top: State,
    /// States of the object automaton, reachable from `init`.
    reachable: Vec<State>,
}

impl Automaton {
    fn new(contract: &ContractMap, limit: usize) -> Result<Self, AnalysisError> {
        let width = contract.width();
        let mut a = Self {
            entries: contract.entries.clone(),
            states: Vec::new(),
            index: HashMap::new(),
            rows: Vec::new(),
            init: 0,
            top: 0,
            reachable: Vec::new(),
        };
        a.init = a.intern(contract.constructor().enable.clone());
        a.top = a.intern(MethodSet::full(width));
        if let Some(object) = expand_dfa(contract, limit)?.after_constructor() {
            a.reachable = object.states().iter().map(|s| a.intern(s.clone())).collect();
        }
        Ok(a)
    }

    fn intern(&mut self, s: MethodSet) -> State {
        if let Some(q) = self.index.get(&s) {
            return *q;
        }
        let q = self.states.len() as State;
        self.index.insert(s.clone(), q);
        self.states.push(s);
        self.rows.push(None);
        q
    }

    fn step(&mut self, q: State, m: MethodId) -> (State, bool) {
        if self.rows[q as usize].is_none() {
            let b = self.states[q as usize].clone();
            let row = (0..self.entries.len())
                .map(|i| {
                    let t = &self.entries[i];
                    let ok = t.pre.is_subset(&b);
                    let next = b.union(&t.enable).difference(&t.disable);
                    (self.intern(next), ok)
                })
                .collect();
            self.rows[q as usize] = Some(row);
        }
        self.rows[q as usize].as_ref().expect("filled")[m.0]
    }
}

#[derive(Debug)]
struct Entry {
    outputs: Vec<State>,
    /// Requirements the entry state does not meet.
    flag: MethodSet,
}

type States = BTreeSet<State>;

struct Tables<'a> {
    info: &'a ProgramInfo<'a>,
    automata: BTreeMap<String, Automaton>,
    method_index: HashMap<MethodKey, usize>,
    memo: HashMap<(usize, usize, State), Rc<Entry>>,
    requires: HashMap<(usize, usize), MethodSet>,
}

impl<'a> Tables<'a> {
    fn automaton(&mut self, class: &str) -> &mut Automaton {
        self.automata.get_mut(class).expect("contract expanded")
    }

    fn body(&self, mi: usize) -> &'a BodyInfo {
        let info: &'a ProgramInfo<'a> = self.info;
        &info.methods[&info.order[mi]]
    }

    fn key_index(&self, mi: usize, key: &AccessPath) -> usize {
        self.body(mi)
            .keys
            .iter()
            .position(|(k, _)| k == key)
            .expect("binding key is a summary key")
    }

    /// Runs key `ki` of method `mi` from `start` to a fixpoint. Returns the
    /// node inputs and every method some op failed on.
    fn run(&mut self, mi: usize, ki: usize, start: State) -> (Vec<Option<States>>, MethodSet) {
        let body = self.body(mi);
        let (key, class) = &body.keys[ki];
        let width = self.info.program.contracts[class].width();
        let inputs = solve(
            &body.cfg,
            BTreeSet::from([start]),
            |a: &States, b: &States| a.union(b).copied().collect(),
            |v, s| self.table_step(body, key, class, v, s, &mut MethodSet::empty(width)),
        )
        .inputs;
        let mut fails = MethodSet::empty(width);
        for (v, input) in inputs.iter().enumerate() {
            if let Some(input) = input {
                self.table_step(body, key, class, v, input, &mut fails);
            }
        }
        (inputs, fails)
    }

    /// What the body needs from its caller: the methods that fail when it
    /// runs from the state with nothing enabled.
    fn requires(&mut self, mi: usize, ki: usize) -> MethodSet {
        if let Some(r) = self.requires.get(&(mi, ki)) {
            return r.clone();
        }
        let class = &self.body(mi).keys[ki].1;
        let width = self.info.program.contracts[class].width();
        let bottom = self.automaton(class).intern(MethodSet::empty(width));
        let (_, fails) = self.run(mi, ki, bottom);
        self.requires.insert((mi, ki), fails.clone());
        fails
    }

    /// Summary of key `ki` of method `mi` from one entry state.
    fn table(&mut self, mi: usize, ki: usize, start: State) -> Rc<Entry> {
        if let Some(e) = self.memo.get(&(mi, ki, start)) {
            return e.clone();
        }
        let body = self.body(mi);
        let class = &body.keys[ki].1;
        let requires = self.requires(mi, ki);
        let (inputs, _) = self.run(mi, ki, start);
        let flag = requires.difference(&self.automaton(class).states[start as usize]);
        let outputs = inputs[body.cfg.exit].clone().unwrap_or_default().into_iter().collect();
        let e = Rc::new(Entry { outputs, flag });
        self.memo.insert((mi, ki, start), e.clone());
        e
    }

    /// Transfer of node `v` for one key; adds to `fails` what the node's
    /// ops fail on from some state of `input`.
    fn table_step(
        &mut self,
        body: &BodyInfo,
        key: &AccessPath,
        class: &str,
        v: usize,
        input: &States,
        fails: &mut MethodSet,
    ) -> States {
        let mut cur = input.clone();
        for op in &body.ops[v] {
            match op {
                Op::Seed { .. } => {}
                Op::Base { path, method, .. } if path == key => {
                    let auto = self.automaton(class);
                    cur = cur
                        .iter()
                        .map(|&s| {
                            let (t, ok) = auto.step(s, *method);
                            if !ok {
                                fails.insert(*method);
                            }
                            t
                        })
                        .collect();
                }
                Op::Base { .. } => {}
                Op::Composed {
                    method, bindings, ..
                } => {
                    for bnd in bindings.iter().filter(|b| &b.actual == key) {
                        let mi = self.method_index[method];
                        let ki = self.key_index(mi, &bnd.key);
                        let mut next = States::new();
                        for &s in &cur {
                            let e = self.table(mi, ki, s);
                            fails.union_with(&e.flag);
                            next.extend(e.outputs.iter().copied());
                        }
                        cur = next;
                    }
                }
            }
        }
        cur
    }

    /// One effect on the state-set map; returns the violations it causes.
    fn report_step(
        &mut self,
        sigma: &mut BTreeMap<AccessPath, BTreeSet<State>>,
        op: &Op,
    ) -> Vec<(AccessPath, String, String, MethodSet)> {
        let mut found = Vec::new();
        match op {
            Op::Seed { path, class } => {
                let init = self.automaton(class).init;
                sigma.insert(path.clone(), BTreeSet::from([init]));
            }
            Op::Base {
                path,
                class,
                method,
                callee,
            } => {
                let auto = self.automaton(class);
                let cur = sigma.get(path).cloned().unwrap_or_else(|| BTreeSet::from([auto.top]));
                let mut failed = false;
                let next = cur
                    .iter()
                    .map(|&s| {
                        let (t, ok) = auto.step(s, *method);
                        failed |= !ok;
                        t
                    })
                    .collect();
                if failed {
                    let width = auto.entries.len();
                    found.push((
                        path.clone(),
                        class.clone(),
                        callee.clone(),
                        MethodSet::singleton(width, *method),
                    ));
                }
                sigma.insert(path.clone(), next);
            }
            Op::Composed {
                method,
                callee,
                bindings,
            } => {
                let mi = self.method_index[method];
                for bnd in bindings {
                    let ki = self.key_index(mi, &bnd.key);
                    let auto = self.automaton(&bnd.class);
                    let top = auto.top;
                    let width = auto.entries.len();
                    let cur = sigma
                        .get(&bnd.actual)
                        .cloned()
                        .unwrap_or_else(|| BTreeSet::from([top]));
                    let mut required = MethodSet::empty(width);
                    let mut next = BTreeSet::new();
                    for s in cur {
                        let e = self.table(mi, ki, s);
                        required.union_with(&e.flag);
                        next.extend(e.outputs.iter().copied());
                    }
                    if !required.is_empty() {
                        found.push((bnd.actual.clone(), bnd.class.clone(), callee.clone(), required));
                    }
                    sigma.insert(bnd.actual.clone(), next);
                }
            }
        }
        found
    }

    fn report(&mut self, body: &BodyInfo) -> Vec<Warning> {
        let entry: BTreeMap<AccessPath, BTreeSet<State>> = body
            .keys
            .iter()
            .map(|(k, class)| (k.clone(), BTreeSet::from([self.automaton(class).top])))
            .collect();
        let join = |a: &BTreeMap<AccessPath, BTreeSet<State>>, b: &BTreeMap<AccessPath, BTreeSet<State>>| {
            let mut out = a.clone();
            for (p, s) in b {
                out.entry(p.clone()).or_default().extend(s.iter().copied());
            }
            out
        };
        let states = solve(&body.cfg, entry, join, |v, s| {
            let mut sigma = s.clone();
            for op in &body.ops[v] {
                self.report_step(&mut sigma, op);
            }
            sigma
        });
        let mut warnings = Vec::new();
        for (v, ops) in body.ops.iter().enumerate() {
            let Some(input) = &states.inputs[v] else { continue };
            let mut sigma = input.clone();
            for op in ops {
                for (path, class, callee, required) in self.report_step(&mut sigma, op) {
                    warnings.push(self.warning(body.spans[v], path, &class, callee, &required));
                }
            }
        }
        warnings
    }

    fn warning(&self, span: Span, path: AccessPath, class: &str, callee: String, required: &MethodSet) -> Warning {
        let alphabet = &self.info.program.contracts[class].alphabet;
        let names = required.iter().map(|m| alphabet.name(m).to_string()).collect();
        Warning::new(self.info.file_name(span), span, callee, &path, names)
    }
}

/// Number of states each contract's analysis automaton ended up with,
/// including the recovery states created on demand.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DfaStats {
    pub states: BTreeMap<String, usize>,
    pub reachable: BTreeMap<String, usize>,
}

/// The baseline analysis of a whole program. `limit` caps the expansion of
/// every contract.
pub fn dfa_analyze_program_with_stats(
    program: &Program,
    limit: usize,
) -> Result<(Vec<Warning>, DfaStats), AnalysisError> {
    let info = ProgramInfo::new(program)?;
    let mut automata = BTreeMap::new();
    for (class, contract) in &program.contracts {
        automata.insert(class.clone(), Automaton::new(contract, limit)?);
    }
    let method_index = info
        .order
        .iter()
        .enumerate()
        .map(|(i, m)| (m.clone(), i))
        .collect();
    let mut t = Tables {
        info: &info,
        automata,
        method_index,
        memo: HashMap::new(),
        requires: HashMap::new(),
    };
    // Per-state tables for every summary key over the object automaton.
    for mi in 0..info.order.len() {
        let body = t.body(mi);
        for (ki, (_, class)) in body.keys.iter().enumerate() {
            for s in t.automaton(class).reachable.clone() {
                t.table(mi, ki, s);
            }
        }
    }
    let mut warnings = Vec::new();
    for m in &info.order {
        warnings.extend(t.report(&info.methods[m]));
    }
    for f in &info.functions {
        warnings.extend(t.report(f));
    }
    warnings.sort();
    warnings.dedup();
    let stats = DfaStats {
        states: t.automata.iter().map(|(c, a)| (c.clone(), a.states.len())).collect(),
        reachable: t.automata.iter().map(|(c, a)| (c.clone(), a.reachable.len())).collect(),
    };
    Ok((warnings, stats))
}

pub fn dfa_analyze_program(program: &Program, limit: usize) -> Result<Vec<Warning>, AnalysisError> {
    Ok(dfa_analyze_program_with_stats(program, limit)?.0)
}
