//! Client programs that are valid by construction.
//!
//! The generator runs the same ⟨E, D, P⟩ transfer the analyzer uses while
//! it writes code, and only emits a call whose requirements are not
//! definitely disabled at that point. Composed-method effects are tracked
//! the same way, so callers can check them before calling.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tsa_core::analysis::bfa::apply_effect;
use tsa_core::automata::semantics::join_triple;
use tsa_core::contracts::BfaTriple;
use tsa_core::{MethodId, MethodSet};

use crate::contract_gen::GeneratedContract;
use crate::spec::{ClientSpec, SpecError};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratedClient {
    /// Composed classes and functions; base classes are not included.
    pub text: String,
    pub loc: usize,
    /// 1-based line in `text` of the injected violation.
    pub bug_line: Option<usize>,
}

impl GeneratedClient {
    /// Base classes followed by the client.
    pub fn program_text(&self, contracts: &[GeneratedContract]) -> String {
        let mut out: String = contracts.iter().map(|c| c.text.as_str()).collect();
        out.push_str(&self.text);
        out
    }

    /// Line of the injected violation within [`Self::program_text`].
    pub fn bug_site(&self, contracts: &[GeneratedContract]) -> Option<usize> {
        let header: usize = contracts.iter().map(|c| c.text.lines().count()).sum();
        self.bug_line.map(|l| l + header)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Ty {
    Base(usize),
    Composed(usize),
}

#[derive(Debug, Clone)]
struct Method {
    name: String,
    /// Effect per leaf, relative to `this`.
    effect: Vec<(Vec<String>, BfaTriple)>,
    body: Vec<Gen>,
}

#[derive(Debug, Clone)]
struct Class {
    name: String,
    fields: Vec<(String, Ty)>,
    methods: Vec<Method>,
}

#[derive(Debug, Clone)]
enum Gen {
    Base { recv: Vec<String>, base: usize, m: MethodId },
    Composed { recv: Vec<String>, class: usize, method: usize },
    If(Vec<Gen>, Option<Vec<Gen>>),
    Loop(Vec<Gen>),
}

impl Gen {
    fn lines(&self) -> usize {
        match self {
            Gen::Base { .. } | Gen::Composed { .. } => 1,
            Gen::If(t, None) => 2 + block_lines(t),
            Gen::If(t, Some(e)) => 3 + block_lines(t) + block_lines(e),
            Gen::Loop(b) => 2 + block_lines(b),
        }
    }
}

fn block_lines(b: &[Gen]) -> usize {
    b.iter().map(Gen::lines).sum()
}

type State = BTreeMap<Vec<String>, BfaTriple>;

struct Generator<'a> {
    rng: ChaCha8Rng,
    spec: &'a ClientSpec,
    bases: &'a [GeneratedContract],
    classes: Vec<Class>,
}

fn pick(rng: &mut ChaCha8Rng, n: usize) -> usize {
    rng.gen_range(0..n as u64) as usize
}

fn join(a: &State, b: &State) -> State {
    let mut out = a.clone();
    for (k, t) in b {
        let j = match a.get(k) {
            Some(u) => join_triple(u, t).expect("same class on both sides"),
            None => t.clone(),
        };
        out.insert(k.clone(), j);
    }
    out
}

/// Applies `w` to the leaf at `key`; false when the guard fails.
fn step(state: &mut State, key: &[String], w: &BfaTriple) -> bool {
    let t = state.get(key).expect("every leaf is tracked");
    let ok = w.pre.is_disjoint(&t.disable);
    let next = apply_effect(t, w);
    state.insert(key.to_vec(), next);
    ok
}

impl Generator<'_> {
    fn leaves(&self, ty: Ty) -> Vec<(Vec<String>, usize)> {
        match ty {
            Ty::Base(b) => vec![(Vec::new(), b)],
            Ty::Composed(c) => {
                let mut out = Vec::new();
                for (f, t) in &self.classes[c].fields {
                    for (mut rest, b) in self.leaves(*t) {
                        rest.insert(0, f.clone());
                        out.push((rest, b));
                    }
                }
                out
            }
        }
    }

    fn run(&self, block: &[Gen], state: &mut State) -> bool {
        let mut ok = true;
        for g in block {
            ok &= self.run_one(g, state);
        }
        ok
    }

    fn run_one(&self, g: &Gen, state: &mut State) -> bool {
        match g {
            Gen::Base { recv, base, m } => step(state, recv, self.bases[*base].contract.entry(*m)),
            Gen::Composed { recv, class, method } => {
                let mut ok = true;
                for (leaf, w) in &self.classes[*class].methods[*method].effect {
                    let key: Vec<String> = recv.iter().chain(leaf).cloned().collect();
                    ok &= step(state, &key, w);
                }
                ok
            }
            Gen::If(t, e) => {
                let mut a = state.clone();
                let mut b = state.clone();
                let mut ok = self.run(t, &mut a);
                if let Some(e) = e {
                    ok &= self.run(e, &mut b);
                }
                *state = join(&a, &b);
                ok
            }
            Gen::Loop(body) => {
                let mut head = state.clone();
                loop {
                    let mut s = head.clone();
                    self.run(body, &mut s);
                    let next = join(&head, &s);
                    if next == head {
                        break;
                    }
                    head = next;
                }
                let ok = self.run(body, &mut head.clone());
                *state = head;
                ok
            }
        }
    }

    fn call_options(&self, recv: &[String], ty: Ty, state: &State) -> Vec<Gen> {
        match ty {
            Ty::Base(b) => {
                let t = &state[recv];
                self.bases[b]
                    .client_methods
                    .iter()
                    .filter(|m| !t.disable.contains(**m))
                    .map(|m| Gen::Base {
                        recv: recv.to_vec(),
                        base: b,
                        m: *m,
                    })
                    .collect()
            }
            Ty::Composed(c) => (0..self.classes[c].methods.len())
                .map(|k| Gen::Composed {
                    recv: recv.to_vec(),
                    class: c,
                    method: k,
                })
                .filter(|g| self.run_one(g, &mut state.clone()))
                .collect(),
        }
    }

    /// A single call that passes its guard. Direct members are preferred
    /// over deeper base objects.
    fn valid_call(&mut self, scope: &Scope, state: &State) -> Option<Gen> {
        let deep_first = scope.deep.is_empty() || self.rng.gen_bool(0.2);
        let order: [&[(Vec<String>, Ty)]; 2] = if deep_first {
            [&scope.deep, &scope.direct]
        } else {
            [&scope.direct, &scope.deep]
        };
        for group in order {
            if group.is_empty() {
                continue;
            }
            let start = pick(&mut self.rng, group.len());
            for i in 0..group.len() {
                let (recv, ty) = &group[(start + i) % group.len()];
                let options = self.call_options(recv, *ty, state);
                if !options.is_empty() {
                    let k = pick(&mut self.rng, options.len());
                    return Some(options[k].clone());
                }
            }
        }
        None
    }

    /// Exactly `budget` lines of valid code from `state`, which is advanced.
    fn block(&mut self, scope: &Scope, state: &mut State, budget: usize, nest: usize) -> Result<Vec<Gen>, SpecError> {
        let mut out = Vec::new();
        let mut used = 0;
        while used < budget {
            let left = budget - used;
            let roll: f64 = self.rng.gen();
            if nest < 2 && left >= 3 && roll < self.spec.branch_density {
                let with_else = left >= 5 && self.rng.gen_bool(0.5);
                let room = if with_else { left - 3 } else { left - 2 };
                let max_then = if with_else { room - 1 } else { room };
                let n1 = 1 + pick(&mut self.rng, max_then.min(4));
                let mut a = state.clone();
                let t = self.block(scope, &mut a, n1, nest + 1)?;
                let mut b = state.clone();
                let e = if with_else {
                    let n2 = 1 + pick(&mut self.rng, (room - n1).min(4));
                    Some(self.block(scope, &mut b, n2, nest + 1)?)
                } else {
                    None
                };
                *state = join(&a, &b);
                let g = Gen::If(t, e);
                used += g.lines();
                out.push(g);
                continue;
            }
            if nest < 2 && left >= 3 && roll < self.spec.branch_density + self.spec.loop_density {
                let n = 1 + pick(&mut self.rng, (left - 2).min(4));
                let body = self.block(scope, &mut state.clone(), n, nest + 1)?;
                let g = Gen::Loop(body);
                let mut after = state.clone();
                if self.run_one(&g, &mut after) {
                    *state = after;
                    used += g.lines();
                    out.push(g);
                } else {
                    // Not valid on a second iteration: keep it straight-line.
                    let Gen::Loop(body) = g else { unreachable!() };
                    self.run(&body, state);
                    used += block_lines(&body);
                    out.extend(body);
                }
                continue;
            }
            let g = self
                .valid_call(scope, state)
                .ok_or_else(|| SpecError::SpecInvalid("no callable method left in some contract".into()))?;
            self.run_one(&g, state);
            used += 1;
            out.push(g);
        }
        Ok(out)
    }

    fn scope(&self, roots: &[(Vec<String>, Ty)]) -> Scope {
        let mut deep = Vec::new();
        for (path, ty) in roots {
            if let Ty::Composed(_) = ty {
                for (leaf, b) in self.leaves(*ty) {
                    deep.push((path.iter().chain(&leaf).cloned().collect(), Ty::Base(b)));
                }
            }
        }
        Scope {
            direct: roots.to_vec(),
            deep,
        }
    }

    /// Layer `l` class `j` holds members of layer `l-1` at `j` and `j+1`.
    fn build_classes(&mut self, depth: usize, budget: usize) -> Result<(), SpecError> {
        let nb = self.bases.len();
        let per_class = budget / (depth * nb).max(1);
        for layer in 1..=depth {
            for j in 0..nb {
                let below = |k: usize| {
                    if layer == 1 {
                        Ty::Base(k % nb)
                    } else {
                        Ty::Composed((layer - 2) * nb + k % nb)
                    }
                };
                let mut fields = vec![("x0".to_string(), below(j))];
                if nb > 1 {
                    fields.push(("x1".to_string(), below(j + 1)));
                }
                let overhead = 2 + fields.len();
                self.classes.push(Class {
                    name: format!("L{layer}K{j}"),
                    fields,
                    methods: Vec::new(),
                });
                let idx = self.classes.len() - 1;
                let room = per_class.saturating_sub(overhead);
                let count = (room / 8).clamp(1, 4);
                let body = (room / count).saturating_sub(2).max(1);
                for k in 0..count {
                    self.add_method(idx, format!("op{k}"), body)?;
                }
            }
        }
        Ok(())
    }

    fn add_method(&mut self, class: usize, name: String, body: usize) -> Result<(), SpecError> {
        let roots: Vec<(Vec<String>, Ty)> = self.classes[class]
            .fields
            .iter()
            .map(|(f, t)| (vec!["this".to_string(), f.clone()], *t))
            .collect();
        let scope = self.scope(&roots);
        let mut state = State::new();
        for (leaf, b) in self.leaves(Ty::Composed(class)) {
            let key: Vec<String> = std::iter::once("this".to_string()).chain(leaf).collect();
            state.insert(key, BfaTriple::identity(self.bases[b].contract.width()));
        }
        let stmts = self.block(&scope, &mut state, body, 0)?;
        let effect = state
            .into_iter()
            .filter(|(_, t)| *t != BfaTriple::identity(t.width()))
            .map(|(k, t)| (k[1..].to_vec(), t))
            .collect();
        self.classes[class].methods.push(Method { name, effect, body: stmts });
        Ok(())
    }

    fn seeded(&self, b: usize) -> BfaTriple {
        let ctor = self.bases[b].contract.constructor();
        BfaTriple::new(ctor.enable.clone(), ctor.disable.clone(), MethodSet::empty(ctor.width()))
    }

    /// Returns the function's lines and, when a violation was injected,
    /// its line within them.
    fn function(
        &mut self,
        name: &str,
        budget: usize,
        locals_from: &[Ty],
        inject_at: Option<usize>,
    ) -> Result<(Vec<String>, Option<usize>), SpecError> {
        let nlocals = 1 + pick(&mut self.rng, budget.saturating_sub(3).clamp(1, 3));
        let mut roots = Vec::new();
        let mut state = State::new();
        let mut lines = vec![format!("void {name}() {{")];
        for i in 0..nlocals {
            let ty = locals_from[pick(&mut self.rng, locals_from.len())];
            let v = format!("v{i}");
            for (leaf, b) in self.leaves(ty) {
                let key: Vec<String> = std::iter::once(v.clone()).chain(leaf).collect();
                state.insert(key, self.seeded(b));
            }
            lines.push(format!("    {} {v};", self.type_name(ty)));
            roots.push((vec![v], ty));
        }
        let scope = self.scope(&roots);
        let body = budget.saturating_sub(2 + nlocals).max(1);
        let mut stmts = Vec::new();
        let mut used = 0;
        let mut bug = None;
        while used < body {
            if bug.is_none() && inject_at.is_some_and(|at| used >= at) {
                if let Some(g) = self.violation(&scope, &state) {
                    self.run_one(&g, &mut state);
                    bug = Some(lines.len() + 1 + used);
                    stmts.push(g);
                    used += 1;
                    continue;
                }
            }
            let chunk = (1 + pick(&mut self.rng, 6)).min(body - used);
            let part = self.block(&scope, &mut state, chunk, 0)?;
            used += block_lines(&part);
            stmts.extend(part);
        }
        lines.extend(self.emit_block(&stmts, 1));
        lines.push("}".to_string());
        Ok((lines, bug))
    }

    /// A call on a base object whose method is definitely disabled.
    fn violation(&mut self, scope: &Scope, state: &State) -> Option<Gen> {
        let mut options = Vec::new();
        for (recv, ty) in scope.direct.iter().chain(&scope.deep) {
            if let Ty::Base(b) = *ty {
                let t = &state[recv];
                for m in &self.bases[b].client_methods {
                    if t.disable.contains(*m) {
                        options.push(Gen::Base {
                            recv: recv.clone(),
                            base: b,
                            m: *m,
                        });
                    }
                }
            }
        }
        if options.is_empty() {
            return None;
        }
        let k = pick(&mut self.rng, options.len());
        Some(options.swap_remove(k))
    }

    fn type_name(&self, ty: Ty) -> &str {
        match ty {
            Ty::Base(b) => &self.bases[b].class_name,
            Ty::Composed(c) => &self.classes[c].name,
        }
    }

    fn emit_block(&self, block: &[Gen], indent: usize) -> Vec<String> {
        let pad = "    ".repeat(indent);
        let mut out = Vec::new();
        for g in block {
            match g {
                Gen::Base { recv, base, m } => {
                    out.push(format!("{pad}{}.{}();", recv.join("."), self.bases[*base].contract.alphabet.name(*m)))
                }
                Gen::Composed { recv, class, method } => {
                    out.push(format!("{pad}{}.{}();", recv.join("."), self.classes[*class].methods[*method].name))
                }
                Gen::If(t, e) => {
                    out.push(format!("{pad}if (?) {{"));
                    out.extend(self.emit_block(t, indent + 1));
                    if let Some(e) = e {
                        out.push(format!("{pad}}} else {{"));
                        out.extend(self.emit_block(e, indent + 1));
                    }
                    out.push(format!("{pad}}}"));
                }
                Gen::Loop(b) => {
                    out.push(format!("{pad}loop {{"));
                    out.extend(self.emit_block(b, indent + 1));
                    out.push(format!("{pad}}}"));
                }
            }
        }
        out
    }

    fn emit_class(&self, c: &Class) -> Vec<String> {
        let mut out = vec![format!("class {} {{", c.name)];
        for (f, ty) in &c.fields {
            out.push(format!("    {} {f};", self.type_name(*ty)));
        }
        for m in &c.methods {
            out.push(format!("    void {}() {{", m.name));
            out.extend(self.emit_block(&m.body, 2));
            out.push("    }".to_string());
        }
        out.push("}".to_string());
        out
    }
}

struct Scope {
    /// Fields of `this`, or a function's locals.
    direct: Vec<(Vec<String>, Ty)>,
    /// Base objects nested inside composed members.
    deep: Vec<(Vec<String>, Ty)>,
}

/// Lines used by a class with the given field count and one-line methods.
fn min_class_lines(fields: usize) -> usize {
    2 + fields + 3
}

/// A client over `contracts` (one base class each). Every line of the
/// result counts towards `loc_target`; the result is within a line or two
/// of it.
pub fn gen_client(spec: &ClientSpec, contracts: &[GeneratedContract]) -> Result<GeneratedClient, SpecError> {
    spec.validate()?;
    if contracts.is_empty() {
        return Err(SpecError::SpecInvalid("a client needs at least one base class".into()));
    }
    if contracts.iter().any(|c| c.client_methods.is_empty()) {
        return Err(SpecError::SpecInvalid("a contract offers no client methods".into()));
    }
    let nb = contracts.len();
    let fields = if nb > 1 { 2 } else { 1 };
    let target = spec.loc_target;
    let mut depth = spec.composition_depth;
    while depth > 0 && depth * nb * min_class_lines(fields) > target / 2 {
        depth -= 1;
    }
    let mut g = Generator {
        rng: ChaCha8Rng::seed_from_u64(spec.seed),
        spec,
        bases: contracts,
        classes: Vec::new(),
    };
    g.build_classes(depth, target * 2 / 5)?;

    let mut lines: Vec<String> = Vec::new();
    for c in &g.classes {
        lines.extend(g.emit_class(c));
    }
    let rest = target.saturating_sub(lines.len()).max(4);
    let nfun = (rest / 30).max(1);
    let locals_from: Vec<Ty> = if depth == 0 {
        (0..nb).map(Ty::Base).collect()
    } else {
        (0..nb).map(|j| Ty::Composed((depth - 1) * nb + j)).collect()
    };
    let mut bug_fn = spec.inject_bug.then(|| pick(&mut g.rng, nfun));
    let mut bug_line = None;
    for i in 0..nfun {
        let budget = if i + 1 == nfun { rest - (nfun - 1) * (rest / nfun) } else { rest / nfun };
        let inject_at = match bug_fn {
            Some(f) if f == i => Some(pick(&mut g.rng, budget.saturating_sub(4).max(1))),
            Some(f) if f < i => Some(0),
            _ => None,
        };
        let (body, bug) = g.function(&format!("run{i}"), budget, &locals_from, inject_at)?;
        if let Some(l) = bug {
            bug_line = Some(lines.len() + l);
            bug_fn = None;
        }
        lines.extend(body);
    }
    if bug_fn.is_some() {
        return Err(SpecError::SpecInvalid("no client method is ever disabled, so no bug can be injected".into()));
    }
    let mut text = lines.join("\n");
    text.push('\n');
    Ok(GeneratedClient {
        loc: lines.len(),
        text,
        bug_line,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contract_gen::gen_contract;
    use crate::spec::ContractSpec;
    use tsa_core::analysis::{analyze_program, dfa_analyze_program};
    use tsa_core::automata::DEFAULT_STATE_LIMIT;
    use tsa_core::frontend::parse_program;

    fn bases(n: usize, toggles: usize) -> Vec<GeneratedContract> {
        (0..n)
            .map(|i| {
                let spec = ContractSpec {
                    methods: 2 * toggles + 4,
                    toggle_pairs: toggles,
                    chain_length: 3,
                    seed: i as u64,
                };
                gen_contract(&spec, &format!("B{i}")).unwrap()
            })
            .collect()
    }

    fn client(loc: usize, depth: usize, seed: u64, inject_bug: bool) -> ClientSpec {
        ClientSpec {
            loc_target: loc,
            num_base_classes: 2,
            composition_depth: depth,
            branch_density: 0.2,
            loop_density: 0.1,
            seed,
            inject_bug,
        }
    }

    #[test]
    fn clean_and_sized() {
        let cs = bases(2, 2);
        for seed in 0..10 {
            for depth in 0..=3 {
                let spec = client(200, depth, seed, false);
                let c = gen_client(&spec, &cs).unwrap();
                let src = c.program_text(&cs);
                let p = parse_program(&src).unwrap_or_else(|e| panic!("{e}\n{src}"));
                assert!(c.loc.abs_diff(200) <= 20, "loc {}", c.loc);
                assert_eq!(c.loc, c.text.lines().count());
                assert_eq!(analyze_program(&p).unwrap(), vec![], "{src}");
                assert_eq!(dfa_analyze_program(&p, DEFAULT_STATE_LIMIT).unwrap(), vec![]);
            }
        }
    }

    #[test]
    fn injected_bug_is_reported_at_its_site() {
        let cs = bases(2, 1);
        for seed in 0..10 {
            let c = gen_client(&client(120, 2, seed, true), &cs).unwrap();
            let src = c.program_text(&cs);
            let p = parse_program(&src).unwrap();
            let line = c.bug_site(&cs).unwrap();
            let w = analyze_program(&p).unwrap();
            assert!(!w.is_empty());
            assert!(w.iter().any(|w| w.line == line), "{src}\n{w:?}");
        }
    }

    #[test]
    fn smallest_client() {
        let cs = bases(1, 1);
        let spec = ClientSpec {
            num_base_classes: 1,
            ..client(10, 2, 0, false)
        };
        let c = gen_client(&spec, &cs).unwrap();
        assert_eq!(c.loc, 10);
        assert!(c.text.starts_with("void run0() {"), "{}", c.text);
    }

    #[test]
    fn deterministic() {
        let cs = bases(2, 2);
        let a = gen_client(&client(300, 2, 5, true), &cs).unwrap();
        let b = gen_client(&client(300, 2, 5, true), &cs).unwrap();
        assert_eq!(a, b);
    }
}
