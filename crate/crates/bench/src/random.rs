//! Arbitrary well-typed programs for differential testing. Unlike
//! [`crate::gen_client`] these make no attempt to be valid: they mix
//! random contracts, parameters, nested locals, branches and loops, and
//! usually contain violations.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RandomShape {
    /// Methods per base class, constructor excluded.
    pub max_methods: usize,
    /// Call statements in the whole program.
    pub max_calls: usize,
    /// Layers of composed classes above the base classes.
    pub max_depth: usize,
}

impl Default for RandomShape {
    fn default() -> Self {
        Self {
            max_methods: 8,
            max_calls: 60,
            max_depth: 3,
        }
    }
}

#[derive(Debug, Clone)]
struct Class {
    name: String,
    layer: usize,
    /// Base: methods. Composed: callable methods with parameter classes.
    methods: Vec<(String, Vec<usize>)>,
    fields: Vec<(String, usize)>,
}

struct Gen {
    rng: ChaCha8Rng,
    classes: Vec<Class>,
    calls_left: usize,
    next_local: usize,
}

/// A visible object: path text and class index.
type Var = (Vec<String>, usize);

fn below(rng: &mut ChaCha8Rng, n: usize) -> usize {
    rng.gen_range(0..n as u64) as usize
}

fn aliases(a: &[String], b: &[String]) -> bool {
    a.starts_with(b) || b.starts_with(a)
}

impl Gen {
    fn base_class(&mut self, idx: usize, max_methods: usize) -> String {
        let name = format!("B{idx}");
        let n = 1 + below(&mut self.rng, max_methods);
        let methods: Vec<String> = (0..n).map(|i| format!("m{i}")).collect();
        let mut out = format!("class {name} {{\n");
        if self.rng.gen_bool(0.35) {
            let on: Vec<&str> = methods.iter().filter(|_| self.rng.gen_bool(0.5)).map(String::as_str).collect();
            if on.is_empty() {
                out.push_str("    @DisableAll\n");
            } else {
                out.push_str(&format!("    @EnableOnly({})\n", on.join(", ")));
            }
            out.push_str(&format!("    void {name}();\n"));
        }
        for m in &methods {
            let mut enable = Vec::new();
            let mut disable = Vec::new();
            for other in &methods {
                match below(&mut self.rng, 3) {
                    1 => enable.push(other.as_str()),
                    2 => disable.push(other.as_str()),
                    _ => {}
                }
            }
            match below(&mut self.rng, 8) {
                0 => out.push_str("    @EnableAll\n"),
                1 => out.push_str("    @DisableAll\n"),
                2 if !enable.is_empty() => out.push_str(&format!("    @EnableOnly({})\n", enable.join(", "))),
                3 if !disable.is_empty() => out.push_str(&format!("    @DisableOnly({})\n", disable.join(", "))),
                _ => {
                    if !enable.is_empty() {
                        out.push_str(&format!("    @Enable({})\n", enable.join(", ")));
                    }
                    if !disable.is_empty() {
                        out.push_str(&format!("    @Disable({})\n", disable.join(", ")));
                    }
                }
            }
            out.push_str(&format!("    void {m}();\n"));
        }
        out.push_str("}\n");
        self.classes.push(Class {
            name,
            layer: 0,
            methods: methods.into_iter().map(|m| (m, Vec::new())).collect(),
            fields: Vec::new(),
        });
        out
    }

    /// `root` and every path below it.
    fn expand(&self, root: Vec<String>, class: usize, out: &mut Vec<Var>) {
        for (f, c) in &self.classes[class].fields {
            let mut p = root.clone();
            p.push(f.clone());
            self.expand(p, *c, out);
        }
        out.push((root, class));
    }

    fn call(&mut self, vars: &[Var]) -> Option<String> {
        let (recv, class) = vars.choose(&mut self.rng)?.clone();
        let (method, params) = self.classes[class].methods.choose(&mut self.rng)?.clone();
        let mut taken = vec![recv.clone()];
        let mut args = Vec::new();
        for p in params {
            let options: Vec<&Var> = vars
                .iter()
                .filter(|(path, c)| *c == p && taken.iter().all(|t| !aliases(t, path)))
                .collect();
            let (path, _) = (*options.choose(&mut self.rng)?).clone();
            args.push(path.join("."));
            taken.push(path);
        }
        Some(format!("{}.{method}({});", recv.join("."), args.join(", ")))
    }

    /// Statements of a block. `max_layer` bounds the classes of locals.
    fn block(&mut self, vars: &[Var], max_layer: usize, indent: usize, out: &mut Vec<String>) {
        let pad = "    ".repeat(indent);
        let mut vars = vars.to_vec();
        let len = below(&mut self.rng, 5);
        for _ in 0..len {
            if self.calls_left == 0 {
                break;
            }
            let roll = below(&mut self.rng, 100);
            if roll < 12 && indent < 4 {
                out.push(format!("{pad}if (?) {{"));
                self.block(&vars, max_layer, indent + 1, out);
                if self.rng.gen_bool(0.5) {
                    out.push(format!("{pad}}} else {{"));
                    self.block(&vars, max_layer, indent + 1, out);
                }
                out.push(format!("{pad}}}"));
            } else if roll < 22 && indent < 4 {
                out.push(format!("{pad}loop {{"));
                self.block(&vars, max_layer, indent + 1, out);
                out.push(format!("{pad}}}"));
            } else if roll < 32 || vars.is_empty() {
                let choices: Vec<usize> = (0..self.classes.len()).filter(|c| self.classes[*c].layer <= max_layer).collect();
                let c = *choices.choose(&mut self.rng).expect("base classes exist");
                let name = format!("z{}", self.next_local);
                self.next_local += 1;
                out.push(format!("{pad}{} {name};", self.classes[c].name));
                self.expand(vec![name], c, &mut vars);
            } else if let Some(call) = self.call(&vars) {
                self.calls_left -= 1;
                out.push(format!("{pad}{call}"));
            }
        }
    }

    fn composed_class(&mut self, layer: usize, idx: usize) -> Vec<String> {
        let name = format!("L{layer}K{idx}");
        let lower: Vec<usize> = (0..self.classes.len()).filter(|c| self.classes[*c].layer < layer).collect();
        let prev: Vec<usize> = lower.iter().copied().filter(|c| self.classes[*c].layer == layer - 1).collect();
        let mut fields = vec![("x0".to_string(), *prev.choose(&mut self.rng).expect("layer below"))];
        if self.rng.gen_bool(0.5) {
            fields.push(("x1".to_string(), *lower.choose(&mut self.rng).expect("lower layers")));
        }
        let nmethods = 1 + below(&mut self.rng, 3);
        let mut methods = Vec::new();
        for k in 0..nmethods {
            let nparams = if self.rng.gen_bool(0.3) { 1 + below(&mut self.rng, 2) } else { 0 };
            let params = (0..nparams).map(|_| *lower.choose(&mut self.rng).unwrap()).collect();
            methods.push((format!("p{k}"), params));
        }
        self.classes.push(Class {
            name: name.clone(),
            layer,
            methods: methods.clone(),
            fields: fields.clone(),
        });
        let mut lines = vec![format!("class {name} {{")];
        for (f, c) in &fields {
            lines.push(format!("    {} {f};", self.classes[*c].name));
        }
        let mut this_vars = Vec::new();
        for (f, c) in &fields {
            self.expand(vec!["this".to_string(), f.clone()], *c, &mut this_vars);
        }
        let mut bodies: Vec<(String, Vec<usize>)> = Vec::new();
        if self.rng.gen_bool(0.3) {
            bodies.push((name.clone(), Vec::new()));
        }
        bodies.extend(methods);
        for (m, params) in bodies {
            let mut vars = this_vars.clone();
            let mut decl = Vec::new();
            for (i, p) in params.iter().enumerate() {
                decl.push(format!("{} y{i}", self.classes[*p].name));
                self.expand(vec![format!("y{i}")], *p, &mut vars);
            }
            lines.push(format!("    void {m}({}) {{", decl.join(", ")));
            self.block(&vars, layer - 1, 2, &mut lines);
            lines.push("    }".to_string());
        }
        lines.push("}".to_string());
        lines
    }
}

/// A random program, deterministic in `seed`.
pub fn random_program(seed: u64, shape: &RandomShape) -> String {
    let mut g = Gen {
        rng: ChaCha8Rng::seed_from_u64(seed),
        classes: Vec::new(),
        calls_left: shape.max_calls,
        next_local: 0,
    };
    let mut text = String::new();
    let nbase = 1 + below(&mut g.rng, 3);
    for i in 0..nbase {
        text.push_str(&g.base_class(i, shape.max_methods.max(1)));
    }
    let depth = below(&mut g.rng, shape.max_depth + 1);
    for layer in 1..=depth {
        for j in 0..1 + below(&mut g.rng, 2) {
            let lines = g.composed_class(layer, j);
            for l in lines {
                text.push_str(&l);
                text.push('\n');
            }
        }
    }
    let nfun = 1 + below(&mut g.rng, 3);
    for i in 0..nfun {
        let mut lines = vec![format!("void f{i}() {{")];
        g.block(&[], depth, 1, &mut lines);
        lines.push("}".to_string());
        for l in lines {
            text.push_str(&l);
            text.push('\n');
        }
    }
    text
}

#[cfg(test)]
mod tests {
    use super::*;
    use tsa_core::frontend::parse_program;

    #[test]
    fn programs_resolve() {
        for seed in 0..300 {
            let src = random_program(seed, &RandomShape::default());
            let p = parse_program(&src).unwrap_or_else(|e| panic!("seed {seed}: {e}\n{src}"));
            let calls = src.lines().filter(|l| l.trim_end().ends_with(");") && !l.trim_start().starts_with("void")).count();
            assert!(calls <= 60);
            assert!(!p.classes.is_empty());
        }
    }

    #[test]
    fn deterministic() {
        let shape = RandomShape::default();
        assert_eq!(random_program(9, &shape), random_program(9, &shape));
    }
}
