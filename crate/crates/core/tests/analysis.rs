use tsa_core::analysis::{analyze_program, dfa_analyze_program, BfaAnalysis};
use tsa_core::automata::DEFAULT_STATE_LIMIT;
use tsa_core::contracts::{BfaTriple, ContractMap};
use tsa_core::frontend::{parse_program, AccessPath, Cfg, NodeKind};
use tsa_core::AnalysisError;

const FOO: &str = include_str!("../../../samples/foo.tsl");
const FOO_OK: &str = include_str!("../../../samples/foo_ok.tsl");

/// A triple as three sorted name lists, without the constructor bit.
fn names(c: &ContractMap, t: &BfaTriple) -> [Vec<String>; 3] {
    let list = |s: &tsa_core::MethodSet| {
        let mut v: Vec<String> = s
            .iter()
            .filter(|m| !m.is_constructor())
            .map(|m| c.alphabet.name(m).to_string())
            .collect();
        v.sort();
        v
    };
    [list(&t.enable), list(&t.disable), list(&t.pre)]
}

fn expect(e: &[&str], d: &[&str], p: &[&str]) -> [Vec<String>; 3] {
    let sorted = |x: &[&str]| {
        let mut v: Vec<String> = x.iter().map(|s| s.to_string()).collect();
        v.sort();
        v
    };
    [sorted(e), sorted(d), sorted(p)]
}

fn call_node(cfg: &Cfg, method: &str) -> usize {
    cfg.nodes
        .iter()
        .position(|n| matches!(&n.kind, NodeKind::Call(c) if c.method == method))
        .unwrap()
}

#[test]
fn setup_lu1_states_and_summary() {
    let p = parse_program(FOO).unwrap();
    let lu = &p.contracts["SparseLU"];
    let a = BfaAnalysis::new(&p).unwrap();
    let key = ("Foo".to_string(), "setupLU1".to_string());
    let cfg = &a.info.methods[&key].cfg;
    let trace = a.method_trace("Foo", "setupLU1").unwrap();
    let this_lu = AccessPath::new("this", &["lu"]);
    let at = |v: usize| trace.states.outputs[v].as_ref().unwrap()[&this_lu].clone();

    let s2 = at(call_node(cfg, "compute"));
    assert_eq!(names(lu, &s2), expect(&["solve"], &["analyzePattern", "factorize", "compute"], &["compute"]));
    let s3 = at(call_node(cfg, "solve"));
    assert_eq!(
        names(lu, &s3),
        expect(&["solve", "analyzePattern", "factorize", "compute"], &[], &["compute"])
    );
    let s4 = trace.states.inputs[cfg.exit].as_ref().unwrap()[&this_lu].clone();
    assert_eq!(s4, s2);
    let sum1 = a.summary("Foo", "setupLU1").unwrap();
    assert_eq!(sum1.exit_state[&this_lu], s2);
    assert_eq!(sum1.exit_state.len(), 1);
}

#[test]
fn setup_lu2_summary() {
    let p = parse_program(FOO).unwrap();
    let lu = &p.contracts["SparseLU"];
    let a = BfaAnalysis::new(&p).unwrap();
    let sum2 = &a.summary("Foo", "setupLU2").unwrap().exit_state[&AccessPath::new("this", &["lu"])];
    assert_eq!(
        names(lu, sum2),
        expect(&["solve"], &["analyzePattern", "factorize", "compute"], &["analyzePattern"])
    );
}

#[test]
fn wrong_use_foo_client_states() {
    let p = parse_program(FOO).unwrap();
    let lu = &p.contracts["SparseLU"];
    let a = BfaAnalysis::new(&p).unwrap();
    let f = a.info.functions.iter().find(|f| f.name == "wrongUseFoo").unwrap();
    let trace = a.function_trace("wrongUseFoo").unwrap();
    let foo_lu = AccessPath::new("foo", &["lu"]);
    let decl = f
        .cfg
        .nodes
        .iter()
        .position(|n| matches!(&n.kind, NodeKind::Decl { name, .. } if name == "foo"))
        .unwrap();
    let d1 = &trace.states.outputs[decl].as_ref().unwrap()[&foo_lu];
    assert_eq!(names(lu, d1), expect(&["analyzePattern", "compute"], &["solve", "factorize"], &[]));
    let d2 = &trace.states.outputs[call_node(&f.cfg, "setupLU1")].as_ref().unwrap()[&foo_lu];
    assert_eq!(
        names(lu, d2),
        expect(&["solve"], &["analyzePattern", "factorize", "compute"], &[])
    );
    // Entry is the only node that sees no local yet.
    assert!(trace.states.inputs[f.cfg.entry].as_ref().unwrap().is_empty());
}

#[test]
fn wrong_use_foo_warns_once() {
    let p = parse_program(FOO).unwrap();
    let w = analyze_program(&p).unwrap();
    assert_eq!(w.len(), 1, "{w:?}");
    assert_eq!((w[0].line, w[0].col), (32, 5));
    assert_eq!(w[0].callee, "Foo.setupLU2");
    assert_eq!(w[0].path, "foo.lu");
    assert_eq!(w[0].required, ["analyzePattern"]);
    assert_eq!(dfa_analyze_program(&p, DEFAULT_STATE_LIMIT).unwrap(), w);
}

#[test]
fn correct_client_is_clean() {
    let p = parse_program(FOO_OK).unwrap();
    assert!(analyze_program(&p).unwrap().is_empty());
    assert!(dfa_analyze_program(&p, DEFAULT_STATE_LIMIT).unwrap().is_empty());
}

#[test]
fn empty_program_is_clean() {
    let p = parse_program("").unwrap();
    assert!(analyze_program(&p).unwrap().is_empty());
    assert!(dfa_analyze_program(&p, DEFAULT_STATE_LIMIT).unwrap().is_empty());
}

#[test]
fn empty_body_has_empty_summary() {
    let p = parse_program("class L { void s(); } class C { L l; void m() { } }").unwrap();
    let a = BfaAnalysis::new(&p).unwrap();
    assert!(a.summary("C", "m").unwrap().exit_state.is_empty());
}

#[test]
fn recursion_is_rejected() {
    let src = "class L { void s(); }
        class A { L l; B b; void m() { this.b.n(); } }
        class B { void n() { } }";
    assert!(analyze_program(&parse_program(src).unwrap()).is_ok());
    let src = "class L { void s(); }
        class A { L l; void m() { this.k(); } void k() { this.m(); } }";
    let err = analyze_program(&parse_program(src).unwrap()).unwrap_err();
    let AnalysisError::RecursionUnsupported { cycle } = err else { panic!("{err:?}") };
    assert_eq!(cycle.first(), cycle.last());
    assert!(cycle.contains(&"A.k".to_string()) && cycle.contains(&"A.m".to_string()));
    let self_loop = "class A { void m() { this.m(); } }";
    assert!(matches!(
        dfa_analyze_program(&parse_program(self_loop).unwrap(), DEFAULT_STATE_LIMIT),
        Err(AnalysisError::RecursionUnsupported { .. })
    ));
}

const LU: &str = include_str!("../../../samples/sparse_lu.tsl");

fn client(body: &str) -> String {
    format!("{LU}\nvoid f() {{ SparseLU lu; Matrix a; {body} }}")
}

fn lines(src: &str) -> Vec<(usize, String)> {
    let p = parse_program(src).unwrap();
    let w = analyze_program(&p).unwrap();
    assert_eq!(dfa_analyze_program(&p, DEFAULT_STATE_LIMIT).unwrap(), w);
    w.iter().map(|w| (w.col, w.callee.clone())).collect()
}

#[test]
fn loop_needs_a_second_iteration() {
    // factorize is fine on the first pass and disables itself
    let bad = client("lu.analyzePattern(a); loop { lu.factorize(a); }");
    assert_eq!(lines(&bad).len(), 1);
    let ok = client("lu.compute(a); loop { lu.solve(a); }");
    assert!(lines(&ok).is_empty());
}

#[test]
fn branch_violation_on_one_arm() {
    let src = client("if (?) { lu.compute(a); } else { lu.analyzePattern(a); } lu.solve(a);");
    let w = lines(&src);
    assert_eq!(w.len(), 1);
    assert_eq!(w[0].1, "SparseLU.solve");
}

#[test]
fn recovery_continues_after_a_warning() {
    // solve fails, then the forced state still enables everything
    let src = client("lu.solve(a); lu.compute(a); lu.factorize(a);");
    let w = lines(&src);
    assert_eq!(w.iter().map(|x| x.1.as_str()).collect::<Vec<_>>(), ["SparseLU.solve", "SparseLU.factorize"]);
}

#[test]
fn internal_violation_is_also_charged_to_callers() {
    let src = format!(
        "{LU}
class Bad {{ SparseLU lu; Matrix a; void go() {{ this.lu.compute(this.a); this.lu.factorize(this.a); }} }}
void f() {{ Bad b; b.go(); b.go(); }}"
    );
    let p = parse_program(&src).unwrap();
    let w = analyze_program(&p).unwrap();
    assert_eq!(dfa_analyze_program(&p, DEFAULT_STATE_LIMIT).unwrap(), w);
    assert_eq!(w.len(), 3, "{w:?}");
    assert_eq!(w.iter().filter(|x| x.callee == "SparseLU.factorize").count(), 1);
    // go() needs factorize enabled on entry, which neither call provides
    let calls: Vec<&Vec<String>> = w.iter().filter(|x| x.callee == "Bad.go").map(|x| &x.required).collect();
    assert_eq!(calls.len(), 2);
    assert!(calls.iter().all(|r| r.contains(&"factorize".to_string())));
}
