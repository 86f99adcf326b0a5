use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use tsa_core::automata::{expand_dfa, language_included, DEFAULT_STATE_LIMIT};
use tsa_core::frontend::parse_program;

const SAMPLES: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/../../samples");

struct Run {
    code: i32,
    out: String,
    err: String,
}

fn tsa<S: AsRef<std::ffi::OsStr>>(args: &[S]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_tsa")).args(args).output().unwrap();
    Run {
        code: out.status.code().unwrap(),
        out: String::from_utf8(out.stdout).unwrap(),
        err: String::from_utf8(out.stderr).unwrap(),
    }
}

fn sample(name: &str) -> String {
    format!("{SAMPLES}/{name}")
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

#[test]
fn check_reports_the_wrong_use() {
    let r = tsa(&["check", &sample("foo.tsl")]);
    assert_eq!(r.code, 1, "{}", r.err);
    assert_eq!(r.out.lines().count(), 1);
    assert!(r.out.starts_with("WARN "));
    assert!(r.out.contains(":32:5 call to Foo.setupLU2 on foo.lu: requires {analyzePattern}"));
}

#[test]
fn check_clean_program_prints_nothing() {
    let r = tsa(&["check", &sample("foo_ok.tsl")]);
    assert_eq!((r.code, r.out.as_str()), (0, ""));
}

#[test]
fn check_json_has_the_same_fields() {
    let r = tsa(&["check", "--format", "json", &sample("foo.tsl")]);
    assert_eq!(r.code, 1);
    let v: serde_json::Value = serde_json::from_str(r.out.trim()).unwrap();
    assert_eq!(v["line"], 32);
    assert_eq!(v["col"], 5);
    assert_eq!(v["callee"], "Foo.setupLU2");
    assert_eq!(v["path"], "foo.lu");
    assert_eq!(v["required"], serde_json::json!(["analyzePattern"]));
}

#[test]
fn check_splits_contracts_and_clients_across_files() {
    let dir = tempfile::tempdir().unwrap();
    let client = write(
        dir.path(),
        "client.tsl",
        "void f() {\n    SparseLU lu;\n    Matrix a;\n    lu.factorize(a);\n}\n",
    );
    let r = tsa(&["check", &sample("sparse_lu.tsl"), client.to_str().unwrap()]);
    assert_eq!(r.code, 1, "{}", r.err);
    assert!(r.out.contains("client.tsl:4:5 call to SparseLU.factorize"), "{}", r.out);
}

#[test]
fn usage_and_parse_errors_exit_2() {
    let missing = tsa(&["check", "/nonexistent/x.tsl"]);
    assert_eq!(missing.code, 2);
    assert!(missing.err.contains("x.tsl"));
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.tsl", "class {");
    let r = tsa(&["check", bad.to_str().unwrap()]);
    assert_eq!(r.code, 2);
    assert!(!r.err.is_empty());
    assert_eq!(tsa(&["frobnicate"]).code, 2);
    assert_eq!(tsa::<&str>(&[]).code, 2);
}

#[test]
fn expand_dfa_dump() {
    let r = tsa(&["expand-dfa", &sample("sparse_lu.tsl")]);
    assert_eq!(r.code, 0);
    let lines: Vec<&str> = r.out.lines().collect();
    assert_eq!(lines[0], "# alphabet: SparseLU,analyzePattern,compute,factorize,solve");
    assert_eq!(lines[1], "# states: 5");
    assert_eq!(lines.len(), 11);
    assert!(lines.contains(&"10000\tSparseLU\t01100"));
    let mut body = lines[2..].to_vec();
    body.sort();
    assert_eq!(body, lines[2..]);
}

#[test]
fn expand_dfa_one_method() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "one.tsl", "class One {\n    void go();\n}\n");
    let r = tsa(&["expand-dfa", f.to_str().unwrap()]);
    assert_eq!(r.code, 0);
    let body: Vec<&str> = r.out.lines().filter(|l| !l.starts_with('#')).collect();
    assert!((1..=2).contains(&body.len()), "{}", r.out);
    let m = tsa(&["expand-dfa", "--minimize", f.to_str().unwrap()]);
    assert_eq!(m.code, 0);
}

#[test]
fn expand_dfa_respects_the_state_limit() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("t.tsl");
    let g = tsa(&["gen", "contract", "methods=24", "toggle_pairs=12", "--out", out.to_str().unwrap()]);
    assert_eq!(g.code, 0, "{}", g.err);
    let r = tsa(&["expand-dfa", "--state-limit", "1000", out.to_str().unwrap()]);
    assert_eq!(r.code, 2);
    assert!(r.out.is_empty());
    assert!(!r.err.is_empty());
    let small = tsa(&["expand-dfa", "--state-limit", "10", &sample("sparse_lu.tsl")]);
    assert_eq!(small.code, 0);
}

#[test]
fn expand_dfa_wants_one_base_class() {
    let r = tsa(&["expand-dfa", &sample("foo.tsl")]);
    assert_eq!(r.code, 0, "Foo is composed, so SparseLU is the only base class");
    let dir = tempfile::tempdir().unwrap();
    let two = write(dir.path(), "two.tsl", "class A { void a(); }\nclass B { void b(); }\n");
    assert_eq!(tsa(&["expand-dfa", two.to_str().unwrap()]).code, 2);
}

const STRICT: &str = "class C {\n    @Disable(b)\n    void a();\n    void b();\n}\n";
const LOOSE: &str = "class C {\n    void a();\n    void b();\n}\n";

#[test]
fn subsume_verdicts() {
    let dir = tempfile::tempdir().unwrap();
    let strict = write(dir.path(), "strict.tsl", STRICT);
    let loose = write(dir.path(), "loose.tsl", LOOSE);
    let same = tsa(&["subsume", strict.to_str().unwrap(), strict.to_str().unwrap()]);
    assert_eq!((same.code, same.out.trim()), (0, "subsumes"));
    let refined = tsa(&["subsume", loose.to_str().unwrap(), strict.to_str().unwrap()]);
    assert_eq!((refined.code, refined.out.trim()), (0, "subsumes"));
    let reversed = tsa(&["subsume", strict.to_str().unwrap(), loose.to_str().unwrap()]);
    assert_eq!((reversed.code, reversed.out.trim()), (1, "does-not-subsume: a"));

    // The looser contract accepts every sequence the stricter one does.
    let dfa = |src: &str| {
        let p = parse_program(src).unwrap();
        expand_dfa(&p.contracts["C"], DEFAULT_STATE_LIMIT).unwrap()
    };
    assert!(language_included(&dfa(STRICT), &dfa(LOOSE)).unwrap());
    assert!(!language_included(&dfa(LOOSE), &dfa(STRICT)).unwrap());
}

#[test]
fn subsume_alphabet_mismatch_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let a = write(dir.path(), "a.tsl", LOOSE);
    let b = write(dir.path(), "b.tsl", "class C {\n    void a();\n}\n");
    let r = tsa(&["subsume", a.to_str().unwrap(), b.to_str().unwrap()]);
    assert_eq!(r.code, 2);
    assert!(r.out.is_empty());
}

#[test]
fn gen_contract_prints_a_class() {
    let r = tsa(&["gen", "contract", "methods=3", "chain_length=3", "name=CR1"]);
    assert_eq!(r.code, 0, "{}", r.err);
    assert!(r.out.starts_with("class CR1 {"));
    assert!(r.err.contains("annotation terms: 3, minimized states: 2"));
    assert_eq!(tsa(&["gen", "contract", "colour=red"]).code, 2);
    assert_eq!(tsa(&["gen", "contract", "methods=2", "toggle_pairs=2"]).code, 2);
}

#[test]
fn gen_client_round_trips_through_check() {
    let dir = tempfile::tempdir().unwrap();
    let clean = dir.path().join("clean.tsl");
    let args = ["methods=6", "toggle_pairs=1", "chain_length=3", "loc=120", "seed=4"];
    let g = tsa(&[&["gen", "client", "--out", clean.to_str().unwrap()][..], &args].concat());
    assert_eq!(g.code, 0, "{}", g.err);
    assert_eq!(tsa(&["check", clean.to_str().unwrap()]).code, 0);

    let buggy = dir.path().join("buggy.tsl");
    let g = tsa(&[&["gen", "client", "--inject-bug", "--out", buggy.to_str().unwrap()][..], &args].concat());
    let line: usize = g.err.lines().find_map(|l| l.strip_prefix("injected violation at line ")).unwrap().parse().unwrap();
    let r = tsa(&["check", "--format", "json", buggy.to_str().unwrap()]);
    assert_eq!(r.code, 1);
    let lines: Vec<u64> = r
        .out
        .lines()
        .map(|l| serde_json::from_str::<serde_json::Value>(l).unwrap()["line"].as_u64().unwrap())
        .collect();
    assert!(lines.contains(&(line as u64)), "{lines:?} vs {line}");
}

#[test]
fn bench_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let matrix = write(
        dir.path(),
        "m.txt",
        "# two cells\nid=cr1 methods=3 chain_length=3 loc=40 runs=2\nid=t3 methods=9 toggle_pairs=3 chain_length=3 loc=40 runs=1\n",
    );
    let csv = dir.path().join("out.csv");
    let r = tsa(&["bench", "--matrix", matrix.to_str().unwrap(), "--out", csv.to_str().unwrap()]);
    assert_eq!(r.code, 0, "{}", r.err);
    assert!(r.out.contains("cr1"));
    assert!(r.out.contains("geometric-mean speedup"));
    let text = fs::read_to_string(csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "contract_id,methods,states_min,annotations_bfa,annotations_dfa,loc,base_classes,analyzer,run,wall_ms,warnings,seed"
    );
    assert_eq!(lines.count(), 3 + 3 + 2 + 2);
}
