use proptest::prelude::*;
use std::collections::BTreeMap;

use tsa_core::contracts::{Annotation, AnnotationKind};
use tsa_core::frontend::ast::*;
use tsa_core::frontend::parser::parse_syntax;
use tsa_core::frontend::{build_cfg, parse_program, parse_sources, pretty_print, NodeKind};
use tsa_core::FrontendError;

const FOO: &str = include_str!("../../../samples/foo.tsl");

#[test]
fn foo_sample_parses() {
    let p = parse_program(FOO).unwrap();
    assert_eq!(p.classes.len(), 2);
    let foo = p.class("Foo").unwrap();
    assert_eq!(foo.methods.len(), 3);
    assert!(p.is_base("SparseLU"));
    assert!(!p.is_base("Foo"));
    let Stmt::Call(c) = &p.function("wrongUseFoo").unwrap().body[2] else {
        panic!("expected a call")
    };
    assert_eq!(c.class, "Foo");
    assert_eq!(c.span, Span::new(31, 5));
}

#[test]
fn setup_lu1_cfg_shape() {
    let p = parse_program(FOO).unwrap();
    let m = p.class("Foo").unwrap().method("setupLU1").unwrap();
    let cfg = build_cfg(m.body.as_ref().unwrap());
    let shape: Vec<String> = cfg
        .nodes
        .iter()
        .map(|n| match &n.kind {
            NodeKind::Call(c) => c.method.clone(),
            other => format!("{other:?}"),
        })
        .collect();
    assert_eq!(shape, ["Entry", "compute", "BranchSplit", "solve", "Merge", "Exit"]);
}

#[test]
fn empty_program() {
    let p = parse_program("").unwrap();
    assert!(p.classes.is_empty() && p.functions.is_empty());
}

fn err(src: &str) -> FrontendError {
    parse_program(src).unwrap_err()
}

#[test]
fn resolution_errors() {
    assert!(matches!(
        err("void f() { foo.bar(); }"),
        FrontendError::NameResolutionError { line: 1, col: 12, .. }
    ));
    assert!(matches!(
        err("class A { void m(); } void f() { A a; a.b.m(); }"),
        FrontendError::NameResolutionError { .. }
    ));
    assert!(matches!(
        err("void f() { A a; A a; }"),
        FrontendError::NameResolutionError { .. }
    ));
    assert!(matches!(
        err("void f() { if (?) { A a; } a.m(); }"),
        FrontendError::NameResolutionError { .. }
    ));
    assert!(matches!(
        err("void f() { this.m(); }"),
        FrontendError::NameResolutionError { .. }
    ));
    assert!(matches!(
        err("class A { void m(); } class A { void n(); }"),
        FrontendError::NameResolutionError { .. }
    ));
}

#[test]
fn type_errors() {
    // undeclared method
    assert!(matches!(
        err("class A { void m(); } void f() { A a; a.n(); }"),
        FrontendError::TypeError { .. }
    ));
    // opaque types have no methods
    assert!(matches!(
        err("void f() { Matrix m; m.n(); }"),
        FrontendError::TypeError { .. }
    ));
    // arity and argument types
    assert!(matches!(
        err("class A { void m(B x); } class B { void n(); } void f() { A a; a.m(); }"),
        FrontendError::TypeError { .. }
    ));
    assert!(matches!(
        err("class A { void m(B x); } class B { void n(); } void f() { A a; a.m(a); }"),
        FrontendError::TypeError { .. }
    ));
    // constructors are not callable
    assert!(matches!(
        err("class A { void A(); void m(); } void f() { A a; a.A(); }"),
        FrontendError::TypeError { .. }
    ));
    // mixed and annotated bodies
    assert!(matches!(
        err("class A { void m(); void n() { } }"),
        FrontendError::TypeError { .. }
    ));
    assert!(matches!(
        err("class A { @EnableAll void n() { } }"),
        FrontendError::TypeError { .. }
    ));
    // self-containment
    assert!(matches!(
        err("class A { B b; void m() { } } class B { A a; void n() { } }"),
        FrontendError::TypeError { .. }
    ));
    // aliasing arguments of a composed call
    assert!(matches!(
        err("class L { void s(); } class C { L l; void use(L x) { x.s(); } } void f() { C c; c.use(c.l); }"),
        FrontendError::TypeError { .. }
    ));
}

#[test]
fn contract_errors_surface() {
    assert!(matches!(
        err("class A { @Enable(zzz) void m(); }"),
        FrontendError::Contract(_)
    ));
}

#[test]
fn sources_keep_file_indices() {
    let p = parse_sources(&[
        ("a.tsl".into(), "class A { void m(); }".into()),
        ("b.tsl".into(), "\nvoid f() { A a; a.m(); }".into()),
    ])
    .unwrap();
    assert_eq!(p.files, ["a.tsl", "b.tsl"]);
    let Stmt::Call(c) = &p.functions[0].body[1] else { panic!() };
    assert_eq!((c.span.file, c.span.line), (1, 2));
}

#[test]
fn resolved_round_trip() {
    let p = parse_program(FOO).unwrap();
    let again = parse_program(&pretty_print(&p)).unwrap();
    assert_eq!(again.without_spans(), p.without_spans());
}

// Random syntax trees over a small vocabulary.

fn ident() -> impl Strategy<Value = String> {
    prop::sample::select(vec!["a", "b", "lu", "Foo", "x1", "_t", "SparseLU"]).prop_map(String::from)
}

fn path() -> impl Strategy<Value = AccessPath> {
    (
        prop_oneof![Just("this".to_string()), ident()],
        prop::collection::vec(ident(), 0..3),
    )
        .prop_map(|(root, fields)| AccessPath { root, fields })
}

fn stmt() -> impl Strategy<Value = Stmt> {
    let leaf = prop_oneof![
        (ident(), ident()).prop_map(|(ty, name)| Stmt::Decl {
            ty,
            name,
            span: Span::default()
        }),
        (path(), ident(), prop::collection::vec(path(), 0..3)).prop_map(|(receiver, method, args)| {
            Stmt::Call(CallStmt {
                receiver,
                method,
                args,
                span: Span::default(),
                class: String::new(),
            })
        }),
    ];
    leaf.prop_recursive(3, 24, 4, |inner| {
        prop_oneof![
            (
                prop::collection::vec(inner.clone(), 0..3),
                prop::option::of(prop::collection::vec(inner.clone(), 0..3))
            )
                .prop_map(|(then_block, else_block)| Stmt::If {
                    then_block,
                    else_block,
                    span: Span::default()
                }),
            prop::collection::vec(inner, 0..3).prop_map(|body| Stmt::Loop {
                body,
                span: Span::default()
            }),
        ]
    })
}

fn annotation() -> impl Strategy<Value = Annotation> {
    let kinds = vec![
        AnnotationKind::Enable,
        AnnotationKind::Disable,
        AnnotationKind::EnableOnly,
        AnnotationKind::DisableOnly,
        AnnotationKind::EnableAll,
        AnnotationKind::DisableAll,
    ];
    (prop::sample::select(kinds), prop::collection::vec(ident(), 1..3)).prop_map(|(kind, names)| {
        Annotation {
            kind,
            names: if kind.takes_names() { names } else { Vec::new() },
        }
    })
}

fn method() -> impl Strategy<Value = MethodDecl> {
    (
        prop::collection::vec(annotation(), 0..2),
        ident(),
        prop::collection::vec((ident(), ident()), 0..3),
        prop::option::of(prop::collection::vec(stmt(), 0..4)),
    )
        .prop_map(|(annotations, name, params, body)| MethodDecl {
            annotations,
            name,
            params: params
                .into_iter()
                .map(|(ty, name)| Param {
                    ty,
                    name,
                    span: Span::default(),
                })
                .collect(),
            body,
            span: Span::default(),
        })
}

fn program() -> impl Strategy<Value = Program> {
    let class = (
        ident(),
        prop::collection::vec((ident(), ident()), 0..3),
        prop::collection::vec(method(), 0..3),
    )
        .prop_map(|(name, fields, methods)| ClassDecl {
            name,
            fields: fields
                .into_iter()
                .map(|(ty, name)| FieldDecl {
                    ty,
                    name,
                    span: Span::default(),
                })
                .collect(),
            methods,
            span: Span::default(),
        });
    let function = (ident(), prop::collection::vec(stmt(), 0..5)).prop_map(|(name, body)| FunctionDecl {
        name,
        body,
        span: Span::default(),
    });
    (
        prop::collection::vec(class, 0..3),
        prop::collection::vec(function, 0..3),
    )
        .prop_map(|(classes, functions)| Program {
            files: vec!["<input>".into()],
            classes,
            functions,
            contracts: BTreeMap::new(),
        })
}

proptest! {
    #[test]
    fn print_then_parse_is_identity(p in program()) {
        let text = pretty_print(&p);
        let parsed = parse_syntax(&text).unwrap();
        prop_assert_eq!(parsed.without_spans(), p);
    }

    #[test]
    fn parser_never_panics(s in "[a-zA-Z_ {}();,.@?/\n]{0,80}") {
        let _ = parse_program(&s);
    }
}
