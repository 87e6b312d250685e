use hoc::diag::Diagnostic;
use hoc::sema::tast::ProcKind;
use hoc::sema::types::{IntKind, Type};
use hoc::sema::{analyze_unit, build_signatures, message_flow, step_bound, Analysis, Mode};
use hoc::syntax::parse_source;

fn analyze_mode(src: &str, mode: Mode) -> Analysis {
    let unit = parse_source(src, 0).unwrap_or_else(|e| panic!("parse failed: {e}\n{src}"));
    analyze_unit(&unit, &[], mode)
}

fn analyze(src: &str) -> Analysis {
    analyze_mode(src, Mode::Full)
}

fn codes(src: &str) -> Vec<&'static str> {
    analyze(src).diagnostics.iter().map(|d| d.code).collect()
}

fn errors(src: &str) -> Vec<Diagnostic> {
    analyze(src).diagnostics.into_iter().filter(Diagnostic::is_error).collect()
}

fn clean(src: &str) -> Analysis {
    let a = analyze(src);
    assert!(a.diagnostics.is_empty(), "unexpected diagnostics: {:#?}", a.diagnostics);
    a
}

fn module(body: &str) -> String {
    format!("MODULE m;\nVAR x, y: s32; p, q: port; b: boolean;\nBEGIN\n{body}\nEND m.\n")
}

#[test]
fn shadowing_local_warns() {
    assert_eq!(codes(&module("LOCAL x := 0;")), ["W-SHADOW"]);
    assert_eq!(codes(&module("LOCAL fresh := 0;")), Vec::<&str>::new());
}

#[test]
fn constant_boolean_warns_once_on_outer_expression() {
    let a = analyze(&module("IF TRUE OR b THEN x := 1 END"));
    let w: Vec<_> = a.diagnostics.iter().map(|d| (d.code, d.loc.line, d.loc.col)).collect();
    assert_eq!(w, [("W-CONST", 4, 9)]);
    assert_eq!(codes(&module("IF 1 < 2 THEN x := 1 END")), ["W-CONST"]);
    assert_eq!(codes(&module("IF b OR TRUE THEN x := 1 END")), Vec::<&str>::new());
}

#[test]
fn ports_cannot_be_assigned() {
    assert_eq!(codes(&module("p := q")), ["E-PORT-ASSIGN"]);
}

#[test]
fn contract_rules() {
    let var_param = "CONTRACT c(VAR v: s32) BEGIN RETURN v > 0 END;\nMODULE m; BEGIN ; END m.";
    assert_eq!(codes(var_param), ["E-CONTRACT-VAR"]);
    let not_bool = "CONTRACT c(v: s32) BEGIN RETURN v END;\nMODULE m; BEGIN ; END m.";
    assert_eq!(codes(not_bool), ["E-CONTRACT-RESULT"]);
    let not_contract = "PROCEDURE f(v: s32): boolean BEGIN RETURN v > 0 END;\nMODULE m; BEGIN REQUIRE f(1); END m.";
    assert_eq!(codes(not_contract), ["E-CHECK-TARGET"]);
    let good = "CONTRACT ensure_positive(x: s32)\nBEGIN\n    return x > 0\nEND;\nCONTRACT always BEGIN RETURN TRUE END;\n\
                MODULE m; VAR n: s32; BEGIN REQUIRE ensure_positive(n), always; INC(n) END m.";
    clean(good);
}

#[test]
fn recursion_is_rejected_with_its_cycle() {
    let direct = "PROCEDURE f(n: s32) BEGIN f(n) END;\nMODULE m; BEGIN f(1) END m.";
    let e = errors(direct);
    assert_eq!(e.len(), 1);
    assert_eq!(e[0].code, "E-RECURSION");
    assert!(e[0].message.contains("[f]"), "{}", e[0].message);

    let mutual = "PROCEDURE f(n: s32) BEGIN g(n) END;\nPROCEDURE g(n: s32) BEGIN f(n) END;\nMODULE m; BEGIN f(1) END m.";
    let e = errors(mutual);
    assert_eq!(e.len(), 1);
    assert!(e[0].message.contains("f -> g -> f"), "{}", e[0].message);

    let through_contract = "CONTRACT c(n: s32) BEGIN RETURN h(n) END;\n\
                            PROCEDURE h(n: s32): boolean BEGIN REQUIRE c(n); RETURN TRUE END;\nMODULE m; BEGIN ; END m.";
    assert_eq!(codes(through_contract), ["E-RECURSION"]);
}

#[test]
fn loop_count_must_be_constant() {
    assert_eq!(codes(&module("WHILE b REPEAT x TIMES INC(y) END")), ["E-LOOP-COUNT"]);
    clean(&module("WHILE b REPEAT 3 TIMES INC(y) END"));
}

#[test]
fn next_may_not_leave_a_loop() {
    let src = module("STATE s0, s1;\nSELECT x OF s0: REPEAT 3 TIMES NEXT s1 END | s1: NEXT s0 END");
    assert_eq!(codes(&src), ["E-NEXT-IN-LOOP"]);
    assert_eq!(codes(&module("NEXT 1")), ["E-NEXT-OUTSIDE"]);
}

#[test]
fn duplicate_labels() {
    assert_eq!(codes(&module("CASE x OF 1..5: y := 1 | 5: y := 2 END")), ["E-DUP-LABEL"]);
    assert_eq!(codes(&module("CASE x OF 5..1: y := 1 END")), ["E-BAD-RANGE"]);
}

#[test]
fn array_length_must_be_constant() {
    let src = "MODULE m; VAR n: s32; a: ARRAY n OF u8; BEGIN ; END m.";
    assert_eq!(codes(src), ["E-ARRAY-LEN"]);
    assert_eq!(codes("MODULE m; VAR a: ARRAY 0 OF u8; BEGIN ; END m."), ["E-ARRAY-LEN"]);
}

#[test]
fn import_selectors() {
    let plain_multi = "MODULE spw*; VAR port*: port; BEGIN ; END spw.\nMODULE m; BEGIN IMPORT spw; END m.";
    assert_eq!(codes(plain_multi), ["E-IMPORT-SELECTOR"]);
    let star_single = "MODULE spw*; VAR port*: port; BEGIN ; END spw.\nMODULE m; BEGIN IMPORT s := spw[*]; END m.";
    assert_eq!(codes(star_single), ["E-IMPORT-SELECTOR"]);
    let out_of_range = "MODULE spw*; VAR port*: port; BEGIN ; END spw.\nMODULE m; BEGIN IMPORT s := spw[2]; END m.";
    assert_eq!(codes(out_of_range), ["E-IMPORT-SELECTOR"]);
    let ok = "MODULE mod*; VAR port*: port; BEGIN ; END mod.\nMODULE user*; VAR msg: port; BEGIN\n\
              IMPORT mod0 := mod[0];\nIMPORT mod := mod[*];\nSEND(msg, mod.port); SEND(msg, mod0.port) END user.";
    clean(ok);
    let unknown = "MODULE m; BEGIN IMPORT nowhere; END m.";
    assert_eq!(codes(unknown), ["E-UNKNOWN-MODULE"]);
    let hidden = "MODULE a; VAR secret: u32; BEGIN ; END a.\nMODULE m; VAR v: u32; BEGIN IMPORT a; v := a.secret END m.";
    assert_eq!(codes(hidden), ["E-NOT-EXPORTED"]);
}

#[test]
fn import_must_lead_the_module_body() {
    let late = "MODULE a; VAR v*: u32; BEGIN ; END a.\nMODULE m; VAR w: u32; BEGIN w := 1; IMPORT a; END m.";
    assert_eq!(codes(late), ["E-IMPORT-POSITION"]);
    let nested = "MODULE a; VAR v*: u32; BEGIN ; END a.\nMODULE m; VAR w: u32; BEGIN IF w = 0 THEN IMPORT a END END m.";
    assert_eq!(codes(nested), ["E-IMPORT-POSITION"]);
}

#[test]
fn external_requires_pointer() {
    clean(&module("EXTERNAL uart_reg := 80000100h: VOLATILE POINTER TO u32;\nuart_reg^ := 65"));
    assert_eq!(codes(&module("EXTERNAL r := 80000100h: u32")), ["E-EXTERNAL-TYPE"]);
}

#[test]
fn constant_faults_are_compile_errors() {
    assert_eq!(codes(&module("x := 1 / 0")), ["E-CONST-DIV-ZERO"]);
    assert_eq!(codes(&module("x := 1 << 32")), ["E-RANGE"]);
    // Variable operands compile and are checked at run time.
    clean(&module("x := y MOD 0"));
}

#[test]
fn port_restrictions() {
    assert_eq!(codes("MODULE m; VAR r: RECORD p: port END; BEGIN ; END m."), ["E-PORT-NESTED"]);
    assert_eq!(codes("MODULE m; VAR r: ARRAY 2 OF port; BEGIN ; END m."), ["E-PORT-NESTED"]);
    assert_eq!(codes(&module("x := SIZE(port)")), ["E-PORT-SIZE"]);
    assert_eq!(codes("PROCEDURE f(p: port) BEGIN ; END;\nMODULE m; BEGIN ; END m."), ["E-PORT-VALUE"]);
    clean("PROCEDURE f(VAR p: port) BEGIN DISPOSE(p) END;\nMODULE m; VAR q: port; BEGIN f(q) END m.");
}

#[test]
fn locals_take_declared_type_when_value_fits() {
    clean(&module("LOCAL unsigned := 0: u32;\nLOCAL c := 'A': u8;\nx := unsigned + c"));
    assert_eq!(codes(&module("LOCAL c := 300: u8")), ["E-RANGE"]);
}

#[test]
fn mixed_numeric_arithmetic_is_allowed() {
    clean("MODULE m; VAR a: u8; b: s16; c: u32; d: s32; BEGIN d := a + b; c := c * a; d := b - c END m.");
}

#[test]
fn diagnostics_are_sorted() {
    let a = analyze(&module("p := q;\nLOCAL x := 1;\nIF TRUE OR b THEN ; END"));
    let locs: Vec<_> = a.diagnostics.iter().map(|d| d.loc).collect();
    let mut sorted = locs.clone();
    sorted.sort();
    assert_eq!(locs, sorted);
    assert_eq!(a.diagnostics.len(), 3);
}

const SKELETON: &str = "MODULE name;
VAR exported*: u32, listener*: port;
       secret, unknown: u32;
BEGIN
    secret := exported
END name.
";

#[test]
fn skeleton_signature() {
    let a = clean(SKELETON);
    let sigs = build_signatures(&a.program);
    assert_eq!(sigs.len(), 1);
    assert_eq!(sigs[0].name, "name");
    assert!(!sigs[0].multi);
    assert_eq!(sigs[0].module_id, Some(0));
    assert_eq!(
        sigs[0].exports,
        [("exported".to_string(), Type::Int(IntKind::U32)), ("listener".to_string(), Type::Port)]
    );
    let m = &a.program.modules[0];
    let offsets: Vec<_> = m.vars.iter().map(|v| (v.name.as_str(), v.offset)).collect();
    assert_eq!(offsets, [("exported", 0), ("listener", 4), ("secret", 8), ("unknown", 12)]);
    assert_eq!(m.data_size, 16);
}

#[test]
fn signatures_identical_in_restricted_mode() {
    let src = "MODULE spw*; VAR tx*: port; n*: ARRAY 4 OF u16; BEGIN STATE idle, busy; END spw.\n\
               MODULE mon; VAR seen*: u32; BEGIN IMPORT s := spw[0]; INC(seen) END mon.\n\
               MODULE quiet; BEGIN ; END quiet.";
    let full = build_signatures(&analyze_mode(src, Mode::Full).program);
    let restricted = build_signatures(&analyze_mode(src, Mode::Restricted).program);
    assert_eq!(full, restricted);
    assert!(full[0].multi);
    assert_eq!(full[0].states, [("idle".to_string(), 0), ("busy".to_string(), 1)]);
    assert_eq!(full.iter().map(|s| s.module_id).collect::<Vec<_>>(), [Some(0), Some(2), Some(3)]);
    assert!(full[2].exports.is_empty());
}

#[test]
fn restricted_mode_skips_body_errors() {
    let src = "MODULE m; VAR v*: u32; p, q: port; BEGIN p := q END m.";
    assert!(analyze_mode(src, Mode::Restricted).diagnostics.is_empty());
    assert_eq!(codes(src), ["E-PORT-ASSIGN"]);
}

#[test]
fn message_flow_edges() {
    let src = "MODULE a; VAR msg: port; BEGIN IMPORT b; NEW(msg, 16); SEND(msg, b.inbox) END a.\n\
               MODULE b; VAR inbox*, own: port; BEGIN IF SEND(inbox, own) THEN DISPOSE(own) END END b.";
    let a = clean(src);
    let edges: Vec<_> = message_flow(&a.program)
        .into_iter()
        .map(|e| (e.from, e.to, e.port))
        .collect();
    assert_eq!(
        edges,
        [
            ("a".to_string(), "b".to_string(), "inbox".to_string()),
            ("b".to_string(), "b".to_string(), "own".to_string())
        ]
    );
    assert!(message_flow(&clean(SKELETON).program).is_empty());
}

#[test]
fn flow_resolves_instances() {
    let src = "MODULE spw*; VAR rx*, tx: port; BEGIN IMPORT peer := spw[*]; SEND(tx, peer.rx) END spw.\n\
               MODULE mon; VAR m: port; BEGIN IMPORT s1 := spw[1]; CLONE(m, s1.rx) END mon.";
    let a = clean(src);
    let edges: Vec<_> = message_flow(&a.program)
        .into_iter()
        .map(|e| format!("{}->{}:{}", e.from, e.to, e.port))
        .collect();
    assert_eq!(edges, ["mon->spw1:rx", "spw0->spw0:rx", "spw1->spw1:rx"]);
}

#[test]
fn step_bound_of_simple_bodies() {
    // 1 call entry + 1 statement.
    let a = clean(&module("x := 1"));
    assert_eq!(step_bound(&a.program, a.program.modules[0].body), 2);
    // Loop: 1 + 3 * (1 INC).
    let a = clean(&module("REPEAT 3 TIMES INC(x) END"));
    assert_eq!(step_bound(&a.program, a.program.modules[0].body), 5);
    // Procedure call: statement + callee entry + callee statement.
    let a = clean("PROCEDURE f(n: s32) BEGIN LOCAL k := n END;\nMODULE m; BEGIN f(1) END m.");
    let body = a.program.modules[0].body;
    assert_eq!(step_bound(&a.program, body), 4);
    assert!(a.program.procs.iter().any(|p| p.kind == ProcKind::Toplevel));
}
