use super::*;

fn roundtrip(src: &str) -> SourceModule {
    let m = parse(src).unwrap_or_else(|e| panic!("parse failed: {e}\n{src}"));
    let printed = print_module(&m);
    let again = parse(&printed).unwrap_or_else(|e| panic!("reparse failed: {e}\n{printed}"));
    assert!(m.structurally_eq(&again), "round trip changed structure:\n{src}\n---\n{printed}");
    assert_eq!(print_module(&again), printed, "printer not idempotent");
    m
}

#[test]
fn minimal_program() {
    let m = parse(r#"fun main() { println("Hello!") }"#).unwrap();
    assert_eq!(m.functions.len(), 1);
    let body = &m.functions[0].body.stmts;
    assert_eq!(body.len(), 1);
    assert!(matches!(&body[0].kind, StmtKind::Expr(Expr { kind: ExprKind::Call { name, .. }, .. }) if name == "println"));
}

#[test]
fn unclosed_parameter_list_is_a_syntax_error() {
    let err = parse("fun main( {").unwrap_err();
    assert_eq!(err.line, 1);
    assert_eq!(err.column, 11);
    assert!(err.message.contains("expected"), "{}", err.message);
}

#[test]
fn top_level_range() {
    let m = parse("val x = 1..12").unwrap();
    assert!(m.functions.is_empty());
    let StmtKind::VarDecl { init, .. } = &m.statements[0].kind else { panic!() };
    assert!(matches!(init.kind, ExprKind::Binary { op: BinaryOp::Range, .. }));
}

#[test]
fn empty_module_prints_empty() {
    assert_eq!(print_module(&SourceModule::default()), "");
    assert_eq!(print_module(&parse("").unwrap()), "");
}

#[test]
fn precedence_and_parens() {
    let m = roundtrip("val a = (1 + 2) * 3 - (4 - 5)\nval b = !(x == y) && (p || q)\nval c = x in 1..n + 1\n");
    let printed = print_module(&m);
    assert_eq!(
        printed,
        "val a = (1 + 2) * 3 - (4 - 5)\nval b = !(x == y) && (p || q)\nval c = x in 1..n + 1\n"
    );
}

#[test]
fn statement_forms_roundtrip() {
    let src = r#"
fun classify(month: Int): String {
    when (month) {
        12, 1, 2 -> return "winter"
        3, 4, 5 -> {
            val s = "spring"
            return s
        }
        else -> return "other"
    }
}

fun loops(n: Int) {
    var i = 0
    while (i < n) {
        i += 1
    }
    do {
        i -= 1
    } while (i > 0)
    for (k in 1..n) println(k)
    if (n > 3) println("big") else if (n > 1) println("mid") else {
        println("small")
    }
    val line = readln().trim().length
    return
}

fun sum(a: Int, b: Int): Int = a + b
"#;
    let m = roundtrip(src);
    assert_eq!(m.functions.len(), 3);
    let sum = &m.functions[2];
    assert!(matches!(sum.body.stmts[0].kind, StmtKind::Return(Some(_))));
}

#[test]
fn newline_terminates_binary_expression() {
    let m = parse("fun f() {\n    val a = 1\n    -2\n}").unwrap();
    assert_eq!(m.functions[0].body.stmts.len(), 2);
    let m = parse("fun f() {\n    val ok = a\n        && b\n}").unwrap();
    assert_eq!(m.functions[0].body.stmts.len(), 1);
    let m = parse("fun f() {\n    g(1,\n      2)\n}").unwrap();
    assert_eq!(m.functions[0].body.stmts.len(), 1);
}

#[test]
fn two_statements_on_a_line_need_semicolon() {
    assert!(parse("val a = 1 val b = 2").is_err());
    assert_eq!(parse("val a = 1; val b = 2").unwrap().statements.len(), 2);
}

#[test]
fn unsupported_features_are_rejected() {
    for src in ["val s = \"$x\"", "class A", "val x = y?.z", "i++", "val f = 1.5"] {
        assert!(parse(src).is_err(), "{src} should not parse");
    }
}

#[test]
fn signatures_in_order() {
    let m = parse("fun sum(a: Int, b: Int): Int = a + b\nfun main() {}\n").unwrap();
    assert_eq!(extract_signatures(&m), vec!["sum(a: Int, b: Int): Int", "main()"]);
    assert!(extract_signatures(&parse("val x = 1").unwrap()).is_empty());
}

#[test]
fn string_literals_distinct_in_order() {
    let m = parse("fun main() {\n    println(\"Hello!\")\n    println(\"a\\tb\" + \"Hello!\")\n}").unwrap();
    assert_eq!(extract_string_literals(&m), vec!["Hello!".to_string(), "a\tb".to_string()]);
    assert!(extract_string_literals(&parse("val x = 1").unwrap()).is_empty());
}

#[test]
fn comments_attach_and_print_in_place() {
    let src = "// header\nfun main() {\n    // step 2\n    val x = 1 // trailing\n    /* block\n       spans */\n    println(x)\n    // dangling\n}\n";
    let m = parse(src).unwrap();
    let f = &m.functions[0];
    assert_eq!(f.trivia.leading[0].text, "// header");
    assert_eq!(f.body.stmts[0].trivia.leading[0].text, "// step 2");
    assert_eq!(f.body.stmts[0].trivia.trailing[0].text, "// trailing");
    assert_eq!(f.body.stmts[1].trivia.leading[0].kind, CommentKind::Block);
    assert_eq!(f.body.dangling[0].text, "// dangling");
    assert_eq!(print_module(&m), src);
    assert_eq!(visit::count_comments(&m), 5);
}

#[test]
fn strip_comments_keeps_structure() {
    let src = "fun main() {\n    // step 2\n    val x = 1 /* note */\n    /* multi\n     line */\n    println(x)\n}\n";
    let m = parse(src).unwrap();
    let stripped = strip_comments(&m);
    assert_eq!(visit::count_comments(&stripped), 0);
    assert!(stripped.structurally_eq(&m));
    // spans are untouched, so statement order by span is preserved
    let spans: Vec<u32> = stripped.functions[0].body.stmts.iter().map(|s| s.span.start.line).collect();
    assert_eq!(spans, vec![3, 6]);
    assert_eq!(strip_comments(&stripped), stripped);
    let clean = parse("val a = 1\n").unwrap();
    assert_eq!(strip_comments(&clean), clean);
}

#[test]
fn hand_built_trivia_prints_in_relative_position() {
    let mut s1 = Stmt::new(StmtKind::Expr(Expr::call("first", vec![])));
    s1.trivia.leading.push(Comment { kind: CommentKind::Line, text: "// before first".into(), span: Span::default() });
    let mut s2 = Stmt::new(StmtKind::Expr(Expr::call("second", vec![])));
    s2.trivia.trailing.push(Comment { kind: CommentKind::Line, text: "// after second".into(), span: Span::default() });
    let m = SourceModule { functions: vec![], statements: vec![s1, s2], trailing_comments: vec![] };
    assert_eq!(print_module(&m), "// before first\nfirst()\nsecond() // after second\n");
}

#[test]
fn body_line_count_ignores_blank_and_comment_lines() {
    let m = parse("fun f(a: Int): Int {\n\n    // c\n    val b = a + 1\n\n    return b\n}\nfun g() {}\nfun h(x: Int) = x").unwrap();
    assert_eq!(m.functions[0].body_line_count(), 2);
    assert_eq!(m.functions[1].body_line_count(), 0);
    assert_eq!(m.functions[2].body_line_count(), 1);
}

#[test]
fn spans_slice_back_to_nodes() {
    let src = "fun f(x: Int) {\n    if (x > 0) {\n        println(\"pos\")\n    } else println(\"neg\")\n    val y = (x + 1) * 2\n}\n";
    let m = parse(src).unwrap();
    let f = &m.functions[0];
    assert_eq!(f.signature_span.slice(src), "(x: Int)");
    let s0 = &f.body.stmts[0];
    let StmtKind::If { header_span, .. } = &s0.kind else { panic!() };
    assert_eq!(header_span.slice(src), "(x > 0)");
    let slice = s0.span.slice(src);
    let re = parse_statement(slice).unwrap();
    assert!(matches!(re.kind, StmtKind::If { .. }));
    assert_eq!(f.body.stmts[1].span.slice(src), "val y = (x + 1) * 2");
}
