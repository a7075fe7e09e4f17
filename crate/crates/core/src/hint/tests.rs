use super::*;
use crate::diff::diff_modules;
use crate::syntax::{parse, print_expr, print_module, visit::count_comments, FunctionKey, SourceModule};

fn m(src: &str) -> SourceModule {
    parse(src).unwrap_or_else(|e| panic!("{e}\n{src}"))
}

fn key(s: &str) -> FunctionKey {
    let (name, arity) = s.split_once('/').unwrap();
    FunctionKey::new(name, arity.parse().unwrap())
}

fn build(student: &str, llm: &str, model: &str) -> Result<BuiltHint, HintError> {
    build_code_hint(student, &m(student), &m(llm), &m(model))
}

const MODEL: &str = r#"fun getHiddenSecret(): String = "ACEB"

fun isValid(guess: String, length: Int): Boolean {
    val ok = guess.length == length
    if (!ok) {
        println("wrong length")
    }
    return ok
}

fun main() {
    println("Welcome")
    val secret = getHiddenSecret()
    var guess = readln()
    while (!isValid(guess, 4)) {
        guess = readln()
    }
    println(secret)
}
"#;

#[test]
fn scope_examples() {
    let s = compute_scope(&m(""), &m("fun main() {}"));
    assert_eq!(s.functions_to_add.iter().cloned().collect::<Vec<_>>(), vec![key("main/0")]);
    assert!(s.functions_to_change.is_empty());

    let same = "fun main() {\n    println(1)\n}";
    assert!(compute_scope(&m(same), &m(same)).is_empty());

    let s = compute_scope(&m("fun main() {}"), &m("fun helper(x: Int) = x\nfun main() {\n    println(1)\n}"));
    assert_eq!(s.functions_to_add.iter().cloned().collect::<Vec<_>>(), vec![key("helper/1")]);
    assert_eq!(s.functions_to_change.iter().cloned().collect::<Vec<_>>(), vec![key("main/0")]);
}

#[test]
fn out_of_scope_edits_are_dropped() {
    let student = "fun getHiddenSecret(): String = \"ACEB\"\n\nfun main() {\n    println(\"Welcome\")\n}\n";
    let llm = "fun getHiddenSecret(): String {\n    return \"ABCD\"\n}\n\nfun main() {\n    println(\"Welcome\")\n    val secret = getHiddenSecret()\n}\n";
    let (s, l, model) = (m(student), m(llm), m(MODEL));
    let scope = compute_scope(&s, &model);
    assert!(!scope.contains(&key("getHiddenSecret/0")));
    let filtered = filter_to_scope(&diff_modules(&s, &l), &scope);
    assert_eq!(filtered.function_keys(), vec![key("main/0")]);

    let hint = build(student, llm, MODEL).unwrap();
    assert_eq!(hint.code_hint.target_function, key("main/0"));
    let after = m(&hint.code_hint.after);
    assert!(after.function(&key("getHiddenSecret/0")).unwrap().normalized() == s.function(&key("getHiddenSecret/0")).unwrap().normalized());
}

#[test]
fn only_first_in_scope_function_is_kept() {
    let student = "fun main() {\n}\n";
    let llm = "fun isValid(guess: String, length: Int): Boolean {\n    return guess.length == length\n}\n\nfun main() {\n    println(\"Welcome\")\n}\n";
    let s = m(student);
    let filtered = filter_to_scope(&diff_modules(&s, &m(llm)), &compute_scope(&s, &m(MODEL)));
    assert_eq!(filtered.function_keys(), vec![key("isValid/2")]);
    assert!(filter_to_scope(&diff_modules(&s, &m(llm)), &ScopeSet::default()).is_empty());
}

#[test]
fn new_function_gets_todo_body() {
    let student = "fun main() {\n}\n";
    let llm = "fun isValid(guess: String, length: Int): Boolean {\n    val ok = guess.length == length\n    if (!ok) {\n        println(\"wrong length\")\n    }\n    return ok\n}\n\nfun main() {\n}\n";
    let hint = build(student, llm, MODEL).unwrap();
    assert_eq!(hint.heuristic, Heuristic::AdditiveStatementIsolation);
    assert_eq!(hint.code_hint.provenance, Provenance::LlmGenerated);
    assert_eq!(
        hint.code_hint.after,
        "fun isValid(guess: String, length: Int): Boolean {\n    TODO(\"Implement this function\")\n}\n\nfun main() {\n}\n"
    );
}

#[test]
fn condition_and_body_change_keeps_condition() {
    let student = "fun f(x: Int) {\n    if (x > 0) {\n        println(x)\n    }\n}\n";
    let llm = "fun f(x: Int) {\n    if (x > 1) {\n        println(x + 1)\n        println(x)\n    }\n}\n";
    let model = "fun f(x: Int) {\n    if (x > 1) {\n        println(x + 1)\n        println(x)\n    }\n    println(0)\n}\n";
    let hint = build(student, llm, model).unwrap();
    assert_eq!(hint.heuristic, Heuristic::IntrinsicStructureModificationFocus);
    assert_eq!(hint.code_hint.after, "fun f(x: Int) {\n    if (x > 1) {\n        println(x)\n    }\n}\n");
}

#[test]
fn two_body_changes_keep_first() {
    let student = "fun f(x: Int) {\n    if (x > 0) {\n        var y = 0\n    }\n}\n";
    let llm = "fun f(x: Int) {\n    if (x > 0) {\n        println(x)\n        var y = 0\n        y = x\n    }\n}\n";
    let model = "fun f(x: Int) {\n    if (x > 0) {\n        println(x)\n        var y = 0\n        y = x\n    }\n    println(0)\n}\n";
    let hint = build(student, llm, model).unwrap();
    assert_eq!(hint.heuristic, Heuristic::InternalBodyChangeDetection);
    assert_eq!(hint.code_hint.after, "fun f(x: Int) {\n    if (x > 0) {\n        println(x)\n        var y = 0\n    }\n}\n");
}

#[test]
fn short_function_boundaries() {
    let bodies = ["    return a", "    val b = a\n    return b", "    val b = a\n    val c = b\n    return c"];
    for body in bodies {
        let model = m(&format!("fun g(a: Int): Int {{\n\n{body}\n}}\n"));
        let sub = short_function_substitute(&key("g/1"), &model).unwrap().expect("short");
        assert_eq!(sub.provenance, Provenance::ModelSolutionSubstituted);
    }
    let long = m("fun g(a: Int): Int {\n    val b = a\n    val c = b\n    val d = c\n    return d\n}\n");
    assert!(short_function_substitute(&key("g/1"), &long).unwrap().is_none());
    assert!(short_function_substitute(&key("h/0"), &long).is_err());
}

#[test]
fn short_model_body_replaces_llm_code() {
    let student = "fun main() {\n    println(\"Welcome\")\n}\n";
    let llm = "fun getHiddenSecret(): String {\n    // pick a secret\n    val s = \"ACEB\"\n    val t = s\n    return t\n}\n\nfun main() {\n    println(\"Welcome\")\n}\n";
    let hint = build(student, llm, MODEL).unwrap();
    assert_eq!(hint.code_hint.provenance, Provenance::ModelSolutionSubstituted);
    assert_eq!(hint.heuristic, Heuristic::ShortFunctionSubstitution);
    assert!(hint.code_hint.after.starts_with("fun getHiddenSecret(): String {\n    return \"ACEB\"\n}\n\nfun main()"));
}

#[test]
fn inspection_examples() {
    let e = crate::syntax::parse_expression("month >= 1 && month <= 12").unwrap();
    let mut e2 = e.clone();
    inspect_expr(&mut e2);
    assert_eq!(print_expr(&e2), "month in 1..12");

    let src = "fun f(c: Boolean): Boolean {\n    if (c) return true else return false\n}\n";
    let out = apply_inspections(&m(src));
    assert_eq!(print_module(&out), "fun f(c: Boolean): Boolean {\n    return c\n}\n");

    let idiomatic = m("fun f(x: Int): Boolean {\n    if (x in 1..3) {\n        println(x)\n    }\n    return x != 2 && !(x > 4)\n}\n");
    assert_eq!(apply_inspections(&idiomatic), idiomatic);

    let cases = [
        ("a == true", "a"),
        ("a == false", "!a"),
        ("!(a == b)", "a != b"),
        ("(x > 1) == false", "!(x > 1)"),
        ("12 >= month && 1 <= month", "month in 1..12"),
    ];
    for (from, to) in cases {
        let mut e = crate::syntax::parse_expression(from).unwrap();
        inspect_expr(&mut e);
        assert_eq!(print_expr(&e), to, "{from}");
    }
    let mut s = crate::syntax::parse_statement("if (a) {\n    f()\n} else {\n}").unwrap();
    inspect_stmt(&mut s);
    assert_eq!(crate::syntax::printer::print_stmt(&s, Default::default()), "if (a) {\n    f()\n}\n");
}

#[test]
fn llm_comments_never_reach_the_hint() {
    let student = "fun main() {\n    // greet the player\n    println(\"Welcome\")\n}\n";
    let llm = "fun main() {\n    // greet the player\n    println(\"Welcome\")\n    // Step 2: get the secret\n    val secret = getHiddenSecret() /* the secret */\n}\n";
    let hint = build(student, llm, MODEL).unwrap();
    assert_eq!(hint.code_hint.after, "fun main() {\n    // greet the player\n    println(\"Welcome\")\n    val secret = getHiddenSecret()\n}\n");
    assert_eq!(count_comments(&m(&hint.code_hint.after)), 1);
}

#[test]
fn nothing_new_is_not_actionable() {
    let student = "fun main() {\n    println(\"Welcome\")\n}\n";
    assert_eq!(build(student, student, MODEL).unwrap_err(), HintError::NoActionableChange);
}

#[test]
fn full_solution_is_cut_to_one_unit_and_idempotent() {
    let student = "fun main() {\n}\n";
    let hint = build(student, MODEL, MODEL).unwrap();
    assert_eq!(diff_modules(&m(student), &m(&hint.code_hint.after)).unit_count(), 1);
    let again = build_code_hint(&hint.code_hint.after, &m(&hint.code_hint.after), &m(&hint.code_hint.after), &m(MODEL));
    assert_eq!(again.unwrap_err(), HintError::NoActionableChange);
}

#[test]
fn inspection_is_applied_to_changed_region_only() {
    let student = "fun f(month: Int) {\n    val a = month == true\n}\n";
    let llm = "fun f(month: Int) {\n    val a = month == true\n    if (month >= 1 && month <= 12) {\n        println(month)\n    }\n}\n";
    let model = "fun f(month: Int) {\n    val a = month == true\n    if (month in 1..12) {\n        println(month)\n    }\n    println(0)\n}\n";
    let hint = build(student, llm, model).unwrap();
    assert_eq!(
        hint.code_hint.after,
        "fun f(month: Int) {\n    val a = month == true\n    if (month in 1..12) {\n        TODO(\"Implement this function\")\n    }\n}\n"
    );
    assert_eq!(hint.inspections.len(), 1);
    assert_eq!(hint.highlight, crate::model::LineSpan::line(3));
}

#[test]
fn reordered_proposal_keeps_student_layout() {
    let student = "fun main() {\n    println(\"Welcome\")\n}\n\nfun getHiddenSecret(): String = \"ACEB\"\n";
    let llm = "fun getHiddenSecret(): String = \"ACEB\"\n\nfun main() {\n    println(\"Welcome\")\n    val secret = getHiddenSecret()\n    println(secret)\n}\n";
    let hint = build(student, llm, MODEL).unwrap();
    assert_eq!(hint.heuristic, Heuristic::InternalBodyChangeDetection);
    assert!(hint.code_hint.after.starts_with("fun main() {\n    println(\"Welcome\")\n    val secret = getHiddenSecret()\n}\n"));
    assert!(hint.code_hint.after.ends_with("fun getHiddenSecret(): String = \"ACEB\"\n"));
}
