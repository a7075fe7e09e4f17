use std::collections::HashSet;

use stepwise_core::hint::{inspect_expr, inspect_function, InspectionRule};
use stepwise_core::syntax::{parse, parse_expression, print_expr, print_module, SourceModule};
use stepwise_testkit::exprs::{bool_expr, standard_grid, statement_function};
use stepwise_testkit::oracle::{eval_expr, run_function, Value};
use stepwise_testkit::triples::rng;

#[test]
fn month_range_example() {
    let src = "fun main() {\n    val month = readln().toInt()\n    if (month >= 1 && month <= 12) {\n        println(month)\n    }\n}\n";
    let mut m = parse(src).unwrap();
    let hits = inspect_function(&mut m.functions[0]);
    assert_eq!(hits.iter().map(|h| h.rule).collect::<Vec<_>>(), vec![InspectionRule::ComparisonToRange]);
    assert!(print_module(&m).contains("if (month in 1..12) {"));
}

#[test]
fn examples_per_rule() {
    for (before, after) in [
        ("x >= 1 && x <= 12", "x in 1..12"),
        ("done == true", "done"),
        ("done == false", "!done"),
        ("!(a == b)", "a != b"),
        ("12 >= x && 1 <= x", "x in 1..12"),
        ("x >= f() && x <= 3", "x >= f() && x <= 3"),
    ] {
        let mut e = parse_expression(before).unwrap();
        inspect_expr(&mut e);
        assert_eq!(print_expr(&e), after, "{before}");
    }
}

#[test]
fn expression_rewrites_keep_meaning_on_the_grid() {
    let envs = standard_grid();
    let mut r = rng(5);
    let mut fired = HashSet::new();
    for i in 0..400 {
        let original = bool_expr(&mut r, 3);
        let mut rewritten = original.clone();
        for h in inspect_expr(&mut rewritten) {
            fired.insert(h.rule);
        }
        assert!(inspect_expr(&mut rewritten.clone()).is_empty(), "case {i}: not a fixed point");
        let reparsed = parse_expression(&print_expr(&rewritten)).unwrap();
        for env in &envs {
            assert_eq!(eval_expr(&rewritten, env), eval_expr(&reparsed, env), "case {i}: printing changed meaning");
            assert_eq!(
                eval_expr(&original, env).unwrap(),
                eval_expr(&rewritten, env).unwrap(),
                "case {i}: {} vs {} at {env:?}",
                print_expr(&original),
                print_expr(&rewritten)
            );
        }
    }
    for rule in [
        InspectionRule::ComparisonToRange,
        InspectionRule::EqualsTrue,
        InspectionRule::EqualsFalse,
        InspectionRule::NegatedEquality,
    ] {
        assert!(fired.contains(&rule), "{rule:?} never fired");
    }
}

#[test]
fn statement_rewrites_keep_meaning_on_the_grid() {
    let envs = standard_grid();
    let mut r = rng(9);
    let mut fired = HashSet::new();
    for i in 0..150 {
        let cond = bool_expr(&mut r, 2);
        let original = statement_function(&mut r, &cond);
        let mut rewritten = original.clone();
        for h in inspect_function(&mut rewritten) {
            fired.insert(h.rule);
        }
        let printed = print_module(&SourceModule { functions: vec![rewritten.clone()], ..Default::default() });
        assert!(parse(&printed).is_ok(), "case {i}: {printed}");
        for env in &envs {
            let args: Vec<Value> = ["x", "y", "p", "q"].iter().map(|n| env[*n].clone()).collect();
            assert_eq!(
                run_function(&original, &args).unwrap(),
                run_function(&rewritten, &args).unwrap(),
                "case {i}: {printed}"
            );
        }
    }
    assert!(fired.contains(&InspectionRule::IfReturnBoolean));
    assert!(fired.contains(&InspectionRule::EmptyElse));
}
