use stepwise_core::syntax::{parse, parse_expression};
use stepwise_testkit::oracle::{eval_expr, grid, ints, run_function, Env, Value};

#[test]
fn arithmetic_and_ranges() {
    let env: Env = [("x".to_string(), Value::Int(4))].into_iter().collect();
    let eval = |s: &str| eval_expr(&parse_expression(s).unwrap(), &env).unwrap();
    assert_eq!(eval("x * 2 + 1"), Value::Int(9));
    assert_eq!(eval("x in 1..4"), Value::Bool(true));
    assert_eq!(eval("x in 5..9"), Value::Bool(false));
    assert_eq!(eval("!(x == 4) || x != 4"), Value::Bool(false));
    assert_eq!(eval("x % 3"), Value::Int(1));
}

#[test]
fn functions_trace_output_and_result() {
    let f = parse("fun f(n: Int): Int {\n    var s = 0\n    for (i in 1..n) {\n        s += i\n        println(s)\n    }\n    return s\n}\n")
        .unwrap()
        .functions
        .remove(0);
    let t = run_function(&f, &[Value::Int(3)]).unwrap();
    assert_eq!(t.output, vec!["1", "3", "6"]);
    assert_eq!(t.returned, Some(Value::Int(6)));
}

#[test]
fn grid_is_a_cartesian_product() {
    let g = grid(&[("a", ints(0..=2)), ("b", ints(0..=1))]);
    assert_eq!(g.len(), 6);
}
