use std::time::Instant;

use stepwise_core::hint::build_code_hint;
use stepwise_core::syntax::parse;
use stepwise_testkit::golden::cases;

#[test]
fn heuristic_matrix_matches_expected_hints() {
    let start = Instant::now();
    let mut failures = Vec::new();
    for case in cases() {
        let student = parse(case.student).unwrap();
        let llm = parse(case.llm).unwrap();
        let model = parse(case.model).unwrap();
        let built = build_code_hint(case.student, &student, &llm, &model)
            .unwrap_or_else(|e| panic!("{}: {e}", case.name));
        if built.heuristic != case.heuristic
            || built.code_hint.after != case.expected
            || built.unit.construct != case.construct
        {
            failures.push(format!(
                "{}: {:?} on {:?}\n{}",
                case.name, built.heuristic, built.unit.construct, built.code_hint.after
            ));
        }
    }
    assert!(failures.is_empty(), "{}", failures.join("\n---\n"));
    assert!(start.elapsed().as_secs_f64() < 1.0);
}
