use chrono::Utc;
use stepwise_core::eval::{aggregate, line_counts, report_csv, run_corpus, score_hint, write_report, LineCounts};
use stepwise_core::gateway::{Gateway, ProviderConfig};
use stepwise_core::hint::build_code_hint;
use stepwise_core::model::{HintBundle, LineSpan, StudentSnapshot, Subgoal, SubgoalKind, SubgoalPlan, TextHint};
use stepwise_core::syntax::parse;
use stepwise_testkit::{load_corpus_snapshots, load_course, replay_gateway};

fn bundle(student: &str, proposal: &str, text: &str) -> HintBundle {
    let s = parse(student).unwrap();
    let p = parse(proposal).unwrap();
    let built = build_code_hint(student, &s, &p, &p).unwrap();
    HintBundle {
        hint_id: "h".into(),
        session_id: "s".into(),
        text_hint: TextHint { text: text.into(), highlight: LineSpan::line(1) },
        code_hint: built.code_hint,
        subgoal_plan: SubgoalPlan {
            task_id: "t".into(),
            subgoals: vec![Subgoal { index: 1, text: "print".into(), kind: SubgoalKind::Code }],
            raw_response: String::new(),
        },
        created_at: Utc::now(),
    }
}

#[test]
fn line_counts_pair_replaced_lines() {
    assert_eq!(line_counts("a\nb\n", "a\nb\nc\n"), LineCounts { added: 1, changed: 0, deleted: 0 });
    assert_eq!(line_counts("a\nb\n", "a\nx\n"), LineCounts { added: 0, changed: 1, deleted: 0 });
    assert_eq!(line_counts("a\nb\nc\n", "a\nx\n"), LineCounts { added: 0, changed: 1, deleted: 1 });
    assert_eq!(line_counts("a\n\n  b\n", "a\nb\n"), LineCounts::default());
}

#[test]
fn one_added_line() {
    let student = "fun main() {\n    println(\"hi\")\n}\n";
    let proposal = "fun main() {\n    println(\"hi\")\n    println(\"bye\")\n}\n";
    let b = bundle(student, proposal, "Add a loop. Print each value.");
    let m = score_hint(&b, &StudentSnapshot::new("t", student));
    assert_eq!((m.code_added, m.code_changed, m.code_deleted), (1, 0, 0));
    assert_eq!(m.text_words, 6);
    assert_eq!(m.text_sentences, 2);
    assert_eq!(m.subgoal_amount, 1);
    assert_eq!(m.intersection_ratio, Some(0.0));
    assert!(m.parses && m.single_step && m.inspection_clean && m.diff_consistent && !m.no_code_leak);
    assert!(!m.violates_invariants());
}

#[test]
fn copied_lines_count_toward_the_intersection() {
    let student = "fun a() {\n    println(1)\n}\n\nfun b() {\n}\n";
    let proposal = "fun a() {\n    println(1)\n}\n\nfun b() {\n    println(1)\n}\n";
    let m = score_hint(&bundle(student, proposal, "Print one."), &StudentSnapshot::new("t", student));
    assert_eq!(m.intersection_ratio, Some(1.0));
}

#[test]
fn leaked_no_code_step_is_a_violation() {
    let student = "fun main() {\n}\n";
    let mut b = bundle(student, "fun main() {\n    println(2)\n}\n", "Print.");
    b.subgoal_plan.subgoals.push(Subgoal { index: 2, text: "run it".into(), kind: SubgoalKind::NoCode });
    assert!(score_hint(&b, &StudentSnapshot::new("t", student)).violates_invariants());
}

#[test]
fn empty_corpus_gives_an_empty_report() {
    let report = run_corpus(&load_course(), &[], &replay_gateway());
    assert!(report.rows.is_empty());
    assert_eq!(report.aggregate.scored, 0);
    assert!(report.aggregate.metrics.values().all(Option::is_none));
    assert!(aggregate(&[]).metrics.values().all(Option::is_none));
    assert_eq!(report_csv(&report).lines().count(), 1);
}

#[test]
fn corpus_report_is_clean_and_stable() {
    let tasks = load_course();
    let snaps = load_corpus_snapshots();
    let gw = replay_gateway();
    let a = run_corpus(&tasks, &snaps, &gw);
    let b = run_corpus(&tasks, &snaps, &gw);
    assert_eq!(report_csv(&a), report_csv(&b));
    assert_eq!(a.rows.len(), snaps.len());
    assert_eq!(a.aggregate.invariant_violations, 0);
    assert_eq!(a.aggregate.errors, 0);
    assert_eq!(a.aggregate.scored, 8);
    assert!(a.missing_fingerprints().is_empty());
    for row in &a.rows {
        if let Some(m) = &row.metrics {
            assert!(m.diff_consistent, "{}", row.snapshot_id);
            assert!(m.text_sentences <= 3, "{}", row.snapshot_id);
        }
    }
    let dir = tempfile::tempdir().unwrap();
    write_report(&a, dir.path()).unwrap();
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(json["rows"].as_array().unwrap().len(), snaps.len());
    assert_eq!(std::fs::read_to_string(dir.path().join("report.csv")).unwrap(), report_csv(&a));
}

#[test]
fn missing_fixtures_are_listed() {
    let dir = tempfile::tempdir().unwrap();
    let gw = Gateway::new(ProviderConfig::replay(dir.path())).unwrap();
    let report = run_corpus(&load_course(), &load_corpus_snapshots(), &gw);
    // the converged and the broken snapshot never prompt
    assert_eq!(report.missing_fingerprints().len(), 8);
    assert_eq!(report.aggregate.errors, 8);
}
