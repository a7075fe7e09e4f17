//! Rebuilds corpus/fixtures from the authored replies in corpus/responses.
//!
//! cargo run -p stepwise-testkit --example build_fixtures

use stepwise_core::pipeline::HintResult;
use stepwise_testkit::{fixtures_dir, load_corpus_snapshots, load_course, record_fixtures, responses_dir};

fn main() {
    let out = fixtures_dir();
    if out.exists() {
        std::fs::remove_dir_all(&out).expect("clear fixtures");
    }
    let outcomes = record_fixtures(&load_course(), &load_corpus_snapshots(), &responses_dir(), &out, 2)
        .expect("recording succeeds");
    for (id, o) in &outcomes {
        let status = match &o.result {
            HintResult::Bundle(b) => format!("hint ({:?})\n{}", o.heuristic(), b.code_hint.after),
            HintResult::NoHint(r) => format!("no hint: {r:?}"),
        };
        println!("{id}: {status}");
    }
}
