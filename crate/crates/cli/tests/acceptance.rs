//! Acceptance checks, one line per criterion. Exits nonzero if any fails.

use std::collections::HashSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::{Command, ExitCode};
use std::sync::Arc;
use std::time::Instant;

use axum::body::Body;
use axum::http::{Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use serde_json::{json, Value};
use stepwise_core::diff::{apply_units, diff_modules};
use stepwise_core::eval::{report_csv, run_corpus};
use stepwise_core::gateway::{Gateway, Mode, ProviderConfig};
use stepwise_core::hint::{
    build_code_hint, compute_scope, inspect_expr, inspect_function, payload_comments, Heuristic, HintError,
    InspectionRule,
};
use stepwise_core::model::{Provenance, SubgoalKind};
use stepwise_core::pipeline::{check_invariants, generate_hint, NoHintReason, StageEvent};
use stepwise_core::prompt::Stage;
use stepwise_core::syntax::{parse, print_expr, print_module, SourceModule};
use stepwise_service::{router, AppState};
use stepwise_testkit::exprs::{bool_expr, standard_grid, statement_function};
use stepwise_testkit::oracle::{eval_expr, run_function, Value as V};
use stepwise_testkit::triples::{generate_edit_pairs, generate_triples, rng};
use stepwise_testkit::{
    course_dir, fixtures_dir, golden, load_corpus_snapshots, load_course, replay_gateway, snapshots_dir,
    CountingTransport, ScriptedTransport,
};
use tower::ServiceExt;

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn m(src: &str) -> SourceModule {
    parse(src).unwrap_or_else(|e| panic!("{e}\n{src}"))
}

fn heuristic_matrix() -> Check {
    let start = Instant::now();
    let cases = golden::cases();
    let mut seen = HashSet::new();
    for c in &cases {
        let built = build_code_hint(c.student, &m(c.student), &m(c.llm), &m(c.model))
            .map_err(|e| format!("{}: {e}", c.name))?;
        ensure(built.heuristic == c.heuristic, || format!("{}: got {:?}", c.name, built.heuristic))?;
        ensure(built.unit.construct == c.construct, || format!("{}: got {:?}", c.name, built.unit.construct))?;
        ensure(built.code_hint.after == c.expected, || format!("{}: got\n{}", c.name, built.code_hint.after))?;
        seen.insert((format!("{:?}", c.heuristic), format!("{:?}", c.construct)));
    }
    ensure(seen.len() == 18, || format!("{} distinct cases", seen.len()))?;
    let elapsed = start.elapsed();
    ensure(elapsed.as_secs_f64() < 1.0, || format!("took {elapsed:?}"))?;
    Ok(format!("18 cases in {elapsed:?}"))
}

fn single_step() -> Check {
    let mut emitted = 0;
    for (i, t) in generate_triples(300, 21).iter().enumerate() {
        let student = m(&t.student);
        match build_code_hint(&t.student, &student, &m(&t.llm), &m(&t.model)) {
            Ok(built) => {
                emitted += 1;
                let after = parse(&built.code_hint.after).map_err(|e| format!("triple {i}: {e}"))?;
                let n = diff_modules(&student, &after).unit_count();
                ensure(n == 1, || format!("triple {i}: {n} units"))?;
            }
            Err(HintError::NoActionableChange) => {}
            Err(e) => return Err(format!("triple {i}: {e}")),
        }
    }
    ensure(emitted >= 200, || format!("only {emitted} hints"))?;
    Ok(format!("{emitted} hints, each one change unit"))
}

fn scope() -> Check {
    let mut checked = 0;
    for (i, t) in generate_triples(300, 22).iter().enumerate() {
        let student = m(&t.student);
        let model = m(&t.model);
        if let Ok(built) = build_code_hint(&t.student, &student, &m(&t.llm), &model) {
            let set = diff_modules(&student, &m(&built.code_hint.after));
            let scope = compute_scope(&student, &model);
            for f in set.function_keys() {
                ensure(scope.contains(&f), || format!("triple {i}: {f} out of scope"))?;
            }
            checked += 1;
        }
    }
    let task = load_course().into_iter().find(|t| t.id == "ng-secret").unwrap();
    let snap = load_corpus_snapshots().into_iter().find(|s| s.id == "ng-secret/s02_secret_edit").unwrap();
    let out = generate_hint(&task, &snap.snapshot, &replay_gateway(), "acceptance").map_err(|e| e.to_string())?;
    let b = out.bundle().ok_or("no hint for the secret snapshot")?;
    ensure(b.code_hint.after.contains("fun getHiddenSecret(): String = \"ACEB\""), || b.code_hint.after.clone())?;
    ensure(!b.code_hint.after.contains("ABCD"), || b.code_hint.after.clone())?;
    ensure(b.code_hint.target_function.to_string() == "main/0", || b.code_hint.target_function.to_string())?;
    Ok(format!("{checked} hints in scope; out-of-scope edit dropped"))
}

fn short_functions() -> Check {
    let student = "fun main() {\n    println(\"Hi\")\n}\n";
    let llm = "fun g(a: Int): Int {\n    var r = a\n    r = r * 2\n    r = r + 1\n    r = r - 1\n    return r\n}\n\nfun main() {\n    println(\"Hi\")\n}\n";
    let bodies = [
        "    return a + 1",
        "    val b = a + 1\n    return b",
        "    val b = a + 1\n    val c = b\n    return c",
        "    val b = a + 1\n    val c = b\n    val d = c\n    return d",
    ];
    for (i, body) in bodies.iter().enumerate() {
        let lines = i + 1;
        let model = format!("fun g(a: Int): Int {{\n{body}\n}}\n\nfun main() {{\n    println(\"Hi\")\n}}\n");
        let built = build_code_hint(student, &m(student), &m(llm), &m(&model)).map_err(|e| format!("{lines}: {e}"))?;
        let substituted = built.code_hint.provenance == Provenance::ModelSolutionSubstituted;
        ensure(substituted == (lines <= 3), || format!("{lines} lines: {:?}", built.code_hint.provenance))?;
        if substituted {
            ensure(built.code_hint.after.contains(body), || format!("{lines} lines:\n{}", built.code_hint.after))?;
        } else {
            ensure(built.heuristic == Heuristic::AdditiveStatementIsolation, || format!("{:?}", built.heuristic))?;
        }
    }
    Ok("1-3 line model bodies used verbatim, 4 lines not".into())
}

fn inspections() -> Check {
    let src = "fun main() {\n    val month = readln().toInt()\n    if (month >= 1 && month <= 12) {\n        println(month)\n    }\n}\n";
    let mut module = m(src);
    inspect_function(&mut module.functions[0]);
    ensure(print_module(&module).contains("if (month in 1..12) {"), || print_module(&module))?;

    let envs = standard_grid();
    let mut r = rng(31);
    let mut fired = HashSet::new();
    let mut points = 0usize;
    for i in 0..300 {
        let original = bool_expr(&mut r, 3);
        let mut rewritten = original.clone();
        fired.extend(inspect_expr(&mut rewritten).into_iter().map(|h| h.rule));
        for env in &envs {
            ensure(eval_expr(&original, env) == eval_expr(&rewritten, env), || {
                format!("expr {i}: {} vs {}", print_expr(&original), print_expr(&rewritten))
            })?;
        }
        points += envs.len();
    }
    for i in 0..100 {
        let cond = bool_expr(&mut r, 2);
        let original = statement_function(&mut r, &cond);
        let mut rewritten = original.clone();
        fired.extend(inspect_function(&mut rewritten).into_iter().map(|h| h.rule));
        for env in &envs {
            let args: Vec<V> = ["x", "y", "p", "q"].iter().map(|n| env[*n].clone()).collect();
            ensure(run_function(&original, &args) == run_function(&rewritten, &args), || format!("function {i}"))?;
        }
        points += envs.len();
    }
    for rule in InspectionRule::ALL {
        ensure(fired.contains(&rule), || format!("{rule:?} never fired"))?;
    }
    Ok(format!("range example; {points} grid points, all six rules exercised"))
}

fn subgoal_filtering() -> Check {
    let tasks = load_course();
    let gw = replay_gateway();
    let mut plans = 0;
    for s in load_corpus_snapshots() {
        let task = tasks.iter().find(|t| t.id == s.snapshot.task_id).unwrap();
        let out = generate_hint(task, &s.snapshot, &gw, "acceptance").map_err(|e| e.to_string())?;
        if let Some(b) = out.bundle() {
            ensure(b.subgoal_plan.subgoals.iter().all(|g| g.kind == SubgoalKind::Code), || s.id.clone())?;
            plans += 1;
        }
        if s.id == "ng-matches/m01_for" {
            let reasks = out.diagnostics.iter().filter(|e| matches!(e, StageEvent::Reask { .. })).count();
            ensure(reasks == 1, || format!("{reasks} re-asks"))?;
            ensure(out.diagnostics.contains(&StageEvent::SubgoalsFiltered { total: 6, kept: 4 }), || {
                "mixed plan not filtered to four code steps".into()
            })?;
        }
    }
    let script = Arc::new(ScriptedTransport::new().with(Stage::Subgoals, "Sure!\n- do the thing\n"));
    let config = ProviderConfig { mode: Mode::Live, endpoint: Some("scripted://".into()), ..ProviderConfig::default() };
    let live = Gateway::with_transport(config, script.clone()).map_err(|e| e.to_string())?;
    let task = tasks.iter().find(|t| t.id == "ng-secret").unwrap();
    let snap = stepwise_core::model::StudentSnapshot::new("ng-secret", task.starter.clone().unwrap_or_default());
    let out = generate_hint(task, &snap, &live, "acceptance").map_err(|e| e.to_string())?;
    ensure(matches!(out.no_hint(), Some(NoHintReason::ProviderFormat { stage: Stage::Subgoals, .. })), || {
        format!("{:?}", out.no_hint())
    })?;
    ensure(script.calls_for(Stage::Subgoals) == 2, || format!("{} subgoal calls", script.calls_for(Stage::Subgoals)))?;
    Ok(format!("{plans} plans code-only; one re-ask then ProviderFormat"))
}

fn comments() -> Check {
    let tasks = load_course();
    let gw = replay_gateway();
    let mut commented = 0;
    for id in ["ng-secret/s01_start", "ng-matches/m02_loop"] {
        let s = load_corpus_snapshots().into_iter().find(|s| s.id == id).unwrap();
        let task = tasks.iter().find(|t| t.id == s.snapshot.task_id).unwrap();
        let out = generate_hint(task, &s.snapshot, &gw, "acceptance").map_err(|e| e.to_string())?;
        let b = out.bundle().ok_or_else(|| format!("{id}: no hint"))?;
        let student = m(&s.snapshot.code);
        let set = diff_modules(&student, &m(&b.code_hint.after));
        let unit = set.units().next().ok_or("no unit")?;
        ensure(payload_comments(unit) == 0, || format!("{id}:\n{}", b.code_hint.after))?;
        ensure(!b.code_hint.after.contains("/*"), || format!("{id}:\n{}", b.code_hint.after))?;
        commented += 1;
    }
    let mut checked = 0;
    for (i, t) in generate_triples(300, 23).iter().enumerate() {
        if !t.llm.contains("//") && !t.llm.contains("/*") {
            continue;
        }
        let student = m(&t.student);
        if let Ok(built) = build_code_hint(&t.student, &student, &m(&t.llm), &m(&t.model)) {
            check_invariants(&student, &built).map_err(|e| format!("triple {i}: {e}"))?;
            let set = diff_modules(&student, &m(&built.code_hint.after));
            let unit = set.units().next().ok_or("no unit")?;
            ensure(payload_comments(unit) == 0, || format!("triple {i}"))?;
            checked += 1;
        }
    }
    ensure(checked >= 20, || format!("only {checked} commented proposals"))?;
    Ok(format!("{commented} corpus and {checked} generated commented proposals, no comment in any hint"))
}

fn cli_eval(out: &Path) -> Result<(), String> {
    let o = Command::new(env!("CARGO_BIN_EXE_stepwise"))
        .args(["eval", "--task-pack"])
        .arg(course_dir())
        .arg("--snapshots")
        .arg(snapshots_dir())
        .arg("--fixtures")
        .arg(fixtures_dir())
        .arg("--out")
        .arg(out)
        .output()
        .map_err(|e| e.to_string())?;
    ensure(o.status.success(), || format!("exit {:?}: {}", o.status.code(), String::from_utf8_lossy(&o.stderr)))
}

fn replay_determinism() -> Check {
    let start = Instant::now();
    let a = tempfile::tempdir().map_err(|e| e.to_string())?;
    let b = tempfile::tempdir().map_err(|e| e.to_string())?;
    cli_eval(a.path())?;
    cli_eval(b.path())?;
    let csv_a = std::fs::read(a.path().join("report.csv")).map_err(|e| e.to_string())?;
    let csv_b = std::fs::read(b.path().join("report.csv")).map_err(|e| e.to_string())?;
    ensure(csv_a == csv_b, || "report.csv differs between runs".into())?;
    let elapsed = start.elapsed();
    ensure(elapsed.as_secs() < 30, || format!("took {elapsed:?}"))?;

    let counter = Arc::new(CountingTransport::default());
    let gw = Gateway::with_transport(ProviderConfig::replay(fixtures_dir()), counter.clone()).map_err(|e| e.to_string())?;
    let report = run_corpus(&load_course(), &load_corpus_snapshots(), &gw);
    ensure(counter.calls() == 0, || format!("{} transport calls", counter.calls()))?;
    ensure(report.aggregate.invariant_violations == 0, || format!("{} violations", report.aggregate.invariant_violations))?;
    ensure(report_csv(&report).as_bytes() == csv_a.as_slice(), || "in-process report differs from CLI report".into())?;
    Ok(format!("{} rows, identical reports, 0 violations, 0 network calls, {elapsed:?}", report.rows.len()))
}

fn completeness() -> Check {
    let pairs = generate_edit_pairs(600, 41);
    for (i, (before, after)) in pairs.iter().enumerate() {
        let set = diff_modules(before, after);
        let rebuilt = apply_units(before, set.units()).map_err(|e| format!("pair {i}: {e:?}"))?;
        ensure(rebuilt.structurally_eq(after), || format!("pair {i}:\n{}", print_module(before)))?;
    }
    Ok(format!("{} pairs rebuilt exactly", pairs.len()))
}

async fn call(app: &Router, method: &str, uri: &str, body: Option<Value>) -> Result<(StatusCode, Value), String> {
    let mut req = Request::builder().method(method).uri(uri);
    if body.is_some() {
        req = req.header("content-type", "application/json");
    }
    let body = body.map(|v| Body::from(v.to_string())).unwrap_or_else(Body::empty);
    let res = app.clone().oneshot(req.body(body).map_err(|e| e.to_string())?).await.map_err(|e| e.to_string())?;
    let status = res.status();
    let bytes = res.into_body().collect().await.map_err(|e| e.to_string())?.to_bytes();
    let value = if bytes.is_empty() { Value::Null } else { serde_json::from_slice(&bytes).map_err(|e| e.to_string())? };
    Ok((status, value))
}

fn service_flow() -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let counter = Arc::new(CountingTransport::default());
    let gw = Gateway::with_transport(ProviderConfig::replay(fixtures_dir()), counter.clone()).map_err(|e| e.to_string())?;
    let state = AppState::new(load_course(), gw, dir.path()).map_err(|e| e.to_string())?;
    let app = router(Arc::new(state), None);
    let rt = tokio::runtime::Runtime::new().map_err(|e| e.to_string())?;
    let accepted = rt.block_on(async {
        let (st, created) = call(&app, "POST", "/sessions", Some(json!({"taskId": "ng-secret"}))).await?;
        ensure(st == StatusCode::CREATED, || format!("create: {st}"))?;
        let id = created["sessionId"].as_str().ok_or("no session id")?.to_string();
        let (st, hint) = call(&app, "POST", &format!("/sessions/{id}/hint"), Some(json!({}))).await?;
        ensure(st == StatusCode::OK, || format!("hint: {st} {hint}"))?;
        ensure(hint["text"].as_str().is_some_and(|t| !t.is_empty()), || hint.to_string())?;
        let hint_id = hint["hintId"].as_str().ok_or("no hint id")?.to_string();
        let (st, code) = call(&app, "GET", &format!("/sessions/{id}/hints/{hint_id}/code"), None).await?;
        ensure(st == StatusCode::OK, || format!("code: {st}"))?;
        let (st, acc) = call(&app, "POST", &format!("/sessions/{id}/hints/{hint_id}/accept"), None).await?;
        ensure(st == StatusCode::OK, || format!("accept: {st}"))?;
        ensure(acc["code"] == code["after"], || "accepted code differs from the hint".into())?;
        let (_, view) = call(&app, "GET", &format!("/sessions/{id}"), None).await?;
        ensure(view["code"] == code["after"], || "session code not updated".into())?;
        let before = m(code["before"].as_str().unwrap_or_default());
        let after = m(code["after"].as_str().unwrap_or_default());
        ensure(diff_modules(&before, &after).unit_count() == 1, || "accepted hint is not one step".into())?;
        Ok::<_, String>(view["events"].as_u64().unwrap_or(0))
    })?;
    ensure(counter.calls() == 0, || format!("{} transport calls", counter.calls()))?;
    Ok(format!("create, hint, code, accept in replay mode; {accepted} events logged"))
}

fn main() -> ExitCode {
    type Criterion = (u8, &'static str, fn() -> Check);
    let checks: [Criterion; 10] = [
        (1, "heuristic matrix", heuristic_matrix),
        (2, "single-step hints", single_step),
        (3, "scope restriction", scope),
        (4, "short-function substitution", short_functions),
        (5, "inspections preserve meaning", inspections),
        (6, "subgoal filtering and re-ask", subgoal_filtering),
        (7, "comments stripped", comments),
        (8, "replay determinism", replay_determinism),
        (9, "diff completeness", completeness),
        (10, "service flow", service_flow),
    ];
    std::panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (n, name, check) in checks {
        let result = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into());
            Err(format!("panic: {msg}"))
        });
        match result {
            Ok(detail) => println!("[PASS] {n:>2} {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("[FAIL] {n:>2} {name}: {why}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} of 10 criteria failed");
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
