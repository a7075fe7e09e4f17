//! `stepwise`: serve hints, evaluate a snapshot corpus, record fixtures.

use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use stepwise_core::eval::{load_snapshots, run_corpus, write_report, NamedSnapshot};
use stepwise_core::gateway::{Gateway, Mode, ProviderConfig, TOKEN_ENV};
use stepwise_core::model::TaskSpec;
use stepwise_core::pipeline::{generate_hint, HintResult};
use stepwise_core::taskpack::{load_task_pack, validate_task_pack};
use stepwise_service::{router, AppState, DEFAULT_PORT};

const USAGE: u8 = 2;
const ENVIRONMENT: u8 = 3;

#[derive(Parser)]
#[command(name = "stepwise", version, about = "Next-step hints for programming exercises")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the HTTP service.
    Serve(ServeArgs),
    /// Generate hints for a snapshot corpus and write report.json and report.csv.
    Eval(EvalArgs),
    /// Call a live provider and store its replies as fixtures.
    Record(RecordArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ProviderMode {
    Replay,
    Record,
    Live,
}

impl From<ProviderMode> for Mode {
    fn from(m: ProviderMode) -> Self {
        match m {
            ProviderMode::Replay => Mode::Replay,
            ProviderMode::Record => Mode::Record,
            ProviderMode::Live => Mode::Live,
        }
    }
}

#[derive(Args)]
struct ProviderArgs {
    /// Chat-completion endpoint URL (record and live mode).
    #[arg(long, env = "STEPWISE_LLM_ENDPOINT")]
    endpoint: Option<String>,
    #[arg(long, default_value = "gpt-4")]
    model: String,
    /// Request timeout in seconds.
    #[arg(long, default_value_t = 60)]
    timeout: u64,
    #[arg(long, default_value_t = 2)]
    max_retries: u32,
}

#[derive(Args)]
struct ServeArgs {
    #[arg(long, default_value_t = DEFAULT_PORT)]
    port: u16,
    #[arg(long, default_value = "127.0.0.1")]
    host: String,
    #[arg(long, default_value = "stepwise-data")]
    data_dir: PathBuf,
    #[arg(long)]
    task_pack: PathBuf,
    #[arg(long, value_enum, default_value = "replay")]
    provider_mode: ProviderMode,
    #[arg(long)]
    fixtures: Option<PathBuf>,
    /// Allowed CORS origin; any origin when omitted.
    #[arg(long)]
    cors_origin: Option<String>,
    #[command(flatten)]
    provider: ProviderArgs,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    task_pack: PathBuf,
    #[arg(long)]
    snapshots: PathBuf,
    #[arg(long)]
    fixtures: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct RecordArgs {
    #[arg(long)]
    task_pack: PathBuf,
    #[arg(long)]
    snapshots: PathBuf,
    /// Fixture directory to write.
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    provider: ProviderArgs,
}

struct Failure(u8, String);

type Outcome = Result<ExitCode, Failure>;

fn usage(msg: impl Into<String>) -> Failure {
    Failure(USAGE, msg.into())
}

fn load_tasks(path: &Path) -> Result<Vec<TaskSpec>, Failure> {
    if !path.is_dir() {
        return Err(usage(format!("task pack not found: {}", path.display())));
    }
    let tasks = load_task_pack(path).map_err(|e| usage(format!("cannot load task pack: {e}")))?;
    let report = validate_task_pack(&tasks);
    if !report.accepted() {
        let issues: Vec<String> = report.errors.iter().map(|e| format!("{}: {:?}", e.task_id, e.issue)).collect();
        return Err(usage(format!("task pack is invalid:\n  {}", issues.join("\n  "))));
    }
    Ok(tasks)
}

fn load_snaps(path: &Path) -> Result<Vec<NamedSnapshot>, Failure> {
    if !path.is_dir() {
        return Err(usage(format!("snapshot directory not found: {}", path.display())));
    }
    load_snapshots(path).map_err(|e| Failure(ENVIRONMENT, format!("cannot read snapshots: {e}")))
}

fn provider_config(mode: Mode, fixtures: Option<PathBuf>, p: &ProviderArgs) -> ProviderConfig {
    ProviderConfig {
        mode,
        endpoint: p.endpoint.clone(),
        model: p.model.clone(),
        fixture_path: fixtures,
        timeout_secs: p.timeout,
        max_retries: p.max_retries,
        ..ProviderConfig::default()
    }
}

fn require_token() -> Result<(), Failure> {
    match std::env::var(TOKEN_ENV) {
        Ok(t) if !t.is_empty() => Ok(()),
        _ => Err(usage(format!("{TOKEN_ENV} is not set"))),
    }
}

fn serve(args: ServeArgs) -> Outcome {
    let tasks = load_tasks(&args.task_pack)?;
    let mode = Mode::from(args.provider_mode);
    if mode != Mode::Replay {
        require_token()?;
    }
    let config = provider_config(mode, args.fixtures.clone(), &args.provider);
    let gateway = Gateway::new(config).map_err(|e| usage(e.to_string()))?;
    let state = AppState::new(tasks, gateway, &args.data_dir)
        .map_err(|e| Failure(ENVIRONMENT, format!("cannot use data directory {}: {e}", args.data_dir.display())))?;
    let addr: SocketAddr =
        format!("{}:{}", args.host, args.port).parse().map_err(|e| usage(format!("bad address: {e}")))?;
    let rt = tokio::runtime::Runtime::new().map_err(|e| Failure(ENVIRONMENT, e.to_string()))?;
    rt.block_on(async move {
        let listener = tokio::net::TcpListener::bind(addr)
            .await
            .map_err(|e| Failure(ENVIRONMENT, format!("cannot listen on {addr}: {e}")))?;
        tracing::info!(%addr, "serving");
        eprintln!("serving on http://{addr}");
        stepwise_service::serve(listener, router(Arc::new(state), args.cors_origin.as_deref()))
            .await
            .map_err(|e| Failure(ENVIRONMENT, e.to_string()))?;
        Ok(ExitCode::SUCCESS)
    })
}

fn eval(args: EvalArgs) -> Outcome {
    let tasks = load_tasks(&args.task_pack)?;
    let snapshots = load_snaps(&args.snapshots)?;
    let gateway = Gateway::new(ProviderConfig::replay(&args.fixtures)).map_err(|e| usage(e.to_string()))?;
    let report = run_corpus(&tasks, &snapshots, &gateway);
    write_report(&report, &args.out)
        .map_err(|e| Failure(ENVIRONMENT, format!("cannot write report to {}: {e}", args.out.display())))?;
    let agg = &report.aggregate;
    println!(
        "{} snapshots, {} hints, {} invariant violations, {} errors; report in {}",
        report.rows.len(),
        agg.scored,
        agg.invariant_violations,
        agg.errors,
        args.out.display()
    );
    let missing = report.missing_fingerprints();
    if !missing.is_empty() {
        return Err(Failure(ENVIRONMENT, format!("missing fixtures:\n  {}", missing.join("\n  "))));
    }
    if agg.invariant_violations > 0 {
        return Ok(ExitCode::from(1));
    }
    Ok(ExitCode::SUCCESS)
}

fn record(args: RecordArgs) -> Outcome {
    let tasks = load_tasks(&args.task_pack)?;
    let snapshots = load_snaps(&args.snapshots)?;
    require_token()?;
    if args.provider.endpoint.is_none() {
        return Err(usage("--endpoint is required"));
    }
    let config = provider_config(Mode::Record, Some(args.out.clone()), &args.provider);
    let gateway = Gateway::new(config).map_err(|e| usage(e.to_string()))?;
    let mut failed = 0;
    for named in &snapshots {
        let Some(task) = tasks.iter().find(|t| t.id == named.snapshot.task_id) else {
            eprintln!("{}: unknown task", named.id);
            failed += 1;
            continue;
        };
        match generate_hint(task, &named.snapshot, &gateway, "record") {
            Ok(o) => match o.result {
                HintResult::Bundle(_) => println!("{}: recorded", named.id),
                HintResult::NoHint(r) => println!("{}: recorded, no hint ({})", named.id, r.name()),
            },
            Err(e) => {
                eprintln!("{}: {e}", named.id);
                failed += 1;
            }
        }
    }
    println!("{} fixtures in {}", gateway.fixture_count(), args.out.display());
    if failed > 0 {
        return Err(Failure(ENVIRONMENT, format!("{failed} snapshots failed")));
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    tracing_subscriber::fmt()
        .with_env_filter(tracing_subscriber::EnvFilter::try_from_default_env().unwrap_or_else(|_| "warn".into()))
        .with_writer(std::io::stderr)
        .init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Serve(a) => serve(a),
        Command::Eval(a) => eval(a),
        Command::Record(a) => record(a),
    };
    match result {
        Ok(code) => code,
        Err(Failure(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
