use std::net::SocketAddr;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::{Arc, Mutex};

use clap::{Parser, Subcommand};
use negspan_review::{http, tasks_from_candidates, ReviewError, ReviewStore};

#[derive(Parser)]
#[command(name = "negspan-review", version, about = "Annotation review service")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Serve the HTTP API (and the UI bundle, if given).
    Serve {
        #[arg(long, env = "REVIEW_PORT", default_value_t = 8080)]
        port: u16,
        #[arg(long, env = "REVIEW_HOST", default_value = "127.0.0.1")]
        host: std::net::IpAddr,
        #[arg(long, env = "REVIEW_TASKS", default_value = "review/tasks.jsonl")]
        tasks: PathBuf,
        /// Append-only decision log, replayed on startup.
        #[arg(long, env = "REVIEW_LOG", default_value = "review/decisions.jsonl")]
        log: PathBuf,
        /// Comma-separated annotator ids.
        #[arg(long, env = "REVIEW_ANNOTATORS", value_delimiter = ',', required = true)]
        annotators: Vec<String>,
        #[arg(long, env = "REVIEW_STATIC")]
        static_dir: Option<PathBuf>,
    },
    /// Append recovery tasks built from `negspan recover` output.
    Import {
        #[arg(long)]
        candidates: PathBuf,
        #[arg(long, env = "REVIEW_TASKS", default_value = "review/tasks.jsonl")]
        tasks: PathBuf,
    },
}

fn import(candidates: PathBuf, tasks: PathBuf) -> Result<usize, ReviewError> {
    let io = |path: &PathBuf| {
        let path = path.clone();
        move |source| ReviewError::Io { path, source }
    };
    let source = std::fs::read_to_string(&candidates).map_err(io(&candidates))?;
    let existing = match std::fs::read_to_string(&tasks) {
        Ok(s) => s,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => String::new(),
        Err(e) => return Err(io(&tasks)(e)),
    };
    let existing: Vec<negspan_review::ReviewTask> = negspan_review::store::parse_jsonl(&existing, &tasks)?;
    let first = existing.iter().map(|t| t.task_id).max().map_or(1, |m| m + 1);
    let new_tasks = tasks_from_candidates(&source, first)?;
    let mut out = String::new();
    for t in &new_tasks {
        out.push_str(&serde_json::to_string(t).expect("tasks serialize"));
        out.push('\n');
    }
    use std::io::Write;
    let mut file = std::fs::OpenOptions::new()
        .create(true)
        .append(true)
        .open(&tasks)
        .map_err(io(&tasks))?;
    file.write_all(out.as_bytes()).map_err(io(&tasks))?;
    Ok(new_tasks.len())
}

#[tokio::main]
async fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match Cli::parse().command {
        Cmd::Import { candidates, tasks } => match import(candidates, tasks) {
            Ok(n) => {
                println!("imported {n} tasks");
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::FAILURE
            }
        },
        Cmd::Serve {
            port,
            host,
            tasks,
            log,
            annotators,
            static_dir,
        } => {
            let store = match ReviewStore::open(annotators, &tasks, &log) {
                Ok(s) => s,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::FAILURE;
                }
            };
            log::info!(
                "replayed {} decisions over {} tasks",
                store.decisions().len(),
                store.tasks().count()
            );
            let app = http::router(Arc::new(Mutex::new(store)), static_dir);
            let addr = SocketAddr::new(host, port);
            let listener = match tokio::net::TcpListener::bind(addr).await {
                Ok(l) => l,
                Err(e) => {
                    eprintln!("error: cannot bind {addr}: {e}");
                    return ExitCode::FAILURE;
                }
            };
            log::info!("listening on http://{addr}");
            let shutdown = async {
                let _ = tokio::signal::ctrl_c().await;
            };
            match axum::serve(listener, app).with_graceful_shutdown(shutdown).await {
                Ok(()) => ExitCode::SUCCESS,
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::FAILURE
                }
            }
        }
    }
}
