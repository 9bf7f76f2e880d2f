use std::io::{self, IsTerminal};
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use nlcmd::setup::EngineOptions;
use nlcmd::{render, repl, service::Service};

#[derive(Parser)]
#[command(name = "nlcmd", version, about = "Natural-language commands for a text editor and a 3D scene")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Debug, Default)]
struct EngineArgs {
    /// Dictionary file (defaults to the built-in English dictionary).
    #[arg(long, value_name = "F")]
    lexicon: Option<PathBuf>,
    /// Suit file to merge; may be repeated.
    #[arg(long = "suit", value_name = "F")]
    suits: Vec<PathBuf>,
    /// Target application adapter.
    #[arg(long, value_name = "ID")]
    adapter: Option<String>,
    /// Learner store file, created on first write.
    #[arg(long, value_name = "F")]
    store: Option<PathBuf>,
    /// Text file loaded into the editor (defaults to a sample document).
    #[arg(long, value_name = "F")]
    doc: Option<PathBuf>,
}

impl EngineArgs {
    fn options(&self) -> EngineOptions {
        EngineOptions {
            lexicon: self.lexicon.clone(),
            suits: self.suits.clone(),
            adapter: self.adapter.clone(),
            store: self.store.clone(),
            document: self.doc.clone(),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Interactive command loop.
    Repl {
        #[command(flatten)]
        engine: EngineArgs,
    },
    /// Run one command and print its result.
    Run {
        #[arg(value_name = "CMD")]
        text: String,
        /// Print the execution result as JSON.
        #[arg(long)]
        json: bool,
        #[command(flatten)]
        engine: EngineArgs,
    },
    /// Run one command and print its pipeline trace.
    Trace {
        #[arg(value_name = "CMD")]
        text: String,
        /// Print the trace as JSON.
        #[arg(long)]
        json: bool,
        #[command(flatten)]
        engine: EngineArgs,
    },
    /// Serve the HTTP API.
    Serve {
        #[arg(long, value_name = "N")]
        port: u16,
        /// Directory of static files served under `/`.
        #[arg(long = "static", value_name = "DIR")]
        static_dir: Option<PathBuf>,
        #[command(flatten)]
        engine: EngineArgs,
    },
}

fn main() -> Result<ExitCode> {
    match Cli::parse().command {
        Command::Repl { engine } => {
            let mut session = engine.options().session()?;
            let stdin = io::stdin();
            if stdin.is_terminal() {
                println!("{}", repl::HELP);
            }
            repl::run(&mut session, stdin.lock(), &mut io::stdout().lock(), false)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Run { text, json, engine } => {
            let mut session = engine.options().session()?;
            let trace = session.process_command(&text);
            session.flush()?;
            if json {
                println!("{}", serde_json::to_string_pretty(&render::execution_result(&trace))?);
            } else {
                println!("{}", render::compact(&trace));
            }
            Ok(if repl::succeeded(&trace) { ExitCode::SUCCESS } else { ExitCode::FAILURE })
        }
        Command::Trace { text, json, engine } => {
            let mut session = engine.options().session()?;
            let trace = session.process_command(&text);
            session.flush()?;
            if json {
                println!("{}", serde_json::to_string_pretty(&trace)?);
            } else {
                for stage in &trace.stages {
                    let mark = if stage.is_error() { "x" } else { "-" };
                    println!("{mark} {}", stage.stage);
                }
                println!("{}", render::compact(&trace));
            }
            Ok(if repl::succeeded(&trace) { ExitCode::SUCCESS } else { ExitCode::FAILURE })
        }
        Command::Serve { port, static_dir, engine } => {
            let options = engine.options();
            let (config, suits) = options.config()?;
            let adapter = options.adapter_id(&suits);
            let mut service = Service::new(Arc::new(config), &adapter, options.initial_document()?, suits);
            if let Some(store) = options.store {
                service = service.with_store(store);
            }
            let router = Arc::new(service).router(static_dir);
            let runtime = tokio::runtime::Runtime::new()?;
            runtime.block_on(async move {
                let listener = tokio::net::TcpListener::bind(("127.0.0.1", port))
                    .await
                    .with_context(|| format!("cannot listen on port {port}"))?;
                eprintln!("listening on http://{}", listener.local_addr()?);
                axum::serve(listener, router).await.context("server stopped")
            })?;
            Ok(ExitCode::SUCCESS)
        }
    }
}
