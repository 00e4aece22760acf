//! `superquant` command-line front end.
//!
//! Exit codes: 0 pass, 1 check failure, 2 config error, 3 oracle
//! disagreement.

mod commands;
mod config;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::Context;
use config::{ConfigError, RunConfig};
use report::Format;

const EXIT_CONFIG: u8 = 2;

#[derive(Parser)]
#[command(name = "superquant", version, about = "Geometric quantization toolkit for Abelian Lie supergroups")]
struct Cli {
    /// TOML run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Directory for report files; reports go to stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Size of the worker pool used by grid loops.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the super Kähler form and run the axiom, moment and Dolbeault checks.
    VerifyKahler,
    /// Classify every weight in the configured box.
    Classify,
    /// Check that each label occurs exactly once in the doubled space.
    ModelCheck,
    /// Print the Berezin integral (top coefficient) of a Grassmann element.
    BerezinEval {
        element: Option<String>,
        #[arg(short, long)]
        k: Option<usize>,
    },
    /// Run the invariant sweep across all modules.
    Selftest {
        /// Corrupt one entry of the blade sign table.
        #[arg(long, hide = true)]
        inject_sign_fault: bool,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::VerifyKahler => "verify-kahler",
            Command::Classify => "classify",
            Command::ModelCheck => "model-check",
            Command::BerezinEval { .. } => "berezin-eval",
            Command::Selftest { .. } => "selftest",
        }
    }

    fn needs_config(&self) -> bool {
        matches!(self, Command::VerifyKahler | Command::Classify | Command::ModelCheck)
    }
}

fn run(cli: Cli) -> anyhow::Result<i32> {
    let config = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None if cli.command.needs_config() => return Err(config::config_error("--config is required")),
        None => RunConfig::default(),
    };
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(config::config_error("--threads must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    let format = match (cli.format, &config.output.format) {
        (Some(f), _) => f,
        (None, Some(text)) => Format::parse(text)?,
        (None, None) => Format::Json,
    };
    let out = cli.out.clone().or_else(|| config.output.dir.clone());
    let seed = cli.seed.unwrap_or(config.seed);
    let mut effective = config.clone();
    effective.seed = seed;
    let ctx = Context {
        config: &config,
        hash: effective.hash(),
        effective,
        seed,
    };
    let name = cli.command.name();
    let outcome = match cli.command {
        Command::VerifyKahler => commands::verify_kahler(&ctx)?,
        Command::Classify => commands::classify(&ctx)?,
        Command::ModelCheck => commands::model_check(&ctx)?,
        Command::BerezinEval { element, k } => {
            let o = commands::berezin_eval(&ctx, element, k)?;
            match &out {
                Some(dir) => report::emit(name, &o, format, Some(dir))?,
                None => println!("{}", o.summary),
            }
            return Ok(o.code);
        }
        Command::Selftest { inject_sign_fault } => commands::selftest(&ctx, inject_sign_fault)?,
    };
    report::emit(name, &outcome, format, out.as_deref())?;
    eprintln!("{}", outcome.summary);
    Ok(outcome.code)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("superquant: {e:#}");
            if e.downcast_ref::<ConfigError>().is_some() {
                ExitCode::from(EXIT_CONFIG)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}
