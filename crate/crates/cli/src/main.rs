use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use robolex_cli::commands::{cmd_evaluate, cmd_gen, cmd_stats, cmd_train, cmd_translate};
use robolex_cli::teach::cmd_teach;
use robolex_cli::{CliError, RunConfig};

/// Learn and apply a phrase-based translator from free-form commands to a
/// robot command language.
#[derive(Parser)]
#[command(name = "robolex", version)]
struct Cli {
    /// Flat `key = value` configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Split and generation seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Training pairs: s, t or both.
    #[arg(long, global = true)]
    mode: Option<String>,
    /// Corpus file (overrides the config).
    #[arg(long, global = true)]
    corpus: Option<PathBuf>,
    /// Model directory (overrides the config).
    #[arg(long, global = true)]
    model_dir: Option<PathBuf>,
    /// Any other setting, as `key=value`; repeatable.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train a phrase table and language model.
    Train,
    /// Translate standard input line by line.
    Translate,
    /// Score the saved model on the held-out split.
    Evaluate,
    /// Compare (s, r) and (t, r) training per task.
    Stats,
    /// Print a synthetic corpus.
    Gen,
    /// Translate interactively and collect paraphrases.
    Teach,
}

fn config(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(mode) = &cli.mode {
        cfg.set("mode", mode)?;
    }
    if let Some(corpus) = &cli.corpus {
        cfg.corpus = Some(corpus.clone());
    }
    if let Some(dir) = &cli.model_dir {
        cfg.model_dir = dir.clone();
    }
    for kv in &cli.set {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("--set expects KEY=VALUE, found {kv:?}")))?;
        cfg.set(k.trim(), v.trim())?;
    }
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let cfg = config(cli)?;
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    match cli.command {
        Command::Train => {
            cmd_train(&cfg, &mut io::stderr())?;
        }
        Command::Translate => cmd_translate(&cfg, &mut io::stdin().lock(), &mut out)?,
        Command::Evaluate => cmd_evaluate(&cfg, &mut out)?,
        Command::Stats => cmd_stats(&cfg, &mut out)?,
        Command::Gen => cmd_gen(&cfg, &mut out)?,
        Command::Teach => cmd_teach(&cfg, &mut io::stdin().lock(), &mut out)?,
    }
    out.flush()?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("robolex: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
