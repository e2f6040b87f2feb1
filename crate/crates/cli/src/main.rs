use std::io;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use ecmtt_cli::{execute, max_steps, CliConfig, Command, OutputFormat, MAX_STEPS_VAR};

/// Typechecker and interpreter for the contextual modal effect calculus.
#[derive(Parser)]
#[command(name = "ecmtt", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Print the type of a program.
    Check { file: PathBuf },
    /// Evaluate a program and print its value.
    Run {
        file: PathBuf,
        #[arg(long)]
        max_steps: Option<u64>,
        /// Print the value as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Print every reduction step of a program.
    Trace {
        file: PathBuf,
        #[arg(long)]
        max_steps: Option<u64>,
    },
    /// Read definitions and terms line by line.
    Repl,
    /// Check the built-in example corpus.
    Corpus,
}

fn main() {
    let cli = Cli::parse();
    let (command, file, flag, format) = match cli.command {
        Cmd::Check { file } => (Command::Check, Some(file), None, OutputFormat::Pretty),
        Cmd::Run { file, max_steps, json } => {
            (Command::Run, Some(file), max_steps, if json { OutputFormat::Json } else { OutputFormat::Pretty })
        }
        Cmd::Trace { file, max_steps } => (Command::Trace, Some(file), max_steps, OutputFormat::Pretty),
        Cmd::Repl => (Command::Repl, None, None, OutputFormat::Pretty),
        Cmd::Corpus => (Command::Corpus, None, None, OutputFormat::Pretty),
    };
    let env = std::env::var(MAX_STEPS_VAR).ok();
    let config = CliConfig::new(command, file).and_then(|config| {
        Ok(CliConfig { max_steps: max_steps(flag, env.as_deref())?, output_format: format, ..config })
    });
    let code = match config {
        Ok(config) => execute(&config, &mut io::stdin().lock(), &mut io::stdout().lock(), &mut io::stderr().lock()),
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    };
    std::process::exit(code);
}
