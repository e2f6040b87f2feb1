//! The `ecmtt` commands. Each one writes to the streams it is given and
//! returns the process exit code, so the binary is a thin wrapper.

use std::io::{self, BufRead, Write};
use std::path::{Path, PathBuf};

use ecmtt::corpus;
use ecmtt::eval::{evaluate_with, Outcome, DEFAULT_FUEL};
use ecmtt::surface::{parse_main, parse_with, type_to_string, Definitions};
use ecmtt::typeck::infer_closed;
use ecmtt::{pretty, SourceFile, StuckReason, Term, Type};

pub mod exit {
    pub const OK: i32 = 0;
    pub const TYPE_ERROR: i32 = 1;
    pub const PARSE_ERROR: i32 = 2;
    pub const FUEL_EXHAUSTED: i32 = 3;
    pub const IO_ERROR: i32 = 4;
    pub const RUNTIME_ERROR: i32 = 5;
    /// `ecmtt corpus` with at least one failing case.
    pub const CORPUS_FAILED: i32 = 1;
}

pub const MAX_STEPS_VAR: &str = "ECMTT_MAX_STEPS";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Check,
    Run,
    Trace,
    Repl,
    Corpus,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum OutputFormat {
    #[default]
    Pretty,
    Json,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CliConfig {
    pub command: Command,
    pub input_path: Option<PathBuf>,
    pub max_steps: u64,
    pub output_format: OutputFormat,
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("{0:?} needs an input file")]
    MissingInput(Command),
    #[error("{MAX_STEPS_VAR} must be a non-negative integer, got `{0}`")]
    BadMaxSteps(String),
}

impl CliConfig {
    pub fn new(command: Command, input_path: Option<PathBuf>) -> Result<Self, ConfigError> {
        if input_path.is_none() && matches!(command, Command::Check | Command::Run | Command::Trace) {
            return Err(ConfigError::MissingInput(command));
        }
        Ok(CliConfig { command, input_path, max_steps: DEFAULT_FUEL, output_format: OutputFormat::Pretty })
    }
}

/// The step budget: the flag if given, else the environment variable, else
/// the default.
pub fn max_steps(flag: Option<u64>, env: Option<&str>) -> Result<u64, ConfigError> {
    match (flag, env) {
        (Some(n), _) => Ok(n),
        (None, Some(text)) => text.trim().parse().map_err(|_| ConfigError::BadMaxSteps(text.to_string())),
        (None, None) => Ok(DEFAULT_FUEL),
    }
}

/// Runs the configured command.
pub fn execute(config: &CliConfig, input: &mut dyn BufRead, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let path = config.input_path.as_deref().unwrap_or(Path::new("-"));
    let result = match config.command {
        Command::Check => check(path, out, err),
        Command::Run => run(path, config.max_steps, config.output_format, out, err),
        Command::Trace => trace(path, config.max_steps, out, err),
        Command::Repl => repl(input, config.max_steps, out, err),
        Command::Corpus => run_corpus(out),
    };
    result.unwrap_or_else(|e| {
        let _ = writeln!(err, "error: {e}");
        exit::IO_ERROR
    })
}

/// A parsed, typechecked program.
struct Program {
    file: SourceFile,
    ty: Type,
}

fn load(path: &Path, err: &mut dyn Write) -> io::Result<Result<Program, i32>> {
    let text = match std::fs::read_to_string(path) {
        Ok(text) => text,
        Err(e) => {
            writeln!(err, "error: cannot read {}: {e}", path.display())?;
            return Ok(Err(exit::IO_ERROR));
        }
    };
    let file = match parse_with(&text, &Definitions::new()) {
        Ok(file) => file,
        Err(diagnostics) => {
            for d in diagnostics {
                writeln!(err, "{d}")?;
            }
            return Ok(Err(exit::PARSE_ERROR));
        }
    };
    match infer_closed(&file.main) {
        Ok(ty) => Ok(Ok(Program { file, ty })),
        Err(e) => {
            writeln!(err, "{}", e.render(&file))?;
            Ok(Err(exit::TYPE_ERROR))
        }
    }
}

pub fn check(path: &Path, out: &mut dyn Write, err: &mut dyn Write) -> io::Result<i32> {
    Ok(match load(path, err)? {
        Ok(program) => {
            writeln!(out, "{}", type_to_string(&program.ty))?;
            exit::OK
        }
        Err(code) => code,
    })
}

/// Reports a non-value outcome on `err` and returns its exit code.
fn report_failure(outcome: &Outcome, steps: u64, err: &mut dyn Write) -> io::Result<i32> {
    match outcome {
        Outcome::Value(_) => Ok(exit::OK),
        Outcome::FuelExhausted { .. } => {
            writeln!(err, "fuel exhausted after {steps} steps")?;
            Ok(exit::FUEL_EXHAUSTED)
        }
        Outcome::Stuck { reason: StuckReason::Internal(msg), term } => {
            writeln!(err, "internal error: {msg}\n  at {term}")?;
            Ok(exit::RUNTIME_ERROR)
        }
        Outcome::Stuck { reason, .. } => {
            writeln!(err, "runtime error: {reason}")?;
            Ok(exit::RUNTIME_ERROR)
        }
    }
}

pub fn run(path: &Path, fuel: u64, format: OutputFormat, out: &mut dyn Write, err: &mut dyn Write) -> io::Result<i32> {
    let program = match load(path, err)? {
        Ok(program) => program,
        Err(code) => return Ok(code),
    };
    let (outcome, steps) = evaluate_with(&program.file.main, fuel, |_, _, _| {});
    if let Outcome::Value(v) = &outcome {
        match format {
            OutputFormat::Pretty => writeln!(out, "{}", pretty(v))?,
            OutputFormat::Json => writeln!(out, "{}", json_value(v, &program.ty, steps))?,
        }
    }
    report_failure(&outcome, steps, err)
}

/// `{"value": ..., "type": ..., "steps": ...}`; `value` is parseable text.
pub fn json_value(value: &Term, ty: &Type, steps: u64) -> serde_json::Value {
    serde_json::json!({
        "value": pretty(value),
        "type": type_to_string(ty),
        "steps": steps,
    })
}

pub fn trace(path: &Path, fuel: u64, out: &mut dyn Write, err: &mut dyn Write) -> io::Result<i32> {
    let program = match load(path, err)? {
        Ok(program) => program,
        Err(code) => return Ok(code),
    };
    writeln!(out, "#0 {}", program.file.main)?;
    let mut failed = Ok(());
    let (outcome, steps) = evaluate_with(&program.file.main, fuel, |n, rule, term| {
        if failed.is_ok() {
            failed = writeln!(out, "#{n} [{rule}] ⟶ {term}");
        }
    });
    failed?;
    writeln!(out, "{outcome}")?;
    report_failure(&outcome, steps, err)
}

/// One line of REPL input, classified.
enum Line<'a> {
    Blank,
    Quit,
    TypeOf(&'a str),
    Define(&'a str),
    Term(&'a str),
}

fn classify(line: &str) -> Line<'_> {
    let line = line.trim();
    if line.is_empty() {
        Line::Blank
    } else if line == ":q" || line == ":quit" {
        Line::Quit
    } else if let Some(rest) = line.strip_prefix(":t ") {
        Line::TypeOf(rest.trim())
    } else if line.starts_with("def ") {
        Line::Define(line)
    } else {
        Line::Term(line)
    }
}

/// Reads one definition or term per line until `:q` or end of input.
/// Errors are printed and the session goes on.
pub fn repl(input: &mut dyn BufRead, fuel: u64, out: &mut dyn Write, err: &mut dyn Write) -> io::Result<i32> {
    let mut defs = Definitions::new();
    let mut line = String::new();
    loop {
        line.clear();
        if input.read_line(&mut line)? == 0 {
            break;
        }
        match classify(&line) {
            Line::Blank => {}
            Line::Quit => break,
            Line::Define(text) => {
                let text = if text.ends_with(";;") { text.to_string() } else { format!("{text};;") };
                match parse_with(&format!("{text}\n()"), &defs) {
                    Ok(file) => {
                        for (name, def) in file.definitions {
                            writeln!(out, "defined {name}")?;
                            defs.insert(name, def);
                        }
                    }
                    Err(diagnostics) => {
                        for d in diagnostics {
                            writeln!(err, "{d}")?;
                        }
                    }
                }
            }
            Line::TypeOf(text) => {
                if let Some((_, ty)) = repl_term(text, &defs, err)? {
                    writeln!(out, "{}", type_to_string(&ty))?;
                }
            }
            Line::Term(text) => {
                if let Some((term, _)) = repl_term(text, &defs, err)? {
                    let (outcome, steps) = evaluate_with(&term, fuel, |_, _, _| {});
                    if let Outcome::Value(v) = &outcome {
                        writeln!(out, "{}", pretty(v))?;
                    }
                    report_failure(&outcome, steps, err)?;
                }
            }
        }
        out.flush()?;
    }
    Ok(exit::OK)
}

fn repl_term(text: &str, defs: &Definitions, err: &mut dyn Write) -> io::Result<Option<(Term, Type)>> {
    let term = match parse_main(text, defs) {
        Ok(term) => term,
        Err(d) => {
            writeln!(err, "{d}")?;
            return Ok(None);
        }
    };
    match infer_closed(&term) {
        Ok(ty) => Ok(Some((term, ty))),
        Err(e) => {
            writeln!(err, "{e}")?;
            Ok(None)
        }
    }
}

/// Prints the corpus table; exit 0 iff every case passes.
pub fn run_corpus(out: &mut dyn Write) -> io::Result<i32> {
    let reports = corpus::run_all();
    let width = reports.iter().map(|r| r.name.len()).max().unwrap_or(4).max(4);
    writeln!(out, "{:<width$}  {:<4}  {:<40}  observed", "case", "", "expected")?;
    for r in &reports {
        let mark = if r.passed { "ok" } else { "FAIL" };
        writeln!(out, "{:<width$}  {mark:<4}  {:<40}  {}", r.name, r.expected, r.actual)?;
    }
    let failed = reports.iter().filter(|r| !r.passed).count();
    writeln!(out, "{} cases, {} passed, {failed} failed", reports.len(), reports.len() - failed)?;
    Ok(if failed == 0 { exit::OK } else { exit::CORPUS_FAILED })
}
