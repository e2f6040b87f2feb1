use std::io::Write as _;
use std::path::Path;
use std::process::Command as Process;

use ecmtt::corpus::PRELUDE;
use ecmtt::surface::parse_main;
use ecmtt::AlphaEq;
use ecmtt_cli::{check, exit, json_value, max_steps, repl, run, run_corpus, trace, CliConfig, Command, OutputFormat};
use tempfile::NamedTempFile;

const INCR: &str = "let box u = incr in handle u with handlerSt init 0";
const LOOP: &str = "let fix f(x:unit):[{}] unit = let box u = f x in ret (eval u) in let box v = f () in eval v";

fn source(main: &str) -> NamedTempFile {
    let mut file = NamedTempFile::new().unwrap();
    write!(file, "{PRELUDE}\n{main}\n").unwrap();
    file
}

struct Output {
    code: i32,
    out: String,
    err: String,
}

fn capture(f: impl FnOnce(&mut Vec<u8>, &mut Vec<u8>) -> std::io::Result<i32>) -> Output {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = f(&mut out, &mut err).unwrap();
    Output { code, out: String::from_utf8(out).unwrap(), err: String::from_utf8(err).unwrap() }
}

fn check_file(path: &Path) -> Output {
    capture(|out, err| check(path, out, err))
}

fn run_file(path: &Path, fuel: u64) -> Output {
    capture(|out, err| run(path, fuel, OutputFormat::Pretty, out, err))
}

#[test]
fn check_prints_the_type() {
    let r = check_file(source("incr_n").path());
    assert_eq!((r.code, r.out.as_str()), (exit::OK, "int -> [ {get:unit=>int, set:int=>unit} ] int\n"));
}

#[test]
fn check_reports_type_errors_with_a_position() {
    let r = check_file(source("box St. ret (box {}. get())").path());
    assert_eq!(r.code, exit::TYPE_ERROR);
    let line = format!("{PRELUDE}\n").lines().count() + 1;
    assert!(r.err.starts_with(&format!("{line}:22: op-not-in-context: expected ")), "{}", r.err);
    assert!(r.err.contains(", found "), "{}", r.err);
}

#[test]
fn check_rejects_an_empty_file_as_unparseable() {
    let file = NamedTempFile::new().unwrap();
    assert_eq!(check_file(file.path()).code, exit::PARSE_ERROR);
}

#[test]
fn missing_files_are_io_errors() {
    let r = check_file(Path::new("/nonexistent/program.ec"));
    assert_eq!(r.code, exit::IO_ERROR);
    assert!(r.err.contains("cannot read"));
}

#[test]
fn run_prints_values() {
    for (main, value) in [
        (INCR, "ret (0, 1)"),
        ("let box v = explode 12 in handle v with handlerExn init ()", "ret 42"),
        ("let fix fact(n:int):[{}] int = if n = 0 then ret 1 else ret (n * eval_f (fact (n - 1))) in (eval_f (fact 3))", "6"),
    ] {
        let r = run_file(source(main).path(), 1_000_000);
        assert_eq!((r.code, r.out.trim_end()), (exit::OK, value), "{main}\n{}", r.err);
    }
}

#[test]
fn run_reports_runtime_errors_and_fuel() {
    let div = run_file(source("let box u = box {}. ret (1 / 0) in eval u").path(), 100);
    assert_eq!(div.code, exit::RUNTIME_ERROR);
    assert!(div.err.contains("division by zero"));
    let overflow = run_file(source("let box u = box {}. ret (9223372036854775807 + 1) in eval u").path(), 100);
    assert_eq!(overflow.code, exit::RUNTIME_ERROR);
    assert!(overflow.err.contains("overflow"));
    let looping = run_file(source(LOOP).path(), 50);
    assert_eq!(looping.code, exit::FUEL_EXHAUSTED);
    assert_eq!(looping.err, "fuel exhausted after 50 steps\n");
}

#[test]
fn json_output_reparses_to_the_same_value() {
    let file = source(INCR);
    let r = capture(|out, err| run(file.path(), 100, OutputFormat::Json, out, err));
    assert_eq!(r.code, exit::OK);
    let json: serde_json::Value = serde_json::from_str(&r.out).unwrap();
    assert_eq!(json["type"], "int * int");
    let text = json["value"].as_str().unwrap();
    let reparsed = parse_main(text, &Default::default()).unwrap();
    let direct = parse_main("ret (0, 1)", &Default::default()).unwrap();
    assert!(reparsed.alpha_eq(&direct), "{text}");
    assert_eq!(json_value(&direct, &ecmtt::Type::Int, 3)["steps"], 3);
}

#[test]
fn trace_ends_with_the_run_output() {
    for main in [INCR, "ret 42", "let box u = opstopop in handle u with handlerCount init ()", "(eval_f fact3)"] {
        let file = source(main);
        let t = capture(|out, err| trace(file.path(), 1000, out, err));
        let r = run_file(file.path(), 1000);
        assert_eq!(t.code, r.code);
        assert_eq!(t.out.lines().last(), r.out.lines().last(), "{main}");
        assert!(t.out.starts_with("#0 "));
    }
}

#[test]
fn trace_of_a_value_takes_no_steps() {
    let file = source("ret 42");
    let t = capture(|out, err| trace(file.path(), 10, out, err));
    assert_eq!(t.out, "#0 ret 42\nret 42\n");
}

#[test]
fn trace_of_incr_starts_with_beta_letbox() {
    let file = source(INCR);
    let t = capture(|out, err| trace(file.path(), 1000, out, err));
    let second = t.out.lines().nth(1).unwrap();
    assert!(second.starts_with("#1 [beta-letbox] ⟶ "), "{second}");
}

#[test]
fn trace_stops_when_fuel_runs_out() {
    let file = source(LOOP);
    let t = capture(|out, err| trace(file.path(), 7, out, err));
    assert_eq!(t.code, exit::FUEL_EXHAUSTED);
    assert_eq!(t.out.lines().filter(|l| l.starts_with('#')).count(), 8);
    assert_eq!(t.out.lines().last(), Some("fuel exhausted"));
}

fn session(input: &str) -> Output {
    capture(|out, err| repl(&mut input.as_bytes(), 1000, out, err))
}

#[test]
fn repl_types_and_evaluates() {
    let r = session(":t box {}. ret 0\nlet box u = box {}. ret 1 in eval u\n");
    assert_eq!(r.out, "[ {} ] int\n1\n");
}

#[test]
fn repl_definitions_persist() {
    let r = session(
        "def St = {get:unit=>int, set:int=>unit}\n\
         def handlerSt = handler for St { get(x; k; z) -> k(z; z), set(x; k; z) -> k((); x), return(x; z) -> ret (x, z) }\n\
         def incr = box St. x <- get(); _ <- set(x + 1); ret x;;\n\
         let box u = incr in handle u with handlerSt init 0\n",
    );
    assert_eq!(r.out.lines().last(), Some("ret (0, 1)"), "{}", r.err);
}

#[test]
fn repl_survives_errors_and_stops_at_quit() {
    let r = session("bogus (\n:t 1 + true\nlet box u = box {}. ret (1 / 0) in eval u\n:t 3\n:q\n:t 4\n");
    assert_eq!(r.out, "int\n");
    assert_eq!(r.err.lines().count(), 3, "{}", r.err);
}

#[test]
fn corpus_table_passes() {
    let r = capture(|out, _| run_corpus(out));
    assert_eq!(r.code, exit::OK, "{}", r.out);
    assert!(r.out.lines().last().unwrap().ends_with(" 0 failed"));
    for name in ["incr", "simple_dagger", "op_outside_its_box", "factorial"] {
        assert!(r.out.lines().any(|l| l.starts_with(&format!("{name} "))), "{name}");
    }
}

#[test]
fn step_budget_prefers_the_flag() {
    assert_eq!(max_steps(Some(3), Some("9")).unwrap(), 3);
    assert_eq!(max_steps(None, Some("9")).unwrap(), 9);
    assert_eq!(max_steps(None, None).unwrap(), 1_000_000);
    assert!(max_steps(None, Some("lots")).is_err());
}

#[test]
fn file_commands_need_a_path() {
    assert!(CliConfig::new(Command::Run, None).is_err());
    assert!(CliConfig::new(Command::Repl, None).is_ok());
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_ecmtt");
    let ok = source(INCR);
    let ill = source("box St. ret (box {}. get())");
    let looping = source(LOOP);
    let status = |args: &[&str], env: Option<&str>| {
        let mut cmd = Process::new(bin);
        cmd.args(args).env_remove("ECMTT_MAX_STEPS");
        if let Some(v) = env {
            cmd.env("ECMTT_MAX_STEPS", v);
        }
        cmd.output().unwrap()
    };
    let path = |f: &NamedTempFile| f.path().to_str().unwrap().to_string();
    let out = status(&["run", &path(&ok)], None);
    assert_eq!((out.status.code(), String::from_utf8_lossy(&out.stdout).as_ref()), (Some(0), "ret (0, 1)\n"));
    assert_eq!(status(&["check", &path(&ill)], None).status.code(), Some(1));
    assert_eq!(status(&["run", &path(&looping)], Some("20")).status.code(), Some(3));
    let capped = status(&["run", "--max-steps", "5", &path(&looping)], Some("1000000"));
    assert_eq!(String::from_utf8_lossy(&capped.stderr), "fuel exhausted after 5 steps\n");
    assert_eq!(status(&["check", "/nonexistent.ec"], None).status.code(), Some(4));
    assert_eq!(status(&["corpus"], None).status.code(), Some(0));
}
