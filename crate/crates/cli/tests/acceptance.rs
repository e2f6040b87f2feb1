//! Acceptance suite: one line per criterion, non-zero exit if any fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use ecmtt::corpus::{self, boxed_expressions, prelude, theories, Check, CorpusCase};
use ecmtt::eval::{evaluate, Outcome, DEFAULT_FUEL};
use ecmtt::gen::Gen;
use ecmtt::props::{self, RunEnd};
use ecmtt::subst::Engine;
use ecmtt::surface::{parse_comp, parse_handler_with, parse_seq_with, Definition, Definitions};
use ecmtt::{AlphaEq, Comp, Expr, Term, Type};

const GOLDEN: &[&str] = &[
    "incr",
    "simple",
    "simple_star",
    "simple_dagger",
    "count",
    "nondet",
    "explode_0",
    "explode_12",
    "explode_composition",
    "explode_sequence",
    "factorial",
];

const TYPING: &[&str] = &[
    "typed_get",
    "typed_incr_n",
    "op_outside_its_box",
    "typed_handler_st",
    "typed_handler_exn",
    "typed_explosive_handler",
    "typed_handling_sequence",
    "typed_nested_handle",
    "typed_identity_handler",
    "typed_identity_lift",
    "typed_pure_box",
    "typed_boxed_application",
    "typed_box_flattening",
];

const BUDGET: Duration = Duration::from_secs(60);

type Verdict = Result<String, String>;
type Criterion = (&'static str, fn() -> Verdict);

fn reports_for(names: &[String]) -> Verdict {
    let reports = corpus::run_all();
    let mut failures = Vec::new();
    for name in names {
        match reports.iter().find(|r| r.name == name.as_str()) {
            Some(r) if r.passed => {}
            Some(r) => failures.push(format!("{}: expected {}, observed {}", r.name, r.expected, r.actual)),
            None => failures.push(format!("{name}: no such case")),
        }
    }
    if failures.is_empty() {
        Ok(format!("{} cases", names.len()))
    } else {
        Err(failures.join("; "))
    }
}

fn golden_outputs() -> Verdict {
    reports_for(&GOLDEN.iter().map(|s| s.to_string()).collect::<Vec<_>>())
}

fn typing_judgments() -> Verdict {
    let cases = corpus::cases();
    let rejected = cases.iter().find(|c| c.name == "op_outside_its_box").map(|c| &c.check);
    if !matches!(rejected, Some(Check::Rejected(ecmtt::TypeErrorKind::OpNotInContext))) {
        return Err("op_outside_its_box is not expected to fail with op-not-in-context".into());
    }
    reports_for(&TYPING.iter().map(|s| s.to_string()).collect::<Vec<_>>())
}

fn within_budget(start: Instant) -> Result<(), String> {
    match start.elapsed() {
        t if t <= BUDGET => Ok(()),
        t => Err(format!("took {t:.1?}, over the {BUDGET:?} budget")),
    }
}

fn metatheory() -> Verdict {
    let start = Instant::now();
    let mut gen = Gen::new(0x5eed);
    let (mut values, mut errors, mut steps) = (0, 0, 0);
    for i in 0..1000 {
        let program = gen.program();
        match props::preservation(&program.term, 100_000) {
            Ok((end, n)) => {
                steps += n;
                match end {
                    RunEnd::Value => values += 1,
                    RunEnd::RuntimeError => errors += 1,
                    RunEnd::OutOfFuel => {}
                }
            }
            Err(e) => return Err(format!("program {i}: {e}")),
        }
    }
    within_budget(start)?;
    Ok(format!(
        "1000 programs, {steps} steps, {values} values, {errors} runtime errors, {:.1?}",
        start.elapsed()
    ))
}

fn substitution_principles() -> Verdict {
    let start = Instant::now();
    let mut gen = Gen::new(42);
    for i in 0..500 {
        let checks: [(&str, Result<(), String>); 7] = [
            ("monadic", props::monadic(&gen.monadic_case())),
            ("continuation", props::continuation(&gen.cont_case(false))),
            ("continuation into a handler", props::continuation(&gen.cont_case(true))),
            ("handling", props::handling(&gen.handle_case())),
            ("handling sequence", props::sequencing(&gen.seq_case())),
            ("modal", props::modal(&gen.modal_case())),
            ("eval", props::eval_meta(&gen.eval_case())),
        ];
        for (lemma, result) in checks {
            result.map_err(|e| format!("{lemma} instance {i}: {e}"))?;
        }
    }
    within_budget(start)?;
    Ok(format!("500 instances for each of 7 operations, {:.1?}", start.elapsed()))
}

fn eta_and_identity() -> Verdict {
    let defs = prelude();
    let boxed = boxed_expressions(&defs);
    let mut empty = 0;
    for (name, e) in &boxed {
        let ty = props::eta_preserves_type(e).map_err(|err| format!("{name}: {err}"))?;
        if matches!(&ty, Type::Modal(theory, _) if theory.is_empty()) {
            props::eta_evaluates_alike(e, DEFAULT_FUEL).map_err(|err| format!("{name}: {err}"))?;
            empty += 1;
        }
    }
    let named = theories(&defs);
    let inputs = [Type::Int, Type::Unit, Type::Bool, Type::prod(Type::Int, Type::Int)];
    for (name, theory) in &named {
        props::identity_handler(theory, &inputs).map_err(|err| format!("{name}: {err}"))?;
    }
    Ok(format!(
        "{} boxed expressions ({empty} over the empty theory), {} theories",
        boxed.len(),
        named.len()
    ))
}

fn trace_fidelity() -> Verdict {
    let defs = prelude();
    let case = corpus::cases().into_iter().find(|c| c.name == "incr").ok_or("no incr case")?;
    let program = corpus::term(&case, &defs)?;
    let trace = evaluate(&program, DEFAULT_FUEL, true);
    let first = trace.steps.first().ok_or("incr takes no steps")?;
    if first.0 != "beta-letbox" {
        return Err(format!("first step is {}", first.0));
    }
    let expected = Term::Comp(parse_comp("ret (0, 1)").map_err(|d| d.to_string())?);
    match &trace.outcome {
        Outcome::Value(v) if v.alpha_eq(&expected) => {}
        other => return Err(format!("incr ends with {other}")),
    }
    if !trace.terms().next().is_some_and(|t| t.alpha_eq(&program)) {
        return Err("trace does not start at the program".into());
    }
    if trace.render().lines().last() != Some("ret (0, 1)") {
        return Err("rendered trace does not end with ret (0, 1)".into());
    }

    let handler = parse_handler_with("handlerSt", &defs).map_err(|d| d.to_string())?;
    let body = match defs.get("incr") {
        Some(Definition::Term { expr: Some(Expr::Box(_, body)), .. }) => body.as_ref().clone(),
        _ => return Err("incr is not a boxed definition".into()),
    };
    let mut engine = Engine::default();
    let redex = engine.handle_with(&body, &handler, &Expr::Int(0)).map_err(|e| e.to_string())?;
    let after_letbox = Term::Comp(redex);
    if !trace.terms().any(|t| t.alpha_eq(&after_letbox)) {
        return Err(format!("trace never reaches the let-box redex result {after_letbox}"));
    }

    let open = parse_comp("w <- set(y + 1); ret y").map_err(|d| d.to_string())?;
    let handled = engine.handle_with(&open, &handler, &Expr::var("z1")).map_err(|e| e.to_string())?;
    let want = parse_comp("ret (y, y + 1)").map_err(|d| d.to_string())?;
    if !handled.alpha_eq(&want) {
        return Err(format!("handling the set step gives {handled}"));
    }
    Ok(format!("{} steps", trace.step_count))
}

/// Every term a corpus case or prelude definition denotes.
fn corpus_terms(defs: &Definitions) -> Vec<(String, Term)> {
    let mut terms = Vec::new();
    for (name, def) in defs {
        match def {
            Definition::Theory(_) => {}
            Definition::Handler(h) => terms.push((name.clone(), Term::Handler(h.clone()))),
            Definition::Term { expr, comp } => {
                terms.extend(expr.iter().map(|e| (name.clone(), Term::Expr(e.clone()))));
                terms.extend(comp.iter().map(|c| (format!("{name} (computation)"), Term::Comp(c.clone()))));
            }
        }
    }
    for case in corpus::cases() {
        if let Some(t) = case_term(&case, defs) {
            terms.push((case.name.to_string(), t));
        }
    }
    terms
}

fn case_term(case: &CorpusCase, defs: &Definitions) -> Option<Term> {
    match case.check {
        Check::ParseError => None,
        Check::Handler { .. } => parse_handler_with(case.source, defs).ok().map(Term::Handler),
        Check::Seq { .. } => parse_seq_with(case.source, defs).ok().map(Term::Seq),
        _ => corpus::term(case, defs).ok(),
    }
}

fn round_trip() -> Verdict {
    let defs = prelude();
    let from_corpus = corpus_terms(&defs);
    for (name, term) in &from_corpus {
        props::round_trip(term).map_err(|e| format!("{name}: {e}"))?;
    }
    let mut gen = Gen::new(7);
    for i in 0..1000 {
        props::round_trip(&gen.any_term()).map_err(|e| format!("generated term {i}: {e}"))?;
    }
    let comps = from_corpus.iter().filter(|(_, t)| matches!(t, Term::Comp(Comp::Bind(..)))).count();
    Ok(format!("{} corpus terms ({comps} binds), 1000 generated", from_corpus.len()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 7] = [
        ("golden outputs", golden_outputs),
        ("typing judgments", typing_judgments),
        ("preservation and progress", metatheory),
        ("substitution principles", substitution_principles),
        ("eta and identity", eta_and_identity),
        ("trace fidelity", trace_fidelity),
        ("round trip", round_trip),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let elapsed = start.elapsed();
        match result {
            Ok(detail) => println!("criterion {}: PASS {name} ({detail}) [{elapsed:.2?}]", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL {name}: {why} [{elapsed:.2?}]", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
