//! Call-by-value small-step semantics and a fueled driver.
//!
//! Rule names of congruence steps are paths: `cong-letbox/beta-app` is a
//! β-step for application taken inside the bound expression of a `let box`.

use std::fmt;

use thiserror::Error;

use crate::subst::{self, Engine, SubstError};
use crate::syntax::*;

pub const DEFAULT_FUEL: u64 = 1_000_000;

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum StuckReason {
    #[error("division by zero")]
    DivisionByZero,
    #[error("integer overflow")]
    Overflow,
    #[error("internal: {0}")]
    Internal(String),
}

#[derive(Clone, Debug, PartialEq)]
pub enum StepResult {
    Stepped(Term, String),
    Value(Term),
    Stuck(StuckReason),
}

pub fn is_value_expr(e: &Expr) -> bool {
    match e {
        Expr::Lam(..) | Expr::Box(..) | Expr::Int(_) | Expr::Bool(_) | Expr::Unit | Expr::Nil(_) => true,
        Expr::Pair(a, b) => is_value_expr(a) && is_value_expr(b),
        Expr::List(items) => items.iter().all(is_value_expr),
        _ => false,
    }
}

pub fn is_value(t: &Term) -> bool {
    match t {
        Term::Expr(e) => is_value_expr(e),
        Term::Comp(Comp::Ret(e)) => is_value_expr(e),
        _ => false,
    }
}

enum Step<T> {
    Next(T, String),
    Done,
    Stuck(StuckReason),
}

fn internal(msg: impl Into<String>) -> StuckReason {
    StuckReason::Internal(msg.into())
}

fn from_subst(err: SubstError) -> StuckReason {
    internal(err.to_string())
}

/// Steps `sub` and rebuilds the enclosing term, prefixing the rule path.
fn cong<T>(sub: &Expr, rule: &str, rebuild: impl FnOnce(Expr) -> T) -> Step<T> {
    match step_expr(sub) {
        Step::Next(e, inner) => Step::Next(rebuild(e), format!("{rule}/{inner}")),
        Step::Done => Step::Stuck(internal(format!("{rule}: operand is already a value"))),
        Step::Stuck(r) => Step::Stuck(r),
    }
}

fn unrolled(def: &FixDef) -> Expr {
    Expr::lam(
        def.param.clone(),
        def.param_ty.clone(),
        Expr::boxed(def.theory.clone(), Comp::Fix(Box::new(def.clone()), Box::new(def.body.clone()))),
    )
}

fn step_expr(e: &Expr) -> Step<Expr> {
    if is_value_expr(e) {
        return Step::Done;
    }
    match e {
        Expr::Var(x) => Step::Stuck(internal(format!("free variable `{x}`"))),
        Expr::App(f, a) => {
            if !is_value_expr(f) {
                return cong(f, "cong-app-l", |f| Expr::app(f, (**a).clone()));
            }
            if !is_value_expr(a) {
                return cong(a, "cong-app-r", |a| Expr::app((**f).clone(), a));
            }
            match f.as_ref() {
                Expr::Lam(x, _, body) => Step::Next(subst::subst_expr(a, x, body), "beta-app".into()),
                _ => Step::Stuck(internal("application of a non-function")),
            }
        }
        Expr::LetBox(u, bound, body) => {
            if !is_value_expr(bound) {
                return cong(bound, "cong-letbox", |b| Expr::let_box(u.clone(), b, (**body).clone()));
            }
            match bound.as_ref() {
                Expr::Box(_, c) => match Engine::default().modal_subst_expr(c, u, body) {
                    Ok(e) => Step::Next(e, "beta-letbox".into()),
                    Err(err) => Step::Stuck(from_subst(err)),
                },
                _ => Step::Stuck(internal("let box of a non-box")),
            }
        }
        Expr::Eval(_, u) => Step::Stuck(internal(format!("eval of free modal variable `{u}`"))),
        Expr::Fix(def, scope) => Step::Next(subst::subst_expr(&unrolled(def), &def.name, scope), "unroll-fix".into()),
        Expr::Pair(a, b) => {
            if !is_value_expr(a) {
                cong(a, "cong-pair-l", |a| Expr::pair(a, (**b).clone()))
            } else {
                cong(b, "cong-pair-r", |b| Expr::pair((**a).clone(), b))
            }
        }
        Expr::List(items) => {
            let i = items.iter().position(|i| !is_value_expr(i)).expect("non-value list has a non-value item");
            cong(&items[i], "cong-list", |item| {
                let mut items = items.clone();
                items[i] = item;
                Expr::List(items)
            })
        }
        Expr::Fst(p) | Expr::Snd(p) => {
            let fst = matches!(e, Expr::Fst(_));
            if !is_value_expr(p) {
                let rule = if fst { "cong-fst" } else { "cong-snd" };
                return cong(p, rule, |p| if fst { Expr::Fst(Box::new(p)) } else { Expr::Snd(Box::new(p)) });
            }
            match p.as_ref() {
                Expr::Pair(a, _) if fst => Step::Next((**a).clone(), "delta-fst".into()),
                Expr::Pair(_, b) => Step::Next((**b).clone(), "delta-snd".into()),
                _ => Step::Stuck(internal("projection of a non-pair")),
            }
        }
        Expr::Append(a, b) => {
            if !is_value_expr(a) {
                return cong(a, "cong-append-l", |a| Expr::Append(Box::new(a), b.clone()));
            }
            if !is_value_expr(b) {
                return cong(b, "cong-append-r", |b| Expr::Append(a.clone(), Box::new(b)));
            }
            match subst::append_values(a, b) {
                Some(v) => Step::Next(v, "delta-append".into()),
                None => Step::Stuck(internal("append of non-lists")),
            }
        }
        Expr::Arith(op, a, b) => {
            if !is_value_expr(a) {
                return cong(a, "cong-arith-l", |a| Expr::arith(*op, a, (**b).clone()));
            }
            if !is_value_expr(b) {
                return cong(b, "cong-arith-r", |b| Expr::arith(*op, (**a).clone(), b));
            }
            match (a.as_ref(), b.as_ref()) {
                (Expr::Int(_), Expr::Int(0)) if *op == ArithOp::Div => Step::Stuck(StuckReason::DivisionByZero),
                (Expr::Int(x), Expr::Int(y)) => match op.apply(*x, *y) {
                    Some(n) => Step::Next(Expr::Int(n), "delta-arith".into()),
                    None => Step::Stuck(StuckReason::Overflow),
                },
                _ => Step::Stuck(internal("arithmetic on non-integers")),
            }
        }
        Expr::Cmp(op, a, b) => {
            if !is_value_expr(a) {
                return cong(a, "cong-cmp-l", |a| Expr::cmp(*op, a, (**b).clone()));
            }
            if !is_value_expr(b) {
                return cong(b, "cong-cmp-r", |b| Expr::cmp(*op, (**a).clone(), b));
            }
            let result = match (op, a.as_ref(), b.as_ref()) {
                (CmpOp::Lt, Expr::Int(x), Expr::Int(y)) => Some(x < y),
                (CmpOp::Eq, a, b) => subst::value_eq(a, b),
                _ => None,
            };
            match result {
                Some(v) => Step::Next(Expr::Bool(v), "delta-cmp".into()),
                None => Step::Stuck(internal("comparison of incomparable values")),
            }
        }
        Expr::If(c, t, f) => match c.as_ref() {
            Expr::Bool(true) => Step::Next((**t).clone(), "beta-if".into()),
            Expr::Bool(false) => Step::Next((**f).clone(), "beta-if".into()),
            c if is_value_expr(c) => Step::Stuck(internal("if on a non-boolean")),
            _ => cong(c, "cong-if", |c| Expr::if_(c, (**t).clone(), (**f).clone())),
        },
        Expr::Lam(..) | Expr::Box(..) | Expr::Int(_) | Expr::Bool(_) | Expr::Unit | Expr::Nil(_) => Step::Done,
    }
}

fn step_comp(c: &Comp) -> Step<Comp> {
    match c {
        Comp::Ret(e) if is_value_expr(e) => Step::Done,
        Comp::Ret(e) => cong(e, "cong-ret", Comp::Ret),
        Comp::Bind(s, _, _) => Step::Stuck(internal(format!("statement `{s}` at the top level"))),
        Comp::LetBox(u, bound, body) => {
            if !is_value_expr(bound) {
                return cong(bound, "cong-letbox", |b| Comp::let_box(u.clone(), b, (**body).clone()));
            }
            match bound {
                Expr::Box(_, payload) => match Engine::default().modal_subst_comp(payload, u, body) {
                    Ok(c) => Step::Next(c, "beta-letbox".into()),
                    Err(err) => Step::Stuck(from_subst(err)),
                },
                _ => Step::Stuck(internal("let box of a non-box")),
            }
        }
        Comp::Fix(def, scope) => Step::Next(subst::subst_comp(&unrolled(def), &def.name, scope), "unroll-fix".into()),
        Comp::If(cond, t, f) => match cond {
            Expr::Bool(true) => Step::Next((**t).clone(), "beta-if".into()),
            Expr::Bool(false) => Step::Next((**f).clone(), "beta-if".into()),
            c if is_value_expr(c) => Step::Stuck(internal("if on a non-boolean")),
            _ => cong(cond, "cong-if", |cond| Comp::if_(cond, (**t).clone(), (**f).clone())),
        },
    }
}

/// One reduction step.
pub fn step(t: &Term) -> StepResult {
    let result = match t {
        Term::Expr(e) => match step_expr(e) {
            Step::Next(e, rule) => Step::Next(Term::Expr(e), rule),
            Step::Done => Step::Done,
            Step::Stuck(r) => Step::Stuck(r),
        },
        Term::Comp(c) => match step_comp(c) {
            Step::Next(c, rule) => Step::Next(Term::Comp(c), rule),
            Step::Done => Step::Done,
            Step::Stuck(r) => Step::Stuck(r),
        },
        _ => Step::Stuck(internal("only expressions and computations reduce")),
    };
    match result {
        Step::Next(t, rule) => StepResult::Stepped(t, rule),
        Step::Done => StepResult::Value(t.clone()),
        Step::Stuck(r) => StepResult::Stuck(r),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Outcome {
    Value(Term),
    Stuck { term: Term, reason: StuckReason },
    FuelExhausted { term: Term },
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Outcome::Value(v) => f.write_str(&crate::surface::pretty(v)),
            Outcome::Stuck { reason, .. } => write!(f, "stuck: {reason}"),
            Outcome::FuelExhausted { .. } => write!(f, "fuel exhausted"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Trace {
    pub initial: Term,
    /// Empty unless recording was requested.
    pub steps: Vec<(String, Term)>,
    pub outcome: Outcome,
    pub step_count: u64,
}

impl Trace {
    pub fn render(&self) -> String {
        let mut out = format!("#0 {}\n", self.initial);
        for (i, (rule, term)) in self.steps.iter().enumerate() {
            out.push_str(&format!("#{} [{rule}] ⟶ {term}\n", i + 1));
        }
        out.push_str(&self.outcome.to_string());
        out.push('\n');
        out
    }

    /// Every term visited, the initial one first.
    pub fn terms(&self) -> impl Iterator<Item = &Term> {
        std::iter::once(&self.initial).chain(self.steps.iter().map(|(_, t)| t))
    }
}

/// Steps `term` until it is a value, gets stuck, or `fuel` steps were taken.
pub fn evaluate(term: &Term, fuel: u64, record: bool) -> Trace {
    let mut steps = Vec::new();
    let (outcome, step_count) = evaluate_with(term, fuel, |_, rule, next| {
        if record {
            steps.push((rule.to_string(), next.clone()));
        }
    });
    Trace { initial: term.clone(), steps, outcome, step_count }
}

/// Like [`evaluate`], but hands each step to `on_step` (numbered from 1)
/// instead of keeping it. Returns the outcome and the number of steps taken.
pub fn evaluate_with(term: &Term, fuel: u64, mut on_step: impl FnMut(u64, &str, &Term)) -> (Outcome, u64) {
    let mut current = term.clone();
    let mut count = 0;
    let outcome = loop {
        match step(&current) {
            StepResult::Value(v) => break Outcome::Value(v),
            StepResult::Stuck(reason) => break Outcome::Stuck { term: current, reason },
            StepResult::Stepped(next, rule) => {
                if count == fuel {
                    break Outcome::FuelExhausted { term: current };
                }
                count += 1;
                on_step(count, &rule, &next);
                current = next;
            }
        }
    };
    (outcome, count)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::prelude;
    use crate::surface::{parse, parse_main};

    fn term(text: &str) -> Term {
        parse_main(text, &prelude()).unwrap()
    }

    fn run(text: &str) -> Trace {
        evaluate(&term(text), DEFAULT_FUEL, true)
    }

    #[test]
    fn values() {
        assert!(is_value(&term("box {get:unit=>int, set:int=>unit}. get()")));
        assert!(is_value(&term("ret (0, 1)")));
        assert!(!is_value(&term("let box u = box {}. ret 1 in ret 1")));
        assert!(!is_value(&term("(1 + 2)")));
    }

    #[test]
    fn beta_for_application() {
        let trace = run("((fn x:int. x) 5)");
        assert_eq!(trace.steps[0].0, "beta-app");
        assert_eq!(trace.outcome, Outcome::Value(Term::Expr(Expr::Int(5))));
    }

    #[test]
    fn incr_pipeline_starts_with_beta_letbox() {
        let trace = run("let box u = incr in x <- handle u with handlerSt init 0; ret x");
        assert_eq!(trace.steps[0].0, "beta-letbox");
        assert_eq!(trace.outcome.to_string(), "ret (0, 1)");
    }

    #[test]
    fn values_take_no_steps() {
        let trace = run("ret 42");
        assert_eq!(trace.step_count, 0);
        assert_eq!(trace.render(), "#0 ret 42\nret 42\n");
    }

    #[test]
    fn congruence_paths_name_the_inner_rule() {
        let trace = run("let box u = (fn x:int. box {}. ret x) 3 in eval u");
        assert_eq!(trace.steps[0].0, "cong-letbox/beta-app");
        assert_eq!(trace.outcome, Outcome::Value(Term::Expr(Expr::Int(3))));
    }

    #[test]
    fn division_by_zero_is_stuck() {
        let trace = run("(1 / (1 - 1))");
        assert!(matches!(trace.outcome, Outcome::Stuck { reason: StuckReason::DivisionByZero, .. }));
        let trace = run("(9223372036854775807 + 1)");
        assert!(matches!(trace.outcome, Outcome::Stuck { reason: StuckReason::Overflow, .. }));
    }

    #[test]
    fn divergence_runs_out_of_fuel() {
        let file = parse("let fix f(x:unit):[{}] unit = let box u = f x in x <- handle u with id[{}] init (); ret x in let box u = f () in eval u").unwrap();
        let trace = evaluate(&file.main, 200, false);
        assert!(matches!(trace.outcome, Outcome::FuelExhausted { .. }), "{}", trace.outcome);
        assert_eq!(trace.step_count, 200);
        assert!(trace.steps.is_empty());
    }

    #[test]
    fn factorial() {
        let file = parse(
            "let fix fact(n:int):[{}] int = if n = 0 then ret 1 else let box u = fact (n - 1) in \
             x <- handle u with id[{}] init (); ret (n * x) in let box u = fact 3 in eval u",
        )
        .unwrap();
        let trace = evaluate(&file.main, DEFAULT_FUEL, false);
        assert_eq!(trace.outcome, Outcome::Value(Term::Expr(Expr::Int(6))));
    }

    #[test]
    fn open_terms_are_stuck_internally() {
        assert!(matches!(step(&Term::Expr(Expr::var("x"))), StepResult::Stuck(StuckReason::Internal(_))));
        let bind = Comp::bind(Stmt::Op("op".into(), Expr::Unit), "x", Comp::ret(Expr::var("x")));
        assert!(matches!(step(&Term::Comp(bind)), StepResult::Stuck(StuckReason::Internal(_))));
    }
}
