//! Executable forms of the metatheory: preservation and progress along
//! evaluation, the substitution principles, η-expansion and the identity
//! handler, and printer round-trips.
//!
//! Each check returns `Err` with a readable account of the first violation.

use std::collections::BTreeSet;

use crate::eval::{evaluate, step, Outcome, StepResult, StuckReason};
use crate::gen::{ContCase, ContTarget, EvalCase, HandleCase, ModalCase, MonadicCase, SeqCase};
use crate::subst::{eta_expand, id_handler, Engine};
use crate::surface::{parse_term_like, pretty};
use crate::syntax::*;
use crate::typeck::{check_handler, conforms, infer_closed, infer_comp, infer_expr, infer_term};

/// How an evaluation checked by [`preservation`] ended.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RunEnd {
    Value,
    RuntimeError,
    OutOfFuel,
}

/// Steps `term` to a value, checking that every intermediate term
/// typechecks at a type conforming to its predecessor's and that no step is
/// stuck for an internal reason.
pub fn preservation(term: &Term, fuel: u64) -> Result<(RunEnd, u64), String> {
    let mut ty = infer_closed(term).map_err(|e| format!("initial term ill-typed: {e}\n{term}"))?;
    let mut current = term.clone();
    for n in 0..fuel {
        match step(&current) {
            StepResult::Value(_) => return Ok((RunEnd::Value, n)),
            StepResult::Stuck(StuckReason::Internal(msg)) => {
                return Err(format!("stuck after {n} steps: {msg}\n{current}"));
            }
            StepResult::Stuck(_) => return Ok((RunEnd::RuntimeError, n)),
            StepResult::Stepped(next, rule) => {
                let next_ty = infer_closed(&next)
                    .map_err(|e| format!("step {} [{rule}] is ill-typed: {e}\nfrom {current}\nto   {next}", n + 1))?;
                if !conforms(&next_ty, &ty) {
                    return Err(format!(
                        "step {} [{rule}] changed the type from {ty} to {next_ty}\nfrom {current}\nto   {next}",
                        n + 1
                    ));
                }
                ty = next_ty;
                current = next;
            }
        }
    }
    Ok((RunEnd::OutOfFuel, fuel))
}

/// `parse(pretty(t))` is α-equivalent to `t`.
pub fn round_trip(term: &Term) -> Result<(), String> {
    let text = pretty(term);
    let back = parse_term_like(&text, term).map_err(|d| format!("reparse failed: {d}\n{text}"))?;
    if back.alpha_eq(term) {
        Ok(())
    } else {
        Err(format!("round trip changed the term\nprinted {text}\nreparsed {back}"))
    }
}

fn expect(found: Result<Type, crate::typeck::TypeError>, ty: &Type, what: &str, result: &dyn std::fmt::Display) -> Result<(), String> {
    match found {
        Ok(found) if conforms(&found, ty) => Ok(()),
        Ok(found) => Err(format!("{what}: expected {ty}, found {found}\n{result}")),
        Err(e) => Err(format!("{what}: result ill-typed: {e}\n{result}")),
    }
}

fn subset(what: &str, found: &BTreeSet<Name>, allowed: &BTreeSet<Name>) -> Result<(), String> {
    match found.difference(allowed).next() {
        Some(extra) => Err(format!("{what}: `{extra}` is free in the result but in neither input")),
        None => Ok(()),
    }
}

fn union(a: &BTreeSet<Name>, b: &BTreeSet<Name>) -> BTreeSet<Name> {
    a.union(b).cloned().collect()
}

fn minus(a: &BTreeSet<Name>, x: &str) -> BTreeSet<Name> {
    let mut out = a.clone();
    out.remove(x);
    out
}

pub fn monadic(case: &MonadicCase) -> Result<(), String> {
    let out = Engine::default().subst_monadic(&case.c, &case.x, &case.cont).map_err(|e| e.to_string())?;
    expect(infer_comp(&case.scope.delta, &case.scope.gamma, &out), &case.ty, "monadic substitution", &out)?;
    let allowed = union(&case.c.free_vars().values, &minus(&case.cont.free_vars().values, &case.x));
    subset("monadic substitution", &out.free_vars().values, &allowed)
}

pub fn continuation(case: &ContCase) -> Result<(), String> {
    let mut engine = Engine::default();
    let body_fv = minus(&minus(&case.body.free_vars().values, &case.x), &case.y);
    let (out_fv, target_fv) = match &case.target {
        ContTarget::Comp(c, ty) => {
            let out = engine.subst_cont(c, &case.x, &case.y, &case.body, &case.k).map_err(|e| e.to_string())?;
            expect(infer_comp(&case.scope.delta, &case.scope.gamma, &out), ty, "continuation substitution", &out)?;
            (out.free_vars(), c.free_vars())
        }
        ContTarget::Handler { handler, input, state, output } => {
            let out = engine
                .subst_cont_handler(handler, &case.x, &case.y, &case.body, &case.k)
                .map_err(|e| e.to_string())?;
            let sig = check_handler(&case.scope.delta, &case.scope.gamma, &out, input, state).map(|s| s.output);
            expect(sig, output, "continuation substitution into a handler", &out)?;
            (out.free_vars(), handler.free_vars())
        }
    };
    if out_fv.conts.contains(&case.k) {
        return Err(format!("continuation `{}` survives its substitution", case.k));
    }
    subset("continuation substitution", &out_fv.values, &union(&target_fv.values, &body_fv))
}

pub fn handling(case: &HandleCase) -> Result<(), String> {
    let out = Engine::default().handle_with(&case.c, &case.handler, &case.state).map_err(|e| e.to_string())?;
    expect(infer_comp(&case.scope.delta, &case.scope.gamma, &out), &case.ty, "handling", &out)?;
    let inputs = union(
        &union(&case.c.free_vars().values, &case.handler.free_vars().values),
        &case.state.free_vars().values,
    );
    subset("handling", &out.free_vars().values, &inputs)
}

pub fn sequencing(case: &SeqCase) -> Result<(), String> {
    let out = Engine::default().handle_seq(&case.c, &case.seq).map_err(|e| e.to_string())?;
    let ambient = case.ambient.as_effect_context();
    expect(infer_comp(&case.scope.delta, &ambient, &out), &case.ty, "handling sequence", &out)?;
    let inputs = union(&case.c.free_vars().values, &case.seq.free_vars().values);
    subset("handling sequence", &out.free_vars().values, &inputs)
}

pub fn modal(case: &ModalCase) -> Result<(), String> {
    let out = Engine::default().modal_subst_term(&case.body, &case.u, &case.target).map_err(|e| e.to_string())?;
    expect(infer_term(&case.scope.delta, &case.scope.gamma, &out), &case.ty, "modal substitution", &out)?;
    let (out_fv, target_fv, body_fv) = (out.free_vars(), case.target.free_vars(), case.body.free_vars());
    if out_fv.modals.contains(&case.u) && !body_fv.modals.contains(&case.u) {
        return Err(format!("modal variable `{}` survives its substitution\n{out}", case.u));
    }
    subset("modal substitution", &out_fv.values, &union(&target_fv.values, &body_fv.values))?;
    subset("modal substitution", &out_fv.modals, &union(&minus(&target_fv.modals, &case.u), &body_fv.modals))
}

pub fn eval_meta(case: &EvalCase) -> Result<(), String> {
    let out = Engine::default().eval_meta(&case.c).map_err(|e| e.to_string())?;
    expect(infer_expr(&case.scope.delta, &out), &case.ty, "eval", &out)?;
    subset("eval", &out.free_vars().values, &case.c.free_vars().values)
}

/// The η-expansion of a closed boxed expression synthesizes the same type.
pub fn eta_preserves_type(e: &Expr) -> Result<Type, String> {
    let ty = infer_expr(&ModalContext::empty(), e).map_err(|err| format!("ill-typed: {err}\n{e}"))?;
    let Type::Modal(theory, _) = &ty else {
        return Err(format!("not boxed: {e} : {ty}"));
    };
    let expanded = eta_expand(e, theory);
    let found = infer_expr(&ModalContext::empty(), &expanded).map_err(|err| format!("expansion ill-typed: {err}\n{expanded}"))?;
    if found == ty {
        Ok(ty)
    } else {
        Err(format!("expansion changed the type from {ty} to {found}\n{expanded}"))
    }
}

fn run_eval(e: &Expr, fuel: u64) -> Result<Term, String> {
    let program = Term::Expr(Expr::let_box("u", e.clone(), Expr::Eval(HandlingSeq::empty(), "u".into())));
    match evaluate(&program, fuel, false).outcome {
        Outcome::Value(v) => Ok(v),
        other => Err(format!("{program} ended with {other}")),
    }
}

/// For a closed `e : [{}]A`, `let box u = e in eval u` and the same with
/// the η-expansion of `e` reach α-equivalent values.
pub fn eta_evaluates_alike(e: &Expr, fuel: u64) -> Result<Term, String> {
    let plain = run_eval(e, fuel)?;
    let expanded = run_eval(&eta_expand(e, &Theory::empty()), fuel)?;
    if plain.alpha_eq(&expanded) {
        Ok(plain)
    } else {
        Err(format!("{e} evaluates to {plain} but its expansion to {expanded}"))
    }
}

/// `id_handler(theory)` checks at `A ⇒ theory | unit ⇛ A` under the
/// ambient `theory` for each given `A`.
pub fn identity_handler(theory: &Theory, inputs: &[Type]) -> Result<(), String> {
    let h = id_handler(theory);
    let gamma = theory.as_effect_context();
    for input in inputs {
        let sig = check_handler(&ModalContext::empty(), &gamma, &h, input, &Type::Unit)
            .map_err(|e| format!("identity handler for {theory} rejected at {input}: {e}"))?;
        if sig.output != *input {
            return Err(format!("identity handler for {theory} outputs {} at {input}", sig.output));
        }
    }
    Ok(())
}
