//! The worked example programs and typing judgments, with their expected
//! outcomes.
//!
//! Every case is checked against a shared prelude of definitions
//! ([`PRELUDE`]): theories, handlers and the example computations.

use crate::eval::{evaluate, Outcome, DEFAULT_FUEL};
use crate::surface::{
    parse_handler_with, parse_main, parse_seq_with, parse_theory_with, parse_type_with, parse_with, type_to_string,
    Definitions,
};
use crate::syntax::*;
use crate::typeck::{check_handler, infer_closed, infer_hseq, infer_term, TypeErrorKind};

pub const PRELUDE: &str = r#"
def St = {get:unit=>int, set:int=>unit};;
def Exn = {raise:unit=>bot};;
def NDet = {choice:unit=>bool};;
def Op = {op:unit=>int};;
def OpStop = {op:unit=>int, stop:unit=>int};;

def incr = box St. x <- get(); _ <- set(x + 1); ret x;;
def incr_n = fn n:int. box St. x <- get(); y <- set(x + n); ret x;;
def handlerSt = handler for St {
    get(x; k; z) -> k(z; z),
    set(x; k; z) -> k((); x),
    return(x; z) -> ret (x, z)
};;

def simple = handler for {} { return(x; z) -> ret (x, z) };;
def simple7 = handler for {} { return(x; z) -> ret 7 };;
def simpleStar = handler for Op {
    op(x; k; z) -> k(1; z + 4),
    return(x; z) -> ret (x, z)
};;
def simpleDagger = handler for OpStop {
    op(x; k; z) -> k(1; z + 4),
    stop(x; k; z) -> ret (42, z),
    return(x; z) -> ret (x, z)
};;
def opopop = box Op. y1 <- op(); y2 <- op(); y3 <- op(); ret (y1 + y2 + y3);;
def opstopop = box OpStop. y1 <- op(); y2 <- stop(); y3 <- op(); ret (y1 + y2 + y3);;

def handlerExn = handler for Exn {
    raise(x; k; z) -> ret 42,
    return(x; z) -> ret x
};;
def handlerCount = handler for OpStop {
    op(x; k; z) -> y <- k(1; z); ret (fst y + 1, snd y),
    stop(x; k; z) -> y <- k(1; z); ret (fst y, snd y + 1),
    return(x; z) -> ret (0, 0)
};;
def nondet = box NDet. y <- choice(); if y then ret 4 else ret 5;;
def handlerNDet = handler for NDet {
    choice(x; k; z) -> y1 <- k(true; z); y2 <- k(false; z); ret (y1 ++ y2),
    return(x; z) -> ret [x]
};;

def handlerExplosiveSt = handler for St {
    get(x; k; z) -> k(z; z),
    set(x; k; z) -> if x = 13 then raise() else k((); x),
    return(x; z) -> ret (x, z)
};;
def explode = fn m:int. let box u = incr_n 1 in
    box Exn. x <- handle u with handlerExplosiveSt init m; ret (fst x);;

def safeDiv = fn x:int. fn y:int. box Exn. if y = 0 then raise() else ret (x / y);;
def divFromState = box St + Exn. y <- get(); let box u = safeDiv 42 y in handle u with id[Exn] init ();;
def handlerStExn = handler for St + Exn {
    get(x; k; z) -> k(z; z),
    set(x; k; z) -> k((); x),
    raise(x; k; z) -> ret 0,
    return(x; z) -> ret x
};;

def eval_f = fn x:[{}] int. let box u = x in eval u;;
def pure42 = box {}. ret 42;;
def countedOps = box {}. let box u = opstopop in handle u with handlerCount init ();;
def stateful = box {}. let box u = incr in handle u with handlerSt init 41;;
def fact3 = let fix fact(n:int):[{}] int = if n = 0 then ret 1 else ret (n * eval_f (fact (n - 1))) in fact 3;;
"#;

/// What a case is expected to do.
#[derive(Clone, Debug)]
pub enum Check {
    /// The program typechecks and evaluates to this pretty-printed result.
    Output(&'static str),
    /// The closed term synthesizes this type.
    Type(&'static str),
    /// The computation synthesizes this type under the modal variables
    /// `(u, A, Ψ)` in the empty effect context.
    TypeUnder { modals: &'static [(&'static str, &'static str, &'static str)], ty: &'static str },
    /// The handler, checked in `ambient` at `input` and `state`, has
    /// output type `output`.
    Handler { ambient: &'static str, input: &'static str, state: &'static str, output: &'static str },
    /// The handling sequence, typed in `ambient` for a computation of type
    /// `input` over `source`, yields `output`.
    Seq { ambient: &'static str, input: &'static str, source: &'static str, output: &'static str },
    /// Typechecking fails with this error kind.
    Rejected(TypeErrorKind),
    /// The source does not parse.
    ParseError,
}

#[derive(Clone, Debug)]
pub struct CorpusCase {
    pub name: &'static str,
    pub source: &'static str,
    pub check: Check,
}

/// The outcome of checking one case.
#[derive(Clone, Debug)]
pub struct CaseReport {
    pub name: &'static str,
    pub passed: bool,
    pub expected: String,
    pub actual: String,
}

const fn case(name: &'static str, source: &'static str, check: Check) -> CorpusCase {
    CorpusCase { name, source, check }
}

pub fn cases() -> Vec<CorpusCase> {
    use Check::*;
    vec![
        // Programs.
        case("incr", "let box u = incr in handle u with handlerSt init 0", Output("ret (0, 1)")),
        case("incr_n", "let box u = incr_n 2 in handle u with handlerSt init 0", Output("ret (0, 2)")),
        case("simple", "let box u = box {}. ret 42 in handle u with simple init 5", Output("ret (42, 5)")),
        case("simple_ret7", "let box u = box {}. ret 42 in handle u with simple7 init 5", Output("ret 7")),
        case("simple_star_ret", "let box u = box Op. ret 42 in handle u with simpleStar init 5", Output("ret (42, 5)")),
        case("simple_star", "let box u = opopop in handle u with simpleStar init 5", Output("ret (3, 17)")),
        case("simple_dagger_opopop", "let box u = opopop in handle u with simpleDagger init 5", Output("ret (3, 17)")),
        case("simple_dagger", "let box u = opstopop in handle u with simpleDagger init 5", Output("ret (42, 9)")),
        case("count", "let box u = opstopop in handle u with handlerCount init ()", Output("ret (2, 1)")),
        case("nondet", "let box u = nondet in handle u with handlerNDet init ()", Output("ret [4, 5]")),
        case("explode_0_box", "explode 0", Output("box {raise:unit=>bot}. ret 0")),
        case("explode_0", "let box v = explode 0 in handle v with handlerExn init ()", Output("ret 0")),
        case("explode_12", "let box v = explode 12 in handle v with handlerExn init ()", Output("ret 42")),
        case(
            "explode_composition",
            "let box v = box Exn. let box u = incr_n 1 in x <- handle u with handlerExplosiveSt init 12; ret (fst x)
             in handle v with handlerExn init ()",
            Output("ret 42"),
        ),
        case(
            "explode_sequence",
            "let box u = incr_n 1 in
             handle u [handlerExplosiveSt init 12 as x. ret (fst x)] with handlerExn init ()",
            Output("ret 42"),
        ),
        case("safe_div", "let box u = safeDiv 42 2 in handle u with handlerExn init ()", Output("ret 21")),
        case("safe_div_zero", "let box u = safeDiv 42 0 in handle u with handlerExn init ()", Output("ret 42")),
        case("div_from_state", "let box w = divFromState in handle w with handlerStExn init 2", Output("ret 21")),
        case("div_from_state_zero", "let box w = divFromState in handle w with handlerStExn init 0", Output("ret 0")),
        case("eval", "(eval_f (box {}. ret 5))", Output("5")),
        case("ret_bind", "let box u = box {}. x <- ret 5; ret (x + 1) in handle u with simple init 0", Output("ret (6, 0)")),
        case(
            "factorial",
            "let fix fact(n:int):[{}] int = if n = 0 then ret 1 else ret (n * eval_f (fact (n - 1))) in (eval_f (fact 3))",
            Output("6"),
        ),
        // Typing judgments.
        case("typed_get", "box St. get()", Type("[ {get:unit=>int, set:int=>unit} ] int")),
        case(
            "typed_incr_n",
            "fn n:int. box St. x <- get(); y <- set(x + n); ret x",
            Type("int -> [ {get:unit=>int, set:int=>unit} ] int"),
        ),
        case("op_outside_its_box", "box St. ret (box {}. get())", Rejected(TypeErrorKind::OpNotInContext)),
        case("typed_handler_st", "handlerSt", Handler { ambient: "{}", input: "int", state: "int", output: "int * int" }),
        case("typed_handler_exn", "handlerExn", Handler { ambient: "{}", input: "int", state: "unit", output: "int" }),
        case(
            "typed_explosive_handler",
            "handlerExplosiveSt",
            Handler { ambient: "Exn", input: "int", state: "int", output: "int * int" },
        ),
        case(
            "typed_handling_sequence",
            "[handlerExplosiveSt init 12 as x. ret (fst x)]",
            Seq { ambient: "Exn", input: "int", source: "St", output: "int" },
        ),
        case(
            "typed_nested_handle",
            "handle u [handlerExplosiveSt init 12 as x. ret (fst x)] with handlerExn init ()",
            TypeUnder { modals: &[("u", "int", "St")], ty: "int" },
        ),
        case("typed_identity_handler", "id[St]", Handler { ambient: "St + Exn", input: "int", state: "unit", output: "int" }),
        case(
            "typed_identity_lift",
            "fn e:[St] int. let box u = e in box St + Exn. handle u with id[St] init ()",
            Type("[ {get:unit=>int, set:int=>unit} ] int -> [ {get:unit=>int, set:int=>unit, raise:unit=>bot} ] int"),
        ),
        case("typed_pure_box", "fn x:int. box St. ret x", Type("int -> [ {get:unit=>int, set:int=>unit} ] int")),
        case(
            "typed_boxed_application",
            "fn f:[St] (int -> bool). fn x:[St] int. let box u = f in let box v = x in
             box St. a <- handle u with id[St] init (); b <- handle v with id[St] init (); ret (a b)",
            Type(
                "[ {get:unit=>int, set:int=>unit} ] (int -> bool) -> [ {get:unit=>int, set:int=>unit} ] int -> [ {get:unit=>int, set:int=>unit} ] bool",
            ),
        ),
        case(
            "typed_box_flattening",
            "fn x:[St] [St] int. let box u = x in
             box St. a <- handle u with id[St] init (); let box v = a in handle v with id[St] init ()",
            Type("[ {get:unit=>int, set:int=>unit} ] [ {get:unit=>int, set:int=>unit} ] int -> [ {get:unit=>int, set:int=>unit} ] int"),
        ),
        case("incr_type", "incr", Type("[ {get:unit=>int, set:int=>unit} ] int")),
        case("explode_type", "explode", Type("int -> [ {raise:unit=>bot} ] int")),
        case("eval_f_type", "eval_f", Type("[ {} ] int -> int")),
        case("pure42", "(eval_f pure42)", Output("42")),
        case("counted_ops", "let box u = countedOps in eval u", Output("(2, 1)")),
        case("stateful", "let box u = stateful in eval u", Output("(41, 42)")),
        case("fact3", "(eval_f fact3)", Output("6")),
        case("empty_source", "", ParseError),
        case("ret_ret", "ret ret 1", ParseError),
        case("unclosed_box", "box {}.", ParseError),
        case("nondet_type", "let box u = nondet in handle u with handlerNDet init ()", Type("list int")),
    ]
}

/// The prelude's definitions.
pub fn prelude() -> Definitions {
    let file = parse_with(&format!("{PRELUDE}\n()"), &Definitions::new()).expect("prelude parses");
    file.definitions()
}

/// The full source text of a case, prelude included.
pub fn full_source(case: &CorpusCase) -> String {
    format!("{PRELUDE}\n{}\n", case.source)
}

/// The main term of a case whose source is a term.
pub fn term(case: &CorpusCase, defs: &Definitions) -> Result<Term, String> {
    parse_main(case.source, defs).map_err(|d| d.to_string())
}

/// Theories named in the prelude.
pub fn theories(defs: &Definitions) -> Vec<(Name, Theory)> {
    defs.iter()
        .filter_map(|(name, def)| match def {
            crate::surface::Definition::Theory(t) => Some((name.clone(), t.clone())),
            _ => None,
        })
        .collect()
}

/// Closed expressions of boxed type drawn from the prelude and the cases:
/// boxed definitions, boxed-returning functions applied to a few integers,
/// and the values all of these evaluate to.
pub fn boxed_expressions(defs: &Definitions) -> Vec<(String, Expr)> {
    let mut found = Vec::new();
    let mut candidates: Vec<(String, Expr)> = Vec::new();
    for (name, def) in defs {
        if let crate::surface::Definition::Term { expr: Some(e), .. } = def {
            candidates.push((name.clone(), e.clone()));
        }
    }
    for case in cases() {
        if let Ok(Term::Expr(e)) = term(&case, defs) {
            candidates.push((case.name.to_string(), e));
        }
    }
    for (name, e) in candidates {
        match infer_closed(&Term::Expr(e.clone())) {
            Ok(Type::Modal(..)) => push_with_value(&mut found, name, e),
            Ok(Type::Arrow(arg, ret)) if *arg == Type::Int && matches!(*ret, Type::Modal(..)) => {
                for n in [0, 1, 13] {
                    push_with_value(&mut found, format!("{name} {n}"), Expr::app(e.clone(), Expr::Int(n)));
                }
            }
            _ => {}
        }
    }
    found
}

fn push_with_value(found: &mut Vec<(String, Expr)>, name: String, e: Expr) {
    let value = match evaluate(&Term::Expr(e.clone()), DEFAULT_FUEL, false).outcome {
        Outcome::Value(Term::Expr(v)) if v != e => Some(v),
        _ => None,
    };
    found.push((name.clone(), e));
    if let Some(v) = value {
        found.push((format!("{name} (value)"), v));
    }
}

fn parse_ty(text: &str, defs: &Definitions) -> Result<Type, String> {
    parse_type_with(text, defs).map_err(|d| d.to_string())
}

fn parse_th(text: &str, defs: &Definitions) -> Result<Theory, String> {
    parse_theory_with(text, defs).map_err(|d| d.to_string())
}

fn actual(case: &CorpusCase, defs: &Definitions) -> Result<String, String> {
    match &case.check {
        Check::Output(_) => {
            let t = term(case, defs)?;
            infer_closed(&t).map_err(|e| e.to_string())?;
            let trace = evaluate(&t, DEFAULT_FUEL, false);
            Ok(match trace.outcome {
                Outcome::Value(v) => crate::surface::pretty(&v),
                other => other.to_string(),
            })
        }
        Check::Type(_) | Check::Rejected(_) => {
            let t = term(case, defs)?;
            match infer_closed(&t) {
                Ok(ty) => Ok(type_to_string(&ty)),
                Err(e) => Err(e.kind.as_str().to_string()),
            }
        }
        Check::TypeUnder { modals, .. } => {
            let t = term(case, defs)?;
            let mut delta = ModalContext::empty();
            for (u, ty, theory) in modals.iter() {
                delta = delta.with_modal(u, parse_ty(ty, defs)?, parse_th(theory, defs)?);
            }
            infer_term(&delta, &EffectContext::empty(), &t).map(|ty| type_to_string(&ty)).map_err(|e| e.to_string())
        }
        Check::ParseError => match parse_main(case.source, defs) {
            Ok(_) => Ok("parsed".to_string()),
            Err(_) => Err("parse error".to_string()),
        },
        Check::Handler { ambient, input, state, .. } => {
            let h = parse_handler_with(case.source, defs).map_err(|d| d.to_string())?;
            let gamma = parse_th(ambient, defs)?.as_effect_context();
            let sig = check_handler(&ModalContext::empty(), &gamma, &h, &parse_ty(input, defs)?, &parse_ty(state, defs)?)
                .map_err(|e| e.to_string())?;
            Ok(type_to_string(&sig.output))
        }
        Check::Seq { ambient, input, source, .. } => {
            let seq = parse_seq_with(case.source, defs).map_err(|d| d.to_string())?;
            let ty = infer_hseq(
                &ModalContext::empty(),
                &parse_th(ambient, defs)?,
                &seq,
                &parse_ty(input, defs)?,
                &parse_th(source, defs)?,
            )
            .map_err(|e| e.to_string())?;
            Ok(type_to_string(&ty))
        }
    }
}

fn expected(check: &Check, defs: &Definitions) -> String {
    let normalize = |ty: &str| parse_ty(ty, defs).map(|t| type_to_string(&t)).unwrap_or_else(|e| e);
    match check {
        Check::Output(out) => out.to_string(),
        Check::Type(ty) | Check::TypeUnder { ty, .. } => normalize(ty),
        Check::Handler { output, .. } | Check::Seq { output, .. } => normalize(output),
        Check::Rejected(kind) => kind.as_str().to_string(),
        Check::ParseError => "parse error".to_string(),
    }
}

/// Checks one case against the prelude definitions `defs`.
pub fn run_case(case: &CorpusCase, defs: &Definitions) -> CaseReport {
    let expected = expected(&case.check, defs);
    let (passed, actual) = match (actual(case, defs), &case.check) {
        (Ok(_), Check::Rejected(_)) => (false, "accepted".to_string()),
        (Err(kind), Check::Rejected(_)) => (kind == expected, kind),
        (Ok(_), Check::ParseError) => (false, "parsed".to_string()),
        (Err(e), Check::ParseError) => (e == expected, e),
        (Ok(out), _) => (out == expected, out),
        (Err(e), _) => (false, e),
    };
    CaseReport { name: case.name, passed, expected, actual }
}

/// Checks every case.
pub fn run_all() -> Vec<CaseReport> {
    let defs = prelude();
    cases().iter().map(|c| run_case(c, &defs)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_case_passes() {
        let failures: Vec<_> = run_all().into_iter().filter(|r| !r.passed).collect();
        assert!(failures.is_empty(), "{failures:#?}");
    }

    #[test]
    fn case_names_are_unique() {
        let mut names: Vec<_> = cases().iter().map(|c| c.name).collect();
        names.sort();
        names.dedup();
        assert_eq!(names.len(), cases().len());
    }

    #[test]
    fn boxed_expressions_cover_definitions_and_values() {
        let found = boxed_expressions(&prelude());
        let names: Vec<_> = found.iter().map(|(n, _)| n.as_str()).collect();
        assert!(names.contains(&"incr"), "{names:?}");
        assert!(names.contains(&"incr_n 1 (value)"), "{names:?}");
        assert!(names.contains(&"explode 13"), "{names:?}");
    }
}
