use super::*;
use crate::corpus::prelude;
use crate::surface::{parse_expr, parse_handler_with, parse_main, parse_seq_with, Definitions};
use crate::typeck::infer_closed;

fn defs() -> Definitions {
    prelude()
}

fn comp(text: &str) -> Comp {
    match parse_main(text, &defs()).unwrap() {
        Term::Comp(c) => c,
        other => panic!("not a computation: {other}"),
    }
}

fn expr(text: &str) -> Expr {
    match parse_main(text, &defs()).unwrap() {
        Term::Expr(e) => e,
        other => panic!("not an expression: {other}"),
    }
}

fn handler(text: &str) -> Handler {
    parse_handler_with(text, &defs()).unwrap()
}

fn boxed_body(name: &str) -> Comp {
    let value = match crate::eval::evaluate(&Term::Expr(expr(&format!("({name})"))), 1000, false).outcome {
        crate::eval::Outcome::Value(Term::Expr(v)) => v,
        other => panic!("no value: {other}"),
    };
    match value {
        Expr::Box(_, c) => *c,
        other => panic!("not a box: {other}"),
    }
}

fn assert_alpha(found: &Comp, expected: &str) {
    let expected = comp(expected);
    assert!(found.alpha_eq(&expected), "found {found}, expected {expected}");
}

#[test]
fn value_substitution() {
    assert_alpha(&subst_comp(&Expr::Int(5), "x", &comp("ret x")), "ret 5");
    let pair = parse_expr("(0, 0 + 1)").unwrap();
    assert_eq!(subst_comp(&pair, "x1", &comp("ret x1")).to_string(), "ret (0, 1)");
    let id = parse_expr("fn x:int. x").unwrap();
    assert_eq!(subst_expr(&Expr::Int(5), "x", &id), id);
}

#[test]
fn value_substitution_avoids_capture() {
    let target = parse_expr("fn y:int. x + y").unwrap();
    let out = subst_expr(&Expr::var("y"), "x", &target);
    assert!(out.alpha_eq(&parse_expr("fn w:int. y + w").unwrap()), "{out}");
    assert!(out.free_vars().values.contains("y"));
}

#[test]
fn folding_leaves_runtime_errors_alone() {
    let out = subst_expr(&Expr::Int(0), "x", &parse_expr("1 / x").unwrap());
    assert_eq!(out, parse_expr("1 / 0").unwrap());
    let out = subst_expr(&Expr::Bool(true), "b", &parse_expr("if b then 1 else 2").unwrap());
    assert_eq!(out, Expr::Int(1));
}

#[test]
fn monadic_substitution() {
    let mut engine = Engine::default();
    let out = engine.subst_monadic(&comp("ret (0, 1)"), "x1", &comp("ret x1")).unwrap();
    assert_alpha(&out, "ret (0, 1)");
    let out = engine.subst_monadic(&comp("y <- op(); ret y"), "x", &comp("ret (x + 1)")).unwrap();
    assert_alpha(&out, "y <- op(); ret (y + 1)");
    let out = engine.subst_monadic(&comp("let box u = box {}. ret 0 in ret 1"), "x", &comp("ret (x, x)")).unwrap();
    assert_alpha(&out, "let box u = box {}. ret 0 in ret (1, 1)");
}

#[test]
fn monadic_substitution_avoids_capture() {
    let mut engine = Engine::default();
    let out = engine.subst_monadic(&comp("y <- op(); ret y"), "x", &comp("ret (x + y)")).unwrap();
    match &out {
        Comp::Bind(_, y, rest) => {
            assert_ne!(y, "y");
            assert_eq!(**rest, Comp::ret(Expr::arith(ArithOp::Add, Expr::var(y.clone()), Expr::var("y"))));
        }
        other => panic!("unexpected {other}"),
    }
}

#[test]
fn continuation_substitution() {
    let mut engine = Engine::default();
    let body = comp("ret (y, x)");
    let out = engine.subst_cont(&comp("z <- k(1; 2); ret z"), "x", "y", &body, "k").unwrap();
    assert_alpha(&out, "ret (2, 1)");
    let out = engine.subst_cont(&comp("ret 7"), "x", "y", &body, "k").unwrap();
    assert_alpha(&out, "ret 7");
    let body = comp("ret (y, y + 1)");
    let out = engine.subst_cont(&comp("x1 <- k(0; 0); ret x1"), "y", "z1", &body, "k").unwrap();
    assert_alpha(&out, "ret (0, 1)");
}

#[test]
fn continuation_substitution_reaches_nested_handlers() {
    let mut engine = Engine::default();
    let target = comp(
        "x <- handle u with handler for {op:unit=>int} { op(a; j; s) -> k(1; 2), return(a; s) -> k(a; s) } init 0; ret x",
    );
    let out = engine.subst_cont(&target, "x", "y", &comp("ret (x + y)"), "k").unwrap();
    let text = out.to_string();
    assert!(!text.contains("k("), "{text}");
}

#[test]
fn handling_examples() {
    let mut engine = Engine::default();
    let out = engine.handle_with(&boxed_body("incr"), &handler("handlerSt"), &Expr::Int(0)).unwrap();
    assert_alpha(&out, "ret (0, 1)");
    let out = engine.handle_with(&comp("ret 42"), &handler("simple"), &Expr::Int(5)).unwrap();
    assert_alpha(&out, "ret (42, 5)");
    let out = engine.handle_with(&boxed_body("opopop"), &handler("simpleStar"), &Expr::Int(5)).unwrap();
    assert_alpha(&out, "ret (3, 17)");
    let out = engine.handle_with(&boxed_body("opstopop"), &handler("simpleDagger"), &Expr::Int(5)).unwrap();
    assert_alpha(&out, "ret (42, 9)");
}

#[test]
fn handling_an_open_computation() {
    let mut engine = Engine::default();
    let c = comp("w <- set(y + 1); ret y");
    let out = engine.handle_with(&c, &handler("handlerSt"), &Expr::var("z1")).unwrap();
    assert_alpha(&out, "ret (y, y + 1)");
}

#[test]
fn handling_absorbs_nested_handles() {
    let mut engine = Engine::default();
    let c = comp("x <- handle u with handlerExplosiveSt init 12; ret (fst x)");
    let out = engine.handle_with(&c, &handler("handlerExn"), &Expr::Unit).unwrap();
    match &out {
        Comp::Bind(Stmt::Handle(u, seq, h, init), x, rest) => {
            assert_eq!(u, "u");
            assert_eq!(seq.clauses.len(), 1);
            assert_eq!(seq.clauses[0].init, Expr::Int(12));
            assert_eq!(**h, handler("handlerExn"));
            assert_eq!(*init, Expr::Unit);
            assert_eq!(**rest, Comp::ret(Expr::var(x.clone())));
        }
        other => panic!("unexpected {other}"),
    }
}

#[test]
fn missing_clause_is_reported() {
    let mut engine = Engine::default();
    let err = engine.handle_with(&comp("op()"), &handler("simple"), &Expr::Int(0)).unwrap_err();
    assert_eq!(err, SubstError::MissingClause("op".into()));
}

#[test]
fn fuel_runs_out() {
    let mut engine = Engine::new(2);
    let err = engine.handle_with(&boxed_body("opopop"), &handler("simpleStar"), &Expr::Int(5)).unwrap_err();
    assert_eq!(err, SubstError::FuelExhausted);
}

#[test]
fn handling_sequences() {
    let mut engine = Engine::default();
    let c = boxed_body("incr");
    assert_eq!(engine.handle_seq(&c, &HandlingSeq::empty()).unwrap(), c);
    let seq = parse_seq_with("[handlerExplosiveSt init 0 as x. ret (fst x)]", &defs()).unwrap();
    assert_alpha(&engine.handle_seq(&boxed_body("incr_n 1"), &seq).unwrap(), "ret 0");
    let seq = parse_seq_with("[handlerExplosiveSt init 12 as x. ret (fst x)]", &defs()).unwrap();
    let out = engine.handle_seq(&boxed_body("incr_n 1"), &seq).unwrap();
    assert!(matches!(&out, Comp::Bind(Stmt::Op(op, _), _, _) if op == "raise"), "{out}");
}

#[test]
fn modal_substitution() {
    let mut engine = Engine::default();
    let target = comp("x1 <- handle u with handlerSt init 0; ret x1");
    let out = engine.modal_subst_comp(&boxed_body("incr"), "u", &target).unwrap();
    assert_alpha(&out, "ret (0, 1)");
    let untouched = comp("x1 <- handle v with handlerSt init 0; ret x1");
    assert_eq!(engine.modal_subst_comp(&boxed_body("incr"), "u", &untouched).unwrap(), untouched);
    let out = engine.modal_subst_expr(&comp("ret 5"), "u", &Expr::Eval(HandlingSeq::empty(), "u".into())).unwrap();
    assert_eq!(out, Expr::Int(5));
}

#[test]
fn modal_substitution_stops_at_shadowing() {
    let mut engine = Engine::default();
    let target = expr("let box u = box {}. ret 1 in eval u");
    assert_eq!(engine.modal_subst_expr(&comp("ret 5"), "u", &target).unwrap(), target);
}

#[test]
fn eval_meta_cases() {
    let mut engine = Engine::default();
    assert_eq!(engine.eval_meta(&comp("ret 5")).unwrap(), Expr::Int(5));
    let c = comp("x <- handle u with simple init 0; ret (fst x)");
    match engine.eval_meta(&c).unwrap() {
        Expr::Eval(seq, u) => {
            assert_eq!(u, "u");
            assert_eq!(seq.clauses.len(), 1);
            assert_eq!(seq.clauses[0].cont, comp("ret (fst x)"));
        }
        other => panic!("unexpected {other}"),
    }
    let c = comp("let box u = box {}. ret 0 in ret 1");
    assert_eq!(engine.eval_meta(&c).unwrap(), expr("let box u = box {}. ret 0 in 1"));
    assert!(matches!(engine.eval_meta(&comp("op()")), Err(SubstError::IllFormed(_))));
}

#[test]
fn identity_handler_and_eta() {
    let id = id_handler(&Theory::empty());
    assert_eq!(id, handler("handler for {} { return(x; z) -> ret x }"));
    let e = expr("box {}. ret 42");
    let eta = eta_expand(&e, &Theory::empty());
    assert_eq!(infer_closed(&Term::Expr(eta.clone())).unwrap(), Type::modal(Theory::empty(), Type::Int));
    let run = Term::Expr(Expr::let_box("w", eta, Expr::Eval(HandlingSeq::empty(), "w".into())));
    let trace = crate::eval::evaluate(&run, 100, false);
    assert_eq!(trace.outcome, crate::eval::Outcome::Value(Term::Expr(Expr::Int(42))));
}

#[test]
fn renamed_binders_avoid_the_substituted_names() {
    let mut engine = Engine::default();
    let target = comp("x <- k(x; z); ret 6");
    let body = comp("z <- op(); if z then ret z else ret false");
    let out = engine.subst_cont(&target, "x", "z1", &body, "k").unwrap();
    assert_alpha(&out, "w <- op(); if w then ret 6 else ret 6");
}

#[test]
fn repeated_clause_binders_take_the_innermost() {
    let mut engine = Engine::default();
    let h = handler("handler for {} { return(x; x) -> ret x }");
    let out = engine.handle_with(&comp("ret 1"), &h, &Expr::Int(2)).unwrap();
    assert_alpha(&out, "ret 2");
    let h = handler("handler for {op:int=>int} { op(x; k; x) -> k(x; x), return(x; z) -> ret (x, z) }");
    let out = engine.handle_with(&comp("y <- op(1); ret y"), &h, &Expr::Int(2)).unwrap();
    assert_alpha(&out, "ret (2, 2)");
}

#[test]
fn continuation_binder_avoids_handler_variables() {
    let mut engine = Engine::default();
    let h = handler("handler for {op:unit=>int} { op(a; k; s) -> k(5; s), return(r; s) -> ret (r, z) }");
    let out = engine.handle_with(&comp("z <- op(); ret z"), &h, &Expr::Int(0)).unwrap();
    assert_alpha(&out, "ret (5, z)");
}
