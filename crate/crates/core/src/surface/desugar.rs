//! The syntactic sugar accepted by the parser, as kernel-term builders.
//!
//! The parser applies these while building terms, so every parsed term is
//! already in kernel form and [`desugar`] is the identity on it.

use std::collections::BTreeSet;

use crate::syntax::*;

/// The binder used when a bare statement stands for a computation.
pub const STMT_BINDER: &str = "x";

/// A bare statement `s` in computation position: `x <- s; ret x`.
pub fn stmt_as_comp(s: Stmt) -> Comp {
    Comp::bind(s, STMT_BINDER, Comp::ret(Expr::var(STMT_BINDER)))
}

/// The statement abbreviated by `c`, if `c` has the form `x <- s; ret x`.
pub fn abbreviated_stmt(c: &Comp) -> Option<&Stmt> {
    match c {
        Comp::Bind(s, x, rest) if matches!(rest.as_ref(), Comp::Ret(Expr::Var(y)) if y == x) => Some(s),
        _ => None,
    }
}

/// The identity handler for a theory: every operation is re-invoked with
/// the same argument and its result passed on, state `unit` is threaded
/// through unchanged.
pub fn id_handler(theory: &Theory) -> Handler {
    let clauses = theory
        .ops
        .iter()
        .map(|op| OpClause {
            op: op.name.clone(),
            x: "x".into(),
            k: "k".into(),
            z: "z".into(),
            body: Comp::bind(
                Stmt::Op(op.name.clone(), Expr::var("x")),
                "y",
                Comp::bind(
                    Stmt::Cont("k".into(), Expr::var("y"), Expr::var("z")),
                    "r",
                    Comp::ret(Expr::var("r")),
                ),
            ),
        })
        .collect();
    Handler {
        theory: theory.clone(),
        clauses,
        ret: RetClause { x: "x".into(), z: "z".into(), body: Comp::ret(Expr::var("x")) },
    }
}

/// `x <- ret e; c`, encoded as
/// `let box u = box {}. ret e in x <- handle u with id[{}] init (); c`
/// with `u` fresh for `c`.
pub fn ret_bind(e: Expr, x: impl Into<Name>, c: Comp) -> Comp {
    let mut avoid: BTreeSet<Name> = c.free_vars().modals;
    avoid.extend(all_names(&c));
    let u = fresh_name("u", &avoid);
    let handle = Stmt::Handle(u.clone(), HandlingSeq::empty(), Box::new(id_handler(&Theory::empty())), Expr::Unit);
    Comp::let_box(u, Expr::boxed(Theory::empty(), Comp::ret(e)), Comp::bind(handle, x, c))
}

/// Kernel terms carry no sugar, so desugaring a parsed term returns it
/// unchanged.
pub fn desugar(t: &Term) -> Term {
    t.clone()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bare_statement_round_trips_through_abbreviation() {
        let s = Stmt::Op("get".into(), Expr::Unit);
        let c = stmt_as_comp(s.clone());
        assert_eq!(abbreviated_stmt(&c), Some(&s));
        assert_eq!(abbreviated_stmt(&Comp::ret(Expr::Int(1))), None);
    }

    #[test]
    fn ret_bind_picks_a_fresh_modal_variable() {
        let body = Comp::bind(
            Stmt::Handle("u".into(), HandlingSeq::empty(), Box::new(id_handler(&Theory::empty())), Expr::Unit),
            "r",
            Comp::ret(Expr::var("x")),
        );
        match ret_bind(Expr::Int(5), "x", body) {
            Comp::LetBox(u, _, _) => assert_ne!(u, "u"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn identity_handler_has_one_clause_per_operation() {
        let st = Theory::new(vec![
            OpDecl::new("get", Type::Unit, Type::Int),
            OpDecl::new("set", Type::Int, Type::Unit),
        ]);
        let h = id_handler(&st);
        assert_eq!(h.clauses.len(), 2);
        assert!(h.clause("set").is_some());
    }
}
