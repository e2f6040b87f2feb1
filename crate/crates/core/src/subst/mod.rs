//! The substitution engine: value substitution plus the subsidiary
//! operations that reduction is defined in terms of.
//!
//! Every operation is capture-avoiding. A binder is renamed only when it
//! would capture a free variable of the term being substituted in, so
//! results stay close to their inputs and remain readable in traces.

mod binders;
mod handling;
mod modal;
mod value;

#[cfg(test)]
mod tests;

use thiserror::Error;

use crate::syntax::*;

pub use crate::surface::desugar::id_handler;
pub use value::{append_values, fold, fold_comp, fold_deep, value_eq};

use modal::ModalSubst;
use value::ValueSubst;

pub const DEFAULT_FUEL: u64 = 1_000_000;

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum SubstError {
    #[error("substitution fuel exhausted")]
    FuelExhausted,
    #[error("handler has no clause for operation `{0}`")]
    MissingClause(Name),
    #[error("ill-formed input: {0}")]
    IllFormed(String),
}

pub type SResult<T> = Result<T, SubstError>;

/// Carries the fuel shared by one run of the subsidiary operations; every
/// recursive call spends one unit.
#[derive(Clone, Debug)]
pub struct Engine {
    pub fuel: u64,
}

impl Default for Engine {
    fn default() -> Self {
        Engine { fuel: DEFAULT_FUEL }
    }
}

impl Engine {
    pub fn new(fuel: u64) -> Self {
        Engine { fuel }
    }

    pub(crate) fn tick(&mut self) -> SResult<()> {
        if self.fuel == 0 {
            return Err(SubstError::FuelExhausted);
        }
        self.fuel -= 1;
        Ok(())
    }

    /// `[[Ψ.body/u]]e`.
    pub fn modal_subst_expr(&mut self, body: &Comp, u: &str, e: &Expr) -> SResult<Expr> {
        ModalSubst::new(u, body).expr(self, e)
    }

    /// `[[Ψ.body/u]]c`.
    pub fn modal_subst_comp(&mut self, body: &Comp, u: &str, c: &Comp) -> SResult<Comp> {
        ModalSubst::new(u, body).comp(self, c)
    }

    pub fn modal_subst_handler(&mut self, body: &Comp, u: &str, h: &Handler) -> SResult<Handler> {
        ModalSubst::new(u, body).handler(self, h)
    }

    pub fn modal_subst_seq(&mut self, body: &Comp, u: &str, seq: &HandlingSeq) -> SResult<HandlingSeq> {
        ModalSubst::new(u, body).seq(self, seq)
    }

    pub fn modal_subst_term(&mut self, body: &Comp, u: &str, t: &Term) -> SResult<Term> {
        let s = ModalSubst::new(u, body);
        Ok(match t {
            Term::Expr(e) => Term::Expr(s.expr(self, e)?),
            Term::Comp(c) => Term::Comp(s.comp(self, c)?),
            Term::Stmt(st) => {
                let c = s.comp(self, &Comp::bind(st.clone(), "x", Comp::ret(Expr::var("x"))))?;
                match c {
                    Comp::Bind(st, _, _) => Term::Stmt(st),
                    other => Term::Comp(other),
                }
            }
            Term::Handler(h) => Term::Handler(s.handler(self, h)?),
            Term::Seq(seq) => Term::Seq(s.seq(self, seq)?),
        })
    }
}

/// `[e/x]target` on expressions.
pub fn subst_expr(e: &Expr, x: &str, target: &Expr) -> Expr {
    ValueSubst::single(e, x).expr(target)
}

/// `[e/x]target` on computations.
pub fn subst_comp(e: &Expr, x: &str, target: &Comp) -> Comp {
    ValueSubst::single(e, x).comp(target)
}

/// Simultaneous substitution `[e1/x1, ..., en/xn]target`; when a name
/// repeats, its last entry wins.
pub fn subst_many(map: Vec<(Name, Expr)>, target: &Comp) -> Comp {
    ValueSubst::new(map).comp(target)
}

pub fn subst_term(e: &Expr, x: &str, target: &Term) -> Term {
    let s = ValueSubst::single(e, x);
    match target {
        Term::Expr(t) => Term::Expr(s.expr(t)),
        Term::Comp(t) => Term::Comp(s.comp(t)),
        Term::Stmt(t) => Term::Stmt(s.stmt(t)),
        Term::Handler(t) => Term::Handler(s.handler(t)),
        Term::Seq(t) => Term::Seq(s.seq(t)),
    }
}

/// `let box u = e in box Ψ. x <- handle u with id[Ψ] init (); ret x`, with
/// `u` fresh.
pub fn eta_expand(e: &Expr, theory: &Theory) -> Expr {
    let u = fresh_name("u", &all_names(e));
    let handle = Stmt::Handle(u.clone(), HandlingSeq::empty(), Box::new(id_handler(theory)), Expr::Unit);
    let body = Comp::bind(handle, "x", Comp::ret(Expr::var("x")));
    Expr::let_box(u, e.clone(), Expr::boxed(theory.clone(), body))
}
