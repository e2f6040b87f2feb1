//! Modal substitution `[[Ψ.c/u]]`: replaces a modal variable by a boxed
//! computation, running the handling sequences found at its use sites.

use super::binders::{guard, guard_fix, guard_op_clause, guard_ret_clause, Space};
use super::{Engine, SResult};
use crate::syntax::*;

pub(crate) struct ModalSubst<'a> {
    pub(crate) u: &'a str,
    pub(crate) body: &'a Comp,
    pub(crate) fv: FreeVars,
}

impl<'a> ModalSubst<'a> {
    pub(crate) fn new(u: &'a str, body: &'a Comp) -> Self {
        let mut fv = body.free_vars();
        fv.modals.insert(u.to_string());
        ModalSubst { u, body, fv }
    }

    pub(crate) fn expr(&self, engine: &mut Engine, e: &Expr) -> SResult<Expr> {
        engine.tick()?;
        Ok(match e {
            Expr::Var(_) | Expr::Int(_) | Expr::Bool(_) | Expr::Unit | Expr::Nil(_) => e.clone(),
            Expr::Lam(x, ty, body) => {
                let (x, body) = guard(Space::Value, x, body.as_ref(), &self.fv);
                Expr::lam(x, ty.clone(), self.expr(engine, &body)?)
            }
            Expr::App(f, a) => Expr::app(self.expr(engine, f)?, self.expr(engine, a)?),
            Expr::Box(theory, c) => Expr::boxed(theory.clone(), self.comp(engine, c)?),
            Expr::LetBox(u, bound, body) => {
                let bound = self.expr(engine, bound)?;
                if u == self.u {
                    Expr::let_box(u.clone(), bound, (**body).clone())
                } else {
                    let (u, body) = guard(Space::Modal, u, body.as_ref(), &self.fv);
                    Expr::let_box(u, bound, self.expr(engine, &body)?)
                }
            }
            Expr::Eval(seq, u) => {
                let seq = self.seq(engine, seq)?;
                if u == self.u {
                    let handled = engine.handle_seq(self.body, &seq)?;
                    engine.eval_meta(&handled)?
                } else {
                    Expr::Eval(seq, u.clone())
                }
            }
            Expr::Fix(def, scope) => {
                let (def, scope) = guard_fix(def, scope.as_ref(), &self.fv);
                let body = self.comp(engine, &def.body)?;
                let scope = self.expr(engine, &scope)?;
                Expr::Fix(Box::new(FixDef { body, ..def }), Box::new(scope))
            }
            Expr::Pair(a, b) => Expr::pair(self.expr(engine, a)?, self.expr(engine, b)?),
            Expr::Fst(p) => Expr::Fst(Box::new(self.expr(engine, p)?)),
            Expr::Snd(p) => Expr::Snd(Box::new(self.expr(engine, p)?)),
            Expr::List(items) => {
                Expr::List(items.iter().map(|i| self.expr(engine, i)).collect::<SResult<Vec<_>>>()?)
            }
            Expr::Append(a, b) => Expr::Append(Box::new(self.expr(engine, a)?), Box::new(self.expr(engine, b)?)),
            Expr::Arith(op, a, b) => Expr::arith(*op, self.expr(engine, a)?, self.expr(engine, b)?),
            Expr::Cmp(op, a, b) => Expr::cmp(*op, self.expr(engine, a)?, self.expr(engine, b)?),
            Expr::If(c, t, f) => Expr::if_(self.expr(engine, c)?, self.expr(engine, t)?, self.expr(engine, f)?),
        })
    }

    pub(crate) fn comp(&self, engine: &mut Engine, c: &Comp) -> SResult<Comp> {
        engine.tick()?;
        Ok(match c {
            Comp::Ret(e) => Comp::Ret(self.expr(engine, e)?),
            Comp::Bind(Stmt::Handle(u, seq, h, init), x, rest) if u == self.u => {
                let (x, rest) = guard(Space::Value, x, rest.as_ref(), &self.fv);
                let seq = self.seq(engine, seq)?;
                let h = self.handler(engine, h)?;
                let init = self.expr(engine, init)?;
                let rest = self.comp(engine, &rest)?;
                let inner = engine.handle_seq(self.body, &seq)?;
                let handled = engine.handle_with(&inner, &h, &init)?;
                engine.subst_monadic(&handled, &x, &rest)?
            }
            Comp::Bind(s, x, rest) => {
                let s = self.stmt(engine, s)?;
                let (x, rest) = guard(Space::Value, x, rest.as_ref(), &self.fv);
                Comp::bind(s, x, self.comp(engine, &rest)?)
            }
            Comp::LetBox(u, bound, body) => {
                let bound = self.expr(engine, bound)?;
                if u == self.u {
                    Comp::let_box(u.clone(), bound, (**body).clone())
                } else {
                    let (u, body) = guard(Space::Modal, u, body.as_ref(), &self.fv);
                    Comp::let_box(u, bound, self.comp(engine, &body)?)
                }
            }
            Comp::Fix(def, scope) => {
                let (def, scope) = guard_fix(def, scope.as_ref(), &self.fv);
                let body = self.comp(engine, &def.body)?;
                let scope = self.comp(engine, &scope)?;
                Comp::Fix(Box::new(FixDef { body, ..def }), Box::new(scope))
            }
            Comp::If(cond, t, f) => Comp::if_(self.expr(engine, cond)?, self.comp(engine, t)?, self.comp(engine, f)?),
        })
    }

    /// Statements that do not handle `u` itself.
    fn stmt(&self, engine: &mut Engine, s: &Stmt) -> SResult<Stmt> {
        Ok(match s {
            Stmt::Op(op, e) => Stmt::Op(op.clone(), self.expr(engine, e)?),
            Stmt::Cont(k, a, b) => Stmt::Cont(k.clone(), self.expr(engine, a)?, self.expr(engine, b)?),
            Stmt::Handle(u, seq, h, init) => Stmt::Handle(
                u.clone(),
                self.seq(engine, seq)?,
                Box::new(self.handler(engine, h)?),
                self.expr(engine, init)?,
            ),
        })
    }

    pub(crate) fn handler(&self, engine: &mut Engine, h: &Handler) -> SResult<Handler> {
        let mut clauses = Vec::with_capacity(h.clauses.len());
        for clause in &h.clauses {
            let clause = guard_op_clause(clause, &self.fv);
            let body = self.comp(engine, &clause.body)?;
            clauses.push(OpClause { body, ..clause });
        }
        let ret = guard_ret_clause(&h.ret, &self.fv);
        let ret = RetClause { body: self.comp(engine, &ret.body)?, ..ret };
        Ok(Handler { theory: h.theory.clone(), clauses, ret })
    }

    pub(crate) fn seq(&self, engine: &mut Engine, seq: &HandlingSeq) -> SResult<HandlingSeq> {
        let mut clauses = Vec::with_capacity(seq.clauses.len());
        for clause in &seq.clauses {
            let handler = self.handler(engine, &clause.handler)?;
            let init = self.expr(engine, &clause.init)?;
            let (x, cont) = guard(Space::Value, &clause.x, &clause.cont, &self.fv);
            let cont = self.comp(engine, &cont)?;
            clauses.push(SeqClause { handler, init, x, cont });
        }
        Ok(HandlingSeq { clauses })
    }
}
