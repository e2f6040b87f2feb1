//! Monadic and continuation substitution, handling, handling sequencing
//! and the eval meta-operation.

use super::binders::{fresh_binder, guard, guard_fix, guard_op_clause, guard_ret_clause, Space};
use super::value::{fold, ValueSubst};
use super::{Engine, SResult, SubstError};
use crate::syntax::*;

fn payload_fv(c: &Comp, bound: &[&str]) -> FreeVars {
    let mut fv = c.free_vars();
    for b in bound {
        fv.values.remove(*b);
    }
    fv
}

impl Engine {
    /// `⟨⟨c/x⟩⟩cont`: runs `c`, then `cont` with `x` bound to its result.
    pub fn subst_monadic(&mut self, c: &Comp, x: &str, cont: &Comp) -> SResult<Comp> {
        let fv = payload_fv(cont, &[x]);
        self.monadic(c, x, cont, &fv)
    }

    fn monadic(&mut self, c: &Comp, x: &str, cont: &Comp, fv: &FreeVars) -> SResult<Comp> {
        self.tick()?;
        Ok(match c {
            Comp::Ret(e) => ValueSubst::single(e, x).comp(cont),
            Comp::Bind(s, y, rest) => {
                let (y, rest) = guard(Space::Value, y, rest.as_ref(), fv);
                Comp::bind(s.clone(), y, self.monadic(&rest, x, cont, fv)?)
            }
            Comp::LetBox(u, e, body) => {
                let (u, body) = guard(Space::Modal, u, body.as_ref(), fv);
                Comp::let_box(u, e.clone(), self.monadic(&body, x, cont, fv)?)
            }
            Comp::Fix(def, scope) => {
                let (def, scope) = guard_fix(def, scope.as_ref(), fv);
                Comp::Fix(Box::new(def), Box::new(self.monadic(&scope, x, cont, fv)?))
            }
            Comp::If(cond, t, f) => {
                Comp::if_(cond.clone(), self.monadic(t, x, cont, fv)?, self.monadic(f, x, cont, fv)?)
            }
        })
    }

    /// `⟪(x,y).body/k⟫target`: replaces each call `k(e1; e2)` in `target`
    /// by `body` with `e1` for `x` and `e2` for `y`.
    pub fn subst_cont(&mut self, target: &Comp, x: &str, y: &str, body: &Comp, k: &str) -> SResult<Comp> {
        let mut fv = payload_fv(body, &[x, y]);
        fv.conts.insert(k.to_string());
        let cs = ContSubst { x, y, body, k, fv: &fv };
        cs.comp(self, target)
    }

    /// Continuation substitution into the clauses of a handler.
    pub fn subst_cont_handler(&mut self, h: &Handler, x: &str, y: &str, body: &Comp, k: &str) -> SResult<Handler> {
        let mut fv = payload_fv(body, &[x, y]);
        fv.conts.insert(k.to_string());
        let cs = ContSubst { x, y, body, k, fv: &fv };
        cs.handler(self, h)
    }

    /// Handles `c` with `h` from state `state`.
    pub fn handle_with(&mut self, c: &Comp, h: &Handler, state: &Expr) -> SResult<Comp> {
        let mut fv = h.free_vars();
        let sfv = state.free_vars();
        fv.values.extend(sfv.values);
        fv.modals.extend(sfv.modals);
        fv.conts.extend(sfv.conts);
        self.handle(c, h, state, &fv)
    }

    fn handle(&mut self, c: &Comp, h: &Handler, state: &Expr, fv: &FreeVars) -> SResult<Comp> {
        self.tick()?;
        match c {
            Comp::Ret(v) => {
                let ret = &h.ret;
                Ok(ValueSubst::new(vec![(ret.x.clone(), v.clone()), (ret.z.clone(), state.clone())]).comp(&ret.body))
            }
            Comp::Bind(Stmt::Op(op, arg), y, rest) => {
                let clause = h.clause(op).ok_or_else(|| SubstError::MissingClause(op.clone()))?;
                let (y, rest) = guard(Space::Value, y, rest.as_ref(), fv);
                let z = fresh_binder("z", fv, &[&rest, &Expr::var(y.clone())]);
                let handled_rest = self.handle(&rest, h, &Expr::var(z.clone()), fv)?;
                let instance =
                    ValueSubst::new(vec![(clause.x.clone(), arg.clone()), (clause.z.clone(), state.clone())])
                        .comp(&clause.body);
                self.subst_cont(&instance, &y, &z, &handled_rest, &clause.k)
            }
            Comp::Bind(Stmt::Cont(k, _, _), _, _) => {
                Err(SubstError::IllFormed(format!("continuation `{k}` called inside a handled computation")))
            }
            Comp::Bind(Stmt::Handle(u, seq, inner, init), x, rest) => {
                let pending = SeqClause { handler: (**inner).clone(), init: init.clone(), x: x.clone(), cont: (**rest).clone() };
                let handle = Stmt::Handle(u.clone(), seq.extended(pending), Box::new(h.clone()), state.clone());
                Ok(Comp::bind(handle, "x", Comp::ret(Expr::var("x"))))
            }
            Comp::LetBox(u, e, body) => {
                let (u, body) = guard(Space::Modal, u, body.as_ref(), fv);
                Ok(Comp::let_box(u, e.clone(), self.handle(&body, h, state, fv)?))
            }
            Comp::Fix(def, scope) => {
                let (def, scope) = guard_fix(def, scope.as_ref(), fv);
                Ok(Comp::Fix(Box::new(def), Box::new(self.handle(&scope, h, state, fv)?)))
            }
            Comp::If(cond, t, f) => {
                Ok(Comp::if_(cond.clone(), self.handle(t, h, state, fv)?, self.handle(f, h, state, fv)?))
            }
        }
    }

    /// Applies a handling sequence to `c`, first clause first.
    pub fn handle_seq(&mut self, c: &Comp, seq: &HandlingSeq) -> SResult<Comp> {
        let mut out = c.clone();
        for clause in &seq.clauses {
            self.tick()?;
            let handled = self.handle_with(&out, &clause.handler, &clause.init)?;
            out = self.subst_monadic(&handled, &clause.x, &clause.cont)?;
        }
        Ok(out)
    }

    /// `⦅c⦆`: turns a computation over the empty theory into an expression.
    pub fn eval_meta(&mut self, c: &Comp) -> SResult<Expr> {
        self.tick()?;
        Ok(match c {
            Comp::Ret(e) => e.clone(),
            Comp::Bind(Stmt::Handle(u, seq, h, init), x, rest) => {
                let pending = SeqClause { handler: (**h).clone(), init: init.clone(), x: x.clone(), cont: (**rest).clone() };
                Expr::Eval(seq.extended(pending), u.clone())
            }
            Comp::Bind(s, _, _) => {
                return Err(SubstError::IllFormed(format!("`{s}` cannot be evaluated in the empty theory")))
            }
            Comp::LetBox(u, e, body) => Expr::let_box(u.clone(), e.clone(), self.eval_meta(body)?),
            Comp::Fix(def, scope) => Expr::Fix(def.clone(), Box::new(self.eval_meta(scope)?)),
            Comp::If(cond, t, f) => fold(Expr::if_(cond.clone(), self.eval_meta(t)?, self.eval_meta(f)?)),
        })
    }
}

struct ContSubst<'a> {
    x: &'a str,
    y: &'a str,
    body: &'a Comp,
    k: &'a str,
    fv: &'a FreeVars,
}

impl ContSubst<'_> {
    fn comp(&self, engine: &mut Engine, c: &Comp) -> SResult<Comp> {
        engine.tick()?;
        Ok(match c {
            Comp::Ret(_) => c.clone(),
            Comp::Bind(s, x, rest) => {
                let (x, rest) = guard(Space::Value, x, rest.as_ref(), self.fv);
                let rest = self.comp(engine, &rest)?;
                match s {
                    Stmt::Cont(k, a, b) if k == self.k => {
                        let call = ValueSubst::new(vec![(self.x.to_string(), a.clone()), (self.y.to_string(), b.clone())])
                            .comp(self.body);
                        engine.subst_monadic(&call, &x, &rest)?
                    }
                    Stmt::Handle(u, seq, h, init) => {
                        let h = self.handler(engine, h)?;
                        Comp::bind(Stmt::Handle(u.clone(), seq.clone(), Box::new(h), init.clone()), x, rest)
                    }
                    _ => Comp::bind(s.clone(), x, rest),
                }
            }
            Comp::LetBox(u, e, body) => {
                let (u, body) = guard(Space::Modal, u, body.as_ref(), self.fv);
                Comp::let_box(u, e.clone(), self.comp(engine, &body)?)
            }
            Comp::Fix(def, scope) => {
                let (def, scope) = guard_fix(def, scope.as_ref(), self.fv);
                Comp::Fix(Box::new(def), Box::new(self.comp(engine, &scope)?))
            }
            Comp::If(cond, t, f) => Comp::if_(cond.clone(), self.comp(engine, t)?, self.comp(engine, f)?),
        })
    }

    fn handler(&self, engine: &mut Engine, h: &Handler) -> SResult<Handler> {
        let mut clauses = Vec::with_capacity(h.clauses.len());
        for clause in &h.clauses {
            if clause.k == self.k {
                clauses.push(clause.clone());
                continue;
            }
            let clause = guard_op_clause(clause, self.fv);
            let body = self.comp(engine, &clause.body)?;
            clauses.push(OpClause { body, ..clause });
        }
        let ret = guard_ret_clause(&h.ret, self.fv);
        let ret = RetClause { body: self.comp(engine, &ret.body)?, ..ret };
        Ok(Handler { theory: h.theory.clone(), clauses, ret })
    }
}
