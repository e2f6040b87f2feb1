//! Simultaneous capture-avoiding substitution of expressions for value
//! variables, with eager folding of the pure built-in redexes it exposes.

use std::borrow::Cow;

use super::binders::{guard, guard_fix, guard_op_clause, guard_ret_clause, Space};
use crate::eval::is_value_expr;
use crate::syntax::*;

#[derive(Clone)]
pub(crate) struct ValueSubst {
    map: Vec<(Name, Expr)>,
    fv: FreeVars,
}

impl ValueSubst {
    pub(crate) fn new(map: Vec<(Name, Expr)>) -> Self {
        let map: Vec<(Name, Expr)> = map.into_iter().map(|(x, e)| (x, fold_deep(e))).collect();
        let mut fv = FreeVars::default();
        fv.values.extend(map.iter().map(|(x, _)| x.clone()));
        for (_, e) in &map {
            let efv = e.free_vars();
            fv.values.extend(efv.values);
            fv.modals.extend(efv.modals);
            fv.conts.extend(efv.conts);
        }
        ValueSubst { map, fv }
    }

    pub(crate) fn single(e: &Expr, x: &str) -> Self {
        ValueSubst::new(vec![(x.to_string(), e.clone())])
    }

    fn lookup(&self, x: &str) -> Option<&Expr> {
        self.map.iter().rev().find(|(y, _)| y == x).map(|(_, e)| e)
    }

    fn minus(&self, names: &[&Name]) -> Cow<'_, ValueSubst> {
        if !self.map.iter().any(|(y, _)| names.contains(&y)) {
            return Cow::Borrowed(self);
        }
        let map = self.map.iter().filter(|(y, _)| !names.contains(&y)).cloned().collect();
        Cow::Owned(ValueSubst::new(map))
    }

    fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    /// Substitutes under value binder `b` with scope `scope`.
    fn under<T: Rename + Names + Clone>(&self, b: &Name, scope: &T, go: impl FnOnce(&ValueSubst, &T) -> T) -> (Name, T) {
        let inner = self.minus(&[b]);
        if inner.is_empty() {
            return (b.clone(), scope.clone());
        }
        let (b, scope) = guard(Space::Value, b, scope, &inner.fv);
        let out = go(&inner, &scope);
        (b, out)
    }

    pub(crate) fn expr(&self, e: &Expr) -> Expr {
        if self.is_empty() {
            return e.clone();
        }
        match e {
            Expr::Var(x) => self.lookup(x).cloned().unwrap_or_else(|| e.clone()),
            Expr::Lam(x, ty, body) => {
                let (x, body) = self.under(x, body.as_ref(), |s, b| s.expr(b));
                Expr::Lam(x, ty.clone(), Box::new(body))
            }
            Expr::App(f, a) => Expr::app(self.expr(f), self.expr(a)),
            Expr::Box(theory, c) => Expr::boxed(theory.clone(), self.comp(c)),
            Expr::LetBox(u, bound, body) => {
                let (u, body) = guard(Space::Modal, u, body.as_ref(), &self.fv);
                Expr::let_box(u, self.expr(bound), self.expr(&body))
            }
            Expr::Eval(seq, u) => Expr::Eval(self.seq(seq), u.clone()),
            Expr::Fix(def, scope) => {
                let (def, scope) = self.fix(def, scope.as_ref(), |s, t| s.expr(t));
                Expr::Fix(Box::new(def), Box::new(scope))
            }
            Expr::Int(_) | Expr::Bool(_) | Expr::Unit | Expr::Nil(_) => e.clone(),
            Expr::Pair(a, b) => Expr::pair(self.expr(a), self.expr(b)),
            Expr::Fst(p) => fold(Expr::Fst(Box::new(self.expr(p)))),
            Expr::Snd(p) => fold(Expr::Snd(Box::new(self.expr(p)))),
            Expr::List(items) => Expr::List(items.iter().map(|i| self.expr(i)).collect()),
            Expr::Append(a, b) => fold(Expr::Append(Box::new(self.expr(a)), Box::new(self.expr(b)))),
            Expr::Arith(op, a, b) => fold(Expr::arith(*op, self.expr(a), self.expr(b))),
            Expr::Cmp(op, a, b) => fold(Expr::cmp(*op, self.expr(a), self.expr(b))),
            Expr::If(c, t, f) => fold(Expr::if_(self.expr(c), self.expr(t), self.expr(f))),
        }
    }

    fn fix<T: Rename + Names + Clone>(&self, def: &FixDef, scope: &T, go: impl Fn(&ValueSubst, &T) -> T) -> (FixDef, T) {
        // The function name scopes over both parts, the parameter over the
        // body alone.
        let outer = self.minus(&[&def.name]);
        let outer = outer.as_ref();
        if outer.is_empty() {
            return (def.clone(), scope.clone());
        }
        let (mut def, scope) = guard_fix(def, scope, &outer.fv);
        let scope = go(outer, &scope);
        let (param, body) = outer.under(&def.param, &def.body, |s, b| s.comp(b));
        def.param = param;
        def.body = body;
        (def, scope)
    }

    pub(crate) fn comp(&self, c: &Comp) -> Comp {
        if self.is_empty() {
            return c.clone();
        }
        match c {
            Comp::Ret(e) => Comp::Ret(self.expr(e)),
            Comp::Bind(s, x, rest) => {
                let s = self.stmt(s);
                let (x, rest) = self.under(x, rest.as_ref(), |sub, r| sub.comp(r));
                Comp::Bind(s, x, Box::new(rest))
            }
            Comp::LetBox(u, bound, body) => {
                let (u, body) = guard(Space::Modal, u, body.as_ref(), &self.fv);
                Comp::let_box(u, self.expr(bound), self.comp(&body))
            }
            Comp::Fix(def, scope) => {
                let (def, scope) = self.fix(def, scope.as_ref(), |s, t| s.comp(t));
                Comp::Fix(Box::new(def), Box::new(scope))
            }
            Comp::If(cond, t, f) => fold_comp(Comp::if_(self.expr(cond), self.comp(t), self.comp(f))),
        }
    }

    pub(crate) fn stmt(&self, s: &Stmt) -> Stmt {
        match s {
            Stmt::Op(op, e) => Stmt::Op(op.clone(), self.expr(e)),
            Stmt::Cont(k, a, b) => Stmt::Cont(k.clone(), self.expr(a), self.expr(b)),
            Stmt::Handle(u, seq, h, init) => {
                Stmt::Handle(u.clone(), self.seq(seq), Box::new(self.handler(h)), self.expr(init))
            }
        }
    }

    pub(crate) fn handler(&self, h: &Handler) -> Handler {
        if self.is_empty() {
            return h.clone();
        }
        let clauses = h
            .clauses
            .iter()
            .map(|clause| {
                let inner = self.minus(&[&clause.x, &clause.z]);
                if inner.is_empty() {
                    return clause.clone();
                }
                let clause = guard_op_clause(clause, &inner.fv);
                OpClause { body: inner.comp(&clause.body), ..clause }
            })
            .collect();
        let inner = self.minus(&[&h.ret.x, &h.ret.z]);
        let ret = if inner.is_empty() {
            h.ret.clone()
        } else {
            let clause = guard_ret_clause(&h.ret, &inner.fv);
            RetClause { body: inner.comp(&clause.body), ..clause }
        };
        Handler { theory: h.theory.clone(), clauses, ret }
    }

    pub(crate) fn seq(&self, seq: &HandlingSeq) -> HandlingSeq {
        if self.is_empty() {
            return seq.clone();
        }
        let clauses = seq
            .clauses
            .iter()
            .map(|clause| {
                let (x, cont) = self.under(&clause.x, &clause.cont, |s, c| s.comp(c));
                SeqClause { handler: self.handler(&clause.handler), init: self.expr(&clause.init), x, cont }
            })
            .collect();
        HandlingSeq { clauses }
    }
}

fn literal_eq(a: &Expr, b: &Expr) -> Option<bool> {
    match (a, b) {
        (Expr::Int(x), Expr::Int(y)) => Some(x == y),
        (Expr::Bool(x), Expr::Bool(y)) => Some(x == y),
        (Expr::Unit, Expr::Unit) => Some(true),
        (Expr::Pair(a1, a2), Expr::Pair(b1, b2)) => Some(literal_eq(a1, b1)? && literal_eq(a2, b2)?),
        (Expr::Nil(_), Expr::Nil(_)) => Some(true),
        (Expr::Nil(_), Expr::List(_)) | (Expr::List(_), Expr::Nil(_)) => Some(false),
        (Expr::List(xs), Expr::List(ys)) => {
            if xs.len() != ys.len() {
                return Some(false);
            }
            let mut all = true;
            for (x, y) in xs.iter().zip(ys) {
                all &= literal_eq(x, y)?;
            }
            Some(all)
        }
        _ => None,
    }
}

/// Equality of two closed values, `None` if either is not a literal.
pub fn value_eq(a: &Expr, b: &Expr) -> Option<bool> {
    literal_eq(a, b)
}

/// Concatenation of two list values.
pub fn append_values(a: &Expr, b: &Expr) -> Option<Expr> {
    match (a, b) {
        (Expr::Nil(_), other) | (other, Expr::Nil(_)) if matches!(other, Expr::List(_) | Expr::Nil(_)) => {
            Some(other.clone())
        }
        (Expr::List(xs), Expr::List(ys)) => Some(Expr::List(xs.iter().chain(ys).cloned().collect())),
        _ => None,
    }
}

/// Reduces a pure built-in redex at the root of `e` whose operands are
/// literal values; anything else, including division by zero and
/// overflow, is left alone.
pub fn fold(e: Expr) -> Expr {
    match &e {
        Expr::Arith(op, a, b) => match (a.as_ref(), b.as_ref()) {
            (Expr::Int(x), Expr::Int(y)) => op.apply(*x, *y).map(Expr::Int).unwrap_or(e),
            _ => e,
        },
        Expr::Cmp(CmpOp::Lt, a, b) => match (a.as_ref(), b.as_ref()) {
            (Expr::Int(x), Expr::Int(y)) => Expr::Bool(x < y),
            _ => e,
        },
        Expr::Cmp(CmpOp::Eq, a, b) => literal_eq(a, b).map(Expr::Bool).unwrap_or(e),
        Expr::Fst(p) | Expr::Snd(p) => match p.as_ref() {
            Expr::Pair(a, b) if is_value_expr(a) && is_value_expr(b) => {
                if matches!(e, Expr::Fst(_)) {
                    (**a).clone()
                } else {
                    (**b).clone()
                }
            }
            _ => e,
        },
        Expr::Append(a, b) if is_value_expr(a) && is_value_expr(b) => append_values(a, b).unwrap_or(e),
        Expr::If(c, t, f) => match c.as_ref() {
            Expr::Bool(true) => (**t).clone(),
            Expr::Bool(false) => (**f).clone(),
            _ => e,
        },
        _ => e,
    }
}

/// [`fold`] applied bottom-up through the pure structure of `e`, without
/// entering binders.
pub fn fold_deep(e: Expr) -> Expr {
    let deep = |e: Box<Expr>| Box::new(fold_deep(*e));
    let e = match e {
        Expr::Pair(a, b) => Expr::Pair(deep(a), deep(b)),
        Expr::Fst(p) => Expr::Fst(deep(p)),
        Expr::Snd(p) => Expr::Snd(deep(p)),
        Expr::List(items) => Expr::List(items.into_iter().map(fold_deep).collect()),
        Expr::Append(a, b) => Expr::Append(deep(a), deep(b)),
        Expr::Arith(op, a, b) => Expr::Arith(op, deep(a), deep(b)),
        Expr::Cmp(op, a, b) => Expr::Cmp(op, deep(a), deep(b)),
        Expr::If(c, t, f) => Expr::If(deep(c), deep(t), deep(f)),
        other => other,
    };
    fold(e)
}

pub fn fold_comp(c: Comp) -> Comp {
    match c {
        Comp::If(Expr::Bool(b), t, f) => {
            if b {
                *t
            } else {
                *f
            }
        }
        other => other,
    }
}
