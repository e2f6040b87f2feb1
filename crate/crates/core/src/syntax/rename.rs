use super::*;

/// Renaming of a free name to another name in one namespace.
///
/// The new name must not occur anywhere in the term; renaming stops at
/// binders that shadow the old name.
pub trait Rename: Sized {
    fn rename_value(&self, old: &str, new: &str) -> Self;
    fn rename_modal(&self, old: &str, new: &str) -> Self;
    fn rename_cont(&self, old: &str, new: &str) -> Self;
}

#[derive(Clone, Copy, PartialEq)]
enum Space {
    Value,
    Modal,
    Cont,
}

struct Renamer<'a> {
    space: Space,
    old: &'a str,
    new: &'a str,
}

impl Renamer<'_> {
    fn shadows(&self, space: Space, binder: &str) -> bool {
        self.space == space && binder == self.old
    }

    fn name(&self, space: Space, n: &Name) -> Name {
        if self.space == space && n == self.old {
            self.new.to_string()
        } else {
            n.clone()
        }
    }

    fn expr(&self, e: &Expr) -> Expr {
        match e {
            Expr::Var(x) => Expr::Var(self.name(Space::Value, x)),
            Expr::Lam(x, ty, body) => {
                if self.shadows(Space::Value, x) {
                    e.clone()
                } else {
                    Expr::Lam(x.clone(), ty.clone(), Box::new(self.expr(body)))
                }
            }
            Expr::App(a, b) => Expr::app(self.expr(a), self.expr(b)),
            Expr::Box(theory, c) => Expr::Box(theory.clone(), Box::new(self.comp(c))),
            Expr::LetBox(u, bound, body) => {
                let body = if self.shadows(Space::Modal, u) { (**body).clone() } else { self.expr(body) };
                Expr::let_box(u.clone(), self.expr(bound), body)
            }
            Expr::Eval(seq, u) => Expr::Eval(self.seq(seq), self.name(Space::Modal, u)),
            Expr::Fix(def, scope) => {
                let scope = if self.shadows(Space::Value, &def.name) { (**scope).clone() } else { self.expr(scope) };
                Expr::Fix(Box::new(self.fix(def)), Box::new(scope))
            }
            Expr::Int(_) | Expr::Bool(_) | Expr::Unit | Expr::Nil(_) => e.clone(),
            Expr::Pair(a, b) => Expr::pair(self.expr(a), self.expr(b)),
            Expr::Fst(a) => Expr::Fst(Box::new(self.expr(a))),
            Expr::Snd(a) => Expr::Snd(Box::new(self.expr(a))),
            Expr::List(items) => Expr::List(items.iter().map(|i| self.expr(i)).collect()),
            Expr::Append(a, b) => Expr::Append(Box::new(self.expr(a)), Box::new(self.expr(b))),
            Expr::Arith(op, a, b) => Expr::arith(*op, self.expr(a), self.expr(b)),
            Expr::Cmp(op, a, b) => Expr::cmp(*op, self.expr(a), self.expr(b)),
            Expr::If(c, t, f) => Expr::if_(self.expr(c), self.expr(t), self.expr(f)),
        }
    }

    fn fix(&self, def: &FixDef) -> FixDef {
        let mut out = def.clone();
        if !self.shadows(Space::Value, &def.name) && !self.shadows(Space::Value, &def.param) {
            out.body = self.comp(&def.body);
        }
        out
    }

    fn comp(&self, c: &Comp) -> Comp {
        match c {
            Comp::Ret(e) => Comp::Ret(self.expr(e)),
            Comp::Bind(s, x, rest) => {
                let rest = if self.shadows(Space::Value, x) { (**rest).clone() } else { self.comp(rest) };
                Comp::bind(self.stmt(s), x.clone(), rest)
            }
            Comp::LetBox(u, bound, body) => {
                let body = if self.shadows(Space::Modal, u) { (**body).clone() } else { self.comp(body) };
                Comp::let_box(u.clone(), self.expr(bound), body)
            }
            Comp::Fix(def, scope) => {
                let scope = if self.shadows(Space::Value, &def.name) { (**scope).clone() } else { self.comp(scope) };
                Comp::Fix(Box::new(self.fix(def)), Box::new(scope))
            }
            Comp::If(cond, t, f) => Comp::if_(self.expr(cond), self.comp(t), self.comp(f)),
        }
    }

    fn stmt(&self, s: &Stmt) -> Stmt {
        match s {
            Stmt::Op(op, e) => Stmt::Op(op.clone(), self.expr(e)),
            Stmt::Cont(k, a, b) => Stmt::Cont(self.name(Space::Cont, k), self.expr(a), self.expr(b)),
            Stmt::Handle(u, seq, h, init) => Stmt::Handle(
                self.name(Space::Modal, u),
                self.seq(seq),
                Box::new(self.handler(h)),
                self.expr(init),
            ),
        }
    }

    fn handler(&self, h: &Handler) -> Handler {
        let clauses = h
            .clauses
            .iter()
            .map(|cl| {
                let bound = self.shadows(Space::Value, &cl.x)
                    || self.shadows(Space::Value, &cl.z)
                    || self.shadows(Space::Cont, &cl.k);
                OpClause { body: if bound { cl.body.clone() } else { self.comp(&cl.body) }, ..cl.clone() }
            })
            .collect();
        let r = &h.ret;
        let bound = self.shadows(Space::Value, &r.x) || self.shadows(Space::Value, &r.z);
        let ret = RetClause { body: if bound { r.body.clone() } else { self.comp(&r.body) }, ..r.clone() };
        Handler { theory: h.theory.clone(), clauses, ret }
    }

    fn seq(&self, seq: &HandlingSeq) -> HandlingSeq {
        HandlingSeq {
            clauses: seq
                .clauses
                .iter()
                .map(|cl| SeqClause {
                    handler: self.handler(&cl.handler),
                    init: self.expr(&cl.init),
                    x: cl.x.clone(),
                    cont: if self.shadows(Space::Value, &cl.x) { cl.cont.clone() } else { self.comp(&cl.cont) },
                })
                .collect(),
        }
    }
}

macro_rules! impl_rename {
    ($ty:ty, $method:ident) => {
        impl Rename for $ty {
            fn rename_value(&self, old: &str, new: &str) -> Self {
                Renamer { space: Space::Value, old, new }.$method(self)
            }
            fn rename_modal(&self, old: &str, new: &str) -> Self {
                Renamer { space: Space::Modal, old, new }.$method(self)
            }
            fn rename_cont(&self, old: &str, new: &str) -> Self {
                Renamer { space: Space::Cont, old, new }.$method(self)
            }
        }
    };
}

impl_rename!(Expr, expr);
impl_rename!(Comp, comp);
impl_rename!(Stmt, stmt);
impl_rename!(Handler, handler);
impl_rename!(HandlingSeq, seq);
