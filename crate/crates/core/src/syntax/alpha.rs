use super::*;

/// Equality up to consistent renaming of bound value, modal and continuation
/// variables. Operation names are compared literally.
pub trait AlphaEq {
    fn alpha_eq(&self, other: &Self) -> bool;
}

#[derive(Default)]
struct Env {
    values: Vec<(Name, Name)>,
    modals: Vec<(Name, Name)>,
    conts: Vec<(Name, Name)>,
}

fn same(stack: &[(Name, Name)], a: &str, b: &str) -> bool {
    let left = stack.iter().rposition(|(l, _)| l == a);
    let right = stack.iter().rposition(|(_, r)| r == b);
    match (left, right) {
        (None, None) => a == b,
        (l, r) => l == r,
    }
}

impl Env {
    fn with_value<T>(&mut self, a: &str, b: &str, f: impl FnOnce(&mut Env) -> T) -> T {
        self.values.push((a.to_string(), b.to_string()));
        let out = f(self);
        self.values.pop();
        out
    }

    fn with_modal<T>(&mut self, a: &str, b: &str, f: impl FnOnce(&mut Env) -> T) -> T {
        self.modals.push((a.to_string(), b.to_string()));
        let out = f(self);
        self.modals.pop();
        out
    }

    fn with_cont<T>(&mut self, a: &str, b: &str, f: impl FnOnce(&mut Env) -> T) -> T {
        self.conts.push((a.to_string(), b.to_string()));
        let out = f(self);
        self.conts.pop();
        out
    }

    fn expr(&mut self, a: &Expr, b: &Expr) -> bool {
        match (a, b) {
            (Expr::Var(x), Expr::Var(y)) => same(&self.values, x, y),
            (Expr::Lam(x, tx, bx), Expr::Lam(y, ty, by)) => tx == ty && self.with_value(x, y, |env| env.expr(bx, by)),
            (Expr::App(f1, a1), Expr::App(f2, a2))
            | (Expr::Pair(f1, a1), Expr::Pair(f2, a2))
            | (Expr::Append(f1, a1), Expr::Append(f2, a2)) => self.expr(f1, f2) && self.expr(a1, a2),
            (Expr::Box(t1, c1), Expr::Box(t2, c2)) => t1 == t2 && self.comp(c1, c2),
            (Expr::LetBox(u1, e1, b1), Expr::LetBox(u2, e2, b2)) => {
                self.expr(e1, e2) && self.with_modal(u1, u2, |env| env.expr(b1, b2))
            }
            (Expr::Eval(s1, u1), Expr::Eval(s2, u2)) => same(&self.modals, u1, u2) && self.seq(s1, s2),
            (Expr::Fix(d1, s1), Expr::Fix(d2, s2)) => {
                self.fix(d1, d2) && self.with_value(&d1.name, &d2.name, |env| env.expr(s1, s2))
            }
            (Expr::Int(x), Expr::Int(y)) => x == y,
            (Expr::Bool(x), Expr::Bool(y)) => x == y,
            (Expr::Unit, Expr::Unit) => true,
            (Expr::Fst(x), Expr::Fst(y)) | (Expr::Snd(x), Expr::Snd(y)) => self.expr(x, y),
            (Expr::Nil(x), Expr::Nil(y)) => x == y,
            (Expr::List(xs), Expr::List(ys)) => {
                xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| self.expr(x, y))
            }
            (Expr::Arith(o1, a1, b1), Expr::Arith(o2, a2, b2)) => o1 == o2 && self.expr(a1, a2) && self.expr(b1, b2),
            (Expr::Cmp(o1, a1, b1), Expr::Cmp(o2, a2, b2)) => o1 == o2 && self.expr(a1, a2) && self.expr(b1, b2),
            (Expr::If(c1, t1, e1), Expr::If(c2, t2, e2)) => {
                self.expr(c1, c2) && self.expr(t1, t2) && self.expr(e1, e2)
            }
            _ => false,
        }
    }

    fn fix(&mut self, a: &FixDef, b: &FixDef) -> bool {
        a.param_ty == b.param_ty
            && a.theory == b.theory
            && a.ret_ty == b.ret_ty
            && self.with_value(&a.name, &b.name, |env| {
                env.with_value(&a.param, &b.param, |env| env.comp(&a.body, &b.body))
            })
    }

    fn comp(&mut self, a: &Comp, b: &Comp) -> bool {
        match (a, b) {
            (Comp::Ret(x), Comp::Ret(y)) => self.expr(x, y),
            (Comp::Bind(s1, x1, r1), Comp::Bind(s2, x2, r2)) => {
                self.stmt(s1, s2) && self.with_value(x1, x2, |env| env.comp(r1, r2))
            }
            (Comp::LetBox(u1, e1, b1), Comp::LetBox(u2, e2, b2)) => {
                self.expr(e1, e2) && self.with_modal(u1, u2, |env| env.comp(b1, b2))
            }
            (Comp::Fix(d1, s1), Comp::Fix(d2, s2)) => {
                self.fix(d1, d2) && self.with_value(&d1.name, &d2.name, |env| env.comp(s1, s2))
            }
            (Comp::If(c1, t1, e1), Comp::If(c2, t2, e2)) => {
                self.expr(c1, c2) && self.comp(t1, t2) && self.comp(e1, e2)
            }
            _ => false,
        }
    }

    fn stmt(&mut self, a: &Stmt, b: &Stmt) -> bool {
        match (a, b) {
            (Stmt::Op(o1, e1), Stmt::Op(o2, e2)) => o1 == o2 && self.expr(e1, e2),
            (Stmt::Cont(k1, a1, b1), Stmt::Cont(k2, a2, b2)) => {
                same(&self.conts, k1, k2) && self.expr(a1, a2) && self.expr(b1, b2)
            }
            (Stmt::Handle(u1, s1, h1, e1), Stmt::Handle(u2, s2, h2, e2)) => {
                same(&self.modals, u1, u2) && self.seq(s1, s2) && self.handler(h1, h2) && self.expr(e1, e2)
            }
            _ => false,
        }
    }

    fn handler(&mut self, a: &Handler, b: &Handler) -> bool {
        if a.theory != b.theory || a.clauses.len() != b.clauses.len() {
            return false;
        }
        let clauses_match = a.clauses.iter().all(|ca| {
            b.clause(&ca.op).is_some_and(|cb| {
                self.with_value(&ca.x, &cb.x, |env| {
                    env.with_value(&ca.z, &cb.z, |env| env.with_cont(&ca.k, &cb.k, |env| env.comp(&ca.body, &cb.body)))
                })
            })
        });
        clauses_match
            && self.with_value(&a.ret.x, &b.ret.x, |env| {
                env.with_value(&a.ret.z, &b.ret.z, |env| env.comp(&a.ret.body, &b.ret.body))
            })
    }

    fn seq(&mut self, a: &HandlingSeq, b: &HandlingSeq) -> bool {
        a.clauses.len() == b.clauses.len()
            && a.clauses.iter().zip(&b.clauses).all(|(ca, cb)| {
                self.handler(&ca.handler, &cb.handler)
                    && self.expr(&ca.init, &cb.init)
                    && self.with_value(&ca.x, &cb.x, |env| env.comp(&ca.cont, &cb.cont))
            })
    }
}

impl AlphaEq for Expr {
    fn alpha_eq(&self, other: &Self) -> bool {
        Env::default().expr(self, other)
    }
}

impl AlphaEq for Comp {
    fn alpha_eq(&self, other: &Self) -> bool {
        Env::default().comp(self, other)
    }
}

impl AlphaEq for Stmt {
    fn alpha_eq(&self, other: &Self) -> bool {
        Env::default().stmt(self, other)
    }
}

impl AlphaEq for Handler {
    fn alpha_eq(&self, other: &Self) -> bool {
        Env::default().handler(self, other)
    }
}

impl AlphaEq for HandlingSeq {
    fn alpha_eq(&self, other: &Self) -> bool {
        Env::default().seq(self, other)
    }
}

impl AlphaEq for Term {
    fn alpha_eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Term::Expr(a), Term::Expr(b)) => a.alpha_eq(b),
            (Term::Comp(a), Term::Comp(b)) => a.alpha_eq(b),
            (Term::Stmt(a), Term::Stmt(b)) => a.alpha_eq(b),
            (Term::Handler(a), Term::Handler(b)) => a.alpha_eq(b),
            (Term::Seq(a), Term::Seq(b)) => a.alpha_eq(b),
            _ => false,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn op_theory() -> Theory {
        Theory::new(vec![OpDecl::new("op", Type::Unit, Type::Int)])
    }

    fn call_op(a: &str) -> Expr {
        Expr::boxed(op_theory(), Comp::bind(Stmt::Op("op".into(), Expr::Unit), a, Comp::ret(Expr::var(a))))
    }

    #[test]
    fn renamed_lambdas_are_equal() {
        let a = Expr::lam("x", Type::Int, Expr::var("x"));
        let b = Expr::lam("y", Type::Int, Expr::var("y"));
        assert!(a.alpha_eq(&b));
    }

    #[test]
    fn annotations_must_match() {
        let a = Expr::lam("x", Type::Int, Expr::var("x"));
        let b = Expr::lam("x", Type::Bool, Expr::var("x"));
        assert!(!a.alpha_eq(&b));
    }

    #[test]
    fn bind_variables_rename() {
        assert!(call_op("a").alpha_eq(&call_op("b")));
    }

    #[test]
    fn free_names_compare_literally() {
        assert!(!Expr::var("x").alpha_eq(&Expr::var("y")));
        let a = Expr::lam("x", Type::Int, Expr::var("y"));
        let b = Expr::lam("y", Type::Int, Expr::var("y"));
        assert!(!a.alpha_eq(&b));
    }

    #[test]
    fn operation_names_are_not_renamed() {
        let other = Expr::boxed(
            Theory::new(vec![OpDecl::new("op2", Type::Unit, Type::Int)]),
            Comp::bind(Stmt::Op("op2".into(), Expr::Unit), "a", Comp::ret(Expr::var("a"))),
        );
        assert!(!call_op("a").alpha_eq(&other));
    }
}
