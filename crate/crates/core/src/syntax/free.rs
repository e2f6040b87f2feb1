use std::collections::BTreeSet;

use super::*;

/// Free names of a term, one set per namespace.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FreeVars {
    pub values: BTreeSet<Name>,
    pub modals: BTreeSet<Name>,
    pub ops: BTreeSet<Name>,
    pub conts: BTreeSet<Name>,
}

impl FreeVars {
    pub fn is_closed(&self) -> bool {
        self.values.is_empty() && self.modals.is_empty() && self.ops.is_empty() && self.conts.is_empty()
    }

    fn union(mut self, other: FreeVars) -> FreeVars {
        self.values.extend(other.values);
        self.modals.extend(other.modals);
        self.ops.extend(other.ops);
        self.conts.extend(other.conts);
        self
    }

    fn without_value(mut self, x: &str) -> FreeVars {
        self.values.remove(x);
        self
    }

    fn without_modal(mut self, u: &str) -> FreeVars {
        self.modals.remove(u);
        self
    }

    fn without_cont(mut self, k: &str) -> FreeVars {
        self.conts.remove(k);
        self
    }

    fn without_theory(mut self, theory: &Theory) -> FreeVars {
        for name in theory.names() {
            self.ops.remove(name);
        }
        self
    }
}

/// Syntax that has free names and a set of all names mentioned.
pub trait Names {
    fn free_vars(&self) -> FreeVars;

    /// Every identifier occurring anywhere in the term, bound or free, in any
    /// namespace.
    fn collect_names(&self, acc: &mut BTreeSet<Name>);
}

pub fn all_names<T: Names + ?Sized>(t: &T) -> BTreeSet<Name> {
    let mut acc = BTreeSet::new();
    t.collect_names(&mut acc);
    acc
}

impl Names for Expr {
    fn free_vars(&self) -> FreeVars {
        match self {
            Expr::Var(x) => FreeVars { values: [x.clone()].into(), ..Default::default() },
            Expr::Lam(x, _, body) => body.free_vars().without_value(x),
            Expr::App(a, b)
            | Expr::Pair(a, b)
            | Expr::Append(a, b)
            | Expr::Arith(_, a, b)
            | Expr::Cmp(_, a, b) => a.free_vars().union(b.free_vars()),
            Expr::Box(theory, c) => c.free_vars().without_theory(theory),
            Expr::LetBox(u, bound, body) => bound.free_vars().union(body.free_vars().without_modal(u)),
            Expr::Eval(seq, u) => {
                let mut fv = seq.free_vars();
                fv.modals.insert(u.clone());
                fv
            }
            Expr::Fix(def, scope) => def.free_vars().union(scope.free_vars().without_value(&def.name)),
            Expr::Int(_) | Expr::Bool(_) | Expr::Unit | Expr::Nil(_) => FreeVars::default(),
            Expr::Fst(e) | Expr::Snd(e) => e.free_vars(),
            Expr::List(items) => items.iter().fold(FreeVars::default(), |acc, e| acc.union(e.free_vars())),
            Expr::If(c, t, e) => c.free_vars().union(t.free_vars()).union(e.free_vars()),
        }
    }

    fn collect_names(&self, acc: &mut BTreeSet<Name>) {
        match self {
            Expr::Var(x) => {
                acc.insert(x.clone());
            }
            Expr::Lam(x, _, body) => {
                acc.insert(x.clone());
                body.collect_names(acc);
            }
            Expr::App(a, b)
            | Expr::Pair(a, b)
            | Expr::Append(a, b)
            | Expr::Arith(_, a, b)
            | Expr::Cmp(_, a, b) => {
                a.collect_names(acc);
                b.collect_names(acc);
            }
            Expr::Box(theory, c) => {
                acc.extend(theory.names().map(str::to_string));
                c.collect_names(acc);
            }
            Expr::LetBox(u, bound, body) => {
                acc.insert(u.clone());
                bound.collect_names(acc);
                body.collect_names(acc);
            }
            Expr::Eval(seq, u) => {
                acc.insert(u.clone());
                seq.collect_names(acc);
            }
            Expr::Fix(def, scope) => {
                def.collect_names(acc);
                scope.collect_names(acc);
            }
            Expr::Int(_) | Expr::Bool(_) | Expr::Unit | Expr::Nil(_) => {}
            Expr::Fst(e) | Expr::Snd(e) => e.collect_names(acc),
            Expr::List(items) => items.iter().for_each(|e| e.collect_names(acc)),
            Expr::If(c, t, e) => {
                c.collect_names(acc);
                t.collect_names(acc);
                e.collect_names(acc);
            }
        }
    }
}

impl Names for FixDef {
    fn free_vars(&self) -> FreeVars {
        self.body
            .free_vars()
            .without_value(&self.name)
            .without_value(&self.param)
            .without_theory(&self.theory)
    }

    fn collect_names(&self, acc: &mut BTreeSet<Name>) {
        acc.insert(self.name.clone());
        acc.insert(self.param.clone());
        acc.extend(self.theory.names().map(str::to_string));
        self.body.collect_names(acc);
    }
}

impl Names for Comp {
    fn free_vars(&self) -> FreeVars {
        match self {
            Comp::Ret(e) => e.free_vars(),
            Comp::Bind(s, x, rest) => s.free_vars().union(rest.free_vars().without_value(x)),
            Comp::LetBox(u, bound, body) => bound.free_vars().union(body.free_vars().without_modal(u)),
            Comp::Fix(def, scope) => def.free_vars().union(scope.free_vars().without_value(&def.name)),
            Comp::If(c, t, e) => c.free_vars().union(t.free_vars()).union(e.free_vars()),
        }
    }

    fn collect_names(&self, acc: &mut BTreeSet<Name>) {
        match self {
            Comp::Ret(e) => e.collect_names(acc),
            Comp::Bind(s, x, rest) => {
                acc.insert(x.clone());
                s.collect_names(acc);
                rest.collect_names(acc);
            }
            Comp::LetBox(u, bound, body) => {
                acc.insert(u.clone());
                bound.collect_names(acc);
                body.collect_names(acc);
            }
            Comp::Fix(def, scope) => {
                def.collect_names(acc);
                scope.collect_names(acc);
            }
            Comp::If(c, t, e) => {
                c.collect_names(acc);
                t.collect_names(acc);
                e.collect_names(acc);
            }
        }
    }
}

impl Names for Stmt {
    fn free_vars(&self) -> FreeVars {
        match self {
            Stmt::Op(op, e) => {
                let mut fv = e.free_vars();
                fv.ops.insert(op.clone());
                fv
            }
            Stmt::Cont(k, a, b) => {
                let mut fv = a.free_vars().union(b.free_vars());
                fv.conts.insert(k.clone());
                fv
            }
            Stmt::Handle(u, seq, h, init) => {
                let mut fv = seq
                    .free_vars()
                    .without_theory(&h.theory)
                    .union(h.free_vars())
                    .union(init.free_vars());
                fv.modals.insert(u.clone());
                fv
            }
        }
    }

    fn collect_names(&self, acc: &mut BTreeSet<Name>) {
        match self {
            Stmt::Op(op, e) => {
                acc.insert(op.clone());
                e.collect_names(acc);
            }
            Stmt::Cont(k, a, b) => {
                acc.insert(k.clone());
                a.collect_names(acc);
                b.collect_names(acc);
            }
            Stmt::Handle(u, seq, h, init) => {
                acc.insert(u.clone());
                seq.collect_names(acc);
                h.collect_names(acc);
                init.collect_names(acc);
            }
        }
    }
}

impl Names for Handler {
    fn free_vars(&self) -> FreeVars {
        let ret = self.ret.body.free_vars().without_value(&self.ret.x).without_value(&self.ret.z);
        self.clauses.iter().fold(ret, |acc, clause| {
            acc.union(
                clause
                    .body
                    .free_vars()
                    .without_value(&clause.x)
                    .without_value(&clause.z)
                    .without_cont(&clause.k),
            )
        })
    }

    fn collect_names(&self, acc: &mut BTreeSet<Name>) {
        acc.extend(self.theory.names().map(str::to_string));
        for clause in &self.clauses {
            acc.insert(clause.op.clone());
            acc.insert(clause.x.clone());
            acc.insert(clause.k.clone());
            acc.insert(clause.z.clone());
            clause.body.collect_names(acc);
        }
        acc.insert(self.ret.x.clone());
        acc.insert(self.ret.z.clone());
        self.ret.body.collect_names(acc);
    }
}

impl Names for HandlingSeq {
    /// Each clause's prefix is typed under that clause's handler theory, so
    /// the prefix's operations are relative to it.
    fn free_vars(&self) -> FreeVars {
        self.clauses.iter().fold(FreeVars::default(), |prefix, clause| {
            prefix
                .without_theory(&clause.handler.theory)
                .union(clause.handler.free_vars())
                .union(clause.init.free_vars())
                .union(clause.cont.free_vars().without_value(&clause.x))
        })
    }

    fn collect_names(&self, acc: &mut BTreeSet<Name>) {
        for clause in &self.clauses {
            clause.handler.collect_names(acc);
            clause.init.collect_names(acc);
            acc.insert(clause.x.clone());
            clause.cont.collect_names(acc);
        }
    }
}

impl Names for Term {
    fn free_vars(&self) -> FreeVars {
        match self {
            Term::Expr(e) => e.free_vars(),
            Term::Comp(c) => c.free_vars(),
            Term::Stmt(s) => s.free_vars(),
            Term::Handler(h) => h.free_vars(),
            Term::Seq(s) => s.free_vars(),
        }
    }

    fn collect_names(&self, acc: &mut BTreeSet<Name>) {
        match self {
            Term::Expr(e) => e.collect_names(acc),
            Term::Comp(c) => c.collect_names(acc),
            Term::Stmt(s) => s.collect_names(acc),
            Term::Handler(h) => h.collect_names(acc),
            Term::Seq(s) => s.collect_names(acc),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn st() -> Theory {
        Theory::new(vec![
            OpDecl::new("get", Type::Unit, Type::Int),
            OpDecl::new("set", Type::Int, Type::Unit),
        ])
    }

    fn get_then_ret() -> Comp {
        Comp::bind(Stmt::Op("get".into(), Expr::Unit), "y", Comp::ret(Expr::var("y")))
    }

    #[test]
    fn closed_lambda_has_no_free_names() {
        let id = Expr::lam("x", Type::Int, Expr::var("x"));
        assert!(id.free_vars().is_closed());
    }

    #[test]
    fn box_binds_its_theory() {
        let boxed = Expr::boxed(st(), get_then_ret());
        assert!(boxed.free_vars().ops.is_empty());
        let bare = get_then_ret();
        assert_eq!(bare.free_vars().ops, ["get".to_string()].into());
    }

    #[test]
    fn handler_binds_clause_parameters() {
        let h = Handler {
            theory: st(),
            clauses: vec![OpClause {
                op: "get".into(),
                x: "x".into(),
                k: "k".into(),
                z: "z".into(),
                body: Comp::bind(
                    Stmt::Cont("k".into(), Expr::var("z"), Expr::var("w")),
                    "r",
                    Comp::ret(Expr::var("r")),
                ),
            }],
            ret: RetClause { x: "x".into(), z: "z".into(), body: Comp::ret(Expr::var("x")) },
        };
        let fv = h.free_vars();
        assert_eq!(fv.values, ["w".to_string()].into());
        assert!(fv.conts.is_empty());
    }

    #[test]
    fn handle_statement_scopes_sequence_operations_by_handler_theory() {
        let h = Handler {
            theory: st(),
            clauses: vec![],
            ret: RetClause { x: "x".into(), z: "z".into(), body: Comp::ret(Expr::var("x")) },
        };
        let seq = HandlingSeq {
            clauses: vec![SeqClause {
                handler: h.clone(),
                init: Expr::Int(0),
                x: "x".into(),
                cont: Comp::bind(Stmt::Op("get".into(), Expr::Unit), "y", Comp::ret(Expr::var("y"))),
            }],
        };
        let s = Stmt::Handle("u".into(), seq, Box::new(h), Expr::Int(0));
        let fv = s.free_vars();
        assert!(fv.ops.is_empty());
        assert_eq!(fv.modals, ["u".to_string()].into());
    }
}
