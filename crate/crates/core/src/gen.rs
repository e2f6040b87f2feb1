//! Type-directed random generation of well-typed terms.
//!
//! Terms are built against a target type in a [`Scope`], so almost every
//! candidate typechecks; the public entry points still run the checker and
//! retry on the rare miss, so callers only ever see well-typed output.
//! Division is never generated and `let fix` bodies never call themselves,
//! so generated programs terminate.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::syntax::*;
use crate::typeck::{check_handler, conforms, infer_comp, infer_expr, infer_hseq, infer_closed};

const VALUE_NAMES: [&str; 4] = ["x", "y", "z", "w"];
const MODAL_NAMES: [&str; 2] = ["u", "v"];
const CONT_NAMES: [&str; 2] = ["k", "l"];
const OP_NAMES: [&str; 5] = ["ping", "pong", "tick", "tock", "poke"];

#[derive(Clone, Debug)]
pub struct GenConfig {
    pub max_depth: usize,
    pub max_ops: usize,
    /// Upper bound on the number of non-leaf nodes in one generated term.
    pub max_nodes: usize,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig { max_depth: 6, max_ops: 3, max_nodes: 80 }
    }
}

/// The contexts a term is generated in.
#[derive(Clone, Debug, Default)]
pub struct Scope {
    pub delta: ModalContext,
    pub gamma: EffectContext,
}

impl Scope {
    fn val(&self, x: &str, ty: Type) -> Scope {
        Scope { delta: self.delta.with_val(x, ty), gamma: self.gamma.clone() }
    }

    fn modal(&self, u: &str, ty: Type, theory: Theory) -> Scope {
        Scope { delta: self.delta.with_modal(u, ty, theory), gamma: self.gamma.clone() }
    }

    fn under(&self, gamma: EffectContext) -> Scope {
        Scope { delta: self.delta.clone(), gamma }
    }

    /// Value variables visible at exactly `ty`.
    fn vars_of(&self, ty: &Type) -> Vec<Name> {
        let mut out: Vec<Name> = Vec::new();
        for entry in &self.delta.entries {
            if let ModalEntry::Val { name, .. } = entry {
                if self.delta.lookup_val(name) == Some(ty) && !out.contains(name) {
                    out.push(name.clone());
                }
            }
        }
        out
    }

    fn functions_into(&self, ty: &Type) -> Vec<(Name, Type)> {
        let mut out: Vec<(Name, Type)> = Vec::new();
        for entry in &self.delta.entries {
            if let ModalEntry::Val { name, .. } = entry {
                if let Some(Type::Arrow(dom, cod)) = self.delta.lookup_val(name) {
                    if **cod == *ty && !out.iter().any(|(n, _)| n == name) {
                        out.push((name.clone(), (**dom).clone()));
                    }
                }
            }
        }
        out
    }

    fn modals(&self) -> Vec<(Name, Type, Theory)> {
        let mut out: Vec<(Name, Type, Theory)> = Vec::new();
        for entry in &self.delta.entries {
            if let ModalEntry::Modal { name, .. } = entry {
                if out.iter().any(|(n, _, _)| n == name) {
                    continue;
                }
                if let Some((ty, theory)) = self.delta.lookup_modal(name) {
                    out.push((name.clone(), ty.clone(), theory.clone()));
                }
            }
        }
        out
    }

    fn ops(&self) -> Vec<OpDecl> {
        let mut out: Vec<OpDecl> = Vec::new();
        for entry in &self.gamma.entries {
            if let EffectEntry::Op(op) = entry {
                if !out.iter().any(|o| o.name == op.name) {
                    out.push(op.clone());
                }
            }
        }
        out
    }

    fn conts(&self) -> Vec<(Name, Type, Type, Type)> {
        let mut out: Vec<(Name, Type, Type, Type)> = Vec::new();
        for entry in &self.gamma.entries {
            if let EffectEntry::Cont { name, .. } = entry {
                if out.iter().any(|(n, ..)| n == name) {
                    continue;
                }
                if let Some((a, s, b)) = self.gamma.lookup_cont(name) {
                    out.push((name.clone(), a.clone(), s.clone(), b.clone()));
                }
            }
        }
        out
    }

    fn value_names(&self) -> Vec<Name> {
        self.delta
            .entries
            .iter()
            .filter_map(|e| match e {
                ModalEntry::Val { name, .. } => Some(name.clone()),
                ModalEntry::Modal { .. } => None,
            })
            .collect()
    }
}

/// A closed program together with its synthesized type.
#[derive(Clone, Debug)]
pub struct Program {
    pub term: Term,
    pub ty: Type,
}

/// Premises for monadic substitution: `c : a` and `x:a ⊢ cont : b`.
#[derive(Clone, Debug)]
pub struct MonadicCase {
    pub scope: Scope,
    pub c: Comp,
    pub x: Name,
    pub cont: Comp,
    pub ty: Type,
}

/// Premises for continuation substitution into a computation or a handler
/// typed with `k` in the effect context.
#[derive(Clone, Debug)]
pub struct ContCase {
    pub scope: Scope,
    pub k: Name,
    pub x: Name,
    pub y: Name,
    pub body: Comp,
    pub target: ContTarget,
}

#[derive(Clone, Debug)]
pub enum ContTarget {
    Comp(Comp, Type),
    Handler { handler: Handler, input: Type, state: Type, output: Type },
}

/// Premises for handling: `c` over the handler's theory, `h`, and a state.
#[derive(Clone, Debug)]
pub struct HandleCase {
    pub scope: Scope,
    pub c: Comp,
    pub handler: Handler,
    pub state: Expr,
    pub ty: Type,
}

/// Premises for handling sequences: `c : input` over `source`, and a
/// sequence typed in the ambient theory of `scope`.
#[derive(Clone, Debug)]
pub struct SeqCase {
    pub scope: Scope,
    pub ambient: Theory,
    pub c: Comp,
    pub seq: HandlingSeq,
    pub ty: Type,
}

/// Premises for modal substitution of `Ψ.body` for `u` in `target`.
#[derive(Clone, Debug)]
pub struct ModalCase {
    pub scope: Scope,
    pub theory: Theory,
    pub body: Comp,
    pub u: Name,
    pub target: Term,
    pub ty: Type,
}

/// A computation typed in the empty effect context.
#[derive(Clone, Debug)]
pub struct EvalCase {
    pub scope: Scope,
    pub c: Comp,
    pub ty: Type,
}

pub struct Gen {
    rng: ChaCha8Rng,
    config: GenConfig,
    pool: Vec<OpDecl>,
    budget: usize,
}

impl Gen {
    pub fn new(seed: u64) -> Self {
        Gen::with_config(seed, GenConfig::default())
    }

    pub fn with_config(seed: u64, config: GenConfig) -> Self {
        let budget = config.max_nodes;
        let mut gen = Gen { rng: ChaCha8Rng::seed_from_u64(seed), config, pool: Vec::new(), budget };
        gen.reset_pool();
        gen
    }

    /// Picks fresh signatures for the operation names and refills the node
    /// budget; called once per generated term.
    fn reset_pool(&mut self) {
        self.budget = self.config.max_nodes;
        self.pool = OP_NAMES
            .iter()
            .map(|name| {
                let input = self.ground();
                let output = self.ground();
                OpDecl::new(*name, input, output)
            })
            .collect();
    }

    fn chance(&mut self, p: f64) -> bool {
        self.rng.gen_bool(p)
    }

    fn pick<T: Clone>(&mut self, items: &[T]) -> Option<T> {
        items.choose(&mut self.rng).cloned()
    }

    fn value_name(&mut self) -> Name {
        VALUE_NAMES.choose(&mut self.rng).unwrap().to_string()
    }

    fn modal_name(&mut self) -> Name {
        MODAL_NAMES.choose(&mut self.rng).unwrap().to_string()
    }

    fn cont_name(&mut self) -> Name {
        CONT_NAMES.choose(&mut self.rng).unwrap().to_string()
    }

    fn ground(&mut self) -> Type {
        match self.rng.gen_range(0..4) {
            0 | 1 => Type::Int,
            2 => Type::Bool,
            _ => Type::Unit,
        }
    }

    pub fn ty(&mut self, depth: usize) -> Type {
        if depth == 0 || self.chance(0.5) {
            return self.ground();
        }
        match self.rng.gen_range(0..4) {
            0 => Type::prod(self.ty(depth - 1), self.ty(depth - 1)),
            1 => Type::list(self.ground()),
            2 => Type::arrow(self.ground(), self.ty(depth - 1)),
            _ => Type::modal(self.theory(), self.ty(depth - 1)),
        }
    }

    /// A theory of at most `max_ops` operations from the current pool.
    pub fn theory(&mut self) -> Theory {
        let n = self.rng.gen_range(0..=self.config.max_ops.min(self.pool.len()));
        let ops = self.pool.choose_multiple(&mut self.rng, n).cloned().collect();
        Theory::new(ops)
    }

    fn superset(&mut self, theory: &Theory) -> Theory {
        let mut ops = theory.ops.clone();
        while ops.len() < self.config.max_ops && self.chance(0.3) {
            let op = self.pool.choose(&mut self.rng).unwrap().clone();
            if !ops.iter().any(|o| o.name == op.name) {
                ops.push(op);
            }
        }
        Theory::new(ops)
    }

    fn fix_name(&self, scope: &Scope) -> Name {
        fresh_name("f", &scope.value_names().into_iter().collect())
    }

    /// A value of type `ty` built without recursion into larger terms.
    fn leaf(&mut self, scope: &Scope, ty: &Type) -> Expr {
        let vars = scope.vars_of(ty);
        if !vars.is_empty() && self.chance(0.5) {
            return Expr::Var(self.pick(&vars).unwrap());
        }
        match ty {
            Type::Int => Expr::Int(self.rng.gen_range(-3..10)),
            Type::Bool => Expr::Bool(self.chance(0.5)),
            Type::Unit | Type::Base(_) | Type::Bottom => Expr::Unit,
            Type::Prod(a, b) => Expr::pair(self.leaf(scope, a), self.leaf(scope, b)),
            Type::List(a) => {
                if self.chance(0.3) {
                    Expr::Nil((**a).clone())
                } else {
                    Expr::List(vec![self.leaf(scope, a)])
                }
            }
            Type::Arrow(a, b) => {
                let x = self.value_name();
                let body = self.leaf(&scope.val(&x, (**a).clone()), b);
                Expr::lam(x, (**a).clone(), body)
            }
            Type::Modal(theory, a) => {
                let inner = scope.under(theory.as_effect_context());
                Expr::boxed(theory.clone(), Comp::ret(self.leaf(&inner, a)))
            }
        }
    }

    /// Spends one node of the budget, or reports that none is left.
    fn spend(&mut self) -> bool {
        if self.budget == 0 {
            return false;
        }
        self.budget -= 1;
        true
    }

    pub fn expr(&mut self, scope: &Scope, ty: &Type, depth: usize) -> Expr {
        if depth == 0 || self.chance(0.15) || !self.spend() {
            return self.leaf(scope, ty);
        }
        let d = depth - 1;
        for _ in 0..4 {
            match self.rng.gen_range(0..12) {
                0 => {
                    let vars = scope.vars_of(ty);
                    if let Some(x) = self.pick(&vars) {
                        return Expr::Var(x);
                    }
                }
                1 => {
                    let c = self.expr(scope, &Type::Bool, d);
                    return Expr::if_(c, self.expr(scope, ty, d), self.expr(scope, ty, d));
                }
                2 => {
                    let a = self.ty(1);
                    let x = self.value_name();
                    let body = self.expr(&scope.val(&x, a.clone()), ty, d);
                    return Expr::app(Expr::lam(x, a.clone(), body), self.expr(scope, &a, d));
                }
                3 => {
                    let theory = self.theory();
                    let a = self.ty(1);
                    let u = self.modal_name();
                    let bound = self.expr(scope, &Type::modal(theory.clone(), a.clone()), d);
                    let body = self.expr(&scope.modal(&u, a, theory), ty, d);
                    return Expr::let_box(u, bound, body);
                }
                4 | 5 => {
                    if let Some(e) = self.eval(scope, ty, d) {
                        return e;
                    }
                }
                6 => {
                    let (def, scope) = self.fix_def(scope, d);
                    return Expr::Fix(Box::new(def), Box::new(self.expr(&scope, ty, d)));
                }
                7 => {
                    let fs = scope.functions_into(ty);
                    if let Some((f, dom)) = self.pick(&fs) {
                        return Expr::app(Expr::Var(f), self.expr(scope, &dom, d));
                    }
                }
                8 => {
                    let other = self.ty(1);
                    return if self.chance(0.5) {
                        Expr::Fst(Box::new(self.expr(scope, &Type::prod(ty.clone(), other), d)))
                    } else {
                        Expr::Snd(Box::new(self.expr(scope, &Type::prod(other, ty.clone()), d)))
                    };
                }
                _ => return self.intro(scope, ty, d),
            }
        }
        self.intro(scope, ty, d)
    }

    /// An introduction form for `ty`.
    fn intro(&mut self, scope: &Scope, ty: &Type, d: usize) -> Expr {
        match ty {
            Type::Int => match self.rng.gen_range(0..4) {
                0 => Expr::Int(self.rng.gen_range(-3..10)),
                n => {
                    let op = [ArithOp::Add, ArithOp::Sub, ArithOp::Mul][n - 1];
                    Expr::arith(op, self.expr(scope, &Type::Int, d), self.expr(scope, &Type::Int, d))
                }
            },
            Type::Bool => match self.rng.gen_range(0..3) {
                0 => Expr::Bool(self.chance(0.5)),
                1 => Expr::cmp(CmpOp::Lt, self.expr(scope, &Type::Int, d), self.expr(scope, &Type::Int, d)),
                _ => {
                    let a = self.ground();
                    Expr::cmp(CmpOp::Eq, self.expr(scope, &a, d), self.expr(scope, &a, d))
                }
            },
            Type::Prod(a, b) => Expr::pair(self.expr(scope, a, d), self.expr(scope, b, d)),
            Type::List(a) => {
                if self.chance(0.3) {
                    Expr::Append(Box::new(self.expr(scope, ty, d)), Box::new(self.expr(scope, ty, d)))
                } else {
                    let n = self.rng.gen_range(1..=3);
                    Expr::List((0..n).map(|_| self.expr(scope, a, d)).collect())
                }
            }
            Type::Arrow(a, b) => {
                let x = self.value_name();
                let body = self.expr(&scope.val(&x, (**a).clone()), b, d);
                Expr::lam(x, (**a).clone(), body)
            }
            Type::Modal(theory, a) => {
                let inner = scope.under(theory.as_effect_context());
                Expr::boxed(theory.clone(), self.comp(&inner, a, d))
            }
            Type::Unit | Type::Base(_) | Type::Bottom => self.leaf(scope, ty),
        }
    }

    /// `eval u` or `eval [h init e as x. c] u` for some modal variable `u`.
    fn eval(&mut self, scope: &Scope, ty: &Type, d: usize) -> Option<Expr> {
        let modals = scope.modals();
        let (u, a, theory) = self.pick(&modals)?;
        if theory.is_empty() && a == *ty && self.chance(0.5) {
            return Some(Expr::Eval(HandlingSeq::empty(), u));
        }
        let pure = scope.under(EffectContext::empty());
        let htheory = self.superset(&theory);
        let clause = self.seq_clause(&pure, &htheory, &a, ty, d);
        Some(Expr::Eval(HandlingSeq { clauses: vec![clause] }, u))
    }

    /// One clause `h init e as x. c`, with the handler over `htheory` taking
    /// `input` and the continuation producing `output`, both in `scope`.
    fn seq_clause(&mut self, scope: &Scope, htheory: &Theory, input: &Type, output: &Type, d: usize) -> SeqClause {
        let state = self.ty(1);
        let hout = self.ty(1);
        let handler = self.handler(scope, htheory, input, &state, &hout, d);
        let init = self.expr(scope, &state, d);
        let x = self.value_name();
        let cont = self.comp(&scope.val(&x, hout), output, d);
        SeqClause { handler, init, x, cont }
    }

    fn fix_def(&mut self, scope: &Scope, d: usize) -> (FixDef, Scope) {
        let name = self.fix_name(scope);
        let param = self.value_name();
        let param_ty = self.ground();
        let theory = self.theory();
        let ret_ty = self.ty(1);
        let inner = scope.val(&param, param_ty.clone()).under(theory.as_effect_context());
        let body = self.comp(&inner, &ret_ty, d);
        let def = FixDef { name: name.clone(), param, param_ty, theory, ret_ty, body };
        let outer = scope.val(&name, def.fun_type());
        (def, outer)
    }

    /// A handler over `theory` whose clauses live in `scope`.
    pub fn handler(&mut self, scope: &Scope, theory: &Theory, input: &Type, state: &Type, output: &Type, d: usize) -> Handler {
        let (x, z) = (self.value_name(), self.value_name());
        let body = self.comp(&scope.val(&x, input.clone()).val(&z, state.clone()), output, d);
        let ret = RetClause { x, z, body };
        let mut clauses = Vec::new();
        for op in &theory.ops {
            let (x, z, k) = (self.value_name(), self.value_name(), self.cont_name());
            let mut inner = scope.val(&x, op.input.clone()).val(&z, state.clone());
            inner.gamma = inner.gamma.with_cont(&k, op.output.clone(), state.clone(), output.clone());
            let body = self.comp(&inner, output, d);
            clauses.push(OpClause { op: op.name.clone(), x, k, z, body });
        }
        Handler { theory: theory.clone(), clauses, ret }
    }

    pub fn comp(&mut self, scope: &Scope, ty: &Type, depth: usize) -> Comp {
        if depth == 0 || self.chance(0.1) || !self.spend() {
            return Comp::ret(self.leaf(scope, ty));
        }
        let d = depth - 1;
        for _ in 0..4 {
            match self.rng.gen_range(0..11) {
                0 => return Comp::ret(self.expr(scope, ty, d)),
                1 | 2 => {
                    let ops = scope.ops();
                    if let Some(op) = self.pick(&ops) {
                        let arg = self.expr(scope, &op.input, d);
                        let x = self.value_name();
                        let rest = self.comp(&scope.val(&x, op.output.clone()), ty, d);
                        return Comp::bind(Stmt::Op(op.name, arg), x, rest);
                    }
                }
                3 => {
                    let conts = scope.conts();
                    if let Some((k, a, s, b)) = self.pick(&conts) {
                        let arg = self.expr(scope, &a, d);
                        let state = self.expr(scope, &s, d);
                        let x = self.value_name();
                        let rest = self.comp(&scope.val(&x, b), ty, d);
                        return Comp::bind(Stmt::Cont(k, arg, state), x, rest);
                    }
                }
                4 | 5 => {
                    if let Some(c) = self.handle(scope, ty, d) {
                        return c;
                    }
                }
                6 | 7 => {
                    let theory = self.theory();
                    let a = self.ty(1);
                    let u = self.modal_name();
                    let bound = self.expr(scope, &Type::modal(theory.clone(), a.clone()), d);
                    let body = self.comp(&scope.modal(&u, a, theory), ty, d);
                    return Comp::let_box(u, bound, body);
                }
                8 => {
                    let c = self.expr(scope, &Type::Bool, d);
                    return Comp::if_(c, self.comp(scope, ty, d), self.comp(scope, ty, d));
                }
                9 => {
                    let (def, inner) = self.fix_def(scope, d);
                    return Comp::Fix(Box::new(def), Box::new(self.comp(&inner, ty, d)));
                }
                _ => return Comp::ret(self.expr(scope, ty, d)),
            }
        }
        Comp::ret(self.expr(scope, ty, d))
    }

    /// `x <- handle u [Θ] with h init e; c` for some modal variable `u`.
    fn handle(&mut self, scope: &Scope, ty: &Type, d: usize) -> Option<Comp> {
        let modals = scope.modals();
        let (u, a, theory) = self.pick(&modals)?;
        let (seq, htheory, input) = if self.chance(0.35) {
            let htheory = self.theory();
            let ambient = scope.under(htheory.as_effect_context());
            let inner = self.superset(&theory);
            let input = self.ty(1);
            let clause = self.seq_clause(&ambient, &inner, &a, &input, d);
            (HandlingSeq { clauses: vec![clause] }, htheory, input)
        } else {
            (HandlingSeq::empty(), self.superset(&theory), a)
        };
        let state = self.ty(1);
        let output = self.ty(1);
        let handler = self.handler(scope, &htheory, &input, &state, &output, d);
        let init = self.expr(scope, &state, d);
        let x = self.value_name();
        let rest = self.comp(&scope.val(&x, output), ty, d);
        Some(Comp::bind(Stmt::Handle(u, seq, Box::new(handler), init), x, rest))
    }

    /// A random context: a few value and modal variables and an ambient
    /// theory.
    pub fn scope(&mut self) -> Scope {
        let mut scope = Scope::default();
        for _ in 0..self.rng.gen_range(0..=3) {
            let x = self.value_name();
            let ty = self.ty(1);
            scope = scope.val(&x, ty);
        }
        for _ in 0..self.rng.gen_range(0..=2) {
            let u = self.modal_name();
            let ty = self.ty(1);
            let theory = self.theory();
            scope = scope.modal(&u, ty, theory);
        }
        let theory = self.theory();
        scope.under(theory.as_effect_context())
    }

    fn depth(&self) -> usize {
        self.config.max_depth
    }

    /// A closed well-typed program: an expression, or a computation in the
    /// empty effect context.
    pub fn program(&mut self) -> Program {
        loop {
            self.reset_pool();
            let ty = self.ty(2);
            let depth = self.depth();
            let empty = Scope::default();
            let term = if self.chance(0.5) {
                let theory = self.theory();
                let a = self.ty(1);
                let u = self.modal_name();
                let bound = self.expr(&empty, &Type::modal(theory.clone(), a.clone()), depth - 1);
                let inner = empty.modal(&u, a, theory);
                if self.chance(0.5) {
                    Term::Expr(Expr::let_box(u, bound, self.expr(&inner, &ty, depth - 1)))
                } else {
                    Term::Comp(Comp::let_box(u, bound, self.comp(&inner, &ty, depth - 1)))
                }
            } else if self.chance(0.5) {
                Term::Expr(self.expr(&empty, &ty, depth))
            } else {
                Term::Comp(self.comp(&empty, &ty, depth))
            };
            if let Ok(found) = infer_closed(&term) {
                if conforms(&found, &ty) {
                    return Program { term, ty: found };
                }
            }
        }
    }

    /// Any generated term: a program, or an open term of any category.
    pub fn any_term(&mut self) -> Term {
        self.reset_pool();
        let scope = self.scope();
        let ty = self.ty(2);
        let depth = self.depth();
        match self.rng.gen_range(0..5) {
            0 => self.program().term,
            1 => Term::Expr(self.expr(&scope, &ty, depth)),
            2 => Term::Comp(self.comp(&scope, &ty, depth)),
            3 => {
                let theory = self.theory();
                let (state, output) = (self.ty(1), self.ty(1));
                Term::Handler(self.handler(&scope, &theory, &ty, &state, &output, depth - 1))
            }
            _ => {
                let theory = self.theory();
                let input = self.ty(1);
                Term::Seq(HandlingSeq { clauses: vec![self.seq_clause(&scope, &theory, &input, &ty, depth - 1)] })
            }
        }
    }

    fn premise_depth(&mut self) -> usize {
        self.rng.gen_range(1..=self.config.max_depth.saturating_sub(2).max(1))
    }

    pub fn monadic_case(&mut self) -> MonadicCase {
        loop {
            self.reset_pool();
            let scope = self.scope();
            let (a, b) = (self.ty(1), self.ty(1));
            let d = self.premise_depth();
            let c = self.comp(&scope, &a, d);
            let x = self.value_name();
            let cont = self.comp(&scope.val(&x, a.clone()), &b, d);
            let ok = comp_has(&scope, &c, &a) && comp_has(&scope.val(&x, a.clone()), &cont, &b);
            if ok {
                return MonadicCase { scope, c, x, cont, ty: b };
            }
        }
    }

    pub fn cont_case(&mut self, handler_target: bool) -> ContCase {
        loop {
            self.reset_pool();
            let scope = self.scope();
            let (a, s, b) = (self.ty(1), self.ty(1), self.ty(1));
            let (k, x, y) = (self.cont_name(), self.value_name(), self.value_name());
            let d = self.premise_depth();
            let body = self.comp(&scope.val(&x, a.clone()).val(&y, s.clone()), &b, d);
            if !comp_has(&scope.val(&x, a.clone()).val(&y, s.clone()), &body, &b) {
                continue;
            }
            let mut with_k = scope.clone();
            with_k.gamma = with_k.gamma.with_cont(&k, a.clone(), s.clone(), b.clone());
            let target = if handler_target {
                let theory = self.theory();
                let (input, state, output) = (self.ty(1), self.ty(1), self.ty(1));
                let handler = self.handler(&with_k, &theory, &input, &state, &output, d);
                match check_handler(&with_k.delta, &with_k.gamma, &handler, &input, &state) {
                    Ok(sig) if conforms(&sig.output, &output) => {
                        ContTarget::Handler { handler, input, state, output: sig.output }
                    }
                    _ => continue,
                }
            } else {
                let ty = self.ty(1);
                let c = self.comp(&with_k, &ty, d);
                if !comp_has(&with_k, &c, &ty) {
                    continue;
                }
                ContTarget::Comp(c, ty)
            };
            return ContCase { scope, k, x, y, body, target };
        }
    }

    pub fn handle_case(&mut self) -> HandleCase {
        loop {
            self.reset_pool();
            let scope = self.scope();
            let theory = self.theory();
            let (a, s, b) = (self.ty(1), self.ty(1), self.ty(1));
            let d = self.premise_depth();
            let c = self.comp(&scope.under(theory.as_effect_context()), &a, d);
            let handler = self.handler(&scope, &theory, &a, &s, &b, d);
            let state = self.expr(&scope, &s, d);
            if !comp_has(&scope.under(theory.as_effect_context()), &c, &a) || !expr_has(&scope, &state, &s) {
                continue;
            }
            match check_handler(&scope.delta, &scope.gamma, &handler, &a, &s) {
                Ok(sig) if conforms(&sig.output, &b) => return HandleCase { scope, c, handler, state, ty: sig.output },
                _ => continue,
            }
        }
    }

    pub fn seq_case(&mut self) -> SeqCase {
        loop {
            self.reset_pool();
            let mut scope = self.scope();
            let ambient = self.theory();
            scope.gamma = ambient.as_effect_context();
            let source = self.theory();
            let a = self.ty(1);
            let d = self.premise_depth();
            let c = self.comp(&scope.under(source.as_effect_context()), &a, d);
            if !comp_has(&scope.under(source.as_effect_context()), &c, &a) {
                continue;
            }
            let n = self.rng.gen_range(1..=2);
            let mut theories = vec![self.superset(&source)];
            for _ in 1..n {
                theories.push(self.theory());
            }
            let mut clauses = Vec::new();
            let mut input = a.clone();
            for i in 0..n {
                let around = theories.get(i + 1).unwrap_or(&ambient).clone();
                let output = self.ty(1);
                let clause = self.seq_clause(&scope.under(around.as_effect_context()), &theories[i], &input, &output, d);
                clauses.push(clause);
                input = output;
            }
            let seq = HandlingSeq { clauses };
            match infer_hseq(&scope.delta, &ambient, &seq, &a, &source) {
                Ok(ty) => return SeqCase { scope: scope.under(source.as_effect_context()), ambient, c, seq, ty },
                Err(_) => continue,
            }
        }
    }

    pub fn modal_case(&mut self) -> ModalCase {
        loop {
            self.reset_pool();
            let scope = self.scope();
            let theory = self.theory();
            let a = self.ty(1);
            let d = self.premise_depth();
            let inner = scope.under(theory.as_effect_context());
            let body = self.comp(&inner, &a, d);
            if !comp_has(&inner, &body, &a) {
                continue;
            }
            let taken: BTreeSet<Name> = scope.modals().into_iter().map(|(n, _, _)| n).collect();
            let u = fresh_name(&self.modal_name(), &taken);
            let target_scope = scope.modal(&u, a.clone(), theory.clone());
            let ty = self.ty(1);
            let target = if self.chance(0.5) {
                Term::Comp(self.comp(&target_scope, &ty, d + 1))
            } else {
                Term::Expr(self.expr(&target_scope, &ty, d + 1))
            };
            let ok = match &target {
                Term::Comp(c) => comp_has(&target_scope, c, &ty),
                Term::Expr(e) => expr_has(&target_scope, e, &ty),
                _ => false,
            };
            if ok {
                return ModalCase { scope, theory, body, u, target, ty };
            }
        }
    }

    pub fn eval_case(&mut self) -> EvalCase {
        loop {
            self.reset_pool();
            let scope = self.scope().under(EffectContext::empty());
            let a = self.ty(1);
            let d = self.premise_depth();
            let c = self.comp(&scope, &a, d);
            if comp_has(&scope, &c, &a) {
                return EvalCase { scope, c, ty: a };
            }
        }
    }
}

fn comp_has(scope: &Scope, c: &Comp, ty: &Type) -> bool {
    infer_comp(&scope.delta, &scope.gamma, c).is_ok_and(|found| conforms(&found, ty))
}

fn expr_has(scope: &Scope, e: &Expr, ty: &Type) -> bool {
    infer_expr(&scope.delta, e).is_ok_and(|found| conforms(&found, ty))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn programs_are_closed_and_well_typed() {
        let mut gen = Gen::new(7);
        for _ in 0..200 {
            let p = gen.program();
            assert!(p.term_free_vars_closed(), "{}", p.term);
            assert_eq!(infer_closed(&p.term).unwrap(), p.ty);
        }
    }

    #[test]
    fn generation_is_deterministic() {
        let a: Vec<String> = (0..20).map(|_| ()).scan(Gen::new(3), |g, _| Some(g.program().term.to_string())).collect();
        let b: Vec<String> = (0..20).map(|_| ()).scan(Gen::new(3), |g, _| Some(g.program().term.to_string())).collect();
        assert_eq!(a, b);
    }

    #[test]
    fn programs_use_handlers() {
        let mut gen = Gen::new(11);
        let handled = (0..300).filter(|_| gen.program().term.to_string().contains("handle")).count();
        assert!(handled > 20, "{handled}");
    }

    impl Program {
        fn term_free_vars_closed(&self) -> bool {
            match &self.term {
                Term::Expr(e) => e.free_vars().is_closed(),
                Term::Comp(c) => c.free_vars().is_closed(),
                _ => false,
            }
        }
    }
}
