//! Abstract syntax: types, contexts and the five term categories.
//!
//! Terms use named variables in four disjoint namespaces: values, modal
//! variables, operations and continuations. Binders are α-renamed lazily by
//! the substitution engine; [`fresh_name`] supplies the new names.

mod alpha;
mod free;
mod rename;

use std::collections::BTreeSet;
use std::fmt;

pub use alpha::AlphaEq;
pub use free::{all_names, FreeVars, Names};
pub use rename::Rename;

pub type Name = String;

/// An operation declaration `op ÷ A ⇒ B`.
#[derive(Clone, Debug, PartialEq)]
pub struct OpDecl {
    pub name: Name,
    pub input: Type,
    pub output: Type,
}

impl OpDecl {
    pub fn new(name: impl Into<Name>, input: Type, output: Type) -> Self {
        OpDecl { name: name.into(), input, output }
    }
}

/// An algebraic theory: an effect context holding only operations.
///
/// Equality is name-keyed set equality, so two theories listing the same
/// declarations in a different order are equal.
#[derive(Clone, Debug, Default)]
pub struct Theory {
    pub ops: Vec<OpDecl>,
}

impl Theory {
    pub fn empty() -> Self {
        Theory { ops: Vec::new() }
    }

    pub fn new(ops: Vec<OpDecl>) -> Self {
        Theory { ops }
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn get(&self, name: &str) -> Option<&OpDecl> {
        self.ops.iter().find(|op| op.name == name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.ops.iter().map(|op| op.name.as_str())
    }

    /// The first operation name that is declared twice, if any.
    pub fn duplicate(&self) -> Option<&str> {
        let mut seen = BTreeSet::new();
        self.ops
            .iter()
            .map(|op| op.name.as_str())
            .find(|name| !seen.insert(*name))
    }

    /// Concatenation of two theories; callers check for clashes.
    pub fn concat(&self, other: &Theory) -> Theory {
        let mut ops = self.ops.clone();
        ops.extend(other.ops.iter().cloned());
        Theory { ops }
    }

    pub fn as_effect_context(&self) -> EffectContext {
        EffectContext {
            entries: self.ops.iter().cloned().map(EffectEntry::Op).collect(),
        }
    }
}

impl PartialEq for Theory {
    fn eq(&self, other: &Self) -> bool {
        theory_subset(self, other) && theory_subset(other, self)
    }
}

/// True iff every declaration of `small` appears in `big` with the same name
/// and the same input and output types.
pub fn theory_subset(small: &Theory, big: &Theory) -> bool {
    small
        .ops
        .iter()
        .all(|op| big.get(&op.name).is_some_and(|b| b.input == op.input && b.output == op.output))
}

#[derive(Clone, Debug, PartialEq)]
pub enum Type {
    Base(Name),
    Unit,
    Int,
    Bool,
    Bottom,
    Prod(Box<Type>, Box<Type>),
    List(Box<Type>),
    Arrow(Box<Type>, Box<Type>),
    /// The contextual modal type `[Ψ]A`.
    Modal(Theory, Box<Type>),
}

impl Type {
    pub fn prod(a: Type, b: Type) -> Type {
        Type::Prod(Box::new(a), Box::new(b))
    }

    pub fn list(a: Type) -> Type {
        Type::List(Box::new(a))
    }

    pub fn arrow(a: Type, b: Type) -> Type {
        Type::Arrow(Box::new(a), Box::new(b))
    }

    pub fn modal(theory: Theory, a: Type) -> Type {
        Type::Modal(theory, Box::new(a))
    }
}

/// Structural type equality; modal theories compare as sets.
pub fn type_equal(a: &Type, b: &Type) -> bool {
    a == b
}

#[derive(Clone, Debug, PartialEq)]
pub enum EffectEntry {
    Op(OpDecl),
    /// A continuation `k ∼: A/S → B`.
    Cont { name: Name, input: Type, state: Type, output: Type },
}

impl EffectEntry {
    pub fn name(&self) -> &str {
        match self {
            EffectEntry::Op(op) => &op.name,
            EffectEntry::Cont { name, .. } => name,
        }
    }
}

/// The effect context `Γ`: operations and continuations, innermost last.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct EffectContext {
    pub entries: Vec<EffectEntry>,
}

impl EffectContext {
    pub fn empty() -> Self {
        EffectContext::default()
    }

    pub fn lookup_op(&self, name: &str) -> Option<&OpDecl> {
        self.entries.iter().rev().find_map(|entry| match entry {
            EffectEntry::Op(op) if op.name == name => Some(op),
            _ => None,
        })
    }

    pub fn lookup_cont(&self, name: &str) -> Option<(&Type, &Type, &Type)> {
        self.entries.iter().rev().find_map(|entry| match entry {
            EffectEntry::Cont { name: n, input, state, output } if n == name => {
                Some((input, state, output))
            }
            _ => None,
        })
    }

    pub fn with_cont(&self, name: &str, input: Type, state: Type, output: Type) -> Self {
        let mut entries = self.entries.clone();
        entries.push(EffectEntry::Cont { name: name.to_string(), input, state, output });
        EffectContext { entries }
    }

    pub fn with_op(&self, op: OpDecl) -> Self {
        let mut entries = self.entries.clone();
        entries.push(EffectEntry::Op(op));
        EffectContext { entries }
    }

    /// The operations of this context as a theory, or `None` if it holds a
    /// continuation.
    pub fn as_theory(&self) -> Option<Theory> {
        self.entries
            .iter()
            .map(|entry| match entry {
                EffectEntry::Op(op) => Some(op.clone()),
                EffectEntry::Cont { .. } => None,
            })
            .collect::<Option<Vec<_>>>()
            .map(Theory::new)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ModalEntry {
    Val { name: Name, ty: Type },
    /// A modal variable `u :: A[Ψ]`.
    Modal { name: Name, ty: Type, theory: Theory },
}

/// The modal context `Δ`: value and modal bindings, innermost last.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ModalContext {
    pub entries: Vec<ModalEntry>,
}

impl ModalContext {
    pub fn empty() -> Self {
        ModalContext::default()
    }

    pub fn lookup_val(&self, name: &str) -> Option<&Type> {
        self.entries.iter().rev().find_map(|entry| match entry {
            ModalEntry::Val { name: n, ty } if n == name => Some(ty),
            _ => None,
        })
    }

    pub fn lookup_modal(&self, name: &str) -> Option<(&Type, &Theory)> {
        self.entries.iter().rev().find_map(|entry| match entry {
            ModalEntry::Modal { name: n, ty, theory } if n == name => Some((ty, theory)),
            _ => None,
        })
    }

    pub fn with_val(&self, name: &str, ty: Type) -> Self {
        let mut entries = self.entries.clone();
        entries.push(ModalEntry::Val { name: name.to_string(), ty });
        ModalContext { entries }
    }

    pub fn with_modal(&self, name: &str, ty: Type, theory: Theory) -> Self {
        let mut entries = self.entries.clone();
        entries.push(ModalEntry::Modal { name: name.to_string(), ty, theory });
        ModalContext { entries }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl ArithOp {
    pub fn symbol(self) -> &'static str {
        match self {
            ArithOp::Add => "+",
            ArithOp::Sub => "-",
            ArithOp::Mul => "*",
            ArithOp::Div => "/",
        }
    }

    /// `None` on division by zero or overflow.
    pub fn apply(self, a: i64, b: i64) -> Option<i64> {
        match self {
            ArithOp::Add => a.checked_add(b),
            ArithOp::Sub => a.checked_sub(b),
            ArithOp::Mul => a.checked_mul(b),
            ArithOp::Div => a.checked_div(b),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CmpOp {
    Eq,
    Lt,
}

impl CmpOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Eq => "=",
            CmpOp::Lt => "<",
        }
    }
}

/// A recursive definition `let fix f(x:A):[Ψ]B = body in ...`.
#[derive(Clone, Debug, PartialEq)]
pub struct FixDef {
    pub name: Name,
    pub param: Name,
    pub param_ty: Type,
    pub theory: Theory,
    pub ret_ty: Type,
    pub body: Comp,
}

impl FixDef {
    /// The type `A -> [Ψ]B` bound to the recursive name.
    pub fn fun_type(&self) -> Type {
        Type::arrow(self.param_ty.clone(), Type::modal(self.theory.clone(), self.ret_ty.clone()))
    }
}

/// Pure expressions.
#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Var(Name),
    Lam(Name, Type, Box<Expr>),
    App(Box<Expr>, Box<Expr>),
    Box(Theory, Box<Comp>),
    LetBox(Name, Box<Expr>, Box<Expr>),
    Eval(HandlingSeq, Name),
    Fix(Box<FixDef>, Box<Expr>),
    Int(i64),
    Bool(bool),
    Unit,
    Pair(Box<Expr>, Box<Expr>),
    Fst(Box<Expr>),
    Snd(Box<Expr>),
    Nil(Type),
    /// A non-empty list literal `[e1, ..., en]`.
    List(Vec<Expr>),
    Append(Box<Expr>, Box<Expr>),
    Arith(ArithOp, Box<Expr>, Box<Expr>),
    Cmp(CmpOp, Box<Expr>, Box<Expr>),
    If(Box<Expr>, Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn var(name: impl Into<Name>) -> Expr {
        Expr::Var(name.into())
    }

    pub fn lam(x: impl Into<Name>, ty: Type, body: Expr) -> Expr {
        Expr::Lam(x.into(), ty, Box::new(body))
    }

    pub fn app(f: Expr, a: Expr) -> Expr {
        Expr::App(Box::new(f), Box::new(a))
    }

    pub fn boxed(theory: Theory, body: Comp) -> Expr {
        Expr::Box(theory, Box::new(body))
    }

    pub fn let_box(u: impl Into<Name>, bound: Expr, body: Expr) -> Expr {
        Expr::LetBox(u.into(), Box::new(bound), Box::new(body))
    }

    pub fn pair(a: Expr, b: Expr) -> Expr {
        Expr::Pair(Box::new(a), Box::new(b))
    }

    pub fn arith(op: ArithOp, a: Expr, b: Expr) -> Expr {
        Expr::Arith(op, Box::new(a), Box::new(b))
    }

    pub fn cmp(op: CmpOp, a: Expr, b: Expr) -> Expr {
        Expr::Cmp(op, Box::new(a), Box::new(b))
    }

    pub fn if_(c: Expr, t: Expr, e: Expr) -> Expr {
        Expr::If(Box::new(c), Box::new(t), Box::new(e))
    }
}

/// Effectful computations.
#[derive(Clone, Debug, PartialEq)]
pub enum Comp {
    Ret(Expr),
    Bind(Stmt, Name, Box<Comp>),
    LetBox(Name, Expr, Box<Comp>),
    Fix(Box<FixDef>, Box<Comp>),
    If(Expr, Box<Comp>, Box<Comp>),
}

impl Comp {
    pub fn ret(e: Expr) -> Comp {
        Comp::Ret(e)
    }

    pub fn bind(s: Stmt, x: impl Into<Name>, rest: Comp) -> Comp {
        Comp::Bind(s, x.into(), Box::new(rest))
    }

    pub fn let_box(u: impl Into<Name>, bound: Expr, body: Comp) -> Comp {
        Comp::LetBox(u.into(), bound, Box::new(body))
    }

    pub fn if_(c: Expr, t: Comp, e: Comp) -> Comp {
        Comp::If(c, Box::new(t), Box::new(e))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Stmt {
    Op(Name, Expr),
    Cont(Name, Expr, Expr),
    /// `handle u [Θ] with h init e`.
    Handle(Name, HandlingSeq, Box<Handler>, Expr),
}

#[derive(Clone, Debug, PartialEq)]
pub struct OpClause {
    pub op: Name,
    pub x: Name,
    pub k: Name,
    pub z: Name,
    pub body: Comp,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RetClause {
    pub x: Name,
    pub z: Name,
    pub body: Comp,
}

/// A deep parametrized handler, ascribed with the theory it handles.
#[derive(Clone, Debug, PartialEq)]
pub struct Handler {
    pub theory: Theory,
    pub clauses: Vec<OpClause>,
    pub ret: RetClause,
}

impl Handler {
    pub fn clause(&self, op: &str) -> Option<&OpClause> {
        self.clauses.iter().find(|c| c.op == op)
    }
}

/// One pending handler application `h(e)(x.c)` in a handling sequence.
#[derive(Clone, Debug, PartialEq)]
pub struct SeqClause {
    pub handler: Handler,
    pub init: Expr,
    pub x: Name,
    pub cont: Comp,
}

/// A handling sequence `Θ`, applied left to right.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct HandlingSeq {
    pub clauses: Vec<SeqClause>,
}

impl HandlingSeq {
    pub fn empty() -> Self {
        HandlingSeq::default()
    }

    pub fn is_empty(&self) -> bool {
        self.clauses.is_empty()
    }

    pub fn extended(&self, clause: SeqClause) -> Self {
        let mut clauses = self.clauses.clone();
        clauses.push(clause);
        HandlingSeq { clauses }
    }
}

/// Any term, tagged by its syntactic category.
#[derive(Clone, Debug, PartialEq)]
pub enum Term {
    Expr(Expr),
    Comp(Comp),
    Stmt(Stmt),
    Handler(Handler),
    Seq(HandlingSeq),
}

impl From<Expr> for Term {
    fn from(e: Expr) -> Self {
        Term::Expr(e)
    }
}

impl From<Comp> for Term {
    fn from(c: Comp) -> Self {
        Term::Comp(c)
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Expr(e) => write!(f, "{e}"),
            Term::Comp(c) => write!(f, "{c}"),
            Term::Stmt(s) => write!(f, "{s}"),
            Term::Handler(h) => write!(f, "{h}"),
            Term::Seq(s) => write!(f, "{s}"),
        }
    }
}

/// `base` if it is not in `avoid`, otherwise `base` followed by the smallest
/// positive integer suffix that is not in `avoid`.
pub fn fresh_name(base: &str, avoid: &BTreeSet<Name>) -> Name {
    if !avoid.contains(base) {
        return base.to_string();
    }
    (1u64..)
        .map(|i| format!("{base}{i}"))
        .find(|candidate| !avoid.contains(candidate))
        .expect("unbounded suffix search")
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

    fn set(names: &[&str]) -> BTreeSet<Name> {
        names.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn fresh_name_suffixes() {
        assert_eq!(fresh_name("x", &set(&[])), "x");
        assert_eq!(fresh_name("x", &set(&["x"])), "x1");
        assert_eq!(fresh_name("x", &set(&["x", "x1"])), "x2");
        assert_eq!(fresh_name("x", &set(&["x1"])), "x");
    }

    #[test]
    fn theory_subset_cases() {
        assert!(theory_subset(&Theory::empty(), &st()));
        assert!(theory_subset(&st(), &st()));
        let small = Theory::new(vec![OpDecl::new("get", Type::Unit, Type::Int)]);
        let wrong = Theory::new(vec![OpDecl::new("get", Type::Unit, Type::Bool)]);
        assert!(!theory_subset(&small, &wrong));
        assert!(theory_subset(&small, &st()));
        assert!(!theory_subset(&st(), &small));
    }

    #[test]
    fn modal_types_compare_theories_as_sets() {
        let reordered = Theory::new(vec![
            OpDecl::new("set", Type::Int, Type::Unit),
            OpDecl::new("get", Type::Unit, Type::Int),
        ]);
        assert!(type_equal(&Type::modal(st(), Type::Int), &Type::modal(reordered, Type::Int)));
        assert!(!type_equal(&Type::arrow(Type::Int, Type::Int), &Type::Int));
        assert!(type_equal(&Type::Bottom, &Type::Bottom));
    }

    #[test]
    fn duplicate_operation_names_are_detected() {
        let dup = Theory::new(vec![
            OpDecl::new("op", Type::Unit, Type::Int),
            OpDecl::new("op", Type::Unit, Type::Int),
        ]);
        assert_eq!(dup.duplicate(), Some("op"));
        assert_eq!(st().duplicate(), None);
    }

    #[test]
    fn contexts_resolve_innermost_first() {
        let delta = ModalContext::empty()
            .with_val("x", Type::Int)
            .with_modal("x", Type::Bool, Theory::empty())
            .with_val("x", Type::Unit);
        assert_eq!(delta.lookup_val("x"), Some(&Type::Unit));
        assert_eq!(delta.lookup_modal("x").map(|(t, _)| t), Some(&Type::Bool));
        let gamma = st().as_effect_context().with_cont("get", Type::Int, Type::Int, Type::Int);
        assert_eq!(gamma.lookup_op("get").map(|op| &op.output), Some(&Type::Int));
        assert!(gamma.lookup_cont("get").is_some());
        assert!(gamma.as_theory().is_none());
    }
}
