//! Synthesis-mode typechecking.
//!
//! One function per judgment form. Every binder, box theory, fix signature
//! and handler theory is annotated, so types are synthesized bottom-up and
//! never propagated downwards. Handler input and state types flow in from
//! the use site; the output type comes from the return clause.
//!
//! `bot` is the empty type: wherever a type is checked against an expected
//! one, a `bot` (or a type built from `bot` in covariant positions) is
//! accepted, and the branches of an `if` are joined.

use std::fmt;

use thiserror::Error;

use crate::surface::{SourceFile, Span};
use crate::syntax::*;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TypeErrorKind {
    UnboundVariable,
    OpNotInContext,
    TheoryMismatch,
    NotAFunction,
    NotABox,
    ClauseCoverage,
    StateTypeMismatch,
    BottomIntroduction,
    ArgumentMismatch,
    IllFormedTheory,
}

impl TypeErrorKind {
    pub fn as_str(self) -> &'static str {
        match self {
            TypeErrorKind::UnboundVariable => "unbound-variable",
            TypeErrorKind::OpNotInContext => "op-not-in-context",
            TypeErrorKind::TheoryMismatch => "theory-mismatch",
            TypeErrorKind::NotAFunction => "not-a-function",
            TypeErrorKind::NotABox => "not-a-box",
            TypeErrorKind::ClauseCoverage => "clause-coverage",
            TypeErrorKind::StateTypeMismatch => "state-type-mismatch",
            TypeErrorKind::BottomIntroduction => "bottom-introduction",
            TypeErrorKind::ArgumentMismatch => "argument-mismatch",
            TypeErrorKind::IllFormedTheory => "ill-formed-theory",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        use TypeErrorKind::*;
        [
            UnboundVariable,
            OpNotInContext,
            TheoryMismatch,
            NotAFunction,
            NotABox,
            ClauseCoverage,
            StateTypeMismatch,
            BottomIntroduction,
            ArgumentMismatch,
            IllFormedTheory,
        ]
        .into_iter()
        .find(|k| k.as_str() == s)
    }
}

impl fmt::Display for TypeErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The judgment form under which an error arose.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Judgment {
    Expr,
    Comp,
    Stmt,
    Handler,
    Seq,
}

impl Judgment {
    pub fn as_str(self) -> &'static str {
        match self {
            Judgment::Expr => "expression",
            Judgment::Comp => "computation",
            Judgment::Stmt => "statement",
            Judgment::Handler => "handler",
            Judgment::Seq => "handling sequence",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Error)]
#[error("{kind}: expected {expected}, found {found}")]
pub struct TypeError {
    pub kind: TypeErrorKind,
    pub expected: String,
    pub found: String,
    pub judgment: Judgment,
    /// The identifier the error is about, used to position it in the source.
    pub subject: Option<Name>,
}

impl TypeError {
    fn new(kind: TypeErrorKind, judgment: Judgment, expected: impl fmt::Display, found: impl fmt::Display) -> Self {
        TypeError { kind, expected: expected.to_string(), found: found.to_string(), judgment, subject: None }
    }

    fn about(mut self, name: &str) -> Self {
        self.subject = Some(name.to_string());
        self
    }

    pub fn span_in(&self, file: &SourceFile) -> Span {
        match &self.subject {
            Some(name) => file.locate(name),
            None => file.main_span,
        }
    }

    /// `LINE:COL: KIND: expected TYPE, found TYPE`.
    pub fn render(&self, file: &SourceFile) -> String {
        let span = self.span_in(file);
        format!("{}:{}: {self}", span.line, span.column)
    }
}

type TResult<T> = Result<T, TypeError>;

/// The signature `A ⇒ Ψ | S ⇛ C` of a handler.
#[derive(Clone, Debug, PartialEq)]
pub struct HandlerSig {
    pub input: Type,
    pub theory: Theory,
    pub state: Type,
    pub output: Type,
}

/// True iff a term of type `found` may stand where `expected` is required:
/// the types are equal up to occurrences of `bot` in `found` at covariant
/// positions (and in `expected` at contravariant ones).
pub fn conforms(found: &Type, expected: &Type) -> bool {
    match (found, expected) {
        (Type::Bottom, _) => true,
        (Type::Prod(a, b), Type::Prod(c, d)) => conforms(a, c) && conforms(b, d),
        (Type::List(a), Type::List(b)) => conforms(a, b),
        (Type::Arrow(a, b), Type::Arrow(c, d)) => conforms(c, a) && conforms(b, d),
        (Type::Modal(p, a), Type::Modal(q, b)) => p == q && conforms(a, b),
        _ => found == expected,
    }
}

/// The least type both arguments conform to, if any.
pub fn join(a: &Type, b: &Type) -> Option<Type> {
    match (a, b) {
        (Type::Bottom, t) | (t, Type::Bottom) => Some(t.clone()),
        (Type::Prod(a1, a2), Type::Prod(b1, b2)) => Some(Type::prod(join(a1, b1)?, join(a2, b2)?)),
        (Type::List(a), Type::List(b)) => Some(Type::list(join(a, b)?)),
        (Type::Arrow(a1, a2), Type::Arrow(b1, b2)) => Some(Type::arrow(meet(a1, b1)?, join(a2, b2)?)),
        (Type::Modal(p, a), Type::Modal(q, b)) if p == q => Some(Type::modal(p.clone(), join(a, b)?)),
        _ if a == b => Some(a.clone()),
        _ => None,
    }
}

fn meet(a: &Type, b: &Type) -> Option<Type> {
    match (a, b) {
        (Type::Bottom, _) | (_, Type::Bottom) => Some(Type::Bottom),
        (Type::Prod(a1, a2), Type::Prod(b1, b2)) => Some(Type::prod(meet(a1, b1)?, meet(a2, b2)?)),
        (Type::List(a), Type::List(b)) => Some(Type::list(meet(a, b)?)),
        (Type::Arrow(a1, a2), Type::Arrow(b1, b2)) => Some(Type::arrow(join(a1, b1)?, meet(a2, b2)?)),
        (Type::Modal(p, a), Type::Modal(q, b)) if p == q => Some(Type::modal(p.clone(), meet(a, b)?)),
        _ if a == b => Some(a.clone()),
        _ => None,
    }
}

/// Checks that `found` conforms to `expected`, reporting `kind` otherwise;
/// demanding a `bot` is reported as an attempt to introduce it.
fn expect(found: &Type, expected: &Type, kind: TypeErrorKind, judgment: Judgment) -> TResult<()> {
    if conforms(found, expected) {
        Ok(())
    } else if *expected == Type::Bottom {
        Err(TypeError::new(TypeErrorKind::BottomIntroduction, judgment, expected, found))
    } else {
        Err(TypeError::new(kind, judgment, expected, found))
    }
}

fn join_branches(a: &Type, b: &Type, judgment: Judgment) -> TResult<Type> {
    join(a, b).ok_or_else(|| TypeError::new(TypeErrorKind::ArgumentMismatch, judgment, a, b))
}

pub fn check_theory(theory: &Theory) -> TResult<()> {
    if let Some(dup) = theory.duplicate() {
        return Err(TypeError::new(
            TypeErrorKind::IllFormedTheory,
            Judgment::Expr,
            "distinct operation names",
            format!("`{dup}` declared twice"),
        )
        .about(dup));
    }
    for op in &theory.ops {
        check_type(&op.input)?;
        check_type(&op.output)?;
    }
    Ok(())
}

pub fn check_type(ty: &Type) -> TResult<()> {
    match ty {
        Type::Base(_) | Type::Unit | Type::Int | Type::Bool | Type::Bottom => Ok(()),
        Type::Prod(a, b) | Type::Arrow(a, b) => {
            check_type(a)?;
            check_type(b)
        }
        Type::List(a) => check_type(a),
        Type::Modal(theory, a) => {
            check_theory(theory)?;
            check_type(a)
        }
    }
}

fn is_equality_type(ty: &Type) -> bool {
    match ty {
        Type::Unit | Type::Int | Type::Bool | Type::Bottom => true,
        Type::Prod(a, b) => is_equality_type(a) && is_equality_type(b),
        Type::List(a) => is_equality_type(a),
        _ => false,
    }
}

fn int_operand(e: &Expr, delta: &ModalContext) -> TResult<()> {
    let ty = infer_expr(delta, e)?;
    expect(&ty, &Type::Int, TypeErrorKind::ArgumentMismatch, Judgment::Expr)
}

/// Synthesizes the type of an expression under `delta`.
pub fn infer_expr(delta: &ModalContext, e: &Expr) -> TResult<Type> {
    use TypeErrorKind::*;
    let j = Judgment::Expr;
    match e {
        Expr::Var(x) => delta
            .lookup_val(x)
            .cloned()
            .ok_or_else(|| TypeError::new(UnboundVariable, j, "a variable in scope", format!("`{x}`")).about(x)),
        Expr::Lam(x, ty, body) => {
            check_type(ty)?;
            let cod = infer_expr(&delta.with_val(x, ty.clone()), body)?;
            Ok(Type::arrow(ty.clone(), cod))
        }
        Expr::App(f, a) => {
            let fty = infer_expr(delta, f)?;
            let aty = infer_expr(delta, a)?;
            match fty {
                Type::Arrow(dom, cod) => {
                    expect(&aty, &dom, ArgumentMismatch, j)?;
                    Ok(*cod)
                }
                other => Err(TypeError::new(NotAFunction, j, format!("a function from {aty}"), other)),
            }
        }
        Expr::Box(theory, c) => {
            check_theory(theory)?;
            let ty = infer_comp(delta, &theory.as_effect_context(), c)?;
            Ok(Type::modal(theory.clone(), ty))
        }
        Expr::LetBox(u, bound, body) => {
            let (ty, theory) = unbox(delta, bound)?;
            infer_expr(&delta.with_modal(u, ty, theory), body)
        }
        Expr::Eval(seq, u) => {
            let (ty, source) = lookup_modal(delta, u, j)?;
            infer_hseq(delta, &Theory::empty(), seq, &ty, &source)
        }
        Expr::Fix(def, scope) => {
            check_fix(delta, def)?;
            infer_expr(&delta.with_val(&def.name, def.fun_type()), scope)
        }
        Expr::Int(_) => Ok(Type::Int),
        Expr::Bool(_) => Ok(Type::Bool),
        Expr::Unit => Ok(Type::Unit),
        Expr::Pair(a, b) => Ok(Type::prod(infer_expr(delta, a)?, infer_expr(delta, b)?)),
        Expr::Fst(p) | Expr::Snd(p) => match infer_expr(delta, p)? {
            Type::Prod(a, b) => Ok(if matches!(e, Expr::Fst(_)) { *a } else { *b }),
            other => Err(TypeError::new(ArgumentMismatch, j, "a product", other)),
        },
        Expr::Nil(ty) => {
            check_type(ty)?;
            Ok(Type::list(ty.clone()))
        }
        Expr::List(items) => {
            let mut ty = Type::Bottom;
            for item in items {
                let ity = infer_expr(delta, item)?;
                ty = join_branches(&ty, &ity, j)?;
            }
            Ok(Type::list(ty))
        }
        Expr::Append(a, b) => {
            let aty = infer_expr(delta, a)?;
            let bty = infer_expr(delta, b)?;
            for ty in [&aty, &bty] {
                if !matches!(ty, Type::List(_) | Type::Bottom) {
                    return Err(TypeError::new(ArgumentMismatch, j, "a list", ty));
                }
            }
            join_branches(&aty, &bty, j)
        }
        Expr::Arith(_, a, b) => {
            int_operand(a, delta)?;
            int_operand(b, delta)?;
            Ok(Type::Int)
        }
        Expr::Cmp(op, a, b) => {
            let aty = infer_expr(delta, a)?;
            let bty = infer_expr(delta, b)?;
            match op {
                CmpOp::Lt => {
                    expect(&aty, &Type::Int, ArgumentMismatch, j)?;
                    expect(&bty, &Type::Int, ArgumentMismatch, j)?;
                }
                CmpOp::Eq => {
                    let ty = join_branches(&aty, &bty, j)?;
                    if !is_equality_type(&ty) {
                        return Err(TypeError::new(ArgumentMismatch, j, "a type with equality", ty));
                    }
                }
            }
            Ok(Type::Bool)
        }
        Expr::If(c, t, f) => {
            let cty = infer_expr(delta, c)?;
            expect(&cty, &Type::Bool, ArgumentMismatch, j)?;
            let tty = infer_expr(delta, t)?;
            let fty = infer_expr(delta, f)?;
            join_branches(&tty, &fty, j)
        }
    }
}

fn unbox(delta: &ModalContext, bound: &Expr) -> TResult<(Type, Theory)> {
    match infer_expr(delta, bound)? {
        Type::Modal(theory, ty) => Ok((*ty, theory)),
        other => Err(TypeError::new(TypeErrorKind::NotABox, Judgment::Expr, "a modal type [ {...} ] A", other)),
    }
}

fn lookup_modal(delta: &ModalContext, u: &str, j: Judgment) -> TResult<(Type, Theory)> {
    delta
        .lookup_modal(u)
        .map(|(ty, theory)| (ty.clone(), theory.clone()))
        .ok_or_else(|| {
            TypeError::new(TypeErrorKind::UnboundVariable, j, "a modal variable in scope", format!("`{u}`")).about(u)
        })
}

fn check_fix(delta: &ModalContext, def: &FixDef) -> TResult<()> {
    check_type(&def.param_ty)?;
    check_theory(&def.theory)?;
    check_type(&def.ret_ty)?;
    let inner = delta.with_val(&def.name, def.fun_type()).with_val(&def.param, def.param_ty.clone());
    let ty = infer_comp(&inner, &def.theory.as_effect_context(), &def.body)?;
    expect(&ty, &def.ret_ty, TypeErrorKind::ArgumentMismatch, Judgment::Comp).map_err(|e| e.about(&def.name))
}

/// Synthesizes the type of a computation under `delta` and effect context
/// `gamma`.
pub fn infer_comp(delta: &ModalContext, gamma: &EffectContext, c: &Comp) -> TResult<Type> {
    match c {
        Comp::Ret(e) => infer_expr(delta, e),
        Comp::Bind(s, x, rest) => {
            let ty = infer_stmt(delta, gamma, s)?;
            infer_comp(&delta.with_val(x, ty), gamma, rest)
        }
        Comp::LetBox(u, bound, body) => {
            let (ty, theory) = unbox(delta, bound)?;
            infer_comp(&delta.with_modal(u, ty, theory), gamma, body)
        }
        Comp::Fix(def, scope) => {
            check_fix(delta, def)?;
            infer_comp(&delta.with_val(&def.name, def.fun_type()), gamma, scope)
        }
        Comp::If(cond, t, f) => {
            let cty = infer_expr(delta, cond)?;
            expect(&cty, &Type::Bool, TypeErrorKind::ArgumentMismatch, Judgment::Comp)?;
            let tty = infer_comp(delta, gamma, t)?;
            let fty = infer_comp(delta, gamma, f)?;
            join_branches(&tty, &fty, Judgment::Comp)
        }
    }
}

fn describe_context(gamma: &EffectContext) -> String {
    match gamma.as_theory() {
        Some(theory) => format!("an operation of {theory}"),
        None => {
            let ops = Theory::new(
                gamma
                    .entries
                    .iter()
                    .filter_map(|e| match e {
                        EffectEntry::Op(op) => Some(op.clone()),
                        EffectEntry::Cont { .. } => None,
                    })
                    .collect(),
            );
            format!("an operation of {ops}")
        }
    }
}

/// Synthesizes the type of a statement.
pub fn infer_stmt(delta: &ModalContext, gamma: &EffectContext, s: &Stmt) -> TResult<Type> {
    use TypeErrorKind::*;
    let j = Judgment::Stmt;
    match s {
        Stmt::Op(op, arg) => {
            let decl = gamma
                .lookup_op(op)
                .ok_or_else(|| TypeError::new(OpNotInContext, j, describe_context(gamma), format!("`{op}`")).about(op))?;
            let aty = infer_expr(delta, arg)?;
            expect(&aty, &decl.input, ArgumentMismatch, j).map_err(|e| e.about(op))?;
            Ok(decl.output.clone())
        }
        Stmt::Cont(k, arg, state) => {
            let (input, sty, output) = gamma.lookup_cont(k).ok_or_else(|| {
                TypeError::new(UnboundVariable, j, "a continuation in scope", format!("`{k}`")).about(k)
            })?;
            let aty = infer_expr(delta, arg)?;
            expect(&aty, input, ArgumentMismatch, j).map_err(|e| e.about(k))?;
            let found = infer_expr(delta, state)?;
            expect(&found, sty, StateTypeMismatch, j).map_err(|e| e.about(k))?;
            Ok(output.clone())
        }
        Stmt::Handle(u, seq, h, init) => {
            let (ty, source) = lookup_modal(delta, u, j)?;
            let input = infer_hseq(delta, &h.theory, seq, &ty, &source).map_err(|e| match e.subject {
                None => e.about(u),
                Some(_) => e,
            })?;
            let state = infer_expr(delta, init)?;
            Ok(check_handler(delta, gamma, h, &input, &state)?.output)
        }
    }
}

/// Checks a handler used at input type `input` with state type `state` and
/// synthesizes its signature; the output type is that of the return clause.
pub fn check_handler(
    delta: &ModalContext,
    gamma: &EffectContext,
    h: &Handler,
    input: &Type,
    state: &Type,
) -> TResult<HandlerSig> {
    use TypeErrorKind::*;
    let j = Judgment::Handler;
    check_theory(&h.theory)?;
    for op in &h.theory.ops {
        let count = h.clauses.iter().filter(|c| c.op == op.name).count();
        if count != 1 {
            return Err(TypeError::new(
                ClauseCoverage,
                j,
                format!("one clause for `{}`", op.name),
                format!("{count} clauses"),
            )
            .about(&op.name));
        }
    }
    if let Some(extra) = h.clauses.iter().find(|c| h.theory.get(&c.op).is_none()) {
        return Err(TypeError::new(ClauseCoverage, j, format!("clauses for the operations of {}", h.theory), format!("a clause for `{}`", extra.op))
            .about(&extra.op));
    }
    let ret_delta = delta.with_val(&h.ret.x, input.clone()).with_val(&h.ret.z, state.clone());
    let output = infer_comp(&ret_delta, gamma, &h.ret.body)?;
    for clause in &h.clauses {
        let decl = h.theory.get(&clause.op).expect("coverage checked");
        let clause_delta = delta.with_val(&clause.x, decl.input.clone()).with_val(&clause.z, state.clone());
        let clause_gamma = gamma.with_cont(&clause.k, decl.output.clone(), state.clone(), output.clone());
        let ty = infer_comp(&clause_delta, &clause_gamma, &clause.body)?;
        expect(&ty, &output, ArgumentMismatch, j).map_err(|e| e.about(&clause.op))?;
    }
    Ok(HandlerSig { input: input.clone(), theory: h.theory.clone(), state: state.clone(), output })
}

/// Types a handling sequence applied to a computation of type `input` over
/// `source`, in the ambient theory `ambient`; returns the result type.
pub fn infer_hseq(
    delta: &ModalContext,
    ambient: &Theory,
    seq: &HandlingSeq,
    input: &Type,
    source: &Theory,
) -> TResult<Type> {
    match seq.clauses.split_last() {
        None => {
            if theory_subset(source, ambient) {
                Ok(input.clone())
            } else {
                Err(TypeError::new(TypeErrorKind::TheoryMismatch, Judgment::Seq, ambient, source))
            }
        }
        Some((last, prefix)) => {
            let prefix = HandlingSeq { clauses: prefix.to_vec() };
            let handled = infer_hseq(delta, &last.handler.theory, &prefix, input, source)?;
            let state = infer_expr(delta, &last.init)?;
            let sig = check_handler(delta, &ambient.as_effect_context(), &last.handler, &handled, &state)?;
            infer_comp(&delta.with_val(&last.x, sig.output), &ambient.as_effect_context(), &last.cont)
        }
    }
}

/// Types a closed main term: an expression, or a computation in the empty
/// effect context.
pub fn infer_term(delta: &ModalContext, gamma: &EffectContext, t: &Term) -> TResult<Type> {
    match t {
        Term::Expr(e) => infer_expr(delta, e),
        Term::Comp(c) => infer_comp(delta, gamma, c),
        Term::Stmt(s) => infer_stmt(delta, gamma, s),
        Term::Handler(_) | Term::Seq(_) => Err(TypeError::new(
            TypeErrorKind::ArgumentMismatch,
            Judgment::Handler,
            "an expression or a computation",
            "a handler",
        )),
    }
}

pub fn infer_closed(t: &Term) -> TResult<Type> {
    infer_term(&ModalContext::empty(), &EffectContext::empty(), t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::{parse, parse_expr};

    fn st() -> Theory {
        Theory::new(vec![
            OpDecl::new("get", Type::Unit, Type::Int),
            OpDecl::new("set", Type::Int, Type::Unit),
        ])
    }

    fn closed(text: &str) -> TResult<Type> {
        infer_closed(&parse(text).unwrap().main)
    }

    #[test]
    fn box_of_get() {
        assert_eq!(closed("box {get:unit=>int, set:int=>unit}. get()").unwrap(), Type::modal(st(), Type::Int));
    }

    #[test]
    fn outer_operation_is_not_visible_inside_box() {
        let err = closed("box {get:unit=>int, set:int=>unit}. ret (box {}. get())").unwrap_err();
        assert_eq!(err.kind, TypeErrorKind::OpNotInContext);
        assert_eq!(err.subject.as_deref(), Some("get"));
    }

    #[test]
    fn bare_operation_needs_a_context() {
        let c = crate::surface::parse_comp("x <- get(); ret x").unwrap();
        let err = infer_comp(&ModalContext::empty(), &EffectContext::empty(), &c).unwrap_err();
        assert_eq!(err.kind, TypeErrorKind::OpNotInContext);
        assert_eq!(infer_comp(&ModalContext::empty(), &st().as_effect_context(), &c).unwrap(), Type::Int);
    }

    #[test]
    fn unbound_continuation() {
        let c = crate::surface::parse_comp("k(1; 2)").unwrap();
        let err = infer_comp(&ModalContext::empty(), &EffectContext::empty(), &c).unwrap_err();
        assert_eq!(err.kind, TypeErrorKind::UnboundVariable);
    }

    #[test]
    fn application_errors() {
        assert_eq!(closed("(1 2)").unwrap_err().kind, TypeErrorKind::NotAFunction);
        assert_eq!(closed("((fn x:int. x) true)").unwrap_err().kind, TypeErrorKind::ArgumentMismatch);
        assert_eq!(closed("let box u = 5 in 1").unwrap_err().kind, TypeErrorKind::NotABox);
    }

    #[test]
    fn handler_coverage_is_checked() {
        let text = "let box u = box {op:unit=>int, other:unit=>int}. op() in
            handle u with handler for {op:unit=>int, other:unit=>int} { op(x; k; z) -> k(1; z), return(x; z) -> ret x } init ()";
        assert_eq!(closed(text).unwrap_err().kind, TypeErrorKind::ClauseCoverage);
    }

    #[test]
    fn continuation_state_is_checked() {
        let text = "let box u = box {op:unit=>int}. op() in
            handle u with handler for {op:unit=>int} { op(x; k; z) -> k(1; true), return(x; z) -> ret x } init 0";
        assert_eq!(closed(text).unwrap_err().kind, TypeErrorKind::StateTypeMismatch);
    }

    #[test]
    fn theory_subset_is_required() {
        let text = "let box u = box {op:unit=>int}. op() in handle u with handler for {} { return(x; z) -> ret x } init 0";
        let err = closed(text).unwrap_err();
        assert_eq!(err.kind, TypeErrorKind::TheoryMismatch);
        assert_eq!(err.subject.as_deref(), Some("u"));
    }

    #[test]
    fn continuation_into_bottom() {
        let text = "let box u = box {raise:unit=>bot}. raise() in
            handle u with handler for {raise:unit=>bot} { raise(x; k; z) -> k(1; z), return(x; z) -> ret 0 } init ()";
        assert_eq!(closed(text).unwrap_err().kind, TypeErrorKind::BottomIntroduction);
    }

    #[test]
    fn bottom_joins_with_anything() {
        let text = "box {raise:unit=>bot}. if true then raise() else ret (1, 2)";
        let exn = Theory::new(vec![OpDecl::new("raise", Type::Unit, Type::Bottom)]);
        assert_eq!(closed(text).unwrap(), Type::modal(exn, Type::prod(Type::Int, Type::Int)));
        assert!(conforms(&Type::prod(Type::Bottom, Type::Int), &Type::prod(Type::Bool, Type::Int)));
        assert!(!conforms(&Type::Int, &Type::Bottom));
        assert_eq!(join(&Type::list(Type::Bottom), &Type::list(Type::Int)), Some(Type::list(Type::Int)));
        assert_eq!(join(&Type::Int, &Type::Bool), None);
    }

    #[test]
    fn eval_requires_an_empty_theory() {
        assert_eq!(closed("let box u = box {}. ret 1 in eval u").unwrap(), Type::Int);
        let err = closed("let box u = box {op:unit=>int}. op() in eval u").unwrap_err();
        assert_eq!(err.kind, TypeErrorKind::TheoryMismatch);
    }

    #[test]
    fn fix_signature_is_checked() {
        let ok = "let fix f(n:int):[{}] int = ret n in f";
        assert_eq!(
            closed(ok).unwrap(),
            Type::arrow(Type::Int, Type::modal(Theory::empty(), Type::Int))
        );
        let bad = "let fix f(n:int):[{}] bool = ret n in f";
        assert_eq!(closed(bad).unwrap_err().kind, TypeErrorKind::ArgumentMismatch);
    }

    #[test]
    fn ill_formed_annotation() {
        let e = parse_expr("fn x:[{a:int=>int}]int. x").unwrap();
        let mut bad = e.clone();
        if let Expr::Lam(_, Type::Modal(theory, _), _) = &mut bad {
            theory.ops.push(OpDecl::new("a", Type::Int, Type::Int));
        }
        assert!(infer_expr(&ModalContext::empty(), &e).is_ok());
        assert_eq!(infer_expr(&ModalContext::empty(), &bad).unwrap_err().kind, TypeErrorKind::IllFormedTheory);
    }

    #[test]
    fn rendering_uses_the_identifier_position() {
        let file = parse("box {}.\n  x <- get(); ret x").unwrap();
        let err = infer_closed(&file.main).unwrap_err();
        assert_eq!(err.render(&file), "2:8: op-not-in-context: expected an operation of {}, found `get`");
    }

    #[test]
    fn kinds_round_trip_through_names() {
        for kind in [TypeErrorKind::NotABox, TypeErrorKind::BottomIntroduction, TypeErrorKind::IllFormedTheory] {
            assert_eq!(TypeErrorKind::from_name(kind.as_str()), Some(kind));
        }
    }
}
