use std::collections::BTreeMap;

use super::desugar::{id_handler, ret_bind, stmt_as_comp};
use super::lexer::{Tok, Token};
use super::{Diagnostic, Span};
use crate::syntax::*;

/// A named definition, spliced in at each use.
#[derive(Clone, Debug, PartialEq)]
pub enum Definition {
    Theory(Theory),
    Handler(Handler),
    /// A term definition, parsed in whichever categories it admits.
    Term { expr: Option<Expr>, comp: Option<Comp> },
}

pub type Definitions = BTreeMap<Name, Definition>;

type PResult<T> = Result<T, Diagnostic>;

pub struct Parser<'a> {
    toks: Vec<Token>,
    pos: usize,
    defs: &'a Definitions,
    /// Locally bound value names; these shadow definitions.
    bound: Vec<Name>,
}

impl<'a> Parser<'a> {
    pub fn new(toks: Vec<Token>, defs: &'a Definitions) -> Self {
        Parser { toks, pos: 0, defs, bound: Vec::new() }
    }

    pub fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, offset: usize) -> &Tok {
        let i = (self.pos + offset).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    pub fn span(&self) -> Span {
        self.toks[self.pos].span
    }

    fn bump(&mut self) -> Tok {
        let tok = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        tok
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == tok {
            self.bump();
            true
        } else {
            false
        }
    }

    fn error<T>(&self, expected: &str) -> PResult<T> {
        Err(Diagnostic::error(
            format!("syntax error: expected {expected}, found {}", self.peek().describe()),
            self.span(),
        ))
    }

    fn expect(&mut self, tok: Tok) -> PResult<()> {
        if self.eat(&tok) {
            Ok(())
        } else {
            self.error(&tok.describe())
        }
    }

    pub fn expect_eof(&mut self) -> PResult<()> {
        if *self.peek() == Tok::Eof {
            Ok(())
        } else {
            self.error("end of input")
        }
    }

    fn ident(&mut self) -> PResult<Name> {
        match self.peek().clone() {
            Tok::Ident(name) => {
                self.bump();
                Ok(name)
            }
            _ => self.error("an identifier"),
        }
    }

    fn with_bound<T>(&mut self, names: &[&Name], f: impl FnOnce(&mut Self) -> PResult<T>) -> PResult<T> {
        let depth = self.bound.len();
        self.bound.extend(names.iter().map(|n| (*n).clone()));
        let out = f(self);
        self.bound.truncate(depth);
        out
    }

    fn definition(&self, name: &str) -> Option<&'a Definition> {
        if self.bound.iter().any(|b| b == name) {
            None
        } else {
            self.defs.get(name)
        }
    }

    // ----- types and theories -----

    pub fn ty(&mut self) -> PResult<Type> {
        let dom = self.prod_ty()?;
        if self.eat(&Tok::Arrow) {
            Ok(Type::arrow(dom, self.ty()?))
        } else {
            Ok(dom)
        }
    }

    fn prod_ty(&mut self) -> PResult<Type> {
        let mut ty = self.prefix_ty()?;
        while self.eat(&Tok::Star) {
            ty = Type::prod(ty, self.prefix_ty()?);
        }
        Ok(ty)
    }

    fn prefix_ty(&mut self) -> PResult<Type> {
        match self.peek() {
            Tok::List => {
                self.bump();
                Ok(Type::list(self.prefix_ty()?))
            }
            Tok::LBracket => {
                self.bump();
                let theory = self.theory()?;
                self.expect(Tok::RBracket)?;
                Ok(Type::modal(theory, self.prefix_ty()?))
            }
            _ => self.atom_ty(),
        }
    }

    fn atom_ty(&mut self) -> PResult<Type> {
        let ty = match self.peek().clone() {
            Tok::Unit => Type::Unit,
            Tok::IntTy => Type::Int,
            Tok::BoolTy => Type::Bool,
            Tok::Bot => Type::Bottom,
            Tok::Ident(name) => Type::Base(name),
            Tok::LParen => {
                self.bump();
                let ty = self.ty()?;
                self.expect(Tok::RParen)?;
                return Ok(ty);
            }
            _ => return self.error("a type"),
        };
        self.bump();
        Ok(ty)
    }

    pub fn theory(&mut self) -> PResult<Theory> {
        let start = self.span();
        let mut theory = self.theory_atom()?;
        while self.eat(&Tok::Plus) {
            theory = theory.concat(&self.theory_atom()?);
        }
        if let Some(dup) = theory.duplicate() {
            return Err(Diagnostic::error(format!("duplicate operation `{dup}` in theory"), start));
        }
        Ok(theory)
    }

    fn theory_atom(&mut self) -> PResult<Theory> {
        match self.peek().clone() {
            Tok::LBrace => {
                self.bump();
                let mut ops = Vec::new();
                if !self.eat(&Tok::RBrace) {
                    loop {
                        let name = self.ident()?;
                        self.expect(Tok::Colon)?;
                        let input = self.ty()?;
                        self.expect(Tok::FatArrow)?;
                        let output = self.ty()?;
                        ops.push(OpDecl { name, input, output });
                        if self.eat(&Tok::RBrace) {
                            break;
                        }
                        self.expect(Tok::Comma)?;
                    }
                }
                Ok(Theory::new(ops))
            }
            Tok::Ident(name) => match self.defs.get(&name) {
                Some(Definition::Theory(theory)) => {
                    self.bump();
                    Ok(theory.clone())
                }
                _ => Err(Diagnostic::error(format!("unbound definition `{name}`: expected a theory"), self.span())),
            },
            _ => self.error("a theory"),
        }
    }

    // ----- expressions -----

    pub fn expr(&mut self) -> PResult<Expr> {
        match self.peek() {
            Tok::Fn => {
                self.bump();
                let x = self.ident()?;
                self.expect(Tok::Colon)?;
                let ty = self.ty()?;
                self.expect(Tok::Dot)?;
                let body = self.with_bound(&[&x], |p| p.expr())?;
                Ok(Expr::Lam(x, ty, Box::new(body)))
            }
            Tok::Box => {
                self.bump();
                let theory = self.theory()?;
                self.expect(Tok::Dot)?;
                Ok(Expr::boxed(theory, self.comp()?))
            }
            Tok::Let => match self.peek_at(1) {
                Tok::Box => {
                    self.bump();
                    self.bump();
                    let u = self.ident()?;
                    self.expect(Tok::Eq)?;
                    let bound = self.expr()?;
                    self.expect(Tok::In)?;
                    Ok(Expr::let_box(u, bound, self.expr()?))
                }
                Tok::Fix => {
                    let def = self.fix_def()?;
                    let scope = self.with_bound(&[&def.name], |p| p.expr())?;
                    Ok(Expr::Fix(Box::new(def), Box::new(scope)))
                }
                _ => {
                    self.bump();
                    self.error("`box` or `fix`")
                }
            },
            Tok::If => {
                self.bump();
                let cond = self.expr()?;
                self.expect(Tok::Then)?;
                let then = self.expr()?;
                self.expect(Tok::Else)?;
                Ok(Expr::if_(cond, then, self.expr()?))
            }
            _ => self.cmp_expr(),
        }
    }

    fn fix_def(&mut self) -> PResult<FixDef> {
        self.expect(Tok::Let)?;
        self.expect(Tok::Fix)?;
        let name = self.ident()?;
        self.expect(Tok::LParen)?;
        let param = self.ident()?;
        self.expect(Tok::Colon)?;
        let param_ty = self.ty()?;
        self.expect(Tok::RParen)?;
        self.expect(Tok::Colon)?;
        self.expect(Tok::LBracket)?;
        let theory = self.theory()?;
        self.expect(Tok::RBracket)?;
        let ret_ty = self.ty()?;
        self.expect(Tok::Eq)?;
        let body = self.with_bound(&[&name, &param], |p| p.comp())?;
        self.expect(Tok::In)?;
        Ok(FixDef { name, param, param_ty, theory, ret_ty, body })
    }

    fn cmp_expr(&mut self) -> PResult<Expr> {
        let lhs = self.append_expr()?;
        let op = match self.peek() {
            Tok::Eq => CmpOp::Eq,
            Tok::Lt => CmpOp::Lt,
            _ => return Ok(lhs),
        };
        self.bump();
        Ok(Expr::cmp(op, lhs, self.append_expr()?))
    }

    fn append_expr(&mut self) -> PResult<Expr> {
        let lhs = self.add_expr()?;
        if self.eat(&Tok::PlusPlus) {
            Ok(Expr::Append(Box::new(lhs), Box::new(self.append_expr()?)))
        } else {
            Ok(lhs)
        }
    }

    fn add_expr(&mut self) -> PResult<Expr> {
        let mut lhs = self.mul_expr()?;
        loop {
            let op = match self.peek() {
                Tok::Plus => ArithOp::Add,
                Tok::Minus => ArithOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            lhs = Expr::arith(op, lhs, self.mul_expr()?);
        }
    }

    fn mul_expr(&mut self) -> PResult<Expr> {
        let mut lhs = self.app_expr()?;
        loop {
            let op = match self.peek() {
                Tok::Star => ArithOp::Mul,
                Tok::Slash => ArithOp::Div,
                _ => return Ok(lhs),
            };
            self.bump();
            lhs = Expr::arith(op, lhs, self.app_expr()?);
        }
    }

    fn app_expr(&mut self) -> PResult<Expr> {
        let mut head = match self.peek() {
            Tok::Fst => {
                self.bump();
                Expr::Fst(Box::new(self.atom()?))
            }
            Tok::Snd => {
                self.bump();
                Expr::Snd(Box::new(self.atom()?))
            }
            _ => self.atom()?,
        };
        while self.starts_atom() {
            head = Expr::app(head, self.atom()?);
        }
        Ok(head)
    }

    fn starts_atom(&self) -> bool {
        matches!(
            self.peek(),
            Tok::Ident(_) | Tok::Int(_) | Tok::True | Tok::False | Tok::LParen | Tok::LBracket | Tok::Nil | Tok::Eval
        )
    }

    fn atom(&mut self) -> PResult<Expr> {
        let span = self.span();
        match self.peek().clone() {
            Tok::Ident(name) => {
                self.bump();
                match self.definition(&name) {
                    None => Ok(Expr::Var(name)),
                    Some(Definition::Term { expr: Some(e), .. }) => Ok(e.clone()),
                    Some(Definition::Term { expr: None, .. }) => Err(Diagnostic::error(
                        format!("definition `{name}` is a computation, not an expression"),
                        span,
                    )),
                    Some(Definition::Theory(_)) | Some(Definition::Handler(_)) => Err(Diagnostic::error(
                        format!("definition `{name}` cannot be used as an expression"),
                        span,
                    )),
                }
            }
            Tok::Int(n) => {
                self.bump();
                Ok(Expr::Int(n))
            }
            Tok::Minus => {
                self.bump();
                match self.peek().clone() {
                    Tok::Int(n) => {
                        self.bump();
                        Ok(Expr::Int(-n))
                    }
                    _ => self.error("an integer literal"),
                }
            }
            Tok::True => {
                self.bump();
                Ok(Expr::Bool(true))
            }
            Tok::False => {
                self.bump();
                Ok(Expr::Bool(false))
            }
            Tok::Nil => {
                self.bump();
                Ok(Expr::Nil(self.atom_ty()?))
            }
            Tok::LParen => {
                self.bump();
                if self.eat(&Tok::RParen) {
                    return Ok(Expr::Unit);
                }
                let first = self.expr()?;
                if self.eat(&Tok::Comma) {
                    let second = self.expr()?;
                    self.expect(Tok::RParen)?;
                    Ok(Expr::pair(first, second))
                } else {
                    self.expect(Tok::RParen)?;
                    Ok(first)
                }
            }
            Tok::LBracket => {
                self.bump();
                if *self.peek() == Tok::RBracket {
                    return Err(Diagnostic::error("empty list literal: write `nil T` instead", span));
                }
                let mut items = vec![self.expr()?];
                while self.eat(&Tok::Comma) {
                    items.push(self.expr()?);
                }
                self.expect(Tok::RBracket)?;
                Ok(Expr::List(items))
            }
            Tok::Eval => {
                self.bump();
                let seq = if *self.peek() == Tok::LBracket { self.seq()? } else { HandlingSeq::empty() };
                let u = self.ident()?;
                Ok(Expr::Eval(seq, u))
            }
            _ => self.error("an expression"),
        }
    }

    // ----- computations and statements -----

    pub fn comp(&mut self) -> PResult<Comp> {
        let span = self.span();
        match self.peek().clone() {
            Tok::Ret => {
                self.bump();
                Ok(Comp::Ret(self.expr()?))
            }
            Tok::Let => match self.peek_at(1) {
                Tok::Box => {
                    self.bump();
                    self.bump();
                    let u = self.ident()?;
                    self.expect(Tok::Eq)?;
                    let bound = self.expr()?;
                    self.expect(Tok::In)?;
                    Ok(Comp::let_box(u, bound, self.comp()?))
                }
                Tok::Fix => {
                    let def = self.fix_def()?;
                    let scope = self.with_bound(&[&def.name], |p| p.comp())?;
                    Ok(Comp::Fix(Box::new(def), Box::new(scope)))
                }
                _ => {
                    self.bump();
                    self.error("`box` or `fix`")
                }
            },
            Tok::If => {
                self.bump();
                let cond = self.expr()?;
                self.expect(Tok::Then)?;
                let then = self.comp()?;
                self.expect(Tok::Else)?;
                Ok(Comp::if_(cond, then, self.comp()?))
            }
            Tok::Handle => Ok(stmt_as_comp(self.stmt()?)),
            Tok::Ident(name) => match self.peek_at(1) {
                Tok::LeftArrow => {
                    self.bump();
                    self.bump();
                    if self.eat(&Tok::Ret) {
                        let e = self.expr()?;
                        self.expect(Tok::Semi)?;
                        let rest = self.with_bound(&[&name], |p| p.comp())?;
                        return Ok(ret_bind(e, name, rest));
                    }
                    let s = self.stmt()?;
                    self.expect(Tok::Semi)?;
                    let rest = self.with_bound(&[&name], |p| p.comp())?;
                    Ok(Comp::bind(s, name, rest))
                }
                Tok::LParen => Ok(stmt_as_comp(self.stmt()?)),
                _ => match self.definition(&name) {
                    Some(Definition::Term { comp: Some(c), .. }) => {
                        self.bump();
                        Ok(c.clone())
                    }
                    Some(Definition::Term { comp: None, .. }) => Err(Diagnostic::error(
                        format!("definition `{name}` is an expression, not a computation"),
                        span,
                    )),
                    _ => self.error("a computation"),
                },
            },
            _ => self.error("a computation"),
        }
    }

    pub fn stmt(&mut self) -> PResult<Stmt> {
        match self.peek().clone() {
            Tok::Handle => {
                self.bump();
                let u = self.ident()?;
                let seq = if *self.peek() == Tok::LBracket { self.seq()? } else { HandlingSeq::empty() };
                self.expect(Tok::With)?;
                let h = self.handler()?;
                self.expect(Tok::Init)?;
                let init = self.expr()?;
                Ok(Stmt::Handle(u, seq, Box::new(h), init))
            }
            Tok::Ident(name) => {
                self.bump();
                self.expect(Tok::LParen)?;
                if self.eat(&Tok::RParen) {
                    return Ok(Stmt::Op(name, Expr::Unit));
                }
                let arg = self.expr()?;
                if self.eat(&Tok::Semi) {
                    let state = self.expr()?;
                    self.expect(Tok::RParen)?;
                    Ok(Stmt::Cont(name, arg, state))
                } else {
                    self.expect(Tok::RParen)?;
                    Ok(Stmt::Op(name, arg))
                }
            }
            _ => self.error("a statement"),
        }
    }

    pub fn handler(&mut self) -> PResult<Handler> {
        let span = self.span();
        match self.peek().clone() {
            Tok::Handler => {
                self.bump();
                self.expect(Tok::For)?;
                let theory = self.theory()?;
                self.expect(Tok::LBrace)?;
                let mut clauses: Vec<OpClause> = Vec::new();
                loop {
                    if self.eat(&Tok::Return) {
                        self.expect(Tok::LParen)?;
                        let x = self.ident()?;
                        self.expect(Tok::Semi)?;
                        let z = self.ident()?;
                        self.expect(Tok::RParen)?;
                        self.expect(Tok::Arrow)?;
                        let body = self.with_bound(&[&x, &z], |p| p.comp())?;
                        self.eat(&Tok::Comma);
                        self.expect(Tok::RBrace)?;
                        return Ok(Handler { theory, clauses, ret: RetClause { x, z, body } });
                    }
                    let clause_span = self.span();
                    let op = self.ident()?;
                    self.expect(Tok::LParen)?;
                    let x = self.ident()?;
                    self.expect(Tok::Semi)?;
                    let k = self.ident()?;
                    self.expect(Tok::Semi)?;
                    let z = self.ident()?;
                    self.expect(Tok::RParen)?;
                    self.expect(Tok::Arrow)?;
                    let body = self.with_bound(&[&x, &z], |p| p.comp())?;
                    if clauses.iter().any(|c| c.op == op) {
                        return Err(Diagnostic::error(
                            format!("duplicate clause for operation `{op}` in handler"),
                            clause_span,
                        ));
                    }
                    clauses.push(OpClause { op, x, k, z, body });
                    self.expect(Tok::Comma)?;
                }
            }
            Tok::Ident(name) => match self.defs.get(&name) {
                Some(Definition::Handler(h)) => {
                    self.bump();
                    Ok(h.clone())
                }
                None if name == "id" && *self.peek_at(1) == Tok::LBracket => {
                    self.bump();
                    self.bump();
                    let theory = self.theory()?;
                    self.expect(Tok::RBracket)?;
                    Ok(id_handler(&theory))
                }
                _ => Err(Diagnostic::error(format!("unbound definition `{name}`: expected a handler"), span)),
            },
            _ => self.error("a handler"),
        }
    }

    pub fn seq(&mut self) -> PResult<HandlingSeq> {
        self.expect(Tok::LBracket)?;
        let mut clauses = Vec::new();
        while *self.peek() != Tok::RBracket {
            let handler = self.handler()?;
            self.expect(Tok::Init)?;
            let init = self.expr()?;
            self.expect(Tok::As)?;
            let x = self.ident()?;
            self.expect(Tok::Dot)?;
            let cont = self.with_bound(&[&x], |p| p.comp())?;
            clauses.push(SeqClause { handler, init, x, cont });
            if !self.eat(&Tok::Semi) {
                break;
            }
        }
        self.expect(Tok::RBracket)?;
        Ok(HandlingSeq { clauses })
    }
}
