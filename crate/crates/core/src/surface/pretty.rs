use std::fmt::{self, Write};

use super::desugar::abbreviated_stmt;
use crate::syntax::*;

// Expression precedence levels, loosest first.
const OPEN: u8 = 0;
const CMP: u8 = 1;
const APPEND: u8 = 2;
const ADD: u8 = 3;
const MUL: u8 = 4;
const APP: u8 = 5;
const ATOM: u8 = 6;

// Type precedence levels.
const TY_ARROW: u8 = 0;
const TY_PROD: u8 = 1;
const TY_PREFIX: u8 = 2;
const TY_ATOM: u8 = 3;

pub fn type_to_string(ty: &Type) -> String {
    let mut out = String::new();
    write_type(&mut out, ty, TY_ARROW);
    out
}

pub fn theory_to_string(theory: &Theory) -> String {
    let mut out = String::new();
    write_theory(&mut out, theory);
    out
}

fn write_theory(out: &mut String, theory: &Theory) {
    out.push('{');
    for (i, op) in theory.ops.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        out.push_str(&op.name);
        out.push(':');
        write_type(out, &op.input, TY_ARROW);
        out.push_str("=>");
        write_type(out, &op.output, TY_ARROW);
    }
    out.push('}');
}

fn write_type(out: &mut String, ty: &Type, ctx: u8) {
    let level = match ty {
        Type::Arrow(..) => TY_ARROW,
        Type::Prod(..) => TY_PROD,
        Type::List(_) | Type::Modal(..) => TY_PREFIX,
        _ => TY_ATOM,
    };
    if level < ctx {
        out.push('(');
    }
    match ty {
        Type::Base(name) => out.push_str(name),
        Type::Unit => out.push_str("unit"),
        Type::Int => out.push_str("int"),
        Type::Bool => out.push_str("bool"),
        Type::Bottom => out.push_str("bot"),
        Type::Prod(a, b) => {
            write_type(out, a, TY_PROD);
            out.push_str(" * ");
            write_type(out, b, TY_PREFIX);
        }
        Type::List(a) => {
            out.push_str("list ");
            write_type(out, a, TY_PREFIX);
        }
        Type::Arrow(a, b) => {
            write_type(out, a, TY_PROD);
            out.push_str(" -> ");
            write_type(out, b, TY_ARROW);
        }
        Type::Modal(theory, a) => {
            out.push_str("[ ");
            write_theory(out, theory);
            out.push_str(" ] ");
            write_type(out, a, TY_PREFIX);
        }
    }
    if level < ctx {
        out.push(')');
    }
}

fn expr_level(e: &Expr) -> u8 {
    match e {
        Expr::Lam(..) | Expr::Box(..) | Expr::LetBox(..) | Expr::Fix(..) | Expr::If(..) => OPEN,
        Expr::Cmp(..) => CMP,
        Expr::Append(..) => APPEND,
        Expr::Arith(ArithOp::Add | ArithOp::Sub, ..) => ADD,
        Expr::Arith(ArithOp::Mul | ArithOp::Div, ..) => MUL,
        Expr::App(..) | Expr::Fst(_) | Expr::Snd(_) => APP,
        _ => ATOM,
    }
}

fn write_expr(out: &mut String, e: &Expr, ctx: u8) {
    let level = expr_level(e);
    if level < ctx {
        out.push('(');
    }
    match e {
        Expr::Var(x) => out.push_str(x),
        Expr::Lam(x, ty, body) => {
            let _ = write!(out, "fn {x}:");
            write_type(out, ty, TY_ARROW);
            out.push_str(". ");
            write_expr(out, body, OPEN);
        }
        Expr::App(f, a) => {
            write_expr(out, f, APP);
            out.push(' ');
            write_expr(out, a, ATOM);
        }
        Expr::Box(theory, c) => {
            out.push_str("box ");
            write_theory(out, theory);
            out.push_str(". ");
            write_comp(out, c);
        }
        Expr::LetBox(u, bound, body) => {
            let _ = write!(out, "let box {u} = ");
            write_expr(out, bound, OPEN);
            out.push_str(" in ");
            write_expr(out, body, OPEN);
        }
        Expr::Eval(seq, u) => {
            out.push_str("eval ");
            if !seq.is_empty() {
                write_seq(out, seq);
                out.push(' ');
            }
            out.push_str(u);
        }
        Expr::Fix(def, scope) => {
            write_fix(out, def);
            write_expr(out, scope, OPEN);
        }
        Expr::Int(n) if *n < 0 => {
            let _ = write!(out, "(-{})", n.unsigned_abs());
        }
        Expr::Int(n) => {
            let _ = write!(out, "{n}");
        }
        Expr::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Expr::Unit => out.push_str("()"),
        Expr::Pair(a, b) => {
            out.push('(');
            write_expr(out, a, OPEN);
            out.push_str(", ");
            write_expr(out, b, OPEN);
            out.push(')');
        }
        Expr::Fst(a) => {
            out.push_str("fst ");
            write_expr(out, a, ATOM);
        }
        Expr::Snd(a) => {
            out.push_str("snd ");
            write_expr(out, a, ATOM);
        }
        Expr::Nil(ty) => {
            out.push_str("nil ");
            write_type(out, ty, TY_ATOM);
        }
        Expr::List(items) => {
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                write_expr(out, item, OPEN);
            }
            out.push(']');
        }
        Expr::Append(a, b) => {
            write_expr(out, a, ADD);
            out.push_str(" ++ ");
            write_expr(out, b, APPEND);
        }
        Expr::Arith(op, a, b) => {
            let (left, right) = match op {
                ArithOp::Add | ArithOp::Sub => (ADD, MUL),
                ArithOp::Mul | ArithOp::Div => (MUL, APP),
            };
            write_expr(out, a, left);
            let _ = write!(out, " {} ", op.symbol());
            write_expr(out, b, right);
        }
        Expr::Cmp(op, a, b) => {
            write_expr(out, a, APPEND);
            let _ = write!(out, " {} ", op.symbol());
            write_expr(out, b, APPEND);
        }
        Expr::If(c, t, f) => {
            out.push_str("if ");
            write_expr(out, c, OPEN);
            out.push_str(" then ");
            write_expr(out, t, OPEN);
            out.push_str(" else ");
            write_expr(out, f, OPEN);
        }
    }
    if level < ctx {
        out.push(')');
    }
}

fn write_fix(out: &mut String, def: &FixDef) {
    let _ = write!(out, "let fix {}({}:", def.name, def.param);
    write_type(out, &def.param_ty, TY_ARROW);
    out.push_str("):[");
    write_theory(out, &def.theory);
    out.push_str("] ");
    write_type(out, &def.ret_ty, TY_ARROW);
    out.push_str(" = ");
    write_comp(out, &def.body);
    out.push_str(" in ");
}

fn write_comp(out: &mut String, c: &Comp) {
    if let Some(s) = abbreviated_stmt(c) {
        write_stmt(out, s);
        return;
    }
    match c {
        Comp::Ret(e) => {
            out.push_str("ret ");
            write_expr(out, e, ATOM);
        }
        Comp::Bind(s, x, rest) => {
            let _ = write!(out, "{x} <- ");
            write_stmt(out, s);
            out.push_str("; ");
            write_comp(out, rest);
        }
        Comp::LetBox(u, bound, body) => {
            let _ = write!(out, "let box {u} = ");
            write_expr(out, bound, OPEN);
            out.push_str(" in ");
            write_comp(out, body);
        }
        Comp::Fix(def, scope) => {
            write_fix(out, def);
            write_comp(out, scope);
        }
        Comp::If(cond, t, f) => {
            out.push_str("if ");
            write_expr(out, cond, OPEN);
            out.push_str(" then ");
            write_comp(out, t);
            out.push_str(" else ");
            write_comp(out, f);
        }
    }
}

fn write_stmt(out: &mut String, s: &Stmt) {
    match s {
        Stmt::Op(op, Expr::Unit) => {
            let _ = write!(out, "{op}()");
        }
        Stmt::Op(op, e) => {
            let _ = write!(out, "{op}(");
            write_expr(out, e, OPEN);
            out.push(')');
        }
        Stmt::Cont(k, a, b) => {
            let _ = write!(out, "{k}(");
            write_expr(out, a, OPEN);
            out.push_str("; ");
            write_expr(out, b, OPEN);
            out.push(')');
        }
        Stmt::Handle(u, seq, h, init) => {
            let _ = write!(out, "handle {u} ");
            if !seq.is_empty() {
                write_seq(out, seq);
                out.push(' ');
            }
            out.push_str("with ");
            write_handler(out, h);
            out.push_str(" init ");
            write_expr(out, init, OPEN);
        }
    }
}

fn write_handler(out: &mut String, h: &Handler) {
    out.push_str("handler for ");
    write_theory(out, &h.theory);
    out.push_str(" { ");
    for clause in &h.clauses {
        let _ = write!(out, "{}({}; {}; {}) -> ", clause.op, clause.x, clause.k, clause.z);
        write_comp(out, &clause.body);
        out.push_str(", ");
    }
    let _ = write!(out, "return({}; {}) -> ", h.ret.x, h.ret.z);
    write_comp(out, &h.ret.body);
    out.push_str(" }");
}

fn write_seq(out: &mut String, seq: &HandlingSeq) {
    out.push('[');
    for (i, clause) in seq.clauses.iter().enumerate() {
        if i > 0 {
            out.push_str("; ");
        }
        write_handler(out, &clause.handler);
        out.push_str(" init ");
        write_expr(out, &clause.init, OPEN);
        let _ = write!(out, " as {}. ", clause.x);
        write_comp(out, &clause.cont);
    }
    out.push(']');
}

/// Renders a main term so that it reads back as the same category: an
/// expression whose text would also parse as a computation is wrapped in
/// parentheses.
pub fn pretty(t: &Term) -> String {
    let text = t.to_string();
    match t {
        Term::Expr(_) if super::parse_comp(&text).is_ok() => format!("({text})"),
        _ => text,
    }
}

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&type_to_string(self))
    }
}

impl fmt::Display for Theory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&theory_to_string(self))
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        write_expr(&mut out, self, OPEN);
        f.write_str(&out)
    }
}

impl fmt::Display for Comp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        write_comp(&mut out, self);
        f.write_str(&out)
    }
}

impl fmt::Display for Stmt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        write_stmt(&mut out, self);
        f.write_str(&out)
    }
}

impl fmt::Display for Handler {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        write_handler(&mut out, self);
        f.write_str(&out)
    }
}

impl fmt::Display for HandlingSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        write_seq(&mut out, self);
        f.write_str(&out)
    }
}
