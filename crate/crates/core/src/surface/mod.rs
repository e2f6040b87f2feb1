//! Concrete ASCII syntax.
//!
//! A source file is a sequence of `def NAME = BODY ;;` definitions followed
//! by one main term. Definitions are theories, handlers or terms; each use
//! of a definition splices its body in. The parser produces kernel terms
//! directly, applying the sugar in [`desugar`] as it goes.

pub mod desugar;
pub mod lexer;
mod parser;
mod pretty;

use std::fmt;

use crate::syntax::*;
use lexer::{lex, Tok, Token};
pub use parser::{Definition, Definitions};
use parser::Parser;
pub use pretty::{pretty, theory_to_string, type_to_string};

/// A source position: 1-based line and column plus a length in characters.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord)]
pub struct Span {
    pub line: usize,
    pub column: usize,
    pub len: usize,
}

impl Span {
    pub fn new(line: usize, column: usize, len: usize) -> Self {
        Span { line, column, len }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub severity: Severity,
    pub message: String,
    pub span: Span,
}

impl Diagnostic {
    pub fn error(message: impl Into<String>, span: Span) -> Self {
        Diagnostic { severity: Severity::Error, message: message.into(), span }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let level = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{}:{}: {level}: {}", self.span.line, self.span.column, self.message)
    }
}

impl std::error::Error for Diagnostic {}

/// A parsed source file.
#[derive(Clone, Debug)]
pub struct SourceFile {
    pub text: String,
    pub definitions: Vec<(Name, Definition)>,
    /// The main term, an expression or a computation.
    pub main: Term,
    pub main_span: Span,
    tokens: Vec<Token>,
    main_start: usize,
}

impl SourceFile {
    /// The position of the first occurrence of identifier `name`, preferring
    /// the main term; falls back to the start of the main term.
    pub fn locate(&self, name: &str) -> Span {
        let is_name = |t: &&Token| matches!(&t.tok, Tok::Ident(n) if n == name);
        self.tokens[self.main_start..]
            .iter()
            .find(is_name)
            .or_else(|| self.tokens.iter().find(is_name))
            .map(|t| t.span)
            .unwrap_or(self.main_span)
    }

    pub fn definitions(&self) -> Definitions {
        self.definitions.iter().cloned().collect()
    }
}

/// Parses a whole source file.
pub fn parse(text: &str) -> Result<SourceFile, Vec<Diagnostic>> {
    parse_with(text, &Definitions::new())
}

/// Parses a source file whose definitions extend `defs`.
pub fn parse_with(text: &str, defs: &Definitions) -> Result<SourceFile, Vec<Diagnostic>> {
    let tokens = lex(text).map_err(|d| vec![d])?;
    let mut defs = defs.clone();
    let mut definitions = Vec::new();
    let mut pos = 0;
    while tokens[pos].tok == Tok::Def {
        let (name, def, next) = parse_definition(&tokens, pos, &defs).map_err(|d| vec![d])?;
        defs.insert(name.clone(), def.clone());
        definitions.push((name, def));
        pos = next;
    }
    let main_tokens = tokens[pos..].to_vec();
    if main_tokens[0].tok == Tok::Eof {
        return Err(vec![Diagnostic::error("syntax error: expected a term, found end of input", main_tokens[0].span)]);
    }
    let main = parse_term(main_tokens.clone(), &defs).map_err(|d| vec![d])?;
    let first = main_tokens[0].span;
    let last = main_tokens[main_tokens.len().saturating_sub(2)].span;
    let main_span = if last.line == first.line {
        Span::new(first.line, first.column, last.column + last.len - first.column)
    } else {
        Span::new(first.line, first.column, first.len)
    };
    Ok(SourceFile { text: text.to_string(), definitions, main, main_span, tokens, main_start: pos })
}

/// Parses a definition starting at the `def` token at `pos`; returns the
/// position after its `;;`.
fn parse_definition(tokens: &[Token], pos: usize, defs: &Definitions) -> Result<(Name, Definition, usize), Diagnostic> {
    let name_pos = pos + 1;
    let name = match &tokens[name_pos].tok {
        Tok::Ident(n) => n.clone(),
        other => {
            return Err(Diagnostic::error(
                format!("syntax error: expected a definition name, found {}", other.describe()),
                tokens[name_pos].span,
            ))
        }
    };
    if defs.contains_key(&name) {
        return Err(Diagnostic::error(format!("duplicate definition `{name}`"), tokens[name_pos].span));
    }
    if tokens[name_pos + 1].tok != Tok::Eq {
        return Err(Diagnostic::error(
            format!("syntax error: expected `=`, found {}", tokens[name_pos + 1].tok.describe()),
            tokens[name_pos + 1].span,
        ));
    }
    let body_start = name_pos + 2;
    let Some(end) = tokens[body_start..].iter().position(|t| t.tok == Tok::DefEnd).map(|i| body_start + i) else {
        return Err(Diagnostic::error(
            format!("syntax error: definition `{name}` is missing its terminating `;;`"),
            tokens[pos].span,
        ));
    };
    let mut body: Vec<Token> = tokens[body_start..end].to_vec();
    body.push(Token { tok: Tok::Eof, span: tokens[end].span });
    if body.len() == 1 {
        return Err(Diagnostic::error(format!("syntax error: definition `{name}` has an empty body"), tokens[end].span));
    }
    let def = match (&body[0].tok, &body[1].tok) {
        (Tok::LBrace, _) => Definition::Theory(whole(&body, defs, |p| p.theory())?),
        (Tok::Ident(n), _) if matches!(defs.get(n), Some(Definition::Theory(_))) => {
            Definition::Theory(whole(&body, defs, |p| p.theory())?)
        }
        (Tok::Handler, _) => Definition::Handler(whole(&body, defs, |p| p.handler())?),
        (Tok::Ident(n), _) if matches!(defs.get(n), Some(Definition::Handler(_))) => {
            Definition::Handler(whole(&body, defs, |p| p.handler())?)
        }
        (Tok::Ident(n), Tok::LBracket) if n == "id" && !defs.contains_key(n) => {
            Definition::Handler(whole(&body, defs, |p| p.handler())?)
        }
        _ => {
            let comp = whole(&body, defs, |p| p.comp());
            let expr = whole(&body, defs, |p| p.expr());
            match (comp, expr) {
                (Err(ce), Err(ee)) => return Err(further(ce, ee)),
                (comp, expr) => Definition::Term { expr: expr.ok(), comp: comp.ok() },
            }
        }
    };
    Ok((name, def, end + 1))
}

fn further(a: Diagnostic, b: Diagnostic) -> Diagnostic {
    if b.span > a.span {
        b
    } else {
        a
    }
}

fn whole<T>(
    tokens: &[Token],
    defs: &Definitions,
    f: impl FnOnce(&mut Parser) -> Result<T, Diagnostic>,
) -> Result<T, Diagnostic> {
    let mut p = Parser::new(tokens.to_vec(), defs);
    let out = f(&mut p)?;
    p.expect_eof()?;
    Ok(out)
}

/// A main term: a computation if the text parses as one, otherwise an
/// expression.
fn parse_term(tokens: Vec<Token>, defs: &Definitions) -> Result<Term, Diagnostic> {
    let comp = whole(&tokens, defs, |p| p.comp());
    match comp {
        Ok(c) => Ok(Term::Comp(c)),
        Err(ce) => match whole(&tokens, defs, |p| p.expr()) {
            Ok(e) => Ok(Term::Expr(e)),
            Err(ee) => Err(further(ce, ee)),
        },
    }
}

fn parse_category<T>(
    text: &str,
    defs: &Definitions,
    f: impl FnOnce(&mut Parser) -> Result<T, Diagnostic>,
) -> Result<T, Diagnostic> {
    let tokens = lex(text)?;
    whole(&tokens, defs, f)
}

pub fn parse_expr(text: &str) -> Result<Expr, Diagnostic> {
    parse_category(text, &Definitions::new(), |p| p.expr())
}

pub fn parse_comp(text: &str) -> Result<Comp, Diagnostic> {
    parse_category(text, &Definitions::new(), |p| p.comp())
}

pub fn parse_stmt(text: &str) -> Result<Stmt, Diagnostic> {
    parse_category(text, &Definitions::new(), |p| p.stmt())
}

pub fn parse_handler(text: &str) -> Result<Handler, Diagnostic> {
    parse_category(text, &Definitions::new(), |p| p.handler())
}

pub fn parse_seq(text: &str) -> Result<HandlingSeq, Diagnostic> {
    parse_category(text, &Definitions::new(), |p| p.seq())
}

pub fn parse_type(text: &str) -> Result<Type, Diagnostic> {
    parse_category(text, &Definitions::new(), |p| p.ty())
}

pub fn parse_theory(text: &str) -> Result<Theory, Diagnostic> {
    parse_category(text, &Definitions::new(), |p| p.theory())
}

pub fn parse_handler_with(text: &str, defs: &Definitions) -> Result<Handler, Diagnostic> {
    parse_category(text, defs, |p| p.handler())
}

pub fn parse_seq_with(text: &str, defs: &Definitions) -> Result<HandlingSeq, Diagnostic> {
    parse_category(text, defs, |p| p.seq())
}

pub fn parse_type_with(text: &str, defs: &Definitions) -> Result<Type, Diagnostic> {
    parse_category(text, defs, |p| p.ty())
}

pub fn parse_theory_with(text: &str, defs: &Definitions) -> Result<Theory, Diagnostic> {
    parse_category(text, defs, |p| p.theory())
}

/// Parses `text` as a term of the same category as `like`.
pub fn parse_term_like(text: &str, like: &Term) -> Result<Term, Diagnostic> {
    Ok(match like {
        Term::Expr(_) => Term::Expr(parse_expr(text)?),
        Term::Comp(_) => Term::Comp(parse_comp(text)?),
        Term::Stmt(_) => Term::Stmt(parse_stmt(text)?),
        Term::Handler(_) => Term::Handler(parse_handler(text)?),
        Term::Seq(_) => Term::Seq(parse_seq(text)?),
    })
}

/// Parses a standalone main term (no definitions) with the given
/// definitions in scope.
pub fn parse_main(text: &str, defs: &Definitions) -> Result<Term, Diagnostic> {
    parse_term(lex(text)?, defs)
}

#[cfg(test)]
mod tests;
