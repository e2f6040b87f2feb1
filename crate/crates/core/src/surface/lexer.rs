use super::{Diagnostic, Span};

#[derive(Clone, Debug, PartialEq)]
pub enum Tok {
    Ident(String),
    Int(i64),
    // keywords
    Fn,
    Box,
    Let,
    In,
    Ret,
    Handle,
    With,
    Init,
    As,
    Eval,
    Fix,
    If,
    Then,
    Else,
    Return,
    Handler,
    For,
    True,
    False,
    Fst,
    Snd,
    Nil,
    Unit,
    IntTy,
    BoolTy,
    Bot,
    List,
    Def,
    // symbols
    LParen,
    RParen,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Comma,
    Semi,
    DefEnd,
    Colon,
    Dot,
    Arrow,
    FatArrow,
    LeftArrow,
    Eq,
    Lt,
    Plus,
    Minus,
    Star,
    Slash,
    PlusPlus,
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Int(n) => format!("integer `{n}`"),
            Tok::Eof => "end of input".to_string(),
            other => format!("`{}`", other.text()),
        }
    }

    fn text(&self) -> &'static str {
        match self {
            Tok::Fn => "fn",
            Tok::Box => "box",
            Tok::Let => "let",
            Tok::In => "in",
            Tok::Ret => "ret",
            Tok::Handle => "handle",
            Tok::With => "with",
            Tok::Init => "init",
            Tok::As => "as",
            Tok::Eval => "eval",
            Tok::Fix => "fix",
            Tok::If => "if",
            Tok::Then => "then",
            Tok::Else => "else",
            Tok::Return => "return",
            Tok::Handler => "handler",
            Tok::For => "for",
            Tok::True => "true",
            Tok::False => "false",
            Tok::Fst => "fst",
            Tok::Snd => "snd",
            Tok::Nil => "nil",
            Tok::Unit => "unit",
            Tok::IntTy => "int",
            Tok::BoolTy => "bool",
            Tok::Bot => "bot",
            Tok::List => "list",
            Tok::Def => "def",
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::LBrace => "{",
            Tok::RBrace => "}",
            Tok::LBracket => "[",
            Tok::RBracket => "]",
            Tok::Comma => ",",
            Tok::Semi => ";",
            Tok::DefEnd => ";;",
            Tok::Colon => ":",
            Tok::Dot => ".",
            Tok::Arrow => "->",
            Tok::FatArrow => "=>",
            Tok::LeftArrow => "<-",
            Tok::Eq => "=",
            Tok::Lt => "<",
            Tok::Plus => "+",
            Tok::Minus => "-",
            Tok::Star => "*",
            Tok::Slash => "/",
            Tok::PlusPlus => "++",
            Tok::Ident(_) | Tok::Int(_) | Tok::Eof => "",
        }
    }
}

pub const KEYWORDS: &[&str] = &[
    "fn", "box", "let", "in", "ret", "handle", "with", "init", "as", "eval", "fix", "if", "then", "else",
    "return", "handler", "for", "true", "false", "fst", "snd", "nil", "unit", "int", "bool", "bot", "list",
    "def",
];

fn keyword(word: &str) -> Option<Tok> {
    Some(match word {
        "fn" => Tok::Fn,
        "box" => Tok::Box,
        "let" => Tok::Let,
        "in" => Tok::In,
        "ret" => Tok::Ret,
        "handle" => Tok::Handle,
        "with" => Tok::With,
        "init" => Tok::Init,
        "as" => Tok::As,
        "eval" => Tok::Eval,
        "fix" => Tok::Fix,
        "if" => Tok::If,
        "then" => Tok::Then,
        "else" => Tok::Else,
        "return" => Tok::Return,
        "handler" => Tok::Handler,
        "for" => Tok::For,
        "true" => Tok::True,
        "false" => Tok::False,
        "fst" => Tok::Fst,
        "snd" => Tok::Snd,
        "nil" => Tok::Nil,
        "unit" => Tok::Unit,
        "int" => Tok::IntTy,
        "bool" => Tok::BoolTy,
        "bot" => Tok::Bot,
        "list" => Tok::List,
        "def" => Tok::Def,
        _ => return None,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct Token {
    pub tok: Tok,
    pub span: Span,
}

pub fn lex(text: &str) -> Result<Vec<Token>, Diagnostic> {
    let chars: Vec<char> = text.chars().collect();
    let mut tokens = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    while i < chars.len() {
        let c = chars[i];
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '-' && chars.get(i + 1) == Some(&'-') {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let start_col = col;
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_' || chars[i] == '\'') {
                i += 1;
            }
            let word: String = chars[start..i].iter().collect();
            let len = i - start;
            col += len;
            let tok = keyword(&word).unwrap_or(Tok::Ident(word));
            tokens.push(Token { tok, span: Span::new(line, start_col, len) });
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let digits: String = chars[start..i].iter().collect();
            let len = i - start;
            col += len;
            let span = Span::new(line, start_col, len);
            let n = digits
                .parse::<i64>()
                .map_err(|_| Diagnostic::error(format!("integer literal `{digits}` is out of range"), span))?;
            tokens.push(Token { tok: Tok::Int(n), span });
            continue;
        }
        let next = chars.get(i + 1).copied();
        let (tok, len) = match (c, next) {
            (';', Some(';')) => (Tok::DefEnd, 2),
            ('-', Some('>')) => (Tok::Arrow, 2),
            ('=', Some('>')) => (Tok::FatArrow, 2),
            ('<', Some('-')) => (Tok::LeftArrow, 2),
            ('+', Some('+')) => (Tok::PlusPlus, 2),
            ('(', _) => (Tok::LParen, 1),
            (')', _) => (Tok::RParen, 1),
            ('{', _) => (Tok::LBrace, 1),
            ('}', _) => (Tok::RBrace, 1),
            ('[', _) => (Tok::LBracket, 1),
            (']', _) => (Tok::RBracket, 1),
            (',', _) => (Tok::Comma, 1),
            (';', _) => (Tok::Semi, 1),
            (':', _) => (Tok::Colon, 1),
            ('.', _) => (Tok::Dot, 1),
            ('=', _) => (Tok::Eq, 1),
            ('<', _) => (Tok::Lt, 1),
            ('+', _) => (Tok::Plus, 1),
            ('-', _) => (Tok::Minus, 1),
            ('*', _) => (Tok::Star, 1),
            ('/', _) => (Tok::Slash, 1),
            _ => {
                return Err(Diagnostic::error(
                    format!("unexpected character `{c}`"),
                    Span::new(line, start_col, 1),
                ))
            }
        };
        tokens.push(Token { tok, span: Span::new(line, start_col, len) });
        i += len;
        col += len;
    }
    tokens.push(Token { tok: Tok::Eof, span: Span::new(line, col, 0) });
    Ok(tokens)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(text: &str) -> Vec<Tok> {
        lex(text).unwrap().into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn multi_character_symbols() {
        assert_eq!(
            kinds("x <- k(a; b);; ++ -> =>"),
            vec![
                Tok::Ident("x".into()),
                Tok::LeftArrow,
                Tok::Ident("k".into()),
                Tok::LParen,
                Tok::Ident("a".into()),
                Tok::Semi,
                Tok::Ident("b".into()),
                Tok::RParen,
                Tok::DefEnd,
                Tok::PlusPlus,
                Tok::Arrow,
                Tok::FatArrow,
                Tok::Eof
            ]
        );
    }

    #[test]
    fn comments_run_to_end_of_line() {
        assert_eq!(kinds("ret -- ignored\n 1"), vec![Tok::Ret, Tok::Int(1), Tok::Eof]);
    }

    #[test]
    fn spans_track_lines_and_columns() {
        let toks = lex("ret\n  42").unwrap();
        assert_eq!(toks[1].span, Span::new(2, 3, 2));
    }

    #[test]
    fn stray_characters_are_reported() {
        let err = lex("ret $").unwrap_err();
        assert_eq!(err.span, Span::new(1, 5, 1));
    }
}
