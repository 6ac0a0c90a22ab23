use crate::error::{Error, Result};
use crate::lang::Pos;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    /// Digits with an optional fractional part, kept verbatim for exact parsing.
    Num(String),
    Fun,
    Let,
    In,
    If,
    Then,
    Else,
    Observe,
    Flip,
    NFlip,
    Uniform,
    Choose,
    True,
    False,
    Fst,
    Snd,
    BoolTy,
    IntTy,
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
    Colon,
    Assign,
    Lt,
    Gt,
    Le,
    Ge,
    EqEq,
    Ne,
    AndAnd,
    OrOr,
    Bang,
    Caret,
    Iff,
    Plus,
    Minus,
    Slash,
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Num(s) => format!("number `{s}`"),
            Tok::Eof => "end of input".into(),
            other => format!("`{}`", other.text()),
        }
    }

    fn text(&self) -> &'static str {
        match self {
            Tok::Fun => "fun",
            Tok::Let => "let",
            Tok::In => "in",
            Tok::If => "if",
            Tok::Then => "then",
            Tok::Else => "else",
            Tok::Observe => "observe",
            Tok::Flip => "flip",
            Tok::NFlip => "nflip",
            Tok::Uniform => "uniform",
            Tok::Choose => "choose",
            Tok::True => "true",
            Tok::False => "false",
            Tok::Fst => "fst",
            Tok::Snd => "snd",
            Tok::BoolTy => "bool",
            Tok::IntTy => "int",
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::LBrace => "{",
            Tok::RBrace => "}",
            Tok::Comma => ",",
            Tok::Colon => ":",
            Tok::Assign => "=",
            Tok::Lt => "<",
            Tok::Gt => ">",
            Tok::Le => "<=",
            Tok::Ge => ">=",
            Tok::EqEq => "==",
            Tok::Ne => "!=",
            Tok::AndAnd => "&&",
            Tok::OrOr => "||",
            Tok::Bang => "!",
            Tok::Caret => "^",
            Tok::Iff => "<->",
            Tok::Plus => "+",
            Tok::Minus => "-",
            Tok::Slash => "/",
            Tok::Ident(_) | Tok::Num(_) | Tok::Eof => "",
        }
    }
}

fn keyword(word: &str) -> Option<Tok> {
    Some(match word {
        "fun" => Tok::Fun,
        "let" => Tok::Let,
        "in" => Tok::In,
        "if" => Tok::If,
        "then" => Tok::Then,
        "else" => Tok::Else,
        "observe" => Tok::Observe,
        "flip" => Tok::Flip,
        "nflip" => Tok::NFlip,
        "uniform" => Tok::Uniform,
        "choose" => Tok::Choose,
        "true" => Tok::True,
        "false" => Tok::False,
        "fst" => Tok::Fst,
        "snd" => Tok::Snd,
        "bool" => Tok::BoolTy,
        "int" => Tok::IntTy,
        _ => return None,
    })
}

pub fn tokenize(src: &str) -> Result<Vec<(Tok, Pos)>> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1u32, 1u32);

    macro_rules! bump {
        () => {{
            if chars[i] == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
            i += 1;
        }};
    }

    while i < chars.len() {
        let c = chars[i];
        let pos = Pos { line, col };
        if c.is_whitespace() {
            bump!();
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'/') {
            while i < chars.len() && chars[i] != '\n' {
                bump!();
            }
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let mut word = String::new();
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                word.push(chars[i]);
                bump!();
            }
            out.push((keyword(&word).unwrap_or(Tok::Ident(word)), pos));
            continue;
        }
        if c.is_ascii_digit() {
            let mut num = String::new();
            while i < chars.len() && chars[i].is_ascii_digit() {
                num.push(chars[i]);
                bump!();
            }
            if i + 1 < chars.len() && chars[i] == '.' && chars[i + 1].is_ascii_digit() {
                num.push('.');
                bump!();
                while i < chars.len() && chars[i].is_ascii_digit() {
                    num.push(chars[i]);
                    bump!();
                }
            }
            out.push((Tok::Num(num), pos));
            continue;
        }
        let next = chars.get(i + 1).copied();
        let next2 = chars.get(i + 2).copied();
        let (tok, len) = match (c, next, next2) {
            ('<', Some('-'), Some('>')) => (Tok::Iff, 3),
            ('<', Some('='), _) => (Tok::Le, 2),
            ('>', Some('='), _) => (Tok::Ge, 2),
            ('=', Some('='), _) => (Tok::EqEq, 2),
            ('!', Some('='), _) => (Tok::Ne, 2),
            ('&', Some('&'), _) => (Tok::AndAnd, 2),
            ('|', Some('|'), _) => (Tok::OrOr, 2),
            ('(', ..) => (Tok::LParen, 1),
            (')', ..) => (Tok::RParen, 1),
            ('{', ..) => (Tok::LBrace, 1),
            ('}', ..) => (Tok::RBrace, 1),
            (',', ..) => (Tok::Comma, 1),
            (':', ..) => (Tok::Colon, 1),
            ('=', ..) => (Tok::Assign, 1),
            ('<', ..) => (Tok::Lt, 1),
            ('>', ..) => (Tok::Gt, 1),
            ('!', ..) => (Tok::Bang, 1),
            ('^', ..) => (Tok::Caret, 1),
            ('+', ..) => (Tok::Plus, 1),
            ('-', ..) => (Tok::Minus, 1),
            ('/', ..) => (Tok::Slash, 1),
            _ => return Err(Error::Syntax { pos, msg: format!("unexpected character `{c}`") }),
        };
        for _ in 0..len {
            bump!();
        }
        out.push((tok, pos));
    }
    out.push((Tok::Eof, Pos { line, col }));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lexes_operators_and_comments() {
        let toks: Vec<Tok> = tokenize("a <-> b // c\n<= 0.75").unwrap().into_iter().map(|(t, _)| t).collect();
        assert_eq!(
            toks,
            vec![Tok::Ident("a".into()), Tok::Iff, Tok::Ident("b".into()), Tok::Le, Tok::Num("0.75".into()), Tok::Eof]
        );
    }

    #[test]
    fn tracks_positions() {
        let toks = tokenize("let\n  x").unwrap();
        assert_eq!(toks[1].1, Pos { line: 2, col: 3 });
    }

    #[test]
    fn rejects_stray_characters() {
        assert!(matches!(tokenize("a # b"), Err(Error::Syntax { .. })));
    }
}
