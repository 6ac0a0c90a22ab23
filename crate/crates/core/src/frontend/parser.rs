//! Recursive-descent parser for `.nd` source text.
//!
//! ```text
//! program  := fundef* expr
//! fundef   := "fun" IDENT "(" [param ("," param)*] ")" ":" type "{" expr "}"
//! param    := IDENT ":" type
//! type     := "bool" | "int" ["<" NUM ">"] | "(" type ("," type)+ ")"
//! expr     := "let" IDENT "=" expr "in" expr
//!           | "if" expr "then" expr "else" expr
//!           | "observe" expr
//!           | binary
//! binary   := unary (op unary)*            precedence: <-> || ^ && (== !=) (< <= > >=) (+ -)
//! unary    := "!" unary | primary
//! primary  := "true" | "false" | NUM | IDENT | IDENT "(" args ")"
//!           | "flip" "(" prob ")" | "nflip" "(" ")"
//!           | "uniform" "(" NUM "," NUM ")" | "choose" "(" NUM "," NUM ")"
//!           | "fst" primary | "snd" primary | "(" expr ("," expr)* ")"
//!           | "let" ... | "if" ... | "observe" ...
//! prob     := NUM ["/" NUM]
//! ```

use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::ast::{BinOp, Param, SExpr, SFunction, SKind, SType, SurfaceProgram};
use super::lexer::{tokenize, Tok};
use crate::error::{Error, Result};
use crate::lang::{Pos, Rational};

pub fn parse(src: &str) -> Result<SurfaceProgram> {
    let mut p = Parser::new(src)?;
    let mut functions = Vec::new();
    while p.peek() == &Tok::Fun {
        functions.push(p.function()?);
    }
    let main = p.expr()?;
    p.expect(Tok::Eof)?;
    Ok(SurfaceProgram { functions, main })
}

/// Parses a standalone expression (used for command-line value literals).
pub fn parse_expr(src: &str) -> Result<SExpr> {
    let mut p = Parser::new(src)?;
    let e = p.expr()?;
    p.expect(Tok::Eof)?;
    Ok(e)
}

struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
}

impl Parser {
    fn new(src: &str) -> Result<Parser> {
        Ok(Parser { toks: tokenize(src)?, at: 0 })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].1
    }

    fn next(&mut self) -> (Tok, Pos) {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Syntax { pos: self.pos(), msg: msg.into() })
    }

    fn expect(&mut self, tok: Tok) -> Result<Pos> {
        if *self.peek() == tok {
            Ok(self.next().1)
        } else {
            self.err(format!("expected {}, found {}", tok.describe(), self.peek().describe()))
        }
    }

    fn ident(&mut self) -> Result<(Arc<str>, Pos)> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                let pos = self.next().1;
                Ok((s.into(), pos))
            }
            other => self.err(format!("expected identifier, found {}", other.describe())),
        }
    }

    fn number(&mut self) -> Result<u64> {
        match self.peek().clone() {
            Tok::Num(s) if !s.contains('.') => {
                let n = s.parse::<u64>().or_else(|_| self.err("integer literal too large"))?;
                self.next();
                Ok(n)
            }
            other => self.err(format!("expected integer, found {}", other.describe())),
        }
    }

    fn function(&mut self) -> Result<SFunction> {
        let pos = self.expect(Tok::Fun)?;
        let (name, _) = self.ident()?;
        self.expect(Tok::LParen)?;
        let mut params = Vec::new();
        if self.peek() != &Tok::RParen {
            loop {
                let (pname, ppos) = self.ident()?;
                self.expect(Tok::Colon)?;
                let ty = self.ty()?;
                params.push(Param { name: pname, ty, pos: ppos });
                if self.peek() == &Tok::Comma {
                    self.next();
                } else {
                    break;
                }
            }
        }
        self.expect(Tok::RParen)?;
        self.expect(Tok::Colon)?;
        let ret = self.ty()?;
        self.expect(Tok::LBrace)?;
        let body = self.expr()?;
        self.expect(Tok::RBrace)?;
        Ok(SFunction { name, params, ret, body, pos })
    }

    fn ty(&mut self) -> Result<SType> {
        match self.peek() {
            Tok::BoolTy => {
                self.next();
                Ok(SType::Bool)
            }
            Tok::IntTy => {
                self.next();
                if self.peek() == &Tok::Lt {
                    self.next();
                    let w = self.number()?;
                    if !(1..=32).contains(&w) {
                        return self.err("integer width must be between 1 and 32");
                    }
                    self.expect(Tok::Gt)?;
                    Ok(SType::Int(Some(w as u32)))
                } else {
                    Ok(SType::Int(None))
                }
            }
            Tok::LParen => {
                self.next();
                let mut items = vec![self.ty()?];
                while self.peek() == &Tok::Comma {
                    self.next();
                    items.push(self.ty()?);
                }
                self.expect(Tok::RParen)?;
                if items.len() < 2 {
                    return Ok(items.pop().unwrap());
                }
                Ok(right_nest(items, SType::pair))
            }
            other => self.err(format!("expected type, found {}", other.describe())),
        }
    }

    fn expr(&mut self) -> Result<SExpr> {
        match self.peek() {
            Tok::Let | Tok::If | Tok::Observe => self.keyword_expr(),
            _ => self.binary(0),
        }
    }

    fn keyword_expr(&mut self) -> Result<SExpr> {
        let (tok, pos) = self.next();
        let kind = match tok {
            Tok::Let => {
                let (name, _) = self.ident()?;
                self.expect(Tok::Assign)?;
                let bound = self.expr()?;
                self.expect(Tok::In)?;
                let body = self.expr()?;
                SKind::Let(name, Box::new(bound), Box::new(body))
            }
            Tok::If => {
                let c = self.expr()?;
                self.expect(Tok::Then)?;
                let t = self.expr()?;
                self.expect(Tok::Else)?;
                let e = self.expr()?;
                SKind::If(Box::new(c), Box::new(t), Box::new(e))
            }
            Tok::Observe => SKind::Observe(Box::new(self.expr()?)),
            _ => unreachable!("keyword_expr called on non-keyword"),
        };
        Ok(SExpr::new(kind, pos))
    }

    fn binop(&self) -> Option<BinOp> {
        Some(match self.peek() {
            Tok::Iff => BinOp::Iff,
            Tok::OrOr => BinOp::Or,
            Tok::Caret => BinOp::Xor,
            Tok::AndAnd => BinOp::And,
            Tok::EqEq => BinOp::Eq,
            Tok::Ne => BinOp::Ne,
            Tok::Lt => BinOp::Lt,
            Tok::Le => BinOp::Le,
            Tok::Gt => BinOp::Gt,
            Tok::Ge => BinOp::Ge,
            Tok::Plus => BinOp::Add,
            Tok::Minus => BinOp::Sub,
            _ => return None,
        })
    }

    fn binary(&mut self, min_prec: u8) -> Result<SExpr> {
        let mut lhs = self.unary()?;
        while let Some(op) = self.binop() {
            let prec = op.precedence();
            if prec <= min_prec {
                break;
            }
            let pos = self.next().1;
            let rhs = self.binary(prec)?;
            lhs = SExpr::new(SKind::Binary(op, Box::new(lhs), Box::new(rhs)), pos);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<SExpr> {
        if self.peek() == &Tok::Bang {
            let pos = self.next().1;
            let inner = self.unary()?;
            return Ok(SExpr::new(SKind::Not(Box::new(inner)), pos));
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<SExpr> {
        let pos = self.pos();
        let kind = match self.peek().clone() {
            Tok::Let | Tok::If | Tok::Observe => return self.keyword_expr(),
            Tok::True => {
                self.next();
                SKind::Bool(true)
            }
            Tok::False => {
                self.next();
                SKind::Bool(false)
            }
            Tok::Num(_) => SKind::Int(self.number()?),
            Tok::Ident(name) => {
                self.next();
                if self.peek() == &Tok::LParen {
                    self.next();
                    let mut args = Vec::new();
                    if self.peek() != &Tok::RParen {
                        args.push(self.expr()?);
                        while self.peek() == &Tok::Comma {
                            self.next();
                            args.push(self.expr()?);
                        }
                    }
                    self.expect(Tok::RParen)?;
                    SKind::Call(name.into(), args)
                } else {
                    SKind::Var(name.into())
                }
            }
            Tok::Flip => {
                self.next();
                self.expect(Tok::LParen)?;
                let theta = self.probability()?;
                self.expect(Tok::RParen)?;
                SKind::Flip(theta)
            }
            Tok::NFlip => {
                self.next();
                self.expect(Tok::LParen)?;
                self.expect(Tok::RParen)?;
                SKind::NFlip
            }
            Tok::Uniform | Tok::Choose => {
                let (tok, _) = self.next();
                self.expect(Tok::LParen)?;
                let lo = self.number()?;
                self.expect(Tok::Comma)?;
                let hi = self.number()?;
                self.expect(Tok::RParen)?;
                if tok == Tok::Uniform {
                    SKind::Uniform(lo, hi)
                } else {
                    SKind::Choose(lo, hi)
                }
            }
            Tok::Fst | Tok::Snd => {
                let (tok, _) = self.next();
                let inner = Box::new(self.primary()?);
                if tok == Tok::Fst {
                    SKind::Fst(inner)
                } else {
                    SKind::Snd(inner)
                }
            }
            Tok::LParen => {
                self.next();
                let mut items = vec![self.expr()?];
                while self.peek() == &Tok::Comma {
                    self.next();
                    items.push(self.expr()?);
                }
                self.expect(Tok::RParen)?;
                if items.len() == 1 {
                    return Ok(items.pop().unwrap());
                }
                return Ok(right_nest(items, |a, b| {
                    let p = a.pos;
                    SExpr::new(SKind::Pair(Box::new(a), Box::new(b)), p)
                }));
            }
            other => return self.err(format!("expected expression, found {}", other.describe())),
        };
        Ok(SExpr::new(kind, pos))
    }

    fn probability(&mut self) -> Result<Rational> {
        let pos = self.pos();
        let text = match self.peek().clone() {
            Tok::Num(s) => {
                self.next();
                s
            }
            other => return self.err(format!("expected probability, found {}", other.describe())),
        };
        let mut q = decimal_to_rational(&text);
        if self.peek() == &Tok::Slash {
            self.next();
            let den = match self.peek().clone() {
                Tok::Num(s) => {
                    self.next();
                    decimal_to_rational(&s)
                }
                other => return self.err(format!("expected denominator, found {}", other.describe())),
            };
            if den.is_zero() {
                return Err(Error::Syntax { pos, msg: "division by zero in probability".into() });
            }
            q /= den;
        }
        if q > Rational::one() {
            return Err(Error::Syntax { pos, msg: format!("probability {q} out of range [0, 1]") });
        }
        Ok(q)
    }
}

fn decimal_to_rational(text: &str) -> Rational {
    let (int, frac) = text.split_once('.').unwrap_or((text, ""));
    let digits: BigInt = format!("{int}{frac}").parse().unwrap();
    let scale = BigInt::from(10u32).pow(frac.len() as u32);
    Rational::new(digits, scale)
}

fn right_nest<T>(mut items: Vec<T>, mk: impl Fn(T, T) -> T) -> T {
    let mut acc = items.pop().unwrap();
    while let Some(prev) = items.pop() {
        acc = mk(prev, acc);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::ratio;

    #[test]
    fn flip_literal_is_exact() {
        let e = parse_expr("flip(0.3)").unwrap();
        assert_eq!(e.kind, SKind::Flip(ratio(3, 10)));
        let e = parse_expr("flip(1/3)").unwrap();
        assert_eq!(e.kind, SKind::Flip(ratio(1, 3)));
    }

    #[test]
    fn out_of_range_probability_is_rejected() {
        let err = parse_expr("flip(1.5)").unwrap_err();
        assert!(err.to_string().contains("out of range"), "{err}");
    }

    #[test]
    fn syntax_errors_carry_positions() {
        match parse("let x = in x") {
            Err(Error::Syntax { pos, .. }) => assert_eq!(pos, Pos { line: 1, col: 9 }),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn precedence_and_tuples() {
        let e = parse_expr("a || b && c").unwrap();
        match e.kind {
            SKind::Binary(BinOp::Or, _, rhs) => {
                assert!(matches!(rhs.kind, SKind::Binary(BinOp::And, ..)))
            }
            other => panic!("{other:?}"),
        }
        let e = parse_expr("(a, b, c)").unwrap();
        match e.kind {
            SKind::Pair(_, rest) => assert!(matches!(rest.kind, SKind::Pair(..))),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn multi_parameter_functions() {
        let p = parse("fun f(a: int, b: int<3>): (bool, bool) { (a == b, true) } f(1, 2)").unwrap();
        assert_eq!(p.functions[0].params.len(), 2);
        assert_eq!(p.functions[0].params[1].ty, SType::Int(Some(3)));
        assert_eq!(p.functions[0].ret, SType::pair(SType::Bool, SType::Bool));
    }
}
