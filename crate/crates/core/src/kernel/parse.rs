//! Recursive-descent parser for the expression grammar.
//!
//! ```text
//! expr   := term (("+" | "-") term)*
//! term   := factor (("*" | "/") factor)*
//! factor := "-" factor | base ("^" signed-integer)?
//! base   := integer | identifier | "(" expr ")" | "exp" "(" expr ")" | "sqrt" "(" expr ")"
//! ```

use std::collections::BTreeSet;

use num_bigint::BigInt;

use super::atom::{Atom, IndVar, JetVar, Param, RESERVED_NAMES};
use super::expr::Expr;
use super::poly::Q;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
}

fn tokenize(text: &str) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let (mut line, mut column) = (1, 1);
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let (l, col) = (line, column);
        if c == '\n' {
            line += 1;
            column = 1;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            column += 1;
            continue;
        }
        let tok = if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            column += i - start;
            let n = s.parse::<BigInt>().expect("digits form an integer");
            out.push(Token { tok: Tok::Int(n), line: l, column: col });
            continue;
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            column += i - start;
            out.push(Token { tok: Tok::Ident(s), line: l, column: col });
            continue;
        } else {
            match c {
                '+' => Tok::Plus,
                '-' | '\u{2212}' => Tok::Minus,
                '*' => Tok::Star,
                '/' => Tok::Slash,
                '^' => Tok::Caret,
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                other => {
                    return Err(Error::Syntax {
                        line: l,
                        column: col,
                        message: format!("unexpected character `{other}`"),
                    })
                }
            }
        };
        out.push(Token { tok, line: l, column: col });
        i += 1;
        column += 1;
    }
    out.push(Token { tok: Tok::End, line, column });
    Ok(out)
}

/// Expression parser. User constants (for example `lambda`) are declared
/// up front; any other unknown identifier is an error.
#[derive(Debug, Clone, Default)]
pub struct Parser {
    constants: BTreeSet<String>,
}

impl Parser {
    pub fn new() -> Self {
        Parser::default()
    }

    pub fn with_constants<I, S>(mut self, names: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.constants.extend(names.into_iter().map(Into::into));
        self
    }

    /// Parses and simplifies.
    pub fn parse(&self, text: &str) -> Result<Expr> {
        self.parse_raw(text)?.simplify()
    }

    /// Parses without simplifying; the tree mirrors the input.
    pub fn parse_raw(&self, text: &str) -> Result<Expr> {
        let tokens = tokenize(text)?;
        let mut state = State { tokens, pos: 0, parser: self };
        let e = state.expr()?;
        let t = state.peek();
        if t.tok != Tok::End {
            return Err(state.error_at(t, "unexpected trailing input"));
        }
        Ok(e)
    }
}

/// Parses with no user constants.
pub fn parse(text: &str) -> Result<Expr> {
    Parser::new().parse(text)
}

struct State<'a> {
    tokens: Vec<Token>,
    pos: usize,
    parser: &'a Parser,
}

impl State<'_> {
    fn peek(&self) -> Token {
        self.tokens[self.pos].clone()
    }

    fn bump(&mut self) -> Token {
        let t = self.peek();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn error_at(&self, t: Token, message: &str) -> Error {
        let found = match &t.tok {
            Tok::End => "end of input".to_string(),
            Tok::Int(n) => format!("`{n}`"),
            Tok::Ident(s) => format!("`{s}`"),
            other => format!("{other:?}"),
        };
        Error::Syntax {
            line: t.line,
            column: t.column,
            message: format!("{message}, found {found}"),
        }
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<()> {
        let t = self.peek();
        if t.tok == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.error_at(t, &format!("expected {what}")))
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut terms = vec![self.term()?];
        loop {
            match self.peek().tok {
                Tok::Plus => {
                    self.bump();
                    terms.push(self.term()?);
                }
                Tok::Minus => {
                    self.bump();
                    let t = self.term()?;
                    terms.push(Expr::Product(vec![Expr::int(-1), t]));
                }
                _ => break,
            }
        }
        Ok(if terms.len() == 1 {
            terms.pop().expect("one term")
        } else {
            Expr::Sum(terms)
        })
    }

    fn term(&mut self) -> Result<Expr> {
        let mut factors = vec![self.factor()?];
        loop {
            match self.peek().tok {
                Tok::Star => {
                    self.bump();
                    factors.push(self.factor()?);
                }
                Tok::Slash => {
                    self.bump();
                    let f = self.factor()?;
                    factors.push(Expr::Pow(Box::new(f), -1));
                }
                _ => break,
            }
        }
        Ok(if factors.len() == 1 {
            factors.pop().expect("one factor")
        } else {
            Expr::Product(factors)
        })
    }

    fn factor(&mut self) -> Result<Expr> {
        if self.peek().tok == Tok::Minus {
            self.bump();
            let f = self.factor()?;
            return Ok(match f {
                Expr::Num(c) => Expr::Num(-c),
                other => Expr::Product(vec![Expr::int(-1), other]),
            });
        }
        let base = self.base()?;
        if self.peek().tok != Tok::Caret {
            return Ok(base);
        }
        self.bump();
        let negative = if self.peek().tok == Tok::Minus {
            self.bump();
            true
        } else {
            false
        };
        let t = self.bump();
        let Tok::Int(n) = &t.tok else {
            return Err(self.error_at(t, "expected an integer exponent"));
        };
        let k: i64 = i64::try_from(n.clone())
            .map_err(|_| self.error_at(t.clone(), "exponent too large"))?;
        Ok(Expr::Pow(Box::new(base), if negative { -k } else { k }))
    }

    fn base(&mut self) -> Result<Expr> {
        let t = self.bump();
        match &t.tok {
            Tok::Int(n) => Ok(Expr::Num(Q::from_integer(n.clone()))),
            Tok::LParen => {
                let e = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            Tok::Ident(name) if name == "exp" || name == "sqrt" => {
                self.expect(Tok::LParen, &format!("`(` after `{name}`"))?;
                let arg = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                if name == "exp" {
                    Ok(Expr::Exp(Box::new(arg)))
                } else {
                    sqrt(&arg)
                }
            }
            Tok::Ident(name) => self.identifier(name),
            _ => Err(self.error_at(t, "expected a number, identifier or `(`")),
        }
    }

    fn identifier(&self, name: &str) -> Result<Expr> {
        if let Some(a) = builtin_atom(name) {
            return Ok(Expr::Atom(a));
        }
        if self.parser.constants.contains(name) {
            return Ok(Expr::Atom(Atom::Const(name.to_string())));
        }
        Err(Error::UnknownIdentifier {
            name: name.to_string(),
            reserved: RESERVED_NAMES.join(", "),
        })
    }
}

fn builtin_atom(name: &str) -> Option<Atom> {
    let mut chars = name.chars();
    if let (Some(c), None) = (chars.next(), chars.next()) {
        if let Some(v) = IndVar::from_letter(c) {
            return Some(Atom::Var(v));
        }
    }
    match name {
        "R" => Some(Atom::Param(Param::R)),
        "S" => Some(Atom::Param(Param::S)),
        "V" => Some(Atom::Param(Param::V)),
        "W" => Some(Atom::Param(Param::W)),
        "omega" => Some(Atom::Omega),
        _ => JetVar::parse(name).map(Atom::Jet),
    }
}

fn sqrt(arg: &Expr) -> Result<Expr> {
    let radicand = arg.simplify()?;
    let r = Expr::param(Param::R);
    let disc = &(&r * &r) - &(Expr::int(4) * Expr::param(Param::S));
    if (&radicand - &disc).is_zero() {
        Ok(Expr::omega())
    } else {
        Err(Error::UnsupportedRadical(radicand.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hpz_terms_collect() {
        let e = parse("R*x*u_x + y*S*u_x").unwrap();
        let f = parse("(R*x + S*y)*u_x").unwrap();
        assert_eq!(e, f);
        assert_eq!(e.to_string(), "R*x*u_x + S*y*u_x");
    }

    #[test]
    fn exp_zero() {
        assert_eq!(parse("exp(0)").unwrap().to_string(), "1");
    }

    #[test]
    fn sqrt_maps_to_omega() {
        assert_eq!(parse("sqrt(R^2 - 4*S)").unwrap(), Expr::omega());
        assert_eq!(parse("sqrt(-4*S + R*R)").unwrap(), Expr::omega());
        assert!(matches!(parse("sqrt(R)"), Err(Error::UnsupportedRadical(_))));
        assert!(matches!(parse("sqrt(4)"), Err(Error::UnsupportedRadical(_))));
    }

    #[test]
    fn syntax_error_position() {
        match parse("x +\n  * y") {
            Err(Error::Syntax { line, column, .. }) => assert_eq!((line, column), (2, 3)),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse("(x"), Err(Error::Syntax { .. })));
        assert!(matches!(parse("x^y"), Err(Error::Syntax { .. })));
    }

    #[test]
    fn unknown_identifier_lists_reserved() {
        let err = parse("lambda*t").unwrap_err();
        assert!(err.to_string().contains("omega"));
        let e = Parser::new().with_constants(["lambda"]).parse("lambda*t").unwrap();
        assert_eq!(e.to_string(), "lambda*t");
    }

    #[test]
    fn jets_and_powers() {
        let e = parse("u_yx - u_xy + x^-1*x + 2^3").unwrap();
        assert_eq!(e, Expr::int(9));
        assert_eq!(parse("-x^2").unwrap().to_string(), "-x^2");
        assert_eq!(parse("1/2*t").unwrap(), Expr::rational(1, 2) * Expr::var(IndVar::T));
    }

    #[test]
    fn render_round_trips() {
        for text in [
            "exp(-1/2*R*t - 1/2*omega*t)",
            "(R - omega)*W/(2*R*V + 2*W)",
            "x*u_x - 1/2*y^2*u + 3",
            "S/(R*V + W)*x*y",
        ] {
            let e = parse(text).unwrap();
            assert_eq!(parse(&e.to_string()).unwrap(), e, "{text} -> {e}");
        }
    }
}
