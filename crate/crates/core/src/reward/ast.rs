//! Arithmetic expression grammar for reward programs.
//!
//! ```text
//! expr  := term (('+' | '-') term)*
//! term  := unary (('*' | '/') unary)*
//! unary := ['-'] atom
//! atom  := number | identifier | '(' expr ')'
//! ```
//!
//! Number literals are non-negative; `-` is always an operator. Identifiers
//! are validated against the factor registry at compile time, not here.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl BinOp {
    pub fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    /// Non-negative literal.
    Number(f64),
    Ident(String),
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("syntax error at offset {position}: {message}")]
pub struct SyntaxError {
    pub position: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Number(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    LParen,
    RParen,
}

struct Lexer<'a> {
    src: &'a str,
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Self {
            src,
            bytes: src.as_bytes(),
            pos: 0,
        }
    }

    fn tokens(mut self) -> Result<Vec<(Token, usize)>, SyntaxError> {
        let mut out = Vec::new();
        while self.pos < self.bytes.len() {
            let start = self.pos;
            let c = self.bytes[self.pos];
            match c {
                b' ' | b'\t' | b'\r' | b'\n' => {
                    self.pos += 1;
                }
                b'+' => {
                    out.push((Token::Plus, start));
                    self.pos += 1;
                }
                b'-' => {
                    out.push((Token::Minus, start));
                    self.pos += 1;
                }
                b'*' => {
                    out.push((Token::Star, start));
                    self.pos += 1;
                }
                b'/' => {
                    out.push((Token::Slash, start));
                    self.pos += 1;
                }
                b'(' => {
                    out.push((Token::LParen, start));
                    self.pos += 1;
                }
                b')' => {
                    out.push((Token::RParen, start));
                    self.pos += 1;
                }
                b'0'..=b'9' | b'.' => {
                    out.push((self.number(start)?, start));
                }
                b'a'..=b'z' | b'A'..=b'Z' | b'_' => {
                    while self.pos < self.bytes.len()
                        && matches!(self.bytes[self.pos], b'a'..=b'z' | b'A'..=b'Z' | b'0'..=b'9' | b'_')
                    {
                        self.pos += 1;
                    }
                    out.push((Token::Ident(self.src[start..self.pos].to_string()), start));
                }
                other => {
                    return Err(SyntaxError {
                        position: start,
                        message: format!("unexpected character `{}`", other as char),
                    })
                }
            }
        }
        Ok(out)
    }

    fn number(&mut self, start: usize) -> Result<Token, SyntaxError> {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos < self.bytes.len() && self.bytes[self.pos] == b'.' {
            self.pos += 1;
            while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
        }
        if self.pos < self.bytes.len() && matches!(self.bytes[self.pos], b'e' | b'E') {
            let mark = self.pos;
            self.pos += 1;
            if self.pos < self.bytes.len() && matches!(self.bytes[self.pos], b'+' | b'-') {
                self.pos += 1;
            }
            if self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
                while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
            } else {
                // `2e` with no digits: the e belongs to something else.
                self.pos = mark;
            }
        }
        let text = &self.src[start..self.pos];
        text.parse::<f64>()
            .map(Token::Number)
            .map_err(|_| SyntaxError {
                position: start,
                message: format!("malformed number `{text}`"),
            })
    }
}

struct Parser {
    tokens: Vec<(Token, usize)>,
    cursor: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.cursor).map(|(t, _)| t)
    }

    fn position(&self) -> usize {
        self.tokens
            .get(self.cursor)
            .map(|(_, p)| *p)
            .unwrap_or(self.end)
    }

    fn bump(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.cursor).map(|(t, _)| t.clone());
        if t.is_some() {
            self.cursor += 1;
        }
        t
    }

    fn expr(&mut self) -> Result<Expr, SyntaxError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Some(Token::Plus) => BinOp::Add,
                Some(Token::Minus) => BinOp::Sub,
                _ => break,
            };
            self.bump();
            let rhs = self.term()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr, SyntaxError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Some(Token::Star) => BinOp::Mul,
                Some(Token::Slash) => BinOp::Div,
                _ => break,
            };
            self.bump();
            let rhs = self.unary()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, SyntaxError> {
        if matches!(self.peek(), Some(Token::Minus)) {
            self.bump();
            return Ok(Expr::Neg(Box::new(self.atom()?)));
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Expr, SyntaxError> {
        let position = self.position();
        match self.bump() {
            Some(Token::Number(n)) => Ok(Expr::Number(n)),
            Some(Token::Ident(name)) => Ok(Expr::Ident(name)),
            Some(Token::LParen) => {
                let inner = self.expr()?;
                match self.bump() {
                    Some(Token::RParen) => Ok(inner),
                    _ => Err(SyntaxError {
                        position: self.position(),
                        message: "expected `)`".into(),
                    }),
                }
            }
            Some(other) => Err(SyntaxError {
                position,
                message: format!("expected a value, found `{other:?}`"),
            }),
            None => Err(SyntaxError {
                position,
                message: "unexpected end of input".into(),
            }),
        }
    }
}

/// Parses an expression; trailing input is an error.
pub fn parse(src: &str) -> Result<Expr, SyntaxError> {
    let tokens = Lexer::new(src).tokens()?;
    let mut parser = Parser {
        tokens,
        cursor: 0,
        end: src.len(),
    };
    let expr = parser.expr()?;
    if parser.cursor != parser.tokens.len() {
        return Err(SyntaxError {
            position: parser.position(),
            message: "unexpected trailing input".into(),
        });
    }
    Ok(expr)
}

impl Expr {
    /// Canonical text form. Non-atomic operands are parenthesized, so the
    /// printed form parses back to an identical tree.
    pub fn pretty(&self) -> String {
        let mut s = String::new();
        self.write(&mut s);
        s
    }

    fn write(&self, out: &mut String) {
        match self {
            Expr::Number(n) => {
                use fmt::Write;
                write!(out, "{n}").unwrap();
            }
            Expr::Ident(name) => out.push_str(name),
            Expr::Neg(inner) => {
                out.push('-');
                inner.write_atom(out);
            }
            Expr::Bin(op, l, r) => {
                l.write_atom(out);
                out.push(' ');
                out.push(op.symbol());
                out.push(' ');
                r.write_atom(out);
            }
        }
    }

    fn write_atom(&self, out: &mut String) {
        match self {
            Expr::Number(_) | Expr::Ident(_) => self.write(out),
            _ => {
                out.push('(');
                self.write(out);
                out.push(')');
            }
        }
    }

    /// Every identifier referenced, in first-appearance order.
    pub fn identifiers(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.collect_identifiers(&mut out);
        out
    }

    fn collect_identifiers<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            Expr::Number(_) => {}
            Expr::Ident(name) => {
                if !out.contains(&name.as_str()) {
                    out.push(name);
                }
            }
            Expr::Neg(inner) => inner.collect_identifiers(out),
            Expr::Bin(_, l, r) => {
                l.collect_identifiers(out);
                r.collect_identifiers(out);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_the_reference_shape() {
        let e = parse("(0.6*energy + 0.4*position)*penalty").unwrap();
        // Top level must be a product with penalty on the right.
        match &e {
            Expr::Bin(BinOp::Mul, _, r) => assert_eq!(**r, Expr::Ident("penalty".into())),
            other => panic!("expected a top-level product, got {other:?}"),
        }
        assert_eq!(e.identifiers(), vec!["energy", "position", "penalty"]);
    }

    #[test]
    fn incomplete_expression_errors_at_end() {
        let err = parse("energy + ").unwrap_err();
        assert_eq!(err.position, 9);
        assert!(err.message.contains("end of input"), "{err}");
    }

    #[test]
    fn precedence_and_associativity() {
        let e = parse("1 + 2 * 3").unwrap();
        assert_eq!(
            e,
            Expr::Bin(
                BinOp::Add,
                Box::new(Expr::Number(1.0)),
                Box::new(Expr::Bin(
                    BinOp::Mul,
                    Box::new(Expr::Number(2.0)),
                    Box::new(Expr::Number(3.0)),
                )),
            )
        );
        // Left associative subtraction: (1 - 2) - 3.
        let e = parse("1 - 2 - 3").unwrap();
        match e {
            Expr::Bin(BinOp::Sub, l, _) => {
                assert!(matches!(*l, Expr::Bin(BinOp::Sub, _, _)));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unary_minus_binds_to_one_atom() {
        assert!(parse("--energy").is_err());
        let e = parse("-(-energy)").unwrap();
        assert_eq!(
            e,
            Expr::Neg(Box::new(Expr::Neg(Box::new(Expr::Ident("energy".into())))))
        );
        // -2*x parses as (-2) * x under this grammar.
        let e = parse("-2*energy").unwrap();
        assert!(matches!(e, Expr::Bin(BinOp::Mul, _, _)));
    }

    #[test]
    fn scientific_notation_numbers() {
        assert_eq!(parse("2.5e-1").unwrap(), Expr::Number(0.25));
        assert_eq!(parse("1e3").unwrap(), Expr::Number(1000.0));
    }

    #[test]
    fn pretty_print_reparses_to_the_same_tree() {
        for src in [
            "(0.6*energy + 0.4*position)*penalty",
            "energy",
            "-(energy + aoi) / (2 - throughput)",
            "1.5 * (position - 0.25) + -energy",
            "energy/position",
        ] {
            let tree = parse(src).unwrap();
            let printed = tree.pretty();
            let reparsed = parse(&printed).unwrap();
            assert_eq!(tree, reparsed, "printed: {printed}");
        }
    }

    #[test]
    fn garbage_reports_position() {
        let err = parse("energy $ 2").unwrap_err();
        assert_eq!(err.position, 7);
        let err = parse("energy position").unwrap_err();
        assert_eq!(err.position, 7);
    }
}
