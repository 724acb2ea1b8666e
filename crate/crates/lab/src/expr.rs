//! Closed expression grammar for coefficient fields.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary ('*' unary)*
//! unary  := '-' unary | atom
//! atom   := number | 'pi' | coordinate | func '(' expr ')' | '(' expr ')'
//! func   := 'sin' | 'cos' | 'exp'
//! ```
//!
//! Coordinates are `x1, y1, …, xp, yp, s, theta`.

use std::fmt;

use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("column {column}: {message}")]
pub struct ExprError {
    pub column: usize,
    pub message: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Exp,
}

impl Func {
    fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
        }
    }

    fn apply(self, x: f64) -> f64 {
        match self {
            Func::Sin => x.sin(),
            Func::Cos => x.cos(),
            Func::Exp => x.exp(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(f64),
    Pi,
    Var(String),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

impl Expr {
    pub fn parse(src: &str) -> Result<Self, ExprError> {
        let mut p = Parser { tokens: lex(src)?, pos: 0, len: src.len() };
        let e = p.expr()?;
        match p.tokens.get(p.pos) {
            None => Ok(e),
            Some((col, _)) => Err(ExprError { column: col + 1, message: "unexpected trailing input".into() }),
        }
    }

    pub fn constant(v: f64) -> Self {
        Expr::Num(v)
    }

    /// Variables in order of first appearance.
    pub fn variables(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.visit(&mut |e| {
            if let Expr::Var(name) = e {
                if !out.contains(&name.as_str()) {
                    out.push(name.as_str());
                }
            }
        });
        out
    }

    fn visit<'a>(&'a self, f: &mut impl FnMut(&'a Expr)) {
        f(self);
        match self {
            Expr::Neg(a) | Expr::Call(_, a) => a.visit(f),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) => {
                a.visit(f);
                b.visit(f);
            }
            Expr::Num(_) | Expr::Pi | Expr::Var(_) => {}
        }
    }

    /// Resolves variable names against `names`, the coordinate order of the
    /// values passed to [`Compiled::eval`].
    pub fn compile(&self, names: &[String]) -> Result<Compiled, String> {
        Ok(Compiled(self.lower(names)?))
    }

    fn lower(&self, names: &[String]) -> Result<Node, String> {
        let boxed = |e: &Expr| e.lower(names).map(Box::new);
        Ok(match self {
            Expr::Num(v) => Node::Num(*v),
            Expr::Pi => Node::Num(std::f64::consts::PI),
            Expr::Var(name) => {
                Node::Var(names.iter().position(|n| n == name).ok_or_else(|| format!("unknown coordinate `{name}`"))?)
            }
            Expr::Neg(a) => Node::Neg(boxed(a)?),
            Expr::Add(a, b) => Node::Add(boxed(a)?, boxed(b)?),
            Expr::Sub(a, b) => Node::Sub(boxed(a)?, boxed(b)?),
            Expr::Mul(a, b) => Node::Mul(boxed(a)?, boxed(b)?),
            Expr::Call(f, a) => Node::Call(*f, boxed(a)?),
        })
    }
}

/// Canonical form: every compound operand is parenthesized, so printing and
/// parsing again gives the same tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let operand = |e: &Expr, f: &mut fmt::Formatter<'_>| match e {
            Expr::Num(_) | Expr::Pi | Expr::Var(_) | Expr::Call(..) => write!(f, "{e}"),
            _ => write!(f, "({e})"),
        };
        match self {
            Expr::Num(v) => write!(f, "{v:?}"),
            Expr::Pi => f.write_str("pi"),
            Expr::Var(name) => f.write_str(name),
            Expr::Neg(a) => {
                f.write_str("-")?;
                operand(a, f)
            }
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) => {
                let op = match self {
                    Expr::Add(..) => " + ",
                    Expr::Sub(..) => " - ",
                    _ => " * ",
                };
                operand(a, f)?;
                f.write_str(op)?;
                operand(b, f)
            }
            Expr::Call(func, a) => write!(f, "{}({a})", func.name()),
        }
    }
}

#[derive(Clone, Debug)]
enum Node {
    Num(f64),
    Var(usize),
    Neg(Box<Node>),
    Add(Box<Node>, Box<Node>),
    Sub(Box<Node>, Box<Node>),
    Mul(Box<Node>, Box<Node>),
    Call(Func, Box<Node>),
}

/// An expression with variables bound to coordinate slots.
#[derive(Clone, Debug)]
pub struct Compiled(Node);

impl Compiled {
    pub fn eval(&self, coords: &[f64]) -> f64 {
        fn go(n: &Node, c: &[f64]) -> f64 {
            match n {
                Node::Num(v) => *v,
                Node::Var(i) => c[*i],
                Node::Neg(a) => -go(a, c),
                Node::Add(a, b) => go(a, c) + go(b, c),
                Node::Sub(a, b) => go(a, c) - go(b, c),
                Node::Mul(a, b) => go(a, c) * go(b, c),
                Node::Call(f, a) => f.apply(go(a, c)),
            }
        }
        go(&self.0, coords)
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Token {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Open,
    Close,
}

fn lex(src: &str) -> Result<Vec<(usize, Token)>, ExprError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let single = match c {
            b' ' | b'\t' => {
                i += 1;
                continue;
            }
            b'+' => Some(Token::Plus),
            b'-' => Some(Token::Minus),
            b'*' => Some(Token::Star),
            b'(' => Some(Token::Open),
            b')' => Some(Token::Close),
            _ => None,
        };
        if let Some(t) = single {
            out.push((start, t));
            i += 1;
        } else if c.is_ascii_digit() || c == b'.' {
            while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                i += 1;
            }
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                i += 1;
                if i < bytes.len() && (bytes[i] == b'+' || bytes[i] == b'-') {
                    i += 1;
                }
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
            }
            let text = &src[start..i];
            let v: f64 = text
                .parse()
                .map_err(|_| ExprError { column: start + 1, message: format!("malformed number `{text}`") })?;
            out.push((start, Token::Num(v)));
        } else if c.is_ascii_alphabetic() || c == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((start, Token::Ident(src[start..i].to_string())));
        } else {
            let ch = src[start..].chars().next().unwrap_or('?');
            return Err(ExprError { column: start + 1, message: format!("unexpected character `{ch}`") });
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<(usize, Token)>,
    pos: usize,
    len: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(_, t)| t)
    }

    fn column(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.len, |(c, _)| *c) + 1
    }

    fn fail<T>(&self, message: impl Into<String>) -> Result<T, ExprError> {
        Err(ExprError { column: self.column(), message: message.into() })
    }

    fn expr(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some(Token::Plus) => {
                    self.pos += 1;
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Some(Token::Minus) => {
                    self.pos += 1;
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.unary()?;
        while self.peek() == Some(&Token::Star) {
            self.pos += 1;
            lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, ExprError> {
        if self.peek() == Some(&Token::Minus) {
            self.pos += 1;
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Expr, ExprError> {
        let Some(tok) = self.peek().cloned() else {
            return self.fail("unexpected end of expression");
        };
        self.pos += 1;
        match tok {
            Token::Num(v) => Ok(Expr::Num(v)),
            Token::Open => {
                let e = self.expr()?;
                self.close()?;
                Ok(e)
            }
            Token::Ident(name) => {
                let func = match name.as_str() {
                    "pi" => return Ok(Expr::Pi),
                    "sin" => Func::Sin,
                    "cos" => Func::Cos,
                    "exp" => Func::Exp,
                    _ => return Ok(Expr::Var(name)),
                };
                if self.peek() != Some(&Token::Open) {
                    return self.fail(format!("`{name}` needs a parenthesized argument"));
                }
                self.pos += 1;
                let arg = self.expr()?;
                self.close()?;
                Ok(Expr::Call(func, Box::new(arg)))
            }
            _ => {
                self.pos -= 1;
                self.fail("expected a number, coordinate, function or `(`")
            }
        }
    }

    fn close(&mut self) -> Result<(), ExprError> {
        if self.peek() == Some(&Token::Close) {
            self.pos += 1;
            Ok(())
        } else {
            self.fail("expected `)`")
        }
    }
}
