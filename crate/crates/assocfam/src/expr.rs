//! A tiny arithmetic expression grammar used for custom family laws, custom
//! warp functions, and graph surfaces.
//!
//! Grammar: numbers, named variables, `+ - * /`, unary minus, parentheses,
//! and the functions `sin`, `cos`, `pow(base, exponent)`. Expressions
//! evaluate over any [`Scalar`], so the same string works for plain floats
//! and for jets.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
enum Node {
    Num(f64),
    Var(usize),
    Add(Box<Node>, Box<Node>),
    Sub(Box<Node>, Box<Node>),
    Mul(Box<Node>, Box<Node>),
    Div(Box<Node>, Box<Node>),
    Neg(Box<Node>),
    Sin(Box<Node>),
    Cos(Box<Node>),
    /// pow with a literal integer exponent, valid for any base sign.
    PowInt(Box<Node>, i32),
    /// pow with a general exponent, evaluated as exp(e ln b).
    Pow(Box<Node>, Box<Node>),
}

/// A parsed expression over a fixed set of variable names. Printing returns
/// the original source text, so descriptor round-trips are bit-exact.
#[derive(Debug, Clone, PartialEq)]
pub struct Expr {
    source: String,
    vars: Vec<String>,
    root: Node,
}

impl Expr {
    pub fn parse(source: &str, vars: &[&str]) -> Result<Expr> {
        let mut p = Parser {
            chars: source.chars().collect(),
            pos: 0,
            vars,
        };
        let root = p.expr()?;
        p.skip_ws();
        if p.pos != p.chars.len() {
            return Err(Error::Parse(format!(
                "unexpected trailing input at byte {} in {source:?}",
                p.pos
            )));
        }
        Ok(Expr {
            source: source.to_string(),
            vars: vars.iter().map(|s| s.to_string()).collect(),
            root,
        })
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn eval<S: Scalar>(&self, args: &[S]) -> S {
        assert_eq!(args.len(), self.vars.len(), "wrong number of arguments");
        eval_node(&self.root, args)
    }

    pub fn eval1<S: Scalar>(&self, x: S) -> S {
        self.eval(&[x])
    }
}

fn eval_node<S: Scalar>(n: &Node, args: &[S]) -> S {
    match n {
        Node::Num(x) => S::from_f64(*x),
        Node::Var(i) => args[*i],
        Node::Add(a, b) => eval_node(a, args) + eval_node(b, args),
        Node::Sub(a, b) => eval_node(a, args) - eval_node(b, args),
        Node::Mul(a, b) => eval_node(a, args) * eval_node(b, args),
        Node::Div(a, b) => eval_node(a, args) * eval_node(b, args).recip(),
        Node::Neg(a) => -eval_node(a, args),
        Node::Sin(a) => eval_node(a, args).sin(),
        Node::Cos(a) => eval_node(a, args).cos(),
        Node::PowInt(a, p) => {
            let base = eval_node(a, args);
            let mut acc = S::from_f64(1.0);
            for _ in 0..p.unsigned_abs() {
                acc = acc * base;
            }
            if *p < 0 {
                acc.recip()
            } else {
                acc
            }
        }
        Node::Pow(a, b) => {
            let base = eval_node(a, args);
            let e = eval_node(b, args);
            (e * base.ln()).exp()
        }
    }
}

struct Parser<'a> {
    chars: Vec<char>,
    pos: usize,
    vars: &'a [&'a str],
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek();
        if c.is_some() {
            self.pos += 1;
        }
        c
    }

    fn expect(&mut self, c: char) -> Result<()> {
        match self.bump() {
            Some(x) if x == c => Ok(()),
            other => Err(Error::Parse(format!("expected '{c}', found {other:?}"))),
        }
    }

    fn expr(&mut self) -> Result<Node> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some('+') => {
                    self.bump();
                    lhs = Node::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Some('-') => {
                    self.bump();
                    lhs = Node::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Node> {
        let mut lhs = self.factor()?;
        loop {
            match self.peek() {
                Some('*') => {
                    self.bump();
                    lhs = Node::Mul(Box::new(lhs), Box::new(self.factor()?));
                }
                Some('/') => {
                    self.bump();
                    lhs = Node::Div(Box::new(lhs), Box::new(self.factor()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn factor(&mut self) -> Result<Node> {
        if self.peek() == Some('-') {
            self.bump();
            return Ok(Node::Neg(Box::new(self.factor()?)));
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<Node> {
        match self.peek() {
            Some('(') => {
                self.bump();
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == '.' => self.number(),
            Some(c) if c.is_alphabetic() || c == '_' => self.ident(),
            other => Err(Error::Parse(format!("unexpected token {other:?}"))),
        }
    }

    fn number(&mut self) -> Result<Node> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.chars.len() {
            let c = self.chars[self.pos];
            if c.is_ascii_digit() || c == '.' {
                self.pos += 1;
            } else if (c == 'e' || c == 'E')
                && self.pos > start
                && self
                    .chars
                    .get(self.pos + 1)
                    .is_some_and(|&n| n.is_ascii_digit() || n == '+' || n == '-')
            {
                self.pos += 2;
            } else {
                break;
            }
        }
        let text: String = self.chars[start..self.pos].iter().collect();
        text.parse::<f64>()
            .map(Node::Num)
            .map_err(|_| Error::Parse(format!("bad numeric literal {text:?}")))
    }

    fn ident(&mut self) -> Result<Node> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.chars.len()
            && (self.chars[self.pos].is_alphanumeric() || self.chars[self.pos] == '_')
        {
            self.pos += 1;
        }
        let name: String = self.chars[start..self.pos].iter().collect();
        match name.as_str() {
            "sin" => {
                self.expect('(')?;
                let a = self.expr()?;
                self.expect(')')?;
                Ok(Node::Sin(Box::new(a)))
            }
            "cos" => {
                self.expect('(')?;
                let a = self.expr()?;
                self.expect(')')?;
                Ok(Node::Cos(Box::new(a)))
            }
            "pow" => {
                self.expect('(')?;
                let base = self.expr()?;
                self.expect(',')?;
                let exponent = self.expr()?;
                self.expect(')')?;
                if let Node::Num(p) = exponent {
                    if p.fract() == 0.0 && p.abs() <= 16.0 {
                        return Ok(Node::PowInt(Box::new(base), p as i32));
                    }
                }
                Ok(Node::Pow(Box::new(base), Box::new(exponent)))
            }
            _ => {
                if let Some(i) = self.vars.iter().position(|v| *v == name) {
                    Ok(Node::Var(i))
                } else {
                    Err(Error::Parse(format!("unknown identifier {name:?}")))
                }
            }
        }
    }
}
