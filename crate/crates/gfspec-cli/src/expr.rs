//! Arithmetic expressions over grid variables.
//!
//! Grammar (whitespace-insensitive):
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-'* power
//! power  := atom ('^' ['-'] digits)?      // integer exponents only
//! atom   := number | 'pi' | variable | func '(' expr ')' | '(' expr ')'
//! func   := 'sin' | 'cos' | 'exp'
//! ```
//!
//! Variables are `x1..xd` on the base grid and `xi1..xik` on the fiber, both
//! one-based; the declared dimensions are checked at parse time.  Every error
//! carries the byte offset where it was detected.

use std::fmt;

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(f64),
    Pi,
    /// Zero-based base-axis variable (`x1` is `Base(0)`).
    Base(usize),
    /// Zero-based fiber-axis variable (`xi1` is `Fiber(0)`).
    Fiber(usize),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i32),
    Sin(Box<Expr>),
    Cos(Box<Expr>),
    Exp(Box<Expr>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct ParseError {
    pub offset: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "expression error at offset {}: {}", self.offset, self.message)
    }
}

impl std::error::Error for ParseError {}

/// Parse `text` against declared base dimension `d` and fiber dimension `k`.
pub fn parse(text: &str, d: usize, k: usize) -> Result<Expr, ParseError> {
    let mut p = Parser { bytes: text.as_bytes(), pos: 0, d, k };
    p.skip_ws();
    if p.pos >= p.bytes.len() {
        return Err(p.error(p.pos, "empty input"));
    }
    let e = p.expr()?;
    p.skip_ws();
    if p.pos < p.bytes.len() {
        return Err(p.error(p.pos, format!("unexpected character '{}'", p.current())));
    }
    Ok(e)
}

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
    d: usize,
    k: usize,
}

impl<'a> Parser<'a> {
    fn error(&self, offset: usize, message: impl Into<String>) -> ParseError {
        ParseError { offset, message: message.into() }
    }

    fn current(&self) -> char {
        self.bytes.get(self.pos).map(|&b| b as char).unwrap_or('\0')
    }

    fn skip_ws(&mut self) {
        while self.bytes.get(self.pos).is_some_and(|b| b.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    fn eat(&mut self, c: u8) -> bool {
        self.skip_ws();
        if self.bytes.get(self.pos) == Some(&c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            if self.eat(b'+') {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat(b'-') {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat(b'*') {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat(b'/') {
                lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.eat(b'-') {
            Ok(Expr::Neg(Box::new(self.unary()?)))
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if !self.eat(b'^') {
            return Ok(base);
        }
        self.skip_ws();
        let start = self.pos;
        let negative = self.eat(b'-');
        self.skip_ws();
        let digits_start = self.pos;
        while self.bytes.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        if self.pos == digits_start {
            return Err(self.error(start, "exponent must be an integer literal"));
        }
        if self.bytes.get(self.pos) == Some(&b'.') {
            return Err(self.error(start, "exponent must be an integer literal"));
        }
        let text = std::str::from_utf8(&self.bytes[digits_start..self.pos]).unwrap();
        let mut n: i32 = text
            .parse()
            .map_err(|_| self.error(start, "exponent out of range"))?;
        if negative {
            n = -n;
        }
        Ok(Expr::Pow(Box::new(base), n))
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        self.skip_ws();
        let start = self.pos;
        match self.bytes.get(self.pos) {
            None => Err(self.error(start, "expected a value")),
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.error(self.pos, "expected ')'"));
                }
                Ok(inner)
            }
            Some(b) if b.is_ascii_digit() => self.number(),
            Some(b) if b.is_ascii_alphabetic() || *b == b'_' => self.identifier(),
            Some(&b) => Err(self.error(start, format!("unexpected character '{}'", b as char))),
        }
    }

    fn number(&mut self) -> Result<Expr, ParseError> {
        let start = self.pos;
        while self.bytes.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        if self.bytes.get(self.pos) == Some(&b'.') {
            self.pos += 1;
            while self.bytes.get(self.pos).is_some_and(u8::is_ascii_digit) {
                self.pos += 1;
            }
        }
        if matches!(self.bytes.get(self.pos), Some(b'e' | b'E')) {
            let mark = self.pos;
            self.pos += 1;
            if matches!(self.bytes.get(self.pos), Some(b'+' | b'-')) {
                self.pos += 1;
            }
            if self.bytes.get(self.pos).is_some_and(u8::is_ascii_digit) {
                while self.bytes.get(self.pos).is_some_and(u8::is_ascii_digit) {
                    self.pos += 1;
                }
            } else {
                // not an exponent after all ("2e" could start an identifier
                // elsewhere, but here it is simply malformed)
                self.pos = mark;
            }
        }
        let text = std::str::from_utf8(&self.bytes[start..self.pos]).unwrap();
        text.parse()
            .map(Expr::Num)
            .map_err(|_| self.error(start, format!("malformed number '{text}'")))
    }

    fn identifier(&mut self) -> Result<Expr, ParseError> {
        let start = self.pos;
        while self
            .bytes
            .get(self.pos)
            .is_some_and(|b| b.is_ascii_alphanumeric() || *b == b'_')
        {
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.bytes[start..self.pos]).unwrap();
        match name {
            "pi" => Ok(Expr::Pi),
            "sin" | "cos" | "exp" => {
                if !self.eat(b'(') {
                    return Err(self.error(
                        self.pos,
                        format!("function '{name}' takes one parenthesized argument"),
                    ));
                }
                let arg = Box::new(self.expr()?);
                if !self.eat(b')') {
                    return Err(self.error(self.pos, "expected ')'"));
                }
                Ok(match name {
                    "sin" => Expr::Sin(arg),
                    "cos" => Expr::Cos(arg),
                    _ => Expr::Exp(arg),
                })
            }
            _ => self.variable(name, start),
        }
    }

    fn variable(&self, name: &str, start: usize) -> Result<Expr, ParseError> {
        let (prefix, declared, build): (&str, usize, fn(usize) -> Expr) =
            if let Some(rest) = name.strip_prefix("xi") {
                if !rest.is_empty() {
                    ("xi", self.k, Expr::Fiber)
                } else {
                    return Err(self.error(start, unknown(name, self.d, self.k)));
                }
            } else if let Some(rest) = name.strip_prefix('x') {
                if !rest.is_empty() {
                    ("x", self.d, Expr::Base)
                } else {
                    return Err(self.error(start, unknown(name, self.d, self.k)));
                }
            } else {
                return Err(self.error(start, unknown(name, self.d, self.k)));
            };
        let index: usize = match name[prefix.len()..].parse() {
            Ok(i) => i,
            Err(_) => return Err(self.error(start, unknown(name, self.d, self.k))),
        };
        if index == 0 || index > declared {
            return Err(self.error(
                start,
                format!(
                    "unknown identifier '{name}': declared variables are {}",
                    declared_list(self.d, self.k)
                ),
            ));
        }
        Ok(build(index - 1))
    }
}

fn unknown(name: &str, d: usize, k: usize) -> String {
    format!(
        "unknown identifier '{name}': declared variables are {}",
        declared_list(d, k)
    )
}

fn declared_list(d: usize, k: usize) -> String {
    let mut parts = Vec::new();
    match d {
        0 => {}
        1 => parts.push("x1".to_string()),
        _ => parts.push(format!("x1..x{d}")),
    }
    match k {
        0 => {}
        1 => parts.push("xi1".to_string()),
        _ => parts.push(format!("xi1..xi{k}")),
    }
    if parts.is_empty() {
        "none (constants only)".to_string()
    } else {
        parts.join(" and ")
    }
}

impl Expr {
    /// Evaluate at base coordinates `x` and fiber coordinates `xi`.
    pub fn eval(&self, x: &[f64], xi: &[f64]) -> f64 {
        match self {
            Expr::Num(v) => *v,
            Expr::Pi => std::f64::consts::PI,
            Expr::Base(i) => x[*i],
            Expr::Fiber(i) => xi[*i],
            Expr::Neg(a) => -a.eval(x, xi),
            Expr::Add(a, b) => a.eval(x, xi) + b.eval(x, xi),
            Expr::Sub(a, b) => a.eval(x, xi) - b.eval(x, xi),
            Expr::Mul(a, b) => a.eval(x, xi) * b.eval(x, xi),
            Expr::Div(a, b) => a.eval(x, xi) / b.eval(x, xi),
            Expr::Pow(a, n) => a.eval(x, xi).powi(*n),
            Expr::Sin(a) => a.eval(x, xi).sin(),
            Expr::Cos(a) => a.eval(x, xi).cos(),
            Expr::Exp(a) => a.eval(x, xi).exp(),
        }
    }

    /// Canonical fully parenthesized form; parsing it back yields an
    /// identical tree.
    pub fn pretty(&self) -> String {
        match self {
            Expr::Num(v) => format!("{v}"),
            Expr::Pi => "pi".to_string(),
            Expr::Base(i) => format!("x{}", i + 1),
            Expr::Fiber(i) => format!("xi{}", i + 1),
            Expr::Neg(a) => format!("(-{})", a.pretty()),
            Expr::Add(a, b) => format!("({} + {})", a.pretty(), b.pretty()),
            Expr::Sub(a, b) => format!("({} - {})", a.pretty(), b.pretty()),
            Expr::Mul(a, b) => format!("({} * {})", a.pretty(), b.pretty()),
            Expr::Div(a, b) => format!("({} / {})", a.pretty(), b.pretty()),
            Expr::Pow(a, n) => format!("({} ^ {n})", a.pretty()),
            Expr::Sin(a) => format!("sin({})", a.pretty()),
            Expr::Cos(a) => format!("cos({})", a.pretty()),
            Expr::Exp(a) => format!("exp({})", a.pretty()),
        }
    }
}
