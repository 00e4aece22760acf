//! Expression syntax for potentials.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | power
//! power  := atom ('^' '-'? INTEGER)?
//! atom   := NUMBER | VAR | FUNC '(' expr ')' | '(' expr ')'
//! VAR    := 'x' [1-9][0-9]*
//! FUNC   := 'sqrt' | 'exp'
//! ```

use std::fmt;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Const(f64),
    /// 0-based variable index (`x1` is `Var(0)`).
    Var(usize),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i32),
    Sqrt(Box<Expr>),
    Exp(Box<Expr>),
}

impl Expr {
    /// Number of variables referenced, i.e. one past the largest index.
    pub fn arity(&self) -> usize {
        match self {
            Expr::Const(_) => 0,
            Expr::Var(j) => j + 1,
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Sqrt(a) | Expr::Exp(a) => a.arity(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.arity().max(b.arity())
            }
        }
    }

    fn collect_vars(&self, out: &mut Vec<usize>) {
        match self {
            Expr::Const(_) => {}
            Expr::Var(j) => {
                if !out.contains(j) {
                    out.push(*j);
                }
            }
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Sqrt(a) | Expr::Exp(a) => a.collect_vars(out),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }

    fn summands(&self, negate: bool, out: &mut Vec<(bool, Expr)>) {
        match self {
            Expr::Add(a, b) => {
                a.summands(negate, out);
                b.summands(negate, out);
            }
            Expr::Sub(a, b) => {
                a.summands(negate, out);
                b.summands(!negate, out);
            }
            Expr::Neg(a) => a.summands(!negate, out),
            other => out.push((negate, other.clone())),
        }
    }

    /// Writes the expression as `g_0(x_0) + … + g_{d−1}(x_{d−1})` when every
    /// top-level summand depends on at most one variable. Constant summands
    /// are folded into `g_0`.
    pub fn additive_split(&self, dim: usize) -> Option<Vec<Expr>> {
        if dim == 0 {
            return None;
        }
        let mut terms = Vec::new();
        self.summands(false, &mut terms);
        let mut parts: Vec<Option<Expr>> = vec![None; dim];
        for (negate, term) in terms {
            let mut vars = Vec::new();
            term.collect_vars(&mut vars);
            let axis = match vars.as_slice() {
                [] => 0,
                [j] if *j < dim => *j,
                _ => return None,
            };
            let slot = &mut parts[axis];
            *slot = Some(match (slot.take(), negate) {
                (None, false) => term,
                (None, true) => Expr::Neg(Box::new(term)),
                (Some(acc), false) => acc + term,
                (Some(acc), true) => acc - term,
            });
        }
        Some(parts.into_iter().map(|p| p.unwrap_or(Expr::Const(0.0))).collect())
    }

    /// Plain evaluation. Domain violations surface as NaN.
    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            Expr::Const(c) => *c,
            Expr::Var(j) => x[*j],
            Expr::Neg(a) => -a.eval(x),
            Expr::Add(a, b) => a.eval(x) + b.eval(x),
            Expr::Sub(a, b) => a.eval(x) - b.eval(x),
            Expr::Mul(a, b) => a.eval(x) * b.eval(x),
            Expr::Div(a, b) => a.eval(x) / b.eval(x),
            Expr::Pow(a, n) => a.eval(x).powi(*n),
            Expr::Sqrt(a) => {
                let v = a.eval(x);
                if v >= 0.0 {
                    v.sqrt()
                } else {
                    f64::NAN
                }
            }
            Expr::Exp(a) => a.eval(x).exp(),
        }
    }

    pub fn var(j: usize) -> Expr {
        Expr::Var(j)
    }

    pub fn constant(c: f64) -> Expr {
        Expr::Const(c)
    }
}

impl std::ops::Add for Expr {
    type Output = Expr;
    fn add(self, rhs: Expr) -> Expr {
        Expr::Add(Box::new(self), Box::new(rhs))
    }
}

impl std::ops::Sub for Expr {
    type Output = Expr;
    fn sub(self, rhs: Expr) -> Expr {
        Expr::Sub(Box::new(self), Box::new(rhs))
    }
}

impl std::ops::Mul for Expr {
    type Output = Expr;
    fn mul(self, rhs: Expr) -> Expr {
        Expr::Mul(Box::new(self), Box::new(rhs))
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) if *c < 0.0 => write!(f, "({c})"),
            Expr::Const(c) => write!(f, "{c}"),
            Expr::Var(j) => write!(f, "x{}", j + 1),
            Expr::Neg(a) => write!(f, "(-{a})"),
            Expr::Add(a, b) => write!(f, "({a} + {b})"),
            Expr::Sub(a, b) => write!(f, "({a} - {b})"),
            Expr::Mul(a, b) => write!(f, "({a} * {b})"),
            Expr::Div(a, b) => write!(f, "({a} / {b})"),
            Expr::Pow(a, n) => write!(f, "{a}^{n}"),
            Expr::Sqrt(a) => write!(f, "sqrt({a})"),
            Expr::Exp(a) => write!(f, "exp({a})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
}

struct Lexed {
    toks: Vec<(Tok, usize)>,
    end: usize,
}

fn lex(text: &str) -> Result<Lexed> {
    let chars: Vec<char> = text.chars().collect();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        if c.is_whitespace() {
            i += 1;
        } else if "+-*/^(),".contains(c) {
            toks.push((Tok::Op(c), col));
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    i = j;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let s: String = chars[start..i].iter().collect();
            let v: f64 = s.parse().map_err(|_| Error::Syntax {
                column: col,
                message: format!("malformed number `{s}`"),
            })?;
            toks.push((Tok::Num(v), col));
        } else if c.is_ascii_alphabetic() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_alphanumeric() {
                i += 1;
            }
            toks.push((Tok::Ident(chars[start..i].iter().collect()), col));
        } else {
            return Err(Error::Syntax {
                column: col,
                message: format!("unexpected character `{c}`"),
            });
        }
    }
    Ok(Lexed {
        toks,
        end: chars.len() + 1,
    })
}

struct Parser {
    lexed: Lexed,
    pos: usize,
    max_vars: Option<usize>,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.lexed.toks.get(self.pos).map(|(t, _)| t)
    }

    fn col(&self) -> usize {
        self.lexed
            .toks
            .get(self.pos)
            .map(|(_, c)| *c)
            .unwrap_or(self.lexed.end)
    }

    fn eat(&mut self, op: char) -> bool {
        if self.peek() == Some(&Tok::Op(op)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn syntax<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::Syntax {
            column: self.col(),
            message: message.into(),
        })
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut acc = self.term()?;
        loop {
            if self.eat('+') {
                acc = Expr::Add(Box::new(acc), Box::new(self.term()?));
            } else if self.eat('-') {
                acc = Expr::Sub(Box::new(acc), Box::new(self.term()?));
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut acc = self.unary()?;
        loop {
            if self.eat('*') {
                acc = Expr::Mul(Box::new(acc), Box::new(self.unary()?));
            } else if self.eat('/') {
                acc = Expr::Div(Box::new(acc), Box::new(self.unary()?));
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat('-') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if !self.eat('^') {
            return Ok(base);
        }
        let negative = self.eat('-');
        let col = self.col();
        match self.peek() {
            Some(Tok::Num(v)) if v.fract() == 0.0 && v.abs() <= i32::MAX as f64 => {
                let n = *v as i32;
                self.pos += 1;
                Ok(Expr::Pow(Box::new(base), if negative { -n } else { n }))
            }
            Some(_) => Err(Error::Syntax {
                column: col,
                message: "exponent must be an integer literal".into(),
            }),
            None => self.syntax("unexpected end of input"),
        }
    }

    fn atom(&mut self) -> Result<Expr> {
        let col = self.col();
        let Some(tok) = self.peek().cloned() else {
            return self.syntax("unexpected end of input");
        };
        self.pos += 1;
        match tok {
            Tok::Num(v) => Ok(Expr::Const(v)),
            Tok::Op('(') => {
                let inner = self.expr()?;
                if !self.eat(')') {
                    return self.syntax("expected `)`");
                }
                Ok(inner)
            }
            Tok::Ident(name) => self.ident(name, col),
            Tok::Op(c) => Err(Error::Syntax {
                column: col,
                message: format!("unexpected `{c}`"),
            }),
        }
    }

    fn ident(&mut self, name: String, col: usize) -> Result<Expr> {
        match name.as_str() {
            "sqrt" | "exp" => {
                if !self.eat('(') {
                    return self.syntax(format!("expected `(` after `{name}`"));
                }
                let mut args = vec![self.expr()?];
                while self.eat(',') {
                    args.push(self.expr()?);
                }
                if !self.eat(')') {
                    return self.syntax("expected `)`");
                }
                if args.len() != 1 {
                    return Err(Error::Arity {
                        column: col,
                        message: format!("`{name}` takes 1 argument, got {}", args.len()),
                    });
                }
                let arg = Box::new(args.pop().expect("one argument"));
                Ok(if name == "sqrt" {
                    Expr::Sqrt(arg)
                } else {
                    Expr::Exp(arg)
                })
            }
            _ => {
                let unknown = || Error::UnknownIdentifier {
                    name: name.clone(),
                    column: col,
                };
                let idx: usize = name
                    .strip_prefix('x')
                    .filter(|d| !d.is_empty() && !d.starts_with('0'))
                    .and_then(|d| d.parse().ok())
                    .ok_or_else(unknown)?;
                if let Some(max) = self.max_vars {
                    if idx > max {
                        return Err(unknown());
                    }
                }
                Ok(Expr::Var(idx - 1))
            }
        }
    }
}

fn parse_impl(text: &str, max_vars: Option<usize>) -> Result<Expr> {
    let lexed = lex(text)?;
    let mut p = Parser {
        lexed,
        pos: 0,
        max_vars,
    };
    let e = p.expr()?;
    if p.pos != p.lexed.toks.len() {
        return p.syntax("trailing input");
    }
    Ok(e)
}

/// Parses an expression without restricting the variable range.
pub fn parse(text: &str) -> Result<Expr> {
    parse_impl(text, None)
}

/// Parses an expression whose variables must lie in `x1..x{nvars}`.
pub fn parse_in(text: &str, nvars: usize) -> Result<Expr> {
    parse_impl(text, Some(nvars))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_quadratic() {
        let e = parse("x1^2 + x2^2").unwrap();
        assert_eq!(e.arity(), 2);
        assert_eq!(e.eval(&[1.0, 2.0]), 5.0);
    }

    #[test]
    fn parses_f2_summand() {
        let e = parse("-3*x1 + 0.5*sqrt(x1^2+1)").unwrap();
        assert_eq!(e.arity(), 1);
        assert!((e.eval(&[0.0]) - 0.5).abs() < 1e-15);
        assert!((e.eval(&[1.0]) - (-3.0 + 0.5 * 2f64.sqrt())).abs() < 1e-15);
    }

    #[test]
    fn trailing_operator_reports_end_column() {
        match parse("x1 +") {
            Err(Error::Syntax { column, .. }) => assert_eq!(column, 5),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn precedence_and_unary() {
        let e = parse("-x1^2 + 2*x1/4 - (1 - x1)").unwrap();
        let x = 3.0;
        assert_eq!(e.eval(&[x]), -(x * x) + 2.0 * x / 4.0 - (1.0 - x));
        assert_eq!(parse("x1^-2").unwrap().eval(&[2.0]), 0.25);
        assert_eq!(parse("exp(0)").unwrap().eval(&[]), 1.0);
        assert_eq!(parse("2e1").unwrap().eval(&[]), 20.0);
    }

    #[test]
    fn error_kinds() {
        assert!(matches!(parse("y1"), Err(Error::UnknownIdentifier { column: 1, .. })));
        assert!(matches!(parse("x0"), Err(Error::UnknownIdentifier { .. })));
        assert!(matches!(parse("log(x1)"), Err(Error::UnknownIdentifier { .. })));
        assert!(matches!(parse("sqrt(x1, x2)"), Err(Error::Arity { column: 1, .. })));
        assert!(matches!(parse("x1^1.5"), Err(Error::Syntax { column: 4, .. })));
        assert!(matches!(parse("(x1"), Err(Error::Syntax { column: 4, .. })));
        assert!(matches!(parse("x1 x2"), Err(Error::Syntax { column: 4, .. })));
        assert!(matches!(parse("x1 # 2"), Err(Error::Syntax { column: 4, .. })));
        assert!(matches!(parse_in("x3", 2), Err(Error::UnknownIdentifier { .. })));
        assert!(parse_in("x2", 2).is_ok());
    }

    #[test]
    fn additive_split_separates_axes() {
        let e = parse("x1^2 - exp(x2) + 3 - x1").unwrap();
        let parts = e.additive_split(2).unwrap();
        assert_eq!(parts.len(), 2);
        let x = [0.7, -1.2];
        let sum = parts[0].eval(&x[..1]) + parts[1].eval(&[0.0, x[1]]);
        assert!((sum - e.eval(&x)).abs() < 1e-14);
        assert!(parse("x1*x2 + x1").unwrap().additive_split(2).is_none());
        assert!(parse("exp(x1 + x2)").unwrap().additive_split(2).is_none());
    }

    #[test]
    fn display_reparses() {
        for src in ["x1^2 + x2^2", "-3*x1 + 0.5*sqrt(x1^2+1)", "exp(-x1) / (1 + x2^-3)", "-(-2)"] {
            let e = parse(src).unwrap();
            let again = parse(&e.to_string()).unwrap();
            assert_eq!(e.eval(&[0.7, 1.3]), again.eval(&[0.7, 1.3]), "{src}");
        }
    }
}
