//! Arithmetic expressions in one variable `t`, used to declare curve
//! components and mean-value functions in config files.
//!
//! Grammar (lowest to highest precedence):
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := primary ('^' unary)?          (right associative)
//! primary := number | 't' | 'pi' | 'e' | name '(' expr (',' expr)* ')' | '(' expr ')'
//! ```
//!
//! Functions: `sin cos tan exp ln sqrt abs arccot` (one argument) and
//! `pow(base, exponent)`. There is no implicit multiplication.

use std::f64::consts::{E, FRAC_PI_2, PI};
use std::fmt;

use thiserror::Error;

use crate::curve::{real_fn, RealFn};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExprError {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown identifier '{name}' at byte {offset}")]
    UnknownIdentifier { name: String, offset: usize },
    #[error("cannot evaluate: {0}")]
    Domain(String),
}

impl From<ExprError> for crate::Error {
    fn from(e: ExprError) -> Self {
        match e {
            ExprError::Domain(m) => crate::Error::DomainEval(m),
            other => crate::Error::Input(other.to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
            BinOp::Pow => '^',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Exp,
    Ln,
    Sqrt,
    Abs,
    Arccot,
    Pow,
}

impl Func {
    const ALL: [Func; 9] = [
        Func::Sin,
        Func::Cos,
        Func::Tan,
        Func::Exp,
        Func::Ln,
        Func::Sqrt,
        Func::Abs,
        Func::Arccot,
        Func::Pow,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
            Func::Arccot => "arccot",
            Func::Pow => "pow",
        }
    }

    pub fn arity(self) -> usize {
        if self == Func::Pow {
            2
        } else {
            1
        }
    }

    fn lookup(name: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Constant {
    Pi,
    E,
}

/// Parsed expression tree.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Var,
    Const(Constant),
    Neg(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Vec<Expr>),
}

/// Inverse cotangent with range `(0, π)`.
pub fn arccot(x: f64) -> f64 {
    FRAC_PI_2 - x.atan()
}

/// Real power: integer exponents exactly, otherwise the base must be non-negative.
pub fn real_pow(base: f64, exp: f64) -> Result<f64, ExprError> {
    let v = if exp.fract() == 0.0 && exp.abs() <= i32::MAX as f64 {
        base.powi(exp as i32)
    } else if base < 0.0 {
        return Err(ExprError::Domain(format!(
            "negative base {base} with non-integer exponent {exp}"
        )));
    } else {
        base.powf(exp)
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(ExprError::Domain(format!("{base}^{exp} is not finite")))
    }
}

fn checked(v: f64, what: impl FnOnce() -> String) -> Result<f64, ExprError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(ExprError::Domain(what()))
    }
}

impl Expr {
    /// Evaluates at `t`, reporting any non-finite intermediate as an error.
    pub fn eval(&self, t: f64) -> Result<f64, ExprError> {
        match self {
            Expr::Num(v) => Ok(*v),
            Expr::Var => checked(t, || format!("t = {t} is not finite")),
            Expr::Const(Constant::Pi) => Ok(PI),
            Expr::Const(Constant::E) => Ok(E),
            Expr::Neg(x) => Ok(-x.eval(t)?),
            Expr::Binary(op, l, r) => {
                let (a, b) = (l.eval(t)?, r.eval(t)?);
                match op {
                    BinOp::Add => checked(a + b, || format!("{a} + {b} overflows")),
                    BinOp::Sub => checked(a - b, || format!("{a} - {b} overflows")),
                    BinOp::Mul => checked(a * b, || format!("{a} * {b} overflows")),
                    BinOp::Div => {
                        if b == 0.0 {
                            Err(ExprError::Domain(format!("division by zero ({a} / 0)")))
                        } else {
                            checked(a / b, || format!("{a} / {b} overflows"))
                        }
                    }
                    BinOp::Pow => real_pow(a, b),
                }
            }
            Expr::Call(f, args) => {
                let x = args[0].eval(t)?;
                match f {
                    Func::Sin => Ok(x.sin()),
                    Func::Cos => Ok(x.cos()),
                    Func::Tan => checked(x.tan(), || format!("tan({x}) is not finite")),
                    Func::Exp => checked(x.exp(), || format!("exp({x}) overflows")),
                    Func::Ln => {
                        if x <= 0.0 {
                            Err(ExprError::Domain(format!("ln of non-positive {x}")))
                        } else {
                            Ok(x.ln())
                        }
                    }
                    Func::Sqrt => {
                        if x < 0.0 {
                            Err(ExprError::Domain(format!("sqrt of negative {x}")))
                        } else {
                            Ok(x.sqrt())
                        }
                    }
                    Func::Abs => Ok(x.abs()),
                    Func::Arccot => Ok(arccot(x)),
                    Func::Pow => real_pow(x, args[1].eval(t)?),
                }
            }
        }
    }

    /// Evaluator for curve construction; evaluation errors surface as NaN,
    /// which the curve layer reports as a domain-evaluation error.
    pub fn into_real_fn(self) -> RealFn {
        real_fn(move |t| self.eval(t).unwrap_or(f64::NAN))
    }
}

/// Canonical printout: every compound node parenthesised, numbers in
/// round-trip form.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(v) => write!(f, "{v:?}"),
            Expr::Var => f.write_str("t"),
            Expr::Const(Constant::Pi) => f.write_str("pi"),
            Expr::Const(Constant::E) => f.write_str("e"),
            Expr::Neg(x) => write!(f, "(-{x})"),
            Expr::Binary(op, l, r) => write!(f, "({l} {} {r})", op.symbol()),
            Expr::Call(func, args) => {
                write!(f, "{}(", func.name())?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
    Comma,
}

fn tokenize(src: &str) -> Result<Vec<(Tok, usize)>, ExprError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        if c.is_ascii_digit() || c == '.' {
            while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                i += 1;
            }
            // exponent part: only when followed by a digit (optionally signed)
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut j = i + 1;
                if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                    j += 1;
                }
                if j < bytes.len() && bytes[j].is_ascii_digit() {
                    i = j;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let text = &src[start..i];
            let v: f64 = text.parse().map_err(|_| ExprError::Syntax {
                offset: start,
                message: format!("malformed number '{text}'"),
            })?;
            out.push((Tok::Num(v), start));
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((Tok::Ident(src[start..i].to_string()), start));
            continue;
        }
        let tok = match c {
            '+' | '-' | '*' | '/' | '^' => Tok::Op(c),
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            ',' => Tok::Comma,
            _ => {
                return Err(ExprError::Syntax {
                    offset: start,
                    message: format!("unexpected character '{c}'"),
                })
            }
        };
        out.push((tok, start));
        i += c.len_utf8();
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(_, o)| *o)
    }

    fn syntax<T>(&self, message: impl Into<String>) -> Result<T, ExprError> {
        Err(ExprError::Syntax {
            offset: self.offset(),
            message: message.into(),
        })
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), ExprError> {
        if self.peek() == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            self.syntax(format!("expected {what}"))
        }
    }

    fn expr(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.term()?;
        while let Some(Tok::Op(c @ ('+' | '-'))) = self.peek() {
            let op = if *c == '+' { BinOp::Add } else { BinOp::Sub };
            self.pos += 1;
            let rhs = self.term()?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.unary()?;
        while let Some(Tok::Op(c @ ('*' | '/'))) = self.peek() {
            let op = if *c == '*' { BinOp::Mul } else { BinOp::Div };
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, ExprError> {
        if let Some(Tok::Op('-')) = self.peek() {
            self.pos += 1;
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ExprError> {
        let base = self.primary()?;
        if let Some(Tok::Op('^')) = self.peek() {
            self.pos += 1;
            let exp = self.unary()?;
            return Ok(Expr::Binary(BinOp::Pow, Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Expr, ExprError> {
        let offset = self.offset();
        match self.peek().cloned() {
            Some(Tok::Num(v)) => {
                self.pos += 1;
                Ok(Expr::Num(v))
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(e)
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                if self.peek() == Some(&Tok::LParen) {
                    let func = Func::lookup(&name).ok_or(ExprError::UnknownIdentifier {
                        name: name.clone(),
                        offset,
                    })?;
                    self.pos += 1;
                    let mut args = vec![self.expr()?];
                    while self.peek() == Some(&Tok::Comma) {
                        self.pos += 1;
                        args.push(self.expr()?);
                    }
                    self.expect(Tok::RParen, "')'")?;
                    if args.len() != func.arity() {
                        return Err(ExprError::Syntax {
                            offset,
                            message: format!("{} takes {} argument(s), got {}", func.name(), func.arity(), args.len()),
                        });
                    }
                    return Ok(Expr::Call(func, args));
                }
                match name.as_str() {
                    "t" => Ok(Expr::Var),
                    "pi" => Ok(Expr::Const(Constant::Pi)),
                    "e" => Ok(Expr::Const(Constant::E)),
                    _ if Func::lookup(&name).is_some() => Err(ExprError::Syntax {
                        offset,
                        message: format!("function '{name}' needs an argument list"),
                    }),
                    _ => Err(ExprError::UnknownIdentifier { name, offset }),
                }
            }
            Some(_) => self.syntax("expected a number, identifier or '('"),
            None => self.syntax("unexpected end of input"),
        }
    }
}

/// Parses an expression in `t`.
pub fn parse(text: &str) -> Result<Expr, ExprError> {
    if text.trim().is_empty() {
        return Err(ExprError::Syntax {
            offset: 0,
            message: "empty expression".into(),
        });
    }
    let toks = tokenize(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        end: text.len(),
    };
    let e = p.expr()?;
    if p.pos != p.toks.len() {
        return p.syntax("trailing input");
    }
    Ok(e)
}

/// Parses and evaluates in one step.
pub fn eval_expr(expr: &Expr, t: f64) -> Result<f64, ExprError> {
    expr.eval(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ev(s: &str, t: f64) -> f64 {
        parse(s).unwrap().eval(t).unwrap()
    }

    #[test]
    fn spec_examples() {
        let e = parse("exp(2*t)").unwrap();
        assert_eq!(
            e,
            Expr::Call(
                Func::Exp,
                vec![Expr::Binary(BinOp::Mul, Box::new(Expr::Num(2.0)), Box::new(Expr::Var))]
            )
        );
        assert_eq!(e.eval(0.0).unwrap(), 1.0);
        assert_eq!(ev("-(-t)^1.5", -4.0), -8.0);
        assert!((ev("arccot(1)", 0.0) - std::f64::consts::FRAC_PI_4).abs() < 1e-15);
        assert!((ev("ln(t)", E) - 1.0).abs() < 1e-15);
        assert!((ev("arccot(t)", -1.0) - 0.75 * PI).abs() < 1e-15);
        assert!(matches!(parse("t^t").unwrap().eval(-0.5), Err(ExprError::Domain(_))));
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(ev("2^3^2", 0.0), 512.0);
        assert_eq!(ev("-2^2", 0.0), -4.0);
        assert_eq!(ev("2^-1", 0.0), 0.5);
        assert_eq!(ev("1 - 2 - 3", 0.0), -4.0);
        assert_eq!(ev("8 / 4 / 2", 0.0), 1.0);
        assert_eq!(ev("1 + 2 * 3", 0.0), 7.0);
        assert_eq!(ev("(1 + 2) * 3", 0.0), 9.0);
        assert_eq!(ev("pow(t, 2) + pi - pi + e - e", 3.0), 9.0);
        assert_eq!(ev("1.5e2 * t", 2.0), 300.0);
    }

    #[test]
    fn integer_powers_of_negative_bases() {
        assert_eq!(ev("t^3", -2.0), -8.0);
        assert_eq!(ev("t^-2", -2.0), 0.25);
    }

    #[test]
    fn errors_carry_offsets() {
        assert_eq!(
            parse("1 + foo(2)"),
            Err(ExprError::UnknownIdentifier {
                name: "foo".into(),
                offset: 4
            })
        );
        assert_eq!(
            parse("sin t"),
            Err(ExprError::Syntax {
                offset: 0,
                message: "function 'sin' needs an argument list".into()
            })
        );
        assert!(matches!(parse("2 t"), Err(ExprError::Syntax { offset: 2, .. })));
        assert!(matches!(parse("(1 + 2"), Err(ExprError::Syntax { offset: 6, .. })));
        assert!(matches!(parse("1 $ 2"), Err(ExprError::Syntax { offset: 2, .. })));
        assert!(matches!(parse("pow(1)"), Err(ExprError::Syntax { .. })));
        assert!(matches!(parse("   "), Err(ExprError::Syntax { .. })));
        assert!(matches!(parse("x + 1"), Err(ExprError::UnknownIdentifier { .. })));
    }

    #[test]
    fn domain_errors() {
        for (s, t) in [
            ("ln(t)", 0.0),
            ("sqrt(t)", -1.0),
            ("1/t", 0.0),
            ("exp(t)", 1000.0),
            ("0^-1", 0.0),
        ] {
            assert!(matches!(parse(s).unwrap().eval(t), Err(ExprError::Domain(_))), "{s}");
        }
    }

    #[test]
    fn print_reparses_to_same_tree() {
        for s in [
            "-(-t)^1.5",
            "exp(2*t) - 3/t",
            "arccot(-t)^2^t",
            "pow(t, -1e-7)",
            "-(-(t))",
        ] {
            let e = parse(s).unwrap();
            assert_eq!(parse(&e.to_string()).unwrap(), e, "{s}");
        }
    }

    #[test]
    fn arccot_reflection() {
        for i in -50..=50 {
            let x = i as f64 * 0.37;
            assert!((arccot(x) + arccot(-x) - PI).abs() < 1e-12);
            assert!(arccot(x) > 0.0 && arccot(x) < PI);
        }
    }
}
