//! Expression DSL over finite sets.
//!
//! Grammar (whitespace insensitive):
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | primary
//! primary := name | number | '(' expr ')'
//!          | 'sum' '(' expr ',' k ')' | 'prod' '(' expr ',' k ')'
//!          | 'R' '(' expr ')'
//! ```
//!
//! `+ -` bind loosest, `* /` tighter, unary minus tighter still; binary
//! operators are left-associative. Names match `[A-Za-z][A-Za-z0-9_]*`;
//! `sum`, `prod`, and `R` act as functions only when directly followed by
//! `(`, otherwise they are ordinary set names. Numbers are nonnegative
//! integer or decimal literals; negative and fractional constants arise
//! from unary minus and division, which the parser folds into scalar
//! leaves (`-2`, `3/4`), a value-preserving rewrite on singleton sets.

use std::collections::BTreeSet;
use std::fmt;

use crate::expanders;
use crate::finset::{self, Budget, FiniteSet, FinsetError, SetEnv, SetOp};
use crate::numeric::Rational;

/// Abstract syntax for set expressions.
///
/// Canonical form (what the parser produces and the smart constructors
/// maintain): no `Neg` directly over a `Scalar`, and no `Binary(Div)` over
/// two `Scalar`s with nonzero divisor. `print` then round-trips: parsing
/// its output rebuilds the identical tree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SetExpr {
    Name(String),
    Scalar(Rational),
    Binary(SetOp, Box<SetExpr>, Box<SetExpr>),
    Neg(Box<SetExpr>),
    KFoldSum(Box<SetExpr>, u32),
    KFoldProd(Box<SetExpr>, u32),
    RTriple(Box<SetExpr>),
}

impl SetExpr {
    /// Binary node, folding scalar/scalar division into a scalar leaf.
    pub fn binary(op: SetOp, lhs: SetExpr, rhs: SetExpr) -> SetExpr {
        if op == SetOp::Div {
            if let (SetExpr::Scalar(a), SetExpr::Scalar(b)) = (&lhs, &rhs) {
                if let Some(q) = a.checked_div(b) {
                    return SetExpr::Scalar(q);
                }
            }
        }
        SetExpr::Binary(op, Box::new(lhs), Box::new(rhs))
    }

    /// Negation node, folding negated scalars into scalar leaves.
    pub fn neg(e: SetExpr) -> SetExpr {
        match e {
            SetExpr::Scalar(v) => SetExpr::Scalar(-v),
            other => SetExpr::Neg(Box::new(other)),
        }
    }

    /// All set names the expression refers to.
    pub fn free_names(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_names(&mut out);
        out
    }

    fn collect_names(&self, out: &mut BTreeSet<String>) {
        match self {
            SetExpr::Name(n) => {
                out.insert(n.clone());
            }
            SetExpr::Scalar(_) => {}
            SetExpr::Binary(_, l, r) => {
                l.collect_names(out);
                r.collect_names(out);
            }
            SetExpr::Neg(e) | SetExpr::KFoldSum(e, _) | SetExpr::KFoldProd(e, _)
            | SetExpr::RTriple(e) => e.collect_names(out),
        }
    }
}

/// Parse failure with byte position and the tokens that would have been
/// accepted there.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub position: usize,
    pub found: String,
    pub expected: Vec<&'static str>,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "parse error at byte {}: expected {}, found {}",
            self.position,
            self.expected.join(" or "),
            self.found
        )
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EvalError {
    UnboundName(String),
    Set(FinsetError),
}

impl fmt::Display for EvalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EvalError::UnboundName(name) => write!(f, "set name {name:?} is not bound"),
            EvalError::Set(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for EvalError {}

impl From<FinsetError> for EvalError {
    fn from(e: FinsetError) -> Self {
        EvalError::Set(e)
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Number(Rational),
    Plus,
    Minus,
    Star,
    Slash,
    LParen,
    RParen,
    Comma,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(n) => format!("name {n:?}"),
            Tok::Number(v) => format!("number {v}"),
            Tok::Plus => "'+'".into(),
            Tok::Minus => "'-'".into(),
            Tok::Star => "'*'".into(),
            Tok::Slash => "'/'".into(),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
            Tok::Comma => "','".into(),
            Tok::End => "end of input".into(),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        match c {
            b' ' | b'\t' | b'\r' | b'\n' => i += 1,
            b'+' => {
                out.push((Tok::Plus, start));
                i += 1;
            }
            b'-' => {
                out.push((Tok::Minus, start));
                i += 1;
            }
            b'*' => {
                out.push((Tok::Star, start));
                i += 1;
            }
            b'/' => {
                out.push((Tok::Slash, start));
                i += 1;
            }
            b'(' => {
                out.push((Tok::LParen, start));
                i += 1;
            }
            b')' => {
                out.push((Tok::RParen, start));
                i += 1;
            }
            b',' => {
                out.push((Tok::Comma, start));
                i += 1;
            }
            b'0'..=b'9' => {
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                if i < bytes.len() && bytes[i] == b'.' {
                    let dot = i;
                    i += 1;
                    if i >= bytes.len() || !bytes[i].is_ascii_digit() {
                        return Err(ParseError {
                            position: dot,
                            found: "'.' with no digits after it".into(),
                            expected: vec!["digits after the decimal point"],
                        });
                    }
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                }
                let value = Rational::parse_scalar(&text[start..i])
                    .expect("lexed digits form a valid scalar");
                out.push((Tok::Number(value), start));
            }
            b'A'..=b'Z' | b'a'..=b'z' => {
                while i < bytes.len()
                    && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                out.push((Tok::Ident(text[start..i].to_owned()), start));
            }
            other => {
                return Err(ParseError {
                    position: start,
                    found: format!("{:?}", other as char),
                    expected: vec!["a name", "a number", "an operator", "'('", "')'", "','"],
                });
            }
        }
    }
    out.push((Tok::End, text.len()));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> usize {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].0.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn fail(&self, expected: Vec<&'static str>) -> ParseError {
        ParseError {
            position: self.pos(),
            found: self.peek().describe(),
            expected,
        }
    }

    fn expect(&mut self, tok: Tok, label: &'static str) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.fail(vec![label]))
        }
    }

    fn parse_sum(&mut self) -> Result<SetExpr, ParseError> {
        let mut lhs = self.parse_term()?;
        loop {
            let op = match self.peek() {
                Tok::Plus => SetOp::Add,
                Tok::Minus => SetOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.parse_term()?;
            lhs = SetExpr::binary(op, lhs, rhs);
        }
    }

    fn parse_term(&mut self) -> Result<SetExpr, ParseError> {
        let mut lhs = self.parse_unary()?;
        loop {
            let op = match self.peek() {
                Tok::Star => SetOp::Mul,
                Tok::Slash => SetOp::Div,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.parse_unary()?;
            lhs = SetExpr::binary(op, lhs, rhs);
        }
    }

    fn parse_unary(&mut self) -> Result<SetExpr, ParseError> {
        if *self.peek() == Tok::Minus {
            self.bump();
            Ok(SetExpr::neg(self.parse_unary()?))
        } else {
            self.parse_primary()
        }
    }

    fn parse_fold_count(&mut self) -> Result<u32, ParseError> {
        let err = || {
            vec!["a whole number fold count of at least 1"]
        };
        match self.peek().clone() {
            Tok::Number(v) if v.is_integer() && v.is_positive() => {
                let k = v
                    .numerator()
                    .try_into()
                    .map_err(|_| self.fail(err()))?;
                self.bump();
                Ok(k)
            }
            _ => Err(self.fail(err())),
        }
    }

    fn parse_primary(&mut self) -> Result<SetExpr, ParseError> {
        match self.peek().clone() {
            Tok::Number(v) => {
                self.bump();
                Ok(SetExpr::Scalar(v))
            }
            Tok::LParen => {
                self.bump();
                let inner = self.parse_sum()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(inner)
            }
            Tok::Ident(name) => {
                self.bump();
                let is_call = *self.peek() == Tok::LParen;
                match (name.as_str(), is_call) {
                    ("sum", true) | ("prod", true) => {
                        self.bump();
                        let arg = self.parse_sum()?;
                        self.expect(Tok::Comma, "','")?;
                        let k = self.parse_fold_count()?;
                        self.expect(Tok::RParen, "')'")?;
                        Ok(if name == "sum" {
                            SetExpr::KFoldSum(Box::new(arg), k)
                        } else {
                            SetExpr::KFoldProd(Box::new(arg), k)
                        })
                    }
                    ("R", true) => {
                        self.bump();
                        let arg = self.parse_sum()?;
                        self.expect(Tok::RParen, "')'")?;
                        Ok(SetExpr::RTriple(Box::new(arg)))
                    }
                    _ => Ok(SetExpr::Name(name)),
                }
            }
            _ => Err(self.fail(vec!["a set name", "a number", "'('", "'-'"])),
        }
    }
}

/// Parse an expression, returning position-annotated errors.
pub fn parse(text: &str) -> Result<SetExpr, ParseError> {
    let mut p = Parser { toks: lex(text)?, at: 0 };
    let expr = p.parse_sum()?;
    if *p.peek() != Tok::End {
        return Err(p.fail(vec!["'+'", "'-'", "'*'", "'/'", "end of input"]));
    }
    Ok(expr)
}

// Binding strength used by the printer. An emitted fragment needs
// parentheses exactly when its level is below what its slot requires.
// Scalar leaves report the level of the token sequence they print as:
// "3" is atomic, "-3" behaves like a unary minus, "3/4" like a division.
fn level(e: &SetExpr) -> u8 {
    match e {
        SetExpr::Binary(SetOp::Add | SetOp::Sub, ..) => 1,
        SetExpr::Binary(SetOp::Mul | SetOp::Div, ..) => 2,
        SetExpr::Neg(_) => 3,
        SetExpr::Scalar(v) => {
            if !v.is_integer() {
                2
            } else if v.is_negative() {
                3
            } else {
                4
            }
        }
        SetExpr::Name(_) | SetExpr::KFoldSum(..) | SetExpr::KFoldProd(..)
        | SetExpr::RTriple(_) => 4,
    }
}

fn fmt_expr(e: &SetExpr, min_level: u8, out: &mut String) {
    let wrap = level(e) < min_level;
    if wrap {
        out.push('(');
    }
    match e {
        SetExpr::Name(n) => out.push_str(n),
        SetExpr::Scalar(v) => out.push_str(&v.to_string()),
        SetExpr::Binary(op, l, r) => {
            let lv = level(e);
            fmt_expr(l, lv, out);
            out.push(op.symbol());
            // Left associativity: an equal-level right child needs parens.
            fmt_expr(r, lv + 1, out);
        }
        SetExpr::Neg(inner) => {
            out.push('-');
            fmt_expr(inner, 3, out);
        }
        SetExpr::KFoldSum(inner, k) => {
            out.push_str("sum(");
            fmt_expr(inner, 1, out);
            out.push(',');
            out.push_str(&k.to_string());
            out.push(')');
        }
        SetExpr::KFoldProd(inner, k) => {
            out.push_str("prod(");
            fmt_expr(inner, 1, out);
            out.push(',');
            out.push_str(&k.to_string());
            out.push(')');
        }
        SetExpr::RTriple(inner) => {
            out.push_str("R(");
            fmt_expr(inner, 1, out);
            out.push(')');
        }
    }
    if wrap {
        out.push(')');
    }
}

/// Render with the fewest parentheses that preserve structure:
/// `parse(&print(e))` rebuilds `e` for any canonical tree.
pub fn print(e: &SetExpr) -> String {
    let mut out = String::new();
    fmt_expr(e, 1, &mut out);
    out
}

/// Evaluate against named sets. The budget bounds every intermediate set.
pub fn eval(e: &SetExpr, env: &SetEnv, budget: &Budget) -> Result<FiniteSet, EvalError> {
    match e {
        SetExpr::Name(n) => env
            .get(n)
            .cloned()
            .ok_or_else(|| EvalError::UnboundName(n.clone())),
        SetExpr::Scalar(v) => Ok(FiniteSet::singleton(v.clone())),
        SetExpr::Binary(op, l, r) => {
            let lv = eval(l, env, budget)?;
            let rv = eval(r, env, budget)?;
            Ok(finset::pairwise(*op, &lv, &rv, budget)?)
        }
        SetExpr::Neg(inner) => {
            let v = eval(inner, env, budget)?;
            Ok(finset::affine(&v, &Rational::from(-1i64), &Rational::ZERO)?)
        }
        SetExpr::KFoldSum(inner, k) => {
            let v = eval(inner, env, budget)?;
            Ok(finset::kfold(SetOp::Add, &v, *k, budget)?)
        }
        SetExpr::KFoldProd(inner, k) => {
            let v = eval(inner, env, budget)?;
            Ok(finset::kfold(SetOp::Mul, &v, *k, budget)?)
        }
        SetExpr::RTriple(inner) => {
            let v = eval(inner, env, budget)?;
            Ok(expanders::r_triple(&v, budget)?)
        }
    }
}
