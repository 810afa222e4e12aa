//! The shared expression grammar.
//!
//! ```text
//! sum     := tensor (('+' | '-') tensor)*
//! tensor  := product (('⊗' | '@') product)*
//! product := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := atom ('^' exponent)?
//! atom    := INT | 'i' | IDENT | IDENT '[' iexpr ']' | '(' sum ')'
//! iexpr   := integer arithmetic with + - * % and template variables `$p`
//! ```
//!
//! Parsing produces an [`Expr`]; evaluation turns it into a [`RawTensor`],
//! a combination of tensors of raw (not yet normalized) words.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::scalars::{GaussRat, Scalar};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Dollar(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    Percent,
    Tensor,
    LParen,
    RParen,
    LBrack,
    RBrack,
}

fn canonical_ident(s: &str) -> String {
    match s {
        "κ" => "kappa".into(),
        "λ" => "lambda".into(),
        "λ\u{0304}" => "lambdabar".into(),
        _ => s.to_string(),
    }
}

fn lex(src: &str) -> Result<Vec<(usize, Tok)>> {
    let mut out = Vec::new();
    let chars: Vec<(usize, char)> = src.char_indices().collect();
    let mut k = 0;
    while k < chars.len() {
        let (pos, ch) = chars[k];
        let single = match ch {
            '+' => Some(Tok::Plus),
            '-' | '−' => Some(Tok::Minus),
            '*' | '·' => Some(Tok::Star),
            '/' => Some(Tok::Slash),
            '^' => Some(Tok::Caret),
            '%' => Some(Tok::Percent),
            '⊗' | '@' => Some(Tok::Tensor),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            '[' => Some(Tok::LBrack),
            ']' => Some(Tok::RBrack),
            _ => None,
        };
        if let Some(t) = single {
            out.push((pos, t));
            k += 1;
            continue;
        }
        if ch.is_whitespace() {
            k += 1;
            continue;
        }
        if ch.is_ascii_digit() {
            let start = k;
            while k < chars.len() && chars[k].1.is_ascii_digit() {
                k += 1;
            }
            let s: String = chars[start..k].iter().map(|c| c.1).collect();
            out.push((pos, Tok::Int(s.parse().expect("digits"))));
            continue;
        }
        let ident_char = |c: char| c.is_alphanumeric() || c == '_' || c == '\u{0304}';
        if ch == '$' || ch.is_alphabetic() || ch == '_' {
            let start = if ch == '$' { k + 1 } else { k };
            k = start;
            while k < chars.len() && ident_char(chars[k].1) {
                k += 1;
            }
            let s: String = chars[start..k].iter().map(|c| c.1).collect();
            if s.is_empty() {
                return Err(Error::parse(pos, "empty template variable"));
            }
            out.push((pos, if ch == '$' { Tok::Dollar(s) } else { Tok::Ident(canonical_ident(&s)) }));
            continue;
        }
        return Err(Error::parse(pos, format!("unexpected character `{ch}`")));
    }
    Ok(out)
}

/// Integer expressions used in exponents and carrier indices.
#[derive(Clone, Debug, PartialEq)]
pub enum IExpr {
    Lit(i64),
    Var(String),
    Neg(Box<IExpr>),
    Add(Box<IExpr>, Box<IExpr>),
    Sub(Box<IExpr>, Box<IExpr>),
    Mul(Box<IExpr>, Box<IExpr>),
    Rem(Box<IExpr>, Box<IExpr>),
}

impl IExpr {
    pub fn eval(&self, env: &HashMap<String, i64>) -> Result<i64> {
        Ok(match self {
            IExpr::Lit(n) => *n,
            IExpr::Var(v) => *env.get(v).ok_or_else(|| Error::parse(0, format!("unbound template variable ${v}")))?,
            IExpr::Neg(a) => -a.eval(env)?,
            IExpr::Add(a, b) => a.eval(env)? + b.eval(env)?,
            IExpr::Sub(a, b) => a.eval(env)? - b.eval(env)?,
            IExpr::Mul(a, b) => a.eval(env)? * b.eval(env)?,
            IExpr::Rem(a, b) => {
                let m = b.eval(env)?;
                if m == 0 {
                    return Err(Error::DivisionByZero);
                }
                a.eval(env)?.rem_euclid(m)
            }
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Int(BigInt),
    Ident(String),
    Indexed(String, IExpr),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
    Pow(Box<Expr>, IExpr),
    Tensor(Box<Expr>, Box<Expr>),
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    at: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|t| &t.1)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map(|t| t.0).unwrap_or(self.end)
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == Some(t) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, t: &Tok) -> Result<()> {
        if self.eat(t) {
            Ok(())
        } else {
            Err(Error::parse(self.pos(), format!("expected {t:?}")))
        }
    }

    fn sum(&mut self) -> Result<Expr> {
        let mut lhs = self.tensor()?;
        loop {
            if self.eat(&Tok::Plus) {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.tensor()?));
            } else if self.eat(&Tok::Minus) {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.tensor()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn tensor(&mut self) -> Result<Expr> {
        let mut lhs = self.product()?;
        while self.eat(&Tok::Tensor) {
            lhs = Expr::Tensor(Box::new(lhs), Box::new(self.product()?));
        }
        Ok(lhs)
    }

    fn product(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat(&Tok::Star) {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat(&Tok::Slash) {
                lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat(&Tok::Minus) {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        let base = self.atom()?;
        if self.eat(&Tok::Caret) {
            return Ok(Expr::Pow(Box::new(base), self.exponent()?));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        let pos = self.pos();
        match self.peek().cloned() {
            Some(Tok::Int(n)) => {
                self.at += 1;
                Ok(Expr::Int(n))
            }
            Some(Tok::Ident(name)) => {
                self.at += 1;
                if self.eat(&Tok::LBrack) {
                    let idx = self.iexpr()?;
                    self.expect(&Tok::RBrack)?;
                    Ok(Expr::Indexed(name, idx))
                } else {
                    Ok(Expr::Ident(name))
                }
            }
            Some(Tok::LParen) => {
                self.at += 1;
                let e = self.sum()?;
                self.expect(&Tok::RParen)?;
                Ok(e)
            }
            Some(t) => Err(Error::parse(pos, format!("unexpected token {t:?}"))),
            None => Err(Error::parse(pos, "unexpected end of input")),
        }
    }

    fn exponent(&mut self) -> Result<IExpr> {
        if self.eat(&Tok::Minus) {
            return Ok(IExpr::Neg(Box::new(self.exponent()?)));
        }
        self.iatom()
    }

    fn iexpr(&mut self) -> Result<IExpr> {
        let mut lhs = self.iterm()?;
        loop {
            if self.eat(&Tok::Plus) {
                lhs = IExpr::Add(Box::new(lhs), Box::new(self.iterm()?));
            } else if self.eat(&Tok::Minus) {
                lhs = IExpr::Sub(Box::new(lhs), Box::new(self.iterm()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn iterm(&mut self) -> Result<IExpr> {
        let mut lhs = self.ifactor()?;
        loop {
            if self.eat(&Tok::Star) {
                lhs = IExpr::Mul(Box::new(lhs), Box::new(self.ifactor()?));
            } else if self.eat(&Tok::Percent) {
                lhs = IExpr::Rem(Box::new(lhs), Box::new(self.ifactor()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn ifactor(&mut self) -> Result<IExpr> {
        if self.eat(&Tok::Minus) {
            return Ok(IExpr::Neg(Box::new(self.ifactor()?)));
        }
        self.iatom()
    }

    fn iatom(&mut self) -> Result<IExpr> {
        let pos = self.pos();
        match self.peek().cloned() {
            Some(Tok::Int(n)) => {
                self.at += 1;
                let v: i64 = n.try_into().map_err(|_| Error::parse(pos, "integer too large"))?;
                Ok(IExpr::Lit(v))
            }
            Some(Tok::Dollar(v)) => {
                self.at += 1;
                Ok(IExpr::Var(v))
            }
            Some(Tok::LParen) => {
                self.at += 1;
                let e = self.iexpr()?;
                self.expect(&Tok::RParen)?;
                Ok(e)
            }
            _ => Err(Error::parse(pos, "expected integer, $variable or parenthesis")),
        }
    }
}

pub fn parse(src: &str) -> Result<Expr> {
    let toks = lex(src)?;
    let mut p = Parser { toks, at: 0, end: src.len() };
    let e = p.sum()?;
    if p.at != p.toks.len() {
        return Err(Error::parse(p.pos(), "trailing input"));
    }
    Ok(e)
}

/// A factor of a raw word: a generator power or an indexed carrier label.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Atom {
    Gen(String, i64),
    Label(String, i64),
}

pub type RawWord = Vec<Atom>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SymKind {
    Generator,
    Parameter,
    Label,
}

/// Linear combination of rank-`n` tensors of raw words.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct RawTensor {
    pub terms: BTreeMap<Vec<RawWord>, Scalar>,
}

impl RawTensor {
    pub fn scalar(c: Scalar) -> Self {
        let mut t = RawTensor::default();
        if !c.is_zero() {
            t.terms.insert(vec![Vec::new()], c);
        }
        t
    }

    fn atom(a: Atom) -> Self {
        let mut t = RawTensor::default();
        t.terms.insert(vec![vec![a]], Scalar::one());
        t
    }

    /// Tensor rank, or `None` for zero.
    pub fn rank(&self) -> Option<usize> {
        self.terms.keys().next().map(Vec::len)
    }

    /// The coefficient if this is a multiple of the empty word of rank one.
    pub fn as_scalar(&self) -> Option<Scalar> {
        match self.terms.len() {
            0 => Some(Scalar::zero()),
            1 => {
                let (k, c) = self.terms.iter().next().unwrap();
                (k.len() == 1 && k[0].is_empty()).then(|| c.clone())
            }
            _ => None,
        }
    }

    fn add_scaled(&mut self, other: &RawTensor, c: &Scalar) -> Result<()> {
        if let (Some(a), Some(b)) = (self.rank(), other.rank()) {
            if a != b {
                return Err(Error::parse(0, format!("adding tensors of rank {a} and {b}")));
            }
        }
        for (k, v) in &other.terms {
            let s = self.terms.get(k).map(|x| x + &(v * c)).unwrap_or_else(|| v * c);
            if s.is_zero() {
                self.terms.remove(k);
            } else {
                self.terms.insert(k.clone(), s);
            }
        }
        Ok(())
    }

    fn scale(&self, c: &Scalar) -> RawTensor {
        let mut out = RawTensor::default();
        out.add_scaled(self, c).expect("same rank");
        out
    }

    fn mul(&self, other: &RawTensor) -> Result<RawTensor> {
        if let Some(c) = self.as_scalar() {
            return Ok(other.scale(&c));
        }
        if let Some(c) = other.as_scalar() {
            return Ok(self.scale(&c));
        }
        if self.rank() != other.rank() {
            return Err(Error::parse(0, "multiplying tensors of different rank"));
        }
        let mut out = RawTensor::default();
        for (k1, c1) in &self.terms {
            for (k2, c2) in &other.terms {
                let key: Vec<RawWord> = k1.iter().zip(k2).map(|(a, b)| a.iter().chain(b).cloned().collect()).collect();
                let mut one = RawTensor::default();
                one.terms.insert(key, Scalar::one());
                out.add_scaled(&one, &(c1 * c2))?;
            }
        }
        Ok(out)
    }

    fn tensor(&self, other: &RawTensor) -> RawTensor {
        let mut out = RawTensor::default();
        for (k1, c1) in &self.terms {
            for (k2, c2) in &other.terms {
                let key: Vec<RawWord> = k1.iter().chain(k2).cloned().collect();
                let mut one = RawTensor::default();
                one.terms.insert(key, Scalar::one());
                out.add_scaled(&one, &(c1 * c2)).expect("same rank");
            }
        }
        out
    }
}

/// Evaluation context: classifies identifiers and binds template variables.
pub struct Context<'a> {
    pub classify: &'a dyn Fn(&str) -> SymKind,
    pub env: HashMap<String, i64>,
}

impl Expr {
    pub fn eval(&self, cx: &Context<'_>) -> Result<RawTensor> {
        Ok(match self {
            Expr::Int(n) => RawTensor::scalar(Scalar::from_gauss(GaussRat::new(
                BigRational::from_integer(n.clone()),
                BigRational::zero(),
            ))),
            Expr::Ident(name) if name == "i" => RawTensor::scalar(Scalar::i()),
            Expr::Ident(name) => match (cx.classify)(name) {
                SymKind::Generator => RawTensor::atom(Atom::Gen(name.clone(), 1)),
                SymKind::Parameter => RawTensor::scalar(Scalar::param(name)),
                SymKind::Label => return Err(Error::parse(0, format!("label `{name}` needs an index"))),
            },
            Expr::Indexed(name, idx) => RawTensor::atom(Atom::Label(name.clone(), idx.eval(&cx.env)?)),
            Expr::Add(a, b) => {
                let mut x = a.eval(cx)?;
                x.add_scaled(&b.eval(cx)?, &Scalar::one())?;
                x
            }
            Expr::Sub(a, b) => {
                let mut x = a.eval(cx)?;
                x.add_scaled(&b.eval(cx)?, &Scalar::from_int(-1))?;
                x
            }
            Expr::Neg(a) => a.eval(cx)?.scale(&Scalar::from_int(-1)),
            Expr::Mul(a, b) => a.eval(cx)?.mul(&b.eval(cx)?)?,
            Expr::Div(a, b) => {
                let d = b.eval(cx)?.as_scalar().ok_or_else(|| Error::parse(0, "division by a non-scalar"))?;
                a.eval(cx)?.scale(&d.inv()?)
            }
            Expr::Tensor(a, b) => a.eval(cx)?.tensor(&b.eval(cx)?),
            Expr::Pow(base, e) => {
                let e = e.eval(&cx.env)?;
                if let Expr::Ident(name) = &**base {
                    if name != "i" && (cx.classify)(name) == SymKind::Generator {
                        return Ok(if e == 0 {
                            RawTensor::scalar(Scalar::one())
                        } else {
                            RawTensor::atom(Atom::Gen(name.clone(), e))
                        });
                    }
                }
                let b = base.eval(cx)?;
                if let Some(c) = b.as_scalar() {
                    let e: i32 = e.try_into().map_err(|_| Error::parse(0, "exponent too large"))?;
                    return Ok(RawTensor::scalar(c.pow(e)?));
                }
                if e < 0 {
                    return Err(Error::parse(0, "negative power of a non-monomial"));
                }
                let mut acc = RawTensor::scalar(Scalar::one());
                for _ in 0..e {
                    acc = acc.mul(&b)?;
                }
                acc
            }
        })
    }
}

/// Parse an expression that contains only parameters.
pub fn parse_scalar(src: &str) -> Result<Scalar> {
    let cx = Context { classify: &|_| SymKind::Parameter, env: HashMap::new() };
    parse(src)?.eval(&cx)?.as_scalar().ok_or_else(|| Error::parse(0, "not a scalar expression"))
}

impl std::str::FromStr for Scalar {
    type Err = Error;
    fn from_str(s: &str) -> Result<Scalar> {
        parse_scalar(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalar_round_trip() {
        for s in ["(1-q^2)/(1-q)", "q^-2*kappa + i", "(1/2+3*i)*λ*λ̄", "-q/(q^2+1)"] {
            let x = parse_scalar(s).unwrap();
            let y = parse_scalar(&x.to_string()).unwrap();
            assert_eq!(x, y, "{s} -> {x}");
        }
        assert_eq!(parse_scalar("(1-q^2)/(1-q)").unwrap(), parse_scalar("1+q").unwrap());
    }

    #[test]
    fn tensor_binds_tighter_than_sum() {
        let classify = |s: &str| if s == "q" { SymKind::Parameter } else { SymKind::Generator };
        let cx = Context { classify: &classify, env: HashMap::new() };
        let t = parse("q*a ⊗ b - (a+b) @ 1").unwrap().eval(&cx).unwrap();
        assert_eq!(t.rank(), Some(2));
        assert_eq!(t.terms.len(), 3);
    }

    #[test]
    fn template_indices() {
        let classify = |s: &str| if s == "c" { SymKind::Label } else { SymKind::Generator };
        let env = HashMap::from([("p".to_string(), -3)]);
        let cx = Context { classify: &classify, env };
        let t = parse("v^($p+1) * c[$p % 2]").unwrap().eval(&cx).unwrap();
        let key = t.terms.keys().next().unwrap();
        assert_eq!(key[0], vec![Atom::Gen("v".into(), -2), Atom::Label("c".into(), 1)]);
    }

    #[test]
    fn parse_errors_carry_position() {
        assert!(matches!(parse("a + "), Err(Error::Parse { .. })));
        assert!(matches!(parse("a ? b"), Err(Error::Parse { pos: 2, .. })));
    }
}
