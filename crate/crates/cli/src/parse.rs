//! Text grammar for difference polynomials and `Q(r)` values.
//!
//! ```text
//! expr   := ['-'] term (('+' | '-') term)*
//! term   := power (('*' | '/') power)*
//! power  := atom ['^' ['-'] atom]
//! atom   := INT | 'r' | 't' | 'x'INT | 's' ['^' INT] '(' 'x'INT ')'
//!         | 'O' '(' expr ')' | '(' expr ')'
//! ```
//!
//! `r` stands for the constant and may only survive inside exponents of `t`.

use diffkap_core::{AlgebraicScalar, Error, HahnSeries, KDiffPoly, Result, RhoRational, SigmaExponent};
use num_bigint::BigInt;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Sym(char),
    End,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    pos: usize,
}

fn tokenize(src: &str) -> Result<Vec<Token>> {
    let bytes: Vec<(usize, char)> = src.char_indices().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let (pos, c) = bytes[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < bytes.len() && bytes[i].1.is_ascii_digit() {
                i += 1;
            }
            let s: String = bytes[start..i].iter().map(|p| p.1).collect();
            out.push(Token {
                tok: Tok::Int(s.parse().expect("digits")),
                pos,
            });
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < bytes.len() && (bytes[i].1.is_ascii_alphanumeric() || bytes[i].1 == '_') {
                i += 1;
            }
            out.push(Token {
                tok: Tok::Ident(bytes[start..i].iter().map(|p| p.1).collect()),
                pos,
            });
        } else if "+-*/^()".contains(c) {
            out.push(Token { tok: Tok::Sym(c), pos });
            i += 1;
        } else {
            return Err(error_at(src, pos, format!("unexpected character '{c}'")));
        }
    }
    out.push(Token { tok: Tok::End, pos: src.len() });
    Ok(out)
}

fn error_at(src: &str, pos: usize, message: String) -> Error {
    let before = &src[..pos.min(src.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    Error::Parse { line, column, message }
}

/// Parsed value: a plain number in `Q(r)` or a polynomial.
#[derive(Clone, Debug)]
enum Val {
    Num(RhoRational),
    Poly(KDiffPoly),
}

struct Parser<'a> {
    src: &'a str,
    toks: Vec<Token>,
    at: usize,
    nvars: usize,
}

fn variable_index(name: &str) -> Option<usize> {
    let digits = name.strip_prefix('x')?;
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    digits.parse().ok().filter(|&i| i >= 1)
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].tok
    }

    fn pos(&self) -> usize {
        self.toks[self.at].pos
    }

    fn err<T>(&self, pos: usize, msg: impl Into<String>) -> Result<T> {
        Err(error_at(self.src, pos, msg.into()))
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].tok.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if *self.peek() == Tok::Sym(c) {
            self.bump();
            Ok(())
        } else {
            self.err(self.pos(), format!("expected '{c}'"))
        }
    }

    fn poly(&self, v: Val, pos: usize) -> Result<KDiffPoly> {
        match v {
            Val::Poly(p) => Ok(p),
            Val::Num(q) => match q.as_rational() {
                Some(c) => Ok(KDiffPoly::constant(self.nvars, HahnSeries::constant(AlgebraicScalar::from_rational(c)))),
                None => self.err(pos, "'r' may only appear in exponents"),
            },
        }
    }

    fn expr(&mut self) -> Result<Val> {
        let neg = if *self.peek() == Tok::Sym('-') {
            self.bump();
            true
        } else {
            false
        };
        let pos = self.pos();
        let mut acc = self.term()?;
        if neg {
            acc = match acc {
                Val::Num(q) => Val::Num(-q),
                Val::Poly(p) => Val::Poly(p.neg()),
            };
        }
        loop {
            let op = match self.peek() {
                Tok::Sym(c @ ('+' | '-')) => *c,
                _ => return Ok(acc),
            };
            self.bump();
            let rpos = self.pos();
            let rhs = self.term()?;
            acc = match (acc, rhs) {
                (Val::Num(a), Val::Num(b)) => Val::Num(if op == '+' { &a + &b } else { &a - &b }),
                (a, b) => {
                    let (a, b) = (self.poly(a, pos)?, self.poly(b, rpos)?);
                    Val::Poly(if op == '+' { a.add(&b) } else { a.sub(&b) })
                }
            };
        }
    }

    fn term(&mut self) -> Result<Val> {
        let pos = self.pos();
        let mut acc = self.power()?;
        loop {
            let op = match self.peek() {
                Tok::Sym(c @ ('*' | '/')) => *c,
                _ => return Ok(acc),
            };
            let opos = self.pos();
            self.bump();
            let rpos = self.pos();
            let rhs = self.power()?;
            acc = match (op, acc, rhs) {
                ('*', Val::Num(a), Val::Num(b)) => Val::Num(&a * &b),
                ('/', Val::Num(a), Val::Num(b)) => match a.checked_div(&b) {
                    Ok(q) => Val::Num(q),
                    Err(_) => return self.err(opos, "zero denominator"),
                },
                ('*', a, b) => {
                    let (a, b) = (self.poly(a, pos)?, self.poly(b, rpos)?);
                    Val::Poly(a.multiply(&b)?)
                }
                (_, a, b) => {
                    let a = self.poly(a, pos)?;
                    let inv = self.invert(b, rpos)?;
                    Val::Poly(a.multiply(&inv)?)
                }
            };
        }
    }

    /// Inverse of a single term `c t^e x^u`.
    fn invert(&self, v: Val, pos: usize) -> Result<KDiffPoly> {
        let p = self.poly(v, pos)?;
        let mut it = p.terms();
        match (it.next(), it.next()) {
            (Some((u, c)), None) if c.is_exact() && c.terms().len() == 1 => {
                let (e, a) = &c.terms()[0];
                let inv_c = HahnSeries::monomial(a.inv(), -e);
                let inv_u = u.iter().map(|s| s.scale(-1)).collect();
                Ok(KDiffPoly::from_terms(self.nvars, vec![(inv_u, inv_c)]))
            }
            (None, _) => self.err(pos, "zero denominator"),
            _ => self.err(pos, "can only divide by a single term"),
        }
    }

    /// The polynomial `t^e` when `p` is exactly that.
    fn as_t_power(p: &KDiffPoly) -> Option<RhoRational> {
        let mut it = p.terms();
        let (u, c) = it.next()?;
        if it.next().is_some() || !u.iter().all(|s| s.is_zero()) || !c.is_exact() || c.terms().len() != 1 {
            return None;
        }
        let (e, a) = &c.terms()[0];
        a.is_one().then(|| e.clone())
    }

    fn power(&mut self) -> Result<Val> {
        let pos = self.pos();
        let base = self.atom()?;
        if *self.peek() != Tok::Sym('^') {
            return Ok(base);
        }
        self.bump();
        let neg = if *self.peek() == Tok::Sym('-') {
            self.bump();
            true
        } else {
            false
        };
        let epos = self.pos();
        let e = match self.atom()? {
            Val::Num(q) => {
                if neg {
                    -q
                } else {
                    q
                }
            }
            Val::Poly(_) => return self.err(epos, "exponent must be a number"),
        };
        match base {
            Val::Num(b) => match e.as_integer().and_then(|k| i64::try_from(k).ok()) {
                Some(k) => match b.pow(k) {
                    Ok(v) => Ok(Val::Num(v)),
                    Err(_) => self.err(epos, "zero denominator"),
                },
                None => self.err(epos, "exponent of a number must be an integer"),
            },
            Val::Poly(p) => {
                if let Some(a) = Self::as_t_power(&p) {
                    return Ok(Val::Poly(KDiffPoly::constant(self.nvars, HahnSeries::splitting(&(&a * &e)))));
                }
                let k = match e.as_integer().and_then(|k| i64::try_from(k).ok()) {
                    Some(k) => k,
                    None => return self.err(epos, "exponent must be an integer"),
                };
                let b = if k < 0 { self.invert(Val::Poly(p), pos)? } else { p };
                let mut acc = KDiffPoly::constant(self.nvars, HahnSeries::one());
                for _ in 0..k.unsigned_abs() {
                    acc = acc.multiply(&b)?;
                }
                Ok(Val::Poly(acc))
            }
        }
    }

    fn small_int(&mut self) -> Result<usize> {
        let pos = self.pos();
        match self.bump() {
            Tok::Int(k) => match usize::try_from(k) {
                Ok(k) if k <= 64 => Ok(k),
                _ => self.err(pos, "sigma power out of range"),
            },
            _ => self.err(pos, "expected an integer"),
        }
    }

    fn atom(&mut self) -> Result<Val> {
        let pos = self.pos();
        match self.bump() {
            Tok::Int(k) => Ok(Val::Num(RhoRational::from_bigint(k))),
            Tok::Sym('(') => {
                let v = self.expr()?;
                self.expect(')')?;
                Ok(v)
            }
            Tok::Ident(name) => match name.as_str() {
                "r" => Ok(Val::Num(RhoRational::rho())),
                "t" => Ok(Val::Poly(KDiffPoly::constant(self.nvars, HahnSeries::splitting(&RhoRational::one())))),
                "O" => {
                    self.expect('(')?;
                    let ipos = self.pos();
                    let inner = self.expr()?;
                    self.expect(')')?;
                    let p = self.poly(inner, ipos)?;
                    match Self::as_t_power(&p) {
                        Some(e) => Ok(Val::Poly(KDiffPoly::constant(self.nvars, HahnSeries::unknown(e)))),
                        None => self.err(ipos, "O(...) takes a power of t"),
                    }
                }
                "s" => {
                    let j = if *self.peek() == Tok::Sym('^') {
                        self.bump();
                        self.small_int()?
                    } else {
                        1
                    };
                    self.expect('(')?;
                    let vpos = self.pos();
                    let i = match self.bump() {
                        Tok::Ident(v) => match variable_index(&v) {
                            Some(i) => i,
                            None => return self.err(vpos, format!("unknown variable '{v}'")),
                        },
                        _ => return self.err(vpos, "expected a variable"),
                    };
                    self.expect(')')?;
                    Ok(Val::Poly(KDiffPoly::monomial(self.nvars, i - 1, SigmaExponent::single(j, 1), HahnSeries::one())))
                }
                v => match variable_index(v) {
                    Some(i) if i <= self.nvars => Ok(Val::Poly(KDiffPoly::var(self.nvars, i - 1))),
                    Some(_) => self.err(pos, format!("variable '{v}' exceeds the declared count {}", self.nvars)),
                    None => self.err(pos, format!("unknown symbol '{v}'")),
                },
            },
            Tok::End => self.err(pos, "unexpected end of input"),
            Tok::Sym(c) => self.err(pos, format!("unexpected '{c}'")),
        }
    }
}

fn max_variable(toks: &[Token]) -> usize {
    toks.iter()
        .filter_map(|t| match &t.tok {
            Tok::Ident(v) => variable_index(v),
            _ => None,
        })
        .max()
        .unwrap_or(0)
}

fn run(src: &str, nvars: Option<usize>) -> Result<(Val, Parser<'_>)> {
    let toks = tokenize(src)?;
    let nvars = nvars.unwrap_or_else(|| max_variable(&toks).max(1));
    let mut p = Parser { src, toks, at: 0, nvars };
    let v = p.expr()?;
    if *p.peek() != Tok::End {
        return p.err(p.pos(), "trailing input");
    }
    Ok((v, p))
}

/// Parses a polynomial in `x1..xn`; without `nvars`, `n` is the largest
/// index used.
pub fn parse_poly(src: &str, nvars: Option<usize>) -> Result<KDiffPoly> {
    let (v, p) = run(src, nvars)?;
    p.poly(v, 0)
}

/// Parses an element of `Q(r)` such as `(3*r^2 - 2)/(r + 1)`.
pub fn parse_rho(src: &str) -> Result<RhoRational> {
    let (v, p) = run(src, Some(0))?;
    match v {
        Val::Num(q) => Ok(q),
        Val::Poly(_) => p.err(0, "expected a number in r"),
    }
}

/// A comma-separated point of `Q(r)^n`.
pub fn parse_point(src: &str) -> Result<Vec<RhoRational>> {
    let mut out = Vec::new();
    let mut offset = 0;
    for part in src.split(',') {
        out.push(parse_rho(part).map_err(|e| shift_column(e, offset))?);
        offset += part.len() + 1;
    }
    Ok(out)
}

/// Moves a single-line error right by `offset` columns.
pub(crate) fn shift_column(e: Error, offset: usize) -> Error {
    match e {
        Error::Parse { line: 1, column, message } => Error::Parse {
            line: 1,
            column: column + offset,
            message,
        },
        e => e,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use diffkap_core::Extended;

    #[test]
    fn running_example() {
        let f = parse_poly("(1+t)*x1*s^3(x2) + t^2*s(x2) + 1", None).unwrap();
        assert_eq!(f.nvars(), 2);
        assert_eq!(f.len(), 3);
        assert_eq!(parse_poly(&f.to_string(), Some(2)).unwrap(), f);
    }

    #[test]
    fn rho_values() {
        let q = parse_rho("(3*r^2 - 2)/(r + 1)").unwrap();
        let want = &RhoRational::from_int_poly(&[-2, 0, 3]) / &RhoRational::from_int_poly(&[1, 1]);
        assert_eq!(q, want);
        assert_eq!(parse_rho(&q.to_string()).unwrap(), q);
        assert_eq!(parse_rho("-r^-1").unwrap(), -RhoRational::rho().inv().unwrap());
    }

    #[test]
    fn t_exponents() {
        let f = parse_poly("t^(r/(1+r)) * x1", None).unwrap();
        let (_, c) = f.terms().next().unwrap();
        let e = &RhoRational::rho() / &RhoRational::from_int_poly(&[1, 1]);
        assert_eq!(c.valuation().unwrap(), Extended::Finite(e));
        let g = parse_poly("x1^(-2)*s(x1) - 3/2*t^2 + O(t^5)", None).unwrap();
        assert_eq!(parse_poly(&g.to_string(), Some(1)).unwrap(), g);
        assert_eq!(parse_poly("x1/t", None).unwrap(), parse_poly("t^(-1)*x1", None).unwrap());
    }

    fn loc(src: &str) -> (usize, usize) {
        match parse_poly(src, None) {
            Err(Error::Parse { line, column, .. }) => (line, column),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn errors_carry_positions() {
        assert_eq!(loc("x1 + y"), (1, 6));
        assert_eq!(loc("x1 +\n  t^(1/(r-r))"), (2, 7));
        assert_eq!(loc("x1 + r"), (1, 6));
        assert_eq!(loc("x1 *"), (1, 5));
        assert_eq!(loc("x1 # 2"), (1, 4));
        assert_eq!(loc("(x1 + 1"), (1, 8));
        assert_eq!(loc("x1 / (x1 + 1)"), (1, 6));
    }
}
