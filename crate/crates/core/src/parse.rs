//! Recursive-descent parser for polynomial / rational-function expressions and
//! for derivation expressions.
//!
//! Expression grammar (whitespace insensitive):
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor (('*' | '/' | juxtaposition) factor)*
//! factor := '-' factor | atom ('^' uint)*
//! atom   := uint | ident | '(' expr ')'
//! ```
//!
//! Juxtaposition multiplies, so `x dx` and `(1/z)(w^2 dz + dw)` parse as
//! products. A derivation expression is an expr over the chart variables
//! together with the tokens `dx`/`dy` (one `d<var>` per chart variable; the
//! form `d/dx` is accepted as a synonym), optionally followed by
//! `@ <chart-id>`. Every additive term must contain exactly one `d` token as
//! a linear factor.

use crate::field::PrimeField;
use crate::poly::{Poly, PolyError, VarSet};
use crate::ratfunc::RatFunc;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(u64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    At,
}

fn err(pos: usize, msg: impl Into<String>) -> PolyError {
    PolyError::Parse {
        pos,
        msg: msg.into(),
    }
}

fn tokenize(s: &str) -> Result<Vec<(usize, Tok)>, PolyError> {
    let mut out = Vec::new();
    let bytes = s.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '+' => {
                out.push((i, Tok::Plus));
                i += 1;
            }
            '-' | '−' => {
                out.push((i, Tok::Minus));
                i += 1;
            }
            '*' => {
                out.push((i, Tok::Star));
                i += 1;
            }
            '/' => {
                out.push((i, Tok::Slash));
                i += 1;
            }
            '^' => {
                out.push((i, Tok::Caret));
                i += 1;
            }
            '(' => {
                out.push((i, Tok::LParen));
                i += 1;
            }
            ')' => {
                out.push((i, Tok::RParen));
                i += 1;
            }
            '@' => {
                out.push((i, Tok::At));
                i += 1;
            }
            '0'..='9' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let n: u64 = s[start..i]
                    .parse()
                    .map_err(|_| err(start, "integer literal too large"))?;
                out.push((start, Tok::Num(n)));
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((start, Tok::Ident(s[start..i].to_string())));
            }
            _ => return Err(err(i, format!("unexpected character `{c}`"))),
        }
    }
    Ok(out)
}

/// A value in the module k(vars) ⊕ k(vars)·d1 ⊕ k(vars)·d2: scalar part plus
/// one coefficient per `d` token.
#[derive(Clone)]
struct DVal {
    scalar: RatFunc,
    d: Vec<RatFunc>,
}

impl DVal {
    fn scalar_only(&self) -> bool {
        self.d.iter().all(|c| c.is_zero())
    }
}

struct Parser<'a> {
    toks: &'a [(usize, Tok)],
    pos: usize,
    field: PrimeField,
    vars: VarSet,
    /// d-token names, parallel to `vars` (empty when parsing plain expressions)
    dtokens: Vec<String>,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn here(&self) -> usize {
        self.toks.get(self.pos).map(|(p, _)| *p).unwrap_or(usize::MAX)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(_, t)| t.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn zero(&self) -> DVal {
        DVal {
            scalar: RatFunc::zero(self.field, self.vars.clone()),
            d: vec![RatFunc::zero(self.field, self.vars.clone()); self.dtokens.len()],
        }
    }

    fn scalar(&self, r: RatFunc) -> DVal {
        let mut v = self.zero();
        v.scalar = r;
        v
    }

    fn expr(&mut self) -> Result<DVal, PolyError> {
        let mut acc = if self.peek() == Some(&Tok::Minus) {
            self.bump();
            let t = self.term()?;
            self.negate(&t)
        } else {
            self.term()?
        };
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.bump();
                    let t = self.term()?;
                    acc = self.addv(&acc, &t);
                }
                Some(Tok::Minus) => {
                    self.bump();
                    let t = self.term()?;
                    let n = self.negate(&t);
                    acc = self.addv(&acc, &n);
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn addv(&self, a: &DVal, b: &DVal) -> DVal {
        DVal {
            scalar: a.scalar.add(&b.scalar),
            d: a.d.iter().zip(&b.d).map(|(x, y)| x.add(y)).collect(),
        }
    }

    fn negate(&self, a: &DVal) -> DVal {
        DVal {
            scalar: a.scalar.neg(),
            d: a.d.iter().map(|x| x.neg()).collect(),
        }
    }

    fn term(&mut self) -> Result<DVal, PolyError> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.bump();
                    let f = self.factor()?;
                    acc = self.mulv(acc, f)?;
                }
                Some(Tok::Slash) => {
                    let at = self.here();
                    self.bump();
                    let f = self.factor()?;
                    if !f.scalar_only() {
                        return Err(err(at, "cannot divide by a d-token"));
                    }
                    if f.scalar.is_zero() {
                        return Err(err(at, "division by zero"));
                    }
                    acc = DVal {
                        scalar: acc.scalar.div(&f.scalar)?,
                        d: acc
                            .d
                            .iter()
                            .map(|c| c.div(&f.scalar))
                            .collect::<Result<_, _>>()?,
                    };
                }
                // juxtaposition
                Some(Tok::Num(_)) | Some(Tok::Ident(_)) | Some(Tok::LParen) => {
                    let f = self.factor()?;
                    acc = self.mulv(acc, f)?;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn mulv(&self, a: DVal, b: DVal) -> Result<DVal, PolyError> {
        if !a.scalar_only() && !b.scalar_only() {
            return Err(err(self.here(), "product of two d-tokens"));
        }
        Ok(DVal {
            scalar: a.scalar.mul(&b.scalar),
            d: a.d
                .iter()
                .zip(&b.d)
                .map(|(x, y)| x.mul(&b.scalar).add(&y.mul(&a.scalar)))
                .collect(),
        })
    }

    fn factor(&mut self) -> Result<DVal, PolyError> {
        if self.peek() == Some(&Tok::Minus) {
            self.bump();
            let f = self.factor()?;
            return Ok(self.negate(&f));
        }
        let mut base = self.atom()?;
        while self.peek() == Some(&Tok::Caret) {
            let at = self.here();
            self.bump();
            let e = match self.bump() {
                Some(Tok::Num(n)) => n,
                _ => return Err(err(at, "expected integer exponent after `^`")),
            };
            if !base.scalar_only() {
                return Err(err(at, "cannot raise a d-token to a power"));
            }
            if e > u32::MAX as u64 {
                return Err(err(at, "exponent too large"));
            }
            base = self.scalar(base.scalar.pow_u32(e as u32));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<DVal, PolyError> {
        let at = self.here();
        match self.bump() {
            Some(Tok::Num(n)) => Ok(self.scalar(RatFunc::constant(self.field, self.vars.clone(), n))),
            Some(Tok::Ident(name)) => {
                if let Some(k) = self.dtokens.iter().position(|d| *d == name) {
                    let mut v = self.zero();
                    v.d[k] = RatFunc::one(self.field, self.vars.clone());
                    return Ok(v);
                }
                if self.vars.iter().any(|v| *v == name) {
                    return Ok(self.scalar(RatFunc::var(self.field, self.vars.clone(), &name).unwrap()));
                }
                Err(err(at, format!("unknown symbol `{name}`")))
            }
            Some(Tok::LParen) => {
                let v = self.expr()?;
                match self.bump() {
                    Some(Tok::RParen) => Ok(v),
                    _ => Err(err(at, "unbalanced parenthesis")),
                }
            }
            other => Err(err(at, format!("unexpected token {other:?}"))),
        }
    }
}

/// Parse a rational-function expression in the given variables.
pub fn parse_ratfunc(s: &str, field: PrimeField, vars: VarSet) -> Result<RatFunc, PolyError> {
    let toks = tokenize(s)?;
    let mut p = Parser {
        toks: &toks,
        pos: 0,
        field,
        vars,
        dtokens: Vec::new(),
    };
    let v = p.expr()?;
    if p.pos != toks.len() {
        return Err(err(p.here(), "trailing input"));
    }
    Ok(v.scalar)
}

/// Parse a polynomial expression (a rational expression whose reduced
/// denominator is 1).
pub fn parse_poly(s: &str, field: PrimeField, vars: VarSet) -> Result<Poly, PolyError> {
    let r = parse_ratfunc(s, field, vars)?;
    r.as_poly().cloned().ok_or(err(0, "expression is not a polynomial"))
}

/// Outcome of parsing a derivation expression: the two coefficients and the
/// optional `@ chart` suffix.
pub struct ParsedDerivation {
    pub coeff: [RatFunc; 2],
    pub chart: Option<String>,
}

/// Parse `f dx + g dy [@ chart]` over the two chart variables. `d/dx` is
/// accepted as a synonym for `dx`.
pub fn parse_derivation_expr(
    s: &str,
    field: PrimeField,
    vars: VarSet,
) -> Result<ParsedDerivation, PolyError> {
    assert_eq!(vars.len(), 2, "derivations live on two-variable charts");
    // `d/dx` -> `dx` (no chart variable is named `d`)
    let mut text = s.to_string();
    for v in vars.iter() {
        text = text.replace(&format!("d/d{v}"), &format!("d{v}"));
    }
    let toks = tokenize(&text)?;
    // split off `@ chart`
    let (body, chart) = match toks.iter().position(|(_, t)| *t == Tok::At) {
        Some(k) => {
            if toks.len() != k + 2 {
                return Err(err(toks[k].0, "expected a single chart id after `@`"));
            }
            match &toks[k + 1].1 {
                Tok::Ident(c) => (&toks[..k], Some(c.clone())),
                _ => return Err(err(toks[k + 1].0, "expected a chart id after `@`")),
            }
        }
        None => (&toks[..], None),
    };
    let dtokens: Vec<String> = vars.iter().map(|v| format!("d{v}")).collect();
    let mut p = Parser {
        toks: body,
        pos: 0,
        field,
        vars,
        dtokens,
    };
    let v = p.expr()?;
    if p.pos != body.len() {
        return Err(err(p.here(), "trailing input"));
    }
    if !v.scalar.is_zero() {
        return Err(err(0, "expression has a term without a d-token"));
    }
    let mut d = v.d.into_iter();
    let coeff = [d.next().unwrap(), d.next().unwrap()];
    Ok(ParsedDerivation { coeff, chart })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::varset;

    fn f5() -> PrimeField {
        PrimeField::new(5).unwrap()
    }

    #[test]
    fn parses_canonical_output() {
        let v = varset(&["x", "y"]);
        let p = parse_poly("x^2*y + 2*y^3", f5(), v).unwrap();
        assert_eq!(p.to_string(), "x^2*y + 2*y^3");
    }

    #[test]
    fn negative_coefficients_reduce() {
        let v = varset(&["x", "y"]);
        let p = parse_poly("-x + y - 3", f5(), v).unwrap();
        assert_eq!(p.to_string(), "4*x + y + 2");
    }

    #[test]
    fn rational_with_juxtaposition() {
        let v = varset(&["z", "w"]);
        let r = parse_ratfunc("(1/z)(w^2 + 1)", f5(), v).unwrap();
        assert_eq!(r.to_string(), "(w^2 + 1)/(z)");
    }

    #[test]
    fn derivation_basic() {
        let v = varset(&["x", "y"]);
        let d = parse_derivation_expr("x dx + y dy", f5(), v).unwrap();
        assert_eq!(d.coeff[0].to_string(), "x");
        assert_eq!(d.coeff[1].to_string(), "y");
        assert!(d.chart.is_none());
    }

    #[test]
    fn derivation_with_chart_and_synonym() {
        let v = varset(&["z", "w"]);
        let d = parse_derivation_expr("(1/z)(w^2 d/dz + d/dw) @ U1", f5(), v).unwrap();
        assert_eq!(d.coeff[0].to_string(), "w^2/(z)");
        assert_eq!(d.coeff[1].to_string(), "1/(z)");
        assert_eq!(d.chart.as_deref(), Some("U1"));
    }

    #[test]
    fn derivation_rejects_pure_scalar_term() {
        let v = varset(&["x", "y"]);
        assert!(parse_derivation_expr("x dx + y", f5(), v).is_err());
    }

    #[test]
    fn derivation_rejects_d_product() {
        let v = varset(&["x", "y"]);
        assert!(parse_derivation_expr("dx dy", f5(), v).is_err());
    }

    #[test]
    fn reports_position() {
        let v = varset(&["x", "y"]);
        match parse_poly("x + $", f5(), v) {
            Err(PolyError::Parse { pos, .. }) => assert_eq!(pos, 4),
            other => panic!("expected parse error, got {other:?}"),
        }
    }
}
