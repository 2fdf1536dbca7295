//! Sparse multivariate polynomials over F_p with a graded-lexicographic
//! term order.
//!
//! A `Poly` carries its field and an ordered variable list. The term map is
//! keyed by exponent vectors; no zero coefficient is ever stored, so equality
//! is structural. The graded-lex order (total degree first, then left-to-right
//! exponent comparison) fixes canonical printing and serialization.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::field::PrimeField;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolyError {
    #[error("gcd of two zero polynomials is undefined")]
    DegenerateGcd,
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("missing image for variable `{0}` in substitution")]
    MissingImage(String),
    #[error("substitution makes a denominator vanish identically")]
    InvalidSubstitution,
    #[error("division by zero polynomial")]
    DivisionByZero,
    #[error("polynomial is not divisible")]
    NotDivisible,
    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },
}

/// Exponent vector with graded-lex ordering (ascending; the leading term of a
/// polynomial is the *maximum* key).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn total_degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_constant(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a.checked_add(*b).expect("monomial exponent overflow"))
                .collect(),
        )
    }

    fn try_div(&self, other: &Monomial) -> Option<Monomial> {
        let mut out = Vec::with_capacity(self.0.len());
        for (a, b) in self.0.iter().zip(&other.0) {
            if a < b {
                return None;
            }
            out.push(a - b);
        }
        Some(Monomial(out))
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        match self.total_degree().cmp(&other.total_degree()) {
            Ordering::Equal => self.0.cmp(&other.0),
            ord => ord,
        }
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

pub type VarSet = Arc<[String]>;

pub fn varset(names: &[&str]) -> VarSet {
    names.iter().map(|s| s.to_string()).collect()
}

#[derive(Clone)]
pub struct Poly {
    field: PrimeField,
    vars: VarSet,
    terms: BTreeMap<Monomial, u64>,
}

impl PartialEq for Poly {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field && self.same_vars(other) && self.terms == other.terms
    }
}

impl Eq for Poly {}

impl Poly {
    pub fn zero(field: PrimeField, vars: VarSet) -> Poly {
        Poly {
            field,
            vars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(field: PrimeField, vars: VarSet, c: u64) -> Poly {
        let mut p = Poly::zero(field, vars);
        let c = field.reduce(c);
        if c != 0 {
            p.terms.insert(Monomial(vec![0; p.vars.len()]), c);
        }
        p
    }

    pub fn one(field: PrimeField, vars: VarSet) -> Poly {
        Poly::constant(field, vars, 1)
    }

    /// The monomial `c * v^e` for a named variable.
    pub fn var_pow(field: PrimeField, vars: VarSet, name: &str, e: u32, c: u64) -> Result<Poly, PolyError> {
        let idx = vars
            .iter()
            .position(|v| v == name)
            .ok_or_else(|| PolyError::UnknownVariable(name.to_string()))?;
        let mut exps = vec![0u32; vars.len()];
        exps[idx] = e;
        let mut p = Poly::zero(field, vars);
        let c = field.reduce(c);
        if c != 0 {
            p.terms.insert(Monomial(exps), c);
        }
        Ok(p)
    }

    pub fn var(field: PrimeField, vars: VarSet, name: &str) -> Result<Poly, PolyError> {
        Poly::var_pow(field, vars, name, 1, 1)
    }

    pub fn from_terms<I>(field: PrimeField, vars: VarSet, it: I) -> Poly
    where
        I: IntoIterator<Item = (Vec<u32>, u64)>,
    {
        let mut p = Poly::zero(field, vars);
        for (exps, c) in it {
            assert_eq!(exps.len(), p.vars.len(), "exponent arity mismatch");
            p.add_term(Monomial(exps), c);
        }
        p
    }

    #[inline]
    pub fn field(&self) -> PrimeField {
        self.field
    }

    #[inline]
    pub fn vars(&self) -> &VarSet {
        &self.vars
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    fn same_vars(&self, other: &Poly) -> bool {
        Arc::ptr_eq(&self.vars, &other.vars) || *self.vars == *other.vars
    }

    fn check_context(&self, other: &Poly) {
        assert_eq!(self.field, other.field, "mixed prime fields");
        assert!(self.same_vars(other), "mixed variable sets");
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.constant_coeff() == 1 && self.total_degree() == 0
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty() || (self.terms.len() == 1 && self.terms.keys().next().unwrap().is_constant())
    }

    pub fn constant_coeff(&self) -> u64 {
        self.terms
            .get(&Monomial(vec![0; self.vars.len()]))
            .copied()
            .unwrap_or(0)
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in graded-lex descending order.
    pub fn terms_desc(&self) -> impl Iterator<Item = (&Monomial, u64)> {
        self.terms.iter().rev().map(|(m, &c)| (m, c))
    }

    pub fn coeff(&self, exps: &[u32]) -> u64 {
        self.terms.get(&Monomial(exps.to_vec())).copied().unwrap_or(0)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms
            .keys()
            .next_back()
            .map(|m| m.total_degree())
            .unwrap_or(0)
    }

    pub fn degree_in(&self, var_idx: usize) -> u32 {
        self.terms.keys().map(|m| m.0[var_idx]).max().unwrap_or(0)
    }

    /// Leading (graded-lex largest) monomial and coefficient.
    pub fn leading_term(&self) -> Option<(&Monomial, u64)> {
        self.terms.iter().next_back().map(|(m, &c)| (m, c))
    }

    pub fn leading_coeff(&self) -> u64 {
        self.leading_term().map(|(_, c)| c).unwrap_or(0)
    }

    fn add_term(&mut self, m: Monomial, c: u64) {
        let c = self.field.reduce(c);
        if c == 0 {
            return;
        }
        let entry = self.terms.entry(m);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = self.field.add(*o.get(), c);
                if s == 0 {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        self.check_context(other);
        let mut out = self.clone();
        for (m, &c) in &other.terms {
            out.add_term(m.clone(), c);
        }
        out
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.check_context(other);
        let mut out = self.clone();
        for (m, &c) in &other.terms {
            out.add_term(m.clone(), self.field.neg(c));
        }
        out
    }

    pub fn neg(&self) -> Poly {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = self.field.neg(*c);
        }
        out
    }

    pub fn scale(&self, c: u64) -> Poly {
        let c = self.field.reduce(c);
        let mut out = Poly::zero(self.field, self.vars.clone());
        if c == 0 {
            return out;
        }
        for (m, &a) in &self.terms {
            out.terms.insert(m.clone(), self.field.mul(a, c));
        }
        out
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        self.check_context(other);
        let mut out = Poly::zero(self.field, self.vars.clone());
        for (ma, &ca) in &self.terms {
            for (mb, &cb) in &other.terms {
                out.add_term(ma.mul(mb), self.field.mul(ca, cb));
            }
        }
        out
    }

    pub fn mul_term(&self, m: &Monomial, c: u64) -> Poly {
        let mut out = Poly::zero(self.field, self.vars.clone());
        let c = self.field.reduce(c);
        if c == 0 {
            return out;
        }
        for (ma, &ca) in &self.terms {
            out.terms.insert(ma.mul(m), self.field.mul(ca, c));
        }
        out
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut acc = Poly::one(self.field, self.vars.clone());
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Formal partial derivative with respect to a named variable.
    pub fn partial_derivative(&self, var: &str) -> Result<Poly, PolyError> {
        let idx = self
            .var_index(var)
            .ok_or_else(|| PolyError::UnknownVariable(var.to_string()))?;
        Ok(self.partial_derivative_idx(idx))
    }

    pub fn partial_derivative_idx(&self, idx: usize) -> Poly {
        let mut out = Poly::zero(self.field, self.vars.clone());
        for (m, &c) in &self.terms {
            let e = m.0[idx];
            if e == 0 {
                continue;
            }
            let coeff = self.field.mul(c, self.field.reduce(e as u64));
            if coeff == 0 {
                continue;
            }
            let mut exps = m.0.clone();
            exps[idx] = e - 1;
            out.add_term(Monomial(exps), coeff);
        }
        out
    }

    /// Division with remainder by a single divisor (graded-lex). The remainder
    /// has no term divisible by the divisor's leading monomial, so it is zero
    /// exactly when `d` divides `self`.
    pub fn divide(&self, d: &Poly) -> Result<(Poly, Poly), PolyError> {
        self.check_context(d);
        if d.is_zero() {
            return Err(PolyError::DivisionByZero);
        }
        let (dm, dc) = {
            let (m, c) = d.leading_term().unwrap();
            (m.clone(), c)
        };
        let dc_inv = self.field.inv(dc).expect("nonzero leading coefficient");
        let mut q = Poly::zero(self.field, self.vars.clone());
        let mut r = Poly::zero(self.field, self.vars.clone());
        let mut f = self.clone();
        while let Some((fm, fc)) = f.leading_term().map(|(m, c)| (m.clone(), c)) {
            if let Some(t) = fm.try_div(&dm) {
                let c = self.field.mul(fc, dc_inv);
                q.add_term(t.clone(), c);
                f = f.sub(&d.mul_term(&t, c));
            } else {
                r.add_term(fm.clone(), fc);
                let mut f2 = f;
                f2.terms.remove(&fm);
                f = f2;
            }
        }
        Ok((q, r))
    }

    pub fn div_exact(&self, d: &Poly) -> Result<Poly, PolyError> {
        let (q, r) = self.divide(d)?;
        if r.is_zero() {
            Ok(q)
        } else {
            Err(PolyError::NotDivisible)
        }
    }

    pub fn divides(&self, other: &Poly) -> bool {
        if self.is_zero() {
            return other.is_zero();
        }
        other.divide(self).map(|(_, r)| r.is_zero()).unwrap_or(false)
    }

    /// Scale so the graded-lex leading coefficient is 1.
    pub fn monic(&self) -> Poly {
        match self.leading_coeff() {
            0 | 1 => self.clone(),
            c => self.scale(self.field.inv(c).unwrap()),
        }
    }

    // ---- gcd by content/primitive-part recursion on the last variable ----

    /// Greatest common divisor, normalized monic. Errors when both inputs are
    /// zero.
    pub fn gcd(a: &Poly, b: &Poly) -> Result<Poly, PolyError> {
        if a.is_zero() && b.is_zero() {
            return Err(PolyError::DegenerateGcd);
        }
        a.check_context(b);
        if a.is_zero() {
            return Ok(b.monic());
        }
        if b.is_zero() {
            return Ok(a.monic());
        }
        let k = a.vars.len();
        Ok(gcd_at(a, b, k).monic())
    }

    /// Coefficients of `self` viewed as a univariate polynomial in `vars[idx]`;
    /// entry `i` is the coefficient of `v^i` (a polynomial with `v`-degree 0).
    pub fn coeffs_in(&self, idx: usize) -> Vec<Poly> {
        let d = self.degree_in(idx) as usize;
        let mut out = vec![Poly::zero(self.field, self.vars.clone()); d + 1];
        for (m, &c) in &self.terms {
            let e = m.0[idx] as usize;
            let mut exps = m.0.clone();
            exps[idx] = 0;
            out[e].add_term(Monomial(exps), c);
        }
        out
    }

    /// Rebuild from `coeffs_in` output.
    pub fn from_coeffs_in(field: PrimeField, vars: VarSet, idx: usize, coeffs: &[Poly]) -> Poly {
        let mut out = Poly::zero(field, vars);
        for (e, c) in coeffs.iter().enumerate() {
            for (m, &cc) in &c.terms {
                let mut exps = m.0.clone();
                exps[idx] += e as u32;
                out.add_term(Monomial(exps), cc);
            }
        }
        out
    }

    /// Substitute every variable by a rational function; ring homomorphism.
    pub fn substitute(
        &self,
        images: &[crate::ratfunc::RatFunc],
    ) -> Result<crate::ratfunc::RatFunc, PolyError> {
        use crate::ratfunc::RatFunc;
        assert_eq!(images.len(), self.vars.len(), "one image per variable");
        let target_ctx = images
            .first()
            .map(|r| (r.num().field(), r.num().vars().clone()));
        let (tf, tv) = match target_ctx {
            Some((f, v)) => (f, v),
            None => (self.field, self.vars.clone()),
        };
        let mut acc = RatFunc::zero(tf, tv.clone());
        for (m, &c) in &self.terms {
            let mut term = RatFunc::constant(tf, tv.clone(), c);
            for (i, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    term = term.mul(&images[i].pow_u32(e));
                }
            }
            acc = acc.add(&term);
        }
        Ok(acc)
    }

    /// Substitute variables by polynomials (stays in the polynomial ring).
    pub fn substitute_poly(&self, images: &[Poly]) -> Poly {
        assert_eq!(images.len(), self.vars.len());
        let (tf, tv) = (images[0].field(), images[0].vars().clone());
        let mut acc = Poly::zero(tf, tv.clone());
        for (m, &c) in &self.terms {
            let mut term = Poly::constant(tf, tv.clone(), c);
            for (i, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    term = term.mul(&images[i].pow(e));
                }
            }
            acc = acc.add(&term);
        }
        acc
    }

    /// Evaluate at a point of F_p^n.
    pub fn eval(&self, point: &[u64]) -> u64 {
        assert_eq!(point.len(), self.vars.len());
        let mut acc = 0u64;
        for (m, &c) in &self.terms {
            let mut t = c;
            for (i, &e) in m.0.iter().enumerate() {
                t = self.field.mul(t, self.field.pow(point[i], e as u64));
            }
            acc = self.field.add(acc, t);
        }
        acc
    }
}

/// gcd of polynomials involving only `vars[0..k]`.
fn gcd_at(a: &Poly, b: &Poly, k: usize) -> Poly {
    if a.is_constant() || b.is_constant() {
        // A nonzero constant divides everything.
        return Poly::one(a.field, a.vars.clone());
    }
    if k == 0 {
        unreachable!("non-constant polynomial with no active variables");
    }
    let v = k - 1;
    let (da, db) = (a.degree_in(v), b.degree_in(v));
    if da == 0 && db == 0 {
        return gcd_at(a, b, v);
    }
    let content = |p: &Poly| -> Poly {
        let coeffs = p.coeffs_in(v);
        let mut g: Option<Poly> = None;
        for c in coeffs.iter().filter(|c| !c.is_zero()) {
            g = Some(match g {
                None => c.monic(),
                Some(prev) => gcd_at(&prev, c, v).monic(),
            });
            if g.as_ref().unwrap().is_one() {
                break;
            }
        }
        g.unwrap()
    };
    let cont_a = content(a);
    let cont_b = content(b);
    let pp_a = a.div_exact(&cont_a).expect("content divides");
    let pp_b = b.div_exact(&cont_b).expect("content divides");
    let cont_g = gcd_at(&cont_a, &cont_b, v);

    // Primitive pseudo-remainder sequence in vars[v].
    let (mut r0, mut r1) = if pp_a.degree_in(v) >= pp_b.degree_in(v) {
        (pp_a, pp_b)
    } else {
        (pp_b, pp_a)
    };
    loop {
        let r = prem(&r0, &r1, v);
        if r.is_zero() {
            break;
        }
        let pr = if r.degree_in(v) == 0 && r.is_constant() {
            r
        } else if r.degree_in(v) == 0 {
            // Content of a v-free poly is itself; primitive part is 1.
            Poly::one(r.field, r.vars.clone())
        } else {
            let c = content(&r);
            r.div_exact(&c).unwrap()
        };
        r0 = r1;
        r1 = pr;
        if r1.is_constant() {
            break;
        }
    }
    let pp_g = if r1.is_constant() {
        Poly::one(a.field, a.vars.clone())
    } else {
        let c = content(&r1);
        r1.div_exact(&c).unwrap()
    };
    cont_g.mul(&pp_g)
}

/// Pseudo-remainder of `a` by `b` in variable `vars[v]` (scalar multiples of
/// the true remainder; content is cleared by the caller).
fn prem(a: &Poly, b: &Poly, v: usize) -> Poly {
    let db = b.degree_in(v);
    let bc = b.coeffs_in(v);
    let lb = bc[db as usize].clone();
    let mut r = a.clone();
    while !r.is_zero() && r.degree_in(v) >= db {
        let dr = r.degree_in(v);
        let rc = r.coeffs_in(v);
        let lr = rc[dr as usize].clone();
        // r = lb * r - lr * v^(dr-db) * b
        let mut shift = vec![0u32; a.vars.len()];
        shift[v] = dr - db;
        let t = b.mul(&lr).mul_term(&Monomial(shift), 1);
        r = r.mul(&lb).sub(&t);
    }
    r
}

// ---- printing ----

impl fmt::Display for Poly {
    /// Canonical text form: graded-lex descending terms joined by ` + `,
    /// coefficients as least non-negative residues, e.g. `x^2*y + 2*y^3`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in self.terms_desc() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let mut factors: Vec<String> = Vec::new();
            if c != 1 || m.is_constant() {
                factors.push(c.to_string());
            }
            for (i, &e) in m.0.iter().enumerate() {
                match e {
                    0 => {}
                    1 => factors.push(self.vars[i].clone()),
                    _ => factors.push(format!("{}^{}", self.vars[i], e)),
                }
            }
            write!(f, "{}", factors.join("*"))?;
        }
        Ok(())
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly({})", self)
    }
}

// ---- serde ----

#[derive(Serialize, Deserialize)]
struct PolyData {
    p: u64,
    vars: Vec<String>,
    /// Terms as `[exponents, coefficient]`, graded-lex descending.
    terms: Vec<(Vec<u32>, u64)>,
}

impl Serialize for Poly {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        PolyData {
            p: self.field.p(),
            vars: self.vars.to_vec(),
            terms: self.terms_desc().map(|(m, c)| (m.0.clone(), c)).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Poly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let data = PolyData::deserialize(d)?;
        let field = PrimeField::new(data.p).map_err(D::Error::custom)?;
        let vars: VarSet = data.vars.into_iter().collect();
        for (exps, _) in &data.terms {
            if exps.len() != vars.len() {
                return Err(D::Error::custom("exponent arity mismatch"));
            }
        }
        Ok(Poly::from_terms(field, vars, data.terms))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(p: u64) -> (PrimeField, VarSet) {
        (PrimeField::new(p).unwrap(), varset(&["x", "y"]))
    }

    fn parse(p: u64, s: &str) -> Poly {
        let (f, v) = ctx(p);
        crate::parse::parse_poly(s, f, v).unwrap()
    }

    #[test]
    fn graded_lex_order() {
        // x^2*y (deg 3) > y^3? deg 3 both; lex: x-exponent first: (2,1) > (0,3)
        let a = Monomial(vec![2, 1]);
        let b = Monomial(vec![0, 3]);
        let c = Monomial(vec![1, 1]);
        assert!(a > b);
        assert!(b > c); // degree 3 > degree 2
    }

    #[test]
    fn display_canonical() {
        let p = parse(5, "y^3 + x^2*y + y^3");
        assert_eq!(p.to_string(), "x^2*y + 2*y^3");
        let (f, v) = ctx(5);
        assert_eq!(Poly::zero(f, v).to_string(), "0");
    }

    #[test]
    fn frobenius_additivity() {
        let a = parse(3, "x + 2*y");
        let b = parse(3, "x*y + 1");
        let lhs = a.add(&b).pow(3);
        let rhs = a.pow(3).add(&b.pow(3));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn gcd_monomials() {
        let a = parse(7, "x^2*y");
        let b = parse(7, "x*y^2");
        assert_eq!(Poly::gcd(&a, &b).unwrap(), parse(7, "x*y"));
    }

    #[test]
    fn gcd_coprime_char2() {
        let a = parse(2, "x*y^2");
        let b = parse(2, "x^2 + y^3");
        assert!(Poly::gcd(&a, &b).unwrap().is_one());
    }

    #[test]
    fn gcd_identical() {
        let a = parse(5, "x + y");
        assert_eq!(Poly::gcd(&a, &a).unwrap(), a);
    }

    #[test]
    fn gcd_with_common_factor() {
        let a = parse(5, "x^2 + x*y").mul(&parse(5, "x + 2"));
        let b = parse(5, "x^3 + x^2*y");
        let g = Poly::gcd(&a, &b).unwrap();
        // common factor x*(x+y)
        assert_eq!(g, parse(5, "x^2 + x*y"));
        assert!(g.divides(&a) && g.divides(&b));
    }

    #[test]
    fn gcd_rejects_two_zeros() {
        let (f, v) = ctx(3);
        let z = Poly::zero(f, v);
        assert_eq!(Poly::gcd(&z, &z), Err(PolyError::DegenerateGcd));
    }

    #[test]
    fn derivative_kills_pth_powers() {
        for p in [2u64, 3, 5] {
            let (f, v) = ctx(p);
            let xp = Poly::var_pow(f, v, "x", p as u32, 1).unwrap();
            assert!(xp.partial_derivative("x").unwrap().is_zero());
        }
    }

    #[test]
    fn derivative_char2() {
        let a = parse(2, "x^2 + y^3");
        assert!(a.partial_derivative("x").unwrap().is_zero());
        let b = parse(3, "x*y^2");
        assert_eq!(b.partial_derivative("y").unwrap(), parse(3, "2*x*y"));
    }

    #[test]
    fn leibniz() {
        let a = parse(5, "x^2 + 3*y");
        let b = parse(5, "x*y + 4");
        let lhs = a.mul(&b).partial_derivative("x").unwrap();
        let rhs = a
            .partial_derivative("x")
            .unwrap()
            .mul(&b)
            .add(&b.partial_derivative("x").unwrap().mul(&a));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn division_exact_and_not() {
        let a = parse(5, "x^2 + 2*x*y + y^2");
        let d = parse(5, "x + y");
        assert_eq!(a.div_exact(&d).unwrap(), d);
        assert!(parse(5, "x^2 + 1").div_exact(&d).is_err());
    }

    #[test]
    fn serde_roundtrip() {
        let a = parse(5, "x^2*y + 2*y^3 + 4");
        let j = serde_json::to_string(&a).unwrap();
        let b: Poly = serde_json::from_str(&j).unwrap();
        assert_eq!(a, b);
    }
}
