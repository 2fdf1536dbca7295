//! Rational functions over F_p, stored in reduced form with monic denominator
//! so equality is structural.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::field::PrimeField;
use crate::poly::{Poly, PolyError, VarSet};

#[derive(Clone, PartialEq, Eq)]
pub struct RatFunc {
    num: Poly,
    den: Poly,
}

impl RatFunc {
    /// Build `num/den`, reducing to lowest terms and normalizing the
    /// denominator to be monic in graded-lex order.
    pub fn new(num: Poly, den: Poly) -> Result<RatFunc, PolyError> {
        if den.is_zero() {
            return Err(PolyError::DivisionByZero);
        }
        if num.is_zero() {
            let one = Poly::one(num.field(), num.vars().clone());
            return Ok(RatFunc { num, den: one });
        }
        let g = Poly::gcd(&num, &den)?;
        let mut num = num.div_exact(&g)?;
        let mut den = den.div_exact(&g)?;
        let lc = den.leading_coeff();
        if lc != 1 {
            let inv = num.field().inv(lc).unwrap();
            num = num.scale(inv);
            den = den.scale(inv);
        }
        Ok(RatFunc { num, den })
    }

    pub fn from_poly(num: Poly) -> RatFunc {
        let den = Poly::one(num.field(), num.vars().clone());
        RatFunc { num, den }
    }

    pub fn zero(field: PrimeField, vars: VarSet) -> RatFunc {
        RatFunc::from_poly(Poly::zero(field, vars))
    }

    pub fn one(field: PrimeField, vars: VarSet) -> RatFunc {
        RatFunc::from_poly(Poly::one(field, vars))
    }

    pub fn constant(field: PrimeField, vars: VarSet, c: u64) -> RatFunc {
        RatFunc::from_poly(Poly::constant(field, vars, c))
    }

    pub fn var(field: PrimeField, vars: VarSet, name: &str) -> Result<RatFunc, PolyError> {
        Ok(RatFunc::from_poly(Poly::var(field, vars, name)?))
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn field(&self) -> PrimeField {
        self.num.field()
    }

    pub fn vars(&self) -> &VarSet {
        self.num.vars()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    /// The numerator when the denominator is 1.
    pub fn as_poly(&self) -> Option<&Poly> {
        if self.is_polynomial() {
            Some(&self.num)
        } else {
            None
        }
    }

    pub fn add(&self, other: &RatFunc) -> RatFunc {
        let num = self.num.mul(&other.den).add(&other.num.mul(&self.den));
        let den = self.den.mul(&other.den);
        RatFunc::new(num, den).expect("nonzero denominator")
    }

    pub fn sub(&self, other: &RatFunc) -> RatFunc {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> RatFunc {
        RatFunc {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn mul(&self, other: &RatFunc) -> RatFunc {
        let num = self.num.mul(&other.num);
        let den = self.den.mul(&other.den);
        RatFunc::new(num, den).expect("nonzero denominator")
    }

    pub fn scale(&self, c: u64) -> RatFunc {
        RatFunc::new(self.num.scale(c), self.den.clone()).expect("nonzero denominator")
    }

    pub fn div(&self, other: &RatFunc) -> Result<RatFunc, PolyError> {
        if other.is_zero() {
            return Err(PolyError::DivisionByZero);
        }
        RatFunc::new(self.num.mul(&other.den), self.den.mul(&other.num))
    }

    pub fn inv(&self) -> Result<RatFunc, PolyError> {
        if self.is_zero() {
            return Err(PolyError::DivisionByZero);
        }
        RatFunc::new(self.den.clone(), self.num.clone())
    }

    pub fn pow_u32(&self, e: u32) -> RatFunc {
        let mut acc = RatFunc::one(self.field(), self.vars().clone());
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Integer power; negative exponents invert (error on zero base).
    pub fn pow_i64(&self, e: i64) -> Result<RatFunc, PolyError> {
        if e >= 0 {
            Ok(self.pow_u32(e as u32))
        } else {
            Ok(self.inv()?.pow_u32((-e) as u32))
        }
    }

    /// Substitute every variable by a rational function. Errors when the
    /// denominator image vanishes identically.
    pub fn substitute(&self, images: &[RatFunc]) -> Result<RatFunc, PolyError> {
        let n = self.num.substitute(images)?;
        let d = self.den.substitute(images)?;
        if d.is_zero() {
            return Err(PolyError::InvalidSubstitution);
        }
        n.div(&d)
    }

    /// Order of vanishing along `{var = 0}`: v-adic valuation of the numerator
    /// minus that of the denominator.
    pub fn order_along(&self, var_idx: usize) -> i64 {
        fn val(p: &Poly, idx: usize) -> i64 {
            p.terms_desc().map(|(m, _)| m.0[idx] as i64).min().unwrap_or(0)
        }
        if self.is_zero() {
            panic!("order of the zero function is undefined");
        }
        val(&self.num, var_idx) - val(&self.den, var_idx)
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_polynomial() {
            write!(f, "{}", self.num)
        } else if self.num.num_terms() == 1 {
            write!(f, "{}/({})", self.num, self.den)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

impl fmt::Debug for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RatFunc({})", self)
    }
}

#[derive(Serialize, Deserialize)]
struct RatFuncData {
    num: Poly,
    den: Poly,
}

impl Serialize for RatFunc {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        RatFuncData {
            num: self.num.clone(),
            den: self.den.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for RatFunc {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let data = RatFuncData::deserialize(d)?;
        RatFunc::new(data.num, data.den).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::varset;

    fn rf(p: u64, num: &str, den: &str) -> RatFunc {
        let f = PrimeField::new(p).unwrap();
        let v = varset(&["x", "y"]);
        let n = crate::parse::parse_poly(num, f, v.clone()).unwrap();
        let d = crate::parse::parse_poly(den, f, v).unwrap();
        RatFunc::new(n, d).unwrap()
    }

    #[test]
    fn reduces_and_makes_monic() {
        let r = rf(5, "2*x^2*y", "4*x*y^2");
        // 2x/(4y) = (2/4)(x/y); monic denominator y, numerator 3*x (2*4^{-1}=3)
        assert_eq!(r.num().to_string(), "3*x");
        assert_eq!(r.den().to_string(), "y");
    }

    #[test]
    fn structural_equality_of_equivalent_fractions() {
        assert_eq!(rf(7, "x^2 + x*y", "x"), rf(7, "3*x + 3*y", "3"));
    }

    #[test]
    fn field_axioms_spot() {
        let a = rf(3, "x", "y");
        let b = rf(3, "y + 1", "x^2");
        let c = rf(3, "2", "x + y");
        let lhs = a.mul(&b.add(&c));
        let rhs = a.mul(&b).add(&a.mul(&c));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn substitution_hirzebruch_chart_relation() {
        // x -> 1/w, y -> z*w^d applied to x^d*y gives z (d = 3).
        let f = PrimeField::new(5).unwrap();
        let xy = varset(&["x", "y"]);
        let zw = varset(&["z", "w"]);
        let expr = crate::parse::parse_poly("x^3*y", f, xy).unwrap();
        let img_x = rf_zw(f, &zw, "1", "w");
        let img_y = rf_zw(f, &zw, "z*w^3", "1");
        let out = expr.substitute(&[img_x, img_y]).unwrap();
        assert_eq!(out.to_string(), "z");
    }

    fn rf_zw(f: PrimeField, v: &VarSet, num: &str, den: &str) -> RatFunc {
        let n = crate::parse::parse_poly(num, f, v.clone()).unwrap();
        let d = crate::parse::parse_poly(den, f, v.clone()).unwrap();
        RatFunc::new(n, d).unwrap()
    }

    #[test]
    fn substitution_identity_and_char2() {
        let f = PrimeField::new(2).unwrap();
        let v = varset(&["x", "y"]);
        let a = crate::parse::parse_poly("x^2 + x", f, v.clone()).unwrap();
        let idx = RatFunc::var(f, v.clone(), "x").unwrap();
        let idy = RatFunc::var(f, v.clone(), "y").unwrap();
        assert_eq!(a.substitute(&[idx.clone(), idy.clone()]).unwrap(), RatFunc::from_poly(a.clone()));
        // x -> x + 1 fixes x^2 + x in characteristic 2
        let xp1 = RatFunc::from_poly(crate::parse::parse_poly("x + 1", f, v.clone()).unwrap());
        assert_eq!(a.substitute(&[xp1, idy]).unwrap(), RatFunc::from_poly(a));
    }

    #[test]
    fn substitution_error_on_vanishing_denominator() {
        let r = rf(3, "1", "x");
        let f = PrimeField::new(3).unwrap();
        let v = varset(&["x", "y"]);
        let zero = RatFunc::zero(f, v.clone());
        let idy = RatFunc::var(f, v, "y").unwrap();
        assert_eq!(r.substitute(&[zero, idy]), Err(PolyError::InvalidSubstitution));
    }

    #[test]
    fn order_along_divisor() {
        let r = rf(5, "x^2*y + x^3", "y^2");
        assert_eq!(r.order_along(0), 2); // x-order of numerator
        assert_eq!(r.order_along(1), -2); // y: 0 - 2
    }
}
