//! k-derivations of a two-variable function field attached to a chart:
//! application, normalization into content times coprime polynomial
//! coefficients, p-th iterates, p-closedness, nilpotency, and the splitting
//! projector for multiplicative derivations.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::PrimeField;
use crate::parse;
use crate::poly::{Poly, PolyError, VarSet};
use crate::ratfunc::RatFunc;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DerivationError {
    #[error("the zero derivation is not allowed here")]
    ZeroDerivation,
    #[error("chart mismatch: derivation lives on `{expected}`, argument on `{got}`")]
    ChartMismatch { expected: String, got: String },
    #[error("derivation is not p-closed")]
    NotPClosed,
    #[error("splitting projector requires a multiplicative derivation (delta^p = delta)")]
    ProjectorUndefined,
    #[error("result left the polynomial ring")]
    NonPolynomialResult,
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// A vector field `coeff_x d/dx + coeff_y d/dy` in the coordinates of a named
/// chart.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Derivation {
    chart: String,
    coeff: [RatFunc; 2],
}

/// A derivation written as `content * (f d/dx + g d/dy)` with `f`, `g`
/// coprime polynomials whose leading coefficient (of `f`, or of `g` when
/// `f = 0`) is 1. The content is the chart-local datum of the divisor of the
/// derivation.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedDerivation {
    pub content: RatFunc,
    pub f: Poly,
    pub g: Poly,
}

impl Derivation {
    /// Construct, rejecting the zero derivation.
    pub fn new(chart: impl Into<String>, coeff_x: RatFunc, coeff_y: RatFunc) -> Result<Derivation, DerivationError> {
        if coeff_x.is_zero() && coeff_y.is_zero() {
            return Err(DerivationError::ZeroDerivation);
        }
        Ok(Derivation {
            chart: chart.into(),
            coeff: [coeff_x, coeff_y],
        })
    }

    /// Internal constructor that admits the zero derivation (needed for the
    /// value of `power_p` on nilpotent inputs).
    pub(crate) fn raw(chart: impl Into<String>, coeff_x: RatFunc, coeff_y: RatFunc) -> Derivation {
        Derivation {
            chart: chart.into(),
            coeff: [coeff_x, coeff_y],
        }
    }

    /// Parse `f dx + g dy [@ chart]` in the given chart variables.
    pub fn parse(
        text: &str,
        field: PrimeField,
        vars: VarSet,
        default_chart: &str,
    ) -> Result<Derivation, DerivationError> {
        let parsed = parse::parse_derivation_expr(text, field, vars)?;
        let chart = parsed.chart.unwrap_or_else(|| default_chart.to_string());
        let [cx, cy] = parsed.coeff;
        Derivation::new(chart, cx, cy)
    }

    pub fn chart(&self) -> &str {
        &self.chart
    }

    pub fn coeff_x(&self) -> &RatFunc {
        &self.coeff[0]
    }

    pub fn coeff_y(&self) -> &RatFunc {
        &self.coeff[1]
    }

    pub fn field(&self) -> PrimeField {
        self.coeff[0].field()
    }

    pub fn vars(&self) -> &VarSet {
        self.coeff[0].vars()
    }

    pub fn is_zero(&self) -> bool {
        self.coeff[0].is_zero() && self.coeff[1].is_zero()
    }

    /// Scale by a rational function (an equivalence move).
    pub fn scale(&self, a: &RatFunc) -> Derivation {
        Derivation {
            chart: self.chart.clone(),
            coeff: [self.coeff[0].mul(a), self.coeff[1].mul(a)],
        }
    }

    fn check_same_function_field(&self, r: &RatFunc) -> Result<(), DerivationError> {
        if r.vars() != self.vars() {
            return Err(DerivationError::ChartMismatch {
                expected: self.vars().join(","),
                got: r.vars().join(","),
            });
        }
        Ok(())
    }

    /// Apply to a polynomial: `coeff_x * dp/dx + coeff_y * dp/dy`.
    pub fn apply_poly(&self, p: &Poly) -> RatFunc {
        let dx = RatFunc::from_poly(p.partial_derivative_idx(0));
        let dy = RatFunc::from_poly(p.partial_derivative_idx(1));
        self.coeff[0].mul(&dx).add(&self.coeff[1].mul(&dy))
    }

    /// Apply to a rational function via the quotient rule; k-linear and
    /// Leibniz by construction.
    pub fn apply(&self, r: &RatFunc) -> Result<RatFunc, DerivationError> {
        self.check_same_function_field(r)?;
        let dn = self.apply_poly(r.num());
        if r.is_polynomial() {
            return Ok(dn);
        }
        let dd = self.apply_poly(r.den());
        let den = RatFunc::from_poly(r.den().clone());
        // (n/d)' = (n' d - n d') / d^2
        let num = dn.mul(&den).sub(&RatFunc::from_poly(r.num().clone()).mul(&dd));
        Ok(num.div(&den.mul(&den))?)
    }

    /// Write as `content * (f d/dx + g d/dy)` with coprime `f`, `g`.
    pub fn normalize(&self) -> Result<NormalizedDerivation, DerivationError> {
        if self.is_zero() {
            return Err(DerivationError::ZeroDerivation);
        }
        let field = self.field();
        let vars = self.vars().clone();
        let (nx, dx) = (self.coeff[0].num().clone(), self.coeff[0].den().clone());
        let (ny, dy) = (self.coeff[1].num().clone(), self.coeff[1].den().clone());
        // common denominator D = dx*dy/gcd
        let g_den = Poly::gcd(&dx, &dy)?;
        let f0 = nx.mul(&dy.div_exact(&g_den)?);
        let g0 = ny.mul(&dx.div_exact(&g_den)?);
        let den = dx.mul(&dy.div_exact(&g_den)?);
        let c = Poly::gcd(&f0, &g0)?;
        let mut f = f0.div_exact(&c)?;
        let mut g = g0.div_exact(&c)?;
        let mut content = RatFunc::new(c, den)?;
        // fix the scalar: leading coefficient of f (or g when f = 0) is 1
        let lead = if f.is_zero() { g.leading_coeff() } else { f.leading_coeff() };
        if lead != 1 {
            let inv = field.inv(lead).unwrap();
            f = f.scale(inv);
            g = g.scale(inv);
            content = content.scale(lead);
        }
        debug_assert_eq!(content.mul(&RatFunc::from_poly(f.clone())), self.coeff[0]);
        debug_assert_eq!(content.mul(&RatFunc::from_poly(g.clone())), self.coeff[1]);
        let _ = vars;
        Ok(NormalizedDerivation { content, f, g })
    }

    /// The p-th iterate, determined by its values on the two coordinates
    /// (in characteristic p the p-fold composite is again a derivation).
    pub fn power_p(&self) -> Result<Derivation, DerivationError> {
        let p = self.field().p();
        let x = RatFunc::var(self.field(), self.vars().clone(), &self.vars()[0])?;
        let y = RatFunc::var(self.field(), self.vars().clone(), &self.vars()[1])?;
        let mut vx = x;
        let mut vy = y;
        for _ in 0..p {
            vx = self.apply(&vx)?;
            vy = self.apply(&vy)?;
        }
        Ok(Derivation::raw(self.chart.clone(), vx, vy))
    }

    /// The witness `h` with `delta^p = h * delta`, when it exists. `h = 0`
    /// exactly when the derivation is nilpotent. Decided by cross
    /// multiplication against the normalized coprime coefficients, so no
    /// rational-function division is involved in the test itself.
    pub fn p_closed_witness(&self) -> Result<Option<RatFunc>, DerivationError> {
        let pw = self.power_p()?;
        let norm = self.normalize()?;
        let f = RatFunc::from_poly(norm.f.clone());
        let g = RatFunc::from_poly(norm.g.clone());
        // delta^p = h*delta iff delta^p(x)*g == delta^p(y)*f, with h read off
        // against a nonzero coefficient.
        if pw.coeff[0].mul(&g) != pw.coeff[1].mul(&f) {
            return Ok(None);
        }
        let h = if !norm.f.is_zero() {
            pw.coeff[0].div(&norm.content.mul(&f))?
        } else {
            pw.coeff[1].div(&norm.content.mul(&g))?
        };
        Ok(Some(h))
    }

    /// True iff `delta^p = 0`. Only meaningful for p-closed derivations.
    pub fn is_nilpotent(&self) -> Result<bool, DerivationError> {
        match self.p_closed_witness()? {
            None => Err(DerivationError::NotPClosed),
            Some(h) => Ok(h.is_zero()),
        }
    }

    /// True iff `delta^p = delta`.
    pub fn is_multiplicative_identity_witness(&self) -> Result<bool, DerivationError> {
        let pw = self.power_p()?;
        Ok(pw.coeff[0] == self.coeff[0] && pw.coeff[1] == self.coeff[1])
    }

    /// The splitting projector `r -> r - delta^(p-1)(r)`, defined when
    /// `delta^p = delta`. The image lies in the kernel of `delta`, the kernel
    /// is fixed pointwise, and the map is linear over the kernel subring.
    pub fn splitting_projector(&self, r: &Poly) -> Result<Poly, DerivationError> {
        if !self.is_multiplicative_identity_witness()? {
            return Err(DerivationError::ProjectorUndefined);
        }
        let p = self.field().p();
        let mut acc = RatFunc::from_poly(r.clone());
        for _ in 0..p - 1 {
            acc = self.apply(&acc)?;
        }
        let out = RatFunc::from_poly(r.clone()).sub(&acc);
        out.as_poly()
            .cloned()
            .ok_or(DerivationError::NonPolynomialResult)
    }

    /// Re-express in new coordinates. `new_in_old` gives each new coordinate
    /// as a function of the old ones; `old_in_new` is the inverse data. The
    /// result has coefficient `i` equal to `delta(new_i)` rewritten in the new
    /// coordinates.
    pub fn rewrite_coordinates(
        &self,
        new_chart: &str,
        new_in_old: &[RatFunc; 2],
        old_in_new: &[RatFunc; 2],
    ) -> Result<Derivation, DerivationError> {
        let mut coeff = Vec::with_capacity(2);
        for expr in new_in_old {
            let d = self.apply(expr)?;
            coeff.push(d.substitute(old_in_new)?);
        }
        Ok(Derivation::raw(
            new_chart,
            coeff.remove(0),
            coeff.remove(0),
        ))
    }

    /// Text form `f dx + g dy @ chart`.
    pub fn render(&self) -> String {
        let vars = self.vars();
        let part = |c: &RatFunc, v: &str| -> Option<String> {
            if c.is_zero() {
                return None;
            }
            if c.num().num_terms() == 1 && c.is_polynomial() {
                Some(format!("{} d{}", c, v))
            } else {
                Some(format!("({}) d{}", c, v))
            }
        };
        let parts: Vec<String> = [part(&self.coeff[0], &vars[0]), part(&self.coeff[1], &vars[1])]
            .into_iter()
            .flatten()
            .collect();
        let body = if parts.is_empty() {
            "0".to_string()
        } else {
            parts.join(" + ")
        };
        format!("{} @ {}", body, self.chart)
    }
}

impl NormalizedDerivation {
    /// The content-free representative `f d/dx + g d/dy` in the equivalence
    /// class (same kernel, same quotient).
    pub fn representative(&self, chart: &str) -> Derivation {
        Derivation::raw(
            chart,
            RatFunc::from_poly(self.f.clone()),
            RatFunc::from_poly(self.g.clone()),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::varset;

    fn field(p: u64) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    fn deriv(p: u64, vars: &[&str], text: &str) -> Derivation {
        Derivation::parse(text, field(p), varset(vars), "U0").unwrap()
    }

    fn rf(p: u64, vars: &[&str], text: &str) -> RatFunc {
        parse::parse_ratfunc(text, field(p), varset(vars)).unwrap()
    }

    #[test]
    fn euler_scales_by_total_degree() {
        let d = deriv(3, &["x", "y"], "x dx + y dy");
        let r = rf(3, &["x", "y"], "x^2*y");
        assert!(d.apply(&r).unwrap().is_zero()); // degree 3 = 0 mod 3
        let s = rf(3, &["x", "y"], "y/x");
        assert!(d.apply(&s).unwrap().is_zero()); // degree 0
    }

    #[test]
    fn squares_are_killed_char2() {
        let d = deriv(2, &["x", "y"], "x*y^2 dx + (x^2 + y^3) dy");
        let r = rf(2, &["x", "y"], "x^2");
        assert!(d.apply(&r).unwrap().is_zero());
    }

    #[test]
    fn normalize_examples() {
        // -z dz on the (z, w) chart: content -z, f = 1, g = 0
        let d = deriv(3, &["z", "w"], "-z dz");
        let n = d.normalize().unwrap();
        assert_eq!(n.content, rf(3, &["z", "w"], "-z"));
        assert!(n.f.is_one());
        assert!(n.g.is_zero());

        // (1/z)(w^2 dz + dw): content 1/z, f = w^2, g = 1
        let d = deriv(2, &["z", "w"], "(1/z)(w^2 dz + dw)");
        let n = d.normalize().unwrap();
        assert_eq!(n.content, rf(2, &["z", "w"], "1/z"));
        assert_eq!(n.f.to_string(), "w^2");
        assert!(n.g.is_one());

        // already coprime polynomials
        let d = deriv(5, &["x", "y"], "x dx + y dy");
        let n = d.normalize().unwrap();
        assert!(n.content.is_polynomial() && n.content.num().is_one());
        assert_eq!(n.f.to_string(), "x");
        assert_eq!(n.g.to_string(), "y");
    }

    #[test]
    fn power_p_examples() {
        let d = deriv(5, &["x", "y"], "dx");
        assert!(d.power_p().unwrap().is_zero());

        for i in 0..3 {
            let d = deriv(3, &["x", "y"], &format!("x dx + {i}*y dy"));
            let pw = d.power_p().unwrap();
            assert_eq!(pw, Derivation::raw("U0", d.coeff[0].clone(), d.coeff[1].clone()));
        }

        let d = deriv(2, &["x", "y"], "x^2 dx + y^2 dy");
        assert!(d.power_p().unwrap().is_zero());
    }

    #[test]
    fn p_closed_witnesses() {
        let d = deriv(5, &["x", "y"], "x dx + y dy");
        let h = d.p_closed_witness().unwrap().unwrap();
        assert_eq!(h, rf(5, &["x", "y"], "1"));

        let d = deriv(2, &["x", "y"], "x*y^2 dx + (x^2 + y^3) dy");
        let h = d.p_closed_witness().unwrap().unwrap();
        assert_eq!(h, rf(2, &["x", "y"], "y^2"));

        let d = deriv(2, &["x", "y"], "dx + x*y^2 dy");
        assert_eq!(d.p_closed_witness().unwrap(), None);
    }

    #[test]
    fn nilpotency() {
        assert!(deriv(3, &["x", "y"], "dx").is_nilpotent().unwrap());
        assert!(!deriv(3, &["x", "y"], "x dx + y dy").is_nilpotent().unwrap());
        assert!(deriv(2, &["x", "y"], "x^2 dx + y^2 dy").is_nilpotent().unwrap());
        assert_eq!(
            deriv(2, &["x", "y"], "dx + x*y^2 dy").is_nilpotent(),
            Err(DerivationError::NotPClosed)
        );
    }

    #[test]
    fn projector_on_euler_f3() {
        let d = deriv(3, &["x", "y"], "x dx + y dy");
        let f = field(3);
        let v = varset(&["x", "y"]);
        let x = Poly::var(f, v.clone(), "x").unwrap();
        assert!(d.splitting_projector(&x).unwrap().is_zero());
        let x2y = crate::parse::parse_poly("x^2*y", f, v.clone()).unwrap();
        assert_eq!(d.splitting_projector(&x2y).unwrap(), x2y);
        let one = Poly::one(f, v);
        assert_eq!(d.splitting_projector(&one).unwrap(), one);
    }

    #[test]
    fn projector_rejects_non_multiplicative() {
        let d = deriv(2, &["x", "y"], "x^2 dx + y^2 dy");
        let one = Poly::one(field(2), varset(&["x", "y"]));
        assert_eq!(
            d.splitting_projector(&one),
            Err(DerivationError::ProjectorUndefined)
        );
    }

    #[test]
    fn equivalence_normalizes_identically() {
        let d = deriv(5, &["x", "y"], "x dx + y dy");
        let beta = rf(5, &["x", "y"], "(x^2 + 3)/(y)");
        let scaled = d.scale(&beta);
        let (n1, n2) = (d.normalize().unwrap(), scaled.normalize().unwrap());
        assert_eq!(n1.f, n2.f);
        assert_eq!(n1.g, n2.g);
    }

    #[test]
    fn power_p_is_a_derivation_leibniz() {
        let d = deriv(3, &["x", "y"], "x^2 dx + (y + 1) dy");
        let pw = d.power_p().unwrap();
        let a = rf(3, &["x", "y"], "x + 2*y");
        let b = rf(3, &["x", "y"], "x*y + 1");
        let lhs = pw.apply(&a.mul(&b)).unwrap();
        let rhs = pw.apply(&a).unwrap().mul(&b).add(&pw.apply(&b).unwrap().mul(&a));
        assert_eq!(lhs, rhs);
    }
}
