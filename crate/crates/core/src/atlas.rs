//! The projective plane and the Hirzebruch surfaces as glued affine charts.
//!
//! Every chart coordinate is a monomial on the common torus, so transition
//! maps are monomial substitutions and the cocycle condition holds by
//! construction. The module transports derivations between charts, computes
//! orders of the derivation divisor along the toric boundary, runs the
//! global-section normal-form test, and locates the singular locus of the
//! corresponding foliation over small extensions of the base field.

use serde::Serialize;
use thiserror::Error;

use crate::classify::NormalFormCoefficients;
use crate::derivation::{Derivation, DerivationError};
use crate::extfield::{ExtElem, ExtField};
use crate::field::PrimeField;
use crate::poly::{varset, Poly, PolyError, VarSet};
use crate::ratfunc::RatFunc;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AtlasError {
    #[error("unknown chart `{0}`")]
    UnknownChart(String),
    #[error("derivation is attached to chart `{got}`, expected `{expected}`")]
    WrongChart { expected: String, got: String },
    #[error("common zero locus of the coefficients has positive dimension")]
    NonIsolatedSingularities,
    #[error(transparent)]
    Derivation(#[from] DerivationError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SurfaceKind {
    ProjPlane,
    Hirzebruch(u32),
}

impl std::fmt::Display for SurfaceKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SurfaceKind::ProjPlane => write!(f, "p2"),
            SurfaceKind::Hirzebruch(d) => write!(f, "hirzebruch:{d}"),
        }
    }
}

/// An affine chart: two named coordinates, each a Laurent monomial in the
/// torus coordinates of the first chart.
#[derive(Debug, Clone)]
pub struct Chart {
    pub id: String,
    pub vars: VarSet,
    /// Rows are the torus exponent vectors of the two coordinates; the matrix
    /// is unimodular.
    pub exps: [[i64; 2]; 2],
}

#[derive(Debug, Clone)]
pub struct SurfaceAtlas {
    pub kind: SurfaceKind,
    pub field: PrimeField,
    charts: Vec<Chart>,
}

/// Order of the derivation divisor along each toric boundary divisor.
#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct BoundaryOrders {
    pub orders: Vec<(String, i64)>,
}

/// One point of the foliation singular locus, reported in the first chart
/// that contains it.
#[derive(Debug, Clone, Serialize)]
pub struct SingularPoint {
    pub chart: String,
    pub coords: [ExtElem; 2],
    pub coords_text: [String; 2],
    /// Degree of the smallest field F_{p^k} containing both coordinates.
    pub field_degree: u32,
}

#[derive(Debug, Clone, Serialize)]
pub struct SingularLocusReport {
    pub extension_bound: u32,
    /// Deduplicated points, each listed in the first chart containing it.
    pub points: Vec<SingularPoint>,
    /// Per chart, the degree of the resultant factor whose roots were not
    /// located within the extension bound.
    pub residuals: Vec<(String, u32)>,
}

impl SurfaceAtlas {
    pub fn new(kind: SurfaceKind, field: PrimeField) -> SurfaceAtlas {
        let charts = match kind {
            SurfaceKind::ProjPlane => vec![
                Chart {
                    id: "U0".into(),
                    vars: varset(&["x", "y"]),
                    exps: [[1, 0], [0, 1]],
                },
                Chart {
                    id: "U1".into(),
                    vars: varset(&["z", "w"]),
                    exps: [[-1, 0], [-1, 1]],
                },
                Chart {
                    id: "U2".into(),
                    vars: varset(&["u", "v"]),
                    exps: [[0, -1], [1, -1]],
                },
            ],
            SurfaceKind::Hirzebruch(d) => {
                let d = d as i64;
                vec![
                    Chart {
                        id: "U1".into(),
                        vars: varset(&["x", "y"]),
                        exps: [[1, 0], [0, 1]],
                    },
                    Chart {
                        id: "U2".into(),
                        vars: varset(&["z", "w"]),
                        exps: [[d, 1], [-1, 0]],
                    },
                    Chart {
                        id: "U3".into(),
                        vars: varset(&["s", "t"]),
                        exps: [[-1, 0], [-d, -1]],
                    },
                    Chart {
                        id: "U4".into(),
                        vars: varset(&["u", "v"]),
                        exps: [[0, -1], [1, 0]],
                    },
                ]
            }
        };
        SurfaceAtlas { kind, field, charts }
    }

    pub fn charts(&self) -> &[Chart] {
        &self.charts
    }

    pub fn chart(&self, id: &str) -> Result<&Chart, AtlasError> {
        self.charts
            .iter()
            .find(|c| c.id == id)
            .ok_or_else(|| AtlasError::UnknownChart(id.to_string()))
    }

    pub fn primary_chart(&self) -> &Chart {
        &self.charts[0]
    }

    /// The ray of the fan dual to this chart's coordinate pair: chart
    /// coordinates are the dual basis of the cone's primitive generators.
    pub fn chart_cone_rays(&self, id: &str) -> Result<[[i64; 2]; 2], AtlasError> {
        let c = self.chart(id)?;
        // rows m1, m2; the dual basis n1, n2 satisfies <m_i, n_j> = delta_ij,
        // i.e. N = (M^T)^{-1} column-wise; for unimodular integer M this is
        // integral.
        let m = c.exps;
        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        assert!(det == 1 || det == -1, "chart matrix must be unimodular");
        let n1 = [m[1][1] * det, -m[1][0] * det];
        let n2 = [-m[0][1] * det, m[0][0] * det];
        debug_assert_eq!(m[0][0] * n1[0] + m[0][1] * n1[1], 1);
        debug_assert_eq!(m[1][0] * n1[0] + m[1][1] * n1[1], 0);
        debug_assert_eq!(m[0][0] * n2[0] + m[0][1] * n2[1], 0);
        debug_assert_eq!(m[1][0] * n2[0] + m[1][1] * n2[1], 1);
        Ok([n1, n2])
    }

    /// Coordinates of chart `to` expressed as Laurent monomials in the
    /// coordinates of chart `from`.
    pub fn transition(&self, from: &str, to: &str) -> Result<[RatFunc; 2], AtlasError> {
        let a = self.chart(from)?;
        let b = self.chart(to)?;
        let ma = a.exps;
        let det = ma[0][0] * ma[1][1] - ma[0][1] * ma[1][0];
        assert!(det == 1 || det == -1);
        let mut out = Vec::with_capacity(2);
        for row in b.exps {
            // solve n * MA = row  =>  n = row * MA^{-1}
            let n0 = (row[0] * ma[1][1] - row[1] * ma[1][0]) / det;
            let n1 = (-row[0] * ma[0][1] + row[1] * ma[0][0]) / det;
            out.push(self.monomial(a, [n0, n1]));
        }
        let mut it = out.into_iter();
        Ok([it.next().unwrap(), it.next().unwrap()])
    }

    fn monomial(&self, chart: &Chart, exps: [i64; 2]) -> RatFunc {
        let mut num = vec![0u32; 2];
        let mut den = vec![0u32; 2];
        for (i, e) in exps.iter().enumerate() {
            if *e >= 0 {
                num[i] = *e as u32;
            } else {
                den[i] = (-e) as u32;
            }
        }
        let n = Poly::from_terms(self.field, chart.vars.clone(), [(num, 1u64)]);
        let d = Poly::from_terms(self.field, chart.vars.clone(), [(den, 1u64)]);
        RatFunc::new(n, d).unwrap()
    }

    /// Re-express a derivation in the coordinates of another chart.
    pub fn transport(&self, delta: &Derivation, to: &str) -> Result<Derivation, AtlasError> {
        let from = delta.chart().to_string();
        self.chart(&from)?;
        if from == to {
            return Ok(delta.clone());
        }
        let new_in_old = self.transition(&from, to)?;
        let old_in_new = self.transition(to, &from)?;
        Ok(delta.rewrite_coordinates(to, &new_in_old, &old_in_new)?)
    }

    /// Boundary divisors as (name, [(chart id, local coordinate index); 2]).
    /// Each divisor is cut out by a chart coordinate in exactly two charts.
    pub fn boundary_divisors(&self) -> Vec<(String, [(String, usize); 2])> {
        match self.kind {
            SurfaceKind::ProjPlane => vec![
                ("x=0".into(), [("U0".into(), 0), ("U2".into(), 1)]),
                ("y=0".into(), [("U0".into(), 1), ("U1".into(), 1)]),
                ("z=0".into(), [("U1".into(), 0), ("U2".into(), 0)]),
            ],
            SurfaceKind::Hirzebruch(_) => vec![
                ("D1".into(), [("U1".into(), 1), ("U2".into(), 0)]),
                ("D2".into(), [("U1".into(), 0), ("U4".into(), 1)]),
                ("D3".into(), [("U4".into(), 0), ("U3".into(), 1)]),
                ("D4".into(), [("U2".into(), 1), ("U3".into(), 0)]),
            ],
        }
    }

    /// Order of the derivation divisor along each boundary divisor, computed
    /// from the content of the normalized expression in a chart containing
    /// the divisor.
    pub fn boundary_orders(&self, delta: &Derivation) -> Result<BoundaryOrders, AtlasError> {
        self.boundary_orders_from(delta, 0)
    }

    /// Same, reading each divisor from its `which`-th (0 or 1) carrying chart.
    pub fn boundary_orders_from(
        &self,
        delta: &Derivation,
        which: usize,
    ) -> Result<BoundaryOrders, AtlasError> {
        let mut orders = Vec::new();
        for (name, charts) in self.boundary_divisors() {
            let (chart, var_idx) = &charts[which];
            let local = self.transport(delta, chart)?;
            let n = local.normalize()?;
            orders.push((name, n.content.order_along(*var_idx)));
        }
        Ok(BoundaryOrders { orders })
    }

    /// Degree n with `O(div delta)` isomorphic to `O(n)` on the projective
    /// plane: the boundary orders of the content-free representative, summed
    /// over the three lines (all linearly equivalent to a line).
    pub fn foliation_degree_p2(&self, delta: &Derivation) -> Result<i64, AtlasError> {
        assert_eq!(self.kind, SurfaceKind::ProjPlane);
        let first = self.primary_chart().id.clone();
        let local = self.transport(delta, &first)?;
        let rep = local.normalize()?.representative(&first);
        let orders = self.boundary_orders(&rep)?;
        Ok(orders.orders.iter().map(|(_, o)| o).sum())
    }

    /// Global-section shape test on a Hirzebruch surface. Returns the
    /// coefficient record when the normalized coprime coefficients match the
    /// section normal form, `None` otherwise; `None` certifies that the
    /// foliation sheaf has no nonzero global section.
    pub fn normal_form_check(
        &self,
        delta: &Derivation,
    ) -> Result<Option<NormalFormCoefficients>, AtlasError> {
        let d = match self.kind {
            SurfaceKind::Hirzebruch(d) => d,
            SurfaceKind::ProjPlane => panic!("normal_form_check applies to Hirzebruch surfaces"),
        };
        let local = self.transport(delta, "U1")?;
        let n = local.normalize()?;
        let (f, g) = (&n.f, &n.g);
        let field = self.field;
        let vars = f.vars().clone();

        // f must be a univariate quadratic in x
        let shape_f = |f: &Poly| -> Option<(u64, u64, u64)> {
            if f.degree_in(1) > 0 || f.degree_in(0) > 2 {
                return None;
            }
            Some((f.coeff(&[2, 0]), f.coeff(&[1, 0]), f.coeff(&[0, 0])))
        };

        if d == 0 {
            if f.is_zero() {
                return Ok(Some(NormalFormCoefficients::Product {
                    a: [0, 0, 0],
                    b: [0, 1, 0],
                }));
            }
            if g.is_zero() {
                return Ok(Some(NormalFormCoefficients::Product {
                    a: [1, 0, 0],
                    b: [0, 0, 0],
                }));
            }
            let (a2, a1, a0) = match shape_f(f) {
                Some(t) => t,
                None => return Ok(None),
            };
            if g.degree_in(0) > 0 || g.degree_in(1) > 2 {
                return Ok(None);
            }
            return Ok(Some(NormalFormCoefficients::Product {
                a: [a0, a1, a2],
                b: [g.coeff(&[0, 0]), g.coeff(&[0, 1]), g.coeff(&[0, 2])],
            }));
        }

        if f.is_zero() {
            // delta ~ d/dy
            let mut fc = vec![0u64; (d + 1) as usize];
            let _ = &mut fc;
            return Ok(Some(NormalFormCoefficients::Hirzebruch {
                d,
                a2: 0,
                a1: 0,
                a0: 0,
                b: 1,
                f: vec![0; (d + 1) as usize],
            }));
        }
        if g.is_zero() {
            // delta ~ d/dx
            return Ok(Some(NormalFormCoefficients::Hirzebruch {
                d,
                a2: 0,
                a1: 0,
                a0: 1,
                b: 0,
                f: vec![0; (d + 1) as usize],
            }));
        }
        let (a2, a1, a0) = match shape_f(f) {
            Some(t) => t,
            None => return Ok(None),
        };
        // g must be F(x) y^2 + (-d a2 x + b) y with deg F <= d
        if g.degree_in(1) > 2 {
            return Ok(None);
        }
        let g_coeffs = g.coeffs_in(1); // coefficients of y^0, y^1, y^2
        if !g_coeffs[0].is_zero() {
            return Ok(None);
        }
        let lin = g_coeffs.get(1).cloned().unwrap_or_else(|| Poly::zero(field, vars.clone()));
        let quad = g_coeffs.get(2).cloned().unwrap_or_else(|| Poly::zero(field, vars.clone()));
        if lin.degree_in(0) > 1 || quad.degree_in(0) > d {
            return Ok(None);
        }
        let da2 = field.mul(field.reduce(d as u64), a2);
        if lin.coeff(&[1, 0]) != field.neg(da2) {
            return Ok(None);
        }
        let b = lin.coeff(&[0, 0]);
        let fvec: Vec<u64> = (0..=d).map(|j| quad.coeff(&[j, 0])).collect();
        Ok(Some(NormalFormCoefficients::Hirzebruch { d, a2, a1, a0, b, f: fvec }))
    }

    /// Locate the common zeros of the normalized coefficients in every chart,
    /// over extensions F_{p^k} with k up to the bound; points are
    /// deduplicated across charts.
    pub fn singular_locus(
        &self,
        delta: &Derivation,
        extension_bound: u32,
    ) -> Result<SingularLocusReport, AtlasError> {
        let mut points: Vec<SingularPoint> = Vec::new();
        let mut residuals = Vec::new();
        for (ci, chart) in self.charts.iter().enumerate() {
            let local = self.transport(delta, &chart.id)?;
            let n = local.normalize()?;
            let (f, g) = (n.f.clone(), n.g.clone());
            if !f.is_zero() && !g.is_zero() {
                let gcd = Poly::gcd(&f, &g)?;
                if !gcd.is_constant() {
                    return Err(AtlasError::NonIsolatedSingularities);
                }
            }
            // A vanishing coefficient pair component: (f, 0) has
            // common zeros only where f = 0 = 0, i.e. the locus f = 0 is not
            // zero-dimensional; but normalize gives coprime output so one of
            // them being zero forces the other to be a unit multiple, hence
            // no common zeros.
            if f.is_zero() || g.is_zero() {
                residuals.push((chart.id.clone(), 0));
                continue;
            }
            if f.is_constant() || g.is_constant() {
                residuals.push((chart.id.clone(), 0));
                continue;
            }
            // Resultant in y, a univariate polynomial in x.
            let res = resultant_in_y(&f, &g)?;
            let res_coeffs = univariate_coeffs(&res, 0);
            let res_deg = res_coeffs.len().saturating_sub(1) as u32;
            let mut located: u32 = 0;
            for k in 1..=extension_bound {
                let ext = ExtField::new(self.field, k);
                for xi in ext.elements() {
                    if !ext.is_zero(&ext.eval_poly(&res_coeffs, &xi)) {
                        continue;
                    }
                    let dx = ext.min_subfield_degree(&xi);
                    if dx == k {
                        // multiplicity of this root, counted once per
                        // conjugacy class representative found at level k
                        located += root_multiplicity(&ext, &res_coeffs, &xi);
                    }
                    for eta in ext.elements() {
                        let deg_pt = lcm(dx, ext.min_subfield_degree(&eta));
                        if deg_pt != k {
                            continue; // found at a smaller level already
                        }
                        if !ext.is_zero(&eval2(&f, &ext, &xi, &eta))
                            || !ext.is_zero(&eval2(&g, &ext, &xi, &eta))
                        {
                            continue;
                        }
                        // dedupe across charts: skip when an earlier chart
                        // also contains the point
                        if self.visible_in_earlier_chart(ci, &ext, &xi, &eta) {
                            continue;
                        }
                        points.push(SingularPoint {
                            chart: chart.id.clone(),
                            coords: [xi.clone(), eta.clone()],
                            coords_text: [ext.render(&xi), ext.render(&eta)],
                            field_degree: k,
                        });
                    }
                }
            }
            residuals.push((chart.id.clone(), res_deg.saturating_sub(located)));
        }
        Ok(SingularLocusReport {
            extension_bound,
            points,
            residuals,
        })
    }

    /// True when the point (given in chart `ci`) lies in some chart with a
    /// smaller index, i.e. all transition monomials to that chart are defined.
    fn visible_in_earlier_chart(&self, ci: usize, ext: &ExtField, x: &ExtElem, y: &ExtElem) -> bool {
        let a = &self.charts[ci];
        let ma = a.exps;
        let det = ma[0][0] * ma[1][1] - ma[0][1] * ma[1][0];
        for b in &self.charts[..ci] {
            let mut ok = true;
            for row in b.exps {
                let n0 = (row[0] * ma[1][1] - row[1] * ma[1][0]) / det;
                let n1 = (-row[0] * ma[0][1] + row[1] * ma[0][0]) / det;
                if (n0 < 0 && ext.is_zero(x)) || (n1 < 0 && ext.is_zero(y)) {
                    ok = false;
                    break;
                }
            }
            if ok {
                return true;
            }
        }
        false
    }
}

fn lcm(a: u32, b: u32) -> u32 {
    fn gcd(a: u32, b: u32) -> u32 {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }
    a / gcd(a, b) * b
}

/// Evaluate a two-variable polynomial at a point with extension-field
/// coordinates.
pub fn eval2(p: &Poly, ext: &ExtField, x: &ExtElem, y: &ExtElem) -> ExtElem {
    let mut acc = ext.zero();
    for (m, c) in p.terms_desc() {
        let mut t = ext.from_base(c);
        if m.0[0] > 0 {
            t = ext.mul(&t, &ext.pow(x, m.0[0] as u64));
        }
        if m.0[1] > 0 {
            t = ext.mul(&t, &ext.pow(y, m.0[1] as u64));
        }
        acc = ext.add(&acc, &t);
    }
    acc
}

/// Dense coefficient vector of a polynomial that only involves `vars[idx]`.
pub fn univariate_coeffs(p: &Poly, idx: usize) -> Vec<u64> {
    let d = p.degree_in(idx) as usize;
    let mut out = vec![0u64; d + 1];
    for (m, c) in p.terms_desc() {
        debug_assert!(m.0.iter().enumerate().all(|(i, &e)| i == idx || e == 0));
        out[m.0[idx] as usize] = c;
    }
    out
}

fn root_multiplicity(ext: &ExtField, coeffs: &[u64], root: &ExtElem) -> u32 {
    // repeated synthetic division by (t - root) over the extension field
    let mut c: Vec<ExtElem> = coeffs.iter().map(|&v| ext.from_base(v)).collect();
    let mut mult = 0;
    loop {
        // evaluate and divide
        let mut rem = ext.zero();
        let mut q: Vec<ExtElem> = Vec::with_capacity(c.len().saturating_sub(1));
        for v in c.iter().rev() {
            rem = ext.add(&ext.mul(&rem, root), v);
            q.push(rem.clone());
        }
        let eval = q.pop().unwrap_or_else(|| ext.zero());
        // q currently holds the Horner prefix; the division quotient is the
        // prefix without the final remainder, reversed.
        if !ext.is_zero(&eval) {
            return mult;
        }
        q.reverse();
        c = q;
        mult += 1;
        if c.is_empty() {
            return mult;
        }
    }
}

/// Resultant of two polynomials with respect to the second variable, via
/// fraction-free (Bareiss) elimination of the Sylvester matrix; the entries
/// are polynomials in the first variable.
pub fn resultant_in_y(f: &Poly, g: &Poly) -> Result<Poly, PolyError> {
    let field = f.field();
    let vars = f.vars().clone();
    let fy = f.degree_in(1) as usize;
    let gy = g.degree_in(1) as usize;
    if fy == 0 {
        // res_y(f, g) = f^deg_y(g)
        return Ok(f.pow(gy as u32));
    }
    if gy == 0 {
        return Ok(g.pow(fy as u32));
    }
    let fc = f.coeffs_in(1);
    let gc = g.coeffs_in(1);
    let n = fy + gy;
    let zero = Poly::zero(field, vars.clone());
    let mut m = vec![vec![zero.clone(); n]; n];
    for i in 0..gy {
        for (k, c) in fc.iter().rev().enumerate() {
            m[i][i + k] = c.clone();
        }
    }
    for i in 0..fy {
        for (k, c) in gc.iter().rev().enumerate() {
            m[gy + i][i + k] = c.clone();
        }
    }
    // Bareiss fraction-free elimination
    let mut sign = false;
    let mut denom = Poly::one(field, vars.clone());
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            let Some(r) = (k + 1..n).find(|&r| !m[r][k].is_zero()) else {
                return Ok(zero);
            };
            m.swap(k, r);
            sign = !sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let t = m[k][k].mul(&m[i][j]).sub(&m[i][k].mul(&m[k][j]));
                m[i][j] = t.div_exact(&denom)?;
            }
            m[i][k] = zero.clone();
        }
        denom = m[k][k].clone();
    }
    let det = m[n - 1][n - 1].clone();
    Ok(if sign { det.neg() } else { det })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(p: u64) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    fn p2(p: u64) -> SurfaceAtlas {
        SurfaceAtlas::new(SurfaceKind::ProjPlane, f(p))
    }

    fn hirz(p: u64, d: u32) -> SurfaceAtlas {
        SurfaceAtlas::new(SurfaceKind::Hirzebruch(d), f(p))
    }

    fn deriv(atlas: &SurfaceAtlas, chart: &str, text: &str) -> Derivation {
        let c = atlas.chart(chart).unwrap();
        Derivation::parse(text, atlas.field, c.vars.clone(), chart).unwrap()
    }

    #[test]
    fn euler_field_chart_expressions() {
        let atlas = p2(3);
        let d = deriv(&atlas, "U0", "x dx + y dy");
        let u1 = atlas.transport(&d, "U1").unwrap();
        assert_eq!(u1.render(), "2*z dz @ U1"); // -z dz
        let u2 = atlas.transport(&d, "U2").unwrap();
        assert_eq!(u2.render(), "2*u du @ U2"); // -u du
    }

    #[test]
    fn frobenius_square_example_chart_expression() {
        let atlas = p2(2);
        let d = deriv(&atlas, "U0", "x^2 dx + y^2 dy");
        let u1 = atlas.transport(&d, "U1").unwrap();
        // (1/z)(z dz + w(w+1) dw)
        let n = u1.normalize().unwrap();
        assert_eq!(n.content.to_string(), "1/(z)");
        assert_eq!(n.f.to_string(), "z");
        assert_eq!(n.g.to_string(), "w^2 + w");
    }

    #[test]
    fn hirzebruch_transport_example() {
        // x dx on H_d transports to d*z dz - w dw on the (z, w) chart
        for d in 1..=3u32 {
            let atlas = hirz(5, d);
            let del = deriv(&atlas, "U1", "x dx");
            let u2 = atlas.transport(&del, "U2").unwrap();
            let expect = deriv(&atlas, "U2", &format!("{} z dz - w dw", d));
            assert_eq!(u2, expect);
        }
    }

    #[test]
    fn transport_round_trip() {
        let atlas = hirz(3, 2);
        let del = deriv(&atlas, "U1", "(x^2 + 1) dx + (x*y^2 + 2*y) dy");
        for target in ["U2", "U3", "U4"] {
            let there = atlas.transport(&del, target).unwrap();
            let back = atlas.transport(&there, "U1").unwrap();
            assert_eq!(back, del);
        }
    }

    #[test]
    fn transition_cocycle() {
        let atlas = hirz(5, 3);
        // U1 -> U2 -> U3 equals U1 -> U3 on the torus
        let t12 = atlas.transition("U1", "U2").unwrap();
        let t23 = atlas.transition("U2", "U3").unwrap();
        let t13 = atlas.transition("U1", "U3").unwrap();
        for i in 0..2 {
            let composed = t23[i].substitute(&t12).unwrap();
            assert_eq!(composed, t13[i]);
        }
    }

    #[test]
    fn boundary_orders_p2_examples() {
        let atlas = p2(3);
        let euler = deriv(&atlas, "U0", "x dx + y dy");
        let orders = atlas.boundary_orders(&euler).unwrap();
        assert_eq!(
            orders.orders,
            vec![("x=0".into(), 0), ("y=0".into(), 0), ("z=0".into(), 1)]
        );
        assert_eq!(atlas.foliation_degree_p2(&euler).unwrap(), 1);

        let atlas2 = p2(2);
        let sq = deriv(&atlas2, "U0", "x^2 dx + y^2 dy");
        let orders = atlas2.boundary_orders(&sq).unwrap();
        assert_eq!(orders.orders[2], ("z=0".into(), -1));
        assert_eq!(atlas2.foliation_degree_p2(&sq).unwrap(), -1);
    }

    #[test]
    fn foliation_degree_diagonal_and_example4() {
        let atlas = p2(5);
        for i in [2u64, 3, 4] {
            let d = deriv(&atlas, "U0", &format!("x dx + {i}*y dy"));
            assert_eq!(atlas.foliation_degree_p2(&d).unwrap(), 0);
        }
        let atlas2 = p2(2);
        let e4 = deriv(&atlas2, "U0", "x*y^2 dx + (x^2 + y^3) dy");
        assert_eq!(atlas2.foliation_degree_p2(&e4).unwrap(), -1);
    }

    #[test]
    fn hirzebruch_boundary_orders_diagonal() {
        // generic diagonal: i and i + d nonzero mod p, so the content is a
        // unit in every chart
        let atlas = hirz(5, 2);
        let d = deriv(&atlas, "U1", "x dx + y dy");
        let orders = atlas.boundary_orders(&d).unwrap();
        assert!(orders.orders.iter().all(|(_, o)| *o == 0));
        // consistency from the other carrying chart
        let orders2 = atlas.boundary_orders_from(&d, 1).unwrap();
        assert_eq!(orders, orders2);
    }

    #[test]
    fn normal_form_check_examples() {
        let atlas = hirz(3, 1);
        let d = deriv(&atlas, "U1", "x dx + 2*y dy");
        let nf = atlas.normal_form_check(&d).unwrap().unwrap();
        assert_eq!(
            nf,
            NormalFormCoefficients::Hirzebruch {
                d: 1,
                a2: 0,
                a1: 1,
                a0: 0,
                b: 2,
                f: vec![0, 0],
            }
        );

        let atlas = hirz(5, 2);
        let d = deriv(&atlas, "U1", "dx - x*y^2 dy");
        let nf = atlas.normal_form_check(&d).unwrap().unwrap();
        assert_eq!(
            nf,
            NormalFormCoefficients::Hirzebruch {
                d: 2,
                a2: 0,
                a1: 0,
                a0: 1,
                b: 0,
                f: vec![0, 4, 0], // -x
            }
        );

        let d = deriv(&atlas, "U1", "x*y^2 dx + (x^2 + y^3) dy");
        assert_eq!(atlas.normal_form_check(&d).unwrap(), None);
    }

    #[test]
    fn singular_locus_p2_examples() {
        // Euler field: one point, the origin of U0
        let atlas = p2(3);
        let euler = deriv(&atlas, "U0", "x dx + y dy");
        let rep = atlas.singular_locus(&euler, 2).unwrap();
        assert_eq!(rep.points.len(), 1);
        assert_eq!(rep.points[0].chart, "U0");
        assert_eq!(rep.points[0].field_degree, 1);

        // diagonal: three chart origins
        let atlas = p2(5);
        let diag = deriv(&atlas, "U0", "x dx + 2*y dy");
        let rep = atlas.singular_locus(&diag, 2).unwrap();
        assert_eq!(rep.points.len(), 3);
        let charts: Vec<_> = rep.points.iter().map(|p| p.chart.as_str()).collect();
        assert_eq!(charts, vec!["U0", "U1", "U2"]);

        // char-2 square field: four points (one shared between U1 and U2)
        let atlas = p2(2);
        let sq = deriv(&atlas, "U0", "x^2 dx + y^2 dy");
        let rep = atlas.singular_locus(&sq, 2).unwrap();
        assert_eq!(rep.points.len(), 4);
    }

    #[test]
    fn singular_locus_example4() {
        let atlas = p2(2);
        let d = deriv(&atlas, "U0", "x*y^2 dx + (x^2 + y^3) dy");
        let rep = atlas.singular_locus(&d, 3).unwrap();
        assert_eq!(rep.points.len(), 1);
        assert_eq!(rep.points[0].chart, "U0");
        assert_eq!(rep.points[0].coords_text, ["0".to_string(), "0".to_string()]);
    }

    #[test]
    fn resultant_matches_common_roots() {
        let field = f(5);
        let v = varset(&["x", "y"]);
        let fp = crate::parse::parse_poly("x*y + 1", field, v.clone()).unwrap();
        let gp = crate::parse::parse_poly("y^2 + x", field, v.clone()).unwrap();
        let r = resultant_in_y(&fp, &gp).unwrap();
        // res_y(xy+1, y^2+x) = x^3 + 1 (up to sign)
        let c = univariate_coeffs(&r, 0);
        assert_eq!(c.len(), 4);
        // roots of r must be exactly x-coordinates of common zeros
        for x0 in 0..5u64 {
            let rx = r.eval(&[x0, 0]);
            let has_common = (0..5u64).any(|y0| fp.eval(&[x0, y0]) == 0 && gp.eval(&[x0, y0]) == 0);
            assert_eq!(rx == 0, has_common, "x0 = {x0}");
        }
    }
}
