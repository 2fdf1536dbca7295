//! Invariant rings of derivations by degree-truncated exact linear algebra:
//! graded kernel bases, minimal algebra generators, relation search, and
//! matching of hypersurface presentations against the rational double point
//! catalog used by the quotient classification.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::derivation::Derivation;
use crate::field::PrimeField;
use crate::linalg::{Matrix, SpanBasis};
use crate::poly::{varset, Monomial, Poly, VarSet};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum InvariantError {
    #[error("degree bound {bound} is below the characteristic {p}; the Frobenius generators would be missed")]
    BoundTooSmall { bound: u32, p: u64 },
    #[error("derivation has non-polynomial coefficients; normalize first")]
    NonPolynomialCoefficients,
    #[error("relation search supports at most 4 generators, got {0}")]
    TooManyGenerators(usize),
    #[error("generators must have positive degree")]
    ConstantGenerator,
}

/// Kernel of a derivation on the polynomial ring, filtered by total degree:
/// `slices[n]` holds the canonical new basis elements of degree n, so the
/// union of slices up to n spans the kernel intersected with polynomials of
/// degree at most n.
#[derive(Debug, Clone, PartialEq)]
pub struct GradedKernelBasis {
    pub degree_bound: u32,
    pub slices: Vec<Vec<Poly>>,
}

impl GradedKernelBasis {
    pub fn all_elements(&self) -> impl Iterator<Item = &Poly> {
        self.slices.iter().flatten()
    }

    pub fn dimension_up_to(&self, n: u32) -> usize {
        self.slices
            .iter()
            .take(n as usize + 1)
            .map(|s| s.len())
            .sum()
    }
}

/// Generators and relations of an invariant ring, truncated at a degree
/// bound. Relations are polynomials in fresh variables, one per generator.
#[derive(Debug, Clone, Serialize)]
pub struct AlgebraPresentation {
    pub generators: Vec<Poly>,
    pub relations: Vec<Poly>,
    pub degree_bound: u32,
    pub relation_bound: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum SingularityLabel {
    A1,
    D4Zero,
    E7Zero,
    Unrecognized(String),
}

impl fmt::Display for SingularityLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SingularityLabel::A1 => write!(f, "A_1"),
            SingularityLabel::D4Zero => write!(f, "D_4^0"),
            SingularityLabel::E7Zero => write!(f, "E_7^0"),
            SingularityLabel::Unrecognized(rel) => write!(f, "unrecognized ({rel})"),
        }
    }
}

fn monomials_up_to(vars: &VarSet, bound: u32) -> Vec<Monomial> {
    // all 2-variable monomials of total degree <= bound, graded-lex ascending
    assert_eq!(vars.len(), 2);
    let mut out = Vec::new();
    for d in 0..=bound {
        for i in 0..=d {
            out.push(Monomial(vec![i, d - i]));
        }
    }
    out.sort();
    out
}

fn poly_to_vec(p: &Poly, index: &std::collections::HashMap<Monomial, usize>, n: usize) -> Vec<u64> {
    let mut v = vec![0u64; n];
    for (m, c) in p.terms_desc() {
        v[index[m]] = c;
    }
    v
}

/// Exact kernel of `delta` on polynomials of total degree at most `bound`,
/// computed as a null space over F_p. The coefficients of `delta` must be
/// polynomials (use the normalized coprime representative). Requires
/// `bound >= p` so the Frobenius powers x^p, y^p are visible.
pub fn kernel_basis(delta: &Derivation, bound: u32) -> Result<GradedKernelBasis, InvariantError> {
    let field = delta.field();
    let p = field.p();
    if (bound as u64) < p {
        return Err(InvariantError::BoundTooSmall { bound, p });
    }
    let f = delta
        .coeff_x()
        .as_poly()
        .ok_or(InvariantError::NonPolynomialCoefficients)?
        .clone();
    let g = delta
        .coeff_y()
        .as_poly()
        .ok_or(InvariantError::NonPolynomialCoefficients)?
        .clone();
    let vars = delta.vars().clone();

    let source = monomials_up_to(&vars, bound);
    let max_coeff_deg = f.total_degree().max(g.total_degree());
    let target = monomials_up_to(&vars, bound + max_coeff_deg);
    let target_index: std::collections::HashMap<Monomial, usize> =
        target.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();

    // matrix of delta: rows = target monomials, columns = source monomials
    let mut m = Matrix::zero(field, target.len(), source.len());
    for (j, mono) in source.iter().enumerate() {
        let basis_poly = Poly::from_terms(field, vars.clone(), [(mono.0.clone(), 1u64)]);
        let image = f
            .mul(&basis_poly.partial_derivative_idx(0))
            .add(&g.mul(&basis_poly.partial_derivative_idx(1)));
        for (mm, c) in image.terms_desc() {
            m.set(target_index[mm], j, c);
        }
    }
    let null = m.null_space();

    // canonicalize: RREF over columns ordered graded-lex descending
    let ncols = source.len();
    let rows: Vec<Vec<u64>> = null
        .iter()
        .map(|v| (0..ncols).map(|j| v[ncols - 1 - j]).collect())
        .collect();
    let mut rref = Matrix::from_rows(field, rows);
    rref.rref();
    let mut slices: Vec<Vec<Poly>> = vec![Vec::new(); bound as usize + 1];
    for r in 0..rref.rows {
        let mut poly = Poly::zero(field, vars.clone());
        for j in 0..ncols {
            let c = rref.get(r, j);
            if c != 0 {
                poly = poly.add(&Poly::from_terms(
                    field,
                    vars.clone(),
                    [(source[ncols - 1 - j].0.clone(), c)],
                ));
            }
        }
        if poly.is_zero() {
            continue;
        }
        let deg = poly.total_degree() as usize;
        slices[deg].push(poly);
    }
    // within a slice, order by leading monomial descending for reproducibility
    for s in &mut slices {
        s.sort_by(|a, b| b.leading_term().unwrap().0.cmp(a.leading_term().unwrap().0));
    }
    Ok(GradedKernelBasis {
        degree_bound: bound,
        slices,
    })
}

/// Greedy minimal generator extraction by increasing degree: a kernel element
/// joins the generator set exactly when it lies outside the span of all
/// products of already chosen generators of total degree at most its own.
pub fn algebra_generators(basis: &GradedKernelBasis, field: PrimeField, vars: &VarSet) -> Vec<Poly> {
    let bound = basis.degree_bound;
    let monos = monomials_up_to(vars, bound);
    let index: std::collections::HashMap<Monomial, usize> =
        monos.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
    let dim = monos.len();

    let mut gens: Vec<Poly> = Vec::new();
    // all products of chosen generators (the empty product spans constants)
    let mut products: Vec<Poly> = vec![Poly::one(field, vars.clone())];
    let mut span = SpanBasis::new(field, dim);
    span.insert(&poly_to_vec(&products[0], &index, dim));
    // products of degree above the current level, deferred until reached
    let mut pending: std::collections::BTreeMap<u32, Vec<Poly>> = Default::default();

    for n in 1..=bound {
        if let Some(ps) = pending.remove(&n) {
            for p in ps {
                span.insert(&poly_to_vec(&p, &index, dim));
            }
        }
        for e in &basis.slices[n as usize] {
            let v = poly_to_vec(e, &index, dim);
            if span.contains(&v) {
                continue;
            }
            gens.push(e.clone());
            // extend the product list with e^k * q for every existing product
            let mut new_products = Vec::new();
            let old = products.clone();
            for q in &old {
                let mut acc = q.clone();
                loop {
                    acc = acc.mul(e);
                    if acc.is_zero() || acc.total_degree() > bound {
                        break;
                    }
                    new_products.push(acc.clone());
                }
            }
            for p in new_products {
                let deg = p.total_degree();
                if deg <= n {
                    span.insert(&poly_to_vec(&p, &index, dim));
                } else {
                    pending.entry(deg).or_default().push(p.clone());
                }
                products.push(p);
            }
        }
    }
    gens
}

pub const FORMAL_VARS: [&str; 4] = ["X", "Y", "Z", "W"];

fn formal_monomials(degrees: &[u32], bound: u32) -> Vec<Vec<u32>> {
    // exponent tuples e with sum(e_i * degrees_i) <= bound
    fn rec(degrees: &[u32], bound: u32, i: usize, current: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if i == degrees.len() {
            out.push(current.clone());
            return;
        }
        let mut e = 0u32;
        while e * degrees[i] <= bound {
            current.push(e);
            rec(degrees, bound - e * degrees[i], i + 1, current, out);
            current.pop();
            e += 1;
        }
    }
    let mut out = Vec::new();
    rec(degrees, bound, 0, &mut Vec::new(), &mut out);
    out
}

fn weighted_degree(exps: &[u32], degrees: &[u32]) -> u32 {
    exps.iter().zip(degrees).map(|(e, d)| e * d).sum()
}

/// Minimal-degree relations among the given generators, found as the exact
/// null space of the evaluation map from formal monomials of weighted degree
/// at most `bound`. Relations already implied by lower-degree ones (ideal
/// multiples) are dropped.
pub fn relation_search(gens: &[Poly], bound: u32) -> Result<Vec<Poly>, InvariantError> {
    if gens.len() > 4 {
        return Err(InvariantError::TooManyGenerators(gens.len()));
    }
    if gens.is_empty() {
        return Ok(Vec::new());
    }
    let field = gens[0].field();
    let chart_vars = gens[0].vars().clone();
    let degrees: Vec<u32> = gens.iter().map(|g| g.total_degree()).collect();
    if degrees.iter().any(|&d| d == 0) {
        return Err(InvariantError::ConstantGenerator);
    }
    let fvars: VarSet = varset(&FORMAL_VARS[..gens.len()]);

    // formal monomials sorted by (weighted degree, graded-lex) ascending
    let mut fmonos = formal_monomials(&degrees, bound);
    fmonos.sort_by(|a, b| {
        let (wa, wb) = (weighted_degree(a, &degrees), weighted_degree(b, &degrees));
        wa.cmp(&wb)
            .then_with(|| Monomial(a.clone()).cmp(&Monomial(b.clone())))
    });

    let chart_monos = monomials_up_to(&chart_vars, bound);
    let chart_index: std::collections::HashMap<Monomial, usize> = chart_monos
        .iter()
        .cloned()
        .enumerate()
        .map(|(i, m)| (m, i))
        .collect();
    let evals: Vec<Poly> = fmonos
        .iter()
        .map(|e| {
            let mut acc = Poly::one(field, chart_vars.clone());
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    acc = acc.mul(&gens[i].pow(k));
                }
            }
            acc
        })
        .collect();

    let fdim = fmonos.len();
    let findex: std::collections::HashMap<Vec<u32>, usize> = fmonos
        .iter()
        .cloned()
        .enumerate()
        .map(|(i, m)| (m, i))
        .collect();

    let formal_poly_to_vec = |p: &Poly| -> Vec<u64> {
        let mut v = vec![0u64; fdim];
        for (m, c) in p.terms_desc() {
            v[findex[&m.0]] = c;
        }
        v
    };

    let mut found: Vec<Poly> = Vec::new();
    let mut ideal_span = SpanBasis::new(field, fdim);

    let wdegs: Vec<u32> = fmonos.iter().map(|e| weighted_degree(e, &degrees)).collect();
    let mut levels: Vec<u32> = wdegs.clone();
    levels.sort_unstable();
    levels.dedup();

    for &level in &levels {
        // columns with weighted degree <= level, descending so the graded
        // leading term is the pivot
        let cols_desc: Vec<usize> = (0..fdim).rev().filter(|&i| wdegs[i] <= level).collect();
        let mut m = Matrix::zero(field, chart_monos.len(), cols_desc.len());
        for (j, &ci) in cols_desc.iter().enumerate() {
            for (mm, c) in evals[ci].terms_desc() {
                m.set(chart_index[mm], j, c);
            }
        }
        for v in m.null_space() {
            let mut rel = Poly::zero(field, fvars.clone());
            for (j, &ci) in cols_desc.iter().enumerate() {
                if v[j] != 0 {
                    rel = rel.add(&Poly::from_terms(
                        field,
                        fvars.clone(),
                        [(fmonos[ci].clone(), v[j])],
                    ));
                }
            }
            if rel.is_zero() {
                continue;
            }
            let vec = formal_poly_to_vec(&rel);
            if ideal_span.contains(&vec) {
                continue;
            }
            let rel = rel.monic();
            // grow the ideal span by all formal multiples within the bound
            for mult in &fmonos {
                let prod = rel.mul(&Poly::from_terms(
                    field,
                    fvars.clone(),
                    [(mult.clone(), 1u64)],
                ));
                if prod.terms_desc().all(|(m, _)| findex.contains_key(&m.0)) {
                    ideal_span.insert(&formal_poly_to_vec(&prod));
                }
            }
            found.push(rel);
        }
    }
    Ok(found)
}

/// The fixed catalog of hypersurface presentations recognized by
/// `match_presentation` (the characteristic-2 rational double points arising
/// from the quotient computations).
pub fn presentation_catalog(field: PrimeField, corrupt: bool) -> Vec<(SingularityLabel, Poly)> {
    let v = varset(&["X", "Y", "Z"]);
    let parse = |s: &str| crate::parse::parse_poly(s, field, v.clone()).unwrap();
    let d4 = if corrupt { "Z^2 + X^2*Y" } else { "Z^2 + X^2*Y + X*Y^2" };
    vec![
        (SingularityLabel::A1, parse("Z^2 + X*Y")),
        (SingularityLabel::D4Zero, parse(d4)),
        (SingularityLabel::E7Zero, parse("Z^2 + X^3 + X*Y^3")),
    ]
}

/// Match a single relation in three variables against the catalog, up to
/// variable permutation and overall nonzero scaling.
pub fn match_presentation(rel: &Poly) -> SingularityLabel {
    match_presentation_against(rel, &presentation_catalog(rel.field(), false))
}

pub fn match_presentation_against(
    rel: &Poly,
    catalog: &[(SingularityLabel, Poly)],
) -> SingularityLabel {
    assert_eq!(rel.vars().len(), 3, "presentation matching expects 3 variables");
    let field = rel.field();
    let perms: [[usize; 3]; 6] = [
        [0, 1, 2],
        [0, 2, 1],
        [1, 0, 2],
        [1, 2, 0],
        [2, 0, 1],
        [2, 1, 0],
    ];
    for perm in perms {
        let permuted = Poly::from_terms(
            field,
            rel.vars().clone(),
            rel.terms_desc().map(|(m, c)| {
                let mut exps = vec![0u32; 3];
                for (i, &e) in m.0.iter().enumerate() {
                    exps[perm[i]] = e;
                }
                (exps, c)
            }),
        );
        let candidate = permuted.monic();
        for (label, entry) in catalog {
            if candidate == *entry {
                return label.clone();
            }
        }
    }
    SingularityLabel::Unrecognized(rel.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::varset;

    fn field(p: u64) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    fn deriv(p: u64, text: &str) -> Derivation {
        Derivation::parse(text, field(p), varset(&["x", "y"]), "U1").unwrap()
    }

    fn pl(p: u64, s: &str) -> Poly {
        crate::parse::parse_poly(s, field(p), varset(&["x", "y"])).unwrap()
    }

    #[test]
    fn kernel_euler_p3_degree3_slice() {
        let d = deriv(3, "x dx + y dy");
        let kb = kernel_basis(&d, 3).unwrap();
        let got: Vec<String> = kb.slices[3].iter().map(|p| p.to_string()).collect();
        assert_eq!(got, vec!["x^3", "x^2*y", "x*y^2", "y^3"]);
    }

    #[test]
    fn kernel_ddx_truncated() {
        for p in [2u64, 3] {
            let d = deriv(p, "dx");
            let kb = kernel_basis(&d, p as u32).unwrap();
            for k in 1..p as usize {
                let got: Vec<String> = kb.slices[k].iter().map(|q| q.to_string()).collect();
                let expect = if k == 1 { "y".to_string() } else { format!("y^{k}") };
                assert_eq!(got, vec![expect]);
            }
            let top: Vec<String> = kb.slices[p as usize].iter().map(|q| q.to_string()).collect();
            assert_eq!(top, vec![format!("x^{p}"), format!("y^{p}")]);
        }
    }

    #[test]
    fn kernel_bound_too_small() {
        let d = deriv(5, "dx");
        assert!(matches!(
            kernel_basis(&d, 4),
            Err(InvariantError::BoundTooSmall { .. })
        ));
    }

    #[test]
    fn kernel_char2_square_field() {
        let d = deriv(2, "x^2 dx + y^2 dy");
        let kb = kernel_basis(&d, 3).unwrap();
        let have: Vec<String> = kb.all_elements().map(|p| p.to_string()).collect();
        assert!(have.contains(&"x^2".to_string()));
        assert!(have.contains(&"y^2".to_string()));
        assert!(have.contains(&"x^2*y + x*y^2".to_string()));
    }

    #[test]
    fn generators_euler_p2() {
        let d = deriv(2, "x dx + y dy");
        let kb = kernel_basis(&d, 4).unwrap();
        let gens = algebra_generators(&kb, field(2), &varset(&["x", "y"]));
        let got: Vec<String> = gens.iter().map(|p| p.to_string()).collect();
        assert_eq!(got, vec!["x^2", "x*y", "y^2"]);
    }

    #[test]
    fn generators_example_e7_input() {
        let d = deriv(2, "x*y^2 dx + (x^2 + y^3) dy");
        let kb = kernel_basis(&d, 6).unwrap();
        let gens = algebra_generators(&kb, field(2), &varset(&["x", "y"]));
        let got: Vec<String> = gens.iter().map(|p| p.to_string()).collect();
        assert_eq!(got, vec!["x^2", "y^2", "x*y^3 + x^3"]);
    }

    #[test]
    fn generators_ddy() {
        for p in [2u64, 3] {
            let d = deriv(p, "dy");
            let kb = kernel_basis(&d, 2 * p as u32).unwrap();
            let gens = algebra_generators(&kb, field(p), &varset(&["x", "y"]));
            let got: Vec<String> = gens.iter().map(|q| q.to_string()).collect();
            assert_eq!(got, vec!["x".to_string(), format!("y^{p}")]);
        }
    }

    #[test]
    fn relations_d4_and_e7() {
        let gens = vec![pl(2, "x^2"), pl(2, "y^2"), pl(2, "x^2*y + x*y^2")];
        let rels = relation_search(&gens, 6).unwrap();
        assert_eq!(rels.len(), 1);
        assert_eq!(rels[0].to_string(), "X^2*Y + X*Y^2 + Z^2");
        assert_eq!(match_presentation(&rels[0]), SingularityLabel::D4Zero);

        let gens = vec![pl(2, "x^2"), pl(2, "y^2"), pl(2, "x^3 + x*y^3")];
        let rels = relation_search(&gens, 8).unwrap();
        assert_eq!(rels.len(), 1);
        assert_eq!(rels[0].to_string(), "X*Y^3 + X^3 + Z^2");
        assert_eq!(match_presentation(&rels[0]), SingularityLabel::E7Zero);
    }

    #[test]
    fn relations_none_for_free_algebra() {
        for p in [2u64, 3] {
            let gens = vec![pl(p, &format!("x^{p}")), pl(p, "y")];
            let rels = relation_search(&gens, 3 * p as u32).unwrap();
            assert!(rels.is_empty());
        }
    }

    #[test]
    fn relation_substitution_vanishes() {
        let gens = vec![pl(2, "x^2"), pl(2, "y^2"), pl(2, "x^2*y + x*y^2")];
        let rels = relation_search(&gens, 6).unwrap();
        for rel in &rels {
            let image = rel.substitute_poly(&gens);
            assert!(image.is_zero(), "relation must vanish on the generators");
        }
    }

    #[test]
    fn a1_from_diagonal_quotient() {
        // k[x, y]^(x dx + y dy) at p = 2 is k[x^2, xy, y^2]: one quadric
        // relation, recognized as A_1
        let d = deriv(2, "x dx + y dy");
        let kb = kernel_basis(&d, 4).unwrap();
        let gens = algebra_generators(&kb, field(2), &varset(&["x", "y"]));
        let rels = relation_search(&gens, 4).unwrap();
        assert_eq!(rels.len(), 1);
        assert_eq!(match_presentation(&rels[0]), SingularityLabel::A1);
    }

    #[test]
    fn corrupted_catalog_fails_match() {
        let gens = vec![pl(2, "x^2"), pl(2, "y^2"), pl(2, "x^2*y + x*y^2")];
        let rels = relation_search(&gens, 6).unwrap();
        let catalog = presentation_catalog(field(2), true);
        assert!(matches!(
            match_presentation_against(&rels[0], &catalog),
            SingularityLabel::Unrecognized(_)
        ));
    }

    #[test]
    fn kernel_equivalence_under_scaling() {
        let d = deriv(3, "x^2 dx + (y^2 + x) dy");
        let beta =
            crate::parse::parse_ratfunc("(x + 1)/(y)", field(3), varset(&["x", "y"])).unwrap();
        let scaled = d.scale(&beta);
        let n1 = d.normalize().unwrap().representative("U1");
        let n2 = scaled.normalize().unwrap().representative("U1");
        let k1 = kernel_basis(&n1, 6).unwrap();
        let k2 = kernel_basis(&n2, 6).unwrap();
        assert_eq!(k1, k2);
    }
}
