//! Assembled reports: labeled singular points, the per-derivation sandwich
//! report, and the CLI envelope.

use serde::Serialize;

use crate::atlas::{eval2, BoundaryOrders, SingularLocusReport, SurfaceAtlas, SurfaceKind};
use crate::classify::{gfr_verdict, ClassifyError, VerdictReport};
use crate::derivation::Derivation;
use crate::extfield::{ExtElem, ExtField};
use crate::field::PrimeField;
use crate::invariant::{
    algebra_generators, kernel_basis, match_presentation_against, presentation_catalog,
    relation_search, SingularityLabel,
};
use crate::poly::Poly;
use crate::ratfunc::RatFunc;
use crate::toric::{canonical_two_weight, cyclic_type, CyclicType};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum PointLabel {
    /// Cyclic quotient type 1/m(1,a) at a multiplicative point.
    Cyclic { m: u64, a: u64, ade: Option<String> },
    /// A catalog hypersurface presentation (rational double points).
    Presentation {
        label: SingularityLabel,
        generators: Vec<String>,
        relation: Option<String>,
    },
    /// A point in a proper extension field, reported without a label.
    Extension { degree: u32 },
    /// The analysis did not apply; carries a short reason.
    Unlabeled { reason: String },
}

impl PointLabel {
    pub fn text(&self) -> String {
        match self {
            PointLabel::Cyclic { m, a, ade } => match ade {
                Some(name) => format!("1/{m}(1,{a}) = {name}"),
                None => format!("1/{m}(1,{a})"),
            },
            PointLabel::Presentation { label, .. } => label.to_string(),
            PointLabel::Extension { degree } => format!("point over F_(p^{degree})"),
            PointLabel::Unlabeled { reason } => format!("unlabeled ({reason})"),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct LabeledPoint {
    pub chart: String,
    pub coords: [String; 2],
    pub field_degree: u32,
    pub label: PointLabel,
}

/// Label a rational singular point: translate it to the chart origin, then
/// either read the cyclic type off a semisimple multiplicative linear part,
/// or compute the local invariant-ring presentation and match it against the
/// rational-double-point catalog.
pub fn label_rational_point(
    delta: &Derivation,
    atlas: &SurfaceAtlas,
    chart: &str,
    coords: [u64; 2],
    corrupt_catalog: bool,
) -> Result<PointLabel, ClassifyError> {
    let field = atlas.field;
    let p = field.p();
    let local = atlas.transport(delta, chart)?;
    let n = local.normalize()?;
    let vars = n.f.vars().clone();
    let x = Poly::var(field, vars.clone(), &vars[0]).unwrap();
    let y = Poly::var(field, vars.clone(), &vars[1]).unwrap();
    let images = [
        x.add(&Poly::constant(field, vars.clone(), coords[0])),
        y.add(&Poly::constant(field, vars.clone(), coords[1])),
    ];
    let ft = n.f.substitute_poly(&images);
    let gt = n.g.substitute_poly(&images);
    if ft.eval(&[0, 0]) != 0 || gt.eval(&[0, 0]) != 0 {
        return Ok(PointLabel::Unlabeled {
            reason: "not a singular point".into(),
        });
    }
    let rep = Derivation::raw(
        chart,
        RatFunc::from_poly(ft.clone()),
        RatFunc::from_poly(gt.clone()),
    );

    // linear part
    let j = [
        [ft.coeff(&[1, 0]), ft.coeff(&[0, 1])],
        [gt.coeff(&[1, 0]), gt.coeff(&[0, 1])],
    ];
    let det = field.sub(field.mul(j[0][0], j[1][1]), field.mul(j[0][1], j[1][0]));
    let tr = field.add(j[0][0], j[1][1]);
    let scalar = j[0][1] == 0 && j[1][0] == 0 && j[0][0] == j[1][1];
    if det != 0 {
        // eigenvalue ratio r solves r^2 - (q - 2) r + 1 = 0 with q = tr^2/det
        let q = field.div(field.mul(tr, tr), det).unwrap();
        let qm2 = field.sub(q, 2);
        let ratio = field.elements().find(|&r| {
            field.add(field.sub(field.mul(r, r), field.mul(qm2, r)), 1) == 0
        });
        let semisimple = match ratio {
            Some(1) => scalar,
            Some(_) => true,
            None => false,
        };
        if let (Some(r), true) = (ratio, semisimple) {
            // require a multiplicative witness at the point
            if let Some(h) = rep.p_closed_witness()? {
                let unit_at_origin =
                    !h.is_zero() && h.den().eval(&[0, 0]) != 0 && h.num().eval(&[0, 0]) != 0;
                if unit_at_origin {
                    let a = canonical_two_weight(p, 1, r);
                    let t = CyclicType::Quotient { m: p, a };
                    return Ok(PointLabel::Cyclic {
                        m: p,
                        a,
                        ade: t.ade_alias(),
                    });
                }
            }
        }
    }

    // presentation route
    let bound = 2 * p as u32 + 2;
    let kb = kernel_basis(&rep, bound)?;
    let gens = algebra_generators(&kb, field, &vars);
    if gens.len() != 3 {
        return Ok(PointLabel::Unlabeled {
            reason: format!("{} generators up to degree {bound}", gens.len()),
        });
    }
    let rel_bound = 2 * gens.iter().map(|g| g.total_degree()).max().unwrap_or(2);
    let rels = relation_search(&gens, rel_bound)?;
    if rels.len() != 1 {
        return Ok(PointLabel::Unlabeled {
            reason: format!("{} generators, {} relations", gens.len(), rels.len()),
        });
    }
    let catalog = presentation_catalog(field, corrupt_catalog);
    let label = match_presentation_against(&rels[0], &catalog);
    Ok(PointLabel::Presentation {
        label,
        generators: gens.iter().map(|g| g.to_string()).collect(),
        relation: rels.first().map(|r| r.to_string()),
    })
}

/// Cyclic singularity types of the quotient at *all* singular points,
/// including those over extension fields, via eigenvalue ratios of the
/// linearization. Fails when some point is not a semisimple multiplicative
/// point with rational ratio (then the quotient is not of toric type there).
pub fn quotient_singularity_types(
    delta: &Derivation,
    atlas: &SurfaceAtlas,
    extension_bound: u32,
) -> Result<Vec<(u64, u64)>, String> {
    let field = atlas.field;
    let p = field.p();
    let locus = atlas
        .singular_locus(delta, extension_bound)
        .map_err(|e| e.to_string())?;
    for (chart, residual) in &locus.residuals {
        if *residual > 0 {
            return Err(format!(
                "unresolved residual factor of degree {residual} in chart {chart}"
            ));
        }
    }
    let mut types = Vec::new();
    for pt in &locus.points {
        let local = atlas.transport(delta, &pt.chart).map_err(|e| e.to_string())?;
        let n = local.normalize().map_err(|e| e.to_string())?;
        let ext = ExtField::new(field, pt.field_degree);
        let jac = |p1: &Poly, idx: usize| -> ExtElem {
            eval2(&p1.partial_derivative_idx(idx), &ext, &pt.coords[0], &pt.coords[1])
        };
        let a = jac(&n.f, 0);
        let b = jac(&n.f, 1);
        let c = jac(&n.g, 0);
        let d = jac(&n.g, 1);
        let tr = ext.add(&a, &d);
        let det = ext.sub(&ext.mul(&a, &d), &ext.mul(&b, &c));
        if ext.is_zero(&det) {
            return Err(format!(
                "degenerate linear part at a singular point in chart {}",
                pt.chart
            ));
        }
        let q = ext.mul(&ext.mul(&tr, &tr), &ext.inv(&det).unwrap());
        if ext.min_subfield_degree(&q) != 1 {
            return Err("irrational eigenvalue ratio".into());
        }
        let q0 = q.0[0];
        let qm2 = field.sub(q0, 2);
        let Some(r) = field
            .elements()
            .find(|&r| field.add(field.sub(field.mul(r, r), field.mul(qm2, r)), 1) == 0)
        else {
            return Err("eigenvalue ratio outside the base field".into());
        };
        if r == 1 {
            // double ratio: semisimple only for a scalar linear part
            let scalar = ext.is_zero(&b) && ext.is_zero(&c) && a == d;
            if !scalar {
                return Err("non-semisimple linear part".into());
            }
        }
        if r == 0 {
            return Err("zero eigenvalue ratio".into());
        }
        types.push((p, canonical_two_weight(p, 1, r)));
    }
    types.sort_unstable();
    Ok(types)
}

/// Cyclic types of the singular cones of a fan, as (m, a) pairs.
pub fn fan_singularity_types(fan: &crate::toric::Fan) -> Vec<(u64, u64)> {
    let mut out = Vec::new();
    for cone in fan.cones() {
        match cyclic_type(&cone) {
            CyclicType::Smooth => {}
            CyclicType::Quotient { m, a } => out.push((m, a)),
        }
    }
    out.sort_unstable();
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct SandwichReport {
    pub surface: String,
    pub p: u64,
    pub delta: String,
    /// The derivation re-expressed in every chart.
    pub chart_expressions: Vec<(String, String)>,
    pub boundary_orders: BoundaryOrders,
    /// Degree n with the foliation sheaf isomorphic to O(n); plane only.
    pub foliation_degree: Option<i64>,
    /// Global-section shape verdict on a Hirzebruch surface: the extracted
    /// coefficients, or None meaning no nonzero global section.
    pub normal_form: Option<crate::classify::NormalFormCoefficients>,
    pub normal_form_applicable: bool,
    pub singular_points: Vec<LabeledPoint>,
    pub verdict: VerdictReport,
}

/// The full per-derivation report: chart expressions, boundary data, the
/// section test, the labeled singular locus, and the regularity verdict.
pub fn sandwich_report(
    delta: &Derivation,
    atlas: &SurfaceAtlas,
    extension_bound: u32,
    corrupt_catalog: bool,
) -> Result<SandwichReport, ClassifyError> {
    let mut chart_expressions = Vec::new();
    for chart in atlas.charts() {
        let local = atlas.transport(delta, &chart.id)?;
        chart_expressions.push((chart.id.clone(), local.render()));
    }
    let boundary_orders = atlas.boundary_orders(delta)?;
    let (foliation_degree, normal_form, normal_form_applicable) = match atlas.kind {
        SurfaceKind::ProjPlane => (Some(atlas.foliation_degree_p2(delta)?), None, false),
        SurfaceKind::Hirzebruch(_) => (None, atlas.normal_form_check(delta)?, true),
    };
    let locus = atlas.singular_locus(delta, extension_bound)?;
    let singular_points = label_locus(delta, atlas, &locus, corrupt_catalog)?;
    let verdict = gfr_verdict(delta, atlas)?;
    Ok(SandwichReport {
        surface: atlas.kind.to_string(),
        p: atlas.field.p(),
        delta: delta.render(),
        chart_expressions,
        boundary_orders,
        foliation_degree,
        normal_form,
        normal_form_applicable,
        singular_points,
        verdict,
    })
}

pub fn label_locus(
    delta: &Derivation,
    atlas: &SurfaceAtlas,
    locus: &SingularLocusReport,
    corrupt_catalog: bool,
) -> Result<Vec<LabeledPoint>, ClassifyError> {
    let mut out = Vec::new();
    for pt in &locus.points {
        let label = if pt.field_degree == 1 {
            label_rational_point(
                delta,
                atlas,
                &pt.chart,
                [pt.coords[0].0[0], pt.coords[1].0[0]],
                corrupt_catalog,
            )?
        } else {
            PointLabel::Extension {
                degree: pt.field_degree,
            }
        };
        out.push(LabeledPoint {
            chart: pt.chart.clone(),
            coords: pt.coords_text.clone(),
            field_degree: pt.field_degree,
            label,
        });
    }
    Ok(out)
}

/// Envelope for CLI and FFI output. The payload is deterministic for
/// deterministic inputs; timing lives outside it.
#[derive(Debug, Clone, Serialize)]
pub struct ReportEnvelope<T: Serialize> {
    pub tool_version: String,
    pub command: String,
    pub input: String,
    pub payload: T,
    pub timing_ms: u128,
}

impl<T: Serialize> ReportEnvelope<T> {
    pub fn new(command: &str, input: &str, payload: T, timing_ms: u128) -> Self {
        ReportEnvelope {
            tool_version: crate::VERSION.to_string(),
            command: command.to_string(),
            input: input.to_string(),
            payload,
            timing_ms,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::varset;

    fn field(p: u64) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    fn atlas_p2(p: u64) -> SurfaceAtlas {
        SurfaceAtlas::new(SurfaceKind::ProjPlane, field(p))
    }

    fn deriv(p: u64, text: &str) -> Derivation {
        Derivation::parse(text, field(p), varset(&["x", "y"]), "U0").unwrap()
    }

    #[test]
    fn euler_point_is_cyclic_1_1() {
        for p in [2u64, 3, 5] {
            let atlas = atlas_p2(p);
            let d = deriv(p, "x dx + y dy");
            let label = label_rational_point(&d, &atlas, "U0", [0, 0], false).unwrap();
            match label {
                PointLabel::Cyclic { m, a, .. } => {
                    assert_eq!((m, a), (p, 1));
                }
                other => panic!("expected a cyclic label, got {other:?}"),
            }
        }
    }

    #[test]
    fn diagonal_point_types_match_expectations() {
        let p = 5;
        let atlas = atlas_p2(p);
        let i = 2u64;
        let d = deriv(p, &format!("x dx + {i}*y dy"));
        // U0 origin: weights (1, 2) -> canonical 2
        let l0 = label_rational_point(&d, &atlas, "U0", [0, 0], false).unwrap();
        assert_eq!(l0.text(), "1/5(1,2)");
        // U1 origin: weights (1, 1-i) = (1, 4) -> canonical 4 (the A_4 alias)
        let l1 = label_rational_point(&d, &atlas, "U1", [0, 0], false).unwrap();
        assert_eq!(l1.text(), "1/5(1,4) = A_4");
        // U2 origin: weights (i, i-1) = (2, 1): canonical of 1/5(1,3) is 2
        let l2 = label_rational_point(&d, &atlas, "U2", [0, 0], false).unwrap();
        assert_eq!(l2.text(), "1/5(1,2)");
    }

    #[test]
    fn d4_and_a1_labels_char2() {
        let atlas = atlas_p2(2);
        let d = deriv(2, "x^2 dx + y^2 dy");
        // origin of U0: the D_4^0 presentation
        let l = label_rational_point(&d, &atlas, "U0", [0, 0], false).unwrap();
        match &l {
            PointLabel::Presentation { label, relation, .. } => {
                assert_eq!(*label, SingularityLabel::D4Zero);
                assert_eq!(relation.as_deref(), Some("X^2*Y + X*Y^2 + Z^2"));
            }
            other => panic!("expected a presentation label, got {other:?}"),
        }
        // the two points on the U1 chart are A_1 (cyclic route: weights (1,1))
        for w in [0u64, 1] {
            let l = label_rational_point(&d, &atlas, "U1", [0, w], false).unwrap();
            assert_eq!(l.text(), "1/2(1,1) = A_1", "point (0, {w})");
        }
    }

    #[test]
    fn e7_label_char2() {
        let atlas = atlas_p2(2);
        let d = deriv(2, "x*y^2 dx + (x^2 + y^3) dy");
        let l = label_rational_point(&d, &atlas, "U0", [0, 0], false).unwrap();
        match &l {
            PointLabel::Presentation { label, generators, .. } => {
                assert_eq!(*label, SingularityLabel::E7Zero);
                assert_eq!(
                    generators,
                    &vec!["x^2".to_string(), "y^2".into(), "x*y^3 + x^3".into()]
                );
            }
            other => panic!("expected a presentation label, got {other:?}"),
        }
    }

    #[test]
    fn full_report_example_d4() {
        let atlas = atlas_p2(2);
        let d = deriv(2, "x^2 dx + y^2 dy");
        let r = sandwich_report(&d, &atlas, 2, false).unwrap();
        assert_eq!(r.foliation_degree, Some(-1));
        assert_eq!(r.singular_points.len(), 4);
        let labels: Vec<String> = r.singular_points.iter().map(|p| p.label.text()).collect();
        assert_eq!(labels.iter().filter(|l| l.contains("A_1")).count(), 3);
        assert_eq!(labels.iter().filter(|l| l.contains("D_4^0")).count(), 1);
        // envelope round-trips through JSON
        let env = ReportEnvelope::new("sandwich", "x^2 dx + y^2 dy", &r, 0);
        let js = serde_json::to_string(&env).unwrap();
        let back: serde_json::Value = serde_json::from_str(&js).unwrap();
        assert_eq!(back["payload"]["foliation_degree"], -1);
    }

    #[test]
    fn quotient_types_match_fan_for_direct_route() {
        // the p-closed field with irreducible base quadratic on H_2 at p = 2
        use crate::classify::{reduce, NormalFormCoefficients};
        let f = field(2);
        let nf = NormalFormCoefficients::Hirzebruch {
            d: 2,
            a2: 1,
            a1: 1,
            a0: 1,
            b: 1,
            f: vec![0, 0, 0],
        };
        let report = reduce(&nf, f).unwrap();
        assert!(report.direct_route);
        let atlas = SurfaceAtlas::new(SurfaceKind::Hirzebruch(2), f);
        let delta = nf.to_derivation(f).unwrap();
        let got = quotient_singularity_types(&delta, &atlas, 2).unwrap();
        let expect = fan_singularity_types(&report.fan);
        assert_eq!(got, expect);
    }
}
