//! End-to-end reproduction checks: every reference computation the toolkit
//! is expected to reproduce, runnable from the CLI as one suite with a
//! per-check pass/fail line.

use serde::Serialize;

use crate::atlas::{SurfaceAtlas, SurfaceKind};
use crate::classify::{classify_surface, gfr_verdict, GfrVerdict, Obstruction};
use crate::derivation::Derivation;
use crate::field::PrimeField;
use crate::invariant::{algebra_generators, kernel_basis, relation_search, SingularityLabel};
use crate::poly::Poly;
use crate::report::{label_locus, label_rational_point, PointLabel};
use crate::toric::{build_fan, canonical_two_weight, refine, FanKind};

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

pub struct CheckRunner {
    pub results: Vec<CheckResult>,
    filter: Option<String>,
    pub corrupt_catalog: bool,
    pub seed: u64,
}

impl CheckRunner {
    pub fn new(filter: Option<String>, corrupt_catalog: bool, seed: u64) -> CheckRunner {
        CheckRunner {
            results: Vec::new(),
            filter,
            corrupt_catalog,
            seed,
        }
    }

    fn wants(&self, name: &str) -> bool {
        match &self.filter {
            None => true,
            Some(f) => name.contains(f.as_str()),
        }
    }

    fn check(&mut self, name: &str, outcome: Result<String, String>) {
        let (passed, detail) = match outcome {
            Ok(d) => (true, d),
            Err(d) => (false, d),
        };
        self.results.push(CheckResult {
            name: name.to_string(),
            passed,
            detail,
        });
    }

    pub fn all_passed(&self) -> bool {
        self.results.iter().all(|r| r.passed)
    }

    pub fn run_all(&mut self) {
        let names: Vec<&str> = vec![
            "example1",
            "example2",
            "example3",
            "example4",
            "chart-relations",
            "fan-identities",
            "class-counts",
            "smooth-sandwiches",
            "splitting-projector",
        ];
        for name in names {
            if !self.wants(name) {
                continue;
            }
            let outcome = match name {
                "example1" => self.example1(),
                "example2" => self.example2(),
                "example3" => self.example3(),
                "example4" => self.example4(),
                "chart-relations" => self.chart_relations(),
                "fan-identities" => self.fan_identities(),
                "class-counts" => self.class_counts(),
                "smooth-sandwiches" => self.smooth_sandwiches(),
                "splitting-projector" => self.splitting_projector(),
                _ => unreachable!(),
            };
            self.check(name, outcome);
        }
    }

    /// The Euler field on the plane: chart expressions, chart invariant
    /// rings, foliation degree 1, one singular point of type 1/p(1,1).
    fn example1(&mut self) -> Result<String, String> {
        for p in [2u64, 3, 5] {
            let field = PrimeField::new(p).unwrap();
            let atlas = SurfaceAtlas::new(SurfaceKind::ProjPlane, field);
            let d = parse_on(&atlas, "U0", "x dx + y dy")?;

            let u1 = atlas.transport(&d, "U1").map_err(es)?;
            let minus = field.neg(1);
            expect_eq(&u1.render(), &format!("{minus}*z dz @ U1"), "U1 expression")?;
            let u2 = atlas.transport(&d, "U2").map_err(es)?;
            expect_eq(&u2.render(), &format!("{minus}*u du @ U2"), "U2 expression")?;

            // chart invariant rings
            let gens0 = chart_generators(&atlas, &d, "U0", 2 * p as u32)?;
            let expect0: Vec<String> = (0..=p)
                .map(|k| mono(field, &["x", "y"], [(p - k) as u32, k as u32]))
                .collect();
            expect_set(&gens0, &expect0, "U0 generators")?;
            let gens1 = chart_generators(&atlas, &d, "U1", 2 * p as u32)?;
            expect_set(
                &gens1,
                &vec!["w".to_string(), format!("z^{p}")],
                "U1 generators",
            )?;
            let gens2 = chart_generators(&atlas, &d, "U2", 2 * p as u32)?;
            expect_set(
                &gens2,
                &vec!["v".to_string(), format!("u^{p}")],
                "U2 generators",
            )?;

            let deg = atlas.foliation_degree_p2(&d).map_err(es)?;
            expect_eq(&deg, &1, "foliation degree")?;

            let locus = atlas.singular_locus(&d, 2).map_err(es)?;
            expect_eq(&locus.points.len(), &1, "singular point count")?;
            let labels = label_locus(&d, &atlas, &locus, self.corrupt_catalog).map_err(es)?;
            let want = format!("1/{p}(1,1)");
            if !labels[0].label.text().starts_with(&want) {
                return Err(format!(
                    "p={p}: singular point label {} != {want}",
                    labels[0].label.text()
                ));
            }
            let v = gfr_verdict(&d, &atlas).map_err(es)?;
            expect_eq(&v.verdict, &GfrVerdict::GloballyFRegular, "verdict")?;
        }
        Ok("p in {2,3,5}: chart forms, invariant rings, degree 1, one 1/p(1,1) point".into())
    }

    /// Diagonal fields on the plane at p = 5: three singular chart origins
    /// with the expected cyclic types and foliation degree 0.
    fn example2(&mut self) -> Result<String, String> {
        let p = 5u64;
        let field = PrimeField::new(p).unwrap();
        let atlas = SurfaceAtlas::new(SurfaceKind::ProjPlane, field);
        for i in [2u64, 3, 4] {
            let d = parse_on(&atlas, "U0", &format!("x dx + {i}*y dy"))?;
            // chart expressions: -(z dz + (1-i) w dw) and -(i u du + (i-1) v dv)
            let u1 = atlas.transport(&d, "U1").map_err(es)?;
            let want1 = parse_on(
                &atlas,
                "U1",
                &format!("-z dz - {}*w dw", field.sub(1, i)),
            )?;
            expect_eq(&u1, &want1, "U1 expression")?;
            let u2 = atlas.transport(&d, "U2").map_err(es)?;
            let want2 = parse_on(
                &atlas,
                "U2",
                &format!("-{i}*u du - {}*v dv", field.sub(i, 1)),
            )?;
            expect_eq(&u2, &want2, "U2 expression")?;

            let deg = atlas.foliation_degree_p2(&d).map_err(es)?;
            expect_eq(&deg, &0, "foliation degree")?;

            let locus = atlas.singular_locus(&d, 2).map_err(es)?;
            expect_eq(&locus.points.len(), &3, "singular point count")?;
            let labels = label_locus(&d, &atlas, &locus, self.corrupt_catalog).map_err(es)?;
            // expected two-weight data per chart: (1, i), (1, 1-i), (i, i-1)
            let weights = [(1, i), (1, field.sub(1, i)), (i, field.sub(i, 1))];
            for (pt, (w1, w2)) in labels.iter().zip(weights) {
                let want = canonical_two_weight(p, w1, w2);
                match &pt.label {
                    PointLabel::Cyclic { m, a, .. } if *m == p && *a == want => {}
                    other => {
                        return Err(format!(
                            "i={i}, chart {}: label {:?} != 1/{p}(1,{want})",
                            pt.chart, other
                        ))
                    }
                }
            }
        }
        Ok("p=5, i in {2,3,4}: chart forms, degree 0, three points with the stated types".into())
    }

    /// The square field at p = 2: the D_4^0 chart ring, three A_1 points, and
    /// the nilpotency obstruction.
    fn example3(&mut self) -> Result<String, String> {
        let p = 2u64;
        let field = PrimeField::new(p).unwrap();
        let atlas = SurfaceAtlas::new(SurfaceKind::ProjPlane, field);
        let d = parse_on(&atlas, "U0", "x^2 dx + y^2 dy")?;

        let u1 = atlas.transport(&d, "U1").map_err(es)?;
        let want1 = parse_on(&atlas, "U1", "(1/z)(z dz + w*(w+1) dw)")?;
        expect_eq(&u1, &want1, "U1 expression")?;

        let deg = atlas.foliation_degree_p2(&d).map_err(es)?;
        expect_eq(&deg, &-1, "foliation degree")?;

        let gens = chart_generators(&atlas, &d, "U0", 2 * p as u32 + 2)?;
        expect_set(
            &gens,
            &vec!["x^2".to_string(), "y^2".into(), "x^2*y + x*y^2".into()],
            "U0 generators",
        )?;
        let gen_polys = chart_generator_polys(&atlas, &d, "U0", 2 * p as u32 + 2)?;
        let rels = relation_search(&gen_polys, 6).map_err(es)?;
        expect_eq(&rels.len(), &1, "relation count")?;
        expect_eq(&rels[0].to_string(), &"X^2*Y + X*Y^2 + Z^2".to_string(), "relation")?;
        let catalog = crate::invariant::presentation_catalog(field, self.corrupt_catalog);
        let label = crate::invariant::match_presentation_against(&rels[0], &catalog);
        expect_eq(&label, &SingularityLabel::D4Zero, "catalog label")?;

        let locus = atlas.singular_locus(&d, 2).map_err(es)?;
        expect_eq(&locus.points.len(), &4, "singular point count")?;
        let labels = label_locus(&d, &atlas, &locus, self.corrupt_catalog).map_err(es)?;
        let texts: Vec<String> = labels.iter().map(|l| l.label.text()).collect();
        let a1 = texts.iter().filter(|t| t.contains("A_1")).count();
        let d4 = texts.iter().filter(|t| t.contains("D_4^0")).count();
        expect_eq(&(a1, d4), &(3usize, 1usize), "configuration (three A_1, one D_4^0)")?;

        let v = gfr_verdict(&d, &atlas).map_err(es)?;
        expect_eq(
            &v.verdict,
            &GfrVerdict::NotGloballyFRegular(Obstruction::NilpotentAtSingularPoint),
            "verdict",
        )?;
        Ok("p=2: D_4^0 ring k[X,Y,Z]/(Z^2+X^2Y+XY^2), three A_1 points, nilpotency obstruction".into())
    }

    /// The degree -1 field with one E_7^0 point at p = 2 and the section
    /// obstruction.
    fn example4(&mut self) -> Result<String, String> {
        let p = 2u64;
        let field = PrimeField::new(p).unwrap();
        let atlas = SurfaceAtlas::new(SurfaceKind::ProjPlane, field);
        let d = parse_on(&atlas, "U0", "x*y^2 dx + (x^2 + y^3) dy")?;

        let u1 = atlas.transport(&d, "U1").map_err(es)?;
        let want1 = parse_on(&atlas, "U1", "(1/z)(w^2 dz + dw)")?;
        expect_eq(&u1, &want1, "U1 expression")?;
        let u2 = atlas.transport(&d, "U2").map_err(es)?;
        let want2 = parse_on(&atlas, "U2", "(1/u)((1 + u*v^2) du + v^3 dv)")?;
        expect_eq(&u2, &want2, "U2 expression")?;

        let deg = atlas.foliation_degree_p2(&d).map_err(es)?;
        expect_eq(&deg, &-1, "foliation degree")?;

        let gens = chart_generators(&atlas, &d, "U0", 6)?;
        expect_set(
            &gens,
            &vec!["x^2".to_string(), "y^2".into(), "x*y^3 + x^3".into()],
            "U0 generators",
        )?;
        let gen_polys = chart_generator_polys(&atlas, &d, "U0", 6)?;
        let rels = relation_search(&gen_polys, 8).map_err(es)?;
        expect_eq(&rels.len(), &1, "relation count")?;
        expect_eq(&rels[0].to_string(), &"X*Y^3 + X^3 + Z^2".to_string(), "relation")?;
        let catalog = crate::invariant::presentation_catalog(field, self.corrupt_catalog);
        let label = crate::invariant::match_presentation_against(&rels[0], &catalog);
        expect_eq(&label, &SingularityLabel::E7Zero, "catalog label")?;

        let locus = atlas.singular_locus(&d, 3).map_err(es)?;
        expect_eq(&locus.points.len(), &1, "singular point count")?;
        let l = label_rational_point(&d, &atlas, "U0", [0, 0], self.corrupt_catalog).map_err(es)?;
        match &l {
            PointLabel::Presentation { label, .. } if *label == SingularityLabel::E7Zero => {}
            other => return Err(format!("point label {other:?} != E_7^0")),
        }

        let v = gfr_verdict(&d, &atlas).map_err(es)?;
        expect_eq(
            &v.verdict,
            &GfrVerdict::NotGloballyFRegular(Obstruction::NoGlobalSection),
            "verdict",
        )?;
        Ok("p=2: E_7^0 ring k[X,Y,Z]/(Z^2+X^3+XY^3), one singular point, section obstruction".into())
    }

    /// The gluing relation of the second chart: z = x^d y, w = 1/x.
    fn chart_relations(&mut self) -> Result<String, String> {
        for p in [2u64, 5] {
            let field = PrimeField::new(p).unwrap();
            for d in 0..=3u32 {
                let atlas = SurfaceAtlas::new(SurfaceKind::Hirzebruch(d), field);
                let t = atlas.transition("U1", "U2").map_err(es)?;
                let zmon = mono(field, &["x", "y"], [d, 1]);
                expect_eq(&t[0].to_string(), &zmon, "z = x^d y")?;
                expect_eq(&t[1].to_string(), &"1/(x)".to_string(), "w = 1/x")?;
                // round trip: x = 1/w, y = z w^d recovers x^d y -> z
                let back = atlas.transition("U2", "U1").map_err(es)?;
                let xdy = crate::parse::parse_poly(&zmon, field, atlas.primary_chart().vars.clone())
                    .map_err(es)?;
                let image = xdy.substitute(&back).map_err(es)?;
                expect_eq(&image.to_string(), &"z".to_string(), "x^d y -> z")?;
            }
        }
        Ok("k[z,w] = k[x^d y, 1/x] transitions and their inverses".into())
    }

    /// Quotient fan ray lists: the refinement along (1,i)/p matches the
    /// stated ray lists for every surface in the grid.
    fn fan_identities(&mut self) -> Result<String, String> {
        for p in [2u64, 3, 5] {
            let plane = build_fan(FanKind::ProjPlane).map_err(es)?;
            for i in 1..p {
                let a = refine(&plane, [1, i as i64], p).map_err(es)?;
                let b = build_fan(FanKind::SigmaP2 { p, i }).map_err(es)?;
                expect_eq(&a, &b, "plane quotient fan")?;
            }
            for d in 0..=3u32 {
                let h = build_fan(FanKind::Hirzebruch(d)).map_err(es)?;
                for i in 0..=p {
                    let v = if i == p { [0, 1] } else { [1, i as i64] };
                    let a = refine(&h, v, p).map_err(es)?;
                    let b = build_fan(FanKind::SigmaHir { p, d, i }).map_err(es)?;
                    expect_eq(&a, &b, "ruled-surface quotient fan")?;
                }
            }
        }
        Ok("refinement along (1,i)/p reproduces every stated ray list (p in {2,3,5}, d in 0..3)".into())
    }

    /// The classification counts: p-1 classes for the plane, p for the
    /// product surface, p+1 for every higher index.
    fn class_counts(&mut self) -> Result<String, String> {
        for p in [2u64, 3, 5] {
            let c = classify_surface(SurfaceKind::ProjPlane, p).map_err(es)?;
            expect_eq(&(c.class_count as u64), &(p - 1), &format!("plane count at p={p}"))?;
            for d in 0..=3u32 {
                let c = classify_surface(SurfaceKind::Hirzebruch(d), p).map_err(es)?;
                let want = if d == 0 { p } else { p + 1 };
                expect_eq(
                    &(c.class_count as u64),
                    &want,
                    &format!("index-{d} count at p={p}"),
                )?;
            }
        }
        Ok("class counts p-1 / p / p+1 over p in {2,3,5}, d in 0..3".into())
    }

    /// At most two of the classified quotients are smooth, and the vertical
    /// one always is.
    fn smooth_sandwiches(&mut self) -> Result<String, String> {
        for p in [2u64, 3, 5] {
            for d in 1..=3u32 {
                let c = classify_surface(SurfaceKind::Hirzebruch(d), p).map_err(es)?;
                let smooth = c
                    .classes
                    .iter()
                    .filter(|e| e.fan.cones().iter().all(|c| c.index() == 1))
                    .count();
                let want = if d as u64 % p == 0 { 2 } else { 1 };
                expect_eq(&smooth, &want, &format!("smooth classes at p={p}, d={d}"))?;
            }
        }
        Ok("smooth quotient count is at most two (two exactly when p divides d)".into())
    }

    /// The projector 1 - delta^(p-1) splits the multiplicative classes:
    /// idempotent, kernel-valued, kernel-fixing, kernel-linear on seeded
    /// random polynomials.
    fn splitting_projector(&mut self) -> Result<String, String> {
        let mut rng = SplitMix::new(self.seed);
        for p in [2u64, 3, 5] {
            let field = PrimeField::new(p).unwrap();
            let atlas = SurfaceAtlas::new(SurfaceKind::ProjPlane, field);
            let d = parse_on(&atlas, "U0", "x dx + y dy")?;
            for _ in 0..50 {
                let r = random_poly(&mut rng, field, 3 * p as u32);
                let pr = d.splitting_projector(&r).map_err(es)?;
                if !d.apply_poly(&pr).is_zero() {
                    return Err(format!("projector image not invariant at p={p}"));
                }
                let ppr = d.splitting_projector(&pr).map_err(es)?;
                if ppr != pr {
                    return Err(format!("projector not idempotent at p={p}"));
                }
                // kernel linearity: s * r projects to s * P(r) for invariant s
                let s = Poly::var_pow(field, r.vars().clone(), "x", p as u32, 1).unwrap();
                let left = d.splitting_projector(&s.mul(&r)).map_err(es)?;
                if left != s.mul(&pr) {
                    return Err(format!("projector not linear over the kernel at p={p}"));
                }
            }
        }
        Ok("projector laws verified on seeded samples for p in {2,3,5}".into())
    }
}

// ---- helpers ----

fn es(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn parse_on(atlas: &SurfaceAtlas, chart: &str, text: &str) -> Result<Derivation, String> {
    let c = atlas.chart(chart).map_err(es)?;
    Derivation::parse(text, atlas.field, c.vars.clone(), chart).map_err(es)
}

fn expect_eq<T: PartialEq + std::fmt::Debug>(got: &T, want: &T, what: &str) -> Result<(), String> {
    if got == want {
        Ok(())
    } else {
        Err(format!("{what}: expected {want:?}, computed {got:?}"))
    }
}

fn expect_set(got: &[String], want: &[String], what: &str) -> Result<(), String> {
    let mut a = got.to_vec();
    let mut b = want.to_vec();
    a.sort();
    b.sort();
    if a == b {
        Ok(())
    } else {
        Err(format!("{what}: expected {b:?}, computed {a:?}"))
    }
}

fn mono(field: PrimeField, vars: &[&str], exps: [u32; 2]) -> String {
    let vs = crate::poly::varset(vars);
    Poly::from_terms(field, vs, [(vec![exps[0], exps[1]], 1u64)]).to_string()
}

fn chart_generator_polys(
    atlas: &SurfaceAtlas,
    delta: &Derivation,
    chart: &str,
    bound: u32,
) -> Result<Vec<Poly>, String> {
    let local = atlas.transport(delta, chart).map_err(es)?;
    let rep = local.normalize().map_err(es)?.representative(chart);
    let kb = kernel_basis(&rep, bound).map_err(es)?;
    Ok(algebra_generators(&kb, atlas.field, rep.vars()))
}

fn chart_generators(
    atlas: &SurfaceAtlas,
    delta: &Derivation,
    chart: &str,
    bound: u32,
) -> Result<Vec<String>, String> {
    Ok(chart_generator_polys(atlas, delta, chart, bound)?
        .iter()
        .map(|p| p.to_string())
        .collect())
}

/// Tiny deterministic generator for seeded sampling (no external dependency).
pub struct SplitMix {
    state: u64,
}

impl SplitMix {
    pub fn new(seed: u64) -> SplitMix {
        SplitMix { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    pub fn below(&mut self, n: u64) -> u64 {
        self.next_u64() % n
    }
}

pub fn random_poly(rng: &mut SplitMix, field: PrimeField, max_degree: u32) -> Poly {
    let vars = crate::poly::varset(&["x", "y"]);
    let mut out = Poly::zero(field, vars.clone());
    let terms = 1 + rng.below(5);
    for _ in 0..terms {
        let a = rng.below(max_degree as u64 + 1) as u32;
        let b = rng.below((max_degree - a.min(max_degree)) as u64 + 1) as u32;
        let c = rng.below(field.p());
        out = out.add(&Poly::from_terms(field, vars.clone(), [(vec![a, b], c)]));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_checks_pass() {
        let mut runner = CheckRunner::new(None, false, 20260810);
        runner.run_all();
        for r in &runner.results {
            assert!(r.passed, "{}: {}", r.name, r.detail);
        }
        assert_eq!(runner.results.len(), 9);
    }

    #[test]
    fn corrupted_catalog_fails() {
        let mut runner = CheckRunner::new(Some("example3".into()), true, 1);
        runner.run_all();
        assert!(!runner.all_passed());
    }

    #[test]
    fn filter_selects_subset() {
        let mut runner = CheckRunner::new(Some("example1".into()), false, 1);
        runner.run_all();
        assert_eq!(runner.results.len(), 1);
        assert!(runner.results[0].passed, "{}", runner.results[0].detail);
    }
}
