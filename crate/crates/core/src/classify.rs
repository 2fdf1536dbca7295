//! Classification of the globally F-regular quotients: normal-form
//! coefficient records, the reduction to canonical forms with a replayable
//! coordinate-change trace, the map from canonical forms to fans, exhaustive
//! small-p enumeration, and the global F-regularity verdict pipeline.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::atlas::{AtlasError, SurfaceAtlas, SurfaceKind};
use crate::derivation::{Derivation, DerivationError};
use crate::field::PrimeField;
use crate::poly::{varset, Poly, PolyError, VarSet};
use crate::ratfunc::RatFunc;
use crate::toric::{build_fan, refine, Fan, FanKind, ToricError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ClassifyError {
    #[error("derivation is not p-closed")]
    NotPClosed,
    #[error("every coefficient of the normal form vanishes")]
    ZeroDerivation,
    #[error("presentation incompatible with the singular-point arrangement convention: {0}")]
    ArrangementContradiction(String),
    #[error("nilpotent dead end: {0}")]
    NilpotentAtSingularPoint(String),
    #[error("enumeration budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
    #[error(transparent)]
    Derivation(#[from] DerivationError),
    #[error(transparent)]
    Atlas(#[from] AtlasError),
    #[error(transparent)]
    Invariant(#[from] crate::invariant::InvariantError),
    #[error(transparent)]
    Toric(#[from] ToricError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// Coefficient record for the two global-section normal-form shapes.
///
/// For a Hirzebruch surface of index `d >= 1` the shape is
/// `(a2 x^2 + a1 x + a0) d/dx + (F(x) y - d a2 x + b) y d/dy` with
/// `deg F <= d`. For `d = 0` both coefficients are univariate quadratics:
/// `(a2 x^2 + a1 x + a0) d/dx + (b2 y^2 + b1 y + b0) d/dy`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum NormalFormCoefficients {
    Hirzebruch {
        d: u32,
        a2: u64,
        a1: u64,
        a0: u64,
        b: u64,
        /// Coefficients of F, constant first; length d + 1.
        f: Vec<u64>,
    },
    Product {
        a: [u64; 3], // a0, a1, a2
        b: [u64; 3], // b0, b1, b2
    },
}

impl NormalFormCoefficients {
    pub fn d(&self) -> u32 {
        match self {
            NormalFormCoefficients::Hirzebruch { d, .. } => *d,
            NormalFormCoefficients::Product { .. } => 0,
        }
    }

    /// Build the derivation this record denotes, in the first chart of the
    /// surface (variables x, y). `None` when every coefficient vanishes.
    pub fn to_derivation(&self, field: PrimeField) -> Option<Derivation> {
        let vars = varset(&["x", "y"]);
        let x = Poly::var(field, vars.clone(), "x").unwrap();
        let y = Poly::var(field, vars.clone(), "y").unwrap();
        let c = |v: u64| Poly::constant(field, vars.clone(), v);
        let (fx, gy) = match self {
            NormalFormCoefficients::Hirzebruch { d, a2, a1, a0, b, f } => {
                let fx = c(*a2).mul(&x).mul(&x).add(&c(*a1).mul(&x)).add(&c(*a0));
                let mut fpoly = Poly::zero(field, vars.clone());
                for (j, cj) in f.iter().enumerate() {
                    fpoly = fpoly.add(&c(*cj).mul(&x.pow(j as u32)));
                }
                // (F(x) y - d a2 x + b) y
                let da2 = field.mul(field.reduce(*d as u64), *a2);
                let inner = fpoly.mul(&y).sub(&c(da2).mul(&x)).add(&c(*b));
                (fx, inner.mul(&y))
            }
            NormalFormCoefficients::Product { a, b } => {
                let fx = c(a[2]).mul(&x).mul(&x).add(&c(a[1]).mul(&x)).add(&c(a[0]));
                let gy = c(b[2]).mul(&y).mul(&y).add(&c(b[1]).mul(&y)).add(&c(b[0]));
                (fx, gy)
            }
        };
        Derivation::new("U1", RatFunc::from_poly(fx), RatFunc::from_poly(gy)).ok()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CanonicalVariant {
    /// x d/dx + i y d/dy in the canonical chart.
    Diagonal { i: u64 },
    /// d/dy in the canonical chart.
    Vertical,
}

/// A canonical form together with the chart whose coordinates realize it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CanonicalForm {
    pub variant: CanonicalVariant,
    pub chart: String,
}

impl CanonicalForm {
    pub fn diagonal(i: u64, chart: &str) -> CanonicalForm {
        CanonicalForm {
            variant: CanonicalVariant::Diagonal { i },
            chart: chart.to_string(),
        }
    }

    pub fn vertical(chart: &str) -> CanonicalForm {
        CanonicalForm {
            variant: CanonicalVariant::Vertical,
            chart: chart.to_string(),
        }
    }

    /// The representative derivation in the canonical chart of the atlas.
    pub fn representative(&self, atlas: &SurfaceAtlas) -> Result<Derivation, ClassifyError> {
        let chart = atlas.chart(&self.chart)?;
        let field = atlas.field;
        let vars = chart.vars.clone();
        let v0 = Poly::var(field, vars.clone(), &vars[0]).unwrap();
        let v1 = Poly::var(field, vars.clone(), &vars[1]).unwrap();
        let delta = match self.variant {
            CanonicalVariant::Diagonal { i } => Derivation::raw(
                self.chart.clone(),
                RatFunc::from_poly(v0),
                RatFunc::from_poly(v1.scale(i)),
            ),
            CanonicalVariant::Vertical => Derivation::raw(
                self.chart.clone(),
                RatFunc::zero(field, vars.clone()),
                RatFunc::one(field, vars),
            ),
        };
        Ok(delta)
    }
}

impl std::fmt::Display for CanonicalForm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.variant {
            CanonicalVariant::Diagonal { i } => {
                write!(f, "x d/dx + {i} y d/dy @ {}", self.chart)
            }
            CanonicalVariant::Vertical => write!(f, "d/dy @ {}", self.chart),
        }
    }
}

/// One replayable step of the reduction.
#[derive(Debug, Clone, Serialize)]
pub struct TraceStep {
    pub chart: String,
    pub note: String,
    pub kind: TraceMove,
}

#[derive(Debug, Clone, Serialize)]
pub enum TraceMove {
    /// Multiply by a rational function (an equivalence move).
    Scale { factor: RatFunc },
    /// Coordinate change within the current chart.
    CoordChange {
        new_in_old: [RatFunc; 2],
        old_in_new: [RatFunc; 2],
    },
    /// Re-express in another chart of the atlas.
    Transport { to: String },
}

/// Apply a trace to a derivation.
pub fn replay_trace(
    delta: &Derivation,
    atlas: &SurfaceAtlas,
    trace: &[TraceStep],
) -> Result<Derivation, ClassifyError> {
    let mut cur = delta.clone();
    for step in trace {
        match &step.kind {
            TraceMove::Scale { factor } => cur = cur.scale(factor),
            TraceMove::CoordChange { new_in_old, old_in_new } => {
                let chart = cur.chart().to_string();
                cur = cur.rewrite_coordinates(&chart, new_in_old, old_in_new)?;
            }
            TraceMove::Transport { to } => cur = atlas.transport(&cur, to)?,
        }
    }
    Ok(cur)
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassificationReport {
    pub surface: String,
    pub p: u64,
    pub input: String,
    pub trace: Vec<TraceStep>,
    pub canonical: CanonicalForm,
    pub fan: Fan,
    /// Set when the canonical form was computed by a coefficient invariant
    /// instead of a replayable chain of coordinate changes (irrational
    /// quadratic factors over the base field).
    pub direct_route: bool,
}

/// Target fan of a canonical form: the surface fan on the overlattice
/// `N + Z (1/p)(1, i)` for Diagonal(i) and `N + Z (1/p)(0, 1)` for Vertical.
pub fn canonical_to_fan(
    variant: &CanonicalVariant,
    surface: SurfaceKind,
    p: u64,
) -> Result<Fan, ClassifyError> {
    let base = match surface {
        SurfaceKind::ProjPlane => build_fan(FanKind::ProjPlane)?,
        SurfaceKind::Hirzebruch(d) => build_fan(FanKind::Hirzebruch(d))?,
    };
    let vec = match variant {
        CanonicalVariant::Diagonal { i } => [1, *i as i64],
        CanonicalVariant::Vertical => [0, 1],
    };
    Ok(refine(&base, vec, p)?)
}

// ---- the Hirzebruch reduction ----

struct Reducer<'a> {
    atlas: &'a SurfaceAtlas,
    field: PrimeField,
    d: u32,
    trace: Vec<TraceStep>,
    used_direct_route: bool,
}

impl<'a> Reducer<'a> {
    fn vars(&self) -> VarSet {
        self.atlas.primary_chart().vars.clone()
    }

    fn rf(&self, p: Poly) -> RatFunc {
        RatFunc::from_poly(p)
    }

    fn x(&self) -> Poly {
        Poly::var(self.field, self.vars(), "x").unwrap()
    }

    fn y(&self) -> Poly {
        Poly::var(self.field, self.vars(), "y").unwrap()
    }

    fn constant(&self, c: u64) -> Poly {
        Poly::constant(self.field, self.vars(), c)
    }

    /// Record and apply a coordinate change given by `new_in_old` /
    /// `old_in_new` (in the primary chart).
    fn coord_change(
        &mut self,
        delta: &Derivation,
        new_in_old: [RatFunc; 2],
        old_in_new: [RatFunc; 2],
        note: &str,
    ) -> Result<Derivation, ClassifyError> {
        let out = delta.rewrite_coordinates("U1", &new_in_old, &old_in_new)?;
        self.trace.push(TraceStep {
            chart: "U1".into(),
            note: note.into(),
            kind: TraceMove::CoordChange { new_in_old, old_in_new },
        });
        Ok(out)
    }

    /// Translate x by r (moves the point x = r to the origin).
    fn translate_x(&mut self, delta: &Derivation, r: u64) -> Result<Derivation, ClassifyError> {
        if r == 0 {
            return Ok(delta.clone());
        }
        let x = self.x();
        let y = self.y();
        let new_in_old = [self.rf(x.sub(&self.constant(r))), self.rf(y.clone())];
        let old_in_new = [self.rf(x.add(&self.constant(r))), self.rf(y)];
        self.coord_change(
            delta,
            new_in_old,
            old_in_new,
            &format!("translate the singular point x = {r} on the section image to the origin"),
        )
    }

    /// Fiberwise shift 1/y -> 1/y + s(x), i.e. y -> y/(1 + s y); `s` must
    /// have degree at most d for this to extend to the whole surface.
    fn fiber_shift(&mut self, delta: &Derivation, s: Poly, note: &str) -> Result<Derivation, ClassifyError> {
        assert!(s.total_degree() <= self.d.max(1), "fiber shift must be a section");
        let y = self.y();
        let x = self.x();
        let one = self.constant(1);
        let new_y = RatFunc::new(y.clone(), one.add(&s.mul(&y))).unwrap();
        let old_y = RatFunc::new(y.clone(), one.sub(&s.mul(&y))).unwrap();
        let new_in_old = [self.rf(x.clone()), new_y];
        let old_in_new = [self.rf(x), old_y];
        self.coord_change(delta, new_in_old, old_in_new, note)
    }

    /// Base shift 1/x -> 1/x + c (the coordinate change used when the
    /// quadratic leading coefficient is present), which on the primary chart
    /// reads x -> x/(1 + c x), y -> y (1 + c x)^d.
    fn base_shift(&mut self, delta: &Derivation, c: u64) -> Result<Derivation, ClassifyError> {
        let x = self.x();
        let y = self.y();
        let one = self.constant(1);
        let cpoly = self.constant(c);
        let denom_new = one.add(&cpoly.mul(&x));
        let denom_old = one.sub(&cpoly.mul(&x));
        let new_in_old = [
            RatFunc::new(x.clone(), denom_new.clone()).unwrap(),
            self.rf(y.mul(&denom_new.pow(self.d))),
        ];
        let old_in_new = [
            RatFunc::new(x.clone(), denom_old.clone()).unwrap(),
            self.rf(y.mul(&denom_old.pow(self.d))),
        ];
        self.coord_change(
            delta,
            new_in_old,
            old_in_new,
            &format!("shift the base coordinate at infinity by {c} to expose the remaining root"),
        )
    }

    fn scale_step(&mut self, delta: &Derivation, factor: RatFunc, note: &str) -> Derivation {
        let out = delta.scale(&factor);
        self.trace.push(TraceStep {
            chart: delta.chart().to_string(),
            note: note.into(),
            kind: TraceMove::Scale { factor },
        });
        out
    }

    /// Clear content to the coprime polynomial representative.
    fn saturate(&mut self, delta: &Derivation) -> Result<Derivation, ClassifyError> {
        let n = delta.normalize()?;
        let rep = n.representative(delta.chart());
        if !(n.content.is_polynomial() && n.content.num().is_one()) {
            let factor = n.content.inv()?;
            self.trace.push(TraceStep {
                chart: delta.chart().to_string(),
                note: "clear the content to coprime polynomial coefficients".into(),
                kind: TraceMove::Scale { factor },
            });
        }
        Ok(rep)
    }

    fn reduce_hirzebruch(
        &mut self,
        delta: Derivation,
        depth: u32,
    ) -> Result<CanonicalForm, ClassifyError> {
        if depth > 4 {
            return Err(ClassifyError::Internal("reduction did not terminate".into()));
        }
        let rep = self.saturate(&delta)?;
        let n = rep.normalize()?;
        if n.f.is_zero() {
            return Ok(CanonicalForm::vertical("U1"));
        }
        if n.g.is_zero() {
            // f d/dx ~ d/dx ~ x d/dx, the i = 0 diagonal class
            return Ok(CanonicalForm::diagonal(0, "U1"));
        }
        let nf = self
            .atlas
            .normal_form_check(&rep)?
            .ok_or_else(|| ClassifyError::Internal("saturated field left the section shape".into()))?;
        let NormalFormCoefficients::Hirzebruch { a2, a1, a0, b, f, .. } = nf else {
            return Err(ClassifyError::Internal("expected the Hirzebruch shape".into()));
        };
        let field = self.field;
        let d = self.d;

        if a2 == 0 && a1 == 0 {
            // constant d/dx part (normalized to 1)
            if a0 != 1 {
                return Err(ClassifyError::Internal("normalized constant must be 1".into()));
            }
            if b != 0 {
                return Err(ClassifyError::Internal(
                    "p-closedness forces b = 0 in the constant branch".into(),
                ));
            }
            // p-closedness forces F^(p-1) = 0, i.e. F_j = 0 for j = -1 mod p
            for (j, cj) in f.iter().enumerate() {
                if *cj != 0 && (j as u64 + 1) % field.p() == 0 {
                    return Err(ClassifyError::Internal(
                        "p-closedness forces the (p-1)-th derivative of F to vanish".into(),
                    ));
                }
            }
            if f.last().copied().unwrap_or(0) != 0 {
                // deg F = d: the quotient is singular over the opposite end of
                // the base only, which no translation can move to the origin
                return Err(ClassifyError::ArrangementContradiction(format!(
                    "deg F = d = {d} leaves the only section singular point at the far chart origin"
                )));
            }
            if f.iter().all(|&c| c == 0) {
                return Ok(CanonicalForm::diagonal(0, "U1"));
            }
            // antiderivative G with G' = F, deg G <= d
            let mut g = Poly::zero(field, self.vars());
            let x = self.x();
            for (j, cj) in f.iter().enumerate() {
                if *cj != 0 {
                    let inv = field.inv(field.reduce(j as u64 + 1)).unwrap();
                    g = g.add(&x.pow(j as u32 + 1).scale(field.mul(*cj, inv)));
                }
            }
            let shifted = self.fiber_shift(
                &rep,
                g,
                "remove the fiber drift by the antiderivative section 1/y -> 1/y + G(x)",
            )?;
            let check = shifted.normalize()?;
            if !(check.f.is_one() && check.g.is_zero()) {
                return Err(ClassifyError::Internal(
                    "fiber shift did not straighten the constant branch".into(),
                ));
            }
            return Ok(CanonicalForm::diagonal(0, "U1"));
        }

        if a2 == 0 {
            // linear branch: scale to monic, translate the root to the origin
            let mut cur = rep;
            let mut bb = b;
            let mut fvec = f;
            if a1 != 1 {
                let inv = field.inv(a1).unwrap();
                cur = self.scale_step(
                    &cur,
                    RatFunc::constant(field, self.vars(), inv),
                    "scale to make the linear coefficient monic",
                );
                bb = field.mul(bb, inv);
                fvec = fvec.iter().map(|c| field.mul(*c, inv)).collect();
            }
            let root = field.neg(field.mul(a0, field.inv(a1).unwrap()));
            if root != 0 {
                cur = self.translate_x(&cur, root)?;
                // F picks up the substitution x -> x + root
                let x = self.x();
                let mut fpoly = Poly::zero(field, self.vars());
                for (j, cj) in fvec.iter().enumerate() {
                    fpoly = fpoly.add(&x.pow(j as u32).scale(*cj));
                }
                let shifted = fpoly.substitute_poly(&[x.add(&self.constant(root)), self.y()]);
                fvec = (0..=d).map(|j| shifted.coeff(&[j, 0])).collect();
            }
            if bb == 0 {
                return Err(ClassifyError::Internal(
                    "saturated linear branch must have b != 0 when p-closed".into(),
                ));
            }
            // fiber shift with s_j = F_j / (j + b)
            let mut s = Poly::zero(field, self.vars());
            let x = self.x();
            for (j, cj) in fvec.iter().enumerate() {
                if *cj == 0 {
                    continue;
                }
                let denom = field.reduce(j as u64 + bb);
                if denom == 0 {
                    return Err(ClassifyError::Internal(
                        "resonant section coefficient contradicts p-closedness".into(),
                    ));
                }
                s = s.add(&x.pow(j as u32).scale(field.mul(*cj, field.inv(denom).unwrap())));
            }
            let out = if s.is_zero() {
                cur
            } else {
                self.fiber_shift(&cur, s, "remove the section part of the fiber coefficient")?
            };
            // must now be exactly x d/dx + b y d/dy
            let expect = Derivation::raw(
                "U1",
                self.rf(self.x()),
                self.rf(self.y().scale(bb)),
            );
            let got = out.normalize()?;
            let want = expect.normalize()?;
            if got.f != want.f || got.g != want.g {
                return Err(ClassifyError::Internal(
                    "linear branch did not reach the diagonal form".into(),
                ));
            }
            return Ok(CanonicalForm::diagonal(bb, "U1"));
        }

        // quadratic branch: scale to monic, find a rational root
        let mut cur = rep;
        if a2 != 1 {
            let inv = field.inv(a2).unwrap();
            cur = self.scale_step(
                &cur,
                RatFunc::constant(field, self.vars(), inv),
                "scale to make the quadratic coefficient monic",
            );
        }
        let monic_a1 = field.div(a1, a2).unwrap();
        let monic_a0 = field.div(a0, a2).unwrap();
        let roots: Vec<u64> = field
            .elements()
            .filter(|&r| {
                field.add(field.mul(r, r), field.add(field.mul(monic_a1, r), monic_a0)) == 0
            })
            .collect();
        let Some(&root) = roots.first() else {
            // The quadratic is irreducible over the base field, so the two
            // singular points on the negative section are conjugate over
            // F_{p^2} and no rational translation reaches them. The diagonal
            // parameter is still determined: it equals the fiber/base
            // eigenvalue ratio at either point, which p-closedness forces
            // into the base field.
            let n = cur.normalize()?;
            let i = section_eigenvalue_ratio(&n.f, &n.g, field)?;
            self.used_direct_route = true;
            return Ok(CanonicalForm::diagonal(i, "U1"));
        };
        cur = self.translate_x(&cur, root)?;
        // now x^2 + a1' x with a1' = 2*root + monic_a1
        let a1p = field.add(field.add(root, root), monic_a1);
        if a1p == 0 {
            return Err(ClassifyError::NilpotentAtSingularPoint(
                "double root at the origin forces a nilpotent field with a singular point".into(),
            ));
        }
        let c = field.inv(a1p).unwrap();
        let shifted = self.base_shift(&cur, c)?;
        self.reduce_hirzebruch(shifted, depth + 1)
    }

    // ---- the product-surface (d = 0) reduction ----

    fn reduce_product(&mut self, delta: Derivation) -> Result<CanonicalForm, ClassifyError> {
        let rep = self.saturate(&delta)?;
        let n = rep.normalize()?;
        if n.f.is_zero() {
            return Ok(CanonicalForm::vertical("U1"));
        }
        if n.g.is_zero() {
            return Ok(CanonicalForm::diagonal(0, "U1"));
        }
        let field = self.field;
        let fa = FactorProfile::of(&n.f, 0, field)?;
        let fb = FactorProfile::of(&n.g, 1, field)?;
        use FactorKind::*;
        match (&fa.kind, &fb.kind) {
            (Constant, Constant)
            | (Constant, DoubleRoot { .. })
            | (DoubleRoot { .. }, Constant)
            | (DoubleRoot { .. }, DoubleRoot { .. }) => Err(ClassifyError::NilpotentAtSingularPoint(
                "both factors are nilpotent one-variable fields and the zero scheme is nonempty".into(),
            )),
            (Irreducible, _) | (_, Irreducible) => {
                // eigenvalue-ratio route: i = nu/mu is Frobenius invariant
                let mu2 = fa.multiplier_square(field);
                let nu2 = fb.multiplier_square(field);
                let ratio2 = field.div(nu2, mu2).map_err(|_| {
                    ClassifyError::Internal("vanishing discriminant in the irreducible branch".into())
                })?;
                let i0 = field
                    .elements()
                    .find(|&i| field.mul(i, i) == ratio2)
                    .ok_or_else(|| {
                        ClassifyError::Internal(
                            "eigenvalue ratio of a p-closed pair must be rational".into(),
                        )
                    })?;
                let i = i0.min(field.neg(i0));
                if i == 0 {
                    return Err(ClassifyError::Internal("zero eigenvalue ratio".into()));
                }
                self.used_direct_route = true;
                Ok(CanonicalForm::diagonal(i, "U1"))
            }
            _ => {
                // both factors have rational multiplicative structure
                let mut cur = rep;
                cur = self.rationalize_factor(&cur, &fa, 0)?;
                cur = self.rationalize_factor(&cur, &fb, 1)?;
                let m = cur.normalize()?;
                // now mu * x d/dx + nu * y d/dy
                let (mx, ny) = (m.f.clone(), m.g.clone());
                let x = self.x();
                let y = self.y();
                let mu_ok = mx == x;
                let nu = ny.coeff(&[0, 1]);
                if !mu_ok || ny != y.scale(nu) || nu == 0 {
                    return Err(ClassifyError::Internal(
                        "product reduction did not reach a diagonal form".into(),
                    ));
                }
                Ok(CanonicalForm::diagonal(nu, "U1"))
            }
        }
    }

    /// Apply the base moves that turn a one-variable factor with rational
    /// zeros into a multiple of the coordinate: translation for a linear
    /// factor, a fractional-linear change for a split quadratic.
    fn rationalize_factor(
        &mut self,
        delta: &Derivation,
        profile: &FactorProfile,
        which: usize,
    ) -> Result<Derivation, ClassifyError> {
        let field = self.field;
        let vars = self.vars();
        let v = Poly::var(field, vars.clone(), &vars[which]).unwrap();
        let other = Poly::var(field, vars.clone(), &vars[1 - which]).unwrap();
        let name = vars[which].clone();
        match &profile.kind {
            FactorKind::Linear { root } => {
                if *root == 0 {
                    return Ok(delta.clone());
                }
                let new_v = self.rf(v.sub(&Poly::constant(field, vars.clone(), *root)));
                let old_v = self.rf(v.add(&Poly::constant(field, vars.clone(), *root)));
                let (new_in_old, old_in_new) = if which == 0 {
                    ([new_v, self.rf(other.clone())], [old_v, self.rf(other)])
                } else {
                    ([self.rf(other.clone()), new_v], [self.rf(other), old_v])
                };
                self.coord_change(
                    delta,
                    new_in_old,
                    old_in_new,
                    &format!("translate the fixed point {name} = {root} to the origin"),
                )
            }
            FactorKind::SplitQuadratic { r1, r2 } => {
                // v -> (v - r1)/(v - r2) sends the fixed points to 0 and infinity
                let c = |u: u64| Poly::constant(field, vars.clone(), u);
                let new_v = RatFunc::new(v.sub(&c(*r1)), v.sub(&c(*r2))).unwrap();
                // inverse: v = (r2 V - r1)/(V - 1)
                let old_v = RatFunc::new(v.scale(*r2).sub(&c(*r1)), v.sub(&c(1))).unwrap();
                let (new_in_old, old_in_new) = if which == 0 {
                    ([new_v, self.rf(other.clone())], [old_v, self.rf(other)])
                } else {
                    ([self.rf(other.clone()), new_v], [self.rf(other), old_v])
                };
                self.coord_change(
                    delta,
                    new_in_old,
                    old_in_new,
                    &format!("send the fixed points {name} = {r1}, {r2} to 0 and infinity"),
                )
            }
            FactorKind::Constant => Err(ClassifyError::Internal(
                "constant factor paired with a multiplicative one is not p-closed".into(),
            )),
            _ => Err(ClassifyError::Internal("unexpected factor profile".into())),
        }
    }
}

/// A one-variable coefficient of degree <= 2 together with its
/// multiplicative structure.
#[derive(Debug, Clone, PartialEq)]
struct FactorProfile {
    a0: u64,
    a1: u64,
    a2: u64,
    kind: FactorKind,
}

#[derive(Debug, Clone, PartialEq)]
enum FactorKind {
    Constant,
    Linear { root: u64 },
    SplitQuadratic { r1: u64, r2: u64 },
    DoubleRoot { root: u64 },
    Irreducible,
}

impl FactorProfile {
    fn of(q: &Poly, which: usize, field: PrimeField) -> Result<FactorProfile, ClassifyError> {
        if q.degree_in(1 - which) > 0 || q.degree_in(which) > 2 {
            return Err(ClassifyError::Internal(
                "product factor must be a one-variable quadratic".into(),
            ));
        }
        let coeff = |e: u32| {
            let mut exps = [0u32; 2];
            exps[which] = e;
            q.coeff(&exps)
        };
        let (a0, a1, a2) = (coeff(0), coeff(1), coeff(2));
        let kind = if a2 == 0 && a1 == 0 {
            FactorKind::Constant
        } else if a2 == 0 {
            FactorKind::Linear {
                root: field.neg(field.div(a0, a1).unwrap()),
            }
        } else {
            let roots: Vec<u64> = field
                .elements()
                .filter(|&r| {
                    field.add(
                        field.mul(a2, field.mul(r, r)),
                        field.add(field.mul(a1, r), a0),
                    ) == 0
                })
                .collect();
            match roots.len() {
                2 => FactorKind::SplitQuadratic {
                    r1: roots[0],
                    r2: roots[1],
                },
                1 => {
                    let r = roots[0];
                    let deriv = field.add(field.mul(field.reduce(2), field.mul(a2, r)), a1);
                    if deriv == 0 {
                        FactorKind::DoubleRoot { root: r }
                    } else {
                        // a separable quadratic with one rational root splits
                        return Err(ClassifyError::Internal(
                            "separable quadratic with exactly one rational root".into(),
                        ));
                    }
                }
                0 => FactorKind::Irreducible,
                _ => return Err(ClassifyError::Internal("quadratic with 3 roots".into())),
            }
        };
        Ok(FactorProfile { a0, a1, a2, kind })
    }

    /// Square of the fixed-point multiplier, a base-field invariant even when
    /// the fixed points are irrational: the discriminant a1^2 - 4 a2 a0
    /// (which is a1^2 for a linear factor).
    fn multiplier_square(&self, field: PrimeField) -> u64 {
        field.sub(
            field.mul(self.a1, self.a1),
            field.mul(field.reduce(4), field.mul(self.a2, self.a0)),
        )
    }
}

/// Eigenvalue ratio nu/mu of a section normal form at a root of its monic
/// irreducible base quadratic, computed over F_{p^2}: mu is the derivative of
/// the base coefficient, nu the fiber derivative of the full d/dy
/// coefficient. For a p-closed field the ratio is Frobenius invariant and
/// equals the diagonal class parameter.
fn section_eigenvalue_ratio(f: &Poly, g: &Poly, field: PrimeField) -> Result<u64, ClassifyError> {
    use crate::atlas::{eval2, univariate_coeffs};
    use crate::extfield::ExtField;
    let ext = ExtField::new(field, 2);
    let fc = univariate_coeffs(f, 0);
    let root = ext
        .elements()
        .into_iter()
        .find(|x| ext.is_zero(&ext.eval_poly(&fc, x)))
        .ok_or_else(|| ClassifyError::Internal("quadratic has no root over F_{p^2}".into()))?;
    let fprime = f.partial_derivative_idx(0);
    let gy = g.partial_derivative_idx(1);
    let zero = ext.zero();
    let mu = eval2(&fprime, &ext, &root, &zero);
    let nu = eval2(&gy, &ext, &root, &zero);
    let mu_inv = ext
        .inv(&mu)
        .ok_or_else(|| ClassifyError::Internal("inseparable irreducible quadratic".into()))?;
    let ratio = ext.mul(&nu, &mu_inv);
    if ext.min_subfield_degree(&ratio) != 1 {
        return Err(ClassifyError::Internal(
            "eigenvalue ratio of a p-closed field must lie in the base field".into(),
        ));
    }
    Ok(ratio.0[0])
}

/// Run the reduction for a normal-form record. Implements the proof steps as
/// executable rewrites: clearing content, arrangement translations, the
/// antiderivative fiber shift, the section-removal fiber shift, and the base
/// shift for the quadratic branch, each recorded in a replayable trace.
pub fn reduce(
    nf: &NormalFormCoefficients,
    field: PrimeField,
) -> Result<ClassificationReport, ClassifyError> {
    let delta = nf.to_derivation(field).ok_or(ClassifyError::ZeroDerivation)?;
    if delta.p_closed_witness()?.is_none() {
        return Err(ClassifyError::NotPClosed);
    }
    let d = nf.d();
    let surface = SurfaceKind::Hirzebruch(d);
    let atlas = SurfaceAtlas::new(surface, field);
    let mut reducer = Reducer {
        atlas: &atlas,
        field,
        d,
        trace: Vec::new(),
        used_direct_route: false,
    };
    let canonical = match nf {
        NormalFormCoefficients::Hirzebruch { .. } => reducer.reduce_hirzebruch(delta.clone(), 0)?,
        NormalFormCoefficients::Product { .. } => reducer.reduce_product(delta.clone())?,
    };
    let fan = canonical_to_fan(&canonical.variant, surface, field.p())?;
    let direct_route = reducer.used_direct_route;
    Ok(ClassificationReport {
        surface: surface.to_string(),
        p: field.p(),
        input: delta.render(),
        trace: reducer.trace,
        canonical,
        fan,
        direct_route,
    })
}

/// Check that replaying the trace transforms the input into the canonical
/// representative, exactly (up to the equivalence scaling, i.e. with equal
/// normalized coprime coefficients).
pub fn verify_replay(report: &ClassificationReport, nf: &NormalFormCoefficients, field: PrimeField) -> Result<bool, ClassifyError> {
    let surface = SurfaceKind::Hirzebruch(nf.d());
    let atlas = SurfaceAtlas::new(surface, field);
    let delta = nf.to_derivation(field).ok_or(ClassifyError::ZeroDerivation)?;
    let replayed = replay_trace(&delta, &atlas, &report.trace)?;
    let target = report.canonical.representative(&atlas)?;
    let a = replayed.normalize()?;
    let b = target.normalize()?;
    Ok(a.f == b.f && a.g == b.g)
}

// ---- the projective-plane classification ----

/// A linear vector field (M v + t) . grad on the first chart.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LinearField {
    pub m: [[u64; 2]; 2],
    pub t: [u64; 2],
}

impl LinearField {
    pub fn to_derivation(&self, field: PrimeField) -> Option<Derivation> {
        let vars = varset(&["x", "y"]);
        let x = Poly::var(field, vars.clone(), "x").unwrap();
        let y = Poly::var(field, vars.clone(), "y").unwrap();
        let c = |v: u64| Poly::constant(field, vars.clone(), v);
        let fx = x.scale(self.m[0][0]).add(&y.scale(self.m[0][1])).add(&c(self.t[0]));
        let fy = x.scale(self.m[1][0]).add(&y.scale(self.m[1][1])).add(&c(self.t[1]));
        Derivation::new("U0", RatFunc::from_poly(fx), RatFunc::from_poly(fy)).ok()
    }
}

/// Classify a p-closed linear field on the projective plane by its eigenvalue
/// structure, with explicit coordinate moves. Returns the canonical form (a
/// diagonal class with i in 1..p-1) or the nilpotent obstruction.
pub fn classify_p2_linear(
    lf: &LinearField,
    field: PrimeField,
) -> Result<ClassificationReport, ClassifyError> {
    let delta = lf.to_derivation(field).ok_or(ClassifyError::ZeroDerivation)?;
    if delta.p_closed_witness()?.is_none() {
        return Err(ClassifyError::NotPClosed);
    }
    let atlas = SurfaceAtlas::new(SurfaceKind::ProjPlane, field);
    let vars = atlas.primary_chart().vars.clone();
    let mut trace: Vec<TraceStep> = Vec::new();
    let mut direct_route = false;

    let m = lf.m;
    let t = lf.t;
    let trace_m = field.add(m[0][0], m[1][1]);
    let det_m = field.sub(field.mul(m[0][0], m[1][1]), field.mul(m[0][1], m[1][0]));

    // helper: apply an affine substitution x' = A (x - x0)
    let mut apply_affine = |delta: &Derivation,
                            a: [[u64; 2]; 2],
                            x0: [u64; 2],
                            note: &str,
                            trace: &mut Vec<TraceStep>|
     -> Result<Derivation, ClassifyError> {
        let det = field.sub(field.mul(a[0][0], a[1][1]), field.mul(a[0][1], a[1][0]));
        let inv_det = field.inv(det).map_err(|_| ClassifyError::Internal("singular change of basis".into()))?;
        let ainv = [
            [field.mul(a[1][1], inv_det), field.mul(field.neg(a[0][1]), inv_det)],
            [field.mul(field.neg(a[1][0]), inv_det), field.mul(a[0][0], inv_det)],
        ];
        let x = Poly::var(field, vars.clone(), &vars[0]).unwrap();
        let y = Poly::var(field, vars.clone(), &vars[1]).unwrap();
        let c = |v: u64| Poly::constant(field, vars.clone(), v);
        let lin = |row: [u64; 2], shift: u64| {
            x.scale(row[0]).add(&y.scale(row[1])).add(&c(shift))
        };
        // new = A(old - x0); old = A^{-1} new + x0
        let sh0 = field.neg(field.add(field.mul(a[0][0], x0[0]), field.mul(a[0][1], x0[1])));
        let sh1 = field.neg(field.add(field.mul(a[1][0], x0[0]), field.mul(a[1][1], x0[1])));
        let new_in_old = [
            RatFunc::from_poly(lin(a[0], sh0)),
            RatFunc::from_poly(lin(a[1], sh1)),
        ];
        let old_in_new = [
            RatFunc::from_poly(lin(ainv[0], x0[0])),
            RatFunc::from_poly(lin(ainv[1], x0[1])),
        ];
        let out = delta.rewrite_coordinates("U0", &new_in_old, &old_in_new)?;
        trace.push(TraceStep {
            chart: "U0".into(),
            note: note.into(),
            kind: TraceMove::CoordChange { new_in_old, old_in_new },
        });
        Ok(out)
    };

    let canonical: CanonicalForm;
    let mut current = delta.clone();

    if m == [[0, 0], [0, 0]] {
        // constant field: rotate the direction onto d/dx, then pass to the
        // neighboring chart where it becomes the Euler field
        let a = if t[0] != 0 {
            [[field.inv(t[0]).unwrap(), 0], [field.neg(field.mul(t[1], field.inv(t[0]).unwrap())), 1]]
        } else {
            [[0, field.inv(t[1]).unwrap()], [1, 0]]
        };
        current = apply_affine(&current, a, [0, 0], "rotate the constant direction onto d/dx", &mut trace)?;
        current = atlas.transport(&current, "U1")?;
        trace.push(TraceStep {
            chart: "U1".into(),
            note: "re-express in the neighboring chart, where the field is a multiple of the Euler field".into(),
            kind: TraceMove::Transport { to: "U1".into() },
        });
        canonical = CanonicalForm::diagonal(1, "U1");
    } else if det_m == 0 {
        // rank-one matrix
        let nilpotent = {
            // eigenvalues are 0 and trace
            trace_m == 0
        };
        if nilpotent {
            // basis: v1 spanning the image, v2 with M v2 = v1
            let (v1, v2) = nilpotent_basis(field, m)
                .ok_or_else(|| ClassifyError::Internal("nonzero nilpotent matrix must have a cyclic vector".into()))?;
            // new coordinates dual to (v2, v1): delta = (y + c1) d/dx + c2 d/dy
            let a = invert_basis(field, [v1, v2])?;
            current = apply_affine(&current, a, [0, 0], "adapt coordinates to the nilpotent Jordan form", &mut trace)?;
            let cy = current.coeff_y().clone();
            let c2 = cy
                .as_poly()
                .map(|p| p.constant_coeff())
                .unwrap_or(0);
            if !cy.is_zero() && c2 != 0 {
                return Err(ClassifyError::NilpotentAtSingularPoint(
                    "nilpotent linear part with transverse drift has a singular point and vanishing p-th power".into(),
                ));
            }
            // delta = (y + c1) d/dx ~ d/dx after scaling
            let c1 = current
                .coeff_x()
                .as_poly()
                .map(|p| p.constant_coeff())
                .unwrap_or(0);
            if c1 != 0 {
                let shift = [[1, 0], [0, 1]];
                current = apply_affine(&current, shift, [0, field.neg(c1)], "translate the zero line through the origin", &mut trace)?;
            }
            let factor = current.coeff_x().inv()?;
            current = current.scale(&factor);
            trace.push(TraceStep {
                chart: "U0".into(),
                note: "clear the content; the field is equivalent to d/dx".into(),
                kind: TraceMove::Scale { factor },
            });
            current = atlas.transport(&current, "U1")?;
            trace.push(TraceStep {
                chart: "U1".into(),
                note: "re-express in the neighboring chart, where the field is a multiple of the Euler field".into(),
                kind: TraceMove::Transport { to: "U1".into() },
            });
            canonical = CanonicalForm::diagonal(1, "U1");
        } else {
            // semisimple with eigenvalues {0, trace}
            let lam = trace_m;
            let v_lam = eigenvector(field, m, lam)
                .ok_or_else(|| ClassifyError::Internal("missing eigenvector".into()))?;
            let v_ker = eigenvector(field, m, 0)
                .ok_or_else(|| ClassifyError::Internal("missing kernel vector".into()))?;
            let a = invert_basis(field, [v_ker, v_lam])?;
            current = apply_affine(&current, a, [0, 0], "diagonalize the rank-one semisimple part", &mut trace)?;
            // delta = c0 d/dx + (lam y + c1) d/dy; p-closedness forces c0 = 0
            let c0 = current.coeff_x().clone();
            if !c0.is_zero() {
                return Err(ClassifyError::Internal(
                    "drift along the kernel direction contradicts p-closedness".into(),
                ));
            }
            let c1 = current
                .coeff_y()
                .as_poly()
                .map(|p| p.constant_coeff())
                .unwrap_or(0);
            if c1 != 0 {
                let fix = field.neg(field.div(c1, lam).unwrap());
                current = apply_affine(&current, [[1, 0], [0, 1]], [0, field.neg(fix)], "translate the fixed point to the origin", &mut trace)?;
            }
            current = atlas.transport(&current, "U2")?;
            trace.push(TraceStep {
                chart: "U2".into(),
                note: "re-express in the chart at infinity of the fiber, where the field is a multiple of the Euler field".into(),
                kind: TraceMove::Transport { to: "U2".into() },
            });
            canonical = CanonicalForm::diagonal(1, "U2");
        }
    } else {
        // invertible matrix: translate the unique fixed point to the origin
        let inv_det = field.inv(det_m).unwrap();
        let minv = [
            [field.mul(m[1][1], inv_det), field.mul(field.neg(m[0][1]), inv_det)],
            [field.mul(field.neg(m[1][0]), inv_det), field.mul(m[0][0], inv_det)],
        ];
        let x0 = [
            field.neg(field.add(field.mul(minv[0][0], t[0]), field.mul(minv[0][1], t[1]))),
            field.neg(field.add(field.mul(minv[1][0], t[0]), field.mul(minv[1][1], t[1]))),
        ];
        if x0 != [0, 0] {
            current = apply_affine(&current, [[1, 0], [0, 1]], x0, "translate the fixed point to the origin", &mut trace)?;
        }
        // eigenvalues
        let disc = field.sub(field.mul(trace_m, trace_m), field.mul(field.reduce(4), det_m));
        let sqrt = field.elements().find(|&s| field.mul(s, s) == disc);
        let scalar = m[0][1] == 0 && m[1][0] == 0 && m[0][0] == m[1][1];
        if scalar {
            canonical = CanonicalForm::diagonal(1, "U0");
            let factor = RatFunc::constant(field, vars.clone(), field.inv(m[0][0]).unwrap());
            current = current.scale(&factor);
            trace.push(TraceStep {
                chart: "U0".into(),
                note: "scale the Euler multiple to the Euler field".into(),
                kind: TraceMove::Scale { factor },
            });
        } else if let Some(s) = sqrt {
            if s == 0 {
                // double eigenvalue, non-scalar: not semisimple, and such
                // fields are never p-closed
                return Err(ClassifyError::Internal(
                    "non-semisimple double eigenvalue contradicts p-closedness".into(),
                ));
            }
            let two_inv = field.inv(field.reduce(2)).ok();
            let (l1, l2) = match two_inv {
                Some(h) => {
                    let l1 = field.mul(field.add(trace_m, s), h);
                    let l2 = field.mul(field.sub(trace_m, s), h);
                    (l1.min(l2), l1.max(l2))
                }
                None => {
                    // characteristic 2 with distinct rational eigenvalues:
                    // roots of x^2 + trace x + det
                    let roots: Vec<u64> = field
                        .elements()
                        .filter(|&r| {
                            field.add(field.mul(r, r), field.add(field.mul(trace_m, r), det_m)) == 0
                        })
                        .collect();
                    if roots.len() != 2 {
                        return Err(ClassifyError::Internal("expected a split characteristic polynomial".into()));
                    }
                    (roots[0].min(roots[1]), roots[0].max(roots[1]))
                }
            };
            if l1 == 0 || l2 == 0 {
                return Err(ClassifyError::Internal("invertible matrix with zero eigenvalue".into()));
            }
            if l1 == l2 {
                return Err(ClassifyError::Internal("distinct-root branch hit equal eigenvalues".into()));
            }
            let v1 = eigenvector(field, m, l1)
                .ok_or_else(|| ClassifyError::Internal("missing eigenvector".into()))?;
            let v2 = eigenvector(field, m, l2)
                .ok_or_else(|| ClassifyError::Internal("missing eigenvector".into()))?;
            let a = invert_basis(field, [v1, v2])?;
            current = apply_affine(&current, a, [0, 0], "diagonalize in the eigenbasis (eigenvalues in increasing order)", &mut trace)?;
            let factor = RatFunc::constant(field, vars.clone(), field.inv(l1).unwrap());
            current = current.scale(&factor);
            trace.push(TraceStep {
                chart: "U0".into(),
                note: "scale the first eigenvalue to 1".into(),
                kind: TraceMove::Scale { factor },
            });
            let i = field.div(l2, l1).unwrap();
            canonical = CanonicalForm::diagonal(i, "U0");
        } else {
            // irrational eigenvalues: p-closedness forces trace = 0, and the
            // eigenvalue ratio is -1
            if trace_m != 0 {
                return Err(ClassifyError::Internal(
                    "irrational eigenvalues with nonzero trace contradict p-closedness".into(),
                ));
            }
            direct_route = true;
            canonical = CanonicalForm::diagonal(field.neg(1), "U0");
        }
    }

    // verify the replayable part
    if !direct_route {
        let target = canonical.representative(&atlas)?;
        let a = current.normalize()?;
        let b = target.normalize()?;
        if a.f != b.f || a.g != b.g {
            return Err(ClassifyError::Internal(
                "plane reduction did not reach its canonical representative".into(),
            ));
        }
    }

    let variant = canonical.variant.clone();
    let CanonicalVariant::Diagonal { i } = variant else {
        return Err(ClassifyError::Internal("plane classes are diagonal".into()));
    };
    if i == 0 {
        return Err(ClassifyError::Internal("plane diagonal parameter must be a unit".into()));
    }
    let fan = canonical_to_fan(&variant, SurfaceKind::ProjPlane, field.p())?;
    Ok(ClassificationReport {
        surface: SurfaceKind::ProjPlane.to_string(),
        p: field.p(),
        input: delta.render(),
        trace,
        canonical,
        fan,
        direct_route,
    })
}

fn eigenvector(field: PrimeField, m: [[u64; 2]; 2], lam: u64) -> Option<[u64; 2]> {
    // kernel of the singular matrix N = M - lam I
    let a = field.sub(m[0][0], lam);
    let b = m[0][1];
    let c = m[1][0];
    let d = field.sub(m[1][1], lam);
    debug_assert_eq!(field.sub(field.mul(a, d), field.mul(b, c)), 0);
    if (a, b) != (0, 0) {
        return Some([b, field.neg(a)]);
    }
    if (c, d) != (0, 0) {
        return Some([d, field.neg(c)]);
    }
    Some([1, 0]) // the zero matrix
}

fn nilpotent_basis(field: PrimeField, m: [[u64; 2]; 2]) -> Option<([u64; 2], [u64; 2])> {
    // v2 with M v2 != 0, v1 = M v2
    for v2 in [[1u64, 0], [0, 1]] {
        let v1 = [
            field.add(field.mul(m[0][0], v2[0]), field.mul(m[0][1], v2[1])),
            field.add(field.mul(m[1][0], v2[0]), field.mul(m[1][1], v2[1])),
        ];
        if v1 != [0, 0] {
            return Some((v1, v2));
        }
    }
    None
}

/// The matrix sending the basis (columns) to the standard basis, i.e. the
/// coordinate functions of the new basis.
fn invert_basis(field: PrimeField, basis: [[u64; 2]; 2]) -> Result<[[u64; 2]; 2], ClassifyError> {
    let det = field.sub(
        field.mul(basis[0][0], basis[1][1]),
        field.mul(basis[0][1], basis[1][0]),
    );
    let inv = field
        .inv(det)
        .map_err(|_| ClassifyError::Internal("degenerate basis".into()))?;
    Ok([
        [field.mul(basis[1][1], inv), field.mul(field.neg(basis[1][0]), inv)],
        [field.mul(field.neg(basis[0][1]), inv), field.mul(basis[0][0], inv)],
    ])
}

// ---- exhaustive enumeration ----

#[derive(Debug, Clone, Serialize, Default)]
pub struct EnumerationStats {
    pub tuples: u64,
    pub p_closed: u64,
    pub reduced: u64,
    pub rejected_nilpotent: u64,
    pub rejected_arrangement: u64,
    pub direct_route: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassEntry {
    pub canonical: CanonicalForm,
    pub fan: Fan,
    pub hits: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SurfaceClassification {
    pub surface: String,
    pub p: u64,
    pub classes: Vec<ClassEntry>,
    pub class_count: usize,
    pub stats: EnumerationStats,
}

fn decode_tuple(mut idx: u64, p: u64, len: usize) -> Vec<u64> {
    let mut out = vec![0u64; len];
    for slot in out.iter_mut() {
        *slot = idx % p;
        idx /= p;
    }
    out
}

fn first_nonzero_is_one(t: &[u64]) -> bool {
    t.iter().find(|&&c| c != 0).map(|&c| c == 1).unwrap_or(false)
}

enum Outcome {
    NotPClosed,
    Reduced(ClassificationReport),
    RejectedNilpotent,
    RejectedArrangement,
}

/// Enumerate all normal forms over F_p (modulo overall scaling), filter the
/// p-closed ones, reduce each, and collect the canonical fans. Classes are
/// the distinct canonical fans, matching the counting of sandwich structures
/// over the surface.
pub fn classify_surface(surface: SurfaceKind, p: u64) -> Result<SurfaceClassification, ClassifyError> {
    let field = PrimeField::new(p).map_err(|e| ClassifyError::Internal(e.to_string()))?;
    if p > 13 {
        return Err(ClassifyError::BudgetExceeded(format!("p = {p} exceeds 13")));
    }
    let len = match surface {
        SurfaceKind::ProjPlane => 6,
        SurfaceKind::Hirzebruch(d) => {
            if d > 6 {
                return Err(ClassifyError::BudgetExceeded(format!("d = {d} exceeds 6")));
            }
            if d == 0 {
                6
            } else {
                5 + d as usize
            }
        }
    };
    let total = (p as u128).pow(len as u32);
    if total > 50_000_000 {
        return Err(ClassifyError::BudgetExceeded(format!(
            "p^{len} = {total} coefficient tuples"
        )));
    }
    let total = total as u64;

    let outcomes: Result<Vec<Option<Outcome>>, ClassifyError> = (0..total)
        .into_par_iter()
        .map(|idx| {
            let tuple = decode_tuple(idx, p, len);
            if !first_nonzero_is_one(&tuple) {
                return Ok(None);
            }
            let res = match surface {
                SurfaceKind::ProjPlane => {
                    let lf = LinearField {
                        m: [[tuple[0], tuple[1]], [tuple[2], tuple[3]]],
                        t: [tuple[4], tuple[5]],
                    };
                    classify_p2_linear(&lf, field)
                }
                SurfaceKind::Hirzebruch(0) => {
                    let nf = NormalFormCoefficients::Product {
                        a: [tuple[0], tuple[1], tuple[2]],
                        b: [tuple[3], tuple[4], tuple[5]],
                    };
                    reduce(&nf, field)
                }
                SurfaceKind::Hirzebruch(d) => {
                    let nf = NormalFormCoefficients::Hirzebruch {
                        d,
                        a2: tuple[0],
                        a1: tuple[1],
                        a0: tuple[2],
                        b: tuple[3],
                        f: tuple[4..].to_vec(),
                    };
                    reduce(&nf, field)
                }
            };
            match res {
                Ok(report) => Ok(Some(Outcome::Reduced(report))),
                Err(ClassifyError::NotPClosed) => Ok(Some(Outcome::NotPClosed)),
                Err(ClassifyError::ZeroDerivation) => Ok(None),
                Err(ClassifyError::NilpotentAtSingularPoint(_)) => Ok(Some(Outcome::RejectedNilpotent)),
                Err(ClassifyError::ArrangementContradiction(_)) => Ok(Some(Outcome::RejectedArrangement)),
                Err(e) => Err(e),
            }
        })
        .collect();
    let outcomes = outcomes?;

    let mut stats = EnumerationStats::default();
    let mut by_fan: std::collections::BTreeMap<Vec<[i64; 2]>, ClassEntry> = Default::default();
    for o in outcomes.into_iter().flatten() {
        stats.tuples += 1;
        match o {
            Outcome::NotPClosed => {}
            Outcome::RejectedNilpotent => {
                stats.p_closed += 1;
                stats.rejected_nilpotent += 1;
            }
            Outcome::RejectedArrangement => {
                stats.p_closed += 1;
                stats.rejected_arrangement += 1;
            }
            Outcome::Reduced(report) => {
                stats.p_closed += 1;
                stats.reduced += 1;
                if report.direct_route {
                    stats.direct_route += 1;
                }
                let key = report.fan.rays().to_vec();
                let entry = by_fan.entry(key).or_insert_with(|| ClassEntry {
                    canonical: report.canonical.clone(),
                    fan: report.fan.clone(),
                    hits: 0,
                });
                entry.hits += 1;
                // keep the smallest canonical form as the class label
                if (report.canonical.variant.clone(), report.canonical.chart.clone())
                    < (entry.canonical.variant.clone(), entry.canonical.chart.clone())
                {
                    entry.canonical = report.canonical.clone();
                }
            }
        }
    }
    let mut classes: Vec<ClassEntry> = by_fan.into_values().collect();
    classes.sort_by(|a, b| {
        (a.canonical.variant.clone(), a.canonical.chart.clone())
            .cmp(&(b.canonical.variant.clone(), b.canonical.chart.clone()))
    });
    let class_count = classes.len();
    Ok(SurfaceClassification {
        surface: surface.to_string(),
        p,
        classes,
        class_count,
        stats,
    })
}

// ---- the global F-regularity verdict ----

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Obstruction {
    NotPClosed,
    NoGlobalSection,
    NilpotentAtSingularPoint,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum GfrVerdict {
    GloballyFRegular,
    NotGloballyFRegular(Obstruction),
    Unknown,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerdictReport {
    pub verdict: GfrVerdict,
    pub canonical: Option<CanonicalForm>,
    pub fan: Option<Fan>,
    /// Set when the input satisfies delta^p = delta and the splitting
    /// projector laws were verified on sample polynomials.
    pub splitting_verified: Option<bool>,
}

/// The verdict pipeline: p-closedness, the local nilpotency obstruction, the
/// global-section test, and reduction to a canonical (toric, hence globally
/// F-regular) form.
pub fn gfr_verdict(delta: &Derivation, atlas: &SurfaceAtlas) -> Result<VerdictReport, ClassifyError> {
    let field = atlas.field;
    // (a) p-closed
    let Some(_witness) = delta.p_closed_witness()? else {
        return Ok(VerdictReport {
            verdict: GfrVerdict::NotGloballyFRegular(Obstruction::NotPClosed),
            canonical: None,
            fan: None,
            splitting_verified: None,
        });
    };

    // (b) local nilpotency at a singular point, chart by chart on normalized
    // representatives
    for chart in atlas.charts() {
        let local = atlas.transport(delta, &chart.id)?;
        let n = local.normalize()?;
        let rep = n.representative(&chart.id);
        if rep.p_closed_witness()?.map(|h| h.is_zero()) == Some(true) {
            // nilpotent representative; obstructed when the coefficients have
            // a common zero on this chart
            if has_common_zero(&n.f, &n.g, field) {
                return Ok(VerdictReport {
                    verdict: GfrVerdict::NotGloballyFRegular(Obstruction::NilpotentAtSingularPoint),
                    canonical: None,
                    fan: None,
                    splitting_verified: None,
                });
            }
        }
    }

    // (c) global-section test
    let has_section = match atlas.kind {
        SurfaceKind::ProjPlane => atlas.foliation_degree_p2(delta)? >= 0,
        SurfaceKind::Hirzebruch(_) => atlas.normal_form_check(delta)?.is_some(),
    };
    if !has_section {
        return Ok(VerdictReport {
            verdict: GfrVerdict::NotGloballyFRegular(Obstruction::NoGlobalSection),
            canonical: None,
            fan: None,
            splitting_verified: None,
        });
    }

    // (d) reduce to a canonical form
    let reduced = match atlas.kind {
        SurfaceKind::ProjPlane => {
            let n = atlas.transport(delta, "U0")?.normalize()?;
            linear_field_from(&n.f, &n.g, field)
                .map(|lf| classify_p2_linear(&lf, field))
                .transpose()?
        }
        SurfaceKind::Hirzebruch(_) => {
            let nf = atlas.normal_form_check(delta)?;
            match nf {
                Some(nf) => Some(reduce(&nf, field)?),
                None => None,
            }
        }
    };
    let Some(report) = reduced else {
        return Ok(VerdictReport {
            verdict: GfrVerdict::Unknown,
            canonical: None,
            fan: None,
            splitting_verified: None,
        });
    };

    // verify the splitting projector when the input is multiplicative
    let splitting_verified = if delta.is_multiplicative_identity_witness()? {
        Some(verify_projector(delta))
    } else {
        None
    };

    Ok(VerdictReport {
        verdict: GfrVerdict::GloballyFRegular,
        canonical: Some(report.canonical),
        fan: Some(report.fan),
        splitting_verified,
    })
}

fn has_common_zero(f: &Poly, g: &Poly, field: PrimeField) -> bool {
    // exact test over the algebraic closure via the resultant: coprime pairs
    // have a common zero iff the resultant in y has a root (or is zero) after
    // accounting for the pure-x cases
    if f.is_zero() || g.is_zero() {
        return false; // normalize() output: the other entry is then a unit
    }
    if f.is_constant() || g.is_constant() {
        return false;
    }
    let res = match crate::atlas::resultant_in_y(f, g) {
        Ok(r) => r,
        Err(_) => return true,
    };
    if res.is_zero() {
        return true;
    }
    if res.is_constant() {
        // no affine common zero in this chart
        return false;
    }
    let _ = field;
    true // a nonconstant resultant has roots over the closure
}

fn linear_field_from(f: &Poly, g: &Poly, _field: PrimeField) -> Option<LinearField> {
    if f.total_degree() > 1 || g.total_degree() > 1 {
        return None;
    }
    Some(LinearField {
        m: [
            [f.coeff(&[1, 0]), f.coeff(&[0, 1])],
            [g.coeff(&[1, 0]), g.coeff(&[0, 1])],
        ],
        t: [f.coeff(&[0, 0]), g.coeff(&[0, 0])],
    })
}

/// Spot-check the projector laws of 1 - delta^(p-1) on a few polynomials.
fn verify_projector(delta: &Derivation) -> bool {
    let field = delta.field();
    let vars = delta.vars().clone();
    let x = Poly::var(field, vars.clone(), &vars[0]).unwrap();
    let y = Poly::var(field, vars.clone(), &vars[1]).unwrap();
    let samples = [
        Poly::one(field, vars.clone()),
        x.clone(),
        y.clone(),
        x.mul(&y).add(&x.pow(2)),
        x.pow(3).add(&y.pow(2).scale(2)).add(&Poly::constant(field, vars.clone(), 1)),
    ];
    for r in &samples {
        let Ok(pr) = delta.splitting_projector(r) else {
            return false;
        };
        // P(r) lies in the kernel
        if !delta.apply_poly(&pr).is_zero() {
            return false;
        }
        // idempotent
        let Ok(ppr) = delta.splitting_projector(&pr) else {
            return false;
        };
        if ppr != pr {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn field(p: u64) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    fn nf_hir(d: u32, a2: u64, a1: u64, a0: u64, b: u64, f: &[u64]) -> NormalFormCoefficients {
        NormalFormCoefficients::Hirzebruch {
            d,
            a2,
            a1,
            a0,
            b,
            f: f.to_vec(),
        }
    }

    #[test]
    fn reduce_already_diagonal() {
        for p in [2u64, 3, 5] {
            for i in 1..p {
                let nf = nf_hir(1, 0, 1, 0, i, &[0, 0]);
                let report = reduce(&nf, field(p)).unwrap();
                assert_eq!(report.canonical.variant, CanonicalVariant::Diagonal { i });
                assert!(verify_replay(&report, &nf, field(p)).unwrap());
            }
        }
    }

    #[test]
    fn reduce_constant_branch_with_antiderivative() {
        // d/dx - F(x) y^2 d/dy with F = c0 (deg F = 0 <= d-1), p = 3, d = 1:
        // nf = (0, 0, 1, b = 0, F = [c0, 0])
        let nf = nf_hir(1, 0, 0, 1, 0, &[1, 0]);
        let report = reduce(&nf, field(3)).unwrap();
        assert_eq!(report.canonical.variant, CanonicalVariant::Diagonal { i: 0 });
        assert!(!report.trace.is_empty());
        assert!(verify_replay(&report, &nf, field(3)).unwrap());
    }

    #[test]
    fn reduce_constant_branch_arrangement_contradiction() {
        // deg F = d with vanishing (p-1)-th derivative: p = 3, d = 1, F = x
        // fails (F' = 1), so use p = 2, d = 2, F = x^2
        let nf = nf_hir(2, 0, 0, 1, 0, &[0, 0, 1]);
        match reduce(&nf, field(2)) {
            Err(ClassifyError::ArrangementContradiction(_)) => {}
            other => panic!("expected the arrangement contradiction, got {other:?}"),
        }
    }

    #[test]
    fn reduce_linear_branch_with_series_shift() {
        // p = 3, d = 1: x d/dx + (c0 y + i) y d/dy with i = 2, c0 = 1:
        // p-closed needs j + b != 0 for F_j != 0: j = 0, b = 2 fine
        let nf = nf_hir(1, 0, 1, 0, 2, &[1, 0]);
        let report = reduce(&nf, field(3)).unwrap();
        assert_eq!(report.canonical.variant, CanonicalVariant::Diagonal { i: 2 });
        assert!(verify_replay(&report, &nf, field(3)).unwrap());
    }

    #[test]
    fn reduce_quadratic_branch() {
        // p = 3, d = 1: (x^2 + x) d/dx + (F y - x + b) y d/dy, picking a
        // p-closed instance by enumeration is implicit in classify; here use
        // F = 0, b such that the input is p-closed if possible; fall back to
        // checking that the reduction either classifies or rejects honestly.
        let f = field(3);
        let mut reduced = 0;
        for b in 0..3u64 {
            for c0 in 0..3u64 {
                for c1 in 0..3u64 {
                    let nf = nf_hir(1, 1, 1, 0, b, &[c0, c1]);
                    match reduce(&nf, f) {
                        Ok(report) => {
                            reduced += 1;
                            assert!(verify_replay(&report, &nf, f).unwrap());
                        }
                        Err(ClassifyError::NotPClosed)
                        | Err(ClassifyError::NilpotentAtSingularPoint(_))
                        | Err(ClassifyError::ArrangementContradiction(_)) => {}
                        Err(e) => panic!("unexpected error {e:?}"),
                    }
                }
            }
        }
        assert!(reduced > 0, "some quadratic-branch inputs must classify");
    }

    #[test]
    fn reduce_vertical() {
        let nf = nf_hir(1, 0, 0, 0, 1, &[0, 0]);
        let report = reduce(&nf, field(3)).unwrap();
        assert_eq!(report.canonical.variant, CanonicalVariant::Vertical);
        // fan: the refinement in the fiber direction
        let expect = build_fan(FanKind::SigmaHir { p: 3, d: 1, i: 3 }).unwrap();
        assert_eq!(report.fan, expect);
    }

    #[test]
    fn classify_counts_small() {
        // d >= 1: p + 1 classes
        let c = classify_surface(SurfaceKind::Hirzebruch(1), 2).unwrap();
        assert_eq!(c.class_count, 3);
        // d = 0: p classes
        let c = classify_surface(SurfaceKind::Hirzebruch(0), 3).unwrap();
        assert_eq!(c.class_count, 3);
        // plane: p - 1 classes
        let c = classify_surface(SurfaceKind::ProjPlane, 3).unwrap();
        assert_eq!(c.class_count, 2);
    }

    #[test]
    fn classify_budget() {
        assert!(matches!(
            classify_surface(SurfaceKind::Hirzebruch(7), 3),
            Err(ClassifyError::BudgetExceeded(_))
        ));
        assert!(matches!(
            classify_surface(SurfaceKind::ProjPlane, 17),
            Err(ClassifyError::BudgetExceeded(_))
        ));
    }

    #[test]
    fn verdict_examples() {
        // Euler field: globally F-regular with a verified splitting
        let atlas = SurfaceAtlas::new(SurfaceKind::ProjPlane, field(3));
        let d = Derivation::parse("x dx + y dy", field(3), varset(&["x", "y"]), "U0").unwrap();
        let v = gfr_verdict(&d, &atlas).unwrap();
        assert_eq!(v.verdict, GfrVerdict::GloballyFRegular);
        assert_eq!(v.splitting_verified, Some(true));

        // the square field at p = 2: nilpotent at a singular point
        let atlas = SurfaceAtlas::new(SurfaceKind::ProjPlane, field(2));
        let d = Derivation::parse("x^2 dx + y^2 dy", field(2), varset(&["x", "y"]), "U0").unwrap();
        let v = gfr_verdict(&d, &atlas).unwrap();
        assert_eq!(
            v.verdict,
            GfrVerdict::NotGloballyFRegular(Obstruction::NilpotentAtSingularPoint)
        );

        // the degree -1 foliation without nilpotency: no global section
        let d = Derivation::parse("x*y^2 dx + (x^2 + y^3) dy", field(2), varset(&["x", "y"]), "U0")
            .unwrap();
        let v = gfr_verdict(&d, &atlas).unwrap();
        assert_eq!(
            v.verdict,
            GfrVerdict::NotGloballyFRegular(Obstruction::NoGlobalSection)
        );

        // not p-closed
        let d = Derivation::parse("dx + x*y^2 dy", field(2), varset(&["x", "y"]), "U0").unwrap();
        let v = gfr_verdict(&d, &atlas).unwrap();
        assert_eq!(v.verdict, GfrVerdict::NotGloballyFRegular(Obstruction::NotPClosed));
    }

    #[test]
    fn verdict_constant_field_on_plane_is_gfr() {
        // d/dx ~ x d/dx transports to the Euler class: globally F-regular
        let atlas = SurfaceAtlas::new(SurfaceKind::ProjPlane, field(3));
        let d = Derivation::parse("dx", field(3), varset(&["x", "y"]), "U0").unwrap();
        let v = gfr_verdict(&d, &atlas).unwrap();
        assert_eq!(v.verdict, GfrVerdict::GloballyFRegular);
    }

    #[test]
    fn vertical_field_on_hirzebruch_is_gfr() {
        let atlas = SurfaceAtlas::new(SurfaceKind::Hirzebruch(1), field(2));
        let d = Derivation::parse("dy", field(2), varset(&["x", "y"]), "U1").unwrap();
        let v = gfr_verdict(&d, &atlas).unwrap();
        assert_eq!(v.verdict, GfrVerdict::GloballyFRegular);
        let fan = v.fan.unwrap();
        assert_eq!(fan, build_fan(FanKind::SigmaHir { p: 2, d: 1, i: 2 }).unwrap());
    }
}
