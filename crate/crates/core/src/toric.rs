//! Rank-2 lattice and fan combinatorics: complete fans for the surfaces and
//! their quotients, overlattice refinements, dual-semigroup Hilbert bases,
//! cyclic-quotient singularity types, and GL(2,Z) fan isomorphism testing.

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ToricError {
    #[error("parameters out of range: {0}")]
    OutOfRange(String),
    #[error("rays do not form a complete strictly convex fan")]
    NotComplete,
    #[error("cone generators are parallel")]
    DegenerateCone,
}

pub type IVec2 = [i64; 2];

pub fn det2(a: IVec2, b: IVec2) -> i64 {
    a[0] * b[1] - a[1] * b[0]
}

fn gcd_i64(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub fn primitive(v: IVec2) -> IVec2 {
    let g = gcd_i64(v[0], v[1]);
    assert!(g != 0, "zero vector has no primitive generator");
    [v[0] / g, v[1] / g]
}

/// Strictly cyclically ordered complete fan in Z^2, canonicalized so the
/// lexicographically smallest ray comes first and the order is
/// counterclockwise.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Fan {
    rays: Vec<IVec2>,
}

fn ccw_cmp(a: IVec2, b: IVec2) -> std::cmp::Ordering {
    // angular order starting at the positive x-axis
    let half = |v: IVec2| -> u8 {
        if v[1] > 0 || (v[1] == 0 && v[0] > 0) {
            0
        } else {
            1
        }
    };
    half(a)
        .cmp(&half(b))
        .then_with(|| 0.cmp(&det2(a, b)))
}

impl Fan {
    /// Canonicalize a ray list: primitivize, order counterclockwise, start at
    /// the lexicographically smallest ray, and verify completeness.
    pub fn new(rays: Vec<IVec2>) -> Result<Fan, ToricError> {
        if rays.len() < 3 {
            return Err(ToricError::NotComplete);
        }
        let mut rays: Vec<IVec2> = rays.into_iter().map(primitive).collect();
        rays.sort_by(|a, b| ccw_cmp(*a, *b));
        rays.dedup();
        if rays.len() < 3 {
            return Err(ToricError::NotComplete);
        }
        // strict convexity of every consecutive cone, including the wrap
        for i in 0..rays.len() {
            let j = (i + 1) % rays.len();
            if det2(rays[i], rays[j]) <= 0 {
                return Err(ToricError::NotComplete);
            }
        }
        let min_idx = (0..rays.len()).min_by_key(|&i| rays[i]).unwrap();
        rays.rotate_left(min_idx);
        Ok(Fan { rays })
    }

    pub fn rays(&self) -> &[IVec2] {
        &self.rays
    }

    /// Maximal cones as consecutive ray pairs (counterclockwise).
    pub fn cones(&self) -> Vec<Cone2D> {
        (0..self.rays.len())
            .map(|i| Cone2D::new(self.rays[i], self.rays[(i + 1) % self.rays.len()]).unwrap())
            .collect()
    }
}

impl std::fmt::Display for Fan {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let rays: Vec<String> = self.rays.iter().map(|r| format!("({},{})", r[0], r[1])).collect();
        write!(f, "[{}]", rays.join(", "))
    }
}

/// A two-dimensional rational cone with primitive, positively oriented
/// generators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Cone2D {
    pub u1: IVec2,
    pub u2: IVec2,
}

impl Cone2D {
    /// Primitivize and orient the generators (swaps them when the given pair
    /// is negatively oriented).
    pub fn new(a: IVec2, b: IVec2) -> Result<Cone2D, ToricError> {
        let a = primitive(a);
        let b = primitive(b);
        match det2(a, b) {
            0 => Err(ToricError::DegenerateCone),
            d if d > 0 => Ok(Cone2D { u1: a, u2: b }),
            _ => Ok(Cone2D { u1: b, u2: a }),
        }
    }

    /// The index of the cone: the determinant of its generators.
    pub fn index(&self) -> i64 {
        det2(self.u1, self.u2)
    }

    pub fn apply(&self, m: [[i64; 2]; 2]) -> Result<Cone2D, ToricError> {
        let f = |v: IVec2| [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]];
        Cone2D::new(f(self.u1), f(self.u2))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FanKind {
    ProjPlane,
    Hirzebruch(u32),
    /// Quotient fan of the projective plane with parameter 1 <= i <= p-1.
    SigmaP2 { p: u64, i: u64 },
    /// Quotient fan of the Hirzebruch surface of index d, 0 <= i <= p.
    SigmaHir { p: u64, d: u32, i: u64 },
}

/// The exact ray lists of the surfaces and their quotient fans, each ray
/// reduced to its primitive generator.
pub fn build_fan(kind: FanKind) -> Result<Fan, ToricError> {
    let rays: Vec<IVec2> = match kind {
        FanKind::ProjPlane => vec![[1, 0], [0, 1], [-1, -1]],
        FanKind::Hirzebruch(d) => vec![[0, 1], [1, 0], [0, -1], [-1, d as i64]],
        FanKind::SigmaP2 { p, i } => {
            if i == 0 || i >= p {
                return Err(ToricError::OutOfRange(format!("need 1 <= i <= p-1, got i={i}, p={p}")));
            }
            let (p, i) = (p as i64, i as i64);
            vec![[0, 1], [p, -i], [-p, i - 1]]
        }
        FanKind::SigmaHir { p, d, i } => {
            if i > p {
                return Err(ToricError::OutOfRange(format!("need 0 <= i <= p, got i={i}, p={p}")));
            }
            let (pp, ii, dd) = (p as i64, i as i64, d as i64);
            if i == 0 {
                vec![[0, 1], [1, 0], [0, -1], [-pp, dd]]
            } else if i == p {
                vec![[0, 1], [1, 0], [0, -1], [-1, dd * pp]]
            } else {
                vec![[0, 1], [pp, -ii], [0, -1], [-pp, ii + dd]]
            }
        }
    };
    Fan::new(rays)
}

/// Basis (as rows) of the lattice generated by the given integer vectors.
fn lattice_basis(gens: &[IVec2]) -> [IVec2; 2] {
    let mut rows: Vec<IVec2> = gens.to_vec();
    rows.retain(|g| *g != [0, 0]);
    // Euclid on the first coordinates until at most one row keeps a nonzero one
    loop {
        let mut idx: Vec<usize> = (0..rows.len()).filter(|&i| rows[i][0] != 0).collect();
        if idx.len() <= 1 {
            break;
        }
        idx.sort_by_key(|&i| rows[i][0].abs());
        let (i0, i1) = (idx[0], idx[1]);
        let q = rows[i1][0] / rows[i0][0];
        rows[i1][0] -= q * rows[i0][0];
        rows[i1][1] -= q * rows[i0][1];
        rows.retain(|g| *g != [0, 0]);
    }
    let mut first = rows
        .iter()
        .find(|g| g[0] != 0)
        .copied()
        .expect("rank-2 lattice");
    if first[0] < 0 {
        first = [-first[0], -first[1]];
    }
    let mut y = 0i64;
    for g in &rows {
        if g[0] == 0 {
            y = gcd_i64(y, g[1]);
        }
    }
    assert!(y != 0, "rank-2 lattice");
    // reduce the first row's second coordinate modulo y (Hermite form)
    first[1] = first[1].rem_euclid(y);
    [first, [0, y]]
}

/// View the fan on the overlattice `N + Z (1/p)(a, b)` and re-express every
/// ray in a basis of the new lattice, reduced to primitive generators.
/// Requires gcd(a, b, p) = 1.
pub fn refine(fan: &Fan, vector: IVec2, p: u64) -> Result<Fan, ToricError> {
    let pp = p as i64;
    let g = gcd_i64(gcd_i64(vector[0], vector[1]), pp);
    if g != 1 {
        return Err(ToricError::OutOfRange(format!(
            "gcd of refinement vector ({}, {}) and p = {p} must be 1",
            vector[0], vector[1]
        )));
    }
    // the overlattice scaled by p
    let basis = lattice_basis(&[[pp, 0], [0, pp], vector]);
    let det = basis[0][0] * basis[1][1];
    debug_assert_eq!(det.abs(), pp, "index-p overlattice");
    let mut rays = Vec::new();
    for r in fan.rays() {
        let scaled = [pp * r[0], pp * r[1]];
        // solve alpha * b1 + beta * b2 = scaled
        let alpha = scaled[0] / basis[0][0];
        debug_assert_eq!(alpha * basis[0][0], scaled[0]);
        let rem = scaled[1] - alpha * basis[0][1];
        let beta = rem / basis[1][1];
        debug_assert_eq!(beta * basis[1][1], rem);
        rays.push([alpha, beta]);
    }
    Fan::new(rays)
}

/// Hilbert basis of the semigroup of lattice points of the dual cone
/// `{m : <m, a> >= 0 and <m, b> >= 0}`, sorted lexicographically.
pub fn dual_hilbert_basis(a: IVec2, b: IVec2) -> Vec<IVec2> {
    let (a, b) = if det2(a, b) > 0 { (a, b) } else { (b, a) };
    // extremal rays of the dual cone
    let w1 = primitive([b[1], -b[0]]);
    let w2 = primitive([-a[1], a[0]]);
    debug_assert!(w1[0] * a[0] + w1[1] * a[1] > 0);
    debug_assert!(w2[0] * b[0] + w2[1] * b[1] > 0);
    let d = det2(w1, w2);
    debug_assert!(d > 0);
    // lattice points of the half-open parallelogram [0,1)^2 in (w1, w2)
    let corners = [[0, 0], w1, w2, [w1[0] + w2[0], w1[1] + w2[1]]];
    let (xmin, xmax) = corners
        .iter()
        .fold((i64::MAX, i64::MIN), |(lo, hi), c| (lo.min(c[0]), hi.max(c[0])));
    let (ymin, ymax) = corners
        .iter()
        .fold((i64::MAX, i64::MIN), |(lo, hi), c| (lo.min(c[1]), hi.max(c[1])));
    let mut interior: Vec<IVec2> = Vec::new();
    for x in xmin..=xmax {
        for y in ymin..=ymax {
            let q = [x, y];
            if q == [0, 0] {
                continue;
            }
            // rational coordinates: alpha = det(q, w2)/d, beta = det(w1, q)/d
            let an = det2(q, w2);
            let bn = det2(w1, q);
            if an >= 0 && an < d && bn >= 0 && bn < d {
                interior.push(q);
            }
        }
    }
    let mut hb: Vec<IVec2> = vec![w1, w2];
    'outer: for c in &interior {
        for x in &interior {
            let rest = [c[0] - x[0], c[1] - x[1]];
            if rest != [0, 0] && interior.contains(&rest) {
                continue 'outer;
            }
        }
        hb.push(*c);
    }
    hb.sort();
    hb.dedup();
    hb
}

/// Hilbert basis of the dual semigroup expressed in cover exponents: the
/// columns of `A = [u1 u2]` are the lattice coordinates of the chart's dual
/// basis, and the output is `A^T` applied to the dual Hilbert basis. For a
/// `Cone2D` built from a refined chart this is the exponent list of the
/// invariant-monomial generators on that chart.
pub fn cover_exponent_gens(a: IVec2, b: IVec2) -> Vec<IVec2> {
    let hb = dual_hilbert_basis(a, b);
    let mut out: Vec<IVec2> = hb
        .into_iter()
        .map(|m| [a[0] * m[0] + a[1] * m[1], b[0] * m[0] + b[1] * m[1]])
        .collect();
    out.sort();
    out
}

/// `cover_exponent_gens` on the (primitive, oriented) generators of a cone.
pub fn semigroup_algebra_gens(cone: &Cone2D) -> Vec<IVec2> {
    cover_exponent_gens(cone.u1, cone.u2)
}

/// Hilbert basis of the reference semigroup
/// `{(alpha, beta) >= 0 : alpha + n*beta = 0 mod m}` by bounded-box
/// enumeration (every generator has both coordinates at most m).
pub fn reference_semigroup_hb(m: u64, n: u64) -> Vec<IVec2> {
    let mm = m as i64;
    let nn = (n % m) as i64;
    let member = |a: i64, b: i64| (a + nn * b).rem_euclid(mm) == 0;
    let mut cands: Vec<IVec2> = Vec::new();
    for a in 0..=mm {
        for b in 0..=mm {
            if (a, b) != (0, 0) && member(a, b) {
                cands.push([a, b]);
            }
        }
    }
    let in_semigroup = |v: IVec2| v[0] >= 0 && v[1] >= 0 && v != [0, 0] && member(v[0], v[1]);
    let mut hb = Vec::new();
    'outer: for c in &cands {
        for x in &cands {
            let rest = [c[0] - x[0], c[1] - x[1]];
            if rest != [0, 0] && rest[0] >= 0 && rest[1] >= 0 && in_semigroup(rest) {
                continue 'outer;
            }
        }
        hb.push(*c);
    }
    hb.sort();
    hb
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CyclicType {
    Smooth,
    Quotient { m: u64, a: u64 },
}

impl CyclicType {
    /// ADE alias for the types that have one (the A-series).
    pub fn ade_alias(&self) -> Option<String> {
        match self {
            CyclicType::Quotient { m, a } if *a == m - 1 || (*m == 2 && *a == 1) => {
                Some(format!("A_{}", m - 1))
            }
            _ => None,
        }
    }
}

impl std::fmt::Display for CyclicType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CyclicType::Smooth => write!(f, "smooth"),
            CyclicType::Quotient { m, a } => write!(f, "1/{m}(1,{a})"),
        }
    }
}

/// Reference Hilbert basis written in a basis of the sublattice spanned by
/// the congruence semigroup: (alpha, beta) -> ((alpha + n beta)/m, beta).
fn reference_hb_in_span_basis(m: u64, n: u64) -> Vec<IVec2> {
    let mm = m as i64;
    let nn = n as i64;
    let mut out: Vec<IVec2> = reference_semigroup_hb(m, n)
        .into_iter()
        .map(|v| [(v[0] + nn * v[1]) / mm, v[1]])
        .collect();
    out.sort();
    out
}

fn solve_unimodular(from: [IVec2; 2], to: [IVec2; 2]) -> Option<[[i64; 2]; 2]> {
    // U * from[k] = to[k]; U = [to] * adj([from]) / det([from])
    let d = det2(from[0], from[1]);
    if d == 0 {
        return None;
    }
    // columns of [from] are from[0], from[1]; adjugate:
    let adj = [[from[1][1], -from[1][0]], [-from[0][1], from[0][0]]];
    // [to] as columns times adj
    let num = [
        [
            to[0][0] * adj[0][0] + to[1][0] * adj[1][0],
            to[0][0] * adj[0][1] + to[1][0] * adj[1][1],
        ],
        [
            to[0][1] * adj[0][0] + to[1][1] * adj[1][0],
            to[0][1] * adj[0][1] + to[1][1] * adj[1][1],
        ],
    ];
    let mut u = [[0i64; 2]; 2];
    for r in 0..2 {
        for c in 0..2 {
            if num[r][c] % d != 0 {
                return None;
            }
            u[r][c] = num[r][c] / d;
        }
    }
    let du = u[0][0] * u[1][1] - u[0][1] * u[1][0];
    if du == 1 || du == -1 {
        Some(u)
    } else {
        None
    }
}

fn apply_mat(u: [[i64; 2]; 2], v: IVec2) -> IVec2 {
    [u[0][0] * v[0] + u[0][1] * v[1], u[1][0] * v[0] + u[1][1] * v[1]]
}

/// Cyclic-quotient type of a cone: smooth when the index is 1, otherwise the
/// canonical `1/m(1,a)` found by matching the dual-semigroup Hilbert basis
/// against the reference congruence semigroups under a lattice isomorphism.
pub fn cyclic_type(cone: &Cone2D) -> CyclicType {
    let m = cone.index() as u64;
    if m == 1 {
        return CyclicType::Smooth;
    }
    let hb = dual_hilbert_basis(cone.u1, cone.u2);
    // extremal primitive generators of the dual cone
    let w1 = primitive([cone.u2[1], -cone.u2[0]]);
    let w2 = primitive([-cone.u1[1], cone.u1[0]]);
    let mut matches: Vec<u64> = Vec::new();
    for n in 1..m {
        if gcd_i64(n as i64, m as i64) != 1 {
            continue;
        }
        let ref_hb = reference_hb_in_span_basis(m, n);
        // reference extremal generators in the span basis
        let r1 = [1, 0]; // image of (m, 0)
        let r2 = [n as i64, m as i64]; // image of (0, m)
        for (e1, e2) in [(w1, w2), (w2, w1)] {
            if let Some(u) = solve_unimodular([e1, e2], [r1, r2]) {
                let mut image: Vec<IVec2> = hb.iter().map(|v| apply_mat(u, *v)).collect();
                image.sort();
                if image == ref_hb {
                    matches.push(n);
                    break;
                }
            }
        }
    }
    assert!(
        !matches.is_empty(),
        "every two-dimensional cone matches some reference type"
    );
    CyclicType::Quotient { m, a: matches[0] }
}

/// Canonical `1/m(1,a)` form of the two-weight type `1/m(w1, w2)`, matched by
/// the brute-force semigroup oracle (coordinate swap allowed). Both weights
/// must be units modulo m.
pub fn canonical_two_weight(m: u64, w1: u64, w2: u64) -> u64 {
    assert!(m > 1);
    assert!(gcd_i64(w1 as i64, m as i64) == 1 && gcd_i64(w2 as i64, m as i64) == 1);
    // normalize the first weight to 1
    let f = |x: u64, e: u64| -> u64 {
        // x^e mod m by squaring (m need not be prime here, but weights are units)
        let mut acc = 1u64;
        let mut b = x % m;
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * b % m;
            }
            b = b * b % m;
            e >>= 1;
        }
        acc
    };
    let _ = f;
    let inv_w1 = (1..m).find(|c| c * w1 % m == 1).expect("unit weight");
    let n0 = inv_w1 * w2 % m;
    let target = reference_semigroup_hb(m, n0);
    let swapped: Vec<IVec2> = {
        let mut s: Vec<IVec2> = target.iter().map(|v| [v[1], v[0]]).collect();
        s.sort();
        s
    };
    let mut matches: Vec<u64> = Vec::new();
    for n in 1..m {
        if gcd_i64(n as i64, m as i64) != 1 {
            continue;
        }
        let cand = reference_semigroup_hb(m, n);
        if cand == target || cand == swapped {
            matches.push(n);
        }
    }
    assert!(!matches.is_empty());
    matches[0]
}

/// Search for a unimodular matrix carrying one complete fan onto another:
/// adjacent ray pairs of the first fan are matched against adjacent pairs of
/// the second in both orientations, the 2x2 system is solved, and a candidate
/// is accepted when it is integral, has determinant +-1, and maps the ray set
/// bijectively.
pub fn fan_isomorphic(f1: &Fan, f2: &Fan) -> Option<[[i64; 2]; 2]> {
    if f1.rays().len() != f2.rays().len() {
        return None;
    }
    let n = f2.rays().len();
    let from = [f1.rays()[0], f1.rays()[1]];
    for j in 0..n {
        for dir in [1usize, n - 1] {
            let to = [f2.rays()[j], f2.rays()[(j + dir) % n]];
            let Some(u) = solve_unimodular(from, to) else {
                continue;
            };
            let mut image: Vec<IVec2> = f1.rays().iter().map(|r| apply_mat(u, *r)).collect();
            image.sort();
            let mut target: Vec<IVec2> = f2.rays().to_vec();
            target.sort();
            if image == target {
                return Some(u);
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn build_hirzebruch_fan() {
        let f = build_fan(FanKind::Hirzebruch(2)).unwrap();
        let mut rays = f.rays().to_vec();
        rays.sort();
        assert_eq!(rays, vec![[-1, 2], [0, -1], [0, 1], [1, 0]]);
    }

    #[test]
    fn build_sigma_examples() {
        let f = build_fan(FanKind::SigmaHir { p: 3, d: 1, i: 1 }).unwrap();
        let mut rays = f.rays().to_vec();
        rays.sort();
        assert_eq!(rays, vec![[-3, 2], [0, -1], [0, 1], [3, -1]]);

        // primitivization: (-2, 2) -> (-1, 1), giving the index-1 Hirzebruch fan
        let f = build_fan(FanKind::SigmaHir { p: 2, d: 2, i: 0 }).unwrap();
        let h1 = build_fan(FanKind::Hirzebruch(1)).unwrap();
        assert_eq!(f, h1);
    }

    #[test]
    fn refinement_identities() {
        for p in [2u64, 3, 5] {
            for d in 0..=3u32 {
                let h = build_fan(FanKind::Hirzebruch(d)).unwrap();
                for i in 0..=p {
                    let refined = if i == p {
                        refine(&h, [0, 1], p).unwrap()
                    } else {
                        refine(&h, [1, i as i64], p).unwrap()
                    };
                    let built = build_fan(FanKind::SigmaHir { p, d, i }).unwrap();
                    assert_eq!(refined, built, "p={p} d={d} i={i}");
                }
            }
            let p2 = build_fan(FanKind::ProjPlane).unwrap();
            for i in 1..p {
                let refined = refine(&p2, [1, i as i64], p).unwrap();
                let built = build_fan(FanKind::SigmaP2 { p, i }).unwrap();
                assert_eq!(refined, built, "p={p} i={i}");
            }
        }
    }

    #[test]
    fn double_refinement_is_frobenius() {
        for p in [2u64, 3, 5] {
            for d in 0..=2u32 {
                let h = build_fan(FanKind::Hirzebruch(d)).unwrap();
                let once = refine(&h, [1, 0], p).unwrap();
                let twice = refine(&once, [0, 1], p).unwrap();
                assert_eq!(twice, h, "scaling both coordinates by 1/p reproduces the fan");
            }
        }
    }

    #[test]
    fn dual_hilbert_basis_veronese() {
        // dual data for the cone ((0,1), (p,-1)) in cover exponents:
        // x^p, x^(p-1) y, ..., y^p
        for p in [2i64, 3, 5] {
            let cone = Cone2D::new([0, 1], [p, -1]).unwrap();
            let gens = semigroup_algebra_gens(&cone);
            let expected: Vec<IVec2> = (0..=p).map(|k| [p - k, k]).collect();
            let mut expected = expected;
            expected.sort();
            assert_eq!(gens, expected);
        }
        // smooth cone
        let cone = Cone2D::new([0, 1], [1, 0]).unwrap();
        assert_eq!(semigroup_algebra_gens(&cone), vec![[0, 1], [1, 0]]);
        // A_1 quadric cone at p = 2
        let cone = Cone2D::new([0, 1], [2, -1]).unwrap();
        assert_eq!(
            semigroup_algebra_gens(&cone),
            vec![[0, 2], [1, 1], [2, 0]]
        );
    }

    #[test]
    fn cyclic_types() {
        for p in [2i64, 3, 5, 7] {
            let cone = Cone2D::new([0, 1], [p, -1]).unwrap();
            assert_eq!(
                cyclic_type(&cone),
                CyclicType::Quotient { m: p as u64, a: 1 },
                "p = {p}"
            );
        }
        assert_eq!(
            cyclic_type(&Cone2D::new([0, 1], [1, 0]).unwrap()),
            CyclicType::Smooth
        );
        // 1/5(1,2): the canonical representative of the pair {2, 3}
        assert_eq!(
            cyclic_type(&Cone2D::new([0, 1], [5, -2]).unwrap()),
            CyclicType::Quotient { m: 5, a: 2 }
        );
        // and its swap partner normalizes to the same canonical value
        assert_eq!(
            cyclic_type(&Cone2D::new([0, 1], [5, -3]).unwrap()),
            CyclicType::Quotient { m: 5, a: 2 }
        );
    }

    #[test]
    fn cyclic_type_gl2z_invariance_spot() {
        let cone = Cone2D::new([0, 1], [7, -3]).unwrap();
        let t = cyclic_type(&cone);
        for m in [[[1, 1], [0, 1]], [[0, -1], [1, 0]], [[2, 1], [1, 1]]] {
            let moved = cone.apply(m).unwrap();
            assert_eq!(cyclic_type(&moved), t);
        }
    }

    #[test]
    fn canonical_two_weight_examples() {
        // 1/5(1,2) ~ 1/5(1,3) (swap), canonical 2
        assert_eq!(canonical_two_weight(5, 1, 2), 2);
        assert_eq!(canonical_two_weight(5, 1, 3), 2);
        // 1/5(2,1): normalize the first weight, 2^{-1} = 3, type 1/5(1,3) ~ 2
        assert_eq!(canonical_two_weight(5, 2, 1), 2);
        assert_eq!(canonical_two_weight(5, 1, 4), 4);
        assert_eq!(canonical_two_weight(2, 1, 1), 1);
    }

    #[test]
    fn ade_alias() {
        assert_eq!(
            CyclicType::Quotient { m: 2, a: 1 }.ade_alias(),
            Some("A_1".into())
        );
        assert_eq!(
            CyclicType::Quotient { m: 5, a: 4 }.ade_alias(),
            Some("A_4".into())
        );
        assert_eq!(CyclicType::Quotient { m: 5, a: 2 }.ade_alias(), None);
    }

    #[test]
    fn fan_isomorphism_reflexive_and_absent() {
        let f = build_fan(FanKind::SigmaHir { p: 3, d: 1, i: 1 }).unwrap();
        let id = fan_isomorphic(&f, &f).unwrap();
        let du = id[0][0] * id[1][1] - id[0][1] * id[1][0];
        assert!(du == 1 || du == -1);

        let g = build_fan(FanKind::SigmaHir { p: 3, d: 1, i: 2 }).unwrap();
        assert!(fan_isomorphic(&f, &g).is_none());
    }

    #[test]
    fn fan_isomorphism_p1p1_refinement() {
        for p in [2u64, 3, 5] {
            let h0 = build_fan(FanKind::Hirzebruch(0)).unwrap();
            let refined = refine(&h0, [1, 0], p).unwrap();
            assert!(fan_isomorphic(&h0, &refined).is_some());
            // they are in fact the same canonical fan
            assert_eq!(h0, refined);
        }
    }

    #[test]
    fn fan_isomorphism_witness_maps_rays() {
        let f1 = build_fan(FanKind::SigmaP2 { p: 5, i: 2 }).unwrap();
        let f2 = build_fan(FanKind::SigmaP2 { p: 5, i: 3 }).unwrap();
        // these two quotient fans are genuinely unimodularly equivalent
        let u = fan_isomorphic(&f1, &f2).expect("equivalent fans");
        let mut image: Vec<IVec2> = f1.rays().iter().map(|r| apply_mat(u, *r)).collect();
        image.sort();
        let mut target = f2.rays().to_vec();
        target.sort();
        assert_eq!(image, target);
    }

    #[test]
    fn out_of_range_parameters() {
        assert!(build_fan(FanKind::SigmaP2 { p: 5, i: 0 }).is_err());
        assert!(build_fan(FanKind::SigmaP2 { p: 5, i: 5 }).is_err());
        assert!(build_fan(FanKind::SigmaHir { p: 3, d: 1, i: 4 }).is_err());
        assert!(refine(&build_fan(FanKind::ProjPlane).unwrap(), [2, 4], 2).is_err());
    }

    #[test]
    fn incomplete_fans_rejected() {
        assert!(Fan::new(vec![[1, 0], [0, 1]]).is_err());
        assert!(Fan::new(vec![[1, 0], [0, 1], [1, 1]]).is_err());
    }
}
