//! Finite extension fields F_{p^k}, used for locating singular points over
//! extensions of the base field.
//!
//! Elements are coefficient vectors modulo a fixed monic irreducible
//! polynomial of degree k, found by search. Fields here are tiny (p^k in the
//! thousands), so brute-force enumeration is the intended usage pattern.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::field::PrimeField;

/// The field F_{p^k} presented as F_p[g]/(modulus).
#[derive(Debug, Clone)]
pub struct ExtField {
    base: PrimeField,
    k: u32,
    /// Monic irreducible modulus, coefficients of 1, g, ..., g^k.
    modulus: Arc<Vec<u64>>,
}

/// An element of an `ExtField`: coefficients of 1, g, ..., g^(k-1).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct ExtElem(pub Vec<u64>);

impl ExtField {
    pub fn new(base: PrimeField, k: u32) -> ExtField {
        assert!(k >= 1);
        let modulus = find_irreducible(base, k);
        ExtField {
            base,
            k,
            modulus: Arc::new(modulus),
        }
    }

    pub fn base(&self) -> PrimeField {
        self.base
    }

    pub fn degree(&self) -> u32 {
        self.k
    }

    pub fn order(&self) -> u64 {
        self.base.p().pow(self.k)
    }

    pub fn zero(&self) -> ExtElem {
        ExtElem(vec![0; self.k as usize])
    }

    pub fn one(&self) -> ExtElem {
        self.from_base(1)
    }

    pub fn from_base(&self, c: u64) -> ExtElem {
        let mut v = vec![0; self.k as usize];
        v[0] = self.base.reduce(c);
        ExtElem(v)
    }

    pub fn is_zero(&self, a: &ExtElem) -> bool {
        a.0.iter().all(|&c| c == 0)
    }

    pub fn add(&self, a: &ExtElem, b: &ExtElem) -> ExtElem {
        ExtElem(
            a.0.iter()
                .zip(&b.0)
                .map(|(&x, &y)| self.base.add(x, y))
                .collect(),
        )
    }

    pub fn sub(&self, a: &ExtElem, b: &ExtElem) -> ExtElem {
        ExtElem(
            a.0.iter()
                .zip(&b.0)
                .map(|(&x, &y)| self.base.sub(x, y))
                .collect(),
        )
    }

    pub fn neg(&self, a: &ExtElem) -> ExtElem {
        ExtElem(a.0.iter().map(|&x| self.base.neg(x)).collect())
    }

    pub fn mul(&self, a: &ExtElem, b: &ExtElem) -> ExtElem {
        let k = self.k as usize;
        let f = self.base;
        let mut prod = vec![0u64; 2 * k - 1];
        for (i, &x) in a.0.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.0.iter().enumerate() {
                prod[i + j] = f.add(prod[i + j], f.mul(x, y));
            }
        }
        // reduce modulo the monic modulus
        for d in (k..prod.len()).rev() {
            let c = prod[d];
            if c == 0 {
                continue;
            }
            prod[d] = 0;
            for j in 0..k {
                let m = self.modulus[j];
                if m != 0 {
                    prod[d - k + j] = f.sub(prod[d - k + j], f.mul(c, m));
                }
            }
        }
        prod.truncate(k);
        ExtElem(prod)
    }

    pub fn pow(&self, a: &ExtElem, mut e: u64) -> ExtElem {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: &ExtElem) -> Option<ExtElem> {
        if self.is_zero(a) {
            return None;
        }
        Some(self.pow(a, self.order() - 2))
    }

    /// All field elements in lexicographic coefficient order.
    pub fn elements(&self) -> Vec<ExtElem> {
        let k = self.k as usize;
        let p = self.base.p();
        let mut out = Vec::with_capacity(self.order() as usize);
        let mut v = vec![0u64; k];
        loop {
            out.push(ExtElem(v.clone()));
            let mut i = 0;
            loop {
                if i == k {
                    return out;
                }
                v[i] += 1;
                if v[i] < p {
                    break;
                }
                v[i] = 0;
                i += 1;
            }
        }
    }

    /// Degree of the minimal subfield F_{p^d} containing `a` (a divisor of k):
    /// the least d with a^(p^d) = a.
    pub fn min_subfield_degree(&self, a: &ExtElem) -> u32 {
        let p = self.base.p();
        for d in 1..=self.k {
            if self.k % d == 0 {
                let frob = self.pow(a, p.pow(d));
                if frob == *a {
                    return d;
                }
            }
        }
        self.k
    }

    /// Evaluate a dense univariate F_p-polynomial (coefficients of 1, t, ...)
    /// at an extension element.
    pub fn eval_poly(&self, coeffs: &[u64], x: &ExtElem) -> ExtElem {
        let mut acc = self.zero();
        for &c in coeffs.iter().rev() {
            acc = self.mul(&acc, x);
            if c != 0 {
                acc = self.add(&acc, &self.from_base(c));
            }
        }
        acc
    }

    /// Render with generator name `g` (degree-one elements print as numbers).
    pub fn render(&self, a: &ExtElem) -> String {
        if self.k == 1 {
            return a.0[0].to_string();
        }
        let mut parts = Vec::new();
        for (i, &c) in a.0.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let s = match (i, c) {
                (0, c) => c.to_string(),
                (1, 1) => "g".into(),
                (1, c) => format!("{c}*g"),
                (i, 1) => format!("g^{i}"),
                (i, c) => format!("{c}*g^{i}"),
            };
            parts.push(s);
        }
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }
}

impl fmt::Display for ExtField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({}^{})", self.base.p(), self.k)
    }
}

// ---- univariate helpers over F_p used for the irreducibility search ----

fn poly_mod_mul(f: PrimeField, a: &[u64], b: &[u64], m: &[u64]) -> Vec<u64> {
    let k = m.len() - 1;
    let mut prod = vec![0u64; a.len() + b.len()];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = f.add(prod[i + j], f.mul(x, y));
        }
    }
    for d in (k..prod.len()).rev() {
        let c = prod[d];
        if c == 0 {
            continue;
        }
        prod[d] = 0;
        for j in 0..k {
            if m[j] != 0 {
                prod[d - k + j] = f.sub(prod[d - k + j], f.mul(c, m[j]));
            }
        }
    }
    prod.truncate(k);
    while prod.len() < k {
        prod.push(0);
    }
    prod
}

fn x_pow_q_mod(f: PrimeField, q: u64, m: &[u64]) -> Vec<u64> {
    let k = m.len() - 1;
    let mut acc = vec![0u64; k];
    acc[0] = 1;
    let mut base = vec![0u64; k];
    if k == 1 {
        base[0] = f.neg(m[0]); // x = -m0 mod (x + m0)
    } else {
        base[1] = 1;
    }
    let mut e = q;
    while e > 0 {
        if e & 1 == 1 {
            acc = poly_mod_mul(f, &acc, &base, m);
        }
        base = poly_mod_mul(f, &base, &base, m);
        e >>= 1;
    }
    acc
}

fn poly_gcd_univ(f: PrimeField, a: &[u64], b: &[u64]) -> Vec<u64> {
    fn trim(v: &mut Vec<u64>) {
        while v.last() == Some(&0) {
            v.pop();
        }
    }
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    trim(&mut a);
    trim(&mut b);
    while !b.is_empty() {
        // a mod b
        let db = b.len() - 1;
        let lb_inv = f.inv(b[db]).unwrap();
        while a.len() > db {
            let da = a.len() - 1;
            let c = f.mul(a[da], lb_inv);
            if c != 0 {
                for j in 0..=db {
                    a[da - db + j] = f.sub(a[da - db + j], f.mul(c, b[j]));
                }
            }
            trim(&mut a);
            if a.is_empty() {
                break;
            }
        }
        std::mem::swap(&mut a, &mut b);
    }
    a
}

fn is_irreducible(f: PrimeField, m: &[u64]) -> bool {
    let k = (m.len() - 1) as u32;
    let p = f.p();
    // x^(p^k) == x mod m
    let mut xq = x_pow_q_mod(f, p.pow(k), m);
    if k as usize == 1 {
        return true;
    }
    // subtract x
    xq[1] = f.sub(xq[1], 1);
    if xq.iter().any(|&c| c != 0) {
        return false;
    }
    // for each prime divisor q of k: gcd(x^(p^(k/q)) - x, m) must be constant
    let mut divisors = Vec::new();
    let mut n = k;
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            divisors.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        divisors.push(n);
    }
    for q in divisors {
        let mut g = x_pow_q_mod(f, p.pow(k / q), m);
        g[1] = f.sub(g[1], 1);
        let gcd = poly_gcd_univ(f, &g, m);
        if gcd.len() > 1 {
            return false;
        }
    }
    true
}

/// Smallest (in coefficient order) monic irreducible of degree k over F_p.
fn find_irreducible(f: PrimeField, k: u32) -> Vec<u64> {
    let kk = k as usize;
    let p = f.p();
    let mut coeffs = vec![0u64; kk + 1];
    coeffs[kk] = 1;
    loop {
        if is_irreducible(f, &coeffs) {
            return coeffs;
        }
        let mut i = 0;
        loop {
            assert!(i < kk, "no irreducible polynomial found (impossible)");
            coeffs[i] += 1;
            if coeffs[i] < p {
                break;
            }
            coeffs[i] = 0;
            i += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_axioms_f4() {
        let f = ExtField::new(PrimeField::new(2).unwrap(), 2);
        let els = f.elements();
        assert_eq!(els.len(), 4);
        for a in &els {
            // a^4 = a
            assert_eq!(f.pow(a, 4), *a);
            if !f.is_zero(a) {
                let inv = f.inv(a).unwrap();
                assert_eq!(f.mul(a, &inv), f.one());
            }
        }
    }

    #[test]
    fn frobenius_fixed_field() {
        let f = ExtField::new(PrimeField::new(3).unwrap(), 2);
        let mut rational = 0;
        for a in f.elements() {
            if f.min_subfield_degree(&a) == 1 {
                rational += 1;
            }
        }
        assert_eq!(rational, 3); // exactly F_3 inside F_9
    }

    #[test]
    fn degree_four_tower() {
        let f = ExtField::new(PrimeField::new(2).unwrap(), 4);
        assert_eq!(f.order(), 16);
        let counts = f
            .elements()
            .iter()
            .map(|a| f.min_subfield_degree(&a))
            .fold([0usize; 5], |mut acc, d| {
                acc[d as usize] += 1;
                acc
            });
        assert_eq!(counts[1], 2); // F_2
        assert_eq!(counts[2], 2); // F_4 minus F_2
        assert_eq!(counts[4], 12);
    }

    #[test]
    fn eval_poly_roots() {
        // t^2 + 1 has no roots in F_3 but two in F_9
        let base = PrimeField::new(3).unwrap();
        let f9 = ExtField::new(base, 2);
        let poly = [1u64, 0, 1];
        let roots: Vec<_> = f9
            .elements()
            .into_iter()
            .filter(|x| f9.is_zero(&f9.eval_poly(&poly, x)))
            .collect();
        assert_eq!(roots.len(), 2);
        for r in roots {
            assert_eq!(f9.min_subfield_degree(&r), 2);
        }
    }
}
