//! Arithmetic in the prime field F_p.
//!
//! Elements are stored as least non-negative residues in `u64`. The modulus
//! is capped at 2^31 so products never overflow a `u64`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("modulus {0} is not prime")]
    NotPrime(u64),
    #[error("modulus {0} out of range (need 2 <= p <= 2^31)")]
    OutOfRange(u64),
    #[error("division by zero in F_{0}")]
    DivisionByZero(u64),
}

/// The prime field F_p. Cheap to copy; passed by value everywhere.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeField {
    p: u64,
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self, FieldError> {
        if !(2..=1 << 31).contains(&p) {
            return Err(FieldError::OutOfRange(p));
        }
        if !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        Ok(PrimeField { p })
    }

    #[inline]
    pub fn p(&self) -> u64 {
        self.p
    }

    /// Least non-negative residue of a signed integer.
    #[inline]
    pub fn reduce_i64(&self, n: i64) -> u64 {
        let m = self.p as i64;
        (((n % m) + m) % m) as u64
    }

    #[inline]
    pub fn reduce(&self, n: u64) -> u64 {
        n % self.p
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        (a * b) % self.p
    }

    pub fn pow(&self, mut base: u64, mut exp: u64) -> u64 {
        let mut acc = 1u64;
        base %= self.p;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: u64) -> Result<u64, FieldError> {
        if a % self.p == 0 {
            return Err(FieldError::DivisionByZero(self.p));
        }
        Ok(self.pow(a, self.p - 2))
    }

    pub fn div(&self, a: u64, b: u64) -> Result<u64, FieldError> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// All field elements, in canonical order 0..p.
    pub fn elements(&self) -> impl Iterator<Item = u64> {
        0..self.p
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_composite_and_out_of_range() {
        assert!(PrimeField::new(1).is_err());
        assert!(PrimeField::new(4).is_err());
        assert!(PrimeField::new(91).is_err()); // 7 * 13
        assert!(PrimeField::new(2).is_ok());
        assert!(PrimeField::new(101).is_ok());
    }

    #[test]
    fn fermat_small() {
        for p in [2u64, 3, 5, 7, 13] {
            let f = PrimeField::new(p).unwrap();
            for a in 0..p {
                assert_eq!(f.pow(a, p), a, "a^p = a in F_{p}");
            }
        }
    }

    #[test]
    fn inverse_roundtrip() {
        let f = PrimeField::new(13).unwrap();
        for a in 1..13 {
            let inv = f.inv(a).unwrap();
            assert_eq!(f.mul(a, inv), 1);
        }
        assert!(f.inv(0).is_err());
    }

    #[test]
    fn signed_reduction() {
        let f = PrimeField::new(5).unwrap();
        assert_eq!(f.reduce_i64(-1), 4);
        assert_eq!(f.reduce_i64(-5), 0);
        assert_eq!(f.reduce_i64(7), 2);
    }
}
