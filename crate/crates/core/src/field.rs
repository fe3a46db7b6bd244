//! Scalar arithmetic over the prime field GF(p).
//!
//! A [`FieldSpec`] is a validated prime modulus. All residues are plain
//! `u64` values kept in `[0, p)`; every operation reduces its result
//! immediately, so values taken from two contexts with the same modulus
//! are directly comparable.

use rand::Rng;

use crate::error::{Error, Result};

/// A residue in `[0, p)`.
pub type Residue = u64;

/// A validated prime modulus defining GF(p).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FieldSpec {
    p: u64,
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n.is_multiple_of(2) || n.is_multiple_of(3) {
        return false;
    }
    let mut d = 5u64;
    while d * d <= n {
        if n.is_multiple_of(d) || n.is_multiple_of(d + 2) {
            return false;
        }
        d += 6;
    }
    true
}

impl FieldSpec {
    /// Validates that `p` is prime; composite moduli are rejected.
    pub fn new(p: u64) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(FieldSpec { p })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    /// Reduces an arbitrary integer into `[0, p)`.
    pub fn reduce(&self, x: u64) -> Residue {
        x % self.p
    }

    /// Reduces a signed integer into `[0, p)`.
    pub fn reduce_i128(&self, x: i128) -> Residue {
        let p = self.p as i128;
        (((x % p) + p) % p) as u64
    }

    pub fn add(&self, a: Residue, b: Residue) -> Residue {
        debug_assert!(a < self.p && b < self.p);
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    pub fn sub(&self, a: Residue, b: Residue) -> Residue {
        debug_assert!(a < self.p && b < self.p);
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    pub fn neg(&self, a: Residue) -> Residue {
        debug_assert!(a < self.p);
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    pub fn mul(&self, a: Residue, b: Residue) -> Residue {
        debug_assert!(a < self.p && b < self.p);
        ((a as u128 * b as u128) % self.p as u128) as u64
    }

    /// Multiplicative inverse by the extended Euclidean algorithm.
    pub fn inv(&self, a: Residue) -> Result<Residue> {
        debug_assert!(a < self.p);
        if a == 0 {
            return Err(Error::NoInverse(a, self.p));
        }
        let (mut r0, mut r1) = (self.p as i128, a as i128);
        let (mut t0, mut t1) = (0i128, 1i128);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (t0, t1) = (t1, t0 - q * t1);
        }
        debug_assert_eq!(r0, 1, "gcd(a, p) must be 1 for prime p and a != 0");
        Ok(self.reduce_i128(t0))
    }

    pub fn pow(&self, a: Residue, mut e: u64) -> Residue {
        debug_assert!(a < self.p);
        let mut base = a;
        let mut acc = 1u64 % self.p;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Uniform sample from `[0, p)`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Residue {
        rng.gen_range(0..self.p)
    }

    /// Uniform sample from `[1, p)`.
    pub fn sample_nonzero<R: Rng + ?Sized>(&self, rng: &mut R) -> Residue {
        rng.gen_range(1..self.p)
    }

    /// Iterator over all residues `0..p`.
    pub fn elements(&self) -> impl Iterator<Item = Residue> {
        0..self.p
    }
}
