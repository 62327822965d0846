//! The prime field F_p.
//!
//! Elements are plain `u64` canonical residues in `[0, p)`; the modulus lives in
//! a [`PrimeField`] context. Moduli are restricted to odd primes below 2^32 so
//! that every product of two residues fits in a `u64` without widening.

use crate::error::{Error, Result};

/// A canonical residue in `[0, p)`. The modulus is carried by context.
pub type FieldElement = u64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PrimeField {
    p: u64,
}

pub fn is_prime(n: u64) -> bool {
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
    pub fn new(p: u64) -> Result<Self> {
        if p <= 2 || p >= (1 << 32) || !is_prime(p) {
            return Err(Error::BadModulus(p));
        }
        Ok(Self { p })
    }

    #[inline]
    pub fn p(&self) -> u64 {
        self.p
    }

    #[inline]
    pub fn reduce(&self, x: u64) -> FieldElement {
        x % self.p
    }

    #[inline]
    pub fn from_i64(&self, x: i64) -> FieldElement {
        x.rem_euclid(self.p as i64) as u64
    }

    #[inline]
    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    #[inline]
    pub fn neg(&self, a: FieldElement) -> FieldElement {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        (a * b) % self.p
    }

    pub fn pow(&self, mut base: FieldElement, mut e: u64) -> FieldElement {
        let mut acc = 1 % self.p;
        base %= self.p;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse via Fermat; `None` for zero.
    pub fn inv(&self, a: FieldElement) -> Option<FieldElement> {
        #[cfg(test)]
        tests::INVERSIONS.with(|c| c.set(c.get() + 1));
        let a = a % self.p;
        if a == 0 {
            None
        } else {
            Some(self.pow(a, self.p - 2))
        }
    }

    /// The image of `num / den` in F_p, if `den` is invertible.
    pub fn ratio(&self, num: i64, den: i64) -> Option<FieldElement> {
        let d = self.inv(self.from_i64(den))?;
        Some(self.mul(self.from_i64(num), d))
    }

    /// Maps a residue to the symmetric range `(-p/2, p/2]` for display.
    pub fn signed(&self, a: FieldElement) -> i64 {
        if a > self.p / 2 {
            a as i64 - self.p as i64
        } else {
            a as i64
        }
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use std::cell::Cell;

    thread_local! {
        pub(crate) static INVERSIONS: Cell<usize> = const { Cell::new(0) };
    }

    pub(crate) fn inversions() -> usize {
        INVERSIONS.with(|c| c.get())
    }

    #[test]
    fn rejects_bad_moduli() {
        for p in [0, 1, 2, 4, 9, 15, 1 << 33] {
            assert!(PrimeField::new(p).is_err(), "{p}");
        }
        for p in [3, 5, 7, 11, 13, 4_294_967_291] {
            assert!(PrimeField::new(p).is_ok(), "{p}");
        }
    }

    #[test]
    fn inverse_and_ratio() {
        let f = PrimeField::new(7).unwrap();
        for a in 1..7 {
            assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
        }
        assert_eq!(f.inv(0), None);
        assert_eq!(f.ratio(1, 2), Some(4));
        assert_eq!(f.ratio(-2, 4), Some(3));
        assert_eq!(f.ratio(3, 7), None);
    }

    #[test]
    fn signed_representatives() {
        let f = PrimeField::new(5).unwrap();
        assert_eq!(f.signed(4), -1);
        assert_eq!(f.signed(2), 2);
        assert_eq!(f.from_i64(-7), 3);
    }
}
