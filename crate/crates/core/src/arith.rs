//! Small modular-arithmetic helpers shared across the crate.

use crate::{Error, Result};

/// A validated modulus. 2 <= m <= 2^31, so products of reduced residues fit
/// in u64 without overflow. m = 1 is rejected everywhere by construction.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Modulus(u64);

impl Modulus {
    pub const fn cap() -> u64 {
        1 << 31
    }

    pub fn new(m: u64) -> Result<Self> {
        if m < 2 || m > Self::cap() {
            return Err(Error::BadModulus(m));
        }
        Ok(Modulus(m))
    }

    #[inline]
    pub fn get(self) -> u64 {
        self.0
    }

    #[inline]
    pub fn reduce(self, x: u64) -> u64 {
        x % self.0
    }

    /// Reduce a signed integer to its least nonnegative residue.
    #[inline]
    pub fn reduce_signed(self, x: i64) -> u64 {
        let m = self.0 as i64;
        (x.rem_euclid(m)) as u64
    }

    #[inline]
    pub fn add(self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.0 {
            s - self.0
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.0 - b
        }
    }

    #[inline]
    pub fn neg(self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.0 - a
        }
    }

    #[inline]
    pub fn mul(self, a: u64, b: u64) -> u64 {
        a * b % self.0
    }

    pub fn pow(self, mut base: u64, mut exp: u64) -> u64 {
        base %= self.0;
        let mut acc = 1 % self.0;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    pub fn is_unit(self, a: u64) -> bool {
        gcd(a % self.0, self.0) == 1
    }

    /// Inverse of a unit. Errors on non-units.
    pub fn inv(self, a: u64) -> Result<u64> {
        let a = a % self.0;
        let (g, x, _) = egcd(a as i64, self.0 as i64);
        if g != 1 {
            return Err(Error::NotAUnit { value: a, m: self.0 });
        }
        Ok(self.reduce_signed(x))
    }
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Returns (g, x, y) with a*x + b*y = g = gcd(a, b).
pub fn egcd(a: i64, b: i64) -> (i64, i64, i64) {
    if b == 0 {
        return (a.abs(), a.signum(), 0);
    }
    let (g, x, y) = egcd(b, a % b);
    (g, y, x - (a / b) * y)
}

/// n! as u64; n <= 20 keeps this exact.
pub fn factorial(n: u8) -> u64 {
    (1..=n as u64).product::<u64>().max(1)
}

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Multiplicative order of a modulo n (gcd(a, n) must be 1), with a cap.
/// Returns None if the order exceeds `cap`.
pub fn mult_order(a: u64, n: u64, cap: u32) -> Option<u32> {
    debug_assert!(gcd(a % n, n) == 1);
    let mut acc = a % n;
    for k in 1..=cap {
        if acc == 1 % n {
            return Some(k);
        }
        acc = acc * (a % n) % n;
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modulus_rejects_degenerate() {
        assert!(Modulus::new(0).is_err());
        assert!(Modulus::new(1).is_err());
        assert!(Modulus::new(2).is_ok());
        assert!(Modulus::new(Modulus::cap() + 1).is_err());
    }

    #[test]
    fn inverse_round_trip() {
        let m = Modulus::new(25).unwrap();
        for a in 1..25 {
            if m.is_unit(a) {
                let inv = m.inv(a).unwrap();
                assert_eq!(m.mul(a, inv), 1);
            } else {
                assert!(m.inv(a).is_err());
            }
        }
    }

    #[test]
    fn order_examples() {
        assert_eq!(mult_order(2, 5, 32), Some(4));
        assert_eq!(mult_order(7, 18, 32), Some(3));
        assert_eq!(mult_order(11, 50, 32), Some(5));
    }
}
