//! Exact arithmetic modulo an odd prime p, with F_p identified with
//! the integers {0, 1, ..., p-1}.
//!
//! Field elements are plain `u32` values. Range checks run in debug and
//! test builds only; the verifier exercises these operations in inner
//! loops and release builds must not pay for validation.

use thiserror::Error;

/// Largest accepted modulus. Keeps `a + b` and `a + p` inside `u32` and
/// all products inside `u64`.
pub const MAX_MODULUS: u64 = (1 << 31) - 1;

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
pub enum ModulusError {
    #[error("modulus must be an integer >= 2, got {0}")]
    TooSmall(u64),
    #[error("p = 2 is not supported; the smallest usable prime is 3")]
    Two,
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("modulus {0} is out of the supported range (must be < 2^31)")]
    TooLarge(u64),
}

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
pub enum FieldError {
    #[error("zero has no multiplicative inverse")]
    InverseOfZero,
}

/// A validated odd prime p >= 3 together with the arithmetic of F_p.
///
/// `PrimeModulus` is `Copy` and carries no tables; every operation is a
/// pure function of its arguments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PrimeModulus {
    p: u32,
}

impl PrimeModulus {
    /// Validates `n` and wraps it. Rejects n < 2, n = 2 and composite n
    /// with distinct error kinds.
    pub fn new(n: u64) -> Result<Self, ModulusError> {
        match n {
            0 | 1 => Err(ModulusError::TooSmall(n)),
            2 => Err(ModulusError::Two),
            n if n > MAX_MODULUS => Err(ModulusError::TooLarge(n)),
            n if !is_prime(n) => Err(ModulusError::NotPrime(n)),
            n => Ok(Self { p: n as u32 }),
        }
    }

    #[inline(always)]
    pub fn p(self) -> u32 {
        self.p
    }

    #[inline(always)]
    pub fn add(self, a: u32, b: u32) -> u32 {
        debug_assert!(a < self.p && b < self.p);
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline(always)]
    pub fn sub(self, a: u32, b: u32) -> u32 {
        debug_assert!(a < self.p && b < self.p);
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    #[inline(always)]
    pub fn neg(self, a: u32) -> u32 {
        debug_assert!(a < self.p);
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline(always)]
    pub fn mul(self, a: u32, b: u32) -> u32 {
        debug_assert!(a < self.p && b < self.p);
        ((a as u64 * b as u64) % self.p as u64) as u32
    }

    /// Multiplicative inverse by the extended Euclidean algorithm.
    pub fn inv(self, a: u32) -> Result<u32, FieldError> {
        debug_assert!(a < self.p);
        if a == 0 {
            return Err(FieldError::InverseOfZero);
        }
        let (mut r0, mut r1) = (a as i64, self.p as i64);
        let (mut t0, mut t1) = (1i64, 0i64);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (t0, t1) = (t1, t0 - q * t1);
        }
        debug_assert_eq!(r0, 1, "gcd(a, p) must be 1 for prime p");
        Ok(t0.rem_euclid(self.p as i64) as u32)
    }
}

/// Deterministic primality by trial division up to sqrt(n). Entirely
/// adequate at the scale this crate targets.
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

/// All primes in the inclusive range `[lo, hi]`.
pub fn primes_in(lo: u64, hi: u64) -> Vec<u64> {
    (lo..=hi).filter(|&n| is_prime(n)).collect()
}
