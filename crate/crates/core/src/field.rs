//! Arithmetic in the prime field F_q.
//!
//! A [`PrimeField`] is the immutable descriptor everything else is built on:
//! the modulus, a fixed primitive root `h`, the sign-normalization half-system
//! `S = { h^i : 0 <= i <= (q-3)/2 }`, and lookup tables for inverses and
//! square roots. Residues are plain `u32` values in `[0, q)`; the descriptor
//! supplies the operations.

use std::fmt;

use crate::error::{Error, Result};

/// Largest supported modulus (exclusive). Polynomial kernels accumulate
/// unreduced products in `u32`, which stays exact for `q < 2^12` and
/// polynomials of length up to 256.
pub const MODULUS_LIMIT: u32 = 1 << 12;

/// An element of F_q, stored as its representative in `[0, q)`.
///
/// Ordering is by representative, `0 < 1 < ... < q-1`; this is the base order
/// for all lexicographic comparisons of polynomials and forms.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
#[repr(transparent)]
pub struct FieldElement(pub(crate) u32);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);
    pub const ONE: FieldElement = FieldElement(1);

    #[inline]
    pub fn value(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Descriptor of the prime field F_q together with its primitive root and
/// the half-system `S`.
#[derive(Clone)]
pub struct PrimeField {
    q: u32,
    h: u32,
    // Lemire fastmod constant: floor(2^64 / q) + 1.
    magic: u64,
    inverse: Vec<u32>,
    // sqrt[x] = the square root of x lying in S, or u32::MAX for non-squares.
    sqrt: Vec<u32>,
    in_s: Vec<bool>,
    conic: Vec<(u32, u32)>,
}

impl fmt::Debug for PrimeField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PrimeField").field("q", &self.q).field("h", &self.h).finish()
    }
}

fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Checks that `q` is a supported modulus: prime, at least 5, coprime to 6.
pub fn validate_modulus(q: u32) -> Result<()> {
    if q < 5 || q.is_multiple_of(2) || q.is_multiple_of(3) || !is_prime(q) {
        return Err(Error::InvalidModulus(q));
    }
    if q >= MODULUS_LIMIT {
        return Err(Error::ModulusTooLarge { q, limit: MODULUS_LIMIT });
    }
    Ok(())
}

fn pow_mod(base: u32, mut exp: u64, q: u32) -> u32 {
    let mut acc = 1u64;
    let mut b = base as u64 % q as u64;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % q as u64;
        }
        b = b * b % q as u64;
        exp >>= 1;
    }
    acc as u32
}

fn prime_factors(mut n: u32) -> Vec<u32> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            out.push(p);
            while n.is_multiple_of(p) {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn is_generator(g: u32, q: u32, factors: &[u32]) -> bool {
    !g.is_multiple_of(q) && factors.iter().all(|&p| pow_mod(g, ((q - 1) / p) as u64, q) != 1)
}

/// Returns the smallest primitive root of F_q*.
pub fn primitive_root(q: u32) -> Result<FieldElement> {
    validate_modulus(q)?;
    let factors = prime_factors(q - 1);
    let g = (2..q).find(|&g| is_generator(g, q, &factors)).expect("F_q* is cyclic");
    Ok(FieldElement(g))
}

impl PrimeField {
    /// Builds the descriptor for F_q using its smallest primitive root.
    pub fn new(q: u32) -> Result<Self> {
        let h = primitive_root(q)?;
        Self::with_primitive_root(q, h.0)
    }

    /// Builds the descriptor with an explicitly chosen primitive root.
    pub fn with_primitive_root(q: u32, h: u32) -> Result<Self> {
        validate_modulus(q)?;
        if h >= q || !is_generator(h, q, &prime_factors(q - 1)) {
            return Err(Error::NotPrimitiveRoot { h, q });
        }
        let magic = u64::MAX / q as u64 + 1;
        let qu = q as usize;

        let mut inverse = vec![0u32; qu];
        for x in 1..q {
            inverse[x as usize] = pow_mod(x, (q - 2) as u64, q);
        }

        let mut in_s = vec![false; qu];
        let mut power = 1u32;
        for _ in 0..=(q - 3) / 2 {
            in_s[power as usize] = true;
            power = ((power as u64 * h as u64) % q as u64) as u32;
        }

        let mut sqrt = vec![u32::MAX; qu];
        sqrt[0] = 0;
        for y in 1..q {
            if in_s[y as usize] {
                sqrt[((y as u64 * y as u64) % q as u64) as usize] = y;
            }
        }

        let mut field = PrimeField { q, h, magic, inverse, sqrt, in_s, conic: Vec::new() };
        field.conic = field.solve_conic();
        Ok(field)
    }

    #[inline]
    pub fn modulus(&self) -> u32 {
        self.q
    }

    /// The fixed primitive root `h`.
    #[inline]
    pub fn primitive_root(&self) -> FieldElement {
        FieldElement(self.h)
    }

    #[inline]
    pub fn element(&self, value: i64) -> FieldElement {
        FieldElement(value.rem_euclid(self.q as i64) as u32)
    }

    /// Reduces any `u32` modulo q.
    #[inline(always)]
    pub(crate) fn reduce(&self, x: u32) -> u32 {
        let low = self.magic.wrapping_mul(x as u64);
        ((low as u128 * self.q as u128) >> 64) as u32
    }

    #[inline(always)]
    pub(crate) fn add_raw(&self, x: u32, y: u32) -> u32 {
        let s = x + y;
        if s >= self.q {
            s - self.q
        } else {
            s
        }
    }

    #[inline(always)]
    pub(crate) fn sub_raw(&self, x: u32, y: u32) -> u32 {
        if x >= y {
            x - y
        } else {
            x + self.q - y
        }
    }

    #[inline(always)]
    pub(crate) fn neg_raw(&self, x: u32) -> u32 {
        if x == 0 {
            0
        } else {
            self.q - x
        }
    }

    #[inline(always)]
    pub(crate) fn mul_raw(&self, x: u32, y: u32) -> u32 {
        self.reduce(x * y)
    }

    #[inline(always)]
    pub(crate) fn inv_raw(&self, x: u32) -> u32 {
        debug_assert!(x != 0);
        self.inverse[x as usize]
    }

    #[inline(always)]
    pub(crate) fn in_s_raw(&self, x: u32) -> bool {
        self.in_s[x as usize]
    }

    #[inline(always)]
    pub(crate) fn is_square_raw(&self, x: u32) -> bool {
        self.sqrt[x as usize] != u32::MAX
    }

    pub fn add(&self, x: FieldElement, y: FieldElement) -> FieldElement {
        FieldElement(self.add_raw(x.0, y.0))
    }

    pub fn sub(&self, x: FieldElement, y: FieldElement) -> FieldElement {
        FieldElement(self.sub_raw(x.0, y.0))
    }

    pub fn neg(&self, x: FieldElement) -> FieldElement {
        FieldElement(self.neg_raw(x.0))
    }

    pub fn mul(&self, x: FieldElement, y: FieldElement) -> FieldElement {
        FieldElement(self.mul_raw(x.0, y.0))
    }

    pub fn inv(&self, x: FieldElement) -> Result<FieldElement> {
        if x.0 == 0 {
            return Err(Error::DivisionByZero);
        }
        Ok(FieldElement(self.inv_raw(x.0)))
    }

    pub fn pow(&self, x: FieldElement, exp: u64) -> FieldElement {
        FieldElement(pow_mod(x.0, exp, self.q))
    }

    /// `true` iff `x = y^2` for some `y`; zero counts as a square.
    pub fn is_square(&self, x: FieldElement) -> bool {
        self.is_square_raw(x.0)
    }

    /// The square root of `x` lying in `S` (zero for zero).
    pub fn sqrt(&self, x: FieldElement) -> Result<FieldElement> {
        match self.sqrt[x.0 as usize] {
            u32::MAX => Err(Error::NotASquare(x.0)),
            r => Ok(FieldElement(r)),
        }
    }

    /// Membership in the half-system `S`.
    pub fn in_sign_set(&self, x: FieldElement) -> bool {
        self.in_s_raw(x.0)
    }

    /// The half-system `S`, listed in increasing representative order.
    pub fn sign_set(&self) -> Vec<FieldElement> {
        (1..self.q).filter(|&x| self.in_s[x as usize]).map(FieldElement).collect()
    }

    /// All solutions `(alpha, beta)` of `alpha^2 - (4/h) beta^2 = 1`,
    /// ordered by `beta` then `alpha`.
    pub fn conic_solutions(&self) -> &[(u32, u32)] {
        &self.conic
    }

    fn solve_conic(&self) -> Vec<(u32, u32)> {
        let four_over_h = self.mul_raw(4 % self.q, self.inv_raw(self.h));
        let mut out = Vec::with_capacity(self.q as usize + 1);
        for beta in 0..self.q {
            let rhs = self.mul_raw(four_over_h, self.mul_raw(beta, beta));
            for alpha in 0..self.q {
                if self.sub_raw(self.mul_raw(alpha, alpha), rhs) == 1 {
                    out.push((alpha, beta));
                }
            }
        }
        out
    }

    /// Iterator over all elements `0..q`.
    pub fn elements(&self) -> impl Iterator<Item = FieldElement> {
        (0..self.q).map(FieldElement)
    }
}
