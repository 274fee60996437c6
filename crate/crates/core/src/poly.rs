//! The polynomial ring F_q[t].
//!
//! [`Polynomial`] is a plain value (coefficients low to high, no trailing
//! zeros) that knows nothing about its modulus; arithmetic goes through a
//! [`PolyRing`], which owns the [`PrimeField`] descriptor. Ordering on
//! polynomials is total: first by degree (zero below everything), then by
//! coefficients from the leading term downward.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::field::{FieldElement, PrimeField};

pub(crate) type Coeffs = SmallVec<[u32; 16]>;

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Polynomial {
    coeffs: Coeffs,
}

impl Polynomial {
    pub fn zero() -> Self {
        Polynomial { coeffs: Coeffs::new() }
    }

    pub fn one() -> Self {
        Self::constant(FieldElement::ONE)
    }

    pub fn constant(c: FieldElement) -> Self {
        Self::from_raw(Coeffs::from_slice(&[c.0]))
    }

    /// `c * t^k`.
    pub fn monomial(c: FieldElement, k: usize) -> Self {
        let mut coeffs = Coeffs::from_elem(0, k + 1);
        coeffs[k] = c.0;
        Self::from_raw(coeffs)
    }

    /// The polynomial `t`.
    pub fn t() -> Self {
        Self::monomial(FieldElement::ONE, 1)
    }

    /// Wraps already-reduced residues, trimming trailing zeros.
    pub(crate) fn from_raw(mut coeffs: Coeffs) -> Self {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        Polynomial { coeffs }
    }

    pub(crate) fn from_slice(c: &[u32]) -> Self {
        Self::from_raw(Coeffs::from_slice(c))
    }

    #[inline]
    pub(crate) fn raw(&self) -> &[u32] {
        &self.coeffs
    }

    /// Degree, with `None` standing for the degree of zero (below every integer).
    #[inline]
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    #[inline]
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Zero or a non-zero constant.
    #[inline]
    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    /// Leading coefficient `sgn(H)`; zero for the zero polynomial.
    #[inline]
    pub fn sgn(&self) -> FieldElement {
        FieldElement(self.coeffs.last().copied().unwrap_or(0))
    }

    pub fn coeff(&self, i: usize) -> FieldElement {
        FieldElement(self.coeffs.get(i).copied().unwrap_or(0))
    }

    pub fn coefficients(&self) -> impl Iterator<Item = FieldElement> + '_ {
        self.coeffs.iter().map(|&c| FieldElement(c))
    }
}

impl Ord for Polynomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.coeffs.len().cmp(&other.coeffs.len()).then_with(|| self.coeffs.iter().rev().cmp(other.coeffs.iter().rev()))
    }
}

impl PartialOrd for Polynomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Comma-separated base-10 coefficients, low to high; zero is `0`.
impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return f.write_str("0");
        }
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return f.write_str("0");
        }
        let mut first = true;
        for (i, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{c}")?,
                1 if c == 1 => f.write_str("t")?,
                1 => write!(f, "{c}t")?,
                _ if c == 1 => write!(f, "t^{i}")?,
                _ => write!(f, "{c}t^{i}")?,
            }
        }
        Ok(())
    }
}

/// Parses the comma serialization without reducing; [`PolyRing::parse`]
/// additionally checks every coefficient is below q.
impl FromStr for Polynomial {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Err(Error::Parse(s.to_string()));
        }
        let mut coeffs = Coeffs::new();
        for part in s.split(',') {
            let v: u32 = part.trim().parse().map_err(|_| Error::Parse(s.to_string()))?;
            coeffs.push(v);
        }
        Ok(Self::from_raw(coeffs))
    }
}

// Slice kernels shared by `PolyRing` and the tabulation inner loop. Inputs are
// reduced residues; outputs are reduced and may carry trailing zeros.

/// Products of residues below `MODULUS_LIMIT` that fit in one `u32` sum.
const UNREDUCED_TERMS: usize = 256;

/// `out[..a.len() + b.len() - 1] = a * b`. Both inputs non-empty.
#[inline]
pub(crate) fn mul_into(field: &PrimeField, out: &mut [u32], a: &[u32], b: &[u32]) -> usize {
    debug_assert!(!a.is_empty() && !b.is_empty());
    let n = a.len() + b.len() - 1;
    let (short, long) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    for (k, slot) in out[..n].iter_mut().enumerate() {
        let lo = k.saturating_sub(long.len() - 1);
        let hi = k.min(short.len() - 1);
        if short.len() <= UNREDUCED_TERMS {
            let mut acc = 0u32;
            for i in lo..=hi {
                acc += short[i] * long[k - i];
            }
            *slot = field.reduce(acc);
        } else {
            let mut acc = 0u64;
            for i in lo..=hi {
                acc += (short[i] * long[k - i]) as u64;
            }
            *slot = (acc % field.modulus() as u64) as u32;
        }
    }
    n
}

/// `acc[shift..] += c * src`.
#[inline]
pub(crate) fn add_scaled_shifted(field: &PrimeField, acc: &mut [u32], src: &[u32], c: u32, shift: usize) {
    for (dst, &s) in acc[shift..shift + src.len()].iter_mut().zip(src) {
        *dst = field.add_raw(*dst, field.mul_raw(s, c));
    }
}

/// Arithmetic in F_q[t].
#[derive(Clone, Debug)]
pub struct PolyRing {
    field: PrimeField,
}

impl PolyRing {
    pub fn new(field: PrimeField) -> Self {
        PolyRing { field }
    }

    /// Ring over F_q with the smallest primitive root.
    pub fn with_modulus(q: u32) -> Result<Self> {
        Ok(Self::new(PrimeField::new(q)?))
    }

    #[inline]
    pub fn field(&self) -> &PrimeField {
        &self.field
    }

    #[inline]
    pub fn q(&self) -> u32 {
        self.field.modulus()
    }

    /// Builds a polynomial from integer coefficients (low to high), reducing mod q.
    pub fn poly(&self, coeffs: &[i64]) -> Polynomial {
        Polynomial::from_raw(coeffs.iter().map(|&c| self.field.element(c).0).collect())
    }

    /// Parses the comma serialization, rejecting coefficients outside `[0, q)`.
    pub fn parse(&self, s: &str) -> Result<Polynomial> {
        let p: Polynomial = s.parse()?;
        if p.coeffs.iter().any(|&c| c >= self.q()) {
            return Err(Error::Parse(s.to_string()));
        }
        Ok(p)
    }

    pub fn constant(&self, c: i64) -> Polynomial {
        Polynomial::constant(self.field.element(c))
    }

    /// `|H| = q^deg(H)`, and `|0| = 0`.
    pub fn abs(&self, f: &Polynomial) -> u128 {
        match f.degree() {
            None => 0,
            Some(d) => (self.q() as u128).pow(d as u32),
        }
    }

    pub fn add(&self, f: &Polynomial, g: &Polynomial) -> Polynomial {
        let (long, short) = if f.coeffs.len() >= g.coeffs.len() { (f, g) } else { (g, f) };
        let mut c = long.coeffs.clone();
        for (x, &y) in c.iter_mut().zip(short.coeffs.iter()) {
            *x = self.field.add_raw(*x, y);
        }
        Polynomial::from_raw(c)
    }

    pub fn sub(&self, f: &Polynomial, g: &Polynomial) -> Polynomial {
        let n = f.coeffs.len().max(g.coeffs.len());
        let mut c = Coeffs::from_elem(0, n);
        for (i, slot) in c.iter_mut().enumerate() {
            *slot = self.field.sub_raw(f.coeff(i).0, g.coeff(i).0);
        }
        Polynomial::from_raw(c)
    }

    pub fn neg(&self, f: &Polynomial) -> Polynomial {
        Polynomial { coeffs: f.coeffs.iter().map(|&x| self.field.neg_raw(x)).collect() }
    }

    pub fn scale(&self, f: &Polynomial, c: FieldElement) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero();
        }
        Polynomial { coeffs: f.coeffs.iter().map(|&x| self.field.mul_raw(x, c.0)).collect() }
    }

    /// Multiplies by an integer constant (reduced mod q).
    pub fn scale_int(&self, f: &Polynomial, c: i64) -> Polynomial {
        self.scale(f, self.field.element(c))
    }

    pub fn mul(&self, f: &Polynomial, g: &Polynomial) -> Polynomial {
        if f.is_zero() || g.is_zero() {
            return Polynomial::zero();
        }
        let mut c = Coeffs::from_elem(0, f.coeffs.len() + g.coeffs.len() - 1);
        mul_into(&self.field, &mut c, &f.coeffs, &g.coeffs);
        Polynomial::from_raw(c)
    }

    pub fn square(&self, f: &Polynomial) -> Polynomial {
        self.mul(f, f)
    }

    pub fn pow(&self, f: &Polynomial, k: u32) -> Polynomial {
        let mut acc = Polynomial::one();
        for _ in 0..k {
            acc = self.mul(&acc, f);
        }
        acc
    }

    /// Multiplies by `t^k`.
    pub fn shift(&self, f: &Polynomial, k: usize) -> Polynomial {
        if f.is_zero() {
            return Polynomial::zero();
        }
        let mut c = Coeffs::from_elem(0, k);
        c.extend_from_slice(&f.coeffs);
        Polynomial { coeffs: c }
    }

    /// Euclidean division: `n = m * quotient + remainder`, `deg(remainder) < deg(m)`.
    pub fn divmod(&self, n: &Polynomial, m: &Polynomial) -> Result<(Polynomial, Polynomial)> {
        let dm = m.degree().ok_or(Error::DivisionByZero)?;
        let mut r = n.coeffs.clone();
        if r.len() <= dm {
            return Ok((Polynomial::zero(), n.clone()));
        }
        let inv_lead = self.field.inv_raw(m.sgn().0);
        let mut quot = Coeffs::from_elem(0, r.len() - dm);
        for k in (0..quot.len()).rev() {
            let c = self.field.mul_raw(r[k + dm], inv_lead);
            quot[k] = c;
            if c != 0 {
                let neg = self.field.neg_raw(c);
                add_scaled_shifted(&self.field, &mut r, &m.coeffs, neg, k);
            }
        }
        r.truncate(dm);
        Ok((Polynomial::from_raw(quot), Polynomial::from_raw(r)))
    }

    pub fn rem(&self, n: &Polynomial, m: &Polynomial) -> Result<Polynomial> {
        let dm = m.degree().ok_or(Error::DivisionByZero)?;
        let mut r = n.coeffs.clone();
        self.rem_in_place(&mut r, &m.coeffs, dm);
        Ok(Polynomial::from_raw(r))
    }

    fn rem_in_place(&self, r: &mut Coeffs, m: &[u32], dm: usize) {
        let inv_lead = self.field.inv_raw(m[dm]);
        while r.len() > dm {
            let top = r.len() - 1;
            let c = r[top];
            if c != 0 {
                let neg = self.field.neg_raw(self.field.mul_raw(c, inv_lead));
                add_scaled_shifted(&self.field, r, m, neg, top - dm);
            }
            r.pop();
        }
        while r.last() == Some(&0) {
            r.pop();
        }
    }

    /// `n / m`, failing unless `m` divides `n` exactly.
    pub fn div_exact(&self, n: &Polynomial, m: &Polynomial) -> Result<Polynomial> {
        let (quot, rem) = self.divmod(n, m)?;
        if !rem.is_zero() {
            return Err(Error::InexactDivision);
        }
        Ok(quot)
    }

    pub fn divides(&self, m: &Polynomial, n: &Polynomial) -> Result<bool> {
        Ok(self.rem(n, m)?.is_zero())
    }

    /// Scales a non-zero polynomial to leading coefficient 1; zero stays zero.
    pub fn monic(&self, f: &Polynomial) -> Polynomial {
        match f.coeffs.last() {
            None | Some(1) => f.clone(),
            Some(&lead) => self.scale(f, FieldElement(self.field.inv_raw(lead))),
        }
    }

    /// Monic greatest common divisor; `gcd(F, 0) = monic(F)`.
    pub fn gcd(&self, f: &Polynomial, g: &Polynomial) -> Result<Polynomial> {
        if f.is_zero() && g.is_zero() {
            return Err(Error::ZeroGcd);
        }
        let mut a = f.coeffs.clone();
        let mut b = g.coeffs.clone();
        while !b.is_empty() {
            let db = b.len() - 1;
            self.rem_in_place(&mut a, &b, db);
            std::mem::swap(&mut a, &mut b);
        }
        Ok(self.monic(&Polynomial { coeffs: a }))
    }

    pub fn derivative(&self, f: &Polynomial) -> Polynomial {
        if f.coeffs.len() <= 1 {
            return Polynomial::zero();
        }
        let c: Coeffs = f.coeffs[1..]
            .iter()
            .enumerate()
            .map(|(i, &x)| self.field.mul_raw(x, self.field.reduce(i as u32 + 1)))
            .collect();
        Polynomial::from_raw(c)
    }

    /// `true` iff no irreducible `p` has `p^2 | F`. Non-zero constants are square-free.
    pub fn is_squarefree(&self, f: &Polynomial) -> Result<bool> {
        if f.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        if f.is_constant() {
            return Ok(true);
        }
        let df = self.derivative(f);
        if df.is_zero() {
            // F is a polynomial in t^q, hence a q-th power.
            return Ok(false);
        }
        Ok(self.gcd(f, &df)?.is_constant())
    }

    /// Evaluates at a field element (Horner).
    pub fn eval(&self, f: &Polynomial, x: FieldElement) -> FieldElement {
        let mut acc = 0u32;
        for &c in f.coeffs.iter().rev() {
            acc = self.field.add_raw(self.field.mul_raw(acc, x.0), c);
        }
        FieldElement(acc)
    }

    /// All polynomials of exact degree `k` whose leading coefficient satisfies
    /// `lead_ok`, in odometer order (constant term varying fastest).
    pub fn polys_of_degree<'a>(
        &'a self,
        k: usize,
        lead_ok: impl Fn(u32) -> bool + 'a,
    ) -> impl Iterator<Item = Polynomial> + 'a {
        let q = self.q();
        let leads: Vec<u32> = (1..q).filter(|&c| lead_ok(c)).collect();
        let lower = (q as u64).pow(k as u32);
        leads.into_iter().flat_map(move |lead| {
            (0..lower).map(move |mut idx| {
                let mut c = Coeffs::from_elem(0, k + 1);
                for slot in c.iter_mut().take(k) {
                    *slot = (idx % q as u64) as u32;
                    idx /= q as u64;
                }
                c[k] = lead;
                Polynomial { coeffs: c }
            })
        })
    }

    /// All polynomials of degree at most `max_deg`, zero first, then by degree.
    pub fn polys_up_to_degree(&self, max_deg: usize) -> impl Iterator<Item = Polynomial> + '_ {
        std::iter::once(Polynomial::zero()).chain((0..=max_deg).flat_map(move |k| self.polys_of_degree(k, |_| true)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn r5() -> PolyRing {
        PolyRing::with_modulus(5).unwrap()
    }

    #[test]
    fn divmod_examples() {
        let r = r5();
        let (q, rem) = r.divmod(&r.poly(&[1, 0, 1]), &Polynomial::t()).unwrap();
        assert_eq!(q, Polynomial::t());
        assert_eq!(rem, Polynomial::one());

        let n = r.poly(&[3, 1, 4, 1, 5, 9]);
        let (q, rem) = r.divmod(&n, &Polynomial::one()).unwrap();
        assert_eq!(q, n);
        assert!(rem.is_zero());

        // t^3 + 3 = (2t + 1)(3t^2 + t + 2) + 1 over F_5
        let n = r.poly(&[3, 0, 0, 1]);
        let m = r.poly(&[1, 2]);
        let (q, rem) = r.divmod(&n, &m).unwrap();
        assert_eq!(q, r.poly(&[2, 1, 3]));
        assert_eq!(rem, r.poly(&[1]));
        assert_eq!(r.add(&r.mul(&m, &q), &rem), n);

        assert_eq!(r.divmod(&n, &Polynomial::zero()), Err(Error::DivisionByZero));
    }

    #[test]
    fn gcd_examples() {
        let r = r5();
        let t = Polynomial::t();
        assert_eq!(r.gcd(&r.mul(&t, &t), &t).unwrap(), t);
        assert_eq!(r.gcd(&r.constant(3), &r.poly(&[0, 0, 0, 0, 0, 1])).unwrap(), Polynomial::one());
        // F = (t+1)^2 (t+2) = t^3 + 4t^2 + 5t + 2 = t^3 + 4t^2 + 2
        let f = r.mul(&r.pow(&r.poly(&[1, 1]), 2), &r.poly(&[2, 1]));
        assert_eq!(f, r.poly(&[2, 0, 4, 1]));
        assert_eq!(r.gcd(&f, &r.derivative(&f)).unwrap(), r.poly(&[1, 1]));
        assert_eq!(r.gcd(&r.poly(&[2, 4]), &Polynomial::zero()).unwrap(), r.poly(&[3, 1]));
        assert_eq!(r.gcd(&Polynomial::zero(), &Polynomial::zero()), Err(Error::ZeroGcd));
    }

    #[test]
    fn derivative_examples() {
        let r = r5();
        assert!(r.derivative(&r.poly(&[0, 0, 0, 0, 0, 1])).is_zero());
        assert!(r.derivative(&r.constant(4)).is_zero());
        assert_eq!(r.derivative(&r.poly(&[3, 0, 1, 4, 1])), r.poly(&[0, 2, 2, 4]));
    }

    #[test]
    fn squarefree_examples() {
        let r = r5();
        assert!(!r.is_squarefree(&r.poly(&[0, 0, 1])).unwrap());
        assert!(r.is_squarefree(&Polynomial::t()).unwrap());
        assert!(r.is_squarefree(&r.poly(&[3, 0, 1, 4, 1])).unwrap());
        assert!(r.is_squarefree(&r.constant(2)).unwrap());
        assert!(!r.is_squarefree(&r.poly(&[1, 0, 0, 0, 0, 1])).unwrap());
        assert_eq!(r.is_squarefree(&Polynomial::zero()), Err(Error::ZeroPolynomial));
    }

    #[test]
    fn compare_examples() {
        let r = r5();
        assert!(Polynomial::zero() < Polynomial::one());
        assert!(r.poly(&[4, 1]) < r.poly(&[0, 2]));
        assert!(r.poly(&[1, 0, 3]) < r.poly(&[0, 1, 3]));
        assert!(r.poly(&[4]) < r.poly(&[0, 1]));
    }

    #[test]
    fn serialization() {
        let r = r5();
        let f = r.poly(&[3, 0, 1, 4, 1]);
        assert_eq!(f.to_string(), "3,0,1,4,1");
        assert_eq!(Polynomial::zero().to_string(), "0");
        assert_eq!(r.parse("3,0,1,4,1").unwrap(), f);
        assert_eq!(r.parse("0").unwrap(), Polynomial::zero());
        assert_eq!(r.parse("1,0,0").unwrap(), Polynomial::one());
        assert!(r.parse("1,5").is_err());
        assert!(r.parse("").is_err());
        assert!(r.parse("1,x").is_err());
        assert_eq!(format!("{f:?}"), "t^4 + 4t^3 + t^2 + 3");
    }

    #[test]
    fn enumeration_counts() {
        let r = r5();
        assert_eq!(r.polys_of_degree(2, |_| true).count(), 100);
        assert_eq!(r.polys_of_degree(0, |c| c == 1).count(), 1);
        assert_eq!(r.polys_up_to_degree(2).count(), 125);
        assert!(r.polys_of_degree(3, |_| true).all(|p| p.degree() == Some(3)));
    }

    /// Full factorization by trial division over monic polynomials; only used
    /// as an independent square-freeness reference.
    fn squarefree_by_trial_division(r: &PolyRing, f: &Polynomial) -> bool {
        let deg = f.degree().unwrap();
        for k in 1..=deg / 2 {
            for p in r.polys_of_degree(k, |c| c == 1) {
                let p2 = r.mul(&p, &p);
                if r.rem(f, &p2).unwrap().is_zero() {
                    return false;
                }
            }
        }
        true
    }

    #[test]
    fn squarefree_agrees_with_trial_division() {
        let r = r5();
        for k in 0..=4 {
            for f in r.polys_of_degree(k, |c| c == 1) {
                assert_eq!(r.is_squarefree(&f).unwrap(), squarefree_by_trial_division(&r, &f), "{f:?}");
            }
        }
    }

    fn arb_poly(max_len: usize) -> impl Strategy<Value = Vec<i64>> {
        prop::collection::vec(0i64..7, 0..=max_len)
    }

    proptest! {
        #[test]
        fn absolute_value_is_non_archimedean(a in arb_poly(8), b in arb_poly(8)) {
            let r = PolyRing::with_modulus(7).unwrap();
            let (f, g) = (r.poly(&a), r.poly(&b));
            prop_assert_eq!(r.abs(&r.mul(&f, &g)), r.abs(&f) * r.abs(&g));
            let s = r.abs(&r.add(&f, &g));
            prop_assert!(s <= r.abs(&f).max(r.abs(&g)));
            if r.abs(&f) != r.abs(&g) {
                prop_assert_eq!(s, r.abs(&f).max(r.abs(&g)));
            }
        }

        #[test]
        fn divmod_reconstructs(a in arb_poly(10), b in arb_poly(6)) {
            let r = PolyRing::with_modulus(7).unwrap();
            let (n, m) = (r.poly(&a), r.poly(&b));
            prop_assume!(!m.is_zero());
            let (quot, rem) = r.divmod(&n, &m).unwrap();
            prop_assert!(rem.degree() < m.degree());
            prop_assert_eq!(r.add(&r.mul(&m, &quot), &rem), n);
        }

        #[test]
        fn gcd_divides_and_is_symmetric(a in arb_poly(7), b in arb_poly(7), u in 1i64..7) {
            let r = PolyRing::with_modulus(7).unwrap();
            let (f, g) = (r.poly(&a), r.poly(&b));
            prop_assume!(!(f.is_zero() && g.is_zero()));
            let d = r.gcd(&f, &g).unwrap();
            prop_assert_eq!(d.sgn(), FieldElement::ONE);
            prop_assert!(r.divides(&d, &f).unwrap());
            prop_assert!(r.divides(&d, &g).unwrap());
            prop_assert_eq!(&r.gcd(&g, &f).unwrap(), &d);
            prop_assert_eq!(&r.gcd(&r.scale_int(&f, u), &g).unwrap(), &d);
        }

        #[test]
        fn compare_is_a_total_order(a in arb_poly(4), b in arb_poly(4), c in arb_poly(4)) {
            let r = PolyRing::with_modulus(7).unwrap();
            let (f, g, h) = (r.poly(&a), r.poly(&b), r.poly(&c));
            prop_assert_eq!(f.cmp(&g), g.cmp(&f).reverse());
            prop_assert_eq!(f.cmp(&g) == Ordering::Equal, f == g);
            if f <= g && g <= h {
                prop_assert!(f <= h);
            }
        }
    }
}
