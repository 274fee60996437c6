//! Membership in the Davenport–Heilbronn set U, using only gcd and
//! square-freeness tests (no factorization).

use crate::cubform::BinaryCubicForm;
use crate::error::{Error, Result};
use crate::poly::{PolyRing, Polynomial};
use crate::quadform::BinaryQuadraticForm;

/// Whether the class of `f` lies in U.
pub fn in_u(ring: &PolyRing, f: &BinaryCubicForm) -> Result<bool> {
    in_u_parts(ring, &f.hessian(ring), &f.discriminant(ring))
}

/// [`in_u`] from a precomputed Hessian `(P, Q, R)` and discriminant `D`.
///
/// With `ℓ = gcd(P, Q, R)` monic: `ℓ` must be square-free, and
/// `s = −3D/ℓ^2` must be square-free and coprime to `ℓ`.
pub fn in_u_parts(ring: &PolyRing, hessian: &BinaryQuadraticForm, d: &Polynomial) -> Result<bool> {
    if d.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let n = ring.scale_int(d, -3);
    let ell = ring.gcd(&ring.gcd(&hessian.a, &hessian.b)?, &hessian.c)?;
    if ell.is_constant() {
        return ring.is_squarefree(&n);
    }
    if !ring.is_squarefree(&ell)? {
        return Ok(false);
    }
    let s = ring.div_exact(&n, &ring.square(&ell))?;
    if !ring.gcd(&s, &ell)?.is_constant() {
        return Ok(false);
    }
    ring.is_squarefree(&s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ring() -> PolyRing {
        PolyRing::with_modulus(5).unwrap()
    }

    #[test]
    fn examples() {
        let r = ring();
        let f = BinaryCubicForm::from_coeffs(&r, &[1], &[], &[0, 1], &[1]);
        assert_eq!(r.scale_int(&f.discriminant(&r), -3), r.poly(&[1, 0, 0, 2]));
        assert!(in_u(&r, &f).unwrap());

        let f = BinaryCubicForm::from_coeffs(&r, &[1], &[], &[], &[0, 0, 0, 1]);
        let h = f.hessian(&r);
        assert_eq!(r.gcd(&r.gcd(&h.a, &h.b).unwrap(), &h.c).unwrap(), r.poly(&[0, 0, 0, 1]));
        assert!(!in_u(&r, &f).unwrap());

        let f = BinaryCubicForm::from_coeffs(&r, &[4, 2], &[4, 3], &[3, 3], &[1, 3]);
        assert!(in_u(&r, &f).unwrap());
    }

    #[test]
    fn zero_discriminant_is_rejected() {
        let r = ring();
        let f = BinaryCubicForm::from_coeffs(&r, &[1], &[], &[], &[]);
        assert_eq!(in_u(&r, &f), Err(Error::ZeroPolynomial));
    }

    #[test]
    fn inexact_division_is_reported() {
        let r = ring();
        // Not a Hessian of anything with this discriminant: ℓ = t but t^2 ∤ −3D.
        let h = BinaryQuadraticForm::new(Polynomial::t(), Polynomial::t(), Polynomial::t());
        assert_eq!(in_u_parts(&r, &h, &r.poly(&[0, 1])), Err(Error::InexactDivision));
    }

    proptest! {
        #[test]
        fn squarefree_discriminant_is_in_u(
            a in prop::collection::vec(0i64..5, 1..=3),
            b in prop::collection::vec(0i64..5, 0..=3),
            c in prop::collection::vec(0i64..5, 0..=3),
            d in prop::collection::vec(0i64..5, 1..=3),
        ) {
            let r = ring();
            let f = BinaryCubicForm::from_coeffs(&r, &a, &b, &c, &d);
            let disc = f.discriminant(&r);
            prop_assume!(!disc.is_zero() && r.is_squarefree(&disc).unwrap());
            prop_assert!(in_u(&r, &f).unwrap());
        }
    }
}
