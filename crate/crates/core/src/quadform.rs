//! Binary quadratic forms `Ax^2 + Bxy + Cy^2` over F_q[t] and their reduction.
//!
//! Forms are acted on from the right: `f ∘ M = f(αx + βy, γx + δy)` for
//! `M = (α, β; γ, δ)`, so `f ∘ (MN) = (f ∘ M) ∘ N`.

use crate::error::{Error, Result};
use crate::field::FieldElement;
use crate::poly::{PolyRing, Polynomial};

/// A 2x2 matrix over F_q[t], written `(α, β; γ, δ)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TransformMatrix {
    pub alpha: Polynomial,
    pub beta: Polynomial,
    pub gamma: Polynomial,
    pub delta: Polynomial,
}

impl TransformMatrix {
    pub fn new(alpha: Polynomial, beta: Polynomial, gamma: Polynomial, delta: Polynomial) -> Self {
        TransformMatrix { alpha, beta, gamma, delta }
    }

    /// A matrix with constant entries, reduced mod q.
    pub fn from_constants(ring: &PolyRing, entries: [i64; 4]) -> Self {
        let [a, b, c, d] = entries.map(|e| ring.constant(e));
        Self::new(a, b, c, d)
    }

    pub(crate) fn from_raw_constants(entries: [u32; 4]) -> Self {
        let [a, b, c, d] = entries.map(|e| Polynomial::constant(FieldElement(e)));
        Self::new(a, b, c, d)
    }

    pub fn identity() -> Self {
        Self::new(Polynomial::one(), Polynomial::zero(), Polynomial::zero(), Polynomial::one())
    }

    /// The antidiagonal matrix `(0, 1; 1, 0)` exchanging x and y.
    pub fn swap() -> Self {
        Self::new(Polynomial::zero(), Polynomial::one(), Polynomial::one(), Polynomial::zero())
    }

    /// `J = diag(1, -1)`.
    pub fn j(ring: &PolyRing) -> Self {
        Self::from_constants(ring, [1, 0, 0, -1])
    }

    /// `-I`.
    pub fn minus_identity(ring: &PolyRing) -> Self {
        Self::from_constants(ring, [-1, 0, 0, -1])
    }

    /// `(1, s; 0, 1)`, i.e. `x -> x + s y`.
    pub fn translation(s: Polynomial) -> Self {
        Self::new(Polynomial::one(), s, Polynomial::zero(), Polynomial::one())
    }

    pub fn det(&self, ring: &PolyRing) -> Polynomial {
        ring.sub(&ring.mul(&self.alpha, &self.delta), &ring.mul(&self.beta, &self.gamma))
    }

    /// The determinant as a unit of F_q, or [`Error::SingularMatrix`] if it is
    /// not a non-zero constant.
    pub fn unit_det(&self, ring: &PolyRing) -> Result<FieldElement> {
        let d = self.det(ring);
        if d.degree() == Some(0) {
            Ok(d.sgn())
        } else {
            Err(Error::SingularMatrix)
        }
    }

    pub fn mul(&self, ring: &PolyRing, n: &TransformMatrix) -> TransformMatrix {
        let dot =
            |x: &Polynomial, y: &Polynomial, z: &Polynomial, w: &Polynomial| ring.add(&ring.mul(x, y), &ring.mul(z, w));
        TransformMatrix {
            alpha: dot(&self.alpha, &n.alpha, &self.beta, &n.gamma),
            beta: dot(&self.alpha, &n.beta, &self.beta, &n.delta),
            gamma: dot(&self.gamma, &n.alpha, &self.delta, &n.gamma),
            delta: dot(&self.gamma, &n.beta, &self.delta, &n.delta),
        }
    }

    pub fn scale(&self, ring: &PolyRing, u: FieldElement) -> TransformMatrix {
        TransformMatrix {
            alpha: ring.scale(&self.alpha, u),
            beta: ring.scale(&self.beta, u),
            gamma: ring.scale(&self.gamma, u),
            delta: ring.scale(&self.delta, u),
        }
    }

    pub fn is_constant(&self) -> bool {
        self.alpha.is_constant() && self.beta.is_constant() && self.gamma.is_constant() && self.delta.is_constant()
    }
}

/// Signature of a non-constant discriminant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DiscriminantClass {
    /// Odd degree.
    Imaginary,
    /// Even degree, non-square leading coefficient.
    Unusual,
    /// Even degree, square leading coefficient.
    Real,
}

/// Classifies a discriminant; fails for zero or constant input.
pub fn classify(ring: &PolyRing, d: &Polynomial) -> Result<DiscriminantClass> {
    match d.degree() {
        None | Some(0) => Err(Error::ConstantDiscriminant),
        Some(k) if k % 2 == 1 => Ok(DiscriminantClass::Imaginary),
        Some(_) if ring.field().is_square(d.sgn()) => Ok(DiscriminantClass::Real),
        Some(_) => Ok(DiscriminantClass::Unusual),
    }
}

/// `Ax^2 + Bxy + Cy^2`. Ordering is lexicographic on `(A, B, C)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BinaryQuadraticForm {
    pub a: Polynomial,
    pub b: Polynomial,
    pub c: Polynomial,
}

impl BinaryQuadraticForm {
    pub fn new(a: Polynomial, b: Polynomial, c: Polynomial) -> Self {
        BinaryQuadraticForm { a, b, c }
    }

    /// `B^2 - 4AC`.
    pub fn discriminant(&self, ring: &PolyRing) -> Polynomial {
        ring.sub(&ring.square(&self.b), &ring.scale_int(&ring.mul(&self.a, &self.c), 4))
    }

    /// `f ∘ M`; rejects matrices whose determinant is not a unit.
    pub fn apply(&self, ring: &PolyRing, m: &TransformMatrix) -> Result<Self> {
        m.unit_det(ring)?;
        Ok(self.apply_unchecked(ring, m))
    }

    pub(crate) fn apply_unchecked(&self, ring: &PolyRing, m: &TransformMatrix) -> Self {
        let (al, be, ga, de) = (&m.alpha, &m.beta, &m.gamma, &m.delta);
        let (a, b, c) = (&self.a, &self.b, &self.c);
        let m3 = |x: &Polynomial, y: &Polynomial, z: &Polynomial| ring.mul(x, &ring.mul(y, z));
        let a2 = ring.add(&ring.add(&m3(a, al, al), &m3(b, al, ga)), &m3(c, ga, ga));
        let b2 = ring.add(
            &ring
                .add(&ring.scale_int(&m3(a, al, be), 2), &ring.mul(b, &ring.add(&ring.mul(al, de), &ring.mul(be, ga)))),
            &ring.scale_int(&m3(c, ga, de), 2),
        );
        let c2 = ring.add(&ring.add(&m3(a, be, be), &m3(b, be, de)), &m3(c, de, de));
        BinaryQuadraticForm::new(a2, b2, c2)
    }

    /// `f ∘ M` for a matrix of field constants `[α, β, γ, δ]`.
    pub(crate) fn apply_constant(&self, ring: &PolyRing, m: [u32; 4]) -> Self {
        let f = ring.field();
        let [al, be, ga, de] = m;
        let lin = |x: u32, y: u32, z: u32| {
            let terms = [(&self.a, x), (&self.b, y), (&self.c, z)];
            terms.iter().fold(Polynomial::zero(), |acc, (p, k)| ring.add(&acc, &ring.scale(p, FieldElement(*k))))
        };
        let two = f.reduce(2);
        BinaryQuadraticForm::new(
            lin(f.mul_raw(al, al), f.mul_raw(al, ga), f.mul_raw(ga, ga)),
            lin(
                f.mul_raw(two, f.mul_raw(al, be)),
                f.add_raw(f.mul_raw(al, de), f.mul_raw(be, ga)),
                f.mul_raw(two, f.mul_raw(ga, de)),
            ),
            lin(f.mul_raw(be, be), f.mul_raw(be, de), f.mul_raw(de, de)),
        )
    }

    pub fn scale(&self, ring: &PolyRing, u: FieldElement) -> Self {
        BinaryQuadraticForm::new(ring.scale(&self.a, u), ring.scale(&self.b, u), ring.scale(&self.c, u))
    }

    /// The conditions `|B| < |A| <= |C|`, `sgn(A) ∈ {1, h}` (resp. `= 1` when
    /// `|A| = |C|`) and `B != 0 => sgn(B) ∈ S`.
    pub fn is_partially_reduced(&self, ring: &PolyRing) -> bool {
        let field = ring.field();
        if self.a.is_zero() || !(self.b.degree() < self.a.degree() && self.a.degree() <= self.c.degree()) {
            return false;
        }
        let sa = self.a.sgn();
        let sign_ok = if self.a.degree() == self.c.degree() {
            sa == FieldElement::ONE
        } else {
            sa == FieldElement::ONE || sa == field.primitive_root()
        };
        sign_ok && (self.b.is_zero() || field.in_sign_set(self.b.sgn()))
    }

    /// Sign of an imaginary or unusual discriminant, or the matching error.
    fn definite_sign(&self, ring: &PolyRing) -> Result<FieldElement> {
        let d = self.discriminant(ring);
        match classify(ring, &d)? {
            DiscriminantClass::Real => Err(Error::RealDiscriminant),
            _ => Ok(d.sgn()),
        }
    }

    /// Transforms into a partially reduced form, returning it with the
    /// unimodular matrix used.
    pub fn partial_reduce(&self, ring: &PolyRing) -> Result<(Self, TransformMatrix)> {
        let sigma = self.definite_sign(ring)?;
        let field = ring.field();
        let mut g = self.clone();
        let mut m = TransformMatrix::identity();
        let step = |g: &mut Self, m: &mut TransformMatrix, s: TransformMatrix| {
            *g = g.apply_unchecked(ring, &s);
            *m = m.mul(ring, &s);
        };

        loop {
            if g.a.is_zero() {
                return Err(Error::RealDiscriminant);
            }
            if g.b.degree() >= g.a.degree() {
                let (quo, _) = ring.divmod(&g.b, &ring.scale_int(&g.a, 2))?;
                step(&mut g, &mut m, TransformMatrix::translation(ring.neg(&quo)));
            }
            if g.a.degree() > g.c.degree() {
                step(&mut g, &mut m, TransformMatrix::swap());
            } else {
                break;
            }
        }

        let sa = g.a.sgn();
        if g.a.degree() < g.c.degree() {
            let target = if field.is_square(sa) { sa } else { field.mul(sa, field.inv(field.primitive_root())?) };
            let eps = field.sqrt(target)?;
            if eps != FieldElement::ONE {
                let scaling = TransformMatrix::new(
                    Polynomial::constant(field.inv(eps)?),
                    Polynomial::zero(),
                    Polynomial::zero(),
                    Polynomial::constant(eps),
                );
                step(&mut g, &mut m, scaling);
            }
        } else if sa != FieldElement::ONE {
            // (α, σε/2; 2 sgn(A) ε, sgn(A) α) with α^2 - σ ε^2 = sgn(A)^{-1}.
            let sa_inv = field.inv(sa)?;
            let (alpha, eps) = field
                .elements()
                .find_map(|e| {
                    let rhs = field.add(sa_inv, field.mul(sigma, field.mul(e, e)));
                    field.sqrt(rhs).ok().map(|a| (a, e))
                })
                .ok_or(Error::NotASquare(sa_inv.value()))?;
            let half = field.inv(field.element(2))?;
            let norm = TransformMatrix::new(
                Polynomial::constant(alpha),
                Polynomial::constant(field.mul(field.mul(sigma, eps), half)),
                Polynomial::constant(field.mul(field.element(2), field.mul(sa, eps))),
                Polynomial::constant(field.mul(sa, alpha)),
            );
            step(&mut g, &mut m, norm);
        }

        if !g.b.is_zero() && !field.in_sign_set(g.b.sgn()) {
            step(&mut g, &mut m, TransformMatrix::j(ring));
        }
        debug_assert!(g.is_partially_reduced(ring));
        Ok((g, m))
    }

    /// Solutions of `α^2 - (4/σ) β^2 = 1` where σ = sgn(D); the field's cached
    /// conic when σ = h.
    fn conic_for(ring: &PolyRing, sigma: FieldElement) -> Vec<(u32, u32)> {
        let field = ring.field();
        if sigma == field.primitive_root() {
            return field.conic_solutions().to_vec();
        }
        let q = field.modulus();
        let k = field.mul_raw(4, field.inv_raw(sigma.0));
        let mut out = Vec::with_capacity(q as usize + 1);
        for beta in 0..q {
            for alpha in 0..q {
                let lhs = field.sub_raw(field.mul_raw(alpha, alpha), field.mul_raw(k, field.mul_raw(beta, beta)));
                if lhs == 1 {
                    out.push((alpha, beta));
                }
            }
        }
        out
    }

    fn require_equal_norm(&self, ring: &PolyRing) -> Result<FieldElement> {
        if self.a.degree() != self.c.degree() {
            return Err(Error::UnequalNorms);
        }
        if !self.is_partially_reduced(ring) {
            return Err(Error::NotPartiallyReduced);
        }
        self.definite_sign(ring)
    }

    /// The q+1 partially reduced forms equivalent to a partially reduced
    /// form with `|A| = |C|`, each paired with the matrix producing it.
    pub fn equal_norm_orbit(&self, ring: &PolyRing) -> Result<Vec<(Self, TransformMatrix)>> {
        let sigma = self.require_equal_norm(ring)?;
        let field = ring.field();
        let four_over_sigma = field.mul_raw(4, field.inv_raw(sigma.0));
        let q = field.modulus();
        Ok(Self::conic_for(ring, sigma)
            .into_iter()
            .map(|(alpha, beta)| {
                let gamma = field.mul_raw(four_over_sigma, beta);
                let mut g = self.apply_constant(ring, [alpha, beta, gamma, alpha]);
                let mut entries = [alpha, beta, gamma, alpha];
                if !g.b.is_zero() && !field.in_s_raw(g.b.sgn().0) {
                    g.b = ring.neg(&g.b);
                    entries = [alpha, (q - beta) % q, gamma, (q - alpha) % q];
                }
                (g, TransformMatrix::from_raw_constants(entries))
            })
            .collect())
    }

    /// Partially reduced, and lexicographically smallest in its equal-norm
    /// orbit when `|A| = |C|`.
    pub fn is_reduced(&self, ring: &PolyRing) -> bool {
        if !self.is_partially_reduced(ring) {
            return false;
        }
        if self.a.degree() < self.c.degree() {
            return self.definite_sign(ring).is_ok();
        }
        match self.equal_norm_orbit(ring) {
            Ok(orbit) => orbit.iter().all(|(g, _)| self <= g),
            Err(_) => false,
        }
    }

    /// The unique reduced form equivalent to `self`, with the matrix used.
    pub fn reduce(&self, ring: &PolyRing) -> Result<(Self, TransformMatrix)> {
        let (g, m) = self.partial_reduce(ring)?;
        if g.a.degree() < g.c.degree() {
            return Ok((g, m));
        }
        let (best, n) = g.equal_norm_orbit(ring)?.into_iter().min_by(|x, y| x.0.cmp(&y.0)).expect("orbit is non-empty");
        Ok((best, m.mul(ring, &n)))
    }

    /// The automorphisms of a partially reduced form with `|A| = |C|` other
    /// than `±I` and `±J`. For primitive forms this is empty or a pair `±M`.
    pub fn nontrivial_automorphisms(&self, ring: &PolyRing) -> Result<Vec<TransformMatrix>> {
        let sigma = self.require_equal_norm(ring)?;
        let field = ring.field();
        let q = field.modulus();
        let four_over_sigma = field.mul_raw(4, field.inv_raw(sigma.0));
        let mut out = Vec::new();
        for (alpha, beta) in Self::conic_for(ring, sigma) {
            if beta == 0 {
                continue;
            }
            let gamma = field.mul_raw(four_over_sigma, beta);
            for entries in [[alpha, beta, gamma, alpha], [alpha, beta, (q - gamma) % q, (q - alpha) % q]] {
                if self.apply_constant(ring, entries) == *self {
                    out.push(TransformMatrix::from_raw_constants(entries));
                }
            }
        }
        Ok(out)
    }
}
