//! Slow, direct cross-checks: U-membership from the prime-by-prime
//! definition via full factorization of `D`, reduction round trips under
//! random equivalences, and recounts that re-validate every record.

use std::collections::BTreeMap;

use rand::Rng;

use crate::cubform::BinaryCubicForm;
use crate::error::{Error, Result};
use crate::field::FieldElement;
use crate::poly::{PolyRing, Polynomial};
use crate::quadform::TransformMatrix;
use crate::tabulate::{tabulate_basic, ParityChoice, TabulateError, TabulationRequest, TabulationSummary};

/// `unit * prod(p^e)` with monic irreducible `p` in increasing order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactoredPolynomial {
    pub unit: FieldElement,
    pub factors: Vec<(Polynomial, u32)>,
}

impl FactoredPolynomial {
    pub fn reconstruct(&self, ring: &PolyRing) -> Polynomial {
        self.factors.iter().fold(Polynomial::constant(self.unit), |acc, (p, e)| ring.mul(&acc, &ring.pow(p, *e)))
    }
}

/// Monic irreducibles by degree, extended on demand by sieving.
pub struct IrreducibleTable<'r> {
    ring: &'r PolyRing,
    by_degree: Vec<Vec<Polynomial>>,
}

impl<'r> IrreducibleTable<'r> {
    pub fn new(ring: &'r PolyRing) -> Self {
        IrreducibleTable { ring, by_degree: vec![Vec::new()] }
    }

    /// All monic irreducibles of degree `k`.
    pub fn of_degree(&mut self, k: usize) -> &[Polynomial] {
        while self.by_degree.len() <= k {
            let n = self.by_degree.len();
            let ring = self.ring;
            let smaller: Vec<&Polynomial> = self.by_degree[..=n / 2].iter().flatten().collect();
            let next: Vec<Polynomial> = ring
                .polys_of_degree(n, |c| c == 1)
                .filter(|f| smaller.iter().all(|p| !ring.divides(p, f).expect("p is non-zero")))
                .collect();
            self.by_degree.push(next);
        }
        &self.by_degree[k]
    }

    /// Complete factorization by trial division.
    pub fn factor(&mut self, f: &Polynomial) -> Result<FactoredPolynomial> {
        if f.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        let ring = self.ring;
        let unit = f.sgn();
        let mut rest = ring.monic(f);
        let mut factors = Vec::new();
        let mut k = 1;
        while rest.degree().is_some_and(|n| 2 * k <= n) {
            for p in self.of_degree(k).to_vec() {
                let mut e = 0;
                while let Ok((quo, rem)) = ring.divmod(&rest, &p) {
                    if !rem.is_zero() {
                        break;
                    }
                    rest = quo;
                    e += 1;
                }
                if e > 0 {
                    factors.push((p, e));
                }
            }
            k += 1;
        }
        if !rest.is_constant() {
            factors.push((rest, 1));
        }
        factors.sort();
        let mut merged: Vec<(Polynomial, u32)> = Vec::new();
        for (p, e) in factors {
            match merged.last_mut() {
                Some((last, m)) if *last == p => *m += e,
                _ => merged.push((p, e)),
            }
        }
        Ok(FactoredPolynomial { unit, factors: merged })
    }
}

/// Factorization with a throwaway irreducible table.
pub fn factor(ring: &PolyRing, f: &Polynomial) -> Result<FactoredPolynomial> {
    IrreducibleTable::new(ring).factor(f)
}

/// Membership in U straight from the local conditions: for every prime `p`
/// with `p^2 | D`, `f ≡ λ(δx − γy)^3 (mod p)` and `f(γ, δ) ≢ 0 (mod p^2)`.
pub fn in_u_definitional(ring: &PolyRing, f: &BinaryCubicForm) -> Result<bool> {
    in_u_definitional_with(&mut IrreducibleTable::new(ring), f)
}

pub fn in_u_definitional_with(table: &mut IrreducibleTable<'_>, f: &BinaryCubicForm) -> Result<bool> {
    let ring = table.ring;
    let disc = f.discriminant(ring);
    let fac = table.factor(&disc)?;
    for (p, e) in &fac.factors {
        if *e < 2 {
            continue;
        }
        let Some((gamma, delta)) = triple_root_mod(ring, f, p) else {
            return Ok(false);
        };
        let p2 = ring.square(p);
        if ring.rem(&eval_form(ring, f, &gamma, &delta), &p2)?.is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

fn eval_form(ring: &PolyRing, f: &BinaryCubicForm, x: &Polynomial, y: &Polynomial) -> Polynomial {
    let terms = [
        ring.mul(&f.a, &ring.pow(x, 3)),
        ring.mul(&ring.mul(&f.b, &ring.square(x)), y),
        ring.mul(&ring.mul(&f.c, x), &ring.square(y)),
        ring.mul(&f.d, &ring.pow(y, 3)),
    ];
    terms.iter().fold(Polynomial::zero(), |acc, t| ring.add(&acc, t))
}

/// A point `(γ, δ)` with `f ≡ λ(δx − γy)^3 (mod p)` for some unit `λ`,
/// found by searching the projective line over `F_q[t]/p`.
fn triple_root_mod(ring: &PolyRing, f: &BinaryCubicForm, p: &Polynomial) -> Option<(Polynomial, Polynomial)> {
    let m = |x: &Polynomial| ring.rem(x, p).expect("p is non-zero");
    let (a, b, c, d) = (m(&f.a), m(&f.b), m(&f.c), m(&f.d));
    if a.is_zero() {
        // Only (γ, δ) = (1, 0): f ≡ −λ y^3.
        return (b.is_zero() && c.is_zero() && !d.is_zero()).then(Polynomial::one).map(|g| (g, Polynomial::zero()));
    }
    // δ = 1: f ≡ a (x − γy)^3 = a x^3 − 3aγ x^2y + 3aγ^2 xy^2 − aγ^3 y^3.
    let k = p.degree().expect("p is non-constant");
    let residues = std::iter::once(Polynomial::zero()).chain((0..k).flat_map(|j| ring.polys_of_degree(j, |_| true)));
    for g in residues {
        let ag = m(&ring.mul(&a, &g));
        let ag2 = m(&ring.mul(&ag, &g));
        let ag3 = m(&ring.mul(&ag2, &g));
        if b == m(&ring.scale_int(&ag, -3)) && c == m(&ring.scale_int(&ag2, 3)) && d == m(&ring.neg(&ag3)) {
            return Some((g, Polynomial::one()));
        }
    }
    None
}

/// Whether `f` has no linear factor over F_q(t): `a, d ≠ 0` and no root
/// `x/y` with `x | d`, `y | a`.
pub fn is_irreducible(ring: &PolyRing, f: &BinaryCubicForm) -> Result<bool> {
    if f.a.is_zero() || f.d.is_zero() {
        return Ok(false);
    }
    let mut table = IrreducibleTable::new(ring);
    let xs = divisors(ring, &table.factor(&f.d)?);
    let ys = divisors(ring, &table.factor(&f.a)?);
    let units: Vec<FieldElement> = ring.field().elements().filter(|u| !u.is_zero()).collect();
    for x in &xs {
        for y in &ys {
            for &u in &units {
                if eval_form(ring, f, &ring.scale(x, u), y).is_zero() {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Monic divisors from a factorization.
fn divisors(ring: &PolyRing, fac: &FactoredPolynomial) -> Vec<Polynomial> {
    let mut out = vec![Polynomial::one()];
    for (p, e) in &fac.factors {
        let mut next = Vec::new();
        for d in &out {
            let mut acc = d.clone();
            next.push(acc.clone());
            for _ in 0..*e {
                acc = ring.mul(&acc, p);
                next.push(acc.clone());
            }
        }
        out = next;
    }
    out
}

/// A random matrix with entries of degree at most `max_degree` and unit
/// determinant: `α, β, γ` random, `δ = (u + βγ)/α` when that divides.
pub fn random_unimodular<R: Rng>(ring: &PolyRing, max_degree: usize, rng: &mut R) -> TransformMatrix {
    let q = ring.q() as i64;
    let random_poly = |rng: &mut R| {
        let deg = rng.gen_range(0..=max_degree);
        let coeffs: Vec<i64> = (0..=deg).map(|_| rng.gen_range(0..q)).collect();
        ring.poly(&coeffs)
    };
    loop {
        let alpha = random_poly(rng);
        let beta = random_poly(rng);
        let gamma = random_poly(rng);
        if alpha.is_zero() {
            continue;
        }
        let u = ring.constant(rng.gen_range(1..q));
        let num = ring.add(&u, &ring.mul(&beta, &gamma));
        if let Ok(delta) = ring.div_exact(&num, &alpha) {
            if delta.degree().unwrap_or(0) <= max_degree {
                return TransformMatrix::new(alpha, beta, gamma, delta);
            }
        }
    }
}

/// Whether `f ∘ M` reduces to the same form as `f` for `trials` random
/// unimodular `M`.
pub fn roundtrip_check<R: Rng>(
    ring: &PolyRing,
    f: &BinaryCubicForm,
    trials: usize,
    max_entry_degree: usize,
    rng: &mut R,
) -> Result<bool> {
    let (g, m) = f.reduce(ring)?;
    if f.apply(ring, &m)? != g || !g.is_reduced(ring)? {
        return Ok(false);
    }
    for _ in 0..trials {
        let n = random_unimodular(ring, max_entry_degree, rng);
        let moved = f.apply(ring, &n)?;
        let (h, mh) = moved.reduce(ring)?;
        if h != g || moved.apply(ring, &mh)? != h {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Recount through the basic kernel, keeping only records whose form is
/// its own reduction and lies in U by the definitional test.
pub fn exhaustive_count(q: u32, bound: u32, parity: ParityChoice) -> Result<TabulationSummary> {
    if !matches!(q, 5 | 7) || bound > 5 {
        return Err(Error::OracleBounds { q, bound });
    }
    let req = TabulationRequest::new(q, bound, parity);
    let ring = req.ring()?;
    let mut table = IrreducibleTable::new(&ring);
    let mut by_degree: BTreeMap<usize, (u64, u64)> = BTreeMap::new();
    let mut failure = None;
    let summary = tabulate_basic(&req, |rec| {
        let check = (|| -> Result<bool> {
            let disc = rec.form.discriminant(&ring);
            let (g, _) = rec.form.reduce(&ring)?;
            Ok(disc == rec.discriminant && g == rec.form && in_u_definitional_with(&mut table, &rec.form)?)
        })();
        match check {
            Ok(true) => {
                let e = by_degree.entry(rec.deg_d()).or_default();
                e.0 += 1;
                e.1 += u64::from(rec.nontrivial_auto);
            }
            Ok(false) => {}
            Err(e) => failure = Some(e),
        }
        Ok(())
    });
    if let Some(e) = failure {
        return Err(e);
    }
    let mut summary = summary.map_err(|e| match e {
        TabulateError::Invalid(e) => e,
        other => unreachable!("basic kernel with an infallible sink: {other}"),
    })?;
    for (deg, count) in summary.by_degree.iter_mut() {
        let (fields, autos) = by_degree.get(deg).copied().unwrap_or_default();
        count.fields = fields;
        count.nontrivial_autos = autos;
    }
    Ok(summary)
}
