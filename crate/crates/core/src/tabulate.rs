//! Enumeration of reduced binary cubic forms with imaginary (odd-degree) or
//! unusual (even-degree) Hessian whose discriminant has degree at most `B`.
//!
//! The coefficient space is split into work units, one per `(a, b)` pair.
//! Units run on a rayon pool in fixed-size batches and their records are
//! handed to the sink in unit order, so output is identical for every
//! worker count and nothing beyond one batch is held in memory.
//!
//! Two kernels share the traversal order and therefore produce identical
//! output. The fast kernel prunes by degree, rejects whole `c` and `d`-degree
//! blocks from the Hessian shape, and updates `Q` and `R` incrementally as
//! `d` steps through an odometer. The basic kernel runs every form in the
//! box through the high-level reducedness and membership tests.

use std::collections::BTreeMap;
use std::fmt;
use std::io;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::cubform::BinaryCubicForm;
use crate::error::{Error, Result};
use crate::field::{FieldElement, PrimeField};
use crate::poly::{mul_into, PolyRing, Polynomial};
use crate::quadform::{classify, BinaryQuadraticForm, DiscriminantClass};
use crate::sieve::in_u_parts;

/// Largest supported degree bound; fixes the fast kernel's buffer sizes.
pub const MAX_BOUND: u32 = 32;

const CAP: usize = 72;
const UNITS_PER_WORKER: usize = 8;

/// Degree parity of the discriminants in one pass.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Parity {
    /// Odd degree, `sgn(−3D) ∈ {1, h}`.
    Odd,
    /// Even degree, `sgn(−3D) = h`.
    Even,
}

impl Parity {
    pub fn of_degree(deg: usize) -> Self {
        if deg % 2 == 1 {
            Parity::Odd
        } else {
            Parity::Even
        }
    }

    fn matches(self, deg: usize) -> bool {
        Self::of_degree(deg) == self
    }
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Parity::Odd => "odd",
            Parity::Even => "even",
        })
    }
}

/// Which passes a request runs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ParityChoice {
    Odd,
    Even,
    Both,
}

impl ParityChoice {
    pub fn passes(self) -> &'static [Parity] {
        match self {
            ParityChoice::Odd => &[Parity::Odd],
            ParityChoice::Even => &[Parity::Even],
            ParityChoice::Both => &[Parity::Odd, Parity::Even],
        }
    }
}

impl fmt::Display for ParityChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ParityChoice::Odd => "odd",
            ParityChoice::Even => "even",
            ParityChoice::Both => "both",
        })
    }
}

impl FromStr for ParityChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "odd" => Ok(ParityChoice::Odd),
            "even" => Ok(ParityChoice::Even),
            "both" => Ok(ParityChoice::Both),
            _ => Err(Error::Parse(s.to_string())),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TabulationRequest {
    pub q: u32,
    pub bound: u32,
    pub parity: ParityChoice,
    pub workers: usize,
    pub primitive_root: Option<u32>,
}

impl TabulationRequest {
    pub fn new(q: u32, bound: u32, parity: ParityChoice) -> Self {
        TabulationRequest { q, bound, parity, workers: 1, primitive_root: None }
    }

    pub fn workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }

    pub fn primitive_root(mut self, h: Option<u32>) -> Self {
        self.primitive_root = h;
        self
    }

    /// Checks the request and builds the ring it runs over.
    pub fn ring(&self) -> Result<PolyRing> {
        let field = match self.primitive_root {
            Some(h) => PrimeField::with_primitive_root(self.q, h)?,
            None => PrimeField::new(self.q)?,
        };
        if self.bound == 0 || self.bound > MAX_BOUND {
            return Err(Error::InvalidBound { got: self.bound, max: MAX_BOUND });
        }
        Ok(PolyRing::new(field))
    }
}

/// One cubic field: its reduced form and discriminant.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TabulationRecord {
    pub q: u32,
    pub form: BinaryCubicForm,
    pub discriminant: Polynomial,
    /// The Hessian has `Q ≠ 0` and automorphisms other than `±I`, `±J`.
    pub nontrivial_auto: bool,
}

impl TabulationRecord {
    pub fn deg_d(&self) -> usize {
        self.discriminant.degree().expect("discriminant is non-zero")
    }
}

/// `q=<int>;degD=<int>;D=<poly>;f=<a>|<b>|<c>|<d>;auto=<0|1>`
impl fmt::Display for TabulationRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "q={};degD={};D={};f={};auto={}",
            self.q,
            self.deg_d(),
            self.discriminant,
            self.form,
            u8::from(self.nontrivial_auto)
        )
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct DegreeCount {
    pub fields: u64,
    pub nontrivial_autos: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TabulationSummary {
    pub q: u32,
    pub bound: u32,
    pub parity: ParityChoice,
    pub by_degree: BTreeMap<usize, DegreeCount>,
    /// Candidate forms whose invariants were evaluated.
    pub forms_visited: u64,
    pub elapsed: Duration,
    /// `false` when a sink failure stopped the run early.
    pub complete: bool,
}

impl TabulationSummary {
    fn new(q: u32, bound: u32, parity: ParityChoice) -> Self {
        let mut by_degree = BTreeMap::new();
        for &p in parity.passes() {
            for deg in (1..=bound as usize).filter(|&d| p.matches(d)) {
                by_degree.insert(deg, DegreeCount::default());
            }
        }
        TabulationSummary { q, bound, parity, by_degree, forms_visited: 0, elapsed: Duration::ZERO, complete: true }
    }

    fn record(&mut self, rec: &TabulationRecord) {
        let entry = self.by_degree.entry(rec.deg_d()).or_default();
        entry.fields += 1;
        entry.nontrivial_autos += u64::from(rec.nontrivial_auto);
    }

    pub fn total_fields(&self) -> u64 {
        self.by_degree.values().map(|c| c.fields).sum()
    }

    pub fn nontrivial_auto_count(&self) -> u64 {
        self.by_degree.values().map(|c| c.nontrivial_autos).sum()
    }

    pub fn fields_by_degree(&self) -> BTreeMap<usize, u64> {
        self.by_degree.iter().map(|(&d, c)| (d, c.fields)).collect()
    }

    /// `q,B,parity,degD,count,nontrivial_autos` with one row per degree and a
    /// closing `total` row.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("q,B,parity,degD,count,nontrivial_autos\n");
        for (&deg, c) in &self.by_degree {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                self.q,
                self.bound,
                Parity::of_degree(deg),
                deg,
                c.fields,
                c.nontrivial_autos
            ));
        }
        out.push_str(&format!(
            "{},{},{},total,{},{}\n",
            self.q,
            self.bound,
            self.parity,
            self.total_fields(),
            self.nontrivial_auto_count()
        ));
        out
    }
}

#[derive(Debug, thiserror::Error)]
pub enum TabulateError {
    #[error(transparent)]
    Invalid(#[from] Error),
    #[error("record sink failed after {} fields: {source}", summary.total_fields())]
    Sink { source: io::Error, summary: Box<TabulationSummary> },
    #[error("cannot start worker pool: {0}")]
    Pool(String),
}

/// Whether the discriminant degree can be at most `bound` with the given
/// parity, judged from the degrees of the five discriminant terms
/// `b^2c^2`, `ac^3`, `abcd`, `b^3d`, `a^2d^2`. `None` stands for a zero
/// coefficient, whose terms are absent. A maximum attained twice may cancel
/// and is always admissible.
pub fn degree_prune(
    deg_a: Option<usize>,
    deg_b: Option<usize>,
    deg_c: Option<usize>,
    deg_d: Option<usize>,
    parity: Parity,
    bound: u32,
) -> bool {
    let (a, b, c, d) = (deg_a, deg_b, deg_c, deg_d);
    let terms = [
        b.zip(c).map(|(b, c)| 2 * (b + c)),
        a.zip(c).map(|(a, c)| a + 3 * c),
        a.zip(b).zip(c).zip(d).map(|(((a, b), c), d)| a + b + c + d),
        b.zip(d).map(|(b, d)| 3 * b + d),
        a.zip(d).map(|(a, d)| 2 * (a + d)),
    ];
    let Some(m) = terms.iter().flatten().copied().max() else {
        return false;
    };
    let hits = terms.iter().flatten().filter(|&&x| x == m).count();
    hits > 1 || (parity.matches(m) && m <= bound as usize)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Kernel {
    Fast,
    Basic,
}

/// Tabulates with the pruned kernel, streaming records to `sink`.
pub fn tabulate<F>(req: &TabulationRequest, sink: F) -> std::result::Result<TabulationSummary, TabulateError>
where
    F: FnMut(&TabulationRecord) -> io::Result<()>,
{
    run(req, Kernel::Fast, sink)
}

/// Tabulates by testing every form in the coefficient box; same output as
/// [`tabulate`].
pub fn tabulate_basic<F>(req: &TabulationRequest, sink: F) -> std::result::Result<TabulationSummary, TabulateError>
where
    F: FnMut(&TabulationRecord) -> io::Result<()>,
{
    run(req, Kernel::Basic, sink)
}

fn run<F>(req: &TabulationRequest, kernel: Kernel, mut sink: F) -> std::result::Result<TabulationSummary, TabulateError>
where
    F: FnMut(&TabulationRecord) -> io::Result<()>,
{
    let start = Instant::now();
    let ring = req.ring()?;
    let workers = req.workers.max(1);
    let pool =
        rayon::ThreadPoolBuilder::new().num_threads(workers).build().map_err(|e| TabulateError::Pool(e.to_string()))?;
    let mut summary = TabulationSummary::new(req.q, req.bound, req.parity);

    for &parity in req.parity.passes() {
        let pass = Pass::new(&ring, req.bound, parity);
        let units = pass.units();
        for batch in units.chunks(workers * UNITS_PER_WORKER) {
            let outputs: Vec<UnitOutput> = pool.install(|| {
                batch
                    .par_iter()
                    .map(|(a, b)| match kernel {
                        Kernel::Fast => pass.fast_unit(a, b),
                        Kernel::Basic => pass.basic_unit(a, b),
                    })
                    .collect()
            });
            for out in outputs {
                summary.forms_visited += out.visited;
                for rec in &out.records {
                    if let Err(source) = sink(rec) {
                        summary.complete = false;
                        summary.elapsed = start.elapsed();
                        return Err(TabulateError::Sink { source, summary: Box::new(summary) });
                    }
                    summary.record(rec);
                }
            }
        }
    }
    summary.elapsed = start.elapsed();
    Ok(summary)
}

struct UnitOutput {
    records: Vec<TabulationRecord>,
    visited: u64,
}

/// Fixed-capacity dense polynomial for the inner loop; `len` is one more
/// than an upper bound on the degree.
#[derive(Clone, Copy)]
struct Dense {
    c: [u32; CAP],
    len: usize,
}

impl Dense {
    fn from_poly(p: &Polynomial) -> Self {
        let mut c = [0u32; CAP];
        c[..p.raw().len()].copy_from_slice(p.raw());
        Dense { c, len: p.raw().len() }
    }

    #[inline]
    fn trim(&mut self) {
        while self.len > 0 && self.c[self.len - 1] == 0 {
            self.len -= 1;
        }
    }

    #[inline]
    fn degree(&self) -> Option<usize> {
        self.len.checked_sub(1)
    }

    #[inline]
    fn lead(&self) -> u32 {
        self.c[self.len - 1]
    }

    /// `self += k * src * t^shift` for a residue `k`.
    #[inline]
    fn add_scaled(&mut self, field: &PrimeField, src: &[u32], shift: usize) {
        for (dst, &s) in self.c[shift..shift + src.len()].iter_mut().zip(src) {
            *dst = field.add_raw(*dst, s);
        }
        self.len = self.len.max(shift + src.len());
    }

    fn polynomial(&self) -> Polynomial {
        Polynomial::from_slice(&self.c[..self.len])
    }
}

/// One parity pass over one ring and bound.
struct Pass<'a> {
    ring: &'a PolyRing,
    field: &'a PrimeField,
    q: u32,
    h: u32,
    bound: u32,
    parity: Parity,
}

impl<'a> Pass<'a> {
    fn new(ring: &'a PolyRing, bound: u32, parity: Parity) -> Self {
        let field = ring.field();
        Pass { ring, field, q: field.modulus(), h: field.primitive_root().value(), bound, parity }
    }

    /// `(a, b)` pairs: `a` with `deg a <= B/4` and `sgn(a) ∈ S`, then `b` with
    /// `deg b <= B/4`, zero first.
    fn units(&self) -> Vec<(Polynomial, Polynomial)> {
        let quarter = (self.bound / 4) as usize;
        let field = self.field;
        let a_list: Vec<Polynomial> =
            (0..=quarter).flat_map(|k| self.ring.polys_of_degree(k, |c| field.in_s_raw(c))).collect();
        let b_list: Vec<Polynomial> = self.ring.polys_up_to_degree(quarter).collect();
        a_list.iter().flat_map(|a| b_list.iter().map(move |b| (a.clone(), b.clone()))).collect()
    }

    /// `c` with `deg b + deg c <= B/2`, zero first, counting `deg 0 = 0`.
    fn c_values(&self, b: &Polynomial) -> impl Iterator<Item = Polynomial> + '_ {
        let half = (self.bound / 2) as usize;
        self.ring.polys_up_to_degree(half - b.degree().unwrap_or(0))
    }

    /// Degrees of `d`: `deg a + deg d <= B/2`.
    fn d_degrees(&self, a: &Polynomial) -> std::ops::RangeInclusive<usize> {
        0..=(self.bound / 2) as usize - a.degree().expect("a is non-zero")
    }

    /// Sign condition on `−3D` for this pass.
    #[inline]
    fn sign_ok(&self, s: u32) -> bool {
        match self.parity {
            Parity::Odd => s == 1 || s == self.h,
            Parity::Even => s == self.h,
        }
    }

    fn basic_unit(&self, a: &Polynomial, b: &Polynomial) -> UnitOutput {
        let ring = self.ring;
        let mut records = Vec::new();
        let mut visited = 0u64;
        for c in self.c_values(b) {
            for i in self.d_degrees(a) {
                for d in ring.polys_of_degree(i, |_| true) {
                    visited += 1;
                    let f = BinaryCubicForm::new(a.clone(), b.clone(), c.clone(), d);
                    if let Some(rec) = self.basic_check(f) {
                        records.push(rec);
                    }
                }
            }
        }
        UnitOutput { records, visited }
    }

    fn basic_check(&self, f: BinaryCubicForm) -> Option<TabulationRecord> {
        let ring = self.ring;
        let disc = f.discriminant(ring);
        let n = ring.scale_int(&disc, -3);
        let deg = n.degree().filter(|&k| k > 0 && k <= self.bound as usize)?;
        if !self.parity.matches(deg) || !self.sign_ok(n.sgn().value()) {
            return None;
        }
        if classify(ring, &n).ok()? == DiscriminantClass::Real {
            return None;
        }
        if !f.is_reduced(ring).ok()? {
            return None;
        }
        let h = f.hessian(ring);
        if !in_u_parts(ring, &h, &disc).ok()? {
            return None;
        }
        let nontrivial_auto =
            h.a.degree() == h.c.degree() && !h.b.is_zero() && !h.nontrivial_automorphisms(ring).ok()?.is_empty();
        Some(TabulationRecord { q: self.q, form: f, discriminant: disc, nontrivial_auto })
    }

    fn fast_unit(&self, a: &Polynomial, b: &Polynomial) -> UnitOutput {
        let ring = self.ring;
        let field = self.field;
        let half = (self.bound / 2) as usize;
        let deg_a = a.degree().expect("a is non-zero");
        let mut records = Vec::new();
        let mut visited = 0u64;

        // −9a and −3b, the steps of Q and R when d gains t^k.
        let step_q: Vec<u32> =
            a.raw().iter().map(|&x| field.mul_raw(x, field.reduce(field.modulus() * 9 - 9))).collect();
        let step_r: Vec<u32> =
            b.raw().iter().map(|&x| field.mul_raw(x, field.reduce(field.modulus() * 3 - 3))).collect();

        for c in self.c_values(b) {
            let p = ring.sub(&ring.square(b), &ring.scale_int(&ring.mul(a, &c), 3));
            // Partially reduced Hessian: sgn(P) ∈ {1, h} and |P|^2 <= |−3D|.
            let Some(deg_p) = p.degree() else { continue };
            let sp = p.sgn().value();
            if deg_p > half || (sp != 1 && sp != self.h) {
                continue;
            }
            let bc = ring.mul(b, &c);
            let cc = ring.square(&c);
            for i in self.d_degrees(a) {
                if !degree_prune(Some(deg_a), b.degree(), c.degree(), Some(i), self.parity, self.bound) {
                    continue;
                }
                // |Q| < |P| needs both terms of bc − 9ad below |P| unless they can cancel.
                let deg_ad = deg_a + i;
                let cancel_q = bc.degree() == Some(deg_ad);
                if !cancel_q && (deg_ad >= deg_p || bc.degree().is_some_and(|k| k >= deg_p)) {
                    continue;
                }
                // |P| <= |R| and |P||R| <= q^B, R = c^2 − 3bd.
                let deg_bd = b.degree().map(|k| k + i);
                if cc.degree() != deg_bd {
                    let deg_r = cc.degree().max(deg_bd).expect("d is non-zero");
                    if deg_r < deg_p || deg_p + deg_r > self.bound as usize || !self.parity.matches(deg_p + deg_r) {
                        continue;
                    }
                }
                visited += self.d_block(a, b, &c, &p, &bc, &cc, i, &step_q, &step_r, &mut records);
            }
        }
        UnitOutput { records, visited }
    }

    /// Runs `d` through every polynomial of degree `i`, keeping `Q = bc − 9ad`
    /// and `R = c^2 − 3bd` current. Returns the number of `d` visited.
    #[allow(clippy::too_many_arguments)]
    fn d_block(
        &self,
        a: &Polynomial,
        b: &Polynomial,
        c: &Polynomial,
        p: &Polynomial,
        bc: &Polynomial,
        cc: &Polynomial,
        i: usize,
        step_q: &[u32],
        step_r: &[u32],
        records: &mut Vec<TabulationRecord>,
    ) -> u64 {
        let field = self.field;
        let q = self.q;
        let deg_p = p.degree().expect("P is non-zero");
        let sp = p.sgn().value();
        let minus_four_sp = field.mul_raw(field.neg_raw(field.reduce(4)), sp);
        let bound = self.bound as usize;

        // d = t^i to start.
        let mut digits = [0u32; CAP];
        digits[i] = 1;
        let d0 = Polynomial::monomial(FieldElement::ONE, i);
        let mut qq = Dense::from_poly(bc);
        let mut rr = Dense::from_poly(cc);
        let ad = self.ring.mul(a, &d0);
        let bd = self.ring.mul(b, &d0);
        let mut tmp = [0u32; CAP];
        for (k, &x) in ad.raw().iter().enumerate() {
            tmp[k] = field.mul_raw(x, field.reduce(q * 9 - 9));
        }
        qq.add_scaled(field, &tmp[..ad.raw().len()], 0);
        for (k, &x) in bd.raw().iter().enumerate() {
            tmp[k] = field.mul_raw(x, field.reduce(q * 3 - 3));
        }
        rr.add_scaled(field, &tmp[..bd.raw().len()], 0);

        let mut visited = 0u64;
        loop {
            visited += 1;
            qq.trim();
            rr.trim();
            if let Some(rec) = self.fast_check(a, b, c, p, deg_p, minus_four_sp, &qq, &rr, &digits[..=i], bound) {
                records.push(rec);
            }
            // Odometer step: the lowest digit that is not at its maximum
            // goes up by one and every digit below wraps q−1 → 0. Each
            // changed digit is a `+1` at that power of t.
            let mut k = 0;
            loop {
                let max = q - 1;
                if k == i && digits[k] == max {
                    return visited;
                }
                qq.add_scaled(field, step_q, k);
                rr.add_scaled(field, step_r, k);
                if digits[k] == max {
                    digits[k] = 0;
                    k += 1;
                } else {
                    digits[k] += 1;
                    break;
                }
            }
        }
    }

    #[allow(clippy::too_many_arguments)]
    #[inline]
    fn fast_check(
        &self,
        a: &Polynomial,
        b: &Polynomial,
        c: &Polynomial,
        p: &Polynomial,
        deg_p: usize,
        minus_four_sp: u32,
        qq: &Dense,
        rr: &Dense,
        digits: &[u32],
        bound: usize,
    ) -> Option<TabulationRecord> {
        let field = self.field;
        // |Q| < |P| <= |R|; then −3D = Q^2 − 4PR has degree deg P + deg R and
        // leading coefficient −4 sgn(P) sgn(R).
        if qq.degree() >= Some(deg_p) {
            return None;
        }
        let deg_r = rr.degree()?;
        let deg_n = deg_p + deg_r;
        if deg_r < deg_p || deg_n > bound || deg_n == 0 || !self.parity.matches(deg_n) {
            return None;
        }
        if !self.sign_ok(field.mul_raw(minus_four_sp, rr.lead())) {
            return None;
        }
        let equal_norms = deg_r == deg_p;
        if equal_norms && p.sgn() != FieldElement::ONE {
            return None;
        }
        if qq.len > 0 && !field.in_s_raw(qq.lead()) {
            return None;
        }
        if qq.len == 0 && !field.in_s_raw(*digits.last().expect("d is non-zero")) {
            return None;
        }

        let ring = self.ring;
        let d = Polynomial::from_slice(digits);
        let form = BinaryCubicForm::new(a.clone(), b.clone(), c.clone(), d);
        let hessian = BinaryQuadraticForm::new(p.clone(), qq.polynomial(), rr.polynomial());
        let mut nontrivial_auto = false;
        if equal_norms {
            if !form.is_reduced(ring).ok()? {
                return None;
            }
            nontrivial_auto = qq.len > 0 && !hessian.nontrivial_automorphisms(ring).ok()?.is_empty();
        }
        let n = hessian_discriminant(ring, &hessian);
        let minus_third = field.inv(field.neg(field.element(3))).ok()?;
        let disc = ring.scale(&n, minus_third);
        if !in_u_parts(ring, &hessian, &disc).ok()? {
            return None;
        }
        Some(TabulationRecord { q: self.q, form, discriminant: disc, nontrivial_auto })
    }
}

/// `Q^2 − 4PR` through the slice kernel.
fn hessian_discriminant(ring: &PolyRing, h: &BinaryQuadraticForm) -> Polynomial {
    let field = ring.field();
    let mut out = [0u32; CAP];
    let mut pr = [0u32; CAP];
    let (p, q, r) = (h.a.raw(), h.b.raw(), h.c.raw());
    let n_pr = mul_into(field, &mut pr, p, r);
    let four = field.reduce(4);
    let mut len = n_pr;
    for k in 0..n_pr {
        out[k] = field.neg_raw(field.mul_raw(four, pr[k]));
    }
    if !q.is_empty() {
        let mut qq = [0u32; CAP];
        let n_qq = mul_into(field, &mut qq, q, q);
        for k in 0..n_qq {
            out[k] = field.add_raw(out[k], qq[k]);
        }
        len = len.max(n_qq);
    }
    Polynomial::from_slice(&out[..len])
}
