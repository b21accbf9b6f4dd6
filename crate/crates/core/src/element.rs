//! Finite sums of terms c·x^α·e^{ik·x} and their exact star arithmetic.
//!
//! Terms are keyed by (α, k) in a `BTreeMap`, which fixes the iteration order
//! and makes every summation deterministic. Wave-vector components are snapped
//! to multiples of 2⁻⁴⁰ so that sums of wave vectors are exact and key
//! equality is associative.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::symplectic::SymplecticStructure;

pub type C64 = Complex64;

/// Relative pruning threshold applied after every operation.
pub const PRUNE_REL: f64 = 1e-12;

const K_GRID: f64 = 1_099_511_627_776.0; // 2^40

/// Rounds a wave-vector component onto the 2⁻⁴⁰ grid; -0.0 becomes 0.0.
pub fn snap(v: f64) -> f64 {
    let r = (v * K_GRID).round() / K_GRID;
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

/// Wave vector with a total order (component-wise `total_cmp`).
#[derive(Debug, Clone)]
pub struct WaveVector(pub Vec<f64>);

impl WaveVector {
    fn snapped(k: &[f64]) -> Self {
        WaveVector(k.iter().map(|&v| snap(v)).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&v| v == 0.0)
    }
}

impl PartialEq for WaveVector {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for WaveVector {}
impl PartialOrd for WaveVector {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for WaveVector {
    fn cmp(&self, other: &Self) -> Ordering {
        for (a, b) in self.0.iter().zip(&other.0) {
            match a.total_cmp(b) {
                Ordering::Equal => continue,
                o => return o,
            }
        }
        self.0.len().cmp(&other.0.len())
    }
}

/// Ordering is lexicographic on α, then on k.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct TermKey {
    pub alpha: Vec<u32>,
    pub k: WaveVector,
}

/// A single term c·x^α·e^{ik·x}.
#[derive(Debug, Clone, PartialEq)]
pub struct Term {
    pub alpha: Vec<u32>,
    pub k: Vec<f64>,
    pub coeff: C64,
}

impl Term {
    pub fn new(alpha: Vec<u32>, k: Vec<f64>, coeff: C64) -> Self {
        Self { alpha, k, coeff }
    }

    pub fn degree(&self) -> u32 {
        self.alpha.iter().sum()
    }
}

type Poly = BTreeMap<Vec<u32>, C64>;

/// Sums contributions while remembering the largest one, so that
/// cancellation residue can be pruned relative to the inputs.
struct Accumulator {
    terms: BTreeMap<TermKey, C64>,
    scale: f64,
}

impl Accumulator {
    fn new(scale: f64) -> Self {
        Self {
            terms: BTreeMap::new(),
            scale,
        }
    }

    fn add(&mut self, key: TermKey, c: C64) {
        if c == C64::new(0.0, 0.0) {
            return;
        }
        self.scale = self.scale.max(c.norm());
        *self.terms.entry(key).or_insert(C64::new(0.0, 0.0)) += c;
    }

    fn finish(mut self, s: Arc<SymplecticStructure>) -> MoyalElement {
        let largest = self.terms.values().fold(0.0_f64, |m, c| m.max(c.norm()));
        let cut = PRUNE_REL * self.scale.max(largest);
        self.terms.retain(|_, c| c.norm() > cut && c.norm() > 0.0);
        MoyalElement { s, terms: self.terms }
    }
}

/// Element of the polynomial × plane-wave subalgebra of the Moyal algebra.
#[derive(Debug, Clone)]
pub struct MoyalElement {
    s: Arc<SymplecticStructure>,
    terms: BTreeMap<TermKey, C64>,
}

impl PartialEq for MoyalElement {
    /// Exact equality of structure and stored terms.
    fn eq(&self, other: &Self) -> bool {
        same_structure(&self.s, &other.s) && self.terms == other.terms
    }
}

fn same_structure(a: &Arc<SymplecticStructure>, b: &Arc<SymplecticStructure>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

impl MoyalElement {
    pub fn zero(s: &Arc<SymplecticStructure>) -> Self {
        Self {
            s: Arc::clone(s),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(s: &Arc<SymplecticStructure>, c: C64) -> Self {
        let d = s.dim();
        Self::from_terms(s, [Term::new(vec![0; d], vec![0.0; d], c)]).expect("well-formed term")
    }

    /// The unit 𝕀.
    pub fn unit(s: &Arc<SymplecticStructure>) -> Self {
        Self::constant(s, C64::new(1.0, 0.0))
    }

    pub fn monomial(s: &Arc<SymplecticStructure>, alpha: &[u32], c: C64) -> Result<Self> {
        Self::from_terms(s, [Term::new(alpha.to_vec(), vec![0.0; s.dim()], c)])
    }

    pub fn plane_wave(s: &Arc<SymplecticStructure>, k: &[f64], c: C64) -> Result<Self> {
        Self::from_terms(s, [Term::new(vec![0; s.dim()], k.to_vec(), c)])
    }

    /// Builds an element from terms, merging equal keys.
    pub fn from_terms<I: IntoIterator<Item = Term>>(s: &Arc<SymplecticStructure>, terms: I) -> Result<Self> {
        let mut acc = Accumulator::new(0.0);
        for t in terms {
            if t.alpha.len() != s.dim() {
                return Err(Error::LengthMismatch {
                    got: t.alpha.len(),
                    dim: s.dim(),
                });
            }
            s.check_len(&t.k)?;
            if !(t.coeff.re.is_finite() && t.coeff.im.is_finite()) || t.k.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidInput("non-finite term".into()));
            }
            acc.add(
                TermKey {
                    alpha: t.alpha,
                    k: WaveVector::snapped(&t.k),
                },
                t.coeff,
            );
        }
        Ok(acc.finish(Arc::clone(s)))
    }

    /// x_μ.
    pub fn coordinate(s: &Arc<SymplecticStructure>, mu: usize) -> Result<Self> {
        s.check_index(mu)?;
        let mut alpha = vec![0; s.dim()];
        alpha[mu] = 1;
        Self::monomial(s, &alpha, C64::new(1.0, 0.0))
    }

    /// ξ_μ = -Θ⁻¹_{μν} x_ν.
    pub fn xi(s: &Arc<SymplecticStructure>, mu: usize) -> Result<Self> {
        s.check_index(mu)?;
        let d = s.dim();
        let terms = (0..d).filter(|&nu| s.theta_inv(mu, nu) != 0.0).map(|nu| {
            let mut alpha = vec![0; d];
            alpha[nu] = 1;
            Term::new(alpha, vec![0.0; d], C64::new(-s.theta_inv(mu, nu), 0.0))
        });
        Self::from_terms(s, terms)
    }

    pub fn structure(&self) -> &Arc<SymplecticStructure> {
        &self.s
    }

    pub fn dim(&self) -> usize {
        self.s.dim()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = Term> + '_ {
        self.terms
            .iter()
            .map(|(key, c)| Term::new(key.alpha.clone(), key.k.0.clone(), *c))
    }

    pub fn coefficient(&self, alpha: &[u32], k: &[f64]) -> C64 {
        let key = TermKey {
            alpha: alpha.to_vec(),
            k: WaveVector::snapped(k),
        };
        self.terms.get(&key).copied().unwrap_or(C64::new(0.0, 0.0))
    }

    /// Coefficient of 𝕀, i.e. the value P(0) for a polynomial P.
    pub fn constant_term(&self) -> C64 {
        let d = self.dim();
        self.coefficient(&vec![0; d], &vec![0.0; d])
    }

    /// Returns c when the element equals c·𝕀 (zero included).
    pub fn as_scalar(&self) -> Option<C64> {
        match self.terms.len() {
            0 => Some(C64::new(0.0, 0.0)),
            1 => {
                let (key, c) = self.terms.iter().next().expect("one term");
                (key.alpha.iter().all(|&a| a == 0) && key.k.is_zero()).then_some(*c)
            }
            _ => None,
        }
    }

    pub fn is_polynomial(&self) -> bool {
        self.terms.keys().all(|key| key.k.is_zero())
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|key| key.alpha.iter().sum()).max().unwrap_or(0)
    }

    /// Largest coefficient modulus.
    pub fn max_norm(&self) -> f64 {
        self.terms.values().fold(0.0, |m, c| m.max(c.norm()))
    }

    fn check(&self, other: &Self) -> Result<()> {
        if same_structure(&self.s, &other.s) {
            Ok(())
        } else {
            Err(Error::StructureMismatch)
        }
    }

    fn combine(&self, other: &Self, sign: f64) -> Result<Self> {
        self.check(other)?;
        let mut acc = Accumulator::new(self.max_norm().max(other.max_norm()));
        for (key, c) in &self.terms {
            acc.add(key.clone(), *c);
        }
        for (key, c) in &other.terms {
            acc.add(key.clone(), *c * sign);
        }
        Ok(acc.finish(Arc::clone(&self.s)))
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.combine(other, 1.0)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.combine(other, -1.0)
    }

    pub fn scale(&self, c: C64) -> Self {
        let mut acc = Accumulator::new(0.0);
        for (key, v) in &self.terms {
            acc.add(key.clone(), *v * c);
        }
        acc.finish(Arc::clone(&self.s))
    }

    pub fn scale_re(&self, c: f64) -> Self {
        self.scale(C64::new(c, 0.0))
    }

    /// a ⋆ b.
    pub fn star(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let s = &self.s;
        let entries = coupling_entries(s);
        let left = group_by_wave(&self.terms);
        let right = group_by_wave(&other.terms);
        let mut acc = Accumulator::new(0.0);
        for (k, p) in &left {
            for (q, r) in &right {
                star_groups(s, &entries, k, p, q, r, &mut acc);
            }
        }
        Ok(acc.finish(Arc::clone(s)))
    }

    /// [a, b]⋆ = a⋆b - b⋆a.
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        self.star(other)?.try_sub(&other.star(self)?)
    }

    /// {a, b}⋆ = a⋆b + b⋆a.
    pub fn anticommutator(&self, other: &Self) -> Result<Self> {
        self.star(other)?.try_add(&other.star(self)?)
    }

    /// Star power aⁿ with a⁰ = 𝕀.
    pub fn star_pow(&self, n: u32) -> Result<Self> {
        let mut out = Self::unit(&self.s);
        for _ in 0..n {
            out = out.star(self)?;
        }
        Ok(out)
    }

    /// a†: (α, k, c) ↦ (α, -k, c̄).
    pub fn involution(&self) -> Self {
        let mut acc = Accumulator::new(0.0);
        for (key, c) in &self.terms {
            let k: Vec<f64> = key.k.0.iter().map(|&v| -v).collect();
            acc.add(
                TermKey {
                    alpha: key.alpha.clone(),
                    k: WaveVector::snapped(&k),
                },
                c.conj(),
            );
        }
        acc.finish(Arc::clone(&self.s))
    }

    /// ∂_μ a, computed term-wise.
    pub fn partial(&self, mu: usize) -> Result<Self> {
        self.s.check_index(mu)?;
        let mut acc = Accumulator::new(0.0);
        for (key, c) in &self.terms {
            let a = key.alpha[mu];
            if a > 0 {
                let mut alpha = key.alpha.clone();
                alpha[mu] -= 1;
                acc.add(
                    TermKey {
                        alpha,
                        k: key.k.clone(),
                    },
                    *c * a as f64,
                );
            }
            let kmu = key.k.0[mu];
            if kmu != 0.0 {
                acc.add(key.clone(), *c * C64::new(0.0, kmu));
            }
        }
        Ok(acc.finish(Arc::clone(&self.s)))
    }

    /// Ordinary commutative product a·b.
    pub fn pointwise(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut acc = Accumulator::new(0.0);
        for (ka, ca) in &self.terms {
            for (kb, cb) in &other.terms {
                let alpha = ka.alpha.iter().zip(&kb.alpha).map(|(a, b)| a + b).collect();
                acc.add(
                    TermKey {
                        alpha,
                        k: add_waves(&ka.k, &kb.k),
                    },
                    ca * cb,
                );
            }
        }
        Ok(acc.finish(Arc::clone(&self.s)))
    }

    /// Value of the function at the point x.
    pub fn eval(&self, x: &[f64]) -> Result<C64> {
        self.s.check_len(x)?;
        let mut total = C64::new(0.0, 0.0);
        for (key, c) in &self.terms {
            let mut mono = 1.0;
            for (xi, &a) in x.iter().zip(&key.alpha) {
                mono *= xi.powi(a as i32);
            }
            let phase: f64 = key.k.0.iter().zip(x).map(|(k, xi)| k * xi).sum();
            total += c * mono * C64::from_polar(1.0, phase);
        }
        Ok(total)
    }

    /// max |a - b| over all keys.
    pub fn distance(&self, other: &Self) -> Result<f64> {
        self.check(other)?;
        let mut worst: f64 = 0.0;
        for (key, c) in &self.terms {
            let o = other.terms.get(key).copied().unwrap_or_default();
            worst = worst.max((c - o).norm());
        }
        for (key, c) in &other.terms {
            if !self.terms.contains_key(key) {
                worst = worst.max(c.norm());
            }
        }
        Ok(worst)
    }

    /// Distance scaled by max(1, ‖a‖, ‖b‖).
    pub fn rel_distance(&self, other: &Self) -> Result<f64> {
        let scale = 1.0_f64.max(self.max_norm()).max(other.max_norm());
        Ok(self.distance(other)? / scale)
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.rel_distance(other).map(|d| d <= tol).unwrap_or(false)
    }
}

/// (α, k, c) ↦ (α, k, c) with all wave vectors summed exactly on the grid.
fn add_waves(a: &WaveVector, b: &WaveVector) -> WaveVector {
    WaveVector(a.0.iter().zip(&b.0).map(|(x, y)| snap(x + y)).collect())
}

fn group_by_wave(terms: &BTreeMap<TermKey, C64>) -> BTreeMap<WaveVector, Poly> {
    let mut out: BTreeMap<WaveVector, Poly> = BTreeMap::new();
    for (key, c) in terms {
        out.entry(key.k.clone()).or_default().insert(key.alpha.clone(), *c);
    }
    out
}

/// Non-zero entries (μ, ν, (i/2)Θ_{μν}) of the coupling operator.
fn coupling_entries(s: &SymplecticStructure) -> Vec<(usize, usize, C64)> {
    let d = s.dim();
    let mut out = Vec::new();
    for mu in 0..d {
        for nu in 0..d {
            let t = s.big_theta(mu, nu);
            if t != 0.0 {
                out.push((mu, nu, C64::new(0.0, 0.5 * t)));
            }
        }
    }
    out
}

/// P(x + shift) as a polynomial in x.
fn translate(p: &Poly, shift: &[f64]) -> Poly {
    if shift.iter().all(|&v| v == 0.0) {
        return p.clone();
    }
    let mut out = Poly::new();
    for (alpha, c) in p {
        let mut partial: Vec<(Vec<u32>, C64)> = vec![(vec![0; alpha.len()], *c)];
        for (mu, &a) in alpha.iter().enumerate() {
            if a == 0 {
                continue;
            }
            let sh = shift[mu];
            let mut next = Vec::with_capacity(partial.len() * (a as usize + 1));
            for (beta, w) in &partial {
                if sh == 0.0 {
                    let mut b = beta.clone();
                    b[mu] = a;
                    next.push((b, *w));
                    continue;
                }
                // (x + s)^a = Σ_j C(a, j) s^{a-j} x^j
                let mut binom = 1.0;
                for j in 0..=a {
                    let mut b = beta.clone();
                    b[mu] = j;
                    next.push((b, *w * binom * sh.powi((a - j) as i32)));
                    binom = binom * (a - j) as f64 / (j + 1) as f64;
                }
            }
            partial = next;
        }
        for (beta, w) in partial {
            *out.entry(beta).or_insert(C64::new(0.0, 0.0)) += w;
        }
    }
    out
}

/// Star product of the groups e^{ik·x}P(x) and e^{iq·x}R(x), accumulated.
///
/// The bidifferential exponential splits into the phase e^{-(i/2)kΘq}, a
/// translation of P by -(1/2)Θq, a translation of R by -(1/2)kΘ, and the
/// polynomial coupling exp((i/2)Θ_{μν}∂¹_μ∂²_ν).
fn star_groups(
    s: &SymplecticStructure,
    entries: &[(usize, usize, C64)],
    k: &WaveVector,
    p: &Poly,
    q: &WaveVector,
    r: &Poly,
    acc: &mut Accumulator,
) {
    let d = s.dim();
    let phase = C64::from_polar(1.0, -0.5 * s.wedge_unchecked(&k.0, &q.0));
    let shift_left: Vec<f64> = (0..d)
        .map(|mu| -0.5 * (0..d).map(|nu| s.big_theta(mu, nu) * q.0[nu]).sum::<f64>())
        .collect();
    let shift_right: Vec<f64> = (0..d)
        .map(|nu| -0.5 * (0..d).map(|mu| k.0[mu] * s.big_theta(mu, nu)).sum::<f64>())
        .collect();
    let p = translate(p, &shift_left);
    let r = translate(r, &shift_right);
    let wave = add_waves(k, q);
    for (a, ca) in &p {
        for (b, cb) in &r {
            let mut stack = vec![(a.clone(), b.clone(), ca * cb)];
            for &(mu, nu, c) in entries {
                let mut next = Vec::with_capacity(stack.len());
                for (a, b, w) in stack {
                    let mmax = a[mu].min(b[nu]);
                    let mut coef = w;
                    for m in 1..=mmax {
                        coef *= c * ((a[mu] - m + 1) * (b[nu] - m + 1)) as f64 / m as f64;
                        let mut a2 = a.clone();
                        let mut b2 = b.clone();
                        a2[mu] -= m;
                        b2[nu] -= m;
                        next.push((a2, b2, coef));
                    }
                    next.push((a, b, w));
                }
                stack = next;
            }
            for (a, b, w) in stack {
                let alpha = a.iter().zip(&b).map(|(x, y)| x + y).collect();
                acc.add(
                    TermKey {
                        alpha,
                        k: wave.clone(),
                    },
                    phase * w,
                );
            }
        }
    }
}

/// Exact star product of two single terms.
pub fn star_term(t1: &Term, t2: &Term, s: &Arc<SymplecticStructure>) -> Result<MoyalElement> {
    let a = MoyalElement::from_terms(s, [t1.clone()])?;
    let b = MoyalElement::from_terms(s, [t2.clone()])?;
    a.star(&b)
}

/// ‖g†⋆g - 𝕀‖ ≤ tol in the max-coefficient norm.
pub fn is_unitary(g: &MoyalElement, tol: f64) -> bool {
    unitarity_residual(g) <= tol
}

pub fn unitarity_residual(g: &MoyalElement) -> f64 {
    let unit = MoyalElement::unit(g.structure());
    g.involution()
        .star(g)
        .and_then(|p| p.distance(&unit))
        .unwrap_or(f64::INFINITY)
}

impl Add for &MoyalElement {
    type Output = MoyalElement;
    /// Panics on mismatched structures; use [`MoyalElement::try_add`] to handle that case.
    fn add(self, rhs: Self) -> MoyalElement {
        self.try_add(rhs).expect("structure mismatch")
    }
}

impl Sub for &MoyalElement {
    type Output = MoyalElement;
    /// Panics on mismatched structures; use [`MoyalElement::try_sub`] to handle that case.
    fn sub(self, rhs: Self) -> MoyalElement {
        self.try_sub(rhs).expect("structure mismatch")
    }
}

impl Neg for &MoyalElement {
    type Output = MoyalElement;
    fn neg(self) -> MoyalElement {
        self.scale_re(-1.0)
    }
}

impl Mul<C64> for &MoyalElement {
    type Output = MoyalElement;
    fn mul(self, rhs: C64) -> MoyalElement {
        self.scale(rhs)
    }
}
