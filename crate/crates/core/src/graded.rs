//! The Z₂-graded algebra 𝔸• = 𝓜⁰ ⊕ 𝓜¹, its derivations Ad_T, Ad_U, Ad_M,
//! Ad_J, graded connections and their curvature.
//!
//! Product: ab = (a₀⋆b₀ + a₁⋆b₁, a₀⋆b₁ + a₁⋆b₀). Involution: a† = (a₀†, i·a₁†).
//! Bracket: [a,b]• = ([a₀,b₀]⋆ + {a₁,b₁}⋆, [a₀,b₁]⋆ + [a₁,b₀]⋆).
//!
//! Two scales enter the generator representatives: J = (0, i·s_J) and
//! M_{μν} = (s_M·iξ_μξ_ν, 0). The unscaled algebra has s_J = s_M = 1; the
//! rescaled one has s_J = 1/(mθ) and s_M = μθ.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::derivations::{DerivationAlgebra, Generator, RelationCheck};
use crate::element::{is_unitary, unitarity_residual, MoyalElement, C64};
use crate::error::{Error, Result};
use crate::symplectic::SymplecticStructure;

const I: C64 = C64::new(0.0, 1.0);

#[derive(Debug, Clone, PartialEq)]
pub struct GradedElement {
    pub even: MoyalElement,
    pub odd: MoyalElement,
}

impl GradedElement {
    pub fn new(even: MoyalElement, odd: MoyalElement) -> Result<Self> {
        if even.structure() != odd.structure() {
            return Err(Error::StructureMismatch);
        }
        Ok(Self { even, odd })
    }

    pub fn zero(s: &Arc<SymplecticStructure>) -> Self {
        Self {
            even: MoyalElement::zero(s),
            odd: MoyalElement::zero(s),
        }
    }

    /// (𝕀, 0).
    pub fn unit(s: &Arc<SymplecticStructure>) -> Self {
        Self {
            even: MoyalElement::unit(s),
            odd: MoyalElement::zero(s),
        }
    }

    pub fn from_even(a: MoyalElement) -> Self {
        let odd = MoyalElement::zero(a.structure());
        Self { even: a, odd }
    }

    pub fn from_odd(a: MoyalElement) -> Self {
        let even = MoyalElement::zero(a.structure());
        Self { even, odd: a }
    }

    pub fn structure(&self) -> &Arc<SymplecticStructure> {
        self.even.structure()
    }

    pub fn is_zero(&self) -> bool {
        self.even.is_zero() && self.odd.is_zero()
    }

    /// Some(0) or Some(1) for homogeneous non-zero elements.
    pub fn degree(&self) -> Option<u8> {
        match (self.even.is_zero(), self.odd.is_zero()) {
            (false, true) => Some(0),
            (true, false) => Some(1),
            _ => None,
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        Ok(Self {
            even: self.even.try_add(&other.even)?,
            odd: self.odd.try_add(&other.odd)?,
        })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        Ok(Self {
            even: self.even.try_sub(&other.even)?,
            odd: self.odd.try_sub(&other.odd)?,
        })
    }

    pub fn scale(&self, c: C64) -> Self {
        Self {
            even: self.even.scale(c),
            odd: self.odd.scale(c),
        }
    }

    pub fn scale_re(&self, c: f64) -> Self {
        self.scale(C64::new(c, 0.0))
    }

    /// The graded product.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        Ok(Self {
            even: self.even.star(&other.even)?.try_add(&self.odd.star(&other.odd)?)?,
            odd: self.even.star(&other.odd)?.try_add(&self.odd.star(&other.even)?)?,
        })
    }

    /// [a, b]•.
    pub fn bracket(&self, other: &Self) -> Result<Self> {
        Ok(Self {
            even: self
                .even
                .commutator(&other.even)?
                .try_add(&self.odd.anticommutator(&other.odd)?)?,
            odd: self
                .even
                .commutator(&other.odd)?
                .try_add(&self.odd.commutator(&other.even)?)?,
        })
    }

    /// (a₀†, i·a₁†).
    pub fn involution(&self) -> Self {
        Self {
            even: self.even.involution(),
            odd: self.odd.involution().scale(I),
        }
    }

    pub fn distance(&self, other: &Self) -> Result<f64> {
        Ok(self.even.distance(&other.even)?.max(self.odd.distance(&other.odd)?))
    }

    pub fn rel_distance(&self, other: &Self) -> Result<f64> {
        let scale = self
            .even
            .max_norm()
            .max(self.odd.max_norm())
            .max(other.even.max_norm())
            .max(other.odd.max_norm());
        let d = self.distance(other)?;
        Ok(if scale > 0.0 { d / scale } else { d })
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.rel_distance(other).map(|d| d <= tol).unwrap_or(false)
    }

    /// The centre of 𝔸• is ℂ ⊕ 0.
    pub fn is_central(&self) -> bool {
        self.even.as_scalar().is_some() && self.odd.is_zero()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum GradedGenerator {
    T(usize),
    U(usize),
    /// Symmetric pair, stored with μ ≤ ν.
    M(usize, usize),
    J,
}

impl GradedGenerator {
    pub fn m(mu: usize, nu: usize) -> Self {
        GradedGenerator::M(mu.min(nu), mu.max(nu))
    }

    /// 0 for T and M, 1 for U and J.
    pub fn degree(&self) -> u8 {
        match self {
            GradedGenerator::T(_) | GradedGenerator::M(..) => 0,
            GradedGenerator::U(_) | GradedGenerator::J => 1,
        }
    }

    pub fn name(&self) -> String {
        match self {
            GradedGenerator::T(m) => format!("T{}", m + 1),
            GradedGenerator::U(m) => format!("U{}", m + 1),
            GradedGenerator::M(m, n) => format!("M{}{}", m + 1, n + 1),
            GradedGenerator::J => "J".to_string(),
        }
    }

    pub fn from_name(name: &str, dim: usize) -> Result<Self> {
        if name == "J" {
            return Ok(GradedGenerator::J);
        }
        let bad = || Error::InvalidInput(format!("unknown graded generator '{name}' for D = {dim}"));
        let mut chars = name.chars();
        let head = chars.next().ok_or_else(bad)?;
        let rest: String = chars.collect();
        let one = |txt: &str| -> Result<usize> {
            let v: usize = txt.parse().map_err(|_| bad())?;
            if v == 0 || v > dim {
                Err(bad())
            } else {
                Ok(v - 1)
            }
        };
        match head {
            'T' => Ok(GradedGenerator::T(one(&rest)?)),
            'U' => Ok(GradedGenerator::U(one(&rest)?)),
            'M' if rest.len() == 2 => Ok(GradedGenerator::m(one(&rest[..1])?, one(&rest[1..])?)),
            _ => Err(bad()),
        }
    }
}

/// c·𝕀 plus a combination of graded generators.
#[derive(Debug, Clone, PartialEq)]
pub struct GradedCombination {
    pub central: C64,
    pub terms: Vec<(GradedGenerator, C64)>,
}

impl GradedCombination {
    pub fn coefficient(&self, x: GradedGenerator) -> C64 {
        self.terms
            .iter()
            .find(|(g, _)| *g == x)
            .map(|(_, c)| *c)
            .unwrap_or(C64::new(0.0, 0.0))
    }
}

/// Representatives of T, U, M, J with scales s_J and s_M.
#[derive(Debug, Clone)]
pub struct GradedAlgebra {
    even: DerivationAlgebra,
    s_j: f64,
}

impl GradedAlgebra {
    pub fn unscaled(s: &Arc<SymplecticStructure>) -> Self {
        Self::with_scales(s, 1.0, 1.0)
    }

    /// s_J = 1/(mθ), s_M = μθ.
    pub fn rescaled(s: &Arc<SymplecticStructure>, m: f64, mu: f64) -> Self {
        Self::with_scales(s, 1.0 / (m * s.theta()), mu * s.theta())
    }

    pub fn with_scales(s: &Arc<SymplecticStructure>, s_j: f64, s_m: f64) -> Self {
        Self {
            even: DerivationAlgebra::with_sym_scale(s, s_m),
            s_j,
        }
    }

    pub fn structure(&self) -> &Arc<SymplecticStructure> {
        self.even.structure()
    }

    pub fn s_j(&self) -> f64 {
        self.s_j
    }

    pub fn s_m(&self) -> f64 {
        self.even.sym_scale()
    }

    /// T_μ, U_μ, M_{μν} (μ ≤ ν), J.
    pub fn basis(&self) -> Vec<GradedGenerator> {
        let d = self.structure().dim();
        let mut out: Vec<GradedGenerator> = (0..d).map(GradedGenerator::T).collect();
        out.extend((0..d).map(GradedGenerator::U));
        for m in 0..d {
            for n in m..d {
                out.push(GradedGenerator::M(m, n));
            }
        }
        out.push(GradedGenerator::J);
        out
    }

    fn check(&self, x: &GradedGenerator) -> Result<()> {
        let s = self.structure();
        match x {
            GradedGenerator::T(m) | GradedGenerator::U(m) => s.check_index(*m),
            GradedGenerator::M(m, n) => {
                s.check_index(*m)?;
                s.check_index(*n)
            }
            GradedGenerator::J => Ok(()),
        }
    }

    /// η(Ad_X), the representative of X.
    pub fn eta(&self, x: &GradedGenerator) -> Result<GradedElement> {
        self.check(x)?;
        let s = self.structure();
        Ok(match x {
            GradedGenerator::T(m) => GradedElement::from_even(self.even.eta(&Generator::Partial(*m))?),
            GradedGenerator::U(m) => GradedElement::from_odd(self.even.eta(&Generator::Partial(*m))?),
            GradedGenerator::M(m, n) => GradedElement::from_even(self.even.eta(&Generator::Sym(*m, *n))?),
            GradedGenerator::J => GradedElement::from_odd(MoyalElement::constant(s, C64::new(0.0, self.s_j))),
        })
    }

    /// Ad_X(a) = [η(X), a]•.
    pub fn apply(&self, x: &GradedGenerator, a: &GradedElement) -> Result<GradedElement> {
        self.eta(x)?.bracket(a)
    }

    /// Projects an element with even degree ≤ 2 and odd degree ≤ 1 onto
    /// {𝕀, T, U, M, J}.
    pub fn decompose(&self, a: &GradedElement) -> Result<GradedCombination> {
        if !a.odd.is_polynomial() {
            return Err(Error::NotPolynomial);
        }
        if a.odd.degree() > 1 {
            return Err(Error::DegreeTooHigh(a.odd.degree()));
        }
        let ev = self.even.decompose(&a.even)?;
        let od = self.even.decompose(&a.odd)?;
        let mut terms = Vec::new();
        let mut push = |g: GradedGenerator, c: C64| {
            if c.norm() > 0.0 {
                terms.push((g, c));
            }
        };
        for (x, c) in ev.derivation_terms() {
            match x {
                Generator::Partial(m) => push(GradedGenerator::T(m), c),
                Generator::Sym(m, n) => push(GradedGenerator::M(m, n), c),
                Generator::Inner(_) => unreachable!("decompose yields basis generators"),
            }
        }
        for (m, c) in od.partials.iter().enumerate() {
            push(GradedGenerator::U(m), *c);
        }
        push(GradedGenerator::J, od.central / (I * self.s_j));
        terms.sort_by(|a, b| a.0.cmp(&b.0));
        Ok(GradedCombination {
            central: ev.central,
            terms,
        })
    }

    /// Σ c_X η(X), optionally with the central part.
    pub fn recompose(&self, comb: &GradedCombination, with_central: bool) -> Result<GradedElement> {
        let s = self.structure();
        let mut out = if with_central {
            GradedElement::from_even(MoyalElement::constant(s, comb.central))
        } else {
            GradedElement::zero(s)
        };
        for (x, c) in &comb.terms {
            out = out.try_add(&self.eta(x)?.scale(*c))?;
        }
        Ok(out)
    }

    /// Decomposition of [η(X), η(Y)]•.
    pub fn bracket_generators(&self, x: &GradedGenerator, y: &GradedGenerator) -> Result<GradedCombination> {
        self.decompose(&self.eta(x)?.bracket(&self.eta(y)?)?)
    }

    /// η([X,Y]•) - [η(X), η(Y)]•, which must be central.
    pub fn canonical_curvature(&self, x: &GradedGenerator, y: &GradedGenerator) -> Result<GradedElement> {
        let br = self.eta(x)?.bracket(&self.eta(y)?)?;
        let comb = self.decompose(&br)?;
        self.recompose(&comb, false)?.try_sub(&br)
    }
}

/// Max residual of each of the ten commutator families, unscaled algebra.
pub fn verify_graded_table(s: &Arc<SymplecticStructure>) -> Result<Vec<RelationCheck>> {
    use GradedGenerator::*;
    let alg = GradedAlgebra::unscaled(s);
    let d = s.dim();
    let e = |x: GradedGenerator| alg.eta(&x);
    let ti = |a: usize, b: usize| s.theta_inv(a, b);
    let unit = GradedElement::unit(s);
    let zero = GradedElement::zero(s);
    let mut families: Vec<(&str, f64)> = Vec::new();
    let mut worst = |name: &'static str, lhs: GradedElement, rhs: GradedElement| -> Result<()> {
        let r = lhs.rel_distance(&rhs)?;
        match families.iter_mut().find(|(n, _)| *n == name) {
            Some(entry) => entry.1 = entry.1.max(r),
            None => families.push((name, r)),
        }
        Ok(())
    };
    for m in 0..d {
        for n in 0..d {
            worst(
                "[T_mu, T_nu] = i ThetaInv_mu_nu I",
                e(T(m))?.bracket(&e(T(n))?)?,
                unit.scale(C64::new(0.0, ti(m, n))),
            )?;
            worst(
                "[U_mu, U_nu] = 2i M_mu_nu",
                e(U(m))?.bracket(&e(U(n))?)?,
                e(GradedGenerator::m(m, n))?.scale(C64::new(0.0, 2.0)),
            )?;
            worst(
                "[T_mu, U_nu] = ThetaInv_mu_nu J",
                e(T(m))?.bracket(&e(U(n))?)?,
                e(J)?.scale_re(ti(m, n)),
            )?;
            for r in 0..d {
                let mm = GradedGenerator::m(m, n);
                worst(
                    "[M_mu_nu, T_rho] = ThetaInv_nu_rho T_mu + ThetaInv_mu_rho T_nu",
                    e(mm)?.bracket(&e(T(r))?)?,
                    e(T(m))?.scale_re(ti(n, r)).try_add(&e(T(n))?.scale_re(ti(m, r)))?,
                )?;
                worst(
                    "[M_mu_nu, U_rho] = ThetaInv_nu_rho U_mu + ThetaInv_mu_rho U_nu",
                    e(mm)?.bracket(&e(U(r))?)?,
                    e(U(m))?.scale_re(ti(n, r)).try_add(&e(U(n))?.scale_re(ti(m, r)))?,
                )?;
                for g in 0..d {
                    let rhs = e(GradedGenerator::m(m, r))?
                        .scale_re(ti(n, g))
                        .try_add(&e(GradedGenerator::m(m, g))?.scale_re(ti(n, r)))?
                        .try_add(&e(GradedGenerator::m(n, r))?.scale_re(ti(m, g)))?
                        .try_add(&e(GradedGenerator::m(n, g))?.scale_re(ti(m, r)))?;
                    worst(
                        "[M_mu_nu, M_rho_sigma] = ThetaInv_nu_sigma M_mu_rho + ThetaInv_nu_rho M_mu_sigma + ThetaInv_mu_sigma M_nu_rho + ThetaInv_mu_rho M_nu_sigma",
                        e(mm)?.bracket(&e(GradedGenerator::m(r, g))?)?,
                        rhs,
                    )?;
                }
            }
            worst(
                "[M_mu_nu, J] = 0",
                e(GradedGenerator::m(m, n))?.bracket(&e(J)?)?,
                zero.clone(),
            )?;
        }
        worst("[T_mu, J] = 0", e(T(m))?.bracket(&e(J)?)?, zero.clone())?;
        worst(
            "[U_mu, J] = 2i T_mu",
            e(U(m))?.bracket(&e(J)?)?,
            e(T(m))?.scale(C64::new(0.0, 2.0)),
        )?;
    }
    worst("[J, J] = -2 I", e(J)?.bracket(&e(J)?)?, unit.scale_re(-2.0))?;
    Ok(families
        .into_iter()
        .map(|(name, residual)| RelationCheck {
            name: name.to_string(),
            residual,
        })
        .collect())
}

/// A⁰_μ, A¹_μ, G⁰_{μν}, φ with A(Ad_T) = (A⁰,0), A(Ad_U) = (0,A¹),
/// A(Ad_M) = (G⁰,0), A(Ad_J) = (0,φ).
#[derive(Debug, Clone)]
pub struct GradedConnectionForm {
    alg: GradedAlgebra,
    alpha: f64,
    pub a0: Vec<MoyalElement>,
    pub a1: Vec<MoyalElement>,
    /// Keyed by (μ, ν) with μ ≤ ν.
    pub g0: BTreeMap<(usize, usize), MoyalElement>,
    pub phi: MoyalElement,
}

impl GradedConnectionForm {
    pub fn zero(alg: &GradedAlgebra, alpha: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(Error::InvalidInput(format!("alpha must be positive, got {alpha}")));
        }
        let s = alg.structure();
        let d = s.dim();
        let z = MoyalElement::zero(s);
        let mut g0 = BTreeMap::new();
        for m in 0..d {
            for n in m..d {
                g0.insert((m, n), z.clone());
            }
        }
        Ok(Self {
            alg: alg.clone(),
            alpha,
            a0: vec![z.clone(); d],
            a1: vec![z.clone(); d],
            g0,
            phi: z,
        })
    }

    pub fn algebra(&self) -> &GradedAlgebra {
        &self.alg
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    fn structure(&self) -> &Arc<SymplecticStructure> {
        self.alg.structure()
    }

    pub fn g0_component(&self, mu: usize, nu: usize) -> &MoyalElement {
        &self.g0[&(mu.min(nu), mu.max(nu))]
    }

    pub fn set_g0(&mut self, mu: usize, nu: usize, value: MoyalElement) {
        self.g0.insert((mu.min(nu), mu.max(nu)), value);
    }

    fn check_structures(&self) -> Result<()> {
        let s = self.structure();
        let all = self
            .a0
            .iter()
            .chain(&self.a1)
            .chain(self.g0.values())
            .chain(std::iter::once(&self.phi));
        for e in all {
            if e.structure() != s {
                return Err(Error::StructureMismatch);
            }
        }
        if self.a0.len() != s.dim() || self.a1.len() != s.dim() {
            return Err(Error::LengthMismatch { got: self.a0.len().min(self.a1.len()), dim: s.dim() });
        }
        Ok(())
    }

    /// A(Ad_X).
    pub fn component(&self, x: &GradedGenerator) -> Result<GradedElement> {
        self.alg.check(x)?;
        Ok(match x {
            GradedGenerator::T(m) => GradedElement::from_even(self.a0[*m].clone()),
            GradedGenerator::U(m) => GradedElement::from_odd(self.a1[*m].clone()),
            GradedGenerator::M(m, n) => GradedElement::from_even(self.g0_component(*m, *n).clone()),
            GradedGenerator::J => GradedElement::from_odd(self.phi.clone()),
        })
    }

    /// 𝒜⁰_μ = A⁰_μ - ξ_μ.
    pub fn cal_a0(&self, mu: usize) -> Result<MoyalElement> {
        self.a0[mu].try_sub(&MoyalElement::xi(self.structure(), mu)?)
    }

    /// 𝒜¹_μ = A¹_μ - ξ_μ.
    pub fn cal_a1(&self, mu: usize) -> Result<MoyalElement> {
        self.a1[mu].try_sub(&MoyalElement::xi(self.structure(), mu)?)
    }

    /// 𝒢⁰_{μν} = G⁰_{μν} - s_M ξ_μξ_ν.
    pub fn cal_g0(&self, mu: usize, nu: usize) -> Result<MoyalElement> {
        let s = self.structure();
        let xx = MoyalElement::xi(s, mu)?.pointwise(&MoyalElement::xi(s, nu)?)?;
        self.g0_component(mu, nu).try_sub(&xx.scale_re(self.alg.s_m()))
    }

    /// Φ = φ - s_J.
    pub fn big_phi(&self) -> Result<MoyalElement> {
        self.phi
            .try_sub(&MoyalElement::constant(self.structure(), C64::new(self.alg.s_j(), 0.0)))
    }

    /// 𝒜(Ad_X) = η(Ad_X) - iA(Ad_X).
    pub fn covariant_coordinate(&self, x: &GradedGenerator) -> Result<GradedElement> {
        self.alg.eta(x)?.try_sub(&self.component(x)?.scale(I))
    }

    /// F(X,Y) = [𝒜(X),𝒜(Y)]• - 𝒜([X,Y]•) + η([X,Y]•) - [η(X),η(Y)]•.
    pub fn curvature_entry_generic(&self, x: &GradedGenerator, y: &GradedGenerator) -> Result<GradedElement> {
        let br = self.alg.eta(x)?.bracket(&self.alg.eta(y)?)?;
        let comb = self.alg.decompose(&br)?;
        let mut cal_of_bracket = GradedElement::zero(self.structure());
        for (z, c) in &comb.terms {
            cal_of_bracket = cal_of_bracket.try_add(&self.covariant_coordinate(z)?.scale(*c))?;
        }
        self.covariant_coordinate(x)?
            .bracket(&self.covariant_coordinate(y)?)?
            .try_sub(&cal_of_bracket)?
            .try_add(&self.alg.recompose(&comb, false)?.try_sub(&br)?)
    }

    pub fn curvature_generic(&self) -> Result<GradedCurvatureTable> {
        self.check_structures()?;
        let gens = self.alg.basis();
        let mut entries = BTreeMap::new();
        for i in 0..gens.len() {
            for j in i..gens.len() {
                entries.insert((i, j), self.curvature_entry_generic(&gens[i], &gens[j])?);
            }
        }
        Ok(GradedCurvatureTable { generators: gens, entries })
    }

    /// Closed-form components, one family at a time.
    pub fn curvature(&self) -> Result<GradedCurvatureTable> {
        self.check_structures()?;
        let gens = self.alg.basis();
        let mut entries = BTreeMap::new();
        for i in 0..gens.len() {
            for j in i..gens.len() {
                entries.insert((i, j), self.closed_form(&gens[i], &gens[j])?);
            }
        }
        Ok(GradedCurvatureTable { generators: gens, entries })
    }

    fn closed_form(&self, x: &GradedGenerator, y: &GradedGenerator) -> Result<GradedElement> {
        use GradedGenerator::*;
        let s = Arc::clone(self.structure());
        let ti = |a: usize, b: usize| s.theta_inv(a, b);
        let s_j = self.alg.s_j();
        let s_m = self.alg.s_m();
        let even = GradedElement::from_even;
        let odd = GradedElement::from_odd;
        Ok(match (*x, *y) {
            (T(m), T(n)) => even(
                self.cal_a0(m)?
                    .commutator(&self.cal_a0(n)?)?
                    .scale_re(-1.0)
                    .try_sub(&MoyalElement::constant(&s, C64::new(0.0, ti(m, n))))?,
            ),
            (U(m), U(n)) => even(
                self.cal_a1(m)?
                    .anticommutator(&self.cal_a1(n)?)?
                    .scale_re(-1.0)
                    .try_sub(&self.cal_g0(m, n)?.scale_re(2.0 / s_m))?,
            ),
            (J, J) => {
                let p = self.big_phi()?;
                even(
                    p.star(&p)?
                        .scale_re(-2.0)
                        .try_add(&MoyalElement::constant(&s, C64::new(2.0 * s_j * s_j, 0.0)))?,
                )
            }
            (T(m), J) => odd(self.cal_a0(m)?.commutator(&self.big_phi()?)?.scale_re(-1.0)),
            (U(m), J) => even(
                self.cal_a1(m)?
                    .anticommutator(&self.big_phi()?)?
                    .scale_re(-1.0)
                    .try_sub(&self.cal_a0(m)?.scale_re(2.0 * s_j))?,
            ),
            (M(m, n), J) => odd(self.cal_g0(m, n)?.commutator(&self.big_phi()?)?.scale_re(-1.0)),
            (T(m), U(n)) => odd(
                self.cal_a0(m)?
                    .commutator(&self.cal_a1(n)?)?
                    .scale_re(-1.0)
                    .try_add(&self.big_phi()?.scale(C64::new(0.0, ti(m, n) / s_j)))?,
            ),
            // F(T, M) = -F(M, T): both generators are even.
            (T(r), M(m, n)) => {
                let fm = self
                    .cal_g0(m, n)?
                    .commutator(&self.cal_a0(r)?)?
                    .scale_re(-1.0)
                    .try_add(
                        &self
                            .cal_a0(m)?
                            .scale_re(ti(n, r))
                            .try_add(&self.cal_a0(n)?.scale_re(ti(m, r)))?
                            .scale(C64::new(0.0, s_m)),
                    )?;
                even(fm.scale_re(-1.0))
            }
            // F(U, M) = -F(M, U) since M is even.
            (U(r), M(m, n)) => {
                let fm = self
                    .cal_g0(m, n)?
                    .commutator(&self.cal_a1(r)?)?
                    .scale_re(-1.0)
                    .try_add(
                        &self
                            .cal_a1(m)?
                            .scale_re(ti(n, r))
                            .try_add(&self.cal_a1(n)?.scale_re(ti(m, r)))?
                            .scale(C64::new(0.0, s_m)),
                    )?;
                odd(fm.scale_re(-1.0))
            }
            (M(m, n), M(r, g)) => {
                let sum = self
                    .cal_g0(m, r)?
                    .scale_re(ti(n, g))
                    .try_add(&self.cal_g0(m, g)?.scale_re(ti(n, r)))?
                    .try_add(&self.cal_g0(n, r)?.scale_re(ti(m, g)))?
                    .try_add(&self.cal_g0(n, g)?.scale_re(ti(m, r)))?;
                even(
                    self.cal_g0(m, n)?
                        .commutator(&self.cal_g0(r, g)?)?
                        .scale_re(-1.0)
                        .try_add(&sum.scale(C64::new(0.0, s_m)))?,
                )
            }
            _ => {
                return Err(Error::InvalidInput(format!(
                    "pair ({}, {}) is not in storage order",
                    x.name(),
                    y.name()
                )))
            }
        })
    }

    /// A^g(X) = g†A(X)g + i g†[η(X), g]• for g = (g₀, 0), g₀ unitary.
    pub fn gauge_transform(&self, g: &GradedElement) -> Result<Self> {
        if !g.odd.is_zero() {
            return Err(Error::InvalidInput("graded gauge elements must have zero odd part".into()));
        }
        if !is_unitary(&g.even, 1e-10) {
            return Err(Error::NotUnitary(unitarity_residual(&g.even)));
        }
        let gd = g.involution();
        let mut out = self.clone();
        for x in self.alg.basis() {
            let hom = gd.mul(&self.component(&x)?)?.mul(g)?;
            let inh = gd.mul(&self.alg.apply(&x, g)?)?.scale(I);
            let a = hom.try_add(&inh)?;
            match x {
                GradedGenerator::T(m) => out.a0[m] = a.even,
                GradedGenerator::U(m) => out.a1[m] = a.odd,
                GradedGenerator::M(m, n) => out.set_g0(m, n, a.even),
                GradedGenerator::J => out.phi = a.odd,
            }
        }
        Ok(out)
    }

    /// The restricted action density with A⁰ = A¹ = A and 𝒢⁰ = 0, each
    /// square a star-square and every index summed over its full range.
    pub fn action_density(&self, tol: f64) -> Result<GradedActionDensity> {
        self.check_structures()?;
        let s = Arc::clone(self.structure());
        let d = s.dim();
        for m in 0..d {
            if self.a0[m].distance(&self.a1[m])? > tol {
                return Err(Error::InvalidInput("restriction A0 = A1 violated".into()));
            }
            for n in m..d {
                if self.cal_g0(m, n)?.max_norm() > tol {
                    return Err(Error::InvalidInput("restriction G0 = s_M xi xi violated".into()));
                }
            }
        }
        let sq = |e: &MoyalElement| e.star(e);
        let a = &self.a0;
        let xi: Vec<MoyalElement> = (0..d).map(|m| MoyalElement::xi(&s, m)).collect::<Result<_>>()?;
        let phi = &self.phi;

        let mut field_strength = vec![MoyalElement::zero(&s); d * d];
        for m in 0..d {
            for n in 0..d {
                // F_{μν} = ∂_μA_ν - ∂_νA_μ - i[A_μ, A_ν]⋆
                field_strength[m * d + n] = a[n]
                    .partial(m)?
                    .try_sub(&a[m].partial(n)?)?
                    .try_sub(&a[m].commutator(&a[n])?.scale(I))?;
            }
        }
        let zero = MoyalElement::zero(&s);
        let (mut ym, mut anti, mut slavnov, mut kinetic, mut mixing) =
            (zero.clone(), zero.clone(), zero.clone(), zero.clone(), zero.clone());
        for m in 0..d {
            let cal_m = a[m].try_sub(&xi[m])?;
            for n in 0..d {
                let f = &field_strength[m * d + n];
                ym = ym.try_add(&sq(f)?)?;
                let cal_n = a[n].try_sub(&xi[n])?;
                anti = anti.try_add(&sq(&cal_m.anticommutator(&cal_n)?)?)?;
                let sl = phi.scale_re(s.theta_inv(m, n)).try_sub(f)?;
                slavnov = slavnov.try_add(&sq(&sl)?)?;
            }
            let kin = phi.partial(m)?.try_sub(&a[m].commutator(phi)?.scale(I))?;
            kinetic = kinetic.try_add(&sq(&kin)?)?;
            let mix = a[m]
                .anticommutator(phi)?
                .try_sub(&xi[m].pointwise(phi)?.scale_re(2.0))?;
            mixing = mixing.try_add(&sq(&mix)?)?;
        }
        let mt = 1.0 / self.alg.s_j();
        let phi2 = phi.star(phi)?;
        let phi3 = phi2.star(phi)?;
        let phi4 = phi3.star(phi)?;
        let potential = phi4
            .scale_re(4.0)
            .try_sub(&phi3.scale_re(8.0 / mt))?
            .try_add(&phi2.scale_re(16.0 / (mt * mt)))?;

        let pref = 1.0 / (self.alpha * self.alpha);
        let pieces = [ym, anti, slavnov, kinetic, mixing, potential].map(|p| p.scale_re(pref));
        let mut total = zero;
        for p in &pieces {
            total = total.try_add(p)?;
        }
        let [yang_mills, anticommutator, slavnov, kinetic, mixing, potential] = pieces;
        Ok(GradedActionDensity {
            yang_mills,
            anticommutator,
            slavnov,
            kinetic,
            mixing,
            potential,
            total,
        })
    }
}

/// F(X_i, X_j) for i ≤ j in basis order.
#[derive(Debug, Clone)]
pub struct GradedCurvatureTable {
    generators: Vec<GradedGenerator>,
    entries: BTreeMap<(usize, usize), GradedElement>,
}

impl GradedCurvatureTable {
    pub fn generators(&self) -> &[GradedGenerator] {
        &self.generators
    }

    /// F(X, Y), using F(Y, X) = -(-1)^{|X||Y|} F(X, Y) for the unstored order.
    pub fn get(&self, x: &GradedGenerator, y: &GradedGenerator) -> Result<GradedElement> {
        let pos = |g: &GradedGenerator| {
            self.generators
                .iter()
                .position(|h| h == g)
                .ok_or_else(|| Error::InvalidInput(format!("{} is not in the table", g.name())))
        };
        let (i, j) = (pos(x)?, pos(y)?);
        if i <= j {
            Ok(self.entries[&(i, j)].clone())
        } else {
            let sign = if x.degree() * y.degree() == 1 { 1.0 } else { -1.0 };
            Ok(self.entries[&(j, i)].scale_re(sign))
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&GradedGenerator, &GradedGenerator, &GradedElement)> {
        self.entries
            .iter()
            .map(move |(&(i, j), f)| (&self.generators[i], &self.generators[j], f))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn max_distance(&self, other: &Self) -> Result<f64> {
        if self.generators != other.generators {
            return Err(Error::InvalidInput("tables over different generators".into()));
        }
        let mut worst: f64 = 0.0;
        for (k, f) in &self.entries {
            worst = worst.max(f.distance(&other.entries[k])?);
        }
        Ok(worst)
    }

    /// Entrywise g†Fg with the graded product.
    pub fn conjugate(&self, g: &GradedElement) -> Result<Self> {
        let gd = g.involution();
        let mut entries = BTreeMap::new();
        for (k, f) in &self.entries {
            entries.insert(*k, gd.mul(f)?.mul(g)?);
        }
        Ok(Self {
            generators: self.generators.clone(),
            entries,
        })
    }
}

/// The six pieces of the restricted graded action density and their sum.
#[derive(Debug, Clone)]
pub struct GradedActionDensity {
    /// F_{μν}⋆F_{μν}.
    pub yang_mills: MoyalElement,
    /// {𝒜_μ,𝒜_ν}⋆² with 𝒜_μ = A_μ - ξ_μ.
    pub anticommutator: MoyalElement,
    /// (Θ⁻¹_{μν}φ - F_{μν})⋆².
    pub slavnov: MoyalElement,
    /// (∂_μφ - i[A_μ,φ]⋆)⋆².
    pub kinetic: MoyalElement,
    /// ({A_μ,φ}⋆ - 2ξ_μφ)⋆².
    pub mixing: MoyalElement,
    /// 4φ⁴ - (8/(mθ))φ³ + (16/(m²θ²))φ², star powers.
    pub potential: MoyalElement,
    pub total: MoyalElement,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_expression;

    fn s(d: usize) -> Arc<SymplecticStructure> {
        Arc::new(SymplecticStructure::new(d, 1.0).unwrap())
    }

    #[test]
    fn listed_brackets() {
        let s = s(2);
        let alg = GradedAlgebra::unscaled(&s);
        let jj = alg.eta(&GradedGenerator::J).unwrap().bracket(&alg.eta(&GradedGenerator::J).unwrap()).unwrap();
        assert_eq!(jj, GradedElement::unit(&s).scale_re(-2.0));
        let c = alg.bracket_generators(&GradedGenerator::U(0), &GradedGenerator::U(1)).unwrap();
        assert_eq!(c.terms, vec![(GradedGenerator::M(0, 1), C64::new(0.0, 2.0))]);
        let c = alg.bracket_generators(&GradedGenerator::T(0), &GradedGenerator::U(1)).unwrap();
        assert_eq!(c.terms.len(), 1);
        assert!((c.coefficient(GradedGenerator::J) - C64::new(s.theta_inv(0, 1), 0.0)).norm() < 1e-15);
    }

    #[test]
    fn ten_families_in_two_and_four_dimensions() {
        for d in [2, 4] {
            let checks = verify_graded_table(&s(d)).unwrap();
            assert_eq!(checks.len(), 10);
            for c in checks {
                assert!(c.residual <= 1e-12, "{}: {}", c.name, c.residual);
            }
        }
    }

    #[test]
    fn eta_values() {
        let s = s(2);
        let alg = GradedAlgebra::rescaled(&s, 2.0, 1.0);
        let j = alg.eta(&GradedGenerator::J).unwrap();
        assert!(j.even.is_zero());
        assert_eq!(j.odd.as_scalar(), Some(C64::new(0.0, 0.5)));
        assert!(alg.eta(&GradedGenerator::T(2)).is_err());
        let u = alg.eta(&GradedGenerator::U(0)).unwrap();
        assert_eq!(u.degree(), Some(1));
    }

    #[test]
    fn product_and_involution() {
        let s = s(2);
        let a = GradedElement::new(parse_expression("x1", &s).unwrap(), parse_expression("1i x2", &s).unwrap()).unwrap();
        let unit = GradedElement::unit(&s);
        assert_eq!(a.mul(&unit).unwrap(), a);
        assert_eq!(unit.mul(&a).unwrap(), a);
        let ad = a.involution();
        assert_eq!(ad.odd, parse_expression("x2", &s).unwrap());
    }

    #[test]
    fn centre_witness() {
        let s = s(2);
        let alg = GradedAlgebra::unscaled(&s);
        let j = alg.eta(&GradedGenerator::J).unwrap();
        let c = GradedElement::from_even(MoyalElement::constant(&s, C64::new(3.0, 1.0)));
        assert!(c.bracket(&j).unwrap().is_zero());
        let odd_unit = GradedElement::from_odd(MoyalElement::unit(&s));
        assert!(!odd_unit.bracket(&j).unwrap().is_zero());
    }

    #[test]
    fn zero_connection_curvature() {
        let s = s(2);
        let alg = GradedAlgebra::rescaled(&s, 1.5, 0.7);
        let a = GradedConnectionForm::zero(&alg, 1.0).unwrap();
        let f = a.curvature().unwrap();
        let fg = a.curvature_generic().unwrap();
        assert!(f.max_distance(&fg).unwrap() < 1e-12);
        // F(J,J) = -2φ⋆φ + 4 s_J φ vanishes at φ = 0.
        assert!(f.get(&GradedGenerator::J, &GradedGenerator::J).unwrap().is_zero());
    }

    #[test]
    fn canonical_curvature_is_central() {
        let s = s(2);
        let alg = GradedAlgebra::rescaled(&s, 1.5, 0.7);
        for x in alg.basis() {
            for y in alg.basis() {
                assert!(alg.canonical_curvature(&x, &y).unwrap().is_central());
            }
        }
    }

    #[test]
    fn generator_names() {
        for n in ["T1", "U2", "M12", "J"] {
            assert_eq!(GradedGenerator::from_name(n, 2).unwrap().name(), n);
        }
        assert!(GradedGenerator::from_name("T3", 2).is_err());
        assert!(GradedGenerator::from_name("K1", 2).is_err());
    }

    #[test]
    fn constant_phi_potential() {
        let s = s(2);
        let (m, c) = (2.0, 0.6);
        let alg = GradedAlgebra::rescaled(&s, m, 1.0);
        let mut a = GradedConnectionForm::zero(&alg, 1.0).unwrap();
        for mu in 0..2 {
            for nu in mu..2 {
                let xx = MoyalElement::xi(&s, mu).unwrap().pointwise(&MoyalElement::xi(&s, nu).unwrap()).unwrap();
                a.set_g0(mu, nu, xx.scale_re(alg.s_m()));
            }
        }
        a.phi = MoyalElement::constant(&s, C64::new(c, 0.0));
        let dens = a.action_density(1e-12).unwrap();
        let want = 4.0 * c.powi(4) - 8.0 / m * c.powi(3) + 16.0 / (m * m) * c * c;
        assert!((dens.potential.as_scalar().unwrap() - C64::new(want, 0.0)).norm() < 1e-14);
        assert!(dens.yang_mills.is_zero());
        let zero_g0 = GradedConnectionForm::zero(&alg, 1.0).unwrap();
        assert!(zero_g0.action_density(1e-12).is_err());
    }
}
