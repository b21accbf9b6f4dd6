//! Connections on the Moyal algebra viewed as a module over itself.
//!
//! Components are stored in the rescaled convention: the connection acts as
//! ∇_X(a) = X(a) - iA(X)⋆a and the covariant coordinate is
//! 𝒜(X) = η(X) - iA(X), so that 𝒜(X)⋆a = ∇_X(a) - ∇^inv_X(a). On G2 the Sym
//! sector carries η(X_(μν)) = μθ·iξ_μξ_ν.
//!
//! Gauge transformations act as a ↦ g†⋆a⋆g on every tensorial quantity.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::derivations::{DerivationAlgebra, Generator, GeneratorCombination};
use crate::element::{is_unitary, unitarity_residual, MoyalElement, C64};
use crate::error::{Error, Result};
use crate::symplectic::SymplecticStructure;

const UNITARY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Basis {
    G1,
    G2,
}

/// Generator components A(X) together with the scales μ and α.
#[derive(Debug, Clone)]
pub struct ConnectionForm {
    alg: DerivationAlgebra,
    basis: Basis,
    mu: f64,
    alpha: f64,
    partial: Vec<MoyalElement>,
    sym: BTreeMap<(usize, usize), MoyalElement>,
}

impl ConnectionForm {
    /// The zero form, A(X) = 0 for every basis generator.
    pub fn zero(s: &Arc<SymplecticStructure>, basis: Basis, mu: f64, alpha: f64) -> Result<Self> {
        for (name, v) in [("mu", mu), ("alpha", alpha)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidInput(format!("{name} must be positive, got {v}")));
            }
        }
        let d = s.dim();
        let zero = MoyalElement::zero(s);
        let mut sym = BTreeMap::new();
        if basis == Basis::G2 {
            for a in 0..d {
                for b in a..d {
                    sym.insert((a, b), zero.clone());
                }
            }
        }
        Ok(Self {
            alg: DerivationAlgebra::with_sym_scale(s, mu * s.theta()),
            basis,
            mu,
            alpha,
            partial: vec![zero; d],
            sym,
        })
    }

    pub fn structure(&self) -> &Arc<SymplecticStructure> {
        self.alg.structure()
    }

    pub fn algebra(&self) -> &DerivationAlgebra {
        &self.alg
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    /// Generators in storage order: ∂_μ, then X_(μν) with μ ≤ ν.
    pub fn generators(&self) -> Vec<Generator> {
        match self.basis {
            Basis::G1 => self.alg.g1_basis(),
            Basis::G2 => self.alg.g2_basis(),
        }
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// μθ, the scale of the Sym sector.
    pub fn sym_scale(&self) -> f64 {
        self.alg.sym_scale()
    }

    fn slot(&self, x: &Generator) -> Result<&MoyalElement> {
        match x {
            Generator::Partial(m) => self
                .partial
                .get(*m)
                .ok_or(Error::IndexOutOfRange { index: *m, dim: self.partial.len() }),
            Generator::Sym(a, b) => self
                .sym
                .get(&(*a.min(b), *a.max(b)))
                .ok_or_else(|| Error::InvalidInput(format!("{} is not in the basis", x.name()))),
            Generator::Inner(_) => Err(Error::InvalidInput("inner generators carry no component".into())),
        }
    }

    pub fn component(&self, x: &Generator) -> Result<&MoyalElement> {
        self.slot(x)
    }

    pub fn set_component(&mut self, x: &Generator, value: MoyalElement) -> Result<()> {
        if value.structure() != self.structure() {
            return Err(Error::StructureMismatch);
        }
        self.slot(x)?;
        match x {
            Generator::Partial(m) => self.partial[*m] = value,
            Generator::Sym(a, b) => {
                self.sym.insert((*a.min(b), *a.max(b)), value);
            }
            Generator::Inner(_) => unreachable!("rejected by slot"),
        }
        Ok(())
    }

    pub fn with_component(mut self, x: &Generator, value: MoyalElement) -> Result<Self> {
        self.set_component(x, value)?;
        Ok(self)
    }

    /// A(X)† = A(X) for every generator.
    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.partial
            .iter()
            .chain(self.sym.values())
            .all(|a| a.involution().distance(a).map(|d| d <= tol).unwrap_or(false))
    }

    /// 𝒜(X) = η(X) - iA(X).
    pub fn covariant_coordinate(&self, x: &Generator) -> Result<MoyalElement> {
        let a = self.slot(x)?;
        self.alg.eta(x)?.try_sub(&a.scale(C64::new(0.0, 1.0)))
    }

    pub fn covariant_coordinates(&self) -> Result<Vec<(Generator, MoyalElement)>> {
        self.generators()
            .into_iter()
            .map(|x| {
                let c = self.covariant_coordinate(&x)?;
                Ok((x, c))
            })
            .collect()
    }

    /// ∇_X(a) = X(a) - iA(X)⋆a.
    pub fn covariant_apply(&self, x: &Generator, a: &MoyalElement) -> Result<MoyalElement> {
        let comp = self.slot(x)?;
        self.alg
            .apply(x, a)?
            .try_sub(&comp.star(a)?.scale(C64::new(0.0, 1.0)))
    }

    /// D^A_μ𝒜_(ρσ) = ∂_μ𝒜_(ρσ) - i[A_μ, 𝒜_(ρσ)]⋆.
    pub fn covariant_derivative(&self, mu: usize, rho: usize, sigma: usize) -> Result<MoyalElement> {
        if self.basis != Basis::G2 {
            return Err(Error::InvalidInput("covariant derivative needs the G2 basis".into()));
        }
        let s = self.structure();
        s.check_index(mu)?;
        let target = self.covariant_coordinate(&Generator::sym(rho, sigma))?;
        let a_mu = &self.partial[mu];
        target
            .partial(mu)?
            .try_sub(&a_mu.commutator(&target)?.scale(C64::new(0.0, 1.0)))
    }

    fn combination_coordinate(&self, comb: &GeneratorCombination) -> Result<MoyalElement> {
        let mut out = MoyalElement::zero(self.structure());
        for (x, c) in comb.derivation_terms() {
            out = out.try_add(&self.covariant_coordinate(&x)?.scale(c))?;
        }
        Ok(out)
    }

    /// Closed forms for F_{μν}, F_{μ(ρσ)} and F_{(μν)(ρσ)}.
    pub fn curvature(&self) -> Result<CurvatureTable> {
        let s = Arc::clone(self.structure());
        let sc = self.sym_scale();
        let gens = self.generators();
        let mut entries = BTreeMap::new();
        for i in 0..gens.len() {
            for j in i + 1..gens.len() {
                let lhs = self
                    .covariant_coordinate(&gens[i])?
                    .commutator(&self.covariant_coordinate(&gens[j])?)?;
                let cc = |x: Generator| self.covariant_coordinate(&x);
                let f = match (&gens[i], &gens[j]) {
                    (Generator::Partial(m), Generator::Partial(n)) => {
                        lhs.try_sub(&MoyalElement::constant(&s, C64::new(0.0, s.theta_inv(*m, *n))))?
                    }
                    (Generator::Partial(m), Generator::Sym(r, g)) => {
                        let corr = cc(Generator::Partial(*g))?
                            .scale_re(s.theta_inv(*m, *r))
                            .try_add(&cc(Generator::Partial(*r))?.scale_re(s.theta_inv(*m, *g)))?;
                        lhs.try_sub(&corr.scale_re(sc))?
                    }
                    (Generator::Sym(m, n), Generator::Sym(r, g)) => {
                        let corr = cc(Generator::sym(*m, *g))?
                            .scale_re(s.theta_inv(*r, *n))
                            .try_add(&cc(Generator::sym(*m, *r))?.scale_re(s.theta_inv(*g, *n)))?
                            .try_add(&cc(Generator::sym(*n, *g))?.scale_re(s.theta_inv(*r, *m)))?
                            .try_add(&cc(Generator::sym(*n, *r))?.scale_re(s.theta_inv(*g, *m)))?;
                        lhs.try_add(&corr.scale_re(sc))?
                    }
                    _ => unreachable!("generators are listed partials first"),
                };
                entries.insert((i, j), f);
            }
        }
        Ok(CurvatureTable { generators: gens, entries })
    }

    /// F(X,Y) = [𝒜(X), 𝒜(Y)]⋆ - 𝒜([X,Y]) + η([X,Y]) - [η(X), η(Y)]⋆ from the
    /// brute-force bracket decomposition.
    pub fn curvature_generic(&self) -> Result<CurvatureTable> {
        let gens = self.generators();
        let mut entries = BTreeMap::new();
        for i in 0..gens.len() {
            for j in i + 1..gens.len() {
                let (x, y) = (&gens[i], &gens[j]);
                let eta_bracket = self.alg.eta(x)?.commutator(&self.alg.eta(y)?)?;
                let comb = self.alg.decompose(&eta_bracket)?;
                let eta_of_bracket = self.alg.recompose(&comb, false)?;
                let f = self
                    .covariant_coordinate(x)?
                    .commutator(&self.covariant_coordinate(y)?)?
                    .try_sub(&self.combination_coordinate(&comb)?)?
                    .try_add(&eta_of_bracket.try_sub(&eta_bracket)?)?;
                entries.insert((i, j), f);
            }
        }
        Ok(CurvatureTable { generators: gens, entries })
    }

    /// A^g(X) = g†⋆A(X)⋆g + i g†⋆X(g).
    pub fn gauge_transform(&self, g: &MoyalElement) -> Result<Self> {
        check_unitary(g)?;
        let gd = g.involution();
        let mut out = self.clone();
        for x in self.generators() {
            let a = self.slot(&x)?;
            let hom = gd.star(a)?.star(g)?;
            let inh = gd.star(&self.alg.apply(&x, g)?)?.scale(C64::new(0.0, 1.0));
            out.set_component(&x, hom.try_add(&inh)?)?;
        }
        Ok(out)
    }

    /// -(1/α²)(F_{μν}⋆F_{μν} + F_{μ(ρσ)}⋆F_{μ(ρσ)} + F_{(μν)(ρσ)}⋆F_{(μν)(ρσ)}),
    /// every index summed over its full range.
    ///
    /// Each square is computed once per unordered index pair and weighted by
    /// its multiplicity: F is antisymmetric under swapping its two slots and
    /// symmetric inside a (ρσ) slot.
    pub fn action_density(&self) -> Result<ActionDensity> {
        let table = self.curvature()?;
        let s = self.structure();
        let mult = |x: &Generator| match x {
            Generator::Sym(a, b) if a != b => 2.0,
            _ => 1.0,
        };
        let mut ym = MoyalElement::zero(s);
        let mut mixed = MoyalElement::zero(s);
        let mut sym = MoyalElement::zero(s);
        for (x, y, f) in table.iter() {
            let sq = f.star(f)?;
            match (x, y) {
                (Generator::Partial(_), Generator::Partial(_)) => ym = ym.try_add(&sq.scale_re(2.0))?,
                (Generator::Partial(_), _) => mixed = mixed.try_add(&sq.scale_re(mult(y)))?,
                (_, Generator::Partial(_)) => mixed = mixed.try_add(&sq.scale_re(mult(x)))?,
                _ => sym = sym.try_add(&sq.scale_re(2.0 * mult(x) * mult(y)))?,
            }
        }
        let pref = -1.0 / (self.alpha * self.alpha);
        let ym = ym.scale_re(pref);
        let mixed = mixed.scale_re(pref);
        let sym = sym.scale_re(pref);
        let total = ym.try_add(&mixed)?.try_add(&sym)?;
        Ok(ActionDensity { yang_mills: ym, mixed, sym, total })
    }
}

/// ∇^inv_X(a) = -a⋆η(X).
pub fn canonical_connection(alg: &DerivationAlgebra, x: &Generator, a: &MoyalElement) -> Result<MoyalElement> {
    Ok(a.star(&alg.eta(x)?)?.scale_re(-1.0))
}

/// F^inv(X,Y) = η([X,Y]) - [η(X), η(Y)]⋆ over the given generators.
pub fn canonical_curvature(alg: &DerivationAlgebra, generators: &[Generator]) -> Result<CurvatureTable> {
    let mut entries = BTreeMap::new();
    for i in 0..generators.len() {
        for j in i + 1..generators.len() {
            let bracket = alg.eta(&generators[i])?.commutator(&alg.eta(&generators[j])?)?;
            let comb = alg.decompose(&bracket)?;
            entries.insert((i, j), alg.recompose(&comb, false)?.try_sub(&bracket)?);
        }
    }
    Ok(CurvatureTable {
        generators: generators.to_vec(),
        entries,
    })
}

fn check_unitary(g: &MoyalElement) -> Result<()> {
    if is_unitary(g, UNITARY_TOL) {
        Ok(())
    } else {
        Err(Error::NotUnitary(unitarity_residual(g)))
    }
}

/// Antisymmetric table F(X_i, X_j), stored for i < j in generator order.
#[derive(Debug, Clone)]
pub struct CurvatureTable {
    generators: Vec<Generator>,
    entries: BTreeMap<(usize, usize), MoyalElement>,
}

impl CurvatureTable {
    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    fn position(&self, x: &Generator) -> Result<usize> {
        let x = match x {
            Generator::Sym(a, b) => Generator::sym(*a, *b),
            other => other.clone(),
        };
        self.generators
            .iter()
            .position(|g| *g == x)
            .ok_or_else(|| Error::InvalidInput(format!("{} is not in the table", x.name())))
    }

    /// F(X, Y) with F(Y, X) = -F(X, Y) and F(X, X) = 0.
    pub fn get(&self, x: &Generator, y: &Generator) -> Result<MoyalElement> {
        let (i, j) = (self.position(x)?, self.position(y)?);
        let s = self
            .entries
            .values()
            .next()
            .map(|e| Arc::clone(e.structure()));
        Ok(match i.cmp(&j) {
            std::cmp::Ordering::Less => self.entries[&(i, j)].clone(),
            std::cmp::Ordering::Greater => self.entries[&(j, i)].scale_re(-1.0),
            std::cmp::Ordering::Equal => match s {
                Some(s) => MoyalElement::zero(&s),
                None => return Err(Error::InvalidInput("empty curvature table".into())),
            },
        })
    }

    /// (X, Y, F(X, Y)) for X before Y.
    pub fn iter(&self) -> impl Iterator<Item = (&Generator, &Generator, &MoyalElement)> {
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

    /// Largest entrywise max-coefficient distance.
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

    /// Largest entrywise distance relative to the larger of the two entries.
    pub fn max_rel_distance(&self, other: &Self) -> Result<f64> {
        if self.generators != other.generators {
            return Err(Error::InvalidInput("tables over different generators".into()));
        }
        let mut worst: f64 = 0.0;
        for (k, f) in &self.entries {
            worst = worst.max(f.rel_distance(&other.entries[k])?);
        }
        Ok(worst)
    }

    /// Entrywise g†⋆F⋆g.
    pub fn conjugate(&self, g: &MoyalElement) -> Result<Self> {
        let gd = g.involution();
        let mut entries = BTreeMap::new();
        for (k, f) in &self.entries {
            entries.insert(*k, gd.star(f)?.star(g)?);
        }
        Ok(Self {
            generators: self.generators.clone(),
            entries,
        })
    }

    /// Every entry is a multiple of 𝕀.
    pub fn is_central(&self) -> bool {
        self.entries.values().all(|f| f.as_scalar().is_some())
    }
}

/// The three sectors of the rescaled action density and their sum.
#[derive(Debug, Clone)]
pub struct ActionDensity {
    pub yang_mills: MoyalElement,
    pub mixed: MoyalElement,
    pub sym: MoyalElement,
    pub total: MoyalElement,
}
