//! The derivation algebras G1 = {∂_μ} and G2 = G1 ∪ {X_(μν)}, the map η and
//! brute-force structure constants.
//!
//! Every derivation in scope is inner: ∂_μ = [iξ_μ, ·]⋆ and X_(μν) =
//! [s·iξ_μξ_ν, ·]⋆, where s is the Sym-sector scale (1 unless a connection
//! applies its μθ rescaling). Structure constants are never tabulated; they
//! come from projecting star commutators onto {𝕀, η_μ, η_(μν)}.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::element::{MoyalElement, C64};
use crate::error::{Error, Result};
use crate::symplectic::SymplecticStructure;

/// A derivation of the Moyal algebra.
#[derive(Debug, Clone, PartialEq)]
pub enum Generator {
    Partial(usize),
    /// Symmetric pair, stored with μ ≤ ν.
    Sym(usize, usize),
    /// Ad_P : a ↦ [P, a]⋆.
    Inner(MoyalElement),
}

impl Generator {
    pub fn sym(mu: usize, nu: usize) -> Self {
        Generator::Sym(mu.min(nu), mu.max(nu))
    }

    /// Config name: "d1", "X12", one-based.
    pub fn name(&self) -> String {
        match self {
            Generator::Partial(mu) => format!("d{}", mu + 1),
            Generator::Sym(mu, nu) => format!("X{}{}", mu + 1, nu + 1),
            Generator::Inner(p) => format!("Ad[{p}]"),
        }
    }

    /// Inverse of [`Generator::name`] for the basis generators.
    pub fn from_name(name: &str, dim: usize) -> Result<Self> {
        let bad = || Error::InvalidInput(format!("unknown generator '{name}' for D = {dim}"));
        let digit = |c: char| -> Result<usize> {
            let v = c.to_digit(10).ok_or_else(bad)? as usize;
            if v == 0 || v > dim {
                Err(bad())
            } else {
                Ok(v - 1)
            }
        };
        let chars: Vec<char> = name.chars().collect();
        match chars.as_slice() {
            ['d', rest @ ..] if !rest.is_empty() => {
                let idx: usize = rest.iter().collect::<String>().parse().map_err(|_| bad())?;
                if idx == 0 || idx > dim {
                    return Err(bad());
                }
                Ok(Generator::Partial(idx - 1))
            }
            ['X', a, b] => Ok(Generator::sym(digit(*a)?, digit(*b)?)),
            _ => Err(bad()),
        }
    }
}

/// Decomposition c·𝕀 + Σ a_μ η_μ + Σ b_(μν) η_(μν).
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorCombination {
    pub central: C64,
    pub partials: Vec<C64>,
    pub syms: BTreeMap<(usize, usize), C64>,
}

impl GeneratorCombination {
    /// Non-zero derivation coefficients; the central charge is dropped.
    pub fn derivation_terms(&self) -> Vec<(Generator, C64)> {
        let mut out = Vec::new();
        for (mu, c) in self.partials.iter().enumerate() {
            if c.norm() > 0.0 {
                out.push((Generator::Partial(mu), *c));
            }
        }
        for (&(mu, nu), c) in &self.syms {
            if c.norm() > 0.0 {
                out.push((Generator::Sym(mu, nu), *c));
            }
        }
        out
    }

    pub fn partial(&self, mu: usize) -> C64 {
        self.partials[mu]
    }

    pub fn sym(&self, mu: usize, nu: usize) -> C64 {
        self.syms
            .get(&(mu.min(nu), mu.max(nu)))
            .copied()
            .unwrap_or(C64::new(0.0, 0.0))
    }
}

/// G1/G2 calculus over a fixed structure.
#[derive(Debug, Clone)]
pub struct DerivationAlgebra {
    s: Arc<SymplecticStructure>,
    sym_scale: f64,
}

impl DerivationAlgebra {
    pub fn new(s: &Arc<SymplecticStructure>) -> Self {
        Self::with_sym_scale(s, 1.0)
    }

    /// η(X_(μν)) = scale·iξ_μξ_ν.
    pub fn with_sym_scale(s: &Arc<SymplecticStructure>, scale: f64) -> Self {
        Self {
            s: Arc::clone(s),
            sym_scale: scale,
        }
    }

    pub fn structure(&self) -> &Arc<SymplecticStructure> {
        &self.s
    }

    pub fn sym_scale(&self) -> f64 {
        self.sym_scale
    }

    pub fn g1_basis(&self) -> Vec<Generator> {
        (0..self.s.dim()).map(Generator::Partial).collect()
    }

    /// ∂_μ first, then X_(μν) for μ ≤ ν in lexicographic order.
    pub fn g2_basis(&self) -> Vec<Generator> {
        let d = self.s.dim();
        let mut out = self.g1_basis();
        for mu in 0..d {
            for nu in mu..d {
                out.push(Generator::Sym(mu, nu));
            }
        }
        out
    }

    fn check_generator(&self, x: &Generator) -> Result<()> {
        match x {
            Generator::Partial(mu) => self.s.check_index(*mu),
            Generator::Sym(mu, nu) => {
                self.s.check_index(*mu)?;
                self.s.check_index(*nu)
            }
            Generator::Inner(p) => {
                if **p.structure() == *self.s {
                    Ok(())
                } else {
                    Err(Error::StructureMismatch)
                }
            }
        }
    }

    /// η(X): iξ_μ, s·iξ_μξ_ν, or P - P(0).
    pub fn eta(&self, x: &Generator) -> Result<MoyalElement> {
        self.check_generator(x)?;
        match x {
            Generator::Partial(mu) => Ok(MoyalElement::xi(&self.s, *mu)?.scale(C64::new(0.0, 1.0))),
            Generator::Sym(mu, nu) => {
                let xi_mu = MoyalElement::xi(&self.s, *mu)?;
                let xi_nu = MoyalElement::xi(&self.s, *nu)?;
                Ok(xi_mu.pointwise(&xi_nu)?.scale(C64::new(0.0, self.sym_scale)))
            }
            Generator::Inner(p) => {
                if !p.is_polynomial() {
                    return Err(Error::NotPolynomial);
                }
                if p.degree() > 2 {
                    return Err(Error::DegreeTooHigh(p.degree()));
                }
                p.try_sub(&MoyalElement::constant(&self.s, p.constant_term()))
            }
        }
    }

    /// X(a). Leibniz holds because every generator is inner.
    pub fn apply(&self, x: &Generator, a: &MoyalElement) -> Result<MoyalElement> {
        self.check_generator(x)?;
        match x {
            Generator::Partial(mu) => a.partial(*mu),
            Generator::Sym(..) => self.eta(x)?.commutator(a),
            Generator::Inner(p) => p.commutator(a),
        }
    }

    /// Projects a polynomial of degree ≤ 2 onto {𝕀, η_μ, η_(μν)}.
    pub fn decompose(&self, p: &MoyalElement) -> Result<GeneratorCombination> {
        if !p.is_polynomial() {
            return Err(Error::NotPolynomial);
        }
        if p.degree() > 2 {
            return Err(Error::DegreeTooHigh(p.degree()));
        }
        let s = &self.s;
        let d = s.dim();
        let zero = C64::new(0.0, 0.0);
        let i = C64::new(0.0, 1.0);
        let mut linear = vec![zero; d];
        let mut quad = vec![zero; d * d];
        for t in p.terms() {
            let nonzero: Vec<usize> = (0..d).filter(|&m| t.alpha[m] > 0).collect();
            match (t.degree(), nonzero.as_slice()) {
                (1, [m]) => linear[*m] = t.coeff,
                (2, [m]) => quad[m * d + m] = t.coeff,
                (2, [m, n]) => {
                    quad[m * d + n] = t.coeff * 0.5;
                    quad[n * d + m] = t.coeff * 0.5;
                }
                _ => {}
            }
        }
        // x_ν = iΘ_{νμ} η_μ
        let partials = (0..d)
            .map(|mu| (0..d).map(|nu| linear[nu] * i * s.big_theta(nu, mu)).sum())
            .collect();
        // x = -Θξ, so xᵀQx = ξᵀ(ΘᵀQΘ)ξ
        let mut q_xi = vec![zero; d * d];
        for mu in 0..d {
            for nu in 0..d {
                let mut acc = zero;
                for a in 0..d {
                    for b in 0..d {
                        acc += s.big_theta(a, mu) * quad[a * d + b] * s.big_theta(b, nu);
                    }
                }
                q_xi[mu * d + nu] = acc;
            }
        }
        let eta_unit = i * self.sym_scale;
        let mut syms = BTreeMap::new();
        for mu in 0..d {
            for nu in mu..d {
                let c = if mu == nu {
                    q_xi[mu * d + nu]
                } else {
                    q_xi[mu * d + nu] * 2.0
                };
                if c.norm() > 0.0 {
                    syms.insert((mu, nu), c / eta_unit);
                }
            }
        }
        Ok(GeneratorCombination {
            central: p.constant_term(),
            partials,
            syms,
        })
    }

    /// Rebuilds c·𝕀 + Σ a_X η(X) from a decomposition.
    pub fn recompose(&self, comb: &GeneratorCombination, with_central: bool) -> Result<MoyalElement> {
        let mut out = if with_central {
            MoyalElement::constant(&self.s, comb.central)
        } else {
            MoyalElement::zero(&self.s)
        };
        for (x, c) in comb.derivation_terms() {
            out = out.try_add(&self.eta(&x)?.scale(c))?;
        }
        Ok(out)
    }

    /// Decomposition of [η(X), η(Y)]⋆; dropping `central` gives [X, Y].
    pub fn bracket_generators(&self, x: &Generator, y: &Generator) -> Result<GeneratorCombination> {
        let bracket = self.eta(x)?.commutator(&self.eta(y)?)?;
        self.decompose(&bracket)
    }
}

/// {P₁, P₂}_PB = Θ_{μν} ∂_μP₁ ∂_νP₂.
pub fn poisson_bracket(p1: &MoyalElement, p2: &MoyalElement) -> Result<MoyalElement> {
    if !p1.is_polynomial() || !p2.is_polynomial() {
        return Err(Error::NotPolynomial);
    }
    let s = p1.structure();
    let d = s.dim();
    let mut out = MoyalElement::zero(s);
    for mu in 0..d {
        for nu in 0..d {
            let t = s.big_theta(mu, nu);
            if t == 0.0 {
                continue;
            }
            let term = p1.partial(mu)?.pointwise(&p2.partial(nu)?)?.scale_re(t);
            out = out.try_add(&term)?;
        }
    }
    Ok(out)
}

/// η_{X1}, η_{X2}, η_{X3} spanning the sp(2) part of G2 in D = 2.
pub fn d2_special_basis(s: &Arc<SymplecticStructure>) -> Result<[MoyalElement; 3]> {
    if s.dim() != 2 {
        return Err(Error::InvalidDimension(s.dim()));
    }
    let th = s.theta();
    let r2 = std::f64::consts::SQRT_2;
    let c = C64::new(0.0, 1.0 / (4.0 * r2 * th));
    let x1sq = MoyalElement::monomial(s, &[2, 0], c)?;
    let x2sq = MoyalElement::monomial(s, &[0, 2], c)?;
    let x12 = MoyalElement::monomial(s, &[1, 1], C64::new(0.0, 1.0 / (2.0 * r2 * th)))?;
    Ok([x1sq.try_add(&x2sq)?, x1sq.try_sub(&x2sq)?, x12])
}

/// One verified bracket relation.
#[derive(Debug, Clone, PartialEq)]
pub struct RelationCheck {
    pub name: String,
    /// Relative residual of lhs - rhs.
    pub residual: f64,
}

/// The nine D = 2 relations exactly as tabulated for η_{X1..X3}.
pub fn d2_listed_relations(s: &Arc<SymplecticStructure>) -> Result<Vec<RelationCheck>> {
    let alg = DerivationAlgebra::new(s);
    let [x1, x2, x3] = d2_special_basis(s)?;
    let e1 = alg.eta(&Generator::Partial(0))?;
    let e2 = alg.eta(&Generator::Partial(1))?;
    let r = 1.0 / std::f64::consts::SQRT_2;
    let h = 0.5 * r;
    let cases: Vec<(&str, &MoyalElement, &MoyalElement, f64, &MoyalElement)> = vec![
        ("[eta_X1, eta_X2] = (1/sqrt2) eta_X3", &x1, &x2, r, &x3),
        ("[eta_X2, eta_X3] = -(1/sqrt2) eta_X1", &x2, &x3, -r, &x1),
        ("[eta_X3, eta_X1] = (1/sqrt2) eta_X2", &x3, &x1, r, &x2),
        ("[eta_1, eta_X1] = (1/(2 sqrt2)) eta_2", &e1, &x1, h, &e2),
        ("[eta_2, eta_X1] = -(1/(2 sqrt2)) eta_1", &e2, &x1, -h, &e1),
        ("[eta_1, eta_X2] = (1/(2 sqrt2)) eta_2", &e1, &x2, h, &e2),
        ("[eta_2, eta_X2] = (1/(2 sqrt2)) eta_1", &e2, &x2, h, &e1),
        ("[eta_1, eta_X3] = -(1/(2 sqrt2)) eta_1", &e1, &x3, -h, &e1),
        ("[eta_2, eta_X3] = (1/(2 sqrt2)) eta_2", &e2, &x3, h, &e2),
    ];
    cases
        .into_iter()
        .map(|(name, a, b, coeff, rhs)| {
            let lhs = a.commutator(b)?;
            Ok(RelationCheck {
                name: name.to_string(),
                residual: lhs.rel_distance(&rhs.scale_re(coeff))?,
            })
        })
        .collect()
}

/// Max residual of [η_(μν), η_(ρσ)] = -(Θ⁻¹_{ρν}η_(μσ) + Θ⁻¹_{σν}η_(μρ) + Θ⁻¹_{ρμ}η_(νσ) + Θ⁻¹_{σμ}η_(νρ))
/// over all index values.
pub fn slnr_residual(s: &Arc<SymplecticStructure>) -> Result<f64> {
    let alg = DerivationAlgebra::new(s);
    let d = s.dim();
    let eta = |m: usize, n: usize| alg.eta(&Generator::sym(m, n));
    let mut worst: f64 = 0.0;
    for mu in 0..d {
        for nu in 0..d {
            for rho in 0..d {
                for sigma in 0..d {
                    let lhs = eta(mu, nu)?.commutator(&eta(rho, sigma)?)?;
                    let rhs = eta(mu, sigma)?
                        .scale_re(s.theta_inv(rho, nu))
                        .try_add(&eta(mu, rho)?.scale_re(s.theta_inv(sigma, nu)))?
                        .try_add(&eta(nu, sigma)?.scale_re(s.theta_inv(rho, mu)))?
                        .try_add(&eta(nu, rho)?.scale_re(s.theta_inv(sigma, mu)))?
                        .scale_re(-1.0);
                    worst = worst.max(lhs.rel_distance(&rhs)?);
                }
            }
        }
    }
    Ok(worst)
}

/// Max residual of [η_μ, η_(ρσ)] = Θ⁻¹_{μρ}η_σ + Θ⁻¹_{μσ}η_ρ over all index values.
pub fn addicom_residual(s: &Arc<SymplecticStructure>) -> Result<f64> {
    let alg = DerivationAlgebra::new(s);
    let d = s.dim();
    let mut worst: f64 = 0.0;
    for mu in 0..d {
        let e_mu = alg.eta(&Generator::Partial(mu))?;
        for rho in 0..d {
            for sigma in 0..d {
                let lhs = e_mu.commutator(&alg.eta(&Generator::sym(rho, sigma))?)?;
                let rhs = alg
                    .eta(&Generator::Partial(sigma))?
                    .scale_re(s.theta_inv(mu, rho))
                    .try_add(&alg.eta(&Generator::Partial(rho))?.scale_re(s.theta_inv(mu, sigma)))?;
                worst = worst.max(lhs.rel_distance(&rhs)?);
            }
        }
    }
    Ok(worst)
}

/// Max residual of [η_μ, η_ν] = iΘ⁻¹_{μν}𝕀.
pub fn central_residual(s: &Arc<SymplecticStructure>) -> Result<f64> {
    let alg = DerivationAlgebra::new(s);
    let d = s.dim();
    let mut worst: f64 = 0.0;
    for mu in 0..d {
        for nu in 0..d {
            let lhs = alg
                .eta(&Generator::Partial(mu))?
                .commutator(&alg.eta(&Generator::Partial(nu))?)?;
            let rhs = MoyalElement::constant(s, C64::new(0.0, s.theta_inv(mu, nu)));
            worst = worst.max(lhs.rel_distance(&rhs)?);
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_expression;

    fn s(d: usize, theta: f64) -> Arc<SymplecticStructure> {
        Arc::new(SymplecticStructure::new(d, theta).unwrap())
    }

    #[test]
    fn apply_partial_on_product() {
        let s = s(2, 1.0);
        let alg = DerivationAlgebra::new(&s);
        let a = parse_expression("x1 x2", &s).unwrap();
        assert_eq!(alg.apply(&Generator::Partial(0), &a).unwrap(), parse_expression("x2", &s).unwrap());
    }

    #[test]
    fn eta_examples() {
        let s = s(2, 1.0);
        let alg = DerivationAlgebra::new(&s);
        let p = parse_expression("x1 x2 + 5", &s).unwrap();
        assert_eq!(alg.eta(&Generator::Inner(p)).unwrap(), parse_expression("x1 x2", &s).unwrap());
        let xi = MoyalElement::xi(&s, 1).unwrap().scale(C64::new(0.0, 1.0));
        assert_eq!(alg.eta(&Generator::Partial(1)).unwrap(), xi);
        assert_eq!(alg.eta(&Generator::Sym(0, 0)).unwrap(), parse_expression("1i x2^2", &s).unwrap());
        let cubic = parse_expression("x1^3", &s).unwrap();
        assert_eq!(alg.eta(&Generator::Inner(cubic)), Err(Error::DegreeTooHigh(3)));
        let wave = parse_expression("W[1,0]", &s).unwrap();
        assert_eq!(alg.eta(&Generator::Inner(wave)), Err(Error::NotPolynomial));
    }

    #[test]
    fn bracket_examples() {
        let s = s(2, 1.0);
        let alg = DerivationAlgebra::new(&s);
        let b = alg.bracket_generators(&Generator::Partial(0), &Generator::Partial(1)).unwrap();
        assert_eq!(b.central, C64::new(0.0, s.theta_inv(0, 1)));
        assert!(b.derivation_terms().is_empty());

        let b = alg.bracket_generators(&Generator::Sym(0, 0), &Generator::Sym(0, 1)).unwrap();
        let terms = b.derivation_terms();
        assert_eq!(terms.len(), 1);
        assert_eq!(terms[0].0, Generator::Sym(0, 0));
        assert!((terms[0].1 - C64::new(2.0, 0.0)).norm() < 1e-14);

        let b = alg.bracket_generators(&Generator::Partial(0), &Generator::Sym(0, 1)).unwrap();
        let terms = b.derivation_terms();
        assert_eq!(terms.len(), 1);
        assert_eq!(terms[0].0, Generator::Partial(0));
        assert!((terms[0].1 - C64::new(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn decompose_round_trips_on_quadratics() {
        let s = s(4, 0.7);
        for scale in [1.0, 2.5] {
            let alg = DerivationAlgebra::with_sym_scale(&s, scale);
            let p = parse_expression("3 + (1-2i) x1 + x3 x4 - 0.5 x2^2 + 2i x1 x4 + x2", &s).unwrap();
            let comb = alg.decompose(&p).unwrap();
            assert!(alg.recompose(&comb, true).unwrap().approx_eq(&p, 1e-14));
        }
    }

    #[test]
    fn tables_hold() {
        for d in [2, 4] {
            for theta in [0.5, 1.0, 1.7] {
                let s = s(d, theta);
                assert!(slnr_residual(&s).unwrap() < 1e-12);
                assert!(addicom_residual(&s).unwrap() < 1e-12);
                assert!(central_residual(&s).unwrap() < 1e-12);
            }
        }
    }

    #[test]
    fn d2_mixed_relations_hold_as_listed() {
        let s = s(2, 1.3);
        let checks = d2_listed_relations(&s).unwrap();
        for c in &checks[3..] {
            assert!(c.residual < 1e-12, "{} residual {}", c.name, c.residual);
        }
    }

    #[test]
    fn d2_sp2_brackets_carry_the_opposite_sign_of_the_list() {
        // With Θ₁₂ = -θ the three sp(2) brackets close with the reversed sign.
        let s = s(2, 1.3);
        let [x1, x2, x3] = d2_special_basis(&s).unwrap();
        let r = 1.0 / std::f64::consts::SQRT_2;
        let pairs = [(&x1, &x2, -r, &x3), (&x2, &x3, r, &x1), (&x3, &x1, -r, &x2)];
        for (a, b, c, rhs) in pairs {
            assert!(a.commutator(b).unwrap().approx_eq(&rhs.scale_re(c), 1e-12));
        }
        assert!(d2_special_basis(&self::s(4, 1.0)).is_err());
    }

    #[test]
    fn poisson_examples() {
        let s = s(2, 1.0);
        let x1 = parse_expression("x1", &s).unwrap();
        let x2 = parse_expression("x2", &s).unwrap();
        assert_eq!(poisson_bracket(&x1, &x2).unwrap().as_scalar(), Some(C64::new(-1.0, 0.0)));
        let cube1 = parse_expression("x1^3", &s).unwrap();
        let cube2 = parse_expression("x2^3", &s).unwrap();
        let lhs = cube1.commutator(&cube2).unwrap();
        let rhs = poisson_bracket(&cube1, &cube2).unwrap().scale(C64::new(0.0, 1.0));
        // the third-order term -(i/4)·Θ³·∂³x₁³·∂³x₂³·2/3! survives
        let diff = lhs.try_sub(&rhs).unwrap();
        assert_eq!(diff.degree(), 0);
        assert!(diff.max_norm() > 1.0);
        assert!(poisson_bracket(&parse_expression("W[1,1]", &s).unwrap(), &x1).is_err());
    }

    #[test]
    fn generator_names_round_trip() {
        for name in ["d1", "d4", "X11", "X24"] {
            assert_eq!(Generator::from_name(name, 4).unwrap().name(), name);
        }
        assert_eq!(Generator::from_name("X21", 2).unwrap(), Generator::Sym(0, 1));
        assert!(Generator::from_name("d3", 2).is_err());
        assert!(Generator::from_name("X13", 2).is_err());
        assert!(Generator::from_name("Y1", 2).is_err());
    }
}
