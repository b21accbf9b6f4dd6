//! Seeded samplers for property checks and the verification driver.

use std::sync::Arc;

use rand::Rng;

use crate::connections::{Basis, ConnectionForm};
use crate::derivations::Generator;
use crate::element::{MoyalElement, Term, C64};
use crate::error::Result;
use crate::graded::{GradedAlgebra, GradedConnectionForm, GradedElement};
use crate::symplectic::SymplecticStructure;

/// Shape limits for random elements.
#[derive(Debug, Clone, Copy)]
pub struct Shape {
    pub max_terms: usize,
    pub max_degree: u32,
    /// Each wave-vector component is drawn from {-k, ..., k} / 2.
    pub max_wave: i32,
}

impl Shape {
    pub const DEFAULT: Shape = Shape {
        max_terms: 4,
        max_degree: 3,
        max_wave: 2,
    };

    pub const POLYNOMIAL: Shape = Shape {
        max_terms: 4,
        max_degree: 3,
        max_wave: 0,
    };

    /// Single-term linear components; action densities stay small in D = 4.
    pub const LIGHT: Shape = Shape {
        max_terms: 1,
        max_degree: 1,
        max_wave: 2,
    };

    /// Connection components: degree ≤ 2 keeps brackets cheap.
    pub const SMALL: Shape = Shape {
        max_terms: 3,
        max_degree: 2,
        max_wave: 2,
    };
}

fn coeff<R: Rng>(rng: &mut R) -> C64 {
    C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

/// Half-integer wave vectors keep repeated products on a common lattice.
fn wave<R: Rng>(rng: &mut R, dim: usize, max_wave: i32) -> Vec<f64> {
    (0..dim)
        .map(|_| {
            if max_wave == 0 {
                0.0
            } else {
                f64::from(rng.gen_range(-max_wave..=max_wave)) * 0.5
            }
        })
        .collect()
}

pub fn element<R: Rng>(rng: &mut R, s: &Arc<SymplecticStructure>, shape: Shape) -> MoyalElement {
    let d = s.dim();
    let n = rng.gen_range(1..=shape.max_terms);
    let terms = (0..n).map(|_| {
        let total = rng.gen_range(0..=shape.max_degree);
        let mut alpha = vec![0u32; d];
        for _ in 0..total {
            alpha[rng.gen_range(0..d)] += 1;
        }
        Term::new(alpha, wave(rng, d, shape.max_wave), coeff(rng))
    });
    MoyalElement::from_terms(s, terms).expect("shapes match the structure")
}

/// a + a†.
pub fn hermitian<R: Rng>(rng: &mut R, s: &Arc<SymplecticStructure>, shape: Shape) -> MoyalElement {
    let a = element(rng, s, shape);
    a.try_add(&a.involution()).expect("same structure")
}

/// Polynomial of degree ≤ 2.
pub fn quadratic<R: Rng>(rng: &mut R, s: &Arc<SymplecticStructure>) -> MoyalElement {
    element(
        rng,
        s,
        Shape {
            max_terms: 4,
            max_degree: 2,
            max_wave: 0,
        },
    )
}

/// e^{iφ} e^{ik·x} with k on the half-integer lattice, |k_μ| ≤ 1.
pub fn plane_wave_gauge<R: Rng>(rng: &mut R, s: &Arc<SymplecticStructure>) -> MoyalElement {
    let phase: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
    let k = wave(rng, s.dim(), 2);
    MoyalElement::plane_wave(s, &k, C64::from_polar(1.0, phase)).expect("length matches")
}

pub fn connection<R: Rng>(
    rng: &mut R,
    s: &Arc<SymplecticStructure>,
    basis: Basis,
    mu: f64,
    alpha: f64,
) -> Result<ConnectionForm> {
    connection_with_shape(rng, s, basis, mu, alpha, Shape::SMALL)
}

/// Hermitian components of the given shape for every basis generator.
pub fn connection_with_shape<R: Rng>(
    rng: &mut R,
    s: &Arc<SymplecticStructure>,
    basis: Basis,
    mu: f64,
    alpha: f64,
    shape: Shape,
) -> Result<ConnectionForm> {
    let mut a = ConnectionForm::zero(s, basis, mu, alpha)?;
    for x in a.generators() {
        a.set_component(&x, hermitian(rng, s, shape))?;
    }
    Ok(a)
}

pub fn graded_connection<R: Rng>(rng: &mut R, alg: &GradedAlgebra, alpha: f64) -> Result<GradedConnectionForm> {
    let s = alg.structure();
    let mut a = GradedConnectionForm::zero(alg, alpha)?;
    for m in 0..s.dim() {
        a.a0[m] = hermitian(rng, s, Shape::SMALL);
        a.a1[m] = hermitian(rng, s, Shape::SMALL);
        for n in m..s.dim() {
            a.set_g0(m, n, hermitian(rng, s, Shape::SMALL));
        }
    }
    a.phi = hermitian(rng, s, Shape::SMALL);
    Ok(a)
}

/// A⁰ = A¹ random, G⁰ = s_M ξξ, φ random.
pub fn restricted_graded_connection<R: Rng>(
    rng: &mut R,
    alg: &GradedAlgebra,
    alpha: f64,
) -> Result<GradedConnectionForm> {
    let s = alg.structure();
    let mut a = GradedConnectionForm::zero(alg, alpha)?;
    for m in 0..s.dim() {
        let am = hermitian(rng, s, Shape::SMALL);
        a.a0[m] = am.clone();
        a.a1[m] = am;
        for n in m..s.dim() {
            let xx = MoyalElement::xi(s, m)?.pointwise(&MoyalElement::xi(s, n)?)?;
            a.set_g0(m, n, xx.scale_re(alg.s_m()));
        }
    }
    a.phi = hermitian(rng, s, Shape::SMALL);
    Ok(a)
}

pub fn graded_element<R: Rng>(rng: &mut R, s: &Arc<SymplecticStructure>, shape: Shape) -> GradedElement {
    GradedElement {
        even: element(rng, s, shape),
        odd: element(rng, s, shape),
    }
}

/// A random basis generator of G2, or a random inner one from a quadratic.
pub fn g2_generator<R: Rng>(rng: &mut R, s: &Arc<SymplecticStructure>) -> Generator {
    let d = s.dim();
    match rng.gen_range(0..3) {
        0 => Generator::Partial(rng.gen_range(0..d)),
        1 => Generator::sym(rng.gen_range(0..d), rng.gen_range(0..d)),
        _ => Generator::Inner(quadratic(rng, s)),
    }
}
