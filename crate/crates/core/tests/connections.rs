mod common;

use std::sync::Arc;

use common::rng;
use moyal_core::config::ConnectionConfig;
use moyal_core::connections::{canonical_connection, canonical_curvature};
use moyal_core::random::{connection, connection_with_shape, element, hermitian, plane_wave_gauge, Shape};
use moyal_core::{Basis, ConnectionForm, DerivationAlgebra, Generator, MoyalElement, SymplecticStructure, C64};

const I: C64 = C64::new(0.0, 1.0);

fn structure(dim: usize, theta: f64) -> Arc<SymplecticStructure> {
    Arc::new(SymplecticStructure::new(dim, theta).unwrap())
}

#[test]
fn closed_form_curvature_matches_generic_evaluation() {
    let mut r = rng(51);
    for i in 0..100 {
        let dim = if i < 60 { 2 } else { 4 };
        let s = structure(dim, [1.0, 0.7, 1.6][i % 3]);
        let basis = if i % 4 == 3 { Basis::G1 } else { Basis::G2 };
        let a = connection(&mut r, &s, basis, 0.5 + (i % 5) as f64 * 0.3, 1.0).unwrap();
        let closed = a.curvature().unwrap();
        let generic = a.curvature_generic().unwrap();
        let res = closed.max_rel_distance(&generic).unwrap();
        assert!(res <= 1e-11, "connection {i}: {res:e}");
    }
}

#[test]
fn canonical_curvature_is_the_central_symplectic_form() {
    for dim in [2, 4] {
        let s = structure(dim, 1.3);
        let alg = DerivationAlgebra::new(&s);
        let f = canonical_curvature(&alg, &alg.g2_basis()).unwrap();
        assert!(f.is_central());
        for (x, y, e) in f.iter() {
            let want = match (x, y) {
                (Generator::Partial(m), Generator::Partial(n)) => C64::new(0.0, -s.theta_inv(*m, *n)),
                _ => C64::new(0.0, 0.0),
            };
            assert!((e.as_scalar().unwrap() - want).norm() < 1e-13, "{} {}", x.name(), y.name());
        }
    }
}

fn conj(g: &MoyalElement, e: &MoyalElement) -> MoyalElement {
    g.involution().star(e).unwrap().star(g).unwrap()
}

#[test]
fn plane_wave_gauge_transformations_act_homogeneously() {
    let mut r = rng(52);
    for i in 0..20 {
        let dim = if i % 2 == 0 { 2 } else { 4 };
        let s = structure(dim, 1.0);
        let g = plane_wave_gauge(&mut r, &s);
        let a = connection(&mut r, &s, Basis::G2, 1.2, 1.0).unwrap();
        let ag = a.gauge_transform(&g).unwrap();
        assert!(ag.is_hermitian(1e-12));
        for (x, c) in a.covariant_coordinates().unwrap() {
            let res = ag.covariant_coordinate(&x).unwrap().rel_distance(&conj(&g, &c)).unwrap();
            assert!(res <= 1e-10, "𝒜({}) sample {i}: {res:e}", x.name());
        }
        let res = ag.curvature().unwrap().max_rel_distance(&a.curvature().unwrap().conjugate(&g).unwrap()).unwrap();
        assert!(res <= 1e-10, "curvature sample {i}: {res:e}");
        let (m, rho, sigma) = (i % dim, (i + 1) % dim, (i / 3) % dim);
        let res = ag
            .covariant_derivative(m, rho, sigma)
            .unwrap()
            .rel_distance(&conj(&g, &a.covariant_derivative(m, rho, sigma).unwrap()))
            .unwrap();
        assert!(res <= 1e-10, "covariant derivative sample {i}: {res:e}");
        let shape = if dim == 2 { Shape::SMALL } else { Shape::LIGHT };
        let light = connection_with_shape(&mut r, &s, Basis::G2, 1.2, 0.8, shape).unwrap();
        let dens = light.action_density().unwrap().total;
        let moved = light.gauge_transform(&g).unwrap().action_density().unwrap().total;
        let res = moved.rel_distance(&conj(&g, &dens)).unwrap();
        assert!(res <= 1e-10, "density sample {i}: {res:e}");
    }
}

#[test]
fn canonical_connection_is_gauge_invariant() {
    let mut r = rng(53);
    let s = structure(4, 0.9);
    let mut canon = ConnectionForm::zero(&s, Basis::G2, 1.0, 1.0).unwrap();
    for x in canon.generators() {
        let eta = canon.algebra().eta(&x).unwrap();
        canon.set_component(&x, eta.scale(-I)).unwrap();
    }
    for x in canon.generators() {
        assert!(canon.covariant_coordinate(&x).unwrap().is_zero());
    }
    for _ in 0..20 {
        let g = plane_wave_gauge(&mut r, &s);
        let moved = canon.gauge_transform(&g).unwrap();
        for x in canon.generators() {
            let res = moved.component(&x).unwrap().rel_distance(canon.component(&x).unwrap()).unwrap();
            assert!(res <= 1e-10, "{}", x.name());
        }
        let a = element(&mut r, &s, Shape::DEFAULT);
        for x in canon.generators() {
            let res = canon
                .covariant_apply(&x, &a)
                .unwrap()
                .rel_distance(&canonical_connection(canon.algebra(), &x, &a).unwrap())
                .unwrap();
            assert!(res <= 1e-12, "{}", x.name());
        }
    }
}

/// Σ over every ordered index assignment, without multiplicity shortcuts.
fn ordered_density(a: &ConnectionForm) -> [MoyalElement; 3] {
    let s = a.structure();
    let d = s.dim();
    let f = a.curvature().unwrap();
    let sq = |x: &Generator, y: &Generator| {
        let e = f.get(x, y).unwrap();
        e.star(&e).unwrap()
    };
    let mut out = [MoyalElement::zero(s), MoyalElement::zero(s), MoyalElement::zero(s)];
    let p = Generator::Partial;
    for m in 0..d {
        for n in 0..d {
            out[0] = out[0].try_add(&sq(&p(m), &p(n))).unwrap();
            for r in 0..d {
                out[1] = out[1].try_add(&sq(&p(m), &Generator::sym(n, r))).unwrap();
                for t in 0..d {
                    out[2] = out[2].try_add(&sq(&Generator::sym(m, n), &Generator::sym(r, t))).unwrap();
                }
            }
        }
    }
    let pref = -1.0 / (a.alpha() * a.alpha());
    out.map(|e| e.scale_re(pref))
}

#[test]
fn action_density_equals_the_ordered_index_sum() {
    let mut r = rng(54);
    for dim in [2, 4] {
        let s = structure(dim, 1.1);
        for _ in 0..4 {
            let shape = if dim == 2 { Shape::SMALL } else { Shape::LIGHT };
            let a = connection_with_shape(&mut r, &s, Basis::G2, 0.9, 1.3, shape).unwrap();
            let dens = a.action_density().unwrap();
            let [ym, mixed, sym] = ordered_density(&a);
            assert!(dens.yang_mills.rel_distance(&ym).unwrap() < 1e-12);
            assert!(dens.mixed.rel_distance(&mixed).unwrap() < 1e-12);
            assert!(dens.sym.rel_distance(&sym).unwrap() < 1e-12);
        }
    }
}

#[test]
fn frozen_symmetric_coordinates_give_a_mass_term() {
    // With 𝒜_(ρσ) = 0 the mixed sector is -(1/α²)(2D+2)(s/θ)² Σ_μ 𝒜_μ⋆𝒜_μ,
    // which is (4n+2)μ² times the quadratic form for s = μθ.
    let mut r = rng(55);
    for (dim, theta, mu, alpha) in [(2, 1.0, 1.0, 1.0), (2, 0.5, 1.7, 0.9), (4, 1.3, 0.6, 1.2)] {
        let s = structure(dim, theta);
        let mut a = ConnectionForm::zero(&s, Basis::G2, mu, alpha).unwrap();
        for x in a.generators() {
            let value = match x {
                Generator::Partial(_) => hermitian(&mut r, &s, Shape::SMALL),
                _ => a.algebra().eta(&x).unwrap().scale(-I),
            };
            a.set_component(&x, value).unwrap();
        }
        let mut quad = MoyalElement::zero(&s);
        for m in 0..dim {
            let c = a.covariant_coordinate(&Generator::Partial(m)).unwrap();
            quad = quad.try_add(&c.star(&c).unwrap()).unwrap();
        }
        let mass2 = (2 * dim + 2) as f64 * mu * mu;
        let want = quad.scale_re(-mass2 / (alpha * alpha));
        let got = a.action_density().unwrap().mixed;
        assert!(got.rel_distance(&want).unwrap() < 1e-12, "D={dim}");
        assert!(a.action_density().unwrap().sym.max_norm() < 1e-12);
    }
}

#[test]
fn connection_configs_parse_and_validate() {
    let text = r#"{ "D": 2, "theta": 1.0, "mu": 1.0, "alpha": 1.0, "basis": "G2",
        "components": { "d1": "x1 x2", "X12": "0.5 W[1,0] + 0.5 W[-1,0]" } }"#;
    let form = ConnectionConfig::from_json(text).unwrap().build().unwrap();
    assert_eq!(form.generators().len(), 5);
    let s = form.structure();
    let want = MoyalElement::monomial(s, &[1, 1], C64::new(1.0, 0.0)).unwrap();
    assert_eq!(form.component(&Generator::Partial(0)).unwrap(), &want);
    assert!(form.component(&Generator::Partial(1)).unwrap().is_zero());

    let bad = [
        r#"{ "D": 3, "theta": 1.0 }"#,
        r#"{ "D": 2, "theta": -1.0 }"#,
        r#"{ "D": 2, "theta": 1.0, "basis": "G3" }"#,
        r#"{ "D": 2, "theta": 1.0, "basis": "G1", "components": { "X11": "x1" } }"#,
        r#"{ "D": 2, "theta": 1.0, "components": { "d3": "x1" } }"#,
        r#"{ "D": 2, "theta": 1.0, "components": { "d1": "x1 +" } }"#,
        r#"{ "D": 2, "theta": 1.0, "alpha": 0.0 }"#,
        r#"{ "D": 2, "theta": 1.0, "extra": 1 }"#,
    ];
    for t in bad {
        assert!(ConnectionConfig::from_json(t).and_then(|c| c.build()).is_err(), "{t}");
    }
}
