mod common;

use std::sync::Arc;

use common::rng;
use moyal_core::config::GradedConfig;
use moyal_core::graded::verify_graded_table;
use moyal_core::random::{graded_connection, graded_element, plane_wave_gauge, restricted_graded_connection, Shape};
use moyal_core::{GradedAlgebra, GradedConnectionForm, GradedElement, GradedGenerator, MoyalElement, SymplecticStructure, C64};

fn structure(dim: usize, theta: f64) -> Arc<SymplecticStructure> {
    Arc::new(SymplecticStructure::new(dim, theta).unwrap())
}

#[test]
fn commutator_families_hold_exactly() {
    for (dim, theta) in [(2, 1.0), (4, 1.0), (4, 0.6)] {
        let rows = verify_graded_table(&structure(dim, theta)).unwrap();
        assert_eq!(rows.len(), 10);
        for r in rows {
            assert!(r.residual <= 1e-12, "{}: {:e}", r.name, r.residual);
        }
    }
}

#[test]
fn graded_product_is_associative_and_brackets_satisfy_jacobi() {
    let mut r = rng(61);
    for dim in [2, 4] {
        let s = structure(dim, 0.8);
        for _ in 0..20 {
            let a = graded_element(&mut r, &s, Shape::SMALL);
            let b = graded_element(&mut r, &s, Shape::SMALL);
            let c = graded_element(&mut r, &s, Shape::SMALL);
            let lhs = a.mul(&b).unwrap().mul(&c).unwrap();
            let rhs = a.mul(&b.mul(&c).unwrap()).unwrap();
            assert!(lhs.rel_distance(&rhs).unwrap() < 1e-10);
            // All three odd: [a,[b,c]] + [b,[c,a]] + [c,[a,b]] = 0.
            let (a, b, c) = (
                GradedElement::from_odd(a.odd),
                GradedElement::from_odd(b.odd),
                GradedElement::from_odd(c.odd),
            );
            let j = |p: &GradedElement, q: &GradedElement, t: &GradedElement| p.bracket(&q.bracket(t).unwrap()).unwrap();
            let sum = j(&a, &b, &c).try_add(&j(&b, &c, &a)).unwrap().try_add(&j(&c, &a, &b)).unwrap();
            let scale = j(&a, &b, &c).distance(&GradedElement::zero(&s)).unwrap().max(1.0);
            assert!(sum.distance(&GradedElement::zero(&s)).unwrap() < 1e-10 * scale);
        }
    }
}

#[test]
fn graded_curvature_dual_path_and_covariance() {
    let mut r = rng(62);
    for (dim, count) in [(2, 20), (4, 3)] {
        let s = structure(dim, 1.0);
        let alg = GradedAlgebra::rescaled(&s, 1.3, 0.8);
        for i in 0..count {
            let conn = graded_connection(&mut r, &alg, 1.0).unwrap();
            let closed = conn.curvature().unwrap();
            let res = closed.max_distance(&conn.curvature_generic().unwrap()).unwrap();
            assert!(res <= 1e-11, "D={dim} sample {i}: {res:e}");
            let g = GradedElement::from_even(plane_wave_gauge(&mut r, &s));
            let moved = conn.gauge_transform(&g).unwrap().curvature().unwrap();
            let res = moved.max_distance(&closed.conjugate(&g).unwrap()).unwrap();
            assert!(res <= 1e-10, "D={dim} sample {i}: {res:e}");
        }
    }
}

#[test]
fn canonical_graded_curvature_is_central() {
    let s = structure(4, 1.2);
    let alg = GradedAlgebra::unscaled(&s);
    for x in alg.basis() {
        for y in alg.basis() {
            assert!(alg.canonical_curvature(&x, &y).unwrap().is_central(), "{} {}", x.name(), y.name());
        }
    }
}

#[test]
fn restricted_density_is_gauge_covariant() {
    let mut r = rng(63);
    let s = structure(2, 1.0);
    let alg = GradedAlgebra::rescaled(&s, 1.3, 0.8);
    for _ in 0..10 {
        let conn = restricted_graded_connection(&mut r, &alg, 1.0).unwrap();
        let g = plane_wave_gauge(&mut r, &s);
        let dens = conn.action_density(1e-12).unwrap().total;
        let moved = conn
            .gauge_transform(&GradedElement::from_even(g.clone()))
            .unwrap()
            .action_density(1e-10)
            .unwrap()
            .total;
        let want = g.involution().star(&dens).unwrap().star(&g).unwrap();
        assert!(moved.rel_distance(&want).unwrap() < 1e-10);
    }
}

#[test]
fn vacuum_density_pieces() {
    // A⁰ = A¹ = ξ and φ = c: F_{μν} = Θ⁻¹_{μν}, every covariant piece vanishes,
    // and the Slavnov piece is (c - 1)² Σ (Θ⁻¹)².
    for (dim, theta, m, c, alpha) in [(2, 1.0, 1.0, 0.3, 1.0), (4, 0.7, 1.5, -0.8, 1.4)] {
        let s = structure(dim, theta);
        let alg = GradedAlgebra::rescaled(&s, m, 1.0);
        let mut conn = GradedConnectionForm::zero(&alg, alpha).unwrap();
        for mu in 0..dim {
            conn.a0[mu] = MoyalElement::xi(&s, mu).unwrap();
            conn.a1[mu] = conn.a0[mu].clone();
            for nu in mu..dim {
                let xx = MoyalElement::xi(&s, mu).unwrap().pointwise(&MoyalElement::xi(&s, nu).unwrap()).unwrap();
                conn.set_g0(mu, nu, xx.scale_re(alg.s_m()));
            }
        }
        conn.phi = MoyalElement::constant(&s, C64::new(c, 0.0));
        let dens = conn.action_density(1e-12).unwrap();
        let k = 1.0 / (alpha * alpha);
        let inv2 = dim as f64 / (theta * theta);
        let sj = alg.s_j();
        let scalar = |e: &MoyalElement| e.as_scalar().expect("constant piece").re;
        assert!((scalar(&dens.yang_mills) - k * inv2).abs() < 1e-12);
        assert!(dens.anticommutator.max_norm() < 1e-12);
        assert!((scalar(&dens.slavnov) - k * (c - 1.0).powi(2) * inv2).abs() < 1e-12);
        assert!(dens.kinetic.max_norm() < 1e-12);
        assert!(dens.mixing.max_norm() < 1e-12);
        let pot = 4.0 * c.powi(4) - 8.0 * sj * c.powi(3) + 16.0 * sj * sj * c * c;
        assert!((scalar(&dens.potential) - k * pot).abs() < 1e-12);
        let total = k * inv2 * (1.0 + (c - 1.0).powi(2)) + k * pot;
        assert!((scalar(&dens.total) - total).abs() < 1e-12);
    }
}

#[test]
fn unrestricted_connections_have_no_density() {
    let mut r = rng(64);
    let s = structure(2, 1.0);
    let alg = GradedAlgebra::unscaled(&s);
    let conn = graded_connection(&mut r, &alg, 1.0).unwrap();
    assert!(conn.action_density(1e-12).is_err());
}

#[test]
fn graded_configs_and_names() {
    let text = r#"{ "D": 2, "theta": 1.0, "m": 2.0, "A0": { "1": "x2" }, "A1": { "1": "x2" }, "phi": "0.5" }"#;
    let conn = GradedConfig::from_json(text).unwrap().build().unwrap();
    assert!((conn.algebra().s_j() - 0.5).abs() < 1e-15);
    assert_eq!(conn.phi.as_scalar(), Some(C64::new(0.5, 0.0)));
    assert!(GradedConfig::from_json(r#"{ "D": 2, "theta": 1.0, "A0": { "3": "x1" } }"#)
        .and_then(|c| c.build())
        .is_err());
    for x in GradedAlgebra::unscaled(&structure(4, 1.0)).basis() {
        assert_eq!(GradedGenerator::from_name(&x.name(), 4).unwrap(), x);
    }
}
