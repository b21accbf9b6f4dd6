mod common;

use common::{radial_master, radial_master_tensor, rng};
use moyal_core::oneloop::bessel::{bessel_i, bessel_k};
use moyal_core::oneloop::master::{master_j_tensor_parts, script_m, script_m_small_argument};
use moyal_core::oneloop::omega::omega_nonplanar_parts;
use moyal_core::oneloop::{master_j, omega_integrand, LoopConfig};
use rand::Rng;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

// Reference values from an independent special-function library.
const K_TABLE: [(i32, f64, f64); 8] = [
    (0, 1e-3, 7.023688800562382),
    (1, 0.5, 1.6564411200033007),
    (2, 2.0, 0.2537597545660559),
    (3, 10.0, 2.7252700256598695e-05),
    (4, 50.0, 3.995284251717343e-23),
    (5, 0.1, 38376009.99583593),
    (0, 50.0, 3.4101677497894956e-23),
    (1, 0.001, 999.9962381560855),
];

#[test]
fn bessel_k_reference_values() {
    for (n, z, want) in K_TABLE {
        let got = bessel_k(n, z);
        assert!(rel(got, want) < 1e-12, "K_{n}({z}) = {got}, want {want}");
    }
}

#[test]
fn bessel_recurrence_and_wronskian() {
    for z in [1e-3, 0.1, 0.7, 1.9, 2.1, 5.0, 17.0, 40.0] {
        for n in 1..6 {
            let lhs = bessel_k(n + 1, z);
            let rhs = bessel_k(n - 1, z) + 2.0 * n as f64 / z * bessel_k(n, z);
            assert!(rel(lhs, rhs) < 1e-12, "recurrence n={n} z={z}");
        }
        for n in 0..4 {
            let w = bessel_i(n, z) * bessel_k(n + 1, z) + bessel_i(n + 1, z) * bessel_k(n, z);
            assert!(rel(w, 1.0 / z) < 1e-10, "Wronskian n={n} z={z}: {w}");
        }
    }
}

#[test]
fn scalar_master_integrals_match_radial_quadrature() {
    let mut r = rng(21);
    for _ in 0..20 {
        let dim = if r.gen_bool(0.5) { 2 } else { 4 };
        let n = r.gen_range(1..=3);
        let m = r.gen_range(0.5..2.0);
        let dist = r.gen_range(0.3..3.0);
        let got = master_j(n, dim, m, &{
            let mut p = vec![0.0; dim];
            p[dim - 1] = dist;
            p
        })
        .unwrap()
        .value;
        let want = radial_master(n, dim, m, dist);
        assert!(rel(got, want) < 1e-5, "J_{n} D={dim} m={m} r={dist}: {got} vs {want}");
    }
}

#[test]
fn tensor_master_integrals_match_radial_quadrature() {
    let mut r = rng(22);
    for _ in 0..20 {
        let dim = if r.gen_bool(0.5) { 2 } else { 4 };
        let n = r.gen_range(2..=3);
        let m = r.gen_range(0.5..2.0);
        let dist = r.gen_range(0.3..3.0);
        let (d, pp) = master_j_tensor_parts(n, dim, m, dist).unwrap();
        let (wd, wp) = radial_master_tensor(n, dim, m, dist);
        assert!(rel(d, wd) < 1e-5, "δ part N={n} D={dim} m={m} r={dist}: {d} vs {wd}");
        assert!(rel(pp, wp) < 1e-5, "p̃p̃ part N={n} D={dim} m={m} r={dist}: {pp} vs {wp}");
    }
}

#[test]
fn small_argument_law() {
    for q in [1u32, 2] {
        let r = 1e-3;
        let got = script_m(-(q as i32), 1.0, r).unwrap();
        let want = script_m_small_argument(q, r);
        assert!(rel(got, want) < 1e-2, "Q={q}: {got} vs {want}");
    }
}

#[test]
fn integrands_are_symmetric_under_loop_relabelling() {
    // k → -k - p swaps the two propagators of ω² and ω⁴ (up to p-terms in ω⁴
    // that cancel in v = p + 2k → -v).
    let cfg = LoopConfig::new(4, 0.9).unwrap().with_n_higgs(10);
    let mut r = rng(23);
    for _ in 0..20 {
        let p: Vec<f64> = (0..4).map(|_| r.gen_range(-1.0..1.0)).collect();
        let k: Vec<f64> = (0..4).map(|_| r.gen_range(-2.0..2.0)).collect();
        let k2: Vec<f64> = k.iter().zip(&p).map(|(a, b)| -a - b).collect();
        for i in [1u8, 4] {
            let a = omega_integrand(i, &k, &p, &cfg).unwrap();
            let b = omega_integrand(i, &k2, &p, &cfg).unwrap();
            assert!((&a - &b).amax() < 1e-12 * a.amax().max(1.0), "diagram {i}");
        }
    }
}

#[test]
fn tadpole_nonplanar_parts_match_radial_quadrature() {
    let cfg = LoopConfig::new(4, 1.0).unwrap().with_n_higgs(10).with_ir_regulator(0.0);
    for pt in [0.4, 1.1, 2.3] {
        let p = [0.0, pt, 0.0, 0.0];
        let got = omega_nonplanar_parts(5, &cfg, &p).unwrap().delta;
        // ∫ -4N δ sin²(p∧k/2)/(k²+μ²): the nonplanar piece is +2N J₁(p̃).
        let want = 2.0 * 10.0 * radial_master(1, 4, 1.0, pt);
        assert!(rel(got, want) < 1e-5, "|p̃| = {pt}: {got} vs {want}");
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

fn all_indices(dims: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for &d in dims {
        out = out
            .into_iter()
            .flat_map(|p: Vec<usize>| (0..d).map(move |i| [p.clone(), vec![i]].concat()))
            .collect();
    }
    out
}

#[test]
fn gauge_and_higgs_vertices_are_bose_symmetric() {
    use moyal_core::oneloop::vertices::{vertex_3g, vertex_4g, vertex_4h};
    use moyal_core::SymplecticStructure;
    let s = SymplecticStructure::new(4, 0.8).unwrap();
    let mut r = rng(24);
    let mom = |r: &mut rand_chacha::ChaCha8Rng| (0..4).map(|_| r.gen_range(-1.5..1.5)).collect::<Vec<f64>>();
    let (k1, k2, k3) = (mom(&mut r), mom(&mut r), mom(&mut r));
    let checks: Vec<(usize, Box<dyn Fn(&[Vec<f64>]) -> moyal_core::oneloop::vertices::VertexValue>)> = vec![
        (3, Box::new(|k: &[Vec<f64>]| vertex_3g(&s, &k[0], &k[1]).unwrap())),
        (4, Box::new(|k: &[Vec<f64>]| vertex_4g(&s, &k[0], &k[1], &k[2]).unwrap())),
        (4, Box::new(|k: &[Vec<f64>]| vertex_4h(&s, 3, &k[0], &k[1], &k[2]).unwrap())),
    ];
    for (legs, build) in checks {
        let base = build(&[k1.clone(), k2.clone(), k3.clone()]);
        let ks = base.momenta.clone();
        assert!(base.data.iter().any(|c| c.norm() > 1e-3));
        for perm in permutations(legs) {
            let pk: Vec<Vec<f64>> = perm.iter().map(|&i| ks[i].clone()).collect();
            let moved = build(&pk);
            for idx in all_indices(&base.dims) {
                let pidx: Vec<usize> = perm.iter().map(|&i| idx[i]).collect();
                let diff = (moved.get(&pidx).unwrap() - base.get(&idx).unwrap()).norm();
                assert!(diff < 1e-12, "{legs}-leg vertex, permutation {perm:?}");
            }
        }
    }
}

#[test]
fn infrared_coefficient_is_independent_of_theta() {
    use moyal_core::oneloop::ir::log_window;
    use moyal_core::oneloop::ir_coefficient;
    // θ enters only at subleading order in |p̃|; the spread is ~3e-6 on
    // [1e-2, 1e-1] and ~3e-10 one decade lower.
    let window = log_window(1e-3, 1e-2, 6);
    let fits: Vec<f64> = [0.5, 1.0, 2.0]
        .iter()
        .map(|&theta| {
            let cfg = LoopConfig::new(4, theta).unwrap().with_n_higgs(10);
            let fit = ir_coefficient(&cfg, &window).unwrap();
            assert!(fit.passes(0.02), "θ = {theta}: {}", fit.result.value);
            assert!(fit.transverse_residual_decreasing());
            fit.result.value
        })
        .collect();
    assert!(rel(fits[0], fits[1]) < 1e-8 && rel(fits[2], fits[1]) < 1e-8, "{fits:?}");
}
