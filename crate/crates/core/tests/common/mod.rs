//! Test-side oracles that share no code with the library's evaluation paths.
//!
//! * `gaussian_star`: the star product as a regulated oscillatory integral,
//!   evaluated through complex Gaussian moments and extrapolated to zero
//!   regulator.
//! * `series_star`: the bidifferential series on a private sparse polynomial
//!   type, brute-forcing every index tuple.
//! * `radial_*`: master integrals as one-dimensional Hankel-type integrals,
//!   summed period by period and accelerated with Wynn's epsilon.
#![allow(dead_code)]

use std::collections::BTreeMap;
use std::f64::consts::PI;

use moyal_core::{SymplecticStructure, Term, C64};
use nalgebra::{DMatrix, SymmetricEigen};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

// ---------------------------------------------------------------------------
// Star product as a Gaussian-regulated integral.

/// Θ⁻¹ as a dense matrix, built from Θ rather than from the library inverse.
fn theta_inverse(s: &SymplecticStructure) -> DMatrix<f64> {
    let d = s.dim();
    let t = DMatrix::from_fn(d, d, |i, j| s.big_theta(i, j));
    t.try_inverse().expect("Θ is invertible")
}

/// E[Π u_i] for a Gaussian vector u with mean `mean` and covariance `cov`,
/// by the recursion E[u_a R] = m_a E[R] + Σ_j C_aj E[R∖j].
fn moment(idx: &[usize], mean: &[C64], cov: &DMatrix<C64>) -> C64 {
    let Some((&a, rest)) = idx.split_first() else {
        return C64::new(1.0, 0.0);
    };
    let mut total = mean[a] * moment(rest, mean, cov);
    for j in 0..rest.len() {
        let mut r = rest.to_vec();
        let b = r.remove(j);
        total += cov[(a, b)] * moment(&r, mean, cov);
    }
    total
}

/// (t1⋆t2)(x) from 1/(πθ)^D ∫d^Dy d^Dz t1(x+y) t2(x+z) e^{-2i yΘ⁻¹z}
/// with the damping e^{-ε(y²+z²)}.
pub fn gaussian_star_regulated(s: &SymplecticStructure, t1: &Term, t2: &Term, x: &[f64], eps: f64) -> C64 {
    let d = s.dim();
    let n = 2 * d;
    let ti = theta_inverse(s);
    // Exponent -½ wᵀ(2ε + iS)w + bᵀw with w = (y, z).
    let mut sm = DMatrix::zeros(n, n);
    for i in 0..d {
        for j in 0..d {
            sm[(i, d + j)] = 2.0 * ti[(i, j)];
            sm[(d + j, i)] = 2.0 * ti[(i, j)];
        }
    }
    let eig = SymmetricEigen::new(sm);
    let lam: Vec<C64> = eig.eigenvalues.iter().map(|&l| C64::new(2.0 * eps, l)).collect();
    let v = eig.eigenvectors.map(|r| C64::new(r, 0.0));
    let inv_diag = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(n, lam.iter().map(|l| l.inv())));
    let cov = &v * inv_diag * v.transpose();
    let b: Vec<C64> = t1.k.iter().chain(&t2.k).map(|&k| C64::new(0.0, k)).collect();
    let bv = nalgebra::DVector::from_vec(b.clone());
    let mean_w = &cov * &bv;
    let half_bab = 0.5 * (bv.transpose() * &mean_w)[(0, 0)];
    let det_inv_sqrt = lam.iter().fold(C64::new(1.0, 0.0), |acc, l| acc / l.sqrt());
    let gauss = (2.0 * PI).powi(d as i32) * det_inv_sqrt * half_bab.exp();

    // Shifted variables u = x + w: mean x + A⁻¹b, same covariance.
    let mean: Vec<C64> = (0..n).map(|i| mean_w[i] + x[i % d]).collect();
    let mut idx = Vec::new();
    for (mu, &p) in t1.alpha.iter().enumerate() {
        idx.extend(std::iter::repeat(mu).take(p as usize));
    }
    for (mu, &p) in t2.alpha.iter().enumerate() {
        idx.extend(std::iter::repeat(d + mu).take(p as usize));
    }
    let poly = moment(&idx, &mean, &cov);
    let kx: f64 = t1.k.iter().zip(&t2.k).zip(x).map(|((a, b), xx)| (a + b) * xx).sum();
    let pref = 1.0 / (PI * s.theta()).powi(d as i32);
    t1.coeff * t2.coeff * C64::from_polar(1.0, kx) * gauss * poly * pref
}

/// ε → 0 limit by Richardson extrapolation over ε₀/2^j.
pub fn gaussian_star(s: &SymplecticStructure, t1: &Term, t2: &Term, x: &[f64]) -> C64 {
    let levels = 7;
    let eps0 = 0.02;
    let mut table: Vec<C64> = (0..levels)
        .map(|j| gaussian_star_regulated(s, t1, t2, x, eps0 / 2f64.powi(j)))
        .collect();
    for order in 1..levels {
        let f = 2f64.powi(order as i32);
        table = table.windows(2).map(|w| (w[1] * f - w[0]) / (f - 1.0)).collect();
    }
    table[0]
}

// ---------------------------------------------------------------------------
// Bidifferential series on a private polynomial type.

pub type Poly = BTreeMap<Vec<u32>, C64>;

pub fn poly_from_terms(terms: &[Term]) -> Poly {
    let mut p = Poly::new();
    for t in terms {
        assert!(t.k.iter().all(|&k| k == 0.0), "polynomial terms only");
        *p.entry(t.alpha.clone()).or_insert(C64::new(0.0, 0.0)) += t.coeff;
    }
    p
}

fn poly_derivative(p: &Poly, mu: usize) -> Poly {
    let mut out = Poly::new();
    for (a, c) in p {
        if a[mu] > 0 {
            let mut b = a.clone();
            b[mu] -= 1;
            *out.entry(b).or_insert(C64::new(0.0, 0.0)) += c * a[mu] as f64;
        }
    }
    out
}

fn poly_mul(p: &Poly, q: &Poly) -> Poly {
    let mut out = Poly::new();
    for (a, c) in p {
        for (b, e) in q {
            let ab: Vec<u32> = a.iter().zip(b).map(|(x, y)| x + y).collect();
            *out.entry(ab).or_insert(C64::new(0.0, 0.0)) += c * e;
        }
    }
    out
}

fn poly_degree(p: &Poly) -> u32 {
    p.keys().map(|a| a.iter().sum()).max().unwrap_or(0)
}

/// Σ_n (1/n!) (i/2)^n Θ^{μ₁ν₁}⋯Θ^{μₙνₙ} ∂_{μ₁⋯μₙ}a ∂_{ν₁⋯νₙ}b, every index
/// tuple enumerated separately.
pub fn series_star(s: &SymplecticStructure, a: &Poly, b: &Poly) -> Poly {
    let d = s.dim();
    let top = poly_degree(a).min(poly_degree(b)) as usize;
    let mut out = Poly::new();
    let mut fact = 1.0;
    for n in 0..=top {
        if n > 0 {
            fact *= n as f64;
        }
        let pref = C64::new(0.0, 0.5).powi(n as i32) / fact;
        let count = d.pow(2 * n as u32);
        for code in 0..count {
            let mut c = code;
            let mut mus = Vec::with_capacity(n);
            let mut nus = Vec::with_capacity(n);
            let mut weight = 1.0;
            for _ in 0..n {
                let m = c % d;
                c /= d;
                let v = c % d;
                c /= d;
                weight *= s.big_theta(m, v);
                mus.push(m);
                nus.push(v);
            }
            if weight == 0.0 {
                continue;
            }
            let mut da = a.clone();
            for &m in &mus {
                da = poly_derivative(&da, m);
            }
            let mut db = b.clone();
            for &v in &nus {
                db = poly_derivative(&db, v);
            }
            for (k, v) in poly_mul(&da, &db) {
                *out.entry(k).or_insert(C64::new(0.0, 0.0)) += v * pref * weight;
            }
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Radial quadrature for the master integrals.

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

/// f_n(x) = J_n(x)/xⁿ for integer n ≥ 0.
pub fn bessel_j_scaled(n: u32, x: f64) -> f64 {
    if x < 4.0 {
        // Σ (-1)^j (x/2)^{2j} / (2ⁿ j! (j+n)!)
        let q = -0.25 * x * x;
        let mut term = 1.0 / (2f64.powi(n as i32) * factorial(n));
        let mut sum = term;
        for j in 1..60 {
            term *= q / (j as f64 * (j + n) as f64);
            sum += term;
            if term.abs() < 1e-18 * sum.abs() {
                break;
            }
        }
        sum
    } else {
        // J_n(x) = (1/2π)∫₀^{2π} cos(nτ - x sin τ)dτ; the periodic trapezoid
        // rule is spectrally accurate once M exceeds x + n by a margin.
        let m = (2.0 * (x + n as f64)) as usize + 64;
        let h = 2.0 * PI / m as f64;
        let s: f64 = (0..m)
            .map(|j| {
                let t = j as f64 * h;
                (n as f64 * t - x * t.sin()).cos()
            })
            .sum();
        s / m as f64 / x.powi(n as i32)
    }
}

/// Gauss-Legendre nodes and weights on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

/// Limit of a sequence of partial sums by Wynn's epsilon algorithm. Returns
/// the even-column estimate that agrees best with its predecessor.
pub fn wynn(sums: &[f64]) -> f64 {
    let mut prev = vec![0.0; sums.len() + 1];
    let mut cur = sums.to_vec();
    let mut best = *sums.last().unwrap();
    let mut best_gap = f64::INFINITY;
    let mut last_even = best;
    let mut col = 0;
    while cur.len() > 1 {
        let mut next = Vec::with_capacity(cur.len() - 1);
        for j in 0..cur.len() - 1 {
            let diff = cur[j + 1] - cur[j];
            if diff == 0.0 {
                return *cur.last().unwrap();
            }
            next.push(prev[j + 1] + 1.0 / diff);
        }
        col += 1;
        prev = cur;
        cur = next;
        if col % 2 == 0 {
            let est = *cur.last().unwrap();
            let gap = (est - last_even).abs();
            if gap < best_gap {
                best_gap = gap;
                best = est;
            }
            last_even = est;
        }
    }
    best
}

/// ∫₀^∞ g(k) dk where g oscillates with half-period π/r.
fn oscillatory_integral(g: impl Fn(f64) -> f64, r: f64) -> f64 {
    let (nodes, weights) = gauss_legendre(32);
    let half = PI / r;
    let mut partial = Vec::new();
    let mut acc = 0.0;
    for block in 0..48 {
        for sub in 0..2 {
            let a = block as f64 * half + sub as f64 * half / 2.0;
            let b = a + half / 2.0;
            let (c, h) = (0.5 * (a + b), 0.5 * (b - a));
            acc += nodes.iter().zip(&weights).map(|(x, w)| w * g(c + h * x)).sum::<f64>() * h;
        }
        partial.push(acc);
    }
    wynn(&partial[8..])
}

/// J_N = (2π)^{-D/2} ∫ k^{D-1} f_ν(k r)/(k²+m²)^N dk, ν = D/2 - 1.
pub fn radial_master(n: u32, dim: usize, m: f64, r: f64) -> f64 {
    let nu = dim as u32 / 2 - 1;
    let g = |k: f64| k.powi(dim as i32 - 1) * bessel_j_scaled(nu, k * r) / (k * k + m * m).powi(n as i32);
    (2.0 * PI).powf(-(dim as f64) / 2.0) * oscillatory_integral(g, r)
}

/// (δ, p̃p̃) coefficients of J_{N,μν}, from -∂_μ∂_ν of the scalar kernel.
pub fn radial_master_tensor(n: u32, dim: usize, m: f64, r: f64) -> (f64, f64) {
    let nu = dim as u32 / 2 - 1;
    let den = |k: f64| (k * k + m * m).powi(n as i32);
    let gd = |k: f64| k.powi(dim as i32 + 1) * bessel_j_scaled(nu + 1, k * r) / den(k);
    let gp = |k: f64| -k.powi(dim as i32 + 3) * bessel_j_scaled(nu + 2, k * r) / den(k);
    let c = (2.0 * PI).powf(-(dim as f64) / 2.0);
    (c * oscillatory_integral(gd, r), c * oscillatory_integral(gp, r))
}
