//! The five vacuum-polarisation integrands ω¹..ω⁵ and their nonplanar parts.
//!
//! Nonplanar parts replace sin²(p∧k/2) by -cos(p∧k)/2, combine propagators
//! with 1/(ab) = ∫₀¹dx (xa + (1-x)b)⁻², shift k → l - xp and reduce to the
//! master integrals with p̃ = Θp. Terms odd in l drop out. Every propagator
//! mass squared receives the regulator λ².

use nalgebra::DMatrix;

use super::master::{a_coefficient, script_m};
use super::quadrature::{integrate, Tolerance};
use super::{LoopConfig, Method, TensorResult};
use crate::error::{Error, Result};

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// The integrand of ω^i_{μν} under ∫d^Dk/(2π)^D, as a real D×D matrix.
pub fn omega_integrand(i: u8, k: &[f64], p: &[f64], cfg: &LoopConfig) -> Result<DMatrix<f64>> {
    let s = cfg.structure()?;
    let d = cfg.dim;
    s.check_len(k)?;
    s.check_len(p)?;
    let sin2 = (0.5 * s.wedge_unchecked(p, k)).sin().powi(2);
    let pk: Vec<f64> = p.iter().zip(k).map(|(a, b)| a + b).collect();
    let k2 = dot(k, k);
    let pk2 = dot(&pk, &pk);
    let df = d as f64;
    let n = cfg.n_higgs as f64;
    let mu2 = cfg.mu * cfg.mu;
    let delta = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
    let m = match i {
        1 => {
            let kmp: Vec<f64> = k.iter().zip(p).map(|(a, b)| a - b).collect();
            let k2p: Vec<f64> = k.iter().zip(p).map(|(a, b)| a + 2.0 * b).collect();
            let diag = dot(&kmp, &kmp) + dot(&k2p, &k2p);
            let pref = 4.0 * sin2 / (k2 * pk2);
            DMatrix::from_fn(d, d, |a, b| {
                pref * (diag * delta(a, b)
                    + (df - 6.0) * p[a] * p[b]
                    + (p[a] * k[b] + k[a] * p[b]) * (2.0 * df - 3.0)
                    + k[a] * k[b] * (4.0 * df - 6.0))
            })
        }
        2 => {
            let pref = 4.0 * sin2 / (k2 * pk2);
            DMatrix::from_fn(d, d, |a, b| pref * k[a] * k[b])
        }
        3 => DMatrix::from_fn(d, d, |a, b| 8.0 * (df - 1.0) * delta(a, b) * sin2 / k2),
        4 => {
            let pref = 4.0 * n * sin2 / ((k2 + mu2) * (pk2 + mu2));
            let v: Vec<f64> = p.iter().zip(k).map(|(a, b)| a + 2.0 * b).collect();
            DMatrix::from_fn(d, d, |a, b| pref * v[a] * v[b])
        }
        5 => DMatrix::from_fn(d, d, |a, b| -4.0 * n * delta(a, b) * sin2 / (k2 + mu2)),
        _ => return Err(Error::InvalidInput(format!("diagram index must be 1..5, got {i}"))),
    };
    Ok(m)
}

/// Nonplanar ω^i_{μν} = δ_{μν}·delta + p̃_μp̃_ν·ptilde + p_μp_ν·p.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NonplanarParts {
    pub delta: f64,
    pub ptilde: f64,
    pub p: f64,
    /// Bound on the quadrature error of any coefficient, in the same units.
    pub abs_error: f64,
}

impl NonplanarParts {
    pub fn tensor(&self, p: &[f64], ptilde: &[f64]) -> DMatrix<f64> {
        let d = p.len();
        DMatrix::from_fn(d, d, |a, b| {
            let dl = if a == b { self.delta } else { 0.0 };
            dl + self.ptilde * ptilde[a] * ptilde[b] + self.p * p[a] * p[b]
        })
    }

    fn scaled(&self, w: f64) -> Self {
        Self {
            delta: w * self.delta,
            ptilde: w * self.ptilde,
            p: w * self.p,
            abs_error: w.abs() * self.abs_error,
        }
    }

    fn add(&self, o: &Self) -> Self {
        Self {
            delta: self.delta + o.delta,
            ptilde: self.ptilde + o.ptilde,
            p: self.p + o.p,
            abs_error: self.abs_error + o.abs_error,
        }
    }
}

/// S = J₂, T = J_{2,μν} = T_δ δ + T_p̃ p̃p̃ and J₁ at mass m, distance r.
struct Masters {
    s: f64,
    t_delta: f64,
    t_ptilde: f64,
}

fn masters_2(dim: usize, m: f64, r: f64) -> Result<Masters> {
    let h = dim as i32 / 2;
    let a2 = a_coefficient(2, dim);
    Ok(Masters {
        s: a2 * script_m(2 - h, m, r)?,
        t_delta: a2 * script_m(1 - h, m, r)?,
        t_ptilde: -a2 * script_m(-h, m, r)?,
    })
}

fn master_1(dim: usize, m: f64, r: f64) -> Result<f64> {
    Ok(a_coefficient(1, dim) * script_m(1 - dim as i32 / 2, m, r)?)
}

/// Nonplanar coefficients of ω^i at external momentum p, verbatim prefactors.
pub fn omega_nonplanar_parts(i: u8, cfg: &LoopConfig, p: &[f64]) -> Result<NonplanarParts> {
    let s = cfg.structure()?;
    s.check_len(p)?;
    let pt = s.tilde(p)?;
    let r = dot(&pt, &pt).sqrt();
    if r == 0.0 {
        return Err(Error::InvalidInput("nonplanar parts need p~ != 0".into()));
    }
    let d = cfg.dim;
    let df = d as f64;
    let p2 = dot(p, p);
    let n = cfg.n_higgs as f64;
    let lam2 = cfg.ir_regulator * cfg.ir_regulator;
    let mu2 = cfg.mu * cfg.mu;
    match i {
        3 => {
            let j1 = master_1(d, lam2.sqrt(), r)?;
            return Ok(NonplanarParts {
                delta: -4.0 * (df - 1.0) * j1,
                ptilde: 0.0,
                p: 0.0,
                abs_error: 0.0,
            });
        }
        5 => {
            let j1 = master_1(d, (mu2 + lam2).sqrt(), r)?;
            return Ok(NonplanarParts {
                delta: 2.0 * n * j1,
                ptilde: 0.0,
                p: 0.0,
                abs_error: 0.0,
            });
        }
        1 | 2 | 4 => {}
        _ => return Err(Error::InvalidInput(format!("diagram index must be 1..5, got {i}"))),
    }
    // Integrate (p̃²)^{D/2} × coefficients so the leading p̃p̃ part is O(1).
    let norm = r.powi(d as i32);
    let integrand = |x: f64| -> Vec<f64> {
        let xm = x * (1.0 - x) * p2;
        let m2 = if i == 4 { mu2 + xm + lam2 } else { xm + lam2 };
        let mm = match masters_2(d, m2.sqrt(), r) {
            Ok(v) => v,
            Err(_) => return vec![f64::NAN; 3],
        };
        let tr_t = df * mm.t_delta + r * r * mm.t_ptilde;
        let (a, b, c) = match i {
            1 => (
                -2.0 * (2.0 * tr_t + (2.0 * x * x - 2.0 * x + 5.0) * p2 * mm.s + (4.0 * df - 6.0) * mm.t_delta),
                -2.0 * (4.0 * df - 6.0) * mm.t_ptilde,
                -2.0 * ((df - 6.0) - 2.0 * x * (2.0 * df - 3.0) + x * x * (4.0 * df - 6.0)) * mm.s,
            ),
            2 => (-2.0 * mm.t_delta, -2.0 * mm.t_ptilde, -2.0 * x * x * mm.s),
            _ => (
                -2.0 * n * 4.0 * mm.t_delta,
                -2.0 * n * 4.0 * mm.t_ptilde,
                -2.0 * n * (1.0 - 2.0 * x).powi(2) * mm.s,
            ),
        };
        vec![a * norm, b * norm, c * norm]
    };
    let q = integrate(integrand, 0.0, 1.0, Tolerance::default())?;
    if q.value.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numerical(format!("non-finite nonplanar integral for diagram {i}")));
    }
    let err = q.abs_error.iter().cloned().fold(0.0, f64::max) / norm;
    Ok(NonplanarParts {
        delta: q.value[0] / norm,
        ptilde: q.value[1] / norm,
        p: q.value[2] / norm,
        abs_error: err,
    })
}

/// Nonplanar ω^i_{μν}(p) as a tensor.
pub fn omega_nonplanar(i: u8, cfg: &LoopConfig, p: &[f64]) -> Result<TensorResult> {
    let parts = omega_nonplanar_parts(i, cfg, p)?;
    let pt = cfg.structure()?.tilde(p)?;
    Ok(TensorResult {
        value: parts.tensor(p, &pt),
        abs_error: parts.abs_error * (1.0 + dot(&pt, &pt) + dot(p, p)),
        method: Method::ClosedFormBessel,
    })
}

/// Σ w_i ω^i, nonplanar parts.
pub fn weighted_nonplanar_sum(cfg: &LoopConfig, p: &[f64], weights: &[f64; 5]) -> Result<NonplanarParts> {
    let mut total = NonplanarParts {
        delta: 0.0,
        ptilde: 0.0,
        p: 0.0,
        abs_error: 0.0,
    };
    for (idx, w) in weights.iter().enumerate() {
        if *w == 0.0 {
            continue;
        }
        let part = omega_nonplanar_parts(idx as u8 + 1, cfg, p)?;
        total = total.add(&part.scaled(*w));
    }
    Ok(total)
}
