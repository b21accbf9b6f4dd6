//! Extraction of the infrared coefficient c in
//! ω^{IR}_{μν} = c p̃_μp̃_ν/(p̃²)^{D/2} + ⋯ from small-momentum evaluations.
//!
//! The diagrams enter with the weights in [`IR_WEIGHTS`]: the symmetry factor
//! 1/2 for the gauge and Higgs bubbles, -1 for the ghost loop, and the
//! tadpoles with the normalisation that makes the quadratic UV pieces cancel.
//! With unit weights the leading p̃p̃ coefficient is (2D - 5/2 + 2N)Γ(D/2)/π^{D/2}
//! in D = 4; that value is reported alongside as `verbatim`.

use serde::Serialize;

use super::omega::weighted_nonplanar_sum;
use super::{LoopConfig, LoopResult, Method};
use crate::error::{Error, Result};

/// Weights of ω¹..ω⁵ in the polarisation tensor.
pub const IR_WEIGHTS: [f64; 5] = [0.5, -1.0, -0.5, 0.5, 1.0];

const UNIT_WEIGHTS: [f64; 5] = [1.0; 5];

/// (D + N - 2)Γ(D/2)/π^{D/2}.
pub fn ir_target(dim: usize, n_higgs: usize) -> f64 {
    let half = dim as f64 / 2.0;
    (dim as f64 + n_higgs as f64 - 2.0) * super::bessel::gamma_half_integer(half) / std::f64::consts::PI.powf(half)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IrPoint {
    pub ptilde_norm: f64,
    /// p̃p̃ coefficient times (p̃²)^{D/2}.
    pub c: f64,
    /// |δ coefficient| times (p̃²)^{D/2-1}: the non-transverse remainder
    /// relative to the leading p̃p̃ scale.
    pub transverse_residual: f64,
    /// Same as `c` with unit diagram weights.
    pub c_verbatim: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IrFit {
    /// c with abs_error the RMS fit residual.
    pub result: LoopResult,
    pub target: f64,
    pub verbatim: f64,
    pub points: Vec<IrPoint>,
    pub weights: [f64; 5],
}

impl IrFit {
    pub fn relative_error(&self) -> f64 {
        (self.result.value / self.target - 1.0).abs()
    }

    pub fn passes(&self, rel_tol: f64) -> bool {
        self.relative_error() <= rel_tol
    }

    /// True when the δ-residual shrinks strictly as |p̃| decreases.
    pub fn transverse_residual_decreasing(&self) -> bool {
        let mut pts: Vec<&IrPoint> = self.points.iter().collect();
        pts.sort_by(|a, b| a.ptilde_norm.total_cmp(&b.ptilde_norm));
        pts.windows(2)
            .all(|w| w[0].transverse_residual < w[1].transverse_residual)
    }
}

fn validate(cfg: &LoopConfig, norms: &[f64]) -> Result<()> {
    cfg.structure()?;
    if norms.len() < 4 {
        return Err(Error::InvalidInput(format!("need at least 4 momenta, got {}", norms.len())));
    }
    if norms.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
        return Err(Error::InvalidInput("every |ptilde| must be finite and positive".into()));
    }
    let lo = norms.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = norms.iter().cloned().fold(0.0, f64::max);
    if hi / lo < 10.0 * (1.0 - 1e-12) {
        return Err(Error::InvalidInput(format!("|ptilde| must span a decade, got [{lo}, {hi}]")));
    }
    let scale = if cfg.mu > 0.0 { cfg.mu } else { 1.0 };
    if hi * scale > 0.1 * (1.0 + 1e-12) {
        return Err(Error::InvalidInput(format!("|ptilde| mu must be <= 0.1, got {}", hi * scale)));
    }
    Ok(())
}

/// Fits c over momenta p = (|p̃|/θ)e₁, so that p̃ = |p̃|e₂.
pub fn ir_coefficient(cfg: &LoopConfig, ptilde_norms: &[f64]) -> Result<IrFit> {
    ir_coefficient_weighted(cfg, ptilde_norms, &IR_WEIGHTS)
}

pub fn ir_coefficient_weighted(cfg: &LoopConfig, ptilde_norms: &[f64], weights: &[f64; 5]) -> Result<IrFit> {
    validate(cfg, ptilde_norms)?;
    let d = cfg.dim;
    let half = d as i32 / 2;
    let mut points = Vec::with_capacity(ptilde_norms.len());
    for &r in ptilde_norms {
        let mut p = vec![0.0; d];
        p[0] = r / cfg.theta;
        let w = weighted_nonplanar_sum(cfg, &p, weights)?;
        let v = weighted_nonplanar_sum(cfg, &p, &UNIT_WEIGHTS)?;
        points.push(IrPoint {
            ptilde_norm: r,
            c: w.ptilde * r.powi(2 * half),
            transverse_residual: w.delta.abs() * r.powi(2 * half - 2),
            c_verbatim: v.ptilde * r.powi(2 * half),
        });
    }
    let n = points.len() as f64;
    let c = points.iter().map(|p| p.c).sum::<f64>() / n;
    let resid = (points.iter().map(|p| (p.c - c).powi(2)).sum::<f64>() / n).sqrt();
    let verbatim = points.iter().map(|p| p.c_verbatim).sum::<f64>() / n;
    Ok(IrFit {
        result: LoopResult {
            value: c,
            abs_error: resid,
            method: Method::SmallPFit,
        },
        target: ir_target(d, cfg.n_higgs),
        verbatim,
        points,
        weights: *weights,
    })
}

/// `count` values logarithmically spaced over [lo, hi].
pub fn log_window(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count < 2 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..count)
        .map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp())
        .collect()
}
