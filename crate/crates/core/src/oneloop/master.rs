//! Master integrals
//! J_N(p̃) = ∫ d^Dk/(2π)^D e^{ik·p̃}/(k²+m²)^N = a_{N,D} 𝓜_{N-D/2}(m|p̃|) and
//! J_{N,μν}(p̃) = a_{N,D}(δ_{μν}𝓜_{N-1-D/2} - p̃_μp̃_ν𝓜_{N-2-D/2}).

use nalgebra::DMatrix;

use super::bessel::{factorial, zk};
use super::{LoopResult, Method, TensorResult};
use crate::error::{Error, Result};

/// a_{N,D} = 2^{-(D/2+N-1)} / (Γ(N) π^{D/2}).
pub fn a_coefficient(n: u32, dim: usize) -> f64 {
    let half = dim as f64 / 2.0;
    2f64.powf(-(half + n as f64 - 1.0)) / (factorial(n - 1) * std::f64::consts::PI.powf(half))
}

/// 𝓜_Q(m r) = m^{-2Q}(m r)^Q K_Q(m r), with r = |p̃|.
///
/// For Q ≤ 0 this is r^{2Q}·z^{|Q|}K_{|Q|}(z), finite as m → 0; for Q ≥ 0 it
/// diverges at m = 0.
pub fn script_m(q: i32, m: f64, r: f64) -> Result<f64> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::InvalidInput(format!("|ptilde| must be positive, got {r}")));
    }
    if !(m >= 0.0 && m.is_finite()) {
        return Err(Error::InvalidInput(format!("mass must be non-negative, got {m}")));
    }
    if q >= 0 && m == 0.0 {
        return Err(Error::InvalidInput(format!("M_{q} diverges at zero mass")));
    }
    let z = m * r;
    let r2q = r.powi(2 * q);
    if q <= 0 {
        Ok(r2q * zk(q.unsigned_abs(), z))
    } else {
        // z^{-Q}K_Q = zk / z^{2Q}
        Ok(r2q * zk(q as u32, z) / z.powi(2 * q))
    }
}

fn check(n: u32, dim: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidInput("propagator power N must be at least 1".into()));
    }
    if dim == 0 || dim % 2 != 0 {
        return Err(Error::InvalidDimension(dim));
    }
    Ok(())
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Closed-form J_N(p̃).
pub fn master_j(n: u32, dim: usize, m: f64, ptilde: &[f64]) -> Result<LoopResult> {
    check(n, dim)?;
    if ptilde.len() != dim {
        return Err(Error::LengthMismatch { got: ptilde.len(), dim });
    }
    let q = n as i32 - dim as i32 / 2;
    let value = a_coefficient(n, dim) * script_m(q, m, norm(ptilde))?;
    Ok(LoopResult {
        value,
        abs_error: value.abs() * 1e-12,
        method: Method::ClosedFormBessel,
    })
}

/// (δ-coefficient, p̃p̃-coefficient) of J_{N,μν}.
pub fn master_j_tensor_parts(n: u32, dim: usize, m: f64, r: f64) -> Result<(f64, f64)> {
    check(n, dim)?;
    let q = n as i32 - 1 - dim as i32 / 2;
    let a = a_coefficient(n, dim);
    Ok((a * script_m(q, m, r)?, -a * script_m(q - 1, m, r)?))
}

/// Closed-form J_{N,μν}(p̃).
pub fn master_j_tensor(n: u32, dim: usize, m: f64, ptilde: &[f64]) -> Result<TensorResult> {
    if ptilde.len() != dim {
        return Err(Error::LengthMismatch { got: ptilde.len(), dim });
    }
    let (delta, pp) = master_j_tensor_parts(n, dim, m, norm(ptilde))?;
    let value = DMatrix::from_fn(dim, dim, |i, j| {
        let d = if i == j { delta } else { 0.0 };
        d + pp * ptilde[i] * ptilde[j]
    });
    let abs_error = value.amax() * 1e-12;
    Ok(TensorResult {
        value,
        abs_error,
        method: Method::ClosedFormBessel,
    })
}

/// Leading small-|p̃| form 2^{Q-1}Γ(Q)/p̃^{2Q} of 𝓜_{-Q}, Q > 0.
pub fn script_m_small_argument(q: u32, r: f64) -> f64 {
    assert!(q > 0, "the small-argument law needs Q > 0");
    2f64.powi(q as i32 - 1) * factorial(q - 1) / r.powi(2 * q as i32)
}
