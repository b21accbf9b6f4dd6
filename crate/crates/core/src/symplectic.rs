//! The constant Poisson structure Θ = θΣ shared by every other module.
//!
//! Σ is block diagonal with blocks J = [[0, -1], [1, 0]], so Θ₁₂ = -θ and
//! [x₁, x₂]⋆ = iΘ₁₂ = -iθ. Indices are zero-based throughout the Rust API.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticStructure {
    dim: usize,
    theta: f64,
    theta_mat: Vec<f64>,
    theta_inv: Vec<f64>,
}

impl SymplecticStructure {
    pub fn new(dim: usize, theta: f64) -> Result<Self> {
        if dim == 0 || dim % 2 != 0 {
            return Err(Error::InvalidDimension(dim));
        }
        if !(theta.is_finite() && theta > 0.0) {
            return Err(Error::InvalidTheta(theta));
        }
        let mut theta_mat = vec![0.0; dim * dim];
        let mut theta_inv = vec![0.0; dim * dim];
        for b in 0..dim / 2 {
            let (i, j) = (2 * b, 2 * b + 1);
            theta_mat[i * dim + j] = -theta;
            theta_mat[j * dim + i] = theta;
            // (θJ)⁻¹ = -J/θ
            theta_inv[i * dim + j] = 1.0 / theta;
            theta_inv[j * dim + i] = -1.0 / theta;
        }
        Ok(Self {
            dim,
            theta,
            theta_mat,
            theta_inv,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// Θ_{μν}.
    pub fn big_theta(&self, mu: usize, nu: usize) -> f64 {
        self.theta_mat[mu * self.dim + nu]
    }

    /// Θ⁻¹_{μν}.
    pub fn theta_inv(&self, mu: usize, nu: usize) -> f64 {
        self.theta_inv[mu * self.dim + nu]
    }

    pub fn check_index(&self, mu: usize) -> Result<()> {
        if mu < self.dim {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange {
                index: mu,
                dim: self.dim,
            })
        }
    }

    pub fn check_len(&self, v: &[f64]) -> Result<()> {
        if v.len() == self.dim {
            Ok(())
        } else {
            Err(Error::LengthMismatch {
                got: v.len(),
                dim: self.dim,
            })
        }
    }

    /// p ∧ k = p_μ Θ_{μν} k_ν.
    pub fn wedge(&self, p: &[f64], k: &[f64]) -> Result<f64> {
        self.check_len(p)?;
        self.check_len(k)?;
        Ok(self.wedge_unchecked(p, k))
    }

    pub(crate) fn wedge_unchecked(&self, p: &[f64], k: &[f64]) -> f64 {
        let d = self.dim;
        let mut acc = 0.0;
        for mu in 0..d {
            if p[mu] == 0.0 {
                continue;
            }
            for nu in 0..d {
                acc += p[mu] * self.theta_mat[mu * d + nu] * k[nu];
            }
        }
        acc
    }

    /// p̃_μ = Θ_{μν} p_ν.
    pub fn tilde(&self, p: &[f64]) -> Result<Vec<f64>> {
        self.check_len(p)?;
        let d = self.dim;
        Ok((0..d)
            .map(|mu| (0..d).map(|nu| self.theta_mat[mu * d + nu] * p[nu]).sum())
            .collect())
    }

    /// One-paragraph statement of the conventions, printed at the top of reports.
    pub fn convention_sheet(&self) -> String {
        format!(
            "# conventions: D = {}, theta = {}, Theta = theta * blockdiag(J), J = [[0,-1],[1,0]]\n\
             # Theta_12 = -theta, [x_1, x_2]_star = i Theta_12, xi_mu = -ThetaInv_mu_nu x_nu\n\
             # wedge p^k = p_mu Theta_mu_nu k_nu, ptilde_mu = Theta_mu_nu p_nu\n",
            self.dim, self.theta
        )
    }
}
