//! One-loop vacuum polarisation of the gauge/Higgs model and its infrared limit.
//!
//! Euclidean throughout. Only the nonplanar (phase-carrying) parts of the
//! five diagrams are evaluated; the planar parts are UV divergent and play no
//! role in the infrared coefficient.

pub mod bessel;
pub mod ir;
pub mod master;
pub mod omega;
pub mod quadrature;
pub mod vertices;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::symplectic::SymplecticStructure;

pub use ir::{ir_coefficient, ir_coefficient_weighted, ir_target, IrFit, IrPoint, IR_WEIGHTS};
pub use master::{master_j, master_j_tensor};
pub use omega::{omega_integrand, omega_nonplanar, omega_nonplanar_parts, NonplanarParts};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ClosedFormBessel,
    QuadratureOracle,
    SmallPFit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LoopResult {
    pub value: f64,
    pub abs_error: f64,
    pub method: Method,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TensorResult {
    pub value: DMatrix<f64>,
    pub abs_error: f64,
    pub method: Method,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LoopConfig {
    pub dim: usize,
    pub theta: f64,
    /// Number of Higgs fields; D(D+1)/2 matches the symplectic generators.
    pub n_higgs: usize,
    /// Higgs propagator mass.
    pub mu: f64,
    /// λ added in quadrature to every propagator mass; keeps the massless
    /// Feynman-parameter endpoints finite.
    pub ir_regulator: f64,
}

impl LoopConfig {
    pub fn new(dim: usize, theta: f64) -> Result<Self> {
        SymplecticStructure::new(dim, theta)?;
        Ok(Self {
            dim,
            theta,
            n_higgs: dim * (dim + 1) / 2,
            mu: 1.0,
            ir_regulator: 1e-6,
        })
    }

    pub fn with_n_higgs(mut self, n: usize) -> Self {
        self.n_higgs = n;
        self
    }

    pub fn with_mu(mut self, mu: f64) -> Self {
        self.mu = mu;
        self
    }

    pub fn with_ir_regulator(mut self, lambda: f64) -> Self {
        self.ir_regulator = lambda;
        self
    }

    pub fn structure(&self) -> Result<SymplecticStructure> {
        if !(self.mu >= 0.0 && self.mu.is_finite()) {
            return Err(Error::InvalidInput(format!("mu must be finite and >= 0, got {}", self.mu)));
        }
        if !(self.ir_regulator >= 0.0 && self.ir_regulator.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "IR regulator must be finite and >= 0, got {}",
                self.ir_regulator
            )));
        }
        SymplecticStructure::new(self.dim, self.theta)
    }
}
