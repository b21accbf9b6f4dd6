//! JSON configuration files for connections and graded connections.
//!
//! ```json
//! { "D": 2, "theta": 1.0, "mu": 1.0, "alpha": 1.0, "basis": "G2",
//!   "components": { "d1": "x1 x2", "X12": "0.5 W[1,0] + 0.5 W[-1,0]" } }
//! ```
//!
//! The graded form replaces `basis`/`components` with `A0`, `A1` (keyed by a
//! one-based index), `G0` (keyed by two digits), `phi` and the scale `m`.
//! Missing components are zero.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Deserialize;

use crate::connections::{Basis, ConnectionForm};
use crate::derivations::Generator;
use crate::element::MoyalElement;
use crate::error::{Error, Result};
use crate::expr::parse_expression;
use crate::graded::{GradedAlgebra, GradedConnectionForm, GradedGenerator};
use crate::symplectic::SymplecticStructure;

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConnectionConfig {
    #[serde(rename = "D")]
    pub dim: usize,
    pub theta: f64,
    #[serde(default = "one")]
    pub mu: f64,
    #[serde(default = "one")]
    pub alpha: f64,
    #[serde(default = "default_basis")]
    pub basis: String,
    #[serde(default)]
    pub components: BTreeMap<String, String>,
}

fn default_basis() -> String {
    "G2".to_string()
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GradedConfig {
    #[serde(rename = "D")]
    pub dim: usize,
    pub theta: f64,
    #[serde(default = "one")]
    pub mu: f64,
    #[serde(default = "one")]
    pub m: f64,
    #[serde(default = "one")]
    pub alpha: f64,
    #[serde(rename = "A0", default)]
    pub a0: BTreeMap<String, String>,
    #[serde(rename = "A1", default)]
    pub a1: BTreeMap<String, String>,
    #[serde(rename = "G0", default)]
    pub g0: BTreeMap<String, String>,
    #[serde(default)]
    pub phi: Option<String>,
}

fn parse_json<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("config: {e}")))
}

fn parse_component(name: &str, text: &str, s: &Arc<SymplecticStructure>) -> Result<MoyalElement> {
    parse_expression(text, s).map_err(|e| Error::InvalidInput(format!("component {name}: {e}")))
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("{name} must be positive, got {v}")))
    }
}

impl ConnectionConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        parse_json(text)
    }

    pub fn structure(&self) -> Result<Arc<SymplecticStructure>> {
        Ok(Arc::new(SymplecticStructure::new(self.dim, self.theta)?))
    }

    pub fn basis(&self) -> Result<Basis> {
        match self.basis.as_str() {
            "G1" => Ok(Basis::G1),
            "G2" => Ok(Basis::G2),
            other => Err(Error::InvalidInput(format!("basis must be G1 or G2, got '{other}'"))),
        }
    }

    pub fn build(&self) -> Result<ConnectionForm> {
        positive("mu", self.mu)?;
        positive("alpha", self.alpha)?;
        let s = self.structure()?;
        let mut form = ConnectionForm::zero(&s, self.basis()?, self.mu, self.alpha)?;
        for (name, text) in &self.components {
            let g = Generator::from_name(name, self.dim)?;
            if matches!(g, Generator::Sym(..)) && form.basis() == Basis::G1 {
                return Err(Error::InvalidInput(format!("{name} is not in the G1 basis")));
            }
            form.set_component(&g, parse_component(name, text, &s)?)?;
        }
        Ok(form)
    }
}

impl GradedConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        parse_json(text)
    }

    pub fn build(&self) -> Result<GradedConnectionForm> {
        positive("mu", self.mu)?;
        positive("m", self.m)?;
        let s = Arc::new(SymplecticStructure::new(self.dim, self.theta)?);
        let alg = GradedAlgebra::rescaled(&s, self.m, self.mu);
        let mut form = GradedConnectionForm::zero(&alg, self.alpha)?;
        for (key, text) in &self.a0 {
            let GradedGenerator::T(m) = GradedGenerator::from_name(&format!("T{key}"), self.dim)? else {
                unreachable!("T-prefixed names parse to T")
            };
            form.a0[m] = parse_component(&format!("A0.{key}"), text, &s)?;
        }
        for (key, text) in &self.a1 {
            let GradedGenerator::U(m) = GradedGenerator::from_name(&format!("U{key}"), self.dim)? else {
                unreachable!("U-prefixed names parse to U")
            };
            form.a1[m] = parse_component(&format!("A1.{key}"), text, &s)?;
        }
        for (key, text) in &self.g0 {
            let GradedGenerator::M(m, n) = GradedGenerator::from_name(&format!("M{key}"), self.dim)? else {
                unreachable!("M-prefixed names parse to M")
            };
            form.set_g0(m, n, parse_component(&format!("G0.{key}"), text, &s)?);
        }
        if let Some(text) = &self.phi {
            form.phi = parse_component("phi", text, &s)?;
        }
        Ok(form)
    }
}
