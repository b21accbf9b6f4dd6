//! Feynman-rule vertex functions with all momenta incoming.
//!
//! Each function takes all but the last momentum; the last is fixed by
//! conservation, Σ k_i = 0.

use crate::element::C64;
use crate::error::{Error, Result};
use crate::symplectic::SymplecticStructure;

/// A dense complex tensor with row-major indexing.
#[derive(Debug, Clone, PartialEq)]
pub struct VertexValue {
    pub dims: Vec<usize>,
    pub data: Vec<C64>,
    /// All legs, including the one fixed by conservation.
    pub momenta: Vec<Vec<f64>>,
}

impl VertexValue {
    fn build(dims: Vec<usize>, momenta: Vec<Vec<f64>>, mut f: impl FnMut(&[usize]) -> C64) -> Self {
        let total: usize = dims.iter().product();
        let mut data = Vec::with_capacity(total);
        let mut idx = vec![0usize; dims.len()];
        for _ in 0..total {
            data.push(f(&idx));
            for pos in (0..dims.len()).rev() {
                idx[pos] += 1;
                if idx[pos] < dims[pos] {
                    break;
                }
                idx[pos] = 0;
            }
        }
        Self { dims, data, momenta }
    }

    pub fn get(&self, idx: &[usize]) -> Result<C64> {
        if idx.len() != self.dims.len() {
            return Err(Error::LengthMismatch {
                got: idx.len(),
                dim: self.dims.len(),
            });
        }
        let mut flat = 0;
        for (i, (&k, &n)) in idx.iter().zip(&self.dims).enumerate() {
            if k >= n {
                return Err(Error::IndexOutOfRange { index: k, dim: self.dims[i] });
            }
            flat = flat * n + k;
        }
        Ok(self.data[flat])
    }

    /// Largest entrywise modulus difference.
    pub fn max_distance(&self, other: &Self) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

fn close(s: &SymplecticStructure, given: &[&[f64]]) -> Result<Vec<Vec<f64>>> {
    let d = s.dim();
    let mut last = vec![0.0; d];
    let mut out = Vec::with_capacity(given.len() + 1);
    for k in given {
        s.check_len(k)?;
        for (l, v) in last.iter_mut().zip(k.iter()) {
            *l -= v;
        }
        out.push(k.to_vec());
    }
    out.push(last);
    Ok(out)
}

fn delta(a: usize, b: usize) -> f64 {
    if a == b {
        1.0
    } else {
        0.0
    }
}

fn half_sin(s: &SymplecticStructure, p: &[f64], k: &[f64]) -> f64 {
    (0.5 * s.wedge_unchecked(p, k)).sin()
}

fn half_cos(s: &SymplecticStructure, p: &[f64], k: &[f64]) -> f64 {
    (0.5 * s.wedge_unchecked(p, k)).cos()
}

/// V³_{αβγ}(k₁,k₂,k₃) = -2i sin(k₁∧k₂/2)[(k₂-k₁)_γδ_{αβ} + (k₁-k₃)_βδ_{αγ} + (k₃-k₂)_αδ_{βγ}].
pub fn vertex_3g(s: &SymplecticStructure, k1: &[f64], k2: &[f64]) -> Result<VertexValue> {
    let ks = close(s, &[k1, k2])?;
    let d = s.dim();
    let pref = C64::new(0.0, -2.0 * half_sin(s, &ks[0], &ks[1]));
    Ok(VertexValue::build(vec![d, d, d], ks.clone(), |i| {
        let (a, b, g) = (i[0], i[1], i[2]);
        let v = (ks[1][g] - ks[0][g]) * delta(a, b)
            + (ks[0][b] - ks[2][b]) * delta(a, g)
            + (ks[2][a] - ks[1][a]) * delta(b, g);
        pref * v
    }))
}

/// The antisymmetric four-point sin·sin structure shared by V⁴ and V^H_{abcd}.
fn quartic(s: &SymplecticStructure, ks: &[Vec<f64>], i: &[usize], sign: f64) -> C64 {
    let (a, b, c, d) = (i[0], i[1], i[2], i[3]);
    let sn = |x: usize, y: usize| half_sin(s, &ks[x], &ks[y]);
    let v = (delta(a, c) * delta(b, d) - delta(a, d) * delta(b, c)) * sn(0, 1) * sn(2, 3)
        + (delta(a, b) * delta(c, d) - delta(a, c) * delta(b, d)) * sn(0, 3) * sn(1, 2)
        + (delta(a, d) * delta(b, c) - delta(a, b) * delta(c, d)) * sn(2, 0) * sn(1, 3);
    C64::new(sign * 4.0 * v, 0.0)
}

/// V⁴_{αβγδ}(k₁..k₄) with overall factor -4.
pub fn vertex_4g(s: &SymplecticStructure, k1: &[f64], k2: &[f64], k3: &[f64]) -> Result<VertexValue> {
    let ks = close(s, &[k1, k2, k3])?;
    let d = s.dim();
    Ok(VertexValue::build(vec![d; 4], ks.clone(), |i| quartic(s, &ks, i, -1.0)))
}

/// V^g_μ(k₁,k₂,k₃) = 2i k_{1μ} sin(k₂∧k₃/2).
pub fn vertex_ghost(s: &SymplecticStructure, k1: &[f64], k2: &[f64]) -> Result<VertexValue> {
    let ks = close(s, &[k1, k2])?;
    let sn = half_sin(s, &ks[1], &ks[2]);
    Ok(VertexValue::build(vec![s.dim()], ks.clone(), |i| {
        C64::new(0.0, 2.0 * ks[0][i[0]] * sn)
    }))
}

/// V^H_{abμ}(k₁,k₂,k₃) = iδ_{ab}(k₁-k₂)_μ sin(k₂∧k₃/2).
pub fn vertex_gauge_higgs(s: &SymplecticStructure, n_higgs: usize, k1: &[f64], k2: &[f64]) -> Result<VertexValue> {
    let ks = close(s, &[k1, k2])?;
    let sn = half_sin(s, &ks[1], &ks[2]);
    Ok(VertexValue::build(vec![n_higgs, n_higgs, s.dim()], ks.clone(), |i| {
        C64::new(0.0, delta(i[0], i[1]) * (ks[0][i[2]] - ks[1][i[2]]) * sn)
    }))
}

/// V^s_{abαβ}(k₁..k₄) = -2δ_{αβ}δ_{ab}[cos((k₃∧k₁ + k₄∧k₂)/2) - cos(k₁∧k₂/2)cos(k₃∧k₄/2)].
pub fn seagull(s: &SymplecticStructure, n_higgs: usize, k1: &[f64], k2: &[f64], k3: &[f64]) -> Result<VertexValue> {
    let ks = close(s, &[k1, k2, k3])?;
    let phase = 0.5 * (s.wedge_unchecked(&ks[2], &ks[0]) + s.wedge_unchecked(&ks[3], &ks[1]));
    let bracket = phase.cos() - half_cos(s, &ks[0], &ks[1]) * half_cos(s, &ks[2], &ks[3]);
    let d = s.dim();
    Ok(VertexValue::build(vec![n_higgs, n_higgs, d, d], ks.clone(), |i| {
        C64::new(-2.0 * delta(i[2], i[3]) * delta(i[0], i[1]) * bracket, 0.0)
    }))
}

/// V^H_{abc}(k₁,k₂,k₃) = iC_{ab}^c sin(k₁∧k₂/2); `c` is N×N×N, row-major.
pub fn vertex_3h(s: &SymplecticStructure, n_higgs: usize, c: &[f64], k1: &[f64], k2: &[f64]) -> Result<VertexValue> {
    if c.len() != n_higgs.pow(3) {
        return Err(Error::LengthMismatch {
            got: c.len(),
            dim: n_higgs.pow(3),
        });
    }
    let ks = close(s, &[k1, k2])?;
    let sn = half_sin(s, &ks[0], &ks[1]);
    let n = n_higgs;
    Ok(VertexValue::build(vec![n, n, n], ks.clone(), |i| {
        C64::new(0.0, c[(i[0] * n + i[1]) * n + i[2]] * sn)
    }))
}

/// V^H_{abcd}(k₁..k₄) with overall factor +4.
pub fn vertex_4h(s: &SymplecticStructure, n_higgs: usize, k1: &[f64], k2: &[f64], k3: &[f64]) -> Result<VertexValue> {
    let ks = close(s, &[k1, k2, k3])?;
    Ok(VertexValue::build(vec![n_higgs; 4], ks.clone(), |i| quartic(s, &ks, i, 1.0)))
}
