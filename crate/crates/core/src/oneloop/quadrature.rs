//! Globally adaptive Gauss–Kronrod (7, 15) integration of vector integrands.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
/// Gauss weights for the odd Kronrod nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Integral estimate with per-component error bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct Quadrature {
    pub value: Vec<f64>,
    pub abs_error: Vec<f64>,
    pub intervals: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_intervals: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            abs: 1e-8,
            rel: 1e-10,
            max_intervals: 4000,
        }
    }
}

struct Segment {
    a: f64,
    b: f64,
    value: Vec<f64>,
    error: Vec<f64>,
    /// Largest error-to-tolerance ratio over components; the heap key.
    priority: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.priority.total_cmp(&other.priority) == Ordering::Equal
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.priority
            .total_cmp(&other.priority)
            .then(other.a.total_cmp(&self.a))
    }
}

fn gk15<F: FnMut(f64) -> Vec<f64>>(f: &mut F, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let n = fc.len();
    let mut kron: Vec<f64> = fc.iter().map(|v| v * WGK[7]).collect();
    let mut gauss: Vec<f64> = fc.iter().map(|v| v * WG[3]).collect();
    for j in 0..7 {
        let dx = h * XGK[j];
        let f1 = f(c - dx);
        let f2 = f(c + dx);
        for i in 0..n {
            let s = f1[i] + f2[i];
            kron[i] += WGK[j] * s;
            if j % 2 == 1 {
                gauss[i] += WG[j / 2] * s;
            }
        }
    }
    let value: Vec<f64> = kron.iter().map(|v| v * h).collect();
    let error = (0..n).map(|i| ((kron[i] - gauss[i]) * h).abs()).collect();
    (value, error)
}

/// ∫_a^b f with every component meeting |err| ≤ max(abs, rel·|I|).
pub fn integrate<F: FnMut(f64) -> Vec<f64>>(mut f: F, a: f64, b: f64, tol: Tolerance) -> Result<Quadrature> {
    let (v0, e0) = gk15(&mut f, a, b);
    let n = v0.len();
    let mut total = v0.clone();
    let mut total_err = e0.clone();
    // Largest error measured against each component's global tolerance. A
    // per-width share would chase roundoff in narrow peaks forever.
    let priority = |err: &[f64], total: &[f64]| -> f64 {
        (0..n)
            .map(|i| err[i] / tol.abs.max(tol.rel * total[i].abs()).max(f64::MIN_POSITIVE))
            .fold(0.0, f64::max)
    };
    let mut heap = BinaryHeap::new();
    heap.push(Segment {
        a,
        b,
        priority: priority(&e0, &total),
        value: v0,
        error: e0,
    });
    loop {
        let done = (0..n).all(|i| total_err[i] <= tol.abs.max(tol.rel * total[i].abs()));
        if done {
            break;
        }
        if heap.len() >= tol.max_intervals {
            return Err(Error::Numerical(format!(
                "quadrature did not converge in {} intervals (error {:?})",
                tol.max_intervals, total_err
            )));
        }
        let seg = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (seg.a + seg.b);
        let (vl, el) = gk15(&mut f, seg.a, mid);
        let (vr, er) = gk15(&mut f, mid, seg.b);
        for i in 0..n {
            total[i] += vl[i] + vr[i] - seg.value[i];
            total_err[i] += el[i] + er[i] - seg.error[i];
        }
        for (lo, hi, v, e) in [(seg.a, mid, vl, el), (mid, seg.b, vr, er)] {
            heap.push(Segment {
                a: lo,
                b: hi,
                priority: priority(&e, &total),
                value: v,
                error: e,
            });
        }
    }
    // Re-sum in interval order so the result does not depend on heap history.
    let mut segs: Vec<Segment> = heap.into_vec();
    segs.sort_by(|x, y| x.a.total_cmp(&y.a));
    let mut value = vec![0.0; n];
    let mut abs_error = vec![0.0; n];
    for s in &segs {
        for i in 0..n {
            value[i] += s.value[i];
            abs_error[i] += s.error[i];
        }
    }
    Ok(Quadrature {
        value,
        abs_error,
        intervals: segs.len(),
    })
}
