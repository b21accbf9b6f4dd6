//! Modified Bessel functions of integer order.
//!
//! K_n comes from the Schläfli integral K_n(z) = ∫₀^∞ e^{-z cosh t} cosh(nt) dt,
//! evaluated by the trapezoid rule on the scaled integrand
//! e^{-z(cosh t - 1)} cosh(nt). The integrand is analytic in the strip
//! |Im t| < π/2, so the rule converges geometrically in 1/h.

const STEP: f64 = 1.0 / 16.0;
const CUTOFF: f64 = 1e-18;

/// e^z K_n(z) for z > 0.
pub fn bessel_k_scaled(n: i32, z: f64) -> f64 {
    ln_bessel_k_scaled(n, z).exp()
}

/// ln(e^z K_n(z)), finite even where K_n itself overflows.
pub fn ln_bessel_k_scaled(n: i32, z: f64) -> f64 {
    assert!(z > 0.0, "bessel_k_scaled needs z > 0, got {z}");
    let n = f64::from(n.abs());
    // ln f(t) = -z(cosh t - 1) + ln cosh(nt), peaked where z sinh t = n tanh(nt).
    let log_f = |t: f64| -z * (t.cosh() - 1.0) + log_cosh(n * t);
    let peak = if n == 0.0 { 0.0 } else { (n / z).asinh() };
    let log_scale = log_f(peak);
    // The peak has width ~ (z² + n²)^{-1/4}; the step must resolve it.
    let step = STEP.min(0.7 / z.hypot(n).sqrt());
    let mut sum = 0.5 * (log_f(0.0) - log_scale).exp();
    let mut k = 1;
    loop {
        let t = k as f64 * step;
        let term = (log_f(t) - log_scale).exp();
        sum += term;
        if t > peak && term < CUTOFF * sum {
            break;
        }
        k += 1;
    }
    (step * sum).ln() + log_scale
}

fn log_cosh(x: f64) -> f64 {
    let a = x.abs();
    a + (0.5 * (1.0 + (-2.0 * a).exp())).ln()
}

/// K_n(z) for z > 0; K_{-n} = K_n.
pub fn bessel_k(n: i32, z: f64) -> f64 {
    bessel_k_scaled(n, z) * (-z).exp()
}

/// zⁿ K_n(z) for n ≥ 0, continuous at z = 0 where it equals 2^{n-1}(n-1)! for n ≥ 1.
pub fn zk(n: u32, z: f64) -> f64 {
    assert!(z >= 0.0, "zk needs z >= 0, got {z}");
    if n == 0 {
        assert!(z > 0.0, "K_0 diverges at z = 0");
        return bessel_k(0, z);
    }
    let limit = 2f64.powi(n as i32 - 1) * factorial(n - 1);
    if z < 1e-150 {
        return limit;
    }
    let log_val = f64::from(n) * z.ln() + ln_bessel_k_scaled(n as i32, z) - z;
    log_val.exp()
}

/// I_n(z) by its power series; all terms are positive, so there is no cancellation.
pub fn bessel_i(n: i32, z: f64) -> f64 {
    let n = n.unsigned_abs();
    let half = 0.5 * z;
    let mut term = half.powi(n as i32) / factorial(n);
    let mut sum = term;
    let mut k = 0u32;
    loop {
        k += 1;
        term *= half * half / (f64::from(k) * f64::from(k + n));
        sum += term;
        if term < 1e-17 * sum {
            break;
        }
    }
    sum
}

pub fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

/// Γ at positive integers and half-integers.
pub fn gamma_half_integer(x: f64) -> f64 {
    let twice = (2.0 * x).round();
    assert!(twice >= 1.0 && (2.0 * x - twice).abs() < 1e-12, "gamma needs n/2 > 0, got {x}");
    if twice as u32 % 2 == 0 {
        factorial(x.round() as u32 - 1)
    } else {
        // Γ(k + 1/2) = (2k)! √π / (4^k k!)
        let k = (x - 0.5).round() as u32;
        factorial(2 * k) * std::f64::consts::PI.sqrt() / (4f64.powi(k as i32) * factorial(k))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_and_large_argument_limits() {
        // K_0(z) ≈ -ln(z/2) - γ for small z.
        let z = 1e-6;
        let euler = 0.577_215_664_901_532_9;
        assert!((bessel_k(0, z) - (-(z / 2.0).ln() - euler)).abs() < 1e-9);
        // K_ν(z) ~ √(π/2z) e^{-z}(1 + (4ν²-1)/(8z)) for large z.
        let z = 400.0;
        let asym = (std::f64::consts::PI / (2.0 * z)).sqrt() * (1.0 + 15.0 / (8.0 * z) + 105.0 / (128.0 * z * z));
        assert!((bessel_k_scaled(2, z) / asym - 1.0).abs() < 1e-6);
    }

    #[test]
    fn zk_limits() {
        assert_eq!(zk(1, 0.0), 1.0);
        assert_eq!(zk(2, 0.0), 2.0);
        assert_eq!(zk(3, 0.0), 8.0);
        assert!((zk(2, 1e-7) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn gamma_values() {
        assert_eq!(gamma_half_integer(1.0), 1.0);
        assert_eq!(gamma_half_integer(3.0), 2.0);
        assert!((gamma_half_integer(0.5) - std::f64::consts::PI.sqrt()).abs() < 1e-15);
        assert!((gamma_half_integer(2.5) - 0.75 * std::f64::consts::PI.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn i_series_small_argument() {
        assert!((bessel_i(0, 1e-4) - 1.0).abs() < 1e-8);
        assert!((bessel_i(1, 2.0) - 1.590_636_854_637_329).abs() < 1e-14);
    }
}
