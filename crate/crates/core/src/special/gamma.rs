//! Gamma-function routines: Lanczos log-gamma, the Gauss product limit,
//! unit-ball volumes of `l_p` norms and the harmonic-arithmetic
//! log-concavity of those volumes.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::special::quad;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// `ln |Gamma(x)|` for `x > 0` (reflection below 1/2).
pub fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin().abs()).ln() - ln_gamma(1.0 - x);
    }
    let z = x - 1.0;
    let mut a = LANCZOS[0];
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        a += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (z + 0.5) * t.ln() - t + a.ln()
}

/// `Gamma(x)` for `x > 0`.
pub fn gamma(x: f64) -> f64 {
    ln_gamma(x).exp()
}

/// Gauss product `n! n^x / (x (x+1) ... (x+n))`, evaluated as
/// `exp(x ln n - ln x - sum_k ln(1 + x/k))` with compensated summation.
pub fn gamma_limit(x: f64, n: u64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("gamma_limit needs x > 0, got {x}")));
    }
    if n == 0 {
        return Err(Error::Domain("gamma_limit needs n >= 1".into()));
    }
    let mut sum = Neumaier::default();
    sum.add(x * (n as f64).ln());
    sum.add(-x.ln());
    for k in 1..=n {
        sum.add(-(x / k as f64).ln_1p());
    }
    Ok(sum.total().exp())
}

/// Neumaier's compensated sum.
#[derive(Debug, Default, Clone, Copy)]
pub(crate) struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    pub(crate) fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn total(&self) -> f64 {
        self.sum + self.comp
    }
}

fn check_exponent(p: f64) -> Result<()> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::Domain(format!("norm exponent must be >= 1 or inf, got {p}")));
    }
    Ok(())
}

/// `ln V_alpha(p) = alpha ln 2 + alpha lnGamma(1 + 1/p) - lnGamma(1 + alpha/p)`.
fn ln_volume(alpha: f64, p: f64) -> f64 {
    if p == f64::INFINITY {
        return alpha * std::f64::consts::LN_2;
    }
    alpha * std::f64::consts::LN_2 + alpha * ln_gamma(1.0 + 1.0 / p) - ln_gamma(1.0 + alpha / p)
}

/// Volume of the unit `l_p` ball in `R^n`; `p = f64::INFINITY` is the cube.
pub fn ball_volume(n: u32, p: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::Domain("dimension must be >= 1".into()));
    }
    check_exponent(p)?;
    if p == f64::INFINITY {
        return Ok(2f64.powi(n as i32));
    }
    Ok(ln_volume(n as f64, p).exp())
}

/// `V_alpha(p)` for real `alpha > 0`.
pub fn volume_real(alpha: f64, p: f64) -> Result<f64> {
    if !(alpha > 0.0) {
        return Err(Error::Domain(format!("alpha must be positive, got {alpha}")));
    }
    check_exponent(p)?;
    Ok(ln_volume(alpha, p).exp())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LogConcavity {
    /// `V(p)^lambda V(q)^(1 - lambda)`.
    pub lhs: f64,
    /// `V` at the weighted harmonic mean of `p` and `q`.
    pub rhs: f64,
    /// Strict inequality `lhs < rhs`.
    pub holds: bool,
    /// `p == q`, where both sides coincide.
    pub degenerate: bool,
}

/// Evaluates both sides of
/// `V(p)^lambda V(q)^(1-lambda) < V(1 / (lambda/p + (1-lambda)/q))`.
pub fn log_concavity_check(alpha: f64, p: f64, q: f64, lambda: f64) -> Result<LogConcavity> {
    if !(alpha > 1.0) {
        return Err(Error::Domain(format!("alpha must exceed 1, got {alpha}")));
    }
    if !(p > 1.0) || !(q > 1.0) {
        return Err(Error::Domain(format!("exponents must exceed 1, got {p} and {q}")));
    }
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(Error::Domain(format!("lambda must lie in (0, 1), got {lambda}")));
    }
    if p == q {
        let v = volume_real(alpha, p)?;
        return Ok(LogConcavity { lhs: v, rhs: v, holds: false, degenerate: true });
    }
    let lhs = (lambda * ln_volume(alpha, p) + (1.0 - lambda) * ln_volume(alpha, q)).exp();
    let mean = 1.0 / (lambda / p + (1.0 - lambda) / q);
    let rhs = ln_volume(alpha, mean).exp();
    Ok(LogConcavity { lhs, rhs, holds: lhs < rhs, degenerate: false })
}

/// `B(x, y)` from the integral `int_0^1 t^(x-1) (1-t)^(y-1) dt`.
pub fn beta_quadrature(x: f64, y: f64) -> Result<f64> {
    if !(x > 0.0 && y > 0.0) {
        return Err(Error::Domain(format!("beta needs positive arguments, got {x}, {y}")));
    }
    quad::tanh_sinh_unit(|t, s| t.powf(x - 1.0) * s.powf(y - 1.0), 1e-13)
}
