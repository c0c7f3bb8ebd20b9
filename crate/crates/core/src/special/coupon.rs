//! The coupon-collector objective `p_N` in permutation, inclusion-exclusion
//! and integral form, plus a Hessian probe of its convexity.

use std::ops::{Add, Div, Mul, Sub};

use itertools::Itertools;
use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::par;
use crate::special::gamma::Neumaier;
use crate::special::quad;

pub const MAX_PERM_N: usize = 8;
pub const MAX_IE_N: usize = 24;

/// Scalars the permutation and inclusion-exclusion forms can run on.
pub trait CouponScalar:
    Clone
    + PartialOrd
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
{
    /// Sum of a term list; floats use compensated summation.
    fn sum_terms(terms: Vec<Self>) -> Self {
        terms.into_iter().fold(Self::zero(), |a, b| a + b)
    }
}

impl CouponScalar for f64 {
    fn sum_terms(terms: Vec<Self>) -> Self {
        let mut s = Neumaier::default();
        terms.into_iter().for_each(|t| s.add(t));
        s.total()
    }
}

impl CouponScalar for BigRational {}

/// Validated input vector of positive entries.
#[derive(Debug, Clone, PartialEq)]
pub struct CouponInput<T> {
    x: Vec<T>,
}

impl<T: CouponScalar> CouponInput<T> {
    pub fn new(x: Vec<T>) -> Result<Self> {
        if x.is_empty() {
            return Err(Error::Size { n: 0, max: MAX_IE_N });
        }
        if let Some(i) = x.iter().position(|v| !(*v > T::zero())) {
            return Err(Error::Domain(format!("component {i} is not strictly positive")));
        }
        Ok(CouponInput { x })
    }

    pub fn values(&self) -> &[T] {
        &self.x
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }
}

/// Parses an exact rational from `a/b`, an integer, or a decimal with an
/// optional exponent (`1.25`, `3e-2`). Decimals are taken at face value,
/// not through their nearest double.
pub fn parse_rational(text: &str) -> Result<BigRational> {
    let bad = || Error::Parameter(format!("not a rational number: `{text}`"));
    let t = text.trim();
    if let Some((n, d)) = t.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(n, d));
    }
    let (mantissa, exp) = match t.find(['e', 'E']) {
        Some(i) => (&t[..i], t[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (t, 0),
    };
    let (int, frac) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if frac.starts_with(['+', '-']) || (int.is_empty() && frac.is_empty()) {
        return Err(bad());
    }
    let digits = match int {
        "" | "+" | "-" => format!("{int}0{frac}"),
        _ => format!("{int}{frac}"),
    };
    let num: BigInt = digits.parse().map_err(|_| bad())?;
    let shift = exp - frac.len() as i32;
    let ten = BigInt::from(10u8);
    let scale = num_traits::pow(ten, shift.unsigned_abs() as usize);
    Ok(if shift >= 0 {
        BigRational::from_integer(num * scale)
    } else {
        BigRational::new(num, scale)
    })
}

/// Nearest double of an exact rational (`NaN` if it does not fit).
pub fn rational_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Sum over all orderings `s` of
/// `prod_i x_s(i) / T_i * sum_i 1 / T_i` with tails `T_i = sum_{j>=i} x_s(j)`.
pub fn pn_perm<T: CouponScalar>(input: &CouponInput<T>) -> Result<T> {
    let x = input.values();
    let n = x.len();
    if n > MAX_PERM_N {
        return Err(Error::Size { n, max: MAX_PERM_N });
    }
    let terms = (0..n)
        .permutations(n)
        .map(|perm| {
            let mut tail = T::zero();
            let mut tails = vec![T::zero(); n];
            for i in (0..n).rev() {
                tail = tail + x[perm[i]].clone();
                tails[i] = tail.clone();
            }
            let mut prod = T::one();
            let mut recip = T::zero();
            for i in 0..n {
                prod = prod * (x[perm[i]].clone() / tails[i].clone());
                recip = recip + T::one() / tails[i].clone();
            }
            prod * recip
        })
        .collect();
    Ok(T::sum_terms(terms))
}

/// `sum_{S nonempty} (-1)^(|S|+1) / sum_{i in S} x_i`.
pub fn pn_ie<T: CouponScalar>(input: &CouponInput<T>) -> Result<T> {
    let x = input.values();
    let n = x.len();
    if n > MAX_IE_N {
        return Err(Error::Size { n, max: MAX_IE_N });
    }
    // Subset sums from two half-width tables.
    let low_bits = n / 2;
    let table = |bits: &[T]| -> Vec<T> {
        (0..1usize << bits.len())
            .map(|m| {
                bits.iter()
                    .enumerate()
                    .filter(|(b, _)| m >> b & 1 == 1)
                    .fold(T::zero(), |s, (_, v)| s + v.clone())
            })
            .collect()
    };
    let low = table(&x[..low_bits]);
    let high = table(&x[low_bits..]);
    let mask = (1usize << low_bits) - 1;
    let terms = (1usize..1 << n)
        .map(|m| {
            let s = low[m & mask].clone() + high[m >> low_bits].clone();
            let t = T::one() / s;
            if m.count_ones() % 2 == 1 {
                t
            } else {
                T::zero() - t
            }
        })
        .collect();
    Ok(T::sum_terms(terms))
}

/// `int_0^inf (1 - prod_i (1 - e^(-s x_i))) ds`, the form
/// `int_0^1 (1 - prod (1 - t^x_i)) dt / t` after `t = e^(-s)`, truncated at
/// `s = 50 / min x`.
pub fn pn_integral(input: &CouponInput<f64>) -> Result<f64> {
    let x = input.values();
    if x.len() > MAX_IE_N {
        return Err(Error::Size { n: x.len(), max: MAX_IE_N });
    }
    let xmin = x.iter().copied().fold(f64::INFINITY, f64::min);
    let upper = 50.0 / xmin;
    let integrand = |s: f64| -> f64 {
        let log_prod: f64 = x.iter().map(|&xi| (-(-s * xi).exp()).ln_1p()).sum();
        -log_prod.exp_m1()
    };
    quad::integrate(integrand, 0.0, upper, 1e-12)
}

/// Worst cases found by [`convexity_probe`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvexityProbe {
    pub n: usize,
    pub trials: usize,
    pub seed: u64,
    /// Smallest Hessian eigenvalue of `p_N` and where it occurred.
    pub min_eigenvalue: f64,
    pub min_point: Vec<f64>,
    /// Largest Hessian eigenvalue of `1 / p_N` and where it occurred.
    pub max_inverse_eigenvalue: f64,
    pub max_inverse_point: Vec<f64>,
    /// Smallest Hessian eigenvalue of `ln p_N`.
    pub min_log_eigenvalue: f64,
}

fn pn_fast(x: &[f64]) -> f64 {
    pn_ie(&CouponInput { x: x.to_vec() }).unwrap_or(f64::NAN)
}

/// Central-difference Hessian with steps `h_i = 1e-4 (1 + |x_i|)`.
pub fn fd_hessian(f: &impl Fn(&[f64]) -> f64, x: &[f64]) -> DMatrix<f64> {
    let n = x.len();
    let h: Vec<f64> = x.iter().map(|v| 1e-4 * (1.0 + v.abs())).collect();
    let f0 = f(x);
    let at = |di: (usize, f64), dj: (usize, f64)| {
        let mut y = x.to_vec();
        y[di.0] += di.1;
        y[dj.0] += dj.1;
        f(&y)
    };
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        let fp = at((i, h[i]), (i, 0.0));
        let fm = at((i, -h[i]), (i, 0.0));
        m[(i, i)] = (fp - 2.0 * f0 + fm) / (h[i] * h[i]);
        for j in 0..i {
            let v = (at((i, h[i]), (j, h[j])) - at((i, h[i]), (j, -h[j])) - at((i, -h[i]), (j, h[j]))
                + at((i, -h[i]), (j, -h[j])))
                / (4.0 * h[i] * h[j]);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    m
}

fn extreme_eigenvalues(m: DMatrix<f64>) -> (f64, f64) {
    let ev = m.symmetric_eigenvalues();
    (ev.min(), ev.max())
}

/// Finite-difference Hessian probe of `p_N`, `1/p_N` and `ln p_N` at
/// `trials` points drawn log-uniformly from `[0.1, 10]^N`.
pub fn convexity_probe(n: usize, trials: usize, seed: u64) -> Result<ConvexityProbe> {
    if !(2..=10).contains(&n) {
        return Err(Error::Size { n, max: 10 });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (lo, hi) = (0.1f64.ln(), 10f64.ln());
    let points: Vec<Vec<f64>> = (0..trials)
        .map(|_| (0..n).map(|_| rng.random_range(lo..hi).exp()).collect())
        .collect();
    let results = par::map_slice(&points, |x| {
        let (pmin, _) = extreme_eigenvalues(fd_hessian(&pn_fast, x));
        let (_, imax) = extreme_eigenvalues(fd_hessian(&|y: &[f64]| 1.0 / pn_fast(y), x));
        let (lmin, _) = extreme_eigenvalues(fd_hessian(&|y: &[f64]| pn_fast(y).ln(), x));
        (pmin, imax, lmin)
    });
    let mut report = ConvexityProbe {
        n,
        trials,
        seed,
        min_eigenvalue: f64::INFINITY,
        min_point: Vec::new(),
        max_inverse_eigenvalue: f64::NEG_INFINITY,
        max_inverse_point: Vec::new(),
        min_log_eigenvalue: f64::INFINITY,
    };
    for (x, &(pmin, imax, lmin)) in points.iter().zip(&results) {
        if pmin < report.min_eigenvalue {
            report.min_eigenvalue = pmin;
            report.min_point = x.clone();
        }
        if imax > report.max_inverse_eigenvalue {
            report.max_inverse_eigenvalue = imax;
            report.max_inverse_point = x.clone();
        }
        report.min_log_eigenvalue = report.min_log_eigenvalue.min(lmin);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn input(x: &[f64]) -> CouponInput<f64> {
        CouponInput::new(x.to_vec()).unwrap()
    }

    #[test]
    fn small_cases() {
        assert_eq!(pn_perm(&input(&[2.0])).unwrap(), 0.5);
        assert_eq!(pn_ie(&input(&[2.0])).unwrap(), 0.5);
        assert_eq!(pn_perm(&input(&[1.0, 1.0])).unwrap(), 1.5);
        assert_eq!(pn_ie(&input(&[1.0, 1.0])).unwrap(), 1.5);
        let r = pn_ie(&CouponInput::new(vec![rat(1, 1); 3]).unwrap()).unwrap();
        assert_eq!(r, rat(11, 6));
    }

    #[test]
    fn perm_equals_ie_exactly_for_one_two_three() {
        let x = CouponInput::new(vec![rat(1, 1), rat(2, 1), rat(3, 1)]).unwrap();
        assert_eq!(pn_perm(&x).unwrap(), pn_ie(&x).unwrap());
    }

    #[test]
    fn integral_form() {
        assert!((pn_integral(&input(&[1.0])).unwrap() - 1.0).abs() < 1e-10);
        assert!((pn_integral(&input(&[1.0, 1.0])).unwrap() - 1.5).abs() < 1e-8);
        let x = input(&[1.0, 2.0, 3.0]);
        assert!((pn_integral(&x).unwrap() - pn_ie(&x).unwrap()).abs() < 1e-8);
    }

    #[test]
    fn input_errors() {
        assert!(CouponInput::new(vec![1.0, 0.0]).is_err());
        assert!(CouponInput::new(vec![-1.0]).is_err());
        assert!(CouponInput::<f64>::new(vec![]).is_err());
        assert!(matches!(pn_perm(&input(&[1.0; 9])), Err(Error::Size { n: 9, max: 8 })));
        assert!(pn_ie(&input(&[1.0; 25])).is_err());
    }

    #[test]
    fn n_two_hessians() {
        let x = [1.0, 1.0];
        let (lo, _) = extreme_eigenvalues(fd_hessian(&pn_fast, &x));
        assert!(lo >= -1e-6);
        assert!((1.0 / pn_fast(&x) - 2.0 / 3.0).abs() < 1e-15);
        let (_, hi) = extreme_eigenvalues(fd_hessian(&|y: &[f64]| 1.0 / pn_fast(y), &x));
        assert!(hi <= 1e-6);
        // Closed form: Hessian of 1/a + 1/b - 1/(a+b) at (1,1).
        let h = fd_hessian(&pn_fast, &x);
        assert!((h[(0, 0)] - (2.0 - 0.25)).abs() < 1e-5);
        assert!((h[(0, 1)] + 0.25).abs() < 1e-5);
    }

    #[test]
    fn rational_parsing() {
        assert_eq!(parse_rational("3").unwrap(), rat(3, 1));
        assert_eq!(parse_rational("-2/6").unwrap(), rat(-1, 3));
        assert_eq!(parse_rational("0.1").unwrap(), rat(1, 10));
        assert_eq!(parse_rational(".5").unwrap(), rat(1, 2));
        assert_eq!(parse_rational("1.25e2").unwrap(), rat(125, 1));
        assert_eq!(parse_rational("3e-2").unwrap(), rat(3, 100));
        for bad in ["", "1/0", "abc", "1.2.3", "--1", "1e", "."] {
            assert!(parse_rational(bad).is_err(), "{bad}");
        }
        assert_eq!(rational_to_f64(&rat(1, 4)), 0.25);
    }

    #[test]
    fn probe_is_deterministic() {
        let a = convexity_probe(3, 20, 7).unwrap();
        let b = convexity_probe(3, 20, 7).unwrap();
        assert_eq!(a, b);
        assert!(a.min_eigenvalue >= -1e-5);
        assert!(convexity_probe(1, 5, 0).is_err());
    }
}
