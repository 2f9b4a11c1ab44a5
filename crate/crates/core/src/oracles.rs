//! Independent verification paths: plain Monte Carlo with a counter-based
//! generator, and the Bessel/Fourier closed-ish form for the rotor ratio.
//! (The naive tensor enumeration lives in the engine as scenario A0.)

use crate::error::{Error, Result};
use crate::numerics::bessel::bessel_i;
use crate::numerics::scalar::Real;
use crate::numerics::scaled::ScaledValue;

/// A Monte Carlo estimate; bit-reproducible for a fixed seed/sample count.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct McEstimate<R: Real> {
    pub mean: R,
    pub stderr: R,
    pub samples: u64,
    pub seed: u64,
}

/// splitmix64: counter-based, so disjoint counter ranges are independent
/// streams and parallel evaluation stays deterministic.
fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E3779B97F4A7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

/// Uniform in [0,1) from (seed, counter).
fn uniform01<R: Real>(seed: u64, counter: u64) -> R {
    let bits = splitmix64(seed ^ splitmix64(counter));
    R::from_u64(bits >> 11).expect("53-bit integer") / R::from_f64_exact(9007199254740992.0)
}

/// Plain Monte Carlo with i.i.d. uniform points and Welford accumulation.
pub fn monte_carlo<R: Real>(
    integrand: impl Fn(&[R]) -> R,
    d: usize,
    samples: u64,
    seed: u64,
) -> Result<McEstimate<R>> {
    if d == 0 || samples < 2 {
        return Err(Error::InvalidArgument(
            "monte_carlo: need d >= 1 and samples >= 2".into(),
        ));
    }
    let mut mean = R::zero();
    let mut m2 = R::zero();
    let mut x = vec![R::zero(); d];
    for i in 0..samples {
        for (j, xj) in x.iter_mut().enumerate() {
            *xj = uniform01(seed, i * d as u64 + j as u64);
        }
        let v = integrand(&x);
        if !v.is_finite() {
            return Err(Error::NonFiniteSample(format!("sample index {i}")));
        }
        let count = R::from_u64(i + 1).expect("sample count");
        let delta = v - mean;
        mean += delta / count;
        m2 += delta * (v - mean);
    }
    let nn = R::from_u64(samples).expect("sample count");
    let var = m2 / (nn - R::one());
    Ok(McEstimate {
        mean,
        stderr: (var / nn).sqrt(),
        samples,
        seed,
    })
}

/// Ratio estimator `E[num]/E[den]` over a shared point stream, with the
/// delta-method standard error (covariance included).
pub fn monte_carlo_ratio<R: Real>(
    numerator: impl Fn(&[R]) -> R,
    denominator: impl Fn(&[R]) -> R,
    d: usize,
    samples: u64,
    seed: u64,
) -> Result<McEstimate<R>> {
    if d == 0 || samples < 2 {
        return Err(Error::InvalidArgument(
            "monte_carlo_ratio: need d >= 1 and samples >= 2".into(),
        ));
    }
    let mut mean_n = R::zero();
    let mut mean_d = R::zero();
    let mut c_nn = R::zero();
    let mut c_dd = R::zero();
    let mut c_nd = R::zero();
    let mut x = vec![R::zero(); d];
    for i in 0..samples {
        for (j, xj) in x.iter_mut().enumerate() {
            *xj = uniform01(seed, i * d as u64 + j as u64);
        }
        let vn = numerator(&x);
        let vd = denominator(&x);
        if !vn.is_finite() || !vd.is_finite() {
            return Err(Error::NonFiniteSample(format!("sample index {i}")));
        }
        let count = R::from_u64(i + 1).expect("sample count");
        let dn = vn - mean_n;
        let dd = vd - mean_d;
        mean_n += dn / count;
        mean_d += dd / count;
        c_nn += dn * (vn - mean_n);
        c_dd += dd * (vd - mean_d);
        c_nd += dn * (vd - mean_d);
    }
    let nn = R::from_u64(samples).expect("sample count");
    let nm1 = nn - R::one();
    let (v_n, v_d, v_nd) = (c_nn / nm1, c_dd / nm1, c_nd / nm1);
    let ratio = mean_n / mean_d;
    // Var(ratio) ~= (1/N) [ v_n/d^2 - 2 r v_nd/d^2 + r^2 v_d/d^2 ]
    let two = R::from_f64_exact(2.0);
    let var = (v_n - two * ratio * v_nd + ratio * ratio * v_d) / (mean_d * mean_d) / nn;
    Ok(McEstimate {
        mean: ratio,
        stderr: var.max(R::zero()).sqrt(),
        samples,
        seed,
    })
}

/// Fourier/Bessel closed form of the rotor plaquette ratio:
/// `sum_ell f0_hat(ell) I_ell^{L-1} / sum_ell I_ell^L` with
/// `f_hat(ell) = I_|ell|(beta)` and `f0_hat(ell) = (I_|ell-1| + I_|ell+1|)/2`.
pub fn bessel_ratio_oracle<R: Real>(beta: R, l: u64, ell_max: i64) -> Result<R> {
    if ell_max < 1 {
        return Err(Error::InvalidArgument("bessel_ratio_oracle: ell_max < 1".into()));
    }
    let i0 = bessel_i(0, beta);
    let tail = bessel_i(ell_max as u32, beta) / i0;
    if tail > R::from_f64_exact(1e-18) {
        return Err(Error::TailBound(format!(
            "bessel_ratio_oracle: relative tail I_{ell_max}/I_0 = {:e} exceeds 1e-18",
            tail.to_f64_lossy()
        )));
    }
    let half = R::from_f64_exact(0.5);
    let mut num = ScaledValue::zero();
    let mut den = ScaledValue::zero();
    for ell in -ell_max..=ell_max {
        let f = ScaledValue::from_real(bessel_i(ell.unsigned_abs() as u32, beta));
        let f0 = ScaledValue::from_real(
            (bessel_i((ell - 1).unsigned_abs() as u32, beta)
                + bessel_i((ell + 1).unsigned_abs() as u32, beta))
                * half,
        );
        num = num.add(&f0.mul(&f.powi(l - 1)));
        den = den.add(&f.powi(l));
    }
    if den.is_zero() {
        return Err(Error::InvalidArgument("bessel_ratio_oracle: zero denominator".into()));
    }
    Ok(num.div(&den).real())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_integrand() {
        let e = monte_carlo(|_: &[f64]| 7.0, 3, 1000, 1).unwrap();
        assert_eq!(e.mean, 7.0);
        assert_eq!(e.stderr, 0.0);
    }

    #[test]
    fn linear_integrand_three_sigma() {
        let e = monte_carlo(|x: &[f64]| x[0], 1, 1_000_000, 42).unwrap();
        assert!((e.mean - 0.5).abs() < 3.0 * e.stderr, "mean {} +- {}", e.mean, e.stderr);
    }

    #[test]
    fn deterministic() {
        let a = monte_carlo(|x: &[f64]| x[0] * x[1], 2, 10_000, 7).unwrap();
        let b = monte_carlo(|x: &[f64]| x[0] * x[1], 2, 10_000, 7).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn stderr_scaling() {
        // stderr halves (+-20%) when samples quadruple
        let f = |x: &[f64]| {
            x.iter()
                .map(|&v| (2.0 * std::f64::consts::PI * v).cos().exp())
                .product::<f64>()
        };
        let a = monte_carlo(f, 6, 40_000, 3).unwrap();
        let b = monte_carlo(f, 6, 160_000, 3).unwrap();
        let ratio = a.stderr / b.stderr;
        assert!((1.6..=2.4).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn bessel_oracle_beta_zero() {
        assert_eq!(bessel_ratio_oracle(0.0f64, 8, 4).unwrap(), 0.0);
    }

    #[test]
    fn bessel_oracle_tail_guard() {
        assert!(matches!(
            bessel_ratio_oracle(5.0f64, 8, 6),
            Err(Error::TailBound(_))
        ));
    }

    #[test]
    fn bessel_oracle_cutoff_stable() {
        let a = bessel_ratio_oracle(2.0f64, 8, 40).unwrap();
        let b = bessel_ratio_oracle(2.0f64, 8, 60).unwrap();
        assert!((a - b).abs() < 1e-15);
    }
}
