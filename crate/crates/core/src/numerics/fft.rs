//! Forward DFT (radix-2 FFT with an O(n^2) direct fallback) and circulant
//! spectra.
//!
//! Convention: forward, unnormalized, kernel `e^{-2*pi*i*j*k/n}`. Circulant
//! eigenvalues are the forward DFT of the first column
//! `c_p = kappa(((-p) mod n)/n) / n`, the `1/n` absorbing the rectangle-rule
//! weights. For even kernels this coincides with the DFT of the plain samples
//! `kappa(p/n)`.

use num_complex::Complex;

use super::scalar::Real;
use super::scaled::ScaledValue;
use crate::error::{Error, Result};

/// Forward unnormalized DFT: `X_k = sum_j v_j e^{-2 pi i j k / n}`.
pub fn dft_forward<R: Real>(v: &[Complex<R>]) -> Result<Vec<Complex<R>>> {
    if v.is_empty() {
        return Err(Error::InvalidArgument("dft_forward: empty input".into()));
    }
    if v.len().is_power_of_two() {
        let mut data = v.to_vec();
        fft_radix2(&mut data, false);
        Ok(data)
    } else {
        Ok(dft_direct(v, false))
    }
}

/// Conjugate-kernel inverse transform, unnormalized: divide by `n` to invert
/// [`dft_forward`].
pub fn dft_backward<R: Real>(v: &[Complex<R>]) -> Result<Vec<Complex<R>>> {
    if v.is_empty() {
        return Err(Error::InvalidArgument("dft_backward: empty input".into()));
    }
    if v.len().is_power_of_two() {
        let mut data = v.to_vec();
        fft_radix2(&mut data, true);
        Ok(data)
    } else {
        Ok(dft_direct(v, true))
    }
}

/// Direct O(n^2) DFT; exposed for cross-checking the FFT path.
pub fn dft_direct<R: Real>(v: &[Complex<R>], inverse: bool) -> Vec<Complex<R>> {
    let n = v.len();
    let sign = if inverse { R::one() } else { -R::one() };
    let tau = R::PI() * R::from_f64_exact(2.0);
    let nn = R::from_usize_exact(n);
    (0..n)
        .map(|k| {
            let mut acc = Complex::new(R::zero(), R::zero());
            for (j, &x) in v.iter().enumerate() {
                // reduce j*k mod n to keep the phase argument small
                let jk = (j * k) % n;
                let phi = sign * tau * R::from_usize_exact(jk) / nn;
                acc = acc + x * Complex::new(phi.cos(), phi.sin());
            }
            acc
        })
        .collect()
}

fn fft_radix2<R: Real>(data: &mut [Complex<R>], inverse: bool) {
    let n = data.len();
    debug_assert!(n.is_power_of_two());
    // bit-reversal permutation
    let mut j = 0usize;
    for i in 1..n {
        let mut bit = n >> 1;
        while j & bit != 0 {
            j ^= bit;
            bit >>= 1;
        }
        j |= bit;
        if i < j {
            data.swap(i, j);
        }
    }
    let sign = if inverse { R::one() } else { -R::one() };
    let tau = R::PI() * R::from_f64_exact(2.0);
    let mut len = 2usize;
    while len <= n {
        let ang = sign * tau / R::from_usize_exact(len);
        let wlen = Complex::new(ang.cos(), ang.sin());
        let mut i = 0usize;
        while i < n {
            let mut w = Complex::new(R::one(), R::zero());
            for k in 0..len / 2 {
                let u = data[i + k];
                let v = data[i + k + len / 2] * w;
                data[i + k] = u + v;
                data[i + k + len / 2] = u - v;
                w = w * wlen;
            }
            i += len;
        }
        len <<= 1;
    }
}

/// Complex eigenvalue list of a circulant factor, normalized so the
/// largest-modulus eigenvalue has unit binade; `log_scale` restores absolute
/// magnitude.
#[derive(Clone, Debug)]
pub struct Spectrum<R: Real> {
    pub values: Vec<Complex<R>>,
    pub log_scale: i64,
}

impl<R: Real> Spectrum<R> {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Eigenvalue `k` with the normalization scale reapplied.
    pub fn eigenvalue(&self, k: usize) -> ScaledValue<R> {
        ScaledValue::with_scale(self.values[k], self.log_scale)
    }

    /// Normalizes a raw eigenvalue list into a `Spectrum`.
    pub fn from_raw(values: Vec<Complex<R>>) -> Self {
        let max = values
            .iter()
            .map(|v| v.norm())
            .fold(R::zero(), |a, b| if b > a { b } else { a });
        if max == R::zero() {
            return Spectrum {
                values,
                log_scale: 0,
            };
        }
        let e = max.log2().floor().to_f64_lossy().round() as i64;
        let inv = ScaledValue::from_real(R::one()).shift(-e).to_complex().re;
        let values = values.into_iter().map(|v| v * inv).collect();
        Spectrum {
            values,
            log_scale: e,
        }
    }
}

/// Spectrum of the circulant matrix whose first column is `col` (weights
/// already folded in): forward DFT then binade normalization.
///
/// If `even` is set the originating kernel is declared real and even, so the
/// spectrum must be real: the imaginary parts are asserted small
/// (<= 1e3 * ulp * max |lambda|) and dropped.
pub fn spectrum_from_column<R: Real>(col: &[Complex<R>], even: bool) -> Result<Spectrum<R>> {
    let mut values = dft_forward(col)?;
    if even {
        let max = values
            .iter()
            .map(|v| v.norm())
            .fold(R::zero(), |a, b| if b > a { b } else { a });
        let tol = R::from_f64_exact(1e3) * R::ulp() * max;
        for v in &values {
            if v.im.abs() > tol {
                return Err(Error::ImaginaryResidue {
                    residue: (v.im.abs() / max).to_f64_lossy(),
                    tol: (tol / max).to_f64_lossy(),
                });
            }
        }
        for v in &mut values {
            v.im = R::zero();
        }
    }
    Ok(Spectrum::from_raw(values))
}

/// Circulant spectrum of the difference kernel `kappa` sampled on the n-point
/// rectangle rule: column `c_p = kappa(((-p) mod n)/n) / n`, forward DFT,
/// binade normalization.
pub fn circulant_spectrum<R: Real>(
    kappa: impl Fn(R) -> R,
    n: usize,
    even: bool,
) -> Result<Spectrum<R>> {
    if n == 0 {
        return Err(Error::InvalidArgument("circulant_spectrum: n = 0".into()));
    }
    let nn = R::from_usize_exact(n);
    let mut col = Vec::with_capacity(n);
    for p in 0..n {
        let x = R::from_usize_exact((n - p) % n) / nn;
        let s = kappa(x);
        if !s.is_finite() {
            return Err(Error::NonFiniteSample(format!("{}", x)));
        }
        col.push(Complex::new(s / nn, R::zero()));
    }
    spectrum_from_column(&col, even)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn delta_to_constants() {
        let out = dft_forward(&[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]).unwrap();
        for v in out {
            assert!((v - c(1.0, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn constant_to_delta() {
        let out = dft_forward(&[c(1.0, 0.0); 4]).unwrap();
        assert!((out[0] - c(4.0, 0.0)).norm() < 1e-15);
        for v in &out[1..] {
            assert!(v.norm() < 1e-14);
        }
    }

    #[test]
    fn fft_matches_direct_length12() {
        // length 12 exercises the non-power-of-two direct path; compare a
        // power-of-two FFT against the direct sum too.
        let v: Vec<Complex<f64>> = (0..12)
            .map(|i| c((i as f64 * 0.7).sin(), (i as f64 * 1.3).cos()))
            .collect();
        let d = dft_direct(&v, false);
        let f = dft_forward(&v).unwrap();
        for (a, b) in d.iter().zip(&f) {
            assert!((a - b).norm() < 1e-12);
        }
        let v16: Vec<Complex<f64>> = (0..16)
            .map(|i| c((i as f64 * 0.7).sin(), (i as f64 * 1.3).cos()))
            .collect();
        let d = dft_direct(&v16, false);
        let f = dft_forward(&v16).unwrap();
        for (a, b) in d.iter().zip(&f) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn roundtrip_inverse() {
        for n in [8usize, 12, 16, 27] {
            let v: Vec<Complex<f64>> = (0..n)
                .map(|i| c((i as f64 * 0.31).sin(), (i as f64 * 0.17).cos()))
                .collect();
            let maxv = v.iter().map(|x| x.norm()).fold(0.0, f64::max);
            let fwd = dft_forward(&v).unwrap();
            let back = dft_backward(&fwd).unwrap();
            for (a, b) in v.iter().zip(&back) {
                let r = b / n as f64;
                assert!((a - r).norm() <= 1e2 * f64::EPSILON * n as f64 * maxv);
            }
        }
    }

    #[test]
    fn empty_input_rejected() {
        assert!(dft_forward::<f64>(&[]).is_err());
    }

    #[test]
    fn constant_kernel_spectrum() {
        let s = circulant_spectrum(|_x: f64| 1.0, 4, true).unwrap();
        let e0 = s.eigenvalue(0).to_complex();
        assert!((e0.re - 1.0).abs() < 1e-15);
        for k in 1..4 {
            assert!(s.eigenvalue(k).to_complex().norm() < 1e-14);
        }
    }

    #[test]
    fn cosine_kernel_spectrum() {
        let s = circulant_spectrum(|x: f64| (2.0 * std::f64::consts::PI * x).cos(), 8, true)
            .unwrap();
        for k in 0..8 {
            let v = s.eigenvalue(k).to_complex().re;
            if k == 1 || k == 7 {
                assert!((v - 0.5).abs() < 1e-15, "k={k} v={v}");
            } else {
                assert!(v.abs() < 1e-14, "k={k} v={v}");
            }
        }
    }

    #[test]
    fn trace_identity() {
        // sum of eigenvalues equals n * c_0
        let kappa = |x: f64| (1.7 * (2.0 * std::f64::consts::PI * x).cos()).exp();
        let n = 16;
        let s = circulant_spectrum(kappa, n, true).unwrap();
        let sum: f64 = (0..n).map(|k| s.eigenvalue(k).to_complex().re).sum();
        let c0 = kappa(0.0) / n as f64;
        let expect = n as f64 * c0;
        assert!((sum - expect).abs() < 1e-12 * expect.abs());
    }

    #[test]
    fn non_finite_sample_reported() {
        let r = circulant_spectrum(|x: f64| 1.0 / (x - 0.5), 8, false);
        assert!(matches!(r, Err(Error::NonFiniteSample(_))));
    }
}
