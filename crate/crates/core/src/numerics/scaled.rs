//! Magnitude-managed complex numbers.
//!
//! `Sum_k lambda_k^L` overflows binary64 long before the interesting lattice
//! sizes (L up to 10^6) are reached. [`ScaledValue`] stores a complex mantissa
//! together with a base-2 integer exponent so products, powers and sums of
//! wildly different magnitudes stay representable.

use num_complex::Complex;

use super::scalar::Real;

/// A complex number `mantissa * 2^log_scale` with `0.5 <= |mantissa| < 2`
/// whenever the value is nonzero. Zero is canonically `(0, 0)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScaledValue<R: Real> {
    mantissa: Complex<R>,
    log_scale: i64,
}

/// Alignment cutoff for additions: `2^-2000` is far below any ulp we care
/// about, so smaller summands are dropped instead of shifted into denormals.
const ALIGN_LIMIT: i64 = 2000;

impl<R: Real> ScaledValue<R> {
    pub fn zero() -> Self {
        ScaledValue {
            mantissa: Complex::new(R::zero(), R::zero()),
            log_scale: 0,
        }
    }

    pub fn new(value: Complex<R>) -> Self {
        Self::with_scale(value, 0)
    }

    pub fn from_real(value: R) -> Self {
        Self::new(Complex::new(value, R::zero()))
    }

    /// Builds `value * 2^log_scale`, normalizing the mantissa.
    pub fn with_scale(value: Complex<R>, log_scale: i64) -> Self {
        let modulus = value.norm();
        if modulus == R::zero() {
            return Self::zero();
        }
        let e = modulus.log2().floor();
        let shift = e.to_f64_lossy().round() as i64;
        let mut m = value * pow2::<R>(-shift);
        let mut s = log_scale + shift;
        // Guard against |m| landing exactly on 2 after rounding.
        let two = R::from_f64_exact(2.0);
        let half = R::from_f64_exact(0.5);
        let nm = m.norm();
        if nm >= two {
            m = m / two;
            s += 1;
        } else if nm < half {
            m = m * two;
            s -= 1;
        }
        ScaledValue {
            mantissa: m,
            log_scale: s,
        }
    }

    pub fn mantissa(&self) -> Complex<R> {
        self.mantissa
    }

    pub fn log_scale(&self) -> i64 {
        self.log_scale
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa.norm() == R::zero()
    }

    /// log2 of the modulus; `None` for zero.
    pub fn abs_log2(&self) -> Option<f64> {
        if self.is_zero() {
            None
        } else {
            Some(self.log_scale as f64 + self.mantissa.norm().log2().to_f64_lossy())
        }
    }

    /// Collapses to a plain complex number. Overflows to infinity (or
    /// underflows to zero) when the scale exceeds the exponent range.
    pub fn to_complex(&self) -> Complex<R> {
        self.mantissa * pow2::<R>(self.log_scale)
    }

    /// Value relative to a reference scale: `self / 2^reference`.
    pub fn to_complex_at_scale(&self, reference: i64) -> Complex<R> {
        self.mantissa * pow2::<R>(self.log_scale - reference)
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        Self::with_scale(
            self.mantissa * other.mantissa,
            self.log_scale + other.log_scale,
        )
    }

    pub fn div(&self, other: &Self) -> Self {
        Self::with_scale(
            self.mantissa / other.mantissa,
            self.log_scale - other.log_scale,
        )
    }

    pub fn add(&self, other: &Self) -> Self {
        if self.is_zero() {
            return *other;
        }
        if other.is_zero() {
            return *self;
        }
        let (hi, lo) = if self.log_scale >= other.log_scale {
            (self, other)
        } else {
            (other, self)
        };
        let d = hi.log_scale - lo.log_scale;
        if d > ALIGN_LIMIT {
            return *hi;
        }
        let m = hi.mantissa + lo.mantissa * pow2::<R>(-d);
        Self::with_scale(m, hi.log_scale)
    }

    pub fn scale_by(&self, c: R) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        Self::with_scale(self.mantissa * c, self.log_scale)
    }

    /// Shifts the base-2 exponent without touching the mantissa.
    pub fn shift(&self, delta: i64) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        ScaledValue {
            mantissa: self.mantissa,
            log_scale: self.log_scale + delta,
        }
    }

    /// Integer power by repeated squaring.
    pub fn powi(&self, mut e: u64) -> Self {
        if e == 0 {
            return Self::from_real(R::one());
        }
        if self.is_zero() {
            return Self::zero();
        }
        let mut base = *self;
        let mut acc = Self::from_real(R::one());
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Relative imaginary residue `|im| / |value|`; zero for the zero value.
    pub fn imag_residue(&self) -> f64 {
        let n = self.mantissa.norm();
        if n == R::zero() {
            0.0
        } else {
            (self.mantissa.im.abs() / n).to_f64_lossy()
        }
    }

    /// Real part collapsed to working precision (may overflow like
    /// [`Self::to_complex`]).
    pub fn real(&self) -> R {
        self.to_complex().re
    }
}

/// Exact power of two at working precision, safe for |e| beyond the exponent
/// range (saturates to 0 / infinity just like the underlying format).
fn pow2<R: Real>(e: i64) -> R {
    let two = R::from_f64_exact(2.0);
    let mut r = R::one();
    let step = 512i64;
    let mut rem = e;
    while rem >= step {
        r = r * two.powi(step as i32);
        rem -= step;
    }
    while rem <= -step {
        r = r * two.powi(-step as i32);
        rem += step;
    }
    r * two.powi(rem as i32)
}
