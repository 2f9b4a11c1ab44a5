//! Truncated Fourier coefficient tables and the 1D Fourier-series
//! reformulation: an L-factor first-order chain integrates to
//! `sum_ell prod_i f_hat_i(ell)`, and a second-order chain splits into
//! even/odd-index sub-chains when L is even.

use crate::error::{Error, Result};
use crate::numerics::bessel::bessel_i;
use crate::numerics::scalar::Real;
use crate::numerics::scaled::ScaledValue;

/// How a Fourier table was produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Provenance {
    BesselSeries,
    NumericalQuadrature,
}

/// Real Fourier coefficients `f_hat(ell)` for `ell in {-l_max..l_max}`.
#[derive(Clone, Debug)]
pub struct FourierTable<R: Real> {
    l_max: i64,
    /// coeffs[(ell + l_max) as usize]
    coeffs: Vec<R>,
    pub provenance: Provenance,
}

impl<R: Real> FourierTable<R> {
    pub fn new(l_max: i64, coeffs: Vec<R>, provenance: Provenance) -> Result<Self> {
        if l_max < 0 || coeffs.len() != (2 * l_max + 1) as usize {
            return Err(Error::InvalidArgument(format!(
                "FourierTable: need 2*l_max+1 coefficients, got {} for l_max={l_max}",
                coeffs.len()
            )));
        }
        Ok(FourierTable {
            l_max,
            coeffs,
            provenance,
        })
    }

    /// Coefficients of `exp(beta cos 2 pi x)`: `f_hat(ell) = I_|ell|(beta)`.
    pub fn from_bessel(beta: R, l_max: i64) -> Result<Self> {
        let coeffs = (-l_max..=l_max)
            .map(|ell| bessel_i(ell.unsigned_abs() as u32, beta))
            .collect();
        Self::new(l_max, coeffs, Provenance::BesselSeries)
    }

    /// Coefficients of `cos(2 pi x) exp(beta cos 2 pi x)`:
    /// `f_hat(ell) = (I_|ell-1| + I_|ell+1|)/2`.
    pub fn from_bessel_cos(beta: R, l_max: i64) -> Result<Self> {
        let half = R::from_f64_exact(0.5);
        let coeffs = (-l_max..=l_max)
            .map(|ell| {
                (bessel_i((ell - 1).unsigned_abs() as u32, beta)
                    + bessel_i((ell + 1).unsigned_abs() as u32, beta))
                    * half
            })
            .collect();
        Self::new(l_max, coeffs, Provenance::BesselSeries)
    }

    /// Cosine-transform quadrature `f_hat(ell) ~= (1/n) sum_j kappa(j/n)
    /// cos(2 pi ell j/n)` for real even kernels.
    pub fn from_quadrature(kappa: impl Fn(R) -> R, n: usize, l_max: i64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("from_quadrature: n = 0".into()));
        }
        let nn = R::from_usize_exact(n);
        let tau = R::PI() * R::from_f64_exact(2.0);
        let samples: Vec<R> = (0..n).map(|j| kappa(R::from_usize_exact(j) / nn)).collect();
        let coeffs = (-l_max..=l_max)
            .map(|ell| {
                let mut acc = R::zero();
                for (j, &s) in samples.iter().enumerate() {
                    let phi = tau * R::from_f64_exact(ell as f64) * R::from_usize_exact(j) / nn;
                    acc += s * phi.cos();
                }
                acc / nn
            })
            .collect();
        Self::new(l_max, coeffs, Provenance::NumericalQuadrature)
    }

    pub fn l_max(&self) -> i64 {
        self.l_max
    }

    /// `f_hat(ell)`; zero outside the truncation window.
    pub fn get(&self, ell: i64) -> R {
        if ell.abs() > self.l_max {
            R::zero()
        } else {
            self.coeffs[(ell + self.l_max) as usize]
        }
    }

    /// Checks the declared truncation tolerance at the window edge.
    pub fn check_tail(&self, tol: R) -> Result<()> {
        let edge = self.get(self.l_max).abs().max(self.get(-self.l_max).abs());
        if edge > tol {
            return Err(Error::TailBound(format!(
                "|f_hat(+-{})| = {:e} exceeds tolerance {:e}",
                self.l_max,
                edge.to_f64_lossy(),
                tol.to_f64_lossy()
            )));
        }
        Ok(())
    }
}

/// Coupling structure of the 1D Fourier sum.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CouplingOrder {
    First,
    Second,
}

/// `sum_ell prod_i f_hat_i(ell)` (first order), or the even/odd split for
/// second order with an even number of factors. Accumulated in scaled
/// arithmetic so long products of sub-unit coefficients do not underflow.
pub fn fourier_sum_1d<R: Real>(
    tables: &[FourierTable<R>],
    coupling: CouplingOrder,
) -> Result<R> {
    if tables.is_empty() {
        return Err(Error::InvalidArgument("fourier_sum_1d: no tables".into()));
    }
    let l_max = tables[0].l_max;
    for t in tables {
        if t.l_max != l_max {
            return Err(Error::InvalidArgument(
                "fourier_sum_1d: inconsistent l_max".into(),
            ));
        }
    }
    let l = tables.len();
    match coupling {
        CouplingOrder::First => Ok(product_sum(tables, |_| true).real()),
        CouplingOrder::Second => {
            if l % 2 == 1 {
                Ok(product_sum(tables, |_| true).real())
            } else {
                let even = product_sum(tables, |i| i % 2 == 0);
                let odd = product_sum(tables, |i| i % 2 == 1);
                Ok(even.mul(&odd).real())
            }
        }
    }
}

fn product_sum<R: Real>(
    tables: &[FourierTable<R>],
    select: impl Fn(usize) -> bool,
) -> ScaledValue<R> {
    let l_max = tables[0].l_max;
    let mut total = ScaledValue::zero();
    for ell in -l_max..=l_max {
        let mut term = ScaledValue::from_real(R::one());
        for (i, t) in tables.iter().enumerate() {
            if select(i) {
                term = term.mul(&ScaledValue::from_real(t.get(ell)));
            }
        }
        total = total.add(&term);
    }
    total
}
