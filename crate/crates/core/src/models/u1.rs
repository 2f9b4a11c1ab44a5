//! Compact U(1) lattice gauge theory in 2D: the nested inner/outer trace
//! method and the reduced method (plaquette expectation equals the rotor
//! ratio at L' = L^2), plus the closed-form 1x1 Wilson loop.

use num_complex::Complex;

use super::fourier::FourierTable;
use super::rotor::{rotor_f, rotor_f0, RotorSpec};
use crate::engine::circulant_trace;
use crate::error::{Error, Result};
use crate::numerics::fft::{circulant_spectrum, spectrum_from_column, Spectrum};
use crate::numerics::scalar::Real;
use crate::numerics::scaled::ScaledValue;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum U1Method {
    Nested,
    Reduced,
}

#[derive(Clone, Copy, Debug)]
pub struct U1Spec2D<R: Real> {
    pub beta: R,
    /// Lattice extent L (the integral has 2 L^2 variables).
    pub l: u64,
    /// Inner / 1D quadrature points.
    pub n: usize,
    /// Outer points (nested method only).
    pub n_outer: usize,
    pub method: U1Method,
}

impl<R: Real> U1Spec2D<R> {
    pub fn reduced(beta: R, l: u64, n: usize) -> Self {
        U1Spec2D {
            beta,
            l,
            n,
            n_outer: n,
            method: U1Method::Reduced,
        }
    }

    pub fn nested(beta: R, l: u64, n: usize, n_outer: usize) -> Self {
        U1Spec2D {
            beta,
            l,
            n,
            n_outer,
            method: U1Method::Nested,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.beta < R::zero() || self.l < 2 || self.n < 2 || self.n_outer < 2 {
            return Err(Error::InvalidArgument(format!(
                "U1Spec2D: need beta >= 0, L >= 2, n, N >= 2 (L={}, n={}, N={})",
                self.l, self.n, self.n_outer
            )));
        }
        Ok(())
    }
}

/// Plaquette expectation of the 2D model.
pub fn u1_2d<R: Real>(spec: &U1Spec2D<R>) -> Result<R> {
    spec.validate()?;
    match spec.method {
        U1Method::Reduced => {
            // one first-order chain of length L^2
            let l2 = spec.l * spec.l;
            super::rotor::rotor_ratio(&RotorSpec::plaquette(spec.beta, l2, spec.n))
        }
        U1Method::Nested => u1_2d_nested(spec),
    }
}

/// Nested method: for every outer offset y = k/N, the inner L-variable chain
/// is a first-order trace with one offset factor; the N inner values then
/// form the (circulant) outer chain, again a first-order trace.
fn u1_2d_nested<R: Real>(spec: &U1Spec2D<R>) -> Result<R> {
    let beta = spec.beta;
    let n = spec.n;
    let n_outer = spec.n_outer;
    let l = spec.l;
    let f: Spectrum<R> = circulant_spectrum(move |x| rotor_f(beta, x), n, true)?;
    let nn_outer = R::from_usize_exact(n_outer);

    // inner traces g(k/N), g0(k/N): one offset factor kappa_y(d) = f(y - d)
    // (resp. f0), then L-1 plain factors
    let mut g: Vec<ScaledValue<R>> = Vec::with_capacity(n_outer);
    let mut g0: Vec<ScaledValue<R>> = Vec::with_capacity(n_outer);
    for k in 0..n_outer {
        let y = R::from_usize_exact(k) / nn_outer;
        let ky = circulant_spectrum(move |d| rotor_f(beta, y - d), n, false)?;
        let k0y = circulant_spectrum(move |d| rotor_f0(beta, y - d), n, false)?;
        g.push(circulant_trace(&[(&ky, 1), (&f, l - 1)])?.value);
        g0.push(circulant_trace(&[(&k0y, 1), (&f, l - 1)])?.value);
    }

    // outer circulant chains over the inner values
    let spec_g = outer_spectrum(&g, n_outer)?;
    let spec_g0 = outer_spectrum(&g0, n_outer)?;
    let num = circulant_trace(&[(&spec_g0, 1), (&spec_g, l - 1)])?.value;
    let den = circulant_trace(&[(&spec_g, l)])?.value;
    let r = num.div(&den);
    if r.imag_residue() > 1e-10 {
        return Err(Error::ImaginaryResidue {
            residue: r.imag_residue(),
            tol: 1e-10,
        });
    }
    Ok(r.real())
}

/// Outer circulant spectrum from scale-managed inner chain values: first
/// column c_p = g((-p mod N)/N)/N, forward DFT, with the common magnitude
/// carried in the spectrum's log scale.
fn outer_spectrum<R: Real>(g: &[ScaledValue<R>], n: usize) -> Result<Spectrum<R>> {
    let reference = g
        .iter()
        .filter_map(ScaledValue::abs_log2)
        .fold(f64::NEG_INFINITY, f64::max);
    let reference = if reference.is_finite() {
        reference.round() as i64
    } else {
        0
    };
    let nn = R::from_usize_exact(n);
    let mut col: Vec<Complex<R>> = (0..n)
        .map(|p| g[(n - p) % n].to_complex_at_scale(reference) / nn)
        .collect();
    // the inner chain values are real; their rounding-level imaginary parts
    // are judged against the largest entry (values that are themselves at
    // noise level relative to the table carry meaningless phases)
    let max = col
        .iter()
        .map(|v| v.norm())
        .fold(R::zero(), |a, b| if b > a { b } else { a });
    let tol = R::from_f64_exact(1e-8) * max;
    for v in &mut col {
        if v.im.abs() > tol {
            return Err(Error::ImaginaryResidue {
                residue: (v.im.abs() / max).to_f64_lossy(),
                tol: 1e-8,
            });
        }
        v.im = R::zero();
    }
    // inner chain values are real (declared even: g(y) = g(-y) for the even
    // kernel f), so the outer spectrum is real
    let mut spec = spectrum_from_column(&col, true)?;
    spec.log_scale += reference;
    Ok(spec)
}

#[derive(Clone, Copy, Debug)]
pub struct WilsonSpec<R: Real> {
    pub beta: R,
    pub l: u64,
    pub r_a: u64,
    pub r_b: u64,
    pub l_max: i64,
}

/// Denominator of the 1x1 Wilson loop via the Fourier-series closed form:
/// odd L sums `f_hat(ell)^(L^2)`; even L is the product of the two
/// chessboard sums (L^2/2 factors each).
pub fn wilson11<R: Real>(spec: &WilsonSpec<R>) -> Result<R> {
    if spec.r_a != 1 || spec.r_b != 1 {
        return Err(Error::Unsupported(
            "wilson11: only r_a = r_b = 1 has a closed-form path; larger loops are truly \
             high dimensional"
                .into(),
        ));
    }
    if spec.l < 2 {
        return Err(Error::InvalidArgument("wilson11: need L >= 2".into()));
    }
    let table = FourierTable::from_bessel(spec.beta, spec.l_max)?;
    table.check_tail(R::from_f64_exact(1e-18))?;
    let l2 = spec.l * spec.l;
    if spec.l % 2 == 1 {
        let mut total = ScaledValue::zero();
        for ell in -spec.l_max..=spec.l_max {
            total = total.add(&ScaledValue::from_real(table.get(ell)).powi(l2));
        }
        Ok(total.real())
    } else {
        let mut half_sum = ScaledValue::zero();
        for ell in -spec.l_max..=spec.l_max {
            half_sum = half_sum.add(&ScaledValue::from_real(table.get(ell)).powi(l2 / 2));
        }
        Ok(half_sum.mul(&half_sum).real())
    }
}
