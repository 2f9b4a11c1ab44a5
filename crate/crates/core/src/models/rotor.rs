//! Quantum rotor front-end: plaquette ratio, central-difference
//! discretizations, and the topological susceptibility.
//!
//! All observables are ratios of trace evaluations over the kernels
//! `f(x) = exp(beta cos 2 pi x)` (denominator) and
//! `f0(x) = cos(2 pi x) f(x)` (numerator insertion). The coupling `beta` is
//! the sole input; the physical parameterization `beta = I L^2 / T^2`
//! (forward differences; the central variants carry extra factors 1/4 and
//! 1/144 absorbed into `beta`) is deliberately not modeled.

use crate::engine::{
    circulant_trace, trace_chain, trace_power, trace_power_insertion, CouplingProblem, FactorFn,
    GroupedProblem,
};
use crate::error::{Error, Result};
use crate::numerics::fft::{circulant_spectrum, Spectrum};
use crate::numerics::matrix::DenseMatrix;
use crate::numerics::scalar::Real;
use crate::numerics::scaled::ScaledValue;
use crate::rules::{cbc_generate, rectangle_rule, CbcConfig, LatticeRule};
use crate::engine::group_higher_order;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RotorObservable {
    Plaquette,
    TopologicalSusceptibility,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Discretization {
    Forward,
    Central2,
    Central4,
}

#[derive(Clone, Copy, Debug)]
pub struct RotorSpec<R: Real> {
    pub beta: R,
    pub l: u64,
    pub n: usize,
    pub observable: RotorObservable,
    pub discretization: Discretization,
}

impl<R: Real> RotorSpec<R> {
    pub fn plaquette(beta: R, l: u64, n: usize) -> Self {
        RotorSpec {
            beta,
            l,
            n,
            observable: RotorObservable::Plaquette,
            discretization: Discretization::Forward,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.beta < R::zero() || self.l < 2 || self.n < 2 {
            return Err(Error::InvalidArgument(format!(
                "RotorSpec: need beta >= 0, L >= 2, n >= 2 (beta={}, L={}, n={})",
                self.beta, self.l, self.n
            )));
        }
        Ok(())
    }
}

/// `f(x) = exp(beta cos 2 pi x)`.
pub fn rotor_f<R: Real>(beta: R, x: R) -> R {
    (beta * (R::PI() * R::from_f64_exact(2.0) * x).cos()).exp()
}

/// `f0(x) = cos(2 pi x) f(x)`.
pub fn rotor_f0<R: Real>(beta: R, x: R) -> R {
    (R::PI() * R::from_f64_exact(2.0) * x).cos() * rotor_f(beta, x)
}

/// Spectra of the denominator and numerator circulants at n rectangle-rule
/// points.
pub fn rotor_spectra<R: Real>(beta: R, n: usize) -> Result<(Spectrum<R>, Spectrum<R>)> {
    let f = circulant_spectrum(move |x| rotor_f(beta, x), n, true)?;
    let f0 = circulant_spectrum(move |x| rotor_f0(beta, x), n, true)?;
    Ok((f, f0))
}

/// Denominator trace `Z = sum_k Lambda_k^L` (partition function up to the
/// common normalization).
pub fn rotor_partition<R: Real>(beta: R, l: u64, n: usize) -> Result<ScaledValue<R>> {
    let f = circulant_spectrum(move |x| rotor_f(beta, x), n, true)?;
    Ok(circulant_trace(&[(&f, l)])?.value)
}

/// Plaquette ratio `<cos> = sum_k Lambda0_k Lambda_k^{L-1} / sum_k
/// Lambda_k^L` (forward discretization).
pub fn rotor_ratio<R: Real>(spec: &RotorSpec<R>) -> Result<R> {
    spec.validate()?;
    let (f, f0) = rotor_spectra(spec.beta, spec.n)?;
    let num = circulant_trace(&[(&f0, 1), (&f, spec.l - 1)])?;
    let den = circulant_trace(&[(&f, spec.l)])?;
    ratio_real(num.value, den.value)
}

fn ratio_real<R: Real>(num: ScaledValue<R>, den: ScaledValue<R>) -> Result<R> {
    let r = num.div(&den);
    if r.imag_residue() > 1e-10 {
        return Err(Error::ImaginaryResidue {
            residue: r.imag_residue(),
            tol: 1e-10,
        });
    }
    Ok(r.real())
}

/// Central-difference plaquette ratio.
///
/// central2: even L decouples into two independent half-size first-order
/// chains (the ratio observable reduces to the half-size ratio); odd L
/// relabels to the same-size first-order problem. central4 is an order-4
/// coupling solved through the grouped (theta-matrix) pipeline on the given
/// 4-dimensional lattice rule; when `rule` is None a CBC-generated rule with
/// N = spec.n (prime) is used.
pub fn rotor_central_difference<R: Real>(
    spec: &RotorSpec<R>,
    rule: Option<&LatticeRule>,
) -> Result<R> {
    spec.validate()?;
    match spec.discretization {
        Discretization::Forward => rotor_ratio(spec),
        Discretization::Central2 => {
            let l = if spec.l % 2 == 0 { spec.l / 2 } else { spec.l };
            rotor_ratio(&RotorSpec::plaquette(spec.beta, l, spec.n))
        }
        Discretization::Central4 => {
            let generated;
            let rule = match rule {
                Some(r) => r,
                None => {
                    generated = cbc_generate(4, spec.n as u64, &CbcConfig::default())?.rule;
                    &generated
                }
            };
            rotor_central4(spec.beta, spec.l, rule)
        }
    }
}

/// Denominator of the central2 discretization: `Z_1(L/2)^2` for even L
/// (decoupled chains), `Z_1(L)` for odd L.
pub fn rotor_central2_partition<R: Real>(beta: R, l: u64, n: usize) -> Result<ScaledValue<R>> {
    if l % 2 == 0 {
        let z = rotor_partition(beta, l / 2, n)?;
        Ok(z.mul(&z))
    } else {
        rotor_partition(beta, l, n)
    }
}

/// Central4 plaquette ratio via the order-4 grouped pipeline (theta-matrices
/// over a 4-dimensional lattice rule, scenario B4/B2).
pub fn rotor_central4<R: Real>(beta: R, l: u64, rule: &LatticeRule) -> Result<R> {
    if rule.dim() != 4 {
        return Err(Error::InvalidArgument(
            "rotor_central4: need a 4-dimensional lattice rule".into(),
        ));
    }
    if l < 8 {
        return Err(Error::InvalidArgument(
            "rotor_central4: need L >= 8 (two blocks of order-4 factors)".into(),
        ));
    }
    let comb = |w: &[R]| w[0] - R::from_f64_exact(8.0) * w[1] + R::from_f64_exact(8.0) * w[3] - w[4];
    let shared = FactorFn::new(5, move |w: &[R]| rotor_f(beta, comb(w)));
    let distinguished = FactorFn::new(5, move |w: &[R]| rotor_f0(beta, comb(w)));
    let quad = rule.to_quadrature::<R>();
    let aux = rectangle_rule::<R>(32)?;
    let den_problem = CouplingProblem::new(l as usize, shared.clone(), None)?;
    let num_problem = CouplingProblem::new(l as usize, shared, Some(distinguished))?;
    let den: GroupedProblem<R> = group_higher_order(&den_problem, &quad, &aux)?;
    let num = group_higher_order(&num_problem, &quad, &aux)?;
    ratio_real(num.evaluate()?.value, den.evaluate()?.value)
}

/// Topological charge insertion `q(delta) = ((delta + 1/2) mod 1) - 1/2`,
/// with the midpoint convention `q(1/2) = 0`.
pub fn topological_q<R: Real>(delta: R) -> R {
    let half = R::from_f64_exact(0.5);
    let m = crate::engine::mod1(delta + half) - half;
    if m == -half {
        R::zero()
    } else {
        m
    }
}

/// `q^2` via the raw sawtooth (no midpoint override): at the discontinuity
/// this yields the two-sided limit 1/4, which is the correct value of the
/// square kernel there.
fn topological_q2<R: Real>(delta: R) -> R {
    let half = R::from_f64_exact(0.5);
    let m = crate::engine::mod1(delta + half) - half;
    m * m
}

struct SusceptibilitySpectra<R: Real> {
    f: Spectrum<R>,
    g1: Spectrum<R>,
    g2: Spectrum<R>,
}

fn susceptibility_spectra<R: Real>(beta: R, n: usize) -> Result<SusceptibilitySpectra<R>> {
    let f = circulant_spectrum(move |x| rotor_f(beta, x), n, true)?;
    // g1 = q * f is odd, so its spectrum is genuinely complex
    let g1 = circulant_spectrum(move |x| topological_q(x) * rotor_f(beta, x), n, false)?;
    let g2 = circulant_spectrum(move |x| topological_q2(x) * rotor_f(beta, x), n, true)?;
    Ok(SusceptibilitySpectra { f, g1, g2 })
}

/// Topological susceptibility `chi_t = <Q^2>/L` with
/// `<Q^2> Z = L S_2 + L(L-1) S_11`, where `S_2` carries one `q^2 f`
/// insertion and `S_11` two `q f` insertions. All circulants share the
/// Fourier eigenbasis, so the two-insertion trace is independent of the
/// separation d and the L separate chain problems collapse to
/// one (see [`rotor_susceptibility_literal`] for the literal path).
pub fn rotor_susceptibility<R: Real>(spec: &RotorSpec<R>) -> Result<R> {
    spec.validate()?;
    let l = spec.l;
    let s = susceptibility_spectra(spec.beta, spec.n)?;
    let z = circulant_trace(&[(&s.f, l)])?.value;
    let s2 = circulant_trace(&[(&s.g2, 1), (&s.f, l - 1)])?.value;
    let s11 = if l == 2 {
        circulant_trace(&[(&s.g1, 2)])?.value
    } else {
        circulant_trace(&[(&s.g1, 2), (&s.f, l - 2)])?.value
    };
    // chi = S2/Z + (L-1) S11/Z
    let lm1 = R::from_u64(l - 1).expect("L representable");
    let chi = s2.div(&z).add(&s11.div(&z).scale_by(lm1));
    if chi.imag_residue() > 1e-10 {
        return Err(Error::ImaginaryResidue {
            residue: chi.imag_residue(),
            tol: 1e-10,
        });
    }
    Ok(chi.real())
}

/// Literal per-separation susceptibility: L(L-1) two-insertion chain traces
/// evaluated as dense matrix chains, plus the one-insertion trace. Retained
/// as a validation path for [`rotor_susceptibility`].
pub fn rotor_susceptibility_literal<R: Real>(spec: &RotorSpec<R>) -> Result<R> {
    spec.validate()?;
    let n = spec.n;
    let l = spec.l as usize;
    let beta = spec.beta;
    let rule = rectangle_rule::<R>(n)?;
    let nn = R::from_usize_exact(n);
    let xs: Vec<R> = (0..n).map(|k| R::from_usize_exact(k) / nn).collect();
    let diff = |p: usize, q: usize| crate::engine::mod1(xs[q] - xs[p]);
    let mf = DenseMatrix::from_fn(n, |p, q| rotor_f(beta, diff(p, q)));
    let mg1 = DenseMatrix::from_fn(n, |p, q| {
        topological_q(diff(p, q)) * rotor_f(beta, diff(p, q))
    });
    let mg2 = DenseMatrix::from_fn(n, |p, q| {
        topological_q2(diff(p, q)) * rotor_f(beta, diff(p, q))
    });
    let w = &rule.weights;
    let z = trace_power(&mf, w, spec.l)?.value;
    let s2 = trace_power_insertion(&mg2, &mf, w, spec.l)?.value;
    // sum over separations d = 1..L-1 of the two-insertion chains
    let mut pair_sum = ScaledValue::zero();
    for d in 1..l {
        let mut chain: Vec<DenseMatrix<R>> = Vec::with_capacity(l);
        chain.push(mg1.clone());
        for _ in 1..d {
            chain.push(mf.clone());
        }
        chain.push(mg1.clone());
        for _ in (d + 1)..l {
            chain.push(mf.clone());
        }
        pair_sum = pair_sum.add(&trace_chain(&chain, w)?.value);
    }
    // <Q^2> Z = L S2 + L * pair_sum (translation invariance supplies the
    // factor L over the d-sum); chi = <Q^2>/L = (S2 + pair_sum)/Z
    let chi = s2.div(&z).add(&pair_sum.div(&z));
    if chi.imag_residue() > 1e-10 {
        return Err(Error::ImaginaryResidue {
            residue: chi.imag_residue(),
            tol: 1e-10,
        });
    }
    Ok(chi.real())
}
