//! The scenario ladder: trace-of-chain evaluation of the tensor-product
//! cubature formula for first-order and order-r couplings.
//!
//! A problem with L factors and coupling order r on the periodic index
//! convention `x_i == x_{i mod L}` reduces to the trace
//! `Q = trace(W^{1/2} M_0 W M_1 W ... M_{L-1} W^{1/2})`, which specializes
//! down a ladder of strategies: full chains, matrix powers, spectral sums,
//! and FFT-diagonalized circulant traces. Order-r couplings are grouped into
//! theta-matrices over an r-dimensional cubature rule first.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::numerics::fft::{spectrum_from_column, Spectrum};
use crate::numerics::matrix::{mat_mul, mat_power, rescale, sym_eigenvalues, DenseMatrix};
use crate::numerics::scalar::Real;
use crate::numerics::scaled::ScaledValue;
use crate::rules::QuadratureRule;

/// Strategy tag of a trace evaluation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scenario {
    A0,
    A1,
    A2,
    A3,
    A4,
    A5,
    A6,
    A7,
    B1,
    B2,
    B3,
    B4,
    B5,
    B6,
    B7,
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self)
    }
}

impl Scenario {
    /// The order-r analogue of a first-order tag.
    pub fn to_grouped(self) -> Scenario {
        match self {
            Scenario::A1 => Scenario::B1,
            Scenario::A2 => Scenario::B2,
            Scenario::A3 => Scenario::B3,
            Scenario::A4 => Scenario::B4,
            Scenario::A5 => Scenario::B5,
            Scenario::A6 => Scenario::B6,
            Scenario::A7 => Scenario::B7,
            other => other,
        }
    }
}

/// Result of a trace evaluation: a scale-managed value plus diagnostics.
#[derive(Clone, Debug)]
pub struct TraceResult<R: Real> {
    pub value: ScaledValue<R>,
    pub scenario: Scenario,
    pub n: usize,
    pub imag_residue: f64,
}

impl<R: Real> TraceResult<R> {
    /// Real value with the imaginary residue checked (<= 1e-10 relative).
    pub fn real_value(&self) -> Result<R> {
        if self.imag_residue > 1e-10 {
            return Err(Error::ImaginaryResidue {
                residue: self.imag_residue,
                tol: 1e-10,
            });
        }
        Ok(self.value.real())
    }

    fn from_scaled(value: ScaledValue<R>, scenario: Scenario, n: usize) -> Self {
        TraceResult {
            imag_residue: value.imag_residue(),
            value,
            scenario,
            n,
        }
    }
}

type DiffFn<R> = Arc<dyn Fn(&[R]) -> R + Send + Sync>;
type PairFn<R> = Arc<dyn Fn(&[R], &[R]) -> R + Send + Sync>;

enum KernelForm<R: Real> {
    /// `f(u, v) = kappa((v - u) mod 1)`, componentwise difference.
    Difference(DiffFn<R>),
    /// General two-argument factor `f(u, v)`.
    General(PairFn<R>),
}

impl<R: Real> Clone for KernelForm<R> {
    fn clone(&self) -> Self {
        match self {
            KernelForm::Difference(f) => KernelForm::Difference(f.clone()),
            KernelForm::General(f) => KernelForm::General(f.clone()),
        }
    }
}

/// A periodic factor f_i(u, v) on the unit cube, with structure flags that
/// drive scenario selection. Flags are declared by the constructor, never
/// sniffed numerically.
#[derive(Clone)]
pub struct KernelFunction<R: Real> {
    form: KernelForm<R>,
    pub is_even: bool,
    pub is_periodic: bool,
}

impl<R: Real> KernelFunction<R> {
    /// 1D difference kernel `kappa(delta)`; `even` declares
    /// `kappa(x) = kappa(1-x)`.
    pub fn difference_1d(kappa: impl Fn(R) -> R + Send + Sync + 'static, even: bool) -> Self {
        KernelFunction {
            form: KernelForm::Difference(Arc::new(move |d: &[R]| kappa(d[0]))),
            is_even: even,
            is_periodic: true,
        }
    }

    /// s-dimensional difference kernel `kappa(delta_1..delta_s)`.
    pub fn difference(kappa: impl Fn(&[R]) -> R + Send + Sync + 'static, even: bool) -> Self {
        KernelFunction {
            form: KernelForm::Difference(Arc::new(kappa)),
            is_even: even,
            is_periodic: true,
        }
    }

    /// General factor `f(u, v)`.
    pub fn general(f: impl Fn(&[R], &[R]) -> R + Send + Sync + 'static) -> Self {
        KernelFunction {
            form: KernelForm::General(Arc::new(f)),
            is_even: false,
            is_periodic: true,
        }
    }

    pub fn is_difference(&self) -> bool {
        matches!(self.form, KernelForm::Difference(_))
    }

    /// Difference-kernel evaluation at an explicit offset vector.
    pub fn kappa(&self, delta: &[R]) -> Option<R> {
        match &self.form {
            KernelForm::Difference(f) => Some(f(delta)),
            KernelForm::General(_) => None,
        }
    }

    /// `f(u, v)`; for difference kernels this factors through `(v-u) mod 1`.
    pub fn eval_pair(&self, u: &[R], v: &[R]) -> R {
        match &self.form {
            KernelForm::Difference(f) => {
                let delta: Vec<R> = u
                    .iter()
                    .zip(v)
                    .map(|(&a, &b)| mod1(b - a))
                    .collect();
                f(&delta)
            }
            KernelForm::General(f) => f(u, v),
        }
    }
}

/// Reduces x into [0, 1).
pub fn mod1<R: Real>(x: R) -> R {
    let f = x.fract();
    if f < R::zero() {
        f + R::one()
    } else {
        f
    }
}

/// One factor of a coupling problem: a map from `arity` consecutive cyclic
/// variables to a Real.
pub struct FactorFn<R: Real> {
    arity: usize,
    f: DiffFn<R>,
}

impl<R: Real> Clone for FactorFn<R> {
    fn clone(&self) -> Self {
        FactorFn {
            arity: self.arity,
            f: self.f.clone(),
        }
    }
}

impl<R: Real> FactorFn<R> {
    /// `arity` = number of consecutive variables the factor touches (r + 1
    /// for coupling order r).
    pub fn new(arity: usize, f: impl Fn(&[R]) -> R + Send + Sync + 'static) -> Self {
        assert!(arity >= 2, "a coupling factor touches at least two variables");
        FactorFn {
            arity,
            f: Arc::new(f),
        }
    }

    /// Wraps a two-argument kernel as an arity-2 (first-order) factor.
    pub fn from_kernel(kernel: &KernelFunction<R>) -> Self {
        let kernel = kernel.clone();
        FactorFn {
            arity: 2,
            f: Arc::new(move |w: &[R]| kernel.eval_pair(&w[..1], &w[1..2])),
        }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn eval(&self, w: &[R]) -> R {
        debug_assert_eq!(w.len(), self.arity);
        (self.f)(w)
    }
}

/// L factors of coupling order r on cyclic variables, with an optional
/// distinguished factor at index 0 (numerator insertions).
pub struct CouplingProblem<R: Real> {
    pub length: usize,
    pub order: usize,
    pub shared: FactorFn<R>,
    pub distinguished: Option<FactorFn<R>>,
}

impl<R: Real> CouplingProblem<R> {
    pub fn new(
        length: usize,
        shared: FactorFn<R>,
        distinguished: Option<FactorFn<R>>,
    ) -> Result<Self> {
        let order = shared.arity() - 1;
        if length < 2 || order < 1 || order > length - 1 {
            return Err(Error::InvalidArgument(format!(
                "CouplingProblem: need 1 <= r <= L-1, got r={order}, L={length}"
            )));
        }
        if let Some(d) = &distinguished {
            if d.arity() != shared.arity() {
                return Err(Error::InvalidArgument(
                    "CouplingProblem: distinguished factor arity mismatch".into(),
                ));
            }
        }
        Ok(CouplingProblem {
            length,
            order,
            shared,
            distinguished,
        })
    }

    pub fn first_order(
        length: usize,
        kernel: &KernelFunction<R>,
        distinguished: Option<&KernelFunction<R>>,
    ) -> Result<Self> {
        Self::new(
            length,
            FactorFn::from_kernel(kernel),
            distinguished.map(FactorFn::from_kernel),
        )
    }

    fn factor(&self, i: usize) -> &FactorFn<R> {
        if i == 0 {
            self.distinguished.as_ref().unwrap_or(&self.shared)
        } else {
            &self.shared
        }
    }
}

/// Scenario A0: full tensor-product enumeration over n^L grid points.
/// Guarded at n^L <= 1e8.
pub fn naive_product_rule<R: Real>(
    problem: &CouplingProblem<R>,
    rule: &QuadratureRule<R>,
) -> Result<TraceResult<R>> {
    if rule.dim() != 1 {
        return Err(Error::InvalidArgument(
            "naive_product_rule: expects a 1D rule per variable".into(),
        ));
    }
    let n = rule.n();
    let l = problem.length;
    let r = problem.order;
    let cost = (n as f64).powi(l as i32);
    if cost > 1e8 {
        return Err(Error::Capacity(format!(
            "naive_product_rule: n^L = {cost:.3e} exceeds 1e8"
        )));
    }
    let xs: Vec<R> = rule.points.iter().map(|p| p[0]).collect();
    let ws = &rule.weights;
    let mut idx = vec![0usize; l];
    let mut total = R::zero();
    let mut args = vec![R::zero(); r + 1];
    loop {
        let mut term = R::one();
        for &k in &idx {
            term *= ws[k];
        }
        for i in 0..l {
            for t in 0..=r {
                args[t] = xs[idx[(i + t) % l]];
            }
            term *= problem.factor(i).eval(&args);
        }
        total += term;
        // odometer
        let mut d = l;
        loop {
            if d == 0 {
                return Ok(TraceResult::from_scaled(
                    ScaledValue::from_real(total),
                    Scenario::A0,
                    n,
                ));
            }
            d -= 1;
            idx[d] += 1;
            if idx[d] < n {
                break;
            }
            idx[d] = 0;
        }
    }
}

/// `(M)_{p,q} = f(t_p, t_q)` over the cubature points.
pub fn build_factor_matrix<R: Real>(
    f: &KernelFunction<R>,
    points: &[Vec<R>],
) -> DenseMatrix<R> {
    let n = points.len();
    DenseMatrix::from_fn(n, |p, q| f.eval_pair(&points[p], &points[q]))
}

fn sqrt_weights<R: Real>(weights: &[R]) -> Vec<R> {
    weights.iter().map(|&w| w.sqrt()).collect()
}

/// `W^{1/2} M W^{1/2}`.
pub fn weight_sandwich<R: Real>(m: &DenseMatrix<R>, weights: &[R]) -> DenseMatrix<R> {
    let sw = sqrt_weights(weights);
    let mut a = m.clone();
    a.scale_rows(&sw);
    a.scale_cols(&sw);
    a
}

fn check_orders<R: Real>(matrices: &[&DenseMatrix<R>], n: usize) -> Result<()> {
    for m in matrices {
        if m.order() != n {
            return Err(Error::InvalidArgument(format!(
                "matrix order {} does not match weight count {n}",
                m.order()
            )));
        }
    }
    Ok(())
}

/// Scenario A1/B1: `trace(W^{1/2} M_0 W M_1 W ... M_{L-1} W^{1/2})` with
/// per-step max-entry rescaling. Cost O(L n^3).
pub fn trace_chain<R: Real>(
    matrices: &[DenseMatrix<R>],
    weights: &[R],
) -> Result<TraceResult<R>> {
    if matrices.is_empty() {
        return Err(Error::InvalidArgument("trace_chain: no matrices".into()));
    }
    let n = weights.len();
    check_orders(&matrices.iter().collect::<Vec<_>>(), n)?;
    let sw = sqrt_weights(weights);
    let mut c = matrices[0].clone();
    c.scale_rows(&sw);
    let mut log_scale = rescale(&mut c);
    for m in &matrices[1..] {
        c.scale_cols(weights);
        c = mat_mul(&c, m)?;
        log_scale += rescale(&mut c);
    }
    c.scale_cols(&sw);
    let value = ScaledValue::with_scale(Complex::new(c.trace(), R::zero()), log_scale);
    Ok(TraceResult::from_scaled(value, Scenario::A1, n))
}

/// Scenario A2/B2: `trace((W^{1/2} M W^{1/2})^L)` by squaring. Cost
/// O(log L * n^3).
pub fn trace_power<R: Real>(
    m: &DenseMatrix<R>,
    weights: &[R],
    l: u64,
) -> Result<TraceResult<R>> {
    let n = weights.len();
    check_orders(&[m], n)?;
    let a = weight_sandwich(m, weights);
    let (p, e) = mat_power(&a, l)?;
    let value = ScaledValue::with_scale(Complex::new(p.trace(), R::zero()), e);
    Ok(TraceResult::from_scaled(value, Scenario::A2, n))
}

/// Scenario A3/B3: `sum_k lambda_k^L` over the eigenvalues of the symmetric
/// `W^{1/2} M W^{1/2}`.
pub fn trace_spectral<R: Real>(
    m: &DenseMatrix<R>,
    weights: &[R],
    l: u64,
) -> Result<TraceResult<R>> {
    let n = weights.len();
    check_orders(&[m], n)?;
    let a = weight_sandwich(m, weights);
    let eigs = sym_eigenvalues(&a).map_err(|e| match e {
        Error::NotSymmetric { row, col, delta } => Error::InvalidArgument(format!(
            "trace_spectral: matrix not symmetric (worst pair ({row},{col}), delta {delta:.3e}); \
             use trace_power instead"
        )),
        other => other,
    })?;
    let mut total = ScaledValue::zero();
    for lam in eigs {
        total = total.add(&ScaledValue::from_real(lam).powi(l));
    }
    Ok(TraceResult::from_scaled(total, Scenario::A3, n))
}

/// Scenario A4/B4: `trace(W^{1/2} M_0 W^{1/2} (W^{1/2} M W^{1/2})^{L-1})`.
pub fn trace_power_insertion<R: Real>(
    m0: &DenseMatrix<R>,
    m: &DenseMatrix<R>,
    weights: &[R],
    l: u64,
) -> Result<TraceResult<R>> {
    let n = weights.len();
    check_orders(&[m0, m], n)?;
    let b0 = weight_sandwich(m0, weights);
    if l == 1 {
        let value = ScaledValue::from_real(b0.trace());
        return Ok(TraceResult::from_scaled(value, Scenario::A4, n));
    }
    let a = weight_sandwich(m, weights);
    let (p, e) = mat_power(&a, l - 1)?;
    let c = mat_mul(&b0, &p)?;
    let value = ScaledValue::with_scale(Complex::new(c.trace(), R::zero()), e);
    Ok(TraceResult::from_scaled(value, Scenario::A4, n))
}

/// Scenarios A5/A6/A7 (and gated B analogues): `sum_k prod_i Lambda_{i,k}^{e_i}`
/// over shared-eigenbasis circulant spectra.
pub fn circulant_trace<R: Real>(
    spectra: &[(&Spectrum<R>, u64)],
) -> Result<TraceResult<R>> {
    if spectra.is_empty() {
        return Err(Error::InvalidArgument("circulant_trace: no spectra".into()));
    }
    let n = spectra[0].0.len();
    let mut scale = 0i64;
    for (s, e) in spectra {
        if s.len() != n {
            return Err(Error::InvalidArgument(format!(
                "circulant_trace: spectrum length {} != {n}",
                s.len()
            )));
        }
        if *e == 0 {
            return Err(Error::InvalidArgument(
                "circulant_trace: exponents must be >= 1".into(),
            ));
        }
        scale += s.log_scale * (*e as i64);
    }
    let mut total = ScaledValue::zero();
    for k in 0..n {
        let mut term = ScaledValue::from_real(R::one());
        for (s, e) in spectra {
            term = term.mul(&ScaledValue::new(s.values[k]).powi(*e));
        }
        total = total.add(&term);
    }
    let total = total.shift(scale);
    let scenario = match (spectra.len(), spectra[0].1) {
        (1, _) => Scenario::A6,
        (2, 1) => Scenario::A7,
        _ => Scenario::A5,
    };
    Ok(TraceResult::from_scaled(total, scenario, n))
}

/// An order-r problem reduced to a chain of theta-matrices over an
/// r-dimensional cubature rule.
pub struct GroupedProblem<R: Real> {
    /// Number of theta blocks (floor(L/r); block 0 absorbs the remainder).
    pub block_count: usize,
    pub order: usize,
    pub shared: DenseMatrix<R>,
    /// Present when block 0 differs: remainder adjustment and/or a
    /// distinguished factor.
    pub block0: Option<DenseMatrix<R>>,
    pub weights: Vec<R>,
    /// True when r does not divide L and block 0 is the adjusted theta-tilde.
    pub adjusted: bool,
}

/// Groups r consecutive factors into theta-matrices over the given
/// r-dimensional rule. When r does not divide L, the surplus `L mod r`
/// variables are integrated out of block 0 with the (1D) `aux_rule`, and
/// block 0 also absorbs any distinguished factor.
pub fn group_higher_order<R: Real>(
    problem: &CouplingProblem<R>,
    rule: &QuadratureRule<R>,
    aux_rule: &QuadratureRule<R>,
) -> Result<GroupedProblem<R>> {
    let r = problem.order;
    let l = problem.length;
    if rule.dim() != r {
        return Err(Error::InvalidArgument(format!(
            "group_higher_order: rule dimension {} != coupling order {r}",
            rule.dim()
        )));
    }
    if l < 2 * r {
        return Err(Error::InvalidArgument(format!(
            "group_higher_order: need L >= 2r (L={l}, r={r}); grouping degenerates"
        )));
    }
    if aux_rule.dim() != 1 {
        return Err(Error::InvalidArgument(
            "group_higher_order: aux rule must be 1D".into(),
        ));
    }
    let m = l % r;
    let block_count = l / r;
    let n = rule.n();
    let points = &rule.points;

    // shared theta: r factors chained across u -> v
    let shared = DenseMatrix::from_fn(n, |p, q| {
        let mut w = Vec::with_capacity(2 * r);
        w.extend_from_slice(&points[p]);
        w.extend_from_slice(&points[q]);
        let mut prod = R::one();
        for k in 0..r {
            prod *= problem.shared.eval(&w[k..k + r + 1]);
        }
        prod
    });

    let needs_block0 = m != 0 || problem.distinguished.is_some();
    let block0 = if needs_block0 {
        // aux tensor grid for the m surplus variables (single empty point
        // when m = 0)
        let aux = if m == 0 {
            QuadratureRule {
                points: vec![vec![]],
                weights: vec![R::one()],
            }
        } else {
            QuadratureRule::tensor_power(aux_rule, m)
        };
        let mut mat = DenseMatrix::zeros(n);
        let mut w = vec![R::zero(); 2 * r + m];
        for p in 0..n {
            for q in 0..n {
                let mut acc = R::zero();
                for (y, &wy) in aux.points.iter().zip(&aux.weights) {
                    w[..r].copy_from_slice(&points[p]);
                    w[r..r + m].copy_from_slice(y);
                    w[r + m..].copy_from_slice(&points[q]);
                    let mut prod = wy;
                    for j in 0..r + m {
                        prod *= problem.factor(j).eval(&w[j..j + r + 1]);
                    }
                    acc += prod;
                }
                mat.set(p, q, acc);
            }
        }
        Some(mat)
    } else {
        None
    };

    Ok(GroupedProblem {
        block_count,
        order: r,
        shared,
        block0,
        weights: rule.weights.clone(),
        adjusted: m != 0,
    })
}

impl<R: Real> GroupedProblem<R> {
    /// Evaluates the grouped chain: B4 when block 0 differs, else B2.
    pub fn evaluate(&self) -> Result<TraceResult<R>> {
        let l = self.block_count as u64;
        let mut res = match &self.block0 {
            Some(b0) => trace_power_insertion(b0, &self.shared, &self.weights, l)?,
            None => trace_power(&self.shared, &self.weights, l)?,
        };
        res.scenario = res.scenario.to_grouped();
        Ok(res)
    }

    /// Gated circulant fast path (B6/B7). The caller must explicitly assert
    /// circulant structure; for n <= 64 the structure is verified
    /// numerically before use.
    pub fn evaluate_circulant(&self, assert_circulant: bool) -> Result<TraceResult<R>> {
        if !assert_circulant {
            return Err(Error::InvalidArgument(
                "evaluate_circulant: circulant structure must be asserted explicitly"
                    .into(),
            ));
        }
        let n = self.weights.len();
        let w0 = self.weights[0];
        for &w in &self.weights {
            if (w - w0).abs() > R::from_f64_exact(1e-14) {
                return Err(Error::InvalidArgument(
                    "evaluate_circulant: weights must be uniform".into(),
                ));
            }
        }
        if n <= 64 {
            for mat in std::iter::once(&self.shared).chain(self.block0.iter()) {
                verify_circulant(mat)?;
            }
        }
        let spec = spectrum_of_circulant(&self.shared, w0)?;
        let l = self.block_count as u64;
        let mut res = match &self.block0 {
            Some(b0) => {
                let spec0 = spectrum_of_circulant(b0, w0)?;
                circulant_trace(&[(&spec0, 1), (&spec, l - 1)])?
            }
            None => circulant_trace(&[(&spec, l)])?,
        };
        res.scenario = res.scenario.to_grouped();
        Ok(res)
    }
}

/// Checks `M_{p,q} = M_{0,(q-p) mod n}` (index-difference structure).
fn verify_circulant<R: Real>(m: &DenseMatrix<R>) -> Result<()> {
    let n = m.order();
    let scale = m.max_abs().max(R::one());
    let tol = R::from_f64_exact(1e-12) * scale;
    for p in 0..n {
        for q in 0..n {
            let expect = m.get(0, (q + n - p) % n);
            if (m.get(p, q) - expect).abs() > tol {
                return Err(Error::InvalidArgument(format!(
                    "matrix is not circulant at entry ({p},{q})"
                )));
            }
        }
    }
    Ok(())
}

/// Spectrum of a circulant matrix with uniform weight w folded in: forward
/// DFT of the first column times w.
fn spectrum_of_circulant<R: Real>(m: &DenseMatrix<R>, w: R) -> Result<Spectrum<R>> {
    let n = m.order();
    let col: Vec<Complex<R>> = (0..n)
        .map(|p| Complex::new(m.get(p, 0) * w, R::zero()))
        .collect();
    spectrum_from_column(&col, false)
}
