//! Randomized invariants: DFT roundtrips, circulant trace identities,
//! matrix-power rescaling, eigenvalue conservation laws, scale-managed
//! arithmetic, and kernel gauge invariance.

use num_complex::Complex;
use proptest::prelude::*;

use lattice_trace_core::engine::{circulant_trace, mod1, KernelFunction};
use lattice_trace_core::models::rotor::{rotor_ratio, RotorSpec};
use lattice_trace_core::numerics::fft::{dft_backward, dft_forward, spectrum_from_column};
use lattice_trace_core::numerics::matrix::{mat_mul, mat_power, sym_eigenvalues, DenseMatrix};
use lattice_trace_core::numerics::scaled::ScaledValue;

fn complex_vec(len: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = Vec<Complex<f64>>> {
    prop::collection::vec(
        (-1.0f64..1.0, -1.0f64..1.0).prop_map(|(re, im)| Complex::new(re, im)),
        len,
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn dft_roundtrip(v in complex_vec(1..=40)) {
        let n = v.len() as f64;
        let fwd = dft_forward(&v).unwrap();
        let back = dft_backward(&fwd).unwrap();
        for (orig, b) in v.iter().zip(&back) {
            let r = b / n;
            prop_assert!((r - orig).norm() < 1e-12);
        }
    }

    #[test]
    fn circulant_trace_matches_dense(col in prop::collection::vec(-1.0f64..1.0, 2..=16),
                                     exp in 1u64..=5) {
        let n = col.len();
        let spec = spectrum_from_column(
            &col.iter().map(|&c| Complex::new(c, 0.0)).collect::<Vec<_>>(),
            false,
        ).unwrap();
        let t = circulant_trace(&[(&spec, exp)]).unwrap().value.to_complex();
        let m = DenseMatrix::from_fn(n, |p, q| col[(p + n - q) % n]);
        let (pw, ls) = mat_power(&m, exp).unwrap();
        let direct = pw.trace() * 2f64.powi(ls as i32);
        prop_assert!((t.re - direct).abs() <= 1e-10 * direct.abs().max(1.0),
                     "spec {} dense {}", t.re, direct);
        prop_assert!(t.im.abs() <= 1e-10 * direct.abs().max(1.0));
    }

    #[test]
    fn mat_power_matches_repeated_mul(entries in prop::collection::vec(-1.0f64..1.0, 16),
                                      m in 1u64..=16) {
        let n = 4;
        let a = DenseMatrix::from_fn(n, |i, j| entries[i * n + j]);
        let (pw, ls) = mat_power(&a, m).unwrap();
        let mut acc = a.clone();
        for _ in 1..m {
            acc = mat_mul(&acc, &a).unwrap();
        }
        let scale = 2f64.powi(ls as i32);
        let norm = acc.max_abs().max(1e-300);
        for i in 0..n {
            for j in 0..n {
                let got = pw.get(i, j) * scale;
                prop_assert!((got - acc.get(i, j)).abs() <= 1e-12 * norm);
            }
        }
    }

    #[test]
    fn eigenvalues_conserve_trace_and_frobenius(entries in prop::collection::vec(-1.0f64..1.0, 25)) {
        let n = 5;
        let a = DenseMatrix::from_fn(n, |i, j| {
            0.5 * (entries[i * n + j] + entries[j * n + i])
        });
        let evs = sym_eigenvalues(&a).unwrap();
        let tr: f64 = evs.iter().sum();
        let fro2: f64 = evs.iter().map(|e| e * e).sum();
        prop_assert!((tr - a.trace()).abs() < 1e-12);
        let fro = a.frobenius();
        prop_assert!((fro2 - fro * fro).abs() < 1e-11);
        // sorted descending
        for w in evs.windows(2) {
            prop_assert!(w[0] >= w[1]);
        }
    }

    #[test]
    fn scaled_mul_associative(a in -1e3f64..1e3, b in -1e3f64..1e3, c in -1e3f64..1e3,
                              sa in -600i64..600, sb in -600i64..600) {
        prop_assume!(a != 0.0 && b != 0.0 && c != 0.0);
        let x = ScaledValue::<f64>::from_real(a).shift(sa);
        let y = ScaledValue::<f64>::from_real(b).shift(sb);
        let z = ScaledValue::<f64>::from_real(c);
        let l = x.mul(&y).mul(&z);
        let r = x.mul(&y.mul(&z));
        // mantissas agree to an ulp once brought to a common scale
        let dl = l.log_scale() - r.log_scale();
        prop_assume!(dl.abs() <= 2);
        let lm = l.mantissa() * Complex::new(2f64.powi(dl as i32), 0.0);
        prop_assert!((lm - r.mantissa()).norm() <= 4.0 * f64::EPSILON * r.mantissa().norm());
    }

    #[test]
    fn scaled_mul_div_roundtrip(a in -1e6f64..1e6, b in -1e6f64..1e6, s in -5000i64..5000) {
        prop_assume!(a.abs() > 1e-12 && b.abs() > 1e-12);
        let x = ScaledValue::<f64>::from_real(a).shift(s);
        let y = ScaledValue::<f64>::from_real(b);
        let r = x.mul(&y).div(&y);
        prop_assert_eq!(r.log_scale(), x.log_scale());
        prop_assert!((r.mantissa() - x.mantissa()).norm()
                     <= 4.0 * f64::EPSILON * x.mantissa().norm());
    }

    #[test]
    fn scaled_powers_track_log(a in 1.0f64..4.0, m in 1u64..=64) {
        let x = ScaledValue::<f64>::from_real(a);
        let p = x.powi(m);
        let expected = (a.ln() / 2f64.ln()) * m as f64;
        let got = p.abs_log2().unwrap();
        prop_assert!((got - expected).abs() < 1e-9 * expected.abs().max(1.0));
    }

    #[test]
    fn difference_kernel_gauge_invariant(u in 0.0f64..1.0, v in 0.0f64..1.0, c in 0.0f64..1.0,
                                         beta in 0.1f64..4.0) {
        let k = KernelFunction::difference_1d(move |x: f64| (beta * (2.0 * std::f64::consts::PI * x).cos()).exp(), true);
        let plain = k.eval_pair(&[u], &[v]);
        let shifted = k.eval_pair(&[mod1(u + c)], &[mod1(v + c)]);
        prop_assert!((plain - shifted).abs() <= 1e-11 * plain.abs());
    }

    #[test]
    fn rotor_ratio_in_unit_interval(beta in 0.0f64..8.0, l in 2u64..300, n_pow in 3u32..=7) {
        let v = rotor_ratio(&RotorSpec::plaquette(beta, l, 1usize << n_pow)).unwrap();
        prop_assert!((-1.0..=1.0).contains(&v), "beta={beta} L={l} v={v}");
    }
}
