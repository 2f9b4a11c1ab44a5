//! Dense real matrices: multiplication, scaled powers, and a cyclic Jacobi
//! symmetric eigensolver.

use super::scalar::Real;
use crate::error::{Error, Result};

/// Square matrix in row-major order.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix<R: Real> {
    n: usize,
    data: Vec<R>,
}

impl<R: Real> DenseMatrix<R> {
    pub fn zeros(n: usize) -> Self {
        assert!(n >= 1, "matrix order must be >= 1");
        DenseMatrix {
            n,
            data: vec![R::zero(); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.set(i, i, R::one());
        }
        m
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> R) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    pub fn order(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> R {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: R) {
        self.data[i * self.n + j] = v;
    }

    pub fn trace(&self) -> R {
        (0..self.n).fold(R::zero(), |acc, i| acc + self.get(i, i))
    }

    pub fn max_abs(&self) -> R {
        self.data
            .iter()
            .fold(R::zero(), |a, &v| if v.abs() > a { v.abs() } else { a })
    }

    pub fn frobenius(&self) -> R {
        self.data
            .iter()
            .fold(R::zero(), |a, &v| a + v * v)
            .sqrt()
    }

    /// Scales every entry in place.
    pub fn scale_in_place(&mut self, c: R) {
        for v in &mut self.data {
            *v *= c;
        }
    }

    /// Scales row `i` by `c_i`.
    pub fn scale_rows(&mut self, c: &[R]) {
        assert_eq!(c.len(), self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                self.data[i * self.n + j] *= c[i];
            }
        }
    }

    /// Scales column `j` by `c_j`.
    pub fn scale_cols(&mut self, c: &[R]) {
        assert_eq!(c.len(), self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                self.data[i * self.n + j] *= c[j];
            }
        }
    }
}

/// Standard O(n^3) product.
pub fn mat_mul<R: Real>(a: &DenseMatrix<R>, b: &DenseMatrix<R>) -> Result<DenseMatrix<R>> {
    if a.order() != b.order() {
        return Err(Error::InvalidArgument(format!(
            "mat_mul: order mismatch {} vs {}",
            a.order(),
            b.order()
        )));
    }
    let n = a.order();
    let mut out = DenseMatrix::zeros(n);
    for i in 0..n {
        for k in 0..n {
            let aik = a.get(i, k);
            if aik == R::zero() {
                continue;
            }
            for j in 0..n {
                let v = out.get(i, j) + aik * b.get(k, j);
                out.set(i, j, v);
            }
        }
    }
    Ok(out)
}

/// Rescales `m` so its maximum absolute entry lies in [0.5, 2); returns the
/// base-2 exponent removed. Zero matrices are left untouched.
pub fn rescale<R: Real>(m: &mut DenseMatrix<R>) -> i64 {
    let max = m.max_abs();
    if max == R::zero() {
        return 0;
    }
    let e = max.log2().floor().to_f64_lossy().round() as i64;
    if e == 0 {
        return 0;
    }
    let two = R::from_f64_exact(2.0);
    // apply in chunks to avoid powi overflow for extreme exponents
    let mut rem = e;
    while rem != 0 {
        let step = rem.clamp(-512, 512);
        m.scale_in_place(two.powi(-(step as i32)));
        rem -= step;
    }
    e
}

/// `A^m` by exponentiation by squaring with per-step max-entry rescaling into
/// [0.5, 2); the removed scale accumulates in the returned exponent
/// (`A^m = result * 2^log_scale`). At most `2*floor(log2 m)` multiplications.
pub fn mat_power<R: Real>(a: &DenseMatrix<R>, m: u64) -> Result<(DenseMatrix<R>, i64)> {
    if m == 0 {
        return Err(Error::InvalidArgument(
            "mat_power: exponent must be >= 1".into(),
        ));
    }
    let mut base = a.clone();
    let mut base_scale = rescale(&mut base);
    let mut acc: Option<(DenseMatrix<R>, i64)> = None;
    let mut e = m;
    loop {
        if e & 1 == 1 {
            acc = Some(match acc {
                None => (base.clone(), base_scale),
                Some((prev, prev_scale)) => {
                    let mut p = mat_mul(&prev, &base)?;
                    let s = rescale(&mut p);
                    (p, prev_scale + base_scale + s)
                }
            });
        }
        e >>= 1;
        if e == 0 {
            break;
        }
        let mut sq = mat_mul(&base, &base)?;
        let s = rescale(&mut sq);
        base_scale = 2 * base_scale + s;
        base = sq;
    }
    Ok(acc.expect("m >= 1"))
}

/// All eigenvalues of a symmetric matrix by cyclic Jacobi sweeps, sorted
/// descending. Symmetry is checked at tolerance `1e3 * ulp * max|A|`.
pub fn sym_eigenvalues<R: Real>(a: &DenseMatrix<R>) -> Result<Vec<R>> {
    let n = a.order();
    let max = a.max_abs();
    let tol_sym = R::from_f64_exact(1e3) * R::ulp() * max;
    let mut worst = (0usize, 0usize, R::zero());
    for i in 0..n {
        for j in (i + 1)..n {
            let d = (a.get(i, j) - a.get(j, i)).abs();
            if d > worst.2 {
                worst = (i, j, d);
            }
        }
    }
    if worst.2 > tol_sym {
        return Err(Error::NotSymmetric {
            row: worst.0,
            col: worst.1,
            delta: worst.2.to_f64_lossy(),
        });
    }

    let mut m = a.clone();
    // symmetrize to kill the tolerated asymmetry
    let half = R::from_f64_exact(0.5);
    for i in 0..n {
        for j in (i + 1)..n {
            let s = (m.get(i, j) + m.get(j, i)) * half;
            m.set(i, j, s);
            m.set(j, i, s);
        }
    }
    let target = R::from_f64_exact(1e2) * R::ulp() * a.frobenius();
    for _sweep in 0..64 {
        let mut off = R::zero();
        for i in 0..n {
            for j in (i + 1)..n {
                off += m.get(i, j) * m.get(i, j);
            }
        }
        let off = (off + off).sqrt();
        if off <= target {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m.get(p, q);
                if apq == R::zero() {
                    continue;
                }
                let app = m.get(p, p);
                let aqq = m.get(q, q);
                let two = R::from_f64_exact(2.0);
                let theta = (aqq - app) / (two * apq);
                let t = {
                    let s = if theta >= R::zero() { R::one() } else { -R::one() };
                    s / (theta.abs() + (theta * theta + R::one()).sqrt())
                };
                let c = R::one() / (t * t + R::one()).sqrt();
                let s = t * c;
                // rotate rows/cols p,q
                for k in 0..n {
                    let akp = m.get(k, p);
                    let akq = m.get(k, q);
                    m.set(k, p, c * akp - s * akq);
                    m.set(k, q, s * akp + c * akq);
                }
                for k in 0..n {
                    let apk = m.get(p, k);
                    let aqk = m.get(q, k);
                    m.set(p, k, c * apk - s * aqk);
                    m.set(q, k, s * apk + c * aqk);
                }
            }
        }
    }
    let mut eigs: Vec<R> = (0..n).map(|i| m.get(i, i)).collect();
    eigs.sort_by(|x, y| y.partial_cmp(x).expect("finite eigenvalues"));
    Ok(eigs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn random_matrix(n: usize, seed: u64) -> DenseMatrix<f64> {
        let mut state = seed;
        DenseMatrix::from_fn(n, |_, _| {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
        })
    }

    #[test]
    fn identity_neutral() {
        let a = random_matrix(5, 1);
        let i = DenseMatrix::identity(5);
        assert_eq!(mat_mul(&a, &i).unwrap(), a);
        assert_eq!(mat_mul(&i, &a).unwrap(), a);
    }

    #[test]
    fn triple_loop_oracle() {
        let a = random_matrix(5, 2);
        let b = random_matrix(5, 3);
        let c = mat_mul(&a, &b).unwrap();
        for i in 0..5 {
            for j in 0..5 {
                let mut s = 0.0;
                for k in 0..5 {
                    s += a.get(i, k) * b.get(k, j);
                }
                assert_eq!(c.get(i, j), s);
            }
        }
    }

    #[test]
    fn power_diagonal() {
        let mut d = DenseMatrix::zeros(2);
        d.set(0, 0, 2.0);
        d.set(1, 1, 3.0);
        let (p, s) = mat_power(&d, 10).unwrap();
        let f = 2f64.powi(s as i32);
        assert!((p.get(0, 0) * f - 1024.0).abs() < 1e-9);
        assert!((p.get(1, 1) * f - 59049.0).abs() < 1e-6);
    }

    #[test]
    fn power_one_is_rescaled_input() {
        let a = random_matrix(4, 7);
        let (p, s) = mat_power(&a, 1).unwrap();
        let f = 2f64.powi(s as i32);
        for i in 0..4 {
            for j in 0..4 {
                assert!((p.get(i, j) * f - a.get(i, j)).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn power_matches_repeated_mul() {
        let a = random_matrix(4, 11);
        let (p, s) = mat_power(&a, 7).unwrap();
        let f = 2f64.powi(s as i32);
        let mut r = a.clone();
        for _ in 0..6 {
            r = mat_mul(&r, &a).unwrap();
        }
        for i in 0..4 {
            for j in 0..4 {
                let x = p.get(i, j) * f;
                let y = r.get(i, j);
                assert!((x - y).abs() <= 1e-12 * y.abs().max(1.0));
            }
        }
    }

    #[test]
    fn eig_diag() {
        let mut d = DenseMatrix::zeros(3);
        d.set(0, 0, 3.0);
        d.set(1, 1, 1.0);
        d.set(2, 2, 2.0);
        let e = sym_eigenvalues(&d).unwrap();
        assert_eq!(e, vec![3.0, 2.0, 1.0]);
    }

    #[test]
    fn eig_2x2_offdiag() {
        let mut m = DenseMatrix::zeros(2);
        m.set(0, 1, 1.0);
        m.set(1, 0, 1.0);
        let e = sym_eigenvalues(&m).unwrap();
        assert!((e[0] - 1.0).abs() < 1e-14);
        assert!((e[1] + 1.0).abs() < 1e-14);
    }

    #[test]
    fn eig_trace_frobenius_conservation() {
        let raw = random_matrix(6, 42);
        let a = DenseMatrix::from_fn(6, |i, j| 0.5 * (raw.get(i, j) + raw.get(j, i)));
        let e = sym_eigenvalues(&a).unwrap();
        let tr: f64 = e.iter().sum();
        let fr2: f64 = e.iter().map(|x| x * x).sum();
        assert!((tr - a.trace()).abs() < 1e-12 * a.trace().abs().max(1.0));
        let af2 = a.frobenius().powi(2);
        assert!((fr2 - af2).abs() < 1e-12 * af2);
    }

    #[test]
    fn asymmetric_rejected() {
        let a = random_matrix(4, 9);
        match sym_eigenvalues(&a) {
            Err(Error::NotSymmetric { .. }) => {}
            other => panic!("expected NotSymmetric, got {:?}", other.map(|_| ())),
        }
    }
}
