//! Modified Bessel functions of the first kind, integer order, by the
//! ascending power series. These are the exact Fourier coefficients of the
//! exponential-cosine kernels, used throughout as an independent oracle.

use super::scalar::Real;

/// `I_ell(beta) = sum_{m>=0} (beta/2)^{2m+ell} / (m! (m+ell)!)`, summed until
/// the term drops below `ulp * partial_sum`.
pub fn bessel_i<R: Real>(ell: u32, beta: R) -> R {
    debug_assert!(beta >= R::zero(), "bessel_i: beta must be >= 0");
    let half = beta * R::from_f64_exact(0.5);
    // leading term (beta/2)^ell / ell!
    let mut term = R::one();
    for k in 1..=ell {
        term = term * half / R::from_u32(k).expect("small integer");
    }
    let mut sum = term;
    let x2 = half * half;
    let mut m = 1u32;
    while term != R::zero() {
        term = term * x2
            / (R::from_u32(m).expect("small integer") * R::from_u32(m + ell).expect("small integer"));
        sum += term;
        if term < R::ulp() * sum {
            break;
        }
        m += 1;
    }
    sum
}
