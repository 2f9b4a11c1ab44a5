//! Precision-generic scalar/complex arithmetic, DFT/FFT, dense matrix
//! operations, symmetric eigenvalues, Bessel series, and scaled-value
//! arithmetic.

pub mod bessel;
pub mod fft;
pub mod matrix;
pub mod scalar;
pub mod scaled;

pub use bessel::bessel_i;
pub use fft::{circulant_spectrum, dft_backward, dft_direct, dft_forward, spectrum_from_column, Spectrum};
pub use matrix::{mat_mul, mat_power, rescale, sym_eigenvalues, DenseMatrix};
pub use scalar::Real;
pub use scaled::ScaledValue;
