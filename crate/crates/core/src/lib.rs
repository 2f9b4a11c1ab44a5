//! Recursive trace evaluation of high-dimensional product integrals with
//! low-order couplings.
//!
//! The integrals targeted here are L-fold products of periodic factors, each
//! coupling r consecutive cyclic variables. Tensor-product cubature turns
//! them into traces of matrix chains, which specialize down a ladder of
//! strategies: full chains, matrix powers, spectral sums, and
//! FFT-diagonalized circulant traces whose cost is essentially independent
//! of L. Front-ends cover the quantum rotor and compact U(1) lattice gauge
//! theory in 2D and 3D, with independent Monte Carlo and Fourier/Bessel
//! oracles for verification.

pub mod engine;
pub mod error;
pub mod models;
pub mod numerics;
pub mod oracles;
pub mod rules;

pub use error::{Error, Result};
