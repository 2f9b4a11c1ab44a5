//! Physics front-ends mapping rotor and U(1) gauge-theory observables onto
//! engine calls, plus the Fourier-series formulations.

pub mod fourier;
pub mod rotor;
pub mod u1;
pub mod u1_3d;

pub use fourier::{fourier_sum_1d, CouplingOrder, FourierTable, Provenance};
pub use rotor::{
    rotor_central2_partition, rotor_central4, rotor_central_difference, rotor_partition,
    rotor_ratio, rotor_susceptibility, rotor_susceptibility_literal, Discretization,
    RotorObservable, RotorSpec,
};
pub use u1::{u1_2d, wilson11, U1Method, U1Spec2D, WilsonSpec};
pub use u1_3d::{u1_3d_fourier_sum, u1_3d_nullspace, ConstraintSystem};
