//! Modular-variable simulation of qubits encoded in continuous-variable
//! wavefunctions.
//!
//! States live on a cyclic position grid ([`lattice`]). The Zak transform
//! ([`modular`]) maps them onto the `(x̄, p̄)` torus, where the logical qubit
//! is read off pointwise. [`states`] builds comb-like logical states,
//! [`operators`] provides displacement-based gates, [`readout`] evaluates
//! periodic observables, [`two_mode`] handles two-mode states and CNOT,
//! [`povm`] simulates the ancilla measurement circuit and [`io`] writes
//! densities and pair files.
//!
//! Everything is generic over [`Real`] (`f32` or `f64`); the aliases at the
//! crate root fix `f64`.

pub mod error;
pub mod io;
pub mod lattice;
pub mod modular;
pub mod num;
pub mod operators;
pub mod povm;
pub mod random;
pub mod readout;
pub mod states;
pub mod tolerance;
pub mod two_mode;

pub use error::{Error, Result};
pub use num::{Cplx, Real};
pub use tolerance::Tolerances;

pub type Grid = lattice::GridSpec<f64>;
pub type WaveFunction = lattice::WaveFunction1D<f64>;
pub type MomentumWave = lattice::MomentumWaveFunction<f64>;
pub type Angle = lattice::QuadratureAngle<f64>;
pub type ModularWave = modular::ModularWaveFunction<f64>;
pub type Decomposition = modular::LogicalDecomposition<f64>;
pub type JointWave = two_mode::WaveFunction2D<f64>;
