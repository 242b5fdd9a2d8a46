//! Simulator for quantum heat transformers: small qubit networks, each qubit
//! coupled to its own Ohmic bosonic bath, evolved under a secular GKSL
//! master equation. The observables of interest are the temperature
//! gradients across a primary and a secondary junction and whether the
//! device steps the gradient down or up.
//!
//! Modules build on each other bottom-up:
//! [`linalg`] → [`model`] → [`baths`] → [`lindblad`] → [`dynamics`] → [`metrics`].

pub mod baths;
pub mod dynamics;
mod error;
pub mod linalg;
pub mod lindblad;
pub mod metrics;
pub mod model;

pub use baths::{bose_einstein, decay_rate, spectral_density, RateTable};
pub use dynamics::{
    integrate_rk4, propagate_expm, steady_state, DensityMatrix, Diagnostics, OpenSystem, SteadyState, Trajectory,
};
pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, HermitianEigen};
pub use lindblad::{decompose, liouvillian, BohrDecomposition, JumpOperator};
pub use metrics::{
    capacity, evaluate, gradients, local_temperature, rate_ordering, sweep, transient_window, Evaluation,
    EvaluationOptions, Gradients, MetricsReport, Mode, ParamPath, Propagator, RateOrdering, SweepRow,
    TransientWindow,
};
pub use model::{
    bias_check, build_hamiltonian, gibbs_population, initial_state, validate, BathSpec, BiasReport, InteractionKind,
    Junction, QubitSpec, SystemSpec, ValidationReport, Violation,
};
pub use num_complex::Complex64;
