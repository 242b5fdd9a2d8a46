//! Time evolution of the composite state.
//!
//! Two propagators are provided: fixed-step RK4 on the direct master-equation
//! right-hand side, and exact stepping with the exponential of the
//! vectorized Liouvillian. They share nothing past the Bohr decomposition,
//! so their agreement is a meaningful check. The steady state is read off
//! the Liouvillian null space.

use num_complex::Complex64;
use serde::Serialize;

use crate::baths::born_markov_margin;
use crate::error::{Error, Result};
use crate::linalg::{expm, hermitian_eig, null_vector, partial_trace, ComplexMatrix};
use crate::lindblad::{liouvillian_from, BohrDecomposition, Generator};
use crate::metrics::local_temperature;
use crate::model::{build_hamiltonian, initial_state, BathSpec, SystemSpec};

pub const HERMITICITY_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-9;
pub const POSITIVITY_TOL: f64 = -1e-8;
/// Largest RK4 step accepted.
pub const MAX_RK4_STEP: f64 = 0.05;
/// Relative pivot threshold used to extract the steady state.
pub const STEADY_NULL_TOL: f64 = 1e-11;
pub const DEFAULT_DT: f64 = 0.01;
pub const DEFAULT_SAMPLES: usize = 5000;

/// A validated physical state: Hermitian, unit trace, positive semidefinite.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
    min_eigenvalue: f64,
}

impl DensityMatrix {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        Self::checked(matrix, 0.0)
    }

    fn checked(matrix: ComplexMatrix, time: f64) -> Result<Self> {
        let lost = |reason: String| Error::PhysicalityLost { time, reason };
        let dim = matrix.rows();
        if !matrix.is_square() || !dim.is_power_of_two() {
            return Err(Error::DimensionMismatch {
                expected: "2^n x 2^n".into(),
                found: format!("{}x{}", matrix.rows(), matrix.cols()),
            });
        }
        if !matrix.is_finite() {
            return Err(lost("non-finite entries".into()));
        }
        let herm = matrix.hermiticity_error();
        if herm > HERMITICITY_TOL {
            return Err(lost(format!("hermiticity error {herm:e}")));
        }
        let drift = (matrix.trace().re - 1.0).abs();
        if drift > TRACE_TOL {
            return Err(lost(format!("trace drift {drift:e}")));
        }
        let hermitized = hermitize(&matrix);
        let min_eigenvalue = hermitian_eig(&hermitized)?.eigenvalues[0];
        if min_eigenvalue < POSITIVITY_TOL {
            return Err(lost(format!("negative eigenvalue {min_eigenvalue:e}")));
        }
        Ok(Self { matrix: hermitized, min_eigenvalue })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn n_qubits(&self) -> usize {
        self.dim().trailing_zeros() as usize
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.min_eigenvalue
    }

    pub fn reduced(&self, qubit: usize) -> Result<ComplexMatrix> {
        partial_trace(&self.matrix, qubit, self.n_qubits())
    }

    /// `|0⟩` population of every qubit.
    pub fn populations(&self) -> Vec<f64> {
        (0..self.n_qubits()).map(|j| self.reduced(j).expect("qubit in range")[(0, 0)].re).collect()
    }
}

fn hermitize(m: &ComplexMatrix) -> ComplexMatrix {
    ComplexMatrix::from_fn(m.rows(), m.cols(), |i, j| 0.5 * (m[(i, j)] + m[(j, i)].conj()))
}

/// Worst-case physicality figures seen over a trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Diagnostics {
    /// Before renormalization.
    pub max_trace_drift: f64,
    pub max_hermiticity_error: f64,
    pub min_eigenvalue: f64,
    /// Largest `|⟨0|ρ_j|1⟩|` of any reduced qubit state.
    pub max_reduced_coherence: f64,
}

impl Default for Diagnostics {
    fn default() -> Self {
        Self {
            max_trace_drift: 0.0,
            max_hermiticity_error: 0.0,
            min_eigenvalue: f64::INFINITY,
            max_reduced_coherence: 0.0,
        }
    }
}

/// Sampled evolution: per-qubit populations and local temperatures.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    /// `populations[k][j]`: `|0⟩` population of qubit `j` at `times[k]`.
    pub populations: Vec<Vec<f64>>,
    /// Signed local temperatures; negative values mark population inversion.
    pub temperatures: Vec<Vec<f64>>,
    pub states: Option<Vec<DensityMatrix>>,
    pub energies: Vec<f64>,
    pub spec: Option<SystemSpec>,
    pub diagnostics: Diagnostics,
}

impl Trajectory {
    fn empty(system: &OpenSystem, keep_states: bool) -> Self {
        Self {
            times: Vec::new(),
            populations: Vec::new(),
            temperatures: Vec::new(),
            states: keep_states.then(Vec::new),
            energies: system.energies.clone(),
            spec: system.spec.clone(),
            diagnostics: Diagnostics::default(),
        }
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn n_qubits(&self) -> usize {
        self.energies.len()
    }

    /// Temperature series of one qubit.
    pub fn temperature_series(&self, qubit: usize) -> Vec<f64> {
        self.temperatures.iter().map(|row| row[qubit]).collect()
    }

    pub fn t_final(&self) -> f64 {
        self.times.last().copied().unwrap_or(0.0)
    }

    /// Validates and stores the state at time `t`, returning the state to
    /// continue from (trace-renormalized).
    fn record(&mut self, t: f64, rho: ComplexMatrix) -> Result<ComplexMatrix> {
        let herm = rho.hermiticity_error();
        let trace = rho.trace().re;
        let drift = (trace - 1.0).abs();
        if drift > TRACE_TOL {
            return Err(Error::PhysicalityLost { time: t, reason: format!("trace drift {drift:e}") });
        }
        let normalized = rho.scale_real(1.0 / trace);
        let state = DensityMatrix::checked(normalized, t)?;

        let d = &mut self.diagnostics;
        d.max_trace_drift = d.max_trace_drift.max(drift);
        d.max_hermiticity_error = d.max_hermiticity_error.max(herm);
        d.min_eigenvalue = d.min_eigenvalue.min(state.min_eigenvalue());

        let mut pops = Vec::with_capacity(self.energies.len());
        let mut temps = Vec::with_capacity(self.energies.len());
        for (j, &eps) in self.energies.iter().enumerate() {
            let r = state.reduced(j)?;
            d.max_reduced_coherence = d.max_reduced_coherence.max(r[(0, 1)].norm());
            let p = r[(0, 0)].re;
            if !(p > 0.0 && p < 1.0) {
                return Err(Error::PhysicalityLost { time: t, reason: format!("population {p} of qubit {j}") });
            }
            pops.push(p);
            temps.push(match local_temperature(p, eps) {
                Ok(temp) => temp,
                Err(Error::InfiniteTemperature) => f64::INFINITY,
                Err(e) => return Err(e),
            });
        }
        self.times.push(t);
        self.populations.push(pops);
        self.temperatures.push(temps);
        let next = state.matrix().clone();
        if let Some(states) = &mut self.states {
            states.push(state);
        }
        Ok(next)
    }
}

/// Hamiltonian, dissipator data and initial state of one open system.
#[derive(Debug, Clone)]
pub struct OpenSystem {
    pub hamiltonian: ComplexMatrix,
    pub decomposition: BohrDecomposition,
    pub energies: Vec<f64>,
    pub initial: ComplexMatrix,
    pub spec: Option<SystemSpec>,
}

impl OpenSystem {
    pub fn from_spec(spec: &SystemSpec) -> Result<Self> {
        let hamiltonian = build_hamiltonian(spec)?;
        let decomposition = BohrDecomposition::new(&hamiltonian, &spec.baths(), spec.zero_frequency_terms)?;
        Ok(Self {
            hamiltonian,
            decomposition,
            energies: spec.energies(),
            initial: initial_state(spec)?,
            spec: Some(spec.clone()),
        })
    }

    /// Arbitrary register, e.g. a lone qubit, without junction metadata.
    pub fn from_parts(
        hamiltonian: ComplexMatrix,
        baths: &[BathSpec],
        energies: Vec<f64>,
        zero_policy: bool,
        initial: ComplexMatrix,
    ) -> Result<Self> {
        let decomposition = BohrDecomposition::new(&hamiltonian, baths, zero_policy)?;
        if initial.rows() != hamiltonian.rows() || energies.len() != baths.len() {
            return Err(Error::DimensionMismatch {
                expected: format!("{} qubits", baths.len()),
                found: format!("{} energies, {}x{} state", energies.len(), initial.rows(), initial.cols()),
            });
        }
        Ok(Self { hamiltonian, decomposition, energies, initial, spec: None })
    }

    pub fn with_initial(mut self, initial: ComplexMatrix) -> Self {
        self.initial = initial;
        self
    }

    pub fn liouvillian(&self) -> Result<ComplexMatrix> {
        liouvillian_from(&self.hamiltonian, &self.decomposition)
    }

    pub fn born_markov_margin(&self) -> Option<f64> {
        self.spec.as_ref().map(|s| born_markov_margin(s, &self.decomposition.rate_table()))
    }

    /// Classical RK4 with a uniform step no larger than `dt`.
    pub fn integrate_rk4(&self, t_final: f64, dt: f64, sample_every: usize, keep_states: bool) -> Result<Trajectory> {
        if !(t_final > 0.0 && t_final.is_finite()) {
            return Err(Error::InvalidStep(format!("t_final must be positive, got {t_final}")));
        }
        if !(dt > 0.0 && dt <= MAX_RK4_STEP) {
            return Err(Error::InvalidStep(format!("dt must lie in (0, {MAX_RK4_STEP}], got {dt}")));
        }
        if sample_every == 0 {
            return Err(Error::InvalidStep("sample_every must be at least 1".into()));
        }
        let n_steps = ((t_final / dt) - 1e-9).ceil().max(1.0) as usize;
        let h = t_final / n_steps as f64;
        let gen = Generator::new(&self.hamiltonian, &self.decomposition)?;

        let mut traj = Trajectory::empty(self, keep_states);
        let mut rho = traj.record(0.0, self.initial.clone())?;
        for step in 1..=n_steps {
            rho = rk4_step(&gen, &rho, h);
            if step % sample_every == 0 || step == n_steps {
                let t = if step == n_steps { t_final } else { step as f64 * h };
                rho = traj.record(t, rho)?;
            }
        }
        Ok(traj)
    }

    /// Exact stepping with `expm(L·Δ)` on `n_samples` uniform times in `[0, t_final]`.
    pub fn propagate_expm(&self, t_final: f64, n_samples: usize, keep_states: bool) -> Result<Trajectory> {
        if !(t_final > 0.0 && t_final.is_finite()) {
            return Err(Error::InvalidStep(format!("t_final must be positive, got {t_final}")));
        }
        if n_samples < 2 {
            return Err(Error::InvalidStep(format!("need at least 2 samples, got {n_samples}")));
        }
        let d = self.hamiltonian.rows();
        let delta = t_final / (n_samples - 1) as f64;
        let step = expm(&self.liouvillian()?.scale_real(delta));

        let mut traj = Trajectory::empty(self, keep_states);
        let mut rho = traj.record(0.0, self.initial.clone())?;
        for k in 1..n_samples {
            let v = step.matvec(&rho.vectorize());
            let t = if k == n_samples - 1 { t_final } else { k as f64 * delta };
            rho = traj.record(t, ComplexMatrix::unvectorize(&v, d)?)?;
        }
        Ok(traj)
    }

    /// Unit-trace null vector of the Liouvillian, plus whether it is unique.
    pub fn steady_state(&self) -> Result<SteadyState> {
        if self.decomposition.active().next().is_none() {
            return Err(Error::NoDissipation);
        }
        let l = self.liouvillian()?;
        let nv = null_vector(&l, STEADY_NULL_TOL)?;
        let d = self.hamiltonian.rows();
        let rho = ComplexMatrix::unvectorize(nv.vector.as_slice(), d)?;
        let rho = hermitize(&rho);
        let rho = rho.scale(Complex64::new(1.0 / rho.trace().re, 0.0));
        let residual = ComplexMatrix::column(l.matvec(&rho.vectorize())).max_norm();
        let state = DensityMatrix::new(rho)?;
        Ok(SteadyState { state, unique: nv.nullity == 1, residual })
    }
}

fn rk4_step(gen: &Generator, rho: &ComplexMatrix, h: f64) -> ComplexMatrix {
    let k1 = gen.apply(rho);
    let k2 = gen.apply(&(rho + &k1.scale_real(0.5 * h)));
    let k3 = gen.apply(&(rho + &k2.scale_real(0.5 * h)));
    let k4 = gen.apply(&(rho + &k3.scale_real(h)));
    let mut incr = k1;
    incr += &k2.scale_real(2.0);
    incr += &k3.scale_real(2.0);
    incr += &k4;
    rho + &incr.scale_real(h / 6.0)
}

#[derive(Debug, Clone)]
pub struct SteadyState {
    pub state: DensityMatrix,
    /// Numerical nullity of the Liouvillian is one.
    pub unique: bool,
    /// `‖L·vec(ρ_ss)‖_max`.
    pub residual: f64,
}

impl SteadyState {
    /// Local temperatures of the steady state for the given splittings.
    pub fn temperatures(&self, energies: &[f64]) -> Result<Vec<f64>> {
        self.state.populations().iter().zip(energies).map(|(&p, &e)| local_temperature(p, e)).collect()
    }
}

pub fn integrate_rk4(spec: &SystemSpec, t_final: f64, dt: f64, sample_every: usize) -> Result<Trajectory> {
    OpenSystem::from_spec(spec)?.integrate_rk4(t_final, dt, sample_every, false)
}

pub fn propagate_expm(spec: &SystemSpec, t_final: f64, n_samples: usize) -> Result<Trajectory> {
    OpenSystem::from_spec(spec)?.propagate_expm(t_final, n_samples, false)
}

pub fn steady_state(spec: &SystemSpec) -> Result<SteadyState> {
    OpenSystem::from_spec(spec)?.steady_state()
}
