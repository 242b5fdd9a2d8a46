//! Heat-transformer observables: local temperatures, junction gradients,
//! capacity of thermal control, operating mode, the transient step-down
//! window, and the ordering of temperature rates.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::dynamics::{OpenSystem, Trajectory, DEFAULT_DT, DEFAULT_SAMPLES};
use crate::error::{Error, Result};
use crate::model::{SystemSpec, MIN_ENERGY};

/// Capacities within this band count as neither step-up nor step-down.
pub const MODE_TIE_TOL: f64 = 1e-9;
/// Populations this close to ½ have no finite temperature.
pub const HALF_POPULATION_TOL: f64 = 1e-12;
pub const DEFAULT_T_F: f64 = 5e4;
pub const DEFAULT_SMOOTHING: f64 = 10.0;
pub const DEFAULT_RATE_WINDOW: (f64, f64) = (0.0, 1e4);
pub const MIN_WINDOW_SAMPLES: usize = 20;
/// Absolute tolerance below which two averaged rates are considered tied.
pub const RATE_TIE_TOL: f64 = 1e-12;
/// Relative separation at which gradients that start equal stop counting as tied.
pub const ONSET_TIE_REL: f64 = 1e-3;

/// Inverts `p = 1/(1 + exp(ε/T))`. The result is negative for a
/// population-inverted qubit (`p > ½` with `ε > 0` or `p < ½` with `ε < 0`).
pub fn local_temperature(p: f64, energy: f64) -> Result<f64> {
    if !(energy.abs() > MIN_ENERGY) {
        return Err(Error::DegenerateQubit);
    }
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidPopulation(p));
    }
    if (p - 0.5).abs() <= HALF_POPULATION_TOL {
        return Err(Error::InfiniteTemperature);
    }
    Ok(energy / ((1.0 - p) / p).ln())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Mode {
    StepDown,
    StepUp,
    Neutral,
}

impl Mode {
    pub fn from_capacity(c: f64) -> Self {
        if c > MODE_TIE_TOL {
            Mode::StepDown
        } else if c < -MODE_TIE_TOL {
            Mode::StepUp
        } else {
            Mode::Neutral
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::StepDown => "StepDown",
            Mode::StepUp => "StepUp",
            Mode::Neutral => "Neutral",
        })
    }
}

/// Junction temperature gradients over a trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub times: Vec<f64>,
    pub primary: Vec<f64>,
    pub secondary: Vec<f64>,
}

impl Gradients {
    /// `ΔTp(t) − ΔTs(t)` at every sample.
    pub fn difference(&self) -> Vec<f64> {
        self.primary.iter().zip(&self.secondary).map(|(p, s)| p - s).collect()
    }
}

pub fn gradients(traj: &Trajectory) -> Result<Gradients> {
    let spec = traj.spec.as_ref().ok_or(Error::MissingJunctions)?;
    let (p, s) = (spec.primary, spec.secondary);
    let gap = |row: &Vec<f64>, a: usize, b: usize| (row[a] - row[b]).abs();
    Ok(Gradients {
        times: traj.times.clone(),
        primary: traj.temperatures.iter().map(|r| gap(r, p.0, p.1)).collect(),
        secondary: traj.temperatures.iter().map(|r| gap(r, s.0, s.1)).collect(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TransientWindow {
    pub t_start: f64,
    pub t_end: f64,
    /// Threshold `ΔTp − ΔTs` had to exceed.
    pub min_margin: f64,
    /// Largest `ΔTp − ΔTs` seen inside the window.
    pub peak_difference: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateOrdering {
    pub window: (f64, f64),
    pub smoothing: f64,
    /// Window average of the smoothed `|dT_j/dt|`, per qubit.
    pub mean_abs_rates: Vec<f64>,
    /// `|dT₁/dt| < |dT₃/dt| < |dT₂/dt|` (three-qubit registers only).
    pub satisfied: bool,
}

impl RateOrdering {
    /// Whether the averaged rates strictly increase along `order`.
    pub fn holds(&self, order: &[usize]) -> bool {
        order.windows(2).all(|w| self.mean_abs_rates[w[1]] - self.mean_abs_rates[w[0]] > RATE_TIE_TOL)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricsReport {
    pub t_f: f64,
    #[serde(rename = "dTp_f")]
    pub dtp_f: f64,
    #[serde(rename = "dTs_f")]
    pub dts_f: f64,
    pub capacity: f64,
    pub mode: Mode,
    pub transient_window: Option<TransientWindow>,
    pub rate_ordering: Option<RateOrdering>,
    /// Some sample had a negative local temperature.
    pub population_inverted: bool,
}

fn interpolate(times: &[f64], values: &[f64], t: f64) -> f64 {
    let k = times.partition_point(|&x| x < t);
    if k == 0 {
        return values[0];
    }
    if k == times.len() {
        return values[k - 1];
    }
    if times[k] == t {
        return values[k];
    }
    let (t0, t1) = (times[k - 1], times[k]);
    let w = (t - t0) / (t1 - t0);
    values[k - 1] + w * (values[k] - values[k - 1])
}

/// Capacity of thermal control `C_H = ΔTp(t_f) − ΔTs(t_f)`, gradients
/// interpolated linearly between samples.
pub fn capacity(traj: &Trajectory, t_f: f64) -> Result<MetricsReport> {
    let (start, end) = (traj.times.first().copied(), traj.times.last().copied());
    let (start, end) = match (start, end) {
        (Some(s), Some(e)) => (s, e),
        _ => return Err(Error::OutOfRange { time: t_f, start: f64::NAN, end: f64::NAN }),
    };
    let slack = 1e-9 * end.abs().max(1.0);
    if !(t_f >= start - slack && t_f <= end + slack) {
        return Err(Error::OutOfRange { time: t_f, start, end });
    }
    let grads = gradients(traj)?;
    let dtp_f = interpolate(&grads.times, &grads.primary, t_f);
    let dts_f = interpolate(&grads.times, &grads.secondary, t_f);
    let capacity = dtp_f - dts_f;
    Ok(MetricsReport {
        t_f,
        dtp_f,
        dts_f,
        capacity,
        mode: Mode::from_capacity(capacity),
        transient_window: None,
        rate_ordering: None,
        population_inverted: traj.temperatures.iter().flatten().any(|&t| t < 0.0),
    })
}

/// The initial interval on which a steady-state step-up system still runs
/// step-down: `ΔTp − ΔTs > margin` from `t = 0` up to the first crossing
/// (linearly interpolated). Gradients that start equal count as tied until
/// they separate by more than [`ONSET_TIE_REL`] of the initial gradient
/// scale; the window exists only if they separate in the step-down
/// direction. `None` when the steady state is not step-up.
pub fn transient_window(traj: &Trajectory, steady_capacity: f64, margin: f64) -> Result<Option<TransientWindow>> {
    if Mode::from_capacity(steady_capacity) != Mode::StepUp {
        return Ok(None);
    }
    let grads = gradients(traj)?;
    let diff = grads.difference();
    let times = &grads.times;
    if times.len() < 2 {
        return Ok(None);
    }
    let scale = grads.primary[0].abs().max(grads.secondary[0].abs()).max(1.0);
    let tie = ONSET_TIE_REL * scale;
    let onset = if diff[0] > margin && diff[0] > tie {
        0
    } else {
        match diff.iter().position(|d| d.abs() > tie) {
            Some(k) => k,
            None => return Ok(None),
        }
    };
    if diff[onset] <= margin {
        return Ok(None);
    }
    let mut peak = diff[onset];
    for k in onset + 1..diff.len() {
        if diff[k] <= margin {
            let (t0, t1) = (times[k - 1], times[k]);
            let (d0, d1) = (diff[k - 1], diff[k]);
            let t_end = if d0 == d1 { t1 } else { t0 + (d0 - margin) / (d0 - d1) * (t1 - t0) };
            return Ok(Some(TransientWindow { t_start: times[0], t_end, min_margin: margin, peak_difference: peak }));
        }
        peak = peak.max(diff[k]);
    }
    // Never crossed within the sampled range.
    let t_end = *times.last().unwrap();
    Ok(Some(TransientWindow { t_start: times[0], t_end, min_margin: margin, peak_difference: peak }))
}

fn derivative(times: &[f64], values: &[f64]) -> Vec<f64> {
    let n = values.len();
    (0..n)
        .map(|k| {
            let (a, b) = (k.saturating_sub(1), (k + 1).min(n - 1));
            (values[b] - values[a]) / (times[b] - times[a])
        })
        .collect()
}

/// Centered moving average over `width` time units, truncated at the edges.
fn smooth_series(times: &[f64], values: &[f64], width: f64) -> Vec<f64> {
    let half = 0.5 * width;
    let n = values.len();
    let mut prefix = Vec::with_capacity(n + 1);
    prefix.push(0.0);
    for v in values {
        prefix.push(prefix.last().unwrap() + v);
    }
    (0..n)
        .map(|k| {
            let lo = times.partition_point(|&t| t < times[k] - half);
            let hi = times.partition_point(|&t| t <= times[k] + half);
            (prefix[hi] - prefix[lo]) / (hi - lo) as f64
        })
        .collect()
}

/// Window-averaged smoothed absolute temperature rates and whether they
/// obey `|dT₁/dt| < |dT₃/dt| < |dT₂/dt|`.
pub fn rate_ordering(traj: &Trajectory, window: (f64, f64), smooth: f64) -> Result<RateOrdering> {
    let (a, b) = window;
    let in_window: Vec<usize> = (0..traj.len()).filter(|&k| traj.times[k] >= a && traj.times[k] <= b).collect();
    if in_window.len() < MIN_WINDOW_SAMPLES {
        return Err(Error::InsufficientSamples { needed: MIN_WINDOW_SAMPLES, found: in_window.len() });
    }
    let mean_abs_rates: Vec<f64> = (0..traj.n_qubits())
        .map(|j| {
            let temps = traj.temperature_series(j);
            let rate = derivative(&traj.times, &temps);
            let smoothed = smooth_series(&traj.times, &rate, smooth);
            in_window.iter().map(|&k| smoothed[k].abs()).sum::<f64>() / in_window.len() as f64
        })
        .collect();
    let mut out = RateOrdering { window, smoothing: smooth, mean_abs_rates, satisfied: false };
    out.satisfied = traj.n_qubits() == 3 && out.holds(&[0, 2, 1]);
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Propagator {
    Rk4,
    Expm,
}

/// Knobs shared by `evaluate`, `sweep` and the CLI.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvaluationOptions {
    pub t_f: f64,
    pub propagator: Propagator,
    pub samples: usize,
    /// RK4 step.
    pub dt: f64,
    /// Length and resolution of the dense early run used for the transient window.
    pub transient_t: f64,
    pub transient_dt: f64,
    pub margin: f64,
    /// When set, also compute the rate ordering over this window with samples
    /// spaced `rate_dt` apart.
    pub rate_window: Option<(f64, f64)>,
    pub rate_dt: f64,
    pub smoothing: f64,
}

impl Default for EvaluationOptions {
    fn default() -> Self {
        Self {
            t_f: DEFAULT_T_F,
            propagator: Propagator::Expm,
            samples: DEFAULT_SAMPLES,
            dt: DEFAULT_DT,
            transient_t: 50.0,
            transient_dt: DEFAULT_DT,
            margin: 0.0,
            rate_window: None,
            rate_dt: 0.1,
            smoothing: DEFAULT_SMOOTHING,
        }
    }
}

/// Trajectory on `[0, t_final]` with samples spaced about `spacing` apart.
pub fn run_trajectory(system: &OpenSystem, opts: &EvaluationOptions, t_final: f64, spacing: f64) -> Result<Trajectory> {
    let intervals = (t_final / spacing).round().max(1.0) as usize;
    match opts.propagator {
        Propagator::Expm => system.propagate_expm(t_final, intervals + 1, false),
        Propagator::Rk4 => {
            let every = (spacing / opts.dt).round().max(1.0) as usize;
            system.integrate_rk4(t_final, opts.dt, every, false)
        }
    }
}

/// Concatenates a dense early trajectory with the part of a long one that follows it.
pub fn splice(early: &Trajectory, late: &Trajectory) -> Trajectory {
    let cut = early.t_final();
    let mut out = early.clone();
    out.states = None;
    for k in (0..late.len()).filter(|&k| late.times[k] > cut) {
        out.times.push(late.times[k]);
        out.populations.push(late.populations[k].clone());
        out.temperatures.push(late.temperatures[k].clone());
    }
    let (a, b) = (&mut out.diagnostics, &late.diagnostics);
    a.max_trace_drift = a.max_trace_drift.max(b.max_trace_drift);
    a.max_hermiticity_error = a.max_hermiticity_error.max(b.max_hermiticity_error);
    a.min_eigenvalue = a.min_eigenvalue.min(b.min_eigenvalue);
    a.max_reduced_coherence = a.max_reduced_coherence.max(b.max_reduced_coherence);
    out
}

/// Full classification of one spec.
#[derive(Debug, Clone)]
pub struct Evaluation {
    pub report: MetricsReport,
    pub trajectory: Trajectory,
    pub early: Trajectory,
}

pub fn evaluate(spec: &SystemSpec, opts: &EvaluationOptions) -> Result<Evaluation> {
    let system = OpenSystem::from_spec(spec)?;
    let samples = opts.samples.max(2);
    let trajectory = match opts.propagator {
        Propagator::Expm => system.propagate_expm(opts.t_f, samples, false)?,
        Propagator::Rk4 => {
            let steps = (opts.t_f / opts.dt).ceil() as usize;
            let every = (steps / (samples - 1)).max(1);
            system.integrate_rk4(opts.t_f, opts.dt, every, false)?
        }
    };
    let mut report = capacity(&trajectory, opts.t_f)?;
    let early = run_trajectory(&system, opts, opts.transient_t.min(opts.t_f), opts.transient_dt)?;
    report.transient_window = transient_window(&splice(&early, &trajectory), report.capacity, opts.margin)?;
    if let Some(window) = opts.rate_window {
        let fine = run_trajectory(&system, opts, window.1, opts.rate_dt)?;
        report.rate_ordering = Some(rate_ordering(&fine, window, opts.smoothing)?);
    }
    Ok(Evaluation { report, trajectory, early })
}

/// A scalar field of a [`SystemSpec`] addressed by name: `g`, or
/// `tau<j>`, `alpha<j>`, `cutoff<j>` with a 1-based qubit index.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParamPath {
    Coupling,
    Temperature(usize),
    Alpha(usize),
    Cutoff(usize),
}

impl FromStr for ParamPath {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "g" {
            return Ok(ParamPath::Coupling);
        }
        let split = s.find(|c: char| c.is_ascii_digit()).ok_or_else(|| Error::UnknownParameter(s.into()))?;
        let (name, idx) = s.split_at(split);
        let idx: usize = idx.parse().map_err(|_| Error::UnknownParameter(s.into()))?;
        if idx == 0 {
            return Err(Error::UnknownParameter(s.into()));
        }
        match name {
            "tau" => Ok(ParamPath::Temperature(idx - 1)),
            "alpha" => Ok(ParamPath::Alpha(idx - 1)),
            "cutoff" => Ok(ParamPath::Cutoff(idx - 1)),
            _ => Err(Error::UnknownParameter(s.into())),
        }
    }
}

impl fmt::Display for ParamPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamPath::Coupling => write!(f, "g"),
            ParamPath::Temperature(j) => write!(f, "tau{}", j + 1),
            ParamPath::Alpha(j) => write!(f, "alpha{}", j + 1),
            ParamPath::Cutoff(j) => write!(f, "cutoff{}", j + 1),
        }
    }
}

impl ParamPath {
    /// Copy of `base` with the addressed field set to `value`.
    pub fn apply(self, base: &SystemSpec, value: f64) -> Result<SystemSpec> {
        let mut spec = base.clone();
        let n = spec.n_qubits();
        let qubit = |j: usize| if j < n { Ok(j) } else { Err(Error::IndexOutOfRange { index: j, len: n }) };
        match self {
            ParamPath::Coupling => spec.g = value,
            ParamPath::Temperature(j) => spec.qubits[qubit(j)?].bath.temperature = value,
            ParamPath::Alpha(j) => spec.qubits[qubit(j)?].bath.alpha = value,
            ParamPath::Cutoff(j) => spec.qubits[qubit(j)?].bath.cutoff = value,
        }
        Ok(spec)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub value: f64,
    pub report: std::result::Result<MetricsReport, String>,
}

/// One independent evaluation per value; rows come back in input order
/// whatever the thread count.
pub fn sweep(
    base: &SystemSpec,
    path: ParamPath,
    values: &[f64],
    opts: &EvaluationOptions,
    threads: usize,
) -> Result<Vec<SweepRow>> {
    // Surface addressing errors once instead of per row.
    path.apply(base, values.first().copied().unwrap_or(0.0))?;
    let row = |&value: &f64| SweepRow {
        value,
        report: path
            .apply(base, value)
            .and_then(|spec| evaluate(&spec, opts))
            .map(|e| e.report)
            .map_err(|e| e.to_string()),
    };
    if threads <= 1 {
        return Ok(values.iter().map(row).collect());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::InvariantViolated(format!("thread pool: {e}")))?;
    Ok(pool.install(|| values.par_iter().map(row).collect()))
}

/// `count` evenly spaced values from `from` to `to` inclusive.
pub fn linspace(from: f64, to: f64, count: usize) -> Vec<f64> {
    match count {
        0 => vec![],
        1 => vec![from],
        _ => (0..count).map(|k| from + (to - from) * k as f64 / (count - 1) as f64).collect(),
    }
}
