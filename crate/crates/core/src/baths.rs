//! Ohmic bosonic baths: spectral density, occupation numbers and the
//! signed-frequency decay rates of the secular dissipator.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{BathSpec, SystemSpec};

/// Born–Markov margin above which a run should be flagged.
pub const BORN_MARKOV_WARN: f64 = 1e-2;

/// `J(ω) = α ω exp(−ω/Ω)`.
pub fn spectral_density(omega: f64, bath: &BathSpec) -> Result<f64> {
    if omega < 0.0 {
        return Err(Error::NegativeFrequency(omega));
    }
    Ok(bath.alpha * omega * (-omega / bath.cutoff).exp())
}

/// `f(ω, T) = 1 / (exp(ω/T) − 1)`.
pub fn bose_einstein(omega: f64, temperature: f64) -> Result<f64> {
    if !(omega > 0.0) {
        return Err(Error::NonPositiveFrequency(omega));
    }
    if !(temperature > 0.0) {
        return Err(Error::NonPositiveTemperature(temperature));
    }
    Ok(1.0 / (omega / temperature).exp_m1())
}

/// Rate of a transition that releases energy `omega` into the bath
/// (`omega < 0` absorbs `|omega|`). At `omega = 0` the rate is the common
/// limit `α T` of both branches when `zero_policy` holds, otherwise zero.
pub fn decay_rate(omega: f64, bath: &BathSpec, zero_policy: bool) -> f64 {
    let t = bath.temperature;
    if omega == 0.0 {
        return if zero_policy { bath.alpha * t } else { 0.0 };
    }
    let w = omega.abs();
    let x = w / t;
    // J(w)·f(w) = α w e^{−w/Ω} / (e^{x} − 1); as w→0 this tends to α T, so
    // evaluate w/(e^x − 1) = T · x/expm1(x) to stay accurate for tiny w.
    let damping = (-w / bath.cutoff).exp();
    let absorb = bath.alpha * damping * t * (x / x.exp_m1());
    if omega > 0.0 {
        absorb + bath.alpha * w * damping
    } else {
        absorb
    }
}

/// Per-qubit `(ω, γ)` pairs feeding the dissipator.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct RateTable {
    pub per_qubit: Vec<Vec<(f64, f64)>>,
}

impl RateTable {
    pub fn max_rate(&self) -> f64 {
        self.per_qubit.iter().flatten().map(|&(_, g)| g).fold(0.0, f64::max)
    }

    pub fn is_empty(&self) -> bool {
        self.per_qubit.iter().all(Vec::is_empty)
    }
}

/// Builds the table for the given Bohr frequencies of each qubit.
pub fn rate_table(frequencies: &[Vec<f64>], baths: &[BathSpec], zero_policy: bool) -> RateTable {
    let per_qubit = frequencies
        .iter()
        .zip(baths)
        .map(|(ws, b)| ws.iter().map(|&w| (w, decay_rate(w, b, zero_policy))).collect())
        .collect();
    RateTable { per_qubit }
}

/// `max γ / min(|ε_j|, g)`; small values justify the weak-coupling treatment.
/// An uncoupled system (`g = 0`) is measured against the splittings alone.
pub fn born_markov_margin(spec: &SystemSpec, table: &RateTable) -> f64 {
    let mut scale = spec.qubits.iter().map(|q| q.energy.abs()).fold(f64::INFINITY, f64::min);
    if spec.g > 0.0 {
        scale = scale.min(spec.g);
    }
    table.max_rate() / scale
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bath(alpha: f64, temperature: f64) -> BathSpec {
        BathSpec { alpha, cutoff: 1e3, temperature }
    }

    #[test]
    fn spectral_density_values() {
        let b = bath(1e-4, 1.0);
        let j = spectral_density(1.0, &b).unwrap();
        assert!((j - 1e-4 * (-0.001f64).exp()).abs() < 1e-20);
        assert!((j - 9.990005e-5).abs() < 1e-11);
        assert_eq!(spectral_density(0.0, &b).unwrap(), 0.0);
        let at_cutoff = spectral_density(1e3, &b).unwrap();
        assert!((at_cutoff - 1e-4 * 1e3 * (-1f64).exp()).abs() < 1e-15);
        assert_eq!(spectral_density(-1.0, &b), Err(Error::NegativeFrequency(-1.0)));
    }

    #[test]
    fn occupation_values() {
        assert!((bose_einstein(1.0, 1.0).unwrap() - 0.581977).abs() < 1e-6);
        assert!((bose_einstein(2f64.ln(), 1.0).unwrap() - 1.0).abs() < 1e-14);
        assert!(bose_einstein(50.0, 1.0).unwrap() < 2e-22);
        assert!(matches!(bose_einstein(0.0, 1.0), Err(Error::NonPositiveFrequency(_))));
        assert!(matches!(bose_einstein(1.0, -1.0), Err(Error::NonPositiveTemperature(_))));
    }

    #[test]
    fn decay_rate_branches() {
        let b = bath(1e-4, 1.0);
        let j = spectral_density(1.0, &b).unwrap();
        let f = bose_einstein(1.0, 1.0).unwrap();
        let up = decay_rate(1.0, &b, true);
        let down = decay_rate(-1.0, &b, true);
        assert!((up - j * (1.0 + f)).abs() <= 1e-15 * up);
        assert!((down - j * f).abs() <= 1e-15 * down);
        assert!((up - 1.580396e-4).abs() < 1e-10);
        assert!((down - 5.813950e-5).abs() < 1e-11);
    }

    #[test]
    fn zero_frequency_policy() {
        let b = bath(1e-4, 3.0);
        assert!((decay_rate(0.0, &b, true) - 3e-4).abs() < 1e-18);
        assert_eq!(decay_rate(0.0, &b, false), 0.0);
    }

    #[test]
    fn continuity_at_zero() {
        let b = bath(1e-4, 3.0);
        for w in [1e-6, -1e-6] {
            assert!((decay_rate(w, &b, true) - 3e-4).abs() <= 1e-9);
        }
    }

    #[test]
    fn rate_table_layout() {
        let t = rate_table(&[vec![1.0, -1.0], vec![]], &[bath(1e-4, 1.0), bath(0.0, 1.0)], true);
        assert_eq!(t.per_qubit.len(), 2);
        assert_eq!(t.per_qubit[0].len(), 2);
        assert!(t.max_rate() > 1.5e-4);
        assert!(!t.is_empty());
    }
}
