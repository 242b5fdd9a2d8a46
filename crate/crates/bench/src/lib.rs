//! Fixtures shared by the benchmarks.

use qht_core::{BathSpec, InteractionKind, QubitSpec, SystemSpec};

/// Three-qubit `|111⟩⟨000|` device with ε = (1, 2, −3), τ = (1, 2, 3), g = 0.5.
pub fn three_qubit() -> SystemSpec {
    let alphas = [1e-4, 1e-5, 1e-3];
    let qubits = [(1.0, 1.0), (2.0, 2.0), (-3.0, 3.0)]
        .iter()
        .zip(alphas)
        .map(|(&(energy, temperature), alpha)| QubitSpec { energy, bath: BathSpec { alpha, cutoff: 1e3, temperature } })
        .collect();
    SystemSpec::new(InteractionKind::ThreeQubitH1, qubits, 0.5)
}

/// Four-qubit `|1010⟩⟨0101|` device with ε = (1, 2, 3, 2), τ = (1, 2, 3, 3.5), g = 0.5.
pub fn four_qubit() -> SystemSpec {
    let alphas = [1e-4, 1e-5, 1e-3, 1e-2];
    let qubits = [(1.0, 1.0), (2.0, 2.0), (3.0, 3.0), (2.0, 3.5)]
        .iter()
        .zip(alphas)
        .map(|(&(energy, temperature), alpha)| QubitSpec { energy, bath: BathSpec { alpha, cutoff: 1e3, temperature } })
        .collect();
    SystemSpec::new(InteractionKind::FourQubitPrime, qubits, 0.5)
}
