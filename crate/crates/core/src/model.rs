//! Declarative description of a heat-transformer instance: qubits, their
//! baths, the energy-conserving interaction, and the two thermal junctions.
//!
//! Basis convention: `|0⟩` is the `σz = +1` eigenvector, `|1⟩` the `σz = −1`
//! one, and qubit 0 is the most significant bit of a basis index. Every
//! quantity is dimensionless (energies in units of the reference scale,
//! temperatures in the same units with `k_B = 1`).

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{embed, kron, pauli_z, ComplexMatrix, ONE};

/// Residual tolerance of the energy-matching constraint.
pub const CONSTRAINT_TOL: f64 = 1e-12;
/// Smallest admissible `|ε|`.
pub const MIN_ENERGY: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BathSpec {
    /// Ohmic coupling `α ≥ 0`.
    pub alpha: f64,
    /// Cutoff frequency `Ω > 0`.
    pub cutoff: f64,
    /// Bath temperature `τ > 0`; also the qubit's initial temperature.
    pub temperature: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QubitSpec {
    /// Signed level splitting `ε`.
    pub energy: f64,
    pub bath: BathSpec,
}

/// The energy-conserving interactions `g(|ket⟩⟨bra| + h.c.)` supported by the simulator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum InteractionKind {
    /// `|111⟩⟨000|`, requires `ε₃ = −ε₂ − ε₁`.
    #[serde(rename = "H1")]
    ThreeQubitH1,
    /// `|101⟩⟨010|`, requires `ε₃ = ε₂ − ε₁`.
    #[serde(rename = "H2")]
    ThreeQubitH2,
    /// `|110⟩⟨001|`, requires `ε₃ = ε₂ + ε₁`.
    #[serde(rename = "H3")]
    ThreeQubitH3,
    /// `|100⟩⟨011|`, requires `ε₃ = −ε₂ + ε₁`.
    #[serde(rename = "H4")]
    ThreeQubitH4,
    /// `|1010⟩⟨0101|`, requires `ε₄ = ε₃ − ε₂ + ε₁`.
    #[serde(rename = "Hprime")]
    FourQubitPrime,
}

impl InteractionKind {
    pub const ALL: [InteractionKind; 5] = [
        InteractionKind::ThreeQubitH1,
        InteractionKind::ThreeQubitH2,
        InteractionKind::ThreeQubitH3,
        InteractionKind::ThreeQubitH4,
        InteractionKind::FourQubitPrime,
    ];

    pub fn ket(self) -> &'static [u8] {
        match self {
            Self::ThreeQubitH1 => &[1, 1, 1],
            Self::ThreeQubitH2 => &[1, 0, 1],
            Self::ThreeQubitH3 => &[1, 1, 0],
            Self::ThreeQubitH4 => &[1, 0, 0],
            Self::FourQubitPrime => &[1, 0, 1, 0],
        }
    }

    pub fn bra(self) -> &'static [u8] {
        match self {
            Self::ThreeQubitH1 => &[0, 0, 0],
            Self::ThreeQubitH2 => &[0, 1, 0],
            Self::ThreeQubitH3 => &[0, 0, 1],
            Self::ThreeQubitH4 => &[0, 1, 1],
            Self::FourQubitPrime => &[0, 1, 0, 1],
        }
    }

    pub fn arity(self) -> usize {
        self.ket().len()
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::ThreeQubitH1 => "H1",
            Self::ThreeQubitH2 => "H2",
            Self::ThreeQubitH3 => "H3",
            Self::ThreeQubitH4 => "H4",
            Self::FourQubitPrime => "Hprime",
        }
    }

    /// Signed residual of the energy-matching constraint: the free-energy
    /// difference between the ket and bra configurations. Zero means the
    /// interaction commutes with the free Hamiltonian.
    pub fn constraint_residual(self, energies: &[f64]) -> f64 {
        // E(ket) − E(bra) = Σ_j s_j ε_j with s_j = +1 for a ket bit 0, −1 for bit 1
        self.ket()
            .iter()
            .zip(energies)
            .map(|(&bit, &e)| if bit == 0 { e } else { -e })
            .sum()
    }

    pub fn constraint_description(self) -> &'static str {
        match self {
            Self::ThreeQubitH1 => "e3 = -e2 - e1",
            Self::ThreeQubitH2 => "e3 = e2 - e1",
            Self::ThreeQubitH3 => "e3 = e2 + e1",
            Self::ThreeQubitH4 => "e3 = -e2 + e1",
            Self::FourQubitPrime => "e4 = e3 - e2 + e1",
        }
    }

    /// Primary and secondary junctions used when a config does not override them.
    pub fn default_junctions(self) -> (Junction, Junction) {
        match self {
            Self::FourQubitPrime => (Junction(0, 1), Junction(2, 3)),
            _ => (Junction(0, 1), Junction(1, 2)),
        }
    }

    /// Basis index of a bitstring (first bit most significant).
    pub fn basis_index(bits: &[u8]) -> usize {
        bits.iter().fold(0, |acc, &b| (acc << 1) | b as usize)
    }
}

impl fmt::Display for InteractionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Unordered pair of qubit indices whose temperature difference is tracked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Junction(pub usize, pub usize);

impl Junction {
    fn same_pair(self, other: Junction) -> bool {
        (self.0 == other.0 && self.1 == other.1) || (self.0 == other.1 && self.1 == other.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemSpec {
    pub qubits: Vec<QubitSpec>,
    pub kind: InteractionKind,
    pub g: f64,
    pub primary: Junction,
    pub secondary: Junction,
    /// Whether zero-frequency Bohr terms dissipate at their analytic limit rate.
    pub zero_frequency_terms: bool,
}

impl SystemSpec {
    /// Spec with the kind's default junctions and zero-frequency terms enabled.
    pub fn new(kind: InteractionKind, qubits: Vec<QubitSpec>, g: f64) -> Self {
        let (primary, secondary) = kind.default_junctions();
        Self { qubits, kind, g, primary, secondary, zero_frequency_terms: true }
    }

    pub fn n_qubits(&self) -> usize {
        self.qubits.len()
    }

    pub fn dim(&self) -> usize {
        1 << self.qubits.len()
    }

    pub fn energies(&self) -> Vec<f64> {
        self.qubits.iter().map(|q| q.energy).collect()
    }

    pub fn baths(&self) -> Vec<BathSpec> {
        self.qubits.iter().map(|q| q.bath).collect()
    }

    pub fn validate(&self) -> ValidationReport {
        validate(self)
    }

    pub(crate) fn ensure_valid(&self) -> Result<()> {
        let report = validate(self);
        if report.is_valid() {
            Ok(())
        } else {
            Err(Error::InvalidSpec(report))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub constraint: String,
    /// How far the offending quantity is from satisfying the constraint.
    pub residual: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    fn push(&mut self, constraint: impl Into<String>, residual: f64) {
        self.violations.push(Violation { constraint: constraint.into(), residual });
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return f.write_str("valid");
        }
        let parts: Vec<String> =
            self.violations.iter().map(|v| format!("{} (residual {})", v.constraint, v.residual)).collect();
        f.write_str(&parts.join("; "))
    }
}

/// Checks every structural and physical constraint of `spec`, collecting all failures.
pub fn validate(spec: &SystemSpec) -> ValidationReport {
    let mut report = ValidationReport::default();
    let n = spec.qubits.len();
    let arity = spec.kind.arity();

    if n != arity {
        report.push(format!("{} needs {} qubits, got {}", spec.kind, arity, n), (n as f64 - arity as f64).abs());
    }
    debug_assert!(spec.kind.ket().iter().zip(spec.kind.bra()).all(|(a, b)| a != b));

    for (j, q) in spec.qubits.iter().enumerate() {
        let label = j + 1;
        if !(q.energy.is_finite() && q.energy.abs() > MIN_ENERGY) {
            report.push(format!("|e{label}| > {MIN_ENERGY:e}"), MIN_ENERGY - q.energy.abs());
        }
        let b = &q.bath;
        if !(b.alpha >= 0.0 && b.alpha.is_finite()) {
            report.push(format!("alpha{label} >= 0"), -b.alpha);
        }
        if !(b.cutoff > 0.0 && b.cutoff.is_finite()) {
            report.push(format!("cutoff{label} > 0"), -b.cutoff);
        }
        if !(b.temperature > 0.0 && b.temperature.is_finite()) {
            report.push(format!("tau{label} > 0"), -b.temperature);
        }
    }

    if n == arity {
        let residual = spec.kind.constraint_residual(&spec.energies());
        if !(residual.abs() <= CONSTRAINT_TOL) {
            report.push(format!("self-containment {}", spec.kind.constraint_description()), residual.abs());
        }
    }

    if !(spec.g >= 0.0 && spec.g.is_finite()) {
        report.push("g >= 0", -spec.g);
    }

    for (name, j) in [("primary", spec.primary), ("secondary", spec.secondary)] {
        for idx in [j.0, j.1] {
            if idx >= n {
                report.push(format!("{name} junction index {idx} < {n}"), (idx + 1 - n) as f64);
            }
        }
        if j.0 == j.1 {
            report.push(format!("{name} junction joins two distinct qubits"), 0.0);
        }
    }
    if spec.primary.same_pair(spec.secondary) {
        report.push("primary and secondary junctions differ", 0.0);
    }
    report
}

/// `H = ½ Σ_j ε_j σz⁽ʲ⁾ + g(|ket⟩⟨bra| + |bra⟩⟨ket|)`.
pub fn build_hamiltonian(spec: &SystemSpec) -> Result<ComplexMatrix> {
    spec.ensure_valid()?;
    let n = spec.n_qubits();
    let dim = spec.dim();
    let mut h = ComplexMatrix::zeros(dim, dim);
    for (j, q) in spec.qubits.iter().enumerate() {
        h += &embed(&pauli_z(), j, n).scale_real(0.5 * q.energy);
    }
    let ket = InteractionKind::basis_index(spec.kind.ket());
    let bra = InteractionKind::basis_index(spec.kind.bra());
    h[(ket, bra)] += ONE * spec.g;
    h[(bra, ket)] += ONE * spec.g;
    Ok(h)
}

/// Population of `|0⟩` for a qubit of splitting `energy` in equilibrium at `temperature`.
pub fn gibbs_population(energy: f64, temperature: f64) -> Result<f64> {
    if !(temperature > 0.0) {
        return Err(Error::NonPositiveTemperature(temperature));
    }
    Ok(1.0 / (1.0 + (energy / temperature).exp()))
}

/// `diag(p, 1 − p)` for one qubit.
pub fn qubit_state(p: f64) -> ComplexMatrix {
    ComplexMatrix::from_diag(&[p, 1.0 - p])
}

/// Initial populations `p_j` of every qubit, each at its bath temperature.
pub fn initial_populations(spec: &SystemSpec) -> Result<Vec<f64>> {
    spec.qubits.iter().map(|q| gibbs_population(q.energy, q.bath.temperature)).collect()
}

/// Product of single-qubit thermal states at the bath temperatures.
pub fn initial_state(spec: &SystemSpec) -> Result<ComplexMatrix> {
    spec.ensure_valid()?;
    let pops = initial_populations(spec)?;
    Ok(product_state(&pops))
}

pub(crate) fn product_state(pops: &[f64]) -> ComplexMatrix {
    pops.iter().fold(ComplexMatrix::identity(1), |acc, &p| kron(&acc, &qubit_state(p)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BiasReport {
    pub p_ket: f64,
    pub p_bra: f64,
    pub biased_toward_ket: bool,
}

/// Compares the initial probabilities of the interaction's ket and bra configurations.
pub fn bias_check(spec: &SystemSpec) -> Result<BiasReport> {
    let pops = initial_populations(spec)?;
    Ok(bias_between(&pops, spec.kind.ket(), spec.kind.bra()))
}

/// Bias between two arbitrary configurations given per-qubit `|0⟩` populations.
pub fn bias_between(pops: &[f64], ket: &[u8], bra: &[u8]) -> BiasReport {
    let prob = |bits: &[u8]| -> f64 {
        bits.iter().zip(pops).map(|(&b, &p)| if b == 0 { p } else { 1.0 - p }).product()
    };
    let (p_ket, p_bra) = (prob(ket), prob(bra));
    BiasReport { p_ket, p_bra, biased_toward_ket: p_ket > p_bra }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::hermitian_eig;

    pub(crate) fn bath(alpha: f64, temperature: f64) -> BathSpec {
        BathSpec { alpha, cutoff: 1e3, temperature }
    }

    fn three(kind: InteractionKind, e: [f64; 3], tau: [f64; 3], g: f64) -> SystemSpec {
        let alphas = [1e-4, 1e-5, 1e-3];
        let qubits = (0..3).map(|j| QubitSpec { energy: e[j], bath: bath(alphas[j], tau[j]) }).collect();
        SystemSpec::new(kind, qubits, g)
    }

    #[test]
    fn bitstrings_differ_everywhere() {
        for kind in InteractionKind::ALL {
            assert_eq!(kind.ket().len(), kind.bra().len());
            assert!(kind.ket().iter().zip(kind.bra()).all(|(a, b)| a != b), "{kind}");
        }
    }

    #[test]
    fn figure_parameter_sets_validate() {
        let h1 = three(InteractionKind::ThreeQubitH1, [1.0, 2.0, -3.0], [1.0, 2.0, 3.0], 0.5);
        assert!(h1.validate().is_valid());
        let h2 = three(InteractionKind::ThreeQubitH2, [2.0, 1.4, -0.6], [1.0, 2.0, 3.0], 0.5);
        assert!(h2.validate().is_valid(), "{}", h2.validate());
    }

    #[test]
    fn constraint_violation_reports_residual() {
        let bad = three(InteractionKind::ThreeQubitH1, [1.0, 2.0, 3.0], [1.0, 2.0, 3.0], 0.5);
        let report = bad.validate();
        assert_eq!(report.violations.len(), 1);
        assert!(report.violations[0].constraint.contains("e3 = -e2 - e1"));
        assert!((report.violations[0].residual - 6.0).abs() < 1e-15);
        assert!(matches!(build_hamiltonian(&bad), Err(Error::InvalidSpec(_))));
    }

    #[test]
    fn structural_violations_are_all_listed() {
        let mut s = three(InteractionKind::ThreeQubitH1, [1.0, 2.0, -3.0], [1.0, -2.0, 3.0], -0.1);
        s.secondary = Junction(1, 0);
        let report = s.validate();
        let names: Vec<_> = report.violations.iter().map(|v| v.constraint.as_str()).collect();
        assert!(names.iter().any(|c| c.contains("tau2")));
        assert!(names.iter().any(|c| c.contains("g >= 0")));
        assert!(names.iter().any(|c| c.contains("junctions differ")));
    }

    #[test]
    fn wrong_arity_rejected() {
        let mut s = three(InteractionKind::ThreeQubitH1, [1.0, 2.0, -3.0], [1.0, 2.0, 3.0], 0.5);
        s.kind = InteractionKind::FourQubitPrime;
        s.primary = Junction(0, 1);
        s.secondary = Junction(2, 3);
        assert!(!s.validate().is_valid());
    }

    #[test]
    fn uncoupled_hamiltonian_spectrum() {
        let s = three(InteractionKind::ThreeQubitH1, [1.0, 2.0, -3.0], [1.0, 2.0, 3.0], 0.0);
        let h = build_hamiltonian(&s).unwrap();
        // ½(s1·1 + s2·2 − s3·3) over sign patterns
        let mut expected = vec![];
        for s1 in [1.0, -1.0] {
            for s2 in [1.0, -1.0] {
                for s3 in [1.0, -1.0] {
                    expected.push(0.5 * (s1 * 1.0 + s2 * 2.0 + s3 * -3.0));
                }
            }
        }
        let diag: Vec<f64> = h.diagonal().iter().map(|z| z.re).collect();
        assert_eq!(diag, expected);
        expected.sort_by(f64::total_cmp);
        assert_eq!(expected, vec![-3.0, -2.0, -1.0, 0.0, 0.0, 1.0, 2.0, 3.0]);
        let e = hermitian_eig(&h).unwrap();
        for (a, b) in e.eigenvalues.iter().zip(&expected) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn interaction_element() {
        let s = three(InteractionKind::ThreeQubitH1, [1.0, 2.0, -3.0], [1.0, 2.0, 3.0], 0.5);
        let h = build_hamiltonian(&s).unwrap();
        assert_eq!(h[(7, 0)].re, 0.5);
        assert_eq!(h[(0, 7)].re, 0.5);
        assert!(h.trace().norm() < 1e-12);
        assert!(h.is_hermitian(1e-14));
    }

    #[test]
    fn four_qubit_interaction_element() {
        let qubits = [1.0, 2.0, 3.0, 2.0]
            .iter()
            .zip([1.0, 2.0, 3.0, 3.25])
            .map(|(&e, t)| QubitSpec { energy: e, bath: bath(1e-3, t) })
            .collect();
        let s = SystemSpec::new(InteractionKind::FourQubitPrime, qubits, 0.5);
        assert!(s.validate().is_valid());
        let h = build_hamiltonian(&s).unwrap();
        assert_eq!(h[(0b1010, 0b0101)].re, 0.5);
        assert!(h.trace().norm() < 1e-12);
    }

    #[test]
    fn gibbs_populations() {
        assert!((gibbs_population(2.0, 2.0).unwrap() - 1.0 / (1.0 + 1f64.exp())).abs() < 1e-15);
        assert!((gibbs_population(2.0, 2.0).unwrap() - 0.268941).abs() < 1e-6);
        assert!((gibbs_population(-3.0, 3.0).unwrap() - 0.731059).abs() < 1e-6);
        assert!((gibbs_population(1.0, 1e9).unwrap() - 0.5).abs() < 1e-9);
        assert_eq!(gibbs_population(1.0, 0.0), Err(Error::NonPositiveTemperature(0.0)));
    }

    #[test]
    fn initial_state_of_fig2() {
        let s = three(InteractionKind::ThreeQubitH1, [1.0, 2.0, -3.0], [1.0, 2.0, 3.0], 0.5);
        let pops = initial_populations(&s).unwrap();
        for (p, want) in pops.iter().zip([0.26894, 0.26894, 0.73106]) {
            assert!((p - want).abs() < 1e-5);
        }
        let rho = initial_state(&s).unwrap();
        assert!((rho.trace().re - 1.0).abs() < 1e-15);
        for i in 0..8 {
            for j in 0..8 {
                if i != j {
                    assert_eq!(rho[(i, j)].norm(), 0.0);
                }
            }
        }
    }

    #[test]
    fn symmetric_state_is_permutation_invariant() {
        let s = three(InteractionKind::ThreeQubitH1, [1.0, 1.0, -2.0], [2.0, 2.0, 2.0], 0.5);
        let pops = initial_populations(&s).unwrap();
        assert_eq!(pops[0], pops[1]);
        let rho = initial_state(&s).unwrap();
        // |001⟩ ↔ |010⟩ ↔ |100⟩ only differ through qubit 3's energy
        assert_eq!(rho[(0b100, 0b100)], rho[(0b010, 0b010)]);
    }

    #[test]
    fn fig2_bias() {
        let s = three(InteractionKind::ThreeQubitH1, [1.0, 2.0, -3.0], [1.0, 2.0, 3.0], 0.5);
        let b = bias_check(&s).unwrap();
        let (p1, p3) = (1.0 / (1.0 + 1f64.exp()), 1.0 / (1.0 + (-1f64).exp()));
        assert!((b.p_ket - (1.0 - p1) * (1.0 - p1) * (1.0 - p3)).abs() < 1e-15);
        assert!((b.p_ket - 0.1437).abs() < 1e-4);
        assert!((b.p_bra - 0.0529).abs() < 1e-4);
        assert!(b.biased_toward_ket);
        let flipped = bias_between(&initial_populations(&s).unwrap(), s.kind.bra(), s.kind.ket());
        assert!(!flipped.biased_toward_ket);
    }

    #[test]
    fn infinite_temperature_bias_is_neutral() {
        let s = three(InteractionKind::ThreeQubitH1, [1.0, 2.0, -3.0], [1e12, 1e12, 1e12], 0.5);
        let b = bias_check(&s).unwrap();
        assert!((b.p_ket - 0.125).abs() < 1e-11 && (b.p_bra - 0.125).abs() < 1e-11);
        let exact = bias_between(&[0.5; 3], s.kind.ket(), s.kind.bra());
        assert!(!exact.biased_toward_ket);
    }
}
