//! Secular GKSL generator built from the eigen-structure of the total
//! Hamiltonian.
//!
//! Each qubit couples to its bath through `σx` on that qubit. The coupling is
//! split into eigenoperators `A_j(ω) = Σ_{λ_l − λ_k = ω} P_k σx⁽ʲ⁾ P_l`, where
//! `P_k` projects onto a whole (possibly degenerate) eigenspace, so the
//! result does not depend on the eigenvector basis chosen inside a block.

use num_complex::Complex64;

use crate::baths::{decay_rate, RateTable};
use crate::error::{Error, Result};
use crate::linalg::{embed, hermitian_eig, kron, pauli_x, ComplexMatrix, HermitianEigen, I};
use crate::model::{build_hamiltonian, BathSpec, SystemSpec};

/// Eigenvalues and Bohr frequencies closer than this are identified.
pub const FREQUENCY_TOL: f64 = 1e-9;
/// Jump operators with a smaller max-norm are discarded.
pub const NEGLIGIBLE_OPERATOR: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct JumpOperator {
    /// Energy released to the bath by the transition.
    pub omega: f64,
    pub op: ComplexMatrix,
    pub rate: f64,
}

#[derive(Debug, Clone)]
pub struct BohrDecomposition {
    pub eigen: HermitianEigen,
    /// Jump operators of each qubit, sorted by ascending frequency. Entries
    /// with zero rate are kept so completeness can be checked; the
    /// dissipator ignores them.
    pub jumps: Vec<Vec<JumpOperator>>,
    n_qubits: usize,
}

impl BohrDecomposition {
    /// Decomposes `h` for `baths.len()` qubits, one bath per qubit.
    pub fn new(h: &ComplexMatrix, baths: &[BathSpec], zero_policy: bool) -> Result<Self> {
        let n_qubits = baths.len();
        let dim = 1usize << n_qubits;
        if h.rows() != dim || h.cols() != dim {
            return Err(Error::DimensionMismatch {
                expected: format!("{dim}x{dim} Hamiltonian"),
                found: format!("{}x{}", h.rows(), h.cols()),
            });
        }
        let eigen = hermitian_eig(h)?;
        let blocks = degenerate_blocks(&eigen.eigenvalues);
        let levels: Vec<f64> = blocks
            .iter()
            .map(|b| b.iter().map(|&k| eigen.eigenvalues[k]).sum::<f64>() / b.len() as f64)
            .collect();

        // (ω, k, l) for every ordered block pair; A maps block l to block k.
        let mut pairs: Vec<(f64, usize, usize)> = Vec::with_capacity(blocks.len() * blocks.len());
        for (k, lk) in levels.iter().enumerate() {
            for (l, ll) in levels.iter().enumerate() {
                pairs.push((ll - lk, k, l));
            }
        }
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
        let clusters = cluster_frequencies(&pairs);

        let v = &eigen.eigenvectors;
        let v_dag = v.adjoint();
        let mut jumps = Vec::with_capacity(n_qubits);
        for (j, bath) in baths.iter().enumerate() {
            let sx_eig = &(&v_dag * &embed(&pauli_x(), j, n_qubits)) * v;
            let mut ops = Vec::new();
            for cluster in &clusters {
                let mut a_eig = ComplexMatrix::zeros(dim, dim);
                for &(_, k, l) in cluster {
                    for &r in &blocks[k] {
                        for &c in &blocks[l] {
                            a_eig[(r, c)] = sx_eig[(r, c)];
                        }
                    }
                }
                if a_eig.max_norm() <= NEGLIGIBLE_OPERATOR {
                    continue;
                }
                let omega = cluster_frequency(cluster);
                let op = &(v * &a_eig) * &v_dag;
                ops.push(JumpOperator { omega, op, rate: decay_rate(omega, bath, zero_policy) });
            }
            jumps.push(ops);
        }

        let dec = Self { eigen, jumps, n_qubits };
        dec.check(h)?;
        Ok(dec)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.eigen.dim()
    }

    /// Jump operators that actually dissipate.
    pub fn active(&self) -> impl Iterator<Item = &JumpOperator> {
        self.jumps.iter().flatten().filter(|a| a.rate > 0.0)
    }

    pub fn rate_table(&self) -> RateTable {
        RateTable {
            per_qubit: self.jumps.iter().map(|ops| ops.iter().map(|a| (a.omega, a.rate)).collect()).collect(),
        }
    }

    /// Largest eigenoperator residual `‖[H, A] + ωA‖_max`.
    pub fn eigenoperator_residual(&self, h: &ComplexMatrix) -> f64 {
        self.jumps
            .iter()
            .flatten()
            .map(|a| {
                let comm = &(h * &a.op) - &(&a.op * h);
                (&comm + &a.op.scale_real(a.omega)).max_norm()
            })
            .fold(0.0, f64::max)
    }

    /// Largest `‖Σ_ω A_j(ω) − σx⁽ʲ⁾‖_max` over qubits.
    pub fn completeness_residual(&self) -> f64 {
        let n = self.n_qubits;
        self.jumps
            .iter()
            .enumerate()
            .map(|(j, ops)| {
                let mut sum = ComplexMatrix::zeros(self.dim(), self.dim());
                for a in ops {
                    sum += &a.op;
                }
                (&sum - &embed(&pauli_x(), j, n)).max_norm()
            })
            .fold(0.0, f64::max)
    }

    /// Largest `‖A(−ω) − A(ω)†‖_max`; an unmatched partner counts as infinite.
    pub fn conjugation_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for ops in &self.jumps {
            for a in ops.iter().filter(|a| a.omega != 0.0) {
                match ops.iter().find(|b| (b.omega + a.omega).abs() <= FREQUENCY_TOL) {
                    Some(b) => worst = worst.max((&b.op - &a.op.adjoint()).max_norm()),
                    None => return f64::INFINITY,
                }
            }
        }
        worst
    }

    fn check(&self, h: &ComplexMatrix) -> Result<()> {
        let eig = self.eigenoperator_residual(h);
        let scale = h.max_norm().max(1.0);
        if eig > 1e-9 * scale {
            return Err(Error::InvariantViolated(format!("eigenoperator residual {eig:e}")));
        }
        let comp = self.completeness_residual();
        if comp > 1e-10 {
            return Err(Error::InvariantViolated(format!("jump operators miss sigma_x by {comp:e}")));
        }
        Ok(())
    }
}

fn degenerate_blocks(eigenvalues: &[f64]) -> Vec<Vec<usize>> {
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    for (k, &lam) in eigenvalues.iter().enumerate() {
        match blocks.last_mut() {
            Some(b) if (lam - eigenvalues[*b.last().unwrap()]).abs() <= FREQUENCY_TOL => b.push(k),
            _ => blocks.push(vec![k]),
        }
    }
    blocks
}

fn cluster_frequencies(sorted: &[(f64, usize, usize)]) -> Vec<Vec<(f64, usize, usize)>> {
    let mut out: Vec<Vec<(f64, usize, usize)>> = Vec::new();
    for &p in sorted {
        match out.last_mut() {
            Some(c) if p.0 - c.last().unwrap().0 <= FREQUENCY_TOL => c.push(p),
            _ => out.push(vec![p]),
        }
    }
    out
}

fn cluster_frequency(cluster: &[(f64, usize, usize)]) -> f64 {
    if cluster.iter().any(|&(_, k, l)| k == l) {
        return 0.0;
    }
    cluster.iter().map(|c| c.0).sum::<f64>() / cluster.len() as f64
}

/// Bohr decomposition of the spec's total Hamiltonian with its local baths.
pub fn decompose(spec: &SystemSpec) -> Result<BohrDecomposition> {
    let h = build_hamiltonian(spec)?;
    BohrDecomposition::new(&h, &spec.baths(), spec.zero_frequency_terms)
}

fn check_dims(rho: &ComplexMatrix, dim: usize) -> Result<()> {
    if rho.rows() != dim || rho.cols() != dim {
        return Err(Error::DimensionMismatch {
            expected: format!("{dim}x{dim}"),
            found: format!("{}x{}", rho.rows(), rho.cols()),
        });
    }
    Ok(())
}

/// `Σ_{j,ω} γ_j(ω) [A ρ A† − ½{A†A, ρ}]`.
pub fn dissipator(rho: &ComplexMatrix, dec: &BohrDecomposition) -> Result<ComplexMatrix> {
    check_dims(rho, dec.dim())?;
    let mut out = ComplexMatrix::zeros(dec.dim(), dec.dim());
    for a in dec.active() {
        let a_dag = a.op.adjoint();
        let jump = &(&a.op * rho) * &a_dag;
        let ada = &a_dag * &a.op;
        let anti = &(&ada * rho) + &(rho * &ada);
        out += &(&jump - &anti.scale_real(0.5)).scale_real(a.rate);
    }
    Ok(out)
}

/// `dρ/dt = −i[H, ρ] + D(ρ)`.
pub fn rhs(rho: &ComplexMatrix, h: &ComplexMatrix, dec: &BohrDecomposition) -> Result<ComplexMatrix> {
    check_dims(rho, dec.dim())?;
    check_dims(h, dec.dim())?;
    let comm = h.commutator(rho)?;
    Ok(&comm.scale(-I) + &dissipator(rho, dec)?)
}

/// Precomputed form of [`rhs`] for repeated evaluation:
/// `−i(H_eff ρ − ρ H_eff†) + Σ γ A ρ A†` with `H_eff = H − (i/2) Σ γ A†A`.
#[derive(Debug, Clone)]
pub struct Generator {
    h_eff: ComplexMatrix,
    h_eff_dag: ComplexMatrix,
    jumps: Vec<(f64, ComplexMatrix, ComplexMatrix)>,
}

impl Generator {
    pub fn new(h: &ComplexMatrix, dec: &BohrDecomposition) -> Result<Self> {
        check_dims(h, dec.dim())?;
        let mut h_eff = h.clone();
        let mut jumps = Vec::new();
        for a in dec.active() {
            let a_dag = a.op.adjoint();
            h_eff -= &(&a_dag * &a.op).scale(Complex64::new(0.0, 0.5 * a.rate));
            jumps.push((a.rate, a.op.clone(), a_dag));
        }
        let h_eff_dag = h_eff.adjoint();
        Ok(Self { h_eff, h_eff_dag, jumps })
    }

    pub fn apply(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        let mut out = &(&self.h_eff * rho) - &(rho * &self.h_eff_dag);
        out = out.scale(-I);
        for (rate, a, a_dag) in &self.jumps {
            out += &(&(a * rho) * a_dag).scale_real(*rate);
        }
        out
    }
}

/// Column-stacked superoperator of the master equation, `vec(dρ/dt) = L·vec(ρ)`.
pub fn liouvillian(spec: &SystemSpec) -> Result<ComplexMatrix> {
    let h = build_hamiltonian(spec)?;
    let dec = BohrDecomposition::new(&h, &spec.baths(), spec.zero_frequency_terms)?;
    liouvillian_from(&h, &dec)
}

/// `L = −i(I⊗H − Hᵀ⊗I) + Σ γ [Ā⊗A − ½ I⊗A†A − ½ (A†A)ᵀ⊗I]`.
pub fn liouvillian_from(h: &ComplexMatrix, dec: &BohrDecomposition) -> Result<ComplexMatrix> {
    let d = dec.dim();
    check_dims(h, d)?;
    let id = ComplexMatrix::identity(d);
    let mut k = ComplexMatrix::zeros(d, d);
    let mut l = (&kron(&id, h) - &kron(&h.transpose(), &id)).scale(-I);
    for a in dec.active() {
        k += &(&a.op.adjoint() * &a.op).scale_real(a.rate);
        l += &kron(&a.op.conj(), &a.op).scale_real(a.rate);
    }
    l -= &(&kron(&id, &k) + &kron(&k.transpose(), &id)).scale_real(0.5);
    Ok(l)
}
