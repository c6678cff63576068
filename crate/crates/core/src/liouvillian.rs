//! Hamiltonians and the vectorized Lindblad generator of the refrigerator.
//!
//! `dρ/dt = −i[H₀ + H_int, ρ] + Σ_k Γ↓_k D[σ₋,k]ρ + Γ↑_k D[σ₊,k]ρ` with
//! `D[c]ρ = cρc† − ½{c†c, ρ}`, `H₀ = ½ Σ E_k σ_z,k` and
//! `H_int = g(σ₋σ₊σ₋ + σ₊σ₋σ₊)`, which swaps `|e g e>` and `|g e g>`.

use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{eigvals_hermitian, kron, CMatrix, C64, I, ONE, ZERO};
use crate::reservoirs::{rates, BathState, ReservoirSpec, Role, Statistics};
use crate::tolerances;

pub const QUBITS: usize = 3;
pub const DIM: usize = 8;
pub const SUPER_DIM: usize = DIM * DIM;

/// Full parameter set of the three-qubit refrigerator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FridgeConfig {
    /// Energy gaps `E₁, E₂, E₃`.
    pub gaps: [f64; 3],
    /// Dissipation rates `γ₁, γ₂, γ₃`.
    pub gammas: [f64; 3],
    /// Cold, room and hot reservoirs, in that order.
    pub reservoirs: [ReservoirSpec; 3],
    /// Three-body coupling `g`.
    pub coupling: f64,
}

impl FridgeConfig {
    /// Gaps (1, 5, 4), unit rates, bosonic baths at `T_c`, `T_r = 2`, `T_h`, and `g = 1`.
    pub fn reference_positive(t_c: f64, t_h: f64) -> Result<Self> {
        let config = Self {
            gaps: [1.0, 5.0, 4.0],
            gammas: [1.0, 1.0, 1.0],
            reservoirs: [
                ReservoirSpec::bosonic(Role::Cold, t_c)?,
                ReservoirSpec::bosonic(Role::Room, 2.0)?,
                ReservoirSpec::new(Role::Hot, Statistics::Bosonic, t_h)?,
            ],
            coupling: 1.0,
        };
        config.validate()?;
        Ok(config)
    }

    /// Same as [`FridgeConfig::reference_positive`] with a fermionic hot bath at `T_h` (typically < 0).
    pub fn reference_negative(t_c: f64, t_h: f64) -> Result<Self> {
        let mut config = Self::reference_positive(t_c, 10.0)?;
        config.reservoirs[2] = ReservoirSpec::fermionic(Role::Hot, t_h)?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        for (k, &e) in self.gaps.iter().enumerate() {
            if !(e > 0.0 && e.is_finite()) {
                return Err(Error::InvalidConfig(format!("gap E{} must be positive, got {e}", k + 1)));
            }
        }
        for (k, &g) in self.gammas.iter().enumerate() {
            if !(g >= 0.0 && g.is_finite()) {
                return Err(Error::InvalidConfig(format!("rate gamma{} must be >= 0, got {g}", k + 1)));
            }
        }
        if !(self.coupling >= 0.0 && self.coupling.is_finite()) {
            return Err(Error::InvalidConfig(format!("coupling must be >= 0, got {}", self.coupling)));
        }
        for (spec, role) in self.reservoirs.iter().zip(Role::ALL) {
            if spec.role != role {
                return Err(Error::InvalidConfig(format!(
                    "reservoir order must be cold, room, hot; found {:?} where {role:?} was expected",
                    spec.role
                )));
            }
            spec.validate()?;
        }
        Ok(())
    }

    /// Whether `E₃ = E₂ − E₁`, the operating point for positive-temperature baths.
    pub fn resonant(&self) -> bool {
        (self.gaps[2] - (self.gaps[1] - self.gaps[0])).abs() <= tolerances::RESONANCE
    }

    pub fn cold(&self) -> &ReservoirSpec {
        &self.reservoirs[0]
    }

    pub fn room(&self) -> &ReservoirSpec {
        &self.reservoirs[1]
    }

    pub fn hot(&self) -> &ReservoirSpec {
        &self.reservoirs[2]
    }

    /// Temperature of the cold bath (as seen by qubit 1 for fixed-occupation baths).
    pub fn t_c(&self) -> Result<f64> {
        self.cold().effective_temperature(self.gaps[0])
    }

    pub fn with_coupling(&self, coupling: f64) -> Self {
        Self { coupling, ..self.clone() }
    }

    pub fn with_gammas(&self, gammas: [f64; 3]) -> Self {
        Self { gammas, ..self.clone() }
    }

    pub fn with_reservoir_state(&self, role: Role, state: BathState) -> Result<Self> {
        let mut out = self.clone();
        let idx = role as usize;
        out.reservoirs[idx] = out.reservoirs[idx].with_state(state)?;
        Ok(out)
    }

    pub fn with_t_c(&self, t_c: f64) -> Result<Self> {
        self.with_reservoir_state(Role::Cold, BathState::Temperature(t_c))
    }

    pub fn with_t_h(&self, t_h: f64) -> Result<Self> {
        self.with_reservoir_state(Role::Hot, BathState::Temperature(t_h))
    }

    /// Stable identifier of the numeric content of the configuration.
    pub fn fingerprint(&self) -> u64 {
        let mut h = DefaultHasher::new();
        for x in self.gaps.iter().chain(&self.gammas).chain(std::iter::once(&self.coupling)) {
            x.to_bits().hash(&mut h);
        }
        for r in &self.reservoirs {
            r.role.hash(&mut h);
            r.statistics.hash(&mut h);
            match r.state {
                BathState::Temperature(t) => (0u8, t.to_bits()).hash(&mut h),
                BathState::Occupation(n) => (1u8, n.to_bits()).hash(&mut h),
            }
        }
        h.finish()
    }
}

fn sigma_minus() -> CMatrix {
    // basis (g, e); σ₋|e> = |g>
    CMatrix::from_vec(2, 2, vec![ZERO, ONE, ZERO, ZERO]).expect("static 2x2")
}

fn sigma_plus() -> CMatrix {
    sigma_minus().adjoint()
}

fn sigma_z() -> CMatrix {
    CMatrix::diag_real(&[-1.0, 1.0])
}

/// Embeds a single-qubit operator on qubit `k` (0-based, qubit 0 most significant).
pub fn embed(op: &CMatrix, k: usize) -> CMatrix {
    assert!(k < QUBITS, "qubit index out of range");
    let id = CMatrix::identity(2);
    let factors: [&CMatrix; 3] = std::array::from_fn(|i| if i == k { op } else { &id });
    let left = kron(factors[0], factors[1]).expect("2x2 kron");
    kron(&left, factors[2]).expect("4x4 kron")
}

pub fn lowering(k: usize) -> CMatrix {
    embed(&sigma_minus(), k)
}

pub fn raising(k: usize) -> CMatrix {
    embed(&sigma_plus(), k)
}

/// Computational-basis index of `|q1 q2 q3>` (`0 = g`, `1 = e`).
pub fn basis_index(q1: usize, q2: usize, q3: usize) -> usize {
    4 * q1 + 2 * q2 + q3
}

/// Free Hamiltonian `½ Σ E_k σ_z,k`.
pub fn build_h0(config: &FridgeConfig) -> Result<CMatrix> {
    config.validate()?;
    let diag: Vec<f64> = (0..DIM)
        .map(|idx| {
            (0..QUBITS)
                .map(|k| {
                    let excited = (idx >> (QUBITS - 1 - k)) & 1 == 1;
                    0.5 * config.gaps[k] * if excited { 1.0 } else { -1.0 }
                })
                .sum()
        })
        .collect();
    Ok(CMatrix::diag_real(&diag))
}

/// Three-body interaction `g(σ₋,1 σ₊,2 σ₋,3 + h.c.)`.
pub fn build_hint(config: &FridgeConfig) -> Result<CMatrix> {
    config.validate()?;
    let forward = &(&lowering(0) * &raising(1)) * &lowering(2);
    let h = &forward + &forward.adjoint();
    Ok(h.scale_real(config.coupling))
}

/// Vectorized Lindblad generator, `d vec(ρ)/dt = L vec(ρ)`.
#[derive(Debug, Clone)]
pub struct Liouvillian {
    matrix: CMatrix,
    config_hash: u64,
}

impl Liouvillian {
    pub fn from_matrix(matrix: CMatrix, config_hash: u64) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::Dimension("Liouvillian must be square".into()));
        }
        Ok(Self { matrix, config_hash })
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn config_hash(&self) -> u64 {
        self.config_hash
    }

    /// Hilbert-space dimension `d` of the `d² × d²` generator.
    pub fn hilbert_dim(&self) -> usize {
        (self.matrix.rows() as f64).sqrt().round() as usize
    }

    /// Largest entry of `vec(I)† L`; zero for a trace-preserving generator.
    pub fn trace_defect(&self) -> f64 {
        let d = self.hilbert_dim();
        (0..self.matrix.cols())
            .map(|j| (0..d).map(|i| self.matrix[(i * d + i, j)]).sum::<C64>().norm())
            .fold(0.0, f64::max)
    }

    pub fn apply(&self, rho: &CMatrix) -> Result<CMatrix> {
        let v = self.matrix.matvec(&rho.vectorize())?;
        CMatrix::unvectorize(&v, self.hilbert_dim())
    }

    pub fn scaled(&self, c: f64) -> Liouvillian {
        Liouvillian { matrix: self.matrix.scale_real(c), config_hash: self.config_hash }
    }
}

/// `−i[H, ·]` as a superoperator.
pub fn commutator_superop(h: &CMatrix) -> CMatrix {
    let id = CMatrix::identity(h.rows());
    let left = kron(&id, h).expect("square kron");
    let right = kron(&h.transpose(), &id).expect("square kron");
    (&left - &right).scale(-I)
}

/// `c ρ c† − ½{c†c, ρ}` as a superoperator.
pub fn dissipator_superop(c: &CMatrix) -> CMatrix {
    let id = CMatrix::identity(c.rows());
    let cdc = &c.adjoint() * c;
    let jump = kron(&c.conj(), c).expect("square kron");
    let left = kron(&id, &cdc).expect("square kron");
    let right = kron(&cdc.transpose(), &id).expect("square kron");
    &jump - &(&left + &right).scale_real(0.5)
}

/// Dissipative part only, `Σ_k Γ↓_k D[σ₋,k] + Γ↑_k D[σ₊,k]`.
pub fn dissipative_part(config: &FridgeConfig) -> Result<CMatrix> {
    config.validate()?;
    let mut out = CMatrix::zeros(SUPER_DIM, SUPER_DIM);
    for k in 0..QUBITS {
        let r = rates(&config.reservoirs[k], config.gaps[k], config.gammas[k])?;
        if r.gamma_down != 0.0 {
            out = &out + &dissipator_superop(&lowering(k)).scale_real(r.gamma_down);
        }
        if r.gamma_up != 0.0 {
            out = &out + &dissipator_superop(&raising(k)).scale_real(r.gamma_up);
        }
    }
    Ok(out)
}

pub fn build_liouvillian(config: &FridgeConfig) -> Result<Liouvillian> {
    config.validate()?;
    let h = &build_h0(config)? + &build_hint(config)?;
    let matrix = &commutator_superop(&h) + &dissipative_part(config)?;
    Liouvillian::from_matrix(matrix, config.fingerprint())
}

/// 4×4 generator of a lone qubit with gap `gap` coupled to `reservoir` at rate `gamma`.
pub fn single_qubit_liouvillian(gap: f64, gamma: f64, reservoir: &ReservoirSpec) -> Result<Liouvillian> {
    let r = rates(reservoir, gap, gamma)?;
    let h = sigma_z().scale_real(0.5 * gap);
    let matrix = &(&commutator_superop(&h) + &dissipator_superop(&sigma_minus()).scale_real(r.gamma_down))
        + &dissipator_superop(&sigma_plus()).scale_real(r.gamma_up);
    Liouvillian::from_matrix(matrix, 0)
}

/// Validated density matrix: Hermitian, unit trace, positive semidefinite.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: CMatrix,
}

impl DensityMatrix {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::Dimension("density matrix must be square".into()));
        }
        if !matrix.is_finite() {
            return Err(Error::SolverFailure("density matrix has non-finite entries".into()));
        }
        let herm = matrix.hermiticity_defect();
        if herm > tolerances::DENSITY_HERMITIAN {
            return Err(Error::NotHermitian { deviation: herm });
        }
        let tr = matrix.trace();
        if (tr - ONE).norm() > tolerances::DENSITY_TRACE {
            return Err(Error::InvalidArgument(format!("density matrix trace is {tr}, expected 1")));
        }
        let min_eig = eigvals_hermitian(&matrix)?[0];
        if min_eig < tolerances::DENSITY_MIN_EIGENVALUE {
            return Err(Error::SolverFailure(format!("density matrix not positive (min eigenvalue {min_eig:e})")));
        }
        Ok(Self { matrix })
    }

    /// Projector onto computational basis state `index`.
    pub fn basis_state(dim: usize, index: usize) -> Self {
        let mut m = CMatrix::zeros(dim, dim);
        m[(index, index)] = ONE;
        Self { matrix: m }
    }

    pub fn ground_state() -> Self {
        Self::basis_state(DIM, 0)
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self { matrix: CMatrix::identity(dim).scale_real(1.0 / dim as f64) }
    }

    pub fn from_pure(psi: &[C64]) -> Result<Self> {
        let norm = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidArgument("state vector has zero or non-finite norm".into()));
        }
        let n = psi.len();
        Self::new(CMatrix::from_fn(n, n, |i, j| psi[i] * psi[j].conj() / (norm * norm)))
    }

    /// Tensor product `ρ₁ ⊗ ρ₂ ⊗ …` of single-qubit (or any) states.
    pub fn product(factors: &[DensityMatrix]) -> Result<Self> {
        let (first, rest) = factors.split_first().ok_or_else(|| Error::InvalidArgument("empty product".into()))?;
        let mut m = first.matrix.clone();
        for f in rest {
            m = kron(&m, &f.matrix)?;
        }
        Self::new(m)
    }

    /// Diagonal single-qubit state with excited population `p_excited`.
    pub fn qubit(p_excited: f64) -> Result<Self> {
        Self::new(CMatrix::diag_real(&[1.0 - p_excited, p_excited]))
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn purity(&self) -> f64 {
        (&self.matrix * &self.matrix).trace().re
    }

    pub fn min_eigenvalue(&self) -> f64 {
        eigvals_hermitian(&self.matrix).map(|v| v[0]).unwrap_or(f64::NAN)
    }

    pub fn populations(&self) -> Vec<f64> {
        self.matrix.diagonal().iter().map(|z| z.re).collect()
    }

    /// `½ Σ |λ_i(ρ − σ)|`.
    pub fn trace_distance(&self, other: &DensityMatrix) -> Result<f64> {
        let diff = (&self.matrix - &other.matrix).hermitian_part();
        Ok(0.5 * eigvals_hermitian(&diff)?.iter().map(|x| x.abs()).sum::<f64>())
    }
}
