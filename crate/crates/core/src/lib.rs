//! Steady-state simulator for the three-qubit absorption refrigerator.
//!
//! Qubit 1 is the system being cooled, qubit 2 sits at room temperature and
//! qubit 3 is driven by the hot bath. Each qubit is coupled locally to its own
//! bosonic or fermionic reservoir; fermionic reservoirs may carry a negative
//! (population-inverted) temperature.
//!
//! Conventions used throughout the crate:
//!
//! * natural units, `k_B = ħ = 1`;
//! * computational basis `|q1 q2 q3>` with `g = 0`, `e = 1` and
//!   `index = 4*q1 + 2*q2 + q3` (qubit 1 is the most significant factor);
//! * `σ_z |e> = +|e>`, `σ_- = |g><e|`;
//! * column-stacking vectorization, `vec(A ρ B) = (Bᵀ ⊗ A) vec(ρ)`.

pub mod analysis;
pub mod error;
pub mod exec;
pub mod linalg;
pub mod liouvillian;
pub mod reservoirs;
pub mod steady_state;
pub mod thermometry;
pub mod tolerances;

pub use analysis::{
    best_record, calibrate_g, cooling_threshold, insulation_limit, plateau_t1, sweep_th, sweep_th_with,
    CalibrationReport, CalibrationTarget, Direction, InsulationResult, PlateauResult, SweepPoint, SweepRecord,
    ThresholdMode,
};
pub use error::{Error, Result};
pub use exec::Execution;
pub use linalg::{CMatrix, C64};
pub use liouvillian::{build_h0, build_hint, build_liouvillian, DensityMatrix, FridgeConfig, Liouvillian};
pub use reservoirs::{
    occupation, rates, temperature_from_occupation, BathState, LindbladRates, ReservoirSpec, Role, Statistics,
};
pub use steady_state::{propagate, solve_direct, SolverKind, SteadyStateResult};
pub use thermometry::{effective_temperature, insulated_t1, reduce, EffectiveTemperature, QubitReadout};
