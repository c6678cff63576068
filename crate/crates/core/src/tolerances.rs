//! Numerical tolerances shared by the solvers and the tests.

use serde::{Deserialize, Serialize};

/// Relative pivot threshold for LU: pivots below `SINGULAR_PIVOT * ‖A‖∞` are singular.
pub const SINGULAR_PIVOT: f64 = 1e-14;
/// Relative residual bound for `solve_linear`.
pub const SOLVE_RESIDUAL: f64 = 1e-10;
/// Hermiticity accepted by `eig_hermitian`.
pub const HERMITIAN_INPUT: f64 = 1e-10;
/// Residual of each eigenpair.
pub const EIG_RESIDUAL: f64 = 1e-9;

pub const TRACE_PRESERVATION: f64 = 1e-12;

pub const DENSITY_HERMITIAN: f64 = 1e-10;
pub const DENSITY_TRACE: f64 = 1e-10;
pub const DENSITY_MIN_EIGENVALUE: f64 = -1e-9;

pub const DIRECT_RESIDUAL: f64 = 1e-10;
pub const PROPAGATION_RESIDUAL: f64 = 1e-8;
/// Maximum asymmetry of the raw direct solution before symmetrization.
pub const SOLVE_ASYMMETRY: f64 = 1e-9;

pub const PROPAGATION_TRACE_DRIFT: f64 = 1e-8;
/// Early-stop threshold on `‖ρ(t+Δ) − ρ(t)‖∞` per unit time.
pub const PROPAGATION_STALL: f64 = 1e-12;
pub const DEFAULT_DT: f64 = 1e-3;
/// Stability heuristic `dt ≤ RK4_STABILITY / ‖L‖∞`.
pub const RK4_STABILITY: f64 = 0.1;

/// `|p_ground − 1/2|` below which the effective temperature is infinite.
pub const INFINITE_TEMPERATURE_BAND: f64 = 1e-12;

pub const RESONANCE: f64 = 1e-12;

pub const PLATEAU: f64 = 1e-6;
pub const THRESHOLD_RESOLUTION: f64 = 1e-4;
/// Bosonic temperature standing in for an infinitely hot bath.
pub const BOSONIC_SATURATION_TEMPERATURE: f64 = 1e6;
/// Fermionic occupation standing in for `T → 0⁻`.
pub const FERMIONIC_SATURATION_OCCUPATION: f64 = 1.0 - 1e-12;
/// Largest relative error accepted by `calibrate_g`.
pub const CALIBRATION_MAX_ERROR: f64 = 0.05;

/// Snapshot of the tolerances, emitted in run sidecars.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub singular_pivot: f64,
    pub solve_residual: f64,
    pub trace_preservation: f64,
    pub density_hermitian: f64,
    pub density_trace: f64,
    pub density_min_eigenvalue: f64,
    pub direct_residual: f64,
    pub propagation_residual: f64,
    pub propagation_trace_drift: f64,
    pub default_dt: f64,
    pub plateau: f64,
    pub threshold_resolution: f64,
    pub bosonic_saturation_temperature: f64,
    pub fermionic_saturation_occupation: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            singular_pivot: SINGULAR_PIVOT,
            solve_residual: SOLVE_RESIDUAL,
            trace_preservation: TRACE_PRESERVATION,
            density_hermitian: DENSITY_HERMITIAN,
            density_trace: DENSITY_TRACE,
            density_min_eigenvalue: DENSITY_MIN_EIGENVALUE,
            direct_residual: DIRECT_RESIDUAL,
            propagation_residual: PROPAGATION_RESIDUAL,
            propagation_trace_drift: PROPAGATION_TRACE_DRIFT,
            default_dt: DEFAULT_DT,
            plateau: PLATEAU,
            threshold_resolution: THRESHOLD_RESOLUTION,
            bosonic_saturation_temperature: BOSONIC_SATURATION_TEMPERATURE,
            fermionic_saturation_occupation: FERMIONIC_SATURATION_OCCUPATION,
        }
    }
}
