//! Steady states of a Liouvillian: a direct constrained linear solve, and an
//! RK4 time propagation used as an independent cross-check.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{solve_linear, CMatrix, C64, ONE, ZERO};
use crate::liouvillian::{DensityMatrix, Liouvillian};
use crate::tolerances;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SolverKind {
    DirectSolve,
    Propagation,
}

#[derive(Debug, Clone)]
pub struct SteadyStateResult {
    pub state: DensityMatrix,
    /// `‖L vec(ρ)‖∞` of the returned state.
    pub residual: f64,
    pub solver: SolverKind,
    /// Largest `|ρ − ρ†|` entry before symmetrization (direct solve only).
    pub asymmetry: f64,
}

fn vec_norm_inf(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn residual_of(l: &Liouvillian, rho: &CMatrix) -> f64 {
    vec_norm_inf(&l.matrix().matvec_unchecked(&rho.vectorize()))
}

fn residual_bound(l: &Liouvillian, base: f64) -> f64 {
    base * l.matrix().norm_inf().max(1.0)
}

/// Population row (`vec` index of some `ρ_ii`) with the smallest diagonal magnitude.
///
/// Population rows sum to zero under `vec(I)†`, so any one of them can be traded
/// for the trace constraint without losing rank.
pub fn default_trace_row(l: &Liouvillian) -> usize {
    let d = l.hilbert_dim();
    (0..d)
        .map(|i| i * d + i)
        .min_by(|&a, &b| l.matrix()[(a, a)].norm().total_cmp(&l.matrix()[(b, b)].norm()))
        .unwrap_or(0)
}

pub fn solve_direct(l: &Liouvillian) -> Result<SteadyStateResult> {
    solve_direct_with_row(l, default_trace_row(l))
}

/// Direct solve with the trace constraint placed in row `row`.
pub fn solve_direct_with_row(l: &Liouvillian, row: usize) -> Result<SteadyStateResult> {
    let d = l.hilbert_dim();
    let n = d * d;
    if l.matrix().rows() != n {
        return Err(Error::Dimension(format!("Liouvillian of size {} is not d^2 x d^2", l.matrix().rows())));
    }
    if row >= n {
        return Err(Error::InvalidArgument(format!("constraint row {row} out of range")));
    }
    let mut a = l.matrix().clone();
    for j in 0..n {
        a[(row, j)] = ZERO;
    }
    for i in 0..d {
        a[(row, i * d + i)] = ONE;
    }
    let mut b = vec![ZERO; n];
    b[row] = ONE;

    let x = match solve_linear(&a, &b) {
        Ok(x) => x,
        Err(Error::Singular { pivot }) => return Err(Error::MultipleSteadyStates { pivot }),
        Err(e) => return Err(e),
    };
    let raw = CMatrix::unvectorize(&x, d)?;
    let asymmetry = raw.hermiticity_defect();
    if asymmetry > tolerances::SOLVE_ASYMMETRY {
        return Err(Error::SolverFailure(format!("solution asymmetry {asymmetry:e} before symmetrization")));
    }
    let rho = raw.hermitian_part();
    let residual = residual_of(l, &rho);
    if residual > residual_bound(l, tolerances::DIRECT_RESIDUAL) {
        return Err(Error::SolverFailure(format!("steady-state residual {residual:e}")));
    }
    let state = DensityMatrix::new(rho).map_err(|e| match e {
        Error::SolverFailure(msg) => Error::SolverFailure(format!("{msg} (residual {residual:e})")),
        other => Error::SolverFailure(format!("direct solution is not a valid state: {other}")),
    })?;
    Ok(SteadyStateResult { state, residual, solver: SolverKind::DirectSolve, asymmetry })
}

/// Largest step accepted by [`propagate`] for this generator.
pub fn max_stable_dt(l: &Liouvillian) -> f64 {
    let norm = l.matrix().norm_inf();
    if norm == 0.0 {
        f64::INFINITY
    } else {
        tolerances::RK4_STABILITY / norm
    }
}

pub fn default_dt(l: &Liouvillian) -> f64 {
    tolerances::DEFAULT_DT.min(max_stable_dt(l))
}

/// One classic RK4 step for the linear autonomous system `v' = L v` is the
/// polynomial `I + hL + (hL)²/2 + (hL)³/6 + (hL)⁴/24`; it is formed once.
fn rk4_step_matrix(l: &CMatrix, h: f64) -> CMatrix {
    let n = l.rows();
    let hl = l.scale_real(h);
    let mut step = CMatrix::identity(n);
    let mut power = CMatrix::identity(n);
    for k in 1..=4 {
        power = (&power * &hl).scale_real(1.0 / k as f64);
        step = &step + &power;
    }
    step
}

/// Integrates `d vec(ρ)/dt = L vec(ρ)` from `rho0` up to `t_final` with RK4.
///
/// Stops early once `‖ρ(t+Δ) − ρ(t)‖∞` over a unit-time window drops below
/// [`tolerances::PROPAGATION_STALL`]. The trace is renormalized only on output.
pub fn propagate(l: &Liouvillian, rho0: &DensityMatrix, t_final: f64, dt: f64) -> Result<DensityMatrix> {
    let d = l.hilbert_dim();
    if rho0.dim() != d || l.matrix().rows() != d * d {
        return Err(Error::Dimension(format!("state of dimension {} for generator on {d}", rho0.dim())));
    }
    if !(t_final >= 0.0 && t_final.is_finite()) {
        return Err(Error::InvalidArgument(format!("t_final must be finite and >= 0, got {t_final}")));
    }
    if !(dt > 0.0) {
        return Err(Error::InvalidArgument(format!("dt must be positive, got {dt}")));
    }
    if dt > max_stable_dt(l) * (1.0 + 1e-12) {
        return Err(Error::InvalidArgument(format!(
            "dt = {dt} exceeds the stability bound {} for this generator",
            max_stable_dt(l)
        )));
    }
    if t_final == 0.0 {
        return Ok(rho0.clone());
    }

    let steps = (t_final / dt).ceil() as usize;
    let h = t_final / steps as f64;
    let step = rk4_step_matrix(l.matrix(), h);
    let stride = ((1.0 / h).round() as usize).max(1);

    let mut v = rho0.matrix().vectorize();
    let mut checkpoint = v.clone();
    let mut checkpoint_step = 0usize;
    for s in 1..=steps {
        v = step.matvec_unchecked(&v);
        if s % stride == 0 || s == steps {
            if v.iter().any(|z| !z.is_finite()) {
                return Err(Error::Instability { time: s as f64 * h });
            }
            let window = (s - checkpoint_step) as f64 * h;
            let change = v.iter().zip(&checkpoint).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
            if change <= tolerances::PROPAGATION_STALL * window {
                break;
            }
            checkpoint.clone_from(&v);
            checkpoint_step = s;
        }
    }

    let rho = CMatrix::unvectorize(&v, d)?;
    let tr = rho.trace();
    let drift = (tr - rho0.matrix().trace()).norm();
    if drift > tolerances::PROPAGATION_TRACE_DRIFT {
        return Err(Error::StepSize { drift });
    }
    DensityMatrix::new(rho.scale(ONE / tr))
}

/// Steady state by long-time propagation from `rho0`.
pub fn solve_propagation(l: &Liouvillian, rho0: &DensityMatrix, t_final: f64, dt: f64) -> Result<SteadyStateResult> {
    let state = propagate(l, rho0, t_final, dt)?;
    let residual = residual_of(l, state.matrix());
    if residual > residual_bound(l, tolerances::PROPAGATION_RESIDUAL) {
        return Err(Error::NonConvergence { previous: residual, last: residual });
    }
    Ok(SteadyStateResult { state, residual, solver: SolverKind::Propagation, asymmetry: 0.0 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liouvillian::{build_liouvillian, FridgeConfig};
    use crate::reservoirs::{occupation, ReservoirSpec, Role};
    use crate::thermometry::QubitReadout;

    fn reference() -> FridgeConfig {
        FridgeConfig::reference_positive(1.0, 10.0).unwrap()
    }

    #[test]
    fn reference_config_refrigerates() {
        let cfg = reference();
        let ss = solve_direct(&build_liouvillian(&cfg).unwrap()).unwrap();
        assert!(ss.residual <= tolerances::DIRECT_RESIDUAL);
        let t1 = QubitReadout::from_state(&ss.state, 1, cfg.gaps[0]).unwrap().temperature.value().unwrap();
        assert!(t1 < 1.0, "T1 = {t1}");
    }

    #[test]
    fn decoupled_qubits_thermalize_independently() {
        let mut cfg = reference().with_coupling(0.0);
        cfg.reservoirs[2] = ReservoirSpec::fermionic(Role::Hot, -0.7).unwrap();
        let ss = solve_direct(&build_liouvillian(&cfg).unwrap()).unwrap();
        for k in 0..3 {
            let n = occupation(&cfg.reservoirs[k], cfg.gaps[k]).unwrap();
            let s = cfg.reservoirs[k].statistics.sign();
            let expected = n / (1.0 + s * n + n);
            let r = QubitReadout::from_state(&ss.state, k + 1, cfg.gaps[k]).unwrap();
            assert!((r.p_excited - expected).abs() < 1e-12, "qubit {k}");
        }
    }

    #[test]
    fn degenerate_manifold_reported() {
        let cfg = reference().with_coupling(0.0).with_gammas([1.0, 0.0, 1.0]);
        let err = solve_direct(&build_liouvillian(&cfg).unwrap()).unwrap_err();
        assert!(matches!(err, Error::MultipleSteadyStates { .. }), "{err:?}");
    }

    #[test]
    fn trace_row_choice_does_not_matter() {
        let l = build_liouvillian(&reference()).unwrap();
        let base = solve_direct(&l).unwrap();
        for i in 0..8 {
            let alt = solve_direct_with_row(&l, i * 8 + i).unwrap();
            assert!((base.state.matrix() - alt.state.matrix()).max_abs() <= 1e-9);
        }
    }

    #[test]
    fn rescaled_generator_has_same_state() {
        let l = build_liouvillian(&reference()).unwrap();
        let a = solve_direct(&l).unwrap();
        let b = solve_direct(&l.scaled(7.5)).unwrap();
        assert!((a.state.matrix() - b.state.matrix()).max_abs() < 1e-12);
    }

    #[test]
    fn zero_time_propagation_is_identity() {
        let l = build_liouvillian(&reference()).unwrap();
        let rho0 = DensityMatrix::maximally_mixed(8);
        assert_eq!(propagate(&l, &rho0, 0.0, 1e-3).unwrap(), rho0);
    }

    #[test]
    fn propagation_rejects_unstable_step() {
        let l = build_liouvillian(&reference()).unwrap();
        let rho0 = DensityMatrix::ground_state();
        assert!(matches!(propagate(&l, &rho0, 1.0, 1.0), Err(Error::InvalidArgument(_))));
        assert!(matches!(propagate(&l, &rho0, -1.0, 1e-3), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn closed_system_conserves_purity() {
        let cfg = reference().with_gammas([0.0; 3]);
        let l = build_liouvillian(&cfg).unwrap();
        let psi: Vec<C64> = (0..8).map(|i| C64::new(1.0 + i as f64, 0.5 * i as f64)).collect();
        let rho0 = DensityMatrix::from_pure(&psi).unwrap();
        let rho = propagate(&l, &rho0, 10.0, 1e-3).unwrap();
        assert!((rho.purity() - 1.0).abs() < 1e-8);
        assert!(rho.matrix().hermiticity_defect() < 1e-9);
    }

    #[test]
    fn propagation_matches_direct_for_reference_config() {
        let l = build_liouvillian(&reference()).unwrap();
        let direct = solve_direct(&l).unwrap();
        let prop = solve_propagation(&l, &DensityMatrix::ground_state(), 50.0, default_dt(&l)).unwrap();
        let dist = direct.state.trace_distance(&prop.state).unwrap();
        assert!(dist <= 1e-6, "trace distance {dist}");
        assert!(prop.residual <= tolerances::PROPAGATION_RESIDUAL);
    }
}
