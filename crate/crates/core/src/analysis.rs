//! Sweeps over the hot-bath temperature, lowest-temperature (plateau) search,
//! cooling thresholds, the insulated limit `γ₁ → 0`, and calibration of the
//! coupling `g` against reference plateau values.
//!
//! For a bosonic hot bath, `T₁(T_h)` is not monotone: both qubit-3 rates grow
//! like `T_h`, and the strong damping eventually suppresses the three-body swap,
//! so `T₁ → T_c` as `T_h → ∞`. The positive-direction plateau is therefore the
//! minimum of `T₁` over `T_h`, not its `T_h → ∞` limit. For a fermionic bath at
//! `T_h < 0` the rates stay bounded and `T₁` decreases monotonically to its
//! `n₃ → 1` saturation value.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::{self, Execution};
use crate::liouvillian::{build_liouvillian, FridgeConfig};
use crate::reservoirs::{BathState, ReservoirSpec, Role, Statistics};
use crate::steady_state::solve_direct;
use crate::thermometry::{insulated_t1, EffectiveTemperature, QubitReadout};
use crate::tolerances;

/// Hot-bath temperature used as the upper edge of the positive sweep.
pub const POSITIVE_GRID_EDGE: f64 = 10.0;
/// Hottest point of the negative sweep.
pub const NEGATIVE_GRID_EDGE: f64 = -0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    #[serde(rename = "positive")]
    PositiveTh,
    #[serde(rename = "negative")]
    NegativeTh,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ThresholdMode {
    /// Cooling judged at the best hot-bath temperature.
    #[default]
    Plateau,
    /// Cooling judged at the hottest point of the reference grid.
    GridEdge,
}

/// `T_h ∈ [1, 10]` in steps of 0.1.
pub fn positive_grid() -> Vec<f64> {
    (0..=90).map(|i| 1.0 + i as f64 / 10.0).collect()
}

/// 50 geometrically spaced points from `T_h = −10` to `T_h = −0.1`.
pub fn negative_grid() -> Vec<f64> {
    geometric(10.0, 0.1, 50).into_iter().map(|x| -x).collect()
}

fn geometric(from: f64, to: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![from];
    }
    let (a, b) = (from.ln(), to.ln());
    (0..count).map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp()).collect()
}

/// One solved sweep point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub swept_value: f64,
    pub t1: EffectiveTemperature,
    /// `None` when `T₁` is infinite.
    pub t1_minus_tc: Option<f64>,
    pub residual: f64,
    pub coherence_magnitude: f64,
}

impl SweepRecord {
    /// `T₁` as a cooling score: finite positive temperatures as is, anything
    /// hotter than every positive temperature as `+∞`.
    pub fn t1_score(&self) -> f64 {
        match self.t1 {
            EffectiveTemperature::Positive(t) => t,
            EffectiveTemperature::AbsoluteZero { inverted: false } => 0.0,
            _ => f64::INFINITY,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub swept_value: f64,
    pub result: Result<SweepRecord>,
}

/// Steady state of `config` read out on qubit 1.
pub fn solve_point(config: &FridgeConfig, swept_value: f64) -> Result<SweepRecord> {
    let l = build_liouvillian(config)?;
    let ss = solve_direct(&l)?;
    let readout = QubitReadout::from_state(&ss.state, 1, config.gaps[0])?;
    let t_c = config.t_c()?;
    Ok(SweepRecord {
        swept_value,
        t1: readout.temperature,
        t1_minus_tc: readout.temperature.value().map(|t| t - t_c),
        residual: ss.residual,
        coherence_magnitude: readout.coherence_magnitude,
    })
}

fn t1_score_at(config: &FridgeConfig) -> Result<f64> {
    solve_point(config, 0.0).map(|r| r.t1_score())
}

pub fn sweep_th(config: &FridgeConfig, th_values: &[f64]) -> Result<Vec<SweepPoint>> {
    sweep_th_with(config, th_values, Execution::default())
}

/// Solves one steady state per hot-bath temperature. Per-point failures are kept
/// in the returned rows; results follow the input order.
pub fn sweep_th_with(config: &FridgeConfig, th_values: &[f64], execution: Execution) -> Result<Vec<SweepPoint>> {
    config.validate()?;
    if th_values.is_empty() {
        return Err(Error::InvalidArgument("empty T_h sweep".into()));
    }
    if let Some(bad) = th_values.iter().find(|t| !t.is_finite()) {
        return Err(Error::InvalidArgument(format!("non-finite T_h value {bad}")));
    }
    Ok(exec::map(execution, th_values, |&t_h| SweepPoint {
        swept_value: t_h,
        result: config.with_t_h(t_h).and_then(|c| solve_point(&c, t_h)),
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlateauResult {
    pub direction: Direction,
    /// Lowest qubit-1 temperature: the minimum over `T_h` for `T_h > 0`, the
    /// saturated-occupation value for `T_h < 0`.
    pub plateau_t1: f64,
    /// Hot-bath temperature at which it was found; for `T_h < 0`, the first
    /// sample within tolerance of the saturated value, or the saturated
    /// temperature itself when no sample gets there.
    pub plateau_detected_at: f64,
    pub tolerance_used: f64,
    /// `T₁` with the hot occupation saturated (`T_h = 10⁶` bosonic, `n₃ = 1 − 10⁻¹²` fermionic).
    pub saturation_t1: Option<f64>,
    /// Last two sampled `T₁` values.
    pub last_samples: [f64; 2],
    /// Full readout at the point achieving `plateau_t1`.
    pub record: SweepRecord,
}

pub fn plateau_t1(config: &FridgeConfig, direction: Direction) -> Result<PlateauResult> {
    plateau_t1_with(config, direction, Execution::default())
}

pub fn plateau_t1_with(config: &FridgeConfig, direction: Direction, execution: Execution) -> Result<PlateauResult> {
    config.validate()?;
    match direction {
        Direction::PositiveTh => positive_plateau(config, execution),
        Direction::NegativeTh => negative_plateau(config, execution),
    }
}

fn positive_plateau(config: &FridgeConfig, execution: Execution) -> Result<PlateauResult> {
    let tol = tolerances::PLATEAU;
    let grid = geometric(0.1, 1e4, 49);
    let scores: Vec<f64> =
        exec::map(execution, &grid, |&t_h| config.with_t_h(t_h).and_then(|c| t1_score_at(&c)).unwrap_or(f64::INFINITY));
    let (best_idx, &best_score) = scores.iter().enumerate().min_by(|a, b| a.1.total_cmp(b.1)).expect("non-empty grid");
    if !best_score.is_finite() {
        return Err(Error::SolverFailure("no point of the T_h grid produced a positive T1".into()));
    }
    let saturation_t1 = config
        .with_t_h(tolerances::BOSONIC_SATURATION_TEMPERATURE)
        .and_then(|c| t1_score_at(&c))
        .ok()
        .filter(|t| t.is_finite());

    let last = grid.len() - 1;
    if best_idx == last {
        // still decreasing at the top of the grid: accept a flat tail, or the
        // saturated value when the decrease continues all the way there
        let (prev, tail) = (scores[last - 1], scores[last]);
        let at = if (prev - tail).abs() < tol {
            grid[last]
        } else if saturation_t1.is_some_and(|s| s <= tail) {
            tolerances::BOSONIC_SATURATION_TEMPERATURE
        } else {
            return Err(Error::NonConvergence { previous: prev, last: tail });
        };
        let record = solve_point(&config.with_t_h(at)?, at)?;
        return Ok(PlateauResult {
            direction: Direction::PositiveTh,
            plateau_t1: record.t1_score(),
            plateau_detected_at: at,
            tolerance_used: tol,
            saturation_t1,
            last_samples: [prev, tail],
            record,
        });
    }

    let lo = grid[best_idx.saturating_sub(1)].ln();
    let hi = grid[best_idx + 1].ln();
    let f = |u: f64| config.with_t_h(u.exp()).and_then(|c| t1_score_at(&c));
    let (u_best, t_best, samples) = golden_min(f, lo, hi, 1e-4, tol)?;
    let (plateau_t1, detected_at) =
        if t_best <= best_score { (t_best, u_best.exp()) } else { (best_score, grid[best_idx]) };
    Ok(PlateauResult {
        direction: Direction::PositiveTh,
        plateau_t1,
        plateau_detected_at: detected_at,
        tolerance_used: tol,
        saturation_t1,
        last_samples: samples,
        record: solve_point(&config.with_t_h(detected_at)?, detected_at)?,
    })
}

/// Golden-section minimization of `f` on `[lo, hi]`; stops once the bracket is
/// narrower than `width` and the two interior values differ by less than `tol`.
/// Returns the argmin, the minimum, and the last two interior samples.
fn golden_min(
    f: impl Fn(f64) -> Result<f64>,
    mut lo: f64,
    mut hi: f64,
    width: f64,
    tol: f64,
) -> Result<(f64, f64, [f64; 2])> {
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = hi - ratio * (hi - lo);
    let mut d = lo + ratio * (hi - lo);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    for _ in 0..200 {
        if hi - lo < width && (fc - fd).abs() < tol {
            break;
        }
        if fc <= fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - ratio * (hi - lo);
            fc = f(c)?;
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + ratio * (hi - lo);
            fd = f(d)?;
        }
    }
    if (fc - fd).abs() >= tol {
        return Err(Error::NonConvergence { previous: fc, last: fd });
    }
    Ok(if fc <= fd { (c, fc, [fd, fc]) } else { (d, fd, [fc, fd]) })
}

fn negative_plateau(config: &FridgeConfig, execution: Execution) -> Result<PlateauResult> {
    if config.hot().statistics != Statistics::Fermionic {
        return Err(Error::InvalidConfig("negative hot-bath temperatures need a fermionic hot reservoir".into()));
    }
    let tol = tolerances::PLATEAU;
    let saturated =
        config.with_reservoir_state(Role::Hot, BathState::Occupation(tolerances::FERMIONIC_SATURATION_OCCUPATION))?;
    let saturated_t_h = saturated.hot().effective_temperature(saturated.gaps[2])?;
    let saturated_record = solve_point(&saturated, saturated_t_h)?;
    let saturation_t1 = Some(saturated_record.t1_score()).filter(|t| t.is_finite());
    // T_h from −100 towards 0⁻, four samples per decade, stopping at the
    // saturated occupation; hotter baths are fully inverted in double precision
    let temps: Vec<f64> =
        (0..=32).map(|k| -(10f64.powf(2.0 - k as f64 / 4.0))).take_while(|&t| t < saturated_t_h).collect();
    if temps.len() < 2 {
        return Err(Error::InvalidConfig("hot gap too large for the negative T_h scan".into()));
    }
    let scores: Vec<f64> = exec::map(execution, &temps, |&t_h| {
        config.with_t_h(t_h).and_then(|c| t1_score_at(&c)).unwrap_or(f64::INFINITY)
    });

    // the saturated occupation is the designated asymptote; the samples must
    // approach it from above
    let Some(plateau_t1) = saturation_t1 else {
        return Err(Error::SolverFailure("saturated hot bath gives no positive T1".into()));
    };
    let n = scores.len();
    if scores.iter().any(|&t| t < plateau_t1 - tol) || scores[n - 1] > scores[n - 2] + tol {
        return Err(Error::NonConvergence { previous: scores[n - 2], last: scores[n - 1] });
    }
    let detected_at =
        temps.iter().zip(&scores).find(|&(_, &t)| t - plateau_t1 < tol).map_or(saturated_t_h, |(&t_h, _)| t_h);
    Ok(PlateauResult {
        direction: Direction::NegativeTh,
        plateau_t1,
        plateau_detected_at: detected_at,
        tolerance_used: tol,
        saturation_t1,
        last_samples: [scores[n - 2], scores[n - 1]],
        record: saturated_record,
    })
}

/// Copy of `template` with the hot bath set up for `direction`: unchanged
/// statistics at `T_h = 10` for positive, fermionic at `T_h = −1` for negative.
pub fn config_for_direction(template: &FridgeConfig, direction: Direction) -> Result<FridgeConfig> {
    let mut out = template.clone();
    out.reservoirs[2] = match direction {
        Direction::PositiveTh => ReservoirSpec::new(Role::Hot, template.hot().statistics, POSITIVE_GRID_EDGE)?,
        Direction::NegativeTh => ReservoirSpec::fermionic(Role::Hot, -1.0)?,
    };
    Ok(out)
}

/// Readout at the hot-bath setting that `mode` uses to judge cooling at `t_c`.
pub fn best_record(
    template: &FridgeConfig,
    direction: Direction,
    mode: ThresholdMode,
    t_c: f64,
) -> Result<SweepRecord> {
    let config = config_for_direction(template, direction)?.with_t_c(t_c)?;
    match mode {
        ThresholdMode::Plateau => Ok(plateau_t1(&config, direction)?.record),
        ThresholdMode::GridEdge => {
            let edge = match direction {
                Direction::PositiveTh => POSITIVE_GRID_EDGE,
                Direction::NegativeTh => NEGATIVE_GRID_EDGE,
            };
            solve_point(&config.with_t_h(edge)?, edge)
        }
    }
}

/// Best `T₁ − T_c` available at cold-bath temperature `t_c`; negative means cooling.
pub fn cooling_margin(template: &FridgeConfig, direction: Direction, mode: ThresholdMode, t_c: f64) -> Result<f64> {
    Ok(best_record(template, direction, mode, t_c)?.t1_score() - t_c)
}

/// Lower end of the threshold search.
pub const THRESHOLD_FLOOR: f64 = 1e-3;
/// Upper end of the threshold search; the machine must cool here.
pub const THRESHOLD_CEILING: f64 = 5.0;

/// Smallest cold-bath temperature at which the refrigerator still cools, by
/// bisection to absolute resolution `10⁻⁴`.
///
/// The bracket is found by halving `T_c` down from [`THRESHOLD_CEILING`] until
/// the machine stops cooling, so the search never evaluates cold baths far
/// below the threshold, where qubit-1 excited populations drop under the
/// rounding level of the steady-state solve.
pub fn cooling_threshold(template: &FridgeConfig, direction: Direction, mode: ThresholdMode) -> Result<f64> {
    let mut hi = THRESHOLD_CEILING;
    let f_hi = cooling_margin(template, direction, mode, hi)?;
    if f_hi >= 0.0 {
        return Err(Error::Bracket { lo: THRESHOLD_FLOOR, hi, f_lo: f64::NAN, f_hi });
    }
    let mut lo = loop {
        let t = 0.5 * hi;
        if t < THRESHOLD_FLOOR {
            let f_lo = cooling_margin(template, direction, mode, THRESHOLD_FLOOR)?;
            if f_lo < 0.0 {
                return Err(Error::Bracket { lo: THRESHOLD_FLOOR, hi: THRESHOLD_CEILING, f_lo, f_hi });
            }
            break THRESHOLD_FLOOR;
        }
        if cooling_margin(template, direction, mode, t)? >= 0.0 {
            break t;
        }
        hi = t;
    };
    while hi - lo > tolerances::THRESHOLD_RESOLUTION {
        let mid = 0.5 * (lo + hi);
        if cooling_margin(template, direction, mode, mid)? < 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InsulationResult {
    /// One record per solved γ₁ (`swept_value = γ₁`).
    pub numeric: Vec<SweepRecord>,
    /// Insulated-limit formula, with the room bath as reference temperature.
    pub analytic: f64,
    /// `|T₁(last γ₁) − analytic| / analytic`.
    pub final_gap: f64,
    /// Whether `|T₁ − analytic|` is non-increasing along the sequence.
    pub monotone: bool,
    pub smallest_usable_gamma1: f64,
}

/// Follows `T₁` as qubit 1 is decoupled from its bath (`γ₁ → 0`).
///
/// Without the cold bath, qubit 1 equilibrates with the virtual qubit formed by
/// `|g e g>` and `|e g e>`, whose temperature is fixed by the room and hot baths:
/// `E₁/T₁ = E₂/T_r − E₃/T_h`. For resonant gaps this equals the insulated-limit
/// formula evaluated with the room temperature as its reference temperature.
pub fn insulation_limit(config: &FridgeConfig, gamma1_sequence: &[f64]) -> Result<InsulationResult> {
    insulation_limit_with(config, gamma1_sequence, Execution::default())
}

pub fn insulation_limit_with(
    config: &FridgeConfig,
    gamma1_sequence: &[f64],
    execution: Execution,
) -> Result<InsulationResult> {
    config.validate()?;
    if gamma1_sequence.is_empty() {
        return Err(Error::InvalidArgument("empty gamma1 sequence".into()));
    }
    if gamma1_sequence.iter().any(|&g| !(g > 0.0 && g.is_finite())) {
        return Err(Error::InvalidArgument("gamma1 values must be positive".into()));
    }
    if gamma1_sequence.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidArgument("gamma1 sequence must be strictly decreasing".into()));
    }
    let t_r = config.room().effective_temperature(config.gaps[1])?;
    let t_h = config.hot().effective_temperature(config.gaps[2])?;
    let analytic = insulated_t1(t_r, t_h, config.gaps[0], config.gaps[2])?;

    let results: Vec<Result<SweepRecord>> = exec::map(execution, gamma1_sequence, |&g1| {
        let c = config.with_gammas([g1, config.gammas[1], config.gammas[2]]);
        let r = solve_point(&c, g1)?;
        match r.t1 {
            EffectiveTemperature::Positive(_) => Ok(r),
            other => Err(Error::SolverFailure(format!("qubit 1 temperature {other} at gamma1 = {g1}"))),
        }
    });
    let mut numeric = Vec::new();
    for r in results {
        match r {
            Ok(rec) => numeric.push(rec),
            Err(e) if numeric.is_empty() => return Err(e),
            Err(_) => break,
        }
    }
    let gaps: Vec<f64> = numeric.iter().map(|r| (r.t1_score() - analytic).abs()).collect();
    let monotone = gaps.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-9) + 1e-15);
    let last = numeric.last().expect("at least one solved point");
    let (smallest_usable_gamma1, last_t1) = (last.swept_value, last.t1_score());
    Ok(InsulationResult {
        final_gap: (last_t1 - analytic).abs() / analytic,
        numeric,
        analytic,
        monotone,
        smallest_usable_gamma1,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CalibrationTarget {
    pub t_c: f64,
    pub direction: Direction,
    pub value: f64,
}

/// Lowest qubit-1 temperatures reported for `T_c = 1, 1.5, 2`, hot bath at
/// `T_h > 0` (bosonic) and at `T_h < 0` (fermionic), gaps (1, 5, 4), unit rates, `T_r = 2`.
pub fn reference_targets() -> Vec<CalibrationTarget> {
    let positive = [(1.0, 0.9486), (1.5, 1.4054), (2.0, 1.867)];
    let negative = [(1.0, 0.7805), (1.5, 1.1615), (2.0, 1.5568)];
    positive
        .iter()
        .map(|&(t_c, value)| CalibrationTarget { t_c, direction: Direction::PositiveTh, value })
        .chain(negative.iter().map(|&(t_c, value)| CalibrationTarget { t_c, direction: Direction::NegativeTh, value }))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetFit {
    pub target: CalibrationTarget,
    pub achieved: f64,
    pub relative_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationReport {
    pub best_g: f64,
    /// Max relative error over the targets at `best_g`.
    pub best_error: f64,
    pub fits: Vec<TargetFit>,
    /// `(g, max relative error)` for every evaluated coupling, sorted by `g`.
    pub landscape: Vec<(f64, f64)>,
    pub accepted: bool,
}

impl CalibrationReport {
    /// Whether a single coupling matches every target within `tolerance`.
    pub fn fits_all_within(&self, tolerance: f64) -> bool {
        self.fits.iter().all(|f| f.relative_error <= tolerance)
    }
}

fn target_fits(
    template: &FridgeConfig,
    targets: &[CalibrationTarget],
    g: f64,
    execution: Execution,
) -> Result<Vec<TargetFit>> {
    let results = exec::map(execution, targets, |t| -> Result<TargetFit> {
        let config = config_for_direction(&template.with_coupling(g), t.direction)?.with_t_c(t.t_c)?;
        let achieved = plateau_t1_with(&config, t.direction, Execution::Sequential)?.plateau_t1;
        Ok(TargetFit { target: *t, achieved, relative_error: (achieved - t.value).abs() / t.value.abs() })
    });
    results.into_iter().collect()
}

fn max_error(fits: &[TargetFit]) -> f64 {
    fits.iter().map(|f| f.relative_error).fold(0.0, f64::max)
}

/// Grid search over `g` followed by golden-section refinement around the best
/// grid point; always returns the report, with `accepted` set when the best
/// max relative error is within [`tolerances::CALIBRATION_MAX_ERROR`].
pub fn calibration_landscape(
    template: &FridgeConfig,
    targets: &[CalibrationTarget],
    grid: &[f64],
    execution: Execution,
) -> Result<CalibrationReport> {
    template.validate()?;
    if targets.is_empty() {
        return Err(Error::InvalidArgument("no calibration targets".into()));
    }
    if grid.is_empty() || grid.iter().any(|&g| !(g > 0.0 && g.is_finite())) {
        return Err(Error::InvalidArgument("calibration grid must be non-empty and positive".into()));
    }
    let mut grid = grid.to_vec();
    grid.sort_by(f64::total_cmp);
    grid.dedup();

    let evaluate = |g: f64| -> Result<f64> { target_fits(template, targets, g, execution).map(|f| max_error(&f)) };
    let grid_errors: Vec<Result<f64>> = exec::map(execution, &grid, |&g| evaluate(g));
    let mut landscape = Vec::new();
    for (&g, e) in grid.iter().zip(grid_errors) {
        landscape.push((g, e?));
    }
    let (b, _) = landscape.iter().enumerate().min_by(|x, y| x.1 .1.total_cmp(&y.1 .1)).expect("non-empty grid");

    if grid.len() > 1 {
        let center = grid[b];
        // at an edge, mirror the neighbouring ratio outward
        let lo = if b > 0 { grid[b - 1] } else { center * center / grid[1] };
        let hi = if b + 1 < grid.len() { grid[b + 1] } else { center * center / grid[b - 1] };
        let ratio = (5f64.sqrt() - 1.0) / 2.0;
        let (mut a, mut z) = (lo, hi);
        let mut c = z - ratio * (z - a);
        let mut d = a + ratio * (z - a);
        let mut fc = evaluate(c)?;
        let mut fd = evaluate(d)?;
        landscape.push((c, fc));
        landscape.push((d, fd));
        while (z - a) > 1e-4 * center {
            if fc <= fd {
                z = d;
                d = c;
                fd = fc;
                c = z - ratio * (z - a);
                fc = evaluate(c)?;
                landscape.push((c, fc));
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + ratio * (z - a);
                fd = evaluate(d)?;
                landscape.push((d, fd));
            }
        }
    }
    landscape.sort_by(|x, y| x.0.total_cmp(&y.0));
    let &(best_g, best_error) = landscape.iter().min_by(|x, y| x.1.total_cmp(&y.1)).expect("non-empty landscape");
    let fits = target_fits(template, targets, best_g, execution)?;
    Ok(CalibrationReport {
        best_g,
        best_error,
        fits,
        landscape,
        accepted: best_error <= tolerances::CALIBRATION_MAX_ERROR,
    })
}

/// Like [`calibration_landscape`], but a best error above 5 % is an error.
pub fn calibrate_g(template: &FridgeConfig, targets: &[CalibrationTarget], grid: &[f64]) -> Result<CalibrationReport> {
    let report = calibration_landscape(template, targets, grid, Execution::default())?;
    if !report.accepted {
        return Err(Error::CalibrationFailure { best_g: report.best_g, best_error: report.best_error });
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reference_pos() -> FridgeConfig {
        FridgeConfig::reference_positive(1.0, 10.0).unwrap()
    }

    #[test]
    fn grids() {
        let p = positive_grid();
        assert_eq!(p.len(), 91);
        assert_eq!((p[0], p[90]), (1.0, 10.0));
        let n = negative_grid();
        assert_eq!(n.len(), 50);
        assert!((n[0] + 10.0).abs() < 1e-12 && (n[49] + 0.1).abs() < 1e-12);
        assert!(n.iter().all(|&t| t < 0.0));
    }

    #[test]
    fn single_point_sweep_matches_direct_solve() {
        let cfg = reference_pos();
        let rows = sweep_th(&cfg, &[7.0]).unwrap();
        assert_eq!(rows.len(), 1);
        let direct = solve_point(&cfg.with_t_h(7.0).unwrap(), 7.0).unwrap();
        assert_eq!(rows[0].result.as_ref().unwrap(), &direct);
    }

    #[test]
    fn empty_sweep_rejected() {
        assert!(matches!(sweep_th(&reference_pos(), &[]), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn invalid_points_are_recorded_not_fatal() {
        let rows = sweep_th(&reference_pos(), &[2.0, -1.0, 3.0]).unwrap();
        assert!(rows[0].result.is_ok() && rows[2].result.is_ok());
        assert!(matches!(rows[1].result, Err(Error::InvalidReservoir(_))));
    }

    #[test]
    fn sweep_records_are_consistent() {
        let cfg = reference_pos();
        for p in sweep_th(&cfg, &[1.0, 4.0, 10.0]).unwrap() {
            let r = p.result.unwrap();
            let t1 = r.t1.value().unwrap();
            assert!((r.t1_minus_tc.unwrap() - (t1 - 1.0)).abs() <= 1e-12);
            assert!(r.residual <= tolerances::DIRECT_RESIDUAL);
            assert!(r.coherence_magnitude <= 1e-6);
        }
    }

    #[test]
    fn sequential_and_parallel_sweeps_agree() {
        let cfg = reference_pos();
        let grid = positive_grid();
        let a = sweep_th_with(&cfg, &grid, Execution::Sequential).unwrap();
        let b = sweep_th_with(&cfg, &grid, Execution::Parallel).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn negative_plateau_requires_fermionic_bath() {
        assert!(matches!(plateau_t1(&reference_pos(), Direction::NegativeTh), Err(Error::InvalidConfig(_))));
    }

    #[test]
    fn plateau_invariant_on_last_samples() {
        for (cfg, dir) in [
            (reference_pos(), Direction::PositiveTh),
            (FridgeConfig::reference_negative(1.0, -1.0).unwrap(), Direction::NegativeTh),
        ] {
            let p = plateau_t1(&cfg, dir).unwrap();
            assert!((p.last_samples[0] - p.last_samples[1]).abs() < p.tolerance_used);
            assert!(p.plateau_t1 < 1.0);
        }
    }

    #[test]
    fn insulation_equilibrium_limit() {
        // T_h = T_c = T_r: no gradient, qubit 1 stays at the common temperature
        let mut cfg = FridgeConfig::reference_positive(1.5, 1.5).unwrap();
        cfg.reservoirs[1] = ReservoirSpec::bosonic(Role::Room, 1.5).unwrap();
        let r = insulation_limit(&cfg, &[1e-1, 1e-2, 1e-3, 1e-4]).unwrap();
        assert!((r.analytic - 1.5).abs() < 1e-15);
        assert!(r.final_gap < 1e-10);
    }

    #[test]
    fn insulation_rejects_bad_sequences() {
        let cfg = reference_pos();
        assert!(insulation_limit(&cfg, &[]).is_err());
        assert!(insulation_limit(&cfg, &[1e-2, 1e-1]).is_err());
        assert!(insulation_limit(&cfg, &[1e-2, 0.0]).is_err());
    }

    #[test]
    fn insulation_reference_config_uses_room_reference() {
        let cfg = reference_pos();
        let r = insulation_limit(&cfg, &[1e-1, 1e-2, 1e-3, 1e-4, 1e-6]).unwrap();
        // E₁ / (E₂/T_r − E₃/T_h) = 1 / (2.5 − 0.4)
        assert!((r.analytic - 1.0 / 2.1).abs() < 1e-15);
        assert!(r.final_gap < 1e-3, "gap {}", r.final_gap);
        assert!(r.monotone);
        assert_eq!(r.smallest_usable_gamma1, 1e-6);
    }

    #[test]
    fn insulation_negative_equal_gaps() {
        let mut cfg = FridgeConfig::reference_negative(1.0, -0.1).unwrap();
        cfg.gaps = [1.0, 2.0, 1.0];
        cfg.reservoirs[1] = ReservoirSpec::bosonic(Role::Room, 1.0).unwrap();
        let seq: Vec<f64> = (1..=8).map(|k| 10f64.powi(-k)).collect();
        let r = insulation_limit(&cfg, &seq).unwrap();
        assert!((r.analytic - 1.0 / 12.0).abs() < 1e-15);
        assert!(r.final_gap < 1e-3, "gap {}", r.final_gap);
        assert!(r.monotone);
    }

    #[test]
    fn single_point_calibration_grid() {
        let targets = &reference_targets()[..1];
        let r = calibration_landscape(&reference_pos(), targets, &[0.5], Execution::Parallel).unwrap();
        assert_eq!(r.best_g, 0.5);
        assert_eq!(r.landscape.len(), 1);
        assert!((r.best_error - r.fits[0].relative_error).abs() < 1e-15);
    }

    #[test]
    fn bracket_error_when_never_cooling() {
        // room bath hotter than the virtual qubit can be cooled against
        let mut cfg = reference_pos();
        cfg.reservoirs[1] = ReservoirSpec::bosonic(Role::Room, 20.0).unwrap();
        let err = cooling_threshold(&cfg, Direction::PositiveTh, ThresholdMode::GridEdge).unwrap_err();
        assert!(matches!(err, Error::Bracket { .. }), "{err:?}");
    }
}
