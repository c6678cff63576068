//! Reduced single-qubit states and their effective temperatures.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::liouvillian::{DensityMatrix, QUBITS};
use crate::tolerances;

/// Partial trace of a three-qubit state onto qubit `qubit_index` (1-based).
pub fn reduce(state: &DensityMatrix, qubit_index: usize) -> Result<CMatrix> {
    if !(1..=QUBITS).contains(&qubit_index) {
        return Err(Error::InvalidArgument(format!("qubit index must be 1..=3, got {qubit_index}")));
    }
    let rho = state.matrix();
    if rho.rows() != 1 << QUBITS {
        return Err(Error::Dimension(format!("expected an 8x8 state, got {}x{}", rho.rows(), rho.cols())));
    }
    let shift = QUBITS - qubit_index;
    let mut out = CMatrix::zeros(2, 2);
    for i in 0..rho.rows() {
        for j in 0..rho.cols() {
            // the other two qubits must agree between row and column
            if (i ^ j) & !(1 << shift) != 0 {
                continue;
            }
            out[((i >> shift) & 1, (j >> shift) & 1)] += rho[(i, j)];
        }
    }
    Ok(out)
}

/// Temperature assigned to a two-level population, with sentinels for the
/// singular points of `T = E / ln(p_g / p_e)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum EffectiveTemperature {
    Positive(f64),
    /// Population inversion, `T < 0`.
    Inverted(f64),
    /// `p_g = p_e`.
    Infinite,
    /// `p_g ∈ {0, 1}`; `inverted` marks the `0⁻` side.
    AbsoluteZero {
        inverted: bool,
    },
}

impl EffectiveTemperature {
    pub fn value(self) -> Option<f64> {
        match self {
            EffectiveTemperature::Positive(t) | EffectiveTemperature::Inverted(t) => Some(t),
            EffectiveTemperature::AbsoluteZero { inverted: false } => Some(0.0),
            EffectiveTemperature::AbsoluteZero { inverted: true } => Some(-0.0),
            EffectiveTemperature::Infinite => None,
        }
    }

    pub fn is_positive(self) -> bool {
        matches!(self, EffectiveTemperature::Positive(_))
    }
}

impl fmt::Display for EffectiveTemperature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.value() {
            Some(t) => write!(f, "{t}"),
            None => f.write_str("inf_temp"),
        }
    }
}

/// `T = E / ln(p_g / (1 − p_g))`.
pub fn effective_temperature(p_ground: f64, gap: f64) -> Result<EffectiveTemperature> {
    if !(0.0..=1.0).contains(&p_ground) {
        return Err(Error::InvalidArgument(format!("ground population must be in [0, 1], got {p_ground}")));
    }
    effective_temperature_from_populations(p_ground, 1.0 - p_ground, gap)
}

/// Same as [`effective_temperature`] but from both populations, which keeps
/// precision when the excited population is tiny.
pub fn effective_temperature_from_populations(p_ground: f64, p_excited: f64, gap: f64) -> Result<EffectiveTemperature> {
    if !(gap > 0.0 && gap.is_finite()) {
        return Err(Error::InvalidArgument(format!("gap must be positive, got {gap}")));
    }
    if !(p_ground.is_finite() && p_excited.is_finite()) {
        return Err(Error::InvalidArgument("non-finite population".into()));
    }
    let total = p_ground + p_excited;
    if total <= 0.0 {
        return Err(Error::InvalidArgument("populations sum to zero".into()));
    }
    if p_excited <= 0.0 {
        return Ok(EffectiveTemperature::AbsoluteZero { inverted: false });
    }
    if p_ground <= 0.0 {
        return Ok(EffectiveTemperature::AbsoluteZero { inverted: true });
    }
    if ((p_ground - p_excited) / total).abs() < 2.0 * tolerances::INFINITE_TEMPERATURE_BAND {
        return Ok(EffectiveTemperature::Infinite);
    }
    let t = gap / (p_ground / p_excited).ln();
    Ok(if t > 0.0 { EffectiveTemperature::Positive(t) } else { EffectiveTemperature::Inverted(t) })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QubitReadout {
    pub qubit_index: usize,
    pub p_ground: f64,
    pub p_excited: f64,
    /// `|ρ_ge|` of the reduced state.
    pub coherence_magnitude: f64,
    pub temperature: EffectiveTemperature,
}

impl QubitReadout {
    pub fn from_state(state: &DensityMatrix, qubit_index: usize, gap: f64) -> Result<Self> {
        let r = reduce(state, qubit_index)?;
        let p_ground = r[(0, 0)].re;
        let p_excited = r[(1, 1)].re;
        let temperature = effective_temperature_from_populations(p_ground, p_excited, gap)?;
        Ok(Self { qubit_index, p_ground, p_excited, coherence_magnitude: r[(0, 1)].norm(), temperature })
    }
}

/// Qubit-1 temperature in the perfectly insulated limit,
/// `T_c / (1 + (E₃/E₁)(1 − T_c/T_h))`, valid for either sign of `T_h`.
pub fn insulated_t1(t_c: f64, t_h: f64, e1: f64, e3: f64) -> Result<f64> {
    if !(t_c > 0.0 && t_c.is_finite()) {
        return Err(Error::InvalidArgument(format!("t_c must be positive, got {t_c}")));
    }
    if t_h == 0.0 || t_h.is_nan() {
        return Err(Error::InvalidArgument(format!("t_h must be nonzero, got {t_h}")));
    }
    if !(e1 > 0.0 && e3 > 0.0) {
        return Err(Error::InvalidArgument(format!("gaps must be positive, got E1 = {e1}, E3 = {e3}")));
    }
    let denominator = 1.0 + (e3 / e1) * (1.0 - t_c / t_h);
    if !(denominator > 0.0) {
        return Err(Error::OutOfRegime { denominator });
    }
    Ok(t_c / denominator)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::C64;
    use proptest::prelude::*;

    #[test]
    fn reduce_product_state() {
        let a = DensityMatrix::qubit(0.1).unwrap();
        let b = DensityMatrix::qubit(0.3).unwrap();
        let c = DensityMatrix::qubit(0.8).unwrap();
        let rho = DensityMatrix::product(&[a.clone(), b.clone(), c.clone()]).unwrap();
        for (k, f) in [a, b, c].iter().enumerate() {
            let r = reduce(&rho, k + 1).unwrap();
            assert!((&r - f.matrix()).max_abs() < 1e-15);
        }
    }

    #[test]
    fn reduce_maximally_mixed() {
        let r = reduce(&DensityMatrix::maximally_mixed(8), 2).unwrap();
        assert_eq!(r, CMatrix::identity(2).scale_real(0.5));
    }

    #[test]
    fn reduce_w_state() {
        let mut psi = vec![C64::new(0.0, 0.0); 8];
        for idx in [0b100, 0b010, 0b001] {
            psi[idx] = C64::new(1.0, 0.0);
        }
        let rho = DensityMatrix::from_pure(&psi).unwrap();
        for q in 1..=3 {
            let r = reduce(&rho, q).unwrap();
            assert!((r[(0, 0)].re - 2.0 / 3.0).abs() < 1e-15);
            assert!((r[(1, 1)].re - 1.0 / 3.0).abs() < 1e-15);
            assert!(r.hermiticity_defect() < 1e-15);
        }
        assert!(reduce(&rho, 0).is_err());
        assert!(reduce(&rho, 4).is_err());
    }

    #[test]
    fn reduce_keeps_coherence_of_target_qubit() {
        // |+> ⊗ |g> ⊗ |g>
        let mut psi = vec![C64::new(0.0, 0.0); 8];
        psi[0] = C64::new(1.0, 0.0);
        psi[4] = C64::new(1.0, 0.0);
        let rho = DensityMatrix::from_pure(&psi).unwrap();
        assert!((reduce(&rho, 1).unwrap()[(0, 1)].re - 0.5).abs() < 1e-15);
        assert_eq!(reduce(&rho, 2).unwrap()[(0, 1)].norm(), 0.0);
    }

    #[test]
    fn temperature_values() {
        let e = std::f64::consts::E;
        let t = effective_temperature(1.0 / (1.0 + 1.0 / e), 1.0).unwrap();
        assert!((t.value().unwrap() - 1.0).abs() < 1e-14);
        let t = effective_temperature(e / (1.0 + e), 1.0).unwrap();
        assert!((t.value().unwrap() - 1.0).abs() < 1e-14);
        assert_eq!(effective_temperature(0.5, 1.0).unwrap(), EffectiveTemperature::Infinite);
        let inv = effective_temperature(1.0 / (1.0 + e), 1.0).unwrap();
        assert!(matches!(inv, EffectiveTemperature::Inverted(t) if (t + 1.0).abs() < 1e-14));
    }

    #[test]
    fn temperature_sentinels() {
        assert_eq!(effective_temperature(1.0, 1.0).unwrap(), EffectiveTemperature::AbsoluteZero { inverted: false });
        assert_eq!(effective_temperature(0.0, 1.0).unwrap(), EffectiveTemperature::AbsoluteZero { inverted: true });
        assert!(effective_temperature(1.5, 1.0).is_err());
        assert_eq!(EffectiveTemperature::Infinite.to_string(), "inf_temp");
        assert_eq!(EffectiveTemperature::Positive(0.25).to_string(), "0.25");
    }

    #[test]
    fn tiny_excited_population_keeps_precision() {
        let t = 0.03;
        let p_e = (-1.0f64 / t).exp();
        let got = effective_temperature_from_populations(1.0, p_e, 1.0).unwrap().value().unwrap();
        assert!((got / t - 1.0).abs() < 1e-13);
    }

    #[test]
    fn insulated_values() {
        // E3/E1 = 4, T_h → ∞
        assert!((insulated_t1(1.0, 1e300, 1.0, 4.0).unwrap() - 0.2).abs() < 1e-15);
        // E3/E1 = 1, T_c/T_h → 0⁺
        assert!((insulated_t1(1.0, 1e12, 1.0, 1.0).unwrap() - 0.5).abs() < 1e-11);
        assert!((insulated_t1(1.0, -0.1, 1.0, 1.0).unwrap() - 1.0 / 12.0).abs() < 1e-15);
        assert_eq!(insulated_t1(1.3, 1.3, 1.0, 4.0).unwrap(), 1.3);
        assert!(matches!(insulated_t1(3.0, 0.5, 1.0, 4.0), Err(Error::OutOfRegime { .. })));
        assert!(insulated_t1(-1.0, 2.0, 1.0, 1.0).is_err());
        assert!(insulated_t1(1.0, 0.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn insulated_goes_to_zero_for_hot_inverted_baths() {
        let mut prev = f64::INFINITY;
        for k in 0..12 {
            let ratio = 10f64.powi(k);
            let t1 = insulated_t1(1.0, -1.0 / ratio, 1.0, 1.0).unwrap();
            assert!(t1 < prev);
            prev = t1;
        }
        assert!(prev < 1e-10);
    }

    proptest! {
        #[test]
        fn negative_form_agrees(t_c in 0.01f64..10.0, t_h_abs in 0.01f64..100.0, e1 in 0.1f64..5.0, e3 in 0.1f64..5.0) {
            let a = insulated_t1(t_c, -t_h_abs, e1, e3).unwrap();
            let b = t_c / (1.0 + (e3 / e1) * (1.0 + t_c / t_h_abs));
            prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
        }

        #[test]
        fn insulated_decreasing_in_gap_ratio(t_c in 0.1f64..5.0, t_h in 0.1f64..50.0, r in 0.1f64..10.0, dr in 0.01f64..5.0) {
            let t_h = t_c + t_h; // T_h > T_c keeps the denominator above 1
            let a = insulated_t1(t_c, t_h, 1.0, r).unwrap();
            let b = insulated_t1(t_c, t_h, 1.0, r + dr).unwrap();
            prop_assert!(b < a);
        }

        #[test]
        fn temperature_round_trip(t in 0.05f64..50.0, neg in any::<bool>(), gap in 0.2f64..5.0) {
            let t = if neg { -t } else { t };
            let p_g = 1.0 / (1.0 + (-gap / t).exp());
            let p_e = 1.0 / (1.0 + (gap / t).exp());
            let got = effective_temperature_from_populations(p_g, p_e, gap).unwrap().value().unwrap();
            prop_assert!((got / t - 1.0).abs() < 1e-8);
        }
    }
}
