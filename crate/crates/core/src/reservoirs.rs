//! Bath statistics, occupation numbers and the induced Lindblad rates.
//!
//! A bosonic bath at temperature `T` has `n = 1/(e^{E/T} − 1)` and a fermionic
//! one `n = 1/(e^{E/T} + 1)`. Only the fermionic occupation can exceed 1/2,
//! so negative temperatures are restricted to fermionic baths. Decay and
//! excitation rates are `Γ↓ = γ(1 ± n)` (+ bosonic, − fermionic) and `Γ↑ = γ n`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Statistics {
    Bosonic,
    Fermionic,
}

impl Statistics {
    /// `+1` for bosons, `−1` for fermions.
    pub fn sign(self) -> f64 {
        match self {
            Statistics::Bosonic => 1.0,
            Statistics::Fermionic => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Cold,
    Room,
    Hot,
}

impl Role {
    pub const ALL: [Role; 3] = [Role::Cold, Role::Room, Role::Hot];
}

/// Thermodynamic state of a bath: a temperature, or a directly fixed occupation
/// for the saturated limits (`T → 0±`, `T → ±∞`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BathState {
    Temperature(f64),
    Occupation(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReservoirSpec {
    pub role: Role,
    pub statistics: Statistics,
    #[serde(flatten)]
    pub state: BathState,
}

impl ReservoirSpec {
    pub fn new(role: Role, statistics: Statistics, temperature: f64) -> Result<Self> {
        let spec = Self { role, statistics, state: BathState::Temperature(temperature) };
        spec.validate()?;
        Ok(spec)
    }

    pub fn bosonic(role: Role, temperature: f64) -> Result<Self> {
        Self::new(role, Statistics::Bosonic, temperature)
    }

    pub fn fermionic(role: Role, temperature: f64) -> Result<Self> {
        Self::new(role, Statistics::Fermionic, temperature)
    }

    /// Bath with a fixed occupation, independent of the qubit gap.
    pub fn saturated(role: Role, statistics: Statistics, occupation: f64) -> Result<Self> {
        let spec = Self { role, statistics, state: BathState::Occupation(occupation) };
        spec.validate()?;
        Ok(spec)
    }

    pub fn temperature(&self) -> Option<f64> {
        match self.state {
            BathState::Temperature(t) => Some(t),
            BathState::Occupation(_) => None,
        }
    }

    /// Temperature seen by a qubit with the given gap; for fixed-occupation baths
    /// this inverts the occupation.
    pub fn effective_temperature(&self, gap: f64) -> Result<f64> {
        match self.state {
            BathState::Temperature(t) => Ok(t),
            BathState::Occupation(n) => temperature_from_occupation(self.statistics, gap, n),
        }
    }

    /// Same bath with a new temperature (or occupation kept if the new state says so).
    pub fn with_state(&self, state: BathState) -> Result<Self> {
        let spec = Self { state, ..*self };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_temperature(&self, temperature: f64) -> Result<Self> {
        self.with_state(BathState::Temperature(temperature))
    }

    pub fn validate(&self) -> Result<()> {
        match (self.statistics, self.state) {
            (_, BathState::Temperature(t)) if !t.is_finite() => {
                Err(Error::InvalidReservoir(format!("{:?} temperature must be finite, got {t}", self.role)))
            }
            (_, BathState::Temperature(0.0)) => {
                Err(Error::InvalidReservoir(format!("{:?} temperature must be nonzero", self.role)))
            }
            (Statistics::Bosonic, BathState::Temperature(t)) if t < 0.0 => Err(Error::InvalidReservoir(format!(
                "{:?} bath is bosonic; negative temperature {t} needs population inversion",
                self.role
            ))),
            (Statistics::Bosonic, BathState::Occupation(n)) if !(n.is_finite() && n > 0.0) => {
                Err(Error::InvalidReservoir(format!("bosonic occupation must be in (0, inf), got {n}")))
            }
            (Statistics::Fermionic, BathState::Occupation(n)) if !(n > 0.0 && n < 1.0) => {
                Err(Error::InvalidReservoir(format!("fermionic occupation must be in (0, 1), got {n}")))
            }
            _ => Ok(()),
        }
    }
}

/// Mean bath excitation at energy `gap`.
pub fn occupation(spec: &ReservoirSpec, gap: f64) -> Result<f64> {
    if !(gap > 0.0 && gap.is_finite()) {
        return Err(Error::InvalidArgument(format!("gap must be positive and finite, got {gap}")));
    }
    spec.validate()?;
    let t = match spec.state {
        BathState::Occupation(n) => return Ok(n),
        BathState::Temperature(t) => t,
    };
    let x = gap / t;
    Ok(match spec.statistics {
        // x > 0 guaranteed by validation; expm1 keeps precision for hot baths
        // and overflows gracefully to n = 0 for cold ones.
        Statistics::Bosonic => 1.0 / x.exp_m1(),
        Statistics::Fermionic => {
            if x >= 0.0 {
                let e = (-x).exp();
                e / (1.0 + e)
            } else {
                1.0 / (1.0 + x.exp())
            }
        }
    })
}

/// Decay and excitation rates for one qubit-bath pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LindbladRates {
    pub gamma_down: f64,
    pub gamma_up: f64,
}

pub fn rates(spec: &ReservoirSpec, gap: f64, gamma: f64) -> Result<LindbladRates> {
    if !(gamma >= 0.0 && gamma.is_finite()) {
        return Err(Error::InvalidArgument(format!("dissipation rate must be >= 0, got {gamma}")));
    }
    let n = occupation(spec, gap)?;
    let gamma_down = match spec.statistics {
        Statistics::Bosonic => gamma * (1.0 + n),
        Statistics::Fermionic => gamma * (1.0 - n),
    };
    Ok(LindbladRates { gamma_down, gamma_up: gamma * n })
}

/// Inverse of [`occupation`] for a thermal bath.
pub fn temperature_from_occupation(statistics: Statistics, gap: f64, n: f64) -> Result<f64> {
    if !(gap > 0.0 && gap.is_finite()) {
        return Err(Error::InvalidArgument(format!("gap must be positive and finite, got {gap}")));
    }
    match statistics {
        Statistics::Bosonic => {
            if !(n > 0.0 && n.is_finite()) {
                return Err(Error::InvalidArgument(format!("bosonic occupation must be > 0, got {n}")));
            }
            Ok(gap / (1.0 / n).ln_1p())
        }
        Statistics::Fermionic => {
            if !(n > 0.0 && n < 1.0) {
                return Err(Error::InvalidArgument(format!("fermionic occupation must be in (0, 1), got {n}")));
            }
            if n == 0.5 {
                return Err(Error::InfiniteTemperature);
            }
            Ok(gap / ((1.0 - n) / n).ln())
        }
    }
}
