//! Seeded random refrigerator configurations shared by the integration tests.

#![allow(dead_code)]

use qfridge_core::reservoirs::{ReservoirSpec, Role, Statistics};
use qfridge_core::FridgeConfig;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

/// Valid configuration with moderate rates, so relaxation happens within `t ≈ 100`.
///
/// Gaps are resonant half the time; the hot bath is bosonic, fermionic at
/// `T > 0`, or fermionic at `T < 0` with equal odds.
pub fn random_config(rng: &mut StdRng) -> FridgeConfig {
    let e1 = rng.gen_range(0.5..2.0);
    let e2 = e1 + rng.gen_range(0.5..4.0);
    let e3 = if rng.gen_bool(0.5) { e2 - e1 } else { rng.gen_range(0.5..5.0) };
    let gammas = [rng.gen_range(0.5..2.0), rng.gen_range(0.5..2.0), rng.gen_range(0.5..2.0)];
    let t_c = rng.gen_range(0.3..5.0);
    let t_r = rng.gen_range(0.3..5.0);
    let hot = match rng.gen_range(0..3) {
        0 => ReservoirSpec::bosonic(Role::Hot, rng.gen_range(0.3..20.0)),
        1 => ReservoirSpec::fermionic(Role::Hot, rng.gen_range(0.3..20.0)),
        _ => ReservoirSpec::fermionic(Role::Hot, -rng.gen_range(0.3..20.0)),
    }
    .expect("valid hot bath");
    let config = FridgeConfig {
        gaps: [e1, e2, e3],
        gammas,
        reservoirs: [
            ReservoirSpec::new(Role::Cold, Statistics::Bosonic, t_c).expect("valid cold bath"),
            ReservoirSpec::new(Role::Room, Statistics::Bosonic, t_r).expect("valid room bath"),
            hot,
        ],
        coupling: rng.gen_range(0.2..2.0),
    };
    config.validate().expect("generated config is valid");
    config
}

pub fn random_configs(seed: u64, count: usize) -> Vec<FridgeConfig> {
    let mut r = rng(seed);
    (0..count).map(|_| random_config(&mut r)).collect()
}
