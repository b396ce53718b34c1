#![allow(dead_code)]

use bethe_well::units::{angular_frequency, nanokelvin_to_joules, PhysicalTrapConfig, SODIUM_23_MASS};

/// Scattering length giving c = 1.68636e6 1/m for sodium at 150 kHz.
pub const SODIUM_SCATTERING_LENGTH: f64 = 2.360_142_848_294_150_7e-9;

/// Sodium in a 5 μm box.
pub fn sodium(depth_nk: f64) -> PhysicalTrapConfig {
    PhysicalTrapConfig {
        atom_mass: SODIUM_23_MASS,
        scattering_length: SODIUM_SCATTERING_LENGTH,
        omega_perp: angular_frequency(150e3),
        trap_length: 5e-6,
        trap_depth: nanokelvin_to_joules(depth_nk),
    }
}

/// Random strictly ascending wave numbers inside `(0, k0)`.
pub fn interior_point<R: rand::Rng>(rng: &mut R, n: usize, k0: f64) -> Vec<f64> {
    loop {
        let mut k: Vec<f64> = (0..n).map(|_| rng.random_range(0.02..0.98) * k0).collect();
        k.sort_by(f64::total_cmp);
        if k.windows(2).all(|w| w[1] - w[0] > 1e-3 * k0) {
            return k;
        }
    }
}
