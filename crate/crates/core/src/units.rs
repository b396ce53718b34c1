//! Physical constants, the effective 1D interaction strength, and conversions
//! between SI quantities and the two dimensionless unit systems used by the
//! solver.
//!
//! All solving happens in *trap units*: the well width `L` is the length unit
//! and `ħ²/(mL²)` the energy unit. In these units the well occupies
//! `|x| < 1/2`, has depth `k̂₀²/2`, and the contact interaction strength is
//! `ĉ = c·L`. The *interaction units* (length `1/c`, energy `ħ²c²/m`) are kept
//! only as a conversion target for cross-checks.

use std::f64::consts::PI;

use thiserror::Error;

/// Reduced Planck constant, J·s (CODATA 2018, exact by SI definition).
pub const HBAR: f64 = 1.054_571_817e-34;
/// Boltzmann constant, J/K (CODATA 2018, exact by SI definition).
pub const BOLTZMANN: f64 = 1.380_649e-23;
/// Unified atomic mass unit, kg (CODATA 2018).
pub const ATOMIC_MASS_UNIT: f64 = 1.660_539_066_60e-27;
/// ²³Na atomic mass, kg (AME2016: 22.989 769 2820 u).
pub const SODIUM_23_MASS: f64 = 22.989_769_282_0 * ATOMIC_MASS_UNIT;
/// ⁸⁷Rb atomic mass, kg (AME2016: 86.909 180 531 u).
pub const RUBIDIUM_87_MASS: f64 = 86.909_180_531 * ATOMIC_MASS_UNIT;
/// Empirical constant of the confinement-induced correction to the 1D coupling.
pub const CONFINEMENT_CONSTANT: f64 = 1.4603;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum UnitsError {
    #[error("{name} must be strictly positive and finite, got {value}")]
    NonPositive { name: &'static str, value: f64 },
    #[error("confinement-induced resonance: a/a_perp = {ratio} must stay below 1/C = {limit}")]
    ConfinementResonance { ratio: f64, limit: f64 },
    #[error("particle count must be at least 1")]
    NoParticles,
}

fn positive(name: &'static str, value: f64) -> Result<f64, UnitsError> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(UnitsError::NonPositive { name, value })
    }
}

/// SI description of the atom species and the optical box.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct PhysicalTrapConfig {
    /// kg
    pub atom_mass: f64,
    /// 3D s-wave scattering length, m
    pub scattering_length: f64,
    /// transverse trapping angular frequency, rad/s
    pub omega_perp: f64,
    /// well width L, m
    pub trap_length: f64,
    /// well depth V₀, J
    pub trap_depth: f64,
}

impl PhysicalTrapConfig {
    pub fn validate(&self) -> Result<(), UnitsError> {
        positive("atom_mass", self.atom_mass)?;
        positive("scattering_length", self.scattering_length)?;
        positive("omega_perp", self.omega_perp)?;
        positive("trap_length", self.trap_length)?;
        positive("trap_depth", self.trap_depth)?;
        interaction_strength(self.scattering_length, self.omega_perp, self.atom_mass)?;
        Ok(())
    }

    /// Effective 1D interaction strength `c`, 1/m.
    pub fn interaction_strength(&self) -> Result<f64, UnitsError> {
        interaction_strength(self.scattering_length, self.omega_perp, self.atom_mass)
    }

    pub fn trap_depth_nk(&self) -> f64 {
        joules_to_nanokelvin(self.trap_depth)
    }

    /// Copy with the scattering length replaced so that the 1D coupling
    /// equals `c` (1/m).
    pub fn with_interaction_strength(&self, c: f64) -> Result<Self, UnitsError> {
        let a = scattering_length_for(c, self.omega_perp, self.atom_mass)?;
        Ok(Self {
            scattering_length: a,
            ..*self
        })
    }
}

/// Dimensionless problem in trap units.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct TrapUnitsProblem {
    /// `c·L`
    pub c_hat: f64,
    /// `L·√(2mV₀)/ħ`
    pub k0_hat: f64,
    pub n_particles: usize,
}

impl TrapUnitsProblem {
    pub fn new(c_hat: f64, k0_hat: f64, n_particles: usize) -> Result<Self, UnitsError> {
        positive("c_hat", c_hat)?;
        positive("k0_hat", k0_hat)?;
        if n_particles == 0 {
            return Err(UnitsError::NoParticles);
        }
        Ok(Self {
            c_hat,
            k0_hat,
            n_particles,
        })
    }

    pub fn with_c_hat(&self, c_hat: f64) -> Self {
        Self { c_hat, ..*self }
    }

    /// Depth of the well, `k̂₀²/2`, in trap energy units.
    pub fn well_depth(&self) -> f64 {
        0.5 * self.k0_hat * self.k0_hat
    }

    /// Reconstruct the SI configuration given the quantities that trap units
    /// factor out (mass, transverse frequency, well width).
    pub fn to_physical(
        &self,
        atom_mass: f64,
        omega_perp: f64,
        trap_length: f64,
    ) -> Result<PhysicalTrapConfig, UnitsError> {
        let c = self.c_hat / trap_length;
        let a = scattering_length_for(c, omega_perp, atom_mass)?;
        let p = HBAR * self.k0_hat / trap_length;
        Ok(PhysicalTrapConfig {
            atom_mass,
            scattering_length: a,
            omega_perp,
            trap_length,
            trap_depth: p * p / (2.0 * atom_mass),
        })
    }

    /// The same problem expressed with `1/c` as the length unit.
    pub fn to_interaction_units(&self) -> InteractionUnitsProblem {
        InteractionUnitsProblem {
            x0: self.c_hat,
            k0: self.k0_hat / self.c_hat,
            n_particles: self.n_particles,
        }
    }
}

/// Problem with `1/c` as length unit and `ħ²c²/m` as energy unit: the well
/// has width `x₀` and depth `k₀²/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InteractionUnitsProblem {
    pub x0: f64,
    pub k0: f64,
    pub n_particles: usize,
}

impl InteractionUnitsProblem {
    pub fn to_trap_units(&self) -> TrapUnitsProblem {
        TrapUnitsProblem {
            c_hat: self.x0,
            k0_hat: self.k0 * self.x0,
            n_particles: self.n_particles,
        }
    }

    /// Factor converting an energy in these units into trap energy units.
    pub fn energy_to_trap_units(&self) -> f64 {
        self.x0 * self.x0
    }
}

/// Transverse oscillator length `a_⊥ = √(2ħ/(mω_⊥))`, m.
pub fn transverse_length(omega_perp: f64, atom_mass: f64) -> Result<f64, UnitsError> {
    positive("omega_perp", omega_perp)?;
    positive("atom_mass", atom_mass)?;
    Ok((2.0 * HBAR / (atom_mass * omega_perp)).sqrt())
}

/// Effective 1D coupling from the 3D scattering length under tight
/// transverse confinement, 1/m.
pub fn interaction_strength(scattering_length: f64, omega_perp: f64, atom_mass: f64) -> Result<f64, UnitsError> {
    let a_perp = transverse_length(omega_perp, atom_mass)?;
    interaction_strength_with(scattering_length, a_perp, CONFINEMENT_CONSTANT)
}

/// `c = (4a/a_⊥²)/(1 − C·a/a_⊥)` with an explicit correction constant.
pub fn interaction_strength_with(scattering_length: f64, a_perp: f64, correction: f64) -> Result<f64, UnitsError> {
    positive("scattering_length", scattering_length)?;
    positive("a_perp", a_perp)?;
    let ratio = scattering_length / a_perp;
    let denom = 1.0 - correction * ratio;
    if denom <= 0.0 {
        return Err(UnitsError::ConfinementResonance {
            ratio,
            limit: 1.0 / correction,
        });
    }
    Ok(4.0 * scattering_length / (a_perp * a_perp) / denom)
}

/// Inverse of [`interaction_strength`]: the scattering length producing the
/// 1D coupling `c`.
///
/// `c(1 − Ca/a_⊥) = 4a/a_⊥²` is linear in `a`, so the inversion is closed form.
pub fn scattering_length_for(c: f64, omega_perp: f64, atom_mass: f64) -> Result<f64, UnitsError> {
    positive("interaction_strength", c)?;
    let a_perp = transverse_length(omega_perp, atom_mass)?;
    Ok(c / (4.0 / (a_perp * a_perp) + c * CONFINEMENT_CONSTANT / a_perp))
}

/// `L·√(2mV₀)/ħ`; zero depth gives zero.
pub fn well_wavenumber(atom_mass: f64, trap_depth: f64, trap_length: f64) -> f64 {
    trap_length * (2.0 * atom_mass * trap_depth).sqrt() / HBAR
}

pub fn to_trap_units(config: &PhysicalTrapConfig, n: usize) -> Result<TrapUnitsProblem, UnitsError> {
    config.validate()?;
    let c = config.interaction_strength()?;
    TrapUnitsProblem::new(
        c * config.trap_length,
        well_wavenumber(config.atom_mass, config.trap_depth, config.trap_length),
        n,
    )
}

/// Trap energy unit `ħ²/(mL²)`, J.
pub fn energy_unit(config: &PhysicalTrapConfig) -> f64 {
    HBAR * HBAR / (config.atom_mass * config.trap_length * config.trap_length)
}

/// Trap-units energy to joules.
pub fn energy_to_physical(e: f64, config: &PhysicalTrapConfig) -> f64 {
    e * energy_unit(config)
}

/// Trap-units energy to `E/k_B` in nK.
pub fn energy_to_nanokelvin(e: f64, config: &PhysicalTrapConfig) -> f64 {
    joules_to_nanokelvin(energy_to_physical(e, config))
}

pub fn joules_to_nanokelvin(e: f64) -> f64 {
    e / BOLTZMANN * 1e9
}

pub fn nanokelvin_to_joules(t: f64) -> f64 {
    t * 1e-9 * BOLTZMANN
}

/// Angular frequency from an ordinary frequency in Hz.
pub fn angular_frequency(hz: f64) -> f64 {
    2.0 * PI * hz
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sodium_trap() -> PhysicalTrapConfig {
        PhysicalTrapConfig {
            atom_mass: SODIUM_23_MASS,
            scattering_length: 2.5e-9,
            omega_perp: angular_frequency(150e3),
            trap_length: 5e-6,
            trap_depth: nanokelvin_to_joules(25.0),
        }
    }

    #[test]
    fn transverse_length_scaling() {
        let w = angular_frequency(150e3);
        let base = transverse_length(w, SODIUM_23_MASS).unwrap();
        let heavy = transverse_length(w, 4.0 * SODIUM_23_MASS).unwrap();
        let stiff = transverse_length(4.0 * w, SODIUM_23_MASS).unwrap();
        assert!((heavy / base - 0.5).abs() < 1e-15);
        assert!((stiff / base - 0.5).abs() < 1e-15);
        assert!(transverse_length(0.0, SODIUM_23_MASS).is_err());
        assert!(transverse_length(w, -1.0).is_err());
    }

    #[test]
    fn zero_correction_is_plain_ratio() {
        let c = interaction_strength_with(3e-9, 7e-8, 0.0).unwrap();
        assert_eq!(c, 4.0 * 3e-9 / (7e-8 * 7e-8));
    }

    #[test]
    fn resonance_is_rejected() {
        let a_perp = 7e-8;
        let err = interaction_strength_with(a_perp / CONFINEMENT_CONSTANT, a_perp, CONFINEMENT_CONSTANT);
        assert!(matches!(err, Err(UnitsError::ConfinementResonance { .. })));
        let err = interaction_strength_with(a_perp, a_perp, CONFINEMENT_CONSTANT);
        assert!(matches!(err, Err(UnitsError::ConfinementResonance { .. })));
    }

    #[test]
    fn coupling_increases_with_scattering_length() {
        let w = angular_frequency(150e3);
        let mut prev = 0.0;
        for i in 1..200 {
            let a = i as f64 * 2.5e-10;
            match interaction_strength(a, w, SODIUM_23_MASS) {
                Ok(c) => {
                    assert!(c > prev);
                    prev = c;
                }
                Err(UnitsError::ConfinementResonance { .. }) => break,
                Err(e) => panic!("{e}"),
            }
        }
    }

    #[test]
    fn zero_depth_gives_zero_wavenumber() {
        assert_eq!(well_wavenumber(SODIUM_23_MASS, 0.0, 5e-6), 0.0);
    }

    #[test]
    fn doubling_length_doubles_both_parameters() {
        let cfg = sodium_trap();
        let p1 = to_trap_units(&cfg, 4).unwrap();
        let p2 = to_trap_units(
            &PhysicalTrapConfig {
                trap_length: 2.0 * cfg.trap_length,
                ..cfg
            },
            4,
        )
        .unwrap();
        assert!((p2.c_hat / p1.c_hat - 2.0).abs() < 1e-14);
        assert!((p2.k0_hat / p1.k0_hat - 2.0).abs() < 1e-14);
    }

    #[test]
    fn round_trip_preserves_si_values() {
        let cfg = sodium_trap();
        let p = to_trap_units(&cfg, 3).unwrap();
        let back = p.to_physical(cfg.atom_mass, cfg.omega_perp, cfg.trap_length).unwrap();
        let rel = |a: f64, b: f64| ((a - b) / b).abs();
        assert!(rel(back.scattering_length, cfg.scattering_length) < 1e-12);
        assert!(rel(back.trap_depth, cfg.trap_depth) < 1e-12);
    }

    #[test]
    fn energy_unit_matches_hand_computation() {
        let cfg = sodium_trap();
        // ħ²/(mL²) for ²³Na in a 5 μm box
        let hand = (1.054_571_817e-34f64).powi(2) / (22.989_769_282 * 1.660_539_066_60e-27 * 25e-12);
        assert!((energy_to_physical(1.0, &cfg) / hand - 1.0).abs() < 1e-12);
        assert_eq!(energy_to_physical(0.0, &cfg), 0.0);
        let p = to_trap_units(&cfg, 1).unwrap();
        let v0 = energy_to_physical(p.well_depth(), &cfg);
        assert!((v0 / cfg.trap_depth - 1.0).abs() < 1e-12);
        for &alpha in &[-3.0, 0.5, 7.25] {
            let lhs = energy_to_physical(alpha * 1.7, &cfg);
            let rhs = alpha * energy_to_physical(1.7, &cfg);
            assert!((lhs - rhs).abs() <= 1e-15 * rhs.abs());
        }
    }

    #[test]
    fn interaction_units_round_trip() {
        let p = TrapUnitsProblem::new(8.4, 7.7, 4).unwrap();
        let q = p.to_interaction_units();
        assert_eq!(q.x0, 8.4);
        let back = q.to_trap_units();
        assert!((back.k0_hat - p.k0_hat).abs() < 1e-14);
    }
}
