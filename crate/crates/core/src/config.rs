//! Trap configuration files and unit-suffixed command-line literals.
//!
//! A configuration file is a flat list of `key = value` lines (TOML syntax):
//!
//! ```text
//! atom = "Na23"
//! scattering_length_m = 2.3601428483e-9
//! omega_perp_hz = 150e3
//! trap_length_m = 5e-6
//! trap_depth_nk = 25.0
//! n_particles = 4
//! ```
//!
//! `mass_kg` overrides the mass implied by `atom`; one of the two is
//! required. Unknown keys are rejected.

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::units::{
    angular_frequency, nanokelvin_to_joules, PhysicalTrapConfig, UnitsError, BOLTZMANN, RUBIDIUM_87_MASS,
    SODIUM_23_MASS,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub atom: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mass_kg: Option<f64>,
    pub scattering_length_m: f64,
    /// Ordinary frequency; the angular frequency is 2π times this.
    pub omega_perp_hz: f64,
    pub trap_length_m: f64,
    pub trap_depth_nk: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_particles: Option<usize>,
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("malformed configuration: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("unknown atom {0:?} (known: Na23, Rb87)")]
    UnknownAtom(String),
    #[error("configuration needs `atom` or `mass_kg`")]
    MissingMass,
    #[error(transparent)]
    Units(#[from] UnitsError),
}

/// Mass of a built-in species, kg.
pub fn atom_mass(name: &str) -> Option<f64> {
    match name.to_ascii_lowercase().as_str() {
        "na23" | "23na" | "na" | "sodium" => Some(SODIUM_23_MASS),
        "rb87" | "87rb" | "rubidium87" => Some(RUBIDIUM_87_MASS),
        _ => None,
    }
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        Ok(toml::from_str(text)?)
    }

    pub fn read(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text)
    }

    pub fn to_physical(&self) -> Result<PhysicalTrapConfig, ConfigError> {
        let mass = match (self.mass_kg, &self.atom) {
            (Some(m), _) => m,
            (None, Some(name)) => atom_mass(name).ok_or_else(|| ConfigError::UnknownAtom(name.clone()))?,
            (None, None) => return Err(ConfigError::MissingMass),
        };
        let cfg = PhysicalTrapConfig {
            atom_mass: mass,
            scattering_length: self.scattering_length_m,
            omega_perp: angular_frequency(self.omega_perp_hz),
            trap_length: self.trap_length_m,
            trap_depth: nanokelvin_to_joules(self.trap_depth_nk),
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

/// What a literal measures, which fixes its accepted suffixes and SI unit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuantityKind {
    /// Energy; temperature suffixes are scaled by k_B. Bare numbers are J.
    Depth,
    /// Bare numbers are m.
    Length,
    /// Inverse length. Bare numbers are 1/m.
    InverseLength,
}

fn suffix_factor(kind: QuantityKind, suffix: &str) -> Option<f64> {
    let s = suffix.trim();
    match kind {
        QuantityKind::Depth => match s {
            "" | "J" => Some(1.0),
            "K" => Some(BOLTZMANN),
            "mK" => Some(1e-3 * BOLTZMANN),
            "uK" | "μK" | "µK" => Some(1e-6 * BOLTZMANN),
            "nK" => Some(1e-9 * BOLTZMANN),
            "pK" => Some(1e-12 * BOLTZMANN),
            _ => None,
        },
        QuantityKind::Length => match s {
            "" | "m" => Some(1.0),
            "mm" => Some(1e-3),
            "um" | "μm" | "µm" => Some(1e-6),
            "nm" => Some(1e-9),
            _ => None,
        },
        QuantityKind::InverseLength => match s {
            "" | "/m" | "1/m" => Some(1.0),
            "/cm" | "1/cm" => Some(1e2),
            "/um" | "1/um" => Some(1e6),
            _ => None,
        },
    }
}

/// Parse a literal such as `25nK`, `5um`, `1e-30` into SI units.
pub fn parse_quantity(text: &str, kind: QuantityKind) -> Result<f64, String> {
    let text = text.trim();
    // longest numeric prefix whose remainder is a known suffix
    for split in (1..=text.len()).rev() {
        if !text.is_char_boundary(split) {
            continue;
        }
        let (num, suffix) = text.split_at(split);
        if let (Ok(v), Some(f)) = (num.trim().parse::<f64>(), suffix_factor(kind, suffix)) {
            if !v.is_finite() {
                break;
            }
            return Ok(v * f);
        }
    }
    Err(format!("cannot parse {text:?} as a {kind:?} literal"))
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"
        atom = "Na23"
        scattering_length_m = 2.36e-9
        omega_perp_hz = 150e3
        trap_length_m = 5e-6
        trap_depth_nk = 25.0
        n_particles = 4
    "#;

    #[test]
    fn parses_sample() {
        let f = ConfigFile::parse(SAMPLE).unwrap();
        assert_eq!(f.n_particles, Some(4));
        let cfg = f.to_physical().unwrap();
        assert_eq!(cfg.atom_mass, SODIUM_23_MASS);
        assert!((cfg.omega_perp / (2.0 * std::f64::consts::PI * 150e3) - 1.0).abs() < 1e-15);
        assert!((cfg.trap_depth_nk() - 25.0).abs() < 1e-12);
    }

    #[test]
    fn unknown_key_is_hard_error() {
        let text = format!("{SAMPLE}\nmagnetic_field_g = 3.0\n");
        assert!(matches!(ConfigFile::parse(&text), Err(ConfigError::Parse(_))));
    }

    #[test]
    fn mass_sources() {
        let mut f = ConfigFile::parse(SAMPLE).unwrap();
        f.atom = Some("Cs133".into());
        assert!(matches!(f.to_physical(), Err(ConfigError::UnknownAtom(_))));
        f.atom = None;
        assert!(matches!(f.to_physical(), Err(ConfigError::MissingMass)));
        f.mass_kg = Some(1e-25);
        assert_eq!(f.to_physical().unwrap().atom_mass, 1e-25);
        f.trap_depth_nk = -1.0;
        assert!(matches!(f.to_physical(), Err(ConfigError::Units(_))));
    }

    #[test]
    fn literals() {
        let nk = 1e-9 * BOLTZMANN;
        let cases = [
            ("25nK", QuantityKind::Depth, 25.0 * nk),
            ("0.5 nK", QuantityKind::Depth, 0.5 * nk),
            ("1uK", QuantityKind::Depth, 1000.0 * nk),
            ("2μK", QuantityKind::Depth, 2000.0 * nk),
            ("1e-30", QuantityKind::Depth, 1e-30),
            ("3e-31J", QuantityKind::Depth, 3e-31),
            ("5um", QuantityKind::Length, 5e-6),
            ("5µm", QuantityKind::Length, 5e-6),
            ("250nm", QuantityKind::Length, 2.5e-7),
            ("1.5mm", QuantityKind::Length, 1.5e-3),
            ("7e-6", QuantityKind::Length, 7e-6),
            ("16863.6/cm", QuantityKind::InverseLength, 1.68636e6),
            ("2e6", QuantityKind::InverseLength, 2e6),
        ];
        for (text, kind, expected) in cases {
            let v = parse_quantity(text, kind).unwrap();
            assert!((v / expected - 1.0).abs() < 1e-12, "{text}: {v} vs {expected}");
        }
        for (text, kind) in [
            ("5um", QuantityKind::Depth),
            ("25nK", QuantityKind::Length),
            ("nK", QuantityKind::Depth),
            ("", QuantityKind::Length),
            ("12parsec", QuantityKind::Length),
            ("inf", QuantityKind::Depth),
        ] {
            assert!(parse_quantity(text, kind).is_err(), "{text} should fail");
        }
    }
}
