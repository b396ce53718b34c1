//! Trap capacity and ionization thresholds.
//!
//! `N` bosons stay trapped iff an `N`-boson ground Bethe state exists. The
//! capacity is the largest such `N`; an ionization threshold is the point
//! along one parameter axis where the existence of the `N`-boson state flips.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::secular::{BetheSolution, SolveOutcome, SolverSettings};
use crate::spectrum::ground_state;
use crate::units::{to_trap_units, PhysicalTrapConfig, UnitsError};

/// Default relative bisection width on the axis value.
pub const DEFAULT_THRESHOLD_TOLERANCE: f64 = 1e-4;

/// Physical parameter that a threshold search or sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    /// V₀, J
    TrapDepth,
    /// L, m
    TrapLength,
    /// c, 1/m
    InteractionStrength,
}

impl Axis {
    pub fn name(self) -> &'static str {
        match self {
            Axis::TrapDepth => "trap_depth",
            Axis::TrapLength => "trap_length",
            Axis::InteractionStrength => "interaction_strength",
        }
    }

    pub fn si_unit(self) -> &'static str {
        match self {
            Axis::TrapDepth => "J",
            Axis::TrapLength => "m",
            Axis::InteractionStrength => "1/m",
        }
    }

    /// Current value of this axis in SI units.
    pub fn value(self, config: &PhysicalTrapConfig) -> Result<f64, UnitsError> {
        Ok(match self {
            Axis::TrapDepth => config.trap_depth,
            Axis::TrapLength => config.trap_length,
            Axis::InteractionStrength => config.interaction_strength()?,
        })
    }

    /// Copy of `config` with this axis set to `value` (SI units).
    pub fn apply(self, config: &PhysicalTrapConfig, value: f64) -> Result<PhysicalTrapConfig, UnitsError> {
        let out = match self {
            Axis::TrapDepth => PhysicalTrapConfig {
                trap_depth: value,
                ..*config
            },
            Axis::TrapLength => PhysicalTrapConfig {
                trap_length: value,
                ..*config
            },
            Axis::InteractionStrength => config.with_interaction_strength(value)?,
        };
        out.validate()?;
        Ok(out)
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Axis {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "trap_depth" => Ok(Axis::TrapDepth),
            "trap_length" => Ok(Axis::TrapLength),
            "interaction_strength" => Ok(Axis::InteractionStrength),
            other => Err(format!(
                "unknown axis {other:?} (expected trap_depth, trap_length or interaction_strength)"
            )),
        }
    }
}

/// Ground state of `n` bosons for an SI configuration, if bound.
pub fn bound_ground_state(config: &PhysicalTrapConfig, n: usize, settings: &SolverSettings) -> Option<BetheSolution> {
    let p = to_trap_units(config, n).ok()?;
    match ground_state(&p, settings) {
        SolveOutcome::Bound(s) => Some(s),
        SolveOutcome::Unbound(_) => None,
    }
}

pub fn exists_bound_state(config: &PhysicalTrapConfig, n: usize, settings: &SolverSettings) -> bool {
    bound_ground_state(config, n, settings).is_some()
}

/// Largest `n ≤ n_max` with a bound ground state; 0 if none.
///
/// Scans upward from one particle and stops at the first `n` that does not
/// bind, relying on existence at `n` implying existence at `n − 1`.
pub fn trap_capacity(config: &PhysicalTrapConfig, n_max: usize, settings: &SolverSettings) -> usize {
    (1..=n_max)
        .take_while(|&n| exists_bound_state(config, n, settings))
        .last()
        .unwrap_or(0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdQuery {
    pub base_config: PhysicalTrapConfig,
    pub n: usize,
    pub axis: Axis,
    /// `(low, high)` in the axis' SI unit.
    pub bracket: (f64, f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdResult {
    pub axis: Axis,
    /// Midpoint of the final bracket, SI.
    pub value: f64,
    /// Capacity at the low end of the final bracket.
    pub capacity_below: usize,
    /// Capacity at the high end of the final bracket.
    pub capacity_above: usize,
    pub bisection_width: f64,
    /// Ground state of `n` bosons on the bound side of the final bracket.
    pub bound_side: BetheSolution,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CapacityError {
    #[error("bracket ({low}, {high}) must be positive and ordered")]
    BadBracket { low: f64, high: f64 },
    #[error("bound-state existence is {0} at both bracket ends")]
    SameSign(bool),
    #[error("tolerance must be positive, got {0}")]
    BadTolerance(f64),
    #[error(transparent)]
    Units(#[from] UnitsError),
}

/// Bisect along `q.axis` until the bracket is narrower than
/// `rel_tol · high`.
///
/// The midpoint is geometric, which suits brackets spanning decades.
pub fn ionization_threshold(
    q: &ThresholdQuery,
    rel_tol: f64,
    settings: &SolverSettings,
) -> Result<ThresholdResult, CapacityError> {
    let (mut lo, mut hi) = q.bracket;
    if !(lo > 0.0 && hi > lo && hi.is_finite()) {
        return Err(CapacityError::BadBracket { low: lo, high: hi });
    }
    if !(rel_tol > 0.0) {
        return Err(CapacityError::BadTolerance(rel_tol));
    }
    let at = |v: f64| -> Result<(PhysicalTrapConfig, Option<BetheSolution>), CapacityError> {
        let cfg = q.axis.apply(&q.base_config, v)?;
        let sol = bound_ground_state(&cfg, q.n, settings);
        Ok((cfg, sol))
    };
    let (_, lo_sol) = at(lo)?;
    let (_, hi_sol) = at(hi)?;
    let lo_bound = lo_sol.is_some();
    if lo_bound == hi_sol.is_some() {
        return Err(CapacityError::SameSign(lo_bound));
    }
    let mut bound_side = lo_sol.or(hi_sol).unwrap();
    while hi - lo > rel_tol * hi {
        let mid = (lo * hi).sqrt();
        let mid = if mid > lo && mid < hi { mid } else { 0.5 * (lo + hi) };
        let (_, sol) = at(mid)?;
        let bound = sol.is_some();
        if let Some(s) = sol {
            bound_side = s;
        }
        if bound == lo_bound {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let headroom = q.n + 1;
    let capacity_below = trap_capacity(&q.axis.apply(&q.base_config, lo)?, headroom, settings);
    let capacity_above = trap_capacity(&q.axis.apply(&q.base_config, hi)?, headroom, settings);
    Ok(ThresholdResult {
        axis: q.axis,
        value: 0.5 * (lo + hi),
        capacity_below,
        capacity_above,
        bisection_width: hi - lo,
        bound_side,
    })
}
