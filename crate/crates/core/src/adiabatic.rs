//! Minimum adiabatic culling time along a trap-depth ramp.
//!
//! Adiabaticity bounds the ramp speed by `|dV₀/dt| ≤ Δ(V₀)²/ħ`, where `Δ` is
//! the ground to first-excited gap. Ramping at exactly that speed everywhere
//! gives the shortest admissible schedule, `t_min = ∫ ħ/Δ(V₀)² dV₀`. This is an
//! order-of-magnitude estimator: the bound itself is a "much smaller than"
//! condition, so real schedules should be slower by some safety factor.

use std::io::Write;

use rayon::prelude::*;
use thiserror::Error;

use crate::secular::SolverSettings;
use crate::spectrum::energy_gap;
use crate::units::{energy_to_physical, joules_to_nanokelvin, to_trap_units, PhysicalTrapConfig, HBAR};

/// Default fraction of the depth interval trimmed from each end.
pub const DEFAULT_INSET: f64 = 0.01;

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct CullingEstimate {
    /// J
    pub v_start: f64,
    /// J
    pub v_end: f64,
    /// `(V₀, Δ)` in J, ascending in depth.
    pub samples: Vec<(f64, f64)>,
    /// s
    pub t_min: f64,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CullingError {
    #[error("ramp must lower the depth: v_start = {v_start:e} J, v_end = {v_end:e} J")]
    BadRange { v_start: f64, v_end: f64 },
    #[error("need at least 8 samples, got {0}")]
    TooFewSamples(usize),
    #[error("inset fraction must lie in [0, 0.5), got {0}")]
    BadInset(f64),
    #[error("gap undefined at V0 = {depth_nk} nK: {reason}")]
    GapUndefined { depth_nk: f64, reason: String },
}

/// `∫ ħ/Δ² dV` by the trapezoid rule over samples ascending in `V`.
pub fn culling_time_from_profile(samples: &[(f64, f64)]) -> f64 {
    samples
        .windows(2)
        .map(|w| {
            let (v0, g0) = w[0];
            let (v1, g1) = w[1];
            0.5 * (HBAR / (g0 * g0) + HBAR / (g1 * g1)) * (v1 - v0)
        })
        .sum()
}

pub fn min_culling_time(
    config: &PhysicalTrapConfig,
    n: usize,
    v_start: f64,
    v_end: f64,
    sample_count: usize,
    settings: &SolverSettings,
) -> Result<CullingEstimate, CullingError> {
    min_culling_time_with_inset(config, n, v_start, v_end, sample_count, DEFAULT_INSET, settings)
}

/// As [`min_culling_time`], with the end inset (fraction of `v_start − v_end`)
/// given explicitly.
pub fn min_culling_time_with_inset(
    config: &PhysicalTrapConfig,
    n: usize,
    v_start: f64,
    v_end: f64,
    sample_count: usize,
    inset: f64,
    settings: &SolverSettings,
) -> Result<CullingEstimate, CullingError> {
    if !(v_end > 0.0 && v_start > v_end && v_start.is_finite()) {
        return Err(CullingError::BadRange { v_start, v_end });
    }
    if sample_count < 8 {
        return Err(CullingError::TooFewSamples(sample_count));
    }
    if !(0.0..0.5).contains(&inset) {
        return Err(CullingError::BadInset(inset));
    }
    let width = v_start - v_end;
    let lo = v_end + inset * width;
    let hi = v_start - inset * width;
    let depths: Vec<f64> = (0..sample_count)
        .map(|i| lo + (hi - lo) * i as f64 / (sample_count - 1) as f64)
        .collect();
    let gaps: Vec<Result<f64, String>> = depths
        .par_iter()
        .map(|&v| {
            let cfg = PhysicalTrapConfig {
                trap_depth: v,
                ..*config
            };
            let p = to_trap_units(&cfg, n).map_err(|e| e.to_string())?;
            let g = energy_gap(&p, settings).map_err(|e| e.to_string())?;
            let gap = g.gap.ok_or_else(|| "first excited state unbound".to_string())?;
            Ok(energy_to_physical(gap, &cfg))
        })
        .collect();
    let mut samples = Vec::with_capacity(sample_count);
    for (&v, g) in depths.iter().zip(gaps) {
        match g {
            Ok(gap) if gap > 0.0 => samples.push((v, gap)),
            Ok(gap) => {
                return Err(CullingError::GapUndefined {
                    depth_nk: joules_to_nanokelvin(v),
                    reason: format!("non-positive gap {gap:e} J"),
                })
            }
            Err(reason) => {
                return Err(CullingError::GapUndefined {
                    depth_nk: joules_to_nanokelvin(v),
                    reason,
                })
            }
        }
    }
    let t_min = culling_time_from_profile(&samples);
    Ok(CullingEstimate {
        v_start,
        v_end,
        samples,
        t_min,
    })
}

impl CullingEstimate {
    /// `v0_nk,gap_nk` rows, twelve significant digits.
    pub fn write_samples_csv<W: Write>(&self, out: W) -> Result<(), csv::Error> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["v0_nk", "gap_nk"])?;
        for &(v, g) in &self.samples {
            w.write_record([
                format!("{:.11e}", joules_to_nanokelvin(v)),
                format!("{:.11e}", joules_to_nanokelvin(g)),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}
