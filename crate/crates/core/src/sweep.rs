//! Capacity, energy, and gap evaluation over one- and two-dimensional
//! parameter grids.
//!
//! Every cell is solved from scratch with the same settings, so the grid does
//! not depend on evaluation order and parallel runs reproduce serial ones bit
//! for bit.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::capacity::{trap_capacity, Axis};
use crate::secular::{solve_with, QuantumNumbers, SolveOutcome, SolverSettings};
use crate::spectrum::energy_gap;
use crate::units::{energy_to_nanokelvin, joules_to_nanokelvin, to_trap_units, PhysicalTrapConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Scale {
    Linear,
    Log,
}

/// One grid axis: `count` points from `low` to `high` inclusive, SI units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AxisRange {
    pub axis: Axis,
    pub low: f64,
    pub high: f64,
    pub count: usize,
    pub scale: Scale,
}

impl AxisRange {
    pub fn validate(&self) -> Result<(), SweepError> {
        if self.count < 2 {
            return Err(SweepError::Spec(format!("{}: count must be at least 2", self.axis)));
        }
        if !(self.low < self.high) || !self.low.is_finite() || !self.high.is_finite() {
            return Err(SweepError::Spec(format!("{}: need low < high", self.axis)));
        }
        if self.scale == Scale::Log && self.low <= 0.0 {
            return Err(SweepError::Spec(format!("{}: log axis needs low > 0", self.axis)));
        }
        Ok(())
    }

    pub fn points(&self) -> Vec<f64> {
        let last = (self.count - 1) as f64;
        (0..self.count)
            .map(|i| {
                let t = i as f64 / last;
                match self.scale {
                    Scale::Linear => self.low + t * (self.high - self.low),
                    Scale::Log => (self.low.ln() + t * (self.high.ln() - self.low.ln())).exp(),
                }
            })
            .collect()
    }
}

/// What each cell reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    /// Largest particle count up to `n_particles` that binds.
    Capacity,
    /// Total energy of the traced state, nK.
    ETotal,
    /// Highest single-particle energy of the traced state, nK.
    ESingleMax,
    /// Ground to first-excited gap, nK.
    Gap,
}

impl Quantity {
    pub fn name(self) -> &'static str {
        match self {
            Quantity::Capacity => "capacity",
            Quantity::ETotal => "e_total",
            Quantity::ESingleMax => "e_single_max",
            Quantity::Gap => "gap",
        }
    }

    fn column(self) -> &'static str {
        match self {
            Quantity::Capacity => "capacity",
            Quantity::ETotal => "e_total_nk",
            Quantity::ESingleMax => "e_single_max_nk",
            Quantity::Gap => "gap_nk",
        }
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Quantity {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "capacity" => Ok(Quantity::Capacity),
            "e_total" => Ok(Quantity::ETotal),
            "e_single_max" => Ok(Quantity::ESingleMax),
            "gap" => Ok(Quantity::Gap),
            other => Err(format!(
                "unknown quantity {other:?} (expected capacity, e_total, e_single_max or gap)"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridSpec {
    pub x_axis: AxisRange,
    pub y_axis: Option<AxisRange>,
    pub fixed: PhysicalTrapConfig,
    pub quantity: Quantity,
    /// Particle count for energies and gaps; upper limit for capacity.
    pub n_particles: usize,
    /// State traced by `e_total` / `e_single_max`; ground state when absent.
    #[serde(serialize_with = "serialize_qn")]
    pub quantum_numbers: Option<QuantumNumbers>,
    /// Measure energies from the trap bottom (`−V₀` per particle).
    pub shift_to_trap_bottom: bool,
}

fn serialize_qn<S: serde::Serializer>(qn: &Option<QuantumNumbers>, s: S) -> Result<S::Ok, S::Error> {
    qn.as_ref().map(|q| q.as_slice().to_vec()).serialize(s)
}

impl GridSpec {
    pub fn validate(&self) -> Result<(), SweepError> {
        self.x_axis.validate()?;
        if let Some(y) = &self.y_axis {
            y.validate()?;
            if y.axis == self.x_axis.axis {
                return Err(SweepError::Spec("x and y must vary different parameters".into()));
            }
        }
        if self.n_particles == 0 {
            return Err(SweepError::Spec("n_particles must be at least 1".into()));
        }
        if let Some(qn) = &self.quantum_numbers {
            if qn.len() != self.n_particles {
                return Err(SweepError::Spec(format!(
                    "quantum numbers {qn} do not match {} particles",
                    self.n_particles
                )));
            }
        }
        self.fixed.validate().map_err(|e| SweepError::Spec(e.to_string()))
    }

    /// Cell coordinates in row-major order (x fastest).
    pub fn coordinates(&self) -> Vec<(f64, Option<f64>)> {
        let xs = self.x_axis.points();
        match &self.y_axis {
            None => xs.into_iter().map(|x| (x, None)).collect(),
            Some(y) => y
                .points()
                .into_iter()
                .flat_map(|yv| xs.iter().map(move |&x| (x, Some(yv))))
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Cell {
    pub x: f64,
    pub y: Option<f64>,
    pub value: Option<f64>,
    /// Why `value` is absent.
    pub diagnostic: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepGrid {
    pub spec: GridSpec,
    pub settings: SolverSettings,
    pub cells: Vec<Cell>,
}

#[derive(Debug, Error)]
pub enum SweepError {
    #[error("invalid grid: {0}")]
    Spec(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("metadata serialization: {0}")]
    Metadata(#[from] toml::ser::Error),
}

fn evaluate_cell(spec: &GridSpec, settings: &SolverSettings, x: f64, y: Option<f64>) -> Result<f64, String> {
    let mut cfg = spec.x_axis.axis.apply(&spec.fixed, x).map_err(|e| e.to_string())?;
    if let (Some(range), Some(yv)) = (&spec.y_axis, y) {
        cfg = range.axis.apply(&cfg, yv).map_err(|e| e.to_string())?;
    }
    let n = spec.n_particles;
    let p = to_trap_units(&cfg, n).map_err(|e| e.to_string())?;
    match spec.quantity {
        Quantity::Capacity => Ok(trap_capacity(&cfg, n, settings) as f64),
        Quantity::ETotal | Quantity::ESingleMax => {
            let ground;
            let qn = match &spec.quantum_numbers {
                Some(q) => q,
                None => {
                    ground = QuantumNumbers::ground(n);
                    &ground
                }
            };
            let sol = match solve_with(&p, qn, settings) {
                SolveOutcome::Bound(s) => s,
                SolveOutcome::Unbound(d) => return Err(d.reason),
            };
            let (energy, particles) = if spec.quantity == Quantity::ETotal {
                (sol.e_total, n as f64)
            } else {
                (sol.highest_single_energy(), 1.0)
            };
            let shifted = if spec.shift_to_trap_bottom {
                energy + particles * p.well_depth()
            } else {
                energy
            };
            Ok(energy_to_nanokelvin(shifted, &cfg))
        }
        Quantity::Gap => {
            let g = energy_gap(&p, settings).map_err(|e| e.to_string())?;
            g.gap
                .map(|gap| energy_to_nanokelvin(gap, &cfg))
                .ok_or_else(|| "first excited state unbound".to_string())
        }
    }
}

/// Evaluate every cell of `spec`. Failing cells are recorded as absent with
/// a diagnostic and never abort the sweep.
pub fn run_sweep(spec: &GridSpec, settings: &SolverSettings, parallel: bool) -> Result<SweepGrid, SweepError> {
    spec.validate()?;
    let coords = spec.coordinates();
    let eval = |&(x, y): &(f64, Option<f64>)| {
        let (value, diagnostic) = match evaluate_cell(spec, settings, x, y) {
            Ok(v) => (Some(v), None),
            Err(d) => (None, Some(d)),
        };
        Cell {
            x,
            y,
            value,
            diagnostic,
        }
    };
    let cells = if parallel {
        coords.par_iter().map(eval).collect()
    } else {
        coords.iter().map(eval).collect()
    };
    Ok(SweepGrid {
        spec: spec.clone(),
        settings: *settings,
        cells,
    })
}

/// Energy of a fixed Bethe state along a one-dimensional grid.
pub fn spectrum_trace(
    spec: &GridSpec,
    qn: &QuantumNumbers,
    settings: &SolverSettings,
    parallel: bool,
) -> Result<SweepGrid, SweepError> {
    if spec.y_axis.is_some() {
        return Err(SweepError::Spec("spectrum traces are one-dimensional".into()));
    }
    if !matches!(spec.quantity, Quantity::ETotal | Quantity::ESingleMax) {
        return Err(SweepError::Spec(
            "spectrum traces report e_total or e_single_max".into(),
        ));
    }
    let spec = GridSpec {
        quantum_numbers: Some(qn.clone()),
        n_particles: qn.len(),
        ..spec.clone()
    };
    run_sweep(&spec, settings, parallel)
}

/// Axis value in the unit used for output columns.
pub fn display_value(axis: Axis, si: f64) -> f64 {
    match axis {
        Axis::TrapDepth => joules_to_nanokelvin(si),
        Axis::TrapLength | Axis::InteractionStrength => si,
    }
}

pub fn display_column(axis: Axis) -> &'static str {
    match axis {
        Axis::TrapDepth => "trap_depth_nk",
        Axis::TrapLength => "trap_length_m",
        Axis::InteractionStrength => "interaction_strength_per_m",
    }
}

/// JSON number for a formatted decimal, so JSON and CSV agree digit for digit.
pub fn json_number(text: &str) -> serde_json::Value {
    text.parse::<f64>()
        .ok()
        .and_then(serde_json::Number::from_f64)
        .map(serde_json::Value::Number)
        .unwrap_or_else(|| serde_json::Value::String(text.to_string()))
}

/// Twelve significant digits, scientific notation.
pub fn format_number(v: f64) -> String {
    format!("{v:.11e}")
}

impl SweepGrid {
    pub fn header(&self) -> Vec<&'static str> {
        let mut h = vec![display_column(self.spec.x_axis.axis)];
        if let Some(y) = &self.spec.y_axis {
            h.push(display_column(y.axis));
        }
        h.push(self.spec.quantity.column());
        h
    }

    /// Rows as printed: axis values in display units, absent values empty.
    pub fn rows(&self) -> Vec<Vec<String>> {
        self.cells
            .iter()
            .map(|c| {
                let mut row = vec![format_number(display_value(self.spec.x_axis.axis, c.x))];
                if let (Some(y), Some(yv)) = (&self.spec.y_axis, c.y) {
                    row.push(format_number(display_value(y.axis, yv)));
                }
                row.push(match (self.spec.quantity, c.value) {
                    (_, None) => String::new(),
                    (Quantity::Capacity, Some(v)) => format!("{}", v as u64),
                    (_, Some(v)) => format_number(v),
                });
                row
            })
            .collect()
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), SweepError> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(self.header())?;
        for row in self.rows() {
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }

    /// One JSON object per cell, keyed by the CSV column names; numbers carry
    /// the same rounding as the CSV.
    pub fn write_json_lines<W: Write>(&self, mut out: W) -> Result<(), SweepError> {
        let header = self.header();
        for (row, cell) in self.rows().into_iter().zip(&self.cells) {
            let mut obj = serde_json::Map::new();
            for (i, (name, text)) in header.iter().zip(row).enumerate() {
                let value = if i + 1 == header.len() && cell.value.is_none() {
                    serde_json::Value::Null
                } else {
                    json_number(&text)
                };
                obj.insert((*name).to_string(), value);
            }
            if let Some(d) = &cell.diagnostic {
                obj.insert("diagnostic".into(), serde_json::Value::String(d.clone()));
            }
            writeln!(out, "{}", serde_json::Value::Object(obj))?;
        }
        Ok(())
    }

    /// Grid specification and solver settings as TOML.
    pub fn metadata_toml(&self) -> Result<String, SweepError> {
        #[derive(Serialize)]
        struct Metadata<'a> {
            spec: &'a GridSpec,
            solver: &'a SolverSettings,
            absent_cells: usize,
        }
        Ok(toml::to_string(&Metadata {
            spec: &self.spec,
            solver: &self.settings,
            absent_cells: self.cells.iter().filter(|c| c.value.is_none()).count(),
        })?)
    }
}
