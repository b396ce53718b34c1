//! Ground and first-excited Bethe states and the excitation gap between them.
//!
//! Only these two states are ranked. Anything higher has to be requested with
//! an explicit quantum-number set through [`crate::secular::solve_with`].

use thiserror::Error;

use crate::secular::{solve_with, BetheSolution, QuantumNumbers, SolveOutcome, SolverSettings, UnboundDiagnostic};
use crate::units::TrapUnitsProblem;

/// Quantum numbers `{1, …, N}`.
pub fn ground_state(p: &TrapUnitsProblem, settings: &SolverSettings) -> SolveOutcome {
    solve_with(p, &QuantumNumbers::ground(p.n_particles), settings)
}

/// Quantum numbers `{1, …, N−1, N+1}`.
pub fn first_excited(p: &TrapUnitsProblem, settings: &SolverSettings) -> SolveOutcome {
    solve_with(p, &QuantumNumbers::first_excited(p.n_particles), settings)
}

#[derive(Debug, Clone, PartialEq)]
pub struct GapResult {
    pub ground: BetheSolution,
    pub excited: Option<BetheSolution>,
    /// `excited.e_total − ground.e_total`, trap units.
    pub gap: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectrumError {
    #[error("no bound ground state: {}", .0.reason)]
    GroundUnbound(UnboundDiagnostic),
}

pub fn energy_gap(p: &TrapUnitsProblem, settings: &SolverSettings) -> Result<GapResult, SpectrumError> {
    let (ground, excited) = rayon::join(|| ground_state(p, settings), || first_excited(p, settings));
    let ground = match ground {
        SolveOutcome::Bound(s) => s,
        SolveOutcome::Unbound(d) => return Err(SpectrumError::GroundUnbound(d)),
    };
    let excited = excited.into_bound();
    let gap = excited.as_ref().map(|e| e.e_total - ground.e_total);
    Ok(GapResult { ground, excited, gap })
}
