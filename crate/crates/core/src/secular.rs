//! Secular equations for the Bethe wave numbers of `N` bosons in a finite
//! square well, and the continuation solver that tracks their roots from the
//! Tonks-Girardeau limit down to the requested interaction strength.
//!
//! In trap units the equation for wave number `k_j` reads
//!
//! ```text
//! F_j(k) = k_j − π I_j + 2 asin(k_j/k̂₀)
//!        + Σ_{l≠j} [atan((k_j+k_l)/ĉ) + atan((k_j−k_l)/ĉ)] = 0
//! ```
//!
//! A state is bound when every root is real with `0 < k_j < k̂₀`, so that each
//! conjugate `κ_j = √(k̂₀² − k_j²)` is real and the amplitude decays outside
//! the well. See `docs/secular-equations.md` for how this form follows from
//! the equation in `1/c` length units.

use std::f64::consts::PI;
use std::fmt;

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::units::{InteractionUnitsProblem, TrapUnitsProblem};

/// Slack allowed on the asin argument before a wave number is declared to
/// have left the well.
pub const ASIN_SLACK: f64 = 1e-12;

/// Sorted, distinct, positive integers labelling a Bethe state.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QuantumNumbers(Vec<u32>);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QuantumNumberViolation {
    #[error("quantum-number set is empty")]
    Empty,
    #[error("quantum number {0} is not positive")]
    NonPositive(i64),
    #[error("quantum number {0} appears more than once")]
    Duplicate(i64),
    #[error("quantum number {0} is out of range")]
    TooLarge(i64),
}

/// Accepts iff the set is non-empty and, after sorting, strictly ascending
/// with every entry at least 1.
pub fn validate_quantum_numbers(values: &[i64]) -> Result<(), QuantumNumberViolation> {
    if values.is_empty() {
        return Err(QuantumNumberViolation::Empty);
    }
    let mut sorted = values.to_vec();
    sorted.sort_unstable();
    if sorted[0] < 1 {
        return Err(QuantumNumberViolation::NonPositive(sorted[0]));
    }
    if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
        return Err(QuantumNumberViolation::Duplicate(w[0]));
    }
    let last = *sorted.last().unwrap();
    if last > u32::MAX as i64 {
        return Err(QuantumNumberViolation::TooLarge(last));
    }
    Ok(())
}

impl QuantumNumbers {
    pub fn new(values: &[i64]) -> Result<Self, QuantumNumberViolation> {
        validate_quantum_numbers(values)?;
        let mut v: Vec<u32> = values.iter().map(|&x| x as u32).collect();
        v.sort_unstable();
        Ok(Self(v))
    }

    /// `{1, 2, …, n}`
    pub fn ground(n: usize) -> Self {
        assert!(n >= 1);
        Self((1..=n as u32).collect())
    }

    /// `{1, 2, …, n−1, n+1}`
    pub fn first_excited(n: usize) -> Self {
        assert!(n >= 1);
        let mut v: Vec<u32> = (1..n as u32).collect();
        v.push(n as u32 + 1);
        Self(v)
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn highest(&self) -> u32 {
        *self.0.last().unwrap()
    }
}

impl fmt::Display for QuantumNumbers {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|i| i.to_string()).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

impl std::str::FromStr for QuantumNumbers {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let values = s
            .trim_matches(|c| c == '{' || c == '}')
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<i64>()
                    .map_err(|e| format!("bad quantum number {t:?}: {e}"))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(&values).map_err(|e| e.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SecularError {
    #[error("wave number k[{index}] = {k} is not below the well wave number {k0}")]
    OutsideWell { index: usize, k: f64, k0: f64 },
    #[error("non-finite input in wave numbers or problem parameters")]
    NonFinite,
    #[error("expected {expected} wave numbers, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("kappa[{index}] vanishes: derivative is singular at the ionization boundary")]
    SingularDerivative { index: usize },
}

/// A particular secular system: residual, Jacobian, and the upper bound on
/// each wave number (the well wave number in that system's units).
pub trait SecularSystem {
    fn dimension(&self) -> usize;
    fn well_wavenumber(&self) -> f64;
    fn residual(&self, k: &[f64]) -> Result<Vec<f64>, SecularError>;
    fn jacobian(&self, k: &[f64]) -> Result<DMatrix<f64>, SecularError>;
}

fn check_inputs(k: &[f64], n: usize, params: &[f64]) -> Result<(), SecularError> {
    if k.len() != n {
        return Err(SecularError::DimensionMismatch {
            expected: n,
            got: k.len(),
        });
    }
    if k.iter().chain(params).any(|x| !x.is_finite()) {
        return Err(SecularError::NonFinite);
    }
    Ok(())
}

/// `k/k₀` clamped into `[0, 1]` when within [`ASIN_SLACK`].
fn asin_ratio(index: usize, k: f64, k0: f64) -> Result<f64, SecularError> {
    let r = k / k0;
    if !(-ASIN_SLACK..=1.0 + ASIN_SLACK).contains(&r) {
        return Err(SecularError::OutsideWell { index, k, k0 });
    }
    Ok(r.clamp(0.0, 1.0))
}

/// Shared body of both unit systems: `scale·k_j − πI_j + 2 asin(k_j/k₀) +
/// Σ atan((k_j±k_l)/g)`.
fn secular_residual(k: &[f64], qn: &[u32], scale: f64, k0: f64, g: f64) -> Result<Vec<f64>, SecularError> {
    let mut out = Vec::with_capacity(k.len());
    for (j, (&kj, &ij)) in k.iter().zip(qn).enumerate() {
        let r = asin_ratio(j, kj, k0)?;
        let scattering: f64 = k
            .iter()
            .enumerate()
            .filter(|&(l, _)| l != j)
            .map(|(_, &kl)| ((kj + kl) / g).atan() + ((kj - kl) / g).atan())
            .sum();
        out.push(scale * kj - PI * ij as f64 + 2.0 * r.asin() + scattering);
    }
    Ok(out)
}

fn secular_jacobian(k: &[f64], scale: f64, k0: f64, g: f64) -> Result<DMatrix<f64>, SecularError> {
    let n = k.len();
    let mut jac = DMatrix::zeros(n, n);
    let g2 = g * g;
    for j in 0..n {
        asin_ratio(j, k[j], k0)?;
        let kappa = (k0 * k0 - k[j] * k[j]).max(0.0).sqrt();
        if kappa == 0.0 {
            return Err(SecularError::SingularDerivative { index: j });
        }
        let mut diag = scale + 2.0 / kappa;
        for l in 0..n {
            if l == j {
                continue;
            }
            let plus = g / (g2 + (k[j] + k[l]).powi(2));
            let minus = g / (g2 + (k[j] - k[l]).powi(2));
            diag += plus + minus;
            jac[(j, l)] = plus - minus;
        }
        jac[(j, j)] = diag;
    }
    Ok(jac)
}

/// Secular system in trap units for a fixed quantum-number set.
#[derive(Debug, Clone, Copy)]
pub struct TrapUnitsSystem<'a> {
    pub problem: TrapUnitsProblem,
    pub qn: &'a QuantumNumbers,
}

impl SecularSystem for TrapUnitsSystem<'_> {
    fn dimension(&self) -> usize {
        self.qn.len()
    }

    fn well_wavenumber(&self) -> f64 {
        self.problem.k0_hat
    }

    fn residual(&self, k: &[f64]) -> Result<Vec<f64>, SecularError> {
        residual(k, self.qn, &self.problem)
    }

    fn jacobian(&self, k: &[f64]) -> Result<DMatrix<f64>, SecularError> {
        jacobian(k, self.qn, &self.problem)
    }
}

/// Secular system with `1/c` as the length unit:
/// `x₀k_j − πI_j + 2 asin(k_j/k₀) + Σ [atan(k_j+k_l) + atan(k_j−k_l)]`.
#[derive(Debug, Clone, Copy)]
pub struct InteractionUnitsSystem<'a> {
    pub problem: InteractionUnitsProblem,
    pub qn: &'a QuantumNumbers,
}

impl SecularSystem for InteractionUnitsSystem<'_> {
    fn dimension(&self) -> usize {
        self.qn.len()
    }

    fn well_wavenumber(&self) -> f64 {
        self.problem.k0
    }

    fn residual(&self, k: &[f64]) -> Result<Vec<f64>, SecularError> {
        let p = &self.problem;
        check_inputs(k, self.qn.len(), &[p.x0, p.k0])?;
        secular_residual(k, self.qn.as_slice(), p.x0, p.k0, 1.0)
    }

    fn jacobian(&self, k: &[f64]) -> Result<DMatrix<f64>, SecularError> {
        let p = &self.problem;
        check_inputs(k, self.qn.len(), &[p.x0, p.k0])?;
        secular_jacobian(k, p.x0, p.k0, 1.0)
    }
}

/// Secular residual vector in trap units.
pub fn residual(k: &[f64], qn: &QuantumNumbers, p: &TrapUnitsProblem) -> Result<Vec<f64>, SecularError> {
    check_inputs(k, qn.len(), &[p.c_hat, p.k0_hat])?;
    secular_residual(k, qn.as_slice(), 1.0, p.k0_hat, p.c_hat)
}

/// Analytic Jacobian `∂F_j/∂k_l` of [`residual`].
pub fn jacobian(k: &[f64], qn: &QuantumNumbers, p: &TrapUnitsProblem) -> Result<DMatrix<f64>, SecularError> {
    check_inputs(k, qn.len(), &[p.c_hat, p.k0_hat])?;
    secular_jacobian(k, 1.0, p.k0_hat, p.c_hat)
}

/// Root of `k + 2 asin(k/k₀) = πI` on `(0, k₀)`, or `None` when
/// `πI ≥ k₀ + π`.
pub fn single_particle_wavenumber(quantum_number: u32, k0: f64) -> Option<f64> {
    let target = PI * quantum_number as f64;
    let g = |k: f64| k + 2.0 * (k / k0).min(1.0).asin() - target;
    if !(k0 > 0.0) || g(k0) <= 0.0 {
        return None;
    }
    let (mut lo, mut hi) = (0.0f64, k0);
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// Quantum number with no root in the Tonks limit.
#[derive(Debug, Clone, Copy, PartialEq, Error)]
#[error("no Tonks-limit root for quantum number {quantum_number}: π·{quantum_number} ≥ k̂₀ + π with k̂₀ = {k0_hat}")]
pub struct TonksUnbound {
    pub quantum_number: u32,
    pub k0_hat: f64,
}

/// Wave numbers at infinite repulsion, where the equations decouple into
/// single-particle quantization conditions.
pub fn solve_tonks_limit(qn: &QuantumNumbers, k0_hat: f64) -> Result<Vec<f64>, TonksUnbound> {
    qn.as_slice()
        .iter()
        .map(|&i| {
            single_particle_wavenumber(i, k0_hat).ok_or(TonksUnbound {
                quantum_number: i,
                k0_hat,
            })
        })
        .collect()
}

/// Knobs of the continuation/Newton solver.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SolverSettings {
    /// ∞-norm residual tolerance for a converged Newton solve.
    pub tolerance: f64,
    /// Nominal number of log-spaced steps in ĉ.
    pub continuation_steps: usize,
    pub max_newton_iterations: usize,
    /// Smallest continuation step, as a fraction of the whole path, before
    /// giving up.
    pub min_relative_step: f64,
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self {
            tolerance: 1e-10,
            continuation_steps: 40,
            max_newton_iterations: 50,
            min_relative_step: 1e-6,
        }
    }
}

/// Converged bound Bethe state.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct BetheSolution {
    pub quantum_numbers: Vec<u32>,
    pub k: Vec<f64>,
    pub kappa: Vec<f64>,
    pub e_single: Vec<f64>,
    pub e_total: f64,
    pub residual_norm: f64,
    pub newton_iterations: usize,
    pub continuation_steps: usize,
    /// False if the total energy rose at some step while ĉ was decreasing.
    pub energy_monotone: bool,
}

impl BetheSolution {
    pub fn from_wavenumbers(
        qn: &QuantumNumbers,
        k: Vec<f64>,
        k0_hat: f64,
        residual_norm: f64,
        newton_iterations: usize,
        continuation_steps: usize,
    ) -> Self {
        let kappa: Vec<f64> = k
            .iter()
            .map(|&kj| (k0_hat * k0_hat - kj * kj).max(0.0).sqrt())
            .collect();
        let e_single = kappa.iter().map(|&x| -0.5 * x * x).collect();
        let e_total = total_energy(&k, k0_hat);
        Self {
            quantum_numbers: qn.as_slice().to_vec(),
            k,
            kappa,
            e_single,
            e_total,
            residual_norm,
            newton_iterations,
            continuation_steps,
            energy_monotone: true,
        }
    }

    /// Highest single-particle energy `e_N` (closest to the continuum).
    pub fn highest_single_energy(&self) -> f64 {
        *self.e_single.last().unwrap()
    }
}

/// `Σ (k_j² − k̂₀²)/2`
pub fn total_energy(k: &[f64], k0_hat: f64) -> f64 {
    k.iter().map(|&kj| 0.5 * (kj * kj - k0_hat * k0_hat)).sum()
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct UnboundDiagnostic {
    pub reason: String,
    /// Interaction strength of the last converged continuation point, if any.
    pub last_c_hat: Option<f64>,
    /// Well wave number of the last converged continuation point, if any.
    pub last_k0_hat: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SolveOutcome {
    Bound(BetheSolution),
    Unbound(UnboundDiagnostic),
}

impl SolveOutcome {
    pub fn is_bound(&self) -> bool {
        matches!(self, SolveOutcome::Bound(_))
    }

    pub fn bound(&self) -> Option<&BetheSolution> {
        match self {
            SolveOutcome::Bound(s) => Some(s),
            SolveOutcome::Unbound(_) => None,
        }
    }

    pub fn into_bound(self) -> Option<BetheSolution> {
        match self {
            SolveOutcome::Bound(s) => Some(s),
            SolveOutcome::Unbound(_) => None,
        }
    }
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Strictly ascending and strictly inside `(0, k₀(1 − slack))`.
fn admissible(k: &[f64], k0: f64) -> bool {
    let upper = k0 * (1.0 - ASIN_SLACK);
    k.iter().all(|&x| x > 0.0 && x < upper) && k.windows(2).all(|w| w[0] < w[1])
}

#[derive(Debug, Clone, PartialEq)]
pub struct NewtonReport {
    pub k: Vec<f64>,
    pub residual_norm: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NewtonFailure {
    #[error("seed is not admissible: {0}")]
    BadSeed(String),
    #[error("line search stalled at residual {residual_norm:e} after {iterations} iterations")]
    Stalled { residual_norm: f64, iterations: usize },
    #[error("singular Jacobian after {iterations} iterations")]
    Singular { iterations: usize },
    #[error("iteration cap reached with residual {residual_norm:e}")]
    IterationLimit { residual_norm: f64 },
}

/// Damped Newton iteration. A step is halved until the trial point stays
/// admissible and lowers the residual ∞-norm.
pub fn newton<S: SecularSystem>(
    system: &S,
    seed: &[f64],
    tolerance: f64,
    max_iterations: usize,
) -> Result<NewtonReport, NewtonFailure> {
    let k0 = system.well_wavenumber();
    if !admissible(seed, k0) {
        return Err(NewtonFailure::BadSeed(format!("{seed:?} vs k0 = {k0}")));
    }
    let mut k = seed.to_vec();
    let mut f = system.residual(&k).map_err(|e| NewtonFailure::BadSeed(e.to_string()))?;
    let mut norm = inf_norm(&f);
    for iter in 0..=max_iterations {
        if norm <= tolerance {
            return Ok(NewtonReport {
                k,
                residual_norm: norm,
                iterations: iter,
            });
        }
        if iter == max_iterations {
            break;
        }
        let jac = system
            .jacobian(&k)
            .map_err(|_| NewtonFailure::Singular { iterations: iter })?;
        let rhs = -DVector::from_vec(f.clone());
        let delta = jac
            .lu()
            .solve(&rhs)
            .ok_or(NewtonFailure::Singular { iterations: iter })?;
        let mut lambda = 1.0;
        let accepted = loop {
            let trial: Vec<f64> = k.iter().zip(delta.iter()).map(|(a, d)| a + lambda * d).collect();
            if admissible(&trial, k0) {
                if let Ok(ft) = system.residual(&trial) {
                    let nt = inf_norm(&ft);
                    if nt < norm {
                        break Some((trial, ft, nt));
                    }
                }
            }
            lambda *= 0.5;
            if lambda < 1e-12 {
                break None;
            }
        };
        match accepted {
            Some((trial, ft, nt)) => {
                k = trial;
                f = ft;
                norm = nt;
            }
            None => {
                return Err(NewtonFailure::Stalled {
                    residual_norm: norm,
                    iterations: iter,
                })
            }
        }
    }
    Err(NewtonFailure::IterationLimit { residual_norm: norm })
}

/// Interaction strength at which continuation starts.
pub fn continuation_start(c_hat: f64) -> f64 {
    1e6f64.max(1e3 * c_hat)
}

/// Solve with default settings.
pub fn solve(p: &TrapUnitsProblem, qn: &QuantumNumbers) -> SolveOutcome {
    solve_with(p, qn, &SolverSettings::default())
}

/// Track the state labelled by `qn` from the Tonks limit to `p.c_hat`.
///
/// Leg one lowers ĉ from [`continuation_start`] to the target on a log grid,
/// Newton-solving at each step from the previous root. If the Tonks limit has
/// no root at `p.k0_hat`, leg one runs in a deeper well, and leg two then
/// raises the well floor back to `p.k0_hat` at fixed ĉ.
pub fn solve_with(p: &TrapUnitsProblem, qn: &QuantumNumbers, settings: &SolverSettings) -> SolveOutcome {
    if qn.len() != p.n_particles {
        return SolveOutcome::Unbound(UnboundDiagnostic {
            reason: format!("{} quantum numbers given for {} particles", qn.len(), p.n_particles),
            last_c_hat: None,
            last_k0_hat: None,
        });
    }
    let c_start = continuation_start(p.c_hat);
    let (k0_leg1, seed) = match solve_tonks_limit(qn, p.k0_hat) {
        Ok(k) => (p.k0_hat, k),
        Err(_) => {
            let deeper = PI * qn.highest() as f64;
            match solve_tonks_limit(qn, deeper) {
                Ok(k) => (deeper, k),
                Err(e) => {
                    return SolveOutcome::Unbound(UnboundDiagnostic {
                        reason: e.to_string(),
                        last_c_hat: None,
                        last_k0_hat: None,
                    })
                }
            }
        }
    };

    let mut tracker = Tracker {
        qn,
        settings,
        k: seed,
        newton_iterations: 0,
        steps: 0,
        energy_monotone: true,
        last: None,
        residual_norm: f64::NAN,
    };

    let log_start = c_start.ln();
    let log_end = p.c_hat.ln();
    let leg1 = |t: f64| TrapUnitsProblem {
        c_hat: (log_start + t * (log_end - log_start)).exp(),
        k0_hat: k0_leg1,
        n_particles: p.n_particles,
    };
    if let Err(d) = tracker.run(leg1, true) {
        return SolveOutcome::Unbound(d);
    }
    if k0_leg1 != p.k0_hat {
        let leg2 = |t: f64| TrapUnitsProblem {
            c_hat: p.c_hat,
            k0_hat: k0_leg1 + t * (p.k0_hat - k0_leg1),
            n_particles: p.n_particles,
        };
        if let Err(d) = tracker.run(leg2, false) {
            return SolveOutcome::Unbound(d);
        }
    }

    let mut sol = BetheSolution::from_wavenumbers(
        qn,
        tracker.k,
        p.k0_hat,
        tracker.residual_norm,
        tracker.newton_iterations,
        tracker.steps,
    );
    sol.energy_monotone = tracker.energy_monotone;
    SolveOutcome::Bound(sol)
}

struct Tracker<'a> {
    qn: &'a QuantumNumbers,
    settings: &'a SolverSettings,
    k: Vec<f64>,
    newton_iterations: usize,
    steps: usize,
    energy_monotone: bool,
    last: Option<TrapUnitsProblem>,
    residual_norm: f64,
}

impl Tracker<'_> {
    /// Follow `path(t)` for `t ∈ [0, 1]`, halving the step on Newton failure
    /// and doubling it back (up to the nominal size) after each success.
    fn run<P>(&mut self, path: P, check_energy: bool) -> Result<(), UnboundDiagnostic>
    where
        P: Fn(f64) -> TrapUnitsProblem,
    {
        let nominal = 1.0 / self.settings.continuation_steps.max(1) as f64;
        let mut t = 0.0;
        let mut dt = nominal;
        let mut energy = f64::INFINITY;
        // t = 0 is solved first so that the seed is polished at the path start.
        let mut first = true;
        while first || t < 1.0 {
            let t_next = if first { 0.0 } else { (t + dt).min(1.0) };
            let problem = path(t_next);
            let system = TrapUnitsSystem { problem, qn: self.qn };
            match newton(
                &system,
                &self.k,
                self.settings.tolerance,
                self.settings.max_newton_iterations,
            ) {
                Ok(report) => {
                    self.newton_iterations += report.iterations;
                    self.steps += 1;
                    self.residual_norm = report.residual_norm;
                    self.k = report.k;
                    self.last = Some(problem);
                    let e = total_energy(&self.k, problem.k0_hat);
                    if check_energy && e > energy + 1e-12 * energy.abs().max(1.0) {
                        self.energy_monotone = false;
                    }
                    energy = e;
                    t = t_next;
                    first = false;
                    dt = (2.0 * dt).min(nominal);
                }
                Err(failure) => {
                    if first {
                        return Err(self.diagnostic(format!("start of path: {failure}")));
                    }
                    dt *= 0.5;
                    if dt < self.settings.min_relative_step {
                        return Err(self.diagnostic(format!(
                            "continuation step fell below {:e}: {failure}",
                            self.settings.min_relative_step
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    fn diagnostic(&self, reason: String) -> UnboundDiagnostic {
        UnboundDiagnostic {
            reason,
            last_c_hat: self.last.map(|p| p.c_hat),
            last_k0_hat: self.last.map(|p| p.k0_hat),
        }
    }
}
