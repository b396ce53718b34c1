//! Reference computations that do not go through the secular equations:
//! textbook single-particle levels of the finite well, and a brute-force
//! finite-difference ground state for two particles.
//!
//! These exist to cross-check the Bethe solver and back the `verify`
//! subcommand.

use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::DMatrix;
use thiserror::Error;

use crate::units::TrapUnitsProblem;

/// Central-difference Jacobian of a vector function, column by column.
pub fn central_difference_jacobian<F, E>(f: F, x: &[f64], step: f64) -> Result<DMatrix<f64>, E>
where
    F: Fn(&[f64]) -> Result<Vec<f64>, E>,
{
    let n = x.len();
    let mut jac = DMatrix::zeros(n, n);
    let mut probe = x.to_vec();
    for l in 0..n {
        probe[l] = x[l] + step;
        let plus = f(&probe)?;
        probe[l] = x[l] - step;
        let minus = f(&probe)?;
        probe[l] = x[l];
        for j in 0..plus.len() {
            jac[(j, l)] = (plus[j] - minus[j]) / (2.0 * step);
        }
    }
    Ok(jac)
}

/// Bound levels of a single particle in the well `|x| < 1/2` of depth
/// `k̂₀²/2` (trap units), ascending, at most `n_levels` of them.
///
/// Even states satisfy `z tan z = √(z₀² − z²)`, odd states
/// `−z cot z = √(z₀² − z²)`, with `z = k/2` and `z₀ = k̂₀/2`. Each branch has
/// at most one root per half period, found by bisection.
pub fn single_particle_levels(k0_hat: f64, n_levels: usize) -> Vec<f64> {
    let z0 = 0.5 * k0_hat;
    let mut levels = Vec::new();
    if !(z0 > 0.0) {
        return levels;
    }
    let barrier = |z: f64| (z0 * z0 - z * z).max(0.0).sqrt();
    let even = |z: f64| z * z.tan() - barrier(z);
    let odd = |z: f64| -z / z.tan() - barrier(z);
    for level in 0..n_levels {
        let start = level as f64 * FRAC_PI_2;
        if start >= z0 {
            break;
        }
        let end = (start + FRAC_PI_2).min(z0);
        let z = if level % 2 == 0 {
            bisect(even, start, end)
        } else {
            bisect(odd, start, end)
        };
        let k = 2.0 * z;
        levels.push(0.5 * (k * k - k0_hat * k0_hat));
    }
    levels
}

/// Sign-change bisection on `(lo, hi)` for `f` negative at `lo`, positive
/// towards `hi` (possibly through a pole).
fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64) -> f64 {
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return mid;
        }
        let v = f(mid);
        if v < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
}

/// Discretisation of the two-particle problem on a square box.
///
/// Cell-centred grid with `points_per_dimension` cells across
/// `[-domain_half_width, domain_half_width]`; Dirichlet walls at the box
/// edge. The contact term contributes `ĉ/h` on the diagonal `x₁ = x₂`. The
/// well edges `±1/2` fall on cell faces when `(domain_half_width − 1/2)/h` is
/// an integer, and the energy error is then O(h²).
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct FdGridSpec {
    pub points_per_dimension: usize,
    pub domain_half_width: f64,
}

impl FdGridSpec {
    pub fn spacing(&self) -> f64 {
        2.0 * self.domain_half_width / self.points_per_dimension as f64
    }

    pub fn refined(&self) -> Self {
        Self {
            points_per_dimension: 2 * self.points_per_dimension,
            ..*self
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("grid needs at least 64 points per dimension, got {0}")]
    TooFewPoints(usize),
    #[error("domain half width {0} does not enclose the well")]
    DomainTooSmall(f64),
    #[error("finite-difference oracle handles exactly 2 particles, got {0}")]
    NotTwoBody(usize),
    #[error("eigen-iteration did not converge in {iterations} steps (residual estimate {residual:e})")]
    NotConverged { iterations: usize, residual: f64 },
}

/// Ground energy of the discretised two-particle Hamiltonian
/// `−½(∂₁² + ∂₂²) + V(x₁) + V(x₂) + ĉ δ(x₁ − x₂)` in trap units.
///
/// The smallest eigenvalue comes from a Lanczos recurrence started on an
/// exchange-symmetric vector, so the iteration stays in the bosonic sector.
pub fn fd_two_body_energy(p: &TrapUnitsProblem, spec: &FdGridSpec) -> Result<f64, OracleError> {
    if p.n_particles != 2 {
        return Err(OracleError::NotTwoBody(p.n_particles));
    }
    if spec.points_per_dimension < 64 {
        return Err(OracleError::TooFewPoints(spec.points_per_dimension));
    }
    if !(spec.domain_half_width > 0.5) {
        return Err(OracleError::DomainTooSmall(spec.domain_half_width));
    }
    let op = TwoBodyOperator::new(p, spec);
    op.lowest_eigenvalue(1e-11, 40_000)
}

/// Richardson extrapolation of two results at spacings `h` and `h/2` with
/// leading error `O(h^order)`.
pub fn richardson(coarse: f64, fine: f64, order: u32) -> f64 {
    let factor = 2f64.powi(order as i32);
    (factor * fine - coarse) / (factor - 1.0)
}

/// Leading error order observed for this discretisation: successive grid
/// halvings shrink the energy difference by a factor close to 4.
pub const FD_ERROR_ORDER: u32 = 2;

/// Ground energy at `spec` and at twice the resolution, extrapolated with
/// [`FD_ERROR_ORDER`].
pub fn fd_two_body_extrapolated(p: &TrapUnitsProblem, spec: &FdGridSpec) -> Result<f64, OracleError> {
    let coarse = fd_two_body_energy(p, spec)?;
    let fine = fd_two_body_energy(p, &spec.refined())?;
    Ok(richardson(coarse, fine, FD_ERROR_ORDER))
}

struct TwoBodyOperator {
    n: usize,
    inv_h2: f64,
    potential: Vec<f64>,
    contact: f64,
}

impl TwoBodyOperator {
    fn new(p: &TrapUnitsProblem, spec: &FdGridSpec) -> Self {
        let n = spec.points_per_dimension;
        let h = spec.spacing();
        let floor = -0.5 * p.k0_hat * p.k0_hat;
        let potential = (0..n)
            .map(|i| {
                let x = -spec.domain_half_width + (i as f64 + 0.5) * h;
                if x.abs() < 0.5 {
                    floor
                } else {
                    0.0
                }
            })
            .collect();
        Self {
            n,
            inv_h2: 1.0 / (h * h),
            potential,
            contact: p.c_hat / h,
        }
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        let n = self.n;
        let half = 0.5 * self.inv_h2;
        for i in 0..n {
            for j in 0..n {
                let idx = i * n + j;
                let mut neighbours = 0.0;
                if i > 0 {
                    neighbours += x[idx - n];
                }
                if i + 1 < n {
                    neighbours += x[idx + n];
                }
                if j > 0 {
                    neighbours += x[idx - 1];
                }
                if j + 1 < n {
                    neighbours += x[idx + 1];
                }
                let mut diag = 4.0 * half + self.potential[i] + self.potential[j];
                if i == j {
                    diag += self.contact;
                }
                y[idx] = diag * x[idx] - half * neighbours;
            }
        }
    }

    fn lowest_eigenvalue(&self, tol: f64, max_iter: usize) -> Result<f64, OracleError> {
        let n = self.n;
        let dim = n * n;
        // symmetric, positive start vector
        let profile: Vec<f64> = (0..n).map(|i| (PI * (i as f64 + 0.5) / n as f64).sin()).collect();
        let mut v: Vec<f64> = (0..dim).map(|idx| profile[idx / n] * profile[idx % n]).collect();
        normalise(&mut v);
        let mut v_prev = vec![0.0; dim];
        let mut w = vec![0.0; dim];
        let mut alpha = Vec::new();
        let mut beta: Vec<f64> = Vec::new();
        let mut last = f64::INFINITY;
        let check_every = 25;
        for iter in 1..=max_iter {
            self.apply(&v, &mut w);
            let a = dot(&w, &v);
            let b_prev = beta.last().copied().unwrap_or(0.0);
            for ((wi, vi), pi) in w.iter_mut().zip(&v).zip(&v_prev) {
                *wi -= a * vi + b_prev * pi;
            }
            alpha.push(a);
            let b = dot(&w, &w).sqrt();
            if iter % check_every == 0 || b < 1e-14 {
                let lambda = tridiagonal_lowest(&alpha, &beta);
                let residual = b * ritz_last_component(&alpha, &beta, lambda).abs();
                let scale = lambda.abs().max(1.0);
                if residual <= tol * scale || ((lambda - last).abs() <= tol * scale && residual <= 1e-6 * scale) {
                    return Ok(lambda);
                }
                if b < 1e-14 {
                    return Err(OracleError::NotConverged {
                        iterations: iter,
                        residual,
                    });
                }
                last = lambda;
            }
            beta.push(b);
            std::mem::swap(&mut v_prev, &mut v);
            for (vi, wi) in v.iter_mut().zip(&w) {
                *vi = wi / b;
            }
        }
        let lambda = tridiagonal_lowest(&alpha, &beta[..alpha.len() - 1]);
        let residual =
            beta.last().copied().unwrap_or(0.0) * ritz_last_component(&alpha, &beta[..alpha.len() - 1], lambda).abs();
        Err(OracleError::NotConverged {
            iterations: max_iter,
            residual,
        })
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn normalise(v: &mut [f64]) {
    let norm = dot(v, v).sqrt();
    v.iter_mut().for_each(|x| *x /= norm);
}

/// Number of eigenvalues of the symmetric tridiagonal matrix below `x`
/// (Sturm sequence count).
fn sturm_count(alpha: &[f64], beta: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut q = 1.0;
    for i in 0..alpha.len() {
        let b2 = if i == 0 { 0.0 } else { beta[i - 1] * beta[i - 1] };
        q = alpha[i] - x - if i == 0 { 0.0 } else { b2 / q };
        if q == 0.0 {
            q = -f64::EPSILON * (alpha[i].abs() + x.abs()).max(1.0);
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

fn tridiagonal_lowest(alpha: &[f64], beta: &[f64]) -> f64 {
    // Gershgorin bounds
    let m = alpha.len();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..m {
        let r = if i > 0 { beta[i - 1].abs() } else { 0.0 } + if i + 1 < m { beta[i].abs() } else { 0.0 };
        lo = lo.min(alpha[i] - r);
        hi = hi.max(alpha[i] + r);
    }
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return mid;
        }
        if sturm_count(alpha, beta, mid) >= 1 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
}

/// Last component of the normalised eigenvector of the tridiagonal matrix
/// for eigenvalue `lambda`, via two steps of inverse iteration.
fn ritz_last_component(alpha: &[f64], beta: &[f64], lambda: f64) -> f64 {
    let m = alpha.len();
    let shift = lambda - 1e-10 * lambda.abs().max(1.0);
    let mut x = vec![1.0; m];
    for _ in 0..3 {
        x = solve_tridiagonal(alpha, beta, shift, &x);
        let norm = dot(&x, &x).sqrt();
        x.iter_mut().for_each(|v| *v /= norm);
    }
    x[m - 1]
}

/// Solve `(T − shift·I) x = rhs` by Gaussian elimination without pivoting.
fn solve_tridiagonal(alpha: &[f64], beta: &[f64], shift: f64, rhs: &[f64]) -> Vec<f64> {
    let m = alpha.len();
    let mut diag: Vec<f64> = alpha.iter().map(|a| a - shift).collect();
    let mut r = rhs.to_vec();
    for i in 1..m {
        let f = beta[i - 1] / diag[i - 1];
        diag[i] -= f * beta[i - 1];
        r[i] -= f * r[i - 1];
    }
    let mut x = vec![0.0; m];
    x[m - 1] = r[m - 1] / diag[m - 1];
    for i in (0..m - 1).rev() {
        x[i] = (r[i] - beta[i] * x[i + 1]) / diag[i];
    }
    x
}
