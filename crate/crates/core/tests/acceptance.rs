//! Acceptance suite. Every test writes one `criterion N: PASS|FAIL ...` line
//! straight to stdout, so the verdicts show up even for passing tests, and
//! then asserts the same condition.

mod common;

use std::io::Write;
use std::time::Instant;

use bethe_well::adiabatic::min_culling_time;
use bethe_well::capacity::{ionization_threshold, Axis, ThresholdQuery};
use bethe_well::oracles::{central_difference_jacobian, fd_two_body_extrapolated, FdGridSpec};
use bethe_well::secular::{
    jacobian, residual, single_particle_wavenumber, solve_tonks_limit, solve_with, validate_quantum_numbers,
    QuantumNumbers, SolverSettings,
};
use bethe_well::spectrum::energy_gap;
use bethe_well::sweep::{run_sweep, AxisRange, GridSpec, Quantity, Scale};
use bethe_well::units::{
    angular_frequency, energy_to_nanokelvin, interaction_strength, nanokelvin_to_joules, scattering_length_for,
    to_trap_units, TrapUnitsProblem, RUBIDIUM_87_MASS, SODIUM_23_MASS,
};
use common::{interior_point, sodium};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn verdict(criterion: u32, pass: bool, detail: impl std::fmt::Display) {
    let status = if pass { "PASS" } else { "FAIL" };
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "criterion {criterion}: {status} {detail}");
    let _ = out.flush();
    assert!(pass, "criterion {criterion} failed: {detail}");
}

fn settings() -> SolverSettings {
    SolverSettings::default()
}

#[test]
fn criterion_01_tonks_limit() {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    let mut mismatches = Vec::new();
    for k0 in [10.0, 20.0, 50.0] {
        for n in 1..=6 {
            let qn = QuantumNumbers::ground(n);
            let p = TrapUnitsProblem::new(1e6, k0, n).unwrap();
            let solved = solve_with(&p, &qn, &settings()).into_bound();
            match (solved, solve_tonks_limit(&qn, k0)) {
                (Some(s), Ok(t)) => {
                    for (k, kt) in s.k.iter().zip(&t) {
                        worst = worst.max((k / kt - 1.0).abs());
                    }
                }
                (None, Err(_)) => {}
                (s, t) => mismatches.push(format!(
                    "N={n} k0={k0}: solve bound={} tonks bound={}",
                    s.is_some(),
                    t.is_ok()
                )),
            }
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    let pass = worst <= 1e-6 && mismatches.is_empty() && elapsed < 1.0;
    verdict(
        1,
        pass,
        format!("max relative deviation {worst:.3e} (tol 1e-6), {elapsed:.3} s (limit 1 s), existence mismatches {mismatches:?}"),
    );
}

#[test]
fn criterion_02_noninteracting_limit() {
    let k0 = 10.0;
    let k1 = single_particle_wavenumber(1, k0).unwrap();
    let mut worst: f64 = 0.0;
    let mut unbound = Vec::new();
    for n in 2..=4 {
        let p = TrapUnitsProblem::new(1e-6, k0, n).unwrap();
        match solve_with(&p, &QuantumNumbers::ground(n), &settings()).into_bound() {
            Some(s) => {
                for k in &s.k {
                    worst = worst.max((k / k1 - 1.0).abs());
                }
            }
            None => unbound.push(n),
        }
    }
    let pass = worst <= 1e-4 && unbound.is_empty();
    verdict(
        2,
        pass,
        format!("k0 = {k0}, max relative spread from single-particle k {worst:.3e} (tol 1e-4), unbound N {unbound:?}"),
    );
}

#[test]
fn criterion_03_two_body_brute_force() {
    let start = Instant::now();
    let grid = FdGridSpec {
        points_per_dimension: 256,
        domain_half_width: 1.0,
    };
    let k0 = 30.0;
    let mut worst: f64 = 0.0;
    let mut failures = Vec::new();
    for c_hat in [0.1, 1.0, 5.0, 20.0, 100.0] {
        let p = TrapUnitsProblem::new(c_hat, k0, 2).unwrap();
        let bethe = solve_with(&p, &QuantumNumbers::ground(2), &settings()).into_bound();
        let fd = fd_two_body_extrapolated(&p, &grid);
        match (bethe, fd) {
            (Some(b), Ok(fd)) => worst = worst.max((b.e_total / fd - 1.0).abs()),
            (b, fd) => failures.push(format!("c_hat={c_hat}: bethe bound={} fd={fd:?}", b.is_some())),
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    let pass = worst <= 1e-2 && failures.is_empty() && elapsed < 120.0;
    verdict(
        3,
        pass,
        format!("max relative e_total deviation {worst:.3e} (tol 1e-2), {elapsed:.1} s (limit 120 s) {failures:?}"),
    );
}

#[test]
fn criterion_04_quantum_number_rule() {
    let rejected = [vec![1, 1], vec![2, 3, 3], vec![0, 1], vec![-1, 2], vec![-4], vec![]];
    let all_rejected = rejected
        .iter()
        .all(|qs| validate_quantum_numbers(qs).is_err() && QuantumNumbers::new(qs).is_err());

    let mut rng = StdRng::seed_from_u64(0x1d_b05e);
    let p_base = TrapUnitsProblem::new(5.0, 60.0, 1).unwrap();
    let mut failures = Vec::new();
    for _ in 0..20 {
        let n = rng.random_range(1..=5);
        let mut pool: Vec<i64> = (1..=12).collect();
        let mut picked = Vec::with_capacity(n);
        for _ in 0..n {
            picked.push(pool.swap_remove(rng.random_range(0..pool.len())));
        }
        let qn = QuantumNumbers::new(&picked).unwrap();
        let p = TrapUnitsProblem {
            n_particles: n,
            ..p_base
        };
        if !solve_with(&p, &qn, &settings()).is_bound() {
            failures.push(qn.to_string());
        }
    }
    let pass = all_rejected && failures.is_empty();
    verdict(
        4,
        pass,
        format!("invalid sets rejected: {all_rejected}; random sets not converged at c_hat=5, k0=60: {failures:?}"),
    );
}

#[test]
fn criterion_05_level_ordering() {
    let depths: Vec<f64> = (0..10).map(|i| 2.0 * 30f64.powf(i as f64 / 9.0)).collect();
    let base_c = sodium(25.0).interaction_strength().unwrap();
    let strengths: Vec<f64> = (0..10)
        .map(|i| base_c * 10f64.powf(-1.0 + 2.0 * i as f64 / 9.0))
        .collect();
    let mut compared = 0;
    let mut violations = Vec::new();
    for n in 2..=5 {
        for &d in &depths {
            for &c in &strengths {
                let cfg = sodium(d).with_interaction_strength(c).unwrap();
                let p = to_trap_units(&cfg, n).unwrap();
                if let Ok(g) = energy_gap(&p, &settings()) {
                    if let Some(e) = &g.excited {
                        compared += 1;
                        if g.ground.e_total.partial_cmp(&e.e_total) != Some(std::cmp::Ordering::Less) {
                            violations.push(format!("N={n} V0={d:.2}nK c={c:.3e}"));
                        }
                    }
                }
            }
        }
    }
    let pass = violations.is_empty() && compared > 0;
    verdict(
        5,
        pass,
        format!("{compared} grid points with both states bound, violations {violations:?}"),
    );
}

#[test]
fn criterion_06_scattering_length_fixtures() {
    let omega = angular_frequency(150e3);
    let mut lines = Vec::new();
    let mut pass = true;
    for (name, mass, c) in [
        ("Na23", SODIUM_23_MASS, 16863.6e2),
        ("Rb87", RUBIDIUM_87_MASS, 92391.6e2),
    ] {
        let a = scattering_length_for(c, omega, mass).unwrap();
        let back = interaction_strength(a, omega, mass).unwrap();
        let rel = (back / c - 1.0).abs();
        let ok = (1e-9..=10e-9).contains(&a) && rel <= 1e-10;
        pass &= ok;
        lines.push(format!("{name}: a = {:.4} nm, round trip {rel:.1e}", a * 1e9));
    }
    verdict(6, pass, lines.join("; "));
}

/// Largest ĉ on a log grid up to 1e6 at which the sodium N=4 ground state is
/// bound, and whether binding ever resumes after being lost.
fn coupling_scan(depth_nk: f64) -> (Option<f64>, bool) {
    let p0 = to_trap_units(&sodium(depth_nk), 4).unwrap();
    let qn = QuantumNumbers::ground(4);
    let points = 60;
    let mut last_bound = None;
    let mut lost = false;
    let mut resumed = false;
    for i in 0..=points {
        let c_hat = p0.c_hat * (1e6 / p0.c_hat).powf(i as f64 / points as f64);
        if solve_with(&p0.with_c_hat(c_hat), &qn, &settings()).is_bound() {
            resumed |= lost;
            last_bound = Some(c_hat);
        } else {
            lost = true;
        }
    }
    (if lost { last_bound } else { None }, resumed)
}

#[test]
fn criterion_07_maximum_coupling() {
    let (max_25, resumed_25) = coupling_scan(25.0);
    let (max_40, resumed_40) = coupling_scan(40.0);
    let base = to_trap_units(&sodium(25.0), 4).unwrap().c_hat;
    let finite_at_25 = max_25.is_some() && !resumed_25;
    let persists_at_40 = max_40.is_none() && !resumed_40;
    verdict(
        7,
        finite_at_25 && persists_at_40,
        format!(
            "25 nK: bound up to c_hat ~ {} (sodium c_hat {base:.3}); 40 nK bound through 1e6: {persists_at_40}",
            max_25.map_or("none".into(), |c| format!("{c:.3}"))
        ),
    );
}

#[test]
fn criterion_08_depth_thresholds() {
    let base = sodium(25.0);
    let mut thresholds = Vec::new();
    let mut worst_e: f64 = 0.0;
    let mut errors = Vec::new();
    for n in 2..=6 {
        let q = ThresholdQuery {
            base_config: base,
            n,
            axis: Axis::TrapDepth,
            bracket: (nanokelvin_to_joules(0.1), nanokelvin_to_joules(100.0)),
        };
        match ionization_threshold(&q, 1e-8, &settings()) {
            Ok(r) => {
                thresholds.push(bethe_well::units::joules_to_nanokelvin(r.value));
                worst_e = worst_e.max(r.bound_side.highest_single_energy().abs());
            }
            Err(e) => errors.push(format!("N={n}: {e}")),
        }
    }
    let increasing = thresholds.windows(2).all(|w| w[0] < w[1]);
    let pass = errors.is_empty() && increasing && worst_e < 1e-3;
    let shown: Vec<String> = thresholds.iter().map(|t| format!("{t:.3}")).collect();
    verdict(
        8,
        pass,
        format!(
            "thresholds N=2..6 [{}] nK, max |e_N| {worst_e:.2e} (tol 1e-3) {errors:?}",
            shown.join(", ")
        ),
    );
}

#[test]
fn criterion_09_culling_time() {
    let base = sodium(25.0);
    let threshold = |n: usize| {
        let q = ThresholdQuery {
            base_config: base,
            n,
            axis: Axis::TrapDepth,
            bracket: (nanokelvin_to_joules(0.1), nanokelvin_to_joules(100.0)),
        };
        ionization_threshold(&q, 1e-8, &settings()).unwrap().value
    };
    let (v3, v2) = (threshold(3), threshold(2));
    let (pass, detail) = match min_culling_time(&base, 3, v3, v2, 64, &settings()) {
        Ok(est) => {
            let ms = est.t_min * 1e3;
            (
                (0.1..=0.9).contains(&ms),
                format!("t_min = {ms:.4} ms (window 0.1 to 0.9 ms)"),
            )
        }
        Err(e) => (false, format!("no estimate: {e}")),
    };
    verdict(9, pass, detail);
}

#[test]
fn criterion_10_gap_magnitude() {
    let depths: Vec<f64> = (0..40).map(|i| 0.5 * 200f64.powf(i as f64 / 39.0)).collect();
    let mut lo = f64::INFINITY;
    let mut hi: f64 = 0.0;
    let mut counted = 0;
    for n in 2..=6 {
        for &d in &depths {
            let cfg = sodium(d);
            let p = to_trap_units(&cfg, n).unwrap();
            if let Ok(g) = energy_gap(&p, &settings()) {
                if let Some(gap) = g.gap {
                    let nk = energy_to_nanokelvin(gap, &cfg);
                    lo = lo.min(nk);
                    hi = hi.max(nk);
                    counted += 1;
                }
            }
        }
    }
    let pass = counted > 0 && lo >= 1.0 && hi <= 200.0;
    verdict(
        10,
        pass,
        format!("{counted} defined gaps between 0.5 and 100 nK depth span [{lo:.3}, {hi:.3}] nK (window 1 to 200 nK)"),
    );
}

#[test]
fn criterion_11_sweep_determinism() {
    let spec = GridSpec {
        x_axis: AxisRange {
            axis: Axis::TrapDepth,
            low: nanokelvin_to_joules(2.0),
            high: nanokelvin_to_joules(40.0),
            count: 12,
            scale: Scale::Log,
        },
        y_axis: Some(AxisRange {
            axis: Axis::InteractionStrength,
            low: 2e5,
            high: 2e7,
            count: 6,
            scale: Scale::Log,
        }),
        fixed: sodium(25.0),
        quantity: Quantity::ETotal,
        n_particles: 3,
        quantum_numbers: None,
        shift_to_trap_bottom: false,
    };
    let render = |parallel: bool| {
        let mut buf = Vec::new();
        run_sweep(&spec, &settings(), parallel)
            .unwrap()
            .write_csv(&mut buf)
            .unwrap();
        buf
    };
    let first = render(true);
    let second = render(true);
    let serial = render(false);
    let repeat_ok = first == second;
    let serial_ok = first == serial;
    verdict(
        11,
        repeat_ok && serial_ok,
        format!(
            "repeat identical: {repeat_ok}, serial equals parallel: {serial_ok} ({} bytes)",
            first.len()
        ),
    );
}

#[test]
fn criterion_12_jacobian() {
    let mut rng = StdRng::seed_from_u64(12);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let n = rng.random_range(1..=6);
        let c_hat = 10f64.powf(rng.random_range(-1.0..2.0));
        let k0 = rng.random_range(5.0..40.0);
        let p = TrapUnitsProblem::new(c_hat, k0, n).unwrap();
        let qn = QuantumNumbers::ground(n);
        let k = interior_point(&mut rng, n, k0);
        let analytic = jacobian(&k, &qn, &p).unwrap();
        let numeric = central_difference_jacobian(|x| residual(x, &qn, &p), &k, 1e-6).unwrap();
        worst = worst.max((analytic - numeric).abs().max());
    }
    verdict(
        12,
        worst < 1e-6,
        format!("max abs error over 100 points {worst:.3e} (tol 1e-6)"),
    );
}
