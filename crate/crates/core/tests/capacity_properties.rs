mod common;

use bethe_well::capacity::{exists_bound_state, ionization_threshold, trap_capacity, Axis, ThresholdQuery};
use bethe_well::secular::SolverSettings;
use bethe_well::sweep::{run_sweep, AxisRange, GridSpec, Quantity, Scale};
use bethe_well::units::nanokelvin_to_joules;
use common::sodium;

#[test]
fn capacity_grows_with_depth_and_length() {
    let s = SolverSettings::default();
    let mut previous = 0;
    for depth in [1.0, 3.0, 6.0, 10.0, 16.0, 25.0, 40.0] {
        let cap = trap_capacity(&sodium(depth), 10, &s);
        assert!(cap >= previous, "capacity fell at {depth} nK");
        previous = cap;
    }
    let mut previous = 0;
    for length in [2e-6, 3e-6, 5e-6, 7e-6] {
        let cfg = Axis::TrapLength.apply(&sodium(10.0), length).unwrap();
        let cap = trap_capacity(&cfg, 10, &s);
        assert!(cap >= previous, "capacity fell at L = {length}");
        previous = cap;
    }
}

#[test]
fn capacity_shrinks_with_interaction() {
    let s = SolverSettings::default();
    let base = sodium(20.0);
    let c = base.interaction_strength().unwrap();
    let mut previous = usize::MAX;
    for factor in [0.01, 0.1, 1.0, 10.0, 100.0] {
        let cfg = base.with_interaction_strength(c * factor).unwrap();
        let cap = trap_capacity(&cfg, 12, &s);
        assert!(cap <= previous, "capacity rose at {factor} c");
        previous = cap;
    }
}

#[test]
fn existence_is_downward_closed() {
    let s = SolverSettings::default();
    for depth in [2.0, 9.0, 20.0, 33.0] {
        let cfg = sodium(depth);
        for n in 2..=7 {
            if exists_bound_state(&cfg, n, &s) {
                assert!(
                    exists_bound_state(&cfg, n - 1, &s),
                    "N={n} bound but not N-1 at {depth} nK"
                );
            }
        }
    }
}

#[test]
fn threshold_falls_between_sweep_ticks() {
    let s = SolverSettings::default();
    let spec = GridSpec {
        x_axis: AxisRange {
            axis: Axis::TrapDepth,
            low: nanokelvin_to_joules(1.0),
            high: nanokelvin_to_joules(40.0),
            count: 60,
            scale: Scale::Log,
        },
        y_axis: None,
        fixed: sodium(25.0),
        quantity: Quantity::Capacity,
        n_particles: 8,
        quantum_numbers: None,
        shift_to_trap_bottom: false,
    };
    let grid = run_sweep(&spec, &s, true).unwrap();
    for n in 2..=5 {
        let q = ThresholdQuery {
            base_config: sodium(25.0),
            n,
            axis: Axis::TrapDepth,
            bracket: (nanokelvin_to_joules(0.5), nanokelvin_to_joules(60.0)),
        };
        let r = ionization_threshold(&q, 1e-6, &s).unwrap();
        assert_eq!((r.capacity_below, r.capacity_above), (n - 1, n));
        let tick = grid
            .cells
            .windows(2)
            .find(|w| w[0].value.unwrap() < n as f64 && w[1].value.unwrap() >= n as f64)
            .expect("capacity crosses n on the grid");
        assert!(tick[0].x < r.value && r.value <= tick[1].x, "N={n}");
    }
}
