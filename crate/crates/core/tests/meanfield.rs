use std::io::Cursor;
use std::sync::OnceLock;

use rgsim::io::{read_columns, write_trace_csv};
use rgsim::meanfield::{find_steady_state, SteadyState, SteadyStateConfig, Stepper, StepperConfig, SystemState};
use rgsim::observables::{rel_phase, tot_phase};
use rgsim::scenario::{evolve, free_fall, RunConfig};
use rgsim::{Grid, SimParams};

fn flat() -> SimParams {
    SimParams { grav: 0.0, ..SimParams::default() }
}

fn steady() -> &'static (Grid<f64>, SteadyState<f64>) {
    static S: OnceLock<(Grid<f64>, SteadyState<f64>)> = OnceLock::new();
    S.get_or_init(|| {
        let grid = Grid::new(&flat()).unwrap();
        let ss = find_steady_state(&flat(), &grid, 0.4, &SteadyStateConfig::default()).unwrap();
        (grid, ss)
    })
}

#[test]
fn steady_state_survives_a_real_time_step() {
    let (grid, ss) = steady();
    let mut state = ss.state.clone();
    let mut stepper = Stepper::new(&flat(), grid, StepperConfig::for_params(&flat())).unwrap();
    stepper.step(&mut state).unwrap();
    let c0 = &ss.state.cavity;
    let c1 = &state.cavity;
    assert!((c1.alpha_plus - c0.alpha_plus).norm() < 1e-8);
    assert!((c1.alpha_minus - c0.alpha_minus).norm() < 1e-8);
    assert!((rel_phase(c1).unwrap() - rel_phase(c0).unwrap()).abs() < 1e-8);
    let drho = state
        .condensate
        .density()
        .iter()
        .zip(ss.state.condensate.density())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0f64, f64::max);
    assert!(drho < 1e-8, "{drho}");
}

#[test]
fn u1_equivariance_along_the_trajectory() {
    let (grid, ss) = steady();
    let cells = 100;
    let shift = cells as f64 * grid.spacing;
    let base = ss.state.clone();
    let moved = SystemState::new(base.condensate.shifted_by_cells(cells), base.cavity.translated(shift));
    // perturb both identically so the trajectory is not stationary
    let kick = |mut s: SystemState<f64>| {
        s.kick(0.02);
        s
    };
    let (a, _) = evolve(&flat(), grid, kick(base), 3.0, 800).unwrap();
    let (b, _) = evolve(&flat(), grid, kick(moved), 3.0, 800).unwrap();
    for i in 0..a.len() {
        let want_p = a.alpha_plus[i] * num_complex::Complex::from_polar(1.0, -shift);
        let want_m = a.alpha_minus[i] * num_complex::Complex::from_polar(1.0, shift);
        assert!((b.alpha_plus[i] - want_p).norm() < 1e-8, "t = {}", a.times[i]);
        assert!((b.alpha_minus[i] - want_m).norm() < 1e-8, "t = {}", a.times[i]);
        assert!((b.com[i] - a.com[i]).abs() < 1e-8);
    }
}

#[test]
fn total_phase_is_translation_invariant() {
    let (grid, ss) = steady();
    let c = &ss.state.cavity;
    let moved = c.translated(37.0 * grid.spacing);
    assert!((tot_phase(&moved).unwrap() - tot_phase(c).unwrap()).abs() < 1e-12);
}

#[test]
fn single_precision_fall_tracks_double() {
    let params = SimParams { n_grid: 128, box_len: 2.0, ..SimParams::default() };
    let cfg = RunConfig { t_end: 2.0, sample_every: 400, ..RunConfig::default() };
    let g64 = Grid::<f64>::new(&params).unwrap();
    let g32 = Grid::<f32>::new(&params).unwrap();
    let a = free_fall(&params, &g64, &cfg).unwrap().trace;
    let b = free_fall(&params, &g32, &RunConfig { steady: SteadyStateConfig { tol: 1e-5, ..cfg.steady }, ..cfg }).unwrap().trace;
    let da = a.rel_phase.last().unwrap() - a.rel_phase[0];
    let db = b.rel_phase.last().unwrap() - b.rel_phase[0];
    // single-precision rounding accumulates over 16k steps
    assert!((da - db).abs() < 1e-2 * da.abs(), "{da} vs {db}");
}

#[test]
fn fall_trace_is_valid_and_round_trips() {
    let params = SimParams { n_grid: 128, box_len: 2.0, ..SimParams::default() };
    let grid = Grid::<f64>::new(&params).unwrap();
    let run = free_fall(&params, &grid, &RunConfig { t_end: 3.0, ..RunConfig::default() }).unwrap();
    run.trace.validate().unwrap();
    let mut buf = Vec::new();
    write_trace_csv(&mut buf, &run.trace).unwrap();
    let (headers, cols) = read_columns(Cursor::new(buf)).unwrap();
    assert_eq!(headers.len(), 7);
    assert_eq!(cols[0], run.trace.times);
    assert_eq!(cols[1], run.trace.rel_phase);
    assert_eq!(cols[3], run.trace.com);
    // gravity pulls the lattice along: φ grows while x_com decreases
    assert!(run.trace.rel_phase.last().unwrap() - run.trace.rel_phase[0] > 0.1);
    assert!(*run.trace.com.last().unwrap() < -0.1);
}
