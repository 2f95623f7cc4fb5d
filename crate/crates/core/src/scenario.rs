//! End-to-end mean-field runs: relax to the superradiant steady state, then
//! switch on gravity or imprint a momentum kick and record a trace.

use crate::error::Result;
use crate::grid::Grid;
use crate::meanfield::{find_steady_state, SteadyState, SteadyStateConfig, Stepper, StepperConfig, SystemState};
use crate::observables::{Trace, TraceBuilder};
use crate::params::SimParams;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy)]
pub struct RunConfig {
    /// Final time in 1/ω_r.
    pub t_end: f64,
    /// Steps between trace samples.
    pub sample_every: usize,
    pub seed_phase: f64,
    pub steady: SteadyStateConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig { t_end: 60.0, sample_every: 100, seed_phase: 0.0, steady: SteadyStateConfig::default() }
    }
}

#[derive(Debug, Clone)]
pub struct Run<T> {
    /// Steady state the evolution started from (relaxed without gravity).
    pub initial: SteadyState<T>,
    pub trace: Trace,
    pub last: SystemState<T>,
}

/// Evolves `state` to `t_end`, sampling every `sample_every` steps (t = 0 included).
pub fn evolve<T: Real>(
    params: &SimParams,
    grid: &Grid<T>,
    mut state: SystemState<T>,
    t_end: f64,
    sample_every: usize,
) -> Result<(Trace, SystemState<T>)> {
    let mut stepper = Stepper::new(params, grid, StepperConfig::for_params(params))?;
    let mut builder = TraceBuilder::new(params.n_atoms);
    builder.push(&state, grid)?;
    let steps = (t_end / params.dt).round() as usize;
    let every = sample_every.max(1);
    for i in 1..=steps {
        stepper.step(&mut state)?;
        if i % every == 0 || i == steps {
            builder.push(&state, grid)?;
        }
    }
    Ok((builder.finish(), state))
}

/// Steady state at zero gravity followed by free fall with `params.grav`.
pub fn free_fall<T: Real>(params: &SimParams, grid: &Grid<T>, cfg: &RunConfig) -> Result<Run<T>> {
    let flat = SimParams { grav: 0.0, ..*params };
    let initial = find_steady_state(&flat, grid, cfg.seed_phase, &cfg.steady)?;
    let (trace, last) = evolve(params, grid, initial.state.clone(), cfg.t_end, cfg.sample_every)?;
    Ok(Run { initial, trace, last })
}

/// Steady state at zero gravity, a uniform momentum kick, then evolution without gravity.
pub fn goldstone_kick<T: Real>(params: &SimParams, grid: &Grid<T>, momentum: f64, cfg: &RunConfig) -> Result<Run<T>> {
    let flat = SimParams { grav: 0.0, ..*params };
    let initial = find_steady_state(&flat, grid, cfg.seed_phase, &cfg.steady)?;
    let mut state = initial.state.clone();
    state.kick(T::lit(momentum));
    let (trace, last) = evolve(&flat, grid, state, cfg.t_end, cfg.sample_every)?;
    Ok(Run { initial, trace, last })
}
