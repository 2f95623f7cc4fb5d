//! Self-consistent superradiant steady state.
//!
//! Alternates imaginary-time relaxation of ψ in the frozen potential
//! V_SR(α) + V_g with the closed-form cavity fixed point for the current
//! density, mixing successive cavity iterates.

use num_complex::Complex;

use crate::error::{Error, Result, StallKind};
use crate::grid::{grav_potential, Grid};
use crate::params::SimParams;
use crate::scalar::Real;

use super::coupling::{cavity_fixed_point, order_params, srpotential};
use super::propagate::{Stepper, StepperConfig};
use super::state::{CavityState, CondensateState, SystemState};

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SteadyStateConfig {
    /// Imaginary-time step in 1/ω_r.
    pub tau: f64,
    /// Imaginary-time steps per self-consistency iteration.
    pub inner_steps: usize,
    /// Weight of the new cavity iterate.
    pub mixing: f64,
    /// Max-norm tolerance on both the α and ψ updates.
    pub tol: f64,
    pub max_iterations: usize,
}

impl Default for SteadyStateConfig {
    fn default() -> Self {
        SteadyStateConfig { tau: 1e-3, inner_steps: 50, mixing: 0.5, tol: 1e-10, max_iterations: 20_000 }
    }
}

#[derive(Debug, Clone)]
pub struct SteadyState<T> {
    pub state: SystemState<T>,
    pub iterations: usize,
    pub alpha_update: f64,
    pub psi_update: f64,
    /// ⟨ψ|−∂² + V_SR + V_g|ψ⟩ per atom.
    pub chemical_potential: f64,
    /// False when gravity is on: the result is then only a relaxed diagnostic state.
    pub stationary: bool,
}

/// Seed profile ψ ∝ 1 + 0.01·cos(x + seed_phase), normalized.
pub fn seed_condensate<T: Real>(grid: &Grid<T>, seed_phase: f64) -> CondensateState<T> {
    let psi = grid
        .points
        .iter()
        .map(|&x| {
            let v = 1.0 + 0.01 * (x.as_f64() + seed_phase).cos();
            Complex::new(T::lit(v), T::zero())
        })
        .collect();
    CondensateState::from_samples(psi, grid)
}

fn max_diff<T: Real>(a: &[Complex<T>], b: &[Complex<T>]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (*x - *y).norm().as_f64()).fold(0.0, f64::max)
}

fn cavity_diff<T: Real>(a: &CavityState<T>, b: &CavityState<T>) -> f64 {
    (a.alpha_plus - b.alpha_plus).norm().as_f64().max((a.alpha_minus - b.alpha_minus).norm().as_f64())
}

fn classify(history: &[(f64, f64)]) -> StallKind {
    // history holds (update size, projection of the update on the previous one)
    let tail = &history[history.len().saturating_sub(50)..];
    let flips = tail.iter().filter(|(_, dot)| *dot < 0.0).count();
    if flips * 2 > tail.len() {
        StallKind::Oscillatory
    } else {
        StallKind::Slow
    }
}

pub fn find_steady_state<T: Real>(
    params: &SimParams,
    grid: &Grid<T>,
    seed_phase: f64,
    cfg: &SteadyStateConfig,
) -> Result<SteadyState<T>> {
    params.validate()?;
    let mut stepper = Stepper::new(params, grid, StepperConfig::for_params(params))?;
    let vg = grav_potential(grid, params);
    let tau = T::lit(cfg.tau);
    let mix = T::lit(cfg.mixing);

    let mut cond = seed_condensate(grid, seed_phase);
    let mut cavity = cavity_fixed_point(&order_params(&cond, grid), params);
    let mut prev_delta: Option<(Complex<T>, Complex<T>)> = None;
    let mut history = Vec::new();
    let mut potential = vec![T::zero(); grid.len()];

    for it in 1..=cfg.max_iterations {
        for (v, (s, g)) in potential.iter_mut().zip(srpotential(&cavity, params, grid).iter().zip(&vg)) {
            *v = *s + *g;
        }
        let old_psi = cond.psi.clone();
        for _ in 0..cfg.inner_steps {
            stepper.imaginary_step(&mut cond.psi, &potential, tau, T::zero());
        }
        let psi_update = max_diff(&cond.psi, &old_psi);

        let target = cavity_fixed_point(&order_params(&cond, grid), params);
        let alpha_update = cavity_diff(&target, &cavity);
        let delta = (target.alpha_plus - cavity.alpha_plus, target.alpha_minus - cavity.alpha_minus);
        let dot = prev_delta
            .map(|(p, m)| (delta.0 * p.conj() + delta.1 * m.conj()).re.as_f64())
            .unwrap_or(0.0);
        prev_delta = Some(delta);
        history.push((alpha_update, dot));
        if !target.is_finite() || !psi_update.is_finite() {
            return Err(Error::Divergence { time: 0.0, what: "steady-state iteration".into() });
        }

        cavity = CavityState::new(
            cavity.alpha_plus + (target.alpha_plus - cavity.alpha_plus) * mix,
            cavity.alpha_minus + (target.alpha_minus - cavity.alpha_minus) * mix,
        );

        if alpha_update < cfg.tol && psi_update < cfg.tol {
            // final cavity consistent with the final density
            let cavity = cavity_fixed_point(&order_params(&cond, grid), params);
            let mut pot = srpotential(&cavity, params, grid);
            pot.iter_mut().zip(&vg).for_each(|(v, g)| *v += *g);
            let mu = stepper.energy(&cond.psi, &pot, T::zero()).as_f64();
            return Ok(SteadyState {
                state: SystemState::new(cond, cavity),
                iterations: it,
                alpha_update,
                psi_update,
                chemical_potential: mu,
                stationary: params.grav == 0.0,
            });
        }
    }
    let last = history.last().map(|h| h.0).unwrap_or(f64::NAN);
    Err(Error::NonConvergence { iterations: cfg.max_iterations, kind: classify(&history), last_update: last })
}

/// Linear gain of the self-consistency map around the uniform normal state.
///
/// A tiny symmetric lattice is imposed, ψ relaxes in it, and the cavity fixed
/// point of the resulting density is compared with the imposed amplitude.
/// The normal state is unstable (superradiant) when the gain exceeds one.
pub fn normal_state_gain(params: &SimParams, grid: &Grid<f64>) -> Result<f64> {
    let p = SimParams { grav: 0.0, ..*params };
    let mut stepper = Stepper::new(&p, grid, StepperConfig::for_params(&p))?;
    let eps = 1e-7;
    let mut cavity = CavityState::new(Complex::new(eps, 0.0), Complex::new(eps, 0.0));
    let mut gain = 0.0;
    for _ in 0..3 {
        let pot = srpotential(&cavity, &p, grid);
        let mut cond = CondensateState::uniform(grid);
        for _ in 0..4000 {
            stepper.imaginary_step(&mut cond.psi, &pot, 1e-2, 0.0);
        }
        let next = cavity_fixed_point(&order_params(&cond, grid), &p);
        let size = |c: &CavityState<f64>| (c.alpha_plus.norm_sqr() + c.alpha_minus.norm_sqr()).sqrt();
        gain = size(&next) / size(&cavity);
        let s = eps / size(&next).max(f64::MIN_POSITIVE);
        cavity = CavityState::new(next.alpha_plus * s, next.alpha_minus * s);
    }
    Ok(gain)
}

/// Critical collective pump √Nη_c located by bisection on the normal-state gain.
pub fn find_threshold(params: &SimParams, grid: &Grid<f64>, lo: f64, hi: f64, rel_tol: f64) -> Result<f64> {
    let gain_at = |eta: f64| normal_state_gain(&SimParams { eta0rn: eta, ..*params }, grid);
    let (mut lo, mut hi) = (lo, hi);
    if gain_at(lo)? >= 1.0 || gain_at(hi)? <= 1.0 {
        return Err(Error::InvalidParam(format!("threshold not bracketed by [{lo}, {hi}]")));
    }
    while (hi - lo) > rel_tol * hi {
        let mid = 0.5 * (lo + hi);
        if gain_at(mid)? > 1.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
