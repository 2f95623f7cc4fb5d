//! Split-step propagation of the coupled condensate-cavity system.
//!
//! One real-time step is the Strang sequence K(dt/2) · P(dt) · K(dt/2):
//!
//! * K: free evolution of ψ in momentum space with the comoving kinetic energy
//!   (k + q(t))², integrated exactly over the substep. The cavity is idle.
//! * P: the potential substep. It leaves |ψ|² unchanged, so the density moments
//!   are constant and the cavity ODE is integrated with RK4 over the full dt.
//!   The same RK4 pass integrates ∫|α±|², ∫α+*α−, ∫α± so that ψ picks up the
//!   exact time-integral of V_SR along the cavity trajectory.

use std::sync::Arc;

use num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::params::SimParams;
use crate::scalar::Real;

use super::coupling::{cavity_rhs, OrderParams, PhaseTables};
use super::state::{CavityState, SystemState};

/// Guards applied after every real-time step.
#[derive(Debug, Clone, Copy)]
pub struct StepperConfig {
    /// Divergence is signalled when |α±| or |ψ| exceeds this (or is not finite).
    pub overflow_bound: f64,
    /// Largest tolerated |COM displacement| in 1/k_c since the stepper's first step.
    /// `None` disables the check.
    pub max_displacement: Option<f64>,
}

impl StepperConfig {
    pub fn for_params(params: &SimParams) -> Self {
        StepperConfig { overflow_bound: 1e6, max_displacement: Some(params.length() / 4.0) }
    }
}

/// Integrated cavity quantities over one potential substep.
#[derive(Debug, Clone, Copy)]
struct Aug<T> {
    ap: Complex<T>,
    am: Complex<T>,
    photons: T,
    cross: Complex<T>,
    sp: Complex<T>,
    sm: Complex<T>,
}

impl<T: Real> Aug<T> {
    fn axpy(&self, h: T, d: &Aug<T>) -> Aug<T> {
        Aug {
            ap: self.ap + d.ap * h,
            am: self.am + d.am * h,
            photons: self.photons + d.photons * h,
            cross: self.cross + d.cross * h,
            sp: self.sp + d.sp * h,
            sm: self.sm + d.sm * h,
        }
    }
}

/// Unwrapped circular-mean COM displacement. The harmonic is the box length
/// when the first density resolves it, otherwise the lattice period 2π.
#[derive(Debug, Clone)]
pub(crate) struct ComTracker<T> {
    points: Vec<T>,
    length: f64,
    single_cell: bool,
    table: Vec<Complex<T>>,
    period: f64,
    origin: f64,
    last_wrapped: f64,
    unwrapped: f64,
}

fn harmonic<T: Real>(rho: &[T], table: &[Complex<T>]) -> Complex<f64> {
    let m = rho.iter().zip(table).fold(Complex::new(T::zero(), T::zero()), |acc, (&r, e)| acc + *e * r);
    Complex::new(m.re.as_f64(), m.im.as_f64())
}

impl<T: Real> ComTracker<T> {
    pub fn new(grid: &Grid<T>) -> Self {
        ComTracker {
            points: grid.points.clone(),
            length: grid.length.as_f64(),
            single_cell: grid.box_len == 1,
            table: Vec::new(),
            period: 0.0,
            origin: 0.0,
            last_wrapped: 0.0,
            unwrapped: 0.0,
        }
    }

    fn table_for(&self, period: f64) -> Vec<Complex<T>> {
        let w = T::lit(2.0 * std::f64::consts::PI / period);
        self.points.iter().map(|&x| Complex::from_polar(T::one(), w * x)).collect()
    }

    /// Updates with the current density and returns the displacement since the first call.
    pub fn update(&mut self, rho: &[T]) -> Option<f64> {
        let total: f64 = rho.iter().map(|r| r.as_f64()).sum();
        let first = self.table.is_empty();
        if first {
            let table = self.table_for(self.length);
            let m = harmonic(rho, &table);
            if m.norm() >= 1e-6 * total || self.single_cell {
                self.table = table;
                self.period = self.length;
            } else {
                self.period = 2.0 * std::f64::consts::PI;
                self.table = self.table_for(self.period);
            }
        }
        let m = harmonic(rho, &self.table);
        if m.norm() < 1e-12 * total.max(f64::MIN_POSITIVE) {
            if first {
                self.table.clear();
            }
            return None;
        }
        let wrapped = m.arg() * self.period / (2.0 * std::f64::consts::PI);
        if first {
            self.origin = wrapped;
            self.unwrapped = wrapped;
        } else {
            let mut d = wrapped - self.last_wrapped;
            d -= self.period * (d / self.period).round();
            self.unwrapped += d;
        }
        self.last_wrapped = wrapped;
        Some(self.unwrapped - self.origin)
    }
}

/// Reusable propagator bound to one parameter set and grid.
pub struct Stepper<T: Real> {
    params: SimParams,
    grid: Grid<T>,
    cfg: StepperConfig,
    fwd: Arc<dyn Fft<T>>,
    inv: Arc<dyn Fft<T>>,
    scratch: Vec<Complex<T>>,
    tables: PhaseTables<T>,
    rho: Vec<T>,
    com: ComTracker<T>,
}

impl<T: Real> Stepper<T> {
    pub fn new(params: &SimParams, grid: &Grid<T>, cfg: StepperConfig) -> Result<Self> {
        params.validate()?;
        let mut planner = FftPlanner::new();
        let n = grid.len();
        let fwd = planner.plan_fft_forward(n);
        let inv = planner.plan_fft_inverse(n);
        let scratch_len = fwd.get_inplace_scratch_len().max(inv.get_inplace_scratch_len());
        Ok(Stepper {
            params: *params,
            grid: grid.clone(),
            cfg,
            fwd,
            inv,
            scratch: vec![Complex::new(T::zero(), T::zero()); scratch_len],
            tables: PhaseTables::new(grid),
            rho: vec![T::zero(); n],
            com: ComTracker::new(grid),
        })
    }

    pub fn params(&self) -> &SimParams {
        &self.params
    }

    pub fn grid(&self) -> &Grid<T> {
        &self.grid
    }

    /// Exact kinetic evolution over [t, t+h] with q(t') = q + F (t' − t).
    fn kinetic(&mut self, psi: &mut [Complex<T>], q: T, h: T) {
        let f = T::lit(self.params.force());
        let third = T::lit(1.0 / 3.0);
        let inv_n = T::one() / T::lit(psi.len() as f64);
        self.fwd.process_with_scratch(psi, &mut self.scratch);
        for (z, &k) in psi.iter_mut().zip(&self.grid.wavenumbers) {
            let p = k + q;
            let phase = p * p * h + p * f * h * h + f * f * h * h * h * third;
            *z *= Complex::from_polar(inv_n, -phase);
        }
        self.inv.process_with_scratch(psi, &mut self.scratch);
    }

    fn aug_rhs(&self, y: &Aug<T>, op: &OrderParams<T>) -> Aug<T> {
        let cav = CavityState::new(y.ap, y.am);
        let (dp, dm) = cavity_rhs(&cav, op, &self.params);
        Aug {
            ap: dp,
            am: dm,
            photons: y.ap.norm_sqr() + y.am.norm_sqr(),
            cross: y.ap.conj() * y.am,
            sp: y.ap,
            sm: y.am,
        }
    }

    /// Advances `state` by one real-time step `dt`.
    pub fn step(&mut self, state: &mut SystemState<T>) -> Result<()> {
        let dt = T::lit(self.params.dt);
        let half = dt * T::lit(0.5);
        let f = T::lit(self.params.force());
        let q0 = state.frame_momentum;

        self.kinetic(&mut state.condensate.psi, q0, half);

        for (r, z) in self.rho.iter_mut().zip(&state.condensate.psi) {
            *r = z.norm_sqr();
        }
        let op = self.tables.moments_of_density(self.rho.iter().copied(), self.grid.spacing);

        let zero = Complex::new(T::zero(), T::zero());
        let y0 = Aug {
            ap: state.cavity.alpha_plus,
            am: state.cavity.alpha_minus,
            photons: T::zero(),
            cross: zero,
            sp: zero,
            sm: zero,
        };
        let k1 = self.aug_rhs(&y0, &op);
        let k2 = self.aug_rhs(&y0.axpy(half, &k1), &op);
        let k3 = self.aug_rhs(&y0.axpy(half, &k2), &op);
        let k4 = self.aug_rhs(&y0.axpy(dt, &k3), &op);
        let sixth = dt / T::lit(6.0);
        let two = T::lit(2.0);
        let y1 = y0
            .axpy(sixth, &k1)
            .axpy(sixth * two, &k2)
            .axpy(sixth * two, &k3)
            .axpy(sixth, &k4);

        let u0 = T::lit(self.params.u0n);
        let eta = T::lit(self.params.eta0rn);
        for ((z, e1), e2) in state.condensate.psi.iter_mut().zip(&self.tables.e1).zip(&self.tables.e2) {
            // e1 = e^{−ix}, e2 = e^{−2ix}
            let v = u0 * (y1.photons + two * (y1.cross * *e2).re) + two * eta * (y1.sp * e1.conj() + y1.sm * *e1).re;
            *z *= Complex::from_polar(T::one(), -v);
        }
        state.cavity = CavityState::new(y1.ap, y1.am);

        self.kinetic(&mut state.condensate.psi, q0 + f * half, half);
        state.frame_momentum = q0 + f * dt;
        state.time += dt;
        self.fold_momentum(state);

        self.check(state)
    }

    /// Keeps the frame momentum in the first zone [−Δk/2, Δk/2), Δk = 2π/L.
    ///
    /// e^{iqx}ψ = e^{i(q − mΔk)x}·(e^{imΔk x}ψ) is exact and keeps ψ periodic; it
    /// stops a lattice-held condensate from drifting off the momentum grid.
    fn fold_momentum(&self, state: &mut SystemState<T>) {
        let dk = T::lit(2.0 * std::f64::consts::PI) / self.grid.length;
        let m = (state.frame_momentum / dk).round();
        if m == T::zero() {
            return;
        }
        let shift = m * dk;
        for (z, &x) in state.condensate.psi.iter_mut().zip(&self.grid.points) {
            *z *= Complex::from_polar(T::one(), shift * x);
        }
        state.frame_momentum -= shift;
    }

    fn check(&mut self, state: &SystemState<T>) -> Result<()> {
        let bound = self.cfg.overflow_bound;
        let t = state.time.as_f64();
        let c = &state.cavity;
        if !c.is_finite() || c.alpha_plus.norm().as_f64() > bound || c.alpha_minus.norm().as_f64() > bound {
            return Err(Error::Divergence { time: t, what: "cavity amplitude overflow".into() });
        }
        let mut max_abs = 0.0f64;
        for (r, z) in self.rho.iter_mut().zip(&state.condensate.psi) {
            *r = z.norm_sqr();
            let a = r.as_f64();
            if !a.is_finite() {
                return Err(Error::Divergence { time: t, what: "non-finite wavefunction".into() });
            }
            max_abs = max_abs.max(a);
        }
        if max_abs.sqrt() > bound {
            return Err(Error::Divergence { time: t, what: "wavefunction overflow".into() });
        }
        if let Some(limit) = self.cfg.max_displacement {
            if let Some(d) = self.com.update(&self.rho) {
                if d.abs() > limit {
                    return Err(Error::BoxExit { displacement: d.abs(), bound: limit });
                }
            }
        }
        Ok(())
    }

    /// Advances by `n` steps.
    pub fn run(&mut self, state: &mut SystemState<T>, n: usize) -> Result<()> {
        for _ in 0..n {
            self.step(state)?;
        }
        Ok(())
    }

    /// One imaginary-time Strang step of ψ in a frozen real potential, followed by renormalization.
    /// `momentum` is the comoving frame momentum used in the kinetic factor.
    pub fn imaginary_step(&mut self, psi: &mut [Complex<T>], potential: &[T], tau: T, momentum: T) {
        let half = tau * T::lit(0.5);
        self.imag_kinetic(psi, momentum, half);
        for (z, &v) in psi.iter_mut().zip(potential) {
            *z *= (-v * tau).exp();
        }
        self.imag_kinetic(psi, momentum, half);
        let n = super::state::norm_of(psi, self.grid.spacing);
        let s = T::one() / n.sqrt();
        psi.iter_mut().for_each(|z| *z *= s);
    }

    fn imag_kinetic(&mut self, psi: &mut [Complex<T>], q: T, h: T) {
        let inv_n = T::one() / T::lit(psi.len() as f64);
        self.fwd.process_with_scratch(psi, &mut self.scratch);
        for (z, &k) in psi.iter_mut().zip(&self.grid.wavenumbers) {
            let p = k + q;
            *z *= (-p * p * h).exp() * inv_n;
        }
        self.inv.process_with_scratch(psi, &mut self.scratch);
    }

    /// ⟨ψ|(k+q)² + V|ψ⟩ for a normalized ψ.
    pub fn energy(&mut self, psi: &[Complex<T>], potential: &[T], momentum: T) -> T {
        let mut work = psi.to_vec();
        self.fwd.process_with_scratch(&mut work, &mut self.scratch);
        let n = T::lit(psi.len() as f64);
        // Parseval: Σ|ψ_j|²dx = (dx/n) Σ|ψ̂_k|²
        let kin = work
            .iter()
            .zip(&self.grid.wavenumbers)
            .fold(T::zero(), |acc, (z, &k)| acc + z.norm_sqr() * (k + momentum) * (k + momentum))
            * self.grid.spacing
            / n;
        let pot = psi
            .iter()
            .zip(potential)
            .fold(T::zero(), |acc, (z, &v)| acc + z.norm_sqr() * v)
            * self.grid.spacing;
        kin + pot
    }
}
