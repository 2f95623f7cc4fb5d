//! Observables extracted from simulation snapshots and their time series.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::meanfield::{CavityState, CondensateState, SystemState};
use crate::scalar::Real;

/// Sign s in r(t) = Δφ + s·k_c·Δx.
///
/// V_SR ∝ cos²(k_c x + φ) is invariant under x → x + δ, φ → φ − k_c δ, so a
/// condensate dragging its lattice by Δx changes φ by −k_c Δx.
pub const DRAG_SIGN: f64 = 1.0;

/// Maps an angle onto (−π/2, π/2].
pub fn wrap_half_period(x: f64) -> f64 {
    FRAC_PI_2 - (FRAC_PI_2 - x).rem_euclid(PI)
}

fn checked_args<T: Real>(c: &CavityState<T>) -> Result<(f64, f64)> {
    let (p, m) = (c.alpha_plus.norm().as_f64(), c.alpha_minus.norm().as_f64());
    if p < 1e-12 || m < 1e-12 {
        return Err(Error::UndefinedPhase(p.min(m)));
    }
    Ok((c.alpha_plus.arg().as_f64(), c.alpha_minus.arg().as_f64()))
}

/// Relative phase φ = (φ+ − φ−)/2 on the branch (−π/2, π/2].
pub fn rel_phase<T: Real>(cavity: &CavityState<T>) -> Result<f64> {
    let (p, m) = checked_args(cavity)?;
    Ok(wrap_half_period(0.5 * (p - m)))
}

/// Total phase Φ = (φ+ + φ−)/2 on the branch (−π/2, π/2].
pub fn tot_phase<T: Real>(cavity: &CavityState<T>) -> Result<f64> {
    let (p, m) = checked_args(cavity)?;
    Ok(wrap_half_period(0.5 * (p + m)))
}

/// Circular-mean center of mass in [0, L), in units of 1/k_c.
pub fn center_of_mass<T: Real>(state: &CondensateState<T>, grid: &Grid<T>) -> Result<f64> {
    center_of_mass_mod(state, grid, grid.length.as_f64())
}

/// Circular mean of the density with respect to `period`, in [0, period).
///
/// A lattice-periodic density spanning several cells has no harmonic at the box
/// length, so its position is only defined modulo the lattice period 2π.
pub fn center_of_mass_mod<T: Real>(state: &CondensateState<T>, grid: &Grid<T>, period: f64) -> Result<f64> {
    let (m, total) = harmonic(state, grid, period);
    if total <= 0.0 || m.norm() < 1e-12 * total {
        return Err(Error::UndefinedCom(m.norm() / total.max(f64::MIN_POSITIVE)));
    }
    Ok((m.arg() * period / (2.0 * PI)).rem_euclid(period))
}

fn harmonic<T: Real>(state: &CondensateState<T>, grid: &Grid<T>, period: f64) -> (Complex<f64>, f64) {
    let mut m = Complex::new(0.0, 0.0);
    let mut total = 0.0;
    for (z, &x) in state.psi.iter().zip(&grid.points) {
        let r = z.norm_sqr().as_f64();
        m += Complex::from_polar(r, 2.0 * PI * x.as_f64() / period);
        total += r;
    }
    (m, total)
}

/// Period used for COM tracking: the box length when the density resolves it,
/// otherwise the lattice period 2π.
fn com_period<T: Real>(state: &CondensateState<T>, grid: &Grid<T>) -> f64 {
    let l = grid.length.as_f64();
    let (m, total) = harmonic(state, grid, l);
    if m.norm() >= 1e-6 * total || grid.box_len == 1 {
        l
    } else {
        2.0 * PI
    }
}

/// Homodyne mean ⟨Q̂⟩ = Re[(α+ + α−) e^{−iγ}] for the combined quadrature.
///
/// For equal amplitudes |α| this is 2|α| cos φ cos(Φ − γ).
pub fn homodyne_expectation<T: Real>(cavity: &CavityState<T>, gamma: f64) -> f64 {
    let (p, m) = (cavity.alpha_plus.norm().as_f64(), cavity.alpha_minus.norm().as_f64());
    if (p - m).abs() > 0.05 * p.max(m) {
        log::warn!("homodyne readout with unequal mode amplitudes {p:.4} vs {m:.4}");
    }
    let a = cavity.alpha_plus + cavity.alpha_minus;
    let a = Complex::new(a.re.as_f64(), a.im.as_f64());
    (a * Complex::from_polar(1.0, -gamma)).re
}

/// Continues a sequence of angles known modulo `period` by minimal jumps.
#[derive(Debug, Clone, Default)]
pub struct Unwrapper {
    period: f64,
    last_raw: Option<f64>,
    value: f64,
}

impl Unwrapper {
    pub fn new(period: f64) -> Self {
        Unwrapper { period, last_raw: None, value: 0.0 }
    }

    pub fn push(&mut self, raw: f64) -> f64 {
        match self.last_raw {
            None => self.value = raw,
            Some(prev) => {
                let mut d = raw - prev;
                d -= self.period * (d / self.period).round();
                self.value += d;
            }
        }
        self.last_raw = Some(raw);
        self.value
    }
}

pub fn unwrap_series(raw: &[f64], period: f64) -> Vec<f64> {
    let mut u = Unwrapper::new(period);
    raw.iter().map(|&r| u.push(r)).collect()
}

/// Time series of cavity and condensate observables.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Trace {
    pub times: Vec<f64>,
    /// Unwrapped relative phase φ(t).
    pub rel_phase: Vec<f64>,
    /// Unwrapped total phase Φ(t).
    pub tot_phase: Vec<f64>,
    /// COM displacement from the first sample, k_c·x.
    pub com: Vec<f64>,
    /// Absolute photon numbers N|α±|².
    pub n_plus: Vec<f64>,
    pub n_minus: Vec<f64>,
    pub norm: Vec<f64>,
    /// Per-atom amplitudes α±.
    pub alpha_plus: Vec<Complex<f64>>,
    pub alpha_minus: Vec<Complex<f64>>,
}

impl Trace {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Checks the sampling contract: increasing times, phase jumps below π/2, norm within 1e-8.
    pub fn validate(&self) -> Result<()> {
        for w in self.times.windows(2) {
            if w[1] <= w[0] {
                return Err(Error::Format(format!("trace times not increasing at t = {}", w[1])));
            }
        }
        for series in [&self.rel_phase, &self.tot_phase] {
            for w in series.windows(2) {
                if (w[1] - w[0]).abs() >= FRAC_PI_2 {
                    return Err(Error::Format("adjacent phase jump >= π/2; sample more densely".into()));
                }
            }
        }
        if let Some(n) = self.norm.iter().find(|n| (**n - 1.0).abs() > 1e-8) {
            return Err(Error::Format(format!("trace norm {n} deviates from 1")));
        }
        Ok(())
    }

    /// Keeps samples with `lo <= t <= hi`.
    pub fn window(&self, lo: f64, hi: f64) -> Trace {
        let keep: Vec<usize> = (0..self.len()).filter(|&i| self.times[i] >= lo && self.times[i] <= hi).collect();
        let pick = |v: &Vec<f64>| keep.iter().map(|&i| v[i]).collect::<Vec<_>>();
        let pickc = |v: &Vec<Complex<f64>>| keep.iter().map(|&i| v[i]).collect::<Vec<_>>();
        Trace {
            times: pick(&self.times),
            rel_phase: pick(&self.rel_phase),
            tot_phase: pick(&self.tot_phase),
            com: pick(&self.com),
            n_plus: pick(&self.n_plus),
            n_minus: pick(&self.n_minus),
            norm: pick(&self.norm),
            alpha_plus: pickc(&self.alpha_plus),
            alpha_minus: pickc(&self.alpha_minus),
        }
    }
}

/// Assembles a [`Trace`] sample by sample, unwrapping phases and COM.
#[derive(Debug, Clone)]
pub struct TraceBuilder {
    trace: Trace,
    n_atoms: f64,
    rel: Unwrapper,
    tot: Unwrapper,
    com: Option<(f64, Unwrapper)>,
    com0: f64,
}

impl TraceBuilder {
    pub fn new(n_atoms: f64) -> Self {
        TraceBuilder {
            trace: Trace::default(),
            n_atoms,
            rel: Unwrapper::new(PI),
            tot: Unwrapper::new(PI),
            com: None,
            com0: 0.0,
        }
    }

    pub fn push<T: Real>(&mut self, state: &SystemState<T>, grid: &Grid<T>) -> Result<()> {
        let c = &state.cavity;
        let phi = self.rel.push(rel_phase(c)?);
        let big_phi = self.tot.push(tot_phase(c)?);
        // the tracking period is fixed by the first sample
        let (period, unwrap) = self.com.get_or_insert_with(|| {
            let p = com_period(&state.condensate, grid);
            (p, Unwrapper::new(p))
        });
        let x = unwrap.push(center_of_mass_mod(&state.condensate, grid, *period)?);
        if self.trace.is_empty() {
            self.com0 = x;
        }
        let x0 = self.com0;
        let t = &mut self.trace;
        t.times.push(state.time.as_f64());
        t.rel_phase.push(phi);
        t.tot_phase.push(big_phi);
        t.com.push(x - x0);
        let ap = Complex::new(c.alpha_plus.re.as_f64(), c.alpha_plus.im.as_f64());
        let am = Complex::new(c.alpha_minus.re.as_f64(), c.alpha_minus.im.as_f64());
        t.n_plus.push(self.n_atoms * ap.norm_sqr());
        t.n_minus.push(self.n_atoms * am.norm_sqr());
        t.norm.push(state.condensate.norm(grid).as_f64());
        t.alpha_plus.push(ap);
        t.alpha_minus.push(am);
        Ok(())
    }

    pub fn finish(self) -> Trace {
        self.trace
    }
}

/// r(t) = [φ(t) − φ(0)] + s·[x(t) − x(0)] with s = [`DRAG_SIGN`].
pub fn dragging_residual(trace: &Trace) -> Vec<f64> {
    let (Some(&phi0), Some(&x0)) = (trace.rel_phase.first(), trace.com.first()) else {
        return Vec::new();
    };
    trace
        .rel_phase
        .iter()
        .zip(&trace.com)
        .map(|(&phi, &x)| (phi - phi0) + DRAG_SIGN * (x - x0))
        .collect()
}
