//! Physical parameters in recoil units and the bridge to SI.
//!
//! Units: ħ = 1, k_c = 1, ω_r = ħk_c²/2M = 1, hence M = 1/2 and λc = 2π.
//! Energies are in ħω_r, times in 1/ω_r, lengths in 1/k_c.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// All physical and numerical inputs of a mean-field run.
///
/// The atom-cavity couplings enter only through the collective combinations
/// `u0n = N·U0` and `eta0rn = √N·η0`; the condensate is normalized to one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimParams {
    /// Cavity detuning Δc = ω_p − ω_c in ω_r.
    pub delta_c: f64,
    /// Photon loss rate κ in ω_r.
    pub kappa: f64,
    /// Collective dispersive shift N·U0 in ħω_r.
    pub u0n: f64,
    /// Collective pump strength √N·η0 in ħω_r.
    pub eta0rn: f64,
    /// Dimensionless gravity M g sinθ λc / ħω_r.
    pub grav: f64,
    /// Atom number N.
    pub n_atoms: f64,
    /// Box length in units of λc; must be a positive integer.
    pub box_len: f64,
    /// Number of grid points; a power of two, at least 8.
    pub n_grid: usize,
    /// Real-time step in 1/ω_r.
    pub dt: f64,
}

impl Default for SimParams {
    /// Free-fall configuration: (Δc, κ) = (−8, 1)ω_r, (√Nη0, NU0, Mg sinθ λc) = (20, −1, 10)ħω_r.
    fn default() -> Self {
        SimParams {
            delta_c: -8.0,
            kappa: 1.0,
            u0n: -1.0,
            eta0rn: 20.0,
            grav: 10.0,
            n_atoms: 5.0e5,
            box_len: 8.0,
            n_grid: 512,
            dt: 1.25e-4,
        }
    }
}

impl SimParams {
    pub fn validate(&self) -> Result<()> {
        let finite = [
            ("delta_c", self.delta_c),
            ("kappa", self.kappa),
            ("u0n", self.u0n),
            ("eta0rn", self.eta0rn),
            ("grav", self.grav),
            ("n_atoms", self.n_atoms),
            ("box_len", self.box_len),
            ("dt", self.dt),
        ];
        for (name, v) in finite {
            if !v.is_finite() {
                return Err(Error::InvalidParam(format!("{name} must be finite, got {v}")));
            }
        }
        if self.kappa < 0.0 {
            return Err(Error::InvalidParam(format!("kappa must be >= 0, got {}", self.kappa)));
        }
        if self.n_grid < 8 || !self.n_grid.is_power_of_two() {
            return Err(Error::InvalidParam(format!(
                "n_grid must be a power of two >= 8, got {}",
                self.n_grid
            )));
        }
        if self.box_len < 1.0 || self.box_len.fract() != 0.0 {
            return Err(Error::InvalidParam(format!(
                "box_len must be a positive integer, got {}",
                self.box_len
            )));
        }
        if self.dt <= 0.0 {
            return Err(Error::InvalidParam(format!("dt must be > 0, got {}", self.dt)));
        }
        if self.n_atoms <= 0.0 {
            return Err(Error::InvalidParam(format!("n_atoms must be > 0, got {}", self.n_atoms)));
        }
        Ok(())
    }

    /// Box length in units of 1/k_c.
    pub fn length(&self) -> f64 {
        self.box_len * 2.0 * PI
    }

    /// Uniform force −dV_g/dx in ħω_r k_c.
    pub fn force(&self) -> f64 {
        -self.grav / (2.0 * PI)
    }

    /// g·k_c in ω_r² (M = 1/2, λc = 2π).
    pub fn g_kc(&self) -> f64 {
        self.grav / PI
    }

    /// Parameters for atom number `n` at fixed single-atom couplings, rescaled from `self.n_atoms`.
    pub fn with_atom_number(&self, n: f64) -> SimParams {
        let ratio = n / self.n_atoms;
        SimParams {
            u0n: self.u0n * ratio,
            eta0rn: self.eta0rn * ratio.sqrt(),
            n_atoms: n,
            ..*self
        }
    }
}

pub const HBAR: f64 = 1.054_571_817e-34;
pub const ATOMIC_MASS_UNIT: f64 = 1.660_539_066_60e-27;
pub const RB87_MASS: f64 = 86.909_180_527 * ATOMIC_MASS_UNIT;

/// Conversion between recoil units and SI for one atomic species and cavity wavelength.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RecoilUnits {
    /// Cavity wave number k_c in 1/m.
    pub k_c: f64,
    /// Atomic mass in kg.
    pub mass: f64,
}

impl RecoilUnits {
    /// ⁸⁷Rb on the 780 nm line.
    pub fn rb87_780nm() -> Self {
        RecoilUnits {
            k_c: 2.0 * PI / 780e-9,
            mass: RB87_MASS,
        }
    }

    /// ω_r = ħk_c²/2M in 1/s.
    pub fn omega_r(&self) -> f64 {
        HBAR * self.k_c * self.k_c / (2.0 * self.mass)
    }

    pub fn lambda_c(&self) -> f64 {
        2.0 * PI / self.k_c
    }

    /// Dimensionless gravity M g sinθ λc / ħω_r from an SI acceleration component g sinθ.
    pub fn grav_from_si(&self, g_sin_theta: f64) -> f64 {
        self.mass * g_sin_theta * self.lambda_c() / (HBAR * self.omega_r())
    }

    /// Inverse of [`RecoilUnits::grav_from_si`].
    pub fn grav_to_si(&self, grav: f64) -> f64 {
        grav * HBAR * self.omega_r() / (self.mass * self.lambda_c())
    }

    pub fn rate_to_si(&self, rate_recoil: f64) -> f64 {
        rate_recoil * self.omega_r()
    }

    pub fn rate_from_si(&self, rate_si: f64) -> f64 {
        rate_si / self.omega_r()
    }

    pub fn time_to_si(&self, t_recoil: f64) -> f64 {
        t_recoil / self.omega_r()
    }

    pub fn time_from_si(&self, t_si: f64) -> f64 {
        t_si * self.omega_r()
    }
}
