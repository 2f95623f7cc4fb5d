//! Photon number versus atom number at fixed single-atom couplings.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::params::SimParams;

use super::steady::{find_steady_state, SteadyStateConfig};

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ScanPoint {
    pub n_atoms: f64,
    pub photons: f64,
}

/// n = a·N^b from a straight-line fit of ln n against ln N.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct PowerLaw {
    pub a: f64,
    pub b: f64,
}

/// Absolute steady-state photon numbers for each atom number.
///
/// `template` fixes the single-atom couplings through its (u0n, eta0rn) at
/// `template.n_atoms`; every point is rescaled from it. Points run in parallel.
pub fn photon_scan(template: &SimParams, n_atoms: &[f64], cfg: &SteadyStateConfig) -> Result<Vec<ScanPoint>> {
    let base = SimParams { grav: 0.0, ..*template };
    let grid = Grid::<f64>::new(&base)?;
    n_atoms
        .par_iter()
        .map(|&n| {
            let p = base.with_atom_number(n);
            let ss = find_steady_state(&p, &grid, 0.0, cfg)?;
            Ok(ScanPoint { n_atoms: n, photons: ss.state.cavity.photons(n) })
        })
        .collect()
}

pub fn fit_power_law(points: &[ScanPoint]) -> Result<PowerLaw> {
    if points.len() < 2 {
        return Err(Error::Fit(format!("power-law fit needs at least 2 points, got {}", points.len())));
    }
    if points.iter().any(|p| p.n_atoms <= 0.0 || p.photons <= 0.0) {
        return Err(Error::Fit("power-law fit needs positive N and n".into()));
    }
    let xs: Vec<f64> = points.iter().map(|p| p.n_atoms.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.photons.ln()).collect();
    let (slope, intercept, _) = crate::numerics::linear_regression(&xs, &ys)
        .ok_or_else(|| Error::Fit("degenerate atom numbers".into()))?;
    Ok(PowerLaw { a: intercept.exp(), b: slope })
}
