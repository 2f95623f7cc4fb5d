//! Periodic one-dimensional grid.

use crate::error::Result;
use crate::params::SimParams;
use crate::scalar::Real;

/// Uniform periodic grid on [0, L), L = box_len·2π.
///
/// `wavenumbers` follow the FFT output order: `0, 1, …, n/2 − 1, −n/2, …, −1`
/// in units of 2π/L.
#[derive(Debug, Clone)]
pub struct Grid<T> {
    pub points: Vec<T>,
    pub wavenumbers: Vec<T>,
    pub spacing: T,
    pub length: T,
    pub box_len: usize,
}

impl<T: Real> Grid<T> {
    pub fn new(params: &SimParams) -> Result<Self> {
        params.validate()?;
        Ok(Self::from_parts(params.box_len as usize, params.n_grid))
    }

    /// Grid without a full parameter set; `box_len` and `n` must already be valid.
    pub fn from_parts(box_len: usize, n: usize) -> Self {
        let length = T::lit(box_len as f64 * 2.0 * std::f64::consts::PI);
        let spacing = length / T::lit(n as f64);
        let points = (0..n).map(|j| T::lit(j as f64) * spacing).collect();
        let dk = T::lit(2.0 * std::f64::consts::PI) / length;
        let wavenumbers = (0..n)
            .map(|j| {
                let m = if j < n / 2 { j as f64 } else { j as f64 - n as f64 };
                T::lit(m) * dk
            })
            .collect();
        Grid {
            points,
            wavenumbers,
            spacing,
            length,
            box_len,
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Shorthand for [`Grid::new`].
pub fn make_grid<T: Real>(params: &SimParams) -> Result<Grid<T>> {
    Grid::new(params)
}

/// Gravitational potential V_g(x) = M g sinθ x = (grav/2π)·x in ħω_r, unwrapped on [0, L).
pub fn grav_potential<T: Real>(grid: &Grid<T>, params: &SimParams) -> Vec<T> {
    let slope = T::lit(params.grav / (2.0 * std::f64::consts::PI));
    grid.points.iter().map(|&x| slope * x).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn params(box_len: f64, n_grid: usize) -> SimParams {
        SimParams { box_len, n_grid, ..SimParams::default() }
    }

    #[test]
    fn spacing_definition() {
        let g: Grid<f64> = make_grid(&params(1.0, 8)).unwrap();
        assert!((g.spacing - 2.0 * PI / 8.0).abs() < 1e-15);
        let g: Grid<f64> = make_grid(&params(8.0, 256)).unwrap();
        assert!((g.spacing - PI / 16.0).abs() < 1e-15);
        assert!(make_grid::<f64>(&params(8.0, 250)).is_err());
    }

    #[test]
    fn lattice_wavenumber_is_on_grid() {
        let g: Grid<f64> = make_grid(&params(8.0, 256)).unwrap();
        assert_eq!(g.wavenumbers[8], 1.0);
        assert_eq!(g.wavenumbers[256 - 8], -1.0);
        assert_eq!(g.wavenumbers[128], -16.0);
    }

    #[test]
    fn gravity_potential_values() {
        let p = SimParams { grav: 0.0, ..params(1.0, 8) };
        let g: Grid<f64> = make_grid(&p).unwrap();
        assert!(grav_potential(&g, &p).iter().all(|&v| v == 0.0));

        let p = SimParams { grav: 10.0, ..params(2.0, 8) };
        let g: Grid<f64> = make_grid(&p).unwrap();
        let v = grav_potential(&g, &p);
        // x_4 = 2π and x_2 = π on a 4π box with 8 points
        assert!((v[4] - 10.0).abs() < 1e-12);
        assert!((v[2] - 5.0).abs() < 1e-12);
        // superposition on grid points
        for i in 0..4 {
            assert!((v[i + 4] - (v[i] + v[4])).abs() < 1e-12);
        }
    }

    #[test]
    fn single_precision_grid() {
        let g: Grid<f32> = make_grid(&params(1.0, 16)).unwrap();
        assert!((g.spacing - (2.0 * std::f32::consts::PI / 16.0)).abs() < 1e-6);
    }
}
