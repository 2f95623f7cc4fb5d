//! Density moments, the superradiant lattice potential and the cavity equations.
//!
//! Mean-field cavity equations (per-atom amplitudes, collective couplings):
//!
//! ```text
//! dα+/dt = [i(Δc − NU0·norm) − κ] α+ − i NU0 B  α− − i √Nη0 Θ+
//! dα−/dt = [i(Δc − NU0·norm) − κ] α− − i NU0 B* α+ − i √Nη0 Θ−
//! ```
//!
//! with B = ∫|ψ|² e^{−2ix}, Θ+ = ∫|ψ|² e^{−ix}, Θ− = ∫|ψ|² e^{+ix} = Θ+*.
//! The conjugation pattern follows from [â+, â+†â− e^{−2ix}] = â− e^{−2ix}
//! and [â−, â−†â+ e^{2ix}] = â+ e^{2ix}.

use num_complex::Complex;

use crate::grid::Grid;
use crate::params::SimParams;
use crate::scalar::Real;

use super::state::{CavityState, CondensateState};

/// Density moments that close the cavity equations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrderParams<T> {
    /// B = ∫|ψ|² e^{−2ix} dx.
    pub bunching: Complex<T>,
    /// Θ+ = ∫|ψ|² e^{−ix} dx, the source of α+.
    pub theta_plus: Complex<T>,
    /// Θ− = ∫|ψ|² e^{+ix} dx, the source of α−.
    pub theta_minus: Complex<T>,
    pub norm: T,
}

impl<T: Real> OrderParams<T> {
    pub fn uniform() -> Self {
        let z = Complex::new(T::zero(), T::zero());
        OrderParams { bunching: z, theta_plus: z, theta_minus: z, norm: T::one() }
    }
}

/// e^{−ix_j} and e^{−2ix_j} lookup tables.
#[derive(Debug, Clone)]
pub(crate) struct PhaseTables<T> {
    pub e1: Vec<Complex<T>>,
    pub e2: Vec<Complex<T>>,
}

impl<T: Real> PhaseTables<T> {
    pub fn new(grid: &Grid<T>) -> Self {
        let e1 = grid.points.iter().map(|&x| Complex::from_polar(T::one(), -x)).collect();
        let e2 = grid
            .points
            .iter()
            .map(|&x| Complex::from_polar(T::one(), -(x + x)))
            .collect();
        PhaseTables { e1, e2 }
    }

    pub fn moments_of_density(&self, rho: impl Iterator<Item = T>, dx: T) -> OrderParams<T> {
        let zero = Complex::new(T::zero(), T::zero());
        let (mut b, mut th, mut n) = (zero, zero, T::zero());
        for ((r, e1), e2) in rho.zip(&self.e1).zip(&self.e2) {
            b += *e2 * r;
            th += *e1 * r;
            n += r;
        }
        let th = th * dx;
        OrderParams { bunching: b * dx, theta_plus: th, theta_minus: th.conj(), norm: n * dx }
    }
}

/// Riemann sums on the periodic grid (exact for band-limited periodic densities).
pub fn order_params<T: Real>(state: &CondensateState<T>, grid: &Grid<T>) -> OrderParams<T> {
    PhaseTables::new(grid).moments_of_density(state.psi.iter().map(|z| z.norm_sqr()), grid.spacing)
}

/// Evaluates ⟨V̂_SR(x)⟩ for the given amplitudes:
/// U0[|α+|² + |α−|² + 2Re(α+*α− e^{−2ix})] + 2η0 Re(α+ e^{ix} + α− e^{−ix}).
pub fn srpotential_at<T: Real>(cavity: &CavityState<T>, params: &SimParams, x: T) -> T {
    let u0 = T::lit(params.u0n);
    let eta = T::lit(params.eta0rn);
    let (ap, am) = (cavity.alpha_plus, cavity.alpha_minus);
    let two = T::lit(2.0);
    let e1 = Complex::from_polar(T::one(), x);
    let cross = ap.conj() * am * e1.conj() * e1.conj();
    u0 * (ap.norm_sqr() + am.norm_sqr() + two * cross.re) + two * eta * (ap * e1 + am * e1.conj()).re
}

pub fn srpotential<T: Real>(cavity: &CavityState<T>, params: &SimParams, grid: &Grid<T>) -> Vec<T> {
    grid.points.iter().map(|&x| srpotential_at(cavity, params, x)).collect()
}

/// Time derivative of (α+, α−) with the density moments held fixed.
pub fn cavity_rhs<T: Real>(
    cavity: &CavityState<T>,
    op: &OrderParams<T>,
    params: &SimParams,
) -> (Complex<T>, Complex<T>) {
    let u0 = T::lit(params.u0n);
    let eta = T::lit(params.eta0rn);
    let diag = Complex::new(-T::lit(params.kappa), T::lit(params.delta_c) - u0 * op.norm);
    let mi = Complex::new(T::zero(), -T::one());
    let (ap, am) = (cavity.alpha_plus, cavity.alpha_minus);
    let dp = diag * ap + mi * (op.bunching * am * u0 + op.theta_plus * eta);
    let dm = diag * am + mi * (op.bunching.conj() * ap * u0 + op.theta_minus * eta);
    (dp, dm)
}

/// Amplitudes with `cavity_rhs = 0` for the given moments (2×2 linear solve).
pub fn cavity_fixed_point<T: Real>(op: &OrderParams<T>, params: &SimParams) -> CavityState<T> {
    let u0 = T::lit(params.u0n);
    let eta = T::lit(params.eta0rn);
    let i = Complex::new(T::zero(), T::one());
    let d = Complex::new(-T::lit(params.kappa), T::lit(params.delta_c) - u0 * op.norm);
    // [d, −iU0B; −iU0B*, d] (α+, α−) = (iηΘ+, iηΘ−)
    let off_p = -i * op.bunching * u0;
    let off_m = -i * op.bunching.conj() * u0;
    let rp = i * op.theta_plus * eta;
    let rm = i * op.theta_minus * eta;
    let det = d * d - off_p * off_m;
    CavityState {
        alpha_plus: (rp * d - off_p * rm) / det,
        alpha_minus: (d * rm - off_m * rp) / det,
    }
}
