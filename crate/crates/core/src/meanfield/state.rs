use num_complex::Complex;
use num_traits::Zero;

use crate::grid::Grid;
use crate::scalar::Real;

/// Mean-field cavity amplitudes α± = ⟨â±⟩/√N.
///
/// With this scaling |α±|² is the photon number per atom; the absolute
/// photon number is `N·|α±|²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CavityState<T> {
    pub alpha_plus: Complex<T>,
    pub alpha_minus: Complex<T>,
}

impl<T: Real> CavityState<T> {
    pub fn new(alpha_plus: Complex<T>, alpha_minus: Complex<T>) -> Self {
        CavityState { alpha_plus, alpha_minus }
    }

    pub fn empty() -> Self {
        CavityState { alpha_plus: Complex::zero(), alpha_minus: Complex::zero() }
    }

    /// Per-atom photon number |α+|² + |α−|².
    pub fn photons_per_atom(&self) -> T {
        self.alpha_plus.norm_sqr() + self.alpha_minus.norm_sqr()
    }

    /// Absolute photon number for `n_atoms` atoms.
    pub fn photons(&self, n_atoms: f64) -> f64 {
        n_atoms * self.photons_per_atom().as_f64()
    }

    pub fn is_finite(&self) -> bool {
        self.alpha_plus.re.is_finite()
            && self.alpha_plus.im.is_finite()
            && self.alpha_minus.re.is_finite()
            && self.alpha_minus.im.is_finite()
    }

    /// Image under the joint translation x → x + X: α± → α± e^{∓iX}.
    pub fn translated(&self, shift: T) -> Self {
        CavityState {
            alpha_plus: self.alpha_plus * Complex::from_polar(T::one(), -shift),
            alpha_minus: self.alpha_minus * Complex::from_polar(T::one(), shift),
        }
    }
}

/// Condensate wavefunction sampled on the grid, normalized to ∫|ψ|²dx = 1.
#[derive(Debug, Clone, PartialEq)]
pub struct CondensateState<T> {
    pub psi: Vec<Complex<T>>,
}

impl<T: Real> CondensateState<T> {
    pub fn uniform(grid: &Grid<T>) -> Self {
        let amp = (T::one() / grid.length).sqrt();
        CondensateState { psi: vec![Complex::new(amp, T::zero()); grid.len()] }
    }

    /// Normalized copy of an arbitrary sampled profile.
    pub fn from_samples(mut psi: Vec<Complex<T>>, grid: &Grid<T>) -> Self {
        let n = norm_of(&psi, grid.spacing);
        let s = T::one() / n.sqrt();
        psi.iter_mut().for_each(|z| *z *= s);
        CondensateState { psi }
    }

    pub fn norm(&self, grid: &Grid<T>) -> T {
        norm_of(&self.psi, grid.spacing)
    }

    pub fn density(&self) -> Vec<T> {
        self.psi.iter().map(|z| z.norm_sqr()).collect()
    }

    pub fn normalize(&mut self, grid: &Grid<T>) {
        let s = T::one() / self.norm(grid).sqrt();
        self.psi.iter_mut().for_each(|z| *z *= s);
    }

    /// Cyclic translation by a whole number of grid cells.
    pub fn shifted_by_cells(&self, cells: usize) -> Self {
        let n = self.psi.len();
        let mut psi = vec![Complex::zero(); n];
        for (j, z) in self.psi.iter().enumerate() {
            psi[(j + cells) % n] = *z;
        }
        CondensateState { psi }
    }
}

pub(crate) fn norm_of<T: Real>(psi: &[Complex<T>], dx: T) -> T {
    psi.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr()) * dx
}

/// Condensate, cavity and clock.
///
/// Gravity is carried in the gauge ψ_lab(x) = e^{i q x} ψ(x) where the
/// `frame_momentum` q drifts as dq/dt = F = −grav/2π and is folded back into
/// [−Δk/2, Δk/2) by integer momentum shifts of ψ, so `condensate` stays
/// periodic on the box. All density-derived observables are gauge invariant.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemState<T> {
    pub condensate: CondensateState<T>,
    pub cavity: CavityState<T>,
    pub time: T,
    pub frame_momentum: T,
}

impl<T: Real> SystemState<T> {
    pub fn new(condensate: CondensateState<T>, cavity: CavityState<T>) -> Self {
        SystemState { condensate, cavity, time: T::zero(), frame_momentum: T::zero() }
    }

    /// Galilean kick: multiplies the lab-frame wavefunction by e^{i k x}.
    pub fn kick(&mut self, momentum: T) {
        self.frame_momentum += momentum;
    }
}
