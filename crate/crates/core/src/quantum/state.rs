//! Quantum states on the position ⊗ Fock ⊗ Fock register and their photonic
//! phase-space portraits.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::golden_section;
use crate::scalar::Real;

use super::hamiltonian::{build_hamiltonian, QuantumConfig};
use super::lanczos::{lowest_eigenpair, LanczosConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Plus,
    Minus,
}

#[derive(Debug, Clone)]
pub struct QuantumState<T> {
    pub cfg: QuantumConfig,
    pub amplitudes: Vec<Complex<T>>,
}

fn to64<T: Real>(z: Complex<T>) -> Complex<f64> {
    Complex::new(z.re.as_f64(), z.im.as_f64())
}

fn ln_factorial(n: usize) -> f64 {
    (1..=n).map(|k| (k as f64).ln()).sum()
}

impl<T: Real> QuantumState<T> {
    pub fn new(cfg: QuantumConfig, amplitudes: Vec<Complex<T>>) -> Result<Self> {
        if amplitudes.len() != cfg.dim() {
            return Err(Error::InvalidParam(format!("expected {} amplitudes, got {}", cfg.dim(), amplitudes.len())));
        }
        let mut s = QuantumState { cfg, amplitudes };
        let n = s.norm();
        if n == 0.0 {
            return Err(Error::InvalidParam("zero state".into()));
        }
        let inv = T::lit(1.0 / n);
        s.amplitudes.iter_mut().for_each(|z| *z *= inv);
        Ok(s)
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr().as_f64()).sum::<f64>().sqrt()
    }

    #[inline]
    fn amp(&self, j: usize, np: usize, nm: usize) -> Complex<f64> {
        to64(self.amplitudes[self.cfg.index(j, np, nm)])
    }

    /// Reduced density matrix of one mode, row-major (cutoff+1)².
    pub fn reduced_density(&self, mode: Mode) -> Vec<Complex<f64>> {
        let f = self.cfg.fock_dim();
        let mut rho = vec![Complex::new(0.0, 0.0); f * f];
        for j in 0..self.cfg.n_sites {
            for other in 0..f {
                for a in 0..f {
                    for b in 0..f {
                        let (za, zb) = match mode {
                            Mode::Plus => (self.amp(j, a, other), self.amp(j, b, other)),
                            Mode::Minus => (self.amp(j, other, a), self.amp(j, other, b)),
                        };
                        rho[a * f + b] += za * zb.conj();
                    }
                }
            }
        }
        rho
    }

    /// ⟨a†a⟩ of one mode.
    pub fn photon_number(&self, mode: Mode) -> f64 {
        let f = self.cfg.fock_dim();
        let rho = self.reduced_density(mode);
        (0..f).map(|n| n as f64 * rho[n * f + n].re).sum()
    }

    /// Population of the highest Fock state kept.
    pub fn cutoff_population(&self, mode: Mode) -> f64 {
        let f = self.cfg.fock_dim();
        self.reduced_density(mode)[(f - 1) * f + f - 1].re
    }

    /// ⟨a⟩ of one mode.
    pub fn coherence(&self, mode: Mode) -> Complex<f64> {
        let f = self.cfg.fock_dim();
        let rho = self.reduced_density(mode);
        // Tr(ρa) = Σ_n √n ⟨n|ρ|n−1⟩
        (1..f).map(|n| rho[n * f + n - 1] * (n as f64).sqrt()).sum()
    }

    /// ⟨a⟩ conditioned on the atom at site `j` (unnormalized by the site probability).
    fn site_coherence(&self, mode: Mode, j: usize) -> (Complex<f64>, f64) {
        let f = self.cfg.fock_dim();
        let mut c = Complex::new(0.0, 0.0);
        let mut p = 0.0;
        for a in 0..f {
            for b in 0..f {
                let z = self.amp(j, a, b);
                p += z.norm_sqr();
                match mode {
                    Mode::Plus if a > 0 => c += self.amp(j, a - 1, b).conj() * z * (a as f64).sqrt(),
                    Mode::Minus if b > 0 => c += self.amp(j, a, b - 1).conj() * z * (b as f64).sqrt(),
                    _ => {}
                }
            }
        }
        (c, p)
    }

    /// Position probabilities P(x_j).
    pub fn position_density(&self) -> Vec<f64> {
        let f = self.cfg.fock_dim();
        (0..self.cfg.n_sites)
            .map(|j| {
                let base = self.cfg.index(j, 0, 0);
                self.amplitudes[base..base + f * f].iter().map(|z| z.norm_sqr().as_f64()).sum()
            })
            .collect()
    }

    /// Husimi Q(β) = ⟨β|ρ_mode|β⟩/π. Warns when the cutoff level holds more than 1e-6.
    pub fn q_function(&self, mode: Mode, betas: &[Complex<f64>]) -> Vec<f64> {
        let leak = self.cutoff_population(mode);
        if leak > 1e-6 {
            log::warn!("Fock population at the cutoff is {leak:.3e}; the Q function may be truncated");
        }
        self.q_values(mode, betas)
    }

    fn q_values(&self, mode: Mode, betas: &[Complex<f64>]) -> Vec<f64> {
        let f = self.cfg.fock_dim();
        let rho = self.reduced_density(mode);
        let lf: Vec<f64> = (0..f).map(|n| (0.5 * ln_factorial(n)).exp()).collect();
        betas
            .iter()
            .map(|&beta| {
                // c_n = ⟨n|β⟩ e^{|β|²/2} = β^n/√n!
                let mut c = Vec::with_capacity(f);
                let mut pw = Complex::new(1.0, 0.0);
                for &l in &lf {
                    c.push(pw / l);
                    pw *= beta;
                }
                let mut q = Complex::new(0.0, 0.0);
                for a in 0..f {
                    for b in 0..f {
                        q += c[a].conj() * rho[a * f + b] * c[b];
                    }
                }
                (q.re * (-beta.norm_sqr()).exp() / std::f64::consts::PI).max(0.0)
            })
            .collect()
    }

    /// Q on a square grid; rows scan Im β, columns Re β.
    pub fn q_grid(&self, mode: Mode, half_width: f64, points: usize) -> QGrid {
        let axis: Vec<f64> = (0..points).map(|i| -half_width + 2.0 * half_width * i as f64 / (points - 1) as f64).collect();
        let betas: Vec<Complex<f64>> = axis.iter().flat_map(|&im| axis.iter().map(move |&re| Complex::new(re, im))).collect();
        let q = self.q_function(mode, &betas);
        QGrid { betas, q }
    }

    /// ∫Q d²β on a polar grid (angular rule exact for the trigonometric polynomial in arg β).
    pub fn q_integral(&self, mode: Mode) -> Result<f64> {
        let f = self.cfg.fock_dim();
        let n_ang = 4 * f + 4;
        let r_max = (f as f64).sqrt() + 8.0;
        crate::numerics::integrate(
            |r| {
                let betas: Vec<Complex<f64>> = (0..n_ang)
                    .map(|k| Complex::from_polar(r, 2.0 * std::f64::consts::PI * k as f64 / n_ang as f64))
                    .collect();
                let mean = self.q_values(mode, &betas).iter().sum::<f64>() / n_ang as f64;
                2.0 * std::f64::consts::PI * r * mean
            },
            0.0,
            r_max,
            1e-10,
            2000,
        )
    }

    /// Q along the circle |β| = `radius`.
    pub fn angular_profile(&self, mode: Mode, radius: f64, n_angles: usize) -> Vec<f64> {
        let betas: Vec<Complex<f64>> = (0..n_angles)
            .map(|k| Complex::from_polar(radius, 2.0 * std::f64::consts::PI * k as f64 / n_angles as f64))
            .collect();
        self.q_values(mode, &betas)
    }

    /// Radius maximizing the angle-averaged Q, and the angular statistics there.
    pub fn ridge(&self, mode: Mode) -> Ridge {
        let n_ang = 4 * self.cfg.fock_dim() + 4;
        let avg = |r: f64| self.angular_profile(mode, r, n_ang).iter().sum::<f64>() / n_ang as f64;
        let r_max = (self.cfg.fock_dim() as f64).sqrt() + 3.0;
        let steps = 200;
        let (best, _) = (0..=steps)
            .map(|i| {
                let r = r_max * i as f64 / steps as f64;
                (r, avg(r))
            })
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .expect("non-empty");
        let h = r_max / steps as f64;
        let (radius, _) = golden_section(|r| -avg(r), (best - h).max(0.0), best + h, 1e-10);
        self.circle_stats(mode, radius)
    }

    /// Angular statistics on the circle through the global maximum of Q.
    pub fn lobe(&self, mode: Mode) -> Ridge {
        let r_max = (self.cfg.fock_dim() as f64).sqrt() + 3.0;
        let (n_r, n_a) = (120, 180);
        let betas: Vec<Complex<f64>> = (0..=n_r)
            .flat_map(|i| {
                let r = r_max * i as f64 / n_r as f64;
                (0..n_a).map(move |k| Complex::from_polar(r, 2.0 * std::f64::consts::PI * k as f64 / n_a as f64))
            })
            .collect();
        let q = self.q_values(mode, &betas);
        let k = (0..q.len()).max_by(|&a, &b| q[a].total_cmp(&q[b])).expect("non-empty");
        let (r0, a0) = (betas[k].norm(), betas[k].arg());
        let h = r_max / n_r as f64;
        let dr = |r: f64| -self.q_values(mode, &[Complex::from_polar(r, a0)])[0];
        let (radius, _) = golden_section(dr, (r0 - h).max(0.0), r0 + h, 1e-10);
        self.circle_stats(mode, radius)
    }

    fn circle_stats(&self, mode: Mode, radius: f64) -> Ridge {
        let profile = self.angular_profile(mode, radius, 360);
        let mean = profile.iter().sum::<f64>() / profile.len() as f64;
        let var = profile.iter().map(|q| (q - mean).powi(2)).sum::<f64>() / profile.len() as f64;
        let maxima = (0..profile.len())
            .filter(|&k| {
                let n = profile.len();
                let (p, c, nx) = (profile[(k + n - 1) % n], profile[k], profile[(k + 1) % n]);
                c > p && c >= nx
            })
            .count();
        let (lo, hi) = profile.iter().fold((f64::MAX, 0.0f64), |(a, b), &q| (a.min(q), b.max(q)));
        let peak_angle = profile
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map(|(k, _)| 2.0 * std::f64::consts::PI * k as f64 / profile.len() as f64)
            .unwrap_or(0.0);
        Ridge { radius, mean, std: var.sqrt(), min: lo, max: hi, maxima, peak_angle }
    }
}

/// Angular statistics of Q along a circle |β| = radius.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ridge {
    pub radius: f64,
    pub mean: f64,
    pub std: f64,
    pub min: f64,
    pub max: f64,
    /// Number of local maxima along the circle (360 samples).
    pub maxima: usize,
    pub peak_angle: f64,
}

impl Ridge {
    /// Rotationally symmetric within 5%.
    pub fn is_ring(&self) -> bool {
        self.mean > 0.0 && self.std < 0.05 * self.mean
    }

    /// One angular maximum with at least 2:1 contrast.
    pub fn is_single_lobe(&self) -> bool {
        self.maxima == 1 && self.min < 0.5 * self.max
    }
}

#[derive(Debug, Clone)]
pub struct QGrid {
    pub betas: Vec<Complex<f64>>,
    pub q: Vec<f64>,
}

/// Lowest eigenstate of the configured Hamiltonian.
pub fn ground_state<T: Real>(cfg: &QuantumConfig, lanczos: &LanczosConfig) -> Result<(f64, QuantumState<T>)> {
    let h = build_hamiltonian::<T>(cfg)?;
    let pair = lowest_eigenpair(&h, None, lanczos)?;
    log::debug!("ground state: E = {}, residual {:.2e}, {} restarts", pair.value, pair.residual, pair.restarts);
    Ok((pair.value.as_f64(), QuantumState::new(*cfg, pair.vector)?))
}

/// Truncated, renormalized coherent state |β⟩ in the Fock basis.
pub fn coherent_amplitudes(beta: Complex<f64>, fock_dim: usize) -> Vec<Complex<f64>> {
    let mut c = Vec::with_capacity(fock_dim);
    let mut pw = Complex::new(1.0, 0.0);
    for n in 0..fock_dim {
        c.push(pw / (0.5 * ln_factorial(n)).exp());
        pw *= beta;
    }
    let norm = c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    c.iter().map(|z| z / norm).collect()
}

/// Coherent-state amplitude used to collapse at atom position `x0`: radius from
/// the plus-mode Q ridge, phase from ⟨a+⟩ conditioned on the nearest site.
pub fn collapse_amplitude<T: Real>(state: &QuantumState<T>, x0: f64) -> Complex<f64> {
    let ridge = state.ridge(Mode::Plus);
    let n = state.cfg.n_sites;
    let j = ((x0 / state.cfg.spacing()).round() as isize).rem_euclid(n as isize) as usize;
    let (c, _) = state.site_coherence(Mode::Plus, j);
    Complex::from_polar(ridge.radius, c.arg())
}

/// Projects the plus mode onto the coherent state |β⟩ with β from
/// [`collapse_amplitude`]; position register and minus mode follow.
pub fn collapse<T: Real>(state: &QuantumState<T>, x0: f64) -> Result<QuantumState<T>> {
    let beta = collapse_amplitude(state, x0);
    collapse_onto(state, beta)
}

/// (1 ⊗ |β⟩⟨β| ⊗ 1)|Ψ⟩, renormalized.
pub fn collapse_onto<T: Real>(state: &QuantumState<T>, beta: Complex<f64>) -> Result<QuantumState<T>> {
    let cfg = state.cfg;
    let f = cfg.fock_dim();
    let coh = coherent_amplitudes(beta, f);
    let mut out = vec![Complex::new(T::zero(), T::zero()); cfg.dim()];
    let mut total = 0.0;
    for j in 0..cfg.n_sites {
        for m in 0..f {
            let overlap: Complex<f64> = (0..f).map(|n| coh[n].conj() * state.amp(j, n, m)).sum();
            for n in 0..f {
                let z = coh[n] * overlap;
                total += z.norm_sqr();
                out[cfg.index(j, n, m)] = Complex::new(T::lit(z.re), T::lit(z.im));
            }
        }
    }
    if total.sqrt() < 1e-10 {
        return Err(Error::ProjectionVanished(total.sqrt()));
    }
    QuantumState::new(cfg, out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vacuum(cfg: QuantumConfig) -> QuantumState<f64> {
        let mut v = vec![Complex::new(0.0, 0.0); cfg.dim()];
        for j in 0..cfg.n_sites {
            v[cfg.index(j, 0, 0)] = Complex::new(1.0, 0.0);
        }
        QuantumState::new(cfg, v).unwrap()
    }

    #[test]
    fn vacuum_q_is_gaussian() {
        let s = vacuum(QuantumConfig::default());
        for beta in [Complex::new(0.0, 0.0), Complex::new(0.7, -0.2), Complex::new(-1.5, 1.1)] {
            let q = s.q_function(Mode::Plus, &[beta])[0];
            let want = (-beta.norm_sqr()).exp() / std::f64::consts::PI;
            assert!((q - want).abs() < 1e-14);
        }
        assert!((s.q_integral(Mode::Minus).unwrap() - 1.0).abs() < 1e-3);
    }

    #[test]
    fn coherent_state_q_is_a_single_lobe() {
        let cfg = QuantumConfig { fock_cutoff: 12, n_sites: 4, ..QuantumConfig::default() };
        let beta = Complex::from_polar(1.5, 0.8);
        let coh = coherent_amplitudes(beta, cfg.fock_dim());
        let vac = coherent_amplitudes(Complex::new(0.0, 0.0), cfg.fock_dim());
        let mut v = vec![Complex::new(0.0, 0.0); cfg.dim()];
        for j in 0..cfg.n_sites {
            for a in 0..cfg.fock_dim() {
                for b in 0..cfg.fock_dim() {
                    v[cfg.index(j, a, b)] = coh[a] * vac[b];
                }
            }
        }
        let s = QuantumState::new(cfg, v).unwrap();
        let r = s.lobe(Mode::Plus);
        assert!(r.is_single_lobe());
        assert!((r.radius - 1.5).abs() < 0.01);
        assert!((r.peak_angle - 0.8).abs() < 0.02);
        assert!((s.coherence(Mode::Plus) - beta).norm() < 1e-3);
        assert!((s.q_integral(Mode::Plus).unwrap() - 1.0).abs() < 1e-3);
    }

    #[test]
    fn projection_onto_orthogonal_support_is_rejected() {
        // a state with the plus mode at the cutoff has vanishing overlap with |β≈0⟩ only if truncated;
        // use β = 0 against a pure |1⟩ plus-mode state
        let cfg = QuantumConfig { n_sites: 4, fock_cutoff: 2, ..QuantumConfig::default() };
        let mut v = vec![Complex::new(0.0, 0.0); cfg.dim()];
        v[cfg.index(0, 1, 0)] = Complex::new(1.0, 0.0);
        let s = QuantumState::new(cfg, v).unwrap();
        assert!(matches!(collapse_onto(&s, Complex::new(0.0, 0.0)), Err(Error::ProjectionVanished(_))));
    }
}
