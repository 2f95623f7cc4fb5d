//! Error propagation, homodyne statistics and Fisher information in SI units.
//!
//! Times are in seconds and g in m s⁻². The calibrated friction `xi` is given in
//! units of ω_r (as produced by a recoil-unit fit) and converted with
//! `MetrologyParams::omega_r`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::integrate;
use crate::params::RecoilUnits;

use super::heuristic::{heuristic_phase, ramp};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetrologyParams {
    /// Mean total intracavity photon number n = |α+|² + |α−|².
    pub n_photons: f64,
    /// Number of repetitions m.
    pub m_repeats: f64,
    /// Cavity wave number in 1/m.
    pub k_c: f64,
    /// Recoil frequency in 1/s.
    pub omega_r: f64,
    /// Reference gravitational acceleration in m s⁻².
    pub g_true: f64,
    /// Fraction of intracavity photons that reach the detector.
    #[serde(default = "unit")]
    pub detection_efficiency: f64,
}

fn unit() -> f64 {
    1.0
}

impl MetrologyParams {
    /// N = 5×10⁵ ⁸⁷Rb atoms, n = 2.5×10¹¹, g = 9.81 m s⁻², λc = 780 nm, m = 1.
    pub fn rb87_reference() -> Self {
        let u = RecoilUnits::rb87_780nm();
        MetrologyParams {
            n_photons: 2.5e11,
            m_repeats: 1.0,
            k_c: u.k_c,
            omega_r: u.omega_r(),
            g_true: 9.81,
            detection_efficiency: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let all = [self.n_photons, self.m_repeats, self.k_c, self.omega_r, self.g_true, self.detection_efficiency];
        if all.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::InvalidParam("metrology parameters must be positive".into()));
        }
        Ok(())
    }

    /// Detected photon number.
    pub fn n_eff(&self) -> f64 {
        self.n_photons * self.detection_efficiency
    }

    fn xi_si(&self, xi: f64) -> f64 {
        xi * self.omega_r
    }

    /// ∂φ/∂g = ζ k_c (e^{−ξt} + ξt − 1)/ξ² in rad per m s⁻².
    pub fn phase_slope(&self, t: f64, xi: f64, zeta: f64) -> f64 {
        zeta * self.k_c * ramp(self.xi_si(xi), t)
    }

    /// φ(t, g) with ξ in ω_r and t in s.
    pub fn phase(&self, t: f64, g: f64, xi: f64, zeta: f64, phi0: f64) -> f64 {
        heuristic_phase(t, g, self.k_c, self.xi_si(xi), zeta, phi0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sensitivity {
    pub dg: f64,
    pub dg_rel: f64,
}

/// Δg = [4nm (ζ k_c/ξ² (e^{−ξt} + ξt − 1))²]^{−1/2}, using the coherent-state
/// phase uncertainty Δφ = 1/(2√n). Returns +∞ at t = 0.
pub fn sensitivity(t: f64, mp: &MetrologyParams, xi: f64, zeta: f64) -> Sensitivity {
    let slope = mp.phase_slope(t, xi, zeta);
    let dg = 1.0 / (2.0 * (mp.n_eff() * mp.m_repeats).sqrt() * slope.abs());
    Sensitivity { dg, dg_rel: dg / mp.g_true }
}

/// p(q|g) = √(2/π) exp(−2(q − √n cos φ)²) at the locked local-oscillator phase Φ − γ = jπ.
pub fn homodyne_pdf(q: f64, g: f64, t: f64, mp: &MetrologyParams, xi: f64, zeta: f64, phi0: f64) -> f64 {
    let mean = mp.n_eff().sqrt() * mp.phase(t, g, xi, zeta, phi0).cos();
    (2.0 / PI).sqrt() * (-2.0 * (q - mean).powi(2)).exp()
}

/// Closed-form homodyne Fisher information F = 4n (∂φ/∂g)² sin²φ.
pub fn fisher_classical(t: f64, g: f64, mp: &MetrologyParams, xi: f64, zeta: f64, phi0: f64) -> f64 {
    let s = mp.phase(t, g, xi, zeta, phi0).sin();
    fisher_quantum(t, mp, xi, zeta) * s * s
}

/// Quantum Fisher information of the coherent relative-phase state, F_q = 4n (∂φ/∂g)².
pub fn fisher_quantum(t: f64, mp: &MetrologyParams, xi: f64, zeta: f64) -> f64 {
    let d = mp.phase_slope(t, xi, zeta);
    4.0 * mp.n_eff() * d * d
}

/// F = ∫ dq (∂_g p)²/p by adaptive quadrature, with ∂_g p from a
/// Richardson-extrapolated central difference. Independent of the closed form.
pub fn fisher_classical_numeric(t: f64, g: f64, mp: &MetrologyParams, xi: f64, zeta: f64, phi0: f64) -> Result<f64> {
    let sqrt_n = mp.n_eff().sqrt();
    // φ is linear in g; perturbing the phase directly avoids differencing two large phases
    let phi = mp.phase(t, g, xi, zeta, phi0);
    let slope = mp.phase_slope(t, xi, zeta);
    // keep the mean shift under the step far below the width 1/2
    let mut h = 1e-3 * g.abs().max(1.0);
    for _ in 0..200 {
        if sqrt_n * (2.0 * slope * h).abs() < 1e-3 {
            break;
        }
        h *= 0.5;
    }
    let (sin_phi, cos_phi) = phi.sin_cos();
    // integrate over y = q − √n cos φ; the mean shift is formed directly so it
    // is not lost against √n in floating point
    let pdf = |y: f64, dg: f64| {
        let d = slope * dg;
        let shift = -sqrt_n * (2.0 * cos_phi * (0.5 * d).sin().powi(2) + sin_phi * d.sin());
        (2.0 / PI).sqrt() * (-2.0 * (y - shift).powi(2)).exp()
    };
    let deriv = |y: f64| {
        let d = |s: f64| (pdf(y, s) - pdf(y, -s)) / (2.0 * s);
        (4.0 * d(0.5 * h) - d(h)) / 3.0
    };
    let integrand = |y: f64| {
        let p = pdf(y, 0.0);
        if p <= 0.0 {
            0.0
        } else {
            deriv(y).powi(2) / p
        }
    };
    integrate(integrand, -8.0, 8.0, 1e-11, 4000)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig3() -> (MetrologyParams, f64, f64) {
        (MetrologyParams::rb87_reference(), 0.167, 0.007)
    }

    #[test]
    fn reference_sensitivity_at_one_second() {
        let (mp, xi, zeta) = fig3();
        // independent evaluation with ω_r from ħ k²/2M
        let hbar = 1.054_571_817e-34;
        let m = 86.909_180_527 * 1.660_539_066_60e-27;
        let k = 2.0 * PI / 780e-9;
        let wr = hbar * k * k / (2.0 * m);
        let x = xi * wr;
        let f = ((-x).exp() + x - 1.0) / (x * x);
        let want = 1.0 / (2.0 * (2.5e11f64).sqrt() * zeta * k * f) / 9.81;
        let got = sensitivity(1.0, &mp, xi, zeta).dg_rel;
        assert!((got / want - 1.0).abs() < 1e-10);
        assert!(got > 3.5e-9 && got < 1.4e-8, "{got}");
    }

    #[test]
    fn sensitivity_scalings() {
        let (mp, xi, zeta) = fig3();
        let a = sensitivity(2.0, &mp, xi, zeta).dg;
        let mp4 = MetrologyParams { n_photons: 4.0 * mp.n_photons, ..mp };
        assert!((sensitivity(2.0, &mp4, xi, zeta).dg / a - 0.5).abs() < 1e-12);
        let (b, c) = (sensitivity(100.0, &mp, xi, zeta).dg, sensitivity(200.0, &mp, xi, zeta).dg);
        assert!((b / c - 2.0).abs() < 1e-4);
        assert!(sensitivity(0.0, &mp, xi, zeta).dg.is_infinite());
    }

    #[test]
    fn pdf_moments() {
        let (mp, xi, zeta) = fig3();
        let mp = MetrologyParams { n_photons: 1e4, ..mp };
        let (g, t, phi0) = (9.81, 0.013, 0.2);
        let mean = 100.0 * mp.phase(t, g, xi, zeta, phi0).cos();
        let p = |q: f64| homodyne_pdf(q, g, t, &mp, xi, zeta, phi0);
        let m0 = integrate(p, mean - 10.0, mean + 10.0, 1e-13, 200).unwrap();
        let m1 = integrate(|q| q * p(q), mean - 10.0, mean + 10.0, 1e-13, 200).unwrap();
        let m2 = integrate(|q| (q - mean).powi(2) * p(q), mean - 10.0, mean + 10.0, 1e-13, 200).unwrap();
        assert!((m0 - 1.0).abs() < 1e-12);
        assert!((m1 - mean).abs() < 1e-10);
        assert!((m2 - 0.25).abs() < 1e-12);
    }

    #[test]
    fn fisher_relations() {
        let (mp, xi, zeta) = fig3();
        assert_eq!(fisher_classical(0.0, 9.81, &mp, xi, zeta, 0.3), 0.0);
        assert_eq!(fisher_quantum(0.0, &mp, xi, zeta), 0.0);
        for &t in &[0.01, 0.3, 1.0, 4.0] {
            let fq = fisher_quantum(t, &mp, xi, zeta);
            let f = fisher_classical(t, 9.81, &mp, xi, zeta, 0.3);
            assert!(f <= fq * (1.0 + 1e-15));
            // quantum bound reproduces the error-propagation formula with m = 1
            let dg = sensitivity(t, &mp, xi, zeta).dg;
            assert!((1.0 / fq.sqrt() / dg - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn classical_equals_quantum_at_quadrature_points() {
        let (mp, xi, zeta) = fig3();
        let t = 0.8;
        let g = 9.81;
        // choose φ0 so that φ(t) = 5π/2, where sin²φ = 1
        let phi0 = 2.5 * PI - mp.phase(t, g, xi, zeta, 0.0);
        let f = fisher_classical(t, g, &mp, xi, zeta, phi0);
        let fq = fisher_quantum(t, &mp, xi, zeta);
        assert!((f / fq - 1.0).abs() < 1e-12);
        let dg = sensitivity(t, &mp, xi, zeta).dg;
        assert!((1.0 / f.sqrt() / dg - 1.0).abs() < 1e-12);
    }

    #[test]
    fn numeric_fisher_matches_closed_form() {
        let (mp, xi, zeta) = fig3();
        for &(t, g) in &[(0.05, 9.7), (0.7, 9.81), (3.3, 9.9)] {
            let a = fisher_classical(t, g, &mp, xi, zeta, 0.1);
            let b = fisher_classical_numeric(t, g, &mp, xi, zeta, 0.1).unwrap();
            assert!((a / b - 1.0).abs() < 1e-6, "t={t} g={g}: {a} vs {b}");
        }
    }
}
