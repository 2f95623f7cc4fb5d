//! Estimating g from a time-resolved homodyne record.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::metrology::{fisher_classical, MetrologyParams};

/// One homodyne sample: time in s and quadrature outcome q.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSample {
    pub t: f64,
    pub q: f64,
}

/// Calibrated model used to interpret a record.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseModel {
    /// Friction in units of ω_r.
    pub xi: f64,
    pub zeta: f64,
    pub phi0: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GEstimate {
    pub g_hat: f64,
    pub stderr: f64,
}

/// Search window for the estimator: `center·(1 ± rel_width)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchWindow {
    pub center: f64,
    pub rel_width: f64,
}

/// Draws q_i ~ N(√n cos φ(t_i, g), 1/4) for each time.
pub fn sample_record(
    times: &[f64],
    g: f64,
    mp: &MetrologyParams,
    model: &PhaseModel,
    rng: &mut impl rand::Rng,
) -> Vec<QuadratureSample> {
    let noise = Normal::new(0.0, 0.5).expect("valid sigma");
    let sqrt_n = mp.n_eff().sqrt();
    times
        .iter()
        .map(|&t| {
            let mean = sqrt_n * mp.phase(t, g, model.xi, model.zeta, model.phi0).cos();
            QuadratureSample { t, q: mean + noise.sample(rng) }
        })
        .collect()
}

/// Noise-free record at the mean quadrature.
pub fn mean_record(times: &[f64], g: f64, mp: &MetrologyParams, model: &PhaseModel) -> Vec<QuadratureSample> {
    let sqrt_n = mp.n_eff().sqrt();
    times
        .iter()
        .map(|&t| QuadratureSample { t, q: sqrt_n * mp.phase(t, g, model.xi, model.zeta, model.phi0).cos() })
        .collect()
}

/// Cramér–Rao bound 1/√(Σ F(t_i)) for a record sampled at `times`.
pub fn record_crb(times: &[f64], g: f64, mp: &MetrologyParams, model: &PhaseModel) -> f64 {
    let f: f64 = times.iter().map(|&t| fisher_classical(t, g, mp, model.xi, model.zeta, model.phi0)).sum();
    1.0 / f.sqrt()
}

/// S(g) = 4 Σ (q_i − √n cos φ(t_i, g))² and its first two derivatives.
fn objective(record: &[QuadratureSample], g: f64, mp: &MetrologyParams, model: &PhaseModel) -> (f64, f64, f64) {
    let sqrt_n = mp.n_eff().sqrt();
    let (mut s, mut d1, mut d2) = (0.0, 0.0, 0.0);
    for smp in record {
        let slope = mp.phase_slope(smp.t, model.xi, model.zeta);
        let phi = mp.phase(smp.t, g, model.xi, model.zeta, model.phi0);
        let (sin, cos) = phi.sin_cos();
        let r = smp.q - sqrt_n * cos;
        let dr = sqrt_n * sin * slope;
        let ddr = sqrt_n * cos * slope * slope;
        s += r * r;
        d1 += r * dr;
        d2 += dr * dr + r * ddr;
    }
    (4.0 * s, 8.0 * d1, 8.0 * d2)
}

/// Weighted least-squares estimate of g with the standard error from the curvature.
pub fn estimate_g(
    record: &[QuadratureSample],
    mp: &MetrologyParams,
    model: &PhaseModel,
    window: SearchWindow,
) -> Result<GEstimate> {
    if record.is_empty() {
        return Err(Error::NonIdentifiable("empty record".into()));
    }
    let sqrt_n = mp.n_eff().sqrt();
    let info: f64 = record
        .iter()
        .map(|s| {
            let d = mp.phase_slope(s.t, model.xi, model.zeta)
                * mp.phase(s.t, window.center, model.xi, model.zeta, model.phi0).sin();
            4.0 * sqrt_n * sqrt_n * d * d
        })
        .sum();
    let max_slope = record
        .iter()
        .map(|s| mp.phase_slope(s.t, model.xi, model.zeta).abs())
        .fold(0.0, f64::max);
    if max_slope == 0.0 || info * window.center * window.center < 1e-16 {
        return Err(Error::NonIdentifiable("record carries no information about g".into()));
    }

    // coarse scan fine enough that neighbouring trial phases differ by < 0.1 rad
    let (lo, hi) = (window.center * (1.0 - window.rel_width), window.center * (1.0 + window.rel_width));
    let step = (0.1 / max_slope).min(hi - lo);
    let n = (((hi - lo) / step).ceil() as usize).clamp(2, 2_000_000);
    let cost = |g: f64| objective(record, g, mp, model).0;
    let (best, _) = (0..=n)
        .map(|i| {
            let g = lo + (hi - lo) * i as f64 / n as f64;
            (g, cost(g))
        })
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("non-empty scan");
    let h = (hi - lo) / n as f64;
    let (mut g, _) = crate::numerics::golden_section(cost, best - h, best + h, 1e-10);
    for _ in 0..50 {
        let (_, d1, d2) = objective(record, g, mp, model);
        if d2 <= 0.0 {
            break;
        }
        let delta = d1 / d2;
        g -= delta;
        if delta.abs() <= 1e-15 * g.abs() {
            break;
        }
    }
    let (_, _, d2) = objective(record, g, mp, model);
    if d2 <= 0.0 {
        return Err(Error::NonIdentifiable("objective not convex at the optimum".into()));
    }
    Ok(GEstimate { g_hat: g, stderr: (2.0 / d2).sqrt() })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloSummary {
    pub records: usize,
    pub mean: f64,
    pub std: f64,
    pub crb: f64,
}

/// Repeats sampling and estimation `n_records` times with independent seeded streams.
pub fn monte_carlo(
    times: &[f64],
    mp: &MetrologyParams,
    model: &PhaseModel,
    n_records: usize,
    seed: u64,
) -> Result<(Vec<GEstimate>, MonteCarloSummary)> {
    let window = SearchWindow { center: mp.g_true, rel_width: 0.01 };
    let estimates: Vec<GEstimate> = (0..n_records)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let rec = sample_record(times, mp.g_true, mp, model, &mut rng);
            estimate_g(&rec, mp, model, window)
        })
        .collect::<Result<_>>()?;
    let k = estimates.len() as f64;
    let mean = estimates.iter().map(|e| e.g_hat).sum::<f64>() / k;
    let var = estimates.iter().map(|e| (e.g_hat - mean).powi(2)).sum::<f64>() / (k - 1.0);
    let crb = record_crb(times, mp.g_true, mp, model);
    Ok((estimates, MonteCarloSummary { records: n_records, mean, std: var.sqrt(), crb }))
}

/// Uniform sample times covering φ(t) − φ(0) ∈ [0, `phase_span`] (including t = 0).
pub fn times_spanning_phase(mp: &MetrologyParams, model: &PhaseModel, phase_span: f64, samples: usize) -> Vec<f64> {
    let dphi = |t: f64| mp.phase(t, mp.g_true, model.xi, model.zeta, 0.0);
    let mut hi = 1e-6;
    while dphi(hi) < phase_span {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if dphi(mid) < phase_span {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let t_end = 0.5 * (lo + hi);
    (0..samples).map(|i| t_end * i as f64 / (samples - 1) as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup() -> (MetrologyParams, PhaseModel, Vec<f64>) {
        let mp = MetrologyParams { n_photons: 1e4, ..MetrologyParams::rb87_reference() };
        let model = PhaseModel { xi: 0.167, zeta: 0.007, phi0: 0.3 };
        let times = times_spanning_phase(&mp, &model, 2.0 * std::f64::consts::PI, 200);
        (mp, model, times)
    }

    #[test]
    fn noiseless_record_is_exact() {
        let (mp, model, times) = setup();
        let rec = mean_record(&times, mp.g_true, &mp, &model);
        let e = estimate_g(&rec, &mp, &model, SearchWindow { center: mp.g_true * 1.003, rel_width: 0.01 }).unwrap();
        assert!((e.g_hat / mp.g_true - 1.0).abs() < 1e-12, "{}", e.g_hat);
        let crb = record_crb(&times, mp.g_true, &mp, &model);
        assert!((e.stderr / crb - 1.0).abs() < 1e-6);
    }

    #[test]
    fn zero_time_record_is_not_identifiable() {
        let (mp, model, _) = setup();
        let rec = vec![QuadratureSample { t: 0.0, q: 1.0 }; 10];
        let r = estimate_g(&rec, &mp, &model, SearchWindow { center: 9.81, rel_width: 0.01 });
        assert!(matches!(r, Err(Error::NonIdentifiable(_))));
    }

    #[test]
    fn monte_carlo_is_reproducible() {
        let (mp, model, times) = setup();
        let (a, _) = monte_carlo(&times, &mp, &model, 8, 7).unwrap();
        let (b, _) = monte_carlo(&times, &mp, &model, 8, 7).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn phase_span_of_sample_times() {
        let (mp, model, times) = setup();
        let last = *times.last().unwrap();
        let span = mp.phase(last, mp.g_true, model.xi, model.zeta, 0.0);
        assert!((span - 2.0 * std::f64::consts::PI).abs() < 1e-9);
        assert_eq!(times[0], 0.0);
    }
}
