use std::sync::OnceLock;

use nalgebra::DMatrix;
use num_complex::Complex;
use rgsim::quantum::{collapse, ground_state, u1_apply, LanczosConfig, Mode, QuantumConfig, QuantumState};

fn desk() -> &'static (f64, QuantumState<f64>) {
    static GS: OnceLock<(f64, QuantumState<f64>)> = OnceLock::new();
    GS.get_or_init(|| ground_state(&QuantumConfig::default(), &LanczosConfig::default()).unwrap())
}

#[test]
fn superradiant_ground_state_is_symmetric() {
    let (_, gs) = desk();
    for mode in [Mode::Plus, Mode::Minus] {
        assert!(gs.photon_number(mode) > 0.1);
        assert!(gs.coherence(mode).norm() < 1e-8, "{}", gs.coherence(mode));
    }
    let rho = gs.position_density();
    let (lo, hi) = rho.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &r| (a.min(r), b.max(r)));
    assert!(hi / lo - 1.0 < 1e-8, "density {lo}..{hi}");
    assert!((gs.norm() - 1.0).abs() < 1e-12);
}

#[test]
fn ground_state_is_u1_invariant() {
    let (_, gs) = desk();
    for shift in [1, 3] {
        let moved = u1_apply(&gs.cfg, &gs.amplitudes, shift);
        let overlap: Complex<f64> = gs.amplitudes.iter().zip(&moved).map(|(a, b)| a.conj() * b).sum();
        assert!((overlap.norm() - 1.0).abs() < 1e-8, "shift {shift}: {overlap}");
    }
}

#[test]
fn reduced_density_is_a_state() {
    let (_, gs) = desk();
    let c = collapse(gs, 1.0).unwrap();
    for s in [gs, &c] {
        for mode in [Mode::Plus, Mode::Minus] {
            let rho = s.reduced_density(mode);
            let f = s.cfg.fock_dim();
            let m = DMatrix::from_fn(f, f, |a, b| {
                let z = rho[a * f + b];
                nalgebra::Complex::new(z.re, z.im)
            });
            let trace: f64 = (0..f).map(|a| m[(a, a)].re).sum();
            assert!((trace - 1.0).abs() < 1e-12);
            let herm = (&m - m.adjoint()).norm();
            assert!(herm < 1e-12);
            let min = m.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min);
            assert!(min > -1e-12, "{min}");
        }
    }
}

#[test]
fn cutoff_convergence_at_weak_coupling() {
    let base = QuantumConfig { n_sites: 8, delta_c: -8.0, u0: -0.1, eta0: 1.0, ..QuantumConfig::default() };
    let e = |cutoff| ground_state::<f64>(&QuantumConfig { fock_cutoff: cutoff, ..base }, &LanczosConfig::default()).unwrap().0;
    let (e4, e6) = (e(4), e(6));
    assert!((e4 - e6).abs() < 1e-6, "{e4} vs {e6}");
}

#[test]
fn desk_default_reports_cutoff_leak() {
    // strong pumping puts a few percent of the population at the cutoff
    let (_, gs) = desk();
    assert!(gs.cutoff_population(Mode::Plus) > 1e-6);
}

#[test]
fn collapse_is_translation_equivariant() {
    let (_, gs) = desk();
    let cfg = gs.cfg;
    let x0 = 0.7;
    let a = collapse(gs, x0).unwrap().position_density();
    for shift in [1usize, 5] {
        let b = collapse(gs, x0 + shift as f64 * cfg.spacing()).unwrap().position_density();
        let worst = (0..cfg.n_sites).map(|j| (a[j] - b[(j + shift) % cfg.n_sites]).abs()).fold(0.0f64, f64::max);
        assert!(worst < 1e-8, "shift {shift}: {worst}");
    }
}

#[test]
fn collapsed_modes_sit_at_conjugate_phases() {
    let (_, gs) = desk();
    let x0 = 1.1;
    let c = collapse(gs, x0).unwrap();
    let (ap, am) = (c.coherence(Mode::Plus), c.coherence(Mode::Minus));
    // a± pick up e^{∓ix0}: the relative phase of the lobes is −2x0 on the site grid
    let rel = (ap * am.conj()).arg();
    let site = (x0 / gs.cfg.spacing()).round() * gs.cfg.spacing();
    let d = (rel + 2.0 * site).rem_euclid(2.0 * std::f64::consts::PI);
    assert!(d.min(2.0 * std::f64::consts::PI - d) < 1e-6, "rel {rel}, site {site}");
}

#[test]
fn q_functions_are_normalized() {
    let (_, gs) = desk();
    let c = collapse(gs, 0.0).unwrap();
    for s in [gs, &c] {
        for mode in [Mode::Plus, Mode::Minus] {
            let q = s.q_integral(mode).unwrap();
            assert!((q - 1.0).abs() < 1e-3, "{q}");
        }
    }
}

#[test]
fn f32_ground_state_tracks_f64() {
    let cfg = QuantumConfig { n_sites: 8, fock_cutoff: 3, ..QuantumConfig::default() };
    let lz = LanczosConfig { tol: 1e-4, ..LanczosConfig::default() };
    let (e32, _) = ground_state::<f32>(&cfg, &lz).unwrap();
    let (e64, _) = ground_state::<f64>(&cfg, &LanczosConfig::default()).unwrap();
    assert!((e32 - e64).abs() < 1e-3 * e64.abs(), "{e32} vs {e64}");
}
