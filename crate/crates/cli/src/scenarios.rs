//! One function per scenario. Each writes its artifacts into the output
//! directory and returns a JSON summary for the manifest.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use rgsim::gravimetry::{
    estimate_g, fisher_classical, fisher_classical_numeric, fisher_quantum, fit_heuristic, fit_heuristic_series,
    monte_carlo, sensitivity, times_spanning_phase, QuadratureSample, SearchWindow,
};
use rgsim::io::{read_columns, write_cavity_csv, write_checkpoint, write_columns, write_q_grid_csv, write_trace_csv};
use rgsim::meanfield::{find_steady_state, fit_power_law, photon_scan, srpotential, srpotential_at, CavityState};
use rgsim::observables::{dragging_residual, Trace};
use rgsim::quantum::{collapse, ground_state, LanczosConfig, Mode, QuantumState};
use rgsim::scenario::{free_fall, goldstone_kick, Run, RunConfig};
use rgsim::{Error, Grid, Result, SimParams};
use serde_json::{json, Value};

use crate::config::{Config, Scenario};

/// Output directory plus the list of files written so far.
pub struct Artifacts {
    dir: PathBuf,
    pub files: Vec<String>,
}

impl Artifacts {
    pub fn new(dir: &Path) -> Result<Self> {
        std::fs::create_dir_all(dir)?;
        Ok(Artifacts { dir: dir.to_owned(), files: Vec::new() })
    }

    fn create(&mut self, name: &str) -> Result<BufWriter<File>> {
        self.files.push(name.to_owned());
        Ok(BufWriter::new(File::create(self.dir.join(name))?))
    }

    fn json(&mut self, name: &str, value: &impl serde::Serialize) -> Result<()> {
        let mut w = self.create(name)?;
        serde_json::to_writer_pretty(&mut w, value)?;
        w.write_all(b"\n")?;
        w.flush()?;
        Ok(())
    }

    fn with<F>(&mut self, name: &str, f: F) -> Result<()>
    where
        F: FnOnce(&mut BufWriter<File>) -> Result<()>,
    {
        let mut w = self.create(name)?;
        f(&mut w)?;
        w.flush()?;
        Ok(())
    }
}

pub fn run(scenario: Scenario, cfg: &Config, out: &mut Artifacts) -> Result<Value> {
    match scenario {
        Scenario::SteadyState => steady_state(cfg, out),
        Scenario::Fall => fall(cfg, out),
        Scenario::GoldstoneKick => kick(cfg, out),
        Scenario::Fit => fit(cfg, out),
        Scenario::Sensitivity => sensitivity_curve(cfg, out),
        Scenario::Fisher => fisher_curve(cfg, out),
        Scenario::Estimate => estimate(cfg, out),
        Scenario::ScanN => scan(cfg, out),
        Scenario::QuantumGround => quantum_ground(cfg, out),
        Scenario::QuantumCollapse => quantum_collapse(cfg, out),
    }
}

fn run_config(cfg: &Config) -> RunConfig {
    RunConfig {
        t_end: cfg.evolution.t_end,
        sample_every: cfg.evolution.sample_every,
        seed_phase: cfg.evolution.seed_phase,
        steady: cfg.steady,
    }
}

fn grid(params: &SimParams) -> Result<Grid<f64>> {
    params.validate()?;
    Grid::new(params)
}

fn steady_state(cfg: &Config, out: &mut Artifacts) -> Result<Value> {
    let p = &cfg.params;
    let g = grid(p)?;
    let ss = find_steady_state(p, &g, cfg.evolution.seed_phase, &cfg.steady)?;
    let st = &ss.state;
    let rho: Vec<f64> = st.condensate.density();
    let v = srpotential(&st.cavity, p, &g);
    out.with("density.csv", |w| write_columns(w, &["x", "density", "v_sr"], &[&g.points, &rho, &v]))?;
    let psi: Vec<_> = st.condensate.psi.clone();
    let meta = json!({
        "time": 0.0,
        "alpha_plus": [st.cavity.alpha_plus.re, st.cavity.alpha_plus.im],
        "alpha_minus": [st.cavity.alpha_minus.re, st.cavity.alpha_minus.im],
        "params": p,
    });
    out.with("psi.bin", |w| write_checkpoint(w, &psi, meta))?;
    let summary = json!({
        "iterations": ss.iterations,
        "alpha_update": ss.alpha_update,
        "psi_update": ss.psi_update,
        "chemical_potential": ss.chemical_potential,
        "stationary": ss.stationary,
        "alpha_plus": [st.cavity.alpha_plus.re, st.cavity.alpha_plus.im],
        "alpha_minus": [st.cavity.alpha_minus.re, st.cavity.alpha_minus.im],
        "photons": st.cavity.photons(p.n_atoms),
    });
    out.json("steady_state.json", &summary)?;
    Ok(summary)
}

fn write_run(p: &SimParams, run: &Run<f64>, out: &mut Artifacts) -> Result<()> {
    out.with("trace.csv", |w| write_trace_csv(w, &run.trace))?;
    out.with("cavity.csv", |w| write_cavity_csv(w, &run.trace, p.n_atoms))?;
    let r = dragging_residual(&run.trace);
    out.with("dragging.csv", |w| write_columns(w, &["t", "residual"], &[&run.trace.times, &r]))
}

/// Largest relative departure of n± from their values at t = 0.
fn photon_drift(trace: &Trace) -> f64 {
    let rel = |v: &[f64]| v.iter().map(|n| (n / v[0] - 1.0).abs()).fold(0.0f64, f64::max);
    rel(&trace.n_plus).max(rel(&trace.n_minus))
}

fn fall(cfg: &Config, out: &mut Artifacts) -> Result<Value> {
    let p = &cfg.params;
    let run = free_fall(p, &grid(p)?, &run_config(cfg))?;
    write_run(p, &run, out)?;
    let tr = &run.trace;
    Ok(json!({
        "samples": tr.len(),
        "phi_final": tr.rel_phase.last(),
        "x_com_final": tr.com.last(),
        "photon_number_max_rel_drift": photon_drift(tr),
    }))
}

fn kick(cfg: &Config, out: &mut Artifacts) -> Result<Value> {
    let p = &cfg.params;
    let run = goldstone_kick(p, &grid(p)?, cfg.evolution.kick, &run_config(cfg))?;
    write_run(p, &run, out)?;
    Ok(json!({ "samples": run.trace.len(), "kick": cfg.evolution.kick, "x_com_final": run.trace.com.last() }))
}

fn fit(cfg: &Config, out: &mut Artifacts) -> Result<Value> {
    let p = &cfg.params;
    let g_kc = p.g_kc();
    let result = match &cfg.fit.trace {
        Some(path) => {
            let (headers, cols) = read_columns(BufReader::new(File::open(path)?))?;
            let col = |name: &str| {
                headers
                    .iter()
                    .position(|h| h == name)
                    .map(|i| cols[i].clone())
                    .ok_or_else(|| Error::Format(format!("{}: missing column `{name}`", path.display())))
            };
            fit_heuristic_series(&col("t")?, &col("phi")?, g_kc, 1.0)?
        }
        None => {
            let run = free_fall(p, &grid(p)?, &run_config(cfg))?;
            out.with("trace.csv", |w| write_trace_csv(w, &run.trace))?;
            fit_heuristic(&run.trace, g_kc, 1.0)?
        }
    };
    out.json("fit.json", &result)?;
    Ok(serde_json::to_value(result)?)
}

fn time_axis(cfg: &Config) -> Result<Vec<f64>> {
    let c = &cfg.curve;
    if !(c.t_min > 0.0 && c.t_max > c.t_min && c.points >= 2) {
        return Err(Error::InvalidParam("curve needs 0 < t_min < t_max and at least 2 points".into()));
    }
    let r = (c.t_max / c.t_min).ln();
    Ok((0..c.points).map(|i| c.t_min * (r * i as f64 / (c.points - 1) as f64).exp()).collect())
}

fn sensitivity_curve(cfg: &Config, out: &mut Artifacts) -> Result<Value> {
    let (mp, m) = (&cfg.metrology, &cfg.model);
    mp.validate()?;
    let t = time_axis(cfg)?;
    let s: Vec<_> = t.iter().map(|&t| sensitivity(t, mp, m.xi, m.zeta)).collect();
    let dg: Vec<f64> = s.iter().map(|s| s.dg).collect();
    let rel: Vec<f64> = s.iter().map(|s| s.dg_rel).collect();
    let f: Vec<f64> = t.iter().map(|&t| fisher_classical(t, mp.g_true, mp, m.xi, m.zeta, m.phi0)).collect();
    let fq: Vec<f64> = t.iter().map(|&t| fisher_quantum(t, mp, m.xi, m.zeta)).collect();
    out.with("sensitivity.csv", |w| write_columns(w, &["t", "dg", "dg_rel", "F", "F_q"], &[&t, &dg, &rel, &f, &fq]))?;
    let (lo, hi) = rel.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &r| (a.min(r), b.max(r)));
    Ok(json!({ "dg_rel_min": lo, "dg_rel_max": hi, "dg_rel_at_1s": sensitivity(1.0, mp, m.xi, m.zeta).dg_rel }))
}

fn fisher_curve(cfg: &Config, out: &mut Artifacts) -> Result<Value> {
    let (mp, m) = (&cfg.metrology, &cfg.model);
    mp.validate()?;
    let t = time_axis(cfg)?;
    let g = mp.g_true;
    let f: Vec<f64> = t.iter().map(|&t| fisher_classical(t, g, mp, m.xi, m.zeta, m.phi0)).collect();
    let fq: Vec<f64> = t.iter().map(|&t| fisher_quantum(t, mp, m.xi, m.zeta)).collect();
    let num = t.iter().map(|&t| fisher_classical_numeric(t, g, mp, m.xi, m.zeta, m.phi0)).collect::<Result<Vec<f64>>>()?;
    let sin2: Vec<f64> = t.iter().map(|&t| mp.phase(t, g, m.xi, m.zeta, m.phi0).sin().powi(2)).collect();
    let dg: Vec<f64> = f.iter().map(|f| 1.0 / (mp.m_repeats * f).sqrt()).collect();
    let rel: Vec<f64> = dg.iter().map(|d| d / g).collect();
    out.with("fisher.csv", |w| {
        write_columns(w, &["t", "dg", "dg_rel", "F", "F_q", "F_numeric", "sin2_phi"], &[&t, &dg, &rel, &f, &fq, &num, &sin2])
    })?;
    let worst = f.iter().zip(&num).map(|(a, b)| (a - b).abs() / a.max(f64::MIN_POSITIVE)).fold(0.0f64, f64::max);
    Ok(json!({ "max_rel_dev_numeric": worst }))
}

fn estimate(cfg: &Config, out: &mut Artifacts) -> Result<Value> {
    let (mp, m, e) = (&cfg.metrology, &cfg.model, &cfg.estimate);
    mp.validate()?;
    match &e.record {
        Some(path) => {
            let (headers, cols) = read_columns(BufReader::new(File::open(path)?))?;
            if headers != ["t", "q"] {
                return Err(Error::Format(format!("{}: expected columns t,q, got {}", path.display(), headers.join(","))));
            }
            let record: Vec<QuadratureSample> = cols[0].iter().zip(&cols[1]).map(|(&t, &q)| QuadratureSample { t, q }).collect();
            let est = estimate_g(&record, mp, m, SearchWindow { center: mp.g_true, rel_width: e.window })?;
            out.json("estimate.json", &est)?;
            Ok(serde_json::to_value(est)?)
        }
        None => {
            if e.samples < 2 || e.records < 2 {
                return Err(Error::InvalidParam("estimate needs at least 2 samples and 2 records".into()));
            }
            let times = times_spanning_phase(mp, m, e.phase_span, e.samples);
            let (all, summary) = monte_carlo(&times, mp, m, e.records, cfg.seed)?;
            let g: Vec<f64> = all.iter().map(|x| x.g_hat).collect();
            let se: Vec<f64> = all.iter().map(|x| x.stderr).collect();
            out.with("estimates.csv", |w| write_columns(w, &["g_hat", "stderr"], &[&g, &se]))?;
            out.with("times.csv", |w| write_columns(w, &["t"], &[&times]))?;
            out.json("estimate_summary.json", &summary)?;
            let mut v = serde_json::to_value(summary)?;
            v["std_over_crb"] = json!(summary.std / summary.crb);
            Ok(v)
        }
    }
}

fn scan(cfg: &Config, out: &mut Artifacts) -> Result<Value> {
    let s = &cfg.scan;
    s.template.validate()?;
    if !(s.n_min > 0.0 && s.n_max > s.n_min && s.points >= 2) {
        return Err(Error::InvalidParam("scan needs 0 < n_min < n_max and at least 2 points".into()));
    }
    let r = (s.n_max / s.n_min).ln();
    let ns: Vec<f64> = (0..s.points).map(|i| s.n_min * (r * i as f64 / (s.points - 1) as f64).exp()).collect();
    let pts = photon_scan(&s.template, &ns, &cfg.steady)?;
    let n: Vec<f64> = pts.iter().map(|p| p.n_atoms).collect();
    let photons: Vec<f64> = pts.iter().map(|p| p.photons).collect();
    out.with("scan.csv", |w| write_columns(w, &["N", "n"], &[&n, &photons]))?;
    let law = fit_power_law(&pts)?;
    out.json("power_law.json", &law)?;
    Ok(serde_json::to_value(law)?)
}

fn lanczos(cfg: &Config) -> LanczosConfig {
    LanczosConfig { seed: cfg.seed, ..LanczosConfig::default() }
}

fn write_quantum(state: &QuantumState<f64>, cfg: &Config, v_sr: Option<&[f64]>, out: &mut Artifacts) -> Result<()> {
    let q = &cfg.qgrid;
    for (mode, name) in [(Mode::Plus, "q_plus.csv"), (Mode::Minus, "q_minus.csv")] {
        let grid = state.q_grid(mode, q.half_width, q.points);
        out.with(name, |w| write_q_grid_csv(w, &grid))?;
    }
    let x = state.cfg.positions();
    let rho = state.position_density();
    match v_sr {
        Some(v) => out.with("density.csv", |w| write_columns(w, &["x", "density", "v_sr"], &[&x, &rho, v])),
        None => out.with("density.csv", |w| write_columns(w, &["x", "density"], &[&x, &rho])),
    }
}

fn mode_summary(state: &QuantumState<f64>, mode: Mode, lobe: bool) -> Value {
    let shape = if lobe { state.lobe(mode) } else { state.ridge(mode) };
    let a = state.coherence(mode);
    json!({
        "photons": state.photon_number(mode),
        "cutoff_population": state.cutoff_population(mode),
        "coherence": [a.re, a.im],
        "ridge": shape,
        "ring": shape.is_ring(),
        "single_lobe": shape.is_single_lobe(),
    })
}

fn quantum_ground(cfg: &Config, out: &mut Artifacts) -> Result<Value> {
    let qc = &cfg.quantum;
    qc.validate()?;
    let (energy, gs) = ground_state::<f64>(qc, &lanczos(cfg))?;
    write_quantum(&gs, cfg, None, out)?;
    out.with("ground.bin", |w| write_checkpoint(w, &gs.amplitudes, json!({ "energy": energy, "quantum": qc })))?;
    let summary = json!({
        "energy": energy,
        "dimension": qc.dim(),
        "plus": mode_summary(&gs, Mode::Plus, false),
        "minus": mode_summary(&gs, Mode::Minus, false),
    });
    out.json("ground.json", &summary)?;
    Ok(summary)
}

fn quantum_collapse(cfg: &Config, out: &mut Artifacts) -> Result<Value> {
    let qc = &cfg.quantum;
    qc.validate()?;
    let (energy, gs) = ground_state::<f64>(qc, &lanczos(cfg))?;
    let c = collapse(&gs, cfg.qgrid.x0)?;
    let cavity = CavityState::new(c.coherence(Mode::Plus), c.coherence(Mode::Minus));
    let coupling = SimParams { u0n: qc.u0, eta0rn: qc.eta0, ..SimParams::default() };
    let v: Vec<f64> = qc.positions().iter().map(|&x| srpotential_at(&cavity, &coupling, x)).collect();
    write_quantum(&c, cfg, Some(&v), out)?;
    let summary = json!({
        "ground_energy": energy,
        "x0": cfg.qgrid.x0,
        "plus": mode_summary(&c, Mode::Plus, true),
        "minus": mode_summary(&c, Mode::Minus, true),
    });
    out.json("collapse.json", &summary)?;
    Ok(summary)
}
