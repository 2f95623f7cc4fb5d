//! Run configuration: defaults, then the JSON file, then `RGSIM_*` variables, then flags.

use std::f64::consts::PI;
use std::path::PathBuf;

use clap::ValueEnum;
use rgsim::gravimetry::{MetrologyParams, PhaseModel};
use rgsim::meanfield::SteadyStateConfig;
use rgsim::quantum::QuantumConfig;
use rgsim::SimParams;
use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    SteadyState,
    Fall,
    GoldstoneKick,
    Fit,
    Sensitivity,
    Fisher,
    Estimate,
    #[serde(rename = "scan-N")]
    #[value(name = "scan-N", alias = "scan-n")]
    ScanN,
    QuantumGround,
    QuantumCollapse,
}

impl Scenario {
    pub fn name(self) -> String {
        serde_json::to_value(self).ok().and_then(|v| v.as_str().map(str::to_owned)).unwrap_or_default()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvolutionSection {
    pub t_end: f64,
    pub sample_every: usize,
    pub seed_phase: f64,
    /// Momentum imprinted by `goldstone-kick`, in ħk_c.
    pub kick: f64,
}

impl Default for EvolutionSection {
    fn default() -> Self {
        EvolutionSection { t_end: 60.0, sample_every: 100, seed_phase: 0.0, kick: 0.05 }
    }
}

/// Time axis in seconds for the `sensitivity` and `fisher` curves (log-spaced).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CurveSection {
    pub t_min: f64,
    pub t_max: f64,
    pub points: usize,
}

impl Default for CurveSection {
    fn default() -> Self {
        CurveSection { t_min: 0.1, t_max: 10.0, points: 201 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScanSection {
    pub n_min: f64,
    pub n_max: f64,
    pub points: usize,
    /// Couplings at `template.n_atoms`, rescaled to every N of the scan.
    pub template: SimParams,
}

impl Default for ScanSection {
    fn default() -> Self {
        ScanSection {
            n_min: 1e5,
            n_max: 1e6,
            points: 9,
            template: SimParams { u0n: -0.05, eta0rn: 40.0, grav: 0.0, box_len: 1.0, n_grid: 64, ..SimParams::default() },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EstimateSection {
    /// Quadrature record CSV (columns t, q). Without it a Monte-Carlo study runs.
    pub record: Option<PathBuf>,
    pub records: usize,
    pub samples: usize,
    /// Phase advance covered by the simulated records, in rad.
    pub phase_span: f64,
    /// Relative half-width of the g search window around `metrology.g_true`.
    pub window: f64,
}

impl Default for EstimateSection {
    fn default() -> Self {
        EstimateSection { record: None, records: 500, samples: 200, phase_span: 2.0 * PI, window: 0.01 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct FitSection {
    /// Trace CSV to calibrate; when absent a `fall` run is simulated first.
    pub trace: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QGridSection {
    /// Collapse position in 1/k_c.
    pub x0: f64,
    pub half_width: f64,
    pub points: usize,
}

impl Default for QGridSection {
    fn default() -> Self {
        QGridSection { x0: 0.0, half_width: 3.0, points: 61 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub scenario: Option<Scenario>,
    pub seed: u64,
    pub out: PathBuf,
    pub params: SimParams,
    pub steady: SteadyStateConfig,
    pub evolution: EvolutionSection,
    pub metrology: MetrologyParams,
    pub model: PhaseModel,
    pub curve: CurveSection,
    pub scan: ScanSection,
    pub estimate: EstimateSection,
    pub fit: FitSection,
    pub quantum: QuantumConfig,
    pub qgrid: QGridSection,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            scenario: None,
            seed: 0,
            out: PathBuf::from("out"),
            params: SimParams::default(),
            steady: SteadyStateConfig::default(),
            evolution: EvolutionSection::default(),
            metrology: MetrologyParams::rb87_reference(),
            model: PhaseModel { xi: 0.167, zeta: 0.007, phi0: 0.0 },
            curve: CurveSection::default(),
            scan: ScanSection::default(),
            estimate: EstimateSection::default(),
            fit: FitSection::default(),
            quantum: QuantumConfig::default(),
            qgrid: QGridSection::default(),
        }
    }
}

/// Applies `RGSIM_<FIELD>` and `RGSIM_<SECTION>_<FIELD>` overrides to a JSON config.
///
/// Values are parsed as JSON and fall back to plain strings, so
/// `RGSIM_PARAMS_DT=1e-4` and `RGSIM_OUT=runs/a` both work.
pub fn apply_env(cfg: &mut Value, vars: impl IntoIterator<Item = (String, String)>) -> Result<(), String> {
    for (key, raw) in vars {
        let Some(name) = key.strip_prefix("RGSIM_") else { continue };
        let name = name.to_ascii_lowercase();
        let value = serde_json::from_str(&raw).unwrap_or(Value::String(raw.clone()));
        let obj = cfg.as_object_mut().ok_or("config is not an object")?;
        if obj.contains_key(&name) {
            obj.insert(name, value);
            continue;
        }
        // longest section prefix wins
        let mut sections: Vec<String> = obj.iter().filter(|(_, v)| v.is_object()).map(|(k, _)| k.clone()).collect();
        sections.sort_by_key(|s| std::cmp::Reverse(s.len()));
        let hit = sections.iter().find(|s| name.starts_with(&format!("{s}_")));
        match hit {
            Some(section) => {
                let field = name[section.len() + 1..].to_owned();
                let inner = obj.get_mut(section).and_then(Value::as_object_mut).expect("section is an object");
                if !inner.contains_key(&field) {
                    return Err(format!("{key}: unknown field `{field}` in section `{section}`"));
                }
                inner.insert(field, value);
            }
            None => return Err(format!("{key}: no config field matches")),
        }
    }
    Ok(())
}

/// Merges `patch` into `base` recursively; objects merge, everything else replaces.
pub fn merge(base: &mut Value, patch: Value) {
    match (base, patch) {
        (Value::Object(b), Value::Object(p)) => {
            for (k, v) in p {
                match b.get_mut(&k) {
                    Some(slot) => merge(slot, v),
                    None => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (slot, v) => *slot = v,
    }
}
