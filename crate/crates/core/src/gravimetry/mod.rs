//! Metrology layer: the damped-drag phase model, its calibration, error
//! propagation, homodyne Fisher information and estimation of g.

mod estimate;
mod heuristic;
mod metrology;

pub use estimate::{
    estimate_g, mean_record, monte_carlo, record_crb, sample_record, times_spanning_phase, GEstimate,
    MonteCarloSummary, PhaseModel, QuadratureSample, SearchWindow,
};
pub use heuristic::{fit_heuristic, fit_heuristic_series, heuristic_ode_residual, heuristic_phase, ramp, HeuristicFit};
pub use metrology::{
    fisher_classical, fisher_classical_numeric, fisher_quantum, homodyne_pdf, sensitivity, MetrologyParams,
    Sensitivity,
};
