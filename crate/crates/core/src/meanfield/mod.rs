//! Coupled mean-field dynamics of the condensate and the two ring-cavity modes.

mod coupling;
mod propagate;
mod scan;
mod state;
mod steady;

pub use coupling::{cavity_fixed_point, cavity_rhs, order_params, srpotential, srpotential_at, OrderParams};
pub use propagate::{Stepper, StepperConfig};
pub use scan::{fit_power_law, photon_scan, PowerLaw, ScanPoint};
pub use state::{CavityState, CondensateState, SystemState};
pub use steady::{find_steady_state, find_threshold, normal_state_gain, seed_condensate, SteadyState, SteadyStateConfig};
