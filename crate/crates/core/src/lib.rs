//! Simulation of a driven Bose-Einstein condensate in a bidirectional ring
//! cavity and its use as a gravimeter.
//!
//! The crate is generic over the scalar type (`f32` or `f64`) through [`Real`].
//! Concrete aliases for both precisions live at the crate root.

pub mod error;
pub mod gravimetry;
pub mod grid;
pub mod io;
pub mod meanfield;
pub mod numerics;
pub mod observables;
pub mod params;
pub mod quantum;
pub mod scalar;
pub mod scenario;

pub use error::{Error, Result, StallKind};
pub use grid::{grav_potential, make_grid, Grid};
pub use params::{RecoilUnits, SimParams};
pub use scalar::Real;

pub type Grid64 = Grid<f64>;
pub type Grid32 = Grid<f32>;
pub type SystemState64 = meanfield::SystemState<f64>;
pub type SystemState32 = meanfield::SystemState<f32>;
pub type CavityState64 = meanfield::CavityState<f64>;
pub type CavityState32 = meanfield::CavityState<f32>;
pub type CondensateState64 = meanfield::CondensateState<f64>;
pub type CondensateState32 = meanfield::CondensateState<f32>;
pub type Stepper64 = meanfield::Stepper<f64>;
pub type Stepper32 = meanfield::Stepper<f32>;
