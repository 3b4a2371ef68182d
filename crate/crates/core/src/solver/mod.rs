//! Time integration of the penalized model and of the incompressible
//! reference, the Picard recursion, and energy bookkeeping.

mod config;
mod energy;
mod phi;
mod picard;
mod stepper;
mod trajectory;

pub use config::{suggest_dt, SimConfig};
pub use energy::{energy_ledger, mean_drift_check, EnergyReport, MeanDriftReport};
pub use phi::{phi1, phi2};
pub use picard::{bilinear, picard_reference, picard_terms, PicardTerms, MAX_PICARD_ORDER};
pub use stepper::{nonlinearity, step, Model, Stepper};
pub use trajectory::{integrate, ns_reference_run, run, Record, Snapshot, Trajectory};
