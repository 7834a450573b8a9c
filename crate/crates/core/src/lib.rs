//! Non-adiabatic dressed states of a damped two-level atom driven by a pulse
//! of arbitrary envelope and phase.

pub mod adiabaticity;
pub mod branch;
pub mod config;
pub mod dressed;
pub mod error;
pub mod field;
pub mod oracle;
pub mod output;
pub mod plot;
pub mod scenarios;
pub mod spline;
pub mod units;

pub use dressed::{
    analytic_trajectory, dressed_components, project_onto_dressed_basis, solve_constants,
    AmplitudeSolution, AnalyticOptions, InstantSnapshot, SystemParams,
};
pub use error::{Error, ErrorCategory, Result};
pub use field::{Envelope, FieldSample, Phase, PulseSpec};
