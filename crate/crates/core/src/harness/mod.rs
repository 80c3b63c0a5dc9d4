//! Experiment plumbing: configuration files, ε-sweeps, log-log slope fits,
//! checks of the tabulated integral constants, and report persistence.

mod config;
mod fit;
mod lemmas;
mod sweep;

pub use config::{
    default_eps_list, CurveSpec, ExperimentConfig, ForceSpec, DEFAULT_N_S, DEFAULT_N_THETA,
    GEOMETRY_SAMPLES,
};
pub use fit::{fit_slope, LinearFit};
pub use lemmas::{double_factorial, verify_lemmas, LemmaCheck, LemmaReport, LEMMA_TOL};
pub use sweep::{
    run_sweep, write_report, EpsFailure, EpsRecord, Regressor, SlopeFit, SweepReport,
};
