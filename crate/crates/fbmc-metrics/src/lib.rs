//! Empirical link metrics: per-realization interference coefficients, Monte Carlo SIR and
//! SINR, parameter sweeps and frame-level MSE.

pub mod coeffs;
pub mod scheme;
pub mod sim;
pub mod stats;

pub use coeffs::{empirical_sinr, measure_coeffs, CoeffContext, Coefficient, Coefficients, SinrSample};
pub use scheme::{design_receiver, Combiners, Receiver, Scheme, TargetCombiners, TargetDesigner};
pub use sim::{
    assigned_profiles, point_seed, qam16, run_mse, run_trials, sample_trials, sweep, trial_rng, Axis, CsiMode, Design,
    LinkSetup, MseFrame, MseReport, SinrReport, SweepPoint, SweepResult, DEFAULT_SAMPLE_RATE, USER_CHANNELS,
};
pub use stats::{from_db, to_db, MeanEstimate, NeumaierSum};

pub type ReceiverF64 = Receiver<f64>;
pub type ReceiverF32 = Receiver<f32>;
