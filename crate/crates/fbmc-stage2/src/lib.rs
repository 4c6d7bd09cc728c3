//! Stage 2: turning high-rate equalizers into low-rate per-subcarrier equalizers.
//!
//! Two reference constructions (windowed-sinc band-pass and spectral periodization)
//! sit alongside the two-step decimation receiver, whose first decimation happens at
//! the filter bank (`D1`) and whose remaining `D2` factor is absorbed by polyphase
//! branches fitted by least squares.

pub mod bandpass;
pub mod bank;
pub mod ls;
pub mod plan;

pub use bandpass::{
    bandpass_ideal, bandpass_kernel, default_bp_len, grid_size, method1_bandpass, method1_lowrate, method2_lowrate,
    method2_periodize, method2_periodize_with,
};
pub use bank::{build_lowrate_from, build_lowrate_receiver, equalize_lowrate, LowRateEqualizerBank};
pub use fbmc_core::decimate;
pub use ls::{interleave, ls_fit, polyphase_split, LsFitter};
pub use plan::DecimationPlan;

/// Default low-rate equalizer length `L'_g`.
pub const DEFAULT_LOWRATE_LEN: usize = 5;

pub type LowRateEqualizerBankF64 = LowRateEqualizerBank<f64>;
pub type LsFitterF64 = LsFitter<f64>;
