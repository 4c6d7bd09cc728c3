//! Multi-user uplink channel model: resampled power-delay profiles,
//! block-fading Rayleigh tapped delay lines, AWGN, frequency-domain CSI and
//! its training-based linear-MMSE estimate.

pub mod csi;
pub mod pdp;
pub mod realization;

pub use csi::{estimate_csi_mmse, estimate_csi_mmse_with, freq_csi, pilot_power, CsiQuality, FreqCsi};
pub use pdp::{load_pdp, parse_pdp_text, PdpProfile, INTERP_HALF_WIDTH, STANDARD_PROFILES};
pub use realization::{
    add_awgn, add_awgn_with, apply_channel, complex_gaussian, draw_channel, draw_channel_with, ChannelRealization,
};

/// Sample rate of the reference configuration (Hz).
pub const REFERENCE_SAMPLE_RATE: f64 = 7.68e6;

pub type ChannelRealizationF64 = ChannelRealization<f64>;
pub type FreqCsiF64 = FreqCsi<f64>;
