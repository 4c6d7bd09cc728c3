//! FBMC/OQAM building blocks: PHYDYAS prototype design, OQAM lattices,
//! polyphase synthesis/analysis filter banks, and the small dense linear
//! algebra and sequence utilities shared by the rest of the workspace.
//!
//! Everything is generic over [`Real`] (`f32` or `f64`); the aliases at the
//! crate root fix the scalar to `f64`.

pub mod dsp;
pub mod error;
pub mod filterbank;
pub mod grid;
pub mod linalg;
pub mod prototype;
pub mod scalar;

pub use dsp::{convolve, decimate, dtft, upsample, Dft, Seq};
pub use error::{Error, Result};
pub use filterbank::{demodulate, modulate, transmux_response, FilterBank};
pub use grid::{oqam_to_qam, phase_factor, qam_to_oqam, ComplexGrid, OqamGrid, SampleStream};
pub use linalg::{left_pseudo_inverse, lstsq, CMat, Qr};
pub use prototype::{design_prototype, PrototypeFilter};
pub use scalar::{cis, Real, C};

pub type Complex64 = num_complex::Complex<f64>;
pub type PrototypeFilterF64 = PrototypeFilter<f64>;
pub type PrototypeFilterF32 = PrototypeFilter<f32>;
pub type FilterBankF64 = FilterBank<f64>;
pub type FilterBankF32 = FilterBank<f32>;
pub type OqamGridF64 = OqamGrid<f64>;
pub type ComplexGridF64 = ComplexGrid<f64>;
pub type SampleStreamF64 = SampleStream<f64>;
pub type CMatF64 = CMat<f64>;
pub type SeqF64 = Seq<f64>;
