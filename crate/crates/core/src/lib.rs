//! Deterministic OFDM link-level simulator.
//!
//! The pipeline is bits -> constellation symbols ([`modem`]) -> OFDM frames
//! with block pilots ([`ofdm`]) -> time samples -> fading/noisy channel
//! ([`channel`]) -> CP removal and DFT -> forgetting-factor LS estimation and
//! one-tap equalization ([`estimation`]) -> hard decisions -> bits. [`link`]
//! glues the stages together and [`metrics`] counts errors and provides the
//! BPSK reference curves.

pub mod channel;
pub mod dft;
mod error;
pub mod estimation;
pub mod imageio;
pub mod link;
pub mod metrics;
pub mod modem;
pub mod ofdm;

pub use error::{Error, Result};
pub use num_complex::Complex64;
