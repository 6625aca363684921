//! Bit error counting, BPSK reference curves and constellation capture.

use std::ops::AddAssign;

use num_complex::Complex64;

use crate::{Error, Result};

/// Error count over some number of compared bits. Tallies from parallel
/// streams combine by addition.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ErrorTally {
    pub bits: u64,
    pub errors: u64,
}

impl ErrorTally {
    pub fn ber(&self) -> f64 {
        if self.bits == 0 {
            0.0
        } else {
            self.errors as f64 / self.bits as f64
        }
    }
}

impl AddAssign for ErrorTally {
    fn add_assign(&mut self, rhs: Self) {
        self.bits += rhs.bits;
        self.errors += rhs.errors;
    }
}

/// Measured BER at one Eb/N0 point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BerRecord {
    pub snr_db: f64,
    pub bits_total: u64,
    pub bits_error: u64,
    pub ber: f64,
}

impl BerRecord {
    pub fn new(snr_db: f64, tally: ErrorTally) -> Result<Self> {
        if tally.bits == 0 {
            return Err(Error::EmptyStream);
        }
        Ok(BerRecord {
            snr_db,
            bits_total: tally.bits,
            bits_error: tally.errors,
            ber: tally.ber(),
        })
    }
}

/// Counts positions where `tx` and `rx` differ.
pub fn ber(tx: &[u8], rx: &[u8]) -> Result<ErrorTally> {
    if tx.len() != rx.len() {
        return Err(Error::LengthMismatch {
            tx: tx.len(),
            rx: rx.len(),
        });
    }
    if tx.is_empty() {
        return Err(Error::EmptyStream);
    }
    let errors = tx.iter().zip(rx).filter(|(a, b)| a != b).count();
    Ok(ErrorTally {
        bits: tx.len() as u64,
        errors: errors as u64,
    })
}

/// Gaussian tail probability `Q(x) = P(Z > x)`.
pub fn q_function(x: f64) -> f64 {
    0.5 * libm::erfc(x / std::f64::consts::SQRT_2)
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Coherent BPSK over AWGN: `Q(sqrt(2 Eb/N0))`.
pub fn theory_bpsk_awgn(ebn0_db: f64) -> f64 {
    q_function((2.0 * db_to_linear(ebn0_db)).sqrt())
}

/// Coherent BPSK over flat Rayleigh fading with perfect channel knowledge.
pub fn theory_bpsk_rayleigh(ebn0_db: f64) -> f64 {
    let g = db_to_linear(ebn0_db);
    0.5 * (1.0 - (g / (1.0 + g)).sqrt())
}

/// Picks up to `max_points` evenly strided tones for a scatter plot.
pub fn scatter_capture(tones: &[Complex64], max_points: usize) -> Vec<(f64, f64)> {
    if max_points == 0 || tones.is_empty() {
        return Vec::new();
    }
    let take = max_points.min(tones.len());
    (0..take)
        .map(|i| tones[i * tones.len() / take])
        .map(|t| (t.re, t.im))
        .collect()
}
