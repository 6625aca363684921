//! Block-pilot least-squares channel estimation with a forgetting factor.
//!
//! For every tone `n` and pilot block `L`:
//!
//! ```text
//! alpha(n, L) = lambda * conj(Xp) * Yp + (1 - lambda) * alpha(n, L-1)
//! beta(n, L)  = lambda * |Xp|^2        + (1 - lambda) * beta(n, L-1)
//! H(n)        = alpha(n, L) / beta(n, L)
//! ```
//!
//! Data tones are then equalized one tap at a time, `X(n) = Y(n) / H(n)`.

use num_complex::Complex64;

use crate::ofdm::{OfdmConfig, OfdmFrame};
use crate::{Error, Result};

/// Estimates below this magnitude are treated as deep fades.
pub const DEEP_FADE_THRESHOLD: f64 = 1e-12;

pub const DEFAULT_LAMBDA: f64 = 0.9;

#[derive(Debug, Clone, PartialEq)]
pub struct EstimatorState {
    alpha: Vec<Complex64>,
    beta: Vec<f64>,
    lambda: f64,
    frame_index: usize,
    h_hat: Vec<Complex64>,
}

impl EstimatorState {
    pub fn new(n_subcarriers: usize, lambda: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda <= 1.0) {
            return Err(Error::InvalidLambda(lambda));
        }
        let zero = Complex64::new(0.0, 0.0);
        Ok(EstimatorState {
            alpha: vec![zero; n_subcarriers],
            beta: vec![0.0; n_subcarriers],
            lambda,
            frame_index: 0,
            h_hat: vec![zero; n_subcarriers],
        })
    }

    pub fn reset(&mut self) {
        let zero = Complex64::new(0.0, 0.0);
        self.alpha.fill(zero);
        self.beta.fill(0.0);
        self.h_hat.fill(zero);
        self.frame_index = 0;
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Number of pilot blocks absorbed since the last reset.
    pub fn frame_index(&self) -> usize {
        self.frame_index
    }

    pub fn alpha(&self) -> &[Complex64] {
        &self.alpha
    }

    pub fn beta(&self) -> &[f64] {
        &self.beta
    }

    pub fn h_hat(&self) -> &[Complex64] {
        &self.h_hat
    }

    pub fn is_initialized(&self) -> bool {
        self.frame_index > 0
    }

    /// Folds one received pilot block into the estimate.
    pub fn ls_update(&mut self, pilot_tx: &[Complex64], pilot_rx: &[Complex64]) -> Result<()> {
        let n = self.alpha.len();
        for len in [pilot_tx.len(), pilot_rx.len()] {
            if len != n {
                return Err(Error::BadLength {
                    expected: n,
                    actual: len,
                });
            }
        }
        if let Some(tone) = pilot_tx.iter().position(|p| p.norm_sqr() == 0.0) {
            return Err(Error::ZeroPilot { tone });
        }
        let lambda = self.lambda;
        let keep = 1.0 - lambda;
        for tone in 0..n {
            let xp = pilot_tx[tone];
            self.alpha[tone] = lambda * xp.conj() * pilot_rx[tone] + keep * self.alpha[tone];
            self.beta[tone] = lambda * xp.norm_sqr() + keep * self.beta[tone];
            self.h_hat[tone] = self.alpha[tone] / self.beta[tone];
        }
        self.frame_index += 1;
        Ok(())
    }

    pub fn equalize(&self, rx_tones: &[Complex64]) -> Result<EqualizedSymbol> {
        if !self.is_initialized() {
            return Err(Error::NotInitialized);
        }
        equalize_with(rx_tones, &self.h_hat)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EqualizedSymbol {
    pub tones: Vec<Complex64>,
    /// Tones whose channel estimate fell below [`DEEP_FADE_THRESHOLD`];
    /// these are passed through unscaled.
    pub fade_flags: Vec<bool>,
}

/// One-tap equalization against an arbitrary channel response.
pub fn equalize_with(rx_tones: &[Complex64], h: &[Complex64]) -> Result<EqualizedSymbol> {
    if rx_tones.len() != h.len() {
        return Err(Error::BadLength {
            expected: h.len(),
            actual: rx_tones.len(),
        });
    }
    let mut tones = Vec::with_capacity(h.len());
    let mut fade_flags = Vec::with_capacity(h.len());
    for (&y, &hn) in rx_tones.iter().zip(h) {
        let faded = hn.norm() < DEEP_FADE_THRESHOLD;
        fade_flags.push(faded);
        tones.push(if faded { y } else { y / hn });
    }
    Ok(EqualizedSymbol { tones, fade_flags })
}

/// Walks a received frame: pilot blocks update `state`, data blocks are
/// equalized with the estimate current at that point.
pub fn estimate_and_equalize_frame(
    frame_rx: &OfdmFrame,
    cfg: &OfdmConfig,
    state: &mut EstimatorState,
) -> Result<Vec<EqualizedSymbol>> {
    let pilot = vec![cfg.pilot_value; cfg.n_subcarriers];
    let mut out = Vec::with_capacity(frame_rx.len());
    for (index, (symbol, &is_pilot)) in frame_rx.symbols.iter().zip(&frame_rx.pilot_mask).enumerate() {
        if !is_pilot && !state.is_initialized() {
            return Err(Error::NoPilotBeforeData { symbol: index });
        }
        if is_pilot != cfg.is_pilot(index) {
            return Err(Error::InvalidConfig(format!(
                "pilot mask disagrees with pilot-period {} at symbol {index}",
                cfg.pilot_period
            )));
        }
        if is_pilot {
            state.ls_update(&pilot, &symbol.values)?;
        } else {
            out.push(state.equalize(&symbol.values)?);
        }
    }
    Ok(out)
}
