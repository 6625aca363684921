//! Propagation models: AWGN, flat Rayleigh and tapped-delay multipath.
//!
//! After cyclic-prefix removal and the DFT, a channel whose taps all lie
//! within the prefix acts on every tone as `Y(k) = X(k) H(k) + E(k)`, with
//! `H` the unnormalized N-point transform of the impulse response.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::modem::ModulationScheme;
use crate::ofdm::OfdmConfig;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChannelKind {
    Awgn,
    RayleighFlat,
    Multipath,
}

impl ChannelKind {
    pub fn name(self) -> &'static str {
        match self {
            ChannelKind::Awgn => "awgn",
            ChannelKind::RayleighFlat => "rayleigh",
            ChannelKind::Multipath => "multipath",
        }
    }
}

impl fmt::Display for ChannelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ChannelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "awgn" => Ok(ChannelKind::Awgn),
            "rayleigh" | "rayleigh-flat" | "flat" => Ok(ChannelKind::RayleighFlat),
            "multipath" => Ok(ChannelKind::Multipath),
            other => Err(Error::InvalidConfig(format!("unknown channel {other:?}"))),
        }
    }
}

/// One path of the power-delay profile. `power` is linear.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tap {
    pub delay: usize,
    pub power: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelModel {
    pub kind: ChannelKind,
    /// Normalized so the linear powers sum to one. Empty unless multipath.
    taps: Vec<Tap>,
    /// Hold one realization per frame; otherwise one realization is drawn
    /// and held for the whole run.
    pub block_fading: bool,
}

/// Delays (samples) and powers (dB) used when no profile is given.
pub const DEFAULT_MULTIPATH_PROFILE: [(usize, f64); 3] = [(0, 0.0), (4, -3.0), (8, -6.0)];

impl ChannelModel {
    pub fn awgn() -> Self {
        ChannelModel {
            kind: ChannelKind::Awgn,
            taps: Vec::new(),
            block_fading: true,
        }
    }

    pub fn rayleigh_flat() -> Self {
        ChannelModel {
            kind: ChannelKind::RayleighFlat,
            taps: Vec::new(),
            block_fading: true,
        }
    }

    /// Multipath profile from `(delay, power_db)` pairs, normalized to unit power.
    pub fn multipath(profile: &[(usize, f64)]) -> Result<Self> {
        if profile.is_empty() {
            return Err(Error::InvalidConfig("multipath profile has no taps".into()));
        }
        if let Some(&(_, db)) = profile.iter().find(|(_, db)| !db.is_finite()) {
            return Err(Error::InvalidConfig(format!("tap power {db} dB is not finite")));
        }
        let linear: Vec<f64> = profile.iter().map(|&(_, db)| 10f64.powf(db / 10.0)).collect();
        let total: f64 = linear.iter().sum();
        let taps = profile
            .iter()
            .zip(&linear)
            .map(|(&(delay, _), &p)| Tap {
                delay,
                power: p / total,
            })
            .collect();
        Ok(ChannelModel {
            kind: ChannelKind::Multipath,
            taps,
            block_fading: true,
        })
    }

    pub fn default_multipath() -> Self {
        Self::multipath(&DEFAULT_MULTIPATH_PROFILE).expect("default profile is valid")
    }

    pub fn from_kind(kind: ChannelKind, profile: Option<&[(usize, f64)]>) -> Result<Self> {
        match kind {
            ChannelKind::Awgn => Ok(Self::awgn()),
            ChannelKind::RayleighFlat => Ok(Self::rayleigh_flat()),
            ChannelKind::Multipath => match profile {
                Some(p) => Self::multipath(p),
                None => Ok(Self::default_multipath()),
            },
        }
    }

    pub fn with_block_fading(mut self, block_fading: bool) -> Self {
        self.block_fading = block_fading;
        self
    }

    pub fn taps(&self) -> &[Tap] {
        &self.taps
    }

    pub fn max_delay(&self) -> usize {
        self.taps.iter().map(|t| t.delay).max().unwrap_or(0)
    }

    pub fn validate(&self, cfg: &OfdmConfig) -> Result<()> {
        match self.taps.iter().find(|t| t.delay > cfg.cp_len) {
            Some(t) => Err(Error::TapExceedsCp {
                delay: t.delay,
                cp_len: cfg.cp_len,
            }),
            None => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    pub h_time: Vec<Complex64>,
    pub h_freq: Vec<Complex64>,
}

impl ChannelRealization {
    pub fn from_impulse_response(h_time: Vec<Complex64>, n_subcarriers: usize) -> Self {
        let n = n_subcarriers as f64;
        let h_freq = (0..n_subcarriers)
            .map(|k| {
                h_time
                    .iter()
                    .enumerate()
                    .map(|(l, &h)| {
                        let phase = -2.0 * PI * ((k * l) % n_subcarriers) as f64 / n;
                        h * Complex64::from_polar(1.0, phase)
                    })
                    .sum()
            })
            .collect();
        ChannelRealization { h_time, h_freq }
    }

    pub fn identity(n_subcarriers: usize) -> Self {
        Self::from_impulse_response(vec![Complex64::new(1.0, 0.0)], n_subcarriers)
    }
}

/// Per-dimension noise deviation for unit-energy symbols: `2 sigma^2 = 1 / (k Eb/N0)`.
///
/// `+inf` dB yields a noiseless channel.
pub fn noise_sigma(ebn0_db: f64, scheme: ModulationScheme) -> f64 {
    let ebn0 = 10f64.powf(ebn0_db / 10.0);
    let es_n0 = scheme.bits_per_symbol() as f64 * ebn0;
    (0.5 / es_n0).sqrt()
}

/// Circularly-symmetric complex Gaussian with `E|z|^2 = variance`.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R, variance: f64) -> Complex64 {
    let sd = (variance / 2.0).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(sd * re, sd * im)
}

/// Adds complex AWGN with standard deviation `sigma` per real dimension.
pub fn apply_awgn<R: Rng + ?Sized>(samples: &mut [Complex64], sigma: f64, rng: &mut R) {
    if sigma == 0.0 {
        return;
    }
    for s in samples {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        *s += Complex64::new(sigma * re, sigma * im);
    }
}

pub fn draw_realization<R: Rng + ?Sized>(
    model: &ChannelModel,
    cfg: &OfdmConfig,
    rng: &mut R,
) -> Result<ChannelRealization> {
    model.validate(cfg)?;
    let h_time = match model.kind {
        ChannelKind::Awgn => vec![Complex64::new(1.0, 0.0)],
        ChannelKind::RayleighFlat => vec![complex_gaussian(rng, 1.0)],
        ChannelKind::Multipath => {
            let mut h = vec![Complex64::new(0.0, 0.0); model.max_delay() + 1];
            for tap in &model.taps {
                h[tap.delay] += complex_gaussian(rng, tap.power);
            }
            h
        }
    };
    Ok(ChannelRealization::from_impulse_response(h_time, cfg.n_subcarriers))
}

/// Linear convolution truncated to the input length.
pub fn convolve(samples: &[Complex64], h: &[Complex64]) -> Vec<Complex64> {
    (0..samples.len())
        .map(|i| {
            h.iter()
                .take(i + 1)
                .enumerate()
                .map(|(l, &hl)| hl * samples[i - l])
                .sum()
        })
        .collect()
}

/// Passes a sample stream through one channel realization and adds noise.
pub fn propagate<R: Rng + ?Sized>(
    samples: &[Complex64],
    realization: &ChannelRealization,
    sigma: f64,
    rng: &mut R,
) -> Vec<Complex64> {
    let mut out = if realization.h_time.len() == 1 {
        let h = realization.h_time[0];
        samples.iter().map(|&s| s * h).collect()
    } else {
        convolve(samples, &realization.h_time)
    };
    apply_awgn(&mut out, sigma, rng);
    out
}
