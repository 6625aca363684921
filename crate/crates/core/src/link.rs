//! End-to-end link: payload bits through framing, channel and receiver.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::channel::{self, ChannelModel, ChannelRealization};
use crate::estimation::{self, EstimatorState, DEFAULT_LAMBDA};
use crate::metrics::{self, BerRecord, ErrorTally};
use crate::modem::{self, ModulationScheme};
use crate::ofdm::{self, OfdmConfig, OfdmModem};
use crate::{Error, Result};

/// How the receiver undoes the channel before hard decisions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Equalization {
    /// Demap the raw received tones.
    Off,
    /// Pilot-based forgetting-factor LS estimate.
    Ls,
    /// Divide by the true channel response (perfect channel knowledge).
    Ideal,
}

impl Equalization {
    pub fn name(self) -> &'static str {
        match self {
            Equalization::Off => "off",
            Equalization::Ls => "on",
            Equalization::Ideal => "ideal",
        }
    }
}

impl fmt::Display for Equalization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Equalization {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "off" | "false" | "no" => Ok(Equalization::Off),
            "on" | "ls" | "true" | "yes" => Ok(Equalization::Ls),
            "ideal" | "perfect" => Ok(Equalization::Ideal),
            other => Err(Error::InvalidConfig(format!(
                "estimation must be on, off or ideal, got {other:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinkConfig {
    pub scheme: ModulationScheme,
    pub ofdm: OfdmConfig,
    pub channel: ChannelModel,
    pub equalization: Equalization,
    pub lambda: f64,
    /// Clear the estimator whenever a fresh channel realization is drawn.
    pub reset_estimator: bool,
    /// OFDM symbols (pilots included) sent under one channel realization.
    pub frame_symbols: usize,
}

impl Default for LinkConfig {
    fn default() -> Self {
        LinkConfig {
            scheme: ModulationScheme::Bpsk,
            ofdm: OfdmConfig::default(),
            channel: ChannelModel::awgn(),
            equalization: Equalization::Ls,
            lambda: DEFAULT_LAMBDA,
            reset_estimator: true,
            frame_symbols: 32,
        }
    }
}

impl LinkConfig {
    pub fn validate(&self) -> Result<()> {
        self.ofdm.validate()?;
        self.channel.validate(&self.ofdm)?;
        if !(self.lambda > 0.0 && self.lambda <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "lambda must be in (0, 1], got {}",
                self.lambda
            )));
        }
        if self.ofdm.data_symbols_in(self.frame_symbols) == 0 {
            return Err(Error::InvalidConfig(format!(
                "frame-symbols {} with pilot-period {} carries no data",
                self.frame_symbols, self.ofdm.pilot_period
            )));
        }
        Ok(())
    }

    /// Payload bits carried by one full frame.
    pub fn data_bits_per_frame(&self) -> usize {
        self.ofdm.data_symbols_in(self.frame_symbols)
            * self.ofdm.n_subcarriers
            * self.scheme.bits_per_symbol()
    }
}

/// What the receiver recovered from one frame.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameOutcome {
    pub bits: Vec<u8>,
    /// Equalized data tones, pilots excluded, padding included.
    pub tones: Vec<Complex64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Transmission {
    pub bits: Vec<u8>,
    /// Leading equalized data tones, at most the requested count.
    pub scatter: Vec<(f64, f64)>,
}

/// Transmitter, channel and receiver for one simulation stream.
#[derive(Debug, Clone)]
pub struct Link {
    cfg: LinkConfig,
    modem: OfdmModem,
    estimator: EstimatorState,
    realization: Option<ChannelRealization>,
    sigma: f64,
}

impl Link {
    /// `ebn0_db = f64::INFINITY` gives a noiseless link.
    pub fn new(cfg: LinkConfig, ebn0_db: f64) -> Result<Self> {
        cfg.validate()?;
        if ebn0_db.is_nan() {
            return Err(Error::InvalidConfig("Eb/N0 is NaN".into()));
        }
        Ok(Link {
            modem: OfdmModem::new(cfg.ofdm)?,
            estimator: EstimatorState::new(cfg.ofdm.n_subcarriers, cfg.lambda)?,
            realization: None,
            sigma: channel::noise_sigma(ebn0_db, cfg.scheme),
            cfg,
        })
    }

    pub fn config(&self) -> &LinkConfig {
        &self.cfg
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// Channel used for the most recent frame.
    pub fn realization(&self) -> Option<&ChannelRealization> {
        self.realization.as_ref()
    }

    pub fn estimator(&self) -> &EstimatorState {
        &self.estimator
    }

    /// Sends at most one frame's worth of payload.
    pub fn transmit_frame<R: Rng + ?Sized>(&mut self, payload: &[u8], rng: &mut R) -> Result<FrameOutcome> {
        let cfg = &self.cfg;
        if payload.len() > cfg.data_bits_per_frame() {
            return Err(Error::BadLength {
                expected: cfg.data_bits_per_frame(),
                actual: payload.len(),
            });
        }
        let coded = match cfg.scheme {
            ModulationScheme::Dbpsk => modem::dbpsk_encode(payload),
            _ => payload.to_vec(),
        };
        let frame = ofdm::build_frame(&coded, cfg.scheme, &cfg.ofdm)?;
        let samples = self.modem.frame_to_samples(&frame)?;

        if self.realization.is_none() || cfg.channel.block_fading {
            self.realization = Some(channel::draw_realization(&cfg.channel, &cfg.ofdm, rng)?);
            if cfg.reset_estimator {
                self.estimator.reset();
            }
        }
        let realization = self.realization.as_ref().expect("drawn above");
        let received = channel::propagate(&samples, realization, self.sigma, rng);
        let rx_frame = self.modem.samples_to_frame(&received, frame.len())?;

        let tones: Vec<Complex64> = match cfg.equalization {
            Equalization::Off => rx_frame
                .data_symbols()
                .flat_map(|s| s.values.iter().copied())
                .collect(),
            Equalization::Ls => estimation::estimate_and_equalize_frame(&rx_frame, &cfg.ofdm, &mut self.estimator)?
                .into_iter()
                .flat_map(|s| s.tones)
                .collect(),
            Equalization::Ideal => {
                let mut out = Vec::new();
                for s in rx_frame.data_symbols() {
                    out.extend(estimation::equalize_with(&s.values, &realization.h_freq)?.tones);
                }
                out
            }
        };

        let mut bits = modem::demap_symbols(&tones, cfg.scheme);
        bits.truncate(bits.len() - frame.pad_bits);
        if cfg.scheme == ModulationScheme::Dbpsk {
            bits = modem::dbpsk_decode(&bits);
        }
        Ok(FrameOutcome { bits, tones })
    }

    /// Splits an arbitrary bit stream into frames and sends them in order.
    pub fn transmit<R: Rng + ?Sized>(&mut self, bits: &[u8], scatter_max: usize, rng: &mut R) -> Result<Transmission> {
        let per_frame = self.cfg.data_bits_per_frame();
        let mut out = Vec::with_capacity(bits.len());
        let mut tones = Vec::with_capacity(scatter_max.min(1 << 16));
        for chunk in bits.chunks(per_frame) {
            let frame = self.transmit_frame(chunk, rng)?;
            out.extend_from_slice(&frame.bits);
            let room = scatter_max - tones.len();
            tones.extend(frame.tones.iter().take(room));
        }
        Ok(Transmission {
            bits: out,
            scatter: metrics::scatter_capture(&tones, scatter_max),
        })
    }
}

const STREAM_SPLIT: u64 = 0x9E37_79B9_7F4A_7C15;

/// Seed of the independent RNG stream for sweep point `index`.
pub fn stream_seed(seed: u64, index: usize) -> u64 {
    seed.wrapping_add(STREAM_SPLIT.wrapping_mul(index as u64))
}

pub fn stream_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Monte-Carlo BER at one Eb/N0 with random payloads of `bit_budget` bits
/// (rounded up to whole frames).
pub fn simulate_point(cfg: &LinkConfig, ebn0_db: f64, bit_budget: u64, seed: u64) -> Result<BerRecord> {
    let mut link = Link::new(cfg.clone(), ebn0_db)?;
    let mut rng = stream_rng(seed);
    let per_frame = cfg.data_bits_per_frame();
    let frames = bit_budget.max(1).div_ceil(per_frame as u64);
    let mut tally = ErrorTally::default();
    let mut payload = vec![0u8; per_frame];
    for _ in 0..frames {
        fill_random_bits(&mut payload, &mut rng);
        let rx = link.transmit_frame(&payload, &mut rng)?;
        tally += metrics::ber(&payload, &rx.bits)?;
    }
    BerRecord::new(ebn0_db, tally)
}

pub fn fill_random_bits<R: Rng + ?Sized>(bits: &mut [u8], rng: &mut R) {
    for chunk in bits.chunks_mut(64) {
        let word: u64 = rng.random();
        for (i, b) in chunk.iter_mut().enumerate() {
            *b = ((word >> i) & 1) as u8;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn noiseless_awgn_link_is_lossless() {
        for scheme in ModulationScheme::ALL {
            for eq in [Equalization::Off, Equalization::Ls, Equalization::Ideal] {
                let cfg = LinkConfig {
                    scheme,
                    equalization: eq,
                    ..LinkConfig::default()
                };
                let rec = simulate_point(&cfg, f64::INFINITY, 20_000, 1).unwrap();
                assert_eq!(rec.bits_error, 0, "{scheme} {eq}");
            }
        }
    }

    #[test]
    fn ragged_payload_is_unpadded() {
        let cfg = LinkConfig {
            scheme: ModulationScheme::Qam64,
            channel: ChannelModel::default_multipath(),
            ..LinkConfig::default()
        };
        let mut link = Link::new(cfg, f64::INFINITY).unwrap();
        let mut rng = stream_rng(3);
        let mut bits = vec![0u8; 1001];
        fill_random_bits(&mut bits, &mut rng);
        let tx = link.transmit(&bits, 10, &mut rng).unwrap();
        assert_eq!(tx.bits, bits);
        assert_eq!(tx.scatter.len(), 10);
    }

    #[test]
    fn oversized_payload_rejected() {
        let cfg = LinkConfig::default();
        let per_frame = cfg.data_bits_per_frame();
        let mut link = Link::new(cfg, 10.0).unwrap();
        let mut rng = stream_rng(0);
        assert!(matches!(
            link.transmit_frame(&vec![0; per_frame + 1], &mut rng),
            Err(Error::BadLength { .. })
        ));
    }

    #[test]
    fn static_channel_is_held_across_frames() {
        let cfg = LinkConfig {
            channel: ChannelModel::default_multipath().with_block_fading(false),
            ..LinkConfig::default()
        };
        let mut link = Link::new(cfg, 20.0).unwrap();
        let mut rng = stream_rng(5);
        link.transmit_frame(&[1; 10], &mut rng).unwrap();
        let first = link.realization().unwrap().clone();
        let updates = link.estimator().frame_index();
        link.transmit_frame(&[1; 10], &mut rng).unwrap();
        assert_eq!(link.realization().unwrap(), &first);
        assert!(link.estimator().frame_index() > updates);
    }

    #[test]
    fn stream_seeds_follow_split_rule() {
        assert_eq!(stream_seed(7, 0), 7);
        assert_eq!(stream_seed(7, 1), 7u64.wrapping_add(0x9E37_79B9_7F4A_7C15));
        assert_eq!(stream_seed(u64::MAX, 2), u64::MAX.wrapping_add(0x9E37_79B9_7F4A_7C15u64.wrapping_mul(2)));
    }

    #[test]
    fn invalid_configs_fail_fast() {
        let bad = LinkConfig {
            lambda: 0.0,
            ..LinkConfig::default()
        };
        assert!(Link::new(bad, 0.0).is_err());
        let bad = LinkConfig {
            frame_symbols: 1,
            ..LinkConfig::default()
        };
        assert!(bad.validate().is_err());
        let bad = LinkConfig {
            channel: ChannelModel::multipath(&[(0, 0.0), (20, -1.0)]).unwrap(),
            ..LinkConfig::default()
        };
        assert_eq!(bad.validate(), Err(Error::TapExceedsCp { delay: 20, cp_len: 16 }));
    }
}
