//! OFDM framing: block pilots, unitary IDFT/DFT and cyclic prefix.
//!
//! A frame is a sequence of OFDM symbols in which every `pilot_period`-th
//! symbol (starting at index 0) carries the pilot value on all tones and the
//! remaining symbols carry data packed in natural subcarrier order.

use num_complex::Complex64;

use crate::dft::{DftPlan, Direction};
use crate::modem::{self, ModulationScheme};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OfdmConfig {
    pub n_subcarriers: usize,
    pub cp_len: usize,
    pub pilot_period: usize,
    pub pilot_value: Complex64,
}

impl Default for OfdmConfig {
    fn default() -> Self {
        OfdmConfig {
            n_subcarriers: 64,
            cp_len: 16,
            pilot_period: 8,
            pilot_value: Complex64::new(1.0, 0.0),
        }
    }
}

impl OfdmConfig {
    pub fn validate(&self) -> Result<()> {
        let n = self.n_subcarriers;
        if n == 0 || !n.is_power_of_two() {
            return Err(Error::InvalidConfig(format!(
                "fft-size must be a power of two, got {n}"
            )));
        }
        if self.cp_len == 0 || self.cp_len > n {
            return Err(Error::InvalidConfig(format!(
                "cp-len must be in 1..={n}, got {}",
                self.cp_len
            )));
        }
        if self.pilot_period == 0 {
            return Err(Error::InvalidConfig("pilot-period must be at least 1".into()));
        }
        if self.pilot_value.norm_sqr() == 0.0 {
            return Err(Error::InvalidConfig("pilot value must be nonzero".into()));
        }
        Ok(())
    }

    /// Samples per symbol on the air, `N + M`.
    pub fn symbol_len(&self) -> usize {
        self.n_subcarriers + self.cp_len
    }

    pub fn is_pilot(&self, symbol_index: usize) -> bool {
        symbol_index.is_multiple_of(self.pilot_period)
    }

    /// Number of symbols needed to carry `data_symbols` data blocks.
    pub fn frame_len_for(&self, data_symbols: usize) -> usize {
        if self.pilot_period == 1 {
            // Every position is a pilot; a frame can carry no data.
            return 1;
        }
        let per_block = self.pilot_period - 1;
        let full = data_symbols / per_block;
        let rest = data_symbols % per_block;
        let len = full * self.pilot_period + if rest > 0 { rest + 1 } else { 0 };
        len.max(1)
    }

    /// Data symbols carried by a frame of `frame_len` symbols.
    pub fn data_symbols_in(&self, frame_len: usize) -> usize {
        (0..frame_len).filter(|&i| !self.is_pilot(i)).count()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Domain {
    Frequency,
    Time,
    TimeWithCp,
}

impl Domain {
    fn name(self) -> &'static str {
        match self {
            Domain::Frequency => "frequency",
            Domain::Time => "time",
            Domain::TimeWithCp => "time-with-cp",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OfdmSymbol {
    pub domain: Domain,
    pub values: Vec<Complex64>,
}

impl OfdmSymbol {
    pub fn frequency(tones: Vec<Complex64>) -> Self {
        OfdmSymbol {
            domain: Domain::Frequency,
            values: tones,
        }
    }

    pub fn time(samples: Vec<Complex64>) -> Self {
        OfdmSymbol {
            domain: Domain::Time,
            values: samples,
        }
    }

    pub fn time_with_cp(samples: Vec<Complex64>) -> Self {
        OfdmSymbol {
            domain: Domain::TimeWithCp,
            values: samples,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    fn expect(&self, domain: Domain) -> Result<()> {
        if self.domain == domain {
            Ok(())
        } else {
            Err(Error::WrongDomain {
                expected: domain.name(),
                actual: self.domain.name(),
            })
        }
    }

    /// Prepends the last `cp_len` samples.
    pub fn add_cyclic_prefix(&self, cp_len: usize) -> Result<OfdmSymbol> {
        self.expect(Domain::Time)?;
        let n = self.values.len();
        if cp_len == 0 || cp_len > n {
            return Err(Error::BadPrefixLen { cp_len, n });
        }
        let mut out = Vec::with_capacity(n + cp_len);
        out.extend_from_slice(&self.values[n - cp_len..]);
        out.extend_from_slice(&self.values);
        Ok(OfdmSymbol::time_with_cp(out))
    }

    pub fn remove_cyclic_prefix(&self, cp_len: usize) -> Result<OfdmSymbol> {
        self.expect(Domain::TimeWithCp)?;
        let total = self.values.len();
        if cp_len == 0 {
            return Err(Error::BadPrefixLen { cp_len, n: total });
        }
        // The payload must be at least as long as its prefix.
        if total < 2 * cp_len {
            return Err(Error::BadLength {
                expected: 2 * cp_len,
                actual: total,
            });
        }
        Ok(OfdmSymbol::time(self.values[cp_len..].to_vec()))
    }
}

/// Frequency-domain OFDM frame.
#[derive(Debug, Clone, PartialEq)]
pub struct OfdmFrame {
    pub symbols: Vec<OfdmSymbol>,
    pub pilot_mask: Vec<bool>,
    /// Zero bits appended to fill the final data symbol.
    pub pad_bits: usize,
}

impl OfdmFrame {
    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn data_symbols(&self) -> impl Iterator<Item = &OfdmSymbol> {
        self.symbols
            .iter()
            .zip(&self.pilot_mask)
            .filter(|(_, &pilot)| !pilot)
            .map(|(s, _)| s)
    }
}

/// Maps bits and lays them out in a frame with block pilots.
///
/// DBPSK bits are mapped with the BPSK table; differential encoding is the
/// caller's job.
pub fn build_frame(bits: &[u8], scheme: ModulationScheme, cfg: &OfdmConfig) -> Result<OfdmFrame> {
    cfg.validate()?;
    let n = cfg.n_subcarriers;
    let k = scheme.bits_per_symbol();
    let per_symbol = n * k;
    if cfg.pilot_period == 1 && !bits.is_empty() {
        return Err(Error::InvalidConfig(
            "pilot-period 1 leaves no room for data".into(),
        ));
    }
    let data_symbols = bits.len().div_ceil(per_symbol);
    let pad_bits = data_symbols * per_symbol - bits.len();

    let mut padded = Vec::with_capacity(bits.len() + pad_bits);
    padded.extend_from_slice(bits);
    padded.resize(bits.len() + pad_bits, 0);
    let tones = modem::map_bits(&padded, scheme)?;
    let mut data = tones.chunks_exact(n);

    let frame_len = cfg.frame_len_for(data_symbols);
    let mut symbols = Vec::with_capacity(frame_len);
    let mut pilot_mask = Vec::with_capacity(frame_len);
    for i in 0..frame_len {
        let pilot = cfg.is_pilot(i);
        pilot_mask.push(pilot);
        if pilot {
            symbols.push(OfdmSymbol::frequency(vec![cfg.pilot_value; n]));
        } else {
            let chunk = data.next().expect("frame length accounts for every data symbol");
            symbols.push(OfdmSymbol::frequency(chunk.to_vec()));
        }
    }
    Ok(OfdmFrame {
        symbols,
        pilot_mask,
        pad_bits,
    })
}

/// IDFT/CP modulator and CP/DFT demodulator for one configuration.
#[derive(Debug, Clone)]
pub struct OfdmModem {
    cfg: OfdmConfig,
    plan: DftPlan,
}

impl OfdmModem {
    pub fn new(cfg: OfdmConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(OfdmModem {
            plan: DftPlan::new(cfg.n_subcarriers)?,
            cfg,
        })
    }

    pub fn config(&self) -> &OfdmConfig {
        &self.cfg
    }

    /// IDFT each symbol, prepend its cyclic prefix and serialize.
    pub fn frame_to_samples(&self, frame: &OfdmFrame) -> Result<Vec<Complex64>> {
        let n = self.cfg.n_subcarriers;
        let m = self.cfg.cp_len;
        let mut out = Vec::with_capacity(frame.len() * (n + m));
        let mut buf = vec![Complex64::new(0.0, 0.0); n];
        for sym in &frame.symbols {
            sym.expect(Domain::Frequency)?;
            if sym.len() != n {
                return Err(Error::BadLength {
                    expected: n,
                    actual: sym.len(),
                });
            }
            buf.copy_from_slice(&sym.values);
            self.plan.process(&mut buf, Direction::Inverse)?;
            out.extend_from_slice(&buf[n - m..]);
            out.extend_from_slice(&buf);
        }
        Ok(out)
    }

    /// Splits a sample stream into symbols, drops the prefix and DFTs each one.
    ///
    /// The returned frame has `pad_bits = 0`; the receiver copies the real
    /// value from the transmit side.
    pub fn samples_to_frame(&self, samples: &[Complex64], n_symbols: usize) -> Result<OfdmFrame> {
        let n = self.cfg.n_subcarriers;
        let m = self.cfg.cp_len;
        let expected = n_symbols * (n + m);
        if samples.len() != expected {
            return Err(Error::BadLength {
                expected,
                actual: samples.len(),
            });
        }
        let mut symbols = Vec::with_capacity(n_symbols);
        for chunk in samples.chunks_exact(n + m) {
            let mut buf = chunk[m..].to_vec();
            self.plan.process(&mut buf, Direction::Forward)?;
            symbols.push(OfdmSymbol::frequency(buf));
        }
        Ok(OfdmFrame {
            symbols,
            pilot_mask: (0..n_symbols).map(|i| self.cfg.is_pilot(i)).collect(),
            pad_bits: 0,
        })
    }
}

pub fn frame_to_samples(frame: &OfdmFrame, cfg: &OfdmConfig) -> Result<Vec<Complex64>> {
    OfdmModem::new(*cfg)?.frame_to_samples(frame)
}

pub fn samples_to_frame(
    samples: &[Complex64],
    cfg: &OfdmConfig,
    n_symbols: usize,
) -> Result<OfdmFrame> {
    OfdmModem::new(*cfg)?.samples_to_frame(samples, n_symbols)
}
