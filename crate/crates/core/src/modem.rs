//! Constellation mapping and hard-decision demapping.
//!
//! BPSK puts bit 1 at phase 0 and bit 0 at phase pi. QPSK, 16QAM and 64QAM
//! are square constellations: the first half of each bit group selects the
//! in-phase level, the second half the quadrature level, and each axis is
//! Gray coded independently so axis neighbours differ in exactly one bit.
//! Every constellation is scaled to unit average energy.
//!
//! Symbol labels are the bit group read MSB first, so label `0b10` for QPSK
//! means the first bit is 1 and the second is 0.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModulationScheme {
    Bpsk,
    /// Differentially encoded BPSK; see [`dbpsk_encode`].
    Dbpsk,
    Qpsk,
    Qam16,
    Qam64,
}

impl ModulationScheme {
    pub const ALL: [ModulationScheme; 5] = [
        ModulationScheme::Bpsk,
        ModulationScheme::Dbpsk,
        ModulationScheme::Qpsk,
        ModulationScheme::Qam16,
        ModulationScheme::Qam64,
    ];

    pub fn bits_per_symbol(self) -> usize {
        match self {
            ModulationScheme::Bpsk | ModulationScheme::Dbpsk => 1,
            ModulationScheme::Qpsk => 2,
            ModulationScheme::Qam16 => 4,
            ModulationScheme::Qam64 => 6,
        }
    }

    pub fn constellation_size(self) -> usize {
        1 << self.bits_per_symbol()
    }

    pub fn name(self) -> &'static str {
        match self {
            ModulationScheme::Bpsk => "bpsk",
            ModulationScheme::Dbpsk => "dbpsk",
            ModulationScheme::Qpsk => "qpsk",
            ModulationScheme::Qam16 => "16qam",
            ModulationScheme::Qam64 => "64qam",
        }
    }

    /// Constellation used on the air. DBPSK shares the BPSK points.
    pub fn constellation(self) -> &'static Constellation {
        static TABLES: OnceLock<[Constellation; 4]> = OnceLock::new();
        let tables = TABLES.get_or_init(|| {
            [
                Constellation::bpsk(),
                Constellation::square(1),
                Constellation::square(2),
                Constellation::square(3),
            ]
        });
        match self {
            ModulationScheme::Bpsk | ModulationScheme::Dbpsk => &tables[0],
            ModulationScheme::Qpsk => &tables[1],
            ModulationScheme::Qam16 => &tables[2],
            ModulationScheme::Qam64 => &tables[3],
        }
    }
}

impl fmt::Display for ModulationScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModulationScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "bpsk" => Ok(ModulationScheme::Bpsk),
            "dbpsk" => Ok(ModulationScheme::Dbpsk),
            "qpsk" | "4qam" => Ok(ModulationScheme::Qpsk),
            "16qam" | "qam16" => Ok(ModulationScheme::Qam16),
            "64qam" | "qam64" => Ok(ModulationScheme::Qam64),
            other => Err(Error::InvalidConfig(format!(
                "unknown modulation scheme {other:?}"
            ))),
        }
    }
}

/// Per-axis layout of a square constellation.
#[derive(Debug, Clone)]
struct Axis {
    bits: usize,
    /// Amplitude for each Gray label on this axis.
    amplitude: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct Constellation {
    points: Vec<Complex64>,
    axis: Option<Axis>,
}

impl Constellation {
    fn bpsk() -> Self {
        Constellation {
            points: vec![Complex64::new(-1.0, 0.0), Complex64::new(1.0, 0.0)],
            axis: None,
        }
    }

    /// Square 2^(2m)-point constellation with `m` Gray-coded bits per axis.
    fn square(bits_per_axis: usize) -> Self {
        let levels = 1usize << bits_per_axis;
        let order = (levels * levels) as f64;
        let scale = (2.0 * (order - 1.0) / 3.0).sqrt();
        let amplitude = (0..levels)
            .map(|label| {
                let index = gray_decode(label);
                (levels as f64 - 1.0 - 2.0 * index as f64) / scale
            })
            .collect::<Vec<_>>();
        let points = (0..levels * levels)
            .map(|label| {
                let i = label >> bits_per_axis;
                let q = label & (levels - 1);
                Complex64::new(amplitude[i], amplitude[q])
            })
            .collect();
        Constellation {
            points,
            axis: Some(Axis {
                bits: bits_per_axis,
                amplitude,
            }),
        }
    }

    /// Points indexed by symbol label.
    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    pub fn bits_per_symbol(&self) -> usize {
        self.points.len().trailing_zeros() as usize
    }

    /// Label of the nearest point; equal distances resolve to the lowest label.
    pub fn nearest_label(&self, y: Complex64) -> usize {
        match &self.axis {
            // Ties on the imaginary axis are symmetric, so only the sign of
            // the real part matters. Zero falls through to label 0.
            None => usize::from(y.re > 0.0),
            Some(axis) => {
                let i = slice_axis(&axis.amplitude, y.re);
                let q = slice_axis(&axis.amplitude, y.im);
                (i << axis.bits) | q
            }
        }
    }
}

fn slice_axis(amplitude: &[f64], v: f64) -> usize {
    let mut best = 0;
    let mut best_dist = f64::INFINITY;
    for (label, &a) in amplitude.iter().enumerate() {
        let d = (v - a) * (v - a);
        if d < best_dist {
            best = label;
            best_dist = d;
        }
    }
    best
}

fn gray_decode(mut g: usize) -> usize {
    let mut b = 0;
    while g != 0 {
        b ^= g;
        g >>= 1;
    }
    b
}

pub(crate) fn check_bits(bits: &[u8]) -> Result<()> {
    match bits.iter().position(|&b| b > 1) {
        Some(index) => Err(Error::InvalidBit {
            index,
            value: bits[index],
        }),
        None => Ok(()),
    }
}

/// Maps a bit stream onto constellation symbols, `bits_per_symbol` bits at a time.
///
/// DBPSK is mapped with the BPSK table; apply [`dbpsk_encode`] first.
pub fn map_bits(bits: &[u8], scheme: ModulationScheme) -> Result<Vec<Complex64>> {
    let k = scheme.bits_per_symbol();
    if !bits.len().is_multiple_of(k) {
        return Err(Error::NonMultipleLength {
            len: bits.len(),
            bits_per_symbol: k,
        });
    }
    check_bits(bits)?;
    let points = scheme.constellation().points();
    Ok(bits
        .chunks_exact(k)
        .map(|group| points[group.iter().fold(0, |acc, &b| (acc << 1) | b as usize)])
        .collect())
}

/// Minimum-distance hard decisions, emitted MSB first per symbol.
pub fn demap_symbols(symbols: &[Complex64], scheme: ModulationScheme) -> Vec<u8> {
    let k = scheme.bits_per_symbol();
    let constellation = scheme.constellation();
    let mut bits = Vec::with_capacity(symbols.len() * k);
    for &y in symbols {
        let label = constellation.nearest_label(y);
        bits.extend((0..k).rev().map(|shift| ((label >> shift) & 1) as u8));
    }
    bits
}

/// `out[i] = out[i-1] ^ in[i]` with a zero reference bit.
pub fn dbpsk_encode(bits: &[u8]) -> Vec<u8> {
    let mut prev = 0u8;
    bits.iter()
        .map(|&b| {
            prev ^= b & 1;
            prev
        })
        .collect()
}

/// `out[i] = in[i] ^ in[i-1]` with a zero reference bit.
pub fn dbpsk_decode(bits: &[u8]) -> Vec<u8> {
    let mut prev = 0u8;
    bits.iter()
        .map(|&b| {
            let out = (b ^ prev) & 1;
            prev = b;
            out
        })
        .collect()
}
