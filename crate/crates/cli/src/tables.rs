//! Reproduction report for the reference BER tables.
//!
//! The BPSK AWGN / flat-Rayleigh comparison is checked quantitatively
//! against both the reference values and the closed-form curves. The
//! with/without-estimation tables depend on a fading profile, pilot layout
//! and forgetting factor that were never published, so only their
//! qualitative shape is checked.

use std::fmt::Write as _;

use anyhow::Result;
use ofdmlink::channel::ChannelModel;
use ofdmlink::link::{self, Equalization, LinkConfig};
use ofdmlink::metrics::{self, BerRecord};
use ofdmlink::modem::ModulationScheme;

use crate::config::RunConfig;
use crate::sweep::{run_tasks, Task};

/// Relative tolerance for the quantitative comparison.
pub const BPSK_TOLERANCE: f64 = 0.10;
/// Acceptable BER band for demapping raw multipath tones.
pub const PLATEAU_BAND: (f64, f64) = (0.40, 0.55);

/// (Eb/N0 dB, BPSK AWGN, BPSK Rayleigh).
pub const BPSK_REFERENCE: [(f64, f64, f64); 3] = [
    (0.0, 0.07865, 0.1464),
    (2.0, 0.03751, 0.1085),
    (4.0, 0.0125, 0.07714),
];

pub const ESTIMATION_SNR_DB: [f64; 3] = [5.0, 10.0, 15.0];

pub const ESTIMATION_SCHEMES: [ModulationScheme; 4] = [
    ModulationScheme::Bpsk,
    ModulationScheme::Qpsk,
    ModulationScheme::Qam16,
    ModulationScheme::Qam64,
];

/// Reference (without, with) estimation values per scheme at 5/10/15 dB.
pub const ESTIMATION_REFERENCE: [[(f64, f64); 3]; 4] = [
    [(0.4948, 0.099), (0.4964, 0.033), (0.4938, 0.0072)],
    [(0.4987, 0.2600), (0.4985, 0.1900), (0.4983, 0.1435)],
    [(0.4965, 0.3900), (0.4957, 0.3400), (0.4953, 0.3241)],
    [(0.4983, 0.4300), (0.4982, 0.3800), (0.4979, 0.3762)],
];

/// Symbols per flat-Rayleigh frame: one pilot and one data block, so every
/// 64 data bits see a fresh channel.
pub const RAYLEIGH_FRAME_SYMBOLS: usize = 2;

#[derive(Debug, Clone, PartialEq)]
pub struct BpskRow {
    pub snr_db: f64,
    pub awgn: BerRecord,
    pub rayleigh: BerRecord,
    pub reference_awgn: f64,
    pub reference_rayleigh: f64,
}

impl BpskRow {
    pub fn theory_awgn(&self) -> f64 {
        metrics::theory_bpsk_awgn(self.snr_db)
    }

    pub fn theory_rayleigh(&self) -> f64 {
        metrics::theory_bpsk_rayleigh(self.snr_db)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EstimationRow {
    pub scheme: ModulationScheme,
    pub snr_db: f64,
    pub without: BerRecord,
    pub with: BerRecord,
    pub reference_without: f64,
    pub reference_with: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TablesReport {
    pub bpsk: Vec<BpskRow>,
    pub estimation: Vec<EstimationRow>,
}

pub fn relative_error(measured: f64, reference: f64) -> f64 {
    (measured - reference).abs() / reference
}

/// Link used for the AWGN column: raw demapping of unit-gain tones.
pub fn awgn_link(base: &LinkConfig) -> LinkConfig {
    LinkConfig {
        scheme: ModulationScheme::Bpsk,
        channel: ChannelModel::awgn(),
        equalization: Equalization::Off,
        ..base.clone()
    }
}

/// Link used for the Rayleigh column: flat block fading, coherent detection
/// with the true channel gain.
pub fn rayleigh_link(base: &LinkConfig) -> LinkConfig {
    LinkConfig {
        scheme: ModulationScheme::Bpsk,
        channel: ChannelModel::rayleigh_flat(),
        equalization: Equalization::Ideal,
        frame_symbols: RAYLEIGH_FRAME_SYMBOLS,
        ..base.clone()
    }
}

/// Multipath link used for the estimation tables; keeps the configured
/// profile when the base config is already multipath.
pub fn multipath_link(base: &LinkConfig, scheme: ModulationScheme, eq: Equalization) -> LinkConfig {
    let channel = match base.channel.kind {
        ofdmlink::channel::ChannelKind::Multipath => base.channel.clone(),
        _ => ChannelModel::default_multipath().with_block_fading(base.channel.block_fading),
    };
    LinkConfig {
        scheme,
        channel,
        equalization: eq,
        ..base.clone()
    }
}

pub fn run_tables(cfg: &RunConfig) -> Result<TablesReport> {
    let mut tasks = Vec::new();
    let mut push = |link: LinkConfig, snr_db: f64| {
        let index = tasks.len();
        tasks.push(Task {
            link,
            snr_db,
            seed: link::stream_seed(cfg.seed, index),
        });
    };
    for &(db, _, _) in &BPSK_REFERENCE {
        push(awgn_link(&cfg.link), db);
        push(rayleigh_link(&cfg.link), db);
    }
    for scheme in ESTIMATION_SCHEMES {
        for db in ESTIMATION_SNR_DB {
            push(multipath_link(&cfg.link, scheme, Equalization::Off), db);
            push(multipath_link(&cfg.link, scheme, Equalization::Ls), db);
        }
    }
    let mut results = run_tasks(&tasks, cfg.bits, cfg.jobs)?.into_iter();
    let mut next = || results.next().expect("one result per task");

    let bpsk = BPSK_REFERENCE
        .iter()
        .map(|&(snr_db, reference_awgn, reference_rayleigh)| BpskRow {
            snr_db,
            awgn: next(),
            rayleigh: next(),
            reference_awgn,
            reference_rayleigh,
        })
        .collect();
    let mut estimation = Vec::new();
    for (scheme, refs) in ESTIMATION_SCHEMES.iter().zip(&ESTIMATION_REFERENCE) {
        for (&snr_db, &(reference_without, reference_with)) in ESTIMATION_SNR_DB.iter().zip(refs) {
            estimation.push(EstimationRow {
                scheme: *scheme,
                snr_db,
                without: next(),
                with: next(),
                reference_without,
                reference_with,
            });
        }
    }
    Ok(TablesReport { bpsk, estimation })
}

impl TablesReport {
    fn rows_for(&self, scheme: ModulationScheme) -> impl Iterator<Item = &EstimationRow> {
        self.estimation.iter().filter(move |r| r.scheme == scheme)
    }

    /// Quantitative checks on the AWGN / Rayleigh comparison.
    pub fn bpsk_checks(&self) -> Vec<Check> {
        let mut checks = Vec::new();
        for row in &self.bpsk {
            let cases = [
                ("awgn vs reference", row.awgn.ber, row.reference_awgn),
                ("awgn vs theory", row.awgn.ber, row.theory_awgn()),
                ("rayleigh vs reference", row.rayleigh.ber, row.reference_rayleigh),
                ("rayleigh vs theory", row.rayleigh.ber, row.theory_rayleigh()),
            ];
            for (what, measured, reference) in cases {
                let err = relative_error(measured, reference);
                checks.push(Check {
                    name: format!("{} dB {what}", row.snr_db),
                    passed: err < BPSK_TOLERANCE,
                    detail: format!("measured {measured:.5} reference {reference:.5} rel.err {:.2}%", 100.0 * err),
                });
            }
        }
        checks
    }

    /// Raw multipath tones demap to a coin-flip BER.
    pub fn plateau_checks(&self) -> Vec<Check> {
        self.estimation
            .iter()
            .map(|r| Check {
                name: format!("{} {} dB without estimation in band", r.scheme, r.snr_db),
                passed: r.without.ber >= PLATEAU_BAND.0 && r.without.ber <= PLATEAU_BAND.1,
                detail: format!("ber {:.4}", r.without.ber),
            })
            .collect()
    }

    /// Estimation always helps, and helps more as Eb/N0 rises.
    pub fn improvement_checks(&self) -> Vec<Check> {
        let mut checks: Vec<Check> = self
            .estimation
            .iter()
            .map(|r| Check {
                name: format!("{} {} dB with < without", r.scheme, r.snr_db),
                passed: r.with.ber < r.without.ber,
                detail: format!("with {:.4} without {:.4}", r.with.ber, r.without.ber),
            })
            .collect();
        for scheme in ESTIMATION_SCHEMES {
            let bers: Vec<f64> = self.rows_for(scheme).map(|r| r.with.ber).collect();
            checks.push(Check {
                name: format!("{scheme} with estimation decreasing 5->15 dB"),
                passed: bers.windows(2).all(|w| w[1] < w[0]),
                detail: format!("{bers:.4?}"),
            });
        }
        checks
    }

    /// At the highest Eb/N0, BER grows with constellation order.
    pub fn ordering_check(&self) -> Check {
        let top = ESTIMATION_SNR_DB[ESTIMATION_SNR_DB.len() - 1];
        let bers: Vec<f64> = ESTIMATION_SCHEMES
            .iter()
            .map(|&s| {
                self.rows_for(s)
                    .find(|r| r.snr_db == top)
                    .map(|r| r.with.ber)
                    .unwrap_or(f64::NAN)
            })
            .collect();
        Check {
            name: format!("{top} dB with estimation: bpsk < qpsk < 16qam < 64qam"),
            passed: bers.windows(2).all(|w| w[0] < w[1]),
            detail: format!("{bers:.5?}"),
        }
    }

    pub fn all_checks(&self) -> Vec<Check> {
        let mut all = self.bpsk_checks();
        all.extend(self.plateau_checks());
        all.extend(self.improvement_checks());
        all.push(self.ordering_check());
        all
    }

    pub fn render_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "== BPSK over AWGN and flat Rayleigh (quantitative, tolerance {:.0}%) ==", 100.0 * BPSK_TOLERANCE);
        let _ = writeln!(s, "AWGN: no equalization. Rayleigh: block fading, ideal channel knowledge.");
        let _ = writeln!(
            s,
            "{:>7}  {:>10} {:>10} {:>10}  {:>10} {:>10} {:>10}",
            "snr_db", "awgn", "reference", "theory", "rayleigh", "reference", "theory"
        );
        for r in &self.bpsk {
            let _ = writeln!(
                s,
                "{:>7}  {:>10.5} {:>10.5} {:>10.5}  {:>10.5} {:>10.5} {:>10.5}",
                r.snr_db,
                r.awgn.ber,
                r.reference_awgn,
                r.theory_awgn(),
                r.rayleigh.ber,
                r.reference_rayleigh,
                r.theory_rayleigh()
            );
        }
        let _ = writeln!(s);
        let _ = writeln!(s, "== With / without LS estimation over multipath (qualitative) ==");
        let _ = writeln!(s, "Reference values are shown for context only; the fading profile behind them is unknown.");
        let _ = writeln!(
            s,
            "{:>6} {:>7}  {:>10} {:>10}  {:>10} {:>10}",
            "scheme", "snr_db", "without", "reference", "with", "reference"
        );
        for r in &self.estimation {
            let _ = writeln!(
                s,
                "{:>6} {:>7}  {:>10.4} {:>10.4}  {:>10.4} {:>10.4}",
                r.scheme.name(),
                r.snr_db,
                r.without.ber,
                r.reference_without,
                r.with.ber,
                r.reference_with
            );
        }
        let _ = writeln!(s);
        let _ = writeln!(s, "== Checks ==");
        for c in self.all_checks() {
            let _ = writeln!(s, "[{}] {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
        }
        s
    }

    pub fn render_csv(&self) -> String {
        let mut s = String::from("table,scheme,channel,estimation,snr_db,ber,bits,errors,reference\n");
        let mut row = |table: &str, scheme: &str, channel: &str, eq: &str, rec: &BerRecord, reference: f64| {
            let _ = writeln!(
                s,
                "{table},{scheme},{channel},{eq},{},{},{},{},{reference}",
                rec.snr_db, rec.ber, rec.bits_total, rec.bits_error
            );
        };
        for r in &self.bpsk {
            row("awgn-rayleigh", "bpsk", "awgn", "off", &r.awgn, r.reference_awgn);
            row("awgn-rayleigh", "bpsk", "rayleigh", "ideal", &r.rayleigh, r.reference_rayleigh);
        }
        for r in &self.estimation {
            let name = r.scheme.name();
            row("estimation", name, "multipath", "off", &r.without, r.reference_without);
            row("estimation", name, "multipath", "on", &r.with, r.reference_with);
        }
        s
    }
}
