//! BER-vs-Eb/N0 sweeps and their CSV form.

use anyhow::{anyhow, Result};
use ofdmlink::link::{self, LinkConfig};
use ofdmlink::metrics::BerRecord;
use rayon::prelude::*;

use crate::config::RunConfig;

pub const CSV_HEADER: &str = "snr_db,scheme,channel,estimation,ber,bits,errors,seed";

/// One Monte-Carlo point: configuration, Eb/N0 and RNG stream seed.
#[derive(Debug, Clone)]
pub struct Task {
    pub link: LinkConfig,
    pub snr_db: f64,
    pub seed: u64,
}

/// Runs tasks on `jobs` threads; results come back in task order.
pub fn run_tasks(tasks: &[Task], bits: u64, jobs: usize) -> Result<Vec<BerRecord>> {
    let point = |t: &Task| {
        link::simulate_point(&t.link, t.snr_db, bits, t.seed)
            .map_err(|e| anyhow!("Eb/N0 {} dB: {e}", t.snr_db))
    };
    if jobs <= 1 {
        return tasks.iter().map(point).collect();
    }
    let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs).build()?;
    pool.install(|| tasks.par_iter().map(point).collect())
}

/// Runs every point of `snr_db`; point `i` draws from stream `stream_seed(seed, i)`.
///
/// The result is independent of `jobs`.
pub fn run_points(
    link_cfg: &LinkConfig,
    snr_db: &[f64],
    bits: u64,
    seed: u64,
    jobs: usize,
) -> Result<Vec<BerRecord>> {
    let tasks: Vec<Task> = snr_db
        .iter()
        .enumerate()
        .map(|(i, &db)| Task {
            link: link_cfg.clone(),
            snr_db: db,
            seed: link::stream_seed(seed, i),
        })
        .collect();
    run_tasks(&tasks, bits, jobs)
}

pub fn run_sweep(cfg: &RunConfig) -> Result<Vec<BerRecord>> {
    run_points(&cfg.link, &cfg.snr_db, cfg.bits, cfg.seed, cfg.jobs)
}

pub fn csv_row(rec: &BerRecord, link_cfg: &LinkConfig, seed: u64) -> String {
    format!(
        "{},{},{},{},{},{},{},{}",
        rec.snr_db,
        link_cfg.scheme,
        link_cfg.channel.kind,
        link_cfg.equalization,
        rec.ber,
        rec.bits_total,
        rec.bits_error,
        seed
    )
}

pub fn render_csv(records: &[BerRecord], cfg: &RunConfig) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for rec in records {
        out.push_str(&csv_row(rec, &cfg.link, cfg.seed));
        out.push('\n');
    }
    out
}

pub fn sweep_csv(cfg: &RunConfig) -> Result<String> {
    Ok(render_csv(&run_sweep(cfg)?, cfg))
}
