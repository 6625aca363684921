//! Image transmission through the full link.

use anyhow::{bail, Result};
use ofdmlink::imageio::{self, GrayImage};
use ofdmlink::link::{self, Link};
use ofdmlink::metrics::{self, BerRecord};

use crate::config::RunConfig;

#[derive(Debug, Clone, PartialEq)]
pub struct ImageRun {
    pub decoded: GrayImage,
    pub record: BerRecord,
    pub scatter: Vec<(f64, f64)>,
}

/// Sends `img` once at the single configured Eb/N0.
pub fn transmit_image(cfg: &RunConfig, img: &GrayImage) -> Result<ImageRun> {
    let [ebn0_db] = cfg.snr_db[..] else {
        bail!("invalid snr: image transmission takes exactly one Eb/N0 value");
    };
    let bits = imageio::image_to_bits(img)?;
    let mut link = Link::new(cfg.link.clone(), ebn0_db)?;
    let mut rng = link::stream_rng(link::stream_seed(cfg.seed, 0));
    let scatter_max = if cfg.scatter_out.is_some() { cfg.scatter_max } else { 0 };
    let tx = link.transmit(&bits, scatter_max, &mut rng)?;
    let record = BerRecord::new(ebn0_db, metrics::ber(&bits, &tx.bits)?)?;
    let decoded = imageio::bits_to_image(&tx.bits, img.width(), img.height())?;
    Ok(ImageRun {
        decoded,
        record,
        scatter: tx.scatter,
    })
}

pub fn scatter_csv(points: &[(f64, f64)]) -> String {
    let mut out = String::from("re,im\n");
    for (re, im) in points {
        out.push_str(&format!("{re},{im}\n"));
    }
    out
}
