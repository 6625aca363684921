//! Experiment runner for the `ofdmlink` simulator: BER sweeps, image
//! transmission and the table reproduction report.

pub mod config;
pub mod image;
pub mod sweep;
pub mod tables;

use std::fs;
use std::path::Path;

use anyhow::{Context, Result};

/// Writes `contents` to `path`, creating parent directories.
pub fn write_output(path: &Path, contents: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}
