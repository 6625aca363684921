//! Run configuration: flat `key=value` settings merged from an optional
//! file and command-line flags, validated into a [`RunConfig`].

use std::collections::BTreeMap;
use std::path::PathBuf;

use anyhow::{anyhow, bail, Context, Result};
use ofdmlink::channel::{ChannelKind, ChannelModel};
use ofdmlink::link::{Equalization, LinkConfig};
use ofdmlink::modem::ModulationScheme;
use ofdmlink::ofdm::OfdmConfig;
use ofdmlink::Complex64;

/// Every recognised key, in the order they are documented.
pub const KEYS: &[&str] = &[
    "scheme",
    "channel",
    "taps",
    "snr",
    "estimation",
    "lambda",
    "pilot-period",
    "frame-symbols",
    "bits",
    "seed",
    "fft-size",
    "cp-len",
    "block-fading",
    "reset-estimator",
    "jobs",
    "out",
    "scatter-out",
    "scatter-max",
];

/// Raw settings before validation. Later inserts win.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Settings(BTreeMap<String, String>);

impl Settings {
    /// Parses `key=value` lines. Blank lines and `#` comments are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut settings = Settings::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| anyhow!("config line {}: expected key=value", lineno + 1))?;
            settings
                .set(key.trim(), value.trim())
                .with_context(|| format!("config line {}", lineno + 1))?;
        }
        Ok(settings)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        if !KEYS.contains(&key) {
            bail!("unknown setting {key:?}");
        }
        self.0.insert(key.to_string(), value.to_string());
        Ok(())
    }

    pub fn set_default(&mut self, key: &str, value: &str) {
        self.0.entry(key.to_string()).or_insert_with(|| value.to_string());
    }

    pub fn merge(&mut self, overrides: &Settings) {
        for (k, v) in &overrides.0 {
            self.0.insert(k.clone(), v.clone());
        }
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.0.get(key).map(String::as_str)
    }

    fn parse_field<T>(&self, key: &str, default: T) -> Result<T>
    where
        T: std::str::FromStr,
        T::Err: std::fmt::Display,
    {
        match self.get(key) {
            None => Ok(default),
            Some(v) => v.parse().map_err(|e| anyhow!("invalid {key} {v:?}: {e}")),
        }
    }

    fn flag(&self, key: &str, default: bool) -> Result<bool> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => match v.to_ascii_lowercase().as_str() {
                "on" | "true" | "yes" | "1" => Ok(true),
                "off" | "false" | "no" | "0" => Ok(false),
                _ => bail!("invalid {key} {v:?}: expected on or off"),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub link: LinkConfig,
    /// Eb/N0 points in dB, ascending.
    pub snr_db: Vec<f64>,
    pub bits: u64,
    pub seed: u64,
    pub jobs: usize,
    pub out: Option<PathBuf>,
    pub scatter_out: Option<PathBuf>,
    pub scatter_max: usize,
}

pub const DEFAULT_SNR: &str = "0,5,10,15,20";
pub const DEFAULT_BITS: u64 = 2_000_000;
pub const DEFAULT_SEED: u64 = 1;

/// `delay:power_db` pairs separated by commas, e.g. `0:0,4:-3,8:-6`.
pub fn parse_taps(text: &str) -> Result<Vec<(usize, f64)>> {
    text.split(',')
        .map(|tap| {
            let (delay, power) = tap
                .split_once(':')
                .ok_or_else(|| anyhow!("invalid taps entry {tap:?}: expected delay:power_db"))?;
            let delay = delay
                .trim()
                .parse()
                .map_err(|e| anyhow!("invalid taps delay {delay:?}: {e}"))?;
            let power = power
                .trim()
                .parse()
                .map_err(|e| anyhow!("invalid taps power {power:?}: {e}"))?;
            Ok((delay, power))
        })
        .collect()
}

pub fn parse_snr_list(text: &str) -> Result<Vec<f64>> {
    let mut points = text
        .split(',')
        .map(|v| {
            let v = v.trim();
            let db: f64 = v.parse().map_err(|e| anyhow!("invalid snr {v:?}: {e}"))?;
            if db.is_nan() {
                bail!("invalid snr {v:?}");
            }
            Ok(db)
        })
        .collect::<Result<Vec<_>>>()?;
    if points.is_empty() {
        bail!("invalid snr: empty list");
    }
    points.sort_by(f64::total_cmp);
    Ok(points)
}

impl RunConfig {
    pub fn from_settings(s: &Settings) -> Result<Self> {
        let scheme: ModulationScheme = s.parse_field("scheme", ModulationScheme::Bpsk)?;
        let kind: ChannelKind = s.parse_field("channel", ChannelKind::Awgn)?;
        let taps = s.get("taps").map(parse_taps).transpose()?;
        if taps.is_some() && kind != ChannelKind::Multipath {
            bail!("invalid taps: only meaningful with channel=multipath");
        }
        let channel = ChannelModel::from_kind(kind, taps.as_deref())
            .map_err(|e| anyhow!("invalid taps: {e}"))?
            .with_block_fading(s.flag("block-fading", true)?);

        let ofdm = OfdmConfig {
            n_subcarriers: s.parse_field("fft-size", 64)?,
            cp_len: s.parse_field("cp-len", 16)?,
            pilot_period: s.parse_field("pilot-period", 8)?,
            pilot_value: Complex64::new(1.0, 0.0),
        };
        let link = LinkConfig {
            scheme,
            ofdm,
            channel,
            equalization: s.parse_field("estimation", Equalization::Ls)?,
            lambda: s.parse_field("lambda", ofdmlink::estimation::DEFAULT_LAMBDA)?,
            reset_estimator: s.flag("reset-estimator", true)?,
            frame_symbols: s.parse_field("frame-symbols", 32)?,
        };
        link.validate().map_err(|e| anyhow!("{e}"))?;

        let bits: u64 = s.parse_field("bits", DEFAULT_BITS)?;
        if bits == 0 {
            bail!("invalid bits: must be positive");
        }
        let jobs: usize = s.parse_field("jobs", 1)?;
        if jobs == 0 {
            bail!("invalid jobs: must be at least 1");
        }
        let scatter_max = s.parse_field("scatter-max", 4096)?;
        if scatter_max == 0 {
            bail!("invalid scatter-max: must be at least 1");
        }
        Ok(RunConfig {
            link,
            snr_db: parse_snr_list(s.get("snr").unwrap_or(DEFAULT_SNR))?,
            bits,
            seed: s.parse_field("seed", DEFAULT_SEED)?,
            jobs,
            out: s.get("out").map(PathBuf::from),
            scatter_out: s.get("scatter-out").map(PathBuf::from),
            scatter_max,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_follow_parameter_table() {
        let cfg = RunConfig::from_settings(&Settings::default()).unwrap();
        assert_eq!(cfg.link.ofdm.n_subcarriers, 64);
        assert_eq!(cfg.link.ofdm.cp_len, 16);
        assert_eq!(cfg.link.ofdm.pilot_period, 8);
        assert_eq!(cfg.link.lambda, 0.9);
        assert_eq!(cfg.snr_db, vec![0.0, 5.0, 10.0, 15.0, 20.0]);
        assert_eq!(cfg.bits, 2_000_000);
    }

    #[test]
    fn file_then_flags() {
        let mut s = Settings::parse("# sweep\nscheme = qpsk\nsnr=4,0,2\n\nlambda=0.5 # tuned\n").unwrap();
        let mut flags = Settings::default();
        flags.set("scheme", "16qam").unwrap();
        s.merge(&flags);
        let cfg = RunConfig::from_settings(&s).unwrap();
        assert_eq!(cfg.link.scheme, ModulationScheme::Qam16);
        assert_eq!(cfg.snr_db, vec![0.0, 2.0, 4.0]);
        assert_eq!(cfg.link.lambda, 0.5);
    }

    #[test]
    fn errors_name_the_field() {
        let err = |k: &str, v: &str| {
            let mut s = Settings::default();
            if k == "taps" {
                s.set("channel", "multipath").unwrap();
            }
            s.set(k, v).unwrap();
            RunConfig::from_settings(&s).unwrap_err().to_string()
        };
        assert!(err("lambda", "1.5").contains("lambda"));
        assert!(err("lambda", "abc").contains("lambda"));
        assert!(err("fft-size", "48").contains("fft-size"));
        assert!(err("cp-len", "0").contains("cp-len"));
        assert!(err("scheme", "8psk").contains("scheme"));
        assert!(err("snr", "1,x").contains("snr"));
        assert!(err("taps", "0:0,40:-3").contains("tap"));
        assert!(err("estimation", "maybe").contains("estimation"));
        assert!(Settings::parse("colour=red").unwrap_err().to_string().contains("line 1"));
        assert!(Settings::parse("no equals sign").is_err());
    }

    #[test]
    fn taps_parse() {
        assert_eq!(parse_taps("0:0, 4:-3,8:-6").unwrap(), vec![(0, 0.0), (4, -3.0), (8, -6.0)]);
        assert!(parse_taps("0").is_err());
        let mut s = Settings::default();
        s.set("taps", "0:0").unwrap();
        assert!(RunConfig::from_settings(&s).is_err(), "taps need channel=multipath");
    }
}
