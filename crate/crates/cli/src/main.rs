use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use ofdmlink::imageio;
use ofdmlink_cli::config::{RunConfig, Settings};
use ofdmlink_cli::{image, sweep, tables, write_output};

#[derive(Parser)]
#[command(name = "ofdmlink", version, about = "OFDM link-level BER simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// BER vs Eb/N0 sweep written as CSV
    Sweep(Flags),
    /// Send a binary PGM image through the link
    Image {
        /// Input image (binary PGM, maxval 255)
        input: PathBuf,
        #[command(flatten)]
        flags: Flags,
    },
    /// Reproduce the BPSK AWGN/Rayleigh and estimation tables
    Tables(Flags),
}

/// Every flag mirrors a `key=value` config entry of the same name.
#[derive(Args, Default)]
struct Flags {
    /// key=value config file; flags override its entries
    #[arg(long)]
    config: Option<PathBuf>,
    /// bpsk, dbpsk, qpsk, 16qam or 64qam
    #[arg(long)]
    scheme: Option<String>,
    /// awgn, rayleigh or multipath
    #[arg(long)]
    channel: Option<String>,
    /// Multipath profile as delay:power_db pairs, e.g. 0:0,4:-3,8:-6
    #[arg(long)]
    taps: Option<String>,
    /// Comma-separated Eb/N0 points in dB
    #[arg(long)]
    snr: Option<String>,
    /// on (LS), off or ideal
    #[arg(long)]
    estimation: Option<String>,
    /// Forgetting factor in (0, 1]
    #[arg(long)]
    lambda: Option<String>,
    #[arg(long)]
    pilot_period: Option<String>,
    /// OFDM symbols per channel realization, pilots included
    #[arg(long)]
    frame_symbols: Option<String>,
    /// Information bits per Eb/N0 point
    #[arg(long)]
    bits: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    fft_size: Option<String>,
    #[arg(long)]
    cp_len: Option<String>,
    /// on: fresh channel per frame; off: one channel for the whole run
    #[arg(long)]
    block_fading: Option<String>,
    /// Clear the estimator on every fresh channel realization (on/off)
    #[arg(long)]
    reset_estimator: Option<String>,
    /// Worker threads across Eb/N0 points
    #[arg(long)]
    jobs: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    scatter_out: Option<PathBuf>,
    #[arg(long)]
    scatter_max: Option<String>,
}

impl Flags {
    fn settings(&self) -> Result<Settings> {
        let mut settings = match &self.config {
            Some(path) => {
                let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
                Settings::parse(&text).with_context(|| format!("in {}", path.display()))?
            }
            None => Settings::default(),
        };
        let mut flags = Settings::default();
        let text = [
            ("scheme", &self.scheme),
            ("channel", &self.channel),
            ("taps", &self.taps),
            ("snr", &self.snr),
            ("estimation", &self.estimation),
            ("lambda", &self.lambda),
            ("pilot-period", &self.pilot_period),
            ("frame-symbols", &self.frame_symbols),
            ("bits", &self.bits),
            ("seed", &self.seed),
            ("fft-size", &self.fft_size),
            ("cp-len", &self.cp_len),
            ("block-fading", &self.block_fading),
            ("reset-estimator", &self.reset_estimator),
            ("jobs", &self.jobs),
            ("scatter-max", &self.scatter_max),
        ];
        for (key, value) in text {
            if let Some(v) = value {
                flags.set(key, v)?;
            }
        }
        for (key, value) in [("out", &self.out), ("scatter-out", &self.scatter_out)] {
            if let Some(p) = value {
                flags.set(key, &p.to_string_lossy())?;
            }
        }
        settings.merge(&flags);
        Ok(settings)
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Sweep(flags) => {
            let cfg = RunConfig::from_settings(&flags.settings()?)?;
            let csv = sweep::sweep_csv(&cfg)?;
            match &cfg.out {
                Some(path) => write_output(path, csv.as_bytes())?,
                None => print!("{csv}"),
            }
        }
        Command::Image { input, flags } => {
            let mut settings = flags.settings()?;
            settings.set_default("snr", "15");
            let cfg = RunConfig::from_settings(&settings)?;
            let Some(out) = cfg.out.clone() else {
                bail!("image requires --out for the decoded PGM");
            };
            let bytes = fs::read(&input).with_context(|| format!("reading {}", input.display()))?;
            let img = imageio::read_pgm(&bytes).with_context(|| format!("decoding {}", input.display()))?;
            let run = image::transmit_image(&cfg, &img)?;
            write_output(&out, &imageio::write_pgm(&run.decoded))?;
            if let Some(path) = &cfg.scatter_out {
                write_output(path, image::scatter_csv(&run.scatter).as_bytes())?;
            }
            println!(
                "snr_db={} scheme={} channel={} estimation={} bits={} errors={} ber={}",
                run.record.snr_db,
                cfg.link.scheme,
                cfg.link.channel.kind,
                cfg.link.equalization,
                run.record.bits_total,
                run.record.bits_error,
                run.record.ber
            );
        }
        Command::Tables(flags) => {
            let cfg = RunConfig::from_settings(&flags.settings()?)?;
            let report = tables::run_tables(&cfg)?;
            print!("{}", report.render_text());
            if let Some(path) = &cfg.out {
                write_output(path, report.render_csv().as_bytes())?;
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
