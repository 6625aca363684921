use num_complex::Complex64;
use ofdmlink::channel::{self, ChannelModel};
use ofdmlink::estimation::{estimate_and_equalize_frame, EstimatorState};
use ofdmlink::imageio::{self, GrayImage};
use ofdmlink::link::{self, Equalization, Link, LinkConfig};
use ofdmlink::metrics;
use ofdmlink::modem::{self, ModulationScheme};
use ofdmlink::ofdm::{build_frame, OfdmConfig, OfdmModem};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn random_bits(n: usize, seed: u64) -> Vec<u8> {
    let mut bits = vec![0; n];
    link::fill_random_bits(&mut bits, &mut ChaCha8Rng::seed_from_u64(seed));
    bits
}

fn within(measured: f64, expected: f64, tol: f64) -> bool {
    (measured - expected).abs() <= tol * expected
}

#[test]
fn hand_assembled_receiver_recovers_bits_over_multipath() {
    let cfg = OfdmConfig::default();
    let modem_ = OfdmModem::new(cfg).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for scheme in [ModulationScheme::Bpsk, ModulationScheme::Qpsk, ModulationScheme::Qam16, ModulationScheme::Qam64] {
        let bits = random_bits(5000, scheme.bits_per_symbol() as u64);
        let frame = build_frame(&bits, scheme, &cfg).unwrap();
        let real = channel::draw_realization(&ChannelModel::default_multipath(), &cfg, &mut rng).unwrap();
        let tx = modem_.frame_to_samples(&frame).unwrap();
        let rx = channel::propagate(&tx, &real, 0.0, &mut rng);
        let rx = modem_.samples_to_frame(&rx, frame.len()).unwrap();
        let mut state = EstimatorState::new(cfg.n_subcarriers, 0.9).unwrap();
        let tones: Vec<Complex64> = estimate_and_equalize_frame(&rx, &cfg, &mut state)
            .unwrap()
            .into_iter()
            .flat_map(|s| s.tones)
            .collect();
        let mut out = modem::demap_symbols(&tones, scheme);
        out.truncate(bits.len());
        assert_eq!(out, bits, "{scheme}");
    }
}

#[test]
fn bpsk_awgn_tracks_theory() {
    let cfg = LinkConfig {
        equalization: Equalization::Off,
        ..LinkConfig::default()
    };
    for (i, db) in [0.0, 3.0, 6.0].into_iter().enumerate() {
        let rec = link::simulate_point(&cfg, db, 400_000, link::stream_seed(8, i)).unwrap();
        let theory = metrics::theory_bpsk_awgn(db);
        assert!(within(rec.ber, theory, 0.1), "{db} dB: {} vs {theory}", rec.ber);
    }
}

#[test]
fn bpsk_flat_rayleigh_with_true_csi_tracks_theory() {
    let cfg = LinkConfig {
        channel: ChannelModel::rayleigh_flat(),
        equalization: Equalization::Ideal,
        frame_symbols: 2,
        ..LinkConfig::default()
    };
    for db in [0.0, 10.0] {
        let rec = link::simulate_point(&cfg, db, 1_000_000, 21).unwrap();
        let theory = metrics::theory_bpsk_rayleigh(db);
        assert!(within(rec.ber, theory, 0.1), "{db} dB: {} vs {theory}", rec.ber);
    }
}

#[test]
fn dbpsk_doubles_the_raw_error_rate() {
    let cfg = LinkConfig {
        scheme: ModulationScheme::Dbpsk,
        equalization: Equalization::Off,
        ..LinkConfig::default()
    };
    let db = 4.0;
    let p = metrics::theory_bpsk_awgn(db);
    let rec = link::simulate_point(&cfg, db, 400_000, 4).unwrap();
    let expected = 2.0 * p * (1.0 - p);
    assert!(within(rec.ber, expected, 0.1), "{} vs {expected}", rec.ber);
}

#[test]
fn estimation_beats_raw_demapping_over_multipath() {
    let base = LinkConfig {
        scheme: ModulationScheme::Qpsk,
        channel: ChannelModel::default_multipath(),
        ..LinkConfig::default()
    };
    let off = LinkConfig {
        equalization: Equalization::Off,
        ..base.clone()
    };
    let with = link::simulate_point(&base, 10.0, 200_000, 5).unwrap().ber;
    let without = link::simulate_point(&off, 10.0, 200_000, 5).unwrap().ber;
    assert!(with < 0.1 && without > 0.3, "with {with}, without {without}");
}

#[test]
fn higher_order_schemes_err_more_at_fixed_ebn0() {
    let cfg = |scheme| LinkConfig {
        scheme,
        channel: ChannelModel::default_multipath(),
        ..LinkConfig::default()
    };
    let ber = |s| link::simulate_point(&cfg(s), 12.0, 300_000, 6).unwrap().ber;
    let (q, q16, q64) = (ber(ModulationScheme::Qpsk), ber(ModulationScheme::Qam16), ber(ModulationScheme::Qam64));
    assert!(q < q16 && q16 < q64, "{q} {q16} {q64}");
}

#[test]
fn image_survives_noiseless_link_for_every_scheme() {
    let (w, h) = (37, 23);
    let pixels: Vec<u8> = (0..w * h).map(|i| (i * 31 % 256) as u8).collect();
    let img = GrayImage::new(w, h, pixels).unwrap();
    let bits = imageio::image_to_bits(&img).unwrap();
    for scheme in ModulationScheme::ALL {
        let cfg = LinkConfig {
            scheme,
            channel: ChannelModel::default_multipath(),
            ..LinkConfig::default()
        };
        let mut link = Link::new(cfg, f64::INFINITY).unwrap();
        let tx = link.transmit(&bits, 0, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        assert_eq!(imageio::bits_to_image(&tx.bits, w, h).unwrap(), img, "{scheme}");
    }
}

#[test]
fn scatter_points_cluster_on_constellation_when_noiseless() {
    let cfg = LinkConfig {
        scheme: ModulationScheme::Qam16,
        channel: ChannelModel::default_multipath(),
        ..LinkConfig::default()
    };
    let mut link = Link::new(cfg, f64::INFINITY).unwrap();
    let tx = link.transmit(&random_bits(4000, 1), 200, &mut ChaCha8Rng::seed_from_u64(2)).unwrap();
    assert_eq!(tx.scatter.len(), 200);
    let points = ModulationScheme::Qam16.constellation().points();
    for &(re, im) in &tx.scatter {
        let y = Complex64::new(re, im);
        let d = points.iter().map(|p| (y - p).norm()).fold(f64::INFINITY, f64::min);
        assert!(d < 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn noiseless_link_is_identity(
        scheme_idx in 0usize..5,
        len in 0usize..3000,
        seed in any::<u64>(),
        frame_symbols in 2usize..40,
    ) {
        let scheme = ModulationScheme::ALL[scheme_idx];
        let cfg = LinkConfig {
            scheme,
            channel: ChannelModel::default_multipath(),
            frame_symbols,
            ..LinkConfig::default()
        };
        let bits = random_bits(len, seed);
        let mut link = Link::new(cfg, f64::INFINITY).unwrap();
        let tx = link.transmit(&bits, 0, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        prop_assert_eq!(tx.bits, bits);
    }
}
