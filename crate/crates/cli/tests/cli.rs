use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use ofdmlink::imageio::{self, GrayImage};
use ofdmlink_cli::sweep::CSV_HEADER;

fn ofdmlink(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ofdmlink"))
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("spawn ofdmlink")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn write_test_image(path: &Path) -> Vec<u8> {
    let (w, h) = (48, 20);
    let pixels = (0..w * h).map(|i| (i * 7 % 251) as u8).collect();
    let bytes = imageio::write_pgm(&GrayImage::new(w, h, pixels).unwrap());
    fs::write(path, &bytes).unwrap();
    bytes
}

#[test]
fn sweep_prints_csv_to_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let out = ofdmlink(&["sweep", "--snr", "0,8", "--bits", "20000", "--estimation", "off"], dir.path());
    assert!(out.status.success(), "{}", stderr(&out));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], CSV_HEADER);
    assert_eq!(lines.len(), 3);
    let row: Vec<&str> = lines[1].split(',').collect();
    assert_eq!(&row[..4], &["0", "bpsk", "awgn", "off"]);
    let ber: f64 = row[4].parse().unwrap();
    let bits: u64 = row[5].parse().unwrap();
    let errors: u64 = row[6].parse().unwrap();
    assert!(bits >= 20000);
    assert_eq!(ber, errors as f64 / bits as f64);
    assert_eq!(row[7], "1");
}

#[test]
fn sweep_rows_follow_ascending_ebn0() {
    let dir = tempfile::tempdir().unwrap();
    let out = ofdmlink(&["sweep", "--snr", "10,0,5", "--bits", "10000"], dir.path());
    assert!(out.status.success(), "{}", stderr(&out));
    let text = String::from_utf8(out.stdout).unwrap();
    let snrs: Vec<&str> = text.lines().skip(1).map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(snrs, ["0", "5", "10"]);
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("run.cfg"),
        "# test run\nscheme = 64qam\nchannel = multipath\nsnr = 12\nbits = 12000\nseed = 9\n",
    )
    .unwrap();
    let out = ofdmlink(&["sweep", "--config", "run.cfg", "--scheme", "qpsk", "--out", "res/out.csv"], dir.path());
    assert!(out.status.success(), "{}", stderr(&out));
    let text = fs::read_to_string(dir.path().join("res/out.csv")).unwrap();
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(&row[..4], &["12", "qpsk", "multipath", "on"]);
    assert_eq!(row[7], "9");
}

#[test]
fn invalid_settings_fail_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let cases: &[(&[&str], &str)] = &[
        (&["--lambda", "0"], "lambda"),
        (&["--fft-size", "100"], "fft-size"),
        (&["--scheme", "8psk"], "scheme"),
        (&["--channel", "multipath", "--taps", "0:0,20:-3"], "tap"),
        (&["--snr", "3,abc"], "snr"),
        (&["--pilot-period", "1"], "pilot"),
        (&["--bits", "0"], "bits"),
    ];
    for (i, (extra, needle)) in cases.iter().enumerate() {
        let target = format!("fail{i}.csv");
        let mut args = vec!["sweep", "--bits", "1000", "--out", &target];
        args.extend_from_slice(extra);
        let out = ofdmlink(&args, dir.path());
        assert!(!out.status.success(), "{extra:?} should fail");
        let msg = stderr(&out);
        assert!(msg.contains(needle), "{extra:?}: {msg}");
        assert!(!dir.path().join(&target).exists());
    }
    fs::write(dir.path().join("bad.cfg"), "scheme=qpsk\ncolour=red\n").unwrap();
    let out = ofdmlink(&["sweep", "--config", "bad.cfg"], dir.path());
    assert!(!out.status.success());
    assert!(stderr(&out).contains("line 2"));
}

#[test]
fn noiseless_image_roundtrip_is_byte_exact() {
    let dir = tempfile::tempdir().unwrap();
    let original = write_test_image(&dir.path().join("in.pgm"));
    let out = ofdmlink(
        &[
            "image", "in.pgm", "--snr", "inf", "--channel", "multipath", "--scheme", "16qam",
            "--out", "out.pgm", "--scatter-out", "scatter.csv", "--scatter-max", "50",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{}", stderr(&out));
    assert_eq!(fs::read(dir.path().join("out.pgm")).unwrap(), original);
    let line = String::from_utf8(out.stdout).unwrap();
    assert!(line.contains("errors=0") && line.contains("ber=0"), "{line}");
    let scatter = fs::read_to_string(dir.path().join("scatter.csv")).unwrap();
    assert_eq!(scatter.lines().next(), Some("re,im"));
    assert_eq!(scatter.lines().count(), 51);
}

#[test]
fn noisy_image_keeps_dimensions_and_reports_errors() {
    let dir = tempfile::tempdir().unwrap();
    write_test_image(&dir.path().join("in.pgm"));
    let out = ofdmlink(&["image", "in.pgm", "--snr", "0", "--out", "out.pgm"], dir.path());
    assert!(out.status.success(), "{}", stderr(&out));
    let decoded = imageio::read_pgm(&fs::read(dir.path().join("out.pgm")).unwrap()).unwrap();
    assert_eq!((decoded.width(), decoded.height()), (48, 20));
    let line = String::from_utf8(out.stdout).unwrap();
    assert!(line.starts_with("snr_db=0 ") && !line.contains("errors=0 "), "{line}");
}

#[test]
fn image_rejects_bad_inputs() {
    let dir = tempfile::tempdir().unwrap();
    write_test_image(&dir.path().join("in.pgm"));
    fs::write(dir.path().join("ascii.pgm"), "P2\n2 2\n255\n0 1 2 3\n").unwrap();
    let cases: &[(&[&str], &str)] = &[
        (&["image", "ascii.pgm", "--out", "o.pgm"], "ascii.pgm"),
        (&["image", "missing.pgm", "--out", "o.pgm"], "missing.pgm"),
        (&["image", "in.pgm", "--snr", "1,2", "--out", "o.pgm"], "snr"),
        (&["image", "in.pgm"], "--out"),
    ];
    for (args, needle) in cases {
        let out = ofdmlink(args, dir.path());
        assert!(!out.status.success(), "{args:?}");
        assert!(stderr(&out).contains(needle), "{args:?}: {}", stderr(&out));
        assert!(!dir.path().join("o.pgm").exists());
    }
}

#[test]
fn tables_report_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = ofdmlink(&["tables", "--bits", "20000", "--jobs", "2", "--out", "tables.csv"], dir.path());
    assert!(out.status.success(), "{}", stderr(&out));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("PASS") || text.contains("FAIL"));
    let csv = fs::read_to_string(dir.path().join("tables.csv")).unwrap();
    assert!(csv.lines().count() > 10);
}
