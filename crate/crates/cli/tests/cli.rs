use std::fs;
use std::process::{Command, Output};

fn mslink(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mslink")).args(args).output().unwrap()
}

fn ok(args: &[&str]) -> String {
    let out = mslink(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn file_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in.bin");
    let iq = dir.path().join("s.iq");
    let back = dir.path().join("back.bin");
    let bytes: Vec<u8> = (0..6000u32).map(|i| (i * 7 % 256) as u8).collect();
    fs::write(&input, &bytes).unwrap();
    let cfg = dir.path().join("link.cfg");
    fs::write(&cfg, "link_snr_db = 25\ncfo_normalized = 0.1\ntiming_offset = 40\n").unwrap();
    let c = cfg.to_str().unwrap();
    ok(&["transmit", input.to_str().unwrap(), "--config", c, "--out", iq.to_str().unwrap()]);
    ok(&["receive", iq.to_str().unwrap(), "--config", c, "--out", back.to_str().unwrap()]);
    assert_eq!(fs::read(&back).unwrap(), bytes);
}

#[test]
fn ber_sweep_csv() {
    let csv = ok(&["ber-sweep", "--snr", "0,6", "--frames", "2", "--seed", "5"]);
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "snr_db,bits,errors,ber");
    assert_eq!(lines.len(), 3);
    assert!(lines[1].starts_with("0,73728,"));
    // Same seed, same output.
    assert_eq!(csv, ok(&["ber-sweep", "--snr", "0,6", "--frames", "2", "--seed", "5", "--sequential"]));
}

#[test]
fn compare_writes_directory() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.cfg");
    fs::write(&cfg, "target_ber = 1e-2\n").unwrap();
    let out = dir.path().join("cmp");
    let stdout = ok(&[
        "compare", "--config", cfg.to_str().unwrap(), "--snr", "0,4,8,12", "--frames", "2", "--out",
        out.to_str().unwrap(),
    ]);
    assert!(stdout.starts_with("gap_db = "));
    for f in ["conventional.csv", "metasurface.csv", "gap.txt"] {
        assert!(out.join(f).exists(), "{f}");
    }
}

#[test]
fn gamma_and_constellation() {
    let gamma = ok(&["gamma-curve"]);
    assert_eq!(gamma.lines().count(), 402);
    let pts = ok(&["constellation", "--mode", "metasurface", "--snr", "30"]);
    assert_eq!(pts.lines().next(), Some("re,im"));
    assert_eq!(pts.lines().count(), 1 + 9 * 2048);
}

#[test]
fn sync_check_reports_detection() {
    let out = ok(&["sync-check", "--snr", "3", "--frames", "2"]);
    assert!(out.lines().nth(1).unwrap().starts_with("3,2,2,"));
}

#[test]
fn bad_input_fails_cleanly() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    fs::write(&cfg, "snr_db = 1, 2\nsps = zero\n").unwrap();
    let out = mslink(&["ber-sweep", "--config", cfg.to_str().unwrap()]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
    let out = mslink(&["ber-sweep", "--mode", "nonsense"]);
    assert!(!out.status.success());
    let out = mslink(&["receive", "/nonexistent.iq", "--out", "/tmp/x"]);
    assert!(!out.status.success());
}
