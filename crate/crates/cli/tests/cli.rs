use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn qclab(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qclab")).args(args).arg("--out").arg(out).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn read_dir_sorted(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), fs::read(e.path()).unwrap())
        })
        .collect();
    v.sort();
    v
}

#[test]
fn universal_one_to_two_prints_five_sixths() {
    let tmp = TempDir::new().unwrap();
    let o = qclab(&["clone-fidelity", "--family", "universal", "--M", "1", "--N", "2"], tmp.path());
    assert!(o.status.success());
    assert!(stdout(&o).contains("5/6"), "{}", stdout(&o));
}

#[test]
fn aharonov_model_one_guess_and_bias() {
    let tmp = TempDir::new().unwrap();
    let o = qclab(&["coinflip-bias", "--protocol", "aharonov", "--model", "I", "--phi", "pi/8", "--check"], tmp.path());
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("0.853 / bias 0.353"), "{}", stdout(&o));
    let csv = fs::read_to_string(tmp.path().join("coinflip-bias-reports.csv")).unwrap();
    assert!(csv.lines().next().unwrap().ends_with(",seed"));
}

#[test]
fn reruns_are_byte_identical() {
    let runs = [
        vec!["qe-attack", "--trials", "20"],
        vec!["puf-id", "--trials", "50"],
        vec!["puf-id", "--scheme", "lrv", "--N", "8", "--trials", "100"],
        vec!["puf-id", "--scheme", "hlpuf", "--trials", "20"],
        vec!["coinflip-bias", "--protocol", "mayers", "--trials", "500"],
        vec!["varqlone-train", "--restarts", "2", "--iters", "15"],
        vec!["hpuf-bounds"],
    ];
    for args in runs {
        let (a, b) = (TempDir::new().unwrap(), TempDir::new().unwrap());
        let mut full = args.clone();
        full.extend(["--seed", "11"]);
        assert!(qclab(&full, a.path()).status.success(), "{args:?}");
        assert!(qclab(&full, b.path()).status.success(), "{args:?}");
        let (ra, rb) = (read_dir_sorted(a.path()), read_dir_sorted(b.path()));
        assert!(!ra.is_empty());
        assert_eq!(ra, rb, "{args:?}");
    }
}

#[test]
fn seed_appears_in_every_artifact() {
    let tmp = TempDir::new().unwrap();
    for args in [
        vec!["puf-id", "--trials", "20"],
        vec!["puf-id", "--scheme", "lrv", "--N", "8", "--trials", "10"],
        vec!["bb84-dcrit", "--cloner", "ideal"],
        vec!["varqlone-train", "--restarts", "1", "--iters", "5"],
    ] {
        let mut full = args.clone();
        full.extend(["--seed", "4242"]);
        assert!(qclab(&full, tmp.path()).status.success());
        for (name, bytes) in read_dir_sorted(tmp.path()) {
            assert!(String::from_utf8(bytes).unwrap().contains("4242"), "{name} lacks the seed");
        }
    }
}

#[test]
fn flags_override_config_file() {
    let tmp = TempDir::new().unwrap();
    let cfg = tmp.path().join("run.conf");
    fs::write(&cfg, "# universal cloner\nexperiment = clone-fidelity\nfamily = universal\nM = 1\nN = 3\nseed = 5\n").unwrap();
    let out = tmp.path().join("out");
    let o = qclab(&["--config", cfg.to_str().unwrap()], &out);
    assert!(o.status.success());
    assert!(stdout(&o).contains("7/9"), "{}", stdout(&o));
    assert!(stdout(&o).contains("seed 5"));
    let o = qclab(&["--config", cfg.to_str().unwrap(), "--N", "2", "--seed", "6"], &out);
    assert!(stdout(&o).contains("5/6"), "{}", stdout(&o));
    assert!(stdout(&o).contains("seed 6"));
}

#[test]
fn configuration_errors_exit_two() {
    let tmp = TempDir::new().unwrap();
    let bad: [&[&str]; 6] = [
        &["no-such-experiment"],
        &["coinflip-bias", "--phi", "pi/"],
        &["coinflip-bias", "--model", "V"],
        &["clone-fidelity", "--alpha", "1"],
        &["hpuf-bounds", "--seed", "-1"],
        &["clone-fidelity", "--bogus-flag"],
    ];
    for args in bad {
        assert_eq!(qclab(args, tmp.path()).status.code(), Some(2), "{args:?}");
    }
    let o = Command::new(env!("CARGO_BIN_EXE_qclab")).output().unwrap();
    assert_eq!(o.status.code(), Some(2), "missing experiment");
}

#[test]
fn missed_target_with_check_exits_three() {
    let tmp = TempDir::new().unwrap();
    let args = ["coinflip-bias", "--protocol", "mayers", "--trials", "0"];
    assert_eq!(qclab(&args, tmp.path()).status.code(), Some(0));
    let mut checked = args.to_vec();
    checked.push("--check");
    assert_eq!(qclab(&checked, tmp.path()).status.code(), Some(3));
}

#[test]
fn unwritable_output_exits_four() {
    let tmp = TempDir::new().unwrap();
    let file = tmp.path().join("plain-file");
    fs::write(&file, "x").unwrap();
    let o = qclab(&["hpuf-bounds"], &file.join("sub"));
    assert_eq!(o.status.code(), Some(4));
}
