use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn loctemp(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_loctemp"))
        .args(args)
        .current_dir(dir)
        .env_remove("LOCTEMP_THREADS")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

const SMALL: &str = "\
[lattice]
L0 = 24
LBC = 6,8,10,12
[temperature]
T = 1,3,6
";

#[test]
fn thread_count_does_not_change_output() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("small.conf"), SMALL).unwrap();
    for (threads, out) in [("1", "one"), ("3", "three")] {
        let o = loctemp(&["--threads", threads, "locality", "-c", "small.conf", "-o", out], dir.path());
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    }
    for file in ["locality.csv", "locality_summary.csv"] {
        let a = fs::read(dir.path().join("one").join(file)).unwrap();
        let b = fs::read(dir.path().join("three").join(file)).unwrap();
        assert_eq!(a, b, "{file} differs between thread counts");
    }
}

#[test]
fn echoed_config_reproduces_the_run() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("small.conf"), SMALL).unwrap();
    let o = loctemp(&["locality", "-c", "small.conf", "-o", "first"], dir.path());
    assert_eq!(code(&o), 0);
    let echo = dir.path().join("first/locality.conf");
    let o = loctemp(&["locality", "-c", echo.to_str().unwrap(), "-o", "second"], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let a = fs::read_to_string(dir.path().join("first/locality.csv")).unwrap();
    let b = fs::read_to_string(dir.path().join("second/locality.csv")).unwrap();
    assert_eq!(a, b);
    assert!(a.starts_with("# loctemp locality rows schema v1\nkind,T,L0,LBC,"));
}

#[test]
fn bad_configuration_exits_with_one() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("bad.conf"), "[lattice]\nL0 = 24\ncolour = red\n").unwrap();
    let o = loctemp(&["locality", "-c", "bad.conf"], dir.path());
    assert_eq!(code(&o), 1);
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("line 3") && err.contains("colour"), "{err}");

    let o = loctemp(&["phase", "L0=25,50"], dir.path());
    assert_eq!(code(&o), 1);
    let o = loctemp(&["locality", "--no-such-flag"], dir.path());
    assert_eq!(code(&o), 1);
}

#[test]
fn missing_config_file_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = loctemp(&["locality", "-c", "nowhere.conf"], dir.path());
    assert_eq!(code(&o), 3);
}

#[test]
fn empty_table_plots_empty_axes() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("empty.csv");
    fs::write(&csv, "# loctemp phase rows schema v1\nkind,T,L,mu,N0_over_N\n").unwrap();
    let o = loctemp(&["plot", "empty.csv"], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let svg = fs::read_to_string(dir.path().join("empty.svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
    assert!(!svg.contains("<polyline"));
}

#[test]
fn plot_rejects_summary_tables() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("s.csv");
    fs::write(&csv, "# loctemp phase summary schema v1\nkind,quantity\n").unwrap();
    assert_eq!(code(&loctemp(&["plot", "s.csv"], dir.path())), 1);
}

#[test]
fn verify_passes() {
    let dir = tempfile::tempdir().unwrap();
    let o = loctemp(&["verify"], dir.path());
    assert_eq!(code(&o), 0);
    let out = String::from_utf8_lossy(&o.stdout);
    assert!(out.contains(" 0 failed"), "{out}");
}
