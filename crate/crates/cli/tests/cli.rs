use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_shifted-fermat");

/// Runs with an empty environment so stray `SFERMAT_*` settings cannot leak in.
fn run(args: &[&str]) -> Output {
    Command::new(BIN)
        .args(args)
        .env_clear()
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn term_values() {
    assert_eq!(stdout(&run(&["term", "-d", "3", "-n", "3"])), "259\n");
    assert_eq!(stdout(&run(&["term", "-d", "1", "-n", "0"])), "3\n");
    assert_eq!(
        stdout(&run(&["term", "-d", "3", "-n", "100", "--mod", "7"])),
        "5\n"
    );
    let json = stdout(&run(&["term", "-d", "3", "-n", "2", "--format", "json"]));
    assert_eq!(
        json,
        "{\"type\":\"term\",\"index_convention\":\"zero-based\",\"d\":\"3\",\"n\":\"2\",\"value\":\"19\"}\n"
    );
}

#[test]
fn term_past_cap_is_a_precondition_failure() {
    let o = run(&["term", "-d", "3", "-n", "40"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(o.stdout.is_empty());
    assert_eq!(run(&["term", "-d", "0", "-n", "1"]).status.code(), Some(2));
}

#[test]
fn gcd_values() {
    assert_eq!(
        stdout(&run(&["gcd", "-d", "1", "-k", "2", "-l", "5"])),
        "1\n"
    );
    assert_eq!(
        stdout(&run(&["gcd", "-d", "3", "-k", "1", "-l", "3"])),
        "7\n"
    );
    assert_eq!(
        stdout(&run(&["gcd", "-d", "4", "-k", "2", "-l", "3"])),
        "20\n"
    );
    assert_eq!(
        run(&["gcd", "-d", "3", "-k", "3", "-l", "3"]).status.code(),
        Some(2)
    );
}

#[test]
fn emitted_certificates_check_clean() {
    let dir = tempfile::tempdir().unwrap();
    let cases: [&[&str]; 4] = [
        &["lift", "-n", "3", "-k", "12"],
        &["chain", "-d", "4", "-n", "2", "--minimal"],
        &["witness", "-d", "3", "-m", "10000"],
        &["witness", "-d", "8", "-m", "1000"],
    ];
    for (i, args) in cases.iter().enumerate() {
        let o = run(args);
        assert_eq!(o.status.code(), Some(0), "{args:?}");
        let path = dir.path().join(format!("cert{i}.json"));
        std::fs::write(&path, &o.stdout).unwrap();
        let c = run(&["check", path.to_str().unwrap()]);
        assert_eq!(c.status.code(), Some(0), "{args:?}: {}", stdout(&o));
        assert_eq!(stdout(&c), "valid\n");
    }
}

#[test]
fn tampered_certificates_exit_4() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("lift.json");
    let o = run(&["lift", "-n", "3", "-k", "12"]);
    let tampered = stdout(&o).replace("\"l\":\"5\"", "\"l\":\"6\"");
    std::fs::write(&path, tampered).unwrap();
    assert_eq!(
        run(&["check", path.to_str().unwrap()]).status.code(),
        Some(4)
    );
    std::fs::write(&path, "{not json").unwrap();
    assert_eq!(
        run(&["check", path.to_str().unwrap()]).status.code(),
        Some(4)
    );
    let missing = dir.path().join("missing.json");
    assert_eq!(
        run(&["check", missing.to_str().unwrap()]).status.code(),
        Some(2)
    );
}

#[test]
fn lift_precondition() {
    // nu_2(12) = 2 is not below n = 2.
    let o = run(&["lift", "-n", "2", "-k", "12"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("error"));
}

#[test]
fn witness_exhaustion_exits_3() {
    let o = run(&[
        "witness",
        "-d",
        "3",
        "-m",
        "1000000",
        "--p-max",
        "1000",
        "--scan-max-index",
        "3",
    ]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn profile_and_formats() {
    let o = run(&["profile", "-p", "7", "-d", "3", "-N", "6"]);
    assert!(stdout(&o).contains("\"hits\":[\"1\",\"3\",\"5\"]"));
    let csv = stdout(&run(&["scan", "-d", "5", "-K", "2", "--format", "csv"]));
    assert_eq!(csv, "k,l,gcd\n0,1,1\n0,2,7\n1,2,3\n");
    assert_eq!(
        run(&["profile", "-p", "9", "-d", "3", "-N", "6"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn verify_single_suite() {
    let o = run(&["verify", "--suite", "d1"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "suite d1: PASS (120/120 passed)\n");
}

#[test]
fn warm_cache_replays_identically() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache.jsonl");
    let cache = cache.to_str().unwrap();
    let args = ["--cache", cache, "witness", "-d", "6", "-m", "5000"];
    let cold = run(&args);
    let lines = std::fs::read_to_string(cache).unwrap().lines().count();
    let warm = run(&args);
    assert_eq!(cold.stdout, warm.stdout);
    assert_eq!(cold.stderr, warm.stderr);
    assert_eq!(cold.status.code(), warm.status.code());
    assert_eq!(
        std::fs::read_to_string(cache).unwrap().lines().count(),
        lines
    );
    // A different search bound is a different key.
    run(&[
        "--cache", cache, "--p-max", "999999", "witness", "-d", "6", "-m", "5000",
    ]);
    assert_eq!(
        std::fs::read_to_string(cache).unwrap().lines().count(),
        lines + 1
    );
}

#[test]
fn config_file_and_env() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(&cfg, r#"{"d": "3", "output_format": "csv"}"#).unwrap();
    let o = run(&["--config", cfg.to_str().unwrap(), "term", "-n", "2"]);
    assert_eq!(stdout(&o), "d,n,modulus,value\n3,2,,19\n");
    let o = Command::new(BIN)
        .args(["term", "-n", "2"])
        .env_clear()
        .env("SFERMAT_D", "5")
        .env("SFERMAT_OUTPUT_FORMAT", "human")
        .output()
        .unwrap();
    assert_eq!(stdout(&o), "21\n");
    let o = run(&["term", "-n", "2"]);
    assert_eq!(o.status.code(), Some(2));
}
