use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sectorscope"))
        .args(args)
        .env_remove("SECTORSCOPE_SEED")
        .output()
        .unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_owned()
}

const GHZ: &str = r#"{"ordering":"ABC-msb","kind":"pure",
  "amplitudes":[[0.7071067811865476,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0.7071067811865476,0]]}"#;

#[test]
fn invariants_of_ghz_file() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "ghz.json", GHZ);
    let out = run(&["invariants", &f]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("(1,1,1) S3=4"), "{}", stdout(&out));

    let json = run(&["invariants", &f, "--json"]);
    assert_eq!(code(&json), 0);
    let v: serde_json::Value = serde_json::from_slice(&json.stdout).unwrap();
    assert!(v.is_object());
}

#[test]
fn malformed_and_unphysical_inputs() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.json", "{\"ordering\": ");
    assert_eq!(code(&run(&["invariants", &bad])), 3);

    let wrong_order = write(dir.path(), "order.json", &GHZ.replace("ABC-msb", "CBA"));
    assert_eq!(code(&run(&["invariants", &wrong_order])), 3);

    // diag(1.5, -0.5, 0, ...) has unit trace but is not positive
    let mut rows = vec![vec!["[0,0]"; 8]; 8];
    rows[0][0] = "[1.5,0]";
    rows[1][1] = "[-0.5,0]";
    let matrix = rows
        .iter()
        .map(|r| format!("[{}]", r.join(",")))
        .collect::<Vec<_>>()
        .join(",");
    let body = format!(r#"{{"ordering":"ABC-msb","kind":"density","matrix":[{matrix}]}}"#);
    let neg = write(dir.path(), "neg.json", &body);
    assert_eq!(code(&run(&["invariants", &neg])), 2);

    assert_eq!(code(&run(&["invariants", "/nonexistent/state.json"])), 5);
}

#[test]
fn criteria_exit_codes() {
    assert_eq!(code(&run(&["criteria", "--state", "eta", "-c", "obs3"])), 0);
    assert_eq!(
        code(&run(&["criteria", "--family", "bell-mm", "-c", "obs3"])),
        1
    );
    assert_eq!(code(&run(&["criteria", "--state", "ghz", "-c", "bs1"])), 1);
    assert_eq!(
        code(&run(&[
            "criteria",
            "--state",
            "mm",
            "-c",
            "obs3,fs1,bs1,union,conj1"
        ])),
        0
    );
    assert_eq!(code(&run(&["criteria", "--state", "ghz", "-c", "nope"])), 4);

    let out = run(&["criteria", "--state", "ghz", "-c", "bs1,fs1", "--json"]);
    assert_eq!(code(&out), 1);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 2);
}

#[test]
fn usage_errors() {
    assert_eq!(code(&run(&["--help"])), 0);
    assert_eq!(code(&run(&["--version"])), 0);
    assert_eq!(code(&run(&["bogus"])), 4);
    assert_eq!(code(&run(&["sample", "--n", "x"])), 4);
    assert_eq!(code(&run(&["invariants"])), 4);
    assert_eq!(code(&run(&["sample", "--rank", "2", "--schedule"])), 4);
    assert_eq!(code(&run(&["figure-data", "fig9", "--out", "/tmp"])), 4);
}

#[test]
fn tables_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.csv");
    let out = run(&["tables", "--grid", "3", "--out", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("row,"));
    assert!(text.contains("noisy-ghz"));
}

#[test]
fn figure_data_into_a_file_path_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let file = write(dir.path(), "plain", "");
    let out = run(&["figure-data", "fig1", "--out", &file, "--cloud", "10"]);
    assert_eq!(code(&out), 5);

    let target = dir.path().join("figs");
    let out = run(&[
        "figure-data",
        "fig1",
        "--out",
        target.to_str().unwrap(),
        "--cloud",
        "10",
    ]);
    assert_eq!(code(&out), 0);
    assert!(target.join("fig1_curves.csv").exists());
    assert!(target.join("fig1_cloud.csv").exists());
}

#[test]
fn sample_is_deterministic_across_workers() {
    let dir = tempfile::tempdir().unwrap();
    let mut files = vec![];
    for workers in ["1", "3"] {
        let csv = dir.path().join(format!("cloud{workers}.csv"));
        let json = dir.path().join(format!("summary{workers}.json"));
        let out = run(&[
            "sample",
            "--n",
            "300",
            "--rank",
            "2",
            "--seed",
            "42",
            "--workers",
            workers,
            "--out",
            csv.to_str().unwrap(),
            "--summary",
            json.to_str().unwrap(),
        ]);
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
        files.push((std::fs::read(csv).unwrap(), std::fs::read(json).unwrap()));
    }
    assert_eq!(files[0], files[1]);
}

#[test]
fn seed_from_environment() {
    let with_env = |seed: &str| {
        Command::new(env!("CARGO_BIN_EXE_sectorscope"))
            .args(["sample", "--n", "50"])
            .env("SECTORSCOPE_SEED", seed)
            .output()
            .unwrap()
    };
    let a = with_env("9");
    let b = run(&["sample", "--n", "50", "--seed", "9"]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, with_env("10").stdout);
}

#[test]
fn searches_are_deterministic() {
    let args = [
        "conjecture-search",
        "--which",
        "3",
        "--starts",
        "20",
        "--budget",
        "20000",
        "--seed",
        "4",
    ];
    let a = run(&args);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, run(&args).stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert!(v["best_value"].as_f64().unwrap() <= 3f64.sqrt() + 1e-6);

    let published = run(&["union-search", "--published"]);
    assert_eq!(code(&published), 0);
    assert!(
        stdout(&published).contains("3.0221"),
        "{}",
        stdout(&published)
    );
}
