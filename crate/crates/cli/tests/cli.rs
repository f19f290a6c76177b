use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bipcm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bipcm")).args(args).output().unwrap()
}

fn write_config(dir: &Path, body: &str) -> String {
    let path = dir.join("config.json");
    fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

const BASE: &str = r#"{
    "vdist": {"kind": "dirac", "k": 3},
    "edist": {"kind": "dirac", "k": 2},
    "sizes": [60, 120, 240],
    "samples": 3,
    "seed": 5,
    "options": {"bgw_samples": 500, "axiom_z_total": 3}
}"#;

#[test]
fn subcommands_write_tables() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), BASE);
    let out = dir.path().join("out");
    let out_s = out.to_str().unwrap();
    for (cmd, prefix) in [
        ("census", "census_n"),
        ("bgw", "bgw-compare_n"),
        ("check", "admissibility_n"),
        ("cluster", "clustering_n"),
        ("simplicity", "simplicity_n"),
        ("estimate", "estimate_n"),
    ] {
        let o = bipcm(&[cmd, "--config", &config, "--out", out_s]);
        assert!(o.status.success(), "{cmd}: {}", String::from_utf8_lossy(&o.stderr));
        for n in [60, 120, 240] {
            assert!(out.join(format!("{prefix}{n}.csv")).exists(), "{cmd} n={n}");
        }
        assert!(out.join("manifest.json").exists());
    }
    let o = bipcm(&["generate", "--config", &config, "--out", out_s]);
    assert!(o.status.success());
    let text = fs::read_to_string(out.join("graph_n60_0.txt")).unwrap();
    assert!(!text.is_empty());
}

#[test]
fn seed_override_is_recorded_and_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), BASE);
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for out in [&a, &b] {
        let o = bipcm(&["simplicity", "--config", &config, "--out", out.to_str().unwrap(), "--seed", "99"]);
        assert!(o.status.success());
    }
    let manifest: serde_json::Value = serde_json::from_str(&fs::read_to_string(a.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["seed"], 99);
    assert_eq!(
        fs::read(a.join("simplicity_n240.csv")).unwrap(),
        fs::read(b.join("simplicity_n240.csv")).unwrap()
    );
}

#[test]
fn estimate_takes_a_formula() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), BASE);
    let out = dir.path().join("out");
    let o = bipcm(&[
        "estimate",
        "--config",
        &config,
        "--out",
        out.to_str().unwrap(),
        "--formula",
        "(forall (x) (eq x x))",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let table = fs::read_to_string(out.join("estimate_n60.csv")).unwrap();
    let row = table.lines().nth(1).unwrap();
    assert!(row.ends_with(",60,3,3,1.0,0.0"), "{row}");
}

#[test]
fn config_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write_config(dir.path(), &BASE.replace("[60, 120, 240]", "[120, 60]"));
    let o = bipcm(&["census", "--config", &bad]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("sizes[1]"));

    let good = write_config(dir.path(), BASE);
    let o = bipcm(&["estimate", "--config", &good, "--formula", "(exists (x"]);
    assert_eq!(o.status.code(), Some(2));
    let o = bipcm(&["census", "--config", "/nonexistent/config.json"]);
    assert_eq!(o.status.code(), Some(2));
    let o = bipcm(&["er-compare", "--config", &good]);
    assert_eq!(o.status.code(), Some(2), "needs a Poisson vertex law");
}

#[test]
fn rare_conditioning_exits_with_three() {
    let dir = tempfile::tempdir().unwrap();
    let body = r#"{
        "vdist": {"kind": "dirac", "k": 12},
        "edist": {"kind": "dirac", "k": 2},
        "sizes": [400],
        "samples": 2,
        "conditioning": "graph",
        "options": {"max_rejections": 2}
    }"#;
    let config = write_config(dir.path(), body);
    let out = dir.path().join("out");
    let o = bipcm(&["census", "--config", &config, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn er_compare_runs() {
    let dir = tempfile::tempdir().unwrap();
    let body = r#"{
        "vdist": {"kind": "poisson", "mean": 2.0},
        "edist": {"kind": "dirac", "k": 2},
        "sizes": [300],
        "samples": 4,
        "seed": 1
    }"#;
    let config = write_config(dir.path(), body);
    let out = dir.path().join("out");
    let o = bipcm(&["er-compare", "--config", &config, "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let table = fs::read_to_string(out.join("er-compare.csv")).unwrap();
    assert!(table.lines().any(|l| l.starts_with("degree-tv,1,300,4")));
}
