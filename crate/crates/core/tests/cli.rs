use chainrebuild::chain::{ChainComplex, GradedMap};
use chainrebuild::cli::{parse_range, sig12, Config};
use chainrebuild::stack::mapping_torus_as_stack;
use chainrebuild::IntMatrix;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_chainrebuild"))
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs")
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn chainrebuild")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// Data rows as string records, skipping `#` lines.
fn rows(csv_text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut rd = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(csv_text.as_bytes());
    let header = rd.headers().unwrap().iter().map(String::from).collect();
    let body = rd.records().map(|r| r.unwrap().iter().map(String::from).collect()).collect();
    (header, body)
}

fn col(header: &[String], name: &str) -> usize {
    header.iter().position(|h| h == name).unwrap()
}

#[test]
fn sample_configs_are_clean_and_reproducible() {
    for (verb, file) in [
        ("sweep", "circle.conf"),
        ("sweep", "torus.conf"),
        ("sweep", "heisenberg.conf"),
        ("gabber-fuzz", "gabber.conf"),
        ("farber", "farber.conf"),
        ("farber", "farber_action.conf"),
    ] {
        let path = configs().join(file);
        let a = run(&[verb, path.to_str().unwrap()]);
        assert_eq!(a.status.code(), Some(0), "{file}: {}", String::from_utf8_lossy(&a.stderr));
        let b = run(&[verb, path.to_str().unwrap()]);
        assert_eq!(a.stdout, b.stdout, "{file}");
        assert!(!stdout(&a).contains("# FAIL"));
    }
}

#[test]
fn circle_sweep_betti_over_index() {
    let o = run(&["sweep", configs().join("circle.conf").to_str().unwrap()]);
    let (h, body) = rows(&stdout(&o));
    let (sub, idx, f2) = (col(&h, "subgroup"), col(&h, "index"), col(&h, "betti_f2"));
    let mut per: std::collections::BTreeMap<String, (u64, u64)> = Default::default();
    for r in &body {
        let e = per.entry(r[sub].clone()).or_insert((r[idx].parse().unwrap(), 0));
        e.1 += r[f2].parse::<u64>().unwrap();
    }
    assert_eq!(per.len(), 7);
    for (_, (n, b)) in per {
        assert_eq!(b, 2, "N = {n}");
    }
}

#[test]
fn torus_sweep_is_torsion_free() {
    let o = run(&["sweep", configs().join("torus.conf").to_str().unwrap()]);
    let (h, body) = rows(&stdout(&o));
    assert_eq!(body.len(), 19 * 3);
    let (lt, bq, idx) = (col(&h, "log_tors"), col(&h, "betti_q"), col(&h, "index"));
    for r in &body {
        assert_eq!(r[lt], "0");
        let ratio = r[bq].parse::<f64>().unwrap() / r[idx].parse::<f64>().unwrap();
        assert!(ratio <= 2.0 / 4.0);
    }
}

#[test]
fn heisenberg_bound_ratio_decreases() {
    let o = run(&["sweep", configs().join("heisenberg.conf").to_str().unwrap()]);
    let (h, body) = rows(&stdout(&o));
    let (deg, rb) = (col(&h, "degree"), col(&h, "ratio_bound"));
    let r: Vec<f64> = body.iter().filter(|r| r[deg] == "1").map(|r| r[rb].parse().unwrap()).collect();
    assert_eq!(r.len(), 7);
    assert!(r.windows(2).all(|w| w[1] < w[0]), "{r:?}");
    assert!(r[0] / r[6] >= 2.0);
}

#[test]
fn frozen_regression_detects_drift() {
    let dir = tempfile::tempdir().unwrap();
    let frozen = std::fs::read_to_string(configs().join("heisenberg.frozen.csv")).unwrap();
    // Bump one kappa_min.
    let drifted = frozen.replacen("heisenberg,mod 3,27,1,81,3,2,2,1.09861228867,3.295836866,0.0406893440247,0.122068032074,1,", "heisenberg,mod 3,27,1,81,3,2,2,1.09861228867,3.295836866,0.0406893440247,0.122068032074,1.5,", 1);
    assert_ne!(drifted, frozen);
    std::fs::write(dir.path().join("f.csv"), drifted).unwrap();
    std::fs::write(dir.path().join("h.conf"), "family = heisenberg\nn = 2..4\nfrozen = f.csv\n").unwrap();
    let o = run(&["sweep", dir.path().join("h.conf").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let text = stdout(&o);
    assert!(text.contains("# FAIL heisenberg mod 3 degree 1: kappa_min"), "{text}");
}

#[test]
fn config_errors_report_path_and_line() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.conf");
    for (text, want) in [
        ("family = torus\nn = 2..4\nbogus = 1\n", "line 3: unknown key `bogus`"),
        ("family = torus\n\nn 2..4\n", "line 3: expected `key = value`"),
        ("family = torus\nn = 4..x\n", "line 2: `n`: invalid integer `x`"),
        ("family = klein\nn = 2\n", "line 1: unknown family `klein`"),
        ("family = torus\nn = 2\nn = 3\n", "line 3: duplicate key `n`"),
    ] {
        std::fs::write(&p, text).unwrap();
        let o = run(&["sweep", p.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(2));
        let err = String::from_utf8(o.stderr).unwrap();
        assert!(err.contains("bad.conf") && err.contains(want), "{err}");
    }
    std::fs::write(&p, "count = 3\n").unwrap();
    let o = run(&["gabber-fuzz", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8(o.stderr).unwrap().contains("missing required key `seed`"));
    assert_eq!(run(&["rebuild", "circle", "10", "--t", "5"]).status.code(), Some(2));
    assert_eq!(run(&["rebuild", "torus", "3", "--caps", "bits=x"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn seed_flag_overrides_config() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("g.conf");
    std::fs::write(&p, "seed = 1\ncount = 20\nbt3_count = 5\n").unwrap();
    let base = run(&["gabber-fuzz", p.to_str().unwrap()]);
    let same = run(&["gabber-fuzz", p.to_str().unwrap(), "--seed", "1"]);
    let other = run(&["gabber-fuzz", p.to_str().unwrap(), "--seed", "2"]);
    assert_eq!(base.stdout, same.stdout);
    assert_ne!(base.stdout, other.stdout);
    let (h, body) = rows(&stdout(&other));
    assert_eq!(body.len(), 20 * 2 + 5);
    assert!(body.iter().all(|r| r[col(&h, "holds")] == "true"));
}

#[test]
fn json_output_and_out_flag() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let o = run(&["rebuild", "heisenberg", "3", "--format", "json", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["schema"], "chainrebuild-sweep/1");
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 4);
    assert_eq!(rows[1]["cells_tgt"], 3);
    assert_eq!(rows[1]["log_tors"].as_f64().unwrap(), sig12(3f64.ln()).parse::<f64>().unwrap());
    assert!(v["failures"].as_array().unwrap().is_empty());
}

#[test]
fn tight_caps_fall_back_to_rebuilt_complex() {
    let o = run(&["rebuild", "heisenberg", "4", "--caps", "bits=2"]);
    assert_eq!(o.status.code(), Some(0));
    let (h, body) = rows(&stdout(&o));
    assert!(body.iter().all(|r| r[col(&h, "flags")] == "cap"));
    // H₁ of the cover is ℤ² ⊕ ℤ/4 either way.
    assert_eq!(body[1][col(&h, "log_tors")], sig12(4f64.ln()));
}

#[test]
fn homology_of_chain_and_stack_files() {
    let dir = tempfile::tempdir().unwrap();
    // ℝP²: ∂₂ = 2, ∂₁ = 0.
    let rp2 = ChainComplex::new(vec![1, 1, 1], vec![IntMatrix::zeros(1, 1), IntMatrix::from_dense(&[vec![2]])]).unwrap();
    let p = dir.path().join("rp2.chain");
    std::fs::write(&p, rp2.to_string()).unwrap();
    let o = run(&["homology", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("# schema: chainrebuild-homology/1\n"));
    assert!(text.contains("\n1,1,0,1,2,0.69314718056,0.69314718056\n"), "{text}");

    // The circle as a mapping torus over the point.
    let pt = ChainComplex::point();
    mapping_torus_as_stack(&pt, &GradedMap::identity(&pt, 0)).unwrap().save(dir.path(), "s").unwrap();
    let o = run(&["homology", dir.path().join("s.stack").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let (h, body) = rows(&stdout(&o));
    let b: Vec<&str> = body.iter().map(|r| r[col(&h, "betti_q")].as_str()).collect();
    assert_eq!(b, ["1", "1"]);
    assert_eq!(run(&["homology", dir.path().join("missing.chain").to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn range_syntax() {
    assert_eq!(parse_range("3").unwrap(), vec![3]);
    assert_eq!(parse_range("2..5").unwrap(), vec![2, 3, 4, 5]);
    assert_eq!(parse_range("2..9+3").unwrap(), vec![2, 5, 8]);
    assert_eq!(parse_range("8..2048*2").unwrap().len(), 9);
    assert_eq!(parse_range("1, 4..5").unwrap(), vec![1, 4, 5]);
    assert!(parse_range("0..8*2").is_err());
    assert!(parse_range("1..4+0").is_err());
    let c = Config::parse("# c\nn = 5..4\n").unwrap();
    assert_eq!(c.range("n").unwrap_err().line, 2);
}

#[test]
fn sig12_formatting() {
    assert_eq!(sig12(0.0), "0");
    assert_eq!(sig12(1.0), "1");
    assert_eq!(sig12(2f64.ln()), "0.69314718056");
    assert_eq!(sig12(1e-7), "1e-7");
    assert_eq!(sig12(123456789012345.0), "1.23456789012e14");
    assert_eq!(sig12(-0.5), "-0.5");
}
