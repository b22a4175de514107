//! End-to-end checks of the `kopa` binary: outputs, formats, exit codes.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn kopa() -> Command {
    Command::new(env!("CARGO_BIN_EXE_kopa"))
}

fn asset(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../assets")
        .join(name)
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("no exit code")
}

/// 16x16 gradient test image, written as ASCII PGM.
fn write_small_pgm(path: &Path) {
    let mut body = String::from("P2\n16 16\n255\n");
    for i in 0..16 {
        for j in 0..16 {
            body.push_str(&format!("{} ", (i * 16 + j) % 256));
        }
        body.push('\n');
    }
    std::fs::write(path, body).unwrap();
}

#[test]
fn select_produces_report_and_heatmap() {
    let dir = tempfile::tempdir().unwrap();
    let img = dir.path().join("t.pgm");
    write_small_pgm(&img);
    let report = dir.path().join("report.json");
    let heat = dir.path().join("heat.csv");
    let out = kopa()
        .args(["select", "--input"])
        .arg(&img)
        .args(["--criterion", "aic", "--out"])
        .arg(&report)
        .arg("--csv")
        .arg(&heat)
        .output()
        .unwrap();
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let parsed: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert!(parsed["chosen"].is_array());
    assert_eq!(parsed["table"].as_array().unwrap().len(), 23); // 5x5 lattice minus corners
    let csv = std::fs::read_to_string(&heat).unwrap();
    assert!(csv.starts_with("m,n,eta,lambda_hat,rss,ic,flag"));
}

#[test]
fn fit_cameraman_matches_known_ratio() {
    let dir = tempfile::tempdir().unwrap();
    let model = dir.path().join("model.json");
    let out = kopa()
        .args(["fit", "--input"])
        .arg(asset("cameraman.pgm"))
        .args(["--config", "4,5", "--terms", "1", "--out"])
        .arg(&model)
        .output()
        .unwrap();
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(
        stdout.contains("variance explained: 0.7754") || stdout.contains("variance explained: 0.7755"),
        "stdout: {stdout}"
    );
    let parsed: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&model).unwrap()).unwrap();
    for key in ["M", "N", "m", "n", "K", "lambda", "vec(A)", "vec(B)", "sigma2_hat"] {
        assert!(parsed.get(key).is_some(), "missing {key}");
    }
}

#[test]
fn denoise_writes_loadable_recon() {
    let dir = tempfile::tempdir().unwrap();
    let img = dir.path().join("t.pgm");
    write_small_pgm(&img);
    let recon = dir.path().join("recon.pgm");
    let model = dir.path().join("model.json");
    let out = kopa()
        .args(["denoise", "--input"])
        .arg(&img)
        .args(["--sigma", "0.05", "--terms", "2", "--criterion", "bic", "--seed", "7"])
        .arg("--recon")
        .arg(&recon)
        .arg("--out")
        .arg(&model)
        .output()
        .unwrap();
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let r = kopa_core::image::load_pgm(&recon).unwrap();
    assert_eq!((r.width, r.height), (16, 16));
}

#[test]
fn sim_runs_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("exp.json");
    std::fs::write(
        &spec,
        r#"{"kind":"select-one-term","M":5,"N":5,"m0":2,"n0":2,
            "lambda_grid":[3.0],"varphi2_grid":[0.5],
            "sigma":1.0,"reps":3,"kappa":2.0,"base_seed":99}"#,
    )
    .unwrap();
    let run = |out: &Path, agg: &Path| {
        let o = kopa()
            .args(["sim", "--spec"])
            .arg(&spec)
            .arg("--out")
            .arg(out)
            .arg("--agg")
            .arg(agg)
            .output()
            .unwrap();
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    };
    let (o1, a1) = (dir.path().join("r1.csv"), dir.path().join("a1.csv"));
    let (o2, a2) = (dir.path().join("r2.csv"), dir.path().join("a2.csv"));
    run(&o1, &a1);
    run(&o2, &a2);
    assert_eq!(std::fs::read(&o1).unwrap(), std::fs::read(&o2).unwrap());
    assert_eq!(std::fs::read(&a1).unwrap(), std::fs::read(&a2).unwrap());
    let agg = std::fs::read_to_string(&a1).unwrap();
    assert!(agg.starts_with("varphi2,grid_value,correct,reps,frequency"));
}

#[test]
fn curve_emits_csv() {
    let dir = tempfile::tempdir().unwrap();
    let img = dir.path().join("t.pgm");
    write_small_pgm(&img);
    let out = kopa()
        .args(["curve", "--input"])
        .arg(&img)
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.starts_with("method,params,ratio"));
    // 7 kopa diagonals + 16 ranks
    assert_eq!(stdout.lines().count(), 1 + 7 + 16);
}

#[test]
fn exit_codes() {
    // missing required argument -> usage error (2)
    let out = kopa().arg("select").output().unwrap();
    assert_eq!(code(&out), 2);

    // nonexistent input -> input error (3)
    let out = kopa()
        .args(["select", "--input", "/nonexistent/x.pgm"])
        .output()
        .unwrap();
    assert_eq!(code(&out), 3);

    // malformed --config -> parse error (3)
    let dir = tempfile::tempdir().unwrap();
    let img = dir.path().join("t.pgm");
    write_small_pgm(&img);
    let out = kopa()
        .args(["fit", "--input"])
        .arg(&img)
        .args(["--config", "nonsense"])
        .output()
        .unwrap();
    assert_eq!(code(&out), 3);

    // convergence failure -> 4 (iteration cap of 1 cannot converge)
    let out = kopa()
        .args(["fit", "--input"])
        .arg(&img)
        .args(["--config", "2,2", "--max-iter", "1", "--tol", "1e-14"])
        .output()
        .unwrap();
    assert_eq!(code(&out), 4, "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn non_dyadic_requires_pad() {
    let dir = tempfile::tempdir().unwrap();
    let img = dir.path().join("odd.pgm");
    let mut body = String::from("P2\n12 12\n255\n");
    for i in 0..144 {
        body.push_str(&format!("{} ", i % 251));
    }
    std::fs::write(&img, body).unwrap();

    let out = kopa().args(["select", "--input"]).arg(&img).output().unwrap();
    assert_eq!(code(&out), 3);
    assert!(String::from_utf8_lossy(&out.stderr).contains("pad"));

    let out = kopa()
        .args(["select", "--input"])
        .arg(&img)
        .arg("--pad")
        .output()
        .unwrap();
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
}
