use std::path::Path;
use std::process::{Command, Output};

fn grassfoil(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_grassfoil"))
        .args(args)
        .env_remove("GRASSFOIL_KARCHER_TOL")
        .env_remove("GRASSFOIL_KARCHER_MAX_ITER")
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = grassfoil(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn small_dataset(dir: &Path) {
    ok(&[
        "gen-dataset",
        "--per-baseline",
        "2",
        "--n",
        "61",
        "--seed",
        "3",
        "--out",
        s(dir),
    ]);
}

fn read_json(p: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

#[test]
fn full_dataset_has_1016_shapes_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("ds");
    ok(&[
        "gen-dataset",
        "--baselines",
        "16",
        "--total",
        "1000",
        "--fraction",
        "0.2",
        "--seed",
        "7",
        "--out",
        s(&out),
    ]);
    let files = std::fs::read_dir(out.join("shapes")).unwrap().count();
    assert_eq!(files, 1016);
    let manifest = read_json(&out.join("manifest.json"));
    assert_eq!(manifest["config"]["subcommand"], "gen-dataset");
    assert_eq!(manifest["config"]["seed"], 7);
    assert_eq!(manifest["resolved"]["plan"], "Total(1000)");
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    small_dataset(&a);
    small_dataset(&b);
    for f in ["dataset.json", "blade.json", "shapes/0000.dat", "shapes/0040.dat"] {
        assert_eq!(
            std::fs::read(a.join(f)).unwrap(),
            std::fs::read(b.join(f)).unwrap(),
            "{f}"
        );
    }
    let (fa, fb) = (dir.path().join("fa"), dir.path().join("fb"));
    ok(&["pga-fit", "--dataset", s(&a), "--r", "4", "--out", s(&fa)]);
    ok(&["pga-fit", "--dataset", s(&a), "--r", "4", "--out", s(&fb)]);
    for f in ["model.json", "coords.csv", "spectrum.csv"] {
        assert_eq!(
            std::fs::read(fa.join(f)).unwrap(),
            std::fs::read(fb.join(f)).unwrap(),
            "{f}"
        );
    }
}

#[test]
fn pipeline_fit_synth_sweep_blade_render() {
    let dir = tempfile::tempdir().unwrap();
    let ds = dir.path().join("ds");
    small_dataset(&ds);

    let fit = dir.path().join("fit");
    ok(&["pga-fit", "--dataset", s(&ds), "--r", "4", "--out", s(&fit)]);
    let model = read_json(&fit.join("model.json"));
    let eig: Vec<f64> = model["eigenvalues"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_f64().unwrap())
        .collect();
    assert_eq!(eig.len(), 4);
    assert!(eig.windows(2).all(|w| w[0] >= w[1]));
    let model_path = fit.join("model.json");

    let syn = dir.path().join("syn");
    ok(&[
        "synth",
        "--model",
        s(&model_path),
        "--t",
        "0.01,-0.005,0,0",
        "--out",
        s(&syn),
    ]);
    assert!(syn.join("synth.dat").exists());

    let sw = dir.path().join("sw");
    let stdout = ok(&[
        "sweep",
        "--model",
        s(&model_path),
        "--corners",
        "random",
        "--count",
        "4",
        "--steps",
        "20",
        "--out",
        s(&sw),
    ]);
    assert!(stdout.contains("80/80"), "{stdout}");
    for k in 0..4 {
        let csv = std::fs::read_to_string(sw.join(format!("sweep_{k}.csv"))).unwrap();
        assert_eq!(csv.lines().count(), 1 + 20 * 61);
        let svg = std::fs::read_to_string(sw.join(format!("sweep_{k}.svg"))).unwrap();
        assert!(svg.starts_with("<?xml") && svg.trim_end().ends_with("</svg>"));
        assert_eq!(svg.matches("<path").count(), 20);
        assert_eq!(svg.matches(" Z\"").count(), 20);
    }

    let cst = dir.path().join("cst");
    ok(&[
        "sweep",
        "--space",
        "cst",
        "--dataset",
        s(&ds),
        "--count",
        "2",
        "--steps",
        "5",
        "--out",
        s(&cst),
    ]);
    assert!(cst.join("summary.csv").exists());

    let bi = dir.path().join("bi");
    let stdout = ok(&[
        "blade-interp",
        "--blade",
        s(&ds.join("blade.json")),
        "--spans",
        "40",
        "--out",
        s(&bi),
    ]);
    assert!(stdout.contains("0 invalid"), "{stdout}");
    let wire = std::fs::read_to_string(bi.join("wireframe.csv")).unwrap();
    assert_eq!(wire.lines().count(), 1 + 40 * 61);

    let bp = dir.path().join("bp");
    ok(&[
        "blade-perturb",
        "--blade",
        s(&ds.join("blade.json")),
        "--model",
        s(&model_path),
        "--t",
        "0.02,0.01,0,-0.01",
        "--knobs",
        "twist,chord,thickness",
        "--knob-values",
        "0.05,0.1,-0.1",
        "--out",
        s(&bp),
    ]);
    let report = std::fs::read_to_string(bp.join("report.csv")).unwrap();
    assert_eq!(report.lines().count(), 6);

    let svg = dir.path().join("r").join("scatter.svg");
    ok(&[
        "render",
        "--kind",
        "scatter",
        "--input",
        s(&fit.join("coords.csv")),
        "--out",
        s(&svg),
    ]);
    let body = std::fs::read_to_string(&svg).unwrap();
    assert_eq!(body.matches("<circle").count(), 16 * 3);
    assert!(svg.with_file_name("scatter.svg.manifest.json").exists());

    let shapes = dir.path().join("r").join("shapes.svg");
    ok(&[
        "render",
        "--kind",
        "shapes",
        "--input",
        s(&ds.join("shapes/0000.dat")),
        s(&syn.join("synth.dat")),
        "--out",
        s(&shapes),
    ]);
    assert_eq!(std::fs::read_to_string(&shapes).unwrap().matches(" Z\"").count(), 2);
}

#[test]
fn usage_errors_exit_2() {
    let out = grassfoil(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
    let out = grassfoil(&["gen-dataset", "--out", "x", "--bogus"]);
    assert_eq!(out.status.code(), Some(2));
    let out = grassfoil(&["gen-dataset", "--out", "x", "--baselines", "17"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn operation_errors_exit_1_with_one_line() {
    let dir = tempfile::tempdir().unwrap();
    let out = grassfoil(&[
        "synth",
        "--model",
        s(&dir.path().join("missing.json")),
        "--t",
        "0",
        "--out",
        "x",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert_eq!(err.lines().count(), 1, "{err}");
    assert!(err.starts_with("error:"));

    let target = dir.path().join("never");
    let out = grassfoil(&["gen-dataset", "--fraction", "1.5", "--out", s(&target)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!target.exists(), "nothing is written before validation");
}

#[test]
fn tolerance_environment_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let ds = dir.path().join("ds");
    small_dataset(&ds);
    let run = |var: &str, value: &str, out: &str| {
        Command::new(env!("CARGO_BIN_EXE_grassfoil"))
            .args(["mean", "--dataset", s(&ds), "--out", s(&dir.path().join(out))])
            .env(var, value)
            .output()
            .unwrap()
    };
    let capped = run("GRASSFOIL_KARCHER_MAX_ITER", "1", "m1");
    assert_eq!(capped.status.code(), Some(1));
    let bad = run("GRASSFOIL_KARCHER_TOL", "tiny", "m2");
    assert_eq!(bad.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("GRASSFOIL_KARCHER_TOL"));
    let loose = run("GRASSFOIL_KARCHER_TOL", "1e-6", "m3");
    assert!(loose.status.success());
    let manifest = read_json(&dir.path().join("m3").join("manifest.json"));
    assert_eq!(manifest["resolved"]["karcher_tol"], 1e-6);
}
