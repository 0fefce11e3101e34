use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn prismopt(args: &[&str], root: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_prismopt"))
        .args(args)
        .env("PRISMOPT_OUTPUT_ROOT", root)
        .output()
        .unwrap()
}

fn topopt_study(dir: &Path) -> String {
    let path = dir.join("study.toml");
    fs::write(
        &path,
        r#"mode = "topopt"
objective = "stress"
seed = 1
output_dir = "topo"
load = 50e3
volume_fraction = 0.3

[domain]
length = 0.2
height = 0.045
element_size = 0.005

[solver]
max_iterations = 15
"#,
    )
    .unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn validate_reports_missing_fields_with_exit_code_1() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    fs::write(
        &path,
        "mode = \"topopt\"\nobjective = \"stress\"\nseed = 1\noutput_dir = \"x\"\nload = 1.0\n[domain]\nlength = 1.0\nheight = 0.045\nelement_size = 0.005\n",
    )
    .unwrap();
    let out = prismopt(&["validate", path.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("volume_fraction"));

    let ok = topopt_study(dir.path());
    assert_eq!(prismopt(&["validate", &ok], dir.path()).status.code(), Some(0));
    assert_eq!(prismopt(&["frobnicate"], dir.path()).status.code(), Some(1));
}

#[test]
fn topopt_run_writes_artifacts_and_reruns_identically() {
    let dir = tempfile::tempdir().unwrap();
    let study = topopt_study(dir.path());
    let out = prismopt(&["run", &study, "--jobs", "1"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));

    // Relative output_dir resolves under the output root.
    let run = dir.path().join("topo");
    for f in ["history.csv", "density_final.pgm", "density_final.csv", "convergence.svg", "manifest.json"] {
        assert!(run.join(f).exists(), "{f}");
    }
    assert!(!run.join("FAILED").exists());
    let pgm = fs::read(run.join("density_final.pgm")).unwrap();
    assert!(pgm.starts_with(b"P5\n40 9\n255\n"));
    assert_eq!(pgm.len(), "P5\n40 9\n255\n".len() + 40 * 9);

    let again = dir.path().join("again");
    let manifest = run.join("manifest.json");
    let out = prismopt(
        &["run", manifest.to_str().unwrap(), "--output-dir", again.to_str().unwrap()],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    for f in ["history.csv", "density_final.pgm", "density_final.csv", "convergence.svg"] {
        assert_eq!(fs::read(run.join(f)).unwrap(), fs::read(again.join(f)).unwrap(), "{f}");
    }

    // Export re-renders byte-identical images from the CSV files.
    let exported = dir.path().join("exported");
    let out = prismopt(&["export", run.to_str().unwrap(), "--to", exported.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(0));
    for f in ["density_final.pgm", "convergence.svg"] {
        assert_eq!(fs::read(run.join(f)).unwrap(), fs::read(exported.join(f)).unwrap(), "{f}");
    }
}

#[test]
fn solver_failure_leaves_partial_artifacts_and_exit_code_2() {
    let dir = tempfile::tempdir().unwrap();
    // Without load the stress objective cannot be normalized.
    let study = topopt_study(dir.path());
    let text = fs::read_to_string(&study).unwrap().replace("load = 50e3", "load = 0.0");
    fs::write(&study, text).unwrap();
    let out = prismopt(&["run", &study], dir.path());
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
    let run = dir.path().join("topo");
    assert!(run.join("FAILED").exists());
    assert!(run.join("manifest.json").exists());
    assert!(run.join("history.csv").exists());
    let manifest = fs::read_to_string(run.join("manifest.json")).unwrap();
    assert!(manifest.contains("\"status\": \"failed\""));
}

#[test]
fn sizing_run_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sizing.toml");
    fs::write(
        &path,
        r#"mode = "sizing"
objective = "stress"
core_type = "y"
seed = 7
output_dir = "sizing"
load = 50e3

[domain]
length = 1.0

[solver]
population = 12
generations = 3
"#,
    )
    .unwrap();
    let first = dir.path().join("a");
    let second = dir.path().join("b");
    for d in [&first, &second] {
        let out = prismopt(
            &["run", path.to_str().unwrap(), "--output-dir", d.to_str().unwrap()],
            dir.path(),
        );
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    }
    for f in ["pareto.csv", "history.csv", "front.svg", "convergence.svg"] {
        assert_eq!(fs::read(first.join(f)).unwrap(), fs::read(second.join(f)).unwrap(), "{f}");
    }
    let header = fs::read_to_string(first.join("pareto.csv")).unwrap();
    assert!(header.starts_with("run,core_type,t_f,t_w,h_c,h_h,h_l,s,t_j,area_density,max_vm,f1\n"));
}
