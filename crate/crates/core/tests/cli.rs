use std::process::Command;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_vem-stokes"));
    c.env("RUST_LOG", "warn");
    c
}

#[test]
fn run_writes_results_and_plot_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["run", "--test", "1", "--family", "Q", "--h", "1/2,1/4", "--k", "2", "--scheme", "full", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let mut reader = csv::Reader::from_path(dir.path().join("results.csv")).unwrap();
    assert_eq!(reader.headers().unwrap().len(), 12);
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 2);
    assert_eq!(&rows[0][3], "new-full");
    assert!(dir.path().join("Q_new-full_k2_delta_u.dat").exists());
}

#[test]
fn config_file_is_read_and_flags_override_it() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "family = \"T\"\nh = [0.5]\nk = [3]\nscheme = \"reduced\"\n").unwrap();
    let out = bin()
        .args(["run", "--config"])
        .arg(&cfg)
        .args(["--k", "2", "--out"])
        .arg(dir.path().join("o"))
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let line = text.lines().nth(1).unwrap();
    assert!(line.starts_with("T,0.5,2,new-reduced,"), "{line}");
}

#[test]
fn equivalence_and_dof_table_commands() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["equivalence", "--family", "V", "--h", "1/4", "--k", "2", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    let table = dir.path().join("dof.csv");
    let out = bin().args(["dof-table", "--family", "Q", "--h", "1/4", "--out"]).arg(&table).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("Q,0.25,2,64,44.138,43.836"), "{text}");
    assert_eq!(std::fs::read_to_string(table).unwrap().lines().count(), 5);
}

#[test]
fn bad_input_fails_with_a_diagnostic() {
    for args in [
        vec!["run", "--family", "X"],
        vec!["run", "--element", "classic", "--scheme", "reduced"],
        vec!["run", "--k", "1"],
        vec!["run", "--test", "7", "--h", "1/2"],
        vec!["run", "--family", "file:/nonexistent/mesh.txt"],
    ] {
        let out = bin().args(&args).output().unwrap();
        assert!(!out.status.success(), "{args:?}");
        assert!(String::from_utf8_lossy(&out.stderr).contains("error"), "{args:?}");
    }
}

#[test]
fn slope_expectation_sets_the_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let base = ["run", "--family", "Q", "--h", "1/4,1/8,1/16", "--k", "2"];
    let ok = bin().args(base).args(["--expect-slope", "0.3", "--out"]).arg(dir.path()).output().unwrap();
    assert!(ok.status.success());
    let strict = bin().args(base).args(["--expect-slope", "0.0001", "--out"]).arg(dir.path()).output().unwrap();
    assert_eq!(strict.status.code(), Some(2));
}
