use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_dumbbell"))
}

fn run(args: &[&str]) -> (i32, String, String) {
    let out = bin().args(args).output().expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

#[test]
fn profile_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("profile.csv");
    let (code, _, err) = run(&["profile", "--eps", "0.01", "--k", "2", "--samples", "101", "--out", path.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    let text = std::fs::read_to_string(&path).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "# schema=1");
    assert_eq!(lines[1], "t,F,F1,F2");
    assert_eq!(lines.len(), 103);
}

#[test]
fn geometry_key_values_and_csv() {
    let (code, out, _) = run(&["geometry", "--eps", "0.01", "--k", "1", "--n", "3", "--samples", "2000"]);
    assert_eq!(code, 0);
    assert!(out.contains("min_K_radial="));
    assert!(out.contains("kappa="));
    let (code, out, _) = run(&["geometry", "--eps", "0.01", "--k", "1", "--n", "3", "--samples", "2000", "--csv"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().nth(1).unwrap(), "eps,k,n,min_K,max_K,vol_chain,vol_M,norm_factor");
    assert_eq!(out.lines().count(), 3);
}

#[test]
fn spectrum_csv_rows() {
    let (code, out, err) = run(&[
        "spectrum", "--eps", "0.001", "--k", "2", "--m", "4", "--p", "1", "--modes", "4", "--grid", "1024", "--csv",
    ]);
    assert_eq!(code, 0, "{err}");
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[1], "eps,k,m,p,j,lambda,paper_bound,ratio");
    assert_eq!(lines.len(), 2 + 4);
    let first: Vec<&str> = lines[2].split(',').collect();
    assert_eq!(first[4], "0");
    let small: f64 = lines[4].split(',').nth(5).unwrap().parse().unwrap();
    let large: f64 = lines[5].split(',').nth(5).unwrap().parse().unwrap();
    assert!(small < 0.2 * large);
}

#[test]
fn bound_prints_constant() {
    let (code, out, _) = run(&["bound", "--eps", "0.01", "--k", "1", "--m", "3", "--p", "0"]);
    assert_eq!(code, 0);
    assert!(out.contains("C=6.3661977237e-1"), "{out}");
}

#[test]
fn sweep_flags_override_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("sweep.cfg");
    std::fs::write(&cfg, "eps = 0.01\nk = 1, 2\nmp = 3:0\ngrid = 256\nsamples = 2000\n").unwrap();
    let out_path = dir.path().join("rows.csv");
    let args = [
        "sweep",
        "--config",
        cfg.to_str().unwrap(),
        "--k",
        "1",
        "--out",
        out_path.to_str().unwrap(),
    ];
    let (code, _, err) = run(&args);
    assert_eq!(code, 0, "{err}");
    let first = std::fs::read_to_string(&out_path).unwrap();
    assert_eq!(first.lines().count(), 3);
    assert!(first.lines().nth(2).unwrap().starts_with("1.0000000000000000e-2,1,1,3,0,3,"));
    // Byte-identical on a rerun.
    let (code, _, _) = run(&args);
    assert_eq!(code, 0);
    assert_eq!(std::fs::read_to_string(&out_path).unwrap(), first);
}

#[test]
fn empty_sweep_succeeds() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("empty.cfg");
    std::fs::write(&cfg, "eps =\n").unwrap();
    let (code, out, _) = run(&["sweep", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().count(), 2);
}

#[test]
fn exit_codes() {
    // Usage errors.
    assert_eq!(run(&["spectrum", "--eps", "0.01"]).0, 2);
    assert_eq!(run(&["nonsense"]).0, 2);
    assert_eq!(run(&["geometry", "--eps", "0.2", "--k", "1", "--n", "3"]).0, 2);
    assert_eq!(run(&["bound", "--eps", "0.01", "--k", "1", "--m", "3", "--p", "2"]).0, 2);
    assert_eq!(run(&["sweep", "--config", "/nonexistent/cfg"]).0, 2);
    // Numerical failure: the profile cannot be built.
    assert_eq!(run(&["accept", "--oracle"]).0, 0);
    let (code, out, _) = run(&["accept", "--cutoff-a", "0.1", "--cutoff-b", "0.1"]);
    assert_eq!(code, 1);
    assert!(out.contains("FAIL [1]"));
    assert!(out.lines().last().unwrap().starts_with("acceptance: 2/9 PASS"));
}
