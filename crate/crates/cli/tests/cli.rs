use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn dhosc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dhosc")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path.to_string_lossy().into_owned()
}

fn small_config(out: &Path) -> String {
    format!(
        "params.m = 1.0\nparams.omega = 1.0\nparams.hbar = 1.0\n\
         pulse.kind = \"sine_squared\"\npulse.F_m = 0.5\npulse.Omega_over_omega = 0.5\npulse.T_cycles = 1.0\n\
         state.n = 0\ngrid.x_min = -12.0\ngrid.x_max = 12.0\ngrid.n = 128\n\
         prop.dt_per_cycle = 0.001\nprop.t_end_cycles = 1.5\nprop.method = \"split_operator\"\n\
         out.dir = {:?}\n",
        out.to_string_lossy()
    )
}

#[test]
fn run_writes_all_outputs_deterministically() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    let cfg = write_config(tmp.path(), "run.toml", &small_config(&a));
    let first = dhosc(&["run", "--config", &cfg]);
    assert_eq!(code(&first), 0, "{}", String::from_utf8_lossy(&first.stderr));
    let second = dhosc(&["run", "--config", &cfg, "--out", b.to_str().unwrap()]);
    assert_eq!(code(&second), 0);
    for name in [
        "timeseries_numeric.csv",
        "timeseries_exact.csv",
        "d_reference.csv",
        "decomposition.csv",
        "psi_numeric_final.csv",
        "psi_exact_final.csv",
    ] {
        let (x, y) = (fs::read(a.join(name)).unwrap(), fs::read(b.join(name)).unwrap());
        assert_eq!(x, y, "{name} differs between identical runs");
    }
    let header = fs::read_to_string(a.join("timeseries_numeric.csv")).unwrap();
    assert!(header.starts_with("t,peak,mean_x,mean_p,dx,dp,dxdp,energy,accel,d_ref,norm\n"));
    let decomposition = fs::read_to_string(a.join("decomposition.csv")).unwrap();
    assert!(decomposition.starts_with("t,cx,cp,c1\n"));
    let meta: serde_json::Value = serde_json::from_str(&fs::read_to_string(a.join("run_meta.json")).unwrap()).unwrap();
    assert!(meta["tolerances"]["edge_amplitude_limit"].is_number());
    assert_eq!(meta["config"]["grid"]["n"], 128);
    assert!(meta["config_text"].as_str().unwrap().contains("pulse.F_m = 0.5"));
}

#[test]
fn compare_exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let run_dir = tmp.path().join("run");
    let cfg = write_config(tmp.path(), "run.toml", &small_config(&run_dir));
    assert_eq!(code(&dhosc(&["run", "--config", &cfg])), 0);
    let dir = run_dir.to_str().unwrap();

    let same = dhosc(&["compare", dir, dir, "--tol", "0"]);
    assert_eq!(code(&same), 0);
    assert!(String::from_utf8_lossy(&same.stdout).contains("PASS"));

    let numeric = run_dir.join("timeseries_numeric.csv");
    let exact = run_dir.join("timeseries_exact.csv");
    let strict = dhosc(&["compare", numeric.to_str().unwrap(), exact.to_str().unwrap(), "--tol", "1e-15"]);
    assert_eq!(code(&strict), 4);
    assert!(String::from_utf8_lossy(&strict.stdout).contains("FAIL"));

    let json = tmp.path().join("report.json");
    let psi = dhosc(&[
        "compare",
        run_dir.join("psi_numeric_final.csv").to_str().unwrap(),
        run_dir.join("psi_exact_final.csv").to_str().unwrap(),
        "--tol",
        "1e-4",
        "--json",
        json.to_str().unwrap(),
    ]);
    assert_eq!(code(&psi), 0, "{}", String::from_utf8_lossy(&psi.stdout));
    assert!(fs::read_to_string(&json).unwrap().contains("\"l2\""));

    let schema = dhosc(&["compare", numeric.to_str().unwrap(), run_dir.join("decomposition.csv").to_str().unwrap()]);
    assert_eq!(code(&schema), 2);
}

#[test]
fn config_errors_exit_2() {
    let tmp = tempfile::tempdir().unwrap();
    let bad = write_config(tmp.path(), "bad.toml", "params.mass = 1.0\n");
    assert_eq!(code(&dhosc(&["run", "--config", &bad])), 2);
    let negative = write_config(tmp.path(), "neg.toml", "params.omega = -1.0\n");
    assert_eq!(code(&dhosc(&["run", "--config", &negative])), 2);
    assert_eq!(code(&dhosc(&["run", "--config", "/nonexistent/config.toml"])), 2);
    assert_eq!(code(&dhosc(&["run"])), 2);
    assert_eq!(code(&dhosc(&["run", "--preset", "fig9"])), 2);
}

#[test]
fn packet_leaving_grid_exits_3() {
    let tmp = tempfile::tempdir().unwrap();
    let body = format!(
        "pulse.kind = \"constant\"\npulse.F_m = 4.0\ngrid.x_min = -8.0\ngrid.x_max = 8.0\ngrid.n = 128\n\
         prop.t_end_cycles = 1.0\nprop.dt_per_cycle = 0.001\nout.dir = {:?}\n",
        tmp.path().join("out").to_string_lossy()
    );
    let cfg = write_config(tmp.path(), "escape.toml", &body);
    let out = dhosc(&["run", "--config", &cfg]);
    assert_eq!(code(&out), 3);
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));
}

#[test]
fn decompose_and_pulse_table() {
    let out = dhosc(&["decompose", "--preset", "fig2", "--times", "0,8", "--cycles"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(header[0], "t");
    assert!(header.contains(&"hc_linear"));
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 2);
    let cp = header.iter().position(|h| *h == "hc_cp").unwrap();
    assert!((rows[1][cp] + 0.0865893490758211).abs() < 1e-9);

    let tmp = tempfile::tempdir().unwrap();
    let path = tmp.path().join("pulse.csv");
    let out = dhosc(&["pulse-table", "--preset", "fig1", "--samples", "10", "--out", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let table = fs::read_to_string(&path).unwrap();
    assert!(table.starts_with("t,F,fs,fc,d,d_dot\n"));
    assert_eq!(table.lines().count(), 12);
}
