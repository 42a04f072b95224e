use std::path::Path;
use std::process::{Command, Output};

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_critwave"))
        .args(args)
        .arg("--out")
        .arg(dir)
        .env_remove("CRITWAVE_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn body(path: &Path) -> String {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| format!("{l}\n"))
        .collect()
}

fn column(path: &Path, name: &str) -> Vec<f64> {
    let b = body(path);
    let mut lines = b.lines();
    let idx = lines.next().unwrap().split(',').position(|c| c == name).unwrap();
    lines.map(|l| l.split(',').nth(idx).unwrap().parse().unwrap()).collect()
}

fn all_finite(path: &Path) -> bool {
    body(path)
        .lines()
        .skip(1)
        .flat_map(|l| l.split(',').map(str::to_string).collect::<Vec<_>>())
        .all(|c| c.parse::<f64>().is_ok_and(f64::is_finite))
}

#[test]
fn free_potential_is_resonant() {
    let d = tempfile::tempdir().unwrap();
    let o = run(d.path(), &["resonance", "--set", "potential.family=\"zero\""]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("verdict: resonant"));
    assert!(all_finite(&d.path().join("resonance.csv")));
}

#[test]
fn free_decay_trace_stabilizes() {
    let d = tempfile::tempdir().unwrap();
    let o = run(
        d.path(),
        &["decay", "--quiet", "--set", "potential.family=\"zero\"", "--set", "decay.t_list=[10.0, 20.0]"],
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).is_empty());
    let csv = d.path().join("decay.csv");
    let scaled = column(&csv, "sup_sqrt_t");
    // sup_z √(2z)|J₀(z)| over the grid, attained well inside it at t = 10.
    assert!((scaled[0] - 1.128).abs() < 0.01, "{scaled:?}");
    assert!(all_finite(&csv));
    let script = std::fs::read_to_string(d.path().join("decay.gp")).unwrap();
    assert!(script.contains("'decay.csv' using 1:3"));
}

#[test]
fn header_echoes_config_and_hypotheses() {
    let d = tempfile::tempdir().unwrap();
    let o = run(d.path(), &["jost-sweep", "--seed", "7", "--set", "k.values=[0.5, 2.0]"]);
    assert!(o.status.success());
    let text = std::fs::read_to_string(d.path().join("jost_sweep.csv")).unwrap();
    for needle in [
        "# critwave ",
        "# seed = 7",
        "# command = \"jost-sweep\"",
        "# family = \"exponential\"",
        "# flag.decay = true",
        "# flag.marchenko2 = true",
        "moment.far_xlog2 = ",
    ] {
        assert!(text.contains(needle), "missing {needle}");
    }
    assert_eq!(column(&d.path().join("jost_sweep.csv"), "k"), vec![0.5, 2.0]);
}

#[test]
fn output_is_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = ["jost-sweep", "--quiet", "--set", "k.points=6"];
    assert!(run(a.path(), &args).status.success());
    let o = Command::new(env!("CARGO_BIN_EXE_critwave"))
        .args(args)
        .arg("--out")
        .arg(b.path())
        .env("CRITWAVE_THREADS", "1")
        .output()
        .unwrap();
    assert!(o.status.success());
    let (x, y) = (a.path().join("jost_sweep.csv"), b.path().join("jost_sweep.csv"));
    assert_eq!(std::fs::read(x).unwrap(), std::fs::read(y).unwrap());
}

#[test]
fn config_round_trips() {
    let d = tempfile::tempdir().unwrap();
    let first = run(d.path(), &["decay", "--print-config", "--set", "decay.t_list=[1.0, 3.0]", "--set", "cutoff.kind=\"high-pass\""]);
    assert!(first.status.success());
    let cfg = d.path().join("cfg.toml");
    std::fs::write(&cfg, &first.stdout).unwrap();
    let second = run(d.path(), &["--print-config", "--config", cfg.to_str().unwrap()]);
    assert_eq!(stdout(&first), stdout(&second));
    assert!(stdout(&first).contains("kind = \"high-pass\""));
}

#[test]
fn csv_potential_relative_to_config() {
    let d = tempfile::tempdir().unwrap();
    std::fs::write(d.path().join("q.csv"), "x,q\n1.0,-2.0\n1.5,-2.0\n2.0,-2.0\n").unwrap();
    let cfg = d.path().join("run.toml");
    std::fs::write(
        &cfg,
        "command = \"bound-states\"\n[potential]\nfamily = \"csv\"\nfile = \"q.csv\"\n[bound_states]\nkappa_max = 10.0\n",
    )
    .unwrap();
    let o = run(d.path(), &["--config", cfg.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("1 bound state(s)"));
}

#[test]
fn vdc_check_on_gaussian() {
    let d = tempfile::tempdir().unwrap();
    let o = run(d.path(), &["vdc-check"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("bound holds: true"));
    assert!(all_finite(&d.path().join("vdc.csv")));
}

#[test]
fn acceptance_subset() {
    let d = tempfile::tempdir().unwrap();
    let o = run(d.path(), &["acceptance", "--set", "acceptance.criteria=[1, 5]"]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert!(s.contains("[PASS]  1"));
    assert!(s.contains("[PASS]  5"));
    assert!(s.contains("2 passed, 0 failed"));
}

fn error_record(o: &Output) -> serde_json::Value {
    let line = String::from_utf8_lossy(&o.stderr).lines().last().unwrap().to_string();
    serde_json::from_str(&line).expect("JSON error record")
}

#[test]
fn config_errors_exit_2() {
    let d = tempfile::tempdir().unwrap();
    let o = run(d.path(), &["kernel", "--set", "potential.amplitude=\"big\""]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(error_record(&o)["error"], "config");
    let o = run(d.path(), &[]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(d.path(), &["decay", "--set", "decay.t_list=[]"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(error_record(&o)["error"], "parameter");
    let o = Command::new(env!("CARGO_BIN_EXE_critwave"))
        .args(["resonance", "--out"])
        .arg(d.path())
        .env("CRITWAVE_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn unmet_hypothesis_exits_3() {
    let d = tempfile::tempdir().unwrap();
    // q = 1/x on (0, 1): ∫₀¹|q| diverges.
    let o = run(
        d.path(),
        &["kernel", "--set", "potential.family=\"power\"", "--set", "potential.a=0.0", "--set", "potential.b=1.0"],
    );
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(error_record(&o)["error"], "hypothesis");
    assert!(String::from_utf8_lossy(&o.stderr).contains("flag.decay = false"));
}

#[test]
fn solver_refusal_exits_4() {
    let d = tempfile::tempdir().unwrap();
    let o = run(
        d.path(),
        &[
            "born-check",
            "--set",
            "potential.family=\"bump\"",
            "--set",
            "potential.amplitude=-10.0",
            "--set",
            "cutoff.kind=\"high-pass\"",
            "--set",
            "cutoff.k0=0.1",
            "--set",
            "born.t=5.0",
        ],
    );
    assert_eq!(o.status.code(), Some(4));
    assert_eq!(error_record(&o)["error"], "k0_too_small");
}
