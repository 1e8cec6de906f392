use expanse_sim::output::read_snapshot;
use expanse_sim::RunManifest;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_expanse-sim"));
    c.env("EXPANSE_SIM_THREADS", "2");
    c
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn write(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn manifest(dir: &Path, name: &str) -> RunManifest {
    serde_json::from_str(&fs::read_to_string(dir.join(name).join("manifest.json")).unwrap()).unwrap()
}

fn column(path: &Path, idx: usize) -> Vec<f64> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(idx).unwrap().parse().unwrap())
        .collect()
}

#[test]
fn free_schrodinger_conserves_charge() {
    let out = tempfile::tempdir().unwrap();
    let o = bin()
        .args(["run", "--quiet", "--out-dir"])
        .arg(out.path())
        .arg(configs().join("free-schrodinger.toml"))
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let m = manifest(out.path(), "free-schrodinger");
    assert_eq!(m.status, "finished");
    let charge = column(m.records.as_ref().unwrap(), 1);
    assert_eq!(charge.len() as u64, m.steps + 1);
    let drift = charge.iter().map(|c| (c - charge[0]).abs()).fold(0.0, f64::max) / charge[0];
    assert!(drift < 1e-10, "drift {drift}");
    for p in m.snapshots.iter().chain(m.records.iter()) {
        assert!(p.exists(), "{}", p.display());
    }
    let snap = read_snapshot(fs::File::open(&m.snapshots[0]).unwrap()).unwrap();
    assert_eq!(snap.dim, 1);
    assert_eq!(snap.points_per_axis, 256);
    assert_eq!(snap.s, 0.0);
}

#[test]
fn blowup_scenario_exits_with_blowup_code() {
    let out = tempfile::tempdir().unwrap();
    let o = bin()
        .args(["run", "--quiet", "--out-dir"])
        .arg(out.path())
        .arg(configs().join("cor4-blowup.toml"))
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(10), "{}", stderr(&o));
    let m = manifest(out.path(), "cor4-blowup");
    assert!(m.blown_up());
    let [lo, hi] = m.s_detect.unwrap();
    assert!(lo < hi && hi < 2.0);
    assert!(m.profile.as_ref().unwrap().exists());
    let rows = column(m.records.as_ref().unwrap(), 0);
    assert_eq!(rows.len() as u64, m.steps + 1);
}

#[test]
fn missing_p_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "bad.toml",
        "[scenario]\nname = \"bad\"\ns_end = 1\nstep = 0.1\n[spec]\nn = 1\nlambda = 1\n",
    );
    let o = bin().args(["run", "--quiet", "--out-dir"]).arg(dir.path()).arg(&cfg).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("`p`"), "{}", stderr(&o));
}

#[test]
fn inadmissible_sign_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "rej.toml",
        r#"
[scenario]
name = "rej"
s_end = 1
step = 0.1
[spec]
n = 1
lambda = 1
p = 3
sign = "+"
omega = "-pi/4"
[grid]
points = 32
length = 10
[initial]
kind = "gaussian"
width = 1
amplitude = 1
"#,
    );
    let o = bin().args(["run", "--quiet", "--out-dir"]).arg(dir.path()).arg(&cfg).output().unwrap();
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    assert!(stderr(&o).contains("rejected"));
}

#[test]
fn s_end_beyond_horizon_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "h.toml",
        r#"
[scenario]
name = "h"
s_end = 10
step = 0.1
[spec]
n = 1
a1 = 1
lambda = 1
p = 3
[grid]
points = 32
length = 10
[initial]
kind = "gaussian"
width = 1
amplitude = 1
"#,
    );
    let o = bin().args(["run", "--quiet", "--out-dir"]).arg(dir.path()).arg(&cfg).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("s_end"));
}

#[test]
fn classify_reports_fired_conditions() {
    let dir = tempfile::tempdir().unwrap();
    let critical = write(
        dir.path(),
        "i.toml",
        "[scenario]\nname = \"i\"\n[spec]\nn = 3\nlambda = -1\np = \"7/3\"\nmu0 = 0\n",
    );
    let o = bin().arg("classify").arg(&critical).output().unwrap();
    assert!(stdout(&o).contains("(i) fired"), "{}", stdout(&o));

    let generic = write(
        dir.path(),
        "g.toml",
        "[scenario]\nname = \"g\"\n[spec]\nn = 3\nlambda = -1\np = 2\nmu0 = 0\n",
    );
    let o = bin().arg("classify").arg(&generic).output().unwrap();
    assert!(stdout(&o).contains("local only"), "{}", stdout(&o));

    let o = bin().arg("classify").arg(configs().join("radiation-vi.toml")).output().unwrap();
    let text = stdout(&o);
    assert!(text.contains("(vi) fired"), "{text}");
    let o = bin().args(["classify", "--kv"]).arg(configs().join("radiation-vi.toml")).output().unwrap();
    let kv = stdout(&o);
    let a_inf = kv.lines().find_map(|l| l.strip_prefix("A_inf = ")).unwrap();
    assert!(a_inf.parse::<f64>().unwrap().is_finite());
}

#[test]
fn classify_kv_reads_energy_sign_from_initial_data() {
    let o = bin().args(["classify", "--kv"]).arg(configs().join("cor4-blowup.toml")).output().unwrap();
    let kv = stdout(&o);
    let cor3 = kv.lines().find_map(|l| l.strip_prefix("cor3.satisfied = ")).unwrap();
    assert!(cor3.contains("E(u0) < 0"), "{kv}");
}

#[test]
fn sweep_over_omega_gives_p0_column() {
    let o = bin().arg("sweep").arg(configs().join("sweep-omega.toml")).output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split('\t').collect();
    let col = header.iter().position(|h| *h == "p0_crit").unwrap();
    let p0: Vec<String> = lines.map(|l| l.split('\t').nth(col).unwrap().to_string()).collect();
    assert_eq!(p0.len(), 5);
    assert_eq!(p0[0], "inf");
    assert_eq!(p0[4], "inf");
    assert!((p0[1].parse::<f64>().unwrap() - 3.0).abs() < 1e-12);
    assert!((p0[2].parse::<f64>().unwrap() - 1.0).abs() < 1e-12);
    assert!((p0[3].parse::<f64>().unwrap() - 3.0).abs() < 1e-12);
}

#[test]
fn sweep_p_a1_has_fired_column() {
    let o = bin().arg("sweep").arg(configs().join("sweep-p-a1.toml")).output().unwrap();
    let text = stdout(&o);
    let header = text.lines().next().unwrap();
    assert!(header.starts_with("p\ta1\t"));
    assert!(header.contains("fired_condition"));
    assert_eq!(text.lines().count(), 1 + 40 * 5);
}

#[test]
fn empty_sweep_is_header_only_and_cap_is_enforced() {
    let dir = tempfile::tempdir().unwrap();
    let base = "[scenario]\nname = \"s\"\n[spec]\nn = 1\nlambda = -1\np = 3\n";
    let empty = write(dir.path(), "e.toml", &format!("{base}[sweep]\nx = {{ param = \"p\", values = [] }}\n"));
    let o = bin().arg("sweep").arg(&empty).output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 1);

    let big = write(
        dir.path(),
        "b.toml",
        &format!("{base}[sweep]\nmax_points = 10\nx = {{ param = \"p\", linspace = [1.5, 4, 11] }}\n"),
    );
    let o = bin().arg("sweep").arg(&big).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn sweep_can_simulate_each_point() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "sim.toml",
        r#"
[scenario]
name = "sim"
s_end = 0.05
step = 0.01
[spec]
n = 1
lambda = 1
p = 3
[grid]
points = 32
length = 10
[initial]
kind = "gaussian"
width = 1
amplitude = 1
[sweep]
simulate = true
x = { param = "lambda", values = [-1, 0, 1] }
"#,
    );
    let o = bin().arg("sweep").arg(&cfg).output().unwrap();
    let text = stdout(&o);
    assert!(text.lines().next().unwrap().ends_with("status\ts_final"));
    for l in text.lines().skip(1) {
        assert!(l.contains("\tfinished\t"), "{l}");
    }
}

#[test]
fn reruns_are_byte_identical_and_seed_override_changes_the_hash() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let cfg = configs().join("defocusing-expanding.toml");
    for d in [&a, &b] {
        let o = bin()
            .args(["run", "--quiet", "--max-steps", "300", "--out-dir"])
            .arg(d.path())
            .arg(&cfg)
            .output()
            .unwrap();
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    }
    let name = "defocusing-expanding";
    let ra = fs::read(a.path().join(name).join("records.csv")).unwrap();
    let rb = fs::read(b.path().join(name).join("records.csv")).unwrap();
    assert_eq!(ra, rb);
    let ma = manifest(a.path(), name);
    assert_eq!(ma.status, "step-limit");
    assert_eq!(ma.steps, 300);
    assert_eq!(ma.scenario_hash, manifest(b.path(), name).scenario_hash);

    let c = tempfile::tempdir().unwrap();
    bin()
        .args(["run", "--quiet", "--max-steps", "300", "--seed-override", "99", "--out-dir"])
        .arg(c.path())
        .arg(&cfg)
        .output()
        .unwrap();
    let mc = manifest(c.path(), name);
    assert_ne!(mc.scenario_hash, ma.scenario_hash);
    assert_ne!(fs::read(c.path().join(name).join("records.csv")).unwrap(), ra);
}

#[test]
fn batch_reports_worst_exit_and_rejects_duplicate_names() {
    let out = tempfile::tempdir().unwrap();
    let o = bin()
        .args(["run", "--quiet", "--out-dir"])
        .arg(out.path())
        .arg(configs().join("free-schrodinger.toml"))
        .arg(configs().join("cor4-blowup.toml"))
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(10));
    assert_eq!(manifest(out.path(), "free-schrodinger").status, "finished");

    let o = bin()
        .args(["run", "--quiet", "--out-dir"])
        .arg(out.path())
        .arg(configs().join("heat-kernel.toml"))
        .arg(configs().join("heat-kernel.toml"))
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("duplicated"));
}
