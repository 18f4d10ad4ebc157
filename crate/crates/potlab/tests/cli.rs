use std::fs;
use std::path::Path;
use std::process::Command;

use potlab::{Run, RunConfig};

fn path_config(out: &Path) -> RunConfig {
    let mut cfg = RunConfig::parse(
        r#"
select = ["generalized_3g", "strong_3g", "global_3g", "quasi_symmetry"]
dashboard.enabled = false
gauge.enabled = false
[[domain]]
name = "path"
kind = "cube"
n = 1
levels = [4]
"#,
    )
    .unwrap();
    cfg.out = out.to_path_buf();
    cfg
}

fn quiet(cfg: RunConfig) -> Run<'static> {
    Run::new(cfg).unwrap().with_notices(|_| {})
}

#[test]
fn path_verify_is_byte_identical() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    quiet(path_config(a.path())).cmd_verify().unwrap();
    quiet(path_config(b.path())).cmd_verify().unwrap();
    for f in ["verify.csv", "verify.txt"] {
        let x = fs::read(a.path().join(f)).unwrap();
        assert_eq!(x, fs::read(b.path().join(f)).unwrap(), "{f}");
    }
    let csv = fs::read_to_string(a.path().join("verify.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().collect();
    assert!(rows[0].starts_with("seed,config_hash,"));
    assert_eq!(rows.len(), 5);
    assert!(rows[1..].iter().all(|r| r.contains(",true,")));
}

#[test]
fn rerun_reuses_cache_and_output() {
    let dir = tempfile::tempdir().unwrap();
    let mut notes = Vec::new();
    {
        let mut run = Run::new(path_config(dir.path()))
            .unwrap()
            .with_notices(|m| notes.push(m.to_string()));
        run.cmd_green().unwrap();
        run.cmd_green().unwrap();
    }
    assert!(notes[0].ends_with("solved"));
    assert!(notes[1].ends_with("cached"));
    let first = fs::read(dir.path().join("green/path4.green")).unwrap();
    quiet(path_config(dir.path())).cmd_green().unwrap();
    assert_eq!(
        first,
        fs::read(dir.path().join("green/path4.green")).unwrap()
    );
}

#[test]
fn empty_selection_is_a_noop() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = path_config(dir.path());
    cfg.select.clear();
    let mut notes = Vec::new();
    let files = Run::new(cfg)
        .unwrap()
        .with_notices(|m| notes.push(m.to_string()))
        .cmd_verify()
        .unwrap();
    assert!(files.is_empty());
    assert!(notes[0].contains("nothing to verify"));
    assert!(!dir.path().join("verify.csv").exists());
}

#[test]
fn green_csv_export_on_request() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = path_config(dir.path());
    let files = quiet(cfg.clone()).cmd_green().unwrap();
    assert!(files.iter().all(|f| f.extension().unwrap() == "green"));
    cfg.solver.export_csv = true;
    let files = quiet(cfg).cmd_green().unwrap();
    let csv = files
        .iter()
        .find(|f| f.extension().unwrap() == "csv")
        .unwrap();
    let text = fs::read_to_string(csv).unwrap();
    let mut lines = text.lines();
    assert!(lines
        .next()
        .unwrap()
        .ends_with("x,y,vertex_x,vertex_y,g_x,g_y,gt"));
    // Path of 5 vertices: 3 interior, basepoint in the middle.
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').skip(2).map(|v| v.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 9);
    for r in &rows {
        assert!(r[4] <= 1.0 && r[5] <= 1.0);
        let back = rows.iter().find(|q| q[0] == r[1] && q[1] == r[0]).unwrap();
        assert_eq!(r[6], back[6]);
    }
}

#[test]
fn outputs_carry_seed_and_hash() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = path_config(dir.path());
    cfg.seed = 42;
    let hash = cfg.hash();
    let mut run = quiet(cfg);
    let mut files = run.cmd_gen().unwrap();
    files.extend(run.cmd_green().unwrap());
    files.extend(run.cmd_verify().unwrap());
    files.extend(run.cmd_report().unwrap());
    for f in files {
        let text = fs::read_to_string(&f).unwrap();
        let stamped = text.contains(&format!("seed 42 config_hash {hash}"))
            || text
                .lines()
                .nth(1)
                .is_some_and(|l| l.starts_with(&format!("42,{hash},")))
            || text.contains(&format!("seed 42, config hash `{hash}`"));
        assert!(stamped, "{}", f.display());
    }
}

#[test]
fn binary_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(
        &cfg,
        "dashboard.enabled = false\ngauge.enabled = false\n[[domain]]\nname = \"sq\"\nkind = \"cube\"\nlevels = [6]\n",
    )
    .unwrap();
    let out = dir.path().join("out");
    let bin = env!("CARGO_BIN_EXE_potlab");
    let run = |args: &[&str]| {
        Command::new(bin)
            .args(args)
            .args([
                "--config",
                cfg.to_str().unwrap(),
                "--out",
                out.to_str().unwrap(),
            ])
            .output()
            .unwrap()
    };
    let o = run(&["verify", "--select", "ubhp,strong_3g", "--seed", "3"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(out.join("verify.csv")).unwrap();
    assert_eq!(csv.lines().count(), 3);
    assert!(csv.lines().nth(1).unwrap().starts_with("3,"));
    let o = run(&["verify", "--select", "nonsense"]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("select[0]"));
    let o = run(&["gen", "--budget-vertices", "10"]);
    assert!(!o.status.success());
    let o = Command::new(bin).arg("defaults").output().unwrap();
    assert_eq!(
        String::from_utf8(o.stdout).unwrap(),
        potlab::config::REFERENCE
    );
}
