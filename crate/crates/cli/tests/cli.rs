use std::process::{Command, Output};

fn elastigraph(args: &[&str], budget: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_elastigraph"));
    cmd.args(args).env_remove("ELASTIGRAPH_BUDGET");
    if let Some(b) = budget {
        cmd.env("ELASTIGRAPH_BUDGET", b);
    }
    cmd.output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

const SMALL: &str = "restarts=3,levels=3";

#[test]
fn fixtures_round_trip_through_validate() {
    let list = elastigraph(&["fixtures"], None);
    assert!(list.status.success());
    assert_eq!(stdout(&list).lines().count(), 5);
    let dir = std::env::temp_dir().join(format!("elastigraph-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    for name in stdout(&list).lines() {
        let text = elastigraph(&["fixtures", name], None);
        assert!(text.status.success(), "{name}");
        let path = dir.join(format!("{name}.txt"));
        std::fs::write(&path, &text.stdout).unwrap();
        let v = elastigraph(&["validate", path.to_str().unwrap()], None);
        assert!(v.status.success(), "{name}: {}", String::from_utf8_lossy(&v.stderr));
    }
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn exit_codes() {
    assert_eq!(elastigraph(&["certify", "--fixture", "obstructed-k2d2"], Some(SMALL)).status.code(), Some(2));
    assert_eq!(elastigraph(&["certify", "--fixture", "loop-doubling", "--max-n", "1"], Some(SMALL)).status.code(), Some(0));
    let missing = elastigraph(&["portrait", "--fixture", "nonesuch"], None);
    assert_eq!(missing.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&missing.stderr).starts_with("error:"));
    let absent = elastigraph(&["validate", "/nonexistent/input.txt"], None);
    assert_eq!(absent.status.code(), Some(1));
}

#[test]
fn bad_input_reports_line() {
    let path = std::env::temp_dir().join(format!("elastigraph-bad-{}.txt", std::process::id()));
    std::fs::write(&path, "[graph g]\nvertex v rotation: q ~q\n").unwrap();
    let o = elastigraph(&["validate", path.to_str().unwrap()], None);
    std::fs::remove_file(&path).unwrap();
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
}

#[test]
fn budget_override() {
    // without the scan the obstructed example is merely inconclusive
    let o = elastigraph(&["certify", "--fixture", "obstructed-k2d2", "--max-n", "1"], Some("scan_len=0,restarts=2,levels=2"));
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("inconclusive"));
    for bad in ["bogus=1", "restarts=x", "levels"] {
        let o = elastigraph(&["energy", "--fixture", "theta"], Some(bad));
        assert_eq!(o.status.code(), Some(1), "{bad}");
        assert!(String::from_utf8_lossy(&o.stderr).contains("ELASTIGRAPH_BUDGET"));
    }
}

#[test]
fn output_is_deterministic() {
    let base = ["energy", "--fixture", "theta", "--level", "2", "--json"];
    let a = elastigraph(&base, Some(SMALL));
    let b = elastigraph(&base, Some(SMALL));
    let c = elastigraph(&[&base[..], &["--jobs", "4"]].concat(), Some(SMALL));
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stdout, c.stdout);
    let s1 = elastigraph(&[&base[..], &["--seed", "1"]].concat(), Some(SMALL));
    assert_eq!(s1.stdout, elastigraph(&[&base[..], &["--seed", "1"]].concat(), Some(SMALL)).stdout);
    let json: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert!(json.is_object());
}

#[test]
fn thicken_and_obstruct() {
    let t = elastigraph(&["thicken", "--fixture", "theta", "--curve", "a ~b", "--eps", "1/10"], None);
    assert!(t.status.success());
    let out = stdout(&t);
    assert!(out.contains("18/5"), "{out}");
    let bad = elastigraph(&["thicken", "--fixture", "theta", "--curve", "a ~b", "--eps", "1/2"], None);
    assert_eq!(bad.status.code(), Some(1));
    let s = elastigraph(&["obstruct", "--fixture", "theta", "--scan", "4"], Some(SMALL));
    assert!(s.status.success());
}
