use std::process::{Command, Output};

fn hallscope(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hallscope"))
        .args(args)
        .env_remove("HALLSCOPE_N")
        .env_remove("HALLSCOPE_T")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn count_prints_81() {
    let o = hallscope(&["count", "--lambda", "2,2", "--n", "2", "--t", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().next(), Some("81"));
}

#[test]
fn json_report_parses() {
    let o = hallscope(&["count", "--lambda", "1", "--n", "2", "--t", "2", "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["result"]["count"], "4");
    assert_eq!(v["manifest"]["all_passed"], true);
}

#[test]
fn environment_fills_missing_keys() {
    let o = Command::new(env!("CARGO_BIN_EXE_hallscope"))
        .args(["count", "--lambda", "2,2"])
        .env("HALLSCOPE_N", "2")
        .env("HALLSCOPE_T", "3")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("81"));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(hallscope(&["count", "--lambda", "2,2"]).status.code(), Some(2));
    assert_eq!(hallscope(&["count", "--lambda", "1,2", "--n", "2", "--t", "2"]).status.code(), Some(2));
    assert_eq!(hallscope(&["no-such-command"]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty.conf");
    std::fs::write(&empty, "# nothing\n").unwrap();
    let o = hallscope(&["run", empty.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 1"));
}

#[test]
fn failed_check_exits_1() {
    let o = hallscope(&["frozen", "--grid", "11", "--tolerance", "0"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL"));
}

#[test]
fn config_file_and_manifest_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("run.conf");
    let out = dir.path().join("samples.json");
    std::fs::write(
        &conf,
        format!(
            "# exact samples\ncommand = sample\nlambda = 2,2\nn = 2\nt = 3\nsamples = 10\nseed = 4\nout = {}\n",
            out.display()
        ),
    )
    .unwrap();
    let mut manifests = Vec::new();
    for name in ["a.json", "b.json"] {
        let m = dir.path().join(name);
        let o = Command::new(env!("CARGO_BIN_EXE_hallscope"))
            .args(["run", conf.to_str().unwrap()])
            .env("HALLSCOPE_MANIFEST", &m)
            .output()
            .unwrap();
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        manifests.push(std::fs::read(&m).unwrap());
    }
    assert_eq!(manifests[0], manifests[1]);
    let v: serde_json::Value = serde_json::from_slice(&manifests[0]).unwrap();
    assert_eq!(v["artifacts"][0]["bytes"], std::fs::metadata(&out).unwrap().len());
}

#[test]
fn render_writes_svg() {
    let dir = tempfile::tempdir().unwrap();
    let samples = dir.path().join("s.json");
    let svg = dir.path().join("s.svg");
    let o = hallscope(&["sample", "--lambda", "2,1", "--n", "2", "--t", "2", "--out", samples.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let o = hallscope(&["render", samples.to_str().unwrap(), "--out", svg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(std::fs::read_to_string(&svg).unwrap().contains("<svg"));
}
