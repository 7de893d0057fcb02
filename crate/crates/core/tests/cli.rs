use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_singlift"));
    c.env_remove("SINGLIFT_CACHE_DIR");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("singlift-cli-{}-{name}", std::process::id()));
    std::fs::create_dir_all(&d).unwrap();
    d
}

#[test]
fn eisenstein_text() {
    let o = run(&["forms", "eis", "--weight", "4", "--prec", "5"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("1 + 240q + 2160q^2 + 6720q^3 + 17520q^4 + O(q^5)"));
}

#[test]
fn weakly_holomorphic_form() {
    let o = run(&["forms", "wh", "--weight", "-2", "--principal", "1:1", "--prec", "10"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("q^-1 - 240 - 141444q"));
}

#[test]
fn usage_errors_exit_one() {
    for args in [
        &["forms", "delta", "--prec", "0"][..],
        &["lift", "unimodular", "--m", "2", "--principal", "1:1", "--box", "0", "0"],
        &["verify", "--suite", "nosuch"],
        &["forms", "nosuch"],
        &["decompose", "--m", "2"],
        &["forms", "eis", "--weight", "3", "--prec", "4"],
        &["forms", "eis", "--weight", "4", "--format", "xml"],
    ] {
        assert_eq!(run(args).status.code(), Some(1), "{args:?}");
    }
}

#[test]
fn lift_singular_terms() {
    let o = run(&["lift", "unimodular", "--m", "2", "--principal", "1:1", "--box", "8", "8"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("singular: [(1,1,1,-32)]"));
    let j = run(&["--format", "json", "lift", "unimodular", "--m", "2", "--principal", "1:1", "--box", "8", "8"]);
    let v: serde_json::Value = serde_json::from_slice(&j.stdout).unwrap();
    assert_eq!(v["result"]["singular"][0]["coefficient"], "-32");
    assert_eq!(v["parameters"]["box"], "8 8");
}

#[test]
fn odd_m_is_a_computation_error() {
    let o = run(&["lift", "unimodular", "--m", "3", "--principal", "1:1", "--box", "8", "8"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("odd"));
}

#[test]
fn decompose_weight_forty() {
    let o = run(&["decompose", "--m", "2", "--principal", "1:1", "--delta-power", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o)
        .contains("-F20 - 4F11 - F02 + 984F30 + 9384F21 + 9384F12 + 984F03 - 2654208F31 - 12607488F22 - 2654208F13"));
}

#[test]
fn decompose_failures() {
    let o = run(&["decompose", "--m", "2", "--principal", "1:0", "--delta-power", "3"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("no weakly holomorphic form"));
    let o = run(&["decompose", "--m", "2", "--principal", "1:1", "--delta-power", "3", "--debug-guard", "40"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("certification failed"));
}

#[test]
fn config_file_and_determinism() {
    let d = scratch("config");
    let cfg = d.join("run.conf");
    std::fs::write(&cfg, "# weight 40 example\nm = 2\nprincipal = 1:1\ndelta_power = 3\nformat = json\n").unwrap();
    let a = bin().arg("decompose").arg("--config").arg(&cfg).output().unwrap();
    assert_eq!(a.status.code(), Some(0));
    let cache = d.join("cache");
    let b = bin().arg("decompose").arg("--config").arg(&cfg).env("SINGLIFT_CACHE_DIR", &cache).output().unwrap();
    let c = bin().arg("decompose").arg("--config").arg(&cfg).env("SINGLIFT_CACHE_DIR", &cache).output().unwrap();
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(b.stdout, c.stdout);
    assert_eq!(std::fs::read_dir(&cache).unwrap().count(), 1);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["parameters"]["delta-power"], "3");
    assert_eq!(v["result"]["decomposition"]["scale"], "32");
    // the command line beats the file
    let o = bin().args(["decompose", "--m", "3"]).arg("--config").arg(&cfg).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
    std::fs::write(&cfg, "m = 2\nprecision = 5\n").unwrap();
    let o = bin().args(["decompose", "--principal", "1:1", "--delta-power", "3"]).arg("--config").arg(&cfg).output().unwrap();
    assert_eq!(o.status.code(), Some(1));
    let _ = std::fs::remove_dir_all(&d);
}

#[test]
fn output_file() {
    let d = scratch("out");
    let out = d.join("e4.json");
    let o = bin().args(["forms", "eis", "--weight", "4", "--prec", "3", "--format", "json", "--output"]).arg(&out).output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["result"]["rendered"], "1 + 240q + 2160q^2 + O(q^3)");
    let _ = std::fs::remove_dir_all(&d);
}

#[test]
fn verify_single_suite() {
    let o = run(&["verify", "--suite", "covariance", "--b", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("PASS covariance/raise-covariance"));
    assert!(!s.contains("FAIL"));
    let j = run(&["--format", "json", "verify", "--suite", "kernel", "--b", "2,4"]);
    let v: serde_json::Value = serde_json::from_slice(&j.stdout).unwrap();
    assert_eq!(v["result"]["passed"], true);
}
