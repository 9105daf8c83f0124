use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn qadd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qadd")).args(args).output().expect("spawn qadd")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn write_config(dir: &Path, body: &str) -> String {
    let p = dir.join("config.json");
    fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_owned()
}

const THEOREM1: &str =
    r#"{"q":2,"d":1,"n_values":[3,4],"trials":15,"r_max":3,"seed":42,"mode":"theorem1"}"#;

#[test]
fn analyze_lists_the_divisor_of_a_composite() {
    // X^4 + (t^2+t) X^2 + t^2 X = (X^2 + tX) ∘ (X^2 + tX)
    let o = qadd(&["--q", "2", "analyze", "0,0,1;0,1,1;1"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["n"], 2);
    assert_eq!(v["divisor_search"]["divisors"], serde_json::json!([[[0, 1], [1]]]));
    assert_eq!(v["con_t"], serde_json::json!([[1]]));
    assert_eq!(v["degenerate"], false);
}

#[test]
fn analyze_accepts_json_and_reports_ground_input() {
    let o = qadd(&["analyze", r#"{"q":3,"coeffs":[[2],[1],[1]]}"#]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["degenerate"], true);
    assert_eq!(v["params"]["eta"], 2);
    assert_eq!(v["con_t"], v["coeffs"]);
}

#[test]
fn analyze_rejects_inseparable_input() {
    let o = qadd(&["--q", "2", "analyze", "0;1;1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("not separable"));
}

#[test]
fn parse_errors_exit_with_two() {
    assert_eq!(qadd(&["--q", "2", "analyze", "0,x;1"]).status.code(), Some(2));
    assert_eq!(qadd(&["analyze", "1;1"]).status.code(), Some(2));
    assert_eq!(qadd(&["--q", "6", "analyze", "1;1"]).status.code(), Some(2));
    assert_eq!(qadd(&["--q", "2", "analyze", "1;2"]).status.code(), Some(2));
    assert_eq!(qadd(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn experiment_writes_reproducible_reports() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), THEOREM1);
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for out in [&a, &b] {
        let o = qadd(&["experiment", &cfg, "--out", out.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        assert_eq!(stdout(&o), fs::read_to_string(out.join("report.csv")).unwrap());
    }
    for name in ["report.csv", "report.json"] {
        assert_eq!(fs::read(a.join(name)).unwrap(), fs::read(b.join(name)).unwrap(), "{name}");
    }
    assert_eq!(fs::read_to_string(a.join("report.csv")).unwrap().lines().count(), 3);
}

#[test]
fn flags_override_the_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), THEOREM1);
    let out = dir.path().join("o");
    let o = qadd(&["experiment", &cfg, "--out", out.to_str().unwrap(), "--trials", "0", "--seed", "9"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(fs::read_to_string(out.join("report.csv")).unwrap().lines().count(), 1);
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(json["config"]["seed"], 9);
    assert_eq!(json["config"]["trials"], 0);
}

#[test]
fn empty_experiments_have_header_only_csv() {
    let dir = tempfile::tempdir().unwrap();
    for mode in ["theorem2", "content", "delta", "specfact"] {
        let cfg = write_config(
            dir.path(),
            &format!(r#"{{"q":3,"d":1,"n_values":[2],"trials":0,"r_max":2,"seed":1,"mode":"{mode}"}}"#),
        );
        let out = dir.path().join(mode);
        let o = qadd(&["experiment", &cfg, "--out", out.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{mode}");
        assert_eq!(fs::read_to_string(out.join("report.csv")).unwrap().lines().count(), 1, "{mode}");
    }
}

#[test]
fn invalid_configs_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o");
    let bad = [
        r#"{"q":2,"d":1,"n_values":[3],"trials":5,"r_max":0,"seed":1,"mode":"theorem1"}"#,
        r#"{"q":6,"d":1,"n_values":[3],"trials":5,"r_max":2,"seed":1,"mode":"theorem1"}"#,
        r#"{"q":2,"d":1,"n_values":[3],"trials":5,"r_max":2,"seed":1,"mode":"bogus"}"#,
        r#"{"q":2,"d":1,"n_values":[3],"trials":5,"r_max":2,"seed":1,"mode":"delta","extra":1}"#,
        "not json",
    ];
    for body in bad {
        let cfg = write_config(dir.path(), body);
        let o = qadd(&["experiment", &cfg, "--out", out.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(2), "{body}");
    }
    let cfg = write_config(dir.path(), THEOREM1);
    let o = qadd(&["experiment", &cfg, "--rmax", "0", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!out.join("report.csv").exists());
}

#[test]
fn certify_reports_evidence() {
    // a(0, X) = X^3 + X + 1 is irreducible over F_2
    let o = qadd(&["--q", "2", "--rmax", "3", "certify", "1,1;1;0,1;1"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["verdict"], "EVIDENCE_GAMMA");
    assert_eq!(v["upper_bound_ok"], true);
}

#[test]
fn census_rows_per_prime_divisor() {
    let o = qadd(&["--q", "2", "census", "--n", "4,6"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "q,n,b,count,c2_bound,c3_coset_bound,c4_c8_bound");
    let keys: Vec<String> = lines[1..].iter().map(|l| l.split(',').take(3).collect::<Vec<_>>().join(",")).collect();
    assert_eq!(keys, ["2,4,2", "2,6,2", "2,6,3"]);
}

#[test]
fn delta_and_specfact_and_norms_run() {
    let o = qadd(&["--q", "3", "--rmax", "3", "delta", "1,1;1"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["contained"], true);

    // X^2 + t over F_5: tau = 1 splits, tau = 2 stays irreducible
    let o = qadd(&["--q", "5", "specfact", "0,1;;1"]);
    assert_eq!(stdout(&o), "partition,tau\n2,2\n1 1,1\n");

    let o = qadd(&["--q", "2", "norms", "--u", "0,1", "--r", "3"]);
    assert_eq!(stdout(&o), "r,b,count,all_witnessed\n3,1,6,true\n");
    let o = qadd(&["--q", "3", "norms", "--u", "1,1,1"]);
    assert_eq!(o.status.code(), Some(2));
}
