use serde_json::Value;
use std::process::{Command, Output};

fn k3lat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_k3lat")).args(args).output().expect("binary runs")
}

fn json_lines(o: &Output) -> Vec<Value> {
    String::from_utf8_lossy(&o.stdout).lines().map(|l| serde_json::from_str(l).expect("one JSON object per line")).collect()
}

#[test]
fn single_check_passes_with_exit_zero() {
    let o = k3lat(&["verify", "--check", "glue-lemma", "--params", "n=2..5", "--stable"]);
    assert_eq!(o.status.code(), Some(0));
    let r = json_lines(&o);
    assert_eq!(r.len(), 1);
    assert_eq!(r[0]["check_id"], "glue-lemma");
    assert_eq!(r[0]["status"], "pass");
    assert_eq!(r[0]["runtime_ms"], 0);
    for k in ["paper_anchor", "details"] {
        assert!(r[0].get(k).is_some());
    }
}

#[test]
fn stable_output_is_reproducible() {
    let args = ["verify", "--suite", "lattice", "--stable"];
    let (a, b) = (k3lat(&args), k3lat(&args));
    assert_eq!(a.stdout, b.stdout);
    let ids: Vec<String> = json_lines(&a).iter().map(|r| r["check_id"].as_str().unwrap().to_string()).collect();
    assert_eq!(ids, ["disc-forms", "glue-lemma", "property-suite"]);
}

#[test]
fn a_failing_check_gives_exit_one() {
    let o = k3lat(&["verify", "--check", "rank10-ns-equal", "--params", "d=1..2"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(json_lines(&o)[0]["status"], "fail");
}

#[test]
fn unknown_check_and_bad_params_are_errors() {
    let o = k3lat(&["verify", "--check", "no-such-check"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("unknown check id"));
    let o = k3lat(&["verify", "--check", "rank12-equal", "--params", "d=3"]);
    assert_eq!(o.status.code(), Some(2));
    let o = k3lat(&["verify", "--check", "rank12-equal", "--params", "e=x"]);
    assert_eq!(o.status.code(), Some(2));
    let o = k3lat(&["verify", "--suite", "order5"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn out_file_receives_the_reports() {
    let dir = std::env::temp_dir().join(format!("k3lat-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("r.jsonl");
    let o = k3lat(&["verify", "--check", "matrix-M", "--stable", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    let v: Value = serde_json::from_str(text.trim()).unwrap();
    assert_eq!(v["check_id"], "matrix-M");
    std::fs::remove_dir_all(dir).ok();
}

fn pretty(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("JSON report")
}

#[test]
fn lattice_info() {
    let o = k3lat(&["lattice", "info", "A3"]);
    assert_eq!(o.status.code(), Some(0));
    let v = pretty(&o);
    assert_eq!(v["check"], "lattice-info");
    assert_eq!(v["details"]["det"], "-4");
    assert_eq!(v["details"]["root_type"], "A3");
    assert_eq!(v["details"]["discriminant_group"], serde_json::json!(["4"]));

    let o = k3lat(&["lattice", "info", "N", "--json"]);
    let v = pretty(&o);
    assert_eq!(v["name"], "N");
    assert_eq!(v["even"], true);
    assert_eq!(v["gram"].as_array().unwrap().len(), 8);

    assert_eq!(k3lat(&["lattice", "info", "Nonsense"]).status.code(), Some(2));
}

#[test]
fn weierstrass_with_quotient() {
    let o = k3lat(&["weierstrass", "--a", "1,2,3,-1,1", "--b", "2,-1,0,3,1,0,2,1,1", "--quotient"]);
    assert_eq!(o.status.code(), Some(0));
    let v = pretty(&o);
    assert_eq!(v["details"]["fibres"], "8I2+8I1");
    assert_eq!(v["details"]["quotient"]["fibres_exchange"], true);
}

#[test]
fn quotient_ns_from_an_extras_file() {
    let dir = std::env::temp_dir().join(format!("k3lat-extras-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("extras.json");
    std::fs::write(&path, r#"["t1+t2"]"#).unwrap();
    let o = k3lat(&["quotient-ns", "--extras", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let v = pretty(&o);
    assert_eq!(v["details"]["routes_agree"], true);
    assert_eq!(v["details"]["ns_x"]["rank"], 11);
    std::fs::remove_dir_all(dir).ok();
}

#[test]
fn specialize_builtin_chain() {
    let o = k3lat(&["specialize", "--chain", "order2"]);
    assert_eq!(o.status.code(), Some(0));
    let v = pretty(&o);
    let steps = v["details"]["steps"].as_array().unwrap();
    assert_eq!(steps.len(), 5);
    assert_eq!(steps[4]["fibres"], "I8+3I4+2I2");
}

#[test]
fn gamma_prints_the_matrix() {
    let o = k3lat(&["gamma", "--print-matrix"]);
    assert_eq!(o.status.code(), Some(0));
    let v = pretty(&o);
    assert_eq!(v["details"]["matrix"].as_array().unwrap().len(), 12);
}

#[test]
fn order3_rejects_order2_ids() {
    assert_eq!(k3lat(&["order3", "--check", "matrix-M"]).status.code(), Some(2));
    let o = k3lat(&["order3", "--check", "order3-suite", "--stable"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json_lines(&o)[0]["check_id"], "order3-suite");
}
