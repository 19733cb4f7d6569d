use std::io::Write;
use std::process::{Command, Output};

use serde_json::{json, Value};

fn hv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hv"))
        .args(args)
        .output()
        .expect("hv runs")
}

fn json_out(args: &[&str]) -> Value {
    let out = hv(args);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("json on stdout")
}

fn temp_json(text: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(text.as_bytes()).unwrap();
    f
}

#[test]
fn bracket_of_opposite_modes() {
    assert_eq!(
        json_out(&["bracket", "x[2]", "x[-2]"]),
        json!({"result": [["x[0]", "-4/1"], ["CD", "1/2"]]})
    );
    assert_eq!(json_out(&["bracket", "I[1]", "I[2]"]), json!({"result": []}));
}

#[test]
fn reducibility() {
    assert_eq!(
        json_out(&["reducible", "--alpha", "0", "--beta", "1", "--F", "0"]),
        json!({"reducible": true})
    );
    assert_eq!(
        json_out(&["reducible", "--alpha", "1/2", "--beta", "1", "--F", "0"]),
        json!({"reducible": false})
    );
    assert_eq!(
        json_out(&["reducible", "--alpha", "-2", "--beta", "0", "--F", "0"]),
        json!({"reducible": true})
    );
}

#[test]
fn classify_reports_families() {
    let v = json_out(&["classify", "--alpha", "1/4", "--beta", "0", "--window", "6"]);
    let kinds: Vec<&str> = v["families"]
        .as_array()
        .unwrap()
        .iter()
        .map(|f| f["kind"].as_str().unwrap())
        .collect();
    assert_eq!(kinds, ["Constant", "RescaledBeta0"]);
    assert_eq!(v["families"][0]["cI"], "0/1");
    assert_eq!(v["alpha"], "1/4");
    assert_eq!(v["window"], 6);
}

#[test]
fn verma_reports() {
    assert_eq!(
        json_out(&["verma-dims", "--max", "6"]),
        json!({"dims": [1, 2, 5, 10, 20, 36, 65]})
    );
    let csv = hv(&["verma-dims", "--max", "2", "--format", "csv"]);
    assert_eq!(String::from_utf8(csv.stdout).unwrap(), "depth,dim\n0,1\n1,2\n2,5\n");
    let v = json_out(&["verma-singular", "--hw", "0,0,0,0,0", "--depth", "1"]);
    assert_eq!(v["dim"], 2);
    assert_eq!(v["hw"], json!(["0/1", "0/1", "0/1", "0/1", "0/1"]));
    let v = json_out(&["verma-singular", "--hw", "1,1,0,0,0", "--depth", "1"]);
    assert_eq!(v["dim"], 0);
    let v = json_out(&["verma-singular", "--hw", "-3/2,0,0,0,0", "--depth", "1"]);
    assert_eq!(v["vectors"], json!([[["I[-1]", "1/1"]]]));
}

#[test]
fn module_table_and_torsion() {
    let spec = temp_json(r#"{"family": "V", "alpha": "1/2", "beta": "1", "F": "3"}"#);
    let path = spec.path().to_str().unwrap();
    let v = json_out(&["module-table", "--spec", path, "--window", "2"]);
    let x1 = v["actions"]
        .as_array()
        .unwrap()
        .iter()
        .find(|a| a["generator"] == "x[1]" && a["index"] == 0)
        .unwrap();
    assert_eq!(x1["block"], json!([["3/2"]]));
    let csv = hv(&["module-table", "--spec", path, "--window", "1", "--format", "csv"]);
    let text = String::from_utf8(csv.stdout).unwrap();
    assert!(text.starts_with("generator,index,target,row,col,value\n"));
    assert!(text.contains("I[1],0,1,0,0,3/1"));
    let t = json_out(&["torsion", "--spec", path, "--j", "1", "--window", "4"]);
    assert!(t["torsion"].as_array().unwrap().iter().all(|r| r["dim"] == 0));
    assert_eq!(t["shape"], "UniformlyBounded(1)");
}

#[test]
fn sweep_keeps_input_order() {
    let grid = temp_json(r#"[{"alpha": "1/3", "beta": "2"}, {"alpha": "1/4", "beta": "1"}]"#);
    let out = Command::new(env!("CARGO_BIN_EXE_hv"))
        .args(["sweep", "--grid", grid.path().to_str().unwrap()])
        .env("HV_THREADS", "2")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let lines: Vec<Value> = String::from_utf8(out.stdout)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[0]["index"], 0);
    assert_eq!(lines[1]["families"][1]["kind"], "RescaledBeta1");
}

#[test]
fn axiom_check_passes() {
    let v = json_out(&["check-axioms", "--window", "2"]);
    assert_eq!(v["holds"], true);
}

#[test]
fn input_errors_exit_with_two() {
    assert_eq!(
        hv(&["classify", "--alpha", "1/0", "--beta", "0"]).status.code(),
        Some(2)
    );
    assert_eq!(
        hv(&["classify", "--alpha", "1/3", "--beta", "0", "--window", "3"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(hv(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(hv(&["bracket", "x[1]", "y[2]"]).status.code(), Some(2));
    assert_eq!(
        hv(&["torsion", "--spec", "/nonexistent.json", "--j", "1"])
            .status
            .code(),
        Some(2)
    );
    let bad = temp_json(r#"{"family": "ExtA", "alpha": "2"}"#);
    assert_eq!(
        hv(&["torsion", "--spec", bad.path().to_str().unwrap(), "--j", "0"])
            .status
            .code(),
        Some(2)
    );
}
