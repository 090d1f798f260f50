use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn sosfield(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sosfield"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn path(dir: &TempDir, name: &str) -> String {
    dir.path().join(name).to_str().unwrap().to_owned()
}

fn json(p: &str) -> Value {
    serde_json::from_str(&std::fs::read_to_string(Path::new(p)).unwrap()).unwrap()
}

fn write_ideal(dir: &TempDir, r: usize, s: usize, n: usize) -> String {
    let p = path(dir, &format!("ideal_{r}{s}{n}.json"));
    let out = sosfield(&["ideal", "--r", &r.to_string(), "--s", &s.to_string(), "--n", &n.to_string(), "--out", &p]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    p
}

#[test]
fn ideal_file_layout() {
    let dir = TempDir::new().unwrap();
    let p = write_ideal(&dir, 1, 1, 1);
    let text = std::fs::read_to_string(&p).unwrap();
    assert!(text.ends_with('\n'));
    let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    assert_eq!(
        compact,
        r#"{"format":1,"kind":"ideal","type":{"r":1,"s":1,"n":1},"field":{"kind":"q"},"vars":1,"var_names":["x1_1_1"],"generators":[{"vars":1,"terms":[{"c":"1","e":[2]},{"c":"-1","e":[0]}]}]}"#
    );
}

#[test]
fn ideal_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let a = write_ideal(&dir, 2, 3, 2);
    let b = path(&dir, "again.json");
    assert_eq!(code(&sosfield(&["ideal", "--r", "2", "--s", "3", "--n", "2", "--out", &b])), 0);
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let v = json(&a);
    assert_eq!(v["vars"], 12);
    assert_eq!(v["generators"].as_array().unwrap().len(), 18);
}

#[test]
fn ideal_rejects_zero_dimension() {
    let out = sosfield(&["ideal", "--r", "0", "--s", "1", "--n", "1"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn groebner_exit_codes() {
    let dir = TempDir::new().unwrap();
    let proper = write_ideal(&dir, 2, 2, 2);
    let unit = write_ideal(&dir, 2, 2, 1);
    let basis = path(&dir, "basis.json");
    assert_eq!(code(&sosfield(&["groebner", "--input", &proper, "--out", &basis])), 0);
    let v = json(&basis);
    assert_eq!(v["kind"], "groebner");
    assert_eq!(v["proper"], true);
    assert_eq!(code(&sosfield(&["groebner", "--input", &unit])), 3);
    assert_eq!(code(&sosfield(&["groebner", "--input", &unit, "--p", "7"])), 3);
    assert_eq!(code(&sosfield(&["groebner", "--input", &proper, "--field", "fp", "--p", "101"])), 0);
}

#[test]
fn groebner_rejects_characteristic_two() {
    let dir = TempDir::new().unwrap();
    let ideal = write_ideal(&dir, 1, 2, 2);
    assert_eq!(code(&sosfield(&["groebner", "--input", &ideal, "--p", "2"])), 2);
}

#[test]
fn groebner_resource_cap_is_undecided() {
    let dir = TempDir::new().unwrap();
    let ideal = write_ideal(&dir, 2, 2, 2);
    assert_eq!(code(&sosfield(&["groebner", "--input", &ideal, "--max-pairs", "1"])), 4);
}

#[test]
fn groebner_trace_feeds_bounds_check() {
    let dir = TempDir::new().unwrap();
    let ideal = write_ideal(&dir, 2, 2, 2);
    let trace = path(&dir, "trace.json");
    assert_eq!(code(&sosfield(&["groebner", "--input", &ideal, "--trace", &trace])), 0);
    let t = json(&trace);
    assert_eq!(t["kind"], "trace");
    let report = path(&dir, "bounds.json");
    let out = sosfield(&["bounds", "--input", &ideal, "--trace", &trace, "--out", &report]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(json(&report)["trace_check"]["within_bound"], true);
}

#[test]
fn bounds_report_values() {
    let dir = TempDir::new().unwrap();
    let report = path(&dir, "b.json");
    assert_eq!(code(&sosfield(&["bounds", "--r", "1", "--s", "1", "--n", "1", "--out", &report])), 0);
    let v = json(&report);
    assert_eq!(v["dube_degree"]["payload"], "8");
    assert_eq!(v["q"]["payload"], "17");
    assert_eq!(v["step_bound"]["payload"], "9");
    assert_eq!(v["charp_threshold"]["tier"], "log2-exact");
    assert_eq!(v["field_degree"]["payload"], "578");
}

#[test]
fn bounds_modes_differ() {
    let dir = TempDir::new().unwrap();
    let a = path(&dir, "a.json");
    let b = path(&dir, "b.json");
    assert_eq!(code(&sosfield(&["bounds", "--r", "1", "--s", "1", "--n", "2", "--out", &a])), 0);
    assert_eq!(
        code(&sosfield(&["bounds", "--r", "1", "--s", "1", "--n", "2", "--mode", "dube-consistent", "--out", &b])),
        0
    );
    assert_eq!(json(&a)["mode"], "as-stated");
    assert_eq!(json(&b)["mode"], "dube-consistent");
}

#[test]
fn search_exit_codes_and_counts() {
    let dir = TempDir::new().unwrap();
    let out = path(&dir, "s.json");
    assert_eq!(
        code(&sosfield(&["search", "--r", "2", "--s", "2", "--n", "2", "--p", "5", "--emit", "all", "--out", &out])),
        0
    );
    let v = json(&out);
    assert_eq!(v["status"], "found");
    assert_eq!(v["count"], "16");
    assert_eq!(v["formulas"].as_array().unwrap().len(), 16);
    assert_eq!(code(&sosfield(&["search", "--r", "2", "--s", "2", "--n", "1", "--p", "5"])), 3);
    assert_eq!(
        code(&sosfield(&["search", "--r", "2", "--s", "2", "--n", "2", "--p", "5", "--node-budget", "2"])),
        4
    );
}

#[test]
fn search_strategies_and_parallel_agree() {
    let dir = TempDir::new().unwrap();
    let run = |name: &str, extra: &[&str]| {
        let p = path(&dir, name);
        let mut args = vec!["search", "--r", "2", "--s", "2", "--n", "2", "--p", "3", "--emit", "all", "--out", &p];
        args.extend_from_slice(extra);
        assert_eq!(code(&sosfield(&args)), 0);
        json(&p)["formulas"].clone()
    };
    let bt = run("bt.json", &[]);
    assert_eq!(bt, run("naive.json", &["--strategy", "naive"]));
    assert_eq!(bt, run("par.json", &["--parallel", "--threads", "2"]));
}

#[test]
fn catalog_and_verify() {
    let dir = TempDir::new().unwrap();
    for n in ["1", "2", "4", "8"] {
        let f = path(&dir, &format!("c{n}.json"));
        assert_eq!(code(&sosfield(&["catalog", "--n", n, "--out", &f])), 0);
        assert_eq!(code(&sosfield(&["verify", "--formula", &f])), 0);
        assert_eq!(code(&sosfield(&["verify", "--formula", &f, "--p", "7"])), 0);
    }
    assert_eq!(code(&sosfield(&["catalog", "--n", "3"])), 2);
}

#[test]
fn verify_rejects_perturbed_formula() {
    let dir = TempDir::new().unwrap();
    let f = path(&dir, "c2.json");
    assert_eq!(code(&sosfield(&["catalog", "--n", "2", "--out", &f])), 0);
    let mut v = json(&f);
    v["alpha"][0][0][0] = Value::String("2".into());
    std::fs::write(&f, serde_json::to_string(&v).unwrap()).unwrap();
    assert_eq!(code(&sosfield(&["verify", "--formula", &f])), 3);
}

#[test]
fn verify_malformed_input() {
    let dir = TempDir::new().unwrap();
    let f = path(&dir, "bad.json");
    std::fs::write(&f, "{").unwrap();
    assert_eq!(code(&sosfield(&["verify", "--formula", &f])), 2);
    std::fs::write(&f, r#"{"format":2,"kind":"formula"}"#).unwrap();
    assert_eq!(code(&sosfield(&["verify", "--formula", &f])), 2);
}

#[test]
fn zeta_of_circle() {
    let dir = TempDir::new().unwrap();
    let ideal = write_ideal(&dir, 1, 1, 2);
    let out = path(&dir, "z.json");
    let counts = path(&dir, "c.json");
    let res = sosfield(&[
        "zeta", "--input", &ideal, "--p", "5", "--kmax", "3", "--d1", "1", "--d2", "1", "--counts-out", &counts, "--out", &out,
    ]);
    assert_eq!(code(&res), 0, "{}", String::from_utf8_lossy(&res.stderr));
    let z = json(&out);
    assert_eq!(z["r1"], serde_json::json!(["1", "-1"]));
    assert_eq!(z["r2"], serde_json::json!(["1", "-5"]));
    assert_eq!(json(&counts)["counts"], serde_json::json!(["4", "24", "124"]));

    let again = path(&dir, "z2.json");
    assert_eq!(code(&sosfield(&["zeta", "--counts", &counts, "--d1", "1", "--d2", "1", "--out", &again])), 0);
    assert_eq!(json(&again)["r1"], z["r1"]);
}

#[test]
fn zeta_failures() {
    let dir = TempDir::new().unwrap();
    let ideal = write_ideal(&dir, 1, 1, 2);
    assert_eq!(code(&sosfield(&["zeta", "--input", &ideal, "--p", "5", "--kmax", "1", "--d1", "1", "--d2", "1"])), 2);
    let counts = path(&dir, "c.json");
    std::fs::write(&counts, r#"{"format":1,"kind":"counts","p":"5","kmax":3,"counts":["4","23","124"]}"#).unwrap();
    assert_eq!(code(&sosfield(&["zeta", "--counts", &counts, "--d1", "1", "--d2", "1"])), 5);
}

#[test]
fn documented_examples() {
    let dir = TempDir::new().unwrap();
    let i121 = write_ideal(&dir, 1, 2, 1);
    let v = json(&i121);
    assert_eq!(v["vars"], 2);
    assert_eq!(v["generators"].as_array().unwrap().len(), 3);
    assert_eq!(code(&sosfield(&["groebner", "--input", &i121])), 3);
    let i111 = write_ideal(&dir, 1, 1, 1);
    assert_eq!(code(&sosfield(&["groebner", "--input", &i111])), 0);

    let out = path(&dir, "z.json");
    let res = sosfield(&["zeta", "--input", &i111, "--p", "5", "--kmax", "4", "--d1", "0", "--d2", "2", "--out", &out]);
    assert_eq!(code(&res), 0);
    assert_eq!(json(&out)["r1"], serde_json::json!(["1"]));
    assert_eq!(json(&out)["r2"], serde_json::json!(["1", "-2", "1"]));

    let zeros = path(&dir, "zeros.json");
    std::fs::write(&zeros, r#"{"format":1,"kind":"counts","p":"5","kmax":3,"counts":["0","0","0"]}"#).unwrap();
    assert_eq!(code(&sosfield(&["zeta", "--counts", &zeros, "--d1", "1", "--d2", "1", "--out", &out])), 0);
    assert_eq!(json(&out)["r1"], serde_json::json!(["1"]));
    assert_eq!(json(&out)["r2"], serde_json::json!(["1"]));

    let s = path(&dir, "s.json");
    assert_eq!(code(&sosfield(&["search", "--r", "1", "--s", "1", "--n", "1", "--p", "5", "--emit", "count", "--out", &s])), 0);
    assert_eq!(json(&s)["count"], "2");
    assert_eq!(code(&sosfield(&["search", "--r", "1", "--s", "2", "--n", "1", "--p", "3"])), 3);
    assert_eq!(code(&sosfield(&["search", "--r", "2", "--s", "2", "--n", "2", "--p", "3"])), 0);
    assert_eq!(code(&sosfield(&["search", "--r", "1", "--s", "1", "--n", "1", "--p", "2"])), 2);

    let b = path(&dir, "b.json");
    assert_eq!(code(&sosfield(&["bounds", "--r", "1", "--s", "1", "--n", "3", "--out", &b])), 0);
    assert_eq!(json(&b)["charp_threshold"]["tier"], "loglog2-approx");
    assert_eq!(code(&sosfield(&["bounds", "--r", "2", "--s", "2", "--n", "2", "--out", &b])), 0);
    assert_eq!(json(&b)["field_degree"]["payload"], "678897342629223809287008234242");

    let c4 = path(&dir, "c4.json");
    assert_eq!(code(&sosfield(&["catalog", "--n", "4", "--out", &c4])), 0);
    assert_eq!(code(&sosfield(&["verify", "--formula", &c4, "--p", "11"])), 0);
}
