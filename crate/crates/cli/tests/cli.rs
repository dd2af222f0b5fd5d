use std::path::PathBuf;
use std::process::Command;

use qcell_core::Scalar;
use serde_json::Value;

fn qcell(args: &[&str]) -> (i32, String, String) {
    qcell_env(args, &[])
}

fn qcell_env(args: &[&str], env: &[(&str, &str)]) -> (i32, String, String) {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_qcell"));
    cmd.args(args).env_remove("QCELL_HEIGHT_CAP");
    for (k, v) in env {
        cmd.env(k, v);
    }
    let out = cmd.output().expect("qcell runs");
    (out.status.code().expect("exit code"), String::from_utf8(out.stdout).unwrap(), String::from_utf8(out.stderr).unwrap())
}

fn json_of(args: &[&str]) -> Value {
    let (code, out, err) = qcell(args);
    assert_eq!(code, 0, "{args:?}: {err}");
    serde_json::from_str(&out).expect("valid json")
}

fn schema(name: &str) -> Value {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../schemas").join(format!("{name}.v1.json"));
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

/// Checks required keys, primitive types and constants, following `$ref` into sibling files.
fn conforms(v: &Value, s: &Value, at: &str) {
    if let Some(r) = s.get("$ref").and_then(Value::as_str) {
        let name = r.trim_start_matches("qcell.").trim_end_matches("/v1");
        return conforms(v, &schema(name), at);
    }
    if let Some(c) = s.get("const") {
        assert_eq!(v, c, "{at}");
    }
    match s.get("type").and_then(Value::as_str) {
        Some("object") => {
            let obj = v.as_object().unwrap_or_else(|| panic!("{at}: expected an object"));
            for key in s["required"].as_array().into_iter().flatten() {
                assert!(obj.contains_key(key.as_str().unwrap()), "{at}: missing {key}");
            }
            if let Some(props) = s.get("properties").and_then(Value::as_object) {
                for (k, sub) in props {
                    if let Some(x) = obj.get(k) {
                        conforms(x, sub, &format!("{at}.{k}"));
                    }
                }
            }
        }
        Some("array") => {
            let items = v.as_array().unwrap_or_else(|| panic!("{at}: expected an array"));
            if let Some(sub) = s.get("items") {
                for (k, x) in items.iter().enumerate() {
                    conforms(x, sub, &format!("{at}[{k}]"));
                }
            }
        }
        Some("integer") => assert!(v.is_i64() || v.is_u64(), "{at}: expected an integer"),
        Some("string") => assert!(v.is_string(), "{at}: expected a string"),
        Some("boolean") => assert!(v.is_boolean(), "{at}: expected a boolean"),
        _ => {}
    }
}

#[test]
fn basis_table() {
    let v = json_of(&["basis", "--type", "A2", "--word", "1,2,1", "--height", "4", "--format", "json"]);
    conforms(&v, &schema("basis"), "basis");
    let rows = v["rows"].as_array().unwrap();
    // Kostant partition counts of A2 summed over heights 0..=4
    assert_eq!(rows.len(), 1 + 2 + 4 + 6 + 9);
    let f1 = rows.iter().find(|r| r["label"] == serde_json::json!([1, 0, 0])).unwrap();
    assert_eq!(f1["weight"], serde_json::json!([-1, 0]));
    assert_eq!(f1["epsilon"], serde_json::json!([1, 0]));
    assert_eq!(f1["epsilon_star"], serde_json::json!([1, 0]));
}

#[test]
fn period_of_f1_in_b2() {
    let (code, out, _) = qcell(&["period", "--type", "B2", "--element", "f1", "--n", "6"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().next(), Some("identity: true"));
}

#[test]
fn double_mutation_echoes_the_seed() {
    let seed = json_of(&["seed", "--type", "A2", "--word", "1,2,1", "--format", "json"]);
    let back = json_of(&["mutate", "--type", "A2", "--word", "1,2,1", "--path", "1,1", "--format", "json"]);
    conforms(&seed, &schema("seed"), "seed");
    conforms(&back, &schema("mutate"), "mutate");
    for key in ["labels", "lambda", "exchange", "d", "convention", "expressions", "realizations"] {
        assert_eq!(seed[key], back[key], "{key}");
    }
    let once = json_of(&["mutate", "--type", "A2", "--word", "1,2,1", "--path", "1", "--format", "json"]);
    assert_ne!(once["exchange"], seed["exchange"]);
}

#[test]
fn seed_files_round_trip() {
    let seed = json_of(&["seed", "--type", "A3", "--word", "1,2,1,3,2,1", "--format", "json"]);
    let dir = std::env::temp_dir().join(format!("qcell-seed-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("seed.json");
    let file = serde_json::json!({ "lambda": seed["lambda"], "exchange": seed["exchange"], "labels": seed["labels"], "path": [2, 3, 2] });
    conforms(&file, &schema("seed-file"), "seed-file");
    std::fs::write(&path, file.to_string()).unwrap();
    let out = json_of(&["mutate", "--type", "A3", "--file", path.to_str().unwrap(), "--format", "json"]);
    assert_eq!(out["path"], serde_json::json!([2, 3, 2]));
    let back = json_of(&["mutate", "--type", "A3", "--file", path.to_str().unwrap(), "--path", "2,2", "--format", "json"]);
    assert_eq!(back["exchange"], seed["exchange"]);
    assert_eq!(back["labels"], seed["labels"]);
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn twist_minor_and_pair_outputs() {
    let t = json_of(&["twist", "--type", "A2", "--element", "f1*f2", "--lambda", "1,0", "--format", "json"]);
    conforms(&t, &schema("twist"), "twist");
    assert_eq!(t["pattern"], serde_json::json!([1, 2, 1]));
    let m = json_of(&["minor", "--type", "A2", "--lambda", "1,0", "--left", "1", "--format", "json"]);
    conforms(&m, &schema("minor"), "minor");
    let terms = m["element"]["terms"].as_array().unwrap();
    assert_eq!(terms.len(), 1);
    assert_eq!(terms[0]["word"], serde_json::json!([1]));
    assert_eq!(Scalar::parse(terms[0]["coeff"].as_str().unwrap()).unwrap(), Scalar::parse("1 - q^2").unwrap());
    let (code, out, _) = qcell(&["pair", "--type", "A2", "--x", "f1", "--y", "f1"]);
    assert_eq!(code, 0);
    assert_eq!(Scalar::parse(out.trim()).unwrap(), Scalar::parse("1/(1 - q^2)").unwrap());
    let p = json_of(&["pair", "--type", "A2", "--x", "f1*f2", "--y", "f2*f1", "--format", "json"]);
    conforms(&p, &schema("pair"), "pair");
}

#[test]
fn identical_invocations_give_identical_bytes() {
    for args in [
        &["basis", "--type", "B2", "--height", "3", "--format", "json"][..],
        &["twist", "--type", "A2", "--element", "f2*f1 - (q)*f1*f2", "--format", "text"],
        &["seed", "--type", "A3", "--word", "1,2,1,3,2,1"],
    ] {
        assert_eq!(qcell(args), qcell(args), "{args:?}");
    }
}

#[test]
fn bad_flags_exit_two_with_usage() {
    for args in [
        &["basis"][..],
        &["basis", "--type", "A2", "--format", "yaml"],
        &["basis", "--type", "A2", "--word", "1,2"],
        &["basis", "--type", "Z7"],
        &["pair", "--type", "A2", "--x", "f3", "--y", "f1"],
        &["mutate", "--type", "A2", "--word", "1,2,1", "--path", "4"],
        &["verify"],
        &["frobnicate"],
    ] {
        let (code, out, err) = qcell(args);
        assert_eq!(code, 2, "{args:?}");
        assert!(out.is_empty());
        assert!(err.contains("--help") || err.contains("Usage"), "{args:?}: {err}");
    }
}

#[test]
fn computation_errors_exit_one_with_structured_error() {
    // quantum seeds are restricted to simply-laced types
    let (code, _, err) = qcell(&["seed", "--type", "B2", "--word", "1,2,1,2"]);
    assert_eq!(code, 1);
    let v: Value = serde_json::from_str(&err).unwrap();
    assert_eq!(v["error"]["kind"], "unsupported");
    let (code, _, err) = qcell(&["pair", "--type", "A2", "--height", "2", "--x", "f1*f2*f1", "--y", "f1*f1*f2"]);
    assert_eq!(code, 1);
    let v: Value = serde_json::from_str(&err).unwrap();
    assert_eq!(v["error"]["kind"], "height_cap");
}

#[test]
fn height_cap_variable_and_flag() {
    let run = |env: &[(&str, &str)], extra: &[&str]| {
        let mut args = vec!["basis", "--type", "A2", "--format", "json"];
        args.extend(extra);
        let (code, out, _) = qcell_env(&args, env);
        assert_eq!(code, 0);
        serde_json::from_str::<Value>(&out).unwrap()["height"].as_i64().unwrap()
    };
    assert_eq!(run(&[], &[]), 4);
    assert_eq!(run(&[("QCELL_HEIGHT_CAP", "2")], &[]), 2);
    assert_eq!(run(&[("QCELL_HEIGHT_CAP", "2")], &["--height", "3"]), 3);
    let (code, _, _) = qcell_env(&["basis", "--type", "A2"], &[("QCELL_HEIGHT_CAP", "many")]);
    assert_eq!(code, 2);
}

#[test]
fn verify_single_modules() {
    let v = json_of(&["verify", "--module", "qcluster", "--format", "json"]);
    conforms(&v, &schema("verify"), "verify");
    assert_eq!(v["failed"], 0);
    let (code, out, _) = qcell(&["verify", "--module", "cli"]);
    assert_eq!(code, 0, "{out}");
}
