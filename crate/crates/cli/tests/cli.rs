use std::process::{Command, Output};

use serde_json::Value;

fn fourgeo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fourgeo")).args(args).output().expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = fourgeo(args);
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn json(args: &[&str]) -> Value {
    serde_json::from_str(&stdout(args)).expect("valid json")
}

fn schema() -> Value {
    let text = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/../../docs/schema.json")).unwrap();
    serde_json::from_str(&text).unwrap()
}

fn is_rational(s: &str) -> bool {
    let body = s.strip_prefix('-').unwrap_or(s);
    let mut parts = body.split('/');
    let num = parts.next().unwrap_or("");
    let den = parts.next();
    parts.next().is_none()
        && !num.is_empty()
        && num.bytes().all(|b| b.is_ascii_digit())
        && den.is_none_or(|d| !d.is_empty() && d.bytes().all(|b| b.is_ascii_digit()))
}

/// The subset of JSON Schema used by docs/schema.json.
fn validate(root: &Value, schema: &Value, v: &Value, path: &str) -> Result<(), String> {
    if let Some(r) = schema.get("$ref").and_then(Value::as_str) {
        let name = r.trim_start_matches("#/$defs/");
        return validate(root, &root["$defs"][name], v, path);
    }
    if let Some(all) = schema.get("allOf").and_then(Value::as_array) {
        for s in all {
            validate(root, s, v, path)?;
        }
    }
    if let Some(t) = schema.get("type") {
        let types: Vec<&str> = match t {
            Value::String(s) => vec![s.as_str()],
            Value::Array(a) => a.iter().filter_map(Value::as_str).collect(),
            _ => vec![],
        };
        let ok = types.iter().any(|t| match *t {
            "object" => v.is_object(),
            "array" => v.is_array(),
            "string" => v.is_string(),
            "integer" => v.is_i64() || v.is_u64(),
            "boolean" => v.is_boolean(),
            "null" => v.is_null(),
            _ => false,
        });
        if !ok {
            return Err(format!("{path}: expected {types:?}, got {v}"));
        }
    }
    if let Some(e) = schema.get("enum").and_then(Value::as_array) {
        if !e.contains(v) {
            return Err(format!("{path}: {v} not in {e:?}"));
        }
    }
    if let (Some(min), Some(x)) = (schema.get("minimum").and_then(Value::as_i64), v.as_i64()) {
        if x < min {
            return Err(format!("{path}: {x} < {min}"));
        }
    }
    if schema.get("pattern").is_some() {
        if let Some(s) = v.as_str() {
            if !is_rational(s) {
                return Err(format!("{path}: `{s}` is not a rational"));
            }
        }
    }
    if let Some(obj) = v.as_object() {
        if let Some(req) = schema.get("required").and_then(Value::as_array) {
            for k in req.iter().filter_map(Value::as_str) {
                if !obj.contains_key(k) {
                    return Err(format!("{path}: missing `{k}`"));
                }
            }
        }
        if let Some(props) = schema.get("properties").and_then(Value::as_object) {
            for (k, s) in props {
                if let Some(x) = obj.get(k) {
                    validate(root, s, x, &format!("{path}.{k}"))?;
                }
            }
        }
    }
    if let (Some(items), Some(arr)) = (schema.get("items"), v.as_array()) {
        for (i, x) in arr.iter().enumerate() {
            validate(root, items, x, &format!("{path}[{i}]"))?;
        }
    }
    Ok(())
}

fn check_schema(def: &str, v: &Value) {
    let root = schema();
    validate(&root, &root["$defs"][def], v, "$").unwrap_or_else(|e| panic!("{def}: {e}"));
}

#[test]
fn bounds_for_z2_presentation() {
    let out = stdout(&["bounds", "<x,y|[x,y]>", "--target=chi"]);
    assert!(out.contains("lower:  0   upper: 0   exact: yes"), "{out}");
    assert!(out.contains("S2xT2"));
    let j = json(&["bounds", "<x,y|[x,y]>", "--format", "json"]);
    assert_eq!((j["lower"].as_i64(), j["upper"].as_i64()), (Some(0), Some(0)));
    check_schema("bounds_document", &j);
}

#[test]
fn bounds_for_families() {
    let j = json(&["bounds", "zn:6", "--target", "chi+sigma", "--format", "json"]);
    assert_eq!((j["lower"].as_i64(), j["upper"].as_i64()), (Some(0), Some(4)));
    assert_eq!(j["congruence"]["modulus"], 4);
    check_schema("bounds_document", &j);
    let j = json(&["bounds", "cyclic:5", "--format", "json"]);
    assert_eq!((j["lower"].as_i64(), j["upper"].as_i64()), (Some(3), Some(10)));
    let j = json(&["bounds", "gpf:2,4,inf", "--format", "json"]);
    assert_eq!((j["lower"].as_i64(), j["upper"].as_i64()), (Some(2), Some(12)));
}

#[test]
fn bmy_and_corvague_flags() {
    let j = json(&["bounds", "free:9", "--assume-bmy", "--format", "json"]);
    let statuses: Vec<&str> = j["contributions"].as_array().unwrap().iter().map(|c| c["status"].as_str().unwrap()).collect();
    assert!(statuses.contains(&"conjectural"));
    let out = fourgeo(&["bounds", "<x,y|x y>", "--corvague", "6,6"]);
    assert_eq!(out.status.code(), Some(2));
    let j = json(&["bounds", "<x,y|x y>", "--corvague", "6,6", "--hypothetical", "--format", "json"]);
    let hyp = j["contributions"].as_array().unwrap().iter().find(|c| c["status"] == "hypothetical").unwrap();
    assert_eq!(hyp["value"], 24);
}

#[test]
fn construct_cyclic_presentation() {
    let j = json(&["construct", "<a|a^5>"]);
    assert_eq!(j["final"]["chi"], 36);
    assert_eq!(j["final"]["sigma"], -24);
    assert_eq!(j["pi1_check"]["matches"], true);
    assert_eq!(j["format_version"], 1);
    check_schema("construct_document", &j);
    for input in ["odd_rank:3", "z3", "twist:2", "cyclic_monodromy:7", "stipsicz:2", "atom:K3"] {
        check_schema("construct_document", &json(&["construct", input]));
    }
    let j = json(&["construct", "odd_rank:3"]);
    assert_eq!((j["final"]["chi"].as_i64(), j["final"]["sigma"].as_i64()), (Some(18), Some(-10)));
}

#[test]
fn abelianize_outputs() {
    assert_eq!(stdout(&["abelianize", "<a,b|a^2 b^-4, a^6>"]).trim(), "Z/2 + Z/12");
    let j = json(&["abelianize", "<a,b|a^2,b^4>", "--format", "json", "--simplify"]);
    assert_eq!(j["abelianization"]["torsion"], serde_json::json!([2, 4]));
    check_schema("abelianize_document", &j);
}

#[test]
fn geography_csv_matches_samples() {
    let out = stdout(&["geography", "--class=minimal_trivial", "--format=csv", "--samples=11", "--from=-1", "--to=3/2"]);
    assert!(out.starts_with("# format_version=1\n"));
    let rows: Vec<&str> = out.lines().filter(|l| !l.starts_with('#')).skip(1).collect();
    assert_eq!(rows.len(), 11);
    let at1: Vec<&str> = rows.iter().find(|r| r.starts_with("1,")).unwrap().split(',').collect();
    assert_eq!(at1[1], "4");
    for n in [1, 2, 37] {
        let s = n.to_string();
        let out = stdout(&["geography", "--class", "smooth_trivial", "--format", "csv", "--samples", &s]);
        assert_eq!(out.lines().filter(|l| !l.starts_with('#')).count(), n + 1);
    }
}

#[test]
fn geography_json_and_witnesses() {
    let j = json(&["geography", "--witness", "CP2", "--witness", "E1", "--from", "-1", "--to", "3/2", "--format", "json"]);
    let f = &j["functions"][0]["function"];
    assert_eq!(f["breakpoints"], serde_json::json!(["1"]));
    check_schema("geography_functions_document", &j);
    check_schema("geography_functions_document", &json(&["geography", "--format", "json"]));
    let j = json(&["geography", "--witness", "A=6,-2", "--witness", "B=6,2", "--format", "json"]);
    assert_eq!(j["functions"][0]["function"]["breakpoints"], serde_json::json!(["0"]));
    let j = json(&["geography", "--sequence", "mk", "--a", "-1", "--b", "-2", "--format", "json"]);
    assert_eq!(j["bounded"], true);
    check_schema("geography_sequence_document", &j);
    let j = json(&["geography", "--move", "blow_up", "--move", "k3", "--format", "json"]);
    assert_eq!(j["constraints"][0]["constraint"], "a >= b");
    check_schema("geography_constraints_document", &j);
}

#[test]
fn geography_svg_three_panels() {
    let svg = stdout(&["geography", "--format", "svg"]);
    assert!(svg.starts_with("<svg"));
    assert_eq!(svg.matches("<g>").count(), 3);
    assert!(svg.contains("data-format-version=\"1\""));
}

#[test]
fn table_formats() {
    let out = stdout(&["table", "zn", "--from", "1", "--to", "8"]);
    assert!(out.lines().any(|l| l.starts_with("6 ") && l.contains("Sym2(3)")));
    let j = json(&["table", "cyclic", "--from", "2", "--to", "12", "--format", "json"]);
    assert_eq!(j["reports"].as_array().unwrap().len(), 11);
    check_schema("table_document", &j);
    let csv = stdout(&["table", "free", "--from", "1", "--to", "5", "--format", "csv", "--sequential"]);
    assert_eq!(csv.lines().count(), 2 + 5);
    assert_eq!(stdout(&["table", "free", "--from", "1", "--to", "5", "--format", "csv"]), csv);
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        vec!["bounds", "<x|"],
        vec!["bounds", "nope:3"],
        vec!["bounds", "zn:6", "--format", "svg"],
        vec!["abelianize", "<x|y>"],
        vec!["geography", "--class", "bogus"],
        vec!["geography", "--sequence", "unregistered", "--a", "1", "--b", "1"],
        vec!["geography", "--format", "csv"],
        vec!["construct", "frobnicate"],
        vec!["frobnicate"],
        vec![],
    ] {
        let out = fourgeo(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty(), "{args:?}");
        assert!(out.stdout.is_empty(), "{args:?}");
    }
}

#[test]
fn output_is_deterministic() {
    for args in [
        vec!["bounds", "zn:7", "--format", "json"],
        vec!["construct", "<a,b|a b a^-1 b^-2>"],
        vec!["geography", "--format", "svg"],
        vec!["table", "cyclic", "--from", "2", "--to", "30"],
    ] {
        assert_eq!(stdout(&args), stdout(&args), "{args:?}");
    }
}
