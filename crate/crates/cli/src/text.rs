//! Plain-text summaries of reports.

use serde_json::Value;

use crate::commands::{Flags, Outcome};

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Number(n) => n.to_string(),
        Value::Object(o) if o.contains_key("coeffs") => {
            let cs: Vec<String> = o["coeffs"].as_array().into_iter().flatten().map(scalar).collect();
            let terms: Vec<String> = cs
                .iter()
                .enumerate()
                .filter(|(_, c)| c.as_str() != "0")
                .map(|(i, c)| match i {
                    0 => c.clone(),
                    1 => format!("{c}·a"),
                    _ => format!("{c}·a^{i}"),
                })
                .collect();
            if terms.is_empty() {
                "0".into()
            } else {
                terms.join(" + ")
            }
        }
        Value::Object(o) if o.contains_key("terms") => {
            let ts: Vec<String> = o["terms"]
                .as_array()
                .into_iter()
                .flatten()
                .map(|t| {
                    let vars: Vec<String> = t["monomial"]
                        .as_array()
                        .into_iter()
                        .flatten()
                        .map(|p| format!("θ{}_{}", p[0], p[1]))
                        .collect();
                    format!("{}·{}", scalar(&t["coeff"]), vars.join(""))
                })
                .collect();
            if ts.is_empty() {
                "0".into()
            } else {
                ts.join(" + ")
            }
        }
        other => other.to_string(),
    }
}

fn range_lines(out: &mut Vec<String>, prefix: &str, r: &Value) {
    let labels: Vec<String> = r["labels"].as_array().into_iter().flatten().map(scalar).collect();
    out.push(format!("{prefix}denominator: {}", scalar(&r["denominator"])));
    out.push(format!("{prefix}labels: {}", labels.join(", ")));
    for row in r["basis"].as_array().into_iter().flatten() {
        let cs: Vec<String> = row.as_array().into_iter().flatten().map(scalar).collect();
        out.push(format!("{prefix}  [{}]", cs.join(" ")));
    }
}

fn yes_no(v: &Value) -> &'static str {
    if v.as_bool() == Some(true) {
        "yes"
    } else {
        "no"
    }
}

pub fn summary(command: &str, outcome: &Outcome, flags: &Flags) -> String {
    let mut out = vec![format!("{command}: {}", outcome.status.as_str())];
    if let Some((code, message)) = &outcome.error {
        out.push(format!("error {code}: {message}"));
    }
    let p = &outcome.payload;
    if let Some(bound) = p.get("bound").and_then(Value::as_object) {
        for (k, v) in bound {
            out.push(format!("search exhausted at {k} = {v}"));
        }
    }
    match command {
        "pfaffian" => {
            if let Some(v) = p.get("value") {
                match p.get("index") {
                    Some(i) => out.push(format!("pf[{}] = {}", i.as_str().unwrap_or(""), scalar(v))),
                    None => out.push(format!("pf = {}", scalar(v))),
                }
            }
        }
        "minors" => {
            for m in p["minors"].as_array().into_iter().flatten() {
                out.push(format!("pf[{}] = {}", m["index"].as_str().unwrap_or(""), scalar(&m["value"])));
            }
        }
        "find-t" => {
            if let Some(t) = p.get("t") {
                out.push(format!("t = {t} (verified: {})", yes_no(&p["verified"])));
            }
        }
        "check-symplectic" => out.push(format!("symplectic: {}", yes_no(&p["symplectic"]))),
        "order" => {
            if let Some(n) = p.get("order") {
                out.push(format!("order: {n}"));
            }
        }
        "freeness" => {
            if let Some(n) = p.get("order") {
                out.push(format!("order: {n}"));
                out.push(format!("free outside the origin: {}", yes_no(&p["free"])));
            }
        }
        "extension-check" => {
            for r in p["results"].as_array().into_iter().flatten() {
                out.push(format!("{}: {}", r["index"].as_str().unwrap_or(""), yes_no(&r["admitted"])));
            }
        }
        "trace-range" => {
            if p.is_object() {
                range_lines(&mut out, "", p);
            }
        }
        "orbifold-range" => {
            if p.is_object() {
                out.push(format!("order: {}", p["order"]));
                out.push(format!("decided: {}", yes_no(&p["decided"])));
                let admitted: Vec<&str> = p["admitted"].as_array().into_iter().flatten().filter_map(Value::as_str).collect();
                out.push(format!("admitted minors: {}", admitted.join(" / ")));
                out.push("lower bound:".into());
                range_lines(&mut out, "  ", p);
                out.push("upper bound:".into());
                range_lines(&mut out, "  ", &p["upper"]);
            }
        }
        "morita-lambda" => match p.get("lambda") {
            Some(l) => out.push(format!("lambda = {}", scalar(l))),
            None if p.get("result").and_then(Value::as_str) == Some("not_found") => {
                out.push("no lambda: the ranges have different ranks".into())
            }
            None => {}
        },
        "gl2-orbit" => {
            if let Some(eq) = p.get("equal") {
                out.push(format!("same GL(2,Z) orbit: {}", yes_no(eq)));
            }
        }
        "verify-module" => {
            if let Some(kind) = p.get("metaplectic").and_then(Value::as_str) {
                out.push(format!("metaplectic operator: {kind}"));
            }
            for t in p["tests"].as_array().into_iter().flatten() {
                out.push(format!(
                    "{:<14} residual {:.3e}  tolerance {:.1e}  {}",
                    t["kind"].as_str().unwrap_or(""),
                    t["residual"].as_f64().unwrap_or(f64::NAN),
                    t["tolerance"].as_f64().unwrap_or(flags.tolerance),
                    if t["pass"].as_bool() == Some(true) { "pass" } else { "FAIL" }
                ));
            }
        }
        _ => {}
    }
    out.join("\n")
}
