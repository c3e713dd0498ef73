//! One function per subcommand: JSON document in, payload out.

use std::sync::Arc;

use nctorus::action::{check_theta_symplectic, free_outside_origin, order_of, CyclicAction};
use nctorus::arith::NumberField;
use nctorus::heisenberg::{
    build_geometry, verify_commutation, verify_covariance, verify_inner_compat, verify_unitarity, Grid,
    GridFunction, MetaplecticOp, ModuleGeometry,
};
use nctorus::json::*;
use nctorus::linalg::{IntMatrix, ScalarMatrix};
use nctorus::orbit::gl2_orbit_equal;
use nctorus::range::{morita_lambda_search, orbifold_range_bounds, torus_range, MoritaOutcome, ZModuleRange};
use nctorus::skew::{
    all_minors_positive, all_pfaffian_minors, find_positive_t, pfaffian, pfaffian_minor, standard_z_int, IndexTuple,
    SkewMatrix,
};
use nctorus::so_nn::{extension_condition, extension_condition_with, Permutation};
use nctorus::{Error, Result};
use serde_json::{json, Value};

pub struct Flags {
    pub t_max: u64,
    pub coeff_bound: u32,
    pub max_order: usize,
    pub orbit_iterations: usize,
    pub tolerance: f64,
}

impl Flags {
    pub fn to_json(&self) -> Value {
        json!({
            "t_max": self.t_max,
            "coeff_bound": self.coeff_bound,
            "max_order": self.max_order,
            "orbit_iterations": self.orbit_iterations,
            "tolerance": self.tolerance,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    Error,
    Unknown,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Ok => "ok",
            Status::Error => "error",
            Status::Unknown => "unknown",
        }
    }
}

pub struct Outcome {
    pub status: Status,
    pub payload: Value,
    pub error: Option<(String, String)>,
}

impl Outcome {
    fn ok(payload: Value) -> Self {
        Outcome { status: Status::Ok, payload, error: None }
    }

    fn unknown(payload: Value) -> Self {
        Outcome { status: Status::Unknown, payload, error: None }
    }

    pub fn error(code: impl Into<String>, message: impl Into<String>) -> Self {
        Outcome { status: Status::Error, payload: Value::Null, error: Some((code.into(), message.into())) }
    }
}

impl From<Error> for Outcome {
    fn from(e: Error) -> Self {
        Outcome::error(e.code(), e.to_string())
    }
}

pub fn run(name: &str, doc: &Value, flags: &Flags) -> Outcome {
    if !doc.is_object() {
        return Error::Schema("the input must be a JSON object".into()).into();
    }
    let result = match name {
        "pfaffian" => pfaffian_cmd(doc),
        "minors" => minors(doc),
        "find-t" => find_t(doc, flags),
        "check-symplectic" => check_symplectic(doc),
        "order" => order(doc, flags),
        "freeness" => freeness(doc, flags),
        "extension-check" => extension_check(doc),
        "trace-range" => trace_range(doc),
        "orbifold-range" => orbifold_range(doc, flags),
        "morita-lambda" => morita_lambda(doc, flags),
        "gl2-orbit" => gl2_orbit(doc, flags),
        "verify-module" => verify_module(doc, flags),
        other => Err(Error::Schema(format!("unknown command {other:?}"))),
    };
    result.unwrap_or_else(Outcome::from)
}

fn theta_of(doc: &Value, k: Option<&Arc<NumberField>>) -> Result<SkewMatrix> {
    parse_skew(field(doc, "theta")?, k)
}

fn pfaffian_cmd(doc: &Value) -> Result<Outcome> {
    let k = parse_optional_field(doc)?;
    let m = match doc.get("matrix") {
        Some(m) => parse_skew(m, k.as_ref())?,
        None => theta_of(doc, k.as_ref())?,
    };
    let mut payload = json!({ "n": m.n() });
    let value = match doc.get("index") {
        Some(i) => {
            let idx = parse_index_tuple(i, m.n())?;
            payload["index"] = json!(idx.to_string());
            pfaffian_minor(&m, &idx)?
        }
        None => pfaffian(&m)?,
    };
    payload["value"] = scalar_to_json(&value);
    Ok(Outcome::ok(payload))
}

fn minors(doc: &Value) -> Result<Outcome> {
    let k = parse_optional_field(doc)?;
    let theta = theta_of(doc, k.as_ref())?;
    let minors: Vec<Value> = all_pfaffian_minors(&theta)
        .iter()
        .map(|(idx, v)| json!({ "index": idx.to_string(), "value": scalar_to_json(v) }))
        .collect();
    Ok(Outcome::ok(json!({ "n": theta.n(), "minors": minors })))
}

fn find_t(doc: &Value, flags: &Flags) -> Result<Outcome> {
    let k = parse_optional_field(doc)?;
    let theta = theta_of(doc, k.as_ref())?;
    Ok(match find_positive_t(&theta, flags.t_max)? {
        Some(t) => {
            let tz = standard_z_int(theta.n()).mul(&IntMatrix::diagonal(&vec![t as i64; theta.n()]))?;
            let shifted = theta.add_int(&tz)?;
            Outcome::ok(json!({ "result": "found", "t": t, "verified": all_minors_positive(&shifted)? }))
        }
        None => Outcome::unknown(json!({ "result": "not_found", "bound": { "t_max": flags.t_max } })),
    })
}

fn check_symplectic(doc: &Value) -> Result<Outcome> {
    let k = parse_optional_field(doc)?;
    let w = parse_int_matrix(field(doc, "W")?)?;
    let theta = theta_of(doc, k.as_ref())?;
    Ok(Outcome::ok(json!({ "symplectic": check_theta_symplectic(&w, &theta)? })))
}

fn order(doc: &Value, flags: &Flags) -> Result<Outcome> {
    let w = parse_int_matrix(field(doc, "W")?)?;
    Ok(match order_of(&w, flags.max_order)? {
        Some(n) => Outcome::ok(json!({ "order": n })),
        None => Outcome::unknown(json!({ "result": "not_found", "bound": { "max_order": flags.max_order } })),
    })
}

fn freeness(doc: &Value, flags: &Flags) -> Result<Outcome> {
    let w = parse_int_matrix(field(doc, "W")?)?;
    let order = match doc.get("order") {
        Some(o) => parse_usize(o)?,
        None => match order_of(&w, flags.max_order)? {
            Some(n) => n,
            None => {
                return Ok(Outcome::unknown(
                    json!({ "result": "not_found", "bound": { "max_order": flags.max_order } }),
                ))
            }
        },
    };
    Ok(Outcome::ok(json!({ "free": free_outside_origin(&w, order)?, "order": order })))
}

fn extension_check(doc: &Value) -> Result<Outcome> {
    let w = parse_int_matrix(field(doc, "W")?)?;
    let n = w.rows();
    let sigma = match doc.get("sigma") {
        Some(s) => {
            let images = s.as_array().ok_or_else(|| Error::Schema("\"sigma\" lists the images Σ(1), …, Σ(n)".into()))?;
            Some(Permutation::new(images.iter().map(parse_usize).collect::<Result<_>>()?)?)
        }
        None => None,
    };
    let check = |idx: &IndexTuple| -> Result<bool> {
        match &sigma {
            Some(s) => extension_condition_with(&w, idx, s),
            None => extension_condition(&w, idx),
        }
    };
    let results: Vec<Value> = match doc.get("index") {
        Some(i) => {
            let idx = parse_index_tuple(i, n)?;
            vec![json!({ "index": idx.to_string(), "admitted": check(&idx)? })]
        }
        None => {
            if sigma.is_some() {
                return Err(Error::Schema("\"sigma\" needs an \"index\"".into()));
            }
            IndexTuple::all(n)
                .iter()
                .map(|idx| Ok(json!({ "index": idx.to_string(), "admitted": check(idx)? })))
                .collect::<Result<_>>()?
        }
    };
    Ok(Outcome::ok(json!({ "results": results })))
}

fn trace_range(doc: &Value) -> Result<Outcome> {
    let k = parse_optional_field(doc)?;
    let theta = theta_of(doc, k.as_ref())?;
    Ok(Outcome::ok(range_to_json(&torus_range(&theta)?)))
}

fn orbifold_range(doc: &Value, flags: &Flags) -> Result<Outcome> {
    let k = parse_optional_field(doc)?;
    let act = parse_action(doc, k.as_ref(), flags.max_order)?;
    let rep = orbifold_range_bounds(act.theta(), &act)?;
    Ok(Outcome::ok(orbifold_report_to_json(&rep)))
}

/// A range payload, `{"generators": [...]}`, or `{"theta": matrix}` for the
/// torus range of θ.
fn range_input(v: &Value, k: Option<&Arc<NumberField>>) -> Result<ZModuleRange> {
    match v.get("theta") {
        Some(t) => torus_range(&parse_skew(t, k)?),
        None => parse_range(v, k),
    }
}

fn morita_lambda(doc: &Value, flags: &Flags) -> Result<Outcome> {
    let k = parse_optional_field(doc)?;
    let r1 = range_input(field(doc, "range1")?, k.as_ref())?;
    let r2 = range_input(field(doc, "range2")?, k.as_ref())?;
    Ok(match morita_lambda_search(&r1, &r2, flags.coeff_bound)? {
        MoritaOutcome::Found(lambda) => Outcome::ok(json!({ "result": "found", "lambda": scalar_to_json(&lambda) })),
        MoritaOutcome::NotFound => Outcome::ok(json!({ "result": "not_found" })),
        MoritaOutcome::Unknown { coeff_bound } => {
            Outcome::unknown(json!({ "result": "unknown", "bound": { "coeff_bound": coeff_bound } }))
        }
    })
}

fn gl2_orbit(doc: &Value, flags: &Flags) -> Result<Outcome> {
    let k = parse_optional_field(doc)?;
    let a = parse_scalar(field(doc, "theta1")?, k.as_ref())?;
    let b = parse_scalar(field(doc, "theta2")?, k.as_ref())?;
    Ok(match gl2_orbit_equal(&a, &b, flags.orbit_iterations)? {
        Some(eq) => Outcome::ok(json!({ "equal": eq })),
        None => Outcome::unknown(
            json!({ "result": "unknown", "bound": { "orbit_iterations": flags.orbit_iterations } }),
        ),
    })
}

fn parse_step(v: &Value) -> Result<f64> {
    match v {
        Value::Number(n) => n.as_f64().ok_or_else(|| Error::Parse(format!("bad number {n}"))),
        _ => parse_rational_value(v).map(|r| nctorus::Scalar::Rational(r).to_f64())?,
    }
}

fn lattice_box(n: usize) -> Vec<Vec<i64>> {
    (0..3usize.pow(n as u32))
        .map(|mut c| {
            (0..n)
                .map(|_| {
                    let x = (c % 3) as i64 - 1;
                    c /= 3;
                    x
                })
                .collect()
        })
        .collect()
}

fn parse_l(v: &Value, n: usize) -> Result<Vec<i64>> {
    let a = v.as_array().filter(|a| a.len() == n).ok_or_else(|| Error::Schema(format!("\"l\" must have {n} entries")))?;
    a.iter().map(|x| x.as_i64().ok_or_else(|| Error::Schema(format!("{x} is not an integer")))).collect()
}

fn verify_module(doc: &Value, flags: &Flags) -> Result<Outcome> {
    let k = parse_optional_field(doc)?;
    let theta = theta_of(doc, k.as_ref())?;
    let p = parse_usize(field(doc, "p")?)?;
    let geom = match doc.get("T11") {
        Some(t) => {
            let rows = t.as_array().ok_or_else(|| Error::Schema("\"T11\" is an array of rows".into()))?;
            let rows = rows
                .iter()
                .map(|r| {
                    r.as_array()
                        .ok_or_else(|| Error::Schema("\"T11\" rows are arrays".into()))?
                        .iter()
                        .map(|x| parse_scalar(x, k.as_ref()))
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<Vec<_>>>()?;
            ModuleGeometry::with_t11(&theta, p, ScalarMatrix::from_rows(rows)?)?
        }
        None => build_geometry(&theta, p)?,
    };
    let n = theta.n();
    let q = n - 2 * p;
    let g = field(doc, "grid")?;
    let grid = Grid::new(
        p,
        q,
        parse_step(field(g, "L")?)?,
        parse_step(field(g, "h")?)?,
        parse_usize(field(g, "K")?)?,
    )?;
    let act = match doc.get("W") {
        Some(w) => Some(CyclicAction::new(parse_int_matrix(w)?, theta.clone(), flags.max_order)?),
        None => None,
    };
    let op = act.as_ref().map(|a| MetaplecticOp::for_action(a, &geom)).transpose()?;
    let need_action = || -> Result<(&CyclicAction, &MetaplecticOp)> {
        match (&act, &op) {
            (Some(a), Some(o)) => Ok((a, o)),
            _ => Err(Error::Schema("this test needs \"W\"".into())),
        }
    };

    let f = GridFunction::gaussian(grid, &vec![0.0; p]);
    let g2 = GridFunction::gaussian(grid, &vec![0.5; p]);
    let default_tests = if act.is_some() {
        vec![json!("commutation"), json!("covariance"), json!("unitarity"), json!("inner_compat")]
    } else {
        vec![json!("commutation")]
    };
    let tests = match doc.get("tests") {
        Some(t) => t.as_array().ok_or_else(|| Error::Schema("\"tests\" must be an array".into()))?.clone(),
        None => default_tests,
    };

    let mut results = Vec::new();
    let mut all_pass = true;
    for t in &tests {
        let (kind, l, tol) = match t {
            Value::String(s) => (s.as_str(), None, flags.tolerance),
            Value::Object(_) => {
                let kind = field(t, "kind")?.as_str().ok_or_else(|| Error::Schema("\"kind\" is a string".into()))?;
                let l = t.get("l").map(|l| parse_l(l, n)).transpose()?;
                let tol = match t.get("tolerance") {
                    Some(v) => v.as_f64().ok_or_else(|| Error::Schema("\"tolerance\" is a number".into()))?,
                    None => flags.tolerance,
                };
                (kind, l, tol)
            }
            other => return Err(Error::Schema(format!("a test is a name or an object, found {other}"))),
        };
        let ls = match &l {
            Some(l) => vec![l.clone()],
            None => lattice_box(n),
        };
        let residual = match kind {
            "commutation" => {
                let mut worst: f64 = 0.0;
                for j in 0..n {
                    for kk in j + 1..n {
                        worst = worst.max(verify_commutation(&f, j, kk, &geom)?);
                    }
                }
                worst
            }
            "covariance" => {
                let (a, o) = need_action()?;
                let mut worst: f64 = 0.0;
                for l in &ls {
                    worst = worst.max(verify_covariance(&f, a, l, &geom, o)?);
                }
                worst
            }
            "unitarity" => {
                let (a, o) = need_action()?;
                verify_unitarity(&f, &g2, a, &geom, o)?
            }
            "inner_compat" => {
                let (a, o) = need_action()?;
                verify_inner_compat(&f, &g2, a, &ls, &geom, o)?
            }
            other => return Err(Error::Schema(format!("unknown test kind {other:?}"))),
        };
        let pass = residual < tol;
        all_pass &= pass;
        let mut entry = json!({ "kind": kind, "residual": residual, "tolerance": tol, "pass": pass });
        if let Some(l) = l {
            entry["l"] = json!(l);
        }
        results.push(entry);
    }
    let mut payload = json!({ "n": n, "p": p, "q": q, "tests": results });
    if let Some(o) = &op {
        payload["metaplectic"] = json!(format!("{:?}", o.kind));
    }
    if all_pass {
        Ok(Outcome::ok(payload))
    } else {
        Ok(Outcome { status: Status::Error, payload, error: Some(("TOLERANCE_EXCEEDED".into(), "a residual exceeds its tolerance".into())) })
    }
}
