//! JSON encodings of scalars, matrices, actions and ranges.
//!
//! Rationals are strings `"p/q"` (plain `"p"` for integers); field elements
//! are `{"coeffs": [...]}` in the power basis of a field given separately as
//! `{"minpoly": [...], "interval": [lo, hi]}`; symbolic polynomials are
//! `{"terms": [{"monomial": [[i, j], ...], "coeff": "p/q"}]}`. Skew matrices
//! are `{"n": n, "upper": {"i,j": scalar}}` with 1-based indices.

use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde_json::{json, Map, Value};

use crate::action::CyclicAction;
use crate::arith::{parse_rational, Basis, FieldElement, Monomial, NumberField, Polynomial, Rational, Scalar};
use crate::error::{Error, Result};
use crate::linalg::IntMatrix;
use crate::range::{span, OrbifoldRangeReport, ZModuleRange};
use crate::skew::{IndexTuple, SkewMatrix};
use crate::so_nn::BlockElement;

fn schema(msg: impl Into<String>) -> Error {
    Error::Schema(msg.into())
}

/// Member `key` of an object, or a schema error naming it.
pub fn field<'a>(v: &'a Value, key: &str) -> Result<&'a Value> {
    v.get(key).ok_or_else(|| schema(format!("missing \"{key}\"")))
}

pub fn rational_to_json(r: &Rational) -> Value {
    Value::String(r.to_string())
}

pub fn parse_rational_value(v: &Value) -> Result<Rational> {
    match v {
        Value::String(s) => parse_rational(s),
        Value::Number(n) => n
            .as_i64()
            .map(|i| Rational::from_integer(i.into()))
            .ok_or_else(|| Error::Parse(format!("{n} is not an integer; write fractions as \"p/q\""))),
        other => Err(schema(format!("expected a rational, found {other}"))),
    }
}

/// Integers as JSON numbers when they fit in i64, decimal strings otherwise.
pub fn int_to_json(x: &BigInt) -> Value {
    match x.to_i64() {
        Some(i) => json!(i),
        None => Value::String(x.to_string()),
    }
}

pub fn parse_int(v: &Value) -> Result<BigInt> {
    match v {
        Value::Number(n) => n.as_i64().map(BigInt::from).ok_or_else(|| Error::Parse(format!("{n} is not an integer"))),
        Value::String(s) => s.trim().parse().map_err(|_| Error::Parse(format!("{s:?} is not an integer"))),
        other => Err(schema(format!("expected an integer, found {other}"))),
    }
}

pub fn parse_usize(v: &Value) -> Result<usize> {
    v.as_u64().map(|x| x as usize).ok_or_else(|| schema(format!("expected a non-negative integer, found {v}")))
}

pub fn field_to_json(k: &NumberField) -> Value {
    let (lo, hi) = k.interval();
    json!({
        "minpoly": k.minpoly().iter().map(rational_to_json).collect::<Vec<_>>(),
        "interval": [rational_to_json(lo), rational_to_json(hi)],
    })
}

pub fn parse_field(v: &Value) -> Result<Arc<NumberField>> {
    let poly = field(v, "minpoly")?.as_array().ok_or_else(|| schema("\"minpoly\" must be an array"))?;
    let poly: Vec<Rational> = poly.iter().map(parse_rational_value).collect::<Result<_>>()?;
    let interval = field(v, "interval")?.as_array().ok_or_else(|| schema("\"interval\" must be an array"))?;
    if interval.len() != 2 {
        return Err(schema("\"interval\" must have two entries"));
    }
    NumberField::new(poly, parse_rational_value(&interval[0])?, parse_rational_value(&interval[1])?)
}

/// The optional top-level `"field"` of a document.
pub fn parse_optional_field(doc: &Value) -> Result<Option<Arc<NumberField>>> {
    doc.get("field").map(parse_field).transpose()
}

pub fn scalar_to_json(s: &Scalar) -> Value {
    match s {
        Scalar::Rational(r) => rational_to_json(r),
        Scalar::Field(e) => json!({ "coeffs": e.coeffs().iter().map(rational_to_json).collect::<Vec<_>>() }),
        Scalar::Poly(p) => {
            let terms: Vec<Value> = p
                .terms()
                .map(|(m, c)| {
                    let vars: Vec<Value> = m.vars().iter().map(|&(i, j)| json!([i, j])).collect();
                    json!({ "monomial": vars, "coeff": rational_to_json(c) })
                })
                .collect();
            json!({ "terms": terms })
        }
    }
}

fn parse_var(v: &Value) -> Result<(usize, usize)> {
    let pair = v.as_array().filter(|a| a.len() == 2).ok_or_else(|| schema(format!("expected [i, j], found {v}")))?;
    let (i, j) = (parse_usize(&pair[0])?, parse_usize(&pair[1])?);
    if i == 0 || i >= j {
        return Err(schema(format!("indeterminate [{i}, {j}] needs 1 ≤ i < j")));
    }
    Ok((i, j))
}

pub fn parse_scalar(v: &Value, k: Option<&Arc<NumberField>>) -> Result<Scalar> {
    if let Some(coeffs) = v.get("coeffs") {
        let k = k.ok_or_else(|| schema("field element given without a \"field\""))?;
        let coeffs = coeffs.as_array().ok_or_else(|| schema("\"coeffs\" must be an array"))?;
        let coeffs: Vec<Rational> = coeffs.iter().map(parse_rational_value).collect::<Result<_>>()?;
        if coeffs.len() > k.degree() {
            return Err(schema(format!("{} coefficients for a field of degree {}", coeffs.len(), k.degree())));
        }
        return Ok(Scalar::Field(FieldElement::new(k.clone(), coeffs)));
    }
    if let Some(terms) = v.get("terms") {
        let terms = terms.as_array().ok_or_else(|| schema("\"terms\" must be an array"))?;
        let mut poly = Polynomial::zero();
        for t in terms {
            let vars = field(t, "monomial")?.as_array().ok_or_else(|| schema("\"monomial\" must be an array"))?;
            let vars: Vec<(usize, usize)> = vars.iter().map(parse_var).collect::<Result<_>>()?;
            let c = parse_rational_value(field(t, "coeff")?)?;
            poly = poly.add(&Polynomial::term(Monomial::from_vars(vars), c));
        }
        return Ok(match poly.as_constant() {
            Some(c) => Scalar::Rational(c),
            None => Scalar::Poly(poly),
        });
    }
    parse_rational_value(v).map(Scalar::Rational)
}

pub fn skew_to_json(m: &SkewMatrix) -> Value {
    let mut upper = Map::new();
    for ((i, j), v) in m.upper_entries() {
        if !v.is_zero() {
            upper.insert(format!("{i},{j}"), scalar_to_json(&v));
        }
    }
    json!({ "n": m.n(), "upper": upper })
}

/// Reads `{"n", "upper"}`; `{"n", "generic": true}` gives the matrix of
/// indeterminates θ_{ij}.
pub fn parse_skew(v: &Value, k: Option<&Arc<NumberField>>) -> Result<SkewMatrix> {
    let n = parse_usize(field(v, "n")?)?;
    if v.get("generic").and_then(Value::as_bool) == Some(true) {
        return Ok(SkewMatrix::generic(n));
    }
    let mut entries = Vec::new();
    if let Some(upper) = v.get("upper") {
        let upper = upper.as_object().ok_or_else(|| schema("\"upper\" must be an object"))?;
        for (key, val) in upper {
            let (i, j) = key
                .split_once(',')
                .and_then(|(a, b)| Some((a.trim().parse::<usize>().ok()?, b.trim().parse::<usize>().ok()?)))
                .ok_or_else(|| schema(format!("entry key {key:?} must look like \"i,j\"")))?;
            if i == 0 || i >= j || j > n {
                return Err(schema(format!("entry \"{key}\" is not above the diagonal of a {n}×{n} matrix")));
            }
            entries.push(((i, j), parse_scalar(val, k)?));
        }
    }
    SkewMatrix::from_upper(n, entries)
}

pub fn int_matrix_to_json(m: &IntMatrix) -> Value {
    Value::Array(m.to_rows().iter().map(|r| Value::Array(r.iter().map(int_to_json).collect())).collect())
}

pub fn parse_int_matrix(v: &Value) -> Result<IntMatrix> {
    let rows = v.as_array().ok_or_else(|| schema("an integer matrix is an array of rows"))?;
    let rows: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|r| r.as_array().ok_or_else(|| schema("matrix rows must be arrays"))?.iter().map(parse_int).collect())
        .collect::<Result<_>>()?;
    IntMatrix::from_rows(&rows)
}

pub fn block_element_to_json(g: &BlockElement) -> Value {
    json!({
        "A": int_matrix_to_json(g.a()),
        "B": int_matrix_to_json(g.b()),
        "C": int_matrix_to_json(g.c()),
        "D": int_matrix_to_json(g.d()),
    })
}

pub fn action_to_json(act: &CyclicAction) -> Value {
    json!({ "W": int_matrix_to_json(act.w()), "theta": skew_to_json(act.theta()), "order": act.order() })
}

/// Reads `{"W", "theta", "order"?}`; a declared order is checked.
pub fn parse_action(v: &Value, k: Option<&Arc<NumberField>>, max_order: usize) -> Result<CyclicAction> {
    let w = parse_int_matrix(field(v, "W")?)?;
    let theta = parse_skew(field(v, "theta")?, k)?;
    match v.get("order") {
        Some(o) => CyclicAction::with_order(w, theta, parse_usize(o)?),
        None => CyclicAction::new(w, theta, max_order),
    }
}

pub fn parse_index_tuple(v: &Value, n: usize) -> Result<IndexTuple> {
    match v {
        Value::String(s) => {
            let idx: IndexTuple = s.parse()?;
            IndexTuple::new(idx.indices().to_vec(), n)
        }
        Value::Array(a) => IndexTuple::new(a.iter().map(parse_usize).collect::<Result<_>>()?, n),
        other => Err(schema(format!("an index tuple is \"1,2\" or [1, 2], found {other}"))),
    }
}

/// `{"denominator": D, "basis": rows, "labels": [...]}`: the range is
/// (1/D)·span of the rows read against the labels. Field ranges add the
/// field spec so the payload parses back on its own.
pub fn range_to_json(r: &ZModuleRange) -> Value {
    let mut out = json!({
        "denominator": int_to_json(r.denominator()),
        "basis": r.lattice().iter().map(|row| row.iter().map(int_to_json).collect::<Vec<_>>()).collect::<Vec<_>>(),
        "labels": r.labels(),
    });
    if let Basis::Power(k) = r.basis() {
        out["field"] = field_to_json(k);
    }
    out
}

fn parse_label(label: &str, k: Option<&Arc<NumberField>>) -> Result<Scalar> {
    let label = label.trim();
    if label == "1" {
        return Ok(Scalar::one());
    }
    if let Some(rest) = label.strip_prefix('a') {
        let k = k.ok_or_else(|| schema(format!("label {label:?} needs a \"field\"")))?;
        let power: usize = match rest.strip_prefix('^') {
            Some(e) => e.parse().map_err(|_| schema(format!("bad label {label:?}")))?,
            None if rest.is_empty() => 1,
            None => return Err(schema(format!("bad label {label:?}"))),
        };
        if power >= k.degree() {
            return Err(schema(format!("label {label:?} exceeds the field degree")));
        }
        let mut coeffs = vec![Rational::zero(); k.degree()];
        coeffs[power] = Rational::from_integer(1.into());
        return Ok(Scalar::Field(FieldElement::new(k.clone(), coeffs)));
    }
    // t1_2*t3_4^2
    let mut vars = Vec::new();
    for factor in label.split('*') {
        let bad = || schema(format!("bad label {label:?}"));
        let body = factor.trim().strip_prefix('t').ok_or_else(bad)?;
        let (pair, power) = match body.split_once('^') {
            Some((p, e)) => (p, e.parse::<usize>().map_err(|_| bad())?),
            None => (body, 1),
        };
        let (i, j) = pair.split_once('_').ok_or_else(bad)?;
        let (i, j): (usize, usize) = (i.parse().map_err(|_| bad())?, j.parse().map_err(|_| bad())?);
        if i == 0 || i >= j {
            return Err(bad());
        }
        vars.extend(std::iter::repeat((i, j)).take(power));
    }
    Ok(Scalar::Poly(Polynomial::term(Monomial::from_vars(vars), Rational::from_integer(1.into()))))
}

/// Reads a range either in the output form of [`range_to_json`] or as
/// `{"generators": [scalars]}`.
pub fn parse_range(v: &Value, k: Option<&Arc<NumberField>>) -> Result<ZModuleRange> {
    let own_field = v.get("field").map(parse_field).transpose()?;
    let k = own_field.as_ref().or(k);
    if let Some(gens) = v.get("generators") {
        let gens = gens.as_array().ok_or_else(|| schema("\"generators\" must be an array"))?;
        let gens: Vec<Scalar> = gens.iter().map(|g| parse_scalar(g, k)).collect::<Result<_>>()?;
        return span(&gens);
    }
    let d = parse_int(field(v, "denominator")?)?;
    if d <= BigInt::zero() {
        return Err(schema("\"denominator\" must be positive"));
    }
    let labels = field(v, "labels")?.as_array().ok_or_else(|| schema("\"labels\" must be an array"))?;
    let labels: Vec<Scalar> = labels
        .iter()
        .map(|l| l.as_str().ok_or_else(|| schema("labels are strings")).and_then(|s| parse_label(s, k)))
        .collect::<Result<_>>()?;
    let rows = field(v, "basis")?.as_array().ok_or_else(|| schema("\"basis\" must be an array"))?;
    let inv_d = Rational::new(1.into(), d);
    let mut gens = Vec::with_capacity(rows.len());
    for row in rows {
        let row = row.as_array().ok_or_else(|| schema("basis rows must be arrays"))?;
        if row.len() != labels.len() {
            return Err(schema(format!("basis row of length {} for {} labels", row.len(), labels.len())));
        }
        let mut acc = Scalar::zero();
        for (c, l) in row.iter().zip(&labels) {
            acc = acc.checked_add(&l.scale(&Rational::from_integer(parse_int(c)?)))?;
        }
        gens.push(acc.scale(&inv_d));
    }
    if gens.is_empty() {
        gens.push(Scalar::zero());
    }
    span(&gens)
}

/// The lower bound's range fields plus the decision, the admitted index
/// tuples and the upper bound.
pub fn orbifold_report_to_json(rep: &OrbifoldRangeReport) -> Value {
    let mut out = range_to_json(&rep.lower);
    out["decided"] = json!(rep.decided);
    out["admitted"] = json!(rep.admitted_minors.iter().map(|i| i.to_string()).collect::<Vec<_>>());
    out["order"] = json!(rep.order);
    out["upper"] = range_to_json(&rep.upper);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::range::torus_range;

    #[test]
    fn scalar_round_trips() {
        let k = NumberField::quadratic(2).unwrap();
        let doc = json!({ "coeffs": ["1/2", "-3"] });
        let s = parse_scalar(&doc, Some(&k)).unwrap();
        assert_eq!(scalar_to_json(&s), doc);
        let poly = json!({ "terms": [{ "monomial": [[1, 2], [3, 4]], "coeff": "2/3" }] });
        assert_eq!(scalar_to_json(&parse_scalar(&poly, None).unwrap()), poly);
        assert_eq!(parse_scalar(&json!("4/6"), None).unwrap(), Scalar::ratio(2, 3));
        assert_eq!(parse_scalar(&json!(5), None).unwrap(), Scalar::int(5));
        assert!(matches!(parse_scalar(&json!(0.5), None), Err(Error::Parse(_))));
        assert!(matches!(parse_scalar(&json!({ "coeffs": ["1"] }), None), Err(Error::Schema(_))));
    }

    #[test]
    fn field_round_trips() {
        let k = NumberField::quadratic(3).unwrap();
        let back = parse_field(&field_to_json(&k)).unwrap();
        assert!(back.same_as(&k));
    }

    #[test]
    fn matrix_round_trips() {
        let doc = json!({ "n": 3, "upper": { "1,2": "1/3", "2,3": "-1" } });
        let m = parse_skew(&doc, None).unwrap();
        assert_eq!(m.get(1, 0), &Scalar::ratio(-1, 3));
        assert_eq!(skew_to_json(&m), doc);
        assert!(parse_skew(&json!({ "n": 2, "upper": { "2,1": "1" } }), None).is_err());
        assert_eq!(parse_skew(&json!({ "n": 3, "generic": true }), None).unwrap(), SkewMatrix::generic(3));
    }

    #[test]
    fn ranges_round_trip() {
        let k = NumberField::quadratic(2).unwrap();
        let alpha = Scalar::Field(FieldElement::generator(k.clone()));
        let theta = SkewMatrix::from_upper(2, [((1, 2), alpha.scale(&Rational::new(1.into(), 3.into())))]).unwrap();
        for r in [torus_range(&theta).unwrap(), torus_range(&SkewMatrix::generic(4)).unwrap()] {
            let back = parse_range(&range_to_json(&r), None).unwrap();
            assert_eq!(back, r);
        }
        let gens = parse_range(&json!({ "generators": ["1/2", "1/3"] }), None).unwrap();
        assert_eq!(gens, span(&[Scalar::ratio(1, 6)]).unwrap());
    }
}
