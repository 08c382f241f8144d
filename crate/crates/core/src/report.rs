//! Run reports: versioned JSON with every number as a decimal string, and a
//! plain-text table.

use serde_json::{json, Value};

use crate::algebra::{GrowthEstimate, Polynomial, Recurrence};
use crate::derive::{Check, Derivation};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::num::{abbreviate, parse_rat, rat_to_string, Rat};
use crate::spec::{parse_spec, parse_weights, CirculantSpec};

pub const SCHEMA: u64 = 1;

/// Digits kept per number in table output.
const TABLE_DIGITS: usize = 40;

pub fn spec_json(spec: &CirculantSpec) -> Value {
    json!({
        "jumps": spec.jumps_text(),
        "size": spec.size_text(),
        "weights": spec.weights_text(),
        "display": spec.to_string(),
    })
}

pub fn strings(values: &[Rat]) -> Vec<String> {
    values.iter().map(rat_to_string).collect()
}

pub fn recurrence_json(rec: &Recurrence) -> Value {
    serde_json::to_value(rec).expect("recurrence serializes")
}

pub fn growth_json(g: &GrowthEstimate) -> Value {
    json!({
        "dominant_root": format!("{:.12}", g.dominant_root),
        "error_bound": format!("{:e}", g.error_bound),
        "multiplicity": g.multiplicity.to_string(),
        "real": g.real,
        "modulus": format!("{:.12}", g.modulus),
    })
}

pub fn polynomial_json(p: &Polynomial) -> Value {
    json!({ "coeffs": p.to_strings(), "text": p.to_string() })
}

pub fn matrix_json(m: &Matrix) -> Value {
    json!(m.to_string_rows())
}

pub fn checks_json(checks: &[Check]) -> Value {
    let opt = |x: &Option<Rat>| x.as_ref().map(rat_to_string);
    Value::Array(
        checks
            .iter()
            .map(|c| {
                json!({
                    "n": c.n.to_string(),
                    "recurrence": rat_to_string(&c.recurrence),
                    "ryser": opt(&c.ryser),
                    "enumeration": opt(&c.enumeration),
                    "pass": c.passed(),
                })
            })
            .collect(),
    )
}

/// Full report of a derivation; `terms` runs from the recurrence base.
pub fn derivation_json(d: &Derivation, terms: &[Rat], checks: Option<&[Check]>, debug: bool) -> Value {
    let sys = &d.system;
    let mut out = json!({
        "schema": SCHEMA,
        "command": "derive",
        "spec": spec_json(&d.spec),
        "normalized": spec_json(&d.normalized),
        "n0": d.n0.to_string(),
        "width": sys.width().to_string(),
        "states": sys.states().to_string(),
        "annihilator": polynomial_json(&d.annihilator),
        "degree_bound": d.degree_bound().to_string(),
        "recurrence": recurrence_json(&d.recurrence),
        "equation": d.recurrence.equation("T"),
        "terms": { "from": d.recurrence.base.to_string(), "values": strings(terms) },
        "growth": growth_json(&d.growth),
        "timings_ms": {
            "build": format!("{:.3}", d.timings.build.as_secs_f64() * 1e3),
            "annihilator": format!("{:.3}", d.timings.annihilator.as_secs_f64() * 1e3),
            "sequence": format!("{:.3}", d.timings.sequence.as_secs_f64() * 1e3),
            "fit": format!("{:.3}", d.timings.fit.as_secs_f64() * 1e3),
        },
    });
    if let Some(c) = checks {
        out["verification"] = checks_json(c);
    }
    if debug {
        out["transfer"] = json!({
            "abar": matrix_json(&sys.abar),
            "blocks": sys.blocks.iter().map(|b| json!({
                "zeros": b.zeros.to_string(),
                "matrix": matrix_json(&b.matrix),
            })).collect::<Vec<_>>(),
            "beta": strings(&sys.beta),
            "t0": strings(&sys.t0),
            "classifications": sys.order.iter().map(|x| json!({
                "key": x.key().to_string(),
                "bits": x.bit_string(),
            })).collect::<Vec<_>>(),
        });
    }
    out
}

fn field<'a>(v: &'a Value, key: &str) -> Result<&'a Value> {
    v.get(key)
        .ok_or_else(|| Error::Syntax(format!("report is missing `{key}`")))
}

fn text<'a>(v: &'a Value, key: &str) -> Result<&'a str> {
    field(v, key)?
        .as_str()
        .ok_or_else(|| Error::Syntax(format!("`{key}` is not a string")))
}

/// Spec echoed in a report.
pub fn spec_from_json(report: &Value) -> Result<CirculantSpec> {
    if report.get("schema").and_then(Value::as_u64) != Some(SCHEMA) {
        return Err(Error::Syntax(format!("report is not schema {SCHEMA}")));
    }
    let spec = field(report, "spec")?;
    let size = spec.get("size").and_then(Value::as_str);
    let parsed = parse_spec(text(spec, "jumps")?, size)?;
    match spec.get("weights").and_then(Value::as_str) {
        Some(w) => parsed.with_weights(parse_weights(w)?),
        None => Ok(parsed),
    }
}

/// Recurrence stored in a report.
pub fn recurrence_from_json(report: &Value) -> Result<Recurrence> {
    let rec = field(report, "recurrence")?;
    let list = |key: &str| -> Result<Vec<Rat>> {
        field(rec, key)?
            .as_array()
            .ok_or_else(|| Error::Syntax(format!("`{key}` is not a list")))?
            .iter()
            .map(|x| {
                x.as_str()
                    .ok_or_else(|| Error::Syntax(format!("`{key}` entry is not a string")))
                    .and_then(parse_rat)
            })
            .collect()
    };
    let base: i64 = text(rec, "base")?
        .parse()
        .map_err(|_| Error::Syntax("`base` is not an integer".into()))?;
    Recurrence::new(list("coeffs")?, base, list("initials")?)
}

/// Two-column table: label and value.
pub fn table(rows: &[(String, String)]) -> String {
    let width = rows.iter().map(|(k, _)| k.chars().count()).max().unwrap_or(0);
    rows.iter()
        .map(|(k, v)| format!("{k:<width$}  {v}\n"))
        .collect()
}

pub fn short(x: &Rat) -> String {
    abbreviate(&rat_to_string(x), TABLE_DIGITS)
}

/// Table rows for a derivation: recurrence, initial values, growth.
pub fn derivation_rows(d: &Derivation) -> Vec<(String, String)> {
    let rec = &d.recurrence;
    let initials: Vec<String> = rec.initials.iter().map(short).collect();
    let last = rec.base + rec.order() as i64 - 1;
    let growth = if d.growth.real {
        format!("{:.9} (multiplicity {})", d.growth.dominant_root, d.growth.multiplicity)
    } else {
        format!("non-real dominant pair, modulus {:.9}", d.growth.modulus)
    };
    vec![
        ("circulant".into(), d.spec.to_string()),
        ("analyzed as".into(), d.normalized.to_string()),
        ("recurrence".into(), rec.equation("T")),
        ("order".into(), rec.order().to_string()),
        (
            "initial values".into(),
            format!("{} for n={}..{}", initials.join(","), rec.base, last),
        ),
        ("annihilator".into(), d.annihilator.to_string()),
        ("growth".into(), growth),
    ]
}
