//! Lattice JSON input/output.  Grams are exchanged as
//! `{"gram": [[...]], "name": "optional"}`; integer entries are JSON
//! numbers, or decimal strings when they exceed the 53-bit safe range.

use num_bigint::BigInt;
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::lattice::QuadraticLattice;

const SAFE_RANGE: i64 = (1 << 53) - 1;

#[derive(Clone, Debug)]
pub struct NamedLattice {
    pub lattice: QuadraticLattice,
    pub name: Option<String>,
}

pub fn bigint_to_json(x: &BigInt) -> Value {
    match i64::try_from(x) {
        Ok(v) if v.abs() <= SAFE_RANGE => json!(v),
        _ => json!(x.to_string()),
    }
}

pub fn bigint_from_json(v: &Value) -> Result<BigInt> {
    match v {
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(BigInt::from(i))
            } else if let Some(u) = n.as_u64() {
                Ok(BigInt::from(u))
            } else {
                Err(Error::Invalid(format!(
                    "entry {n} is not an integer; use a decimal string for large values"
                )))
            }
        }
        Value::String(s) => s
            .trim()
            .parse::<BigInt>()
            .map_err(|_| Error::Invalid(format!("cannot parse integer from {s:?}"))),
        other => Err(Error::Invalid(format!("expected integer, got {other}"))),
    }
}

pub fn parse_lattice(text: &str) -> Result<NamedLattice> {
    let value: Value = serde_json::from_str(text)
        .map_err(|e| Error::Invalid(format!("malformed JSON: {e}")))?;
    let obj = value
        .as_object()
        .ok_or_else(|| Error::Invalid("top level must be an object".into()))?;
    let gram_val = obj
        .get("gram")
        .ok_or_else(|| Error::Invalid("missing \"gram\" field".into()))?;
    let rows = gram_val
        .as_array()
        .ok_or_else(|| Error::Invalid("\"gram\" must be an array of rows".into()))?;
    let mut gram = Vec::with_capacity(rows.len());
    for row in rows {
        let cells = row
            .as_array()
            .ok_or_else(|| Error::Invalid("gram rows must be arrays".into()))?;
        gram.push(
            cells
                .iter()
                .map(bigint_from_json)
                .collect::<Result<Vec<BigInt>>>()?,
        );
    }
    let name = obj
        .get("name")
        .and_then(Value::as_str)
        .map(|s| s.to_string());
    Ok(NamedLattice {
        lattice: QuadraticLattice::new(gram)?,
        name,
    })
}

pub fn lattice_to_json(lattice: &QuadraticLattice, name: Option<&str>) -> Value {
    let gram: Vec<Value> = lattice
        .gram()
        .iter()
        .map(|row| Value::Array(row.iter().map(bigint_to_json).collect()))
        .collect();
    let mut obj = Map::new();
    obj.insert("gram".into(), Value::Array(gram));
    if let Some(n) = name {
        obj.insert("name".into(), json!(n));
    }
    Value::Object(obj)
}
