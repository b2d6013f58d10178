//! JSON helpers. Non-finite numbers are written as the strings `"inf"`,
//! `"-inf"` and `"nan"`, since JSON has no literal for them.

use std::collections::BTreeMap;

use serde::ser::{SerializeMap, SerializeSeq};
use serde::Serializer;
use serde_json::Value;

pub fn value(x: f64) -> Value {
    if x.is_finite() {
        serde_json::json!(x)
    } else if x.is_nan() {
        Value::String("nan".into())
    } else if x > 0.0 {
        Value::String("inf".into())
    } else {
        Value::String("-inf".into())
    }
}

pub fn num<S: Serializer>(x: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if x.is_finite() {
        s.serialize_f64(*x)
    } else {
        s.serialize_str(value(*x).as_str().unwrap_or("nan"))
    }
}

pub fn num_opt<S: Serializer>(x: &Option<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match x {
        Some(v) => num(v, s),
        None => s.serialize_none(),
    }
}

pub fn num_vec<S: Serializer>(xs: &[f64], s: S) -> std::result::Result<S::Ok, S::Error> {
    let mut seq = s.serialize_seq(Some(xs.len()))?;
    for x in xs {
        seq.serialize_element(&value(*x))?;
    }
    seq.end()
}

pub fn num_map<S: Serializer>(
    xs: &BTreeMap<String, f64>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    let mut map = s.serialize_map(Some(xs.len()))?;
    for (k, v) in xs {
        map.serialize_entry(k, &value(*v))?;
    }
    map.end()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(serde::Serialize)]
    struct Probe {
        #[serde(serialize_with = "num")]
        a: f64,
        #[serde(serialize_with = "num_opt")]
        b: Option<f64>,
    }

    #[test]
    fn non_finite_as_strings() {
        let s = serde_json::to_string(&Probe {
            a: f64::INFINITY,
            b: Some(0.1),
        })
        .unwrap();
        assert_eq!(s, r#"{"a":"inf","b":0.1}"#);
    }
}
