//! Fixed-precision number formatting and the JSON/CSV writers.

use gearmap::geometry::{CircleIntersection, ExtPoint, GeneralizedCircle, Mobius};
use num_complex::Complex64;
use serde_json::{json, Map, Number, Value};
use std::io::Write;
use std::path::Path;

pub const SCHEMA: &str = "gearmap/1";

/// 17 significant digits, the same on every platform.
pub fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

/// JSON number with 17 significant digits; `null` when not finite.
pub fn num(x: f64) -> Value {
    if x.is_finite() {
        Value::Number(fmt(x).parse::<Number>().expect("formatted float is a JSON number"))
    } else {
        Value::Null
    }
}

pub fn complex(z: Complex64) -> Value {
    json!({ "re": num(z.re), "im": num(z.im) })
}

pub fn ext_point(p: ExtPoint) -> Value {
    match p {
        ExtPoint::Finite(z) => complex(z),
        ExtPoint::Infinity => Value::String("infinity".into()),
    }
}

pub fn carrier(c: &GeneralizedCircle) -> Value {
    match *c {
        GeneralizedCircle::Circle { center, radius } => json!({
            "kind": "circle",
            "center": complex(center),
            "radius": num(radius),
        }),
        GeneralizedCircle::Line { point, direction } => json!({
            "kind": "line",
            "point": complex(point),
            "direction": complex(direction),
        }),
    }
}

pub fn intersection(x: &CircleIntersection) -> Value {
    match *x {
        CircleIntersection::TwoPoints(a, b) => {
            json!({ "kind": "two_points", "points": [ext_point(a), ext_point(b)] })
        }
        CircleIntersection::Tangent(a) => json!({ "kind": "tangent", "points": [ext_point(a)] }),
        CircleIntersection::Disjoint => json!({ "kind": "disjoint", "points": [] }),
        CircleIntersection::Coincident => json!({ "kind": "coincident", "points": [] }),
    }
}

pub fn mobius(m: &Mobius) -> Value {
    let [a, b, c, d] = m.coefficients();
    json!({ "a": complex(a), "b": complex(b), "c": complex(c), "d": complex(d) })
}

/// Top-level document with the schema tag first.
pub fn document(command: &str, body: Map<String, Value>) -> Value {
    let mut doc = Map::new();
    doc.insert("schema".into(), Value::String(SCHEMA.into()));
    doc.insert("command".into(), Value::String(command.into()));
    doc.extend(body);
    Value::Object(doc)
}

pub fn json_string(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values are serializable");
    s.push('\n');
    s
}

/// CSV text with a header row and LF line endings.
pub fn csv_string(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("CSV is UTF-8")
}

/// Writes to `path`, or to stdout when absent.
pub fn emit(path: Option<&Path>, text: &str) -> std::io::Result<()> {
    match path {
        Some(p) => std::fs::write(p, text),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()
        }
    }
}
