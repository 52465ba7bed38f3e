use std::io;

use serde::Serialize;
use serde_json::ser::{Formatter, Serializer};
use serde_json::Value;

/// Compact JSON with every float written to 17 significant digits.
struct Digits17;

impl Formatter for Digits17 {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, v: f64) -> io::Result<()> {
        w.write_all(fmt_f64(v).as_bytes())
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, v: f32) -> io::Result<()> {
        self.write_f64(w, v as f64)
    }
}

pub fn fmt_f64(v: f64) -> String {
    if v == 0.0 {
        // Avoid "-0".
        return format!("{:.16e}", 0.0f64);
    }
    format!("{v:.16e}")
}

pub fn to_json(v: &Value) -> String {
    let mut buf = Vec::new();
    let mut ser = Serializer::with_formatter(&mut buf, Digits17);
    v.serialize(&mut ser).expect("values serialize");
    String::from_utf8(buf).expect("utf-8")
}

/// `key = value` lines for the top level of an object; nested values are
/// written as JSON.
pub fn to_text(v: &Value) -> String {
    match v {
        Value::Object(map) => {
            let mut out = String::new();
            for (k, x) in map {
                let s = match x {
                    Value::String(s) => s.clone(),
                    other => to_json(other),
                };
                out.push_str(&format!("{k} = {s}\n"));
            }
            out
        }
        Value::String(s) => format!("{s}\n"),
        other => format!("{}\n", to_json(other)),
    }
}
