//! JSON and TSV rendering. Reals keep the 17-significant-digit text of the
//! semiring codecs in both formats.

use std::io::{self, Write};

use semifb::algebra::format_f64;
use serde::Serialize;
use serde_json::ser::Formatter;
use serde_json::{Map, Value};

#[derive(Copy, Clone, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Tsv,
}

/// Writes floats with [`format_f64`] instead of the shortest round-trip form.
struct DigitsFormatter;

impl Formatter for DigitsFormatter {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(format_f64(value).as_bytes())
    }
}

/// A semiring value rendered by its codec, as JSON: finite reals become
/// numbers, `(a;b;…)` tuples become arrays, anything else stays a string.
pub fn value_json(text: &str) -> Value {
    let t = text.trim();
    if let Some(inner) = t.strip_prefix('(').and_then(|s| s.strip_suffix(')')) {
        if depth_ok(inner) {
            return Value::Array(split_top(inner).into_iter().map(value_json).collect());
        }
    }
    match t.parse::<f64>() {
        Ok(x) if x.is_finite() => real(x),
        _ => Value::String(t.to_string()),
    }
}

pub fn real(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or_else(|| Value::String(format_f64(x)), Value::Number)
}

fn depth_ok(s: &str) -> bool {
    let mut d = 0i32;
    for c in s.chars() {
        match c {
            '(' => d += 1,
            ')' => d -= 1,
            _ => {}
        }
        if d < 0 {
            return false;
        }
    }
    d == 0
}

fn split_top(s: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let (mut d, mut start) = (0i32, 0);
    for (i, c) in s.char_indices() {
        match c {
            '(' => d += 1,
            ')' => d -= 1,
            ';' if d == 0 => {
                out.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(&s[start..]);
    out
}

pub fn render(out: &Map<String, Value>, format: Format) -> String {
    match format {
        Format::Json => {
            let mut buf = Vec::new();
            let mut ser = serde_json::Serializer::with_formatter(&mut buf, DigitsFormatter);
            out.serialize(&mut ser).expect("serializing a JSON value");
            let mut s = String::from_utf8(buf).expect("JSON is UTF-8");
            s.push('\n');
            s
        }
        Format::Tsv => {
            let mut s = String::new();
            for (k, v) in out {
                tsv(&mut s, k, v);
            }
            s
        }
    }
}

fn scalar_text(v: &Value) -> Option<String> {
    match v {
        Value::Null => Some(String::new()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Number(n) => Some(n.as_f64().map_or_else(|| n.to_string(), format_f64)),
        Value::String(s) => Some(s.clone()),
        _ => None,
    }
}

/// One line per leaf: `path<TAB>value`, with arrays of scalars on one line.
fn tsv(s: &mut String, path: &str, v: &Value) {
    if let Some(t) = scalar_text(v) {
        s.push_str(&format!("{path}\t{t}\n"));
        return;
    }
    match v {
        Value::Array(items) => {
            let flat: Option<Vec<String>> = items.iter().map(scalar_text).collect();
            match flat {
                Some(parts) => s.push_str(&format!("{path}\t{}\n", parts.join("\t"))),
                None => {
                    for (i, x) in items.iter().enumerate() {
                        tsv(s, &format!("{path}.{i}"), x);
                    }
                }
            }
        }
        Value::Object(m) => {
            for (k, x) in m {
                tsv(s, &format!("{path}.{k}"), x);
            }
        }
        _ => unreachable!(),
    }
}
