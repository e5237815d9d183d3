//! Report rendering: CSV with 17 significant digits, JSON with hex-float mirrors.

use serde_json::{Map, Value};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Float(f64),
    Int(i64),
    Text(String),
    Bool(bool),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Float(v) => format_float(*v),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(headers: &[&str]) -> Self {
        Table {
            headers: headers.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.headers.len());
        self.rows.push(row);
    }

    /// Two-column `key,value` table.
    pub fn key_value(pairs: Vec<(&str, Cell)>) -> Self {
        let mut t = Table::new(&["key", "value"]);
        for (k, v) in pairs {
            t.push(vec![Cell::from(k), v]);
        }
        t
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record(&self.headers).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render)).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
    }
}

/// 17 significant digits in scientific notation.
pub fn format_float(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        v.to_string()
    }
}

/// C99 `%a`-style hexadecimal float, e.g. `0x1.921fb54442d18p+1` for π.
pub fn hex_float(v: f64) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let bits = v.to_bits();
    let sign = if bits >> 63 == 1 { "-" } else { "" };
    let exp_bits = ((bits >> 52) & 0x7ff) as i64;
    let mantissa = bits & ((1u64 << 52) - 1);
    if exp_bits == 0 && mantissa == 0 {
        return format!("{sign}0x0p+0");
    }
    let (lead, exp) = if exp_bits == 0 {
        (0, -1022)
    } else {
        (1, exp_bits - 1023)
    };
    let mut frac = format!("{mantissa:013x}");
    while frac.ends_with('0') {
        frac.pop();
    }
    let exp_str = if exp >= 0 { format!("+{exp}") } else { exp.to_string() };
    if frac.is_empty() {
        format!("{sign}0x{lead}p{exp_str}")
    } else {
        format!("{sign}0x{lead}.{frac}p{exp_str}")
    }
}

fn is_float(v: &Value) -> bool {
    matches!(v, Value::Number(n) if n.is_f64())
}

fn hex_mirror(v: &Value) -> Option<Value> {
    match v {
        Value::Number(n) if n.is_f64() => Some(Value::String(hex_float(n.as_f64().unwrap()))),
        Value::Array(items) if !items.is_empty() && items.iter().any(|i| is_float(i) || i.is_array()) => {
            let mirrored: Option<Vec<Value>> = items
                .iter()
                .map(|i| match i {
                    Value::Number(n) => Some(Value::String(hex_float(n.as_f64().unwrap()))),
                    Value::Array(_) => hex_mirror(i),
                    _ => None,
                })
                .collect();
            mirrored.map(Value::Array)
        }
        _ => None,
    }
}

/// Adds a `<key>_hex` sibling next to every float (or array of floats) in
/// every object, recursively.
pub fn with_hex(value: Value) -> Value {
    match value {
        Value::Object(map) => {
            let mut out = Map::new();
            for (k, v) in map {
                if let Some(h) = hex_mirror(&v) {
                    out.insert(format!("{k}_hex"), h);
                }
                out.insert(k, with_hex(v));
            }
            Value::Object(out)
        }
        Value::Array(items) => Value::Array(items.into_iter().map(with_hex).collect()),
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use serde_json::json;

    #[test]
    fn hex_known_values() {
        assert_eq!(hex_float(1.0), "0x1p+0");
        assert_eq!(hex_float(-2.0), "-0x1p+1");
        assert_eq!(hex_float(0.0), "0x0p+0");
        assert_eq!(hex_float(-0.0), "-0x0p+0");
        assert_eq!(hex_float(std::f64::consts::PI), "0x1.921fb54442d18p+1");
        assert_eq!(hex_float(0.1), "0x1.999999999999ap-4");
        assert_eq!(hex_float(f64::MIN_POSITIVE / 2.0), "0x0.8p-1022");
    }

    fn parse_hex(s: &str) -> f64 {
        let (neg, rest) = match s.strip_prefix('-') {
            Some(r) => (true, r),
            None => (false, s),
        };
        let rest = rest.strip_prefix("0x").unwrap();
        let (mant, exp) = rest.split_once('p').unwrap();
        let (lead, frac) = mant.split_once('.').unwrap_or((mant, ""));
        let mut m = u64::from_str_radix(lead, 16).unwrap() as f64;
        let mut scale = 1.0 / 16.0;
        for ch in frac.chars() {
            m += ch.to_digit(16).unwrap() as f64 * scale;
            scale /= 16.0;
        }
        let v = m * 2f64.powi(exp.parse().unwrap());
        if neg {
            -v
        } else {
            v
        }
    }

    proptest! {
        #[test]
        fn hex_float_is_exact(bits in any::<u64>()) {
            let v = f64::from_bits(bits);
            prop_assume!(v.is_finite() && v.abs() >= f64::MIN_POSITIVE);
            prop_assert_eq!(parse_hex(&hex_float(v)).to_bits(), v.to_bits());
        }

        #[test]
        fn csv_float_round_trips(v in any::<f64>()) {
            prop_assume!(v.is_finite());
            prop_assert_eq!(format_float(v).parse::<f64>().unwrap().to_bits(), v.to_bits());
        }
    }

    #[test]
    fn hex_mirrors_floats_only() {
        let v = with_hex(json!({"a": 0.5, "n": 3, "m": [[1.5, 2.0], [0.25, -1.0]], "s": "x", "inner": {"b": 2.5}}));
        assert_eq!(v["a_hex"], "0x1p-1");
        assert!(v.get("n_hex").is_none());
        assert!(v.get("s_hex").is_none());
        assert_eq!(v["m_hex"][1][0], "0x1p-2");
        assert_eq!(v["inner"]["b_hex"], "0x1.4p+1");
    }

    #[test]
    fn csv_layout() {
        let mut t = Table::new(&["c", "v"]);
        t.push(vec![Cell::from(0.5), Cell::from(true)]);
        assert_eq!(t.to_csv(), "c,v\n5.0000000000000000e-1,true\n");
    }
}
