use serde_json::{Map, Value};
use std::io::{self, Write};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(format!("unknown format `{s}` (csv or json)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Text(String),
    Int(i128),
    Float(f64),
    Bool(bool),
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Float(x)
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Bool(b)
    }
}

macro_rules! int_cell {
    ($($t:ty),*) => {$(
        impl From<$t> for Cell {
            fn from(x: $t) -> Self {
                Cell::Int(x as i128)
            }
        }
    )*};
}
int_cell!(usize, u64, u32, i64);

/// `%.12g`-style rendering: 12 significant digits, trailing zeros trimmed.
pub fn sig12(x: f64) -> String {
    if !x.is_finite() {
        return if x.is_nan() { "nan".into() } else if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.11e}", x);
    let (mant, exp) = sci.split_once('e').unwrap();
    let exp: i32 = exp.parse().unwrap();
    let trim = |s: String| -> String {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    };
    if (-5..12).contains(&exp) {
        trim(format!("{:.*}", (11 - exp).max(0) as usize, x))
    } else {
        format!("{}e{}", trim(mant.to_string()), exp)
    }
}

impl Cell {
    fn text(&self) -> String {
        match self {
            Cell::Text(s) => s.clone(),
            Cell::Int(i) => i.to_string(),
            Cell::Float(x) => sig12(*x),
            Cell::Bool(b) => b.to_string(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Text(s) => Value::String(s.clone()),
            Cell::Int(i) => i64::try_from(*i).map(Value::from).unwrap_or_else(|_| Value::String(i.to_string())),
            Cell::Float(x) if x.is_finite() => serde_json::from_str(&sig12(*x)).unwrap(),
            Cell::Float(_) => Value::Null,
            Cell::Bool(b) => Value::Bool(*b),
        }
    }
}

/// A table with a versioned schema plus any failed property checks.
#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub schema: &'static str,
    pub columns: &'static [&'static str],
    pub rows: Vec<Vec<Cell>>,
    pub failures: Vec<String>,
}

impl Report {
    pub fn new(schema: &'static str, columns: &'static [&'static str]) -> Self {
        Report { schema, columns, rows: Vec::new(), failures: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width for {}", self.schema);
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| *c == name)
    }

    pub fn write<W: Write>(&self, out: &mut W, format: Format) -> io::Result<()> {
        match format {
            Format::Csv => {
                writeln!(out, "# schema: {}", self.schema)?;
                let mut w = csv::Writer::from_writer(&mut *out);
                w.write_record(self.columns)?;
                for r in &self.rows {
                    w.write_record(r.iter().map(Cell::text))?;
                }
                w.flush()?;
                drop(w);
                for f in &self.failures {
                    writeln!(out, "# FAIL {f}")?;
                }
                Ok(())
            }
            Format::Json => {
                let rows: Vec<Value> = self
                    .rows
                    .iter()
                    .map(|r| {
                        let m: Map<String, Value> = self.columns.iter().zip(r).map(|(c, v)| (c.to_string(), v.json())).collect();
                        Value::Object(m)
                    })
                    .collect();
                let mut top = Map::new();
                top.insert("schema".into(), Value::String(self.schema.into()));
                top.insert("rows".into(), Value::Array(rows));
                top.insert("failures".into(), Value::Array(self.failures.iter().cloned().map(Value::String).collect()));
                serde_json::to_writer_pretty(&mut *out, &Value::Object(top))?;
                writeln!(out)
            }
        }
    }

    pub fn render(&self, format: Format) -> String {
        let mut buf = Vec::new();
        self.write(&mut buf, format).expect("writing to memory");
        String::from_utf8(buf).expect("utf-8 report")
    }
}
