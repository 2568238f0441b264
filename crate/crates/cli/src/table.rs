use std::fmt::Write as _;
use std::io::{self, Write};

use serde_json::{Map, Number, Value};

/// Significant digits for floating-point output.
pub const SIG_DIGITS: usize = 12;

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
    Bool(bool),
    Empty,
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<u64> for Cell {
    fn from(x: u64) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<bool> for Cell {
    fn from(x: bool) -> Self {
        Cell::Bool(x)
    }
}

impl From<&str> for Cell {
    fn from(x: &str) -> Self {
        Cell::Text(x.to_string())
    }
}

impl From<String> for Cell {
    fn from(x: String) -> Self {
        Cell::Text(x)
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(x: Option<T>) -> Self {
        x.map_or(Cell::Empty, Into::into)
    }
}

/// Fixed-point with 12 significant digits for moderate magnitudes,
/// scientific otherwise. Zero prints as `0`.
pub fn format_num(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let mag = x.abs().log10().floor() as i32;
    if (-4..12).contains(&mag) {
        let decimals = (SIG_DIGITS as i32 - 1 - mag) as usize;
        format!("{x:.decimals$}")
    } else {
        format!("{x:.prec$e}", prec = SIG_DIGITS - 1)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

pub struct Table {
    header: Vec<&'static str>,
    rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(header: Vec<&'static str>) -> Self {
        Self { header, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut s = self.header.join(",");
        s.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row
                .iter()
                .map(|c| match c {
                    Cell::Num(x) => format_num(*x),
                    Cell::Int(i) => i.to_string(),
                    Cell::Bool(b) => b.to_string(),
                    Cell::Text(t) if t.contains([',', '"', '\n']) => format!("\"{}\"", t.replace('"', "\"\"")),
                    Cell::Text(t) => t.clone(),
                    Cell::Empty => String::new(),
                })
                .collect();
            let _ = writeln!(s, "{}", cells.join(","));
        }
        s
    }

    pub fn to_json(&self) -> String {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let mut m = Map::new();
                for (h, c) in self.header.iter().zip(row) {
                    let v = match c {
                        // Round through the text form so JSON and CSV agree.
                        Cell::Num(x) => format_num(*x)
                            .parse::<f64>()
                            .ok()
                            .and_then(Number::from_f64)
                            .map_or(Value::Null, Value::Number),
                        Cell::Int(i) => Value::from(*i),
                        Cell::Bool(b) => Value::Bool(*b),
                        Cell::Text(t) => Value::String(t.clone()),
                        Cell::Empty => Value::Null,
                    };
                    m.insert(h.to_string(), v);
                }
                Value::Object(m)
            })
            .collect();
        let mut s = serde_json::to_string_pretty(&rows).expect("plain values");
        s.push('\n');
        s
    }

    pub fn write(&self, format: Format, out: &mut dyn Write) -> io::Result<()> {
        let text = match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        };
        out.write_all(text.as_bytes())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_formats() {
        assert_eq!(format_num(0.912260037), "0.912260037000");
        assert_eq!(format_num(1.0), "1.00000000000");
        assert_eq!(format_num(-12.5), "-12.5000000000");
        assert_eq!(format_num(3.0e-13), "3.00000000000e-13");
        assert_eq!(format_num(0.0), "0");
    }

    #[test]
    fn csv_quotes_commas() {
        let mut t = Table::new(vec!["rule", "p"]);
        t.push(vec!["maj,maj,dict:1".into(), Cell::Empty]);
        assert_eq!(t.to_csv(), "rule,p\n\"maj,maj,dict:1\",\n");
    }
}
