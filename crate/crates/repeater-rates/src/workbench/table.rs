//! Row-major result tables and their CSV/JSON emission.
//!
//! Both formats carry the same values: parsing a CSV cell or the matching
//! JSON field yields the identical number (floats are written
//! shortest-round-trip in both). Non-finite floats, which JSON numbers
//! cannot hold, become the strings `"inf"`, `"-inf"`, `"nan"` in both
//! formats; absent values become an empty CSV field and a JSON `null`.

use std::io::Write;

use crate::Result;

/// One table cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Str(String),
    /// Not applicable for this row (for example `gamma` on a scheme without
    /// a source-excitation knob).
    Missing,
}

impl Cell {
    pub fn num(v: f64) -> Cell {
        Cell::Num(v)
    }

    pub fn text(s: impl Into<String>) -> Cell {
        Cell::Str(s.into())
    }

    /// Terminal rendering; `-` marks a missing value.
    pub fn display(&self) -> String {
        match self {
            Cell::Missing => "-".to_string(),
            other => other.csv_text(),
        }
    }

    fn csv_text(&self) -> String {
        match self {
            Cell::Num(v) => format_float(*v),
            Cell::Str(s) => s.clone(),
            Cell::Missing => String::new(),
        }
    }

    fn json_value(&self) -> serde_json::Value {
        match self {
            Cell::Num(v) => match serde_json::Number::from_f64(*v) {
                Some(n) => serde_json::Value::Number(n),
                None => serde_json::Value::String(format_float(*v)),
            },
            Cell::Str(s) => serde_json::Value::String(s.clone()),
            Cell::Missing => serde_json::Value::Null,
        }
    }
}

/// Formats a float so `str::parse::<f64>` recovers it exactly: scientific
/// notation below 1e-3 in magnitude (per the CSV convention), plain shortest
/// form otherwise, and `inf`/`-inf`/`nan` spelled out.
pub fn format_float(v: f64) -> String {
    if v.is_nan() {
        "nan".to_string()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.to_string()
    } else if v != 0.0 && v.abs() < 1e-3 {
        format!("{v:e}")
    } else {
        format!("{v}")
    }
}

/// Column-named rows; every row carries the full parameter tuple that
/// produced it, so any row read in isolation is reproducible.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultTable {
    columns: Vec<String>,
    rows: Vec<Vec<Cell>>,
}

impl ResultTable {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> ResultTable {
        ResultTable {
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn rows(&self) -> &[Vec<Cell>] {
        &self.rows
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    /// Arity mismatches are construction bugs, not runtime conditions.
    pub fn push_row(&mut self, cells: Vec<Cell>) {
        assert_eq!(
            cells.len(),
            self.columns.len(),
            "row arity does not match column schema"
        );
        self.rows.push(cells);
    }

    pub fn get(&self, row: usize, column: &str) -> Option<&Cell> {
        let ci = self.columns.iter().position(|c| c == column)?;
        self.rows.get(row)?.get(ci)
    }

    /// The cell as a float, parsing the string spellings of non-finite
    /// values; `None` for missing cells and non-numeric strings.
    pub fn get_num(&self, row: usize, column: &str) -> Option<f64> {
        match self.get(row, column)? {
            Cell::Num(v) => Some(*v),
            Cell::Str(s) => s.parse().ok(),
            Cell::Missing => None,
        }
    }

    pub fn write_csv(&self, w: impl Write) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        wtr.write_record(&self.columns)
            .map_err(csv_io)?;
        for row in &self.rows {
            wtr.write_record(row.iter().map(|c| c.csv_text()))
                .map_err(csv_io)?;
        }
        wtr.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("in-memory write");
        String::from_utf8(buf).expect("csv output is utf-8")
    }

    pub fn write_json(&self, mut w: impl Write) -> Result<()> {
        let records: Vec<serde_json::Value> = self
            .rows
            .iter()
            .map(|row| {
                let map: serde_json::Map<String, serde_json::Value> = self
                    .columns
                    .iter()
                    .zip(row)
                    .map(|(c, cell)| (c.clone(), cell.json_value()))
                    .collect();
                serde_json::Value::Object(map)
            })
            .collect();
        serde_json::to_writer_pretty(&mut w, &records)
            .map_err(|e| crate::Error::Output(std::io::Error::other(e)))?;
        w.write_all(b"\n")?;
        Ok(())
    }

    pub fn to_json_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_json(&mut buf).expect("in-memory write");
        String::from_utf8(buf).expect("json output is utf-8")
    }
}

fn csv_io(e: csv::Error) -> crate::Error {
    crate::Error::Output(std::io::Error::other(e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> ResultTable {
        let mut t = ResultTable::new(["name", "value", "flag"]);
        t.push_row(vec![
            Cell::text("plain"),
            Cell::num(2.1632458),
            Cell::text("a,b \"quoted\""),
        ]);
        t.push_row(vec![Cell::text("tiny"), Cell::num(-3.25e-7), Cell::Missing]);
        t.push_row(vec![Cell::text("inf"), Cell::num(f64::INFINITY), Cell::Missing]);
        t.push_row(vec![Cell::text("zero"), Cell::num(0.0), Cell::Missing]);
        t
    }

    #[test]
    fn csv_and_json_agree_value_for_value() {
        let t = sample();
        let csv_text = t.to_csv_string();
        let mut rdr = csv::Reader::from_reader(csv_text.as_bytes());
        let csv_rows: Vec<csv::StringRecord> = rdr.records().map(|r| r.unwrap()).collect();

        let json: serde_json::Value = serde_json::from_str(&t.to_json_string()).unwrap();
        let records = json.as_array().unwrap();
        assert_eq!(records.len(), csv_rows.len());

        for (rec, csv_row) in records.iter().zip(&csv_rows) {
            for (ci, col) in t.columns().iter().enumerate() {
                let jv = &rec[col.as_str()];
                let cv = &csv_row[ci];
                match jv {
                    serde_json::Value::Number(n) => {
                        let parsed: f64 = cv.parse().unwrap();
                        assert_eq!(parsed, n.as_f64().unwrap(), "{col}");
                    }
                    serde_json::Value::String(s) => assert_eq!(cv, s, "{col}"),
                    serde_json::Value::Null => assert_eq!(cv, "", "{col}"),
                    other => panic!("unexpected json value {other:?}"),
                }
            }
        }
    }

    #[test]
    fn csv_floats_round_trip_exactly() {
        let values = [2.1632458f64, -3.25e-7, 1.0 / 3.0, 6.02e23, 1e-300];
        for v in values {
            let parsed: f64 = format_float(v).parse().unwrap();
            assert_eq!(parsed.to_bits(), v.to_bits(), "{v}");
        }
        assert_eq!(format_float(f64::INFINITY), "inf");
        assert_eq!(format_float(f64::NEG_INFINITY), "-inf");
        assert_eq!(format_float(f64::NAN), "nan");
        assert_eq!(format_float(0.0), "0");
        assert!(format_float(9.9e-4).contains('e'));
        assert!(!format_float(1e-3).contains('e'));
    }

    #[test]
    fn quoting_survives_round_trip() {
        let t = sample();
        let text = t.to_csv_string();
        let mut rdr = csv::Reader::from_reader(text.as_bytes());
        let first = rdr.records().next().unwrap().unwrap();
        assert_eq!(&first[2], "a,b \"quoted\"");
    }

    #[test]
    #[should_panic(expected = "row arity")]
    fn arity_mismatch_panics() {
        let mut t = ResultTable::new(["a", "b"]);
        t.push_row(vec![Cell::num(1.0)]);
    }
}
