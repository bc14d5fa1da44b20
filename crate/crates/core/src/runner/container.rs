use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;
use serde_json::Value;

use crate::error::{Error, Result};

/// One named entry of a [`DataContainer`].
#[derive(Debug, Clone, PartialEq)]
pub enum Entry {
    Scalar(f64),
    Text(String),
    /// Appendable rows of real numbers; every row has the same length.
    Real(Vec<Vec<f64>>),
    /// Appendable rows of complex numbers, stored as `[re, im]` pairs.
    Complex(Vec<Vec<Complex64>>),
}

/// Ordered map of named scalars and series, saved as JSON.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct DataContainer {
    entries: BTreeMap<String, Entry>,
}

fn check_row<T>(key: &str, rows: &[Vec<T>], len: usize) -> Result<()> {
    match rows.first() {
        Some(first) if first.len() != len => Err(Error::invalid(format!(
            "row of length {len} appended to `{key}`, which holds rows of length {}",
            first.len()
        ))),
        _ => Ok(()),
    }
}

impl DataContainer {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn get(&self, key: &str) -> Option<&Entry> {
        self.entries.get(key)
    }

    pub fn contains(&self, key: &str) -> bool {
        self.entries.contains_key(key)
    }

    pub fn set_scalar(&mut self, key: &str, value: f64) {
        self.entries.insert(key.to_string(), Entry::Scalar(value));
    }

    pub fn set_text(&mut self, key: &str, value: impl Into<String>) {
        self.entries.insert(key.to_string(), Entry::Text(value.into()));
    }

    /// Appends a real row, creating the series if needed.
    pub fn append(&mut self, key: &str, row: Vec<f64>) -> Result<()> {
        match self.entries.entry(key.to_string()).or_insert_with(|| Entry::Real(Vec::new())) {
            Entry::Real(rows) => {
                check_row(key, rows, row.len())?;
                rows.push(row);
                Ok(())
            }
            _ => Err(Error::invalid(format!("`{key}` is not a real series"))),
        }
    }

    pub fn append_complex(&mut self, key: &str, row: Vec<Complex64>) -> Result<()> {
        match self.entries.entry(key.to_string()).or_insert_with(|| Entry::Complex(Vec::new())) {
            Entry::Complex(rows) => {
                check_row(key, rows, row.len())?;
                rows.push(row);
                Ok(())
            }
            _ => Err(Error::invalid(format!("`{key}` is not a complex series"))),
        }
    }

    pub fn scalar(&self, key: &str) -> Option<f64> {
        match self.entries.get(key) {
            Some(Entry::Scalar(v)) => Some(*v),
            _ => None,
        }
    }

    pub fn text(&self, key: &str) -> Option<&str> {
        match self.entries.get(key) {
            Some(Entry::Text(s)) => Some(s),
            _ => None,
        }
    }

    pub fn real(&self, key: &str) -> Option<&[Vec<f64>]> {
        match self.entries.get(key) {
            Some(Entry::Real(rows)) => Some(rows),
            _ => None,
        }
    }

    pub fn complex(&self, key: &str) -> Option<&[Vec<Complex64>]> {
        match self.entries.get(key) {
            Some(Entry::Complex(rows)) => Some(rows),
            _ => None,
        }
    }

    /// JSON text with sorted keys, one row per line and every number
    /// written with 17 significant digits.
    pub fn to_json(&self) -> Result<String> {
        if self.entries.is_empty() {
            return Ok("{}\n".to_string());
        }
        let mut out = String::from("{\n");
        let last = self.entries.len() - 1;
        for (k, (key, entry)) in self.entries.iter().enumerate() {
            write!(out, "  {}: ", quote(key)).unwrap();
            match entry {
                Entry::Scalar(v) => out.push_str(&number(key, *v)?),
                Entry::Text(s) => out.push_str(&quote(s)),
                Entry::Real(rows) => write_rows(&mut out, rows, |v| number(key, *v))?,
                Entry::Complex(rows) => write_rows(&mut out, rows, |z| {
                    Ok(format!("[{}, {}]", number(key, z.re)?, number(key, z.im)?))
                })?,
            }
            out.push_str(if k == last { "\n" } else { ",\n" });
        }
        out.push_str("}\n");
        Ok(out)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let value: Value = serde_json::from_str(text).map_err(|e| Error::invalid(format!("malformed container: {e}")))?;
        let Value::Object(map) = value else {
            return Err(Error::invalid("container must be a JSON object"));
        };
        let mut entries = BTreeMap::new();
        for (key, v) in map {
            let entry = parse_entry(&key, &v)?;
            entries.insert(key, entry);
        }
        Ok(Self { entries })
    }
}

fn quote(s: &str) -> String {
    serde_json::to_string(s).expect("strings always serialize")
}

fn number(key: &str, v: f64) -> Result<String> {
    if !v.is_finite() {
        return Err(Error::invalid(format!("`{key}` holds a non-finite value")));
    }
    Ok(format!("{v:.16e}"))
}

fn write_rows<T>(out: &mut String, rows: &[Vec<T>], fmt: impl Fn(&T) -> Result<String>) -> Result<()> {
    if rows.is_empty() {
        out.push_str("[]");
        return Ok(());
    }
    out.push_str("[\n");
    for (r, row) in rows.iter().enumerate() {
        let items = row.iter().map(&fmt).collect::<Result<Vec<_>>>()?;
        write!(out, "    [{}]", items.join(", ")).unwrap();
        out.push_str(if r + 1 == rows.len() { "\n" } else { ",\n" });
    }
    out.push_str("  ]");
    Ok(())
}

fn as_f64(key: &str, v: &Value) -> Result<f64> {
    v.as_f64().ok_or_else(|| Error::invalid(format!("`{key}` holds a non-numeric element")))
}

fn parse_entry(key: &str, v: &Value) -> Result<Entry> {
    let bad = || Error::invalid(format!("`{key}` is neither a scalar, a string nor an array of rows"));
    match v {
        Value::Number(_) => Ok(Entry::Scalar(as_f64(key, v)?)),
        Value::String(s) => Ok(Entry::Text(s.clone())),
        Value::Array(rows) => {
            let rows: Vec<&Vec<Value>> = rows.iter().map(|r| r.as_array().ok_or_else(bad)).collect::<Result<_>>()?;
            let complex = rows.iter().flat_map(|r| r.first()).next().is_some_and(Value::is_array);
            let mut entry = if complex { Entry::Complex(Vec::new()) } else { Entry::Real(Vec::new()) };
            for row in rows {
                match &mut entry {
                    Entry::Real(out) => {
                        let r = row.iter().map(|x| as_f64(key, x)).collect::<Result<Vec<_>>>()?;
                        check_row(key, out, r.len())?;
                        out.push(r);
                    }
                    Entry::Complex(out) => {
                        let r = row
                            .iter()
                            .map(|x| match x.as_array().map(Vec::as_slice) {
                                Some([re, im]) => Ok(Complex64::new(as_f64(key, re)?, as_f64(key, im)?)),
                                _ => Err(Error::invalid(format!("`{key}` holds a malformed complex pair"))),
                            })
                            .collect::<Result<Vec<_>>>()?;
                        check_row(key, out, r.len())?;
                        out.push(r);
                    }
                    _ => unreachable!(),
                }
            }
            Ok(entry)
        }
        _ => Err(bad()),
    }
}

/// Writes `dc` to a `.json` file.
pub fn save_container(dc: &DataContainer, path: &Path) -> Result<()> {
    if path.extension().and_then(|e| e.to_str()) != Some("json") {
        return Err(Error::invalid(format!("{} does not end in .json", path.display())));
    }
    let text = dc.to_json()?;
    std::fs::write(path, text).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn load_container(path: &Path) -> Result<DataContainer> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    DataContainer::from_json(&text)
}
