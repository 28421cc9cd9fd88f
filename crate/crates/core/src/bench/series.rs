use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};

#[derive(Deserialize)]
struct Record {
    t: usize,
    value: f64,
}

/// Reads a `t,value` CSV with contiguous 1-based periods.
pub fn load_series(path: impl AsRef<Path>) -> Result<Vec<f64>> {
    let path = path.as_ref();
    let err = |msg: String| Error::Series { path: path.to_path_buf(), msg };
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| err(e.to_string()))?;
    let headers = reader.headers().map_err(|e| err(e.to_string()))?;
    if headers.iter().collect::<Vec<_>>() != ["t", "value"] {
        return Err(err(format!("expected header `t,value`, found `{}`", headers.iter().collect::<Vec<_>>().join(","))));
    }
    let mut values = Vec::new();
    for (line, rec) in reader.deserialize::<Record>().enumerate() {
        let rec = rec.map_err(|e| err(format!("row {}: {e}", line + 1)))?;
        let expected = values.len() + 1;
        if rec.t > expected {
            return Err(err(format!("gap at period {expected}")));
        }
        if rec.t < expected {
            return Err(err(format!("period {} repeated or out of order", rec.t)));
        }
        if !rec.value.is_finite() {
            return Err(err(format!("non-finite value at period {}", rec.t)));
        }
        values.push(rec.value);
    }
    if values.is_empty() {
        return Err(err("no rows".into()));
    }
    Ok(values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write(text: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(text.as_bytes()).unwrap();
        f
    }

    #[test]
    fn full_day() {
        let mut text = String::from("t,value\n");
        for t in 1..=24 {
            text += &format!("{t},{}\n", t as f64 - 12.5);
        }
        let v = load_series(write(&text).path()).unwrap();
        assert_eq!(v.len(), 24);
        assert_eq!(v[0], -11.5);
    }

    #[test]
    fn gap_is_reported() {
        let mut text = String::from("t,value\n");
        for t in (1..=24).filter(|&t| t != 13) {
            text += &format!("{t},1.0\n");
        }
        let e = load_series(write(&text).path()).unwrap_err().to_string();
        assert!(e.ends_with("gap at period 13"), "{e}");
    }

    #[test]
    fn malformed_rows() {
        assert!(load_series(write("t,value\n1,abc\n").path()).is_err());
        assert!(load_series(write("hour,price\n1,2\n").path()).is_err());
        assert!(load_series(write("t,value\n1,2\n1,3\n").path()).is_err());
        assert!(load_series(write("t,value\n").path()).is_err());
    }
}
