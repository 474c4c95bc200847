//! JSON tensor files: `{"k": 1, "n": 4, "entries": [[[z_111, …], …]]}`
//! with `k × n × n` entries, each a number or an `[re, im]` pair.

use std::path::Path;

use diagsum::hafnian::HafnianTensor;
use num_complex::Complex64;
use serde::Deserialize;

use crate::error::CliError;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct TensorFile {
    k: usize,
    n: usize,
    entries: Vec<Vec<Vec<Value>>>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(untagged)]
enum Value {
    Real(f64),
    Complex([f64; 2]),
}

impl From<Value> for Complex64 {
    fn from(v: Value) -> Self {
        match v {
            Value::Real(x) => Complex64::new(x, 0.0),
            Value::Complex([re, im]) => Complex64::new(re, im),
        }
    }
}

pub fn parse_tensor(text: &str) -> Result<HafnianTensor, String> {
    let file: TensorFile = serde_json::from_str(text).map_err(|e| e.to_string())?;
    let (k, n) = (file.k, file.n);
    if file.entries.len() != k {
        return Err(format!("entries has {} slices, expected k = {k}", file.entries.len()));
    }
    let mut flat = Vec::with_capacity(k * n * n);
    for (l, slice) in file.entries.iter().enumerate() {
        if slice.len() != n {
            return Err(format!("slice {} has {} rows, expected n = {n}", l + 1, slice.len()));
        }
        for (r, row) in slice.iter().enumerate() {
            if row.len() != n {
                return Err(format!(
                    "slice {}, row {} has {} values, expected n = {n}",
                    l + 1,
                    r + 1,
                    row.len()
                ));
            }
            flat.extend(row.iter().map(|&v| Complex64::from(v)));
        }
    }
    HafnianTensor::new(k, n, flat).map_err(|e| e.to_string())
}

pub fn read_tensor(path: &Path) -> Result<HafnianTensor, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_tensor(&text).map_err(|message| CliError::Input {
        path: path.to_path_buf(),
        message,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mixed_values() {
        let t = parse_tensor(r#"{"k":1,"n":2,"entries":[[[0,[1,-2]],[3.5,0]]]}"#).unwrap();
        assert_eq!(t.get(0, 0, 1), Complex64::new(1.0, -2.0));
        assert_eq!(t.get(0, 1, 0), Complex64::new(3.5, 0.0));
    }

    #[test]
    fn shape_errors() {
        assert!(parse_tensor(r#"{"k":1,"n":2,"entries":[[[0,1]]]}"#)
            .unwrap_err()
            .contains("1 rows"));
        assert!(parse_tensor(r#"{"k":2,"n":2,"entries":[[[0,1],[1,0]],[[0,1],[1,0]]]}"#).is_err());
    }
}
