use std::io::Write;
use std::path::Path;

use serde::Serialize;
use tempfile::NamedTempFile;

use crate::error::CliError;

/// Pretty JSON with a trailing newline. Floats use the shortest
/// representation that parses back to the same value.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports always serialize");
    s.push('\n');
    s
}

/// Writes `contents` to `path` through a temporary file in the same
/// directory and a rename, or to stdout when `path` is `None`.
pub fn emit(path: Option<&Path>, contents: &[u8]) -> Result<(), CliError> {
    match path {
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(contents)
                .and_then(|_| out.flush())
                .map_err(|e| CliError::io("<stdout>", e))
        }
        Some(path) => {
            let dir = match path.parent() {
                Some(p) if !p.as_os_str().is_empty() => p,
                _ => Path::new("."),
            };
            let mut tmp = NamedTempFile::new_in(dir).map_err(|e| CliError::io(dir, e))?;
            tmp.write_all(contents).map_err(|e| CliError::io(tmp.path(), e))?;
            tmp.persist(path).map_err(|e| CliError::io(path, e.error))?;
            Ok(())
        }
    }
}
