//! File plumbing for the command-line runner: JSON inputs with located
//! errors, atomic outputs.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;

use crate::error::Error;

/// A domain error, optionally tied to the file it came from.
#[derive(Debug)]
pub struct CliError {
    pub file: Option<PathBuf>,
    pub error: Error,
}

impl CliError {
    pub fn at(file: &Path, error: Error) -> Self {
        CliError { file: Some(file.to_path_buf()), error }
    }
}

impl From<Error> for CliError {
    fn from(error: Error) -> Self {
        CliError { file: None, error }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "error[{}]: ", self.error.category())?;
        if let Some(p) = &self.file {
            write!(f, "{}: ", p.display())?;
        }
        write!(f, "{}", self.error)
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

pub trait Located<T> {
    fn in_file(self, file: &Path) -> CliResult<T>;
}

impl<T> Located<T> for crate::Result<T> {
    fn in_file(self, file: &Path) -> CliResult<T> {
        self.map_err(|e| CliError::at(file, e))
    }
}

pub fn read_bytes(path: &Path) -> CliResult<Vec<u8>> {
    std::fs::read(path).map_err(|e| CliError::at(path, e.into()))
}

/// Byte offset of a 1-based line/column position.
fn byte_offset(text: &str, line: usize, column: usize) -> usize {
    let before: usize = text.split_inclusive('\n').take(line.saturating_sub(1)).map(str::len).sum();
    before + column.saturating_sub(1)
}

pub fn parse_json<T: DeserializeOwned>(path: &Path) -> CliResult<T> {
    let bytes = read_bytes(path)?;
    let text = std::str::from_utf8(&bytes)
        .map_err(|e| CliError::at(path, Error::decode(e.valid_up_to(), "input is not UTF-8")))?;
    serde_json::from_str(text).map_err(|e| {
        let offset = byte_offset(text, e.line(), e.column());
        CliError::at(path, Error::decode(offset, format!("malformed JSON: {e}")))
    })
}

/// Writes through a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, contents: &[u8]) -> CliResult<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let fail = |e: std::io::Error| CliError::at(path, e.into());
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(fail)?;
    tmp.write_all(contents).map_err(fail)?;
    tmp.as_file().sync_all().map_err(fail)?;
    tmp.persist(path).map_err(|e| fail(e.error))?;
    Ok(())
}

pub fn to_json_bytes<T: serde::Serialize>(value: &T) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(value).expect("reports serialize");
    out.push(b'\n');
    out
}
