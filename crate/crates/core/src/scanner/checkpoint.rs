//! Line-delimited checkpoint files: one JSON record per completed block.

use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::predicates::{Hit, PredicateId};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckpointRecord {
    pub scan: String,
    pub pred: PredicateId,
    /// Last `n` covered by this and all earlier records.
    pub upto: u64,
    /// Hits accumulated from the start of the range through `upto`.
    pub hits: Vec<Hit>,
    pub cfg: String,
}

/// Reads the records that parsed cleanly. A torn final line (from a crash
/// mid-write) is dropped; a malformed line anywhere else is an error.
pub fn read_records(path: &Path) -> Result<Vec<CheckpointRecord>> {
    let file = match File::open(path) {
        Ok(f) => f,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(Vec::new()),
        Err(e) => return Err(e.into()),
    };
    let lines: Vec<String> = BufReader::new(file).lines().collect::<std::io::Result<_>>()?;
    let mut out = Vec::new();
    let last = lines.len().saturating_sub(1);
    for (i, line) in lines.iter().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        match serde_json::from_str::<CheckpointRecord>(line) {
            Ok(r) => out.push(r),
            Err(_) if i == last => break,
            Err(e) => {
                return Err(Error::Checkpoint(format!(
                    "{}: line {} is not a checkpoint record: {e}",
                    path.display(),
                    i + 1
                )))
            }
        }
    }
    Ok(out)
}

/// Appends records, one line each, flushing after every write.
pub struct CheckpointWriter {
    path: PathBuf,
    file: File,
}

impl CheckpointWriter {
    /// Opens `path` for appending after rewriting it to hold exactly
    /// `keep`, which drops any torn tail left by an earlier run.
    pub fn open(path: &Path, keep: &[CheckpointRecord]) -> Result<Self> {
        let mut body = String::new();
        for r in keep {
            body.push_str(&serde_json::to_string(r)?);
            body.push('\n');
        }
        fs::write(path, body)?;
        let file = OpenOptions::new().append(true).open(path)?;
        Ok(Self { path: path.to_path_buf(), file })
    }

    pub fn append(&mut self, record: &CheckpointRecord) -> Result<()> {
        let mut line = serde_json::to_string(record)?;
        line.push('\n');
        self.file.write_all(line.as_bytes())?;
        self.file.flush()?;
        Ok(())
    }

    pub fn path(&self) -> &Path {
        &self.path
    }
}
