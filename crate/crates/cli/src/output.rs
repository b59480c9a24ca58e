use std::io::Write;
use std::path::{Path, PathBuf};

use tempfile::NamedTempFile;

use crate::error::CliError;

fn staging_dir(path: &Path) -> PathBuf {
    match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    }
}

/// Staged outputs that only appear at their final paths on `commit`.
/// Dropping without committing removes every staged file.
#[derive(Default)]
pub struct Outputs {
    staged: Vec<(NamedTempFile, PathBuf)>,
}

impl Outputs {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_bytes(&mut self, path: &Path, bytes: &[u8]) -> Result<(), CliError> {
        let mut tmp = NamedTempFile::new_in(staging_dir(path))
            .map_err(|e| CliError::Runtime(format!("cannot stage {}: {e}", path.display())))?;
        tmp.write_all(bytes)?;
        tmp.flush()?;
        self.staged.push((tmp, path.to_path_buf()));
        Ok(())
    }

    pub fn add_text(&mut self, path: &Path, text: &str) -> Result<(), CliError> {
        self.add_bytes(path, text.as_bytes())
    }

    pub fn commit(self) -> Result<(), CliError> {
        for (tmp, path) in self.staged {
            tmp.persist(&path)
                .map_err(|e| CliError::Runtime(format!("cannot write {}: {}", path.display(), e.error)))?;
        }
        Ok(())
    }
}
