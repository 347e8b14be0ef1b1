//! All-or-nothing output: every artifact is staged as a temp file in the
//! output directory and only renamed into place once all of them are written.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use tempfile::NamedTempFile;

use crate::error::{CliError, CliResult};

#[derive(Default)]
pub struct ArtifactSet {
    files: Vec<(PathBuf, Vec<u8>)>,
}

impl ArtifactSet {
    /// `rel` may contain one subdirectory level, e.g. `frames/0001.png`.
    pub fn add(&mut self, rel: impl Into<PathBuf>, bytes: Vec<u8>) {
        self.files.push((rel.into(), bytes));
    }

    pub fn commit(self, out: &Path) -> CliResult<Vec<PathBuf>> {
        let io = |what: &str, p: &Path, e: std::io::Error| CliError::Runtime(format!("{what} {}: {e}", p.display()));
        let mut created_dirs = Vec::new();
        let result = (|| {
            let mut staged = Vec::with_capacity(self.files.len());
            for (rel, bytes) in &self.files {
                let dest = out.join(rel);
                let dir = dest.parent().unwrap_or(out).to_path_buf();
                if !dir.exists() {
                    fs::create_dir_all(&dir).map_err(|e| io("cannot create", &dir, e))?;
                    created_dirs.push(dir.clone());
                }
                let mut tmp = NamedTempFile::new_in(&dir).map_err(|e| io("cannot stage in", &dir, e))?;
                tmp.write_all(bytes).map_err(|e| io("cannot write", &dest, e))?;
                tmp.as_file().sync_all().map_err(|e| io("cannot sync", &dest, e))?;
                staged.push((tmp, dest));
            }
            let mut written = Vec::with_capacity(staged.len());
            for (tmp, dest) in staged {
                if let Err(e) = tmp.persist(&dest) {
                    for w in &written {
                        let _ = fs::remove_file(w);
                    }
                    return Err(io("cannot rename into", &dest, e.error));
                }
                written.push(dest);
            }
            Ok(written)
        })();
        if result.is_err() {
            // Temp files are removed on drop; drop directories we made if empty.
            for dir in created_dirs.iter().rev() {
                let _ = fs::remove_dir(dir);
            }
        }
        result
    }
}
