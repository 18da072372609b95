//! Small filesystem helpers shared by the library and the CLI.
//!
//! All writes go through [`write_atomic`] so that a crash or interrupt never
//! leaves a half-written checkpoint or report behind: content is first
//! written to a sibling `<name>.partial` file, then renamed over the target.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

/// Write `contents` to `path` atomically.
///
/// The data is written to `<path>.partial` in the same directory and then
/// renamed onto `path`, so readers observe either the old file or the new
/// one, never a truncated intermediate. Errors are tagged with the path that
/// failed.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let mut partial = path.as_os_str().to_owned();
    partial.push(".partial");
    let partial = std::path::PathBuf::from(partial);
    fs::write(&partial, contents).map_err(|e| Error::io(&partial, e))?;
    fs::rename(&partial, path).map_err(|e| Error::io(path, e))?;
    Ok(())
}

/// Read a file into a string, tagging any failure with the offending path.
pub fn read_to_string(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}
