//! CSV output with RFC 4180 quoting; every file starts with a comment line
//! recording the config hash and tool version.

use crate::error::Result;
use std::fs::File;
use std::io::Write;
use std::path::Path;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Create a CSV writer whose first line is the provenance comment.
pub fn create(path: &Path, config_hash: u64) -> Result<csv::Writer<File>> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir)?;
        }
    }
    let mut file = File::create(path)?;
    writeln!(
        file,
        "# config_hash={config_hash:016x} tool_version={TOOL_VERSION}"
    )?;
    Ok(csv::WriterBuilder::new().from_writer(file))
}
