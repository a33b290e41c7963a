//! Host side of the OPAL engine: file formats, task instances on disk,
//! layered configuration, the remote model backend, single runs and
//! benchmark runs, and the `opal` command line.

pub mod bench;
pub mod cli;
pub mod config;
pub mod format;
pub mod instance;
pub mod remote;
pub mod run;

use std::io;
use std::path::Path;
use std::sync::OnceLock;
use std::time::Instant;

use opal_core::tools::Clock;

/// Milliseconds since the first call in this process.
pub struct SystemClock;

impl Clock for SystemClock {
    fn now_ms(&self) -> u64 {
        static START: OnceLock<Instant> = OnceLock::new();
        START.get_or_init(Instant::now).elapsed().as_millis() as u64
    }
}

/// Writes `contents` to `path` through a temporary file in the same
/// directory, so readers never see a partial file.
pub fn write_atomic(path: &Path, contents: &[u8]) -> io::Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    io::Write::write_all(&mut tmp, contents)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}
