//! On-disk result cache. Each entry is one file named by the request key,
//! holding a SHA-256 line for the payload followed by the payload itself.

use std::io::Write;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::input::warn;

pub struct Cache {
    dir: PathBuf,
}

pub fn digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

impl Cache {
    pub fn open(dir: &Path) -> std::io::Result<Self> {
        std::fs::create_dir_all(dir)?;
        Ok(Cache { dir: dir.to_path_buf() })
    }

    fn path(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{key}.json"))
    }

    /// The stored payload, or `None` on a miss. A damaged entry is reported
    /// and treated as a miss.
    pub fn lookup(&self, key: &str) -> Option<String> {
        let text = std::fs::read_to_string(self.path(key)).ok()?;
        let intact = text
            .split_once('\n')
            .filter(|(sum, body)| digest(body.as_bytes()) == *sum)
            .map(|(_, body)| body.to_string());
        if intact.is_none() {
            warn(&format!("cache entry {key} is corrupted; recomputing"));
        }
        intact
    }

    /// Writes through a temporary file in the same directory and renames it
    /// into place, so readers never see a partial entry.
    pub fn store(&self, key: &str, body: &str) -> std::io::Result<()> {
        let mut tmp = tempfile::NamedTempFile::new_in(&self.dir)?;
        writeln!(tmp, "{}", digest(body.as_bytes()))?;
        tmp.write_all(body.as_bytes())?;
        tmp.as_file().sync_all()?;
        tmp.persist(self.path(key)).map_err(|e| e.error)?;
        Ok(())
    }
}
