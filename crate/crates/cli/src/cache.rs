//! Write-once result cache on disk, one checksummed JSON file per key.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use hurstab_core::experiments::ResultCache;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Serialize, Deserialize)]
struct Entry {
    key: String,
    checksum: String,
    value: String,
}

fn digest(s: &str) -> String {
    hex::encode(Sha256::digest(s.as_bytes()))
}

pub struct DiskCache {
    root: PathBuf,
    error: Mutex<Option<std::io::Error>>,
}

impl DiskCache {
    pub fn open(root: &Path) -> std::io::Result<DiskCache> {
        fs::create_dir_all(root)?;
        // fail early on a read-only root
        tempfile::NamedTempFile::new_in(root)?;
        Ok(DiskCache {
            root: root.to_path_buf(),
            error: Mutex::new(None),
        })
    }

    /// Platform cache directory, or `HURSTAB_CACHE` when set.
    pub fn default_root() -> PathBuf {
        match std::env::var_os("HURSTAB_CACHE") {
            Some(p) => PathBuf::from(p),
            None => dirs::cache_dir()
                .unwrap_or_else(std::env::temp_dir)
                .join("hurstab"),
        }
    }

    fn path(&self, key: &str) -> PathBuf {
        self.root.join(format!("{}.json", digest(key)))
    }

    fn read(&self, key: &str) -> Option<String> {
        let text = fs::read_to_string(self.path(key)).ok()?;
        let entry: Entry = serde_json::from_str(&text).ok()?;
        (entry.key == key && entry.checksum == digest(&entry.value)).then_some(entry.value)
    }

    fn write(&self, key: &str, value: &str) -> std::io::Result<()> {
        let entry = Entry {
            key: key.to_string(),
            checksum: digest(value),
            value: value.to_string(),
        };
        let mut tmp = tempfile::NamedTempFile::new_in(&self.root)?;
        tmp.write_all(serde_json::to_string(&entry)?.as_bytes())?;
        tmp.as_file().sync_all()?;
        tmp.persist(self.path(key)).map_err(|e| e.error)?;
        Ok(())
    }

    /// First IO failure seen by `put`, if any.
    pub fn take_error(&self) -> Option<std::io::Error> {
        self.error.lock().unwrap().take()
    }
}

impl ResultCache for DiskCache {
    fn get(&self, key: &str) -> Option<String> {
        self.read(key)
    }

    fn put(&self, key: &str, value: &str) {
        // a valid entry is never replaced; a corrupt one is
        if self.read(key).is_some() {
            return;
        }
        if let Err(e) = self.write(key, value) {
            self.error.lock().unwrap().get_or_insert(e);
        }
    }
}
