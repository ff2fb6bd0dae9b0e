use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use super::HVector;
use crate::toric::PicClass;

pub const CACHE_ENV: &str = "EXCOL_CACHE_DIR";
pub const DEFAULT_CACHE_DIR: &str = ".excol-cache";

/// On-disk memo of cohomology tables, one small JSON file per entry.
///
/// Writers go through a temporary file and an atomic rename, so concurrent
/// writers of the same (deterministic) value simply race to the last rename.
#[derive(Debug, Clone)]
pub struct DiskCache {
    dir: PathBuf,
}

impl DiskCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self { dir: dir.into() }
    }

    pub fn from_env() -> Self {
        let dir = std::env::var_os(CACHE_ENV)
            .map(PathBuf::from)
            .unwrap_or_else(|| PathBuf::from(DEFAULT_CACHE_DIR));
        Self::new(dir)
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn key(fan_json: &str, cls: &PicClass) -> String {
        let mut h = Sha256::new();
        h.update(fan_json.as_bytes());
        h.update(b"\n");
        h.update(
            serde_json::to_string(&cls.coords)
                .expect("coords serialize")
                .as_bytes(),
        );
        hex::encode(h.finalize())
    }

    fn path(&self, key: &str) -> PathBuf {
        self.dir.join(&key[..2]).join(format!("{key}.json"))
    }

    pub fn get(&self, key: &str) -> Option<HVector> {
        let text = fs::read_to_string(self.path(key)).ok()?;
        serde_json::from_str(&text).ok()
    }

    pub fn put(&self, key: &str, value: &HVector) -> std::io::Result<()> {
        let path = self.path(key);
        let parent = path.parent().expect("cache path has a parent");
        fs::create_dir_all(parent)?;
        let mut tmp = tempfile_in(parent)?;
        tmp.1.write_all(
            serde_json::to_string(value)
                .expect("hvector serializes")
                .as_bytes(),
        )?;
        tmp.1.sync_all()?;
        drop(tmp.1);
        fs::rename(&tmp.0, &path)
    }
}

fn tempfile_in(dir: &Path) -> std::io::Result<(PathBuf, fs::File)> {
    use std::sync::atomic::{AtomicU64, Ordering};
    static COUNTER: AtomicU64 = AtomicU64::new(0);
    let n = COUNTER.fetch_add(1, Ordering::Relaxed);
    let name = format!(".tmp-{}-{}-{n}", std::process::id(), thread_id());
    let path = dir.join(name);
    let f = fs::File::create(&path)?;
    Ok((path, f))
}

fn thread_id() -> u64 {
    use std::hash::{Hash, Hasher};
    let mut h = std::collections::hash_map::DefaultHasher::new();
    std::thread::current().id().hash(&mut h);
    h.finish()
}
