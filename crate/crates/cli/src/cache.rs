//! Content-addressed workspace cache.
//!
//! An entry lives at `<dir>/<sha256(key)>.json` and records its key, the
//! payload and the payload's checksum. Entries whose key or checksum do not
//! match are deleted and treated as misses.

use std::fs;
use std::io::{ErrorKind, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use tempfile::NamedTempFile;

pub const CODE_VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "+cache1");

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntryKey {
    pub kind: String,
    pub n: usize,
    pub flavor: Option<String>,
    pub cap: usize,
    pub code_version: String,
}

impl EntryKey {
    pub fn new(kind: impl Into<String>, n: usize, flavor: Option<String>, cap: usize) -> EntryKey {
        EntryKey {
            kind: kind.into(),
            n,
            flavor,
            cap,
            code_version: CODE_VERSION.to_string(),
        }
    }

    fn digest(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("keys serialize");
        hex::encode(Sha256::digest(&bytes))
    }
}

#[derive(Serialize, Deserialize)]
struct Stored {
    key: EntryKey,
    checksum: String,
    payload: String,
}

fn checksum(payload: &str) -> String {
    hex::encode(Sha256::digest(payload.as_bytes()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Lookup {
    Hit,
    Miss,
    /// Present but unreadable, for the wrong key, or failing its checksum.
    Discarded,
}

#[derive(Clone, Debug)]
pub struct Workspace {
    dir: PathBuf,
}

impl Workspace {
    pub fn new(dir: impl Into<PathBuf>) -> Workspace {
        Workspace { dir: dir.into() }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path(&self, key: &EntryKey) -> PathBuf {
        self.dir.join(format!("{}.json", key.digest()))
    }

    /// The stored payload bytes, if a valid entry exists.
    pub fn load(&self, key: &EntryKey) -> Result<(Option<String>, Lookup)> {
        let path = self.path(key);
        let text = match fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) if e.kind() == ErrorKind::NotFound => return Ok((None, Lookup::Miss)),
            Err(e) if e.kind() == ErrorKind::InvalidData => String::new(),
            Err(e) => return Err(e).with_context(|| format!("reading {}", path.display())),
        };
        match serde_json::from_str::<Stored>(&text) {
            Ok(s) if &s.key == key && s.checksum == checksum(&s.payload) => {
                Ok((Some(s.payload), Lookup::Hit))
            }
            _ => {
                match fs::remove_file(&path) {
                    Ok(()) => {}
                    Err(e) if e.kind() == ErrorKind::NotFound => {}
                    Err(e) => {
                        return Err(e).with_context(|| format!("discarding {}", path.display()))
                    }
                }
                Ok((None, Lookup::Discarded))
            }
        }
    }

    /// Writes to a temporary file in the workspace, then renames it into place.
    pub fn store(&self, key: &EntryKey, payload: &str) -> Result<()> {
        fs::create_dir_all(&self.dir)
            .with_context(|| format!("creating workspace {}", self.dir.display()))?;
        let stored = Stored {
            key: key.clone(),
            checksum: checksum(payload),
            payload: payload.to_string(),
        };
        let mut tmp = NamedTempFile::new_in(&self.dir)
            .with_context(|| format!("creating a file in {}", self.dir.display()))?;
        tmp.write_all(&serde_json::to_vec(&stored)?)?;
        tmp.as_file().sync_all()?;
        let path = self.path(key);
        tmp.persist(&path)
            .with_context(|| format!("writing {}", path.display()))?;
        Ok(())
    }

    /// Loads a typed value, or computes and stores it.
    pub fn get_or_compute<T, F>(&self, key: &EntryKey, compute: F) -> Result<(T, Lookup)>
    where
        T: Serialize + DeserializeOwned,
        F: FnOnce() -> Result<T>,
    {
        let (payload, lookup) = self.load(key)?;
        if let Some(value) = payload.and_then(|p| serde_json::from_str(&p).ok()) {
            return Ok((value, lookup));
        }
        let value = compute()?;
        self.store(key, &serde_json::to_string(&value)?)?;
        Ok((value, if lookup == Lookup::Hit { Lookup::Discarded } else { lookup }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use unstable_core::steinberg::{build_steinberg, Flavor};

    fn key() -> EntryKey {
        EntryKey::new("steinberg", 2, Some("L".into()), 12)
    }

    #[test]
    fn round_trip_is_byte_exact() {
        let dir = tempfile::tempdir().unwrap();
        let ws = Workspace::new(dir.path());
        let m = build_steinberg(Flavor::L, 2, 12).unwrap();
        let bytes = serde_json::to_string(&m).unwrap();
        ws.store(&key(), &bytes).unwrap();
        let (back, lookup) = ws.load(&key()).unwrap();
        assert_eq!(lookup, Lookup::Hit);
        assert_eq!(back.unwrap(), bytes);
    }

    #[test]
    fn other_code_version_misses() {
        let dir = tempfile::tempdir().unwrap();
        let ws = Workspace::new(dir.path());
        ws.store(&key(), "payload").unwrap();
        let mut old = key();
        old.code_version = "0.0.0".into();
        assert_eq!(ws.load(&old).unwrap(), (None, Lookup::Miss));
    }

    #[test]
    fn bad_checksum_is_recomputed() {
        let dir = tempfile::tempdir().unwrap();
        let ws = Workspace::new(dir.path());
        ws.store(&key(), "[1,2,3]").unwrap();
        let path = ws.path(&key());
        let text = fs::read_to_string(&path).unwrap().replace("[1,2,3]", "[1,2,4]");
        fs::write(&path, text).unwrap();
        let (v, lookup) = ws.get_or_compute(&key(), || Ok(vec![1, 2, 3])).unwrap();
        assert_eq!(v, vec![1, 2, 3]);
        assert_eq!(lookup, Lookup::Discarded);
        assert_eq!(ws.load(&key()).unwrap().1, Lookup::Hit);
    }

    #[test]
    fn garbage_is_discarded() {
        let dir = tempfile::tempdir().unwrap();
        let ws = Workspace::new(dir.path());
        fs::write(ws.path(&key()), b"\xff\xfe not json").unwrap();
        assert_eq!(ws.load(&key()).unwrap(), (None, Lookup::Discarded));
        assert!(!ws.path(&key()).exists());
    }
}
