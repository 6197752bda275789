//! Append-only JSON-lines cache of per-prime results.
//!
//! Each line is one [`CacheRecord`]. Lines that fail to parse are skipped and
//! counted; records written by a different tool version are ignored.

use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::{Result, TOOL_VERSION};

/// Environment variable consulted when no `--cache` path is given.
pub const CACHE_ENV: &str = "SYLOWLAB_CACHE";

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CacheKey {
    pub p: u64,
    pub computation: String,
    pub params: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CacheRecord {
    pub key: CacheKey,
    pub value: serde_json::Value,
    pub tool_version: String,
    pub timestamp: u64,
}

/// First 16 hex digits of SHA-256 over the parameter text.
pub fn params_digest(params: &str) -> String {
    hex::encode(&Sha256::digest(params.as_bytes())[..8])
}

pub struct ResultCache {
    path: PathBuf,
    entries: Mutex<HashMap<CacheKey, serde_json::Value>>,
    writer: Mutex<File>,
    skipped_lines: usize,
}

impl ResultCache {
    pub fn open(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref().to_path_buf();
        let mut entries = HashMap::new();
        let mut skipped_lines = 0;
        if path.exists() {
            for line in BufReader::new(File::open(&path)?).lines() {
                let line = line?;
                if line.trim().is_empty() {
                    continue;
                }
                match serde_json::from_str::<CacheRecord>(&line) {
                    Ok(rec) if rec.tool_version == TOOL_VERSION => {
                        // First write wins: records are immutable.
                        entries.entry(rec.key).or_insert(rec.value);
                    }
                    Ok(_) => {}
                    Err(_) => skipped_lines += 1,
                }
            }
        }
        let writer = OpenOptions::new().create(true).append(true).open(&path)?;
        Ok(Self {
            path,
            entries: Mutex::new(entries),
            writer: Mutex::new(writer),
            skipped_lines,
        })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    /// Number of unreadable lines skipped while loading.
    pub fn skipped_lines(&self) -> usize {
        self.skipped_lines
    }

    pub fn len(&self) -> usize {
        self.entries.lock().expect("cache lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn key(p: u64, computation: &str, params: &str) -> CacheKey {
        CacheKey {
            p,
            computation: computation.to_string(),
            params: params_digest(params),
        }
    }

    pub fn get(&self, p: u64, computation: &str, params: &str) -> Option<serde_json::Value> {
        self.entries
            .lock()
            .expect("cache lock")
            .get(&Self::key(p, computation, params))
            .cloned()
    }

    /// Stores a value unless the key is already present.
    pub fn put(
        &self,
        p: u64,
        computation: &str,
        params: &str,
        value: serde_json::Value,
    ) -> Result<()> {
        let key = Self::key(p, computation, params);
        let mut entries = self.entries.lock().expect("cache lock");
        if entries.contains_key(&key) {
            return Ok(());
        }
        let timestamp = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        let record = CacheRecord {
            key: key.clone(),
            value: value.clone(),
            tool_version: TOOL_VERSION.into(),
            timestamp,
        };
        let mut line = serde_json::to_string(&record)?;
        line.push('\n');
        {
            let mut w = self.writer.lock().expect("cache writer lock");
            w.write_all(line.as_bytes())?;
            w.flush()?;
        }
        entries.insert(key, value);
        Ok(())
    }
}
