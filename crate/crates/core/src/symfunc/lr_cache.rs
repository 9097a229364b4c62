use std::collections::HashMap;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::RwLock;

use crate::partitions::Partition;

use super::SymError;

/// `(λ, μ, ν)` for the coefficient `c^λ_{μν}`.
pub type LrKey = (Partition, Partition, Partition);

/// Memo of Littlewood–Richardson coefficients, optionally backed by a file
/// with one `λ;μ;ν;c` record per line. The file is read on first access.
///
/// Reads and writes go through a lock; two workers racing on the same key
/// both compute the same value, so the last write is harmless.
#[derive(Debug, Default)]
pub struct LrCache {
    path: Option<PathBuf>,
    entries: RwLock<Option<HashMap<LrKey, u64>>>,
}

impl LrCache {
    pub fn in_memory() -> Self {
        LrCache::default()
    }

    pub fn with_file(path: impl Into<PathBuf>) -> Self {
        LrCache {
            path: Some(path.into()),
            entries: RwLock::new(None),
        }
    }

    pub fn path(&self) -> Option<&Path> {
        self.path.as_deref()
    }

    fn ensure_loaded(&self) -> Result<(), SymError> {
        if self.entries.read().unwrap().is_some() {
            return Ok(());
        }
        let mut guard = self.entries.write().unwrap();
        if guard.is_none() {
            let map = match &self.path {
                Some(p) if p.exists() => parse_cache(&fs::read_to_string(p)?)?,
                _ => HashMap::new(),
            };
            *guard = Some(map);
        }
        Ok(())
    }

    pub fn get(&self, key: &LrKey) -> Result<Option<u64>, SymError> {
        self.ensure_loaded()?;
        Ok(self
            .entries
            .read()
            .unwrap()
            .as_ref()
            .unwrap()
            .get(key)
            .copied())
    }

    pub fn insert(&self, key: LrKey, value: u64) -> Result<(), SymError> {
        self.ensure_loaded()?;
        self.entries
            .write()
            .unwrap()
            .as_mut()
            .unwrap()
            .insert(key, value);
        Ok(())
    }

    pub fn len(&self) -> Result<usize, SymError> {
        self.ensure_loaded()?;
        Ok(self.entries.read().unwrap().as_ref().unwrap().len())
    }

    pub fn is_empty(&self) -> Result<bool, SymError> {
        Ok(self.len()? == 0)
    }

    /// Writes every entry to the backing file, sorted for stable diffs.
    /// A no-op for in-memory caches.
    pub fn save(&self) -> Result<(), SymError> {
        let Some(path) = &self.path else {
            return Ok(());
        };
        self.ensure_loaded()?;
        let guard = self.entries.read().unwrap();
        let mut lines: Vec<String> = guard
            .as_ref()
            .unwrap()
            .iter()
            .map(|((l, m, n), c)| format_record(l, m, n, *c))
            .collect();
        lines.sort();
        if let Some(dir) = path.parent() {
            if !dir.as_os_str().is_empty() {
                fs::create_dir_all(dir)?;
            }
        }
        let mut out = BufWriter::new(fs::File::create(path)?);
        for line in lines {
            writeln!(out, "{line}")?;
        }
        out.flush()?;
        Ok(())
    }

    /// Drops all entries and removes the backing file.
    pub fn clear(&self) -> Result<(), SymError> {
        *self.entries.write().unwrap() = Some(HashMap::new());
        if let Some(p) = &self.path {
            if p.exists() {
                fs::remove_file(p)?;
            }
        }
        Ok(())
    }
}

pub fn format_record(l: &Partition, m: &Partition, n: &Partition, c: u64) -> String {
    format!("{l};{m};{n};{c}")
}

pub fn parse_record(line: &str) -> Result<(LrKey, u64), SymError> {
    let bad = || SymError::CacheFormat(line.to_string());
    let fields: Vec<&str> = line.trim().split(';').collect();
    if fields.len() != 4 {
        return Err(bad());
    }
    let part = |s: &str| s.parse::<Partition>().map_err(|_| bad());
    let c = fields[3].trim().parse::<u64>().map_err(|_| bad())?;
    Ok(((part(fields[0])?, part(fields[1])?, part(fields[2])?), c))
}

fn parse_cache(text: &str) -> Result<HashMap<LrKey, u64>, SymError> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(parse_record)
        .collect()
}
