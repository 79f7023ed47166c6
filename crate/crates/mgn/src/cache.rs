//! Persistent result cache in JSON-lines format.
//!
//! One record per line, keys sorted within each object, values always
//! `"p/q"` strings. A cache only ever changes how fast a result is
//! produced, never what it is: lookups are keyed by kind, canonical
//! key, and tool version, so records written by another version are
//! carried along but never consulted. Corrupt or truncated lines are
//! hard errors naming the line, not skips.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Version stamp stored with every record.
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Namespace of a cached scalar.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CacheKind {
    Correlator,
    Dh,
    Hodge,
    Hurwitz,
}

/// One cached value. Fields are declared alphabetically so every
/// serialized line has sorted keys.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CacheRecord {
    pub key: String,
    pub kind: CacheKind,
    pub tool_version: String,
    pub value: String,
}

/// Parses a cache file. Any malformed line, including a truncated
/// final line or a record conflicting with an earlier one, is an
/// error carrying its 1-based line number.
pub fn read_cache(path: &Path) -> Result<Vec<CacheRecord>> {
    let text = fs::read_to_string(path)?;
    let mut records = Vec::new();
    let mut seen: BTreeMap<(CacheKind, String, String), (usize, String)> = BTreeMap::new();
    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        let record: CacheRecord = serde_json::from_str(line).map_err(|e| Error::CacheIntegrity {
            line: lineno,
            msg: e.to_string(),
        })?;
        let slot = (
            record.kind,
            record.tool_version.clone(),
            record.key.clone(),
        );
        if let Some((first, value)) = seen.get(&slot) {
            if *value != record.value {
                return Err(Error::CacheIntegrity {
                    line: lineno,
                    msg: format!(
                        "value {:?} conflicts with {:?} on line {first}",
                        record.value, value
                    ),
                });
            }
        } else {
            seen.insert(slot, (lineno, record.value.clone()));
        }
        records.push(record);
    }
    Ok(records)
}

/// Writes records one JSON object per line, in the given order.
pub fn write_cache(path: &Path, records: &[CacheRecord]) -> Result<()> {
    let mut out = String::new();
    for r in records {
        out.push_str(&serde_json::to_string(r)?);
        out.push('\n');
    }
    fs::write(path, out)?;
    Ok(())
}

/// Write-then-read cycle; the format's contract is that this returns
/// the input unchanged.
pub fn cache_roundtrip(path: &Path, records: &[CacheRecord]) -> Result<Vec<CacheRecord>> {
    write_cache(path, records)?;
    read_cache(path)
}

/// In-memory view of a cache file used by the command surface.
/// Lookups see only the current tool version; foreign records are
/// preserved on save.
#[derive(Debug, Default)]
pub struct CacheStore {
    map: BTreeMap<(CacheKind, String, String), String>,
    dirty: bool,
}

impl CacheStore {
    pub fn empty() -> Self {
        CacheStore::default()
    }

    /// Loads a cache file; a missing file is an empty cache.
    pub fn load(path: &Path) -> Result<Self> {
        if !path.exists() {
            return Ok(CacheStore::empty());
        }
        let mut map = BTreeMap::new();
        for r in read_cache(path)? {
            map.insert((r.kind, r.tool_version, r.key), r.value);
        }
        Ok(CacheStore { map, dirty: false })
    }

    pub fn get(&self, kind: CacheKind, key: &str) -> Option<&str> {
        self.map
            .get(&(kind, TOOL_VERSION.to_string(), key.to_string()))
            .map(String::as_str)
    }

    pub fn put(&mut self, kind: CacheKind, key: String, value: String) {
        let slot = (kind, TOOL_VERSION.to_string(), key);
        if self.map.get(&slot).map(String::as_str) != Some(value.as_str()) {
            self.map.insert(slot, value);
            self.dirty = true;
        }
    }

    pub fn records(&self) -> Vec<CacheRecord> {
        self.map
            .iter()
            .map(|((kind, tool_version, key), value)| CacheRecord {
                key: key.clone(),
                kind: *kind,
                tool_version: tool_version.clone(),
                value: value.clone(),
            })
            .collect()
    }

    /// Rewrites the file if any record changed since load.
    pub fn save_if_dirty(&self, path: &Path) -> Result<()> {
        if self.dirty {
            write_cache(path, &self.records())?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn record(kind: CacheKind, key: &str, value: &str) -> CacheRecord {
        CacheRecord {
            key: key.into(),
            kind,
            tool_version: TOOL_VERSION.into(),
            value: value.into(),
        }
    }

    #[test]
    fn roundtrip_preserves_records() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cache.jsonl");
        assert_eq!(cache_roundtrip(&path, &[]).unwrap(), vec![]);
        let recs = vec![
            record(CacheKind::Correlator, "g=1;d=1", "1/24"),
            record(CacheKind::Hurwitz, "single;g=0;alpha=1,1,1", "24/1"),
        ];
        assert_eq!(cache_roundtrip(&path, &recs).unwrap(), recs);
    }

    #[test]
    fn lines_have_sorted_keys() {
        let line = serde_json::to_string(&record(CacheKind::Dh, "k", "1/2")).unwrap();
        assert_eq!(
            line,
            format!(r#"{{"key":"k","kind":"dh","tool_version":"{TOOL_VERSION}","value":"1/2"}}"#)
        );
    }

    #[test]
    fn truncated_line_names_its_number() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cache.jsonl");
        let good = serde_json::to_string(&record(CacheKind::Hodge, "a", "1/1")).unwrap();
        let mut f = std::fs::File::create(&path).unwrap();
        writeln!(f, "{good}").unwrap();
        write!(f, "{}", &good[..good.len() / 2]).unwrap();
        drop(f);
        match read_cache(&path) {
            Err(Error::CacheIntegrity { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected line-2 integrity error, got {other:?}"),
        }
    }

    #[test]
    fn conflicting_duplicate_rejected_identical_allowed() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cache.jsonl");
        let a = record(CacheKind::Correlator, "g=1;d=1", "1/24");
        let same = a.clone();
        assert_eq!(cache_roundtrip(&path, &[a.clone(), same]).unwrap().len(), 2);
        let mut conflict = a.clone();
        conflict.value = "1/23".into();
        match cache_roundtrip(&path, &[a, conflict]) {
            Err(Error::CacheIntegrity { line, msg }) => {
                assert_eq!(line, 2);
                assert!(msg.contains("line 1"), "message was {msg:?}");
            }
            other => panic!("expected conflict error, got {other:?}"),
        }
    }

    #[test]
    fn store_ignores_foreign_versions_but_keeps_them() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cache.jsonl");
        let mut foreign = record(CacheKind::Correlator, "g=1;d=1", "9/9");
        foreign.tool_version = "0.0.0-other".into();
        write_cache(&path, &[foreign.clone()]).unwrap();
        let mut store = CacheStore::load(&path).unwrap();
        assert_eq!(store.get(CacheKind::Correlator, "g=1;d=1"), None);
        store.put(CacheKind::Correlator, "g=1;d=1".into(), "1/24".into());
        assert_eq!(store.get(CacheKind::Correlator, "g=1;d=1"), Some("1/24"));
        store.save_if_dirty(&path).unwrap();
        let back = read_cache(&path).unwrap();
        assert_eq!(back.len(), 2);
        assert!(back.contains(&foreign));
    }

    #[test]
    fn clean_save_does_not_rewrite() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cache.jsonl");
        write_cache(&path, &[record(CacheKind::Hurwitz, "k", "2/1")]).unwrap();
        let before = std::fs::read_to_string(&path).unwrap();
        let store = CacheStore::load(&path).unwrap();
        store.save_if_dirty(&path).unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), before);
    }
}
