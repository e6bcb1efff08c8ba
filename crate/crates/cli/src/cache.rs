//! Persistent class-number cache.
//!
//! One header line followed by `D h crc` records, where `crc` is the CRC-32
//! of `"D h"`. A file with a bad header, a malformed record, a failed
//! checksum, a non-discriminant or two conflicting records is discarded.

use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use unitroot::ClassNumberCache;

pub const CACHE_HEADER: &str = "# unitroot class numbers v1";
pub const CACHE_ENV: &str = "UNITROOT_CACHE";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LoadState {
    Missing,
    Loaded(usize),
    Discarded,
}

#[derive(Debug)]
pub struct CacheFile {
    path: PathBuf,
    state: LoadState,
    loaded: Vec<(i64, u64)>,
}

fn checksum(d: i64, h: u64) -> u32 {
    crc32fast::hash(format!("{d} {h}").as_bytes())
}

pub fn format_record(d: i64, h: u64) -> String {
    format!("{d} {h} {:08x}", checksum(d, h))
}

fn parse_record(line: &str) -> Option<(i64, u64)> {
    let mut it = line.split_ascii_whitespace();
    let d: i64 = it.next()?.parse().ok()?;
    let h: u64 = it.next()?.parse().ok()?;
    let crc = u32::from_str_radix(it.next()?, 16).ok()?;
    let is_disc = d < 0 && matches!(d.rem_euclid(4), 0 | 1);
    (it.next().is_none() && crc == checksum(d, h) && is_disc && h >= 1).then_some((d, h))
}

fn parse(reader: impl BufRead) -> Option<Vec<(i64, u64)>> {
    let mut lines = reader.lines();
    if lines.next()?.ok()?.trim_end() != CACHE_HEADER {
        return None;
    }
    let mut seen = std::collections::HashMap::new();
    for line in lines {
        let line = line.ok()?;
        if line.trim().is_empty() {
            continue;
        }
        let (d, h) = parse_record(&line)?;
        if *seen.entry(d).or_insert(h) != h {
            return None;
        }
    }
    let mut v: Vec<_> = seen.into_iter().collect();
    v.sort_by_key(|&(d, _)| std::cmp::Reverse(d));
    Some(v)
}

impl CacheFile {
    pub fn open(path: impl Into<PathBuf>) -> Self {
        let path = path.into();
        let (state, loaded) = match File::open(&path) {
            Err(_) => (LoadState::Missing, Vec::new()),
            Ok(f) => match parse(BufReader::new(f)) {
                Some(v) => (LoadState::Loaded(v.len()), v),
                None => (LoadState::Discarded, Vec::new()),
            },
        };
        Self { path, state, loaded }
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn state(&self) -> LoadState {
        self.state
    }

    pub fn memo(&self) -> ClassNumberCache {
        ClassNumberCache::with_entries(self.loaded.iter().copied())
    }

    /// Appends records not already on disk; rewrites the file if it was discarded.
    pub fn store(&self, memo: &ClassNumberCache) -> std::io::Result<usize> {
        let known: std::collections::HashSet<i64> = self.loaded.iter().map(|&(d, _)| d).collect();
        let fresh: Vec<(i64, u64)> = memo.entries().into_iter().filter(|(d, _)| !known.contains(d)).collect();
        let rewrite = !matches!(self.state, LoadState::Loaded(_));
        if fresh.is_empty() && self.state != LoadState::Discarded {
            return Ok(0);
        }
        if let Some(dir) = self.path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir)?;
        }
        let mut file = OpenOptions::new().create(true).append(true).open(&self.path)?;
        file.lock()?;
        let result = (|| {
            let mut out = String::new();
            if rewrite {
                file.set_len(0)?;
                out.push_str(CACHE_HEADER);
                out.push('\n');
            }
            for (d, h) in &fresh {
                out.push_str(&format_record(*d, *h));
                out.push('\n');
            }
            file.write_all(out.as_bytes())?;
            file.sync_data()
        })();
        file.unlock()?;
        result.map(|_| fresh.len())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn record_round_trip() {
        let line = format_record(-23, 3);
        assert_eq!(parse_record(&line), Some((-23, 3)));
        assert_eq!(parse_record("-23 4 00000000"), None);
        assert_eq!(parse_record(&format_record(-22, 1)), None);
    }

    #[test]
    fn conflicting_records_discard_the_file() {
        let text = format!("{CACHE_HEADER}\n{}\n{}\n", format_record(-23, 3), format_record(-23, 5));
        assert!(parse(text.as_bytes()).is_none());
        let text = format!("{CACHE_HEADER}\n{}\n{}\n", format_record(-23, 3), format_record(-4, 1));
        assert_eq!(parse(text.as_bytes()), Some(vec![(-4, 1), (-23, 3)]));
    }
}
