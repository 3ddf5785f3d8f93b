//! Append-only a_p cache: one `p,A,B,ap` record per line, keyed by
//! (p, A mod p, B mod p). Crash-safe by construction: a torn final line is
//! truncated on open, rereads honor the last write for a key.

use crate::arith::is_prime;
use crate::error::{Error, Result};
use std::collections::HashMap;
use std::fs::OpenOptions;
use std::io::{Read as _, Seek, SeekFrom, Write as _};
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ApCacheEntry {
    pub p: u64,
    pub a: i64,
    pub b: i64,
    pub ap: i64,
}

impl ApCacheEntry {
    fn key(&self) -> (u64, u64, u64) {
        (
            self.p,
            self.a.rem_euclid(self.p as i64) as u64,
            self.b.rem_euclid(self.p as i64) as u64,
        )
    }

    fn hasse_ok(&self) -> bool {
        let ap = self.ap.unsigned_abs();
        ap * ap < 4 * self.p
    }
}

#[derive(Debug)]
pub struct ApCache {
    path: PathBuf,
    entries: HashMap<(u64, u64, u64), i64>,
    /// Reports (rejected lines, truncation notices) collected during open.
    pub warnings: Vec<String>,
}

impl ApCache {
    /// Loads the file (creating it if absent). A corrupt record at the
    /// very end is assumed to be a torn write and truncated; a corrupt or
    /// Hasse-violating record elsewhere is rejected with a warning.
    pub fn open(path: &Path) -> Result<ApCache> {
        let mut file = OpenOptions::new()
            .read(true)
            .write(true)
            .create(true)
            .truncate(false)
            .open(path)?;
        let mut text = String::new();
        file.read_to_string(&mut text)?;
        let mut entries = HashMap::new();
        let mut warnings = Vec::new();
        let mut good_bytes = 0usize;
        let mut offset = 0usize;
        let lines: Vec<&str> = text.split('\n').collect();
        for (i, line) in lines.iter().enumerate() {
            let len = line.len() + 1; // the split consumed a newline
            let last = i + 1 == lines.len();
            if line.is_empty() {
                if !last {
                    good_bytes = offset + len;
                }
                offset += len;
                continue;
            }
            match parse_line(line) {
                Ok(entry) if entry.hasse_ok() => {
                    entries.insert(entry.key(), entry.ap);
                    if !last || text.ends_with('\n') {
                        good_bytes = offset + line.len() + usize::from(!last);
                    }
                }
                Ok(entry) => {
                    warnings.push(format!(
                        "cache: rejected Hasse-violating record p={} ap={}",
                        entry.p, entry.ap
                    ));
                    if !last {
                        good_bytes = offset + len;
                    }
                }
                Err(e) => {
                    if last {
                        warnings.push(format!(
                            "cache: truncating corrupt trailing record {line:?} ({e})"
                        ));
                        file.set_len(good_bytes as u64)?;
                        file.seek(SeekFrom::End(0))?;
                    } else {
                        warnings.push(format!("cache: skipping corrupt record {line:?} ({e})"));
                        good_bytes = offset + len;
                    }
                }
            }
            offset += len;
        }
        Ok(ApCache {
            path: path.to_path_buf(),
            entries,
            warnings,
        })
    }

    pub fn get(&self, p: u64, a: i64, b: i64) -> Option<i64> {
        let probe = ApCacheEntry { p, a, b, ap: 0 };
        self.entries.get(&probe.key()).copied()
    }

    /// Appends unless an identical record is already present (idempotent);
    /// a differing value for the same key is appended and wins on reread.
    pub fn put(&mut self, entry: ApCacheEntry) -> Result<()> {
        if !is_prime(entry.p) {
            return Err(Error::invalid(format!("cache put: {} not prime", entry.p)));
        }
        if !entry.hasse_ok() {
            return Err(Error::invalid(format!(
                "cache put: |ap| = {} breaks Hasse at p = {}",
                entry.ap.abs(),
                entry.p
            )));
        }
        if self.entries.get(&entry.key()) == Some(&entry.ap) {
            return Ok(());
        }
        let mut file = OpenOptions::new().append(true).open(&self.path)?;
        writeln!(file, "{},{},{},{}", entry.p, entry.a, entry.b, entry.ap)?;
        self.entries.insert(entry.key(), entry.ap);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

fn parse_line(line: &str) -> Result<ApCacheEntry> {
    let fields: Vec<&str> = line.trim_end().split(',').collect();
    if fields.len() != 4 {
        return Err(Error::invalid("want 4 comma-separated fields"));
    }
    let p: u64 = fields[0]
        .parse()
        .map_err(|_| Error::invalid("bad prime field"))?;
    let a: i64 = fields[1]
        .parse()
        .map_err(|_| Error::invalid("bad A field"))?;
    let b: i64 = fields[2]
        .parse()
        .map_err(|_| Error::invalid("bad B field"))?;
    let ap: i64 = fields[3]
        .parse()
        .map_err(|_| Error::invalid("bad ap field"))?;
    if !is_prime(p) {
        return Err(Error::invalid(format!("{p} not prime")));
    }
    Ok(ApCacheEntry { p, a, b, ap })
}
