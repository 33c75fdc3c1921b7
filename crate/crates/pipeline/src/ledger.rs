use std::fmt;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{IoContext, PipelineError, Result};
use crate::fsutil::write_atomic;

pub const LEDGER_FORMAT: &str = "vk-run-ledger";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Done,
    SkippedBudget,
    Failed,
    Pending,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Done => "done",
            Status::SkippedBudget => "skipped-budget",
            Status::Failed => "failed",
            Status::Pending => "pending",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LedgerEntry {
    pub level_norm: u64,
    pub level_hnf: String,
    pub degree: usize,
    pub status: Status,
    pub seconds: f64,
    pub estimated_bytes: u64,
    pub peak_memory_bytes: Option<u64>,
    pub fan_sha256: Option<String>,
    pub complex_sha256: Option<String>,
    pub message: Option<String>,
}

impl LedgerEntry {
    pub fn pending(level_norm: u64, level_hnf: String, degree: usize) -> Self {
        LedgerEntry {
            level_norm,
            level_hnf,
            degree,
            status: Status::Pending,
            seconds: 0.0,
            estimated_bytes: 0,
            peak_memory_bytes: None,
            fan_sha256: None,
            complex_sha256: None,
            message: None,
        }
    }

    pub fn key(&self) -> (u64, &str, usize) {
        (self.level_norm, &self.level_hnf, self.degree)
    }
}

/// Per-(level, degree) status of the runs of one group in one output directory.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunLedger {
    pub format: String,
    pub group: String,
    pub field: String,
    pub n: usize,
    /// Kept sorted by level norm, HNF and degree; keys are unique.
    pub entries: Vec<LedgerEntry>,
}

impl RunLedger {
    pub fn new(group: String, field: String, n: usize) -> Self {
        RunLedger {
            format: LEDGER_FORMAT.into(),
            group,
            field,
            n,
            entries: Vec::new(),
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let bytes = fs::read(path).at(path)?;
        let l: RunLedger = serde_json::from_slice(&bytes)?;
        if l.format != LEDGER_FORMAT {
            return Err(PipelineError::Cache {
                path: path.to_path_buf(),
                msg: format!("not a run ledger (format `{}`)", l.format),
            });
        }
        Ok(l)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut bytes = serde_json::to_vec_pretty(self)?;
        bytes.push(b'\n');
        write_atomic(path, &bytes)
    }

    fn position(&self, norm: u64, hnf: &str, degree: usize) -> std::result::Result<usize, usize> {
        self.entries.binary_search_by(|e| e.key().cmp(&(norm, hnf, degree)))
    }

    pub fn get(&self, norm: u64, hnf: &str, degree: usize) -> Option<&LedgerEntry> {
        self.position(norm, hnf, degree).ok().map(|i| &self.entries[i])
    }

    /// Inserts or replaces the entry with the same key.
    pub fn upsert(&mut self, e: LedgerEntry) {
        match self.position(e.level_norm, &e.level_hnf, e.degree) {
            Ok(i) => self.entries[i] = e,
            Err(i) => self.entries.insert(i, e),
        }
    }

    pub fn count(&self, s: Status) -> usize {
        self.entries.iter().filter(|e| e.status == s).count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn upsert_keeps_keys_unique_and_sorted() {
        let mut l = RunLedger::new("GL2(Q)".into(), "Q".into(), 2);
        for (norm, d) in [(5, 1), (2, 2), (5, 1), (2, 1)] {
            l.upsert(LedgerEntry::pending(norm, format!("[{norm}]"), d));
        }
        let keys: Vec<_> = l.entries.iter().map(|e| (e.level_norm, e.degree)).collect();
        assert_eq!(keys, vec![(2, 1), (2, 2), (5, 1)]);
        assert_eq!(serde_json::to_string(&Status::SkippedBudget).unwrap(), "\"skipped-budget\"");
    }
}
