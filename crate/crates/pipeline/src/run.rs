//! Level sweeps: fan and complex caches, per-degree homology, CSV rows
//! and the run ledger, with budgets checked between stages.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use log::{info, warn};
use vk_core::algebra::{ideals_in_norm_range, NumberField, OIdeal};
use vk_core::analytics::{classify_primes, GroupDescriptor};
use vk_core::complex::{gamma0_cosets, voronoi_homology};
use vk_core::voronoi::Fan;
use vk_exactla::factor_torsion;

use crate::cache::{load_or_build_complex, load_or_build_fan, CachedFan};
use crate::error::Result;
use crate::fsutil::peak_memory_bytes;
use crate::job::{lookup_field, JobSpec};
use crate::ledger::{LedgerEntry, RunLedger, Status};
use crate::table::{read_csv, write_csv, ReportRow};

/// Time allowed for factoring one torsion order when no budget is set.
pub const FACTOR_SECONDS: u64 = 60;

#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub ledger: RunLedger,
    pub csv_path: PathBuf,
    pub ledger_path: PathBuf,
    /// Levels whose complex was loaded or assembled during this run.
    pub levels_computed: usize,
}

/// Rough footprint of the complex and its elimination: coset tables plus
/// boundary entries, doubled for the reduction.
pub fn estimate_bytes(fan: &Fan, index: usize) -> u64 {
    let per_coset: u64 = fan.cells.iter().flatten().map(|c| 5 + 48 * c.facets.len() as u64).sum();
    (1 << 20) + 2 * per_coset * index as u64
}

fn degrees_for(spec: &JobSpec, fan: &Fan) -> Vec<usize> {
    match &spec.degrees {
        Some(d) => d.clone(),
        None => (fan.min_dim()..=fan.top_dim()).collect(),
    }
}

struct Sweep<'a> {
    spec: &'a JobSpec,
    k: &'static NumberField,
    group: GroupDescriptor,
    fan: CachedFan,
    ledger: RunLedger,
    rows: BTreeMap<(u64, String, usize), ReportRow>,
    outcome_paths: (PathBuf, PathBuf),
    dirty: bool,
}

impl Sweep<'_> {
    fn is_current(&self, level: &OIdeal, d: usize) -> bool {
        let hnf = level.to_string();
        self.ledger
            .get(level.norm, &hnf, d)
            .is_some_and(|e| e.status == Status::Done && e.fan_sha256.as_deref() == Some(self.fan.sha256.as_str()))
            && self.rows.contains_key(&(level.norm, hnf, d))
    }

    fn mark(&mut self, level: &OIdeal, degrees: &[usize], status: Status, seconds: f64, estimated: u64, msg: Option<String>) {
        self.dirty = true;
        for &d in degrees {
            self.ledger.upsert(LedgerEntry {
                status,
                seconds,
                estimated_bytes: estimated,
                peak_memory_bytes: peak_memory_bytes(),
                fan_sha256: Some(self.fan.sha256.clone()),
                message: msg.clone(),
                ..LedgerEntry::pending(level.norm, level.to_string(), d)
            });
        }
    }

    fn flush(&mut self) -> Result<()> {
        self.dirty = false;
        let rows: Vec<ReportRow> = self.rows.values().cloned().collect();
        write_csv(&self.outcome_paths.0, &rows)?;
        self.ledger.save(&self.outcome_paths.1)
    }

    /// Returns whether the complex was built or loaded.
    fn level(&mut self, level: &OIdeal, degrees: &[usize]) -> Result<bool> {
        let needed: Vec<usize> = degrees.iter().copied().filter(|&d| !self.is_current(level, d)).collect();
        if needed.is_empty() {
            return Ok(false);
        }
        if self.k.class_number > 1 {
            warn!("level {level}: non-principal levels are experimental over {}", self.k.label);
        }
        let start = Instant::now();
        let index = gamma0_cosets(self.k, self.spec.n, level)?.index;
        let estimated = estimate_bytes(&self.fan.fan, index);
        if self.spec.budget_mem.is_some_and(|b| estimated > b) {
            info!("level {level}: estimated {estimated} bytes exceeds the memory budget");
            let msg = format!("estimated {estimated} bytes");
            self.mark(level, &needed, Status::SkippedBudget, 0.0, estimated, Some(msg));
            return Ok(false);
        }
        let budget = self.spec.budget_sec.map(Duration::from_secs_f64);
        let over = |start: &Instant| budget.is_some_and(|b| start.elapsed() > b);
        let cached = match load_or_build_complex(&self.spec.cache, &self.fan, self.k, level) {
            Ok(c) => c,
            Err(e) => {
                warn!("level {level}: {e}");
                self.mark(level, &needed, Status::Failed, start.elapsed().as_secs_f64(), estimated, Some(e.to_string()));
                return Ok(true);
            }
        };
        for (i, &d) in needed.iter().enumerate() {
            if over(&start) {
                let msg = format!("time budget exhausted after {:.1} s", start.elapsed().as_secs_f64());
                self.mark(level, &needed[i..], Status::SkippedBudget, start.elapsed().as_secs_f64(), estimated, Some(msg));
                break;
            }
            let factor_budget = budget.map_or(Duration::from_secs(FACTOR_SECONDS), |b| b.saturating_sub(start.elapsed()));
            let result = voronoi_homology(&cached.complex, d).map_err(crate::error::PipelineError::from).and_then(|(betti, ed)| {
                let fact = factor_torsion(&ed, factor_budget);
                Ok(classify_primes(&self.group, level, index as u64, d, betti, fact)?)
            });
            let seconds = start.elapsed().as_secs_f64();
            match result {
                Ok(report) => {
                    self.dirty = true;
                    let row = ReportRow::from_report(&report);
                    self.rows.insert(row.key(), row);
                    self.ledger.upsert(LedgerEntry {
                        status: Status::Done,
                        seconds,
                        estimated_bytes: estimated,
                        peak_memory_bytes: peak_memory_bytes(),
                        fan_sha256: Some(self.fan.sha256.clone()),
                        complex_sha256: Some(cached.sha256.clone()),
                        message: None,
                        ..LedgerEntry::pending(level.norm, level.to_string(), d)
                    });
                }
                Err(e) => {
                    warn!("level {level}, degree {d}: {e}");
                    self.mark(level, &[d], Status::Failed, seconds, estimated, Some(e.to_string()));
                }
            }
        }
        Ok(true)
    }
}

/// Runs the sweep, resuming from the ledger and CSV already in `spec.out`.
pub fn cmd_run(spec: &JobSpec) -> Result<RunOutcome> {
    let group = spec.validate()?;
    let k = lookup_field(&spec.field)?;
    let base = spec.out.join(spec.group_slug());
    let csv_path = base.with_extension("csv");
    let ledger_path = base.with_extension("ledger.json");
    let mut ledger = if ledger_path.exists() {
        RunLedger::load(&ledger_path)?
    } else {
        RunLedger::new(group.label(), spec.field.clone(), spec.n)
    };
    let mut rows = BTreeMap::new();
    if csv_path.exists() {
        for r in read_csv(&csv_path)? {
            rows.insert(r.key(), r);
        }
    }
    let levels = if spec.min_norm <= spec.max_norm {
        ideals_in_norm_range(k, spec.min_norm, spec.max_norm)
    } else {
        Vec::new()
    };
    if levels.is_empty() {
        std::fs::create_dir_all(&spec.out).map_err(|source| crate::error::PipelineError::Io { path: spec.out.clone(), source })?;
        ledger.save(&ledger_path)?;
        let rows: Vec<ReportRow> = rows.into_values().collect();
        write_csv(&csv_path, &rows)?;
        return Ok(RunOutcome { ledger, csv_path, ledger_path, levels_computed: 0 });
    }
    let fan = load_or_build_fan(&spec.cache, k, spec.n)?;
    let degrees = degrees_for(spec, &fan.fan);
    for level in &levels {
        for &d in &degrees {
            if ledger.get(level.norm, &level.to_string(), d).is_none() {
                ledger.upsert(LedgerEntry::pending(level.norm, level.to_string(), d));
            }
        }
    }
    let mut sweep = Sweep {
        spec,
        k,
        group,
        fan,
        ledger,
        rows,
        outcome_paths: (csv_path.clone(), ledger_path.clone()),
        dirty: true,
    };
    sweep.flush()?;
    let mut levels_computed = 0;
    for level in &levels {
        if sweep.level(level, &degrees)? {
            levels_computed += 1;
            info!("level {level} (norm {}) finished", level.norm);
        }
        if sweep.dirty {
            sweep.flush()?;
        }
    }
    Ok(RunOutcome {
        ledger: sweep.ledger,
        csv_path,
        ledger_path,
        levels_computed,
    })
}
