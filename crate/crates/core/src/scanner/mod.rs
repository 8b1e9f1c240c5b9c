//! Range scans over `n` for the conjecture predicates.
//!
//! The range is cut into blocks of [`BLOCK`] consecutive values. Blocks are
//! evaluated in parallel waves and folded in ascending order by one
//! collector, which also appends a checkpoint record after each block. A
//! scan resumed from its checkpoint therefore produces the same report as
//! one that ran straight through, and the worker count never shows up in
//! the output.

mod checkpoint;
mod predicates;
mod report;

use std::ops::RangeInclusive;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use serde::Serialize;
use sha2::{Digest, Sha256};

pub use checkpoint::{read_records, CheckpointRecord, CheckpointWriter};
pub use predicates::{predicate_catalog, Hit, PredicateId, Verdict};
pub use report::{render, Format, CSV_HEADER};

use crate::error::{domain, Error, Result};
use crate::exec::{default_jobs, map_ordered};
use predicates::Ctx;

/// Values per work unit.
pub const BLOCK: u64 = 256;

/// Default largest `k` for the `conj2.17` predicate.
pub const DEFAULT_KMAX: u64 = 10;

#[derive(Debug, Clone)]
pub struct ScanOptions {
    pub jobs: usize,
    pub checkpoint: Option<PathBuf>,
    /// Largest `k` tried by `conj2.17`; ignored by other predicates.
    pub kmax: u64,
    /// Stop cleanly after this many newly completed blocks, leaving the
    /// checkpoint to resume from. Used to exercise resumption.
    pub stop_after_blocks: Option<u64>,
}

impl Default for ScanOptions {
    fn default() -> Self {
        Self {
            jobs: default_jobs(),
            checkpoint: None,
            kmax: DEFAULT_KMAX,
            stop_after_blocks: None,
        }
    }
}

impl ScanOptions {
    pub fn with_jobs(jobs: usize) -> Self {
        Self { jobs, ..Self::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ScanReport {
    pub scan: String,
    pub predicate: PredicateId,
    pub lo: u64,
    pub hi: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kmax: Option<u64>,
    /// Last `n` evaluated; equals `hi` when `complete`.
    pub upto: u64,
    pub complete: bool,
    /// Values in `[lo, upto]` inside the predicate's domain.
    pub checked: u64,
    /// Values in `[lo, upto]` outside it.
    pub skipped: u64,
    pub hits: Vec<Hit>,
    #[serde(skip)]
    pub wall_time: Duration,
}

impl ScanReport {
    pub fn hit_values(&self) -> Vec<u64> {
        self.hits.iter().map(|h| h.n).collect()
    }
}

/// Digest of everything that determines a scan's output.
pub fn config_digest(predicate: PredicateId, lo: u64, hi: u64, kmax: u64) -> String {
    let kmax = if predicate == PredicateId::Conj217 { kmax } else { 0 };
    let text = format!("powsum-scan/1\npred={predicate}\nlo={lo}\nhi={hi}\nkmax={kmax}\nblock={BLOCK}\n");
    hex::encode(Sha256::digest(text.as_bytes()))
}

/// Evaluates `predicate` on every `n` in `lo..=hi` within its domain.
pub fn scan(predicate: PredicateId, lo: u64, hi: u64, opts: &ScanOptions) -> Result<ScanReport> {
    let started = Instant::now();
    if lo < 2 {
        return Err(domain(format!("scan range must start at 2 or above, got {lo}")));
    }
    if lo > hi {
        return Err(domain(format!("empty scan range {lo}..{hi}")));
    }
    if predicate == PredicateId::Conj217 && opts.kmax == 0 {
        return Err(domain("conj2.17 needs kmax >= 1"));
    }
    let cfg = config_digest(predicate, lo, hi, opts.kmax);
    let id = format!("{predicate}-{}", &cfg[..12]);

    let mut hits: Vec<Hit> = Vec::new();
    let mut upto = lo - 1;
    let mut writer = None;
    if let Some(path) = &opts.checkpoint {
        let records = read_records(path)?;
        for r in &records {
            if r.cfg != cfg || r.pred != predicate || r.scan != id {
                return Err(Error::Checkpoint(format!(
                    "{} belongs to scan {} ({}), not {id}; refusing to resume",
                    path.display(),
                    r.scan,
                    r.pred
                )));
            }
        }
        if let Some(last) = records.last() {
            if last.upto < lo || last.upto > hi || (last.upto != hi && (last.upto + 1 - lo) % BLOCK != 0) {
                return Err(Error::Checkpoint(format!(
                    "{}: record ends at {}, which is not a block boundary of {lo}..{hi}",
                    path.display(),
                    last.upto
                )));
            }
            upto = last.upto;
            hits = last.hits.clone();
        }
        writer = Some(CheckpointWriter::open(path, &records)?);
    }

    let ctx = Ctx::new(hi, opts.kmax);
    let blocks: Vec<RangeInclusive<u64>> = {
        let mut v = Vec::new();
        let mut start = upto + 1;
        while start <= hi && upto < hi {
            let end = hi.min(start + BLOCK - 1);
            v.push(start..=end);
            if end == hi {
                break;
            }
            start = end + 1;
        }
        v
    };

    let wave = opts.jobs.max(1) * 4;
    let mut done = 0u64;
    'outer: for chunk in blocks.chunks(wave) {
        let results = map_ordered(chunk, opts.jobs, |block| -> Result<Vec<Hit>> {
            let mut found = Vec::new();
            for n in block.clone() {
                if predicate.applies(n, &ctx) {
                    if let Some(h) = predicate.evaluate(n, &ctx)? {
                        found.push(h);
                    }
                }
            }
            Ok(found)
        });
        for (block, found) in chunk.iter().zip(results) {
            hits.extend(found?);
            upto = *block.end();
            if let Some(w) = writer.as_mut() {
                w.append(&CheckpointRecord {
                    scan: id.clone(),
                    pred: predicate,
                    upto,
                    hits: hits.clone(),
                    cfg: cfg.clone(),
                })?;
            }
            done += 1;
            if opts.stop_after_blocks.is_some_and(|s| done >= s) {
                break 'outer;
            }
        }
    }

    let checked = (lo..=upto).filter(|&n| predicate.applies(n, &ctx)).count() as u64;
    Ok(ScanReport {
        scan: id,
        predicate,
        lo,
        hi,
        kmax: (predicate == PredicateId::Conj217).then_some(opts.kmax),
        upto,
        complete: upto == hi,
        checked,
        skipped: (upto + 1 - lo) - checked,
        hits,
        wall_time: started.elapsed(),
    })
}

#[cfg(test)]
mod tests;
