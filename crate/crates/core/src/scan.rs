//! Resumable Wall-Sun-Sun scan over a prime range.
//!
//! The range is cut into fixed-size blocks. Up to `workers` blocks are tested
//! in parallel, then committed one at a time in ascending order by the calling
//! thread, which is the only writer of the checkpoint and results files.
//! After every committed block the checkpoint is rewritten atomically
//! (write to a sibling temp file, then rename).
//!
//! A resumed scan restarts after `last_completed`. Committed state depends
//! only on which primes have been tested, so block size, worker count and
//! interruption points do not change the final checkpoint (apart from
//! `wall_time_seconds`).

use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::primes_in_range;
use crate::error::{Error, Result};
use crate::wss::{is_wss, WssRecord};

pub const DEFAULT_BLOCK_SIZE: u64 = 1 << 16;

/// Largest scan bound: `p^2` must fit in a `u64`.
pub const MAX_SCAN_BOUND: u64 = u32::MAX as u64;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanCheckpoint {
    pub range_lo: u64,
    pub range_hi: u64,
    /// Highest prime whose block has been committed; `None` before the first.
    pub last_completed: Option<u64>,
    pub hits: Vec<WssRecord>,
    pub anomaly_count: u64,
    pub wall_time_seconds: f64,
}

impl ScanCheckpoint {
    pub fn new(range_lo: u64, range_hi: u64) -> Self {
        ScanCheckpoint {
            range_lo,
            range_hi,
            last_completed: None,
            hits: Vec::new(),
            anomaly_count: 0,
            wall_time_seconds: 0.0,
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let cp: ScanCheckpoint = serde_json::from_str(&text).map_err(|e| Error::Checkpoint {
            path: path.to_owned(),
            reason: format!("unreadable: {e}"),
        })?;
        cp.validate().map_err(|reason| Error::Checkpoint {
            path: path.to_owned(),
            reason,
        })?;
        Ok(cp)
    }

    fn validate(&self) -> std::result::Result<(), String> {
        if self.range_lo > self.range_hi {
            return Err(format!(
                "range_lo {} above range_hi {}",
                self.range_lo, self.range_hi
            ));
        }
        if let Some(last) = self.last_completed {
            if last < self.range_lo || last > self.range_hi {
                return Err(format!("last_completed {last} outside the range"));
            }
        }
        if self
            .hits
            .iter()
            .any(|h| h.p < self.range_lo || Some(h.p) > self.last_completed)
        {
            return Err("hit outside the completed prefix".into());
        }
        if !self.wall_time_seconds.is_finite() || self.wall_time_seconds < 0.0 {
            return Err("invalid wall_time_seconds".into());
        }
        Ok(())
    }

    /// Serialized form with trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("checkpoint serializes");
        s.push('\n');
        s
    }

    pub fn store(&self, path: &Path) -> Result<()> {
        let tmp = tmp_sibling(path);
        fs::write(&tmp, self.to_json()).map_err(|e| Error::io(&tmp, e))?;
        fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
    }

    fn next_start(&self) -> u64 {
        self.last_completed.map_or(self.range_lo, |p| p + 1)
    }
}

fn tmp_sibling(path: &Path) -> PathBuf {
    let mut name = path.file_name().unwrap_or_default().to_os_string();
    name.push(".tmp");
    path.with_file_name(name)
}

/// One line of the results file.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WssResultLine {
    pub p: u64,
    pub legendre5: i8,
    pub index: u64,
    pub residue: u64,
    pub is_wss: bool,
}

impl From<&WssRecord> for WssResultLine {
    fn from(r: &WssRecord) -> Self {
        WssResultLine {
            p: r.p,
            legendre5: r.legendre5,
            index: r.index,
            residue: r.residue_fib_index_mod_p2,
            is_wss: r.is_wss,
        }
    }
}

#[derive(Clone, Debug)]
pub struct ScanConfig {
    pub lo: u64,
    pub hi: u64,
    pub workers: usize,
    pub checkpoint_path: PathBuf,
    pub results_path: Option<PathBuf>,
    pub block_size: u64,
    /// Stop after committing this many blocks (the scan resumes later).
    pub max_blocks: Option<usize>,
}

impl ScanConfig {
    pub fn new(lo: u64, hi: u64, workers: usize, checkpoint_path: impl Into<PathBuf>) -> Self {
        ScanConfig {
            lo,
            hi,
            workers,
            checkpoint_path: checkpoint_path.into(),
            results_path: None,
            block_size: DEFAULT_BLOCK_SIZE,
            max_blocks: None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct ScanOutcome {
    pub checkpoint: ScanCheckpoint,
    /// Primes tested during this invocation.
    pub primes_tested: u64,
    pub resumed: bool,
    pub complete: bool,
}

struct BlockResult {
    records: Vec<WssRecord>,
}

fn scan_block(lo: u64, hi: u64) -> Result<BlockResult> {
    let records = primes_in_range(lo, hi)
        .into_iter()
        .map(is_wss)
        .collect::<Result<Vec<_>>>()?;
    Ok(BlockResult { records })
}

/// Tests every prime in `[lo, hi]`, resuming from an existing checkpoint.
pub fn scan_wss(cfg: &ScanConfig) -> Result<ScanOutcome> {
    if cfg.lo < 2 || cfg.lo > cfg.hi {
        return Err(Error::domain(format!(
            "invalid scan range [{}, {}]",
            cfg.lo, cfg.hi
        )));
    }
    if cfg.hi > MAX_SCAN_BOUND {
        return Err(Error::Overflow(format!(
            "scan bound {} above {MAX_SCAN_BOUND}",
            cfg.hi
        )));
    }
    if cfg.block_size == 0 || cfg.workers == 0 {
        return Err(Error::domain(
            "block size and worker count must be positive",
        ));
    }

    let started = Instant::now();
    let path = &cfg.checkpoint_path;
    let resumed = path.exists();
    let mut cp = if resumed {
        let cp = ScanCheckpoint::load(path)?;
        if (cp.range_lo, cp.range_hi) != (cfg.lo, cfg.hi) {
            return Err(Error::Checkpoint {
                path: path.clone(),
                reason: format!(
                    "covers [{}, {}], not the requested [{}, {}]",
                    cp.range_lo, cp.range_hi, cfg.lo, cfg.hi
                ),
            });
        }
        cp
    } else {
        ScanCheckpoint::new(cfg.lo, cfg.hi)
    };
    let base_wall = cp.wall_time_seconds;

    let mut results = match &cfg.results_path {
        Some(rp) => Some(open_results(rp, cp.last_completed)?),
        None => None,
    };
    if !resumed {
        cp.store(path)?;
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| Error::Internal(format!("thread pool: {e}")))?;

    let mut blocks = Vec::new();
    let mut start = cp.next_start();
    while start <= cfg.hi {
        let end = start.saturating_add(cfg.block_size - 1).min(cfg.hi);
        blocks.push((start, end));
        start = end + 1;
    }

    let mut committed = 0usize;
    let mut primes_tested = 0u64;
    let budget = cfg.max_blocks.unwrap_or(usize::MAX);
    'waves: for wave in blocks.chunks(cfg.workers) {
        let take = wave.len().min(budget - committed);
        let wave = &wave[..take];
        let done: Vec<Result<BlockResult>> = pool.install(|| {
            wave.par_iter()
                .map(|&(lo, hi)| scan_block(lo, hi))
                .collect()
        });
        for block in done {
            let block = block?;
            primes_tested += block.records.len() as u64;
            for r in &block.records {
                if r.is_wss {
                    cp.hits.push(*r);
                }
                if !r.criteria_agree {
                    cp.anomaly_count += 1;
                }
            }
            if let Some(w) = results.as_mut() {
                for r in &block.records {
                    let line = serde_json::to_string(&WssResultLine::from(r))
                        .expect("result line serializes");
                    writeln!(w.1, "{line}").map_err(|e| Error::io(&w.0, e))?;
                }
                w.1.flush().map_err(|e| Error::io(&w.0, e))?;
            }
            if let Some(last) = block.records.last() {
                cp.last_completed = Some(last.p);
            }
            cp.wall_time_seconds = base_wall + started.elapsed().as_secs_f64();
            cp.store(path)?;
            committed += 1;
            if committed >= budget {
                break 'waves;
            }
        }
    }

    Ok(ScanOutcome {
        checkpoint: cp,
        primes_tested,
        resumed,
        complete: committed == blocks.len(),
    })
}

/// Opens the results file for appending, dropping any lines past the
/// committed prefix so a resumed scan does not duplicate records.
fn open_results(
    path: &Path,
    last_completed: Option<u64>,
) -> Result<(PathBuf, BufWriter<fs::File>)> {
    let kept = if path.exists() {
        let f = fs::File::open(path).map_err(|e| Error::io(path, e))?;
        let mut kept = Vec::new();
        for line in BufReader::new(f).lines() {
            let line = line.map_err(|e| Error::io(path, e))?;
            if line.trim().is_empty() {
                continue;
            }
            let rec: WssResultLine =
                serde_json::from_str(&line).map_err(|e| Error::Checkpoint {
                    path: path.to_owned(),
                    reason: format!("bad results line: {e}"),
                })?;
            if last_completed.is_some_and(|last| rec.p <= last) {
                kept.push(line);
            }
        }
        kept
    } else {
        Vec::new()
    };
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    for line in kept {
        writeln!(w, "{line}").map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok((path.to_owned(), w))
}

/// Checkpoint JSON with `wall_time_seconds` zeroed, for comparisons.
pub fn normalized_checkpoint_json(cp: &ScanCheckpoint) -> String {
    ScanCheckpoint {
        wall_time_seconds: 0.0,
        ..cp.clone()
    }
    .to_json()
}
