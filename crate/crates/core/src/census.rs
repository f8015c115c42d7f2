//! Solvability census over the reduced board set.
//!
//! Each admissible partition class is split into work units of at most
//! `shard_size` consecutive boards in the class enumeration order. Workers
//! pull units from a shared counter and send tallies back to the
//! coordinator, which appends one checkpoint line per finished unit.
//! Totals over the whole board space are recovered by weighting each class
//! tally by the index of its stabilizer.

use std::collections::BTreeMap;
use std::fmt;
use std::fs::{File, OpenOptions};
use std::io::{self, BufRead, BufReader, Seek, SeekFrom, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::mpsc;
use std::thread;

use num_bigint::BigUint;
use num_traits::Zero;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::burnside::{self, BurnsideError, RatioReport};
use crate::grid::{Board, SymmetryGroup};
use crate::partitions::{admissible_partitions, BoardPartition, PartitionBoards, PartitionError};
use crate::polyomino::PieceSet;
use crate::solver::{Solver, SolverError};

pub const CHECKPOINT_VERSION: u32 = 1;
const CHECKPOINT_MAGIC: &str = "tilecensus-checkpoint";

#[derive(Debug, Error)]
pub enum CensusError {
    #[error(transparent)]
    Partition(#[from] PartitionError),
    #[error(transparent)]
    Burnside(#[from] BurnsideError),
    #[error("invalid census config: {0}")]
    Config(String),
    #[error("pieces cover {pieces} cells but boards have {open} open cells")]
    AreaMismatch { open: usize, pieces: usize },
    #[error("solver failed on board {index} of class {partition} ({board}): {source}")]
    Solver { partition: String, index: u64, board: String, source: SolverError },
    #[error("checkpoint {path}: {message}")]
    Checkpoint { path: PathBuf, message: String },
    #[error("checkpoint i/o on {path}: {source}")]
    Io { path: PathBuf, source: io::Error },
}

impl CensusError {
    fn checkpoint(path: &Path, message: impl Into<String>) -> CensusError {
        CensusError::Checkpoint { path: path.to_path_buf(), message: message.into() }
    }

    fn io(path: &Path) -> impl FnOnce(io::Error) -> CensusError + '_ {
        move |source| CensusError::Io { path: path.to_path_buf(), source }
    }
}

#[derive(Debug, Clone)]
pub struct CensusConfig {
    pub rows: usize,
    pub cols: usize,
    pub r: usize,
    pub pieces: PieceSet,
    pub jobs: usize,
    pub checkpoint: Option<PathBuf>,
    pub node_cap: Option<u64>,
    /// Largest number of boards in one work unit.
    pub shard_size: u64,
}

impl CensusConfig {
    pub fn new(rows: usize, cols: usize, r: usize, pieces: PieceSet) -> CensusConfig {
        CensusConfig { rows, cols, r, pieces, jobs: 1, checkpoint: None, node_cap: None, shard_size: 4096 }
    }

    pub fn jobs(mut self, jobs: usize) -> Self {
        self.jobs = jobs;
        self
    }

    pub fn checkpoint(mut self, path: impl Into<PathBuf>) -> Self {
        self.checkpoint = Some(path.into());
        self
    }

    pub fn node_cap(mut self, cap: Option<u64>) -> Self {
        self.node_cap = cap;
        self
    }

    pub fn shard_size(mut self, size: u64) -> Self {
        self.shard_size = size;
        self
    }

    pub fn validate(&self) -> Result<(), CensusError> {
        if self.rows == 0 || self.cols == 0 {
            return Err(CensusError::Config(format!("board dimensions must be positive, got {}x{}", self.rows, self.cols)));
        }
        if self.r > self.rows * self.cols {
            return Err(CensusError::Config(format!("r = {} exceeds {} cells", self.r, self.rows * self.cols)));
        }
        if self.jobs == 0 {
            return Err(CensusError::Config("need at least one worker".into()));
        }
        if self.shard_size == 0 {
            return Err(CensusError::Config("shard size must be positive".into()));
        }
        let open = self.rows * self.cols - self.r;
        if self.pieces.total_area() != open {
            return Err(CensusError::AreaMismatch { open, pieces: self.pieces.total_area() });
        }
        Ok(())
    }

    /// Hex SHA-256 over everything that determines the work units and their
    /// results. Worker count and node cap are excluded.
    pub fn hash(&self) -> String {
        let mut h = Sha256::new();
        h.update(format!(
            "v{CHECKPOINT_VERSION} {} {} {} {} {}",
            self.rows,
            self.cols,
            self.r,
            self.shard_size,
            self.pieces.fingerprint()
        ));
        h.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct WorkUnit {
    /// Index into the admissible classes, in tuple order.
    pub class: usize,
    pub start: u64,
    pub end: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UnitTally {
    pub solvable: u64,
    pub unsolvable: u64,
}

/// Finished units keyed by `(class, start)`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CheckpointState {
    pub hash: String,
    pub done: BTreeMap<(usize, u64), (WorkUnit, UnitTally)>,
}

fn unit_line(u: &WorkUnit, t: &UnitTally) -> String {
    format!("unit {} {} {} {} {}\n", u.class, u.start, u.end, t.solvable, t.unsolvable)
}

fn parse_unit(line: &str) -> Option<(WorkUnit, UnitTally)> {
    let mut it = line.strip_prefix("unit ")?.split(' ');
    let mut next = || it.next().and_then(|s| s.parse::<u64>().ok());
    let (class, start, end, solvable, unsolvable) = (next()?, next()?, next()?, next()?, next()?);
    if it.next().is_some() || start > end || solvable + unsolvable != end - start {
        return None;
    }
    Some((WorkUnit { class: class as usize, start, end }, UnitTally { solvable, unsolvable }))
}

impl CheckpointState {
    pub fn new(hash: String) -> CheckpointState {
        CheckpointState { hash, done: BTreeMap::new() }
    }

    fn header(&self) -> String {
        format!("{CHECKPOINT_MAGIC} v{CHECKPOINT_VERSION} {}\n", self.hash)
    }

    /// Writes the whole state, replacing `path`.
    pub fn write(&self, path: &Path) -> Result<(), CensusError> {
        let mut text = self.header();
        for (u, t) in self.done.values() {
            text.push_str(&unit_line(u, t));
        }
        std::fs::write(path, text).map_err(CensusError::io(path))
    }

    /// Reads a checkpoint. A final line without its newline is a record cut
    /// short by a crash and is dropped; with `repair` the file is truncated
    /// back to the last complete record.
    pub fn read(path: &Path, repair: bool) -> Result<CheckpointState, CensusError> {
        let file = File::open(path).map_err(CensusError::io(path))?;
        let mut reader = BufReader::new(file);
        let mut buf = String::new();
        let mut good_len = 0u64;
        let mut state: Option<CheckpointState> = None;
        let mut lineno = 0;
        loop {
            buf.clear();
            let n = reader.read_line(&mut buf).map_err(CensusError::io(path))?;
            if n == 0 {
                break;
            }
            lineno += 1;
            let Some(line) = buf.strip_suffix('\n') else {
                break;
            };
            match &mut state {
                None => {
                    let mut it = line.split(' ');
                    if it.next() != Some(CHECKPOINT_MAGIC) {
                        return Err(CensusError::checkpoint(path, "not a census checkpoint"));
                    }
                    let version = it.next().unwrap_or("");
                    if version != format!("v{CHECKPOINT_VERSION}") {
                        return Err(CensusError::checkpoint(
                            path,
                            format!("version {version} is not v{CHECKPOINT_VERSION}"),
                        ));
                    }
                    let hash = it.next().filter(|h| h.len() == 64).ok_or_else(|| {
                        CensusError::checkpoint(path, "header is missing the config hash")
                    })?;
                    state = Some(CheckpointState::new(hash.to_string()));
                }
                Some(s) => {
                    let (u, t) = parse_unit(line)
                        .ok_or_else(|| CensusError::checkpoint(path, format!("line {lineno} is corrupt: {line:?}")))?;
                    if s.done.insert((u.class, u.start), (u, t)).is_some_and(|old| old != (u, t)) {
                        return Err(CensusError::checkpoint(path, format!("line {lineno} contradicts an earlier record")));
                    }
                }
            }
            good_len += n as u64;
        }
        let state = state.ok_or_else(|| CensusError::checkpoint(path, "missing header"))?;
        if repair {
            let len = std::fs::metadata(path).map_err(CensusError::io(path))?.len();
            if len != good_len {
                let f = OpenOptions::new().write(true).open(path).map_err(CensusError::io(path))?;
                f.set_len(good_len).map_err(CensusError::io(path))?;
            }
        }
        Ok(state)
    }
}

/// Per-class tallies.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CensusRecord {
    pub partition: BoardPartition,
    pub stabilizer: SymmetryGroup,
    pub weight: u32,
    pub board_count: u64,
    pub solvable: u64,
    pub unsolvable: u64,
    pub complete: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CensusReport {
    pub rows: usize,
    pub cols: usize,
    pub r: usize,
    pub records: Vec<CensusRecord>,
    pub reduced_total: u64,
    pub reduced_solvable: u64,
    pub reduced_unsolvable: u64,
    pub weighted_total: BigUint,
    pub weighted_solvable: BigUint,
    pub weighted_unsolvable: BigUint,
    pub orbits: RatioReport,
    /// Boards solved by this run, as opposed to restored from a checkpoint.
    pub solved_this_run: u64,
}

impl CensusReport {
    pub fn orbit_count(&self) -> &BigUint {
        &self.orbits.orbit_count
    }

    /// One line of `key=value` pairs.
    pub fn summary_line(&self) -> String {
        format!(
            "m={} n={} r={} classes={} reduced_total={} reduced_solvable={} reduced_unsolvable={} weighted_total={} weighted_solvable={} weighted_unsolvable={} orbit_count={} ratio={}",
            self.rows,
            self.cols,
            self.r,
            self.records.len(),
            self.reduced_total,
            self.reduced_solvable,
            self.reduced_unsolvable,
            self.weighted_total,
            self.weighted_solvable,
            self.weighted_unsolvable,
            self.orbits.orbit_count,
            self.orbits.decimal(4),
        )
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "partition,stabilizer,weight,boards,solvable,unsolvable,weighted_solvable,weighted_unsolvable")?;
        for rec in &self.records {
            writeln!(
                w,
                "\"{}\",{},{},{},{},{},{},{}",
                rec.partition,
                rec.stabilizer.name(),
                rec.weight,
                rec.board_count,
                rec.solvable,
                rec.unsolvable,
                rec.solvable * rec.weight as u64,
                rec.unsolvable * rec.weight as u64,
            )?;
        }
        Ok(())
    }
}

impl fmt::Display for CensusReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let width = self.records.iter().map(|r| r.partition.to_string().len()).max().unwrap_or(0).max(9);
        writeln!(f, "{:<width$}  {:>8}  {:>6}  {:>10}  {:>10}  {:>10}", "partition", "K", "weight", "boards", "solvable", "unsolvable")?;
        for rec in &self.records {
            writeln!(
                f,
                "{:<width$}  {:>8}  {:>6}  {:>10}  {:>10}  {:>10}",
                rec.partition.to_string(),
                rec.stabilizer.name(),
                rec.weight,
                rec.board_count,
                rec.solvable,
                rec.unsolvable
            )?;
        }
        writeln!(f)?;
        writeln!(f, "reduced boards:   {} ({} solvable, {} unsolvable)", self.reduced_total, self.reduced_solvable, self.reduced_unsolvable)?;
        writeln!(
            f,
            "all boards:       {} ({} solvable, {} unsolvable)",
            self.weighted_total, self.weighted_solvable, self.weighted_unsolvable
        )?;
        write!(f, "classes:          {} (ratio {})", self.orbits.orbit_count, self.orbits.decimal(4))
    }
}

struct Class {
    partition: BoardPartition,
    stabilizer: SymmetryGroup,
    weight: u32,
    count: u64,
}

fn plan(cfg: &CensusConfig) -> Result<(Vec<Class>, Vec<WorkUnit>), CensusError> {
    let mut classes = Vec::new();
    let mut units = Vec::new();
    for (i, c) in admissible_partitions(cfg.rows, cfg.cols, cfg.r)?.into_iter().enumerate() {
        let count = c
            .board_count_u64()
            .ok_or_else(|| CensusError::Config(format!("class {} has too many boards", c.partition)))?;
        let mut start = 0;
        while start < count {
            let end = count.min(start + cfg.shard_size);
            units.push(WorkUnit { class: i, start, end });
            start = end;
        }
        classes.push(Class { partition: c.partition, stabilizer: c.stabilizer, weight: c.weight, count });
    }
    Ok((classes, units))
}

fn run_unit(solver: &mut Solver, class: &Class, unit: WorkUnit) -> Result<UnitTally, CensusError> {
    let boards = PartitionBoards::starting_at(&class.partition, unit.start)?;
    let mut tally = UnitTally { solvable: 0, unsolvable: 0 };
    for (offset, b) in boards.take((unit.end - unit.start) as usize).enumerate() {
        match solver.solvable(&b) {
            Ok(true) => tally.solvable += 1,
            Ok(false) => tally.unsolvable += 1,
            Err(source) => {
                return Err(CensusError::Solver {
                    partition: class.partition.to_string(),
                    index: unit.start + offset as u64,
                    board: compact(&b),
                    source,
                })
            }
        }
    }
    Ok(tally)
}

fn compact(b: &Board) -> String {
    let cells: Vec<String> = b.blocked_cells().iter().map(|(r, c)| format!("{r},{c}")).collect();
    format!("{} {}: {}", b.rows(), b.cols(), cells.join(" "))
}

/// Progress as `(boards done, boards total)`, reported after each unit.
pub type Progress<'a> = &'a mut dyn FnMut(u64, u64);

pub fn run_census(cfg: &CensusConfig) -> Result<CensusReport, CensusError> {
    run_census_with_progress(cfg, &mut |_, _| {})
}

pub fn run_census_with_progress(cfg: &CensusConfig, progress: Progress<'_>) -> Result<CensusReport, CensusError> {
    cfg.validate()?;
    let (classes, units) = plan(cfg)?;
    let hash = cfg.hash();
    let mut state = CheckpointState::new(hash.clone());
    let mut sink = None;
    if let Some(path) = &cfg.checkpoint {
        if path.exists() && std::fs::metadata(path).map_err(CensusError::io(path))?.len() > 0 {
            state = CheckpointState::read(path, true)?;
            if state.hash != hash {
                return Err(CensusError::checkpoint(path, "written for a different configuration"));
            }
            for (u, _) in state.done.values() {
                if !units.contains(u) {
                    return Err(CensusError::checkpoint(path, format!("unknown work unit {u:?}")));
                }
            }
        } else {
            state.write(path)?;
        }
        let mut f = OpenOptions::new().append(true).open(path).map_err(CensusError::io(path))?;
        f.seek(SeekFrom::End(0)).map_err(CensusError::io(path))?;
        sink = Some((path.as_path(), f));
    }

    let todo: Vec<WorkUnit> = units.iter().copied().filter(|u| !state.done.contains_key(&(u.class, u.start))).collect();
    let total: u64 = classes.iter().map(|c| c.count).sum();
    let mut done_boards: u64 = state.done.values().map(|(u, _)| u.end - u.start).sum();
    let solved_before = done_boards;
    progress(done_boards, total);

    let solver = Solver::new(cfg.rows, cfg.cols, &cfg.pieces)
        .map_err(|e| CensusError::Config(e.to_string()))?
        .with_node_cap(cfg.node_cap);
    let next = AtomicUsize::new(0);
    let stop = AtomicBool::new(false);
    let mut first_error: Option<CensusError> = None;
    thread::scope(|s| {
        let (tx, rx) = mpsc::channel();
        for _ in 0..cfg.jobs.min(todo.len().max(1)) {
            let tx = tx.clone();
            let mut solver = solver.fork();
            let (todo, classes, next, stop) = (&todo, &classes, &next, &stop);
            s.spawn(move || loop {
                if stop.load(Ordering::Relaxed) {
                    break;
                }
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(&unit) = todo.get(i) else { break };
                let result = run_unit(&mut solver, &classes[unit.class], unit);
                if result.is_err() {
                    stop.store(true, Ordering::Relaxed);
                }
                if tx.send((unit, result)).is_err() {
                    break;
                }
            });
        }
        drop(tx);
        for (unit, result) in rx {
            match result {
                Ok(tally) => {
                    if let Some((path, f)) = &mut sink {
                        if let Err(e) = f.write_all(unit_line(&unit, &tally).as_bytes()).and_then(|_| f.flush()) {
                            stop.store(true, Ordering::Relaxed);
                            first_error.get_or_insert(CensusError::Io { path: path.to_path_buf(), source: e });
                        }
                    }
                    state.done.insert((unit.class, unit.start), (unit, tally));
                    done_boards += unit.end - unit.start;
                    progress(done_boards, total);
                }
                Err(e) => {
                    first_error.get_or_insert(e);
                }
            }
        }
    });
    if let Some(e) = first_error {
        return Err(e);
    }
    aggregate(cfg, &classes, &state, done_boards - solved_before)
}

fn aggregate(
    cfg: &CensusConfig,
    classes: &[Class],
    state: &CheckpointState,
    solved_this_run: u64,
) -> Result<CensusReport, CensusError> {
    let mut records: Vec<CensusRecord> = classes
        .iter()
        .map(|c| CensusRecord {
            partition: c.partition.clone(),
            stabilizer: c.stabilizer.clone(),
            weight: c.weight,
            board_count: c.count,
            solvable: 0,
            unsolvable: 0,
            complete: false,
        })
        .collect();
    for (u, t) in state.done.values() {
        records[u.class].solvable += t.solvable;
        records[u.class].unsolvable += t.unsolvable;
    }
    let mut report = CensusReport {
        rows: cfg.rows,
        cols: cfg.cols,
        r: cfg.r,
        records: Vec::new(),
        reduced_total: 0,
        reduced_solvable: 0,
        reduced_unsolvable: 0,
        weighted_total: BigUint::zero(),
        weighted_solvable: BigUint::zero(),
        weighted_unsolvable: BigUint::zero(),
        orbits: burnside::ratio(cfg.rows, cfg.cols, cfg.r)?,
        solved_this_run,
    };
    for rec in &mut records {
        rec.complete = rec.solvable + rec.unsolvable == rec.board_count;
        debug_assert!(rec.complete);
        report.reduced_total += rec.board_count;
        report.reduced_solvable += rec.solvable;
        report.reduced_unsolvable += rec.unsolvable;
        report.weighted_solvable += BigUint::from(rec.solvable) * rec.weight;
        report.weighted_unsolvable += BigUint::from(rec.unsolvable) * rec.weight;
    }
    report.weighted_total = &report.weighted_solvable + &report.weighted_unsolvable;
    report.records = records;
    Ok(report)
}
