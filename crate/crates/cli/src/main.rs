use std::fs::File;
use std::io::{self, BufWriter, IsTerminal, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use tilecensus_core::burnside::{self, BurnsideError, DEFAULT_SWEEP_CAP};
use tilecensus_core::census::{run_census_with_progress, CensusConfig, CensusError};
use tilecensus_core::grid::{parse_boards, GridError, Symmetry};
use tilecensus_core::partitions::{self, PartitionError};
use tilecensus_core::polyomino::{parse_pieces, PieceSet, PolyominoError};
use tilecensus_core::solver::{render_tiling, validate_tiling, Solver, SolverError};

const EXIT_FAILURE: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_NODE_CAP: u8 = 3;
const EXIT_CHECKPOINT: u8 = 4;

/// Blocked-board enumeration up to symmetry and polyomino tiling censuses.
#[derive(Parser)]
#[command(name = "tilecensus", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Dims {
    /// Rows.
    #[arg(short)]
    m: usize,
    /// Columns.
    #[arg(short)]
    n: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Stream the reduced board set, one grid per board.
    Reduce {
        #[command(flatten)]
        dims: Dims,
        /// Blocked cells.
        #[arg(short)]
        r: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Admissible partitions with stabilizers and weights.
    Partitions {
        #[command(flatten)]
        dims: Dims,
        #[arg(short)]
        r: usize,
    },
    /// Number of symmetry classes of boards, with fixed-point counts.
    Burnside {
        #[command(flatten)]
        dims: Dims,
        #[arg(short)]
        r: usize,
    },
    /// Reduced-set size over class count for every r.
    Ratio {
        #[command(flatten)]
        dims: Dims,
        #[arg(long)]
        r_max: Option<usize>,
    },
    /// Decide whether boards can be tiled.
    Solve {
        /// File with one or more boards separated by blank lines.
        #[arg(long)]
        board: PathBuf,
        /// Piece file, or a preset or piece name.
        #[arg(long)]
        pieces: String,
        /// Print one tiling for each solvable board.
        #[arg(long)]
        witness: bool,
        #[arg(long)]
        node_cap: Option<u64>,
    },
    /// Classify every reduced board and weight the tallies up to all boards.
    Census {
        #[command(flatten)]
        dims: Dims,
        #[arg(short)]
        r: usize,
        /// Piece file, or a preset or piece name.
        #[arg(long)]
        pieces: String,
        /// Worker threads (default: available cores).
        #[arg(long)]
        jobs: Option<usize>,
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        /// Search-node limit per board; exceeding it aborts the census.
        #[arg(long)]
        node_cap: Option<u64>,
        /// Per-partition CSV output.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Boards per work unit.
        #[arg(long, default_value_t = 4096)]
        shard_size: u64,
        /// Print only the key=value summary line.
        #[arg(long)]
        summary: bool,
    },
}

fn load_pieces(source: &str) -> Result<PieceSet> {
    let path = Path::new(source);
    if path.is_file() {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        return parse_pieces(&text).with_context(|| format!("parsing {}", path.display()));
    }
    parse_pieces(source).with_context(|| format!("`{source}` is neither a piece file nor a known piece or preset"))
}

fn reduce(m: usize, n: usize, r: usize, out: Option<PathBuf>) -> Result<()> {
    let boards = partitions::reduced_set(m, n, r)?;
    let sink: Box<dyn Write> = match &out {
        Some(p) => Box::new(File::create(p).with_context(|| format!("creating {}", p.display()))?),
        None => Box::new(io::stdout().lock()),
    };
    let mut w = BufWriter::new(sink);
    for (i, b) in boards.enumerate() {
        if i > 0 {
            writeln!(w)?;
        }
        write!(w, "{b}")?;
    }
    w.flush()?;
    Ok(())
}

fn show_partitions(m: usize, n: usize, r: usize) -> Result<()> {
    let classes = partitions::admissible_partitions(m, n, r)?;
    let width = classes.iter().map(|c| c.partition.to_string().len()).max().unwrap_or(0).max(9);
    println!("{:<width$}  {:>8}  {:>6}  {:>12}", "partition", "K", "weight", "boards");
    for c in &classes {
        println!("{:<width$}  {:>8}  {:>6}  {:>12}", c.partition.to_string(), c.stabilizer.name(), c.weight, c.board_count);
    }
    println!();
    println!("partitions: {}", classes.len());
    println!("reduced boards: {}", partitions::reduced_size(m, n, r)?);
    println!("weighted total: {}", partitions::weighted_total(m, n, r)?);
    Ok(())
}

fn show_burnside(m: usize, n: usize, r: usize) -> Result<()> {
    let group = tilecensus_core::grid::symmetry_group_of(m, n);
    println!("group {} of order {}", group.name(), group.order());
    for &g in group.elements() {
        let fixed = burnside::fixed_count(g, m, n, r)?;
        println!("  {:<4} fixes {fixed}", Symmetry::name(g));
    }
    println!("classes: {}", burnside::orbit_count(m, n, r)?);
    Ok(())
}

fn show_ratio(m: usize, n: usize, r_max: Option<usize>) -> Result<()> {
    let sweep = burnside::ratio_sweep(m, n, r_max, DEFAULT_SWEEP_CAP)?;
    println!("{:>4}  {:>14}  {:>14}  {:>8}", "r", "reduced", "classes", "ratio");
    for rep in &sweep.reports {
        println!("{:>4}  {:>14}  {:>14}  {:>8}", rep.r, rep.reduced_size, rep.orbit_count, rep.decimal(4));
    }
    for check in &sweep.checks {
        println!("{check}");
    }
    Ok(())
}

fn solve(board: &Path, pieces: &str, witness: bool, node_cap: Option<u64>) -> Result<()> {
    let pieces = load_pieces(pieces)?;
    let text = std::fs::read_to_string(board).with_context(|| format!("reading {}", board.display()))?;
    let boards = parse_boards(&text).with_context(|| format!("parsing {}", board.display()))?;
    anyhow::ensure!(!boards.is_empty(), "{} contains no boards", board.display());
    let mut solver: Option<Solver> = None;
    for (i, b) in boards.iter().enumerate() {
        if i == 0 || (boards[i - 1].rows(), boards[i - 1].cols()) != (b.rows(), b.cols()) {
            solver = Some(Solver::new(b.rows(), b.cols(), &pieces)?.with_node_cap(node_cap));
        }
        let s = solver.as_mut().expect("built for the first board");
        if i > 0 {
            println!();
        }
        match s.solve(b)? {
            Some(t) => {
                validate_tiling(b, &pieces, &t).map_err(|e| anyhow::anyhow!("internal error, bad tiling: {e}"))?;
                println!("solvable");
                if witness {
                    print!("{}", render_tiling(b, &t));
                }
            }
            None => println!("unsolvable"),
        }
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn census(
    m: usize,
    n: usize,
    r: usize,
    pieces: &str,
    jobs: Option<usize>,
    checkpoint: Option<PathBuf>,
    node_cap: Option<u64>,
    csv: Option<PathBuf>,
    shard_size: u64,
    summary: bool,
) -> Result<()> {
    let pieces = load_pieces(pieces)?;
    let jobs = jobs.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let mut cfg = CensusConfig::new(m, n, r, pieces).jobs(jobs).node_cap(node_cap).shard_size(shard_size);
    if let Some(p) = checkpoint {
        cfg = cfg.checkpoint(p);
    }
    let tty = io::stderr().is_terminal();
    let mut last = 0u64;
    let mut progress = |done: u64, total: u64| {
        if tty && (done == total || done - last > total / 200) {
            last = done;
            eprint!("\r{done}/{total} boards");
            if done == total {
                eprintln!();
            }
        }
    };
    let report = run_census_with_progress(&cfg, &mut progress)?;
    if let Some(p) = csv {
        let f = File::create(&p).with_context(|| format!("creating {}", p.display()))?;
        let mut w = BufWriter::new(f);
        report.write_csv(&mut w)?;
        w.flush()?;
    }
    if !summary {
        println!("{report}");
        println!();
    }
    println!("{}", report.summary_line());
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Reduce { dims, r, out } => reduce(dims.m, dims.n, r, out),
        Command::Partitions { dims, r } => show_partitions(dims.m, dims.n, r),
        Command::Burnside { dims, r } => show_burnside(dims.m, dims.n, r),
        Command::Ratio { dims, r_max } => show_ratio(dims.m, dims.n, r_max),
        Command::Solve { board, pieces, witness, node_cap } => solve(&board, &pieces, witness, node_cap),
        Command::Census { dims, r, pieces, jobs, checkpoint, node_cap, csv, shard_size, summary } => {
            census(dims.m, dims.n, r, &pieces, jobs, checkpoint, node_cap, csv, shard_size, summary)
        }
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<CensusError>() {
            return match e {
                CensusError::Solver { source: SolverError::NodeCapExceeded { .. }, .. } => EXIT_NODE_CAP,
                CensusError::Solver { .. } => EXIT_FAILURE,
                CensusError::Checkpoint { .. } | CensusError::Io { .. } => EXIT_CHECKPOINT,
                _ => EXIT_CONFIG,
            };
        }
        if let Some(e) = cause.downcast_ref::<SolverError>() {
            return match e {
                SolverError::NodeCapExceeded { .. } => EXIT_NODE_CAP,
                _ => EXIT_CONFIG,
            };
        }
        if cause.is::<PolyominoError>()
            || cause.is::<GridError>()
            || cause.is::<PartitionError>()
            || cause.is::<BurnsideError>()
        {
            return EXIT_CONFIG;
        }
    }
    EXIT_FAILURE
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
