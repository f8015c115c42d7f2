//! Free polyominoes, piece sets and placements on blocked boards.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::str::FromStr;

use thiserror::Error;

use crate::grid::Board;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolyominoError {
    #[error("polyomino has no cells")]
    Empty,
    #[error("polyomino cells are not edge-connected")]
    Disconnected,
    #[error("cell ({0}, {1}) listed twice")]
    DuplicateCell(usize, usize),
    #[error("unknown piece or preset name {0:?}")]
    UnknownName(String),
    #[error("piece file line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("piece set is empty")]
    EmptySet,
}

/// A polyomino up to rotation and reflection, stored as its canonical image.
///
/// Equality, ordering and hashing look at the cells only; the name is a label.
#[derive(Clone)]
pub struct FreePolyomino {
    cells: Vec<(usize, usize)>,
    name: Option<String>,
}

fn normalize(cells: &mut [(usize, usize)]) {
    let r0 = cells.iter().map(|c| c.0).min().unwrap_or(0);
    let c0 = cells.iter().map(|c| c.1).min().unwrap_or(0);
    for c in cells.iter_mut() {
        *c = (c.0 - r0, c.1 - c0);
    }
    cells.sort_unstable();
}

/// The eight dihedral images of a normalized cell list, each normalized and
/// sorted, duplicates included.
fn dihedral_images(cells: &[(usize, usize)]) -> Vec<Vec<(usize, usize)>> {
    let h = cells.iter().map(|c| c.0).max().unwrap_or(0);
    let w = cells.iter().map(|c| c.1).max().unwrap_or(0);
    let maps: [&dyn Fn(usize, usize) -> (usize, usize); 8] = [
        &|r, c| (r, c),
        &|r, c| (w - c, r),
        &|r, c| (h - r, w - c),
        &|r, c| (c, h - r),
        &|r, c| (h - r, c),
        &|r, c| (r, w - c),
        &|r, c| (c, r),
        &|r, c| (w - c, h - r),
    ];
    maps.iter()
        .map(|f| {
            let mut img: Vec<(usize, usize)> = cells.iter().map(|&(r, c)| f(r, c)).collect();
            normalize(&mut img);
            img
        })
        .collect()
}

fn is_connected(cells: &[(usize, usize)]) -> bool {
    let set: BTreeSet<(usize, usize)> = cells.iter().copied().collect();
    let mut seen = BTreeSet::new();
    let mut queue = VecDeque::from([cells[0]]);
    seen.insert(cells[0]);
    while let Some((r, c)) = queue.pop_front() {
        let mut next = vec![(r + 1, c), (r, c + 1)];
        if r > 0 {
            next.push((r - 1, c));
        }
        if c > 0 {
            next.push((r, c - 1));
        }
        for n in next {
            if set.contains(&n) && seen.insert(n) {
                queue.push_back(n);
            }
        }
    }
    seen.len() == set.len()
}

/// Canonical free form of a cell set: the lexicographically smallest sorted
/// row-major cell list among the normalized dihedral images.
pub fn canonical_free_form<I>(cells: I) -> Result<FreePolyomino, PolyominoError>
where
    I: IntoIterator<Item = (usize, usize)>,
{
    let mut cells: Vec<(usize, usize)> = cells.into_iter().collect();
    if cells.is_empty() {
        return Err(PolyominoError::Empty);
    }
    cells.sort_unstable();
    if let Some(w) = cells.windows(2).find(|w| w[0] == w[1]) {
        return Err(PolyominoError::DuplicateCell(w[0].0, w[0].1));
    }
    if !is_connected(&cells) {
        return Err(PolyominoError::Disconnected);
    }
    normalize(&mut cells);
    let best = dihedral_images(&cells).into_iter().min().expect("eight images");
    Ok(FreePolyomino { cells: best, name: None })
}

impl FreePolyomino {
    /// Parses `#`/`.` rows.
    pub fn from_ascii(rows: &[&str]) -> Result<FreePolyomino, PolyominoError> {
        let mut cells = Vec::new();
        for (r, row) in rows.iter().enumerate() {
            for (c, ch) in row.chars().enumerate() {
                match ch {
                    '#' => cells.push((r, c)),
                    '.' => {}
                    other => {
                        return Err(PolyominoError::Parse {
                            line: r + 1,
                            message: format!("unexpected character {other:?} in shape"),
                        })
                    }
                }
            }
        }
        canonical_free_form(cells)
    }

    pub fn with_name(mut self, name: impl Into<String>) -> FreePolyomino {
        self.name = Some(name.into());
        self
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    /// Normalized canonical cells, sorted row-major.
    pub fn cells(&self) -> &[(usize, usize)] {
        &self.cells
    }

    pub fn order(&self) -> usize {
        self.cells.len()
    }

    pub fn height(&self) -> usize {
        self.cells.iter().map(|c| c.0).max().unwrap_or(0) + 1
    }

    pub fn width(&self) -> usize {
        self.cells.iter().map(|c| c.1).max().unwrap_or(0) + 1
    }

    /// The distinct fixed orientations, sorted.
    pub fn images(&self) -> Vec<Vec<(usize, usize)>> {
        let mut imgs = dihedral_images(&self.cells);
        imgs.sort();
        imgs.dedup();
        imgs
    }

    /// `#`/`.` rows of the canonical image.
    pub fn to_ascii(&self) -> Vec<String> {
        let mut rows = vec![vec!['.'; self.width()]; self.height()];
        for &(r, c) in &self.cells {
            rows[r][c] = '#';
        }
        rows.into_iter().map(|r| r.into_iter().collect()).collect()
    }
}

impl PartialEq for FreePolyomino {
    fn eq(&self, other: &Self) -> bool {
        self.cells == other.cells
    }
}

impl Eq for FreePolyomino {}

impl Hash for FreePolyomino {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.cells.hash(state);
    }
}

impl PartialOrd for FreePolyomino {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for FreePolyomino {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.order(), &self.cells).cmp(&(other.order(), &other.cells))
    }
}

impl fmt::Debug for FreePolyomino {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FreePolyomino({}: {})", self.name().unwrap_or("?"), self.to_ascii().join("/"))
    }
}

const BUILTINS: &[(&str, &[&str])] = &[
    ("monomino", &["#"]),
    ("domino", &["##"]),
    ("I-tromino", &["###"]),
    ("L-tromino", &["#.", "##"]),
    ("I-tetromino", &["####"]),
    ("L-tetromino", &["#.", "#.", "##"]),
    ("O-tetromino", &["##", "##"]),
    ("S-tetromino", &[".##", "##."]),
    ("T-tetromino", &["###", ".#."]),
    ("F-pentomino", &[".##", "##.", ".#."]),
    ("I-pentomino", &["#####"]),
    ("L-pentomino", &["#.", "#.", "#.", "##"]),
    ("N-pentomino", &["##..", ".###"]),
    ("P-pentomino", &["##", "##", "#."]),
    ("T-pentomino", &["###", ".#.", ".#."]),
    ("U-pentomino", &["#.#", "###"]),
    ("V-pentomino", &["#..", "#..", "###"]),
    ("W-pentomino", &["#..", "##.", ".##"]),
    ("X-pentomino", &[".#.", "###", ".#."]),
    ("Y-pentomino", &[".#..", "####"]),
    ("Z-pentomino", &["##.", ".#.", ".##"]),
];

const PRESETS: &[(&str, &[(&str, u32)])] = &[
    (
        "genius-square",
        &[
            ("monomino", 1),
            ("domino", 1),
            ("I-tromino", 1),
            ("L-tromino", 1),
            ("I-tetromino", 1),
            ("L-tetromino", 1),
            ("O-tetromino", 1),
            ("S-tetromino", 1),
            ("T-tetromino", 1),
        ],
    ),
    (
        "pentominoes-all",
        &[
            ("F-pentomino", 1),
            ("I-pentomino", 1),
            ("L-pentomino", 1),
            ("N-pentomino", 1),
            ("P-pentomino", 1),
            ("T-pentomino", 1),
            ("U-pentomino", 1),
            ("V-pentomino", 1),
            ("W-pentomino", 1),
            ("X-pentomino", 1),
            ("Y-pentomino", 1),
            ("Z-pentomino", 1),
        ],
    ),
    ("i-pieces", &[("monomino", 1), ("domino", 1), ("I-tromino", 1), ("I-tetromino", 1), ("I-pentomino", 1)]),
    (
        "tetrominoes-6x7",
        &[("I-tetromino", 2), ("L-tetromino", 2), ("O-tetromino", 2), ("T-tetromino", 2), ("S-tetromino", 1)],
    ),
];

fn normalize_name(name: &str) -> String {
    name.trim().to_ascii_lowercase().replace(['_', ' '], "-")
}

/// Canonical builtin name for an accepted spelling.
fn builtin_key(name: &str) -> Option<&'static str> {
    let key = normalize_name(name);
    let alias = match key.as_str() {
        "monomino" | "i1" => "monomino",
        "domino" | "i2" => "domino",
        "i3" => "I-tromino",
        "l3" | "v-tromino" => "L-tromino",
        "i4" => "I-tetromino",
        "l4" | "j-tetromino" => "L-tetromino",
        "o4" | "square" | "square-tetromino" => "O-tetromino",
        "s4" | "z4" | "z-tetromino" | "skew-tetromino" => "S-tetromino",
        "t4" => "T-tetromino",
        _ => "",
    };
    if !alias.is_empty() {
        return BUILTINS.iter().map(|b| b.0).find(|&n| n == alias);
    }
    let key = match key.as_str() {
        k if k.len() == 1 && "filnptuvwxyz".contains(k) => format!("{k}-pentomino"),
        k if k.len() == 2 && k.ends_with('5') => format!("{}-pentomino", &k[..1]),
        k => k.to_string(),
    };
    BUILTINS.iter().map(|b| b.0).find(|n| n.to_ascii_lowercase() == key)
}

/// A named builtin polyomino.
pub fn builtin(name: &str) -> Option<FreePolyomino> {
    let key = builtin_key(name)?;
    let rows = BUILTINS.iter().find(|b| b.0 == key)?.1;
    Some(FreePolyomino::from_ascii(rows).expect("builtin shapes are valid").with_name(key))
}

/// Names of all builtin pieces.
pub fn builtin_names() -> impl Iterator<Item = &'static str> {
    BUILTINS.iter().map(|b| b.0)
}

/// A named preset piece set.
pub fn preset(name: &str) -> Option<PieceSet> {
    let key = match normalize_name(name).as_str() {
        "genius" | "genius-square" => "genius-square",
        "pentominoes" | "pentominoes-all" => "pentominoes-all",
        "i-pieces" | "i-polyominoes" => "i-pieces",
        "tetrominoes-6x7" => "tetrominoes-6x7",
        _ => return None,
    };
    let entries = PRESETS.iter().find(|p| p.0 == key)?.1;
    let pieces = entries.iter().map(|&(n, k)| (builtin(n).expect("preset pieces are builtins"), k)).collect();
    Some(PieceSet::new(pieces).expect("presets are nonempty"))
}

pub fn preset_names() -> impl Iterator<Item = &'static str> {
    PRESETS.iter().map(|p| p.0)
}

/// A multiset of free polyominoes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PieceSet {
    pieces: Vec<(FreePolyomino, u32)>,
}

impl PieceSet {
    /// Merges repeated shapes by adding multiplicities; zero counts are dropped.
    pub fn new(pieces: Vec<(FreePolyomino, u32)>) -> Result<PieceSet, PolyominoError> {
        let mut merged: Vec<(FreePolyomino, u32)> = Vec::new();
        for (p, k) in pieces {
            if k == 0 {
                continue;
            }
            match merged.iter_mut().find(|(q, _)| *q == p) {
                Some((_, total)) => *total += k,
                None => merged.push((p, k)),
            }
        }
        if merged.is_empty() {
            return Err(PolyominoError::EmptySet);
        }
        Ok(PieceSet { pieces: merged })
    }

    pub fn pieces(&self) -> &[(FreePolyomino, u32)] {
        &self.pieces
    }

    pub fn total_area(&self) -> usize {
        self.pieces.iter().map(|(p, k)| p.order() * *k as usize).sum()
    }

    /// Number of piece instances, counting multiplicity.
    pub fn instance_count(&self) -> usize {
        self.pieces.iter().map(|(_, k)| *k as usize).sum()
    }

    /// Piece-type index of each instance, types in order, copies adjacent.
    pub fn instances(&self) -> Vec<usize> {
        self.pieces.iter().enumerate().flat_map(|(t, (_, k))| std::iter::repeat_n(t, *k as usize)).collect()
    }

    /// Order-independent description: `count x shape` entries sorted by shape.
    pub fn fingerprint(&self) -> String {
        let mut entries: Vec<(&FreePolyomino, u32)> = self.pieces.iter().map(|(p, k)| (p, *k)).collect();
        entries.sort();
        entries.iter().map(|(p, k)| format!("{}x{}", k, p.to_ascii().join("/"))).collect::<Vec<_>>().join(";")
    }
}

fn is_grid_line(line: &str) -> bool {
    !line.is_empty() && line.chars().all(|c| c == '#' || c == '.')
}

fn parse_header(line: &str, lineno: usize) -> Result<(String, u32), PolyominoError> {
    let (name, count) = match line.split_once(':') {
        Some((n, c)) => {
            let c = c.trim();
            let count: u32 = c
                .parse()
                .map_err(|_| PolyominoError::Parse { line: lineno, message: format!("bad count {c:?}") })?;
            if count == 0 {
                return Err(PolyominoError::Parse { line: lineno, message: "count must be positive".into() });
            }
            (n.trim(), count)
        }
        None => (line.trim(), 1),
    };
    if name.is_empty() {
        return Err(PolyominoError::Parse { line: lineno, message: "missing piece name".into() });
    }
    Ok((name.to_string(), count))
}

/// Parses the piece-file format: `name` or `name:count` lines naming builtin
/// pieces or presets, or a `label:count` line followed by `#`/`.` rows
/// ending at a blank line. Lines starting with `//` are comments.
pub fn parse_pieces(text: &str) -> Result<PieceSet, PolyominoError> {
    let lines: Vec<(usize, &str)> =
        text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.starts_with("//")).collect();
    let mut pieces = Vec::new();
    let mut i = 0;
    while i < lines.len() {
        let (lineno, line) = lines[i];
        i += 1;
        if line.is_empty() {
            continue;
        }
        if is_grid_line(line) {
            return Err(PolyominoError::Parse { line: lineno, message: "shape rows without a label line".into() });
        }
        let (name, count) = parse_header(line, lineno)?;
        let mut rows = Vec::new();
        while i < lines.len() && is_grid_line(lines[i].1) {
            rows.push(lines[i].1);
            i += 1;
        }
        if !rows.is_empty() {
            let shape = FreePolyomino::from_ascii(&rows).map_err(|e| match e {
                PolyominoError::Parse { message, .. } => PolyominoError::Parse { line: lineno, message },
                other => other,
            })?;
            pieces.push((shape.with_name(name), count));
        } else if let Some(p) = builtin(&name) {
            pieces.push((p, count));
        } else if let Some(set) = preset(&name) {
            for (p, k) in set.pieces {
                pieces.push((p, k * count));
            }
        } else {
            return Err(PolyominoError::UnknownName(name));
        }
    }
    PieceSet::new(pieces)
}

impl FromStr for PieceSet {
    type Err = PolyominoError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_pieces(s)
    }
}

/// Writes the set back in piece-file form with explicit shapes.
impl fmt::Display for PieceSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (p, k)) in self.pieces.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            writeln!(f, "{}:{}", p.name().unwrap_or("piece"), k)?;
            for row in p.to_ascii() {
                writeln!(f, "{row}")?;
            }
        }
        Ok(())
    }
}

/// Every position of every orientation of `p` lying on open cells of `b`,
/// as sorted row-major index lists. Orientations in [`FreePolyomino::images`]
/// order, translations row-major.
pub fn placements(p: &FreePolyomino, b: &Board) -> Vec<Vec<usize>> {
    let (rows, cols) = (b.rows(), b.cols());
    let mut out = Vec::new();
    for img in p.images() {
        let h = img.iter().map(|c| c.0).max().unwrap_or(0) + 1;
        let w = img.iter().map(|c| c.1).max().unwrap_or(0) + 1;
        if h > rows || w > cols {
            continue;
        }
        for dr in 0..=rows - h {
            for dc in 0..=cols - w {
                let cells: Vec<usize> = img.iter().map(|&(r, c)| (r + dr) * cols + c + dc).collect();
                if cells.iter().all(|&i| !b.contains_index(i)) {
                    out.push(cells);
                }
            }
        }
    }
    out
}
