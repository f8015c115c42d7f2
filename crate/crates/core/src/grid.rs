//! Blocked boards, the symmetry groups acting on them, and a brute-force
//! canonical-form oracle.
//!
//! Cells are addressed `(row, col)` with row 0 at the top and column 0 at the
//! left; the row-major index of a cell is `row * cols + col`.

use std::cmp::Ordering;
use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::combin::binomial_u64;

/// Default enumeration cap for [`brute_force_orbit_classes`].
pub const DEFAULT_BRUTE_FORCE_CAP: u64 = 100_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GridError {
    #[error("board dimensions must be positive, got {rows}x{cols}")]
    ZeroDimension { rows: usize, cols: usize },
    #[error("cell ({row}, {col}) lies outside a {rows}x{cols} board")]
    CellOutOfBounds { row: usize, col: usize, rows: usize, cols: usize },
    #[error("cell ({row}, {col}) listed twice")]
    DuplicateCell { row: usize, col: usize },
    #[error("symmetry {symmetry} needs a square board, got {rows}x{cols}")]
    DimensionMismatch { symmetry: Symmetry, rows: usize, cols: usize },
    #[error("{count} boards exceed the enumeration cap of {cap}")]
    CapExceeded { count: String, cap: u64 },
    #[error("board text: {0}")]
    Parse(String),
}

#[derive(Clone, PartialEq, Eq, Hash)]
enum CellSet {
    /// Used exactly when `rows * cols <= 64`.
    Packed(u64),
    Words(Box<[u64]>),
}

/// An `m x n` grid with a set of blocked cells.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Board {
    rows: usize,
    cols: usize,
    cells: CellSet,
}

impl Board {
    pub fn empty(rows: usize, cols: usize) -> Result<Board, GridError> {
        if rows == 0 || cols == 0 {
            return Err(GridError::ZeroDimension { rows, cols });
        }
        let area = rows * cols;
        let cells = if area <= 64 {
            CellSet::Packed(0)
        } else {
            CellSet::Words(vec![0u64; area.div_ceil(64)].into_boxed_slice())
        };
        Ok(Board { rows, cols, cells })
    }

    pub fn full(rows: usize, cols: usize) -> Result<Board, GridError> {
        let mut b = Board::empty(rows, cols)?;
        for i in 0..rows * cols {
            b.set_index(i);
        }
        Ok(b)
    }

    /// Builds a board from `(row, col)` pairs, rejecting out-of-range and
    /// repeated cells.
    pub fn new<I>(rows: usize, cols: usize, blocked: I) -> Result<Board, GridError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut b = Board::empty(rows, cols)?;
        for (row, col) in blocked {
            if row >= rows || col >= cols {
                return Err(GridError::CellOutOfBounds { row, col, rows, cols });
            }
            let i = row * cols + col;
            if b.contains_index(i) {
                return Err(GridError::DuplicateCell { row, col });
            }
            b.set_index(i);
        }
        Ok(b)
    }

    /// Board from row-major indices. Indices must be in range; duplicates
    /// collapse.
    pub fn from_indices<I>(rows: usize, cols: usize, indices: I) -> Result<Board, GridError>
    where
        I: IntoIterator<Item = usize>,
    {
        let mut b = Board::empty(rows, cols)?;
        for i in indices {
            if i >= rows * cols {
                return Err(GridError::CellOutOfBounds { row: i / cols, col: i % cols, rows, cols });
            }
            b.set_index(i);
        }
        Ok(b)
    }

    /// Board from a packed mask (bit `i` = row-major cell `i`). Requires
    /// `rows * cols <= 64` and no bits beyond the board.
    pub fn from_mask(rows: usize, cols: usize, mask: u64) -> Result<Board, GridError> {
        let mut b = Board::empty(rows, cols)?;
        let area = rows * cols;
        if area > 64 || (area < 64 && mask >> area != 0) {
            return Err(GridError::Parse(format!("mask does not fit a {rows}x{cols} board")));
        }
        b.cells = CellSet::Packed(mask);
        Ok(b)
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn area(&self) -> usize {
        self.rows * self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Number of blocked cells, `r`.
    pub fn blocked_count(&self) -> usize {
        match &self.cells {
            CellSet::Packed(m) => m.count_ones() as usize,
            CellSet::Words(w) => w.iter().map(|x| x.count_ones() as usize).sum(),
        }
    }

    pub fn open_count(&self) -> usize {
        self.area() - self.blocked_count()
    }

    /// The packed mask when the board has at most 64 cells.
    pub fn packed(&self) -> Option<u64> {
        match self.cells {
            CellSet::Packed(m) => Some(m),
            CellSet::Words(_) => None,
        }
    }

    pub fn is_blocked(&self, row: usize, col: usize) -> bool {
        row < self.rows && col < self.cols && self.contains_index(row * self.cols + col)
    }

    #[inline]
    pub fn contains_index(&self, i: usize) -> bool {
        match &self.cells {
            CellSet::Packed(m) => (m >> i) & 1 == 1,
            CellSet::Words(w) => (w[i / 64] >> (i % 64)) & 1 == 1,
        }
    }

    #[inline]
    fn set_index(&mut self, i: usize) {
        match &mut self.cells {
            CellSet::Packed(m) => *m |= 1 << i,
            CellSet::Words(w) => w[i / 64] |= 1 << (i % 64),
        }
    }

    /// Blocked cells as ascending row-major indices.
    pub fn blocked_indices(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.blocked_count());
        let words: &[u64] = match &self.cells {
            CellSet::Packed(m) => std::slice::from_ref(m),
            CellSet::Words(w) => w,
        };
        for (wi, &word) in words.iter().enumerate() {
            let mut x = word;
            while x != 0 {
                out.push(wi * 64 + x.trailing_zeros() as usize);
                x &= x - 1;
            }
        }
        out
    }

    /// Blocked cells as `(row, col)` in row-major order.
    pub fn blocked_cells(&self) -> Vec<(usize, usize)> {
        self.blocked_indices().into_iter().map(|i| (i / self.cols, i % self.cols)).collect()
    }

    /// The board with blocked and open cells exchanged.
    pub fn complement(&self) -> Board {
        let mut b = Board::empty(self.rows, self.cols).expect("dimensions already validated");
        for i in 0..self.area() {
            if !self.contains_index(i) {
                b.set_index(i);
            }
        }
        b
    }

    /// Lexicographic comparison of the sorted blocked-index lists.
    fn lex_cmp_cells(&self, other: &Board) -> Ordering {
        match (&self.cells, &other.cells) {
            (CellSet::Packed(a), CellSet::Packed(b)) => packed_lex_cmp(*a, *b),
            _ => self.blocked_indices().cmp(&other.blocked_indices()),
        }
    }
}

/// Lexicographic order of the ascending index lists of two equal-size
/// packed sets: the set holding the lowest differing index is smaller.
#[inline]
pub fn packed_lex_cmp(a: u64, b: u64) -> Ordering {
    let d = a ^ b;
    if d == 0 {
        Ordering::Equal
    } else if a & d & d.wrapping_neg() != 0 {
        Ordering::Less
    } else {
        Ordering::Greater
    }
}

/// Boards order by dimensions, then blocked count, then the lexicographic
/// order of their ascending blocked-index lists.
impl Ord for Board {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.rows, self.cols, self.blocked_count())
            .cmp(&(other.rows, other.cols, other.blocked_count()))
            .then_with(|| self.lex_cmp_cells(other))
    }
}

impl PartialOrd for Board {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Board {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Board({}x{}, {:?})", self.rows, self.cols, self.blocked_cells())
    }
}

/// Grid form: a `"m n"` header line followed by `m` lines of `#` (blocked)
/// and `.` (open).
impl fmt::Display for Board {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} {}", self.rows, self.cols)?;
        for row in 0..self.rows {
            let line: String = (0..self.cols)
                .map(|col| if self.is_blocked(row, col) { '#' } else { '.' })
                .collect();
            writeln!(f, "{line}")?;
        }
        Ok(())
    }
}

impl FromStr for Board {
    type Err = GridError;

    /// Accepts the grid form or the compact `"m n: r1,c1 r2,c2 ..."` form.
    fn from_str(s: &str) -> Result<Board, GridError> {
        let mut lines = s.lines().map(str::trim).filter(|l| !l.is_empty());
        let header = lines.next().ok_or_else(|| GridError::Parse("empty input".into()))?;
        let (dims, compact) = match header.split_once(':') {
            Some((d, rest)) => (d, Some(rest)),
            None => (header, None),
        };
        let mut it = dims.split_whitespace();
        let rows = parse_usize(it.next(), "row count")?;
        let cols = parse_usize(it.next(), "column count")?;
        if it.next().is_some() {
            return Err(GridError::Parse(format!("unexpected header `{header}`")));
        }
        if let Some(rest) = compact {
            if lines.next().is_some() {
                return Err(GridError::Parse("trailing lines after compact board".into()));
            }
            let mut cells = Vec::new();
            for tok in rest.split_whitespace() {
                let (r, c) = tok
                    .split_once(',')
                    .ok_or_else(|| GridError::Parse(format!("cell `{tok}` is not `row,col`")))?;
                cells.push((parse_usize(Some(r), "row")?, parse_usize(Some(c), "column")?));
            }
            return Board::new(rows, cols, cells);
        }
        let mut cells = Vec::new();
        let mut seen_rows = 0;
        for (row, line) in lines.enumerate() {
            if row >= rows {
                return Err(GridError::Parse(format!("more than {rows} grid rows")));
            }
            if line.chars().count() != cols {
                return Err(GridError::Parse(format!("row {row} has {} cells, expected {cols}", line.chars().count())));
            }
            for (col, ch) in line.chars().enumerate() {
                match ch {
                    '#' => cells.push((row, col)),
                    '.' => {}
                    other => return Err(GridError::Parse(format!("unexpected character `{other}`"))),
                }
            }
            seen_rows += 1;
        }
        if seen_rows != rows {
            return Err(GridError::Parse(format!("expected {rows} grid rows, found {seen_rows}")));
        }
        Board::new(rows, cols, cells)
    }
}

fn parse_usize(tok: Option<&str>, what: &str) -> Result<usize, GridError> {
    let tok = tok.ok_or_else(|| GridError::Parse(format!("missing {what}")))?;
    tok.trim().parse().map_err(|_| GridError::Parse(format!("bad {what} `{tok}`")))
}

/// Parses a sequence of boards separated by blank lines.
pub fn parse_boards(text: &str) -> Result<Vec<Board>, GridError> {
    let mut out = Vec::new();
    let mut chunk = String::new();
    for line in text.lines().chain(std::iter::once("")) {
        if line.trim().is_empty() {
            if !chunk.trim().is_empty() {
                out.push(chunk.parse()?);
            }
            chunk.clear();
        } else {
            chunk.push_str(line);
            chunk.push('\n');
        }
    }
    Ok(out)
}

/// An element of the dihedral group of the square.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Symmetry {
    R0,
    /// Counter-clockwise quarter turn.
    R90,
    R180,
    R270,
    /// Reflection across the horizontal bisector (rows swap).
    H,
    /// Reflection across the vertical bisector (columns swap).
    V,
    /// Reflection across the main diagonal (transpose).
    D,
    /// Reflection across the anti-diagonal.
    Dp,
}

impl Symmetry {
    pub const ALL: [Symmetry; 8] = [
        Symmetry::R0,
        Symmetry::R90,
        Symmetry::R180,
        Symmetry::R270,
        Symmetry::H,
        Symmetry::V,
        Symmetry::D,
        Symmetry::Dp,
    ];

    pub fn requires_square(self) -> bool {
        matches!(self, Symmetry::R90 | Symmetry::R270 | Symmetry::D | Symmetry::Dp)
    }

    pub fn applies_to(self, rows: usize, cols: usize) -> bool {
        rows == cols || !self.requires_square()
    }

    pub fn name(self) -> &'static str {
        match self {
            Symmetry::R0 => "R0",
            Symmetry::R90 => "R90",
            Symmetry::R180 => "R180",
            Symmetry::R270 => "R270",
            Symmetry::H => "H",
            Symmetry::V => "V",
            Symmetry::D => "D",
            Symmetry::Dp => "D'",
        }
    }

    /// Image of `(row, col)` on a `rows x cols` board. The caller guarantees
    /// [`Symmetry::applies_to`].
    #[inline]
    pub fn map_cell(self, rows: usize, cols: usize, row: usize, col: usize) -> (usize, usize) {
        let (m, n) = (rows, cols);
        match self {
            Symmetry::R0 => (row, col),
            Symmetry::H => (m - 1 - row, col),
            Symmetry::V => (row, n - 1 - col),
            Symmetry::R180 => (m - 1 - row, n - 1 - col),
            Symmetry::R90 => (n - 1 - col, row),
            Symmetry::R270 => (col, n - 1 - row),
            Symmetry::D => (col, row),
            Symmetry::Dp => (n - 1 - col, n - 1 - row),
        }
    }

    /// `self ∘ other`: apply `other` first, then `self`.
    pub fn compose(self, other: Symmetry) -> Symmetry {
        // Two cells of a 3x3 board pin down a dihedral element.
        let probe = [(0, 0), (0, 1)];
        let target: Vec<_> = probe
            .iter()
            .map(|&(r, c)| {
                let (r1, c1) = other.map_cell(3, 3, r, c);
                self.map_cell(3, 3, r1, c1)
            })
            .collect();
        Symmetry::ALL
            .into_iter()
            .find(|s| probe.iter().zip(&target).all(|(&(r, c), &t)| s.map_cell(3, 3, r, c) == t))
            .expect("dihedral group is closed")
    }

    pub fn inverse(self) -> Symmetry {
        match self {
            Symmetry::R90 => Symmetry::R270,
            Symmetry::R270 => Symmetry::R90,
            s => s,
        }
    }

    /// The row-major cell permutation of this symmetry on a `rows x cols`
    /// board: `perm[i]` is the image index of cell `i`.
    pub fn cell_permutation(self, rows: usize, cols: usize) -> Result<Vec<usize>, GridError> {
        if !self.applies_to(rows, cols) {
            return Err(GridError::DimensionMismatch { symmetry: self, rows, cols });
        }
        Ok((0..rows * cols)
            .map(|i| {
                let (r, c) = self.map_cell(rows, cols, i / cols, i % cols);
                r * cols + c
            })
            .collect())
    }
}

impl fmt::Display for Symmetry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Symmetry {
    type Err = GridError;

    fn from_str(s: &str) -> Result<Self, GridError> {
        Symmetry::ALL
            .into_iter()
            .find(|g| g.name().eq_ignore_ascii_case(s) || (s.eq_ignore_ascii_case("Dp") && *g == Symmetry::Dp))
            .ok_or_else(|| GridError::Parse(format!("unknown symmetry `{s}`")))
    }
}

/// A group of board symmetries, stored as an ordered element list starting
/// with `R0`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SymmetryGroup {
    elements: Vec<Symmetry>,
}

impl SymmetryGroup {
    /// The full symmetry group of an `m x n` board.
    pub fn of(rows: usize, cols: usize) -> SymmetryGroup {
        use Symmetry::*;
        let elements = if rows == 1 && cols == 1 {
            vec![R0]
        } else if rows == 1 || cols == 1 {
            vec![R0, R180]
        } else if rows == cols {
            Symmetry::ALL.to_vec()
        } else {
            vec![R0, R180, H, V]
        };
        SymmetryGroup { elements }
    }

    /// Subgroup from an element list; order follows [`Symmetry::ALL`].
    pub fn from_elements<I: IntoIterator<Item = Symmetry>>(elements: I) -> SymmetryGroup {
        let mut elements: Vec<Symmetry> = elements.into_iter().collect();
        if !elements.contains(&Symmetry::R0) {
            elements.push(Symmetry::R0);
        }
        elements.sort();
        elements.dedup();
        SymmetryGroup { elements }
    }

    pub fn elements(&self) -> &[Symmetry] {
        &self.elements
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn contains(&self, g: Symmetry) -> bool {
        self.elements.contains(&g)
    }

    /// Closed under composition and inverses.
    pub fn is_closed(&self) -> bool {
        self.elements.iter().all(|g| {
            self.contains(g.inverse()) && self.elements.iter().all(|h| self.contains(g.compose(*h)))
        })
    }

    /// Conventional name, e.g. `D4`, `<H,V>`, `<D'>`, `<e>`.
    pub fn name(&self) -> String {
        use Symmetry::*;
        let has = |g| self.contains(g);
        match self.order() {
            8 => "D4".into(),
            1 => "<e>".into(),
            2 => format!("<{}>", self.elements[1]),
            4 if has(R90) => "<R90>".into(),
            4 if has(H) => "<H,V>".into(),
            4 if has(D) => "<D,D'>".into(),
            _ => format!("{self}"),
        }
    }
}

impl fmt::Display for SymmetryGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<_> = self.elements.iter().map(|g| g.name()).collect();
        write!(f, "{{{}}}", names.join(","))
    }
}

pub fn symmetry_group_of(rows: usize, cols: usize) -> SymmetryGroup {
    SymmetryGroup::of(rows, cols)
}

pub fn apply_symmetry(g: Symmetry, b: &Board) -> Result<Board, GridError> {
    if !g.applies_to(b.rows, b.cols) {
        return Err(GridError::DimensionMismatch { symmetry: g, rows: b.rows, cols: b.cols });
    }
    let mut out = Board::empty(b.rows, b.cols)?;
    for (r, c) in b.blocked_cells() {
        let (r2, c2) = g.map_cell(b.rows, b.cols, r, c);
        out.set_index(r2 * b.cols + c2);
    }
    Ok(out)
}

/// The distinct images of `b` under its board's symmetry group, ascending.
pub fn orbit(b: &Board) -> Vec<Board> {
    let mut out: Vec<Board> = SymmetryGroup::of(b.rows, b.cols)
        .elements()
        .iter()
        .map(|&g| apply_symmetry(g, b).expect("group elements apply"))
        .collect();
    out.sort();
    out.dedup();
    out
}

pub fn stabilizer(b: &Board) -> SymmetryGroup {
    let g = SymmetryGroup::of(b.rows, b.cols);
    SymmetryGroup::from_elements(
        g.elements().iter().copied().filter(|&s| apply_symmetry(s, b).expect("group elements apply") == *b),
    )
}

/// The orbit element with the lexicographically smallest ascending list of
/// blocked row-major indices.
pub fn canonical_form(b: &Board) -> Board {
    if let Some(mask) = b.packed() {
        let perms = PackedPermuter::for_group(b.rows, b.cols);
        let best = perms.canonical(mask);
        return Board::from_mask(b.rows, b.cols, best).expect("image fits the board");
    }
    orbit(b).into_iter().next().expect("orbit contains the board")
}

/// Applies a cell permutation to packed masks through per-byte lookup tables.
#[derive(Clone)]
pub struct PackedPermutation {
    tables: Vec<[u64; 256]>,
}

impl PackedPermutation {
    pub fn new(perm: &[usize]) -> PackedPermutation {
        assert!(perm.len() <= 64);
        let chunks = perm.len().div_ceil(8);
        let mut tables = vec![[0u64; 256]; chunks];
        for (ci, table) in tables.iter_mut().enumerate() {
            for (byte, slot) in table.iter_mut().enumerate() {
                let mut out = 0u64;
                for bit in 0..8 {
                    let i = ci * 8 + bit;
                    if byte >> bit & 1 == 1 && i < perm.len() {
                        out |= 1 << perm[i];
                    }
                }
                *slot = out;
            }
        }
        PackedPermutation { tables }
    }

    #[inline]
    pub fn apply(&self, mask: u64) -> u64 {
        let mut out = 0;
        for (ci, table) in self.tables.iter().enumerate() {
            out |= table[((mask >> (ci * 8)) & 0xff) as usize];
        }
        out
    }
}

/// All group elements of an `m x n` board as packed permutations.
#[derive(Clone)]
pub struct PackedPermuter {
    symmetries: Vec<Symmetry>,
    perms: Vec<PackedPermutation>,
}

impl PackedPermuter {
    pub fn for_group(rows: usize, cols: usize) -> PackedPermuter {
        let group = SymmetryGroup::of(rows, cols);
        let perms = group
            .elements()
            .iter()
            .map(|g| PackedPermutation::new(&g.cell_permutation(rows, cols).expect("group elements apply")))
            .collect();
        PackedPermuter { symmetries: group.elements().to_vec(), perms }
    }

    pub fn symmetries(&self) -> &[Symmetry] {
        &self.symmetries
    }

    pub fn images(&self, mask: u64) -> impl Iterator<Item = u64> + '_ {
        self.perms.iter().map(move |p| p.apply(mask))
    }

    #[inline]
    pub fn canonical(&self, mask: u64) -> u64 {
        let mut best = mask;
        for p in &self.perms[1..] {
            let img = p.apply(mask);
            if packed_lex_cmp(img, best) == Ordering::Less {
                best = img;
            }
        }
        best
    }
}

/// Enumerates all `C(mn, r)` boards and returns one canonical board per
/// orbit, ascending.
pub fn brute_force_orbit_classes(rows: usize, cols: usize, r: usize, cap: u64) -> Result<Vec<Board>, GridError> {
    let area = rows * cols;
    if rows == 0 || cols == 0 {
        return Err(GridError::ZeroDimension { rows, cols });
    }
    if r > area {
        return Ok(Vec::new());
    }
    match binomial_u64(area as u64, r as u64) {
        Some(count) if count <= cap => {}
        other => {
            let count = other.map_or_else(|| crate::combin::binomial(area as u64, r as u64).to_string(), |c| c.to_string());
            return Err(GridError::CapExceeded { count, cap });
        }
    }
    if area <= 64 {
        let permuter = PackedPermuter::for_group(rows, cols);
        let mut seen = HashSet::new();
        for_each_packed_subset(area, r, |mask| {
            seen.insert(permuter.canonical(mask));
        });
        let mut masks: Vec<u64> = seen.into_iter().collect();
        masks.sort_by(|a, b| packed_lex_cmp(*a, *b));
        return masks.into_iter().map(|m| Board::from_mask(rows, cols, m)).collect();
    }
    let mut seen = HashSet::new();
    let mut combo: Vec<usize> = (0..r).collect();
    loop {
        let b = Board::from_indices(rows, cols, combo.iter().copied())?;
        seen.insert(canonical_form(&b));
        if !crate::combin::next_combination(&mut combo, area) {
            break;
        }
    }
    let mut out: Vec<Board> = seen.into_iter().collect();
    out.sort();
    Ok(out)
}

/// Calls `f` with every `r`-subset of the low `n` bits (`n <= 64`), in
/// increasing numeric order.
pub fn for_each_packed_subset(n: usize, r: usize, mut f: impl FnMut(u64)) {
    assert!(n <= 64 && r <= n);
    if r == 0 {
        f(0);
        return;
    }
    let limit: u128 = 1u128 << n;
    let mut x: u64 = if r == 64 { u64::MAX } else { (1u64 << r) - 1 };
    loop {
        f(x);
        // Gosper's hack.
        let c = x & x.wrapping_neg();
        let ripple = x as u128 + c as u128;
        if ripple >= limit {
            break;
        }
        let ripple = ripple as u64;
        x = (((ripple ^ x) >> 2) / c) | ripple;
    }
}
