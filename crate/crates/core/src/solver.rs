//! Exact-cover tiling search on bitboards.
//!
//! Columns are the open cells plus one column per piece type that must be
//! hit exactly as many times as the type's multiplicity. Each node branches
//! on the column with the fewest live candidates. Branching on a piece-type
//! column picks the lowest-indexed placement that copy will use, which
//! removes the permutations of identical copies. After every placement the
//! open cells are split into connected components and each component's area
//! must be a sum of remaining piece orders.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::grid::Board;
use crate::polyomino::{canonical_free_form, PieceSet};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SolverError {
    #[error("pieces cover {pieces} cells but the board has {open} open cells")]
    AreaMismatch { open: usize, pieces: usize },
    #[error("search exceeded the node cap of {cap}")]
    NodeCapExceeded { cap: u64 },
    #[error("boards with {cells} cells are not supported (limit {limit})")]
    BoardTooLarge { cells: usize, limit: usize },
    #[error("solver prepared for {want_rows}x{want_cols}, got a {rows}x{cols} board")]
    DimensionMismatch { want_rows: usize, want_cols: usize, rows: usize, cols: usize },
}

/// Bit planes of the per-cell candidate counters.
const PLANES: usize = 5;

/// Largest supported board area.
pub const MAX_CELLS: usize = 1024;

/// Fixed-width bit set used for cell masks.
pub trait Bits: Copy + Eq + Send + Sync + fmt::Debug + 'static {
    const CAPACITY: usize;
    fn zero() -> Self;
    fn bit(i: usize) -> Self;
    fn is_zero(&self) -> bool;
    fn and(self, o: Self) -> Self;
    fn or(self, o: Self) -> Self;
    fn andnot(self, o: Self) -> Self;
    fn count(self) -> u32;
    fn lowest(self) -> Option<usize>;
    fn shl(self, k: usize) -> Self;
    fn shr(self, k: usize) -> Self;

    #[inline]
    fn intersects(self, o: Self) -> bool {
        !self.and(o).is_zero()
    }

    /// Calls `f` on each set bit, ascending.
    #[inline]
    fn for_each(self, mut f: impl FnMut(usize)) {
        let mut m = self;
        while let Some(i) = m.lowest() {
            f(i);
            m = m.andnot(Self::bit(i));
        }
    }
}

macro_rules! prim_bits {
    ($t:ty) => {
        impl Bits for $t {
            const CAPACITY: usize = <$t>::BITS as usize;
            #[inline]
            fn zero() -> Self {
                0
            }
            #[inline]
            fn bit(i: usize) -> Self {
                1 << i
            }
            #[inline]
            fn is_zero(&self) -> bool {
                *self == 0
            }
            #[inline]
            fn and(self, o: Self) -> Self {
                self & o
            }
            #[inline]
            fn or(self, o: Self) -> Self {
                self | o
            }
            #[inline]
            fn andnot(self, o: Self) -> Self {
                self & !o
            }
            #[inline]
            fn count(self) -> u32 {
                self.count_ones()
            }
            #[inline]
            fn lowest(self) -> Option<usize> {
                if self == 0 {
                    None
                } else {
                    Some(self.trailing_zeros() as usize)
                }
            }
            #[inline]
            fn shl(self, k: usize) -> Self {
                if k >= Self::CAPACITY {
                    0
                } else {
                    self << k
                }
            }
            #[inline]
            fn shr(self, k: usize) -> Self {
                if k >= Self::CAPACITY {
                    0
                } else {
                    self >> k
                }
            }
            #[inline]
            fn for_each(self, mut f: impl FnMut(usize)) {
                let mut m = self;
                while m != 0 {
                    f(m.trailing_zeros() as usize);
                    m &= m - 1;
                }
            }
        }
    };
}

prim_bits!(u64);
prim_bits!(u128);

/// `64 * W` bits, little-endian words.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Wide<const W: usize>(pub [u64; W]);

impl<const W: usize> Bits for Wide<W> {
    const CAPACITY: usize = 64 * W;

    fn zero() -> Self {
        Wide([0; W])
    }

    fn bit(i: usize) -> Self {
        let mut w = [0; W];
        w[i / 64] = 1 << (i % 64);
        Wide(w)
    }

    fn is_zero(&self) -> bool {
        self.0.iter().all(|&w| w == 0)
    }

    fn and(self, o: Self) -> Self {
        Wide(std::array::from_fn(|i| self.0[i] & o.0[i]))
    }

    fn or(self, o: Self) -> Self {
        Wide(std::array::from_fn(|i| self.0[i] | o.0[i]))
    }

    fn andnot(self, o: Self) -> Self {
        Wide(std::array::from_fn(|i| self.0[i] & !o.0[i]))
    }

    fn count(self) -> u32 {
        self.0.iter().map(|w| w.count_ones()).sum()
    }

    fn lowest(self) -> Option<usize> {
        self.0.iter().enumerate().find(|(_, &w)| w != 0).map(|(i, w)| i * 64 + w.trailing_zeros() as usize)
    }

    fn shl(self, k: usize) -> Self {
        let (words, bits) = (k / 64, k % 64);
        let mut out = [0u64; W];
        for i in (words..W).rev() {
            let src = i - words;
            out[i] = self.0[src] << bits;
            if bits > 0 && src > 0 {
                out[i] |= self.0[src - 1] >> (64 - bits);
            }
        }
        Wide(out)
    }

    fn shr(self, k: usize) -> Self {
        let (words, bits) = (k / 64, k % 64);
        let mut out = [0u64; W];
        for i in 0..W.saturating_sub(words) {
            let src = i + words;
            out[i] = self.0[src] >> bits;
            if bits > 0 && src + 1 < W {
                out[i] |= self.0[src + 1] << (64 - bits);
            }
        }
        Wide(out)
    }

    fn for_each(self, mut f: impl FnMut(usize)) {
        for (i, &w) in self.0.iter().enumerate() {
            let mut m = w;
            while m != 0 {
                f(i * 64 + m.trailing_zeros() as usize);
                m &= m - 1;
            }
        }
    }
}

/// Bit set over small sums, used for the component-area test.
#[derive(Clone, Copy)]
struct SumSet {
    words: [u64; MAX_CELLS / 64 + 1],
    len: usize,
}

impl SumSet {
    fn new(max: usize) -> SumSet {
        let mut words = [0; MAX_CELLS / 64 + 1];
        words[0] = 1;
        SumSet { words, len: max / 64 + 1 }
    }

    fn add_item(&mut self, size: usize) {
        let (ws, bs) = (size / 64, size % 64);
        for i in (ws..self.len).rev() {
            let src = i - ws;
            let mut v = self.words[src] << bs;
            if bs > 0 && src > 0 {
                v |= self.words[src - 1] >> (64 - bs);
            }
            self.words[i] |= v;
        }
    }

    fn contains(&self, x: usize) -> bool {
        x / 64 < self.len && self.words[x / 64] >> (x % 64) & 1 == 1
    }
}

/// One piece instance and the cells it covers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Placement {
    /// Index into [`PieceSet::instances`].
    pub instance: usize,
    /// Row-major cell indices, ascending.
    pub cells: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tiling {
    pub assignments: Vec<Placement>,
}

/// Placement candidates on the empty board, shared by every solve of one
/// board size and piece set.
struct Catalog<M> {
    rows: usize,
    cols: usize,
    masks: Vec<M>,
    types: Vec<u32>,
    orders: Vec<usize>,
    multiplicities: Vec<u32>,
    total_area: usize,
    not_first_col: M,
    not_last_col: M,
}

impl<M: Bits> Catalog<M> {
    fn new(rows: usize, cols: usize, pieces: &PieceSet) -> Catalog<M> {
        let empty = Board::empty(rows, cols).expect("positive dimensions");
        let mut masks = Vec::new();
        let mut types = Vec::new();
        for (t, (p, _)) in pieces.pieces().iter().enumerate() {
            for cells in crate::polyomino::placements(p, &empty) {
                masks.push(cells.iter().fold(M::zero(), |m, &i| m.or(M::bit(i))));
                types.push(t as u32);
            }
        }
        let mut not_first_col = M::zero();
        let mut not_last_col = M::zero();
        for i in 0..rows * cols {
            if i % cols != 0 {
                not_first_col = not_first_col.or(M::bit(i));
            }
            if i % cols != cols - 1 {
                not_last_col = not_last_col.or(M::bit(i));
            }
        }
        Catalog {
            rows,
            cols,
            masks,
            types,
            orders: pieces.pieces().iter().map(|(p, _)| p.order()).collect(),
            multiplicities: pieces.pieces().iter().map(|(_, k)| *k).collect(),
            total_area: pieces.total_area(),
            not_first_col,
            not_last_col,
        }
    }

    /// The connected component of `open` containing `seed`.
    #[inline]
    fn component(&self, open: M, seed: M) -> M {
        let mut comp = seed;
        loop {
            let grow = comp
                .or(comp.shl(1).and(self.not_first_col))
                .or(comp.shr(1).and(self.not_last_col))
                .or(comp.shl(self.cols))
                .or(comp.shr(self.cols))
                .and(open);
            if grow == comp {
                return comp;
            }
            comp = grow;
        }
    }
}

enum Branch {
    Cell,
    Type(u32),
}

#[derive(Clone, Copy)]
struct Entry<M> {
    mask: M,
    id: u32,
    ty: u32,
}

struct Engine<M> {
    catalog: Arc<Catalog<M>>,
    /// Live candidates per search depth, reused between nodes.
    levels: Vec<Vec<Entry<M>>>,
    remaining: Vec<u32>,
    path: Vec<u32>,
    type_counts: Vec<u32>,
    nodes: u64,
    cap: Option<u64>,
}

impl<M: Bits> Engine<M> {
    fn new(catalog: Arc<Catalog<M>>) -> Engine<M> {
        let types = catalog.orders.len();
        Engine {
            catalog,
            levels: Vec::new(),
            remaining: vec![0; types],
            path: Vec::new(),
            type_counts: vec![0; types],
            nodes: 0,
            cap: None,
        }
    }

    fn run(&mut self, blocked: M, cap: Option<u64>) -> Result<Option<Vec<u32>>, SolverError> {
        let cat = Arc::clone(&self.catalog);
        let area = cat.rows * cat.cols;
        let full = (0..area).fold(M::zero(), |m, i| m.or(M::bit(i)));
        let open = full.andnot(blocked);
        let open_count = open.count() as usize;
        if open_count != cat.total_area {
            return Err(SolverError::AreaMismatch { open: open_count, pieces: cat.total_area });
        }
        self.remaining.clone_from(&cat.multiplicities);
        self.path.clear();
        self.nodes = 0;
        self.cap = cap;
        if self.levels.is_empty() {
            self.levels.push(Vec::new());
        }
        let root = &mut self.levels[0];
        root.clear();
        root.extend(
            cat.masks
                .iter()
                .zip(&cat.types)
                .enumerate()
                .filter(|(_, (m, _))| !m.intersects(blocked))
                .map(|(i, (&mask, &ty))| Entry { mask, id: i as u32, ty }),
        );
        if !self.areas_feasible(&cat, open) {
            return Ok(None);
        }
        if self.search(&cat, open, 0)? {
            Ok(Some(self.path.clone()))
        } else {
            Ok(None)
        }
    }

    fn areas_feasible(&self, cat: &Catalog<M>, open: M) -> bool {
        let mut sums = SumSet::new(open.count() as usize);
        for (t, &k) in self.remaining.iter().enumerate() {
            for _ in 0..k {
                sums.add_item(cat.orders[t]);
            }
        }
        let mut rest = open;
        while let Some(i) = rest.lowest() {
            let comp = cat.component(rest, M::bit(i));
            if !sums.contains(comp.count() as usize) {
                return false;
            }
            rest = rest.andnot(comp);
        }
        true
    }

    fn search(&mut self, cat: &Catalog<M>, open: M, depth: usize) -> Result<bool, SolverError> {
        self.nodes += 1;
        if let Some(cap) = self.cap {
            if self.nodes > cap {
                return Err(SolverError::NodeCapExceeded { cap });
            }
        }
        if open.is_zero() {
            return Ok(true);
        }
        if self.levels.len() <= depth + 1 {
            self.levels.push(Vec::new());
        }
        let mut live = std::mem::take(&mut self.levels[depth]);
        let result = self.expand(cat, open, depth, &live);
        std::mem::swap(&mut self.levels[depth], &mut live);
        result
    }

    fn expand(&mut self, cat: &Catalog<M>, open: M, depth: usize, live: &[Entry<M>]) -> Result<bool, SolverError> {
        for c in self.type_counts.iter_mut() {
            *c = 0;
        }
        // Per-cell candidate counts as bit-sliced binary counters; cells
        // reaching 2^PLANES are marked saturated.
        let mut planes = [M::zero(); PLANES];
        let mut saturated = M::zero();
        for e in live {
            self.type_counts[e.ty as usize] += 1;
            let mut carry = e.mask;
            for p in planes.iter_mut() {
                let next = p.and(carry);
                *p = p.or(carry).andnot(next);
                carry = next;
            }
            saturated = saturated.or(carry);
        }
        let mut min_cells = open.andnot(saturated);
        let (cell, mut best) = if min_cells.is_zero() {
            (open.lowest().expect("open is nonempty"), 1 << PLANES)
        } else {
            for p in planes.iter().rev() {
                let without = min_cells.andnot(*p);
                if !without.is_zero() {
                    min_cells = without;
                }
            }
            let i = min_cells.lowest().expect("nonempty");
            let value = planes.iter().enumerate().filter(|(_, p)| p.intersects(M::bit(i))).map(|(k, _)| 1 << k).sum();
            (i, value)
        };
        let mut branch = Branch::Cell;
        let mut dead = false;
        for (t, &k) in self.remaining.iter().enumerate() {
            if k == 0 {
                continue;
            }
            let c = self.type_counts[t];
            if c < k {
                dead = true;
            }
            if c < best {
                best = c;
                branch = Branch::Type(t as u32);
            }
        }
        if dead || best == 0 {
            return Ok(false);
        }
        let cell_mask = M::bit(cell);
        for pick in live {
            let take = match branch {
                Branch::Cell => pick.mask.intersects(cell_mask),
                Branch::Type(t) => pick.ty == t,
            };
            if !take {
                continue;
            }
            let t = pick.ty;
            self.remaining[t as usize] -= 1;
            // Live lists never hold candidates of exhausted types, so only
            // the placed type can become exhausted here.
            let exhausted = self.remaining[t as usize] == 0;
            let same_type_cutoff = match branch {
                Branch::Type(_) => pick.id,
                Branch::Cell => 0,
            };
            let by_type = matches!(branch, Branch::Type(_));
            let child = &mut self.levels[depth + 1];
            child.clear();
            child.extend(live.iter().copied().filter(|e| {
                !e.mask.intersects(pick.mask) && !(e.ty == t && (exhausted || (by_type && e.id <= same_type_cutoff)))
            }));
            let child_open = open.andnot(pick.mask);
            self.path.push(pick.id);
            let found = self.areas_feasible(cat, child_open) && self.search(cat, child_open, depth + 1)?;
            if found {
                return Ok(true);
            }
            self.path.pop();
            self.remaining[t as usize] += 1;
        }
        Ok(false)
    }

    fn tiling(&self, path: &[u32], pieces: &PieceSet) -> Tiling {
        let cat = &self.catalog;
        let mut base = Vec::with_capacity(pieces.pieces().len());
        let mut acc = 0;
        for (_, k) in pieces.pieces() {
            base.push(acc);
            acc += *k as usize;
        }
        let mut chosen: Vec<u32> = path.to_vec();
        chosen.sort_unstable();
        let mut used = vec![0usize; base.len()];
        let mut assignments: Vec<Placement> = chosen
            .iter()
            .map(|&ci| {
                let t = cat.types[ci as usize] as usize;
                let instance = base[t] + used[t];
                used[t] += 1;
                let mut cells = Vec::new();
                cat.masks[ci as usize].for_each(|i| cells.push(i));
                Placement { instance, cells }
            })
            .collect();
        assignments.sort_by_key(|p| p.instance);
        Tiling { assignments }
    }
}

enum Width {
    U64(Engine<u64>),
    U128(Engine<u128>),
    W4(Engine<Wide<4>>),
    W16(Engine<Wide<16>>),
}

fn mask_of<M: Bits>(b: &Board) -> M {
    b.blocked_indices().into_iter().fold(M::zero(), |m, i| m.or(M::bit(i)))
}

/// A reusable solver for one board size and piece set. Cheap to clone the
/// prepared catalog into several workers through [`Solver::fork`].
pub struct Solver {
    rows: usize,
    cols: usize,
    pieces: PieceSet,
    node_cap: Option<u64>,
    engine: Width,
    last_nodes: u64,
}

impl Solver {
    pub fn new(rows: usize, cols: usize, pieces: &PieceSet) -> Result<Solver, SolverError> {
        let cells = rows * cols;
        let engine = if cells == 0 || cells > MAX_CELLS {
            return Err(SolverError::BoardTooLarge { cells, limit: MAX_CELLS });
        } else if cells <= 64 {
            Width::U64(Engine::new(Arc::new(Catalog::new(rows, cols, pieces))))
        } else if cells <= 128 {
            Width::U128(Engine::new(Arc::new(Catalog::new(rows, cols, pieces))))
        } else if cells <= 256 {
            Width::W4(Engine::new(Arc::new(Catalog::new(rows, cols, pieces))))
        } else {
            Width::W16(Engine::new(Arc::new(Catalog::new(rows, cols, pieces))))
        };
        Ok(Solver { rows, cols, pieces: pieces.clone(), node_cap: None, engine, last_nodes: 0 })
    }

    /// Fails any single solve that visits more than `cap` search nodes.
    pub fn with_node_cap(mut self, cap: Option<u64>) -> Solver {
        self.node_cap = cap;
        self
    }

    /// A fresh solver sharing this one's placement catalog.
    pub fn fork(&self) -> Solver {
        let engine = match &self.engine {
            Width::U64(e) => Width::U64(Engine::new(Arc::clone(&e.catalog))),
            Width::U128(e) => Width::U128(Engine::new(Arc::clone(&e.catalog))),
            Width::W4(e) => Width::W4(Engine::new(Arc::clone(&e.catalog))),
            Width::W16(e) => Width::W16(Engine::new(Arc::clone(&e.catalog))),
        };
        Solver { rows: self.rows, cols: self.cols, pieces: self.pieces.clone(), node_cap: self.node_cap, engine, last_nodes: 0 }
    }

    pub fn pieces(&self) -> &PieceSet {
        &self.pieces
    }

    /// Search nodes visited by the most recent solve.
    pub fn last_nodes(&self) -> u64 {
        self.last_nodes
    }

    fn check(&self, b: &Board) -> Result<(), SolverError> {
        if (b.rows(), b.cols()) != (self.rows, self.cols) {
            return Err(SolverError::DimensionMismatch {
                want_rows: self.rows,
                want_cols: self.cols,
                rows: b.rows(),
                cols: b.cols(),
            });
        }
        Ok(())
    }

    pub fn solvable(&mut self, b: &Board) -> Result<bool, SolverError> {
        self.check(b)?;
        let cap = self.node_cap;
        let (found, nodes) = match &mut self.engine {
            Width::U64(e) => {
                let blocked = b.packed().expect("boards of at most 64 cells are packed");
                (e.run(blocked, cap)?.is_some(), e.nodes)
            }
            Width::U128(e) => (e.run(mask_of(b), cap)?.is_some(), e.nodes),
            Width::W4(e) => (e.run(mask_of(b), cap)?.is_some(), e.nodes),
            Width::W16(e) => (e.run(mask_of(b), cap)?.is_some(), e.nodes),
        };
        self.last_nodes = nodes;
        Ok(found)
    }

    pub fn solve(&mut self, b: &Board) -> Result<Option<Tiling>, SolverError> {
        self.check(b)?;
        let cap = self.node_cap;
        let pieces = &self.pieces;
        let (tiling, nodes) = match &mut self.engine {
            Width::U64(e) => {
                let blocked = b.packed().expect("boards of at most 64 cells are packed");
                (e.run(blocked, cap)?.map(|p| e.tiling(&p, pieces)), e.nodes)
            }
            Width::U128(e) => (e.run(mask_of(b), cap)?.map(|p| e.tiling(&p, pieces)), e.nodes),
            Width::W4(e) => (e.run(mask_of(b), cap)?.map(|p| e.tiling(&p, pieces)), e.nodes),
            Width::W16(e) => (e.run(mask_of(b), cap)?.map(|p| e.tiling(&p, pieces)), e.nodes),
        };
        self.last_nodes = nodes;
        Ok(tiling)
    }
}

/// Whether `b` can be tiled exactly by `pieces`.
pub fn solvable(b: &Board, pieces: &PieceSet) -> Result<bool, SolverError> {
    Solver::new(b.rows(), b.cols(), pieces)?.solvable(b)
}

/// The first tiling found by the deterministic search, if any.
pub fn solve_witness(b: &Board, pieces: &PieceSet) -> Result<Option<Tiling>, SolverError> {
    Solver::new(b.rows(), b.cols(), pieces)?.solve(b)
}

/// Checks a tiling against the board and piece set without using the search:
/// in-bounds open cells, pairwise disjoint, covering every open cell, each
/// instance used once with a cell set congruent to its piece.
pub fn validate_tiling(b: &Board, pieces: &PieceSet, t: &Tiling) -> Result<(), String> {
    let instances = pieces.instances();
    let mut used = vec![false; instances.len()];
    let mut covered = vec![false; b.area()];
    for p in &t.assignments {
        let ty = *instances.get(p.instance).ok_or_else(|| format!("instance {} out of range", p.instance))?;
        if std::mem::replace(&mut used[p.instance], true) {
            return Err(format!("instance {} placed twice", p.instance));
        }
        for &i in &p.cells {
            if i >= b.area() {
                return Err(format!("cell {i} outside the board"));
            }
            if b.contains_index(i) {
                return Err(format!("cell {i} is blocked"));
            }
            if std::mem::replace(&mut covered[i], true) {
                return Err(format!("cell {i} covered twice"));
            }
        }
        let shape = canonical_free_form(p.cells.iter().map(|&i| (i / b.cols(), i % b.cols())))
            .map_err(|e| format!("instance {}: {e}", p.instance))?;
        if shape != pieces.pieces()[ty].0 {
            return Err(format!("instance {} has the wrong shape", p.instance));
        }
    }
    if let Some(i) = used.iter().position(|u| !u) {
        return Err(format!("instance {i} unused"));
    }
    if let Some(i) = (0..b.area()).find(|&i| !b.contains_index(i) && !covered[i]) {
        return Err(format!("open cell {i} uncovered"));
    }
    Ok(())
}

fn instance_letter(i: usize) -> char {
    const LETTERS: &[u8] = b"ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789";
    LETTERS[i % LETTERS.len()] as char
}

/// One letter per piece instance, `#` for blocked cells.
pub fn render_tiling(b: &Board, t: &Tiling) -> String {
    let mut grid: Vec<char> = (0..b.area()).map(|i| if b.contains_index(i) { '#' } else { '.' }).collect();
    for p in &t.assignments {
        for &i in &p.cells {
            grid[i] = instance_letter(p.instance);
        }
    }
    let mut out = String::new();
    for row in grid.chunks(b.cols()) {
        out.extend(row);
        out.push('\n');
    }
    out
}
