//! Region schemes, board partitions and the reduced board set.
//!
//! A board is classified by how many of its blocked cells fall in each region
//! of a dimension-dependent scheme: corner blocks `L1..L4` (top-left,
//! top-right, bottom-right, bottom-left), middle strips `D1..D4` and the
//! center cell `C`. The reduced set keeps every board whose count tuple passes
//! the admissibility predicate for its case. Each admissible class is weighted
//! by the index of the subgroup that maps the class onto itself, so that the
//! weighted class sizes add up to `C(mn, r)`.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use thiserror::Error;

use crate::combin::{binomial, next_combination, unrank_combination, BinomialTable};
use crate::grid::{Board, Symmetry, SymmetryGroup};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PartitionError {
    #[error("board dimensions must be positive, got {rows}x{cols}")]
    ZeroDimension { rows: usize, cols: usize },
    #[error("region {region} holds {size} cells, cannot block {count}")]
    OverCapacity { region: Region, size: usize, count: u32 },
    #[error("region {region} is not part of the {case} scheme")]
    UnusedRegion { region: Region, case: CaseTag },
    #[error("enumeration index {index} out of range (class has {count} boards)")]
    IndexOutOfRange { index: u64, count: u64 },
    #[error("class of {0} boards is too large to index")]
    TooLarge(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CaseTag {
    SquareEven,
    SquareOdd,
    RectEven,
    RectOdd,
    RectMixed,
    SingleRowEven,
    SingleRowOdd,
}

impl CaseTag {
    pub fn for_dims(rows: usize, cols: usize) -> CaseTag {
        if rows == 1 || cols == 1 {
            return if rows.max(cols).is_multiple_of(2) { CaseTag::SingleRowEven } else { CaseTag::SingleRowOdd };
        }
        match (rows.is_multiple_of(2), cols.is_multiple_of(2), rows == cols) {
            (true, true, true) => CaseTag::SquareEven,
            (false, false, true) => CaseTag::SquareOdd,
            (true, true, false) => CaseTag::RectEven,
            (false, false, false) => CaseTag::RectOdd,
            _ => CaseTag::RectMixed,
        }
    }

    /// Region labels carried by this case, in tuple order.
    pub fn regions(self) -> &'static [Region] {
        use Region::*;
        match self {
            CaseTag::SquareEven | CaseTag::RectEven => &[L1, L2, L3, L4],
            CaseTag::SquareOdd | CaseTag::RectOdd => &[L1, L2, L3, L4, D1, D2, D3, D4, C],
            CaseTag::RectMixed => &[L1, L2, L3, L4, D1, D2],
            CaseTag::SingleRowEven => &[L1, L2],
            CaseTag::SingleRowOdd => &[L1, L2, C],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            CaseTag::SquareEven => "square-even",
            CaseTag::SquareOdd => "square-odd",
            CaseTag::RectEven => "rect-even",
            CaseTag::RectOdd => "rect-odd",
            CaseTag::RectMixed => "rect-mixed",
            CaseTag::SingleRowEven => "single-row-even",
            CaseTag::SingleRowOdd => "single-row-odd",
        }
    }
}

impl fmt::Display for CaseTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Region {
    L1,
    L2,
    L3,
    L4,
    D1,
    D2,
    D3,
    D4,
    C,
}

impl Region {
    pub const ALL: [Region; 9] =
        [Region::L1, Region::L2, Region::L3, Region::L4, Region::D1, Region::D2, Region::D3, Region::D4, Region::C];

    #[inline]
    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Count tuple indexed by [`Region::index`]; unused labels stay zero.
pub type Counts = [u32; 9];

/// The division of an `m x n` board into labelled regions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegionScheme {
    case: CaseTag,
    rows: usize,
    cols: usize,
    region_of: Vec<Region>,
    cells: [Vec<usize>; 9],
    group: SymmetryGroup,
    /// `label_maps[e][R]` is the region that group element `e` carries `R` onto.
    label_maps: Vec<[Region; 9]>,
}

impl RegionScheme {
    pub fn new(rows: usize, cols: usize) -> Result<RegionScheme, PartitionError> {
        if rows == 0 || cols == 0 {
            return Err(PartitionError::ZeroDimension { rows, cols });
        }
        let case = CaseTag::for_dims(rows, cols);
        let region_of: Vec<Region> =
            (0..rows * cols).map(|i| region_label(case, rows, cols, i / cols, i % cols)).collect();
        let mut cells: [Vec<usize>; 9] = Default::default();
        for (i, r) in region_of.iter().enumerate() {
            cells[r.index()].push(i);
        }
        let group = SymmetryGroup::of(rows, cols);
        // A region's image is read off from the image of one of its cells.
        let label_maps = group
            .elements()
            .iter()
            .map(|&g| {
                let mut map = Region::ALL;
                for region in Region::ALL {
                    if let Some(&rep) = cells[region.index()].first() {
                        let (r, c) = g.map_cell(rows, cols, rep / cols, rep % cols);
                        map[region.index()] = region_of[r * cols + c];
                    }
                }
                map
            })
            .collect();
        Ok(RegionScheme { case, rows, cols, region_of, cells, group, label_maps })
    }

    pub fn case(&self) -> CaseTag {
        self.case
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn group(&self) -> &SymmetryGroup {
        &self.group
    }

    pub fn regions(&self) -> &'static [Region] {
        self.case.regions()
    }

    pub fn region_of(&self, row: usize, col: usize) -> Region {
        self.region_of[row * self.cols + col]
    }

    /// Row-major indices of the cells in `region`, ascending.
    pub fn cells(&self, region: Region) -> &[usize] {
        &self.cells[region.index()]
    }

    pub fn size(&self, region: Region) -> usize {
        self.cells[region.index()].len()
    }

    pub fn sizes(&self) -> Counts {
        let mut out = [0; 9];
        for r in Region::ALL {
            out[r.index()] = self.size(r) as u32;
        }
        out
    }

    /// The region that `g` carries `region` onto.
    pub fn image(&self, g: Symmetry, region: Region) -> Region {
        let e = self.group.elements().iter().position(|&s| s == g).expect("symmetry belongs to the board's group");
        self.label_maps[e][region.index()]
    }

    /// Whether a raw count tuple passes this scheme's admissibility predicate.
    pub fn admits(&self, counts: &Counts) -> bool {
        admissible_counts(self.case, self.rows % 2 == 1, counts)
    }

    /// Count tuple of `g` applied to any board with tuple `counts`.
    pub fn permute(&self, g: Symmetry, counts: &Counts) -> Counts {
        let mut out = [0; 9];
        for r in Region::ALL {
            out[self.image(g, r).index()] = counts[r.index()];
        }
        out
    }
}

fn region_label(case: CaseTag, rows: usize, cols: usize, i: usize, j: usize) -> Region {
    use Region::*;
    match case {
        CaseTag::SingleRowEven | CaseTag::SingleRowOdd => {
            let (p, len) = if rows == 1 { (j, cols) } else { (i, rows) };
            if p < len / 2 {
                L1
            } else if len % 2 == 1 && p == len / 2 {
                C
            } else {
                L2
            }
        }
        CaseTag::SquareEven | CaseTag::RectEven => match (i < rows / 2, j < cols / 2) {
            (true, true) => L1,
            (true, false) => L2,
            (false, false) => L3,
            (false, true) => L4,
        },
        CaseTag::SquareOdd | CaseTag::RectOdd => {
            let band = |x: usize, len: usize| (x > len / 2) as u8 + (x >= len / 2) as u8;
            match (band(i, rows), band(j, cols)) {
                (0, 0) => L1,
                (0, 1) => D1,
                (0, 2) => L2,
                (1, 2) => D2,
                (2, 2) => L3,
                (2, 1) => D3,
                (2, 0) => L4,
                (1, 0) => D4,
                _ => C,
            }
        }
        CaseTag::RectMixed if rows.is_multiple_of(2) => {
            // Even rows, odd columns: the middle column splits into D1 (top) and D2.
            let top = i < rows / 2;
            let mid = cols / 2;
            match (top, j.cmp(&mid)) {
                (true, std::cmp::Ordering::Less) => L1,
                (true, std::cmp::Ordering::Equal) => D1,
                (true, std::cmp::Ordering::Greater) => L2,
                (false, std::cmp::Ordering::Greater) => L3,
                (false, std::cmp::Ordering::Equal) => D2,
                (false, std::cmp::Ordering::Less) => L4,
            }
        }
        CaseTag::RectMixed => {
            // Odd rows, even columns: the middle row splits into D1 (left) and D2.
            let left = j < cols / 2;
            let mid = rows / 2;
            match (i.cmp(&mid), left) {
                (std::cmp::Ordering::Less, true) => L1,
                (std::cmp::Ordering::Less, false) => L2,
                (std::cmp::Ordering::Greater, false) => L3,
                (std::cmp::Ordering::Greater, true) => L4,
                (std::cmp::Ordering::Equal, true) => D1,
                (std::cmp::Ordering::Equal, false) => D2,
            }
        }
    }
}

pub fn region_scheme(rows: usize, cols: usize) -> Result<Arc<RegionScheme>, PartitionError> {
    RegionScheme::new(rows, cols).map(Arc::new)
}

/// Blocked-cell counts per region of a board.
#[derive(Clone)]
pub struct BoardPartition {
    scheme: Arc<RegionScheme>,
    counts: Counts,
}

impl BoardPartition {
    pub fn new(scheme: Arc<RegionScheme>, counts: Counts) -> Result<BoardPartition, PartitionError> {
        for region in Region::ALL {
            let count = counts[region.index()];
            if count == 0 {
                continue;
            }
            if !scheme.regions().contains(&region) {
                return Err(PartitionError::UnusedRegion { region, case: scheme.case() });
            }
            let size = scheme.size(region);
            if count as usize > size {
                return Err(PartitionError::OverCapacity { region, size, count });
            }
        }
        Ok(BoardPartition { scheme, counts })
    }

    pub fn scheme(&self) -> &Arc<RegionScheme> {
        &self.scheme
    }

    pub fn case(&self) -> CaseTag {
        self.scheme.case()
    }

    pub fn counts(&self) -> &Counts {
        &self.counts
    }

    pub fn count(&self, region: Region) -> u32 {
        self.counts[region.index()]
    }

    /// `(λ1, λ2, λ3, λ4)`; single-row schemes only fill the first two.
    pub fn lambda(&self) -> [u32; 4] {
        [self.counts[0], self.counts[1], self.counts[2], self.counts[3]]
    }

    /// `(δ1, δ2, δ3, δ4)`; unused strips are zero.
    pub fn delta(&self) -> [u32; 4] {
        [self.counts[4], self.counts[5], self.counts[6], self.counts[7]]
    }

    pub fn center(&self) -> u32 {
        self.counts[8]
    }

    /// Total blocked cells, `r`.
    pub fn total(&self) -> u32 {
        self.counts.iter().sum()
    }

    /// The tuple restricted to the scheme's regions.
    pub fn tuple(&self) -> Vec<u32> {
        self.scheme.regions().iter().map(|r| self.counts[r.index()]).collect()
    }
}

impl PartialEq for BoardPartition {
    fn eq(&self, other: &Self) -> bool {
        self.scheme.rows == other.scheme.rows && self.scheme.cols == other.scheme.cols && self.counts == other.counts
    }
}

impl Eq for BoardPartition {}

impl std::hash::Hash for BoardPartition {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        (self.scheme.rows, self.scheme.cols, self.counts).hash(state);
    }
}

impl fmt::Debug for BoardPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BoardPartition({}x{} {} {})", self.scheme.rows, self.scheme.cols, self.case(), self)
    }
}

/// `(3,1,2,1)` for four-region cases, `(λ1,λ2,λ3,λ4|δ1,δ2,δ3,δ4|c)` for the
/// nine-region ones.
impl fmt::Display for BoardPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |xs: &[u32]| xs.iter().map(u32::to_string).collect::<Vec<_>>().join(",");
        let c = &self.counts;
        match self.case() {
            CaseTag::SquareEven | CaseTag::RectEven => write!(f, "({})", join(&c[0..4])),
            CaseTag::SquareOdd | CaseTag::RectOdd => write!(f, "({}|{}|{})", join(&c[0..4]), join(&c[4..8]), c[8]),
            CaseTag::RectMixed => write!(f, "({}|{})", join(&c[0..4]), join(&c[4..6])),
            CaseTag::SingleRowEven => write!(f, "({})", join(&c[0..2])),
            CaseTag::SingleRowOdd => write!(f, "({}|{})", join(&c[0..2]), c[8]),
        }
    }
}

pub fn partition_of(b: &Board) -> BoardPartition {
    let scheme = region_scheme(b.rows(), b.cols()).expect("boards have positive dimensions");
    partition_in(&scheme, b)
}

/// [`partition_of`] against a prebuilt scheme of matching dimensions.
pub fn partition_in(scheme: &Arc<RegionScheme>, b: &Board) -> BoardPartition {
    debug_assert_eq!((scheme.rows, scheme.cols), (b.rows(), b.cols()));
    let mut counts = [0u32; 9];
    for i in b.blocked_indices() {
        counts[scheme.region_of[i].index()] += 1;
    }
    BoardPartition { scheme: Arc::clone(scheme), counts }
}

pub fn is_admissible(p: &BoardPartition) -> bool {
    admissible_counts(p.case(), p.scheme.rows % 2 == 1, &p.counts)
}

/// Admissibility of a raw tuple. `odd_rows` only matters for the mixed case,
/// whose odd-rows orientation is the transpose of the even-rows one; the
/// transpose swaps the roles of `L2` and `L4`.
fn admissible_counts(case: CaseTag, odd_rows: bool, c: &Counts) -> bool {
    let l = [c[0], c[1], c[2], c[3]];
    let d = [c[4], c[5], c[6], c[7]];
    match case {
        CaseTag::SquareEven => square_even(l),
        CaseTag::SquareOdd => square_odd(l, d),
        CaseTag::RectEven => rect_even(l),
        CaseTag::RectOdd => rect_odd(l, d),
        CaseTag::RectMixed if odd_rows => rect_mixed([l[0], l[3], l[2], l[1]], [d[0], d[1]]),
        CaseTag::RectMixed => rect_mixed(l, [d[0], d[1]]),
        CaseTag::SingleRowEven | CaseTag::SingleRowOdd => l[0] >= l[1],
    }
}

fn implies(cond: bool, then: bool) -> bool {
    !cond || then
}

fn l1_dominates(l: [u32; 4]) -> bool {
    l[0] >= l[1] && l[0] >= l[2] && l[0] >= l[3]
}

fn square_even(l: [u32; 4]) -> bool {
    l1_dominates(l) && l[1] >= l[3] && implies(l[0] == l[1], l[2] >= l[3])
}

fn square_odd(l: [u32; 4], d: [u32; 4]) -> bool {
    let d1_max = d[0] >= d[1] && d[0] >= d[2] && d[0] >= d[3];
    square_even(l)
        && implies(
            l[0] == l[2] && l[1] != l[3],
            d[0] >= d[1] && implies(d[0] == d[1], d[2] >= d[3]),
        )
        && implies(
            l[1] == l[3] && l[0] != l[2],
            d[0] >= d[3] && implies(d[0] == d[3], d[1] >= d[2]),
        )
        && implies(l[0] == l[1] && l[1] > l[2] && l[2] == l[3], d[1] >= d[3])
        && implies(
            l[0] == l[2] && l[2] > l[1] && l[1] == l[3],
            d1_max
                && implies(d[0] == d[1], d[2] >= d[3])
                && implies(d[0] == d[2], d[1] >= d[3])
                && implies(d[0] == d[3], d[1] >= d[2]),
        )
        && implies(
            l[0] == l[1] && l[1] == l[2] && l[2] == l[3],
            d1_max && d[1] >= d[3] && implies(d[0] == d[1], d[2] >= d[3]),
        )
}

fn rect_even(l: [u32; 4]) -> bool {
    l1_dominates(l)
        && implies(l[0] == l[1], l[2] >= l[3])
        && implies(l[0] == l[2], l[1] >= l[3])
        && implies(l[0] == l[3], l[1] >= l[2])
}

fn rect_odd(l: [u32; 4], d: [u32; 4]) -> bool {
    l1_dominates(l)
        && implies(
            l[0] == l[2],
            l[1] >= l[3] && implies(l[1] == l[3], d[0] >= d[2] && implies(d[0] == d[2], d[1] >= d[3])),
        )
        && implies(l[0] == l[1], l[2] >= l[3] && implies(l[2] == l[3], d[1] >= d[3]))
        && implies(l[0] == l[3], l[1] >= l[2] && implies(l[1] == l[2], d[0] >= d[2]))
}

fn rect_mixed(l: [u32; 4], d: [u32; 2]) -> bool {
    l1_dominates(l)
        && implies(l[0] == l[1], l[2] >= l[3])
        && implies(l[0] == l[2], l[1] >= l[3] && implies(l[1] == l[3], d[0] >= d[1]))
        && implies(l[0] == l[3], l[1] >= l[2] && implies(l[1] == l[2], d[0] >= d[1]))
}

/// The subgroup mapping the class of `p` onto itself, and its index.
pub fn partition_stabilizer(p: &BoardPartition) -> (SymmetryGroup, u32) {
    let scheme = &p.scheme;
    let group = scheme.group();
    let k = SymmetryGroup::from_elements(
        group.elements().iter().copied().filter(|&g| scheme.permute(g, &p.counts) == p.counts),
    );
    let weight = (group.order() / k.order()) as u32;
    (k, weight)
}

/// An admissible partition with its stabilizer, weight and class size.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionClass {
    pub partition: BoardPartition,
    pub stabilizer: SymmetryGroup,
    pub weight: u32,
    pub board_count: BigUint,
}

impl PartitionClass {
    pub fn board_count_u64(&self) -> Option<u64> {
        self.board_count.to_u64()
    }
}

/// Calls `f` on every count tuple over the scheme with total `r` that fits
/// the region capacities and gives `L1` at least as many blocked cells as
/// every other corner. Every admissible tuple has that property, so this is
/// a superset of the admissible ones. Tuples arrive in ascending
/// lexicographic order.
fn for_each_candidate(scheme: &RegionScheme, r: u32, mut f: impl FnMut(&Counts)) {
    let regions = scheme.regions();
    let sizes = scheme.sizes();
    let caps: Vec<u32> = regions.iter().map(|reg| sizes[reg.index()]).collect();
    // Capacity still available after position i.
    let mut suffix = vec![0u32; regions.len() + 1];
    for i in (0..regions.len()).rev() {
        suffix[i] = suffix[i + 1] + caps[i];
    }
    let mut counts = [0u32; 9];
    fn rec(
        pos: usize,
        left: u32,
        regions: &[Region],
        caps: &[u32],
        suffix: &[u32],
        counts: &mut Counts,
        f: &mut dyn FnMut(&Counts),
    ) {
        if pos == regions.len() {
            if left == 0 {
                f(counts);
            }
            return;
        }
        let mut hi = caps[pos].min(left);
        let is_corner = regions[pos].index() < 4;
        if is_corner && pos > 0 {
            hi = hi.min(counts[0]);
        }
        let lo = left.saturating_sub(suffix[pos + 1]);
        for v in lo..=hi {
            counts[regions[pos].index()] = v;
            rec(pos + 1, left - v, regions, caps, suffix, counts, f);
        }
        counts[regions[pos].index()] = 0;
    }
    if r > suffix[0] {
        return;
    }
    rec(0, r, regions, &caps, &suffix, &mut counts, &mut f);
}

/// Every count tuple over the scheme summing to `r` within capacity,
/// admissible or not, in ascending lexicographic order.
pub fn all_partitions(scheme: &Arc<RegionScheme>, r: u32) -> Vec<BoardPartition> {
    let regions = scheme.regions();
    let sizes = scheme.sizes();
    let mut out = Vec::new();
    let mut counts = [0u32; 9];
    fn rec(
        pos: usize,
        left: u32,
        regions: &[Region],
        sizes: &Counts,
        counts: &mut Counts,
        scheme: &Arc<RegionScheme>,
        out: &mut Vec<BoardPartition>,
    ) {
        if pos == regions.len() {
            if left == 0 {
                out.push(BoardPartition { scheme: Arc::clone(scheme), counts: *counts });
            }
            return;
        }
        let idx = regions[pos].index();
        for v in 0..=sizes[idx].min(left) {
            counts[idx] = v;
            rec(pos + 1, left - v, regions, sizes, counts, scheme, out);
        }
        counts[idx] = 0;
    }
    rec(0, r, regions, &sizes, &mut counts, scheme, &mut out);
    out
}

pub fn admissible_partitions(rows: usize, cols: usize, r: usize) -> Result<Vec<PartitionClass>, PartitionError> {
    let scheme = region_scheme(rows, cols)?;
    Ok(admissible_partitions_in(&scheme, r as u32))
}

pub fn admissible_partitions_in(scheme: &Arc<RegionScheme>, r: u32) -> Vec<PartitionClass> {
    let odd_rows = scheme.rows % 2 == 1;
    let mut out = Vec::new();
    for_each_candidate(scheme, r, |counts| {
        if admissible_counts(scheme.case(), odd_rows, counts) {
            let partition = BoardPartition { scheme: Arc::clone(scheme), counts: *counts };
            let (stabilizer, weight) = partition_stabilizer(&partition);
            let board_count = partition_board_count(&partition);
            out.push(PartitionClass { partition, stabilizer, weight, board_count });
        }
    });
    out
}

/// `|π|`: the product over regions of `C(size, count)`.
pub fn partition_board_count(p: &BoardPartition) -> BigUint {
    let mut acc = BigUint::from(1u32);
    for r in Region::ALL {
        acc *= binomial(p.scheme.size(r) as u64, p.count(r) as u64);
    }
    acc
}

/// `|B̄(m, n; r)|`, summed over admissible classes without enumerating boards.
pub fn reduced_size(rows: usize, cols: usize, r: usize) -> Result<BigUint, PartitionError> {
    let scheme = region_scheme(rows, cols)?;
    let odd_rows = rows % 2 == 1;
    let max_size = Region::ALL.iter().map(|&reg| scheme.size(reg)).max().unwrap_or(0);
    let table: Vec<Vec<BigUint>> =
        (0..=max_size).map(|s| (0..=s).map(|k| binomial(s as u64, k as u64)).collect()).collect();
    let mut total = BigUint::zero();
    for_each_candidate(&scheme, r as u32, |counts| {
        if admissible_counts(scheme.case(), odd_rows, counts) {
            let mut acc = BigUint::from(1u32);
            for reg in scheme.regions() {
                let c = counts[reg.index()] as usize;
                if c > 0 {
                    acc *= &table[scheme.size(*reg)][c];
                }
            }
            total += acc;
        }
    });
    Ok(total)
}

/// `Σ |π_i| · [G : K_i]` over the admissible classes.
pub fn weighted_total(rows: usize, cols: usize, r: usize) -> Result<BigUint, PartitionError> {
    Ok(admissible_partitions(rows, cols, r)?
        .iter()
        .map(|c| &c.board_count * BigUint::from(c.weight))
        .sum())
}

/// Streams the boards of one partition class in a fixed order: regions in
/// label order, the first region varying slowest, each region's cells chosen
/// as lexicographic subsets of its row-major cell list.
pub struct PartitionBoards {
    scheme: Arc<RegionScheme>,
    slots: Vec<(Region, Vec<usize>)>,
    remaining: u64,
}

impl PartitionBoards {
    pub fn new(p: &BoardPartition) -> PartitionBoards {
        let count = partition_board_count(p).to_u64().unwrap_or(u64::MAX);
        Self::build(p, 0, count).expect("index 0 is always valid")
    }

    /// The stream starting at enumeration index `start`.
    pub fn starting_at(p: &BoardPartition, start: u64) -> Result<PartitionBoards, PartitionError> {
        let count = partition_board_count(p);
        let count = count.to_u64().ok_or_else(|| PartitionError::TooLarge(count.to_string()))?;
        if start > count {
            return Err(PartitionError::IndexOutOfRange { index: start, count });
        }
        Self::build(p, start, count)
    }

    fn build(p: &BoardPartition, start: u64, count: u64) -> Result<PartitionBoards, PartitionError> {
        let scheme = Arc::clone(&p.scheme);
        let mut slots = Vec::new();
        for &region in scheme.regions() {
            let k = p.count(region) as usize;
            slots.push((region, (0..k).collect::<Vec<usize>>()));
        }
        if start > 0 && start < count {
            let max_size = scheme.regions().iter().map(|&r| scheme.size(r)).max().unwrap_or(0);
            let table = BinomialTable::new(max_size);
            // Mixed-radix digits, last region least significant.
            let mut rest = start;
            for (region, combo) in slots.iter_mut().rev() {
                let size = scheme.size(*region);
                let radix = table.get(size, combo.len());
                let digit = rest % radix;
                rest /= radix;
                let k = combo.len();
                unrank_combination(&table, size, k, digit, combo);
            }
        }
        Ok(PartitionBoards { scheme, slots, remaining: count - start })
    }

    fn current(&self) -> Board {
        let scheme = &self.scheme;
        let indices = self
            .slots
            .iter()
            .flat_map(|(region, combo)| combo.iter().map(move |&c| scheme.cells(*region)[c]));
        Board::from_indices(scheme.rows, scheme.cols, indices).expect("region cells lie on the board")
    }
}

impl Iterator for PartitionBoards {
    type Item = Board;

    fn next(&mut self) -> Option<Board> {
        if self.remaining == 0 {
            return None;
        }
        let board = self.current();
        self.remaining -= 1;
        for (region, combo) in self.slots.iter_mut().rev() {
            if next_combination(combo, self.scheme.size(*region)) {
                break;
            }
        }
        Some(board)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = usize::try_from(self.remaining).unwrap_or(usize::MAX);
        (n, Some(n))
    }
}

pub fn boards_with_partition(p: &BoardPartition) -> PartitionBoards {
    PartitionBoards::new(p)
}

/// The board at enumeration index `index` of its class.
pub fn board_at(p: &BoardPartition, index: u64) -> Result<Board, PartitionError> {
    let mut it = PartitionBoards::starting_at(p, index)?;
    let count = partition_board_count(p).to_u64().unwrap_or(u64::MAX);
    it.next().ok_or(PartitionError::IndexOutOfRange { index, count })
}

/// Every board of every admissible class, classes in tuple order.
pub fn reduced_set(rows: usize, cols: usize, r: usize) -> Result<impl Iterator<Item = Board>, PartitionError> {
    let classes = admissible_partitions(rows, cols, r)?;
    Ok(classes.into_iter().flat_map(|c| boards_with_partition(&c.partition)))
}
