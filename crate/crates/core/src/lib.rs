//! Symmetry-reduced enumeration of blocked rectangular boards and an exact
//! polyomino tiling census over the reduced set.

pub mod combin;
pub mod grid;
pub mod partitions;
pub mod burnside;
pub mod polyomino;
pub mod solver;
pub mod census;

pub use grid::{Board, GridError, Symmetry, SymmetryGroup};
pub use partitions::{BoardPartition, CaseTag, PartitionClass, PartitionError, Region, RegionScheme};
