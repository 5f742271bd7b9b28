//! Boolean realizers for posets whose cover graphs have bounded tree-width.
//!
//! A boolean realizer is a list of permutations of the ground set together
//! with a formula that decides `x <= y` from the order bits alone, i.e. from
//! whether `x` comes before `y` in each permutation. This crate builds such a
//! realizer from a tree-decomposition of the cover graph, with the number of
//! permutations bounded by a function of the width only, and derives a
//! reachability labeling scheme for digraphs from it.
//!
//! Elements, vertices and tree nodes are 0-based inside the library. All text
//! formats and the command line use 1-based ids.

pub mod bp;
pub mod error;
pub mod families;
pub mod generators;
pub mod graph;
pub mod oracle;
pub mod poset;
pub mod reach;
pub mod realizer;
pub mod sigdag;
pub mod tree;
pub mod treedec;

pub use error::{Error, Result};
pub use graph::Graph;
pub use poset::Poset;
pub use realizer::Realizer;
pub use tree::RootedTree;
pub use treedec::{NormalizedDecomposition, TreeDecomposition};
