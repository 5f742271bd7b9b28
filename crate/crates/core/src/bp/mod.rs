//! Permutations, branching programs over order bits, and the two tools
//! built from them: set membership and colour detection on trees.

pub mod color_detect;
pub mod membership;
pub mod perm;
pub mod program;

pub use color_detect::{
    algo1_perm, algo2_perm, color_detect_build, color_detect_eval, dfs_orders, rel_pos, ColorDetector, EdgeColor,
    EdgeColoring, RelPos,
};
pub use membership::{set_membership_build, set_membership_decode};
pub use perm::Permutation;
pub use program::{BranchingProgram, Evaluator, Node, NodeId, OrderBits, ProgramBuilder, Side};
