//! The decomposition game: strategies answer challenges `r` with
//! `r`-decompositions until the family is bounded; the transcript is a
//! certificate that can be checked independently.

mod asdim;
mod certificate;
mod game;
pub mod io;
mod strategy;
mod tree;

pub use asdim::{asdim_decomposition, check_asdim, AsdimOutcome, Infeasibility, EXACT_PIECE_LIMIT};
pub use certificate::{
    part_conflicts, step_violations, verify_certificate, DecompositionCertificate, MemberStep, Step, Violation,
    VerifyReport, MAX_VIOLATIONS,
};
pub use game::{play_game, random_schedule};
pub use strategy::{
    strategy_interval_slabs, strategy_unipotent_cosets, unipotent_coset_level, CosetSelector, FiberMap, Height,
    Strategy,
};
pub use tree::{tree_rank, verify_tree, StrategyTree, TreeEdge, TreeNode, TreeReport};
