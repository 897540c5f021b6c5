//! Combinatorial dimensions of hypothesis classes under a game.

pub mod edge;
pub mod littlestone;
pub mod shatter;
pub mod sl;

pub use edge::{validate_edge_weight_equivalence, EdgeWeightReport};
pub use littlestone::{littlestone_dim, littlestone_tree, LdimSolver, LdimTree};
pub use shatter::{DEFAULT_MAX_SUBSET, sg_dim, shatter_dim, sn_dim, verify_witness, ShatterKind, ShatterResult, ShatterWitness};
pub use sl::{replay_sl_tree, sl_dim, SlNode, SlSolver, SlValue};
