//! Antler decompositions for Feedback Vertex Set on multigraphs.
//!
//! An antler is a pair `(C, F)` where `F` induces a forest hanging off the
//! rest of the graph by few edges and `C` is an optimal feedback vertex set
//! of `G[C ∪ F]`; some optimal solution of `G` then contains `C`. The crate
//! finds antlers, applies safe reduction operations and assembles full
//! solutions when the graph can be taken apart by small antlers.

pub mod antler_finder;
pub mod error;
pub mod exact;
pub mod format;
pub mod fvc_finder;
pub mod generate;
pub mod graph;
pub mod reducer;
pub mod structures;
pub mod universal;

pub use antler_finder::{
    extract_antler, find_and_apply, reduce_all, solve_by_antler_complexity, Color, Coloring3,
    Reduction, SearchConfig, SearchStats, Solved,
};
pub use error::{Error, Result};
pub use exact::{fvs_bruteforce, fvs_exact, FvsSolution, OracleCaps};
pub use fvc_finder::{find_reducible_fvc, FvcFamily};
pub use graph::{vset, EdgeId, Element, MultiGraph, Vertex, VertexSet};
pub use reducer::{apply_operation, OpKind, ReductionStep, ReductionTrace};
pub use structures::{verify_antler, verify_fvc, Antler, Certificate, Fvc};
pub use universal::UniversalBackend;
