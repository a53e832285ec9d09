//! Exact decision engine for k-colourability and restricted k-list
//! colouring of P5-free graphs.
//!
//! The solver follows a recursive branch-and-reduce scheme: find a small
//! dominating clique or P3, enumerate its colourings, partition the rest
//! of the graph into fixed sets, remove every dependency between fixed
//! sets (two interchangeable methods), and recurse into the fixed sets
//! with strictly fewer colours. A SAT answer carries a witness colouring
//! that is re-verified before being returned; structural assumptions
//! about P5-freeness are checked at runtime and produce induced-P5
//! certificates when they fail.
//!
//! The companion [`testkit`] module ships an independent brute-force
//! oracle and P5-free graph generators for property testing and
//! benchmarks.

pub mod colour;
pub mod error;
pub mod graph;
pub mod instance;
pub mod method_one;
pub mod method_two;
pub mod p5;
pub mod solver;
pub mod testkit;

pub use colour::{Colour, ColourSet};
pub use error::{Origin, SolveError};
pub use graph::{read_dimacs, write_dimacs, DimacsError, Graph, Vertex, VertexSet};
pub use instance::{Colouring, FixedSetPartition, Instance};
pub use p5::{find_induced_p5, is_p5_free, P5Certificate};
pub use solver::{
    k_colourable, solve_list_colouring, verify_colouring, Decision, Method, Outcome, SolveConfig,
    SolveCtx, SolveMetrics, TraceEvent, Validate,
};
