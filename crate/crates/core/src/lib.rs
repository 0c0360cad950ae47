//! Probabilistic inductive process discovery.
//!
//! A log is turned into directly- and indirectly-follows graphs, pairwise
//! relation scores are aggregated into cut scores, and the most likely cut
//! splits the log recursively until base cases remain. The result is a
//! process tree that can be rendered, evaluated against the log, and
//! translated into a block-structured gateway graph.
//!
//! ```
//! use pim_core::{discover, DiscoveryOptions, EventLog};
//!
//! let log = EventLog::from_notation("a,b,c^5; a,c,b^4");
//! let tree = discover(&log, &DiscoveryOptions::default()).unwrap();
//! assert_eq!(tree.to_string(), "->(a, /\\(b, c))");
//! ```

pub mod cut;
pub mod discovery;
pub mod error;
pub mod graphs;
pub mod log;
pub mod quality;
pub mod scores;
pub mod split;
pub mod tree;

pub use cut::{find_cut, rank_cuts, repetition_factor, Cut, LogShape, Operator, SearchOptions};
pub use discovery::{discover, discover_with_trace, DiscoveryOptions, Step};
pub use error::{Error, Result};
pub use graphs::{Edge, FollowsGraphs, Relation};
pub use log::{ActivityId, ActivityTable, EventLog, LogStats, Trace};
pub use quality::{evaluate, QualityOptions, QualityReport};
pub use scores::{ScoreKind, ScoreTable};
pub use split::{base_case, split, BaseCase, SplitResult};
pub use tree::{BlockGraph, BlockNode, ProcessTree};
