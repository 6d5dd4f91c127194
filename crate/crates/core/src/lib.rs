//! Diverse subset selection under group-fairness cardinality constraints.
//!
//! The library selects subsets of a labeled dataset that maximize the
//! minimum pairwise distance (max-min diversity) while meeting per-group
//! cardinality requirements, for disjoint as well as overlapping groups,
//! and solves the related fair k-center clustering problem. Exact
//! brute-force reference solvers certify the approximation quality of every
//! heuristic on small instances.

pub mod clustering;
mod combo;
pub mod dataset;
pub mod disjoint;
mod error;
pub mod flow;
pub mod gmm;
pub mod oracle;
pub mod overlap;
mod search;
pub mod synthetic;

pub use dataset::{
    Dataset, DatasetBuilder, ElementId, FairnessSpec, GroupId, GroupMode, MetricKind,
    MetricReport, MetricViolation, Selection, DEFAULT_METRIC_TOLERANCE,
};
pub use error::{Error, Result};
pub use search::SearchStrategy;
