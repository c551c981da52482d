//! Cross-network user identity linkage workbench.
//!
//! - [`corpus`]: multi-platform datasets, ground truth from bios, ego networks,
//!   and a seeded synthetic generator.
//! - [`ngram`]: the username n-gram inverted index and top-k cosine search.
//! - [`linkage`]: the username baseline and the solution file format.
//! - [`evaluation`]: Prec@1, MRR and method-difference sets.
//! - [`vizprep`]: word clouds, circular ego views and pair-view payloads.
//! - [`workspace`]: a dataset and its solutions persisted in a data directory.

pub mod corpus;
pub mod evaluation;
pub mod linkage;
pub mod ngram;
pub mod vizprep;
pub mod workspace;

pub use corpus::{Dataset, GroundTruthLink, IdentityRef, UserIdentity};
pub use evaluation::{Criterion, DiffReport, EvaluationReport};
pub use linkage::{RankedCandidate, Solution};
pub use ngram::InvertedIndex;
pub use workspace::Workspace;
