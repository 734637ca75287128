//! Trademark knockout search over a local corpus of registered and pending marks.
//!
//! The pipeline is `normalize -> index candidates -> verify -> score -> rank`.
//! The [`eval`] module measures any engine (a local [`search::EngineProfile`]
//! or a recorded-results replay) against conflict cases whose cited
//! "killer marks" form the ground truth.

pub mod corpus;
pub mod editdist;
pub mod eval;
pub mod index;
pub mod normalize;
pub mod phonetics;
pub mod scoring;
pub mod search;
pub mod synth;

pub use corpus::{ConflictCase, Corpus, KillerRef, ParseMode, Status, TrademarkRecord};
pub use index::{CandidateOptions, Index};
pub use normalize::{normalize, NormalizedMark};
pub use scoring::{RiskBand, RiskScore, Weights};
pub use search::{knockout_search, EngineProfile, SearchError, SearchOptions, SearchResult};
