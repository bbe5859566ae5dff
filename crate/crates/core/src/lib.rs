//! Per-action contribution scoring for five-versus-five MOBA matches.
//!
//! The pipeline runs match timelines through [`match_data`] (parsing and
//! validation) and [`featurizer`] (30-dimensional action vectors), trains the
//! ten-submodel scorer in [`model`] on top of the small [`neural`] engine, and
//! analyses the result with [`evaluation`]. [`synth`] generates matches with
//! known per-action values for end-to-end checks.

pub mod config;
pub mod error;
pub mod evaluation;
pub mod featurizer;
pub mod match_data;
pub mod model;
pub mod neural;
pub mod synth;

pub use error::{Error, Result};
pub use featurizer::{ActionVector, MatchSample, PlayerSequence, FEATURE_DIM};
pub use match_data::{EventKind, Lane, MatchDocument, ParticipantId, Team};
pub use model::{Ensemble, ScoreReport, VariantConfig};
