//! Ten per-player scorers, team-sum discernment, the two loss pairs, the
//! seven experiment variants, per-match training with parameter averaging,
//! and checkpoint persistence.

mod checkpoint;
pub mod dep;
mod ensemble;
pub mod gradcheck;
mod submodel;
mod variant;

pub use checkpoint::{from_bytes, load_checkpoint, save_checkpoint, to_bytes, FORMAT_VERSION, MAGIC};
pub use dep::{bce_loss, confidence, discern, relu_loss, Discernment, LossGrad, TeamLabels};
pub use ensemble::{train, Ensemble, EpochRecord, History, Hyperparameters, ScoreReport};
pub use submodel::{SubModel, HIDDEN, LAYERS, MLP_SIZES};
pub use variant::{Encoder, H0Policy, LossPair, SequenceOrder, VariantConfig};
