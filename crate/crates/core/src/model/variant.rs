use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Encoder {
    /// Two-layer GRU with a single-layer perceptron head per step.
    GruSlp,
    /// Per-action MLP, no recurrence.
    Mlp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SequenceOrder {
    Reversed,
    Chronological,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum H0Policy {
    Zeros,
    /// Winner's initial state all ones, loser's all zeros. Needs the outcome at scoring time.
    OutcomeEncoded,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LossPair {
    /// Hinge on team sums, deterministic discernment.
    Relu,
    /// Cross-entropy on the logistic confidence, confidence discernment.
    Bce,
}

impl LossPair {
    pub fn as_str(self) -> &'static str {
        match self {
            LossPair::Relu => "relu",
            LossPair::Bce => "bce",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct VariantConfig {
    pub id: u8,
    pub encoder: Encoder,
    pub order: SequenceOrder,
    pub h0: H0Policy,
    pub loss: LossPair,
}

impl VariantConfig {
    pub const IDS: std::ops::RangeInclusive<u8> = 1..=7;

    pub fn from_id(id: u8) -> Result<Self> {
        use Encoder::*;
        use H0Policy::*;
        use LossPair::*;
        use SequenceOrder::*;
        let (encoder, order, h0, loss) = match id {
            1 => (GruSlp, Reversed, Zeros, Relu),
            2 => (GruSlp, Reversed, OutcomeEncoded, Relu),
            3 => (GruSlp, Chronological, Zeros, Relu),
            4 => (GruSlp, Reversed, Zeros, Bce),
            5 => (GruSlp, Reversed, OutcomeEncoded, Bce),
            // order and h0 are meaningless for the MLP
            6 => (Mlp, Chronological, Zeros, Relu),
            7 => (Mlp, Chronological, Zeros, Bce),
            _ => return Err(Error::Model(format!("variant must be 1-7, got {id}"))),
        };
        Ok(Self {
            id,
            encoder,
            order,
            h0,
            loss,
        })
    }

    pub fn all() -> impl Iterator<Item = VariantConfig> {
        Self::IDS.map(|id| Self::from_id(id).expect("valid id"))
    }

    pub fn needs_outcome(&self) -> bool {
        self.h0 == H0Policy::OutcomeEncoded
    }
}

impl fmt::Display for VariantConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "variant {}", self.id)
    }
}
