use rand::Rng;

use super::variant::{Encoder, SequenceOrder};
use crate::error::Result;
use crate::featurizer::{ActionVector, FEATURE_DIM};
use crate::neural::{precise, GruStack, Matrix, Mlp, Parameters, Real, Slp};

pub const HIDDEN: usize = 15;
pub const LAYERS: usize = 2;
pub const MLP_SIZES: [usize; 4] = [FEATURE_DIM, HIDDEN, HIDDEN, 1];

/// Parameters of one player's scorer.
#[derive(Debug, Clone, PartialEq)]
pub enum SubModel {
    Gru { gru: GruStack, slp: Slp },
    Mlp(Mlp),
}

impl SubModel {
    pub fn zeros(encoder: Encoder) -> Self {
        match encoder {
            Encoder::GruSlp => SubModel::Gru {
                gru: GruStack::zeros(FEATURE_DIM, HIDDEN, LAYERS),
                slp: Slp::zeros(HIDDEN),
            },
            Encoder::Mlp => SubModel::Mlp(Mlp::zeros(&MLP_SIZES)),
        }
    }

    pub fn init(encoder: Encoder, rng: &mut impl Rng) -> Self {
        match encoder {
            Encoder::GruSlp => SubModel::Gru {
                gru: GruStack::init(FEATURE_DIM, HIDDEN, LAYERS, rng),
                slp: Slp::init(HIDDEN, rng),
            },
            Encoder::Mlp => SubModel::Mlp(Mlp::init(&MLP_SIZES, rng)),
        }
    }

    pub fn encoder(&self) -> Encoder {
        match self {
            SubModel::Gru { .. } => Encoder::GruSlp,
            SubModel::Mlp(_) => Encoder::Mlp,
        }
    }

    /// Per-action scores in chronological order. `h0` is ignored by the MLP.
    pub fn score(&self, actions: &[ActionVector], order: SequenceOrder, h0: &[f64]) -> Result<Vec<f64>> {
        if actions.is_empty() {
            return Ok(Vec::new());
        }
        match self {
            SubModel::Mlp(mlp) => Ok(actions.iter().map(|a| mlp.score(a.as_slice())).collect()),
            SubModel::Gru { gru, slp } => {
                let seq = ordered(actions, order);
                let trace = gru.forward(&seq, h0)?;
                let mut scores: Vec<f64> = (0..seq.len()).map(|t| slp.score(trace.top(t))).collect();
                if order == SequenceOrder::Reversed {
                    scores.reverse();
                }
                Ok(scores)
            }
        }
    }

    /// Scores plus the gradient of `d_total * sum(scores)` with respect to every parameter.
    pub fn score_and_grad(
        &self,
        actions: &[ActionVector],
        order: SequenceOrder,
        h0: &[f64],
        d_total: f64,
    ) -> Result<(Vec<f64>, SubModel)> {
        let mut grads = SubModel::zeros(self.encoder());
        if actions.is_empty() {
            return Ok((Vec::new(), grads));
        }
        match (self, &mut grads) {
            (SubModel::Mlp(mlp), SubModel::Mlp(g)) => {
                let mut scores = Vec::with_capacity(actions.len());
                for a in actions {
                    let trace = mlp.forward(a.as_slice());
                    mlp.backward_acc(&trace, d_total, g);
                    scores.push(trace.output());
                }
                Ok((scores, grads))
            }
            (SubModel::Gru { gru, slp }, SubModel::Gru { gru: g_gru, slp: g_slp }) => {
                let seq = ordered(actions, order);
                let trace = gru.forward(&seq, h0)?;
                let mut scores = Vec::with_capacity(seq.len());
                let mut d_top = vec![0.0; seq.len() * HIDDEN];
                for t in 0..seq.len() {
                    let h = trace.top(t);
                    let s = slp.score(h);
                    slp.backward_acc(h, s, d_total, g_slp, &mut d_top[t * HIDDEN..(t + 1) * HIDDEN]);
                    scores.push(s);
                }
                let (gg, _) = gru.backward(&trace, &d_top);
                *g_gru = gg;
                if order == SequenceOrder::Reversed {
                    scores.reverse();
                }
                Ok((scores, grads))
            }
            _ => unreachable!("gradient container matches the encoder"),
        }
    }

    /// Sum of the player's scores, evaluated by the straight-line reference code over `R`.
    pub fn reference_total<R: Real>(&self, actions: &[ActionVector], order: SequenceOrder, h0: &[f64]) -> R {
        if actions.is_empty() {
            return R::zero();
        }
        match self {
            SubModel::Mlp(mlp) => actions
                .iter()
                .fold(R::zero(), |acc, a| acc + precise::mlp_score::<R>(mlp, a.as_slice())),
            SubModel::Gru { gru, slp } => {
                let seq = ordered(actions, order);
                precise::gru_top_states::<R, _>(gru, &seq, h0)
                    .iter()
                    .fold(R::zero(), |acc, h| acc + precise::slp_score(slp, h))
            }
        }
    }
}

fn ordered(actions: &[ActionVector], order: SequenceOrder) -> Vec<&[f64]> {
    let mut seq: Vec<&[f64]> = actions.iter().map(|a| a.as_slice()).collect();
    if order == SequenceOrder::Reversed {
        seq.reverse();
    }
    seq
}

impl Parameters for SubModel {
    fn visit(&self, f: &mut dyn FnMut(&str, &Matrix)) {
        match self {
            SubModel::Gru { gru, slp } => {
                gru.visit(f);
                slp.visit(f);
            }
            SubModel::Mlp(mlp) => mlp.visit(f),
        }
    }

    fn visit_mut(&mut self, f: &mut dyn FnMut(&str, &mut Matrix)) {
        match self {
            SubModel::Gru { gru, slp } => {
                gru.visit_mut(f);
                slp.visit_mut(f);
            }
            SubModel::Mlp(mlp) => mlp.visit_mut(f),
        }
    }
}
