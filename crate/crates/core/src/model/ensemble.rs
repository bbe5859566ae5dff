use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::dep::{self, TeamLabels};
use super::submodel::{SubModel, HIDDEN, LAYERS};
use super::variant::{H0Policy, VariantConfig};
use crate::error::{Error, Result};
use crate::featurizer::MatchSample;
use crate::match_data::{ParticipantId, Team, PLAYERS_PER_MATCH};
use crate::neural::{AdamState, Parameters};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hyperparameters {
    pub lr: f64,
    pub epochs: u32,
    pub hidden: usize,
    pub layers: usize,
}

impl Default for Hyperparameters {
    fn default() -> Self {
        Self {
            lr: 1e-4,
            epochs: 10,
            hidden: HIDDEN,
            layers: LAYERS,
        }
    }
}

/// Ten per-player submodels plus the variant that decides how they are fed and trained.
#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    pub variant: VariantConfig,
    pub hyper: Hyperparameters,
    /// Indexed by participant slot.
    pub subs: Vec<SubModel>,
    /// One optimizer per submodel; never averaged.
    pub adam: Vec<AdamState>,
}

/// Per-action scores of one match.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreReport {
    /// Chronological, indexed by participant slot.
    pub scores: Vec<Vec<f64>>,
    pub totals: [f64; PLAYERS_PER_MATCH],
    pub blue: f64,
    pub red: f64,
}

impl ScoreReport {
    fn from_scores(scores: Vec<Vec<f64>>) -> Self {
        let totals: [f64; PLAYERS_PER_MATCH] = std::array::from_fn(|i| scores[i].iter().sum());
        let team = |t: Team| t.members().map(|p| totals[p.index()]).sum();
        Self {
            blue: team(Team::Blue),
            red: team(Team::Red),
            scores,
            totals,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpochRecord {
    pub epoch: u32,
    pub train_loss: f64,
    pub val_accuracy: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct History {
    pub epochs: Vec<EpochRecord>,
    /// Epoch (1-based) whose parameters were returned; 0 for the initialization.
    pub best_epoch: u32,
}

impl History {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("epoch,train_loss,val_accuracy\n");
        for r in &self.epochs {
            out.push_str(&format!("{},{:?},{:?}\n", r.epoch, r.train_loss, r.val_accuracy));
        }
        out
    }
}

impl Ensemble {
    /// Draws one submodel from `seed` and copies it into all ten slots, so the
    /// ensemble starts in the same state every averaging step produces.
    pub fn new(variant: VariantConfig, hyper: Hyperparameters, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sub = SubModel::init(variant.encoder, &mut rng);
        Self::from_submodel(variant, hyper, sub)
    }

    pub fn zeros(variant: VariantConfig) -> Self {
        Self::from_submodel(variant, Hyperparameters::default(), SubModel::zeros(variant.encoder))
            .expect("default hyperparameters are valid")
    }

    pub fn from_submodel(variant: VariantConfig, hyper: Hyperparameters, sub: SubModel) -> Result<Self> {
        Self::from_submodels(variant, hyper, vec![sub; PLAYERS_PER_MATCH])
    }

    pub fn from_submodels(variant: VariantConfig, hyper: Hyperparameters, subs: Vec<SubModel>) -> Result<Self> {
        if hyper.hidden != HIDDEN || hyper.layers != LAYERS {
            return Err(Error::Model(format!(
                "only hidden={HIDDEN}, layers={LAYERS} is supported (got {}, {})",
                hyper.hidden, hyper.layers
            )));
        }
        if !(hyper.lr.is_finite() && hyper.lr > 0.0) {
            return Err(Error::Model(format!(
                "learning rate must be positive, got {}",
                hyper.lr
            )));
        }
        if subs.len() != PLAYERS_PER_MATCH || subs.iter().any(|s| s.encoder() != variant.encoder) {
            return Err(Error::Model(format!(
                "{variant} needs ten {:?} submodels",
                variant.encoder
            )));
        }
        let adam = subs.iter().map(|s| AdamState::new(s.num_params())).collect();
        Ok(Self {
            variant,
            hyper,
            subs,
            adam,
        })
    }

    fn h0(&self, player: ParticipantId, outcome: Option<Team>) -> Result<Vec<f64>> {
        let fill = match self.variant.h0 {
            H0Policy::Zeros => 0.0,
            H0Policy::OutcomeEncoded => {
                let winner = outcome.ok_or_else(|| {
                    Error::Model(format!(
                        "{} initializes hidden states from the match outcome; a known winner is required",
                        self.variant
                    ))
                })?;
                if player.team() == winner {
                    1.0
                } else {
                    0.0
                }
            }
        };
        Ok(vec![fill; LAYERS * HIDDEN])
    }

    /// Scores every action. `known_outcome` is only read by outcome-encoded variants.
    pub fn score_match(&self, sample: &MatchSample, known_outcome: Option<Team>) -> Result<ScoreReport> {
        let scores = ParticipantId::all()
            .collect::<Vec<_>>()
            .par_iter()
            .map(|&pid| {
                let h0 = self.h0(pid, known_outcome)?;
                self.subs[pid.index()].score(&sample.sequence(pid).actions, self.variant.order, &h0)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ScoreReport::from_scores(scores))
    }

    /// Predicted winner, feeding the true outcome to variants that need it.
    pub fn discern_match(&self, sample: &MatchSample) -> Result<(dep::Discernment, ScoreReport)> {
        let report = self.score_match(sample, Some(sample.winner))?;
        Ok((dep::discern(report.blue, report.red, self.variant.loss), report))
    }

    /// One training step on one match: score, loss, per-submodel backward and
    /// Adam step, then every submodel is overwritten with the parameter mean.
    pub fn train_match(&mut self, sample: &MatchSample) -> Result<f64> {
        let outcome = Some(sample.winner);
        let labels = TeamLabels::new(sample.winner);

        let report = self.score_match(sample, outcome)?;
        let lg = dep::loss(self.variant.loss, report.blue, report.red, labels);

        let order = self.variant.order;
        let lr = self.hyper.lr;
        let inputs: Vec<(ParticipantId, Vec<f64>)> = ParticipantId::all()
            .map(|pid| Ok((pid, self.h0(pid, outcome)?)))
            .collect::<Result<_>>()?;
        let updated: Vec<Vec<f64>> = self
            .subs
            .par_iter()
            .zip(self.adam.par_iter_mut())
            .zip(inputs.par_iter())
            .map(|((sub, adam), (pid, h0))| {
                let d_total = match pid.team() {
                    Team::Blue => lg.d_blue,
                    Team::Red => lg.d_red,
                };
                let (_, grads) = sub.score_and_grad(&sample.sequence(*pid).actions, order, h0, d_total)?;
                let mut params = sub.flatten();
                adam.step(&mut params, &grads.flatten(), lr);
                Ok(params)
            })
            .collect::<Result<_>>()?;

        // mean as offsets from slot 0, so identical updates average exactly
        let k = updated.len() as f64;
        let mut mean = updated[0].clone();
        for (i, m) in mean.iter_mut().enumerate() {
            let base = *m;
            let offset: f64 = updated[1..].iter().map(|p| p[i] - base).sum();
            *m = base + offset / k;
        }
        for sub in &mut self.subs {
            sub.assign_flat(&mean);
        }
        Ok(lg.loss)
    }

    /// Fraction of matches whose winner is discerned correctly.
    pub fn accuracy(&self, samples: &[MatchSample]) -> Result<f64> {
        if samples.is_empty() {
            return Err(Error::Model("accuracy of an empty dataset".into()));
        }
        let correct = samples
            .par_iter()
            .map(|s| Ok((self.discern_match(s)?.0.winner == s.winner) as usize))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .sum::<usize>();
        Ok(correct as f64 / samples.len() as f64)
    }

    /// Largest absolute difference between any submodel and slot 0.
    pub fn max_divergence(&self) -> f64 {
        let first = self.subs[0].flatten();
        self.subs
            .iter()
            .map(|s| {
                s.flatten()
                    .iter()
                    .zip(&first)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max)
    }
}

/// Epoch loop: seeded shuffle, one `train_match` per match, validation after
/// every epoch. Returns the parameters of the epoch with the best validation
/// accuracy (earliest on ties) and the per-epoch history.
pub fn train(
    mut ens: Ensemble,
    train_set: &[MatchSample],
    val_set: &[MatchSample],
    seed: u64,
) -> Result<(Ensemble, History)> {
    if train_set.is_empty() || val_set.is_empty() {
        return Err(Error::Model("training and validation sets must be non-empty".into()));
    }
    let mut history = History::default();
    let mut best: Option<(f64, Ensemble)> = None;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..train_set.len()).collect();
    for epoch in 1..=ens.hyper.epochs {
        order.shuffle(&mut rng);
        let mut total = 0.0;
        for &i in &order {
            total += ens.train_match(&train_set[i])?;
        }
        let val_accuracy = ens.accuracy(val_set)?;
        history.epochs.push(EpochRecord {
            epoch,
            train_loss: total / order.len() as f64,
            val_accuracy,
        });
        if best.as_ref().is_none_or(|(acc, _)| val_accuracy > *acc) {
            history.best_epoch = epoch;
            best = Some((val_accuracy, ens.clone()));
        }
    }
    Ok((best.map(|(_, e)| e).unwrap_or(ens), history))
}
