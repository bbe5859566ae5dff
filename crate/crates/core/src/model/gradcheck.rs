//! Finite-difference verification of the full training gradient: action
//! sequences through the submodel, team sums, and the discernment loss.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::dep::{self, TeamLabels};
use super::submodel::{SubModel, HIDDEN, LAYERS};
use super::variant::{H0Policy, LossPair, VariantConfig};
use crate::error::Result;
use crate::featurizer::ActionVector;
use crate::match_data::{ParticipantId, Team, PLAYERS_PER_MATCH};
use crate::neural::{finite_diff_check, Dd, Parameters, Real};

/// Central-difference step.
pub const GRADCHECK_EPS: f64 = 1e-6;
pub const GRADCHECK_TOLERANCE: f64 = 1e-5;

#[derive(Debug, Clone, PartialEq)]
pub struct CompositeCheck {
    pub variant: u8,
    pub steps: usize,
    pub player: usize,
    pub max_rel_err: f64,
}

/// Builds a random match (ten independent random submodels, random sequences
/// of `steps` actions each), then compares the analytic gradient for one
/// player's parameters against central differences of the loss.
///
/// The numeric side recomputes the loss in double-double arithmetic with the
/// straight-line reference evaluators, relative to its unperturbed value.
/// For the ReLU pair the losing side is chosen so the hinge is active;
/// otherwise every gradient would be trivially zero. `perturb` is added to the
/// first analytic gradient entry (a negative control).
pub fn composite_check(variant: VariantConfig, steps: usize, seed: u64, perturb: f64) -> Result<CompositeCheck> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (subs, seqs, winner) = loop {
        let subs: Vec<SubModel> = (0..PLAYERS_PER_MATCH)
            .map(|_| SubModel::init(variant.encoder, &mut rng))
            .collect();
        let seqs: Vec<Vec<ActionVector>> = (0..PLAYERS_PER_MATCH)
            .map(|_| {
                (0..steps)
                    .map(|_| ActionVector(std::array::from_fn(|_| rng.random_range(0.0..1.0))))
                    .collect()
            })
            .collect();
        let first = if rng.random_bool(0.5) { Team::Blue } else { Team::Red };
        if variant.loss == LossPair::Bce {
            break (subs, seqs, first);
        }
        // keep the first labelling whose hinge is active, i.e. the winner has the smaller sum
        let mut found = None;
        for w in [first, first.opponent()] {
            let (b, r) = team_sums(variant, &subs, &seqs, w)?;
            if (w == Team::Blue && b < r) || (w == Team::Red && r < b) {
                found = Some(w);
                break;
            }
        }
        if let Some(w) = found {
            break (subs, seqs, w);
        }
    };
    let player = rng.random_range(0..PLAYERS_PER_MATCH);
    let pid = ParticipantId::from_index(player);

    let labels = TeamLabels::new(winner);
    let h0s: Vec<Vec<f64>> = (0..PLAYERS_PER_MATCH)
        .map(|i| h0(variant, ParticipantId::from_index(i), Some(winner)))
        .collect();

    // fixed contributions of the other nine players
    let (mut other_blue, mut other_red) = (Dd::zero(), Dd::zero());
    for i in (0..PLAYERS_PER_MATCH).filter(|&i| i != player) {
        let t: Dd = subs[i].reference_total(&seqs[i], variant.order, &h0s[i]);
        match ParticipantId::from_index(i).team() {
            Team::Blue => other_blue = other_blue + t,
            Team::Red => other_red = other_red + t,
        }
    }
    let precise_loss = |sub: &SubModel| -> Dd {
        let own: Dd = sub.reference_total(&seqs[player], variant.order, &h0s[player]);
        let (b, r) = match pid.team() {
            Team::Blue => (other_blue + own, other_red),
            Team::Red => (other_blue, other_red + own),
        };
        dep::loss_value(variant.loss, b, r, labels)
    };
    let f64_sums = |sub: &SubModel| -> Result<(f64, f64)> {
        let mut sums = (0.0, 0.0);
        for i in 0..PLAYERS_PER_MATCH {
            let s = if i == player { sub } else { &subs[i] };
            let total: f64 = s.score(&seqs[i], variant.order, &h0s[i])?.iter().sum();
            match ParticipantId::from_index(i).team() {
                Team::Blue => sums.0 += total,
                Team::Red => sums.1 += total,
            }
        }
        Ok(sums)
    };

    let base_params = subs[player].flatten();
    let base_loss = precise_loss(&subs[player]);
    let mut analytic = {
        let (b, r) = f64_sums(&subs[player])?;
        let lg = dep::loss(variant.loss, b, r, labels);
        let d_total = match pid.team() {
            Team::Blue => lg.d_blue,
            Team::Red => lg.d_red,
        };
        let (_, g) = subs[player].score_and_grad(&seqs[player], variant.order, &h0s[player], d_total)?;
        g.flatten()
    };
    analytic[0] += perturb;

    let eval = |p: &[f64]| {
        let mut sub = subs[player].clone();
        sub.assign_flat(p);
        ((precise_loss(&sub) - base_loss).to_f64(), analytic.clone())
    };
    let max_rel_err = finite_diff_check(eval, &base_params, GRADCHECK_EPS);
    Ok(CompositeCheck {
        variant: variant.id,
        steps,
        player,
        max_rel_err,
    })
}

fn team_sums(
    variant: VariantConfig,
    subs: &[SubModel],
    seqs: &[Vec<ActionVector>],
    winner: Team,
) -> Result<(f64, f64)> {
    let mut sums = (0.0, 0.0);
    for (i, (sub, seq)) in subs.iter().zip(seqs).enumerate() {
        let p = ParticipantId::from_index(i);
        let total: f64 = sub
            .score(seq, variant.order, &h0(variant, p, Some(winner)))?
            .iter()
            .sum();
        match p.team() {
            Team::Blue => sums.0 += total,
            Team::Red => sums.1 += total,
        }
    }
    Ok(sums)
}

fn h0(variant: VariantConfig, player: ParticipantId, winner: Option<Team>) -> Vec<f64> {
    let fill = match (variant.h0, winner) {
        (H0Policy::OutcomeEncoded, Some(w)) if player.team() == w => 1.0,
        _ => 0.0,
    };
    vec![fill; LAYERS * HIDDEN]
}

/// Runs `instances` random checks per variant with sequence lengths drawn from 1..=8.
pub fn gradcheck_all(seed: u64, instances: usize, perturb: f64) -> Result<Vec<CompositeCheck>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for variant in VariantConfig::all() {
        for _ in 0..instances {
            let steps = rng.random_range(1..=8);
            out.push(composite_check(variant, steps, rng.random(), perturb)?);
        }
    }
    Ok(out)
}
