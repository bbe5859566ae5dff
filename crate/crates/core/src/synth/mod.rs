//! Synthetic matches with a known per-action value.
//!
//! Each match is generated as a raw timeline document and pushed through the
//! normal featurizer. Every resulting action vector `x` carries a latent value
//! `v = w* . x`; the winner is the team with the larger latent sum plus a
//! little Gaussian noise, flipped with probability `p`.

mod generator;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use rayon::prelude::*;

pub use generator::generate_match;

use crate::error::{Error, Result};
use crate::evaluation::{discernment_from_reports, score_dataset, spearman};
use crate::featurizer::{slot, MatchSample, FEATURE_DIM};
use crate::match_data::{ChampionRoleTable, EventKind, MatchDocument, PLAYERS_PER_MATCH};
use crate::model::Ensemble;

#[derive(Debug, Clone, PartialEq)]
pub struct GenConfig {
    pub seed: u64,
    pub n_matches: usize,
    /// Inclusive range of timeline events each player initiates.
    pub events_per_player: (usize, usize),
    pub label_flip_probability: f64,
    pub latent_weights: [f64; FEATURE_DIM],
    /// Standard deviation of per-player skill.
    pub skill_spread: f64,
    /// Standard deviation of the noise added to each team's latent sum.
    pub quality_noise: f64,
}

impl Default for GenConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            n_matches: 2000,
            events_per_player: (40, 120),
            label_flip_probability: 0.05,
            latent_weights: default_latent_weights(),
            skill_spread: 1.0,
            quality_noise: 0.5,
        }
    }
}

impl GenConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_matches < 1 {
            return Err(Error::Config("n_matches must be ≥ 1".into()));
        }
        let (lo, hi) = self.events_per_player;
        if lo < 1 || lo > hi {
            return Err(Error::Config(format!(
                "events_per_player must satisfy 1 <= min <= max, got [{lo}, {hi}]"
            )));
        }
        let p = self.label_flip_probability;
        if !(0.0..0.5).contains(&p) {
            return Err(Error::Config(format!(
                "label_flip_probability must be in [0, 0.5), got {p}"
            )));
        }
        for (name, v) in [
            ("skill_spread", self.skill_spread),
            ("quality_noise", self.quality_noise),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::Config(format!("{name} must be a finite number >= 0, got {v}")));
            }
        }
        if self.latent_weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::Config("latent_weights must be finite".into()));
        }
        Ok(())
    }

    pub fn bayes_ceiling(&self) -> f64 {
        1.0 - self.label_flip_probability
    }
}

/// Kills, objectives and vision are worth the most, deaths and sales cost;
/// isolation is mildly penalized and late actions count slightly more.
pub fn default_latent_weights() -> [f64; FEATURE_DIM] {
    let mut w = [0.0; FEATURE_DIM];
    w[slot::TIMESTAMP] = 0.1;
    w[slot::X] = 0.05;
    w[slot::Y] = -0.05;
    w[slot::DISTANCE] = -0.1;
    let kind = [
        (EventKind::ItemPurchased, 0.05),
        (EventKind::ItemSold, -0.1),
        (EventKind::ItemDestroyed, 0.0),
        (EventKind::SkillLevelUp, 0.02),
        (EventKind::LevelUp, 0.05),
        (EventKind::WardPlaced, 0.15),
        (EventKind::WardKill, 0.2),
        (EventKind::ChampionKill, 0.6),
        (EventKind::ChampionKillAssist, 0.3),
        (EventKind::ChampionKillVictim, -0.6),
        (EventKind::BuildingKill, 0.5),
        (EventKind::BuildingKillAssist, 0.3),
        (EventKind::EliteMonsterKill, 0.5),
        (EventKind::EliteMonsterKillAssist, 0.3),
    ];
    for (k, v) in kind {
        w[slot::KINDS + k.index()] = v;
    }
    w[slot::WEIGHT] = 0.3;
    w
}

pub fn latent_value(weights: &[f64; FEATURE_DIM], x: &[f64]) -> f64 {
    weights.iter().zip(x).map(|(w, x)| w * x).sum()
}

/// Seed of match `index`: splitmix64 of the run seed xor splitmix64 of the index.
pub fn match_seed(seed: u64, index: usize) -> u64 {
    fn splitmix64(mut z: u64) -> u64 {
        z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }
    splitmix64(seed ^ splitmix64(index as u64))
}

/// One generated match: the raw document, its featurized sample, and the
/// latent value of every action (`latent[player][action]`, chronological).
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledMatch {
    pub document: MatchDocument,
    pub sample: MatchSample,
    pub latent: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    pub config: GenConfig,
    pub matches: Vec<LabeledMatch>,
}

impl LabeledDataset {
    pub fn samples(&self) -> Vec<MatchSample> {
        self.matches.iter().map(|m| m.sample.clone()).collect()
    }

    pub fn action_count(&self) -> usize {
        self.matches.iter().map(|m| m.sample.action_count()).sum()
    }

    /// CSV keyed by `(match_id, participant, action_index)`.
    pub fn write_latent_sidecar(&self, path: &Path) -> Result<()> {
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = BufWriter::new(file);
        let io = |e| Error::io(path, e);
        writeln!(w, "match_id,participant,action_index,latent").map_err(io)?;
        for m in &self.matches {
            for (p, values) in m.latent.iter().enumerate() {
                for (i, v) in values.iter().enumerate() {
                    writeln!(w, "{},{},{},{:?}", m.sample.match_id, p + 1, i, v).map_err(io)?;
                }
            }
        }
        w.flush().map_err(io)
    }
}

/// Generates `n_matches` matches in parallel; the output depends only on the config.
pub fn generate(config: &GenConfig) -> Result<LabeledDataset> {
    config.validate()?;
    let table = ChampionRoleTable::builtin();
    let matches = (0..config.n_matches)
        .into_par_iter()
        .map(|i| generate_match(config, i, &table))
        .collect::<Result<Vec<_>>>()?;
    Ok(LabeledDataset {
        config: config.clone(),
        matches,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleReport {
    /// Pooled over every action of every match.
    pub spearman: f64,
    pub accuracy: f64,
    pub bayes_ceiling: f64,
    pub n_actions: usize,
}

/// Compares learned action scores with the latent values and reports
/// discernment accuracy next to the `1 - p` ceiling.
pub fn oracle_scores(dataset: &LabeledDataset, ens: &Ensemble) -> Result<OracleReport> {
    oracle_scores_on(&dataset.matches, dataset.config.bayes_ceiling(), ens)
}

/// As [`oracle_scores`] over a subset of the matches (e.g. a held-out split).
pub fn oracle_scores_on(matches: &[LabeledMatch], bayes_ceiling: f64, ens: &Ensemble) -> Result<OracleReport> {
    if matches.is_empty() {
        return Err(Error::Evaluation("oracle scoring over an empty dataset".into()));
    }
    let samples: Vec<MatchSample> = matches.iter().map(|m| m.sample.clone()).collect();
    let reports = score_dataset(ens, &samples)?;
    let mut scores = Vec::new();
    let mut latent = Vec::new();
    for (m, r) in matches.iter().zip(&reports) {
        for p in 0..PLAYERS_PER_MATCH {
            scores.extend_from_slice(&r.scores[p]);
            latent.extend_from_slice(&m.latent[p]);
        }
    }
    let accuracy = discernment_from_reports(ens.variant.loss, &samples, &reports)?.accuracy;
    Ok(OracleReport {
        spearman: spearman(&scores, &latent),
        accuracy,
        bayes_ceiling,
        n_actions: scores.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::match_data::{parse_match, Team};
    use crate::model::{Hyperparameters, VariantConfig};

    fn small(n: usize, seed: u64) -> GenConfig {
        GenConfig {
            seed,
            n_matches: n,
            events_per_player: (5, 15),
            ..GenConfig::default()
        }
    }

    #[test]
    fn config_validation() {
        assert!(GenConfig::default().validate().is_ok());
        let err = GenConfig {
            n_matches: 0,
            ..GenConfig::default()
        }
        .validate()
        .unwrap_err();
        assert!(err.to_string().contains("n_matches must be ≥ 1"), "{err}");
        assert!(GenConfig {
            label_flip_probability: 0.5,
            ..GenConfig::default()
        }
        .validate()
        .is_err());
        assert!(GenConfig {
            events_per_player: (0, 3),
            ..GenConfig::default()
        }
        .validate()
        .is_err());
        assert!(GenConfig {
            events_per_player: (9, 3),
            ..GenConfig::default()
        }
        .validate()
        .is_err());
    }

    #[test]
    fn fixed_seed_reproduces_bytes() {
        let a = generate(&small(6, 11)).unwrap();
        let b = generate(&small(6, 11)).unwrap();
        for (x, y) in a.matches.iter().zip(&b.matches) {
            assert_eq!(x.document.to_json(), y.document.to_json());
            assert_eq!(x.sample.to_record_line(), y.sample.to_record_line());
        }
        let c = generate(&small(6, 12)).unwrap();
        assert_ne!(a.matches[0].document.to_json(), c.matches[0].document.to_json());
    }

    #[test]
    fn documents_round_trip_through_the_parser() {
        let data = generate(&small(4, 3)).unwrap();
        let table = ChampionRoleTable::builtin();
        for m in &data.matches {
            let doc = parse_match(m.document.to_json().as_bytes()).unwrap();
            let sample = crate::featurizer::build_match_sample(&doc, &table, &Default::default()).unwrap();
            assert_eq!(sample, m.sample);
            for seq in &sample.sequences {
                assert!(seq.actions.iter().all(|a| a.check().is_ok()));
            }
        }
    }

    #[test]
    fn noise_free_winner_is_latent_argmax() {
        let mut cfg = small(40, 5);
        cfg.label_flip_probability = 0.0;
        cfg.quality_noise = 0.0;
        cfg.skill_spread = 0.0;
        let data = generate(&cfg).unwrap();
        for m in &data.matches {
            let team_sum = |t: Team| -> f64 { t.members().map(|p| m.latent[p.index()].iter().sum::<f64>()).sum() };
            let expected = if team_sum(Team::Blue) > team_sum(Team::Red) {
                Team::Blue
            } else {
                Team::Red
            };
            assert_eq!(m.sample.winner, expected);
            assert_eq!(m.document.meta.winner, expected);
        }
    }

    #[test]
    fn latent_sidecar_lists_every_action() {
        let data = generate(&small(2, 9)).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("latent.csv");
        data.write_latent_sidecar(&path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text.lines().count(), 1 + data.action_count());
    }

    #[test]
    fn exact_latent_scores_have_unit_spearman() {
        let data = generate(&small(3, 4)).unwrap();
        let scores: Vec<f64> = data
            .matches
            .iter()
            .flat_map(|m| m.latent.iter().flatten().copied())
            .collect();
        assert_eq!(spearman(&scores, &scores), 1.0);
    }

    #[test]
    fn untrained_ensemble_is_uncorrelated() {
        let data = generate(&GenConfig {
            seed: 21,
            n_matches: 12,
            ..GenConfig::default()
        })
        .unwrap();
        let ens = Ensemble::new(VariantConfig::from_id(1).unwrap(), Hyperparameters::default(), 8).unwrap();
        let report = oracle_scores(&data, &ens).unwrap();
        assert!(report.n_actions >= 10_000, "{report:?}");
        assert!(report.spearman.abs() < 0.2, "{report:?}");
        assert_eq!(report.bayes_ceiling, 0.95);
    }
}
