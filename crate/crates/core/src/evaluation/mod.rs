//! Discernment metrics for models and baselines, model-vs-metric ranking
//! comparison, under/over-estimation counts, and the 1-D PCA score study.

mod pca;
mod report;
mod stats;

use rayon::prelude::*;

pub use pca::{binned_curves, first_component, CurveBin, Principal, PCA_BINS, PCA_MAX_ITER, PCA_TOLERANCE};
pub use report::{emit_report, evaluate, EvaluationReport};
pub use stats::{average_ranks, pearson, rank_players, spearman};

use crate::error::{Error, Result};
use crate::featurizer::{MatchSample, FEATURE_DIM};
use crate::match_data::{Lane, ParticipantId, Team, PLAYERS_PER_MATCH};
use crate::model::{discern, Ensemble, LossPair, ScoreReport};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DiscernmentMetrics {
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub ties: usize,
    pub n_matches: usize,
}

impl DiscernmentMetrics {
    /// `(predicted, actual, tie)` per match; the positive class is a blue win.
    pub fn from_outcomes(outcomes: &[(Team, Team, bool)]) -> Result<Self> {
        if outcomes.is_empty() {
            return Err(Error::Evaluation("discernment over an empty dataset".into()));
        }
        let (mut tp, mut fp, mut fn_, mut correct, mut ties) = (0usize, 0usize, 0usize, 0usize, 0usize);
        for &(pred, actual, tie) in outcomes {
            correct += (pred == actual) as usize;
            ties += tie as usize;
            match (pred, actual) {
                (Team::Blue, Team::Blue) => tp += 1,
                (Team::Blue, Team::Red) => fp += 1,
                (Team::Red, Team::Blue) => fn_ += 1,
                _ => {}
            }
        }
        let ratio = |a: usize, b: usize| if b == 0 { 0.0 } else { a as f64 / b as f64 };
        let precision = ratio(tp, tp + fp);
        let recall = ratio(tp, tp + fn_);
        let f1 = if precision > 0.0 && recall > 0.0 {
            2.0 * precision * recall / (precision + recall)
        } else {
            0.0
        };
        Ok(Self {
            accuracy: ratio(correct, outcomes.len()),
            precision,
            recall,
            f1,
            ties,
            n_matches: outcomes.len(),
        })
    }
}

/// Per-player indicator a ranking can be based on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Metric {
    Kda,
    Gold,
    Creep,
    /// Mean of the three indicator ranks (smaller is better).
    AverageRank,
}

impl Metric {
    pub const BASELINES: [Metric; 3] = [Metric::Kda, Metric::Gold, Metric::Creep];
    pub const ALL: [Metric; 4] = [Metric::Kda, Metric::Gold, Metric::Creep, Metric::AverageRank];

    pub fn as_str(self) -> &'static str {
        match self {
            Metric::Kda => "kda",
            Metric::Gold => "gold",
            Metric::Creep => "creep",
            Metric::AverageRank => "average",
        }
    }

    fn values(self, sample: &MatchSample) -> [f64; PLAYERS_PER_MATCH] {
        let b = &sample.baselines;
        match self {
            Metric::Kda => std::array::from_fn(|i| b[i].kda()),
            Metric::Gold => std::array::from_fn(|i| b[i].gold),
            Metric::Creep => std::array::from_fn(|i| b[i].creep),
            Metric::AverageRank => {
                let ranks = Self::BASELINES.map(|m| rank_players(&m.values(sample)));
                // negated so that the best average rank sorts first
                std::array::from_fn(|i| -(ranks.iter().map(|r| r[i] as f64).sum::<f64>() / 3.0))
            }
        }
    }

    /// Rank 1 = best player on this indicator.
    pub fn ranks(self, sample: &MatchSample) -> [usize; PLAYERS_PER_MATCH] {
        rank_players(&self.values(sample))
    }
}

/// Scores every match, feeding the true outcome to outcome-encoded variants.
pub fn score_dataset(ens: &Ensemble, dataset: &[MatchSample]) -> Result<Vec<ScoreReport>> {
    dataset.par_iter().map(|s| ens.score_match(s, Some(s.winner))).collect()
}

pub fn discernment_from_reports(
    method: LossPair,
    dataset: &[MatchSample],
    reports: &[ScoreReport],
) -> Result<DiscernmentMetrics> {
    let outcomes: Vec<_> = dataset
        .iter()
        .zip(reports)
        .map(|(s, r)| {
            let d = discern(r.blue, r.red, method);
            (d.winner, s.winner, d.tie)
        })
        .collect();
    DiscernmentMetrics::from_outcomes(&outcomes)
}

pub fn discernment_eval(ens: &Ensemble, dataset: &[MatchSample]) -> Result<DiscernmentMetrics> {
    if dataset.is_empty() {
        return Err(Error::Evaluation("discernment over an empty dataset".into()));
    }
    let reports = score_dataset(ens, dataset)?;
    discernment_from_reports(ens.variant.loss, dataset, &reports)
}

/// Predicts the team with the larger per-team sum of the indicator; ties go to red.
pub fn baseline_eval(dataset: &[MatchSample], metric: Metric) -> Result<DiscernmentMetrics> {
    let outcomes: Vec<_> = dataset
        .iter()
        .map(|s| {
            let v = metric.values(s);
            let team = |t: Team| t.members().map(|p| v[p.index()]).sum::<f64>();
            let (b, r) = (team(Team::Blue), team(Team::Red));
            let pred = if b > r { Team::Blue } else { Team::Red };
            (pred, s.winner, b == r)
        })
        .collect();
    DiscernmentMetrics::from_outcomes(&outcomes)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankingComparison {
    pub metric: Metric,
    /// `counts[metric_rank - 1][model_rank - 1]`
    pub counts: [[u64; PLAYERS_PER_MATCH]; PLAYERS_PER_MATCH],
    /// Pearson correlation of the pooled (metric rank, model rank) pairs.
    pub spearman: f64,
    pub n_matches: usize,
}

pub fn ranking_from_reports(dataset: &[MatchSample], reports: &[ScoreReport], metric: Metric) -> RankingComparison {
    let mut counts = [[0u64; PLAYERS_PER_MATCH]; PLAYERS_PER_MATCH];
    let mut xs = Vec::with_capacity(dataset.len() * PLAYERS_PER_MATCH);
    let mut ys = Vec::with_capacity(dataset.len() * PLAYERS_PER_MATCH);
    for (s, r) in dataset.iter().zip(reports) {
        let metric_ranks = metric.ranks(s);
        let model_ranks = rank_players(&r.totals);
        for i in 0..PLAYERS_PER_MATCH {
            counts[metric_ranks[i] - 1][model_ranks[i] - 1] += 1;
            xs.push(metric_ranks[i] as f64);
            ys.push(model_ranks[i] as f64);
        }
    }
    RankingComparison {
        metric,
        counts,
        spearman: pearson(&xs, &ys),
        n_matches: dataset.len(),
    }
}

pub fn ranking_comparison(ens: &Ensemble, dataset: &[MatchSample], metric: Metric) -> Result<RankingComparison> {
    Ok(ranking_from_reports(dataset, &score_dataset(ens, dataset)?, metric))
}

#[derive(Debug, Clone, PartialEq)]
pub struct MisestimateReport {
    pub metric: Metric,
    pub threshold: usize,
    /// `(lane, underestimated, overestimated)` in lane order.
    pub per_lane: Vec<(Lane, usize, usize)>,
}

/// Underestimated: the indicator ranks the player more than `threshold`
/// places below the model; overestimated: the reverse.
pub fn misestimate_kind(metric_rank: usize, model_rank: usize, threshold: usize) -> (bool, bool) {
    let (m, s) = (metric_rank as i64, model_rank as i64);
    (m - s > threshold as i64, s - m > threshold as i64)
}

pub fn misestimates_from_reports(
    dataset: &[MatchSample],
    reports: &[ScoreReport],
    metric: Metric,
    threshold: usize,
) -> MisestimateReport {
    let mut per_lane: Vec<(Lane, usize, usize)> = Lane::ALL.iter().map(|&l| (l, 0, 0)).collect();
    for (s, r) in dataset.iter().zip(reports) {
        let metric_ranks = metric.ranks(s);
        let model_ranks = rank_players(&r.totals);
        for p in ParticipantId::all() {
            let i = p.index();
            let (under, over) = misestimate_kind(metric_ranks[i], model_ranks[i], threshold);
            let entry = &mut per_lane[s.lanes[i].index()];
            entry.1 += under as usize;
            entry.2 += over as usize;
        }
    }
    MisestimateReport {
        metric,
        threshold,
        per_lane,
    }
}

pub fn misestimates(
    ens: &Ensemble,
    dataset: &[MatchSample],
    metric: Metric,
    threshold: usize,
) -> Result<MisestimateReport> {
    Ok(misestimates_from_reports(
        dataset,
        &score_dataset(ens, dataset)?,
        metric,
        threshold,
    ))
}

#[derive(Debug, Clone, PartialEq)]
pub struct PcaStudy {
    pub principal: Principal,
    /// `(projection, score, on winning team)` per action.
    pub records: Vec<(f64, f64, bool)>,
    pub curves: Vec<CurveBin>,
    pub divergence: f64,
}

pub fn pca_from_reports(dataset: &[MatchSample], reports: &[ScoreReport]) -> Result<PcaStudy> {
    let vectors = dataset
        .iter()
        .flat_map(|s| s.sequences.iter().flat_map(|q| q.actions.iter().map(|a| a.as_slice())));
    let principal = first_component(vectors)?;
    let mut records = Vec::new();
    for (s, r) in dataset.iter().zip(reports) {
        for q in &s.sequences {
            let win = q.participant.team() == s.winner;
            for (a, &score) in q.actions.iter().zip(&r.scores[q.participant.index()]) {
                debug_assert_eq!(a.0.len(), FEATURE_DIM);
                records.push((principal.project(a.as_slice()), score, win));
            }
        }
    }
    let (curves, divergence) = binned_curves(&records, PCA_BINS);
    Ok(PcaStudy {
        principal,
        records,
        curves,
        divergence,
    })
}

pub fn pca_study(ens: &Ensemble, dataset: &[MatchSample]) -> Result<PcaStudy> {
    pca_from_reports(dataset, &score_dataset(ens, dataset)?)
}
