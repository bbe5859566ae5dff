use std::fs;
use std::path::{Path, PathBuf};

use super::{
    baseline_eval, discernment_from_reports, misestimates_from_reports, pca_from_reports, ranking_from_reports,
    score_dataset, DiscernmentMetrics, Metric, MisestimateReport, PcaStudy, RankingComparison,
};
use crate::error::{Error, Result};
use crate::featurizer::MatchSample;
use crate::model::Ensemble;

/// Everything the evaluation step computes for one model over one dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationReport {
    pub variant: u8,
    /// The model was given the true outcome as its initial state.
    pub outcome_leakage: bool,
    pub model: DiscernmentMetrics,
    pub baselines: Vec<(Metric, DiscernmentMetrics)>,
    pub rankings: Vec<RankingComparison>,
    pub misestimates: Vec<MisestimateReport>,
    pub pca: Option<PcaStudy>,
}

/// Scores the dataset once and derives every table from those scores.
pub fn evaluate(ens: &Ensemble, dataset: &[MatchSample], threshold: usize) -> Result<EvaluationReport> {
    if dataset.is_empty() {
        return Err(Error::Evaluation("evaluation over an empty dataset".into()));
    }
    let reports = score_dataset(ens, dataset)?;
    let model = discernment_from_reports(ens.variant.loss, dataset, &reports)?;
    let baselines = Metric::BASELINES
        .iter()
        .map(|&m| Ok((m, baseline_eval(dataset, m)?)))
        .collect::<Result<Vec<_>>>()?;
    let rankings = Metric::ALL
        .iter()
        .map(|&m| ranking_from_reports(dataset, &reports, m))
        .collect();
    let misestimates = Metric::ALL
        .iter()
        .map(|&m| misestimates_from_reports(dataset, &reports, m, threshold))
        .collect();
    // fewer than two actions overall leaves nothing to project
    let pca = if dataset.iter().map(MatchSample::action_count).sum::<usize>() >= 2 {
        Some(pca_from_reports(dataset, &reports)?)
    } else {
        None
    };
    Ok(EvaluationReport {
        variant: ens.variant.id,
        outcome_leakage: ens.variant.needs_outcome(),
        model,
        baselines,
        rankings,
        misestimates,
        pca,
    })
}

fn csv_err(path: &Path, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(source) => Error::io(path, source),
        other => Error::Evaluation(format!("{}: {other:?}", path.display())),
    }
}

fn write_csv<const N: usize>(path: &Path, header: [&str; N], rows: Vec<[String; N]>) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_err(path, e))?;
    w.write_record(header).map_err(|e| csv_err(path, e))?;
    for row in rows {
        w.write_record(&row).map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:?}")).unwrap_or_default()
}

fn metrics_row(name: &str, m: &DiscernmentMetrics) -> [String; 6] {
    [
        name.to_string(),
        format!("{:?}", m.accuracy),
        format!("{:?}", m.precision),
        format!("{:?}", m.recall),
        format!("{:?}", m.f1),
        m.ties.to_string(),
    ]
}

/// Writes the report tables into `dir` (created if missing) and returns the
/// paths written. Output is a pure function of the report.
pub fn emit_report(report: &EvaluationReport, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut written = Vec::new();

    let path = dir.join("discernment.csv");
    let mut rows = vec![metrics_row(&format!("variant{}", report.variant), &report.model)];
    rows.extend(report.baselines.iter().map(|(m, d)| metrics_row(m.as_str(), d)));
    write_csv(&path, ["model", "accuracy", "precision", "recall", "f1", "ties"], rows)?;
    written.push(path);

    for cmp in &report.rankings {
        let path = dir.join(format!("heatmap_{}.csv", cmp.metric.as_str()));
        let mut rows = Vec::new();
        for (i, row) in cmp.counts.iter().enumerate() {
            for (j, &count) in row.iter().enumerate() {
                rows.push([(i + 1).to_string(), (j + 1).to_string(), count.to_string()]);
            }
        }
        write_csv(&path, ["metric_rank", "model_rank", "count"], rows)?;
        written.push(path);
    }

    for mis in &report.misestimates {
        let path = dir.join(format!("misestimates_{}.csv", mis.metric.as_str()));
        let rows = mis
            .per_lane
            .iter()
            .map(|(lane, u, o)| [lane.as_str().to_string(), u.to_string(), o.to_string()])
            .collect();
        write_csv(&path, ["lane", "under", "over"], rows)?;
        written.push(path);
    }

    let path = dir.join("pca_curves.csv");
    let rows = report
        .pca
        .iter()
        .flat_map(|p| &p.curves)
        .map(|b| {
            [
                format!("{:?}", b.low),
                format!("{:?}", b.high),
                opt(b.mean_win),
                opt(b.mean_lose),
                b.n_win.to_string(),
                b.n_lose.to_string(),
            ]
        })
        .collect();
    write_csv(
        &path,
        ["bin_low", "bin_high", "mean_win", "mean_lose", "n_win", "n_lose"],
        rows,
    )?;
    written.push(path);

    let path = dir.join("summary.txt");
    fs::write(&path, summary(report)).map_err(|e| Error::io(&path, e))?;
    written.push(path);
    Ok(written)
}

pub(crate) fn summary(report: &EvaluationReport) -> String {
    let mut s = String::new();
    let m = &report.model;
    s.push_str(&format!("variant {}\nmatches {}\n", report.variant, m.n_matches));
    if report.outcome_leakage {
        s.push_str("warning: outcome-encoded initial state; accuracy reflects label leakage\n");
    }
    s.push_str(&format!(
        "model accuracy={:.4} precision={:.4} recall={:.4} f1={:.4} ties={}\n",
        m.accuracy, m.precision, m.recall, m.f1, m.ties
    ));
    for (metric, d) in &report.baselines {
        s.push_str(&format!(
            "baseline {} accuracy={:.4} ties={}\n",
            metric.as_str(),
            d.accuracy,
            d.ties
        ));
    }
    for cmp in &report.rankings {
        s.push_str(&format!("spearman {} {:.4}\n", cmp.metric.as_str(), cmp.spearman));
    }
    for mis in &report.misestimates {
        let (u, o) = mis.per_lane.iter().fold((0, 0), |(u, o), l| (u + l.1, o + l.2));
        s.push_str(&format!(
            "misestimates {} threshold={} under={} over={}\n",
            mis.metric.as_str(),
            mis.threshold,
            u,
            o
        ));
    }
    match &report.pca {
        Some(p) => s.push_str(&format!(
            "pca variance={:.6} divergence={:.6}\n",
            p.principal.variance, p.divergence
        )),
        None => s.push_str("pca unavailable\n"),
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Hyperparameters, VariantConfig};

    fn data() -> Vec<MatchSample> {
        (0..6)
            .map(|i| {
                let w = if i % 2 == 0 {
                    crate::Team::Blue
                } else {
                    crate::Team::Red
                };
                let gold = std::array::from_fn(|p| ((p * 7 + i) % 10) as f64 * 100.0);
                let mut s = crate::evaluation::tests::sample(w, gold);
                for (p, q) in s.sequences.iter_mut().enumerate() {
                    for a in q.actions.iter_mut() {
                        a.0 = std::array::from_fn(|k| ((k * 13 + p * 5 + i * 3) % 17) as f64 / 17.0);
                    }
                }
                s
            })
            .collect()
    }

    #[test]
    fn emitted_files_are_deterministic() {
        let ens = Ensemble::new(VariantConfig::from_id(1).unwrap(), Hyperparameters::default(), 5).unwrap();
        let report = evaluate(&ens, &data(), 5).unwrap();
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        let pa = emit_report(&report, a.path()).unwrap();
        let again = evaluate(&ens, &data(), 5).unwrap();
        let pb = emit_report(&again, b.path()).unwrap();
        assert_eq!(pa.len(), 11);
        for (x, y) in pa.iter().zip(&pb) {
            assert_eq!(fs::read(x).unwrap(), fs::read(y).unwrap(), "{}", x.display());
        }
        let heat = fs::read_to_string(a.path().join("heatmap_gold.csv")).unwrap();
        assert_eq!(heat.lines().count(), 101);
    }

    #[test]
    fn leakage_is_flagged() {
        let ens = Ensemble::new(VariantConfig::from_id(5).unwrap(), Hyperparameters::default(), 5).unwrap();
        let report = evaluate(&ens, &data(), 5).unwrap();
        assert!(report.outcome_leakage);
        assert!(summary(&report).contains("leakage"));
        assert!(evaluate(&ens, &[], 5).is_err());
    }
}
