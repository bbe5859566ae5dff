use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use playscore::config::RunConfig;
use playscore::featurizer::read_dataset;
use playscore::model::{to_bytes, Hyperparameters};
use playscore::{Ensemble, VariantConfig};

fn playscore(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_playscore"))
        .args(["--seed", "9", "--out"])
        .arg(out)
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

/// Small synthetic corpus; returns the output directory.
fn synth(dir: &Path, n: usize) -> PathBuf {
    let out = dir.join("synth");
    let o = playscore(
        &out,
        &[
            "synth",
            "--n",
            &n.to_string(),
            "--events-min",
            "4",
            "--events-max",
            "12",
        ],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    out
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn synth_writes_matches_sidecar_and_dataset_reproducibly() {
    let tmp = tempfile::tempdir().unwrap();
    let a = synth(&tmp.path().join("a"), 6);
    let b = synth(&tmp.path().join("b"), 6);
    assert_eq!(fs::read_dir(a.join("matches")).unwrap().count(), 6);
    for f in ["dataset.jsonl", "latent.csv"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f}");
    }
    let samples = read_dataset(&a.join("dataset.jsonl")).unwrap();
    let actions: usize = samples.iter().map(|s| s.action_count()).sum();
    let sidecar = fs::read_to_string(a.join("latent.csv")).unwrap();
    assert_eq!(sidecar.lines().count(), actions + 1);
    assert!(sidecar.starts_with("match_id,participant,action_index,latent"));
}

#[test]
fn synth_rejects_empty_corpus() {
    let tmp = tempfile::tempdir().unwrap();
    let o = playscore(tmp.path(), &["synth", "--n", "0"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("n_matches"), "{}", stderr(&o));
}

#[test]
fn featurize_matches_the_synth_dataset() {
    let tmp = tempfile::tempdir().unwrap();
    let data = synth(tmp.path(), 4);
    let out = tmp.path().join("feat");
    let o = playscore(&out, &["featurize", path(&data.join("matches"))]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("featurized 4 matches, skipped 0"));
    assert_eq!(
        fs::read(out.join("dataset.jsonl")).unwrap(),
        fs::read(data.join("dataset.jsonl")).unwrap()
    );
}

#[test]
fn featurize_empty_directory_warns() {
    let tmp = tempfile::tempdir().unwrap();
    let empty = tmp.path().join("empty");
    fs::create_dir(&empty).unwrap();
    let o = playscore(&tmp.path().join("out"), &["featurize", path(&empty)]);
    assert!(o.status.success());
    assert!(stderr(&o).contains("warning"), "{}", stderr(&o));
    assert_eq!(fs::read_to_string(tmp.path().join("out/dataset.jsonl")).unwrap(), "");
}

#[test]
fn featurize_skips_corrupt_files_unless_strict() {
    let tmp = tempfile::tempdir().unwrap();
    let data = synth(tmp.path(), 3);
    let matches = data.join("matches");
    fs::write(matches.join("broken.json"), "{\"meta\": ").unwrap();

    let o = playscore(&tmp.path().join("lenient"), &["featurize", path(&matches)]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stderr(&o).contains("skipped") && stderr(&o).contains("broken.json"));
    assert!(stdout(&o).contains("featurized 3 matches, skipped 1"));

    let o = playscore(&tmp.path().join("strict"), &["--strict", "featurize", path(&matches)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("broken.json"), "{}", stderr(&o));
}

#[test]
fn zero_epochs_checkpoint_is_the_initialization() {
    let tmp = tempfile::tempdir().unwrap();
    let data = synth(tmp.path(), 12);
    let out = tmp.path().join("model");
    let ds = data.join("dataset.jsonl");
    let o = playscore(&out, &["train", path(&ds), "--variant", "3", "--epochs", "0"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let cfg = RunConfig {
        seed: 9,
        epochs: 0,
        ..RunConfig::default()
    };
    let init = Ensemble::new(VariantConfig::from_id(3).unwrap(), cfg.hyperparameters(), 9).unwrap();
    assert_eq!(fs::read(out.join("checkpoint.bin")).unwrap(), to_bytes(&init));
    assert_eq!(
        fs::read_to_string(out.join("history.csv")).unwrap(),
        "epoch,train_loss,val_accuracy\n"
    );
}

#[test]
fn train_writes_split_and_history() {
    let tmp = tempfile::tempdir().unwrap();
    let data = synth(tmp.path(), 20);
    let out = tmp.path().join("model");
    let o = playscore(
        &out,
        &[
            "train",
            path(&data.join("dataset.jsonl")),
            "--variant",
            "6",
            "--epochs",
            "2",
        ],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let history = fs::read_to_string(out.join("history.csv")).unwrap();
    assert_eq!(history.lines().count(), 3);
    let split = fs::read_to_string(out.join("split.csv")).unwrap();
    let parts: Vec<&str> = split.lines().skip(1).map(|l| l.rsplit(',').next().unwrap()).collect();
    assert_eq!(parts.len(), 20);
    let test = parts.iter().filter(|p| **p == "test").count();
    assert_eq!(read_dataset(&out.join("test.jsonl")).unwrap().len(), test);
}

#[test]
fn train_rejects_bad_variant_and_tiny_dataset() {
    let tmp = tempfile::tempdir().unwrap();
    let data = synth(tmp.path(), 2);
    let ds = data.join("dataset.jsonl");
    let o = playscore(tmp.path(), &["train", path(&ds), "--variant", "8"]);
    assert_eq!(o.status.code(), Some(1));
    let o = playscore(tmp.path(), &["train", path(&ds)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("too small"), "{}", stderr(&o));
}

fn trained(tmp: &Path, variant: &str) -> (PathBuf, PathBuf) {
    let data = synth(tmp, 12);
    let out = tmp.join(format!("model{variant}"));
    let o = playscore(
        &out,
        &[
            "train",
            path(&data.join("dataset.jsonl")),
            "--variant",
            variant,
            "--epochs",
            "1",
        ],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    (data, out.join("checkpoint.bin"))
}

#[test]
fn score_prints_every_action_then_totals() {
    let tmp = tempfile::tempdir().unwrap();
    let (data, ckpt) = trained(tmp.path(), "1");
    let first = fs::read_dir(data.join("matches"))
        .unwrap()
        .next()
        .unwrap()
        .unwrap()
        .path();
    let o = playscore(tmp.path(), &["score", path(&ckpt), path(&first), "--csv"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("record,participant,timestamp_ms,kind,score"));
    let rows: Vec<&str> = lines.collect();
    let count = |kind: &str| rows.iter().filter(|r| r.starts_with(kind)).count();
    assert_eq!(count("total,"), 10);
    assert_eq!(count("team,"), 2);
    assert!(count("action,") > 0);
    for r in &rows {
        let score: f64 = r.rsplit(',').next().unwrap().parse().unwrap();
        assert!(score.is_finite());
    }
}

#[test]
fn outcome_variant_needs_the_winner_to_score() {
    let tmp = tempfile::tempdir().unwrap();
    let (data, ckpt) = trained(tmp.path(), "2");
    let first = fs::read_dir(data.join("matches"))
        .unwrap()
        .next()
        .unwrap()
        .unwrap()
        .path();
    let o = playscore(tmp.path(), &["score", path(&ckpt), path(&first)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("--outcome"), "{}", stderr(&o));
    let o = playscore(tmp.path(), &["score", path(&ckpt), path(&first), "--outcome", "red"]);
    assert!(o.status.success(), "{}", stderr(&o));
}

#[test]
fn evaluate_writes_the_report() {
    let tmp = tempfile::tempdir().unwrap();
    let (data, ckpt) = trained(tmp.path(), "1");
    let eval = tmp.path().join("eval");
    let o = playscore(
        &eval,
        &[
            "evaluate",
            path(&ckpt),
            path(&data.join("dataset.jsonl")),
            "--threshold",
            "3",
        ],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let discernment = fs::read_to_string(eval.join("discernment.csv")).unwrap();
    let rows: Vec<&str> = discernment.lines().collect();
    assert_eq!(rows[0], "model,accuracy,precision,recall,f1,ties");
    assert!(rows[1].starts_with("variant1,"));
    assert_eq!(rows.len(), 5);
    for metric in ["kda", "gold", "creep", "average"] {
        let heat = fs::read_to_string(eval.join(format!("heatmap_{metric}.csv"))).unwrap();
        assert_eq!(heat.lines().count(), 101, "{metric}");
        let mis = fs::read_to_string(eval.join(format!("misestimates_{metric}.csv"))).unwrap();
        assert_eq!(mis.lines().count(), 6, "{metric}");
    }
    assert!(eval.join("pca_curves.csv").exists());
    assert!(fs::read_to_string(eval.join("summary.txt"))
        .unwrap()
        .contains("threshold"));
}

#[test]
fn evaluate_needs_an_existing_checkpoint() {
    let tmp = tempfile::tempdir().unwrap();
    let data = synth(tmp.path(), 2);
    let o = playscore(
        tmp.path(),
        &["evaluate", "missing.bin", path(&data.join("dataset.jsonl"))],
    );
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("does not exist"), "{}", stderr(&o));
}

#[test]
fn gradcheck_fails_on_a_perturbed_gradient() {
    let tmp = tempfile::tempdir().unwrap();
    let o = playscore(tmp.path(), &["gradcheck", "--perturb", "0.001"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).lines().last().unwrap().starts_with("FAIL max_rel_err="));
}

#[test]
fn config_file_is_overridden_by_flags() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("run.cfg");
    fs::write(
        &cfg,
        "seed = 3\nn_matches = 2\nevents_min = 2\nevents_max = 3\nout = from-config\n",
    )
    .unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_playscore"))
        .args(["--config", path(&cfg), "synth", "--n", "3"])
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", stderr(&o));
    let out = tmp.path().join("from-config");
    assert_eq!(fs::read_dir(out.join("matches")).unwrap().count(), 3);

    fs::write(&cfg, "seed = 3\nlearning_rate = 1\n").unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_playscore"))
        .args(["--config", path(&cfg), "synth"])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("learning_rate"), "{}", stderr(&o));
}

#[test]
fn usage_errors_exit_with_two() {
    let o = Command::new(env!("CARGO_BIN_EXE_playscore"))
        .arg("frobnicate")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    let o = Command::new(env!("CARGO_BIN_EXE_playscore"))
        .args(["train"])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn hyperparameter_defaults_match_the_config_defaults() {
    let cfg = RunConfig::default();
    let h = Hyperparameters::default();
    assert_eq!((cfg.lr, cfg.epochs), (h.lr, h.epochs));
}
