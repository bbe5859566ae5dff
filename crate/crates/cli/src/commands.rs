use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, ensure, Context, Result};
use playscore::config::RunConfig;
use playscore::evaluation::{emit_report, evaluate};
use playscore::featurizer::{build_match_sample, featurize_actions, read_dataset, write_dataset, MatchConstants};
use playscore::match_data::{parse_match, ChampionRoleTable, PLAYERS_PER_MATCH};
use playscore::model::gradcheck::{gradcheck_all, GRADCHECK_TOLERANCE};
use playscore::model::{load_checkpoint, save_checkpoint, train};
use playscore::synth::generate;
use playscore::{Ensemble, MatchSample, Team};

use crate::{Cli, Command};

struct Ctx {
    cfg: RunConfig,
    out: PathBuf,
    strict: bool,
}

impl Ctx {
    fn out_dir(&self) -> Result<&Path> {
        fs::create_dir_all(&self.out).with_context(|| format!("creating {}", self.out.display()))?;
        Ok(&self.out)
    }

    fn role_table(&self) -> Result<ChampionRoleTable> {
        match &self.cfg.role_table {
            Some(p) => {
                let f = fs::File::open(p).with_context(|| format!("opening {}", p.display()))?;
                Ok(ChampionRoleTable::from_csv(f)?)
            }
            None => Ok(ChampionRoleTable::builtin()),
        }
    }
}

pub fn run(cli: Cli) -> Result<ExitCode> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p).with_context(|| format!("loading {}", p.display()))?,
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    let out = cli
        .out
        .clone()
        .or_else(|| cfg.out.clone())
        .unwrap_or_else(|| PathBuf::from("playscore-out"));
    let mut ctx = Ctx {
        cfg,
        out,
        strict: cli.strict,
    };
    match cli.command {
        Command::Synth {
            n,
            events_min,
            events_max,
            label_flip,
        } => {
            let c = &mut ctx.cfg;
            c.n_matches = n.unwrap_or(c.n_matches);
            c.events_min = events_min.unwrap_or(c.events_min);
            c.events_max = events_max.unwrap_or(c.events_max);
            c.label_flip = label_flip.unwrap_or(c.label_flip);
            cmd_synth(&ctx)
        }
        Command::Featurize { input, output } => cmd_featurize(&ctx, &input, &output),
        Command::Train {
            dataset,
            variant,
            epochs,
            lr,
        } => {
            let c = &mut ctx.cfg;
            c.variant = variant.unwrap_or(c.variant);
            c.epochs = epochs.unwrap_or(c.epochs);
            c.lr = lr.unwrap_or(c.lr);
            cmd_train(&ctx, &dataset)
        }
        Command::Score {
            checkpoint,
            match_file,
            csv,
            outcome,
        } => cmd_score(&ctx, &checkpoint, &match_file, csv, outcome.as_deref()),
        Command::Evaluate {
            checkpoint,
            dataset,
            threshold,
        } => {
            ctx.cfg.threshold = threshold.unwrap_or(ctx.cfg.threshold);
            cmd_evaluate(&ctx, &checkpoint, &dataset)
        }
        Command::Gradcheck { instances, perturb } => cmd_gradcheck(&ctx, instances, perturb),
    }
}

fn cmd_synth(ctx: &Ctx) -> Result<ExitCode> {
    let gen = ctx.cfg.gen_config();
    gen.validate()?;
    let data = generate(&gen)?;
    let out = ctx.out_dir()?;
    let matches_dir = out.join("matches");
    fs::create_dir_all(&matches_dir).with_context(|| format!("creating {}", matches_dir.display()))?;
    for m in &data.matches {
        let path = matches_dir.join(format!("{}.json", m.document.meta.match_id));
        fs::write(&path, m.document.to_json()).with_context(|| format!("writing {}", path.display()))?;
    }
    data.write_latent_sidecar(&out.join("latent.csv"))?;
    write_dataset(&out.join("dataset.jsonl"), &data.samples())?;
    println!(
        "wrote {} matches ({} actions) to {}",
        data.matches.len(),
        data.action_count(),
        out.display()
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_featurize(ctx: &Ctx, input: &Path, output: &str) -> Result<ExitCode> {
    let mut files: Vec<PathBuf> = fs::read_dir(input)
        .with_context(|| format!("reading {}", input.display()))?
        .map(|e| e.map(|e| e.path()))
        .collect::<io::Result<_>>()
        .with_context(|| format!("reading {}", input.display()))?;
    files.retain(|p| p.extension().is_some_and(|e| e == "json"));
    files.sort();
    if files.is_empty() {
        eprintln!("warning: no .json match files in {}", input.display());
    }
    let table = ctx.role_table()?;
    let consts = MatchConstants::default();
    let mut samples = Vec::with_capacity(files.len());
    let mut skipped = 0;
    for path in &files {
        let result = fs::read(path)
            .map_err(anyhow::Error::from)
            .and_then(|bytes| Ok(build_match_sample(&parse_match(&bytes)?, &table, &consts)?));
        match result {
            Ok(s) => samples.push(s),
            Err(e) if ctx.strict => return Err(e.context(format!("{}", path.display()))),
            Err(e) => {
                eprintln!("skipped {}: {e:#}", path.display());
                skipped += 1;
            }
        }
    }
    let dest = ctx.out_dir()?.join(output);
    write_dataset(&dest, &samples)?;
    println!(
        "featurized {} matches, skipped {} -> {}",
        samples.len(),
        skipped,
        dest.display()
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_train(ctx: &Ctx, dataset: &Path) -> Result<ExitCode> {
    ctx.cfg.validate()?;
    let samples = read_dataset(dataset)?;
    let [tr, va, te] = ctx.cfg.split_indices(samples.len())?;
    let pick = |idx: &[usize]| -> Vec<MatchSample> { idx.iter().map(|&i| samples[i].clone()).collect() };
    let (train_set, val_set, test_set) = (pick(&tr), pick(&va), pick(&te));

    let variant = playscore::VariantConfig::from_id(ctx.cfg.variant)?;
    let ens = Ensemble::new(variant, ctx.cfg.hyperparameters(), ctx.cfg.seed)?;
    let (best, history) = train(ens, &train_set, &val_set, ctx.cfg.seed)?;

    let out = ctx.out_dir()?;
    save_checkpoint(&best, &out.join("checkpoint.bin"))?;
    fs::write(out.join("history.csv"), history.to_csv()).context("writing history.csv")?;
    let mut split = String::from("match_id,part\n");
    for (part, idx) in [("train", &tr), ("val", &va), ("test", &te)] {
        for &i in idx.iter() {
            split.push_str(&format!("{},{part}\n", samples[i].match_id));
        }
    }
    fs::write(out.join("split.csv"), split).context("writing split.csv")?;
    write_dataset(&out.join("test.jsonl"), &test_set)?;
    let best_acc = history
        .epochs
        .iter()
        .find(|e| e.epoch == history.best_epoch)
        .map(|e| e.val_accuracy);
    match best_acc {
        Some(acc) => println!("{variant}: best epoch {} val_accuracy={acc:.4}", history.best_epoch),
        None => println!("{variant}: no epochs run, checkpoint holds the initialization"),
    }
    println!("train={} val={} test={}", tr.len(), va.len(), te.len());
    Ok(ExitCode::SUCCESS)
}

fn cmd_score(ctx: &Ctx, checkpoint: &Path, match_file: &Path, csv: bool, outcome: Option<&str>) -> Result<ExitCode> {
    let ens = load_checkpoint(checkpoint).with_context(|| format!("loading {}", checkpoint.display()))?;
    let outcome: Option<Team> = outcome.map(str::parse).transpose()?;
    if ens.variant.needs_outcome() && outcome.is_none() {
        bail!(
            "{} encodes the match outcome in its initial hidden state; pass --outcome blue|red to score with it",
            ens.variant
        );
    }
    let bytes = fs::read(match_file).with_context(|| format!("reading {}", match_file.display()))?;
    let doc = parse_match(&bytes).with_context(|| format!("{}", match_file.display()))?;
    let table = ctx.role_table()?;
    let consts = MatchConstants::default();
    let actions = featurize_actions(&doc, &table, &consts)?;
    let sample = build_match_sample(&doc, &table, &consts)?;
    let report = ens.score_match(&sample, outcome)?;

    let stdout = io::stdout();
    let mut w = stdout.lock();
    let mut next = [0usize; PLAYERS_PER_MATCH];
    if csv {
        writeln!(w, "record,participant,timestamp_ms,kind,score")?;
    } else {
        writeln!(
            w,
            "{:>11} {:>12} {:<26} {:>12}",
            "participant", "timestamp_ms", "kind", "score"
        )?;
    }
    for a in &actions {
        let p = a.event.actor.index();
        let score = report.scores[p][next[p]];
        next[p] += 1;
        if csv {
            writeln!(
                w,
                "action,{},{},{},{score:?}",
                a.event.actor, a.event.timestamp_ms, a.event.kind
            )?;
        } else {
            writeln!(
                w,
                "{:>11} {:>12} {:<26} {:>12.6}",
                a.event.actor.to_string(),
                a.event.timestamp_ms,
                a.event.kind.as_str(),
                score
            )?;
        }
    }
    ensure!(
        next.iter().zip(&report.scores).all(|(n, s)| *n == s.len()),
        "featurized actions and scores disagree"
    );
    for (p, total) in report.totals.iter().enumerate() {
        if csv {
            writeln!(w, "total,{},,,{total:?}", p + 1)?;
        } else {
            writeln!(w, "total {:>2} {total:>12.6}", p + 1)?;
        }
    }
    for (team, sum) in [(Team::Blue, report.blue), (Team::Red, report.red)] {
        if csv {
            writeln!(w, "team,{team},,,{sum:?}")?;
        } else {
            writeln!(w, "team {team:<4} {sum:>12.6}")?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_evaluate(ctx: &Ctx, checkpoint: &Path, dataset: &Path) -> Result<ExitCode> {
    ensure!(
        checkpoint.exists(),
        "checkpoint {} does not exist",
        checkpoint.display()
    );
    let ens = load_checkpoint(checkpoint).with_context(|| format!("loading {}", checkpoint.display()))?;
    let samples = read_dataset(dataset)?;
    let report = evaluate(&ens, &samples, ctx.cfg.threshold)?;
    let written = emit_report(&report, ctx.out_dir()?)?;
    if report.outcome_leakage {
        eprintln!(
            "warning: {} was given each match's outcome; its accuracy reflects label leakage",
            ens.variant
        );
    }
    println!(
        "{}: accuracy={:.4} over {} matches; wrote {} files to {}",
        ens.variant,
        report.model.accuracy,
        report.model.n_matches,
        written.len(),
        ctx.out.display()
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_gradcheck(ctx: &Ctx, instances: usize, perturb: f64) -> Result<ExitCode> {
    ensure!(instances >= 1, "instances must be >= 1");
    let checks = gradcheck_all(ctx.cfg.seed, instances, perturb)?;
    let mut worst = 0.0f64;
    for c in &checks {
        println!(
            "variant {} steps={} player={} max_rel_err={:e}",
            c.variant,
            c.steps,
            c.player + 1,
            c.max_rel_err
        );
        worst = worst.max(c.max_rel_err);
    }
    if worst < GRADCHECK_TOLERANCE {
        println!("PASS max_rel_err={worst:e}");
        Ok(ExitCode::SUCCESS)
    } else {
        println!("FAIL max_rel_err={worst:e}");
        Ok(ExitCode::from(1))
    }
}
