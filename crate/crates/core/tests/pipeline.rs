use playscore::evaluation::{emit_report, evaluate};
use playscore::featurizer::{build_match_sample, read_dataset, write_dataset, MatchConstants};
use playscore::match_data::{parse_match, ChampionRoleTable};
use playscore::model::{from_bytes, load_checkpoint, save_checkpoint, to_bytes, train, Hyperparameters};
use playscore::synth::{generate, GenConfig};
use playscore::{Ensemble, VariantConfig};
use proptest::prelude::*;

fn small(seed: u64, n: usize) -> GenConfig {
    GenConfig {
        seed,
        n_matches: n,
        events_per_player: (4, 16),
        ..GenConfig::default()
    }
}

#[test]
fn documents_survive_the_file_format() {
    let data = generate(&small(3, 5)).unwrap();
    let table = ChampionRoleTable::builtin();
    let consts = MatchConstants::default();
    for m in &data.matches {
        let doc = parse_match(m.document.to_json().as_bytes()).unwrap();
        assert_eq!(doc, m.document);
        assert_eq!(build_match_sample(&doc, &table, &consts).unwrap(), m.sample);
    }
}

#[test]
fn train_checkpoint_and_evaluate() {
    let tmp = tempfile::tempdir().unwrap();
    let data = generate(&small(4, 24)).unwrap();
    let path = tmp.path().join("all.jsonl");
    write_dataset(&path, &data.samples()).unwrap();
    let samples = read_dataset(&path).unwrap();
    // nine significant digits on disk: rewriting is exact, values are close
    let again = tmp.path().join("again.jsonl");
    write_dataset(&again, &samples).unwrap();
    assert_eq!(std::fs::read(&path).unwrap(), std::fs::read(&again).unwrap());
    for (a, b) in samples.iter().zip(&data.samples()) {
        assert_eq!((a.winner, a.action_count()), (b.winner, b.action_count()));
        for (x, y) in a
            .sequences
            .iter()
            .flat_map(|s| &s.actions)
            .zip(b.sequences.iter().flat_map(|s| &s.actions))
        {
            for (u, v) in x.0.iter().zip(&y.0) {
                assert!((u - v).abs() <= 5e-9 * v.abs(), "{u} vs {v}");
            }
        }
    }

    let (train_set, rest) = samples.split_at(16);
    let (val, test) = rest.split_at(4);
    for id in [1, 5, 7] {
        let hyper = Hyperparameters {
            epochs: 2,
            ..Hyperparameters::default()
        };
        let ens = Ensemble::new(VariantConfig::from_id(id).unwrap(), hyper, 8).unwrap();
        let (best, history) = train(ens, train_set, val, 8).unwrap();
        assert_eq!(history.epochs.len(), 2);
        assert!((1..=2).contains(&history.best_epoch));
        assert_eq!(best.max_divergence(), 0.0);

        let ckpt = tmp.path().join(format!("v{id}.bin"));
        save_checkpoint(&best, &ckpt).unwrap();
        let loaded = load_checkpoint(&ckpt).unwrap();
        assert_eq!(to_bytes(&loaded), to_bytes(&best));

        let report = evaluate(&loaded, test, 5).unwrap();
        assert_eq!(report.model.n_matches, test.len());
        assert_eq!(report.outcome_leakage, id == 5);
        let written = emit_report(&report, &tmp.path().join(format!("eval{id}"))).unwrap();
        assert_eq!(written.len(), 11);
    }
}

#[test]
fn truncated_checkpoint_is_rejected() {
    let ens = Ensemble::new(VariantConfig::from_id(6).unwrap(), Hyperparameters::default(), 2).unwrap();
    let bytes = to_bytes(&ens);
    assert!(from_bytes(&bytes[..bytes.len() - 3]).is_err());
    assert!(from_bytes(b"nope").is_err());
    assert_eq!(from_bytes(&bytes).unwrap(), ens);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn generated_actions_are_valid_and_winner_follows_latent(seed in any::<u64>()) {
        let cfg = GenConfig {
            label_flip_probability: 0.0,
            quality_noise: 0.0,
            ..small(seed, 3)
        };
        let data = generate(&cfg).unwrap();
        for m in &data.matches {
            for seq in &m.sample.sequences {
                for a in &seq.actions {
                    prop_assert!(a.check().is_ok());
                }
            }
            let team = |t: playscore::Team| -> f64 {
                t.members().map(|p| m.latent[p.index()].iter().sum::<f64>()).sum()
            };
            let (b, r) = (team(playscore::Team::Blue), team(playscore::Team::Red));
            let expected = if b > r { playscore::Team::Blue } else { playscore::Team::Red };
            prop_assert_eq!(m.sample.winner, expected);
        }
    }
}
