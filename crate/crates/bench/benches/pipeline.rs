use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use playscore::evaluation::score_dataset;
use playscore::featurizer::{build_match_sample, MatchConstants};
use playscore::match_data::ChampionRoleTable;
use playscore::model::{Hyperparameters, SubModel, HIDDEN, LAYERS};
use playscore::{Ensemble, VariantConfig};
use playscore_bench::{corpus, sequence};

fn submodel(c: &mut Criterion) {
    let data = corpus(4, (40, 120));
    let ens = Ensemble::new(VariantConfig::from_id(1).unwrap(), Hyperparameters::default(), 1).unwrap();
    let sub: &SubModel = &ens.subs[0];
    let order = ens.variant.order;
    let h0 = vec![0.0; LAYERS * HIDDEN];
    let mut group = c.benchmark_group("gru_slp");
    for len in [10, 100, 400] {
        let seq = sequence(&data, len);
        group.bench_with_input(BenchmarkId::new("forward", len), &seq, |b, seq| {
            b.iter(|| sub.score(black_box(seq), order, &h0).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("forward_backward", len), &seq, |b, seq| {
            b.iter(|| sub.score_and_grad(black_box(seq), order, &h0, 1.0).unwrap())
        });
    }
    group.finish();
}

fn training(c: &mut Criterion) {
    let data = corpus(8, (40, 120));
    let samples = data.samples();
    let mut group = c.benchmark_group("train_match");
    group.sample_size(20);
    for id in [1, 6] {
        let variant = VariantConfig::from_id(id).unwrap();
        let mut ens = Ensemble::new(variant, Hyperparameters::default(), 1).unwrap();
        let mut i = 0;
        group.bench_function(BenchmarkId::from_parameter(format!("variant{id}")), |b| {
            b.iter(|| {
                i = (i + 1) % samples.len();
                ens.train_match(&samples[i]).unwrap()
            })
        });
    }
    group.finish();
}

fn featurize(c: &mut Criterion) {
    let data = corpus(8, (40, 120));
    let table = ChampionRoleTable::builtin();
    let consts = MatchConstants::default();
    c.bench_function("build_match_sample", |b| {
        b.iter(|| {
            for m in &data.matches {
                black_box(build_match_sample(&m.document, &table, &consts).unwrap());
            }
        })
    });
}

fn evaluation(c: &mut Criterion) {
    let data = corpus(32, (40, 120));
    let samples = data.samples();
    let ens = Ensemble::new(VariantConfig::from_id(1).unwrap(), Hyperparameters::default(), 1).unwrap();
    let mut group = c.benchmark_group("evaluation");
    group.sample_size(10);
    group.bench_function("score_dataset_32", |b| {
        b.iter(|| score_dataset(&ens, black_box(&samples)).unwrap())
    });
    group.finish();
}

criterion_group!(benches, submodel, training, featurize, evaluation);
criterion_main!(benches);
