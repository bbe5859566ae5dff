//! Fixtures shared by the benchmarks.

use playscore::synth::{generate, GenConfig, LabeledDataset};
use playscore::ActionVector;

/// Deterministic synthetic corpus of `n` matches.
pub fn corpus(n: usize, events_per_player: (usize, usize)) -> LabeledDataset {
    generate(&GenConfig {
        seed: 0xbe9c,
        n_matches: n,
        events_per_player,
        ..GenConfig::default()
    })
    .expect("valid generator config")
}

/// The first `len` actions of one player, cycling through the corpus if needed.
pub fn sequence(data: &LabeledDataset, len: usize) -> Vec<ActionVector> {
    data.matches
        .iter()
        .flat_map(|m| m.sample.sequences.iter().flat_map(|s| s.actions.iter().copied()))
        .cycle()
        .take(len)
        .collect()
}
