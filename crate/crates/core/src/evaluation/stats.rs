use std::cmp::Ordering;

use crate::match_data::PLAYERS_PER_MATCH;

/// Rank 1 = highest value; equal values are ordered by participant slot.
pub fn rank_players(values: &[f64; PLAYERS_PER_MATCH]) -> [usize; PLAYERS_PER_MATCH] {
    let mut idx: [usize; PLAYERS_PER_MATCH] = std::array::from_fn(|i| i);
    idx.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
    let mut ranks = [0; PLAYERS_PER_MATCH];
    for (r, &i) in idx.iter().enumerate() {
        ranks[i] = r + 1;
    }
    ranks
}

/// Pearson correlation; 0 when either side is constant.
pub fn pearson(x: &[f64], y: &[f64]) -> f64 {
    assert_eq!(x.len(), y.len(), "paired samples");
    let n = x.len() as f64;
    if x.is_empty() {
        return 0.0;
    }
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return 0.0;
    }
    (sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0)
}

/// Ranks starting at 1 with ties given their average rank.
pub fn average_ranks(x: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..x.len()).collect();
    idx.sort_by(|&a, &b| x[a].partial_cmp(&x[b]).unwrap_or(Ordering::Equal).then(a.cmp(&b)));
    let mut ranks = vec![0.0; x.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && x[idx[j + 1]] == x[idx[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            ranks[k] = avg;
        }
        i = j + 1;
    }
    ranks
}

/// Spearman rank correlation with average ranks for ties.
pub fn spearman(x: &[f64], y: &[f64]) -> f64 {
    pearson(&average_ranks(x), &average_ranks(y))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rank_examples() {
        let v = [3.0, 9.0, 1.0, 7.0, 5.0, 0.0, 2.0, 8.0, 6.0, 4.0];
        assert_eq!(rank_players(&v), [7, 1, 9, 3, 5, 10, 8, 2, 4, 6]);
        assert_eq!(rank_players(&[0.5; 10]), [1, 2, 3, 4, 5, 6, 7, 8, 9, 10]);
    }

    #[test]
    fn correlation_extremes_are_exact() {
        let r: Vec<f64> = (1..=10).map(f64::from).collect();
        let rev: Vec<f64> = r.iter().map(|v| 11.0 - v).collect();
        assert_eq!(pearson(&r, &r), 1.0);
        assert_eq!(pearson(&r, &rev), -1.0);
        assert_eq!(pearson(&r, &[2.0; 10]), 0.0);
    }

    #[test]
    fn average_ranks_share_ties() {
        assert_eq!(average_ranks(&[10.0, 20.0, 10.0, 5.0]), vec![2.5, 4.0, 2.5, 1.0]);
        assert_eq!(spearman(&[1.0, 2.0, 3.0], &[10.0, 100.0, 1000.0]), 1.0);
    }

    proptest! {
        #[test]
        fn ranks_are_a_permutation_invariant_to_scaling(
            v in proptest::array::uniform10(-100.0..100.0f64),
            alpha in 0.01..100.0f64,
        ) {
            let r = rank_players(&v);
            let mut sorted = r;
            sorted.sort();
            prop_assert_eq!(sorted, [1, 2, 3, 4, 5, 6, 7, 8, 9, 10]);
            let scaled = v.map(|x| x * alpha);
            prop_assert_eq!(rank_players(&scaled), r);
        }
    }
}
