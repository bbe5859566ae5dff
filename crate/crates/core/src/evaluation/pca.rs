use crate::error::{Error, Result};
use crate::featurizer::FEATURE_DIM;

pub const PCA_TOLERANCE: f64 = 1e-10;
pub const PCA_MAX_ITER: usize = 10_000;
pub const PCA_BINS: usize = 50;

/// First principal direction of a point cloud.
#[derive(Debug, Clone, PartialEq)]
pub struct Principal {
    /// Unit norm; the largest-magnitude loading is positive.
    pub component: [f64; FEATURE_DIM],
    pub mean: [f64; FEATURE_DIM],
    /// Variance along `component`.
    pub variance: f64,
}

impl Principal {
    pub fn project(&self, x: &[f64]) -> f64 {
        x.iter()
            .zip(&self.mean)
            .zip(&self.component)
            .map(|((x, m), c)| (x - m) * c)
            .sum()
    }
}

/// Power iteration on the covariance matrix. Degenerate data (zero
/// covariance) yields the first standard basis vector.
#[allow(clippy::needless_range_loop)]
pub fn first_component<'a, I>(vectors: I) -> Result<Principal>
where
    I: IntoIterator<Item = &'a [f64]> + Clone,
{
    let mut n = 0usize;
    let mut mean = [0.0; FEATURE_DIM];
    for v in vectors.clone() {
        for (m, x) in mean.iter_mut().zip(v) {
            *m += x;
        }
        n += 1;
    }
    if n < 2 {
        return Err(Error::Evaluation(format!("PCA needs at least 2 actions, got {n}")));
    }
    mean.iter_mut().for_each(|m| *m /= n as f64);

    let mut cov = [[0.0; FEATURE_DIM]; FEATURE_DIM];
    let mut d = [0.0; FEATURE_DIM];
    for v in vectors {
        for (di, (x, m)) in d.iter_mut().zip(v.iter().zip(&mean)) {
            *di = x - m;
        }
        for i in 0..FEATURE_DIM {
            if d[i] == 0.0 {
                continue;
            }
            for j in i..FEATURE_DIM {
                cov[i][j] += d[i] * d[j];
            }
        }
    }
    for i in 0..FEATURE_DIM {
        for j in i..FEATURE_DIM {
            cov[i][j] /= n as f64;
            cov[j][i] = cov[i][j];
        }
    }

    let mul = |v: &[f64; FEATURE_DIM]| -> [f64; FEATURE_DIM] {
        std::array::from_fn(|i| cov[i].iter().zip(v).map(|(c, x)| c * x).sum())
    };
    let norm = |v: &[f64; FEATURE_DIM]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let mut e1 = [0.0; FEATURE_DIM];
    e1[0] = 1.0;

    let trace: f64 = (0..FEATURE_DIM).map(|i| cov[i][i]).sum();
    if trace <= f64::MIN_POSITIVE {
        return Ok(Principal {
            component: e1,
            mean,
            variance: 0.0,
        });
    }

    // deterministic start, not orthogonal to any axis
    let mut v: [f64; FEATURE_DIM] = std::array::from_fn(|i| 1.0 + i as f64 / FEATURE_DIM as f64);
    let n0 = norm(&v);
    v.iter_mut().for_each(|x| *x /= n0);
    for _ in 0..PCA_MAX_ITER {
        let mut w = mul(&v);
        let nw = norm(&w);
        if nw <= f64::MIN_POSITIVE {
            // start vector fell in the null space; restart from the dominant diagonal axis
            let k = (0..FEATURE_DIM)
                .max_by(|&a, &b| cov[a][a].total_cmp(&cov[b][b]).then(b.cmp(&a)))
                .expect("non-empty");
            v = [0.0; FEATURE_DIM];
            v[k] = 1.0;
            continue;
        }
        w.iter_mut().for_each(|x| *x /= nw);
        let delta = w.iter().zip(&v).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        v = w;
        if delta < PCA_TOLERANCE {
            break;
        }
    }
    let lead = (0..FEATURE_DIM)
        .max_by(|&a, &b| v[a].abs().total_cmp(&v[b].abs()).then(b.cmp(&a)))
        .expect("non-empty");
    if v[lead] < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
    let cv = mul(&v);
    let variance = v.iter().zip(&cv).map(|(a, b)| a * b).sum();
    Ok(Principal {
        component: v,
        mean,
        variance,
    })
}

/// Winner and loser mean scores in one bin of the projected values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveBin {
    pub low: f64,
    pub high: f64,
    pub n_win: usize,
    pub n_lose: usize,
    pub mean_win: Option<f64>,
    pub mean_lose: Option<f64>,
}

/// Equal-width bins over `[min, max]` of the projections, and the mean of
/// `|mean_win - mean_lose|` over bins holding both groups.
pub fn binned_curves(records: &[(f64, f64, bool)], bins: usize) -> (Vec<CurveBin>, f64) {
    if records.is_empty() || bins == 0 {
        return (Vec::new(), 0.0);
    }
    let lo = records.iter().map(|r| r.0).fold(f64::INFINITY, f64::min);
    let hi = records.iter().map(|r| r.0).fold(f64::NEG_INFINITY, f64::max);
    let width = (hi - lo) / bins as f64;
    let mut sums = vec![(0usize, 0.0f64, 0usize, 0.0f64); bins];
    for &(p, score, win) in records {
        let b = if width > 0.0 {
            (((p - lo) / width) as usize).min(bins - 1)
        } else {
            0
        };
        let s = &mut sums[b];
        if win {
            s.0 += 1;
            s.1 += score;
        } else {
            s.2 += 1;
            s.3 += score;
        }
    }
    let curve: Vec<CurveBin> = sums
        .iter()
        .enumerate()
        .map(|(i, &(nw, sw, nl, sl))| CurveBin {
            low: lo + width * i as f64,
            high: if i + 1 == bins { hi } else { lo + width * (i + 1) as f64 },
            n_win: nw,
            n_lose: nl,
            mean_win: (nw > 0).then(|| sw / nw as f64),
            mean_lose: (nl > 0).then(|| sl / nl as f64),
        })
        .collect();
    let gaps: Vec<f64> = curve
        .iter()
        .filter_map(|b| Some((b.mean_win? - b.mean_lose?).abs()))
        .collect();
    let divergence = if gaps.is_empty() {
        0.0
    } else {
        gaps.iter().sum::<f64>() / gaps.len() as f64
    };
    (curve, divergence)
}
