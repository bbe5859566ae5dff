//! Flat `key = value` run configuration.
//!
//! ```text
//! # comments and blank lines are ignored
//! seed = 7
//! variant = 1
//! lr = 0.0001
//! split = 0.76, 0.04, 0.20
//! out = runs/first
//! ```

use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::{Hyperparameters, VariantConfig};
use crate::synth::GenConfig;

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub seed: u64,
    pub variant: u8,
    pub epochs: u32,
    pub lr: f64,
    /// Train, validation and test fractions.
    pub split: [f64; 3],
    pub n_matches: usize,
    pub events_min: usize,
    pub events_max: usize,
    pub label_flip: f64,
    pub skill_spread: f64,
    pub quality_noise: f64,
    /// Rank gap beyond which a player counts as misestimated.
    pub threshold: usize,
    pub out: Option<PathBuf>,
    pub dataset: Option<PathBuf>,
    pub checkpoint: Option<PathBuf>,
    pub matches: Option<PathBuf>,
    pub role_table: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let gen = GenConfig::default();
        let hyper = Hyperparameters::default();
        Self {
            seed: 0,
            variant: 1,
            epochs: hyper.epochs,
            lr: hyper.lr,
            split: [0.76, 0.04, 0.20],
            n_matches: gen.n_matches,
            events_min: gen.events_per_player.0,
            events_max: gen.events_per_player.1,
            label_flip: gen.label_flip_probability,
            skill_spread: gen.skill_spread,
            quality_noise: gen.quality_noise,
            threshold: 5,
            out: None,
            dataset: None,
            checkpoint: None,
            matches: None,
            role_table: None,
        }
    }
}

pub const KEYS: [&str; 17] = [
    "seed",
    "variant",
    "epochs",
    "lr",
    "split",
    "n_matches",
    "events_min",
    "events_max",
    "label_flip",
    "skill_spread",
    "quality_noise",
    "threshold",
    "out",
    "dataset",
    "checkpoint",
    "matches",
    "role_table",
];

fn value<T: std::str::FromStr>(key: &str, raw: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    raw.parse()
        .map_err(|e| Error::Config(format!("{key}: cannot parse {raw:?}: {e}")))
}

impl RunConfig {
    /// Parses config text on top of the defaults. Relative paths are resolved
    /// against `base`.
    pub fn parse(text: &str, base: &Path) -> Result<Self> {
        let mut cfg = Self::default();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, raw) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", n + 1)))?;
            let (key, raw) = (key.trim(), raw.trim());
            cfg.set(key, raw).map_err(|e| {
                Error::Config(format!(
                    "line {}: {}",
                    n + 1,
                    e.to_string().trim_start_matches("config: ")
                ))
            })?;
        }
        cfg.resolve_paths(base);
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, path.parent().unwrap_or(Path::new(".")))
    }

    pub fn set(&mut self, key: &str, raw: &str) -> Result<()> {
        let path = || Some(PathBuf::from(raw));
        match key {
            "seed" => self.seed = value(key, raw)?,
            "variant" => self.variant = value(key, raw)?,
            "epochs" => self.epochs = value(key, raw)?,
            "lr" => self.lr = value(key, raw)?,
            "split" => {
                let parts: Vec<f64> = raw.split(',').map(|p| value(key, p.trim())).collect::<Result<_>>()?;
                self.split = parts
                    .try_into()
                    .map_err(|_| Error::Config("split: expected three comma-separated fractions".into()))?;
            }
            "n_matches" => self.n_matches = value(key, raw)?,
            "events_min" => self.events_min = value(key, raw)?,
            "events_max" => self.events_max = value(key, raw)?,
            "label_flip" => self.label_flip = value(key, raw)?,
            "skill_spread" => self.skill_spread = value(key, raw)?,
            "quality_noise" => self.quality_noise = value(key, raw)?,
            "threshold" => self.threshold = value(key, raw)?,
            "out" => self.out = path(),
            "dataset" => self.dataset = path(),
            "checkpoint" => self.checkpoint = path(),
            "matches" => self.matches = path(),
            "role_table" => self.role_table = path(),
            other => return Err(Error::Config(format!("unknown key {other:?}"))),
        }
        Ok(())
    }

    pub fn resolve_paths(&mut self, base: &Path) {
        for p in [
            &mut self.out,
            &mut self.dataset,
            &mut self.checkpoint,
            &mut self.matches,
            &mut self.role_table,
        ]
        .into_iter()
        .flatten()
        {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        VariantConfig::from_id(self.variant)?;
        if !(self.lr.is_finite() && self.lr > 0.0) {
            return Err(Error::Config(format!("lr must be > 0, got {}", self.lr)));
        }
        if self.split.iter().any(|f| !(f.is_finite() && *f >= 0.0))
            || (self.split.iter().sum::<f64>() - 1.0).abs() > 1e-9
        {
            return Err(Error::Config(format!(
                "split fractions must be >= 0 and sum to 1, got {:?}",
                self.split
            )));
        }
        if self.split[0] == 0.0 || self.split[1] == 0.0 {
            return Err(Error::Config("train and validation fractions must be > 0".into()));
        }
        self.gen_config().validate()
    }

    pub fn hyperparameters(&self) -> Hyperparameters {
        Hyperparameters {
            lr: self.lr,
            epochs: self.epochs,
            ..Hyperparameters::default()
        }
    }

    pub fn gen_config(&self) -> GenConfig {
        GenConfig {
            seed: self.seed,
            n_matches: self.n_matches,
            events_per_player: (self.events_min, self.events_max),
            label_flip_probability: self.label_flip,
            skill_spread: self.skill_spread,
            quality_noise: self.quality_noise,
            ..GenConfig::default()
        }
    }

    /// Sizes of the train, validation and test parts of `n` matches.
    /// Train and validation get at least one match each; the test part takes the rest.
    pub fn split_sizes(&self, n: usize) -> Result<[usize; 3]> {
        let train = ((n as f64 * self.split[0]).round() as usize).max(1);
        let val = ((n as f64 * self.split[1]).round() as usize).max(1);
        if train + val > n {
            return Err(Error::Config(format!(
                "dataset of {n} matches is too small to split into train/validation/test"
            )));
        }
        let test = n - train - val;
        if self.split[2] > 0.0 && test == 0 {
            return Err(Error::Config(format!(
                "dataset of {n} matches is too small to split into train/validation/test"
            )));
        }
        Ok([train, val, test])
    }

    /// Seeded shuffle of `0..n` cut into train, validation and test index lists.
    pub fn split_indices(&self, n: usize) -> Result<[Vec<usize>; 3]> {
        let [train, val, _] = self.split_sizes(n)?;
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(self.seed));
        let test = order.split_off(train + val);
        let val = order.split_off(train);
        Ok([order, val, test])
    }
}
