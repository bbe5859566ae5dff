//! Line-delimited featurized dataset: one JSON object per match.
//!
//! ```text
//! {"match_id":"m1","winner":"blue","lanes":["Top",...],
//!  "baselines":[{"kills":1,"deaths":0,"assists":2,"gold":9100,"creep":180},...],
//!  "sequences":[[[30 numbers],...],...]}
//! ```
//!
//! Floats are written with nine significant digits, so a written file reads
//! back and re-writes to identical bytes.

use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::Deserialize;

use super::{ActionVector, BaselineStats, MatchSample, PlayerSequence, FEATURE_DIM};
use crate::error::{Error, Result};
use crate::match_data::{Lane, ParticipantId, Team, PLAYERS_PER_MATCH};

/// Shortest decimal that equals `x` rounded to nine significant digits.
pub fn format_sig9(x: f64) -> String {
    assert!(x.is_finite(), "non-finite value {x} in featurized output");
    if x == 0.0 {
        return "0".to_string();
    }
    let rounded: f64 = format!("{x:.8e}").parse().expect("formatted float parses");
    format!("{rounded}")
}

impl MatchSample {
    pub fn to_record_line(&self) -> String {
        let mut s = String::with_capacity(64 + self.action_count() * 80);
        s.push_str("{\"match_id\":");
        s.push_str(&serde_json::to_string(&self.match_id).expect("string serializes"));
        let _ = write!(s, ",\"winner\":\"{}\",\"lanes\":[", self.winner);
        for (i, lane) in self.lanes.iter().enumerate() {
            if i > 0 {
                s.push(',');
            }
            let _ = write!(s, "\"{lane}\"");
        }
        s.push_str("],\"baselines\":[");
        for (i, b) in self.baselines.iter().enumerate() {
            if i > 0 {
                s.push(',');
            }
            let _ = write!(
                s,
                "{{\"kills\":{},\"deaths\":{},\"assists\":{},\"gold\":{},\"creep\":{}}}",
                b.kills,
                b.deaths,
                b.assists,
                format_sig9(b.gold),
                format_sig9(b.creep)
            );
        }
        s.push_str("],\"sequences\":[");
        for (i, seq) in self.sequences.iter().enumerate() {
            if i > 0 {
                s.push(',');
            }
            s.push('[');
            for (j, action) in seq.actions.iter().enumerate() {
                if j > 0 {
                    s.push(',');
                }
                s.push('[');
                for (k, v) in action.0.iter().enumerate() {
                    if k > 0 {
                        s.push(',');
                    }
                    s.push_str(&format_sig9(*v));
                }
                s.push(']');
            }
            s.push(']');
        }
        s.push_str("]}");
        s
    }

    pub fn from_record_line(line: &str) -> Result<Self> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Raw {
            match_id: String,
            winner: Team,
            lanes: Vec<Lane>,
            baselines: Vec<BaselineStats>,
            sequences: Vec<Vec<Vec<f64>>>,
        }
        let raw: Raw = serde_json::from_str(line).map_err(|e| Error::Record(e.to_string()))?;
        let lanes: [Lane; PLAYERS_PER_MATCH] = raw
            .lanes
            .try_into()
            .map_err(|v: Vec<Lane>| Error::Record(format!("expected 10 lanes, got {}", v.len())))?;
        let baselines: [BaselineStats; PLAYERS_PER_MATCH] = raw
            .baselines
            .try_into()
            .map_err(|v: Vec<BaselineStats>| Error::Record(format!("expected 10 baseline entries, got {}", v.len())))?;
        if raw.sequences.len() != PLAYERS_PER_MATCH {
            return Err(Error::Record(format!(
                "expected 10 sequences, got {}",
                raw.sequences.len()
            )));
        }
        let sequences = raw
            .sequences
            .into_iter()
            .enumerate()
            .map(|(i, actions)| {
                let actions = actions
                    .into_iter()
                    .map(|a| {
                        let arr: [f64; FEATURE_DIM] = a
                            .try_into()
                            .map_err(|a: Vec<f64>| Error::Record(format!("action vector of length {}", a.len())))?;
                        Ok(ActionVector(arr))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(PlayerSequence {
                    participant: ParticipantId::from_index(i),
                    actions,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(MatchSample {
            match_id: raw.match_id,
            winner: raw.winner,
            lanes,
            sequences,
            baselines,
        })
    }
}

pub fn write_dataset(path: &Path, samples: &[MatchSample]) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    for sample in samples {
        writeln!(w, "{}", sample.to_record_line()).map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_dataset(path: &Path) -> Result<Vec<MatchSample>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut out = Vec::new();
    for (n, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let sample = MatchSample::from_record_line(&line)
            .map_err(|e| Error::Record(format!("{}:{}: {e}", path.display(), n + 1)))?;
        out.push(sample);
    }
    Ok(out)
}
