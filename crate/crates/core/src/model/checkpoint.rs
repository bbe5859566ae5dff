//! Binary checkpoint, little-endian.
//!
//! ```text
//! "A2S1" | version u32 | variant u8 | hidden u16 | layers u16 | block count u32
//! block*: name_len u16 | name bytes | rows u32 | cols u32 | rows*cols f64
//! ```
//!
//! Blocks are `meta.lr`, `meta.epochs`, then every submodel parameter as
//! `sub{slot}.{name}` in slot order and the fixed parameter visiting order.

use std::path::Path;

use super::ensemble::{Ensemble, Hyperparameters};
use super::submodel::SubModel;
use super::variant::VariantConfig;
use crate::error::{Error, Result};
use crate::match_data::PLAYERS_PER_MATCH;
use crate::neural::{Matrix, Parameters};

pub const MAGIC: &[u8; 4] = b"A2S1";
pub const FORMAT_VERSION: u32 = 1;

struct Block {
    name: String,
    rows: u32,
    cols: u32,
    data: Vec<f64>,
}

fn push_block(out: &mut Vec<u8>, name: &str, m: &Matrix) {
    out.extend_from_slice(&(name.len() as u16).to_le_bytes());
    out.extend_from_slice(name.as_bytes());
    out.extend_from_slice(&(m.rows() as u32).to_le_bytes());
    out.extend_from_slice(&(m.cols() as u32).to_le_bytes());
    for v in m.data() {
        out.extend_from_slice(&v.to_le_bytes());
    }
}

pub fn to_bytes(ens: &Ensemble) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    out.push(ens.variant.id);
    out.extend_from_slice(&(ens.hyper.hidden as u16).to_le_bytes());
    out.extend_from_slice(&(ens.hyper.layers as u16).to_le_bytes());
    let per_sub = ens.subs[0].names().len();
    out.extend_from_slice(&((2 + per_sub * ens.subs.len()) as u32).to_le_bytes());
    push_block(&mut out, "meta.lr", &Matrix::filled(1, 1, ens.hyper.lr));
    push_block(&mut out, "meta.epochs", &Matrix::filled(1, 1, ens.hyper.epochs as f64));
    for (k, sub) in ens.subs.iter().enumerate() {
        sub.visit(&mut |name, m| push_block(&mut out, &format!("sub{k}.{name}"), m));
    }
    out
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize, what: &str) -> Result<&'a [u8]> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&e| e <= self.bytes.len())
            .ok_or_else(|| Error::Checkpoint(format!("truncated while reading {what} at byte {}", self.pos)))?;
        let s = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u8(&mut self, what: &str) -> Result<u8> {
        Ok(self.take(1, what)?[0])
    }

    fn u16(&mut self, what: &str) -> Result<u16> {
        Ok(u16::from_le_bytes(self.take(2, what)?.try_into().expect("two bytes")))
    }

    fn u32(&mut self, what: &str) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4, what)?.try_into().expect("four bytes")))
    }

    fn block(&mut self) -> Result<Block> {
        let len = self.u16("block name length")? as usize;
        let name = std::str::from_utf8(self.take(len, "block name")?)
            .map_err(|_| Error::Checkpoint("block name is not UTF-8".into()))?
            .to_string();
        let rows = self.u32("block rows")?;
        let cols = self.u32("block cols")?;
        let n = (rows as usize)
            .checked_mul(cols as usize)
            .ok_or_else(|| Error::Checkpoint(format!("block {name} is too large")))?;
        let raw = self.take(n.saturating_mul(8), &format!("data of block {name}"))?;
        let data = raw
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("eight bytes")))
            .collect();
        Ok(Block { name, rows, cols, data })
    }
}

fn scalar(block: &Block, expect: &str) -> Result<f64> {
    if block.name != expect || (block.rows, block.cols) != (1, 1) {
        return Err(Error::Checkpoint(format!(
            "expected 1x1 block {expect}, found {}",
            block.name
        )));
    }
    Ok(block.data[0])
}

pub fn from_bytes(bytes: &[u8]) -> Result<Ensemble> {
    let mut r = Reader { bytes, pos: 0 };
    if r.take(4, "magic")? != MAGIC {
        return Err(Error::Checkpoint("bad magic bytes".into()));
    }
    let version = r.u32("format version")?;
    if version != FORMAT_VERSION {
        return Err(Error::Checkpoint(format!(
            "format version {version} is not supported (expected {FORMAT_VERSION})"
        )));
    }
    let variant = VariantConfig::from_id(r.u8("variant")?).map_err(|e| Error::Checkpoint(e.to_string()))?;
    let hidden = r.u16("hidden size")? as usize;
    let layers = r.u16("layer count")? as usize;
    let count = r.u32("block count")? as usize;

    let template = SubModel::zeros(variant.encoder);
    let names = template.names();
    if count != 2 + names.len() * PLAYERS_PER_MATCH {
        return Err(Error::Checkpoint(format!("{count} blocks do not fit {variant}")));
    }
    let lr = scalar(&r.block()?, "meta.lr")?;
    let epochs = scalar(&r.block()?, "meta.epochs")?;
    if !(epochs >= 0.0 && epochs.fract() == 0.0 && epochs <= u32::MAX as f64) {
        return Err(Error::Checkpoint(format!("meta.epochs = {epochs} is not a count")));
    }
    let hyper = Hyperparameters {
        lr,
        epochs: epochs as u32,
        hidden,
        layers,
    };

    let mut subs = Vec::with_capacity(PLAYERS_PER_MATCH);
    for k in 0..PLAYERS_PER_MATCH {
        let mut sub = template.clone();
        let mut err = None;
        let mut blocks = Vec::with_capacity(names.len());
        for _ in 0..names.len() {
            blocks.push(r.block()?);
        }
        let mut it = blocks.into_iter();
        sub.visit_mut(&mut |name, m| {
            let b = it.next().expect("one block per parameter");
            let expect = format!("sub{k}.{name}");
            if err.is_some() {
                return;
            }
            if b.name != expect {
                err = Some(format!("expected block {expect}, found {}", b.name));
            } else if (b.rows as usize, b.cols as usize) != m.shape() {
                err = Some(format!(
                    "block {expect} is {}x{}, expected {:?}",
                    b.rows,
                    b.cols,
                    m.shape()
                ));
            } else if b.data.iter().any(|v| !v.is_finite()) {
                err = Some(format!("block {expect} holds non-finite values"));
            } else {
                m.data_mut().copy_from_slice(&b.data);
            }
        });
        if let Some(e) = err {
            return Err(Error::Checkpoint(e));
        }
        subs.push(sub);
    }
    if r.pos != bytes.len() {
        return Err(Error::Checkpoint(format!("{} trailing bytes", bytes.len() - r.pos)));
    }
    Ensemble::from_submodels(variant, hyper, subs).map_err(|e| Error::Checkpoint(e.to_string()))
}

pub fn save_checkpoint(ens: &Ensemble, path: &Path) -> Result<()> {
    std::fs::write(path, to_bytes(ens)).map_err(|e| Error::io(path, e))
}

pub fn load_checkpoint(path: &Path) -> Result<Ensemble> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    from_bytes(&bytes)
}
