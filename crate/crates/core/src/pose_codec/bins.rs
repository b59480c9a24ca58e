use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Largest residual produced by encoding; a value exactly at the upper range
/// bound lands in the last bin with this residual.
pub const RESIDUAL_CEILING: f64 = 1.0 - 1e-12;

/// Uniform bins `[start + k·size, start + (k+1)·size)` for `k < count`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BinSpec {
    pub start: f64,
    pub bin_size: f64,
    pub bin_count: u32,
}

impl BinSpec {
    pub fn new(start: f64, bin_size: f64, bin_count: u32) -> Result<Self> {
        let spec = Self {
            start,
            bin_size,
            bin_count,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.bin_size > 0.0 && self.bin_size.is_finite()) || !self.start.is_finite() {
            return Err(Error::Config(format!("bin size must be positive and finite: {self:?}")));
        }
        if self.bin_count == 0 {
            return Err(Error::Config("bin count must be at least 1".into()));
        }
        Ok(())
    }

    /// Upper bound of the covered range.
    pub fn end(&self) -> f64 {
        self.start + self.bin_count as f64 * self.bin_size
    }

    /// Same bins shifted by `offset`.
    pub fn shifted(&self, offset: f64) -> Self {
        Self {
            start: self.start + offset,
            ..*self
        }
    }
}

/// Bin class plus within-bin residual normalized by the bin size.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EncodedParam {
    pub bin_index: u32,
    pub residual: f64,
}

pub fn encode_param(value: f64, spec: &BinSpec) -> Result<EncodedParam> {
    spec.validate()?;
    let end = spec.end();
    if !value.is_finite() || value < spec.start || value > end {
        return Err(Error::Range {
            param: "value".into(),
            value,
            lo: spec.start,
            hi: end,
        });
    }
    let last = spec.bin_count - 1;
    if value == end {
        return Ok(EncodedParam {
            bin_index: last,
            residual: RESIDUAL_CEILING,
        });
    }
    let offset = value - spec.start;
    let bin = ((offset / spec.bin_size).floor().max(0.0) as u64).min(last as u64) as u32;
    let residual = ((offset - bin as f64 * spec.bin_size) / spec.bin_size).clamp(0.0, RESIDUAL_CEILING);
    Ok(EncodedParam {
        bin_index: bin,
        residual,
    })
}

pub fn decode_param(enc: &EncodedParam, spec: &BinSpec) -> Result<f64> {
    spec.validate()?;
    if enc.bin_index >= spec.bin_count {
        return Err(Error::Validation(format!(
            "bin index {} outside 0..{}",
            enc.bin_index, spec.bin_count
        )));
    }
    if !(0.0..1.0).contains(&enc.residual) {
        return Err(Error::Validation(format!("residual {} outside [0, 1)", enc.residual)));
    }
    Ok(spec.start + (enc.bin_index as f64 + enc.residual) * spec.bin_size)
}
