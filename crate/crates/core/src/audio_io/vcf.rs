use std::fs;
use std::path::Path;

use ndarray::Array2;

use crate::{Error, Result};

pub const FEATURE_MAGIC: [u8; 8] = *b"VCFEAT01";
const HEADER_LEN: usize = 8 + 4 + 4 + 4 + 4;

/// A frame-by-dimension feature matrix with its analysis metadata.
///
/// On disk: 8 bytes magic `VCFEAT01`, then little-endian `u32` frame count,
/// `u32` dim, `f32` frame shift in ms, `u32` sample rate, followed by
/// `frame_count * dim` little-endian `f32` values in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureFile {
    pub frame_shift_ms: f32,
    pub sample_rate_hz: u32,
    pub data: Array2<f32>,
}

impl FeatureFile {
    pub fn frame_count(&self) -> usize {
        self.data.nrows()
    }

    pub fn dim(&self) -> usize {
        self.data.ncols()
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(HEADER_LEN + self.data.len() * 4);
        out.extend_from_slice(&FEATURE_MAGIC);
        out.extend_from_slice(&(self.frame_count() as u32).to_le_bytes());
        out.extend_from_slice(&(self.dim() as u32).to_le_bytes());
        out.extend_from_slice(&self.frame_shift_ms.to_le_bytes());
        out.extend_from_slice(&self.sample_rate_hz.to_le_bytes());
        // iter() walks in logical (row-major) order regardless of memory layout
        for v in self.data.iter() {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < 8 {
            return Err(Error::TruncatedFile {
                expected: HEADER_LEN,
                found: bytes.len(),
            });
        }
        let mut magic = [0u8; 8];
        magic.copy_from_slice(&bytes[..8]);
        if magic != FEATURE_MAGIC {
            return Err(Error::BadMagic(magic));
        }
        if bytes.len() < HEADER_LEN {
            return Err(Error::TruncatedFile {
                expected: HEADER_LEN,
                found: bytes.len(),
            });
        }
        let word = |at: usize| [bytes[at], bytes[at + 1], bytes[at + 2], bytes[at + 3]];
        let frames = u32::from_le_bytes(word(8)) as usize;
        let dim = u32::from_le_bytes(word(12)) as usize;
        let frame_shift_ms = f32::from_le_bytes(word(16));
        let sample_rate_hz = u32::from_le_bytes(word(20));
        if dim == 0 {
            return Err(Error::DimMismatch {
                what: "feature file dim (must be positive)",
                left: dim,
                right: 1,
            });
        }
        let expected = frames
            .checked_mul(dim)
            .and_then(|n| n.checked_mul(4))
            .and_then(|n| n.checked_add(HEADER_LEN))
            .ok_or_else(|| Error::InvalidArgument("feature file header overflows".into()))?;
        if bytes.len() < expected {
            return Err(Error::TruncatedFile {
                expected,
                found: bytes.len(),
            });
        }
        if bytes.len() > expected {
            return Err(Error::DimMismatch {
                what: "feature file size vs header frame_count*dim",
                left: bytes.len(),
                right: expected,
            });
        }
        let values = bytes[HEADER_LEN..]
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]))
            .collect();
        let data = Array2::from_shape_vec((frames, dim), values).expect("length checked against header");
        Ok(Self {
            frame_shift_ms,
            sample_rate_hz,
            data,
        })
    }
}

pub fn write_features(f: &FeatureFile, path: impl AsRef<Path>) -> Result<()> {
    if f.dim() == 0 {
        return Err(Error::DimMismatch {
            what: "feature file dim (must be positive)",
            left: 0,
            right: 1,
        });
    }
    fs::write(path, f.to_bytes())?;
    Ok(())
}

pub fn read_features(path: impl AsRef<Path>) -> Result<FeatureFile> {
    FeatureFile::from_bytes(&fs::read(path)?)
}
