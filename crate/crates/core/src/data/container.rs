//! `DDRK` binary tensor container.
//!
//! Layout, all little-endian:
//!
//! ```text
//! magic "DDRK" | version u8 | dtype u8 | rank u8 | dims u64 × rank | payload
//! ```
//!
//! The payload is row-major with no padding. Dtype codes: 1 = f32, 2 = u32.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, FormatError, Result};
use crate::tensor::Tensor;

pub const MAGIC: &[u8; 4] = b"DDRK";
pub const VERSION: u8 = 1;

#[derive(Debug, Clone, PartialEq)]
pub enum Payload {
    F32(Vec<f32>),
    U32(Vec<u32>),
}

impl Payload {
    fn code(&self) -> u8 {
        match self {
            Payload::F32(_) => 1,
            Payload::U32(_) => 2,
        }
    }

    fn len(&self) -> usize {
        match self {
            Payload::F32(v) => v.len(),
            Payload::U32(v) => v.len(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RawTensor {
    pub dims: Vec<usize>,
    pub payload: Payload,
}

impl RawTensor {
    pub fn f32(t: &Tensor) -> Self {
        Self {
            dims: t.shape().to_vec(),
            payload: Payload::F32(t.data().to_vec()),
        }
    }

    pub fn u32(values: Vec<u32>) -> Self {
        Self {
            dims: vec![values.len()],
            payload: Payload::U32(values),
        }
    }

    pub fn into_tensor(self) -> Result<Tensor> {
        match self.payload {
            Payload::F32(v) => Tensor::new(self.dims, v),
            Payload::U32(_) => {
                Err(FormatError::ShapeMismatch("expected f32 payload, found u32".into()).into())
            }
        }
    }

    pub fn into_u32(self) -> Result<Vec<u32>> {
        match self.payload {
            Payload::U32(v) if self.dims.len() == 1 => Ok(v),
            Payload::U32(_) => Err(FormatError::ShapeMismatch(format!(
                "expected rank-1 u32 tensor, found dims {:?}",
                self.dims
            ))
            .into()),
            Payload::F32(_) => {
                Err(FormatError::ShapeMismatch("expected u32 payload, found f32".into()).into())
            }
        }
    }
}

pub fn encode(t: &RawTensor) -> Result<Vec<u8>> {
    if t.dims.iter().product::<usize>() != t.payload.len() {
        return Err(FormatError::ShapeMismatch(format!(
            "dims {:?} disagree with {} payload elements",
            t.dims,
            t.payload.len()
        ))
        .into());
    }
    let rank = u8::try_from(t.dims.len())
        .map_err(|_| Error::Validation(format!("rank {} exceeds 255", t.dims.len())))?;
    let mut out = Vec::with_capacity(7 + 8 * t.dims.len() + 4 * t.payload.len());
    out.extend_from_slice(MAGIC);
    out.push(VERSION);
    out.push(t.payload.code());
    out.push(rank);
    for &d in &t.dims {
        out.extend_from_slice(&(d as u64).to_le_bytes());
    }
    match &t.payload {
        Payload::F32(v) => v
            .iter()
            .for_each(|x| out.extend_from_slice(&x.to_le_bytes())),
        Payload::U32(v) => v
            .iter()
            .for_each(|x| out.extend_from_slice(&x.to_le_bytes())),
    }
    Ok(out)
}

fn take<'a>(buf: &'a [u8], at: &mut usize, n: usize, section: &'static str) -> Result<&'a [u8]> {
    let rest = buf.len().saturating_sub(*at);
    if rest < n {
        return Err(FormatError::Truncated {
            section,
            expected: n,
            found: rest,
        }
        .into());
    }
    let s = &buf[*at..*at + n];
    *at += n;
    Ok(s)
}

pub fn decode(buf: &[u8]) -> Result<RawTensor> {
    let mut at = 0;
    let magic = take(buf, &mut at, 4, "magic")?;
    if magic != MAGIC {
        return Err(FormatError::BadMagic {
            found: magic.try_into().unwrap(),
        }
        .into());
    }
    let head = take(buf, &mut at, 3, "header")?;
    let (version, dtype, rank) = (head[0], head[1], head[2] as usize);
    if version != VERSION {
        return Err(FormatError::UnsupportedVersion(version).into());
    }
    if !matches!(dtype, 1 | 2) {
        return Err(FormatError::UnknownDtype(dtype).into());
    }
    let dims_raw = take(buf, &mut at, 8 * rank, "dims")?;
    let dims: Vec<usize> = dims_raw
        .chunks_exact(8)
        .map(|c| u64::from_le_bytes(c.try_into().unwrap()) as usize)
        .collect();
    let count = dims
        .iter()
        .try_fold(1usize, |acc, &d| acc.checked_mul(d))
        .ok_or_else(|| FormatError::ShapeMismatch(format!("dims {dims:?} overflow")))?;
    let bytes = count
        .checked_mul(4)
        .ok_or_else(|| FormatError::ShapeMismatch(format!("dims {dims:?} overflow")))?;
    let body = take(buf, &mut at, bytes, "payload")?;
    if at != buf.len() {
        return Err(FormatError::TrailingBytes(buf.len() - at).into());
    }
    let words = body
        .chunks_exact(4)
        .map(|c| <[u8; 4]>::try_from(c).unwrap());
    let payload = match dtype {
        1 => Payload::F32(words.map(f32::from_le_bytes).collect()),
        _ => Payload::U32(words.map(u32::from_le_bytes).collect()),
    };
    Ok(RawTensor { dims, payload })
}

pub fn write(path: &Path, t: &RawTensor) -> Result<()> {
    let bytes = encode(t)?;
    write_atomic(path, &bytes)
}

pub fn read(path: &Path) -> Result<RawTensor> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode(&bytes)
}

/// Writes through a sibling temp file and renames it into place.
pub(crate) fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = path.with_extension(format!(
        "{}.tmp",
        path.extension().and_then(|e| e.to_str()).unwrap_or("")
    ));
    let mut f = fs::File::create(&tmp).map_err(|e| Error::io(&tmp, e))?;
    f.write_all(bytes).map_err(|e| Error::io(&tmp, e))?;
    f.sync_all().map_err(|e| Error::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}
