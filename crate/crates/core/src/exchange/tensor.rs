use std::fs::File;
use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};

pub const TXA_MAGIC: [u8; 4] = *b"TXA1";
pub const TXA_VERSION: u32 = 1;

const MAX_DIMS: usize = 4;

/// Dense row-major array of `f32` with 1 to 4 dimensions.
///
/// Construction validates the shape against the data length and rejects
/// non-finite values, so every `Tensor` in the engine is well-formed.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor {
    shape: Vec<usize>,
    data: Vec<f32>,
}

impl Tensor {
    pub fn new(shape: Vec<usize>, data: Vec<f32>) -> Result<Self> {
        if shape.is_empty() || shape.len() > MAX_DIMS {
            return Err(Error::Validation(format!(
                "tensor must have 1 to {MAX_DIMS} dimensions, got {}",
                shape.len()
            )));
        }
        if let Some(axis) = shape.iter().position(|&e| e == 0) {
            return Err(Error::Validation(format!("extent of axis {axis} is zero")));
        }
        let expected = shape
            .iter()
            .try_fold(1usize, |acc, &e| acc.checked_mul(e))
            .ok_or_else(|| Error::Validation(format!("shape {shape:?} overflows")))?;
        if expected != data.len() {
            return Err(Error::Validation(format!(
                "shape {shape:?} needs {expected} values, got {}",
                data.len()
            )));
        }
        if let Some(idx) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::Validation(format!(
                "non-finite value {} at flat index {idx}",
                data[idx]
            )));
        }
        Ok(Tensor { shape, data })
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn data(&self) -> &[f32] {
        &self.data
    }

    pub fn into_data(self) -> Vec<f32> {
        self.data
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    /// Bit-level equality, distinguishing `0.0` from `-0.0`.
    pub fn bit_eq(&self, other: &Tensor) -> bool {
        self.shape == other.shape
            && self.data.len() == other.data.len()
            && self
                .data
                .iter()
                .zip(&other.data)
                .all(|(a, b)| a.to_bits() == b.to_bits())
    }
}

pub fn write_tensor<W: Write>(t: &Tensor, mut sink: W) -> io::Result<()> {
    let mut header = Vec::with_capacity(12 + 4 * t.shape.len());
    header.extend_from_slice(&TXA_MAGIC);
    header.extend_from_slice(&TXA_VERSION.to_le_bytes());
    header.extend_from_slice(&(t.shape.len() as u32).to_le_bytes());
    for &extent in &t.shape {
        let extent = u32::try_from(extent).map_err(|_| {
            io::Error::new(
                io::ErrorKind::InvalidInput,
                format!("extent {extent} does not fit the 32-bit header field"),
            )
        })?;
        header.extend_from_slice(&extent.to_le_bytes());
    }
    sink.write_all(&header)?;
    let mut payload = Vec::with_capacity(4 * t.data.len());
    for v in &t.data {
        payload.extend_from_slice(&v.to_le_bytes());
    }
    sink.write_all(&payload)?;
    sink.flush()
}

fn read_u32<R: Read>(source: &mut R, what: &str) -> Result<u32> {
    let mut buf = [0u8; 4];
    source.read_exact(&mut buf).map_err(|e| match e.kind() {
        io::ErrorKind::UnexpectedEof => Error::Corruption(format!("header truncated in {what}")),
        _ => Error::io("<stream>", e),
    })?;
    Ok(u32::from_le_bytes(buf))
}

pub fn read_tensor<R: Read>(mut source: R) -> Result<Tensor> {
    let mut magic = [0u8; 4];
    match source.read_exact(&mut magic) {
        Ok(()) => {}
        Err(e) if e.kind() == io::ErrorKind::UnexpectedEof => {
            return Err(Error::Format("file shorter than the magic bytes".into()))
        }
        Err(e) => return Err(Error::io("<stream>", e)),
    }
    if magic != TXA_MAGIC {
        return Err(Error::Format(format!("bad magic {magic:02x?}, expected \"TXA1\"")));
    }
    let version = read_u32(&mut source, "version")?;
    if version != TXA_VERSION {
        return Err(Error::Format(format!("unsupported format version {version}")));
    }
    let ndim = read_u32(&mut source, "dimension count")? as usize;
    if ndim == 0 || ndim > MAX_DIMS {
        return Err(Error::Corruption(format!("dimension count {ndim} outside 1..={MAX_DIMS}")));
    }
    let mut shape = Vec::with_capacity(ndim);
    for axis in 0..ndim {
        let extent = read_u32(&mut source, "extents")? as usize;
        if extent == 0 {
            return Err(Error::Corruption(format!("extent of axis {axis} is zero")));
        }
        shape.push(extent);
    }
    let count = shape
        .iter()
        .try_fold(1u64, |acc, &e| acc.checked_mul(e as u64))
        .filter(|&n| n.checked_mul(4).is_some() && usize::try_from(n).is_ok())
        .ok_or_else(|| Error::Corruption(format!("extent product of {shape:?} overflows")))?;
    let nbytes = count * 4;

    let mut payload = Vec::new();
    (&mut source)
        .take(nbytes)
        .read_to_end(&mut payload)
        .map_err(|e| Error::io("<stream>", e))?;
    if (payload.len() as u64) < nbytes {
        return Err(Error::Corruption(format!(
            "payload truncated: expected {nbytes} bytes, found {}",
            payload.len()
        )));
    }
    let mut extra = [0u8; 1];
    let trailing = source.read(&mut extra).map_err(|e| Error::io("<stream>", e))?;
    if trailing != 0 {
        return Err(Error::Corruption("trailing bytes after payload".into()));
    }

    let data: Vec<f32> = payload
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]))
        .collect();
    Tensor::new(shape, data)
}

pub fn write_tensor_file(t: &Tensor, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    write_tensor(t, BufWriter::new(file)).map_err(|e| Error::io(path, e))
}

pub fn read_tensor_file(path: &Path) -> Result<Tensor> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_tensor(BufReader::new(file)).map_err(|e| e.in_file(path))
}
