//! `NEOW` weight files (little-endian).
//!
//! ```text
//! "NEOW" | version u16 | kind u8 (0 fp32, 1 binary) | K u8 | layer_count u16
//! per layer header: in_ch u16 | out_ch u16 | kh u8 | kw u8
//! per layer body, fp32:   out*in*kh*kw f32 (out, in, y, x), then out f32 biases
//! per layer body, binary: one MSB-first byte-padded plane per (out, in) kernel,
//!                         then out i32 thresholds
//! ```
//! All layer headers precede the bodies.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use thiserror::Error;

use super::{ConvLayer, ConvLayerSpec, ConvNet, LayerParams, NetKind, NnError};

pub const MAGIC: &[u8; 4] = b"NEOW";
pub const VERSION: u16 = 1;

#[derive(Debug, Error)]
pub enum WeightError {
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("bad magic {0:?}, expected \"NEOW\"")]
    BadMagic([u8; 4]),
    #[error("unsupported weight file version {0}")]
    UnsupportedVersion(u16),
    #[error("unknown network kind byte {0}")]
    UnknownKind(u8),
    #[error("file truncated")]
    Truncated,
    #[error("{0} unexpected trailing bytes")]
    TrailingBytes(usize),
    #[error("layer {layer}: expected {expected} input channels, got {found}")]
    ChannelMismatch {
        layer: usize,
        expected: usize,
        found: usize,
    },
    #[error("invalid network: {0}")]
    Invalid(NnError),
    #[error("value {0} does not fit the on-disk field")]
    Overflow(usize),
}

struct Cursor<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], WeightError> {
        let end = self.pos.checked_add(n).ok_or(WeightError::Truncated)?;
        let s = self.buf.get(self.pos..end).ok_or(WeightError::Truncated)?;
        self.pos = end;
        Ok(s)
    }

    fn u8(&mut self) -> Result<u8, WeightError> {
        Ok(self.take(1)?[0])
    }

    fn u16(&mut self) -> Result<u16, WeightError> {
        Ok(u16::from_le_bytes(self.take(2)?.try_into().unwrap()))
    }

    fn f32(&mut self) -> Result<f32, WeightError> {
        Ok(f32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn i32(&mut self) -> Result<i32, WeightError> {
        Ok(i32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }
}

fn narrow<T: TryFrom<usize>>(v: usize) -> Result<T, WeightError> {
    T::try_from(v).map_err(|_| WeightError::Overflow(v))
}

/// Pack bits MSB-first into whole bytes.
pub(crate) fn pack_msb(bits: &[bool], out: &mut Vec<u8>) {
    for chunk in bits.chunks(8) {
        let mut byte = 0u8;
        for (i, &b) in chunk.iter().enumerate() {
            if b {
                byte |= 0x80 >> i;
            }
        }
        out.push(byte);
    }
}

pub(crate) fn unpack_msb(bytes: &[u8], n: usize) -> Vec<bool> {
    (0..n).map(|i| bytes[i / 8] & (0x80 >> (i % 8)) != 0).collect()
}

pub fn write_weights<W: Write>(net: &ConvNet, mut w: W) -> Result<(), WeightError> {
    let mut buf = Vec::new();
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&VERSION.to_le_bytes());
    buf.push(match net.kind() {
        NetKind::Fp32 => 0,
        NetKind::Binary => 1,
    });
    buf.push(narrow::<u8>(net.k())?);
    buf.extend_from_slice(&narrow::<u16>(net.layers().len())?.to_le_bytes());
    for layer in net.layers() {
        let s = layer.spec();
        buf.extend_from_slice(&narrow::<u16>(s.in_ch)?.to_le_bytes());
        buf.extend_from_slice(&narrow::<u16>(s.out_ch)?.to_le_bytes());
        buf.push(narrow::<u8>(s.kh)?);
        buf.push(narrow::<u8>(s.kw)?);
    }
    for layer in net.layers() {
        let s = layer.spec();
        match layer.params() {
            LayerParams::Fp32 { weights, bias } => {
                for v in weights.iter().chain(bias) {
                    buf.extend_from_slice(&v.to_le_bytes());
                }
            }
            LayerParams::Binary {
                weights, thresholds, ..
            } => {
                for kernel in weights.chunks(s.kh * s.kw) {
                    pack_msb(kernel, &mut buf);
                }
                for t in thresholds {
                    buf.extend_from_slice(&t.to_le_bytes());
                }
            }
        }
    }
    w.write_all(&buf)?;
    Ok(())
}

pub fn read_weights(bytes: &[u8]) -> Result<ConvNet, WeightError> {
    let mut c = Cursor { buf: bytes, pos: 0 };
    let magic: [u8; 4] = c.take(4)?.try_into().unwrap();
    if &magic != MAGIC {
        return Err(WeightError::BadMagic(magic));
    }
    let version = c.u16()?;
    if version != VERSION {
        return Err(WeightError::UnsupportedVersion(version));
    }
    let kind = match c.u8()? {
        0 => NetKind::Fp32,
        1 => NetKind::Binary,
        other => return Err(WeightError::UnknownKind(other)),
    };
    let k = c.u8()? as usize;
    let count = c.u16()? as usize;
    let mut specs = Vec::with_capacity(count);
    for i in 0..count {
        let in_ch = c.u16()? as usize;
        let out_ch = c.u16()? as usize;
        let kh = c.u8()? as usize;
        let kw = c.u8()? as usize;
        if let Some(prev) = specs.last().map(|s: &ConvLayerSpec| s.out_ch) {
            if prev != in_ch {
                return Err(WeightError::ChannelMismatch {
                    layer: i,
                    expected: prev,
                    found: in_ch,
                });
            }
        }
        specs.push(ConvLayerSpec::new(in_ch, out_ch, kh, kw));
    }
    let mut layers = Vec::with_capacity(count);
    for s in specs {
        let layer = match kind {
            NetKind::Fp32 => {
                let w = (0..s.weight_count()).map(|_| c.f32()).collect::<Result<Vec<_>, _>>()?;
                let b = (0..s.out_ch).map(|_| c.f32()).collect::<Result<Vec<_>, _>>()?;
                ConvLayer::fp32(s, w, b)
            }
            NetKind::Binary => {
                let plane = s.kh * s.kw;
                let mut w = Vec::with_capacity(s.weight_count());
                for _ in 0..s.out_ch * s.in_ch {
                    w.extend(unpack_msb(c.take(plane.div_ceil(8))?, plane));
                }
                let th = (0..s.out_ch).map(|_| c.i32()).collect::<Result<Vec<_>, _>>()?;
                ConvLayer::binary(s, w, th)
            }
        };
        layers.push(layer.map_err(WeightError::Invalid)?);
    }
    if c.pos != bytes.len() {
        return Err(WeightError::TrailingBytes(bytes.len() - c.pos));
    }
    ConvNet::new(kind, k, layers).map_err(WeightError::Invalid)
}

pub fn save_weights(net: &ConvNet, path: impl AsRef<Path>) -> Result<(), WeightError> {
    let mut buf = Vec::new();
    write_weights(net, &mut buf)?;
    fs::write(path, buf)?;
    Ok(())
}

pub fn load_weights(path: impl AsRef<Path>) -> Result<ConvNet, WeightError> {
    read_weights(&fs::read(path)?)
}
