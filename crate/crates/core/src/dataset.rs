//! `NEOD` training records (little-endian).
//!
//! ```text
//! "NEOD" | version u16 | d u16 | K u8 | shape u8 (0 single, 1 merged)
//!        | record_count u64 | p_train f32 | seed u64
//! per record: 2K+2 input planes, then 4 label planes; each plane row-major,
//!             MSB-first, padded to a whole byte
//! ```
//!
//! Record `i` comes from trial `i` of `(seed, p_train)` with target layer
//! `i mod T`. Errors before the target are dropped, as if the first stage had
//! already cleaned the earlier layers, so the window and labels describe the
//! target layer only.

use std::io::{self, Write};

use thiserror::Error;

use crate::lattice::{
    extract_detection, sample_errors, CellKind, CodeLayout, ErrorTableau, LatticeError, NoiseParams,
    Shape, Timeline,
};
use crate::nn::{build_window, BitPlanes, NnError};

pub const MAGIC: &[u8; 4] = b"NEOD";
pub const VERSION: u16 = 1;
pub const HEADER_LEN: usize = 4 + 2 + 2 + 1 + 1 + 8 + 4 + 8;

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("bad magic {0:?}, expected \"NEOD\"")]
    BadMagic([u8; 4]),
    #[error("unsupported dataset version {0}")]
    UnsupportedVersion(u16),
    #[error("unknown shape byte {0}")]
    UnknownShape(u8),
    #[error("file truncated")]
    Truncated,
    #[error("{0} unexpected trailing bytes")]
    TrailingBytes(usize),
    #[error("window depth {0} does not fit the header")]
    WindowTooDeep(usize),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Nn(#[from] NnError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DatasetHeader {
    pub d: u16,
    pub k: u8,
    pub shape: Shape,
    pub record_count: u64,
    pub p_train: f32,
    pub seed: u64,
}

impl DatasetHeader {
    pub fn grid(&self) -> (usize, usize) {
        let side = 2 * self.d as usize - 1;
        match self.shape {
            Shape::Single => (side, side),
            Shape::MergedRough => (side, 2 * side + 1),
        }
    }

    pub fn input_planes(&self) -> usize {
        2 * self.k as usize + 2
    }

    fn plane_bytes(&self) -> usize {
        let (h, w) = self.grid();
        (h * w).div_ceil(8)
    }

    pub fn record_bytes(&self) -> usize {
        (self.input_planes() + 4) * self.plane_bytes()
    }

    pub fn write<W: Write>(&self, mut w: W) -> io::Result<()> {
        let mut b = Vec::with_capacity(HEADER_LEN);
        b.extend_from_slice(MAGIC);
        b.extend_from_slice(&VERSION.to_le_bytes());
        b.extend_from_slice(&self.d.to_le_bytes());
        b.push(self.k);
        b.push(match self.shape {
            Shape::Single => 0,
            Shape::MergedRough => 1,
        });
        b.extend_from_slice(&self.record_count.to_le_bytes());
        b.extend_from_slice(&self.p_train.to_le_bytes());
        b.extend_from_slice(&self.seed.to_le_bytes());
        w.write_all(&b)
    }

    pub fn parse(bytes: &[u8]) -> Result<Self, DatasetError> {
        if bytes.len() < 4 {
            return Err(DatasetError::Truncated);
        }
        let magic: [u8; 4] = bytes[..4].try_into().unwrap();
        if &magic != MAGIC {
            return Err(DatasetError::BadMagic(magic));
        }
        if bytes.len() < HEADER_LEN {
            return Err(DatasetError::Truncated);
        }
        let version = u16::from_le_bytes([bytes[4], bytes[5]]);
        if version != VERSION {
            return Err(DatasetError::UnsupportedVersion(version));
        }
        let shape = match bytes[9] {
            0 => Shape::Single,
            1 => Shape::MergedRough,
            s => return Err(DatasetError::UnknownShape(s)),
        };
        Ok(Self {
            d: u16::from_le_bytes([bytes[6], bytes[7]]),
            k: bytes[8],
            shape,
            record_count: u64::from_le_bytes(bytes[10..18].try_into().unwrap()),
            p_train: f32::from_le_bytes(bytes[18..22].try_into().unwrap()),
            seed: u64::from_le_bytes(bytes[22..30].try_into().unwrap()),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Record {
    pub input: BitPlanes,
    /// Planes: X on data, Z on data, flip on X-type ancillas, flip on Z-type ancillas.
    pub labels: BitPlanes,
}

fn write_planes<W: Write>(p: &BitPlanes, w: &mut W) -> io::Result<()> {
    let mut buf = Vec::new();
    for c in 0..p.ch {
        for chunk in p.plane(c).chunks(8) {
            let mut byte = 0u8;
            for (i, &b) in chunk.iter().enumerate() {
                if b {
                    byte |= 0x80 >> i;
                }
            }
            buf.push(byte);
        }
    }
    w.write_all(&buf)
}

fn read_planes(bytes: &[u8], ch: usize, h: usize, w: usize) -> BitPlanes {
    let per = (h * w).div_ceil(8);
    let mut p = BitPlanes::zeros(ch, h, w);
    for c in 0..ch {
        let src = &bytes[c * per..(c + 1) * per];
        for (i, v) in p.plane_mut(c).iter_mut().enumerate() {
            *v = src[i / 8] & (0x80 >> (i % 8)) != 0;
        }
    }
    p
}

impl Record {
    pub fn write<W: Write>(&self, w: &mut W) -> io::Result<()> {
        write_planes(&self.input, w)?;
        write_planes(&self.labels, w)
    }
}

/// Parse a whole dataset file.
pub fn read_dataset(bytes: &[u8]) -> Result<(DatasetHeader, Vec<Record>), DatasetError> {
    let header = DatasetHeader::parse(bytes)?;
    let (h, w) = header.grid();
    let per = header.plane_bytes();
    let rec = header.record_bytes();
    let body = &bytes[HEADER_LEN..];
    let need = (header.record_count as usize).checked_mul(rec).ok_or(DatasetError::Truncated)?;
    if body.len() < need {
        return Err(DatasetError::Truncated);
    }
    if body.len() > need {
        return Err(DatasetError::TrailingBytes(body.len() - need));
    }
    let ni = header.input_planes();
    let records = body
        .chunks(rec)
        .map(|r| Record {
            input: read_planes(&r[..ni * per], ni, h, w),
            labels: read_planes(&r[ni * per..], 4, h, w),
        })
        .collect();
    Ok((header, records))
}

/// Training pair for trial `index` of a timeline.
pub fn make_record(tl: &Timeline, k: usize, p: f64, seed: u64, index: u64) -> Result<Record, DatasetError> {
    let mut e = sample_errors(tl, &NoiseParams::new(p, seed, index))?;
    let target = (index % tl.cycles() as u64) as usize;
    let cells = tl.layout().num_cells();
    for t in 0..target {
        for q in 0..cells {
            e.set_x(t, q, false);
            e.set_z(t, q, false);
            e.set_meas(t, q, false);
        }
    }
    let vol = extract_detection(tl, &e)?;
    let input = build_window(tl, &vol, target, k)?.into_bits();
    Ok(Record {
        input,
        labels: label_planes(tl.layout(), &e, target),
    })
}

fn label_planes(layout: &CodeLayout, e: &ErrorTableau, t: usize) -> BitPlanes {
    let mut labels = BitPlanes::zeros(4, layout.rows(), layout.cols());
    for cell in 0..layout.num_cells() {
        match layout.kind(cell) {
            CellKind::Data => {
                labels.plane_mut(0)[cell] = e.x(t, cell);
                labels.plane_mut(1)[cell] = e.z(t, cell);
            }
            CellKind::AncX => labels.plane_mut(2)[cell] = e.meas(t, cell),
            CellKind::AncZ => labels.plane_mut(3)[cell] = e.meas(t, cell),
            CellKind::Void => {}
        }
    }
    labels
}

/// Stream `count` records after a header.
pub fn write_dataset<W: Write>(tl: &Timeline, k: usize, p: f64, seed: u64, count: u64, mut w: W) -> Result<(), DatasetError> {
    let layout = tl.layout();
    let header = DatasetHeader {
        d: layout.d() as u16,
        k: u8::try_from(k).map_err(|_| DatasetError::WindowTooDeep(k))?,
        shape: layout.shape(),
        record_count: count,
        p_train: p as f32,
        seed,
    };
    header.write(&mut w)?;
    for i in 0..count {
        make_record(tl, k, p, seed, i)?.write(&mut w)?;
    }
    w.flush()?;
    Ok(())
}
