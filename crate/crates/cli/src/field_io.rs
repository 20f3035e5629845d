//! `.evxf` field container.
//!
//! Layout, all little-endian:
//!
//! | offset | size | content |
//! |---|---|---|
//! | 0 | 8 | magic `EVXFIELD` |
//! | 8 | 4 | format version (1) |
//! | 12 | 4 | kind: 1 complex, 2 scalar |
//! | 16 | 8 | nx |
//! | 24 | 8 | ny |
//! | 32 | 8 | pitch (m) |
//! | 40 | 8 | origin x (m) |
//! | 48 | 8 | origin y (m) |
//! | 56 | 16·nx·ny | samples, row-major, (re, im) f64 pairs |
//! | end−32 | 32 | SHA-256 of everything before it |
//!
//! Scalar fields store the value in `re` and validity (1 or 0) in `im`.

use std::fmt;
use std::io::Write;
use std::path::Path;

use evortex_core::{Complex64, ComplexField2D, Grid2D, Point2, ScalarField2D};
use sha2::{Digest, Sha256};

pub const MAGIC: &[u8; 8] = b"EVXFIELD";
pub const VERSION: u32 = 1;
pub const HEADER_LEN: usize = 56;
const TRAILER_LEN: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldKind {
    Complex = 1,
    Scalar = 2,
}

#[derive(Debug, Clone, PartialEq)]
pub enum StoredField {
    Complex(ComplexField2D),
    Scalar(ScalarField2D),
}

impl StoredField {
    pub fn grid(&self) -> &Grid2D {
        match self {
            StoredField::Complex(f) => f.grid(),
            StoredField::Scalar(f) => f.grid(),
        }
    }

    pub fn kind(&self) -> FieldKind {
        match self {
            StoredField::Complex(_) => FieldKind::Complex,
            StoredField::Scalar(_) => FieldKind::Scalar,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FormatError {
    pub offset: usize,
    pub message: String,
}

impl fmt::Display for FormatError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "malformed field file at byte {}: {}", self.offset, self.message)
    }
}

impl std::error::Error for FormatError {}

fn fail<T>(offset: usize, message: impl Into<String>) -> Result<T, FormatError> {
    Err(FormatError { offset, message: message.into() })
}

fn header(kind: FieldKind, grid: &Grid2D) -> Vec<u8> {
    let mut out = Vec::with_capacity(HEADER_LEN + 16 * grid.len() + TRAILER_LEN);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&(kind as u32).to_le_bytes());
    out.extend_from_slice(&(grid.nx() as u64).to_le_bytes());
    out.extend_from_slice(&(grid.ny() as u64).to_le_bytes());
    out.extend_from_slice(&grid.pitch().to_le_bytes());
    out.extend_from_slice(&grid.origin().x.to_le_bytes());
    out.extend_from_slice(&grid.origin().y.to_le_bytes());
    out
}

fn seal(mut out: Vec<u8>) -> Vec<u8> {
    let digest = Sha256::digest(&out);
    out.extend_from_slice(&digest);
    out
}

pub fn encode_complex(field: &ComplexField2D) -> Vec<u8> {
    let mut out = header(FieldKind::Complex, field.grid());
    for z in field.data() {
        out.extend_from_slice(&z.re.to_le_bytes());
        out.extend_from_slice(&z.im.to_le_bytes());
    }
    seal(out)
}

pub fn encode_scalar(field: &ScalarField2D) -> Vec<u8> {
    let mut out = header(FieldKind::Scalar, field.grid());
    for (v, ok) in field.values().iter().zip(field.validity()) {
        out.extend_from_slice(&v.to_le_bytes());
        out.extend_from_slice(&(if *ok { 1.0f64 } else { 0.0 }).to_le_bytes());
    }
    seal(out)
}

pub fn encode(field: &StoredField) -> Vec<u8> {
    match field {
        StoredField::Complex(f) => encode_complex(f),
        StoredField::Scalar(f) => encode_scalar(f),
    }
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Cursor<'_> {
    fn take<const N: usize>(&mut self) -> [u8; N] {
        let out: [u8; N] = self.bytes[self.pos..self.pos + N].try_into().unwrap();
        self.pos += N;
        out
    }
    fn u32(&mut self) -> u32 {
        u32::from_le_bytes(self.take())
    }
    fn u64(&mut self) -> u64 {
        u64::from_le_bytes(self.take())
    }
    fn f64(&mut self) -> f64 {
        f64::from_le_bytes(self.take())
    }
}

pub fn decode(bytes: &[u8]) -> Result<StoredField, FormatError> {
    if bytes.len() < HEADER_LEN + TRAILER_LEN {
        return fail(bytes.len(), format!("file is {} bytes, shorter than header and checksum", bytes.len()));
    }
    if &bytes[..8] != MAGIC {
        return fail(0, "bad magic, not an EVXFIELD file");
    }
    let mut c = Cursor { bytes, pos: 8 };
    let version = c.u32();
    if version != VERSION {
        return fail(8, format!("unsupported version {version}"));
    }
    let kind = match c.u32() {
        1 => FieldKind::Complex,
        2 => FieldKind::Scalar,
        k => return fail(12, format!("unknown field kind {k}")),
    };
    let nx = c.u64();
    let ny = c.u64();
    let pitch = c.f64();
    let ox = c.f64();
    let oy = c.f64();
    let n = (nx as u128) * (ny as u128);
    let expected = HEADER_LEN as u128 + 16 * n + TRAILER_LEN as u128;
    if expected != bytes.len() as u128 {
        return fail(HEADER_LEN, format!("{nx}x{ny} samples need {expected} bytes in total, file has {}", bytes.len()));
    }
    let body_end = bytes.len() - TRAILER_LEN;
    let digest = Sha256::digest(&bytes[..body_end]);
    if digest.as_slice() != &bytes[body_end..] {
        return fail(body_end, "checksum mismatch");
    }
    let grid = match Grid2D::new(nx as usize, ny as usize, pitch, Point2::new(ox, oy)) {
        Ok(g) => g,
        Err(e) => return fail(16, format!("invalid grid: {e}")),
    };
    let n = n as usize;
    match kind {
        FieldKind::Complex => {
            let data: Vec<Complex64> = (0..n).map(|_| Complex64::new(c.f64(), c.f64())).collect();
            Ok(StoredField::Complex(ComplexField2D::from_data(grid, data).expect("length checked")))
        }
        FieldKind::Scalar => {
            let mut values = Vec::with_capacity(n);
            let mut valid = Vec::with_capacity(n);
            for k in 0..n {
                let v = c.f64();
                let flag = c.f64();
                if flag != 0.0 && flag != 1.0 {
                    return fail(HEADER_LEN + 16 * k + 8, format!("validity flag must be 0 or 1, got {flag}"));
                }
                values.push(v);
                valid.push(flag == 1.0);
            }
            let field = ScalarField2D::with_validity(grid, values, valid)
                .map_err(|e| FormatError { offset: HEADER_LEN, message: e.to_string() })?;
            Ok(StoredField::Scalar(field))
        }
    }
}

pub fn write_bytes(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let mut f = std::fs::File::create(path)?;
    f.write_all(bytes)?;
    f.sync_all()
}

pub fn read_field(path: &Path) -> anyhow::Result<StoredField> {
    let bytes = std::fs::read(path).map_err(|e| anyhow::anyhow!("cannot read {}: {e}", path.display()))?;
    decode(&bytes).map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))
}

pub fn read_complex(path: &Path) -> anyhow::Result<ComplexField2D> {
    match read_field(path)? {
        StoredField::Complex(f) => Ok(f),
        StoredField::Scalar(_) => anyhow::bail!("{}: expected a complex field, found a scalar field", path.display()),
    }
}

pub fn read_scalar(path: &Path) -> anyhow::Result<ScalarField2D> {
    match read_field(path)? {
        StoredField::Scalar(f) => Ok(f),
        StoredField::Complex(_) => anyhow::bail!("{}: expected a scalar field, found a complex field", path.display()),
    }
}
