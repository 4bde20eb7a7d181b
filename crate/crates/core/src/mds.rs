//! [n, k] Reed-Solomon evaluation codes used as the MDS code for coded
//! placement.
//!
//! The generator is the k x n Vandermonde matrix `G(r, c) = alpha_c^r` over
//! the first n canonical field elements `0, 1, g, g^2, ...`. Distinct
//! evaluation points make every k-column sub-matrix invertible. Decoding is
//! erasure-only: pick any k coordinates and solve the k x k system.
//!
//! Coordinates (coded subfile indices) are 1-based.

use thiserror::Error;

use crate::gf::{GfField, Symbol};

/// One subfile: a run of field symbols.
pub type SymbolBlock = Vec<Symbol>;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CodecError {
    #[error("need 1 <= k <= n, got n={n} k={k}")]
    BadDimensions { n: usize, k: usize },
    #[error("code length {0} exceeds the largest supported field")]
    TooLong(usize),
    #[error("expected {expected} blocks, got {found}")]
    BlockCount { expected: usize, found: usize },
    #[error("blocks have unequal lengths")]
    Ragged,
    #[error("coordinate {0} repeated")]
    RepeatedCoordinate(usize),
    #[error("coordinate {coord} outside [1, {n}]")]
    CoordinateOutOfRange { coord: usize, n: usize },
    #[error("internal fault: singular {0}x{0} sub-matrix")]
    Singular(usize),
}

#[derive(Debug, Clone)]
pub struct RsCodec {
    field: &'static GfField,
    n: usize,
    k: usize,
    points: Vec<Symbol>,
    /// Row-major k x n.
    generator: Vec<Symbol>,
}

impl RsCodec {
    /// Codec over GF(2^8) when `n <= 256`, otherwise GF(2^16).
    pub fn new(n: usize, k: usize) -> Result<Self, CodecError> {
        let field = GfField::for_length(n).ok_or(CodecError::TooLong(n))?;
        Self::with_field(field, n, k)
    }

    pub fn with_field(field: &'static GfField, n: usize, k: usize) -> Result<Self, CodecError> {
        if k == 0 || k > n {
            return Err(CodecError::BadDimensions { n, k });
        }
        if n > field.size() {
            return Err(CodecError::TooLong(n));
        }
        let points: Vec<Symbol> = (0..n).map(|i| field.element(i)).collect();
        let mut generator = Vec::with_capacity(k * n);
        for r in 0..k {
            generator.extend(points.iter().map(|&a| field.pow(a, r as u32)));
        }
        Ok(RsCodec {
            field,
            n,
            k,
            points,
            generator,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }
    pub fn k(&self) -> usize {
        self.k
    }
    pub fn field(&self) -> &'static GfField {
        self.field
    }
    pub fn points(&self) -> &[Symbol] {
        &self.points
    }

    /// Entry `(r, c)` of the generator, both 0-based.
    pub fn generator(&self, r: usize, c: usize) -> Symbol {
        self.generator[r * self.n + c]
    }

    fn block_len(blocks: &[SymbolBlock]) -> Result<usize, CodecError> {
        let len = blocks.first().map_or(0, Vec::len);
        if blocks.iter().any(|b| b.len() != len) {
            return Err(CodecError::Ragged);
        }
        Ok(len)
    }

    /// Coded block `f` is `sum_r G(r, f) * message[r]`, symbol by symbol.
    pub fn encode(&self, message: &[SymbolBlock]) -> Result<Vec<SymbolBlock>, CodecError> {
        if message.len() != self.k {
            return Err(CodecError::BlockCount {
                expected: self.k,
                found: message.len(),
            });
        }
        let len = Self::block_len(message)?;
        Ok((0..self.n)
            .map(|c| {
                let mut out = vec![0; len];
                for (r, block) in message.iter().enumerate() {
                    self.field.mul_add_into(&mut out, block, self.generator(r, c));
                }
                out
            })
            .collect())
    }

    /// Recover the message from the coded blocks at `coords` (1-based, k
    /// distinct coordinates, any order).
    pub fn decode_from(
        &self,
        coords: &[usize],
        values: &[SymbolBlock],
    ) -> Result<Vec<SymbolBlock>, CodecError> {
        let k = self.k;
        if coords.len() != k || values.len() != k {
            return Err(CodecError::BlockCount {
                expected: k,
                found: coords.len().min(values.len()),
            });
        }
        let mut seen = vec![false; self.n];
        for &c in coords {
            if c == 0 || c > self.n {
                return Err(CodecError::CoordinateOutOfRange { coord: c, n: self.n });
            }
            if std::mem::replace(&mut seen[c - 1], true) {
                return Err(CodecError::RepeatedCoordinate(c));
            }
        }
        let len = Self::block_len(values)?;

        // values[j] = sum_r G(r, coords[j]) * msg[r]; invert that k x k map.
        let matrix: Vec<Vec<Symbol>> = coords
            .iter()
            .map(|&c| (0..k).map(|r| self.generator(r, c - 1)).collect())
            .collect();
        let inverse = invert(self.field, matrix).ok_or(CodecError::Singular(k))?;

        Ok(inverse
            .iter()
            .map(|row| {
                let mut out = vec![0; len];
                for (j, &coef) in row.iter().enumerate() {
                    self.field.mul_add_into(&mut out, &values[j], coef);
                }
                out
            })
            .collect())
    }

    /// Bytes per message: a multiple of `k` symbols.
    pub fn padded_len(&self, len: usize) -> usize {
        let unit = self.k * self.field.symbol_bytes();
        len.div_ceil(unit).max(1) * unit
    }

    /// Zero-pad `bytes` to `padded_len` and cut it into k equal subfiles.
    /// Multi-byte symbols are big-endian.
    pub fn split(&self, bytes: &[u8]) -> Vec<SymbolBlock> {
        self.split_padded(bytes, self.padded_len(bytes.len()))
    }

    /// As [`split`](Self::split) but padding to an explicit length, which
    /// must be a valid `padded_len` at least `bytes.len()`.
    pub fn split_padded(&self, bytes: &[u8], padded: usize) -> Vec<SymbolBlock> {
        let mut buf = bytes.to_vec();
        buf.resize(padded, 0);
        let symbols = bytes_to_symbols(self.field, &buf);
        let per = symbols.len() / self.k;
        symbols.chunks(per.max(1)).map(<[Symbol]>::to_vec).take(self.k).collect()
    }

    /// Concatenate message subfiles and drop padding beyond `len` bytes.
    pub fn join(&self, blocks: &[SymbolBlock], len: usize) -> Vec<u8> {
        let mut bytes: Vec<u8> = blocks
            .iter()
            .flat_map(|b| symbols_to_bytes(self.field, b))
            .collect();
        bytes.truncate(len);
        bytes
    }
}

/// Gauss-Jordan inverse over the field. `None` when singular.
fn invert(field: &GfField, mut a: Vec<Vec<Symbol>>) -> Option<Vec<Vec<Symbol>>> {
    let n = a.len();
    let mut inv: Vec<Vec<Symbol>> = (0..n)
        .map(|i| (0..n).map(|j| Symbol::from(i == j)).collect())
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| a[r][col] != 0)?;
        a.swap(col, pivot);
        inv.swap(col, pivot);
        let scale = field.inv(a[col][col])?;
        for j in 0..n {
            a[col][j] = field.mul(a[col][j], scale);
            inv[col][j] = field.mul(inv[col][j], scale);
        }
        for r in 0..n {
            let factor = a[r][col];
            if r == col || factor == 0 {
                continue;
            }
            let (pa, pi) = (a[col].clone(), inv[col].clone());
            field.mul_add_into(&mut a[r], &pa, factor);
            field.mul_add_into(&mut inv[r], &pi, factor);
        }
    }
    Some(inv)
}

/// Determinant over the field, used to check the MDS property directly.
pub fn determinant(field: &GfField, mut a: Vec<Vec<Symbol>>) -> Symbol {
    let n = a.len();
    let mut det: Symbol = 1;
    for col in 0..n {
        let Some(pivot) = (col..n).find(|&r| a[r][col] != 0) else {
            return 0;
        };
        // row swaps only flip sign, which is a no-op in characteristic 2
        a.swap(col, pivot);
        det = field.mul(det, a[col][col]);
        let inv = field.inv(a[col][col]).expect("nonzero pivot");
        for r in col + 1..n {
            let factor = field.mul(a[r][col], inv);
            if factor != 0 {
                let prow = a[col].clone();
                field.mul_add_into(&mut a[r], &prow, factor);
            }
        }
    }
    det
}

pub fn bytes_to_symbols(field: &GfField, bytes: &[u8]) -> Vec<Symbol> {
    match field.symbol_bytes() {
        1 => bytes.iter().map(|&b| Symbol::from(b)).collect(),
        _ => bytes
            .chunks(2)
            .map(|c| Symbol::from_be_bytes([c[0], c.get(1).copied().unwrap_or(0)]))
            .collect(),
    }
}

pub fn symbols_to_bytes(field: &GfField, symbols: &[Symbol]) -> Vec<u8> {
    match field.symbol_bytes() {
        1 => symbols.iter().map(|&s| s as u8).collect(),
        _ => symbols.iter().flat_map(|s| s.to_be_bytes()).collect(),
    }
}
