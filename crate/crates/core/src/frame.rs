//! Configuration frames: `rows x cols` bit matrices.
//!
//! Bits are packed row-major, most significant bit first, so byte 0 bit 7 is
//! `(row 0, col 0)`. Unused bits of the final byte are always zero.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Rows (`v`) and columns (`h`) of every frame in a memory.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FrameGeometry {
    pub rows: usize,
    pub cols: usize,
}

impl FrameGeometry {
    /// 7-series frame: 101 words of 32 bits.
    pub const SEVEN_SERIES: FrameGeometry = FrameGeometry { rows: 101, cols: 32 };

    pub fn new(rows: usize, cols: usize) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidArgument("frame rows and columns must be at least 1"));
        }
        Ok(Self { rows, cols })
    }

    pub const fn bits(&self) -> usize {
        self.rows * self.cols
    }

    pub const fn bytes(&self) -> usize {
        self.bits().div_ceil(8)
    }
}

impl Default for FrameGeometry {
    fn default() -> Self {
        Self::SEVEN_SERIES
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Frame {
    geometry: FrameGeometry,
    data: Vec<u8>,
}

impl Frame {
    pub fn zeros(geometry: FrameGeometry) -> Self {
        Self {
            geometry,
            data: vec![0; geometry.bytes()],
        }
    }

    /// Builds a frame from packed bytes. Padding bits past `rows * cols` must be zero.
    pub fn from_bytes(geometry: FrameGeometry, data: Vec<u8>) -> Result<Self> {
        if data.len() != geometry.bytes() {
            return Err(Error::InvalidArgument("frame byte length does not match geometry"));
        }
        let frame = Self { geometry, data };
        if frame.data.last().copied().unwrap_or(0) & !frame.last_byte_mask() != 0 {
            return Err(Error::InvalidArgument("frame padding bits must be zero"));
        }
        Ok(frame)
    }

    /// Builds a frame from a row-major iterator of bits.
    pub fn from_bits<I: IntoIterator<Item = bool>>(geometry: FrameGeometry, bits: I) -> Result<Self> {
        let mut frame = Self::zeros(geometry);
        let mut count = 0;
        for (idx, bit) in bits.into_iter().enumerate() {
            if idx >= geometry.bits() {
                return Err(Error::InvalidArgument("too many bits for frame geometry"));
            }
            if bit {
                frame.data[idx / 8] |= 0x80 >> (idx % 8);
            }
            count += 1;
        }
        if count != geometry.bits() {
            return Err(Error::InvalidArgument("too few bits for frame geometry"));
        }
        Ok(frame)
    }

    /// Uniformly random content.
    pub fn random<R: rand::RngCore + ?Sized>(geometry: FrameGeometry, rng: &mut R) -> Self {
        let mut frame = Self::zeros(geometry);
        rng.fill_bytes(&mut frame.data);
        let mask = frame.last_byte_mask();
        if let Some(last) = frame.data.last_mut() {
            *last &= mask;
        }
        frame
    }

    pub fn geometry(&self) -> FrameGeometry {
        self.geometry
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.data
    }

    fn last_byte_mask(&self) -> u8 {
        match self.geometry.bits() % 8 {
            0 => 0xFF,
            r => 0xFFu8 << (8 - r),
        }
    }

    fn index(&self, row: usize, col: usize) -> usize {
        assert!(
            row < self.geometry.rows && col < self.geometry.cols,
            "bit ({row}, {col}) outside {}x{} frame",
            self.geometry.rows,
            self.geometry.cols
        );
        row * self.geometry.cols + col
    }

    pub fn get(&self, row: usize, col: usize) -> bool {
        let i = self.index(row, col);
        self.data[i / 8] & (0x80 >> (i % 8)) != 0
    }

    pub fn set(&mut self, row: usize, col: usize, value: bool) {
        let i = self.index(row, col);
        let m = 0x80 >> (i % 8);
        if value {
            self.data[i / 8] |= m;
        } else {
            self.data[i / 8] &= !m;
        }
    }

    pub fn flip(&mut self, row: usize, col: usize) {
        let i = self.index(row, col);
        self.data[i / 8] ^= 0x80 >> (i % 8);
    }

    /// `self ^= other`. Panics on geometry mismatch.
    pub fn xor_assign(&mut self, other: &Frame) {
        assert_eq!(self.geometry, other.geometry, "xor of frames with different geometry");
        for (a, b) in self.data.iter_mut().zip(other.data.iter()) {
            *a ^= *b;
        }
    }

    pub fn xor(&self, other: &Frame) -> Frame {
        let mut out = self.clone();
        out.xor_assign(other);
        out
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&b| b == 0)
    }

    pub fn count_ones(&self) -> usize {
        self.data.iter().map(|b| b.count_ones() as usize).sum()
    }

    /// Coordinates of set bits in row-major order.
    pub fn ones(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let cols = self.geometry.cols;
        self.data.iter().enumerate().flat_map(move |(byte_idx, &b)| {
            (0..8usize).filter_map(move |bit| {
                if b & (0x80 >> bit) != 0 {
                    let i = byte_idx * 8 + bit;
                    Some((i / cols, i % cols))
                } else {
                    None
                }
            })
        })
    }

    /// First set bit in row-major order.
    pub fn first_one(&self) -> Option<(usize, usize)> {
        let (byte_idx, b) = self.data.iter().enumerate().find(|(_, b)| **b != 0)?;
        let i = byte_idx * 8 + b.leading_zeros() as usize;
        Some((i / self.geometry.cols, i % self.geometry.cols))
    }
}

impl core::fmt::Debug for Frame {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(
            f,
            "Frame({}x{}, {} ones)",
            self.geometry.rows,
            self.geometry.cols,
            self.count_ones()
        )
    }
}
