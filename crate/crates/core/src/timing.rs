//! Cycle costs for read-back, hashing, correction and download.

use crate::error::{Error, Result};
use crate::keccak::{detection_throughput, SpongeParams};

/// Parameters of the hash engine's throughput formula.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct HashEngine {
    pub block_bits: u64,
    pub f_max_hz: f64,
    /// Cycles between successive messages.
    pub clock_cycles: u64,
    /// Messages hashed simultaneously.
    pub n_msg: u64,
}

impl Default for HashEngine {
    /// Unrolled/pipelined SHA3-512 core: 576-bit blocks at 344 MHz, two
    /// messages in flight, 24 cycles between messages.
    fn default() -> Self {
        Self {
            block_bits: SpongeParams::SHA3_512.rate_bits as u64,
            f_max_hz: 344e6,
            clock_cycles: 24,
            n_msg: 2,
        }
    }
}

impl HashEngine {
    pub fn throughput_bps(&self) -> Result<f64> {
        detection_throughput(self.block_bits, self.f_max_hz, self.clock_cycles, self.n_msg)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TimingModel {
    /// System clock period `t`, seconds per cycle.
    pub clock_period_s: f64,
    pub read_cycles_per_frame: u64,
    pub write_cycles_per_frame: u64,
    /// Cost of one candidate-frame attempt in the corrector (mask, re-hash).
    pub correction_cycles_per_frame: u64,
    pub hash: HashEngine,
}

impl Default for TimingModel {
    /// 100 MHz system clock and a 32-bit configuration port moving one
    /// word per cycle (101 words per 7-series frame).
    fn default() -> Self {
        Self {
            clock_period_s: 1e-8,
            read_cycles_per_frame: 101,
            write_cycles_per_frame: 101,
            correction_cycles_per_frame: 101,
            hash: HashEngine::default(),
        }
    }
}

impl TimingModel {
    pub fn validate(&self) -> Result<()> {
        if !(self.clock_period_s > 0.0) || !self.clock_period_s.is_finite() {
            return Err(Error::InvalidArgument("clock period must be positive"));
        }
        if self.read_cycles_per_frame == 0
            || self.write_cycles_per_frame == 0
            || self.correction_cycles_per_frame == 0
        {
            return Err(Error::InvalidArgument("per-frame cycle costs must be positive"));
        }
        self.hash.throughput_bps().map(|_| ())
    }

    /// System cycles the hash engine needs for `bits` of input.
    pub fn hash_cycles(&self, bits: u64) -> Result<u64> {
        let seconds = bits as f64 / self.hash.throughput_bps()?;
        Ok(ceil_u64(seconds / self.clock_period_s))
    }

    /// Read-back of `frames_read` frames plus hashing `hashed_bits`.
    pub fn detection_cycles(&self, frames_read: u64, hashed_bits: u64) -> Result<u64> {
        Ok(frames_read * self.read_cycles_per_frame + self.hash_cycles(hashed_bits)?)
    }

    pub fn download_cycles(&self, frames: u64) -> u64 {
        frames * self.write_cycles_per_frame
    }

    pub fn correction_cycles(&self, frames_examined: u64) -> u64 {
        frames_examined * self.correction_cycles_per_frame
    }

    /// Converts a duration in seconds to whole cycles, rounding up.
    pub fn cycles_for(&self, seconds: f64) -> u64 {
        ceil_u64(seconds / self.clock_period_s)
    }
}

/// `ceil` for non-negative values; `core` has no float rounding.
pub(crate) fn ceil_u64(x: f64) -> u64 {
    if !(x > 0.0) {
        return 0;
    }
    let t = x as u64;
    if (t as f64) < x {
        t + 1
    } else {
        t
    }
}
