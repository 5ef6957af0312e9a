//! Erasure product code decoding.
//!
//! A faulty task's recomputed horizontal parity differs from the stored one
//! exactly at the upset bits, provided all upsets sit in one frame. The first
//! differing coordinate is looked up in the vertical parities to find the
//! frame indices that could hold it. Each candidate frame in turn gets the
//! whole horizontal difference mask XORed in; the task signature decides
//! whether the guess was right, and a wrong guess is undone with the same
//! mask.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::memory::{ConfigMemory, GoldenStore};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum CorrectionStatus {
    Clean,
    Corrected,
    Uncorrectable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum UncorrectableCause {
    /// Signature mismatch but the horizontal parity matches: upsets cancel
    /// within the task.
    HorizontalMasked,
    /// Horizontal parity mismatch with no vertical parity mismatch at that
    /// coordinate: another task's upset cancels it.
    VerticalMasked,
    /// Every candidate frame was tried and none restored the signature.
    NoCandidateMatched,
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CorrectionOutcome {
    pub task: usize,
    pub status: CorrectionStatus,
    pub corrected_frame: Option<usize>,
    /// Candidate frames tried.
    pub attempts: usize,
    /// Size of the candidate list.
    pub candidates: usize,
    /// Bits toggled by the successful attempt.
    pub bits_corrected: usize,
    pub cause: Option<UncorrectableCause>,
}

impl CorrectionOutcome {
    fn new(task: usize, status: CorrectionStatus) -> Self {
        Self {
            task,
            status,
            corrected_frame: None,
            attempts: 0,
            candidates: 0,
            bits_corrected: 0,
            cause: None,
        }
    }

    fn uncorrectable(task: usize, cause: UncorrectableCause) -> Self {
        Self { cause: Some(cause), ..Self::new(task, CorrectionStatus::Uncorrectable) }
    }
}

/// Vertical parity of frame index `k`, evaluated at a single bit.
fn vertical_parity_bit(memory: &ConfigMemory, k: usize, row: usize, col: usize) -> bool {
    memory
        .tasks()
        .iter()
        .fold(false, |acc, t| acc ^ t.frames()[k].get(row, col))
}

/// Tries to restore task `z`.
///
/// On `Uncorrectable` the memory is left exactly as it was on entry.
pub fn correct_task(memory: &mut ConfigMemory, golden: &GoldenStore, z: usize) -> Result<CorrectionOutcome> {
    golden.check_shape(memory)?;
    let mut mask = memory.horizontal_parity(z)?;
    mask.xor_assign(&golden.hp[z]);

    let Some((row, col)) = mask.first_one() else {
        return Ok(if memory.task_digest(z)? == golden.hashes[z] {
            CorrectionOutcome::new(z, CorrectionStatus::Clean)
        } else {
            CorrectionOutcome::uncorrectable(z, UncorrectableCause::HorizontalMasked)
        });
    };

    let candidates: Vec<usize> = (0..memory.frames_per_task())
        .filter(|&k| vertical_parity_bit(memory, k, row, col) != golden.vp[k].get(row, col))
        .collect();
    if candidates.is_empty() {
        return Ok(CorrectionOutcome::uncorrectable(z, UncorrectableCause::VerticalMasked));
    }

    let mut outcome = CorrectionOutcome::uncorrectable(z, UncorrectableCause::NoCandidateMatched);
    outcome.candidates = candidates.len();
    for &k in &candidates {
        outcome.attempts += 1;
        memory.frame_mut(z, k).xor_assign(&mask);
        if memory.task_digest(z)? == golden.hashes[z] {
            outcome.status = CorrectionStatus::Corrected;
            outcome.corrected_frame = Some(k);
            outcome.bits_corrected = mask.count_ones();
            outcome.cause = None;
            return Ok(outcome);
        }
        memory.frame_mut(z, k).xor_assign(&mask);
    }
    Ok(outcome)
}

/// Corrects tasks in the given order. Each attempt sees the vertical
/// parities as left by the previous corrections.
pub fn correct_all(
    memory: &mut ConfigMemory,
    golden: &GoldenStore,
    order: &[usize],
) -> Result<Vec<CorrectionOutcome>> {
    for &z in order {
        if z >= memory.task_count() {
            return Err(Error::OutOfRange { what: "task", index: z, len: memory.task_count() });
        }
    }
    order.iter().map(|&z| correct_task(memory, golden, z)).collect()
}
