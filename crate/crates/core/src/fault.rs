//! Seeded SBU/MBU pattern generation and injection.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::memory::{BitAddr, ConfigMemory};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum FaultKind {
    /// No upsets; useful for baseline runs.
    None,
    SingleBit,
    /// `burst_length` contiguous bits along one row of one frame.
    #[default]
    AdjacentBurst,
    /// `burst_length` distinct bits anywhere in the frame.
    RandomMulti,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FaultModel {
    pub kind: FaultKind,
    pub burst_length: usize,
    pub frames_per_task: usize,
    pub tasks_affected: usize,
    pub seed: u64,
    /// Allow upsets in zero padding frames. They have no hardware counterpart.
    pub allow_dummy: bool,
    /// Reject patterns in which two tasks share a (frame, row, col) upset.
    /// Such pairs cancel in the vertical parity.
    pub unique_across_tasks: bool,
}

impl Default for FaultModel {
    fn default() -> Self {
        Self {
            kind: FaultKind::AdjacentBurst,
            burst_length: 5,
            frames_per_task: 1,
            tasks_affected: 1,
            seed: 0,
            allow_dummy: false,
            unique_across_tasks: false,
        }
    }
}

impl FaultModel {
    pub fn single_bit(seed: u64) -> Self {
        Self { kind: FaultKind::SingleBit, burst_length: 1, seed, ..Self::default() }
    }

    pub fn none() -> Self {
        Self { kind: FaultKind::None, ..Self::default() }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    fn validate(&self, memory: &ConfigMemory) -> Result<()> {
        let g = memory.geometry();
        match self.kind {
            FaultKind::None | FaultKind::SingleBit => return Ok(()),
            FaultKind::AdjacentBurst if self.burst_length > g.cols => {
                return Err(Error::InvalidArgument("burst longer than a frame row"))
            }
            FaultKind::RandomMulti if self.burst_length > g.bits() => {
                return Err(Error::InvalidArgument("more upsets than bits in a frame"))
            }
            _ => {}
        }
        if self.burst_length == 0 || self.frames_per_task == 0 || self.tasks_affected == 0 {
            return Err(Error::InvalidArgument(
                "burst length, frames per task and tasks affected must be at least 1",
            ));
        }
        if self.tasks_affected > memory.task_count() {
            return Err(Error::InvalidArgument("more affected tasks than tasks in memory"));
        }
        Ok(())
    }

    /// Draws a pattern. The same model, seed and memory shape always give
    /// the same pattern.
    pub fn generate(&self, memory: &ConfigMemory) -> Result<FaultPattern> {
        self.validate(memory)?;
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let g = memory.geometry();
        match self.kind {
            FaultKind::None => Ok(FaultPattern::default()),
            FaultKind::SingleBit => {
                let task = rng.random_range(0..memory.task_count());
                let frame = rng.random_range(0..self.frame_limit(memory, task));
                let addr = BitAddr::new(task, frame, rng.random_range(0..g.rows), rng.random_range(0..g.cols));
                Ok(FaultPattern::from_iter([addr]))
            }
            FaultKind::AdjacentBurst | FaultKind::RandomMulti => {
                let eligible: Vec<usize> = (0..memory.task_count())
                    .filter(|&z| self.frame_limit(memory, z) >= self.frames_per_task)
                    .collect();
                if eligible.len() < self.tasks_affected {
                    return Err(Error::InvalidArgument(
                        "not enough tasks with the requested number of frames",
                    ));
                }
                // Retry budget for the cross-task uniqueness constraint.
                for _ in 0..64 {
                    let p = self.draw_multi(memory, &eligible, &mut rng);
                    if !self.unique_across_tasks || !p.has_vertical_collision() {
                        return Ok(p);
                    }
                }
                Err(Error::InvalidArgument("could not draw a pattern without cross-task collisions"))
            }
        }
    }

    fn frame_limit(&self, memory: &ConfigMemory, task: usize) -> usize {
        if self.allow_dummy {
            memory.frames_per_task()
        } else {
            memory.tasks()[task].real_frames()
        }
    }

    fn draw_multi(&self, memory: &ConfigMemory, eligible: &[usize], rng: &mut ChaCha8Rng) -> FaultPattern {
        let g = memory.geometry();
        let mut flips = BTreeSet::new();
        for ti in index::sample(rng, eligible.len(), self.tasks_affected).into_iter() {
            let task = eligible[ti];
            let frames = index::sample(rng, self.frame_limit(memory, task), self.frames_per_task);
            for frame in frames.into_iter() {
                match self.kind {
                    FaultKind::AdjacentBurst => {
                        let row = rng.random_range(0..g.rows);
                        let start = rng.random_range(0..=g.cols - self.burst_length);
                        for col in start..start + self.burst_length {
                            flips.insert(BitAddr::new(task, frame, row, col));
                        }
                    }
                    _ => {
                        for bit in index::sample(rng, g.bits(), self.burst_length).into_iter() {
                            flips.insert(BitAddr::new(task, frame, bit / g.cols, bit % g.cols));
                        }
                    }
                }
            }
        }
        FaultPattern { flips }
    }
}

/// A set of bit upsets. Set semantics: each address appears at most once.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FaultPattern {
    flips: BTreeSet<BitAddr>,
}

impl FromIterator<BitAddr> for FaultPattern {
    fn from_iter<I: IntoIterator<Item = BitAddr>>(iter: I) -> Self {
        Self { flips: iter.into_iter().collect() }
    }
}

impl FaultPattern {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds an upset; returns false if it was already present.
    pub fn insert(&mut self, addr: BitAddr) -> bool {
        self.flips.insert(addr)
    }

    pub fn len(&self) -> usize {
        self.flips.len()
    }

    pub fn is_empty(&self) -> bool {
        self.flips.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &BitAddr> + '_ {
        self.flips.iter()
    }

    /// Tasks touched by the pattern, ascending.
    pub fn tasks(&self) -> Vec<usize> {
        let set: BTreeSet<usize> = self.flips.iter().map(|a| a.task).collect();
        set.into_iter().collect()
    }

    /// Distinct (task, frame) pairs touched.
    pub fn frames(&self) -> Vec<(usize, usize)> {
        let set: BTreeSet<(usize, usize)> = self.flips.iter().map(|a| (a.task, a.frame)).collect();
        set.into_iter().collect()
    }

    /// True if two different tasks flip the same (frame, row, col).
    pub fn has_vertical_collision(&self) -> bool {
        let mut seen = BTreeSet::new();
        self.flips.iter().any(|a| !seen.insert((a.frame, a.row, a.col)))
    }

    /// True if every touched task has upsets in exactly one frame.
    pub fn single_frame_per_task(&self) -> bool {
        let frames = self.frames();
        frames.windows(2).all(|w| w[0].0 != w[1].0)
    }

    /// Toggles every listed bit. Validates all addresses before touching memory.
    pub fn apply(&self, memory: &mut ConfigMemory) -> Result<()> {
        for a in &self.flips {
            memory.check_addr(*a)?;
        }
        for a in &self.flips {
            memory.flip(*a);
        }
        Ok(())
    }
}
