//! Read-back signature comparison.

use alloc::vec::Vec;

use crate::error::Result;
use crate::memory::{ConfigMemory, GoldenStore};
use crate::timing::TimingModel;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum TaskHealth {
    Clean,
    Faulty,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DetectionReport {
    /// Ascending, no duplicates.
    pub faulty_tasks: Vec<usize>,
    pub scan_cycles: u64,
}

pub fn verify_task(memory: &ConfigMemory, golden: &GoldenStore, z: usize) -> Result<TaskHealth> {
    golden.check_shape(memory)?;
    let digest = memory.task_digest(z)?;
    Ok(if digest == golden.hashes[z] {
        TaskHealth::Clean
    } else {
        TaskHealth::Faulty
    })
}

/// Cycles to read back and hash task `z`.
pub fn task_detection_cycles(memory: &ConfigMemory, z: usize, timing: &TimingModel) -> Result<u64> {
    let task = memory.task(z)?;
    timing.detection_cycles(task.real_frames() as u64, memory.task_bits() as u64)
}

/// Checks every task in ascending id order.
pub fn scan(memory: &ConfigMemory, golden: &GoldenStore, timing: &TimingModel) -> Result<DetectionReport> {
    golden.check_shape(memory)?;
    let mut report = DetectionReport::default();
    for z in 0..memory.task_count() {
        report.scan_cycles += task_detection_cycles(memory, z, timing)?;
        if memory.task_digest(z)? != golden.hashes[z] {
            report.faulty_tasks.push(z);
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fault::FaultPattern;
    use crate::frame::FrameGeometry;
    use crate::memory::{BitAddr, TaskLayout};
    use alloc::vec;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn mem(tasks: usize) -> ConfigMemory {
        let layout: Vec<_> = (0..tasks)
            .map(|_| TaskLayout { frames: 3, exec_cycles: 5, idle_cycles: 5, depends_on: vec![] })
            .collect();
        ConfigMemory::random(FrameGeometry::new(4, 8).unwrap(), &layout, &mut ChaCha8Rng::seed_from_u64(2)).unwrap()
    }

    #[test]
    fn pristine_is_clean() {
        let m = mem(3);
        let g = m.snapshot_golden();
        for z in 0..3 {
            assert_eq!(verify_task(&m, &g, z).unwrap(), TaskHealth::Clean);
        }
        let r = scan(&m, &g, &TimingModel::default()).unwrap();
        assert!(r.faulty_tasks.is_empty());
        assert!(r.scan_cycles > 0);
    }

    #[test]
    fn one_flip_is_faulty_and_flip_back_is_clean() {
        let m = mem(2);
        let g = m.snapshot_golden();
        let mut x = m.clone();
        let a = BitAddr::new(1, 2, 3, 7);
        x.flip(a);
        assert_eq!(verify_task(&x, &g, 1).unwrap(), TaskHealth::Faulty);
        assert_eq!(verify_task(&x, &g, 0).unwrap(), TaskHealth::Clean);
        x.flip(a);
        assert_eq!(verify_task(&x, &g, 1).unwrap(), TaskHealth::Clean);
    }

    #[test]
    fn scan_reports_exactly_the_corrupted_tasks() {
        let m = mem(10);
        let g = m.snapshot_golden();
        let mut x = m.clone();
        FaultPattern::from_iter([BitAddr::new(1, 0, 0, 0), BitAddr::new(7, 2, 3, 1), BitAddr::new(7, 2, 3, 2)])
            .apply(&mut x)
            .unwrap();
        assert_eq!(scan(&x, &g, &TimingModel::default()).unwrap().faulty_tasks, vec![1, 7]);

        let mut all = m.clone();
        for z in 0..10 {
            all.flip(BitAddr::new(z, z % 3, 1, 1));
        }
        assert_eq!(scan(&all, &g, &TimingModel::default()).unwrap().faulty_tasks, (0..10).collect::<Vec<_>>());
    }

    #[test]
    fn scan_cycles_sum_per_task_costs() {
        let m = mem(4);
        let g = m.snapshot_golden();
        let t = TimingModel::default();
        let per = task_detection_cycles(&m, 0, &t).unwrap();
        assert_eq!(per, 3 * 101 + t.hash_cycles(96).unwrap());
        assert_eq!(scan(&m, &g, &t).unwrap().scan_cycles, 4 * per);
    }

    #[test]
    fn shape_mismatch_is_an_error() {
        let g = mem(2).snapshot_golden();
        assert!(verify_task(&mem(3), &g, 0).is_err());
        assert!(scan(&mem(3), &g, &TimingModel::default()).is_err());
    }
}
