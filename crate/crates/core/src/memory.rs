//! The configuration memory as a task x frame array, plus the golden
//! signatures and parity frames captured before any upset.
//!
//! Tasks shorter than the longest task are padded with all-zero dummy frames
//! so every row has `frames_per_task` entries. Dummy frames take part in both
//! parities and in the task signature.

use alloc::vec::Vec;

use rand::RngCore;

use crate::error::{Error, Result};
use crate::frame::{Frame, FrameGeometry};
use crate::keccak::{Digest512, Sha3_512};

/// Input description of one task before padding.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TaskSpec {
    pub frames: Vec<Frame>,
    /// Execution phase length in clock cycles (`E_i / t`).
    pub exec_cycles: u64,
    /// Idle phase length in clock cycles (`I_i / t`).
    pub idle_cycles: u64,
    pub depends_on: Vec<usize>,
}

impl TaskSpec {
    pub fn new(frames: Vec<Frame>, exec_cycles: u64, idle_cycles: u64) -> Self {
        Self {
            frames,
            exec_cycles,
            idle_cycles,
            depends_on: Vec::new(),
        }
    }

    pub fn depends_on(mut self, producers: impl IntoIterator<Item = usize>) -> Self {
        self.depends_on = producers.into_iter().collect();
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TaskImage {
    pub id: usize,
    frames: Vec<Frame>,
    real_frames: usize,
    pub exec_cycles: u64,
    pub idle_cycles: u64,
    pub depends_on: Vec<usize>,
}

impl TaskImage {
    pub fn frames(&self) -> &[Frame] {
        &self.frames
    }

    /// Frames that exist in hardware; indices at or past this are dummies.
    pub fn real_frames(&self) -> usize {
        self.real_frames
    }

    pub fn is_dummy(&self, frame: usize) -> bool {
        frame >= self.real_frames
    }
}

/// Coordinates of one configuration bit: task, frame, row, column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BitAddr {
    pub task: usize,
    pub frame: usize,
    pub row: usize,
    pub col: usize,
}

impl BitAddr {
    pub const fn new(task: usize, frame: usize, row: usize, col: usize) -> Self {
        Self { task, frame, row, col }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigMemory {
    geometry: FrameGeometry,
    frames_per_task: usize,
    tasks: Vec<TaskImage>,
}

impl ConfigMemory {
    /// Lays out tasks as rows and pads each with zero frames up to the
    /// longest task.
    pub fn build(specs: Vec<TaskSpec>, geometry: FrameGeometry) -> Result<Self> {
        if specs.is_empty() {
            return Err(Error::InvalidArgument("memory needs at least one task"));
        }
        let task_count = specs.len();
        let mut frames_per_task = 0;
        for spec in &specs {
            if spec.frames.is_empty() {
                return Err(Error::InvalidArgument("every task needs at least one frame"));
            }
            if spec.exec_cycles == 0 {
                return Err(Error::InvalidArgument("execution cycles must be at least 1"));
            }
            for f in &spec.frames {
                if f.geometry() != geometry {
                    return Err(Error::Geometry {
                        expected: (geometry.rows, geometry.cols),
                        found: (f.geometry().rows, f.geometry().cols),
                    });
                }
            }
            for &p in &spec.depends_on {
                if p >= task_count {
                    return Err(Error::OutOfRange { what: "dependency task", index: p, len: task_count });
                }
            }
            frames_per_task = frames_per_task.max(spec.frames.len());
        }
        let tasks = specs
            .into_iter()
            .enumerate()
            .map(|(id, spec)| {
                let real_frames = spec.frames.len();
                let mut frames = spec.frames;
                frames.resize(frames_per_task, Frame::zeros(geometry));
                TaskImage {
                    id,
                    frames,
                    real_frames,
                    exec_cycles: spec.exec_cycles,
                    idle_cycles: spec.idle_cycles,
                    depends_on: spec.depends_on,
                }
            })
            .collect();
        Ok(Self { geometry, frames_per_task, tasks })
    }

    /// Memory with uniformly random frame content.
    pub fn random<R: RngCore + ?Sized>(
        geometry: FrameGeometry,
        layout: &[TaskLayout],
        rng: &mut R,
    ) -> Result<Self> {
        let specs = layout
            .iter()
            .map(|l| TaskSpec {
                frames: (0..l.frames).map(|_| Frame::random(geometry, rng)).collect(),
                exec_cycles: l.exec_cycles,
                idle_cycles: l.idle_cycles,
                depends_on: l.depends_on.clone(),
            })
            .collect();
        Self::build(specs, geometry)
    }

    /// Memory with all-zero frame content.
    pub fn zeroed(geometry: FrameGeometry, layout: &[TaskLayout]) -> Result<Self> {
        let specs = layout
            .iter()
            .map(|l| TaskSpec {
                frames: (0..l.frames).map(|_| Frame::zeros(geometry)).collect(),
                exec_cycles: l.exec_cycles,
                idle_cycles: l.idle_cycles,
                depends_on: l.depends_on.clone(),
            })
            .collect();
        Self::build(specs, geometry)
    }

    pub fn geometry(&self) -> FrameGeometry {
        self.geometry
    }

    /// `N`
    pub fn task_count(&self) -> usize {
        self.tasks.len()
    }

    /// `n`, after padding.
    pub fn frames_per_task(&self) -> usize {
        self.frames_per_task
    }

    /// `U = N * n`, dummies included.
    pub fn total_frames(&self) -> usize {
        self.tasks.len() * self.frames_per_task
    }

    pub fn real_frame_total(&self) -> usize {
        self.tasks.iter().map(|t| t.real_frames).sum()
    }

    pub fn tasks(&self) -> &[TaskImage] {
        &self.tasks
    }

    pub fn task(&self, z: usize) -> Result<&TaskImage> {
        self.tasks
            .get(z)
            .ok_or(Error::OutOfRange { what: "task", index: z, len: self.tasks.len() })
    }

    pub fn frame(&self, task: usize, frame: usize) -> &Frame {
        &self.tasks[task].frames[frame]
    }

    pub fn frame_mut(&mut self, task: usize, frame: usize) -> &mut Frame {
        &mut self.tasks[task].frames[frame]
    }

    pub fn check_addr(&self, a: BitAddr) -> Result<()> {
        let check = |what, index, len| {
            if index < len {
                Ok(())
            } else {
                Err(Error::OutOfRange { what, index, len })
            }
        };
        check("task", a.task, self.tasks.len())?;
        check("frame", a.frame, self.frames_per_task)?;
        check("row", a.row, self.geometry.rows)?;
        check("column", a.col, self.geometry.cols)
    }

    pub fn get(&self, a: BitAddr) -> bool {
        self.frame(a.task, a.frame).get(a.row, a.col)
    }

    pub fn flip(&mut self, a: BitAddr) {
        self.frame_mut(a.task, a.frame).flip(a.row, a.col);
    }

    /// XOR of all frames of task `z`.
    pub fn horizontal_parity(&self, z: usize) -> Result<Frame> {
        let task = self.task(z)?;
        let mut p = Frame::zeros(self.geometry);
        for f in &task.frames {
            p.xor_assign(f);
        }
        Ok(p)
    }

    /// XOR of frame `k` across all tasks.
    pub fn vertical_parity(&self, k: usize) -> Result<Frame> {
        if k >= self.frames_per_task {
            return Err(Error::OutOfRange { what: "frame", index: k, len: self.frames_per_task });
        }
        let mut p = Frame::zeros(self.geometry);
        for t in &self.tasks {
            p.xor_assign(&t.frames[k]);
        }
        Ok(p)
    }

    pub fn vertical_parities(&self) -> Vec<Frame> {
        let mut out = alloc::vec![Frame::zeros(self.geometry); self.frames_per_task];
        for t in &self.tasks {
            for (p, f) in out.iter_mut().zip(t.frames.iter()) {
                p.xor_assign(f);
            }
        }
        out
    }

    /// Bits of one task in signature order: frames in order, rows top to
    /// bottom, columns left to right, packed MSB first. Dummy frames included.
    pub fn serialize_task(&self, z: usize) -> Result<Vec<u8>> {
        let task = self.task(z)?;
        let mut out = Vec::with_capacity(self.task_bits().div_ceil(8));
        let mut packer = BitPacker::new(|chunk: &[u8]| out.extend_from_slice(chunk));
        for f in &task.frames {
            packer.push(f.as_bytes(), self.geometry.bits());
        }
        packer.finish();
        Ok(out)
    }

    /// SHA3-512 over [`serialize_task`](Self::serialize_task), streamed.
    pub fn task_digest(&self, z: usize) -> Result<Digest512> {
        let task = self.task(z)?;
        let mut h = Sha3_512::new();
        {
            let mut packer = BitPacker::new(|chunk: &[u8]| h.update(chunk));
            for f in &task.frames {
                packer.push(f.as_bytes(), self.geometry.bits());
            }
            packer.finish();
        }
        Ok(h.finalize())
    }

    /// Bits per (padded) task.
    pub fn task_bits(&self) -> usize {
        self.frames_per_task * self.geometry.bits()
    }

    pub fn snapshot_golden(&self) -> GoldenStore {
        GoldenStore {
            geometry: self.geometry,
            frames_per_task: self.frames_per_task,
            hashes: (0..self.tasks.len())
                .map(|z| self.task_digest(z).expect("task index in range"))
                .collect(),
            hp: (0..self.tasks.len())
                .map(|z| self.horizontal_parity(z).expect("task index in range"))
                .collect(),
            vp: self.vertical_parities(),
        }
    }

    pub fn redundancy(&self) -> Redundancy {
        Redundancy::for_shape(
            self.tasks.len() as u64,
            self.frames_per_task as u64,
            self.geometry,
        )
    }

    /// Same geometry, task count and padded frame count.
    pub fn same_shape(&self, other: &ConfigMemory) -> bool {
        self.geometry == other.geometry
            && self.frames_per_task == other.frames_per_task
            && self.tasks.len() == other.tasks.len()
    }

    /// Tasks whose frame content differs from `other`.
    pub fn differing_tasks(&self, other: &ConfigMemory) -> Vec<usize> {
        self.tasks
            .iter()
            .zip(other.tasks.iter())
            .filter(|(a, b)| a.frames != b.frames)
            .map(|(a, _)| a.id)
            .collect()
    }
}

/// Frame count and phase lengths for one task, without content.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TaskLayout {
    pub frames: usize,
    pub exec_cycles: u64,
    pub idle_cycles: u64,
    pub depends_on: Vec<usize>,
}

/// Reference data kept off-chip: one digest and one horizontal parity frame
/// per task, one vertical parity frame per frame index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoldenStore {
    pub geometry: FrameGeometry,
    pub frames_per_task: usize,
    pub hashes: Vec<Digest512>,
    pub hp: Vec<Frame>,
    pub vp: Vec<Frame>,
}

impl GoldenStore {
    pub fn task_count(&self) -> usize {
        self.hashes.len()
    }

    pub fn check_shape(&self, memory: &ConfigMemory) -> Result<()> {
        if self.geometry != memory.geometry() {
            return Err(Error::ShapeMismatch("golden store frame geometry differs from memory"));
        }
        if self.hashes.len() != memory.task_count() || self.hp.len() != memory.task_count() {
            return Err(Error::ShapeMismatch("golden store task count differs from memory"));
        }
        if self.frames_per_task != memory.frames_per_task() || self.vp.len() != self.frames_per_task {
            return Err(Error::ShapeMismatch("golden store frame count differs from memory"));
        }
        if self.hp.iter().chain(self.vp.iter()).any(|f| f.geometry() != self.geometry) {
            return Err(Error::ShapeMismatch("golden parity frame has wrong geometry"));
        }
        Ok(())
    }
}

/// Stored-bit overhead of the hash + product-code scheme against keeping a
/// full golden image for scrubbing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Redundancy {
    /// `N * 512`
    pub detection_bits: u64,
    /// `N * v * h`
    pub horizontal_parity_bits: u64,
    /// `n * v * h`
    pub vertical_parity_bits: u64,
    pub proposed_bits: u64,
    /// `U * v * h`
    pub scrubbing_bits: u64,
}

impl Redundancy {
    pub fn for_shape(tasks: u64, frames_per_task: u64, geometry: FrameGeometry) -> Self {
        let frame_bits = geometry.bits() as u64;
        let detection_bits = tasks * 512;
        let horizontal_parity_bits = tasks * frame_bits;
        let vertical_parity_bits = frames_per_task * frame_bits;
        Self {
            detection_bits,
            horizontal_parity_bits,
            vertical_parity_bits,
            proposed_bits: detection_bits + horizontal_parity_bits + vertical_parity_bits,
            scrubbing_bits: tasks * frames_per_task * frame_bits,
        }
    }
}

/// Concatenates bit strings whose lengths need not be byte multiples.
struct BitPacker<F: FnMut(&[u8])> {
    sink: F,
    buf: [u8; 256],
    len: usize,
    acc: u8,
    acc_bits: u32,
}

impl<F: FnMut(&[u8])> BitPacker<F> {
    fn new(sink: F) -> Self {
        Self { sink, buf: [0; 256], len: 0, acc: 0, acc_bits: 0 }
    }

    fn flush(&mut self) {
        if self.len > 0 {
            (self.sink)(&self.buf[..self.len]);
            self.len = 0;
        }
    }

    fn emit(&mut self, b: u8) {
        if self.len == self.buf.len() {
            self.flush();
        }
        self.buf[self.len] = b;
        self.len += 1;
    }

    /// Appends the first `nbits` bits of `bytes` (MSB first).
    fn push(&mut self, bytes: &[u8], nbits: usize) {
        if self.acc_bits == 0 && nbits % 8 == 0 {
            self.flush();
            (self.sink)(&bytes[..nbits / 8]);
            return;
        }
        for &b in &bytes[..nbits / 8] {
            self.push_bits(b, 8);
        }
        if nbits % 8 != 0 {
            self.push_bits(bytes[nbits / 8], (nbits % 8) as u32);
        }
    }

    fn push_bits(&mut self, b: u8, count: u32) {
        let b = if count == 8 { b } else { b & (0xFFu8 << (8 - count)) };
        self.acc |= b >> self.acc_bits;
        let total = self.acc_bits + count;
        if total >= 8 {
            let out = self.acc;
            self.emit(out);
            self.acc = if self.acc_bits == 0 { 0 } else { b << (8 - self.acc_bits) };
            self.acc_bits = total - 8;
        } else {
            self.acc_bits = total;
        }
    }

    fn finish(mut self) {
        if self.acc_bits > 0 {
            let out = self.acc;
            self.emit(out);
        }
        self.flush();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::keccak::sha3_512;
    use alloc::vec;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn g(r: usize, c: usize) -> FrameGeometry {
        FrameGeometry::new(r, c).unwrap()
    }

    fn layout(frames: &[usize]) -> Vec<TaskLayout> {
        frames
            .iter()
            .map(|&f| TaskLayout { frames: f, exec_cycles: 10, idle_cycles: 6, depends_on: vec![] })
            .collect()
    }

    #[test]
    fn pads_to_longest_task() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let m = ConfigMemory::random(g(4, 4), &layout(&[3, 5, 2]), &mut rng).unwrap();
        assert_eq!(m.frames_per_task(), 5);
        assert_eq!(m.total_frames(), 15);
        assert_eq!(m.real_frame_total(), 10);
        for t in m.tasks() {
            assert_eq!(t.frames().len(), 5);
            assert!(t.frames()[t.real_frames()..].iter().all(Frame::is_zero));
        }
        assert!(m.tasks()[2].is_dummy(2) && !m.tasks()[2].is_dummy(1));
    }

    #[test]
    fn single_frame_memory() {
        let m = ConfigMemory::zeroed(g(1, 1), &layout(&[1])).unwrap();
        assert_eq!((m.frames_per_task(), m.total_frames()), (1, 1));
    }

    #[test]
    fn paper_scale_shape() {
        let m = ConfigMemory::zeroed(FrameGeometry::SEVEN_SERIES, &layout(&[100; 10])).unwrap();
        assert_eq!(m.total_frames(), 1000);
        assert_eq!(m.total_frames() * m.geometry().bits(), 3_232_000);
    }

    #[test]
    fn build_errors() {
        assert_eq!(
            ConfigMemory::build(vec![], g(2, 2)),
            Err(Error::InvalidArgument("memory needs at least one task"))
        );
        let bad = TaskSpec::new(vec![Frame::zeros(g(2, 3))], 1, 0);
        assert!(matches!(
            ConfigMemory::build(vec![bad], g(2, 2)),
            Err(Error::Geometry { expected: (2, 2), found: (2, 3) })
        ));
        let zero_exec = TaskSpec::new(vec![Frame::zeros(g(2, 2))], 0, 0);
        assert!(ConfigMemory::build(vec![zero_exec], g(2, 2)).is_err());
        let dangling = TaskSpec::new(vec![Frame::zeros(g(2, 2))], 1, 0).depends_on([3]);
        assert!(ConfigMemory::build(vec![dangling], g(2, 2)).is_err());
    }

    #[test]
    fn parity_examples() {
        let geom = g(3, 5);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let a = Frame::random(geom, &mut rng);
        let zero = ConfigMemory::zeroed(geom, &layout(&[3, 3])).unwrap();
        assert!(zero.horizontal_parity(0).unwrap().is_zero());
        assert!(zero.vertical_parity(2).unwrap().is_zero());

        let single = ConfigMemory::build(vec![TaskSpec::new(vec![a.clone()], 1, 0)], geom).unwrap();
        assert_eq!(single.horizontal_parity(0).unwrap(), a);

        let twins =
            ConfigMemory::build(vec![TaskSpec::new(vec![a.clone(), a.clone()], 1, 0)], geom).unwrap();
        assert!(twins.horizontal_parity(0).unwrap().is_zero());

        let pair = ConfigMemory::build(
            vec![TaskSpec::new(vec![a.clone()], 1, 0), TaskSpec::new(vec![a.clone()], 1, 0)],
            geom,
        )
        .unwrap();
        assert!(pair.vertical_parity(0).unwrap().is_zero());
        let mut flipped = pair.clone();
        flipped.flip(BitAddr::new(1, 0, 2, 4));
        assert_eq!(flipped.vertical_parity(0).unwrap().ones().collect::<Vec<_>>(), vec![(2, 4)]);
        assert!(pair.vertical_parity(1).is_err());
    }

    #[test]
    fn serialization_is_frame_concatenation_when_aligned() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let m = ConfigMemory::random(g(4, 4), &layout(&[2, 1]), &mut rng).unwrap();
        let mut expect = m.frame(1, 0).as_bytes().to_vec();
        expect.extend_from_slice(&[0, 0]);
        assert_eq!(m.serialize_task(1).unwrap(), expect);
        assert_eq!(m.task_digest(1).unwrap(), sha3_512(&expect));
    }

    #[test]
    fn serialization_packs_unaligned_frames_continuously() {
        // 3x3 frames: 9 bits each, two frames -> 18 bits -> 3 bytes
        let geom = g(3, 3);
        let a = Frame::from_bits(geom, [1, 0, 1, 1, 0, 0, 1, 1, 1].map(|b| b == 1)).unwrap();
        let b = Frame::from_bits(geom, [0, 1, 1, 0, 0, 0, 0, 0, 1].map(|b| b == 1)).unwrap();
        let m = ConfigMemory::build(vec![TaskSpec::new(vec![a, b], 1, 0)], geom).unwrap();
        // 101100111 011000001 + 6 zero pad bits
        assert_eq!(m.serialize_task(0).unwrap(), vec![0b1011_0011, 0b1011_0000, 0b0100_0000]);
        assert_eq!(m.task_digest(0).unwrap(), sha3_512(&m.serialize_task(0).unwrap()));
    }

    #[test]
    fn golden_store_invariants() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let m = ConfigMemory::random(g(5, 7), &layout(&[3, 2, 3]), &mut rng).unwrap();
        let gs = m.snapshot_golden();
        assert_eq!(gs, m.snapshot_golden());
        gs.check_shape(&m).unwrap();
        for z in 0..3 {
            let mut x = Frame::zeros(m.geometry());
            for k in 0..3 {
                x.xor_assign(m.frame(z, k));
            }
            assert_eq!(gs.hp[z], x);
            assert_eq!(gs.hashes[z], sha3_512(&m.serialize_task(z).unwrap()));
        }
        for k in 0..3 {
            let mut x = Frame::zeros(m.geometry());
            for z in 0..3 {
                x.xor_assign(m.frame(z, k));
            }
            assert_eq!(gs.vp[k], x);
        }
    }

    #[test]
    fn zero_memory_golden() {
        let m = ConfigMemory::zeroed(g(4, 8), &layout(&[2, 2])).unwrap();
        let gs = m.snapshot_golden();
        assert!(gs.hp.iter().chain(gs.vp.iter()).all(Frame::is_zero));
        assert!(gs.hashes.iter().all(|h| *h == sha3_512(&[0u8; 8])));
    }

    #[test]
    fn redundancy_formulas() {
        let r = Redundancy::for_shape(10, 100, FrameGeometry::SEVEN_SERIES);
        assert_eq!(r.scrubbing_bits, 3_232_000);
        assert_eq!(r.detection_bits, 5_120);
        assert_eq!(r.horizontal_parity_bits, 32_320);
        assert_eq!(r.vertical_parity_bits, 323_200);
        assert_eq!(r.proposed_bits, 360_640);

        let tiny = Redundancy::for_shape(1, 1, g(1, 1));
        assert_eq!((tiny.proposed_bits, tiny.scrubbing_bits), (514, 1));

        let doubled = Redundancy::for_shape(10, 200, FrameGeometry::SEVEN_SERIES);
        assert_eq!(doubled.scrubbing_bits, 2 * r.scrubbing_bits);
        assert_eq!(doubled.proposed_bits - r.proposed_bits, 100 * 3232);
    }

    #[test]
    fn shape_mismatch_detected() {
        let a = ConfigMemory::zeroed(g(2, 2), &layout(&[2, 2])).unwrap();
        let b = ConfigMemory::zeroed(g(2, 2), &layout(&[2, 3])).unwrap();
        assert!(b.snapshot_golden().check_shape(&a).is_err());
        assert!(!a.same_shape(&b));
    }
}
