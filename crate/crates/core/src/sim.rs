//! Fault-injection campaigns.
//!
//! Each run starts from the pristine memory, injects one pattern at cycle 0
//! and follows it until every detected fault has been dealt with. The
//! proposed scheme reads back and hashes every task, then repairs faulty
//! tasks one by one through the single download port in scheduler order. The
//! baseline rewrites the whole memory from the golden image.
//!
//! Both schemes draw the per-run randomness (fault seed, task phases, scan
//! offset) in the same order, so run `r` of each sees the same upset.

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::correct::{correct_task, CorrectionOutcome, CorrectionStatus};
use crate::detect::{scan, task_detection_cycles};
use crate::error::{Error, Result};
use crate::fault::FaultModel;
use crate::frame::FrameGeometry;
use crate::memory::{ConfigMemory, GoldenStore, Redundancy};
use crate::sched::{
    final_priority, priority, select, Candidate, Criticality, CriticalityMode, DependencyGraph, Priority,
    PrioritySpec, TaskClock, Weights,
};
use crate::timing::TimingModel;

/// When read-back scans start relative to the upset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case", tag = "kind"))]
pub enum ScanPolicy {
    /// Scans run back to back; a full scan follows the upset immediately.
    #[default]
    Continuous,
    /// A scan starts every `period_cycles`; the upset lands uniformly within
    /// a period.
    Periodic { period_cycles: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case", tag = "kind"))]
pub enum BaselineMode {
    /// Scan as the proposed scheme does, then rewrite everything if any task
    /// is faulty.
    #[default]
    Readback,
    /// Rewrite everything every `period_cycles`, no read-back.
    Blind { period_cycles: u64 },
}

/// Initial status register of every task at the start of a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case", tag = "kind"))]
pub enum PhaseInit {
    /// Uniform in `0..=E+I`, drawn per task per run.
    #[default]
    Random,
    /// Fixed register value (clamped to `E+I`).
    Status { st: u64 },
}

#[derive(Debug, Clone)]
pub struct CampaignConfig {
    /// Pristine memory; runs work on copies.
    pub memory: ConfigMemory,
    /// The model's own seed is replaced per run.
    pub fault_model: FaultModel,
    pub weights: Weights,
    pub timing: TimingModel,
    pub scan_policy: ScanPolicy,
    pub baseline: BaselineMode,
    pub criticality_mode: CriticalityMode,
    pub phase_init: PhaseInit,
    pub runs: usize,
    pub seed: u64,
}

impl CampaignConfig {
    pub fn new(memory: ConfigMemory) -> Self {
        Self {
            memory,
            fault_model: FaultModel::default(),
            weights: Weights::default(),
            timing: TimingModel::default(),
            scan_policy: ScanPolicy::default(),
            baseline: BaselineMode::default(),
            criticality_mode: CriticalityMode::default(),
            phase_init: PhaseInit::default(),
            runs: 1,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.runs == 0 {
            return Err(Error::InvalidArgument("a campaign needs at least one run"));
        }
        self.weights.validate()?;
        self.timing.validate()?;
        if matches!(self.scan_policy, ScanPolicy::Periodic { period_cycles: 0 })
            || matches!(self.baseline, BaselineMode::Blind { period_cycles: 0 })
        {
            return Err(Error::InvalidArgument("periods must be positive"));
        }
        DependencyGraph::from_memory(&self.memory)?;
        // Surfaces model/memory inconsistencies before any run starts.
        self.fault_model.generate(&self.memory)?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Scheme {
    Proposed,
    Scrubbing,
}

/// One occupation of the download port, `[start, end)` in cycles since the upset.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PortWindow {
    pub task: Option<usize>,
    pub start: u64,
    pub end: u64,
    pub frames: u64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RunRecord {
    pub scheme: Scheme,
    pub run: usize,
    pub fault_seed: u64,
    pub flips: usize,
    /// Distinct (task, frame) pairs hit.
    pub faulty_frames: usize,
    /// Tasks whose content differs from golden after injection.
    pub corrupted_tasks: Vec<usize>,
    /// Tasks the scan reported; empty for blind scrubbing.
    pub detected_tasks: Vec<usize>,
    pub false_negatives: usize,
    pub false_positives: usize,
    pub tasks_scanned: usize,
    pub corrected: usize,
    pub uncorrectable: usize,
    pub clean: usize,
    /// Upset to end of the detecting scan.
    pub detection_latency: u64,
    /// Upset to completion of the last repair; 0 when nothing was repaired.
    pub correction_latency: u64,
    pub frames_downloaded: u64,
    pub download_cycles: u64,
    /// Busy cycles of corrupted tasks before their repair.
    pub exposure_cycles: u64,
    /// Cycles spent waiting because no faulty task had enough slack.
    pub deferral_cycles: u64,
    /// Selections made without enough slack because no task could ever fit.
    pub forced_selections: usize,
    pub correction_order: Vec<usize>,
    pub outcomes: Vec<CorrectionOutcome>,
    pub port: Vec<PortWindow>,
    /// Memory equals golden at the end of the run.
    pub restored: bool,
    pub redundancy: Redundancy,
}

impl RunRecord {
    fn new(scheme: Scheme, run: usize, draw: &RunDraw, redundancy: Redundancy) -> Self {
        Self {
            scheme,
            run,
            fault_seed: draw.fault_seed,
            flips: 0,
            faulty_frames: 0,
            corrupted_tasks: Vec::new(),
            detected_tasks: Vec::new(),
            false_negatives: 0,
            false_positives: 0,
            tasks_scanned: 0,
            corrected: 0,
            uncorrectable: 0,
            clean: 0,
            detection_latency: 0,
            correction_latency: 0,
            frames_downloaded: 0,
            download_cycles: 0,
            exposure_cycles: 0,
            deferral_cycles: 0,
            forced_selections: 0,
            correction_order: Vec::new(),
            outcomes: Vec::new(),
            port: Vec::new(),
            restored: false,
            redundancy,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CampaignMetrics {
    pub scheme: Scheme,
    pub redundancy: Redundancy,
    pub runs: Vec<RunRecord>,
}

/// Per-run random draws shared by both schemes.
struct RunDraw {
    fault_seed: u64,
    phases: Vec<u64>,
    /// Offset of the upset within a scan or scrub period.
    offset_fraction: u64,
}

/// A validated campaign with its golden store and criticality precomputed.
///
/// Runs are independent; `run_proposed` and `run_baseline` can be called
/// from several threads.
#[derive(Debug, Clone)]
pub struct Campaign {
    config: CampaignConfig,
    golden: GoldenStore,
    criticality: Criticality,
    detection_cycles: Vec<u64>,
}

impl Campaign {
    pub fn new(config: CampaignConfig) -> Result<Self> {
        config.validate()?;
        let graph = DependencyGraph::from_memory(&config.memory)?;
        let criticality = Criticality::compute(&graph, config.criticality_mode);
        let golden = config.memory.snapshot_golden();
        let detection_cycles = (0..config.memory.task_count())
            .map(|z| task_detection_cycles(&config.memory, z, &config.timing))
            .collect::<Result<_>>()?;
        Ok(Self { config, golden, criticality, detection_cycles })
    }

    pub fn config(&self) -> &CampaignConfig {
        &self.config
    }

    pub fn golden(&self) -> &GoldenStore {
        &self.golden
    }

    pub fn criticality(&self) -> &Criticality {
        &self.criticality
    }

    fn draw(&self, run: usize) -> RunDraw {
        let mut rng = ChaCha8Rng::seed_from_u64(self.config.seed);
        rng.set_stream(run as u64);
        let fault_seed = rng.next_u64();
        let phases = self
            .config
            .memory
            .tasks()
            .iter()
            .map(|t| {
                let span = t.exec_cycles + t.idle_cycles;
                let draw = rng.random_range(0..=span);
                match self.config.phase_init {
                    PhaseInit::Random => draw,
                    PhaseInit::Status { st } => st.min(span),
                }
            })
            .collect();
        let offset_fraction = rng.next_u64();
        RunDraw { fault_seed, phases, offset_fraction }
    }

    fn inject(&self, draw: &RunDraw, record: &mut RunRecord) -> Result<ConfigMemory> {
        let mut memory = self.config.memory.clone();
        let pattern = self.config.fault_model.with_seed(draw.fault_seed).generate(&memory)?;
        pattern.apply(&mut memory)?;
        record.flips = pattern.len();
        record.faulty_frames = pattern.frames().len();
        record.corrupted_tasks = memory.differing_tasks(&self.config.memory);
        Ok(memory)
    }

    fn clocks(&self, draw: &RunDraw) -> Vec<TaskClock> {
        self.config
            .memory
            .tasks()
            .iter()
            .zip(draw.phases.iter())
            .map(|(t, &st)| TaskClock::from_status(t.exec_cycles, t.idle_cycles, st))
            .collect()
    }

    fn priority_spec(&self, z: usize) -> PrioritySpec {
        let t = &self.config.timing;
        PrioritySpec {
            frames: self.config.memory.tasks()[z].real_frames() as u64,
            total_frames: self.config.memory.real_frame_total() as u64,
            // single-frame repair: one candidate tried, one frame written
            correction_cycles: t.correction_cycles(1),
            download_cycles: t.download_cycles(1),
            detection_cycles: self.detection_cycles[z],
        }
    }

    fn scan_wait(&self, draw: &RunDraw) -> u64 {
        match self.config.scan_policy {
            ScanPolicy::Continuous => 0,
            ScanPolicy::Periodic { period_cycles } => period_cycles - draw.offset_fraction % period_cycles,
        }
    }

    /// One run of the hash + erasure-product-code scheme.
    pub fn run_proposed(&self, run: usize) -> Result<RunRecord> {
        let draw = self.draw(run);
        let mut rec = RunRecord::new(Scheme::Proposed, run, &draw, self.redundancy());
        let mut memory = self.inject(&draw, &mut rec)?;
        let mut sim = Timeline::new(self.clocks(&draw), &rec.corrupted_tasks);

        sim.advance(self.scan_wait(&draw), None);
        let report = scan(&memory, &self.golden, &self.config.timing)?;
        sim.advance(report.scan_cycles, None);
        rec.detection_latency = sim.now;
        rec.tasks_scanned = memory.task_count();
        self.score_detection(&mut rec, &report.faulty_tasks);
        rec.detected_tasks = report.faulty_tasks.clone();

        let mut pending = report.faulty_tasks;
        while !pending.is_empty() {
            let mut candidates = Vec::with_capacity(pending.len());
            for &z in &pending {
                let spec = self.priority_spec(z);
                if let Priority::Slack(p) = priority(&sim.clocks[z], &spec) {
                    candidates.push(self.candidate(z, p, &spec, &sim)?);
                }
            }
            if candidates.is_empty() {
                let wait = pending
                    .iter()
                    .filter_map(|&z| {
                        let spec = self.priority_spec(z);
                        sim.clocks[z].ticks_until_slack(spec.correction_cycles + spec.download_cycles)
                    })
                    .min();
                if let Some(wait) = wait {
                    sim.advance(wait, None);
                    rec.deferral_cycles += wait;
                    continue;
                }
                rec.forced_selections += 1;
                for &z in &pending {
                    candidates.push(self.candidate(z, 0, &self.priority_spec(z), &sim)?);
                }
            }
            let chosen = select(&candidates).ok_or(Error::Invariant("selection from non-empty candidates"))?;
            pending.retain(|&z| z != chosen);
            rec.correction_order.push(chosen);

            let outcome = correct_task(&mut memory, &self.golden, chosen)?;
            let t = &self.config.timing;
            sim.advance(t.correction_cycles(outcome.attempts.max(1) as u64), None);
            match outcome.status {
                CorrectionStatus::Corrected => {
                    let z = chosen;
                    if memory.task(z)?.frames() != self.config.memory.task(z)?.frames() {
                        return Err(Error::Invariant("corrected task differs from golden"));
                    }
                    let rt = t.download_cycles(1);
                    rec.port.push(PortWindow { task: Some(z), start: sim.now, end: sim.now + rt, frames: 1 });
                    // the task stays idle while its own region is rewritten
                    sim.advance(rt, Some(z));
                    sim.repaired(z);
                    rec.frames_downloaded += 1;
                    rec.download_cycles += rt;
                    rec.corrected += 1;
                }
                CorrectionStatus::Uncorrectable => rec.uncorrectable += 1,
                CorrectionStatus::Clean => rec.clean += 1,
            }
            rec.correction_latency = sim.now;
            rec.outcomes.push(outcome);
        }
        rec.clean += rec.tasks_scanned - rec.detected_tasks.len();
        rec.exposure_cycles = sim.exposure;
        rec.restored = memory == self.config.memory;
        if rec.uncorrectable == 0 && rec.false_negatives == 0 && !rec.restored {
            return Err(Error::Invariant("memory not restored after all faults were corrected"));
        }
        check_port_exclusive(&rec.port)?;
        Ok(rec)
    }

    fn candidate(&self, z: usize, slack: u64, spec: &PrioritySpec, sim: &Timeline) -> Result<Candidate> {
        let fp = final_priority(
            slack,
            &self.config.weights,
            spec,
            self.criticality.zeta(z),
            self.config.memory.tasks()[z].exec_cycles,
        )?;
        Ok(Candidate { task: z, fp, st: sim.clocks[z].st })
    }

    fn score_detection(&self, rec: &mut RunRecord, detected: &[usize]) {
        rec.false_negatives = rec.corrupted_tasks.iter().filter(|z| !detected.contains(z)).count();
        rec.false_positives = detected.iter().filter(|z| !rec.corrupted_tasks.contains(z)).count();
    }

    /// One run of the scrubbing baseline on the same upset as `run_proposed(run)`.
    pub fn run_baseline(&self, run: usize) -> Result<RunRecord> {
        let draw = self.draw(run);
        let mut rec = RunRecord::new(Scheme::Scrubbing, run, &draw, self.redundancy());
        let mut memory = self.inject(&draw, &mut rec)?;
        let mut sim = Timeline::new(self.clocks(&draw), &rec.corrupted_tasks);
        let total = self.config.memory.total_frames() as u64;
        let rt = self.config.timing.download_cycles(total);

        let scrub = match self.config.baseline {
            BaselineMode::Readback => {
                sim.advance(self.scan_wait(&draw), None);
                let report = scan(&memory, &self.golden, &self.config.timing)?;
                sim.advance(report.scan_cycles, None);
                rec.detection_latency = sim.now;
                rec.tasks_scanned = memory.task_count();
                self.score_detection(&mut rec, &report.faulty_tasks);
                let any = !report.faulty_tasks.is_empty();
                rec.detected_tasks = report.faulty_tasks;
                any
            }
            BaselineMode::Blind { period_cycles } => {
                sim.advance(period_cycles - draw.offset_fraction % period_cycles, None);
                true
            }
        };
        if scrub {
            rec.port.push(PortWindow { task: None, start: sim.now, end: sim.now + rt, frames: total });
            sim.advance(rt, None);
            memory = self.config.memory.clone();
            rec.frames_downloaded = total;
            rec.download_cycles = rt;
            if !rec.corrupted_tasks.is_empty() {
                rec.correction_latency = sim.now;
            }
            rec.corrected = rec.corrupted_tasks.len();
            for z in rec.corrupted_tasks.clone() {
                sim.repaired(z);
            }
        }
        rec.clean = rec.tasks_scanned.saturating_sub(rec.detected_tasks.len());
        rec.exposure_cycles = sim.exposure;
        rec.restored = memory == self.config.memory;
        check_port_exclusive(&rec.port)?;
        Ok(rec)
    }

    pub fn redundancy(&self) -> Redundancy {
        self.config.memory.redundancy()
    }
}

fn check_port_exclusive(port: &[PortWindow]) -> Result<()> {
    if port.windows(2).all(|w| w[0].end <= w[1].start) && port.iter().all(|w| w.start <= w.end) {
        Ok(())
    } else {
        Err(Error::Invariant("two downloads overlap on the configuration port"))
    }
}

/// Global cycle counter plus per-task clocks and exposure bookkeeping.
struct Timeline {
    now: u64,
    clocks: Vec<TaskClock>,
    corrupted: Vec<bool>,
    exposure: u64,
}

impl Timeline {
    fn new(clocks: Vec<TaskClock>, corrupted_tasks: &[usize]) -> Self {
        let mut corrupted = vec![false; clocks.len()];
        for &z in corrupted_tasks {
            corrupted[z] = true;
        }
        Self { now: 0, clocks, corrupted, exposure: 0 }
    }

    /// Advances every clock except `frozen`.
    fn advance(&mut self, cycles: u64, frozen: Option<usize>) {
        if cycles == 0 {
            return;
        }
        self.now += cycles;
        for (z, clock) in self.clocks.iter_mut().enumerate() {
            if Some(z) == frozen {
                continue;
            }
            let busy = clock.advance(cycles);
            if self.corrupted[z] {
                self.exposure += busy;
            }
        }
    }

    fn repaired(&mut self, z: usize) {
        self.corrupted[z] = false;
    }
}

/// Runs every run of the proposed scheme, in order.
pub fn run_campaign(config: CampaignConfig) -> Result<CampaignMetrics> {
    let campaign = Campaign::new(config)?;
    let runs = (0..campaign.config.runs).map(|r| campaign.run_proposed(r)).collect::<Result<_>>()?;
    Ok(CampaignMetrics { scheme: Scheme::Proposed, redundancy: campaign.redundancy(), runs })
}

/// Runs every run of the scrubbing baseline, in order.
pub fn run_scrub_baseline(config: CampaignConfig) -> Result<CampaignMetrics> {
    let campaign = Campaign::new(config)?;
    let runs = (0..campaign.config.runs).map(|r| campaign.run_baseline(r)).collect::<Result<_>>()?;
    Ok(CampaignMetrics { scheme: Scheme::Scrubbing, redundancy: campaign.redundancy(), runs })
}

/// Aggregates over the runs of one campaign.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Summary {
    pub runs: usize,
    pub runs_with_faults: usize,
    pub corrupted_tasks: usize,
    pub detected_corrupted: usize,
    pub false_negatives: usize,
    pub false_positives: usize,
    pub corrected: usize,
    pub uncorrectable: usize,
    pub mean_detection_latency: f64,
    pub max_detection_latency: u64,
    /// Over runs with at least one corrupted task.
    pub mean_correction_latency: f64,
    pub max_correction_latency: u64,
    pub frames_downloaded: u64,
    pub download_cycles: u64,
    pub exposure_cycles: u64,
}

impl Summary {
    /// `detected_corrupted / corrupted_tasks`; `None` without faults.
    pub fn detection_rate(&self) -> Option<f64> {
        (self.corrupted_tasks > 0).then(|| self.detected_corrupted as f64 / self.corrupted_tasks as f64)
    }

    /// `corrected / (corrected + uncorrectable)`; `None` if nothing was attempted.
    pub fn success_rate(&self) -> Option<f64> {
        let attempted = self.corrected + self.uncorrectable;
        (attempted > 0).then(|| self.corrected as f64 / attempted as f64)
    }
}

pub fn summarize(runs: &[RunRecord]) -> Summary {
    let with_faults: Vec<&RunRecord> = runs.iter().filter(|r| !r.corrupted_tasks.is_empty()).collect();
    let mean = |xs: &mut dyn Iterator<Item = u64>, n: usize| {
        if n == 0 {
            0.0
        } else {
            xs.map(|x| x as f64).sum::<f64>() / n as f64
        }
    };
    Summary {
        runs: runs.len(),
        runs_with_faults: with_faults.len(),
        corrupted_tasks: runs.iter().map(|r| r.corrupted_tasks.len()).sum(),
        detected_corrupted: runs.iter().map(|r| r.corrupted_tasks.len() - r.false_negatives).sum(),
        false_negatives: runs.iter().map(|r| r.false_negatives).sum(),
        false_positives: runs.iter().map(|r| r.false_positives).sum(),
        corrected: runs.iter().map(|r| r.corrected).sum(),
        uncorrectable: runs.iter().map(|r| r.uncorrectable).sum(),
        mean_detection_latency: mean(&mut runs.iter().map(|r| r.detection_latency), runs.len()),
        max_detection_latency: runs.iter().map(|r| r.detection_latency).max().unwrap_or(0),
        mean_correction_latency: mean(&mut with_faults.iter().map(|r| r.correction_latency), with_faults.len()),
        max_correction_latency: runs.iter().map(|r| r.correction_latency).max().unwrap_or(0),
        frames_downloaded: runs.iter().map(|r| r.frames_downloaded).sum(),
        download_cycles: runs.iter().map(|r| r.download_cycles).sum(),
        exposure_cycles: runs.iter().map(|r| r.exposure_cycles).sum(),
    }
}

/// `(tasks, proposed bits, scrubbing bits)` for `1..=max_tasks`.
pub fn redundancy_curve(frames_per_task: u64, geometry: FrameGeometry, max_tasks: u64) -> Vec<(u64, u64, u64)> {
    (1..=max_tasks)
        .map(|n| {
            let r = Redundancy::for_shape(n, frames_per_task, geometry);
            (n, r.proposed_bits, r.scrubbing_bits)
        })
        .collect()
}

/// Mean correction latency grouped by the number of corrupted tasks:
/// `(corrupted tasks, mean latency, runs)`, ascending.
pub fn latency_by_corrupted_tasks(runs: &[RunRecord]) -> Vec<(usize, f64, usize)> {
    let mut groups: alloc::collections::BTreeMap<usize, (u64, usize)> = Default::default();
    for r in runs {
        let e = groups.entry(r.corrupted_tasks.len()).or_default();
        e.0 += r.correction_latency;
        e.1 += 1;
    }
    groups
        .into_iter()
        .map(|(k, (sum, n))| (k, sum as f64 / n as f64, n))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fault::FaultKind;
    use crate::memory::TaskLayout;

    fn memory(tasks: usize, frames: usize) -> ConfigMemory {
        let layout: Vec<_> = (0..tasks)
            .map(|i| TaskLayout {
                frames,
                exec_cycles: 2_000 + 100 * i as u64,
                idle_cycles: 20_000,
                depends_on: if i == 0 { vec![] } else { vec![0] },
            })
            .collect();
        ConfigMemory::random(FrameGeometry::new(8, 32).unwrap(), &layout, &mut ChaCha8Rng::seed_from_u64(1)).unwrap()
    }

    fn config(tasks: usize, frames: usize) -> CampaignConfig {
        let mut c = CampaignConfig::new(memory(tasks, frames));
        c.runs = 8;
        c.seed = 17;
        c
    }

    #[test]
    fn zero_fault_campaign() {
        let mut c = config(3, 4);
        c.fault_model = FaultModel::none();
        let m = run_campaign(c).unwrap();
        for r in &m.runs {
            assert_eq!(r.corrected, 0);
            assert_eq!(r.correction_latency, 0);
            assert_eq!(r.frames_downloaded, 0);
            assert_eq!(r.clean, 3);
            assert!(r.restored);
        }
    }

    #[test]
    fn single_frame_fault_latency_is_sum_of_terms() {
        let mut c = config(4, 5);
        c.fault_model = FaultModel { burst_length: 3, ..FaultModel::default() };
        c.phase_init = PhaseInit::Status { st: u64::MAX };
        let campaign = Campaign::new(c.clone()).unwrap();
        let t = c.timing;
        for run in 0..c.runs {
            let r = campaign.run_proposed(run).unwrap();
            assert_eq!(r.corrected, 1);
            assert_eq!(r.frames_downloaded, 1);
            assert_eq!(r.deferral_cycles, 0);
            let scan: u64 = (0..4).map(|z| task_detection_cycles(&c.memory, z, &t).unwrap()).sum();
            assert_eq!(r.detection_latency, scan);
            assert_eq!(r.correction_latency, scan + t.correction_cycles(1) + t.download_cycles(1));
            assert!(r.restored);

            let b = campaign.run_baseline(run).unwrap();
            assert_eq!(b.corrupted_tasks, r.corrupted_tasks);
            assert_eq!(b.frames_downloaded, 20);
            assert_eq!(b.correction_latency, scan + t.download_cycles(20));
            assert!(b.restored);
        }
    }

    #[test]
    fn multiple_tasks_one_port() {
        let mut c = config(6, 4);
        c.fault_model = FaultModel {
            kind: FaultKind::AdjacentBurst,
            burst_length: 4,
            tasks_affected: 4,
            unique_across_tasks: true,
            ..FaultModel::default()
        };
        c.runs = 20;
        let m = run_campaign(c).unwrap();
        for r in &m.runs {
            assert_eq!(r.corrected, 4);
            assert_eq!(r.correction_order.len(), 4);
            assert_eq!(r.port.len(), 4);
            for w in r.port.windows(2) {
                assert!(w[0].end <= w[1].start);
            }
            assert!(r.restored);
            assert_eq!(r.corrected + r.uncorrectable + r.clean, r.tasks_scanned);
        }
    }

    #[test]
    fn uncorrectable_runs_report_not_restored() {
        let mut c = config(3, 4);
        c.fault_model = FaultModel { kind: FaultKind::RandomMulti, burst_length: 2, frames_per_task: 2, ..FaultModel::default() };
        let m = run_campaign(c).unwrap();
        for r in &m.runs {
            assert_eq!(r.uncorrectable, 1);
            assert!(!r.restored);
            assert_eq!(r.frames_downloaded, 0);
        }
        let s = summarize(&m.runs);
        assert_eq!(s.success_rate(), Some(0.0));
        assert_eq!(s.detection_rate(), Some(1.0));
    }

    #[test]
    fn deterministic_per_seed() {
        let c = config(4, 3);
        assert_eq!(run_campaign(c.clone()).unwrap(), run_campaign(c.clone()).unwrap());
        let mut other = c.clone();
        other.seed = 18;
        assert_ne!(run_campaign(c).unwrap(), run_campaign(other).unwrap());
    }

    #[test]
    fn blind_baseline_always_rewrites() {
        let mut c = config(3, 4);
        c.baseline = BaselineMode::Blind { period_cycles: 50_000 };
        let m = run_scrub_baseline(c).unwrap();
        for r in &m.runs {
            assert_eq!(r.frames_downloaded, 12);
            assert!(r.correction_latency > 12 * 101);
            assert!(r.correction_latency <= 50_000 + 12 * 101);
            assert!(r.restored);
        }
        assert_eq!(m.redundancy.scrubbing_bits, 12 * 256);
    }

    #[test]
    fn invalid_config_rejected() {
        let mut c = config(2, 2);
        c.runs = 0;
        assert!(Campaign::new(c).is_err());
        let mut c = config(2, 2);
        c.weights.slack = 2.0;
        assert!(Campaign::new(c).is_err());
        let mut c = config(2, 2);
        c.fault_model.burst_length = 33;
        assert!(Campaign::new(c).is_err());
        let mut c = config(2, 2);
        c.scan_policy = ScanPolicy::Periodic { period_cycles: 0 };
        assert!(Campaign::new(c).is_err());
    }

    #[test]
    fn starved_task_is_forced() {
        let layout = vec![TaskLayout { frames: 2, exec_cycles: 10, idle_cycles: 5, depends_on: vec![] }];
        let mem = ConfigMemory::random(FrameGeometry::new(8, 32).unwrap(), &layout, &mut ChaCha8Rng::seed_from_u64(3))
            .unwrap();
        let mut c = CampaignConfig::new(mem);
        c.runs = 3;
        let m = run_campaign(c).unwrap();
        for r in &m.runs {
            assert_eq!(r.forced_selections, 1);
            assert!(r.restored);
        }
    }

    #[test]
    fn plot_helpers() {
        let curve = redundancy_curve(100, FrameGeometry::SEVEN_SERIES, 10);
        assert_eq!(curve.len(), 10);
        assert_eq!(curve[9], (10, 360_640, 3_232_000));
        let m = run_campaign(config(3, 3)).unwrap();
        let groups = latency_by_corrupted_tasks(&m.runs);
        assert_eq!(groups.iter().map(|g| g.2).sum::<usize>(), m.runs.len());
    }
}
