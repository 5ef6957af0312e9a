//! Download-port scheduling for faulty tasks.
//!
//! Each task carries a status register `St`: the number of cycles until its
//! next execution phase begins. A correction (compute + download) is only
//! started if it fits in that slack; among the tasks that fit, the one with
//! the highest weighted score of inverse residual slack, relative size,
//! criticality and execution length goes first. Equal scores go to the
//! smaller `St`.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::error::{Error, Result};
use crate::memory::ConfigMemory;

/// Task dependency DAG; an edge `p -> d` means `d` depends on `p`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DependencyGraph {
    children: Vec<Vec<usize>>,
}

impl DependencyGraph {
    pub fn new(tasks: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut sets = vec![BTreeSet::new(); tasks];
        for (p, d) in edges {
            for t in [p, d] {
                if t >= tasks {
                    return Err(Error::OutOfRange { what: "task", index: t, len: tasks });
                }
            }
            sets[p].insert(d);
        }
        let graph = Self {
            children: sets.into_iter().map(|s| s.into_iter().collect()).collect(),
        };
        graph.check_acyclic()?;
        Ok(graph)
    }

    /// Builds the graph from each task's `depends_on` list.
    pub fn from_memory(memory: &ConfigMemory) -> Result<Self> {
        let edges = memory
            .tasks()
            .iter()
            .flat_map(|t| t.depends_on.iter().map(move |&p| (p, t.id)));
        Self::new(memory.task_count(), edges)
    }

    pub fn task_count(&self) -> usize {
        self.children.len()
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.children
            .iter()
            .enumerate()
            .flat_map(|(p, ds)| ds.iter().map(move |&d| (p, d)))
    }

    pub fn children(&self, task: usize) -> &[usize] {
        &self.children[task]
    }

    // Kahn's algorithm; any node left over lies on a cycle.
    fn check_acyclic(&self) -> Result<()> {
        let n = self.children.len();
        let mut indeg = vec![0usize; n];
        for ds in &self.children {
            for &d in ds {
                indeg[d] += 1;
            }
        }
        let mut ready: Vec<usize> = (0..n).filter(|&i| indeg[i] == 0).collect();
        let mut seen = 0;
        while let Some(i) = ready.pop() {
            seen += 1;
            for &d in &self.children[i] {
                indeg[d] -= 1;
                if indeg[d] == 0 {
                    ready.push(d);
                }
            }
        }
        if seen == n {
            Ok(())
        } else {
            let task = (0..n).find(|&i| indeg[i] > 0).unwrap_or(0);
            Err(Error::Cycle { task })
        }
    }

    /// All tasks reachable from `task`, excluding itself.
    pub fn descendants(&self, task: usize) -> BTreeSet<usize> {
        let mut seen = BTreeSet::new();
        let mut stack: Vec<usize> = self.children[task].clone();
        while let Some(t) = stack.pop() {
            if seen.insert(t) {
                stack.extend_from_slice(&self.children[t]);
            }
        }
        seen
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum CriticalityMode {
    /// Count every task that depends on this one, directly or not.
    #[default]
    Transitive,
    /// Count only immediate dependents.
    Direct,
}

/// Per-task criticality `dependents / N`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Criticality {
    dependents: Vec<usize>,
}

impl Criticality {
    pub fn compute(graph: &DependencyGraph, mode: CriticalityMode) -> Self {
        let dependents = (0..graph.task_count())
            .map(|i| match mode {
                CriticalityMode::Transitive => graph.descendants(i).len(),
                CriticalityMode::Direct => graph.children(i).len(),
            })
            .collect();
        Self { dependents }
    }

    pub fn task_count(&self) -> usize {
        self.dependents.len()
    }

    pub fn dependents(&self, task: usize) -> usize {
        self.dependents[task]
    }

    pub fn zeta(&self, task: usize) -> f64 {
        self.dependents[task] as f64 / self.dependents.len() as f64
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.dependents.len()).map(|i| self.zeta(i)).collect()
    }
}

pub fn criticality(graph: &DependencyGraph, mode: CriticalityMode) -> Criticality {
    Criticality::compute(graph, mode)
}

/// Phase clock and status register of one task, in whole cycles.
///
/// `st` counts down to the start of the next execution phase. When it hits
/// zero the next tick reloads it with `exec + idle`, so one register period
/// spans `exec + idle` decrements plus the reload tick. `st == 0` is the
/// first cycle of the new execution phase.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TaskClock {
    pub busy: bool,
    /// Cycles since the execution phase started.
    pub pe: u64,
    /// Cycles since the idle phase started.
    pub pi: u64,
    pub st: u64,
    pub exec: u64,
    pub idle: u64,
}

impl TaskClock {
    /// Clock from the phase counters; `st` comes from [`TaskClock::init_status`].
    pub fn new(exec: u64, idle: u64, busy: bool, pe: u64, pi: u64) -> Self {
        let mut c = Self { busy, pe, pi, st: 0, exec, idle };
        c.st = c.init_status();
        c
    }

    /// Clock whose register currently holds `st` (clamped to `exec + idle`).
    pub fn from_status(exec: u64, idle: u64, st: u64) -> Self {
        let mut c = Self { busy: true, pe: 0, pi: 0, st: st.min(exec + idle), exec, idle };
        c.sync_phase();
        c
    }

    /// `(E - PE) + I` while executing, `I - PI` while idle.
    pub fn init_status(&self) -> u64 {
        if self.busy {
            self.exec.saturating_sub(self.pe) + self.idle
        } else {
            self.idle.saturating_sub(self.pi)
        }
    }

    fn sync_phase(&mut self) {
        if self.st == 0 || self.st > self.idle {
            self.busy = true;
            self.pe = if self.st == 0 { 0 } else { self.exec + self.idle - self.st };
            self.pi = 0;
        } else {
            self.busy = false;
            self.pe = 0;
            self.pi = self.idle - self.st;
        }
    }

    /// Ticks in one full register period.
    pub fn period(&self) -> u64 {
        self.exec + self.idle + 1
    }

    /// Busy ticks in one full register period.
    fn busy_per_period(&self) -> u64 {
        self.exec + 1
    }

    /// One rising clock edge.
    pub fn tick(&mut self) {
        if self.st == 0 {
            self.st = self.exec + self.idle;
        } else {
            self.st -= 1;
        }
        self.sync_phase();
    }

    /// Applies `cycles` ticks; returns how many of them ended busy.
    pub fn advance(&mut self, cycles: u64) -> u64 {
        let period = self.period();
        let mut busy = (cycles / period) * self.busy_per_period();
        for _ in 0..cycles % period {
            self.tick();
            busy += u64::from(self.busy);
        }
        busy
    }

    /// Ticks until `st >= need`, or `None` if it never gets there.
    pub fn ticks_until_slack(&self, need: u64) -> Option<u64> {
        if self.st >= need {
            Some(0)
        } else if need > self.exec + self.idle {
            None
        } else {
            // count down to zero, then the reload tick
            Some(self.st + 1)
        }
    }
}

/// User weights, each in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Weights {
    /// Inverse residual slack.
    pub slack: f64,
    /// Share of configuration frames.
    pub area: f64,
    pub criticality: f64,
    /// Execution length.
    pub exec: f64,
}

impl Weights {
    pub fn new(slack: f64, area: f64, criticality: f64, exec: f64) -> Result<Self> {
        let w = Self { slack, area, criticality, exec };
        w.validate()?;
        Ok(w)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = |x: f64| (0.0..=1.0).contains(&x);
        if ok(self.slack) && ok(self.area) && ok(self.criticality) && ok(self.exec) {
            Ok(())
        } else {
            Err(Error::InvalidArgument("weights must lie in [0, 1]"))
        }
    }
}

impl Default for Weights {
    fn default() -> Self {
        Self { slack: 1.0, area: 1.0, criticality: 1.0, exec: 0.0 }
    }
}

/// Per-task cost and size inputs to the priority.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PrioritySpec {
    /// `eta_i`: frames in the task.
    pub frames: u64,
    /// `eta`: frames in the memory.
    pub total_frames: u64,
    /// `EC_i / t`
    pub correction_cycles: u64,
    /// `RT_i / t`
    pub download_cycles: u64,
    /// `ED_i / t`; timing only, not part of the score.
    pub detection_cycles: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Priority {
    /// Slack left after the correction, in cycles.
    Slack(u64),
    /// The correction does not fit before the next execution phase.
    Deferred,
}

pub fn priority(clock: &TaskClock, spec: &PrioritySpec) -> Priority {
    let need = spec.correction_cycles + spec.download_cycles;
    if need <= clock.st {
        Priority::Slack(clock.st - need)
    } else {
        Priority::Deferred
    }
}

/// Stand-in for zero residual slack in the `1 / P` term, in cycles.
pub const ZERO_SLACK_EPSILON: f64 = 0.5;

pub fn final_priority(
    slack: u64,
    weights: &Weights,
    spec: &PrioritySpec,
    zeta: f64,
    exec_cycles: u64,
) -> Result<f64> {
    if spec.total_frames == 0 {
        return Err(Error::InvalidArgument("total frame count must be positive"));
    }
    let inv_slack = if slack == 0 { 1.0 / ZERO_SLACK_EPSILON } else { 1.0 / slack as f64 };
    Ok(weights.slack * inv_slack
        + weights.area * (spec.frames as f64 / spec.total_frames as f64)
        + weights.criticality * zeta
        + weights.exec * exec_cycles as f64)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Candidate {
    pub task: usize,
    pub fp: f64,
    pub st: u64,
}

/// Ranking order: higher score first, then smaller `St`, then smaller id.
pub fn rank_cmp(a: &Candidate, b: &Candidate) -> Ordering {
    b.fp.total_cmp(&a.fp)
        .then(a.st.cmp(&b.st))
        .then(a.task.cmp(&b.task))
}

/// Picks the next task to correct; `None` if there are no candidates.
pub fn select(candidates: &[Candidate]) -> Option<usize> {
    candidates.iter().min_by(|a, b| rank_cmp(a, b)).map(|c| c.task)
}
