//! TOML experiment configuration.
//!
//! ```toml
//! [memory]
//! rows = 101
//! cols = 32
//! content = "random"      # or "zero"
//! content_seed = 1
//!
//! [tasks]
//! count = 10
//! frames = 100            # one value for all tasks, or an array
//! exec_cycles = 40000
//! idle_cycles = 200000
//! dependencies = "deps.txt"   # edge list, relative to this file
//! edges = [[0, 1], [0, 2]]    # inline edges, merged with the file
//!
//! [faults]
//! model = "adjacent-burst"    # none | single-bit | adjacent-burst | random-multi
//! burst_length = 5
//! frames_per_task = 1
//! tasks_affected = 1
//!
//! [weights]
//! a = 1.0
//! b = 1.0
//! c = 1.0
//! d = 0.0
//!
//! [campaign]
//! runs = 100
//! seed = 42
//! baseline = "readback"       # or "blind" with blind_period
//! ```
//!
//! Every section and key is optional; see the `Default` impls.

use std::fs;
use std::path::{Path, PathBuf};

use cmguard_core::fault::{FaultKind, FaultModel};
use cmguard_core::memory::TaskLayout;
use cmguard_core::sched::{CriticalityMode, DependencyGraph, Weights};
use cmguard_core::sim::{BaselineMode, CampaignConfig, PhaseInit, ScanPolicy};
use cmguard_core::timing::{HashEngine, TimingModel};
use cmguard_core::{ConfigMemory, FrameGeometry};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

use crate::error::CliError;
use crate::formats;

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    #[serde(default)]
    pub memory: MemorySection,
    #[serde(default)]
    pub tasks: TasksSection,
    #[serde(default)]
    pub faults: FaultsSection,
    #[serde(default)]
    pub weights: WeightsSection,
    #[serde(default)]
    pub timing: TimingSection,
    #[serde(default)]
    pub campaign: CampaignSection,
    /// Directory that relative paths in the file resolve against.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Content {
    #[default]
    Random,
    Zero,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MemorySection {
    pub rows: usize,
    pub cols: usize,
    pub content: Content,
    pub content_seed: u64,
}

impl Default for MemorySection {
    fn default() -> Self {
        let g = FrameGeometry::SEVEN_SERIES;
        Self { rows: g.rows, cols: g.cols, content: Content::Random, content_seed: 1 }
    }
}

/// A scalar applied to every task, or one value per task.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum PerTask<T> {
    All(T),
    Each(Vec<T>),
}

impl<T: Copy> PerTask<T> {
    fn expand(&self, count: usize, key: &str) -> Result<Vec<T>, CliError> {
        match self {
            PerTask::All(v) => Ok(vec![*v; count]),
            PerTask::Each(vs) if vs.len() == count => Ok(vs.clone()),
            PerTask::Each(vs) => Err(CliError::Input(format!(
                "tasks.{key} lists {} values for {count} tasks",
                vs.len()
            ))),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TasksSection {
    pub count: usize,
    pub frames: PerTask<usize>,
    pub exec_cycles: PerTask<u64>,
    pub idle_cycles: PerTask<u64>,
    pub dependencies: Option<PathBuf>,
    pub edges: Vec<(usize, usize)>,
}

impl Default for TasksSection {
    fn default() -> Self {
        Self {
            count: 10,
            frames: PerTask::All(100),
            exec_cycles: PerTask::All(40_000),
            idle_cycles: PerTask::All(200_000),
            dependencies: None,
            edges: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FaultModelName {
    None,
    SingleBit,
    AdjacentBurst,
    RandomMulti,
}

impl FaultModelName {
    pub fn kind(self) -> FaultKind {
        match self {
            FaultModelName::None => FaultKind::None,
            FaultModelName::SingleBit => FaultKind::SingleBit,
            FaultModelName::AdjacentBurst => FaultKind::AdjacentBurst,
            FaultModelName::RandomMulti => FaultKind::RandomMulti,
        }
    }

    pub fn parse(s: &str) -> Result<Self, CliError> {
        match s {
            "none" => Ok(Self::None),
            "single-bit" => Ok(Self::SingleBit),
            "adjacent-burst" => Ok(Self::AdjacentBurst),
            "random-multi" => Ok(Self::RandomMulti),
            other => Err(CliError::Input(format!(
                "unknown fault model '{other}' (none, single-bit, adjacent-burst, random-multi)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FaultsSection {
    pub model: FaultModelName,
    pub burst_length: usize,
    pub frames_per_task: usize,
    pub tasks_affected: usize,
    pub allow_dummy: bool,
    pub unique_across_tasks: bool,
}

impl Default for FaultsSection {
    fn default() -> Self {
        let d = FaultModel::default();
        Self {
            model: FaultModelName::AdjacentBurst,
            burst_length: d.burst_length,
            frames_per_task: d.frames_per_task,
            tasks_affected: d.tasks_affected,
            allow_dummy: d.allow_dummy,
            unique_across_tasks: d.unique_across_tasks,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WeightsSection {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl Default for WeightsSection {
    fn default() -> Self {
        let w = Weights::default();
        Self { a: w.slack, b: w.area, c: w.criticality, d: w.exec }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TimingSection {
    pub clock_period_s: f64,
    pub read_cycles_per_frame: u64,
    pub write_cycles_per_frame: u64,
    pub correction_cycles_per_frame: u64,
    pub hash_block_bits: u64,
    pub hash_f_max_hz: f64,
    pub hash_clock_cycles: u64,
    pub hash_n_msg: u64,
}

impl Default for TimingSection {
    fn default() -> Self {
        let t = TimingModel::default();
        Self {
            clock_period_s: t.clock_period_s,
            read_cycles_per_frame: t.read_cycles_per_frame,
            write_cycles_per_frame: t.write_cycles_per_frame,
            correction_cycles_per_frame: t.correction_cycles_per_frame,
            hash_block_bits: t.hash.block_bits,
            hash_f_max_hz: t.hash.f_max_hz,
            hash_clock_cycles: t.hash.clock_cycles,
            hash_n_msg: t.hash.n_msg,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BaselineName {
    #[default]
    Readback,
    Blind,
}

impl BaselineName {
    pub fn parse(s: &str) -> Result<Self, CliError> {
        match s {
            "readback" => Ok(Self::Readback),
            "blind" => Ok(Self::Blind),
            other => Err(CliError::Input(format!("unknown baseline '{other}' (readback, blind)"))),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CampaignSection {
    pub runs: usize,
    pub seed: u64,
    /// Cycles between scan starts; absent means back-to-back scans.
    pub scan_period: Option<u64>,
    pub baseline: BaselineName,
    pub blind_period: u64,
    pub transitive_criticality: bool,
    /// Fixed initial status register for every task; absent means random.
    pub initial_status: Option<u64>,
}

impl Default for CampaignSection {
    fn default() -> Self {
        Self {
            runs: 100,
            seed: 0,
            scan_period: None,
            baseline: BaselineName::Readback,
            blind_period: 1_000_000,
            transitive_criticality: true,
            initial_status: None,
        }
    }
}

impl Config {
    pub fn from_toml(text: &str, base_dir: &Path) -> Result<Self, CliError> {
        let mut cfg: Config =
            toml::from_str(text).map_err(|e| CliError::Input(format!("config does not parse: {e}")))?;
        cfg.base_dir = base_dir.to_path_buf();
        cfg.check()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Input(format!("cannot read config {}: {e}", path.display())))?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::from_toml(&text, &base)
    }

    /// Load-time checks that do not need the memory content.
    fn check(&self) -> Result<(), CliError> {
        self.weights()?;
        self.layout()?;
        Ok(())
    }

    pub fn geometry(&self) -> Result<FrameGeometry, CliError> {
        Ok(FrameGeometry::new(self.memory.rows, self.memory.cols)?)
    }

    pub fn weights(&self) -> Result<Weights, CliError> {
        let w = &self.weights;
        Ok(Weights::new(w.a, w.b, w.c, w.d)?)
    }

    pub fn edges(&self) -> Result<Vec<(usize, usize)>, CliError> {
        let mut edges = self.tasks.edges.clone();
        if let Some(path) = &self.tasks.dependencies {
            let path = self.base_dir.join(path);
            let text = fs::read_to_string(&path)
                .map_err(|e| CliError::Input(format!("cannot read dependency file {}: {e}", path.display())))?;
            edges.extend(formats::parse_edges(&text)?);
        }
        Ok(edges)
    }

    /// Per-task layouts with dependencies; rejects cyclic graphs.
    pub fn layout(&self) -> Result<Vec<TaskLayout>, CliError> {
        let n = self.tasks.count;
        if n == 0 {
            return Err(CliError::Input("tasks.count must be at least 1".into()));
        }
        let frames = self.tasks.frames.expand(n, "frames")?;
        let exec = self.tasks.exec_cycles.expand(n, "exec_cycles")?;
        let idle = self.tasks.idle_cycles.expand(n, "idle_cycles")?;
        let edges = self.edges()?;
        DependencyGraph::new(n, edges.iter().copied())?;
        let mut layout: Vec<TaskLayout> = (0..n)
            .map(|z| TaskLayout { frames: frames[z], exec_cycles: exec[z], idle_cycles: idle[z], depends_on: vec![] })
            .collect();
        for (producer, dependent) in edges {
            layout[dependent].depends_on.push(producer);
        }
        Ok(layout)
    }

    pub fn build_memory(&self) -> Result<ConfigMemory, CliError> {
        let geometry = self.geometry()?;
        let layout = self.layout()?;
        Ok(match self.memory.content {
            Content::Random => {
                ConfigMemory::random(geometry, &layout, &mut ChaCha8Rng::seed_from_u64(self.memory.content_seed))?
            }
            Content::Zero => ConfigMemory::zeroed(geometry, &layout)?,
        })
    }

    pub fn fault_model(&self) -> FaultModel {
        let f = &self.faults;
        FaultModel {
            kind: f.model.kind(),
            burst_length: f.burst_length,
            frames_per_task: f.frames_per_task,
            tasks_affected: f.tasks_affected,
            seed: self.campaign.seed,
            allow_dummy: f.allow_dummy,
            unique_across_tasks: f.unique_across_tasks,
        }
    }

    pub fn timing(&self) -> TimingModel {
        let t = &self.timing;
        TimingModel {
            clock_period_s: t.clock_period_s,
            read_cycles_per_frame: t.read_cycles_per_frame,
            write_cycles_per_frame: t.write_cycles_per_frame,
            correction_cycles_per_frame: t.correction_cycles_per_frame,
            hash: HashEngine {
                block_bits: t.hash_block_bits,
                f_max_hz: t.hash_f_max_hz,
                clock_cycles: t.hash_clock_cycles,
                n_msg: t.hash_n_msg,
            },
        }
    }

    pub fn campaign(&self) -> Result<CampaignConfig, CliError> {
        let c = &self.campaign;
        let config = CampaignConfig {
            memory: self.build_memory()?,
            fault_model: self.fault_model(),
            weights: self.weights()?,
            timing: self.timing(),
            scan_policy: match c.scan_period {
                None => ScanPolicy::Continuous,
                Some(period_cycles) => ScanPolicy::Periodic { period_cycles },
            },
            baseline: match c.baseline {
                BaselineName::Readback => BaselineMode::Readback,
                BaselineName::Blind => BaselineMode::Blind { period_cycles: c.blind_period },
            },
            criticality_mode: if c.transitive_criticality {
                CriticalityMode::Transitive
            } else {
                CriticalityMode::Direct
            },
            phase_init: match c.initial_status {
                None => PhaseInit::Random,
                Some(st) => PhaseInit::Status { st },
            },
            runs: c.runs,
            seed: c.seed,
        };
        config.validate()?;
        Ok(config)
    }
}
