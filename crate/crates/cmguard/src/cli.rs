//! Command-line driver.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use cmguard_core::correct::{correct_all, CorrectionStatus};
use cmguard_core::detect::scan;
use cmguard_core::sim::{summarize, Campaign, Scheme};
use cmguard_core::GoldenStore;
use serde::Serialize;

use crate::config::{BaselineName, Config, FaultModelName};
use crate::error::CliError;
use crate::formats;
use crate::output;

pub const OUT_ENV: &str = "CMGUARD_OUT";
pub const GOLDEN_FILE: &str = "golden.txt";
pub const FAULTS_FILE: &str = "faults.txt";

#[derive(Debug, Parser)]
#[command(name = "cmguard", version, about = "Configuration-memory upset detection, repair and scrubbing comparison")]
pub struct Cli {
    /// TOML experiment configuration; built-in defaults when absent.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, env = OUT_ENV, default_value = "cmguard-out")]
    pub out: PathBuf,
    #[command(flatten)]
    pub overrides: Overrides,
    #[command(subcommand)]
    pub command: Command,
}

/// Command-line values that replace the corresponding config keys.
#[derive(Debug, Default, Args)]
pub struct Overrides {
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub runs: Option<usize>,
    /// none, single-bit, adjacent-burst or random-multi.
    #[arg(long, global = true)]
    pub fault_model: Option<String>,
    /// Four comma-separated weights `w_a,w_b,w_c,w_d`, each in [0, 1].
    #[arg(long, global = true)]
    pub weights: Option<String>,
    /// readback or blind.
    #[arg(long, global = true)]
    pub baseline: Option<String>,
    #[arg(long, global = true)]
    pub transitive_criticality: Option<bool>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write the golden store (digests and parity frames).
    Snapshot,
    /// Draw one fault pattern from the configured model and write it.
    Inject,
    /// Apply a fault pattern and report which tasks fail verification.
    Scan(FaultInput),
    /// Apply a fault pattern, scan, and repair the faulty tasks.
    Correct(FaultInput),
    /// Run the proposed scheme and the scrubbing baseline on the same upsets.
    Campaign,
    /// Run only the scrubbing baseline.
    Baseline,
    /// Summarize the metrics files in the output directory.
    Report,
}

#[derive(Debug, Args)]
pub struct FaultInput {
    /// Golden store file; `<out>/golden.txt` if present, else computed.
    #[arg(long)]
    pub golden: Option<PathBuf>,
    /// Fault pattern file; defaults to `<out>/faults.txt`.
    #[arg(long)]
    pub faults: Option<PathBuf>,
}

impl Overrides {
    pub fn apply(&self, cfg: &mut Config) -> Result<(), CliError> {
        if let Some(seed) = self.seed {
            cfg.campaign.seed = seed;
        }
        if let Some(runs) = self.runs {
            cfg.campaign.runs = runs;
        }
        if let Some(m) = &self.fault_model {
            cfg.faults.model = FaultModelName::parse(m)?;
        }
        if let Some(w) = &self.weights {
            let parsed: Vec<f64> = w
                .split(',')
                .map(|x| x.trim().parse::<f64>())
                .collect::<Result<_, _>>()
                .map_err(|_| CliError::Input(format!("--weights '{w}' is not four numbers")))?;
            let [a, b, c, d] = parsed[..] else {
                return Err(CliError::Input(format!("--weights '{w}' needs exactly four values")));
            };
            cfg.weights.a = a;
            cfg.weights.b = b;
            cfg.weights.c = c;
            cfg.weights.d = d;
            cfg.weights()?;
        }
        if let Some(b) = &self.baseline {
            cfg.campaign.baseline = BaselineName::parse(b)?;
        }
        if let Some(t) = self.transitive_criticality {
            cfg.campaign.transitive_criticality = t;
        }
        Ok(())
    }
}

pub fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("cmguard: {e}");
            e.exit_code()
        }
    }
}

pub fn run(cli: &Cli) -> Result<(), CliError> {
    if let Command::Report = cli.command {
        return cmd_report(&cli.out);
    }
    let mut cfg = match &cli.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    cli.overrides.apply(&mut cfg)?;
    fs::create_dir_all(&cli.out)
        .map_err(|e| CliError::io(format!("cannot create output directory {}", cli.out.display()), e))?;
    match &cli.command {
        Command::Snapshot => cmd_snapshot(&cfg, &cli.out),
        Command::Inject => cmd_inject(&cfg, &cli.out),
        Command::Scan(input) => cmd_scan(&cfg, &cli.out, input, false),
        Command::Correct(input) => cmd_scan(&cfg, &cli.out, input, true),
        Command::Campaign => cmd_campaign(&cfg, &cli.out, &[Scheme::Proposed, Scheme::Scrubbing]),
        Command::Baseline => cmd_campaign(&cfg, &cli.out, &[Scheme::Scrubbing]),
        Command::Report => unreachable!(),
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::io(format!("cannot read {}", path.display()), e))
}

pub fn cmd_snapshot(cfg: &Config, out: &Path) -> Result<(), CliError> {
    let golden = cfg.build_memory()?.snapshot_golden();
    output::write_file(out, GOLDEN_FILE, &formats::write_golden(&golden))?;
    println!("wrote {} ({} tasks)", out.join(GOLDEN_FILE).display(), golden.task_count());
    Ok(())
}

pub fn cmd_inject(cfg: &Config, out: &Path) -> Result<(), CliError> {
    let memory = cfg.build_memory()?;
    let pattern = cfg.fault_model().generate(&memory)?;
    output::write_file(out, FAULTS_FILE, &formats::write_pattern(&pattern))?;
    println!(
        "wrote {} ({} upsets in tasks {:?})",
        out.join(FAULTS_FILE).display(),
        pattern.len(),
        pattern.tasks()
    );
    Ok(())
}

#[derive(Serialize)]
struct ScanOutput<'a> {
    faulty_tasks: &'a [usize],
    scan_cycles: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    outcomes: Option<Vec<cmguard_core::correct::CorrectionOutcome>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    restored: Option<bool>,
}

fn load_golden(cfg: &Config, out: &Path, input: &FaultInput) -> Result<GoldenStore, CliError> {
    let default = out.join(GOLDEN_FILE);
    match &input.golden {
        Some(path) => formats::parse_golden(&read(path)?),
        None if default.exists() => formats::parse_golden(&read(&default)?),
        None => Ok(cfg.build_memory()?.snapshot_golden()),
    }
}

/// Scan, and with `repair` also correct in ascending task order.
pub fn cmd_scan(cfg: &Config, out: &Path, input: &FaultInput, repair: bool) -> Result<(), CliError> {
    let pristine = cfg.build_memory()?;
    let golden = load_golden(cfg, out, input)?;
    golden.check_shape(&pristine)?;
    let faults_path = input.faults.clone().unwrap_or_else(|| out.join(FAULTS_FILE));
    let pattern = formats::parse_pattern(&read(&faults_path)?)?;
    let mut memory = pristine.clone();
    pattern.apply(&mut memory)?;

    let report = scan(&memory, &golden, &cfg.timing())?;
    println!("faulty tasks: {:?} ({} scan cycles)", report.faulty_tasks, report.scan_cycles);
    let mut result = ScanOutput {
        faulty_tasks: &report.faulty_tasks,
        scan_cycles: report.scan_cycles,
        outcomes: None,
        restored: None,
    };
    let name = if repair {
        let outcomes = correct_all(&mut memory, &golden, &report.faulty_tasks)?;
        for o in &outcomes {
            match o.status {
                CorrectionStatus::Corrected => {
                    println!("task {}: corrected frame {}", o.task, o.corrected_frame.unwrap_or_default())
                }
                _ => println!("task {}: {:?} {:?}", o.task, o.status, o.cause),
            }
        }
        let restored = memory == pristine;
        println!("memory restored: {restored}");
        result.outcomes = Some(outcomes);
        result.restored = Some(restored);
        "correct.json"
    } else {
        "scan.json"
    };
    let json = serde_json::to_string_pretty(&result).map_err(|e| CliError::Input(e.to_string()))?;
    output::write_file(out, name, &(json + "\n"))
}

pub fn cmd_campaign(cfg: &Config, out: &Path, schemes: &[Scheme]) -> Result<(), CliError> {
    let campaign = Campaign::new(cfg.campaign()?)?;
    let runs = campaign.config().runs;
    let mut results = Vec::new();
    for &scheme in schemes {
        let records = (0..runs)
            .map(|r| match scheme {
                Scheme::Proposed => campaign.run_proposed(r),
                Scheme::Scrubbing => campaign.run_baseline(r),
            })
            .collect::<Result<Vec<_>, _>>()?;
        output::write_file(out, output::scheme_file(scheme), &output::to_jsonl(&records)?)?;
        results.push((scheme, records));
    }

    let redundancy = campaign.redundancy();
    let rows: Vec<_> = results.iter().map(|(s, r)| (*s, summarize(r), redundancy)).collect();
    output::write_file(out, output::SUMMARY_FILE, &output::summary_csv(&rows))?;
    let memory = &campaign.config().memory;
    output::write_file(
        out,
        output::REDUNDANCY_PLOT_FILE,
        &output::redundancy_plot(memory.frames_per_task() as u64, memory.geometry()),
    )?;
    let find = |s: Scheme| results.iter().find(|r| r.0 == s).map_or(&[][..], |r| &r.1[..]);
    output::write_file(
        out,
        output::LATENCY_PLOT_FILE,
        &output::latency_plot(find(Scheme::Proposed), find(Scheme::Scrubbing)),
    )?;
    print!("{}", output::render_report(&results));
    Ok(())
}

pub fn cmd_report(out: &Path) -> Result<(), CliError> {
    let mut schemes = Vec::new();
    for scheme in [Scheme::Proposed, Scheme::Scrubbing] {
        let path = out.join(output::scheme_file(scheme));
        if path.exists() {
            schemes.push((scheme, output::parse_jsonl(&read(&path)?)?));
        }
    }
    if schemes.is_empty() {
        return Err(CliError::Input(format!(
            "no metrics files ({}, {}) in {}",
            output::PROPOSED_FILE,
            output::SCRUBBING_FILE,
            out.display()
        )));
    }
    print!("{}", output::render_report(&schemes));
    Ok(())
}
