//! Metrics files and the human-readable report.
//!
//! A campaign directory holds:
//!
//! * `proposed.jsonl`, `scrubbing.jsonl`: one run record per line
//! * `summary.csv`: one row per scheme
//! * `redundancy.dat`: tasks vs stored bits for both schemes
//! * `latency.dat`: corrupted-task count vs mean correction latency

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use cmguard_core::memory::Redundancy;
use cmguard_core::sim::{latency_by_corrupted_tasks, redundancy_curve, summarize, RunRecord, Scheme, Summary};
use cmguard_core::FrameGeometry;

use crate::error::CliError;

pub const PROPOSED_FILE: &str = "proposed.jsonl";
pub const SCRUBBING_FILE: &str = "scrubbing.jsonl";
pub const SUMMARY_FILE: &str = "summary.csv";
pub const REDUNDANCY_PLOT_FILE: &str = "redundancy.dat";
pub const LATENCY_PLOT_FILE: &str = "latency.dat";

/// Largest task count on the redundancy curve.
pub const CURVE_MAX_TASKS: u64 = 50;

pub fn scheme_file(scheme: Scheme) -> &'static str {
    match scheme {
        Scheme::Proposed => PROPOSED_FILE,
        Scheme::Scrubbing => SCRUBBING_FILE,
    }
}

pub fn to_jsonl(runs: &[RunRecord]) -> Result<String, CliError> {
    let mut s = String::new();
    for r in runs {
        let line = serde_json::to_string(r).map_err(|e| CliError::Input(format!("cannot encode run record: {e}")))?;
        s.push_str(&line);
        s.push('\n');
    }
    Ok(s)
}

pub fn parse_jsonl(text: &str) -> Result<Vec<RunRecord>, CliError> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| serde_json::from_str(l).map_err(|e| CliError::Input(format!("line {}: {e}", i + 1))))
        .collect()
}

fn opt(x: Option<f64>) -> String {
    x.map_or_else(String::new, |v| format!("{v:.6}"))
}

const SUMMARY_HEADER: &str = "scheme,runs,runs_with_faults,corrupted_tasks,detected_corrupted,false_negatives,\
false_positives,corrected,uncorrectable,detection_rate,success_rate,mean_detection_latency,max_detection_latency,\
mean_correction_latency,max_correction_latency,frames_downloaded,download_cycles,exposure_cycles,redundancy_bits";

pub fn summary_csv(rows: &[(Scheme, Summary, Redundancy)]) -> String {
    let mut s = format!("{SUMMARY_HEADER}\n");
    for (scheme, m, r) in rows {
        let (name, bits) = match scheme {
            Scheme::Proposed => ("proposed", r.proposed_bits),
            Scheme::Scrubbing => ("scrubbing", r.scrubbing_bits),
        };
        let _ = writeln!(
            s,
            "{name},{},{},{},{},{},{},{},{},{},{},{:.3},{},{:.3},{},{},{},{},{bits}",
            m.runs,
            m.runs_with_faults,
            m.corrupted_tasks,
            m.detected_corrupted,
            m.false_negatives,
            m.false_positives,
            m.corrected,
            m.uncorrectable,
            opt(m.detection_rate()),
            opt(m.success_rate()),
            m.mean_detection_latency,
            m.max_detection_latency,
            m.mean_correction_latency,
            m.max_correction_latency,
            m.frames_downloaded,
            m.download_cycles,
            m.exposure_cycles,
        );
    }
    s
}

pub fn redundancy_plot(frames_per_task: u64, geometry: FrameGeometry) -> String {
    let mut s = format!(
        "# stored bits, {frames_per_task} frames/task, {}x{} frames\n# tasks proposed scrubbing\n",
        geometry.rows, geometry.cols
    );
    for (n, p, q) in redundancy_curve(frames_per_task, geometry, CURVE_MAX_TASKS) {
        let _ = writeln!(s, "{n} {p} {q}");
    }
    s
}

/// Rows for every corrupted-task count seen by either scheme; a scheme with
/// no run at that count gets `nan`.
pub fn latency_plot(proposed: &[RunRecord], scrubbing: &[RunRecord]) -> String {
    let p = latency_by_corrupted_tasks(proposed);
    let q = latency_by_corrupted_tasks(scrubbing);
    let mut keys: Vec<usize> = p.iter().chain(q.iter()).map(|g| g.0).collect();
    keys.sort_unstable();
    keys.dedup();
    let lookup = |v: &[(usize, f64, usize)], k| v.iter().find(|g| g.0 == k).map(|g| (g.1, g.2));
    let mut s = String::from("# mean correction latency (cycles)\n# corrupted_tasks proposed scrubbing runs\n");
    for k in keys {
        let (pl, pn) = lookup(&p, k).map_or(("nan".into(), 0), |(l, n)| (format!("{l:.3}"), n));
        let (ql, qn) = lookup(&q, k).map_or(("nan".into(), 0), |(l, n)| (format!("{l:.3}"), n));
        let _ = writeln!(s, "{k} {pl} {ql} {}", pn.max(qn));
    }
    s
}

pub fn write_file(dir: &Path, name: &str, contents: &str) -> Result<(), CliError> {
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|e| CliError::io(format!("cannot write {}", path.display()), e))
}

fn pct(x: Option<f64>) -> String {
    x.map_or_else(|| "n/a".into(), |v| format!("{:.2}%", 100.0 * v))
}

/// Plain-text report over whatever schemes have records.
pub fn render_report(schemes: &[(Scheme, Vec<RunRecord>)]) -> String {
    let mut s = String::new();
    if schemes.iter().all(|(_, runs)| runs.is_empty()) {
        s.push_str("no runs: the metrics files contain no records\n");
        return s;
    }
    let mut redundancy = None;
    for (scheme, runs) in schemes {
        let name = match scheme {
            Scheme::Proposed => "proposed (hash + product code)",
            Scheme::Scrubbing => "scrubbing baseline",
        };
        let _ = writeln!(s, "== {name} ==");
        if runs.is_empty() {
            s.push_str("no runs\n\n");
            continue;
        }
        redundancy = redundancy.or(runs.first().map(|r| r.redundancy));
        let m = summarize(runs);
        let _ = writeln!(s, "runs                    {} ({} with faults)", m.runs, m.runs_with_faults);
        if m.runs_with_faults > 0 || m.false_positives > 0 {
            let _ = writeln!(
                s,
                "detection               {} ({}/{} corrupted tasks, {} false positives)",
                pct(m.detection_rate()),
                m.detected_corrupted,
                m.corrupted_tasks,
                m.false_positives
            );
        }
        let _ = writeln!(
            s,
            "correction success      {} ({} corrected, {} uncorrectable)",
            pct(m.success_rate()),
            m.corrected,
            m.uncorrectable
        );
        let _ = writeln!(
            s,
            "detection latency       mean {:.1}  max {} cycles",
            m.mean_detection_latency, m.max_detection_latency
        );
        let _ = writeln!(
            s,
            "correction latency      mean {:.1}  max {} cycles",
            m.mean_correction_latency, m.max_correction_latency
        );
        let _ = writeln!(s, "frames downloaded       {} ({} cycles)", m.frames_downloaded, m.download_cycles);
        let _ = writeln!(s, "exposure                {} cycles", m.exposure_cycles);
        s.push('\n');
    }
    if let Some(r) = redundancy {
        s.push_str("== redundancy (bits) ==\n");
        let _ = writeln!(s, "detection (digests)     {}", r.detection_bits);
        let _ = writeln!(s, "horizontal parity       {}", r.horizontal_parity_bits);
        let _ = writeln!(s, "vertical parity         {}", r.vertical_parity_bits);
        let _ = writeln!(s, "proposed total          {}", r.proposed_bits);
        let _ = writeln!(s, "scrubbing golden image  {}", r.scrubbing_bits);
        let _ = writeln!(s, "ratio                   {:.4}", r.proposed_bits as f64 / r.scrubbing_bits as f64);
    }
    s
}
