//! Text file formats: golden store, fault patterns, dependency edge lists.
//!
//! All three are line oriented; `#` starts a comment and blank lines are
//! ignored.

use std::fmt::Write as _;

use cmguard_core::fault::FaultPattern;
use cmguard_core::memory::BitAddr;
use cmguard_core::{Digest512, Frame, FrameGeometry, GoldenStore};

use crate::error::CliError;

pub const GOLDEN_MAGIC: &str = "cmguard-golden v1";

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.split('#').next().unwrap_or("").trim();
        (!l.is_empty()).then_some((i + 1, l))
    })
}

fn bad(line: usize, msg: impl std::fmt::Display) -> CliError {
    CliError::Input(format!("line {line}: {msg}"))
}

fn parse_num(line: usize, s: Option<&str>, what: &str) -> Result<usize, CliError> {
    s.ok_or_else(|| bad(line, format!("missing {what}")))?
        .parse()
        .map_err(|_| bad(line, format!("{what} is not a non-negative integer")))
}

/// ```text
/// cmguard-golden v1
/// geometry <rows> <cols>
/// tasks <N>
/// frames <n>
/// hash <z> <128 hex digits>      N lines
/// hp <z> <hex frame bytes>       N lines
/// vp <k> <hex frame bytes>       n lines
/// ```
pub fn write_golden(g: &GoldenStore) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{GOLDEN_MAGIC}");
    let _ = writeln!(s, "geometry {} {}", g.geometry.rows, g.geometry.cols);
    let _ = writeln!(s, "tasks {}", g.task_count());
    let _ = writeln!(s, "frames {}", g.frames_per_task);
    for (z, h) in g.hashes.iter().enumerate() {
        let _ = writeln!(s, "hash {z} {h}");
    }
    for (z, f) in g.hp.iter().enumerate() {
        let _ = writeln!(s, "hp {z} {}", hex::encode(f.as_bytes()));
    }
    for (k, f) in g.vp.iter().enumerate() {
        let _ = writeln!(s, "vp {k} {}", hex::encode(f.as_bytes()));
    }
    s
}

pub fn parse_golden(text: &str) -> Result<GoldenStore, CliError> {
    let mut lines = content_lines(text);
    match lines.next() {
        Some((_, GOLDEN_MAGIC)) => {}
        _ => return Err(CliError::Input(format!("golden store must start with '{GOLDEN_MAGIC}'"))),
    }
    let mut header = |key: &str| -> Result<Vec<usize>, CliError> {
        let (n, l) = lines.next().ok_or_else(|| CliError::Input(format!("golden store missing '{key}'")))?;
        let mut parts = l.split_whitespace();
        if parts.next() != Some(key) {
            return Err(bad(n, format!("expected '{key}'")));
        }
        parts.map(|p| p.parse().map_err(|_| bad(n, format!("bad {key} value")))).collect()
    };
    let geometry = match header("geometry")?[..] {
        [rows, cols] => FrameGeometry::new(rows, cols)?,
        _ => return Err(CliError::Input("geometry needs rows and cols".into())),
    };
    let [tasks] = header("tasks")?[..] else {
        return Err(CliError::Input("tasks needs one value".into()));
    };
    let [frames] = header("frames")?[..] else {
        return Err(CliError::Input("frames needs one value".into()));
    };

    let mut hashes: Vec<Option<Digest512>> = vec![None; tasks];
    let mut hp: Vec<Option<Frame>> = vec![None; tasks];
    let mut vp: Vec<Option<Frame>> = vec![None; frames];
    for (n, l) in lines {
        let mut parts = l.split_whitespace();
        let kind = parts.next().unwrap_or("");
        let idx = parse_num(n, parts.next(), "index")?;
        let value = parts.next().ok_or_else(|| bad(n, "missing value"))?;
        if parts.next().is_some() {
            return Err(bad(n, "trailing fields"));
        }
        let frame = |len: usize| -> Result<Frame, CliError> {
            if idx >= len {
                return Err(bad(n, format!("index {idx} out of range")));
            }
            let bytes = hex::decode(value).map_err(|e| bad(n, e))?;
            Frame::from_bytes(geometry, bytes).map_err(|e| bad(n, e))
        };
        let slot_taken = match kind {
            "hash" => {
                if idx >= tasks {
                    return Err(bad(n, format!("index {idx} out of range")));
                }
                hashes[idx].replace(Digest512::from_hex(value).map_err(|e| bad(n, e))?).is_some()
            }
            "hp" => {
                let f = frame(tasks)?;
                hp[idx].replace(f).is_some()
            }
            "vp" => {
                let f = frame(frames)?;
                vp[idx].replace(f).is_some()
            }
            other => return Err(bad(n, format!("unknown record '{other}'"))),
        };
        if slot_taken {
            return Err(bad(n, format!("duplicate {kind} {idx}")));
        }
    }
    Ok(GoldenStore {
        geometry,
        frames_per_task: frames,
        hashes: complete("hash", hashes)?,
        hp: complete("hp", hp)?,
        vp: complete("vp", vp)?,
    })
}

fn complete<T>(what: &str, slots: Vec<Option<T>>) -> Result<Vec<T>, CliError> {
    slots
        .into_iter()
        .collect::<Option<Vec<T>>>()
        .ok_or_else(|| CliError::Input(format!("golden store is missing {what} records")))
}

/// One upset per line: `task frame row col`.
pub fn write_pattern(p: &FaultPattern) -> String {
    let mut s = String::from("# task frame row col\n");
    for a in p.iter() {
        let _ = writeln!(s, "{} {} {} {}", a.task, a.frame, a.row, a.col);
    }
    s
}

pub fn parse_pattern(text: &str) -> Result<FaultPattern, CliError> {
    let mut p = FaultPattern::new();
    for (n, l) in content_lines(text) {
        let mut parts = l.split_whitespace();
        let task = parse_num(n, parts.next(), "task")?;
        let frame = parse_num(n, parts.next(), "frame")?;
        let row = parse_num(n, parts.next(), "row")?;
        let col = parse_num(n, parts.next(), "col")?;
        if parts.next().is_some() {
            return Err(bad(n, "trailing fields"));
        }
        if !p.insert(BitAddr::new(task, frame, row, col)) {
            return Err(bad(n, "duplicate upset"));
        }
    }
    Ok(p)
}

/// One edge per line: `producer dependent`.
pub fn parse_edges(text: &str) -> Result<Vec<(usize, usize)>, CliError> {
    content_lines(text)
        .map(|(n, l)| {
            let mut parts = l.split_whitespace();
            let producer = parse_num(n, parts.next(), "producer")?;
            let dependent = parse_num(n, parts.next(), "dependent")?;
            if parts.next().is_some() {
                return Err(bad(n, "trailing fields"));
            }
            Ok((producer, dependent))
        })
        .collect()
}
