//! Trace, sidecar and snapshot writers.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use msmaxwell::maxwell::EmState;
use msmaxwell::{Axis, Component, Grid};
use serde::Serialize;

use crate::config::RunConfig;
use crate::error::{HarnessError, Result};

/// One row per step. Cells that need more history than is available are empty.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct TraceRow {
    pub n: usize,
    pub t: f64,
    pub energy_i: f64,
    pub energy_ii: Option<f64>,
    pub eps1: Option<f64>,
    pub residual: Option<f64>,
    pub bound: Option<f64>,
    pub dissipation_rate: Option<f64>,
    pub s1: Option<f64>,
    pub s2: Option<f64>,
    pub s3: Option<f64>,
    pub s4: Option<f64>,
    pub s5: Option<f64>,
    pub s6: Option<f64>,
}

impl TraceRow {
    pub fn within_bound(&self) -> bool {
        match (self.residual, self.bound) {
            (Some(r), Some(b)) => r.abs() <= b,
            _ => true,
        }
    }

    pub fn is_finite(&self) -> bool {
        let opt = [self.energy_ii, self.eps1, self.residual, self.bound, self.dissipation_rate];
        let s = [self.s1, self.s2, self.s3, self.s4, self.s5, self.s6];
        self.t.is_finite() && self.energy_i.is_finite() && opt.iter().chain(&s).flatten().all(|v| v.is_finite())
    }
}

pub fn write_csv<R: Serialize>(path: &Path, rows: &[R]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(|e| HarnessError::io(path, e))
}

#[derive(Serialize)]
struct Sidecar<'a, S: Serialize> {
    tool: &'static str,
    version: &'static str,
    command: &'a str,
    config: &'a RunConfig,
    summary: &'a S,
}

/// Resolved config, code version and a result summary next to the trace.
pub fn write_sidecar<S: Serialize>(path: &Path, command: &str, config: &RunConfig, summary: &S) -> Result<()> {
    let doc = Sidecar { tool: env!("CARGO_PKG_NAME"), version: env!("CARGO_PKG_VERSION"), command, config, summary };
    let text = serde_json::to_string_pretty(&doc)?;
    fs::write(path, text + "\n").map_err(|e| HarnessError::io(path, e))
}

pub fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))
}

/// Time level of each component in a snapshot.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SnapshotLevel {
    pub e: f64,
    pub h: f64,
}

/// Text header terminated by `end\n`, then each component as little-endian
/// `f64` in header order, x fastest.
pub fn write_snapshot(
    dir: &Path,
    grid: &Grid,
    state: &EmState<f64>,
    step: usize,
    level: SnapshotLevel,
) -> Result<PathBuf> {
    let path = dir.join(format!("snapshot_{step:06}.bin"));
    let [nx, ny, nz] = grid.counts();
    let mut header = String::from("msmaxwell-snapshot 1\n");
    header += &format!("dims {nx} {ny} {nz}\n");
    header += &format!("spacing {} {} {}\n", grid.spacing(Axis::X), grid.spacing(Axis::Y), grid.spacing(Axis::Z));
    header += &format!("step {step}\nbyte_order little\nscalar f64\n");
    for c in Component::ALL {
        let s = c.stagger();
        let off = Axis::ALL.map(|a| if s.is_half(a) { "0.5" } else { "0" });
        let t = if c.is_electric() { level.e } else { level.h };
        header +=
            &format!("component {} offset {} {} {} time {t} count {}\n", c.name(), off[0], off[1], off[2], grid.len());
    }
    header += "end\n";
    let mut bytes = header.into_bytes();
    for c in Component::ALL {
        for v in state.component(c).as_slice() {
            bytes.extend_from_slice(&v.to_le_bytes());
        }
    }
    let mut f = fs::File::create(&path).map_err(|e| HarnessError::io(&path, e))?;
    f.write_all(&bytes).map_err(|e| HarnessError::io(&path, e))?;
    Ok(path)
}

/// Reads a snapshot back as `(component name, values)` pairs.
pub fn read_snapshot(path: &Path) -> Result<Vec<(String, Vec<f64>)>> {
    let bytes = fs::read(path).map_err(|e| HarnessError::io(path, e))?;
    let bad = |m: &str| HarnessError::Setup(format!("{}: {m}", path.display()));
    let end = bytes.windows(4).position(|w| w == b"end\n").ok_or_else(|| bad("missing header terminator"))?;
    let header = std::str::from_utf8(&bytes[..end]).map_err(|_| bad("header is not utf-8"))?;
    let mut cursor = end + 4;
    let mut out = Vec::new();
    for line in header.lines().filter(|l| l.starts_with("component ")) {
        let words: Vec<&str> = line.split_whitespace().collect();
        let count: usize = words.last().and_then(|w| w.parse().ok()).ok_or_else(|| bad("bad count"))?;
        let chunk = bytes.get(cursor..cursor + 8 * count).ok_or_else(|| bad("truncated data"))?;
        let values = chunk.chunks_exact(8).map(|b| f64::from_le_bytes(b.try_into().expect("8 bytes"))).collect();
        out.push((words[1].to_string(), values));
        cursor += 8 * count;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use msmaxwell::{make_grid, Boundary};

    #[test]
    fn snapshot_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let g = make_grid([3, 2, 2], [1.0; 3], 0.9, Boundary::Periodic).unwrap();
        let mut k = 0.0;
        let s = EmState::from_fn(&g, |_, _, _, _| {
            k += 0.25;
            k
        });
        let p = write_snapshot(dir.path(), &g, &s, 7, SnapshotLevel { e: 7.0, h: 6.5 }).unwrap();
        let back = read_snapshot(&p).unwrap();
        assert_eq!(back.len(), 6);
        for (c, (name, values)) in Component::ALL.iter().zip(&back) {
            assert_eq!(name, c.name());
            assert_eq!(values.as_slice(), s.component(*c).as_slice());
        }
        let text = String::from_utf8_lossy(&fs::read(&p).unwrap()).into_owned();
        assert!(text.contains("component Hz offset 0.5 0.5 0 time 6.5 count 12"));
    }

    #[test]
    fn empty_cells_in_trace() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("t.csv");
        write_csv(&p, &[TraceRow { n: 0, energy_i: 1.5, ..Default::default() }]).unwrap();
        let text = fs::read_to_string(&p).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "n,t,energy_i,energy_ii,eps1,residual,bound,dissipation_rate,s1,s2,s3,s4,s5,s6"
        );
        assert_eq!(lines.next().unwrap(), "0,0.0,1.5,,,,,,,,,,,");
    }

    #[test]
    fn bound_check() {
        let row = TraceRow { residual: Some(-2.0), bound: Some(1.0), ..Default::default() };
        assert!(!row.within_bound());
        assert!(TraceRow::default().within_bound());
        assert!(!TraceRow { eps1: Some(f64::NAN), ..Default::default() }.is_finite());
    }
}
