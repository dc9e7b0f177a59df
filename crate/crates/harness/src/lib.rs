//! Experiment harness for the `msmaxwell` solvers.
//!
//! Each experiment returns a report; [`execute`] writes its tables and a
//! JSON sidecar when an output directory is given.

pub mod config;
pub mod error;
pub mod experiments;
pub mod init;
pub mod io;

use std::path::Path;

use serde::Serialize;

pub use config::RunConfig;
pub use error::{HarnessError, Result};
pub use experiments::Status;

use experiments::{absorption, convergence, equivalence, run, verify};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Experiment {
    Verify,
    Run,
    Equivalence,
    Convergence,
    Absorption,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Verify => "verify",
            Experiment::Run => "run",
            Experiment::Equivalence => "equivalence",
            Experiment::Convergence => "convergence",
            Experiment::Absorption => "absorption",
        }
    }
}

pub struct Outcome {
    pub status: Status,
    pub text: String,
}

fn save<R: Serialize, Row: Serialize>(
    out: Option<&Path>,
    cfg: &RunConfig,
    command: &str,
    sidecar: &str,
    report: &R,
    table: Option<(&str, &[Row])>,
) -> Result<()> {
    let Some(dir) = out else { return Ok(()) };
    if let Some((file, rows)) = table {
        io::write_csv(&dir.join(file), rows)?;
    }
    io::write_sidecar(&dir.join(sidecar), command, cfg, report)
}

pub fn execute(experiment: Experiment, cfg: &RunConfig, out: Option<&Path>) -> Result<Outcome> {
    if let Some(dir) = out {
        io::ensure_dir(dir)?;
    }
    let name = experiment.name();
    let sidecar = format!("{name}.json");
    let table = format!("{name}.csv");
    let outcome = match experiment {
        Experiment::Verify => {
            let r = verify::verify(cfg)?;
            save(out, cfg, name, &sidecar, &r, Some((&table, &r.checks)))?;
            Outcome { status: r.status(), text: r.render() }
        }
        Experiment::Run => {
            let r = run::run(cfg, out)?;
            save(out, cfg, name, &cfg.output.sidecar, &r, Some((&cfg.output.trace, &r.rows)))?;
            Outcome { status: r.status, text: r.render() }
        }
        Experiment::Equivalence => {
            let r = equivalence::equivalence(cfg)?;
            save(out, cfg, name, &sidecar, &r, Some((&table, &r.rows)))?;
            Outcome { status: r.status, text: r.render() }
        }
        Experiment::Convergence => {
            let r = convergence::convergence(cfg)?;
            save(out, cfg, name, &sidecar, &r, Some((&table, &r.rows)))?;
            Outcome { status: r.status, text: r.render() }
        }
        Experiment::Absorption => {
            let r = absorption::absorption(cfg)?;
            save(out, cfg, name, &sidecar, &r, Some((&table, &r.rows)))?;
            Outcome { status: r.status, text: r.render() }
        }
    };
    Ok(outcome)
}
