//! One module per CLI subcommand.

pub mod absorption;
pub mod convergence;
pub mod equivalence;
pub mod run;
pub mod verify;

use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING-KEBAB-CASE")]
pub enum Status {
    Pass,
    Fail,
    /// A negative control that failed as designed.
    ExpectedFail,
}

impl Status {
    pub fn from_bound(value: f64, bound: f64) -> Self {
        if value.abs() <= bound {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::ExpectedFail => "EXPECTED-FAIL",
        }
    }

    /// `Fail` wins over everything else.
    pub fn all(items: impl IntoIterator<Item = Status>) -> Status {
        let mut out = Status::Pass;
        for s in items {
            match s {
                Status::Fail => return Status::Fail,
                Status::ExpectedFail => out = Status::ExpectedFail,
                Status::Pass => {}
            }
        }
        out
    }

    pub fn ok(self) -> bool {
        self != Status::Fail
    }
}
