use serde::Serialize;
use sha2::{Digest, Sha256};

use rft_core::tower::{Obligation, Status};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Overall verdict of a command; fixes the exit code.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    Verified,
    BudgetLimited,
    Refuted,
}

impl Outcome {
    pub fn exit_code(self) -> i32 {
        match self {
            Outcome::Verified => 0,
            Outcome::Refuted => 2,
            Outcome::BudgetLimited => 3,
        }
    }

    /// The worse of two outcomes: refuted beats budget-limited.
    pub fn and(self, other: Outcome) -> Outcome {
        self.max(other)
    }

    pub fn of_status(s: &Status) -> Outcome {
        match s {
            Status::Verified(_) => Outcome::Verified,
            Status::BudgetLimited(_) => Outcome::BudgetLimited,
            Status::Refuted(_) | Status::Forced(_) => Outcome::Refuted,
        }
    }

    pub fn of_ledger(ledger: &[Obligation]) -> Outcome {
        ledger.iter().map(|o| Outcome::of_status(&o.status)).fold(Outcome::Verified, Outcome::and)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Input {
    pub file: String,
    pub sha256: String,
}

impl Input {
    pub fn new(file: &str, bytes: &[u8]) -> Input {
        Input { file: file.to_string(), sha256: format!("{:x}", Sha256::digest(bytes)) }
    }
}

#[derive(Debug, Serialize)]
pub struct Report<R: Serialize> {
    pub command: Vec<String>,
    pub version: &'static str,
    pub inputs: Vec<Input>,
    pub verdict: Outcome,
    pub exit_code: i32,
    pub result: R,
    /// Obligations recorded while building the tower.
    pub ledger: Vec<Obligation>,
}

impl<R: Serialize> Report<R> {
    pub fn new(command: &[String], inputs: Vec<Input>, verdict: Outcome, result: R, ledger: &[Obligation]) -> Self {
        Report {
            command: command.to_vec(),
            version: VERSION,
            inputs,
            verdict,
            exit_code: verdict.exit_code(),
            result,
            ledger: ledger.to_vec(),
        }
    }

    pub fn render(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }
}
