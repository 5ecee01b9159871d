use std::fs::OpenOptions;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::space::Point;
use crate::TuneError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TrialStatus {
    Running,
    /// Waiting at a rung for a promotion slot.
    Paused,
    /// Terminated early; never resumes.
    Stopped,
    Complete,
}

/// One configuration and the scores it reported at increasing budgets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub id: usize,
    pub params: Point,
    pub scores: Vec<(u64, f64)>,
    pub status: TrialStatus,
}

impl TrialRecord {
    pub fn new(id: usize, params: Point) -> Self {
        Self {
            id,
            params,
            scores: Vec::new(),
            status: TrialStatus::Running,
        }
    }

    pub fn record(&mut self, budget: u64, score: f64) -> Result<(), TuneError> {
        if let Some(&(last, _)) = self.scores.last() {
            if budget <= last {
                return Err(TuneError::BudgetOrder { last, got: budget });
            }
        }
        self.scores.push((budget, score));
        Ok(())
    }

    /// Score at the largest budget reached.
    pub fn last_score(&self) -> Option<f64> {
        self.scores.last().map(|&(_, s)| s)
    }

    pub fn last_budget(&self) -> Option<u64> {
        self.scores.last().map(|&(b, _)| b)
    }
}

/// One line of a trial log: a score reported by a trial at one budget.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialLogEntry {
    pub trial: usize,
    pub params: Point,
    pub budget: u64,
    pub score: f64,
    /// Seconds since the run started (virtual time for simulated workers).
    pub wall_time: f64,
}

/// Appends entries as JSON lines, creating the file if needed.
pub fn append_trial_log(path: &Path, entries: &[TrialLogEntry]) -> std::io::Result<()> {
    let mut file = OpenOptions::new().create(true).append(true).open(path)?;
    for e in entries {
        let line = serde_json::to_string(e).map_err(std::io::Error::other)?;
        writeln!(file, "{line}")?;
    }
    Ok(())
}

pub fn read_trial_log(path: &Path) -> std::io::Result<Vec<TrialLogEntry>> {
    std::fs::read_to_string(path)?
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| serde_json::from_str(l).map_err(std::io::Error::other))
        .collect()
}
