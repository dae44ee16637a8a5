use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Result, SbiteError};
use crate::risk::Criterion;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ExperimentId {
    ZouModel1,
    ZouModel2,
    Js04,
    Js04Q3,
    NullCoverage,
    OracleBound,
}

impl ExperimentId {
    pub const ALL: [ExperimentId; 6] = [
        ExperimentId::ZouModel1,
        ExperimentId::ZouModel2,
        ExperimentId::Js04,
        ExperimentId::Js04Q3,
        ExperimentId::NullCoverage,
        ExperimentId::OracleBound,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentId::ZouModel1 => "zou-model1",
            ExperimentId::ZouModel2 => "zou-model2",
            ExperimentId::Js04 => "js04",
            ExperimentId::Js04Q3 => "js04-q3",
            ExperimentId::NullCoverage => "null-coverage",
            ExperimentId::OracleBound => "oracle-bound",
        }
    }

    pub fn default_replicates(self) -> usize {
        match self {
            ExperimentId::ZouModel1 | ExperimentId::ZouModel2 => 100,
            ExperimentId::Js04 | ExperimentId::Js04Q3 => 20,
            ExperimentId::NullCoverage => 2000,
            ExperimentId::OracleBound => 1000,
        }
    }

    /// Cell labels in table order.
    pub fn cells(self) -> Vec<String> {
        match self {
            // N:σ
            ExperimentId::ZouModel1 => cross(&[20, 60], &[1, 3, 6]),
            ExperimentId::ZouModel2 => cross(&[40, 80], &[1, 3, 6]),
            // nonzero count:μ
            ExperimentId::Js04 | ExperimentId::Js04Q3 => cross(&[5, 50, 500], &[3, 4, 5, 7]),
            // N:Q
            ExperimentId::NullCoverage => cross(&[4096], &[1, 3]),
            // Q:ν:s at N = 500
            ExperimentId::OracleBound => {
                let mut out = Vec::new();
                for q in [2, 3] {
                    for nu in [1, 2] {
                        for s in [1, 2] {
                            out.push(format!("{q}:{nu}:{s}"));
                        }
                    }
                }
                out
            }
        }
    }
}

fn cross(a: &[usize], b: &[usize]) -> Vec<String> {
    a.iter().flat_map(|x| b.iter().map(move |y| format!("{x}:{y}"))).collect()
}

impl FromStr for ExperimentId {
    type Err = SbiteError;

    fn from_str(s: &str) -> Result<Self> {
        ExperimentId::ALL.into_iter().find(|e| e.name() == s).ok_or_else(|| {
            let names: Vec<&str> = ExperimentId::ALL.iter().map(|e| e.name()).collect();
            SbiteError::Config(format!("unknown experiment '{s}' (expected one of {})", names.join(", ")))
        })
    }
}

impl std::fmt::Display for ExperimentId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub experiment: ExperimentId,
    pub replicates: usize,
    pub seed: u64,
    /// Cell labels to run; all cells when `None`.
    pub cells: Option<Vec<String>>,
    /// Selection criterion for the SURE-type estimators.
    pub criterion: Criterion,
    pub output: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn new(experiment: ExperimentId, seed: u64) -> Self {
        Self {
            experiment,
            replicates: experiment.default_replicates(),
            seed,
            cells: None,
            criterion: Criterion::Sure,
            output: None,
        }
    }

    pub fn with_replicates(mut self, replicates: usize) -> Self {
        self.replicates = replicates;
        self
    }

    /// Parses a comma-separated list such as `"5:7,50:3"`.
    pub fn with_cells(mut self, spec: &str) -> Result<Self> {
        let cells: Vec<String> = spec.split(',').map(|c| c.trim().to_string()).filter(|c| !c.is_empty()).collect();
        self.cells = Some(cells);
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.replicates == 0 {
            return Err(SbiteError::Config("replicates must be at least 1".into()));
        }
        if let Some(cells) = &self.cells {
            if cells.is_empty() {
                return Err(SbiteError::Config("cell list is empty".into()));
            }
            let known = self.experiment.cells();
            if let Some(bad) = cells.iter().find(|c| !known.contains(c)) {
                return Err(SbiteError::Config(format!(
                    "unknown cell '{bad}' for {} (known: {})",
                    self.experiment,
                    known.join(", ")
                )));
            }
        }
        Ok(())
    }

    /// Selected cells in table order.
    pub fn selected_cells(&self) -> Vec<String> {
        let all = self.experiment.cells();
        match &self.cells {
            None => all,
            Some(sel) => all.into_iter().filter(|c| sel.contains(c)).collect(),
        }
    }
}

/// Splits `"a:b[:c]"` into numbers.
pub(crate) fn parse_cell(cell: &str) -> Vec<f64> {
    cell.split(':').map(|v| v.parse().expect("cell labels are generated internally")).collect()
}
