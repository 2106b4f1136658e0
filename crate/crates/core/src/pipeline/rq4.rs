use serde::{Deserialize, Serialize};

use super::{require_rows, Result};
use crate::corpus::{Label, LabeledContractSet};
use crate::metrics::MetricId;
use crate::stats::{mean_confidence_interval, ConfidenceInterval};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Direction {
    HigherInVulnerable,
    HigherInNeutral,
    Overlapping,
}

impl Direction {
    pub fn as_str(self) -> &'static str {
        match self {
            Direction::HigherInVulnerable => "higher-in-vulnerable",
            Direction::HigherInNeutral => "higher-in-neutral",
            Direction::Overlapping => "overlapping",
        }
    }

    pub fn between(vulnerable: &ConfidenceInterval, neutral: &ConfidenceInterval) -> Self {
        if vulnerable.lower > neutral.upper {
            Direction::HigherInVulnerable
        } else if neutral.lower > vulnerable.upper {
            Direction::HigherInNeutral
        } else {
            Direction::Overlapping
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rq4Row {
    pub metric: MetricId,
    pub vulnerable: ConfidenceInterval,
    pub neutral: ConfidenceInterval,
    pub direction: Direction,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rq4Section {
    pub level: f64,
    pub rows: Vec<Rq4Row>,
}

impl Rq4Section {
    pub fn get(&self, metric: MetricId) -> Option<&Rq4Row> {
        self.rows.iter().find(|r| r.metric == metric)
    }

    pub fn with_direction(&self, direction: Direction) -> Vec<MetricId> {
        self.rows.iter().filter(|r| r.direction == direction).map(|r| r.metric).collect()
    }
}

/// Per-metric confidence intervals of the mean in each group.
pub fn rq4_interval_comparison(set: &LabeledContractSet, level: f64) -> Result<Rq4Section> {
    require_rows(set, Label::Vulnerable, 2)?;
    require_rows(set, Label::Neutral, 2)?;
    let mut rows = Vec::with_capacity(MetricId::ALL.len());
    for metric in MetricId::ALL {
        let vulnerable = mean_confidence_interval(&set.group_column(metric, Label::Vulnerable), level)?;
        let neutral = mean_confidence_interval(&set.group_column(metric, Label::Neutral), level)?;
        rows.push(Rq4Row { metric, vulnerable, neutral, direction: Direction::between(&vulnerable, &neutral) });
    }
    Ok(Rq4Section { level, rows })
}
