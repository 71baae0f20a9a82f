use serde::{Deserialize, Serialize};

use super::trace::CycleSummary;
use crate::economics::Usd;
use crate::error::{Error, Result};

/// Weights and reference values for the five scoring metrics.
///
/// Each metric maps to a subscore out of 10:
///
/// * task: 10 × fraction of cycles that succeeded
/// * stability: 10 × fraction of cycles without a stall
/// * speed: 10 when the mean successful cycle time is within `time_bound`,
///   falling linearly to 0 at twice the bound; 0 with no successes
/// * budget: 10 when `bom_total` is within `budget`, falling linearly to 0
///   at twice the budget
/// * aesthetic: taken as given, clamped to [0, 10]
///
/// The total is the weighted sum of the subscores.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Rubric {
    pub task_weight: f64,
    pub stability_weight: f64,
    pub speed_weight: f64,
    pub budget_weight: f64,
    pub aesthetic_weight: f64,
    /// Seconds.
    pub time_bound: f64,
    pub budget: Usd,
    pub bom_total: Usd,
    pub aesthetic: f64,
}

impl Default for Rubric {
    fn default() -> Self {
        Self {
            task_weight: 1.0,
            stability_weight: 1.0,
            speed_weight: 1.0,
            budget_weight: 1.0,
            aesthetic_weight: 1.0,
            time_bound: 10.0,
            budget: Usd::from_cents(25000),
            bom_total: Usd::from_cents(19925),
            aesthetic: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreCard {
    pub cycles: usize,
    pub successes: usize,
    pub mean_cycle_time: Option<f64>,
    pub task: f64,
    pub stability: f64,
    pub speed: f64,
    pub budget: f64,
    pub aesthetic: f64,
    pub total: f64,
}

fn linear_falloff(value: f64, bound: f64) -> f64 {
    if value <= bound {
        10.0
    } else {
        10.0 * (2.0 - value / bound).max(0.0)
    }
}

pub fn score_run(traces: &[CycleSummary], rubric: &Rubric) -> Result<ScoreCard> {
    if traces.is_empty() {
        return Err(Error::Domain("cannot score an empty run".into()));
    }
    if !(rubric.time_bound > 0.0) || rubric.budget.0 <= rust_decimal::Decimal::ZERO {
        return Err(Error::Validation("rubric time bound and budget must be positive".into()));
    }
    let n = traces.len() as f64;
    let ok: Vec<&CycleSummary> = traces.iter().filter(|t| t.succeeded).collect();
    let stalls = traces.iter().filter(|t| t.stalled()).count();
    let mean_cycle_time = (!ok.is_empty()).then(|| ok.iter().map(|t| t.cycle_time).sum::<f64>() / ok.len() as f64);

    let task = 10.0 * ok.len() as f64 / n;
    let stability = 10.0 * (n - stalls as f64) / n;
    let speed = mean_cycle_time.map_or(0.0, |m| linear_falloff(m, rubric.time_bound));
    let budget = linear_falloff(rubric.bom_total.to_f64(), rubric.budget.to_f64());
    let aesthetic = rubric.aesthetic.clamp(0.0, 10.0);
    let total = rubric.task_weight * task
        + rubric.stability_weight * stability
        + rubric.speed_weight * speed
        + rubric.budget_weight * budget
        + rubric.aesthetic_weight * aesthetic;
    Ok(ScoreCard { cycles: traces.len(), successes: ok.len(), mean_cycle_time, task, stability, speed, budget, aesthetic, total })
}
