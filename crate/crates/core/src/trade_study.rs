//! Weighted decision matrices, weight sensitivity and a QFD
//! relationship-matrix scorer.

use serde::{Deserialize, Serialize};
use std::io::Write;

use crate::error::{Error, Result};

const WEIGHT_SUM_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Criterion {
    pub name: String,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub name: String,
    pub scores: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionMatrix {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub title: Option<String>,
    pub criteria: Vec<Criterion>,
    pub candidates: Vec<Candidate>,
}

impl DecisionMatrix {
    pub fn validate(&self) -> Result<()> {
        if self.criteria.is_empty() || self.candidates.is_empty() {
            return Err(Error::Validation("matrix needs at least one criterion and one candidate".into()));
        }
        for c in &self.criteria {
            if !(0.0..=1.0).contains(&c.weight) {
                return Err(Error::Validation(format!("weight of '{}' must lie in [0, 1], got {}", c.name, c.weight)));
            }
        }
        let sum: f64 = self.criteria.iter().map(|c| c.weight).sum();
        if (sum - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
            return Err(Error::Validation(format!("weights sum to {sum}, expected 1")));
        }
        for cand in &self.candidates {
            if cand.scores.len() != self.criteria.len() {
                return Err(Error::Validation(format!(
                    "candidate '{}' has {} scores for {} criteria",
                    cand.name,
                    cand.scores.len(),
                    self.criteria.len()
                )));
            }
            if let Some(s) = cand.scores.iter().find(|s| !(0.0..=10.0).contains(*s)) {
                return Err(Error::Validation(format!("candidate '{}' score {s} outside [0, 10]", cand.name)));
            }
        }
        Ok(())
    }

    pub fn criterion_index(&self, name: &str) -> Result<usize> {
        self.criteria
            .iter()
            .position(|c| c.name == name)
            .ok_or_else(|| Error::Validation(format!("unknown criterion '{name}'")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateResult {
    pub name: String,
    pub weighted_scores: Vec<f64>,
    pub total: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedResult {
    /// In input order.
    pub per_candidate: Vec<CandidateResult>,
    /// Names, best first. Equal totals keep input order.
    pub ranking: Vec<String>,
    /// The two best totals are equal.
    pub tie: bool,
}

impl RankedResult {
    pub fn winner(&self) -> &str {
        &self.ranking[0]
    }

    pub fn total_of(&self, name: &str) -> Option<f64> {
        self.per_candidate.iter().find(|c| c.name == name).map(|c| c.total)
    }

    pub fn write_csv<W: Write>(&self, criteria: &[Criterion], out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let err = |e: csv::Error| Error::Configuration(format!("csv write failed: {e}"));
        let mut header = vec!["candidate".to_string()];
        header.extend(criteria.iter().map(|c| c.name.clone()));
        header.extend(["total".to_string(), "rank".to_string()]);
        w.write_record(&header).map_err(err)?;
        for c in &self.per_candidate {
            let rank = self.ranking.iter().position(|n| *n == c.name).map_or(0, |p| p + 1);
            let mut row = vec![c.name.clone()];
            row.extend(c.weighted_scores.iter().map(|s| format!("{s:.3}")));
            row.push(format!("{:.3}", c.total));
            row.push(rank.to_string());
            w.write_record(&row).map_err(err)?;
        }
        w.flush().map_err(|e| Error::Configuration(format!("csv write failed: {e}")))
    }
}

fn score(m: &DecisionMatrix, weights: &[f64]) -> RankedResult {
    let per_candidate: Vec<CandidateResult> = m
        .candidates
        .iter()
        .map(|c| {
            let weighted_scores: Vec<f64> = c.scores.iter().zip(weights).map(|(s, w)| s * w).collect();
            let total = weighted_scores.iter().sum();
            CandidateResult { name: c.name.clone(), weighted_scores, total }
        })
        .collect();
    let mut order: Vec<usize> = (0..per_candidate.len()).collect();
    // stable: equal totals keep input order
    order.sort_by(|&a, &b| per_candidate[b].total.total_cmp(&per_candidate[a].total));
    let tie = order.len() > 1 && per_candidate[order[0]].total == per_candidate[order[1]].total;
    let ranking = order.iter().map(|&i| per_candidate[i].name.clone()).collect();
    RankedResult { per_candidate, ranking, tie }
}

/// Weighted-sum scoring: each cell is weight times score, totals are row
/// sums, ranking is by total.
pub fn evaluate(m: &DecisionMatrix) -> Result<RankedResult> {
    m.validate()?;
    let weights: Vec<f64> = m.criteria.iter().map(|c| c.weight).collect();
    Ok(score(m, &weights))
}

/// Weights after shifting one criterion by `delta` (floored at zero) and
/// renormalizing so they again sum to one.
pub fn perturbed_weights(m: &DecisionMatrix, criterion: usize, delta: f64) -> Option<Vec<f64>> {
    let mut w: Vec<f64> = m.criteria.iter().map(|c| c.weight).collect();
    w[criterion] = (w[criterion] + delta).max(0.0);
    let sum: f64 = w.iter().sum();
    if sum <= 0.0 {
        return None;
    }
    w.iter_mut().for_each(|x| *x /= sum);
    Some(w)
}

/// Top candidate after perturbing one criterion's weight by `delta`.
pub fn winner_after(m: &DecisionMatrix, criterion: &str, delta: f64) -> Result<String> {
    m.validate()?;
    let idx = m.criterion_index(criterion)?;
    let w = perturbed_weights(m, idx, delta)
        .ok_or_else(|| Error::Domain("perturbation removes every weight".into()))?;
    Ok(score(m, &w).ranking[0].clone())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WinnerFlip {
    /// Signed weight shift that first changes the winner.
    pub delta: f64,
    pub new_winner: String,
    pub weights: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensitivityReport {
    pub criterion: String,
    pub baseline_winner: String,
    pub tie: bool,
    /// `None` means the winner is stable over the whole grid.
    pub flip: Option<WinnerFlip>,
}

impl SensitivityReport {
    pub fn is_stable(&self) -> bool {
        self.flip.is_none()
    }
}

/// Grid of |delta| values searched by [`sensitivity`]: 0.01 to 0.30.
pub fn sensitivity_grid() -> Vec<f64> {
    (1..=30).map(|k| k as f64 / 100.0).collect()
}

/// Smallest weight shift on `criterion` (positive tried before negative at
/// each magnitude) that changes the top-ranked candidate.
pub fn sensitivity(m: &DecisionMatrix, criterion: &str) -> Result<SensitivityReport> {
    let base = evaluate(m)?;
    let idx = m.criterion_index(criterion)?;
    let baseline_winner = base.winner().to_string();
    let mut flip = None;
    'grid: for d in sensitivity_grid() {
        for delta in [d, -d] {
            let Some(w) = perturbed_weights(m, idx, delta) else { continue };
            let r = score(m, &w);
            if r.ranking[0] != baseline_winner {
                flip = Some(WinnerFlip { delta, new_winner: r.ranking[0].clone(), weights: w });
                break 'grid;
            }
        }
    }
    Ok(SensitivityReport { criterion: criterion.to_string(), baseline_winner, tie: base.tie, flip })
}

/// Allowed QFD relationship strengths.
pub const QFD_LEVELS: [u8; 4] = [0, 1, 3, 9];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QfdScore {
    /// Column index of the functional requirement.
    pub requirement: usize,
    pub score: f64,
}

/// Ranks functional requirements (columns) by `sum_i importance_i * rel_ij`
/// over customer requirements (rows). Ties keep column order.
pub fn qfd_scores(relationships: &[Vec<u8>], importance: &[f64]) -> Result<Vec<QfdScore>> {
    if relationships.len() != importance.len() {
        return Err(Error::Validation(format!(
            "{} relationship rows for {} customer requirements",
            relationships.len(),
            importance.len()
        )));
    }
    let cols = relationships.first().map_or(0, Vec::len);
    for (i, row) in relationships.iter().enumerate() {
        if row.len() != cols {
            return Err(Error::Validation(format!("row {i} has {} columns, expected {cols}", row.len())));
        }
        if let Some(v) = row.iter().find(|v| !QFD_LEVELS.contains(v)) {
            return Err(Error::Validation(format!("row {i} has relationship {v}, allowed 0, 1, 3, 9")));
        }
    }
    let mut scores: Vec<QfdScore> = (0..cols)
        .map(|j| QfdScore {
            requirement: j,
            score: relationships.iter().zip(importance).map(|(row, w)| w * row[j] as f64).sum(),
        })
        .collect();
    scores.sort_by(|a, b| b.score.total_cmp(&a.score));
    Ok(scores)
}

/// Named House-of-Quality matrix as stored on disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QfdMatrix {
    pub customer_requirements: Vec<Criterion>,
    pub functional_requirements: Vec<String>,
    pub relationships: Vec<Vec<u8>>,
}

impl QfdMatrix {
    /// `(functional requirement, score)`, best first.
    pub fn ranked(&self) -> Result<Vec<(String, f64)>> {
        if self.functional_requirements.len() != self.relationships.first().map_or(0, Vec::len) {
            return Err(Error::Validation("functional requirement names do not match columns".into()));
        }
        let importance: Vec<f64> = self.customer_requirements.iter().map(|c| c.weight).collect();
        Ok(qfd_scores(&self.relationships, &importance)?
            .into_iter()
            .map(|s| (self.functional_requirements[s.requirement].clone(), s.score))
            .collect())
    }
}

const BUILTIN: [(&str, &str); 6] = [
    ("table2", include_str!("../fixtures/table2.json")),
    ("table3", include_str!("../fixtures/table3.json")),
    ("table4", include_str!("../fixtures/table4.json")),
    ("table5", include_str!("../fixtures/table5.json")),
    ("table6", include_str!("../fixtures/table6.json")),
    ("table7", include_str!("../fixtures/table7.json")),
];

/// Names of the bundled component trade studies.
pub fn builtin_names() -> Vec<&'static str> {
    BUILTIN.iter().map(|(n, _)| *n).collect()
}

/// Loads one of the bundled trade studies (`table2` ... `table7`).
pub fn builtin(name: &str) -> Result<DecisionMatrix> {
    let (_, text) = BUILTIN
        .iter()
        .find(|(n, _)| *n == name)
        .ok_or_else(|| Error::Configuration(format!("no bundled matrix '{name}'")))?;
    serde_json::from_str(text).map_err(|e| Error::Configuration(format!("bundled matrix '{name}': {e}")))
}
