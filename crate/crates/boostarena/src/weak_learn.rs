//! Single-threshold hypotheses, exhaustive candidate enumeration, best-fit
//! solvers for weighted and cost-weighted data, and edge measurement.

use crate::error::{Error, Result};
use crate::stage_game::TOL;
use serde::{Deserialize, Serialize};

/// Predicts `action_above` on the side `direction . p >= offset` of a
/// hyperplane and `action_below` on the other.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdHypothesis {
    pub direction: Vec<f64>,
    pub offset: f64,
    pub action_above: usize,
    pub action_below: usize,
}

impl ThresholdHypothesis {
    pub fn predict(&self, p: &[f64]) -> usize {
        let dot: f64 = self.direction.iter().zip(p).map(|(d, x)| d * x).sum();
        if dot >= self.offset {
            self.action_above
        } else {
            self.action_below
        }
    }
}

#[derive(Debug, Clone)]
pub struct WeightedSupport {
    pub points: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
    pub labels: Vec<usize>,
    pub n_actions: usize,
}

impl WeightedSupport {
    pub fn new(points: Vec<Vec<f64>>, weights: Vec<f64>, labels: Vec<usize>, n_actions: usize) -> Result<Self> {
        if points.len() != weights.len() || points.len() != labels.len() {
            return Err(Error::Config("support length mismatch".into()));
        }
        if weights.iter().any(|w| *w < 0.0 || !w.is_finite()) {
            return Err(Error::Config("negative weight".into()));
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > TOL {
            return Err(Error::Config(format!("weights sum to {sum}")));
        }
        if labels.iter().any(|l| *l >= n_actions) {
            return Err(Error::Config("label outside action set".into()));
        }
        Ok(Self { points, weights, labels, n_actions })
    }
}

#[derive(Debug, Clone)]
pub struct CostedSupport {
    pub points: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
    /// costs[j][a]: cost of assigning label a to point j.
    pub costs: Vec<Vec<f64>>,
    pub n_actions: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EdgeReport {
    pub best_accuracy: f64,
    pub random_guess_baseline: f64,
    pub edge: f64,
}

/// All single-threshold candidates distinguishable on `points`: per
/// direction, offsets at midpoints of consecutive distinct projections
/// plus one below the minimum and one above the maximum, crossed with
/// every (action_above, action_below) pair.
pub fn enumerate_candidates(
    points: &[Vec<f64>],
    directions: &[Vec<f64>],
    n_actions: usize,
) -> Result<Vec<ThresholdHypothesis>> {
    if directions.is_empty() {
        return Err(Error::EmptyCandidates);
    }
    if points.is_empty() {
        return Err(Error::Config("empty point set".into()));
    }
    let mut out = Vec::new();
    for dir in directions {
        let norm: f64 = dir.iter().map(|d| d * d).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > TOL {
            return Err(Error::Config("direction must be a unit vector".into()));
        }
        let mut proj: Vec<f64> = points
            .iter()
            .map(|p| dir.iter().zip(p).map(|(d, x)| d * x).sum())
            .collect();
        proj.sort_by(|a, b| a.partial_cmp(b).unwrap());
        proj.dedup_by(|a, b| (*a - *b).abs() <= TOL);
        let mut offsets = Vec::with_capacity(proj.len() + 1);
        offsets.push(proj[0] - 1.0);
        for w in proj.windows(2) {
            offsets.push(0.5 * (w[0] + w[1]));
        }
        offsets.push(proj[proj.len() - 1] + 1.0);
        for &offset in &offsets {
            for action_above in 0..n_actions {
                for action_below in 0..n_actions {
                    out.push(ThresholdHypothesis {
                        direction: dir.clone(),
                        offset,
                        action_above,
                        action_below,
                    });
                }
            }
        }
    }
    Ok(out)
}

/// The single ascending direction for 1-D points.
pub fn axis_directions(dim: usize) -> Vec<Vec<f64>> {
    (0..dim)
        .map(|j| {
            let mut d = vec![0.0; dim];
            d[j] = 1.0;
            d
        })
        .collect()
}

/// Candidate maximizing weighted accuracy; ties broken by enumeration
/// order.
pub fn fit_best(
    support: &WeightedSupport,
    candidates: &[ThresholdHypothesis],
) -> Result<(ThresholdHypothesis, f64)> {
    if candidates.is_empty() {
        return Err(Error::EmptyCandidates);
    }
    let mut best = 0usize;
    let mut best_acc = f64::NEG_INFINITY;
    for (i, h) in candidates.iter().enumerate() {
        let acc: f64 = support
            .points
            .iter()
            .zip(&support.weights)
            .zip(&support.labels)
            .map(|((p, w), y)| if h.predict(p) == *y { *w } else { 0.0 })
            .sum();
        if acc > best_acc + TOL {
            best = i;
            best_acc = acc;
        }
    }
    Ok((candidates[best].clone(), best_acc))
}

/// Candidate minimizing the expected cost sum_j w_j c_{j, h(p_j)}; ties
/// broken by enumeration order.
pub fn fit_best_costed(
    support: &CostedSupport,
    candidates: &[ThresholdHypothesis],
) -> Result<(ThresholdHypothesis, f64)> {
    if candidates.is_empty() {
        return Err(Error::EmptyCandidates);
    }
    let mut best = 0usize;
    let mut best_cost = f64::INFINITY;
    for (i, h) in candidates.iter().enumerate() {
        let cost: f64 = support
            .points
            .iter()
            .zip(&support.weights)
            .zip(&support.costs)
            .map(|((p, w), row)| w * row[h.predict(p)])
            .sum();
        if cost < best_cost - TOL {
            best = i;
            best_cost = cost;
        }
    }
    Ok((candidates[best].clone(), best_cost))
}

/// Expected error of a uniform random guesser flipped to correct with
/// probability rho.
pub fn random_guess_baseline(n_actions: usize, rho: f64) -> f64 {
    (1.0 - rho) * (n_actions as f64 - 1.0) / n_actions as f64
}

/// Per-row mean-cost baseline of the flipped uniform guesser for cost
/// matrices.
pub fn random_guess_baseline_costed(support: &CostedSupport, rho: f64) -> f64 {
    support
        .weights
        .iter()
        .zip(&support.costs)
        .map(|(w, row)| {
            let mean: f64 = row.iter().sum::<f64>() / row.len() as f64;
            w * (1.0 - rho) * mean
        })
        .sum()
}

/// Empirical weak-learnability edge. Two actions: accuracy minus 1/2.
/// More actions: the largest rho at which the best candidate's error is
/// still no worse than the (1-rho)-flipped uniform guesser.
pub fn measure_edge(
    support: &WeightedSupport,
    candidates: &[ThresholdHypothesis],
) -> Result<EdgeReport> {
    let (_, best_accuracy) = fit_best(support, candidates)?;
    let k = support.n_actions;
    if k == 2 {
        Ok(EdgeReport {
            best_accuracy,
            random_guess_baseline: 0.5,
            edge: best_accuracy - 0.5,
        })
    } else {
        let base = random_guess_baseline(k, 0.0);
        let err = 1.0 - best_accuracy;
        Ok(EdgeReport {
            best_accuracy,
            random_guess_baseline: 1.0 - base,
            edge: 1.0 - err / base,
        })
    }
}
