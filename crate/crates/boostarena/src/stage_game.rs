//! One-shot sender-receiver stage game: states and priors, payoff tables,
//! Bayes posteriors and the rational receiver reply with its strictness.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

/// Absolute tolerance for probability and payoff comparisons.
pub const TOL: f64 = 1e-9;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StateSpace {
    pub states: Vec<String>,
    pub prior: Vec<f64>,
}

impl StateSpace {
    pub fn new(states: Vec<String>, prior: Vec<f64>) -> Result<Self> {
        let s = Self { states, prior };
        s.validate()?;
        Ok(s)
    }

    pub fn uniform(states: Vec<String>) -> Self {
        let n = states.len();
        Self {
            states,
            prior: vec![1.0 / n as f64; n],
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.states.is_empty() {
            return Err(Error::InvalidGame("empty state space".into()));
        }
        if self.states.len() != self.prior.len() {
            return Err(Error::InvalidGame("prior length != state count".into()));
        }
        if self.prior.iter().any(|p| *p < 0.0 || !p.is_finite()) {
            return Err(Error::InvalidGame("negative prior probability".into()));
        }
        let sum: f64 = self.prior.iter().sum();
        if (sum - 1.0).abs() > TOL {
            return Err(Error::InvalidGame(format!("prior sums to {sum}, not 1")));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReceiverKind {
    Algorithmic,
    Rational,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TypeWeight {
    pub weight: f64,
    pub kind: ReceiverKind,
}

/// Concave utility for the insurance game.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UtilityFn {
    Sqrt,
    Linear,
}

impl UtilityFn {
    pub fn eval(&self, wealth: f64) -> Result<f64> {
        if wealth < 0.0 {
            return Err(Error::UtilityDomain(wealth));
        }
        Ok(match self {
            UtilityFn::Sqrt => wealth.sqrt(),
            UtilityFn::Linear => wealth,
        })
    }
}

/// Closed-form payoff backing for the builtin games. Kept alongside the
/// dense tables so a game can be re-tabulated on an extended price grid.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PayoffForm {
    Rubinstein {
        v_l: f64,
        v_h: f64,
        c_l: f64,
        c1: f64,
        c2: f64,
        r: f64,
    },
    Insurance {
        income: f64,
        loss: f64,
        risks: Vec<f64>,
        utility: UtilityFn,
    },
    Signaling {
        thetas: Vec<f64>,
        wages: Vec<f64>,
    },
}

impl PayoffForm {
    fn u(&self, state: usize, p: &[f64], action: usize) -> Result<f64> {
        match self {
            PayoffForm::Rubinstein { c_l, c1, c2, r, .. } => {
                // action 0 = buy. Seller's cost in the high state is the
                // population-average service cost r*c1 + (1-r)*c2.
                if action != 0 {
                    return Ok(0.0);
                }
                let cost = if state == 0 { *c_l } else { r * c1 + (1.0 - r) * c2 };
                Ok(p[0] - cost)
            }
            PayoffForm::Insurance {
                income,
                loss,
                risks,
                utility,
            } => {
                let theta = risks[state];
                let (x, q) = (p[0], p[1]);
                if action == 0 {
                    Ok((1.0 - theta) * utility.eval(income - q)?
                        + theta * utility.eval(income - q - loss + x)?)
                } else {
                    Ok((1.0 - theta) * utility.eval(*income)?
                        + theta * utility.eval(income - loss)?)
                }
            }
            PayoffForm::Signaling { thetas, wages } => {
                Ok(wages[action] - p[0] / (thetas[state] + 1.0))
            }
        }
    }

    fn v(&self, state: usize, p: &[f64], action: usize) -> Result<f64> {
        match self {
            PayoffForm::Rubinstein { v_l, v_h, .. } => {
                if action != 0 {
                    return Ok(0.0);
                }
                let value = if state == 0 { *v_l } else { *v_h };
                Ok(value - p[0])
            }
            PayoffForm::Insurance { risks, .. } => {
                if action == 0 {
                    Ok(p[1] - risks[state] * p[0])
                } else {
                    Ok(0.0)
                }
            }
            PayoffForm::Signaling { thetas, wages } => {
                let d = thetas[state] - wages[action];
                Ok(-(d * d))
            }
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StageGame {
    pub state_space: StateSpace,
    pub sender_actions: Vec<Vec<f64>>,
    pub receiver_actions: Vec<String>,
    u_table: Vec<f64>,
    v_table: Vec<f64>,
    pub form: Option<PayoffForm>,
    pub receiver_type_mix: Option<Vec<TypeWeight>>,
}

impl StageGame {
    pub fn from_tables(
        state_space: StateSpace,
        sender_actions: Vec<Vec<f64>>,
        receiver_actions: Vec<String>,
        u_table: Vec<f64>,
        v_table: Vec<f64>,
    ) -> Result<Self> {
        let g = Self {
            state_space,
            sender_actions,
            receiver_actions,
            u_table,
            v_table,
            form: None,
            receiver_type_mix: None,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn from_form(
        state_space: StateSpace,
        sender_actions: Vec<Vec<f64>>,
        receiver_actions: Vec<String>,
        form: PayoffForm,
    ) -> Result<Self> {
        let (ns, np, na) = (
            state_space.len(),
            sender_actions.len(),
            receiver_actions.len(),
        );
        let mut u_table = Vec::with_capacity(ns * np * na);
        let mut v_table = Vec::with_capacity(ns * np * na);
        for s in 0..ns {
            for p in &sender_actions {
                for a in 0..na {
                    u_table.push(form.u(s, p, a)?);
                    v_table.push(form.v(s, p, a)?);
                }
            }
        }
        let g = Self {
            state_space,
            sender_actions,
            receiver_actions,
            u_table,
            v_table,
            form: Some(form),
            receiver_type_mix: None,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        self.state_space.validate()?;
        if self.sender_actions.is_empty() {
            return Err(Error::InvalidGame("need at least one sender action".into()));
        }
        if self.receiver_actions.len() < 2 {
            return Err(Error::InvalidGame("need at least two receiver actions".into()));
        }
        let dim = self.sender_actions[0].len();
        if dim == 0 || self.sender_actions.iter().any(|p| p.len() != dim) {
            return Err(Error::InvalidGame("sender actions of mixed dimension".into()));
        }
        let want = self.n_states() * self.n_points() * self.n_actions();
        if self.u_table.len() != want || self.v_table.len() != want {
            return Err(Error::InvalidGame("payoff table size mismatch".into()));
        }
        if self
            .u_table
            .iter()
            .chain(self.v_table.iter())
            .any(|x| !x.is_finite())
        {
            return Err(Error::InvalidGame("non-finite payoff".into()));
        }
        if let Some(mix) = &self.receiver_type_mix {
            let sum: f64 = mix.iter().map(|t| t.weight).sum();
            if (sum - 1.0).abs() > TOL || mix.iter().any(|t| t.weight < 0.0) {
                return Err(Error::InvalidGame("receiver_type_mix weights must sum to 1".into()));
            }
        }
        Ok(())
    }

    pub fn n_states(&self) -> usize {
        self.state_space.len()
    }

    pub fn n_points(&self) -> usize {
        self.sender_actions.len()
    }

    pub fn n_actions(&self) -> usize {
        self.receiver_actions.len()
    }

    pub fn dim(&self) -> usize {
        self.sender_actions[0].len()
    }

    #[inline]
    fn idx(&self, state: usize, point: usize, action: usize) -> usize {
        (state * self.n_points() + point) * self.n_actions() + action
    }

    /// Sender payoff u(theta, p, a).
    pub fn u(&self, state: usize, point: usize, action: usize) -> f64 {
        self.u_table[self.idx(state, point, action)]
    }

    /// Receiver payoff v(theta, p, a).
    pub fn v(&self, state: usize, point: usize, action: usize) -> f64 {
        self.v_table[self.idx(state, point, action)]
    }

    pub fn point_index(&self, p: &[f64]) -> Option<usize> {
        self.sender_actions
            .iter()
            .position(|q| q.len() == p.len() && q.iter().zip(p).all(|(a, b)| (a - b).abs() <= TOL))
    }

    /// Rebuild the game with extra sender actions appended (closed-form
    /// games only). Existing action indices are preserved.
    pub fn with_extra_actions(&self, extra: &[Vec<f64>]) -> Result<StageGame> {
        let form = self.form.clone().ok_or_else(|| {
            Error::InvalidGame("cannot extend a table-backed game with new actions".into())
        })?;
        let mut actions = self.sender_actions.clone();
        for p in extra {
            if self.point_index(p).is_none() {
                actions.push(p.clone());
            }
        }
        let mut g = StageGame::from_form(
            self.state_space.clone(),
            actions,
            self.receiver_actions.clone(),
            form,
        )?;
        g.receiver_type_mix = self.receiver_type_mix.clone();
        Ok(g)
    }
}

/// Finite-support mixed sender strategy: one distribution over
/// sender_actions per state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SenderStrategy {
    pub probs: Vec<Vec<f64>>,
}

impl SenderStrategy {
    pub fn new(game: &StageGame, probs: Vec<Vec<f64>>) -> Result<Self> {
        let s = Self { probs };
        s.validate(game)?;
        Ok(s)
    }

    /// Build from per-state sparse (point index, probability) lists.
    pub fn from_support(game: &StageGame, rows: &[&[(usize, f64)]]) -> Result<Self> {
        let mut probs = vec![vec![0.0; game.n_points()]; game.n_states()];
        for (s, row) in rows.iter().enumerate() {
            for &(p, w) in row.iter() {
                probs[s][p] += w;
            }
        }
        Self::new(game, probs)
    }

    pub fn validate(&self, game: &StageGame) -> Result<()> {
        if self.probs.len() != game.n_states() {
            return Err(Error::InvalidStrategy("one row per state required".into()));
        }
        for row in &self.probs {
            if row.len() != game.n_points() {
                return Err(Error::InvalidStrategy("row length != sender action count".into()));
            }
            if row.iter().any(|p| *p < 0.0 || !p.is_finite()) {
                return Err(Error::InvalidStrategy("negative probability".into()));
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > TOL {
                return Err(Error::InvalidStrategy(format!("row sums to {sum}")));
            }
        }
        Ok(())
    }

    /// Union of per-state supports, ascending point index.
    pub fn support(&self) -> Vec<usize> {
        let n = self.probs.first().map_or(0, |r| r.len());
        (0..n)
            .filter(|&p| self.probs.iter().any(|row| row[p] > 0.0))
            .collect()
    }

    /// Marginal probability of a sender action under the prior.
    pub fn marginal(&self, prior: &[f64], point: usize) -> f64 {
        prior
            .iter()
            .zip(&self.probs)
            .map(|(pi, row)| pi * row[point])
            .sum()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Posterior {
    pub probs: Vec<f64>,
    pub on_path: bool,
}

/// Bayes posterior over states after observing sender action `point`;
/// off-path actions fall back to the prior.
pub fn posterior(game: &StageGame, sigma: &SenderStrategy, point: usize) -> Posterior {
    let prior = &game.state_space.prior;
    let joint: Vec<f64> = prior
        .iter()
        .zip(&sigma.probs)
        .map(|(pi, row)| pi * row[point])
        .collect();
    let total: f64 = joint.iter().sum();
    if total <= 0.0 {
        Posterior {
            probs: prior.clone(),
            on_path: false,
        }
    } else {
        Posterior {
            probs: joint.iter().map(|j| j / total).collect(),
            on_path: true,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LabelEntry {
    pub point: usize,
    pub action: usize,
    pub margin: f64,
    pub strict: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RationalLabel {
    pub entries: Vec<LabelEntry>,
}

impl RationalLabel {
    pub fn get(&self, point: usize) -> Option<&LabelEntry> {
        self.entries.iter().find(|e| e.point == point)
    }

    pub fn reply_map(&self) -> HashMap<usize, usize> {
        self.entries.iter().map(|e| (e.point, e.action)).collect()
    }
}

/// Posterior-expected receiver payoff of each action at `point`.
pub fn posterior_scores(game: &StageGame, post: &Posterior, point: usize) -> Vec<f64> {
    (0..game.n_actions())
        .map(|a| {
            post.probs
                .iter()
                .enumerate()
                .map(|(s, pi)| pi * game.v(s, point, a))
                .sum()
        })
        .collect()
}

fn prior_scores(game: &StageGame, point: usize) -> Vec<f64> {
    (0..game.n_actions())
        .map(|a| {
            game.state_space
                .prior
                .iter()
                .enumerate()
                .map(|(s, pi)| pi * game.v(s, point, a))
                .sum()
        })
        .collect()
}

/// The rational label y^R: per support point, the receiver action
/// maximizing posterior-expected payoff. Exact ties are resolved by the
/// prior-expected payoff (the reply the receiver would pick knowing
/// nothing), then by lowest action index; this reproduces the monopoly
/// game's equilibrium reply at both zero-surplus prices.
pub fn rational_label(game: &StageGame, sigma: &SenderStrategy) -> RationalLabel {
    let entries = sigma
        .support()
        .into_iter()
        .map(|point| {
            let post = posterior(game, sigma, point);
            let scores = posterior_scores(game, &post, point);
            let best = scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let tied: Vec<usize> = (0..scores.len())
                .filter(|&a| scores[a] >= best - TOL)
                .collect();
            let action = if tied.len() == 1 {
                tied[0]
            } else {
                let fallback = prior_scores(game, point);
                let fb_best = tied
                    .iter()
                    .map(|&a| fallback[a])
                    .fold(f64::NEG_INFINITY, f64::max);
                *tied
                    .iter()
                    .find(|&&a| fallback[a] >= fb_best - TOL)
                    .unwrap()
            };
            let margin = if tied.len() > 1 {
                0.0
            } else {
                let second = scores
                    .iter()
                    .enumerate()
                    .filter(|(a, _)| *a != action)
                    .map(|(_, s)| *s)
                    .fold(f64::NEG_INFINITY, f64::max);
                if second.is_finite() { best - second } else { 0.0 }
            };
            LabelEntry {
                point,
                action,
                margin,
                strict: margin > TOL,
            }
        })
        .collect();
    RationalLabel { entries }
}

/// The label an inference-driven receiver converges to: argmax of
/// posterior-expected payoff with ties to the lowest action index (the
/// ">= 0" branch of the sign estimator).
pub fn limit_label(game: &StageGame, sigma: &SenderStrategy, point: usize) -> usize {
    let post = posterior(game, sigma, point);
    let scores = posterior_scores(game, &post, point);
    let best = scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    (0..scores.len()).find(|&a| scores[a] >= best - TOL).unwrap()
}

/// Ex-ante sender payoff against a fixed reply map. With a receiver type
/// mix, algorithmic types follow `reply` and rational types play y^R.
pub fn sender_expected_payoff(
    game: &StageGame,
    sigma: &SenderStrategy,
    reply: &HashMap<usize, usize>,
) -> Result<f64> {
    let support = sigma.support();
    for &p in &support {
        if !reply.contains_key(&p) {
            return Err(Error::IncompleteReply(p));
        }
    }
    let rational = game
        .receiver_type_mix
        .as_ref()
        .map(|_| rational_label(game, sigma).reply_map());
    let mut total = 0.0;
    for (s, pi) in game.state_space.prior.iter().enumerate() {
        for &p in &support {
            let w = pi * sigma.probs[s][p];
            if w == 0.0 {
                continue;
            }
            match (&game.receiver_type_mix, &rational) {
                (Some(mix), Some(yr)) => {
                    for t in mix {
                        let a = match t.kind {
                            ReceiverKind::Algorithmic => reply[&p],
                            ReceiverKind::Rational => yr[&p],
                        };
                        total += w * t.weight * game.u(s, p, a);
                    }
                }
                _ => total += w * game.u(s, p, reply[&p]),
            }
        }
    }
    Ok(total)
}

/// Long-run average receiver payoff from a reply map, for symmetry with
/// sender_expected_payoff.
pub fn receiver_expected_payoff(
    game: &StageGame,
    sigma: &SenderStrategy,
    reply: &HashMap<usize, usize>,
) -> Result<f64> {
    let support = sigma.support();
    for &p in &support {
        if !reply.contains_key(&p) {
            return Err(Error::IncompleteReply(p));
        }
    }
    let mut total = 0.0;
    for (s, pi) in game.state_space.prior.iter().enumerate() {
        for &p in &support {
            total += pi * sigma.probs[s][p] * game.v(s, p, reply[&p]);
        }
    }
    Ok(total)
}

/// Monopoly pricing game with adverse selection (two quality states,
/// buy/not-buy receiver). Preconditions are the lemons inequalities.
pub fn make_rubinstein(
    v_l: f64,
    v_h: f64,
    c_l: f64,
    c1: f64,
    c2: f64,
    r: f64,
    prices: &[f64],
) -> Result<StageGame> {
    if !(c1 > v_h) {
        return Err(Error::InvalidGame("c1 > vH violated".into()));
    }
    if !(v_h > c2) {
        return Err(Error::InvalidGame("vH > c2 violated".into()));
    }
    if !(c2 > v_l) {
        return Err(Error::InvalidGame("c2 > vL violated".into()));
    }
    if !(v_l > c_l) {
        return Err(Error::InvalidGame("vL > cL violated".into()));
    }
    if !(0.0..=1.0).contains(&r) {
        return Err(Error::InvalidGame("r outside [0,1]".into()));
    }
    if !(r * c1 + (1.0 - r) * c2 > v_h) {
        return Err(Error::InvalidGame("severe lemon violated".into()));
    }
    if prices.is_empty() {
        return Err(Error::InvalidGame("empty price grid".into()));
    }
    StageGame::from_form(
        StateSpace::uniform(vec!["L".into(), "H".into()]),
        prices.iter().map(|p| vec![*p]).collect(),
        vec!["buy".into(), "not-buy".into()],
        PayoffForm::Rubinstein {
            v_l,
            v_h,
            c_l,
            c1,
            c2,
            r,
        },
    )
}

/// Insurance game: the sender proposes a contract (payment x, premium q),
/// the receiver accepts or rejects.
pub fn make_insurance(
    utility: UtilityFn,
    income: f64,
    loss: f64,
    risks: (f64, f64),
    contracts: &[(f64, f64)],
) -> Result<StageGame> {
    let (lo, hi) = risks;
    if !(0.0 < lo && lo < hi && hi < 1.0) {
        return Err(Error::InvalidGame("need 0 < theta_L < theta_H < 1".into()));
    }
    if contracts.is_empty() {
        return Err(Error::InvalidGame("empty contract list".into()));
    }
    StageGame::from_form(
        StateSpace::uniform(vec!["low-risk".into(), "high-risk".into()]),
        contracts.iter().map(|(x, q)| vec![*x, *q]).collect(),
        vec!["accept".into(), "reject".into()],
        PayoffForm::Insurance {
            income,
            loss,
            risks: vec![lo, hi],
            utility: utility,
        },
    )
}

/// Education signaling game: receiver picks a wage off a grid of spacing
/// delta reaching 1 + max theta.
pub fn make_signaling(
    theta_values: &[f64],
    education_levels: &[f64],
    delta: f64,
) -> Result<StageGame> {
    if delta <= 0.0 {
        return Err(Error::InvalidGame("delta must be positive".into()));
    }
    if theta_values.is_empty() || education_levels.is_empty() {
        return Err(Error::InvalidGame("empty type or education set".into()));
    }
    let top = 1.0 + theta_values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut wages = Vec::new();
    let mut w = 0.0;
    while w <= top + TOL {
        wages.push(w);
        w += delta;
    }
    StageGame::from_form(
        StateSpace::uniform(theta_values.iter().map(|t| format!("{t}")).collect()),
        education_levels.iter().map(|e| vec![*e]).collect(),
        wages.iter().map(|w| format!("{w}")).collect(),
        PayoffForm::Signaling {
            thetas: theta_values.to_vec(),
            wages,
        },
    )
}

/// Canonical monopoly fixture used across the test suite.
pub fn rubinstein_r1() -> StageGame {
    make_rubinstein(1.0, 2.0, 0.5, 3.0, 1.5, 0.5, &[0.9, 1.0, 1.4, 1.9, 2.0]).unwrap()
}

/// The separating benchmark strategy for a Rubinstein-form game: price
/// v_L in the low state and v_H in the high state.
pub fn rubinstein_sigma_r(game: &StageGame) -> Result<SenderStrategy> {
    let (v_l, v_h) = match &game.form {
        Some(PayoffForm::Rubinstein { v_l, v_h, .. }) => (*v_l, *v_h),
        _ => return Err(Error::InvalidGame("not a Rubinstein-form game".into())),
    };
    let pl = game
        .point_index(&[v_l])
        .ok_or_else(|| Error::InvalidGame(format!("price {v_l} not in grid")))?;
    let ph = game
        .point_index(&[v_h])
        .ok_or_else(|| Error::InvalidGame(format!("price {v_h} not in grid")))?;
    SenderStrategy::from_support(game, &[&[(pl, 1.0)], &[(ph, 1.0)]])
}

// --- JSON interchange -------------------------------------------------

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GameDoc {
    states: Vec<String>,
    prior: Vec<f64>,
    sender_actions: Vec<Vec<f64>>,
    receiver_actions: Vec<String>,
    payoffs: PayoffDoc,
    #[serde(default)]
    receiver_type_mix: Option<Vec<TypeWeight>>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PayoffDoc {
    u: Vec<Vec<Vec<f64>>>,
    v: Vec<Vec<Vec<f64>>>,
}

fn flatten(t: &[Vec<Vec<f64>>], ns: usize, np: usize, na: usize) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(ns * np * na);
    if t.len() != ns {
        return Err(Error::InvalidGame("payoff table: wrong state count".into()));
    }
    for rows in t {
        if rows.len() != np {
            return Err(Error::InvalidGame("payoff table: wrong action count".into()));
        }
        for row in rows {
            if row.len() != na {
                return Err(Error::InvalidGame("payoff table: wrong reply count".into()));
            }
            out.extend_from_slice(row);
        }
    }
    Ok(out)
}

pub fn load_game_json(text: &str) -> Result<StageGame> {
    let doc: GameDoc = serde_json::from_str(text)?;
    let (ns, np, na) = (
        doc.states.len(),
        doc.sender_actions.len(),
        doc.receiver_actions.len(),
    );
    let u = flatten(&doc.payoffs.u, ns, np, na)?;
    let v = flatten(&doc.payoffs.v, ns, np, na)?;
    let mut game = StageGame::from_tables(
        StateSpace::new(doc.states, doc.prior)?,
        doc.sender_actions,
        doc.receiver_actions,
        u,
        v,
    )?;
    game.receiver_type_mix = doc.receiver_type_mix;
    game.validate()?;
    Ok(game)
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StrategyDoc {
    probs: Vec<Vec<f64>>,
}

pub fn load_strategy_json(text: &str, game: &StageGame) -> Result<SenderStrategy> {
    let doc: StrategyDoc = serde_json::from_str(text)?;
    SenderStrategy::new(game, doc.probs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn r1() -> StageGame {
        rubinstein_r1()
    }

    #[test]
    fn posterior_separating_is_degenerate() {
        let g = r1();
        let sr = rubinstein_sigma_r(&g).unwrap();
        let p_low = g.point_index(&[1.0]).unwrap();
        let p_high = g.point_index(&[2.0]).unwrap();
        let post = posterior(&g, &sr, p_low);
        assert!(post.on_path);
        assert_abs_diff_eq!(post.probs[0], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(post.probs[1], 0.0, epsilon = 1e-12);
        let post = posterior(&g, &sr, p_high);
        assert_abs_diff_eq!(post.probs[0], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(post.probs[1], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn posterior_pooling_keeps_prior() {
        let g = r1();
        let p = g.point_index(&[1.4]).unwrap();
        let sigma = SenderStrategy::from_support(&g, &[&[(p, 1.0)], &[(p, 1.0)]]).unwrap();
        let post = posterior(&g, &sigma, p);
        assert!(post.on_path);
        assert_abs_diff_eq!(post.probs[0], 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(post.probs[1], 0.5, epsilon = 1e-12);
    }

    #[test]
    fn posterior_off_path_is_prior() {
        let g = r1();
        let sr = rubinstein_sigma_r(&g).unwrap();
        let p = g.point_index(&[1.4]).unwrap();
        let post = posterior(&g, &sr, p);
        assert!(!post.on_path);
        assert_eq!(post.probs, g.state_space.prior);
    }

    #[test]
    fn rational_label_matches_equilibrium_reply() {
        let g = r1();
        let sr = rubinstein_sigma_r(&g).unwrap();
        let labels = rational_label(&g, &sr);
        let p_low = g.point_index(&[1.0]).unwrap();
        let p_high = g.point_index(&[2.0]).unwrap();
        let low = labels.get(p_low).unwrap();
        assert_eq!(low.action, 0, "buy at p = v_L");
        assert!(!low.strict);
        let high = labels.get(p_high).unwrap();
        assert_eq!(high.action, 1, "not-buy at p = v_H");
        assert_abs_diff_eq!(high.margin, 0.0, epsilon = 1e-12);
        assert!(!high.strict);
    }

    #[test]
    fn rational_label_signaling_grid() {
        // Two types {0,1}, wage grid {0,0.5,1}; a point whose posterior is
        // (0.3, 0.7) should draw the wage 0.5.
        let g = StageGame::from_form(
            StateSpace::uniform(vec!["0".into(), "1".into()]),
            vec![vec![0.0], vec![1.0]],
            vec!["0".into(), "0.5".into(), "1".into()],
            PayoffForm::Signaling {
                thetas: vec![0.0, 1.0],
                wages: vec![0.0, 0.5, 1.0],
            },
        )
        .unwrap();
        let sigma = SenderStrategy::new(&g, vec![vec![0.3, 0.7], vec![0.7, 0.3]]).unwrap();
        // posterior at point 0: (0.3*0.5)/(0.3*0.5+0.7*0.5) = 0.3 on theta=0.
        let post = posterior(&g, &sigma, 0);
        assert_abs_diff_eq!(post.probs[0], 0.3, epsilon = 1e-12);
        let labels = rational_label(&g, &sigma);
        assert_eq!(labels.get(0).unwrap().action, 1, "wage 0.5");
        // Brute-force oracle: the chosen wage maximizes expected v.
        let scores = posterior_scores(&g, &post, 0);
        let best = scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        assert_abs_diff_eq!(scores[1], best, epsilon = 1e-12);
    }

    #[test]
    fn sender_payoff_benchmark() {
        let g = r1();
        let sr = rubinstein_sigma_r(&g).unwrap();
        let reply = rational_label(&g, &sr).reply_map();
        let us = sender_expected_payoff(&g, &sr, &reply).unwrap();
        assert_abs_diff_eq!(us, 0.25, epsilon = 1e-12);
        let no_trade: HashMap<usize, usize> = sr.support().into_iter().map(|p| (p, 1)).collect();
        let us0 = sender_expected_payoff(&g, &sr, &no_trade).unwrap();
        assert_abs_diff_eq!(us0, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn incomplete_reply_rejected() {
        let g = r1();
        let sr = rubinstein_sigma_r(&g).unwrap();
        let reply = HashMap::new();
        assert!(matches!(
            sender_expected_payoff(&g, &sr, &reply),
            Err(Error::IncompleteReply(_))
        ));
    }

    #[test]
    fn rubinstein_preconditions() {
        assert!(make_rubinstein(1.0, 2.0, 0.5, 3.0, 1.5, 0.5, &[1.0]).is_ok());
        let e = make_rubinstein(1.0, 2.0, 0.5, 1.9, 1.5, 0.5, &[1.0]).unwrap_err();
        assert!(e.to_string().contains("c1 > vH violated"));
        let e = make_rubinstein(1.0, 2.0, 0.5, 2.2, 1.5, 0.5, &[1.0]).unwrap_err();
        assert!(e.to_string().contains("severe lemon violated"));
    }

    #[test]
    fn insurance_payoffs() {
        let g = make_insurance(UtilityFn::Sqrt, 4.0, 3.0, (0.1, 0.9), &[(3.0, 1.0)]).unwrap();
        // state 1 = high risk (theta = 0.9), action 0 = accept.
        assert_abs_diff_eq!(g.u(1, 0, 0), 3.0_f64.sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(g.u(1, 0, 1), 0.1 * 2.0 + 0.9 * 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(g.v(1, 0, 0), 1.0 - 0.9 * 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(g.v(1, 0, 1), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn insurance_domain_error() {
        let e = make_insurance(UtilityFn::Sqrt, 4.0, 3.0, (0.1, 0.9), &[(0.0, 5.0)]).unwrap_err();
        assert!(matches!(e, Error::UtilityDomain(_)));
    }

    #[test]
    fn signaling_wage_grid() {
        let g = make_signaling(&[0.0, 1.0], &[0.0, 1.0, 2.0], 0.5).unwrap();
        assert_eq!(g.n_actions(), 5);
        assert_eq!(
            g.receiver_actions,
            vec!["0", "0.5", "1", "1.5", "2"]
        );
        // v(theta=1, p, a=0.5) = -(1-0.5)^2
        assert_abs_diff_eq!(g.v(1, 0, 1), -0.25, epsilon = 1e-12);
        // u(theta=1, p=2, a=1) = 1 - 2/2 = 0
        let p2 = g.point_index(&[2.0]).unwrap();
        let a1 = 2; // wage 1
        assert_abs_diff_eq!(g.u(1, p2, a1), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn json_round_trip() {
        let text = r#"{
            "states": ["L", "H"],
            "prior": [0.5, 0.5],
            "sender_actions": [[1.0], [2.0]],
            "receiver_actions": ["buy", "not-buy"],
            "payoffs": {
                "u": [[[0.5, 0.0], [1.5, 0.0]], [[-1.25, 0.0], [-0.25, 0.0]]],
                "v": [[[0.0, 0.0], [-1.0, 0.0]], [[1.0, 0.0], [0.0, 0.0]]]
            }
        }"#;
        let g = load_game_json(text).unwrap();
        assert_eq!(g.n_points(), 2);
        assert_abs_diff_eq!(g.u(0, 1, 0), 1.5, epsilon = 1e-12);
        let bad = text.replace("\"states\"", "\"statez\"");
        assert!(load_game_json(&bad).is_err());
    }

    #[test]
    fn extend_actions_preserves_existing() {
        let g = r1();
        let g2 = g.with_extra_actions(&[vec![0.95], vec![1.5], vec![1.99]]).unwrap();
        assert_eq!(g2.n_points(), 8);
        for (i, p) in g.sender_actions.iter().enumerate() {
            assert_eq!(g2.point_index(p), Some(i));
        }
        let pn = g2.point_index(&[1.5]).unwrap();
        assert_abs_diff_eq!(g2.v(0, pn, 0), 1.0 - 1.5, epsilon = 1e-12);
    }
}
