use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid game: {0}")]
    InvalidGame(String),
    #[error("invalid strategy: {0}")]
    InvalidStrategy(String),
    #[error("incomplete reply: no action for support point {0}")]
    IncompleteReply(usize),
    #[error("utility domain: wealth {0} is negative")]
    UtilityDomain(f64),
    #[error("no data for point {0}")]
    NoData(String),
    #[error("weak learnability violated: epsilon = {0}")]
    WeakLearnViolated(f64),
    #[error("edge assumption violated; lower gamma (round {round}: cost {cost} > baseline {baseline})")]
    EdgeViolated { round: usize, cost: f64, baseline: f64 },
    #[error("infeasible exploit parameters: {0}")]
    InfeasibleExploit(String),
    #[error("empty candidate set")]
    EmptyCandidates,
    #[error("empty ensemble")]
    EmptyEnsemble,
    #[error("bad partition: {0}")]
    BadPartition(String),
    #[error("point outside partition bounds: {0}")]
    OutOfBounds(String),
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
