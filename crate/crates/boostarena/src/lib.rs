pub mod error;
pub mod stage_game;
pub mod weak_learn;
pub mod boosting;
pub mod label_infer;
pub mod action_space;
pub mod arena;

pub use error::{Error, Result};
pub use stage_game::{SenderStrategy, StageGame, StateSpace};
