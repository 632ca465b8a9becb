//! Position evaluation and score conversions.

mod classical;
mod nnue;
mod score;

pub use classical::{
    evaluate_classical, evaluate_white, game_phase, parse_pst, piece_square_tables, static_eval,
    PieceSquareTables, PIECE_VALUES,
};
pub use nnue::{
    active_features, feature_index, fnv1a64, load_nnue, nnue_apply, nnue_apply_counted,
    nnue_apply_in_place, nnue_evaluate, nnue_refresh, NnueAccumulator, NnueDims, NnueError,
    NnueNetwork, NnueUpdate, HALFKP_FEATURES, NNUE_MAGIC, NNUE_VERSION,
};
pub use score::{
    cp_to_winprob, lc0_cp_to_q, lc0_q_to_cp, winprob_to_cp, Score, WinProbModel, LC0_TAN_SCALE,
    MAX_CENTIPAWNS,
};

use crate::board::GameResult;

#[derive(Debug, thiserror::Error)]
pub enum EvalError {
    #[error("position is terminal ({0:?}); use the game result instead")]
    Terminal(GameResult),
}
