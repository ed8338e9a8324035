//! Evaluation pipelines, baseline caching, leaderboards and robustness grids.

pub mod cache;
pub mod pipeline;
pub mod rank;
pub mod robustness;

pub use cache::{ArmFamily, BaselineCache, CacheKey, CACHE_DIR_ENV};
pub use pipeline::{
    ars_accuracies, artifact_fingerprint, eval_ars, eval_lrs, lrs_accuracies, self_comparison,
    ARSReport, ArmResult, EvalPlan, Evaluator, LRSReport, SelfComparison, LR_SEARCH_SEED,
};
pub use rank::{rank_methods, LeaderboardEntry, RankKey, RankedEntry};
pub use robustness::{RobustnessCell, RobustnessGrid};
