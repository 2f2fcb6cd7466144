//! Error taxonomy for invalid inputs and unattainable computations.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("probability {0} outside [0, 1]")]
    ProbabilityRange(f64),
    #[error("fraction {0} outside [0, 1]")]
    FractionRange(f64),
    #[error("staking {f} per game across {m} games reaches the ruin bound 1/{m}")]
    CertainRuin { f: f64, m: u32 },
    #[error("closed form implemented for M in {{1, 2}} only, got M = {0}")]
    NoClosedForm(u32),
    #[error("saturated approximation is singular at p = 1/2")]
    SaturatedAtFairGame,
    #[error("unsaturated and saturated stakes do not intersect for M = {0}")]
    NoCrossover(u32),
    #[error("{quantity} requires p > 1/2, got p = {p}")]
    NeedsFavourableGame { quantity: &'static str, p: f64 },
    #[error("no memory length up to {cap} is profitable at p = {p}")]
    MemoryCapExceeded { p: f64, cap: usize },
    #[error("alternation amplitude {delta} outside [0, 1 - p] for p = {p}")]
    DeltaRange { p: f64, delta: f64 },
    #[error("strategy entry f({w}) = {value} outside the open interval (-1, 1)")]
    TableEntryRange { w: usize, value: f64 },
    #[error("prior density must be nonnegative with positive total mass")]
    InvalidPrior,
    #[error("invalid {name}: {reason}")]
    InvalidConfig { name: &'static str, reason: String },
}
