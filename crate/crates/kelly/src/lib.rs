//! Growth-optimal betting for repeated binary games.
//!
//! A bettor stakes a fraction of wealth on each turn of an even-money
//! game won with probability p. Staking the Kelly fraction 2p - 1
//! maximizes the long-run exponential growth rate of wealth; everything
//! here is a variation on that theme:
//!
//! - [`single_game`]: the basic fraction, growth rate, and compounded
//!   return for one game.
//! - [`multi_game`]: splitting wealth across M simultaneous independent
//!   copies, exact and approximate stakes, and the saturation crossover.
//! - [`insider_outsider`]: a bettor with extra per-turn information
//!   against one diversifying across many games.
//! - [`bayes_memory`]: betting from a finite memory of L past outcomes,
//!   posterior inference over p, and how much growth survives.
//! - [`simulator`]: Monte Carlo play of memory strategies on schedules of
//!   changing probabilities, and a simulated-annealing fitter that
//!   recovers betting tables from realized runs.
//!
//! Growth rates are natural logs per turn. All functions are pure and
//! deterministic; the simulator takes explicit seeds.

pub mod bayes_memory;
pub mod error;
pub mod insider_outsider;
pub mod multi_game;
mod numerics;
pub mod simulator;
pub mod single_game;
pub mod types;

pub use error::{Error, Result};
pub use types::{Fraction, Probability};
