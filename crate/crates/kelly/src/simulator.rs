//! Monte Carlo play of memory strategies against a schedule of win
//! probabilities, plus a simulated-annealing fitter that recovers betting
//! tables from a single realized outcome stream.

use crate::bayes_memory::MemoryStrategy;
use crate::error::{Error, Result};
use crate::types::Probability;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, Normal};

/// Win probability as a function of the turn index.
#[derive(Clone, Debug)]
pub struct GameSchedule {
    kind: ScheduleKind,
}

#[derive(Clone, Debug)]
enum ScheduleKind {
    Constant(f64),
    Cyclic { waypoints: Vec<f64> },
    Custom { p_values: Vec<f64> },
}

impl GameSchedule {
    pub fn constant(p: Probability) -> Self {
        GameSchedule {
            kind: ScheduleKind::Constant(p.get()),
        }
    }

    /// Piecewise-linear ramps through the waypoints, the whole pattern
    /// stretched over the run: K waypoints make K - 1 equal-length legs.
    pub fn cyclic(waypoints: Vec<f64>) -> Result<Self> {
        if waypoints.len() < 2 {
            return Err(Error::InvalidConfig {
                name: "schedule",
                reason: "a cyclic schedule needs at least two waypoints".into(),
            });
        }
        for &p in &waypoints {
            if !(p.is_finite() && (0.0..=1.0).contains(&p)) {
                return Err(Error::InvalidConfig {
                    name: "schedule",
                    reason: format!("waypoint {p} is not a probability"),
                });
            }
        }
        Ok(GameSchedule {
            kind: ScheduleKind::Cyclic { waypoints },
        })
    }

    /// Explicit per-turn probabilities, repeated cyclically when the run
    /// is longer than the list.
    pub fn custom(p_values: Vec<f64>) -> Result<Self> {
        if p_values.is_empty() {
            return Err(Error::InvalidConfig {
                name: "schedule",
                reason: "a custom schedule needs at least one probability".into(),
            });
        }
        for &p in &p_values {
            if !(p.is_finite() && (0.0..=1.0).contains(&p)) {
                return Err(Error::InvalidConfig {
                    name: "schedule",
                    reason: format!("value {p} is not a probability"),
                });
            }
        }
        Ok(GameSchedule {
            kind: ScheduleKind::Custom { p_values },
        })
    }

    pub fn p_at(&self, turn: usize, n_turns: usize) -> f64 {
        match &self.kind {
            ScheduleKind::Constant(p) => *p,
            ScheduleKind::Cyclic { waypoints } => {
                let legs = waypoints.len() - 1;
                let i = (turn * legs / n_turns.max(1)).min(legs - 1);
                let start = i * n_turns / legs;
                let end = (i + 1) * n_turns / legs;
                if end <= start {
                    return waypoints[i];
                }
                let tau = ((turn - start) as f64 / (end - start) as f64).clamp(0.0, 1.0);
                waypoints[i] + tau * (waypoints[i + 1] - waypoints[i])
            }
            ScheduleKind::Custom { p_values } => p_values[turn % p_values.len()],
        }
    }

    /// Diagnostics for configurations that run but mean little, e.g. a
    /// memory window spanning probability ramps much faster than itself.
    pub fn warnings(&self, n_turns: usize, memory_len: usize) -> Vec<String> {
        let mut out = Vec::new();
        if let ScheduleKind::Cyclic { waypoints } = &self.kind {
            let legs = waypoints.len() - 1;
            if n_turns < legs {
                out.push(format!(
                    "cyclic schedule has {legs} legs but only {n_turns} turns"
                ));
            } else if memory_len > 0 && n_turns / legs < 10 * memory_len {
                out.push(format!(
                    "cyclic leg of {} turns is short next to memory {}; windows straddle fast probability changes",
                    n_turns / legs,
                    memory_len
                ));
            }
        }
        out
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SimulationConfig {
    pub n_turns: usize,
    pub memory_len: usize,
    pub seed: u64,
    pub initial_wealth: f64,
}

impl SimulationConfig {
    pub fn new(n_turns: usize, memory_len: usize, seed: u64) -> Result<Self> {
        let config = SimulationConfig {
            n_turns,
            memory_len,
            seed,
            initial_wealth: 1.0,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn with_initial_wealth(mut self, wealth: f64) -> Result<Self> {
        self.initial_wealth = wealth;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_turns <= self.memory_len {
            return Err(Error::InvalidConfig {
                name: "n_turns",
                reason: format!("need more turns than the memory length {}", self.memory_len),
            });
        }
        if !(self.initial_wealth.is_finite() && self.initial_wealth > 0.0) {
            return Err(Error::InvalidConfig {
                name: "initial_wealth",
                reason: "must be positive and finite".into(),
            });
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug)]
pub struct AnnealingConfig {
    pub initial_temperature: f64,
    pub cooling_factor: f64,
    pub steps_per_temperature: usize,
    /// Proposal standard deviation is this scale times sqrt(temperature),
    /// matching how the width of the Gibbs distribution shrinks, so the
    /// walk stays equilibrated all the way down.
    pub proposal_scale: f64,
    pub min_temperature: f64,
    pub seed: u64,
}

impl Default for AnnealingConfig {
    fn default() -> Self {
        AnnealingConfig {
            initial_temperature: 0.1,
            cooling_factor: 0.95,
            steps_per_temperature: 200,
            proposal_scale: 0.5,
            min_temperature: 1e-6,
            seed: 0,
        }
    }
}

impl AnnealingConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |reason: String| Error::InvalidConfig {
            name: "annealing",
            reason,
        };
        if !(self.initial_temperature.is_finite() && self.initial_temperature > 0.0) {
            return Err(bad("initial temperature must be positive".into()));
        }
        if !(self.cooling_factor > 0.0 && self.cooling_factor < 1.0) {
            return Err(bad(format!(
                "cooling factor must lie in (0, 1), got {}",
                self.cooling_factor
            )));
        }
        if self.steps_per_temperature == 0 {
            return Err(bad("need at least one step per temperature".into()));
        }
        if !(self.proposal_scale.is_finite() && self.proposal_scale > 0.0) {
            return Err(bad("proposal scale must be positive".into()));
        }
        if !(self.min_temperature > 0.0 && self.min_temperature <= self.initial_temperature) {
            return Err(bad(
                "min temperature must be positive and at most the initial".into(),
            ));
        }
        Ok(())
    }
}

/// Wealth path kept in log space: raw wealth overflows f64 within a few
/// thousand favourable turns, the log never does.
#[derive(Clone, Debug)]
pub struct Trajectory {
    log_wealth: Vec<f64>,
    realized_growth: f64,
}

impl Trajectory {
    /// ln W after each turn; entry 0 is the starting wealth.
    pub fn log_wealth(&self) -> &[f64] {
        &self.log_wealth
    }

    pub fn log_wealth_final(&self) -> f64 {
        *self.log_wealth.last().unwrap()
    }

    /// Mean log growth per betting turn; warm-up turns filling the memory
    /// window are excluded.
    pub fn realized_growth(&self) -> f64 {
        self.realized_growth
    }

    /// Raw wealth per turn. Overflows to infinity on long favourable
    /// runs; the log path is the authoritative record.
    pub fn wealth(&self) -> impl Iterator<Item = f64> + '_ {
        self.log_wealth.iter().map(|lw| lw.exp())
    }
}

// One uniform draw per turn decides the outcome. The stream depends only
// on (schedule, n_turns, seed), never on the strategy, so alternative
// tables are scored on common random numbers.
fn draw_outcomes(schedule: &GameSchedule, n_turns: usize, seed: u64) -> Vec<bool> {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    (0..n_turns)
        .map(|t| rng.random::<f64>() < schedule.p_at(t, n_turns))
        .collect()
}

/// Play the strategy through the schedule. The first L turns only fill
/// the memory window; betting starts once it is full.
pub fn simulate(
    schedule: &GameSchedule,
    strategy: &MemoryStrategy,
    config: &SimulationConfig,
) -> Result<Trajectory> {
    config.validate()?;
    let l = config.memory_len;
    if strategy.memory_len() != l {
        return Err(Error::InvalidConfig {
            name: "strategy",
            reason: format!(
                "table is for memory {}, config says {}",
                strategy.memory_len(),
                l
            ),
        });
    }
    let n = config.n_turns;
    let outcomes = draw_outcomes(schedule, n, config.seed);
    let mut log_wealth = Vec::with_capacity(n + 1);
    let mut lw = config.initial_wealth.ln();
    log_wealth.push(lw);
    let mut wins = 0usize;
    for (t, &won) in outcomes.iter().enumerate() {
        if t >= l {
            let f = strategy.fraction(wins);
            if f != 0.0 {
                lw += if won { f.ln_1p() } else { (-f).ln_1p() };
            }
        }
        log_wealth.push(lw);
        if won {
            wins += 1;
        }
        if t >= l && outcomes[t - l] {
            wins -= 1;
        }
    }
    let realized_growth = (lw - log_wealth[0]) / (n - l) as f64;
    Ok(Trajectory {
        log_wealth,
        realized_growth,
    })
}

/// Score an arbitrary table on exactly the outcomes simulate would see.
pub fn empirical_growth_of_table(
    schedule: &GameSchedule,
    table: &[f64],
    config: &SimulationConfig,
) -> Result<f64> {
    let strategy = MemoryStrategy::from_table(table.to_vec(), true)?;
    Ok(simulate(schedule, &strategy, config)?.realized_growth())
}

#[derive(Clone, Debug)]
pub struct AnnealResult {
    pub strategy: MemoryStrategy,
    /// Realized growth of the fitted table on the simulated run.
    pub objective: f64,
    /// Realized growth of the random table the search started from.
    pub initial_objective: f64,
}

/// Fit a betting table to one simulated realization by simulated
/// annealing. Outcomes are drawn once; the realized growth then splits
/// into per-window-state win/loss counts, so each proposal is scored in
/// O(1) instead of replaying the run.
pub fn anneal(
    schedule: &GameSchedule,
    config: &SimulationConfig,
    annealing: &AnnealingConfig,
    allow_negative: bool,
) -> Result<AnnealResult> {
    config.validate()?;
    annealing.validate()?;
    let l = config.memory_len;
    let n = config.n_turns;
    let outcomes = draw_outcomes(schedule, n, config.seed);
    let mut n_win = vec![0u64; l + 1];
    let mut n_loss = vec![0u64; l + 1];
    let mut wins = 0usize;
    for (t, &won) in outcomes.iter().enumerate() {
        if t >= l {
            if won {
                n_win[wins] += 1;
            } else {
                n_loss[wins] += 1;
            }
        }
        if won {
            wins += 1;
        }
        if t >= l && outcomes[t - l] {
            wins -= 1;
        }
    }
    let bets = (n - l) as f64;
    let objective = |table: &[f64]| -> f64 {
        table
            .iter()
            .enumerate()
            .map(|(w, &f)| n_win[w] as f64 * f.ln_1p() + n_loss[w] as f64 * (-f).ln_1p())
            .sum::<f64>()
            / bets
    };

    let (lo, hi) = if allow_negative {
        (-1.0 + 1e-6, 1.0 - 1e-6)
    } else {
        (0.0, 1.0 - 1e-6)
    };
    // The outcome stream uses the default stream of its own generator;
    // moving the proposal noise to a separate stream keeps the two
    // decoupled even when the seeds coincide.
    let mut rng = ChaCha12Rng::seed_from_u64(annealing.seed);
    rng.set_stream(1);
    let start_lo = if allow_negative { -0.5 } else { 0.0 };
    let mut table: Vec<f64> = (0..=l).map(|_| rng.random_range(start_lo..0.5)).collect();
    let initial_objective = objective(&table);
    let mut current = initial_objective;
    let mut best = table.clone();
    let mut best_objective = current;

    let mut temperature = annealing.initial_temperature;
    while temperature >= annealing.min_temperature {
        let proposal = Normal::new(0.0, annealing.proposal_scale * temperature.sqrt())
            .expect("validated proposal scale");
        for _ in 0..annealing.steps_per_temperature {
            let w = rng.random_range(0..=l);
            let old = table[w];
            let new = (old + proposal.sample(&mut rng)).clamp(lo, hi);
            let delta = (n_win[w] as f64 * (new.ln_1p() - old.ln_1p())
                + n_loss[w] as f64 * ((-new).ln_1p() - (-old).ln_1p()))
                / bets;
            if delta >= 0.0 || rng.random::<f64>() < (delta / temperature).exp() {
                table[w] = new;
                current += delta;
                if current > best_objective {
                    best_objective = current;
                    best = table.clone();
                }
            }
        }
        temperature *= annealing.cooling_factor;
    }

    let objective = objective(&best);
    Ok(AnnealResult {
        strategy: MemoryStrategy::from_table(best, allow_negative)
            .expect("proposals stay inside the open unit interval"),
        objective,
        initial_objective,
    })
}

/// Chance that staking everything every turn is ruined within n turns:
/// any single loss wipes the bettor out, so this is 1 - p^n.
pub fn ruin_probability_naive(p: Probability, n_turns: u64) -> f64 {
    1.0 - p.get().powf(n_turns as f64)
}

/// Monte Carlo companion to ruin_probability_naive.
pub fn ruin_probability_mc(p: Probability, n_turns: u64, trials: u64, seed: u64) -> f64 {
    let pv = p.get();
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut ruined = 0u64;
    'trial: for _ in 0..trials {
        for _ in 0..n_turns {
            if rng.random::<f64>() >= pv {
                ruined += 1;
                continue 'trial;
            }
        }
    }
    ruined as f64 / trials as f64
}
