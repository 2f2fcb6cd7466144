//! CSV-emitting front end for the kelly library. Every subcommand prints
//! one table: `#` metadata lines, a header, then rows. Exit codes: 0 on
//! success, 2 for bad flags or values, 1 for an internal numeric failure.

mod output;

use clap::{Parser, Subcommand, ValueEnum};
use kelly::bayes_memory::{
    growth_given_p, growth_signed_exact, growth_signed_series, memory_strategy,
    min_profitable_memory, xi_ratio,
};
use kelly::insider_outsider::{break_even_delta_analytic, break_even_delta_numeric};
use kelly::multi_game::{
    approx_saturated, approx_unsaturated, piecewise_approx, solve_exact, MultiGameSpec,
    PortfolioSolution,
};
use kelly::simulator::{anneal, simulate, AnnealingConfig, GameSchedule, SimulationConfig};
use kelly::single_game::{entropy, kelly_compounded_return, kelly_fraction, kelly_growth};
use kelly::{Error, Probability};
use output::{Cell, Table};
use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

#[derive(Parser)]
#[command(
    name = "kelly",
    version,
    about = "Growth-optimal betting: stakes, growth rates, and simulations as CSV"
)]
struct Cli {
    /// Write the CSV here instead of standard output.
    #[arg(long, global = true, value_name = "PATH")]
    output: Option<PathBuf>,

    /// Omit the timestamp metadata line so reruns are byte-identical.
    #[arg(long, global = true)]
    no_timestamp: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Kelly stake, growth rate, compounded return, and entropy for one game.
    Single {
        /// Win probability of the game.
        #[arg(long)]
        p: f64,
    },
    /// Per-game stake across M simultaneous independent games, swept over p.
    Multi {
        /// Number of simultaneous games.
        #[arg(long)]
        m: u32,
        /// Evaluate a single probability instead of a sweep.
        #[arg(long, conflicts_with_all = ["p_min", "p_max"])]
        p: Option<f64>,
        /// Sweep start (inclusive).
        #[arg(long, default_value_t = 0.5)]
        p_min: f64,
        /// Sweep end (inclusive).
        #[arg(long, default_value_t = 1.0)]
        p_max: f64,
        /// Number of sweep points, endpoints included.
        #[arg(long, default_value_t = 101)]
        steps: usize,
        /// How to compute the stake; the exact solution is always emitted
        /// alongside for comparison.
        #[arg(long, value_enum, default_value_t = MethodArg::Exact)]
        method: MethodArg,
    },
    /// Break-even inside information against a diversified outsider.
    Duel {
        /// Outsider's game counts, comma separated; each must be at least 2.
        #[arg(long, value_delimiter = ',', required = true)]
        m: Vec<u32>,
        /// Sweep start (inclusive).
        #[arg(long, default_value_t = 0.505)]
        p_min: f64,
        /// Sweep end (inclusive).
        #[arg(long, default_value_t = 0.99)]
        p_max: f64,
        /// Number of sweep points, endpoints included.
        #[arg(long, default_value_t = 100)]
        steps: usize,
    },
    /// Growth of the finite-memory bettor as a function of memory length.
    Memory {
        /// Win probabilities, comma separated; each must lie in (0.5, 1).
        #[arg(long, value_delimiter = ',', required = true)]
        p: Vec<f64>,
        /// Smallest memory length (at least 1).
        #[arg(long = "L-min", default_value_t = 1, value_name = "L")]
        l_min: usize,
        /// Largest memory length.
        #[arg(long = "L-max", value_name = "L")]
        l_max: usize,
    },
    /// Play the uniform-prior memory table through a schedule of games.
    Simulate {
        /// Constant win probability (shorthand for --schedule constant:P).
        #[arg(long, conflicts_with = "schedule")]
        p: Option<f64>,
        /// constant:P, cyclic:P1,P2,..., or custom:P1,P2,...
        #[arg(long)]
        schedule: Option<String>,
        /// Memory length.
        #[arg(long = "L")]
        l: usize,
        /// Number of turns; must exceed the memory length.
        #[arg(long)]
        turns: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1.0)]
        initial_wealth: f64,
        /// Allow negative stakes (short positions) in the table.
        #[arg(long)]
        signed: bool,
        /// Emit every Nth turn (default: about 1000 rows).
        #[arg(long, value_name = "N")]
        downsample: Option<usize>,
    },
    /// Fit a betting table to one simulated run by simulated annealing.
    Anneal {
        /// Constant win probability (shorthand for --schedule constant:P).
        #[arg(long, conflicts_with = "schedule")]
        p: Option<f64>,
        /// constant:P, cyclic:P1,P2,..., or custom:P1,P2,...
        #[arg(long)]
        schedule: Option<String>,
        /// Memory length.
        #[arg(long = "L")]
        l: usize,
        /// Number of turns; must exceed the memory length.
        #[arg(long)]
        turns: usize,
        /// Number of independent realizations to fit.
        #[arg(long, default_value_t = 1)]
        seeds: u64,
        /// Base seed; realization i uses seed + i.
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Allow negative stakes (short positions) in the table.
        #[arg(long)]
        signed: bool,
        #[arg(long, default_value_t = 0.1)]
        initial_temp: f64,
        #[arg(long, default_value_t = 0.95)]
        cooling: f64,
        #[arg(long, default_value_t = 200)]
        steps_per_temp: usize,
        #[arg(long, default_value_t = 1e-6)]
        min_temp: f64,
        #[arg(long, default_value_t = 0.5)]
        proposal_scale: f64,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Exact,
    Unsaturated,
    Saturated,
    Piecewise,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Internal(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Internal(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "{msg}"),
            CliError::Internal(msg) => write!(f, "internal numeric failure: {msg}"),
        }
    }
}

fn usage(flag: &str, detail: impl fmt::Display) -> CliError {
    CliError::Usage(format!("{flag}: {detail}"))
}

fn internal(err: Error) -> CliError {
    CliError::Internal(err.to_string())
}

fn probability(flag: &str, value: f64) -> Result<Probability, CliError> {
    Probability::new(value).map_err(|e| usage(flag, e))
}

/// Evenly spaced inclusive grid; the last point is exactly `max`.
fn linspace(min: f64, max: f64, steps: usize) -> Result<Vec<f64>, CliError> {
    if !(min.is_finite() && max.is_finite() && min <= max) {
        return Err(usage("--p-min/--p-max", "need p-min <= p-max, both finite"));
    }
    match steps {
        0 => Err(usage("--steps", "must be at least 1")),
        1 => {
            if min == max {
                Ok(vec![min])
            } else {
                Err(usage(
                    "--steps",
                    "a single step needs --p-min equal to --p-max",
                ))
            }
        }
        _ => Ok((0..steps)
            .map(|i| {
                if i == steps - 1 {
                    max
                } else {
                    min + (max - min) * i as f64 / (steps - 1) as f64
                }
            })
            .collect()),
    }
}

fn parse_schedule(text: &str) -> Result<GameSchedule, CliError> {
    let (kind, rest) = match text.split_once(':') {
        Some(pair) => pair,
        None => ("constant", text),
    };
    let values: Result<Vec<f64>, _> = rest.split(',').map(str::parse::<f64>).collect();
    let values = values.map_err(|_| usage("--schedule", format!("cannot parse '{text}'")))?;
    match kind {
        "constant" => {
            if values.len() != 1 {
                return Err(usage(
                    "--schedule",
                    "constant takes exactly one probability",
                ));
            }
            Ok(GameSchedule::constant(
                Probability::new(values[0]).map_err(|e| usage("--schedule", e))?,
            ))
        }
        "cyclic" => GameSchedule::cyclic(values).map_err(|e| usage("--schedule", e)),
        "custom" => GameSchedule::custom(values).map_err(|e| usage("--schedule", e)),
        other => Err(usage(
            "--schedule",
            format!("unknown kind '{other}' (expected constant, cyclic, or custom)"),
        )),
    }
}

fn schedule_from_flags(p: Option<f64>, schedule: Option<&str>) -> Result<GameSchedule, CliError> {
    match (p, schedule) {
        (Some(v), None) => Ok(GameSchedule::constant(probability("--p", v)?)),
        (None, Some(text)) => parse_schedule(text),
        _ => Err(CliError::Usage(
            "give exactly one of --p or --schedule".into(),
        )),
    }
}

/// The invoked command line with argv[0] normalized, echoed as metadata.
fn command_echo() -> String {
    let mut parts = vec!["kelly".to_string()];
    parts.extend(std::env::args().skip(1));
    parts.join(" ")
}

fn base_table(header: Vec<&'static str>) -> Table {
    let mut table = Table::new(header);
    table.meta("command", command_echo());
    table.meta("version", env!("CARGO_PKG_VERSION"));
    table
}

fn emit(cli: &Cli, table: Table) -> Result<(), CliError> {
    let timestamp = if cli.no_timestamp {
        None
    } else {
        Some(
            SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
        )
    };
    let text = table.render(timestamp);
    match &cli.output {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| usage("--output", format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cmd_single(p: f64) -> Result<Table, CliError> {
    let p = probability("--p", p)?;
    let mut table = base_table(vec!["f_kelly", "growth", "compounded_return", "entropy"]);
    table.row(vec![
        Cell::Float(kelly_fraction(p).get()),
        Cell::Float(kelly_growth(p)),
        Cell::Float(kelly_compounded_return(p)),
        Cell::Float(entropy(p)),
    ]);
    Ok(table)
}

fn cmd_multi(
    m: u32,
    p: Option<f64>,
    p_min: f64,
    p_max: f64,
    steps: usize,
    method: MethodArg,
) -> Result<Table, CliError> {
    let ps = match p {
        Some(v) => vec![v],
        None => linspace(p_min, p_max, steps)?,
    };
    let mut table = base_table(vec![
        "p",
        "f_star",
        "total_invested",
        "reserve",
        "growth",
        "f_exact",
    ]);
    table.meta("m", m);
    for &pv in &ps {
        let prob = probability("--p", pv)?;
        let spec = MultiGameSpec::new(prob, m).map_err(|e| usage("--m", e))?;
        let exact = solve_exact(&spec);
        let solution: PortfolioSolution = match method {
            MethodArg::Exact => exact,
            MethodArg::Unsaturated => approx_unsaturated(&spec),
            MethodArg::Piecewise => piecewise_approx(&spec).map_err(internal)?,
            MethodArg::Saturated => match approx_saturated(&spec) {
                Ok(solution) => solution,
                Err(e) => {
                    table.comment(format!("skipped p={pv:.16e}: {e}"));
                    continue;
                }
            },
        };
        if !solution.growth.is_finite() {
            table.comment(format!(
                "skipped p={pv:.16e}: stake {:.16e} breaches the ruin bound 1/{m}",
                solution.f_star.get()
            ));
            continue;
        }
        table.row(vec![
            Cell::Float(pv),
            Cell::Float(solution.f_star.get()),
            Cell::Float(solution.total_invested),
            Cell::Float(1.0 - solution.total_invested),
            Cell::Float(solution.growth),
            Cell::Float(exact.f_star.get()),
        ]);
    }
    Ok(table)
}

fn cmd_duel(ms: &[u32], p_min: f64, p_max: f64, steps: usize) -> Result<Table, CliError> {
    for &m in ms {
        if m < 2 {
            return Err(usage(
                "--m",
                format!("the outsider needs at least 2 games, got {m}"),
            ));
        }
    }
    let ps = linspace(p_min, p_max, steps)?;
    let mut table = base_table(vec![
        "p",
        "m",
        "crossing",
        "delta_numeric",
        "delta_analytic",
    ]);
    for &m in ms {
        for &pv in &ps {
            probability("--p-min/--p-max", pv)?;
            if pv <= 0.5 || pv >= 1.0 {
                table.comment(format!(
                    "skipped p={pv:.16e}, M={m}: break-even defined only for 0.5 < p < 1"
                ));
                continue;
            }
            let prob = probability("--p-min/--p-max", pv)?;
            let numeric = break_even_delta_numeric(prob, m).map_err(internal)?;
            let analytic = break_even_delta_analytic(prob, m).map_err(internal)?;
            table.row(vec![
                Cell::Float(pv),
                Cell::Int(m as i64),
                Cell::Int(numeric.is_some() as i64),
                Cell::Float(numeric.unwrap_or(-1.0)),
                Cell::Float(analytic.unwrap_or(-1.0)),
            ]);
        }
    }
    Ok(table)
}

fn cmd_memory(ps: &[f64], l_min: usize, l_max: usize) -> Result<Table, CliError> {
    if l_min < 1 {
        return Err(usage("--L-min", "memory must be at least 1"));
    }
    if l_min > l_max {
        return Err(usage("--L-min/--L-max", "need L-min <= L-max"));
    }
    for &pv in ps {
        if !(pv > 0.5 && pv < 1.0) {
            return Err(usage(
                "--p",
                format!("memory growth is studied for 0.5 < p < 1, got {pv}"),
            ));
        }
    }
    let mut table = base_table(vec![
        "p",
        "L",
        "xi",
        "d_exact",
        "d_approx",
        "G_signed_exact",
        "G_signed_series3",
    ]);
    for &pv in ps {
        let prob = probability("--p", pv)?;
        match min_profitable_memory(prob) {
            Ok(l) => table.meta(format!("min_profitable_L[p={pv}]"), l),
            Err(Error::MemoryCapExceeded { cap, .. }) => {
                table.meta(format!("min_profitable_L[p={pv}]"), format!("> {cap}"))
            }
            Err(e) => return Err(internal(e)),
        }
        let g_kelly = kelly_growth(prob);
        for l in l_min..=l_max {
            let clamped = memory_strategy(l, false);
            let d_exact = g_kelly - growth_given_p(prob, &clamped);
            table.row(vec![
                Cell::Float(pv),
                Cell::Int(l as i64),
                Cell::Float(xi_ratio(prob, l).map_err(internal)?),
                Cell::Float(d_exact),
                Cell::Float(0.5 / l as f64),
                Cell::Float(growth_signed_exact(prob, l)),
                Cell::Float(growth_signed_series(prob, l, 3).map_err(internal)?),
            ]);
        }
    }
    Ok(table)
}

#[allow(clippy::too_many_arguments)]
fn cmd_simulate(
    p: Option<f64>,
    schedule: Option<&str>,
    l: usize,
    turns: usize,
    seed: u64,
    initial_wealth: f64,
    signed: bool,
    downsample: Option<usize>,
) -> Result<Table, CliError> {
    let schedule = schedule_from_flags(p, schedule)?;
    let config = SimulationConfig::new(turns, l, seed)
        .and_then(|c| c.with_initial_wealth(initial_wealth))
        .map_err(|e| usage("--turns/--L/--initial-wealth", e))?;
    let stride = match downsample {
        Some(0) => return Err(usage("--downsample", "must be at least 1")),
        Some(n) => n,
        None => (turns / 1000).max(1),
    };
    let strategy = memory_strategy(l, signed);
    let trajectory = simulate(&schedule, &strategy, &config).map_err(internal)?;

    let mut table = base_table(vec!["turn", "log_wealth"]);
    table.meta("seed", seed);
    for warning in schedule.warnings(turns, l) {
        table.meta("warning", warning);
    }
    table.meta(
        "realized_growth",
        format!("{:.16e}", trajectory.realized_growth()),
    );
    if let Some(prob) = p {
        let analytic = growth_given_p(probability("--p", prob)?, &strategy);
        table.meta("analytic_growth", format!("{analytic:.16e}"));
    }
    let log_wealth = trajectory.log_wealth();
    for (turn, lw) in log_wealth.iter().enumerate().step_by(stride) {
        table.row(vec![Cell::Int(turn as i64), Cell::Float(*lw)]);
    }
    if (log_wealth.len() - 1) % stride != 0 {
        table.row(vec![
            Cell::Int((log_wealth.len() - 1) as i64),
            Cell::Float(trajectory.log_wealth_final()),
        ]);
    }
    Ok(table)
}

#[allow(clippy::too_many_arguments)]
fn cmd_anneal(
    p: Option<f64>,
    schedule: Option<&str>,
    l: usize,
    turns: usize,
    seeds: u64,
    base_seed: u64,
    signed: bool,
    annealing: AnnealingConfig,
) -> Result<Table, CliError> {
    if seeds == 0 {
        return Err(usage("--seeds", "need at least one realization"));
    }
    let schedule = schedule_from_flags(p, schedule)?;
    annealing.validate().map_err(|e| {
        usage(
            "--initial-temp/--cooling/--steps-per-temp/--min-temp/--proposal-scale",
            e,
        )
    })?;
    let analytic = memory_strategy(l, signed);

    let mut table = base_table(vec!["seed", "w", "f_annealed", "f_analytic"]);
    table.meta("seed", base_seed);
    table.meta("seeds", seeds);
    for warning in schedule.warnings(turns, l) {
        table.meta("warning", warning);
    }
    for i in 0..seeds {
        let seed = base_seed.wrapping_add(i);
        let config = SimulationConfig::new(turns, l, seed).map_err(|e| usage("--turns/--L", e))?;
        let run = AnnealingConfig { seed, ..annealing };
        let result = anneal(&schedule, &config, &run, signed).map_err(internal)?;
        table.meta(
            format!("objective[seed={seed}]"),
            format!(
                "{:.16e} (initial {:.16e})",
                result.objective, result.initial_objective
            ),
        );
        for w in 0..=l {
            table.row(vec![
                Cell::Int(seed as i64),
                Cell::Int(w as i64),
                Cell::Float(result.strategy.fraction(w)),
                Cell::Float(analytic.fraction(w)),
            ]);
        }
    }
    Ok(table)
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let table = match &cli.command {
        Command::Single { p } => cmd_single(*p)?,
        Command::Multi {
            m,
            p,
            p_min,
            p_max,
            steps,
            method,
        } => cmd_multi(*m, *p, *p_min, *p_max, *steps, *method)?,
        Command::Duel {
            m,
            p_min,
            p_max,
            steps,
        } => cmd_duel(m, *p_min, *p_max, *steps)?,
        Command::Memory { p, l_min, l_max } => cmd_memory(p, *l_min, *l_max)?,
        Command::Simulate {
            p,
            schedule,
            l,
            turns,
            seed,
            initial_wealth,
            signed,
            downsample,
        } => cmd_simulate(
            *p,
            schedule.as_deref(),
            *l,
            *turns,
            *seed,
            *initial_wealth,
            *signed,
            *downsample,
        )?,
        Command::Anneal {
            p,
            schedule,
            l,
            turns,
            seeds,
            seed,
            signed,
            initial_temp,
            cooling,
            steps_per_temp,
            min_temp,
            proposal_scale,
        } => cmd_anneal(
            *p,
            schedule.as_deref(),
            *l,
            *turns,
            *seeds,
            *seed,
            *signed,
            AnnealingConfig {
                initial_temperature: *initial_temp,
                cooling_factor: *cooling,
                steps_per_temperature: *steps_per_temp,
                min_temperature: *min_temp,
                proposal_scale: *proposal_scale,
                seed: 0,
            },
        )?,
    };
    emit(cli, table)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
