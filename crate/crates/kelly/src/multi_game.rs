//! M simultaneous independent games with a common win probability and a
//! common per-game stake f. The number of wins w is Binomial(M, p) and a
//! turn multiplies wealth by 1 + (2w - M) f, so the feasible range is
//! f < 1/M: staking the full 1/M risks losing everything in one turn.

use crate::error::{Error, Result};
use crate::numerics::{solve_bracketed, LnFactorial};
use crate::types::{Fraction, Probability};
use std::fmt;

#[derive(Clone, Copy, Debug)]
pub struct MultiGameSpec {
    p: Probability,
    m: u32,
}

impl MultiGameSpec {
    pub fn new(p: Probability, m: u32) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidConfig {
                name: "M",
                reason: "at least one game is required".into(),
            });
        }
        Ok(MultiGameSpec { p, m })
    }

    pub fn p(&self) -> Probability {
        self.p
    }

    pub fn m(&self) -> u32 {
        self.m
    }
}

/// How a stake was produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolutionMethod {
    Exact,
    ClosedForm,
    Unsaturated,
    Saturated,
    Piecewise,
}

impl fmt::Display for SolutionMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SolutionMethod::Exact => "exact",
            SolutionMethod::ClosedForm => "closed_form",
            SolutionMethod::Unsaturated => "unsaturated",
            SolutionMethod::Saturated => "saturated",
            SolutionMethod::Piecewise => "piecewise",
        })
    }
}

/// A per-game stake together with the growth it achieves in the true game.
/// Approximations can overshoot the ruin bound 1/M outside their regime;
/// the growth is then -inf.
#[derive(Clone, Copy, Debug)]
pub struct PortfolioSolution {
    pub f_star: Fraction,
    pub total_invested: f64,
    pub growth: f64,
    pub method: SolutionMethod,
}

/// Outcome distribution as (payoff coefficient 2w - M, probability) pairs,
/// dropping zero-mass terms so degenerate p stays free of 0 * inf.
fn pmf_terms(m: u32, p: f64) -> Vec<(f64, f64)> {
    let n = m as usize;
    let lf = LnFactorial::new(n);
    (0..=n)
        .filter_map(|w| {
            let pw = lf.pmf(n, w, p);
            (pw > 0.0).then(|| ((2 * w as i64 - n as i64) as f64, pw))
        })
        .collect()
}

/// Expected log growth per turn of staking f on each of the M games.
pub fn multi_growth(spec: &MultiGameSpec, f: Fraction) -> Result<f64> {
    let p = spec.p.get();
    let fv = f.get();
    if p < 1.0 && fv >= 1.0 / spec.m as f64 {
        return Err(Error::CertainRuin { f: fv, m: spec.m });
    }
    Ok(pmf_terms(spec.m, p)
        .iter()
        .map(|&(k, pw)| pw * (k * fv).ln_1p())
        .sum())
}

fn build_solution(spec: &MultiGameSpec, f: f64, method: SolutionMethod) -> PortfolioSolution {
    let f_star = Fraction::new_unchecked(f);
    let growth = multi_growth(spec, f_star).unwrap_or(f64::NEG_INFINITY);
    PortfolioSolution {
        f_star,
        total_invested: spec.m as f64 * f,
        growth,
        method,
    }
}

/// Growth-optimal stake, found as the root of dG/df. The derivative is
/// strictly decreasing on [0, 1/M), positive at 0 for p > 1/2, and falls
/// to -inf at the ruin bound, so the root is unique. A root too close to
/// 1/M to bracket in f64 (p extremely near 1) is reported as the bracket
/// edge, within 1e-15 of the truth.
pub fn solve_exact(spec: &MultiGameSpec) -> PortfolioSolution {
    let p = spec.p.get();
    let mf = spec.m as f64;
    if p <= 0.5 {
        return build_solution(spec, 0.0, SolutionMethod::Exact);
    }
    if p == 1.0 {
        return build_solution(spec, 1.0 / mf, SolutionMethod::Exact);
    }
    let terms = pmf_terms(spec.m, p);
    let slope = |f: f64| -> f64 { terms.iter().map(|&(k, pw)| pw * k / (1.0 + k * f)).sum() };
    let hi = 1.0 / mf - 1e-15;
    // Run the solver to float resolution: near saturation the curvature of G
    // grows like M^2 (2p-1)^2 / (4 p^2 q^M), so any leftover gap in f* is
    // amplified enormously in the stationarity residual sum(P_w / (1 + k f)).
    let f = if slope(hi) >= 0.0 {
        hi
    } else {
        solve_bracketed(slope, 0.0, hi, 0.0)
    };
    build_solution(spec, f, SolutionMethod::Exact)
}

/// Closed-form optimum: 2p - 1 for M = 1, (2p - 1) / (4p^2 - 4p + 2) for
/// M = 2. No closed form exists beyond M = 2.
pub fn closed_form(spec: &MultiGameSpec) -> Result<PortfolioSolution> {
    let p = spec.p.get();
    let f = match spec.m {
        1 => 2.0 * p - 1.0,
        2 => (2.0 * p - 1.0) / (4.0 * p * p - 4.0 * p + 2.0),
        m => return Err(Error::NoClosedForm(m)),
    };
    Ok(build_solution(spec, f.max(0.0), SolutionMethod::ClosedForm))
}

fn unsaturated_stake(m: f64, p: f64) -> f64 {
    let u = 2.0 * p - 1.0;
    (u / (m * u * u + 4.0 * p * (1.0 - p))).max(0.0)
}

// Without the clamp at zero; used to locate the crossover.
fn saturated_stake_raw(m: f64, p: f64) -> f64 {
    let q = 1.0 - p;
    (1.0 - 2.0 * p * q.powf(m) / (2.0 * p - 1.0)) / m
}

/// Small-stake approximation f = (2p - 1) / [M (2p - 1)^2 + 4 p (1 - p)],
/// accurate while the portfolio is far from full investment.
pub fn approx_unsaturated(spec: &MultiGameSpec) -> PortfolioSolution {
    let f = unsaturated_stake(spec.m as f64, spec.p.get());
    build_solution(spec, f, SolutionMethod::Unsaturated)
}

/// Near-full-investment approximation f = (1/M)[1 - 2 p (1-p)^M / (2p - 1)],
/// clamped below at zero. Singular at p = 1/2.
pub fn approx_saturated(spec: &MultiGameSpec) -> Result<PortfolioSolution> {
    let p = spec.p.get();
    if p == 0.5 {
        return Err(Error::SaturatedAtFairGame);
    }
    if p < 0.5 {
        return Err(Error::NeedsFavourableGame {
            quantity: "saturated approximation",
            p,
        });
    }
    let f = saturated_stake_raw(spec.m as f64, p).max(0.0);
    Ok(build_solution(spec, f, SolutionMethod::Saturated))
}

/// Win probability where the unsaturated and saturated stakes intersect.
/// Scans (1/2, 1) for the last genuine sign change of their difference and
/// polishes it to 1e-12; sign flips with both values below 1e-9 are float
/// noise near p = 1 and are ignored. When the curves never cross but meet
/// tangentially at p = 1 (M = 1), returns 1.
pub fn crossover_pc(m: u32) -> Result<Probability> {
    if m == 0 {
        return Err(Error::InvalidConfig {
            name: "M",
            reason: "at least one game is required".into(),
        });
    }
    let mf = m as f64;
    let d = |p: f64| unsaturated_stake(mf, p) - saturated_stake_raw(mf, p);
    let (lo, hi) = (0.5 + 1e-6, 1.0 - 1e-6);
    let n = 4000;
    let mut bracket = None;
    let mut pa = lo;
    let mut da = d(pa);
    for i in 1..=n {
        let pb = lo + (hi - lo) * i as f64 / n as f64;
        let db = d(pb);
        if da.signum() != db.signum() && da.abs().max(db.abs()) > 1e-9 {
            bracket = Some((pa, pb));
        }
        pa = pb;
        da = db;
    }
    match bracket {
        Some((a, b)) => {
            let root = solve_bracketed(d, a, b, 1e-12);
            Ok(Probability::new(root).expect("root lies in (1/2, 1)"))
        }
        None if d(hi).abs() < 1e-6 => Ok(Probability::new(1.0).unwrap()),
        None => Err(Error::NoCrossover(m)),
    }
}

/// Branch-selected approximation: unsaturated up to the crossover
/// probability, saturated beyond it. Continuous at the joint by
/// construction of the crossover.
pub fn piecewise_approx(spec: &MultiGameSpec) -> Result<PortfolioSolution> {
    let pc = crossover_pc(spec.m)?;
    let sol = if spec.p.get() <= pc.get() {
        approx_unsaturated(spec)
    } else {
        approx_saturated(spec)?
    };
    Ok(PortfolioSolution {
        method: SolutionMethod::Piecewise,
        ..sol
    })
}
