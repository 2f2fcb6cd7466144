//! An insider playing one game with extra information against an outsider
//! diversifying over M games.
//!
//! The insider sees the win probability alternate between p + delta and
//! p - delta (half the turns each) and bets the optimal stake for each
//! phase; a phase below 1/2 is sat out. The outsider knows only p and
//! spreads the optimal common stake over M simultaneous games.

use crate::error::{Error, Result};
use crate::multi_game::{solve_exact, MultiGameSpec};
use crate::numerics::solve_bracketed;
use crate::single_game::kelly_growth;
use crate::types::Probability;
use std::fmt;

#[derive(Clone, Copy, Debug)]
pub struct AlternatingGameSpec {
    p: Probability,
    delta: f64,
}

impl AlternatingGameSpec {
    pub fn new(p: Probability, delta: f64) -> Result<Self> {
        let pv = p.get();
        if pv <= 0.5 {
            return Err(Error::NeedsFavourableGame {
                quantity: "alternating game",
                p: pv,
            });
        }
        if !delta.is_finite() || delta < 0.0 || delta > 1.0 - pv {
            return Err(Error::DeltaRange { p: pv, delta });
        }
        Ok(AlternatingGameSpec { p, delta })
    }

    pub fn p(&self) -> Probability {
        self.p
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }
}

fn insider_growth_raw(p: f64, delta: f64) -> f64 {
    let up = Probability::new((p + delta).min(1.0)).expect("p + delta valid");
    let down = Probability::new(p - delta).expect("p - delta valid");
    0.5 * kelly_growth(up) + 0.5 * kelly_growth(down)
}

/// Average growth of the insider over the two phases:
/// [kelly_growth(p + delta) + kelly_growth(p - delta)] / 2.
pub fn insider_growth(spec: &AlternatingGameSpec) -> f64 {
    insider_growth_raw(spec.p.get(), spec.delta)
}

/// Growth of the outsider's optimally staked M-game portfolio.
pub fn outsider_growth(p: Probability, m: u32) -> Result<f64> {
    Ok(solve_exact(&MultiGameSpec::new(p, m)?).growth)
}

fn validate_duel_p(p: Probability, quantity: &'static str) -> Result<f64> {
    let pv = p.get();
    if pv <= 0.5 {
        return Err(Error::NeedsFavourableGame { quantity, p: pv });
    }
    if pv >= 1.0 {
        return Err(Error::InvalidConfig {
            name: "p",
            reason: "break-even delta is undefined at p = 1".into(),
        });
    }
    Ok(pv)
}

/// Information advantage at which the insider's growth equals the
/// outsider's, solved on [0, 1 - p] by bracketing. None when even perfect
/// information (delta = 1 - p) cannot match the diversified portfolio.
pub fn break_even_delta_numeric(p: Probability, m: u32) -> Result<Option<f64>> {
    let pv = validate_duel_p(p, "break-even delta")?;
    if m == 1 {
        // Identical games: no edge is needed.
        MultiGameSpec::new(p, m)?;
        return Ok(Some(0.0));
    }
    let g_out = outsider_growth(p, m)?;
    let h = |delta: f64| insider_growth_raw(pv, delta) - g_out;
    let dmax = 1.0 - pv;
    if h(dmax) < 0.0 {
        return Ok(None);
    }
    Ok(Some(solve_bracketed(h, 0.0, dmax, 1e-12)))
}

/// Break-even advantage from series expansions of the insider's growth
/// around delta = 0. The quartic for the branch where both phases stay
/// favourable is tried first; if its root leaves that branch, the
/// quadratic for the one-sided branch (p - delta <= 1/2, the losing phase
/// sat out) is used instead. None when no root lies in [0, 1 - p].
pub fn break_even_delta_analytic(p: Probability, m: u32) -> Result<Option<f64>> {
    let pv = validate_duel_p(p, "break-even delta")?;
    if m == 1 {
        MultiGameSpec::new(p, m)?;
        return Ok(Some(0.0));
    }
    let q = 1.0 - pv;
    let g_kelly = kelly_growth(p);
    let g_out = outsider_growth(p, m)?;
    let rhs = g_out - g_kelly;

    // Both phases favourable: g_in - g_kelly = c2 delta^2 + c4 delta^4.
    let c2 = 0.5 * (1.0 / pv + 1.0 / q);
    let c4 = (1.0 / pv.powi(3) + 1.0 / q.powi(3)) / 12.0;
    let x = (-c2 + (c2 * c2 + 4.0 * c4 * rhs).sqrt()) / (2.0 * c4);
    if x >= 0.0 {
        let delta = x.sqrt();
        if delta <= q && pv - delta > 0.5 {
            return Ok(Some(delta));
        }
    }

    // One-sided branch: g_in = [g_kelly + g' delta + g'' delta^2 / 2] / 2.
    let a = 0.25 * (1.0 / pv + 1.0 / q);
    let b = 0.5 * (pv / q).ln();
    let c = 0.5 * g_kelly - g_out;
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return Ok(None);
    }
    let delta = (-b + disc.sqrt()) / (2.0 * a);
    Ok((0.0..=q).contains(&delta).then_some(delta))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Winner {
    Insider,
    Outsider,
    Tie,
}

impl fmt::Display for Winner {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Winner::Insider => "insider",
            Winner::Outsider => "outsider",
            Winner::Tie => "tie",
        })
    }
}

#[derive(Clone, Copy, Debug)]
pub struct DuelResult {
    pub g_insider: f64,
    pub g_outsider: f64,
    pub winner: Winner,
}

/// Head-to-head growth comparison at a given advantage; ties are called
/// at 1e-12.
pub fn duel(spec: &AlternatingGameSpec, m: u32) -> Result<DuelResult> {
    let g_insider = insider_growth(spec);
    let g_outsider = outsider_growth(spec.p, m)?;
    let diff = g_insider - g_outsider;
    let winner = if diff.abs() <= 1e-12 {
        Winner::Tie
    } else if diff > 0.0 {
        Winner::Insider
    } else {
        Winner::Outsider
    };
    Ok(DuelResult {
        g_insider,
        g_outsider,
        winner,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::LN_2;

    fn pr(v: f64) -> Probability {
        Probability::new(v).unwrap()
    }

    fn alt(p: f64, delta: f64) -> AlternatingGameSpec {
        AlternatingGameSpec::new(pr(p), delta).unwrap()
    }

    #[test]
    fn spec_validation() {
        assert!(AlternatingGameSpec::new(pr(0.5), 0.1).is_err());
        assert!(AlternatingGameSpec::new(pr(0.4), 0.1).is_err());
        assert!(AlternatingGameSpec::new(pr(0.6), 0.41).is_err());
        assert!(AlternatingGameSpec::new(pr(0.6), -0.1).is_err());
        assert!(AlternatingGameSpec::new(pr(1.0), 0.0).is_ok());
        assert!(AlternatingGameSpec::new(pr(0.6), 0.4).is_ok());
    }

    #[test]
    fn insider_growth_known_points() {
        assert!((insider_growth(&alt(0.6, 0.05)) - 0.025354454185834818).abs() < 1e-15);
        // Lower phase pushed below 1/2 and sat out.
        let one_sided = insider_growth(&alt(0.55, 0.1));
        assert!((one_sided - 0.5 * kelly_growth(pr(0.65))).abs() < 1e-16);
        assert!((one_sided - 0.02285027076265639).abs() < 1e-15);
    }

    #[test]
    fn insider_growth_no_advantage_is_kelly() {
        for &p in &[0.51, 0.6, 0.75, 0.9, 0.99] {
            let diff = insider_growth(&alt(p, 0.0)) - kelly_growth(pr(p));
            assert!(diff.abs() <= f64::EPSILON, "p = {p}");
        }
    }

    #[test]
    fn insider_growth_full_advantage() {
        // delta = 1 - p: the up phase is a certain win.
        let g = insider_growth(&alt(0.6, 0.4));
        assert!((g - 0.5 * LN_2).abs() < 1e-15);
    }

    #[test]
    fn insider_growth_monotone_in_delta() {
        let mut prev = -1.0;
        for i in 0..=40 {
            let g = insider_growth(&alt(0.6, 0.01 * i as f64));
            assert!(g >= prev, "delta = {}", 0.01 * i as f64);
            prev = g;
        }
    }

    #[test]
    fn outsider_single_game_is_kelly() {
        for i in 0..=50 {
            let p = 0.5 + 0.01 * i as f64;
            let diff = outsider_growth(pr(p), 1).unwrap() - kelly_growth(pr(p));
            assert!(diff.abs() < 1e-12, "p = {p}");
        }
    }

    #[test]
    fn outsider_known_points() {
        assert!((outsider_growth(pr(0.6), 2).unwrap() - 0.03947081363139392).abs() < 1e-13);
        assert!((outsider_growth(pr(0.6), 4).unwrap() - 0.07549620593365144).abs() < 1e-12);
    }

    #[test]
    fn outsider_gains_from_diversification() {
        let mut prev = 0.0;
        for m in [1u32, 2, 4, 10, 30] {
            let g = outsider_growth(pr(0.6), m).unwrap();
            assert!(g > prev, "M = {m}");
            prev = g;
        }
    }

    #[test]
    fn break_even_known_points() {
        let d2 = break_even_delta_numeric(pr(0.6), 2).unwrap().unwrap();
        assert!((d2 - 0.09597283995064895).abs() < 1e-9);
        let d4 = break_even_delta_numeric(pr(0.6), 4).unwrap().unwrap();
        assert!((d4 - 0.16760443341305695).abs() < 1e-9);
        let d55 = break_even_delta_numeric(pr(0.55), 2).unwrap().unwrap();
        assert!((d55 - 0.04949916278803511).abs() < 1e-9);
    }

    #[test]
    fn break_even_is_a_root() {
        for &(p, m) in &[(0.6f64, 2u32), (0.6, 4), (0.55, 2), (0.7, 3)] {
            let d = break_even_delta_numeric(pr(p), m).unwrap().unwrap();
            let gap = insider_growth(&alt(p, d)) - outsider_growth(pr(p), m).unwrap();
            assert!(gap.abs() < 1e-9, "p = {p}, M = {m}");
        }
    }

    #[test]
    fn break_even_single_game_needs_nothing() {
        assert_eq!(break_even_delta_numeric(pr(0.6), 1).unwrap(), Some(0.0));
        assert_eq!(break_even_delta_analytic(pr(0.6), 1).unwrap(), Some(0.0));
    }

    #[test]
    fn break_even_can_be_unreachable() {
        // Strong games diversify so well that full information loses.
        assert_eq!(break_even_delta_numeric(pr(0.9), 4).unwrap(), None);
        assert_eq!(break_even_delta_numeric(pr(0.95), 10).unwrap(), None);
    }

    #[test]
    fn break_even_grows_with_p_near_saturation() {
        let lo = break_even_delta_numeric(pr(0.6), 4).unwrap().unwrap();
        let hi = break_even_delta_numeric(pr(0.7), 4).unwrap().unwrap();
        assert!(hi > lo);
    }

    #[test]
    fn break_even_validation() {
        assert!(break_even_delta_numeric(pr(0.5), 2).is_err());
        assert!(break_even_delta_numeric(pr(1.0), 2).is_err());
        assert!(break_even_delta_analytic(pr(0.4), 2).is_err());
        assert!(break_even_delta_analytic(pr(1.0), 2).is_err());
    }

    #[test]
    fn analytic_break_even_known_point() {
        let d = break_even_delta_analytic(pr(0.6), 4).unwrap().unwrap();
        assert!((d - 0.17153938062872517).abs() < 1e-9);
    }

    #[test]
    fn analytic_tracks_numeric_near_fair_game() {
        for m in [2u32, 3, 4] {
            let num = break_even_delta_numeric(pr(0.51), m).unwrap().unwrap();
            let ana = break_even_delta_analytic(pr(0.51), m).unwrap().unwrap();
            assert!((ana / num - 1.0).abs() < 0.02, "M = {m}");
        }
    }

    #[test]
    fn duel_winner_flips_once() {
        let m = 4;
        let mut states = Vec::new();
        for i in 0..=100 {
            let delta = 0.4 * i as f64 / 100.0;
            let r = duel(&alt(0.6, delta), m).unwrap();
            states.push(r.winner == Winner::Insider);
        }
        assert!(!states[0]);
        assert!(*states.last().unwrap());
        let flips = states.windows(2).filter(|w| w[0] != w[1]).count();
        assert_eq!(flips, 1);
    }

    #[test]
    fn duel_reports_both_growths() {
        let r = duel(&alt(0.6, 0.05), 2).unwrap();
        assert_eq!(r.winner, Winner::Outsider);
        assert!((r.g_insider - 0.025354454185834818).abs() < 1e-15);
        assert!((r.g_outsider - 0.03947081363139392).abs() < 1e-13);
        let r = duel(&alt(0.6, 0.3), 2).unwrap();
        assert_eq!(r.winner, Winner::Insider);
    }
}
