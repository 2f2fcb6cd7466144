//! Betting from a finite memory: the last L outcomes are the only
//! information about the game's win probability. Posterior inference over
//! p, the induced betting tables f(w), their growth, and how much of the
//! full-information return survives.

use crate::error::{Error, Result};
use crate::numerics::{integrate, LnFactorial};
use crate::single_game::{entropy, kelly_compounded_return, kelly_growth};
use crate::types::Probability;
use std::f64::consts::LN_2;

/// Give up searching for a profitable memory beyond this length.
pub const MEMORY_SCAN_CAP: usize = 1_000_000;

/// A window of L outcomes containing w wins.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct History {
    wins: usize,
    len: usize,
}

impl History {
    pub fn new(wins: usize, len: usize) -> Result<Self> {
        if wins > len {
            return Err(Error::InvalidConfig {
                name: "history",
                reason: format!("{wins} wins cannot fit in {len} outcomes"),
            });
        }
        Ok(History { wins, len })
    }

    pub fn wins(&self) -> usize {
        self.wins
    }

    pub fn len(&self) -> usize {
        self.len
    }

    /// True for the zero-outcome window, whose posterior is the prior.
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }
}

/// Belief over the game's win probability before seeing the window.
#[derive(Clone, Debug)]
pub struct PriorSpec {
    kind: PriorKind,
}

#[derive(Clone, Debug)]
enum PriorKind {
    Uniform,
    TruncatedUniform { lo: f64, hi: f64 },
    Tabulated { xs: Vec<f64>, ys: Vec<f64> },
}

impl PriorSpec {
    pub fn uniform() -> Self {
        PriorSpec {
            kind: PriorKind::Uniform,
        }
    }

    pub fn truncated_uniform(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && 0.0 <= lo && lo < hi && hi <= 1.0) {
            return Err(Error::InvalidConfig {
                name: "prior",
                reason: format!("truncation needs 0 <= lo < hi <= 1, got [{lo}, {hi}]"),
            });
        }
        Ok(PriorSpec {
            kind: PriorKind::TruncatedUniform { lo, hi },
        })
    }

    /// Piecewise-linear density through the knots, zero outside them,
    /// normalized here so callers can pass unscaled shapes.
    pub fn tabulated(knots: &[(f64, f64)]) -> Result<Self> {
        if knots.len() < 2 {
            return Err(Error::InvalidConfig {
                name: "prior",
                reason: "tabulated prior needs at least two knots".into(),
            });
        }
        for &(x, y) in knots {
            if !(x.is_finite() && (0.0..=1.0).contains(&x) && y.is_finite() && y >= 0.0) {
                return Err(Error::InvalidPrior);
            }
        }
        for pair in knots.windows(2) {
            if pair[1].0 <= pair[0].0 {
                return Err(Error::InvalidConfig {
                    name: "prior",
                    reason: "knot positions must increase strictly".into(),
                });
            }
        }
        let mass: f64 = knots
            .windows(2)
            .map(|pair| 0.5 * (pair[1].0 - pair[0].0) * (pair[0].1 + pair[1].1))
            .sum();
        if !(mass > 0.0 && mass.is_finite()) {
            return Err(Error::InvalidPrior);
        }
        Ok(PriorSpec {
            kind: PriorKind::Tabulated {
                xs: knots.iter().map(|k| k.0).collect(),
                ys: knots.iter().map(|k| k.1 / mass).collect(),
            },
        })
    }

    pub fn density(&self, p: f64) -> f64 {
        match &self.kind {
            PriorKind::Uniform => {
                if (0.0..=1.0).contains(&p) {
                    1.0
                } else {
                    0.0
                }
            }
            PriorKind::TruncatedUniform { lo, hi } => {
                if (*lo..=*hi).contains(&p) {
                    1.0 / (hi - lo)
                } else {
                    0.0
                }
            }
            PriorKind::Tabulated { xs, ys } => {
                if p < xs[0] || p > *xs.last().unwrap() {
                    return 0.0;
                }
                let i = match xs.binary_search_by(|x| x.partial_cmp(&p).unwrap()) {
                    Ok(i) => return ys[i],
                    Err(i) => i - 1,
                };
                let t = (p - xs[i]) / (xs[i + 1] - xs[i]);
                ys[i] + t * (ys[i + 1] - ys[i])
            }
        }
    }

    // Integration subintervals covering the support, split at density kinks.
    fn segments(&self) -> Vec<(f64, f64)> {
        match &self.kind {
            PriorKind::Uniform => vec![(0.0, 1.0)],
            PriorKind::TruncatedUniform { lo, hi } => vec![(*lo, *hi)],
            PriorKind::Tabulated { xs, .. } => {
                xs.windows(2).map(|pair| (pair[0], pair[1])).collect()
            }
        }
    }
}

/// Integral of prior density times f over the prior's support.
fn integrate_prior<F: Fn(f64) -> f64>(prior: &PriorSpec, f: &F, tol: f64) -> f64 {
    let segments = prior.segments();
    let per_segment = tol / segments.len() as f64;
    segments
        .iter()
        .map(|&(a, b)| integrate(&|p| prior.density(p) * f(p), a, b, per_segment))
        .sum()
}

// Log-likelihood of w wins in L outcomes, finite except at degenerate p.
fn ln_likelihood(wins: usize, len: usize, p: f64) -> f64 {
    let losses = len - wins;
    let mut ll = 0.0;
    if wins > 0 {
        ll += wins as f64 * p.ln();
    }
    if losses > 0 {
        ll += losses as f64 * (-p).ln_1p();
    }
    ll
}

/// Posterior over the win probability given a window. Likelihoods are
/// carried relative to their peak so long windows cannot underflow.
#[derive(Clone, Debug)]
pub struct Posterior {
    hist: History,
    prior: PriorSpec,
    ln_scale: f64,
    norm: f64,
}

pub fn posterior(hist: History, prior: &PriorSpec) -> Result<Posterior> {
    let ln_scale = if hist.len == 0 {
        0.0
    } else {
        ln_likelihood(hist.wins, hist.len, hist.wins as f64 / hist.len as f64)
    };
    let norm = integrate_prior(
        prior,
        &|p| (ln_likelihood(hist.wins, hist.len, p) - ln_scale).exp(),
        1e-12,
    );
    if !(norm.is_finite() && norm > 0.0) {
        return Err(Error::InvalidPrior);
    }
    Ok(Posterior {
        hist,
        prior: prior.clone(),
        ln_scale,
        norm,
    })
}

impl Posterior {
    pub fn wins(&self) -> usize {
        self.hist.wins
    }

    pub fn len(&self) -> usize {
        self.hist.len
    }

    /// True when conditioned on the zero-outcome window.
    pub fn is_empty(&self) -> bool {
        self.hist.len == 0
    }

    pub fn density(&self, p: f64) -> f64 {
        if !(0.0..=1.0).contains(&p) {
            return 0.0;
        }
        self.prior.density(p)
            * (ln_likelihood(self.hist.wins, self.hist.len, p) - self.ln_scale).exp()
            / self.norm
    }

    /// Posterior mean of p; (w + 1) / (L + 2) under the uniform prior.
    pub fn mean(&self) -> f64 {
        if let PriorKind::Uniform = self.prior.kind {
            return (self.hist.wins as f64 + 1.0) / (self.hist.len as f64 + 2.0);
        }
        integrate_prior(
            &self.prior,
            &|p| p * (ln_likelihood(self.hist.wins, self.hist.len, p) - self.ln_scale).exp(),
            1e-12,
        ) / self.norm
    }
}

/// Stake maximizing expected log growth under the posterior: 2 mean - 1,
/// clamped at zero unless shorting is allowed.
pub fn optimal_fraction_from_posterior(post: &Posterior, allow_negative: bool) -> f64 {
    let f = 2.0 * post.mean() - 1.0;
    if allow_negative {
        f
    } else {
        f.max(0.0)
    }
}

/// Betting table indexed by the number of wins in the memory window.
#[derive(Clone, Debug, PartialEq)]
pub struct MemoryStrategy {
    fractions: Vec<f64>,
    allow_negative: bool,
}

impl MemoryStrategy {
    /// Entry w is the stake after seeing w wins; the table length fixes
    /// the memory as len - 1. Entries must stay inside (-1, 1), and
    /// nonnegative unless shorting is allowed.
    pub fn from_table(fractions: Vec<f64>, allow_negative: bool) -> Result<Self> {
        if fractions.is_empty() {
            return Err(Error::InvalidConfig {
                name: "strategy",
                reason: "table needs an entry for every win count 0..=L".into(),
            });
        }
        for (w, &f) in fractions.iter().enumerate() {
            if !f.is_finite() || f.abs() >= 1.0 || (!allow_negative && f < 0.0) {
                return Err(Error::TableEntryRange { w, value: f });
            }
        }
        Ok(MemoryStrategy {
            fractions,
            allow_negative,
        })
    }

    pub fn memory_len(&self) -> usize {
        self.fractions.len() - 1
    }

    pub fn fraction(&self, wins: usize) -> f64 {
        self.fractions[wins]
    }

    pub fn fractions(&self) -> &[f64] {
        &self.fractions
    }

    pub fn allow_negative(&self) -> bool {
        self.allow_negative
    }
}

/// Bayes-optimal table under the uniform prior: f(w) = (2w - L)/(L + 2),
/// clamped at zero unless shorting is allowed.
pub fn memory_strategy(len: usize, allow_negative: bool) -> MemoryStrategy {
    let l = len as f64;
    let fractions = (0..=len)
        .map(|w| {
            let f = (2.0 * w as f64 - l) / (l + 2.0);
            if allow_negative {
                f
            } else {
                f.max(0.0)
            }
        })
        .collect();
    MemoryStrategy {
        fractions,
        allow_negative,
    }
}

fn growth_for_table(p: f64, fractions: &[f64], lf: &LnFactorial) -> f64 {
    let len = fractions.len() - 1;
    let q = 1.0 - p;
    let mut acc = 0.0;
    for (w, &f) in fractions.iter().enumerate() {
        if f == 0.0 {
            continue;
        }
        let pw = lf.pmf(len, w, p);
        if pw == 0.0 {
            continue;
        }
        acc += pw * (p * f.ln_1p() + q * (-f).ln_1p());
    }
    acc
}

/// Long-run growth at fixed true p: windows are Binomial(L, p), each
/// worth p ln(1 + f(w)) + (1-p) ln(1 - f(w)).
pub fn growth_given_p(p: Probability, strategy: &MemoryStrategy) -> f64 {
    let lf = LnFactorial::new(strategy.memory_len());
    growth_for_table(p.get(), strategy.fractions(), &lf)
}

/// Share of the full-information compounded return captured with memory L:
/// (exp(G(p, L)) - 1) / kelly_compounded_return(p). Negative when finite
/// memory loses money on a favourable game.
pub fn xi_ratio(p: Probability, len: usize) -> Result<f64> {
    if p.get() <= 0.5 {
        return Err(Error::NeedsFavourableGame {
            quantity: "xi ratio",
            p: p.get(),
        });
    }
    let g = growth_given_p(p, &memory_strategy(len, false));
    Ok((g.exp() - 1.0) / kelly_compounded_return(p))
}

/// Smallest memory whose clamped table has positive growth at p. Doubling
/// scan and bisection find the threshold; a short downward walk guards
/// against non-monotone wiggles near it.
pub fn min_profitable_memory(p: Probability) -> Result<usize> {
    let pv = p.get();
    if pv <= 0.5 {
        return Err(Error::NeedsFavourableGame {
            quantity: "profitable memory",
            p: pv,
        });
    }
    let g = |len: usize| growth_given_p(p, &memory_strategy(len, false));
    let mut lo = 1usize;
    let mut hi = 1usize;
    while g(hi) <= 0.0 {
        lo = hi;
        hi *= 2;
        if hi > MEMORY_SCAN_CAP {
            return Err(Error::MemoryCapExceeded {
                p: pv,
                cap: MEMORY_SCAN_CAP,
            });
        }
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if g(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let mut c = hi;
    loop {
        while c > 1 && g(c - 1) > 0.0 {
            c -= 1;
        }
        let floor = c.saturating_sub(8).max(1);
        match (floor..c.saturating_sub(1)).find(|&j| g(j) > 0.0) {
            Some(j) => c = j,
            None => break,
        }
    }
    Ok(c)
}

#[derive(Clone, Copy, Debug)]
pub struct GrowthApprox {
    pub value: f64,
    /// Whether L clears regime_threshold(p), where the truncated series
    /// can be trusted.
    pub in_regime: bool,
}

/// Leading-order growth of the memory-L bettor: G_K(p) - 1/(2L).
pub fn growth_approx(p: Probability, len: usize) -> Result<GrowthApprox> {
    if len == 0 {
        return Err(Error::InvalidConfig {
            name: "L",
            reason: "memory must be positive".into(),
        });
    }
    let value = kelly_growth(p) - 0.5 / len as f64;
    let in_regime = p.get() > 0.5 && len as f64 >= regime_threshold(p);
    Ok(GrowthApprox { value, in_regime })
}

/// Memory needed before the 1/(2L) deficit is small next to G_K(p):
/// 9 p (1 - p) / (p - 1/2)^2.
pub fn regime_threshold(p: Probability) -> f64 {
    let pv = p.get();
    if pv == 0.5 {
        return f64::INFINITY;
    }
    9.0 * pv * (1.0 - pv) / ((pv - 0.5) * (pv - 0.5))
}

/// Back-of-envelope memory at which growth turns positive: 1 / (2 G_K(p)).
pub fn l_min_estimate(p: Probability) -> Result<f64> {
    if p.get() <= 0.5 {
        return Err(Error::NeedsFavourableGame {
            quantity: "minimum-memory estimate",
            p: p.get(),
        });
    }
    Ok(1.0 / (2.0 * kelly_growth(p)))
}

/// Exact growth of the signed table f(w) = (2w - L)/(L + 2) at true p.
pub fn growth_signed_exact(p: Probability, len: usize) -> f64 {
    growth_given_p(p, &memory_strategy(len, true))
}

/// Series for the signed-table growth in powers of 1/L, with x = p(1 - p):
/// G = [ln 2 - S(p)] - 1/(2L) + (11x + 1)/(12 x L^2)
///     - (20 x^2 + 5x - 1)/(12 x^2 L^3).
/// The entropy term is the analytic branch on both sides of 1/2; order
/// selects how many correction terms beyond it are kept (1 to 3).
pub fn growth_signed_series(p: Probability, len: usize, order: u32) -> Result<f64> {
    let pv = p.get();
    if !(0.0 < pv && pv < 1.0) {
        return Err(Error::InvalidConfig {
            name: "p",
            reason: "series requires 0 < p < 1".into(),
        });
    }
    if len == 0 {
        return Err(Error::InvalidConfig {
            name: "L",
            reason: "memory must be positive".into(),
        });
    }
    if !(1..=3).contains(&order) {
        return Err(Error::InvalidConfig {
            name: "order",
            reason: format!("supported orders are 1 to 3, got {order}"),
        });
    }
    let x = pv * (1.0 - pv);
    let l = len as f64;
    let mut g = LN_2 - entropy(p) - 0.5 / l;
    if order >= 2 {
        g += (11.0 * x + 1.0) / (12.0 * x * l * l);
    }
    if order >= 3 {
        g -= (20.0 * x * x + 5.0 * x - 1.0) / (12.0 * x * x * l * l * l);
    }
    Ok(g)
}

/// Growth when each turn's win probability is an independent draw from
/// the prior (equivalently, a slowly varying schedule whose time-weighted
/// p-distribution is the prior).
pub fn averaged_growth(prior: &PriorSpec, strategy: &MemoryStrategy) -> f64 {
    let lf = LnFactorial::new(strategy.memory_len());
    integrate_prior(
        prior,
        &|p| growth_for_table(p, strategy.fractions(), &lf),
        1e-9,
    )
}

/// Table maximizing averaged_growth for the prior. The objective splits
/// per win count, giving f(w) = (a - b)/(a + b) with
/// a = int prior(p) p P(w|p, L) dp and b the same weighted by 1 - p;
/// the uniform prior recovers (2w - L)/(L + 2) exactly.
pub fn maximize_table(len: usize, prior: &PriorSpec) -> MemoryStrategy {
    let lf = LnFactorial::new(len);
    let fractions = (0..=len)
        .map(|w| {
            let a = integrate_prior(prior, &|p| p * lf.pmf(len, w, p), 1e-13);
            let b = integrate_prior(prior, &|p| (1.0 - p) * lf.pmf(len, w, p), 1e-13);
            if a + b > 0.0 {
                ((a - b) / (a + b)).clamp(-(1.0 - 1e-12), 1.0 - 1e-12)
            } else {
                0.0
            }
        })
        .collect();
    MemoryStrategy {
        fractions,
        allow_negative: true,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::integrate;

    fn pr(v: f64) -> Probability {
        Probability::new(v).unwrap()
    }

    #[test]
    fn history_validation() {
        assert!(History::new(3, 2).is_err());
        assert!(History::new(2, 2).is_ok());
        assert!(History::new(0, 0).is_ok());
    }

    #[test]
    fn uniform_posterior_mean() {
        let post = posterior(History::new(7, 10).unwrap(), &PriorSpec::uniform()).unwrap();
        assert!((post.mean() - 8.0 / 12.0).abs() < 1e-15);
        let empty = posterior(History::new(0, 0).unwrap(), &PriorSpec::uniform()).unwrap();
        assert!((empty.mean() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn posterior_density_normalizes() {
        let priors = [
            PriorSpec::uniform(),
            PriorSpec::truncated_uniform(0.0, 0.75).unwrap(),
            PriorSpec::tabulated(&[(0.0, 0.0), (0.5, 2.0), (1.0, 0.0)]).unwrap(),
        ];
        for prior in &priors {
            for &(w, l) in &[(0usize, 0usize), (3, 10), (0, 25), (40, 60)] {
                let post = posterior(History::new(w, l).unwrap(), prior).unwrap();
                let mass = integrate(&|p| post.density(p), 0.0, 1.0, 1e-10);
                assert!((mass - 1.0).abs() < 1e-8, "w = {w}, L = {l}");
            }
        }
    }

    #[test]
    fn truncated_posterior_mean() {
        let prior = PriorSpec::truncated_uniform(0.0, 0.75).unwrap();
        let post = posterior(History::new(3, 10).unwrap(), &prior).unwrap();
        assert!((post.mean() - 0.3328016241299309).abs() < 1e-8);
    }

    #[test]
    fn two_point_belief_fraction() {
        // Two narrow triangles: p = 0.55 with weight 0.7, p = 0.8 with 0.3.
        let prior = PriorSpec::tabulated(&[
            (0.54, 0.0),
            (0.55, 70.0),
            (0.56, 0.0),
            (0.79, 0.0),
            (0.80, 30.0),
            (0.81, 0.0),
        ])
        .unwrap();
        let post = posterior(History::new(0, 0).unwrap(), &prior).unwrap();
        assert!((post.mean() - 0.625).abs() < 1e-9);
        assert!((optimal_fraction_from_posterior(&post, true) - 0.25).abs() < 1e-9);
        assert!((optimal_fraction_from_posterior(&post, false) - 0.25).abs() < 1e-9);
    }

    #[test]
    fn pessimistic_posterior_clamps() {
        let post = posterior(History::new(1, 10).unwrap(), &PriorSpec::uniform()).unwrap();
        assert!(optimal_fraction_from_posterior(&post, true) < 0.0);
        assert_eq!(optimal_fraction_from_posterior(&post, false), 0.0);
    }

    #[test]
    fn prior_validation() {
        assert!(PriorSpec::truncated_uniform(0.8, 0.2).is_err());
        assert!(PriorSpec::truncated_uniform(-0.1, 0.5).is_err());
        assert!(PriorSpec::truncated_uniform(0.3, 0.3).is_err());
        assert!(PriorSpec::tabulated(&[(0.0, 1.0)]).is_err());
        assert!(PriorSpec::tabulated(&[(0.0, 0.0), (1.0, 0.0)]).is_err());
        assert!(PriorSpec::tabulated(&[(0.5, 1.0), (0.2, 1.0)]).is_err());
        assert!(PriorSpec::tabulated(&[(0.0, -1.0), (1.0, 3.0)]).is_err());
    }

    #[test]
    fn tabulated_density_interpolates() {
        let prior = PriorSpec::tabulated(&[(0.0, 0.0), (0.5, 2.0), (1.0, 0.0)]).unwrap();
        assert!((prior.density(0.25) - 1.0).abs() < 1e-15);
        assert!((prior.density(0.5) - 2.0).abs() < 1e-15);
        assert_eq!(prior.density(-0.1), 0.0);
        assert_eq!(prior.density(1.1), 0.0);
    }

    #[test]
    fn strategy_tables() {
        let clamped = memory_strategy(10, false);
        assert_eq!(clamped.memory_len(), 10);
        assert_eq!(clamped.fraction(5), 0.0);
        assert!((clamped.fraction(6) - 1.0 / 6.0).abs() < 1e-15);
        assert!((clamped.fraction(10) - 10.0 / 12.0).abs() < 1e-15);
        assert_eq!(clamped.fraction(0), 0.0);
        let signed = memory_strategy(2, true);
        assert_eq!(signed.fraction(0), -0.5);
        assert_eq!(signed.fraction(1), 0.0);
        assert_eq!(signed.fraction(2), 0.5);
        let trivial = memory_strategy(0, false);
        assert_eq!(trivial.fractions(), &[0.0]);
    }

    #[test]
    fn strategy_from_table_validation() {
        assert!(MemoryStrategy::from_table(vec![], false).is_err());
        assert!(MemoryStrategy::from_table(vec![0.5, 1.0], true).is_err());
        assert!(MemoryStrategy::from_table(vec![-0.5], false).is_err());
        assert!(MemoryStrategy::from_table(vec![0.3, -0.2], true).is_ok());
    }

    #[test]
    fn growth_known_points_clamped() {
        let g = |p: f64, l: usize| growth_given_p(pr(p), &memory_strategy(l, false));
        assert!((g(0.5, 10) - -0.01956007422694401).abs() < 1e-14);
        assert!((g(0.6, 5) - -0.009990116650387838).abs() < 1e-14);
        assert!((g(0.6, 20) - 0.004037398900).abs() < 1e-9);
        assert!((g(0.6, 100) - 0.015439863404).abs() < 1e-9);
        assert!((g(0.55, 30) - -0.004304714446).abs() < 1e-9);
        assert_eq!(g(0.7, 0), 0.0);
    }

    #[test]
    fn growth_approaches_kelly() {
        let gk = kelly_growth(pr(0.6));
        let g = growth_given_p(pr(0.6), &memory_strategy(3000, false));
        let deficit = gk - g;
        assert!((deficit * 6000.0 - 1.0).abs() < 0.05);
    }

    #[test]
    fn xi_known_points() {
        assert!((xi_ratio(pr(0.6), 5).unwrap() - -0.4887).abs() < 1e-3);
        assert!((xi_ratio(pr(0.6), 20).unwrap() - 0.1989).abs() < 1e-3);
        assert!((xi_ratio(pr(0.6), 100).unwrap() - 0.7650).abs() < 1e-3);
        assert!((xi_ratio(pr(0.55), 30).unwrap() - -0.8555).abs() < 1e-3);
        assert!(xi_ratio(pr(0.5), 10).is_err());
    }

    #[test]
    fn min_profitable_memory_known_points() {
        assert_eq!(min_profitable_memory(pr(0.51)).unwrap(), 1761);
        assert_eq!(min_profitable_memory(pr(0.52)).unwrap(), 438);
        assert_eq!(min_profitable_memory(pr(0.6)).unwrap(), 1);
        assert_eq!(min_profitable_memory(pr(0.7)).unwrap(), 1);
        assert_eq!(min_profitable_memory(pr(0.9)).unwrap(), 1);
        assert!(min_profitable_memory(pr(0.5)).is_err());
    }

    #[test]
    fn min_profitable_memory_brackets_the_sign_change() {
        for &p in &[0.51, 0.52, 0.55] {
            let l = min_profitable_memory(pr(p)).unwrap();
            assert!(growth_given_p(pr(p), &memory_strategy(l, false)) > 0.0);
            if l > 1 {
                assert!(growth_given_p(pr(p), &memory_strategy(l - 1, false)) <= 0.0);
            }
        }
    }

    #[test]
    fn memory_cap_signals_impractical_game() {
        assert!(matches!(
            min_profitable_memory(pr(0.5001)),
            Err(Error::MemoryCapExceeded { .. })
        ));
    }

    #[test]
    fn growth_approx_and_regime() {
        let a = growth_approx(pr(0.6), 100).unwrap();
        assert!((a.value - (kelly_growth(pr(0.6)) - 0.005)).abs() < 1e-15);
        assert!(!a.in_regime);
        assert!(growth_approx(pr(0.6), 300).unwrap().in_regime);
        assert!(!growth_approx(pr(0.51), 1000).unwrap().in_regime);
        assert!(growth_approx(pr(0.6), 0).is_err());
        assert!((regime_threshold(pr(0.6)) - 216.0).abs() < 1e-9);
        assert_eq!(regime_threshold(pr(0.5)), f64::INFINITY);
    }

    #[test]
    fn l_min_estimate_known_points() {
        assert!((l_min_estimate(pr(0.51)).unwrap() - 2499.8333177759027).abs() < 1e-9);
        assert!((l_min_estimate(pr(0.6)).unwrap() - 24.831748082377405).abs() < 1e-12);
        assert!((l_min_estimate(pr(1.0)).unwrap() - 0.7213475204444817).abs() < 1e-15);
        assert!(l_min_estimate(pr(0.5)).is_err());
    }

    #[test]
    fn signed_growth_known_points() {
        assert!((growth_signed_exact(pr(0.5), 10) - -0.03912014845388803).abs() < 1e-14);
        assert!((growth_signed_exact(pr(0.6), 20) - -0.0019231880401475044).abs() < 1e-14);
    }

    #[test]
    fn signed_growth_symmetric_in_p() {
        for &p in &[0.3, 0.45, 0.49] {
            let a = growth_signed_exact(pr(p), 7);
            let b = growth_signed_exact(pr(1.0 - p), 7);
            assert!((a - b).abs() < 1e-15, "p = {p}");
        }
    }

    #[test]
    fn series_validation_and_limits() {
        assert!(growth_signed_series(pr(0.0), 10, 3).is_err());
        assert!(growth_signed_series(pr(1.0), 10, 3).is_err());
        assert!(growth_signed_series(pr(0.6), 0, 3).is_err());
        assert!(growth_signed_series(pr(0.6), 10, 0).is_err());
        assert!(growth_signed_series(pr(0.6), 10, 4).is_err());
        let first = growth_signed_series(pr(0.6), 50, 1).unwrap();
        assert!((first - (kelly_growth(pr(0.6)) - 0.01)).abs() < 1e-15);
        // Deep in the long-memory regime the deficit is dominated by the
        // 1/(2L) term.
        let deep = growth_signed_series(pr(0.6), 1_000_000, 3).unwrap();
        let deficit = kelly_growth(pr(0.6)) - deep;
        assert!((deficit * 2.0e6 - 1.0).abs() < 1e-4);
    }

    #[test]
    fn series_tracks_exact_deficit() {
        for &p in &[0.55, 0.6, 0.7] {
            let gk = kelly_growth(pr(p));
            let d_exact = gk - growth_signed_exact(pr(p), 20);
            let d_series = gk - growth_signed_series(pr(p), 20, 3).unwrap();
            assert!(((d_series - d_exact) / d_exact).abs() < 0.005, "p = {p}");
        }
    }

    #[test]
    fn averaged_growth_uniform_closed_form() {
        let frozen = [
            (1usize, 0.056633012265f64),
            (2, 0.087208023961),
            (5, 0.129382510035),
            (10, 0.154599296722),
        ];
        for &(l, expected) in &frozen {
            let strategy = memory_strategy(l, true);
            let averaged = averaged_growth(&PriorSpec::uniform(), &strategy);
            let lf = l as f64;
            let closed: f64 = (0..=l)
                .map(|w| {
                    let f = strategy.fraction(w);
                    (w as f64 + 1.0) * f.ln_1p() + (lf - w as f64 + 1.0) * (-f).ln_1p()
                })
                .sum::<f64>()
                / ((lf + 1.0) * (lf + 2.0));
            assert!((averaged - closed).abs() < 1e-9, "L = {l}");
            assert!((averaged - expected).abs() < 1e-9, "L = {l}");
        }
    }

    #[test]
    fn averaged_growth_point_mass_limit() {
        let strategy = memory_strategy(10, false);
        let spike = PriorSpec::truncated_uniform(0.6 - 1e-6, 0.6 + 1e-6).unwrap();
        let averaged = averaged_growth(&spike, &strategy);
        let fixed = growth_given_p(pr(0.6), &strategy);
        assert!((averaged - fixed).abs() < 1e-8);
    }

    #[test]
    fn shorting_pays_under_a_wide_prior() {
        let signed = averaged_growth(&PriorSpec::uniform(), &memory_strategy(10, true));
        let clamped = averaged_growth(&PriorSpec::uniform(), &memory_strategy(10, false));
        assert!(signed > clamped);
    }

    #[test]
    fn maximize_uniform_recovers_closed_form() {
        for l in [1usize, 2, 5, 10] {
            let table = maximize_table(l, &PriorSpec::uniform());
            for w in 0..=l {
                let expected = (2.0 * w as f64 - l as f64) / (l as f64 + 2.0);
                assert!(
                    (table.fraction(w) - expected).abs() < 1e-8,
                    "L = {l}, w = {w}"
                );
            }
        }
    }

    #[test]
    fn maximize_truncated_known_points() {
        let table = maximize_table(10, &PriorSpec::truncated_uniform(0.0, 0.75).unwrap());
        assert!((table.fraction(0) - -0.8333336612).abs() < 1e-6);
        assert!((table.fraction(5) - -0.0207883369).abs() < 1e-6);
        assert!((table.fraction(10) - 0.375).abs() < 1e-9);
    }

    #[test]
    fn maximize_is_a_local_maximum() {
        let prior = PriorSpec::truncated_uniform(0.4, 0.9).unwrap();
        let table = maximize_table(4, &prior);
        let base = averaged_growth(&prior, &table);
        for w in 0..=4usize {
            for delta in [-0.01, 0.01] {
                let mut bumped = table.fractions().to_vec();
                bumped[w] += delta;
                let strategy = MemoryStrategy::from_table(bumped, true).unwrap();
                assert!(averaged_growth(&prior, &strategy) <= base + 1e-12);
            }
        }
    }

    #[test]
    fn maximize_never_shorts_favourable_priors() {
        let table = maximize_table(4, &PriorSpec::truncated_uniform(0.55, 0.95).unwrap());
        for w in 0..=4usize {
            assert!(table.fraction(w) >= 0.0, "w = {w}");
        }
    }

    #[test]
    fn maximize_zero_memory_is_prior_mean_stake() {
        let table = maximize_table(0, &PriorSpec::uniform());
        assert!(table.fraction(0).abs() < 1e-10);
        let tilted = maximize_table(0, &PriorSpec::truncated_uniform(0.55, 0.95).unwrap());
        assert!((tilted.fraction(0) - 0.5).abs() < 1e-9);
    }
}
