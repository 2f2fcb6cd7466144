//! One double-or-nothing game: optimal stake and growth of wealth.
//!
//! A bet stakes a fraction f of current wealth on an event of probability
//! p; the stake is doubled on a win and lost otherwise. Growth rates are
//! natural logs per turn.

use crate::types::{Fraction, Probability};
use std::f64::consts::LN_2;

/// Shannon entropy of the outcome in nats, with 0 ln 0 = 0.
pub fn entropy(p: Probability) -> f64 {
    let p = p.get();
    let q = 1.0 - p;
    if p == 0.0 || q == 0.0 {
        return 0.0;
    }
    -(p * p.ln() + q * q.ln())
}

/// Growth-optimal stake max(2p - 1, 0); an unfavourable game is sat out.
pub fn kelly_fraction(p: Probability) -> Fraction {
    Fraction::new_unchecked((2.0 * p.get() - 1.0).max(0.0))
}

/// Expected log growth per turn when staking f at win probability p.
/// Betting everything (f = 1) with p < 1 loses all wealth eventually,
/// hence -inf.
pub fn growth_rate(p: Probability, f: Fraction) -> f64 {
    let (p, f) = (p.get(), f.get());
    if f == 1.0 {
        return if p == 1.0 { LN_2 } else { f64::NEG_INFINITY };
    }
    p * f.ln_1p() + (1.0 - p) * (-f).ln_1p()
}

/// Growth at the optimal stake: ln 2 - entropy(p) when favourable, else 0.
pub fn kelly_growth(p: Probability) -> f64 {
    if p.get() < 0.5 {
        0.0
    } else {
        LN_2 - entropy(p)
    }
}

/// Per-turn compounded return at the optimal stake, 2 p^p (1-p)^(1-p) - 1,
/// identically exp(kelly_growth) - 1.
pub fn kelly_compounded_return(p: Probability) -> f64 {
    let p = p.get();
    if p <= 0.5 {
        return 0.0;
    }
    let q = 1.0 - p;
    2.0 * p.powf(p) * q.powf(q) - 1.0
}
