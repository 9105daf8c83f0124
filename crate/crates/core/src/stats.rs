//! Binomial proportions with exact (Clopper–Pearson) confidence intervals.

use serde::{Deserialize, Serialize};
use statrs::distribution::{Beta, ContinuousCDF};

/// Two-sided confidence level used throughout the reports.
pub const CONFIDENCE: f64 = 0.95;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Proportion {
    pub successes: u64,
    pub trials: u64,
    /// `successes / trials`, 0 when there are no trials.
    pub estimate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

impl Proportion {
    pub fn new(successes: u64, trials: u64) -> Proportion {
        assert!(successes <= trials);
        let (ci_low, ci_high) = clopper_pearson(successes, trials, 1.0 - CONFIDENCE);
        let estimate = if trials == 0 { 0.0 } else { successes as f64 / trials as f64 };
        Proportion { successes, trials, estimate, ci_low, ci_high }
    }

    /// Binomial standard error at probability `p`.
    pub fn standard_error(p: f64, trials: u64) -> f64 {
        if trials == 0 {
            return f64::INFINITY;
        }
        (p * (1.0 - p) / trials as f64).sqrt()
    }
}

/// Exact interval for a binomial proportion at significance `alpha`.
pub fn clopper_pearson(x: u64, n: u64, alpha: f64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let (x, nf) = (x as f64, n as f64);
    let low = if x == 0.0 {
        0.0
    } else {
        Beta::new(x, nf - x + 1.0).unwrap().inverse_cdf(alpha / 2.0)
    };
    let high = if x == nf {
        1.0
    } else {
        Beta::new(x + 1.0, nf - x).unwrap().inverse_cdf(1.0 - alpha / 2.0)
    };
    (low, high)
}
