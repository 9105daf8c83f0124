use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::additive::AdditivePoly;
use crate::error::{Error, Result};
use crate::field::{prime_power, Fe, MAX_FIELD_ORDER};
use crate::poly::Poly;

/// Specialization points sampled per degree when a field is too large to enumerate.
pub const DEFAULT_TAU_BUDGET: u64 = 4096;

/// Fields up to this order are swept exhaustively.
pub(crate) const FULL_SWEEP_LIMIT: u64 = 1 << 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Theorem1,
    Theorem2,
    Content,
    Delta,
    Specfact,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub q: u64,
    /// Bound on the t-degree of each coefficient.
    pub d: usize,
    pub n_values: Vec<usize>,
    pub trials: u64,
    pub r_max: u32,
    pub seed: u64,
    pub mode: Mode,
    #[serde(default = "default_tau_budget")]
    pub tau_budget: u64,
    /// Also compute every content through the expanded bivariate polynomial.
    #[serde(default)]
    pub cross_check: bool,
}

fn default_tau_budget() -> u64 {
    DEFAULT_TAU_BUDGET
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidArgument(m));
        if prime_power(self.q).is_none() {
            return bad(format!("q = {} is not a prime power", self.q));
        }
        if self.r_max < 1 {
            return bad("r_max must be at least 1".into());
        }
        if self.n_values.is_empty() || self.n_values.contains(&0) {
            return bad("n_values must be a nonempty list of positive integers".into());
        }
        if self.tau_budget == 0 {
            return bad("tau_budget must be positive".into());
        }
        match crate::util::checked_pow(self.q, self.r_max) {
            Some(v) if v <= MAX_FIELD_ORDER => {}
            _ => return bad(format!("q^r_max exceeds the supported field order {MAX_FIELD_ORDER}")),
        }
        if crate::util::checked_pow(self.q, self.d as u32 + 1).is_none() {
            return bad("q^(d+1) overflows".into());
        }
        Ok(())
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let cfg: ExperimentConfig =
            serde_json::from_str(s).map_err(|e| Error::InvalidArgument(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Independent stream for trial `trial` at additive degree `n`.
pub fn trial_rng(seed: u64, n: usize, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((n as u64) << 40) | trial);
    rng
}

/// Uniform element of `F_q[t]_{≤d}`.
pub(crate) fn random_poly(q: u64, d: usize, rng: &mut ChaCha8Rng) -> Poly {
    Poly::from_coeffs((0..=d).map(|_| Fe(rng.gen_range(0..q) as u32)).collect())
}

/// Every element of `F_q[t]_{≤d}`, indexed by base-`q` digits (zero first).
pub(crate) fn all_polys(q: u64, d: usize) -> Vec<Poly> {
    let count = q.pow(d as u32 + 1);
    (0..count)
        .map(|code| {
            let digits = (0..=d).map(|i| Fe((code / q.pow(i as u32) % q) as u32)).collect();
            Poly::from_coeffs(digits)
        })
        .collect()
}

/// `X^{q^n} + Σ_{i<n} a_i X^{q^i}` with `a_i` independent and uniform in `F_q[t]_{≤d}`.
pub fn sample_additive(q: u64, d: usize, n: usize, rng: &mut ChaCha8Rng) -> AdditivePoly {
    let lower = (0..n).map(|_| random_poly(q, d, rng)).collect();
    AdditivePoly::monic_from_lower(q, lower)
}
